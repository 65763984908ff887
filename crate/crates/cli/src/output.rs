//! Serialization helpers. Every float is written with 17 significant digits
//! so that files round-trip exactly.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};

struct Exact;

impl Formatter for Exact {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// `value` in scientific notation with a 16-digit mantissa fraction.
pub fn float(value: f64) -> String {
    format!("{value:.16e}")
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Exact);
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    buf
}

pub fn json_line<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut buf = json(value);
    buf.push(b'\n');
    buf
}

pub fn one_line_field(images: &[usize]) -> String {
    images.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}
