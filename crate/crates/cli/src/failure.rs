use std::fmt;
use std::path::Path;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    VerifyFailed,
    Invalid,
    Guard,
    Annihilated,
    Io,
}

impl Kind {
    pub fn exit_code(self) -> u8 {
        match self {
            Kind::VerifyFailed => 1,
            Kind::Invalid => 2,
            Kind::Guard => 3,
            Kind::Annihilated => 4,
            Kind::Io => 5,
        }
    }
}

/// A failed command, reported as a single JSON line on stderr.
#[derive(Debug, Serialize)]
pub struct Failure {
    pub kind: Kind,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    pub message: String,
}

impl Failure {
    pub fn new(kind: Kind, message: impl fmt::Display) -> Self {
        Failure { kind, exit_code: kind.exit_code(), field: None, message: message.to_string() }
    }

    pub fn with_field(mut self, field: impl Into<String>) -> Self {
        let field = field.into();
        if !field.is_empty() && field != "." {
            self.field = Some(field);
        }
        self
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        Failure::new(Kind::Io, format!("{}: {err}", path.display()))
    }

    pub fn guard(n: usize, max: usize) -> Self {
        Failure::new(Kind::Guard, format!("n = {n} exceeds the guard {max}"))
    }
}

impl From<permfourier::Error> for Failure {
    fn from(err: permfourier::Error) -> Self {
        use permfourier::Error as E;
        let kind = match err {
            E::SizeGuard { .. } => Kind::Guard,
            E::Annihilated { .. } => Kind::Annihilated,
            _ => Kind::Invalid,
        };
        Failure::new(kind, err)
    }
}
