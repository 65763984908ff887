//! Partitions of `n`, irrep dimensions and the character data needed by the
//! diffusion spectrum.
//!
//! Partitions are listed in reverse lexicographic order, `(n)` first and
//! `(1^n)` last. That order fixes the block layout of every spectrum.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irrep;
use crate::perm::{factorial, Permutation};

/// A non-increasing sequence of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    parts: Vec<usize>,
}

impl Partition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidPartition("no parts".into()));
        }
        if parts.contains(&0) {
            return Err(Error::InvalidPartition(format!("{parts:?} has a zero part")));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not non-increasing")));
        }
        Ok(Self { parts })
    }

    pub fn trivial(n: usize) -> Self {
        Self { parts: vec![n] }
    }

    pub fn sign(n: usize) -> Self {
        Self { parts: vec![1; n] }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Weight `n = Σ λ_i`.
    pub fn n(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Transposed diagram `λ'`.
    pub fn conjugate(&self) -> Self {
        let parts = (0..self.parts[0])
            .map(|col| self.parts.iter().filter(|&&row| row > col).count())
            .collect();
        Self { parts }
    }

    /// `(row, col)` boxes, 0-based, in row-major order.
    pub fn boxes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
    }

    pub fn hook_lengths(&self) -> Vec<usize> {
        let conj = self.conjugate();
        self.boxes()
            .map(|(r, c)| (self.parts[r] - c - 1) + (conj.parts[c] - r - 1) + 1)
            .collect()
    }

    /// `d_λ = n! / Π h(c)`.
    pub fn dimension(&self) -> usize {
        let hooks: u128 = self.hook_lengths().iter().map(|&h| h as u128).product();
        let nf: u128 = (1..=self.n() as u128).product();
        (nf / hooks) as usize
    }

    /// `r_λ = χ_λ(transposition) / d_λ = (Σ C(λ_i,2) − Σ C(λ'_i,2)) / C(n,2)`.
    ///
    /// `S_1` has no transpositions; `(1)` reports 1 there.
    pub fn transposition_character_ratio(&self) -> Ratio<i64> {
        let n = self.n() as i64;
        if n < 2 {
            return Ratio::from_integer(1);
        }
        let pairs = |p: &[usize]| p.iter().map(|&x| (x * x.saturating_sub(1) / 2) as i64).sum::<i64>();
        Ratio::new(pairs(&self.parts) - pairs(&self.conjugate().parts), n * (n - 1) / 2)
    }

    /// `c_λ = p + (1−p) r_λ` in exact arithmetic.
    pub fn diffusion_eigenvalue_exact(&self, p: Ratio<i128>) -> Ratio<i128> {
        let r = self.transposition_character_ratio();
        let r = Ratio::new(*r.numer() as i128, *r.denom() as i128);
        p + (Ratio::from_integer(1) - p) * r
    }

    /// `c_λ` for a floating-point stay probability; `r_λ` is exact and
    /// converted once.
    pub fn diffusion_eigenvalue(&self, p: f64) -> f64 {
        let r = self.transposition_character_ratio();
        let r = *r.numer() as f64 / *r.denom() as f64;
        p + (1.0 - p) * r
    }

    /// `z_μ = Π i^{m_i} m_i!`, the centralizer order of cycle type `μ`.
    pub fn centralizer_order(&self) -> usize {
        let mut z = 1usize;
        let mut i = 0;
        while i < self.parts.len() {
            let len = self.parts[i];
            let mult = self.parts[i..].iter().take_while(|&&x| x == len).count();
            z *= len.pow(mult as u32) * factorial(mult);
            i += mult;
        }
        z
    }

    /// Size of the conjugacy class with this cycle type.
    pub fn class_size(&self) -> usize {
        factorial(self.n()) / self.centralizer_order()
    }

    /// A permutation whose cycle type is this partition: consecutive blocks
    /// `(1 2 … μ_1)(μ_1+1 …)…`.
    pub fn class_representative(&self) -> Permutation {
        let n = self.n();
        let mut images = vec![0; n];
        let mut start = 0;
        for &len in &self.parts {
            for j in 0..len {
                images[start + j] = start + (j + 1) % len;
            }
            start += len;
        }
        Permutation::from_images_unchecked(images)
    }

    /// JSON-array form used as a spectrum block key, e.g. `[3,1]`.
    pub fn key(&self) -> String {
        serde_json::to_string(&self.parts).expect("partition serializes")
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Self::new(parts)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.key())
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<usize> =
            serde_json::from_str(s).map_err(|e| Error::InvalidPartition(e.to_string()))?;
        Self::new(parts)
    }
}

/// All partitions of `n` in reverse lexicographic order.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            prefix.push(part);
            rec(remaining - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

pub fn irrep_dimension(lambda: &Partition) -> usize {
    lambda.dimension()
}

pub fn transposition_character_ratio(lambda: &Partition) -> Ratio<i64> {
    lambda.transposition_character_ratio()
}

pub fn diffusion_eigenvalue(lambda: &Partition, p: f64) -> f64 {
    lambda.diffusion_eigenvalue(p)
}

/// Asymptotic partition count `e^{π√(2n/3)} / (4n√3)`.
pub fn partition_count_asymptotic(n: usize) -> f64 {
    let n = n as f64;
    (std::f64::consts::PI * (2.0 * n / 3.0).sqrt()).exp() / (4.0 * n * 3f64.sqrt())
}

/// `χ_λ(σ)` read off the trace of the orthogonal irrep matrix.
pub fn character(lambda: &Partition, sigma: &Permutation) -> Result<f64> {
    Ok(irrep::irrep_of(lambda, sigma)?.matrix.trace())
}

/// Character table row for `λ`, columns in canonical cycle-type order.
pub fn character_row(lambda: &Partition) -> Result<Vec<f64>> {
    enumerate_partitions(lambda.n())
        .iter()
        .map(|mu| character(lambda, &mu.class_representative()))
        .collect()
}

/// Multiplicity of `ν` in `λ ⊗ μ`: `⟨χ_λ χ_μ, χ_ν⟩` summed class by class.
pub fn kronecker_multiplicity(lambda: &Partition, mu: &Partition, nu: &Partition) -> Result<usize> {
    let n = lambda.n();
    for other in [mu, nu] {
        if other.n() != n {
            return Err(Error::DegreeMismatch {
                expected: n,
                found: other.n(),
            });
        }
    }
    let (a, b, c) = (character_row(lambda)?, character_row(mu)?, character_row(nu)?);
    let total: f64 = enumerate_partitions(n)
        .iter()
        .enumerate()
        .map(|(i, class)| class.class_size() as f64 * a[i] * b[i] * c[i])
        .sum();
    let z = total / factorial(n) as f64;
    let rounded = z.round();
    debug_assert!((z - rounded).abs() < 1e-6, "non-integral multiplicity {z}");
    Ok(rounded.max(0.0) as usize)
}
