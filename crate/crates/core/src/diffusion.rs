//! Lazy random-transposition diffusion: kernel, spectrum, success
//! probabilities and their lower bounds.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gft::{FourierSpectrum, GroupFunction, Normalization};
use crate::perm::{factorial, Permutation};
use crate::young::{enumerate_partitions, Partition};

/// Float stay probabilities are read as the nearest multiple of
/// `2^-DYADIC_BITS`, which is exact for every double above `2^-44`.
const DYADIC_BITS: u32 = 96;

/// A stay probability `p ∈ (0, 1]` carried with an exact rational value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StayProbability {
    value: f64,
    exact: Ratio<i128>,
    from_float: bool,
}

impl StayProbability {
    pub fn from_f64(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::ProbabilityDomain {
                value: p,
                domain: "(0, 1]",
            });
        }
        let denom = 1i128 << DYADIC_BITS;
        let numer = (p * denom as f64).round() as i128;
        if numer == 0 {
            return Err(Error::ProbabilityDomain {
                value: p,
                domain: "(0, 1]",
            });
        }
        Ok(Self {
            value: p,
            exact: Ratio::new(numer, denom),
            from_float: true,
        })
    }

    pub fn from_ratio(a: i64, b: i64) -> Result<Self> {
        if b <= 0 || a <= 0 || a > b {
            return Err(Error::ProbabilityDomain {
                value: a as f64 / b as f64,
                domain: "(0, 1]",
            });
        }
        let exact = Ratio::new(a as i128, b as i128);
        Ok(Self {
            value: a as f64 / b as f64,
            exact,
            from_float: false,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Ratio<i128> {
        self.exact
    }

    /// True when the exact value was derived from a binary float.
    pub fn from_float(&self) -> bool {
        self.from_float
    }
}

impl fmt::Display for StayProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.from_float {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{}/{}", self.exact.numer(), self.exact.denom())
        }
    }
}

impl FromStr for StayProbability {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPlan(format!("cannot parse stay probability {s:?}; expected a/b or a decimal"));
        match s.split_once('/') {
            Some((a, b)) => {
                let a = a.trim().parse().map_err(|_| bad())?;
                let b = b.trim().parse().map_err(|_| bad())?;
                Self::from_ratio(a, b)
            }
            None => Self::from_f64(s.trim().parse().map_err(|_| bad())?),
        }
    }
}

impl Serialize for StayProbability {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.from_float {
            serializer.serialize_f64(self.value)
        } else {
            serializer.collect_str(self)
        }
    }
}

impl<'de> Deserialize<'de> for StayProbability {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(p) => StayProbability::from_f64(p),
            Raw::Text(s) => s.parse(),
        }
        .map_err(serde::de::Error::custom)
    }
}

/// `q(e) = p`, `q(τ) = (1−p)/C(n,2)` on transpositions, applied `steps` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionKernel {
    n: usize,
    p: StayProbability,
    steps: u32,
}

impl DiffusionKernel {
    pub fn new(n: usize, p: StayProbability, steps: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidPlan(format!("diffusion needs n >= 2, got {n}")));
        }
        if steps == 0 {
            return Err(Error::InvalidPlan("diffusion step count must be >= 1".into()));
        }
        Ok(Self { n, p, steps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> StayProbability {
        self.p
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    /// `(λ, c_λ)` in canonical order.
    pub fn eigenvalues(&self) -> Vec<(Partition, f64)> {
        enumerate_partitions(self.n)
            .into_iter()
            .map(|l| {
                let c = l.diffusion_eigenvalue(self.p.value);
                (l, c)
            })
            .collect()
    }

    /// `(λ, c_λ)` exactly.
    pub fn exact_eigenvalues(&self) -> Vec<(Partition, Ratio<i128>)> {
        enumerate_partitions(self.n)
            .into_iter()
            .map(|l| {
                let c = l.diffusion_eigenvalue_exact(self.p.exact);
                (l, c)
            })
            .collect()
    }
}

/// The one-step kernel as a function on the group.
pub fn kernel_as_function(k: &DiffusionKernel) -> GroupFunction {
    let n = k.n;
    let p = k.p.value;
    let pairs = (n * (n - 1) / 2) as f64;
    let mut values = vec![0.0; factorial(n)];
    values[0] = p;
    for i in 1..=n {
        for j in i + 1..=n {
            let t = Permutation::transposition(n, i, j).expect("indices in range");
            values[t.rank()] = (1.0 - p) / pairs;
        }
    }
    GroupFunction::new(n, values).expect("length n!")
}

fn scale_blocks(spectrum: &FourierSpectrum, k: &DiffusionKernel) -> Result<(FourierSpectrum, f64)> {
    if spectrum.n() != k.n {
        return Err(Error::DegreeMismatch {
            expected: k.n,
            found: spectrum.n(),
        });
    }
    if spectrum.normalization() != Normalization::Unitary {
        return Err(Error::MalformedSpectrum("diffusion expects a unitary-normalized spectrum".into()));
    }
    let mut out = spectrum.clone();
    let mut norm_sq = 0.0;
    for block in out.blocks_mut() {
        let c = block.partition.diffusion_eigenvalue(k.p.value).powi(k.steps as i32);
        block.matrix *= c;
        norm_sq += block.matrix.norm_squared();
    }
    if norm_sq <= f64::MIN_POSITIVE {
        return Err(Error::Annihilated { stage: "diffusion" });
    }
    Ok((out, norm_sq))
}

/// Scales each block by `c_λ^d` and renormalizes. Returns the post-selection
/// probability `Σ_λ c_λ^{2d} ‖ĥ_λ‖²_F` of a unit input.
pub fn apply_diffusion_spectral(spectrum: &FourierSpectrum, k: &DiffusionKernel) -> Result<(FourierSpectrum, f64)> {
    let (mut out, norm_sq) = scale_blocks(spectrum, k)?;
    out.scale(1.0 / norm_sq.sqrt());
    Ok((out, norm_sq))
}

/// Diffusion of Born amplitudes `ψ = √h`; returns the renormalizer
/// `𝒩 = √(Σ_μ ‖q̂_μ ψ̂_μ‖²_F)`.
pub fn apply_diffusion_born(spectrum: &FourierSpectrum, k: &DiffusionKernel) -> Result<(FourierSpectrum, f64)> {
    let (mut out, norm_sq) = scale_blocks(spectrum, k)?;
    let renorm = norm_sq.sqrt();
    out.scale(1.0 / renorm);
    Ok((out, renorm))
}

/// First-step success probability from `|e⟩`: `p² + 2(1−p)²/(n(n−1))`.
pub fn success_probability_t0(n: usize, p: f64) -> f64 {
    let nn = n as f64;
    p * p + 2.0 * (1.0 - p) * (1.0 - p) / (nn * (nn - 1.0))
}

/// Which regime produced a success-probability lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum LowerBound {
    /// `p > 1/2`: `(2p−1)^{2d}`.
    Lazy { value: f64 },
    /// `p = a/b ≤ 1/2` with every `c_λ ≠ 0`: `(4/(b²n⁴))^d`.
    /// `from_float` marks `b` taken from the dyadic value of a float.
    Rational { value: f64, a: i128, b: i128, from_float: bool },
    /// Some `c_λ = 0`, so the rational bound does not apply.
    Inapplicable,
}

impl LowerBound {
    pub fn value(&self) -> Option<f64> {
        match *self {
            LowerBound::Lazy { value } | LowerBound::Rational { value, .. } => Some(value),
            LowerBound::Inapplicable => None,
        }
    }
}

/// Lower bound on the success probability of `d` diffusion steps.
pub fn success_probability_lower_bound(n: usize, p: StayProbability, d: u32) -> LowerBound {
    let half = Ratio::new(1, 2);
    if p.exact > half {
        return LowerBound::Lazy {
            value: (2.0 * p.value - 1.0).powi(2 * d as i32),
        };
    }
    let zero = enumerate_partitions(n)
        .iter()
        .any(|l| l.diffusion_eigenvalue_exact(p.exact) == Ratio::from_integer(0));
    if zero {
        return LowerBound::Inapplicable;
    }
    let (a, b) = (*p.exact.numer(), *p.exact.denom());
    let nn = n as f64;
    let one = 4.0 / ((b as f64) * (b as f64) * nn.powi(4));
    LowerBound::Rational {
        value: one.powi(d as i32),
        a,
        b,
        from_float: p.from_float,
    }
}
