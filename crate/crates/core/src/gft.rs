//! Group Fourier transform over `S_n` with explicit plain and unitary
//! normalizations.

use std::collections::HashMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::irrep::{for_each_irrep_matrix, irrep_of};
use crate::perm::{degree_from_len, factorial, Permutation};
use crate::young::{enumerate_partitions, Partition};

/// Largest degree for which the dense QFT matrix is built.
pub const QFT_MAX_DEGREE: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `ĥ_λ = Σ_σ h(σ) ρ_λ(σ)`.
    Plain,
    /// `ĥ_λ = √(d_λ/n!) Σ_σ h(σ) ρ_λ(σ)`, an isometry.
    Unitary,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::Plain => "plain",
            Normalization::Unitary => "unitary",
        })
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Normalization::Plain),
            "unitary" => Ok(Normalization::Unitary),
            other => Err(Error::MalformedSpectrum(format!("unknown normalization `{other}`"))),
        }
    }
}

fn unitary_factor(d: usize, n: usize) -> f64 {
    (d as f64 / factorial(n) as f64).sqrt()
}

/// A real function on `S_n`, indexed by Lehmer rank.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFunction {
    n: usize,
    values: Vec<f64>,
}

impl GroupFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != factorial(n) {
            return Err(Error::DegreeMismatch {
                expected: factorial(n),
                found: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidPermutation(format!("non-finite function value {v}")));
        }
        Ok(Self { n, values })
    }

    /// Infers `n` from the length, which must be a factorial.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let n = degree_from_len(values.len())?;
        Self::new(n, values)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![0.0; factorial(n)],
        }
    }

    pub fn delta(sigma: &Permutation) -> Self {
        let mut h = Self::zeros(sigma.n());
        h.values[sigma.rank()] = 1.0;
        h
    }

    pub fn uniform(n: usize) -> Self {
        let total = factorial(n);
        Self {
            n,
            values: vec![1.0 / total as f64; total],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn at(&self, sigma: &Permutation) -> f64 {
        self.values[sigma.rank()]
    }

    pub fn norm_squared(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `(shift_τ h)(σ) = h(τ⁻¹σ)`, the left-regular action.
    pub fn left_shift(&self, tau: &Permutation) -> Result<Self> {
        if tau.n() != self.n {
            return Err(Error::DegreeMismatch {
                expected: self.n,
                found: tau.n(),
            });
        }
        let mut out = vec![0.0; self.values.len()];
        for (rank, g) in Permutation::all(self.n).enumerate() {
            out[tau.compose(&g)?.rank()] = self.values[rank];
        }
        Ok(Self { n: self.n, values: out })
    }

    /// First-order marginals `P[i][j] = Σ_{σ(i)=j} h(σ)`, 0-based.
    pub fn first_order_marginals(&self) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(self.n, self.n);
        for (rank, sigma) in Permutation::all(self.n).enumerate() {
            for i in 0..self.n {
                p[(i, sigma.image(i + 1) - 1)] += self.values[rank];
            }
        }
        p
    }
}

/// One `d_λ × d_λ` Fourier coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumBlock {
    pub partition: Partition,
    pub matrix: DMatrix<f64>,
}

/// Fourier coefficients in canonical partition order.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierSpectrum {
    n: usize,
    normalization: Normalization,
    blocks: Vec<SpectrumBlock>,
}

impl FourierSpectrum {
    pub fn zeros(n: usize, normalization: Normalization) -> Self {
        let blocks = enumerate_partitions(n)
            .into_iter()
            .map(|partition| {
                let d = partition.dimension();
                SpectrumBlock {
                    partition,
                    matrix: DMatrix::zeros(d, d),
                }
            })
            .collect();
        Self {
            n,
            normalization,
            blocks,
        }
    }

    /// Builds a spectrum from blocks given in any order; every partition of
    /// `n` must appear once with the right shape.
    pub fn from_blocks(n: usize, normalization: Normalization, blocks: Vec<SpectrumBlock>) -> Result<Self> {
        let mut by_key: HashMap<Partition, DMatrix<f64>> = HashMap::new();
        for b in blocks {
            if b.partition.n() != n {
                return Err(Error::MalformedSpectrum(format!("block {} has weight != {n}", b.partition)));
            }
            let d = b.partition.dimension();
            if b.matrix.nrows() != d || b.matrix.ncols() != d {
                return Err(Error::MalformedSpectrum(format!(
                    "block {} is {}x{}, expected {d}x{d}",
                    b.partition,
                    b.matrix.nrows(),
                    b.matrix.ncols()
                )));
            }
            if by_key.insert(b.partition.clone(), b.matrix).is_some() {
                return Err(Error::MalformedSpectrum(format!("block {} repeated", b.partition)));
            }
        }
        let mut out = Vec::new();
        for partition in enumerate_partitions(n) {
            let matrix = by_key
                .remove(&partition)
                .ok_or_else(|| Error::MalformedSpectrum(format!("missing block {partition}")))?;
            out.push(SpectrumBlock { partition, matrix });
        }
        Ok(Self {
            n,
            normalization,
            blocks: out,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn blocks(&self) -> &[SpectrumBlock] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [SpectrumBlock] {
        &mut self.blocks
    }

    pub fn block(&self, lambda: &Partition) -> Option<&DMatrix<f64>> {
        self.blocks.iter().find(|b| &b.partition == lambda).map(|b| &b.matrix)
    }

    /// Squared Frobenius norm of every block.
    pub fn energies(&self) -> Vec<(Partition, f64)> {
        self.blocks
            .iter()
            .map(|b| (b.partition.clone(), b.matrix.norm_squared()))
            .collect()
    }

    pub fn total_energy(&self) -> f64 {
        self.blocks.iter().map(|b| b.matrix.norm_squared()).sum()
    }

    /// Entries in `(λ, i, j)` order: canonical partitions, then row-major.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for b in &self.blocks {
            for i in 0..b.matrix.nrows() {
                for j in 0..b.matrix.ncols() {
                    out.push(b.matrix[(i, j)]);
                }
            }
        }
        out
    }

    /// Same transform expressed in the other normalization.
    pub fn renormalized(&self, target: Normalization) -> Self {
        let mut out = self.clone();
        if target == self.normalization {
            return out;
        }
        for b in &mut out.blocks {
            let f = unitary_factor(b.partition.dimension(), self.n);
            b.matrix *= if target == Normalization::Unitary { f } else { 1.0 / f };
        }
        out.normalization = target;
        out
    }

    /// Zeroes every block whose partition is not listed.
    pub fn restricted_to(&self, keep: &[Partition]) -> Self {
        let mut out = self.clone();
        for b in &mut out.blocks {
            if !keep.contains(&b.partition) {
                b.matrix.fill(0.0);
            }
        }
        out
    }

    pub fn scale(&mut self, factor: f64) {
        for b in &mut self.blocks {
            b.matrix *= factor;
        }
    }
}

impl Serialize for FourierSpectrum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Blocks<'a>(&'a [SpectrumBlock]);

        impl Serialize for Blocks<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
                let mut map = serializer.serialize_map(Some(self.0.len()))?;
                for b in self.0 {
                    let rows: Vec<Vec<f64>> = (0..b.matrix.nrows())
                        .map(|i| (0..b.matrix.ncols()).map(|j| b.matrix[(i, j)]).collect())
                        .collect();
                    map.serialize_entry(&b.partition.key(), &rows)?;
                }
                map.end()
            }
        }

        let mut st = serializer.serialize_struct("FourierSpectrum", 2)?;
        st.serialize_field("normalization", &self.normalization)?;
        st.serialize_field("blocks", &Blocks(&self.blocks))?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for FourierSpectrum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            normalization: Normalization,
            blocks: HashMap<String, Vec<Vec<f64>>>,
        }

        let raw = Raw::deserialize(deserializer)?;
        let mut blocks = Vec::with_capacity(raw.blocks.len());
        for (key, rows) in raw.blocks {
            let partition: Partition = key.parse().map_err(de::Error::custom)?;
            let d = rows.len();
            if rows.iter().any(|r| r.len() != d) {
                return Err(de::Error::custom(format!("block {key} is not square")));
            }
            let flat: Vec<f64> = rows.into_iter().flatten().collect();
            blocks.push(SpectrumBlock {
                partition,
                matrix: DMatrix::from_row_slice(d, d, &flat),
            });
        }
        let n = blocks
            .first()
            .map(|b| b.partition.n())
            .ok_or_else(|| de::Error::custom("spectrum has no blocks"))?;
        FourierSpectrum::from_blocks(n, raw.normalization, blocks).map_err(de::Error::custom)
    }
}

/// Below this fraction of nonzero entries the forward transform sums
/// explicit matrices instead of sweeping the whole group.
const SPARSE_FRACTION: usize = 16;

/// `ĥ_λ = Σ_σ h(σ) ρ_λ(σ)`, scaled by `√(d_λ/n!)` when unitary.
pub fn gft_forward(h: &GroupFunction, normalization: Normalization) -> FourierSpectrum {
    let n = h.n;
    let mut spectrum = FourierSpectrum::zeros(n, normalization);
    let nonzero: Vec<usize> = (0..h.values.len()).filter(|&r| h.values[r] != 0.0).collect();
    let sparse = nonzero.len() * SPARSE_FRACTION < h.values.len();
    for (index, block) in spectrum.blocks.iter_mut().enumerate() {
        let d = block.partition.dimension();
        let mut acc = vec![0.0; d * d];
        if sparse {
            for &rank in &nonzero {
                let sigma = Permutation::from_rank(n, rank).expect("rank in range");
                let m = irrep_of(&block.partition, &sigma).expect("degrees agree").matrix;
                let w = h.values[rank];
                for i in 0..d {
                    for j in 0..d {
                        acc[i * d + j] += w * m[(i, j)];
                    }
                }
            }
        } else {
            for_each_irrep_matrix(index, &block.partition, |rank, m| {
                let w = h.values[rank];
                if w != 0.0 {
                    acc.iter_mut().zip(m).for_each(|(a, x)| *a += w * x);
                }
            });
        }
        let mut matrix = DMatrix::from_row_slice(d, d, &acc);
        if normalization == Normalization::Unitary {
            matrix *= unitary_factor(d, n);
        }
        block.matrix = matrix;
    }
    spectrum
}

/// Inverse transform:
/// plain `h(σ) = (1/n!) Σ_λ d_λ tr(ρ_λ(σ)ᵀ ĥ_λ)`,
/// unitary `h(σ) = Σ_λ √(d_λ/n!) tr(ρ_λ(σ)ᵀ ĥ_λ)`.
pub fn gft_inverse(spectrum: &FourierSpectrum) -> GroupFunction {
    let n = spectrum.n;
    let total = factorial(n);
    let mut values = vec![0.0; total];
    for (index, block) in spectrum.blocks.iter().enumerate() {
        let d = block.partition.dimension();
        if block.matrix.iter().all(|&x| x == 0.0) {
            continue;
        }
        let coef = match spectrum.normalization {
            Normalization::Plain => d as f64 / total as f64,
            Normalization::Unitary => unitary_factor(d, n),
        };
        let hat: Vec<f64> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|ij| block.matrix[ij]).collect();
        for_each_irrep_matrix(index, &block.partition, |rank, m| {
            let dot: f64 = m.iter().zip(&hat).map(|(a, b)| a * b).sum();
            values[rank] += coef * dot;
        });
    }
    GroupFunction { n, values }
}

/// Dense QFT: `F[(λ,i,j), σ] = √(d_λ/n!) ρ_λ(σ)_{ij}`.
pub fn qft_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n > QFT_MAX_DEGREE {
        return Err(Error::SizeGuard {
            n,
            max: QFT_MAX_DEGREE,
        });
    }
    let total = factorial(n);
    let mut f = DMatrix::zeros(total, total);
    let mut row0 = 0;
    for (index, lambda) in enumerate_partitions(n).iter().enumerate() {
        let d = lambda.dimension();
        let c = unitary_factor(d, n);
        for_each_irrep_matrix(index, lambda, |rank, m| {
            for (k, &x) in m.iter().enumerate() {
                f[(row0 + k, rank)] = c * x;
            }
        });
        row0 += d * d;
    }
    Ok(f)
}

/// Direct-space convolution `(q⋆h)(σ) = Σ_τ q(στ⁻¹) h(τ)`.
pub fn convolve(q: &GroupFunction, h: &GroupFunction) -> Result<GroupFunction> {
    if q.n != h.n {
        return Err(Error::DegreeMismatch {
            expected: q.n,
            found: h.n,
        });
    }
    let n = q.n;
    let perms: Vec<Permutation> = Permutation::all(n).collect();
    let mut out = vec![0.0; perms.len()];
    for (gr, g) in perms.iter().enumerate() {
        let qg = q.values[gr];
        if qg == 0.0 {
            continue;
        }
        for (tr, t) in perms.iter().enumerate() {
            out[g.compose(t)?.rank()] += qg * h.values[tr];
        }
    }
    Ok(GroupFunction { n, values: out })
}

/// Fourier-side product: `q̂_λ ĥ_λ` (plain) or `√(n!/d_λ) q̂_λ ĥ_λ`
/// (unitary), the transform of `q⋆h`.
pub fn spectral_product(q: &FourierSpectrum, h: &FourierSpectrum) -> Result<FourierSpectrum> {
    if q.n != h.n {
        return Err(Error::DegreeMismatch {
            expected: q.n,
            found: h.n,
        });
    }
    if q.normalization != h.normalization {
        return Err(Error::MalformedSpectrum(format!(
            "cannot multiply {} and {} spectra",
            q.normalization, h.normalization
        )));
    }
    let mut out = h.clone();
    for (ob, qb) in out.blocks.iter_mut().zip(&q.blocks) {
        let mut m = &qb.matrix * &ob.matrix;
        if q.normalization == Normalization::Unitary {
            m /= unitary_factor(qb.partition.dimension(), q.n);
        }
        ob.matrix = m;
    }
    Ok(out)
}
