//! Statevector execution of diffusion/conditioning plans with a
//! success-probability ledger, amplification cost estimates, sampling and
//! posterior sharpening.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::conditioning::{reorder_update_condition, success_probability_conditioning, CostReport, Encoding, Observation, ObservationKind};
use crate::diffusion::{apply_diffusion_spectral, success_probability_lower_bound, DiffusionKernel, LowerBound, StayProbability};
use crate::error::{Error, Result};
use crate::gft::{gft_forward, gft_inverse, FourierSpectrum, GroupFunction, Normalization};
use crate::perm::{degree_from_len, factorial, Permutation};
use crate::young::Partition;

/// Largest degree accepted by [`verify_posterior_block_encoding`].
pub const BLOCK_ENCODING_MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|e⟩`.
    #[default]
    Identity,
    /// A dataset of permutations; repeats accumulate counts.
    Empirical(Vec<Permutation>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlanStep {
    Diffusion { p: StayProbability, d: u32 },
    Conditioning { observation: Observation },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub n: usize,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub encoding: Encoding,
    #[serde(default)]
    pub steps: Vec<PlanStep>,
    #[serde(default)]
    pub seed: u64,
    /// Exponent `m` of the final sharpening map, if any.
    #[serde(default)]
    pub sharpening: Option<u32>,
    /// Allows an empirical initial state under amplitude encoding.
    #[serde(default)]
    pub allow_amplitude_empirical: bool,
}

impl ExperimentPlan {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            initial: InitialState::Identity,
            encoding: Encoding::Amplitude,
            steps: Vec::new(),
            seed: 0,
            sharpening: None,
            allow_amplitude_empirical: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidPlan("n must be >= 1".into()));
        }
        if let InitialState::Empirical(data) = &self.initial {
            if data.is_empty() {
                return Err(Error::InvalidPlan("empirical dataset is empty".into()));
            }
            if let Some(p) = data.iter().find(|p| p.n() != self.n) {
                return Err(Error::DegreeMismatch {
                    expected: self.n,
                    found: p.n(),
                });
            }
            if self.encoding == Encoding::Amplitude && !self.allow_amplitude_empirical {
                return Err(Error::InvalidPlan(
                    "empirical initial state needs born encoding or allow_amplitude_empirical".into(),
                ));
            }
        }
        for step in &self.steps {
            match step {
                PlanStep::Diffusion { p, d } => {
                    DiffusionKernel::new(self.n, *p, *d)?;
                }
                PlanStep::Conditioning { observation } => observation.validate(self.n)?,
            }
        }
        if self.sharpening == Some(0) {
            return Err(Error::InvalidPlan("sharpening exponent must be >= 1".into()));
        }
        Ok(())
    }
}

/// One post-selected step.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LedgerEntry {
    Diffusion {
        step: usize,
        p: StayProbability,
        d: u32,
        success_prob: f64,
        bound: Option<f64>,
        bound_detail: LowerBound,
    },
    Conditioning {
        step: usize,
        kind: &'static str,
        k: usize,
        s: f64,
        success_prob: f64,
        /// Closed-form value of the success probability.
        bound: f64,
        cost: CostReport,
    },
    Sharpening {
        step: usize,
        m: u32,
        success_prob: f64,
    },
}

impl LedgerEntry {
    pub fn success_prob(&self) -> f64 {
        match *self {
            LedgerEntry::Diffusion { success_prob, .. }
            | LedgerEntry::Conditioning { success_prob, .. }
            | LedgerEntry::Sharpening { success_prob, .. } => success_prob,
        }
    }

    /// This step's factor in the total lower bound; `None` when inapplicable.
    pub fn bound(&self) -> Option<f64> {
        match *self {
            LedgerEntry::Diffusion { bound, .. } => bound,
            LedgerEntry::Conditioning { bound, .. } => Some(bound),
            LedgerEntry::Sharpening { success_prob, .. } => Some(success_prob),
        }
    }
}

/// Unit amplitude vector over Lehmer ranks with its history.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    n: usize,
    amplitudes: Vec<f64>,
    encoding: Encoding,
    t: usize,
    ledger: Vec<LedgerEntry>,
}

impl ModelState {
    pub fn from_amplitudes(amplitudes: Vec<f64>, encoding: Encoding) -> Result<Self> {
        let n = degree_from_len(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|a| a * a).sum();
        if (norm_sq - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidPlan(format!("amplitudes have squared norm {norm_sq}, expected 1")));
        }
        Ok(Self {
            n,
            amplitudes,
            encoding,
            t: 0,
            ledger: Vec::new(),
        })
    }

    /// Encodes a probability function.
    pub fn from_distribution(h: &GroupFunction, encoding: Encoding) -> Result<Self> {
        Self::from_amplitudes(encoding.amplitudes(h.values()), encoding)
    }

    pub fn initial(plan: &ExperimentPlan) -> Result<Self> {
        let n = plan.n;
        let total = factorial(n);
        match &plan.initial {
            InitialState::Identity => {
                let mut a = vec![0.0; total];
                a[0] = 1.0;
                Self::from_amplitudes(a, plan.encoding)
            }
            InitialState::Empirical(data) => {
                let mut counts = vec![0.0; total];
                for p in data {
                    counts[p.rank()] += 1.0;
                }
                let size = data.len() as f64;
                let h: Vec<f64> = counts.iter().map(|c| c / size).collect();
                Self::from_amplitudes(plan.encoding.amplitudes(&h), plan.encoding)
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn ledger(&self) -> &[LedgerEntry] {
        &self.ledger
    }

    /// The classical posterior `h` recovered from the amplitudes.
    pub fn distribution(&self) -> Vec<f64> {
        self.encoding.distribution(&self.amplitudes)
    }

    /// Measurement probabilities `|ψ_σ|²`.
    pub fn measurement_probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a * a).collect()
    }

    pub fn spectrum(&self, normalization: Normalization) -> FourierSpectrum {
        let psi = GroupFunction::new(self.n, self.amplitudes.clone()).expect("length n!");
        gft_forward(&psi, normalization)
    }

    /// Product of all recorded success probabilities.
    pub fn total_success_probability(&self) -> f64 {
        self.ledger.iter().map(LedgerEntry::success_prob).product()
    }

    /// Product of per-step bounds; `None` if any step has no bound.
    pub fn total_lower_bound(&self) -> Option<f64> {
        self.ledger.iter().map(LedgerEntry::bound).product()
    }

    /// One `d`-step diffusion in Fourier space.
    pub fn apply_diffusion(&mut self, p: StayProbability, d: u32) -> Result<f64> {
        let kernel = DiffusionKernel::new(self.n, p, d)?;
        let (spectrum, success) = apply_diffusion_spectral(&self.spectrum(Normalization::Unitary), &kernel)?;
        self.amplitudes = gft_inverse(&spectrum).into_values();
        self.t += 1;
        let bound_detail = success_probability_lower_bound(self.n, p, d);
        self.ledger.push(LedgerEntry::Diffusion {
            step: self.t,
            p,
            d,
            success_prob: success,
            bound: bound_detail.value(),
            bound_detail,
        });
        Ok(success)
    }

    /// Bayesian conditioning through the reorder-update route.
    pub fn apply_conditioning(&mut self, observation: &Observation) -> Result<f64> {
        let h = GroupFunction::new(self.n, self.distribution())?;
        let predicted = match self.encoding {
            Encoding::Amplitude => success_probability_conditioning(&h, observation)?,
            Encoding::Born => {
                let pr: f64 = Permutation::all(self.n)
                    .zip(h.values())
                    .filter(|(s, _)| observation.is_consistent(s))
                    .map(|(_, v)| v)
                    .sum();
                observation.s() * pr + (1.0 - observation.s()) * (1.0 - pr)
            }
        };
        let (amplitudes, success, cost) = reorder_update_condition(&self.amplitudes, observation, self.encoding)?;
        self.amplitudes = amplitudes;
        self.t += 1;
        self.ledger.push(LedgerEntry::Conditioning {
            step: self.t,
            kind: match observation.kind() {
                ObservationKind::Assignment { .. } => "assignment",
                ObservationKind::Ranking { .. } => "ranking",
            },
            k: observation.k(),
            s: observation.s(),
            success_prob: success,
            bound: predicted,
            cost,
        });
        Ok(success)
    }

    /// Most probable basis labels (ties kept) and their probability under `h`.
    pub fn map_estimate(&self) -> (Vec<Permutation>, f64) {
        let h = self.distribution();
        let best = h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let modes = h
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == best)
            .map(|(r, _)| Permutation::from_rank(self.n, r).expect("rank in range"))
            .collect();
        (modes, best)
    }
}

/// Amplitude-amplification flavours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplificationMode {
    Grover,
    FixedPoint,
}

/// Order-of-magnitude cost. Conventions: Grover uses `⌈(π/4)/√p⌉`
/// iterations and `1/√p` expected repeats; fixed-point uses
/// `⌈ln(2/δ)/√p⌉` depth units and a single run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationCost {
    pub mode: AmplificationMode,
    pub iterations: u64,
    pub expected_repeats: f64,
}

pub fn amplification_cost(p_success: f64, mode: AmplificationMode, delta: f64) -> Result<AmplificationCost> {
    if !(p_success > 0.0 && p_success <= 1.0) {
        return Err(Error::ProbabilityDomain {
            value: p_success,
            domain: "(0, 1]",
        });
    }
    let root = p_success.sqrt();
    Ok(match mode {
        AmplificationMode::Grover => AmplificationCost {
            mode,
            iterations: (std::f64::consts::FRAC_PI_4 / root).ceil() as u64,
            expected_repeats: 1.0 / root,
        },
        AmplificationMode::FixedPoint => {
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::ProbabilityDomain {
                    value: delta,
                    domain: "(0, 1)",
                });
            }
            AmplificationCost {
                mode,
                iterations: ((2.0 / delta).ln() / root).ceil() as u64,
                expected_repeats: 1.0,
            }
        }
    })
}

/// Failure tolerance used for the fixed-point estimate in run reports.
pub const DEFAULT_FIXED_POINT_DELTA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplificationSummary {
    pub convention: &'static str,
    pub delta: f64,
    pub grover: AmplificationCost,
    pub fixed_point: AmplificationCost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub encoding: Encoding,
    pub seed: u64,
    pub steps: usize,
    /// `Π_s p_s` over the ledger.
    pub p_tot: f64,
    /// Product of per-step lower bounds, when every step has one.
    pub lower_bound: Option<f64>,
    pub amplification: AmplificationSummary,
    /// Most probable permutations under the posterior.
    pub map: Vec<Permutation>,
    pub map_probability: f64,
}

/// Runs every step in order and reports the post-selection accounting.
pub fn run_plan(plan: &ExperimentPlan) -> Result<(ModelState, RunReport)> {
    plan.validate()?;
    let mut state = ModelState::initial(plan)?;
    for step in &plan.steps {
        match step {
            PlanStep::Diffusion { p, d } => {
                state.apply_diffusion(*p, *d)?;
            }
            PlanStep::Conditioning { observation } => {
                state.apply_conditioning(observation)?;
            }
        }
    }
    if let Some(m) = plan.sharpening {
        state = sharpen_map(&state, m)?.0;
    }
    let p_tot = state.total_success_probability();
    let (map, map_probability) = state.map_estimate();
    let report = RunReport {
        n: plan.n,
        encoding: plan.encoding,
        seed: plan.seed,
        steps: state.ledger.len(),
        p_tot,
        lower_bound: state.total_lower_bound(),
        amplification: AmplificationSummary {
            convention: "order-of-magnitude estimates; constants are conventions, not normative",
            delta: DEFAULT_FIXED_POINT_DELTA,
            grover: amplification_cost(p_tot, AmplificationMode::Grover, DEFAULT_FIXED_POINT_DELTA)?,
            fixed_point: amplification_cost(p_tot, AmplificationMode::FixedPoint, DEFAULT_FIXED_POINT_DELTA)?,
        },
        map,
        map_probability,
    };
    Ok((state, report))
}

/// Inverse-CDF sampling from ChaCha20 seeded with `seed_from_u64`.
fn sample_indices(weights: &[f64], count: usize, seed: u64) -> Vec<usize> {
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        cdf.push(acc);
    }
    let last = weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect()
}

/// Computational-basis measurements: `Pr(σ) = |ψ_σ|²`.
pub fn sample_computational(state: &ModelState, count: usize, seed: u64) -> Vec<Permutation> {
    sample_indices(&state.measurement_probabilities(), count, seed)
        .into_iter()
        .map(|r| Permutation::from_rank(state.n, r).expect("rank in range"))
        .collect()
}

/// Weak Fourier sampling: `Pr(λ) = ‖ψ̂_λ‖²_F`. Returns draws and the exact law.
pub fn sample_fourier(state: &ModelState, count: usize, seed: u64) -> (Vec<Partition>, Vec<(Partition, f64)>) {
    let law = state.spectrum(Normalization::Unitary).energies();
    let weights: Vec<f64> = law.iter().map(|(_, w)| *w).collect();
    let draws = sample_indices(&weights, count, seed)
        .into_iter()
        .map(|i| law[i].0.clone())
        .collect();
    (draws, law)
}

/// Empirical counts keyed by rank, for tests and reports.
pub fn tally(draws: &[Permutation]) -> BTreeMap<usize, usize> {
    let mut out = BTreeMap::new();
    for d in draws {
        *out.entry(d.rank()).or_insert(0) += 1;
    }
    out
}

/// Entrywise `ψ ↦ ψ^m`, renormalized; success probability `‖ψ^m‖²`.
pub fn sharpen_map(state: &ModelState, m: u32) -> Result<(ModelState, f64)> {
    if m == 0 {
        return Err(Error::InvalidPlan("sharpening exponent must be >= 1".into()));
    }
    let powered: Vec<f64> = state.amplitudes.iter().map(|a| a.powi(m as i32)).collect();
    let norm_sq: f64 = powered.iter().map(|a| a * a).sum();
    if norm_sq <= f64::MIN_POSITIVE || !norm_sq.is_finite() {
        return Err(Error::Annihilated { stage: "sharpening" });
    }
    let inv = 1.0 / norm_sq.sqrt();
    let mut out = state.clone();
    out.amplitudes = powered.into_iter().map(|a| a * inv).collect();
    out.t += 1;
    out.ledger.push(LedgerEntry::Sharpening {
        step: out.t,
        m,
        success_prob: norm_sq,
    });
    Ok((out, norm_sq))
}

/// Householder reflection `U_A` with `U_A e_0 = ψ`, padded to a power of two.
pub fn state_preparation_unitary(psi: &[f64]) -> DMatrix<f64> {
    let dim = psi.len().next_power_of_two();
    let mut target = nalgebra::DVector::zeros(dim);
    for (i, &a) in psi.iter().enumerate() {
        target[i] = a;
    }
    let mut v = -target;
    v[0] += 1.0;
    let vv = v.norm_squared();
    let mut u = DMatrix::identity(dim, dim);
    if vv > 1e-300 {
        u -= (&v * v.transpose()) * (2.0 / vv);
    }
    u
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockEncodingReport {
    pub system_dim: usize,
    pub ancilla_dim: usize,
    /// `⟨0|_A W |0⟩_A` diagonal, rank order.
    pub diagonal: Vec<f64>,
    /// `max |⟨0|_A W |0⟩_A − diag(ψ)|` with `ψ = U_A e_0`.
    pub block_error: f64,
    /// `max |WᵀW − I|`.
    pub unitarity_error: f64,
}

/// Builds `W = (I ⊗ U_Aᵀ) V_copy` with `V_copy |σ⟩|a⟩ = |σ⟩|a ⊕ σ⟩` and
/// compares its `|0⟩_A` block against `diag(U_A e_0)`.
pub fn verify_posterior_block_encoding(u_a: &DMatrix<f64>, n: usize) -> Result<BlockEncodingReport> {
    if n > BLOCK_ENCODING_MAX_DEGREE {
        return Err(Error::SizeGuard {
            n,
            max: BLOCK_ENCODING_MAX_DEGREE,
        });
    }
    let sys = factorial(n);
    let anc = u_a.nrows();
    if u_a.ncols() != anc || !anc.is_power_of_two() || anc < sys {
        return Err(Error::DegreeMismatch {
            expected: sys.next_power_of_two(),
            found: anc,
        });
    }
    let dim = sys * anc;
    let mut w = DMatrix::zeros(dim, dim);
    // Column (σ, a) of V_copy is e_(σ, a⊕σ); then U_Aᵀ acts on the ancilla.
    for s in 0..sys {
        for a in 0..anc {
            let b = a ^ s;
            for c in 0..anc {
                w[(s * anc + c, s * anc + a)] = u_a[(b, c)];
            }
        }
    }
    let psi: Vec<f64> = (0..sys).map(|s| u_a[(s, 0)]).collect();
    let mut block_error = 0.0f64;
    let mut diagonal = Vec::with_capacity(sys);
    for s2 in 0..sys {
        for s in 0..sys {
            let entry = w[(s2 * anc, s * anc)];
            let expected = if s == s2 { psi[s] } else { 0.0 };
            block_error = block_error.max((entry - expected).abs());
            if s == s2 {
                diagonal.push(entry);
            }
        }
    }
    let gram = w.transpose() * &w;
    let unitarity_error = (gram - DMatrix::identity(dim, dim)).abs().max();
    Ok(BlockEncodingReport {
        system_dim: sys,
        ancilla_dim: anc,
        diagonal,
        block_error,
        unitarity_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(encoding: Encoding) -> ModelState {
        let mut h = vec![0.0; 6];
        h[0] = 0.8;
        h[1] = 0.2;
        ModelState::from_amplitudes(encoding.amplitudes(&h), encoding).unwrap()
    }

    #[test]
    fn empty_plan_keeps_identity() {
        let (state, report) = run_plan(&ExperimentPlan::new(3)).unwrap();
        assert_eq!(state.amplitudes()[0], 1.0);
        assert_eq!(report.p_tot, 1.0);
        assert_eq!(report.lower_bound, Some(1.0));
        assert_eq!(report.amplification.grover.iterations, 1);
    }

    #[test]
    fn plan_json_schema() {
        let text = r#"{"n":3,"encoding":"amplitude","seed":7,
            "steps":[{"type":"diffusion","p":"1/2","d":1},
                     {"type":"conditioning","observation":{"kind":"assignment","indices":[1],"values":[1],"s":1.0}}]}"#;
        let plan: ExperimentPlan = serde_json::from_str(text).unwrap();
        assert_eq!(plan.steps.len(), 2);
        let (state, report) = run_plan(&plan).unwrap();
        let h = state.distribution();
        let support: Vec<usize> = (0..6).filter(|&r| h[r] > 1e-12).collect();
        assert_eq!(support, vec![0, 1]);
        assert!(report.p_tot > 0.0 && report.p_tot <= 1.0);
        assert!(serde_json::from_str::<ExperimentPlan>(r#"{"n":3,"stepz":[]}"#).is_err());
    }

    #[test]
    fn empirical_initial_state() {
        let data = vec![
            Permutation::identity(3),
            Permutation::identity(3),
            Permutation::from_one_line(&[2, 1, 3]).unwrap(),
        ];
        let mut plan = ExperimentPlan::new(3);
        plan.initial = InitialState::Empirical(data);
        assert!(plan.validate().is_err());
        plan.encoding = Encoding::Born;
        let state = ModelState::initial(&plan).unwrap();
        let h = state.distribution();
        assert!((h[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((state.amplitudes()[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        plan.encoding = Encoding::Amplitude;
        plan.allow_amplitude_empirical = true;
        let h = ModelState::initial(&plan).unwrap().distribution();
        assert!((h[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn amplification_examples() {
        assert_eq!(amplification_cost(1.0, AmplificationMode::Grover, 0.1).unwrap().iterations, 1);
        assert_eq!(amplification_cost(0.25, AmplificationMode::Grover, 0.1).unwrap().iterations, 2);
        let a = amplification_cost(0.1, AmplificationMode::FixedPoint, 0.01).unwrap().iterations;
        let b = amplification_cost(0.5, AmplificationMode::FixedPoint, 0.01).unwrap().iterations;
        let c = amplification_cost(0.5, AmplificationMode::FixedPoint, 0.0001).unwrap().iterations;
        assert!(a >= b && c >= b);
        assert!(amplification_cost(0.0, AmplificationMode::Grover, 0.1).is_err());
    }

    #[test]
    fn sharpening_two_point() {
        let state = two_point(Encoding::Born);
        let (same, ps) = sharpen_map(&state, 1).unwrap();
        assert!((ps - 1.0).abs() < 1e-12);
        assert!(same.amplitudes().iter().zip(state.amplitudes()).all(|(a, b)| (a - b).abs() < 1e-15));
        let (sharp, _) = sharpen_map(&state, 2).unwrap();
        let mode = sharp.measurement_probabilities()[0];
        assert!((mode - 0.64 / 0.68).abs() < 1e-12);
    }

    #[test]
    fn delta_state_sampling() {
        let state = ModelState::initial(&ExperimentPlan::new(4)).unwrap();
        assert!(sample_computational(&state, 50, 1).iter().all(Permutation::is_identity));
        let (_, law) = sample_fourier(&state, 10, 1);
        for (l, w) in law {
            let d = l.dimension() as f64;
            assert!((w - d * d / 24.0).abs() < 1e-12);
        }
    }

    #[test]
    fn seeded_sampling_is_reproducible() {
        let state = two_point(Encoding::Amplitude);
        assert_eq!(sample_computational(&state, 100, 9), sample_computational(&state, 100, 9));
    }

    #[test]
    fn block_encoding_delta_and_guard() {
        let mut psi = vec![0.0; 6];
        psi[0] = 1.0;
        let r = verify_posterior_block_encoding(&state_preparation_unitary(&psi), 3).unwrap();
        assert_eq!(r.diagonal[0], 1.0);
        assert!(r.diagonal[1..].iter().all(|&x| x.abs() < 1e-15));
        assert!(r.block_error < 1e-12 && r.unitarity_error < 1e-12);
        assert!(matches!(
            verify_posterior_block_encoding(&DMatrix::identity(128, 128), 5),
            Err(Error::SizeGuard { .. })
        ));
    }
}
