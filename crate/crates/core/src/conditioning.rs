//! Bayesian conditioning on partial assignments and partial rankings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gft::GroupFunction;
use crate::perm::{degree_from_len, reorder_permutation_for_indices, LehmerCode, Permutation, ReorderMode};

/// How a probability function `h` is stored in a unit amplitude vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// `ψ ∝ h`; measurement samples `∝ h²`.
    #[default]
    Amplitude,
    /// `ψ = √h`; measurement samples `∝ h`.
    Born,
}

impl Encoding {
    /// Recovers the probability function from non-negative amplitudes.
    pub fn distribution(&self, amplitudes: &[f64]) -> Vec<f64> {
        match self {
            Encoding::Amplitude => {
                let total: f64 = amplitudes.iter().sum();
                amplitudes.iter().map(|a| a / total).collect()
            }
            Encoding::Born => amplitudes.iter().map(|a| a * a).collect(),
        }
    }

    /// Amplitudes representing the probability function `h`.
    pub fn amplitudes(&self, h: &[f64]) -> Vec<f64> {
        match self {
            Encoding::Amplitude => {
                let norm = h.iter().map(|v| v * v).sum::<f64>().sqrt();
                h.iter().map(|v| v / norm).collect()
            }
            Encoding::Born => h.iter().map(|v| v.sqrt()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObservationKind {
    /// `c(σ)_{i_l} = j_l` for every `l`.
    Assignment { indices: Vec<usize>, values: Vec<usize> },
    /// Items listed first appear first: `c(σ)_{items[0]} < c(σ)_{items[1]} < …`.
    Ranking { items: Vec<usize> },
}

/// An observation with likelihood trust `s ∈ (0.5, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObservation", into = "RawObservation")]
pub struct Observation {
    kind: ObservationKind,
    s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawObservation {
    Assignment {
        indices: Vec<usize>,
        values: Vec<usize>,
        #[serde(default = "hard")]
        s: f64,
    },
    Ranking {
        items: Vec<usize>,
        #[serde(default = "hard")]
        s: f64,
    },
}

fn hard() -> f64 {
    1.0
}

impl TryFrom<RawObservation> for Observation {
    type Error = Error;

    fn try_from(raw: RawObservation) -> Result<Self> {
        match raw {
            RawObservation::Assignment { indices, values, s } => Observation::assignment(indices, values, s),
            RawObservation::Ranking { items, s } => Observation::ranking(items, s),
        }
    }
}

impl From<Observation> for RawObservation {
    fn from(o: Observation) -> Self {
        match o.kind {
            ObservationKind::Assignment { indices, values } => RawObservation::Assignment { indices, values, s: o.s },
            ObservationKind::Ranking { items } => RawObservation::Ranking { items, s: o.s },
        }
    }
}

fn check_distinct(field: &'static str, xs: &[usize]) -> Result<()> {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable();
    if let Some(&zero) = sorted.first().filter(|&&x| x == 0) {
        return Err(Error::InvalidObservation {
            field,
            reason: format!("entry {zero} is not 1-based"),
        });
    }
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InvalidObservation {
            field,
            reason: format!("entry {} repeated", w[0]),
        });
    }
    Ok(())
}

fn check_trust(s: f64) -> Result<()> {
    if s > 0.5 && s <= 1.0 {
        Ok(())
    } else {
        Err(Error::LikelihoodDomain(s))
    }
}

impl Observation {
    pub fn assignment(indices: Vec<usize>, values: Vec<usize>, s: f64) -> Result<Self> {
        check_trust(s)?;
        if indices.len() != values.len() {
            return Err(Error::InvalidObservation {
                field: "values",
                reason: format!("{} values for {} indices", values.len(), indices.len()),
            });
        }
        check_distinct("indices", &indices)?;
        check_distinct("values", &values)?;
        Ok(Self {
            kind: ObservationKind::Assignment { indices, values },
            s,
        })
    }

    pub fn ranking(items: Vec<usize>, s: f64) -> Result<Self> {
        check_trust(s)?;
        check_distinct("items", &items)?;
        Ok(Self {
            kind: ObservationKind::Ranking { items },
            s,
        })
    }

    pub fn kind(&self) -> &ObservationKind {
        &self.kind
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Number of constraints: assigned items, or comparisons in a ranking.
    pub fn k(&self) -> usize {
        match &self.kind {
            ObservationKind::Assignment { indices, .. } => indices.len(),
            ObservationKind::Ranking { items } => items.len().saturating_sub(1),
        }
    }

    /// Positions the reorder-update moves into the tested Lehmer digits.
    pub fn reordered_indices(&self) -> &[usize] {
        match &self.kind {
            ObservationKind::Assignment { indices, .. } => indices,
            ObservationKind::Ranking { items } => items,
        }
    }

    /// Checks every index and value against the degree.
    pub fn validate(&self, n: usize) -> Result<()> {
        let (field, xs): (&'static str, Vec<usize>) = match &self.kind {
            ObservationKind::Assignment { indices, values } => {
                if let Some(&v) = values.iter().find(|&&v| v > n) {
                    return Err(Error::InvalidObservation {
                        field: "values",
                        reason: format!("position {v} exceeds n = {n}"),
                    });
                }
                ("indices", indices.clone())
            }
            ObservationKind::Ranking { items } => ("items", items.clone()),
        };
        if let Some(&i) = xs.iter().find(|&&i| i > n) {
            return Err(Error::InvalidObservation {
                field,
                reason: format!("item {i} exceeds n = {n}"),
            });
        }
        Ok(())
    }

    /// `φ(σ)`, assuming a validated observation of matching degree.
    pub fn is_consistent(&self, sigma: &Permutation) -> bool {
        match &self.kind {
            ObservationKind::Assignment { indices, values } => {
                indices.iter().zip(values).all(|(&i, &j)| sigma.image(i) == j)
            }
            ObservationKind::Ranking { items } => items.windows(2).all(|w| sigma.image(w[0]) < sigma.image(w[1])),
        }
    }

    /// `h(φ|σ)`: `s` when consistent, `1−s` otherwise.
    pub fn likelihood(&self, consistent: bool) -> f64 {
        if consistent {
            self.s
        } else {
            1.0 - self.s
        }
    }
}

pub fn consistency_predicate(obs: &Observation, sigma: &Permutation) -> Result<bool> {
    obs.validate(sigma.n())?;
    Ok(obs.is_consistent(sigma))
}

fn amplitude_factor(obs: &Observation, consistent: bool, encoding: Encoding) -> f64 {
    let l = obs.likelihood(consistent);
    match encoding {
        Encoding::Amplitude => l,
        Encoding::Born => l.sqrt(),
    }
}

fn renormalize(mut v: Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    if norm_sq <= f64::MIN_POSITIVE {
        return Err(Error::Annihilated { stage: "conditioning" });
    }
    let inv = 1.0 / norm_sq.sqrt();
    v.iter_mut().for_each(|x| *x *= inv);
    Ok((v, norm_sq))
}

/// Pointwise Bayes update of a unit amplitude vector. Returns the
/// renormalized vector and `‖c_φ ψ‖²`.
pub fn bayes_update(amplitudes: &[f64], obs: &Observation, encoding: Encoding) -> Result<(Vec<f64>, f64)> {
    let n = degree_from_len(amplitudes.len())?;
    obs.validate(n)?;
    let updated = Permutation::all(n)
        .zip(amplitudes)
        .map(|(sigma, &a)| a * amplitude_factor(obs, obs.is_consistent(&sigma), encoding))
        .collect();
    renormalize(updated)
}

/// Closed-form conditioning success probability for an amplitude-encoded
/// distribution `h`: `h(φ)² N⁽ᵗ⁺¹⁾ / N⁽ᵗ⁾` with `N = Σ h²` and
/// `h(φ) = s·Pr(φ=1) + (1−s)(1−Pr(φ=1))`.
pub fn success_probability_conditioning(h: &GroupFunction, obs: &Observation) -> Result<f64> {
    let n = h.n();
    obs.validate(n)?;
    let likelihood: Vec<f64> = Permutation::all(n).map(|sigma| obs.likelihood(obs.is_consistent(&sigma))).collect();
    let pr: f64 = Permutation::all(n)
        .zip(h.values())
        .filter(|(sigma, _)| obs.is_consistent(sigma))
        .map(|(_, v)| v)
        .sum();
    let h_phi = obs.s * pr + (1.0 - obs.s) * (1.0 - pr);
    if h_phi <= f64::MIN_POSITIVE {
        return Err(Error::Annihilated { stage: "conditioning" });
    }
    let n_t: f64 = h.values().iter().map(|v| v * v).sum();
    let n_next: f64 = h
        .values()
        .iter()
        .zip(&likelihood)
        .map(|(v, l)| (v * l / h_phi).powi(2))
        .sum();
    Ok(h_phi * h_phi * n_next / n_t)
}

/// Operation counts of one reorder-update.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CostReport {
    /// Adjacent-transposition updates applied to each basis label on the way in.
    pub forward_transpositions: usize,
    /// Updates applied on the way back.
    pub backward_transpositions: usize,
    /// Lehmer digits compared per basis label.
    pub digits_compared: usize,
    /// `|indices|·n`, the per-direction budget.
    pub bound: usize,
    /// Basis labels processed.
    pub labels: usize,
}

/// Consistent Lehmer digits for the reordered permutation `σ∘π`, placed at
/// `first_slot..first_slot + digits.len()` (0-based).
struct ConsistentDigits {
    first_slot: usize,
    digits: Vec<usize>,
}

fn consistent_digits(obs: &Observation, n: usize, block: &[usize]) -> ConsistentDigits {
    match &obs.kind {
        ObservationKind::Assignment { indices, values } => {
            // Slot m must hold value j for the index carried there; the
            // digit is j minus one minus the smaller values already placed.
            let required: Vec<usize> = block
                .iter()
                .map(|pos| values[indices.iter().position(|i| i == pos).expect("block from indices")])
                .collect();
            let digits = (0..required.len())
                .map(|m| required[m] - 1 - required[..m].iter().filter(|&&v| v < required[m]).count())
                .collect();
            ConsistentDigits { first_slot: 0, digits }
        }
        ObservationKind::Ranking { items } => {
            // The back block must be ordered by rank in the item list; each
            // digit counts later slots carrying an earlier-ranked item.
            let rank: Vec<usize> = block
                .iter()
                .map(|pos| items.iter().position(|i| i == pos).expect("block from items"))
                .collect();
            let k = rank.len();
            let digits = (0..k.saturating_sub(1))
                .map(|m| rank[m + 1..].iter().filter(|&&r| r < rank[m]).count())
                .collect();
            ConsistentDigits {
                first_slot: n - k,
                digits,
            }
        }
    }
}

fn replay(n: usize, rank: usize, word: impl Iterator<Item = usize>) -> (LehmerCode, usize) {
    let mut code = LehmerCode::from_rank(n, rank).expect("rank in range");
    for k in word {
        code.swap_adjacent_in_place(k);
    }
    let r = code.rank();
    (code, r)
}

/// Conditioning through relabeling: move the observed positions to the
/// leading (assignments) or trailing (rankings) one-line slots, test only
/// those Lehmer digits, and move back.
pub fn reorder_update_condition(
    amplitudes: &[f64],
    obs: &Observation,
    encoding: Encoding,
) -> Result<(Vec<f64>, f64, CostReport)> {
    let n = degree_from_len(amplitudes.len())?;
    obs.validate(n)?;
    let mode = match obs.kind {
        ObservationKind::Assignment { .. } => ReorderMode::ToFront,
        ObservationKind::Ranking { .. } => ReorderMode::ToBack,
    };
    let indices = obs.reordered_indices();
    let reordering = reorder_permutation_for_indices(indices, mode, n)?;
    let word = &reordering.transpositions;
    let target = consistent_digits(obs, n, &reordering.block);
    let total = amplitudes.len();

    let mut moved = vec![0.0; total];
    for (r, &a) in amplitudes.iter().enumerate() {
        let (_, r2) = replay(n, r, word.iter().copied());
        moved[r2] = a;
    }

    for (r, a) in moved.iter_mut().enumerate() {
        let code = LehmerCode::from_rank(n, r).expect("rank in range");
        let digits = &code.digits()[target.first_slot..target.first_slot + target.digits.len()];
        *a *= amplitude_factor(obs, digits == target.digits.as_slice(), encoding);
    }

    let mut restored = vec![0.0; total];
    for (r, &a) in moved.iter().enumerate() {
        let (_, r0) = replay(n, r, word.iter().rev().copied());
        restored[r0] = a;
    }

    let (out, prob) = renormalize(restored)?;
    let cost = CostReport {
        forward_transpositions: word.len(),
        backward_transpositions: word.len(),
        digits_compared: target.digits.len(),
        bound: indices.len() * n,
        labels: total,
    };
    Ok((out, prob, cost))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::factorial;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn uniform_amplitudes(n: usize) -> Vec<f64> {
        vec![1.0 / (factorial(n) as f64).sqrt(); factorial(n)]
    }

    #[test]
    fn predicate_examples() {
        let a = Observation::assignment(vec![1], vec![1], 1.0).unwrap();
        assert!(consistency_predicate(&a, &Permutation::from_one_line(&[1, 3, 2]).unwrap()).unwrap());
        let r = Observation::ranking(vec![1, 3], 1.0).unwrap();
        assert!(!consistency_predicate(&r, &Permutation::from_one_line(&[3, 2, 1]).unwrap()).unwrap());
        assert!(consistency_predicate(&a, &Permutation::identity(2)).is_ok());
        let far = Observation::assignment(vec![4], vec![1], 1.0).unwrap();
        assert!(consistency_predicate(&far, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn assignment_support_size() {
        let n = 5;
        let obs = Observation::assignment(vec![2, 5], vec![4, 1], 1.0).unwrap();
        let count = Permutation::all(n).filter(|s| obs.is_consistent(s)).count();
        assert_eq!(count, factorial(n - 2));
    }

    #[test]
    fn uniform_hard_assignment_at_three() {
        let obs = Observation::assignment(vec![1], vec![1], 1.0).unwrap();
        let (post, ps) = bayes_update(&uniform_amplitudes(3), &obs, Encoding::Amplitude).unwrap();
        assert!((ps - 1.0 / 3.0).abs() < 1e-12);
        let h = Encoding::Amplitude.distribution(&post);
        let support: Vec<f64> = h.iter().copied().filter(|&v| v > 0.0).collect();
        assert_eq!(support.len(), 2);
        assert!(support.iter().all(|v| (v - 0.5).abs() < 1e-12));
        let closed = success_probability_conditioning(&GroupFunction::uniform(3), &obs).unwrap();
        assert!((closed - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn trust_domain_and_shape_checks() {
        assert_eq!(Observation::ranking(vec![1, 2], 0.5).unwrap_err(), Error::LikelihoodDomain(0.5));
        assert!(Observation::ranking(vec![1, 2], 1.2).is_err());
        assert!(Observation::assignment(vec![1, 2], vec![1], 1.0).is_err());
        assert!(Observation::assignment(vec![1, 1], vec![1, 2], 1.0).is_err());
        assert!(Observation::ranking(vec![0, 2], 1.0).is_err());
        let err = serde_json::from_str::<Observation>(r#"{"kind":"ranking","items":[1,2],"s":0.3}"#).unwrap_err();
        assert!(err.to_string().contains("0.3"));
    }

    #[test]
    fn json_forms() {
        let o: Observation = serde_json::from_str(r#"{"kind":"assignment","indices":[1,4],"values":[2,3],"s":1.0}"#).unwrap();
        assert_eq!(o.k(), 2);
        let r: Observation = serde_json::from_str(r#"{"kind":"ranking","items":[2,5,1],"s":0.9}"#).unwrap();
        assert_eq!(r.k(), 2);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, r#"{"kind":"ranking","items":[2,5,1],"s":0.9}"#);
        assert!(serde_json::from_str::<Observation>(r#"{"kind":"ranking","items":[1],"t":1}"#).is_err());
    }

    #[test]
    fn empty_observation_is_neutral() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let raw: Vec<f64> = (0..24).map(|_| rng.random::<f64>()).collect();
        let psi = Encoding::Amplitude.amplitudes(&raw);
        let obs = Observation::assignment(vec![], vec![], 1.0).unwrap();
        let (post, ps, cost) = reorder_update_condition(&psi, &obs, Encoding::Amplitude).unwrap();
        assert!((ps - 1.0).abs() < 1e-12);
        assert!(post.iter().zip(&psi).all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(cost.forward_transpositions, 0);
    }

    #[test]
    fn three_item_ranking_scenario() {
        let obs = Observation::ranking(vec![1, 3], 1.0).unwrap();
        let psi = uniform_amplitudes(3);
        let (direct, p1) = bayes_update(&psi, &obs, Encoding::Amplitude).unwrap();
        let (reorder, p2, _) = reorder_update_condition(&psi, &obs, Encoding::Amplitude).unwrap();
        assert!((p1 - p2).abs() < 1e-12);
        assert!(direct.iter().zip(&reorder).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn both_routes_agree_exhaustively_at_four() {
        let n = 4;
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let raw: Vec<f64> = (0..24).map(|_| rng.random::<f64>()).collect();
        for encoding in [Encoding::Amplitude, Encoding::Born] {
            let psi = encoding.amplitudes(&{
                let s: f64 = raw.iter().sum();
                raw.iter().map(|v| v / s).collect::<Vec<_>>()
            });
            for i in 1..=n {
                for j in 1..=n {
                    for k in i + 1..=n {
                        let obs = Observation::ranking(vec![k, j, i], 0.8).unwrap_or_else(|_| {
                            Observation::ranking(vec![k, i], 0.8).unwrap()
                        });
                        let a = Observation::assignment(vec![k, i], vec![j, (j % n) + 1], 1.0).unwrap();
                        for o in [obs, a] {
                            let (d, p1) = bayes_update(&psi, &o, encoding).unwrap();
                            let (r, p2, c) = reorder_update_condition(&psi, &o, encoding).unwrap();
                            assert!((p1 - p2).abs() < 1e-12, "{o:?}");
                            assert!(d.iter().zip(&r).all(|(x, y)| (x - y).abs() < 1e-12), "{o:?}");
                            assert!(c.forward_transpositions <= c.bound);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hard_likelihood_inconsistent_support_annihilates() {
        let mut psi = vec![0.0; 6];
        psi[0] = 1.0;
        let obs = Observation::assignment(vec![1], vec![2], 1.0).unwrap();
        assert_eq!(
            bayes_update(&psi, &obs, Encoding::Amplitude).unwrap_err(),
            Error::Annihilated { stage: "conditioning" }
        );
    }
}
