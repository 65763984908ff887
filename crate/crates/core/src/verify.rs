//! Property battery over every layer, used by `permfourier verify`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::conditioning::{bayes_update, reorder_update_condition, success_probability_conditioning, Encoding, Observation};
use crate::diffusion::{
    apply_diffusion_spectral, kernel_as_function, success_probability_lower_bound, success_probability_t0,
    DiffusionKernel, StayProbability,
};
use crate::error::Result;
use crate::gft::{convolve, gft_forward, gft_inverse, spectral_product, GroupFunction, Normalization};
use crate::perm::{factorial, Permutation};
use crate::pipeline::{sample_fourier, ExperimentPlan, ModelState};

const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: worst <= tol,
        detail: format!("max deviation {worst:.3e} (tolerance {tol:.0e})"),
    }
}

fn random_unit(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..factorial(n)).map(|_| rng.random::<f64>()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

fn random_observation(n: usize, rng: &mut ChaCha20Rng) -> Observation {
    let mut items: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        items.swap(i, rng.random_range(0..=i));
    }
    let s = if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.55..0.99) };
    if rng.random_bool(0.5) {
        let k = rng.random_range(1..=n.min(3));
        let mut values: Vec<usize> = (1..=n).collect();
        for i in (1..n).rev() {
            values.swap(i, rng.random_range(0..=i));
        }
        Observation::assignment(items[..k].to_vec(), values[..k].to_vec(), s).expect("valid")
    } else {
        let k = rng.random_range(2..=n.min(4));
        Observation::ranking(items[..k].to_vec(), s).expect("valid")
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn lehmer_checks(n_max: usize) -> Vec<CheckResult> {
    let mut bijection = true;
    let mut rule = true;
    for n in 1..=n_max.min(6) {
        for r in 0..factorial(n) {
            let p = Permutation::from_rank(n, r).expect("rank");
            let code = p.lehmer();
            bijection &= code.rank() == r && code.decode() == p;
            for k in 1..n {
                let fast = code.apply_adjacent_transposition(k).expect("k");
                let slow = p.compose(&Permutation::adjacent_transposition(n, k).expect("k")).expect("n").lehmer();
                rule &= fast == slow;
            }
        }
    }
    let flag = |b: bool| if b { 0.0 } else { 1.0 };
    vec![
        check("lehmer bijection", flag(bijection), 0.0),
        check("lehmer transposition rule", flag(rule), 0.0),
    ]
}

fn fourier_checks(n_max: usize, rng: &mut ChaCha20Rng) -> Vec<CheckResult> {
    let mut parseval = 0.0f64;
    let mut round_trip = 0.0f64;
    let mut conv = 0.0f64;
    for n in 1..=n_max {
        let h = GroupFunction::new(n, (0..factorial(n)).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("n!");
        let spec = gft_forward(&h, Normalization::Unitary);
        parseval = parseval.max((spec.total_energy() - h.norm_squared()).abs());
        round_trip = round_trip.max(max_diff(gft_inverse(&spec).values(), h.values()));
        if n <= 5 {
            let q = GroupFunction::new(n, (0..factorial(n)).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("n!");
            let direct = gft_forward(&convolve(&q, &h).expect("n"), Normalization::Unitary);
            let spectral = spectral_product(&gft_forward(&q, Normalization::Unitary), &spec).expect("n");
            conv = conv.max(max_diff(&direct.flatten(), &spectral.flatten()));
        }
    }
    vec![
        check("parseval", parseval, TOL),
        check("fourier round trip", round_trip, TOL),
        check("convolution theorem", conv, TOL),
    ]
}

fn diffusion_checks(n_max: usize, rng: &mut ChaCha20Rng) -> Vec<CheckResult> {
    let mut first_step = 0.0f64;
    let mut schur = 0.0f64;
    let mut dominance = 0.0f64;
    for n in 2..=n_max {
        let init = gft_forward(&GroupFunction::delta(&Permutation::identity(n)), Normalization::Unitary);
        for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
            let k = DiffusionKernel::new(n, StayProbability::from_f64(p).expect("p"), 1).expect("k");
            let (_, ps) = apply_diffusion_spectral(&init, &k).expect("nonzero");
            first_step = first_step.max((ps - success_probability_t0(n, p)).abs());
            for b in gft_forward(&kernel_as_function(&k), Normalization::Plain).blocks() {
                let d = b.matrix.nrows();
                let off = &b.matrix - DMatrix::from_diagonal(&b.matrix.diagonal());
                let c = b.partition.diffusion_eigenvalue(p);
                schur = schur.max(off.norm()).max((&b.matrix - DMatrix::identity(d, d) * c).abs().max());
            }
        }
        for _ in 0..10 {
            let psi = GroupFunction::new(n, random_unit(n, rng)).expect("n!");
            let sp = if rng.random_bool(0.5) {
                StayProbability::from_f64(rng.random_range(0.51..1.0)).expect("p")
            } else {
                let b = rng.random_range(3..8);
                StayProbability::from_ratio(rng.random_range(1..=b / 2), b).expect("p")
            };
            let d = rng.random_range(1..=3);
            let Some(bound) = success_probability_lower_bound(n, sp, d).value() else {
                continue;
            };
            let k = DiffusionKernel::new(n, sp, d).expect("k");
            if let Ok((_, ps)) = apply_diffusion_spectral(&gft_forward(&psi, Normalization::Unitary), &k) {
                dominance = dominance.max(bound - ps);
            }
        }
    }
    vec![
        check("first diffusion success probability", first_step, TOL),
        check("schur diagonality of kernel", schur, TOL),
        check("diffusion lower bound", dominance, 0.0),
    ]
}

fn conditioning_checks(n_max: usize, rng: &mut ChaCha20Rng) -> Vec<CheckResult> {
    let mut closed_form = 0.0f64;
    let mut routes = 0.0f64;
    let mut cost = 0.0f64;
    for n in 2..=n_max {
        for _ in 0..10 {
            let obs = random_observation(n, rng);
            let encoding = if rng.random_bool(0.5) { Encoding::Amplitude } else { Encoding::Born };
            let psi = random_unit(n, rng);
            let (Ok((a, pa)), Ok((b, pb, c))) =
                (bayes_update(&psi, &obs, encoding), reorder_update_condition(&psi, &obs, encoding))
            else {
                continue;
            };
            routes = routes.max(max_diff(&a, &b)).max((pa - pb).abs());
            if c.forward_transpositions > c.bound || c.backward_transpositions > c.bound {
                cost = 1.0;
            }
            if encoding == Encoding::Amplitude {
                let h = GroupFunction::new(n, Encoding::Amplitude.distribution(&psi)).expect("n!");
                if let Ok(closed) = success_probability_conditioning(&h, &obs) {
                    closed_form = closed_form.max((closed - pa).abs());
                }
            }
        }
    }
    vec![
        check("conditioning success identity", closed_form, TOL),
        check("reorder-update equivalence", routes, TOL),
        check("reorder transposition budget", cost, 0.0),
    ]
}

fn sampling_checks(n_max: usize, seed: u64) -> Vec<CheckResult> {
    let n = n_max.min(5);
    let state = ModelState::initial(&ExperimentPlan::new(n)).expect("identity");
    let draws = 20_000;
    let (samples, law) = sample_fourier(&state, draws, seed);
    let mut exact = 0.0f64;
    let mut empirical = 0.0f64;
    let total = factorial(n) as f64;
    for (l, w) in &law {
        let d = l.dimension() as f64;
        exact = exact.max((w - d * d / total).abs());
        let freq = samples.iter().filter(|s| *s == l).count() as f64 / draws as f64;
        let sigma = (w * (1.0 - w) / draws as f64).sqrt();
        empirical = empirical.max((freq - w).abs() / sigma.max(1e-12) / 5.0);
    }
    vec![
        check("plancherel law of delta state", exact, TOL),
        check("fourier sampling frequencies (5 sigma)", empirical, 1.0),
    ]
}

/// Runs every check for degrees up to `n_max`.
pub fn run_battery(n_max: usize, seed: u64) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut out = lehmer_checks(n_max);
    out.extend(fourier_checks(n_max, &mut rng));
    out.extend(diffusion_checks(n_max, &mut rng));
    out.extend(conditioning_checks(n_max, &mut rng));
    out.extend(sampling_checks(n_max, seed));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_passes_at_four() {
        let results = run_battery(4, 1).unwrap();
        assert!(results.len() >= 12);
        for r in &results {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
