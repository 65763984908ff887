//! Brute-force oracles shared by the integration tests. They work on raw
//! 1-based one-line vectors and avoid the library's fast paths.

#![allow(dead_code)]

use nalgebra::DMatrix;
use permfourier::irrep::yor_generator;
use permfourier::young::{enumerate_partitions, Partition};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All permutations of `1..=n` in lexicographic order.
pub fn all_one_line(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v + 1);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub fn lehmer_count(one_line: &[usize]) -> Vec<usize> {
    (0..one_line.len())
        .map(|i| one_line[i + 1..].iter().filter(|&&x| x < one_line[i]).count())
        .collect()
}

pub fn rank_of(one_line: &[usize]) -> usize {
    let n = one_line.len();
    lehmer_count(one_line)
        .iter()
        .enumerate()
        .map(|(i, &d)| d * factorial(n - 1 - i))
        .sum()
}

/// `(a∘b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x - 1]).collect()
}

pub fn inverse(a: &[usize]) -> Vec<usize> {
    let mut out = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        out[x - 1] = i + 1;
    }
    out
}

/// `ρ_λ(σ)` from dense generators along the rightmost-descent word.
pub fn dense_irrep(lambda: &Partition, one_line: &[usize]) -> DMatrix<f64> {
    let d = lambda.dimension();
    let mut s = one_line.to_vec();
    let mut word = Vec::new();
    while let Some(i) = (0..s.len().saturating_sub(1)).rev().find(|&i| s[i] > s[i + 1]) {
        s.swap(i, i + 1);
        word.push(i + 1);
    }
    // σ∘τ_{w1}∘…∘τ_{wm} = e, so σ = τ_{wm}∘…∘τ_{w1}.
    let mut m = DMatrix::identity(d, d);
    for &k in word.iter().rev() {
        m *= yor_generator(lambda, k).unwrap().matrix;
    }
    m
}

/// Naive transform: explicit loop over `(σ, λ, i, j)`.
pub fn naive_gft(values: &[f64], n: usize, unitary: bool) -> Vec<DMatrix<f64>> {
    let perms = all_one_line(n);
    enumerate_partitions(n)
        .iter()
        .map(|lambda| {
            let d = lambda.dimension();
            let mut acc = DMatrix::zeros(d, d);
            for p in &perms {
                let rho = dense_irrep(lambda, p);
                let w = values[rank_of(p)];
                for i in 0..d {
                    for j in 0..d {
                        acc[(i, j)] += w * rho[(i, j)];
                    }
                }
            }
            if unitary {
                acc *= (d as f64 / factorial(n) as f64).sqrt();
            }
            acc
        })
        .collect()
}

/// Direct convolution `(q⋆h)(σ) = Σ_τ q(στ⁻¹) h(τ)`.
pub fn convolve_direct(q: &[f64], h: &[f64], n: usize) -> Vec<f64> {
    let perms = all_one_line(n);
    perms
        .iter()
        .map(|s| {
            perms
                .iter()
                .map(|t| q[rank_of(&compose(s, &inverse(t)))] * h[rank_of(t)])
                .sum()
        })
        .collect()
}

/// Lazy random-transposition kernel.
pub fn kernel(n: usize, p: f64) -> Vec<f64> {
    let pairs = (n * (n - 1) / 2) as f64;
    all_one_line(n)
        .iter()
        .map(|s| {
            let moved = s.iter().enumerate().filter(|(i, &x)| x != i + 1).count();
            match moved {
                0 => p,
                2 => (1.0 - p) / pairs,
                _ => 0.0,
            }
        })
        .collect()
}

/// G-circulant transition matrix `Q_ij = q(g_i g_j⁻¹)`.
pub fn markov_matrix(q: &[f64], n: usize) -> DMatrix<f64> {
    let perms = all_one_line(n);
    let size = perms.len();
    DMatrix::from_fn(size, size, |i, j| q[rank_of(&compose(&perms[i], &inverse(&perms[j])))])
}

pub fn assignment_holds(indices: &[usize], values: &[usize], one_line: &[usize]) -> bool {
    indices.iter().zip(values).all(|(&i, &j)| one_line[i - 1] == j)
}

/// Items listed first sit at smaller positions.
pub fn ranking_holds(items: &[usize], one_line: &[usize]) -> bool {
    items.windows(2).all(|w| one_line[w[0] - 1] < one_line[w[1] - 1])
}

/// Standard tableaux counted by brute-force fillings.
pub fn syt_count(parts: &[usize]) -> usize {
    let n: usize = parts.iter().sum();
    let cells: Vec<(usize, usize)> = parts
        .iter()
        .enumerate()
        .flat_map(|(r, &len)| (0..len).map(move |c| (r, c)))
        .collect();
    all_one_line(n)
        .into_iter()
        .filter(|fill| {
            let at = |r: usize, c: usize| cells.iter().position(|&x| x == (r, c)).map(|i| fill[i]);
            cells.iter().enumerate().all(|(i, &(r, c))| {
                let v = fill[i];
                at(r, c + 1).is_none_or(|w| w > v) && at(r + 1, c).is_none_or(|w| w > v)
            })
        })
        .count()
}

pub fn random_unit(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..factorial(n)).map(|_| rng.random::<f64>()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

pub fn random_distribution(n: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..factorial(n)).map(|_| rng.random::<f64>()).collect();
    let total: f64 = v.iter().sum();
    v.into_iter().map(|x| x / total).collect()
}

pub fn shuffled(n: usize, rng: &mut ChaCha20Rng) -> Vec<usize> {
    let mut v: Vec<usize> = (1..=n).collect();
    for i in (1..n).rev() {
        v.swap(i, rng.random_range(0..=i));
    }
    v
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Pearson χ² p-value of observed counts against expected probabilities;
/// cells with zero probability must be empty.
pub fn chi_square_p_value(counts: &[usize], probs: &[f64]) -> f64 {
    let total: usize = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(c, 0, "draw from a zero-probability cell");
            continue;
        }
        let e = p * total as f64;
        stat += (c as f64 - e).powi(2) / e;
        cells += 1;
    }
    let dist = ChiSquared::new((cells - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}
