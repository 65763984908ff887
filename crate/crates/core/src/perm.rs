//! Permutations of `{1..n}` in Cauchy (one-line) and Lehmer form.
//!
//! Composition follows `(a∘b)(i) = a(b(i))`: `b` acts first. Right
//! multiplication by the adjacent transposition `τ_k = (k k+1)` swaps the
//! entries at positions `k` and `k+1` of the one-line form, and has a local
//! update rule on Lehmer digits ([`LehmerCode::apply_adjacent_transposition`]).
//!
//! All public positions and values are 1-based. Lehmer ranks use the
//! big-endian factorial base, so rank order coincides with lexicographic
//! order of the one-line form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n!` as `usize`. Panics on overflow, which only happens for `n > 20`.
pub fn factorial(n: usize) -> usize {
    (1..=n).try_fold(1usize, |acc, k| acc.checked_mul(k)).expect("factorial overflow")
}

/// Inverse of [`factorial`]: returns `n` with `n! == len`.
pub fn degree_from_len(len: usize) -> Result<usize> {
    if len == 0 {
        return Err(Error::NotFactorial(len));
    }
    let (mut n, mut f) = (1usize, 1usize);
    while f < len {
        n += 1;
        f = f.checked_mul(n).ok_or(Error::NotFactorial(len))?;
    }
    if f == len {
        Ok(n)
    } else {
        Err(Error::NotFactorial(len))
    }
}

/// Number of qubits of a digit-wise Lehmer register: `Σ_{k=2}^{n} ⌈log₂ k⌉`.
pub fn lehmer_register_qubits(n: usize) -> usize {
    (2..=n).map(|k| (usize::BITS - (k - 1).leading_zeros()) as usize).sum()
}

/// A bijection on `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    // 0-based images; entry i holds σ(i+1) - 1.
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { images: (0..n).collect() }
    }

    /// Builds a permutation from its 1-based one-line form `c(σ)`.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        let n = one_line.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty one-line form".into()));
        }
        let mut seen = vec![false; n];
        let mut images = Vec::with_capacity(n);
        for &v in one_line {
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "entry {v} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!("entry {v} repeated")));
            }
            images.push(v - 1);
        }
        Ok(Self { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(is_bijection(&images));
        Self { images }
    }

    /// The permutation with the given Lehmer rank.
    pub fn from_rank(n: usize, rank: usize) -> Result<Self> {
        if rank >= factorial(n) {
            return Err(Error::IndexOutOfRange {
                index: rank,
                max: factorial(n) - 1,
            });
        }
        Ok(LehmerCode::from_rank(n, rank)?.decode())
    }

    /// The adjacent transposition `τ_k = (k k+1)`, `1 ≤ k ≤ n-1`.
    pub fn adjacent_transposition(n: usize, k: usize) -> Result<Self> {
        check_adjacent(n, k)?;
        let mut p = Self::identity(n);
        p.images.swap(k - 1, k);
        Ok(p)
    }

    /// The transposition `(i j)` for distinct 1-based `i`, `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        for idx in [i, j] {
            if idx == 0 || idx > n {
                return Err(Error::IndexOutOfRange { index: idx, max: n });
            }
        }
        if i == j {
            return Err(Error::InvalidPermutation("transposition of equal indices".into()));
        }
        let mut p = Self::identity(n);
        p.images.swap(i - 1, j - 1);
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// 1-based one-line form `c(σ)`.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v + 1).collect()
    }

    /// `σ(i)` for 1-based `i`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DegreeMismatch {
                expected: self.n(),
                found: other.n(),
            });
        }
        Ok(Self {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    /// In-place right multiplication by `τ_k` (swaps one-line entries `k`, `k+1`).
    pub(crate) fn swap_adjacent(&mut self, k: usize) {
        self.images.swap(k - 1, k);
    }

    pub fn lehmer(&self) -> LehmerCode {
        LehmerCode {
            digits: lehmer_digits(&self.images),
        }
    }

    pub fn rank(&self) -> usize {
        rank_of_images(&self.images)
    }

    /// Number of inversions, i.e. the Coxeter length.
    pub fn inversions(&self) -> usize {
        lehmer_digits(&self.images).iter().sum()
    }

    /// Cycle lengths sorted non-increasingly (fixed points included).
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// Adjacent-transposition word `[k_1, …, k_m]` with
    /// `σ = τ_{k_1} ∘ τ_{k_2} ∘ … ∘ τ_{k_m}`, obtained by bubble-sorting the
    /// one-line form. `m` equals the number of inversions.
    pub fn adjacent_factorization(&self) -> Vec<usize> {
        let mut work = self.images.clone();
        let mut sorting = Vec::new();
        let n = work.len();
        for end in (1..n).rev() {
            for pos in 0..end {
                if work[pos] > work[pos + 1] {
                    work.swap(pos, pos + 1);
                    sorting.push(pos + 1);
                }
            }
        }
        // σ τ_{a_1} … τ_{a_m} = e, hence σ = τ_{a_m} … τ_{a_1}.
        sorting.reverse();
        sorting
    }

    /// All permutations of degree `n` in rank order.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        let mut current = Some(Self::identity(n));
        std::iter::from_fn(move || {
            let out = current.take()?;
            let mut next = out.images.clone();
            if next_lexicographic(&mut next) {
                current = Some(Self { images: next });
            }
            Some(out)
        })
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(one_line: Vec<usize>) -> Result<Self> {
        Self::from_one_line(&one_line)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.one_line()
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.one_line().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

fn is_bijection(images: &[usize]) -> bool {
    let mut seen = vec![false; images.len()];
    images
        .iter()
        .all(|&v| v < images.len() && !std::mem::replace(&mut seen[v], true))
}

fn check_adjacent(n: usize, k: usize) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: n.saturating_sub(1),
        });
    }
    Ok(())
}

fn lehmer_digits(images: &[usize]) -> Vec<usize> {
    images
        .iter()
        .enumerate()
        .map(|(i, &v)| images[i + 1..].iter().filter(|&&w| w < v).count())
        .collect()
}

/// Lehmer rank of a 0-based image vector without allocating a code.
pub(crate) fn rank_of_images(images: &[usize]) -> usize {
    let n = images.len();
    let mut rank = 0;
    for i in 0..n {
        let digit = images[i + 1..].iter().filter(|&&w| w < images[i]).count();
        rank = rank * (n - i) + digit;
    }
    rank
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// Lehmer code `ℓ(σ)_i = #{j > i : c(σ)_j < c(σ)_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct LehmerCode {
    digits: Vec<usize>,
}

impl LehmerCode {
    /// Validates `ℓ_i ∈ {0..n-i}` (1-based `i`).
    pub fn new(digits: Vec<usize>) -> Result<Self> {
        let n = digits.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty lehmer code".into()));
        }
        for (i, &d) in digits.iter().enumerate() {
            let max = n - 1 - i;
            if d > max {
                return Err(Error::LehmerDigitOutOfRange {
                    position: i + 1,
                    digit: d,
                    max,
                });
            }
        }
        Ok(Self { digits })
    }

    pub fn from_rank(n: usize, rank: usize) -> Result<Self> {
        let total = factorial(n);
        if rank >= total {
            return Err(Error::IndexOutOfRange {
                index: rank,
                max: total - 1,
            });
        }
        let mut digits = vec![0; n];
        let mut r = rank;
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = r % base;
            r /= base;
        }
        Ok(Self { digits })
    }

    pub fn n(&self) -> usize {
        self.digits.len()
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }

    /// Factorial-base value `Σ ℓ_i (n-i)!`.
    pub fn rank(&self) -> usize {
        let n = self.n();
        self.digits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &d)| acc * (n - i) + d)
    }

    /// Selects the `ℓ_i`-th still-available item for each slot.
    pub fn decode(&self) -> Permutation {
        let mut available: Vec<usize> = (0..self.n()).collect();
        let images = self.digits.iter().map(|&d| available.remove(d)).collect();
        Permutation::from_images_unchecked(images)
    }

    /// `ℓ(σ τ_k)` from `ℓ(σ)`, touching only digits `k` and `k+1`.
    pub fn apply_adjacent_transposition(&self, k: usize) -> Result<Self> {
        check_adjacent(self.n(), k)?;
        let mut out = self.clone();
        out.swap_adjacent_in_place(k);
        Ok(out)
    }

    pub(crate) fn swap_adjacent_in_place(&mut self, k: usize) {
        let (a, b) = (self.digits[k - 1], self.digits[k]);
        let (new_a, new_b) = if a > b { (b, a - 1) } else { (b + 1, a) };
        self.digits[k - 1] = new_a;
        self.digits[k] = new_b;
    }
}

impl TryFrom<Vec<usize>> for LehmerCode {
    type Error = Error;

    fn try_from(digits: Vec<usize>) -> Result<Self> {
        Self::new(digits)
    }
}

impl From<LehmerCode> for Vec<usize> {
    fn from(l: LehmerCode) -> Self {
        l.digits
    }
}

pub fn lehmer_encode(p: &Permutation) -> LehmerCode {
    p.lehmer()
}

pub fn lehmer_decode(l: &LehmerCode) -> Permutation {
    l.decode()
}

pub fn lehmer_rank(l: &LehmerCode) -> usize {
    l.rank()
}

/// Where [`reorder_permutation_for_indices`] moves the selected positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReorderMode {
    ToFront,
    ToBack,
}

/// A reordering `π` with its adjacent-transposition word.
///
/// Right-multiplying by `τ_{k}` for each `k` in `transpositions`, in order,
/// turns `σ` into `σ∘π`. Replaying the word backwards undoes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reordering {
    pub permutation: Permutation,
    pub transpositions: Vec<usize>,
    /// Original position that ends up at each slot of the target block
    /// (`1..k` for `ToFront`, `n-k+1..n` for `ToBack`), in slot order.
    pub block: Vec<usize>,
}

/// Builds `π` so that `σ∘π` carries the entries of `σ` at `indices` in its
/// first (`ToFront`) or last (`ToBack`) `k` one-line slots.
///
/// `ToFront` applies the cycles `π_t = τ_{t-1}⋯τ_1` for the sorted indices in
/// ascending order; `ToBack` applies `π̃_t = τ_t⋯τ_{n-1}` in descending order.
/// Each cycle costs fewer than `n` transpositions.
pub fn reorder_permutation_for_indices(
    indices: &[usize],
    mode: ReorderMode,
    n: usize,
) -> Result<Reordering> {
    let mut sorted = indices.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidPermutation(format!("index {} repeated", w[0])));
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::IndexOutOfRange { index: bad, max: n });
    }

    let mut word = Vec::new();
    match mode {
        ReorderMode::ToFront => {
            for &t in &sorted {
                word.extend((1..t).rev());
            }
        }
        ReorderMode::ToBack => {
            for &t in sorted.iter().rev() {
                word.extend(t..n);
            }
        }
    }

    let mut permutation = Permutation::identity(n);
    for &k in &word {
        permutation.swap_adjacent(k);
    }
    let k = sorted.len();
    let slots = match mode {
        ReorderMode::ToFront => 1..=k,
        ReorderMode::ToBack => n - k + 1..=n,
    };
    let block = slots.map(|slot| permutation.image(slot)).collect();
    Ok(Reordering {
        permutation,
        transpositions: word,
        block,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_lehmer(one_line: &[usize]) -> Vec<usize> {
        (0..one_line.len())
            .map(|i| (i + 1..one_line.len()).filter(|&j| one_line[j] < one_line[i]).count())
            .collect()
    }

    #[test]
    fn worked_example_encode_decode() {
        let p = Permutation::from_one_line(&[3, 4, 2, 1]).unwrap();
        assert_eq!(p.lehmer().digits(), &[2, 2, 1, 0]);
        let l = LehmerCode::new(vec![2, 2, 1, 0]).unwrap();
        assert_eq!(l.decode().one_line(), vec![3, 4, 2, 1]);
        assert_eq!(l.rank(), 17);
    }

    #[test]
    fn identity_and_reversal_codes() {
        for n in 1..=7 {
            assert!(Permutation::identity(n).lehmer().digits().iter().all(|&d| d == 0));
            assert_eq!(Permutation::identity(n).rank(), 0);
            let rev: Vec<usize> = (1..=n).rev().collect();
            let p = Permutation::from_one_line(&rev).unwrap();
            assert_eq!(p.lehmer().digits(), brute_lehmer(&rev).as_slice());
            assert_eq!(p.lehmer().digits(), (0..n).rev().collect::<Vec<_>>().as_slice());
            assert_eq!(p.rank(), factorial(n) - 1);
        }
    }

    #[test]
    fn decode_rejects_out_of_range_digit() {
        assert!(matches!(
            LehmerCode::new(vec![0, 2, 0]),
            Err(Error::LehmerDigitOutOfRange { position: 2, digit: 2, max: 1 })
        ));
        assert!(LehmerCode::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn all_codes_of_degree_three_decode_distinctly() {
        let perms: std::collections::HashSet<_> = (0..6)
            .map(|r| LehmerCode::from_rank(3, r).unwrap().decode())
            .collect();
        assert_eq!(perms.len(), 6);
    }

    #[test]
    fn rank_injective_degree_five() {
        let ranks: Vec<usize> = Permutation::all(5).map(|p| p.rank()).collect();
        assert_eq!(ranks, (0..120).collect::<Vec<_>>());
    }

    #[test]
    fn compose_convention() {
        let a = Permutation::from_one_line(&[2, 1, 3]).unwrap();
        let b = Permutation::from_one_line(&[1, 3, 2]).unwrap();
        assert_eq!(a.compose(&b).unwrap().one_line(), vec![2, 3, 1]);
        let e = Permutation::identity(3);
        assert_eq!(e.compose(&a).unwrap(), a);
        assert!(a.compose(&a.inverse()).unwrap().is_identity());
        assert!(matches!(
            a.compose(&Permutation::identity(4)),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn adjacent_rule_matches_decode_compose_encode() {
        for n in 2..=6 {
            for p in Permutation::all(n) {
                for k in 1..n {
                    let tau = Permutation::adjacent_transposition(n, k).unwrap();
                    let oracle = p.compose(&tau).unwrap().lehmer();
                    let fast = p.lehmer().apply_adjacent_transposition(k).unwrap();
                    assert_eq!(fast, oracle, "n={n} sigma={p} k={k}");
                    assert_eq!(fast.apply_adjacent_transposition(k).unwrap(), p.lehmer());
                }
            }
        }
    }

    #[test]
    fn identity_code_first_transposition() {
        let l = Permutation::identity(5).lehmer().apply_adjacent_transposition(1).unwrap();
        assert_eq!(l.digits(), &[1, 0, 0, 0, 0]);
        assert!(Permutation::identity(5).lehmer().apply_adjacent_transposition(5).is_err());
        assert!(Permutation::identity(5).lehmer().apply_adjacent_transposition(0).is_err());
    }

    #[test]
    fn factorization_reproduces_permutation() {
        for p in Permutation::all(5) {
            let word = p.adjacent_factorization();
            assert_eq!(word.len(), p.inversions());
            let mut acc = Permutation::identity(5);
            for &k in &word {
                acc = acc.compose(&Permutation::adjacent_transposition(5, k).unwrap()).unwrap();
            }
            assert_eq!(acc, p);
        }
    }

    #[test]
    fn reorder_front_block_and_costs() {
        let r = reorder_permutation_for_indices(&[1, 2], ReorderMode::ToFront, 5).unwrap();
        assert_eq!(r.transpositions, vec![1]);
        assert_eq!(r.block, vec![2, 1]);
        let r = reorder_permutation_for_indices(&[1], ReorderMode::ToFront, 5).unwrap();
        assert!(r.transpositions.is_empty());
        assert!(r.permutation.is_identity());

        let r = reorder_permutation_for_indices(&[4], ReorderMode::ToFront, 5).unwrap();
        assert_eq!(r.transpositions, vec![3, 2, 1]);
        assert_eq!(r.block, vec![4]);

        let r = reorder_permutation_for_indices(&[5, 2], ReorderMode::ToFront, 6).unwrap();
        assert_eq!(r.block.iter().copied().collect::<std::collections::BTreeSet<_>>(), [2, 5].into());
        assert!(r.transpositions.len() <= 2 * 6);

        let r = reorder_permutation_for_indices(&[1, 3], ReorderMode::ToBack, 5).unwrap();
        assert_eq!(r.block.iter().copied().collect::<std::collections::BTreeSet<_>>(), [1, 3].into());
        assert!(r.transpositions.len() <= 2 * 5);
    }

    #[test]
    fn reorder_round_trip_every_sigma() {
        let n = 5;
        for mode in [ReorderMode::ToFront, ReorderMode::ToBack] {
            let r = reorder_permutation_for_indices(&[2, 4, 5], mode, n).unwrap();
            for sigma in Permutation::all(n) {
                let mut l = sigma.lehmer();
                for &k in &r.transpositions {
                    l.swap_adjacent_in_place(k);
                }
                assert_eq!(l, sigma.compose(&r.permutation).unwrap().lehmer());
                for &k in r.transpositions.iter().rev() {
                    l.swap_adjacent_in_place(k);
                }
                assert_eq!(l, sigma.lehmer());
            }
        }
    }

    #[test]
    fn reorder_rejects_bad_indices() {
        assert!(reorder_permutation_for_indices(&[2, 2], ReorderMode::ToFront, 4).is_err());
        assert!(reorder_permutation_for_indices(&[0], ReorderMode::ToFront, 4).is_err());
        assert!(reorder_permutation_for_indices(&[5], ReorderMode::ToBack, 4).is_err());
    }

    #[test]
    fn register_size() {
        assert_eq!(lehmer_register_qubits(1), 0);
        assert_eq!(lehmer_register_qubits(2), 1);
        // 1 + 2 + 2 = 5
        assert_eq!(lehmer_register_qubits(4), 5);
        assert_eq!(lehmer_register_qubits(8), 1 + 2 + 2 + 3 + 3 + 3 + 3);
    }

    #[test]
    fn degree_from_len_accepts_factorials_only() {
        for n in 1..=9 {
            assert_eq!(degree_from_len(factorial(n)).unwrap(), n);
        }
        assert!(degree_from_len(7).is_err());
        assert!(degree_from_len(0).is_err());
    }

    #[test]
    fn serde_one_based_arrays() {
        let p: Permutation = serde_json::from_str("[3,4,2,1]").unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), "[3,4,2,1]");
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
        let l: LehmerCode = serde_json::from_str("[2,2,1,0]").unwrap();
        assert_eq!(l.decode(), p);
    }
}
