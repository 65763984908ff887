//! Young's orthogonal form: real orthogonal matrices `ρ_λ(σ)` indexed by
//! standard Young tableaux in last-letter order.
//!
//! For a tableau `T` and `τ_k = (k k+1)` let `r = content(k+1) − content(k)`
//! (content = column − row). Then `ρ(τ_k) e_T = (1/r) e_T + √(1 − 1/r²) e_{τ_k T}`,
//! where the second term vanishes when `k`, `k+1` share a row or column.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::perm::{factorial, rank_of_images, Permutation};
use crate::young::{enumerate_partitions, Partition};

/// Degrees up to which full per-irrep tables are memoized.
const TABLE_CACHE_MAX_DEGREE: usize = 6;

/// A standard Young tableau, stored as the box of each letter.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StandardTableau {
    // cells[letter - 1] = (row, col)
    cells: Vec<(usize, usize)>,
}

impl StandardTableau {
    pub fn cell(&self, letter: usize) -> (usize, usize) {
        self.cells[letter - 1]
    }

    fn content(&self, letter: usize) -> i64 {
        let (r, c) = self.cell(letter);
        c as i64 - r as i64
    }

    /// Rows of the tableau as letter lists.
    pub fn rows(&self) -> Vec<Vec<usize>> {
        let nrows = self.cells.iter().map(|c| c.0).max().map_or(0, |r| r + 1);
        let mut rows = vec![Vec::new(); nrows];
        let mut order: Vec<usize> = (1..=self.cells.len()).collect();
        order.sort_by_key(|&l| self.cells[l - 1]);
        for l in order {
            rows[self.cells[l - 1].0].push(l);
        }
        rows
    }

    fn swapped(&self, k: usize) -> Self {
        let mut cells = self.cells.clone();
        cells.swap(k - 1, k);
        Self { cells }
    }
}

/// Standard tableaux of shape `λ` in last-letter order: the tableau whose
/// largest letter sits in a lower row comes first, recursively.
pub fn standard_tableaux(lambda: &Partition) -> Vec<StandardTableau> {
    fn rec(shape: &[usize]) -> Vec<Vec<(usize, usize)>> {
        let n: usize = shape.iter().sum();
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for row in (0..shape.len()).rev() {
            let removable = row + 1 == shape.len() || shape[row + 1] < shape[row];
            if !removable {
                continue;
            }
            let mut smaller = shape.to_vec();
            smaller[row] -= 1;
            while smaller.last() == Some(&0) {
                smaller.pop();
            }
            for mut cells in rec(&smaller) {
                cells.push((row, shape[row] - 1));
                out.push(cells);
            }
        }
        out
    }
    rec(lambda.parts())
        .into_iter()
        .map(|cells| StandardTableau { cells })
        .collect()
}

/// An orthogonal irrep matrix together with its label.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepMatrix {
    pub partition: Partition,
    pub matrix: DMatrix<f64>,
}

impl IrrepMatrix {
    /// Row-major CSV dump, one matrix row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.matrix.nrows() {
            let row: Vec<String> = (0..self.matrix.ncols())
                .map(|j| format!("{:.17e}", self.matrix[(i, j)]))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Sparse form of `ρ_λ(τ_k)`: every column has a diagonal entry and at most
/// one off-diagonal partner.
#[derive(Debug, Clone)]
struct Generator {
    diag: Vec<f64>,
    partner: Vec<Option<(usize, f64)>>,
}

/// Generator data for one irrep.
#[derive(Debug, Clone)]
pub struct Yor {
    partition: Partition,
    dim: usize,
    // generators[k - 1] = ρ(τ_k)
    generators: Vec<Generator>,
}

impl Yor {
    pub fn new(lambda: &Partition) -> Self {
        let tableaux = standard_tableaux(lambda);
        let index: HashMap<&StandardTableau, usize> =
            tableaux.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let n = lambda.n();
        let generators = (1..n)
            .map(|k| {
                let mut diag = Vec::with_capacity(tableaux.len());
                let mut partner = Vec::with_capacity(tableaux.len());
                for t in &tableaux {
                    let r = (t.content(k + 1) - t.content(k)) as f64;
                    diag.push(1.0 / r);
                    if r.abs() > 1.0 {
                        let other = index[&t.swapped(k)];
                        partner.push(Some((other, (1.0 - 1.0 / (r * r)).sqrt())));
                    } else {
                        partner.push(None);
                    }
                }
                Generator { diag, partner }
            })
            .collect();
        Self {
            partition: lambda.clone(),
            dim: tableaux.len(),
            generators,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn generator_matrix(&self, k: usize) -> DMatrix<f64> {
        let g = &self.generators[k - 1];
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for a in 0..self.dim {
            m[(a, a)] = g.diag[a];
            if let Some((b, off)) = g.partner[a] {
                m[(b, a)] = off;
            }
        }
        m
    }

    /// `out = m · ρ(τ_k)` for row-major `d×d` buffers.
    fn right_multiply(&self, m: &[f64], k: usize, out: &mut [f64]) {
        let g = &self.generators[k - 1];
        let d = self.dim;
        for i in 0..d {
            let row = &m[i * d..(i + 1) * d];
            let dst = &mut out[i * d..(i + 1) * d];
            for a in 0..d {
                let mut v = row[a] * g.diag[a];
                if let Some((b, off)) = g.partner[a] {
                    v += row[b] * off;
                }
                dst[a] = v;
            }
        }
    }

    /// Calls `visit(rank, ρ(σ))` for every `σ ∈ S_n`, with `ρ(σ)` row-major.
    ///
    /// Walks the spanning tree where the parent of `σ` is `σ∘τ_k` for the
    /// first descent `k` of `σ`, so each matrix costs one sparse product.
    pub fn for_each_matrix(&self, mut visit: impl FnMut(usize, &[f64])) {
        let n = self.partition.n();
        let d = self.dim;
        let depth = n * n.saturating_sub(1) / 2 + 1;
        let mut buffers = vec![vec![0.0; d * d]; depth];
        for i in 0..d {
            buffers[0][i * d + i] = 1.0;
        }
        let mut images: Vec<usize> = (0..n).collect();
        self.visit_subtree(&mut images, &mut buffers, &mut visit);
    }

    fn visit_subtree(
        &self,
        images: &mut [usize],
        buffers: &mut [Vec<f64>],
        visit: &mut impl FnMut(usize, &[f64]),
    ) {
        let (current, rest) = buffers.split_first_mut().expect("depth bound");
        visit(rank_of_images(images), current);
        let n = images.len();
        // The first descent of the child must be at k itself.
        let first_descent = (0..n.saturating_sub(1)).find(|&i| images[i] > images[i + 1]).unwrap_or(n);
        for k0 in 0..n.saturating_sub(1) {
            if k0 > first_descent + 1 {
                break;
            }
            if images[k0] > images[k0 + 1] {
                continue;
            }
            if k0 > 0 && images[k0 - 1] > images[k0 + 1] {
                continue;
            }
            images.swap(k0, k0 + 1);
            self.right_multiply(current, k0 + 1, &mut rest[0]);
            self.visit_subtree(images, rest, visit);
            images.swap(k0, k0 + 1);
        }
    }
}

/// `ρ_λ(τ_k)` as a dense matrix.
pub fn yor_generator(lambda: &Partition, k: usize) -> Result<IrrepMatrix> {
    let n = lambda.n();
    if k == 0 || k >= n {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: n.saturating_sub(1),
        });
    }
    Ok(IrrepMatrix {
        partition: lambda.clone(),
        matrix: Yor::new(lambda).generator_matrix(k),
    })
}

/// `ρ_λ(σ)` as the product of generators along the bubble-sort word of `σ`.
pub fn irrep_of(lambda: &Partition, sigma: &Permutation) -> Result<IrrepMatrix> {
    if lambda.n() != sigma.n() {
        return Err(Error::DegreeMismatch {
            expected: lambda.n(),
            found: sigma.n(),
        });
    }
    let yor = Yor::new(lambda);
    let d = yor.dim();
    let mut acc = vec![0.0; d * d];
    for i in 0..d {
        acc[i * d + i] = 1.0;
    }
    let mut scratch = vec![0.0; d * d];
    for k in sigma.adjacent_factorization() {
        yor.right_multiply(&acc, k, &mut scratch);
        std::mem::swap(&mut acc, &mut scratch);
    }
    Ok(IrrepMatrix {
        partition: lambda.clone(),
        matrix: DMatrix::from_row_slice(d, d, &acc),
    })
}

/// All matrices `ρ_λ(σ)` for one irrep, flat and indexed by Lehmer rank.
#[derive(Debug, Clone)]
pub struct IrrepTable {
    pub partition: Partition,
    pub dim: usize,
    data: Vec<f64>,
}

impl IrrepTable {
    pub fn build(lambda: &Partition) -> Self {
        let yor = Yor::new(lambda);
        let d = yor.dim();
        let mut data = vec![0.0; factorial(lambda.n()) * d * d];
        yor.for_each_matrix(|rank, m| {
            data[rank * d * d..(rank + 1) * d * d].copy_from_slice(m);
        });
        Self {
            partition: lambda.clone(),
            dim: d,
            data,
        }
    }

    /// Row-major `ρ(σ)` for the permutation of the given rank.
    pub fn get(&self, rank: usize) -> &[f64] {
        let dd = self.dim * self.dim;
        &self.data[rank * dd..(rank + 1) * dd]
    }

    pub fn matrix(&self, rank: usize) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, self.get(rank))
    }
}

/// Memoized tables for every irrep of `S_n`, canonical order; `None` above
/// the cache bound.
pub fn cached_tables(n: usize) -> Option<Arc<Vec<IrrepTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<IrrepTable>>>>> = OnceLock::new();
    if n > TABLE_CACHE_MAX_DEGREE {
        return None;
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("irrep cache poisoned");
    let tables = guard
        .entry(n)
        .or_insert_with(|| Arc::new(enumerate_partitions(n).iter().map(IrrepTable::build).collect()));
    Some(Arc::clone(tables))
}

/// Visits `ρ_λ(σ)` for every `σ`, using the memoized table when available.
pub(crate) fn for_each_irrep_matrix(lambda_index: usize, lambda: &Partition, mut visit: impl FnMut(usize, &[f64])) {
    let n = lambda.n();
    if let Some(tables) = cached_tables(n) {
        let table = &tables[lambda_index];
        for rank in 0..factorial(n) {
            visit(rank, table.get(rank));
        }
    } else {
        Yor::new(lambda).for_each_matrix(visit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(p: &[usize]) -> Partition {
        Partition::new(p.to_vec()).unwrap()
    }

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).abs().max()
    }

    #[test]
    fn tableau_count_matches_hook_formula() {
        for n in 1..=7 {
            for l in enumerate_partitions(n) {
                assert_eq!(standard_tableaux(&l).len(), l.dimension());
            }
        }
    }

    #[test]
    fn last_letter_order_for_two_one() {
        let t = standard_tableaux(&part(&[2, 1]));
        assert_eq!(t[0].rows(), vec![vec![1, 2], vec![3]]);
        assert_eq!(t[1].rows(), vec![vec![1, 3], vec![2]]);
    }

    #[test]
    fn one_dimensional_irreps() {
        for n in 2..=5 {
            for k in 1..n {
                assert_eq!(yor_generator(&Partition::trivial(n), k).unwrap().matrix[(0, 0)], 1.0);
                assert_eq!(yor_generator(&Partition::sign(n), k).unwrap().matrix[(0, 0)], -1.0);
            }
        }
    }

    #[test]
    fn two_one_generators() {
        let l = part(&[2, 1]);
        let g1 = yor_generator(&l, 1).unwrap().matrix;
        assert_eq!(g1, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]));
        let g2 = yor_generator(&l, 2).unwrap().matrix;
        assert!(g2.trace().abs() < 1e-15);
        assert!(max_abs_diff(&g2, &g2.transpose()) < 1e-15);
        assert!(yor_generator(&l, 3).is_err());
    }

    #[test]
    fn identity_and_three_cycle() {
        let l = part(&[2, 1]);
        let e = irrep_of(&l, &Permutation::identity(3)).unwrap().matrix;
        assert_eq!(e, DMatrix::identity(2, 2));
        let c = Permutation::from_one_line(&[2, 3, 1]).unwrap();
        assert!((irrep_of(&l, &c).unwrap().matrix.trace() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn table_matches_direct_factorization() {
        for n in 1..=5 {
            for l in enumerate_partitions(n) {
                let table = IrrepTable::build(&l);
                for p in Permutation::all(n) {
                    let direct = irrep_of(&l, &p).unwrap().matrix;
                    assert!(max_abs_diff(&direct, &table.matrix(p.rank())) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn traversal_visits_each_rank_once() {
        for n in 1..=6 {
            let yor = Yor::new(&Partition::trivial(n));
            let mut seen = vec![0usize; factorial(n)];
            yor.for_each_matrix(|r, _| seen[r] += 1);
            assert!(seen.iter().all(|&c| c == 1), "n={n}");
        }
    }

    #[test]
    fn coxeter_relations() {
        for l in enumerate_partitions(5) {
            let g: Vec<_> = (1..5).map(|k| yor_generator(&l, k).unwrap().matrix).collect();
            let d = l.dimension();
            let id = DMatrix::<f64>::identity(d, d);
            for i in 0..4 {
                assert!(max_abs_diff(&(&g[i] * &g[i]), &id) < 1e-12);
                if i + 1 < 4 {
                    let lhs = &g[i] * &g[i + 1] * &g[i];
                    let rhs = &g[i + 1] * &g[i] * &g[i + 1];
                    assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
                }
                for j in i + 2..4 {
                    assert!(max_abs_diff(&(&g[i] * &g[j]), &(&g[j] * &g[i])) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn csv_dump_shape() {
        let m = yor_generator(&part(&[2, 1]), 2).unwrap();
        let csv = m.to_csv();
        assert_eq!(csv.lines().count(), 2);
        assert_eq!(csv.lines().next().unwrap().split(',').count(), 2);
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        (0..factorial(n)).prop_map(move |r| Permutation::from_rank(n, r).unwrap())
    }

    proptest! {
        #[test]
        fn homomorphism_and_orthogonality(n in 2usize..=6, seed in any::<u64>()) {
            let parts = enumerate_partitions(n);
            let lambda = &parts[(seed as usize) % parts.len()];
            let table = IrrepTable::build(lambda);
            let total = factorial(n);
            let a = Permutation::from_rank(n, (seed >> 8) as usize % total).unwrap();
            let b = Permutation::from_rank(n, (seed >> 32) as usize % total).unwrap();
            let ab = a.compose(&b).unwrap();
            let lhs = table.matrix(a.rank()) * table.matrix(b.rank());
            prop_assert!(max_abs_diff(&lhs, &table.matrix(ab.rank())) < 1e-10);
            let m = table.matrix(a.rank());
            let d = table.dim;
            prop_assert!(max_abs_diff(&(m.transpose() * &m), &DMatrix::identity(d, d)) < 1e-10);
            prop_assert!(max_abs_diff(&m.transpose(), &table.matrix(a.inverse().rank())) < 1e-10);
        }

        #[test]
        fn transposition_trace_is_character_ratio(p in perm_strategy(6), i in 1usize..=6, j in 1usize..=6) {
            prop_assume!(i != j);
            let tau = Permutation::transposition(6, i, j).unwrap();
            let _ = p;
            for l in enumerate_partitions(6) {
                let r = l.transposition_character_ratio();
                let r = *r.numer() as f64 / *r.denom() as f64;
                let tr = irrep_of(&l, &tau).unwrap().matrix.trace();
                prop_assert!((tr / l.dimension() as f64 - r).abs() < 1e-10);
            }
        }
    }
}
