//! Dense factorizations and structural helpers.
//!
//! Three pieces live here:
//!
//! * [`lu_factor`] / [`LuFactors`] — LU with partial pivoting for square
//!   matrices, the workhorse behind every basis solve;
//! * [`IndependenceTester`] — incremental "is this column independent of the
//!   ones I already took?" queries, used by the greedy basis builders;
//! * [`block_lower_triangularize`] — permutes a rectangular matrix to block
//!   lower triangular form (maximum bipartite matching on the nonzero
//!   pattern, then strongly connected components of the pivot graph).

use crate::mat::{norm2, Mat};
use petgraph::graph::DiGraph;

/// Packed LU factorization of a square matrix with partial pivoting:
/// `P M = L U` with unit diagonal `L`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    /// `L` strictly below the diagonal, `U` on and above it.
    packed: Mat,
    /// Row permutation: factored row `k` is original row `row_perm[k]`.
    row_perm: Vec<usize>,
    /// Smallest pivot magnitude met during elimination.
    smallest_pivot: f64,
    /// Set when `smallest_pivot` fell below the factorization tolerance.
    singular: bool,
}

/// Factor a square matrix. Never fails outright: a singular matrix is
/// reported through [`LuFactors::is_singular`] and the caller decides.
pub fn lu_factor(m: &Mat, pivot_tol: f64) -> LuFactors {
    assert_eq!(m.rows(), m.cols(), "lu_factor wants a square matrix");
    let n = m.rows();
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut smallest = f64::INFINITY;

    for k in 0..n {
        // Partial pivoting: bring the largest remaining entry of column k up.
        let mut best = k;
        let mut best_val = a.get(k, k).abs();
        for i in k + 1..n {
            let v = a.get(i, k).abs();
            if v > best_val {
                best = i;
                best_val = v;
            }
        }
        if best != k {
            perm.swap(k, best);
            for j in 0..n {
                let t = a.get(k, j);
                a.set(k, j, a.get(best, j));
                a.set(best, j, t);
            }
        }
        let pivot = a.get(k, k);
        smallest = smallest.min(pivot.abs());
        if pivot.abs() <= pivot_tol {
            // Leave the rest untouched; the factors are unusable anyway.
            continue;
        }
        for i in k + 1..n {
            let factor = a.get(i, k) / pivot;
            a.set(i, k, factor);
            if factor != 0.0 {
                for j in k + 1..n {
                    a.set(i, j, a.get(i, j) - factor * a.get(k, j));
                }
            }
        }
    }
    if n == 0 {
        smallest = f64::INFINITY;
    }
    LuFactors { packed: a, row_perm: perm, singular: smallest <= pivot_tol, smallest_pivot: smallest }
}

impl LuFactors {
    pub fn order(&self) -> usize {
        self.packed.rows()
    }

    pub fn smallest_pivot(&self) -> f64 {
        self.smallest_pivot
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn row_perm(&self) -> &[usize] {
        &self.row_perm
    }

    /// Expanded unit lower-triangular factor.
    pub fn l(&self) -> Mat {
        let n = self.order();
        let mut l = Mat::identity(n);
        for j in 0..n {
            for i in j + 1..n {
                l.set(i, j, self.packed.get(i, j));
            }
        }
        l
    }

    /// Expanded upper-triangular factor.
    pub fn u(&self) -> Mat {
        let n = self.order();
        let mut u = Mat::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                u.set(i, j, self.packed.get(i, j));
            }
        }
        u
    }

    /// Solve `M x = rhs`, or `M' x = rhs` with `transposed`.
    ///
    /// Returns `None` when the factorization was flagged singular.
    pub fn solve(&self, rhs: &[f64], transposed: bool) -> Option<Vec<f64>> {
        if self.singular {
            return None;
        }
        let n = self.order();
        assert_eq!(rhs.len(), n, "solve rhs length");
        if !transposed {
            // L U x = P rhs
            let mut x: Vec<f64> = self.row_perm.iter().map(|&i| rhs[i]).collect();
            for k in 0..n {
                for i in 0..k {
                    x[k] -= self.packed.get(k, i) * x[i];
                }
            }
            for k in (0..n).rev() {
                for j in k + 1..n {
                    x[k] -= self.packed.get(k, j) * x[j];
                }
                x[k] /= self.packed.get(k, k);
            }
            Some(x)
        } else {
            // M' = U' L' P, so solve U' z = rhs, L' w = z, then undo P.
            let mut z = rhs.to_vec();
            for k in 0..n {
                for i in 0..k {
                    z[k] -= self.packed.get(i, k) * z[i];
                }
                z[k] /= self.packed.get(k, k);
            }
            for k in (0..n).rev() {
                for i in k + 1..n {
                    z[k] -= self.packed.get(i, k) * z[i];
                }
            }
            let mut x = vec![0.0; n];
            for (k, &orig) in self.row_perm.iter().enumerate() {
                x[orig] = z[k];
            }
            Some(x)
        }
    }
}

/// Incremental linear-independence oracle over a growing column set.
///
/// Internally keeps an orthonormal basis of the span; a candidate is
/// independent when its residual after projection still has norm above the
/// pivot tolerance.
#[derive(Debug, Clone)]
pub struct IndependenceTester {
    dim: usize,
    ortho: Vec<Vec<f64>>,
}

impl IndependenceTester {
    pub fn new(dim: usize) -> IndependenceTester {
        IndependenceTester { dim, ortho: Vec::new() }
    }

    /// Number of columns accepted so far (the current rank).
    pub fn rank(&self) -> usize {
        self.ortho.len()
    }

    /// Norm of the candidate's residual against the accepted span.
    pub fn residual_norm(&self, candidate: &[f64]) -> f64 {
        norm2(&self.residual(candidate))
    }

    fn residual(&self, candidate: &[f64]) -> Vec<f64> {
        assert_eq!(candidate.len(), self.dim, "candidate length");
        let mut r = candidate.to_vec();
        // Two projection passes: plain modified Gram-Schmidt loses accuracy
        // once columns get nearly dependent.
        for _ in 0..2 {
            for q in &self.ortho {
                let t = crate::mat::dot(&r, q);
                crate::mat::axpy(&mut r, -t, q);
            }
        }
        r
    }

    /// Accept the candidate if independent; returns whether it was accepted.
    pub fn try_add(&mut self, candidate: &[f64], pivot_tol: f64) -> bool {
        if self.ortho.len() == self.dim {
            return false;
        }
        let r = self.residual(candidate);
        let n = norm2(&r);
        if n > pivot_tol {
            self.ortho.push(r.into_iter().map(|v| v / n).collect());
            true
        } else {
            false
        }
    }
}

/// One-shot independence query: is `candidate` independent of `cols`?
/// Returns `(independent, residual_norm)`.
pub fn incremental_independence(
    cols: &[Vec<f64>],
    candidate: &[f64],
    pivot_tol: f64,
) -> (bool, f64) {
    let mut t = IndependenceTester::new(candidate.len());
    for c in cols {
        t.try_add(c, pivot_tol);
    }
    let r = t.residual_norm(candidate);
    (r > pivot_tol, r)
}

/// Result of permuting a rectangular matrix to block lower triangular form.
///
/// Applying `row_perm` / `col_perm` yields a matrix whose leading diagonal
/// blocks (`row_blocks[k]` x `col_blocks[k]` for `k < block_count()`) each
/// carry a structurally zero-free transversal, with all other nonzeros at or
/// below their diagonal block. Rows the matching could not cover form a
/// final extra row block, and columns with no nonzeros at all form a final
/// extra column block; either may be empty.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure {
    /// Permuted row `k` is original row `row_perm[k]`.
    pub row_perm: Vec<usize>,
    /// Permuted column `k` is original column `col_perm[k]`.
    pub col_perm: Vec<usize>,
    /// Row counts per diagonal block, plus the trailing uncovered block.
    pub row_blocks: Vec<usize>,
    /// Column counts per diagonal block, plus the trailing zero-column block.
    pub col_blocks: Vec<usize>,
}

impl BlockStructure {
    /// Number of proper diagonal blocks (excludes the trailing remainder).
    pub fn block_count(&self) -> usize {
        self.row_blocks.len() - 1
    }

    /// Row range (in permuted coordinates) of diagonal block `k`, including
    /// the trailing block at index `block_count()`.
    pub fn row_range(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.row_blocks[..k].iter().sum();
        start..start + self.row_blocks[k]
    }

    /// Column range (in permuted coordinates) of block `k`.
    pub fn col_range(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.col_blocks[..k].iter().sum();
        start..start + self.col_blocks[k]
    }
}

/// Maximum bipartite matching (rows to columns) on the nonzero pattern by
/// repeated augmenting paths. Returns for each row the matched column, if any.
fn max_bipartite_matching(pattern: &[Vec<usize>], n_cols: usize) -> Vec<Option<usize>> {
    let m = pattern.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n_cols];
    let mut row_match: Vec<Option<usize>> = vec![None; m];

    fn augment(
        row: usize,
        pattern: &[Vec<usize>],
        col_owner: &mut [Option<usize>],
        row_match: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for &c in &pattern[row] {
            if visited[c] {
                continue;
            }
            visited[c] = true;
            let free = match col_owner[c] {
                None => true,
                Some(owner) => augment(owner, pattern, col_owner, row_match, visited),
            };
            if free {
                col_owner[c] = Some(row);
                row_match[row] = Some(c);
                return true;
            }
        }
        false
    }

    for r in 0..m {
        let mut visited = vec![false; n_cols];
        augment(r, pattern, &mut col_owner, &mut row_match, &mut visited);
    }
    row_match
}

/// Permute `a` (any shape) to block lower triangular form.
///
/// Entries with magnitude at most `zero_tol` count as structural zeros.
pub fn block_lower_triangularize(a: &Mat, zero_tol: f64) -> BlockStructure {
    let m = a.rows();
    let n = a.cols();
    let pattern: Vec<Vec<usize>> = (0..m)
        .map(|i| (0..n).filter(|&j| a.get(i, j).abs() > zero_tol).collect())
        .collect();
    let row_match = max_bipartite_matching(&pattern, n);

    // Matched (row, col) pairs become graph nodes. An edge u -> v demands
    // that u's block come no later than v's: it exists when v's ROW has a
    // nonzero in u's COLUMN, i.e. the entry (row_v, col_u) would sit above
    // the diagonal unless block(u) <= block(v).
    let pairs: Vec<(usize, usize)> =
        row_match.iter().enumerate().filter_map(|(r, c)| c.map(|c| (r, c))).collect();
    let mut col_to_pair = vec![usize::MAX; n];
    for (k, &(_, c)) in pairs.iter().enumerate() {
        col_to_pair[c] = k;
    }
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<_> = (0..pairs.len()).map(|k| graph.add_node(k)).collect();
    for (v, &(rv, _)) in pairs.iter().enumerate() {
        for &c in &pattern[rv] {
            let u = col_to_pair[c];
            if u != usize::MAX && u != v {
                graph.add_edge(nodes[u], nodes[v], ());
            }
        }
    }
    // tarjan_scc yields components in reverse topological order with respect
    // to edge direction, so reversing gives sources (earliest blocks) first.
    let mut sccs = petgraph::algo::tarjan_scc(&graph);
    sccs.reverse();

    let mut row_perm = Vec::with_capacity(m);
    let mut col_perm = Vec::with_capacity(n);
    let mut row_blocks = Vec::new();
    let mut col_blocks = Vec::new();
    let mut row_block_of = vec![usize::MAX; m];
    for scc in &sccs {
        let blk = row_blocks.len();
        let mut members: Vec<usize> = scc.iter().map(|&ix| graph[ix]).collect();
        members.sort_unstable_by_key(|&k| pairs[k].0);
        for &k in &members {
            let (r, c) = pairs[k];
            row_perm.push(r);
            col_perm.push(c);
            row_block_of[r] = blk;
        }
        row_blocks.push(members.len());
        col_blocks.push(members.len());
    }

    // Unmatched columns with nonzeros fold into the earliest block whose
    // rows can host them without creating entries above the diagonal.
    let mut extra_cols: Vec<Vec<usize>> = vec![Vec::new(); row_blocks.len() + 1];
    let mut zero_cols = Vec::new();
    let trailing = row_blocks.len();
    for j in 0..n {
        if col_to_pair[j] != usize::MAX {
            continue;
        }
        let mut earliest = usize::MAX;
        for i in 0..m {
            if a.get(i, j).abs() > zero_tol {
                let b = if row_block_of[i] == usize::MAX { trailing } else { row_block_of[i] };
                earliest = earliest.min(b);
            }
        }
        if earliest == usize::MAX {
            zero_cols.push(j);
        } else {
            extra_cols[earliest].push(j);
        }
    }

    // Rebuild the column permutation with the extras spliced in.
    let mut col_perm_full = Vec::with_capacity(n);
    let mut offset = 0;
    for (k, &sz) in col_blocks.clone().iter().enumerate() {
        col_perm_full.extend_from_slice(&col_perm[offset..offset + sz]);
        offset += sz;
        col_perm_full.extend_from_slice(&extra_cols[k]);
        col_blocks[k] += extra_cols[k].len();
    }
    // Unmatched rows form the trailing row block; columns reaching only them
    // and identically-zero columns form the trailing column block.
    let unmatched: Vec<usize> = (0..m).filter(|&r| row_match[r].is_none()).collect();
    row_blocks.push(unmatched.len());
    row_perm.extend_from_slice(&unmatched);
    let tail = [extra_cols[trailing].clone(), zero_cols].concat();
    col_blocks.push(tail.len());
    col_perm_full.extend_from_slice(&tail);

    BlockStructure { row_perm, col_perm: col_perm_full, row_blocks, col_blocks }
}
