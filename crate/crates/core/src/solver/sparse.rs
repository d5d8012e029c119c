//! Compressed sparse rows, reverse Cuthill-McKee ordering and a banded LU
//! factorisation with partial pivoting for the indefinite Newton systems.

use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinearSolveError {
    #[error("matrix is singular (rank deficiency {deficiency} of {size})")]
    Singular { deficiency: usize, size: usize },
    #[error("dimension mismatch: matrix {matrix}, right-hand side {rhs}")]
    Dimension { matrix: usize, rhs: usize },
}

/// Coordinate-format accumulator; duplicates are summed on compression.
#[derive(Debug, Clone, Default)]
pub struct Triplets {
    n: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self { n, entries: Vec::with_capacity(cap) }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Adds `v` at `(i, j)`. Explicit zeros are kept so the pattern is stable.
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i, j, v));
    }

    pub fn compress(mut self) -> Csr {
        self.entries.sort_unstable_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0; self.n + 1];
        let mut col = Vec::with_capacity(self.entries.len());
        let mut val: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last = None;
        for &(i, j, v) in &self.entries {
            if last == Some((i, j)) {
                *val.last_mut().unwrap() += v;
            } else {
                col.push(j);
                val.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Csr { n: self.n, row_ptr, col, val }
    }
}

/// Square matrix in compressed sparse row form with sorted columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl Csr {
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col[r.clone()].iter().copied().zip(self.val[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col[r.clone()].binary_search(&j) {
            Ok(k) => self.val[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.col.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).map(|(j, v)| v * x[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.val.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                d[i][j] = v;
            }
        }
        d
    }

    /// Every stored `(i, j)` has a stored `(j, i)`.
    pub fn is_structurally_symmetric(&self) -> bool {
        (0..self.n).all(|i| {
            self.row(i).all(|(j, _)| {
                let r = self.row_ptr[j]..self.row_ptr[j + 1];
                self.col[r].binary_search(&i).is_ok()
            })
        })
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                m = m.max((v - self.get(j, i)).abs());
            }
        }
        m
    }

    /// Restriction to the rows and columns listed in `keep`, renumbered in order.
    pub fn submatrix(&self, keep: &[usize]) -> Csr {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut t = Triplets::with_capacity(keep.len(), self.nnz());
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if map[j] != usize::MAX {
                    t.push(new_i, map[j], v);
                }
            }
        }
        t.compress()
    }
}

/// Reverse Cuthill-McKee ordering of the symmetrised pattern.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &Csr) -> Vec<usize> {
    let n = a.n;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if i != j {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for l in &mut adj {
        l.sort_unstable();
        l.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&i| degree[i]);
    for &seed in &by_degree {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(seed, &adj, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| degree[w]);
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Breadth-first level structure: returns the last level and the depth.
fn levels(start: usize, adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut depth = 0;
    let mut last = vec![start];
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                if dist[w] > depth {
                    depth = dist[w];
                    last.clear();
                }
                if dist[w] == depth {
                    last.push(w);
                }
                queue.push_back(w);
            }
        }
    }
    (last, depth)
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize]) -> usize {
    let mut v = seed;
    let (mut last, mut depth) = levels(v, adj);
    for _ in 0..8 {
        let cand = *last.iter().min_by_key(|&&w| degree[w]).unwrap();
        let (l2, d2) = levels(cand, adj);
        if d2 <= depth {
            break;
        }
        v = cand;
        last = l2;
        depth = d2;
    }
    v
}

/// Banded LU factors with partial pivoting, LAPACK `gbtrf` layout.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    ab: Vec<f64>,
    ldab: usize,
    ipiv: Vec<usize>,
}

impl BandLu {
    #[inline]
    fn at(&mut self, r: usize, c: usize) -> &mut f64 {
        &mut self.ab[c * self.ldab + r]
    }

    /// Factorises the matrix `get(i, j)` with the given band widths.
    /// Pivots below `pivot_tol` in magnitude count towards the rank deficiency.
    fn factor(
        n: usize,
        kl: usize,
        ku: usize,
        entries: impl Iterator<Item = (usize, usize, f64)>,
        pivot_tol: f64,
    ) -> Result<Self, LinearSolveError> {
        let ldab = 2 * kl + ku + 1;
        let kv = kl + ku;
        let mut lu = Self { n, kl, ku, ab: vec![0.0; ldab * n.max(1)], ldab, ipiv: vec![0; n] };
        for (i, j, v) in entries {
            *lu.at(kv + i - j, j) += v;
        }
        let mut deficiency = 0;
        let mut ju = 0;
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0;
            let mut best = lu.ab[j * ldab + kv].abs();
            for p in 1..=km {
                let v = lu.ab[j * ldab + kv + p].abs();
                if v > best {
                    best = v;
                    jp = p;
                }
            }
            lu.ipiv[j] = j + jp;
            if best <= pivot_tol {
                deficiency += 1;
                continue;
            }
            ju = ju.max((j + ku + jp).min(n - 1));
            if jp != 0 {
                for c in j..=ju {
                    lu.ab.swap(c * ldab + kv + j - c, c * ldab + kv + j + jp - c);
                }
            }
            let pivot = lu.ab[j * ldab + kv];
            for p in 1..=km {
                lu.ab[j * ldab + kv + p] /= pivot;
            }
            for c in j + 1..=ju {
                let t = lu.ab[c * ldab + kv + j - c];
                if t != 0.0 {
                    for p in 1..=km {
                        let l = lu.ab[j * ldab + kv + p];
                        lu.ab[c * ldab + kv + j + p - c] -= l * t;
                    }
                }
            }
        }
        if deficiency > 0 {
            return Err(LinearSolveError::Singular { deficiency, size: n });
        }
        Ok(lu)
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kv, ldab) = (self.n, self.kl + self.ku, self.ldab);
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = self.kl.min(n - 1 - j);
            let bj = b[j];
            if bj != 0.0 {
                for q in 1..=km {
                    b[j + q] -= self.ab[j * ldab + kv + q] * bj;
                }
            }
        }
        for j in (0..n).rev() {
            b[j] /= self.ab[j * ldab + kv];
            let bj = b[j];
            if bj != 0.0 {
                for i in j.saturating_sub(kv)..j {
                    b[i] -= self.ab[j * ldab + kv + i - j] * bj;
                }
            }
        }
    }
}

/// Relative pivot threshold after symmetric equilibration.
pub const PIVOT_TOL: f64 = 1e-13;

/// Solves `a x = b` with symmetric diagonal scaling, RCM reordering and banded LU.
pub fn solve(a: &Csr, b: &[f64]) -> Result<Vec<f64>, LinearSolveError> {
    let n = a.n;
    if b.len() != n {
        return Err(LinearSolveError::Dimension { matrix: n, rhs: b.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let m = a.row(i).fold(0.0f64, |m, (_, v)| m.max(v.abs()));
            if m > 0.0 {
                1.0 / m.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let perm = reverse_cuthill_mckee(a);
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let (mut kl, mut ku) = (0, 0);
    for i in 0..n {
        for (j, _) in a.row(i) {
            let (pi, pj) = (inv[i], inv[j]);
            if pi > pj {
                kl = kl.max(pi - pj);
            } else {
                ku = ku.max(pj - pi);
            }
        }
    }
    let entries = (0..n).flat_map(|i| {
        let (inv, scale) = (&inv, &scale);
        a.row(i).map(move |(j, v)| (inv[i], inv[j], v * scale[i] * scale[j]))
    });
    let lu = BandLu::factor(n, kl, ku, entries, PIVOT_TOL)?;
    let mut x = vec![0.0; n];
    for i in 0..n {
        x[inv[i]] = b[i] * scale[i];
    }
    lu.solve_in_place(&mut x);
    Ok((0..n).map(|i| x[inv[i]] * scale[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let mut t = Triplets::new(2);
        t.push(0, 0, 1.0);
        t.push(0, 0, 2.0);
        t.push(1, 0, 4.0);
        let c = t.compress();
        assert_eq!(c.get(0, 0), 3.0);
        assert_eq!(c.get(1, 0), 4.0);
        assert_eq!(c.get(0, 1), 0.0);
        assert_eq!(c.nnz(), 2);
    }

    #[test]
    fn solves_saddle_point_system() {
        // [[2, 1], [1, 0]] needs pivoting.
        let mut t = Triplets::new(2);
        t.push(0, 0, 2.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        let x = solve(&t.compress(), &[3.0, 1.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn detects_singularity() {
        let mut t = Triplets::new(3);
        t.push(0, 0, 1.0);
        t.push(0, 1, 1.0);
        t.push(1, 0, 1.0);
        t.push(1, 1, 1.0);
        t.push(2, 2, 1.0);
        match solve(&t.compress(), &[1.0, 1.0, 1.0]) {
            Err(LinearSolveError::Singular { deficiency, .. }) => assert_eq!(deficiency, 1),
            other => panic!("expected singular, got {other:?}"),
        }
    }
}
