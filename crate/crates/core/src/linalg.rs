//! Small dense matrices with exact and floating kernels.

use std::cmp::Ordering;
use std::fmt;

use nalgebra::DMatrix;

use crate::scalar::{Field, Rational, Ring};

/// Relative threshold below which a singular value (or eigenvalue) of a
/// float matrix counts as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Row-major dense matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: fmt::Debug> fmt::Debug for Mat<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for r in 0..self.rows {
            list.entry(&&self.data[r * self.cols..(r + 1) * self.cols]);
        }
        list.finish()
    }
}

impl<S> Mat<S> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: S) {
        self.data[r * self.cols + c] = v;
    }

    pub fn map<T>(&self, f: impl FnMut(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> impl Iterator<Item = &S> {
        self.data.iter()
    }

    pub fn row_vec(&self, r: usize) -> &[S] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<S>>
    where
        S: Clone,
    {
        (0..self.rows).map(|r| self.row_vec(r).to_vec()).collect()
    }
}

impl<S: Ring> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| if r == c { S::one() } else { S::zero() })
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let n = cols.first().map_or(0, Vec::len);
        Mat::from_fn(n, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn column(&self, c: usize) -> Vec<S> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn mul(&self, other: &Mat<S>) -> Mat<S> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        Mat::from_fn(self.rows, other.cols, |r, c| {
            let mut acc = S::zero();
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                let b = other.get(k, c);
                if b.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * b.clone();
            }
            acc
        })
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = S::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(r, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc = acc + a.clone() * x.clone();
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Mat<S>) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |r, c| self.get(r, c).clone() + other.get(r, c).clone())
    }

    pub fn sub(&self, other: &Mat<S>) -> Mat<S> {
        Mat::from_fn(self.rows, self.cols, |r, c| self.get(r, c).clone() - other.get(r, c).clone())
    }

    pub fn scale(&self, s: &S) -> Mat<S> {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Ring::is_zero)
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Determinant by cofactor expansion; only ring operations are used, so
    /// it works for polynomial and closed-form entries too. Intended for
    /// n <= 4.
    pub fn det_cofactor(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let idx: Vec<usize> = (0..self.rows).collect();
        cofactor(self, &idx, &idx)
    }
}

fn cofactor<S: Ring>(m: &Mat<S>, rows: &[usize], cols: &[usize]) -> S {
    match rows.len() {
        0 => S::one(),
        1 => m.get(rows[0], cols[0]).clone(),
        _ => {
            let r0 = rows[0];
            let rest: Vec<usize> = rows[1..].to_vec();
            let mut acc = S::zero();
            for (j, &c) in cols.iter().enumerate() {
                let a = m.get(r0, c);
                if a.is_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                let term = a.clone() * cofactor(m, &rest, &sub_cols);
                acc = if j % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Kernel and signature computations that differ between exact and float
/// backends.
pub trait LinearAlgebra: Field {
    /// Basis of the right null space of `m`.
    fn null_space(m: &Mat<Self>) -> Vec<Vec<Self>> {
        Self::null_space_tol(m, RANK_TOL)
    }
    /// Null space with singular values below `rel_tol` times the largest
    /// treated as zero. Exact backends ignore the tolerance.
    fn null_space_tol(m: &Mat<Self>, rel_tol: f64) -> Vec<Vec<Self>>;
    /// Signature `(zeros, positives, negatives)` of a symmetric matrix.
    fn signature(m: &Mat<Self>) -> (usize, usize, usize);
}

impl<S: LinearAlgebra> Mat<S> {
    pub fn rank(&self) -> usize {
        self.cols - S::null_space(self).len()
    }

    /// Gaussian elimination determinant (partial pivoting for floats).
    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = S::one();
        for col in 0..n {
            let pivot = pick_pivot(&a, col, col);
            let Some(p) = pivot else { return S::zero() };
            if p != col {
                swap_rows(&mut a, p, col);
                det = -det;
            }
            let pv = a.get(col, col).clone();
            det = det * pv.clone();
            for r in col + 1..n {
                let factor = a.get(r, col).clone() / pv.clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a.get(r, c).clone() - factor.clone() * a.get(col, c).clone();
                    a.set(r, c, v);
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Mat<S>> {
        let n = self.rows;
        let id = Mat::<S>::identity(n);
        let cols: Option<Vec<Vec<S>>> = (0..n).map(|c| self.solve(&id.column(c))).collect();
        cols.map(|c| Mat::from_columns(&c))
    }

    /// Some solution `x` of `self * x = b`, or `None` when the system is
    /// inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[S]) -> Option<Vec<S>> {
        let (rows, cols) = (self.rows, self.cols);
        let mut a = Mat::from_fn(rows, cols + 1, |r, c| {
            if c < cols {
                self.get(r, c).clone()
            } else {
                b[r].clone()
            }
        });
        let scale = a.entries().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
        let tol = RANK_TOL * scale.max(f64::MIN_POSITIVE);
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..cols {
            if row == rows {
                break;
            }
            let Some(p) = pick_pivot_tol(&a, row, col, tol) else { continue };
            swap_rows(&mut a, p, row);
            let pv = a.get(row, col).clone();
            for c in col..=cols {
                let v = a.get(row, c).clone() / pv.clone();
                a.set(row, c, v);
            }
            for r in 0..rows {
                if r == row {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..=cols {
                    let v = a.get(r, c).clone() - factor.clone() * a.get(row, c).clone();
                    a.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        for r in row..rows {
            if a.get(r, cols).sign_tol(tol) != Ordering::Equal {
                return None;
            }
        }
        let mut x = vec![S::zero(); cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = a.get(r, cols).clone();
        }
        Some(x)
    }
}

fn swap_rows<S>(a: &mut Mat<S>, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..a.cols {
        a.data.swap(i * a.cols + c, j * a.cols + c);
    }
}

fn pick_pivot<S: Field>(a: &Mat<S>, start: usize, col: usize) -> Option<usize> {
    pick_pivot_tol(a, start, col, 0.0)
}

fn pick_pivot_tol<S: Field>(a: &Mat<S>, start: usize, col: usize, tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in start..a.rows {
        let v = a.get(r, col);
        if v.sign_tol(tol) == Ordering::Equal {
            continue;
        }
        let mag = v.to_f64().abs();
        match S::BACKEND {
            // Exact arithmetic: the first nonzero entry is as good as any.
            crate::scalar::Backend::Rational => return Some(r),
            crate::scalar::Backend::Float => {
                if best.is_none_or(|(_, m)| mag > m) {
                    best = Some((r, mag));
                }
            }
        }
    }
    best.map(|(r, _)| r)
}

impl LinearAlgebra for Rational {
    fn null_space_tol(m: &Mat<Self>, _rel_tol: f64) -> Vec<Vec<Self>> {
        let (rows, cols) = (m.rows, m.cols);
        let mut a = m.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..cols {
            if row == rows {
                break;
            }
            let Some(p) = (row..rows).find(|&r| !Ring::is_zero(a.get(r, col))) else { continue };
            swap_rows(&mut a, p, row);
            let pv = a.get(row, col).clone();
            for c in col..cols {
                let v = a.get(row, c) / &pv;
                a.set(row, c, v);
            }
            for r in 0..rows {
                if r == row {
                    continue;
                }
                let factor = a.get(r, col).clone();
                if Ring::is_zero(&factor) {
                    continue;
                }
                for c in col..cols {
                    let v = a.get(r, c) - &factor * a.get(row, c);
                    a.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![<Rational as Ring>::zero(); cols];
                v[f] = <Rational as Ring>::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Symmetric Gaussian elimination (congruence diagonalization).
    fn signature(m: &Mat<Self>) -> (usize, usize, usize) {
        assert_eq!(m.rows, m.cols);
        let mut a = m.clone();
        let mut active: Vec<usize> = (0..m.rows).collect();
        let (mut pos, mut neg) = (0, 0);
        while !active.is_empty() {
            let diag = active.iter().copied().find(|&i| !Ring::is_zero(a.get(i, i)));
            let pivot = match diag {
                Some(i) => i,
                None => {
                    // All remaining diagonal entries vanish; an off-diagonal
                    // entry a_ij lets us replace e_i by e_i + e_j.
                    let pair = active.iter().copied().find_map(|i| {
                        active.iter().copied().find(|&j| j != i && !Ring::is_zero(a.get(i, j))).map(|j| (i, j))
                    });
                    let Some((i, j)) = pair else { break };
                    let n = a.rows;
                    for c in 0..n {
                        let v = a.get(i, c) + a.get(j, c);
                        a.set(i, c, v);
                    }
                    for r in 0..n {
                        let v = a.get(r, i) + a.get(r, j);
                        a.set(r, i, v);
                    }
                    i
                }
            };
            let pv = a.get(pivot, pivot).clone();
            if pv > <Rational as Ring>::zero() {
                pos += 1;
            } else {
                neg += 1;
            }
            active.retain(|&x| x != pivot);
            for &r in &active {
                let factor = a.get(r, pivot) / &pv;
                if Ring::is_zero(&factor) {
                    continue;
                }
                for &c in &active {
                    let v = a.get(r, c) - &factor * a.get(pivot, c);
                    a.set(r, c, v);
                }
            }
            for &r in &active {
                a.set(r, pivot, <Rational as Ring>::zero());
                a.set(pivot, r, <Rational as Ring>::zero());
            }
        }
        (m.rows - pos - neg, pos, neg)
    }
}

impl LinearAlgebra for f64 {
    fn null_space_tol(m: &Mat<Self>, rel_tol: f64) -> Vec<Vec<Self>> {
        let (rows, cols) = (m.rows, m.cols);
        // Pad to at least square so the SVD yields a full right basis.
        let padded = rows.max(cols);
        let a = DMatrix::from_fn(padded, cols, |r, c| if r < rows { *m.get(r, c) } else { 0.0 });
        let svd = a.svd(false, true);
        let v_t = svd.v_t.expect("requested right singular vectors");
        let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
        let tol = rel_tol * largest;
        (0..cols)
            .filter(|&i| largest == 0.0 || svd.singular_values[i] <= tol)
            .map(|i| v_t.row(i).iter().copied().collect())
            .collect()
    }

    fn signature(m: &Mat<Self>) -> (usize, usize, usize) {
        let n = m.rows;
        let a = DMatrix::from_fn(n, n, |r, c| 0.5 * (m.get(r, c) + m.get(c, r)));
        let eig = a.symmetric_eigen();
        let largest = eig.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let tol = RANK_TOL * largest;
        let pos = eig.eigenvalues.iter().filter(|&&x| largest > 0.0 && x > tol).count();
        let neg = eig.eigenvalues.iter().filter(|&&x| largest > 0.0 && x < -tol).count();
        (n - pos - neg, pos, neg)
    }
}

/// Whether the spans of two families of vectors coincide.
pub fn same_span<S: LinearAlgebra>(a: &[Vec<S>], b: &[Vec<S>]) -> bool {
    let rank_of = |vs: &[Vec<S>]| {
        if vs.is_empty() {
            0
        } else {
            Mat::from_rows(vs.to_vec()).transpose().rank()
        }
    };
    let ra = rank_of(a);
    let rb = rank_of(b);
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    ra == rb && rank_of(&both) == ra
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, rational_int};

    fn q(rows: &[&[i64]]) -> Mat<Rational> {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| rational_int(x)).collect()).collect())
    }

    #[test]
    fn exact_null_space_and_rank() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = Rational::null_space(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.apply(v).iter().all(Ring::is_zero));
        }
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn float_null_space_matches_exact() {
        let m = Mat::from_rows(vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]);
        assert_eq!(f64::null_space(&m).len(), 2);
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn determinant_and_inverse() {
        let m = q(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(m.det(), rational_int(18));
        assert_eq!(m.det_cofactor(), rational_int(18));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Mat::identity(3));
        assert!(q(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let m = q(&[&[1, 1], &[2, 2]]);
        let x = m.solve(&[rational_int(1), rational_int(2)]).unwrap();
        assert_eq!(m.apply(&x), vec![rational_int(1), rational_int(2)]);
        assert!(m.solve(&[rational_int(1), rational_int(3)]).is_none());
    }

    #[test]
    fn exact_signature_with_zero_diagonal() {
        // Hyperbolic plane plus a negative line and a null direction.
        let m = q(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, -3, 0], &[0, 0, 0, 0]]);
        assert_eq!(Rational::signature(&m), (1, 1, 2));
        let mf = m.map(|x| x.to_f64());
        assert_eq!(f64::signature(&mf), (1, 1, 2));
        let h = Mat::from_rows(vec![vec![rational(1, 2), rational(1, 3)], vec![rational(1, 3), rational(1, 4)]]);
        assert_eq!(Rational::signature(&h), (0, 2, 0));
    }
}
