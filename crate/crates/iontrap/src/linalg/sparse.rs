use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::dense::CMatrix;
#[allow(unused_imports)]
use num_traits::Float;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-compressed complex sparse matrix. Each row holds `(column, value)`
/// pairs sorted by column with no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    rows: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, rows: vec![Vec::new(); dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal(&vec![Complex64::new(1.0, 0.0); dim])
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let rows = diag
            .iter()
            .enumerate()
            .map(|(i, &d)| if d == ZERO { Vec::new() } else { vec![(i, d)] })
            .collect();
        Self { dim: diag.len(), rows }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r}, {c}) outside dimension {dim}");
            rows[r].push((c, v));
        }
        for row in &mut rows {
            Self::compact(row);
        }
        Self { dim, rows }
    }

    fn compact(row: &mut Vec<(usize, Complex64)>) {
        row.sort_by_key(|&(c, _)| c);
        let mut out: Vec<(usize, Complex64)> = Vec::with_capacity(row.len());
        for &(c, v) in row.iter() {
            match out.last_mut() {
                Some((lc, lv)) if *lc == c => *lv += v,
                _ => out.push((c, v)),
            }
        }
        out.retain(|&(_, v)| v != ZERO);
        *row = out;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row(&self, r: usize) -> &[(usize, Complex64)] {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.rows[r]
            .binary_search_by_key(&c, |&(col, _)| col)
            .map(|i| self.rows[r][i].1)
            .unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&(c, v)| (c, v * s)).filter(|&(_, v)| v != ZERO).collect())
            .collect();
        Self { dim: self.dim, rows }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut row: Vec<_> = a.iter().chain(b).copied().collect();
                Self::compact(&mut row);
                row
            })
            .collect();
        Self { dim: self.dim, rows }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.iter().map(|(r, c, v)| (c, r, v.conj())))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: Vec<(usize, Complex64)> = Vec::new();
                for &(k, a) in row {
                    acc.extend(other.rows[k].iter().map(|&(c, b)| (c, a * b)));
                }
                Self::compact(&mut acc);
                acc
            })
            .collect();
        Self { dim: self.dim, rows }
    }

    pub fn matvec_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(v.len(), self.dim);
        for (o, row) in out.iter_mut().zip(&self.rows) {
            *o = row.iter().map(|&(c, a)| a * v[c]).sum();
        }
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim];
        self.matvec_into(v, &mut out);
        out
    }

    /// Max absolute row sum; an upper bound on the spectral norm of a
    /// hermitian matrix.
    pub fn norm_inf(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let diff = self.add(&self.adjoint().scale(Complex64::new(-1.0, 0.0)));
        diff.iter().fold(0.0, |acc, (_, _, v)| acc.max(v.norm()))
    }
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Computes `exp(-i H t) v` for hermitian `H` by a truncated Taylor series
/// on substeps short enough that `‖H‖ dt ≤ 1`.
pub fn expm_multiply(h: &SparseMatrix, t: f64, v: &[Complex64]) -> Vec<Complex64> {
    let scale = h.norm_inf() * t.abs();
    let substeps = scale.ceil().max(1.0) as usize;
    let dt = t / substeps as f64;
    let vnorm = norm2(v).max(f64::MIN_POSITIVE);

    let mut w = v.to_vec();
    let mut term = vec![ZERO; v.len()];
    let mut next = vec![ZERO; v.len()];
    for _ in 0..substeps {
        term.copy_from_slice(&w);
        for k in 1..=40 {
            h.matvec_into(&term, &mut next);
            let f = Complex64::new(0.0, -dt / k as f64);
            for (t_, n) in term.iter_mut().zip(&next) {
                *t_ = n * f;
            }
            for (wi, ti) in w.iter_mut().zip(&term) {
                *wi += ti;
            }
            if norm2(&term) <= 1e-17 * vnorm {
                break;
            }
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::super::dense::propagator;
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_hermitian(dim: usize) -> SparseMatrix {
        let mut trip = Vec::new();
        for i in 0..dim {
            trip.push((i, i, c(0.7 * i as f64 - 1.0, 0.0)));
            if i + 1 < dim {
                let v = c(0.3 + 0.1 * i as f64, -0.2);
                trip.push((i, i + 1, v));
                trip.push((i + 1, i, v.conj()));
            }
            if i + 3 < dim {
                trip.push((i, i + 3, c(0.0, 0.4)));
                trip.push((i + 3, i, c(0.0, -0.4)));
            }
        }
        SparseMatrix::from_triplets(dim, trip)
    }

    #[test]
    fn triplets_merge_duplicates_and_drop_zeros() {
        let m = SparseMatrix::from_triplets(2, [(0, 1, c(1.0, 0.0)), (0, 1, c(-1.0, 0.0)), (1, 0, c(2.0, 0.0))]);
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(1, 0), c(2.0, 0.0));
    }

    #[test]
    fn matmul_matches_dense() {
        let a = sample_hermitian(6);
        let b = a.scale(c(0.5, 0.5)).add(&SparseMatrix::identity(6));
        let dense = a.to_dense().matmul(&b.to_dense());
        assert!(a.matmul(&b).to_dense().sub(&dense).max_abs() < 1e-14);
    }

    #[test]
    fn expm_multiply_agrees_with_dense_pade() {
        let h = sample_hermitian(9);
        let v: Vec<_> = (0..9).map(|i| c(1.0 / (1.0 + i as f64), 0.1 * i as f64)).collect();
        for &t in &[0.0, 0.3, 5.0, 60.0] {
            let dense = propagator(&h.to_dense(), t).matvec(&v);
            let sparse = expm_multiply(&h, t, &v);
            let err = dense.iter().zip(&sparse).fold(0.0f64, |acc, (a, b)| acc.max((a - b).norm()));
            assert!(err < 1e-11, "t = {t}: err {err}");
        }
    }
}
