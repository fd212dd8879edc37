use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds from nested rows; panics if the rows are ragged or not square.
    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        Self::from_fn(dim, |r, c| rows[r][c])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&x| x * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        Self::from_fn(n * m, |r, c| self[(r / m, c / m)] * other[(r % m, c % m)])
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Induced 1-norm (max absolute column sum).
    pub fn norm_1(&self) -> f64 {
        (0..self.dim)
            .map(|c| (0..self.dim).map(|r| self[(r, c)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `max |U†U - I|`, zero for an exactly unitary matrix.
    pub fn unitarity_deviation(&self) -> f64 {
        self.adjoint().matmul(self).sub(&Self::identity(self.dim)).max_abs()
    }

    /// `max |H - H†|`, zero for an exactly hermitian matrix.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    /// Solves `self · X = rhs` by LU with partial pivoting. Returns `None`
    /// when a pivot vanishes.
    pub fn solve(&self, rhs: &Self) -> Option<Self> {
        let n = self.dim;
        assert_eq!(n, rhs.dim);
        let mut lu = self.data.clone();
        let mut x = rhs.data.clone();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| lu[a * n + col].norm().total_cmp(&lu[b * n + col].norm()))?;
            if lu[pivot * n + col].norm() == 0.0 {
                return None;
            }
            if pivot != col {
                for j in 0..n {
                    lu.swap(col * n + j, pivot * n + j);
                    x.swap(col * n + j, pivot * n + j);
                }
            }
            let inv = ONE / lu[col * n + col];
            for r in col + 1..n {
                let f = lu[r * n + col] * inv;
                if f == ZERO {
                    continue;
                }
                for j in col..n {
                    let v = lu[col * n + j];
                    lu[r * n + j] -= f * v;
                }
                for j in 0..n {
                    let v = x[col * n + j];
                    x[r * n + j] -= f * v;
                }
            }
        }
        for col in (0..n).rev() {
            let inv = ONE / lu[col * n + col];
            for j in 0..n {
                x[col * n + j] *= inv;
            }
            for r in 0..col {
                let f = lu[r * n + col];
                if f == ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = x[col * n + j];
                    x[r * n + j] -= f * v;
                }
            }
        }
        Some(Self { dim: n, data: x })
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.dim + c]
    }
}

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// Matrix exponential by scaling and squaring with a degree-13 Padé
/// approximant.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.dim();
    if n == 0 {
        return CMatrix::zeros(0);
    }
    let norm = a.norm_1();
    if norm == 0.0 {
        return CMatrix::identity(n);
    }
    let squarings = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(Complex64::new(2f64.powi(-squarings), 0.0));

    let b = |i: usize| Complex64::new(PADE13[i], 0.0);
    let id = CMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let u_inner = a6.scale(b(13)).add(&a4.scale(b(11))).add(&a2.scale(b(9)));
    let u_tail = a6
        .scale(b(7))
        .add(&a4.scale(b(5)))
        .add(&a2.scale(b(3)))
        .add(&id.scale(b(1)));
    let u = a.matmul(&a6.matmul(&u_inner).add(&u_tail));

    let v_inner = a6.scale(b(12)).add(&a4.scale(b(10))).add(&a2.scale(b(8)));
    let v_tail = a6
        .scale(b(6))
        .add(&a4.scale(b(4)))
        .add(&a2.scale(b(2)))
        .add(&id.scale(b(0)));
    let v = a6.matmul(&v_inner).add(&v_tail);

    let mut r = v
        .sub(&u)
        .solve(&v.add(&u))
        .expect("Padé denominator is nonsingular after scaling");
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    r
}

/// `exp(-i H t)` for a hermitian `H`.
pub fn propagator(h: &CMatrix, t: f64) -> CMatrix {
    expm(&h.scale(Complex64::new(0.0, -t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expm_of_zero_is_identity() {
        assert_eq!(expm(&CMatrix::zeros(3)).sub(&CMatrix::identity(3)).max_abs(), 0.0);
    }

    #[test]
    fn expm_matches_pauli_x_rotation() {
        // exp(-i θ σx) = cos θ I - i sin θ σx
        let sx = CMatrix::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        for &theta in &[0.1, 1.0, 7.3, 40.0] {
            let u = propagator(&sx, theta);
            let expect = CMatrix::identity(2)
                .scale(c(theta.cos(), 0.0))
                .add(&sx.scale(c(0.0, -theta.sin())));
            assert!(u.sub(&expect).max_abs() < 1e-12, "theta {theta}");
        }
    }

    #[test]
    fn expm_of_diagonal() {
        let mut d = CMatrix::zeros(3);
        d[(0, 0)] = c(0.5, 0.0);
        d[(1, 1)] = c(-2.0, 1.0);
        d[(2, 2)] = c(10.0, 0.0);
        let e = expm(&d);
        for i in 0..3 {
            let want = d[(i, i)].exp();
            assert!((e[(i, i)] - want).norm() < 1e-10 * want.norm());
        }
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = CMatrix::from_fn(4, |r, col| {
            if r == col {
                c(4.0, 1.0)
            } else {
                c(1.0 / (1.0 + (r + 2 * col) as f64), 0.3)
            }
        });
        let x = CMatrix::from_fn(4, |r, col| c(r as f64 - col as f64, 0.5 * r as f64));
        let b = a.matmul(&x);
        assert!(a.solve(&b).unwrap().sub(&x).max_abs() < 1e-12);
    }

    #[test]
    fn singular_solve_is_none() {
        assert!(CMatrix::zeros(2).solve(&CMatrix::identity(2)).is_none());
    }
}
