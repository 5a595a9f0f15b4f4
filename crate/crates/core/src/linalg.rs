//! Small dense linear algebra over const-generic dimensions.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use crate::{Error, Result};

/// Symmetry tolerance used by [`is_spd`].
pub const SYMMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector<const N: usize>(pub [f64; N]);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix<const N: usize>(pub [[f64; N]; N]);

impl<const N: usize> Default for Vector<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Vector<N> {
    pub const fn new(entries: [f64; N]) -> Self {
        Self(entries)
    }

    pub const fn zeros() -> Self {
        Self([0.0; N])
    }

    pub fn splat(x: f64) -> Self {
        Self([x; N])
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        two_norm(self)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.map(f))
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(self.0[i], other.0[i]);
        }
        Self(out)
    }

    pub fn as_array(&self) -> &[f64; N] {
        &self.0
    }
}

impl<const N: usize> From<[f64; N]> for Vector<N> {
    fn from(a: [f64; N]) -> Self {
        Self(a)
    }
}

impl<const N: usize> Index<usize> for Vector<N> {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl<const N: usize> IndexMut<usize> for Vector<N> {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl<const N: usize> Add for Vector<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.zip_map(&rhs, |a, b| a + b)
    }
}

impl<const N: usize> AddAssign for Vector<N> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const N: usize> Sub for Vector<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.zip_map(&rhs, |a, b| a - b)
    }
}

impl<const N: usize> Neg for Vector<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|a| -a)
    }
}

impl<const N: usize> Mul<f64> for Vector<N> {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.map(|a| a * k)
    }
}

impl<const N: usize> Mul<Vector<N>> for f64 {
    type Output = Vector<N>;
    fn mul(self, v: Vector<N>) -> Vector<N> {
        v * self
    }
}

impl<const N: usize> Default for Matrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Matrix<N> {
    pub const fn new(rows: [[f64; N]; N]) -> Self {
        Self(rows)
    }

    pub const fn zeros() -> Self {
        Self([[0.0; N]; N])
    }

    pub fn identity() -> Self {
        Self::from_diagonal(&Vector::splat(1.0))
    }

    pub fn from_diagonal(d: &Vector<N>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = d[i];
        }
        m
    }

    pub fn diagonal(&self) -> Vector<N> {
        let mut d = Vector::zeros();
        for i in 0..N {
            d[i] = self.0[i][i];
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.0[j][i] = self.0[i][j];
            }
        }
        t
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_finite())
    }

    /// First entry pair whose asymmetry exceeds `tol` relative to the larger magnitude.
    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        for i in 0..N {
            for j in (i + 1)..N {
                let (a, b) = (self.0[i][j], self.0[j][i]);
                let scale = a.abs().max(b.abs()).max(1.0);
                if (a - b).abs() > tol * scale {
                    return Err(Error::Asymmetric { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// Lower-triangular Cholesky factor. Only the lower triangle of `self` is read.
    pub fn cholesky(&self) -> Result<Cholesky<N>> {
        let mut l = [[0.0; N]; N];
        for j in 0..N {
            let mut pivot = self.0[j][j];
            for k in 0..j {
                pivot -= l[j][k] * l[j][k];
            }
            if !(pivot > 0.0) {
                return Err(Error::NotPositiveDefinite { index: j, pivot });
            }
            let d = libm::sqrt(pivot);
            l[j][j] = d;
            for i in (j + 1)..N {
                let mut acc = self.0[i][j];
                for k in 0..j {
                    acc -= l[i][k] * l[j][k];
                }
                l[i][j] = acc / d;
            }
        }
        Ok(Cholesky { lower: l })
    }

    /// Quadratic form `yᵀ·self·y`.
    pub fn quadratic(&self, y: &Vector<N>) -> f64 {
        y.dot(&(*self * *y))
    }
}

impl<const N: usize> Index<(usize, usize)> for Matrix<N> {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Matrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Matrix<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..N {
            for j in 0..N {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl<const N: usize> Sub for Matrix<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs * -1.0
    }
}

impl<const N: usize> Mul<f64> for Matrix<N> {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self(self.0.map(|row| row.map(|x| x * k)))
    }
}

impl<const N: usize> Mul<Vector<N>> for Matrix<N> {
    type Output = Vector<N>;
    fn mul(self, v: Vector<N>) -> Vector<N> {
        mat_vec(&self, &v)
    }
}

/// Cholesky factorisation `A = L·Lᵀ`.
#[derive(Clone, Copy, Debug)]
pub struct Cholesky<const N: usize> {
    lower: [[f64; N]; N],
}

impl<const N: usize> Cholesky<N> {
    pub fn solve(&self, rhs: &Vector<N>) -> Vector<N> {
        let l = &self.lower;
        // L·y = rhs
        let mut y = [0.0; N];
        for i in 0..N {
            let mut acc = rhs[i];
            for k in 0..i {
                acc -= l[i][k] * y[k];
            }
            y[i] = acc / l[i][i];
        }
        // Lᵀ·x = y
        let mut x = [0.0; N];
        for i in (0..N).rev() {
            let mut acc = y[i];
            for k in (i + 1)..N {
                acc -= l[k][i] * x[k];
            }
            x[i] = acc / l[i][i];
        }
        Vector(x)
    }
}

pub fn mat_vec<const N: usize>(m: &Matrix<N>, v: &Vector<N>) -> Vector<N> {
    let mut out = [0.0; N];
    for (i, o) in out.iter_mut().enumerate() {
        *o = m.0[i].iter().zip(v.0.iter()).map(|(a, b)| a * b).sum();
    }
    Vector(out)
}

/// Solves `m·x = rhs` for symmetric positive definite `m`.
pub fn spd_solve<const N: usize>(m: &Matrix<N>, rhs: &Vector<N>) -> Result<Vector<N>> {
    Ok(m.cholesky()?.solve(rhs))
}

pub fn two_norm<const N: usize>(v: &Vector<N>) -> f64 {
    // Scaled accumulation keeps huge barrier-region values from overflowing.
    let scale = v.0.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = v.0.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * libm::sqrt(sum)
}

/// Positive definiteness test for a symmetric matrix.
///
/// Returns `Err(Asymmetric)` when `m` is not symmetric within [`SYMMETRY_TOL`].
pub fn is_spd<const N: usize>(m: &Matrix<N>) -> Result<bool> {
    m.check_symmetric(SYMMETRY_TOL)?;
    Ok(m.cholesky().is_ok())
}

/// Induced 2-norm of a diagonal matrix given by its diagonal.
pub fn diag_norm<const N: usize>(d: &Vector<N>) -> f64 {
    d.0.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}
