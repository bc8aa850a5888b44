//! Small fixed-size complex matrices and a Hermitian eigensolver.
//!
//! Everything here is sized at compile time (`N = 2` or `4` in practice),
//! so matrices live on the stack and the eigensolver is a plain cyclic
//! Jacobi sweep.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_traits::Zero;

use crate::scalar::{cx, re, Cx, Real};

/// Dense `N × N` complex matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<T, const N: usize>(pub [[Cx<T>; N]; N]);

pub type CMat2<T> = CMat<T, 2>;
pub type CMat4<T> = CMat<T, 4>;

impl<T: Real, const N: usize> CMat<T, N> {
    pub fn zeros() -> Self {
        CMat([[Cx::zero(); N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = re(T::one());
        }
        m
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> Cx<T>) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = f(i, j);
            }
        }
        m
    }

    pub fn from_real_diag(d: [T; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = re(d[i]);
        }
        m
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn outer(psi: &[Cx<T>; N]) -> Self {
        Self::from_fn(|i, j| psi[i] * psi[j].conj())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].conj())
    }

    pub fn conj(&self) -> Self {
        Self::from_fn(|i, j| self.0[i][j].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i])
    }

    pub fn trace(&self) -> Cx<T> {
        (0..N).fold(Cx::zero(), |acc, i| acc + self.0[i][i])
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn scale_re(&self, s: T) -> Self {
        Self::from_fn(|i, j| self.0[i][j] * s)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        *self * *other + *other * *self
    }

    /// `Re tr(self · other)`.
    pub fn expectation(&self, op: &Self) -> T {
        let mut acc = T::zero();
        for i in 0..N {
            for k in 0..N {
                acc += (self.0[i][k] * op.0[k][i]).re;
            }
        }
        acc
    }

    /// `⟨ψ|self|ψ⟩`.
    pub fn sandwich(&self, psi: &[Cx<T>; N]) -> Cx<T> {
        let mut acc = Cx::zero();
        for i in 0..N {
            for j in 0..N {
                acc += psi[i].conj() * self.0[i][j] * psi[j];
            }
        }
        acc
    }

    /// Largest elementwise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for i in 0..N {
            for j in 0..N {
                m = m.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        m
    }

    /// Largest elementwise modulus of `self - self†`.
    pub fn hermiticity_error(&self) -> T {
        self.max_abs_diff(&self.dagger())
    }

    pub fn frobenius_norm(&self) -> T {
        let mut acc = T::zero();
        for row in &self.0 {
            for z in row {
                acc += z.norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Writes real and imaginary parts row-major into `out` (`2 N²` entries).
    pub fn write_real(&self, out: &mut [T]) {
        debug_assert_eq!(out.len(), 2 * N * N);
        for i in 0..N {
            for j in 0..N {
                let k = 2 * (i * N + j);
                out[k] = self.0[i][j].re;
                out[k + 1] = self.0[i][j].im;
            }
        }
    }

    pub fn read_real(data: &[T]) -> Self {
        debug_assert_eq!(data.len(), 2 * N * N);
        Self::from_fn(|i, j| {
            let k = 2 * (i * N + j);
            cx(data[k], data[k + 1])
        })
    }

    /// Eigen-decomposition of a Hermitian matrix.
    ///
    /// Only the Hermitian part `(A + A†)/2` is used. Eigenvalues come back in
    /// ascending order; column `k` of `vectors` is the eigenvector for
    /// `values[k]`.
    pub fn hermitian_eigen(&self) -> HermitianEigen<T, N> {
        let half = T::lit(0.5);
        let mut a = Self::from_fn(|i, j| (self.0[i][j] + self.0[j][i].conj()) * half);
        let mut v = Self::identity();
        let scale = a.frobenius_norm().max(T::min_positive_value());
        let eps = T::epsilon();

        for _sweep in 0..64 {
            let mut off = T::zero();
            for p in 0..N {
                for q in (p + 1)..N {
                    off += a.0[p][q].norm_sqr();
                }
            }
            if off.sqrt() <= eps * scale {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    let apq = a.0[p][q];
                    let mag = apq.norm();
                    if mag <= eps * eps * scale {
                        continue;
                    }
                    let phase = apq / mag;
                    let app = a.0[p][p].re;
                    let aqq = a.0[q][q].re;
                    let tau = (aqq - app) / (mag + mag);
                    let sgn = if tau >= T::zero() { T::one() } else { -T::one() };
                    let t = sgn / (tau.abs() + (T::one() + tau * tau).sqrt());
                    let c = T::one() / (T::one() + t * t).sqrt();
                    let s = t * c;
                    // Rotation J restricted to (p, q):
                    //   [[c, s], [-s·e^{-iθ}, c·e^{-iθ}]],  e^{iθ} = apq/|apq|
                    let jpp = re(c);
                    let jpq = re(s);
                    let jqp = -phase.conj() * s;
                    let jqq = phase.conj() * c;
                    // A ← A J
                    for k in 0..N {
                        let akp = a.0[k][p];
                        let akq = a.0[k][q];
                        a.0[k][p] = akp * jpp + akq * jqp;
                        a.0[k][q] = akp * jpq + akq * jqq;
                    }
                    // A ← J† A
                    for k in 0..N {
                        let apk = a.0[p][k];
                        let aqk = a.0[q][k];
                        a.0[p][k] = jpp.conj() * apk + jqp.conj() * aqk;
                        a.0[q][k] = jpq.conj() * apk + jqq.conj() * aqk;
                    }
                    a.0[p][q] = Cx::zero();
                    a.0[q][p] = Cx::zero();
                    // V ← V J
                    for k in 0..N {
                        let vkp = v.0[k][p];
                        let vkq = v.0[k][q];
                        v.0[k][p] = vkp * jpp + vkq * jqp;
                        v.0[k][q] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }

        let mut order: [usize; N] = [0; N];
        for (i, o) in order.iter_mut().enumerate() {
            *o = i;
        }
        order.sort_by(|&i, &j| {
            a.0[i][i]
                .re
                .partial_cmp(&a.0[j][j].re)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut values = [T::zero(); N];
        let mut vectors = Self::zeros();
        for (k, &src) in order.iter().enumerate() {
            values[k] = a.0[src][src].re;
            for r in 0..N {
                vectors.0[r][k] = v.0[r][src];
            }
        }
        HermitianEigen { values, vectors }
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> T {
        self.hermitian_eigen().values[0]
    }

    /// Principal square root of a positive semidefinite Hermitian matrix.
    /// Negative eigenvalues are clamped to zero.
    pub fn psd_sqrt(&self) -> Self {
        let eig = self.hermitian_eigen();
        let roots = eig.values.map(|x| x.max(T::zero()).sqrt());
        eig.reconstruct_with(&roots)
    }
}

/// Result of [`CMat::hermitian_eigen`].
#[derive(Clone, Copy, Debug)]
pub struct HermitianEigen<T, const N: usize> {
    pub values: [T; N],
    pub vectors: CMat<T, N>,
}

impl<T: Real, const N: usize> HermitianEigen<T, N> {
    /// `V diag(f) V†`.
    pub fn reconstruct_with(&self, diag: &[T; N]) -> CMat<T, N> {
        let v = &self.vectors;
        CMat::from_fn(|i, j| {
            let mut acc = Cx::zero();
            for k in 0..N {
                acc += v.0[i][k] * v.0[j][k].conj() * diag[k];
            }
            acc
        })
    }
}

impl<T: Real, const N: usize> Index<(usize, usize)> for CMat<T, N> {
    type Output = Cx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cx<T> {
        &self.0[i][j]
    }
}

impl<T: Real, const N: usize> IndexMut<(usize, usize)> for CMat<T, N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx<T> {
        &mut self.0[i][j]
    }
}

impl<T: Real, const N: usize> Add for CMat<T, N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] + rhs.0[i][j])
    }
}

impl<T: Real, const N: usize> Sub for CMat<T, N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::from_fn(|i, j| self.0[i][j] - rhs.0[i][j])
    }
}

impl<T: Real, const N: usize> Neg for CMat<T, N> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::from_fn(|i, j| -self.0[i][j])
    }
}

impl<T: Real, const N: usize> Mul for CMat<T, N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..N {
                    out.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        out
    }
}

/// Kronecker product of two single-qubit operators; the left factor acts on
/// qubit 1 (the most significant bit of the basis index).
pub fn kron2<T: Real>(a: &CMat2<T>, b: &CMat2<T>) -> CMat4<T> {
    CMat::from_fn(|i, j| a.0[i / 2][j / 2] * b.0[i % 2][j % 2])
}

/// Single-qubit Pauli operators in the computational basis `(|0⟩, |1⟩)`.
pub mod pauli {
    use super::*;

    pub fn i<T: Real>() -> CMat2<T> {
        CMat::identity()
    }

    pub fn x<T: Real>() -> CMat2<T> {
        let o = T::one();
        let z = T::zero();
        CMat([[re(z), re(o)], [re(o), re(z)]])
    }

    pub fn y<T: Real>() -> CMat2<T> {
        let o = T::one();
        let z = T::zero();
        CMat([[re(z), cx(z, -o)], [cx(z, o), re(z)]])
    }

    pub fn z<T: Real>() -> CMat2<T> {
        CMat::from_real_diag([T::one(), -T::one()])
    }

    /// Lowering operator `|0⟩⟨1|`.
    pub fn lower<T: Real>() -> CMat2<T> {
        let mut m = CMat::zeros();
        m.0[0][1] = re(T::one());
        m
    }
}
