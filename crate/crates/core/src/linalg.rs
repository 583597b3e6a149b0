//! Small dense complex matrices and the Hermitian positive definite
//! Cholesky factorization used for every log-det in the crate.
//!
//! Receive arrays here are tiny (a handful of antennas), so the types are
//! plain row-major buffers rather than a linear algebra dependency.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn scale(&mut self, s: T) {
        for v in &mut self.data {
            *v = Complex::new(v.re * s, v.im * s);
        }
    }

    /// y = A x.
    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![Complex::new(T::zero(), T::zero()); self.rows];
        self.mul_vec_acc(x, Complex::new(T::one(), T::zero()), &mut y);
        y
    }

    /// y += w · A x.
    pub fn mul_vec_acc(&self, x: &[Complex<T>], w: Complex<T>, y: &mut [Complex<T>]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (i, out) in y.iter_mut().enumerate() {
            let mut acc = Complex::new(T::zero(), T::zero());
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (a, b) in row.iter().zip(x.iter()) {
                acc = acc + a * b;
            }
            *out = *out + w * acc;
        }
    }

    /// self += scale · H H† (self must be square with side = H.rows).
    pub fn add_scaled_gram(&mut self, h: &CMatrix<T>, scale: T) {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, h.rows);
        let n = self.rows;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for m in 0..h.cols {
                    acc = acc + h.get(i, m) * h.get(j, m).conj();
                }
                let cur = self.get(i, j);
                self.set(i, j, cur + Complex::new(acc.re * scale, acc.im * scale));
            }
        }
    }

    pub fn add_identity(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            let v = self.get(i, i);
            self.set(i, i, Complex::new(v.re + T::one(), v.im));
        }
    }

    /// Cholesky factorization A = L L† of a Hermitian positive definite
    /// matrix; fails on a non-positive pivot.
    pub fn cholesky(&self) -> Result<Cholesky<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut l = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for m in 0..j {
                    sum = sum - l[i * n + m] * l[j * n + m].conj();
                }
                if i == j {
                    if !(sum.re > T::zero()) {
                        return Err(Error::Numerical(format!(
                            "cholesky: non-positive pivot {} at {}",
                            sum.re, i
                        )));
                    }
                    l[i * n + i] = Complex::new(sum.re.sqrt(), T::zero());
                } else {
                    let d = l[j * n + j].re;
                    l[i * n + j] = Complex::new(sum.re / d, sum.im / d);
                }
            }
        }
        Ok(Cholesky { n, l })
    }
}

/// Lower triangular Cholesky factor of a Hermitian PD matrix.
#[derive(Clone, Debug)]
pub struct Cholesky<T = f64> {
    n: usize,
    l: Vec<Complex<T>>,
}

impl<T: Scalar> Cholesky<T> {
    /// ln det A = 2 Σ ln L_ii.
    pub fn log_det(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            acc = acc + self.l[i * self.n + i].re.ln();
        }
        acc + acc
    }

    /// det A = (Π L_ii)².
    pub fn det(&self) -> T {
        let mut p = T::one();
        for i in 0..self.n {
            p = p * self.l[i * self.n + i].re;
        }
        p * p
    }

    /// Solve L w = v by forward substitution.
    pub fn solve_lower(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.n);
        let mut w = v.to_vec();
        for i in 0..self.n {
            for j in 0..i {
                let lij = self.l[i * self.n + j];
                w[i] = w[i] - lij * w[j];
            }
            let d = self.l[i * self.n + i].re;
            w[i] = Complex::new(w[i].re / d, w[i].im / d);
        }
        w
    }

    /// v† A⁻¹ v = ‖L⁻¹ v‖², real and nonnegative.
    pub fn inv_quad_form(&self, v: &[Complex<T>]) -> T {
        norm_sq(&self.solve_lower(v))
    }
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sq<T: Scalar>(v: &[Complex<T>]) -> T {
    let mut acc = T::zero();
    for z in v {
        acc = acc + z.re * z.re + z.im * z.im;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Complex as NaComplex, DMatrix};
    use rand::SeedableRng;

    fn to_na(m: &CMatrix<f64>) -> DMatrix<NaComplex<f64>> {
        DMatrix::from_fn(m.rows(), m.cols(), |i, j| {
            let z = m.get(i, j);
            NaComplex::new(z.re, z.im)
        })
    }

    fn random_pd(n: usize, users: usize, rng: &mut rand_chacha::ChaCha12Rng) -> CMatrix<f64> {
        let mut g = CMatrix::<f64>::zeros(n, n);
        for _ in 0..users {
            let h = crate::rng::sample_complex_gaussian_with(rng, n, 1, 1.0).unwrap();
            g.add_scaled_gram(&h, 0.7);
        }
        g.add_identity();
        g
    }

    #[test]
    fn logdet_matches_eigenvalue_oracle() {
        // ln det(I + G) against nalgebra's Hermitian eigendecomposition.
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for trial in 0..100 {
            let n = 1 + trial % 5;
            let m = random_pd(n, 3, &mut rng);
            let ld = m.cholesky().unwrap().log_det();
            let eig = to_na(&m).symmetric_eigen();
            let oracle: f64 = eig.eigenvalues.iter().map(|l| l.ln()).sum();
            assert!(
                (ld - oracle).abs() <= 1e-10 * oracle.abs().max(1.0),
                "trial {trial}: {ld} vs {oracle}"
            );
        }
    }

    #[test]
    fn det_matches_nalgebra() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_pd(3, 2, &mut rng);
            let d = m.cholesky().unwrap().det();
            let oracle = to_na(&m).determinant();
            assert!((d - oracle.re).abs() <= 1e-9 * oracle.re.abs());
            assert!(oracle.im.abs() < 1e-9);
        }
    }

    #[test]
    fn identity_logdet_is_exactly_zero() {
        let m = CMatrix::<f64>::identity(4);
        assert_eq!(m.cholesky().unwrap().log_det(), 0.0);
        assert_eq!(m.cholesky().unwrap().det(), 1.0);
    }

    #[test]
    fn quad_form_matches_explicit_inverse() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let m = random_pd(4, 3, &mut rng);
            let v: Vec<_> = (0..4)
                .map(|_| crate::scalar::complex_gaussian::<f64, _>(&mut rng, 1.0))
                .collect();
            let q = m.cholesky().unwrap().inv_quad_form(&v);
            let na = to_na(&m);
            let inv = na.clone().try_inverse().unwrap();
            let vv = nalgebra::DVector::from_fn(4, |i, _| NaComplex::new(v[i].re, v[i].im));
            let oracle = (vv.adjoint() * inv * &vv)[(0, 0)];
            assert!((q - oracle.re).abs() <= 1e-10 * oracle.re.abs().max(1.0));
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut m = CMatrix::<f64>::zeros(2, 2);
        m.set(0, 0, Complex::new(-1.0, 0.0));
        m.set(1, 1, Complex::new(1.0, 0.0));
        assert!(m.cholesky().is_err());
    }

    #[test]
    fn f32_lane_close_to_f64() {
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        let m64 = random_pd(3, 2, &mut rng);
        let m32 = CMatrix::<f32>::from_fn(3, 3, |i, j| {
            let z = m64.get(i, j);
            Complex::new(z.re as f32, z.im as f32)
        });
        let a = m64.cholesky().unwrap().log_det();
        let b = m32.cholesky().unwrap().log_det() as f64;
        assert!((a - b).abs() < 1e-3);
    }
}
