//! The self-dual tridiagonal chain Hamiltonian and its secular polynomial.
//!
//! `H` has diagonal `-(N-1), -(N-3), ..., N-1`, superdiagonal
//! `g_1, g_2, ..., g_2, g_1` and subdiagonal equal to minus the superdiagonal.
//! Its characteristic polynomial only contains `E^2` (times `E` for odd `N`),
//! so with `s = E^2` the spectrum is governed by a degree-`J` polynomial
//!
//! ```text
//! s^J - C(J,1) P s^(J-1) + C(J,2) Q s^(J-2) - C(J,3) R s^(J-3) + ... = 0
//! ```
//!
//! whose normalized coefficients `P, Q, R, S, T` are what the membership
//! criteria work with.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::landmarks::spikes;
use crate::scalar::{binomial, max_abs, Scalar};

/// A member of the chain family: dimension `N` and couplings `g_1..g_J`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec<T> {
    dim: usize,
    couplings: Vec<T>,
}

impl<T: Scalar> ChainSpec<T> {
    pub fn new(dim: usize, couplings: Vec<T>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let expected = dim / 2;
        if couplings.len() != expected {
            return Err(Error::CouplingLength {
                dim,
                expected,
                got: couplings.len(),
            });
        }
        if let Some(index) = couplings.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteCoupling { index: index + 1 });
        }
        Ok(Self { dim, couplings })
    }

    /// All couplings zero.
    pub fn decoupled(dim: usize) -> Result<Self> {
        Self::new(dim, vec![T::zero(); dim / 2])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of independent couplings, `floor(N / 2)`.
    pub fn j(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[T] {
        &self.couplings
    }

    /// Coupling on the bond between sites `i` and `i + 1` (0-based).
    fn bond(&self, i: usize) -> T {
        let n = (i + 1).min(self.dim - 1 - i);
        self.couplings[n - 1]
    }

    fn diagonal(&self, i: usize) -> T {
        T::from_usize_exact(2 * i) - T::from_usize_exact(self.dim - 1)
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseMatrix<T> {
    pub order: usize,
    pub entries: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn get(&self, row: usize, col: usize) -> T {
        self.entries[row * self.order + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.entries.chunks(self.order)
    }
}

pub fn build<T: Scalar>(spec: &ChainSpec<T>) -> DenseMatrix<T> {
    let n = spec.dim;
    let mut entries = vec![T::zero(); n * n];
    for i in 0..n {
        entries[i * n + i] = spec.diagonal(i);
    }
    for i in 0..n - 1 {
        let g = spec.bond(i);
        entries[i * n + i + 1] = g;
        entries[(i + 1) * n + i] = -g;
    }
    DenseMatrix { order: n, entries }
}

/// Normalized secular coefficients plus the raw characteristic polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecularForm<T> {
    pub dim: usize,
    pub j: usize,
    /// `P, Q, R, S, T` truncated to length `J`.
    pub coeffs: Vec<T>,
    /// Monic `det(E - H)` coefficients, ascending powers of `E`, length `N + 1`.
    pub raw_char: Vec<T>,
    /// Rounding-error bound of each entry of `coeffs`.
    pub coeff_err: Vec<T>,
}

pub const COEFF_NAMES: [&str; 5] = ["P", "Q", "R", "S", "T"];

impl<T: Scalar> SecularForm<T> {
    /// Secular form with the given `P, Q, ...` prefix; `raw_char` is that of
    /// an even-dimensional chain (`N = 2J`).
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        let j = coeffs.len();
        let mut form = Self {
            dim: 2 * j,
            j,
            coeff_err: vec![T::zero(); j],
            coeffs,
            raw_char: Vec::new(),
        };
        let s = form.s_poly();
        let mut raw = vec![T::zero(); 2 * j + 1];
        for (k, c) in s.into_iter().enumerate() {
            raw[2 * k] = c;
        }
        form.raw_char = raw;
        form
    }

    /// Coefficient `m` (0 = `P`) or zero beyond `J`.
    pub fn coeff(&self, m: usize) -> T {
        self.coeffs.get(m).copied().unwrap_or_else(T::zero)
    }

    pub fn p(&self) -> T {
        self.coeff(0)
    }
    pub fn q(&self) -> T {
        self.coeff(1)
    }
    pub fn r(&self) -> T {
        self.coeff(2)
    }
    pub fn s(&self) -> T {
        self.coeff(3)
    }
    pub fn t(&self) -> T {
        self.coeff(4)
    }

    /// Monic secular polynomial in `s`, ascending powers (length `J + 1`).
    pub fn s_poly(&self) -> Vec<T> {
        let j = self.j;
        let mut out = vec![T::zero(); j + 1];
        out[j] = T::one();
        for (m, &c) in self.coeffs.iter().enumerate() {
            let m1 = m + 1;
            let sign = if m1 % 2 == 0 { T::one() } else { -T::one() };
            out[j - m1] = sign * binomial::<T>(j, m1) * c;
        }
        out
    }

    /// Evaluates the secular polynomial at a complex `s`.
    pub fn eval_s(&self, s: Complex<T>) -> Complex<T> {
        self.s_poly()
            .iter()
            .rev()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * s + c)
    }
}

/// Computes the secular form by the three-term determinant recurrence.
///
/// `D_k = (d_k - E) D_{k-1} + g^2 D_{k-2}`; the result is multiplied by
/// `(-1)^N` to make it monic. For odd `N` the vanishing constant term is
/// dropped (the exact `E = 0` level). Coefficients that lie within their
/// accumulated rounding bound are flushed to zero.
pub fn secular_form<T: Scalar>(spec: &ChainSpec<T>) -> Result<SecularForm<T>> {
    let n = spec.dim;
    let j = spec.j();

    // Ascending coefficients in E, plus a parallel recurrence on magnitudes
    // that bounds the rounding error of each coefficient.
    let mut prev2 = vec![T::one()];
    let mut prev2_mag = vec![T::one()];
    let d0 = spec.diagonal(0);
    let mut prev = vec![d0, -T::one()];
    let mut prev_mag = vec![d0.abs(), T::one()];

    for k in 1..n {
        let d = spec.diagonal(k);
        let g = spec.bond(k - 1);
        let g2 = g * g;
        let mut next = vec![T::zero(); k + 2];
        let mut next_mag = vec![T::zero(); k + 2];
        for (i, (&c, &m)) in prev.iter().zip(&prev_mag).enumerate() {
            next[i] += d * c;
            next[i + 1] -= c;
            next_mag[i] += d.abs() * m;
            next_mag[i + 1] += m;
        }
        for (i, (&c, &m)) in prev2.iter().zip(&prev2_mag).enumerate() {
            next[i] += g2 * c;
            next_mag[i] += g2 * m;
        }
        prev2 = std::mem::replace(&mut prev, next);
        prev2_mag = std::mem::replace(&mut prev_mag, next_mag);
    }

    if n % 2 == 1 {
        for c in prev.iter_mut() {
            *c = -*c;
        }
    }
    let raw_char = prev;
    let unit = T::lit(4.0) * T::from_usize_exact(n) * T::epsilon();
    let raw_err: Vec<T> = prev_mag.iter().map(|&m| unit * m).collect();

    // Coefficient of s^k in the reduced polynomial sits at E^(2k) or E^(2k+1).
    let offset = n % 2;
    if offset == 1 {
        let c0 = raw_char[0];
        let scale = max_abs(T::one(), &raw_char);
        if c0.abs() > raw_err[0].max(T::lit(1e-9) * scale) {
            return Err(Error::OddConstantTerm {
                dim: n,
                value: c0.as_f64(),
            });
        }
    }

    let mut coeffs = Vec::with_capacity(j);
    let mut coeff_err = Vec::with_capacity(j);
    for m in 1..=j {
        let idx = 2 * (j - m) + offset;
        let norm = binomial::<T>(j, m);
        let sign = if m % 2 == 0 { T::one() } else { -T::one() };
        let err = raw_err[idx] / norm;
        let mut c = sign * raw_char[idx] / norm;
        if c.abs() <= err {
            c = T::zero();
        }
        coeffs.push(c);
        coeff_err.push(err);
    }

    Ok(SecularForm {
        dim: n,
        j,
        coeffs,
        raw_char,
        coeff_err,
    })
}

/// Rescaled couplings `gamma_k = 1 - g_k^2 / (g_k^spike)^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaVector<T>(pub Vec<T>);

pub fn reparametrize<T: Scalar>(spec: &ChainSpec<T>) -> GammaVector<T> {
    let spike = spikes::<T>(spec.dim);
    GammaVector(
        spec.couplings
            .iter()
            .zip(&spike)
            .map(|(&g, &s)| T::one() - (g * g) / (s * s))
            .collect(),
    )
}

/// Inverse of [`reparametrize`] on the positive quadrant.
pub fn from_gamma<T: Scalar>(dim: usize, gammas: &GammaVector<T>) -> Result<ChainSpec<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let spike = spikes::<T>(dim);
    if gammas.0.len() != spike.len() {
        return Err(Error::CouplingLength {
            dim,
            expected: spike.len(),
            got: gammas.0.len(),
        });
    }
    let mut couplings = Vec::with_capacity(spike.len());
    for (k, (&gamma, &s)) in gammas.0.iter().zip(&spike).enumerate() {
        if gamma > T::one() || gamma.is_nan() {
            return Err(Error::ImaginaryCoupling {
                index: k + 1,
                gamma: gamma.as_f64(),
            });
        }
        couplings.push(s * (T::one() - gamma).sqrt());
    }
    ChainSpec::new(dim, couplings)
}

/// Eigenvalues of the 2x2 matrix `[[a, b], [+-b, d]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoByTwo<T> {
    /// `E_-`, `E_+`.
    pub energies: [Complex<T>; 2],
    /// The radicand: `(a-d)^2 + 4b^2` (Hermitian) or `(a-d)^2 - 4b^2`
    /// (antisymmetric off-diagonal). Negative means a complex pair.
    pub discriminant: T,
}

pub fn two_by_two<T: Scalar>(a: T, b: T, d: T, antisymmetric: bool) -> TwoByTwo<T> {
    let four = T::lit(4.0);
    let half = T::lit(0.5);
    let diff = a - d;
    let discriminant = if antisymmetric {
        diff * diff - four * b * b
    } else {
        diff * diff + four * b * b
    };
    let root = Complex::new(discriminant, T::zero()).sqrt();
    let mean = Complex::new(a + d, T::zero());
    TwoByTwo {
        energies: [(mean - root) * half, (mean + root) * half],
        discriminant,
    }
}
