//! All-roots solver for real monic polynomials.
//!
//! Degrees up to two use closed forms; everything else goes through
//! Aberth-Ehrlich simultaneous iteration started on a perturbed circle, and
//! every returned root is certified by a compensated-Horner residual.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAX_ITER: usize = 500;

/// Backward-error threshold for certification: `1e-12` in double precision,
/// a small multiple of machine epsilon for narrower types.
fn certify_tol<T: Scalar>() -> T {
    T::lit(1e-12).max(T::lit(64.0) * T::epsilon())
}

/// Roots of the monic polynomial with ascending coefficients `coeffs`
/// (`coeffs.last() == 1`), sorted by real part, then imaginary part.
pub fn poly_roots<T: Scalar>(coeffs: &[T]) -> Result<Vec<Complex<T>>> {
    let Some(&lead) = coeffs.last() else {
        return Err(Error::NotMonic);
    };
    if lead != T::one() {
        return Err(Error::NotMonic);
    }

    // Exact zero roots come off first; Aberth only converges linearly on
    // multiple roots and zero is the common one here.
    let zeros = coeffs.iter().take_while(|c| **c == T::zero()).count();
    let reduced = &coeffs[zeros..];
    let mut roots = vec![Complex::new(T::zero(), T::zero()); zeros];

    let degree = reduced.len() - 1;
    match degree {
        0 => {}
        1 => roots.push(Complex::new(-reduced[0], T::zero())),
        2 => roots.extend(quadratic(reduced[1], reduced[0])),
        _ => roots.extend(aberth(reduced)?),
    }
    sort_roots(&mut roots);
    Ok(roots)
}

/// Roots of `x^2 + b x + c` without cancellation.
fn quadratic<T: Scalar>(b: T, c: T) -> [Complex<T>; 2] {
    let half = T::lit(0.5);
    let disc = b * b - T::lit(4.0) * c;
    if disc >= T::zero() {
        let sq = disc.sqrt();
        let q = -half * (b + b.signum() * sq);
        if q == T::zero() {
            let z = Complex::new(T::zero(), T::zero());
            return [z, z];
        }
        let (r1, r2) = (q, c / q);
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        [Complex::new(lo, T::zero()), Complex::new(hi, T::zero())]
    } else {
        let re = -half * b;
        let im = half * (-disc).sqrt();
        [Complex::new(re, -im), Complex::new(re, im)]
    }
}

/// Value and derivative of the polynomial at `z`, plus `sum |a_k| |z|^k`.
fn horner_with_derivative<T: Scalar>(coeffs: &[T], z: Complex<T>) -> (Complex<T>, Complex<T>, T) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut p = zero;
    let mut dp = zero;
    let mut scale = T::zero();
    let r = z.norm();
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        scale = scale * r + c.abs();
    }
    (p, dp, scale)
}

fn two_sum<T: Scalar>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn two_prod<T: Scalar>(a: T, b: T) -> (T, T) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Compensated Horner evaluation at a complex point; the real and imaginary
/// parts each carry a running error term.
pub(crate) fn compensated_horner<T: Scalar>(coeffs: &[T], z: Complex<T>) -> Complex<T> {
    let (mut re, mut im) = (T::zero(), T::zero());
    let (mut ce, mut ci) = (T::zero(), T::zero());
    for &c in coeffs.iter().rev() {
        // (re + i im) * (zr + i zi) + c, each product error-free.
        let (a, ea) = two_prod(re, z.re);
        let (b, eb) = two_prod(im, z.im);
        let (d, ed) = two_prod(re, z.im);
        let (e, ee) = two_prod(im, z.re);
        let (nre, s1) = two_sum(a, -b);
        let (nre, s2) = two_sum(nre, c);
        let (nim, s3) = two_sum(d, e);
        let nce = ce * z.re - ci * z.im + ea - eb + s1 + s2;
        let nci = ce * z.im + ci * z.re + ed + ee + s3;
        re = nre;
        im = nim;
        ce = nce;
        ci = nci;
    }
    Complex::new(re + ce, im + ci)
}

/// Relative backward error of `z` as a root: `|p(z)| / sum |a_k| |z|^k`.
pub fn backward_error<T: Scalar>(coeffs: &[T], z: Complex<T>) -> T {
    let value = compensated_horner(coeffs, z).norm();
    let r = z.norm();
    let scale = coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.abs());
    if scale == T::zero() {
        value
    } else {
        value / scale
    }
}

fn aberth<T: Scalar>(coeffs: &[T]) -> Result<Vec<Complex<T>>> {
    let n = coeffs.len() - 1;
    let tol = certify_tol::<T>();

    // Initial radius from the Fujiwara-type bound max |a_k|^(1/(n-k)).
    let mut radius = T::zero();
    for (k, c) in coeffs[..n].iter().enumerate() {
        if *c != T::zero() {
            radius = radius.max(c.abs().powf(T::one() / T::from_usize_exact(n - k)));
        }
    }
    let centre = -coeffs[n - 1] / T::from_usize_exact(n);
    if radius == T::zero() {
        radius = T::one();
    }
    let tau = T::TAU();
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let theta = tau * (T::from_usize_exact(k) + T::lit(0.25)) / T::from_usize_exact(n)
                + T::lit(0.4);
            Complex::new(centre, T::zero()) + Complex::from_polar(radius, theta)
        })
        .collect();

    let mut converged = vec![false; n];
    for iter in 0..MAX_ITER {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (p, dp, scale) = horner_with_derivative(coeffs, z[i]);
            if p.norm() == T::zero() {
                converged[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = Complex::new(T::zero(), T::zero());
            for k in 0..n {
                if k != i {
                    let diff = z[i] - z[k];
                    if diff.norm() > T::zero() {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - ratio * repulsion;
            let step = if denom.norm() == T::zero() || !denom.norm().is_finite() {
                ratio
            } else {
                ratio / denom
            };
            z[i] -= step;
            let small = step.norm() <= T::epsilon() * T::lit(4.0) * z[i].norm().max(T::one());
            if small || p.norm() <= T::epsilon() * T::lit(2.0) * scale {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all && iter > 0 {
            break;
        }
    }

    let worst = z
        .iter()
        .map(|&zi| backward_error(coeffs, zi))
        .fold(T::zero(), |a, b| a.max(b));
    if !(worst <= tol) {
        return Err(Error::NoConvergence {
            iterations: MAX_ITER,
            residual: worst.as_f64(),
            best: z.iter().map(|c| (c.re.as_f64(), c.im.as_f64())).collect(),
        });
    }
    Ok(z)
}

/// Ascending by real part, then imaginary part.
pub(crate) fn sort_roots<T: Scalar>(roots: &mut [Complex<T>]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}
