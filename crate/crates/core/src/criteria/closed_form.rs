//! Closed-form real roots of the critical-point polynomials.
//!
//! Both solvers assume the caller has already established that all roots are
//! real (through the inequality chains); tiny negative discriminants from
//! rounding are clamped rather than turned into complex pairs.

use crate::scalar::Scalar;

/// Evaluates `x^n + a_{n-1} x^{n-1} + ... + a_0` given ascending `coeffs`
/// without the leading one, together with its derivative.
fn monic_eval<T: Scalar>(coeffs: &[T], x: T) -> (T, T) {
    let mut p = T::one();
    let mut dp = T::zero();
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// One Newton step, kept only when it lowers the residual.
fn polish<T: Scalar>(coeffs: &[T], x: T) -> T {
    let (p, dp) = monic_eval(coeffs, x);
    if dp == T::zero() || !dp.is_finite() {
        return x;
    }
    let candidate = x - p / dp;
    let (pc, _) = monic_eval(coeffs, candidate);
    if pc.abs() < p.abs() {
        candidate
    } else {
        x
    }
}

fn sort3<T: Scalar>(mut r: [T; 3]) -> [T; 3] {
    r.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    r
}

/// Roots of `x^3 - 3a x^2 + 3b x - c`, assumed all real, ascending.
///
/// With `x = a + u` the cubic becomes `u^3 - 3B u + k` where `B = a^2 - b`;
/// the trigonometric form `u = 2 sqrt(B) cos(theta)` then gives all three.
pub fn cubic_real_roots<T: Scalar>(a: T, b: T, c: T) -> [T; 3] {
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    let big_b = a * a - b;
    let k = three * a * b - two * a * a * a - c;
    let coeffs = [-c, three * b, -three * a];

    let roots = if big_b <= T::zero() {
        // Total confluence; the depressed cubic is u^3 + k with k ~ 0.
        let u = (-k).cbrt();
        [a + u, a + u, a + u]
    } else {
        let sb = big_b.sqrt();
        let cos3 = (-k / (two * big_b * sb)).max(-T::one()).min(T::one());
        let phi = cos3.acos() / three;
        let shift = T::TAU() / three;
        [
            a + two * sb * phi.cos(),
            a + two * sb * (phi - shift).cos(),
            a + two * sb * (phi + shift).cos(),
        ]
    };
    sort3(roots.map(|x| polish(&coeffs, x)))
}

/// Largest real root of the monic cubic `x^3 + p2 x^2 + p1 x + p0`.
fn cubic_max_real_root<T: Scalar>(p2: T, p1: T, p0: T) -> T {
    let three = T::lit(3.0);
    let two = T::lit(2.0);
    let shift = p2 / three;
    let p = p1 - p2 * p2 / three;
    let q = two * p2 * p2 * p2 / T::lit(27.0) - p2 * p1 / three + p0;
    let disc = q * q / T::lit(4.0) + p * p * p / T::lit(27.0);
    let t = if disc > T::zero() {
        let sq = disc.sqrt();
        (-q / two + sq).cbrt() + (-q / two - sq).cbrt()
    } else if p < T::zero() {
        let m = two * (-p / three).sqrt();
        let arg = (three * q / (p * m)).max(-T::one()).min(T::one());
        m * (arg.acos() / three).cos()
    } else {
        (-q).cbrt()
    };
    let x = t - shift;
    polish(&[p0, p1, p2], x)
}

/// Roots of `x^4 - 4a x^3 + 6b x^2 - 4c x + d`, assumed all real, ascending.
///
/// Ferrari's method through the resolvent cubic, followed by one Newton
/// polish per root on the original quartic.
pub fn quartic_real_roots<T: Scalar>(a: T, b: T, c: T, d: T) -> [T; 4] {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let six = T::lit(6.0);
    let eight = T::lit(8.0);
    let half = T::lit(0.5);

    // x = a + u: u^4 + alpha u^2 + beta u + gamma.
    let alpha = six * (b - a * a);
    let beta = -four * (c - three * a * b + two * a * a * a);
    let gamma = d - four * a * c + six * a * a * b - three * a * a * a * a;

    let clamp_sqrt = |v: T| v.max(T::zero()).sqrt();
    let mut u = [T::zero(); 4];
    let scale = alpha.abs().max(beta.abs().powf(T::lit(2.0 / 3.0))).max(gamma.abs().sqrt());
    if beta.abs() <= T::epsilon() * T::lit(16.0) * scale.powf(T::lit(1.5)) {
        // Biquadratic.
        let disc = clamp_sqrt(alpha * alpha - four * gamma);
        let z1 = (-alpha - disc) * half;
        let z2 = (-alpha + disc) * half;
        let (r1, r2) = (clamp_sqrt(z1), clamp_sqrt(z2));
        u = [-r2, -r1, r1, r2];
    } else {
        // 8m^3 + 8 alpha m^2 + (2 alpha^2 - 8 gamma) m - beta^2 = 0, m > 0.
        let m = cubic_max_real_root(
            alpha,
            (two * alpha * alpha - eight * gamma) / eight,
            -beta * beta / eight,
        )
        .max(T::epsilon());
        let s = (two * m).sqrt();
        let t = beta / (two * s);
        // u^2 + s u + (alpha/2 + m - t) and u^2 - s u + (alpha/2 + m + t)
        let c1 = alpha * half + m - t;
        let c2 = alpha * half + m + t;
        let d1 = clamp_sqrt(s * s - four * c1);
        let d2 = clamp_sqrt(s * s - four * c2);
        u[0] = (-s - d1) * half;
        u[1] = (-s + d1) * half;
        u[2] = (s - d2) * half;
        u[3] = (s + d2) * half;
    }
    let coeffs = [d, -four * c, six * b, -four * a];
    let mut roots = u.map(|ui| polish(&coeffs, a + ui));
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "got {got:?}, want {want:?}");
        }
    }

    #[test]
    fn perfect_cube() {
        assert_close(&cubic_real_roots(1.0, 1.0, 1.0), &[1.0, 1.0, 1.0], 1e-12);
    }

    #[test]
    fn constructed_cubic() {
        // x(x - 2)(x - 4) = x^3 - 6x^2 + 8x
        assert_close(&cubic_real_roots(2.0, 8.0 / 3.0, 0.0), &[0.0, 2.0, 4.0], 1e-12);
    }

    #[test]
    fn generic_cubic() {
        // (x-1)(x-3)(x-7): sum 11, pairs 31, product 21
        let r = cubic_real_roots(11.0 / 3.0, 31.0 / 3.0, 21.0);
        assert_close(&r, &[1.0, 3.0, 7.0], 1e-12);
    }

    #[test]
    fn quartic_generic() {
        // (x-1)(x-2)(x-5)(x-9): e1 = 17, e2 = 2+5+9+10+18+45 = 89,
        // e3 = 10+18+45+90 = 163, e4 = 90
        let r = quartic_real_roots(17.0 / 4.0, 89.0 / 6.0, 163.0 / 4.0, 90.0);
        assert_close(&r, &[1.0, 2.0, 5.0, 9.0], 1e-10);
    }

    #[test]
    fn quartic_symmetric_biquadratic() {
        // (x-1)(x-3)(x-5)(x-7) is symmetric about 4, so beta = 0.
        // e1 = 16, e2 = 3+5+7+15+21+35 = 86, e3 = 15+21+35+105 = 176, e4 = 105
        let r = quartic_real_roots(4.0, 86.0 / 6.0, 44.0, 105.0);
        assert_close(&r, &[1.0, 3.0, 5.0, 7.0], 1e-10);
    }

    #[test]
    fn quartic_with_double_roots() {
        // x^2 (x-4)^2: e1 = 8, e2 = 16, e3 = 0, e4 = 0
        let r = quartic_real_roots(2.0, 16.0 / 6.0, 0.0, 0.0);
        assert_close(&r, &[0.0, 0.0, 4.0, 4.0], 1e-6);
    }

    #[test]
    fn resolvent_cubic_branches() {
        // (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
        assert!((cubic_max_real_root(-6.0f64, 11.0, -6.0) - 3.0).abs() < 1e-12);
        // x^3 - 1 has a single real root.
        assert!((cubic_max_real_root(0.0f64, 0.0, -1.0) - 1.0).abs() < 1e-12);
    }
}
