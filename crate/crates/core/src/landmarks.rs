//! Distinguished points of the horizon: the EEP spikes, perturbation-ansatz
//! points around them, and the `N = 6` curve of double exceptional points.
//!
//! For `N = 6` the couplings go by letters, `c = g_1`, `b = g_2`, `a = g_3`.

use serde::Serialize;

use crate::chain_model::{secular_form, ChainSpec};
use crate::error::{Error, Result};
use crate::oracle;
use crate::scalar::Scalar;
use crate::tolerance::ToleranceConfig;
use crate::verdict::Region;

/// Spike couplings `sqrt(n (N - n))`, `n = 1..J`. At this point the
/// characteristic polynomial is `E^N`.
pub fn spikes<T: Scalar>(dim: usize) -> Vec<T> {
    (1..=dim / 2)
        .map(|n| T::from_usize_exact(n * (dim - n)).sqrt())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnsatzPoint<T> {
    pub t: T,
    pub g_caps: Vec<T>,
    /// `gamma_n = t + t^2 + ... + t^(J-1) + G_n t^J`.
    pub gammas: Vec<T>,
    /// `g_n = spike_n sqrt(1 - gamma_n)`.
    pub couplings: Vec<T>,
}

/// `t + t^2 + ... + t^(J-1)` and `t^J`.
fn ansatz_base<T: Scalar>(j: usize, t: T) -> (T, T) {
    let mut sum = T::zero();
    let mut power = T::one();
    for _ in 1..j {
        power *= t;
        sum += power;
    }
    (sum, power * t)
}

pub fn ansatz_point<T: Scalar>(dim: usize, t: T, g_caps: &[T]) -> Result<AnsatzPoint<T>> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let j = dim / 2;
    if g_caps.len() != j {
        return Err(Error::CouplingLength {
            dim,
            expected: j,
            got: g_caps.len(),
        });
    }
    let (base, tj) = ansatz_base(j, t);
    let spike = spikes::<T>(dim);
    let mut gammas = Vec::with_capacity(j);
    let mut couplings = Vec::with_capacity(j);
    for (k, (&g_cap, &s)) in g_caps.iter().zip(&spike).enumerate() {
        let gamma = base + g_cap * tj;
        if gamma > T::one() || !gamma.is_finite() {
            return Err(Error::ImaginaryCoupling {
                index: k + 1,
                gamma: gamma.as_f64(),
            });
        }
        gammas.push(gamma);
        couplings.push(s * (T::one() - gamma).sqrt());
    }
    Ok(AnsatzPoint {
        t,
        g_caps: g_caps.to_vec(),
        gammas,
        couplings,
    })
}

const ANSATZ_GRID: usize = 4001;
const ANSATZ_BISECTIONS: usize = 80;

/// Largest interval of `G_n` (1-based `n`) for which the ansatz point is
/// strictly inside the domain, the other entries of `g_caps` held fixed.
///
/// The admissible `G_n` are bounded above by `gamma_n <= 1`. The range
/// below that bound is scanned on an `asinh`-spaced grid, the widest run
/// of inside points is kept and both ends are refined by bisection against
/// the oracle.
pub fn ansatz_admissible_interval(
    dim: usize,
    t: f64,
    n: usize,
    g_caps: &[f64],
    tol: &ToleranceConfig,
) -> Result<Option<(f64, f64)>> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::InvalidArgument(format!("t must lie in (0, 1), got {t}")));
    }
    let j = dim / 2;
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if n == 0 || n > j {
        return Err(Error::InvalidArgument(format!("index {n} outside 1..={j}")));
    }
    if g_caps.len() != j {
        return Err(Error::CouplingLength {
            dim,
            expected: j,
            got: g_caps.len(),
        });
    }
    let (base, tj) = ansatz_base(j, t);
    let g_max = (1.0 - base) / tj;
    let inside = |g: f64| -> Result<bool> {
        let mut caps = g_caps.to_vec();
        caps[n - 1] = g;
        let point = match ansatz_point(dim, t, &caps) {
            Ok(p) => p,
            Err(Error::ImaginaryCoupling { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        let report = oracle::spectrum(&ChainSpec::new(dim, point.couplings)?, tol)?;
        Ok(oracle::classify(&report, tol).region == Region::Inside)
    };

    if !g_max.is_finite() {
        return Ok(None);
    }
    let reach = g_max.abs().max(64.0);
    let (u_lo, u_hi) = ((-reach).asinh(), g_max.asinh());
    if u_hi <= u_lo {
        return Ok(None);
    }
    let grid: Vec<f64> = (0..ANSATZ_GRID)
        .map(|i| {
            if i + 1 == ANSATZ_GRID {
                g_max
            } else {
                (u_lo + (u_hi - u_lo) * i as f64 / (ANSATZ_GRID - 1) as f64).sinh()
            }
        })
        .collect();
    let flags = grid.iter().map(|&g| inside(g)).collect::<Result<Vec<bool>>>()?;

    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < flags.len() {
        if !flags[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < flags.len() && flags[i + 1] {
            i += 1;
        }
        let wider = best.is_none_or(|(a, b)| grid[i] - grid[start] > grid[b] - grid[a]);
        if wider {
            best = Some((start, i));
        }
        i += 1;
    }
    let Some((first, last)) = best else {
        return Ok(None);
    };

    let refine = |mut good: f64, mut bad: f64| -> Result<f64> {
        for _ in 0..ANSATZ_BISECTIONS {
            let mid = 0.5 * (good + bad);
            if mid == good || mid == bad {
                break;
            }
            if inside(mid)? {
                good = mid;
            } else {
                bad = mid;
            }
        }
        Ok(0.5 * (good + bad))
    };
    let lo = if first == 0 {
        grid[0]
    } else {
        refine(grid[first], grid[first - 1])?
    };
    let hi = if last + 1 == grid.len() {
        grid[last]
    } else {
        refine(grid[last], grid[last + 1])?
    };
    Ok(Some((lo, hi)))
}

/// A point of the `N = 6` double-exceptional-point curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepSolution<T> {
    pub c: T,
    pub a: T,
    pub b_sq: T,
    /// The doublet sits at `s = 16 z^2`, next to a simple root at `s = 0`.
    pub z_sq: T,
    pub residuals: (T, T),
    pub unequal_slack: T,
    pub unequal_ok: bool,
}

/// The two DEP constraints at `(a, b, c)`.
pub fn dep_residuals<T: Scalar>(a: T, b: T, c: T) -> (T, T) {
    let lit = T::lit;
    let c2 = c * c;
    let b2 = b * b;
    let a2 = a * a;
    let left = a * c2 + lit(15.0) * a;
    let right = lit(15.0) + c2 + lit(5.0) * b2;
    let r1 = (left + right) * (left - right);
    let r2 = -lit(66.0) * a2 - lit(36.0) * b2 + lit(4.0) * c2 * a2 - lit(189.0) + lit(252.0) * c2
        - lit(4.0) * b2 * a2
        - a2 * a2;
    (r1, r2)
}

/// Second constraint after eliminating `b^2 = k (a - 1)`, with its
/// derivative in `a`.
fn dep_poly<T: Scalar>(a: T, c: T) -> (T, T) {
    let lit = T::lit;
    let c2 = c * c;
    let k = (c2 + lit(15.0)) / lit(5.0);
    let coeffs = [
        lit(36.0) * k - lit(189.0) + lit(252.0) * c2,
        -lit(36.0) * k,
        lit(4.0) * k + lit(4.0) * c2 - lit(66.0),
        -lit(4.0) * k,
        -T::one(),
    ];
    let mut v = T::zero();
    let mut dv = T::zero();
    for &q in coeffs.iter().rev() {
        dv = dv * a + v;
        v = v * a + q;
    }
    (v, dv)
}

const DEP_GRID: usize = 512;

/// Solves the two DEP constraints for `a in [1, 3]` at the given `c`.
/// Every root found is returned, ascending in `a`.
pub fn dep_solve<T: Scalar>(c: T) -> Result<Vec<DepSolution<T>>> {
    if !c.is_finite() {
        return Err(Error::InvalidArgument("c must be finite".into()));
    }
    let lit = T::lit;
    let slack = lit(1e-9);
    let (lo, hi) = (T::one() - slack, lit(3.0) + slack);
    let c2 = c * c;
    let scale = lit(400.0) * (T::one() + c2);
    let flat = lit(64.0) * T::epsilon() * scale;

    let xs: Vec<T> = (0..=DEP_GRID)
        .map(|i| lo + (hi - lo) * T::from_usize_exact(i) / T::from_usize_exact(DEP_GRID))
        .collect();
    let fs: Vec<T> = xs.iter().map(|&x| dep_poly(x, c).0).collect();

    let mut roots: Vec<T> = Vec::new();
    for i in 0..DEP_GRID {
        let (fa, fb) = (fs[i], fs[i + 1]);
        if fa.abs() <= flat {
            roots.push(xs[i]);
            continue;
        }
        if fa.signum() != fb.signum() && fb.abs() > flat {
            roots.push(bisect_newton(xs[i], xs[i + 1], c));
        }
    }
    if fs[DEP_GRID].abs() <= flat {
        roots.push(xs[DEP_GRID]);
    }
    roots.dedup_by(|x, y| (*x - *y).abs() <= lit(1e-9));
    if roots.is_empty() {
        return Err(Error::NoDepRoot { c: c.as_f64() });
    }

    roots
        .into_iter()
        .map(|a| {
            let a = a.max(T::one()).min(lit(3.0));
            let k = (c2 + lit(15.0)) / lit(5.0);
            let b_sq = (k * (a - T::one())).max(T::zero());
            let spec = ChainSpec::new(6, vec![c, b_sq.sqrt(), a])?;
            let p = secular_form(&spec)?.p();
            let unequal_slack = lit(84.0) * c2 - lit(63.0) - lit(2.4) * (a - T::one()) * (lit(15.0) + c2);
            Ok(DepSolution {
                c,
                a,
                b_sq,
                z_sq: (lit(3.0) * p / lit(32.0)).max(T::zero()),
                residuals: dep_residuals(a, b_sq.sqrt(), c),
                unequal_slack,
                unequal_ok: unequal_slack >= T::zero(),
            })
        })
        .collect()
}

fn bisect_newton<T: Scalar>(mut lo: T, mut hi: T, c: T) -> T {
    let f_lo = dep_poly(lo, c).0;
    for _ in 0..200 {
        let mid = (lo + hi) * T::lit(0.5);
        if mid == lo || mid == hi {
            break;
        }
        let f_mid = dep_poly(mid, c).0;
        if f_mid == T::zero() {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = (lo + hi) * T::lit(0.5);
    let (f, df) = dep_poly(x, c);
    if df == T::zero() {
        return x;
    }
    let polished = x - f / df;
    if dep_poly(polished, c).0.abs() < f.abs() {
        polished
    } else {
        x
    }
}

/// Mismatch of `(3P, 3Q, R)` at `(a, b, c)` against the secular polynomial
/// `(s - 25 y^2)(s - 16 x^2)^2` of a merged inner pair.
pub fn pairwise_confluence_residual<T: Scalar>(a: T, b: T, c: T, x: T, y: T) -> Result<[T; 3]> {
    let f = secular_form(&ChainSpec::new(6, vec![c, b, a])?)?;
    let lit = T::lit;
    let (x2, y2) = (x * x, y * y);
    let three = lit(3.0);
    Ok([
        three * f.p() - (lit(32.0) * x2 + lit(25.0) * y2),
        three * f.q() - (lit(256.0) * x2 * x2 + lit(800.0) * x2 * y2),
        f.r() - lit(6400.0) * x2 * x2 * y2,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain_model::secular_form;

    #[test]
    fn spike_examples() {
        assert_eq!(spikes::<f64>(2), vec![1.0]);
        assert_eq!(spikes::<f64>(3), vec![2f64.sqrt()]);
        assert_eq!(spikes::<f64>(6), vec![5f64.sqrt(), 8f64.sqrt(), 3.0]);
        let want: Vec<f64> = [10.0, 18.0, 24.0, 28.0, 30.0].iter().map(|v: &f64| v.sqrt()).collect();
        assert_eq!(spikes::<f64>(11), want);
    }

    #[test]
    fn spikes_give_pure_power() {
        for n in 2..=11 {
            let f = secular_form(&ChainSpec::new(n, spikes::<f64>(n)).unwrap()).unwrap();
            for (m, (v, err)) in f.coeffs.iter().zip(&f.coeff_err).enumerate() {
                assert!(v.abs() <= 1e-9, "N={n}, coefficient {m}: {v}");
                // The unsnapped recurrence value sits inside its rounding bound.
                let raw = f.raw_char[n - 2 * (m + 1)].abs();
                let binom = crate::scalar::binomial::<f64>(n / 2, m + 1);
                assert!(raw <= binom * err, "N={n}: {raw} > {}", binom * err);
            }
        }
    }

    #[test]
    fn ansatz_examples() {
        let p = ansatz_point(6, 0.0, &[3.0, -2.0, 7.0]).unwrap();
        assert_eq!(p.couplings, spikes::<f64>(6));

        let p = ansatz_point(2, 0.3f64, &[2.0]).unwrap();
        assert!((p.gammas[0] - 0.6).abs() < 1e-15);
        assert!((p.couplings[0] - 0.4f64.sqrt()).abs() < 1e-15);

        let p = ansatz_point(6, 0.1f64, &[1.0, 1.0, 1.0]).unwrap();
        for (k, (g, s)) in p.couplings.iter().zip(spikes::<f64>(6)).enumerate() {
            assert!((p.gammas[k] - 0.111).abs() < 1e-15);
            assert!((g - s * 0.889f64.sqrt()).abs() < 1e-14);
        }

        assert!(matches!(
            ansatz_point(2, 0.5, &[3.0]),
            Err(Error::ImaginaryCoupling { index: 1, .. })
        ));
    }

    #[test]
    fn ansatz_interval_n2() {
        let tol = ToleranceConfig::default();
        let (lo, hi) = ansatz_admissible_interval(2, 0.01, 1, &[0.0], &tol).unwrap().unwrap();
        assert!(lo.abs() < 1e-6, "{lo}");
        assert!((hi - 100.0).abs() < 1e-9, "{hi}");
    }

    #[test]
    fn ansatz_interval_n4_nonempty() {
        let tol = ToleranceConfig::default();
        let iv = ansatz_admissible_interval(4, 0.05, 1, &[0.0, 0.0], &tol).unwrap();
        let (lo, hi) = iv.unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn ansatz_interval_empty_when_gamma_forced_above_one() {
        // J = 3, t = 0.9: t + t^2 > 1 already, so no G_n is admissible.
        let tol = ToleranceConfig::default();
        let iv = ansatz_admissible_interval(6, 0.9, 2, &[0.0; 3], &tol).unwrap();
        assert_eq!(iv, None);
    }

    #[test]
    fn dep_residual_examples() {
        let (r1, r2) = dep_residuals(3.0, 8f64.sqrt(), 5f64.sqrt());
        assert!(r1.abs() < 1e-10 && r2.abs() < 1e-10, "{r1} {r2}");
        assert_eq!(dep_residuals(0.0, 0.0, 0.0).0, -225.0);
    }

    #[test]
    fn dep_at_spike() {
        let sols = dep_solve(5f64.sqrt()).unwrap();
        let s = sols.last().unwrap();
        assert!((s.a - 3.0).abs() < 1e-9, "{s:?}");
        assert!((s.b_sq - 8.0).abs() < 1e-9);
        assert!(s.z_sq.abs() < 1e-9);
        // factor pair of the first constraint
        let left = s.a * s.c * s.c + 15.0 * s.a;
        let right = 15.0 + s.c * s.c + 5.0 * s.b_sq;
        assert!((left - 60.0).abs() < 1e-8 && (right - 60.0).abs() < 1e-8);
    }

    #[test]
    fn dep_interior_point() {
        let sols = dep_solve(2.2f64).unwrap();
        assert_eq!(sols.len(), 1);
        let s = &sols[0];
        assert!((s.a - 2.9513).abs() < 1e-3, "{s:?}");
        assert!(s.z_sq > 0.0);
        assert!(s.residuals.0.abs() < 1e-9 && s.residuals.1.abs() < 1e-9);
        assert!(s.unequal_ok);
    }

    #[test]
    fn dep_no_root_beyond_spike() {
        assert!(matches!(dep_solve(2.5f64), Err(Error::NoDepRoot { .. })));
    }

    #[test]
    fn pairwise_identity() {
        // Decoupled chain: s = {1, 9, 25}, i.e. 3P = 35, 3Q = 259, R = 225.
        // A merged pair cannot reproduce three distinct roots.
        let r = pairwise_confluence_residual(0.0f64, 0.0, 0.0, 0.25, 1.0).unwrap();
        assert!(r.iter().any(|v| v.abs() > 1e-3));
    }
}
