//! Closed-form membership tests for the quasi-Hermiticity domain, `J = 1..5`.
//!
//! All `J` secular roots must be real and non-negative. The coefficient
//! signs exclude negative roots; what remains is reality, which is decided
//! by comparing the critical values of `y(x)` with the constant term. At
//! `J = 4, 5` the critical points are rescaled by `sqrt(B)` and the test
//! reduces to interlacing them with the roots of a smaller auxiliary
//! polynomial:
//!
//! ```text
//! J = 4:  Y1 <= Y- <= Y2 <= Y+ <= Y3,          Y+- = C +- sqrt(C^2 - D)
//! J = 5:  Y1 <= Ya <= Y2 <= Yb <= Y3 <= Yc <= Y4,   w(Y) = Y^3 - 3CY^2 + 3DY - G
//! ```
//!
//! with `B = P^2 - Q`, `2B^(3/2) C = PQ - R`, `3B^2 D = PR - S` and
//! `4B^(5/2) G = PS - T`.

mod closed_form;

pub use closed_form::{cubic_real_roots, quartic_real_roots};

use serde::Serialize;

use crate::chain_model::{SecularForm, COEFF_NAMES};
use crate::error::{Error, Result};
use crate::scalar::{max_abs, Scalar};
use crate::tolerance::ToleranceConfig;
use crate::verdict::{Slack, Verdict};

/// Necessary slacks: the coefficients themselves, all nonnegative inside.
pub fn necessary_conditions<T: Scalar>(f: &SecularForm<T>) -> Vec<T> {
    f.coeffs.clone()
}

/// Derived abbreviations. `None` marks a quantity whose `B` power in the
/// denominator is degenerate or whose coefficients do not exist at this `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxQuantities<T> {
    pub b: T,
    pub q: Option<T>,
    pub c: Option<T>,
    pub d: Option<T>,
    pub g: Option<T>,
    /// The threshold `B` was compared against.
    pub eps_b: T,
}

impl<T: Scalar> AuxQuantities<T> {
    pub fn b_defined(&self) -> bool {
        self.b > self.eps_b
    }
}

pub fn eps_b<T: Scalar>(f: &SecularForm<T>, tol: &ToleranceConfig) -> T {
    let p = f.p();
    T::lit(tol.eps_b) * T::one().max(p * p)
}

pub fn aux_quantities<T: Scalar>(f: &SecularForm<T>, tol: &ToleranceConfig) -> AuxQuantities<T> {
    let (p, q, r, s, t) = (f.p(), f.q(), f.r(), f.s(), f.t());
    let b = p * p - q;
    let eps = eps_b(f, tol);
    let ok = b > eps;
    let j = f.j;
    let sb = if ok { b.sqrt() } else { T::nan() };
    let defined = |needed_j: usize, v: T| (ok && j >= needed_j).then_some(v);
    AuxQuantities {
        b,
        q: defined(2, q / b),
        c: defined(3, (p * q - r) / (T::lit(2.0) * b * sb)),
        d: defined(4, (p * r - s) / (T::lit(3.0) * b * b)),
        g: defined(5, (p * s - t) / (T::lit(4.0) * b * b * sb)),
        eps_b: eps,
    }
}

/// Critical points of `y(x)` and their rescaled companions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoints<T> {
    /// Roots of `y'`, ascending; empty unless `all_real`.
    pub x: Vec<T>,
    /// `x_k / sqrt(B)`; empty when `B` is degenerate.
    pub y_scaled: Vec<T>,
    /// `(Y-, Y+)` at `J = 4`, when real.
    pub y_pm: Option<(T, T)>,
    /// Ascending real roots of `w(Y)` at `J = 5`, when real.
    pub y_greek: Option<[T; 3]>,
    pub all_real: bool,
}

/// Normalized slack `value / max(|terms|..., 1)`.
fn normalized<T: Scalar>(value: T, terms: &[T]) -> T {
    value / max_abs(T::one(), terms)
}

/// Slack of the compact reality condition for `x^3 - 3a x^2 + 3b x - c`:
/// `3a^2 b^2 + 6abc >= 4b^3 + c^2 + 4c a^3`.
pub fn cubic_reality_slack<T: Scalar>(a: T, b: T, c: T) -> T {
    let t1 = T::lit(3.0) * a * a * b * b;
    let t2 = T::lit(6.0) * c * a * b;
    let t3 = T::lit(4.0) * b * b * b;
    let t4 = c * c;
    let t5 = T::lit(4.0) * c * a * a * a;
    normalized(t1 + t2 - t3 - t4 - t5, &[t1, t2, t3, t4, t5])
}

/// The same reality condition in rescaled form,
/// `sqrt(1+q) - 1 <= C <= sqrt(1+q) + 1`, as a pair of slacks.
/// Requires `B > 0`, `a >= 0`.
pub fn rescaled_reality_slacks<T: Scalar>(a: T, b: T, c: T) -> (T, T) {
    let big_b = a * a - b;
    let q = b / big_b;
    let cc = (a * b - c) / (T::lit(2.0) * big_b * big_b.sqrt());
    let centre = (T::one() + q).sqrt();
    let scale = [cc, centre, T::one()];
    (
        normalized(cc - (centre - T::one()), &scale),
        normalized(centre + T::one() - cc, &scale),
    )
}

/// Conditions making `x^3 - 3a x^2 + 3b x - c` have three real non-negative
/// roots. Returns whether the roots may be treated as real.
fn push_cubic_conditions<T: Scalar>(
    slacks: &mut Vec<Slack<T>>,
    prefix: &str,
    names: [&str; 3],
    (a, b, c): (T, T, T),
    tol: &ToleranceConfig,
) -> bool {
    for (name, v) in names.iter().zip([a, b, c]) {
        slacks.push(Slack::new(format!("{prefix}{name}>=0"), normalized(v, &[v])));
    }
    let reality = cubic_reality_slack(a, b, c);
    slacks.push(Slack::new(format!("{prefix}cubic-real"), reality));
    reality >= -T::lit(tol.boundary_tol)
}

fn push_coefficient_signs<T: Scalar>(slacks: &mut Vec<Slack<T>>, f: &SecularForm<T>) {
    for (name, &v) in COEFF_NAMES.iter().zip(&f.coeffs) {
        slacks.push(Slack::new(format!("{name}>=0"), normalized(v, &[v])));
    }
}

/// Slack chain for `v_0 <= v_1 <= ... `, normalized by the largest entry.
fn push_chain<T: Scalar>(slacks: &mut Vec<Slack<T>>, prefix: &str, chain: &[(&str, T)]) {
    let values: Vec<T> = chain.iter().map(|c| c.1).collect();
    let scale = max_abs(T::one(), &values);
    for w in chain.windows(2) {
        slacks.push(Slack::new(
            format!("{prefix}interlace-{}<={}", w[0].0, w[1].0),
            (w[1].1 - w[0].1) / scale,
        ));
    }
}

/// Sign pattern of the polynomial at its critical points, used when `B`
/// is too small to rescale. `signs[k]` is `+1` when `value(x_k) >= 0` is
/// required, `-1` when `<= 0`.
fn push_unscaled<T: Scalar>(
    slacks: &mut Vec<Slack<T>>,
    prefix: &str,
    poly_desc: &[T],
    x: &[T],
    signs: &[i8],
) {
    for (k, (&xk, &sign)) in x.iter().zip(signs).enumerate() {
        let mut value = T::zero();
        let mut magnitude = T::zero();
        for &c in poly_desc {
            value = value * xk + c;
            magnitude = magnitude * xk.abs() + c.abs();
        }
        let signed = if sign > 0 { value } else { -value };
        slacks.push(Slack::new(
            format!("{prefix}unscaled-x{}", k + 1),
            signed / magnitude.max(T::one()),
        ));
    }
}

struct QuarticAnalysis<T> {
    all_real: bool,
    x: Vec<T>,
    y_scaled: Vec<T>,
    y_pm: Option<(T, T)>,
    degenerate: bool,
}

/// `J = 4` machinery on `(P, Q, R, S)`: four real non-negative roots of
/// `x^4 - 4P x^3 + 6Q x^2 - 4R x + S`.
fn quartic_conditions<T: Scalar>(
    slacks: &mut Vec<Slack<T>>,
    prefix: &str,
    (p, q, r, s): (T, T, T, T),
    tol: &ToleranceConfig,
) -> QuarticAnalysis<T> {
    let one = T::one();
    slacks.push(Slack::new(format!("{prefix}S>=0"), normalized(s, &[s])));
    let b = p * p - q;
    slacks.push(Slack::new(format!("{prefix}B>=0"), normalized(b, &[p * p, q])));
    let x_real = push_cubic_conditions(slacks, &format!("{prefix}x:"), ["P", "Q", "R"], (p, q, r), tol);

    let mut out = QuarticAnalysis {
        all_real: false,
        x: Vec::new(),
        y_scaled: Vec::new(),
        y_pm: None,
        degenerate: false,
    };
    if !x_real {
        return out;
    }
    let x = cubic_real_roots(p, q, r);
    out.x = x.to_vec();

    let eps = T::lit(tol.eps_b) * one.max(p * p);
    if b <= eps {
        out.degenerate = true;
        let poly = [one, -T::lit(4.0) * p, T::lit(6.0) * q, -T::lit(4.0) * r, s];
        push_unscaled(slacks, prefix, &poly, &x, &[-1, 1, -1]);
        out.all_real = true;
        return out;
    }

    let sb = b.sqrt();
    let c = (p * q - r) / (T::lit(2.0) * b * sb);
    let d = (p * r - s) / (T::lit(3.0) * b * b);
    let y = x.map(|xi| xi / sb);
    out.y_scaled = y.to_vec();
    slacks.push(Slack::new(format!("{prefix}D>=0"), normalized(d, &[d])));
    let disc = c * c - d;
    slacks.push(Slack::new(format!("{prefix}C^2>=D"), normalized(disc, &[c * c, d])));
    if disc < -T::lit(tol.boundary_tol) {
        return out;
    }
    let root = disc.max(T::zero()).sqrt();
    let (ym, yp) = (c - root, c + root);
    out.y_pm = Some((ym, yp));
    push_chain(
        slacks,
        prefix,
        &[("Y1", y[0]), ("Y-", ym), ("Y2", y[1]), ("Y+", yp), ("Y3", y[2])],
    );
    out.all_real = true;
    out
}

fn check_j(f: &SecularForm<impl Scalar>) -> Result<()> {
    if (1..=5).contains(&f.j) {
        Ok(())
    } else {
        Err(Error::UnsupportedJ(f.j))
    }
}

/// Classifies a secular form by the closed-form inequality chains.
pub fn member<T: Scalar>(f: &SecularForm<T>, tol: &ToleranceConfig) -> Result<Verdict<T>> {
    check_j(f)?;
    let mut slacks = Vec::new();
    let mut degenerate = false;
    let (p, q, r, s, t) = (f.p(), f.q(), f.r(), f.s(), f.t());
    match f.j {
        1 => push_coefficient_signs(&mut slacks, f),
        2 => {
            push_coefficient_signs(&mut slacks, f);
            slacks.push(Slack::new("P^2>=Q", normalized(p * p - q, &[p * p, q])));
        }
        3 => {
            push_cubic_conditions(&mut slacks, "", ["P", "Q", "R"], (p, q, r), tol);
        }
        4 => {
            let analysis = quartic_conditions(&mut slacks, "", (p, q, r, s), tol);
            degenerate = analysis.degenerate;
        }
        5 => {
            slacks.push(Slack::new("T>=0", normalized(t, &[t])));
            let cp = critical_points_j5(&mut slacks, f, tol);
            degenerate = cp.degenerate;
        }
        _ => unreachable!(),
    }
    let mut verdict = Verdict::from_slacks(&slacks, tol.boundary_tol);
    verdict.degenerate_scaling = degenerate;
    Ok(verdict)
}

struct J5Analysis<T> {
    points: CriticalPoints<T>,
    degenerate: bool,
}

fn critical_points_j5<T: Scalar>(
    slacks: &mut Vec<Slack<T>>,
    f: &SecularForm<T>,
    tol: &ToleranceConfig,
) -> J5Analysis<T> {
    let (p, q, r, s, t) = (f.p(), f.q(), f.r(), f.s(), f.t());
    let mut points = CriticalPoints {
        x: Vec::new(),
        y_scaled: Vec::new(),
        y_pm: None,
        y_greek: None,
        all_real: false,
    };

    // Four real non-negative critical points of the quintic.
    let start = slacks.len();
    let inner = quartic_conditions(slacks, "y':", (p, q, r, s), tol);
    let inner_margin = slacks[start..]
        .iter()
        .fold(T::infinity(), |m, sl| m.min(sl.value));
    if !inner.all_real || inner_margin < -T::lit(tol.boundary_tol) {
        return J5Analysis {
            points,
            degenerate: inner.degenerate,
        };
    }
    let x = quartic_real_roots(p, q, r, s);
    points.x = x.to_vec();

    let b = p * p - q;
    let eps = T::lit(tol.eps_b) * T::one().max(p * p);
    if b <= eps {
        let poly = [
            T::one(),
            -T::lit(5.0) * p,
            T::lit(10.0) * q,
            -T::lit(10.0) * r,
            T::lit(5.0) * s,
            -t,
        ];
        push_unscaled(slacks, "", &poly, &x, &[1, -1, 1, -1]);
        points.all_real = true;
        return J5Analysis {
            points,
            degenerate: true,
        };
    }

    let sb = b.sqrt();
    let c = (p * q - r) / (T::lit(2.0) * b * sb);
    let d = (p * r - s) / (T::lit(3.0) * b * b);
    let g = (p * s - t) / (T::lit(4.0) * b * b * sb);
    let y = x.map(|xi| xi / sb);
    points.y_scaled = y.to_vec();

    let w_real = push_cubic_conditions(slacks, "w:", ["C", "D", "G"], (c, d, g), tol);
    if !w_real {
        return J5Analysis {
            points,
            degenerate: false,
        };
    }
    let greek = cubic_real_roots(c, d, g);
    points.y_greek = Some(greek);
    push_chain(
        slacks,
        "",
        &[
            ("Y1", y[0]),
            ("Ya", greek[0]),
            ("Y2", y[1]),
            ("Yb", greek[1]),
            ("Y3", y[2]),
            ("Yc", greek[2]),
            ("Y4", y[3]),
        ],
    );
    points.all_real = true;
    J5Analysis {
        points,
        degenerate: false,
    }
}

/// Critical points of `y(x)` for `J = 4` (roots of a cubic) or `J = 5`
/// (roots of a quartic), with the rescaled auxiliary roots.
pub fn critical_points<T: Scalar>(
    f: &SecularForm<T>,
    tol: &ToleranceConfig,
) -> Result<CriticalPoints<T>> {
    let mut scratch = Vec::new();
    let (p, q, r, s) = (f.p(), f.q(), f.r(), f.s());
    match f.j {
        4 => {
            let a = quartic_conditions(&mut scratch, "", (p, q, r, s), tol);
            let x_real = cubic_reality_slack(p, q, r) >= -T::lit(tol.boundary_tol);
            let x = if x_real {
                cubic_real_roots(p, q, r).to_vec()
            } else {
                Vec::new()
            };
            Ok(CriticalPoints {
                all_real: x_real,
                x,
                y_scaled: a.y_scaled,
                y_pm: a.y_pm,
                y_greek: None,
            })
        }
        5 => Ok(critical_points_j5(&mut scratch, f, tol).points),
        j => Err(Error::UnsupportedJ(j)),
    }
}

/// Admissible band for `R / (2 B^(3/2))` at `J = 3` as a function of
/// `q = Q / B` alone.
pub fn j3_band_for_q<T: Scalar>(q: T) -> (T, T) {
    let half = T::lit(0.5);
    let core = (q * half - T::one()) * (T::one() + q).sqrt();
    let upper = T::one() + core;
    let lower = if q <= T::lit(3.0) {
        T::zero()
    } else {
        core - T::one()
    };
    (lower, upper)
}

pub fn j3_band<T: Scalar>(f: &SecularForm<T>, tol: &ToleranceConfig) -> Result<(T, T)> {
    if f.j != 3 {
        return Err(Error::UnsupportedJ(f.j));
    }
    let aux = aux_quantities(f, tol);
    match aux.q {
        Some(q) => Ok(j3_band_for_q(q)),
        None => Err(Error::DegenerateBand {
            b: aux.b.as_f64(),
            eps_b: aux.eps_b.as_f64(),
        }),
    }
}

/// `J = 3` membership through the one-parameter band instead of the
/// compact inequality. Requires `B > eps_B`.
pub fn member_via_band<T: Scalar>(f: &SecularForm<T>, tol: &ToleranceConfig) -> Result<Verdict<T>> {
    let (lower, upper) = j3_band(f, tol)?;
    let (p, q, r) = (f.p(), f.q(), f.r());
    let b = p * p - q;
    let ratio = r / (T::lit(2.0) * b * b.sqrt());
    let scale = [ratio, lower, upper];
    let slacks = vec![
        Slack::new("P>=0", normalized(p, &[p])),
        Slack::new("Q>=0", normalized(q, &[q])),
        Slack::new("band-lower", normalized(ratio - lower, &scale)),
        Slack::new("band-upper", normalized(upper - ratio, &scale)),
    ];
    Ok(Verdict::from_slacks(&slacks, tol.boundary_tol))
}
