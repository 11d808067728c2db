//! Spectral ground truth: numerical secular roots, their realness and
//! their confluence pattern.
//!
//! Nothing here uses the closed-form membership inequalities; the oracle
//! only ever looks at the roots themselves.

use std::fmt;

use num_complex::Complex;
use serde::Serialize;

use crate::chain_model::{secular_form, ChainSpec};
use crate::error::Result;
use crate::poly::sort_roots;
use crate::scalar::Scalar;
use crate::tolerance::ToleranceConfig;
use crate::verdict::{Slack, Verdict};

pub use crate::poly::{backward_error, poly_roots};

/// A group of secular roots closer than the cluster tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootCluster<T> {
    pub center: Complex<T>,
    pub multiplicity: usize,
}

/// Multiplicities of the root clusters, ordered by ascending cluster
/// position, plus the multiplicity of the cluster sitting at `s = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfluenceSignature {
    pub multiplicities: Vec<usize>,
    /// 0 when no cluster sits at the origin.
    pub zero_multiplicity: usize,
}

impl ConfluenceSignature {
    pub fn has_zero_cluster(&self) -> bool {
        self.zero_multiplicity > 0
    }

    /// All roots in a single cluster at zero (an EEP).
    pub fn is_total_at_zero(&self, j: usize) -> bool {
        self.multiplicities == [j] && self.zero_multiplicity == j
    }
}

impl fmt::Display for ConfluenceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, m) in self.multiplicities.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "]")?;
        if self.has_zero_cluster() {
            write!(f, "@0")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport<T> {
    pub dim: usize,
    /// Roots of the secular polynomial in `s = E^2`, sorted.
    pub s_roots: Vec<Complex<T>>,
    pub clusters: Vec<RootCluster<T>>,
    /// All `N` energies: `+-sqrt(s)` per root, plus `E = 0` for odd `N`.
    pub energies: Vec<Complex<T>>,
    pub all_real_nonneg: bool,
    pub margin: T,
    pub confluence: ConfluenceSignature,
}

fn root_scale<T: Scalar>(roots: &[Complex<T>]) -> T {
    roots.iter().fold(T::one(), |m, z| m.max(z.norm()))
}

/// Single-linkage clustering at relative gap `cluster_tol`.
pub fn cluster_roots<T: Scalar>(roots: &[Complex<T>], cluster_tol: f64) -> Vec<RootCluster<T>> {
    let n = roots.len();
    let gap = T::lit(cluster_tol) * root_scale(roots);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for k in i + 1..n {
            if (roots[i] - roots[k]).norm() <= gap {
                let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Complex<T>, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => {
                g.1 += roots[i];
                g.2 += 1;
            }
            None => groups.push((r, roots[i], 1)),
        }
    }
    let mut clusters: Vec<RootCluster<T>> = groups
        .into_iter()
        .map(|(_, sum, m)| RootCluster {
            center: sum / T::from_usize_exact(m),
            multiplicity: m,
        })
        .collect();
    clusters.sort_by(|a, b| {
        a.center
            .re
            .partial_cmp(&b.center.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(
                a.center
                    .im
                    .partial_cmp(&b.center.im)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
    });
    clusters
}

pub fn spectrum<T: Scalar>(spec: &ChainSpec<T>, tol: &ToleranceConfig) -> Result<SpectrumReport<T>> {
    let form = secular_form(spec)?;
    let s_roots = poly_roots(&form.s_poly())?;
    Ok(report_from_roots(spec.dim(), s_roots, tol))
}

/// Assembles a report from already computed secular roots.
pub fn report_from_roots<T: Scalar>(
    dim: usize,
    mut s_roots: Vec<Complex<T>>,
    tol: &ToleranceConfig,
) -> SpectrumReport<T> {
    sort_roots(&mut s_roots);
    let mut energies = Vec::with_capacity(dim);
    for s in &s_roots {
        let e = s.sqrt();
        energies.push(e);
        energies.push(-e);
    }
    if dim % 2 == 1 {
        energies.push(Complex::new(T::zero(), T::zero()));
    }
    sort_roots(&mut energies);

    let mut report = SpectrumReport {
        dim,
        clusters: cluster_roots(&s_roots, tol.cluster_tol),
        s_roots,
        energies,
        all_real_nonneg: false,
        margin: T::zero(),
        confluence: ConfluenceSignature {
            multiplicities: Vec::new(),
            zero_multiplicity: 0,
        },
    };
    let verdict = classify(&report, tol);
    report.margin = verdict.margin;
    report.all_real_nonneg = real_nonneg(&report.clusters, root_scale(&report.s_roots), tol);
    report.confluence = confluence_pattern(&report, tol);
    report
}

fn real_nonneg<T: Scalar>(clusters: &[RootCluster<T>], scale: T, tol: &ToleranceConfig) -> bool {
    let allowance = T::lit(tol.real_tol) * scale;
    clusters
        .iter()
        .all(|c| c.center.im.abs() <= allowance && c.center.re >= -allowance)
}

/// Region of the spectrum.
///
/// Each cluster contributes a slack: `-|Im s| / scale` when it is complex;
/// otherwise the smaller of `Re s / scale` and half the gap to the nearest
/// other real cluster (zero for a multiple root). The gap term makes the
/// margin pass continuously through zero where two real roots meet and turn
/// into a complex pair.
pub fn classify<T: Scalar>(report: &SpectrumReport<T>, tol: &ToleranceConfig) -> Verdict<T> {
    let clusters = cluster_roots(&report.s_roots, tol.cluster_tol);
    let scale = root_scale(&report.s_roots);
    let allowance = T::lit(tol.real_tol) * scale;
    let half = T::lit(0.5);

    let is_real = |c: &RootCluster<T>| c.center.im.abs() <= allowance;
    let mut slacks = Vec::with_capacity(clusters.len());
    for (i, c) in clusters.iter().enumerate() {
        let label = format!("s{}", i + 1);
        if !is_real(c) {
            slacks.push(Slack::new(format!("{label}-real"), -c.center.im.abs() / scale));
            continue;
        }
        let mut slack = c.center.re / scale;
        if c.multiplicity > 1 {
            slack = slack.min(T::zero());
        } else {
            for (k, other) in clusters.iter().enumerate() {
                if k != i && is_real(other) {
                    let gap = (c.center.re - other.center.re).abs() * half / scale;
                    slack = slack.min(gap);
                }
            }
        }
        slacks.push(Slack::new(format!("{label}-nonneg"), slack));
    }
    Verdict::from_slacks(&slacks, tol.boundary_tol)
}

pub fn confluence_pattern<T: Scalar>(
    report: &SpectrumReport<T>,
    tol: &ToleranceConfig,
) -> ConfluenceSignature {
    let clusters = cluster_roots(&report.s_roots, tol.cluster_tol);
    let zero_gap = T::lit(tol.cluster_tol) * root_scale(&report.s_roots);
    let zero_multiplicity = clusters
        .iter()
        .find(|c| c.center.norm() <= zero_gap)
        .map_or(0, |c| c.multiplicity);
    ConfluenceSignature {
        multiplicities: clusters.iter().map(|c| c.multiplicity).collect(),
        zero_multiplicity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Region;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn n2_spectrum() {
        let r = spectrum(&ChainSpec::new(2, vec![0.6]).unwrap(), &tol()).unwrap();
        assert!((r.s_roots[0] - c(0.64, 0.0)).norm() < 1e-15);
        assert!((r.energies[0] - c(-0.8, 0.0)).norm() < 1e-15);
        assert!((r.energies[1] - c(0.8, 0.0)).norm() < 1e-15);
        assert_eq!(classify(&r, &tol()).region, Region::Inside);
    }

    #[test]
    fn n6_spike_is_total_confluence() {
        let g = vec![5f64.sqrt(), 8f64.sqrt(), 3.0];
        let r = spectrum(&ChainSpec::new(6, g).unwrap(), &tol()).unwrap();
        assert_eq!(r.s_roots, vec![c(0.0, 0.0); 3]);
        assert_eq!(r.energies.len(), 6);
        assert!(r.energies.iter().all(|e| e.norm() == 0.0));
        assert_eq!(r.confluence.multiplicities, vec![3]);
        assert!(r.confluence.is_total_at_zero(3));
        assert_eq!(classify(&r, &tol()).region, Region::Boundary);
    }

    #[test]
    fn n3_outside() {
        let r = spectrum(&ChainSpec::new(3, vec![2.0]).unwrap(), &tol()).unwrap();
        assert!((r.s_roots[0] - c(-4.0, 0.0)).norm() < 1e-14);
        assert_eq!(r.energies.len(), 3);
        assert!((r.energies[1] - c(0.0, -2.0)).norm() < 1e-14 || (r.energies[0] - c(0.0, -2.0)).norm() < 1e-14);
        assert!(r.energies.contains(&c(0.0, 0.0)));
        assert_eq!(classify(&r, &tol()).region, Region::Outside);
        assert!(!r.all_real_nonneg);
    }

    #[test]
    fn classify_examples() {
        let t = tol();
        let inside = report_from_roots(2, vec![c(0.64, 0.0)], &t);
        assert_eq!(classify(&inside, &t).region, Region::Inside);
        let outside = report_from_roots(2, vec![c(-4.0, 0.0)], &t);
        assert_eq!(classify(&outside, &t).region, Region::Outside);
        let eep = report_from_roots(6, vec![c(0.0, 0.0); 3], &t);
        assert_eq!(classify(&eep, &t).region, Region::Boundary);
    }

    #[test]
    fn double_root_away_from_zero_is_boundary() {
        let t = tol();
        let r = report_from_roots(6, vec![c(1.0, 0.0), c(4.0, 0.0), c(4.0, 0.0)], &t);
        let v = classify(&r, &t);
        assert_eq!(v.region, Region::Boundary);
        assert_eq!(r.confluence.multiplicities, vec![1, 2]);
        assert!(!r.confluence.has_zero_cluster());
    }

    #[test]
    fn complex_pair_margin_is_negative_imag() {
        let t = tol();
        let r = report_from_roots(6, vec![c(2.0, 0.0), c(0.0, -1.0), c(0.0, 1.0)], &t);
        let v = classify(&r, &t);
        assert_eq!(v.region, Region::Outside);
        assert!((v.margin + 0.5).abs() < 1e-15);
    }

    #[test]
    fn dep_like_signature() {
        let t = tol();
        let z2: f64 = 0.2;
        let r = report_from_roots(
            6,
            vec![c(0.0, 0.0), c(16.0 * z2, 1e-9), c(16.0 * z2, -1e-9)],
            &t,
        );
        let sig = confluence_pattern(&r, &t);
        assert_eq!(sig.multiplicities, vec![1, 2]);
        assert_eq!(sig.zero_multiplicity, 1);
        assert_eq!(sig.to_string(), "[1,2]@0");
    }

    #[test]
    fn loosening_real_tol_never_hurts() {
        let strict = tol();
        let loose = ToleranceConfig {
            real_tol: 1e-3,
            ..strict
        };
        let r = report_from_roots(6, vec![c(1.0, 0.0), c(3.0, -1e-5), c(3.0, 1e-5)], &strict);
        let before = classify(&r, &strict).region;
        let after = classify(&r, &loose).region;
        assert!(!(before == Region::Inside && after == Region::Outside));
    }
}
