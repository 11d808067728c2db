//! Locating the horizon numerically: bisection along rays, slice scans and
//! seeded criteria-vs-oracle sampling.
//!
//! Everything here runs in double precision. Independent evaluations go
//! through rayon; results are always collected in index order.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain_model::{secular_form, ChainSpec};
use crate::criteria;
use crate::error::{Error, Result};
use crate::landmarks::spikes;
use crate::oracle;
use crate::tolerance::ToleranceConfig;
use crate::verdict::{Region, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Criteria,
    Oracle,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Criteria => "criteria",
            Method::Oracle => "oracle",
        }
    }
}

/// Region of a coupling vector under the chosen method.
pub fn evaluate(dim: usize, couplings: &[f64], method: Method, tol: &ToleranceConfig) -> Result<Verdict<f64>> {
    let spec = ChainSpec::new(dim, couplings.to_vec())?;
    match method {
        Method::Criteria => criteria::member(&secular_form(&spec)?, tol),
        Method::Oracle => Ok(oracle::classify(&oracle::spectrum(&spec, tol)?, tol)),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub couplings: Vec<f64>,
    /// Distance from the ray origin, or the coordinate along the scan axis.
    pub radius: f64,
    pub margin: f64,
    pub method: Method,
}

const RAY_STEPS: usize = 256;
const MAX_BISECTIONS: usize = 200;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Bisects on `[inside, outside]` along `point(r)` until the margin is within
/// the boundary tolerance or the bracket collapses. Returns the best point.
fn bisect(
    dim: usize,
    point: &dyn Fn(f64) -> Vec<f64>,
    mut inside: f64,
    mut outside: f64,
    method: Method,
    tol: &ToleranceConfig,
) -> Result<BoundaryPoint> {
    let mut best: Option<BoundaryPoint> = None;
    let keep = |r: f64, g: Vec<f64>, margin: f64, best: &mut Option<BoundaryPoint>| {
        if best.as_ref().is_none_or(|b| margin.abs() < b.margin.abs()) {
            *best = Some(BoundaryPoint {
                couplings: g,
                radius: r,
                margin,
                method,
            });
        }
    };
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        let g = point(mid);
        let v = evaluate(dim, &g, method, tol)?;
        keep(mid, g, v.margin, &mut best);
        match v.region {
            Region::Boundary => break,
            Region::Inside => inside = mid,
            Region::Outside => outside = mid,
        }
    }
    if best.is_none() {
        let g = point(inside);
        let margin = evaluate(dim, &g, method, tol)?.margin;
        keep(inside, g, margin, &mut best);
    }
    Ok(best.expect("at least one evaluation"))
}

/// Walks from `origin` along `direction` until the first non-inside point,
/// then bisects to the horizon. The search stops at three times the spike
/// radius.
pub fn ray_bisect(
    dim: usize,
    direction: &[f64],
    origin: &[f64],
    method: Method,
    tol: &ToleranceConfig,
) -> Result<BoundaryPoint> {
    let j = dim / 2;
    if direction.len() != j || origin.len() != j {
        return Err(Error::CouplingLength {
            dim,
            expected: j,
            got: if direction.len() != j { direction.len() } else { origin.len() },
        });
    }
    let length = norm(direction);
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument("direction must be a nonzero finite vector".into()));
    }
    let unit: Vec<f64> = direction.iter().map(|d| d / length).collect();
    let start = evaluate(dim, origin, method, tol)?;
    if start.region != Region::Inside {
        return Err(Error::OriginNotInside(format!("{origin:?} is {}", start.region.as_str())));
    }
    let cap = 3.0 * norm(&spikes::<f64>(dim)).max(1.0);
    let point = |r: f64| -> Vec<f64> { origin.iter().zip(&unit).map(|(o, u)| o + r * u).collect() };

    let step = cap / RAY_STEPS as f64;
    let mut last_inside = 0.0;
    for i in 1..=RAY_STEPS {
        let r = step * i as f64;
        let g = point(r);
        let v = evaluate(dim, &g, method, tol)?;
        match v.region {
            Region::Inside => last_inside = r,
            Region::Boundary => {
                return Ok(BoundaryPoint {
                    couplings: g,
                    radius: r,
                    margin: v.margin,
                    method,
                })
            }
            Region::Outside => return bisect(dim, &point, last_inside, r, method, tol),
        }
    }
    Err(Error::NoSignChange { cap })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub dim: usize,
    /// One or two 1-based coupling indices.
    pub free_axes: Vec<usize>,
    /// Full coupling vector; entries on free axes are overwritten.
    pub fixed: Vec<f64>,
    pub ranges: Vec<(f64, f64)>,
    pub resolution: Vec<usize>,
}

impl SliceSpec {
    pub fn validate(&self) -> Result<()> {
        let j = self.dim / 2;
        if self.dim < 2 {
            return Err(Error::InvalidDimension(self.dim));
        }
        let axes = self.free_axes.len();
        let bad = |msg: String| Err(Error::InvalidSlice(msg));
        if axes == 0 || axes > 2 {
            return bad(format!("expected one or two free axes, got {axes}"));
        }
        if self.free_axes.iter().any(|&a| a == 0 || a > j) {
            return bad(format!("free axes must lie in 1..={j}"));
        }
        if axes == 2 && self.free_axes[0] == self.free_axes[1] {
            return bad("free axes must be distinct".into());
        }
        if self.fixed.len() != j {
            return Err(Error::CouplingLength {
                dim: self.dim,
                expected: j,
                got: self.fixed.len(),
            });
        }
        if self.ranges.len() != axes || self.resolution.len() != axes {
            return bad("one range and one resolution per free axis".into());
        }
        if self.resolution.iter().any(|&r| r < 2) {
            return bad("resolution must be at least 2".into());
        }
        if self.ranges.iter().any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi)) {
            return bad("ranges must be finite with lo < hi".into());
        }
        if self.fixed.iter().any(|g| !g.is_finite()) {
            return bad("fixed couplings must be finite".into());
        }
        Ok(())
    }

    fn axis_values(&self, axis: usize) -> Vec<f64> {
        let (lo, hi) = self.ranges[axis];
        let n = self.resolution[axis];
        (0..n)
            .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect()
    }

    fn point(&self, coords: &[f64]) -> Vec<f64> {
        let mut g = self.fixed.clone();
        for (&axis, &x) in self.free_axes.iter().zip(coords) {
            g[axis - 1] = x;
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceMetadata {
    pub tolerances: ToleranceConfig,
    pub seed: Option<u64>,
    pub runtime_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceResult {
    pub slice: SliceSpec,
    pub method: Method,
    /// Ordered by scan column, then by position along the column.
    pub boundary_points: Vec<BoundaryPoint>,
    /// Inside segments along the free axis of a 1D slice.
    pub segments: Vec<(f64, f64)>,
    /// Region codes on the grid, row-major with the first free axis slowest.
    pub grid_verdicts: Vec<i8>,
    pub metadata: TraceMetadata,
}

struct Column {
    points: Vec<BoundaryPoint>,
    segments: Vec<(f64, f64)>,
    codes: Vec<i8>,
}

/// Scans one line of the grid, bisecting at every inside/non-inside switch.
fn scan_line(
    slice: &SliceSpec,
    prefix: &[f64],
    values: &[f64],
    method: Method,
    tol: &ToleranceConfig,
) -> Result<Column> {
    let dim = slice.dim;
    let at = |x: f64| -> Vec<f64> {
        let mut coords = prefix.to_vec();
        coords.push(x);
        slice.point(&coords)
    };
    let verdicts = values
        .iter()
        .map(|&x| evaluate(dim, &at(x), method, tol))
        .collect::<Result<Vec<_>>>()?;
    let codes: Vec<i8> = verdicts.iter().map(|v| v.region.code()).collect();

    let mut points = Vec::new();
    let mut segments = Vec::new();
    let mut seg_start: Option<f64> = None;
    for (i, v) in verdicts.iter().enumerate() {
        let x = values[i];
        let inside = v.region == Region::Inside;
        if v.region == Region::Boundary {
            points.push(BoundaryPoint {
                couplings: at(x),
                radius: x,
                margin: v.margin,
                method,
            });
        }
        if i > 0 {
            let prev = &verdicts[i - 1];
            let was_inside = prev.region == Region::Inside;
            let crossing = was_inside != inside
                && prev.region != Region::Boundary
                && v.region != Region::Boundary;
            if crossing {
                let (good, bad) = if was_inside { (values[i - 1], x) } else { (x, values[i - 1]) };
                let p = bisect(dim, &at, good, bad, method, tol)?;
                if was_inside {
                    if let Some(s) = seg_start.take() {
                        segments.push((s, p.radius));
                    }
                } else {
                    seg_start = Some(p.radius);
                }
                points.push(p);
            }
        }
        match (inside, seg_start) {
            (true, None) => {
                let from_boundary = i > 0 && verdicts[i - 1].region == Region::Boundary;
                seg_start = Some(if from_boundary { values[i - 1] } else { x });
            }
            (false, Some(s)) if v.region == Region::Boundary => {
                segments.push((s, x));
                seg_start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = seg_start {
        segments.push((s, values[values.len() - 1]));
    }
    Ok(Column {
        points,
        segments,
        codes,
    })
}

/// Scans a 1D or 2D slice of coupling space. In 2D every grid column (fixed
/// first axis) is scanned along the second axis.
pub fn slice_trace(slice: &SliceSpec, method: Method, tol: &ToleranceConfig) -> Result<TraceResult> {
    slice.validate()?;
    tol.validate()?;
    let started = Instant::now();
    let mut result = TraceResult {
        slice: slice.clone(),
        method,
        boundary_points: Vec::new(),
        segments: Vec::new(),
        grid_verdicts: Vec::new(),
        metadata: TraceMetadata {
            tolerances: *tol,
            seed: None,
            runtime_secs: 0.0,
        },
    };
    if slice.free_axes.len() == 1 {
        let col = scan_line(slice, &[], &slice.axis_values(0), method, tol)?;
        result.boundary_points = col.points;
        result.segments = col.segments;
        result.grid_verdicts = col.codes;
    } else {
        let first = slice.axis_values(0);
        let second = slice.axis_values(1);
        let columns = first
            .par_iter()
            .map(|&x| scan_line(slice, &[x], &second, method, tol))
            .collect::<Result<Vec<_>>>()?;
        for col in columns {
            result.boundary_points.extend(col.points);
            result.grid_verdicts.extend(col.codes);
        }
    }
    result.metadata.runtime_secs = started.elapsed().as_secs_f64();
    Ok(result)
}

/// The default sampling box `[0, 1.5 spike_n]` per coupling.
pub fn default_box(dim: usize) -> Vec<(f64, f64)> {
    spikes::<f64>(dim).into_iter().map(|s| (0.0, 1.5 * s)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub index: usize,
    pub couplings: Vec<f64>,
    pub criteria: Region,
    pub oracle: Region,
    pub criteria_margin: f64,
    pub oracle_margin: f64,
    /// Whether either margin lies within the band tolerance.
    pub in_band: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementReport {
    pub dim: usize,
    pub count: usize,
    pub seed: u64,
    pub agreed: usize,
    pub agreement_rate: f64,
    pub disagreements: Vec<Disagreement>,
    /// Samples where a solver failed, with the error message.
    pub failures: Vec<(usize, String)>,
    pub runtime_secs: f64,
}

impl AgreementReport {
    /// No failures and every disagreement within the band.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.disagreements.iter().all(|d| d.in_band)
    }

    pub fn out_of_band(&self) -> usize {
        self.disagreements.iter().filter(|d| !d.in_band).count()
    }
}

/// Draws `count` uniform samples from the box with a ChaCha8 stream seeded
/// by `seed`, and compares the closed-form verdict with the oracle's.
pub fn sample_verify(
    dim: usize,
    bounds: &[(f64, f64)],
    count: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<AgreementReport> {
    tol.validate()?;
    let j = dim / 2;
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    if j > 5 {
        return Err(Error::UnsupportedJ(j));
    }
    if bounds.len() != j {
        return Err(Error::CouplingLength {
            dim,
            expected: j,
            got: bounds.len(),
        });
    }
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<Vec<f64>> = (0..count)
        .map(|_| bounds.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>()).collect())
        .collect();

    let outcomes: Vec<std::result::Result<(Verdict<f64>, Verdict<f64>), String>> = samples
        .par_iter()
        .map(|g| {
            let c = evaluate(dim, g, Method::Criteria, tol).map_err(|e| e.to_string())?;
            let o = evaluate(dim, g, Method::Oracle, tol).map_err(|e| e.to_string())?;
            Ok((c, o))
        })
        .collect();

    let mut report = AgreementReport {
        dim,
        count,
        seed,
        agreed: 0,
        agreement_rate: 1.0,
        disagreements: Vec::new(),
        failures: Vec::new(),
        runtime_secs: 0.0,
    };
    for (index, (g, outcome)) in samples.into_iter().zip(outcomes).enumerate() {
        match outcome {
            Err(msg) => report.failures.push((index, msg)),
            Ok((c, o)) if c.region == o.region => report.agreed += 1,
            Ok((c, o)) => {
                let in_band = c.margin.abs() <= tol.band_tol || o.margin.abs() <= tol.band_tol;
                report.disagreements.push(Disagreement {
                    index,
                    couplings: g,
                    criteria: c.region,
                    oracle: o.region,
                    criteria_margin: c.margin,
                    oracle_margin: o.margin,
                    in_band,
                });
            }
        }
    }
    if count > 0 {
        report.agreement_rate = report.agreed as f64 / count as f64;
    }
    report.runtime_secs = started.elapsed().as_secs_f64();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn ray_n2_and_n3() {
        for method in [Method::Criteria, Method::Oracle] {
            let p = ray_bisect(2, &[1.0], &[0.0], method, &tol()).unwrap();
            assert!((p.radius - 1.0).abs() < 1e-9, "{p:?}");
            let p = ray_bisect(3, &[1.0], &[0.0], method, &tol()).unwrap();
            assert!((p.radius - 2f64.sqrt()).abs() < 1e-9, "{p:?}");
            assert!(p.margin.abs() <= 1e-9);
        }
    }

    #[test]
    fn ray_towards_n6_spike() {
        let spike = spikes::<f64>(6);
        let p = ray_bisect(6, &spike, &[0.0; 3], Method::Oracle, &tol()).unwrap();
        // The float spike direction leaves the exact ray by ~1e-16, which at
        // a third-order cusp moves the exit point by ~1e-5.
        assert!((p.radius - norm(&spike)).abs() < 1e-4, "{p:?}");
    }

    #[test]
    fn ray_errors() {
        assert!(matches!(
            ray_bisect(2, &[1.0], &[2.0], Method::Oracle, &tol()),
            Err(Error::OriginNotInside(_))
        ));
        assert!(ray_bisect(2, &[0.0], &[0.0], Method::Oracle, &tol()).is_err());
    }

    #[test]
    fn one_dimensional_slice() {
        let slice = SliceSpec {
            dim: 2,
            free_axes: vec![1],
            fixed: vec![0.0],
            ranges: vec![(-2.0, 2.0)],
            resolution: vec![41],
        };
        let r = slice_trace(&slice, Method::Criteria, &tol()).unwrap();
        assert_eq!(r.segments.len(), 1);
        let (a, b) = r.segments[0];
        assert!((a + 1.0).abs() < 1e-9 && (b - 1.0).abs() < 1e-9, "{:?}", r.segments);
    }

    #[test]
    fn minimal_resolution() {
        let slice = SliceSpec {
            dim: 4,
            free_axes: vec![1, 2],
            fixed: vec![0.0, 0.0],
            ranges: vec![(0.0, 4.0), (0.0, 4.0)],
            resolution: vec![2, 2],
        };
        let r = slice_trace(&slice, Method::Oracle, &tol()).unwrap();
        assert_eq!(r.grid_verdicts.len(), 4);
    }

    #[test]
    fn slice_validation() {
        let mut slice = SliceSpec {
            dim: 4,
            free_axes: vec![1, 1],
            fixed: vec![0.0, 0.0],
            ranges: vec![(0.0, 1.0), (0.0, 1.0)],
            resolution: vec![3, 3],
        };
        assert!(matches!(slice.validate(), Err(Error::InvalidSlice(_))));
        slice.free_axes = vec![1, 2];
        slice.resolution = vec![1, 3];
        assert!(matches!(slice.validate(), Err(Error::InvalidSlice(_))));
    }

    #[test]
    fn empty_sample_report() {
        let r = sample_verify(4, &default_box(4), 0, 7, &tol()).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.disagreements.is_empty());
        assert!(r.passed());
    }
}
