//! Goodness of fit, moments, survival envelopes and replica orchestration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::cube_run_with_streams;
use crate::distributions::{DfForm, LawSpec};
use crate::error::config;
use crate::interval::{run_scaled_logged, IntervalState};
use crate::invariants::InvariantLog;
use crate::polygon::{run_polygon, PolygonMonitor};
use crate::simplex::run_full;
use crate::{Error, Result, RngStream};

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// `cdf`, using both one-sided gaps at every sample point.
pub fn ks_stat(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("ks_stat"));
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            ((i + 1) as f64 / n - f).max(f - i as f64 / n)
        })
        .fold(0.0, f64::max))
}

/// [`ks_stat`] against an analytic law, optionally shifted so that the law
/// of `X + shift` is tested.
pub fn ks_law(samples: &[f64], law: &LawSpec, shift: f64) -> Result<f64> {
    law.validate()?;
    ks_stat(samples, |x| law.cdf(x - shift).expect("validated law"))
}

/// Two-sample Kolmogorov–Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("ks_two_sample"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    ys.sort_unstable_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(d)
}

/// Plug-in estimate of `E|X|^α` with its CLT standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moment {
    pub mean: f64,
    pub std_error: f64,
}

pub fn moment_estimate(samples: &[f64], alpha: f64) -> Result<Moment> {
    if samples.is_empty() {
        return Err(Error::Empty("moment_estimate"));
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(config(format!("moment order α = {alpha} must be positive")));
    }
    let vals: Vec<f64> = samples.iter().map(|x| x.abs().powf(alpha)).collect();
    let (mean, var) = mean_var(&vals);
    Ok(Moment {
        mean,
        std_error: (var / vals.len() as f64).sqrt(),
    })
}

/// Mean and unbiased variance (0 for a single value).
fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var)
}

pub fn median(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("median"));
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len();
    Ok(if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    })
}

/// Pearson correlation of two equally long samples.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(Error::Empty("correlation"));
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    let cov = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - ma) * (y - mb))
        .sum::<f64>()
        / (a.len() - 1) as f64;
    Ok(cov / (va * vb).sqrt())
}

/// Fraction of samples strictly above `x`.
pub fn empirical_survival(samples: &[f64], x: f64) -> f64 {
    samples.iter().filter(|&&s| s > x).count() as f64 / samples.len() as f64
}

/// One grid point of an envelope comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopePoint {
    pub x: f64,
    pub lower: f64,
    pub survival: f64,
    pub upper: f64,
    pub inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub points: Vec<EnvelopePoint>,
    pub tol: f64,
}

impl EnvelopeReport {
    pub fn passed(&self) -> bool {
        self.points.iter().all(|p| p.inside)
    }

    /// Largest distance by which the survival leaves the band (0 inside).
    pub fn worst_gap(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.lower - p.survival).max(p.survival - p.upper).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// Checks `lower(x) − tol ≤ P̂{X > x} ≤ upper(x) + tol` at every grid point.
pub fn envelope_check(
    samples: &[f64],
    lower: impl Fn(f64) -> f64,
    upper: impl Fn(f64) -> f64,
    grid: &[f64],
    tol: f64,
) -> Result<EnvelopeReport> {
    if samples.is_empty() {
        return Err(Error::Empty("envelope_check"));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &x in grid {
        let (lo, hi) = (lower(x), upper(x));
        if lo > hi {
            return Err(config(format!(
                "envelope is malformed at x = {x}: lower {lo} exceeds upper {hi}"
            )));
        }
        let survival = empirical_survival(samples, x);
        points.push(EnvelopePoint {
            x,
            lower: lo,
            survival,
            upper: hi,
            inside: lo - tol <= survival && survival <= hi + tol,
        });
    }
    Ok(EnvelopeReport { points, tol })
}

/// Runs `f(replica, stream)` for every replica, each on
/// `RngStream::new(seed, replica)`, and returns the results in replica
/// order. Errors carry the failing replica index.
pub fn par_replicas<T, F>(replicas: u64, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, RngStream) -> Result<T> + Sync,
{
    (0..replicas)
        .into_par_iter()
        .map(|r| {
            f(r, RngStream::new(seed, r)).map_err(|e| Error::Replica {
                replica: r,
                source: Box::new(e),
            })
        })
        .collect()
}

/// A process together with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process", rename_all = "lowercase")]
pub enum ProcessKind {
    Interval { c: f64, delta: f64 },
    Cube { d: usize },
    Simplex { d: usize },
    Polygon { k: usize },
}

impl ProcessKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Interval { .. } => "interval",
            Self::Cube { .. } => "cube",
            Self::Simplex { .. } => "simplex",
            Self::Polygon { .. } => "polygon",
        }
    }

    /// `a` in the rate statistic `n^a · (excess height)`.
    pub fn scaling_exponent(&self) -> f64 {
        match *self {
            Self::Interval { delta, .. } => delta.recip(),
            Self::Cube { .. } => 1.0,
            Self::Simplex { d } => 1.0 / d as f64,
            Self::Polygon { k } if k % 2 == 1 => 0.5,
            Self::Polygon { .. } => 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Interval { c, delta } => {
                if !(0.0..=1.0).contains(&c) {
                    return Err(config(format!("c = {c} must lie in [0, 1]")));
                }
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(config(format!("delta = {delta} must be positive")));
                }
                Ok(())
            }
            Self::Cube { d } | Self::Simplex { d } if d == 0 => Err(config("d must be at least 1")),
            Self::Polygon { k } if k < 5 => Err(config(format!("k = {k} must be at least 5"))),
            _ => Ok(()),
        }
    }
}

/// One experiment: `replicas` independent runs of `n` steps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub process: ProcessKind,
    pub n: u64,
    pub replicas: u64,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(config("n must be at least 1"));
        }
        if self.replicas == 0 {
            return Err(config("replicas must be at least 1"));
        }
        self.process.validate()
    }
}

/// Per-replica outcome of an experiment.
///
/// `value` is the rate statistic: `4 n^{1/δ}(r_n − 1/2)` for intervals,
/// `2n(max edge − 1)` for cubes, `((d+1)n)^{1/d}(m_n − ρ_d)/ρ_d` for
/// simplices, and `n^a (m_n − ρ_k)` for polygons (`a = 1/2` for odd `k`,
/// `1` for even `k`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledSample {
    pub process: String,
    pub replica: u64,
    pub n: u64,
    pub exponent: f64,
    pub value: f64,
    /// Excess of the maximal height over its limit.
    pub excess: f64,
    /// Center (interval), per-axis centers (cube) or barycentric center
    /// coordinates (simplex); empty for polygons.
    pub center: Vec<f64>,
    /// Area of the final body (polygons only).
    pub area: Option<f64>,
    pub changes: u64,
}

/// Invariant bookkeeping gathered over all replicas of an experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub log: InvariantLog,
    pub polygon: Option<PolygonMonitor>,
}

impl Diagnostics {
    fn merge(&mut self, other: Diagnostics) {
        self.log.merge(&other.log);
        if let Some(p) = other.polygon {
            match &mut self.polygon {
                Some(mine) => mine.merge(&p),
                None => self.polygon = Some(p),
            }
        }
    }

    /// No structural invariant was violated.
    pub fn is_clean(&self) -> bool {
        self.log.is_clean() && self.polygon.as_ref().is_none_or(|p| p.log.is_clean())
    }
}

/// Runs every replica of `cfg` and returns the samples in replica order.
pub fn run_experiment(cfg: &RunConfig) -> Result<Vec<ScaledSample>> {
    run_experiment_with_diagnostics(cfg).map(|(s, _)| s)
}

pub fn run_experiment_with_diagnostics(
    cfg: &RunConfig,
) -> Result<(Vec<ScaledSample>, Diagnostics)> {
    cfg.validate()?;
    let results = par_replicas(cfg.replicas, cfg.seed, |r, rng| run_replica(cfg, r, rng))?;
    let mut diagnostics = Diagnostics::default();
    let samples = results
        .into_iter()
        .map(|(s, d)| {
            diagnostics.merge(d);
            s
        })
        .collect();
    Ok((samples, diagnostics))
}

fn run_replica(
    cfg: &RunConfig,
    replica: u64,
    mut rng: RngStream,
) -> Result<(ScaledSample, Diagnostics)> {
    let n = cfg.n;
    let mut diag = Diagnostics::default();
    let mut sample = ScaledSample {
        process: cfg.process.name().to_string(),
        replica,
        n,
        exponent: cfg.process.scaling_exponent(),
        value: 0.0,
        excess: 0.0,
        center: Vec::new(),
        area: None,
        changes: 0,
    };
    match cfg.process {
        ProcessKind::Interval { c, delta } => {
            let run = run_scaled_logged(
                IntervalState::new(DfForm::new(c, delta)?),
                n,
                &mut rng,
                &mut diag.log,
            )?;
            sample.value = run.scaled;
            sample.excess = run.excess;
            sample.center = vec![run.center];
            sample.changes = run.changes;
        }
        ProcessKind::Cube { d } => {
            let streams = (0..d as u64).map(|i| rng.substream(i)).collect();
            let run = cube_run_with_streams(n, streams, &mut diag.log)?;
            sample.value = run.scaled_max_edge;
            sample.excess = run.scaled_max_edge / (2.0 * n as f64);
            sample.center = run.centers;
            sample.changes = run.changes;
        }
        ProcessKind::Simplex { d } => {
            let run = run_full(d, n, &mut rng, &mut diag.log)?;
            sample.value = run.scaled;
            sample.excess = run.excess;
            sample.center = run.center_barycentric;
            sample.changes = run.changes;
        }
        ProcessKind::Polygon { k } => {
            let mut monitor = PolygonMonitor::new();
            let run = run_polygon(k, n, &mut rng, &mut monitor)?;
            sample.value = (n as f64).powf(sample.exponent) * run.excess;
            sample.excess = run.excess;
            sample.area = Some(run.area);
            sample.changes = run.changes;
            diag.polygon = Some(monitor);
        }
    }
    Ok((sample, diag))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_examples() {
        let uniform = |x: f64| x.clamp(0.0, 1.0);
        assert_close!(ks_stat(&[0.25, 0.5, 0.75], uniform).unwrap(), 0.25, 1e-15);
        assert_close!(ks_stat(&[0.5], uniform).unwrap(), 0.5, 1e-15);
        assert_close!(ks_stat(&[0.75, 0.25, 0.5], uniform).unwrap(), 0.25, 1e-15);
        assert!(matches!(ks_stat(&[], uniform), Err(Error::Empty(_))));
    }

    #[test]
    fn two_sample_ks() {
        assert_close!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0, 0.0);
        assert_close!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0, 0.0);
        assert_close!(ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.5, 0.0);
        assert!(ks_two_sample(&[], &[1.0]).is_err());
    }

    #[test]
    fn moment_examples() {
        assert_close!(
            moment_estimate(&[1.0, 2.0, 3.0], 1.0).unwrap().mean,
            2.0,
            1e-15
        );
        assert_close!(
            moment_estimate(&[1.0, 2.0, 3.0], 2.0).unwrap().mean,
            14.0 / 3.0,
            1e-14
        );
        assert_close!(moment_estimate(&[-2.0], 1.0).unwrap().mean, 2.0, 0.0);
        assert!(moment_estimate(&[], 1.0).is_err());
        assert!(moment_estimate(&[1.0], 0.0).is_err());
    }

    #[test]
    fn median_and_correlation() {
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 2.5);
        assert_close!(
            correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(),
            1.0,
            1e-15
        );
        assert_close!(
            correlation(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(),
            -1.0,
            1e-15
        );
    }

    #[test]
    fn envelope_examples() {
        let r = envelope_check(&[0.3, 0.7], |_| 0.0, |_| 1.0, &[0.5], 0.0).unwrap();
        assert!(r.passed());
        assert_eq!(r.points[0].survival, 0.5);
        let bad = envelope_check(&[0.3], |_| 0.8, |_| 0.2, &[0.5], 0.0);
        assert!(matches!(bad, Err(Error::Config(_))));
        let miss = envelope_check(&[0.3, 0.7], |_| 0.9, |_| 1.0, &[0.5], 0.03).unwrap();
        assert!(!miss.passed());
        assert_close!(miss.worst_gap(), 0.4, 1e-15);
    }

    #[test]
    fn config_validation() {
        let mut cfg = RunConfig {
            process: ProcessKind::Interval { c: 1.5, delta: 1.0 },
            n: 10,
            replicas: 2,
            seed: 1,
        };
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("c = 1.5") && err.contains("[0, 1]"), "{err}");
        cfg.process = ProcessKind::Polygon { k: 4 };
        assert!(cfg.validate().is_err());
        cfg.process = ProcessKind::Simplex { d: 2 };
        cfg.n = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn experiments_are_deterministic_and_ordered() {
        for process in [
            ProcessKind::Interval { c: 0.3, delta: 2.0 },
            ProcessKind::Cube { d: 2 },
            ProcessKind::Simplex { d: 3 },
            ProcessKind::Polygon { k: 7 },
        ] {
            let cfg = RunConfig {
                process,
                n: 200,
                replicas: 6,
                seed: 99,
            };
            let a = run_experiment(&cfg).unwrap();
            let b = run_experiment(&cfg).unwrap();
            assert_eq!(a, b);
            assert_eq!(
                a.iter().map(|s| s.replica).collect::<Vec<_>>(),
                (0..6).collect::<Vec<_>>()
            );
            assert!(a.iter().all(|s| s.value.is_finite() && s.value >= 0.0));
        }
    }

    #[test]
    fn replica_errors_name_the_replica() {
        let res: Result<Vec<()>> =
            par_replicas(
                4,
                0,
                |r, _| {
                    if r == 2 {
                        Err(config("boom"))
                    } else {
                        Ok(())
                    }
                },
            );
        assert!(matches!(res, Err(Error::Replica { replica: 2, .. })));
    }
}
