//! Subcommand bodies. Each output is a pure function of its arguments.

use std::io::Write;

use diminishing::cube::CubeState;
use diminishing::distributions::DfForm;
use diminishing::interval::IntervalState;
use diminishing::polygon::PolygonState;
use diminishing::simplex::SimplexState;
use diminishing::stats::{run_experiment_with_diagnostics, Diagnostics, ProcessKind, RunConfig};
use diminishing::verify::{figure_data, full_suite, CheckLine, CheckReport, Figure, Sizes};
use diminishing::RngStream;
use serde::Serialize;

use crate::output::{emit_csv, experiment_header, CsvSink, SampleRecord, TrajectoryRecord};
use crate::Result;

/// Criteria covered by [`verify`] with their names. Oracle agreement of
/// the clipping code is exercised by the test suite instead.
pub const CRITERIA: [(u8, &str); 9] = [
    (1, "interval Weibull rate"),
    (2, "interval center law"),
    (3, "cube maximum of exponentials"),
    (4, "simplex Weibull law"),
    (6, "pentagon limit structure"),
    (7, "pentagon survival envelope"),
    (8, "figure ranges"),
    (9, "rate discrimination"),
    (10, "structural invariants"),
];

enum Walker {
    Interval(IntervalState),
    Cube(CubeState, Vec<RngStream>),
    Simplex(SimplexState, Vec<f64>),
    Polygon(PolygonState),
}

impl Walker {
    /// Cube axes draw from per-axis substreams, as in experiments.
    fn new(process: ProcessKind, rng: &RngStream) -> Result<Self> {
        Ok(match process {
            ProcessKind::Interval { c, delta } => {
                Self::Interval(IntervalState::new(DfForm::new(c, delta)?))
            }
            ProcessKind::Cube { d } => Self::Cube(
                CubeState::new(d)?,
                (0..d as u64).map(|i| rng.substream(i)).collect(),
            ),
            ProcessKind::Simplex { d } => {
                Self::Simplex(SimplexState::new(d)?, Vec::with_capacity(d + 1))
            }
            ProcessKind::Polygon { k } => Self::Polygon(PolygonState::new(k)?),
        })
    }

    fn step(&mut self, rng: &mut RngStream) -> Result<bool> {
        Ok(match self {
            Self::Interval(s) => s.step(rng),
            Self::Cube(s, streams) => s
                .components
                .iter_mut()
                .zip(streams.iter_mut())
                .fold(false, |changed, (c, r)| c.step(r) | changed),
            Self::Simplex(s, w) => s.step(rng, w),
            Self::Polygon(s) => s.step(rng)?,
        })
    }

    /// Largest height minus its limit, and the state columns.
    fn observe(&self) -> (f64, Vec<f64>) {
        match self {
            Self::Interval(s) => (s.excess(), vec![s.center(), s.radius()]),
            Self::Cube(s, _) => {
                let edges = s.edges();
                let max = edges.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let state = s
                    .components
                    .iter()
                    .map(|c| c.center())
                    .chain(edges)
                    .collect();
                (max - 1.0, state)
            }
            Self::Simplex(s, _) => {
                let mut state = vec![s.height()];
                state.extend(s.center_barycentric());
                (s.height() - s.rho(), state)
            }
            Self::Polygon(s) => {
                let heights = s.heights();
                let max = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut state = vec![s.area()];
                state.extend(heights);
                (max - s.rho(), state)
            }
        }
    }
}

/// Writes steps `0..=n` of replica `replica` of `cfg`; the random stream is
/// the one the same replica uses in [`experiment`].
pub fn simulate<W: Write>(cfg: &RunConfig, replica: u64, dest: W) -> Result<usize> {
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed, replica);
    let mut walker = Walker::new(cfg.process, &rng)?;
    let mut sink = CsvSink::new(&TrajectoryRecord::header(&cfg.process), dest)?;
    let mut changed = false;
    for step in 0..=cfg.n {
        if step > 0 {
            changed = walker.step(&mut rng)?;
        }
        let (excess, state) = walker.observe();
        sink.push(&TrajectoryRecord {
            replica,
            step,
            changed,
            excess,
            state,
        })?;
    }
    sink.finish()
}

/// Runs every replica and writes one row per replica.
pub fn experiment<W: Write>(cfg: &RunConfig, dest: W) -> Result<(usize, Diagnostics)> {
    let (samples, diagnostics) = run_experiment_with_diagnostics(cfg)?;
    let rows = emit_csv(&experiment_header(&cfg.process), &samples, dest)?;
    Ok((rows, diagnostics))
}

/// Writes the `(replica, value)` data of a figure.
pub fn figure<W: Write>(which: Figure, n: u64, replicas: u64, seed: u64, dest: W) -> Result<usize> {
    let rows: Vec<SampleRecord> = figure_data(which, n, replicas, seed)?
        .into_iter()
        .map(|s| SampleRecord {
            replica: s.replica,
            value: s.value,
        })
        .collect();
    emit_csv(&SampleRecord::header(), &rows, dest)
}

pub fn verify(sizes: &Sizes, seed: u64) -> Result<CheckReport> {
    Ok(full_suite(sizes, seed)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionVerdict {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
}

/// Machine-readable form of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub sizes: Sizes,
    pub passed: bool,
    pub criteria: Vec<CriterionVerdict>,
    pub lines: Vec<CheckLine>,
}

impl VerifySummary {
    pub fn new(report: &CheckReport, sizes: &Sizes, seed: u64) -> Self {
        Self {
            seed,
            sizes: sizes.clone(),
            passed: report.passed(),
            criteria: verdicts(report),
            lines: report.lines.clone(),
        }
    }
}

pub fn verdicts(report: &CheckReport) -> Vec<CriterionVerdict> {
    CRITERIA
        .iter()
        .map(|&(criterion, name)| CriterionVerdict {
            criterion,
            name,
            passed: report.criterion_passed(criterion).unwrap_or(false),
        })
        .collect()
}
