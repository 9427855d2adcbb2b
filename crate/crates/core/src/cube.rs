//! The cube process on `[−1, 1]^d`.
//!
//! A uniform point in a box has independent uniform coordinates, so the box
//! process is `d` independent copies of the uniform interval process. Axis
//! `i` of a replica draws from `rng.substream(i)`.

use serde::{Deserialize, Serialize};

use crate::distributions::DfForm;
use crate::error::domain;
use crate::interval::{run_scaled_logged, IntervalState};
use crate::invariants::InvariantLog;
use crate::{Result, RngStream};

/// Per-axis interval states of the current box.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeState {
    pub components: Vec<IntervalState>,
}

impl CubeState {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(domain("cube dimension must be at least 1"));
        }
        Ok(Self {
            components: vec![IntervalState::new(DfForm::uniform()); d],
        })
    }

    /// Edge lengths `m_i = 2 r_i`.
    pub fn edges(&self) -> Vec<f64> {
        self.components.iter().map(|c| 2.0 * c.radius()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeRun {
    /// `2n (m_i − 1)` per axis.
    pub scaled_edges: Vec<f64>,
    pub centers: Vec<f64>,
    /// `2n (max_i m_i − 1)`.
    pub scaled_max_edge: f64,
    /// Effective moves summed over the axes.
    pub changes: u64,
}

/// Runs `n` steps of the `d`-dimensional cube process.
pub fn cube_run(d: usize, n: u64, rng: &RngStream) -> Result<CubeRun> {
    let streams: Vec<RngStream> = (0..d as u64).map(|i| rng.substream(i)).collect();
    cube_run_with_streams(n, streams, &mut InvariantLog::new())
}

/// Cube run with an explicit stream per axis.
pub fn cube_run_with_streams(
    n: u64,
    streams: Vec<RngStream>,
    log: &mut InvariantLog,
) -> Result<CubeRun> {
    if streams.is_empty() {
        return Err(domain("cube dimension must be at least 1"));
    }
    let mut scaled_edges = Vec::with_capacity(streams.len());
    let mut centers = Vec::with_capacity(streams.len());
    let mut changes = 0;
    for mut stream in streams {
        let run = run_scaled_logged(IntervalState::new(DfForm::uniform()), n, &mut stream, log)?;
        // 2n(m − 1) = 4n(r − 1/2)
        scaled_edges.push(run.scaled);
        centers.push(run.center);
        changes += run.changes;
    }
    let scaled_max_edge = scaled_edges
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CubeRun {
        scaled_edges,
        centers,
        scaled_max_edge,
        changes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::run_scaled;

    #[test]
    fn one_dimension_is_the_interval_process() {
        let rng = RngStream::new(17, 4);
        let cube = cube_run(1, 2_000, &rng).unwrap();
        let mut axis = rng.substream(0);
        let seg = run_scaled(IntervalState::new(DfForm::uniform()), 2_000, &mut axis).unwrap();
        assert_eq!(cube.scaled_edges, vec![seg.scaled]);
        assert_eq!(cube.centers, vec![seg.center]);
        assert_eq!(cube.scaled_max_edge, seg.scaled);
    }

    #[test]
    fn permuting_streams_permutes_axes() {
        let rng = RngStream::new(1, 1);
        let streams: Vec<_> = (0..3).map(|i| rng.substream(i)).collect();
        let mut log = InvariantLog::new();
        let a = cube_run_with_streams(500, streams.clone(), &mut log).unwrap();
        let permuted = vec![streams[2].clone(), streams[0].clone(), streams[1].clone()];
        let b = cube_run_with_streams(500, permuted, &mut log).unwrap();
        assert_eq!(
            b.scaled_edges,
            vec![a.scaled_edges[2], a.scaled_edges[0], a.scaled_edges[1]]
        );
        assert_eq!(b.centers, vec![a.centers[2], a.centers[0], a.centers[1]]);
        assert_eq!(a.scaled_max_edge, b.scaled_max_edge);
        assert!(log.is_clean());
    }

    #[test]
    fn rejects_zero_dimension() {
        assert!(CubeState::new(0).is_err());
        assert!(cube_run(0, 10, &RngStream::new(0, 0)).is_err());
        assert_eq!(CubeState::new(2).unwrap().edges(), vec![2.0, 2.0]);
    }
}
