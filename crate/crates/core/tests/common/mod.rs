#![allow(dead_code)]

pub mod oracle;

use diminishing::polygon::PolygonState;
use diminishing::simplex::{sample_weights, SimplexFrame, SimplexState};
use diminishing::RngStream;
use oracle::{planar_area, set_distance, width, HalfSpaces};

/// Largest disagreement found between engine and oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct Agreement {
    pub vertex: f64,
    pub height: f64,
    pub area: f64,
    pub changes: u64,
}

impl Agreement {
    pub fn worst(&self) -> f64 {
        self.vertex.max(self.height).max(self.area)
    }
}

/// Runs `steps` polygon steps through engine and oracle side by side. With
/// `seek_changes`, each step resamples (up to 10 000 times) until the point
/// lands in a change region, so that most steps actually cut.
pub fn polygon_agreement(k: usize, steps: usize, seed: u64, seek_changes: bool) -> Agreement {
    let mut rng = RngStream::new(seed, k as u64);
    let mut state = PolygonState::new(k).unwrap();
    let rho = state.rho();
    let normals: Vec<Vec<f64>> = state.dirs().iter().map(|d| d.to_vec()).collect();
    let mut body = HalfSpaces::new(2);
    for n in &normals {
        body.push(n.clone(), -rho);
    }
    let mut agg = Agreement::default();
    for _ in 0..steps {
        let mut p = state.sample_point(&mut rng).unwrap();
        if seek_changes {
            for _ in 0..10_000 {
                let hits = state
                    .dirs()
                    .iter()
                    .zip(state.offsets())
                    .any(|(d, o)| p[0] * d[0] + p[1] * d[1] - rho > *o);
                if hits {
                    break;
                }
                p = state.sample_point(&mut rng).unwrap();
            }
        }
        if state.step_with_point(p).unwrap() {
            agg.changes += 1;
        }
        body.cut_by_translate(&p, &normals, rho);
        let verts = body.vertices();
        let snap = state.snapshot();
        let engine: Vec<Vec<f64>> = state.hull().iter().map(|v| v.to_vec()).collect();
        agg.vertex = agg.vertex.max(set_distance(&engine, &verts));
        for (n, h) in normals.iter().zip(&snap.heights) {
            agg.height = agg.height.max((width(&verts, n) - h).abs());
        }
        agg.area = agg.area.max((planar_area(&verts) - snap.area).abs());
    }
    agg
}

/// Same comparison for the simplex process.
pub fn simplex_agreement(d: usize, steps: usize, seed: u64, seek_changes: bool) -> Agreement {
    let mut rng = RngStream::new(seed, 100 + d as u64);
    let frame = SimplexFrame::new(d).unwrap();
    let mut state = SimplexState::new(d).unwrap();
    let rho = state.rho();
    let normals: Vec<Vec<f64>> = frame.dirs().to_vec();
    let mut body = HalfSpaces::new(d);
    for n in &normals {
        body.push(n.clone(), -2.0 * rho / (d + 1) as f64);
    }
    let mut w = Vec::new();
    let mut agg = Agreement::default();
    for _ in 0..steps {
        sample_weights(&mut rng, d, &mut w);
        if seek_changes {
            for _ in 0..10_000 {
                if w.iter().any(|&x| state.height() * x > rho) {
                    break;
                }
                sample_weights(&mut rng, d, &mut w);
            }
        }
        let p = state.point_from_weights(&frame, &w);
        if state.step_with_weights(&w) {
            agg.changes += 1;
        }
        body.cut_by_translate(&p, &normals, rho);
        let verts = body.vertices();
        agg.vertex = agg
            .vertex
            .max(set_distance(&state.vertices(&frame), &verts));
        for n in &normals {
            agg.height = agg.height.max((width(&verts, n) - state.height()).abs());
        }
    }
    agg
}
