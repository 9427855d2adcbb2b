//! The regular `k`-gon process.
//!
//! `K` is the regular `k`-gon with circumradius 1 and a vertex at `(0, 1)`;
//! its inradius is `ρ_k = cos(π/k)`. Every body of the process is an
//! intersection of half-planes `⟨x, d_i⟩ ≥ o_i` with the `k` fixed unit
//! directions `d_i` of `K`, so a state is just its offset vector and a step
//! is the support update `o_i ← max(o_i, ⟨p, d_i⟩ − ρ_k)`.
//!
//! For odd `k` the directions are the vertex directions of `K` (the side
//! opposite vertex `i` has inner normal `d_i`); for even `k` they are the
//! inner side normals. Offsets are kept tight: every line touches the body,
//! which makes `⟨x, d_i⟩ ≥ o_i + ρ_k` exactly the change region of side `i`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::domain;
use crate::geometry::{
    area, clip_halfplane, cross, dot, intersect_lines, signed_area, sub, triangle_point, Point,
};
use crate::invariants::InvariantLog;
use crate::{Error, Result, RngStream};

/// Tolerance for geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Offsets closer than this to the tight support value are left alone.
const TIGHT_TOL: f64 = 1e-12;

/// A `k`-gon state in fixed-normal offset form.
#[derive(Clone, Debug)]
pub struct PolygonState {
    k: usize,
    rho: f64,
    dirs: Vec<Point>,
    offsets: Vec<f64>,
    /// `C_j`: intersection of lines `j` and `j + 1`.
    cycle: Vec<Point>,
    /// Distinct vertices in counter-clockwise order.
    hull: Vec<Point>,
    /// Cumulative areas of the fan triangles `(hull[0], hull[i], hull[i+1])`.
    fan: Vec<f64>,
}

impl PartialEq for PolygonState {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.offsets == other.offsets
    }
}

/// Derived quantities of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonSnapshot {
    /// `A_i`, the vertex of largest extent in direction `d_i` (repeated when
    /// sides degenerate).
    pub vertices: Vec<Point>,
    /// `m_i`, the width of the body in direction `d_i`.
    pub heights: Vec<f64>,
    pub max_height: f64,
    pub area: f64,
    /// `|R_i|`, area of the part where `⟨x, d_i⟩ ≥ o_i + ρ_k`.
    pub region_areas: Vec<f64>,
    pub total_change_area: f64,
    /// The nonempty change regions are pairwise disjoint.
    pub reduced: bool,
}

/// Unit constraint directions for the `k`-gon.
pub fn directions(k: usize) -> Vec<Point> {
    let kf = k as f64;
    (0..k)
        .map(|i| {
            let theta = if k % 2 == 1 {
                PI / 2.0 + 2.0 * PI * (i as f64 - (kf + 1.0) / 2.0) / kf
            } else {
                PI / 2.0 + 2.0 * PI * i as f64 / kf + PI / kf + PI
            };
            [theta.cos(), theta.sin()]
        })
        .collect()
}

/// Vertices of the reference `k`-gon, counter-clockwise from `(0, 1)`.
pub fn reference_vertices(k: usize) -> Vec<Point> {
    (0..k)
        .map(|j| {
            let theta = PI / 2.0 + 2.0 * PI * j as f64 / k as f64;
            [theta.cos(), theta.sin()]
        })
        .collect()
}

/// `K_0 = K`, the reference polygon.
pub fn polygon_new(k: usize) -> Result<PolygonState> {
    PolygonState::new(k)
}

impl PolygonState {
    pub fn new(k: usize) -> Result<Self> {
        if k < 5 {
            return Err(domain(format!("polygon needs k ≥ 5 vertices, got {k}")));
        }
        let rho = (PI / k as f64).cos();
        Self::from_offsets(k, vec![-rho; k])
    }

    /// Body `{⟨x, d_i⟩ ≥ o_i}`; offsets are tightened to support values.
    pub fn from_offsets(k: usize, offsets: Vec<f64>) -> Result<Self> {
        if k < 5 {
            return Err(domain(format!("polygon needs k ≥ 5 vertices, got {k}")));
        }
        if offsets.len() != k || offsets.iter().any(|o| !o.is_finite()) {
            return Err(domain(format!("expected {k} finite offsets")));
        }
        let mut s = Self {
            k,
            rho: (PI / k as f64).cos(),
            dirs: directions(k),
            offsets,
            cycle: Vec::new(),
            hull: Vec::new(),
            fan: Vec::new(),
        };
        s.refresh()?;
        Ok(s)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dirs(&self) -> &[Point] {
        &self.dirs
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    /// Distinct vertices, counter-clockwise.
    pub fn hull(&self) -> &[Point] {
        &self.hull
    }

    /// `C_j = line j ∩ line j+1`, with repeats for degenerate sides.
    pub fn cycle(&self) -> &[Point] {
        &self.cycle
    }

    pub fn area(&self) -> f64 {
        self.fan.last().copied().unwrap_or(0.0)
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        self.dirs
            .iter()
            .zip(&self.offsets)
            .all(|(d, o)| dot(p, *d) >= o - tol)
    }

    /// Tightens offsets and rebuilds vertex cycle and sampling fan.
    fn refresh(&mut self) -> Result<()> {
        let mut hull = reference_vertices(self.k);
        for (d, o) in self.dirs.iter().zip(&self.offsets) {
            hull = clip_halfplane(&hull, *d, *o);
        }
        simplify_cycle(&mut hull);
        if hull.len() < 3 || area(&hull) <= 0.0 {
            return Err(Error::Corruption(format!(
                "empty polygon for offsets {:?}",
                self.offsets
            )));
        }
        for (d, o) in self.dirs.iter().zip(self.offsets.iter_mut()) {
            let support = hull
                .iter()
                .map(|v| dot(*v, *d))
                .fold(f64::INFINITY, f64::min);
            if support > *o + TIGHT_TOL {
                *o = support;
            }
        }
        let k = self.k;
        self.cycle = (0..k)
            .map(|j| {
                let l = (j + 1) % k;
                intersect_lines(self.dirs[j], self.offsets[j], self.dirs[l], self.offsets[l])
                    .expect("constraint directions of a k-gon are never parallel when adjacent")
            })
            .collect();
        let mut acc = 0.0;
        self.fan = (1..hull.len() - 1)
            .map(|i| {
                acc += 0.5 * cross(sub(hull[i], hull[0]), sub(hull[i + 1], hull[0])).abs();
                acc
            })
            .collect();
        self.hull = hull;
        Ok(())
    }

    /// Uniform point in the body.
    pub fn sample_point(&self, rng: &mut RngStream) -> Result<Point> {
        let total = self.area();
        if total <= 0.0 {
            return Err(Error::Corruption(
                "cannot sample a zero-area polygon".into(),
            ));
        }
        let t = self.fan_triangle(rng.uniform());
        Ok(triangle_point(
            self.hull[0],
            self.hull[t + 1],
            self.hull[t + 2],
            rng.uniform(),
            rng.uniform(),
        ))
    }

    /// Fan triangle chosen for a uniform `u ∈ [0, 1)`: the one whose
    /// cumulative-area interval contains `u · area`.
    pub fn fan_triangle(&self, u: f64) -> usize {
        let target = u * self.area();
        self.fan
            .iter()
            .position(|&a| target < a)
            .unwrap_or(self.fan.len() - 1)
    }

    /// Areas of the fan triangles `(hull[0], hull[i], hull[i+1])`.
    pub fn fan_areas(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.fan
            .iter()
            .map(|&a| {
                let w = a - prev;
                prev = a;
                w
            })
            .collect()
    }

    /// Applies `K ← K ∩ (p + K)`; returns whether the body changed.
    pub fn step_with_point(&mut self, p: Point) -> Result<bool> {
        let mut changed = false;
        for (d, o) in self.dirs.iter().zip(self.offsets.iter_mut()) {
            let support = dot(p, *d) - self.rho;
            if support > *o {
                *o = support;
                changed = true;
            }
        }
        if changed {
            // The hull still describes the previous body here.
            let before = cfg!(debug_assertions).then(|| self.hull.clone());
            self.refresh()?;
            if let Some(mut clipped) = before {
                for d in &self.dirs {
                    clipped = clip_halfplane(&clipped, *d, dot(p, *d) - self.rho);
                }
                debug_assert!(
                    (area(&clipped) - self.area()).abs() < 1e-9,
                    "offset update disagrees with clipping: {} vs {}",
                    area(&clipped),
                    self.area()
                );
            }
        }
        Ok(changed)
    }

    pub fn step(&mut self, rng: &mut RngStream) -> Result<bool> {
        let p = self.sample_point(rng)?;
        self.step_with_point(p)
    }

    /// Index into the `C` cycle of vertex `A_i`.
    fn vertex_slot(&self, i: usize) -> usize {
        if self.k % 2 == 1 {
            (i + (self.k - 1) / 2) % self.k
        } else {
            i
        }
    }

    pub fn heights(&self) -> Vec<f64> {
        self.dirs
            .iter()
            .zip(&self.offsets)
            .map(|(d, o)| {
                self.hull
                    .iter()
                    .map(|v| dot(*v, *d))
                    .fold(f64::NEG_INFINITY, f64::max)
                    - o
            })
            .collect()
    }

    pub fn snapshot(&self) -> PolygonSnapshot {
        let k = self.k;
        let vertices = (0..k).map(|i| self.cycle[self.vertex_slot(i)]).collect();
        let heights = self.heights();
        let max_height = heights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let regions: Vec<Vec<Point>> = (0..k)
            .map(|i| {
                if heights[i] <= self.rho {
                    Vec::new()
                } else {
                    clip_halfplane(&self.hull, self.dirs[i], self.offsets[i] + self.rho)
                }
            })
            .collect();
        let region_areas: Vec<f64> = regions.iter().map(|r| area(r)).collect();
        let total_change_area = region_areas.iter().sum();
        let mut reduced = true;
        'outer: for i in 0..k {
            if regions[i].len() < 3 {
                continue;
            }
            for j in 0..k {
                if j == i || regions[j].len() < 3 {
                    continue;
                }
                let threshold = self.offsets[j] + self.rho;
                let reach = regions[i]
                    .iter()
                    .map(|v| dot(*v, self.dirs[j]) - threshold)
                    .fold(f64::NEG_INFINITY, f64::max);
                if reach > GEOM_TOL {
                    reduced = false;
                    break 'outer;
                }
            }
        }
        PolygonSnapshot {
            vertices,
            heights,
            max_height,
            area: signed_area(&self.cycle),
            region_areas,
            total_change_area,
            reduced,
        }
    }

    /// Radius of the largest inscribed circle (Chebyshev center of the
    /// constraint set), by enumerating triples of active constraints.
    pub fn incircle_radius(&self) -> f64 {
        let k = self.k;
        let mut best = f64::NEG_INFINITY;
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    let Some((x, r)) = self.tangent_circle([a, b, c]) else {
                        continue;
                    };
                    if r > best && self.contains_circle(x, r) {
                        best = r;
                    }
                }
            }
        }
        best
    }

    fn tangent_circle(&self, idx: [usize; 3]) -> Option<(Point, f64)> {
        // ⟨x, d_i⟩ − r = o_i for the three constraints, by Cramer's rule.
        let m: Vec<[f64; 3]> = idx
            .iter()
            .map(|&i| [self.dirs[i][0], self.dirs[i][1], -1.0])
            .collect();
        let rhs: Vec<f64> = idx.iter().map(|&i| self.offsets[i]).collect();
        let det3 = |c: [[f64; 3]; 3]| {
            c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1])
                - c[0][1] * (c[1][0] * c[2][2] - c[1][2] * c[2][0])
                + c[0][2] * (c[1][0] * c[2][1] - c[1][1] * c[2][0])
        };
        let base = [m[0], m[1], m[2]];
        let det = det3(base);
        if det.abs() < 1e-12 {
            return None;
        }
        let mut sol = [0.0; 3];
        for (col, s) in sol.iter_mut().enumerate() {
            let mut c = base;
            for row in 0..3 {
                c[row][col] = rhs[row];
            }
            *s = det3(c) / det;
        }
        Some(([sol[0], sol[1]], sol[2]))
    }

    fn contains_circle(&self, x: Point, r: f64) -> bool {
        self.dirs
            .iter()
            .zip(&self.offsets)
            .all(|(d, o)| dot(x, *d) - r >= o - 1e-12)
    }
}

/// Removes duplicate vertices and vertices lying on a straight edge.
fn simplify_cycle(poly: &mut Vec<Point>) {
    let mut changed = true;
    while changed && poly.len() >= 3 {
        changed = false;
        let n = poly.len();
        for j in 0..n {
            let (prev, cur, next) = (poly[(j + n - 1) % n], poly[j], poly[(j + 1) % n]);
            let (a, b) = (sub(prev, cur), sub(next, cur));
            let degenerate = a[0].hypot(a[1]) < 1e-15 || cross(a, b).abs() < 1e-15;
            if degenerate {
                poly.remove(j);
                changed = true;
                break;
            }
        }
    }
}

/// Golden-ratio identity for equal-angle pentagons:
/// `m_2 + λ m_1 − m_3 − λ m_4`, zero for every such pentagon.
pub fn pentagon_residual(m: &[f64; 5]) -> f64 {
    let lambda = PentagonConstants::new().lambda;
    m[1] + lambda * m[0] - m[2] - lambda * m[3]
}

/// Constants of the pentagon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PentagonConstants {
    pub c_gold: f64,
    pub lambda: f64,
    pub rho5: f64,
    /// Height changes per unit cut at `R_i`: `(1, 0, c, c, 0)` and its
    /// cyclic shifts.
    pub update_vectors: [[f64; 5]; 5],
}

impl PentagonConstants {
    pub fn new() -> Self {
        let sqrt5 = 5f64.sqrt();
        let c = (sqrt5 - 1.0) / 2.0;
        let base = [1.0, 0.0, c, c, 0.0];
        let mut update_vectors = [[0.0; 5]; 5];
        for (i, v) in update_vectors.iter_mut().enumerate() {
            for (j, x) in v.iter_mut().enumerate() {
                *x = base[(j + 5 - i) % 5];
            }
        }
        Self {
            c_gold: c,
            lambda: (sqrt5 + 1.0) / 2.0,
            rho5: (PI / 5.0).cos(),
            update_vectors,
        }
    }

    /// Lower bound on every limit height, `ρ_5 + 2 − 4c`.
    pub fn limit_height_floor(&self) -> f64 {
        self.rho5 + 2.0 - 4.0 * self.c_gold
    }
}

impl Default for PentagonConstants {
    fn default() -> Self {
        Self::new()
    }
}

/// Constants bounding the change area of odd polygons, with the envelope
/// distribution functions built from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    pub k: usize,
    pub c1: f64,
    pub delta1: f64,
    pub c2: f64,
    pub c3: f64,
}

pub fn bound_constants(k: usize) -> Result<BoundConstants> {
    if k < 5 {
        return Err(domain(format!("bound constants need k ≥ 5, got {k}")));
    }
    let kf = k as f64;
    let c1 = ((kf - 2.0) * PI / (2.0 * kf)).tan();
    let delta1 = (1.0f64 / 20.0).asin().tan();
    Ok(BoundConstants {
        k,
        c1,
        delta1,
        c2: 100.0 * kf * c1 / PI,
        c3: delta1 / PI,
    })
}

impl BoundConstants {
    /// `min(c1 x², 1)`.
    pub fn h_major(&self, x: f64) -> f64 {
        (self.c1 * x * x).min(1.0)
    }

    /// `δ1 x²` below 1, then 1.
    pub fn h_minor(&self, x: f64) -> f64 {
        if x < 1.0 {
            self.delta1 * x * x
        } else {
            1.0
        }
    }

    /// `min(c1 c2 x², 1)`.
    pub fn h_tilde(&self, x: f64) -> f64 {
        (self.c1 * self.c2 * x * x).min(1.0)
    }

    /// `min(c3 x², 1)`.
    pub fn h_bar(&self, x: f64) -> f64 {
        (self.c3 * x * x).min(1.0)
    }

    /// Limiting upper survival envelope `1 − (1 − e^{−x²/k})^k`.
    pub fn upper_survival(&self, x: f64) -> f64 {
        let k = self.k as f64;
        1.0 - (1.0 - (-x * x / k).exp()).powf(k)
    }
}

/// Running record of invariant checks along polygon trajectories.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonMonitor {
    /// Nestedness, area range, incircle, `m ≥ ρ_k`, reduced persistence.
    pub log: InvariantLog,
    /// `δ1 (m − ρ_k)² ≤ A_n ≤ k c1 (m − ρ_k)²` (odd `k`).
    pub bound_log: InvariantLog,
    /// Largest deviation of a pentagon inner angle from `3π/5`.
    pub max_angle_error: f64,
    /// Largest golden-ratio residual seen.
    pub max_residual: f64,
    /// Largest `||R_i| − (m_i − ρ_5)² tan(3π/10)|` in reduced pentagon states.
    pub max_region_error: f64,
    pub min_incircle: f64,
    pub min_area: f64,
    pub max_area: f64,
    pub states: u64,
}

impl Default for PolygonMonitor {
    fn default() -> Self {
        Self {
            log: InvariantLog::new(),
            bound_log: InvariantLog::new(),
            max_angle_error: 0.0,
            max_residual: 0.0,
            max_region_error: 0.0,
            min_incircle: f64::INFINITY,
            min_area: f64::INFINITY,
            max_area: 0.0,
            states: 0,
        }
    }
}

impl PolygonMonitor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn merge(&mut self, o: &PolygonMonitor) {
        self.log.merge(&o.log);
        self.bound_log.merge(&o.bound_log);
        self.max_angle_error = self.max_angle_error.max(o.max_angle_error);
        self.max_residual = self.max_residual.max(o.max_residual);
        self.max_region_error = self.max_region_error.max(o.max_region_error);
        self.min_incircle = self.min_incircle.min(o.min_incircle);
        self.min_area = self.min_area.min(o.min_area);
        self.max_area = self.max_area.max(o.max_area);
        self.states += o.states;
    }

    /// Checks a newly reached state against its predecessor.
    pub fn observe(
        &mut self,
        state: &PolygonState,
        snap: &PolygonSnapshot,
        prev: Option<(&[f64], &PolygonSnapshot)>,
    ) {
        self.states += 1;
        let k = state.k();
        let rho = state.rho();
        let log = &mut self.log;
        if let Some((prev_offsets, prev_snap)) = prev {
            log.check(
                state
                    .offsets()
                    .iter()
                    .zip(prev_offsets)
                    .all(|(a, b)| a >= b),
                || "polygon offsets decreased".into(),
            );
            log.check(snap.area <= prev_snap.area + 1e-12, || {
                format!("area grew: {} -> {}", prev_snap.area, snap.area)
            });
            log.check(
                snap.heights
                    .iter()
                    .zip(&prev_snap.heights)
                    .all(|(a, b)| *a <= b + 1e-12),
                || "a height grew".into(),
            );
            log.check(!prev_snap.reduced || snap.reduced, || {
                "reduced state was left".into()
            });
        }
        log.check(snap.area >= PI / 100.0 && snap.area <= PI, || {
            format!("area {} outside [π/100, π]", snap.area)
        });
        let r = state.incircle_radius();
        log.check(r >= 0.1, || format!("incircle radius {r} below 1/10"));
        log.check(snap.max_height >= rho - GEOM_TOL, || {
            format!("max height {} below ρ", snap.max_height)
        });
        self.min_incircle = self.min_incircle.min(r);
        self.min_area = self.min_area.min(snap.area);
        self.max_area = self.max_area.max(snap.area);

        if k % 2 == 1 {
            let b = bound_constants(k).expect("k ≥ 5");
            let e2 = (snap.max_height - rho).max(0.0).powi(2);
            let a = snap.total_change_area;
            self.bound_log.check(
                b.delta1 * e2 <= a + 1e-12 && a <= k as f64 * b.c1 * e2 + 1e-12,
                || format!("change area {a} outside bounds for excess² {e2}"),
            );
        }
        if k == 5 {
            self.max_angle_error = self
                .max_angle_error
                .max(pentagon_angle_error(state.cycle()));
            let m: [f64; 5] = snap.heights.clone().try_into().expect("five heights");
            self.max_residual = self.max_residual.max(pentagon_residual(&m).abs());
            if snap.reduced {
                let t = (3.0 * PI / 10.0).tan();
                for (h, a) in snap.heights.iter().zip(&snap.region_areas) {
                    if *h > rho + GEOM_TOL {
                        let err = (a - (h - rho).powi(2) * t).abs();
                        self.max_region_error = self.max_region_error.max(err);
                    }
                }
            }
        }
    }
}

/// Largest deviation of the inner angles of a vertex cycle from `3π/5`;
/// `π` when a side has collapsed.
pub fn pentagon_angle_error(cycle: &[Point]) -> f64 {
    let n = cycle.len();
    let mut worst: f64 = 0.0;
    for j in 0..n {
        let prev = sub(cycle[(j + n - 1) % n], cycle[j]);
        let next = sub(cycle[(j + 1) % n], cycle[j]);
        if prev[0].hypot(prev[1]) < GEOM_TOL || next[0].hypot(next[1]) < GEOM_TOL {
            return PI;
        }
        let angle = cross(next, prev).atan2(dot(next, prev));
        worst = worst.max((angle - 3.0 * PI / 5.0).abs());
    }
    worst
}

/// Final state of a polygon run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolygonRun {
    pub k: usize,
    pub n: u64,
    /// `m_n − ρ_k`.
    pub excess: f64,
    pub heights: Vec<f64>,
    pub area: f64,
    pub changes: u64,
    pub reduced: bool,
}

/// Runs the `k`-gon process from `K` and records the state after each
/// checkpoint step count (sorted ascending, all ≥ 1).
pub fn run_polygon_checkpoints(
    k: usize,
    checkpoints: &[u64],
    rng: &mut RngStream,
    monitor: &mut PolygonMonitor,
) -> Result<Vec<PolygonRun>> {
    if checkpoints.is_empty() || checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] > w[1])
    {
        return Err(domain("checkpoints must be ascending step counts ≥ 1"));
    }
    let mut state = PolygonState::new(k)?;
    let mut snap = state.snapshot();
    monitor.observe(&state, &snap, None);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut prev_offsets = state.offsets.clone();
    let mut changes = 0;
    let mut step = 0;
    for &target in checkpoints {
        while step < target {
            if state.step(rng)? {
                changes += 1;
                let next = state.snapshot();
                monitor.observe(&state, &next, Some((&prev_offsets, &snap)));
                snap = next;
                prev_offsets.copy_from_slice(&state.offsets);
            }
            step += 1;
        }
        out.push(PolygonRun {
            k,
            n: target,
            excess: snap.max_height - state.rho,
            heights: snap.heights.clone(),
            area: snap.area,
            changes,
            reduced: snap.reduced,
        });
    }
    Ok(out)
}

pub fn run_polygon(
    k: usize,
    n: u64,
    rng: &mut RngStream,
    monitor: &mut PolygonMonitor,
) -> Result<PolygonRun> {
    Ok(run_polygon_checkpoints(k, &[n], rng, monitor)?.remove(0))
}
