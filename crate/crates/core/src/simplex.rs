//! The regular `d`-simplex process.
//!
//! `K` is the regular simplex with centroid at the origin and unit vertex
//! vectors `e_0, …, e_d` (`e_0 = (1, 0, …, 0)`), so
//! `K = {x : ⟨x, e_i⟩ ≥ −ρ_d}` with inradius `ρ_d = 1/d`. Every body of the
//! process is stored by its facet offsets `γ_i` in `K_n = {x : ⟨x, e_i⟩ ≥ γ_i}`.
//! Any such set is a homothet of `K`; with `Σ e_i = 0` and
//! `Σ e_i e_iᵀ = (d+1)/d · I` its height is `−Σ γ_i` and its center
//! `d/(d+1) · Σ γ_i e_i`.
//!
//! A uniform point with barycentric weights `w` (w.r.t. the vertices of
//! `K_n`) moves facet `i` by `max(0, m w_i − ρ_d)`, which is the support
//! update `γ_i ← max(γ_i, ⟨p, e_i⟩ − ρ_d)` written in barycentric form.

use serde::{Deserialize, Serialize};

use crate::distributions::simplex_height_from_uniform;
use crate::error::domain;
use crate::invariants::InvariantLog;
use crate::{Error, Result, RngStream};

/// Tolerance for barycentric coordinates (sum and sign).
pub const BARYCENTRIC_TOL: f64 = 1e-12;

/// Unit vertex vectors of the reference simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexFrame {
    d: usize,
    dirs: Vec<Vec<f64>>,
}

impl SimplexFrame {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(domain("simplex dimension must be at least 1"));
        }
        // Centered standard basis of R^{d+1}, expressed in an orthonormal
        // basis of the hyperplane Σ x = 0 whose first vector points at e_0.
        let k = d + 1;
        let centered: Vec<Vec<f64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| if i == j { 1.0 } else { 0.0 } - 1.0 / k as f64)
                    .collect()
            })
            .collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
        for v in centered.iter().take(d) {
            let mut u = v.clone();
            for b in &basis {
                let proj = dot(&u, b);
                u.iter_mut().zip(b).for_each(|(ui, bi)| *ui -= proj * bi);
            }
            let norm = dot(&u, &u).sqrt();
            u.iter_mut().for_each(|ui| *ui /= norm);
            basis.push(u);
        }
        let dirs = centered
            .iter()
            .map(|v| {
                let norm = dot(v, v).sqrt();
                basis.iter().map(|b| dot(v, b) / norm).collect()
            })
            .collect();
        Ok(Self { d, dirs })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `e_i`, the i-th vertex of `K` (and inward normal of the opposite facet).
    pub fn dir(&self, i: usize) -> &[f64] {
        &self.dirs[i]
    }

    pub fn dirs(&self) -> &[Vec<f64>] {
        &self.dirs
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `K_n` in facet-offset form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexState {
    d: usize,
    offsets: Vec<f64>,
    height: f64,
}

impl SimplexState {
    /// `K_0 = (2/(d+1)) K`, height `2ρ_d`, centered at the origin.
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(domain("simplex dimension must be at least 1"));
        }
        let rho = 1.0 / d as f64;
        let offsets = vec![-2.0 * rho / (d + 1) as f64; d + 1];
        let height = -offsets.iter().sum::<f64>();
        Ok(Self { d, offsets, height })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn rho(&self) -> f64 {
        1.0 / self.d as f64
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Probability that the next point falls in one of the `d + 1`
    /// change regions: `(d+1)(1 − ρ_d/m)^d`.
    pub fn change_probability(&self) -> f64 {
        (self.d + 1) as f64 * (1.0 - self.rho() / self.height).powi(self.d as i32)
    }

    /// `⟨c, e_i⟩` for the center `c` of `K_n`.
    fn center_projection(&self, i: usize) -> f64 {
        self.offsets[i] + self.height / (self.d + 1) as f64
    }

    pub fn center(&self, frame: &SimplexFrame) -> Vec<f64> {
        let scale = self.d as f64 / (self.d + 1) as f64;
        let mut c = vec![0.0; self.d];
        for (g, e) in self.offsets.iter().zip(frame.dirs()) {
            c.iter_mut()
                .zip(e)
                .for_each(|(ci, ei)| *ci += scale * g * ei);
        }
        c
    }

    /// Vertex `j` is `c + s e_j` with scale `s = d m / (d + 1)`.
    pub fn vertices(&self, frame: &SimplexFrame) -> Vec<Vec<f64>> {
        let c = self.center(frame);
        let s = self.d as f64 * self.height / (self.d + 1) as f64;
        frame
            .dirs()
            .iter()
            .map(|e| c.iter().zip(e).map(|(ci, ei)| ci + s * ei).collect())
            .collect()
    }

    /// Barycentric coordinates of the center with respect to the vertices
    /// `e_i / (d + 1)` of the limit simplex.
    pub fn center_barycentric(&self) -> Vec<f64> {
        let d = self.d as f64;
        (0..=self.d)
            .map(|i| d * self.center_projection(i) + 1.0 / (d + 1.0))
            .collect()
    }

    pub fn point_from_weights(&self, frame: &SimplexFrame, weights: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.d];
        for (w, v) in weights.iter().zip(self.vertices(frame)) {
            p.iter_mut().zip(&v).for_each(|(pi, vi)| *pi += w * vi);
        }
        p
    }

    /// One step with the chosen point given by its barycentric weights.
    #[inline]
    pub fn step_with_weights(&mut self, weights: &[f64]) -> bool {
        let rho = self.rho();
        let mut changed = false;
        for (g, &w) in self.offsets.iter_mut().zip(weights) {
            let push = self.height * w - rho;
            if push > 0.0 {
                *g += push;
                changed = true;
            }
        }
        if changed {
            self.height = -self.offsets.iter().sum::<f64>();
        }
        changed
    }

    /// One step with the chosen point in Cartesian coordinates, by the
    /// support update `γ_i ← max(γ_i, ⟨p, e_i⟩ − ρ_d)`.
    pub fn step_with_point(&mut self, frame: &SimplexFrame, p: &[f64]) -> bool {
        let rho = self.rho();
        let mut changed = false;
        for (g, e) in self.offsets.iter_mut().zip(frame.dirs()) {
            let support = dot(p, e) - rho;
            if support > *g {
                *g = support;
                changed = true;
            }
        }
        if changed {
            self.height = -self.offsets.iter().sum::<f64>();
        }
        changed
    }

    pub fn step(&mut self, rng: &mut RngStream, weights: &mut Vec<f64>) -> bool {
        sample_weights(rng, self.d, weights);
        self.step_with_weights(weights)
    }

    fn check(&self, prev_height: f64, log: &mut InvariantLog) {
        let rho = self.rho();
        log.check(self.height <= prev_height, || {
            format!("simplex height grew: {prev_height} -> {}", self.height)
        });
        log.check(
            self.height >= rho - 1e-12 && self.height <= 2.0 * rho + 1e-12,
            || format!("simplex height {} outside [ρ, 2ρ]", self.height),
        );
    }
}

/// Uniform barycentric weights on the `d`-simplex from sorted uniform
/// spacings.
pub fn sample_weights(rng: &mut RngStream, d: usize, out: &mut Vec<f64>) {
    out.clear();
    out.extend((0..d).map(|_| rng.uniform()));
    out.sort_unstable_by(f64::total_cmp);
    out.push(1.0);
    let mut prev = 0.0;
    for w in out.iter_mut() {
        let next = *w;
        *w = next - prev;
        prev = next;
    }
}

/// Result of [`run_full`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexRun {
    /// `((d+1) n)^{1/d} / ρ_d · (m_n − ρ_d)`.
    pub scaled: f64,
    pub excess: f64,
    pub center_barycentric: Vec<f64>,
    pub changes: u64,
}

/// Runs `n` steps of the full simplex process from `K_0`.
pub fn run_full(
    d: usize,
    n: u64,
    rng: &mut RngStream,
    log: &mut InvariantLog,
) -> Result<SimplexRun> {
    if n == 0 {
        return Err(domain("step count n must be at least 1"));
    }
    let mut state = SimplexState::new(d)?;
    let mut weights = Vec::with_capacity(d + 1);
    let mut changes = 0;
    for _ in 0..n {
        sample_weights(rng, d, &mut weights);
        let prev_height = state.height;
        if state.step_with_weights(&weights) {
            changes += 1;
            state.check(prev_height, log);
        }
    }
    let rho = state.rho();
    let excess = state.height - rho;
    Ok(SimplexRun {
        scaled: (((d + 1) as f64) * n as f64).powf(1.0 / d as f64) / rho * excess,
        excess,
        center_barycentric: state.center_barycentric(),
        changes,
    })
}

/// Height of the full process right after its `j`-th effective move.
pub fn height_after_changes(d: usize, j: u64, rng: &mut RngStream) -> Result<f64> {
    let mut state = SimplexState::new(d)?;
    let mut weights = Vec::with_capacity(d + 1);
    let mut seen = 0;
    while seen < j {
        if state.step(rng, &mut weights) {
            seen += 1;
        }
    }
    Ok(state.height)
}

/// The thinned barycentric chain `(Λ̃, ℓ̃)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexThinned {
    pub lambda: Vec<f64>,
    pub excess: f64,
}

impl SimplexThinned {
    /// `Λ̃_0 = (1/(d+1), …)`, `ℓ̃_0 = ρ_d`.
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(domain("simplex dimension must be at least 1"));
        }
        Ok(Self {
            lambda: vec![1.0 / (d + 1) as f64; d + 1],
            excess: 1.0 / d as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len() - 1
    }

    /// `Λ̃ + d/(d+1) ℓ̃ h v_ξ` and `ℓ̃ (1 − h)`, where `v_ξ` is `−1` except
    /// for `d` in slot `ξ`.
    pub fn step_with(&mut self, xi: usize, h: f64) -> Result<()> {
        let d = self.dim();
        if xi > d {
            return Err(domain(format!("vertex index {xi} out of range 0..={d}")));
        }
        let shift = d as f64 / (d + 1) as f64 * self.excess * h;
        let mut next = self.lambda.clone();
        for (i, l) in next.iter_mut().enumerate() {
            *l += if i == xi { d as f64 * shift } else { -shift };
        }
        if let Some((i, l)) = next.iter().enumerate().find(|(_, &l)| l < -BARYCENTRIC_TOL) {
            return Err(Error::Corruption(format!(
                "barycentric coordinate {i} would become {l}"
            )));
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|l| *l = l.max(0.0) / total);
        self.lambda = next;
        self.excess *= 1.0 - h;
        Ok(())
    }

    pub fn step(&mut self, rng: &mut RngStream) -> Result<()> {
        let d = self.dim();
        let xi = ((rng.uniform() * (d + 1) as f64) as usize).min(d);
        let h = simplex_height_from_uniform(rng.uniform_open(), d as u32);
        self.step_with(xi, h)
    }

    /// Iterates until `ℓ̃ < tol` (the remaining displacement of `Λ` is then
    /// below `d · tol` per coordinate) or `max_steps` moves were made.
    pub fn run_to_limit(
        &mut self,
        rng: &mut RngStream,
        tol: f64,
        max_steps: usize,
        log: &mut InvariantLog,
    ) -> Result<()> {
        for _ in 0..max_steps {
            if self.excess < tol {
                break;
            }
            let before = self.excess;
            self.step(rng)?;
            let sum: f64 = self.lambda.iter().sum();
            log.check((sum - 1.0).abs() <= BARYCENTRIC_TOL, || {
                format!("barycentric sum {sum}")
            });
            log.check(self.lambda.iter().all(|&l| l >= 0.0), || {
                format!("negative barycentric coordinate {:?}", self.lambda)
            });
            log.check(self.excess <= before, || "thinned excess increased".into());
        }
        Ok(())
    }
}

/// Barycentric coordinates of `center` with respect to the vertices
/// `e_i / (d + 1)` of the limit simplex: `Λ_i = d ⟨c, e_i⟩ + 1/(d + 1)`.
pub fn to_barycentric(center: &[f64], d: usize) -> Result<Vec<f64>> {
    let frame = SimplexFrame::new(d)?;
    if center.len() != d {
        return Err(domain(format!(
            "point has {} coordinates, expected {d}",
            center.len()
        )));
    }
    let lambda: Vec<f64> = frame
        .dirs()
        .iter()
        .map(|e| d as f64 * dot(center, e) + 1.0 / (d + 1) as f64)
        .collect();
    if let Some(l) = lambda.iter().find(|&&l| l < -BARYCENTRIC_TOL) {
        return Err(domain(format!(
            "point {center:?} lies outside the limit simplex (coordinate {l})"
        )));
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_is_regular() {
        for d in 1..=5 {
            let f = SimplexFrame::new(d).unwrap();
            assert_close!(f.dir(0)[0], 1.0, 1e-14);
            for i in 0..=d {
                assert_close!(dot(f.dir(i), f.dir(i)), 1.0, 1e-14);
                for j in 0..i {
                    assert_close!(dot(f.dir(i), f.dir(j)), -1.0 / d as f64, 1e-14);
                }
            }
        }
        assert!(SimplexFrame::new(0).is_err());
    }

    #[test]
    fn initial_heights() {
        assert_close!(SimplexState::new(2).unwrap().height(), 1.0, 1e-15);
        assert_close!(SimplexState::new(2).unwrap().rho(), 0.5, 1e-15);
        assert_close!(SimplexState::new(3).unwrap().height(), 2.0 / 3.0, 1e-15);
        assert!(SimplexState::new(0).is_err());
        let s1 = SimplexState::new(1).unwrap();
        let f1 = SimplexFrame::new(1).unwrap();
        let mut v = s1.vertices(&f1);
        v.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_close!(v[0][0], -1.0, 1e-15);
        assert_close!(v[1][0], 1.0, 1e-15);
    }

    #[test]
    fn change_probability_example() {
        assert_close!(
            SimplexState::new(2).unwrap().change_probability(),
            0.75,
            1e-15
        );
    }

    #[test]
    fn incenter_point_changes_nothing() {
        for d in 1..=4 {
            let frame = SimplexFrame::new(d).unwrap();
            let mut s = SimplexState::new(d).unwrap();
            let before = s.clone();
            let c = s.center(&frame);
            assert!(!s.step_with_point(&frame, &c));
            assert!(!s.step_with_weights(&vec![1.0 / (d + 1) as f64; d + 1]));
            assert_eq!(s, before);
        }
    }

    #[test]
    fn weight_and_point_updates_agree() {
        let mut rng = RngStream::new(8, 1);
        for d in [2usize, 3] {
            let frame = SimplexFrame::new(d).unwrap();
            let mut a = SimplexState::new(d).unwrap();
            let mut b = a.clone();
            let mut w = Vec::new();
            for _ in 0..500 {
                sample_weights(&mut rng, d, &mut w);
                let p = a.point_from_weights(&frame, &w);
                a.step_with_weights(&w);
                b.step_with_point(&frame, &p);
                for (x, y) in a.offsets().iter().zip(b.offsets()) {
                    assert_close!(*x, *y, 1e-13);
                }
            }
        }
    }

    #[test]
    fn thinned_step_example() {
        let mut s = SimplexThinned::new(2).unwrap();
        s.excess = 0.5;
        s.step_with(0, 0.3).unwrap();
        assert_close!(s.lambda[0], 0.533333333333333, 1e-12);
        assert_close!(s.lambda[1], 0.233333333333333, 1e-12);
        assert_close!(s.lambda[2], 0.233333333333333, 1e-12);
        assert_close!(s.excess, 0.35, 1e-15);

        let before = s.clone();
        s.step_with(1, 0.0).unwrap();
        assert_eq!(s, before);
        assert!(s.step_with(3, 0.1).is_err());
    }

    #[test]
    fn thinned_step_detects_corruption() {
        let mut s = SimplexThinned {
            lambda: vec![0.9, 0.05, 0.05],
            excess: 0.5,
        };
        assert!(matches!(s.step_with(0, 0.9), Err(Error::Corruption(_))));
    }

    #[test]
    fn barycentric_examples() {
        for d in [1usize, 2, 3] {
            let l = to_barycentric(&vec![0.0; d], d).unwrap();
            l.iter()
                .for_each(|&x| assert_close!(x, 1.0 / (d + 1) as f64, 1e-15));
            let frame = SimplexFrame::new(d).unwrap();
            let v0: Vec<f64> = frame.dir(0).iter().map(|x| x / (d + 1) as f64).collect();
            let l = to_barycentric(&v0, d).unwrap();
            assert_close!(l[0], 1.0, 1e-14);
            l[1..].iter().for_each(|&x| assert_close!(x, 0.0, 1e-14));
        }
        assert!(to_barycentric(&[1.0, 0.0], 2).is_err());
        assert!(to_barycentric(&[0.0], 2).is_err());
    }

    #[test]
    fn full_run_keeps_invariants() {
        let mut rng = RngStream::new(3, 9);
        let mut log = InvariantLog::new();
        let run = run_full(3, 2_000, &mut rng, &mut log).unwrap();
        assert!(log.is_clean(), "{:?}", log.messages);
        assert!(run.excess >= 0.0);
        assert_close!(run.center_barycentric.iter().sum::<f64>(), 1.0, 1e-12);
    }
}
