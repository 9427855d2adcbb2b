//! The one-dimensional process on `[−1, 1]` with a general point law.
//!
//! Three equivalent descriptions are implemented:
//! - [`IntervalState`]: the full process, evaluated as a literal interval
//!   intersection `[lo, hi] ∩ [p − 1, p + 1]`;
//! - [`ThinnedIntervalState`]: the chain of effective moves only, driven by
//!   a sign `ξ` and a factor `V` with `P{V ≤ x} = x^δ`;
//! - [`center_series_sample`]: the limit center as a truncated series.

use serde::{Deserialize, Serialize};

use crate::distributions::{power_sample, DfForm};
use crate::error::{config, domain};
use crate::invariants::InvariantLog;
use crate::{Result, RngStream};

/// Current interval `[lo, hi]` of the full process and the law of the
/// relative point position.
///
/// The end points are stored rather than `(center, radius)` so nestedness
/// holds exactly in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalState {
    lo: f64,
    hi: f64,
    law: DfForm,
}

impl IntervalState {
    /// The initial interval `[−1, 1]`.
    pub fn new(law: DfForm) -> Self {
        Self {
            lo: -1.0,
            hi: 1.0,
            law,
        }
    }

    pub fn from_center_radius(center: f64, radius: f64, law: DfForm) -> Result<Self> {
        if !(0.5..=1.0).contains(&radius) {
            return Err(domain(format!("radius {radius} outside [1/2, 1]")));
        }
        let (lo, hi) = (center - radius, center + radius);
        if lo < -1.0 - 1e-12 || hi > 1.0 + 1e-12 {
            return Err(domain(format!(
                "interval [{lo}, {hi}] is not contained in [−1, 1]"
            )));
        }
        Ok(Self { lo, hi, law })
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    /// `r − 1/2`, which tends to zero.
    pub fn excess(&self) -> f64 {
        0.5 * (self.hi - self.lo - 1.0)
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn law(&self) -> DfForm {
        self.law
    }

    /// One step with the relative position `x ∈ [0, 1]` of the chosen point
    /// given, i.e. `p = lo + x (hi − lo)`. Returns whether the interval
    /// shrank.
    #[inline]
    pub fn step_with(&mut self, x: f64) -> bool {
        let p = self.lo + x * (self.hi - self.lo);
        let lo = self.lo.max(p - 1.0);
        let hi = self.hi.min(p + 1.0);
        if lo == self.lo && hi == self.hi {
            return false;
        }
        #[cfg(debug_assertions)]
        {
            let r = self.radius();
            let m = x.min(1.0 - x);
            let expected = if m <= 1.0 - 0.5 / r { 0.5 + r * m } else { r };
            let got = 0.5 * (hi - lo);
            debug_assert!(
                (got - expected).abs() <= 1e-12,
                "interval radius {got} disagrees with the recursion value {expected}"
            );
        }
        self.lo = lo;
        self.hi = hi;
        true
    }

    /// One step of the full process. Returns whether the interval shrank.
    #[inline]
    pub fn step(&mut self, rng: &mut RngStream) -> bool {
        let x = self.law.sample(rng);
        self.step_with(x)
    }

    /// Value-returning form of [`IntervalState::step`].
    pub fn stepped(mut self, rng: &mut RngStream) -> Self {
        self.step(rng);
        self
    }

    fn check(&self, before: &Self, log: &mut InvariantLog) {
        log.check(self.lo >= before.lo && self.hi <= before.hi, || {
            format!("interval not nested: {before:?} -> {self:?}")
        });
        log.check(self.hi - self.lo >= 1.0, || {
            format!("interval radius below 1/2: {self:?}")
        });
    }
}

/// Result of [`run_scaled`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalRun {
    /// `4 n^{1/δ} (r_n − 1/2)`.
    pub scaled: f64,
    /// `r_n − 1/2`; also a bound on `|Z_n − Z_∞|`.
    pub excess: f64,
    pub center: f64,
    pub changes: u64,
}

/// Advances `n` full steps and reports the rate statistic `4 n^{1/δ}(r_n − 1/2)`.
pub fn run_scaled(state: IntervalState, n: u64, rng: &mut RngStream) -> Result<IntervalRun> {
    run_scaled_logged(state, n, rng, &mut InvariantLog::new())
}

/// [`run_scaled`] with nestedness checked at every effective move.
pub fn run_scaled_logged(
    mut state: IntervalState,
    n: u64,
    rng: &mut RngStream,
    log: &mut InvariantLog,
) -> Result<IntervalRun> {
    if n == 0 {
        return Err(domain("step count n must be at least 1"));
    }
    let mut changes = 0;
    for _ in 0..n {
        let before = state;
        if state.step(rng) {
            changes += 1;
            state.check(&before, log);
        }
    }
    let excess = state.excess();
    Ok(IntervalRun {
        scaled: 4.0 * (n as f64).powf(state.law.delta().recip()) * excess,
        excess,
        center: state.center(),
        changes,
    })
}

/// Direction of an effective move of the thinned chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The thinned chain `(Z̃, ℓ̃)` with `ℓ̃ = r̃ − 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThinnedIntervalState {
    pub center: f64,
    pub excess: f64,
    c: f64,
    delta: f64,
}

impl ThinnedIntervalState {
    /// Starts at `(Z̃, ℓ̃) = (0, 1/2)`. Requires `c ∈ (0, 1)`: at the end
    /// points the center degenerates to `∓1/2`.
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        Self::with_state(0.0, 0.5, c, delta)
    }

    pub fn with_state(center: f64, excess: f64, c: f64, delta: f64) -> Result<Self> {
        validate_thinned(c, delta)?;
        if !(excess > 0.0 && excess <= 0.5) {
            return Err(domain(format!("excess {excess} outside (0, 1/2]")));
        }
        Ok(Self {
            center,
            excess,
            c,
            delta,
        })
    }

    /// `(Z̃ + ξ ℓ̃ (1 − V), ℓ̃ V)`.
    #[inline]
    pub fn step_with(&mut self, sign: Sign, v: f64) {
        self.center += sign.value() * self.excess * (1.0 - v);
        self.excess *= v;
    }

    pub fn step(&mut self, rng: &mut RngStream) {
        let (sign, v) = thinned_draw(rng, self.c, self.delta);
        self.step_with(sign, v);
    }
}

fn validate_thinned(c: f64, delta: f64) -> Result<()> {
    if !(c > 0.0 && c < 1.0) {
        return Err(config(format!(
            "c = {c} must lie in (0, 1); c ∈ {{0, 1}} gives a degenerate center"
        )));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(config(format!("delta = {delta} must be positive")));
    }
    Ok(())
}

/// `ξ = +1` with probability `1 − c`, and `V` with CDF `x^δ`.
#[inline]
fn thinned_draw(rng: &mut RngStream, c: f64, delta: f64) -> (Sign, f64) {
    let sign = if rng.uniform() < 1.0 - c {
        Sign::Plus
    } else {
        Sign::Minus
    };
    (sign, power_sample(rng, delta))
}

/// A truncated evaluation of `(1/2) Σ ξ_i V_1⋯V_{i−1}(1 − V_i)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSum {
    pub value: f64,
    /// `(1/2) V_1⋯V_n`, an upper bound on the absolute value of the tail.
    pub remainder_bound: f64,
    pub terms: usize,
}

/// Sums the series over the supplied draws, stopping as soon as the
/// remainder bound drops below `tol` or the draws run out.
pub fn series_partial_sum(
    draws: impl IntoIterator<Item = (Sign, f64)>,
    tol: f64,
) -> Result<SeriesSum> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(domain(format!("tolerance {tol} must be positive")));
    }
    let mut value = 0.0;
    let mut weight = 0.5;
    let mut terms = 0;
    for (sign, v) in draws {
        if weight < tol {
            break;
        }
        value += sign.value() * weight * (1.0 - v);
        weight *= v;
        terms += 1;
    }
    Ok(SeriesSum {
        value,
        remainder_bound: weight,
        terms,
    })
}

/// One draw of the limit center `Z_∞`, accurate to `tol`.
pub fn center_series_sample(rng: &mut RngStream, c: f64, delta: f64, tol: f64) -> Result<f64> {
    validate_thinned(c, delta)?;
    let draws = std::iter::from_fn(|| Some(thinned_draw(rng, c, delta)));
    series_partial_sum(draws, tol).map(|s| s.value)
}
