//! Limit laws of the diminishing processes and the samplers that drive them.
//!
//! Every sampler consumes an explicit [`RngStream`]. Closed-form inverses are
//! exposed separately (`quantile`, `simplex_height_from_uniform`) so callers
//! can feed forced draws.

use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta as BetaDist, ContinuousCDF};
use statrs::function::gamma::ln_gamma;
use std::f64::consts::PI;

use crate::error::{config, domain};
use crate::{Error, Result, RngStream};

/// Tolerance on `Σ x_i = 1` for points of the probability simplex.
pub const SIMPLEX_SUM_TOL: f64 = 1e-12;

/// Distribution of the point position on `[0, 1]` in the generalized
/// interval process:
///
/// ```text
/// F(x) = c 2^δ x^δ                 x ∈ [0, 1/2]
/// F(x) = 1 − (1 − c) 2^δ (1 − x)^δ  x ∈ [1/2, 1]
/// ```
///
/// `2 min(X, 1 − X)` then has CDF `x^δ` and is independent of `X ≤ 1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfForm {
    c: f64,
    delta: f64,
}

impl DfForm {
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(config(format!("c = {c} must lie in [0, 1]")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(config(format!("delta = {delta} must be positive")));
        }
        Ok(Self { c, delta })
    }

    /// The uniform law on `[0, 1]`.
    pub fn uniform() -> Self {
        Self { c: 0.5, delta: 1.0 }
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(domain(format!("x = {x} outside [0, 1]")));
        }
        let scale = 2f64.powf(self.delta);
        Ok(if x <= 0.5 {
            self.c * scale * x.powf(self.delta)
        } else {
            1.0 - (1.0 - self.c) * scale * (1.0 - x).powf(self.delta)
        })
    }

    /// Inverse CDF. `u` must lie in `[0, 1]`.
    #[inline]
    pub fn quantile(&self, u: f64) -> f64 {
        let Self { c, delta } = *self;
        if c > 0.0 && u <= c {
            0.5 * root(u / c, delta)
        } else {
            1.0 - 0.5 * root((1.0 - u) / (1.0 - c), delta)
        }
    }

    #[inline]
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.quantile(rng.uniform())
    }
}

/// `x^(1/delta)` with the common `delta ∈ {1, 2}` cases kept exact and cheap.
#[inline]
pub(crate) fn root(x: f64, delta: f64) -> f64 {
    if delta == 1.0 {
        x
    } else if delta == 2.0 {
        x.sqrt()
    } else {
        x.powf(delta.recip())
    }
}

/// Draws from `V` with `P{V ≤ x} = x^δ` on `(0, 1)`.
#[inline]
pub fn power_sample(rng: &mut RngStream, delta: f64) -> f64 {
    root(rng.uniform_open(), delta)
}

/// The height law `H_d(x) = 1 − (1 − x)^d` from a uniform draw `u`:
/// `h = 1 − u^{1/d}`.
#[inline]
pub fn simplex_height_from_uniform(u: f64, d: u32) -> f64 {
    1.0 - root(u, d as f64)
}

/// Inverse of `H_d`: the `x` with `H_d(x) = q`.
pub fn simplex_height_quantile(q: f64, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(domain("simplex height law needs d ≥ 1"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(domain(format!("probability {q} outside [0, 1]")));
    }
    Ok(1.0 - (1.0 - q).powf(1.0 / d as f64))
}

pub fn simplex_height_sample(rng: &mut RngStream, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(domain("simplex height law needs d ≥ 1"));
    }
    Ok(simplex_height_from_uniform(rng.uniform_open(), d))
}

/// Which quantity [`LawSpec::eval`] returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    Cdf,
    Pdf,
}

/// The analytic limit laws appearing in the limit theorems.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LawSpec {
    /// `1 − exp(−x^shape)` on `x ≥ 0`.
    Weibull { shape: f64 },
    /// Beta law on `(0, 1)`.
    Beta { a: f64, b: f64 },
    /// Arcsine law translated to `(−1/2, 1/2)`.
    Arcsine,
    /// Standard exponential.
    Exp1,
    /// Maximum of `d` independent standard exponentials, `(1 − e^{−x})^d`.
    MaxExp { d: u32 },
    /// Symmetric Dirichlet law on the `dim`-point simplex.
    DirichletSym { dim: usize, a: f64 },
    /// `H_d(x) = 1 − (1 − x)^d` on `[0, 1]`.
    SimplexHeight { d: u32 },
}

impl LawSpec {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(config(format!("{name} = {v} must be positive")))
            }
        };
        match *self {
            Self::Weibull { shape } => positive("shape", shape),
            Self::Beta { a, b } => positive("a", a).and(positive("b", b)),
            Self::Arcsine | Self::Exp1 => Ok(()),
            Self::MaxExp { d } | Self::SimplexHeight { d } if d == 0 => {
                Err(config("dimension d must be at least 1"))
            }
            Self::MaxExp { .. } | Self::SimplexHeight { .. } => Ok(()),
            Self::DirichletSym { dim, a } => {
                if dim < 2 {
                    Err(config("Dirichlet law needs at least 2 coordinates"))
                } else {
                    positive("a", a)
                }
            }
        }
    }

    /// `(lower, upper)` end points of the support.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Weibull { .. } | Self::Exp1 | Self::MaxExp { .. } => (0.0, f64::INFINITY),
            Self::Beta { .. } | Self::SimplexHeight { .. } | Self::DirichletSym { .. } => {
                (0.0, 1.0)
            }
            Self::Arcsine => (-0.5, 0.5),
        }
    }

    pub fn eval(&self, x: f64, mode: EvalMode) -> Result<f64> {
        match mode {
            EvalMode::Cdf => self.cdf(x),
            EvalMode::Pdf => self.pdf(x),
        }
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if let Self::DirichletSym { .. } = self {
            return Err(multivariate());
        }
        let (lo, hi) = self.support();
        if x <= lo {
            return Ok(0.0);
        }
        if x >= hi {
            return Ok(1.0);
        }
        Ok(match *self {
            Self::Weibull { shape } => -(-x.powf(shape)).exp_m1(),
            Self::Beta { a, b } => beta(a, b)?.cdf(x),
            Self::Arcsine => 2.0 / PI * (x + 0.5).sqrt().asin(),
            Self::Exp1 => -(-x).exp_m1(),
            Self::MaxExp { d } => (-(-x).exp_m1()).powi(d as i32),
            Self::SimplexHeight { d } => 1.0 - (1.0 - x).powi(d as i32),
            Self::DirichletSym { .. } => return Err(multivariate()),
        })
    }

    /// Density on the open support.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        if let Self::DirichletSym { .. } = self {
            return Err(multivariate());
        }
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return Ok(0.0);
        }
        Ok(match *self {
            Self::Weibull { shape } => shape * x.powf(shape - 1.0) * (-x.powf(shape)).exp(),
            Self::Beta { a, b } => {
                let ln = (a - 1.0) * x.ln() + (b - 1.0) * (1.0 - x).ln() + ln_gamma(a + b)
                    - ln_gamma(a)
                    - ln_gamma(b);
                ln.exp()
            }
            Self::Arcsine => 1.0 / (PI * ((0.5 + x) * (0.5 - x)).sqrt()),
            Self::Exp1 => (-x).exp(),
            Self::MaxExp { d } => d as f64 * (-(-x).exp_m1()).powi(d as i32 - 1) * (-x).exp(),
            Self::SimplexHeight { d } => d as f64 * (1.0 - x).powi(d as i32 - 1),
            Self::DirichletSym { .. } => return Err(multivariate()),
        })
    }

    /// One scalar draw. The Dirichlet law is multivariate; use
    /// [`dirichlet_sample`] for it.
    pub fn sample(&self, rng: &mut RngStream) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            Self::Weibull { shape } => rng.exp1().powf(shape.recip()),
            Self::Beta { a, b } => {
                let x = gamma_sample(rng, a);
                let y = gamma_sample(rng, b);
                x / (x + y)
            }
            Self::Arcsine => {
                let s = (0.5 * PI * rng.uniform()).sin();
                s * s - 0.5
            }
            Self::Exp1 => rng.exp1(),
            Self::MaxExp { d } => -(-root(rng.uniform_open(), d as f64)).ln_1p(),
            Self::SimplexHeight { d } => simplex_height_from_uniform(rng.uniform_open(), d),
            Self::DirichletSym { .. } => return Err(multivariate()),
        })
    }
}

fn multivariate() -> Error {
    config("the Dirichlet law is multivariate; use dirichlet_pdf / dirichlet_sample")
}

fn beta(a: f64, b: f64) -> Result<BetaDist> {
    BetaDist::new(a, b).map_err(|e| config(format!("beta({a}, {b}): {e}")))
}

/// Gamma(shape, 1) variate.
pub fn gamma_sample(rng: &mut RngStream, shape: f64) -> f64 {
    Gamma::new(shape, 1.0)
        .expect("gamma shape validated by caller")
        .sample(rng)
}

/// Dirichlet draw by normalizing independent gamma variates.
pub fn dirichlet_sample(rng: &mut RngStream, a: &[f64]) -> Result<Vec<f64>> {
    if a.len() < 2 {
        return Err(config("Dirichlet law needs at least 2 parameters"));
    }
    if let Some(bad) = a.iter().find(|&&ai| !(ai > 0.0 && ai.is_finite())) {
        return Err(config(format!(
            "Dirichlet parameter {bad} must be positive"
        )));
    }
    let mut x: Vec<f64> = a.iter().map(|&ai| gamma_sample(rng, ai)).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|xi| *xi /= total);
    Ok(x)
}

/// Dirichlet density of `(x_1, …, x_d)` with `x_0 = 1 − Σ_{i≥1} x_i`:
///
/// ```text
/// Γ(Σ a_i) / Π Γ(a_i) · Π x_i^{a_i − 1}
/// ```
pub fn dirichlet_pdf(a: &[f64], x: &[f64]) -> Result<f64> {
    if a.len() < 2 || a.len() != x.len() {
        return Err(domain(format!(
            "need matching parameter and point lengths ≥ 2, got {} and {}",
            a.len(),
            x.len()
        )));
    }
    if let Some(bad) = a.iter().find(|&&ai| !(ai > 0.0 && ai.is_finite())) {
        return Err(config(format!(
            "Dirichlet parameter {bad} must be positive"
        )));
    }
    let sum: f64 = x.iter().sum();
    if x.iter().any(|&xi| xi < 0.0 || !xi.is_finite()) || (sum - 1.0).abs() > SIMPLEX_SUM_TOL {
        return Err(domain(format!(
            "point {x:?} is not on the probability simplex"
        )));
    }
    let mut ln = ln_gamma(a.iter().sum());
    for (i, (&ai, &xi)) in a.iter().zip(x).enumerate() {
        ln -= ln_gamma(ai);
        if ai == 1.0 {
            continue;
        }
        if xi == 0.0 {
            if ai < 1.0 {
                return Err(Error::InfiniteDensity {
                    index: i,
                    param: ai,
                });
            }
            return Ok(0.0);
        }
        ln += (ai - 1.0) * xi.ln();
    }
    Ok(ln.exp())
}
