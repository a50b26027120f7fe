//! Radial initial value problem
//!
//! `(r^{N-1} u')' = r^{N-1} g(r, v)`, `(r^{N-1} v')' = r^{N-1} f(r, u')`,
//! `u'(0) = v'(0) = 0`.
//!
//! The shooting integrator works with `y = (ln u, ln v, ln u', ln v')` as
//! functions of `t = ln r`:
//!
//! ```text
//! (ln u)_t  = X = r u'/u          (ln v)_t  = Y = r v'/v
//! (ln u')_t = Z - (N-1),  Z = r g(r, v)/u'
//! (ln v')_t = W - (N-1),  W = r f(r, u')/v'
//! ```
//!
//! which stays representable long after `u` and `v` overflow a double and
//! turns power-law growth into linear growth. Blow-up is declared when the
//! scale-free slope `max(X, Y)` crosses a threshold.

use std::io::Write;

use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::fit::linear_fit;
use crate::model::{Coupling, Domain, InitialData, ProblemSpec};
use crate::ode::{self, StepControl, Termination};
use crate::quad::gauss_legendre;

/// A point of a radial solution. Values are held as logarithms, so `u()`
/// and friends may return `inf` for solutions that outgrow `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialState {
    pub r: f64,
    ln_u: f64,
    ln_v: f64,
    ln_du: f64,
    ln_dv: f64,
}

impl RadialState {
    pub fn new(r: f64, u: f64, v: f64, du: f64, dv: f64) -> Self {
        RadialState {
            r,
            ln_u: u.ln(),
            ln_v: v.ln(),
            ln_du: du.ln(),
            ln_dv: dv.ln(),
        }
    }

    pub fn from_logs(r: f64, ln_u: f64, ln_v: f64, ln_du: f64, ln_dv: f64) -> Self {
        RadialState {
            r,
            ln_u,
            ln_v,
            ln_du,
            ln_dv,
        }
    }

    pub fn u(&self) -> f64 {
        self.ln_u.exp()
    }
    pub fn v(&self) -> f64 {
        self.ln_v.exp()
    }
    pub fn du(&self) -> f64 {
        self.ln_du.exp()
    }
    pub fn dv(&self) -> f64 {
        self.ln_dv.exp()
    }
    pub fn ln_u(&self) -> f64 {
        self.ln_u
    }
    pub fn ln_v(&self) -> f64 {
        self.ln_v
    }
    pub fn ln_du(&self) -> f64 {
        self.ln_du
    }
    pub fn ln_dv(&self) -> f64 {
        self.ln_dv
    }

    /// `r u'/u`
    pub fn x(&self) -> f64 {
        (self.r.ln() + self.ln_du - self.ln_u).exp()
    }

    /// `r v'/v`
    pub fn y(&self) -> f64 {
        (self.r.ln() + self.ln_dv - self.ln_v).exp()
    }

    fn logs(&self) -> [f64; 4] {
        [self.ln_u, self.ln_v, self.ln_du, self.ln_dv]
    }
}

impl Serialize for RadialState {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("RadialState", 5)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("u", &self.u())?;
        st.serialize_field("v", &self.v())?;
        st.serialize_field("du", &self.du())?;
        st.serialize_field("dv", &self.dv())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupReport {
    #[serde(rename = "R_est")]
    pub r_est: f64,
    pub u_blows: bool,
    pub v_blows: bool,
    /// Degree of the polynomial extrapolated to locate the pole.
    pub extrapolation_order: u32,
    /// Fitted `k` in `u' ~ (R - r)^{-k}`; `u` is unbounded iff `k >= 1`.
    pub du_exponent: f64,
    /// Fitted `k` in `v' ~ (R - r)^{-k}`.
    pub dv_exponent: f64,
    pub tail_points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub grid: Vec<RadialState>,
    pub blowup: Option<BlowupReport>,
    pub residual_norm: f64,
}

impl RadialSolution {
    pub fn last(&self) -> &RadialState {
        self.grid.last().expect("solutions are never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub rtol: f64,
    pub atol: f64,
    /// End of whole-space runs.
    pub r_max: f64,
    /// Blow-up is declared once `r u'/u` or `r v'/v` exceeds this.
    pub threshold: f64,
    /// Name of the embedded pair, see [`ode::pair_names`].
    pub method: String,
    /// Step cap in `t = ln r`.
    pub max_log_step: f64,
    /// Cap on the change of any logarithm per step.
    pub max_increment: f64,
    /// Starting radius; defaults to `1e-6 · max(1, R)` on a ball and `1e-6`
    /// on the whole space.
    pub r_start: Option<f64>,
    /// Radii the output grid must contain.
    pub knots: Vec<f64>,
    pub max_steps: usize,
}

/// Blow-up exponents within this distance below 1 are treated as 1: the
/// critical case `u' ~ (R - r)^{-1}` diverges only logarithmically.
pub const CRITICAL_EXPONENT_SLACK: f64 = 0.05;

/// Points needed in the last decade of growth to fit the pole.
pub const MIN_TAIL_POINTS: usize = 10;

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rtol: 1e-9,
            atol: 1e-12,
            r_max: 1e4,
            threshold: 1e8,
            method: ode::DEFAULT_PAIR.to_string(),
            max_log_step: 0.05,
            max_increment: 0.1,
            r_start: None,
            knots: Vec::new(),
            max_steps: 2_000_000,
        }
    }
}

impl SolverConfig {
    pub fn ensure_valid(&self) -> Result<()> {
        let positive = [
            ("rtol", self.rtol),
            ("r_max", self.r_max),
            ("threshold", self.threshold),
            ("max_log_step", self.max_log_step),
            ("max_increment", self.max_increment),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || v.is_nan() {
                return Err(LabError::InvalidArgument(format!("{name} = {v} must be > 0")));
            }
        }
        if !(self.atol >= 0.0) {
            return Err(LabError::InvalidArgument(format!("atol = {} must be >= 0", self.atol)));
        }
        if let Some(r0) = self.r_start {
            if !(r0 > 0.0 && r0.is_finite()) {
                return Err(LabError::InvalidArgument(format!("r_start = {r0} must be > 0")));
            }
        }
        ode::pair(&self.method)?;
        Ok(())
    }
}

/// `t^{1-N} ∫_0^t τ^{N-1} φ(τ) dτ` by Gauss–Legendre on a smooth integrand.
fn radial_average(n: f64, t: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let rule = gauss_legendre(24);
    let half = 0.5 * t;
    let sum: f64 = rule
        .iter()
        .map(|&(x, w)| {
            let tau = half * (x + 1.0);
            w * (tau / t).powf(n - 1.0) * phi(tau)
        })
        .sum();
    half * sum
}

fn integrate_0(t: f64, phi: impl Fn(f64) -> f64) -> f64 {
    let rule = gauss_legendre(24);
    let half = 0.5 * t;
    half * rule.iter().map(|&(x, w)| w * phi(half * (x + 1.0))).sum::<f64>()
}

/// Leading-order state at `r_start`, from freezing `v = v(0)` inside `g`
/// and substituting the resulting `u'` into `f`.
///
/// For the power family `u' = κ_g v0^p r^{a+1}/(N+a)` and
/// `v' = κ_f (κ_g v0^p/(N+a))^s r^{(a+1)s+b+1} / (N+b+s(a+1))`; the
/// relative error of both is `O(r_start^{a+2})`.
pub fn series_start(spec: &ProblemSpec, init: &InitialData, r_start: f64) -> Result<RadialState> {
    if !(r_start > 0.0 && r_start.is_finite()) {
        return Err(LabError::InvalidArgument(format!("r_start = {r_start} must be > 0")));
    }
    init.ensure_valid()?;
    let n = spec.n();
    let (a, b) = (spec.a, spec.b);
    let (u0, v0) = (init.u0, init.v0);
    let r = r_start;

    let (du, u) = match &spec.coupling {
        Coupling::Power { p, .. } | Coupling::Gradient { p, .. } => {
            let c = spec.g_coeff * v0.powf(*p) / (n + a);
            (c * r.powf(a + 1.0), u0 + c * r.powf(a + 2.0) / (a + 2.0))
        }
        Coupling::General { .. } => {
            let du_at = |t: f64| radial_average(n, t, |tau| spec.g(tau, v0));
            (du_at(r), u0 + integrate_0(r, du_at))
        }
    };

    let (dv, v) = match &spec.coupling {
        Coupling::Power { p, s } => {
            let c = spec.g_coeff * v0.powf(*p) / (n + a);
            let e = b + s * (a + 1.0);
            let k = spec.f_coeff * c.powf(*s) / (n + e);
            (k * r.powf(e + 1.0), v0 + k * r.powf(e + 2.0) / (e + 2.0))
        }
        Coupling::Gradient { p, .. } => {
            let c = spec.g_coeff * v0.powf(*p) / (n + a);
            let dv_at = |t: f64| radial_average(n, t, |tau| spec.f(tau, c * tau.powf(a + 1.0)));
            (dv_at(r), v0 + integrate_0(r, dv_at))
        }
        Coupling::General { .. } => {
            let du_at = |t: f64| radial_average(n, t, |tau| spec.g(tau, v0));
            let dv_at = |t: f64| radial_average(n, t, |tau| spec.f(tau, du_at(tau)));
            (dv_at(r), v0 + integrate_0(r, dv_at))
        }
    };
    if !(du > 0.0) {
        return Err(LabError::VanishingDenominator("u'(r_start)"));
    }
    if !(dv > 0.0) {
        return Err(LabError::VanishingDenominator("v'(r_start)"));
    }
    Ok(RadialState::new(r, u, v, du, dv))
}

fn log_rhs(spec: &ProblemSpec, t: f64, y: &[f64; 4]) -> [f64; 4] {
    let n1 = spec.n() - 1.0;
    let x = (t + y[2] - y[0]).exp();
    let yy = (t + y[3] - y[1]).exp();
    let z = (t + spec.ln_g(t, y[1]) - y[2]).exp();
    let w = (t + spec.ln_f(t, y[2]) - y[3]).exp();
    [x, yy, z - n1, w - n1]
}

/// Shoots from the origin until the ball radius, `config.r_max` (whole
/// space) or a blow-up event, whichever comes first.
pub fn integrate_radial(spec: &ProblemSpec, init: &InitialData, config: &SolverConfig) -> Result<RadialSolution> {
    spec.ensure_valid()?;
    init.ensure_valid()?;
    config.ensure_valid()?;
    let r_end = match spec.domain {
        Domain::Ball(r) => r,
        Domain::EntireSpace => config.r_max,
    };
    let r_start = config.r_start.unwrap_or(match spec.domain {
        Domain::Ball(r) => 1e-6 * r.max(1.0),
        Domain::EntireSpace => 1e-6,
    });
    if r_start >= r_end {
        return Err(LabError::InvalidArgument(format!(
            "r_start = {r_start:e} is not below the end radius {r_end:e}"
        )));
    }
    let start = series_start(spec, init, r_start)?;
    let pair = ode::pair(&config.method)?;
    // An absolute error δ in ln u is a relative error δ in u.
    let ctl = StepControl {
        rtol: 0.0,
        atol: config.rtol + config.atol,
        h_init: None,
        h_max: config.max_log_step,
        max_increment: config.max_increment,
        max_steps: config.max_steps,
    };
    let mut knots: Vec<f64> = config
        .knots
        .iter()
        .filter(|&&k| k > r_start && k < r_end)
        .map(|k| k.ln())
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let threshold = config.threshold;
    let path = ode::solve(
        pair,
        &mut |t, y| log_rhs(spec, t, y),
        r_start.ln(),
        start.logs(),
        r_end.ln(),
        &knots,
        &ctl,
        &mut |t, y| {
            let x = (t + y[2] - y[0]).exp();
            let yy = (t + y[3] - y[1]).exp();
            x.max(yy) > threshold
        },
    )
    .map_err(|e| match e {
        LabError::StepUnderflow { r: t, h } => LabError::StepUnderflow {
            r: t.exp(),
            h: t.exp() * h,
        },
        other => other,
    })?;

    let mut grid: Vec<RadialState> = path
        .t
        .iter()
        .zip(&path.y)
        .map(|(&t, y)| RadialState::from_logs(t.exp(), y[0], y[1], y[2], y[3]))
        .collect();
    grid[0].r = r_start;
    if path.termination == Termination::Reached {
        grid.last_mut().expect("nonempty").r = r_end;
    }
    let mut sol = RadialSolution {
        grid,
        blowup: None,
        residual_norm: 0.0,
    };
    if path.termination == Termination::Event {
        sol.blowup = Some(detect_blowup(&sol, threshold)?);
    }
    sol.residual_norm = residual(&sol, spec);
    Ok(sol)
}

/// Locates the pole from the tail of a solution stopped by the slope
/// threshold.
///
/// Near a pole of power type, `φ/φ' ≈ (R - r)/k` for the faster-growing
/// component `φ`, so a straight-line fit of `φ/φ'` against `r` over the last
/// decade of growth extrapolates to `R`. The exponents of `u'` and `v'` are
/// then fitted against `ln(R - r)`; a component is unbounded iff its
/// derivative's exponent reaches 1.
pub fn detect_blowup(sol: &RadialSolution, threshold: f64) -> Result<BlowupReport> {
    let g = &sol.grid;
    let xs: Vec<f64> = g.iter().map(|s| s.x()).collect();
    let ys: Vec<f64> = g.iter().map(|s| s.y()).collect();
    let Some(last) = g.len().checked_sub(1) else {
        return Err(LabError::InsufficientTail {
            found: 0,
            needed: MIN_TAIL_POINTS,
        });
    };
    let use_u = xs[last] > ys[last];
    let slope = if use_u { &xs } else { &ys };
    let cut = threshold.min(slope[last]) / 10.0;
    let mut first = last + 1;
    while first > 0 && slope[first - 1] >= cut {
        first -= 1;
    }
    let found = last + 1 - first;
    if found < MIN_TAIL_POINTS {
        return Err(LabError::InsufficientTail {
            found,
            needed: MIN_TAIL_POINTS,
        });
    }
    let tail = &g[first..];
    let r: Vec<f64> = tail.iter().map(|s| s.r).collect();
    let q: Vec<f64> = tail.iter().zip(&slope[first..]).map(|(s, k)| s.r / k).collect();
    let line = linear_fit(&r, &q)?;
    if !(line.slope < 0.0) {
        return Err(LabError::NoPole);
    }
    let r_est = (-line.intercept / line.slope).max(g[last].r);

    let exponent = |ln_d: &dyn Fn(&RadialState) -> f64| -> Result<f64> {
        let (mut lx, mut ly) = (Vec::new(), Vec::new());
        for s in tail {
            let gap = r_est - s.r;
            if gap > 0.0 {
                lx.push(gap.ln());
                ly.push(ln_d(s));
            }
        }
        Ok(-linear_fit(&lx, &ly)?.slope)
    };
    let du_exponent = exponent(&|s| s.ln_du)?;
    let dv_exponent = exponent(&|s| s.ln_dv)?;
    let critical = 1.0 - CRITICAL_EXPONENT_SLACK;
    let u_blows = du_exponent >= critical;
    let v_blows = dv_exponent >= critical;
    if !(u_blows || v_blows) {
        return Err(LabError::NoPole);
    }
    Ok(BlowupReport {
        r_est,
        u_blows,
        v_blows,
        extrapolation_order: 1,
        du_exponent,
        dv_exponent,
        tail_points: found,
    })
}

/// Result of [`picard_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub solution: RadialSolution,
    /// Sup-norm change of `(u, v, u', v')` in the last sweep.
    pub last_change: f64,
    pub sweeps: usize,
}

/// Default number of uniform intervals on `[0, r_max]`.
pub const PICARD_INTERVALS: usize = 2000;

/// Cumulative integral on a uniform grid with fourth-order local cubics.
fn cumulative4(f: &[f64], h: f64) -> Vec<f64> {
    let m = f.len() - 1;
    let mut out = vec![0.0; m + 1];
    for i in 0..m {
        let piece = if i == 0 {
            9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]
        } else if i == m - 1 {
            f[m - 3] - 5.0 * f[m - 2] + 19.0 * f[m - 1] + 9.0 * f[m]
        } else {
            -f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]
        };
        out[i + 1] = out[i] + h * piece / 24.0;
    }
    out
}

/// Fixed-point iteration of the integral form
/// `u'(r) = r^{1-N} ∫_0^r t^{N-1} g(t, v) dt`, `u = u(0) + ∫_0^r u'` (and
/// likewise for `v`), on [`PICARD_INTERVALS`] uniform intervals.
pub fn picard_solve(spec: &ProblemSpec, init: &InitialData, r_max: f64, iters: usize) -> Result<PicardResult> {
    picard_solve_on(spec, init, r_max, iters, PICARD_INTERVALS)
}

pub fn picard_solve_on(
    spec: &ProblemSpec,
    init: &InitialData,
    r_max: f64,
    iters: usize,
    intervals: usize,
) -> Result<PicardResult> {
    spec.ensure_valid()?;
    init.ensure_valid()?;
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(LabError::InvalidArgument(format!("r_max = {r_max} must be > 0")));
    }
    if intervals < 4 {
        return Err(LabError::InvalidArgument("Picard grid needs >= 4 intervals".into()));
    }
    let m = intervals;
    let h = r_max / m as f64;
    let n1 = spec.n() - 1.0;
    let r: Vec<f64> = (0..=m).map(|i| r_max * i as f64 / m as f64).collect();
    let weight: Vec<f64> = r.iter().map(|x| x.powf(n1)).collect();
    let mut u = vec![init.u0; m + 1];
    let mut v = vec![init.v0; m + 1];
    let mut w = vec![0.0; m + 1];
    let mut z = vec![0.0; m + 1];

    let mut last_change = 0.0;
    let mut prev = f64::INFINITY;
    let mut growing = 0;
    for _ in 0..iters {
        let gi: Vec<f64> = (0..=m).map(|i| weight[i] * spec.g(r[i], v[i])).collect();
        let cg = cumulative4(&gi, h);
        let w_new: Vec<f64> = (0..=m).map(|i| if i == 0 { 0.0 } else { cg[i] / weight[i] }).collect();
        let cu = cumulative4(&w_new, h);
        let u_new: Vec<f64> = cu.iter().map(|c| init.u0 + c).collect();
        let fi: Vec<f64> = (0..=m).map(|i| weight[i] * spec.f(r[i], w_new[i])).collect();
        let cf = cumulative4(&fi, h);
        let z_new: Vec<f64> = (0..=m).map(|i| if i == 0 { 0.0 } else { cf[i] / weight[i] }).collect();
        let cv = cumulative4(&z_new, h);
        let v_new: Vec<f64> = cv.iter().map(|c| init.v0 + c).collect();

        let mut change: f64 = 0.0;
        for i in 0..=m {
            change = change
                .max((u_new[i] - u[i]).abs())
                .max((v_new[i] - v[i]).abs())
                .max((w_new[i] - w[i]).abs())
                .max((z_new[i] - z[i]).abs());
        }
        if !change.is_finite() {
            return Err(LabError::PicardDivergence(change));
        }
        growing = if change > prev { growing + 1 } else { 0 };
        if growing >= 3 {
            return Err(LabError::PicardDivergence(change));
        }
        prev = change;
        last_change = change;
        (u, v, w, z) = (u_new, v_new, w_new, z_new);
    }

    let grid: Vec<RadialState> = (1..=m).map(|i| RadialState::new(r[i], u[i], v[i], w[i], z[i])).collect();
    let mut solution = RadialSolution {
        grid,
        blowup: None,
        residual_norm: 0.0,
    };
    if iters > 0 {
        solution.residual_norm = residual(&solution, spec);
    }
    Ok(PicardResult {
        solution,
        last_change,
        sweeps: iters,
    })
}

/// Maps a solution on the ball of radius `R0` to `r ↦ (u(r/λ), v(r/λ))` on
/// the ball of radius `λR0`, together with the problem it solves:
/// `g̃(r, t) = λ^{-2} g(r/λ, t)`, `f̃(r, t) = λ^{-2} f(r/λ, λt)`.
pub fn rescale_solution(sol: &RadialSolution, lambda: f64, spec: &ProblemSpec) -> Result<(RadialSolution, ProblemSpec)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(LabError::InvalidArgument(format!("lambda = {lambda} must be > 0")));
    }
    if lambda == 1.0 {
        return Ok((sol.clone(), spec.clone()));
    }
    let ln_l = lambda.ln();
    let grid = sol
        .grid
        .iter()
        .map(|s| RadialState::from_logs(lambda * s.r, s.ln_u, s.ln_v, s.ln_du - ln_l, s.ln_dv - ln_l))
        .collect();
    let mut out = spec.clone();
    out.domain = match spec.domain {
        Domain::Ball(r) => Domain::Ball(lambda * r),
        Domain::EntireSpace => Domain::EntireSpace,
    };
    match &spec.coupling {
        Coupling::Power { s, .. } => {
            out.g_coeff = spec.g_coeff * lambda.powf(-2.0 - spec.a);
            out.f_coeff = spec.f_coeff * lambda.powf(s - 2.0 - spec.b);
        }
        Coupling::Gradient { p, h } => {
            out.g_coeff = spec.g_coeff * lambda.powf(-2.0 - spec.a);
            out.f_coeff = spec.f_coeff * lambda.powf(-2.0 - spec.b);
            out.coupling = Coupling::Gradient {
                p: *p,
                h: h.rescaled(lambda, 1.0),
            };
        }
        Coupling::General { g_radial, g_value, h } => {
            out.g_coeff = spec.g_coeff * lambda.powf(-2.0);
            out.f_coeff = spec.f_coeff * lambda.powf(-2.0 - spec.b);
            out.coupling = Coupling::General {
                g_radial: g_radial.rescaled(1.0 / lambda, 1.0),
                g_value: g_value.clone(),
                h: h.rescaled(lambda, 1.0),
            };
        }
    }
    let blowup = sol.blowup.as_ref().map(|b| BlowupReport {
        r_est: lambda * b.r_est,
        ..b.clone()
    });
    let mut rescaled = RadialSolution {
        grid,
        blowup,
        residual_norm: 0.0,
    };
    rescaled.residual_norm = residual(&rescaled, &out);
    Ok((rescaled, out))
}

/// Finite-difference weights (Fornberg) for the `order`-th derivative at
/// `x0` from the nodes `xs`.
pub fn fd_weights(x0: f64, xs: &[f64], order: usize) -> Vec<f64> {
    let n = xs.len();
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.iter().map(|row| row[order]).collect()
}

/// Largest relative defect of the radial equations over interior points.
///
/// With `t = ln r` the equations are checked in the equivalent forms
/// `d ln(r^{N-1}u')/dt = Z`, `d ln(r^{N-1}v')/dt = W`,
/// `d ln u/dt = X`, `d ln v/dt = Y`, each divided by its right-hand side;
/// the first two are `((r^{N-1}u')' - r^{N-1}g) / (r^{N-1}g)` and its
/// `v` counterpart. Derivatives use five-point stencils on the grid.
pub fn residual(sol: &RadialSolution, spec: &ProblemSpec) -> f64 {
    let g = &sol.grid;
    if g.len() < 5 {
        return 0.0;
    }
    let n1 = spec.n() - 1.0;
    let t: Vec<f64> = g.iter().map(|s| s.r.ln()).collect();
    let mut worst: f64 = 0.0;
    for i in 2..g.len() - 2 {
        let w = fd_weights(t[i], &t[i - 2..=i + 2], 1);
        let d = |f: &dyn Fn(&RadialState) -> f64| -> f64 { (0..5).map(|k| w[k] * f(&g[i - 2 + k])).sum() };
        let s = &g[i];
        let big_x = s.x();
        let big_y = s.y();
        let big_z = (t[i] + spec.ln_g(t[i], s.ln_v) - s.ln_du).exp();
        let big_w = (t[i] + spec.ln_f(t[i], s.ln_du) - s.ln_dv).exp();
        let defects = [
            (n1 + d(&|s| s.ln_du)) / big_z - 1.0,
            (n1 + d(&|s| s.ln_dv)) / big_w - 1.0,
            d(&|s| s.ln_u) / big_x - 1.0,
            d(&|s| s.ln_v) / big_y - 1.0,
        ];
        for e in defects {
            worst = if e.is_nan() { f64::INFINITY } else { worst.max(e.abs()) };
        }
    }
    worst
}

/// Dense output with header `r,u,v,du,dv`.
pub fn write_csv(sol: &RadialSolution, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "r,u,v,du,dv")?;
    for s in &sol.grid {
        writeln!(out, "{:e},{:e},{:e},{:e},{:e}", s.r, s.u(), s.v(), s.du(), s.dv())?;
    }
    Ok(())
}
