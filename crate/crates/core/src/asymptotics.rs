//! Whole-space growth rates: closed-form limits and their fitted
//! counterparts.
//!
//! For `p < 1`, `ps < 1` every positive radial solution satisfies
//! `v ~ c_v r^A` and `u ~ c_u r^D` with `A = Y₂` and `D = 2 + a + pA`,
//! where `ξ₂ = (A, B, K)` is the interior equilibrium of the flow in
//! [`crate::dynsys`]. Two candidate values of `c_u` are carried, `c_v^p/(DK)`
//! and `c_v^p/(BD)`; the numerics pick one.

use serde::Serialize;

use crate::criteria::classify_entire;
use crate::dynsys::{xi2, DynParams};
use crate::error::{LabError, Result};
use crate::fit::linear_fit;
use crate::model::{Domain, InitialData, ProblemSpec};
use crate::radial::{integrate_radial, RadialSolution, RadialState, SolverConfig};

/// Shortest admissible fit window, in decades of `r`.
pub const MIN_WINDOW_DECADES: f64 = 2.0;
/// Points of the uniform `ln r` resampling used by the fits.
pub const RESAMPLE_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    #[serde(rename = "A")]
    pub a_const: f64,
    #[serde(rename = "B")]
    pub b_const: f64,
    #[serde(rename = "K")]
    pub k_const: f64,
    #[serde(rename = "D")]
    pub d_const: f64,
    pub v_exponent: f64,
    pub u_exponent: f64,
    /// The alternative u-exponent `((a+2)(1-ps) + ps(a+1) + bp)/(1-ps)`,
    /// smaller than `D` by `2p/(1-ps)`.
    pub u_exponent_alt: f64,
    pub v_prefactor: f64,
    /// `c_v^p / (DK)`
    pub u_prefactor_paper: f64,
    /// `c_v^p / (BD)`, from `u' = r^{a+1} v^p / Z` with `Z → B`.
    pub u_prefactor_consistent: f64,
}

/// Limits for `Δu = r^a v^p`, `Δv = r^b |∇u|^s`.
pub fn predicted_constants(params: &DynParams) -> Result<AsymptoticPrediction> {
    predicted_constants_scaled(params, 1.0, 1.0)
}

/// Limits with coefficients `g = κ_g r^a v^p`, `f = κ_f r^b |∇u|^s`.
pub fn predicted_constants_scaled(params: &DynParams, g_coeff: f64, f_coeff: f64) -> Result<AsymptoticPrediction> {
    let [a_c, b_c, k_c] = xi2(params)?;
    let DynParams { a, b, p, s, .. } = *params;
    let ps = params.ps();
    let d_c = 2.0 + a + p * a_c;
    let v_pref = (a_c * b_c.powf(s) * k_c / (f_coeff * g_coeff.powf(s))).powf(1.0 / (ps - 1.0));
    let lead = g_coeff * v_pref.powf(p);
    Ok(AsymptoticPrediction {
        a_const: a_c,
        b_const: b_c,
        k_const: k_c,
        d_const: d_c,
        v_exponent: a_c,
        u_exponent: d_c,
        u_exponent_alt: ((a + 2.0) * (1.0 - ps) + ps * (a + 1.0) + b * p) / (1.0 - ps),
        v_prefactor: v_pref,
        u_prefactor_paper: lead / (d_c * k_c),
        u_prefactor_consistent: lead / (b_c * d_c),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub exponent_se: f64,
    /// Standard error of `ln prefactor`.
    pub ln_prefactor_se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateFit {
    pub u: ComponentFit,
    pub v: ComponentFit,
    pub window: (f64, f64),
    /// `d ln v / d ln r` at the window end.
    pub v_local_slope_end: f64,
}

/// Cubic Hermite in `ln r` through the logs and their exact slopes.
fn hermite_log(a: &RadialState, b: &RadialState, t: f64, pick: impl Fn(&RadialState) -> (f64, f64)) -> f64 {
    let (ta, tb) = (a.r.ln(), b.r.ln());
    let h = tb - ta;
    let x = (t - ta) / h;
    let ((ya, da), (yb, db)) = (pick(a), pick(b));
    let (x2, x3) = (x * x, x * x * x);
    (2.0 * x3 - 3.0 * x2 + 1.0) * ya + (x3 - 2.0 * x2 + x) * h * da + (-2.0 * x3 + 3.0 * x2) * yb + (x3 - x2) * h * db
}

fn fit_component(ts: &[f64], ys: &[f64]) -> Result<ComponentFit> {
    let line = linear_fit(ts, ys)?;
    Ok(ComponentFit {
        exponent: line.slope,
        prefactor: line.intercept.exp(),
        exponent_se: line.slope_se,
        ln_prefactor_se: line.intercept_se,
    })
}

/// Least-squares fit of `ln u`, `ln v` against `ln r` on `window`, after
/// resampling at equally spaced `ln r`.
pub fn fit_rate(sol: &RadialSolution, window: (f64, f64)) -> Result<RateFit> {
    if sol.blowup.is_some() {
        return Err(LabError::InvalidArgument("fit_rate needs a global solution".into()));
    }
    let (lo, hi) = window;
    let decades = (hi / lo).log10();
    if !(lo > 0.0 && decades.is_finite()) {
        return Err(LabError::InvalidArgument(format!("bad fit window [{lo}, {hi}]")));
    }
    if decades < MIN_WINDOW_DECADES {
        return Err(LabError::ShortWindow {
            decades,
            required: MIN_WINDOW_DECADES,
        });
    }
    let grid = &sol.grid;
    let (first, last) = (grid.first().map(|s| s.r), grid.last().map(|s| s.r));
    match (first, last) {
        (Some(f), Some(l)) if f <= lo * (1.0 + 1e-12) && hi <= l * (1.0 + 1e-12) => {}
        _ => {
            return Err(LabError::InvalidArgument(format!(
                "window [{lo:e}, {hi:e}] not inside the grid [{:e}, {:e}]",
                first.unwrap_or(f64::NAN),
                last.unwrap_or(f64::NAN)
            )))
        }
    }
    let (tlo, thi) = (lo.ln(), hi.ln());
    let m = RESAMPLE_POINTS;
    let mut ts = Vec::with_capacity(m);
    let mut lu = Vec::with_capacity(m);
    let mut lv = Vec::with_capacity(m);
    let mut idx = 0;
    for k in 0..m {
        let t = (tlo + (thi - tlo) * k as f64 / (m - 1) as f64).clamp(grid[0].r.ln(), grid[grid.len() - 1].r.ln());
        while idx + 2 < grid.len() && grid[idx + 1].r.ln() < t {
            idx += 1;
        }
        let (a, b) = (&grid[idx], &grid[(idx + 1).min(grid.len() - 1)]);
        if a.r == b.r {
            lu.push(a.ln_u());
            lv.push(a.ln_v());
        } else {
            lu.push(hermite_log(a, b, t, |s| (s.ln_u(), s.x())));
            lv.push(hermite_log(a, b, t, |s| (s.ln_v(), s.y())));
        }
        ts.push(t);
    }
    // local slope at the window end by interpolating Y linearly in ln r
    let end = grid.partition_point(|s| s.r < hi).min(grid.len() - 1);
    let v_local_slope_end = if grid[end].r == hi || end == 0 {
        grid[end].y()
    } else {
        let (a, b) = (&grid[end - 1], &grid[end]);
        let w = (thi - a.r.ln()) / (b.r.ln() - a.r.ln());
        a.y() + w * (b.y() - a.y())
    };
    Ok(RateFit {
        u: fit_component(&ts, &lu)?,
        v: fit_component(&ts, &lv)?,
        window,
        v_local_slope_end,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsConfig {
    pub solver: SolverConfig,
    /// Defaults to `[r_max/100, r_max]`.
    pub window: Option<(f64, f64)>,
}

impl Default for AsymptoticsConfig {
    fn default() -> Self {
        AsymptoticsConfig {
            solver: SolverConfig {
                r_max: 1e5,
                ..SolverConfig::default()
            },
            window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorChoice {
    Paper,
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelativeErrors {
    pub v_exponent: f64,
    pub u_exponent: f64,
    pub v_prefactor: f64,
    pub u_prefactor_paper: f64,
    pub u_prefactor_consistent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub prediction: AsymptoticPrediction,
    pub fitted_v_exponent: f64,
    pub fitted_u_exponent: f64,
    pub fitted_v_prefactor: f64,
    pub fitted_u_prefactor: f64,
    pub relative_errors: RelativeErrors,
    pub fit_window: (f64, f64),
    /// Standard error of `ln c_u`: least-squares error combined with the
    /// spread between the two half-window fits.
    pub u_prefactor_ln_se: f64,
    pub u_prefactor_winner: PrefactorChoice,
    /// `(|ln c - ln loser| - |ln c - ln winner|) / se`.
    pub u_prefactor_margin_se: f64,
    /// Relative deviation of `c_v^{ps-1}` from `A B^s K` (unit coefficients).
    pub prefactor_identity_error: f64,
    /// Gap between `D` and the alternative u-exponent.
    pub u_exponent_alt_gap: f64,
    pub v_local_slope_end: f64,
}

fn rel(fitted: f64, predicted: f64) -> f64 {
    (fitted - predicted).abs() / predicted.abs()
}

/// Integrates to `config.solver.r_max`, fits the rates and compares them
/// with [`predicted_constants_scaled`].
pub fn verify_asymptotics(spec: &ProblemSpec, init: &InitialData, config: &AsymptoticsConfig) -> Result<AsymptoticsReport> {
    if spec.domain != Domain::EntireSpace {
        return Err(LabError::Ineligible("growth rates need the whole space".into()));
    }
    let regime = classify_entire(spec)?;
    if regime.asymptotics_eligible != Some(true) {
        return Err(LabError::Ineligible(
            "growth rates need p < 1, ps < 1 and the negative-divergence condition".into(),
        ));
    }
    let params = DynParams::from_spec(spec)?;
    let pred = predicted_constants_scaled(&params, spec.g_coeff, spec.f_coeff)?;
    let r_max = config.solver.r_max;
    let window = config.window.unwrap_or((r_max / 100.0, r_max));
    let mid = (window.0 * window.1).sqrt();
    let mut solver = config.solver.clone();
    solver.knots.extend([window.0, mid, window.1]);
    let sol = integrate_radial(spec, init, &solver)?;
    if sol.blowup.is_some() {
        return Err(LabError::Ineligible("the solution blew up before r_max".into()));
    }
    let fit = fit_rate(&sol, window)?;

    // half-window fits of ln c_u bound the systematic drift of the intercept
    let halves = [(window.0, mid), (mid, window.1)]
        .iter()
        .map(|&w| fit_rate(&sol, w).map(|f| f.u.prefactor.ln()))
        .collect::<Vec<_>>();
    let spread = match (&halves[0], &halves[1]) {
        (Ok(a), Ok(b)) => (a - b).abs(),
        _ => 0.0,
    };
    let ln_se = fit.u.ln_prefactor_se.hypot(spread).max(f64::MIN_POSITIVE);
    let ln_c = fit.u.prefactor.ln();
    let d_paper = (ln_c - pred.u_prefactor_paper.ln()).abs();
    let d_cons = (ln_c - pred.u_prefactor_consistent.ln()).abs();
    let (winner, margin) = if d_cons <= d_paper {
        (PrefactorChoice::Consistent, (d_paper - d_cons) / ln_se)
    } else {
        (PrefactorChoice::Paper, (d_cons - d_paper) / ln_se)
    };
    let ps = params.ps();
    let identity = pred.a_const * pred.b_const.powf(params.s) * pred.k_const / (spec.f_coeff * spec.g_coeff.powf(params.s));
    Ok(AsymptoticsReport {
        prediction: pred,
        fitted_v_exponent: fit.v.exponent,
        fitted_u_exponent: fit.u.exponent,
        fitted_v_prefactor: fit.v.prefactor,
        fitted_u_prefactor: fit.u.prefactor,
        relative_errors: RelativeErrors {
            v_exponent: rel(fit.v.exponent, pred.v_exponent),
            u_exponent: rel(fit.u.exponent, pred.u_exponent),
            v_prefactor: rel(fit.v.prefactor, pred.v_prefactor),
            u_prefactor_paper: rel(fit.u.prefactor, pred.u_prefactor_paper),
            u_prefactor_consistent: rel(fit.u.prefactor, pred.u_prefactor_consistent),
        },
        fit_window: window,
        u_prefactor_ln_se: ln_se,
        u_prefactor_winner: winner,
        u_prefactor_margin_se: margin,
        prefactor_identity_error: rel(fit.v.prefactor.powf(ps - 1.0), identity),
        u_exponent_alt_gap: pred.u_exponent - pred.u_exponent_alt,
        v_local_slope_end: fit.v_local_slope_end,
    })
}
