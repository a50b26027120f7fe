//! The autonomous flow behind the whole-space growth rates.
//!
//! With `t = ln r` and
//! `X = r u'/u`, `Y = r v'/v`, `Z = r g(r,v)/u'`, `W = r f(r,u')/v'`,
//! a radial solution of the power family satisfies the cooperative system
//!
//! ```text
//! Y_t = Y (W - (N-2) - Y)
//! Z_t = Z (N + a + pY - Z)
//! W_t = W (sZ + N - sN + s + b - W)
//! ```
//!
//! and `X_t = X (Z - (N-2) - X)` rides along passively.

use std::io::Write;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::model::{divergence_condition_sides, ProblemSpec};
use crate::ode::{self, StepControl};
use crate::radial::RadialSolution;

/// Sup-norm distance at which a trajectory counts as converged.
pub const EQUILIBRIUM_TOL: f64 = 1e-4;
/// Return distance for recurrence detection.
pub const RECURRENCE_TOL: f64 = 1e-3;
/// Shortest `t`-span [`omega_limit`] will classify.
pub const MIN_OMEGA_SPAN: f64 = 30.0;

pub type Point = [f64; 3];
pub type Matrix = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynParams {
    #[serde(rename = "N")]
    pub n: f64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub s: f64,
}

impl DynParams {
    pub fn new(n: f64, a: f64, b: f64, p: f64, s: f64) -> Result<Self> {
        let out = DynParams { n, a, b, p, s };
        let bad = |what: String| Err(LabError::InvalidArgument(what));
        if !(n >= 2.0 && n.is_finite()) {
            return bad(format!("N = {n} must be >= 2"));
        }
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return bad(format!("weights a = {a}, b = {b} must be >= 0"));
        }
        if !(p > 0.0 && p.is_finite()) {
            return bad(format!("p = {p} must be > 0"));
        }
        if !(s >= 1.0 && s.is_finite()) {
            return bad(format!("s = {s} must be >= 1"));
        }
        Ok(out)
    }

    /// Parameters of a power-family problem.
    pub fn from_spec(spec: &ProblemSpec) -> Result<Self> {
        spec.ensure_valid()?;
        let (p, s) = spec
            .power_params()
            .ok_or_else(|| LabError::UnsupportedMode("the autonomous flow needs the power family".into()))?;
        DynParams::new(spec.n(), spec.a, spec.b, p, s)
    }

    pub fn ps(&self) -> f64 {
        self.p * self.s
    }

    /// `(b + s(1+a+2p)) / (1-ps)`, shared by all components of `ξ₂`.
    fn q(&self) -> Result<f64> {
        let ps = self.ps();
        if ps >= 1.0 {
            return Err(LabError::NoInteriorEquilibrium { ps });
        }
        Ok((self.b + self.s * (1.0 + self.a + 2.0 * self.p)) / (1.0 - ps))
    }
}

/// Values of the four ratios at `t = ln r`. `X` is absent on trajectories
/// of the reduced flow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynState {
    pub t: f64,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "Z")]
    pub z: f64,
    #[serde(rename = "W")]
    pub w: f64,
}

impl DynState {
    pub fn point(&self) -> Point {
        [self.y, self.z, self.w]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynTrajectory {
    pub states: Vec<DynState>,
}

impl DynTrajectory {
    pub fn span(&self) -> f64 {
        match (self.states.first(), self.states.last()) {
            (Some(a), Some(b)) => b.t - a.t,
            _ => 0.0,
        }
    }

    pub fn last(&self) -> Option<&DynState> {
        self.states.last()
    }

    /// CSV with header `t,Y,Z,W`.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "t,Y,Z,W")?;
        for s in &self.states {
            writeln!(out, "{:e},{:e},{:e},{:e}", s.t, s.y, s.z, s.w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilibriumLabel {
    #[serde(rename = "xi1")]
    Xi1,
    #[serde(rename = "xi2")]
    Xi2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Equilibrium {
    pub point: Point,
    pub label: EquilibriumLabel,
}

pub fn vector_field(xi: &Point, params: &DynParams) -> Point {
    let [y, z, w] = *xi;
    let DynParams { n, a, b, p, s } = *params;
    [
        y * (w - (n - 2.0) - y),
        z * (n + a + p * y - z),
        w * (s * z + n - s * n + s + b - w),
    ]
}

/// Trace of the Jacobian; affine in `(Y, Z, W)`.
pub fn divergence(xi: &Point, params: &DynParams) -> f64 {
    let [y, z, w] = *xi;
    let DynParams { n, a, b, p, s } = *params;
    -w + (s - 2.0) * z + (p - 2.0) * y + 2.0 + a + n * (1.0 - s) + s + b
}

/// `(0, N+a, N+s(a+1)+b)`: no `v`-growth, the state near the origin.
pub fn xi1(params: &DynParams) -> Point {
    let DynParams { n, a, b, s, .. } = *params;
    [0.0, n + a, n + s * (a + 1.0) + b]
}

/// The interior equilibrium; exists iff `ps < 1`.
pub fn xi2(params: &DynParams) -> Result<Point> {
    let q = params.q()?;
    let y2 = 2.0 + q;
    Ok([y2, params.n + params.a + params.p * y2, params.n + q])
}

pub fn equilibria(params: &DynParams) -> Result<(Equilibrium, Equilibrium)> {
    Ok((
        Equilibrium {
            point: xi1(params),
            label: EquilibriumLabel::Xi1,
        },
        Equilibrium {
            point: xi2(params)?,
            label: EquilibriumLabel::Xi2,
        },
    ))
}

/// Jacobian of the field at any point. At `ξ₂` it reduces to
/// `[[-Y,0,Y],[pZ,-Z,0],[0,sW,-W]]`.
pub fn jacobian(params: &DynParams, xi: &Point) -> Matrix {
    let [y, z, w] = *xi;
    let DynParams { n, a, b, p, s } = *params;
    [
        [w - (n - 2.0) - 2.0 * y, 0.0, y],
        [p * z, n + a + p * y - 2.0 * z, 0.0],
        [0.0, s * w, s * z + n - s * n + s + b - 2.0 * w],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharPoly {
    pub alpha: f64,
    pub beta: f64,
    /// `(1 - ps) γ`
    pub constant: f64,
}

/// Coefficients of `det(λI - M) = λ³ + αλ² + βλ + (1-ps)γ` for `M` with the
/// equilibrium structure, read off its diagonal.
pub fn char_poly(m: &Matrix, ps: f64) -> CharPoly {
    let (y, z, w) = (-m[0][0], -m[1][1], -m[2][2]);
    CharPoly {
        alpha: y + z + w,
        beta: y * z + z * w + y * w,
        constant: (1.0 - ps) * y * z * w,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub equilibrium: Point,
    pub jacobian: Matrix,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub constant: f64,
    /// `αβ - (1-ps)γ`, positive iff the complex pair has negative real part.
    pub routh_margin: f64,
    /// `(re, im)`, sorted by decreasing real part.
    pub eigenvalues: Vec<(f64, f64)>,
    pub stable: bool,
}

pub fn eigenvalues(m: &Matrix) -> Vec<(f64, f64)> {
    let mat = Matrix3::from_fn(|i, j| m[i][j]);
    let mut out: Vec<(f64, f64)> = mat.complex_eigenvalues().iter().map(|c| (c.re, c.im)).collect();
    out.sort_by(|x, y| y.0.total_cmp(&x.0).then(y.1.total_cmp(&x.1)));
    out
}

/// Linear stability of `ξ₂`. The Routh–Hurwitz margin is the primary
/// verdict; the eigenvalues are a cross-check.
pub fn is_asymptotically_stable(params: &DynParams) -> Result<StabilityReport> {
    let eq = xi2(params)?;
    let m = jacobian(params, &eq);
    let cp = char_poly(&m, params.ps());
    let gamma = eq[0] * eq[1] * eq[2];
    let eig = eigenvalues(&m);
    let routh_margin = cp.alpha * cp.beta - cp.constant;
    Ok(StabilityReport {
        equilibrium: eq,
        jacobian: m,
        alpha: cp.alpha,
        beta: cp.beta,
        gamma,
        constant: cp.constant,
        routh_margin,
        stable: eig.iter().all(|e| e.0 < 0.0),
        eigenvalues: eig,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HirschReport {
    /// Off-diagonal Jacobian entries nonnegative on every sample of the box.
    pub cooperative: bool,
    pub cooperativity_samples: usize,
    /// Largest divergence over the box, attained at a corner.
    pub max_divergence: f64,
    pub max_divergence_corner: Point,
    pub divergence_negative: bool,
    pub divergence_condition: bool,
    pub divergence_condition_lhs: f64,
    pub divergence_condition_rhs: f64,
    pub warnings: Vec<String>,
}

/// Checks the hypotheses that rule out cycles and pin the ω-limit on the
/// box `[[ξ₁, ξ₂]]`.
pub fn check_hirsch_conditions(params: &DynParams) -> Result<HirschReport> {
    let lo = xi1(params);
    let hi = xi2(params)?;
    let corner = |mask: usize| -> Point { std::array::from_fn(|i| if mask >> i & 1 == 1 { hi[i] } else { lo[i] }) };

    // The off-diagonals are Y, pZ and sW, nonnegative wherever Y, Z, W are;
    // the sampling guards the closed form.
    const K: usize = 6;
    let mut cooperative = true;
    for i in 0..K {
        for j in 0..K {
            for k in 0..K {
                let f = |idx: usize, d: usize| lo[d] + (hi[d] - lo[d]) * idx as f64 / (K - 1) as f64;
                let m = jacobian(params, &[f(i, 0), f(j, 1), f(k, 2)]);
                for (r, row) in m.iter().enumerate() {
                    for (c, &e) in row.iter().enumerate() {
                        if r != c && e < 0.0 {
                            cooperative = false;
                        }
                    }
                }
            }
        }
    }

    let (mut best, mut best_corner) = (f64::NEG_INFINITY, lo);
    for mask in 0..8 {
        let c = corner(mask);
        let d = divergence(&c, params);
        if d > best {
            best = d;
            best_corner = c;
        }
    }
    let (lhs, rhs) = divergence_condition_sides(params.n, params.a, params.b, params.p, params.s);
    let mut warnings = Vec::new();
    if lhs == rhs {
        warnings.push("divergence condition holds with equality".to_string());
    }
    if best >= 0.0 {
        warnings.push(format!("divergence {best:e} >= 0 at corner {best_corner:?}"));
    }
    Ok(HirschReport {
        cooperative,
        cooperativity_samples: K * K * K,
        max_divergence: best,
        max_divergence_corner: best_corner,
        divergence_negative: best < 0.0,
        divergence_condition: lhs <= rhs,
        divergence_condition_lhs: lhs,
        divergence_condition_rhs: rhs,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub rtol: f64,
    pub atol: f64,
    pub method: String,
    /// Output spacing in `t`; `None` keeps the accepted steps only.
    pub sample_dt: Option<f64>,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            rtol: 1e-11,
            atol: 1e-13,
            method: ode::DEFAULT_PAIR.to_string(),
            sample_dt: None,
        }
    }
}

pub fn flow(params: &DynParams, xi0: &Point, t_span: (f64, f64)) -> Result<DynTrajectory> {
    flow_with(params, xi0, t_span, &FlowConfig::default())
}

pub fn flow_with(params: &DynParams, xi0: &Point, t_span: (f64, f64), cfg: &FlowConfig) -> Result<DynTrajectory> {
    if xi0.iter().any(|&c| !(c >= 0.0 && c.is_finite())) {
        return Err(LabError::InvalidArgument(format!("initial state {xi0:?} must be finite and >= 0")));
    }
    let (t0, t1) = t_span;
    if !(t1 >= t0 && t0.is_finite() && t1.is_finite()) {
        return Err(LabError::InvalidArgument(format!("bad t-span [{t0}, {t1}]")));
    }
    let pair = ode::pair(&cfg.method)?;
    let ctl = StepControl {
        rtol: cfg.rtol,
        atol: cfg.atol,
        h_max: 0.25,
        ..StepControl::default()
    };
    let knots: Vec<f64> = match cfg.sample_dt {
        Some(dt) if dt > 0.0 => {
            let count = ((t1 - t0) / dt).floor() as usize;
            (1..=count).map(|i| t0 + i as f64 * dt).collect()
        }
        _ => Vec::new(),
    };
    let path = ode::solve(
        pair,
        &mut |_, xi: &Point| vector_field(xi, params),
        t0,
        *xi0,
        t1,
        &knots,
        &ctl,
        &mut |_, _| false,
    )?;
    let keep = |t: f64| cfg.sample_dt.is_none() || t == t0 || t == t1 || knots.binary_search_by(|k| k.total_cmp(&t)).is_ok();
    let states = path
        .t
        .iter()
        .zip(&path.y)
        .filter(|(&t, _)| keep(t))
        .map(|(&t, xi)| DynState {
            t,
            x: None,
            // the flow keeps the coordinate planes invariant; clip roundoff
            y: xi[0].max(0.0),
            z: xi[1].max(0.0),
            w: xi[2].max(0.0),
        })
        .collect();
    Ok(DynTrajectory { states })
}

/// Pointwise change of variables along a radial solution.
pub fn to_dynamical(sol: &RadialSolution, spec: &ProblemSpec) -> Result<DynTrajectory> {
    let mut states = Vec::with_capacity(sol.grid.len());
    for st in &sol.grid {
        let t = st.r.ln();
        let (lu, lv, ldu, ldv) = (st.ln_u(), st.ln_v(), st.ln_du(), st.ln_dv());
        for (name, l) in [("u", lu), ("v", lv), ("u'", ldu), ("v'", ldv)] {
            if !l.is_finite() {
                return Err(LabError::VanishingDenominator(name));
            }
        }
        states.push(DynState {
            t,
            x: Some((t + ldu - lu).exp()),
            y: (t + ldv - lv).exp(),
            z: (t + spec.ln_g(t, lv) - ldu).exp(),
            w: (t + spec.ln_f(t, ldu) - ldv).exp(),
        });
    }
    Ok(DynTrajectory { states })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OmegaClass {
    ConvergedXi1,
    ConvergedXi2,
    CycleSuspected,
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaReport {
    pub classification: OmegaClass,
    pub distance_xi1: f64,
    /// `None` when `ξ₂` does not exist.
    pub distance_xi2: Option<f64>,
    pub t_span: f64,
}

fn sup_dist(a: &Point, b: &Point) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}

/// Euclidean distance from `x` to the segment `[a, b]`, so that coarse
/// sampling does not hide a return.
fn segment_dist(x: &Point, a: &Point, b: &Point) -> f64 {
    let d: Point = std::array::from_fn(|i| b[i] - a[i]);
    let len2: f64 = d.iter().map(|c| c * c).sum();
    let t = if len2 > 0.0 {
        ((0..3).map(|i| (x[i] - a[i]) * d[i]).sum::<f64>() / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (0..3).map(|i| (a[i] + t * d[i] - x[i]).powi(2)).sum::<f64>().sqrt()
}

/// Classifies the tail of a trajectory: converged when the last tenth of
/// the span stays within [`EQUILIBRIUM_TOL`] of an equilibrium; a suspected
/// cycle when the second half returns within [`RECURRENCE_TOL`] of an
/// earlier state after a real excursion.
pub fn omega_limit(traj: &DynTrajectory, params: &DynParams) -> Result<OmegaReport> {
    let span = traj.span();
    if span < MIN_OMEGA_SPAN {
        return Err(LabError::InvalidArgument(format!(
            "trajectory spans {span:.3} in t, at least {MIN_OMEGA_SPAN} needed"
        )));
    }
    let e1 = xi1(params);
    let e2 = xi2(params).ok();
    let last = traj.states.last().expect("nonempty").point();
    let t_end = traj.states.last().expect("nonempty").t;
    let tail: Vec<Point> = traj
        .states
        .iter()
        .filter(|s| s.t >= t_end - 0.1 * span)
        .map(|s| s.point())
        .collect();
    let stays_near = |e: &Point| tail.iter().all(|x| sup_dist(x, e) < EQUILIBRIUM_TOL);
    let report = |classification| OmegaReport {
        classification,
        distance_xi1: sup_dist(&last, &e1),
        distance_xi2: e2.map(|e| sup_dist(&last, &e)),
        t_span: span,
    };
    if let Some(e) = &e2 {
        if stays_near(e) {
            return Ok(report(OmegaClass::ConvergedXi2));
        }
    }
    if stays_near(&e1) {
        return Ok(report(OmegaClass::ConvergedXi1));
    }

    // subsample the second half to at most ~2000 states
    let t_mid = t_end - 0.5 * span;
    let half: Vec<Point> = traj.states.iter().filter(|s| s.t >= t_mid).map(|s| s.point()).collect();
    let stride = half.len().div_ceil(2000).max(1);
    let pts: Vec<Point> = half.into_iter().step_by(stride).collect();
    let excursion = 10.0 * RECURRENCE_TOL;
    for i in 0..pts.len() {
        let mut left = false;
        for j in i + 1..pts.len() {
            if sup_dist(&pts[i], &pts[j]) > excursion {
                left = true;
            } else if left && j + 1 < pts.len() && segment_dist(&pts[i], &pts[j], &pts[j + 1]) < RECURRENCE_TOL {
                return Ok(report(OmegaClass::CycleSuspected));
            }
        }
    }
    Ok(report(OmegaClass::Undecided))
}
