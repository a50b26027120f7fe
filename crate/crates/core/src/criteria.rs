//! Integral growth conditions deciding blow-up on a ball, and the regime
//! classifiers built on them.
//!
//! Every condition has the form `∫_1^∞ σ^w φ(σ) dσ < ∞` with `w ∈ {0, 1}`:
//!
//! * `inverse-A`: `φ = 1/g(R, A_{r0}^{-1}(C ∫_0^σ √f(R,t) dt))`
//! * `inverse-D`: `φ = 1/g(R, D^{-1}(C (∫_0^σ √f(ρ,t) dt)²))`
//! * `H-potential`: `φ = (∫_0^σ H)^{-p/(2p+1)}`, `H(t) = ∫_0^t h`
//!
//! with `A_ρ(x) = ∫_0^x g(ρ,t)/√t dt` and `D(x) = ∫_0^x g(R,t)² dt`. When
//! `g ~ t^p` and `h ~ t^σ` all three integrands decay like
//! `σ^{-p(σ+2)/(2p+1)}`, so the verdict reduces to comparing that exponent
//! with `1 + w`.

use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::fit::linear_fit;
use crate::model::{divergence_condition_sides, Coupling, Domain, ProblemSpec};
use crate::quad::{integrate, CumulativeIntegral};
use crate::registry::{Named, Registry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    InverseA,
    InverseAWeighted,
    InverseD,
    InverseDWeighted,
    HPotential,
    HPotentialWeighted,
}

impl Condition {
    pub const ALL: [Condition; 6] = [
        Condition::InverseA,
        Condition::InverseAWeighted,
        Condition::InverseD,
        Condition::InverseDWeighted,
        Condition::HPotential,
        Condition::HPotentialWeighted,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            Condition::InverseA => "inverse-A",
            Condition::InverseAWeighted => "inverse-A-weighted",
            Condition::InverseD => "inverse-D",
            Condition::InverseDWeighted => "inverse-D-weighted",
            Condition::HPotential => "H-potential",
            Condition::HPotentialWeighted => "H-potential-weighted",
        }
    }

    pub fn weighted(&self) -> bool {
        matches!(
            self,
            Condition::InverseAWeighted | Condition::InverseDWeighted | Condition::HPotentialWeighted
        )
    }

    /// Convergent iff the decay exponent of `φ` exceeds this.
    pub fn critical(&self) -> f64 {
        if self.weighted() {
            2.0
        } else {
            1.0
        }
    }

    /// Whether the condition carries the free constant `C`.
    pub fn has_constant(&self) -> bool {
        !matches!(self, Condition::HPotential | Condition::HPotentialWeighted)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Condition {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        Condition::ALL
            .into_iter()
            .find(|c| c.id().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let ids: Vec<&str> = Condition::ALL.iter().map(|c| c.id()).collect();
                LabError::InvalidArgument(format!("unknown condition `{s}` (expected one of {})", ids.join(", ")))
            })
    }
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceVerdict {
    pub verdict: Verdict,
    /// Decay exponent of `φ` (the `σ^w` weight excluded).
    pub tail_exponent_est: f64,
    pub critical: f64,
    pub confidence: f64,
    pub engine: String,
}

/// Decides convergence of one condition integral.
pub trait ConvergenceEngine: Named + Send + Sync {
    fn assess(&self, spec: &ProblemSpec, cond: Condition, c: f64, base_radius: Option<f64>) -> Result<ConvergenceVerdict>;
}

/// Compares the power-law tail exponent `p(σ+2)/(2p+1)` built from the
/// growth orders of `g` and `h` with the critical value. Exact for power
/// laws; for tables it uses the declared tail.
pub struct AnalyticEngine;

impl Named for AnalyticEngine {
    fn name(&self) -> &'static str {
        "analytic"
    }
    fn description(&self) -> &'static str {
        "closed-form tail exponent from the growth orders of g and h"
    }
}

/// Growth order of `t ↦ g(r, t)`.
fn g_order(spec: &ProblemSpec) -> f64 {
    match &spec.coupling {
        Coupling::Power { p, .. } | Coupling::Gradient { p, .. } => *p,
        Coupling::General { g_value, .. } => g_value.growth_order(),
    }
}

/// The common tail exponent `p(σ+2)/(2p+1)` of every condition integrand.
pub fn power_tail_exponent(p: f64, sigma: f64) -> f64 {
    p * (sigma + 2.0) / (2.0 * p + 1.0)
}

impl ConvergenceEngine for AnalyticEngine {
    fn assess(&self, spec: &ProblemSpec, cond: Condition, c: f64, _base: Option<f64>) -> Result<ConvergenceVerdict> {
        check_constant(c)?;
        if matches!(cond, Condition::HPotential | Condition::HPotentialWeighted) && spec.p().is_none() {
            return Err(LabError::UnsupportedMode(format!("{cond} needs g = r^a v^p")));
        }
        let e = power_tail_exponent(g_order(spec), spec.h_desc().growth_order());
        let crit = cond.critical();
        Ok(ConvergenceVerdict {
            verdict: if e > crit { Verdict::Convergent } else { Verdict::Divergent },
            tail_exponent_est: e,
            critical: crit,
            confidence: 1.0,
            engine: self.name().to_string(),
        })
    }
}

/// Evaluates the integral over the dyadic panels `[2^{k-1}, 2^k]`,
/// `k = 1..=panels`, and fits the decay exponent of the last `fit_panels`
/// increments. Verdicts within `max(band, 3·stderr)` of critical are
/// inconclusive.
pub struct TailFitEngine {
    pub panels: i32,
    pub fit_panels: usize,
    pub band: f64,
    pub rel_tol: f64,
}

impl Default for TailFitEngine {
    fn default() -> Self {
        TailFitEngine {
            panels: 40,
            fit_panels: 10,
            band: 0.005,
            rel_tol: 1e-11,
        }
    }
}

impl Named for TailFitEngine {
    fn name(&self) -> &'static str {
        "tail-fit"
    }
    fn description(&self) -> &'static str {
        "partial integrals at checkpoints 2^k, k <= 40, with a fitted decay exponent"
    }
}

fn check_constant(c: f64) -> Result<()> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!("constant C = {c} must be > 0")))
    }
}

/// `x` with `∫_0^x = y` for a tabulated primitive.
fn invert_primitive<F: Fn(f64) -> f64>(prim: &CumulativeIntegral<F>, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let (lo, hi) = prim
        .bracket(y)
        .ok_or_else(|| LabError::Quadrature(format!("target {y:e} beyond the tabulated primitive")))?;
    invert_monotone(|x| prim.eval(x).unwrap_or(f64::NAN), y, (lo, hi), 1e-13 * y.min(1.0))
}

impl TailFitEngine {
    fn increments(&self, phi: &dyn Fn(f64) -> f64, w: f64) -> Result<Vec<(f64, f64)>> {
        let mut out = Vec::with_capacity(self.panels as usize);
        for k in 1..=self.panels {
            let hi = 2f64.powi(k);
            let piece = integrate(|x| x.powf(w) * phi(x), 0.5 * hi, hi, self.rel_tol, 0.0)?;
            if !(piece > 0.0 && piece.is_finite()) {
                return Err(LabError::Quadrature(format!("panel increment {piece:e} at 2^{k}")));
            }
            out.push((hi.ln(), piece.ln()));
        }
        Ok(out)
    }
}

impl ConvergenceEngine for TailFitEngine {
    fn assess(&self, spec: &ProblemSpec, cond: Condition, c: f64, base_radius: Option<f64>) -> Result<ConvergenceVerdict> {
        check_constant(c)?;
        let big_r = spec.domain.radius().unwrap_or(1.0);
        let base = base_radius.unwrap_or(0.5 * big_r);
        if !(base > 0.0 && base <= big_r) {
            return Err(LabError::InvalidArgument(format!("base radius {base} must lie in (0, {big_r}]")));
        }
        let w = if cond.weighted() { 1.0 } else { 0.0 };
        let top = 2f64.powi(self.panels);
        let tol = self.rel_tol;

        let increments = match cond {
            Condition::HPotential | Condition::HPotentialWeighted => {
                let p = spec
                    .p()
                    .ok_or_else(|| LabError::UnsupportedMode(format!("{cond} needs g = r^a v^p")))?;
                let h = spec.h_desc();
                let pot = CumulativeIntegral::new(|t| h.integral(t), 0, self.panels, tol)?;
                let expo = p / (2.0 * p + 1.0);
                self.increments(&|x| pot.eval(x).map(|v| v.powf(-expo)).unwrap_or(f64::NAN), w)?
            }
            Condition::InverseA | Condition::InverseAWeighted => {
                let root_f = CumulativeIntegral::new(|t| spec.f(big_r, t).sqrt(), 0, self.panels, tol)?;
                let mut a_prim = CumulativeIntegral::new(|x| 2.0 * spec.g(base, x * x), 0, 0, tol)?;
                a_prim.extend_until(c * root_f.eval(top)?, 1020)?;
                self.increments(
                    &|x| {
                        let arg = root_f.eval(x).and_then(|s| invert_primitive(&a_prim, c * s));
                        match arg {
                            Ok(z) => 1.0 / spec.g(big_r, z * z),
                            Err(_) => f64::NAN,
                        }
                    },
                    w,
                )?
            }
            Condition::InverseD | Condition::InverseDWeighted => {
                let root_f = CumulativeIntegral::new(|t| spec.f(base, t).sqrt(), 0, self.panels, tol)?;
                let mut d_prim = CumulativeIntegral::new(|t| spec.g(big_r, t).powi(2), 0, 0, tol)?;
                d_prim.extend_until(c * root_f.eval(top)?.powi(2), 1020)?;
                self.increments(
                    &|x| {
                        let arg = root_f.eval(x).and_then(|s| invert_primitive(&d_prim, c * s * s));
                        match arg {
                            Ok(z) => 1.0 / spec.g(big_r, z),
                            Err(_) => f64::NAN,
                        }
                    },
                    w,
                )?
            }
        };

        let tail = &increments[increments.len().saturating_sub(self.fit_panels)..];
        let xs: Vec<f64> = tail.iter().map(|t| t.0).collect();
        let ys: Vec<f64> = tail.iter().map(|t| t.1).collect();
        let line = linear_fit(&xs, &ys)?;
        // ΔI_k ~ σ_k^{1 + w - e}
        let e = 1.0 + w - line.slope;
        let crit = cond.critical();
        let gap = e - crit;
        let band = self.band.max(3.0 * line.slope_se);
        let verdict = if gap.abs() <= band {
            Verdict::Inconclusive
        } else if gap > 0.0 {
            Verdict::Convergent
        } else {
            Verdict::Divergent
        };
        Ok(ConvergenceVerdict {
            verdict,
            tail_exponent_est: e,
            critical: crit,
            confidence: gap.abs() / (gap.abs() + band),
            engine: self.name().to_string(),
        })
    }
}

pub type EngineRegistry = Registry<dyn ConvergenceEngine>;

pub fn builtin_engines() -> EngineRegistry {
    EngineRegistry::empty()
        .register(Box::new(AnalyticEngine))
        .register(Box::new(TailFitEngine::default()))
}

static ENGINES: LazyLock<EngineRegistry> = LazyLock::new(builtin_engines);

pub fn engine(name: &str) -> Result<&'static dyn ConvergenceEngine> {
    ENGINES.get(name)
}

pub fn engine_names() -> Vec<&'static str> {
    ENGINES.names()
}

/// Engine used when none is requested: exact for the power family,
/// numerical otherwise.
pub fn default_engine(spec: &ProblemSpec) -> &'static str {
    match spec.coupling {
        Coupling::Power { .. } => "analytic",
        _ => "tail-fit",
    }
}

/// Values of `C` scanned when the condition carries one.
pub const C_SCAN: [f64; 3] = [1e-2, 1.0, 1e2];

pub fn ko_condition(spec: &ProblemSpec, which: Condition, c: f64, base_radius: Option<f64>) -> Result<ConvergenceVerdict> {
    ko_condition_with(default_engine(spec), spec, which, c, base_radius)
}

pub fn ko_condition_with(
    engine_name: &str,
    spec: &ProblemSpec,
    which: Condition,
    c: f64,
    base_radius: Option<f64>,
) -> Result<ConvergenceVerdict> {
    spec.ensure_valid()?;
    engine(engine_name)?.assess(spec, which, c, base_radius)
}

/// Runs the condition for every `C` in [`C_SCAN`] (once if it has no `C`);
/// any disagreement makes the result inconclusive.
pub fn ko_condition_scan(engine_name: &str, spec: &ProblemSpec, which: Condition, base_radius: Option<f64>) -> Result<ConvergenceVerdict> {
    if !which.has_constant() {
        return ko_condition_with(engine_name, spec, which, 1.0, base_radius);
    }
    let runs = C_SCAN
        .iter()
        .map(|&c| ko_condition_with(engine_name, spec, which, c, base_radius))
        .collect::<Result<Vec<_>>>()?;
    let mut out = runs[1].clone();
    if runs.iter().any(|r| r.verdict != out.verdict) {
        out.verdict = Verdict::Inconclusive;
    }
    out.confidence = runs.iter().map(|r| r.confidence).fold(1.0, f64::min);
    Ok(out)
}

/// `H(t) = ∫_0^t h`.
pub fn eval_h(h: &crate::model::NonlinearityDesc, t: f64) -> f64 {
    h.integral(t)
}

/// `∫_0^σ H(t) dt` by adaptive quadrature.
pub fn eval_h_potential(h: &crate::model::NonlinearityDesc, sigma: f64) -> Result<f64> {
    integrate(|t| h.integral(t), 0.0, sigma, 1e-13, 0.0)
}

/// `A_ρ(s) = ∫_0^s g(ρ,t)/√t dt`, computed as `2∫_0^{√s} g(ρ, x²) dx`.
pub fn eval_a(spec: &ProblemSpec, rho: f64, s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    integrate(|x| 2.0 * spec.g(rho, x * x), 0.0, s.sqrt(), 1e-13, 0.0)
}

/// `D(s) = ∫_0^s g(R,t)² dt`.
pub fn eval_dfun(spec: &ProblemSpec, big_r: f64, s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    integrate(|t| spec.g(big_r, t).powi(2), 0.0, s, 1e-13, 0.0)
}

/// Solves `f(x) = y` for nondecreasing `f`, expanding `bracket`
/// geometrically if needed, by bisection followed by Illinois-type
/// false position. Stops once `|f(x) - y| <= tol · max(1, |y|)`.
pub fn invert_monotone<F: FnMut(f64) -> f64>(mut f: F, y: f64, bracket: (f64, f64), tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(LabError::InvalidArgument(format!("bad bracket [{lo}, {hi}]")));
    }
    let eval = |f: &mut F, x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_nan() {
            Err(LabError::Quadrature(format!("function undefined at {x:e}")))
        } else {
            Ok(v)
        }
    };
    let non_monotone = |a: f64, b: f64| LabError::NonMonotone(format!("f({a:e}) > f({b:e})"));
    let mut flo = eval(&mut f, lo)?;
    let mut fhi = eval(&mut f, hi)?;
    if flo > fhi {
        return Err(non_monotone(lo, hi));
    }
    let accept = tol * y.abs().max(1.0);
    let mut expansions = 0;
    while fhi < y {
        let width = hi - lo;
        let next = if hi > 0.0 { 2.0 * hi } else { hi + width };
        let fnext = eval(&mut f, next)?;
        if fnext < fhi {
            return Err(non_monotone(hi, next));
        }
        (lo, flo, hi, fhi) = (hi, fhi, next, fnext);
        expansions += 1;
        if expansions > 2100 || !hi.is_finite() {
            return Err(LabError::InvalidArgument(format!("target {y:e} above the range of the map")));
        }
    }
    while flo > y {
        let width = hi - lo;
        let next = if lo > 0.0 { 0.5 * lo } else { lo - width };
        let fnext = eval(&mut f, next)?;
        if fnext > flo {
            return Err(non_monotone(next, lo));
        }
        (hi, fhi, lo, flo) = (lo, flo, next, fnext);
        expansions += 1;
        if expansions > 2100 || !lo.is_finite() {
            return Err(LabError::InvalidArgument(format!("target {y:e} below the range of the map")));
        }
    }
    if (flo - y).abs() <= accept {
        return Ok(lo);
    }
    if (fhi - y).abs() <= accept {
        return Ok(hi);
    }

    let check = |x: f64, fx: f64, flo: f64, fhi: f64, lo: f64, hi: f64| -> Result<()> {
        if fx < flo {
            return Err(non_monotone(lo, x));
        }
        if fx > fhi {
            return Err(non_monotone(x, hi));
        }
        Ok(())
    };
    for _ in 0..8 {
        let mid = 0.5 * (lo + hi);
        let fm = eval(&mut f, mid)?;
        check(mid, fm, flo, fhi, lo, hi)?;
        if (fm - y).abs() <= accept {
            return Ok(mid);
        }
        if fm < y {
            (lo, flo) = (mid, fm);
        } else {
            (hi, fhi) = (mid, fm);
        }
    }
    // false position on g = f - y, halving the stale end (Illinois)
    let (mut glo, mut ghi) = (flo - y, fhi - y);
    let mut side = 0i8;
    for _ in 0..200 {
        let mut x = (lo * ghi - hi * glo) / (ghi - glo);
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        let fx = eval(&mut f, x)?;
        check(x, fx, glo + y, ghi + y, lo, hi)?;
        let gx = fx - y;
        if gx.abs() <= accept || hi - lo <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
            glo = gx;
            if side == -1 {
                ghi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            ghi = gx;
            if side == 1 {
                glo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeTag {
    BothBounded,
    UBoundedVBlows,
    BothBlowUp,
    NoPositiveSolution,
    GlobalExistence,
    Inconclusive,
}

impl RegimeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::BothBounded => "BothBounded",
            RegimeTag::UBoundedVBlows => "UBoundedVBlows",
            RegimeTag::BothBlowUp => "BothBlowUp",
            RegimeTag::NoPositiveSolution => "NoPositiveSolution",
            RegimeTag::GlobalExistence => "GlobalExistence",
            RegimeTag::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub condition: Condition,
    pub verdict: Verdict,
    pub tail_exponent: f64,
    pub critical: f64,
    /// `tail_exponent - critical`
    pub margin: f64,
    pub confidence: f64,
    pub engine: String,
    /// What this verdict establishes about the solutions.
    pub reading: String,
}

impl Certificate {
    fn new(condition: Condition, v: &ConvergenceVerdict, reading: impl Into<String>) -> Self {
        Certificate {
            condition,
            verdict: v.verdict,
            tail_exponent: v.tail_exponent_est,
            critical: v.critical,
            margin: v.tail_exponent_est - v.critical,
            confidence: v.confidence,
            engine: v.engine.clone(),
            reading: reading.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Regime {
    #[serde(rename = "regime")]
    pub tag: RegimeTag,
    pub certificates: Vec<Certificate>,
    /// Whole space only: whether the growth-rate asymptotics apply.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotics_eligible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence_condition: Option<bool>,
}

/// Closed-form partition of the power family on a ball: bounded iff
/// `ps <= 1`; `u` bounded with `v` blowing up iff `s > 2(1 + 1/p)`; both
/// blow up iff `1/p < s <= 2(1 + 1/p)`.
pub fn power_regime(p: f64, s: f64) -> RegimeTag {
    if p * s <= 1.0 {
        RegimeTag::BothBounded
    } else if s > 2.0 * (1.0 + 1.0 / p) {
        RegimeTag::UBoundedVBlows
    } else {
        RegimeTag::BothBlowUp
    }
}

pub fn classify_ball(spec: &ProblemSpec) -> Result<Regime> {
    classify_ball_with(spec, default_engine(spec))
}

/// Ball-domain regime. The power family is decided in closed form (the
/// certificates are still reported); `h`-coupled problems use the
/// `H-potential` pair, general problems the `inverse-A`/`inverse-D`
/// certificates, and only conclusions that follow from them are drawn.
pub fn classify_ball_with(spec: &ProblemSpec, engine_name: &str) -> Result<Regime> {
    spec.ensure_valid()?;
    if !matches!(spec.domain, Domain::Ball(_)) {
        return Err(LabError::UnsupportedMode("classify_ball needs a ball domain".into()));
    }
    match &spec.coupling {
        Coupling::Power { p, s } => {
            let plain = ko_condition_with(engine_name, spec, Condition::HPotential, 1.0, None)?;
            let weighted = ko_condition_with(engine_name, spec, Condition::HPotentialWeighted, 1.0, None)?;
            Ok(Regime {
                tag: power_regime(*p, *s),
                certificates: vec![
                    Certificate::new(Condition::HPotential, &plain, "divergent iff ps <= 1 (both bounded)"),
                    Certificate::new(
                        Condition::HPotentialWeighted,
                        &weighted,
                        "convergent iff s > 2(1 + 1/p) (u bounded, v blows up)",
                    ),
                ],
                asymptotics_eligible: None,
                divergence_condition: None,
            })
        }
        Coupling::Gradient { .. } => {
            let plain = ko_condition_with(engine_name, spec, Condition::HPotential, 1.0, None)?;
            let weighted = ko_condition_with(engine_name, spec, Condition::HPotentialWeighted, 1.0, None)?;
            use Verdict::*;
            let tag = match (plain.verdict, weighted.verdict) {
                (Divergent, Divergent) => RegimeTag::BothBounded,
                (Convergent, Convergent) => RegimeTag::UBoundedVBlows,
                (Convergent, Divergent) => RegimeTag::BothBlowUp,
                _ => RegimeTag::Inconclusive,
            };
            Ok(Regime {
                tag,
                certificates: vec![
                    Certificate::new(Condition::HPotential, &plain, "divergent iff both components bounded"),
                    Certificate::new(
                        Condition::HPotentialWeighted,
                        &weighted,
                        "convergent iff u bounded and v blows up",
                    ),
                ],
                asymptotics_eligible: None,
                divergence_condition: None,
            })
        }
        Coupling::General { .. } => {
            use Verdict::*;
            let a_plain = ko_condition_scan(engine_name, spec, Condition::InverseA, None)?;
            let d_plain = ko_condition_scan(engine_name, spec, Condition::InverseD, None)?;
            let d_weighted = ko_condition_scan(engine_name, spec, Condition::InverseDWeighted, None)?;
            let a_weighted = ko_condition_scan(engine_name, spec, Condition::InverseAWeighted, None)?;
            let tag = if a_plain.verdict == Divergent {
                RegimeTag::BothBounded
            } else if d_plain.verdict == Convergent {
                if d_weighted.verdict == Convergent {
                    RegimeTag::UBoundedVBlows
                } else if a_weighted.verdict == Divergent {
                    RegimeTag::BothBlowUp
                } else {
                    RegimeTag::Inconclusive
                }
            } else {
                RegimeTag::Inconclusive
            };
            Ok(Regime {
                tag,
                certificates: vec![
                    Certificate::new(Condition::InverseA, &a_plain, "divergent rules out blow-up of v"),
                    Certificate::new(Condition::InverseD, &d_plain, "convergent yields a solution with v blowing up"),
                    Certificate::new(Condition::InverseDWeighted, &d_weighted, "convergent rules out blow-up of u"),
                    Certificate::new(Condition::InverseAWeighted, &a_weighted, "divergent rules out bounded u"),
                ],
                asymptotics_eligible: None,
                divergence_condition: None,
            })
        }
    }
}

/// Whole-space existence: a positive radial solution exists iff
/// `ps <= 1`; the growth-rate limits further need `p < 1`, `ps < 1` and
/// the negative-divergence condition.
pub fn classify_entire(spec: &ProblemSpec) -> Result<Regime> {
    spec.ensure_valid()?;
    if spec.domain != Domain::EntireSpace {
        return Err(LabError::UnsupportedMode("classify_entire needs the whole space".into()));
    }
    let (p, s) = spec
        .power_params()
        .ok_or_else(|| LabError::UnsupportedMode("whole-space classification needs the power family".into()))?;
    if p * s > 1.0 {
        return Ok(Regime {
            tag: RegimeTag::NoPositiveSolution,
            certificates: Vec::new(),
            asymptotics_eligible: Some(false),
            divergence_condition: None,
        });
    }
    let divergence = if p * s < 1.0 {
        let (lhs, rhs) = divergence_condition_sides(spec.n(), spec.a, spec.b, p, s);
        Some(lhs <= rhs)
    } else {
        None
    };
    Ok(Regime {
        tag: RegimeTag::GlobalExistence,
        certificates: Vec::new(),
        asymptotics_eligible: Some(p < 1.0 && p * s < 1.0 && divergence == Some(true)),
        divergence_condition: divergence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::NonlinearityDesc;
    use approx::assert_relative_eq;

    fn ball(p: f64, s: f64) -> ProblemSpec {
        ProblemSpec::power(3, 0.0, 0.0, p, s, Domain::Ball(1.0))
    }

    #[test]
    fn h_values() {
        assert_relative_eq!(eval_h(&NonlinearityDesc::power(1.0, 1.0), 2.0), 2.0);
        assert_relative_eq!(eval_h(&NonlinearityDesc::power(1.0, 2.0), 3.0), 9.0, max_relative = 1e-15);
    }

    #[test]
    fn a_and_d_values() {
        let g1 = ball(1.0, 1.0);
        let g2 = ball(2.0, 1.0);
        assert_relative_eq!(eval_a(&g1, 1.0, 1.0).unwrap(), 2.0 / 3.0, max_relative = 1e-13);
        assert_relative_eq!(eval_a(&g2, 1.0, 1.0).unwrap(), 2.0 / 5.0, max_relative = 1e-13);
        assert_eq!(eval_a(&g1, 1.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(eval_dfun(&g1, 1.0, 1.0).unwrap(), 1.0 / 3.0, max_relative = 1e-13);
        let gp = ball(1.7, 1.0);
        let sv: f64 = 2.3;
        assert_relative_eq!(
            eval_dfun(&gp, 1.0, sv).unwrap(),
            sv.powf(4.4) / 4.4,
            max_relative = 1e-12
        );
        assert_eq!(eval_dfun(&g1, 1.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn inversion_examples() {
        let x = invert_monotone(|x| x * x * x, 8.0, (0.0, 1.0), 1e-14).unwrap();
        assert_relative_eq!(x, 2.0, max_relative = 1e-12);
        let g1 = ball(1.0, 1.0);
        let x = invert_monotone(|s| eval_a(&g1, 1.0, s).unwrap(), 2.0 / 3.0, (0.0, 0.5), 1e-14).unwrap();
        assert_relative_eq!(x, 1.0, max_relative = 1e-12);
        let err = invert_monotone(|x| (x - 1.0).powi(2), 0.1, (0.0, 4.0), 1e-12).unwrap_err();
        assert_eq!(err.code(), "non_monotone");
    }

    #[test]
    fn analytic_verdicts() {
        let v = ko_condition(&ball(1.0, 1.0), Condition::HPotential, 1.0, None).unwrap();
        assert_eq!(v.verdict, Verdict::Divergent);
        assert_relative_eq!(v.tail_exponent_est, 1.0);
        let v = ko_condition(&ball(1.0, 5.0), Condition::HPotentialWeighted, 1.0, None).unwrap();
        assert_eq!(v.verdict, Verdict::Convergent);
        assert_relative_eq!(v.tail_exponent_est, 7.0 / 3.0, max_relative = 1e-15);
        let spec = ball(1.0, 2.0);
        assert_eq!(ko_condition(&spec, Condition::HPotential, 1.0, None).unwrap().verdict, Verdict::Convergent);
        assert_eq!(
            ko_condition(&spec, Condition::HPotentialWeighted, 1.0, None).unwrap().verdict,
            Verdict::Divergent
        );
    }

    #[test]
    fn tail_fit_recovers_power_exponents() {
        let spec = ball(1.0, 2.0);
        for cond in Condition::ALL {
            let v = ko_condition_with("tail-fit", &spec, cond, 1.0, None).unwrap();
            assert_relative_eq!(v.tail_exponent_est, 4.0 / 3.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(classify_ball(&ball(1.0, 1.0)).unwrap().tag, RegimeTag::BothBounded);
        assert_eq!(classify_ball(&ball(1.0, 5.0)).unwrap().tag, RegimeTag::UBoundedVBlows);
        assert_eq!(classify_ball(&ball(2.0, 1.5)).unwrap().tag, RegimeTag::BothBlowUp);
    }

    #[test]
    fn entire_space_examples() {
        let e = |p, s| ProblemSpec::power(3, 0.0, 0.0, p, s, Domain::EntireSpace);
        let r = classify_entire(&e(0.5, 1.0)).unwrap();
        assert_eq!(r.tag, RegimeTag::GlobalExistence);
        assert_eq!(r.divergence_condition, Some(true));
        assert_eq!(r.asymptotics_eligible, Some(true));
        assert_eq!(classify_entire(&e(1.0, 2.0)).unwrap().tag, RegimeTag::NoPositiveSolution);
        let r = classify_entire(&e(1.0, 1.0)).unwrap();
        assert_eq!(r.tag, RegimeTag::GlobalExistence);
        assert_eq!(r.asymptotics_eligible, Some(false));
    }

    #[test]
    fn condition_ids_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.id().parse::<Condition>().unwrap(), c);
        }
        assert!("2.7".parse::<Condition>().is_err());
    }
}
