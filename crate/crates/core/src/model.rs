//! Problem descriptors shared by every analysis.
//!
//! The system is `Δu = g(|x|, v)`, `Δv = f(|x|, |∇u|)` on a ball or on the
//! whole space, with `g(r, t) = κ_g · ρ_g(r) · γ(t)` and
//! `f(r, t) = κ_f · r^b · h(t)`. In the power-law family `ρ_g(r) = r^a`,
//! `γ(t) = t^p` and `h(t) = t^s`.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Smallest admissible value of `u(0)` and `v(0)`.
pub const MIN_INITIAL_VALUE: f64 = 1e-12;

/// A nonnegative nondecreasing scalar profile on `[0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum NonlinearityDesc {
    /// `coefficient · x^exponent`
    PowerLaw { coefficient: f64, exponent: f64 },
    Tabulated(Table),
}

/// Monotone piecewise-cubic (Fritsch–Carlson) interpolant through samples,
/// continued past the last sample by a power law.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    args: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    declared_tail: Option<f64>,
    tail: f64,
    /// `cumulative[i] = ∫_{args[0]}^{args[i]}` of the interpolant.
    cumulative: Vec<f64>,
}

impl Table {
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.args.iter().copied().zip(self.values.iter().copied())
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail
    }

    pub fn declared_tail(&self) -> Option<f64> {
        self.declared_tail
    }

    fn build(args: Vec<f64>, values: Vec<f64>, declared_tail: Option<f64>) -> Table {
        let slopes = pchip_slopes(&args, &values);
        let n = args.len();
        let tail = declared_tail.unwrap_or_else(|| {
            if n >= 2 {
                let (x0, x1) = (args[n - 2], args[n - 1]);
                let (y0, y1) = (values[n - 2], values[n - 1]);
                if x0 > 0.0 && y0 > 0.0 && y1 > 0.0 && x1 > x0 {
                    ((y1 / y0).ln() / (x1 / x0).ln()).max(0.0)
                } else {
                    0.0
                }
            } else {
                0.0
            }
        });
        let mut cumulative = vec![0.0; n];
        for i in 1..n {
            let h = args[i] - args[i - 1];
            let piece = h * (values[i - 1] + values[i]) / 2.0
                + h * h * (slopes[i - 1] - slopes[i]) / 12.0;
            cumulative[i] = cumulative[i - 1] + piece;
        }
        Table {
            args,
            values,
            slopes,
            declared_tail,
            tail,
            cumulative,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let n = self.args.len();
        if n == 0 {
            return 0.0;
        }
        if x <= self.args[0] {
            return self.values[0];
        }
        let last = n - 1;
        if x >= self.args[last] {
            let y = self.values[last];
            if y == 0.0 || self.tail == 0.0 {
                return y;
            }
            return y * (x / self.args[last]).powf(self.tail);
        }
        let i = self.args.partition_point(|&a| a <= x) - 1;
        let h = self.args[i + 1] - self.args[i];
        let t = (x - self.args[i]) / h;
        hermite(
            t,
            h,
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
        )
    }

    fn integral(&self, x: f64) -> f64 {
        let n = self.args.len();
        if n == 0 || x <= 0.0 {
            return 0.0;
        }
        let x0 = self.args[0];
        // constant extension on [0, x0]
        if x <= x0 {
            return self.values[0] * x;
        }
        let head = self.values[0] * x0;
        let last = n - 1;
        if x >= self.args[last] {
            let xl = self.args[last];
            let yl = self.values[last];
            let tail = if yl == 0.0 {
                0.0
            } else if (self.tail + 1.0).abs() < 1e-14 {
                yl * xl * (x / xl).ln()
            } else {
                yl * xl / (self.tail + 1.0) * ((x / xl).powf(self.tail + 1.0) - 1.0)
            };
            return head + self.cumulative[last] + tail;
        }
        let i = self.args.partition_point(|&a| a <= x) - 1;
        let h = self.args[i + 1] - self.args[i];
        let t = (x - self.args[i]) / h;
        let (y0, y1, d0, d1) = (
            self.values[i],
            self.values[i + 1],
            self.slopes[i],
            self.slopes[i + 1],
        );
        // ∫_0^t of the Hermite basis, scaled by h
        let t2 = t * t;
        let t3 = t2 * t;
        let t4 = t3 * t;
        let h00 = t4 / 2.0 - t3 + t;
        let h10 = t4 / 4.0 - 2.0 * t3 / 3.0 + t2 / 2.0;
        let h01 = -t4 / 2.0 + t3;
        let h11 = t4 / 4.0 - t3 / 3.0;
        head + self.cumulative[i] + h * (h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1)
    }
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0], delta[0]];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

impl NonlinearityDesc {
    pub fn power(coefficient: f64, exponent: f64) -> Self {
        NonlinearityDesc::PowerLaw {
            coefficient,
            exponent,
        }
    }

    /// Builds a tabulated profile. Hypothesis violations are not rejected
    /// here; they surface through [`NonlinearityDesc::issues`] and
    /// [`validate_problem`].
    pub fn tabulated(samples: &[(f64, f64)], tail_exponent: Option<f64>) -> Self {
        let args = samples.iter().map(|s| s.0).collect();
        let values = samples.iter().map(|s| s.1).collect();
        NonlinearityDesc::Tabulated(Table::build(args, values, tail_exponent))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            NonlinearityDesc::PowerLaw {
                coefficient,
                exponent,
            } => {
                if *exponent == 0.0 {
                    *coefficient
                } else {
                    coefficient * x.max(0.0).powf(*exponent)
                }
            }
            NonlinearityDesc::Tabulated(t) => t.eval(x),
        }
    }

    /// `ln φ(e^{ln_x})`, evaluated without forming `e^{ln_x}` where the
    /// profile is a power law (including the tail of a table).
    pub fn ln_eval(&self, ln_x: f64) -> f64 {
        match self {
            NonlinearityDesc::PowerLaw {
                coefficient,
                exponent,
            } => {
                if *exponent == 0.0 {
                    coefficient.ln()
                } else {
                    coefficient.ln() + exponent * ln_x
                }
            }
            NonlinearityDesc::Tabulated(t) => {
                let n = t.args.len();
                if n > 0 && t.args[n - 1] > 0.0 && ln_x >= t.args[n - 1].ln() {
                    t.values[n - 1].ln() + t.tail * (ln_x - t.args[n - 1].ln())
                } else {
                    t.eval(ln_x.exp()).ln()
                }
            }
        }
    }

    /// `∫_0^x φ(k) dk`.
    pub fn integral(&self, x: f64) -> f64 {
        match self {
            NonlinearityDesc::PowerLaw {
                coefficient,
                exponent,
            } => coefficient * x.max(0.0).powf(exponent + 1.0) / (exponent + 1.0),
            NonlinearityDesc::Tabulated(t) => t.integral(x),
        }
    }

    /// Asymptotic growth order at infinity.
    pub fn growth_order(&self) -> f64 {
        match self {
            NonlinearityDesc::PowerLaw { exponent, .. } => *exponent,
            NonlinearityDesc::Tabulated(t) => t.tail,
        }
    }

    pub fn is_power_law(&self) -> bool {
        matches!(self, NonlinearityDesc::PowerLaw { .. })
    }

    /// The profile `x ↦ value_scale · φ(arg_scale · x)`.
    pub fn rescaled(&self, arg_scale: f64, value_scale: f64) -> Self {
        match self {
            NonlinearityDesc::PowerLaw {
                coefficient,
                exponent,
            } => NonlinearityDesc::PowerLaw {
                coefficient: value_scale * coefficient * arg_scale.powf(*exponent),
                exponent: *exponent,
            },
            NonlinearityDesc::Tabulated(t) => {
                let args = t.args.iter().map(|a| a / arg_scale).collect();
                let values = t.values.iter().map(|v| v * value_scale).collect();
                let mut out = Table::build(args, values, Some(t.tail));
                out.declared_tail = t.declared_tail;
                NonlinearityDesc::Tabulated(out)
            }
        }
    }

    /// Violated standing hypotheses (nonnegative, nondecreasing).
    pub fn issues(&self, label: &str) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            NonlinearityDesc::PowerLaw {
                coefficient,
                exponent,
            } => {
                if !(coefficient.is_finite() && *coefficient > 0.0) {
                    out.push(format!("{label}: power-law coefficient must be > 0"));
                }
                if !(exponent.is_finite() && *exponent >= 0.0) {
                    out.push(format!("{label}: power-law exponent must be >= 0"));
                }
            }
            NonlinearityDesc::Tabulated(t) => {
                if t.args.len() < 2 {
                    out.push(format!("{label}: table needs at least 2 samples"));
                }
                if t.args.iter().chain(t.values.iter()).any(|v| !v.is_finite()) {
                    out.push(format!("{label}: table contains non-finite samples"));
                }
                if t.args.first().is_some_and(|&a| a < 0.0) {
                    out.push(format!("{label}: table arguments must be >= 0"));
                }
                if t.args.windows(2).any(|w| w[1] <= w[0]) {
                    out.push(format!("{label}: table arguments must be strictly increasing"));
                }
                if t.values.windows(2).any(|w| w[1] < w[0]) {
                    out.push(format!("{label}: monotonicity violated (values must be nondecreasing)"));
                }
                if t.values.iter().any(|&v| v < 0.0) {
                    out.push(format!("{label}: values must be nonnegative"));
                }
                if let Some(tail) = t.declared_tail {
                    if !(tail.is_finite() && tail >= 0.0) {
                        out.push(format!("{label}: tail exponent must be >= 0"));
                    }
                }
            }
        }
        out
    }
}

/// Radius of the ball, or the whole space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "ball")]
    Ball(f64),
    #[serde(rename = "entire")]
    EntireSpace,
}

impl Domain {
    pub fn radius(&self) -> Option<f64> {
        match self {
            Domain::Ball(r) => Some(*r),
            Domain::EntireSpace => None,
        }
    }
}

/// How `g` and `f` depend on their value argument.
#[derive(Debug, Clone, PartialEq)]
pub enum Coupling {
    /// `g = κ_g r^a t^p`, `f = κ_f r^b t^s`.
    Power { p: f64, s: f64 },
    /// `g = κ_g r^a t^p`, `f = κ_f r^b h(t)`.
    Gradient { p: f64, h: NonlinearityDesc },
    /// `g = κ_g ρ_g(r) γ(t)`, `f = κ_f r^b h(t)`; the weight `a` is unused.
    General {
        g_radial: NonlinearityDesc,
        g_value: NonlinearityDesc,
        h: NonlinearityDesc,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub dim: u32,
    pub a: f64,
    pub b: f64,
    pub g_coeff: f64,
    pub f_coeff: f64,
    pub coupling: Coupling,
    pub domain: Domain,
}

impl ProblemSpec {
    pub fn power(dim: u32, a: f64, b: f64, p: f64, s: f64, domain: Domain) -> Self {
        ProblemSpec {
            dim,
            a,
            b,
            g_coeff: 1.0,
            f_coeff: 1.0,
            coupling: Coupling::Power { p, s },
            domain,
        }
    }

    pub fn gradient(dim: u32, a: f64, b: f64, p: f64, h: NonlinearityDesc, domain: Domain) -> Self {
        ProblemSpec {
            dim,
            a,
            b,
            g_coeff: 1.0,
            f_coeff: 1.0,
            coupling: Coupling::Gradient { p, h },
            domain,
        }
    }

    pub fn general(
        dim: u32,
        b: f64,
        g_radial: NonlinearityDesc,
        g_value: NonlinearityDesc,
        h: NonlinearityDesc,
        domain: Domain,
    ) -> Self {
        ProblemSpec {
            dim,
            a: 0.0,
            b,
            g_coeff: 1.0,
            f_coeff: 1.0,
            coupling: Coupling::General {
                g_radial,
                g_value,
                h,
            },
            domain,
        }
    }

    pub fn with_domain(&self, domain: Domain) -> Self {
        ProblemSpec {
            domain,
            ..self.clone()
        }
    }

    pub fn n(&self) -> f64 {
        self.dim as f64
    }

    /// `(p, s)` in the pure power-law family.
    pub fn power_params(&self) -> Option<(f64, f64)> {
        match self.coupling {
            Coupling::Power { p, s } => Some((p, s)),
            _ => None,
        }
    }

    /// Exponent on `v` when `g` is `r^a v^p`.
    pub fn p(&self) -> Option<f64> {
        match self.coupling {
            Coupling::Power { p, .. } | Coupling::Gradient { p, .. } => Some(p),
            Coupling::General { .. } => None,
        }
    }

    /// `ln g(e^{ln_r}, e^{ln_t})`.
    pub fn ln_g(&self, ln_r: f64, ln_t: f64) -> f64 {
        let k = self.g_coeff.ln();
        match &self.coupling {
            Coupling::Power { p, .. } | Coupling::Gradient { p, .. } => {
                k + self.a * ln_r + p * ln_t
            }
            Coupling::General {
                g_radial, g_value, ..
            } => k + g_radial.ln_eval(ln_r) + g_value.ln_eval(ln_t),
        }
    }

    /// `ln f(e^{ln_r}, e^{ln_t})`.
    pub fn ln_f(&self, ln_r: f64, ln_t: f64) -> f64 {
        let k = self.f_coeff.ln() + self.b * ln_r;
        match &self.coupling {
            Coupling::Power { s, .. } => k + s * ln_t,
            Coupling::Gradient { h, .. } | Coupling::General { h, .. } => k + h.ln_eval(ln_t),
        }
    }

    pub fn g(&self, r: f64, t: f64) -> f64 {
        match &self.coupling {
            Coupling::Power { p, .. } | Coupling::Gradient { p, .. } => {
                self.g_coeff * r.powf(self.a) * t.max(0.0).powf(*p)
            }
            Coupling::General {
                g_radial, g_value, ..
            } => self.g_coeff * g_radial.eval(r) * g_value.eval(t),
        }
    }

    pub fn f(&self, r: f64, t: f64) -> f64 {
        let w = self.f_coeff * r.powf(self.b);
        match &self.coupling {
            Coupling::Power { s, .. } => w * t.max(0.0).powf(*s),
            Coupling::Gradient { h, .. } | Coupling::General { h, .. } => w * h.eval(t),
        }
    }

    /// The gradient profile `h`, materialized for the power family.
    pub fn h_desc(&self) -> NonlinearityDesc {
        match &self.coupling {
            Coupling::Power { s, .. } => NonlinearityDesc::power(1.0, *s),
            Coupling::Gradient { h, .. } | Coupling::General { h, .. } => h.clone(),
        }
    }

    /// Fails with [`LabError::InvalidProblem`] listing every violation.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_problem(self);
        if report.ok {
            Ok(())
        } else {
            Err(LabError::InvalidProblem(report.violations.join("; ")))
        }
    }
}

/// `u(0)` and `v(0)`; the derivatives vanish at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub u0: f64,
    pub v0: f64,
}

impl InitialData {
    pub fn new(u0: f64, v0: f64) -> Result<Self> {
        let init = InitialData { u0, v0 };
        init.ensure_valid()?;
        Ok(init)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        for (name, v) in [("u0", self.u0), ("v0", self.v0)] {
            if !v.is_finite() || v < MIN_INITIAL_VALUE {
                return Err(LabError::InvalidArgument(format!(
                    "{name} = {v} must be finite and >= {MIN_INITIAL_VALUE:e}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for InitialData {
    fn default() -> Self {
        InitialData { u0: 1.0, v0: 1.0 }
    }
}

/// Which analyses the hypotheses of a problem admit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eligibility {
    /// Ball-domain regime classification (bounded / u bounded, v blows / both blow up).
    pub ball_regime: bool,
    /// Whole-space existence criterion (power family).
    pub entire_existence: bool,
    /// Whole-space growth rates: power family with `p < 1` and `ps < 1`.
    pub asymptotic_rates: bool,
    /// Negative-divergence condition `p(s-2)(s+as+b+2)/(1-ps) <= 2(N+a-1)`;
    /// `None` when `ps >= 1` or outside the power family.
    pub divergence_condition: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<String>,
    pub warnings: Vec<String>,
    pub eligibility: Eligibility,
}

/// Left and right sides of the negative-divergence condition, `ps < 1`.
pub fn divergence_condition_sides(n: f64, a: f64, b: f64, p: f64, s: f64) -> (f64, f64) {
    let lhs = p * (s - 2.0) * (s + a * s + b + 2.0) / (1.0 - p * s);
    (lhs, 2.0 * (n + a - 1.0))
}

/// Checks the standing hypotheses: `N >= 2`, `a, b >= 0`, `p > 0`, `s >= 1`,
/// `R > 0`, positive coefficients and monotone nonnegative profiles.
pub fn validate_problem(spec: &ProblemSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let mut warnings = Vec::new();
    if spec.dim < 2 {
        violations.push(format!("dimension < 2 (N = {})", spec.dim));
    }
    for (name, w) in [("a", spec.a), ("b", spec.b)] {
        if !w.is_finite() || w < 0.0 {
            violations.push(format!("weight {name} = {w} must be finite and >= 0"));
        }
    }
    for (name, k) in [("g coefficient", spec.g_coeff), ("f coefficient", spec.f_coeff)] {
        if !k.is_finite() || k <= 0.0 {
            violations.push(format!("{name} = {k} must be finite and > 0"));
        }
    }
    if let Domain::Ball(r) = spec.domain {
        if !r.is_finite() || r <= 0.0 {
            violations.push(format!("ball radius R = {r} must be finite and > 0"));
        }
    }
    let check_p = |p: f64, violations: &mut Vec<String>| {
        if !p.is_finite() || p <= 0.0 {
            violations.push(format!("exponent p = {p} must be finite and > 0"));
        }
    };
    match &spec.coupling {
        Coupling::Power { p, s } => {
            check_p(*p, &mut violations);
            if !s.is_finite() || *s < 1.0 {
                violations.push(format!("exponent s = {s} must be finite and >= 1"));
            } else if *s == 1.0 {
                warnings.push("s = 1: accepted (whole-space results hold for s >= 1)".to_string());
            }
        }
        Coupling::Gradient { p, h } => {
            check_p(*p, &mut violations);
            violations.extend(h.issues("h"));
        }
        Coupling::General {
            g_radial,
            g_value,
            h,
        } => {
            violations.extend(g_radial.issues("g radial profile"));
            violations.extend(g_value.issues("g value profile"));
            violations.extend(h.issues("h"));
            if spec.a != 0.0 {
                warnings.push("weight a is ignored when g has a general radial profile".to_string());
            }
        }
    }

    let ok = violations.is_empty();
    let (mut entire_existence, mut asymptotic_rates, mut divergence_condition) = (false, false, None);
    if let (true, Some((p, s))) = (ok, spec.power_params()) {
        entire_existence = true;
        if p * s < 1.0 {
            let (lhs, rhs) = divergence_condition_sides(spec.n(), spec.a, spec.b, p, s);
            divergence_condition = Some(lhs <= rhs);
            if lhs == rhs {
                warnings.push("divergence condition holds with equality".to_string());
            }
            asymptotic_rates = p < 1.0;
        }
    }
    let eligibility = Eligibility {
        ball_regime: ok && matches!(spec.domain, Domain::Ball(_)),
        entire_existence: entire_existence && spec.domain == Domain::EntireSpace,
        asymptotic_rates: asymptotic_rates && spec.domain == Domain::EntireSpace,
        divergence_condition,
    };
    ValidationReport {
        ok,
        violations,
        warnings,
        eligibility,
    }
}

fn default_one() -> f64 {
    1.0
}

/// JSON problem document: `{"N", "a", "b", "p", "s", "domain", "u0", "v0"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    pub p: f64,
    pub s: f64,
    pub domain: Domain,
    #[serde(default = "default_one")]
    pub u0: f64,
    #[serde(default = "default_one")]
    pub v0: f64,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| LabError::InvalidArgument(e.to_string()))
    }

    pub fn spec(&self) -> ProblemSpec {
        ProblemSpec::power(self.n, self.a, self.b, self.p, self.s, self.domain)
    }

    pub fn init(&self) -> InitialData {
        InitialData {
            u0: self.u0,
            v0: self.v0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn entire_space_half_one_is_asymptotics_eligible() {
        let spec = ProblemSpec::power(3, 0.0, 0.0, 0.5, 1.0, Domain::EntireSpace);
        let rep = validate_problem(&spec);
        assert!(rep.ok);
        assert!(rep.eligibility.asymptotic_rates);
        assert_eq!(rep.eligibility.divergence_condition, Some(true));
        assert!(rep.warnings.iter().any(|w| w.contains("s = 1")));
    }

    #[test]
    fn dimension_one_is_rejected() {
        let spec = ProblemSpec::power(1, 0.0, 0.0, 0.5, 1.0, Domain::Ball(1.0));
        let rep = validate_problem(&spec);
        assert!(!rep.ok);
        assert!(rep.violations.iter().any(|v| v.contains("dimension < 2")));
        assert!(matches!(spec.ensure_valid(), Err(LabError::InvalidProblem(_))));
    }

    #[test]
    fn nonmonotone_table_is_rejected() {
        let h = NonlinearityDesc::tabulated(&[(0.0, 0.0), (1.0, 2.0), (2.0, 1.0)], Some(1.0));
        let spec = ProblemSpec::gradient(3, 0.0, 0.0, 1.0, h, Domain::Ball(1.0));
        let rep = validate_problem(&spec);
        assert!(!rep.ok);
        assert!(rep.violations.iter().any(|v| v.contains("monotonicity")));
    }

    #[test]
    fn bad_radius_and_weights() {
        let spec = ProblemSpec::power(3, -1.0, 0.0, 1.0, 1.0, Domain::Ball(0.0));
        let rep = validate_problem(&spec);
        assert_eq!(rep.violations.len(), 2);
    }

    #[test]
    fn validation_is_deterministic() {
        let spec = ProblemSpec::power(3, 0.5, 1.0, 2.0, 0.5, Domain::Ball(-2.0));
        let a = serde_json::to_string(&validate_problem(&spec)).unwrap();
        let b = serde_json::to_string(&validate_problem(&spec)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn pchip_reproduces_power_profile() {
        let samples: Vec<(f64, f64)> = (0..=400)
            .map(|i| {
                let x = i as f64 * 0.025;
                (x, x.powf(1.5))
            })
            .collect();
        let h = NonlinearityDesc::tabulated(&samples, Some(1.5));
        for &x in &[0.3, 1.7, 5.55, 9.99, 20.0, 1e6] {
            assert_relative_eq!(h.eval(x), x.powf(1.5), max_relative = 1e-4);
        }
        assert_relative_eq!(h.ln_eval(1e6f64.ln()), 1.5 * 1e6f64.ln(), max_relative = 1e-12);
        // nondecreasing between and beyond samples
        let mut prev = 0.0;
        for i in 0..5000 {
            let y = h.eval(i as f64 * 0.003);
            assert!(y >= prev);
            prev = y;
        }
    }

    #[test]
    fn rescaled_profiles() {
        let p = NonlinearityDesc::power(2.0, 3.0);
        let q = p.rescaled(2.0, 0.5);
        assert_relative_eq!(q.eval(1.5), 0.5 * p.eval(3.0), max_relative = 1e-14);
        let t = NonlinearityDesc::tabulated(&[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0), (3.0, 9.0)], None);
        let u = t.rescaled(2.0, 3.0);
        for &x in &[0.2, 0.7, 1.2, 4.0] {
            assert_relative_eq!(u.eval(x), 3.0 * t.eval(2.0 * x), max_relative = 1e-12);
        }
    }

    #[test]
    fn problem_file_rejects_unknown_fields() {
        let ok = r#"{"N":3,"a":0,"b":0,"p":1,"s":5,"domain":{"ball":1.0}}"#;
        let f = ProblemFile::from_json(ok).unwrap();
        assert_eq!(f.domain, Domain::Ball(1.0));
        assert_eq!(f.u0, 1.0);
        let entire = r#"{"N":3,"p":0.5,"s":1,"domain":"entire","u0":2,"v0":3}"#;
        assert_eq!(ProblemFile::from_json(entire).unwrap().domain, Domain::EntireSpace);
        let bad = r#"{"N":3,"p":1,"s":5,"domain":"entire","q":1}"#;
        assert!(ProblemFile::from_json(bad).is_err());
    }
}
