//! Explicit embedded Runge–Kutta pairs with PI step-size control.
//!
//! Pairs are interchangeable strategies registered by name; the integrator
//! only sees a [`Tableau`].

use std::sync::LazyLock;

use crate::error::{LabError, Result};
use crate::registry::{Named, Registry};

/// Butcher tableau of an embedded pair. `b` advances the solution,
/// `b_hat` is the embedded estimate; their difference is the local error.
#[derive(Debug)]
pub struct Tableau {
    pub c: &'static [f64],
    pub a: &'static [&'static [f64]],
    pub b: &'static [f64],
    pub b_hat: &'static [f64],
    /// Order of the error estimate plus one (5 for a 5(4) pair).
    pub error_order: u32,
}

pub trait EmbeddedPair: Named + Send + Sync {
    fn tableau(&self) -> &Tableau;
}

pub struct DormandPrince54;
pub struct CashKarp54;
pub struct Fehlberg45;

static DOPRI5: Tableau = Tableau {
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0],
    a: &[
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0],
        &[19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0],
        &[9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0],
        &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ],
    b: &[35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0],
    b_hat: &[
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ],
    error_order: 5,
};

static CASH_KARP: Tableau = Tableau {
    c: &[0.0, 1.0 / 5.0, 3.0 / 10.0, 3.0 / 5.0, 1.0, 7.0 / 8.0],
    a: &[
        &[],
        &[1.0 / 5.0],
        &[3.0 / 40.0, 9.0 / 40.0],
        &[3.0 / 10.0, -9.0 / 10.0, 6.0 / 5.0],
        &[-11.0 / 54.0, 5.0 / 2.0, -70.0 / 27.0, 35.0 / 27.0],
        &[1631.0 / 55296.0, 175.0 / 512.0, 575.0 / 13824.0, 44275.0 / 110592.0, 253.0 / 4096.0],
    ],
    b: &[37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0],
    b_hat: &[
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        1.0 / 4.0,
    ],
    error_order: 5,
};

static FEHLBERG: Tableau = Tableau {
    c: &[0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0],
    a: &[
        &[],
        &[1.0 / 4.0],
        &[3.0 / 32.0, 9.0 / 32.0],
        &[1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0],
        &[439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0],
        &[-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
    ],
    b: &[16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0],
    b_hat: &[25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0],
    error_order: 5,
};

impl Named for DormandPrince54 {
    fn name(&self) -> &'static str {
        "dopri5"
    }
    fn description(&self) -> &'static str {
        "Dormand–Prince 5(4), 7 stages"
    }
}

impl EmbeddedPair for DormandPrince54 {
    fn tableau(&self) -> &Tableau {
        &DOPRI5
    }
}

impl Named for CashKarp54 {
    fn name(&self) -> &'static str {
        "cash-karp"
    }
    fn description(&self) -> &'static str {
        "Cash–Karp 5(4), 6 stages"
    }
}

impl EmbeddedPair for CashKarp54 {
    fn tableau(&self) -> &Tableau {
        &CASH_KARP
    }
}

impl Named for Fehlberg45 {
    fn name(&self) -> &'static str {
        "rkf45"
    }
    fn description(&self) -> &'static str {
        "Runge–Kutta–Fehlberg 4(5), advancing with the fifth-order weights"
    }
}

impl EmbeddedPair for Fehlberg45 {
    fn tableau(&self) -> &Tableau {
        &FEHLBERG
    }
}

pub type PairRegistry = Registry<dyn EmbeddedPair>;

pub fn builtin_pairs() -> PairRegistry {
    PairRegistry::empty()
        .register(Box::new(DormandPrince54))
        .register(Box::new(CashKarp54))
        .register(Box::new(Fehlberg45))
}

static REGISTRY: LazyLock<PairRegistry> = LazyLock::new(builtin_pairs);

pub const DEFAULT_PAIR: &str = "dopri5";

/// Looks up a built-in pair by name.
pub fn pair(name: &str) -> Result<&'static dyn EmbeddedPair> {
    REGISTRY.get(name)
}

pub fn pair_names() -> Vec<&'static str> {
    REGISTRY.names()
}

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    /// Largest change of any component accepted in a single step.
    pub max_increment: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-9,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_increment: f64::INFINITY,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Reached,
    Event,
}

/// Accepted steps, including the initial point.
#[derive(Debug, Clone)]
pub struct Path<const D: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; D]>,
    pub termination: Termination,
    pub rejected: usize,
}

fn error_norm<const D: usize>(err: &[f64; D], y0: &[f64; D], y1: &[f64; D], ctl: &StepControl) -> f64 {
    let mut acc = 0.0;
    for i in 0..D {
        let sc = ctl.atol + ctl.rtol * y0[i].abs().max(y1[i].abs());
        let e = err[i] / sc;
        acc += e * e;
    }
    let n = (acc / D as f64).sqrt();
    if n.is_finite() {
        n
    } else {
        f64::INFINITY
    }
}

/// Integrates `y' = rhs(t, y)` forward from `t0` to `t_end`.
///
/// Steps are shortened to land exactly on every `knot` in `(t0, t_end)`.
/// After each accepted step `stop` is consulted; returning `true` ends the
/// integration with [`Termination::Event`].
pub fn solve<const D: usize>(
    pair: &dyn EmbeddedPair,
    rhs: &mut dyn FnMut(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    knots: &[f64],
    ctl: &StepControl,
    stop: &mut dyn FnMut(f64, &[f64; D]) -> bool,
) -> Result<Path<D>> {
    let tab = pair.tableau();
    let stages = tab.c.len();
    let safe = 0.9;
    let beta = 0.04;
    let expo = 1.0 / tab.error_order as f64 - 0.75 * beta;

    let mut path = Path {
        t: vec![t0],
        y: vec![y0],
        termination: Termination::Reached,
        rejected: 0,
    };
    if t_end <= t0 {
        return Ok(path);
    }
    let mut knot_iter = knots.iter().copied().filter(|&k| k > t0 && k < t_end).peekable();

    let mut t = t0;
    let mut y = y0;
    let f0 = rhs(t, &y);
    let mut h = ctl.h_init.unwrap_or_else(|| {
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..D {
            let sc = ctl.atol + ctl.rtol * y[i].abs();
            d0 += (y[i] / sc).powi(2);
            d1 += (f0[i] / sc).powi(2);
        }
        let (d0, d1) = ((d0 / D as f64).sqrt(), (d1 / D as f64).sqrt());
        if d0 < 1e-5 || d1 < 1e-5 || !d1.is_finite() {
            1e-6
        } else {
            0.01 * d0 / d1
        }
    });
    h = h.min(ctl.h_max).min(t_end - t0);
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut k = vec![[0.0; D]; stages];

    for _ in 0..ctl.max_steps {
        let target = knot_iter.peek().copied().unwrap_or(t_end);
        let mut landing = false;
        if t + h >= target {
            h = target - t;
            landing = true;
        }
        let h_min = 16.0 * f64::EPSILON * t.abs().max(1e-300);
        if h <= h_min {
            return Err(LabError::StepUnderflow { r: t, h });
        }

        k[0] = rhs(t, &y);
        for s in 1..stages {
            let mut ys = y;
            for (j, aij) in tab.a[s].iter().enumerate() {
                if *aij != 0.0 {
                    for i in 0..D {
                        ys[i] += h * aij * k[j][i];
                    }
                }
            }
            k[s] = rhs(t + tab.c[s] * h, &ys);
        }
        let mut y_new = y;
        let mut err = [0.0; D];
        for s in 0..stages {
            let (bs, es) = (tab.b[s], tab.b[s] - tab.b_hat[s]);
            for i in 0..D {
                y_new[i] += h * bs * k[s][i];
                err[i] += h * es * k[s][i];
            }
        }
        let finite = y_new.iter().all(|v| v.is_finite());
        let en = if finite { error_norm(&err, &y, &y_new, ctl) } else { f64::INFINITY };
        let jump = (0..D).map(|i| (y_new[i] - y[i]).abs()).fold(0.0, f64::max);
        if en <= 1.0 && jump > ctl.max_increment {
            path.rejected += 1;
            h *= (0.9 * ctl.max_increment / jump).max(0.1);
            last_rejected = true;
            continue;
        }

        if en <= 1.0 {
            let fac11 = en.powf(expo);
            let fac = (fac11 / fac_old.powf(beta) / safe).clamp(0.2, 10.0);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = h_new.min(h);
            }
            fac_old = en.max(1e-4);
            t = if landing { target } else { t + h };
            y = y_new;
            path.t.push(t);
            path.y.push(y);
            if landing && target == t_end {
                return Ok(path);
            }
            if landing {
                knot_iter.next();
            }
            if stop(t, &y) {
                path.termination = Termination::Event;
                return Ok(path);
            }
            h = h_new.min(ctl.h_max);
            last_rejected = false;
        } else {
            path.rejected += 1;
            let shrink = if en.is_finite() {
                (en.powf(expo) / safe).min(10.0)
            } else {
                10.0
            };
            h /= shrink.max(1.0);
            last_rejected = true;
        }
    }
    Err(LabError::TooManySteps(ctl.max_steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exp_decay(name: &str) -> f64 {
        let pair = pair(name).unwrap();
        let mut rhs = |_t: f64, y: &[f64; 2]| [-y[0], y[0] - 2.0 * y[1]];
        let path = solve(
            pair,
            &mut rhs,
            0.0,
            [1.0, 0.0],
            5.0,
            &[],
            &StepControl::default(),
            &mut |_, _| false,
        )
        .unwrap();
        let y = path.y.last().unwrap();
        // y1 = e^{-t} - e^{-2t}
        let exact = (-5f64).exp() - (-10f64).exp();
        (y[1] - exact).abs() / exact
    }

    #[test]
    fn registered_pairs_reach_tolerance() {
        for name in pair_names() {
            assert!(exp_decay(name) < 1e-7, "{name}");
        }
    }

    #[test]
    fn tableau_consistency() {
        for name in pair_names() {
            let tab = pair(name).unwrap().tableau();
            let sb: f64 = tab.b.iter().sum();
            let sbh: f64 = tab.b_hat.iter().sum();
            assert_relative_eq!(sb, 1.0, epsilon = 1e-14);
            assert_relative_eq!(sbh, 1.0, epsilon = 1e-14);
            for (s, row) in tab.a.iter().enumerate() {
                let sum: f64 = row.iter().sum();
                assert_relative_eq!(sum, tab.c[s], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn knots_are_hit_exactly_and_events_stop() {
        let pair = pair(DEFAULT_PAIR).unwrap();
        let mut rhs = |_t: f64, y: &[f64; 1]| [y[0]];
        let knots = [0.25, 0.5, 0.75];
        let path = solve(pair, &mut rhs, 0.0, [1.0], 1.0, &knots, &StepControl::default(), &mut |_, _| false)
            .unwrap();
        for k in knots {
            assert!(path.t.contains(&k));
        }
        assert_eq!(*path.t.last().unwrap(), 1.0);
        let path = solve(pair, &mut rhs, 0.0, [1.0], 10.0, &[], &StepControl::default(), &mut |_, y| y[0] > 100.0)
            .unwrap();
        assert_eq!(path.termination, Termination::Event);
        assert!(*path.t.last().unwrap() < 10.0);
    }

    #[test]
    fn unknown_pair_lists_alternatives() {
        let err = pair("euler").err().unwrap();
        assert_eq!(err.code(), "unknown_strategy");
        assert!(err.to_string().contains("dopri5"));
    }
}
