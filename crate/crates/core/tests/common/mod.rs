//! Independent oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls the code paths it is used to check.
#![allow(dead_code)]

use radlab::dynsys::{vector_field, DynParams, Matrix, Point};
use radlab::model::ProblemSpec;
use radlab::radial::{fd_weights, RadialSolution, RadialState};

/// Worst relative violations of the second-derivative sandwiches
/// `((1+a)/(N+a)) r^a v^p <= u'' <= r^a v^p`,
/// `((1+b)/(N+b)) r^b h(u') <= v'' <= r^b h(u')`
/// and of the gradient sandwich
/// `r^{a+1} v0^p/(N+a) <= u' <= r^{a+1} v^p/(N+a)`, over interior grid
/// points. `u''` and `v''` come from 5-point differences of `ln u'`, `ln v'`
/// in `ln r`. Zero means no violation.
pub fn sandwich_violations(spec: &ProblemSpec, v0: f64, sol: &RadialSolution) -> (f64, f64, f64) {
    let (n, a, b) = (spec.n(), spec.a, spec.b);
    let g = &sol.grid;
    let (mut wu, mut wv, mut grad) = (0.0f64, 0.0f64, 0.0f64);
    let gval = |r: f64, v: f64| spec.g(r, v) / spec.g_coeff;
    for i in 2..g.len().saturating_sub(2) {
        let ts: Vec<f64> = (i - 2..=i + 2).map(|j| g[j].r.ln()).collect();
        let w = fd_weights(ts[2], &ts, 1);
        let dlu: f64 = (0..5).map(|k| w[k] * g[i - 2 + k].ln_du()).sum();
        let dlv: f64 = (0..5).map(|k| w[k] * g[i - 2 + k].ln_dv()).sum();
        let st = &g[i];
        let upp = st.du() * dlu / st.r;
        let vpp = st.dv() * dlv / st.r;
        let hi_u = spec.g(st.r, st.v());
        let hi_v = spec.f(st.r, st.du());
        wu = wu.max(((1.0 + a) / (n + a) * hi_u - upp) / hi_u).max((upp - hi_u) / hi_u);
        wv = wv.max(((1.0 + b) / (n + b) * hi_v - vpp) / hi_v).max((vpp - hi_v) / hi_v);
        let lo_g = st.r * spec.g_coeff * gval(st.r, v0) / (n + a);
        let hi_g = st.r * hi_u / (n + a);
        grad = grad.max((lo_g - st.du()) / lo_g).max((st.du() - hi_g) / hi_g);
    }
    (wu, wv, grad)
}

fn det3(m: &Matrix) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// `(α, β, c)` with `det(λI - M) = λ³ + αλ² + βλ + c`, by evaluating the
/// determinant at λ = 1, 2, 3 and solving the Vandermonde system.
pub fn char_poly_by_interpolation(m: &Matrix) -> (f64, f64, f64) {
    let q = |lam: f64| {
        let mut a = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = if i == j { lam } else { 0.0 } - m[i][j];
            }
        }
        det3(&a) - lam * lam * lam
    };
    let (q1, q2, q3) = (q(1.0), q(2.0), q(3.0));
    // q(λ) = αλ² + βλ + c through three points
    let alpha = (q3 - 2.0 * q2 + q1) / 2.0;
    let beta = q2 - q1 - 3.0 * alpha;
    let c = q1 - alpha - beta;
    (alpha, beta, c)
}

/// Central-difference Jacobian of the reduced field.
pub fn fd_jacobian(params: &DynParams, xi: &Point, h: f64) -> Matrix {
    let mut out = [[0.0; 3]; 3];
    for j in 0..3 {
        let (mut hi, mut lo) = (*xi, *xi);
        hi[j] += h;
        lo[j] -= h;
        let (fh, fl) = (vector_field(&hi, params), vector_field(&lo, params));
        for i in 0..3 {
            out[i][j] = (fh[i] - fl[i]) / (2.0 * h);
        }
    }
    out
}

/// `u = c_u r^α`, `v = c_v r^β` sampled at `10^{lo..hi}`.
pub fn power_pair(cu: f64, alpha: f64, cv: f64, beta: f64, lo: f64, hi: f64, points: usize) -> RadialSolution {
    let grid = (0..points)
        .map(|i| {
            let r = 10f64.powf(lo + (hi - lo) * i as f64 / (points - 1) as f64);
            RadialState::new(
                r,
                cu * r.powf(alpha),
                cv * r.powf(beta),
                cu * alpha * r.powf(alpha - 1.0),
                cv * beta * r.powf(beta - 1.0),
            )
        })
        .collect();
    RadialSolution {
        grid,
        blowup: None,
        residual_norm: 0.0,
    }
}

pub fn sup_dist(a: &Point, b: &Point) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max)
}
