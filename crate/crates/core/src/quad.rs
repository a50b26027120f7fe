//! Adaptive Gauss–Kronrod quadrature and cumulative integrals over
//! geometrically growing panels.

use crate::error::{LabError, Result};

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One G7K15 pass: `(kronrod estimate, |kronrod - gauss|)`.
pub fn gk15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive G7K15 on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64, abs_tol: f64) -> Result<f64> {
    if hi == lo {
        return Ok(0.0);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(LabError::Quadrature(format!("non-finite interval [{lo}, {hi}]")));
    }
    let (sign, lo, hi) = if hi < lo { (-1.0, hi, lo) } else { (1.0, lo, hi) };
    let (v, e) = gk15(&f, lo, hi);
    let mut pieces = vec![(lo, hi, v, e)];
    let mut total = v;
    let mut err = e;
    for _ in 0..2000 {
        if !total.is_finite() {
            return Err(LabError::Quadrature("non-finite integrand".to_string()));
        }
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(sign * total);
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("nonempty");
        let (a, b, v0, e0) = pieces.swap_remove(idx);
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            // interval can no longer be split; accept
            return Ok(sign * total);
        }
        let (v1, e1) = gk15(&f, a, m);
        let (v2, e2) = gk15(&f, m, b);
        total += v1 + v2 - v0;
        err += e1 + e2 - e0;
        pieces.push((a, m, v1, e1));
        pieces.push((m, b, v2, e2));
    }
    if err <= 1e3 * abs_tol.max(rel_tol * total.abs()) {
        Ok(sign * total)
    } else {
        Err(LabError::Quadrature(format!(
            "no convergence on [{lo:e}, {hi:e}] (estimate {total:e}, error {err:e})"
        )))
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫_0^x φ` for a nonnegative integrand, tabulated on the panels
/// `[0, 2^k_min], [2^k_min, 2^(k_min+1)], …` so that evaluations anywhere
/// below `2^k_max` cost one partial-panel quadrature.
pub struct CumulativeIntegral<F: Fn(f64) -> f64> {
    f: F,
    k_min: i32,
    /// `prefix[i] = ∫_0^{2^(k_min+i)}`.
    prefix: Vec<f64>,
    rel_tol: f64,
}

impl<F: Fn(f64) -> f64> CumulativeIntegral<F> {
    pub fn new(f: F, k_min: i32, k_max: i32, rel_tol: f64) -> Result<Self> {
        let mut prefix = Vec::with_capacity((k_max - k_min + 1) as usize);
        let first = integrate(&f, 0.0, 2f64.powi(k_min), rel_tol, 0.0)?;
        prefix.push(first);
        for k in k_min..k_max {
            let lo = 2f64.powi(k);
            let piece = integrate(&f, lo, 2.0 * lo, rel_tol, 0.0)?;
            let last = *prefix.last().expect("nonempty");
            prefix.push(last + piece);
        }
        Ok(CumulativeIntegral {
            f,
            k_min,
            prefix,
            rel_tol,
        })
    }

    /// Appends panels until the integral reaches `target` or `k_limit`.
    pub fn extend_until(&mut self, target: f64, k_limit: i32) -> Result<()> {
        loop {
            let last = *self.prefix.last().expect("nonempty");
            if last >= target {
                return Ok(());
            }
            let k = self.k_min + self.prefix.len() as i32 - 1;
            if k >= k_limit {
                return Err(LabError::Quadrature(format!(
                    "primitive stays below {target:e} up to 2^{k_limit}"
                )));
            }
            let lo = 2f64.powi(k);
            let piece = integrate(&self.f, lo, 2.0 * lo, self.rel_tol, 0.0)?;
            self.prefix.push(last + piece);
        }
    }

    pub fn total(&self) -> f64 {
        *self.prefix.last().expect("nonempty")
    }

    /// The panel `[lo, hi]` on which the integral first reaches `y`, or
    /// `None` past the tabulated range.
    pub fn bracket(&self, y: f64) -> Option<(f64, f64)> {
        let i = self.prefix.partition_point(|&p| p < y);
        if i >= self.prefix.len() {
            return None;
        }
        let hi = 2f64.powi(self.k_min + i as i32);
        let lo = if i == 0 { 0.0 } else { 0.5 * hi };
        Some((lo, hi))
    }

    pub fn upper(&self) -> f64 {
        2f64.powi(self.k_min + self.prefix.len() as i32 - 1)
    }

    /// Value at the panel boundary `2^k`.
    pub fn at_power(&self, k: i32) -> Option<f64> {
        let idx = k - self.k_min;
        if idx < 0 {
            return None;
        }
        self.prefix.get(idx as usize).copied()
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        let first = 2f64.powi(self.k_min);
        if x <= first {
            return integrate(&self.f, 0.0, x, self.rel_tol, 0.0);
        }
        let idx = (x / first).log2().floor() as i64;
        let idx = idx.clamp(0, self.prefix.len() as i64 - 1) as usize;
        let lo = first * 2f64.powi(idx as i32);
        let base = self.prefix[idx];
        if x == lo {
            return Ok(base);
        }
        Ok(base + integrate(&self.f, lo, x, self.rel_tol, 0.0)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gk_integrates_polynomials_and_singular_ends() {
        let v = integrate(|x| x * x, 0.0, 3.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(v, 9.0, max_relative = 1e-13);
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-8);
        let v = integrate(|x: f64| x.sin(), std::f64::consts::PI, 0.0, 1e-12, 0.0).unwrap();
        assert_relative_eq!(v, -2.0, max_relative = 1e-12);
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_2n_minus_1() {
        let rule = gauss_legendre(6);
        let v: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert_relative_eq!(v, 2.0 / 11.0, max_relative = 1e-13);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(total, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn cumulative_matches_closed_form() {
        let c = CumulativeIntegral::new(|x: f64| x.powf(1.5), -4, 30, 1e-12).unwrap();
        for &x in &[0.01, 0.9, 17.0, 3.3e5, 2f64.powi(30)] {
            let exact = x.powf(2.5) / 2.5;
            assert_relative_eq!(c.eval(x).unwrap(), exact, max_relative = 1e-10);
        }
        assert_relative_eq!(c.at_power(10).unwrap(), 1024f64.powf(2.5) / 2.5, max_relative = 1e-10);
    }
}
