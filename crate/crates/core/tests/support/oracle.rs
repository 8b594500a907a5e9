//! Reference implementations used only by tests. Nothing here calls into
//! the library's numerics.

/// ln Γ(x) by upward recurrence to x ≥ 10 and the Stirling series.
pub fn ln_gamma_stirling(mut x: f64) -> f64 {
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= x.ln();
        x += 1.0;
    }
    let x2 = x * x;
    let series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x2 * x2 * x)
        - 1.0 / (1680.0 * x2 * x2 * x2 * x)
        + 1.0 / (1188.0 * x2 * x2 * x2 * x2 * x);
    shift + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`, split into panels first
/// so narrow features are not skipped.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = lo + h;
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = simpson(lo, hi, fa, fm, fb);
            adaptive(&f, lo, hi, fa, fm, fb, whole, tol / PANELS as f64, 40)
        })
        .sum()
}

/// Integral of `f` over `[lower, ∞)` through `x = lower + s / (1 - s)`.
pub fn integrate_upper_tail<F: Fn(f64) -> f64>(f: F, lower: f64, tol: f64) -> f64 {
    integrate(
        |s: f64| {
            if s >= 1.0 {
                return 0.0;
            }
            let w = 1.0 - s;
            let v = f(lower + s / w) / (w * w);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

pub fn t_density(x: f64, df: f64) -> f64 {
    let ln_c = ln_gamma_stirling(0.5 * (df + 1.0))
        - ln_gamma_stirling(0.5 * df)
        - 0.5 * (df * std::f64::consts::PI).ln();
    (ln_c - 0.5 * (df + 1.0) * (1.0 + x * x / df).ln()).exp()
}

pub fn f_density(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let ln_beta =
        ln_gamma_stirling(0.5 * d1) + ln_gamma_stirling(0.5 * d2) - ln_gamma_stirling(0.5 * (d1 + d2));
    let ln_c = 0.5 * d1 * (d1 / d2).ln() - ln_beta;
    (ln_c + (0.5 * d1 - 1.0) * x.ln() - 0.5 * (d1 + d2) * (1.0 + d1 * x / d2).ln()).exp()
}

/// Two-sided Student-t p-value by quadrature of the density.
pub fn t_pvalue_quadrature(t: f64, df: u32) -> f64 {
    let df = f64::from(df);
    2.0 * integrate_upper_tail(|x| t_density(x, df), t.abs(), 1e-12)
}

/// Upper-tail F probability by quadrature of the density.
pub fn f_pvalue_quadrature(f: f64, df1: u32, df2: u32) -> f64 {
    let (d1, d2) = (f64::from(df1), f64::from(df2));
    integrate_upper_tail(|x| f_density(x, d1, d2), f, 1e-12)
}
