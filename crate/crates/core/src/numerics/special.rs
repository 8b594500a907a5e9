use super::NumericsError;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

const CF_MAX_ITER: usize = 10_000;
const CF_EPS: f64 = 1e-15;
const CF_TINY: f64 = 1e-300;

/// Continued fraction for I_x(a, b), modified Lentz.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> Result<f64, NumericsError> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_TINY {
        d = CF_TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            return Ok(h);
        }
    }
    Err(NumericsError::NoConvergence("incomplete beta continued fraction"))
}

/// Regularized incomplete beta function I_x(a, b).
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> Result<f64, NumericsError> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidArgument(format!(
            "incomplete beta shape parameters must be positive, got a={a}, b={b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(NumericsError::InvalidArgument(format!(
            "incomplete beta argument must lie in [0, 1], got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    // The fraction converges fast for x < (a+1)/(a+b+2); use the
    // reflection I_x(a,b) = 1 - I_{1-x}(b,a) above that point.
    if x > (a + 1.0) / (a + b + 2.0) {
        return Ok(1.0 - regularized_incomplete_beta_cf(b, a, 1.0 - x)?);
    }
    regularized_incomplete_beta_cf(a, b, x)
}

fn regularized_incomplete_beta_cf(a: f64, b: f64, x: f64) -> Result<f64, NumericsError> {
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    Ok((ln_front.exp() * beta_continued_fraction(a, b, x)? / a).clamp(0.0, 1.0))
}

/// Two-sided p-value of a Student-t statistic: `2 * (1 - CDF(|t|))`.
pub fn t_pvalue_two_sided(t: f64, df: u32) -> Result<f64, NumericsError> {
    if df == 0 {
        return Err(NumericsError::InvalidDegreesOfFreedom);
    }
    if t.is_nan() {
        return Err(NumericsError::InvalidArgument("t statistic is NaN".into()));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    let nu = f64::from(df);
    // 2 P(T > |t|) = I_{nu/(nu+t^2)}(nu/2, 1/2)
    let x = if t.is_infinite() { 0.0 } else { nu / (nu + t * t) };
    regularized_incomplete_beta(0.5 * nu, 0.5, x)
}

/// Upper-tail probability `P(F > f)` of the F(df1, df2) distribution.
pub fn f_pvalue(f: f64, df1: u32, df2: u32) -> Result<f64, NumericsError> {
    if df1 == 0 || df2 == 0 {
        return Err(NumericsError::InvalidDegreesOfFreedom);
    }
    if f.is_nan() || f < 0.0 {
        return Err(NumericsError::InvalidArgument(format!(
            "F statistic must be non-negative, got {f}"
        )));
    }
    if f == 0.0 {
        return Ok(1.0);
    }
    let (d1, d2) = (f64::from(df1), f64::from(df2));
    // P(F > f) = I_{d2/(d2+d1 f)}(d2/2, d1/2)
    let x = if f.is_infinite() { 0.0 } else { d2 / (d2 + d1 * f) };
    regularized_incomplete_beta(0.5 * d2, 0.5 * d1, x)
}
