//! Generalized Laguerre polynomials, log-gamma and oscillator normalization.

use crate::error::{domain, ensure_finite, Result};
use crate::scalar::Real;

/// Largest Laguerre degree accepted at the public boundary. The upward
/// recurrence loses accuracy for very large degree near the turning point.
pub const MAX_LAGUERRE_DEGREE: u32 = 200;

/// Degree and order of a generalized Laguerre polynomial `L_n^a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParams {
    pub n: u32,
    pub a: f64,
}

impl LaguerreParams {
    pub fn new(n: u32, a: f64) -> Result<Self> {
        if n > MAX_LAGUERRE_DEGREE {
            return Err(domain(format!("Laguerre degree {n} above supported maximum {MAX_LAGUERRE_DEGREE}")));
        }
        ensure_finite("Laguerre order", a)?;
        Ok(Self { n, a })
    }

    /// Orthogonality requires `a > -1`.
    pub fn normalizable(&self) -> bool {
        self.a > -1.0
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        laguerre(self.n, self.a, x)
    }
}

/// `L_n^a(x)` by the upward three-term recurrence.
pub fn laguerre(n: u32, a: f64, x: f64) -> Result<f64> {
    let p = LaguerreParams::new(n, a)?;
    ensure_finite("Laguerre argument", x)?;
    Ok(laguerre_t(p.n, p.a, x))
}

/// Generic recurrence; evaluating on a [`crate::Jet`] yields exact derivatives.
pub fn laguerre_t<T: Real>(n: u32, a: f64, x: T) -> T {
    let one = T::from_f64(1.0);
    if n == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = (-x).shift(1.0 + a);
    for k in 2..=n {
        let kf = k as f64;
        let next = ((-x).shift(2.0 * kf - 1.0 + a) * cur - prev.scale(kf - 1.0 + a)).scale(1.0 / kf);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_{n-1}^a(x)` with the convention `L_{-1}^a ≡ 0`.
pub(crate) fn laguerre_below<T: Real>(n: u32, a: f64, x: T) -> T {
    if n == 0 {
        T::from_f64(0.0)
    } else {
        laguerre_t(n - 1, a, x)
    }
}

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

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn log_gamma(x: f64) -> Result<f64> {
    ensure_finite("log_gamma argument", x)?;
    if x <= 0.0 {
        return Err(domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_pos(x))
}

fn log_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x keeps the Lanczos sum in its accurate range
        return log_gamma_pos(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + sum.ln()
}

/// `a_n = sqrt(2λ Γ(n+1) / Γ(n+κ+3/2))`, the constant normalizing the upper
/// component of the oscillator spinor. Computed in log space.
pub fn norm_const_oscillator(n: u32, kappa: f64, lambda: f64) -> Result<f64> {
    ensure_finite("kappa", kappa)?;
    if !(lambda > 0.0) {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    let top = n as f64 + kappa + 1.5;
    if top <= 0.0 {
        return Err(domain(format!("n + kappa + 3/2 = {top} must be positive")));
    }
    let log_ratio = log_gamma_pos(n as f64 + 1.0) - log_gamma_pos(top);
    Ok((2.0 * lambda).sqrt() * (0.5 * log_ratio).exp())
}

/// `sqrt(Γ(n+1)/Γ(n+b))` in log space, shared by the other catalog constants.
pub(crate) fn gamma_ratio_sqrt(n: u32, b: f64) -> Result<f64> {
    let top = n as f64 + b;
    if top <= 0.0 {
        return Err(domain(format!("gamma argument {top} must be positive")));
    }
    Ok((0.5 * (log_gamma_pos(n as f64 + 1.0) - log_gamma_pos(top))).exp())
}
