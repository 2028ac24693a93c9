//! The transformed two-component radial Dirac problem.
//!
//! In the rotated spinor basis the radial equation reads
//!
//! ```text
//! | C + 2αS(W + κ/r)            α(−S/α + C(W + κ/r) − d/dr) | |φ|     |φ|
//! | α(−S/α + C(W + κ/r) + d/dr)  −C                         | |θ| = ε |θ|
//! ```
//!
//! with `S = sin ρ`, `C = cos ρ` and the even potential fixed by
//! `V = (S/α)(W + κ/r)`.

use crate::error::{domain, ensure_finite, Error, Result};
use crate::scalar::Real;

/// Odd radial component `W(r)` of the relativistic potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OddPotential {
    Zero,
    /// `W = strength · r` (the oscillator uses `strength = λ²`).
    Linear {
        strength: f64,
    },
    /// `W = coefficient · exp(−τ r)`.
    Exponential {
        coefficient: f64,
        tau: f64,
    },
    /// `W = coefficient · r^exponent`.
    PowerLaw {
        coefficient: f64,
        exponent: f64,
    },
}

impl OddPotential {
    pub fn eval<T: Real>(&self, r: T) -> T {
        match *self {
            OddPotential::Zero => T::from_f64(0.0),
            OddPotential::Linear { strength } => r.scale(strength),
            OddPotential::Exponential { coefficient, tau } => r.scale(-tau).exp().scale(coefficient),
            OddPotential::PowerLaw { coefficient, exponent } => r.powf(exponent).scale(coefficient),
        }
    }

    /// Analytic `dW/dr`.
    pub fn derivative<T: Real>(&self, r: T) -> T {
        match *self {
            OddPotential::Zero => T::from_f64(0.0),
            OddPotential::Linear { strength } => T::from_f64(strength),
            OddPotential::Exponential { coefficient, tau } => r.scale(-tau).exp().scale(-tau * coefficient),
            OddPotential::PowerLaw { coefficient, exponent } => {
                if exponent == 0.0 {
                    T::from_f64(0.0)
                } else {
                    r.powf(exponent - 1.0).scale(coefficient * exponent)
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            OddPotential::Zero => Ok(()),
            OddPotential::Linear { strength } => ensure_finite("W strength", strength).map(|_| ()),
            OddPotential::Exponential { coefficient, tau } => {
                ensure_finite("W coefficient", coefficient)?;
                ensure_finite("W tau", tau)?;
                Ok(())
            }
            OddPotential::PowerLaw { coefficient, exponent } => {
                ensure_finite("W coefficient", coefficient)?;
                ensure_finite("W exponent", exponent)?;
                Ok(())
            }
        }
    }

    /// Whether `W` may be evaluated at non-positive `r` (the exponential form
    /// lives on the whole line).
    pub fn defined_on_line(&self) -> bool {
        matches!(self, OddPotential::Zero | OddPotential::Linear { .. } | OddPotential::Exponential { .. })
    }
}

/// Parameters `(α, κ, ρ, W)` of the transformed radial Dirac equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativisticPotential {
    alpha: f64,
    kappa: f64,
    sine: f64,
    cosine: f64,
    w: OddPotential,
}

const SINGULAR_COSINE: f64 = 1e-12;

impl RelativisticPotential {
    /// Physical constructor: `κ` a nonzero integer and `ρ ∈ (−π/2, π/2)`.
    pub fn new(alpha: f64, kappa: i32, rho: f64, w: OddPotential) -> Result<Self> {
        if kappa == 0 {
            return Err(domain("kappa must be a nonzero integer"));
        }
        Self::with_real_kappa(alpha, kappa as f64, rho, w)
    }

    /// Accepts real `κ` (including 0): intermediate problems produced by the
    /// transformation engine and the Mörse class need it.
    pub fn with_real_kappa(alpha: f64, kappa: f64, rho: f64, w: OddPotential) -> Result<Self> {
        ensure_finite("rho", rho)?;
        let half_pi = std::f64::consts::FRAC_PI_2;
        if rho.abs() >= half_pi || rho.cos() < SINGULAR_COSINE {
            return Err(Error::Singular(format!(
                "rho = {rho} must lie strictly inside (-pi/2, pi/2) so that cos(rho) != 0"
            )));
        }
        Self::from_sine_cosine(alpha, kappa, rho.sin(), rho.cos(), w)
    }

    /// Construct from `(S, C)` directly. Allows the `C < 0` branch that the
    /// Coulomb class exposes through `C = ±sqrt(1 − S²)`.
    pub fn from_sine_cosine(alpha: f64, kappa: f64, sine: f64, cosine: f64, w: OddPotential) -> Result<Self> {
        ensure_finite("alpha", alpha)?;
        ensure_finite("kappa", kappa)?;
        ensure_finite("sine", sine)?;
        ensure_finite("cosine", cosine)?;
        if !(alpha > 0.0) {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        if cosine.abs() < SINGULAR_COSINE {
            return Err(Error::Singular("cos(rho) = 0".into()));
        }
        if ((sine * sine + cosine * cosine) - 1.0).abs() > 1e-12 {
            return Err(domain(format!("S^2 + C^2 = {} != 1", sine * sine + cosine * cosine)));
        }
        w.validate()?;
        // renormalize so S² + C² = 1 holds to rounding
        let norm = sine.hypot(cosine);
        Ok(Self { alpha, kappa, sine: sine / norm, cosine: cosine / norm, w })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn rho(&self) -> f64 {
        self.sine.atan2(self.cosine)
    }
    pub fn sine(&self) -> f64 {
        self.sine
    }
    pub fn cosine(&self) -> f64 {
        self.cosine
    }
    pub fn tangent(&self) -> f64 {
        self.sine / self.cosine
    }
    pub fn odd(&self) -> OddPotential {
        self.w
    }

    fn check_r(&self, r: f64) -> Result<()> {
        ensure_finite("r", r)?;
        if r <= 0.0 && !(self.kappa == 0.0 && self.w.defined_on_line()) {
            return Err(domain(format!("r must be positive, got {r}")));
        }
        Ok(())
    }

    /// `W(r) + κ/r`; the centrifugal piece is dropped when `κ = 0` so that
    /// line problems can be evaluated at `r ≤ 0`.
    pub fn superpotential<T: Real>(&self, r: T) -> T {
        let w = self.w.eval(r);
        if self.kappa == 0.0 {
            w
        } else {
            w + T::from_f64(self.kappa) / r
        }
    }

    /// `−S/α + C(W + κ/r)`, the non-derivative part of the off-diagonal.
    pub fn off_diagonal<T: Real>(&self, r: T) -> T {
        self.superpotential(r).scale(self.cosine).shift(-self.sine / self.alpha)
    }
}

/// Even component `V(r) = (S/α)(W(r) + κ/r)` fixed by the gauge condition.
pub fn gauge_fixed_even(pot: &RelativisticPotential, r: f64) -> Result<f64> {
    pot.check_r(r)?;
    Ok(pot.sine / pot.alpha * pot.superpotential(r))
}

/// The bracket `F(r)` such that `[−d²/dr² + F(r)] φ = 0` is the second-order
/// equation for the upper component at energy `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePotential {
    pub pot: RelativisticPotential,
    pub energy: f64,
}

impl EffectivePotential {
    pub fn new(pot: RelativisticPotential, energy: f64) -> Self {
        Self { pot, energy }
    }

    /// The seven terms in order: `Cκ(Cκ+1)/r²`, `2κSε/(αr)`, `C²W²`,
    /// `2SεW/α`, `−C dW/dr`, `2κC²W/r`, `−(ε²−1)/α²`.
    pub fn terms(&self, r: f64) -> [f64; 7] {
        let p = &self.pot;
        let (s, c, a, k, e) = (p.sine, p.cosine, p.alpha, p.kappa, self.energy);
        let w = p.w.eval(r);
        let dw = p.w.derivative(r);
        let (centrifugal, coulomb, cross) = if k == 0.0 {
            (0.0, 0.0, 0.0)
        } else {
            (c * k * (c * k + 1.0) / (r * r), 2.0 * k * s * e / (a * r), 2.0 * k * c * c * w / r)
        };
        [centrifugal, coulomb, c * c * w * w, 2.0 * s * e * w / a, -c * dw, cross, -(e * e - 1.0) / (a * a)]
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms(r).iter().sum()
    }

    /// `F` without the constant energy term: the operator whose eigenvalue
    /// is `(ε² − 1)/α²`.
    pub fn without_energy_term(&self, r: f64) -> f64 {
        let t = self.terms(r);
        t[..6].iter().sum()
    }
}

pub fn effective_potential(pot: &RelativisticPotential, energy: f64, r: f64) -> Result<f64> {
    pot.check_r(r)?;
    ensure_finite("energy", energy)?;
    Ok(EffectivePotential::new(*pot, energy).eval(r))
}

/// How `dφ/dr` is obtained when reconstructing the lower component.
pub enum UpperDerivative<'a> {
    Analytic(&'a dyn Fn(f64) -> f64),
    /// Fourth-order central difference with the given step.
    FiniteDifference {
        step: f64,
    },
}

/// Fourth-order central difference.
pub fn central_difference(f: &dyn Fn(f64) -> f64, r: f64, h: f64) -> f64 {
    (-f(r + 2.0 * h) + 8.0 * f(r + h) - 8.0 * f(r - h) + f(r - 2.0 * h)) / (12.0 * h)
}

/// `θ = α/(C+ε) · [−S/α + C(W + κ/r) + d/dr] φ`.
pub fn lower_from_upper<'a>(
    pot: &RelativisticPotential,
    energy: f64,
    phi: &'a dyn Fn(f64) -> f64,
    derivative: UpperDerivative<'a>,
) -> Result<Box<dyn Fn(f64) -> f64 + 'a>> {
    let denom = pot.cosine + energy;
    if denom.abs() < 1e-12 {
        return Err(Error::Singular(format!("C + epsilon = {denom:e}")));
    }
    let pot = *pot;
    let factor = pot.alpha / denom;
    Ok(match derivative {
        UpperDerivative::Analytic(dphi) => Box::new(move |r| factor * (pot.off_diagonal(r) * phi(r) + dphi(r))),
        UpperDerivative::FiniteDifference { step } => {
            Box::new(move |r| factor * (pot.off_diagonal(r) * phi(r) + central_difference(phi, r, step)))
        }
    })
}

/// Both rows of `(H − ε)ψ` at one point, from component values and slopes.
#[allow(clippy::too_many_arguments)]
pub fn dirac_rows(
    pot: &RelativisticPotential,
    energy: f64,
    r: f64,
    phi: f64,
    dphi: f64,
    theta: f64,
    dtheta: f64,
) -> (f64, f64) {
    let a = pot.alpha;
    let g = pot.superpotential(r);
    let off = pot.off_diagonal(r);
    let top = (pot.cosine + 2.0 * a * pot.sine * g - energy) * phi + a * (off * theta - dtheta);
    let bottom = a * (off * phi + dphi) - (pot.cosine + energy) * theta;
    (top, bottom)
}
