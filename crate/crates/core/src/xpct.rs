//! Extended point canonical transformations of the Dirac oscillator.
//!
//! A monotone `r = q(x)` together with `φ(r) = sqrt|q′| φ̂(x)` maps the
//! oscillator reference (`ρ̂ = 0`, parameters `λ, κ̂, α`) onto a new radial
//! Dirac problem. Three families are supported:
//!
//! | family  | `q(x)`          | new class   |
//! |---------|-----------------|-------------|
//! | Square  | `x²`            | Coulomb     |
//! | NegLog  | `−(2/τ) ln x`   | Mörse       |
//! | Power   | `x^{2μ+1}`      | zero energy |

use crate::dirac::{OddPotential, RelativisticPotential};
use crate::error::{domain, ensure_finite, Error, Result};
use crate::scalar::Real;
use crate::solutions::{oscillator_reference, SpinorSolution};

/// Parameter maps, generic so they can be checked in exact arithmetic.
pub mod maps {
    use num_traits::Num;

    fn two<N: Num>() -> N {
        N::one() + N::one()
    }

    fn half<N: Num>() -> N {
        N::one() / two()
    }

    /// Square: `κ = (κ̂ − 1/2)/(2C)`.
    pub fn square_kappa<N: Num + Copy>(kappa_hat: N, c: N) -> N {
        (kappa_hat - half()) / (two::<N>() * c)
    }

    /// Square: `κ̂ = 2σ + 1/2` with `σ = Cκ`.
    pub fn square_kappa_hat<N: Num + Copy>(sigma: N) -> N {
        two::<N>() * sigma + half()
    }

    /// NegLog: `κ̂_n = 2v_n − 1/2`.
    pub fn neglog_kappa_hat<N: Num + Copy>(v: N) -> N {
        two::<N>() * v - half()
    }

    /// NegLog: coefficient of `e^{−τr}` in `W`, `−τλ²/(2C)`.
    pub fn neglog_w_coefficient<N: Num + Copy>(tau: N, lambda2: N, c: N) -> N {
        N::zero() - tau * lambda2 / (two::<N>() * c)
    }

    /// Power: `p = 2μ + 1`.
    pub fn power_p<N: Num + Copy>(mu: N) -> N {
        two::<N>() * mu + N::one()
    }

    /// Power: `β = 1/(μ + 1/2)`.
    pub fn power_beta<N: Num + Copy>(mu: N) -> N {
        N::one() / (mu + half())
    }

    /// Power: `κ = (κ̂ − μ)/((2μ+1)C)`.
    pub fn power_kappa<N: Num + Copy>(kappa_hat: N, mu: N, c: N) -> N {
        (kappa_hat - mu) / (power_p(mu) * c)
    }

    /// Power: `W = λ²/((2μ+1)C) · r^{(1−2μ)/(2μ+1)}`, returned as
    /// `(coefficient, exponent)`.
    pub fn power_w<N: Num + Copy>(lambda2: N, mu: N, c: N) -> (N, N) {
        let p = power_p(mu);
        (lambda2 / (p * c), (N::one() - two::<N>() * mu) / p)
    }

    /// Power, inverse map: `κ̂ = (2κ + 1)/β − 1/2` at `C = 1`.
    pub fn power_kappa_hat<N: Num + Copy>(kappa: N, beta: N) -> N {
        (two::<N>() * kappa + N::one()) / beta - half()
    }

    /// `c` in `½q‴/q′ − ¾(q″/q′)² = c/x²`: `−3/4`, `1/4` and `(1 − p²)/4`.
    pub fn schwarzian_square<N: Num + Copy>() -> N {
        N::zero() - (two::<N>() + N::one()) / (two::<N>() * two::<N>())
    }

    pub fn schwarzian_neglog<N: Num + Copy>() -> N {
        N::one() / (two::<N>() * two::<N>())
    }

    pub fn schwarzian_power<N: Num + Copy>(mu: N) -> N {
        let p = power_p(mu);
        (N::one() - p * p) / (two::<N>() * two::<N>())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Square,
    NegLog { tau: f64 },
    Power { mu: f64 },
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Square => Ok(()),
            Family::NegLog { tau } => {
                ensure_finite("tau", tau)?;
                if tau > 0.0 {
                    Ok(())
                } else {
                    Err(domain(format!("tau must be positive, got {tau}")))
                }
            }
            Family::Power { mu } => {
                ensure_finite("mu", mu)?;
                if mu == 0.0 || mu.abs() == 0.5 {
                    Err(Error::ExcludedParameter(format!("mu = {mu}; the values 0 and ±1/2 are excluded")))
                } else {
                    Ok(())
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Square => "square",
            Family::NegLog { .. } => "neglog",
            Family::Power { .. } => "power",
        }
    }

    pub fn q<T: Real>(&self, x: T) -> T {
        match *self {
            Family::Square => x * x,
            Family::NegLog { tau } => x.ln().scale(-2.0 / tau),
            Family::Power { mu } => x.powf(2.0 * mu + 1.0),
        }
    }

    pub fn dq<T: Real>(&self, x: T) -> T {
        match *self {
            Family::Square => x.scale(2.0),
            Family::NegLog { tau } => T::from_f64(-2.0 / tau) / x,
            Family::Power { mu } => {
                let p = 2.0 * mu + 1.0;
                x.powf(p - 1.0).scale(p)
            }
        }
    }

    /// `q″/q′`.
    pub fn log_derivative_dq(&self, x: f64) -> f64 {
        match *self {
            Family::Square => 1.0 / x,
            Family::NegLog { .. } => -1.0 / x,
            Family::Power { mu } => 2.0 * mu / x,
        }
    }

    /// `c` with `½q‴/q′ − ¾(q″/q′)² = c/x²`.
    pub fn schwarzian_coefficient(&self) -> f64 {
        match *self {
            Family::Square => maps::schwarzian_square(),
            Family::NegLog { .. } => maps::schwarzian_neglog(),
            Family::Power { mu } => maps::schwarzian_power(mu),
        }
    }

    /// `x = q⁻¹(r)` on any [`Real`] argument; no domain checks.
    pub fn inverse_t<T: Real>(&self, r: T) -> T {
        match *self {
            Family::Square => r.sqrt(),
            Family::NegLog { tau } => r.scale(-0.5 * tau).exp(),
            Family::Power { mu } => r.powf(1.0 / (2.0 * mu + 1.0)),
        }
    }

    pub fn inverse(&self, r: f64) -> Result<f64> {
        ensure_finite("r", r)?;
        if !matches!(self, Family::NegLog { .. }) && r <= 0.0 {
            return Err(Error::Inversion(format!("{} family needs r > 0, got {r}", self.name())));
        }
        let x = self.inverse_t(r);
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Inversion(format!("x(r = {r}) = {x}")));
        }
        Ok(x)
    }
}

/// Oscillator reference parameters (`Ŝ = 0`, `Ĉ = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceParams {
    pub lambda: f64,
    pub kappa_hat: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformSpec {
    pub family: Family,
    pub reference: ReferenceParams,
    /// Rotation angle of the new problem. The Power family forces `ρ = 0`.
    pub rho: f64,
}

/// The relation that fixes the new energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectrumRelation {
    /// `(αZ) ε = −N sqrt(1 − ε²)` with `N = n + 1/2 + |σ + 1/2|`, `Z = κS/α`.
    Coulomb { z: f64, sigma: f64 },
    /// `ε² + (Tε − nατ)² = 1`.
    Morse { tangent: f64, alpha_tau: f64 },
    /// `S = 0`, `ε = 1`, `n = 0`.
    ZeroEnergy { beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XpctResult {
    pub kappa: f64,
    pub w: OddPotential,
    pub sine: f64,
    pub cosine: f64,
    /// The constant `K` in `LHS − RHS = K` of the first-order identity.
    pub constant: f64,
    pub spectrum: SpectrumRelation,
}

impl XpctResult {
    pub fn potential(&self, alpha: f64) -> Result<RelativisticPotential> {
        RelativisticPotential::from_sine_cosine(alpha, self.kappa, self.sine, self.cosine, self.w)
    }

    /// `ξ = (ε̂ + Ĉ)/(ε + C)`.
    pub fn xi(&self, energy: f64, reference_energy: f64) -> Result<f64> {
        let d = energy + self.cosine;
        if d.abs() < 1e-12 {
            return Err(Error::Singular(format!("epsilon + C = {d:e}")));
        }
        Ok((reference_energy + 1.0) / d)
    }
}

fn check_reference(r: &ReferenceParams) -> Result<()> {
    ensure_finite("lambda", r.lambda)?;
    ensure_finite("kappa_hat", r.kappa_hat)?;
    ensure_finite("alpha", r.alpha)?;
    if !(r.lambda > 0.0) || !(r.alpha > 0.0) {
        return Err(domain("reference needs lambda > 0 and alpha > 0"));
    }
    Ok(())
}

/// New-problem parameters for `spec`.
///
/// The `1/x` coefficient of the first-order identity fixes `κ`, its
/// constant term fixes `K`, and term matching of the second-order
/// equations fixes the spectrum.
pub fn derive(spec: &TransformSpec) -> Result<XpctResult> {
    spec.family.validate()?;
    check_reference(&spec.reference)?;
    ensure_finite("rho", spec.rho)?;
    let ReferenceParams { lambda, kappa_hat, alpha } = spec.reference;
    let l2 = lambda * lambda;
    match spec.family {
        Family::Square => {
            let (s, c) = angle(spec.rho)?;
            let kappa = maps::square_kappa(kappa_hat, c);
            Ok(XpctResult {
                kappa,
                w: OddPotential::Zero,
                sine: s,
                cosine: c,
                constant: -s / alpha - l2 / 2.0,
                spectrum: SpectrumRelation::Coulomb { z: kappa * s / alpha, sigma: c * kappa },
            })
        }
        Family::NegLog { tau } => {
            let (s, c) = angle(spec.rho)?;
            Ok(XpctResult {
                kappa: 0.0,
                w: OddPotential::Exponential { coefficient: maps::neglog_w_coefficient(tau, l2, c), tau },
                sine: s,
                cosine: c,
                constant: -s / alpha + tau * (kappa_hat + 0.5) / 2.0,
                spectrum: SpectrumRelation::Morse { tangent: s / c, alpha_tau: alpha * tau },
            })
        }
        Family::Power { mu } => {
            if spec.rho != 0.0 {
                return Err(Error::TermMismatch(format!(
                    "an x^p term with p = {} survives unless S = 0 (rho = {})",
                    2.0 * mu + 1.0,
                    spec.rho
                )));
            }
            if kappa_hat + 0.5 >= 0.0 {
                return Err(Error::InconsistentBranch(format!(
                    "the power family needs the n = 0 state of the kappa_hat < -1/2 branch, got kappa_hat = {kappa_hat}"
                )));
            }
            let (coefficient, exponent) = maps::power_w(l2, mu, 1.0);
            Ok(XpctResult {
                kappa: maps::power_kappa(kappa_hat, mu, 1.0),
                w: OddPotential::PowerLaw { coefficient, exponent },
                sine: 0.0,
                cosine: 1.0,
                constant: 0.0,
                spectrum: SpectrumRelation::ZeroEnergy { beta: maps::power_beta(mu) },
            })
        }
    }
}

fn angle(rho: f64) -> Result<(f64, f64)> {
    if !(rho.abs() < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Singular(format!("rho = {rho} must lie inside (-pi/2, pi/2)")));
    }
    Ok((rho.sin(), rho.cos()))
}

/// Pointwise check of the first-order identity.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// Mean of `LHS − RHS` over the samples.
    pub constant: f64,
    /// Variance of the difference relative to the mean square of `LHS`.
    pub relative_variance: f64,
    pub differences: Vec<f64>,
}

pub const IDENTITY_TOLERANCE: f64 = 1e-10;

/// `−S/α + C(W + κ/r)` at `r = q(x)` minus
/// `(1/q′){−Ŝ/α + Ĉ[Ŵ(x) + κ̂/x] − ½q″/q′}` at each sample `x`.
pub fn verify_identity(spec: &TransformSpec, result: &XpctResult, xs: &[f64]) -> Result<IdentityReport> {
    if xs.is_empty() {
        return Err(domain("no sample points"));
    }
    let ReferenceParams { lambda, kappa_hat, alpha } = spec.reference;
    let pot = result.potential(alpha)?;
    let mut lhs_sq = 0.0;
    let mut differences = Vec::with_capacity(xs.len());
    for &x in xs {
        if !(x > 0.0) || !x.is_finite() {
            return Err(domain(format!("sample x = {x} outside (0, inf)")));
        }
        let r = spec.family.q(x);
        let lhs = pot.off_diagonal(r);
        let hat = lambda * lambda * x + kappa_hat / x;
        let rhs = (hat - 0.5 * spec.family.log_derivative_dq(x)) / spec.family.dq(x);
        lhs_sq += lhs * lhs;
        differences.push(lhs - rhs);
    }
    let m = xs.len() as f64;
    let constant = differences.iter().sum::<f64>() / m;
    let var = differences.iter().map(|d| (d - constant).powi(2)).sum::<f64>() / m;
    let scale = (lhs_sq / m).max(f64::MIN_POSITIVE);
    let relative_variance = var / scale;
    if !(relative_variance <= IDENTITY_TOLERANCE) {
        return Err(Error::NonConstant(relative_variance));
    }
    Ok(IdentityReport { constant, relative_variance, differences })
}

/// A monomial `coefficient · x^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub power: f64,
}

/// `Σ c_k x^{p_k}` with distinct powers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Laurent(pub Vec<Monomial>);

impl Laurent {
    fn add(&mut self, coefficient: f64, power: f64) {
        if let Some(m) = self.0.iter_mut().find(|m| (m.power - power).abs() < 1e-12) {
            m.coefficient += coefficient;
        } else {
            self.0.push(Monomial { coefficient, power });
        }
    }

    fn pruned(mut self, scale: f64) -> Self {
        self.0.retain(|m| m.coefficient.abs() > 1e-13 * scale);
        self.0.sort_by(|a, b| a.power.total_cmp(&b.power));
        self
    }

    fn scale(&self) -> f64 {
        self.0.iter().map(|m| m.coefficient.abs()).fold(1.0, f64::max)
    }

    pub fn coefficient(&self, power: f64) -> f64 {
        self.0.iter().find(|m| (m.power - power).abs() < 1e-12).map_or(0.0, |m| m.coefficient)
    }
}

/// One level of the new spectrum with the reference state it comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedLevel {
    pub n: u32,
    pub energy: f64,
    /// Reference oscillator strength and spin-orbit parameter for this level.
    pub lambda_hat: f64,
    pub kappa_hat: f64,
}

impl MappedLevel {
    /// Reference energy `sqrt(1 + α²λ̂²(4n + 2ŝ + 2κ̂))`.
    pub fn reference_energy(&self, alpha: f64) -> f64 {
        let s = 0.5 + (self.kappa_hat + 0.5).abs();
        let l2 = self.lambda_hat * self.lambda_hat;
        (1.0 + alpha * alpha * l2 * (4.0 * self.n as f64 + 2.0 * s + 2.0 * self.kappa_hat)).sqrt()
    }
}

/// `(coefficient, exponent)` pair.
type Term = (f64, f64);

/// `q′² F(q(x))` of the new problem at energy `ε` as a Laurent polynomial.
pub fn transformed_expansion(spec: &TransformSpec, result: &XpctResult, energy: f64) -> Result<Laurent> {
    let alpha = spec.reference.alpha;
    let (s, c, k) = (result.sine, result.cosine, result.kappa);
    // (q′² coefficient, power), 1/q as a monomial, W∘q and W′∘q as monomials
    let (dq2, inv_r): ((f64, f64), Option<(f64, f64)>) = match spec.family {
        Family::Square => ((4.0, 2.0), Some((1.0, -2.0))),
        Family::NegLog { tau } => ((4.0 / (tau * tau), -2.0), None),
        Family::Power { mu } => {
            let p = 2.0 * mu + 1.0;
            ((p * p, 2.0 * p - 2.0), Some((1.0, -p)))
        }
    };
    let as_monomial = |w: OddPotential| -> Result<Option<(Term, Term)>> {
        match (w, spec.family) {
            (OddPotential::Zero, _) => Ok(None),
            (OddPotential::Exponential { coefficient, tau: tw }, Family::NegLog { tau }) => {
                let pw = 2.0 * tw / tau;
                Ok(Some(((coefficient, pw), (-tw * coefficient, pw))))
            }
            (OddPotential::PowerLaw { coefficient, exponent }, Family::Square) => {
                Ok(Some(((coefficient, 2.0 * exponent), (coefficient * exponent, 2.0 * exponent - 2.0))))
            }
            (OddPotential::PowerLaw { coefficient, exponent }, Family::Power { mu }) => {
                let p = 2.0 * mu + 1.0;
                Ok(Some(((coefficient, p * exponent), (coefficient * exponent, p * exponent - p))))
            }
            (OddPotential::Linear { strength }, Family::Square) => Ok(Some(((strength, 2.0), (strength, 0.0)))),
            (OddPotential::Linear { strength }, Family::Power { mu }) => {
                Ok(Some(((strength, 2.0 * mu + 1.0), (strength, 0.0))))
            }
            _ => {
                Err(Error::TermMismatch(format!("W = {w:?} is not a power of x under the {} map", spec.family.name())))
            }
        }
    };
    let wm = as_monomial(result.w)?;
    let mut raw = Laurent::default();
    let e = (energy * energy - 1.0) / (alpha * alpha);
    raw.add(-e, 0.0);
    if k != 0.0 {
        let (ci, pi) =
            inv_r.ok_or_else(|| Error::TermMismatch("kappa/r is not a power of x under the log map".into()))?;
        raw.add(c * k * (c * k + 1.0) * ci * ci, 2.0 * pi);
        raw.add(2.0 * k * s * energy / alpha * ci, pi);
        if let Some(((cw, pw), _)) = wm {
            raw.add(2.0 * k * c * c * cw * ci, pw + pi);
        }
    }
    if let Some(((cw, pw), (cd, pd))) = wm {
        raw.add(c * c * cw * cw, 2.0 * pw);
        raw.add(2.0 * s * energy * cw / alpha, pw);
        raw.add(-c * cd, pd);
    }
    let mut out = Laurent::default();
    for m in &raw.0 {
        out.add(m.coefficient * dq2.0, m.power + dq2.1);
    }
    let scale = out.scale();
    Ok(out.pruned(scale))
}

/// `F̂(x) + c/x²` for the reference at level `n`.
pub fn reference_expansion(spec: &TransformSpec, level: &MappedLevel) -> Laurent {
    let k = level.kappa_hat;
    let l2 = level.lambda_hat * level.lambda_hat;
    let mut out = Laurent::default();
    out.add(k * (k + 1.0) + spec.family.schwarzian_coefficient(), -2.0);
    out.add(l2 * l2, 2.0);
    out.add(-l2 * (4.0 * level.n as f64 + 2.0 * (k + 0.5).abs() + 2.0), 0.0);
    let scale = out.scale();
    out.pruned(scale)
}

/// Compares the two expansions power by power.
pub fn check_term_balance(spec: &TransformSpec, result: &XpctResult, level: &MappedLevel) -> Result<f64> {
    let lhs = transformed_expansion(spec, result, level.energy)?;
    let rhs = reference_expansion(spec, level);
    let scale = lhs.scale().max(rhs.scale());
    let mut worst: f64 = 0.0;
    for m in lhs.0.iter().chain(&rhs.0) {
        let d = (lhs.coefficient(m.power) - rhs.coefficient(m.power)).abs() / scale;
        if d > 1e-10 {
            return Err(Error::TermMismatch(format!(
                "x^{}: transformed {} vs reference {}",
                m.power,
                lhs.coefficient(m.power),
                rhs.coefficient(m.power)
            )));
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Level `n` of the new problem from term matching, checked against the
/// full expansion.
pub fn mapped_level(spec: &TransformSpec, result: &XpctResult, n: u32) -> Result<MappedLevel> {
    let alpha = spec.reference.alpha;
    let level = match result.spectrum {
        SpectrumRelation::Coulomb { z, sigma } => {
            // x²: λ̂⁴ = −4E; x⁰: 8κSε/α = −λ̂²·4N
            let big_n = n as f64 + 0.5 + (sigma + 0.5).abs();
            let az = alpha * z;
            if !(az < 0.0) {
                return Err(Error::NoBoundState(format!("alpha Z = {az} must be negative")));
            }
            let energy = 1.0 / (1.0 + (az / big_n).powi(2)).sqrt();
            let lambda_hat2 = 2.0 * (1.0 - energy * energy).sqrt() / alpha;
            MappedLevel { n, energy, lambda_hat: lambda_hat2.sqrt(), kappa_hat: maps::square_kappa_hat(sigma) }
        }
        SpectrumRelation::Morse { tangent, alpha_tau } => {
            // x⁻²: (κ̂+1/2)² = −4E/τ²; x⁰: κ̂ + 1/2 = 2(Tε/(ατ) − n)
            let x = n as f64 * alpha_tau;
            let c2 = 1.0 / (1.0 + tangent * tangent);
            let disc = 1.0 + tangent * tangent - x * x;
            if disc < 0.0 {
                return Err(Error::LevelCount {
                    n,
                    n_max: ((1.0 + tangent * tangent).sqrt() / alpha_tau).floor() as u32,
                });
            }
            let energy = c2 * (tangent * x + disc.sqrt());
            let v = tangent * energy / alpha_tau - n as f64;
            if v <= 1e-12 {
                return Err(Error::NonNormalizable(format!("v_{n} = {v} <= 0")));
            }
            MappedLevel { n, energy, lambda_hat: spec.reference.lambda, kappa_hat: maps::neglog_kappa_hat(v) }
        }
        SpectrumRelation::ZeroEnergy { .. } => {
            if n != 0 {
                return Err(Error::LevelCount { n, n_max: 0 });
            }
            MappedLevel { n: 0, energy: 1.0, lambda_hat: spec.reference.lambda, kappa_hat: spec.reference.kappa_hat }
        }
    };
    check_term_balance(spec, result, &level)?;
    Ok(level)
}

/// The transformed spinor `φ = sqrt|q′| φ̂(x)`,
/// `θ = sgn(q′)(ξ/sqrt|q′|) θ̂(x) + αK/(C+ε) φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappedSpinor {
    family: Family,
    reference: SpinorSolution,
    potential: RelativisticPotential,
    energy: f64,
    xi: f64,
    shift: f64,
    sign: f64,
}

impl MappedSpinor {
    pub fn energy(&self) -> f64 {
        self.energy
    }
    pub fn potential(&self) -> &RelativisticPotential {
        &self.potential
    }
    pub fn reference(&self) -> &SpinorSolution {
        &self.reference
    }
    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn phi<T: Real>(&self, r: T) -> T {
        let x = self.family.inverse_t(r);
        self.family.dq(x).abs().sqrt() * self.reference.phi(x)
    }

    pub fn theta<T: Real>(&self, r: T) -> T {
        let x = self.family.inverse_t(r);
        let g = self.family.dq(x).abs().sqrt();
        (self.reference.theta(x) / g).scale(self.sign * self.xi) + (g * self.reference.phi(x)).scale(self.shift)
    }
}

/// The oscillator state that level `n` of the new problem is mapped from.
pub fn reference_for_level(spec: &TransformSpec, result: &XpctResult, n: u32) -> Result<(MappedLevel, SpinorSolution)> {
    let level = mapped_level(spec, result, n)?;
    let reference = oscillator_reference(n, level.kappa_hat, level.lambda_hat, spec.reference.alpha)?;
    Ok((level, reference))
}

pub fn map_wavefunctions(spec: &TransformSpec, result: &XpctResult, n: u32) -> Result<MappedSpinor> {
    let (level, reference) = reference_for_level(spec, result, n)?;
    let alpha = spec.reference.alpha;
    let potential = result.potential(alpha)?;
    let xi = result.xi(level.energy, reference.energy())?;
    // K depends on the level through κ̂_n for the log family
    let k = match spec.family {
        Family::NegLog { tau } => -result.sine / alpha + tau * (level.kappa_hat + 0.5) / 2.0,
        Family::Square => -result.sine / alpha - level.lambda_hat * level.lambda_hat / 2.0,
        Family::Power { .. } => result.constant,
    };
    let sign = match spec.family {
        Family::NegLog { .. } => -1.0,
        Family::Square => 1.0,
        Family::Power { mu } => (2.0 * mu + 1.0).signum(),
    };
    Ok(MappedSpinor {
        family: spec.family,
        reference,
        potential,
        energy: level.energy,
        xi,
        shift: alpha * k / (result.cosine + level.energy),
        sign,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dirac_residual, RadialGrid};
    use crate::scalar::Jet;
    use crate::solutions::{
        coulomb_solution, morse_solution, zero_energy_solution, CosineBranch, CoulombParams, MorseParams,
        ZeroEnergyParams,
    };
    use num_rational::Ratio;
    use std::f64::consts::FRAC_PI_4;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn samples() -> Vec<f64> {
        (0..50).map(|i| 0.5 + 4.5 * i as f64 / 49.0).collect()
    }

    fn spec(family: Family, lambda: f64, kappa_hat: f64, alpha: f64, rho: f64) -> TransformSpec {
        TransformSpec { family, reference: ReferenceParams { lambda, kappa_hat, alpha }, rho }
    }

    #[test]
    fn parameter_maps_in_exact_arithmetic() {
        assert_eq!(maps::square_kappa(q(2, 1), q(1, 1)), q(3, 4));
        assert_eq!(maps::square_kappa_hat(q(-3, 2)), q(-5, 2));
        assert_eq!(maps::square_kappa(maps::square_kappa_hat(q(7, 3)), q(1, 1)), q(7, 3));
        assert_eq!(maps::neglog_w_coefficient(q(1, 1), q(1, 1), q(1, 1)), q(-1, 2));
        assert_eq!(maps::neglog_kappa_hat(q(3, 4)), q(1, 1));
        assert_eq!(maps::power_beta(q(-1, 1)), q(-2, 1));
        assert_eq!(maps::power_w(q(1, 1), q(-1, 1), q(1, 1)), (q(-1, 1), q(-3, 1)));
        assert_eq!(maps::power_kappa_hat(q(1, 1), q(-2, 1)), q(-2, 1));
        assert_eq!(maps::power_kappa(q(-2, 1), q(-1, 1), q(1, 1)), q(1, 1));
        for (kappa, beta) in [(q(-1, 1), q(3, 1)), (q(-3, 1), q(5, 2)), (q(2, 1), q(-1, 2))] {
            let mu = q(-1, 2) + q(1, 1) / beta;
            assert_eq!(maps::power_beta(mu), beta);
            assert_eq!(maps::power_kappa(maps::power_kappa_hat(kappa, beta), mu, q(1, 1)), kappa);
            // W exponent is β − 1
            assert_eq!(maps::power_w(q(1, 1), mu, q(1, 1)).1, beta - q(1, 1));
        }
        assert_eq!(maps::schwarzian_square::<Q>(), q(-3, 4));
        assert_eq!(maps::schwarzian_neglog::<Q>(), q(1, 4));
        assert_eq!(maps::schwarzian_power(q(-1, 1)), q(0, 1));
        assert_eq!(maps::schwarzian_power(q(1, 1)), q(-2, 1));
    }

    #[test]
    fn schwarzian_matches_derivatives() {
        for fam in [Family::Square, Family::NegLog { tau: 0.7 }, Family::Power { mu: -1.3 }] {
            for &x in &[0.4, 1.1, 2.5] {
                let (_, d1) = {
                    let j = fam.q(Jet::variable(x));
                    (j.v, j.d1)
                };
                let j = fam.dq(Jet::variable(x));
                let s = 0.5 * j.d2 / j.v - 0.75 * (j.d1 / j.v).powi(2);
                assert!((d1 - j.v).abs() < 1e-12 * j.v.abs());
                assert!((s * x * x - fam.schwarzian_coefficient()).abs() < 1e-12, "{fam:?}");
                assert!((j.d1 / j.v - fam.log_derivative_dq(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn derive_examples() {
        let r = derive(&spec(Family::Square, 1.0, 2.0, 1.0, 0.0)).unwrap();
        assert_eq!(r.kappa, 0.75);
        assert_eq!(r.w, OddPotential::Zero);
        let r = derive(&spec(Family::NegLog { tau: 1.0 }, 1.0, 0.0, 1.0, 0.0)).unwrap();
        assert_eq!(r.kappa, 0.0);
        assert_eq!(r.w, OddPotential::Exponential { coefficient: -0.5, tau: 1.0 });
        let r = derive(&spec(Family::Power { mu: -1.0 }, 1.0, -2.0, 1.0, 0.0)).unwrap();
        assert_eq!(r.w, OddPotential::PowerLaw { coefficient: -1.0, exponent: -3.0 });
        assert_eq!(r.kappa, 1.0);
        assert!(matches!(
            derive(&spec(Family::Power { mu: 0.5 }, 1.0, -2.0, 1.0, 0.0)),
            Err(Error::ExcludedParameter(_))
        ));
        assert!(matches!(
            derive(&spec(Family::Power { mu: 0.0 }, 1.0, -2.0, 1.0, 0.0)),
            Err(Error::ExcludedParameter(_))
        ));
        assert!(matches!(
            derive(&spec(Family::Power { mu: -1.0 }, 1.0, 1.0, 1.0, 0.0)),
            Err(Error::InconsistentBranch(_))
        ));
        assert!(matches!(derive(&spec(Family::Power { mu: -1.0 }, 1.0, -2.0, 1.0, 0.3)), Err(Error::TermMismatch(_))));
    }

    #[test]
    fn identity_differences_are_constant() {
        let cases = [
            (spec(Family::Square, 1.3, 2.0, 0.5, 0.4), -0.4f64.sin() / 0.5 - 1.69 / 2.0),
            (spec(Family::NegLog { tau: 0.8 }, 1.1, 1.5, 0.3, FRAC_PI_4), -FRAC_PI_4.sin() / 0.3 + 0.8 * 2.0 / 2.0),
            (spec(Family::Power { mu: -1.0 }, 1.2, -2.0, 1.0, 0.0), 0.0),
            (spec(Family::Power { mu: -1.0 / 6.0 }, 0.9, -5.0 / 6.0, 1.0, 0.0), 0.0),
        ];
        for (s, k) in cases {
            let r = derive(&s).unwrap();
            let rep = verify_identity(&s, &r, &samples()).unwrap();
            assert!(rep.relative_variance <= 1e-12, "{s:?}: {}", rep.relative_variance);
            assert!((rep.constant - k).abs() < 1e-12, "{s:?}: {} vs {k}", rep.constant);
            assert!((rep.constant - r.constant).abs() < 1e-12);
            // a wrong κ leaves a 1/x² (or x^{−p}) term behind
            if r.kappa != 0.0 {
                let wrong = XpctResult { kappa: r.kappa + 0.1, ..r };
                assert!(matches!(verify_identity(&s, &wrong, &samples()), Err(Error::NonConstant(_))));
            }
        }
    }

    #[test]
    fn inverse_round_trips() {
        for fam in [Family::Square, Family::NegLog { tau: 2.0 }, Family::Power { mu: 0.8 }, Family::Power { mu: -1.5 }]
        {
            for x in samples() {
                let back = fam.inverse(fam.q(x)).unwrap();
                assert!((back - x).abs() < 1e-12 * x, "{fam:?}");
            }
        }
        assert!(matches!(Family::Square.inverse(-1.0), Err(Error::Inversion(_))));
        assert!(Family::NegLog { tau: 1.0 }.inverse(-3.0).is_ok());
    }

    #[test]
    fn spectra_reproduce_catalog() {
        let (alpha, z) = (0.5, -1.0);
        for (kappa, branch) in [(-1, CosineBranch::Positive), (2, CosineBranch::Positive)] {
            let p = CoulombParams::new(z, kappa, alpha, branch).unwrap();
            let rho = p.sine().asin();
            let s = spec(Family::Square, 1.0, maps::square_kappa_hat(p.sigma()), alpha, rho);
            let r = derive(&s).unwrap();
            assert!((r.kappa - kappa as f64).abs() < 1e-14);
            for n in 0..4 {
                let lvl = mapped_level(&s, &r, n).unwrap();
                assert!((lvl.energy - p.energy(n)).abs() < 1e-14);
                assert!((lvl.lambda_hat.powi(2) - p.scale(n)).abs() < 1e-12);
            }
        }
        let m = MorseParams::new(1.0, FRAC_PI_4, 1.0, 0.1).unwrap();
        let s = spec(Family::NegLog { tau: 1.0 }, 1.0, 0.0, 0.1, FRAC_PI_4);
        let r = derive(&s).unwrap();
        for n in 0..10 {
            let lvl = mapped_level(&s, &r, n).unwrap();
            assert!((lvl.energy - m.energy(n).unwrap()).abs() < 1e-13);
            let x = m.tangent() * lvl.energy - n as f64 * 0.1;
            assert!((lvl.energy.powi(2) + x * x - 1.0).abs() < 1e-12);
        }
        assert!(matches!(mapped_level(&s, &r, 11), Err(Error::NonNormalizable(_))));
        let s = spec(Family::Power { mu: -1.0 }, 1.0, -2.0, 1.0, 0.0);
        let r = derive(&s).unwrap();
        let lvl = mapped_level(&s, &r, 0).unwrap();
        assert_eq!((lvl.n, lvl.energy, r.sine), (0, 1.0, 0.0));
        assert!(mapped_level(&s, &r, 1).is_err());
    }

    #[test]
    fn term_balance_rejects_wrong_energy() {
        let s = spec(Family::NegLog { tau: 1.0 }, 1.0, 0.0, 0.1, FRAC_PI_4);
        let r = derive(&s).unwrap();
        let mut lvl = mapped_level(&s, &r, 2).unwrap();
        lvl.energy *= 1.001;
        assert!(matches!(check_term_balance(&s, &r, &lvl), Err(Error::TermMismatch(_))));
    }

    fn assert_proportional<F: Fn(f64) -> f64, G: Fn(f64) -> f64>(a: F, b: G, rs: &[f64]) {
        let peak = rs.iter().map(|&r| b(r).abs()).fold(0.0, f64::max);
        let ratios: Vec<f64> = rs.iter().filter(|&&r| b(r).abs() > 1e-6 * peak).map(|&r| a(r) / b(r)).collect();
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let var = ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / ratios.len() as f64;
        assert!(var / (mean * mean) < 1e-10, "ratio variance {}", var / (mean * mean));
    }

    #[test]
    fn mapped_spinors_match_catalog() {
        let (alpha, z) = (0.5, -1.0);
        let p = CoulombParams::new(z, -1, alpha, CosineBranch::Positive).unwrap();
        let s = spec(Family::Square, 1.0, maps::square_kappa_hat(p.sigma()), alpha, p.sine().asin());
        let r = derive(&s).unwrap();
        for n in 0..4 {
            let m = map_wavefunctions(&s, &r, n).unwrap();
            let c = coulomb_solution(n, p).unwrap();
            let rs: Vec<f64> = (1..400).map(|i| i as f64 * 0.05).collect();
            assert_proportional(|x| m.phi(x), |x| c.phi(x), &rs);
            let k = m.phi(1.3) / c.phi(1.3);
            for &x in &rs {
                assert!((m.theta(x) - k * c.theta(x)).abs() < 1e-10 * k.abs().max(1.0));
            }
        }
        let mp = MorseParams::new(1.0, FRAC_PI_4, 1.0, 0.1).unwrap();
        let s = spec(Family::NegLog { tau: 1.0 }, 1.0, 0.0, 0.1, FRAC_PI_4);
        let r = derive(&s).unwrap();
        for n in 0..4 {
            let m = map_wavefunctions(&s, &r, n).unwrap();
            let c = morse_solution(n, mp).unwrap();
            let rs: Vec<f64> = (0..400).map(|i| -3.0 + i as f64 * 0.05).collect();
            assert_proportional(|x| m.phi(x), |x| c.phi(x), &rs);
            let k = m.phi(0.3) / c.phi(0.3);
            for &x in &rs {
                assert!((m.theta(x) - k * c.theta(x)).abs() < 1e-10 * k.abs().max(1.0), "n={n} r={x}");
            }
        }
        for (l, beta) in [(1u32, -2.0), (0, 3.0)] {
            let zp = ZeroEnergyParams::new(l, beta, 1.2, 1.0).unwrap();
            let mu = -0.5 + 1.0 / beta;
            let s = spec(Family::Power { mu }, 1.2, maps::power_kappa_hat(zp.kappa(), beta), 1.0, 0.0);
            let r = derive(&s).unwrap();
            assert!((r.kappa - zp.kappa()).abs() < 1e-14);
            let m = map_wavefunctions(&s, &r, 0).unwrap();
            let c = zero_energy_solution(zp).unwrap();
            let rs: Vec<f64> = (1..200).map(|i| i as f64 * 0.03).collect();
            assert_proportional(|x| m.phi(x), |x| c.phi(x), &rs);
            assert!(rs.iter().all(|&x| m.theta(x) == 0.0));
        }
    }

    #[test]
    fn mapped_spinors_solve_first_order_system() {
        let cases = [
            (spec(Family::Square, 1.0, -1.2, 0.5, 0.5f64.asin()), RadialGrid::log_mapped(1e-6, 80.0, 4000).unwrap()),
            (spec(Family::NegLog { tau: 1.0 }, 1.0, 0.0, 0.1, FRAC_PI_4), RadialGrid::line(-4.0, 40.0, 4000).unwrap()),
            (spec(Family::Power { mu: -1.0 }, 1.0, -2.0, 1.0, 0.0), RadialGrid::log_mapped(1e-3, 1e6, 4000).unwrap()),
        ];
        for (s, grid) in cases {
            let r = derive(&s).unwrap();
            let top = if matches!(s.family, Family::Power { .. }) { 0 } else { 3 };
            for n in 0..=top {
                let m = map_wavefunctions(&s, &r, n).unwrap();
                let phi = |x: Jet<f64>| m.phi(x);
                let theta = |x: Jet<f64>| m.theta(x);
                let res = dirac_residual(m.potential(), m.energy(), &phi, &theta, &grid).unwrap();
                assert!(res.below(1e-8), "{:?} n={n}: {res:?}", s.family);
                // ξ is the ratio that makes the second row hold without the K shift
                assert!((m.xi() - (m.reference().energy() + 1.0) / (m.energy() + r.cosine)).abs() < 1e-14);
            }
        }
    }
}
