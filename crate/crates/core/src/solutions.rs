//! Closed-form bound states: Dirac oscillator, Dirac-Coulomb, Dirac-Mörse
//! and the zero-energy power-law class.
//!
//! Every solution carries its relativistic potential, its energy and a
//! closed-form profile that evaluates on any [`Real`] type, so jets give
//! exact radial derivatives.

use crate::dirac::{OddPotential, RelativisticPotential};
use crate::error::{domain, ensure_finite, Error, Result};
use crate::scalar::{derivatives, Real};
use crate::specialfn::{gamma_ratio_sqrt, laguerre_below, laguerre_t, log_gamma, MAX_LAGUERRE_DEGREE};

/// Which sign of `C = ±sqrt(1 − S²)` a Coulomb configuration uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CosineBranch {
    #[default]
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub kappa: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl OscillatorParams {
    pub fn new(kappa: f64, lambda: f64, alpha: f64) -> Result<Self> {
        ensure_finite("kappa", kappa)?;
        ensure_finite("lambda", lambda)?;
        if !(lambda > 0.0) || !(alpha > 0.0) {
            return Err(domain("oscillator needs lambda > 0 and alpha > 0"));
        }
        Ok(Self { kappa, lambda, alpha })
    }

    /// Small-`r` exponent `s = 1/2 + |κ + 1/2|` of the upper component.
    pub fn exponent(&self) -> f64 {
        0.5 + (self.kappa + 0.5).abs()
    }

    /// `l` for integer `κ`: `κ = l` or `κ = −l − 1`.
    pub fn orbital(&self) -> Option<u32> {
        integer_kappa_to_l(self.kappa)
    }

    /// `(ε² − 1)/α² = λ²(4n + 2s + 2κ)`, i.e. `2λ²(2n + l + κ + 1)`.
    pub fn eigenvalue(&self, n: u32) -> f64 {
        let s = self.exponent();
        self.lambda * self.lambda * (4.0 * n as f64 + 2.0 * s + 2.0 * self.kappa)
    }

    pub fn energy(&self, n: u32) -> f64 {
        (1.0 + self.alpha * self.alpha * self.eigenvalue(n)).sqrt()
    }
}

fn integer_kappa_to_l(kappa: f64) -> Option<u32> {
    if kappa.fract() != 0.0 || kappa.abs() > u32::MAX as f64 / 2.0 {
        return None;
    }
    Some(if kappa >= 0.0 { kappa as u32 } else { (-kappa - 1.0) as u32 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoulombParams {
    pub z: f64,
    pub kappa: i32,
    pub alpha: f64,
    pub branch: CosineBranch,
}

impl CoulombParams {
    pub fn new(z: f64, kappa: i32, alpha: f64, branch: CosineBranch) -> Result<Self> {
        ensure_finite("Z", z)?;
        ensure_finite("alpha", alpha)?;
        if kappa == 0 {
            return Err(domain("Coulomb needs a nonzero integer kappa"));
        }
        if !(alpha > 0.0) {
            return Err(domain("alpha must be positive"));
        }
        let az = alpha * z;
        if az.abs() >= (kappa as f64).abs() {
            return Err(Error::Supercritical { alpha_z: az.abs(), kappa: (kappa as f64).abs() });
        }
        Ok(Self { z, kappa, alpha, branch })
    }

    pub fn sine(&self) -> f64 {
        self.alpha * self.z / self.kappa as f64
    }

    pub fn cosine(&self) -> f64 {
        let s = self.sine();
        let c = (1.0 - s * s).sqrt();
        match self.branch {
            CosineBranch::Positive => c,
            CosineBranch::Negative => -c,
        }
    }

    /// `σ = κC`.
    pub fn sigma(&self) -> f64 {
        self.kappa as f64 * self.cosine()
    }

    /// Small-`r` exponent `s = 1/2 + |σ + 1/2|`.
    pub fn exponent(&self) -> f64 {
        0.5 + (self.sigma() + 0.5).abs()
    }

    /// Effective principal number `N = n + s`.
    pub fn principal(&self, n: u32) -> f64 {
        n as f64 + self.exponent()
    }

    pub fn energy(&self, n: u32) -> f64 {
        let q = self.alpha * self.z / self.principal(n);
        1.0 / (1.0 + q * q).sqrt()
    }

    /// `μ_n = −2Zε_n/N`.
    pub fn scale(&self, n: u32) -> f64 {
        -2.0 * self.z * self.energy(n) / self.principal(n)
    }

    pub fn potential(&self) -> Result<RelativisticPotential> {
        RelativisticPotential::from_sine_cosine(
            self.alpha,
            self.kappa as f64,
            self.sine(),
            self.cosine(),
            OddPotential::Zero,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseParams {
    pub tau: f64,
    pub rho: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl MorseParams {
    pub fn new(tau: f64, rho: f64, lambda: f64, alpha: f64) -> Result<Self> {
        for (name, v) in [("tau", tau), ("rho", rho), ("lambda", lambda), ("alpha", alpha)] {
            ensure_finite(name, v)?;
        }
        if !(tau > 0.0) || !(lambda > 0.0) || !(alpha > 0.0) {
            return Err(domain("Mörse needs tau, lambda, alpha > 0"));
        }
        if !(rho.abs() < std::f64::consts::FRAC_PI_2) {
            return Err(Error::Singular(format!("rho = {rho} must lie inside (-pi/2, pi/2)")));
        }
        Ok(Self { tau, rho, lambda, alpha })
    }

    pub fn tangent(&self) -> f64 {
        self.rho.tan()
    }

    /// Largest `n` with `nατC ≤ 1`, i.e. `⌊sqrt(1 + T²)/(ατ)⌋`.
    pub fn n_max(&self) -> u32 {
        let bound = 1.0 / (self.alpha * self.tau * self.rho.cos());
        let nearest = bound.round();
        let floor = if (bound - nearest).abs() <= 1e-9 * bound { nearest } else { bound.floor() };
        floor.min(u32::MAX as f64) as u32
    }

    /// `φ_n = ρ − arcsin(nατC)`.
    pub fn angle(&self, n: u32) -> Result<f64> {
        if n > self.n_max() {
            return Err(Error::LevelCount { n, n_max: self.n_max() });
        }
        let x = (n as f64 * self.alpha * self.tau * self.rho.cos()).min(1.0);
        Ok(self.rho - x.asin())
    }

    pub fn energy(&self, n: u32) -> Result<f64> {
        self.angle(n).map(f64::cos)
    }

    /// `v_n = Tε_n/(ατ) − n`.
    pub fn exponent(&self, n: u32) -> Result<f64> {
        let e = self.energy(n)?;
        Ok(self.tangent() * e / (self.alpha * self.tau) - n as f64)
    }

    /// Checks both the level bound and the normalizability cut `v_n > 0`.
    pub fn admit(&self, n: u32) -> Result<f64> {
        let v = self.exponent(n)?;
        if v <= 1e-12 {
            return Err(Error::NonNormalizable(format!("v_{n} = {v:.6} <= 0")));
        }
        Ok(v)
    }

    pub fn potential(&self) -> Result<RelativisticPotential> {
        let c = self.rho.cos();
        let w =
            OddPotential::Exponential { coefficient: -self.tau * self.lambda * self.lambda / (2.0 * c), tau: self.tau };
        RelativisticPotential::with_real_kappa(self.alpha, 0.0, self.rho, w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroEnergyParams {
    pub l: u32,
    pub beta: f64,
    pub lambda: f64,
    pub alpha: f64,
}

impl ZeroEnergyParams {
    pub fn new(l: u32, beta: f64, lambda: f64, alpha: f64) -> Result<Self> {
        ensure_finite("beta", beta)?;
        ensure_finite("lambda", lambda)?;
        if beta == 0.0 || beta == 1.0 || beta == 2.0 {
            return Err(Error::ExcludedParameter(format!(
                "beta = {beta}: the values 0, 1 and 2 belong to other classes"
            )));
        }
        if !(lambda > 0.0) || !(alpha > 0.0) {
            return Err(domain("zero-energy class needs lambda > 0 and alpha > 0"));
        }
        Ok(Self { l, beta, lambda, alpha })
    }

    /// `κ = l` for `β < 0`, `κ = −l − 1` for `β > 0`.
    pub fn kappa(&self) -> f64 {
        if self.beta < 0.0 {
            self.l as f64
        } else {
            -(self.l as f64) - 1.0
        }
    }

    /// `μ = −1/2 + 1/β`.
    pub fn mu(&self) -> f64 {
        -0.5 + 1.0 / self.beta
    }

    /// `λ^{2/β}`.
    pub fn length_scale(&self) -> f64 {
        self.lambda.powf(2.0 / self.beta)
    }

    /// `(1 − 2κ)/β`: the gamma-function argument of the norm integral.
    fn norm_argument(&self) -> f64 {
        (1.0 - 2.0 * self.kappa()) / self.beta
    }

    pub fn normalizable(&self) -> bool {
        self.norm_argument() > 0.0
    }

    pub fn potential(&self) -> Result<RelativisticPotential> {
        let w = OddPotential::PowerLaw {
            coefficient: self.beta * self.lambda * self.lambda / 2.0,
            exponent: self.beta - 1.0,
        };
        RelativisticPotential::with_real_kappa(self.alpha, self.kappa(), 0.0, w)
    }
}

/// A catalog class with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassParams {
    Oscillator(OscillatorParams),
    Coulomb(CoulombParams),
    Morse(MorseParams),
    ZeroEnergy(ZeroEnergyParams),
}

impl ClassParams {
    pub fn tag(&self) -> &'static str {
        match self {
            ClassParams::Oscillator(_) => "oscillator",
            ClassParams::Coulomb(_) => "coulomb",
            ClassParams::Morse(_) => "morse",
            ClassParams::ZeroEnergy(_) => "zero-energy",
        }
    }
}

/// Closed forms of the two components.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Profile {
    /// `u = λ²r²`; `lowered` selects the `κ < −1/2` branch.
    Oscillator { n: u32, lambda: f64, s: f64, a: f64, theta_scale: f64, lowered: bool },
    /// `x = μr`.
    Coulomb { n: u32, mu: f64, s: f64, a: f64, theta_scale: f64, sigma: f64, slope: f64 },
    /// `y = λ²e^{−τr}`.
    Morse { n: u32, lambda2: f64, tau: f64, v: f64, a: f64, theta_scale: f64, c0: f64, c1: f64 },
    /// `(kr)^{−κ} e^{−λ²r^β/2}`; the lower component vanishes.
    ZeroEnergy { k: f64, kappa: f64, lambda2: f64, beta: f64, a: f64 },
}

impl Profile {
    fn phi<T: Real>(&self, r: T) -> T {
        match *self {
            Profile::Oscillator { n, lambda, s, a, .. } => {
                let u = (r * r).scale(lambda * lambda);
                r.scale(lambda).powf(s) * u.scale(-0.5).exp() * laguerre_t(n, s - 0.5, u).scale(a)
            }
            Profile::Coulomb { n, mu, s, a, .. } => {
                let x = r.scale(mu);
                x.powf(s) * x.scale(-0.5).exp() * laguerre_t(n, 2.0 * s - 1.0, x).scale(a)
            }
            Profile::Morse { n, lambda2, tau, v, a, .. } => {
                let y = r.scale(-tau).exp().scale(lambda2);
                // y^v = λ^{2v} e^{−vτr}, evaluated without forming y^v at large r
                r.scale(-v * tau).exp().scale(a * lambda2.powf(v)) * y.scale(-0.5).exp() * laguerre_t(n, 2.0 * v, y)
            }
            Profile::ZeroEnergy { k, kappa, lambda2, beta, a } => {
                r.scale(k).powf(-kappa).scale(a) * r.powf(beta).scale(-0.5 * lambda2).exp()
            }
        }
    }

    fn theta<T: Real>(&self, r: T) -> T {
        match *self {
            Profile::Oscillator { n, lambda, s, theta_scale, lowered, .. } => {
                let u = (r * r).scale(lambda * lambda);
                let g = u.scale(-0.5).exp();
                if lowered {
                    r.scale(lambda).powf(s + 1.0) * g * laguerre_below(n, s + 0.5, u).scale(theta_scale)
                } else {
                    r.scale(lambda).powf(s - 1.0) * g * laguerre_t(n, s - 1.5, u).scale(theta_scale)
                }
            }
            Profile::Coulomb { n, mu, s, theta_scale, sigma, slope, .. } => {
                let x = r.scale(mu);
                let b = 2.0 * s - 1.0;
                let bracket = x.scale(-slope).shift(sigma + s + n as f64) * laguerre_t(n, b, x)
                    - laguerre_below(n, b, x).scale(n as f64 + b);
                x.powf(s - 1.0) * x.scale(-0.5).exp() * bracket.scale(theta_scale)
            }
            Profile::Morse { n, lambda2, tau, v, theta_scale, c0, c1, .. } => {
                let y = r.scale(-tau).exp().scale(lambda2);
                let bracket = laguerre_t(n, 2.0 * v, y).scale(c0) + laguerre_below(n, 2.0 * v, y).scale(c1);
                r.scale(-v * tau).exp().scale(theta_scale * lambda2.powf(v)) * y.scale(-0.5).exp() * bracket
            }
            Profile::ZeroEnergy { .. } => T::from_f64(0.0),
        }
    }
}

/// A bound state of one catalog class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorSolution {
    n: u32,
    energy: f64,
    params: ClassParams,
    potential: RelativisticPotential,
    profile: Profile,
}

impl SpinorSolution {
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn energy(&self) -> f64 {
        self.energy
    }
    pub fn params(&self) -> ClassParams {
        self.params
    }
    pub fn class_tag(&self) -> &'static str {
        self.params.tag()
    }
    pub fn potential(&self) -> &RelativisticPotential {
        &self.potential
    }
    /// `(ε² − 1)/α²`, the eigenvalue of the second-order operator.
    pub fn eigenvalue(&self) -> f64 {
        let a = self.potential.alpha();
        (self.energy * self.energy - 1.0) / (a * a)
    }

    /// Upper component on any [`Real`] argument.
    pub fn phi<T: Real>(&self, r: T) -> T {
        self.profile.phi(r)
    }

    /// Lower component on any [`Real`] argument.
    pub fn theta<T: Real>(&self, r: T) -> T {
        self.profile.theta(r)
    }

    /// Analytic `dφ/dr`.
    pub fn dphi(&self, r: f64) -> f64 {
        derivatives(|x| self.profile.phi(x), r).1
    }
}

fn check_degree(n: u32) -> Result<()> {
    if n > MAX_LAGUERRE_DEGREE {
        return Err(domain(format!("n = {n} exceeds the supported degree {MAX_LAGUERRE_DEGREE}")));
    }
    Ok(())
}

fn check_denominator(c: f64, e: f64) -> Result<f64> {
    let d = c + e;
    if d.abs() < 1e-12 {
        return Err(Error::Singular(format!("C + epsilon = {d:e}")));
    }
    Ok(d)
}

/// Dirac-oscillator state `W = λ²r`, `ρ = 0`, for integer `κ = l` or `κ = −l − 1`.
pub fn oscillator_solution(n: u32, kappa: f64, lambda: f64, alpha: f64) -> Result<SpinorSolution> {
    ensure_finite("kappa", kappa)?;
    if integer_kappa_to_l(kappa).is_none() {
        return Err(Error::InvalidBranch(format!("kappa = {kappa} is neither l nor -l-1 for an integer l >= 0")));
    }
    oscillator_reference(n, kappa, lambda, alpha)
}

/// Oscillator state for real `κ`, the reference problem of the
/// transformation engine.
pub fn oscillator_reference(n: u32, kappa: f64, lambda: f64, alpha: f64) -> Result<SpinorSolution> {
    check_degree(n)?;
    let p = OscillatorParams::new(kappa, lambda, alpha)?;
    let potential =
        RelativisticPotential::with_real_kappa(alpha, kappa, 0.0, OddPotential::Linear { strength: lambda * lambda })?;
    let energy = p.energy(n);
    let s = p.exponent();
    let a = (2.0 * lambda).sqrt() * gamma_ratio_sqrt(n, s + 0.5)?;
    let lowered = kappa < -0.5;
    let theta_scale = if lowered {
        -2.0 * alpha * lambda * a / (energy + 1.0)
    } else {
        2.0 * alpha * lambda * a * (n as f64 + s - 0.5) / (energy + 1.0)
    };
    Ok(SpinorSolution {
        n,
        energy,
        params: ClassParams::Oscillator(p),
        potential,
        profile: Profile::Oscillator { n, lambda, s, a, theta_scale, lowered },
    })
}

/// Dirac-Coulomb state: `W = 0`, `S = αZ/κ`.
pub fn coulomb_solution(n: u32, params: CoulombParams) -> Result<SpinorSolution> {
    check_degree(n)?;
    let p = CoulombParams::new(params.z, params.kappa, params.alpha, params.branch)?;
    let mu = p.scale(n);
    if !(mu > 0.0) {
        return Err(Error::NoBoundState(format!("mu_{n} = {mu} <= 0 requires Z < 0")));
    }
    let potential = p.potential()?;
    let energy = p.energy(n);
    let s = p.exponent();
    let a = (mu / (2.0 * (n as f64 + s))).sqrt() * gamma_ratio_sqrt(n, 2.0 * s)?;
    let denom = check_denominator(p.cosine(), energy)?;
    let theta_scale = p.alpha * a * mu / denom;
    let slope = p.sine() / (p.alpha * mu) + 0.5;
    Ok(SpinorSolution {
        n,
        energy,
        params: ClassParams::Coulomb(p),
        potential,
        profile: Profile::Coulomb { n, mu, s, a, theta_scale, sigma: p.sigma(), slope },
    })
}

/// Dirac-Mörse state: `κ = 0`, `W = −(τλ²/2C)e^{−τr}`, on the whole line.
pub fn morse_solution(n: u32, params: MorseParams) -> Result<SpinorSolution> {
    check_degree(n)?;
    let p = MorseParams::new(params.tau, params.rho, params.lambda, params.alpha)?;
    let v = p.admit(n)?;
    let energy = p.energy(n)?;
    let potential = p.potential()?;
    let (s, c) = (potential.sine(), potential.cosine());
    let lambda2 = p.lambda * p.lambda;
    let log_a = 0.5 * ((p.tau * 2.0 * v).ln() + log_gamma(n as f64 + 1.0)? - log_gamma(n as f64 + 2.0 * v + 1.0)?);
    let a = log_a.exp();
    let denom = check_denominator(c, energy)?;
    Ok(SpinorSolution {
        n,
        energy,
        params: ClassParams::Morse(p),
        potential,
        profile: Profile::Morse {
            n,
            lambda2,
            tau: p.tau,
            v,
            a,
            theta_scale: p.alpha * a / denom,
            c0: -(s + p.tangent() * energy) / p.alpha,
            c1: p.tau * (n as f64 + 2.0 * v),
        },
    })
}

/// Normalized zero-energy state, `ε = 1`, `n = 0`.
pub fn zero_energy_solution(params: ZeroEnergyParams) -> Result<SpinorSolution> {
    let p = ZeroEnergyParams::new(params.l, params.beta, params.lambda, params.alpha)?;
    if !p.normalizable() {
        return Err(Error::NonNormalizable(format!(
            "l = {} with beta = {} gives a profile that is not square integrable",
            p.l, p.beta
        )));
    }
    let k = p.length_scale();
    let a = (0.5 * ((p.beta.abs() * k).ln() - log_gamma(p.norm_argument())?)).exp();
    build_zero_energy(p, a)
}

/// Zero-energy profile with unit amplitude. Exists also where the state is
/// not normalizable (`l = 0`, `β < 0`).
pub fn zero_energy_profile(params: ZeroEnergyParams) -> Result<SpinorSolution> {
    let p = ZeroEnergyParams::new(params.l, params.beta, params.lambda, params.alpha)?;
    build_zero_energy(p, 1.0)
}

fn build_zero_energy(p: ZeroEnergyParams, a: f64) -> Result<SpinorSolution> {
    Ok(SpinorSolution {
        n: 0,
        energy: 1.0,
        params: ClassParams::ZeroEnergy(p),
        potential: p.potential()?,
        profile: Profile::ZeroEnergy {
            k: p.length_scale(),
            kappa: p.kappa(),
            lambda2: p.lambda * p.lambda,
            beta: p.beta,
            a,
        },
    })
}

/// Construct level `n` of `params`.
pub fn solution(params: ClassParams, n: u32) -> Result<SpinorSolution> {
    match params {
        ClassParams::Oscillator(p) => oscillator_solution(n, p.kappa, p.lambda, p.alpha),
        ClassParams::Coulomb(p) => coulomb_solution(n, p),
        ClassParams::Morse(p) => morse_solution(n, p),
        ClassParams::ZeroEnergy(p) => {
            if n != 0 {
                return Err(Error::LevelCount { n, n_max: 0 });
            }
            zero_energy_solution(p)
        }
    }
}

/// One row of a spectrum table.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub n: u32,
    /// The energy formula, where it is defined.
    pub energy: Option<f64>,
    /// `None` for admitted levels; otherwise why the level is skipped.
    pub skipped: Option<String>,
}

impl SpectrumEntry {
    pub fn admitted(&self) -> bool {
        self.skipped.is_none()
    }
}

/// Energies for `n_from..=n_to`, tagging inadmissible levels.
pub fn spectrum_table(params: ClassParams, n_from: u32, n_to: u32) -> Vec<SpectrumEntry> {
    let entry = |n: u32| -> SpectrumEntry {
        let (energy, status) = match params {
            ClassParams::Oscillator(p) => (Some(p.energy(n)), Ok(())),
            ClassParams::Coulomb(p) => {
                let mu = p.scale(n);
                let status = if mu > 0.0 { Ok(()) } else { Err(Error::NoBoundState(format!("mu_{n} = {mu} <= 0"))) };
                (Some(p.energy(n)), status)
            }
            ClassParams::Morse(p) => (p.energy(n).ok(), p.admit(n).map(|_| ())),
            ClassParams::ZeroEnergy(p) => {
                if n != 0 {
                    (None, Err(Error::LevelCount { n, n_max: 0 }))
                } else if !p.normalizable() {
                    (Some(1.0), Err(Error::NonNormalizable("profile not square integrable".into())))
                } else {
                    (Some(1.0), Ok(()))
                }
            }
        };
        SpectrumEntry { n, energy, skipped: status.err().map(|e| e.to_string()) }
    };
    match params {
        // only n = 0 exists
        ClassParams::ZeroEnergy(_) => (n_from..=0).map(entry).collect(),
        _ => (n_from..=n_to).map(entry).collect(),
    }
}
