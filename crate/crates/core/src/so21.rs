//! SO(2,1): the lower-bounded discrete series D⁺(γ), its realization by
//! second-order differential operators, the tilted oscillator and the
//! nonrelativistic point canonical transformations of the oscillator.
//!
//! The realization is written for a general oscillator strength λ. At
//! `λ = 1/2` it reduces to
//! `L3 = d² + η/x² − x²/16`, `L± = (d² + η/x² + x²/16 ± ½(x d + ½))/√2`;
//! other strengths follow from the unitary dilation `x → 2λx`.
//! On `Φ_n` the realized `L3` has eigenvalue `−(γ+n+1)`, so the realized
//! `L₋` raises `n` and `L₊` lowers it.

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, ensure_finite, Error, Result};
use crate::numerics::{quadrature_inner, GridMapping, JetFn, RadialGrid};
use crate::scalar::{Jet, Real};
use crate::specialfn::{gamma_ratio_sqrt, laguerre_t, MAX_LAGUERRE_DEGREE};
use crate::xpct::Family;

fn check_gamma(gamma: f64) -> Result<()> {
    ensure_finite("gamma", gamma)?;
    if gamma < -0.5 {
        return Err(domain(format!("D+(gamma) needs gamma >= -1/2, got {gamma}")));
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    ensure_finite("lambda", lambda)?;
    if lambda <= 0.0 {
        return Err(domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(())
}

/// Operators of the abstract representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    L3,
    LPlus,
    LMinus,
    Casimir,
}

/// The representation `D⁺(γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So21Rep {
    gamma: f64,
}

impl So21Rep {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `η = −4γ(γ+1) − 3/4`.
    pub fn eta(&self) -> f64 {
        -4.0 * self.gamma * (self.gamma + 1.0) - 0.75
    }

    pub fn casimir(&self) -> f64 {
        self.gamma * (self.gamma + 1.0)
    }

    /// Oscillator angular momentum `l = 2γ + 1/2`.
    pub fn angular_momentum(&self) -> f64 {
        2.0 * self.gamma + 0.5
    }

    /// Matrix element of `which` between `|γ, n⟩` and its image.
    pub fn coefficient(&self, n: u32, which: Generator) -> f64 {
        let (g, n) = (self.gamma, n as f64);
        match which {
            Generator::Casimir => self.casimir(),
            Generator::L3 => g + n + 1.0,
            Generator::LPlus => ((n + 1.0) * (n + 2.0 * g + 2.0) / 2.0).sqrt(),
            Generator::LMinus => (n * (n + 2.0 * g + 1.0) / 2.0).sqrt(),
        }
    }
}

pub fn rep_action_coeffs(gamma: f64, n: u32, which: Generator) -> Result<f64> {
    Ok(So21Rep::new(gamma)?.coefficient(n, which))
}

/// Normalized three-dimensional oscillator state `Φ_n^γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorState {
    gamma: f64,
    n: u32,
    lambda: f64,
    amplitude: f64,
}

impl OscillatorState {
    pub fn new(gamma: f64, n: u32, lambda: f64) -> Result<Self> {
        check_gamma(gamma)?;
        check_lambda(lambda)?;
        if n > MAX_LAGUERRE_DEGREE {
            return Err(domain(format!("degree {n} exceeds {MAX_LAGUERRE_DEGREE}")));
        }
        let amplitude = (2.0 * lambda).sqrt() * gamma_ratio_sqrt(n, 2.0 * gamma + 2.0)?;
        Ok(Self { gamma, n, lambda, amplitude })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn angular_momentum(&self) -> f64 {
        2.0 * self.gamma + 0.5
    }

    /// `E = 2λ²(γ+n+1)`.
    pub fn energy(&self) -> f64 {
        2.0 * self.lambda * self.lambda * (self.gamma + self.n as f64 + 1.0)
    }

    /// `4λ²(γ+n+1)`, the eigenvalue of `−d² + (4γ(γ+1)+3/4)/x² + λ⁴x²`.
    pub fn eigenvalue_term(&self) -> f64 {
        2.0 * self.energy()
    }

    /// `4γ(γ+1) + 3/4`.
    pub fn centrifugal(&self) -> f64 {
        4.0 * self.gamma * (self.gamma + 1.0) + 0.75
    }

    /// The potential of the second-order operator whose eigenvalue is
    /// [`eigenvalue_term`](Self::eigenvalue_term).
    pub fn potential(&self, x: f64) -> f64 {
        self.centrifugal() / (x * x) + self.lambda.powi(4) * x * x
    }

    pub fn eval<T: Real>(&self, x: T) -> T {
        let lx = x.scale(self.lambda);
        let u = lx * lx;
        lx.powf(2.0 * self.gamma + 1.5).scale(self.amplitude)
            * u.scale(-0.5).exp()
            * laguerre_t(self.n, 2.0 * self.gamma + 1.0, u)
    }
}

pub fn oscillator_wavefunction(gamma: f64, n: u32, lambda: f64, x: f64) -> Result<f64> {
    ensure_finite("x", x)?;
    if x <= 0.0 {
        return Err(domain(format!("x must be positive, got {x}")));
    }
    Ok(OscillatorState::new(gamma, n, lambda)?.eval(x))
}

/// Realized generators, including `L1 = (L₊ + L₋)/√2` and `iL2 = (L₊ − L₋)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Realized {
    L3,
    LPlus,
    LMinus,
    L1,
    IL2,
}

/// Differential realization of `D⁺(γ)` at oscillator strength λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Realization {
    rep: So21Rep,
    lambda: f64,
}

impl Realization {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self { rep: So21Rep::new(gamma)?, lambda })
    }

    pub fn rep(&self) -> So21Rep {
        self.rep
    }

    /// `(A, B, C)` with `A = (d² + η/x²)/(4λ²)`, `B = λ²x²/4`, `C = ½(x d + ½)`.
    fn parts(&self, f: JetFn, x: f64) -> (f64, f64, f64) {
        let p = f(Jet::variable(x));
        let l2 = self.lambda * self.lambda;
        let a = (p.d2 + self.rep.eta() / (x * x) * p.v) / (4.0 * l2);
        let b = 0.25 * l2 * x * x * p.v;
        let c = 0.5 * (x * p.d1 + 0.5 * p.v);
        (a, b, c)
    }

    /// `(g f)(x)` for a closed-form `f`.
    pub fn apply(&self, g: Realized, f: JetFn, x: f64) -> f64 {
        let (a, b, c) = self.parts(f, x);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match g {
            Realized::L3 => a - b,
            Realized::L1 => a + b,
            Realized::IL2 => c,
            Realized::LPlus => s * (a + b + c),
            Realized::LMinus => s * (a + b - c),
        }
    }

    pub fn sample(&self, g: Realized, f: JetFn, grid: &RadialGrid<f64>) -> Vec<f64> {
        grid.points().iter().map(|&x| self.apply(g, f, x)).collect()
    }
}

/// Quadrature matrix elements of the realized generators between
/// oscillator states.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderReport {
    pub gamma: f64,
    pub n: u32,
    /// `|⟨Φ_{n+1}, L₋ Φ_n⟩|`.
    pub raising: f64,
    /// `|⟨Φ_{n−1}, L₊ Φ_n⟩|`, zero for `n = 0`.
    pub lowering: f64,
    /// `⟨Φ_n, L3 Φ_n⟩`.
    pub diagonal: f64,
    /// `⟨Φ_n, Φ_n⟩`.
    pub norm: f64,
    /// Largest `|⟨Φ_m, L± Φ_n⟩|` outside `m = n ± 1`, `m ≤ n + 3`.
    pub selection: f64,
    /// `⟨L3(L3+1) − 2L₋L₊⟩` and `⟨L3(L3−1) − 2L₊L₋⟩`.
    pub casimir: [f64; 2],
}

impl LadderReport {
    /// Largest deviation from the representation coefficients.
    pub fn max_deviation(&self) -> f64 {
        let rep = So21Rep { gamma: self.gamma };
        let c = rep.casimir();
        [
            (self.raising - rep.coefficient(self.n, Generator::LPlus)).abs(),
            (self.lowering - rep.coefficient(self.n, Generator::LMinus)).abs(),
            (self.diagonal.abs() - rep.coefficient(self.n, Generator::L3)).abs(),
            (self.casimir[0] - c).abs(),
            (self.casimir[1] - c).abs(),
            self.selection,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn ladder_overlap_check(gamma: f64, n: u32, lambda: f64, grid: &RadialGrid<f64>) -> Result<LadderReport> {
    let real = Realization::new(gamma, lambda)?;
    let states: Vec<OscillatorState> =
        (0..=n + 3).map(|m| OscillatorState::new(gamma, m, lambda)).collect::<Result<_>>()?;
    let sampled: Vec<Vec<f64>> = states.iter().map(|s| grid.sample(|x| s.eval(x))).collect();
    let k = n as usize;
    let norm = quadrature_inner(grid, &sampled[k], &sampled[k])?;
    if (norm - 1.0).abs() > 1e-4 {
        return Err(Error::GridTooSmall { got: grid.len(), need: 2 * grid.len() });
    }
    let psi = |x: Jet<f64>| states[k].eval(x);
    let lp = real.sample(Realized::LPlus, &psi, grid);
    let lm = real.sample(Realized::LMinus, &psi, grid);
    let l3 = real.sample(Realized::L3, &psi, grid);
    let raising = quadrature_inner(grid, &sampled[k + 1], &lm)?.abs();
    let lowering = if n == 0 { 0.0 } else { quadrature_inner(grid, &sampled[k - 1], &lp)?.abs() };
    let diagonal = quadrature_inner(grid, &sampled[k], &l3)?;
    let mut selection: f64 = 0.0;
    for (m, phi_m) in sampled.iter().enumerate() {
        if m + 1 != k && m != k + 1 {
            selection = selection.max(quadrature_inner(grid, phi_m, &lm)?.abs());
            selection = selection.max(quadrature_inner(grid, phi_m, &lp)?.abs());
        }
    }
    let l3_sq = quadrature_inner(grid, &l3, &l3)?;
    let casimir = [
        l3_sq + diagonal - 2.0 * quadrature_inner(grid, &lp, &lp)?,
        l3_sq - diagonal - 2.0 * quadrature_inner(grid, &lm, &lm)?,
    ];
    Ok(LadderReport { gamma, n, raising, lowering, diagonal, norm, selection, casimir })
}

/// Dense finite-difference images of the realized generators on a uniform
/// grid with Dirichlet ends.
#[derive(Debug, Clone)]
pub struct MatrixRealization {
    pub l3: DMatrix<f64>,
    pub l1: DMatrix<f64>,
    pub il2: DMatrix<f64>,
    pub lp: DMatrix<f64>,
    pub lm: DMatrix<f64>,
    grid: RadialGrid<f64>,
    lambda: f64,
}

/// Largest dense dimension accepted by [`realize_so21`].
pub const MAX_DENSE_POINTS: usize = 1024;

pub fn realize_so21(gamma: f64, lambda: f64, grid: &RadialGrid<f64>) -> Result<MatrixRealization> {
    let real = Realization::new(gamma, lambda)?;
    if !matches!(grid.mapping(), GridMapping::Uniform { .. }) {
        return Err(Error::GridMismatch("the SO(2,1) matrices need a uniform grid".into()));
    }
    let n = grid.len();
    if n > MAX_DENSE_POINTS {
        return Err(domain(format!("dense realization limited to {MAX_DENSE_POINTS} points, got {n}")));
    }
    let h = grid.step();
    let x = grid.points();
    let l2 = lambda * lambda;
    let eta = real.rep.eta();
    let mut a = DMatrix::zeros(n, n);
    let mut c = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = (-2.0 / (h * h) + eta / (x[i] * x[i])) / (4.0 * l2);
        if i + 1 < n {
            a[(i, i + 1)] = 1.0 / (h * h * 4.0 * l2);
            a[(i + 1, i)] = a[(i, i + 1)];
            // ½(x d + d x)/2 with the central first difference
            let e = (x[i] + x[i + 1]) / (8.0 * h);
            c[(i, i + 1)] = e;
            c[(i + 1, i)] = -e;
        }
    }
    let b = DMatrix::from_diagonal(&DVector::from_iterator(n, x.iter().map(|&xi| 0.25 * l2 * xi * xi)));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(MatrixRealization {
        l3: &a - &b,
        l1: &a + &b,
        lp: (&a + &b + &c) * s,
        lm: (&a + &b - &c) * s,
        il2: c,
        grid: grid.clone(),
        lambda,
    })
}

/// Residuals of the realized relations acting on a smooth vector, relative
/// to its norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So21Residuals {
    /// `[L3, L₊] − L₊`.
    pub l3_lp: f64,
    /// `[L3, L₋] + L₋`.
    pub l3_lm: f64,
    /// `[L₊, L₋] + L3`.
    pub lp_lm: f64,
    /// `[iL2, L3 + L1] + (L3 + L1)`.
    pub tilt_plus: f64,
    /// `[iL2, L3 − L1] − (L3 − L1)`.
    pub tilt_minus: f64,
    /// Largest entry of `L3 − L3ᵀ`.
    pub hermiticity: f64,
    /// Largest entry of `L₊ᵀ − L₋`.
    pub adjoint: f64,
}

impl So21Residuals {
    pub fn max_commutator(&self) -> f64 {
        [self.l3_lp, self.l3_lm, self.lp_lm, self.tilt_plus, self.tilt_minus].into_iter().fold(0.0, f64::max)
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

impl MatrixRealization {
    pub fn grid(&self) -> &RadialGrid<f64> {
        &self.grid
    }

    /// The smooth probe `(λx)⁶ e^{−λ²x²/2}` on the grid.
    pub fn probe(&self) -> DVector<f64> {
        let l = self.lambda;
        DVector::from_iterator(
            self.grid.len(),
            self.grid.points().iter().map(|&x| (l * x).powi(6) * (-0.5 * (l * x).powi(2)).exp()),
        )
    }

    /// `‖([x, y] − s·z) v‖ / ‖v‖` with the grid step as measure.
    fn defect(x: &DMatrix<f64>, y: &DMatrix<f64>, z: &DMatrix<f64>, s: f64, v: &DVector<f64>) -> f64 {
        let r = x * (y * v) - y * (x * v) - z * v * s;
        r.norm() / v.norm()
    }

    pub fn residuals(&self, v: &DVector<f64>) -> So21Residuals {
        let plus = &self.l3 + &self.l1;
        let minus = &self.l3 - &self.l1;
        So21Residuals {
            l3_lp: Self::defect(&self.l3, &self.lp, &self.lp, 1.0, v),
            l3_lm: Self::defect(&self.l3, &self.lm, &self.lm, -1.0, v),
            lp_lm: Self::defect(&self.lp, &self.lm, &self.l3, -1.0, v),
            tilt_plus: Self::defect(&self.il2, &plus, &plus, -1.0, v),
            tilt_minus: Self::defect(&self.il2, &minus, &minus, 1.0, v),
            hermiticity: max_abs(&(&self.l3 - self.l3.transpose())),
            adjoint: max_abs(&(self.lp.transpose() - &self.lm)),
        }
    }
}

/// Residuals on `grid` and on a grid with twice as many points over the
/// same interval, with the coarse/fine ratio of each commutator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltingReport {
    pub coarse: So21Residuals,
    pub fine: So21Residuals,
}

impl TiltingReport {
    pub fn ratio(&self, pick: fn(&So21Residuals) -> f64) -> f64 {
        pick(&self.coarse) / pick(&self.fine)
    }
}

pub fn tilting_infinitesimal_check(gamma: f64, lambda: f64, grid: &RadialGrid<f64>) -> Result<TiltingReport> {
    let coarse = realize_so21(gamma, lambda, grid)?;
    let fine = realize_so21(gamma, lambda, &grid.refined()?)?;
    Ok(TiltingReport { coarse: coarse.residuals(&coarse.probe()), fine: fine.residuals(&fine.probe()) })
}

/// The Hamiltonian combination `(1 − τ3)L1 + τ3L3` tilted onto `L3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiltedOscillator {
    rep: So21Rep,
    tau3: f64,
}

impl TiltedOscillator {
    pub fn new(gamma: f64, tau3: f64) -> Result<Self> {
        ensure_finite("tau3", tau3)?;
        if tau3 <= 0.5 {
            return Err(domain(format!(
                "tau3 = {tau3}: bound states need (2tau3 - 1)e^(2zeta) = 1, which requires tau3 > 1/2"
            )));
        }
        Ok(Self { rep: So21Rep::new(gamma)?, tau3 })
    }

    /// Tilting angle with `(2τ3 − 1)e^{2ζ} = 1`.
    pub fn zeta(&self) -> f64 {
        -0.5 * (2.0 * self.tau3 - 1.0).ln()
    }

    /// `λ = ((2τ3 − 1)/16)^{1/4}`.
    pub fn lambda(&self) -> f64 {
        ((2.0 * self.tau3 - 1.0) / 16.0).powf(0.25)
    }

    /// `τ0 = sqrt(2τ3 − 1)(γ + n + 1)`.
    pub fn tau0(&self, n: u32) -> f64 {
        (2.0 * self.tau3 - 1.0).sqrt() * self.rep.coefficient(n, Generator::L3)
    }

    /// `E = τ0/2`.
    pub fn energy(&self, n: u32) -> f64 {
        0.5 * self.tau0(n)
    }

    /// Coefficients of `L1` and `L3` after tilting by `ζ`, and the
    /// rescaled eigenvalue `2τ0 e^ζ`.
    pub fn tilted_coefficients(&self, zeta: f64, n: u32) -> (f64, f64, f64) {
        let t = (2.0 * self.tau3 - 1.0) * (2.0 * zeta).exp();
        (1.0 - t, 1.0 + t, 2.0 * self.tau0(n) * zeta.exp())
    }
}

/// Problem reached from the oscillator by a point canonical transformation,
/// with `f(r) = −l(l+1)/r² − 2V(r) + 2E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PctClass {
    /// `V = −Z/r`.
    Coulomb { angular_momentum: f64, charge: f64, energy: f64 },
    /// `l = 0`, `V = A e^{−2τr} − B e^{−τr}`.
    Morse { tau: f64, repulsive: f64, attractive: f64, energy: f64 },
    /// `E = 0`, `V = Σ c_k r^{p_k}` with terms as `(c_k, p_k)`.
    ZeroEnergy { angular_momentum: f64, terms: [(f64, f64); 2] },
}

impl PctClass {
    pub fn f(&self, r: f64) -> f64 {
        match *self {
            PctClass::Coulomb { angular_momentum: l, charge, energy } => {
                -l * (l + 1.0) / (r * r) + 2.0 * charge / r + 2.0 * energy
            }
            PctClass::Morse { tau, repulsive, attractive, energy } => {
                -2.0 * (repulsive * (-2.0 * tau * r).exp() - attractive * (-tau * r).exp()) + 2.0 * energy
            }
            PctClass::ZeroEnergy { angular_momentum: l, terms } => {
                -l * (l + 1.0) / (r * r) - 2.0 * terms.iter().map(|&(c, p)| c * r.powf(p)).sum::<f64>()
            }
        }
    }
}

/// Image `Ψ(r) = sqrt|q′| Φ(x)`, `r = q(x)`, of an oscillator state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PctImage {
    pub family: Family,
    pub state: OscillatorState,
}

impl PctImage {
    pub fn x(&self, r: f64) -> f64 {
        self.family.inverse_t(r)
    }

    /// `f(r) = (q′)^{−2}[−(4γ(γ+1)+3/4)/x² − λ⁴x² + 4λ²(γ+n+1) − c/x²]`
    /// with `½q‴/q′ − ¾(q″/q′)² = c/x²`.
    pub fn f(&self, r: f64) -> f64 {
        let x = self.x(r);
        let dq = self.family.dq(x);
        let s = &self.state;
        (-(s.centrifugal() + self.family.schwarzian_coefficient()) / (x * x) - s.lambda.powi(4) * x * x
            + s.eigenvalue_term())
            / (dq * dq)
    }

    pub fn psi<T: Real>(&self, r: T) -> T {
        let x = self.family.inverse_t(r);
        self.family.dq(x).abs().sqrt() * self.state.eval(x)
    }

    pub fn class(&self) -> PctClass {
        let s = &self.state;
        let (g, l2) = (s.gamma, s.lambda * s.lambda);
        let m = g + s.n as f64 + 1.0;
        match self.family {
            Family::Square => PctClass::Coulomb { angular_momentum: g, charge: 0.5 * l2 * m, energy: -l2 * l2 / 8.0 },
            Family::NegLog { tau } => PctClass::Morse {
                tau,
                repulsive: tau * tau * l2 * l2 / 8.0,
                attractive: 0.5 * tau * tau * l2 * m,
                energy: -(tau * (2.0 * g + 1.0)).powi(2) / 8.0,
            },
            Family::Power { mu } => {
                let p = 2.0 * mu + 1.0;
                PctClass::ZeroEnergy {
                    angular_momentum: (2.0 * g + 1.0).abs() / p.abs() - 0.5,
                    terms: [(l2 * l2 / (2.0 * p * p), 4.0 / p - 2.0), (-2.0 * l2 * m / (p * p), 2.0 / p - 2.0)],
                }
            }
        }
    }
}

pub fn nonrelativistic_pct(family: Family, gamma: f64, n: u32, lambda: f64) -> Result<PctImage> {
    family.validate()?;
    Ok(PctImage { family, state: OscillatorState::new(gamma, n, lambda)? })
}
