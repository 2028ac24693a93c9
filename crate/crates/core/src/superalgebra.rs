//! Graded extension of so(2,1) realized by 2×2 blocks of first-order
//! differential operators, the Dirac operator as a linear combination of
//! its generators, and supersymmetric partner potentials.
//!
//! With `D` the antisymmetric central-difference matrix and `G` diagonal:
//!
//! ```text
//! L₊ = | 0  G−D |   L₋ = | 0    0 |   L3 = ½ | 1   0 |   L0 = {L₊, L₋}
//!      | 0   0  |        | G+D  0 |          | 0  −1 |
//! ```

use nalgebra::{DMatrix, DVector};

use crate::dirac::OddPotential;
use crate::error::{domain, ensure_finite, Error, Result};
use crate::numerics::{discretize, richardson, GridMapping, RadialGrid};
use crate::scalar::{derivatives, Jet, Real};

/// `G(r) = κ/r + W(r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Superpotential {
    pub kappa: f64,
    pub w: OddPotential,
}

impl Superpotential {
    pub fn new(kappa: f64, w: OddPotential) -> Result<Self> {
        ensure_finite("kappa", kappa)?;
        Ok(Self { kappa, w })
    }

    /// `G = κ/r + λ²r`.
    pub fn oscillator(kappa: f64, lambda: f64) -> Result<Self> {
        Self::new(kappa, OddPotential::Linear { strength: lambda * lambda })
    }

    pub fn eval<T: Real>(&self, r: T) -> T {
        let w = self.w.eval(r);
        if self.kappa == 0.0 {
            w
        } else {
            w + T::from_f64(self.kappa) / r
        }
    }

    /// Analytic `G′`.
    pub fn derivative(&self, r: f64) -> f64 {
        derivatives(|x: Jet<f64>| self.eval(x), r).1
    }

    /// `V₊ = G² + G′`.
    pub fn v_plus(&self, r: f64) -> f64 {
        let g = self.eval(r);
        g * g + self.derivative(r)
    }

    /// `V₋ = G² − G′`.
    pub fn v_minus(&self, r: f64) -> f64 {
        let g = self.eval(r);
        g * g - self.derivative(r)
    }
}

/// `(V₊(r), V₋(r))`.
pub fn partner_potentials(g: &Superpotential, r: f64) -> Result<(f64, f64)> {
    ensure_finite("r", r)?;
    if r <= 0.0 {
        return Err(domain(format!("r must be positive, got {r}")));
    }
    Ok((g.v_plus(r), g.v_minus(r)))
}

/// Matrix realization of the graded algebra on a uniform grid.
#[derive(Debug, Clone)]
pub struct AlgebraRealization {
    superpotential: Superpotential,
    grid: RadialGrid<f64>,
    /// `G` on the grid.
    g: DVector<f64>,
    /// Antisymmetric first-derivative matrix.
    d: DMatrix<f64>,
    pub lp: DMatrix<f64>,
    pub lm: DMatrix<f64>,
    pub l3: DMatrix<f64>,
    pub l0: DMatrix<f64>,
}

fn uniform_step(grid: &RadialGrid<f64>) -> Result<f64> {
    match grid.mapping() {
        GridMapping::Uniform { .. } | GridMapping::Line { .. } => Ok(grid.step()),
        GridMapping::LogMapped { .. } => Err(Error::GridMismatch("the matrix realization needs a uniform grid".into())),
    }
}

/// Block matrix `[[a, b], [c, d]]` from `N×N` blocks.
fn blocks(a: &DMatrix<f64>, b: &DMatrix<f64>, c: &DMatrix<f64>, d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

pub fn realize_algebra(g: &Superpotential, grid: &RadialGrid<f64>) -> Result<AlgebraRealization> {
    let h = uniform_step(grid)?;
    let n = grid.len();
    let gv = DVector::from_iterator(n, grid.points().iter().map(|&r| g.eval(r)));
    if let Some(i) = gv.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("G at r = {}", grid.points()[i])));
    }
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        d[(i, i + 1)] = 0.5 / h;
        d[(i + 1, i)] = -0.5 / h;
    }
    let gm = DMatrix::from_diagonal(&gv);
    let zero = DMatrix::zeros(n, n);
    let lp = blocks(&zero, &(&gm - &d), &zero, &zero);
    let lm = blocks(&zero, &zero, &(&gm + &d), &zero);
    let l3 = blocks(&(DMatrix::identity(n, n) * 0.5), &zero, &zero, &(DMatrix::identity(n, n) * -0.5));
    let l0 = &lp * &lm + &lm * &lp;
    Ok(AlgebraRealization { superpotential: *g, grid: grid.clone(), g: gv, d, lp, lm, l3, l0 })
}

fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

fn anticommutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b + b * a
}

/// Frobenius norms of the defining relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationResiduals {
    /// `‖[L3, L₊] − L₊‖`.
    pub l3_lp: f64,
    /// `‖[L3, L₋] + L₋‖`.
    pub l3_lm: f64,
    /// `‖{L₊, L₋} − L0‖`.
    pub anticommutator: f64,
    /// `‖[L0, L3]‖`.
    pub l0_l3: f64,
    /// `‖[L0, L₊]‖` and `‖[L0, L₋]‖`.
    pub l0_lp: f64,
    pub l0_lm: f64,
    /// `‖L₊ᵀ − L₋‖`.
    pub adjoint: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        [self.l3_lp, self.l3_lm, self.anticommutator, self.l0_l3, self.l0_lp, self.l0_lm, self.adjoint]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

impl AlgebraRealization {
    pub fn grid(&self) -> &RadialGrid<f64> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.lp.nrows()
    }

    pub fn relation_residuals(&self) -> RelationResiduals {
        RelationResiduals {
            l3_lp: (commutator(&self.l3, &self.lp) - &self.lp).norm(),
            l3_lm: (commutator(&self.l3, &self.lm) + &self.lm).norm(),
            anticommutator: (anticommutator(&self.lp, &self.lm) - &self.l0).norm(),
            l0_l3: commutator(&self.l0, &self.l3).norm(),
            l0_lp: commutator(&self.l0, &self.lp).norm(),
            l0_lm: commutator(&self.l0, &self.lm).norm(),
            adjoint: (self.lp.transpose() - &self.lm).norm(),
        }
    }

    /// `blockdiag(−Δ + V₋, −Δ + V₊)` with the compact three-point Laplacian
    /// and analytic `G′`: the continuum even element discretized on its own.
    pub fn continuum_l0(&self) -> DMatrix<f64> {
        let n = self.grid.len();
        let h = self.grid.step();
        let mut lap = DMatrix::zeros(n, n);
        for i in 0..n {
            lap[(i, i)] = 2.0 / (h * h);
            if i + 1 < n {
                lap[(i, i + 1)] = -1.0 / (h * h);
                lap[(i + 1, i)] = -1.0 / (h * h);
            }
        }
        let g = &self.superpotential;
        let vm = DMatrix::from_diagonal(&DVector::from_iterator(n, self.grid.points().iter().map(|&r| g.v_minus(r))));
        let vp = DMatrix::from_diagonal(&DVector::from_iterator(n, self.grid.points().iter().map(|&r| g.v_plus(r))));
        let zero = DMatrix::zeros(n, n);
        blocks(&(&lap + vm), &zero, &zero, &(&lap + vp))
    }

    /// Discrete `L²` norm of `m·v` relative to `v`, with `v` the sampled
    /// smooth spinor `(f, f)`.
    pub fn action_norm(&self, m: &DMatrix<f64>, f: &dyn Fn(f64) -> f64) -> f64 {
        let n = self.grid.len();
        let samples = self.grid.sample(f);
        let v = DVector::from_iterator(2 * n, samples.iter().chain(samples.iter()).copied());
        (m * &v).norm() / v.norm()
    }

    /// `‖[L0ᶜ, L₊]v‖/‖v‖ + ‖[L0ᶜ, L₋]v‖/‖v‖` with `L0ᶜ` from
    /// [`Self::continuum_l0`]: the part of centrality limited by the grid.
    pub fn centrality_defect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        let l0 = self.continuum_l0();
        self.action_norm(&commutator(&l0, &self.lp), f) + self.action_norm(&commutator(&l0, &self.lm), f)
    }

    /// `‖(L0 − L0ᶜ)v‖/‖v‖`: the realized even element against the
    /// independently discretized partner operators.
    pub fn l0_discretization_defect(&self, f: &dyn Fn(f64) -> f64) -> f64 {
        self.action_norm(&(&self.l0 - self.continuum_l0()), f)
    }

    /// The diagonal of `G` on the grid.
    pub fn g_values(&self) -> &DVector<f64> {
        &self.g
    }

    pub fn derivative_matrix(&self) -> &DMatrix<f64> {
        &self.d
    }
}

/// `Q = (2/λ3)(λ₊L₊ + λ₋L₋ + λ3L3)`, i.e. `[[1, α(G−D)], [α(G+D), −1]]`
/// with `α = 2λ₊/λ3`.
pub fn assemble_q(lambda_plus: f64, lambda3: f64, realization: &AlgebraRealization) -> Result<DMatrix<f64>> {
    ensure_finite("lambda_plus", lambda_plus)?;
    ensure_finite("lambda3", lambda3)?;
    if lambda3 == 0.0 {
        return Err(Error::ZeroMassFactor);
    }
    let alpha = q_alpha(lambda_plus, lambda3);
    Ok((&realization.lp + &realization.lm) * alpha + &realization.l3 * 2.0)
}

/// `α = 2λ₊/λ3`.
pub fn q_alpha(lambda_plus: f64, lambda3: f64) -> f64 {
    2.0 * lambda_plus / lambda3
}

/// Eigenvalues of a symmetric `Q`, ascending.
pub fn q_spectrum(q: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = q.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

/// Spectra of the two partner operators and their pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct SusyReport {
    /// Lowest `k` eigenvalues of `−d² + V₋` (Richardson extrapolated).
    pub minus: Vec<f64>,
    /// Lowest `k` eigenvalues of `−d² + V₊`.
    pub plus: Vec<f64>,
    /// The unpaired `V₋` ground state, when it is identified as a zero mode.
    pub zero_mode: Option<f64>,
    /// `(V₋ level, V₊ level, relative difference)`.
    pub pairs: Vec<(f64, f64, f64)>,
    /// Grid-error estimate of the first excited `V₋` level.
    pub error_estimate: f64,
}

impl SusyReport {
    pub fn max_pair_deviation(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).fold(0.0, f64::max)
    }
}

/// Pairs level `m` of `V₋` with level `m − 1` of `V₊` when `V₋` has a
/// zero mode, and level `m` with level `m` otherwise.
pub fn susy_degeneracy_check(g: &Superpotential, grid: &RadialGrid<f64>, k: usize) -> Result<SusyReport> {
    if k < 2 {
        return Err(domain("susy check needs k >= 2"));
    }
    let fine = grid.refined()?;
    let solve = |v: &dyn Fn(f64) -> f64| -> Result<(Vec<f64>, Vec<f64>)> {
        let c = discretize(v, grid)?.eigenvalues_lowest(k)?;
        let f = discretize(v, &fine)?.eigenvalues_lowest(k)?;
        let ex = c.iter().zip(&f).map(|(&c, &f)| richardson(c, f)).collect();
        Ok((ex, f))
    };
    let (minus, minus_fine) = solve(&|r| g.v_minus(r))?;
    let (plus, _) = solve(&|r| g.v_plus(r))?;
    let error_estimate = (minus_fine[1] - minus[1]).abs();
    let zero = minus[0].abs() < 10.0 * error_estimate.max(f64::EPSILON * minus[1].abs());
    let offset = usize::from(zero);
    let pairs =
        minus.iter().skip(offset).zip(&plus).map(|(&m, &p)| (m, p, (m - p).abs() / m.abs().max(p.abs()))).collect();
    Ok(SusyReport { minus, plus, zero_mode: zero.then_some(minus_fine[0]), pairs, error_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smooth(r: f64) -> f64 {
        r.powi(6) * (-r * r).exp()
    }

    #[test]
    fn partner_potential_examples() {
        let g = Superpotential::oscillator(0.0, 1.3).unwrap();
        let l2 = 1.3f64 * 1.3;
        let (vp, vm) = partner_potentials(&g, 0.8).unwrap();
        assert!((vp - (l2 * l2 * 0.64 + l2)).abs() < 1e-13 && (vm - (l2 * l2 * 0.64 - l2)).abs() < 1e-13);
        let c = Superpotential::new(2.0, OddPotential::Zero).unwrap();
        let (vp, vm) = partner_potentials(&c, 1.5).unwrap();
        assert!((vp - 2.0 / 2.25).abs() < 1e-14 && (vm - 6.0 / 2.25).abs() < 1e-14);
        let both = Superpotential::oscillator(1.0, 1.0).unwrap();
        assert_eq!(partner_potentials(&both, 1.0).unwrap(), (4.0, 4.0));
        for &(k, r) in &[(-2.0, 0.7), (3.0, 1.9)] {
            let g = Superpotential::oscillator(k, 0.9).unwrap();
            let l2 = 0.81;
            let (vp, vm) = partner_potentials(&g, r).unwrap();
            let e = |s: f64| k * (k - s) / (r * r) + l2 * l2 * r * r + l2 * (2.0 * k + s);
            assert!((vp - e(1.0)).abs() < 1e-12 && (vm - e(-1.0)).abs() < 1e-12);
        }
        assert!(partner_potentials(&both, 0.0).is_err());
    }

    #[test]
    fn exact_relations_and_adjoints() {
        let g = Superpotential::oscillator(-2.0, 1.0).unwrap();
        let grid = RadialGrid::uniform(8.0, 64).unwrap();
        let alg = realize_algebra(&g, &grid).unwrap();
        let res = alg.relation_residuals();
        let scale = alg.l0.norm();
        assert!(res.max() <= 1e-13 * scale, "{res:?}");
        assert_eq!(alg.l0.transpose(), alg.l0.clone());
        assert!(matches!(RadialGrid::uniform(8.0, 8), Err(Error::GridTooSmall { .. })));
        let log = RadialGrid::log_mapped(1e-3, 8.0, 64).unwrap();
        assert!(realize_algebra(&g, &log).is_err());
    }

    #[test]
    fn continuum_even_element_converges() {
        let g = Superpotential::oscillator(-2.0, 1.0).unwrap();
        let coarse = realize_algebra(&g, &RadialGrid::uniform(8.0, 255).unwrap()).unwrap();
        let fine = realize_algebra(&g, &RadialGrid::uniform(8.0, 511).unwrap()).unwrap();
        let ratio = coarse.centrality_defect(&smooth) / fine.centrality_defect(&smooth);
        assert!((ratio - 4.0).abs() < 0.5, "centrality ratio {ratio}");
        let ratio = coarse.l0_discretization_defect(&smooth) / fine.l0_discretization_defect(&smooth);
        assert!((ratio - 4.0).abs() < 0.5, "L0 ratio {ratio}");
    }

    #[test]
    fn q_from_coefficients() {
        assert_eq!(q_alpha(0.5, 2.0), 0.5);
        let g = Superpotential::oscillator(-1.0, 1.0).unwrap();
        let grid = RadialGrid::uniform(10.0, 200).unwrap();
        let alg = realize_algebra(&g, &grid).unwrap();
        assert!(matches!(assemble_q(0.5, 0.0, &alg), Err(Error::ZeroMassFactor)));
        let q = assemble_q(0.5, 2.0, &alg).unwrap();
        assert_eq!(q.transpose(), q);
        // paired levels ±sqrt(1 + α²·4nλ²) of the κ = −1 oscillator
        let e = q_spectrum(&q);
        let alpha = 0.5;
        for n in 0..3 {
            let target = (1.0 + alpha * alpha * 4.0 * n as f64).sqrt();
            let nearest = e.iter().map(|&x| (x - target).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 2e-3, "n={n}: {nearest}");
            let nearest = e.iter().map(|&x| (x + target).abs()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 2e-3, "n={n}: {nearest}");
        }
    }

    #[test]
    fn oscillator_partners_are_degenerate() {
        let g = Superpotential::oscillator(-2.0, 1.0).unwrap();
        let grid = RadialGrid::uniform(12.0, 1500).unwrap();
        let rep = susy_degeneracy_check(&g, &grid, 5).unwrap();
        assert!(rep.zero_mode.is_some(), "{rep:?}");
        assert!(rep.minus[0].abs() < 1e-6);
        assert_eq!(rep.pairs.len(), 4);
        assert!(rep.max_pair_deviation() < 1e-6, "{rep:?}");
        for (m, &e) in rep.minus.iter().enumerate() {
            assert!((e - 4.0 * m as f64).abs() < 1e-5);
        }
        // κ = l: no zero mode, spectra coincide level by level
        let g = Superpotential::oscillator(1.0, 1.0).unwrap();
        let rep = susy_degeneracy_check(&g, &grid, 4).unwrap();
        assert!(rep.zero_mode.is_none());
        assert_eq!(rep.pairs.len(), 4);
    }

    #[test]
    fn half_line_linear_superpotential_breaks_pairing() {
        // with a Dirichlet wall at r = 0 the would-be zero mode e^{−r²/2} is excluded
        let g = Superpotential::oscillator(0.0, 1.0).unwrap();
        let grid = RadialGrid::uniform(12.0, 1500).unwrap();
        let rep = susy_degeneracy_check(&g, &grid, 3).unwrap();
        assert!(rep.zero_mode.is_none());
        for (m, &e) in rep.minus.iter().enumerate() {
            assert!((e - (2.0 + 4.0 * m as f64)).abs() < 1e-5);
            assert!((rep.plus[m] - (4.0 + 4.0 * m as f64)).abs() < 1e-5);
        }
    }
}
