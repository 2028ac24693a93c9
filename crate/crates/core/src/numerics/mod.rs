//! Grids, finite-difference eigenvalues, quadrature and residual norms.

mod grid;
mod tridiag;

pub use grid::{GridMapping, RadialGrid, MIN_GRID_POINTS};
pub use tridiag::{bisect_root, discretize, extrapolated_eigenvalues, richardson, TridiagonalOperator};

use crate::dirac::{dirac_rows, EffectivePotential, RelativisticPotential};
use crate::error::{Error, Result};
use crate::scalar::{Jet, Scalar};

/// A closed-form function that can be evaluated on jets, giving exact
/// first and second derivatives.
pub type JetFn<'a> = &'a dyn Fn(Jet<f64>) -> Jet<f64>;

/// `∫ f g dr` with the grid's trapezoid weights.
pub fn quadrature_inner<T: Scalar>(grid: &RadialGrid<T>, f: &[T], g: &[T]) -> Result<T> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "samples of length {} and {} on a grid of {} points",
            f.len(),
            g.len(),
            grid.len()
        )));
    }
    Ok(grid.weights().iter().zip(f.iter().zip(g)).fold(T::zero(), |acc, (&w, (&a, &b))| acc + w * a * b))
}

pub fn quadrature_norm<T: Scalar>(grid: &RadialGrid<T>, f: &[T]) -> Result<T> {
    quadrature_inner(grid, f, f).map(|v| v.sqrt())
}

/// Outcome of a relative residual computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResidualNorm {
    /// `‖residual‖ / ‖ψ‖`.
    Relative(f64),
    /// The reference function vanishes on the grid.
    Degenerate,
}

impl ResidualNorm {
    pub fn value(self) -> Option<f64> {
        match self {
            ResidualNorm::Relative(v) => Some(v),
            ResidualNorm::Degenerate => None,
        }
    }

    pub fn below(self, tol: f64) -> bool {
        matches!(self, ResidualNorm::Relative(v) if v <= tol)
    }

    fn from_norms(num: f64, den: f64) -> Result<Self> {
        if !num.is_finite() || !den.is_finite() {
            return Err(Error::NonFinite(format!("residual norms {num} / {den}")));
        }
        if den == 0.0 {
            Ok(ResidualNorm::Degenerate)
        } else {
            Ok(ResidualNorm::Relative(num / den))
        }
    }
}

/// Relative L² residual of the first-order Dirac system for a spinor given
/// in closed form.
pub fn dirac_residual(
    pot: &RelativisticPotential,
    energy: f64,
    phi: JetFn,
    theta: JetFn,
    grid: &RadialGrid<f64>,
) -> Result<ResidualNorm> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&r, &w) in grid.points().iter().zip(grid.weights()) {
        let p = phi(Jet::variable(r));
        let t = theta(Jet::variable(r));
        let (top, bottom) = dirac_rows(pot, energy, r, p.v, p.d1, t.v, t.d1);
        num += w * (top * top + bottom * bottom);
        den += w * (p.v * p.v + t.v * t.v);
    }
    ResidualNorm::from_norms(num.sqrt(), den.sqrt())
}

/// Relative L² residual of `[−d²/dr² + F(r)] φ = 0`.
pub fn schrodinger_residual(
    pot: &RelativisticPotential,
    energy: f64,
    phi: JetFn,
    grid: &RadialGrid<f64>,
) -> Result<ResidualNorm> {
    let f = EffectivePotential::new(*pot, energy);
    generic_schrodinger_residual(&|r| f.eval(r), phi, grid)
}

/// Relative L² residual of `[−d²/dr² + f(r)] φ = 0` for an arbitrary `f`.
pub fn generic_schrodinger_residual(
    f: &dyn Fn(f64) -> f64,
    phi: JetFn,
    grid: &RadialGrid<f64>,
) -> Result<ResidualNorm> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (&r, &w) in grid.points().iter().zip(grid.weights()) {
        let p = phi(Jet::variable(r));
        let res = -p.d2 + f(r) * p.v;
        num += w * res * res;
        den += w * p.v * p.v;
    }
    ResidualNorm::from_norms(num.sqrt(), den.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Real;

    #[test]
    fn quadrature_integrates_gaussian() {
        let g = RadialGrid::uniform(12.0, 2000).unwrap();
        let f = g.sample(|r| (-r * r).exp());
        let one = g.sample(|_| 1.0);
        let v = quadrature_inner(&g, &f, &one).unwrap();
        // ∫_0^∞ e^{-r²} = √π/2; the boundary panel costs O(h²)
        let h = g.step();
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < h * h);
        assert!(matches!(quadrature_inner(&g, &f[1..], &one), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn quadrature_on_log_grid() {
        let g = RadialGrid::log_mapped(1e-6, 40.0, 4000).unwrap();
        let f = g.sample(|r| r * (-r).exp());
        let n2 = quadrature_norm(&g, &f).unwrap().powi(2);
        // ∫ r² e^{-2r} dr = 1/4
        assert!((n2 - 0.25).abs() < 1e-5);
    }

    #[test]
    fn schrodinger_residual_of_oscillator_ground_state() {
        let g = RadialGrid::uniform(8.0, 400).unwrap();
        let phi = |r: Jet<f64>| r * (r * r).scale(-0.5).exp();
        // −φ'' + r²φ = 3φ
        let ok = generic_schrodinger_residual(&|r| r * r - 3.0, &phi, &g).unwrap();
        assert!(ok.below(1e-12), "{ok:?}");
        let bad = generic_schrodinger_residual(&|r| r * r - 2.0, &phi, &g).unwrap();
        assert!((bad.value().unwrap() - 1.0).abs() < 1e-6);
        let zero = generic_schrodinger_residual(&|_| 0.0, &|r: Jet<f64>| r.scale(0.0), &g).unwrap();
        assert_eq!(zero, ResidualNorm::Degenerate);
    }
}
