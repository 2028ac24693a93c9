use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;

/// Smallest grid accepted by the discretization routines.
pub const MIN_GRID_POINTS: usize = 16;

/// How interior abscissae are laid out. The endpoints are Dirichlet
/// boundaries and are not part of the point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridMapping<T> {
    /// `r_i = i·h`, `h = r_max/(n+1)`.
    Uniform { r_max: T, n: usize },
    /// `r_i = exp(ln r_min + i·h)`, uniform in `ln r`.
    LogMapped { r_min: T, r_max: T, n: usize },
    /// Uniform on `(left, right)`; points may be negative. Used for problems
    /// that live on the whole line.
    Line { left: T, right: T, n: usize },
}

impl<T: Scalar> GridMapping<T> {
    pub fn len(&self) -> usize {
        match *self {
            GridMapping::Uniform { n, .. } | GridMapping::LogMapped { n, .. } | GridMapping::Line { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same domain with the spacing halved (`n → 2n + 1`), so that every
    /// coarse point is also a fine point.
    pub fn refined(&self) -> Self {
        match *self {
            GridMapping::Uniform { r_max, n } => GridMapping::Uniform { r_max, n: 2 * n + 1 },
            GridMapping::LogMapped { r_min, r_max, n } => GridMapping::LogMapped { r_min, r_max, n: 2 * n + 1 },
            GridMapping::Line { left, right, n } => GridMapping::Line { left, right, n: 2 * n + 1 },
        }
    }
}

type Jacobian<T> = Box<dyn Fn(T) -> T>;

/// Interior abscissae with trapezoid weights.
///
/// The weights integrate functions that vanish at both Dirichlet ends; the
/// two boundary intervals are absorbed into the first and last weight so
/// that on uniform grids the weights sum to the domain length exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid<T> {
    mapping: GridMapping<T>,
    points: Vec<T>,
    weights: Vec<T>,
    step: T,
}

impl<T: Scalar> RadialGrid<T> {
    pub fn new(mapping: GridMapping<T>) -> Result<Self> {
        let n = mapping.len();
        if n < MIN_GRID_POINTS {
            return Err(Error::GridTooSmall { got: n, need: MIN_GRID_POINTS });
        }
        let count = T::cst((n + 1) as f64);
        let (points, step, jac): (Vec<T>, T, Jacobian<T>) = match mapping {
            GridMapping::Uniform { r_max, .. } => {
                if !(r_max > T::zero()) || !r_max.is_finite() {
                    return Err(domain("uniform grid needs finite r_max > 0"));
                }
                let h = r_max / count;
                ((1..=n).map(|i| h * T::cst(i as f64)).collect(), h, Box::new(|_| T::one()))
            }
            GridMapping::LogMapped { r_min, r_max, .. } => {
                if !(r_min > T::zero()) || !(r_max > r_min) || !r_max.is_finite() {
                    return Err(domain("log grid needs 0 < r_min < r_max"));
                }
                let s0 = r_min.ln();
                let h = (r_max.ln() - s0) / count;
                ((1..=n).map(|i| (s0 + h * T::cst(i as f64)).exp()).collect(), h, Box::new(|r| r))
            }
            GridMapping::Line { left, right, .. } => {
                if !(right > left) || !left.is_finite() || !right.is_finite() {
                    return Err(domain("line grid needs left < right"));
                }
                let h = (right - left) / count;
                ((1..=n).map(|i| left + h * T::cst(i as f64)).collect(), h, Box::new(|_| T::one()))
            }
        };
        let end = T::cst(1.5);
        let weights = points
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let w = step * jac(r);
                if i == 0 || i == n - 1 {
                    w * end
                } else {
                    w
                }
            })
            .collect();
        Ok(Self { mapping, points, weights, step })
    }

    pub fn uniform(r_max: T, n: usize) -> Result<Self> {
        Self::new(GridMapping::Uniform { r_max, n })
    }

    pub fn log_mapped(r_min: T, r_max: T, n: usize) -> Result<Self> {
        Self::new(GridMapping::LogMapped { r_min, r_max, n })
    }

    pub fn line(left: T, right: T, n: usize) -> Result<Self> {
        Self::new(GridMapping::Line { left, right, n })
    }

    pub fn mapping(&self) -> GridMapping<T> {
        self.mapping
    }
    pub fn points(&self) -> &[T] {
        &self.points
    }
    pub fn weights(&self) -> &[T] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    /// Spacing in the mapped variable (`r` or `ln r`).
    pub fn step(&self) -> T {
        self.step
    }

    pub fn refined(&self) -> Result<Self> {
        Self::new(self.mapping.refined())
    }

    /// Distance between the two Dirichlet boundaries.
    pub fn domain_length(&self) -> T {
        match self.mapping {
            GridMapping::Uniform { r_max, .. } => r_max,
            GridMapping::LogMapped { r_min, r_max, .. } => r_max - r_min,
            GridMapping::Line { left, right, .. } => right - left,
        }
    }

    pub fn sample<F: Fn(T) -> T>(&self, f: F) -> Vec<T> {
        self.points.iter().map(|&r| f(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_weights_sum_to_length() {
        for n in [16, 17, 100, 999] {
            let g = RadialGrid::uniform(3.5f64, n).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - 3.5).abs() < 1e-13, "n={n}: {s}");
            assert!(g.points().windows(2).all(|w| w[1] > w[0]));
            assert!(g.points()[0] > 0.0);
        }
    }

    #[test]
    fn too_small_and_bad_domains() {
        assert!(matches!(RadialGrid::uniform(1.0f64, 15), Err(Error::GridTooSmall { .. })));
        assert!(RadialGrid::log_mapped(0.0f64, 1.0, 100).is_err());
        assert!(RadialGrid::line(1.0f64, -1.0, 100).is_err());
    }

    #[test]
    fn refinement_nests_points() {
        let g = RadialGrid::log_mapped(1e-6f64, 10.0, 40).unwrap();
        let f = g.refined().unwrap();
        assert_eq!(f.len(), 81);
        for (i, &r) in g.points().iter().enumerate() {
            assert!((f.points()[2 * i + 1] / r - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn generic_over_f32() {
        let g = RadialGrid::uniform(1.0f32, 31).unwrap();
        let s: f32 = g.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-5);
    }
}
