use super::grid::{GridMapping, RadialGrid};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric tridiagonal matrix from a finite-difference discretization of
/// `−d²/dr² + F(r)` with Dirichlet ends.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator<T> {
    diag: Vec<T>,
    offdiag: Vec<T>,
    /// For log-mapped grids the symmetric form acts on `w = sqrt(r)·φ`;
    /// this holds `1/sqrt(r_i)` so that `φ_i = w_i · conjugation[i]`.
    conjugation: Option<Vec<T>>,
}

impl<T: Scalar> TridiagonalOperator<T> {
    pub fn from_parts(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::GridMismatch(format!(
                "diagonal of length {} needs off-diagonal of length {}",
                diag.len(),
                diag.len().saturating_sub(1)
            )));
        }
        Ok(Self { diag, offdiag, conjugation: None })
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }
    pub fn offdiag(&self) -> &[T] {
        &self.offdiag
    }
    pub fn conjugation(&self) -> Option<&[T]> {
        self.conjugation.as_deref()
    }
    pub fn len(&self) -> usize {
        self.diag.len()
    }
    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y = y + self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y = y + self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut rad = T::zero();
            if i > 0 {
                rad = rad + self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                rad = rad + self.offdiag[i].abs();
            }
            lo = lo.min(self.diag[i] - rad);
            hi = hi.max(self.diag[i] + rad);
        }
        (lo, hi)
    }

    fn scale(&self) -> T {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(T::min_positive_value())
    }

    /// Number of eigenvalues strictly below `x` (negative pivots of the
    /// LDLᵀ factorization of `A − x`).
    pub fn sturm_count(&self, x: T) -> usize {
        let guard = T::epsilon() * T::epsilon() * self.scale();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.len() {
            if i > 0 {
                let e = self.offdiag[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q.abs() < guard {
                q = -guard;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalue with ascending index `j` by bisection on the Sturm count,
    /// iterated until the bracket cannot be split.
    pub fn eigenvalue(&self, j: usize) -> Result<T> {
        if j >= self.len() {
            return Err(Error::EigenCount { k: j + 1, n: self.len() });
        }
        let (mut lo, mut hi) = self.gershgorin();
        let pad = self.scale() * T::epsilon() * T::cst(4.0);
        lo = lo - pad;
        hi = hi + pad;
        let two = T::cst(2.0);
        for _ in 0..2000 {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok((lo + hi) / two)
    }

    /// Lowest `k` eigenvalues in ascending order.
    pub fn eigenvalues_lowest(&self, k: usize) -> Result<Vec<T>> {
        if k > self.len() {
            return Err(Error::EigenCount { k, n: self.len() });
        }
        (0..k).map(|j| self.eigenvalue(j)).collect()
    }
}

/// Central-difference `−d²/dr² + F(r)` on `grid`.
///
/// On log-mapped grids `r = e^s` and `φ = sqrt(r)·u` turn the problem into
/// `(−d²/ds² + 1/4 + r²F) u = E r² u`, symmetrized by `w = r u`.
pub fn discretize<T: Scalar, F: Fn(T) -> T>(potential: F, grid: &RadialGrid<T>) -> Result<TridiagonalOperator<T>> {
    let h = grid.step();
    let inv_h2 = (h * h).recip();
    let two = T::cst(2.0);
    let pts = grid.points();
    let f: Vec<T> = pts.iter().map(|&r| potential(r)).collect();
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(format!("F(r) at grid point r = {}", pts[i])));
    }
    let n = pts.len();
    match grid.mapping() {
        GridMapping::Uniform { .. } | GridMapping::Line { .. } => {
            let diag = f.iter().map(|&v| two * inv_h2 + v).collect();
            let offdiag = vec![-inv_h2; n - 1];
            TridiagonalOperator::from_parts(diag, offdiag)
        }
        GridMapping::LogMapped { .. } => {
            let quarter = T::cst(0.25);
            let diag = pts.iter().zip(&f).map(|(&r, &v)| (two * inv_h2 + quarter) / (r * r) + v).collect();
            let offdiag = pts.windows(2).map(|w| -inv_h2 / (w[0] * w[1])).collect();
            let mut op = TridiagonalOperator::from_parts(diag, offdiag)?;
            op.conjugation = Some(pts.iter().map(|&r| r.sqrt().recip()).collect());
            Ok(op)
        }
    }
}

/// Richardson extrapolation of a second-order quantity computed at spacing
/// `h` (`coarse`) and `h/2` (`fine`).
pub fn richardson<T: Scalar>(coarse: T, fine: T) -> T {
    (T::cst(4.0) * fine - coarse) / T::cst(3.0)
}

/// Lowest `k` eigenvalues on `grid` and on its refinement, Richardson combined.
pub fn extrapolated_eigenvalues<F: Fn(f64) -> f64>(potential: F, grid: &RadialGrid<f64>, k: usize) -> Result<Vec<f64>> {
    let coarse = discretize(&potential, grid)?.eigenvalues_lowest(k)?;
    let fine = discretize(&potential, &grid.refined()?)?.eigenvalues_lowest(k)?;
    Ok(coarse.iter().zip(&fine).map(|(&c, &f)| richardson(c, f)).collect())
}

/// Bisection root of a continuous `f` on a sign-changing bracket.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(crate::error::domain(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn two_by_two() {
        let op = TridiagonalOperator::from_parts(vec![2.0f64, 2.0], vec![-1.0]).unwrap();
        let e = op.eigenvalues_lowest(2).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] - 3.0).abs() < 1e-15);
        assert!(op.eigenvalues_lowest(3).is_err());
    }

    /// Determinant of `A − x` by the three-term continuant recurrence.
    fn char_poly(d: &[f64], e: &[f64], x: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, d[0] - x);
        for i in 1..d.len() {
            let p2 = (d[i] - x) * p1 - e[i - 1] * e[i - 1] * p0;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    #[test]
    fn matches_brute_force_on_small_matrices() {
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
        };
        for n in 2..=12 {
            let d: Vec<f64> = (0..n).map(|_| next()).collect();
            let e: Vec<f64> = (0..n - 1).map(|_| next()).collect();
            let op = TridiagonalOperator::from_parts(d.clone(), e.clone()).unwrap();
            let ours = op.eigenvalues_lowest(n).unwrap();
            let dense = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    d[i]
                } else if i + 1 == j {
                    e[i]
                } else if j + 1 == i {
                    e[j]
                } else {
                    0.0
                }
            });
            let mut reference: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (a, b) in ours.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-12, "n={n}: {a} vs {b}");
            }
            // each root brackets a sign change of the characteristic polynomial
            for &lam in &ours {
                let dl = 1e-9 * lam.abs().max(1.0);
                let (a, b) = (char_poly(&d, &e, lam - dl), char_poly(&d, &e, lam + dl));
                assert!(a * b <= 0.0 || a.abs() < 1e-12 || b.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn particle_in_a_box() {
        let mut prev_err = f64::INFINITY;
        for n in [199, 399, 799] {
            let g = RadialGrid::uniform(1.0, n).unwrap();
            let op = discretize(|_| 0.0, &g).unwrap();
            let h = g.step();
            assert!(op.diag().iter().all(|&d| d == 2.0 / (h * h)));
            let e = op.eigenvalues_lowest(2).unwrap();
            let pi2 = std::f64::consts::PI.powi(2);
            let err = (e[0] - pi2).abs();
            assert!(err < prev_err);
            prev_err = err;
            assert!((e[1] / (4.0 * pi2) - 1.0).abs() < 1e-3);
        }
        assert!(prev_err / std::f64::consts::PI.powi(2) < 2e-6);
    }

    #[test]
    fn sturm_count_matches_eigenvalues() {
        let g = RadialGrid::uniform(10.0, 200).unwrap();
        let op = discretize(|r| r * r, &g).unwrap();
        let e = op.eigenvalues_lowest(10).unwrap();
        for (j, &lam) in e.iter().enumerate() {
            assert_eq!(op.sturm_count(lam - 1e-6), j);
            assert_eq!(op.sturm_count(lam + 1e-6), j + 1);
        }
    }

    #[test]
    fn non_finite_potential_rejected() {
        let g = RadialGrid::uniform(1.0, 20).unwrap();
        assert!(matches!(discretize(|r: f64| 1.0 / (r - g.points()[3]), &g), Err(Error::NonFinite(_))));
    }

    #[test]
    fn log_mapped_hydrogen() {
        // −φ'' − 2/r φ: eigenvalues −1/(n+1)² for l = 0
        let g = RadialGrid::log_mapped(1e-8, 80.0, 1500).unwrap();
        let e = extrapolated_eigenvalues(|r| -2.0 / r, &g, 3).unwrap();
        for (n, &v) in e.iter().enumerate() {
            let exact = -1.0 / ((n + 1) as f64).powi(2);
            assert!((v / exact - 1.0).abs() < 1e-6, "n={n}: {v}");
        }
        let op = discretize(|r| -2.0 / r, &g).unwrap();
        let c = op.conjugation().unwrap();
        assert!((c[0] * g.points()[0].sqrt() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_mapped_is_symmetric_form() {
        let g = RadialGrid::log_mapped(1e-3, 5.0, 30).unwrap();
        let op = discretize(|r| r, &g).unwrap();
        assert_eq!(op.offdiag().len(), 29);
        let x: Vec<f64> = (0..30).map(|i| (i as f64 * 0.3).sin()).collect();
        let y: Vec<f64> = (0..30).map(|i| (i as f64 * 0.17).cos()).collect();
        let xay: f64 = x.iter().zip(op.apply(&y)).map(|(a, b)| a * b).sum();
        let yax: f64 = y.iter().zip(op.apply(&x)).map(|(a, b)| a * b).sum();
        assert!((xay - yax).abs() < 1e-9 * xay.abs().max(1.0));
    }

    #[test]
    fn bisect_root_finds_sqrt2() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(bisect_root(|x| x * x + 1.0, 0.0, 2.0).is_err());
    }
}
