//! Check computations for each verification suite.

use std::f64::consts::FRAC_PI_4;

use dirac_class::dirac::{lower_from_upper, EffectivePotential, UpperDerivative};
use dirac_class::numerics::{
    dirac_residual, extrapolated_eigenvalues, generic_schrodinger_residual, quadrature_inner, quadrature_norm,
    schrodinger_residual,
};
use dirac_class::so21::{
    ladder_overlap_check, nonrelativistic_pct, tilting_infinitesimal_check, OscillatorState, So21Residuals,
};
use dirac_class::solutions::{
    coulomb_solution, morse_solution, oscillator_solution, spectrum_table, zero_energy_profile, zero_energy_solution,
    ClassParams, CosineBranch, CoulombParams, MorseParams, OscillatorParams, SpinorSolution, ZeroEnergyParams,
};
use dirac_class::superalgebra::{realize_algebra, susy_degeneracy_check, RelationResiduals, Superpotential};
use dirac_class::xpct::{
    derive, map_wavefunctions, maps, mapped_level, verify_identity, Family, ReferenceParams, TransformSpec,
};
use dirac_class::{Error, Grid, Jet, Result};
use num_rational::Ratio;

use crate::verify::Check;

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    let mut m: f64 = 0.0;
    for v in it {
        let v = v?;
        if v.is_nan() {
            return Err(Error::NonFinite("NaN in check".into()));
        }
        m = m.max(v);
    }
    Ok(m)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn residual_value(r: dirac_class::numerics::ResidualNorm) -> Result<f64> {
    r.value().ok_or_else(|| Error::Singular("residual of a vanishing function".into()))
}

/// Solutions paired with the grid each one is checked on.
type Catalog = Vec<(SpinorSolution, Grid)>;

fn oscillator_catalog() -> Result<Catalog> {
    let mut out = Vec::new();
    for kappa in [-2.0, -1.0, 1.0, 2.0] {
        for n in 0..=5 {
            out.push((oscillator_solution(n, kappa, 1.0, 1.0)?, Grid::uniform(12.0, 4000)?));
        }
    }
    Ok(out)
}

fn coulomb_catalog() -> Result<Catalog> {
    let mut out = Vec::new();
    for kappa in [-1, 1, 2] {
        let p = CoulombParams::new(-1.0, kappa, 0.5, CosineBranch::Positive)?;
        for n in 0..=5 {
            let mu = p.scale(n);
            out.push((coulomb_solution(n, p)?, Grid::log_mapped(1e-8 / mu, (80.0 + 8.0 * n as f64) / mu, 6000)?));
        }
    }
    Ok(out)
}

fn morse_params() -> Result<MorseParams> {
    MorseParams::new(1.0, FRAC_PI_4, 1.0, 0.1)
}

fn morse_catalog() -> Result<Catalog> {
    let p = morse_params()?;
    (0..=5).map(|n| Ok((morse_solution(n, p)?, Grid::line(-4.5, 40.0, 6000)?))).collect()
}

fn zero_energy_catalog() -> Result<Catalog> {
    [(1, -2.0), (0, 3.0), (1, 3.0)]
        .into_iter()
        .map(|(l, beta)| {
            let p = ZeroEnergyParams::new(l, beta, 1.2, 1.0)?;
            Ok((zero_energy_solution(p)?, Grid::log_mapped(1e-3, 1e9, 8000)?))
        })
        .collect()
}

fn first_order(cat: &[(SpinorSolution, Grid)]) -> Result<f64> {
    max_of(cat.iter().map(|(sol, grid)| {
        let phi = |r: Jet<f64>| sol.phi(r);
        let theta = |r: Jet<f64>| sol.theta(r);
        residual_value(dirac_residual(sol.potential(), sol.energy(), &phi, &theta, grid)?)
    }))
}

fn second_order(cat: &[(SpinorSolution, Grid)]) -> Result<f64> {
    max_of(cat.iter().map(|(sol, grid)| {
        let phi = |r: Jet<f64>| sol.phi(r);
        residual_value(schrodinger_residual(sol.potential(), sol.energy(), &phi, grid)?)
    }))
}

fn reconstruction(cat: &[(SpinorSolution, Grid)]) -> Result<f64> {
    max_of(cat.iter().map(|(sol, grid)| {
        let phi = |r: f64| sol.phi(r);
        let dphi = |r: f64| sol.dphi(r);
        let th = lower_from_upper(sol.potential(), sol.energy(), &phi, UpperDerivative::Analytic(&dphi))?;
        let want = grid.sample(|r| sol.theta(r));
        let diff: Vec<f64> = grid.points().iter().zip(&want).map(|(&r, &w)| th(r) - w).collect();
        let norm = quadrature_norm(grid, &want)?;
        let scale = if norm > 0.0 { norm } else { quadrature_norm(grid, &grid.sample(|r| sol.phi(r)))? };
        Ok(quadrature_norm(grid, &diff)? / scale)
    }))
}

fn gram(grid: &Grid, a: &SpinorSolution, b: &SpinorSolution, spinor: bool) -> Result<f64> {
    let mut s = quadrature_inner(grid, &grid.sample(|r| a.phi(r)), &grid.sample(|r| b.phi(r)))?;
    if spinor {
        s += quadrature_inner(grid, &grid.sample(|r| a.theta(r)), &grid.sample(|r| b.theta(r)))?;
    }
    Ok(s)
}

/// Largest `|⟨ψ_n, ψ_m⟩| / (‖ψ_n‖ ‖ψ_m‖)` over distinct levels, with or
/// without the lower component.
fn orthogonality(cat: &[(SpinorSolution, Grid)], spinor: bool) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, (a, grid)) in cat.iter().enumerate() {
        for (b, _) in &cat[i + 1..] {
            let norm = (gram(grid, a, a, spinor)? * gram(grid, b, b, spinor)?).sqrt();
            worst = worst.max(gram(grid, a, b, spinor)?.abs() / norm);
        }
    }
    Ok(worst)
}

type CatalogFn = fn() -> Result<Catalog>;

pub fn residuals() -> Vec<Check> {
    let catalogs: [(&str, CatalogFn); 4] = [
        ("oscillator", oscillator_catalog),
        ("coulomb", coulomb_catalog),
        ("morse", morse_catalog),
        ("zero_energy", zero_energy_catalog),
    ];
    let mut out = Vec::new();
    for (name, build) in catalogs {
        let cat = build();
        let with = |f: fn(&[(SpinorSolution, Grid)]) -> Result<f64>| match &cat {
            Ok(c) => f(c),
            Err(e) => Err(e.clone()),
        };
        out.push(Check::at_most(
            &format!("residuals.first_order.{name}"),
            "first-order radial Dirac system",
            with(first_order),
            1e-8,
        ));
        out.push(Check::at_most(
            &format!("residuals.second_order.{name}"),
            "second-order equation for the upper component",
            with(second_order),
            1e-8,
        ));
        out.push(Check::at_most(
            &format!("residuals.lower_component.{name}"),
            "lower component from the upper one",
            with(reconstruction),
            1e-6,
        ));
    }
    // φ ~ r for κ = −1 makes the end weight an O(h³) error: refine
    let fine = || -> Result<Vec<Catalog>> {
        let grid = Grid::uniform(12.0, 16000)?;
        let cat: Vec<_> = oscillator_catalog()?.into_iter().map(|(s, _)| (s, grid.clone())).collect();
        Ok(cat.chunks(6).map(<[_]>::to_vec).collect())
    };
    out.push(Check::at_most(
        "residuals.orthogonality.oscillator",
        "orthogonal upper components at fixed parameters",
        fine().and_then(|cs| max_of(cs.iter().map(|c| orthogonality(c, false)))),
        1e-8,
    ));
    out.push(Check::at_most(
        "residuals.normalization.oscillator",
        "unit-normalized upper components",
        fine().and_then(|cs| max_of(cs.iter().flatten().map(|(s, g)| Ok((gram(g, s, s, false)? - 1.0).abs())))),
        1e-8,
    ));
    out.push(Check::at_most(
        "residuals.orthogonality.morse",
        "orthogonal Morse spinors",
        morse_catalog().and_then(|c| orthogonality(&c, true)),
        1e-8,
    ));
    out
}

fn oscillator_fd() -> Result<f64> {
    max_of([1.0, 2.0].into_iter().flat_map(|kappa| {
        let run = || -> Result<Vec<f64>> {
            let p = OscillatorParams::new(kappa, 1.0, 1.0)?;
            let sol = oscillator_solution(0, kappa, 1.0, 1.0)?;
            let f = EffectivePotential::new(*sol.potential(), sol.energy());
            let fd = extrapolated_eigenvalues(|r| f.without_energy_term(r), &Grid::uniform(12.0, 4000)?, 5)?;
            Ok(fd.iter().enumerate().map(|(n, &e)| rel(e, p.energy(n as u32).powi(2) - 1.0)).collect())
        };
        match run() {
            Ok(v) => v.into_iter().map(Ok).collect::<Vec<_>>(),
            Err(e) => vec![Err(e)],
        }
    }))
}

fn coulomb_acceptance() -> Result<CoulombParams> {
    let alpha = 1.0 / 137.036;
    CoulombParams::new(-0.5 / alpha, -1, alpha, CosineBranch::Positive)
}

fn coulomb_fd() -> Result<f64> {
    let p = coulomb_acceptance()?;
    let alpha = p.alpha;
    max_of((0..=3u32).map(|n| {
        let eps = p.energy(n);
        let mu = p.scale(n);
        let f = EffectivePotential::new(p.potential()?, eps);
        let grid = Grid::log_mapped(1e-8 / mu, (80.0 + 8.0 * n as f64) / mu, 4000)?;
        let fd = extrapolated_eigenvalues(|r| f.without_energy_term(r), &grid, n as usize + 1)?;
        Ok(rel(fd[n as usize], (eps * eps - 1.0) / (alpha * alpha)))
    }))
}

fn morse_checks() -> Vec<Check> {
    let run = || -> Result<(f64, f64, f64)> {
        let p = morse_params()?;
        let (t, at, alpha) = (FRAC_PI_4.tan(), 0.1, 0.1);
        let bound = ((1.0 + t * t).sqrt() / at).floor() as u32;
        let expected = (0..=bound)
            .filter(|&n| {
                let b = n as f64 * at;
                let eps = (t * b + (1.0 + t * t - b * b).sqrt()) / (1.0 + t * t);
                t * eps / at - n as f64 > 0.0
            })
            .count();
        let admitted: Vec<u32> =
            spectrum_table(ClassParams::Morse(p), 0, bound + 6).iter().filter(|e| e.admitted()).map(|e| e.n).collect();
        let grid = Grid::line(-4.5, 40.0, 6000)?;
        let mut relation: f64 = 0.0;
        let mut fd_dev: f64 = 0.0;
        for &n in &admitted {
            let eps = p.energy(n)?;
            let x = t * eps - n as f64 * at;
            relation = relation.max((eps * eps + x * x - 1.0).abs());
            let f = EffectivePotential::new(p.potential()?, eps);
            let fd = extrapolated_eigenvalues(|r| f.without_energy_term(r), &grid, n as usize + 1)?;
            fd_dev = fd_dev.max(rel(fd[n as usize], (eps * eps - 1.0) / (alpha * alpha)));
        }
        Ok((relation, fd_dev, (admitted.len() as f64 - expected as f64).abs()))
    };
    let r = run();
    let pick = |i: usize| r.as_ref().map(|v| [v.0, v.1, v.2][i]).map_err(Clone::clone);
    vec![
        Check::at_most("spectra.morse.relation", "Morse energy quadratic", pick(0), 1e-12),
        Check::at_most("spectra.morse.fd", "Morse energies vs finite differences", pick(1), 1e-4),
        Check::at_most("spectra.morse.level_count", "admitted levels within the Morse bound", pick(2), 0.0),
    ]
}

fn zero_energy_checks() -> Vec<Check> {
    let run = |energy: f64| -> Result<Vec<f64>> {
        let grid = Grid::log_mapped(1e-3, 1e9, 8000)?;
        let mut v = Vec::new();
        for beta in [-2.0, 3.0] {
            for l in [0u32, 1] {
                let p = ZeroEnergyParams::new(l, beta, 1.0, 1.0)?;
                let sol = if p.normalizable() { zero_energy_solution(p)? } else { zero_energy_profile(p)? };
                let phi = |r: Jet<f64>| sol.phi(r);
                v.push(residual_value(schrodinger_residual(sol.potential(), energy, &phi, &grid)?)?);
            }
        }
        Ok(v)
    };
    vec![
        Check::at_most(
            "spectra.zero_energy.residual",
            "zero-energy profile at rest energy",
            run(1.0).map(|v| v.into_iter().fold(0.0, f64::max)),
            1e-8,
        ),
        Check::at_least(
            "spectra.zero_energy.shifted",
            "no solution away from rest energy",
            run(1.01).map(|v| v.into_iter().fold(f64::INFINITY, f64::min)),
            1e-3,
        ),
    ]
}

pub fn spectra() -> Vec<Check> {
    let mut out = vec![
        Check::at_most("spectra.oscillator.fd", "Dirac-Oscillator energy spectrum", oscillator_fd(), 1e-6),
        Check::at_most("spectra.coulomb.fd", "Dirac-Coulomb energy spectrum", coulomb_fd(), 1e-5),
        Check::at_most(
            "spectra.coulomb.ground_state",
            "Coulomb ground state sqrt(1 - (alpha Z)^2)",
            coulomb_acceptance().map(|p| (p.energy(0) - (1.0f64 - 0.25).sqrt()).abs()),
            1e-10,
        ),
        Check::at_most(
            "spectra.coulomb.nonrelativistic",
            "nonrelativistic limit -Z^2/(2N^2)",
            CoulombParams::new(-1.0, -1, 1e-4, CosineBranch::Positive).and_then(|p| {
                max_of((0..=2u32).map(|n| {
                    let big_n = n as f64 + 1.0;
                    Ok(rel((p.energy(n) - 1.0) / 1e-8, -1.0 / (2.0 * big_n * big_n)))
                }))
            }),
            1e-6,
        ),
    ];
    out.extend(morse_checks());
    out.extend(zero_energy_checks());
    out
}

fn smooth(r: f64) -> f64 {
    r.powi(6) * (-r * r).exp()
}

type PickRelation = fn(&RelationResiduals) -> f64;

pub fn algebra() -> Vec<Check> {
    let mut out = Vec::new();
    let g = Superpotential::oscillator(-2.0, 1.0);
    let mut centrality = Vec::new();
    let mut l0_defect = Vec::new();
    for n in [256usize, 512] {
        let alg = g.as_ref().map_err(Clone::clone).and_then(|g| realize_algebra(g, &Grid::uniform(8.0, n)?));
        let res = alg.as_ref().map(|a| (a.relation_residuals(), a.l0.norm())).map_err(Clone::clone);
        let fields: [(&str, PickRelation); 7] = [
            ("l3_lp", |r| r.l3_lp),
            ("l3_lm", |r| r.l3_lm),
            ("anticommutator", |r| r.anticommutator),
            ("l0_l3", |r| r.l0_l3),
            ("l0_lp", |r| r.l0_lp),
            ("l0_lm", |r| r.l0_lm),
            ("adjoint", |r| r.adjoint),
        ];
        for (name, pick) in fields {
            out.push(Check::at_most(
                &format!("algebra.exact.{name}.n{n}"),
                "graded algebra relation on matrices (relative to the even element)",
                res.as_ref().map(|(r, s)| pick(r) / s).map_err(Clone::clone),
                1e-13,
            ));
        }
        centrality.push(alg.as_ref().map(|a| a.centrality_defect(&smooth)).map_err(Clone::clone));
        l0_defect.push(alg.as_ref().map(|a| a.l0_discretization_defect(&smooth)).map_err(Clone::clone));
    }
    let ratio = |v: &[Result<f64>]| -> Result<f64> { Ok((v[0].clone()? / v[1].clone()? - 4.0).abs()) };
    out.push(Check::at_most(
        "algebra.convergence.l0_lpm",
        "[L0, L±] second-order decay (|ratio - 4|)",
        ratio(&centrality),
        0.5,
    ));
    out.push(Check::at_most(
        "algebra.convergence.l0_discretization",
        "even element vs continuum operator (|ratio - 4|)",
        ratio(&l0_defect),
        0.5,
    ));
    let k = 5;
    let susy = g.and_then(|g| susy_degeneracy_check(&g, &Grid::uniform(12.0, 1500)?, k));
    out.push(Check::at_most(
        "algebra.susy.pairing",
        "SUSY partner degeneracy",
        susy.as_ref().map(|r| r.max_pair_deviation()).map_err(Clone::clone),
        1e-6,
    ));
    out.push(Check::at_most(
        "algebra.susy.unpaired",
        "single unpaired zero mode of V- (|count - 1|)",
        susy.map(|r| {
            let unpaired = r.minus.len() - r.pairs.len();
            let flagged = usize::from(r.zero_mode.is_some());
            (unpaired as f64 - 1.0).abs() + (flagged as f64 - 1.0).abs()
        }),
        0.0,
    ));
    out
}

fn exact_maps() -> f64 {
    let q = Ratio::<i64>::new;
    let ok = maps::square_kappa(q(2, 1), q(1, 1)) == q(3, 4)
        && maps::square_kappa(maps::square_kappa_hat(q(-5, 3)), q(1, 1)) == q(-5, 3)
        && maps::neglog_w_coefficient(q(1, 1), q(9, 4), q(1, 1)) == q(-9, 8)
        && maps::neglog_kappa_hat(q(5, 2)) == q(9, 2)
        && maps::power_beta(q(-1, 1)) == q(-2, 1)
        && maps::power_beta(q(-1, 6)) == q(3, 1)
        && maps::power_w(q(1, 1), q(-1, 1), q(1, 1)) == (q(-1, 1), q(-3, 1))
        && maps::power_kappa(maps::power_kappa_hat(q(-1, 1), q(3, 1)), q(-1, 6), q(1, 1)) == q(-1, 1);
    if ok {
        0.0
    } else {
        1.0
    }
}

fn proportional(a: &dyn Fn(f64) -> f64, b: &dyn Fn(f64) -> f64, rs: &[f64]) -> f64 {
    let peak = rs.iter().map(|&r| b(r).abs()).fold(0.0, f64::max);
    let ratios: Vec<f64> = rs.iter().filter(|&&r| b(r).abs() > 1e-6 * peak).map(|&r| a(r) / b(r)).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let var = ratios.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / ratios.len() as f64;
    var / (mean * mean)
}

struct FamilyCase {
    name: &'static str,
    spec: TransformSpec,
    levels: u32,
    catalog: Box<dyn Fn(u32) -> Result<(f64, SpinorSolution)>>,
    points: Vec<f64>,
}

fn families() -> Result<Vec<FamilyCase>> {
    let cp = CoulombParams::new(-1.0, -1, 0.5, CosineBranch::Positive)?;
    let mp = morse_params()?;
    let zp = ZeroEnergyParams::new(1, -2.0, 1.2, 1.0)?;
    Ok(vec![
        FamilyCase {
            name: "square",
            spec: TransformSpec {
                family: Family::Square,
                reference: ReferenceParams { lambda: 1.0, kappa_hat: maps::square_kappa_hat(cp.sigma()), alpha: 0.5 },
                rho: cp.sine().asin(),
            },
            levels: 4,
            catalog: Box::new(move |n| Ok((cp.energy(n), coulomb_solution(n, cp)?))),
            points: (1..400).map(|i| i as f64 * 0.05).collect(),
        },
        FamilyCase {
            name: "neglog",
            spec: TransformSpec {
                family: Family::NegLog { tau: 1.0 },
                reference: ReferenceParams { lambda: 1.0, kappa_hat: 0.0, alpha: 0.1 },
                rho: FRAC_PI_4,
            },
            levels: 10,
            catalog: Box::new(move |n| Ok((mp.energy(n)?, morse_solution(n, mp)?))),
            points: (0..400).map(|i| -3.0 + i as f64 * 0.05).collect(),
        },
        FamilyCase {
            name: "power",
            spec: TransformSpec {
                family: Family::Power { mu: -1.0 },
                reference: ReferenceParams { lambda: 1.2, kappa_hat: -2.0, alpha: 1.0 },
                rho: 0.0,
            },
            levels: 1,
            catalog: Box::new(move |_| Ok((1.0, zero_energy_solution(zp)?))),
            points: (1..200).map(|i| i as f64 * 0.03).collect(),
        },
    ])
}

pub fn xpct() -> Vec<Check> {
    let mut out = vec![Check::at_most(
        "xpct.maps.exact",
        "parameter maps in exact arithmetic (0 = equal)",
        Ok(exact_maps()),
        0.0,
    )];
    let cases = match families() {
        Ok(c) => c,
        Err(e) => return vec![Check::at_most("xpct.setup", "transformation test cases", Err(e), 0.0)],
    };
    let xs: Vec<f64> = (0..50).map(|i| 0.5 + 4.5 * i as f64 / 49.0).collect();
    for c in cases {
        let derived = derive(&c.spec);
        let identity = derived.as_ref().map_err(Clone::clone).and_then(|r| verify_identity(&c.spec, r, &xs));
        out.push(Check::at_most(
            &format!("xpct.{}.identity", c.name),
            "first-order identity constant under the transformation",
            identity.map(|r| r.relative_variance),
            1e-10,
        ));
        let spectrum = derived.as_ref().map_err(Clone::clone).and_then(|r| {
            max_of((0..c.levels).map(|n| Ok((mapped_level(&c.spec, r, n)?.energy - (c.catalog)(n)?.0).abs())))
        });
        out.push(Check::at_most(
            &format!("xpct.{}.spectrum", c.name),
            "mapped spectrum vs catalog formula",
            spectrum,
            1e-13,
        ));
        let mapped = derived.as_ref().map_err(Clone::clone).and_then(|r| {
            max_of((0..c.levels.min(4)).map(|n| {
                let m = map_wavefunctions(&c.spec, r, n)?;
                let (_, sol) = (c.catalog)(n)?;
                Ok(proportional(&|x| m.phi(x), &|x| sol.phi(x), &c.points))
            }))
        });
        out.push(Check::at_most(
            &format!("xpct.{}.wavefunction", c.name),
            "mapped upper component proportional to catalog",
            mapped,
            1e-10,
        ));
    }
    out
}

type PickSo21 = fn(&So21Residuals) -> f64;

pub fn so21() -> Vec<Check> {
    let gammas = [0.0, 0.25, 1.0];
    let grid = Grid::log_mapped(1e-8 / 0.5, 30.0 / 0.5, 4000);
    let states = || -> Result<Vec<OscillatorState>> {
        let mut v = Vec::new();
        for g in gammas {
            for n in 0..=5 {
                v.push(OscillatorState::new(g, n, 0.5)?);
            }
        }
        Ok(v)
    };
    let over = |f: &dyn Fn(&OscillatorState, &Grid) -> Result<f64>| -> Result<f64> {
        let grid = grid.as_ref().map_err(Clone::clone)?;
        max_of(states()?.iter().map(|s| f(s, grid)))
    };
    let mut out = vec![
        Check::at_most(
            "so21.state.residual",
            "three-dimensional oscillator equation",
            over(&|s, grid| {
                let psi = |x: Jet<f64>| s.eval(x);
                residual_value(generic_schrodinger_residual(&|x| s.potential(x) - s.eigenvalue_term(), &psi, grid)?)
            }),
            1e-8,
        ),
        Check::at_most(
            "so21.state.norm",
            "normalized oscillator states",
            over(&|s, grid| {
                let f = grid.sample(|x| s.eval(x));
                Ok((quadrature_inner(grid, &f, &f)?.sqrt() - 1.0).abs())
            }),
            1e-8,
        ),
        Check::at_most(
            "so21.ladder",
            "D+(gamma) ladder coefficients and Casimir",
            over(&|s, grid| Ok(ladder_overlap_check(s.gamma(), s.n(), 0.5, grid)?.max_deviation())),
            1e-6,
        ),
        Check::at_most(
            "so21.fd_energy",
            "oscillator energy 2 lambda^2 (gamma + n + 1) vs finite differences",
            max_of(gammas.iter().map(|&g| {
                let s0 = OscillatorState::new(g, 0, 0.9)?;
                let ev = extrapolated_eigenvalues(|x| s0.potential(x), &Grid::log_mapped(1e-6, 12.0 / 0.9, 3000)?, 4)?;
                max_of(
                    ev.iter()
                        .enumerate()
                        .map(|(n, &e)| Ok(rel(e, OscillatorState::new(g, n as u32, 0.9)?.eigenvalue_term()))),
                )
            })),
            1e-6,
        ),
    ];
    let tilt = tilting_infinitesimal_check(0.25, 0.5, &Grid::uniform(40.0, 256).expect("fixed grid"));
    let relations: [(&str, &str, PickSo21); 5] = [
        ("l3_lp", "[L3, L+] = L+", |r| r.l3_lp),
        ("l3_lm", "[L3, L-] = -L-", |r| r.l3_lm),
        ("lp_lm", "[L+, L-] = -L3", |r| r.lp_lm),
        ("tilt_plus", "tilting generator on L3 + L1", |r| r.tilt_plus),
        ("tilt_minus", "tilting generator on L3 - L1", |r| r.tilt_minus),
    ];
    for (name, relation, pick) in relations {
        out.push(Check::at_most(
            &format!("so21.convergence.{name}"),
            &format!("{relation}, second-order decay (|ratio - 4|)"),
            tilt.as_ref().map(|t| (t.ratio(pick) - 4.0).abs()).map_err(Clone::clone),
            0.5,
        ));
    }
    out.push(Check::at_most(
        "so21.hermiticity",
        "symmetric realized L3 and L+^T = L-",
        tilt.as_ref().map(|t| t.fine.hermiticity.max(t.fine.adjoint)).map_err(Clone::clone),
        0.0,
    ));
    let pct = [
        (Family::Square, Grid::log_mapped(1e-6, 400.0, 6000)),
        (Family::NegLog { tau: 2.0 }, Grid::line(-3.0, 25.0, 6000)),
        (Family::Power { mu: -1.0 }, Grid::log_mapped(1e-3, 1e3, 6000)),
    ];
    out.push(Check::at_most(
        "so21.pct_residual",
        "nonrelativistic point canonical transformation images",
        max_of(pct.iter().flat_map(|(fam, grid)| {
            gammas.iter().flat_map(move |&g| {
                (0..3).map(move |n| {
                    let grid = grid.as_ref().map_err(Clone::clone)?;
                    let img = nonrelativistic_pct(*fam, g, n, 1.1)?;
                    residual_value(generic_schrodinger_residual(&|r| -img.f(r), &|r: Jet<f64>| img.psi(r), grid)?)
                })
            })
        })),
        1e-8,
    ));
    out
}
