//! The `spectrum`, `wavefunction` and `xpct` subcommands.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context};
use dirac_class::dirac::OddPotential;
use dirac_class::solutions::{
    solution, spectrum_table, ClassParams, CosineBranch, CoulombParams, MorseParams, OscillatorParams, ZeroEnergyParams,
};
use dirac_class::xpct::{
    derive, mapped_level, verify_identity, Family, ReferenceParams, SpectrumRelation, TransformSpec,
    IDENTITY_TOLERANCE,
};
use dirac_class::Grid;
use serde_json::json;

use crate::args::{
    Branch, ClassArgs, ClassName, FamilyName, Format, SpectrumArgs, TextFormat, WavefunctionArgs, XpctArgs,
};

/// Decimal with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn open_out(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn need<T>(v: Option<T>, flag: &str, class: ClassName) -> anyhow::Result<T> {
    match v {
        Some(v) => Ok(v),
        None => bail!("--{flag} is required for class {}", class_name(class)),
    }
}

fn class_name(c: ClassName) -> &'static str {
    match c {
        ClassName::Oscillator => "oscillator",
        ClassName::Coulomb => "coulomb",
        ClassName::Morse => "morse",
        ClassName::ZeroEnergy => "zero-energy",
    }
}

pub fn class_params(a: &ClassArgs) -> anyhow::Result<ClassParams> {
    let c = a.class;
    Ok(match c {
        ClassName::Oscillator => {
            let kappa = need(a.kappa, "kappa", c)?;
            ClassParams::Oscillator(OscillatorParams::new(kappa as f64, a.lambda, a.alpha)?)
        }
        ClassName::Coulomb => {
            let branch = match a.branch {
                Branch::Positive => CosineBranch::Positive,
                Branch::Negative => CosineBranch::Negative,
            };
            let p = CoulombParams::new(need(a.z, "Z", c)?, need(a.kappa, "kappa", c)?, a.alpha, branch)?;
            ClassParams::Coulomb(p)
        }
        ClassName::Morse => {
            let p = MorseParams::new(need(a.tau, "tau", c)?, need(a.rho, "rho", c)?, a.lambda, a.alpha)?;
            ClassParams::Morse(p)
        }
        ClassName::ZeroEnergy => ClassParams::ZeroEnergy(ZeroEnergyParams::new(
            need(a.l, "l", c)?,
            need(a.beta, "beta", c)?,
            a.lambda,
            a.alpha,
        )?),
    })
}

pub fn spectrum(a: &SpectrumArgs) -> anyhow::Result<()> {
    if a.nmin > a.nmax {
        bail!("--nmin {} exceeds --nmax {}", a.nmin, a.nmax);
    }
    let params = class_params(&a.class)?;
    let table = spectrum_table(params, a.nmin, a.nmax);
    let mut out = open_out(a.common.out.as_deref())?;
    match a.format {
        Format::Csv => {
            let mut w = csv_writer(&mut out);
            w.write_record(["n", "energy", "status", "reason"])?;
            for e in &table {
                let energy = e.energy.map(fmt17).unwrap_or_default();
                let status = if e.admitted() { "admitted" } else { "skipped" };
                w.write_record([e.n.to_string(), energy, status.into(), e.skipped.clone().unwrap_or_default()])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let levels: Vec<_> = table
                .iter()
                .map(|e| json!({"n": e.n, "energy": e.energy, "admitted": e.admitted(), "reason": e.skipped}))
                .collect();
            let doc = json!({"class": params.tag(), "levels": levels});
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn parse_grid(spec: &str) -> anyhow::Result<Grid> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> anyhow::Result<f64> { s.parse().with_context(|| format!("bad number {s:?} in grid spec")) };
    let count = |s: &str| -> anyhow::Result<usize> { s.parse().with_context(|| format!("bad point count {s:?}")) };
    Ok(match parts.as_slice() {
        ["uniform", n, r_max] => Grid::uniform(num(r_max)?, count(n)?)?,
        ["log", n, r_min, r_max] => Grid::log_mapped(num(r_min)?, num(r_max)?, count(n)?)?,
        ["line", n, left, right] => Grid::line(num(left)?, num(right)?, count(n)?)?,
        _ => bail!("grid spec {spec:?}: expected uniform:N:RMAX, log:N:RMIN:RMAX or line:N:LEFT:RIGHT"),
    })
}

pub fn wavefunction(a: &WavefunctionArgs) -> anyhow::Result<()> {
    let Some(spec) = a.grid.as_deref().filter(|s| !s.trim().is_empty()) else {
        bail!("grid required (--grid uniform:N:RMAX, log:N:RMIN:RMAX or line:N:LEFT:RIGHT)");
    };
    let grid = parse_grid(spec)?;
    let sol = solution(class_params(&a.class)?, a.n)?;
    let mut out = open_out(a.common.out.as_deref())?;
    let mut w = csv_writer(&mut out);
    w.write_record(["r", "phi", "theta"])?;
    for &r in grid.points() {
        let (phi, theta) = (sol.phi(r), sol.theta(r));
        if !phi.is_finite() || !theta.is_finite() {
            bail!("non-finite spinor value at r = {r}");
        }
        w.write_record([fmt17(r), fmt17(phi), fmt17(theta)])?;
    }
    w.flush()?;
    drop(w);
    out.flush()?;
    Ok(())
}

fn family(a: &XpctArgs) -> anyhow::Result<Family> {
    Ok(match a.family {
        FamilyName::Square => Family::Square,
        FamilyName::Neglog => Family::NegLog { tau: a.tau },
        FamilyName::Power => match a.mu {
            Some(mu) => Family::Power { mu },
            None => bail!("--mu is required for the power family"),
        },
    })
}

pub fn w_form(w: &OddPotential) -> String {
    match *w {
        OddPotential::Zero => "0".into(),
        OddPotential::Linear { strength } => format!("{strength} r"),
        OddPotential::Exponential { coefficient, tau } => format!("{coefficient} exp(-{tau} r)"),
        OddPotential::PowerLaw { coefficient, exponent } => format!("{coefficient} r^({exponent})"),
    }
}

fn relation_text(r: &SpectrumRelation) -> (String, String) {
    match *r {
        SpectrumRelation::Coulomb { z, sigma } => (
            "coulomb".into(),
            format!("(alpha Z) eps = -N sqrt(1 - eps^2), N = n + 1/2 + |sigma + 1/2|, Z = {z}, sigma = {sigma}"),
        ),
        SpectrumRelation::Morse { tangent, alpha_tau } => {
            ("morse".into(), format!("eps^2 + (T eps - n alpha tau)^2 = 1, T = {tangent}, alpha tau = {alpha_tau}"))
        }
        SpectrumRelation::ZeroEnergy { beta } => {
            ("zero-energy".into(), format!("S = 0, eps = 1, n = 0 only, beta = {beta}"))
        }
    }
}

pub fn xpct(a: &XpctArgs) -> anyhow::Result<()> {
    let fam = family(a)?;
    let kappa_hat = a.kappa_hat.unwrap_or(match a.family {
        FamilyName::Square => 2.0,
        FamilyName::Neglog => 0.0,
        FamilyName::Power => -1.0,
    });
    let spec = TransformSpec {
        family: fam,
        reference: ReferenceParams { lambda: a.lambda, kappa_hat, alpha: a.alpha },
        rho: a.rho,
    };
    let result = derive(&spec)?;
    let xs: Vec<f64> = (0..50).map(|i| 0.5 + 4.5 * i as f64 / 49.0).collect();
    let identity = verify_identity(&spec, &result, &xs);
    let (class, relation) = relation_text(&result.spectrum);
    let levels: Vec<(u32, Result<f64, String>)> = (0..a.levels)
        .map(|n| (n, mapped_level(&spec, &result, n).map(|l| l.energy).map_err(|e| e.to_string())))
        .collect();
    let mut out = open_out(a.common.out.as_deref())?;
    match a.format {
        TextFormat::Text => {
            writeln!(out, "family: {}", fam.name())?;
            writeln!(out, "kappa: {}", result.kappa)?;
            writeln!(out, "W(r): {}", w_form(&result.w))?;
            writeln!(out, "sine: {}", result.sine)?;
            writeln!(out, "cosine: {}", result.cosine)?;
            writeln!(out, "class: {class}")?;
            writeln!(out, "spectrum relation: {relation}")?;
            writeln!(out, "identity constant K: {}", result.constant)?;
            match &identity {
                Ok(rep) => writeln!(
                    out,
                    "identity check: constant (relative variance {:e} <= {:e})",
                    rep.relative_variance, IDENTITY_TOLERANCE
                )?,
                Err(e) => writeln!(out, "identity check: failed ({e})")?,
            }
            for (n, e) in &levels {
                match e {
                    Ok(eps) => writeln!(out, "level {n}: {}", fmt17(*eps))?,
                    Err(why) => writeln!(out, "level {n}: skipped ({why})")?,
                }
            }
        }
        TextFormat::Json => {
            let doc = json!({
                "family": fam.name(),
                "kappa": result.kappa,
                "w": w_form(&result.w),
                "sine": result.sine,
                "cosine": result.cosine,
                "class": class,
                "spectrum_relation": relation,
                "constant": result.constant,
                "identity": match &identity {
                    Ok(rep) => json!({"constant": true, "relative_variance": rep.relative_variance}),
                    Err(e) => json!({"constant": false, "error": e.to_string()}),
                },
                "levels": levels.iter().map(|(n, e)| match e {
                    Ok(eps) => json!({"n": n, "energy": eps}),
                    Err(why) => json!({"n": n, "skipped": why}),
                }).collect::<Vec<_>>(),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        }
    }
    out.flush()?;
    if identity.is_err() {
        bail!("the first-order identity is not constant for these parameters");
    }
    Ok(())
}
