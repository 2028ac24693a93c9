//! Command-line flags and the optional `key = value` config file.
//!
//! Config keys are the long flag names without dashes (`alpha = 0.5`,
//! `Z = -1`, `class = morse`). The file is spliced in ahead of the actual
//! flags, so flags given on the command line win.

use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dirac-class", version, about = "Spectra, spinors and checks for the Dirac-Oscillator class")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy levels with an admissibility tag per level.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Spinor components of one level on a grid, as CSV.
    #[command(args_override_self = true)]
    Wavefunction(WavefunctionArgs),
    /// Run a verification suite and print a JSON report.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Derive a new problem from the oscillator by a point transformation.
    #[command(args_override_self = true)]
    Xpct(XpctArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassName {
    Oscillator,
    Coulomb,
    Morse,
    ZeroEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Branch {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Residuals,
    Spectra,
    Algebra,
    Xpct,
    So21,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Residuals => "residuals",
            Suite::Spectra => "spectra",
            Suite::Algebra => "algebra",
            Suite::Xpct => "xpct",
            Suite::So21 => "so21",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Square,
    Neglog,
    Power,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `key = value` file with defaults for any of the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Physical parameters. Angles are in radians.
#[derive(Debug, Clone, Args)]
pub struct ClassArgs {
    #[arg(long, value_enum)]
    pub class: ClassName,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    /// Spin-orbit number (oscillator, coulomb).
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<i32>,
    /// Charge number (coulomb).
    #[arg(long = "Z", visible_alias = "z", allow_negative_numbers = true)]
    pub z: Option<f64>,
    /// Decay constant (morse).
    #[arg(long, allow_negative_numbers = true)]
    pub tau: Option<f64>,
    /// Rotation angle (morse).
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Power-law exponent (zero-energy).
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Orbital number (zero-energy).
    #[arg(long)]
    pub l: Option<u32>,
    /// Sign of `cos ρ` (coulomb).
    #[arg(long, value_enum, default_value = "positive")]
    pub branch: Branch,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value_t = 0)]
    pub nmin: u32,
    #[arg(long, default_value_t = 5)]
    pub nmax: u32,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value_t = 0)]
    pub n: u32,
    /// `uniform:N:RMAX`, `log:N:RMIN:RMAX` or `line:N:LEFT:RIGHT`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Threshold override `NAME=VALUE` for a named check (repeatable).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tolerances: Vec<String>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct XpctArgs {
    #[arg(long, value_enum)]
    pub family: FamilyName,
    /// Reference spin-orbit number; defaults to 2 (square), 0 (neglog), −1 (power).
    #[arg(long = "kappa-hat", allow_negative_numbers = true)]
    pub kappa_hat: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub tau: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Number of levels to list.
    #[arg(long, default_value_t = 4)]
    pub levels: u32,
    #[arg(long, value_enum, default_value = "text")]
    pub format: TextFormat,
    #[command(flatten)]
    pub common: Common,
}

/// Turns `key = value` lines into `(key, value)` pairs.
pub fn config_entries(text: &str) -> anyhow::Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("config line {}: expected key = value, got {line:?}", i + 1);
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key == "config" || key.starts_with('-') {
            bail!("config line {}: invalid key {key:?}", i + 1);
        }
        out.push((key.to_string(), value.to_string()));
    }
    Ok(out)
}

fn long_names(cmd: &clap::Command) -> Vec<String> {
    cmd.get_arguments()
        .flat_map(|a| a.get_long().into_iter().chain(a.get_all_aliases().into_iter().flatten()))
        .map(str::to_string)
        .collect()
}

/// `--key value` flags for `subcommand`. Keys that only other subcommands
/// accept are dropped, so one file can serve every subcommand.
pub fn config_flags(text: &str, subcommand: &str) -> anyhow::Result<Vec<String>> {
    let cli = Cli::command();
    let own = cli.find_subcommand(subcommand).map(long_names).unwrap_or_default();
    let any: Vec<String> = cli.get_subcommands().flat_map(long_names).collect();
    let mut out = Vec::new();
    for (key, value) in config_entries(text)? {
        if own.contains(&key) {
            out.push(format!("--{key}"));
            out.push(value);
        } else if !any.contains(&key) {
            bail!("config key {key:?} is not a flag of any subcommand");
        }
    }
    Ok(out)
}

/// The argument list with the config file, if any, spliced in after the
/// subcommand name.
pub fn expand_config(args: Vec<String>) -> anyhow::Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate().skip(1) {
        if a == "--config" {
            path = Some(args.get(i + 1).context("--config needs a path")?.clone());
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    let Some(at) = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let flags = config_flags(&text, &args[at])?;
    let mut out = args[..=at].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).unwrap()
    }

    #[test]
    fn config_lines() {
        let f = config_flags("# comment\nalpha = 0.5\n\nZ=-1  # charge\nnmax = 3\n", "spectrum").unwrap();
        assert_eq!(f, ["--alpha", "0.5", "--Z", "-1", "--nmax", "3"]);
        let f = config_flags("alpha = 0.5\nnmax = 3\n", "wavefunction").unwrap();
        assert_eq!(f, ["--alpha", "0.5"]);
        assert!(config_flags("alpha 0.5", "spectrum").is_err());
        assert!(config_flags("config = x", "spectrum").is_err());
        assert!(config_flags("colour = red", "spectrum").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        std::fs::write(&path, "class = coulomb\nalpha = 0.5\nkappa = -1\nZ = -1\n").unwrap();
        let args: Vec<String> = ["dirac-class", "spectrum", "--config", path.to_str().unwrap(), "--alpha", "0.25"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let cli = Cli::try_parse_from(expand_config(args).unwrap()).unwrap();
        let Command::Spectrum(s) = cli.command else { panic!() };
        assert_eq!(s.class.class, ClassName::Coulomb);
        assert_eq!(s.class.alpha, 0.25);
        assert_eq!(s.class.kappa, Some(-1));
        assert_eq!(s.class.z, Some(-1.0));
    }

    #[test]
    fn negative_values_and_names() {
        let cli = parse(&["dirac-class", "spectrum", "--class", "zero-energy", "--beta", "-2", "--l", "1"]);
        let Command::Spectrum(s) = cli.command else { panic!() };
        assert_eq!(s.class.beta, Some(-2.0));
        let cli = parse(&["dirac-class", "xpct", "--family", "power", "--mu", "-1", "--kappa-hat", "-2"]);
        let Command::Xpct(x) = cli.command else { panic!() };
        assert_eq!((x.mu, x.kappa_hat), (Some(-1.0), Some(-2.0)));
        assert!(Cli::try_parse_from(["dirac-class", "verify", "--suite", "nope"]).is_err());
    }
}
