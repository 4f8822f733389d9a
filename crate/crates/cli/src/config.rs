//! Run configuration: a flat `key = value` file overlaid by command-line flags.

use std::path::PathBuf;

use nsh_core::lattice::{parse_exact, ExactMatrix};
use nsh_core::optimize::SphereOptions;
use nsh_core::{DomainKind, DomainSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A number, or an exact expression such as `"8*pi"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Text(String),
}

/// A list given as an array or as a comma-separated string.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum List {
    Nums(Vec<f64>),
    Text(String),
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub alpha: Option<Scalar>,
    pub beta: Option<Scalar>,
    pub domain: Option<String>,
    #[serde(rename = "R")]
    pub r: Option<Scalar>,
    pub modes: Option<usize>,
    pub starts: Option<usize>,
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub residual_tol: Option<f64>,
    pub decrease_tol: Option<f64>,
    pub h_tolerance: Option<f64>,
    pub sobolev_starts: Option<usize>,
    pub sobolev_start: Option<bool>,
    pub sweep: Option<List>,
    pub counts: Option<List>,
    pub out: Option<PathBuf>,
    pub emit_pgm: Option<bool>,
    pub field: Option<PathBuf>,
    pub matrix: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub bump_radius: Option<f64>,
    pub bump_inner: Option<f64>,
    pub bump_outer: Option<f64>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $(if $src.$f.is_some() { $dst.$f = $src.$f; })*
    };
}

impl RawConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {}", e.message())))
    }

    /// Fields set in `flags` replace those in `self`.
    pub fn overlay(mut self, flags: RawConfig) -> Self {
        let s = &mut self;
        overlay!(s, flags; alpha, beta, domain, r, modes, starts, seed, max_iter, residual_tol,
            decrease_tol, h_tolerance, sobolev_starts, sobolev_start, sweep, counts, out, emit_pgm,
            field, matrix, from, to, bump_radius, bump_inner, bump_outer);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRef {
    /// Existence threshold `2 max{√(1−α), S₃³/S₄²}`.
    Beta0,
    /// Emptiness threshold `2S₂`.
    TwoS2,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BetaSpec {
    Value(f64),
    Relative { factor: f64, reference: BetaRef },
}

impl BetaSpec {
    /// `"2.5"`, `"beta0"`, `"1.05*beta0"`, `"0.9*2S2"`.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        let (factor, reference) = match s.rsplit_once('*') {
            Some((f, r)) => (Some(f.trim()), r.trim()),
            None => (None, s),
        };
        let reference = match reference {
            "beta0" => Some(BetaRef::Beta0),
            "2S2" | "2*S2" => Some(BetaRef::TwoS2),
            _ => None,
        };
        match reference {
            Some(reference) => {
                let factor = match factor {
                    Some(f) => number(f, "beta")?,
                    None => 1.0,
                };
                positive(factor, "beta factor")?;
                Ok(BetaSpec::Relative { factor, reference })
            }
            None => Ok(BetaSpec::Value(positive(number(s, "beta")?, "beta")?)),
        }
    }

    pub fn resolve(&self, s2: f64, beta0: f64) -> f64 {
        match *self {
            BetaSpec::Value(b) => b,
            BetaSpec::Relative { factor, reference: BetaRef::Beta0 } => factor * beta0,
            BetaSpec::Relative { factor, reference: BetaRef::TwoS2 } => factor * 2.0 * s2,
        }
    }

    pub fn needs_constants(&self) -> bool {
        matches!(self, BetaSpec::Relative { .. })
    }
}

impl std::fmt::Display for BetaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BetaSpec::Value(b) => write!(f, "{b:.16e}"),
            BetaSpec::Relative { factor, reference } => {
                let r = match reference {
                    BetaRef::Beta0 => "beta0",
                    BetaRef::TwoS2 => "2S2",
                };
                write!(f, "{factor}*{r}")
            }
        }
    }
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if let Ok(x) = parse_exact(s) {
        return Ok(x.to_f64());
    }
    s.parse::<f64>()
        .map_err(|_| CliError::Validation(format!("{what}: cannot read `{s}` as a number")))
}

fn positive(x: f64, what: &str) -> Result<f64, CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("{what} must be positive and finite, got {x}")))
    }
}

fn scalar(s: &Scalar, what: &str) -> Result<f64, CliError> {
    let x = match s {
        Scalar::Num(x) => *x,
        Scalar::Text(t) => number(t, what)?,
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("{what} must be finite")))
    }
}

fn list(l: &List, what: &str) -> Result<Vec<f64>, CliError> {
    let v = match l {
        List::Nums(v) => v.clone(),
        List::Text(t) => t
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| number(s, what))
            .collect::<Result<_, _>>()?,
    };
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Validation(format!("{what} entries must be finite")));
    }
    Ok(v)
}

pub const HEX_LATTICE: &str = "[[1,1/2],[0,sqrt3/2]]";

/// `box:8*pi,8*pi`, `torus:[[1,1/2],[0,sqrt3/2]]` (generators are the
/// columns), `torus:hex`.
pub fn parse_domain(s: &str, stretch: f64) -> Result<DomainSpec, CliError> {
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| CliError::Validation(format!("domain `{s}` must look like box:<lengths> or torus:<matrix>")))?;
    let spec = match kind.trim() {
        "box" => {
            let lengths: Vec<f64> = rest
                .split(',')
                .map(|t| number(t, "box length"))
                .collect::<Result<_, _>>()?;
            DomainSpec::neumann_box(&lengths, stretch)
        }
        "torus" => {
            let text = match rest.trim() {
                "hex" => HEX_LATTICE,
                "square" => "[[1,0],[0,1]]",
                t => t,
            };
            let m = ExactMatrix::parse(text).map_err(|e| CliError::Validation(format!("domain: {e}")))?;
            let rows = m.to_f64_rows();
            let n = rows.len();
            let cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| rows[i][j]).collect()).collect();
            DomainSpec::skew_torus(&cols, stretch)
        }
        k => return Err(CliError::Validation(format!("unknown domain kind `{k}`"))),
    };
    spec.map_err(|e| CliError::Validation(format!("domain: {e}")))
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub alpha: Option<f64>,
    pub beta: Option<BetaSpec>,
    pub domain_text: String,
    pub stretch: f64,
    pub domain: DomainSpec,
    pub modes: usize,
    pub starts: usize,
    pub seed: u64,
    pub sphere: SphereOptions,
    pub h_tolerance: f64,
    pub sobolev_starts: usize,
    pub sobolev_start: bool,
    pub sweep: Vec<f64>,
    pub counts: Option<Vec<usize>>,
    pub out: PathBuf,
    pub emit_pgm: bool,
    pub field: Option<PathBuf>,
    pub matrix: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub bump: [f64; 3],
}

pub const DEFAULT_DOMAIN: &str = "box:8*pi,8*pi";

impl RunConfig {
    pub fn validate(raw: &RawConfig) -> Result<Self, CliError> {
        let alpha = raw.alpha.as_ref().map(|a| scalar(a, "alpha")).transpose()?;
        if let Some(a) = alpha {
            if a >= 0.0 {
                return Err(CliError::Validation(format!("alpha must be negative, got {a}")));
            }
        }
        let beta = raw
            .beta
            .as_ref()
            .map(|b| match b {
                Scalar::Num(x) => positive(*x, "beta").map(BetaSpec::Value),
                Scalar::Text(t) => BetaSpec::parse(t),
            })
            .transpose()?;
        let stretch = positive(raw.r.as_ref().map(|r| scalar(r, "R")).transpose()?.unwrap_or(1.0), "R")?;
        let domain_text = raw.domain.clone().unwrap_or_else(|| DEFAULT_DOMAIN.to_string());
        let domain = parse_domain(&domain_text, stretch)?;
        let modes = raw.modes.unwrap_or(match domain.kind() {
            DomainKind::SkewTorus => 16,
            DomainKind::NeumannBox => nsh_core::spectral::default_bandwidth(domain.dim()),
        });
        if modes == 0 || modes > 512 {
            return Err(CliError::Validation(format!("modes must be in 1..=512, got {modes}")));
        }
        let starts = raw.starts.unwrap_or(12);
        if starts == 0 {
            return Err(CliError::Validation("starts must be at least 1".into()));
        }
        let defaults = SphereOptions::default();
        let sphere = SphereOptions {
            max_iter: raw.max_iter.unwrap_or(defaults.max_iter),
            residual_tol: positive(raw.residual_tol.unwrap_or(defaults.residual_tol), "residual_tol")?,
            decrease_tol: positive(raw.decrease_tol.unwrap_or(defaults.decrease_tol), "decrease_tol")?,
            ..defaults
        };
        if sphere.max_iter == 0 {
            return Err(CliError::Validation("max_iter must be at least 1".into()));
        }
        let h_tolerance = positive(raw.h_tolerance.unwrap_or(1e-8), "h_tolerance")?;
        let sweep = match &raw.sweep {
            Some(l) => {
                let v = list(l, "sweep")?;
                for &r in &v {
                    positive(r, "sweep entry")?;
                }
                v
            }
            None => Vec::new(),
        };
        let counts = raw
            .counts
            .as_ref()
            .map(|l| {
                list(l, "counts")?
                    .into_iter()
                    .map(|c| {
                        if c.fract() == 0.0 && (1.0..=64.0).contains(&c) {
                            Ok(c as usize)
                        } else {
                            Err(CliError::Validation(format!("counts must be integers in 1..=64, got {c}")))
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        let bump = [
            raw.bump_radius.unwrap_or(3.1),
            raw.bump_inner.unwrap_or(3.0),
            raw.bump_outer.unwrap_or(0.0),
        ];
        if !(bump[0] > bump[1] && bump[1] > bump[2] && bump[2] >= 0.0 && bump[0].is_finite()) {
            return Err(CliError::Validation(format!(
                "bump needs bump_radius > bump_inner > bump_outer >= 0, got {bump:?}"
            )));
        }
        Ok(Self {
            alpha,
            beta,
            domain_text,
            stretch,
            domain,
            modes,
            starts,
            seed: raw.seed.unwrap_or(0),
            sphere,
            h_tolerance,
            sobolev_starts: raw.sobolev_starts.unwrap_or(8),
            sobolev_start: raw.sobolev_start.unwrap_or(true),
            sweep,
            counts,
            out: raw.out.clone().unwrap_or_else(|| PathBuf::from("nsh-out")),
            emit_pgm: raw.emit_pgm.unwrap_or(false),
            field: raw.field.clone(),
            matrix: raw.matrix.clone(),
            from: raw.from.clone(),
            to: raw.to.clone(),
            bump,
        })
    }

    pub fn require_alpha(&self) -> Result<f64, CliError> {
        self.alpha.ok_or_else(|| CliError::Validation("alpha is required".into()))
    }

    pub fn require_beta(&self) -> Result<BetaSpec, CliError> {
        self.beta.ok_or_else(|| CliError::Validation("beta is required".into()))
    }

    pub fn require_field(&self) -> Result<&PathBuf, CliError> {
        self.field
            .as_ref()
            .ok_or_else(|| CliError::Validation("an input field is required (--field)".into()))
    }

    /// Settings that determine the numbers, for echoing into reports. Paths
    /// are left out so that identical runs in different directories agree.
    pub fn echo(&self) -> serde_json::Value {
        serde_json::json!({
            "alpha": self.alpha,
            "beta": self.beta.map(|b| b.to_string()),
            "domain": self.domain_text,
            "R": self.stretch,
            "modes": self.modes,
            "starts": self.starts,
            "seed": self.seed,
            "max_iter": self.sphere.max_iter,
            "residual_tol": self.sphere.residual_tol,
            "decrease_tol": self.sphere.decrease_tol,
            "h_tolerance": self.h_tolerance,
            "sobolev_starts": self.sobolev_starts,
            "sobolev_start": self.sobolev_start,
            "sweep": self.sweep,
            "counts": self.counts,
            "bump": self.bump,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = RawConfig::from_toml_str("alpha = -1\nbeta = \"1.05*beta0\"\nmodes = 8\nsweep = [1, 2]\n").unwrap();
        let flags = RawConfig {
            modes: Some(4),
            ..Default::default()
        };
        let cfg = RunConfig::validate(&file.overlay(flags)).unwrap();
        assert_eq!(cfg.alpha, Some(-1.0));
        assert_eq!(cfg.modes, 4);
        assert_eq!(cfg.sweep, vec![1.0, 2.0]);
        assert_eq!(
            cfg.beta,
            Some(BetaSpec::Relative {
                factor: 1.05,
                reference: BetaRef::Beta0
            })
        );
    }

    #[test]
    fn beta_forms() {
        assert_eq!(BetaSpec::parse("2.5").unwrap(), BetaSpec::Value(2.5));
        assert_eq!(BetaSpec::parse("0.9*2S2").unwrap().resolve(0.5, 9.0), 0.9);
        assert_eq!(BetaSpec::parse("beta0").unwrap().resolve(0.5, 9.0), 9.0);
        assert!(BetaSpec::parse("-1").is_err());
        assert!(BetaSpec::parse("x*beta0").is_err());
    }

    #[test]
    fn domains() {
        let d = parse_domain("box:8*pi,8*pi", 1.0).unwrap();
        assert_eq!(d.lengths().unwrap(), vec![8.0 * std::f64::consts::PI; 2]);
        let h = parse_domain("torus:hex", 2.0).unwrap();
        assert!((h.volume() - 4.0 * 3f64.sqrt() / 2.0).abs() < 1e-14);
        assert!(parse_domain("torus:[[1,2],[2,4]]", 1.0).is_err());
        assert!(parse_domain("sphere:1", 1.0).is_err());
        assert!(parse_domain("box:1,-2", 1.0).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "alpha = 1",
            "alpha = -1\nmodes = 0",
            "unknown_key = 3",
            "alpha = -1\ncounts = \"2,0\"",
            "alpha = -1\nresidual_tol = -1e-6",
            "alpha = \"nan\"",
        ] {
            let r = RawConfig::from_toml_str(text).and_then(|raw| RunConfig::validate(&raw));
            assert!(r.is_err(), "{text}");
        }
    }
}
