//! Plain-text field dumps.
//!
//! ```text
//! nsh-field v1; kind=box; n=2; lengths=3.14,3.14; R=1; N=16
//! 0.25,0.5,...
//! ```
//!
//! Tori write `generators=` (the generator matrix, column-major) in place of
//! `lengths=`. `M=` records a non-minimal grid and `repr=coeffs` switches the
//! body from grid values to basis coefficients. The body is row-major CSV
//! with one row per index of all axes but the last.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::domain::{DomainKind, DomainSpec};
use crate::error::{NshError, Result};
use crate::field::SpectralField;
use crate::spectral::{minimum_grid, Basis};

pub const MAGIC: &str = "nsh-field v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Repr {
    Values,
    Coeffs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldHeader {
    pub kind: DomainKind,
    pub dim: usize,
    /// Side lengths, or the column-major generator matrix.
    pub base: Vec<f64>,
    pub stretch: f64,
    pub bandwidth: Vec<usize>,
    /// Only when the grid is larger than the minimal exact one.
    pub grid: Option<Vec<usize>>,
    pub repr: Repr,
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn join_f64(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",")
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    v.split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| NshError::Parse(format!("bad entry `{s}` in {key}="))))
        .collect()
}

impl FieldHeader {
    pub fn of(u: &SpectralField, repr: Repr) -> Self {
        let b = u.basis();
        let d = u.domain();
        let minimal: Vec<usize> = b.bandwidth().iter().map(|&n| minimum_grid(d.kind(), n)).collect();
        Self {
            kind: d.kind(),
            dim: d.dim(),
            base: d.base().to_vec(),
            stretch: d.stretch(),
            bandwidth: b.bandwidth().to_vec(),
            grid: (b.grid_shape() != minimal.as_slice()).then(|| b.grid_shape().to_vec()),
            repr,
        }
    }

    pub fn parse(line: &str) -> Result<Self> {
        let mut parts = line.split(';').map(str::trim);
        if parts.next() != Some(MAGIC) {
            return Err(NshError::Parse(format!("header must start with `{MAGIC}`")));
        }
        let (mut kind, mut dim, mut base, mut stretch, mut bw, mut grid, mut repr) =
            (None, None, None, None, None, None, None);
        for part in parts.filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| NshError::Parse(format!("expected key=value, got `{part}`")))?;
            let (k, v) = (k.trim(), v.trim());
            let dup = match k {
                "kind" => kind
                    .replace(match v {
                        "box" => DomainKind::NeumannBox,
                        "torus" => DomainKind::SkewTorus,
                        _ => return Err(NshError::Parse(format!("unknown kind `{v}`"))),
                    })
                    .is_some(),
                "n" => dim
                    .replace(v.parse::<usize>().map_err(|_| NshError::Parse(format!("bad n=`{v}`")))?)
                    .is_some(),
                "lengths" | "generators" => base.replace((k, parse_list::<f64>(k, v)?)).is_some(),
                "R" => stretch
                    .replace(v.parse::<f64>().map_err(|_| NshError::Parse(format!("bad R=`{v}`")))?)
                    .is_some(),
                "N" => bw.replace(parse_list::<usize>(k, v)?).is_some(),
                "M" => grid.replace(parse_list::<usize>(k, v)?).is_some(),
                "repr" => repr
                    .replace(match v {
                        "coeffs" => Repr::Coeffs,
                        "values" => Repr::Values,
                        _ => return Err(NshError::Parse(format!("unknown repr `{v}`"))),
                    })
                    .is_some(),
                _ => return Err(NshError::Parse(format!("unknown header key `{k}`"))),
            };
            if dup {
                return Err(NshError::Parse(format!("duplicate header key `{k}`")));
            }
        }
        let missing = |k: &str| NshError::Parse(format!("header lacks `{k}=`"));
        let kind = kind.ok_or_else(|| missing("kind"))?;
        let dim = dim.ok_or_else(|| missing("n"))?;
        if !(1..=3).contains(&dim) {
            return Err(NshError::UnsupportedDimension(dim));
        }
        let (key, base) = base.ok_or_else(|| missing("lengths"))?;
        let (want_key, want_len) = match kind {
            DomainKind::NeumannBox => ("lengths", dim),
            DomainKind::SkewTorus => ("generators", dim * dim),
        };
        if key != want_key || base.len() != want_len {
            return Err(NshError::Parse(format!(
                "a {} header needs {want_key}= with {want_len} entries",
                kind.tag()
            )));
        }
        let mut bandwidth = bw.ok_or_else(|| missing("N"))?;
        if bandwidth.len() == 1 {
            bandwidth = vec![bandwidth[0]; dim];
        }
        if bandwidth.len() != dim {
            return Err(NshError::LengthMismatch {
                expected: dim,
                got: bandwidth.len(),
            });
        }
        if let Some(g) = &grid {
            if g.len() != dim {
                return Err(NshError::LengthMismatch {
                    expected: dim,
                    got: g.len(),
                });
            }
        }
        Ok(Self {
            kind,
            dim,
            base,
            stretch: stretch.unwrap_or(1.0),
            bandwidth,
            grid,
            repr: repr.unwrap_or(Repr::Values),
        })
    }

    pub fn grid_shape(&self) -> Vec<usize> {
        self.grid.clone().unwrap_or_else(|| {
            self.bandwidth.iter().map(|&n| minimum_grid(self.kind, n)).collect()
        })
    }

    /// Shape of the body as written: grid shape for values, coefficient
    /// layout for coefficients.
    pub fn body_shape(&self) -> Vec<usize> {
        match (self.repr, self.kind) {
            (Repr::Values, _) => self.grid_shape(),
            (Repr::Coeffs, DomainKind::NeumannBox) => self.bandwidth.iter().map(|n| n + 1).collect(),
            (Repr::Coeffs, DomainKind::SkewTorus) => self.bandwidth.iter().map(|n| 2 * n + 1).collect(),
        }
    }

    /// Number of body entries, `None` on overflow.
    pub fn body_len(&self) -> Option<usize> {
        self.body_shape().iter().try_fold(1usize, |a, &b| a.checked_mul(b))
    }

    pub fn domain(&self) -> Result<DomainSpec> {
        DomainSpec::make(self.kind, &self.base, self.stretch)
    }

    pub fn basis(&self) -> Result<Arc<Basis>> {
        Basis::with_bandwidths(self.domain()?, &self.bandwidth, self.grid.as_deref())
    }
}

impl std::fmt::Display for FieldHeader {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let key = match self.kind {
            DomainKind::NeumannBox => "lengths",
            DomainKind::SkewTorus => "generators",
        };
        write!(
            f,
            "{MAGIC}; kind={}; n={}; {key}={}; R={:.16e}; N={}",
            self.kind.tag(),
            self.dim,
            join_f64(&self.base),
            self.stretch,
            join(&self.bandwidth)
        )?;
        if let Some(g) = &self.grid {
            write!(f, "; M={}", join(g))?;
        }
        if self.repr == Repr::Coeffs {
            write!(f, "; repr=coeffs")?;
        }
        Ok(())
    }
}

/// A parsed dump before it is turned into a field.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldDump {
    pub header: FieldHeader,
    pub data: Vec<f64>,
}

impl FieldDump {
    pub fn of(u: &SpectralField, repr: Repr) -> Self {
        let data = match repr {
            Repr::Values => u.to_grid(),
            Repr::Coeffs => u.coeffs().to_vec(),
        };
        Self {
            header: FieldHeader::of(u, repr),
            data,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = FieldHeader::parse(lines.next().ok_or_else(|| NshError::Parse("empty input".into()))?)?;
        let expected = header
            .body_len()
            .ok_or_else(|| NshError::Parse("body size overflows".into()))?;
        let mut data = Vec::new();
        for (row, line) in lines.enumerate() {
            for s in line.split(',') {
                let x: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| NshError::Parse(format!("bad number `{}` on body row {}", s.trim(), row + 1)))?;
                if !x.is_finite() {
                    return Err(NshError::Parse(format!("non-finite value on body row {}", row + 1)));
                }
                data.push(x);
                if data.len() > expected {
                    return Err(NshError::LengthMismatch {
                        expected,
                        got: data.len(),
                    });
                }
            }
        }
        if data.len() != expected {
            return Err(NshError::LengthMismatch {
                expected,
                got: data.len(),
            });
        }
        Ok(Self { header, data })
    }

    pub fn to_field(&self) -> Result<SpectralField> {
        let basis = self.header.basis()?;
        match self.header.repr {
            Repr::Values => SpectralField::from_grid(basis, &self.data),
            Repr::Coeffs => SpectralField::new(basis, self.data.clone()),
        }
    }
}

impl std::fmt::Display for FieldDump {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.header)?;
        let width = *self.header.body_shape().last().unwrap_or(&1);
        let mut line = String::new();
        for row in self.data.chunks(width.max(1)) {
            line.clear();
            for (i, x) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                let _ = write!(line, "{x:.16e}");
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

pub fn format_field(u: &SpectralField, repr: Repr) -> String {
    FieldDump::of(u, repr).to_string()
}

pub fn parse_field(text: &str) -> Result<SpectralField> {
    FieldDump::parse(text)?.to_field()
}

pub fn write_field(path: impl AsRef<Path>, u: &SpectralField, repr: Repr) -> std::io::Result<()> {
    std::fs::write(path, format_field(u, repr))
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SpectralField> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| NshError::Parse(format!("{}: {e}", path.as_ref().display())))?;
    parse_field(&text)
}
