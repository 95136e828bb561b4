//! Flag parsing: potential specs, ranges, grids and tolerance overrides.

use std::collections::BTreeMap;
use std::path::PathBuf;

use qfound::schrodinger1d::{Potential, PotentialKind, TabulatedPotential};
use qfound::schwarzian::RealGrid;

use crate::CliError;

/// Parsed `--potential` value, before ħ and m are attached.
#[derive(Debug, Clone, PartialEq)]
pub enum PotentialSpec {
    Free,
    Harmonic { mass: Option<f64>, omega: f64 },
    Well { length: f64, mass: Option<f64> },
    Linear { slope: f64, mass: Option<f64> },
    Table(PathBuf),
}

fn parse_number(key: &str, value: &str) -> Result<f64, String> {
    let x: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("{key}: not a number: {value:?}"))?;
    if !x.is_finite() {
        return Err(format!("{key}: must be finite"));
    }
    Ok(x)
}

/// `key=value` pairs separated by commas; only `allowed` keys are accepted.
fn parse_params(text: &str, allowed: &[&str]) -> Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for item in text.split(',').filter(|s| !s.trim().is_empty()) {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| format!("expected key=value, got {item:?}"))?;
        let key = key.trim();
        if !allowed.contains(&key) {
            return Err(format!(
                "unknown parameter {key:?} (expected one of {})",
                allowed.join(", ")
            ));
        }
        if out
            .insert(key.to_string(), parse_number(key, value)?)
            .is_some()
        {
            return Err(format!("parameter {key:?} given twice"));
        }
    }
    Ok(out)
}

pub fn parse_potential(text: &str) -> Result<PotentialSpec, String> {
    let (name, rest) = text.split_once(':').unwrap_or((text, ""));
    match name {
        "free" if rest.is_empty() => Ok(PotentialSpec::Free),
        "harmonic" => {
            let p = parse_params(rest, &["m", "w"])?;
            Ok(PotentialSpec::Harmonic {
                mass: p.get("m").copied(),
                omega: p.get("w").copied().unwrap_or(1.0),
            })
        }
        "well" => {
            let p = parse_params(rest, &["L", "m"])?;
            Ok(PotentialSpec::Well {
                length: *p.get("L").ok_or("well needs L=..")?,
                mass: p.get("m").copied(),
            })
        }
        "linear" => {
            let p = parse_params(rest, &["a", "m"])?;
            Ok(PotentialSpec::Linear {
                slope: *p.get("a").ok_or("linear needs a=..")?,
                mass: p.get("m").copied(),
            })
        }
        "table" if !rest.is_empty() => Ok(PotentialSpec::Table(PathBuf::from(rest))),
        _ => Err(format!(
            "unknown potential {text:?} (expected free, harmonic[:m=..,w=..], well:L=.., linear:a=.. or table:PATH)"
        )),
    }
}

/// `a:b` with `a < b`.
pub fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got {text:?}"))?;
    let (a, b) = (parse_number("range", a)?, parse_number("range", b)?);
    if a >= b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

/// `qmin:qmax:n`.
pub fn parse_grid(text: &str) -> Result<RealGrid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected qmin:qmax:n, got {text:?}"));
    };
    let n: usize = n
        .trim()
        .parse()
        .map_err(|_| format!("grid: bad point count {n:?}"))?;
    RealGrid::new(parse_number("grid", lo)?, parse_number("grid", hi)?, n)
        .map_err(|e| e.to_string())
}

/// `NAME=VALUE`.
pub fn parse_override(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got {text:?}"))?;
    let value = parse_number(name, value)?;
    if value <= 0.0 {
        return Err(format!("{name}: tolerance must be positive"));
    }
    Ok((name.trim().to_string(), value))
}

/// Named tolerances with their defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(BTreeMap::from([
            ("residual", 1e-5),
            ("moebius_analytic", 1e-6),
            ("moebius_fd", 1e-3),
            ("invariance", 1e-6),
            ("cocycle", 1e-5),
            ("transform_w", 1e-12),
            ("affine", 1e-6),
            ("tomography", 1e-10),
            ("mub", 1e-12),
            ("no_signalling", 1e-12),
            ("born", 1e-12),
            ("exponent_gap", 1e-3),
            ("distance", 1e-12),
            ("amplitudes", 1e-15),
            ("distributivity", 1e-12),
        ]))
    }
}

impl Tolerances {
    pub fn with_overrides(overrides: &[(String, f64)]) -> Result<Self, CliError> {
        let mut t = Self::default();
        for (name, value) in overrides {
            match t.0.get_mut(name.as_str()) {
                Some(slot) => *slot = *value,
                None => {
                    return Err(CliError::Input(format!(
                        "unknown tolerance {name:?} (known: {})",
                        t.0.keys().copied().collect::<Vec<_>>().join(", ")
                    )))
                }
            }
        }
        Ok(t)
    }

    pub fn get(&self, name: &str) -> f64 {
        self.0[name]
    }
}

/// What a default grid is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Spectrum,
    Trajectory,
}

/// Constants, grid and tolerances shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub hbar: f64,
    pub mass: f64,
    pub grid: Option<RealGrid>,
    pub seed: u64,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn potential(&self, spec: &PotentialSpec) -> Result<Potential, CliError> {
        let mass = |m: &Option<f64>| m.unwrap_or(self.mass);
        let (kind, m) = match spec {
            PotentialSpec::Free => (PotentialKind::Free, self.mass),
            PotentialSpec::Harmonic { mass: m, omega } => {
                (PotentialKind::Harmonic { omega: *omega }, mass(m))
            }
            PotentialSpec::Well { length, mass: m } => {
                (PotentialKind::InfiniteWell { length: *length }, mass(m))
            }
            PotentialSpec::Linear { slope, mass: m } => {
                (PotentialKind::Linear { slope: *slope }, mass(m))
            }
            PotentialSpec::Table(path) => (
                PotentialKind::Tabulated(TabulatedPotential::from_csv_path(path)?),
                self.mass,
            ),
        };
        Ok(Potential::new(kind, self.hbar, m)?)
    }

    /// `--grid` if given, else a per-potential default.
    pub fn grid_for(&self, pot: &Potential, purpose: Purpose) -> Result<RealGrid, CliError> {
        if let Some(g) = self.grid {
            return Ok(g);
        }
        let grid = match (&pot.kind, purpose) {
            (PotentialKind::Harmonic { omega }, _) => {
                let length = (pot.hbar / (pot.mass * omega)).sqrt();
                let (half, n) = match purpose {
                    Purpose::Spectrum => (10.0, 4001),
                    Purpose::Trajectory => (3.0, 20001),
                };
                RealGrid::new(-half * length, half * length, n)?
            }
            (PotentialKind::InfiniteWell { .. }, Purpose::Spectrum) => pot.reference_grid(4001)?,
            (PotentialKind::InfiniteWell { .. }, Purpose::Trajectory) => {
                pot.reference_grid(2001)?
            }
            (PotentialKind::Free, Purpose::Trajectory) => RealGrid::new(0.0, 10.0, 10001)?,
            (PotentialKind::Linear { .. }, Purpose::Trajectory) => RealGrid::new(-3.0, 3.0, 20001)?,
            (_, Purpose::Spectrum) => pot.reference_grid(4001)?,
            (PotentialKind::Tabulated(_), Purpose::Trajectory) => pot.reference_grid(20001)?,
        };
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_grammar() {
        assert_eq!(parse_potential("free"), Ok(PotentialSpec::Free));
        assert_eq!(
            parse_potential("harmonic"),
            Ok(PotentialSpec::Harmonic {
                mass: None,
                omega: 1.0
            })
        );
        assert_eq!(
            parse_potential("harmonic:m=2,w=0.5"),
            Ok(PotentialSpec::Harmonic {
                mass: Some(2.0),
                omega: 0.5
            })
        );
        assert_eq!(
            parse_potential("well:L=1"),
            Ok(PotentialSpec::Well {
                length: 1.0,
                mass: None
            })
        );
        assert_eq!(
            parse_potential("linear:a=-0.5"),
            Ok(PotentialSpec::Linear {
                slope: -0.5,
                mass: None
            })
        );
        assert_eq!(
            parse_potential("table:/tmp/v.csv"),
            Ok(PotentialSpec::Table("/tmp/v.csv".into()))
        );
        for bad in [
            "well",
            "well:L=x",
            "harmonic:k=1",
            "linear:a=1,a=2",
            "cubic",
            "table:",
            "free:x=1",
        ] {
            assert!(parse_potential(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_range("0:6"), Ok((0.0, 6.0)));
        assert_eq!(parse_range("-1.5:2"), Ok((-1.5, 2.0)));
        assert!(parse_range("3:1").is_err());
        assert!(parse_range("3").is_err());
        let g = parse_grid("-3:3:601").unwrap();
        assert_eq!((g.q_min(), g.q_max(), g.len()), (-3.0, 3.0, 601));
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:100").is_err());
    }

    #[test]
    fn tolerance_overrides() {
        let t = Tolerances::with_overrides(&[("residual".into(), 1e-3)]).unwrap();
        assert_eq!(t.get("residual"), 1e-3);
        assert_eq!(t.get("cocycle"), 1e-5);
        assert!(Tolerances::with_overrides(&[("nope".into(), 1.0)]).is_err());
        assert!(parse_override("residual=-1").is_err());
        assert_eq!(parse_override("mub=1e-9"), Ok(("mub".into(), 1e-9)));
    }
}
