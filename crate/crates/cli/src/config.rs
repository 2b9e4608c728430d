//! Experiment configuration: a resolved, validated description of one run,
//! assembled from a scenario preset, an optional TOML file, and command-line
//! overrides (later layers win).
//!
//! Angles are accepted either as decimal radians or as rational multiples of
//! pi ("pi/24", "2pi/3", "-pi"), parsed exactly so presets carry no rounding
//! slop.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Parse an angle: plain radians ("0.5", "-1.2e-3") or a rational multiple
/// of pi ("pi", "-pi/3", "2pi/3", "0.5pi").
pub fn parse_angle(text: &str) -> Result<f64, CliError> {
    let t: String = text.trim().replace(' ', "").to_lowercase();
    if t.is_empty() {
        return Err(CliError::config("empty angle"));
    }
    match t.find("pi") {
        None => t
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("cannot parse angle {text:?}"))),
        Some(at) => {
            let (pre, post) = (&t[..at], &t[at + 2..]);
            let numerator: f64 = match pre {
                "" | "+" => 1.0,
                "-" => -1.0,
                p => p
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad pi multiple in {text:?}")))?,
            };
            let denominator: f64 = match post.strip_prefix('/') {
                None if post.is_empty() => 1.0,
                None => {
                    return Err(CliError::Config(format!(
                        "unexpected trailing {post:?} in angle {text:?}"
                    )))
                }
                Some(d) => d
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad denominator in {text:?}")))?,
            };
            if denominator == 0.0 {
                return Err(CliError::Config(format!("zero denominator in {text:?}")));
            }
            Ok(numerator * PI / denominator)
        }
    }
}

/// TOML-side angle: either a bare number (radians) or a pi-rational string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Number(f64),
    Text(String),
}

impl AngleValue {
    pub fn resolve(&self) -> Result<f64, CliError> {
        match self {
            AngleValue::Number(v) if v.is_finite() => Ok(*v),
            AngleValue::Number(v) => Err(CliError::Config(format!("non-finite angle {v}"))),
            AngleValue::Text(t) => parse_angle(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    None,
    SquareWell { depth: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialKind {
    PlaneWave { n: usize, epsilon: i8 },
    Packet { k0: f64, x0: usize, s: usize },
    Basis { x: usize, alpha: i8 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Trajectory,
    Density,
    Spectrum,
    Dispersion,
    Eigenpairs,
}

impl OutputKind {
    fn from_name(name: &str) -> Result<Self, CliError> {
        match name {
            "trajectory" => Ok(OutputKind::Trajectory),
            "density" => Ok(OutputKind::Density),
            "spectrum" => Ok(OutputKind::Spectrum),
            "dispersion" => Ok(OutputKind::Dispersion),
            "eigenpairs" => Ok(OutputKind::Eigenpairs),
            other => Err(CliError::Config(format!("unknown output kind {other:?}"))),
        }
    }
}

/// Well-depth sweep grid `phi = 0 ..= phi_max`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub samples: usize,
    pub phi_max: f64,
}

/// A fully resolved run description; serialized verbatim into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub sites: usize,
    pub theta: f64,
    pub rho: f64,
    pub steps: usize,
    pub seed: u64,
    pub potential: PotentialKind,
    pub initial: InitialKind,
    pub outputs: Vec<OutputKind>,
    pub dispersion_resolution: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl ExperimentConfig {
    /// Baseline for fully config-driven runs; every field can be overridden
    /// from the file or the command line.
    pub fn default_custom() -> Self {
        ExperimentConfig {
            scenario: "custom".into(),
            sites: 32,
            theta: PI / 3.0,
            rho: PI / 4.0,
            steps: 0,
            seed: 0,
            potential: PotentialKind::None,
            initial: InitialKind::PlaneWave { n: 1, epsilon: 1 },
            outputs: vec![OutputKind::Trajectory],
            dispersion_resolution: 256,
            sweep: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.sites < 2 {
            return Err(CliError::config("sites must be at least 2"));
        }
        if !self.theta.is_finite() || !self.rho.is_finite() {
            return Err(CliError::config("rule angles must be finite"));
        }
        if self.outputs.is_empty() && self.sweep.is_none() {
            return Err(CliError::config("no outputs requested"));
        }
        if self.dispersion_resolution < 2 {
            return Err(CliError::config("dispersion resolution must be >= 2"));
        }
        match self.initial {
            InitialKind::PlaneWave { n, epsilon } => {
                if n >= self.sites {
                    return Err(CliError::Config(format!(
                        "plane wave index {n} out of range for {} sites",
                        self.sites
                    )));
                }
                check_sign("epsilon", epsilon)?;
            }
            InitialKind::Packet { k0, x0, s } => {
                if !k0.is_finite() {
                    return Err(CliError::config("packet k0 must be finite"));
                }
                if x0 >= self.sites {
                    return Err(CliError::Config(format!(
                        "packet center {x0} out of range for {} sites",
                        self.sites
                    )));
                }
                if s % 2 != 0 || s > self.sites {
                    return Err(CliError::Config(format!(
                        "packet width {s} must be even and at most {}",
                        self.sites
                    )));
                }
            }
            InitialKind::Basis { x, alpha } => {
                if x >= self.sites {
                    return Err(CliError::Config(format!(
                        "basis site {x} out of range for {} sites",
                        self.sites
                    )));
                }
                check_sign("alpha", alpha)?;
            }
        }
        if let PotentialKind::SquareWell { depth } = self.potential {
            if !depth.is_finite() {
                return Err(CliError::config("well depth must be finite"));
            }
        }
        Ok(())
    }

    /// Overlay the fields present in a parsed TOML config.
    pub fn apply_raw(&mut self, raw: RawConfig) -> Result<(), CliError> {
        if let Some(sites) = raw.sites {
            self.sites = sites;
        }
        if let Some(theta) = raw.theta {
            self.theta = theta.resolve()?;
        }
        if let Some(rho) = raw.rho {
            self.rho = rho.resolve()?;
        }
        if let Some(steps) = raw.steps {
            self.steps = steps;
        }
        if let Some(seed) = raw.seed {
            self.seed = seed;
        }
        if let Some(p) = raw.potential {
            self.potential = match p.kind.as_str() {
                "none" => PotentialKind::None,
                "square_well" => PotentialKind::SquareWell {
                    depth: p
                        .depth
                        .ok_or_else(|| CliError::config("square_well needs a depth"))?
                        .resolve()?,
                },
                other => {
                    return Err(CliError::Config(format!(
                        "unknown potential kind {other:?}"
                    )))
                }
            };
        }
        if let Some(i) = raw.initial {
            self.initial = match i.kind.as_str() {
                "plane_wave" => InitialKind::PlaneWave {
                    n: i.n.ok_or_else(|| CliError::config("plane_wave needs n"))?,
                    epsilon: i.epsilon.unwrap_or(1),
                },
                "packet" => InitialKind::Packet {
                    k0: i
                        .k0
                        .ok_or_else(|| CliError::config("packet needs k0"))?
                        .resolve()?,
                    x0: i.x0.ok_or_else(|| CliError::config("packet needs x0"))?,
                    s: i.s.ok_or_else(|| CliError::config("packet needs s"))?,
                },
                "basis" => InitialKind::Basis {
                    x: i.x.ok_or_else(|| CliError::config("basis needs x"))?,
                    alpha: i.alpha.unwrap_or(1),
                },
                other => {
                    return Err(CliError::Config(format!("unknown initial kind {other:?}")))
                }
            };
        }
        if let Some(outputs) = raw.outputs {
            self.outputs = outputs
                .iter()
                .map(|s| OutputKind::from_name(s))
                .collect::<Result<_, _>>()?;
        }
        if let Some(r) = raw.dispersion_resolution {
            self.dispersion_resolution = r;
        }
        Ok(())
    }
}

fn check_sign(name: &str, value: i8) -> Result<(), CliError> {
    if value == 1 || value == -1 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be +1 or -1")))
    }
}

/// TOML shape of a config file; all fields optional so files can override
/// just parts of a preset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub scenario: Option<String>,
    pub sites: Option<usize>,
    pub theta: Option<AngleValue>,
    pub rho: Option<AngleValue>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub potential: Option<RawPotential>,
    pub initial: Option<RawInitial>,
    pub outputs: Option<Vec<String>>,
    pub dispersion_resolution: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPotential {
    pub kind: String,
    pub depth: Option<AngleValue>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInitial {
    pub kind: String,
    pub n: Option<usize>,
    pub epsilon: Option<i8>,
    pub k0: Option<AngleValue>,
    pub x0: Option<usize>,
    pub s: Option<usize>,
    pub x: Option<usize>,
    pub alpha: Option<i8>,
}

pub fn parse_config_file(text: &str) -> Result<RawConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_parsing() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("-pi").unwrap(), -PI);
        assert_eq!(parse_angle("pi/24").unwrap(), PI / 24.0);
        assert_eq!(parse_angle("2pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("-3pi/4").unwrap(), -3.0 * PI / 4.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle(" pi / 4 ").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert_eq!(parse_angle("-1e-3").unwrap(), -1e-3);
        assert!(parse_angle("").is_err());
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("pie").is_err());
        assert!(parse_angle("two pi").is_err());
    }

    #[test]
    fn file_overrides_preset_fields() {
        let mut config = ExperimentConfig::default_custom();
        let raw = parse_config_file(
            r#"
            sites = 64
            theta = "pi/3"
            steps = 49
            [potential]
            kind = "square_well"
            depth = "pi/6"
            [initial]
            kind = "packet"
            k0 = "pi/4"
            x0 = 31
            s = 32
            "#,
        )
        .unwrap();
        config.apply_raw(raw).unwrap();
        config.validate().unwrap();
        assert_eq!(config.sites, 64);
        assert_eq!(config.steps, 49);
        assert_eq!(
            config.potential,
            PotentialKind::SquareWell { depth: PI / 6.0 }
        );
        assert_eq!(
            config.initial,
            InitialKind::Packet {
                k0: PI / 4.0,
                x0: 31,
                s: 32
            }
        );
    }

    #[test]
    fn validation_catches_inconsistent_sizes() {
        let mut config = ExperimentConfig::default_custom();
        config.initial = InitialKind::PlaneWave { n: 32, epsilon: 1 };
        assert!(config.validate().is_err());
        config.initial = InitialKind::Packet {
            k0: 0.0,
            x0: 0,
            s: 7,
        };
        assert!(config.validate().is_err());
        config.initial = InitialKind::Basis { x: 0, alpha: 3 };
        assert!(config.validate().is_err());
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse_config_file("bogus_field = 3").is_err());
        let raw = parse_config_file("outputs = [\"density\", \"nope\"]").unwrap();
        let mut config = ExperimentConfig::default_custom();
        assert!(config.apply_raw(raw).is_err());
    }
}
