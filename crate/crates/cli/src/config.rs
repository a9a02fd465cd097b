//! Run configuration: a TOML document with top-level barrier parameters and
//! one optional section per experiment.
//!
//! ```toml
//! d = 1.0
//! seed = 7
//!
//! [sqrt_profile]
//! a2 = 0.1
//!
//! [fdtd]
//! courant = 0.5
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use evsim_core::{DielectricProfile, ProfileForm};

/// Polynomial coefficients keyed by even exponent, written `a2 = …`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Coefficients(pub BTreeMap<u32, f64>);

impl Serialize for Coefficients {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (n, v) in &self.0 {
            map.serialize_entry(&format!("a{n}"), v)?;
        }
        map.end()
    }
}

/// Parses a coefficient key, enforcing the even-exponent invariant.
pub fn parse_coefficient_key(key: &str) -> Result<u32, String> {
    let digits = key
        .strip_prefix('a')
        .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
    let Some(digits) = digits else {
        return Err(format!(
            "unknown coefficient key `{key}`, expected a2, a4, a6, ..."
        ));
    };
    let n: u32 = digits
        .parse()
        .map_err(|_| format!("coefficient exponent in `{key}` is too large"))?;
    if n == 0 {
        return Err(format!(
            "invariant unit-origin violated by `{key}`: the constant term is fixed to 1"
        ));
    }
    if n % 2 == 1 {
        return Err(format!(
            "invariant even-exponents violated by `{key}`: profiles contain only even powers a2, a4, a6, ..."
        ));
    }
    Ok(n)
}

impl<'de> Deserialize<'de> for Coefficients {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CoefficientVisitor;

        impl<'de> Visitor<'de> for CoefficientVisitor {
            type Value = Coefficients;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a table of even-exponent coefficients such as a2 = 0.1")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Coefficients, A::Error> {
                let mut out = BTreeMap::new();
                while let Some(key) = map.next_key::<String>()? {
                    let n = parse_coefficient_key(&key).map_err(de::Error::custom)?;
                    let value: f64 = map.next_value()?;
                    if out.insert(n, value).is_some() {
                        return Err(de::Error::custom(format!("duplicate coefficient `{key}`")));
                    }
                }
                Ok(Coefficients(out))
            }
        }

        deserializer.deserialize_map(CoefficientVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketSection {
    pub k0: f64,
    /// σ/k₀.
    pub sigma_ratio: f64,
    pub reflectance: f64,
}

impl Default for PacketSection {
    fn default() -> Self {
        Self {
            k0: 1.0,
            sigma_ratio: 0.02,
            reflectance: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TauSection {
    /// Also integrate the guidance-law trajectory.
    pub bohm: bool,
}

impl Default for TauSection {
    fn default() -> Self {
        Self { bohm: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSection {
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
    pub times: Vec<f64>,
}

impl Default for SimulateSection {
    fn default() -> Self {
        Self {
            x_min: -1.0,
            x_max: 2.0,
            samples: 301,
            times: vec![0.0, 0.5, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FdtdSection {
    pub k0: f64,
    pub sigma_ratio: f64,
    pub nodes_per_wavelength: f64,
    pub courant: f64,
    pub gap: f64,
    /// Also write the final field snapshot.
    pub snapshot: bool,
}

impl Default for FdtdSection {
    fn default() -> Self {
        Self {
            k0: 20.0 * std::f64::consts::PI,
            sigma_ratio: 0.02,
            nodes_per_wavelength: 40.0,
            courant: 0.5,
            gap: 0.25,
            snapshot: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TmmSection {
    pub n_high: f64,
    pub n_low: f64,
    pub periods: usize,
    pub omega0: f64,
    pub omega_min: f64,
    pub omega_max: f64,
    pub samples: usize,
    pub gap_threshold: f64,
    /// Inclusive period range for the midgap decay fit.
    pub decay_periods: [usize; 2],
}

impl Default for TmmSection {
    fn default() -> Self {
        Self {
            n_high: evsim_core::tmm::DEFAULT_HIGH_INDEX,
            n_low: evsim_core::tmm::DEFAULT_LOW_INDEX,
            periods: 8,
            omega0: 1.0,
            omega_min: 0.5,
            omega_max: 1.5,
            samples: 1001,
            gap_threshold: evsim_core::tmm::GAP_THRESHOLD,
            decay_periods: [2, 16],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WkbSection {
    pub omegas: Vec<f64>,
    pub samples: usize,
}

impl Default for WkbSection {
    fn default() -> Self {
        Self {
            omegas: vec![10.0, 100.0],
            samples: 201,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KemmerSection {
    pub random_states: usize,
}

impl Default for KemmerSection {
    fn default() -> Self {
        Self {
            random_states: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub format: Format,
    pub svg: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "evsim-out".into(),
            format: Format::Json,
            svg: false,
        }
    }
}

fn default_c() -> f64 {
    1.0
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Barrier width.
    pub d: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Coefficients of ε(x) = 1 + Σ aₙxⁿ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Coefficients>,
    /// Coefficients of √ε(x) = 1 + Σ bₙxⁿ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sqrt_profile: Option<Coefficients>,
    #[serde(default)]
    pub packet: PacketSection,
    #[serde(default)]
    pub tau: TauSection,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub fdtd: FdtdSection,
    #[serde(default)]
    pub tmm: TmmSection,
    #[serde(default)]
    pub wkb: WkbSection,
    #[serde(default)]
    pub kemmer: KemmerSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl Default for RunConfig {
    /// The quadratic model √ε(−ix) = 1 − 0.1x² on a unit barrier.
    fn default() -> Self {
        Self {
            d: 1.0,
            c: default_c(),
            seed: default_seed(),
            profile: None,
            sqrt_profile: Some(Coefficients(BTreeMap::from([(2, 0.1)]))),
            packet: PacketSection::default(),
            tau: TauSection::default(),
            simulate: SimulateSection::default(),
            fdtd: FdtdSection::default(),
            tmm: TmmSection::default(),
            wkb: WkbSection::default(),
            kemmer: KemmerSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl RunConfig {
    /// The configured barrier profile. Validity of ε_c is checked by the
    /// experiments, not here.
    pub fn dielectric(&self) -> evsim_core::Result<DielectricProfile> {
        let (form, coefficients) = match (&self.profile, &self.sqrt_profile) {
            (Some(p), None) => (ProfileForm::Permittivity, p),
            (None, Some(p)) => (ProfileForm::SqrtPermittivity, p),
            _ => unreachable!("validated config has exactly one profile"),
        };
        DielectricProfile::new(form, coefficients.0.clone(), self.d)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are always representable")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigErrorKind {
    Syntax,
    UnknownKey,
    Invariant,
    Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigError {
    pub kind: ConfigErrorKind,
    /// 1-based line in the source text, when known.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Every problem found in one config document.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ConfigErrors(pub Vec<ConfigError>);

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())]
        .bytes()
        .filter(|b| *b == b'\n')
        .count()
        + 1
}

/// Line of `key = …` inside `[section]` (or at top level for `None`).
fn locate(text: &str, section: Option<&str>, key: &str) -> Option<usize> {
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.split(']').next()) {
            current = Some(name.trim().to_string());
            continue;
        }
        let lhs = line
            .split('=')
            .next()
            .unwrap_or("")
            .trim()
            .trim_matches('"');
        if line.contains('=') && lhs == key && current.as_deref() == section {
            return Some(i + 1);
        }
    }
    None
}

fn backticked(message: &str) -> Option<&str> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(&message[start..start + len])
}

fn from_toml_error(text: &str, err: &toml::de::Error) -> ConfigError {
    let message = err.message().trim().to_string();
    let kind = if message.contains("unknown field") || message.contains("unknown coefficient") {
        ConfigErrorKind::UnknownKey
    } else if message.contains("invariant") {
        ConfigErrorKind::Invariant
    } else {
        ConfigErrorKind::Syntax
    };
    let span_line = err.span().map(|Range { start, .. }| line_of(text, start));
    // Prefer the line of the offending key when the message names one.
    let key_line = backticked(&message).and_then(|key| {
        text.lines()
            .position(|l| l.trim_start().starts_with(key) && l.contains('='))
            .map(|i| i + 1)
    });
    ConfigError {
        kind,
        line: key_line.or(span_line),
        message,
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigErrors> {
    let config: RunConfig =
        toml::from_str(text).map_err(|e| ConfigErrors(vec![from_toml_error(text, &e)]))?;
    let errors = validate(&config, text);
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigErrors(errors))
    }
}

/// Checks value ranges; `text` is used only to attach line numbers.
pub fn validate(config: &RunConfig, text: &str) -> Vec<ConfigError> {
    let mut errors = Vec::new();
    let mut check = |ok: bool, section: Option<&str>, key: &str, message: String| {
        if !ok {
            errors.push(ConfigError {
                kind: ConfigErrorKind::Value,
                line: locate(text, section, key)
                    .or_else(|| section.and_then(|s| locate_section(text, s))),
                message,
            });
        }
    };
    let positive = |v: f64| v > 0.0 && v.is_finite();

    check(
        positive(config.d),
        None,
        "d",
        format!("d must be positive and finite, got {}", config.d),
    );
    check(
        positive(config.c),
        None,
        "c",
        format!("c must be positive and finite, got {}", config.c),
    );
    match (&config.profile, &config.sqrt_profile) {
        (Some(_), Some(_)) => check(
            false,
            Some("sqrt_profile"),
            "",
            "define only one of [profile] and [sqrt_profile]".into(),
        ),
        (None, None) => check(
            false,
            None,
            "",
            "a [profile] or [sqrt_profile] section is required".into(),
        ),
        (Some(p), None) | (None, Some(p)) => {
            let section = if config.profile.is_some() {
                "profile"
            } else {
                "sqrt_profile"
            };
            for (n, v) in &p.0 {
                check(
                    v.is_finite(),
                    Some(section),
                    &format!("a{n}"),
                    format!("a{n} must be finite"),
                );
            }
        }
    }

    let packet = &config.packet;
    check(
        positive(packet.k0),
        Some("packet"),
        "k0",
        format!("k0 must be positive, got {}", packet.k0),
    );
    check(
        positive(packet.sigma_ratio),
        Some("packet"),
        "sigma_ratio",
        format!("sigma_ratio must be positive, got {}", packet.sigma_ratio),
    );
    check(
        (0.0..1.0).contains(&packet.reflectance),
        Some("packet"),
        "reflectance",
        format!("reflectance must lie in [0, 1), got {}", packet.reflectance),
    );

    let sim = &config.simulate;
    check(
        sim.x_min.is_finite() && sim.x_max.is_finite() && sim.x_min < sim.x_max,
        Some("simulate"),
        "x_max",
        format!("need x_min < x_max, got [{}, {}]", sim.x_min, sim.x_max),
    );
    check(
        sim.samples >= 2,
        Some("simulate"),
        "samples",
        "samples must be at least 2".into(),
    );
    check(
        sim.times.iter().all(|t| t.is_finite()),
        Some("simulate"),
        "times",
        "times must be finite".into(),
    );

    let f = &config.fdtd;
    check(
        positive(f.k0),
        Some("fdtd"),
        "k0",
        format!("k0 must be positive, got {}", f.k0),
    );
    check(
        positive(f.sigma_ratio),
        Some("fdtd"),
        "sigma_ratio",
        format!("sigma_ratio must be positive, got {}", f.sigma_ratio),
    );
    check(
        f.nodes_per_wavelength >= evsim_core::fdtd::MIN_NODES_PER_WAVELENGTH
            && f.nodes_per_wavelength.is_finite(),
        Some("fdtd"),
        "nodes_per_wavelength",
        format!(
            "nodes_per_wavelength must be at least {}, got {}",
            evsim_core::fdtd::MIN_NODES_PER_WAVELENGTH,
            f.nodes_per_wavelength
        ),
    );
    check(
        f.courant > 0.0 && f.courant <= 1.0,
        Some("fdtd"),
        "courant",
        format!(
            "courant must lie in (0, 1] for stability, got {}",
            f.courant
        ),
    );
    check(
        f.gap >= 0.0 && f.gap.is_finite(),
        Some("fdtd"),
        "gap",
        format!("gap must be non-negative, got {}", f.gap),
    );

    let t = &config.tmm;
    check(
        t.n_high > 1.0 && t.n_high.is_finite(),
        Some("tmm"),
        "n_high",
        format!("n_high must exceed 1, got {}", t.n_high),
    );
    check(
        t.n_low > 1.0 && t.n_low.is_finite(),
        Some("tmm"),
        "n_low",
        format!("n_low must exceed 1, got {}", t.n_low),
    );
    check(
        t.periods >= 1,
        Some("tmm"),
        "periods",
        "periods must be at least 1".into(),
    );
    check(
        positive(t.omega0),
        Some("tmm"),
        "omega0",
        format!("omega0 must be positive, got {}", t.omega0),
    );
    check(
        positive(t.omega_min) && t.omega_max.is_finite() && t.omega_min < t.omega_max,
        Some("tmm"),
        "omega_max",
        format!(
            "need 0 < omega_min < omega_max, got [{}, {}]",
            t.omega_min, t.omega_max
        ),
    );
    check(
        t.samples >= 2,
        Some("tmm"),
        "samples",
        "samples must be at least 2".into(),
    );
    check(
        t.gap_threshold > 0.0 && t.gap_threshold < 1.0,
        Some("tmm"),
        "gap_threshold",
        format!("gap_threshold must lie in (0, 1), got {}", t.gap_threshold),
    );
    check(
        t.decay_periods[0] >= 1 && t.decay_periods[1] > t.decay_periods[0],
        Some("tmm"),
        "decay_periods",
        format!(
            "decay_periods must be an increasing pair of positive counts, got {:?}",
            t.decay_periods
        ),
    );

    let w = &config.wkb;
    check(
        !w.omegas.is_empty() && w.omegas.iter().all(|o| positive(*o)),
        Some("wkb"),
        "omegas",
        "omegas must be a non-empty list of positive frequencies".into(),
    );
    check(
        w.samples >= 2,
        Some("wkb"),
        "samples",
        "samples must be at least 2".into(),
    );
    check(
        config.kemmer.random_states >= 1,
        Some("kemmer"),
        "random_states",
        "random_states must be at least 1".into(),
    );
    check(
        !config.output.dir.is_empty(),
        Some("output"),
        "dir",
        "output dir must not be empty".into(),
    );
    errors
}

fn locate_section(text: &str, section: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            l.trim()
                .strip_prefix('[')
                .and_then(|r| r.split(']').next())
                .map(str::trim)
                == Some(section)
        })
        .map(|i| i + 1)
}
