//! Run configuration: defaults, figure presets, `key = value` files and
//! command-line flags, merged in that order of increasing precedence.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use trapfid_core::num_complex::Complex64;
use trapfid_core::QubitAmps;

use crate::error::{CliError, CliResult};

/// Largest truncation any mode will build.
pub const N_MAX_CAP: usize = 1024;

/// Every key accepted in a config file, in header order. Flags use the same
/// names with a `--` prefix.
pub const KEYS: [&str; 17] = [
    "mode",
    "theta-points",
    "theta-min",
    "theta-max",
    "eta-ld",
    "rabi",
    "detuning",
    "t-ratio",
    "initial-state",
    "amplitudes",
    "alpha",
    "beta",
    "n-max",
    "auto-truncation",
    "seed",
    "pure-phases",
    "output",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sweep,
    Fig2,
    Fig3,
    Converge,
    Dump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    Ground,
    /// `(2, √2, 1)/√7`
    Spread,
    Custom,
    Thermal,
    /// The pure state `√ρ_n` paired with a thermal ensemble.
    ThermalPure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurePhases {
    Zero,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    Auto,
    Fixed(usize),
}

macro_rules! keyword_enum {
    ($ty:ty, $key:literal, $($name:literal => $variant:expr),+ $(,)?) => {
        impl FromStr for $ty {
            type Err = CliError;
            fn from_str(s: &str) -> CliResult<Self> {
                match s {
                    $($name => Ok($variant),)+
                    _ => Err(CliError::malformed(
                        $key,
                        s,
                        concat!("expected one of:", $(" ", $name),+),
                    )),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                $(if *self == $variant { return f.write_str($name); })+
                unreachable!()
            }
        }
    };
}

keyword_enum!(Mode, "mode",
    "sweep" => Mode::Sweep, "fig2" => Mode::Fig2, "fig3" => Mode::Fig3,
    "converge" => Mode::Converge, "dump" => Mode::Dump);
keyword_enum!(InitialState, "initial-state",
    "ground" => InitialState::Ground, "spread" => InitialState::Spread,
    "custom" => InitialState::Custom, "thermal" => InitialState::Thermal,
    "thermal-pure" => InitialState::ThermalPure);
keyword_enum!(PurePhases, "pure-phases",
    "zero" => PurePhases::Zero, "random" => PurePhases::Random);

impl InitialState {
    pub fn is_thermal(self) -> bool {
        matches!(self, InitialState::Thermal | InitialState::ThermalPure)
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub theta_points: usize,
    pub theta_min: f64,
    pub theta_max: f64,
    pub eta_ld: Vec<f64>,
    pub rabi: f64,
    pub detuning: f64,
    pub t_ratio: Vec<f64>,
    pub initial_state: InitialState,
    pub amplitudes: Vec<Complex64>,
    pub qubit: QubitAmps,
    pub truncation: Truncation,
    pub seed: u64,
    pub pure_phases: PurePhases,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Sweep,
            theta_points: 64,
            theta_min: 0.0,
            theta_max: TAU,
            eta_ld: vec![0.1],
            rabi: 100.0,
            detuning: 0.0,
            t_ratio: Vec::new(),
            initial_state: InitialState::Ground,
            amplitudes: Vec::new(),
            qubit: QubitAmps::balanced(),
            truncation: Truncation::Auto,
            seed: 0,
            pure_phases: PurePhases::Zero,
            output: None,
        }
    }
}

/// Values as given, before cross-field validation.
#[derive(Debug, Clone)]
struct Draft {
    cfg: RunConfig,
    alpha: Complex64,
    beta: Complex64,
    n_max: Option<usize>,
    auto_truncation: bool,
    explicit: BTreeSet<&'static str>,
}

impl Draft {
    fn new(mode: Mode) -> Self {
        let mut cfg = RunConfig {
            mode,
            ..RunConfig::default()
        };
        match mode {
            Mode::Fig2 => {
                cfg.eta_ld = vec![0.1, 0.3, 1.0];
                cfg.rabi = 100.0;
            }
            Mode::Fig3 => {
                cfg.eta_ld = vec![0.1];
                cfg.rabi = 100.0;
                cfg.t_ratio = vec![1.0, 3.0, 10.0];
            }
            Mode::Sweep | Mode::Converge | Mode::Dump => {}
        }
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self {
            cfg,
            alpha: h,
            beta: h,
            n_max: None,
            auto_truncation: false,
            explicit: BTreeSet::new(),
        }
    }

    fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let key = canonical_key(key)?;
        let value = value.trim();
        let c = &mut self.cfg;
        match key {
            "mode" => c.mode = value.parse()?,
            "theta-points" => c.theta_points = parse_int(key, value)?,
            "theta-min" => c.theta_min = parse_angle(key, value)?,
            "theta-max" => c.theta_max = parse_angle(key, value)?,
            "eta-ld" => c.eta_ld = parse_list(key, value, parse_float)?,
            "rabi" => c.rabi = parse_float(key, value)?,
            "detuning" => c.detuning = parse_float(key, value)?,
            "t-ratio" => c.t_ratio = parse_list(key, value, parse_float)?,
            "initial-state" => c.initial_state = value.parse()?,
            "amplitudes" => c.amplitudes = parse_list(key, value, parse_complex)?,
            "alpha" => self.alpha = parse_complex(key, value)?,
            "beta" => self.beta = parse_complex(key, value)?,
            "n-max" => {
                self.n_max = if value == "auto" {
                    None
                } else {
                    Some(parse_int(key, value)?)
                }
            }
            "auto-truncation" => self.auto_truncation = parse_bool(key, value)?,
            "seed" => c.seed = parse_int(key, value)?,
            "pure-phases" => c.pure_phases = value.parse()?,
            "output" => c.output = (value != "-" && !value.is_empty()).then(|| PathBuf::from(value)),
            _ => unreachable!("canonical_key admits only known keys"),
        }
        self.explicit.insert(key);
        Ok(())
    }

    fn finish(self) -> CliResult<RunConfig> {
        let Draft {
            mut cfg,
            alpha,
            beta,
            n_max,
            auto_truncation,
            explicit,
        } = self;
        let conflict = |msg: String| Err(CliError::Config(msg));

        if cfg.theta_points == 0 || cfg.theta_points > 1_000_000 {
            return conflict(format!("theta-points = {} must lie in 1..=1000000", cfg.theta_points));
        }
        if cfg.theta_min > cfg.theta_max {
            return conflict(format!(
                "theta-min = {} exceeds theta-max = {}",
                cfg.theta_min, cfg.theta_max
            ));
        }
        if cfg.eta_ld.is_empty() {
            return conflict("eta-ld needs at least one value".into());
        }
        if let Some(e) = cfg.eta_ld.iter().find(|e| **e < 0.0) {
            return conflict(format!("eta-ld = {e} must be non-negative"));
        }
        if cfg.rabi <= 0.0 && cfg.mode != Mode::Dump {
            return conflict(format!("rabi = {} must be positive", cfg.rabi));
        }
        if let Some(t) = cfg.t_ratio.iter().find(|t| **t <= 0.0) {
            return conflict(format!("t-ratio = {t} must be positive"));
        }

        match cfg.mode {
            Mode::Fig2 | Mode::Fig3 => {
                for key in ["initial-state", "amplitudes"] {
                    if explicit.contains(key) {
                        return conflict(format!("`{key}` is fixed by the {} preset", cfg.mode));
                    }
                }
                if cfg.mode == Mode::Fig3 && cfg.t_ratio.is_empty() {
                    return conflict("fig3 needs at least one t-ratio".into());
                }
            }
            _ => {
                if cfg.initial_state.is_thermal() && cfg.t_ratio.is_empty() {
                    return conflict(format!(
                        "initial-state = {} needs t-ratio (e.g. --t-ratio 3)",
                        cfg.initial_state
                    ));
                }
            }
        }

        match (cfg.initial_state, cfg.amplitudes.is_empty()) {
            (InitialState::Custom, true) => {
                return conflict("initial-state = custom needs amplitudes (e.g. --amplitudes 0.6,0.8i)".into())
            }
            (InitialState::Custom, false) => {
                let norm: f64 = cfg.amplitudes.iter().map(|z| z.norm_sqr()).sum();
                if (norm - 1.0).abs() > 1e-6 {
                    return conflict(format!("amplitudes have norm² {norm}, expected 1"));
                }
                if cfg.amplitudes.len() > N_MAX_CAP + 1 {
                    return conflict(format!("at most {} amplitudes are supported", N_MAX_CAP + 1));
                }
                let s = norm.sqrt();
                cfg.amplitudes.iter_mut().for_each(|z| *z /= s);
            }
            (_, false) if explicit.contains("amplitudes") => {
                return conflict(format!(
                    "amplitudes only apply to initial-state = custom, not {}",
                    cfg.initial_state
                ))
            }
            _ => {}
        }

        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-6 {
            return conflict(format!("|alpha|² + |beta|² = {norm}, expected 1"));
        }
        let s = norm.sqrt();
        cfg.qubit = QubitAmps::new(alpha / s, beta / s).map_err(|e| CliError::Config(e.to_string()))?;

        cfg.truncation = match (n_max, auto_truncation) {
            (Some(n), true) => {
                return conflict(format!("n-max = {n} conflicts with auto-truncation; pick one"))
            }
            (Some(_), _) if cfg.mode == Mode::Converge => {
                return conflict("converge chooses n-max itself; drop n-max".into())
            }
            (Some(n), false) if n > N_MAX_CAP => {
                return conflict(format!("n-max = {n} exceeds the cap {N_MAX_CAP}"))
            }
            (Some(n), false) => Truncation::Fixed(n),
            (None, _) => Truncation::Auto,
        };
        Ok(cfg)
    }
}

fn canonical_key(key: &str) -> CliResult<&'static str> {
    let k = key.trim().replace('_', "-");
    KEYS.iter()
        .find(|known| **known == k)
        .copied()
        .ok_or_else(|| CliError::UnknownKey(key.trim().to_string()))
}

fn parse_float(key: &str, value: &str) -> CliResult<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(CliError::malformed(key, value, "must be finite")),
        Err(_) => Err(CliError::malformed(key, value, "not a number")),
    }
}

fn parse_int<T: FromStr>(key: &str, value: &str) -> CliResult<T> {
    value
        .parse()
        .map_err(|_| CliError::malformed(key, value, "not a non-negative integer"))
}

fn parse_bool(key: &str, value: &str) -> CliResult<bool> {
    match value {
        "true" | "yes" | "1" | "" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(CliError::malformed(key, value, "expected true or false")),
    }
}

/// A number, optionally times π: `1.5`, `pi`, `2pi`, `pi/2`, `0.5*pi`.
fn parse_angle(key: &str, value: &str) -> CliResult<f64> {
    let v = value.to_ascii_lowercase().replace(' ', "");
    let Some(at) = v.find("pi") else {
        return parse_float(key, value);
    };
    let (head, tail) = (&v[..at], &v[at + 2..]);
    let head = head.strip_suffix('*').unwrap_or(head);
    let scale = if head.is_empty() {
        1.0
    } else {
        parse_float(key, head).map_err(|_| CliError::malformed(key, value, "expected a multiple of pi"))?
    };
    let div = match tail.strip_prefix('/') {
        Some(d) => parse_float(key, d).map_err(|_| CliError::malformed(key, value, "bad divisor"))?,
        None if tail.is_empty() => 1.0,
        None => return Err(CliError::malformed(key, value, "expected a multiple of pi")),
    };
    if div == 0.0 {
        return Err(CliError::malformed(key, value, "division by zero"));
    }
    Ok(scale * PI / div)
}

fn parse_complex(key: &str, value: &str) -> CliResult<Complex64> {
    let z: Complex64 = value
        .replace(' ', "")
        .parse()
        .map_err(|_| CliError::malformed(key, value, "expected a complex number such as 0.6-0.8i"))?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(CliError::malformed(key, value, "must be finite"));
    }
    Ok(z)
}

fn parse_list<T>(key: &str, value: &str, item: fn(&str, &str) -> CliResult<T>) -> CliResult<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect()
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_file_pairs(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::malformed(
                &format!("line {}", lineno + 1),
                line,
                "expected `key = value`",
            ));
        };
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Merge defaults, the preset of the selected mode, file pairs and flag
/// pairs (later wins).
pub fn resolve(file: &[(String, String)], flags: &[(String, String)]) -> CliResult<RunConfig> {
    let mut mode = Mode::Sweep;
    for (k, v) in file.iter().chain(flags) {
        if canonical_key(k)? == "mode" {
            mode = v.trim().parse()?;
        }
    }
    let mut draft = Draft::new(mode);
    for (k, v) in file.iter().chain(flags) {
        draft.set(k, v)?;
    }
    draft.finish()
}

/// Read an optional config file and merge it with flag pairs.
pub fn parse_config(flags: &[(String, String)], file: Option<&Path>) -> CliResult<RunConfig> {
    let file_pairs = match file {
        Some(path) => parse_file_pairs(&std::fs::read_to_string(path)?)?,
        None => Vec::new(),
    };
    resolve(&file_pairs, flags)
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Resolved settings as `key = value` pairs that parse back to the same
    /// configuration. The output path is omitted so that the header does not
    /// depend on where results are written.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let num = |x: &f64| format!("{x}");
        let mut pairs = vec![
            ("mode", self.mode.to_string()),
            ("theta-points", self.theta_points.to_string()),
            ("theta-min", num(&self.theta_min)),
            ("theta-max", num(&self.theta_max)),
            ("eta-ld", join(&self.eta_ld, num)),
            ("rabi", num(&self.rabi)),
            ("detuning", num(&self.detuning)),
            ("t-ratio", join(&self.t_ratio, num)),
        ];
        if !matches!(self.mode, Mode::Fig2 | Mode::Fig3) {
            pairs.push(("initial-state", self.initial_state.to_string()));
        }
        if self.initial_state == InitialState::Custom {
            pairs.push(("amplitudes", join(&self.amplitudes, |z| z.to_string())));
        }
        pairs.push(("alpha", self.qubit.alpha.to_string()));
        pairs.push(("beta", self.qubit.beta.to_string()));
        let n_max = match self.truncation {
            Truncation::Auto => "auto".to_string(),
            Truncation::Fixed(n) => n.to_string(),
        };
        pairs.push(("n-max", n_max));
        pairs.push(("seed", self.seed.to_string()));
        pairs.push(("pure-phases", self.pure_phases.to_string()));
        pairs
    }
}
