use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::error::HarnessError;
use crate::hilbert::HilbertSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    KdDist,
    Ccp,
    Ergodicity,
    Reconstruct,
    ChainRule,
    ActionPhase,
    FreePropagator,
    Midpoint,
    ClassicalDensity,
    GradientCheck,
    CoarseGrain,
    WeakSim,
    BiasScan,
}

impl Scenario {
    pub const ALL: [Scenario; 13] = [
        Scenario::KdDist,
        Scenario::Ccp,
        Scenario::Ergodicity,
        Scenario::Reconstruct,
        Scenario::ChainRule,
        Scenario::ActionPhase,
        Scenario::FreePropagator,
        Scenario::Midpoint,
        Scenario::ClassicalDensity,
        Scenario::GradientCheck,
        Scenario::CoarseGrain,
        Scenario::WeakSim,
        Scenario::BiasScan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::KdDist => "kd-dist",
            Scenario::Ccp => "ccp",
            Scenario::Ergodicity => "ergodicity",
            Scenario::Reconstruct => "reconstruct",
            Scenario::ChainRule => "chain-rule",
            Scenario::ActionPhase => "action-phase",
            Scenario::FreePropagator => "free-propagator",
            Scenario::Midpoint => "midpoint",
            Scenario::ClassicalDensity => "classical-density",
            Scenario::GradientCheck => "gradient-check",
            Scenario::CoarseGrain => "coarse-grain",
            Scenario::WeakSim => "weak-sim",
            Scenario::BiasScan => "bias-scan",
        }
    }
}

impl FromStr for Scenario {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| HarnessError::config("scenario", format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(HarnessError::config("format", format!("expected `csv` or `json`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub mass: f64,
}

fn one() -> f64 {
    1.0
}

impl SpaceConfig {
    pub fn hilbert(&self) -> Result<HilbertSpec<f64>, HarnessError> {
        HilbertSpec::with_units(self.dim, self.length, self.hbar, self.mass).map_err(|e| {
            let key = match &e {
                crate::LabError::InvalidSpace(m) if m.starts_with('D') => "space.D",
                crate::LabError::InvalidSpace(m) if m.starts_with('L') => "space.L",
                crate::LabError::InvalidSpace(m) if m.starts_with("hbar") => "space.hbar",
                crate::LabError::InvalidSpace(m) if m.starts_with("mass") => "space.mass",
                _ => "space",
            };
            HarnessError::config(key, e.to_string())
        })
    }
}

/// How a state is prepared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateSpec {
    /// Haar-random, drawn from the scenario's seeded stream.
    Random {},
    Position {
        index: usize,
    },
    /// DFT slot for signed frequency `frequency`.
    Momentum {
        frequency: i64,
    },
    Gaussian {
        x0: f64,
        p0: f64,
        width: f64,
    },
    /// `n`-th eigenstate of the discretized Hamiltonian.
    Eigenstate {
        n: usize,
        potential: PotentialSpec,
    },
    Amplitudes {
        re: Vec<f64>,
        im: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Free {},
    /// `m omega^2 x^2 / 2`.
    Harmonic {
        omega: f64,
    },
    /// `lambda x^4 / 4`.
    Quartic {
        lambda: f64,
    },
}

impl PotentialSpec {
    pub fn value(&self, x: f64, mass: f64) -> f64 {
        match *self {
            PotentialSpec::Free {} => 0.0,
            PotentialSpec::Harmonic { omega } => 0.5 * mass * omega * omega * x * x,
            PotentialSpec::Quartic { lambda } => 0.25 * lambda * x.powi(4),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KdParams {
    pub state: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CcpParams {
    pub m: StateSpec,
    pub a: StateSpec,
    pub b: StateSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructParams {
    pub state: StateSpec,
    #[serde(default)]
    pub reference: i64,
    /// Second reference used to display the gauge change.
    #[serde(default = "default_alt_reference")]
    pub alt_reference: i64,
}

fn default_alt_reference() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainRuleParams {
    pub m: StateSpec,
    pub state: StateSpec,
    #[serde(default)]
    pub reference: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionPhaseParams {
    pub state: StateSpec,
    #[serde(default)]
    pub momentum: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreePropagatorParams {
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "default_p0")]
    pub p0: f64,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Probe offsets span `[-spread, spread]` around the classical endpoint.
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default = "default_flat")]
    pub band_flat: f64,
    #[serde(default = "default_zero")]
    pub band_zero: f64,
}

fn default_p0() -> f64 {
    5.0
}
fn default_probes() -> usize {
    20
}
fn default_spread() -> f64 {
    4.0
}
fn default_flat() -> f64 {
    0.4
}
fn default_zero() -> f64 {
    0.6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MidpointParams {
    #[serde(default = "default_xi")]
    pub x_i: f64,
    #[serde(default = "default_xf")]
    pub x_f: f64,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default = "default_probes")]
    pub probes: usize,
    #[serde(default = "default_spread")]
    pub spread: f64,
    #[serde(default = "default_flat")]
    pub band_flat: f64,
    #[serde(default = "default_zero")]
    pub band_zero: f64,
}

fn default_xi() -> f64 {
    -4.0
}
fn default_xf() -> f64 {
    4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassicalParams {
    pub potential: PotentialSpec,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GradientParams {
    Eigenstate {
        potential: PotentialSpec,
        n: usize,
        #[serde(default)]
        momentum: i64,
    },
    Free {
        x0: f64,
        p0: f64,
        t: f64,
        x_start: f64,
        step: f64,
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarseGrainParams {
    pub potential: PotentialSpec,
    pub n: usize,
    #[serde(default)]
    pub momentum: i64,
    #[serde(default = "default_action_ratio")]
    pub action_ratio: f64,
}

fn default_action_ratio() -> f64 {
    10.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakParams {
    pub pre: StateSpec,
    pub post: StateSpec,
    /// The measured observable is the projector onto this state.
    pub projector: StateSpec,
    pub coupling: f64,
    #[serde(default = "one")]
    pub pointer_width: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BiasScanParams {
    pub pre: StateSpec,
    pub post: StateSpec,
    pub projector: StateSpec,
    pub couplings: Vec<f64>,
    #[serde(default = "one")]
    pub pointer_width: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ScenarioParams {
    Kd(KdParams),
    Ccp(CcpParams),
    Ergodicity(KdParams),
    Reconstruct(ReconstructParams),
    ChainRule(ChainRuleParams),
    ActionPhase(ActionPhaseParams),
    FreePropagator(FreePropagatorParams),
    Midpoint(MidpointParams),
    Classical(ClassicalParams),
    Gradient(GradientParams),
    CoarseGrain(CoarseGrainParams),
    Weak(WeakParams),
    BiasScan(BiasScanParams),
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub space: SpaceConfig,
    pub seed: u64,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub params: ScenarioParams,
}

/// Command-line values that take precedence over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub dim: Option<usize>,
    pub length: Option<f64>,
    pub hbar: Option<f64>,
    pub mass: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: Option<String>,
    seed: Option<u64>,
    format: Option<String>,
    output: Option<PathBuf>,
    space: Option<RawSpace>,
    #[serde(default)]
    params: toml::Table,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpace {
    #[serde(rename = "D")]
    dim: Option<usize>,
    #[serde(rename = "L")]
    length: Option<f64>,
    hbar: Option<f64>,
    mass: Option<f64>,
}

fn toml_error(prefix: &str, e: toml::de::Error) -> HarnessError {
    let message = e.message().to_owned();
    let key = message
        .split('`')
        .nth(1)
        .filter(|_| message.starts_with("unknown field") || message.starts_with("missing field"))
        .map(|k| if prefix.is_empty() { k.to_owned() } else { format!("{prefix}.{k}") })
        .unwrap_or_else(|| if prefix.is_empty() { "document".to_owned() } else { prefix.to_owned() });
    HarnessError::config(key, message)
}

fn typed<T: for<'de> Deserialize<'de>>(params: &toml::Table) -> Result<T, HarnessError> {
    T::deserialize(toml::Value::Table(params.clone())).map_err(|e| toml_error("params", e))
}

/// Parses a TOML document, applies `overrides` and validates every physical
/// parameter before any computation happens.
pub fn parse_config(text: &str, overrides: &Overrides) -> Result<ScenarioConfig, HarnessError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| toml_error("", e))?;
    let from_doc = raw.scenario.as_deref().map(Scenario::from_str).transpose()?;
    let scenario = match (overrides.scenario, from_doc) {
        (Some(cli), Some(doc)) if cli != doc => {
            return Err(HarnessError::config(
                "scenario",
                format!("document names `{}` but `{}` was requested", doc.name(), cli.name()),
            ))
        }
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => return Err(HarnessError::config("scenario", "no scenario given")),
    };
    let rs = raw.space.unwrap_or(RawSpace { dim: None, length: None, hbar: None, mass: None });
    let space = SpaceConfig {
        dim: overrides.dim.or(rs.dim).ok_or_else(|| HarnessError::config("space.D", "missing"))?,
        length: overrides.length.or(rs.length).ok_or_else(|| HarnessError::config("space.L", "missing"))?,
        hbar: overrides.hbar.or(rs.hbar).unwrap_or(1.0),
        mass: overrides.mass.or(rs.mass).unwrap_or(1.0),
    };
    space.hilbert()?;
    let format = match (overrides.format, raw.format) {
        (Some(f), _) => f,
        (None, Some(s)) => s.parse()?,
        (None, None) => Format::default(),
    };
    let params = match scenario {
        Scenario::KdDist => ScenarioParams::Kd(typed(&raw.params)?),
        Scenario::Ccp => ScenarioParams::Ccp(typed(&raw.params)?),
        Scenario::Ergodicity => ScenarioParams::Ergodicity(typed(&raw.params)?),
        Scenario::Reconstruct => ScenarioParams::Reconstruct(typed(&raw.params)?),
        Scenario::ChainRule => ScenarioParams::ChainRule(typed(&raw.params)?),
        Scenario::ActionPhase => ScenarioParams::ActionPhase(typed(&raw.params)?),
        Scenario::FreePropagator => ScenarioParams::FreePropagator(typed(&raw.params)?),
        Scenario::Midpoint => ScenarioParams::Midpoint(typed(&raw.params)?),
        Scenario::ClassicalDensity => ScenarioParams::Classical(typed(&raw.params)?),
        Scenario::GradientCheck => ScenarioParams::Gradient(typed(&raw.params)?),
        Scenario::CoarseGrain => ScenarioParams::CoarseGrain(typed(&raw.params)?),
        Scenario::WeakSim => ScenarioParams::Weak(typed(&raw.params)?),
        Scenario::BiasScan => ScenarioParams::BiasScan(typed(&raw.params)?),
    };
    let config = ScenarioConfig {
        scenario,
        space,
        seed: overrides.seed.or(raw.seed).unwrap_or(0),
        format,
        output: overrides.output.clone().or(raw.output),
        params,
    };
    validate(&config)?;
    Ok(config)
}

fn positive(key: &str, v: f64, what: &str) -> Result<(), HarnessError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HarnessError::config(key, format!("{what} must be positive, got {v}")))
    }
}

fn check_state(key: &str, s: &StateSpec, space: &SpaceConfig) -> Result<(), HarnessError> {
    match s {
        StateSpec::Position { index } if *index >= space.dim => {
            Err(HarnessError::config(format!("{key}.index"), format!("index {index} outside 0..{}", space.dim)))
        }
        StateSpec::Gaussian { width, .. } => positive(&format!("{key}.width"), *width, "width"),
        StateSpec::Eigenstate { n, potential } => {
            if *n >= space.dim {
                return Err(HarnessError::config(format!("{key}.n"), format!("n = {n} outside 0..{}", space.dim)));
            }
            check_potential(&format!("{key}.potential"), potential)
        }
        StateSpec::Amplitudes { re, im } if re.len() != space.dim || im.len() != space.dim => {
            Err(HarnessError::config(
                format!("{key}.re"),
                format!("expected {} amplitudes, got {} re and {} im", space.dim, re.len(), im.len()),
            ))
        }
        _ => Ok(()),
    }
}

fn check_potential(key: &str, p: &PotentialSpec) -> Result<(), HarnessError> {
    match *p {
        PotentialSpec::Harmonic { omega } => positive(&format!("{key}.omega"), omega, "omega"),
        PotentialSpec::Quartic { lambda } => positive(&format!("{key}.lambda"), lambda, "lambda"),
        PotentialSpec::Free {} => Ok(()),
    }
}

fn check_band(flat: f64, zero: f64) -> Result<(), HarnessError> {
    if !(flat > 0.0 && flat < zero && zero <= 1.0) {
        return Err(HarnessError::config(
            "params.band_flat",
            format!("need 0 < band_flat < band_zero <= 1, got {flat}, {zero}"),
        ));
    }
    Ok(())
}

fn validate(c: &ScenarioConfig) -> Result<(), HarnessError> {
    let sp = &c.space;
    match &c.params {
        ScenarioParams::Kd(p) | ScenarioParams::Ergodicity(p) => check_state("params.state", &p.state, sp),
        ScenarioParams::Ccp(p) => {
            check_state("params.m", &p.m, sp)?;
            check_state("params.a", &p.a, sp)?;
            check_state("params.b", &p.b, sp)
        }
        ScenarioParams::Reconstruct(p) => check_state("params.state", &p.state, sp),
        ScenarioParams::ChainRule(p) => {
            check_state("params.m", &p.m, sp)?;
            check_state("params.state", &p.state, sp)
        }
        ScenarioParams::ActionPhase(p) => check_state("params.state", &p.state, sp),
        ScenarioParams::FreePropagator(p) => {
            positive("params.t", p.t, "time")?;
            positive("params.spread", p.spread, "spread")?;
            if p.probes < 2 {
                return Err(HarnessError::config("params.probes", "at least 2 probes required"));
            }
            check_band(p.band_flat, p.band_zero)
        }
        ScenarioParams::Midpoint(p) => {
            positive("params.t", p.t, "time")?;
            positive("params.spread", p.spread, "spread")?;
            if p.probes < 2 {
                return Err(HarnessError::config("params.probes", "at least 2 probes required"));
            }
            check_band(p.band_flat, p.band_zero)
        }
        ScenarioParams::Classical(p) => {
            check_potential("params.potential", &p.potential)?;
            if !p.energy.is_finite() {
                return Err(HarnessError::config("params.energy", "energy must be finite"));
            }
            Ok(())
        }
        ScenarioParams::Gradient(GradientParams::Eigenstate { potential, n, .. }) => {
            check_potential("params.potential", potential)?;
            if *n >= sp.dim {
                return Err(HarnessError::config("params.n", format!("n = {n} outside 0..{}", sp.dim)));
            }
            Ok(())
        }
        ScenarioParams::Gradient(GradientParams::Free { t, step, samples, .. }) => {
            positive("params.t", *t, "time")?;
            positive("params.step", *step, "step")?;
            if *samples < 3 {
                return Err(HarnessError::config("params.samples", "at least 3 samples required"));
            }
            Ok(())
        }
        ScenarioParams::CoarseGrain(p) => {
            check_potential("params.potential", &p.potential)?;
            positive("params.action_ratio", p.action_ratio, "action ratio")?;
            if p.n >= sp.dim {
                return Err(HarnessError::config("params.n", format!("n = {} outside 0..{}", p.n, sp.dim)));
            }
            Ok(())
        }
        ScenarioParams::Weak(p) => {
            check_state("params.pre", &p.pre, sp)?;
            check_state("params.post", &p.post, sp)?;
            check_state("params.projector", &p.projector, sp)?;
            positive("params.coupling", p.coupling, "coupling")?;
            positive("params.pointer_width", p.pointer_width, "pointer width")?;
            if p.trials == 0 {
                return Err(HarnessError::config("params.trials", "trials must be at least 1"));
            }
            Ok(())
        }
        ScenarioParams::BiasScan(p) => {
            check_state("params.pre", &p.pre, sp)?;
            check_state("params.post", &p.post, sp)?;
            check_state("params.projector", &p.projector, sp)?;
            if p.couplings.is_empty() {
                return Err(HarnessError::config("params.couplings", "at least one coupling required"));
            }
            for g in &p.couplings {
                positive("params.couplings", *g, "coupling")?;
            }
            if p.couplings.windows(2).any(|w| w[1] >= w[0]) {
                return Err(HarnessError::config("params.couplings", "couplings must be sorted in descending order"));
            }
            positive("params.pointer_width", p.pointer_width, "pointer width")?;
            if p.trials == 0 {
                return Err(HarnessError::config("params.trials", "trials must be at least 1"));
            }
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_ergodicity_document() {
        let c = parse_config(
            "scenario = \"ergodicity\"\nseed = 7\n[space]\nD = 16\nL = 8.0\n[params]\nstate = { kind = \"random\" }\n",
            &Overrides::default(),
        )
        .unwrap();
        assert_eq!(c.scenario, Scenario::Ergodicity);
        assert_eq!(c.seed, 7);
        assert_eq!(c.space.hbar, 1.0);
    }

    #[test]
    fn one_dimensional_space_is_rejected() {
        let e = parse_config(
            "scenario = \"ergodicity\"\n[space]\nD = 1\nL = 8.0\n[params]\nstate = { kind = \"random\" }\n",
            &Overrides::default(),
        )
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("D ≥ 2"), "{e}");
    }

    #[test]
    fn zero_coupling_is_rejected() {
        let doc = r#"
scenario = "weak-sim"
[space]
D = 2
L = 2.0
[params]
pre = { kind = "position", index = 0 }
post = { kind = "momentum", frequency = 0 }
projector = { kind = "position", index = 1 }
coupling = 0.0
trials = 100
"#;
        let e = parse_config(doc, &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("coupling must be positive"), "{e}");
    }

    #[test]
    fn unknown_keys_are_named() {
        let doc =
            "scenario = \"ergodicity\"\ncolour = 1\n[space]\nD = 4\nL = 1.0\n[params]\nstate = { kind = \"random\" }\n";
        let e = parse_config(doc, &Overrides::default()).unwrap_err();
        assert!(e.to_string().contains("colour"), "{e}");
        let doc =
            "scenario = \"ergodicity\"\n[space]\nD = 4\nL = 1.0\n[params]\nstate = { kind = \"random\", extra = 2 }\n";
        assert!(parse_config(doc, &Overrides::default()).is_err());
        let doc = doc.replace("kind = \"random\", extra = 2", "kind = \"position\", index = 0, extra = 2");
        assert!(parse_config(&doc, &Overrides::default()).is_err());
    }

    #[test]
    fn flags_win_over_the_document() {
        let doc =
            "scenario = \"ergodicity\"\nseed = 1\n[space]\nD = 4\nL = 1.0\n[params]\nstate = { kind = \"random\" }\n";
        let o = Overrides { seed: Some(9), dim: Some(8), format: Some(Format::Json), ..Default::default() };
        let c = parse_config(doc, &o).unwrap();
        assert_eq!((c.seed, c.space.dim, c.format), (9, 8, Format::Json));
        let clash = Overrides { scenario: Some(Scenario::Ccp), ..Default::default() };
        assert!(parse_config(doc, &clash).is_err());
    }
}
