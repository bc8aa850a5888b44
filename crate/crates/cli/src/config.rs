//! Run files: a TOML document with a handful of top-level keys and one
//! section per physical sub-system. Frequencies are ratios to `ω_r`, qubit
//! rates and times are in units of `J`.

use std::path::{Path, PathBuf};

use sdqsim_core::dynamics::DecayModel;
use sdqsim_core::spectroscopy::{CircuitConfig, DriveConfig};
use sdqsim_core::{linspace, SquidConfig64, TwoQubitParams64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DiodeChar,
    Spectroscopy,
    Dynamics,
    ContrastMap,
    Tomography,
}

impl Experiment {
    /// Prefix of every emitted file.
    pub fn file_prefix(self) -> &'static str {
        match self {
            Experiment::DiodeChar => "diode_char",
            Experiment::Spectroscopy => "spectroscopy",
            Experiment::Dynamics => "dynamics",
            Experiment::ContrastMap => "contrast_map",
            Experiment::Tomography => "tomography",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Experiment::DiodeChar => "diode-char",
            Experiment::Spectroscopy => "spectroscopy",
            Experiment::Dynamics => "dynamics",
            Experiment::ContrastMap => "contrast-map",
            Experiment::Tomography => "tomography",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Absolute anchor for the ratio-valued frequencies.
    #[serde(default = "default_omega_r_ghz")]
    pub omega_r_ghz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub squid: Option<SquidSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<QubitsSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tomography: Option<TomographySection>,
    #[serde(default)]
    pub grids: Grids,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_omega_r_ghz() -> f64 {
    5.0
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquidSection {
    pub tau1: f64,
    pub tau2: f64,
    #[serde(default)]
    pub phi_b: f64,
    #[serde(default)]
    pub temperature: f64,
    /// Superconducting gap; all energies are reported in units of it.
    #[serde(default = "one")]
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumModel {
    #[default]
    Quantum,
    Classical,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    #[serde(default)]
    pub model: SpectrumModel,
    pub kappa1: f64,
    pub kappa2: f64,
    #[serde(default)]
    pub lambda_kerr: f64,
    /// Direction splitting `δω/ω_r`; derived from the currents when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_omega: Option<f64>,
    #[serde(default)]
    pub i_applied: f64,
    #[serde(default = "one")]
    pub ic_plus: f64,
    #[serde(default = "one")]
    pub ic_minus: f64,
    #[serde(default = "one")]
    pub l0: f64,
    #[serde(default = "one")]
    pub c_shunt: f64,
    #[serde(default)]
    pub r_loss: f64,
    #[serde(default = "default_z0")]
    pub z0: f64,
}

fn default_z0() -> f64 {
    0.01
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub eps_pump: f64,
    pub omega_pump: f64,
    pub eps_probe: f64,
    #[serde(default)]
    pub include_idler: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayModelName {
    #[default]
    Correlated,
    CrossOnly,
}

impl From<DecayModelName> for DecayModel {
    fn from(m: DecayModelName) -> Self {
        match m {
            DecayModelName::Correlated => DecayModel::Correlated,
            DecayModelName::CrossOnly => DecayModel::CrossOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Initial {
    #[default]
    #[serde(rename = "01")]
    Q2Excited,
    #[serde(rename = "10")]
    Q1Excited,
    #[serde(rename = "both")]
    Both,
}

impl Initial {
    /// `(label, basis index)` of each initial state to run.
    pub fn states(self) -> Vec<(&'static str, usize)> {
        match self {
            Initial::Q2Excited => vec![("01", 1)],
            Initial::Q1Excited => vec![("10", 2)],
            Initial::Both => vec![("01", 1), ("10", 2)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitsSection {
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub phi: f64,
    #[serde(default)]
    pub gamma1: [f64; 2],
    #[serde(default)]
    pub gamma_collective: f64,
    #[serde(default)]
    pub omega1: f64,
    #[serde(default)]
    pub omega2: f64,
    #[serde(default)]
    pub decay_model: DecayModelName,
    #[serde(default)]
    pub initial: Initial,
    /// Evaluation time for contrast maps and tomography; `π/(4J)` if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_eval: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TomographySection {
    /// Shots per Pauli setting; 0 gives exact expectation values.
    #[serde(default)]
    pub shots: u64,
}

/// Either explicit values or an inclusive linear range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Values(Vec<f64>),
    Range(RangeSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            GridSpec::Values(v) => v.clone(),
            GridSpec::Range(r) => linspace(r.start, r.stop, r.points),
        }
    }

    fn check(&self, name: &str, increasing: bool) -> Result<(), CliError> {
        if let GridSpec::Range(r) = self {
            if r.points == 0 {
                return Err(CliError::validation(format!("grids.{name}: points must be >= 1")));
            }
        }
        let v = self.values();
        if v.is_empty() {
            return Err(CliError::validation(format!("grids.{name} must be nonempty")));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(CliError::validation(format!("grids.{name} must be finite (got {x})")));
        }
        if increasing && v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::validation(format!("grids.{name} must be strictly increasing")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_b: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau1: Option<GridSpec>,
    /// Probe frequencies over `ω_r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<GridSpec>,
    /// Times in units of `1/J`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<GridSpec>,
    /// Coupling phases.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<GridSpec>,
    /// Collective decay rates over `J`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<GridSpec>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    fn require<'a, S>(&self, section: &'a Option<S>, name: &str) -> Result<&'a S, CliError> {
        section.as_ref().ok_or_else(|| {
            CliError::validation(format!(
                "experiment '{}' requires a [{name}] section",
                self.experiment.name()
            ))
        })
    }

    fn require_grid<'a>(&self, grid: &'a Option<GridSpec>, name: &str) -> Result<&'a GridSpec, CliError> {
        grid.as_ref().ok_or_else(|| {
            CliError::validation(format!(
                "experiment '{}' requires grids.{name}",
                self.experiment.name()
            ))
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.omega_r_ghz > 0.0 && self.omega_r_ghz.is_finite()) {
            return Err(CliError::validation(format!(
                "omega_r_ghz must be positive (got {})",
                self.omega_r_ghz
            )));
        }
        let g = &self.grids;
        for (name, spec, inc) in [
            ("phi_b", &g.phi_b, false),
            ("tau1", &g.tau1, false),
            ("probe", &g.probe, true),
            ("time", &g.time, true),
            ("phi", &g.phi, false),
            ("gamma", &g.gamma, false),
        ] {
            if let Some(s) = spec {
                s.check(name, inc)?;
            }
        }
        if let Some(t) = &g.time {
            if t.values()[0] < 0.0 {
                return Err(CliError::validation("grids.time must start at t >= 0"));
            }
        }
        if let Some(s) = &g.gamma {
            if let Some(x) = s.values().iter().find(|x| **x < 0.0) {
                return Err(CliError::validation(format!("grids.gamma must be >= 0 (got {x})")));
            }
        }
        if let Some(s) = &g.probe {
            if let Some(x) = s.values().iter().find(|x| **x <= 0.0) {
                return Err(CliError::validation(format!("grids.probe must be > 0 (got {x})")));
            }
        }
        if let Some(s) = &g.tau1 {
            if let Some(x) = s.values().iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(CliError::validation(format!(
                    "grids.tau1: tau must lie in [0,1] (got {x})"
                )));
            }
        }

        match self.experiment {
            Experiment::DiodeChar => {
                self.squid_config()?;
                if g.tau1.is_some() && g.phi_b.is_none() {
                    return Err(CliError::validation("grids.tau1 needs grids.phi_b for the c3 map"));
                }
            }
            Experiment::Spectroscopy => {
                self.circuit_config()?;
                self.drive_config()?;
            }
            Experiment::Dynamics => {
                self.qubit_params()?;
                self.require_grid(&g.time, "time")?;
            }
            Experiment::ContrastMap => {
                self.qubit_params()?;
                self.require_grid(&g.phi, "phi")?;
                if g.gamma.is_none() && g.time.is_none() {
                    return Err(CliError::validation(
                        "experiment 'contrast-map' requires grids.gamma or grids.time",
                    ));
                }
            }
            Experiment::Tomography => {
                self.qubit_params()?;
            }
        }
        Ok(())
    }

    pub fn squid_config(&self) -> Result<SquidConfig64, CliError> {
        let s = self.require(&self.squid, "squid")?;
        let mut cfg = SquidConfig64::new(s.tau1, s.tau2, s.phi_b);
        cfg.temperature = s.temperature;
        cfg.j1.delta = s.delta;
        cfg.j2.delta = s.delta;
        cfg.validate().map_err(|e| CliError::field("squid", e))?;
        if !(s.delta > 0.0 && s.delta.is_finite()) {
            return Err(CliError::validation(format!("squid.delta must be positive (got {})", s.delta)));
        }
        Ok(cfg)
    }

    /// Circuit in units where `1/√(l0 c) = ω_r`; ratio inputs are scaled by
    /// that `ω_r`.
    pub fn circuit_config(&self) -> Result<CircuitConfig<f64>, CliError> {
        let c = self.require(&self.circuit, "circuit")?;
        if !(c.l0 > 0.0 && c.c_shunt > 0.0) {
            return Err(CliError::validation("circuit.l0 and circuit.c_shunt must be positive"));
        }
        let omega_r = 1.0 / (c.l0 * c.c_shunt).sqrt();
        let cfg = CircuitConfig {
            l0: c.l0,
            c_shunt: c.c_shunt,
            r_loss: c.r_loss,
            z0: c.z0,
            omega_r,
            kappa1: c.kappa1 * omega_r,
            kappa2: c.kappa2 * omega_r,
            lambda_kerr: c.lambda_kerr * omega_r,
            i_applied: c.i_applied,
            ic_plus: c.ic_plus,
            ic_minus: c.ic_minus,
            delta_omega: c.delta_omega.map(|d| d * omega_r),
        };
        cfg.validate().map_err(|e| CliError::field("circuit", e))?;
        Ok(cfg)
    }

    pub fn drive_config(&self) -> Result<DriveConfig<f64>, CliError> {
        let omega_r = self.circuit_config()?.omega_r;
        let d = self.require(&self.drive, "drive")?;
        let probe = self.require_grid(&self.grids.probe, "probe")?;
        let cfg = DriveConfig {
            eps_pump: d.eps_pump * omega_r,
            omega_pump: d.omega_pump * omega_r,
            eps_probe: d.eps_probe * omega_r,
            probe_grid: probe.values().into_iter().map(|w| w * omega_r).collect(),
            include_idler: d.include_idler,
        };
        cfg.validate().map_err(|e| CliError::field("drive", e))?;
        Ok(cfg)
    }

    pub fn qubit_params(&self) -> Result<TwoQubitParams64, CliError> {
        let q = self.require(&self.qubits, "qubits")?;
        if !(q.j > 0.0 && q.j.is_finite()) {
            return Err(CliError::validation(format!("qubits.j must be positive (got {})", q.j)));
        }
        if let Some(t) = q.t_eval {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(CliError::validation(format!("qubits.t_eval must be >= 0 (got {t})")));
            }
        }
        let mut p = TwoQubitParams64::resonant(q.j, q.phi, q.gamma_collective);
        p.gamma1 = q.gamma1;
        p.omega1 = q.omega1;
        p.omega2 = q.omega2;
        p.decay_model = q.decay_model.into();
        p.validate().map_err(|e| CliError::field("qubits", e))?;
        Ok(p)
    }

    pub fn t_eval(&self) -> f64 {
        let q = self.qubits.as_ref().expect("validated");
        q.t_eval.unwrap_or(std::f64::consts::FRAC_PI_4 / q.j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
experiment = "diode-char"

[squid]
tau1 = 0.9
tau2 = 0.8

[grids]
phi_b = { start = -3.14159, stop = 3.14159, points = 11 }
"#;

    #[test]
    fn minimal_diode_config() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.experiment, Experiment::DiodeChar);
        assert_eq!(cfg.grids.phi_b.unwrap().values().len(), 11);
        assert_eq!(cfg.squid.unwrap().delta, 1.0);
    }

    #[test]
    fn tau_out_of_range_names_bound() {
        let text = MINIMAL.replace("tau1 = 0.9", "tau1 = 1.3");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert!(err.to_string().contains("tau must lie in [0,1]"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = MINIMAL.replace("tau2 = 0.8", "tau2 = 0.8\ntau3 = 0.1");
        assert!(matches!(parse_config(&text), Err(CliError::Parse(_))));
        let text = format!("colour = 1\n{MINIMAL}");
        assert!(matches!(parse_config(&text), Err(CliError::Parse(_))));
    }

    #[test]
    fn missing_qubits_for_dynamics() {
        let text = "experiment = \"dynamics\"\n[grids]\ntime = [0.0, 1.0]\n";
        let err = parse_config(text).unwrap_err();
        assert!(matches!(err, CliError::Validation(_)));
        assert!(err.to_string().contains("[qubits]"));
    }

    #[test]
    fn grid_forms() {
        let text = "experiment = \"dynamics\"\n[qubits]\nphi = 1.0\n[grids]\ntime = [0.0, 0.5, 2.0]\nphi = { start = 0.0, stop = 1.0, points = 3 }\n";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.grids.time.unwrap().values(), vec![0.0, 0.5, 2.0]);
        assert_eq!(cfg.grids.phi.unwrap().values(), vec![0.0, 0.5, 1.0]);

        let bad = text.replace("[0.0, 0.5, 2.0]", "[0.0, 2.0, 0.5]");
        assert!(matches!(parse_config(&bad), Err(CliError::Validation(_))));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }
}
