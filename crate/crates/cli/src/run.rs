//! Experiment orchestration: one function per experiment kind, each writing
//! its files through [`Outputs`].

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use sdqsim_core::dynamics::{contrast_map, contrast_time_map, evolve, TwoQubitState};
use sdqsim_core::ode::OdeOptions;
use sdqsim_core::spectroscopy::{
    classical_resonance, classical_spectrum, kinetic_inductance, quantum_spectrum, resonance_split, Direction,
    PumpState, SpectrumTrace,
};
use sdqsim_core::squid_diode::{characterize, find_phi_min, taylor_coefficients, PhiMin};
use sdqsim_core::tomography::{density_matrix_report, linear_reconstruct, measure_expectations};
use sdqsim_core::{DiodeCharacterization64, Warning};
use serde::Serialize;

use crate::config::{Experiment, RunConfig, SpectrumModel};
use crate::error::CliError;
use crate::output::{sha256_hex, write_manifest, Outputs, RunManifest};

/// Deduplicated, order-preserving warning log with per-source context.
#[derive(Default)]
struct WarningLog(Vec<String>);

impl WarningLog {
    fn extend<'a>(&mut self, context: &str, ws: impl IntoIterator<Item = &'a Warning>) {
        for w in ws {
            let line = if context.is_empty() {
                w.to_string()
            } else {
                format!("{context}: {w}")
            };
            if !self.0.contains(&line) {
                self.0.push(line);
            }
        }
    }
}

/// Runs `cfg`, writing into `out_dir` (or `cfg.output_dir`); the manifest is
/// written after every other file.
pub fn run_experiment(cfg: &RunConfig, out_dir: Option<&Path>) -> Result<RunManifest, CliError> {
    cfg.validate()?;
    let started = now();
    let dir = out_dir.unwrap_or(&cfg.output_dir);
    let mut out = Outputs::new(dir, cfg.experiment.file_prefix())?;
    let mut log = WarningLog::default();
    match cfg.experiment {
        Experiment::DiodeChar => diode_char(cfg, &mut out, &mut log)?,
        Experiment::Spectroscopy => spectroscopy(cfg, &mut out, &mut log)?,
        Experiment::Dynamics => dynamics(cfg, &mut out, &mut log)?,
        Experiment::ContrastMap => contrast(cfg, &mut out, &mut log)?,
        Experiment::Tomography => tomography(cfg, &mut out, &mut log)?,
    }
    let dir = out.dir().to_path_buf();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: cfg.experiment.name().to_string(),
        seed: cfg.seed,
        config_sha256: sha256_hex(cfg.to_toml().as_bytes()),
        started,
        finished: now(),
        files: out.into_files(),
        warnings: log.0,
    };
    write_manifest(&dir, &manifest)?;
    Ok(manifest)
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[derive(Serialize)]
struct DiodeSummary {
    tau1: f64,
    tau2: f64,
    phi_b: f64,
    temperature: f64,
    ic_plus: f64,
    ic_minus: f64,
    eta: f64,
    phi_min: f64,
    /// `c_1..c_4` over `Δ`.
    c_over_delta: [f64; 4],
}

fn diode_char(cfg: &RunConfig, out: &mut Outputs, log: &mut WarningLog) -> Result<(), CliError> {
    let squid = cfg.squid_config()?;
    let delta = squid.j1.delta;
    let run = |phi_b: f64, tau1: f64| -> Result<DiodeCharacterization64, CliError> {
        let mut s = squid.with_phi_b(phi_b);
        s.j1.tau = tau1;
        characterize(&s).map_err(CliError::numerical(format!("diode-char phi_b={phi_b} tau1={tau1}")))
    };

    let c = run(squid.phi_b, squid.j1.tau)?;
    log.extend("", &c.warnings);
    let summary = DiodeSummary {
        tau1: squid.j1.tau,
        tau2: squid.j2.tau,
        phi_b: squid.phi_b,
        temperature: squid.temperature,
        ic_plus: c.ic_plus / delta,
        ic_minus: c.ic_minus / delta,
        eta: c.eta,
        phi_min: c.phi_min,
        c_over_delta: c.c.map(|x| x / delta),
    };
    out.json("summary", &summary)?;

    let Some(phi_grid) = cfg.grids.phi_b.as_ref().map(|g| g.values()) else {
        return Ok(());
    };
    let sweep: Vec<DiodeCharacterization64> = phi_grid
        .par_iter()
        .map(|&b| run(b, squid.j1.tau))
        .collect::<Result<_, _>>()?;
    let rows: Vec<Vec<f64>> = phi_grid
        .iter()
        .zip(&sweep)
        .map(|(&b, c)| {
            vec![
                b,
                c.phi_min,
                c.ic_plus / delta,
                c.ic_minus / delta,
                c.eta,
                c.c[1] / delta,
                c.c[2] / delta,
                c.c[3] / delta,
            ]
        })
        .collect();
    for c in &sweep {
        log.extend("phi_b sweep", &c.warnings);
    }
    out.csv(
        "sweep",
        &["phi_b", "phi_min", "ic_plus", "ic_minus", "eta", "c2_over_delta", "c3_over_delta", "c4_over_delta"],
        &rows,
    )?;

    if let Some(tau_grid) = cfg.grids.tau1.as_ref().map(|g| g.values()) {
        let cells: Vec<(usize, usize)> = (0..tau_grid.len())
            .flat_map(|i| (0..phi_grid.len()).map(move |j| (i, j)))
            .collect();
        let res: Vec<PhiMin<f64>> = cells
            .par_iter()
            .map(|&(i, j)| {
                let mut s = squid.with_phi_b(phi_grid[j]);
                s.j1.tau = tau_grid[i];
                find_phi_min(&s)
            })
            .collect();
        let map: Vec<Vec<f64>> = cells
            .chunks(phi_grid.len())
            .zip(res.chunks(phi_grid.len()))
            .map(|(ij, r)| {
                ij.iter()
                    .zip(r)
                    .map(|(&(i, j), m)| {
                        let mut s = squid.with_phi_b(phi_grid[j]);
                        s.j1.tau = tau_grid[i];
                        taylor_coefficients(&s, m.phi)[2] / delta
                    })
                    .collect()
            })
            .collect();
        // one line for the whole map; per-cell ties are expected at phi_b = ±π
        let ties: Vec<&Warning> = res.iter().filter_map(|m| m.warning.as_ref()).collect();
        if let Some(first) = ties.first() {
            log.0.push(format!("c3 map: {} of {} cells have degenerate minima; first: {first}", ties.len(), res.len()));
        }
        out.csv_matrix("c3_map", "tau1\\phi_b", &tau_grid, &phi_grid, &map)?;
    }
    Ok(())
}

fn trace_rows(t: &SpectrumTrace<f64>, omega_r: f64) -> Vec<Vec<f64>> {
    (0..t.omega.len())
        .map(|k| {
            vec![
                t.omega[k] / omega_r,
                t.s_forward[k].re,
                t.s_forward[k].im,
                t.s_backward[k].re,
                t.s_backward[k].im,
                t.r_ratio[k],
            ]
        })
        .collect()
}

const SPECTRUM_COLUMNS: [&str; 6] = ["omega_over_omega_r", "re_s21", "im_s21", "re_s12", "im_s12", "r_ratio"];

#[derive(Serialize)]
struct PumpReport {
    re_alpha: f64,
    im_alpha: f64,
    n: f64,
    roots: Vec<f64>,
    bistable: bool,
}

impl From<&PumpState<f64>> for PumpReport {
    fn from(p: &PumpState<f64>) -> Self {
        PumpReport {
            re_alpha: p.alpha.re,
            im_alpha: p.alpha.im,
            n: p.n,
            roots: p.roots.clone(),
            bistable: p.bistable,
        }
    }
}

#[derive(Serialize)]
struct QuantumReport {
    model: &'static str,
    delta_omega_over_omega_r: f64,
    delta_omega_mhz: f64,
    forward_peak_over_omega_r: f64,
    backward_peak_over_omega_r: f64,
    pump_forward: PumpReport,
    pump_backward: PumpReport,
}

#[derive(Serialize)]
struct ClassicalReport {
    model: &'static str,
    l_forward: f64,
    l_backward: f64,
    resonance_forward_over_omega_r: f64,
    resonance_backward_over_omega_r: f64,
    /// Small-current estimate `½ω_r[(I_a/I_c⁻)² − (I_a/I_c⁺)²]`.
    split_estimate_mhz: f64,
}

fn spectroscopy(cfg: &RunConfig, out: &mut Outputs, log: &mut WarningLog) -> Result<(), CliError> {
    let circuit = cfg.circuit_config()?;
    let drive = cfg.drive_config()?;
    let model = cfg.circuit.as_ref().map(|c| c.model).unwrap_or_default();
    let mhz = cfg.omega_r_ghz * 1e3 / circuit.omega_r;

    if matches!(model, SpectrumModel::Quantum | SpectrumModel::Both) {
        let q = quantum_spectrum(&circuit, &drive).map_err(CliError::numerical("spectroscopy (quantum)"))?;
        log.extend("quantum", &q.warnings);
        out.csv("quantum_spectrum", &SPECTRUM_COLUMNS, &trace_rows(&q.trace, circuit.omega_r))?;
        let peak = |s: &[sdqsim_core::C64]| {
            sdqsim_core::spectroscopy::peak_index(s).map_or(f64::NAN, |i| q.trace.omega[i] / circuit.omega_r)
        };
        out.json(
            "quantum_pump",
            &QuantumReport {
                model: "linearized pump-probe",
                delta_omega_over_omega_r: circuit.split() / circuit.omega_r,
                delta_omega_mhz: circuit.split() * mhz,
                forward_peak_over_omega_r: peak(&q.trace.s_forward),
                backward_peak_over_omega_r: peak(&q.trace.s_backward),
                pump_forward: (&q.pump_forward).into(),
                pump_backward: (&q.pump_backward).into(),
            },
        )?;
    }
    if matches!(model, SpectrumModel::Classical | SpectrumModel::Both) {
        let t = classical_spectrum(&circuit, &drive.probe_grid).map_err(CliError::numerical("spectroscopy (classical)"))?;
        out.csv("classical_spectrum", &SPECTRUM_COLUMNS, &trace_rows(&t, circuit.omega_r))?;
        out.json(
            "classical_resonance",
            &ClassicalReport {
                model: "lumped two-port",
                l_forward: kinetic_inductance(&circuit, Direction::Forward),
                l_backward: kinetic_inductance(&circuit, Direction::Backward),
                resonance_forward_over_omega_r: classical_resonance(&circuit, Direction::Forward) / circuit.omega_r,
                resonance_backward_over_omega_r: classical_resonance(&circuit, Direction::Backward) / circuit.omega_r,
                split_estimate_mhz: resonance_split(&circuit) * mhz,
            },
        )?;
    }
    Ok(())
}

fn phase_list(cfg: &RunConfig) -> Vec<f64> {
    cfg.grids
        .phi
        .as_ref()
        .map(|g| g.values())
        .unwrap_or_else(|| vec![cfg.qubits.as_ref().expect("validated").phi])
}

#[derive(Serialize)]
struct TrajectorySummary {
    phi: f64,
    initial: &'static str,
    peak_concurrence: f64,
    t_peak: f64,
    min_eigenvalue: f64,
}

fn dynamics(cfg: &RunConfig, out: &mut Outputs, log: &mut WarningLog) -> Result<(), CliError> {
    let base = cfg.qubit_params()?;
    let times = cfg.grids.time.as_ref().expect("validated").values();
    let phis = phase_list(cfg);
    let initial = cfg.qubits.as_ref().expect("validated").initial;
    let mut summary = Vec::new();
    for (label, k) in initial.states() {
        let runs = phis
            .par_iter()
            .map(|&phi| {
                evolve(&base.with_phase(phi), &TwoQubitState::basis(k), &times, &OdeOptions::default())
                    .map_err(CliError::numerical(format!("dynamics phi={phi} initial={label}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut rows = Vec::with_capacity(phis.len() * times.len());
        for (&phi, r) in phis.iter().zip(&runs) {
            log.extend(&format!("phi={phi} initial={label}"), &r.warnings);
            for i in 0..times.len() {
                rows.push(vec![phi, r.times[i], r.n1[i], r.n2[i], r.concurrence[i]]);
            }
            let (ip, cp) = r
                .concurrence
                .iter()
                .enumerate()
                .fold((0, f64::MIN), |a, (i, &c)| if c > a.1 { (i, c) } else { a });
            summary.push(TrajectorySummary {
                phi,
                initial: label,
                peak_concurrence: cp,
                t_peak: r.times[ip],
                min_eigenvalue: r.min_eigenvalue,
            });
        }
        out.csv(
            &format!("populations_{label}"),
            &["phi", "time", "n1", "n2", "concurrence"],
            &rows,
        )?;
    }
    out.json("summary", &summary)?;
    Ok(())
}

fn contrast(cfg: &RunConfig, out: &mut Outputs, log: &mut WarningLog) -> Result<(), CliError> {
    let base = cfg.qubit_params()?;
    let phis = phase_list(cfg);
    if let Some(gamma) = cfg.grids.gamma.as_ref().map(|g| g.values()) {
        let t = cfg.t_eval();
        let m = contrast_map(&base, &phis, &gamma, t).map_err(CliError::numerical("contrast-map (gamma, phi)"))?;
        log.extend("gamma map", &m.warnings);
        out.csv_matrix("delta_c", "gamma\\phi", &m.gamma, &m.phi, &m.delta_c)?;
    }
    if let Some(times) = cfg.grids.time.as_ref().map(|g| g.values()) {
        let (m, w) = contrast_time_map(&base, &phis, &times).map_err(CliError::numerical("contrast-map (phi, time)"))?;
        log.extend("time map", &w);
        out.csv_matrix("delta_c_time", "phi\\time", &phis, &times, &m)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TomographyEntry {
    phi: f64,
    gamma_collective: f64,
    initial: &'static str,
    t_eval: f64,
    shots: u64,
    seed: u64,
    re: [[f64; 4]; 4],
    im: [[f64; 4]; 4],
    fidelities: BTreeMap<&'static str, f64>,
    physical: bool,
}

fn tomography(cfg: &RunConfig, out: &mut Outputs, log: &mut WarningLog) -> Result<(), CliError> {
    let base = cfg.qubit_params()?;
    let phis = phase_list(cfg);
    let gammas = cfg
        .grids
        .gamma
        .as_ref()
        .map(|g| g.values())
        .unwrap_or_else(|| vec![base.gamma_collective]);
    let shots = cfg.tomography.as_ref().map_or(0, |t| t.shots);
    let t = cfg.t_eval();
    let initial = cfg.qubits.as_ref().expect("validated").initial;

    for (label, k) in initial.states() {
        let cells: Vec<(f64, f64)> = gammas.iter().flat_map(|&g| phis.iter().map(move |&p| (g, p))).collect();
        let entries = cells
            .par_iter()
            .enumerate()
            .map(|(idx, &(gamma, phi))| {
                let mut p = base.with_phase(phi);
                p.gamma_collective = gamma;
                let ctx = format!("tomography phi={phi} gamma={gamma} initial={label}");
                let r = evolve(&p, &TwoQubitState::basis(k), &[t], &OdeOptions::default())
                    .map_err(CliError::numerical(ctx.clone()))?;
                let seed = cfg.seed.wrapping_add(idx as u64);
                let rec = measure_expectations(&r.states[0].rho, shots, seed);
                let recon = linear_reconstruct(&rec).map_err(CliError::numerical(ctx.clone()))?;
                let report = density_matrix_report(&recon);
                let entry = TomographyEntry {
                    phi,
                    gamma_collective: gamma,
                    initial: label,
                    t_eval: t,
                    shots,
                    seed,
                    re: report.re,
                    im: report.im,
                    fidelities: recon.fidelities.iter().map(|(b, f)| (b.label(), *f)).collect(),
                    physical: recon.physical,
                };
                Ok((entry, ctx, r.warnings))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut rows = Vec::new();
        let mut states = Vec::new();
        for (e, ctx, w) in entries {
            log.extend(&ctx, &w);
            rows.push(vec![
                e.phi,
                e.gamma_collective,
                e.fidelities["psi_plus"],
                e.fidelities["psi_minus"],
                e.fidelities["phi_plus"],
                e.fidelities["phi_minus"],
                if e.physical { 1.0 } else { 0.0 },
            ]);
            states.push(e);
        }
        out.csv(
            &format!("fidelities_{label}"),
            &["phi", "gamma", "psi_plus", "psi_minus", "phi_plus", "phi_minus", "physical"],
            &rows,
        )?;
        out.json(&format!("states_{label}"), &states)?;
    }
    Ok(())
}
