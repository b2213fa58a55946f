//! Subcommand implementations.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;

use atomfield::compare::{run_comparison, CompareOptions};
use atomfield::decoherence::{
    decoherence_time, detect_revivals, pointer_series, DecoherenceSeries,
};
use atomfield::model::{regime_report, RegimeReport, RegimeStatus};
use atomfield::pointer::{
    jcm_operators, scan_bloch_sphere, AtomFieldAnsatz, PropagatorAnsatz, ScanResult,
    TrivialAnsatz,
};
use atomfield::wavefunction::coherent_state;
use atomfield::{EnvWavefunction, ModelParams};

use crate::config::{AnsatzKind, ConfigError, RunConfig};
use crate::output::{write_csv, write_json};

pub const EXIT_OK: u8 = 0;
pub const EXIT_RUN: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_REGIME: u8 = 3;
pub const EXIT_THRESHOLD: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Io(std::io::Error),
    Run(atomfield::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "io error: {e}"),
            CliError::Run(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
            CliError::Run(_) => EXIT_RUN,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}
impl From<atomfield::Error> for CliError {
    fn from(e: atomfield::Error) -> Self {
        CliError::Run(e)
    }
}

pub struct CommandContext {
    pub config: RunConfig,
    pub out: Option<PathBuf>,
    pub require_regime: bool,
    pub self_test: bool,
}

#[derive(Serialize)]
struct Metadata<'a> {
    command: &'a str,
    tool_version: &'a str,
    config: &'a RunConfig,
    chi: f64,
    delta: f64,
    g_chi: f64,
    tau_dec: Option<f64>,
    regime: &'a RegimeReport,
}

impl CommandContext {
    fn out_dir(&self) -> Result<&Path, CliError> {
        let dir = self
            .out
            .as_deref()
            .ok_or_else(|| ConfigError::Field("--out DIR is required for this command".into()))?;
        std::fs::create_dir_all(dir)?;
        Ok(dir)
    }

    fn write_metadata(
        &self,
        dir: &Path,
        command: &str,
        params: &ModelParams,
        regime: &RegimeReport,
    ) -> Result<(), CliError> {
        let meta = Metadata {
            command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config: &self.config,
            chi: params.chi,
            delta: params.delta,
            g_chi: params.g_chi(),
            tau_dec: decoherence_time(params).ok(),
            regime,
        };
        write_json(&dir.join("metadata.json"), &meta)?;
        Ok(())
    }

    /// Apply the `--require-regime` gate; `Some(code)` means stop.
    fn regime_gate(&self, regime: &RegimeReport) -> Option<u8> {
        if self.require_regime && regime.status == RegimeStatus::Fail {
            eprintln!("regime FAIL: {}", regime.message);
            return Some(EXIT_REGIME);
        }
        None
    }
}

pub fn cmd_validate(ctx: &CommandContext) -> Result<u8, CliError> {
    let params = ctx.config.model_params()?;
    let regime = regime_report(&params, ctx.config.regime_threshold);
    println!(
        "regime check: r1 = omega0/omega = {:.6e}, r2 = (g*chi)^2/omega0^2 = {:.6e} -> {:?}",
        regime.r1, regime.r2, regime.status
    );
    println!("  {}", regime.message);
    if let Some(dir) = ctx.out.as_deref() {
        std::fs::create_dir_all(dir)?;
        write_json(&dir.join("regime.json"), &regime)?;
        ctx.write_metadata(dir, "validate", &params, &regime)?;
    }
    if let Some(code) = ctx.regime_gate(&regime) {
        return Ok(code);
    }
    Ok(EXIT_OK)
}

fn series_rows(series: &DecoherenceSeries) -> Vec<Vec<f64>> {
    series
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vec![
                t,
                series.rhos[i].rho_aa.re,
                series.rhos[i].rho_ab.re,
                series.rhos[i].rho_ab.im,
                series.blochs[i].r_x,
                series.blochs[i].r_y,
                series.blochs[i].r_z,
                series.decay[i],
            ]
        })
        .collect()
}

pub fn cmd_evolve(ctx: &CommandContext) -> Result<u8, CliError> {
    let params = ctx.config.model_params()?;
    let qubit = ctx.config.qubit()?;
    let times = ctx.config.times()?;
    let regime = regime_report(&params, ctx.config.regime_threshold);
    if let Some(code) = ctx.regime_gate(&regime) {
        return Ok(code);
    }
    let series = atomfield::decoherence::bloch_series(&params, &qubit, &times)?;
    let dir = ctx.out_dir()?;
    if ctx.config.wants_csv() {
        write_csv(
            &dir.join("series.csv"),
            &["t", "rho_aa", "rho_ab_re", "rho_ab_im", "r_x", "r_y", "r_z", "decay_factor"],
            &series_rows(&series),
        )?;
    }
    if ctx.config.wants_json() {
        write_json(&dir.join("series.json"), &series)?;
    }
    ctx.write_metadata(dir, "evolve", &params, &regime)?;
    println!("evolve: {} samples written to {}", times.len(), dir.display());
    Ok(EXIT_OK)
}

pub fn cmd_decohere(ctx: &CommandContext) -> Result<u8, CliError> {
    let params = ctx.config.model_params()?;
    let qubit = ctx.config.qubit()?;
    let times = ctx.config.times()?;
    let regime = regime_report(&params, ctx.config.regime_threshold);
    if let Some(code) = ctx.regime_gate(&regime) {
        return Ok(code);
    }
    // expand the energy-basis state over the initial pointer basis
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let alpha_p = (qubit.alpha + qubit.beta) * s;
    let beta_p = (qubit.alpha - qubit.beta) * s;
    let series = pointer_series(&params, alpha_p, beta_p, &times)?;
    let tau = decoherence_time(&params)?;
    let revivals = detect_revivals(&series.times, &series.coherence, tau);

    let dir = ctx.out_dir()?;
    if ctx.config.wants_csv() {
        let rows: Vec<Vec<f64>> = series
            .times
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                vec![
                    t,
                    series.rhos[i].rho_ab.re,
                    series.rhos[i].rho_ab.im,
                    series.coherence[i],
                    series.decay[i],
                ]
            })
            .collect();
        write_csv(
            &dir.join("decohere.csv"),
            &["t", "rho12_re", "rho12_im", "rho12_abs", "decay_factor"],
            &rows,
        )?;
    }
    if ctx.config.wants_json() {
        #[derive(Serialize)]
        struct DecohereJson<'a> {
            tau_dec: f64,
            series: &'a DecoherenceSeries,
            revivals: &'a [atomfield::decoherence::Revival],
        }
        write_json(
            &dir.join("decohere.json"),
            &DecohereJson { tau_dec: tau, series: &series, revivals: &revivals },
        )?;
    }
    ctx.write_metadata(dir, "decohere", &params, &regime)?;
    println!(
        "decohere: {} samples, {} revival(s) detected, written to {}",
        times.len(),
        revivals.len(),
        dir.display()
    );
    Ok(EXIT_OK)
}

fn default_scan_times(kind: AnsatzKind, params: &ModelParams, jcm_g: f64) -> Vec<f64> {
    match kind {
        AnsatzKind::AtomField => {
            let mut times: Vec<f64> = Vec::new();
            if let Ok(tau) = decoherence_time(params) {
                let lo = 1e-3 * tau;
                let ratio = (10.0 * tau / lo).ln();
                for k in 0..12 {
                    times.push(lo * (ratio * k as f64 / 11.0).exp());
                }
            }
            for k in [1.0, 2.0, 4.0, 8.0] {
                times.push(k * std::f64::consts::FRAC_PI_2 / params.omega0);
            }
            times.sort_by(f64::total_cmp);
            times
        }
        AnsatzKind::Jcm => vec![0.5 / jcm_g, 1.0 / jcm_g, 2.0 / jcm_g],
        AnsatzKind::Trivial => vec![1.0],
    }
}

pub fn cmd_pointer_scan(ctx: &CommandContext) -> Result<u8, CliError> {
    let params = ctx.config.model_params()?;
    let regime = regime_report(&params, ctx.config.regime_threshold);
    if let Some(code) = ctx.regime_gate(&regime) {
        return Ok(code);
    }
    let scan_cfg = ctx.config.scan.clone().unwrap_or(crate::config::ScanBlock {
        n_theta: None,
        n_phi: None,
        ansatz: None,
        times: None,
        jcm_g: None,
        jcm_nbar: None,
    });
    let kind = scan_cfg.ansatz.unwrap_or(AnsatzKind::AtomField);
    let n_theta = scan_cfg.n_theta.unwrap_or(17);
    let n_phi = scan_cfg.n_phi.unwrap_or(16);
    let jcm_g = scan_cfg.jcm_g.unwrap_or(1.0);
    let jcm_nbar = scan_cfg.jcm_nbar.unwrap_or(20.0);
    let times = match &scan_cfg.times {
        Some(t) if !t.is_empty() => t.clone(),
        _ => default_scan_times(kind, &params, jcm_g),
    };

    let grid = ctx.config.grid()?;
    let (ansatz, env): (Box<dyn PropagatorAnsatz>, EnvWavefunction) = match kind {
        AnsatzKind::AtomField => (
            Box::new(AtomFieldAnsatz { params }),
            EnvWavefunction::gaussian_package(params.alpha0, &grid)?,
        ),
        AnsatzKind::Jcm => {
            let cutoff = ctx.config.fock.as_ref().and_then(|f| f.cutoff).unwrap_or(128);
            (
                Box::new(jcm_operators(jcm_g, cutoff)?),
                coherent_state(C64::new(jcm_nbar.sqrt(), 0.0), cutoff)?,
            )
        }
        AnsatzKind::Trivial => (
            Box::new(TrivialAnsatz),
            EnvWavefunction::gaussian_package(params.alpha0, &grid)?,
        ),
    };

    let scan = scan_bloch_sphere(ansatz.as_ref(), &env, &times, n_theta, n_phi)?;

    let dir = ctx.out_dir()?;
    if ctx.config.wants_csv() {
        let rows: Vec<Vec<f64>> =
            scan.points.iter().map(|p| vec![p.theta, p.phi, p.defect]).collect();
        write_csv(&dir.join("scan.csv"), &["theta", "phi", "defect"], &rows)?;
    }
    if ctx.config.wants_json() {
        #[derive(Serialize)]
        struct MinimaJson<'a> {
            ansatz: &'a str,
            n_theta: usize,
            n_phi: usize,
            times: &'a [f64],
            minima: &'a [atomfield::pointer::ScanPoint],
        }
        write_json(
            &dir.join("minima.json"),
            &MinimaJson {
                ansatz: ansatz.label(),
                n_theta,
                n_phi,
                times: &times,
                minima: &scan.minima,
            },
        )?;
    }
    ctx.write_metadata(dir, "pointer-scan", &params, &regime)?;
    println!(
        "pointer-scan [{}]: {} grid points, {} pointer candidate(s)",
        ansatz.label(),
        scan.points.len(),
        scan.minima.len()
    );

    if ctx.self_test && !self_test_passes(kind, &scan) {
        eprintln!("self-test: expected built-in minima are absent");
        return Ok(EXIT_RUN);
    }
    Ok(EXIT_OK)
}

/// Built-in expectations per ansatz, used by `--self-test`.
fn self_test_passes(kind: AnsatzKind, scan: &ScanResult) -> bool {
    let half_pi = std::f64::consts::FRAC_PI_2;
    match kind {
        AnsatzKind::AtomField => {
            scan.minima.len() == 2
                && scan.minima.iter().all(|m| {
                    (m.theta - half_pi).abs() < 1e-9
                        && m.defect < 1e-10
                        && (m.phi.abs() < 1e-9 || (m.phi - std::f64::consts::PI).abs() < 1e-9)
                })
        }
        AnsatzKind::Jcm => scan.landscape_minima().iter().any(|m| m.defect < 0.05),
        AnsatzKind::Trivial => scan.points.iter().all(|p| p.defect < 1e-12),
    }
}

pub fn cmd_compare(ctx: &CommandContext) -> Result<u8, CliError> {
    let params = ctx.config.model_params()?;
    let qubit = ctx.config.qubit()?;
    let times = ctx.config.times()?;
    let regime = regime_report(&params, ctx.config.regime_threshold);
    if let Some(code) = ctx.regime_gate(&regime) {
        return Ok(code);
    }
    let mut opts = CompareOptions::new(times, ctx.config.grid()?);
    opts.ladder_start = ctx.config.ladder_start();
    opts.ladder_max = ctx.config.ladder_max();
    let outcome = run_comparison(&params, &qubit, &opts)?;

    let dir = ctx.out_dir()?;
    if ctx.config.wants_csv() {
        let rows: Vec<Vec<f64>> = outcome
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.t,
                    r.fidelity,
                    r.rho_ab_abs_closed,
                    r.rho_ab_abs_exact,
                    r.rho_ab_discrepancy,
                    r.r_z_closed,
                    r.r_z_exact,
                ]
            })
            .collect();
        write_csv(
            &dir.join("compare.csv"),
            &[
                "t",
                "fidelity",
                "rho_ab_abs_analytic",
                "rho_ab_abs_exact",
                "rho_ab_discrepancy",
                "r_z_analytic",
                "r_z_exact",
            ],
            &rows,
        )?;
    }
    let regime_violated = regime.status != RegimeStatus::Pass;
    let thresholds_met = outcome.summary.fidelity_ok && outcome.summary.rho_ab_ok;
    if ctx.config.wants_json() {
        #[derive(Serialize)]
        struct CompareJson<'a> {
            summary: &'a atomfield::compare::CompareSummary,
            convergence: &'a atomfield::oracle::ConvergenceReport,
            regime: &'a RegimeReport,
            regime_violated: bool,
            thresholds_met: bool,
        }
        write_json(
            &dir.join("summary.json"),
            &CompareJson {
                summary: &outcome.summary,
                convergence: &outcome.convergence,
                regime: &regime,
                regime_violated,
                thresholds_met,
            },
        )?;
    }
    ctx.write_metadata(dir, "compare", &params, &regime)?;
    println!(
        "compare: cutoff {}, min fidelity {:.6}, max |rho_ab| discrepancy {:.6}",
        outcome.summary.converged_cutoff,
        outcome.summary.min_fidelity,
        outcome.summary.max_rho_ab_discrepancy
    );
    if !thresholds_met {
        if regime_violated {
            // degradation outside the regime is the expected physics, not a bug
            println!("thresholds not met (regime violated; degradation expected)");
            Ok(EXIT_OK)
        } else {
            eprintln!("thresholds not met inside the validity regime");
            Ok(EXIT_THRESHOLD)
        }
    } else {
        println!("thresholds met");
        Ok(EXIT_OK)
    }
}
