//! Side-by-side comparison of the closed-form evolution against the exact
//! truncated-Fock oracle.
//!
//! The oracle state is mapped to the interaction picture before comparison
//! (the closed forms produce interaction-picture states); the analytic grid
//! state is projected onto the oscillator basis so both live in one Hilbert
//! space. |ρ_ab| and R_z are picture-insensitive and are compared raw as a
//! cross-check.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::decoherence::reduced_density_closed;
use crate::error::{Error, Result};
use crate::model::{ModelParams, QubitAmplitudes};
use crate::oracle::{
    build_hamiltonian, convergence_report, product_state, reduced_density_exact, state_fidelity,
    to_interaction_picture, ConvergenceReport, SpectralPropagator,
};
use crate::propagator::evolve_composite;
use crate::wavefunction::{
    gaussian_to_fock, project_onto_oscillator, EnvWavefunction, PositionGrid,
};

/// Composite-state fidelity floor the comparison is tested against.
pub const FIDELITY_THRESHOLD: f64 = 0.99;
/// Absolute tolerance on the |ρ_ab| discrepancy.
pub const RHO_AB_TOLERANCE: f64 = 0.01;
/// Default start of the doubling cutoff ladder.
pub const DEFAULT_LADDER_START: usize = 128;
/// Default cap on the cutoff ladder.
pub const DEFAULT_LADDER_MAX: usize = 4096;

#[derive(Debug, Clone)]
pub struct CompareOptions {
    /// Sorted sample times (the last entry drives the convergence report).
    pub times: Vec<f64>,
    /// Grid carrying the analytic state; must resolve both the closed-form
    /// phases and the retained oscillator eigenfunctions.
    pub grid: PositionGrid,
    pub ladder_start: usize,
    pub ladder_max: usize,
}

impl CompareOptions {
    pub fn new(times: Vec<f64>, grid: PositionGrid) -> Self {
        Self { times, grid, ladder_start: DEFAULT_LADDER_START, ladder_max: DEFAULT_LADDER_MAX }
    }
}

/// One sampled time of the comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompareRow {
    pub t: f64,
    /// |⟨ψ_analytic|ψ_oracle⟩|² in the interaction picture.
    pub fidelity: f64,
    pub rho_ab_abs_closed: f64,
    pub rho_ab_abs_exact: f64,
    /// | |ρ_ab|_closed − |ρ_ab|_exact |.
    pub rho_ab_discrepancy: f64,
    pub r_z_closed: f64,
    pub r_z_exact: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareSummary {
    pub converged_cutoff: usize,
    pub min_fidelity: f64,
    pub max_rho_ab_discrepancy: f64,
    pub fidelity_threshold: f64,
    pub rho_ab_tolerance: f64,
    pub fidelity_ok: bool,
    pub rho_ab_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonOutcome {
    pub rows: Vec<CompareRow>,
    pub summary: CompareSummary,
    pub convergence: ConvergenceReport,
}

/// Doubling ladder `[start, 2 start, ...]` capped at `max`.
pub fn cutoff_ladder(start: usize, max: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut c = start.max(1);
    while c <= max {
        out.push(c);
        c *= 2;
    }
    out
}

/// Run the full comparison: convergence report first (mandatory), then the
/// exact propagation at the converged cutoff against the closed-form
/// evolution at every sample time.
pub fn run_comparison(
    params: &ModelParams,
    qubit: &QubitAmplitudes,
    opts: &CompareOptions,
) -> Result<ComparisonOutcome> {
    if opts.times.is_empty() {
        return Err(Error::InvalidInput("no sample times".into()));
    }
    if !opts.times.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidInput("times must be sorted ascending".into()));
    }
    let t_max = *opts.times.last().expect("nonempty");
    let ladder = cutoff_ladder(opts.ladder_start, opts.ladder_max);
    let convergence = convergence_report(params, params.alpha0, t_max, &ladder)?;
    let cutoff = convergence.converged_cutoff.expect("Ok report carries a cutoff");

    let h = build_hamiltonian(params, cutoff)?;
    let prop = SpectralPropagator::new(&h)?;
    let env_fock = gaussian_to_fock(params.alpha0, params, cutoff)?;
    let psi0 = product_state(qubit, &env_fock)?;
    let exact_states = prop.propagate_series(&psi0, &opts.times)?;

    let env_grid = EnvWavefunction::gaussian_package(params.alpha0, &opts.grid)?;
    let xs = opts.grid.xs();
    let weights = opts.grid.weights();

    let mut rows = Vec::with_capacity(opts.times.len());
    for (&t, psi_s) in opts.times.iter().zip(exact_states.iter()) {
        let psi_int = to_interaction_picture(psi_s, params, t);
        let rho_exact = reduced_density_exact(&psi_int)?;
        // picture-insensitive raw cross-check
        let rho_raw = reduced_density_exact(psi_s)?;
        debug_assert!((rho_exact.rho_ab.norm() - rho_raw.rho_ab.norm()).abs() < 1e-10);

        let analytic = evolve_composite(params, qubit, &env_grid, t)?;
        let ca = project_onto_oscillator(
            analytic.psi_a.values(),
            &weights,
            &xs,
            params.m,
            params.omega,
            cutoff,
        );
        let cb = project_onto_oscillator(
            analytic.psi_b.values(),
            &weights,
            &xs,
            params.m,
            params.omega,
            cutoff,
        );
        let mut analytic_fock = Array1::<C64>::zeros(2 * (cutoff + 1));
        for k in 0..=cutoff {
            analytic_fock[k] = ca[k];
            analytic_fock[cutoff + 1 + k] = cb[k];
        }
        let fidelity = state_fidelity(&analytic_fock, &psi_int);

        let rho_closed = reduced_density_closed(params, qubit, t);
        let rho_ab_abs_closed = rho_closed.rho_ab.norm();
        let rho_ab_abs_exact = rho_exact.rho_ab.norm();
        rows.push(CompareRow {
            t,
            fidelity,
            rho_ab_abs_closed,
            rho_ab_abs_exact,
            rho_ab_discrepancy: (rho_ab_abs_closed - rho_ab_abs_exact).abs(),
            r_z_closed: (rho_closed.rho_aa - rho_closed.rho_bb).re,
            r_z_exact: (rho_exact.rho_aa - rho_exact.rho_bb).re,
        });
    }

    let min_fidelity = rows.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    let max_rho_ab_discrepancy =
        rows.iter().map(|r| r.rho_ab_discrepancy).fold(0.0_f64, f64::max);
    let summary = CompareSummary {
        converged_cutoff: cutoff,
        min_fidelity,
        max_rho_ab_discrepancy,
        fidelity_threshold: FIDELITY_THRESHOLD,
        rho_ab_tolerance: RHO_AB_TOLERANCE,
        fidelity_ok: min_fidelity >= FIDELITY_THRESHOLD,
        rho_ab_ok: max_rho_ab_discrepancy <= RHO_AB_TOLERANCE,
    };
    Ok(ComparisonOutcome { rows, summary, convergence })
}
