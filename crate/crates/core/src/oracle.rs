//! Exact propagation of the full Hamiltonian in a truncated Fock basis.
//!
//! `H = (ω₀/2)σ_z + ω a†a + g σ_x (a + a†)` is time independent, so one
//! dense Hermitian diagonalization gives `e^{-iHt}` exactly (to machine
//! precision) for every `t`; no integrator error enters the oracle. States
//! are composite Fock vectors ordered as |a,0⟩..|a,N⟩, |b,0⟩..|b,N⟩.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DensityMatrix2, ModelParams, QubitAmplitudes};
use crate::wavefunction::{gaussian_to_fock, EnvWavefunction};

/// Dense Hermitian matrix of the full Hamiltonian at Fock cutoff N,
/// dimension 2(N+1).
#[derive(Debug, Clone)]
pub struct TruncatedHamiltonian {
    pub cutoff: usize,
    pub matrix: Array2<C64>,
    pub params: ModelParams,
}

/// Build the truncated Hamiltonian. The σ_z term contributes ±ω₀/2 on the
/// diagonal, the field term ωn, and the coupling connects |a,n⟩ ↔ |b,n±1⟩
/// with elements g√n and g√(n+1) (since gχx̂ = g(a + a†)).
pub fn build_hamiltonian(params: &ModelParams, cutoff: usize) -> Result<TruncatedHamiltonian> {
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall("Hamiltonian cutoff must be >= 1".into()));
    }
    let n = cutoff + 1;
    let dim = 2 * n;
    let mut h = Array2::<C64>::zeros((dim, dim));
    let half_w0 = 0.5 * params.omega0;
    for k in 0..n {
        let field = params.omega * k as f64;
        h[(k, k)] = C64::new(half_w0 + field, 0.0);
        h[(n + k, n + k)] = C64::new(-half_w0 + field, 0.0);
    }
    for k in 0..n - 1 {
        let el = C64::new(params.g * ((k + 1) as f64).sqrt(), 0.0);
        // <a,k|H|b,k+1> = g sqrt(k+1) and Hermitian partners
        h[(k, n + k + 1)] = el;
        h[(n + k + 1, k)] = el;
        h[(n + k, k + 1)] = el;
        h[(k + 1, n + k)] = el;
    }
    Ok(TruncatedHamiltonian { cutoff, matrix: h, params: *params })
}

/// Eigendecomposition of a [`TruncatedHamiltonian`], reusable for exact
/// propagation to any time.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: Array2<C64>,
    pub cutoff: usize,
    pub params: ModelParams,
}

impl SpectralPropagator {
    pub fn new(h: &TruncatedHamiltonian) -> Result<Self> {
        let (eigenvalues, eigenvectors) = h.matrix.eigh(UPLO::Lower)?;
        Ok(Self { eigenvalues, eigenvectors, cutoff: h.cutoff, params: h.params })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Expansion coefficients V†ψ of a state over the eigenbasis.
    fn eigen_coeffs(&self, psi: &Array1<C64>) -> Array1<C64> {
        let dim = self.dim();
        let mut c = Array1::<C64>::zeros(dim);
        for k in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..dim {
                acc += self.eigenvectors[(i, k)].conj() * psi[i];
            }
            c[k] = acc;
        }
        c
    }

    /// ψ(t) = V e^{-iλt} V† ψ₀ (Schrödinger picture).
    pub fn propagate(&self, psi0: &Array1<C64>, t: f64) -> Result<Array1<C64>> {
        Ok(self.propagate_series(psi0, &[t])?.pop().expect("one requested time"))
    }

    /// Propagate to several times, paying the V†ψ₀ projection once.
    pub fn propagate_series(&self, psi0: &Array1<C64>, times: &[f64]) -> Result<Vec<Array1<C64>>> {
        if psi0.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: psi0.len() });
        }
        let c = self.eigen_coeffs(psi0);
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let d: Array1<C64> = self
                .eigenvalues
                .iter()
                .zip(c.iter())
                .map(|(&e, &ck)| ck * C64::from_polar(1.0, -e * t))
                .collect();
            out.push(self.eigenvectors.dot(&d));
        }
        Ok(out)
    }
}

/// Apply e^{+iH₀t} with H₀ = (ω₀/2)σ_z + ω a†a: component (s, n) picks up
/// the phase e^{i(±ω₀/2 + ωn)t}. Maps a Schrödinger-picture state to the
/// interaction picture.
pub fn to_interaction_picture(psi: &Array1<C64>, params: &ModelParams, t: f64) -> Array1<C64> {
    let n = psi.len() / 2;
    let mut out = Array1::<C64>::zeros(psi.len());
    let half_w0 = 0.5 * params.omega0;
    for k in 0..n {
        let field = params.omega * k as f64 * t;
        out[k] = psi[k] * C64::from_polar(1.0, half_w0 * t + field);
        out[n + k] = psi[n + k] * C64::from_polar(1.0, -half_w0 * t + field);
    }
    out
}

/// Reduced density matrix of the qubit by tracing over the Fock index:
/// ρ_aa = Σ_n |c_{a,n}|², ρ_ab = Σ_n c_{a,n} c*_{b,n}, and partners.
pub fn reduced_density_exact(psi: &Array1<C64>) -> Result<DensityMatrix2> {
    let n = psi.len() / 2;
    if psi.len() % 2 != 0 || n == 0 {
        return Err(Error::DimensionMismatch { expected: 2, got: psi.len() });
    }
    let mut aa = 0.0;
    let mut bb = 0.0;
    let mut ab = C64::new(0.0, 0.0);
    for k in 0..n {
        aa += psi[k].norm_sqr();
        bb += psi[n + k].norm_sqr();
        ab += psi[k] * psi[n + k].conj();
    }
    DensityMatrix2::new(C64::new(aa, 0.0), ab, ab.conj(), C64::new(bb, 0.0))
}

/// Composite Fock vector for the product state (α|a⟩ + β|b⟩) ⊗ env.
pub fn product_state(qubit: &QubitAmplitudes, env: &EnvWavefunction) -> Result<Array1<C64>> {
    let EnvWavefunction::Fock { values } = env else {
        return Err(Error::RepresentationMismatch("product_state needs a Fock-basis state".into()));
    };
    let n = values.len();
    let mut psi = Array1::<C64>::zeros(2 * n);
    for (k, &c) in values.iter().enumerate() {
        psi[k] = qubit.alpha * c;
        psi[n + k] = qubit.beta * c;
    }
    Ok(psi)
}

/// Diagonal of the conserved parity operator σ_z ⊗ (-1)^{a†a} in the
/// composite ordering: the σ_z term flips sign under σ_x conjugation, so
/// the parity that commutes with H pairs σ_z with the photon-number parity.
pub fn parity_diagonal(cutoff: usize) -> Array1<f64> {
    let n = cutoff + 1;
    let mut d = Array1::<f64>::zeros(2 * n);
    for k in 0..n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        d[k] = sign;
        d[n + k] = -sign;
    }
    d
}

/// Expectation of the parity operator on a composite Fock vector.
pub fn parity_expectation(psi: &Array1<C64>) -> f64 {
    let n = psi.len() / 2;
    let d = parity_diagonal(n - 1);
    psi.iter().zip(d.iter()).map(|(c, &s)| s * c.norm_sqr()).sum()
}

/// Energy expectation ⟨ψ|H|ψ⟩ (real for Hermitian H).
pub fn energy_expectation(h: &TruncatedHamiltonian, psi: &Array1<C64>) -> Result<f64> {
    if psi.len() != h.matrix.nrows() {
        return Err(Error::DimensionMismatch { expected: h.matrix.nrows(), got: psi.len() });
    }
    let hpsi = h.matrix.dot(psi);
    let e: C64 = psi.iter().zip(hpsi.iter()).map(|(a, b)| a.conj() * b).sum();
    Ok(e.re)
}

/// Convergence tolerance: consecutive cutoffs must agree on ρ_ab to this
/// absolute level before a cutoff is declared converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Fixed probe qubit used by the convergence report: a generic state with
/// no special symmetry, so every matrix element is exercised.
pub fn convergence_probe_qubit() -> QubitAmplitudes {
    QubitAmplitudes::from_bloch_angles(std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_8)
        .expect("probe angles are valid")
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergencePair {
    pub lower: usize,
    pub upper: usize,
    pub max_drift: f64,
}

/// Observable drift between consecutive Fock cutoffs. `converged_cutoff` is
/// the smaller member of the first pair whose ρ_ab series agree within
/// [`CONVERGENCE_TOL`] at every sampled time.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub tolerance: f64,
    pub pairs: Vec<ConvergencePair>,
    pub converged_cutoff: Option<usize>,
}

/// Propagate a Gaussian environment (width `env_alpha0`) with a fixed probe
/// qubit at each cutoff in `cutoffs` (strictly increasing) and track the
/// drift of ρ_ab over sampled times in (0, t_max]. Stops at the first
/// converged pair; errors with [`Error::NotConverged`] when the largest
/// cutoff is still drifting (a single-entry list is not converged by
/// definition).
pub fn convergence_report(
    params: &ModelParams,
    env_alpha0: f64,
    t_max: f64,
    cutoffs: &[usize],
) -> Result<ConvergenceReport> {
    if cutoffs.is_empty() {
        return Err(Error::InvalidInput("cutoff list is empty".into()));
    }
    if !cutoffs.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::InvalidInput("cutoff list must be strictly increasing".into()));
    }
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(Error::InvalidInput(format!("t_max = {t_max} must be > 0")));
    }
    let qubit = convergence_probe_qubit();
    let times: Vec<f64> = (1..=8).map(|j| t_max * j as f64 / 8.0).collect();

    let rho_series = |cutoff: usize| -> Result<Vec<C64>> {
        let env = gaussian_to_fock(env_alpha0, params, cutoff)?;
        let h = build_hamiltonian(params, cutoff)?;
        let prop = SpectralPropagator::new(&h)?;
        let psi0 = product_state(&qubit, &env)?;
        let states = prop.propagate_series(&psi0, &times)?;
        Ok(states.iter().map(|psi| reduced_density_exact(psi).map(|r| r.rho_ab)).collect::<Result<_>>()?)
    };

    let mut pairs = Vec::new();
    let mut prev = rho_series(cutoffs[0])?;
    for w in cutoffs.windows(2) {
        let next = rho_series(w[1])?;
        let max_drift = prev
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        pairs.push(ConvergencePair { lower: w[0], upper: w[1], max_drift });
        if max_drift < CONVERGENCE_TOL {
            return Ok(ConvergenceReport {
                tolerance: CONVERGENCE_TOL,
                pairs,
                converged_cutoff: Some(w[0]),
            });
        }
        prev = next;
    }
    let table = pairs
        .iter()
        .map(|p| format!("({}, {}): {:.3e}", p.lower, p.upper, p.max_drift))
        .collect::<Vec<_>>()
        .join(", ");
    Err(Error::NotConverged(if pairs.is_empty() {
        format!("single cutoff {} cannot demonstrate convergence", cutoffs[0])
    } else {
        format!("largest cutoff still drifting; pair drifts: {table}")
    }))
}

/// Pure-state fidelity |⟨u, v⟩|² / (‖u‖²‖v‖²).
pub fn state_fidelity(u: &Array1<C64>, v: &Array1<C64>) -> f64 {
    let uu: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    let vv: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if uu <= 0.0 || vv <= 0.0 {
        return 0.0;
    }
    let uv: C64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
    uv.norm_sqr() / (uu * vv)
}
