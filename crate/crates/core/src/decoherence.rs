//! Closed-form decoherence observables: reduced density matrices, Bloch
//! trajectories, the decoherence time, pointer-basis coherences and their
//! revival.
//!
//! The Gaussian suppression factor `κ(t) = e^{-(gχt)²/(2α₀)}` controls
//! every decay law here; it equals the overlap of the two environment
//! pointer states.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{bloch_from_density, BlochVector, DensityMatrix2, ModelParams, QubitAmplitudes};
use crate::propagator::env_overlap;
use crate::wavefunction::CompositeState;

/// Reduced density matrix of the qubit at time t, closed form:
///
/// ```text
/// ρ_aa = [1 + (|α|² - |β|²) κ] / 2
/// ρ_ab = [(αβ* + βα*) + (αβ* - βα*) κ] e^{iω₀t} / 2
/// ```
pub fn reduced_density_closed(
    params: &ModelParams,
    qubit: &QubitAmplitudes,
    t: f64,
) -> DensityMatrix2 {
    let kappa = env_overlap(params, t);
    let (alpha, beta) = (qubit.alpha, qubit.beta);
    let s = alpha * beta.conj() + beta * alpha.conj();
    let d = alpha * beta.conj() - beta * alpha.conj();
    let z = alpha.norm_sqr() - beta.norm_sqr();
    let rho_aa = C64::new(0.5 * (1.0 + z * kappa), 0.0);
    let rho_ab = 0.5 * (s + d * kappa) * C64::from_polar(1.0, params.omega0 * t);
    DensityMatrix2::new(rho_aa, rho_ab, rho_ab.conj(), C64::new(1.0, 0.0) - rho_aa)
        .expect("closed form yields a valid density matrix")
}

/// Reduced density matrix by quadrature over the environment coordinate:
/// ρ_aa = ∫|ψ_a|², ρ_ab = ∫ψ_a ψ_b*, and partners. Position states only.
pub fn reduced_density_from_composite(state: &CompositeState) -> Result<DensityMatrix2> {
    if !state.psi_a.is_position() {
        return Err(Error::RepresentationMismatch(
            "quadrature trace needs position-representation branches".into(),
        ));
    }
    let rho_aa = state.psi_a.norm_sq();
    let rho_bb = state.psi_b.norm_sq();
    // <psi_b, psi_a> integrates psi_a psi_b*
    let rho_ab = state.psi_b.inner(&state.psi_a)?;
    DensityMatrix2::new(
        C64::new(rho_aa, 0.0),
        rho_ab,
        rho_ab.conj(),
        C64::new(rho_bb, 0.0),
    )
}

/// Which basis a [`DecoherenceSeries`] is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesBasis {
    /// The qubit energy basis {|a⟩, |b⟩}.
    Atom,
    /// The initial pointer basis |±(t₀)⟩.
    Pointer,
}

/// Time series of decoherence observables: density matrix, Bloch vector,
/// coherence magnitude and the Gaussian decay factor per sample.
#[derive(Debug, Clone, Serialize)]
pub struct DecoherenceSeries {
    pub basis: SeriesBasis,
    pub times: Vec<f64>,
    pub rhos: Vec<DensityMatrix2>,
    pub blochs: Vec<BlochVector>,
    /// |ρ_ab| (atom basis) or |ρ₁₂| (pointer basis) per sample.
    pub coherence: Vec<f64>,
    /// κ(t) per sample; monotone nonincreasing.
    pub decay: Vec<f64>,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidInput("empty time list".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidInput("times must be finite and >= 0".into()));
    }
    if !times.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidInput("times must be sorted ascending".into()));
    }
    Ok(())
}

/// Closed-form Bloch trajectory in the {|a⟩, |b⟩} basis:
///
/// ```text
/// R_x = S cos(ω₀t) + iD sin(ω₀t) κ
/// R_y = -S sin(ω₀t) + iD cos(ω₀t) κ
/// R_z = (|α|² - |β|²) κ
/// ```
///
/// with S = αβ* + βα* and D = αβ* − βα* (iD real). As κ → 0 the vector
/// settles onto the equatorial circle of radius |S|.
pub fn bloch_series(
    params: &ModelParams,
    qubit: &QubitAmplitudes,
    times: &[f64],
) -> Result<DecoherenceSeries> {
    check_times(times)?;
    let mut rhos = Vec::with_capacity(times.len());
    let mut blochs = Vec::with_capacity(times.len());
    let mut coherence = Vec::with_capacity(times.len());
    let mut decay = Vec::with_capacity(times.len());
    for &t in times {
        let rho = reduced_density_closed(params, qubit, t);
        blochs.push(bloch_from_density(&rho)?);
        coherence.push(rho.rho_ab.norm());
        decay.push(env_overlap(params, t));
        rhos.push(rho);
    }
    Ok(DecoherenceSeries { basis: SeriesBasis::Atom, times: times.to_vec(), rhos, blochs, coherence, decay })
}

/// Decoherence time `τ = √(α₀/(mω)) / |g|`: the time at which the decay
/// exponent (gχt)²/(2α₀) reaches 1, i.e. `κ(τ) = e^{-1}`.
pub fn decoherence_time(params: &ModelParams) -> Result<f64> {
    if params.g == 0.0 {
        return Err(Error::ZeroCoupling(
            "decoherence time is infinite at zero coupling".into(),
        ));
    }
    Ok((params.alpha0 / (params.m * params.omega)).sqrt() / params.g.abs())
}

/// Off-diagonal element ρ₁₂(t) in the initial pointer basis |±(t₀)⟩, for a
/// state α'|+(t₀)⟩ + β'|−(t₀)⟩ — the all-time closed form:
///
/// ```text
/// ρ₁₂ = (|β'|² - |α'|²)(i/2) sin(ω₀t)
///     + α'β'* cos²(ω₀t/2) κ + β'α'* sin²(ω₀t/2) κ
/// ```
pub fn rho12_pointer_basis(params: &ModelParams, alpha_p: C64, beta_p: C64, t: f64) -> C64 {
    let kappa = env_overlap(params, t);
    let half = 0.5 * params.omega0 * t;
    let (sh, ch) = half.sin_cos();
    let diag = (beta_p.norm_sqr() - alpha_p.norm_sqr()) * C64::new(0.0, 0.5) * (params.omega0 * t).sin();
    diag + alpha_p * beta_p.conj() * ch * ch * kappa + beta_p * alpha_p.conj() * sh * sh * kappa
}

/// Short-time form of ρ₁₂ (valid for t ≪ 1/ω₀): `α'β'* κ(t)` — pure
/// Gaussian decay of the initial pointer-basis coherence.
pub fn rho12_short_time(params: &ModelParams, alpha_p: C64, beta_p: C64, t: f64) -> C64 {
    alpha_p * beta_p.conj() * env_overlap(params, t)
}

/// Full density matrix in the {|a⟩, |b⟩} basis assembled from the pointer
/// states and their environment overlap:
///
/// ρ = |α'|²|+(t)⟩⟨+(t)| + |β'|²|−(t)⟩⟨−(t)|
///   + α'β'* κ |+(t)⟩⟨−(t)| + β'α'* κ |−(t)⟩⟨+(t)|.
fn density_from_pointer_states(
    params: &ModelParams,
    alpha_p: C64,
    beta_p: C64,
    t: f64,
) -> [[C64; 2]; 2] {
    use crate::propagator::{pointer_states_system, PointerSign};
    let kappa = C64::new(env_overlap(params, t), 0.0);
    let plus = pointer_states_system(params, t, PointerSign::Plus);
    let minus = pointer_states_system(params, t, PointerSign::Minus);
    let pv = [plus.alpha, plus.beta];
    let mv = [minus.alpha, minus.beta];
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    let w_pp = C64::new(alpha_p.norm_sqr(), 0.0);
    let w_mm = C64::new(beta_p.norm_sqr(), 0.0);
    let w_pm = alpha_p * beta_p.conj() * kappa;
    let w_mp = beta_p * alpha_p.conj() * kappa;
    for i in 0..2 {
        for j in 0..2 {
            rho[i][j] = w_pp * pv[i] * pv[j].conj()
                + w_mm * mv[i] * mv[j].conj()
                + w_pm * pv[i] * mv[j].conj()
                + w_mp * mv[i] * pv[j].conj();
        }
    }
    rho
}

/// The {|a⟩, |b⟩}-basis density matrix assembled from the pointer-state
/// route (pointer states of the system plus the environment overlap),
/// rather than from the closed-form integrals. The two derivations agree
/// entrywise; keeping both routes makes that an executable check.
pub fn density_from_pointer_route(
    params: &ModelParams,
    alpha_p: C64,
    beta_p: C64,
    t: f64,
) -> DensityMatrix2 {
    let rho = density_from_pointer_states(params, alpha_p, beta_p, t);
    DensityMatrix2::new(rho[0][0], rho[0][1], rho[1][0], rho[1][1])
        .expect("pointer-route assembly preserves density-matrix structure")
}

/// ρ₁₂ assembled independently from the pointer states of the system and
/// the environment overlap, then projected onto the initial pointer basis
/// |±(t₀)⟩ = (|a⟩ ± |b⟩)/√2. Two derivations of one quantity: this route
/// and [`rho12_pointer_basis`] agree to machine precision, and both match
/// the closed-form reduced density matrix after the basis map
/// (α, β) = ((α'+β')/√2, (α'−β')/√2).
pub fn rho12_pointer_from_states(
    params: &ModelParams,
    alpha_p: C64,
    beta_p: C64,
    t: f64,
) -> C64 {
    let rho = density_from_pointer_states(params, alpha_p, beta_p, t);
    // <+0| rho |-0> with |±0> = (|a> ± |b>)/sqrt(2)
    0.5 * (rho[0][0] - rho[0][1] + rho[1][0] - rho[1][1])
}

/// Full pointer-basis density matrix (entries ⟨s(t₀)|ρ|s'(t₀)⟩).
pub fn pointer_basis_density(
    params: &ModelParams,
    alpha_p: C64,
    beta_p: C64,
    t: f64,
) -> DensityMatrix2 {
    let rho = density_from_pointer_states(params, alpha_p, beta_p, t);
    let half = C64::new(0.5, 0.0);
    let p11 = half * (rho[0][0] + rho[0][1] + rho[1][0] + rho[1][1]);
    let p12 = half * (rho[0][0] - rho[0][1] + rho[1][0] - rho[1][1]);
    let p21 = half * (rho[0][0] + rho[0][1] - rho[1][0] - rho[1][1]);
    let p22 = half * (rho[0][0] - rho[0][1] - rho[1][0] + rho[1][1]);
    DensityMatrix2::new(p11, p12, p21, p22)
        .expect("pointer-basis transform preserves density-matrix structure")
}

/// Decoherence series in the initial pointer basis: ρ₁₂ per the all-time
/// closed form, plus the full transformed density matrix and Bloch vector.
pub fn pointer_series(
    params: &ModelParams,
    alpha_p: C64,
    beta_p: C64,
    times: &[f64],
) -> Result<DecoherenceSeries> {
    check_times(times)?;
    let norm_sq = alpha_p.norm_sqr() + beta_p.norm_sqr();
    if (norm_sq - 1.0).abs() > crate::model::QUBIT_NORM_TOL {
        return Err(Error::NormalizationError(format!(
            "|alpha'|^2 + |beta'|^2 = {norm_sq} must be 1"
        )));
    }
    let mut rhos = Vec::with_capacity(times.len());
    let mut blochs = Vec::with_capacity(times.len());
    let mut coherence = Vec::with_capacity(times.len());
    let mut decay = Vec::with_capacity(times.len());
    for &t in times {
        let rho = pointer_basis_density(params, alpha_p, beta_p, t);
        blochs.push(bloch_from_density(&rho)?);
        coherence.push(rho.rho_ab.norm());
        decay.push(env_overlap(params, t));
        rhos.push(rho);
    }
    Ok(DecoherenceSeries {
        basis: SeriesBasis::Pointer,
        times: times.to_vec(),
        rhos,
        blochs,
        coherence,
        decay,
    })
}

/// A detected coherence revival.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Revival {
    pub t: f64,
    pub magnitude: f64,
}

/// Detect revivals in a sampled |ρ₁₂| series: local maxima occurring after
/// the coherence first drops below 10% of its initial value (or after
/// `tau_dec` when the initial coherence vanishes).
pub fn detect_revivals(times: &[f64], coherence: &[f64], tau_dec: f64) -> Vec<Revival> {
    if times.len() != coherence.len() || times.len() < 3 {
        return Vec::new();
    }
    let c0 = coherence[0];
    let start = if c0 > 0.0 {
        match coherence.iter().position(|&c| c < 0.1 * c0) {
            Some(i) => i,
            None => return Vec::new(),
        }
    } else {
        match times.iter().position(|&t| t > tau_dec) {
            Some(i) => i,
            None => return Vec::new(),
        }
    };
    let mut out = Vec::new();
    for i in start.max(1)..times.len() - 1 {
        if coherence[i] > coherence[i - 1] && coherence[i] > coherence[i + 1] {
            out.push(Revival { t: times[i], magnitude: coherence[i] });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::{evolve_composite, evolve_pointer_decomposition};
    use crate::wavefunction::{EnvWavefunction, PositionGrid};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn regime_params() -> ModelParams {
        ModelParams::new(1.0, 1e-3, 5.0, 2e5, 100.0).unwrap()
    }

    fn random_qubit(rng: &mut ChaCha8Rng) -> QubitAmplitudes {
        let theta = rng.random_range(0.0..std::f64::consts::PI);
        let phi = rng.random_range(0.0..2.0 * std::f64::consts::PI);
        QubitAmplitudes::from_bloch_angles(theta, phi).unwrap()
    }

    #[test]
    fn closed_form_limits() {
        let p = regime_params();
        let q = QubitAmplitudes::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let rho0 = reduced_density_closed(&p, &q, 0.0);
        assert_abs_diff_eq!(rho0.rho_aa.re, 1.0, epsilon = 1e-15);
        assert!(rho0.rho_ab.norm() < 1e-15);

        // large times: maximally mixed for the excited state
        let rho_inf = reduced_density_closed(&p, &q, 50.0);
        assert_abs_diff_eq!(rho_inf.rho_aa.re, 0.5, epsilon = 1e-12);
        assert!(rho_inf.rho_ab.norm() < 1e-12);
    }

    #[test]
    fn pointer_state_coherence_is_constant_half() {
        let p = regime_params();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = QubitAmplitudes::new(C64::new(s, 0.0), C64::new(s, 0.0)).unwrap();
        for &t in &[0.0, 0.1, 0.5, 3.0] {
            let rho = reduced_density_closed(&p, &q, t);
            assert_abs_diff_eq!(rho.rho_aa.re, 0.5, epsilon = 1e-14);
            assert_abs_diff_eq!(rho.rho_ab.norm(), 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn quadrature_trace_matches_closed_form() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let tau = decoherence_time(&p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..8 {
            let q = random_qubit(&mut rng);
            for &t in &[0.3 * tau, tau, 2.5 * tau] {
                let state = evolve_composite(&p, &q, &env, t).unwrap();
                let rho_q = reduced_density_from_composite(&state).unwrap();
                let rho_c = reduced_density_closed(&p, &q, t);
                assert!((rho_q.rho_aa - rho_c.rho_aa).norm() < 1e-8);
                assert!((rho_q.rho_ab - rho_c.rho_ab).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn product_state_is_pure() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let q = QubitAmplitudes::from_bloch_angles(0.8, 1.1).unwrap();
        let state = evolve_composite(&p, &q, &env, 0.0).unwrap();
        let rho = reduced_density_from_composite(&state).unwrap();
        let (lo, hi) = rho.eigenvalues();
        assert!(lo.abs() < 1e-12);
        assert_abs_diff_eq!(hi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pointer_decomposition_gives_same_density() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..6 {
            let q = random_qubit(&mut rng);
            let alpha_p = (q.alpha + q.beta) * s;
            let beta_p = (q.alpha - q.beta) * s;
            let t = rng.random_range(0.0..0.5);
            let via_pointer =
                evolve_pointer_decomposition(&p, alpha_p, beta_p, &grid, t).unwrap();
            let rho1 = reduced_density_from_composite(&via_pointer).unwrap();
            let rho2 = reduced_density_closed(&p, &q, t);
            assert!((rho1.rho_ab - rho2.rho_ab).norm() < 1e-8);
        }
    }

    #[test]
    fn bloch_trajectories() {
        let p = regime_params();
        // excited state: R_z follows the decay factor, equator empty
        let q = QubitAmplitudes::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let times: Vec<f64> = (0..=20).map(|k| 0.02 * k as f64).collect();
        let series = bloch_series(&p, &q, &times).unwrap();
        for (i, b) in series.blochs.iter().enumerate() {
            assert_abs_diff_eq!(b.r_z, series.decay[i], epsilon = 1e-12);
            assert!(b.r_x.abs() < 1e-14 && b.r_y.abs() < 1e-14);
        }
        assert_abs_diff_eq!(series.blochs[0].norm(), 1.0, epsilon = 1e-12);

        // pointer state: equatorial rotation at omega0
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = QubitAmplitudes::new(C64::new(s, 0.0), C64::new(s, 0.0)).unwrap();
        let series = bloch_series(&p, &q, &times).unwrap();
        for (i, b) in series.blochs.iter().enumerate() {
            let t = times[i];
            assert_abs_diff_eq!(b.r_x, (p.omega0 * t).cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(b.r_y, -(p.omega0 * t).sin(), epsilon = 1e-12);
            assert!(b.r_z.abs() < 1e-14);
        }
    }

    #[test]
    fn bloch_asymptotics_once_decay_is_gone() {
        let p = regime_params();
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        // decay factor < 1e-6 for t beyond this
        let t_star = (2.0 * (1e6_f64).ln() * p.alpha0).sqrt() / p.g_chi();
        for _ in 0..6 {
            let q = random_qubit(&mut rng);
            let s = (q.alpha * q.beta.conj() + q.beta * q.alpha.conj()).re;
            for &t in &[1.1 * t_star, 2.0 * t_star, 5.0 * t_star] {
                let rho = reduced_density_closed(&p, &q, t);
                let b = bloch_from_density(&rho).unwrap();
                assert!(b.r_z.abs() < 1e-6);
                assert_abs_diff_eq!(b.r_x * b.r_x + b.r_y * b.r_y, s * s, epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn decoherence_time_scalings() {
        let p = ModelParams::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(decoherence_time(&p).unwrap(), 1.0, epsilon = 1e-15);

        // doubling the mass shrinks tau by sqrt(2); quadrupling halves it
        let p4 = ModelParams::new(1.0, 1.0, 1.0, 4.0, 1.0).unwrap();
        assert_abs_diff_eq!(decoherence_time(&p4).unwrap(), 0.5, epsilon = 1e-15);

        // quadrupling alpha0 doubles tau
        let pa = ModelParams::new(1.0, 1.0, 1.0, 1.0, 4.0).unwrap();
        assert_abs_diff_eq!(decoherence_time(&pa).unwrap(), 2.0, epsilon = 1e-15);

        // overlap at tau is e^{-1}
        let p = regime_params();
        let tau = decoherence_time(&p).unwrap();
        assert_abs_diff_eq!(env_overlap(&p, tau), (-1.0_f64).exp(), epsilon = 1e-14);

        let p0 = ModelParams::new(1.0, 1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(decoherence_time(&p0), Err(Error::ZeroCoupling(_))));
    }

    #[test]
    fn rho12_closed_form_cases() {
        let p = regime_params();
        // alpha' = 1: purely the oscillating diagonal-imbalance term
        for &t in &[0.0, 0.3, 1.2, 4.0] {
            let r = rho12_pointer_basis(&p, C64::new(1.0, 0.0), C64::new(0.0, 0.0), t);
            let expected = C64::new(0.0, -0.5 * (p.omega0 * t).sin());
            assert!((r - expected).norm() < 1e-14);
        }
        // real equal-weight superposition: pure Gaussian decay
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for &t in &[0.0, 0.1, 0.4] {
            let r = rho12_pointer_basis(&p, C64::new(s, 0.0), C64::new(s, 0.0), t);
            assert!((r - C64::new(0.5 * env_overlap(&p, t), 0.0)).norm() < 1e-14);
        }
        // t = 0 is the bare coherence
        let a = C64::new(0.6, 0.2);
        let b = C64::new(0.2, -0.741619848709566);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        let r0 = rho12_pointer_basis(&p, a, b, 0.0);
        assert!((r0 - a * b.conj()).norm() < 1e-14);
    }

    #[test]
    fn short_time_form_agrees_quadratically() {
        // equal-weight pointer decomposition: the linear sin(ω₀t) term
        // carries the weight imbalance and drops out, leaving O((ω₀t)²)
        let p = regime_params();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for phi in [0.0, 0.9, 2.2] {
            let a = C64::new(s, 0.0);
            let b = C64::from_polar(s, phi);
            for &t in &[1e-3, 3e-3, 1e-2] {
                let full = rho12_pointer_basis(&p, a, b, t);
                let short = rho12_short_time(&p, a, b, t);
                let err = (full - short).norm();
                assert!(err < 1.0 * (p.omega0 * t).powi(2), "error {err} at t = {t}");
            }
        }
    }

    #[test]
    fn short_time_decay_is_monotone() {
        let p = regime_params();
        let a = C64::new(0.8, 0.1);
        let b = C64::new(0.3, -0.5099019513592785);
        let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / n, b / n);
        let mut last = f64::INFINITY;
        for k in 0..=50 {
            let t = 0.1 / p.omega0 * k as f64 / 50.0;
            let v = rho12_short_time(&p, a, b, t).norm();
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn two_pointer_routes_agree_and_match_the_energy_basis() {
        let p = regime_params();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..100 {
            let q = random_qubit(&mut rng);
            let alpha_p = (q.alpha + q.beta) * s;
            let beta_p = (q.alpha - q.beta) * s;
            let t = rng.random_range(0.0..3.0);
            let direct = rho12_pointer_basis(&p, alpha_p, beta_p, t);
            let assembled = rho12_pointer_from_states(&p, alpha_p, beta_p, t);
            assert!((direct - assembled).norm() < 1e-12);

            // and the full pointer-basis matrix is the exact basis change of
            // the closed-form energy-basis matrix
            let rho_ab = reduced_density_closed(&p, &q, t);
            let rho_pb = pointer_basis_density(&p, alpha_p, beta_p, t);
            let half = C64::new(0.5, 0.0);
            let expected_12 = half
                * (rho_ab.rho_aa - rho_ab.rho_ab + rho_ab.rho_ba - rho_ab.rho_bb);
            assert!((rho_pb.rho_ab - expected_12).norm() < 1e-10);
            let expected_11 = half
                * (rho_ab.rho_aa + rho_ab.rho_ab + rho_ab.rho_ba + rho_ab.rho_bb);
            assert!((rho_pb.rho_aa - expected_11).norm() < 1e-10);
        }
    }

    #[test]
    fn pointer_states_keep_quiet_then_revive() {
        // omega0 tau_dec << 1: |rho12| stays ~0 through the decoherence
        // window, then revives to 1/2 at omega0 t = pi/2
        let p = ModelParams::new(1.0, 1e-3, 1e4, 500.0, 0.5).unwrap();
        let tau = decoherence_time(&p).unwrap();
        assert!(p.omega0 * tau < 1e-3);
        let a = C64::new(1.0, 0.0);
        let b = C64::new(0.0, 0.0);
        for k in 1..=10 {
            let t = tau * k as f64 / 2.0;
            assert!(rho12_pointer_basis(&p, a, b, t).norm() < 1e-2);
        }
        let t_rev = std::f64::consts::FRAC_PI_2 / p.omega0;
        assert_abs_diff_eq!(rho12_pointer_basis(&p, a, b, t_rev).norm(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn purity_closed_form_for_excited_state() {
        let p = regime_params();
        let q = QubitAmplitudes::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        for &t in &[0.0, 0.05, 0.15, 0.4] {
            let rho = reduced_density_closed(&p, &q, t);
            let kappa = env_overlap(&p, t);
            assert_abs_diff_eq!(rho.purity(), 0.5 * (1.0 + kappa * kappa), epsilon = 1e-12);
        }
    }

    #[test]
    fn revival_detection() {
        let p = ModelParams::new(1.0, 1e-3, 1e4, 500.0, 0.5).unwrap();
        let tau = decoherence_time(&p).unwrap();
        let times: Vec<f64> = (0..=2000).map(|k| 4.0 * k as f64 / 2000.0).collect();
        let coh: Vec<f64> = times
            .iter()
            .map(|&t| rho12_pointer_basis(&p, C64::new(1.0, 0.0), C64::new(0.0, 0.0), t).norm())
            .collect();
        let revivals = detect_revivals(&times, &coh, tau);
        assert!(!revivals.is_empty());
        let first = revivals[0];
        assert_abs_diff_eq!(first.t, std::f64::consts::FRAC_PI_2, epsilon = 0.01);
        assert_abs_diff_eq!(first.magnitude, 0.5, epsilon = 1e-4);
    }

    #[test]
    fn series_validation() {
        let p = regime_params();
        let q = QubitAmplitudes::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(bloch_series(&p, &q, &[]).is_err());
        assert!(bloch_series(&p, &q, &[0.3, 0.1]).is_err());
        assert!(bloch_series(&p, &q, &[f64::NAN]).is_err());
    }
}
