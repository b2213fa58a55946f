//! General pointer-state search: given any four environment operators
//! forming a propagator ansatz and an initial environment state, locate the
//! qubit initial states whose environment branches A(t), B(t) stay parallel
//! — those are the pointer states — and extract the scalar G(t) relating
//! them.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, QubitAmplitudes};
use crate::propagator::e_operators;
use crate::wavefunction::EnvWavefunction;

/// Which of the four environment operators of the ansatz to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EIndex {
    E1,
    E2,
    E3,
    E4,
}

/// A time-evolution-operator ansatz `U(t) = Σ_k Ê_k ⊗ |..⟩⟨..|`: four
/// appliers mapping an environment state at time t to a new (generally
/// unnormalized) environment vector. Appliers must be pure: the input is
/// never mutated. At t = 0, Ê₁ and Ê₄ must act as the identity and Ê₂, Ê₃
/// as the zero map.
pub trait PropagatorAnsatz {
    fn label(&self) -> &'static str;
    fn apply(&self, which: EIndex, env: &EnvWavefunction, t: f64) -> Result<EnvWavefunction>;
}

/// Closed-form atom-field operators, diagonal in position.
#[derive(Debug, Clone, Copy)]
pub struct AtomFieldAnsatz {
    pub params: ModelParams,
}

impl PropagatorAnsatz for AtomFieldAnsatz {
    fn label(&self) -> &'static str {
        "atom-field"
    }

    fn apply(&self, which: EIndex, env: &EnvWavefunction, t: f64) -> Result<EnvWavefunction> {
        let EnvWavefunction::Position { grid, values } = env else {
            return Err(Error::RepresentationMismatch(
                "atom-field ansatz acts on position-grid states".into(),
            ));
        };
        let ops = e_operators(&self.params);
        let xs = grid.xs();
        let out: Vec<C64> = values
            .iter()
            .zip(xs.iter())
            .map(|(v, &x)| {
                v * match which {
                    EIndex::E1 => ops.e1(t, x),
                    EIndex::E2 => ops.e2(t, x),
                    EIndex::E3 => ops.e3(t, x),
                    EIndex::E4 => ops.e4(t, x),
                }
            })
            .collect();
        Ok(EnvWavefunction::position_raw(grid, out))
    }
}

/// Resonant rotating-wave (Jaynes-Cummings) reference operators in the Fock
/// basis:
///
/// ```text
/// Ê₁ = cos(gt√(a†a+1))           Ê₂ = -i sin(gt√(a†a+1))/√(a†a+1) · a
/// Ê₃ = -i a† · sin(gt√(a†a+1))/√(a†a+1)     Ê₄ = cos(gt√(a†a))
/// ```
///
/// Unitary on the truncated space up to leakage at n = cutoff (the ladder
/// shift reads one coefficient beyond the cutoff, which is treated as
/// zero); keep the state supported well below the cutoff.
#[derive(Debug, Clone, Copy)]
pub struct JcmOperators {
    pub g: f64,
    pub cutoff: usize,
}

/// Build the Jaynes-Cummings reference ansatz.
pub fn jcm_operators(g: f64, cutoff: usize) -> Result<JcmOperators> {
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall("JCM cutoff must be >= 1".into()));
    }
    if !g.is_finite() {
        return Err(Error::InvalidInput("JCM coupling must be finite".into()));
    }
    Ok(JcmOperators { g, cutoff })
}

impl PropagatorAnsatz for JcmOperators {
    fn label(&self) -> &'static str {
        "jcm"
    }

    fn apply(&self, which: EIndex, env: &EnvWavefunction, t: f64) -> Result<EnvWavefunction> {
        let EnvWavefunction::Fock { values } = env else {
            return Err(Error::RepresentationMismatch(
                "JCM ansatz acts on Fock-basis states".into(),
            ));
        };
        if values.len() != self.cutoff + 1 {
            return Err(Error::DimensionMismatch {
                expected: self.cutoff + 1,
                got: values.len(),
            });
        }
        let gt = self.g * t;
        let n = values.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        match which {
            EIndex::E1 => {
                for k in 0..n {
                    out[k] = values[k] * (gt * ((k + 1) as f64).sqrt()).cos();
                }
            }
            EIndex::E2 => {
                // (E2 psi)_n = -i sin(gt sqrt(n+1)) psi_{n+1}
                for k in 0..n - 1 {
                    out[k] = -C64::i() * (gt * ((k + 1) as f64).sqrt()).sin() * values[k + 1];
                }
            }
            EIndex::E3 => {
                // (E3 psi)_n = -i sin(gt sqrt(n)) psi_{n-1}
                for k in 1..n {
                    out[k] = -C64::i() * (gt * (k as f64).sqrt()).sin() * values[k - 1];
                }
            }
            EIndex::E4 => {
                for k in 0..n {
                    out[k] = values[k] * (gt * (k as f64).sqrt()).cos();
                }
            }
        }
        Ok(EnvWavefunction::fock_raw(out))
    }
}

/// No interaction: Ê₁ = Ê₄ = identity, Ê₂ = Ê₃ = 0. Every state is a
/// pointer state.
#[derive(Debug, Clone, Copy)]
pub struct TrivialAnsatz;

impl PropagatorAnsatz for TrivialAnsatz {
    fn label(&self) -> &'static str {
        "trivial"
    }

    fn apply(&self, which: EIndex, env: &EnvWavefunction, _t: f64) -> Result<EnvWavefunction> {
        Ok(match which {
            EIndex::E1 | EIndex::E4 => env.clone(),
            EIndex::E2 | EIndex::E3 => env.scaled(C64::new(0.0, 0.0)),
        })
    }
}

/// Check the ansatz initial condition on a probe state: Ê₁, Ê₄ act as the
/// identity and Ê₂, Ê₃ as the zero map at t = 0.
pub fn verify_initial_condition(
    ansatz: &dyn PropagatorAnsatz,
    probe: &EnvWavefunction,
) -> Result<()> {
    for (which, identity) in [
        (EIndex::E1, true),
        (EIndex::E2, false),
        (EIndex::E3, false),
        (EIndex::E4, true),
    ] {
        let out = ansatz.apply(which, probe, 0.0)?;
        let defect = if identity {
            out.values()
                .iter()
                .zip(probe.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0_f64, f64::max)
        } else {
            out.values().iter().map(|a| a.norm()).fold(0.0_f64, f64::max)
        };
        if defect > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "{}: operator {which:?} violates the t = 0 condition by {defect:.3e}",
                ansatz.label()
            )));
        }
    }
    Ok(())
}

/// Environment branch vectors of the evolved composite state,
/// A = (αÊ₁ + βÊ₂)|Φ⟩ and B = (αÊ₃ + βÊ₄)|Φ⟩, both unnormalized; for a
/// unitary ansatz ‖A‖² + ‖B‖² = 1.
pub fn compute_ab(
    ansatz: &dyn PropagatorAnsatz,
    qubit: &QubitAmplitudes,
    env: &EnvWavefunction,
    t: f64,
) -> Result<(EnvWavefunction, EnvWavefunction)> {
    let e1 = ansatz.apply(EIndex::E1, env, t)?;
    let e2 = ansatz.apply(EIndex::E2, env, t)?;
    let e3 = ansatz.apply(EIndex::E3, env, t)?;
    let e4 = ansatz.apply(EIndex::E4, env, t)?;
    let combine = |u: &EnvWavefunction, v: &EnvWavefunction, cu: C64, cv: C64| -> EnvWavefunction {
        let values: Vec<C64> =
            u.values().iter().zip(v.values()).map(|(a, b)| cu * a + cv * b).collect();
        match u {
            EnvWavefunction::Position { grid, .. } => EnvWavefunction::position_raw(grid, values),
            EnvWavefunction::Fock { .. } => EnvWavefunction::fock_raw(values),
        }
    };
    let a = combine(&e1, &e2, qubit.alpha, qubit.beta);
    let b = combine(&e3, &e4, qubit.alpha, qubit.beta);
    Ok((a, b))
}

/// Branch norms below this count as exactly degenerate (trivially separable).
const DEGENERATE_NORM_SQ: f64 = 1e-30;

/// Parallelism defect `1 - |<B,A>|^2 / (‖A‖²‖B‖²)` in [0, 1]: zero exactly
/// when the branches are parallel (the composite state factorizes, Schmidt
/// rank 1), one when they are orthogonal. A vanishing branch counts as
/// pointer-compatible and returns 0.
pub fn parallelism_defect(a: &EnvWavefunction, b: &EnvWavefunction) -> Result<f64> {
    let na = a.norm_sq();
    let nb = b.norm_sq();
    if na < DEGENERATE_NORM_SQ || nb < DEGENERATE_NORM_SQ {
        return Ok(0.0);
    }
    let ov = b.inner(a)?;
    Ok((1.0 - ov.norm_sqr() / (na * nb)).clamp(0.0, 1.0))
}

/// Defect threshold under which G is accepted as a scalar sample.
pub const G_DEFECT_MAX: f64 = 1e-8;
/// Max-over-times defect below which a scan point is a pointer candidate.
pub const POINTER_CANDIDATE_DEFECT: f64 = 1e-6;

/// Scalar sample G(t) = ⟨B,A⟩/‖B‖² relating the branch vectors. Errors with
/// [`Error::NotParallel`] when the defect reaches [`G_DEFECT_MAX`]: G is
/// then an operator, not a scalar, and no pointer state exists here.
pub fn extract_g(a: &EnvWavefunction, b: &EnvWavefunction) -> Result<C64> {
    let defect = parallelism_defect(a, b)?;
    if defect >= G_DEFECT_MAX {
        return Err(Error::NotParallel { defect, threshold: G_DEFECT_MAX });
    }
    let nb = b.norm_sq();
    if nb < DEGENERATE_NORM_SQ {
        return Err(Error::NotParallel { defect: 1.0, threshold: G_DEFECT_MAX });
    }
    Ok(b.inner(a)? / nb)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScanPoint {
    pub theta: f64,
    pub phi: f64,
    pub defect: f64,
}

/// Max-over-times parallelism defect over a (θ, φ) grid of qubit initial
/// states, with the local minima below [`POINTER_CANDIDATE_DEFECT`] listed
/// as pointer candidates.
#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Row-major over θ (outer) and φ (inner).
    pub points: Vec<ScanPoint>,
    pub minima: Vec<ScanPoint>,
}

/// Scan the Bloch sphere of qubit initial states
/// |ψ(θ,φ)⟩ = cos(θ/2)|a⟩ + e^{iφ} sin(θ/2)|b⟩ on an inclusive θ grid over
/// [0, π] (`n_theta` points) and a periodic φ grid over [0, 2π)
/// (`n_phi` points), recording for each point the maximum parallelism
/// defect over `times`. Grid local minima (8-neighborhood, φ wrapping)
/// below [`POINTER_CANDIDATE_DEFECT`] are reported as pointer candidates.
pub fn scan_bloch_sphere(
    ansatz: &dyn PropagatorAnsatz,
    env: &EnvWavefunction,
    times: &[f64],
    n_theta: usize,
    n_phi: usize,
) -> Result<ScanResult> {
    if n_theta < 8 || n_phi < 8 {
        return Err(Error::InvalidInput("scan resolution must be >= 8 per angle".into()));
    }
    if times.is_empty() {
        return Err(Error::InvalidInput("scan needs at least one sample time".into()));
    }
    let mut points = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = std::f64::consts::PI * i as f64 / (n_theta - 1) as f64;
        for j in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
            let qubit = QubitAmplitudes::from_bloch_angles(theta, phi)?;
            let mut worst: f64 = 0.0;
            for &t in times {
                let (a, b) = compute_ab(ansatz, &qubit, env, t)?;
                worst = worst.max(parallelism_defect(&a, &b)?);
            }
            points.push(ScanPoint { theta, phi, defect: worst });
        }
    }

    let minima = grid_local_minima(&points, n_theta, n_phi, Some(POINTER_CANDIDATE_DEFECT));
    Ok(ScanResult { n_theta, n_phi, points, minima })
}

/// Grid local minima (8-neighborhood, φ wrapping), optionally restricted to
/// defects below a ceiling. Ties within rounding noise still count as
/// minima: the flat zero plateau of a non-entangling ansatz is all pointer
/// states.
fn grid_local_minima(
    points: &[ScanPoint],
    n_theta: usize,
    n_phi: usize,
    ceiling: Option<f64>,
) -> Vec<ScanPoint> {
    let at = |i: usize, j: usize| points[i * n_phi + j].defect;
    let tie = 1e-13;
    let mut minima = Vec::new();
    for i in 0..n_theta {
        for j in 0..n_phi {
            let d = at(i, j);
            if ceiling.is_some_and(|c| d >= c) {
                continue;
            }
            let mut is_min = true;
            'neighbors: for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ni = i as i64 + di;
                    if ni < 0 || ni >= n_theta as i64 {
                        continue;
                    }
                    let nj = (j as i64 + dj).rem_euclid(n_phi as i64);
                    if at(ni as usize, nj as usize) < d - tie {
                        is_min = false;
                        break 'neighbors;
                    }
                }
            }
            if is_min {
                minima.push(points[i * n_phi + j]);
            }
        }
    }
    minima
}

impl ScanResult {
    /// Local minima of the whole defect landscape, regardless of the
    /// pointer-candidate threshold: useful for ansatzes whose best states
    /// only approximately avoid entanglement.
    pub fn landscape_minima(&self) -> Vec<ScanPoint> {
        grid_local_minima(&self.points, self.n_theta, self.n_phi, None)
    }
}
