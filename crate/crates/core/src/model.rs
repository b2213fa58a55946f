//! Model parameters, qubit amplitudes, density matrices and Bloch vectors.
//!
//! All types are immutable value objects after construction and are safe to
//! share between threads. Constructors validate every invariant; nothing is
//! silently clamped.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Physical constants of one run (atomic units, ħ = 1), plus the derived
/// quantities `χ = √(2mω)` and `Δ = ω₀ − ω`.
///
/// `χ` relates the field quadrature to the ladder operators through
/// `χ x̂ = a + a†`, so the coupling term `g χ σ_x x̂` equals `g σ_x (a + a†)`
/// in the Fock basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    /// Qubit level splitting ω₀ (> 0).
    pub omega0: f64,
    /// Field mode frequency ω (> 0).
    pub omega: f64,
    /// Effective atom-field coupling constant g.
    pub g: f64,
    /// Bosonic field particle mass m (> 0).
    pub m: f64,
    /// Gaussian packet width parameter α₀ (inverse length², > 0).
    pub alpha0: f64,
    /// Derived: χ = √(2mω).
    pub chi: f64,
    /// Derived: detuning Δ = ω₀ − ω.
    pub delta: f64,
}

impl ModelParams {
    /// Validate the five inputs and populate the derived `chi` and `delta`.
    ///
    /// ω = 0 or ω₀ = 0 are rejected outright: either one makes the effective
    /// coupling `gχ` vanish and the model physically meaningless. `g = 0` is
    /// accepted as data (it fails the regime check instead).
    pub fn new(omega0: f64, omega: f64, g: f64, m: f64, alpha0: f64) -> Result<Self> {
        for (name, v) in [
            ("omega0", omega0),
            ("omega", omega),
            ("g", g),
            ("m", m),
            ("alpha0", alpha0),
        ] {
            if !v.is_finite() {
                return Err(Error::NonPositiveParameter(format!("{name} = {v} is not finite")));
            }
        }
        for (name, v) in [("omega0", omega0), ("omega", omega), ("m", m), ("alpha0", alpha0)] {
            if v <= 0.0 {
                return Err(Error::NonPositiveParameter(format!("{name} = {v} must be > 0")));
            }
        }
        Ok(Self {
            omega0,
            omega,
            g,
            m,
            alpha0,
            chi: (2.0 * m * omega).sqrt(),
            delta: omega0 - omega,
        })
    }

    /// The product gχ, the strength of the coupling term in position form.
    pub fn g_chi(&self) -> f64 {
        self.g * self.chi
    }
}

/// Normalized complex amplitude pair (α, β) on the qubit basis {|a⟩, |b⟩}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitAmplitudes {
    pub alpha: C64,
    pub beta: C64,
}

/// Tolerance on |α|² + |β|² − 1 accepted by [`QubitAmplitudes::new`].
pub const QUBIT_NORM_TOL: f64 = 1e-12;

impl QubitAmplitudes {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidInput("qubit amplitudes must be finite".into()));
        }
        let norm_sq = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sq - 1.0).abs() > QUBIT_NORM_TOL {
            return Err(Error::NormalizationError(format!(
                "|alpha|^2 + |beta|^2 = {norm_sq} differs from 1 by more than {QUBIT_NORM_TOL:e}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// State at Bloch angles (θ, φ): α = cos(θ/2), β = e^{iφ} sin(θ/2).
    pub fn from_bloch_angles(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidInput("Bloch angles must be finite".into()));
        }
        let alpha = C64::new((theta / 2.0).cos(), 0.0);
        let beta = C64::from_polar((theta / 2.0).sin(), phi);
        Self::new(alpha, beta)
    }
}

/// 2×2 Hermitian unit-trace density matrix of the two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityMatrix2 {
    pub rho_aa: C64,
    pub rho_ab: C64,
    pub rho_ba: C64,
    pub rho_bb: C64,
}

/// Tolerance on Hermiticity, trace and eigenvalue bounds of a density matrix.
pub const DENSITY_TOL: f64 = 1e-10;

impl DensityMatrix2 {
    /// Construct and validate: Hermitian, unit trace, eigenvalues in
    /// [−tol, 1 + tol]. Entries are stored as given, never repaired.
    pub fn new(rho_aa: C64, rho_ab: C64, rho_ba: C64, rho_bb: C64) -> Result<Self> {
        let rho = Self { rho_aa, rho_ab, rho_ba, rho_bb };
        rho.validate()?;
        Ok(rho)
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.rho_aa, self.rho_ab, self.rho_ba, self.rho_bb] {
            if !v.is_finite() {
                return Err(Error::InvalidInput("density matrix entries must be finite".into()));
            }
        }
        let herm = (self.rho_ba - self.rho_ab.conj()).norm().max(self.rho_aa.im.abs()).max(self.rho_bb.im.abs());
        if herm > DENSITY_TOL {
            return Err(Error::NonHermitianInput(format!(
                "hermiticity defect {herm:.3e} exceeds {DENSITY_TOL:e}"
            )));
        }
        let trace = self.rho_aa.re + self.rho_bb.re;
        if (trace - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NormalizationError(format!(
                "trace {trace} differs from 1 by more than {DENSITY_TOL:e}"
            )));
        }
        let (lo, hi) = self.eigenvalues();
        if lo < -DENSITY_TOL || hi > 1.0 + DENSITY_TOL {
            return Err(Error::InvalidInput(format!(
                "eigenvalues ({lo:.3e}, {hi:.3e}) outside [0, 1] beyond tolerance"
            )));
        }
        Ok(())
    }

    /// Eigenvalues (λ₋, λ₊) of the Hermitian part.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let half_tr = 0.5 * (self.rho_aa.re + self.rho_bb.re);
        let dz = 0.5 * (self.rho_aa.re - self.rho_bb.re);
        let off = 0.5 * (self.rho_ab + self.rho_ba.conj()).norm();
        let r = (dz * dz + off * off).sqrt();
        (half_tr - r, half_tr + r)
    }

    /// Purity tr ρ².
    pub fn purity(&self) -> f64 {
        (self.rho_aa * self.rho_aa
            + self.rho_ab * self.rho_ba
            + self.rho_ba * self.rho_ab
            + self.rho_bb * self.rho_bb)
            .re
    }

    /// ρ = ½ (I + R·σ) rebuilt from a Bloch vector.
    pub fn from_bloch(r: &BlochVector) -> Self {
        Self {
            rho_aa: C64::new(0.5 * (1.0 + r.r_z), 0.0),
            rho_ab: C64::new(0.5 * r.r_x, -0.5 * r.r_y),
            rho_ba: C64::new(0.5 * r.r_x, 0.5 * r.r_y),
            rho_bb: C64::new(0.5 * (1.0 - r.r_z), 0.0),
        }
    }
}

/// Bloch vector (R_x, R_y, R_z) of a qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlochVector {
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
}

impl BlochVector {
    pub fn new(r_x: f64, r_y: f64, r_z: f64) -> Result<Self> {
        if ![r_x, r_y, r_z].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidInput("Bloch components must be finite".into()));
        }
        let norm_sq = r_x * r_x + r_y * r_y + r_z * r_z;
        if norm_sq > 1.0 + 1e-9 {
            return Err(Error::InvalidInput(format!(
                "Bloch vector norm^2 = {norm_sq} exceeds 1 beyond tolerance"
            )));
        }
        Ok(Self { r_x, r_y, r_z })
    }

    pub fn norm(&self) -> f64 {
        (self.r_x * self.r_x + self.r_y * self.r_y + self.r_z * self.r_z).sqrt()
    }
}

/// Imaginary residue allowed on Bloch components before erroring.
pub const BLOCH_IM_TOL: f64 = 1e-12;

/// Bloch components R_x = ρ_ab + ρ_ba, R_y = i(ρ_ab − ρ_ba),
/// R_z = ρ_aa − ρ_bb. Errors if the input is not Hermitian enough for the
/// components to be real within [`BLOCH_IM_TOL`]; the residue is discarded
/// only after that check.
pub fn bloch_from_density(rho: &DensityMatrix2) -> Result<BlochVector> {
    let rx = rho.rho_ab + rho.rho_ba;
    let ry = C64::i() * (rho.rho_ab - rho.rho_ba);
    let rz = rho.rho_aa - rho.rho_bb;
    for (name, v) in [("R_x", rx), ("R_y", ry), ("R_z", rz)] {
        if v.im.abs() > BLOCH_IM_TOL {
            return Err(Error::NonHermitianInput(format!(
                "{name} has imaginary residue {:.3e}",
                v.im
            )));
        }
    }
    BlochVector::new(rx.re, ry.re, rz.re)
}

/// Verdict of the regime check ω ≪ ω₀ ≪ gχ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RegimeStatus {
    Pass,
    Warn,
    Fail,
}

/// Ratios quantifying how deep a parameter point sits in the validity regime.
#[derive(Debug, Clone, Serialize)]
pub struct RegimeReport {
    /// r₁ = ω₀ / ω (environment self-energy ≪ system self-energy).
    pub r1: f64,
    /// r₂ = (gχ)² / ω₀² (system self-energy ≪ interaction).
    pub r2: f64,
    /// Threshold both ratios must reach for PASS (default 100).
    pub threshold: f64,
    pub status: RegimeStatus,
    pub message: String,
}

/// Default PASS threshold on both regime ratios.
pub const REGIME_THRESHOLD: f64 = 100.0;
/// Below this on either ratio (or at g = 0) the check FAILs outright.
pub const REGIME_FAIL_FLOOR: f64 = 10.0;

/// Evaluate the regime inequalities for the given parameters.
///
/// PASS when both ratios reach `threshold`, WARN in [10, threshold), FAIL
/// below 10 or when g = 0 (zero coupling leaves nothing to dominate the
/// system self-Hamiltonian).
pub fn regime_report(params: &ModelParams, threshold: Option<f64>) -> RegimeReport {
    let threshold = threshold.unwrap_or(REGIME_THRESHOLD);
    let r1 = params.omega0 / params.omega;
    let gchi = params.g_chi();
    let r2 = (gchi * gchi) / (params.omega0 * params.omega0);
    let (status, message) = if params.g == 0.0 {
        (RegimeStatus::Fail, "zero coupling: g = 0 makes gχ vanish".to_string())
    } else {
        let worst = r1.min(r2);
        if worst >= threshold {
            (RegimeStatus::Pass, format!("r1 = {r1:.3e}, r2 = {r2:.3e} both >= {threshold}"))
        } else if worst >= REGIME_FAIL_FLOOR {
            (
                RegimeStatus::Warn,
                format!("min(r1, r2) = {worst:.3e} in [{REGIME_FAIL_FLOOR}, {threshold})"),
            )
        } else {
            (RegimeStatus::Fail, format!("min(r1, r2) = {worst:.3e} below {REGIME_FAIL_FLOOR}"))
        }
    };
    RegimeReport { r1, r2, threshold, status, message }
}
