//! Closed-form interaction-picture time evolution in the strong-coupling,
//! far-off-resonance regime ω ≪ ω₀ ≪ gχ.
//!
//! The evolution operator is expanded over the qubit basis operators as
//! `U(t) = Ê₁|a⟩⟨a| + Ê₂|a⟩⟨b| + Ê₃|b⟩⟨a| + Ê₄|b⟩⟨b|` with environment
//! operators diagonal in position:
//!
//! ```text
//! Ê₁ =  cos(gχx̂t) e^{ iω₀t/2}      Ê₂ = -i sin(gχx̂t) e^{ iω₀t/2}
//! Ê₃ = -i sin(gχx̂t) e^{-iω₀t/2}    Ê₄ =  cos(gχx̂t) e^{-iω₀t/2}
//! ```
//!
//! These closed forms hold when (gχx)² dominates ω₀²; [`ode_residual`]
//! quantifies the accuracy claim pointwise instead of assuming it.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{ModelParams, QubitAmplitudes};
use crate::wavefunction::{CompositeState, EnvWavefunction, Picture, PositionGrid};

/// The four closed-form environment operators, evaluated as scalar
/// functions of (t, x); they are diagonal in the position representation,
/// so no operator matrices are ever built.
#[derive(Debug, Clone, Copy)]
pub struct EOperators {
    params: ModelParams,
}

/// Construct the closed-form operators for the given parameters. The caller
/// is advised (not forced) to be inside the validity regime.
pub fn e_operators(params: &ModelParams) -> EOperators {
    EOperators { params: *params }
}

impl EOperators {
    pub fn e1(&self, t: f64, x: f64) -> C64 {
        let lam = self.params.g_chi() * x;
        C64::from_polar(1.0, 0.5 * self.params.omega0 * t) * (lam * t).cos()
    }

    pub fn e2(&self, t: f64, x: f64) -> C64 {
        let lam = self.params.g_chi() * x;
        -C64::i() * C64::from_polar(1.0, 0.5 * self.params.omega0 * t) * (lam * t).sin()
    }

    pub fn e3(&self, t: f64, x: f64) -> C64 {
        let lam = self.params.g_chi() * x;
        -C64::i() * C64::from_polar(1.0, -0.5 * self.params.omega0 * t) * (lam * t).sin()
    }

    pub fn e4(&self, t: f64, x: f64) -> C64 {
        let lam = self.params.g_chi() * x;
        C64::from_polar(1.0, -0.5 * self.params.omega0 * t) * (lam * t).cos()
    }

    /// The 2×2 matrix [[Ê₁, Ê₂], [Ê₃, Ê₄]] at (t, x); unitary for every
    /// argument pair.
    pub fn matrix(&self, t: f64, x: f64) -> [[C64; 2]; 2] {
        [[self.e1(t, x), self.e2(t, x)], [self.e3(t, x), self.e4(t, x)]]
    }

    /// Max-norm deviation of `matrix(t, x)` from unitarity, ‖U†U − I‖_max.
    pub fn unitarity_defect(&self, t: f64, x: f64) -> f64 {
        let u = self.matrix(t, x);
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut s = C64::new(0.0, 0.0);
                for k in 0..2 {
                    s += u[k][i].conj() * u[k][j];
                }
                let target = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }
}

/// Relative residual of the closed-form operators in the decoupled
/// second-order equations they are constructed to satisfy,
///
/// ```text
/// Ê₁'' = -(gχx)² Ê₁ + gχx ω₀ e^{ iω₀t} Ê₃     (and E₂ with E₄)
/// Ê₃'' = -(gχx)² Ê₃ - gχx ω₀ e^{-iω₀t} Ê₁     (and E₄ with E₂)
/// ```
///
/// using centered finite differences with step `dt`. Inside the regime the
/// residual scales as (ω₀/(gχx))², plus an O((gχx·dt)²) differencing floor;
/// outside it the residual is O(1), quantifying the breakdown of the
/// approximation rather than assuming its validity.
///
/// Panics if `dt <= 0`.
pub fn ode_residual(params: &ModelParams, t: f64, x: f64, dt: f64) -> f64 {
    assert!(dt > 0.0, "ode_residual: dt must be > 0");
    let ops = e_operators(params);
    let lam = params.g_chi() * x;
    let w0 = params.omega0;
    let phase_p = C64::from_polar(1.0, w0 * t);
    let phase_m = phase_p.conj();

    let es = [
        [ops.e1(t - dt, x), ops.e1(t, x), ops.e1(t + dt, x)],
        [ops.e2(t - dt, x), ops.e2(t, x), ops.e2(t + dt, x)],
        [ops.e3(t - dt, x), ops.e3(t, x), ops.e3(t + dt, x)],
        [ops.e4(t - dt, x), ops.e4(t, x), ops.e4(t + dt, x)],
    ];
    let lam_sq = lam * lam;
    let rhs = [
        -lam_sq * es[0][1] + lam * w0 * phase_p * es[2][1],
        -lam_sq * es[1][1] + lam * w0 * phase_p * es[3][1],
        -lam_sq * es[2][1] - lam * w0 * phase_m * es[0][1],
        -lam_sq * es[3][1] - lam * w0 * phase_m * es[1][1],
    ];
    let mut residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..4 {
        let second = (es[k][0] - 2.0 * es[k][1] + es[k][2]) / (dt * dt);
        residual = residual.max((second - rhs[k]).norm());
        scale = scale.max(rhs[k].norm());
    }
    if scale > 1e-300 {
        residual / scale
    } else {
        residual
    }
}

/// Evolve the product state (α|a⟩ + β|b⟩) ⊗ env under the closed-form
/// propagator: pointwise on the grid,
///
/// ```text
/// psi_a(x,t) = env(x) [α cos(gχxt) - iβ sin(gχxt)] e^{ iω₀t/2}
/// psi_b(x,t) = env(x) [-iα sin(gχxt) + β cos(gχxt)] e^{-iω₀t/2}
/// ```
///
/// The result is an interaction-picture composite state; the total norm is
/// preserved exactly.
pub fn evolve_composite(
    params: &ModelParams,
    qubit: &QubitAmplitudes,
    env: &EnvWavefunction,
    t: f64,
) -> Result<CompositeState> {
    let EnvWavefunction::Position { grid, values } = env else {
        return Err(Error::RepresentationMismatch(
            "evolve_composite requires a position-grid environment".into(),
        ));
    };
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidInput(format!("t = {t} must be finite and >= 0")));
    }
    let gchi = params.g_chi();
    let ph_a = C64::from_polar(1.0, 0.5 * params.omega0 * t);
    let ph_b = ph_a.conj();
    let (alpha, beta) = (qubit.alpha, qubit.beta);
    let xs = grid.xs();
    let mut va = Vec::with_capacity(values.len());
    let mut vb = Vec::with_capacity(values.len());
    for (v, &x) in values.iter().zip(xs.iter()) {
        let (s, c) = (gchi * x * t).sin_cos();
        va.push(v * (alpha * c - C64::i() * beta * s) * ph_a);
        vb.push(v * (-C64::i() * alpha * s + beta * c) * ph_b);
    }
    CompositeState::new(
        EnvWavefunction::position_raw(grid, va),
        EnvWavefunction::position_raw(grid, vb),
        Picture::Interaction,
        t,
    )
}

/// Sign selecting one of the two pointer branches: `Plus` is the branch
/// with α = +β at t = 0, `Minus` the branch with α = -β.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointerSign {
    Plus,
    Minus,
}

impl PointerSign {
    pub fn signum(&self) -> f64 {
        match self {
            PointerSign::Plus => 1.0,
            PointerSign::Minus => -1.0,
        }
    }
}

/// The scalar relating factor for the pointer branches, G(t) = ±e^{iω₀t}.
/// Its existence as a scalar (rather than an operator) is exactly what makes
/// these branches pointer states.
#[derive(Debug, Clone, Copy)]
pub struct GFunction {
    pub sign: PointerSign,
}

impl GFunction {
    pub fn value(&self, params: &ModelParams, t: f64) -> C64 {
        self.sign.signum() * C64::from_polar(1.0, params.omega0 * t)
    }

    /// Whether the relating factor is a scalar, i.e. independent of the
    /// environment coordinate. True by construction for these branches.
    pub fn is_scalar(&self) -> bool {
        true
    }
}

/// Time-evolved pointer states of the system,
/// |±(t)⟩ = (e^{iω₀t}|a⟩ ± |b⟩)/√2.
pub fn pointer_states_system(params: &ModelParams, t: f64, sign: PointerSign) -> QubitAmplitudes {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let alpha = C64::from_polar(inv_sqrt2, params.omega0 * t);
    let beta = C64::new(sign.signum() * inv_sqrt2, 0.0);
    QubitAmplitudes::new(alpha, beta).expect("pointer state is normalized by construction")
}

/// Corresponding pointer states of the environment,
/// Φ_±(x,t) = (2α₀/π)^{1/4} e^{-α₀x² ∓ i(gχx ± ω₀/2)t}: the Gaussian packet
/// times a pure phase, so its modulus never changes.
pub fn pointer_states_env(
    params: &ModelParams,
    t: f64,
    sign: PointerSign,
    grid: &PositionGrid,
) -> Result<EnvWavefunction> {
    let gauss = EnvWavefunction::gaussian_package(params.alpha0, grid)?;
    let EnvWavefunction::Position { values, .. } = &gauss else { unreachable!() };
    let s = sign.signum();
    let gchi = params.g_chi();
    let w0_half = 0.5 * params.omega0;
    let xs = grid.xs();
    let out: Vec<C64> = values
        .iter()
        .zip(xs.iter())
        .map(|(v, &x)| v * C64::from_polar(1.0, -s * (gchi * x + s * w0_half) * t))
        .collect();
    Ok(EnvWavefunction::position_raw(grid, out))
}

/// Overlap of the two environment pointer states,
/// ⟨Φ₋(t)|Φ₊(t)⟩ = e^{-(gχt)²/(2α₀)}: real, in (0, 1], monotone decreasing.
pub fn env_overlap(params: &ModelParams, t: f64) -> f64 {
    let gchi_t = params.g_chi() * t;
    (-(gchi_t * gchi_t) / (2.0 * params.alpha0)).exp()
}

/// Evolve an initial state given in the pointer decomposition
/// α'|+(t₀)⟩ + β'|−(t₀)⟩: the composite state is the linear combination
/// α'|+(t)⟩|Φ₊(t)⟩ + β'|−(t)⟩|Φ₋(t)⟩, assembled into (psi_a, psi_b)
/// components. Equals [`evolve_composite`] applied to
/// (α, β) = ((α'+β')/√2, (α'−β')/√2) pointwise.
pub fn evolve_pointer_decomposition(
    params: &ModelParams,
    alpha_p: C64,
    beta_p: C64,
    grid: &PositionGrid,
    t: f64,
) -> Result<CompositeState> {
    let norm_sq = alpha_p.norm_sqr() + beta_p.norm_sqr();
    if (norm_sq - 1.0).abs() > crate::model::QUBIT_NORM_TOL {
        return Err(Error::NormalizationError(format!(
            "|alpha'|^2 + |beta'|^2 = {norm_sq} must be 1"
        )));
    }
    let plus_sys = pointer_states_system(params, t, PointerSign::Plus);
    let minus_sys = pointer_states_system(params, t, PointerSign::Minus);
    let plus_env = pointer_states_env(params, t, PointerSign::Plus, grid)?;
    let minus_env = pointer_states_env(params, t, PointerSign::Minus, grid)?;

    let pv = plus_env.values();
    let mv = minus_env.values();
    let ca_p = alpha_p * plus_sys.alpha;
    let ca_m = beta_p * minus_sys.alpha;
    let cb_p = alpha_p * plus_sys.beta;
    let cb_m = beta_p * minus_sys.beta;
    let va: Vec<C64> = pv.iter().zip(mv.iter()).map(|(p, m)| ca_p * p + ca_m * m).collect();
    let vb: Vec<C64> = pv.iter().zip(mv.iter()).map(|(p, m)| cb_p * p + cb_m * m).collect();
    CompositeState::new(
        EnvWavefunction::position_raw(grid, va),
        EnvWavefunction::position_raw(grid, vb),
        Picture::Interaction,
        t,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// omega0 = 1, omega = 1e-3, chi = 20, g = 5 (gchi = 100), alpha0 = 100.
    fn regime_params() -> ModelParams {
        ModelParams::new(1.0, 1e-3, 5.0, 2e5, 100.0).unwrap()
    }

    #[test]
    fn identity_at_t_zero() {
        let ops = e_operators(&regime_params());
        for &x in &[-3.0, 0.0, 0.7, 12.0] {
            let u = ops.matrix(0.0, x);
            assert_eq!(u[0][0], C64::new(1.0, 0.0));
            assert_eq!(u[1][1], C64::new(1.0, 0.0));
            assert_eq!(u[0][1], C64::new(0.0, 0.0));
            assert_eq!(u[1][0], C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn hand_evaluated_point() {
        // gchi*x*t = pi/2 and omega0*t = pi: e1 = 0, e3 = -1
        let p = ModelParams::new(1.0, 0.5, 1.0, 1.0, 1.0).unwrap(); // chi = 1, gchi = 1
        let t = std::f64::consts::PI;
        let x = 0.5;
        let ops = e_operators(&p);
        assert!(ops.e1(t, x).norm() < 1e-15);
        let e3 = ops.e3(t, x);
        assert_abs_diff_eq!(e3.re, -1.0, epsilon = 1e-15);
        assert!(e3.im.abs() < 1e-15);
    }

    #[test]
    fn column_norms_are_one() {
        let ops = e_operators(&regime_params());
        for &(t, x) in &[(0.3, 1.2), (2.0, -0.4), (11.0, 0.01)] {
            let n = ops.e1(t, x).norm_sqr() + ops.e3(t, x).norm_sqr();
            assert_abs_diff_eq!(n, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn unitary_at_random_arguments() {
        let ops = e_operators(&regime_params());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let t: f64 = rng.random_range(0.0..20.0);
            let x: f64 = rng.random_range(-2.0..2.0);
            assert!(ops.unitarity_defect(t, x) < 1e-12);
        }
    }

    #[test]
    fn residual_is_differencing_noise_when_phases_vanish() {
        // omega0 -> 0 limit: the closed forms become exact
        let p = ModelParams::new(1e-9, 0.5, 1.0, 1.0, 1.0).unwrap();
        let r1 = ode_residual(&p, 0.7, 1.0, 1e-3);
        let r2 = ode_residual(&p, 0.7, 1.0, 5e-4);
        assert!(r1 < 1e-6, "residual {r1}");
        // halving dt cuts the residual by about 4: O(dt^2) floor
        assert!(r2 < 0.4 * r1, "r1 = {r1}, r2 = {r2}");
    }

    #[test]
    fn residual_small_in_regime_point() {
        // gchi = 100 at x = 1: relative residual ~ (omega0/(gchi x))^2 / 4
        let p = ModelParams::new(1.0, 1e-3, 100.0, 500.0, 0.25).unwrap(); // chi = 1
        assert_abs_diff_eq!(p.g_chi(), 100.0, epsilon = 1e-12);
        let r = ode_residual(&p, 0.1, 1.0, 1e-5);
        assert!(r < 1e-3, "residual {r}");
        // measured bound: C (omega0/(gchi x))^2 with C = 0.3
        let lam = p.g_chi() * 1.0;
        assert!(r <= 0.3 * (p.omega0 / lam).powi(2) + 1e-6, "residual {r}");
    }

    #[test]
    fn residual_order_one_outside_regime() {
        // gchi = omega0 = 1: the closed forms break down
        let p = ModelParams::new(1.0, 1.0, 1.0, 0.5, 0.25).unwrap(); // chi = 1
        let r = ode_residual(&p, 1.0, 1.0, 1e-6);
        assert!(r > 0.01, "residual {r} should be O(1)");
    }

    #[test]
    fn evolution_at_t_zero_is_identity() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let q = QubitAmplitudes::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let state = evolve_composite(&p, &q, &env, 0.0).unwrap();
        for (va, ve) in state.psi_a.values().iter().zip(env.values()) {
            assert!((va - q.alpha * ve).norm() < 1e-15);
        }
        for (vb, ve) in state.psi_b.values().iter().zip(env.values()) {
            assert!((vb - q.beta * ve).norm() < 1e-15);
        }
    }

    #[test]
    fn branch_population_follows_gaussian_decay() {
        // alpha = 1: ||psi_a||^2(t) = (1 + e^{-(gchi t)^2/(2 alpha0)}) / 2
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let q = QubitAmplitudes::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        for &t in &[0.05, 0.1, 0.2, 0.5] {
            let state = evolve_composite(&p, &q, &env, t).unwrap();
            let expected = 0.5 * (1.0 + env_overlap(&p, t));
            assert_abs_diff_eq!(state.psi_a.norm_sq(), expected, epsilon = 1e-10);
            assert_abs_diff_eq!(state.total_norm_sq(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pointer_branch_population_is_constant() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = QubitAmplitudes::new(C64::new(s, 0.0), C64::new(s, 0.0)).unwrap();
        for &t in &[0.03, 0.14, 0.8, 2.0] {
            let state = evolve_composite(&p, &q, &env, t).unwrap();
            assert_abs_diff_eq!(state.psi_a.norm_sq(), 0.5, epsilon = 1e-10);
        }
    }

    #[test]
    fn fock_input_rejected() {
        let p = regime_params();
        let env = EnvWavefunction::from_fock_coeffs(vec![C64::new(1.0, 0.0)]).unwrap();
        let q = QubitAmplitudes::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        assert!(matches!(
            evolve_composite(&p, &q, &env, 0.1),
            Err(Error::RepresentationMismatch(_))
        ));
    }

    #[test]
    fn pointer_system_states() {
        let p = regime_params();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q0 = pointer_states_system(&p, 0.0, PointerSign::Plus);
        assert_abs_diff_eq!(q0.alpha.re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(q0.beta.re, s, epsilon = 1e-15);

        // omega0 t = pi: alpha picks up a sign
        let q = pointer_states_system(&p, std::f64::consts::PI, PointerSign::Plus);
        assert_abs_diff_eq!(q.alpha.re, -s, epsilon = 1e-15);
        assert!(q.alpha.im.abs() < 1e-15);

        // 2 pi periodicity
        let q2 = pointer_states_system(&p, 2.0 * std::f64::consts::PI, PointerSign::Plus);
        assert_abs_diff_eq!(q2.alpha.re, q0.alpha.re, epsilon = 1e-12);
        assert_abs_diff_eq!(q2.alpha.im, q0.alpha.im, epsilon = 1e-12);
    }

    #[test]
    fn pointer_env_modulus_is_the_gaussian() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let gauss = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let phi0 = pointer_states_env(&p, 0.0, PointerSign::Plus, &grid).unwrap();
        for (a, b) in phi0.values().iter().zip(gauss.values()) {
            assert!((a - b).norm() < 1e-15);
        }
        for &t in &[0.1, 1.0, 6.0] {
            for sign in [PointerSign::Plus, PointerSign::Minus] {
                let phi = pointer_states_env(&p, t, sign, &grid).unwrap();
                for (a, b) in phi.values().iter().zip(gauss.values()) {
                    assert_abs_diff_eq!(a.norm(), b.norm(), epsilon = 1e-14);
                }
                assert_abs_diff_eq!(phi.norm_sq(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn quadrature_overlap_matches_closed_form() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        for &t in &[0.0, 0.05, 0.1414, 0.3] {
            let plus = pointer_states_env(&p, t, PointerSign::Plus, &grid).unwrap();
            let minus = pointer_states_env(&p, t, PointerSign::Minus, &grid).unwrap();
            let overlap = minus.inner(&plus).unwrap();
            assert_abs_diff_eq!(overlap.re, env_overlap(&p, t), epsilon = 1e-8);
            assert!(overlap.im.abs() < 1e-8);
        }
    }

    #[test]
    fn overlap_limits() {
        let p = regime_params();
        assert_eq!(env_overlap(&p, 0.0), 1.0);
        // gchi t = sqrt(2 alpha0) -> e^{-1}
        let t = (2.0 * p.alpha0).sqrt() / p.g_chi();
        assert_abs_diff_eq!(env_overlap(&p, t), (-1.0_f64).exp(), epsilon = 1e-15);
        let mut last = 1.0;
        for k in 1..40 {
            let v = env_overlap(&p, 0.02 * k as f64);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn decomposition_route_matches_direct_route() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for _ in 0..12 {
            let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let b = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (alpha_p, beta_p) = (a / n, b / n);
            let t = rng.random_range(0.0..1.0);
            let via_pointer =
                evolve_pointer_decomposition(&p, alpha_p, beta_p, &grid, t).unwrap();
            let alpha = (alpha_p + beta_p) * s;
            let beta = (alpha_p - beta_p) * s;
            let q = QubitAmplitudes::new(alpha, beta).unwrap();
            let direct = evolve_composite(&p, &q, &env, t).unwrap();
            for (u, v) in via_pointer.psi_a.values().iter().zip(direct.psi_a.values()) {
                assert!((u - v).norm() < 1e-10);
            }
            for (u, v) in via_pointer.psi_b.values().iter().zip(direct.psi_b.values()) {
                assert!((u - v).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn product_state_at_t_zero() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let state =
            evolve_pointer_decomposition(&p, C64::new(1.0, 0.0), C64::new(0.0, 0.0), &grid, 0.0)
                .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for ((a, b), e) in
            state.psi_a.values().iter().zip(state.psi_b.values()).zip(env.values())
        {
            assert!((a - s * e).norm() < 1e-14);
            assert!((b - s * e).norm() < 1e-14);
        }
    }

    #[test]
    fn minus_branch_ratio() {
        // alpha' = 0, beta' = 1: psi_a / psi_b = -e^{i omega0 t} everywhere
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        for &t in &[0.07, 0.4, 1.9] {
            let state =
                evolve_pointer_decomposition(&p, C64::new(0.0, 0.0), C64::new(1.0, 0.0), &grid, t)
                    .unwrap();
            let expected = -C64::from_polar(1.0, p.omega0 * t);
            for (a, b) in state.psi_a.values().iter().zip(state.psi_b.values()) {
                if b.norm() > 1e-12 {
                    assert!((a / b - expected).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn pointer_states_do_not_entangle() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for sign in [1.0, -1.0] {
            let q = QubitAmplitudes::new(C64::new(s, 0.0), C64::new(sign * s, 0.0)).unwrap();
            for &t in &[0.05, 0.1414, 0.5, 3.0] {
                let state = evolve_composite(&p, &q, &env, t).unwrap();
                let (lo, hi) = state.gram_eigenvalues().unwrap();
                assert!(lo < 1e-10 * hi, "Schmidt rank > 1: lo = {lo}, hi = {hi}");
            }
        }
    }

    #[test]
    fn excited_state_entangles_near_maximally() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let q = QubitAmplitudes::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0)).unwrap();
        let tau = (2.0 * p.alpha0).sqrt() / p.g_chi();
        let state = evolve_composite(&p, &q, &env, tau).unwrap();
        let (lo, hi) = state.gram_eigenvalues().unwrap();
        assert!(hi / lo < 3.0, "eigenvalue ratio {}", hi / lo);
    }

    #[test]
    fn branch_ratio_is_x_independent_for_pointer_states() {
        let p = regime_params();
        let grid = PositionGrid::default_for(p.alpha0).unwrap();
        let env = EnvWavefunction::gaussian_package(p.alpha0, &grid).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for sign in [1.0, -1.0] {
            let q = QubitAmplitudes::new(C64::new(s, 0.0), C64::new(sign * s, 0.0)).unwrap();
            for &t in &[0.02, 0.3, 1.1] {
                let state = evolve_composite(&p, &q, &env, t).unwrap();
                let expected = sign * C64::from_polar(1.0, p.omega0 * t);
                let mut worst: f64 = 0.0;
                for (a, b) in state.psi_a.values().iter().zip(state.psi_b.values()) {
                    if b.norm() > 1e-10 {
                        worst = worst.max((a / b - expected).norm());
                    }
                }
                assert!(worst < 1e-10, "ratio spread {worst}");
            }
        }
    }
}
