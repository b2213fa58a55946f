//! Position grids, environment wavefunctions and composite states.
//!
//! The environment lives either on a uniform symmetric position grid or in a
//! truncated Fock basis. All integrals are trapezoid sums on the uniform
//! grid; for the smooth, rapidly decaying integrands that occur here the
//! trapezoid rule is spectrally accurate, and [`QUAD_NORM_TOL`] is the
//! declared tolerance on quadrature-level identities.

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Declared tolerance on quadrature norms of constructed states.
pub const QUAD_NORM_TOL: f64 = 1e-10;
/// Tolerance on the total norm of a composite state.
pub const COMPOSITE_NORM_TOL: f64 = 1e-10;
/// Gaussian tail threshold: `exp(-alpha0 x_max^2)` must stay below this.
pub const GAUSSIAN_TAIL_THRESHOLD: f64 = 1e-12;
/// Default completeness tolerance for Fock projections: `sum |c_n|^2`
/// must reach `1 - FOCK_COMPLETENESS_TOL`.
pub const FOCK_COMPLETENESS_TOL: f64 = 1e-8;

/// Uniform position grid, symmetric about the origin so that parity
/// relations hold exactly in floating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PositionGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl PositionGrid {
    pub fn new(x_max: f64, n_points: usize) -> Result<Self> {
        if !x_max.is_finite() || x_max <= 0.0 {
            return Err(Error::InvalidInput(format!("x_max = {x_max} must be finite and > 0")));
        }
        if n_points < 2 {
            return Err(Error::InvalidInput(format!("n_points = {n_points} must be >= 2")));
        }
        Ok(Self { x_min: -x_max, x_max, n_points })
    }

    /// Default grid for a Gaussian of width parameter `alpha0`:
    /// `x_max = 8/sqrt(alpha0)` (tail below `e^-64`), 2048 points.
    pub fn default_for(alpha0: f64) -> Result<Self> {
        if !alpha0.is_finite() || alpha0 <= 0.0 {
            return Err(Error::NonPositiveParameter(format!("alpha0 = {alpha0}")));
        }
        Self::new(8.0 / alpha0.sqrt(), 2048)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / (self.n_points - 1) as f64
    }

    /// Grid points, mirrored so that `xs[n-1-i] == -xs[i]` exactly.
    pub fn xs(&self) -> Array1<f64> {
        let n = self.n_points;
        let dx = self.dx();
        let mut xs = Array1::zeros(n);
        for i in 0..n / 2 {
            let u = self.x_max - i as f64 * dx;
            xs[i] = -u;
            xs[n - 1 - i] = u;
        }
        // odd n: the midpoint is exactly zero
        xs
    }

    /// Trapezoid weights (dx everywhere, dx/2 at the end points).
    pub fn weights(&self) -> Array1<f64> {
        let dx = self.dx();
        let mut w = Array1::from_elem(self.n_points, dx);
        w[0] = 0.5 * dx;
        w[self.n_points - 1] = 0.5 * dx;
        w
    }

    /// Quadrature inner product `sum_i w_i conj(u_i) v_i`.
    pub fn inner(&self, u: &Array1<C64>, v: &Array1<C64>) -> C64 {
        let w = self.weights();
        u.iter().zip(v.iter()).zip(w.iter()).map(|((a, b), wi)| a.conj() * b * wi).sum()
    }

    pub fn norm_sq(&self, v: &Array1<C64>) -> f64 {
        let w = self.weights();
        v.iter().zip(w.iter()).map(|(a, wi)| a.norm_sqr() * wi).sum()
    }
}

/// Environment state, either sampled on a [`PositionGrid`] or as Fock-basis
/// coefficients `c_n`, n = 0..=cutoff.
///
/// The normalized constructors ([`gaussian_package`], [`from_position_values`],
/// [`from_fock_coeffs`], [`gaussian_to_fock`]) guarantee unit norm within
/// [`QUAD_NORM_TOL`]. The `*_raw` constructors skip that check: propagator
/// ansatz outputs and entangled branch vectors are legitimately unnormalized.
///
/// [`gaussian_package`]: EnvWavefunction::gaussian_package
/// [`from_position_values`]: EnvWavefunction::from_position_values
/// [`from_fock_coeffs`]: EnvWavefunction::from_fock_coeffs
/// [`gaussian_to_fock`]: gaussian_to_fock
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "representation", rename_all = "snake_case")]
pub enum EnvWavefunction {
    Position { grid: PositionGrid, values: Vec<C64> },
    Fock { values: Vec<C64> },
}

impl EnvWavefunction {
    /// Normalized Gaussian packet `psi(x) = (2 alpha0/pi)^{1/4} exp(-alpha0 x^2)`
    /// sampled on `grid`.
    ///
    /// Errors with [`Error::GridTooNarrow`] when the truncated tail
    /// `exp(-alpha0 x_max^2)` is at or above [`GAUSSIAN_TAIL_THRESHOLD`], and
    /// with a normalization error when the quadrature norm misses 1 by more
    /// than [`QUAD_NORM_TOL`] (too few points).
    pub fn gaussian_package(alpha0: f64, grid: &PositionGrid) -> Result<Self> {
        if !alpha0.is_finite() || alpha0 <= 0.0 {
            return Err(Error::NonPositiveParameter(format!("alpha0 = {alpha0}")));
        }
        let tail = (-alpha0 * grid.x_max * grid.x_max).exp();
        if tail >= GAUSSIAN_TAIL_THRESHOLD {
            return Err(Error::GridTooNarrow { tail, threshold: GAUSSIAN_TAIL_THRESHOLD });
        }
        let n0 = (2.0 * alpha0 / std::f64::consts::PI).powf(0.25);
        let values: Array1<C64> =
            grid.xs().mapv(|x| C64::new(n0 * (-alpha0 * x * x).exp(), 0.0));
        let nrm = grid.norm_sq(&values);
        if (nrm - 1.0).abs() > QUAD_NORM_TOL {
            return Err(Error::NormalizationError(format!(
                "quadrature norm^2 = {nrm} off unity beyond {QUAD_NORM_TOL:e}; refine the grid"
            )));
        }
        Ok(Self::Position { grid: *grid, values: values.to_vec() })
    }

    /// Wrap position samples, enforcing unit quadrature norm.
    pub fn from_position_values(grid: &PositionGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::DimensionMismatch { expected: grid.n_points, got: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("wavefunction values must be finite".into()));
        }
        let arr = Array1::from_vec(values);
        let nrm = grid.norm_sq(&arr);
        if (nrm - 1.0).abs() > QUAD_NORM_TOL {
            return Err(Error::NormalizationError(format!("quadrature norm^2 = {nrm}")));
        }
        Ok(Self::Position { grid: *grid, values: arr.to_vec() })
    }

    /// Wrap Fock coefficients, enforcing unit norm.
    pub fn from_fock_coeffs(values: Vec<C64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty Fock coefficient vector".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("Fock coefficients must be finite".into()));
        }
        let nrm: f64 = values.iter().map(|v| v.norm_sqr()).sum();
        if (nrm - 1.0).abs() > QUAD_NORM_TOL {
            return Err(Error::NormalizationError(format!("coefficient norm^2 = {nrm}")));
        }
        Ok(Self::Fock { values })
    }

    /// Position-representation vector without the normalization check.
    pub fn position_raw(grid: &PositionGrid, values: Vec<C64>) -> Self {
        Self::Position { grid: *grid, values }
    }

    /// Fock-representation vector without the normalization check.
    pub fn fock_raw(values: Vec<C64>) -> Self {
        Self::Fock { values }
    }

    pub fn is_position(&self) -> bool {
        matches!(self, Self::Position { .. })
    }

    pub fn is_fock(&self) -> bool {
        matches!(self, Self::Fock { .. })
    }

    pub fn grid(&self) -> Option<&PositionGrid> {
        match self {
            Self::Position { grid, .. } => Some(grid),
            Self::Fock { .. } => None,
        }
    }

    pub fn values(&self) -> &[C64] {
        match self {
            Self::Position { values, .. } | Self::Fock { values } => values,
        }
    }

    pub fn len(&self) -> usize {
        self.values().len()
    }

    pub fn is_empty(&self) -> bool {
        self.values().is_empty()
    }

    /// Squared norm: quadrature for position, coefficient sum for Fock.
    pub fn norm_sq(&self) -> f64 {
        match self {
            Self::Position { grid, values } => {
                let w = grid.weights();
                values.iter().zip(w.iter()).map(|(v, wi)| v.norm_sqr() * wi).sum()
            }
            Self::Fock { values } => values.iter().map(|v| v.norm_sqr()).sum(),
        }
    }

    /// Inner product `<self, other>`; both must share the representation
    /// (and the grid, for position states).
    pub fn inner(&self, other: &Self) -> Result<C64> {
        match (self, other) {
            (Self::Position { grid: g1, values: v1 }, Self::Position { grid: g2, values: v2 }) => {
                if g1 != g2 {
                    return Err(Error::RepresentationMismatch(
                        "position states on different grids".into(),
                    ));
                }
                let w = g1.weights();
                Ok(v1
                    .iter()
                    .zip(v2.iter())
                    .zip(w.iter())
                    .map(|((a, b), wi)| a.conj() * b * wi)
                    .sum())
            }
            (Self::Fock { values: v1 }, Self::Fock { values: v2 }) => {
                if v1.len() != v2.len() {
                    return Err(Error::DimensionMismatch { expected: v1.len(), got: v2.len() });
                }
                Ok(v1.iter().zip(v2.iter()).map(|(a, b)| a.conj() * b).sum())
            }
            _ => Err(Error::RepresentationMismatch(
                "cannot mix position and Fock representations".into(),
            )),
        }
    }

    /// Pointwise scaling by a complex factor (no renormalization).
    pub fn scaled(&self, c: C64) -> Self {
        match self {
            Self::Position { grid, values } => Self::Position {
                grid: *grid,
                values: values.iter().map(|v| v * c).collect(),
            },
            Self::Fock { values } => Self::Fock { values: values.iter().map(|v| v * c).collect() },
        }
    }
}

/// Evaluate oscillator eigenfunctions of mass `m`, frequency `omega` on the
/// points `xs` and accumulate `c_n = sum_i w_i phi_n(x_i) v_i` for
/// n = 0..=cutoff. Uses the normalized three-term recurrence
/// `phi_{n+1} = sqrt(2/(n+1)) xi phi_n - sqrt(n/(n+1)) phi_{n-1}`,
/// `xi = sqrt(m omega) x`, which is stable upward.
pub(crate) fn project_onto_oscillator(
    values: &[C64],
    weights: &Array1<f64>,
    xs: &Array1<f64>,
    m: f64,
    omega: f64,
    cutoff: usize,
) -> Array1<C64> {
    let npts = xs.len();
    let momega = m * omega;
    let xi: Vec<f64> = xs.iter().map(|&x| momega.sqrt() * x).collect();
    let norm0 = (momega / std::f64::consts::PI).powf(0.25);
    let mut phi_prev: Vec<f64> = vec![0.0; npts];
    let mut phi: Vec<f64> = xi.iter().map(|&z| norm0 * (-0.5 * z * z).exp()).collect();
    let mut coeffs = Array1::<C64>::zeros(cutoff + 1);
    for n in 0..=cutoff {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..npts {
            acc += values[i] * (weights[i] * phi[i]);
        }
        coeffs[n] = acc;
        if n < cutoff {
            let c1 = (2.0 / (n + 1) as f64).sqrt();
            let c2 = (n as f64 / (n + 1) as f64).sqrt();
            for i in 0..npts {
                let next = c1 * xi[i] * phi[i] - c2 * phi_prev[i];
                phi_prev[i] = phi[i];
                phi[i] = next;
            }
        }
    }
    coeffs
}

/// Synthesize `sum_n c_n phi_n(x_i)` on the points `xs`.
pub(crate) fn synthesize_oscillator(
    coeffs: &[C64],
    xs: &Array1<f64>,
    m: f64,
    omega: f64,
) -> Array1<C64> {
    let npts = xs.len();
    let momega = m * omega;
    let xi: Vec<f64> = xs.iter().map(|&x| momega.sqrt() * x).collect();
    let norm0 = (momega / std::f64::consts::PI).powf(0.25);
    let mut phi_prev: Vec<f64> = vec![0.0; npts];
    let mut phi: Vec<f64> = xi.iter().map(|&z| norm0 * (-0.5 * z * z).exp()).collect();
    let mut out = Array1::<C64>::zeros(npts);
    let n_max = coeffs.len() - 1;
    for (n, &c) in coeffs.iter().enumerate() {
        if c != C64::new(0.0, 0.0) {
            for i in 0..npts {
                out[i] += c * phi[i];
            }
        }
        if n < n_max {
            let c1 = (2.0 / (n + 1) as f64).sqrt();
            let c2 = (n as f64 / (n + 1) as f64).sqrt();
            for i in 0..npts {
                let next = c1 * xi[i] * phi[i] - c2 * phi_prev[i];
                phi_prev[i] = phi[i];
                phi[i] = next;
            }
        }
    }
    out
}

/// Internal quadrature grid for projecting a Gaussian of width `alpha0` onto
/// the oscillator basis: spans the Gaussian support and resolves the fastest
/// oscillator eigenfunction retained.
fn projection_grid(alpha0: f64, params: &ModelParams, cutoff: usize) -> PositionGrid {
    let x_max = 8.0 / alpha0.sqrt();
    let k_osc = (params.m * params.omega).sqrt() * (2.0 * cutoff as f64 + 1.0).sqrt();
    let dx_osc = 2.0 * std::f64::consts::PI / (16.0 * k_osc.max(1.0));
    let dx_gauss = 0.07 / alpha0.sqrt();
    let dx = dx_osc.min(dx_gauss);
    let mut n = (2.0 * x_max / dx).ceil() as usize + 1;
    n = n.clamp(257, (1 << 19) + 1);
    if n % 2 == 0 {
        n += 1;
    }
    PositionGrid { x_min: -x_max, x_max, n_points: n }
}

/// Raw oscillator-basis projection of the Gaussian packet: returns the
/// coefficients (odd n exactly zero by parity) and the completeness
/// `sum_n |c_n|^2`, without renormalizing.
pub(crate) fn gaussian_fock_raw(
    alpha0: f64,
    params: &ModelParams,
    cutoff: usize,
) -> Result<(Array1<C64>, f64)> {
    if !alpha0.is_finite() || alpha0 <= 0.0 {
        return Err(Error::NonPositiveParameter(format!("alpha0 = {alpha0}")));
    }
    let grid = projection_grid(alpha0, params, cutoff);
    let xs = grid.xs();
    let w = grid.weights();
    let n0 = (2.0 * alpha0 / std::f64::consts::PI).powf(0.25);
    let psi: Vec<C64> = xs.iter().map(|&x| C64::new(n0 * (-alpha0 * x * x).exp(), 0.0)).collect();
    let mut coeffs = project_onto_oscillator(&psi, &w, &xs, params.m, params.omega, cutoff);
    for n in (1..=cutoff).step_by(2) {
        coeffs[n] = C64::new(0.0, 0.0); // even integrand: exact by parity
    }
    let completeness: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    Ok((coeffs, completeness))
}

/// Expand the Gaussian packet in the Fock basis of the field oscillator
/// (mass `m`, frequency `omega` from `params`): `c_n = ∫ phi_n(x) psi(x) dx`,
/// computed by trapezoid quadrature on a dense internal grid. Odd
/// coefficients are zeroed exactly by parity. The coefficients are
/// renormalized after the completeness check so the returned state carries
/// unit norm.
///
/// Errors with [`Error::CutoffTooSmall`] when
/// `sum |c_n|^2 < 1 -` [`FOCK_COMPLETENESS_TOL`].
pub fn gaussian_to_fock(
    alpha0: f64,
    params: &ModelParams,
    cutoff: usize,
) -> Result<EnvWavefunction> {
    let (mut coeffs, completeness) = gaussian_fock_raw(alpha0, params, cutoff)?;
    if completeness < 1.0 - FOCK_COMPLETENESS_TOL {
        return Err(Error::CutoffTooSmall(format!(
            "sum |c_n|^2 = {completeness} below 1 - {FOCK_COMPLETENESS_TOL:e} at cutoff {cutoff}"
        )));
    }
    let scale = completeness.sqrt().recip();
    coeffs.mapv_inplace(|c| c * scale);
    Ok(EnvWavefunction::Fock { values: coeffs.to_vec() })
}

/// Coherent state |z⟩ truncated at `cutoff`: `c_n = e^{-|z|²/2} zⁿ/√(n!)`,
/// evaluated in log space to avoid overflow, then renormalized after the
/// completeness check ([`Error::CutoffTooSmall`] when the truncation drops
/// more than [`FOCK_COMPLETENESS_TOL`] of the population).
pub fn coherent_state(z: C64, cutoff: usize) -> Result<EnvWavefunction> {
    if !z.is_finite() {
        return Err(Error::InvalidInput("coherent amplitude must be finite".into()));
    }
    let (r, phase) = z.to_polar();
    let mut values = Vec::with_capacity(cutoff + 1);
    let mut log_mag = -0.5 * r * r; // ln |c_0|
    for n in 0..=cutoff {
        if n > 0 {
            log_mag += r.ln() - 0.5 * (n as f64).ln();
        }
        values.push(C64::from_polar(log_mag.exp(), phase * n as f64));
    }
    let completeness: f64 = values.iter().map(|c| c.norm_sqr()).sum();
    if completeness < 1.0 - FOCK_COMPLETENESS_TOL {
        return Err(Error::CutoffTooSmall(format!(
            "coherent state |z| = {r} holds only {completeness} of its population at cutoff {cutoff}"
        )));
    }
    let scale = completeness.sqrt().recip();
    for c in values.iter_mut() {
        *c *= scale;
    }
    Ok(EnvWavefunction::Fock { values })
}

/// Synthesize a Fock-basis state back onto a position grid:
/// `psi(x_i) = sum_n c_n phi_n(x_i)`. The result is not renormalized (its
/// norm differs from the input only by basis truncation outside the grid).
pub fn fock_to_position(
    fock: &EnvWavefunction,
    params: &ModelParams,
    grid: &PositionGrid,
) -> Result<EnvWavefunction> {
    let EnvWavefunction::Fock { values } = fock else {
        return Err(Error::RepresentationMismatch("expected a Fock-representation state".into()));
    };
    let xs = grid.xs();
    let out = synthesize_oscillator(values, &xs, params.m, params.omega);
    Ok(EnvWavefunction::Position { grid: *grid, values: out.to_vec() })
}

/// Which picture a composite state is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Picture {
    Schrodinger,
    Interaction,
}

/// Entangled state of qubit and environment,
/// `|Psi(t)> = psi_a ⊗ |a> + psi_b ⊗ |b>`, with the environment branches on
/// a shared representation. The branches are individually unnormalized; the
/// total norm `||psi_a||^2 + ||psi_b||^2` must be 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeState {
    pub psi_a: EnvWavefunction,
    pub psi_b: EnvWavefunction,
    pub picture: Picture,
    pub time: f64,
}

impl CompositeState {
    pub fn new(
        psi_a: EnvWavefunction,
        psi_b: EnvWavefunction,
        picture: Picture,
        time: f64,
    ) -> Result<Self> {
        match (&psi_a, &psi_b) {
            (
                EnvWavefunction::Position { grid: ga, .. },
                EnvWavefunction::Position { grid: gb, .. },
            ) if ga != gb => {
                return Err(Error::RepresentationMismatch("branches on different grids".into()))
            }
            (EnvWavefunction::Fock { values: va }, EnvWavefunction::Fock { values: vb })
                if va.len() != vb.len() =>
            {
                return Err(Error::DimensionMismatch { expected: va.len(), got: vb.len() })
            }
            (EnvWavefunction::Position { .. }, EnvWavefunction::Fock { .. })
            | (EnvWavefunction::Fock { .. }, EnvWavefunction::Position { .. }) => {
                return Err(Error::RepresentationMismatch(
                    "branches must share a representation".into(),
                ))
            }
            _ => {}
        }
        let total = psi_a.norm_sq() + psi_b.norm_sq();
        if (total - 1.0).abs() > COMPOSITE_NORM_TOL {
            return Err(Error::NormalizationError(format!(
                "total norm^2 = {total} off unity beyond {COMPOSITE_NORM_TOL:e}"
            )));
        }
        Ok(Self { psi_a, psi_b, picture, time })
    }

    pub fn total_norm_sq(&self) -> f64 {
        self.psi_a.norm_sq() + self.psi_b.norm_sq()
    }

    /// 2×2 Gram matrix of the branch vectors,
    /// `[[<a,a>, <a,b>], [<b,a>, <b,b>]]`.
    pub fn gram(&self) -> Result<[[C64; 2]; 2]> {
        let aa = C64::new(self.psi_a.norm_sq(), 0.0);
        let bb = C64::new(self.psi_b.norm_sq(), 0.0);
        let ab = self.psi_a.inner(&self.psi_b)?;
        Ok([[aa, ab], [ab.conj(), bb]])
    }

    /// Eigenvalues (λ_min, λ_max) of the Gram matrix — the squared Schmidt
    /// coefficients of the composite state.
    pub fn gram_eigenvalues(&self) -> Result<(f64, f64)> {
        let g = self.gram()?;
        let half_tr = 0.5 * (g[0][0].re + g[1][1].re);
        let dz = 0.5 * (g[0][0].re - g[1][1].re);
        let r = (dz * dz + g[0][1].norm_sqr()).sqrt();
        Ok(((half_tr - r).max(0.0), half_tr + r))
    }
}
