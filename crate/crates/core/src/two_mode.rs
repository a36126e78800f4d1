//! Two independent oscillators coupled only through a common environment.
//!
//! The covariance matrix in the ordering `(x, p_x, y, p_y)` obeys
//! `dσ/dt = Yσ + σYᵀ + 2D`, with solution
//! `σ(t) = M(t)(σ(0) − σ(∞))Mᵀ(t) + σ(∞)`, `M(t) = exp(tY)`, and the
//! stationary `σ(∞)` solving `Yσ(∞) + σ(∞)Yᵀ = −2D`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use log::warn;
use nalgebra::{Complex, Matrix2, Matrix4};

use crate::error::{param_err, Error, Result};
use crate::linalg::{lyapunov_residual, max_abs, solve_lyapunov, symmetrize};
use crate::params::{validate_two_mode, OscillatorParams, TwoModeEnvironment};
use crate::single_mode::GaussianState1D;

/// Column labels of the ten independent covariance entries, in the order
/// returned by [`CovarianceMatrix4::entries`].
pub const COVARIANCE_ENTRY_NAMES: [&str; 10] = [
    "sxx", "sxpx", "sxy", "sxpy", "spxpx", "sypx", "spxpy", "syy", "sypy", "spypy",
];

const SYMMETRY_TOL: f64 = 1e-12;

/// Symmetric 4×4 covariance matrix of a two-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix4(Matrix4<f64>);

impl CovarianceMatrix4 {
    /// Checks symmetry (relative `1e-12`) and positive diagonal.
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let scale = max_abs(&m).max(1.0);
        if max_abs(&(m - m.transpose())) > SYMMETRY_TOL * scale {
            return Err(Error::Shape("covariance matrix is not symmetric".into()));
        }
        if (0..4).any(|i| !(m[(i, i)] > 0.0)) {
            return Err(Error::State("covariance diagonal must be positive".into()));
        }
        Ok(Self(symmetrize(&m)))
    }

    /// Symmetrizes without checking the diagonal. Used for stationary
    /// solutions of environments that are only formally defined.
    pub fn from_symmetric(m: Matrix4<f64>) -> Self {
        Self(symmetrize(&m))
    }

    /// Tensor product of two one-mode states; the cross block is zero.
    pub fn product(a: &GaussianState1D, b: &GaussianState1D) -> Self {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&a.covariance());
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&b.covariance());
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// `[σxx, σxpx, σxy, σxpy, σpxpx, σypx, σpxpy, σyy, σypy, σpypy]`.
    pub fn entries(&self) -> [f64; 10] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(0, 3)],
            m[(1, 1)],
            m[(1, 2)],
            m[(1, 3)],
            m[(2, 2)],
            m[(2, 3)],
            m[(3, 3)],
        ]
    }

    pub fn cross_block(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 2).into_owned()
    }

    /// Smallest eigenvalue of `σ + (i/2)(J ⊕ J)`; non-negative for states
    /// that respect the uncertainty principle (`hbar = 1`).
    pub fn uncertainty_min_eigenvalue(&self) -> f64 {
        let mut h = self.0.map(|v| Complex::new(v, 0.0));
        for k in [0usize, 2] {
            h[(k, k + 1)] += Complex::new(0.0, 0.5);
            h[(k + 1, k)] -= Complex::new(0.0, 0.5);
        }
        h.symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &v| a.min(v))
    }
}

/// Drift matrix `Y`: two identical blocks `[[−λ, 1/m], [−mω², −λ]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftMatrix(Matrix4<f64>);

impl DriftMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    /// Largest real part of the spectrum; `−λ` for a valid drift.
    pub fn spectral_abscissa(&self) -> f64 {
        self.0
            .complex_eigenvalues()
            .iter()
            .fold(f64::NEG_INFINITY, |a, z| a.max(z.re))
    }
}

/// Symmetric matrix of diffusion coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionMatrix(Matrix4<f64>);

impl DiffusionMatrix {
    /// Assembles `D` without checking positivity of the environment.
    pub fn from_env_unchecked(env: &TwoModeEnvironment) -> Self {
        Self(Matrix4::new(
            env.dxx, env.dxpx, env.dxy, env.dxpy, env.dxpx, env.dpxpx, env.dypx, env.dpxpy,
            env.dxy, env.dypx, env.dyy, env.dypy, env.dxpy, env.dpxpy, env.dypy, env.dpypy,
        ))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }
}

pub(crate) fn check_two_mode_params(params: &OscillatorParams) -> Result<()> {
    params.validate()?;
    if params.hbar != 1.0 {
        return Err(param_err(format!(
            "two-mode dynamics uses hbar = 1, got {}",
            params.hbar
        )));
    }
    if params.mu != 0.0 {
        warn!("two-mode drift has no mu term; ignoring mu = {}", params.mu);
    }
    Ok(())
}

fn drift_block(params: &OscillatorParams) -> Matrix2<f64> {
    let OscillatorParams {
        m, omega, lambda, ..
    } = *params;
    Matrix2::new(-lambda, 1.0 / m, -m * omega * omega, -lambda)
}

fn block_diag(b: &Matrix2<f64>) -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(b);
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(b);
    m
}

pub fn build_drift(params: &OscillatorParams) -> Result<DriftMatrix> {
    check_two_mode_params(params)?;
    Ok(DriftMatrix(block_diag(&drift_block(params))))
}

/// Diffusion matrix of a validated environment.
pub fn build_diffusion(env: &TwoModeEnvironment) -> Result<DiffusionMatrix> {
    let report = validate_two_mode(env);
    if !report.all_passed() {
        let failed: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        return Err(Error::Environment(format!("fails {}", failed.join("; "))));
    }
    Ok(DiffusionMatrix::from_env_unchecked(env))
}

/// `M(t) = exp(tY)` blockwise:
/// `e^{−λt}(cos ωt·I + (sin ωt/ω)·[[0, 1/m], [−mω², 0]])`.
pub fn drift_exponential(params: &OscillatorParams, t: f64) -> Result<Matrix4<f64>> {
    check_two_mode_params(params)?;
    if !(t >= 0.0) {
        return Err(param_err(format!("time must be non-negative, got {t}")));
    }
    let OscillatorParams {
        m, omega, lambda, ..
    } = *params;
    let (s, c) = (omega * t).sin_cos();
    let rot = Matrix2::new(c, s / (m * omega), -m * omega * s, c);
    Ok(block_diag(&(rot * (-lambda * t).exp())))
}

/// Stationary covariance from the Lyapunov equation
/// `Yσ(∞) + σ(∞)Yᵀ = −2D`, solved by Kronecker vectorization.
pub fn lyapunov_asymptotic(y: &DriftMatrix, d: &DiffusionMatrix) -> Result<CovarianceMatrix4> {
    let rhs = d.0 * -2.0;
    let sigma = symmetrize(&solve_lyapunov(&y.0, &rhs)?);
    let residual = lyapunov_residual(&y.0, &sigma, &rhs) / 2.0;
    let bound = 1e-10 * max_abs(&d.0).max(1.0);
    if residual > bound {
        return Err(Error::SingularSystem(format!(
            "Lyapunov residual {residual:e} exceeds {bound:e}"
        )));
    }
    Ok(CovarianceMatrix4::from_symmetric(sigma))
}

/// `max |Yσ + σYᵀ + 2D|`.
pub fn lyapunov_residual_of(
    y: &DriftMatrix,
    d: &DiffusionMatrix,
    sigma: &CovarianceMatrix4,
) -> f64 {
    lyapunov_residual(&y.0, &sigma.0, &(d.0 * -2.0))
}

/// Closed-form stationary covariance for an environment with equal
/// diagonal blocks and `Dxpy = Dypx`.
pub fn asymptotic_closed_form(
    env: &TwoModeEnvironment,
    params: &OscillatorParams,
) -> Result<CovarianceMatrix4> {
    check_two_mode_params(params)?;
    let c = env
        .symmetric_coefficients()
        .ok_or_else(|| Error::Environment("closed form needs a symmetric environment".into()))?;
    let OscillatorParams {
        m,
        omega,
        lambda: l,
        ..
    } = *params;
    let (m2, w2) = (m * m, omega * omega);
    let den = l * l + w2;

    // identical algebra for the unimodal block and the cross block
    let block = |dqq: f64, dqp: f64, dpp: f64| {
        let qq = (m2 * (2.0 * l * l + w2) * dqq + 2.0 * m * l * dqp + dpp) / (2.0 * m2 * l * den);
        let qp = (-m2 * w2 * dqq + 2.0 * m * l * dqp + dpp) / (2.0 * m * den);
        let pp = (m2 * w2 * w2 * dqq - 2.0 * m * w2 * l * dqp + (2.0 * l * l + w2) * dpp)
            / (2.0 * l * den);
        Matrix2::new(qq, qp, qp, pp)
    };
    let a = block(c.dxx, c.dxpx, c.dpxpx);
    let cross = block(c.dxy, c.dxpy, c.dpxpy);

    let mut s = Matrix4::zeros();
    s.fixed_view_mut::<2, 2>(0, 0).copy_from(&a);
    s.fixed_view_mut::<2, 2>(2, 2).copy_from(&a);
    s.fixed_view_mut::<2, 2>(0, 2).copy_from(&cross);
    s.fixed_view_mut::<2, 2>(2, 0).copy_from(&cross.transpose());
    Ok(CovarianceMatrix4(s))
}

/// Determinant of the stationary cross block for a symmetric environment.
pub fn det_entanglement_block(env: &TwoModeEnvironment, params: &OscillatorParams) -> Result<f64> {
    check_two_mode_params(params)?;
    if !env.is_symmetric() {
        return Err(Error::Environment(
            "det C formula needs a symmetric environment".into(),
        ));
    }
    let OscillatorParams {
        m,
        omega,
        lambda: l,
        ..
    } = *params;
    let a = m * omega * omega * env.dxy + env.dpxpy / m;
    let num = a * a + 4.0 * l * l * (env.dxy * env.dpxpy - env.dxpy * env.dxpy);
    Ok(num / (4.0 * l * l * (l * l + omega * omega)))
}

/// Drift, diffusion and stationary covariance for one environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeDynamics {
    pub params: OscillatorParams,
    pub drift: DriftMatrix,
    pub diffusion: DiffusionMatrix,
    pub asymptotic: CovarianceMatrix4,
}

impl TwoModeDynamics {
    /// Validates the environment, then solves for `σ(∞)`.
    pub fn new(env: &TwoModeEnvironment, params: &OscillatorParams) -> Result<Self> {
        let diffusion = build_diffusion(env)?;
        Self::assemble(env, params, diffusion)
    }

    /// Skips the environment positivity check.
    pub fn new_unchecked(env: &TwoModeEnvironment, params: &OscillatorParams) -> Result<Self> {
        Self::assemble(env, params, DiffusionMatrix::from_env_unchecked(env))
    }

    fn assemble(
        env: &TwoModeEnvironment,
        params: &OscillatorParams,
        diffusion: DiffusionMatrix,
    ) -> Result<Self> {
        if env.lambda != params.lambda {
            return Err(param_err(format!(
                "environment lambda {} differs from oscillator lambda {}",
                env.lambda, params.lambda
            )));
        }
        let drift = build_drift(params)?;
        let asymptotic = cached_asymptotic(env, params, &drift, &diffusion)?;
        Ok(Self {
            params: *params,
            drift,
            diffusion,
            asymptotic,
        })
    }

    pub fn residual(&self) -> f64 {
        lyapunov_residual_of(&self.drift, &self.diffusion, &self.asymptotic)
    }

    /// `M(t)(σ(0) − σ(∞))Mᵀ(t) + σ(∞)` before symmetrization.
    pub fn propagate_raw(&self, sigma0: &CovarianceMatrix4, t: f64) -> Result<Matrix4<f64>> {
        let m = drift_exponential(&self.params, t)?;
        Ok(m * (sigma0.0 - self.asymptotic.0) * m.transpose() + self.asymptotic.0)
    }

    pub fn propagate(&self, sigma0: &CovarianceMatrix4, t: f64) -> Result<CovarianceMatrix4> {
        Ok(CovarianceMatrix4::from_symmetric(
            self.propagate_raw(sigma0, t)?,
        ))
    }
}

type CacheKey = [u64; 13];

fn cache() -> &'static RwLock<HashMap<CacheKey, CovarianceMatrix4>> {
    static CACHE: OnceLock<RwLock<HashMap<CacheKey, CovarianceMatrix4>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

const CACHE_CAPACITY: usize = 4096;

fn cache_key(env: &TwoModeEnvironment, params: &OscillatorParams) -> CacheKey {
    [
        env.dxx,
        env.dxpx,
        env.dpxpx,
        env.dyy,
        env.dypy,
        env.dpypy,
        env.dxy,
        env.dxpy,
        env.dypx,
        env.dpxpy,
        env.lambda,
        params.m,
        params.omega,
    ]
    .map(f64::to_bits)
}

fn cached_asymptotic(
    env: &TwoModeEnvironment,
    params: &OscillatorParams,
    drift: &DriftMatrix,
    diffusion: &DiffusionMatrix,
) -> Result<CovarianceMatrix4> {
    let key = cache_key(env, params);
    if let Some(hit) = cache().read().ok().and_then(|c| c.get(&key).copied()) {
        return Ok(hit);
    }
    let sigma = lyapunov_asymptotic(drift, diffusion)?;
    if let Ok(mut c) = cache().write() {
        if c.len() >= CACHE_CAPACITY {
            c.clear();
        }
        c.insert(key, sigma);
    }
    Ok(sigma)
}

/// Exact covariance at time `t` for a validated environment. `σ(∞)` is
/// cached per environment and oscillator parameters.
pub fn propagate_covariance(
    sigma0: &CovarianceMatrix4,
    env: &TwoModeEnvironment,
    params: &OscillatorParams,
    t: f64,
) -> Result<CovarianceMatrix4> {
    TwoModeDynamics::new(env, params)?.propagate(sigma0, t)
}
