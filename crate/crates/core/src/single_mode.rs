//! Dynamics of one damped harmonic oscillator in a thermal bath.
//!
//! Moments evolve under the drift `Y₁ = [[−(λ−μ), 1/m], [−mω², −(λ+μ)]]`:
//! means as `d⟨x,p⟩/dt = Y₁⟨x,p⟩` and the covariance as
//! `dσ/dt = Y₁σ + σY₁ᵀ + 2D`. The state stays Gaussian, so the density
//! matrix in coordinate representation follows from the moments alone.

use std::f64::consts::PI;

use log::warn;
use nalgebra::{Complex, Matrix2, Vector2};

use crate::error::{param_err, Error, Result};
use crate::linalg::solve_lyapunov;
use crate::params::{validate_single_mode, OscillatorParams, SingleModeEnv, ThermalParams};

/// A time argument that may be the explicit `t = ∞` limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Time {
    Finite(f64),
    Infinite,
}

impl From<f64> for Time {
    fn from(t: f64) -> Self {
        Time::Finite(t)
    }
}

/// First and second moments of a one-mode Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState1D {
    pub mean_x: f64,
    pub mean_p: f64,
    pub sxx: f64,
    pub sxp: f64,
    pub spp: f64,
}

impl GaussianState1D {
    /// Schrödinger generalized uncertainty function `σxx σpp − σxp²`.
    pub fn det(&self) -> f64 {
        self.sxx * self.spp - self.sxp * self.sxp
    }

    pub fn covariance(&self) -> Matrix2<f64> {
        Matrix2::new(self.sxx, self.sxp, self.sxp, self.spp)
    }

    pub fn means(&self) -> Vector2<f64> {
        Vector2::new(self.mean_x, self.mean_p)
    }

    pub fn from_parts(means: Vector2<f64>, cov: &Matrix2<f64>) -> Self {
        Self {
            mean_x: means[0],
            mean_p: means[1],
            sxx: cov[(0, 0)],
            sxp: 0.5 * (cov[(0, 1)] + cov[(1, 0)]),
            spp: cov[(1, 1)],
        }
    }
}

/// Exponent coefficients of the density matrix in the variables
/// `Σ = (x+x')/2`, `Δ = x − x'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl DecoherenceCoefficients {
    pub fn of(state: &GaussianState1D, hbar: f64) -> Self {
        Self {
            alpha: 0.5 / state.sxx,
            beta: state.sxp / (hbar * state.sxx),
            gamma: state.det() / (2.0 * hbar * hbar * state.sxx),
        }
    }
}

/// Which closed form of the decoherence time to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoherenceRegime {
    General,
    /// Uncorrelated initial state, `r = 0`.
    RZero,
    /// Zero temperature, `C = 1`; requires `μ = 0`.
    ZeroT,
    /// High temperature, `2kT/ħω ≈ C`.
    HighT,
}

/// Smallest `C` below which the high-temperature forms draw a warning.
pub const HIGH_T_MIN_C: f64 = 5.0;

pub fn drift_matrix_1d(params: &OscillatorParams) -> Matrix2<f64> {
    let OscillatorParams {
        m,
        omega,
        lambda,
        mu,
        ..
    } = *params;
    Matrix2::new(-(lambda - mu), 1.0 / m, -m * omega * omega, -(lambda + mu))
}

/// `exp(tY₁) = e^{−λt}(cos Ωt·I + (sin Ωt/Ω)·B)` with `B = Y₁ + λI`,
/// which squares to `−Ω²I`.
pub fn propagator_1d(params: &OscillatorParams, t: f64) -> Result<Matrix2<f64>> {
    params.validate()?;
    if params.omega <= params.mu.abs() {
        return Err(param_err("propagator needs omega > |mu| (Omega^2 > 0)"));
    }
    let big_omega = params.big_omega();
    let b = drift_matrix_1d(params) + Matrix2::identity() * params.lambda;
    let (s, c) = (big_omega * t).sin_cos();
    Ok((Matrix2::identity() * c + b * (s / big_omega)) * (-params.lambda * t).exp())
}

/// Stationary covariance, the solution of `Y₁σ + σY₁ᵀ = −2D`.
pub fn asymptotic_covariance_1d(
    env: &SingleModeEnv,
    params: &OscillatorParams,
) -> Result<Matrix2<f64>> {
    let y = drift_matrix_1d(params);
    let d = Matrix2::new(env.dxx, env.dxp, env.dxp, env.dpp);
    let s = solve_lyapunov(&y, &(d * -2.0))?;
    Ok((s + s.transpose()) * 0.5)
}

fn check_env_matches(env: &SingleModeEnv, params: &OscillatorParams) -> Result<()> {
    let report = validate_single_mode(env);
    if !report.all_passed() {
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        return Err(param_err(format!(
            "environment fails: {}",
            names.join("; ")
        )));
    }
    if env.lambda != params.lambda || env.mu != params.mu || env.hbar != params.hbar {
        return Err(param_err(
            "environment lambda/mu/hbar differ from oscillator parameters",
        ));
    }
    Ok(())
}

/// Exact moments at time `t`: means `M·m₀`, covariance
/// `M(σ₀ − σ∞)Mᵀ + σ∞` with `M = exp(tY₁)`.
pub fn propagate_moments(
    state0: &GaussianState1D,
    env: &SingleModeEnv,
    params: &OscillatorParams,
    t: f64,
) -> Result<GaussianState1D> {
    params.validate_single_mode()?;
    check_env_matches(env, params)?;
    if !(t >= 0.0) {
        return Err(param_err(format!("time must be non-negative, got {t}")));
    }
    let m = propagator_1d(params, t)?;
    let s_inf = asymptotic_covariance_1d(env, params)?;
    let cov = m * (state0.covariance() - s_inf) * m.transpose() + s_inf;
    Ok(GaussianState1D::from_parts(m * state0.means(), &cov))
}

/// Stationary moments of the Gibbs environment: `σxx = ħC/(2mω)`,
/// `σpp = ħmωC/2`, `σxp = 0`.
pub fn asymptotic_variances_1d(
    params: &OscillatorParams,
    thermal: &ThermalParams,
) -> GaussianState1D {
    let OscillatorParams { m, omega, hbar, .. } = *params;
    GaussianState1D {
        mean_x: 0.0,
        mean_p: 0.0,
        sxx: hbar * thermal.c / (2.0 * m * omega),
        sxp: 0.0,
        spp: hbar * m * omega * thermal.c / 2.0,
    }
}

/// Combinations of the squeeze parameter and correlation coefficient that
/// recur in the closed forms.
#[derive(Debug, Clone, Copy)]
struct Squeeze {
    /// `δ + 1/(δ(1−r²))`
    sum: f64,
    /// `δ − 1/(δ(1−r²))`
    diff: f64,
    /// `δ + r²/(δ(1−r²))`
    sum_r2: f64,
    /// `δ − r²/(δ(1−r²))`
    diff_r2: f64,
    /// `r/(δ√(1−r²))`
    corr: f64,
    sqrt_1mr2: f64,
}

impl Squeeze {
    fn new(delta: f64, r: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(param_err(format!(
                "squeeze parameter delta must be positive, got {delta}"
            )));
        }
        if !(r.abs() < 1.0) {
            return Err(param_err(format!(
                "correlation coefficient must satisfy |r| < 1, got {r}"
            )));
        }
        let one_minus_r2 = 1.0 - r * r;
        let inv = 1.0 / (delta * one_minus_r2);
        Ok(Self {
            sum: delta + inv,
            diff: delta - inv,
            sum_r2: delta + r * r * inv,
            diff_r2: delta - r * r * inv,
            corr: r / (delta * one_minus_r2.sqrt()),
            sqrt_1mr2: one_minus_r2.sqrt(),
        })
    }
}

fn check_thermal(thermal: &ThermalParams) -> Result<f64> {
    if !(thermal.c >= 1.0 && thermal.c.is_finite()) {
        return Err(param_err(format!("C must be >= 1, got {}", thermal.c)));
    }
    Ok(thermal.c)
}

/// Closed-form generalized uncertainty function σ(t) for a correlated
/// coherent initial state in the Gibbs environment.
pub fn uncertainty_det_closed(
    delta: f64,
    r: f64,
    params: &OscillatorParams,
    thermal: &ThermalParams,
    t: Time,
) -> Result<f64> {
    params.validate_single_mode()?;
    let sq = Squeeze::new(delta, r)?;
    let c = check_thermal(thermal)?;
    let h2 = 0.25 * params.hbar * params.hbar;
    let t = match t {
        Time::Infinite => return Ok(h2 * c * c),
        Time::Finite(t) if t >= 0.0 => t,
        Time::Finite(t) => return Err(param_err(format!("time must be non-negative, got {t}"))),
    };
    let OscillatorParams {
        omega, lambda, mu, ..
    } = *params;
    let w2 = omega * omega - mu * mu;
    let big_omega = w2.sqrt();
    let s2 = (2.0 * big_omega * t).sin();
    // Regrouped around g = 1 − e^{−2λt} and q = 1 − cos 2Ωt so the O(C²)
    // terms do not cancel; t = 0 gives exactly ħ²/4.
    let e1 = (-2.0 * lambda * t).exp();
    let g = -(-2.0 * lambda * t).exp_m1();
    let q = 2.0 * (big_omega * t).sin().powi(2);
    let mu_q = mu * mu * q / w2;

    let thermal = c * c * g * g - 2.0 * c * c * e1 * mu_q;
    let squeeze = e1 * c * (sq.sum * (g + mu_q) + sq.diff * mu * s2 / big_omega)
        + e1 * c * 2.0 * r * mu * omega * q / (w2 * sq.sqrt_1mr2);
    Ok(h2 * (e1 * e1 + thermal + squeeze))
}

/// Degree of quantum decoherence `ħ / (2√σ(t))`; equals `1/C` at `t = ∞`.
pub fn qd_degree(
    delta: f64,
    r: f64,
    params: &OscillatorParams,
    thermal: &ThermalParams,
    t: Time,
) -> Result<f64> {
    if t == Time::Infinite {
        // still validate the inputs
        uncertainty_det_closed(delta, r, params, thermal, t)?;
        return Ok(thermal.tanh_epsilon());
    }
    let sigma = uncertainty_det_closed(delta, r, params, thermal, t)?;
    Ok(params.hbar / (2.0 * sigma.sqrt()))
}

fn check_state(state: &GaussianState1D) -> Result<()> {
    if !(state.sxx > 0.0) || !(state.det() > 0.0) {
        return Err(Error::State(format!(
            "need sxx > 0 and det > 0, got sxx={} det={}",
            state.sxx,
            state.det()
        )));
    }
    Ok(())
}

/// `⟨x|ρ|x'⟩` of the Gaussian state.
pub fn density_matrix_element(
    state: &GaussianState1D,
    x: f64,
    xp: f64,
    hbar: f64,
) -> Result<Complex<f64>> {
    check_state(state)?;
    let centre = 0.5 * (x + xp) - state.mean_x;
    let diff = x - xp;
    let re = -centre * centre / (2.0 * state.sxx)
        - state.det() / (2.0 * hbar * hbar * state.sxx) * diff * diff;
    let im = state.sxp / (hbar * state.sxx) * centre * diff + state.mean_p / hbar * diff;
    let norm = (1.0 / (2.0 * PI * state.sxx)).sqrt();
    Ok(Complex::new(re, im).exp() * norm)
}

/// The density matrix in the `(Σ, Δ)` variables, written through α, β, γ.
pub fn density_matrix_sigma_delta(
    state: &GaussianState1D,
    sigma: f64,
    delta: f64,
    hbar: f64,
) -> Result<Complex<f64>> {
    check_state(state)?;
    let DecoherenceCoefficients { alpha, beta, gamma } = DecoherenceCoefficients::of(state, hbar);
    let mx = state.mean_x;
    let re =
        -alpha * sigma * sigma - gamma * delta * delta + 2.0 * alpha * mx * sigma - alpha * mx * mx;
    let im = beta * sigma * delta + (state.mean_p / hbar - beta * mx) * delta;
    Ok(Complex::new(re, im).exp() * (alpha / PI).sqrt())
}

/// Stationary thermal density matrix
/// `(mω/(πħC))^{1/2} exp{−(mω/4ħ)[(x+x')²/C + (x−x')²C]}`.
pub fn stationary_density_matrix_element(
    params: &OscillatorParams,
    thermal: &ThermalParams,
    x: f64,
    xp: f64,
) -> f64 {
    let OscillatorParams { m, omega, hbar, .. } = *params;
    let c = thermal.c;
    let s = x + xp;
    let d = x - xp;
    (m * omega / (PI * hbar * c)).sqrt()
        * (-(m * omega / (4.0 * hbar)) * (s * s / c + d * d * c)).exp()
}

/// Growth rate `X` of the off-diagonal coefficient, `γ(t) ≈ γ(0)(1 + 2Xt)`.
fn gamma_growth_rate(sq: &Squeeze, params: &OscillatorParams, c: f64) -> f64 {
    let OscillatorParams {
        omega, lambda, mu, ..
    } = *params;
    lambda * sq.sum_r2 * c + mu * sq.diff_r2 * c - lambda - mu - omega * sq.corr
}

fn warn_short_time(params: &OscillatorParams, t: f64) {
    if params.lambda * t > 0.1 || params.big_omega() * t > 0.1 {
        warn!(
            "short-time expansion used outside its range: lambda*t = {:.3}, Omega*t = {:.3}",
            params.lambda * t,
            params.big_omega() * t
        );
    }
}

/// First-order short-time magnitude of the off-diagonal coefficient γ.
pub fn gamma_short_time(
    delta: f64,
    r: f64,
    params: &OscillatorParams,
    thermal: &ThermalParams,
    t: f64,
) -> Result<f64> {
    params.validate_single_mode()?;
    let sq = Squeeze::new(delta, r)?;
    let c = check_thermal(thermal)?;
    warn_short_time(params, t);
    let gamma0 = params.m * params.omega / (4.0 * params.hbar * delta);
    Ok(gamma0 * (1.0 + 2.0 * gamma_growth_rate(&sq, params, c) * t))
}

/// Decoherence time scale. Returns `f64::INFINITY` when the off-diagonal
/// coefficient does not grow, e.g. a Glauber coherent state at `T = 0`.
pub fn decoherence_time(
    delta: f64,
    r: f64,
    params: &OscillatorParams,
    thermal: &ThermalParams,
    regime: DecoherenceRegime,
) -> Result<f64> {
    params.validate()?;
    let sq = Squeeze::new(delta, r)?;
    let c = check_thermal(thermal)?;
    let rate = match regime {
        DecoherenceRegime::General => {
            params.validate_single_mode()?;
            gamma_growth_rate(&sq, params, c)
        }
        DecoherenceRegime::RZero => {
            if r != 0.0 {
                return Err(param_err(format!("r = 0 regime requested with r = {r}")));
            }
            params.validate_single_mode()?;
            (params.lambda + params.mu) * (delta * c - 1.0)
        }
        DecoherenceRegime::ZeroT => {
            if params.mu != 0.0 {
                return Err(param_err(format!(
                    "zero-temperature regime requires mu = 0, got {}",
                    params.mu
                )));
            }
            gamma_growth_rate(&sq, params, 1.0)
        }
        DecoherenceRegime::HighT => {
            params.validate_single_mode()?;
            if c < HIGH_T_MIN_C {
                warn!("high-temperature decoherence time evaluated at C = {c} < {HIGH_T_MIN_C}");
            }
            (params.lambda * sq.sum_r2 + params.mu * sq.diff_r2) * c
        }
    };
    Ok(if rate > 0.0 {
        1.0 / (2.0 * rate)
    } else {
        f64::INFINITY
    })
}

/// Time after which thermal fluctuations match quantum fluctuations, in the
/// high-temperature regime.
pub fn thermal_fluctuation_time(
    delta: f64,
    r: f64,
    params: &OscillatorParams,
    thermal: &ThermalParams,
) -> Result<f64> {
    params.validate_single_mode()?;
    let sq = Squeeze::new(delta, r)?;
    let c = check_thermal(thermal)?;
    if c < HIGH_T_MIN_C {
        warn!("thermal fluctuation time evaluated at C = {c} < {HIGH_T_MIN_C}");
    }
    let rate = (params.lambda * sq.sum + params.mu * sq.diff) * c;
    Ok(1.0 / (2.0 * rate))
}

/// First-order short-time expansion of σ(t).
pub fn sigma_short_time(
    delta: f64,
    r: f64,
    params: &OscillatorParams,
    thermal: &ThermalParams,
    t: f64,
) -> Result<f64> {
    params.validate_single_mode()?;
    let sq = Squeeze::new(delta, r)?;
    let c = check_thermal(thermal)?;
    if params.lambda * t > 0.1 {
        warn!(
            "short-time expansion of sigma used at lambda*t = {:.3}",
            params.lambda * t
        );
    }
    let OscillatorParams {
        lambda, mu, hbar, ..
    } = *params;
    let slope = lambda * sq.sum * c + mu * sq.diff * c - 2.0 * lambda;
    Ok(0.25 * hbar * hbar * (1.0 + 2.0 * slope * t))
}

/// Energy relaxation time `1/λ`.
pub fn relaxation_time(params: &OscillatorParams) -> Result<f64> {
    if !(params.lambda > 0.0) {
        return Err(param_err(format!(
            "lambda must be positive, got {}",
            params.lambda
        )));
    }
    Ok(1.0 / params.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{build_initial_state, gibbs_coefficients};

    fn reference() -> OscillatorParams {
        OscillatorParams::new(1.0, 1.0, 0.2, 0.1)
    }

    fn thermal(c: f64) -> ThermalParams {
        ThermalParams::new(c).unwrap()
    }

    #[test]
    fn drift_matrix_entries() {
        let y = drift_matrix_1d(&reference());
        assert_eq!(y, Matrix2::new(-0.1, 1.0, -1.0, -0.30000000000000004));
        assert!((y.trace() + 0.4).abs() < 1e-15);
        let y0 = drift_matrix_1d(&OscillatorParams::new(1.0, 1.0, 0.3, 0.0));
        assert_eq!(y0[(0, 0)], y0[(1, 1)]);
    }

    #[test]
    fn propagator_semigroup() {
        let p = OscillatorParams::new(1.3, 0.7, 0.25, 0.05);
        let a = propagator_1d(&p, 0.8).unwrap();
        let b = propagator_1d(&p, 2.1).unwrap();
        let ab = propagator_1d(&p, 2.9).unwrap();
        assert!((a * b - ab).abs().max() < 1e-12);
        assert!(
            (propagator_1d(&p, 0.0).unwrap() - Matrix2::identity())
                .abs()
                .max()
                == 0.0
        );
    }

    #[test]
    fn gibbs_stationary_matches_closed_form() {
        for c in [1.5, 2.0, 10.0] {
            let p = reference();
            let env = gibbs_coefficients(&p, &thermal(c)).unwrap();
            let s = asymptotic_covariance_1d(&env, &p).unwrap();
            let expect = asymptotic_variances_1d(&p, &thermal(c));
            assert!((s - expect.covariance()).abs().max() < 1e-12);
            let y = drift_matrix_1d(&p);
            let d = Matrix2::new(env.dxx, env.dxp, env.dxp, env.dpp);
            assert!((y * s + s * y.transpose() + d * 2.0).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn asymptotic_variances_values() {
        let unit = OscillatorParams::new(1.0, 1.0, 0.2, 0.0);
        let g = asymptotic_variances_1d(&unit, &thermal(1.0));
        assert_eq!((g.sxx, g.spp, g.sxp), (0.5, 0.5, 0.0));
        let h = asymptotic_variances_1d(&unit, &thermal(10.0));
        assert_eq!((h.sxx, h.spp, h.sxp), (5.0, 5.0, 0.0));
        assert_eq!(h.det(), 25.0);
    }

    #[test]
    fn propagate_zero_time_is_identity() {
        let p = reference();
        let env = gibbs_coefficients(&p, &thermal(2.0)).unwrap();
        let s0 = build_initial_state(4.0, 0.3, 1.0, -0.5, &p).unwrap();
        let s = propagate_moments(&s0, &env, &p, 0.0).unwrap();
        assert!((s.sxx - s0.sxx).abs() < 1e-15);
        assert!((s.sxp - s0.sxp).abs() < 1e-15);
        assert!((s.spp - s0.spp).abs() < 1e-15);
        assert_eq!((s.mean_x, s.mean_p), (1.0, -0.5));
    }

    #[test]
    fn propagate_relaxes_to_gibbs() {
        let p = reference();
        let t = thermal(2.0);
        let env = gibbs_coefficients(&p, &t).unwrap();
        let s0 = build_initial_state(4.0, 0.0, 1.0, 1.0, &p).unwrap();
        let s = propagate_moments(&s0, &env, &p, 200.0 / p.lambda).unwrap();
        assert!((s.sxx - 1.0).abs() < 1e-12);
        assert!((s.spp - 1.0).abs() < 1e-12);
        assert!(s.sxp.abs() < 1e-12);
        assert!(s.mean_x.abs() < 1e-12 && s.mean_p.abs() < 1e-12);
    }

    #[test]
    fn propagate_rejects_unphysical_env() {
        let p = reference();
        let env = gibbs_coefficients(&p, &thermal(1.0)).unwrap();
        let s0 = build_initial_state(1.0, 0.0, 0.0, 0.0, &p).unwrap();
        assert!(matches!(
            propagate_moments(&s0, &env, &p, 1.0),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn sigma_closed_initial_and_asymptotic() {
        let p = reference();
        for (d, r, c) in [(4.0, 0.0, 2.0), (0.3, 0.7, 3.0), (1.0, -0.4, 1.7)] {
            let s0 = uncertainty_det_closed(d, r, &p, &thermal(c), Time::Finite(0.0)).unwrap();
            assert!((s0 - 0.25).abs() <= 1e-12);
            let s_inf = uncertainty_det_closed(d, r, &p, &thermal(c), Time::Infinite).unwrap();
            assert_eq!(s_inf, 0.25 * c * c);
        }
    }

    #[test]
    fn qd_degree_limits() {
        let p = reference();
        assert!(
            (qd_degree(4.0, 0.0, &p, &thermal(2.0), Time::Finite(0.0)).unwrap() - 1.0).abs()
                < 1e-12
        );
        assert_eq!(
            qd_degree(4.0, 0.0, &p, &thermal(10.0), Time::Infinite).unwrap(),
            0.1
        );
    }

    #[test]
    fn qd_degree_decreases_on_reference_grid() {
        let p = reference();
        let q = |t: f64| qd_degree(4.0, 0.0, &p, &thermal(2.0), Time::Finite(t)).unwrap();
        assert!(q(20.0) < q(5.0) && q(5.0) < q(1.0) && q(1.0) < 1.0);
    }

    #[test]
    fn coherent_state_density_at_origin() {
        let p = OscillatorParams::new(1.0, 1.0, 0.2, 0.1);
        let s = build_initial_state(1.0, 0.0, 0.0, 0.0, &p).unwrap();
        let v = density_matrix_element(&s, 0.0, 0.0, 1.0).unwrap();
        assert!((v.re - 0.5641895835477563).abs() < 1e-15);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn density_forms_agree_and_are_hermitian() {
        let s = GaussianState1D {
            mean_x: 0.4,
            mean_p: -0.7,
            sxx: 1.3,
            sxp: 0.35,
            spp: 0.6,
        };
        for &(x, xp) in &[(0.1, -0.3), (1.5, 0.2), (-2.0, 0.9)] {
            let a = density_matrix_element(&s, x, xp, 1.0).unwrap();
            let b = density_matrix_sigma_delta(&s, 0.5 * (x + xp), x - xp, 1.0).unwrap();
            assert!((a - b).norm() < 1e-14);
            let c = density_matrix_element(&s, xp, x, 1.0).unwrap();
            assert!((a - c.conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn density_rejects_degenerate_state() {
        let s = GaussianState1D {
            mean_x: 0.0,
            mean_p: 0.0,
            sxx: 1.0,
            sxp: 1.0,
            spp: 1.0,
        };
        assert!(matches!(
            density_matrix_element(&s, 0.0, 0.0, 1.0),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn stationary_density_values() {
        let p = OscillatorParams::new(1.0, 1.0, 0.2, 0.1);
        let t = thermal(10.0);
        let v0 = stationary_density_matrix_element(&p, &t, 0.0, 0.0);
        assert!((v0 - 0.1784124116152771).abs() < 1e-15);
        let v1 = stationary_density_matrix_element(&p, &t, 1.0, -1.0);
        assert!((v1 / v0 - (-10.0_f64).exp()).abs() < 1e-18);
        let g = asymptotic_variances_1d(&p, &t);
        for &(x, xp) in &[(0.3, 0.1), (-1.2, 2.2), (0.0, 3.0)] {
            let a = density_matrix_element(&g, x, xp, 1.0).unwrap();
            let b = stationary_density_matrix_element(&p, &t, x, xp);
            assert!((a.re - b).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn gamma_short_time_values() {
        let p = reference();
        let g0 = gamma_short_time(4.0, 0.0, &p, &thermal(2.0), 0.0).unwrap();
        assert!((g0 - 1.0 / 16.0).abs() < 1e-16);
        // initial-state gamma from the alpha/beta/gamma coefficients
        let s0 = build_initial_state(4.0, 0.0, 0.0, 0.0, &p).unwrap();
        assert!((DecoherenceCoefficients::of(&s0, 1.0).gamma - g0).abs() < 1e-16);

        let free = OscillatorParams::new(1.0, 1.0, 0.2, 0.0);
        let a = gamma_short_time(1.0, 0.0, &free, &thermal(1.0), 0.0).unwrap();
        let b = gamma_short_time(1.0, 0.0, &free, &thermal(1.0), 0.05).unwrap();
        assert_eq!(a, 0.25);
        assert_eq!(a, b);
    }

    #[test]
    fn gamma_slope_gives_decoherence_time() {
        let p = OscillatorParams::new(1.0, 1.3, 0.2, 0.1);
        let th = thermal(2.5);
        let (d, r) = (3.0, 0.4);
        let g0 = gamma_short_time(d, r, &p, &th, 0.0).unwrap();
        let g1 = gamma_short_time(d, r, &p, &th, 0.01).unwrap();
        let slope = (g1 - g0) / 0.01;
        let td = decoherence_time(d, r, &p, &th, DecoherenceRegime::General).unwrap();
        assert!((slope / g0 - 1.0 / td).abs() < 1e-10);
    }

    #[test]
    fn decoherence_time_regimes() {
        let p = reference();
        let rz = decoherence_time(4.0, 0.0, &p, &thermal(2.0), DecoherenceRegime::RZero).unwrap();
        assert!((rz - 1.0 / 4.2).abs() < 1e-15);
        let gen =
            decoherence_time(4.0, 0.0, &p, &thermal(2.0), DecoherenceRegime::General).unwrap();
        assert!((gen - rz).abs() < 1e-15);

        let free = OscillatorParams::new(1.0, 1.0, 0.2, 0.0);
        let zt =
            decoherence_time(4.0, 0.0, &free, &thermal(1.0), DecoherenceRegime::ZeroT).unwrap();
        assert!((zt - 1.0 / 1.2).abs() < 1e-15);
        let inf =
            decoherence_time(1.0, 0.0, &free, &thermal(1.0), DecoherenceRegime::ZeroT).unwrap();
        assert!(inf.is_infinite());
        assert!(decoherence_time(4.0, 0.0, &p, &thermal(1.0), DecoherenceRegime::ZeroT).is_err());
        assert!(decoherence_time(4.0, 0.2, &p, &thermal(2.0), DecoherenceRegime::RZero).is_err());

        let ht = decoherence_time(4.0, 0.0, &p, &thermal(10.0), DecoherenceRegime::HighT).unwrap();
        assert!((ht - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_time_values() {
        let p = reference();
        let td = thermal_fluctuation_time(4.0, 0.0, &p, &thermal(10.0)).unwrap();
        assert!((td - 1.0 / 24.5).abs() < 1e-15);
        let free = OscillatorParams::new(1.0, 1.0, 0.2, 0.0);
        let td = thermal_fluctuation_time(4.0, 0.0, &free, &thermal(10.0)).unwrap();
        assert!((td - 1.0 / (2.0 * 0.2 * 4.25 * 10.0)).abs() < 1e-15);
    }

    #[test]
    fn sigma_short_time_values() {
        let p = reference();
        assert_eq!(
            sigma_short_time(4.0, 0.0, &p, &thermal(2.0), 0.0).unwrap(),
            0.25
        );
        let free = OscillatorParams::new(1.0, 1.0, 0.2, 0.0);
        assert_eq!(
            sigma_short_time(1.0, 0.0, &free, &thermal(1.0), 0.07).unwrap(),
            0.25
        );
    }

    #[test]
    fn relaxation_time_values() {
        assert_eq!(relaxation_time(&reference()).unwrap(), 5.0);
        assert_eq!(
            relaxation_time(&OscillatorParams::new(1.0, 1.0, 1.0, 0.0)).unwrap(),
            1.0
        );
        assert!(relaxation_time(&OscillatorParams::new(1.0, 1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn relaxed_after_ten_relaxation_times() {
        let p = reference();
        let th = thermal(2.0);
        let env = gibbs_coefficients(&p, &th).unwrap();
        let s0 = build_initial_state(4.0, 0.0, 0.0, 0.0, &p).unwrap();
        let t = 10.0 * relaxation_time(&p).unwrap();
        let s = propagate_moments(&s0, &env, &p, t).unwrap();
        let g = asymptotic_variances_1d(&p, &th);
        assert!((s.covariance() - g.covariance()).abs().max() < 1e-8);
    }
}
