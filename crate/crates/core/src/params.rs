//! Physical parameters, environment coefficients and the positivity
//! conditions they must satisfy before any dynamics is run.

use std::fmt;

use nalgebra::{Complex, Matrix4};

use crate::error::{param_err, Result};
use crate::single_mode::GaussianState1D;

/// Mass, frequency and dissipation constants of one oscillator.
///
/// `mu` is the friction asymmetry of the single-mode master equation; the
/// two-mode model has no such term and ignores it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub m: f64,
    pub omega: f64,
    pub lambda: f64,
    pub mu: f64,
    pub hbar: f64,
}

impl OscillatorParams {
    /// Parameters with `hbar = 1`.
    pub fn new(m: f64, omega: f64, lambda: f64, mu: f64) -> Self {
        Self {
            m,
            omega,
            lambda,
            mu,
            hbar: 1.0,
        }
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m", self.m),
            ("omega", self.omega),
            ("lambda", self.lambda),
            ("hbar", self.hbar),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(param_err(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !self.mu.is_finite() {
            return Err(param_err(format!("mu must be finite, got {}", self.mu)));
        }
        Ok(())
    }

    /// Requirements of the single-mode closed forms: `lambda > mu` and
    /// `omega > mu`, the latter so that `Ω² = ω² − μ²` is positive.
    pub fn validate_single_mode(&self) -> Result<()> {
        self.validate()?;
        if self.lambda <= self.mu {
            return Err(param_err(format!(
                "lambda ({}) must exceed mu ({})",
                self.lambda, self.mu
            )));
        }
        if self.omega <= self.mu.abs() {
            return Err(param_err(format!(
                "omega ({}) must exceed |mu| ({})",
                self.omega, self.mu
            )));
        }
        Ok(())
    }

    /// `Ω = sqrt(ω² − μ²)`.
    pub fn big_omega(&self) -> f64 {
        (self.omega * self.omega - self.mu * self.mu).sqrt()
    }
}

/// Bath temperature expressed as `C = coth(ħω / 2kT)`; `C = 1` is `T = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    pub c: f64,
}

impl ThermalParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(c >= 1.0 && c.is_finite()) {
            return Err(param_err(format!(
                "C = coth(hbar*omega/2kT) must be >= 1, got {c}"
            )));
        }
        Ok(Self { c })
    }

    pub fn zero_temperature() -> Self {
        Self { c: 1.0 }
    }

    /// `tanh(ħω / 2kT) = 1 / C`.
    pub fn tanh_epsilon(&self) -> f64 {
        1.0 / self.c
    }
}

/// Diffusion coefficients of the single-mode master equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeEnv {
    pub dxx: f64,
    pub dpp: f64,
    pub dxp: f64,
    pub lambda: f64,
    pub mu: f64,
    pub hbar: f64,
    /// The thermal `C` this environment was derived from, when it is the
    /// Gibbs environment. Enables the thermal constraint check.
    pub gibbs_c: Option<f64>,
}

/// Diffusion coefficients whose stationary state is the Gibbs state at the
/// given temperature.
pub fn gibbs_coefficients(
    params: &OscillatorParams,
    thermal: &ThermalParams,
) -> Result<SingleModeEnv> {
    params.validate()?;
    if params.lambda <= params.mu {
        return Err(param_err(format!(
            "Gibbs coefficients need lambda > mu, got lambda={} mu={}",
            params.lambda, params.mu
        )));
    }
    let OscillatorParams {
        m,
        omega,
        lambda,
        mu,
        hbar,
    } = *params;
    let c = thermal.c;
    Ok(SingleModeEnv {
        dxx: 0.5 * (lambda - mu) * hbar / (m * omega) * c,
        dpp: 0.5 * (lambda + mu) * hbar * m * omega * c,
        dxp: 0.0,
        lambda,
        mu,
        hbar,
        gibbs_c: Some(c),
    })
}

/// One inequality of a validation report. `slack` is `lhs − rhs`, so a
/// check passes when the slack is non-negative (up to tolerance).
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub slack: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn push(&mut self, name: impl Into<String>, slack: f64, tol: f64) {
        self.checks.push(Check {
            name: name.into(),
            passed: slack >= -tol,
            slack,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<44} slack = {:.6e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.slack
            )?;
        }
        Ok(())
    }
}

pub const CHECK_DXX_POSITIVE: &str = "Dxx > 0";
pub const CHECK_DPP_POSITIVE: &str = "Dpp > 0";
pub const CHECK_FUNDAMENTAL: &str = "Dxx*Dpp - Dxp^2 >= (lambda*hbar/2)^2";
pub const CHECK_GIBBS_THERMAL: &str = "(lambda^2 - mu^2)*C^2 >= lambda^2";
pub const CHECK_GRAM_PSD: &str = "environment Gram matrix is PSD";

/// Fundamental constraints on the single-mode diffusion coefficients, plus
/// the thermal constraint when the environment is of Gibbs type.
pub fn validate_single_mode(env: &SingleModeEnv) -> ValidationReport {
    let mut report = ValidationReport::default();
    report.push(CHECK_DXX_POSITIVE, env.dxx, 0.0);
    report.checks.last_mut().unwrap().passed = env.dxx > 0.0;
    report.push(CHECK_DPP_POSITIVE, env.dpp, 0.0);
    report.checks.last_mut().unwrap().passed = env.dpp > 0.0;

    let bound = 0.25 * env.lambda * env.lambda * env.hbar * env.hbar;
    let lhs = env.dxx * env.dpp - env.dxp * env.dxp;
    report.push(CHECK_FUNDAMENTAL, lhs - bound, 1e-12 * lhs.abs().max(bound));

    if let Some(c) = env.gibbs_c {
        let l2 = env.lambda * env.lambda;
        let lhs = (l2 - env.mu * env.mu) * c * c;
        report.push(CHECK_GIBBS_THERMAL, lhs - l2, 1e-12 * lhs.abs().max(l2));
        let ordered = env.lambda - env.mu;
        report.push("lambda > mu", ordered, 0.0);
        report.checks.last_mut().unwrap().passed = ordered > 0.0;
    }
    report
}

/// Diffusion coefficients and dissipation constant of two oscillators in a
/// common environment (`hbar = 1`).
///
/// Naming follows the covariance ordering `(x, p_x, y, p_y)`: `dxpy` couples
/// `x` with `p_y`, `dypx` couples `y` with `p_x`, and so on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeEnvironment {
    pub dxx: f64,
    pub dxpx: f64,
    pub dpxpx: f64,
    pub dyy: f64,
    pub dypy: f64,
    pub dpypy: f64,
    pub dxy: f64,
    pub dxpy: f64,
    pub dypx: f64,
    pub dpxpy: f64,
    pub lambda: f64,
}

/// The six independent coefficients of an environment whose two diagonal
/// blocks coincide and whose `Dxpy = Dypx`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymmetricCoefficients {
    pub dxx: f64,
    pub dxpx: f64,
    pub dpxpx: f64,
    pub dxy: f64,
    pub dxpy: f64,
    pub dpxpy: f64,
}

impl TwoModeEnvironment {
    pub fn symmetric(c: SymmetricCoefficients, lambda: f64) -> Self {
        Self {
            dxx: c.dxx,
            dxpx: c.dxpx,
            dpxpx: c.dpxpx,
            dyy: c.dxx,
            dypy: c.dxpx,
            dpypy: c.dpxpx,
            dxy: c.dxy,
            dxpy: c.dxpy,
            dypx: c.dxpy,
            dpxpy: c.dpxpy,
            lambda,
        }
    }

    /// Environment of the special family: `Dpxpx = m²ω²Dxx`, `Dxpx = 0`,
    /// `Dpxpy = m²ω²Dxy`, with both modes alike.
    pub fn special_family(dxx: f64, dxy: f64, dxpy: f64, m: f64, omega: f64, lambda: f64) -> Self {
        let k = m * m * omega * omega;
        Self::symmetric(
            SymmetricCoefficients {
                dxx,
                dxpx: 0.0,
                dpxpx: k * dxx,
                dxy,
                dxpy,
                dpxpy: k * dxy,
            },
            lambda,
        )
    }

    /// Relabels the oscillators, `x ↔ y` and `p_x ↔ p_y`.
    pub fn swapped(&self) -> Self {
        Self {
            dxx: self.dyy,
            dxpx: self.dypy,
            dpxpx: self.dpypy,
            dyy: self.dxx,
            dypy: self.dxpx,
            dpypy: self.dpxpx,
            dxy: self.dxy,
            dxpy: self.dypx,
            dypx: self.dxpy,
            dpxpy: self.dpxpy,
            lambda: self.lambda,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        close(self.dxx, self.dyy)
            && close(self.dxpx, self.dypy)
            && close(self.dpxpx, self.dpypy)
            && close(self.dxpy, self.dypx)
    }

    /// Symmetric coefficients, if the environment is symmetric.
    pub fn symmetric_coefficients(&self) -> Option<SymmetricCoefficients> {
        self.is_symmetric().then_some(SymmetricCoefficients {
            dxx: self.dxx,
            dxpx: self.dxpx,
            dpxpx: self.dpxpx,
            dxy: self.dxy,
            dxpy: self.dxpy,
            dpxpy: self.dpxpy,
        })
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        [
            self.dxx, self.dxpx, self.dpxpx, self.dyy, self.dypy, self.dpypy, self.dxy, self.dxpy,
            self.dypx, self.dpxpy,
        ]
        .iter()
        .fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Hermitian matrix of environment scalar products that complete
    /// positivity requires to be positive semidefinite (`hbar = 1`).
    pub fn gram_matrix(&self) -> Matrix4<Complex<f64>> {
        let r = |v: f64| Complex::new(v, 0.0);
        let h = 0.5 * self.lambda;
        Matrix4::new(
            r(self.dxx),
            Complex::new(-self.dxpx, -h),
            r(self.dxy),
            r(-self.dxpy),
            Complex::new(-self.dxpx, h),
            r(self.dpxpx),
            r(-self.dypx),
            r(self.dpxpy),
            r(self.dxy),
            r(-self.dypx),
            r(self.dyy),
            Complex::new(-self.dypy, -h),
            r(-self.dxpy),
            r(self.dpxpy),
            Complex::new(-self.dypy, h),
            r(self.dpypy),
        )
    }
}

/// Positivity of the environment Gram matrix and its six Cauchy–Schwarz
/// minors. The PSD check tolerates eigenvalues down to
/// `-1e-10 · max |entry|`.
pub fn validate_two_mode(env: &TwoModeEnvironment) -> ValidationReport {
    let mut report = ValidationReport::default();
    let gram = env.gram_matrix();
    let scale = gram.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
    let tol = 1e-10 * scale;
    let min_eig = gram
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &v| a.min(v));
    report.push(CHECK_GRAM_PSD, min_eig, tol);

    let quarter_l2 = 0.25 * env.lambda * env.lambda;
    let minors = [
        (
            "Dxx*Dyy - Dxy^2 >= 0",
            env.dxx * env.dyy - env.dxy * env.dxy,
        ),
        (
            "Dxx*Dpxpx - Dxpx^2 >= lambda^2/4",
            env.dxx * env.dpxpx - env.dxpx * env.dxpx - quarter_l2,
        ),
        (
            "Dxx*Dpypy - Dxpy^2 >= 0",
            env.dxx * env.dpypy - env.dxpy * env.dxpy,
        ),
        (
            "Dyy*Dpxpx - Dypx^2 >= 0",
            env.dyy * env.dpxpx - env.dypx * env.dypx,
        ),
        (
            "Dyy*Dpypy - Dypy^2 >= lambda^2/4",
            env.dyy * env.dpypy - env.dypy * env.dypy - quarter_l2,
        ),
        (
            "Dpxpx*Dpypy - Dpxpy^2 >= 0",
            env.dpxpx * env.dpypy - env.dpxpy * env.dpxpy,
        ),
    ];
    let minor_tol = 1e-10 * scale * scale;
    for (name, slack) in minors {
        report.push(name, slack, minor_tol);
    }
    report
}

/// Correlated coherent state with squeezing `delta` and position–momentum
/// correlation `r`. Its covariance determinant is exactly `ħ²/4`.
pub fn build_initial_state(
    delta: f64,
    r: f64,
    x0: f64,
    p0: f64,
    params: &OscillatorParams,
) -> Result<GaussianState1D> {
    params.validate()?;
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
    let OscillatorParams { m, omega, hbar, .. } = *params;
    let one_minus_r2 = 1.0 - r * r;
    Ok(GaussianState1D {
        mean_x: x0,
        mean_p: p0,
        sxx: hbar * delta / (2.0 * m * omega),
        spp: hbar * m * omega / (2.0 * delta * one_minus_r2),
        sxp: hbar * r / (2.0 * one_minus_r2.sqrt()),
    })
}
