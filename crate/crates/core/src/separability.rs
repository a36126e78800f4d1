//! Separability of two-mode Gaussian states via Simon's form of the
//! partial-transposition criterion (`hbar = 1`).

use nalgebra::{Matrix2, Matrix4};
use rayon::prelude::*;

use crate::error::{param_err, Error, Result};
use crate::linalg::max_abs;
use crate::params::{validate_two_mode, OscillatorParams, TwoModeEnvironment};
use crate::two_mode::{asymptotic_closed_form, check_two_mode_params};

/// `|S|` below this is reported as the separability boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;
/// Distance from a window endpoint below which membership is undecided.
pub const WINDOW_MARGIN: f64 = 1e-9;

/// The symplectic form `J = [[0, 1], [−1, 0]]`.
fn symplectic() -> Matrix2<f64> {
    Matrix2::new(0.0, 1.0, -1.0, 0.0)
}

/// `σ = [[A, C], [Cᵀ, B]]` with `A`, `B` the one-mode blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDecomposition {
    pub a: Matrix2<f64>,
    pub b: Matrix2<f64>,
    pub c: Matrix2<f64>,
}

impl BlockDecomposition {
    pub fn reassemble(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.a);
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.b);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.c);
        m.fixed_view_mut::<2, 2>(2, 0)
            .copy_from(&self.c.transpose());
        m
    }

    /// Exchange of the two oscillators.
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            c: self.c.transpose(),
        }
    }
}

pub fn block_decompose(sigma: &Matrix4<f64>) -> Result<BlockDecomposition> {
    if max_abs(&(sigma - sigma.transpose())) > 1e-12 * max_abs(sigma).max(1.0) {
        return Err(Error::Shape("covariance matrix is not symmetric".into()));
    }
    Ok(BlockDecomposition {
        a: sigma.fixed_view::<2, 2>(0, 0).into_owned(),
        b: sigma.fixed_view::<2, 2>(2, 2).into_owned(),
        c: sigma.fixed_view::<2, 2>(0, 2).into_owned(),
    })
}

/// Simon's separability function from the blocks:
/// `det A det B + (1/4 − |det C|)² − Tr[AJCJBJCᵀJ] − (det A + det B)/4`.
pub fn simon_s_blocks(blocks: &BlockDecomposition) -> f64 {
    let BlockDecomposition { a, b, c } = blocks;
    let j = symplectic();
    let (da, db, dc) = (a.determinant(), b.determinant(), c.determinant());
    let q = 0.25 - dc.abs();
    let tr = (a * j * c * j * b * j * c.transpose() * j).trace();
    da * db + q * q - tr - 0.25 * (da + db)
}

/// Simon's separability function of a symmetric covariance matrix.
pub fn simon_s(sigma: &Matrix4<f64>) -> Result<f64> {
    Ok(simon_s_blocks(&block_decompose(sigma)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separability {
    Separable,
    /// `|S| < 1e-12`; separable by the `S ≥ 0` rule.
    Boundary,
    Entangled,
}

impl Separability {
    pub fn classify(s: f64) -> Self {
        if s.abs() < BOUNDARY_TOL {
            Separability::Boundary
        } else if s > 0.0 {
            Separability::Separable
        } else {
            Separability::Entangled
        }
    }

    pub fn is_separable(self) -> bool {
        self != Separability::Entangled
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Separability::Separable => "separable",
            Separability::Boundary => "boundary",
            Separability::Entangled => "entangled",
        }
    }
}

/// Separability class together with the value of `S`.
pub fn is_separable(sigma: &Matrix4<f64>) -> Result<(Separability, f64)> {
    let s = simon_s(sigma)?;
    Ok((Separability::classify(s), s))
}

fn is_special_family(env: &TwoModeEnvironment, params: &OscillatorParams) -> bool {
    let k = params.m * params.m * params.omega * params.omega;
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
    env.is_symmetric()
        && close(k * env.dxx, env.dpxpx)
        && env.dxpx.abs() <= 1e-12
        && close(k * env.dxy, env.dpxpy)
}

/// `S` of the stationary state for the special family
/// `m²ω²Dxx = Dpxpx`, `Dxpx = 0`, `m²ω²Dxy = Dpxpy`.
///
/// The reduction assumes `det C ≤ 0` for the stationary cross block; with
/// `det C > 0` it differs from [`simon_s`] by exactly `det C`.
pub fn simon_special(env: &TwoModeEnvironment, params: &OscillatorParams) -> Result<f64> {
    check_two_mode_params(params)?;
    if !is_special_family(env, params) {
        return Err(Error::Environment(
            "environment is outside the family m^2 w^2 Dxx = Dpxpx, Dxpx = 0, m^2 w^2 Dxy = Dpxpy"
                .into(),
        ));
    }
    let OscillatorParams {
        m,
        omega,
        lambda: l,
        ..
    } = *params;
    let k = m * m * omega * omega;
    let (l2, den) = (l * l, l * l + omega * omega);
    let inner = k * (env.dxx * env.dxx - env.dxy * env.dxy) / l2 + env.dxpy * env.dxpy / den - 0.25;
    Ok(inner * inner - 4.0 * k * env.dxx * env.dxx * env.dxpy * env.dxpy / (l2 * den))
}

/// Open interval of `Dxpy` for which the stationary state is entangled
/// (special family with `Dxy = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowMembership {
    Inside,
    Outside,
    /// Within the endpoint margin; the sign of `S` is not decided.
    Boundary,
}

impl WindowMembership {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowMembership::Inside => "inside",
            WindowMembership::Outside => "outside",
            WindowMembership::Boundary => "boundary",
        }
    }
}

impl Window {
    pub fn contains(&self, dxpy: f64) -> bool {
        self.lower < dxpy && dxpy < self.upper
    }

    pub fn membership(&self, dxpy: f64, margin: f64) -> WindowMembership {
        let tol = margin * self.upper.abs().max(1.0);
        if (dxpy - self.lower).abs() <= tol || (dxpy - self.upper).abs() <= tol {
            WindowMembership::Boundary
        } else if self.contains(dxpy) {
            WindowMembership::Inside
        } else {
            WindowMembership::Outside
        }
    }
}

/// `√(λ²+ω²)(mωDxx/λ − 1/2) < Dxpy < √(λ²+ω²)(mωDxx/λ + 1/2)`, defined when
/// `mωDxx/λ ≥ 1/2`.
pub fn entanglement_window(dxx: f64, params: &OscillatorParams) -> Result<Window> {
    check_two_mode_params(params)?;
    let ratio = params.m * params.omega * dxx / params.lambda;
    if ratio < 0.5 {
        return Err(param_err(format!(
            "m*omega*Dxx/lambda = {ratio} violates the one-mode uncertainty bound 1/2"
        )));
    }
    let scale = params.lambda.hypot(params.omega);
    Ok(Window {
        lower: scale * (ratio - 0.5),
        upper: scale * (ratio + 0.5),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanStatus {
    /// Physical environment.
    Ok,
    /// The environment Gram matrix is not PSD; `S` is still reported.
    Unphysical,
    /// `mωDxx/λ < 1/2`; no window exists.
    InvalidWindow,
}

impl ScanStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ScanStatus::Ok => "ok",
            ScanStatus::Unphysical => "unphysical",
            ScanStatus::InvalidWindow => "invalid-window",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub dxx: f64,
    pub dxpy: f64,
    pub s: f64,
    pub separability: Separability,
    /// `None` when `Dxy ≠ 0` or no window exists.
    pub in_window: Option<WindowMembership>,
    pub status: ScanStatus,
}

fn scan_point(params: &OscillatorParams, dxy: f64, dxx: f64, dxpy: f64) -> ScanRecord {
    let env =
        TwoModeEnvironment::special_family(dxx, dxy, dxpy, params.m, params.omega, params.lambda);
    let s = asymptotic_closed_form(&env, params)
        .and_then(|sigma| simon_s(sigma.matrix()))
        .unwrap_or(f64::NAN);
    let window = entanglement_window(dxx, params);
    let status = if window.is_err() {
        ScanStatus::InvalidWindow
    } else if !validate_two_mode(&env).all_passed() {
        ScanStatus::Unphysical
    } else {
        ScanStatus::Ok
    };
    let in_window = match window {
        Ok(w) if dxy == 0.0 => Some(w.membership(dxpy, WINDOW_MARGIN)),
        _ => None,
    };
    ScanRecord {
        dxx,
        dxpy,
        s,
        separability: Separability::classify(s),
        in_window,
        status,
    }
}

/// Evaluates the stationary `S` over a `Dxx × Dxpy` grid of special-family
/// environments. Records are row-major with `Dxx` the slow index.
pub fn scan_s(
    params: &OscillatorParams,
    dxy: f64,
    dxx_grid: &[f64],
    dxpy_grid: &[f64],
) -> Result<Vec<ScanRecord>> {
    check_two_mode_params(params)?;
    let nodes: Vec<(f64, f64)> = dxx_grid
        .iter()
        .flat_map(|&dxx| dxpy_grid.iter().map(move |&dxpy| (dxx, dxpy)))
        .collect();
    Ok(nodes
        .par_iter()
        .map(|&(dxx, dxpy)| scan_point(params, dxy, dxx, dxpy))
        .collect())
}
