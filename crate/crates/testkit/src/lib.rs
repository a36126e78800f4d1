//! Independent oracles and random generators for the test suites.
//!
//! Nothing here calls the library's numerical routines: the integrator,
//! matrix exponential and quadrature are written from scratch on top of
//! plain `nalgebra` arithmetic so they can cross-check the production paths.

use nalgebra::{Complex, DMatrix, Matrix4, SMatrix};
use opendeco::params::SymmetricCoefficients;
use opendeco::{OscillatorParams, ThermalParams, TwoModeEnvironment};
use rand::Rng;

/// Classical RK4 for `dσ/dt = Yσ + σYᵀ + 2D`.
fn rk4_run<const N: usize>(
    y: &SMatrix<f64, N, N>,
    d: &SMatrix<f64, N, N>,
    sigma0: &SMatrix<f64, N, N>,
    times: &[f64],
    h_max: f64,
) -> Vec<SMatrix<f64, N, N>> {
    let rhs = |s: &SMatrix<f64, N, N>| y * s + s * y.transpose() + d * 2.0;
    let mut out = Vec::with_capacity(times.len());
    let mut s = *sigma0;
    let mut t = 0.0;
    for &target in times {
        assert!(target >= t, "times must be non-decreasing");
        let span = target - t;
        let steps = (span / h_max).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        if span > 0.0 {
            for _ in 0..steps {
                let k1 = rhs(&s);
                let k2 = rhs(&(s + k1 * (0.5 * h)));
                let k3 = rhs(&(s + k2 * (0.5 * h)));
                let k4 = rhs(&(s + k3 * h));
                s += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            }
        }
        t = target;
        out.push(s);
    }
    out
}

fn max_rel_diff<const N: usize>(a: &[SMatrix<f64, N, N>], b: &[SMatrix<f64, N, N>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let scale = y.iter().fold(1e-300_f64, |m, v| m.max(v.abs()));
            (x - y).iter().fold(0.0_f64, |m, v| m.max(v.abs())) / scale
        })
        .fold(0.0, f64::max)
}

/// Integrates the covariance ODE on `times` with RK4, halving the step from
/// `h0` until two successive solutions agree to `1e-9` relative.
pub fn integrate_covariance<const N: usize>(
    y: &SMatrix<f64, N, N>,
    d: &SMatrix<f64, N, N>,
    sigma0: &SMatrix<f64, N, N>,
    times: &[f64],
    h0: f64,
) -> Vec<SMatrix<f64, N, N>> {
    let mut h = h0;
    let mut prev = rk4_run(y, d, sigma0, times, h);
    for _ in 0..8 {
        h *= 0.5;
        let next = rk4_run(y, d, sigma0, times, h);
        if max_rel_diff(&next, &prev) <= 1e-9 {
            return next;
        }
        prev = next;
    }
    panic!("RK4 oracle failed to converge");
}

fn norm1<const N: usize>(a: &SMatrix<f64, N, N>) -> f64 {
    (0..N)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with the degree-13 Padé
/// approximant (Higham 2005 coefficients and threshold).
pub fn expm_pade13<const N: usize>(a: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let norm = norm1(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * 2f64.powi(-s);
    let ident = SMatrix::<f64, N, N>::identity();
    let a2 = a * a;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let u_inner = a6 * (a6 * B[13] + a4 * B[11] + a2 * B[9])
        + a6 * B[7]
        + a4 * B[5]
        + a2 * B[3]
        + ident * B[1];
    let u = a * u_inner;
    let v = a6 * (a6 * B[12] + a4 * B[10] + a2 * B[8])
        + a6 * B[6]
        + a4 * B[4]
        + a2 * B[2]
        + ident * B[0];
    let p = v + u;
    let q = v - u;
    let qd = DMatrix::from_iterator(N, N, q.iter().copied());
    let pd = DMatrix::from_iterator(N, N, p.iter().copied());
    let rd = qd.lu().solve(&pd).expect("Padé denominator is singular");
    let mut r = SMatrix::<f64, N, N>::from_iterator(rd.iter().copied());
    for _ in 0..s {
        r = r * r;
    }
    r
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        m: f64,
        fm: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
}

/// Smallest eigenvalue of the environment Gram matrix, computed through the
/// real 8×8 embedding `[[Re, −Im], [Im, Re]]` (each eigenvalue doubled).
pub fn gram_min_eigenvalue(env: &TwoModeEnvironment) -> f64 {
    let g = env.gram_matrix();
    let mut big = SMatrix::<f64, 8, 8>::zeros();
    for i in 0..4 {
        for j in 0..4 {
            let z: Complex<f64> = g[(i, j)];
            big[(i, j)] = z.re;
            big[(i + 4, j + 4)] = z.re;
            big[(i, j + 4)] = -z.im;
            big[(i + 4, j)] = z.im;
        }
    }
    big.symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |a, &v| a.min(v))
}

/// Random single-mode parameters satisfying `λ > μ ≥ 0`, `ω > μ`, and the
/// thermal constraint `(λ² − μ²)C² ≥ λ²`.
#[derive(Debug, Clone, Copy)]
pub struct SingleModeDraw {
    pub params: OscillatorParams,
    pub thermal: ThermalParams,
    pub delta: f64,
    pub r: f64,
}

pub fn random_single_mode<R: Rng>(rng: &mut R, random_hbar: bool) -> SingleModeDraw {
    let m: f64 = rng.random_range(0.5..2.0);
    let omega: f64 = rng.random_range(0.5..2.0);
    let lambda: f64 = rng.random_range(0.05..0.5);
    let mu: f64 = rng.random_range(0.0..0.9) * lambda;
    let hbar = if random_hbar {
        rng.random_range(0.5..2.0)
    } else {
        1.0
    };
    let c_min = lambda / (lambda * lambda - mu * mu).sqrt();
    let c = c_min + rng.random_range(0.0..10.0);
    SingleModeDraw {
        params: OscillatorParams::new(m, omega, lambda, mu).with_hbar(hbar),
        thermal: ThermalParams::new(c).unwrap(),
        delta: rng.random_range(0.2..5.0),
        r: rng.random_range(-0.9..0.9),
    }
}

/// Random two-mode oscillator parameters (`hbar = 1`, `μ = 0`). The ranges
/// keep stationary covariances of order ten at most, so quartic quantities
/// such as the Simon function stay well inside double precision.
pub fn random_two_mode_params<R: Rng>(rng: &mut R) -> OscillatorParams {
    OscillatorParams::new(
        rng.random_range(0.7..1.4),
        rng.random_range(0.7..1.4),
        rng.random_range(0.2..1.0),
        0.0,
    )
}

/// Shifts the diagonal by `t·(1, k, 1, k)` until the Gram matrix is PSD with
/// a random positive margin. Cross and mixed coefficients are untouched.
fn make_physical<R: Rng>(rng: &mut R, mut env: TwoModeEnvironment, k: f64) -> TwoModeEnvironment {
    let margin = rng.random_range(1e-3..0.3);
    let min_eig = gram_min_eigenvalue(&env);
    if min_eig < margin {
        let t = (margin - min_eig) / k.min(1.0);
        env.dxx += t;
        env.dyy += t;
        env.dpxpx += k * t;
        env.dpypy += k * t;
    }
    assert!(gram_min_eigenvalue(&env) >= margin * 0.999);
    env
}

/// A random symmetric environment whose Gram matrix is PSD.
pub fn random_valid_symmetric_env<R: Rng>(rng: &mut R, lambda: f64) -> TwoModeEnvironment {
    let c = SymmetricCoefficients {
        dxx: rng.random_range(0.0..1.5),
        dxpx: rng.random_range(-0.5..0.5),
        dpxpx: rng.random_range(0.0..1.5),
        dxy: rng.random_range(-0.8..0.8),
        dxpy: rng.random_range(-0.8..0.8),
        dpxpy: rng.random_range(-0.8..0.8),
    };
    make_physical(rng, TwoModeEnvironment::symmetric(c, lambda), 1.0)
}

/// Stationary cross-block determinant of a special-family environment,
/// `(k·Dxy²(λ² + ω²) − λ²Dxpy²) / (λ²(λ² + ω²))` with `k = m²ω²`.
pub fn special_family_det_c(dxy: f64, dxpy: f64, params: &OscillatorParams) -> f64 {
    let k = params.m * params.m * params.omega * params.omega;
    let l2 = params.lambda * params.lambda;
    let den = l2 + params.omega * params.omega;
    (k * dxy * dxy * den - l2 * dxpy * dxpy) / (l2 * den)
}

/// A random physical special-family environment with stationary `det C ≤ 0`.
pub fn random_special_env<R: Rng>(rng: &mut R, params: &OscillatorParams) -> TwoModeEnvironment {
    let k = params.m * params.m * params.omega * params.omega;
    loop {
        let dxy = rng.random_range(-0.5..0.5);
        let dxpy = rng.random_range(-1.5..1.5);
        if special_family_det_c(dxy, dxpy, params) > 0.0 {
            continue;
        }
        let dxx = rng.random_range(0.0..1.5);
        let env = TwoModeEnvironment::special_family(
            dxx,
            dxy,
            dxpy,
            params.m,
            params.omega,
            params.lambda,
        );
        return make_physical(rng, env, k);
    }
}

/// Max-abs entrywise distance.
pub fn max_abs_diff(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
    (a - b).iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
