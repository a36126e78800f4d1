//! Small dense linear-algebra helpers shared by the one- and two-mode code.

use nalgebra::{DMatrix, DVector, SMatrix};

use crate::error::{Error, Result};

/// Largest absolute entry.
pub fn max_abs<const R: usize, const C: usize>(m: &SMatrix<f64, R, C>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn symmetrize<const N: usize>(m: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    (m + m.transpose()) * 0.5
}

/// Solves `A X + X Aᵀ = Q` by vectorization.
///
/// With column-major `vec`, `vec(A X) = (I ⊗ A) vec X` and
/// `vec(X Aᵀ) = (A ⊗ I) vec X`, so the N²×N² system
/// `(I ⊗ A + A ⊗ I) vec X = vec Q` is assembled and solved by LU with full
/// pivoting. The system is nonsingular iff no two eigenvalues of `A` sum to
/// zero, which holds whenever `A` is Hurwitz.
pub fn solve_lyapunov<const N: usize>(
    a: &SMatrix<f64, N, N>,
    q: &SMatrix<f64, N, N>,
) -> Result<SMatrix<f64, N, N>> {
    let n2 = N * N;
    let mut k = DMatrix::<f64>::zeros(n2, n2);
    for col in 0..N {
        for row in 0..N {
            let eq = col * N + row;
            // (I ⊗ A): row-block `col`, acts on column `col` of X.
            for j in 0..N {
                k[(eq, col * N + j)] += a[(row, j)];
            }
            // (A ⊗ I): couples X[row, j] through A[col, j].
            for j in 0..N {
                k[(eq, j * N + row)] += a[(col, j)];
            }
        }
    }
    let rhs = DVector::from_iterator(n2, q.iter().copied());

    let lu = k.full_piv_lu();
    let diag = lu.u().diagonal();
    let (pmin, pmax) = diag.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), p| {
        (lo.min(p.abs()), hi.max(p.abs()))
    });
    if !(pmax > 0.0) || pmin <= 1e-13 * pmax {
        return Err(Error::SingularSystem(format!(
            "Kronecker operator pivots span [{pmin:e}, {pmax:e}]"
        )));
    }
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SingularSystem("LU solve failed".into()))?;
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem("non-finite solution".into()));
    }
    Ok(SMatrix::<f64, N, N>::from_iterator(sol.iter().copied()))
}

/// `max |A X + X Aᵀ − Q|`.
pub fn lyapunov_residual<const N: usize>(
    a: &SMatrix<f64, N, N>,
    x: &SMatrix<f64, N, N>,
    q: &SMatrix<f64, N, N>,
) -> f64 {
    max_abs(&(a * x + x * a.transpose() - q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Matrix3};

    #[test]
    fn solves_diagonal_case() {
        let a = Matrix2::new(-1.0, 0.0, 0.0, -2.0);
        let q = Matrix2::new(-2.0, 0.0, 0.0, -4.0);
        let x = solve_lyapunov(&a, &q).unwrap();
        assert!((x - Matrix2::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn nonsymmetric_drift_residual() {
        let a = Matrix3::new(-0.3, 1.0, 0.2, -1.5, -0.4, 0.0, 0.1, 0.3, -0.9);
        let q = Matrix3::new(-1.0, 0.2, 0.1, 0.2, -2.0, 0.3, 0.1, 0.3, -0.5);
        let x = solve_lyapunov(&a, &q).unwrap();
        assert!(lyapunov_residual(&a, &x, &q) < 1e-13);
        assert!((x - x.transpose()).abs().max() < 1e-13);
    }

    #[test]
    fn singular_operator_is_reported() {
        // eigenvalues +1 and -1 sum to zero
        let a = Matrix2::new(1.0, 0.0, 0.0, -1.0);
        let q = Matrix2::new(1.0, 0.0, 0.0, 1.0);
        assert!(matches!(
            solve_lyapunov(&a, &q),
            Err(Error::SingularSystem(_))
        ));
    }
}
