//! Continuous-time algebraic Riccati equation
//!
//! `Aᵀ X + X A − X B R⁻¹ Bᵀ X + Q = 0`
//!
//! Two independent solvers:
//! - [`solve_care`]: stable invariant subspace of the Hamiltonian, found
//!   through the matrix sign function (scaled Newton iteration).
//! - [`solve_care_newton_kleinman`]: Kleinman's iteration of Lyapunov
//!   solves, started from a Bass stabilising gain.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const SIGN_MAX_ITER: usize = 100;
const NK_MAX_ITER: usize = 100;

fn check_shapes(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    let m = b.ncols();
    if a.ncols() != n || b.nrows() != n || q.shape() != (n, n) || r.shape() != (m, m) {
        return Err(Error::Design(format!(
            "CARE shape mismatch: A {:?}, B {:?}, Q {:?}, R {:?}",
            a.shape(),
            b.shape(),
            q.shape(),
            r.shape()
        )));
    }
    Ok(())
}

fn spd_inverse(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    r.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| Error::Design("R must be symmetric positive definite".into()))
}

fn symmetrize(x: &DMatrix<f64>) -> DMatrix<f64> {
    (x + x.transpose()) * 0.5
}

/// `Aᵀ X + X A − X B R⁻¹ Bᵀ X + Q`.
pub fn care_residual(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    x: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    check_shapes(a, b, q, r)?;
    let s = b * spd_inverse(r)? * b.transpose();
    Ok(a.transpose() * x + x * a - x * s * x + q)
}

/// Hamiltonian/sign-function solver. Returns the stabilising solution.
pub fn solve_care(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_shapes(a, b, q, r)?;
    let n = a.nrows();
    let s = b * spd_inverse(r)? * b.transpose();

    // Solve for X / alpha, which balances the two off-diagonal blocks.
    let (s_norm, q_norm) = (s.norm(), q.norm());
    let alpha = if s_norm > 0.0 && q_norm > 0.0 {
        (q_norm / s_norm).sqrt()
    } else {
        1.0
    };
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, 0), (n, n)).copy_from(a);
    h.view_mut((0, n), (n, n)).copy_from(&(-&s * alpha));
    h.view_mut((n, 0), (n, n)).copy_from(&(-q / alpha));
    h.view_mut((n, n), (n, n)).copy_from(&(-a.transpose()));

    let w = matrix_sign(h)?;
    // Columns of [I; X] span the stable subspace, where sign(H) = -I:
    // [W12; W22 + I] X = -[W11 + I; W21].
    let eye = DMatrix::<f64>::identity(n, n);
    let mut lhs = DMatrix::zeros(2 * n, n);
    lhs.view_mut((0, 0), (n, n)).copy_from(&w.view((0, n), (n, n)));
    lhs.view_mut((n, 0), (n, n)).copy_from(&(w.view((n, n), (n, n)) + &eye));
    let mut rhs = DMatrix::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).copy_from(&(-(w.view((0, 0), (n, n)) + &eye)));
    rhs.view_mut((n, 0), (n, n)).copy_from(&(-w.view((n, 0), (n, n))));

    let x = lhs
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::Design(format!("stable subspace solve failed: {e}")))?;
    let x = symmetrize(&x) * alpha;
    check_stabilizing(a, &s, &x)?;
    Ok(x)
}

/// Newton–Kleinman iteration. `k0` must stabilise `A − B·k0`; when absent
/// a Bass gain is used.
pub fn solve_care_newton_kleinman(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    q: &DMatrix<f64>,
    r: &DMatrix<f64>,
    k0: Option<DMatrix<f64>>,
    tol: f64,
) -> Result<DMatrix<f64>> {
    check_shapes(a, b, q, r)?;
    let r_inv = spd_inverse(r)?;
    let mut k = match k0 {
        Some(k) => k,
        None => bass_gain(a, b)?,
    };
    if !is_hurwitz(&(a - b * &k)) {
        return Err(Error::Design("initial gain does not stabilise A - B K".into()));
    }
    let mut x_prev: Option<DMatrix<f64>> = None;
    for _ in 0..NK_MAX_ITER {
        let f = a - b * &k;
        let x = symmetrize(&lyapunov(&f, &(q + k.transpose() * r * &k))?);
        if let Some(prev) = &x_prev {
            if (&x - prev).amax() <= tol * x.amax().max(1.0) {
                return Ok(x);
            }
        }
        k = &r_inv * b.transpose() * &x;
        x_prev = Some(x);
    }
    Err(Error::Design("Newton-Kleinman iteration did not converge".into()))
}

/// Solves `Fᵀ X + X F + M = 0` through the Kronecker form.
pub fn lyapunov(f: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = f.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let ft = f.transpose();
    let big = eye.kronecker(&ft) + ft.kronecker(&eye);
    let rhs = DMatrix::from_column_slice(n * n, 1, (-m).as_slice());
    let sol = big
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Design("Lyapunov operator is singular".into()))?;
    Ok(DMatrix::from_column_slice(n, n, sol.as_slice()))
}

/// Gain with `A − B K` Hurwitz: `K = Bᵀ Z⁻¹` where
/// `(A + βI) Z + Z (A + βI)ᵀ = 2 B Bᵀ` and `−(A + βI)` is stable.
fn bass_gain(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let beta = a.norm() + 1.0;
    let shifted = a + DMatrix::<f64>::identity(n, n) * beta;
    // lyapunov() solves Fᵀ Z + Z F + M = 0; take F = -(A + βI)ᵀ, M = 2 B Bᵀ.
    let z = lyapunov(&(-shifted.transpose()), &(b * b.transpose() * 2.0))?;
    let z_inv = z
        .try_inverse()
        .ok_or_else(|| Error::Design("pair (A, B) is not stabilisable".into()))?;
    Ok(b.transpose() * z_inv)
}

fn matrix_sign(mut z: DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = z.nrows() as f64;
    for _ in 0..SIGN_MAX_ITER {
        let det = z.determinant();
        if !det.is_finite() || det == 0.0 {
            return Err(Error::Design(
                "Hamiltonian has eigenvalues on the imaginary axis".into(),
            ));
        }
        let inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Design("sign iteration hit a singular matrix".into()))?;
        let c = det.abs().powf(1.0 / n);
        let next = (&z / c + inv * c) * 0.5;
        let delta = (&next - &z).norm();
        let done = delta <= 1e-14 * next.norm();
        z = next;
        if done {
            return Ok(z);
        }
    }
    Err(Error::Design("matrix sign iteration did not converge".into()))
}

fn is_hurwitz(m: &DMatrix<f64>) -> bool {
    m.complex_eigenvalues().iter().all(|e| e.re < 0.0)
}

fn check_stabilizing(a: &DMatrix<f64>, s: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) || !is_hurwitz(&(a - s * x)) {
        return Err(Error::Design("no stabilising Riccati solution".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dm(r: usize, c: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(r, c, v)
    }

    #[test]
    fn scalar_closed_form() {
        // 2 a x - x² b²/r + q = 0  =>  x = r (a + sqrt(a² + b² q / r)) / b².
        let (a, b, q, r): (f64, f64, f64, f64) = (0.7, 1.3, 2.0, 0.5);
        let expected = r * (a + (a * a + b * b * q / r).sqrt()) / (b * b);
        let x = solve_care(&dm(1, 1, &[a]), &dm(1, 1, &[b]), &dm(1, 1, &[q]), &dm(1, 1, &[r])).unwrap();
        assert!((x[(0, 0)] - expected).abs() < 1e-12);
    }

    #[test]
    fn double_integrator_lqr() {
        // Known solution for A = [[0,1],[0,0]], B = [0;1], Q = I, R = 1:
        // X = [[√3, 1], [1, √3]].
        let a = dm(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = dm(2, 1, &[0.0, 1.0]);
        let q = DMatrix::identity(2, 2);
        let r = dm(1, 1, &[1.0]);
        let s3 = 3f64.sqrt();
        let want = dm(2, 2, &[s3, 1.0, 1.0, s3]);
        let x1 = solve_care(&a, &b, &q, &r).unwrap();
        let x2 = solve_care_newton_kleinman(&a, &b, &q, &r, None, 1e-14).unwrap();
        assert!((&x1 - &want).amax() < 1e-12);
        assert!((&x2 - &want).amax() < 1e-12);
        assert!(care_residual(&a, &b, &q, &r, &x1).unwrap().amax() < 1e-12);
    }

    #[test]
    fn lyapunov_solution_satisfies_equation() {
        let f = dm(3, 3, &[-1.0, 2.0, 0.0, 0.0, -3.0, 1.0, 0.5, 0.0, -2.0]);
        let m = dm(3, 3, &[2.0, 0.1, 0.0, 0.1, 1.0, 0.3, 0.0, 0.3, 4.0]);
        let x = lyapunov(&f, &m).unwrap();
        assert!((f.transpose() * &x + &x * &f + &m).amax() < 1e-12);
    }

    #[test]
    fn rejects_bad_r_and_shapes() {
        let a = dm(1, 1, &[0.0]);
        let b = dm(1, 1, &[1.0]);
        let q = dm(1, 1, &[1.0]);
        assert!(solve_care(&a, &b, &q, &dm(1, 1, &[0.0])).is_err());
        assert!(solve_care(&a, &b, &q, &dm(2, 2, &[1.0, 0.0, 0.0, 1.0])).is_err());
    }

    #[test]
    fn undetectable_unstable_mode_has_no_solution() {
        // Unstable mode neither controllable nor penalised.
        let a = dm(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = dm(2, 1, &[0.0, 1.0]);
        let q = dm(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let r = dm(1, 1, &[1.0]);
        assert!(solve_care(&a, &b, &q, &r).is_err());
        assert!(solve_care_newton_kleinman(&a, &b, &q, &r, None, 1e-12).is_err());
    }
}
