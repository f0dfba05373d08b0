use nalgebra::{Complex, Matrix2, Matrix2x4, Matrix4x2, RowVector2, Vector2, Vector4};

use crate::error::{invalid_arg, Error, Result};
use crate::model::QuadrotorParams;

/// Double-integrator altitude model with four identical motors.
///
/// `u = -k·[z, ż] + n·[h_ref, ḣ_ref]`, one row per motor.
#[derive(Debug, Clone, PartialEq)]
pub struct AltitudeDesign {
    pub a: Matrix2<f64>,
    pub b: Matrix2x4<f64>,
    pub k: Matrix4x2<f64>,
    pub n: Matrix4x2<f64>,
    pub poles: [f64; 2],
    pub target_height: f64,
}

impl AltitudeDesign {
    /// Places the closed-loop poles and picks `n` so that hovering at
    /// `target_height` is an equilibrium.
    pub fn new(params: &QuadrotorParams, poles: [f64; 2], target_height: f64) -> Result<Self> {
        if poles.iter().any(|p| !(p.is_finite() && *p < 0.0)) {
            return Err(Error::Design(format!(
                "poles must be negative, got [{}, {}]",
                poles[0], poles[1]
            )));
        }
        let a = Matrix2::new(0.0, 1.0, 0.0, 0.0);
        let inv_m = 1.0 / params.mass();
        let b = Matrix2x4::new(0.0, 0.0, 0.0, 0.0, inv_m, inv_m, inv_m, inv_m);
        let k = place_real_poles(&a, &equal_motor_input(params), poles)?;
        let n = chasing_gain(&k, params, target_height)?;
        Ok(Self {
            a,
            b,
            k,
            n,
            poles,
            target_height,
        })
    }

    /// Per-motor feedback row (all four rows are equal).
    pub fn k_row(&self) -> RowVector2<f64> {
        self.k.row(0).into_owned()
    }

    pub fn closed_loop_matrix(&self) -> Matrix2<f64> {
        self.a - self.b * self.k
    }

    /// Eigenvalues of `a - b·k`, from the characteristic quadratic.
    pub fn closed_loop_poles(&self) -> [Complex<f64>; 2] {
        eigenvalues_2x2(&self.closed_loop_matrix())
    }
}

/// Input column seen by the altitude states when all motors receive the
/// same command: `[0, 4/m]`.
pub fn equal_motor_input(params: &QuadrotorParams) -> Vector2<f64> {
    Vector2::new(0.0, 4.0 / params.mass())
}

/// Pole placement for a two-state, single-input pair by Ackermann's formula,
/// replicated onto all four motors.
///
/// Complex poles must come as a conjugate pair.
pub fn place_poles(
    a: &Matrix2<f64>,
    b_eff: &Vector2<f64>,
    poles: [Complex<f64>; 2],
) -> Result<Matrix4x2<f64>> {
    let [p1, p2] = poles;
    if poles.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
        return Err(Error::Design("poles must be finite".into()));
    }
    let conj_tol = 1e-12 * (1.0 + p1.norm());
    if (p1.im != 0.0 || p2.im != 0.0) && (p1 - p2.conj()).norm() > conj_tol {
        return Err(Error::Design("complex poles must form a conjugate pair".into()));
    }
    // (s - p1)(s - p2) = s² + c1·s + c0
    let c1 = -(p1 + p2).re;
    let c0 = (p1 * p2).re;

    let ctrb = Matrix2::from_columns(&[*b_eff, a * b_eff]);
    let scale = b_eff.norm() * (a * b_eff).norm().max(b_eff.norm());
    if scale == 0.0 || ctrb.determinant().abs() <= 1e-12 * scale {
        return Err(Error::Design("pair (a, b) is not controllable".into()));
    }
    let ctrb_inv = ctrb
        .try_inverse()
        .ok_or_else(|| Error::Design("controllability matrix is singular".into()))?;
    let char_poly_a = a * a + a * c1 + Matrix2::identity() * c0;
    let row = RowVector2::new(0.0, 1.0) * ctrb_inv * char_poly_a;
    Ok(Matrix4x2::from_rows(&[row, row, row, row]))
}

pub fn place_real_poles(a: &Matrix2<f64>, b_eff: &Vector2<f64>, poles: [f64; 2]) -> Result<Matrix4x2<f64>> {
    place_poles(a, b_eff, poles.map(|p| Complex::new(p, 0.0)))
}

/// Reference gain satisfying the chasing condition
/// `Σ n[j][0] = Σ k[j][0] + m·g/h`, split evenly over the motors; the
/// velocity column is fixed at 1.
pub fn chasing_gain(k: &Matrix4x2<f64>, params: &QuadrotorParams, h: f64) -> Result<Matrix4x2<f64>> {
    if !h.is_finite() || h == 0.0 {
        return Err(invalid_arg(
            "target_height",
            format!("must be finite and non-zero, got {h}"),
        ));
    }
    let col_sum: f64 = k.column(0).sum();
    let share = (col_sum + params.mass() * params.gravity() / h) / 4.0;
    let mut n = Matrix4x2::zeros();
    n.column_mut(0).fill(share);
    n.column_mut(1).fill(1.0);
    Ok(n)
}

/// Per-motor altitude thrust, `-k·q + n·r`.
pub fn altitude_control(estimate: &Vector2<f64>, reference: &Vector2<f64>, design: &AltitudeDesign) -> Vector4<f64> {
    -design.k * estimate + design.n * reference
}

fn eigenvalues_2x2(m: &Matrix2<f64>) -> [Complex<f64>; 2] {
    let tr = m.trace();
    let det = m.determinant();
    let disc = Complex::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let half = Complex::new(tr / 2.0, 0.0);
    [half + disc, half - disc]
}
