//! The contact one-form of a germ in local coordinates and the contact
//! verdict at the base point.
//!
//! In the tube coordinates (x, t) with S(x, t) = P(x) cos t + Q(x) sin t,
//! the one-form dual to the circle direction is
//!
//! ```text
//! alpha = a_1 dx_1 + ... + a_2n dx_2n + dt,
//! a_j(x, t) = -<P, dQ/dx_j> sin^2 t + <Q, dP/dx_j> cos^2 t,
//! ```
//!
//! and at the base point its exterior derivative is the 2-form with
//! coefficients b_jk = d f_k / d x_j - d f_j / d x_k, the skew part of the
//! twisting matrix in the column convention A = (d f_k / d x_j). The
//! hyperplane field orthogonal to the circles is contact at the base point
//! iff `(d alpha)^n = n! Pf(B) dx_1 ^ ... ^ dx_2n` does not vanish, so the
//! whole verdict is the Pfaffian of B.

use nalgebra::Complex;

use crate::error::Result;
use crate::forms::{bivector_from_skew, factorial, pfaffian_via_bivector, AlternatingForm};
use crate::germ::{GermSpec, FD_STEP};
use crate::io::matrix_to_string;
use crate::matrix::{Matrix, SkewMatrix, COMBINATORIAL_MAX_DIM};

/// Base of the contact threshold: the verdict requires
/// `|Pf(B)| > CONTACT_TOL_BASE * max(1, max|B|^n)`, so the strict-inequality
/// question stays meaningful across germ scales.
pub const CONTACT_TOL_BASE: f64 = 1e-9;

/// Coefficients of the contact one-form at a point of the tube. The dt
/// coefficient is identically 1.
#[derive(Debug, Clone)]
pub struct AlphaCoefficients {
    pub dx: Vec<f64>,
    pub dt: f64,
}

/// `a_j(x, t) = -<P, Q_j> sin^2 t + <Q, P_j> cos^2 t`, with the partials
/// evaluated exactly through the polynomial tables.
pub fn alpha_coefficients(g: &GermSpec, x: &[f64], t: f64) -> Result<AlphaCoefficients> {
    let p = g.base_point(x)?;
    let q = g.quarter_point(x)?;
    let sin2 = t.sin() * t.sin();
    let cos2 = t.cos() * t.cos();
    let mut dx = Vec::with_capacity(2 * g.n());
    for j in 0..2 * g.n() {
        let pj = g.base_point_partial(x, j)?;
        let qj = g.quarter_point_partial(x, j)?;
        dx.push(-p.dot(&qj) * sin2 + q.dot(&pj) * cos2);
    }
    Ok(AlphaCoefficients { dx, dt: 1.0 })
}

/// The skew part `B = A - A^T` of the twisting data in the column
/// convention `A_jk = d f_k / d x_j`, i.e. `b_jk = d f_k / d x_j - d f_j /
/// d x_k` at the origin. Entries are exact differences of the polynomial
/// coefficients.
pub fn skew_part(g: &GermSpec) -> SkewMatrix {
    let m = g.twisting_matrix();
    let dim = 2 * g.n();
    SkewMatrix::from_fn(dim, |j, k| m[(k, j)] - m[(j, k)]).expect("even dimension")
}

/// `d alpha` at the base point, as the bivector of the skew part.
pub fn d_alpha_at_origin(g: &GermSpec) -> AlternatingForm {
    bivector_from_skew(&skew_part(g))
}

/// The coefficient of `(d alpha)^n` on dx_1 ^ ... ^ dx_2n at the base point;
/// zero exactly when the hyperplane field fails to be contact there. Equals
/// `n! Pf(B)`.
pub fn contact_defect(g: &GermSpec) -> f64 {
    let n = g.n() as u32;
    d_alpha_at_origin(g)
        .power(n)
        .and_then(|p| p.top_coefficient())
        .expect("degree-2 form on R^2n")
}

/// Pfaffian of the skew part by the exactly-cancelling routes: the
/// matching enumeration up to dim 8, the bivector power beyond.
fn pfaffian_of_skew_part(b: &SkewMatrix) -> f64 {
    if b.dim() <= COMBINATORIAL_MAX_DIM {
        b.pfaffian_combinatorial().expect("dim checked")
    } else {
        pfaffian_via_bivector(b)
    }
}

/// Full analysis of a germ: fibration verdict, contact verdict, and the
/// witnesses behind both.
#[derive(Debug, Clone)]
pub struct ContactReport {
    pub n: usize,
    /// The twisting matrix, entry (i, j) = d f_i / d x_j at 0.
    pub twisting: Matrix,
    /// Its spectrum, sorted by real then imaginary part.
    pub eigenvalues: Vec<Complex<f64>>,
    /// B = A - A^T in the column convention.
    pub skew_part: SkewMatrix,
    /// Pf(B).
    pub pfaffian_value: f64,
    /// n! * pfaffian_value, the top coefficient of (d alpha)^n.
    pub contact_defect: f64,
    pub is_local_fibration: bool,
    pub is_contact_at_origin: bool,
}

pub fn analyze(g: &GermSpec) -> Result<ContactReport> {
    let twisting = g.twisting_matrix();
    let eigenvalues = twisting.complex_eigenvalues()?;
    let is_local_fibration = !twisting.has_real_eigenvalue()?;
    let skew = skew_part(g);
    let pfaffian_value = pfaffian_of_skew_part(&skew);
    let defect = factorial(g.n()) * pfaffian_value;
    let scale = skew.max_abs().powi(g.n() as i32);
    let tol = CONTACT_TOL_BASE * scale.max(1.0);
    Ok(ContactReport {
        n: g.n(),
        twisting,
        eigenvalues,
        skew_part: skew,
        pfaffian_value,
        contact_defect: defect,
        is_local_fibration,
        is_contact_at_origin: pfaffian_value.abs() > tol,
    })
}

impl ContactReport {
    /// True for the phenomenon worth flagging: the circles fibre a tube, yet
    /// the orthogonal hyperplane field is not contact at the base point.
    pub fn is_noncontact_fibration(&self) -> bool {
        self.is_local_fibration && !self.is_contact_at_origin
    }

    /// Key/value rendering with the matrices in the shared text format.
    pub fn to_text(&self) -> String {
        use crate::io::fmt_f64;
        let mut out = String::new();
        out.push_str(&format!("n: {}\n", self.n));
        out.push_str(&format!("is_local_fibration: {}\n", self.is_local_fibration));
        out.push_str(&format!(
            "is_contact_at_origin: {}\n",
            self.is_contact_at_origin
        ));
        out.push_str(&format!(
            "pfaffian_value: {}\n",
            fmt_f64(self.pfaffian_value)
        ));
        out.push_str(&format!(
            "contact_defect: {}\n",
            fmt_f64(self.contact_defect)
        ));
        let eigs: Vec<String> = self
            .eigenvalues
            .iter()
            .map(|l| format!("({},{})", fmt_f64(l.re), fmt_f64(l.im)))
            .collect();
        out.push_str(&format!("eigenvalues: {}\n", eigs.join(" ")));
        if self.is_noncontact_fibration() {
            out.push_str(
                "result: local great-circle fibration whose orthogonal hyperplane field \
                 is NOT a contact structure at the base point\n",
            );
        } else if self.is_local_fibration {
            out.push_str(
                "result: local great-circle fibration with a contact orthogonal \
                 hyperplane field at the base point\n",
            );
        } else {
            out.push_str("result: not a fibration near the base circle\n");
        }
        out.push_str("twisting_matrix:\n");
        out.push_str(&matrix_to_string(&self.twisting));
        out.push_str("skew_part:\n");
        out.push_str(&matrix_to_string(&self.skew_part.to_matrix()));
        out
    }
}

/// Cross-validates the closed form of `d alpha` at the origin against
/// central differences of the alpha coefficients, returning the largest
/// discrepancy. The dx_j ^ dt components must vanish at t = 0 and are
/// included in the maximum.
pub fn d_alpha_fd_discrepancy(g: &GermSpec) -> Result<f64> {
    let dim = 2 * g.n();
    let closed = d_alpha_at_origin(g);
    let h = FD_STEP;
    let mut worst = 0.0f64;
    // d a / d x_j for all coefficients at once
    let mut partials = vec![vec![0.0; dim]; dim];
    let mut x = vec![0.0; dim];
    for j in 0..dim {
        x.fill(0.0);
        x[j] = h;
        let plus = alpha_coefficients(g, &x, 0.0)?;
        x[j] = -h;
        let minus = alpha_coefficients(g, &x, 0.0)?;
        for k in 0..dim {
            partials[j][k] = (plus.dx[k] - minus.dx[k]) / (2.0 * h);
        }
    }
    for j in 0..dim {
        for k in (j + 1)..dim {
            let fd = partials[j][k] - partials[k][j];
            let want = closed.coefficient(&[j + 1, k + 1]);
            worst = worst.max((fd - want).abs());
        }
    }
    // t-derivatives of the coefficients vanish at t = 0
    let origin = vec![0.0; dim];
    let plus = alpha_coefficients(g, &origin, h)?;
    let minus = alpha_coefficients(g, &origin, -h)?;
    for k in 0..dim {
        worst = worst.max(((plus.dx[k] - minus.dx[k]) / (2.0 * h)).abs());
    }
    Ok(worst)
}

/// Checks the shortcut one-form `alpha' = sum f_k dx_k + dt`: it equals dt
/// at x = 0, and its exterior derivative at the origin agrees with
/// `d alpha`. Both sides are computed from the polynomial tables through
/// different paths.
pub fn check_alpha_prime(g: &GermSpec) -> Result<bool> {
    let dim = 2 * g.n();
    let origin = vec![0.0; dim];
    // alpha' = dt at the origin
    for f in g.twist_functions() {
        if f.eval(&origin).abs() > 1e-10 {
            return Ok(false);
        }
    }
    // d alpha' from the symbolic partial derivatives of the twist functions
    let closed = d_alpha_at_origin(g);
    for j in 0..dim {
        for k in (j + 1)..dim {
            let dfk_dxj = g.twist_functions()[k].partial(j).eval(&origin);
            let dfj_dxk = g.twist_functions()[j].partial(k).eval(&origin);
            let prime = dfk_dxj - dfj_dxk;
            if (prime - closed.coefficient(&[j + 1, k + 1])).abs() > 1e-10 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
