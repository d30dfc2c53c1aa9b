//! Germs of great-circle families around a base circle.
//!
//! The base circle passes through U1 = e_1 and U2 = e_2 in R^(2n+2). Points
//! of a small ball around U1 on the orthogonal great 2n-sphere are
//!
//! ```text
//! P(x) = (sqrt(1 - |x|^2), 0, x_1, ..., x_2n),   |x| <= eps,
//! ```
//!
//! and the germ assigns to each of them the circle through P(x) and
//!
//! ```text
//! Q(x) = h(x) U2 + f_1(x) V_1(x) + ... + f_2n(x) V_2n(x),
//! ```
//!
//! where V_k(x) is the frame parallel-transported from the origin along the
//! geodesic, the twist functions f_k are polynomials vanishing at 0, and
//! h = sqrt(1 - sum f_k^2). The family fibres a tube around the base circle
//! exactly when the twisting matrix (d f_i / d x_j at 0) has no real
//! eigenvalues.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::poly::Polynomial;
use crate::scalar::Scalar;

/// Step used whenever a derivative is approximated by central differences.
pub const FD_STEP: f64 = 1e-4;

/// Default chart radius of the named germ families.
pub const DEFAULT_RADIUS: Scalar = Scalar::Rational { num: 1, den: 10 };

/// Number of quasi-random ball samples used to certify `sum f_i^2 < 1`.
const VALIDATION_SAMPLES: usize = 1000;

/// Twisting data for a candidate great-circle family: 2n polynomial twist
/// functions vanishing at the origin and a chart radius.
///
/// Construction validates the data: `f_i(0) = 0` exactly, and
/// `sum f_i(x)^2 < 1` on a dense deterministic sample of the ball so that
/// h stays real.
#[derive(Debug, Clone)]
pub struct GermSpec {
    n: usize,
    twist: Vec<Polynomial>,
    domain_radius: Scalar,
}

impl GermSpec {
    pub fn new(n: usize, twist: Vec<Polynomial>, domain_radius: Scalar) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGerm("n must be positive".into()));
        }
        if twist.len() != 2 * n {
            return Err(Error::InvalidGerm(format!(
                "expected 2n = {} twist functions, got {}",
                2 * n,
                twist.len()
            )));
        }
        if let Some(f) = twist.iter().find(|f| f.vars() != 2 * n) {
            return Err(Error::InvalidGerm(format!(
                "twist function in {} variables, expected {}",
                f.vars(),
                2 * n
            )));
        }
        if twist.iter().any(|f| !f.constant_term().is_zero()) {
            return Err(Error::InvalidGerm(
                "twist functions must vanish at the origin".into(),
            ));
        }
        let eps = domain_radius.as_f64();
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidGerm(format!(
                "domain radius must lie in (0, 1), got {eps}"
            )));
        }
        let germ = GermSpec {
            n,
            twist,
            domain_radius,
        };
        germ.check_h_real()?;
        Ok(germ)
    }

    /// Rejects the radius if `sum f_i^2 >= 1` at any probe point: the axis
    /// extremes plus a Halton sample of the ball.
    fn check_h_real(&self) -> Result<()> {
        let dim = 2 * self.n;
        let eps = self.domain_radius.as_f64();
        let probe = |x: &[f64]| -> Result<()> {
            let s: f64 = self.twist.iter().map(|f| f.eval(x)).map(|v| v * v).sum();
            if s >= 1.0 {
                return Err(Error::InvalidGerm(format!(
                    "sum of squared twist functions reaches {s:.3} >= 1 inside the ball \
                     of radius {eps}; shrink the radius"
                )));
            }
            Ok(())
        };
        let mut x = vec![0.0; dim];
        probe(&x)?;
        for j in 0..dim {
            for sign in [-1.0, 1.0] {
                x.fill(0.0);
                x[j] = sign * eps;
                probe(&x)?;
            }
        }
        let mut kept = 0usize;
        let mut index = 0u64;
        while kept < VALIDATION_SAMPLES {
            index += 1;
            if index > 20_000_000 {
                break;
            }
            let mut norm2 = 0.0;
            for (j, xj) in x.iter_mut().enumerate() {
                *xj = (2.0 * radical_inverse(PRIMES[j % PRIMES.len()], index) - 1.0) * eps;
                norm2 += *xj * *xj;
            }
            if norm2 <= eps * eps {
                kept += 1;
                probe(&x)?;
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Ambient dimension 2n+2 of the sphere's space.
    pub fn ambient_dim(&self) -> usize {
        2 * self.n + 2
    }

    pub fn twist_functions(&self) -> &[Polynomial] {
        &self.twist
    }

    pub fn domain_radius(&self) -> Scalar {
        self.domain_radius
    }

    pub fn radius(&self) -> f64 {
        self.domain_radius.as_f64()
    }

    fn check_coords(&self, x: &[f64]) -> Result<()> {
        if x.len() != 2 * self.n {
            return Err(Error::dimension(format!(
                "expected {} ball coordinates, got {}",
                2 * self.n,
                x.len()
            )));
        }
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        if norm2 >= 1.0 {
            return Err(Error::Domain(format!(
                "|x| = {:.6} is outside the unit chart",
                norm2.sqrt()
            )));
        }
        Ok(())
    }

    /// `P(x) = (sqrt(1 - |x|^2), 0, x_1, ..., x_2n)`.
    pub fn base_point(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_coords(x)?;
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let mut p = DVector::zeros(self.ambient_dim());
        p[0] = (1.0 - norm2).sqrt();
        for (k, &xk) in x.iter().enumerate() {
            p[k + 2] = xk;
        }
        Ok(p)
    }

    /// `d P / d x_j` at x.
    pub fn base_point_partial(&self, x: &[f64], j: usize) -> Result<DVector<f64>> {
        self.check_coords(x)?;
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        let mut p = DVector::zeros(self.ambient_dim());
        p[0] = -x[j] / (1.0 - norm2).sqrt();
        p[j + 2] = 1.0;
        Ok(p)
    }

    /// The frame at P(x) obtained by parallel transport along the geodesic
    /// from the origin: U1(x) = P(x), U2 constant, and
    /// `V_j(x) = V_j + <V_j, w>((cos theta - 1) w - sin theta U1)` with
    /// theta = arcsin |x| and w the unit radial direction.
    pub fn frame_at(&self, x: &[f64]) -> Result<Frame> {
        self.check_coords(x)?;
        let dim = self.ambient_dim();
        let s: f64 = x.iter().map(|v| v * v).sum();
        let g = transport_g(s);
        let mut vectors = Vec::with_capacity(dim);
        vectors.push(self.base_point(x)?);
        let mut u2 = DVector::zeros(dim);
        u2[1] = 1.0;
        vectors.push(u2);
        for i in 0..2 * self.n {
            // V_i(x) = V_i - x_i U1 + g(s) x_i sum_k x_k V_k
            let mut v = DVector::zeros(dim);
            v[0] = -x[i];
            for k in 0..2 * self.n {
                v[k + 2] = g * x[i] * x[k];
            }
            v[i + 2] += 1.0;
            vectors.push(v);
        }
        Ok(Frame {
            x: x.to_vec(),
            vectors,
        })
    }

    /// Values of the twist functions at x.
    pub fn twist_values(&self, x: &[f64]) -> Vec<f64> {
        self.twist.iter().map(|f| f.eval(x)).collect()
    }

    /// The point a quarter turn along the circle through P(x):
    /// `Q(x) = h(x) U2 + sum_i f_i(x) V_i(x)` with `h = sqrt(1 - sum f_i^2)`.
    pub fn quarter_point(&self, x: &[f64]) -> Result<DVector<f64>> {
        self.check_coords(x)?;
        let f = self.twist_values(x);
        let sq: f64 = f.iter().map(|v| v * v).sum();
        if sq >= 1.0 {
            return Err(Error::InvalidGerm(format!(
                "sum of squared twist functions reaches {sq:.6} >= 1 at this point"
            )));
        }
        let s: f64 = x.iter().map(|v| v * v).sum();
        let g = transport_g(s);
        let fx: f64 = f.iter().zip(x).map(|(fi, xi)| fi * xi).sum();
        let mut q = DVector::zeros(self.ambient_dim());
        q[0] = -fx;
        q[1] = (1.0 - sq).sqrt();
        for k in 0..2 * self.n {
            q[k + 2] = f[k] + g * fx * x[k];
        }
        Ok(q)
    }

    /// `d Q / d x_j` at x, by exact chain rule through the polynomial
    /// partials and the closed-form frame transport.
    pub fn quarter_point_partial(&self, x: &[f64], j: usize) -> Result<DVector<f64>> {
        self.check_coords(x)?;
        let two_n = 2 * self.n;
        let f = self.twist_values(x);
        let fj: Vec<f64> = self.twist.iter().map(|p| p.partial(j).eval(x)).collect();
        let sq: f64 = f.iter().map(|v| v * v).sum();
        if sq >= 1.0 {
            return Err(Error::InvalidGerm(
                "sum of squared twist functions reaches 1".into(),
            ));
        }
        let h = (1.0 - sq).sqrt();
        let h_j = -f.iter().zip(&fj).map(|(a, b)| a * b).sum::<f64>() / h;
        let s: f64 = x.iter().map(|v| v * v).sum();
        let g = transport_g(s);
        let gp = transport_g_prime(s);
        let fx: f64 = f.iter().zip(x).map(|(fi, xi)| fi * xi).sum();
        // d(fx)/dx_j
        let fx_j: f64 = fj.iter().zip(x).map(|(d, xi)| d * xi).sum::<f64>() + f[j];
        let mut q = DVector::zeros(self.ambient_dim());
        q[0] = -fx_j;
        q[1] = h_j;
        for k in 0..two_n {
            q[k + 2] = fj[k] + x[k] * (g * fx_j + 2.0 * gp * x[j] * fx);
        }
        q[j + 2] += g * fx;
        Ok(q)
    }

    /// `S(x, t) = P(x) cos t + Q(x) sin t`.
    pub fn circle_point(&self, x: &[f64], t: f64) -> Result<DVector<f64>> {
        let p = self.base_point(x)?;
        let q = self.quarter_point(x)?;
        Ok(p * t.cos() + q * t.sin())
    }

    /// The twisting matrix, entry (i, j) = d f_i / d x_j at 0, read exactly
    /// from the polynomial coefficients.
    pub fn twisting_matrix(&self) -> Matrix {
        let dim = 2 * self.n;
        let mut m = Matrix::zeros(dim, dim);
        for (i, f) in self.twist.iter().enumerate() {
            for j in 0..dim {
                m[(i, j)] = f.linear_coefficient(j).as_f64();
            }
        }
        m
    }

    /// The twisting matrix by central differences of the twist functions, a
    /// cross-check of the coefficient read.
    pub fn twisting_matrix_fd(&self) -> Matrix {
        let dim = 2 * self.n;
        let mut m = Matrix::zeros(dim, dim);
        let mut plus = vec![0.0; dim];
        let mut minus = vec![0.0; dim];
        for j in 0..dim {
            plus.fill(0.0);
            minus.fill(0.0);
            plus[j] = FD_STEP;
            minus[j] = -FD_STEP;
            for (i, f) in self.twist.iter().enumerate() {
                m[(i, j)] = (f.eval(&plus) - f.eval(&minus)) / (2.0 * FD_STEP);
            }
        }
        m
    }

    /// The family fibres a tube around the base circle iff the twisting
    /// matrix has no real eigenvalues.
    pub fn is_local_fibration(&self) -> Result<bool> {
        Ok(!self.twisting_matrix().has_real_eigenvalue()?)
    }

    /// Minimum ambient distance between the circles through x1 and x2,
    /// by a 64x64 grid over both circle parameters followed by 20 rounds of
    /// coordinate descent with shrinking step. Deterministic.
    pub fn circle_min_distance(&self, x1: &[f64], x2: &[f64]) -> Result<f64> {
        let p1 = self.base_point(x1)?;
        let q1 = self.quarter_point(x1)?;
        let p2 = self.base_point(x2)?;
        let q2 = self.quarter_point(x2)?;
        // <S1(t), S2(u)> in terms of the four pairings
        let pp = p1.dot(&p2);
        let pq = p1.dot(&q2);
        let qp = q1.dot(&p2);
        let qq = q1.dot(&q2);
        let cosine = |t: f64, u: f64| {
            let (st, ct) = t.sin_cos();
            let (su, cu) = u.sin_cos();
            ct * cu * pp + ct * su * pq + st * cu * qp + st * su * qq
        };
        let cells = 64usize;
        let step = std::f64::consts::TAU / cells as f64;
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..cells {
            for j in 0..cells {
                let t = i as f64 * step;
                let u = j as f64 * step;
                let c = cosine(t, u);
                if c > best.0 {
                    best = (c, t, u);
                }
            }
        }
        let (mut c, mut t, mut u) = best;
        let mut delta = step;
        for _ in 0..20 {
            let mut improved = false;
            for (dt, du) in [(delta, 0.0), (-delta, 0.0), (0.0, delta), (0.0, -delta)] {
                let cand = cosine(t + dt, u + du);
                if cand > c {
                    c = cand;
                    t += dt;
                    u += du;
                    improved = true;
                }
            }
            if !improved {
                delta *= 0.5;
            }
        }
        Ok((2.0 - 2.0 * c).max(0.0).sqrt())
    }
}

/// The parallel-transported frame at a ball point: `vectors[0] = P(x)`,
/// `vectors[1] = U2`, then `V_1(x), ..., V_2n(x)`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub x: Vec<f64>,
    pub vectors: Vec<DVector<f64>>,
}

impl Frame {
    /// Largest deviation from pairwise orthonormality.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - want).abs());
            }
        }
        worst
    }
}

/// `(sqrt(1-s) - 1)/s`, the radial transport coefficient, with a series
/// branch near 0 where the direct form cancels catastrophically.
fn transport_g(s: f64) -> f64 {
    if s < 1e-4 {
        -0.5 - s / 8.0 - s * s / 16.0 - 5.0 * s * s * s / 128.0
    } else {
        ((1.0 - s).sqrt() - 1.0) / s
    }
}

fn transport_g_prime(s: f64) -> f64 {
    if s < 1e-4 {
        -0.125 - s / 8.0 - 15.0 * s * s / 128.0
    } else {
        let r = (1.0 - s).sqrt();
        (-s / (2.0 * r) - (r - 1.0)) / (s * s)
    }
}

/// The Hopf germ: circles cut out by complex lines. Twist functions are the
/// linear forms with matrix blockdiag([[0,-1],[1,0]], ...), so that the
/// quarter point is complex multiplication: Q(x) = J P(x).
pub fn hopf_germ(n: usize) -> Result<GermSpec> {
    if n == 0 {
        return Err(Error::Unsupported("hopf germ needs n >= 1".into()));
    }
    let dim = 2 * n;
    let mut twist = Vec::with_capacity(dim);
    for m in 0..n {
        twist.push(Polynomial::linear_term(
            dim,
            2 * m + 1,
            Scalar::integer(-1),
        )?);
        twist.push(Polynomial::linear_term(dim, 2 * m, Scalar::integer(1))?);
    }
    GermSpec::new(n, twist, DEFAULT_RADIUS)
}

/// The germ family with an imaginary-spectrum twisting matrix whose skew
/// part is singular: rotation-by-1/2 blocks down the diagonal plus an
/// identity coupling block. Its circles fibre a tube around the base circle,
/// yet the orthogonal hyperplane field is not contact at the base point.
/// There is no such germ for n = 1, where an imaginary spectrum forces the
/// skew part to be nonsingular.
pub fn counterexample_germ(n: usize) -> Result<GermSpec> {
    if n < 2 {
        return Err(Error::Unsupported(
            "no counterexample exists for n < 2: a 2x2 matrix without real eigenvalues \
             always has a nonsingular skew part"
                .into(),
        ));
    }
    let dim = 2 * n;
    let half = Scalar::Rational { num: 1, den: 2 };
    let neg_half = Scalar::Rational { num: -1, den: 2 };
    let mut twist = Vec::with_capacity(dim);
    for m in 0..n {
        // rows 2m, 2m+1 of the twisting matrix: [[0, -1/2], [1/2, 0]] block
        twist.push(Polynomial::linear_term(dim, 2 * m + 1, neg_half)?);
        twist.push(Polynomial::linear_term(dim, 2 * m, half)?);
    }
    // identity block in the last two rows, first two columns
    let mut extra1 = Polynomial::linear_term(dim, 0, Scalar::integer(1))?;
    extra1.add_assign(&twist[dim - 2]);
    twist[dim - 2] = extra1;
    let mut extra2 = Polynomial::linear_term(dim, 1, Scalar::integer(1))?;
    extra2.add_assign(&twist[dim - 1]);
    twist[dim - 1] = extra2;
    GermSpec::new(n, twist, DEFAULT_RADIUS)
}

/// The standard orthogonal complex structure on R^(2n+2) = C^(n+1):
/// J e_(2k-1) = e_2k, J e_2k = -e_(2k-1).
pub fn standard_complex_structure(n: usize) -> Matrix {
    let dim = 2 * n + 2;
    let mut j = Matrix::zeros(dim, dim);
    for k in 0..n + 1 {
        j[(2 * k + 1, 2 * k)] = 1.0;
        j[(2 * k, 2 * k + 1)] = -1.0;
    }
    j
}

/// Applies [`standard_complex_structure`] to an ambient vector.
pub fn apply_complex_structure(v: &DVector<f64>) -> DVector<f64> {
    let dim = v.len();
    let mut out = DVector::zeros(dim);
    for k in 0..dim / 2 {
        out[2 * k + 1] = v[2 * k];
        out[2 * k] = -v[2 * k + 1];
    }
    out
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Van der Corput radical inverse in the given base, the coordinate of a
/// Halton point.
fn radical_inverse(base: u64, mut index: u64) -> f64 {
    let mut inv = 0.0;
    let mut denom = 1.0;
    while index > 0 {
        denom *= base as f64;
        inv += (index % base) as f64 / denom;
        index /= base;
    }
    inv
}
