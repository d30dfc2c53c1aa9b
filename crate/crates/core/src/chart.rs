//! The Hom(P, P-perp) chart on the Grassmannian of oriented 2-planes in
//! R^(2n+2), the bad set of planes meeting a fixed plane P, and the
//! transversality test for candidate tangent spaces.
//!
//! A plane P' near P that contains no vector orthogonal to P and projects to
//! P orientation-preservingly is the graph of a unique linear map
//! L : P -> P-perp; with orthonormal bases fixed, L is a 2n x 2 matrix with
//! columns indexed by the basis of P. Tangent directions at P are the same
//! matrices, and a 2n-dimensional tangent subspace is transverse to the cone
//! of bad directions exactly when it is the graph of a map between the two
//! column spaces with no real eigenvalues.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Relative singular-value threshold for the rank decisions in this module.
/// The bad set has measure zero, so exact membership is only meaningful for
/// constructed examples.
pub const RANK_TOL: f64 = 1e-9;

const ORTHO_TOL: f64 = 1e-10;

/// An oriented 2-plane through the origin, given by an ordered orthonormal
/// basis.
#[derive(Debug, Clone)]
pub struct OrientedPlane {
    basis: [DVector<f64>; 2],
}

impl OrientedPlane {
    pub fn new(first: DVector<f64>, second: DVector<f64>) -> Result<Self> {
        let dim = first.len();
        if second.len() != dim {
            return Err(Error::dimension("basis vectors of different lengths"));
        }
        if dim < 4 || dim % 2 != 0 {
            return Err(Error::dimension(format!(
                "oriented planes live in R^(2n+2), got ambient dimension {dim}"
            )));
        }
        if (first.norm() - 1.0).abs() > 1e-12
            || (second.norm() - 1.0).abs() > 1e-12
            || first.dot(&second).abs() > 1e-12
        {
            return Err(Error::Validation("plane basis is not orthonormal".into()));
        }
        Ok(OrientedPlane {
            basis: [first, second],
        })
    }

    /// The plane spanned by the first two standard basis vectors of
    /// R^(2n+2), the base plane of every germ in this crate.
    pub fn standard(n: usize) -> Self {
        let dim = 2 * n + 2;
        let mut u1 = DVector::zeros(dim);
        u1[0] = 1.0;
        let mut u2 = DVector::zeros(dim);
        u2[1] = 1.0;
        OrientedPlane { basis: [u1, u2] }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].len()
    }

    pub fn basis(&self) -> (&DVector<f64>, &DVector<f64>) {
        (&self.basis[0], &self.basis[1])
    }
}

/// The standard orthonormal frame of the orthogonal complement of
/// [`OrientedPlane::standard`]: the remaining 2n standard basis vectors.
pub fn standard_frame(n: usize) -> Vec<DVector<f64>> {
    let dim = 2 * n + 2;
    (2..dim)
        .map(|k| {
            let mut v = DVector::zeros(dim);
            v[k] = 1.0;
            v
        })
        .collect()
}

/// Completes a plane's basis to an oriented orthonormal basis of the ambient
/// space and returns the complement part, ordered so that the plane followed
/// by the complement carries the ambient orientation.
pub fn orthonormal_complement(p: &OrientedPlane) -> Vec<DVector<f64>> {
    let dim = p.ambient_dim();
    let (u1, u2) = p.basis();
    let mut basis: Vec<DVector<f64>> = vec![u1.clone(), u2.clone()];
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[k] = 1.0;
        for b in &basis {
            let c = b.dot(&v);
            v.axpy(-c, b, 1.0);
        }
        let n = v.norm();
        if n > 1e-8 {
            basis.push(v / n);
        }
    }
    debug_assert_eq!(basis.len(), dim);
    let full = DMatrix::from_columns(&basis);
    if full.determinant() < 0.0 {
        let last = basis.len() - 1;
        basis.swap(last - 1, last);
    }
    basis.split_off(2)
}

/// An element of Hom(P, P-perp): a 2n x 2 matrix whose columns are the
/// images of the two basis vectors of P in the frame of P-perp.
#[derive(Debug, Clone)]
pub struct HomElement {
    n: usize,
    matrix: Matrix,
}

impl HomElement {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.cols() != 2 || matrix.rows() % 2 != 0 || matrix.rows() == 0 {
            return Err(Error::dimension(format!(
                "Hom elements are 2n x 2 matrices, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(HomElement {
            n: matrix.rows() / 2,
            matrix,
        })
    }

    pub fn zero(n: usize) -> Self {
        HomElement {
            n,
            matrix: Matrix::zeros(2 * n, 2),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn max_abs_diff(&self, other: &HomElement) -> f64 {
        self.matrix
            .sub(&other.matrix)
            .map(|d| d.max_abs())
            .unwrap_or(f64::INFINITY)
    }
}

/// A 2n-dimensional linear subspace of Hom(P, P-perp), spanned by 2n
/// elements.
#[derive(Debug, Clone)]
pub struct TangentSubspace {
    n: usize,
    basis: Vec<HomElement>,
}

impl TangentSubspace {
    pub fn new(basis: Vec<HomElement>) -> Result<Self> {
        let n = basis
            .first()
            .map(|e| e.n())
            .ok_or_else(|| Error::Validation("empty tangent basis".into()))?;
        if basis.len() != 2 * n || basis.iter().any(|e| e.n() != n) {
            return Err(Error::dimension(format!(
                "tangent subspace needs 2n = {} elements of matching shape, got {}",
                2 * n,
                basis.len()
            )));
        }
        Ok(TangentSubspace { n, basis })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[HomElement] {
        &self.basis
    }
}

/// Outcome of the bad-cone transversality test. `graph_matrix` is the map
/// from the first column space to the second whose graph the subspace is;
/// it is absent when the subspace meets one of the column spaces.
#[derive(Debug, Clone)]
pub struct Transversality {
    pub transverse: bool,
    pub graph_matrix: Option<Matrix>,
}

fn validate_frame(p: &OrientedPlane, frame: &[DVector<f64>]) -> Result<()> {
    let dim = p.ambient_dim();
    if frame.len() != dim - 2 {
        return Err(Error::Validation(format!(
            "frame must have {} vectors, got {}",
            dim - 2,
            frame.len()
        )));
    }
    let (u1, u2) = p.basis();
    for (i, w) in frame.iter().enumerate() {
        if w.len() != dim {
            return Err(Error::Validation("frame vector of wrong length".into()));
        }
        if (w.norm() - 1.0).abs() > ORTHO_TOL {
            return Err(Error::Validation(format!(
                "frame vector {} is not unit length",
                i + 1
            )));
        }
        if w.dot(u1).abs() > ORTHO_TOL || w.dot(u2).abs() > ORTHO_TOL {
            return Err(Error::Validation(format!(
                "frame vector {} is not orthogonal to the plane",
                i + 1
            )));
        }
        for (j, w2) in frame.iter().enumerate().take(i) {
            if w.dot(w2).abs() > ORTHO_TOL {
                return Err(Error::Validation(format!(
                    "frame vectors {} and {} are not orthogonal",
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// The plane spanned by U1 + L(U1) and U2 + L(U2), orthonormalized in that
/// order. The orthogonal projection to P is orientation-preserving by
/// construction.
pub fn graph_plane(
    p: &OrientedPlane,
    l: &HomElement,
    frame: &[DVector<f64>],
) -> Result<OrientedPlane> {
    validate_frame(p, frame)?;
    if 2 * l.n() + 2 != p.ambient_dim() {
        return Err(Error::dimension(
            "Hom element does not match the plane's ambient dimension",
        ));
    }
    let (u1, u2) = p.basis();
    let mut v1 = u1.clone();
    let mut v2 = u2.clone();
    for (k, w) in frame.iter().enumerate() {
        v1.axpy(l.matrix()[(k, 0)], w, 1.0);
        v2.axpy(l.matrix()[(k, 1)], w, 1.0);
    }
    let e1 = &v1 / v1.norm();
    let mut e2 = v2;
    let c = e1.dot(&e2);
    e2.axpy(-c, &e1, 1.0);
    let e2 = &e2 / e2.norm();
    OrientedPlane::new(e1, e2.clone())
}

/// The unique L whose graph is the plane `q`, provided `q` is in the chart
/// domain: it contains no vector orthogonal to `p` and its projection to `p`
/// preserves orientation.
pub fn plane_to_hom(
    p: &OrientedPlane,
    q: &OrientedPlane,
    frame: &[DVector<f64>],
) -> Result<HomElement> {
    validate_frame(p, frame)?;
    if q.ambient_dim() != p.ambient_dim() {
        return Err(Error::dimension("planes in different ambient dimensions"));
    }
    let (u1, u2) = p.basis();
    let (q1, q2) = q.basis();
    // projection of q's basis onto p, rows indexed by q's basis
    let g = [[q1.dot(u1), q1.dot(u2)], [q2.dot(u1), q2.dot(u2)]];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if det.abs() <= 1e-12 {
        return Err(Error::ChartDomain(
            "plane contains a vector orthogonal to the base plane".into(),
        ));
    }
    if det < 0.0 {
        return Err(Error::ChartDomain(
            "projection to the base plane is orientation-reversing".into(),
        ));
    }
    // rows of G^-1 give the combinations of q's basis projecting to U1, U2
    let ginv = [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ];
    let n = p.ambient_dim() / 2 - 1;
    let mut m = Matrix::zeros(2 * n, 2);
    for i in 0..2 {
        let w = q1 * ginv[i][0] + q2 * ginv[i][1];
        for (k, fv) in frame.iter().enumerate() {
            m[(k, i)] = w.dot(fv);
        }
    }
    HomElement::new(m)
}

/// True iff the two planes meet in at least a line: the stacked 4 x (2n+2)
/// basis matrix has rank at most 3.
pub fn in_bad_set(p: &OrientedPlane, q: &OrientedPlane) -> Result<bool> {
    if q.ambient_dim() != p.ambient_dim() {
        return Err(Error::dimension("planes in different ambient dimensions"));
    }
    let dim = p.ambient_dim();
    let mut stacked = DMatrix::zeros(4, dim);
    let rows = [p.basis().0, p.basis().1, q.basis().0, q.basis().1];
    for (i, r) in rows.iter().enumerate() {
        for j in 0..dim {
            stacked[(i, j)] = r[j];
        }
    }
    let sv = stacked.svd(false, false).singular_values;
    let largest = sv.max();
    Ok(sv[sv.len() - 1] <= RANK_TOL * largest)
}

/// The tangent basis of the plane family built from a twisting matrix A:
/// direction j has first column e_j and second column the j-th column of A.
pub fn tangent_basis_from_twisting(a: &Matrix) -> Result<TangentSubspace> {
    if !a.is_square() {
        return Err(Error::dimension(format!(
            "twisting matrix must be square, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dim = a.rows();
    if dim == 0 || dim % 2 != 0 {
        return Err(Error::dimension(format!(
            "twisting matrix must be 2n x 2n, got dimension {dim}"
        )));
    }
    let mut basis = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut m = Matrix::zeros(dim, 2);
        m[(j, 0)] = 1.0;
        for i in 0..dim {
            m[(i, 1)] = a[(i, j)];
        }
        basis.push(HomElement::new(m)?);
    }
    TangentSubspace::new(basis)
}

fn singular_by_svd(m: &DMatrix<f64>) -> bool {
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.max();
    largest == 0.0 || sv[sv.len() - 1] <= RANK_TOL * largest
}

/// Transversality of a tangent subspace to the cone of directions pointing
/// into the bad set.
///
/// The subspace must meet the two column spaces of Hom(P, P-perp) only at
/// the origin; when it does, it is the graph of a unique map M from the
/// first column space to the second, and transversality is equivalent to M
/// having no real eigenvalues. M is returned as a witness whenever it is
/// defined.
pub fn transverse_to_bad_cone(t: &TangentSubspace) -> Result<Transversality> {
    let dim = 2 * t.n();
    // rows of [F | S]: flattened basis elements
    let mut f = DMatrix::zeros(dim, dim);
    let mut s = DMatrix::zeros(dim, dim);
    let mut stacked = DMatrix::zeros(dim, 2 * dim);
    for (j, e) in t.basis().iter().enumerate() {
        for k in 0..dim {
            f[(j, k)] = e.matrix()[(k, 0)];
            s[(j, k)] = e.matrix()[(k, 1)];
            stacked[(j, k)] = f[(j, k)];
            stacked[(j, dim + k)] = s[(j, k)];
        }
    }
    if singular_by_svd(&stacked) {
        return Err(Error::Validation(
            "tangent basis is linearly dependent".into(),
        ));
    }
    // T meets the second column space iff F is singular, and the first iff S
    // is singular.
    if singular_by_svd(&f) || singular_by_svd(&s) {
        return Ok(Transversality {
            transverse: false,
            graph_matrix: None,
        });
    }
    // Row space of [F | S] equals that of [I | F^-1 S], the graph of
    // M = (F^-1 S)^T acting on column vectors.
    let x = f
        .lu()
        .solve(&s)
        .ok_or_else(|| Error::Validation("unexpected singular solve".into()))?;
    let m = Matrix::from_nalgebra(&x.transpose());
    let transverse = !m.has_real_eigenvalue()?;
    Ok(Transversality {
        transverse,
        graph_matrix: Some(m),
    })
}
