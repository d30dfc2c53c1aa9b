//! Small dense real linear algebra: eigenvalue realness tests, determinants,
//! Pfaffians by two independent algorithms, and the skew-symmetric normal form.
//!
//! Everything here is sized for the matrices this crate actually meets
//! (twisting matrices of dimension 2n, n a handful), not for large-scale
//! numerics. Eigenvalues, determinants and singular values are delegated to
//! nalgebra; the Pfaffian algorithms and the normal-form construction are
//! implemented here.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative tolerance for deciding that an eigenvalue is real:
/// `|Im λ| <= REALNESS_TOL * (1 + |λ|)`. Dense eigensolvers return tiny
/// imaginary parts for real roots; the relative scaling keeps the test
/// meaningful for large entries.
pub const REALNESS_TOL: f64 = 1e-9;

/// Largest dimension accepted by the combinatorial Pfaffian. 7!! = 105
/// matchings is instant; beyond that the normal-form path is authoritative.
pub const COMBINATORIAL_MAX_DIM: usize = 8;

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major entries. All entries must be finite.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dimension("matrix dimensions must be positive"));
        }
        if entries.len() != rows * cols {
            return Err(Error::dimension(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::dimension("matrix entries must be finite"));
        }
        Ok(Matrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::dimension("matrix must have at least one row"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::dimension("rows have inconsistent lengths"));
        }
        Matrix::new(rows.len(), cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dimension("matrix subtraction shape mismatch"));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dimension("matrix product shape mismatch"));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Matrix {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push(m[(i, j)]);
            }
        }
        Matrix {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    /// Complex spectrum, sorted by real then imaginary part so output is
    /// deterministic.
    pub fn complex_eigenvalues(&self) -> Result<Vec<Complex<f64>>> {
        if !self.is_square() {
            return Err(Error::dimension(format!(
                "eigenvalues require a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let mut eigs: Vec<Complex<f64>> = self.to_nalgebra().complex_eigenvalues().iter().copied().collect();
        eigs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        Ok(eigs)
    }

    /// True iff some eigenvalue λ satisfies `|Im λ| <= REALNESS_TOL * (1 + |λ|)`,
    /// with the spectrum obtained from a dense complex eigensolver.
    pub fn has_real_eigenvalue(&self) -> Result<bool> {
        let eigs = self.complex_eigenvalues()?;
        Ok(eigs
            .iter()
            .any(|l| l.im.abs() <= REALNESS_TOL * (1.0 + l.norm())))
    }

    /// The closed-form 2x2 test: no real eigenvalues iff
    /// `(a11 - a22)^2 < -4 a12 a21`.
    pub fn no_real_eigs_2x2_criterion(&self) -> Result<bool> {
        if self.rows != 2 || self.cols != 2 {
            return Err(Error::dimension(format!(
                "2x2 criterion applied to a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let d = self[(0, 0)] - self[(1, 1)];
        Ok(d * d < -4.0 * self[(0, 1)] * self[(1, 0)])
    }

    /// LU determinant with partial pivoting.
    pub fn determinant(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::dimension(format!(
                "determinant requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.to_nalgebra().lu().determinant())
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Skew-symmetric matrix of even dimension, stored as its strict upper
/// triangle so that `B^T = -B` holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    dim: usize,
    /// Strict upper triangle, row-major: (0,1), (0,2), ..., (1,2), ...
    upper: Vec<f64>,
}

impl SkewMatrix {
    pub fn from_upper_triangle(dim: usize, upper: Vec<f64>) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::dimension(format!(
                "skew matrix dimension must be even and positive, got {dim}"
            )));
        }
        let expected = dim * (dim - 1) / 2;
        if upper.len() != expected {
            return Err(Error::dimension(format!(
                "expected {expected} strict upper-triangle entries for dim {dim}, got {}",
                upper.len()
            )));
        }
        if upper.iter().any(|x| !x.is_finite()) {
            return Err(Error::dimension("matrix entries must be finite"));
        }
        Ok(SkewMatrix { dim, upper })
    }

    /// Interprets a full square matrix as skew-symmetric, rejecting it if any
    /// entry pair fails `b_ij + b_ji = 0` within `tol` (the offending pair is
    /// named in the error).
    pub fn from_matrix(m: &Matrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dimension(format!(
                "skew matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let dim = m.rows();
        for i in 0..dim {
            for j in i..dim {
                if (m[(i, j)] + m[(j, i)]).abs() > tol {
                    return Err(Error::NotSkew {
                        i: i + 1,
                        j: j + 1,
                        upper: m[(i, j)],
                        lower: m[(j, i)],
                    });
                }
            }
        }
        let mut upper = Vec::with_capacity(dim * (dim - 1) / 2);
        for i in 0..dim {
            for j in (i + 1)..dim {
                upper.push(m[(i, j)]);
            }
        }
        SkewMatrix::from_upper_triangle(dim, upper)
    }

    /// Builds from a function giving the strict upper-triangle entries.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut upper = Vec::with_capacity(dim * (dim - 1) / 2);
        for i in 0..dim {
            for j in (i + 1)..dim {
                upper.push(f(i, j));
            }
        }
        SkewMatrix::from_upper_triangle(dim, upper)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// n for a 2n x 2n matrix.
    pub fn half_dim(&self) -> usize {
        self.dim / 2
    }

    fn upper_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j);
        i * self.dim - i * (i + 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[self.upper_index(i, j)],
            Equal => 0.0,
            // 0.0 + x avoids a negative zero for zero entries
            Greater => 0.0 + -self.upper[self.upper_index(j, i)],
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        self.to_matrix().to_nalgebra()
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Pfaffian by signed perfect-matching enumeration. The permutation-sum
    /// definition groups its (2n)! terms into batches of 2^n n! equal ones;
    /// summing one canonical matching per batch gives the same value without
    /// the 1/(2^n n!) prefactor. Capped at dim 8 (105 matchings).
    pub fn pfaffian_combinatorial(&self) -> Result<f64> {
        if self.dim > COMBINATORIAL_MAX_DIM {
            return Err(Error::SizeLimit {
                dim: self.dim,
                max: COMBINATORIAL_MAX_DIM,
            });
        }
        let active: Vec<usize> = (0..self.dim).collect();
        Ok(self.pfaffian_expand(&active))
    }

    /// Laplace-style expansion along the first active index: pairing it with
    /// the k-th remaining index (1-based) carries sign (-1)^(k+1).
    fn pfaffian_expand(&self, active: &[usize]) -> f64 {
        if active.is_empty() {
            return 1.0;
        }
        let first = active[0];
        let mut total = 0.0;
        let mut sign = 1.0;
        for k in 1..active.len() {
            let partner = active[k];
            let b = self.get(first, partner);
            if b != 0.0 {
                let rest: Vec<usize> = active[1..]
                    .iter()
                    .copied()
                    .filter(|&x| x != partner)
                    .collect();
                total += sign * b * self.pfaffian_expand(&rest);
            }
            sign = -sign;
        }
        total
    }

    /// Pfaffian via the normal form: `det(rotation) * b_1 ... b_n`.
    pub fn pfaffian_normal_form(&self) -> f64 {
        let nf = self.normal_form();
        nf.rotation_det_sign * nf.block_values.iter().product::<f64>()
    }

    /// Orthogonal change of basis bringing the matrix to block-diagonal form
    /// with 2x2 blocks [[0, b], [-b, 0]], b >= 0.
    ///
    /// The construction is spectral: -B^2 is symmetric positive semidefinite
    /// with eigenvalue b^2 on each rotation 2-plane, so each plane is spanned
    /// by a unit vector u and Bu/b. Vectors in the kernel of B are paired
    /// arbitrarily into zero blocks. Within each plane the basis is chosen so
    /// that inputs already in normal form come back with the identity
    /// rotation.
    pub fn normal_form(&self) -> SkewNormalForm {
        let dim = self.dim;
        let b = self.to_nalgebra();
        let mut m = -(&b * &b);
        m = (&m + &m.transpose()) * 0.5;
        let eig = m.symmetric_eigen();

        let zero_tol = 1e-13 * self.max_abs().max(1.0);
        let mut paired: Vec<DVector<f64>> = Vec::new();
        let mut kernel: Vec<DVector<f64>> = Vec::new();
        let mut block_values: Vec<f64> = Vec::new();

        // Candidate order: eigenvalue descending, index as tie-break.
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| {
            eig.eigenvalues[j]
                .partial_cmp(&eig.eigenvalues[i])
                .unwrap()
                .then(i.cmp(&j))
        });

        while paired.len() + kernel.len() < dim {
            // Candidate eigenvector with the largest residual against the
            // basis built so far. The eigenvectors span the whole space, so
            // the best residual norm is at least sqrt(remaining/dim).
            let mut best: Option<(f64, DVector<f64>)> = None;
            for &k in &order {
                let mut r: DVector<f64> = eig.eigenvectors.column(k).into_owned();
                for u in paired.iter().chain(kernel.iter()) {
                    let c = u.dot(&r);
                    r.axpy(-c, u, 1.0);
                }
                let n = r.norm();
                if best.as_ref().map_or(true, |(bn, _)| n > *bn) {
                    best = Some((n, r));
                }
            }
            let (n, r) = best.unwrap();
            let u0 = r / n;
            let bu = &b * &u0;
            let bval = bu.norm();
            if bval <= zero_tol {
                kernel.push(u0);
                continue;
            }
            let w = bu / bval;
            // Canonical first basis vector of the plane: the standard basis
            // direction with the largest projection (smallest index wins
            // ties), so block-diagonal inputs reproduce the identity.
            let mut best_k = 0;
            let mut best_p = -1.0;
            for k in 0..dim {
                let p = u0[k] * u0[k] + w[k] * w[k];
                if p > best_p {
                    best_p = p;
                    best_k = k;
                }
            }
            let mut r1 = &u0 * u0[best_k] + &w * w[best_k];
            r1.normalize_mut();
            let r2 = -(&b * &r1) / bval;
            paired.push(r1);
            paired.push(r2);
            block_values.push(bval);
        }

        // Kernel vectors pair into zero blocks; dimension parity guarantees
        // an even count.
        debug_assert!(kernel.len() % 2 == 0);
        for _ in 0..kernel.len() / 2 {
            block_values.push(0.0);
        }
        paired.append(&mut kernel);

        let mut rotation = Matrix::zeros(dim, dim);
        for (i, row) in paired.iter().enumerate() {
            for j in 0..dim {
                rotation[(i, j)] = row[j];
            }
        }
        let det = rotation.determinant().expect("rotation is square");
        SkewNormalForm {
            rotation,
            block_values,
            rotation_det_sign: if det < 0.0 { -1.0 } else { 1.0 },
        }
    }
}

/// Result of [`SkewMatrix::normal_form`]: an orthogonal `rotation` C with
/// `C B C^T` block-diagonal, the block values `b_i >= 0`, and the sign of
/// `det(C)`.
#[derive(Debug, Clone)]
pub struct SkewNormalForm {
    pub rotation: Matrix,
    pub block_values: Vec<f64>,
    pub rotation_det_sign: f64,
}

impl SkewNormalForm {
    /// The block-diagonal matrix this normal form asserts, for residual
    /// checks.
    pub fn block_diagonal(&self) -> Matrix {
        let dim = self.rotation.rows();
        let mut m = Matrix::zeros(dim, dim);
        for (k, b) in self.block_values.iter().enumerate() {
            m[(2 * k, 2 * k + 1)] = *b;
            m[(2 * k + 1, 2 * k)] = -*b;
        }
        m
    }

    /// `|| C B C^T - blockdiag ||_max`.
    pub fn reconstruction_error(&self, b: &SkewMatrix) -> f64 {
        let c = &self.rotation;
        let cbct = c
            .mul(&b.to_matrix())
            .and_then(|x| x.mul(&c.transpose()))
            .expect("shapes agree");
        cbct.sub(&self.block_diagonal())
            .expect("shapes agree")
            .max_abs()
    }
}

/// Block-diagonal skew matrix with the given 2x2 block values, a convenience
/// used by the named examples and tests.
pub fn skew_block_diagonal(values: &[f64]) -> Result<SkewMatrix> {
    let dim = 2 * values.len();
    SkewMatrix::from_fn(dim, |i, j| {
        if j == i + 1 && i % 2 == 0 {
            values[i / 2]
        } else {
            0.0
        }
    })
}
