//! Alternating multilinear forms on R^m with wedge products and powers.
//!
//! Coefficients are stored sparsely, keyed by strictly increasing index
//! tuples; a degree-2 form on R^(2n) and its n-th power only ever touch a
//! handful of tuples. This is enough to evaluate `omega^n / n!` for the
//! bivector of a skew matrix and the powers of d-alpha; there is no symbolic
//! exterior calculus here.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::SkewMatrix;

/// A degree-k alternating form, as a sparse map from increasing k-tuples of
/// 1-based indices to coefficients. Missing tuples are zero. Degrees above
/// the ambient dimension are permitted and necessarily zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingForm {
    ambient_dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl AlternatingForm {
    pub fn zero(ambient_dim: usize, degree: usize) -> Self {
        AlternatingForm {
            ambient_dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// The basis 1-form dx_i (1-based).
    pub fn basis_one_form(ambient_dim: usize, i: usize) -> Result<Self> {
        let mut f = AlternatingForm::zero(ambient_dim, 1);
        f.add_term(&[i], 1.0)?;
        Ok(f)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Adds `c` to the coefficient of the given strictly increasing tuple.
    pub fn add_term(&mut self, indices: &[usize], c: f64) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::dimension(format!(
                "tuple length {} does not match form degree {}",
                indices.len(),
                self.degree
            )));
        }
        if indices.windows(2).any(|w| w[0] >= w[1])
            || indices.iter().any(|&i| i == 0 || i > self.ambient_dim)
        {
            return Err(Error::dimension(format!(
                "index tuple {indices:?} is not strictly increasing within 1..={}",
                self.ambient_dim
            )));
        }
        let entry = self.coeffs.entry(indices.to_vec()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.coeffs.remove(indices);
        }
        Ok(())
    }

    pub fn coefficient(&self, indices: &[usize]) -> f64 {
        self.coeffs.get(indices).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> AlternatingForm {
        let mut out = self.clone();
        out.coeffs.retain(|_, c| {
            *c *= s;
            *c != 0.0
        });
        out
    }

    pub fn sub(&self, other: &AlternatingForm) -> Result<AlternatingForm> {
        if self.ambient_dim != other.ambient_dim || self.degree != other.degree {
            return Err(Error::dimension(
                "form subtraction requires equal ambient dimension and degree",
            ));
        }
        let mut out = self.clone();
        for (idx, c) in other.terms() {
            out.add_term(idx, -c)?;
        }
        Ok(out)
    }

    /// Wedge product. Coefficients combine with the shuffle sign of merging
    /// the two index tuples.
    pub fn wedge(&self, other: &AlternatingForm) -> Result<AlternatingForm> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::dimension(format!(
                "wedge of forms on R^{} and R^{}",
                self.ambient_dim, other.ambient_dim
            )));
        }
        let degree = self.degree + other.degree;
        let mut out = AlternatingForm::zero(self.ambient_dim, degree);
        if degree > self.ambient_dim {
            return Ok(out);
        }
        for (left, a) in self.terms() {
            for (right, b) in other.terms() {
                if let Some((merged, sign)) = merge_with_sign(left, right) {
                    out.add_term(&merged, sign * a * b)?;
                }
            }
        }
        Ok(out)
    }

    /// n-fold wedge power of a degree-2 form. Returns the unit degree-0 form
    /// for n = 0 and the zero form when 2n exceeds the ambient dimension.
    pub fn power(&self, n: u32) -> Result<AlternatingForm> {
        if self.degree != 2 {
            return Err(Error::dimension(format!(
                "power is defined for degree-2 forms, got degree {}",
                self.degree
            )));
        }
        if n == 0 {
            let mut unit = AlternatingForm::zero(self.ambient_dim, 0);
            unit.add_term(&[], 1.0)?;
            return Ok(unit);
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// The single coefficient of a top-degree form.
    pub fn top_coefficient(&self) -> Result<f64> {
        if self.degree != self.ambient_dim {
            return Err(Error::dimension(format!(
                "top coefficient of a degree-{} form on R^{}",
                self.degree, self.ambient_dim
            )));
        }
        let full: Vec<usize> = (1..=self.ambient_dim).collect();
        Ok(self.coefficient(&full))
    }
}

/// The bivector `sum_{i<j} b_ij e_i ^ e_j` of a skew matrix.
pub fn bivector_from_skew(b: &SkewMatrix) -> AlternatingForm {
    let dim = b.dim();
    let mut omega = AlternatingForm::zero(dim, 2);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let c = b.get(i, j);
            if c != 0.0 {
                omega.add_term(&[i + 1, j + 1], c).expect("valid tuple");
            }
        }
    }
    omega
}

/// Pfaffian through the bivector identity `omega^n / n! = Pf(B) e_1^...^e_2n`.
/// Exact for integer coefficient matrices, since only integer products and
/// sums occur.
pub fn pfaffian_via_bivector(b: &SkewMatrix) -> f64 {
    let n = b.half_dim() as u32;
    let top = bivector_from_skew(b)
        .power(n)
        .and_then(|p| p.top_coefficient())
        .expect("degree-2 form with even ambient dimension");
    top / factorial(b.half_dim())
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Merges two disjoint increasing tuples, returning the merged tuple and the
/// sign of the shuffle (parity of the number of transpositions needed to
/// sort the concatenation). Returns None when the tuples share an index.
fn merge_with_sign(left: &[usize], right: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut merged = Vec::with_capacity(left.len() + right.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < left.len() && j < right.len() {
        if left[i] == right[j] {
            return None;
        }
        if left[i] < right[j] {
            merged.push(left[i]);
            i += 1;
        } else {
            // right[j] jumps over the remaining left entries
            inversions += left.len() - i;
            merged.push(right[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&left[i..]);
    merged.extend_from_slice(&right[j..]);
    let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
    Some((merged, sign))
}
