//! Text formats shared with the CLI.
//!
//! Matrix files: one row per line, entries whitespace-separated, each entry
//! a decimal literal or an exact fraction `p/q`; blank lines and lines
//! starting with `#` are ignored.
//!
//! Germ files: the same lexical rules, with three kinds of records:
//!
//! ```text
//! n 2
//! domain_radius 1/10
//! term 1 -1/2 0 1 0 0
//! ```
//!
//! A `term i c e_1 ... e_2n` line adds the monomial `c * x^e` to the i-th
//! twist function (i is 1-based). Fractions survive a parse/write cycle
//! exactly; the named germ families are written with fraction coefficients
//! so their files are platform-independent.

use crate::error::{Error, Result};
use crate::germ::GermSpec;
use crate::matrix::{Matrix, SkewMatrix};
use crate::poly::{Polynomial, Term};
use crate::scalar::Scalar;

/// Absolute tolerance for the skewness check on float matrix input;
/// fraction input is checked exactly.
pub const SKEW_INPUT_TOL: f64 = 1e-12;

/// A parsed matrix that remembers which entries were exact fractions.
#[derive(Debug, Clone)]
pub struct ScalarMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl ScalarMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn all_rational(&self) -> bool {
        self.entries.iter().all(|s| s.is_rational())
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        Matrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|s| s.as_f64()).collect(),
        )
    }
}

/// Lines that carry content: (1-based line number, trimmed text).
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn parse_scalar_matrix(text: &str) -> Result<ScalarMatrix> {
    let mut entries: Vec<Scalar> = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for (line_no, line) in content_lines(text) {
        let row: Vec<Scalar> = line
            .split_whitespace()
            .map(Scalar::parse)
            .collect::<Result<_>>()
            .map_err(|e| Error::parse(line_no, e.to_string()))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::parse(
                    line_no,
                    format!("row has {} entries, expected {}", row.len(), c),
                ));
            }
            _ => {}
        }
        entries.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::parse(1, "matrix file has no rows"))?;
    Ok(ScalarMatrix {
        rows,
        cols,
        entries,
    })
}

pub fn parse_matrix(text: &str) -> Result<Matrix> {
    parse_scalar_matrix(text)?.to_matrix()
}

/// Shortest round-trip decimal for an f64, with negative zero folded into 0.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

pub fn matrix_to_string(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| fmt_f64(m[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Reads a square matrix as skew-symmetric. Fraction input is checked for
/// exact cancellation of each entry pair; float input within
/// [`SKEW_INPUT_TOL`].
pub fn skew_from_scalar_matrix(sm: &ScalarMatrix) -> Result<SkewMatrix> {
    if sm.rows() != sm.cols() {
        return Err(Error::dimension(format!(
            "skew matrix must be square, got {}x{}",
            sm.rows(),
            sm.cols()
        )));
    }
    let m = sm.to_matrix()?;
    if sm.all_rational() {
        let dim = sm.rows();
        for i in 0..dim {
            for j in i..dim {
                let exact = sm
                    .get(i, j)
                    .cancels_exactly(sm.get(j, i))
                    .unwrap_or(false);
                if !exact {
                    return Err(Error::NotSkew {
                        i: i + 1,
                        j: j + 1,
                        upper: sm.get(i, j).as_f64(),
                        lower: sm.get(j, i).as_f64(),
                    });
                }
            }
        }
        // exactness established; the float conversion below cannot fail it
        return SkewMatrix::from_matrix(&m, f64::INFINITY);
    }
    SkewMatrix::from_matrix(&m, SKEW_INPUT_TOL)
}

pub fn parse_germ(text: &str) -> Result<GermSpec> {
    let mut n: Option<usize> = None;
    let mut radius: Option<Scalar> = None;
    // (function index 0-based, term)
    let mut raw_terms: Vec<(usize, Term)> = Vec::new();
    for (line_no, line) in content_lines(text) {
        let mut tokens = line.split_whitespace();
        let key = tokens.next().expect("non-empty line");
        let rest: Vec<&str> = tokens.collect();
        match key {
            "n" => {
                if rest.len() != 1 {
                    return Err(Error::parse(line_no, "expected: n <positive integer>"));
                }
                let value: usize = rest[0]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad integer {:?}", rest[0])))?;
                if value == 0 {
                    return Err(Error::parse(line_no, "n must be positive"));
                }
                n = Some(value);
            }
            "domain_radius" => {
                if rest.len() != 1 {
                    return Err(Error::parse(line_no, "expected: domain_radius <number>"));
                }
                let value =
                    Scalar::parse(rest[0]).map_err(|e| Error::parse(line_no, e.to_string()))?;
                radius = Some(value);
            }
            "term" => {
                let n = n.ok_or_else(|| {
                    Error::parse(line_no, "term before the n record; declare n first")
                })?;
                let vars = 2 * n;
                if rest.len() != 2 + vars {
                    return Err(Error::parse(
                        line_no,
                        format!(
                            "expected: term <i> <coeff> and {vars} exponents, got {} fields",
                            rest.len()
                        ),
                    ));
                }
                let i: usize = rest[0]
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad index {:?}", rest[0])))?;
                if i == 0 || i > vars {
                    return Err(Error::parse(
                        line_no,
                        format!("function index {i} outside 1..={vars}"),
                    ));
                }
                let coeff =
                    Scalar::parse(rest[1]).map_err(|e| Error::parse(line_no, e.to_string()))?;
                let mut exponents = Vec::with_capacity(vars);
                for tok in &rest[2..] {
                    let e: u8 = tok
                        .parse()
                        .map_err(|_| Error::parse(line_no, format!("bad exponent {tok:?}")))?;
                    exponents.push(e);
                }
                if exponents.iter().map(|&e| e as usize).sum::<usize>() > crate::poly::MAX_DEGREE
                {
                    return Err(Error::parse(
                        line_no,
                        format!("monomial degree exceeds {}", crate::poly::MAX_DEGREE),
                    ));
                }
                raw_terms.push((i - 1, Term { coeff, exponents }));
            }
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown record {other:?}; expected n, domain_radius or term"),
                ));
            }
        }
    }
    let n = n.ok_or_else(|| Error::parse(1, "missing n record"))?;
    let radius = radius.ok_or_else(|| Error::parse(1, "missing domain_radius record"))?;
    let mut per_function: Vec<Vec<Term>> = vec![Vec::new(); 2 * n];
    for (i, term) in raw_terms {
        per_function[i].push(term);
    }
    let twist: Vec<Polynomial> = per_function
        .into_iter()
        .map(|terms| Polynomial::new(2 * n, terms))
        .collect::<Result<_>>()?;
    GermSpec::new(n, twist, radius)
}

pub fn germ_to_string(g: &GermSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!("n {}\n", g.n()));
    out.push_str(&format!("domain_radius {}\n", g.domain_radius()));
    for (i, f) in g.twist_functions().iter().enumerate() {
        for t in f.terms() {
            out.push_str(&format!("term {} {}", i + 1, t.coeff));
            for e in &t.exponents {
                out.push_str(&format!(" {e}"));
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germ::{counterexample_germ, hopf_germ};

    #[test]
    fn matrix_parses_fractions_comments_and_blanks() {
        let text = "# a skew matrix\n\n0 1/2\n-1/2 0\n";
        let sm = parse_scalar_matrix(text).unwrap();
        assert_eq!((sm.rows(), sm.cols()), (2, 2));
        assert!(sm.all_rational());
        let m = sm.to_matrix().unwrap();
        assert_eq!(m[(0, 1)], 0.5);
    }

    #[test]
    fn ragged_rows_and_bad_tokens_report_line_numbers() {
        let err = parse_scalar_matrix("1 2\n3\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let err = parse_scalar_matrix("1 2\n3 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert!(parse_scalar_matrix("# only comments\n").is_err());
    }

    #[test]
    fn skew_check_is_exact_for_fractions() {
        let good = parse_scalar_matrix("0 1/3\n-1/3 0\n").unwrap();
        assert!(skew_from_scalar_matrix(&good).is_ok());
        // a mixed matrix falls back to the float tolerance and passes
        let mixed = parse_scalar_matrix("0 0.25\n-1/4 0\n").unwrap();
        assert!(skew_from_scalar_matrix(&mixed).is_ok());
        let bad = parse_scalar_matrix("0 1/3\n-1/3 1/7\n").unwrap();
        match skew_from_scalar_matrix(&bad).unwrap_err() {
            Error::NotSkew { i, j, .. } => assert_eq!((i, j), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
        let ident = parse_scalar_matrix("1 0\n0 1\n").unwrap();
        assert!(matches!(
            skew_from_scalar_matrix(&ident),
            Err(Error::NotSkew { .. })
        ));
    }

    #[test]
    fn matrix_text_round_trips_values() {
        let m = Matrix::from_rows(&[vec![0.0, -0.5], vec![0.5, 0.0]]).unwrap();
        let text = matrix_to_string(&m);
        assert_eq!(text, "0 -0.5\n0.5 0\n");
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn germ_files_round_trip_fractions_bit_exactly() {
        for g in [
            hopf_germ(2).unwrap(),
            counterexample_germ(2).unwrap(),
            counterexample_germ(3).unwrap(),
        ] {
            let text = germ_to_string(&g);
            let reparsed = parse_germ(&text).unwrap();
            assert_eq!(germ_to_string(&reparsed), text);
            // coefficients identical as scalars, not just as floats
            for (f1, f2) in g.twist_functions().iter().zip(reparsed.twist_functions()) {
                assert_eq!(f1, f2);
            }
        }
    }

    #[test]
    fn counterexample_germ_file_is_the_expected_golden_text() {
        let g = counterexample_germ(2).unwrap();
        let text = germ_to_string(&g);
        let want = "n 2\n\
                    domain_radius 1/10\n\
                    term 1 -1/2 0 1 0 0\n\
                    term 2 1/2 1 0 0 0\n\
                    term 3 -1/2 0 0 0 1\n\
                    term 3 1 1 0 0 0\n\
                    term 4 1/2 0 0 1 0\n\
                    term 4 1 0 1 0 0\n";
        assert_eq!(text, want);
    }

    #[test]
    fn germ_parse_errors_carry_line_numbers() {
        let missing_n = "domain_radius 1/10\nterm 1 1 1 0\n";
        let err = parse_germ(missing_n).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let bad_index = "n 1\ndomain_radius 1/10\nterm 5 1 1 0\n";
        let err = parse_germ(bad_index).unwrap_err();
        assert!(err.to_string().contains("line 3"));
        let wrong_arity = "n 1\ndomain_radius 1/10\nterm 1 1 1\n";
        let err = parse_germ(wrong_arity).unwrap_err();
        assert!(err.to_string().contains("line 3"));
        let unknown = "n 1\nradius 1/10\n";
        let err = parse_germ(unknown).unwrap_err();
        assert!(err.to_string().contains("line 2"));
        let too_deep = "n 1\ndomain_radius 1/10\nterm 1 1 4 0\n";
        let err = parse_germ(too_deep).unwrap_err();
        assert!(err.to_string().contains("degree"));
    }

    #[test]
    fn invalid_germ_data_is_a_validation_error_not_a_parse_error() {
        // f_1 = 20 x_2 breaks h inside the default ball
        let text = "n 1\ndomain_radius 1/10\nterm 1 20 0 1\n";
        assert!(matches!(parse_germ(text), Err(Error::InvalidGerm(_))));
    }
}
