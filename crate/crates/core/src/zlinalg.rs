//! Exact integer linear algebra: Smith normal form with unimodular
//! transforms, rank, the integer kernel lattice, and the degree map
//! `deg: F → ℤ` read off from the kernel of an exponent-sum matrix.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::eqlang::{exponent_matrix, EquationSystem};
use crate::word::LetterKind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZError {
    #[error("no indexing exists: exponent matrix has rank {rank} = number of unknowns ({unknowns}); Theorem 1 hypothesis fails")]
    NoIndexing { rank: usize, unknowns: usize },
}

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed when there are no rows.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>], cols: usize) -> Self {
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, v) in r.iter().enumerate() {
                m.data[i * cols + j] = v.clone().into();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    *out.get_mut(i, j) += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[target] += factor · row[source]
    fn add_row_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(source, j) * factor;
            *self.get_mut(target, j) += v;
        }
    }

    /// col[target] += factor · col[source]
    fn add_col_multiple(&mut self, target: usize, source: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, source) * factor;
            *self.get_mut(i, target) += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = self.get_mut(i, j);
            *v = -std::mem::take(v);
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, v) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ")")
    }
}

/// `U·A·V = D` with `U`, `V` unimodular and `D` diagonal, `d₁ | d₂ | …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d.get(i, i).clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|d| !d.is_zero()).count()
    }
}

/// Smith normal form, pivoting on the entry of smallest nonzero absolute
/// value in the remaining block.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (n, m) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(m);

    for t in 0..n.min(m) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&d, t) else {
                debug_assert!(is_valid_snf(a, &u, &d, &v));
                return SnfResult { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d.get(t, t).clone();
            let mut leftover = false;
            for i in t + 1..n {
                let q = d.get(i, t) / &pivot;
                if !q.is_zero() {
                    let neg = -q;
                    d.add_row_multiple(i, t, &neg);
                    u.add_row_multiple(i, t, &neg);
                }
                leftover |= !d.get(i, t).is_zero();
            }
            for j in t + 1..m {
                let q = d.get(t, j) / &pivot;
                if !q.is_zero() {
                    let neg = -q;
                    d.add_col_multiple(j, t, &neg);
                    v.add_col_multiple(j, t, &neg);
                }
                leftover |= !d.get(t, j).is_zero();
            }
            if leftover {
                continue;
            }
            // Pivot must divide the rest of the block; otherwise fold the
            // offending row into row t and reduce again.
            let offending = (t + 1..n).find(|&i| (t + 1..m).any(|j| !d.get(i, j).is_multiple_of(&pivot)));
            match offending {
                Some(i) => {
                    d.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    debug_assert!(is_valid_snf(a, &u, &d, &v));
    SnfResult { u, d, v }
}

fn smallest_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let x = d.get(i, j);
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d.get(bi, bj).magnitude() <= x.magnitude() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn is_valid_snf(a: &IntMatrix, u: &IntMatrix, d: &IntMatrix, v: &IntMatrix) -> bool {
    if &u.mul(a).mul(v) != d {
        return false;
    }
    let diag: Vec<&BigInt> = (0..d.rows.min(d.cols)).map(|i| d.get(i, i)).collect();
    let off_diagonal_zero = (0..d.rows).all(|i| (0..d.cols).all(|j| i == j || d.get(i, j).is_zero()));
    let chain = diag.windows(2).all(|w| {
        if w[0].is_zero() {
            w[1].is_zero()
        } else {
            w[1].is_multiple_of(w[0])
        }
    });
    off_diagonal_zero && chain && diag.iter().all(|x| !x.is_negative())
}

pub fn rank(a: &IntMatrix) -> usize {
    smith_normal_form(a).rank()
}

/// Lattice basis of `{v ∈ ℤᵐ : A·v = 0}`: the last `m − rank` columns of `V`.
pub fn kernel_basis(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    (r..a.cols).map(|j| snf.v.column(j)).collect()
}

/// A surjective degree map `deg: F → ℤ` killing every equation word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Indexing {
    unknowns: Vec<String>,
    degrees: Vec<BigInt>,
}

impl Indexing {
    pub fn new(unknowns: Vec<String>, degrees: Vec<BigInt>) -> Self {
        assert_eq!(unknowns.len(), degrees.len());
        Indexing { unknowns, degrees }
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    /// Degrees of the unknowns, in unknown order.
    pub fn degrees(&self) -> &[BigInt] {
        &self.degrees
    }

    /// Degree of a generator; coefficient atoms have degree zero.
    pub fn degree_of(&self, symbol: &str, kind: LetterKind) -> BigInt {
        match kind {
            LetterKind::Coefficient => BigInt::zero(),
            LetterKind::Unknown => self
                .unknowns
                .iter()
                .position(|u| u == symbol)
                .map(|i| self.degrees[i].clone())
                .unwrap_or_default(),
        }
    }
}

impl fmt::Display for Indexing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (u, d)) in self.unknowns.iter().zip(&self.degrees).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}:{d}")?;
        }
        Ok(())
    }
}

/// Takes the first kernel basis vector of the exponent matrix, divides it by
/// the gcd of its entries and makes its first nonzero entry positive.
pub fn make_indexing(sys: &EquationSystem) -> Result<Indexing, ZError> {
    let m = exponent_matrix(sys);
    let unknowns = sys.unknowns().len();
    let basis = kernel_basis(&m);
    let Some(first) = basis.into_iter().next() else {
        return Err(ZError::NoIndexing {
            rank: rank(&m),
            unknowns,
        });
    };
    let g = first.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut degrees: Vec<BigInt> = first.iter().map(|x| x / &g).collect();
    if degrees.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        degrees.iter_mut().for_each(|x| *x = -std::mem::take(x));
    }
    debug_assert!(m.mul_vec(&degrees).iter().all(Zero::is_zero));
    Ok(Indexing::new(sys.unknowns().to_vec(), degrees))
}
