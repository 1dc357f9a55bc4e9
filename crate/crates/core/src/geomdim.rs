//! Solution varieties of equation systems over small matrix groups.
//!
//! A group element is a block-diagonal matrix whose entries are polynomial
//! variables, cut out by the group's defining equations. Each equation
//! `w = 1` becomes the entries of a matrix identity, and the dimension of the
//! solution variety is read off a Gröbner basis. Computations run over ℚ and
//! are repeated over `F_32003` as a cross-check.
//!
//! All bounds are compared with the dimension of the whole variety, which is
//! the largest dimension of an irreducible component. The theorems bound
//! every component; the check here is a necessary consequence of that.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::eqlang::{exponent_matrix, CoefficientValue, EquationSystem, GeqDocument};
use crate::poly::{
    buchberger, ideal_dimension, Coeff, Dimension, GroebnerBasis, MonomialOrder, PolyError, PolyRing, Polynomial,
    DEFAULT_PAIR_BUDGET, F32003,
};
use crate::word::LetterKind;
use crate::zlinalg::rank;

/// Longest word accepted by the direct encoding.
pub const DIRECT_LENGTH_LIMIT: usize = 8;
/// Largest polynomial ring the dimension search supports.
pub const MAX_VARIABLES: usize = 128;

pub type RationalMatrix = Vec<Vec<BigRational>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("unsupported group model {0:?}; expected SL2, GL2, torus(k) or product(...)")]
    UnsupportedModel(String),
    #[error("model {model} failed its self-check: defining ideal has dimension {got}, expected {expected}")]
    SelfCheck {
        model: String,
        got: String,
        expected: usize,
    },
    #[error(
        "equation {equation} has length {length}, above the direct-encoding limit of {limit}; use the slp encoding"
    )]
    DirectTooLong {
        equation: usize,
        length: usize,
        limit: usize,
    },
    #[error("the encoding needs at least {needed} variables, above the limit of {limit}")]
    TooManyVariables { needed: usize, limit: usize },
    #[error("coefficient {0} has no matrix value")]
    UnboundCoefficient(String),
    #[error("coefficient {atom} is not an element of {model}: {reason}")]
    NotInGroup {
        atom: String,
        model: String,
        reason: String,
    },
    #[error("coefficient {atom} cannot be reduced modulo {p}")]
    NotReducible { atom: String, p: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Sl2,
    Gl2,
    Torus(usize),
    Product(Vec<ModelKind>),
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::Sl2 => write!(f, "SL2"),
            ModelKind::Gl2 => write!(f, "GL2"),
            ModelKind::Torus(k) => write!(f, "torus({k})"),
            ModelKind::Product(parts) => {
                let inner: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "product({})", inner.join(","))
            }
        }
    }
}

impl FromStr for ModelKind {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeomError::UnsupportedModel(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let upper = t.to_ascii_uppercase();
        if upper == "SL2" {
            return Ok(ModelKind::Sl2);
        }
        if upper == "GL2" {
            return Ok(ModelKind::Gl2);
        }
        let inner = |prefix: &str| {
            upper
                .strip_prefix(prefix)
                .and_then(|r| r.strip_suffix(')'))
                .map(|_| &t[prefix.len()..t.len() - 1])
        };
        if let Some(k) = inner("TORUS(") {
            let k: usize = k.parse().map_err(|_| bad())?;
            return if k == 0 { Err(bad()) } else { Ok(ModelKind::Torus(k)) };
        }
        if let Some(body) = inner("PRODUCT(") {
            let mut parts = Vec::new();
            let (mut depth, mut start) = (0usize, 0usize);
            for (i, c) in body.char_indices() {
                match c {
                    '(' => depth += 1,
                    ')' => depth = depth.checked_sub(1).ok_or_else(bad)?,
                    ',' if depth == 0 => {
                        parts.push(body[start..i].parse()?);
                        start = i + 1;
                    }
                    _ => {}
                }
            }
            parts.push(body[start..].parse()?);
            return if parts.len() < 2 {
                Err(bad())
            } else {
                Ok(ModelKind::Product(parts))
            };
        }
        Err(bad())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Component {
    Sl2,
    Gl2,
    Torus(usize),
}

impl Component {
    fn nvars(self) -> usize {
        match self {
            Component::Sl2 => 4,
            Component::Gl2 => 5,
            Component::Torus(k) => 2 * k,
        }
    }

    fn size(self) -> usize {
        match self {
            Component::Sl2 | Component::Gl2 => 2,
            Component::Torus(k) => k,
        }
    }

    fn dim(self) -> usize {
        match self {
            Component::Sl2 => 3,
            Component::Gl2 => 4,
            Component::Torus(k) => k,
        }
    }

    fn var_names(self, prefix: &str) -> Vec<String> {
        match self {
            Component::Sl2 => ["a", "b", "c", "d"].iter().map(|v| format!("{prefix}_{v}")).collect(),
            Component::Gl2 => ["a", "b", "c", "d", "e"]
                .iter()
                .map(|v| format!("{prefix}_{v}"))
                .collect(),
            Component::Torus(k) => (1..=k)
                .map(|i| format!("{prefix}_t{i}"))
                .chain((1..=k).map(|i| format!("{prefix}_s{i}")))
                .collect(),
        }
    }

    fn aux_names(self, prefix: &str) -> Vec<String> {
        match self {
            Component::Sl2 | Component::Gl2 => ["11", "12", "21", "22"]
                .iter()
                .map(|v| format!("{prefix}_{v}"))
                .collect(),
            Component::Torus(k) => (1..=k).map(|i| format!("{prefix}_{i}")).collect(),
        }
    }
}

fn flatten(kind: &ModelKind, out: &mut Vec<Component>) {
    match kind {
        ModelKind::Sl2 => out.push(Component::Sl2),
        ModelKind::Gl2 => out.push(Component::Gl2),
        ModelKind::Torus(k) => out.push(Component::Torus(*k)),
        ModelKind::Product(parts) => parts.iter().for_each(|p| flatten(p, out)),
    }
}

/// A matrix group presented as an affine variety.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarietyModel {
    kind: ModelKind,
    components: Vec<Component>,
}

impl VarietyModel {
    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    /// Variables per group element.
    pub fn nvars(&self) -> usize {
        self.components.iter().map(|c| c.nvars()).sum()
    }

    /// Matrix size of a group element.
    pub fn size(&self) -> usize {
        self.components.iter().map(|c| c.size()).sum()
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.dim()).sum()
    }

    fn var_names(&self, prefix: &str) -> Vec<String> {
        self.block_prefixes(prefix)
            .into_iter()
            .zip(&self.components)
            .flat_map(|(p, c)| c.var_names(&p))
            .collect()
    }

    fn aux_names(&self, prefix: &str) -> Vec<String> {
        self.block_prefixes(prefix)
            .into_iter()
            .zip(&self.components)
            .flat_map(|(p, c)| c.aux_names(&p))
            .collect()
    }

    fn block_prefixes(&self, prefix: &str) -> Vec<String> {
        if self.components.len() == 1 {
            vec![prefix.to_string()]
        } else {
            (1..=self.components.len()).map(|i| format!("{prefix}{i}")).collect()
        }
    }

    /// Whether inverting an element costs more than degree one.
    fn has_gl2(&self) -> bool {
        self.components.contains(&Component::Gl2)
    }

    fn inverse_degree(&self) -> usize {
        if self.has_gl2() {
            3
        } else {
            1
        }
    }

    /// Walks the blocks with their variable and matrix offsets.
    fn blocks(&self) -> impl Iterator<Item = (Component, usize, usize)> + '_ {
        let (mut v, mut m) = (0, 0);
        self.components.iter().map(move |&c| {
            let out = (c, v, m);
            v += c.nvars();
            m += c.size();
            out
        })
    }

    fn zero_matrix<C: Coeff>(&self, ring: &Arc<PolyRing>) -> PolyMatrix<C> {
        let n = self.size();
        vec![vec![Polynomial::zero(ring); n]; n]
    }

    fn element<C: Coeff>(&self, ring: &Arc<PolyRing>, start: usize) -> PolyMatrix<C> {
        let mut out = self.zero_matrix(ring);
        let var = |i: usize| Polynomial::<C>::var(ring, start + i);
        for (c, v, m) in self.blocks() {
            match c {
                Component::Sl2 | Component::Gl2 => {
                    out[m][m] = var(v);
                    out[m][m + 1] = var(v + 1);
                    out[m + 1][m] = var(v + 2);
                    out[m + 1][m + 1] = var(v + 3);
                }
                Component::Torus(k) => (0..k).for_each(|i| out[m + i][m + i] = var(v + i)),
            }
        }
        out
    }

    /// Adjugate for SL2, `e·adj` for GL2, the `s` variables for a torus.
    fn inverse<C: Coeff>(&self, ring: &Arc<PolyRing>, start: usize) -> PolyMatrix<C> {
        let mut out = self.zero_matrix(ring);
        let var = |i: usize| Polynomial::<C>::var(ring, start + i);
        for (c, v, m) in self.blocks() {
            match c {
                Component::Sl2 | Component::Gl2 => {
                    let mut adj = [var(v + 3), var(v + 1).neg(), var(v + 2).neg(), var(v)];
                    if c == Component::Gl2 {
                        let e = var(v + 4);
                        adj = adj.map(|p| p.mul(&e).expect("same ring"));
                    }
                    let [p, q, r, s] = adj;
                    out[m][m] = p;
                    out[m][m + 1] = q;
                    out[m + 1][m] = r;
                    out[m + 1][m + 1] = s;
                }
                Component::Torus(k) => (0..k).for_each(|i| out[m + i][m + i] = var(v + k + i)),
            }
        }
        out
    }

    fn constraints<C: Coeff>(&self, ring: &Arc<PolyRing>, start: usize) -> Vec<Polynomial<C>> {
        let var = |i: usize| Polynomial::<C>::var(ring, start + i);
        let one = Polynomial::constant(ring, C::one());
        let mut out = Vec::new();
        for (c, v, _) in self.blocks() {
            match c {
                Component::Sl2 | Component::Gl2 => {
                    let ad = var(v).mul(&var(v + 3)).expect("same ring");
                    let bc = var(v + 1).mul(&var(v + 2)).expect("same ring");
                    let mut det = ad.sub(&bc).expect("same ring");
                    if c == Component::Gl2 {
                        det = det.mul(&var(v + 4)).expect("same ring");
                    }
                    out.push(det.sub(&one).expect("same ring"));
                }
                Component::Torus(k) => {
                    for i in 0..k {
                        out.push(
                            var(v + i)
                                .mul(&var(v + k + i))
                                .expect("same ring")
                                .sub(&one)
                                .expect("same ring"),
                        );
                    }
                }
            }
        }
        out
    }

    /// A block-diagonal matrix of free variables.
    fn aux_matrix<C: Coeff>(&self, ring: &Arc<PolyRing>, start: usize) -> PolyMatrix<C> {
        let mut out = self.zero_matrix(ring);
        let mut v = start;
        for (c, _, m) in self.blocks() {
            match c {
                Component::Sl2 | Component::Gl2 => {
                    for (r, col) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        out[m + r][m + col] = Polynomial::var(ring, v);
                        v += 1;
                    }
                }
                Component::Torus(k) => {
                    for i in 0..k {
                        out[m + i][m + i] = Polynomial::var(ring, v);
                        v += 1;
                    }
                }
            }
        }
        out
    }

    /// Checks that a rational matrix is an element of the group.
    pub fn validate(&self, atom: &str, mat: &RationalMatrix) -> Result<(), GeomError> {
        let n = self.size();
        let fail = |reason: String| GeomError::NotInGroup {
            atom: atom.to_string(),
            model: self.kind.to_string(),
            reason,
        };
        if mat.len() != n || mat.iter().any(|r| r.len() != n) {
            return Err(fail(format!("expected a {n}x{n} matrix")));
        }
        let mut block_of = vec![0usize; n];
        for (idx, (c, _, m)) in self.blocks().enumerate() {
            (m..m + c.size()).for_each(|i| block_of[i] = idx);
        }
        for i in 0..n {
            for j in 0..n {
                if block_of[i] != block_of[j] && !Zero::is_zero(&mat[i][j]) {
                    return Err(fail(format!(
                        "entry ({},{}) lies outside the diagonal blocks",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (c, _, m) in self.blocks() {
            match c {
                Component::Sl2 | Component::Gl2 => {
                    let det = &mat[m][m] * &mat[m + 1][m + 1] - &mat[m][m + 1] * &mat[m + 1][m];
                    if c == Component::Sl2 && !One::is_one(&det) {
                        return Err(fail(format!("determinant {det} is not 1")));
                    }
                    if Zero::is_zero(&det) {
                        return Err(fail("matrix is singular".into()));
                    }
                }
                Component::Torus(k) => {
                    for (i, row) in mat.iter().enumerate().skip(m).take(k) {
                        for (j, x) in row.iter().enumerate().skip(m).take(k) {
                            if i != j && !Zero::is_zero(x) {
                                return Err(fail("torus elements are diagonal".into()));
                            }
                        }
                        if Zero::is_zero(&mat[i][i]) {
                            return Err(fail("matrix is singular".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Builds the model and checks that its defining ideal has the declared
/// dimension.
pub fn build_group_model(kind: &ModelKind) -> Result<VarietyModel, GeomError> {
    let mut components = Vec::new();
    flatten(kind, &mut components);
    if components.iter().any(|c| matches!(c, Component::Torus(0))) {
        return Err(GeomError::UnsupportedModel(kind.to_string()));
    }
    let model = VarietyModel {
        kind: kind.clone(),
        components,
    };
    if model.nvars() > MAX_VARIABLES {
        return Err(GeomError::TooManyVariables {
            needed: model.nvars(),
            limit: MAX_VARIABLES,
        });
    }
    let ring = PolyRing::new(model.var_names("g"), MonomialOrder::DegRevLex);
    let gens = model.constraints::<BigRational>(&ring, 0);
    let gb = buchberger(&ring, &gens, DEFAULT_PAIR_BUDGET)?;
    let got = ideal_dimension(&gb);
    if got != Dimension::Finite(model.dim()) {
        return Err(GeomError::SelfCheck {
            model: kind.to_string(),
            got: got.to_string(),
            expected: model.dim(),
        });
    }
    Ok(model)
}

type PolyMatrix<C> = Vec<Vec<Polynomial<C>>>;

fn mat_mul<C: Coeff>(a: &PolyMatrix<C>, b: &PolyMatrix<C>) -> PolyMatrix<C> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(Polynomial::zero(a[0][0].ring()), |acc, k| {
                        if a[i][k].is_zero() || b[k][j].is_zero() {
                            acc
                        } else {
                            acc.add(&a[i][k].mul(&b[k][j]).expect("same ring")).expect("same ring")
                        }
                    })
                })
                .collect()
        })
        .collect()
}

fn mat_identity<C: Coeff>(ring: &Arc<PolyRing>, n: usize) -> PolyMatrix<C> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Polynomial::constant(ring, C::one())
                    } else {
                        Polynomial::zero(ring)
                    }
                })
                .collect()
        })
        .collect()
}

/// Nonzero entries of `a − b`.
fn entry_differences<C: Coeff>(a: &PolyMatrix<C>, b: &PolyMatrix<C>) -> Vec<Polynomial<C>> {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x.sub(y).expect("same ring")))
        .filter(|p| !p.is_zero())
        .collect()
}

fn constant_matrix<C: Coeff>(ring: &Arc<PolyRing>, atom: &str, m: &RationalMatrix) -> Result<PolyMatrix<C>, GeomError> {
    m.iter()
        .map(|row| {
            row.iter()
                .map(|q| {
                    C::from_rational(q)
                        .map(|c| Polynomial::constant(ring, c))
                        .ok_or_else(|| GeomError::NotReducible {
                            atom: atom.to_string(),
                            p: C::characteristic(),
                        })
                })
                .collect()
        })
        .collect()
}

fn rational_inverse(m: &RationalMatrix) -> RationalMatrix {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    <BigRational as One>::one()
                } else {
                    <BigRational as Zero>::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !Zero::is_zero(&a[r][col]))
            .expect("invertible matrix");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        a[col].iter_mut().for_each(|x| *x *= &inv);
        for r in 0..n {
            if r != col && !Zero::is_zero(&a[r][col]) {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                a[r].iter_mut().zip(&pivot_row).for_each(|(x, p)| *x -= &f * p);
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Matrix values of coefficient atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatrixBinding {
    values: BTreeMap<String, RationalMatrix>,
}

impl MatrixBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, atom: &str, m: RationalMatrix) -> Self {
        self.values.insert(atom.to_string(), m);
        self
    }

    pub fn get(&self, atom: &str) -> Option<&RationalMatrix> {
        self.values.get(atom)
    }

    /// Collects every atom with a matrix value.
    pub fn from_document(doc: &GeqDocument) -> Self {
        let values = doc
            .coefficients
            .iter()
            .filter_map(|(name, v)| match v {
                Some(CoefficientValue::Matrix(m)) => Some((name.clone(), m.clone())),
                _ => None,
            })
            .collect();
        MatrixBinding { values }
    }

    /// Values of the atoms the system uses, validated against the model.
    pub fn used_values(
        &self,
        sys: &EquationSystem,
        model: &VarietyModel,
    ) -> Result<Vec<(String, RationalMatrix)>, GeomError> {
        sys.used_atoms()
            .into_iter()
            .map(|a| {
                let m = self
                    .get(a)
                    .ok_or_else(|| GeomError::UnboundCoefficient(a.to_string()))?;
                model.validate(a, m)?;
                Ok((a.to_string(), m.clone()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Encoding {
    /// Each equation becomes one matrix identity `u = v⁻¹`.
    Direct,
    /// One auxiliary block per word prefix, all constraints of degree ≤ 2.
    Slp,
    /// Direct when every equation fits the length limit, else slp.
    #[default]
    Auto,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Direct => "direct",
            Encoding::Slp => "slp",
            Encoding::Auto => "auto",
        })
    }
}

impl FromStr for Encoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Encoding::Direct),
            "slp" => Ok(Encoding::Slp),
            "auto" => Ok(Encoding::Auto),
            _ => Err(format!("unknown encoding {s:?}; expected direct, slp or auto")),
        }
    }
}

/// One letter of an expanded word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    Unknown { index: usize, inverse: bool },
    Coefficient { index: usize, inverse: bool },
}

impl Unit {
    fn inverted(self) -> Unit {
        match self {
            Unit::Unknown { index, inverse } => Unit::Unknown {
                index,
                inverse: !inverse,
            },
            Unit::Coefficient { index, inverse } => Unit::Coefficient {
                index,
                inverse: !inverse,
            },
        }
    }

    fn is_inverse_unknown(self) -> bool {
        matches!(self, Unit::Unknown { inverse: true, .. })
    }
}

fn expand(sys: &EquationSystem, limit: usize) -> Result<Vec<Vec<Unit>>, GeomError> {
    let atoms: Vec<&str> = sys.used_atoms();
    let mut out = Vec::new();
    for eq in sys.equations() {
        let mut units = Vec::new();
        for letter in eq.lhs().letters() {
            let e = letter.exponent();
            let reps =
                e.magnitude()
                    .to_usize()
                    .filter(|&r| units.len() + r <= limit)
                    .ok_or(GeomError::TooManyVariables {
                        needed: limit + 1,
                        limit,
                    })?;
            let inverse = e.sign() == num_bigint::Sign::Minus;
            let unit = match letter.kind() {
                LetterKind::Unknown => Unit::Unknown {
                    index: sys
                        .unknowns()
                        .iter()
                        .position(|u| u == letter.symbol())
                        .expect("declared unknown"),
                    inverse,
                },
                LetterKind::Coefficient => Unit::Coefficient {
                    index: atoms.iter().position(|a| *a == letter.symbol()).expect("used atom"),
                    inverse,
                },
            };
            units.extend(std::iter::repeat_n(unit, reps));
        }
        out.push(units);
    }
    Ok(out)
}

/// The rotation and split `w ~ u·v` minimizing the degree of `u = v⁻¹`,
/// then the number of inverted unknowns. Returns `(u, v⁻¹)`.
fn best_split(units: &[Unit], inverse_degree: usize) -> (Vec<Unit>, Vec<Unit>) {
    let n = units.len();
    let degree = |side: &[Unit]| -> usize {
        side.iter()
            .map(|u| match u {
                Unit::Unknown { inverse: false, .. } => 1,
                Unit::Unknown { inverse: true, .. } => inverse_degree,
                Unit::Coefficient { .. } => 0,
            })
            .sum()
    };
    type Candidate = ((usize, usize, usize), Vec<Unit>, Vec<Unit>);
    let mut best: Option<Candidate> = None;
    for r in 0..n.max(1) {
        let rotated: Vec<Unit> = units[r..].iter().chain(&units[..r]).copied().collect();
        for k in 0..=n {
            let u = rotated[..k].to_vec();
            let v_inv: Vec<Unit> = rotated[k..].iter().rev().map(|x| x.inverted()).collect();
            let (du, dv) = (degree(&u), degree(&v_inv));
            let inverses = u.iter().chain(&v_inv).filter(|x| x.is_inverse_unknown()).count();
            let cost = (du.max(dv), inverses, du + dv);
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, u, v_inv));
            }
        }
    }
    let (_, u, v) = best.expect("at least one split");
    (u, v)
}

/// The polynomial ideal whose zero set is the solution variety.
#[derive(Debug, Clone)]
pub struct SolutionIdeal<C: Coeff> {
    pub ring: Arc<PolyRing>,
    pub generators: Vec<Polynomial<C>>,
    pub encoding: Encoding,
    /// Variables belonging to the unknowns' blocks.
    pub block_vars: usize,
    /// Auxiliary variables, each a function of the block variables.
    pub aux_vars: usize,
}

/// Picks the encoding from exact letter counts, before anything is expanded.
/// Every slp step adds at least one variable, so an equation longer than
/// [`MAX_VARIABLES`] letters cannot be encoded at all.
fn resolve_encoding(sys: &EquationSystem, encoding: Encoding) -> Result<Encoding, GeomError> {
    let lengths: Vec<BigUint> = sys
        .equations()
        .iter()
        .map(|eq| {
            eq.lhs()
                .letters()
                .iter()
                .map(|l| l.exponent().magnitude().clone())
                .sum()
        })
        .collect();
    let longest = lengths.iter().enumerate().max_by_key(|(_, n)| *n);
    let saturate = |n: &BigUint| n.to_usize().unwrap_or(usize::MAX);
    match (encoding, longest) {
        (Encoding::Direct, Some((i, n))) if *n > BigUint::from(DIRECT_LENGTH_LIMIT) => Err(GeomError::DirectTooLong {
            equation: i + 1,
            length: saturate(n),
            limit: DIRECT_LENGTH_LIMIT,
        }),
        (_, Some((_, n))) if *n > BigUint::from(MAX_VARIABLES) => Err(GeomError::TooManyVariables {
            needed: saturate(n),
            limit: MAX_VARIABLES,
        }),
        (Encoding::Auto, Some((_, n))) if *n > BigUint::from(DIRECT_LENGTH_LIMIT) => Ok(Encoding::Slp),
        (Encoding::Auto, _) => Ok(Encoding::Direct),
        (e, _) => Ok(e),
    }
}

/// Translates a system into a polynomial ideal over `C`.
pub fn word_to_ideal<C: Coeff>(
    sys: &EquationSystem,
    model: &VarietyModel,
    bind: &MatrixBinding,
    encoding: Encoding,
) -> Result<SolutionIdeal<C>, GeomError> {
    let coeffs = bind.used_values(sys, model)?;
    let encoding = resolve_encoding(sys, encoding)?;
    let units = expand(sys, MAX_VARIABLES)?;
    let m = sys.unknowns().len();

    // Slp variable layout: prefix blocks, newest first, then the unknowns.
    // Under the block order eliminating the auxiliaries, each prefix
    // constraint then leads with its own new variable. Inverses stay inline
    // (adj(X), or e·adj(X) over GL2); a separate inverse block makes GL2
    // bases blow up.
    let mut prefix_labels: Vec<(usize, usize)> = Vec::new();
    if encoding == Encoding::Slp {
        for (e, word) in units.iter().enumerate() {
            prefix_labels.extend((1..word.len()).map(|j| (e, j)));
        }
    }
    let aux_block = model.aux_names("t").len();
    let aux_vars = prefix_labels.len() * aux_block;
    let block_vars = m * model.nvars();
    if aux_vars + block_vars > MAX_VARIABLES {
        return Err(GeomError::TooManyVariables {
            needed: aux_vars + block_vars,
            limit: MAX_VARIABLES,
        });
    }
    let mut names: Vec<String> = Vec::with_capacity(aux_vars + block_vars);
    let mut prefix_aux: Vec<Vec<usize>> = units.iter().map(|_| Vec::new()).collect();
    for &(e, j) in prefix_labels.iter().rev() {
        prefix_aux[e].push(names.len());
        names.extend(model.aux_names(&format!("u{}_{}", e + 1, j)));
    }
    prefix_aux.iter_mut().for_each(|starts| starts.reverse());
    names.extend(sys.unknowns().iter().flat_map(|u| model.var_names(u)));
    let order = if aux_vars > 0 {
        MonomialOrder::Block(aux_vars)
    } else {
        MonomialOrder::DegRevLex
    };
    let ring = PolyRing::new(names, order);

    let mut generators = Vec::new();
    let block = |j: usize| aux_vars + j * model.nvars();
    let elements: Vec<PolyMatrix<C>> = (0..m).map(|j| model.element(&ring, block(j))).collect();
    let inverses: Vec<PolyMatrix<C>> = (0..m).map(|j| model.inverse(&ring, block(j))).collect();
    for j in 0..m {
        generators.extend(model.constraints(&ring, block(j)));
    }
    let mut coeff_mats = Vec::new();
    for (atom, value) in &coeffs {
        coeff_mats.push((
            constant_matrix::<C>(&ring, atom, value)?,
            constant_matrix::<C>(&ring, atom, &rational_inverse(value))?,
        ));
    }
    let matrix_of = |u: &Unit| -> PolyMatrix<C> {
        match *u {
            Unit::Unknown { index, inverse: false } => elements[index].clone(),
            Unit::Unknown { index, inverse: true } => inverses[index].clone(),
            Unit::Coefficient { index, inverse } => {
                if inverse {
                    coeff_mats[index].1.clone()
                } else {
                    coeff_mats[index].0.clone()
                }
            }
        }
    };
    let product = |side: &[Unit]| {
        side.iter()
            .fold(mat_identity(&ring, model.size()), |acc, u| mat_mul(&acc, &matrix_of(u)))
    };
    let identity = mat_identity::<C>(&ring, model.size());

    for (e, word) in units.iter().enumerate() {
        match encoding {
            Encoding::Slp if word.len() >= 2 => {
                let starts = &prefix_aux[e];
                let mut prev = mat_mul(&matrix_of(&word[0]), &matrix_of(&word[1]));
                for (j, &start) in starts.iter().enumerate() {
                    let u = model.aux_matrix(&ring, start);
                    generators.extend(entry_differences(&u, &prev));
                    if let Some(next) = word.get(j + 2) {
                        prev = mat_mul(&u, &matrix_of(next));
                    } else {
                        generators.extend(entry_differences(&u, &identity));
                    }
                }
            }
            Encoding::Slp => generators.extend(entry_differences(&product(word), &identity)),
            _ => {
                let (u, v_inv) = best_split(word, model.inverse_degree());
                generators.extend(entry_differences(&product(&u), &product(&v_inv)));
            }
        }
    }
    Ok(SolutionIdeal {
        ring,
        generators,
        encoding,
        block_vars,
        aux_vars,
    })
}

impl<C: Coeff> SolutionIdeal<C> {
    pub fn groebner(&self, budget: u64) -> Result<GroebnerBasis<C>, GeomError> {
        Ok(buchberger(&self.ring, &self.generators, budget)?)
    }
}

/// Dimension of the solution variety over `C`. Auxiliary variables are
/// determined by the block variables, so they contribute nothing.
pub fn solution_dimension<C: Coeff>(
    sys: &EquationSystem,
    model: &VarietyModel,
    bind: &MatrixBinding,
    encoding: Encoding,
    budget: u64,
) -> Result<Dimension, GeomError> {
    let ideal = word_to_ideal::<C>(sys, model, bind, encoding)?;
    Ok(ideal_dimension(&ideal.groebner(budget)?))
}

/// Dimension of the centralizer of `coeffs` in the group.
pub fn centralizer_dimension<C: Coeff>(
    model: &VarietyModel,
    coeffs: &[(String, RationalMatrix)],
    budget: u64,
) -> Result<usize, GeomError> {
    let ring = PolyRing::new(model.var_names("c"), MonomialOrder::DegRevLex);
    let x = model.element::<C>(&ring, 0);
    let mut gens = model.constraints::<C>(&ring, 0);
    for (atom, value) in coeffs {
        model.validate(atom, value)?;
        let c = constant_matrix::<C>(&ring, atom, value)?;
        gens.extend(entry_differences(&mat_mul(&x, &c), &mat_mul(&c, &x)));
    }
    let gb = buchberger(&ring, &gens, budget)?;
    // The identity always centralizes, so the variety is never empty.
    Ok(ideal_dimension(&gb).value().expect("centralizer contains the identity"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimOptions {
    pub encoding: Encoding,
    pub budget: u64,
    /// Repeat the computation over `F_32003`.
    pub crosscheck: bool,
}

impl Default for DimOptions {
    fn default() -> Self {
        DimOptions {
            encoding: Encoding::Auto,
            budget: DEFAULT_PAIR_BUDGET,
            crosscheck: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionReport {
    /// Dimension over ℚ.
    pub dimension: Dimension,
    /// Dimension over `F_32003`, when requested and computable.
    pub crosscheck: Option<Dimension>,
    pub encoding: Encoding,
    pub variables: usize,
    pub aux_vars: usize,
    pub warnings: Vec<String>,
}

/// Solution dimension over ℚ, with the `F_32003` cross-check run alongside.
pub fn analyze_dimension(
    sys: &EquationSystem,
    model: &VarietyModel,
    bind: &MatrixBinding,
    opts: &DimOptions,
) -> Result<DimensionReport, GeomError> {
    let ideal = word_to_ideal::<BigRational>(sys, model, bind, opts.encoding)?;
    let (rational, modular) = rayon::join(
        || ideal.groebner(opts.budget).map(|gb| ideal_dimension(&gb)),
        || {
            opts.crosscheck
                .then(|| solution_dimension::<F32003>(sys, model, bind, ideal.encoding, opts.budget))
        },
    );
    let dimension = rational?;
    let mut warnings = Vec::new();
    let crosscheck = match modular {
        None => None,
        Some(Ok(d)) => {
            if d != dimension {
                warnings.push(format!(
                    "dimension over F_32003 is {d} but over Q it is {dimension}; the prime may be unlucky"
                ));
            }
            Some(d)
        }
        Some(Err(e)) => {
            warnings.push(format!("cross-check over F_32003 skipped: {e}"));
            None
        }
    };
    Ok(DimensionReport {
        dimension,
        crosscheck,
        encoding: ideal.encoding,
        variables: ideal.ring.nvars(),
        aux_vars: ideal.aux_vars,
        warnings,
    })
}

/// A lower bound and whether the computed dimension meets it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    pub value: i64,
    pub passed: bool,
}

impl Bound {
    fn check(value: i64, dim: Dimension) -> Bound {
        let passed = match dim {
            Dimension::Empty => true,
            Dimension::Finite(d) => d as i64 >= value,
        };
        Bound { value, passed }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimVerdict {
    pub report: DimensionReport,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    pub group_dim: usize,
    /// `(m − n)·dim G`, always applicable.
    pub thm0: Bound,
    /// Dimension of the centralizer of the coefficients, when `rank < m`.
    pub thm1: Option<Bound>,
    /// `dim G` for coefficient-free systems with `rank < m`.
    pub corollary: Option<Bound>,
}

impl DimVerdict {
    pub fn passed(&self) -> bool {
        self.thm0.passed && self.thm1.is_none_or(|b| b.passed) && self.corollary.is_none_or(|b| b.passed)
    }
}

/// Bounds are compared with the largest component dimension.
pub const COMPONENT_NOTE: &str = "bounds are checked against the maximum dimension over irreducible components";

pub fn theorem_verdicts(
    sys: &EquationSystem,
    model: &VarietyModel,
    bind: &MatrixBinding,
    opts: &DimOptions,
) -> Result<DimVerdict, GeomError> {
    let m = sys.unknowns().len();
    let n = sys.equations().len();
    let r = rank(&exponent_matrix(sys));
    let coeffs = bind.used_values(sys, model)?;
    let (report, centralizer) = rayon::join(
        || analyze_dimension(sys, model, bind, opts),
        || centralizer_dimension::<BigRational>(model, &coeffs, opts.budget),
    );
    let report = report?;
    let dim = report.dimension;
    let g = model.dim() as i64;
    let thm0 = Bound::check((m as i64 - n as i64) * g, dim);
    let thm1 = if r < m {
        Some(Bound::check(centralizer? as i64, dim))
    } else {
        None
    };
    let corollary = (r < m && sys.is_coefficient_free()).then(|| Bound::check(g, dim));
    Ok(DimVerdict {
        report,
        unknowns: m,
        equations: n,
        rank: r,
        group_dim: model.dim(),
        thm0,
        thm1,
        corollary,
    })
}
