//! Exact multivariate polynomials, Gröbner bases and ideal dimension.
//!
//! Coefficients live in a [`Coeff`] field: exact rationals or a prime field
//! [`Zp`]. A polynomial is a list of terms sorted by decreasing monomial in
//! the ring's order. Over ℚ the Buchberger loop keeps every polynomial
//! primitive with integer coefficients and reduces fraction-free.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Default cap on S-pair reductions in [`buchberger`].
pub const DEFAULT_PAIR_BUDGET: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("polynomials belong to different rings")]
    RingMismatch,
    #[error("Gröbner basis computation exceeded its budget of {budget} pair reductions")]
    BudgetExceeded { budget: u64 },
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("coefficient {0} is not defined in this field")]
    BadCoefficient(String),
}

/// A coefficient field.
pub trait Coeff: Clone + PartialEq + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero.
    fn inv(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    /// Image of a rational number, `None` if its denominator vanishes.
    fn from_rational(q: &BigRational) -> Option<Self>;
    fn characteristic() -> u64;

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// `(a, b)` with `a·lc_p = b·lc_g`, used to cancel a leading term.
    fn cross_multipliers(lc_p: &Self, lc_g: &Self) -> (Self, Self) {
        (Self::one(), lc_p.mul(&lc_g.inv()))
    }

    /// Rescales a nonzero coefficient list (leading first) to its canonical
    /// associate: monic by default.
    fn normalize(coeffs: &mut [Self]) {
        if let Some(first) = coeffs.first() {
            let s = first.inv();
            for c in coeffs.iter_mut() {
                *c = c.mul(&s);
            }
        }
    }
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }
    fn characteristic() -> u64 {
        0
    }

    fn cross_multipliers(lc_p: &Self, lc_g: &Self) -> (Self, Self) {
        if lc_p.is_integer() && lc_g.is_integer() {
            let (p, g) = (lc_p.numer(), lc_g.numer());
            let d = p.gcd(g);
            let (mut a, mut b) = (g / &d, p / &d);
            if a.is_negative() {
                a = -a;
                b = -b;
            }
            (BigRational::from_integer(a), BigRational::from_integer(b))
        } else {
            (<Self as Coeff>::one(), lc_p / lc_g)
        }
    }

    /// Primitive integer content with a positive leading coefficient.
    fn normalize(coeffs: &mut [Self]) {
        if coeffs.is_empty() {
            return;
        }
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        let mut content = nums.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
        if nums[0].is_negative() {
            content = -content;
        }
        for (c, n) in coeffs.iter_mut().zip(nums) {
            *c = BigRational::from_integer(n / &content);
        }
    }
}

/// The prime field `F_P`. `P` must be prime; this is not checked.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Zp<const P: u64>(u64);

pub type F32003 = Zp<32003>;

impl<const P: u64> Zp<P> {
    pub fn new(v: i64) -> Self {
        Zp(v.rem_euclid(P as i64) as u64)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self.0 as u128;
        let mut acc = 1u128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % P as u128;
            }
            base = base * base % P as u128;
            e >>= 1;
        }
        Zp(acc as u64)
    }
}

impl<const P: u64> fmt::Display for Zp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u64> Coeff for Zp<P> {
    fn zero() -> Self {
        Zp(0)
    }
    fn one() -> Self {
        Zp(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn add(&self, other: &Self) -> Self {
        Zp(((self.0 as u128 + other.0 as u128) % P as u128) as u64)
    }
    fn sub(&self, other: &Self) -> Self {
        Zp(((self.0 as u128 + P as u128 - other.0 as u128) % P as u128) as u64)
    }
    fn mul(&self, other: &Self) -> Self {
        Zp((self.0 as u128 * other.0 as u128 % P as u128) as u64)
    }
    fn neg(&self) -> Self {
        Zp((P - self.0) % P)
    }
    fn inv(&self) -> Self {
        assert!(self.0 != 0, "inverse of zero in F_{P}");
        self.pow(P - 2)
    }
    fn from_i64(v: i64) -> Self {
        Zp::new(v)
    }
    fn from_rational(q: &BigRational) -> Option<Self> {
        let p = BigInt::from(P);
        let reduce = |n: &BigInt| n.mod_floor(&p).to_u64().map(Zp::<P>);
        let den = reduce(q.denom())?;
        if den.is_zero() {
            return None;
        }
        Some(reduce(q.numer())?.mul(&den.inv()))
    }
    fn characteristic() -> u64 {
        P
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum MonomialOrder {
    /// Degree-reverse-lexicographic.
    #[default]
    DegRevLex,
    /// Lexicographic with the first variable largest.
    Lex,
    /// Elimination order for the first `k` variables: degrevlex on them,
    /// ties broken by degrevlex on the rest.
    Block(usize),
}

impl MonomialOrder {
    pub fn compare(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.exps.cmp(&b.exps),
            MonomialOrder::DegRevLex => degrevlex(&a.exps, &b.exps),
            MonomialOrder::Block(k) => {
                let k = k.min(a.exps.len());
                degrevlex(&a.exps[..k], &b.exps[..k]).then_with(|| degrevlex(&a.exps[k..], &b.exps[k..]))
            }
        }
    }
}

fn degrevlex(a: &[u32], b: &[u32]) -> Ordering {
    let degree = |e: &[u32]| e.iter().map(|&x| x as u64).sum::<u64>();
    degree(a).cmp(&degree(b)).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u32]>,
    degree: u32,
}

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars].into_boxed_slice(),
            degree: 0,
        }
    }

    pub fn var(nvars: usize, i: usize, e: u32) -> Self {
        let mut exps = vec![0; nvars];
        exps[i] = e;
        Monomial::from_exponents(exps)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial {
            exps: exps.into_boxed_slice(),
            degree,
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect(),
            degree: self.degree + other.degree,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        self.divides(other).then(|| Monomial {
            exps: other.exps.iter().zip(self.exps.iter()).map(|(a, b)| a - b).collect(),
            degree: other.degree - self.degree,
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::from_exponents(
            self.exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Variables with a positive exponent, as a bit mask.
    ///
    /// Panics with more than 128 variables.
    pub fn support_mask(&self) -> u128 {
        assert!(self.exps.len() <= 128, "support masks hold at most 128 variables");
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u128, |m, (i, _)| m | 1u128 << i)
    }
}

/// Variable names and monomial order shared by a family of polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyRing {
    vars: Vec<String>,
    order: MonomialOrder,
}

impl PolyRing {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, order: MonomialOrder) -> Arc<Self> {
        Arc::new(PolyRing {
            vars: vars.into_iter().map(Into::into).collect(),
            order,
        })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }
}

fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

#[derive(Debug, Clone)]
pub struct Polynomial<C: Coeff> {
    ring: Arc<PolyRing>,
    /// Nonzero terms, strictly decreasing in the ring's order.
    terms: Vec<(Monomial, C)>,
}

impl<C: Coeff> PartialEq for Polynomial<C> {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl<C: Coeff> Eq for Polynomial<C> {}

impl<C: Coeff> Polynomial<C> {
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(ring: &Arc<PolyRing>, c: C) -> Self {
        Self::from_monomial(ring, Monomial::one(ring.nvars()), c)
    }

    pub fn var(ring: &Arc<PolyRing>, i: usize) -> Self {
        Self::from_monomial(ring, Monomial::var(ring.nvars(), i, 1), C::one())
    }

    pub fn from_monomial(ring: &Arc<PolyRing>, m: Monomial, c: C) -> Self {
        assert_eq!(m.exps.len(), ring.nvars());
        let terms = if c.is_zero() { Vec::new() } else { vec![(m, c)] };
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Collects like terms and drops zeros.
    pub fn from_terms(ring: &Arc<PolyRing>, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Self {
        let order = ring.order();
        let mut raw: Vec<(Monomial, C)> = terms
            .into_iter()
            .map(|(e, c)| {
                assert_eq!(e.len(), ring.nvars());
                (Monomial::from_exponents(e), c)
            })
            .collect();
        raw.sort_by(|a, b| order.compare(&b.0, &a.0));
        let mut out: Vec<(Monomial, C)> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = lc.add(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Polynomial {
            ring: ring.clone(),
            terms: out,
        }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// A nonzero constant.
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one()
    }

    pub fn leading_monomial(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn leading_coeff(&self) -> Option<&C> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| t.0.degree).max().unwrap_or(0)
    }

    fn check_ring(&self, other: &Self) -> Result<(), PolyError> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(PolyError::RingMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        Ok(self.with_terms(self.combine(&C::one(), &other.terms, &C::one(), None)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        Ok(self.with_terms(self.combine(&C::one(), &other.terms, &C::one().neg(), None)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_ring(other)?;
        let mut acc = Polynomial::zero(&self.ring);
        for (m, c) in &other.terms {
            acc = acc.with_terms(acc.combine(&C::one(), &self.terms, c, Some(m)));
        }
        Ok(acc)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        self.with_terms(self.terms.iter().map(|(m, x)| (m.clone(), x.mul(c))).collect())
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().neg())
    }

    pub fn mul_term(&self, m: &Monomial, c: &C) -> Self {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        self.with_terms(self.terms.iter().map(|(t, x)| (t.mul(m), x.mul(c))).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Polynomial::constant(&self.ring, C::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Canonical associate: primitive over ℚ, monic over `F_p`.
    pub fn normalized(&self) -> Self {
        let mut cs: Vec<C> = self.terms.iter().map(|t| t.1.clone()).collect();
        C::normalize(&mut cs);
        self.with_terms(self.terms.iter().map(|t| t.0.clone()).zip(cs).collect())
    }

    /// Maps every coefficient into another field.
    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> Option<D>) -> Result<Polynomial<D>, PolyError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let d = f(c).ok_or_else(|| PolyError::BadCoefficient(c.to_string()))?;
            terms.push((m.exps.to_vec(), d));
        }
        Ok(Polynomial::from_terms(&self.ring, terms))
    }

    fn with_terms(&self, terms: Vec<(Monomial, C)>) -> Self {
        Polynomial {
            ring: self.ring.clone(),
            terms,
        }
    }

    /// `a·self + b·shift·other` as a sorted term list.
    fn combine(&self, a: &C, other: &[(Monomial, C)], b: &C, shift: Option<&Monomial>) -> Vec<(Monomial, C)> {
        merge_terms(self.ring.order(), a, &self.terms, b, other, shift)
    }

    pub fn parse(ring: &Arc<PolyRing>, text: &str) -> Result<Self, PolyError> {
        let mut p = Parser { ring, text, pos: 0 };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }
}

fn merge_terms<C: Coeff>(
    order: MonomialOrder,
    a: &C,
    left: &[(Monomial, C)],
    b: &C,
    right: &[(Monomial, C)],
    shift: Option<&Monomial>,
) -> Vec<(Monomial, C)> {
    let scale_l = |c: &C| if a.is_one() { c.clone() } else { c.mul(a) };
    let mut out = Vec::with_capacity(left.len() + right.len());
    let mut i = 0;
    let mut r_iter = right.iter().map(|(m, c)| {
        (
            match shift {
                Some(s) => m.mul(s),
                None => m.clone(),
            },
            c.mul(b),
        )
    });
    let mut r_next = r_iter.next();
    loop {
        match (left.get(i), r_next.take()) {
            (None, None) => break,
            (Some((m, c)), None) => {
                out.push((m.clone(), scale_l(c)));
                i += 1;
            }
            (None, Some(t)) => {
                out.push(t);
                r_next = r_iter.next();
            }
            (Some((lm, lc)), Some((rm, rc))) => match order.compare(lm, &rm) {
                Ordering::Greater => {
                    out.push((lm.clone(), scale_l(lc)));
                    i += 1;
                    r_next = Some((rm, rc));
                }
                Ordering::Less => {
                    out.push((rm, rc));
                    r_next = r_iter.next();
                }
                Ordering::Equal => {
                    let s = scale_l(lc).add(&rc);
                    if !s.is_zero() {
                        out.push((rm, s));
                    }
                    i += 1;
                    r_next = r_iter.next();
                }
            },
        }
    }
    out
}

impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let mut cs = c.to_string();
            let negative = cs.starts_with('-');
            if negative {
                cs.remove(0);
            }
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let factors: Vec<String> = m
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.ring.vars[i].clone()
                    } else {
                        format!("{}^{e}", self.ring.vars[i])
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{cs}")?;
            } else {
                if cs != "1" {
                    write!(f, "{cs}*")?;
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    ring: &'a Arc<PolyRing>,
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += ch.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr<C: Coeff>(&mut self) -> Result<Polynomial<C>, PolyError> {
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        let mut acc = self.term::<C>()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<C: Coeff>(&mut self) -> Result<Polynomial<C>, PolyError> {
        let mut acc = self.factor::<C>()?;
        loop {
            self.eat('*');
            self.skip_ws();
            match self.peek() {
                Some(c) if c.is_alphanumeric() || c == '_' || c == '(' => {
                    acc = acc.mul(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn exponent(&mut self) -> Result<u32, PolyError> {
        if !self.eat('^') {
            return Ok(1);
        }
        self.skip_ws();
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits.parse().map_err(|_| self.err("expected a non-negative exponent"))
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while self.peek().is_some_and(&f) {
            self.pos += self.peek().map_or(0, char::len_utf8);
        }
        &self.text[start..self.pos]
    }

    fn factor<C: Coeff>(&mut self) -> Result<Polynomial<C>, PolyError> {
        self.skip_ws();
        let base = match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected ')'"));
                }
                inner
            }
            Some(c) if c.is_ascii_digit() => {
                let num: BigInt = self.take_while(|c| c.is_ascii_digit()).parse().expect("digits");
                let mut q = BigRational::from_integer(num);
                if self.eat('/') {
                    self.skip_ws();
                    let den: BigInt = self
                        .take_while(|c| c.is_ascii_digit())
                        .parse()
                        .map_err(|_| self.err("expected a denominator"))?;
                    if den.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    q /= BigRational::from_integer(den);
                }
                let c = C::from_rational(&q).ok_or_else(|| PolyError::BadCoefficient(q.to_string()))?;
                Polynomial::constant(self.ring, c)
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                let i = self
                    .ring
                    .var_index(name)
                    .ok_or_else(|| self.err(&format!("unknown variable {name}")))?;
                Polynomial::var(self.ring, i)
            }
            _ => return Err(self.err("expected a number, variable or '('")),
        };
        let e = self.exponent()?;
        Ok(if e == 1 { base } else { base.pow(e) })
    }
}

/// Fraction-free division: returns `(s, r)` with `s` a nonzero scalar,
/// `s·p − r ∈ ⟨divisors⟩`, and no term of `r` divisible by a leading
/// monomial of a divisor.
fn reduce_scaled<C: Coeff>(p: &Polynomial<C>, divisors: &[Polynomial<C>]) -> (C, Polynomial<C>) {
    let order = p.ring.order();
    let mut work: Vec<(Monomial, C)> = p.terms.clone();
    let mut start = 0;
    let mut rem: Vec<(Monomial, C)> = Vec::new();
    let mut scale = C::one();
    while start < work.len() {
        let (lm, lc) = &work[start];
        let hit = divisors.iter().find_map(|g| {
            let (gm, _) = g.terms.first()?;
            gm.quotient_of(lm).map(|q| (g, q))
        });
        match hit {
            None => {
                rem.push(work[start].clone());
                start += 1;
            }
            Some((g, q)) => {
                let (a, b) = C::cross_multipliers(lc, &g.terms[0].1);
                if !a.is_one() {
                    for t in rem.iter_mut() {
                        t.1 = t.1.mul(&a);
                    }
                    scale = scale.mul(&a);
                }
                work = merge_terms(order, &a, &work[start..], &b.neg(), &g.terms, Some(&q));
                start = 0;
            }
        }
    }
    (scale, p.with_terms(rem))
}

/// Full reduction of `p` by `divisors`: no monomial of the result is
/// divisible by a leading monomial of a divisor, and `p − result` lies in
/// the ideal they generate.
pub fn normal_form<C: Coeff>(p: &Polynomial<C>, divisors: &[Polynomial<C>]) -> Result<Polynomial<C>, PolyError> {
    for d in divisors {
        p.check_ring(d)?;
    }
    let nonzero: Vec<Polynomial<C>> = divisors.iter().filter(|d| !d.is_zero()).cloned().collect();
    let (s, r) = reduce_scaled(p, &nonzero);
    Ok(if s.is_one() { r } else { r.scale(&s.inv()) })
}

/// `lcm/LT(f)·f − lcm/LT(g)·g`, up to a nonzero scalar.
pub fn s_polynomial<C: Coeff>(f: &Polynomial<C>, g: &Polynomial<C>) -> Result<Polynomial<C>, PolyError> {
    f.check_ring(g)?;
    let (Some((fm, fc)), Some((gm, gc))) = (f.terms.first(), g.terms.first()) else {
        return Ok(Polynomial::zero(&f.ring));
    };
    let l = fm.lcm(gm);
    let (a, b) = C::cross_multipliers(fc, gc);
    let qf = fm.quotient_of(&l).expect("lcm");
    let qg = gm.quotient_of(&l).expect("lcm");
    let left = f.mul_term(&qf, &a);
    Ok(left.with_terms(merge_terms(
        f.ring.order(),
        &C::one(),
        &left.terms,
        &b.neg(),
        &g.terms,
        Some(&qg),
    )))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis<C: Coeff> {
    ring: Arc<PolyRing>,
    /// Reduced and normalized, sorted by increasing leading monomial.
    generators: Vec<Polynomial<C>>,
}

impl<C: Coeff> GroebnerBasis<C> {
    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn generators(&self) -> &[Polynomial<C>] {
        &self.generators
    }

    pub fn order(&self) -> MonomialOrder {
        self.ring.order()
    }

    /// The ideal is the whole ring.
    pub fn is_unit(&self) -> bool {
        self.generators.iter().any(Polynomial::is_constant)
    }

    pub fn reduce(&self, p: &Polynomial<C>) -> Result<Polynomial<C>, PolyError> {
        normal_form(p, &self.generators)
    }

    pub fn contains(&self, p: &Polynomial<C>) -> Result<bool, PolyError> {
        Ok(self.reduce(p)?.is_zero())
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.generators.iter().filter_map(Polynomial::leading_monomial)
    }

    /// Every S-polynomial of a pair of generators reduces to zero.
    pub fn s_pairs_reduce_to_zero(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| {
            (i + 1..g.len()).all(|j| {
                let s = s_polynomial(&g[i], &g[j]).expect("same ring");
                reduce_scaled(&s, g).1.is_zero()
            })
        })
    }

    /// No generator has a monomial divisible by another's leading monomial.
    pub fn is_reduced(&self) -> bool {
        let g = &self.generators;
        g.iter().enumerate().all(|(i, p)| {
            g.iter().enumerate().all(|(j, q)| {
                i == j
                    || q.leading_monomial()
                        .is_none_or(|lm| p.terms.iter().all(|(m, _)| !lm.divides(m)))
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
}

/// Buchberger's algorithm with the normal selection strategy and both of
/// Buchberger's criteria. `budget` caps the number of S-pair reductions.
pub fn buchberger<C: Coeff>(
    ring: &Arc<PolyRing>,
    gens: &[Polynomial<C>],
    budget: u64,
) -> Result<GroebnerBasis<C>, PolyError> {
    let order = ring.order();
    let unit = |ring: &Arc<PolyRing>| GroebnerBasis {
        ring: ring.clone(),
        generators: vec![Polynomial::constant(ring, C::one())],
    };
    let mut basis: Vec<Polynomial<C>> = Vec::new();
    for g in gens {
        if !same_ring(ring, &g.ring) {
            return Err(PolyError::RingMismatch);
        }
        if g.is_zero() {
            continue;
        }
        if g.is_constant() {
            return Ok(unit(ring));
        }
        basis.push(g.normalized());
    }

    let mut pending: Vec<Pair> = Vec::new();
    let mut pending_set: HashSet<(usize, usize)> = HashSet::new();
    let add_pairs = |basis: &[Polynomial<C>], k: usize, pending: &mut Vec<Pair>, set: &mut HashSet<(usize, usize)>| {
        let lk = basis[k].leading_monomial().expect("nonzero");
        for (i, b) in basis[..k].iter().enumerate() {
            let li = b.leading_monomial().expect("nonzero");
            pending.push(Pair {
                i,
                j: k,
                lcm: li.lcm(lk),
            });
            set.insert((i, k));
        }
    };
    for k in 0..basis.len() {
        add_pairs(&basis, k, &mut pending, &mut pending_set);
    }

    let mut reductions = 0u64;
    while !pending.is_empty() {
        let pick = (0..pending.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&pending[a], &pending[b]);
                pa.lcm
                    .degree
                    .cmp(&pb.lcm.degree)
                    .then_with(|| order.compare(&pa.lcm, &pb.lcm))
                    .then_with(|| (pa.j, pa.i).cmp(&(pb.j, pb.i)))
            })
            .expect("nonempty");
        let pair = pending.swap_remove(pick);
        pending_set.remove(&(pair.i, pair.j));
        let (li, lj) = (
            basis[pair.i].leading_monomial().expect("nonzero"),
            basis[pair.j].leading_monomial().expect("nonzero"),
        );
        if li.is_coprime(lj) {
            continue;
        }
        let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
        let chain = (0..basis.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && !pending_set.contains(&key(pair.i, k))
                && !pending_set.contains(&key(pair.j, k))
                && basis[k].leading_monomial().expect("nonzero").divides(&pair.lcm)
        });
        if chain {
            continue;
        }
        reductions += 1;
        if reductions > budget {
            return Err(PolyError::BudgetExceeded { budget });
        }
        let s = s_polynomial(&basis[pair.i], &basis[pair.j])?;
        let (_, r) = reduce_scaled(&s, &basis);
        if r.is_zero() {
            continue;
        }
        if r.is_constant() {
            return Ok(unit(ring));
        }
        basis.push(r.normalized());
        add_pairs(&basis, basis.len() - 1, &mut pending, &mut pending_set);
    }

    Ok(GroebnerBasis {
        ring: ring.clone(),
        generators: interreduce(basis, order),
    })
}

/// Minimal basis followed by tail reduction.
fn interreduce<C: Coeff>(mut basis: Vec<Polynomial<C>>, order: MonomialOrder) -> Vec<Polynomial<C>> {
    basis.sort_by(|a, b| order.compare(a.leading_monomial().unwrap(), b.leading_monomial().unwrap()));
    let mut minimal: Vec<Polynomial<C>> = Vec::new();
    for p in basis {
        let lm = p.leading_monomial().unwrap();
        if !minimal.iter().any(|q| q.leading_monomial().unwrap().divides(lm)) {
            minimal.push(p);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<Polynomial<C>> = minimal
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, q)| q.clone())
            .collect();
        let (_, r) = reduce_scaled(&minimal[k], &others);
        out.push(r.normalized());
    }
    out
}

/// Dimension of an affine variety, or `Empty` for the unit ideal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dimension {
    Empty,
    Finite(usize),
}

impl Dimension {
    pub fn value(self) -> Option<usize> {
        match self {
            Dimension::Empty => None,
            Dimension::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Empty => write!(f, "empty"),
            Dimension::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Krull dimension from the leading-term staircase: the largest set of
/// variables containing the support of no leading monomial.
pub fn ideal_dimension<C: Coeff>(gb: &GroebnerBasis<C>) -> Dimension {
    if gb.is_unit() {
        return Dimension::Empty;
    }
    let masks: Vec<u128> = gb.leading_monomials().map(Monomial::support_mask).collect();
    Dimension::Finite(max_independent_set(&masks, gb.ring.nvars()))
}

/// `n` minus the size of a smallest variable set meeting every mask.
pub fn max_independent_set(masks: &[u128], nvars: usize) -> usize {
    assert!(nvars <= 128);
    let mut sets: Vec<u128> = masks.to_vec();
    // A superset of another mask is met whenever the smaller one is.
    sets.sort_by_key(|m| m.count_ones());
    let mut minimal: Vec<u128> = Vec::new();
    for m in sets {
        assert!(m != 0, "constant leading monomial");
        if !minimal.iter().any(|&s| s & !m == 0) {
            minimal.push(m);
        }
    }
    let mut best = nvars;
    hitting_set(&minimal, 0, 0, &mut best);
    nvars - best
}

fn hitting_set(sets: &[u128], chosen: u128, size: usize, best: &mut usize) {
    if size >= *best {
        return;
    }
    let unhit = sets.iter().filter(|&&s| s & chosen == 0).min_by_key(|s| s.count_ones());
    match unhit {
        None => *best = size,
        Some(&s) => {
            let mut bits = s;
            while bits != 0 {
                let b = bits & bits.wrapping_neg();
                hitting_set(sets, chosen | b, size + 1, best);
                bits &= bits - 1;
            }
        }
    }
}
