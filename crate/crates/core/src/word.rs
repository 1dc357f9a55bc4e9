//! Words in the free product of the coefficient group with a free group on
//! the unknowns, stored run-length as `(symbol, exponent)` letters.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Maximum number of run-length letters a word power may expand into.
pub const MAX_WORD_LETTERS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("letter `{0}` has exponent zero")]
    ZeroExponent(String),
    #[error("empty symbol name")]
    EmptySymbol,
    #[error("symbol `{0}` has no image under the assignment")]
    UnboundSymbol(String),
    #[error("word expansion exceeds {limit} letters")]
    TooLong { limit: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LetterKind {
    Unknown,
    Coefficient,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Letter {
    symbol: String,
    kind: LetterKind,
    exponent: BigInt,
}

impl Letter {
    pub fn new(symbol: impl Into<String>, kind: LetterKind, exponent: impl Into<BigInt>) -> Result<Self, WordError> {
        let symbol = symbol.into();
        let exponent = exponent.into();
        if symbol.is_empty() {
            return Err(WordError::EmptySymbol);
        }
        if exponent.is_zero() {
            return Err(WordError::ZeroExponent(symbol));
        }
        Ok(Letter { symbol, kind, exponent })
    }

    /// Unknown letter; panics on an empty name or zero exponent.
    pub fn unknown(symbol: &str, exponent: i64) -> Self {
        Letter::new(symbol, LetterKind::Unknown, exponent).expect("valid letter")
    }

    /// Coefficient-atom letter; panics on an empty name or zero exponent.
    pub fn coefficient(symbol: &str, exponent: i64) -> Self {
        Letter::new(symbol, LetterKind::Coefficient, exponent).expect("valid letter")
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn kind(&self) -> LetterKind {
        self.kind
    }

    pub fn exponent(&self) -> &BigInt {
        &self.exponent
    }

    fn same_generator(&self, other: &Letter) -> bool {
        self.kind == other.kind && self.symbol == other.symbol
    }

    fn inverse(&self) -> Letter {
        Letter {
            symbol: self.symbol.clone(),
            kind: self.kind,
            exponent: -&self.exponent,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.kind == LetterKind::Coefficient {
            write!(f, "@")?;
        }
        write!(f, "{}", self.symbol)?;
        if !self.exponent.is_one() {
            write!(f, "^{}", self.exponent)?;
        }
        Ok(())
    }
}

/// A freely reduced word. The only way to build one is through
/// [`Word::free_reduce`] or the operations below, so the reduction invariant
/// always holds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn free_reduce(raw: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for letter in raw {
            push_reduced(&mut out, letter);
        }
        Word { letters: out }
    }

    pub fn letter(letter: Letter) -> Word {
        Word { letters: vec![letter] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of run-length letters.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Length as a word in generators and their inverses (sum of |exponent|).
    pub fn syllable_length(&self) -> BigInt {
        self.letters.iter().map(|l| l.exponent.abs()).sum()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        for letter in &other.letters {
            push_reduced(&mut out, letter.clone());
        }
        Word { letters: out }
    }

    pub fn invert(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(Letter::inverse).collect(),
        }
    }

    pub fn exponent_sum(&self, unknown: &str) -> BigInt {
        self.letters
            .iter()
            .filter(|l| l.kind == LetterKind::Unknown && l.symbol == unknown)
            .map(|l| l.exponent.clone())
            .sum()
    }

    /// Symbols in order of first appearance, paired with their kind.
    pub fn symbols(&self) -> Vec<(&str, LetterKind)> {
        let mut seen: Vec<(&str, LetterKind)> = Vec::new();
        for l in &self.letters {
            if !seen.iter().any(|&(s, k)| s == l.symbol && k == l.kind) {
                seen.push((&l.symbol, l.kind));
            }
        }
        seen
    }

    pub fn has_coefficients(&self) -> bool {
        self.letters.iter().any(|l| l.kind == LetterKind::Coefficient)
    }

    /// `self^k`. A cyclically reduced core consisting of a single letter is
    /// powered by scaling its exponent; longer cores are expanded.
    pub fn pow(&self, k: &BigInt) -> Result<Word, WordError> {
        if k.is_zero() || self.is_empty() {
            return Ok(Word::empty());
        }
        if k.is_negative() {
            return self.invert().pow(&-k);
        }
        let (prefix, core) = self.cyclic_decomposition();
        let powered = if core.len() == 1 {
            let l = &core.letters[0];
            Word::letter(Letter {
                symbol: l.symbol.clone(),
                kind: l.kind,
                exponent: &l.exponent * k,
            })
        } else {
            let reps = k
                .to_usize()
                .filter(|r| r.saturating_mul(core.len()) <= MAX_WORD_LETTERS)
                .ok_or(WordError::TooLong {
                    limit: MAX_WORD_LETTERS,
                })?;
            let mut letters = Vec::with_capacity(reps * core.len());
            for _ in 0..reps {
                letters.extend(core.letters.iter().cloned());
            }
            // A cyclically reduced core never merges across the seams.
            Word { letters }
        };
        Ok(prefix.concat(&powered).concat(&prefix.invert()))
    }

    /// Writes `self = p · c · p⁻¹` with `c` cyclically reduced; returns `(p, c)`.
    pub fn cyclic_decomposition(&self) -> (Word, Word) {
        let mut prefix: Vec<Letter> = Vec::new();
        let mut core: Vec<Letter> = self.letters.clone();
        while core.len() >= 2 && core[0].same_generator(&core[core.len() - 1]) {
            let last = core.pop().expect("len >= 2");
            let first = core.remove(0);
            prefix.push(last.inverse());
            let merged = &first.exponent + &last.exponent;
            if merged.is_zero() {
                continue;
            }
            core.insert(
                0,
                Letter {
                    symbol: first.symbol,
                    kind: first.kind,
                    exponent: merged,
                },
            );
            break;
        }
        (Word::free_reduce(prefix), Word { letters: core })
    }

    /// Evaluates the word in `group`, with `assign` giving the image of each
    /// symbol.
    pub fn evaluate<G, F>(&self, group: &G, assign: F) -> Result<G::Elem, WordError>
    where
        G: GroupOps,
        F: Fn(&str, LetterKind) -> Option<G::Elem>,
    {
        let mut acc = group.identity();
        for l in &self.letters {
            let base = assign(&l.symbol, l.kind).ok_or_else(|| WordError::UnboundSymbol(l.symbol.clone()))?;
            let p = power(group, &base, &l.exponent);
            acc = group.mul(&acc, &p);
        }
        Ok(acc)
    }
}

fn push_reduced(out: &mut Vec<Letter>, letter: Letter) {
    if let Some(top) = out.last_mut() {
        if top.same_generator(&letter) {
            top.exponent += letter.exponent;
            if top.exponent.is_zero() {
                out.pop();
            }
            return;
        }
    }
    out.push(letter);
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Minimal group interface used for evaluating words.
pub trait GroupOps {
    type Elem: Clone;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;

    /// Order of `a` when the group knows it; exponents are reduced modulo it.
    fn order_of(&self, _a: &Self::Elem) -> Option<u64> {
        None
    }
}

/// `x^k` by square-and-multiply, reducing `k` modulo the order of `x` when
/// the group reports one.
pub fn power<G: GroupOps>(group: &G, x: &G::Elem, k: &BigInt) -> G::Elem {
    let (base, mut e) = match group.order_of(x) {
        Some(ord) => {
            let r = k.mod_floor(&BigInt::from(ord));
            (x.clone(), r.magnitude().clone())
        }
        None if k.is_negative() => (group.inv(x), k.magnitude().clone()),
        None => (x.clone(), k.magnitude().clone()),
    };
    let mut result = group.identity();
    let mut sq = base;
    while !e.is_zero() {
        if e.bit(0) {
            result = group.mul(&result, &sq);
        }
        e >>= 1;
        if !e.is_zero() {
            sq = group.mul(&sq, &sq);
        }
    }
    result
}
