//! Textual equation systems (`.geq` files).
//!
//! ```text
//! coefficients:
//! a = (1 2 3)
//! equations:
//! x^3 y^3 = @a
//! ```
//!
//! Juxtaposition multiplies, `^` binds tighter than juxtaposition and takes
//! an integer (possibly negative) exponent, `[u,v]` is `u⁻¹v⁻¹uv`, `@name`
//! refers to a coefficient atom and `1` is the empty word. Equations are
//! separated by newlines or `;`; an equation `v = w` is stored as
//! `v·w⁻¹ = 1`. Without any section header the whole text is read as
//! equations. An optional `unknowns: x, y, …` line fixes the order of the
//! unknowns and may declare unknowns that occur in no equation.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::fingroup::{cycle_notation, parse_cycles, Perm};
use crate::word::{Letter, LetterKind, Word, WordError};
use crate::zlinalg::IntMatrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("zero exponent")]
    ZeroExponent,
    #[error("coefficient `@{0}` is not declared in the coefficients section")]
    UnknownCoefficient(String),
    #[error("`{0}` is used both as an unknown and as a coefficient")]
    NameClash(String),
    #[error("bad coefficient value: {0}")]
    BadCoefficientValue(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Equation {
    lhs: Word,
}

impl Equation {
    pub fn new(lhs: Word) -> Self {
        Equation { lhs }
    }

    pub fn lhs(&self) -> &Word {
        &self.lhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    unknowns: Vec<String>,
    coefficient_atoms: Vec<String>,
    equations: Vec<Equation>,
}

impl EquationSystem {
    /// Panics if an equation mentions an undeclared symbol or the two name
    /// lists overlap.
    pub fn new(unknowns: Vec<String>, coefficient_atoms: Vec<String>, equations: Vec<Equation>) -> Self {
        for eq in &equations {
            for (s, kind) in eq.lhs.symbols() {
                let declared = match kind {
                    LetterKind::Unknown => &unknowns,
                    LetterKind::Coefficient => &coefficient_atoms,
                };
                assert!(declared.iter().any(|d| d == s), "undeclared symbol {s}");
            }
        }
        assert!(
            unknowns.iter().all(|u| !coefficient_atoms.contains(u)),
            "unknowns and coefficient atoms overlap"
        );
        EquationSystem {
            unknowns,
            coefficient_atoms,
            equations,
        }
    }

    pub fn unknowns(&self) -> &[String] {
        &self.unknowns
    }

    pub fn coefficient_atoms(&self) -> &[String] {
        &self.coefficient_atoms
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    /// Syntactic test: no equation mentions a coefficient atom.
    pub fn is_coefficient_free(&self) -> bool {
        self.equations.iter().all(|e| !e.lhs.has_coefficients())
    }

    /// Atoms that occur in some equation, in declaration order.
    pub fn used_atoms(&self) -> Vec<&str> {
        self.coefficient_atoms
            .iter()
            .filter(|a| {
                self.equations
                    .iter()
                    .any(|e| e.lhs.symbols().contains(&(a.as_str(), LetterKind::Coefficient)))
            })
            .map(String::as_str)
            .collect()
    }

    /// The same system with its unknowns listed in a different order.
    pub fn with_unknown_order(&self, order: Vec<String>) -> EquationSystem {
        let mut a = order.clone();
        let mut b = self.unknowns.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b, "not a permutation of the unknowns");
        EquationSystem {
            unknowns: order,
            ..self.clone()
        }
    }
}

/// n×m matrix of exponent sums: entry `(i, j)` is the exponent sum of
/// unknown `j` in equation `i`.
pub fn exponent_matrix(sys: &EquationSystem) -> IntMatrix {
    let rows: Vec<Vec<BigInt>> = sys
        .equations
        .iter()
        .map(|e| sys.unknowns.iter().map(|u| e.lhs.exponent_sum(u)).collect())
        .collect();
    IntMatrix::from_rows(&rows, sys.unknowns.len())
}

/// Value attached to a coefficient atom in the coefficients section.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoefficientValue {
    Permutation(Perm),
    /// Square matrix of rationals, row-major.
    Matrix(Vec<Vec<BigRational>>),
    /// Element index, for groups given by a table.
    Index(usize),
}

impl fmt::Display for CoefficientValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientValue::Permutation(p) => write!(f, "{}", cycle_notation(p)),
            CoefficientValue::Index(i) => write!(f, "#{i}"),
            CoefficientValue::Matrix(rows) => {
                write!(f, "[")?;
                for (i, r) in rows.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    let entries: Vec<String> = r.iter().map(|q| q.to_string()).collect();
                    write!(f, "[{}]", entries.join(","))?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A parsed `.geq` file: the system plus any coefficient values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeqDocument {
    pub system: EquationSystem,
    /// One entry per coefficient atom, in atom order.
    pub coefficients: Vec<(String, Option<CoefficientValue>)>,
}

impl GeqDocument {
    pub fn value_of(&self, atom: &str) -> Option<&CoefficientValue> {
        self.coefficients
            .iter()
            .find(|(n, _)| n == atom)
            .and_then(|(_, v)| v.as_ref())
    }
}

pub fn parse_system(text: &str) -> Result<EquationSystem, ParseError> {
    parse_document(text).map(|d| d.system)
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Coefficients,
    Equations,
}

pub fn parse_document(text: &str) -> Result<GeqDocument, ParseError> {
    let mut section = Section::Equations;
    let mut declared_atoms: Option<Vec<(String, Option<CoefficientValue>)>> = None;
    let mut declared_unknowns: Vec<String> = Vec::new();
    let mut names = NameTable::default();
    let mut equations = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match trimmed {
            "coefficients:" => {
                section = Section::Coefficients;
                declared_atoms.get_or_insert_with(Vec::new);
                continue;
            }
            "equations:" => {
                section = Section::Equations;
                continue;
            }
            _ => {}
        }
        if let Some(list) = trimmed.strip_prefix("unknowns:") {
            let offset = raw.find("unknowns:").unwrap_or(0) + "unknowns:".len();
            for (col, name) in split_names(list) {
                let column = offset + col + 1;
                if !is_identifier(name) {
                    return Err(syntax(line, column, format!("`{name}` is not an identifier")));
                }
                if !declared_unknowns.iter().any(|u| u == name) {
                    declared_unknowns.push(name.to_string());
                    names.note_unknown(name, line, column)?;
                }
            }
            continue;
        }
        match section {
            Section::Coefficients => {
                let atoms = declared_atoms.as_mut().expect("section opened");
                let (name, value) = parse_coefficient_line(raw, line)?;
                let column = raw.find(name.as_str()).unwrap_or(0) + 1;
                if atoms.iter().any(|(n, _)| *n == name) {
                    return Err(syntax(line, column, format!("coefficient `{name}` declared twice")));
                }
                names.note_atom(&name, line, column)?;
                atoms.push((name, value));
            }
            Section::Equations => {
                let mut start = 0;
                for piece in raw.split(';') {
                    if !piece.trim().is_empty() {
                        let lhs = EquationParser::new(piece, line, start, &mut names, declared_atoms.as_deref())?
                            .parse_equation()?;
                        equations.push(Equation::new(lhs));
                    }
                    start += piece.chars().count() + 1;
                }
            }
        }
    }

    let mut unknowns = declared_unknowns;
    for u in names.unknowns {
        if !unknowns.contains(&u) {
            unknowns.push(u);
        }
    }
    let coefficients = match declared_atoms {
        Some(a) => a,
        None => names.atoms.into_iter().map(|a| (a, None)).collect(),
    };
    let atoms = coefficients.iter().map(|(n, _)| n.clone()).collect();
    Ok(GeqDocument {
        system: EquationSystem::new(unknowns, atoms, equations),
        coefficients,
    })
}

fn split_names(list: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut pos = 0;
    for part in list.split(',') {
        let lead = part.len() - part.trim_start().len();
        let name = part.trim();
        if !name.is_empty() {
            out.push((list[..pos + lead].chars().count(), name));
        }
        pos += part.len() + 1;
    }
    out
}

fn parse_coefficient_line(raw: &str, line: usize) -> Result<(String, Option<CoefficientValue>), ParseError> {
    let (name_part, value_part) = match raw.split_once('=') {
        Some((n, v)) => (n, Some(v)),
        None => (raw, None),
    };
    let name = name_part.trim();
    let name = name.strip_prefix('@').unwrap_or(name);
    let name_col = raw.find(name).unwrap_or(0) + 1;
    if !is_identifier(name) {
        return Err(syntax(line, name_col, format!("`{name}` is not an identifier")));
    }
    let Some(v) = value_part else {
        return Ok((name.to_string(), None));
    };
    let value_col = raw.find('=').map_or(0, |i| i + 1) + 1;
    let bad = |msg: String| ParseError {
        line,
        column: value_col,
        kind: ParseErrorKind::BadCoefficientValue(msg),
    };
    let v = v.trim();
    let value = if v.starts_with('(') || v == "e" {
        CoefficientValue::Permutation(parse_cycles(v).map_err(|e| bad(e.to_string()))?)
    } else if let Some(i) = v.strip_prefix('#') {
        CoefficientValue::Index(i.parse().map_err(|_| bad(format!("bad index `{v}`")))?)
    } else if v.starts_with('[') {
        CoefficientValue::Matrix(parse_rational_matrix(v).map_err(bad)?)
    } else {
        return Err(bad(format!("`{v}` is neither a permutation, a matrix nor an index")));
    };
    Ok((name.to_string(), Some(value)))
}

/// Parses `[[a,b],[c,d]]` with rational entries such as `-3` or `1/2`.
pub fn parse_rational_matrix(text: &str) -> Result<Vec<Vec<BigRational>>, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner = compact
        .strip_prefix("[[")
        .and_then(|s| s.strip_suffix("]]"))
        .ok_or_else(|| format!("`{text}` is not of the form [[..],..]"))?;
    let rows = inner
        .split("],[")
        .map(|r| {
            r.split(',')
                .map(|e| e.parse::<BigRational>().map_err(|_| format!("bad rational `{e}`")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!("`{text}` is not a square matrix"));
    }
    Ok(rows)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

fn syntax(line: usize, column: usize, msg: String) -> ParseError {
    ParseError {
        line,
        column,
        kind: ParseErrorKind::Syntax(msg),
    }
}

#[derive(Default)]
struct NameTable {
    unknowns: Vec<String>,
    atoms: Vec<String>,
}

impl NameTable {
    fn note_unknown(&mut self, name: &str, line: usize, column: usize) -> Result<(), ParseError> {
        if self.atoms.iter().any(|a| a == name) {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::NameClash(name.to_string()),
            });
        }
        if !self.unknowns.iter().any(|u| u == name) {
            self.unknowns.push(name.to_string());
        }
        Ok(())
    }

    fn note_atom(&mut self, name: &str, line: usize, column: usize) -> Result<(), ParseError> {
        if self.unknowns.iter().any(|u| u == name) {
            return Err(ParseError {
                line,
                column,
                kind: ParseErrorKind::NameClash(name.to_string()),
            });
        }
        if !self.atoms.iter().any(|a| a == name) {
            self.atoms.push(name.to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Atom(String),
    Int(BigInt),
    Caret,
    Minus,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Atom(s) => write!(f, "`@{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Equals => write!(f, "`=`"),
            Tok::End => write!(f, "end of equation"),
        }
    }
}

struct EquationParser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    names: &'a mut NameTable,
    declared_atoms: Option<&'a [(String, Option<CoefficientValue>)]>,
}

impl<'a> EquationParser<'a> {
    fn new(
        text: &str,
        line: usize,
        column_offset: usize,
        names: &'a mut NameTable,
        declared_atoms: Option<&'a [(String, Option<CoefficientValue>)]>,
    ) -> Result<Self, ParseError> {
        let tokens = tokenize(text, line, column_offset)?;
        Ok(EquationParser {
            tokens,
            pos: 0,
            line,
            names,
            declared_atoms,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].0
    }

    fn column(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column(),
            kind,
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(ParseErrorKind::Syntax(format!("expected {t}, found {}", self.peek()))))
        }
    }

    fn parse_equation(mut self) -> Result<Word, ParseError> {
        let lhs = self.parse_product()?;
        let rhs = if *self.peek() == Tok::Equals {
            self.bump();
            self.parse_product()?
        } else {
            Word::empty()
        };
        if *self.peek() != Tok::End {
            return Err(self.error(ParseErrorKind::Syntax(format!("unexpected {}", self.peek()))));
        }
        Ok(lhs.concat(&rhs.invert()))
    }

    fn parse_product(&mut self) -> Result<Word, ParseError> {
        let mut acc = Word::empty();
        let mut factors = 0;
        while matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Atom(_) | Tok::Int(_) | Tok::LParen | Tok::LBracket
        ) {
            acc = acc.concat(&self.parse_factor()?);
            factors += 1;
        }
        if factors == 0 {
            return Err(self.error(ParseErrorKind::Syntax(format!(
                "expected a word, found {}",
                self.peek()
            ))));
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<Word, ParseError> {
        let mut w = self.parse_primary()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let column = self.column();
            let k = self.parse_exponent()?;
            if k.is_zero() {
                return Err(ParseError {
                    line: self.line,
                    column,
                    kind: ParseErrorKind::ZeroExponent,
                });
            }
            w = w.pow(&k).map_err(|e| ParseError {
                line: self.line,
                column,
                kind: e.into(),
            })?;
        }
        Ok(w)
    }

    fn parse_exponent(&mut self) -> Result<BigInt, ParseError> {
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let k = match self.bump() {
            Tok::Int(k) => k,
            other => {
                return Err(self.error(ParseErrorKind::Syntax(format!(
                    "expected an integer exponent, found {other}"
                ))))
            }
        };
        if parenthesized {
            self.expect(Tok::RParen)?;
        }
        Ok(if negative { -k } else { k })
    }

    fn parse_primary(&mut self) -> Result<Word, ParseError> {
        let column = self.column();
        match self.bump() {
            Tok::Ident(name) => {
                self.names.note_unknown(&name, self.line, column)?;
                Ok(Word::letter(Letter::unknown(&name, 1)))
            }
            Tok::Atom(name) => {
                if let Some(declared) = self.declared_atoms {
                    if !declared.iter().any(|(n, _)| *n == name) {
                        return Err(ParseError {
                            line: self.line,
                            column,
                            kind: ParseErrorKind::UnknownCoefficient(name),
                        });
                    }
                }
                self.names.note_atom(&name, self.line, column)?;
                Ok(Word::letter(Letter::coefficient(&name, 1)))
            }
            Tok::Int(n) if n.is_one() => Ok(Word::empty()),
            Tok::Int(n) => Err(ParseError {
                line: self.line,
                column,
                kind: ParseErrorKind::Syntax(format!("`{n}` is not a word; only `1` denotes the identity")),
            }),
            Tok::LParen => {
                let w = self.parse_product()?;
                self.expect(Tok::RParen)?;
                Ok(w)
            }
            Tok::LBracket => {
                let u = self.parse_product()?;
                self.expect(Tok::Comma)?;
                let v = self.parse_product()?;
                self.expect(Tok::RBracket)?;
                Ok(u.invert().concat(&v.invert()).concat(&u).concat(&v))
            }
            other => Err(ParseError {
                line: self.line,
                column,
                kind: ParseErrorKind::Syntax(format!("unexpected {other}")),
            }),
        }
    }
}

fn tokenize(text: &str, line: usize, column_offset: usize) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let ident_end = |start: usize| {
        let mut j = start;
        while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
            j += 1;
        }
        j
    };
    while i < chars.len() {
        let c = chars[i];
        let column = column_offset + i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '^' => Some(Tok::Caret),
            '-' => Some(Tok::Minus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Equals),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, column));
            i += 1;
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            out.push((Tok::Int(digits.parse().expect("digits")), column));
            i = j;
        } else if c == '@' {
            let j = ident_end(i + 1);
            let name: String = chars[i + 1..j].iter().collect();
            if !is_identifier(&name) {
                return Err(syntax(line, column, "expected a coefficient name after `@`".into()));
            }
            out.push((Tok::Atom(name), column));
            i = j;
        } else if c.is_alphabetic() || c == '_' {
            let j = ident_end(i);
            out.push((Tok::Ident(chars[i..j].iter().collect()), column));
            i = j;
        } else {
            return Err(syntax(line, column, format!("unexpected character `{c}`")));
        }
    }
    out.push((Tok::End, column_offset + chars.len() + 1));
    Ok(out)
}

/// Canonical `.geq` text. Reparsing it yields an equal document.
pub fn print_document(doc: &GeqDocument) -> String {
    let sys = &doc.system;
    let mut out = String::new();
    if !doc.coefficients.is_empty() {
        out.push_str("coefficients:\n");
        for (name, value) in &doc.coefficients {
            match value {
                Some(v) => out.push_str(&format!("{name} = {v}\n")),
                None => out.push_str(&format!("{name}\n")),
            }
        }
    }
    let mut appearance: Vec<&str> = Vec::new();
    for eq in &sys.equations {
        for (s, kind) in eq.lhs.symbols() {
            if kind == LetterKind::Unknown && !appearance.contains(&s) {
                appearance.push(s);
            }
        }
    }
    if appearance != sys.unknowns.iter().map(String::as_str).collect::<Vec<_>>() {
        out.push_str(&format!("unknowns: {}\n", sys.unknowns.join(", ")));
    }
    out.push_str("equations:\n");
    for eq in &sys.equations {
        out.push_str(&format!("{} = 1\n", eq.lhs));
    }
    out
}

impl fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let doc = GeqDocument {
            system: self.clone(),
            coefficients: self.coefficient_atoms.iter().map(|a| (a.clone(), None)).collect(),
        };
        write!(f, "{}", print_document(&doc))
    }
}
