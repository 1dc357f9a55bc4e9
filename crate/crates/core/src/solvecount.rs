//! Exhaustive solution counting in finite groups, and the divisibility
//! verdicts of Solomon, Gordon–Rodríguez-Villegas (GRV), the centralizer
//! theorem (KM) and the epimorphism count (KM17).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::eqlang::{exponent_matrix, CoefficientValue, EquationSystem, GeqDocument};
use crate::fingroup::{centralizer, commutator_subgroup, subgroup_closure, FiniteGroup, GroupError};
use crate::word::{LetterKind, Word};
use crate::zlinalg::rank;

/// Default cap on word evaluations (assignments × equations).
pub const DEFAULT_EVAL_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("enumeration needs {required} word evaluations, above the budget of {budget}")]
    BudgetExceeded { budget: u64, required: BigInt },
    #[error("coefficient `@{0}` is not bound to a group element")]
    UnboundCoefficient(String),
    #[error("coefficient `@{atom}`: {source}")]
    BadCoefficient { atom: String, source: GroupError },
    #[error("coefficient `@{0}` is a matrix, not a finite-group element")]
    NotAGroupElement(String),
    #[error("epimorphism count needs at least one generator")]
    NoGenerators,
}

/// Images of the coefficient atoms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoefficientBinding {
    entries: Vec<(String, usize)>,
}

impl CoefficientBinding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, atom: &str, element: usize) -> Self {
        self.entries.retain(|(a, _)| a != atom);
        self.entries.push((atom.to_string(), element));
        self
    }

    pub fn get(&self, atom: &str) -> Option<usize> {
        self.entries.iter().find(|(a, _)| a == atom).map(|&(_, e)| e)
    }

    /// Resolves the values written in a document's coefficients section.
    pub fn from_document(doc: &GeqDocument, group: &FiniteGroup) -> Result<Self, SolveError> {
        let mut binding = CoefficientBinding::new();
        for (atom, value) in &doc.coefficients {
            let element = match value {
                None => continue,
                Some(CoefficientValue::Index(i)) => group.parse_element(&format!("#{i}")),
                Some(CoefficientValue::Permutation(p)) => group
                    .element_of_perm(p)
                    .ok_or_else(|| GroupError::NoSuchElement(crate::fingroup::cycle_notation(p))),
                Some(CoefficientValue::Matrix(_)) => return Err(SolveError::NotAGroupElement(atom.clone())),
            }
            .map_err(|source| SolveError::BadCoefficient {
                atom: atom.clone(),
                source,
            })?;
            binding = binding.bind(atom, element);
        }
        Ok(binding)
    }

    /// Images of the atoms the system actually uses, in atom order.
    pub fn used_values(&self, sys: &EquationSystem) -> Result<Vec<usize>, SolveError> {
        sys.used_atoms()
            .into_iter()
            .map(|a| self.get(a).ok_or_else(|| SolveError::UnboundCoefficient(a.to_string())))
            .collect()
    }
}

/// A word compiled against a generator list: `(slot, exponent mod exp(G))`.
#[derive(Debug, Clone)]
pub(crate) struct CompiledWord {
    letters: Vec<(usize, i64)>,
}

impl CompiledWord {
    /// `slot_of` maps a symbol to its position in the image vector.
    pub(crate) fn compile(word: &Word, group_exponent: u64, slot_of: impl Fn(&str, LetterKind) -> usize) -> Self {
        let modulus = BigInt::from(group_exponent);
        let letters = word
            .letters()
            .iter()
            .map(|l| {
                let e = l
                    .exponent()
                    .mod_floor(&modulus)
                    .to_i64()
                    .expect("reduced exponent fits");
                (slot_of(l.symbol(), l.kind()), e)
            })
            .filter(|&(_, e)| e != 0)
            .collect();
        CompiledWord { letters }
    }

    #[inline]
    pub(crate) fn eval(&self, group: &FiniteGroup, images: &[usize]) -> usize {
        self.letters.iter().fold(group.identity(), |acc, &(slot, e)| {
            group.mul(acc, group.pow(images[slot], e))
        })
    }
}

/// Generator slots are the unknowns (in order) followed by the used atoms.
pub(crate) fn compile_system(sys: &EquationSystem, group: &FiniteGroup) -> Vec<CompiledWord> {
    let atoms = sys.used_atoms();
    let m = sys.unknowns().len();
    let exponent = group.exponent();
    sys.equations()
        .iter()
        .map(|eq| {
            CompiledWord::compile(eq.lhs(), exponent, |s, kind| match kind {
                LetterKind::Unknown => sys.unknowns().iter().position(|u| u == s).expect("declared unknown"),
                LetterKind::Coefficient => m + atoms.iter().position(|a| *a == s).expect("used atom"),
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct SolutionSet {
    /// One assignment per solution, listing the images of the unknowns in
    /// unknown order; sorted lexicographically.
    pub solutions: Vec<Vec<usize>>,
}

impl SolutionSet {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }
}

/// Tests every assignment of the unknowns, in lexicographic order of element
/// indices.
pub fn enumerate_solutions(
    sys: &EquationSystem,
    group: &FiniteGroup,
    binding: &CoefficientBinding,
    budget: u64,
) -> Result<SolutionSet, SolveError> {
    let atom_values = binding.used_values(sys)?;
    let m = sys.unknowns().len();
    let n = group.order();
    let required = BigInt::from(n).pow(m as u32) * BigInt::from(sys.equations().len().max(1));
    if required > BigInt::from(budget) {
        return Err(SolveError::BudgetExceeded { budget, required });
    }
    let words = compile_system(sys, group);
    if m == 0 {
        let holds = words.iter().all(|w| w.eval(group, &atom_values) == group.identity());
        let solutions = if holds { vec![vec![]] } else { vec![] };
        return Ok(SolutionSet { solutions });
    }
    let solutions: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut images = vec![0usize; m];
            images.extend_from_slice(&atom_values);
            images[0] = first;
            let inner: usize = n.pow(m as u32 - 1);
            for k in 0..inner {
                let mut rest = k;
                for slot in (1..m).rev() {
                    images[slot] = rest % n;
                    rest /= n;
                }
                if words.iter().all(|w| w.eval(group, &images) == group.identity()) {
                    found.push(images[..m].to_vec());
                }
            }
            found
        })
        .collect();
    debug_assert!(solutions.windows(2).all(|w| w[0] < w[1]));
    Ok(SolutionSet { solutions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Theorem {
    Solomon,
    Grv,
    Km,
    Km17Epi,
}

impl Theorem {
    pub fn key(self) -> &'static str {
        match self {
            Theorem::Solomon => "solomon",
            Theorem::Grv => "grv",
            Theorem::Km => "km",
            Theorem::Km17Epi => "km17",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Theorem::Solomon => "Solomon",
            Theorem::Grv => "Gordon–Rodríguez-Villegas",
            Theorem::Km => "KM centralizer divisibility",
            Theorem::Km17Epi => "epimorphism divisibility",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityVerdict {
    pub theorem: Theorem,
    pub applicable: bool,
    pub reason: String,
    pub divisor: u64,
    pub count: u64,
    /// `divisor | count`.
    pub passed: bool,
}

impl DivisibilityVerdict {
    fn new(theorem: Theorem, applicable: bool, reason: String, divisor: u64, count: u64) -> Self {
        DivisibilityVerdict {
            theorem,
            applicable,
            reason,
            divisor,
            count,
            passed: count.is_multiple_of(divisor),
        }
    }

    /// True unless the theorem applies and its divisibility claim fails.
    pub fn holds(&self) -> bool {
        !self.applicable || self.passed
    }
}

/// Solomon, GRV and KM verdicts for a solution count. All three are always
/// returned; `applicable` says whether the hypotheses hold.
pub fn divisibility_verdicts(
    sys: &EquationSystem,
    group: &FiniteGroup,
    binding: &CoefficientBinding,
    count: u64,
) -> Result<Vec<DivisibilityVerdict>, SolveError> {
    let n = sys.equations().len();
    let m = sys.unknowns().len();
    let r = rank(&exponent_matrix(sys));
    let free = sys.is_coefficient_free();
    let order = group.order() as u64;

    let solomon = if !free {
        "system has coefficients".to_string()
    } else if n < m {
        format!("coefficient-free, {n} equations < {m} unknowns")
    } else {
        format!("{n} equations >= {m} unknowns")
    };
    let rank_reason = if r < m {
        format!("rank {r} < {m} unknowns")
    } else {
        format!("rank {r} = {m} unknowns")
    };
    let grv = if free {
        format!("coefficient-free, {rank_reason}")
    } else {
        "system has coefficients".to_string()
    };
    let coeffs = binding.used_values(sys)?;
    let c = centralizer(group, &coeffs).order() as u64;

    Ok(vec![
        DivisibilityVerdict::new(Theorem::Solomon, free && n < m, solomon, order, count),
        DivisibilityVerdict::new(Theorem::Grv, free && r < m, grv, order, count),
        DivisibilityVerdict::new(Theorem::Km, r < m, rank_reason, c, count),
    ])
}

/// Number of `r`-tuples of elements generating `group`, with the KM17
/// verdict (divisor `|[G, G]|`).
pub fn count_epimorphisms(
    r: usize,
    group: &FiniteGroup,
    budget: u64,
) -> Result<(u64, DivisibilityVerdict), SolveError> {
    if r == 0 {
        return Err(SolveError::NoGenerators);
    }
    let n = group.order();
    let required = BigInt::from(n).pow(r as u32);
    if required > BigInt::from(budget) {
        return Err(SolveError::BudgetExceeded { budget, required });
    }
    let total = n.pow(r as u32);
    let count = (0..total)
        .into_par_iter()
        .filter(|&k| {
            let mut rest = k;
            let tuple: Vec<usize> = (0..r)
                .map(|_| {
                    let g = rest % n;
                    rest /= n;
                    g
                })
                .collect();
            subgroup_closure(group, &tuple).order() == n
        })
        .count() as u64;
    let divisor = commutator_subgroup(group).order() as u64;
    let verdict = DivisibilityVerdict::new(
        Theorem::Km17Epi,
        true,
        format!("free group of rank {r} has infinite abelianisation"),
        divisor,
        count,
    );
    Ok((count, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqlang::{parse_document, parse_system};
    use crate::fingroup::{build_group, DEFAULT_SIZE_CAP};

    fn group(spec: &str) -> FiniteGroup {
        build_group(spec, DEFAULT_SIZE_CAP).unwrap()
    }

    #[test]
    fn cube_equation_has_three_solutions() {
        let g = group("S3");
        let doc = parse_document("coefficients:\na = (1 2 3)\nequations:\nx^3 y^3 = @a").unwrap();
        let b = CoefficientBinding::from_document(&doc, &g).unwrap();
        let sols = enumerate_solutions(&doc.system, &g, &b, DEFAULT_EVAL_BUDGET).unwrap();
        assert_eq!(sols.count(), 3);
        let v = divisibility_verdicts(&doc.system, &g, &b, 3).unwrap();
        let km = v.iter().find(|v| v.theorem == Theorem::Km).unwrap();
        assert!(km.applicable && km.passed);
        assert_eq!(km.divisor, 3);
        assert!(!v[0].applicable && !v[1].applicable);
        // x and y are transpositions in every solution.
        for s in &sols.solutions {
            assert!(s.iter().all(|&e| g.element_order(e) == 2));
        }
    }

    #[test]
    fn squares_equation_has_ninety_solutions() {
        let g = group("S3");
        let sys = parse_system("x^2 y^2 z^2 = 1").unwrap();
        let sols = enumerate_solutions(&sys, &g, &CoefficientBinding::new(), DEFAULT_EVAL_BUDGET).unwrap();
        assert_eq!(sols.count(), 90);
        let v = divisibility_verdicts(&sys, &g, &CoefficientBinding::new(), 90).unwrap();
        assert!(v.iter().all(|v| v.applicable && v.passed && v.divisor == 6));
    }

    #[test]
    fn commuting_pairs_in_s3() {
        let g = group("S3");
        let sys = parse_system("[x,y] = 1").unwrap();
        let n = enumerate_solutions(&sys, &g, &CoefficientBinding::new(), DEFAULT_EVAL_BUDGET)
            .unwrap()
            .count();
        let class_sum: usize = g.elements().map(|a| centralizer(&g, &[a]).order()).sum();
        assert_eq!(n, class_sum);
        assert_eq!(n, 18);
    }

    #[test]
    fn no_theorem_for_single_square() {
        let g = group("S3");
        let sys = parse_system("x^2 = 1").unwrap();
        let b = CoefficientBinding::new();
        let count = enumerate_solutions(&sys, &g, &b, DEFAULT_EVAL_BUDGET).unwrap().count();
        assert_eq!(count, 4);
        let v = divisibility_verdicts(&sys, &g, &b, count as u64).unwrap();
        assert!(v.iter().all(|v| !v.applicable && v.holds()));
        assert!(v.iter().all(|v| !v.reason.is_empty()));
    }

    #[test]
    fn rank_one_system_divisible_by_order() {
        let sys = parse_system("x^100 y^100 [x,y]^777 = 1 ; (x y)^2020 = 1").unwrap();
        for spec in ["S3", "S4", "D4", "C6"] {
            let g = group(spec);
            let b = CoefficientBinding::new();
            let c = enumerate_solutions(&sys, &g, &b, DEFAULT_EVAL_BUDGET).unwrap().count();
            let v = divisibility_verdicts(&sys, &g, &b, c as u64).unwrap();
            let grv = v.iter().find(|v| v.theorem == Theorem::Grv).unwrap();
            assert!(grv.applicable && grv.passed, "{spec}: {c}");
            assert!(!v[0].applicable, "Solomon needs n < m");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let sys = parse_system("x y z w = 1").unwrap();
        let err = enumerate_solutions(&sys, &group("S4"), &CoefficientBinding::new(), 1000).unwrap_err();
        match err {
            SolveError::BudgetExceeded { budget, required } => {
                assert_eq!(budget, 1000);
                assert_eq!(required, BigInt::from(24u64.pow(4)));
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn unbound_coefficient_is_reported() {
        let sys = parse_system("x = @a").unwrap();
        let err = enumerate_solutions(&sys, &group("S3"), &CoefficientBinding::new(), 100).unwrap_err();
        assert!(matches!(err, SolveError::UnboundCoefficient(a) if a == "a"));
    }

    #[test]
    fn count_is_invariant_under_unknown_permutation() {
        let g = group("S3");
        let sys = parse_system("x^2 y z^-1 [x,z] = 1").unwrap();
        let b = CoefficientBinding::new();
        let base = enumerate_solutions(&sys, &g, &b, DEFAULT_EVAL_BUDGET).unwrap().count();
        let perm = sys.with_unknown_order(vec!["z".into(), "x".into(), "y".into()]);
        assert_eq!(
            enumerate_solutions(&perm, &g, &b, DEFAULT_EVAL_BUDGET).unwrap().count(),
            base
        );
    }

    #[test]
    fn epimorphism_examples() {
        let (n, v) = count_epimorphisms(2, &group("S3"), DEFAULT_EVAL_BUDGET).unwrap();
        assert_eq!((n, v.divisor, v.passed), (18, 3, true));
        let (n, v) = count_epimorphisms(1, &group("C3"), DEFAULT_EVAL_BUDGET).unwrap();
        assert_eq!((n, v.divisor, v.passed), (2, 1, true));
        let (n, v) = count_epimorphisms(2, &group("product(C2,C2)"), DEFAULT_EVAL_BUDGET).unwrap();
        assert_eq!((n, v.divisor, v.passed), (6, 1, true));
        assert!(count_epimorphisms(0, &group("C3"), 10).is_err());
    }
}
