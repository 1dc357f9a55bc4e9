//! Similarity classes of homomorphisms from an indexed group into a finite
//! group.
//!
//! The indexed group is `F = ⟨unknowns, atoms | equations⟩` with the degree
//! map from [`make_indexing`]. A homomorphism is stored as the images of the
//! generators: unknowns first, then the coefficient atoms used by the
//! system. For a subgroup `H ≤ G`:
//!
//! * the φ-core `H_φ` is the set of `h ∈ H` with `φ(f)⁻¹hφ(f) ∈ H` for
//!   every `f` and `h` commuting with `φ(ker deg)`;
//! * `φ` and `ψ` have the same tail when they agree on `ker deg` and
//!   `ψ(f)H = φ(f)H` for every `f`;
//! * `φ` and `ψ` are similar when some `H`-conjugate of `φ` has the same
//!   tail as `ψ`.
//!
//! Quantifiers over all of `F` are discharged through finite reductions:
//! `ker deg` is generated by the Schreier elements `tⁿ·g·t^-(n+deg g)` for a
//! degree-one word `t`, and their images repeat with period `ord φ(t)`.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::eqlang::EquationSystem;
use crate::fingroup::{centralizer, commutator_subgroup, subgroup_closure, FiniteGroup, Subgroup};
use crate::solvecount::{
    compile_system, enumerate_solutions, CoefficientBinding, CompiledWord, SolutionSet, SolveError,
};
use crate::zlinalg::{make_indexing, Indexing, ZError};

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Indexing(#[from] ZError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("degree {0} does not fit in a machine integer")]
    DegreeOverflow(BigInt),
    #[error("element {element} is not in the φ-core of the homomorphism; the twist need not be a homomorphism")]
    NotInCore { element: usize },
    #[error("the set of homomorphisms is not closed: {0}")]
    NotClosed(ConditionWitness),
    #[error("assignment has {got} images, expected {expected}")]
    WrongArity { got: usize, expected: usize },
}

/// A homomorphism `F → G`, given by the images of the generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hom(pub Vec<usize>);

impl Hom {
    pub fn images(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Debug)]
pub struct IndexedHomContext<'g> {
    group: &'g FiniteGroup,
    subgroup: Subgroup,
    indexing: Indexing,
    /// Degree of each generator slot.
    degrees: Vec<i64>,
    relators: Vec<CompiledWord>,
    /// Degree-one word as `(slot, exponent)` pairs.
    degree_one: Vec<(usize, i64)>,
    unknowns: usize,
    atom_values: Vec<usize>,
}

impl<'g> IndexedHomContext<'g> {
    pub fn new(
        sys: &EquationSystem,
        group: &'g FiniteGroup,
        binding: &CoefficientBinding,
        subgroup: Subgroup,
    ) -> Result<Self, SimError> {
        let indexing = make_indexing(sys)?;
        Self::with_indexing(sys, group, binding, subgroup, indexing)
    }

    pub fn with_indexing(
        sys: &EquationSystem,
        group: &'g FiniteGroup,
        binding: &CoefficientBinding,
        subgroup: Subgroup,
        indexing: Indexing,
    ) -> Result<Self, SimError> {
        let atom_values = binding.used_values(sys)?;
        let unknown_degrees = indexing
            .degrees()
            .iter()
            .map(|d| d.to_i64().ok_or_else(|| SimError::DegreeOverflow(d.clone())))
            .collect::<Result<Vec<i64>, _>>()?;
        let mut degrees = unknown_degrees.clone();
        degrees.extend(std::iter::repeat_n(0, atom_values.len()));
        let degree_one = degree_one_word(&unknown_degrees);
        debug_assert_eq!(degree_one.iter().map(|&(s, c)| c * unknown_degrees[s]).sum::<i64>(), 1);
        Ok(IndexedHomContext {
            group,
            subgroup,
            indexing,
            degrees,
            relators: compile_system(sys, group),
            degree_one,
            unknowns: sys.unknowns().len(),
            atom_values,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.subgroup
    }

    pub fn indexing(&self) -> &Indexing {
        &self.indexing
    }

    /// The degree-one word `t` as `(unknown index, exponent)` pairs.
    pub fn degree_one_word(&self) -> &[(usize, i64)] {
        &self.degree_one
    }

    pub fn generator_degrees(&self) -> &[i64] {
        &self.degrees
    }

    /// Extends an assignment of the unknowns by the bound atom values.
    pub fn hom_from_assignment(&self, unknown_images: &[usize]) -> Result<Hom, SimError> {
        if unknown_images.len() != self.unknowns {
            return Err(SimError::WrongArity {
                got: unknown_images.len(),
                expected: self.unknowns,
            });
        }
        let mut images = unknown_images.to_vec();
        images.extend_from_slice(&self.atom_values);
        Ok(Hom(images))
    }

    pub fn homs_from_solutions(&self, solutions: &SolutionSet) -> Result<Vec<Hom>, SimError> {
        solutions
            .solutions
            .iter()
            .map(|s| self.hom_from_assignment(s))
            .collect()
    }

    /// Every relator evaluates to the identity.
    pub fn satisfies_relators(&self, phi: &Hom) -> bool {
        self.relators
            .iter()
            .all(|r| r.eval(self.group, &phi.0) == self.group.identity())
    }

    /// The atoms keep their bound values.
    pub fn fixes_coefficients(&self, phi: &Hom) -> bool {
        phi.0[self.unknowns..] == self.atom_values[..]
    }

    /// `φ(t)`.
    pub fn degree_one_image(&self, phi: &Hom) -> usize {
        let g = self.group;
        self.degree_one
            .iter()
            .fold(g.identity(), |acc, &(slot, c)| g.mul(acc, g.pow(phi.0[slot], c)))
    }

    /// Schreier generators `φ(g)·φ(t)^-deg(g)` conjugated by `φ(t)ⁿ` for
    /// `n` over one period of `φ(t)`; they generate `φ(ker deg)`.
    fn kernel_generators(&self, phi: &Hom) -> Vec<usize> {
        let g = self.group;
        let tau = self.degree_one_image(phi);
        let period = g.element_order(tau) as i64;
        let base: Vec<usize> = phi
            .0
            .iter()
            .zip(&self.degrees)
            .map(|(&x, &d)| g.mul(x, g.pow(tau, -d)))
            .collect();
        let mut seen = vec![false; g.order()];
        let mut out = Vec::new();
        for n in 0..period {
            let tn = g.pow(tau, n);
            let tn_inv = g.inv(tn);
            for &a in &base {
                let c = g.mul(g.mul(tn, a), tn_inv);
                if !seen[c] {
                    seen[c] = true;
                    out.push(c);
                }
            }
        }
        out
    }

    /// `φ(ker deg)`.
    pub fn kernel_image(&self, phi: &Hom) -> Subgroup {
        subgroup_closure(self.group, &self.kernel_generators(phi))
    }

    /// `φ(F)`.
    pub fn image(&self, phi: &Hom) -> Subgroup {
        subgroup_closure(self.group, &phi.0)
    }

    pub fn phi_core(&self, phi: &Hom) -> Subgroup {
        let g = self.group;
        let image = self.image(phi);
        let kernel_gens = self.kernel_generators(phi);
        let members = self
            .subgroup
            .members()
            .iter()
            .copied()
            .filter(|&h| {
                image.members().iter().all(|&f| self.subgroup.contains(g.conj(h, f)))
                    && kernel_gens.iter().all(|&k| g.mul(h, k) == g.mul(k, h))
            })
            .collect();
        let core = Subgroup::from_members(g.order(), members);
        debug_assert!(core.is_subgroup_of(&self.subgroup));
        core
    }

    /// `f ↦ h⁻¹φ(f)h`.
    pub fn conjugate_hom(&self, phi: &Hom, h: usize) -> Hom {
        let g = self.group;
        let psi = Hom(phi.0.iter().map(|&x| g.conj(x, h)).collect());
        debug_assert!(self.satisfies_relators(&psi) || !self.satisfies_relators(phi));
        psi
    }

    /// The homomorphism equal to `φ` on `ker deg` with `ψ(t) = φ(t)·h`:
    /// `ψ(g) = φ(g)·φ(t)^-d·(φ(t)h)^d` for a generator `g` of degree `d`.
    pub fn twist(&self, phi: &Hom, h: usize) -> Result<Hom, SimError> {
        if !self.phi_core(phi).contains(h) {
            return Err(SimError::NotInCore { element: h });
        }
        Ok(self.twist_unchecked(phi, h))
    }

    fn twist_unchecked(&self, phi: &Hom, h: usize) -> Hom {
        let g = self.group;
        let tau = self.degree_one_image(phi);
        let shifted = g.mul(tau, h);
        let psi = Hom(phi
            .0
            .iter()
            .zip(&self.degrees)
            .map(|(&x, &d)| g.mul(g.mul(x, g.pow(tau, -d)), g.pow(shifted, d)))
            .collect());
        debug_assert!(self.satisfies_relators(&psi) || !self.satisfies_relators(phi));
        psi
    }

    /// Whether `φ` and `ψ` agree on `ker deg` and on all cosets `f·H`.
    pub fn same_tail(&self, phi: &Hom, psi: &Hom) -> bool {
        let g = self.group;
        let tp = self.degree_one_image(phi);
        let tq = self.degree_one_image(psi);
        let period = g.element_order(tp).lcm(&g.element_order(tq)) as i64;
        for n in 0..period {
            for (i, &d) in self.degrees.iter().enumerate() {
                let a = g.mul(g.mul(g.pow(tp, n), phi.0[i]), g.pow(tp, -(n + d)));
                let b = g.mul(g.mul(g.pow(tq, n), psi.0[i]), g.pow(tq, -(n + d)));
                if a != b {
                    return false;
                }
            }
        }
        self.phi_core(phi).contains(g.mul(g.inv(tp), tq))
    }

    /// Some `h ∈ H` has `same_tail(conjugate_hom(φ, h), ψ)`.
    pub fn similar(&self, phi: &Hom, psi: &Hom) -> bool {
        self.subgroup
            .members()
            .iter()
            .any(|&h| self.same_tail(&self.conjugate_hom(phi, h), psi))
    }

    /// All homomorphisms with the same tail as `φ`: `{twist(φ, h) : h ∈ H_φ}`.
    pub fn tail_fiber(&self, phi: &Hom) -> Vec<Hom> {
        self.phi_core(phi)
            .members()
            .iter()
            .map(|&h| self.twist_unchecked(phi, h))
            .collect()
    }

    /// Checks Condition I (closure under conjugation by `H`) and Condition II
    /// (closure under twisting by φ-core elements).
    pub fn check_conditions(&self, phis: &[Hom]) -> ConditionReport {
        let members: HashSet<&Hom> = phis.iter().collect();
        let mut report = ConditionReport {
            condition_one: None,
            condition_two: None,
        };
        'one: for (i, phi) in phis.iter().enumerate() {
            for &h in self.subgroup.members() {
                if !members.contains(&self.conjugate_hom(phi, h)) {
                    report.condition_one = Some(ConditionWitness {
                        condition: 1,
                        hom_index: i,
                        element: h,
                    });
                    break 'one;
                }
            }
        }
        'two: for (i, phi) in phis.iter().enumerate() {
            for &h in self.phi_core(phi).members() {
                if !members.contains(&self.twist_unchecked(phi, h)) {
                    report.condition_two = Some(ConditionWitness {
                        condition: 2,
                        hom_index: i,
                        element: h,
                    });
                    break 'two;
                }
            }
        }
        report
    }

    /// Splits a closed set of homomorphisms into similarity classes. The
    /// class of `φ` is the union of the tail fibers of its `H`-conjugates.
    pub fn partition_classes(&self, phis: &[Hom]) -> Result<SimilarityPartition, SimError> {
        let report = self.check_conditions(phis);
        if let Some(w) = report.condition_one.or(report.condition_two) {
            return Err(SimError::NotClosed(w));
        }
        let index: HashMap<&Hom, usize> = phis.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let mut class_of = vec![usize::MAX; phis.len()];
        let mut classes = Vec::new();
        for start in 0..phis.len() {
            if class_of[start] != usize::MAX {
                continue;
            }
            let phi = &phis[start];
            let mut tails: HashSet<Vec<usize>> = HashSet::new();
            for &h in self.subgroup.members() {
                let mut fiber: Vec<usize> = self
                    .tail_fiber(&self.conjugate_hom(phi, h))
                    .iter()
                    .map(|p| index[p])
                    .collect();
                fiber.sort_unstable();
                tails.insert(fiber);
            }
            let mut members: Vec<usize> = tails.iter().flatten().copied().collect();
            members.sort_unstable();
            members.dedup();
            let id = classes.len();
            for &m in &members {
                debug_assert_eq!(class_of[m], usize::MAX, "classes overlap");
                class_of[m] = id;
            }
            classes.push(SimilarityClass {
                members,
                distinct_tails: tails.len(),
                core_order: self.phi_core(phi).order(),
            });
        }
        Ok(SimilarityPartition {
            classes,
            subgroup_order: self.subgroup.order(),
        })
    }
}

/// Which subgroup `H` to act with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SubgroupChoice {
    /// The centralizer of the coefficients; the whole group when there are none.
    #[default]
    Centralizer,
    Full,
    Commutator,
}

impl FromStr for SubgroupChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "centralizer" => Ok(SubgroupChoice::Centralizer),
            "full" => Ok(SubgroupChoice::Full),
            "commutator" => Ok(SubgroupChoice::Commutator),
            _ => Err(format!(
                "unknown subgroup {s:?}; expected centralizer, full or commutator"
            )),
        }
    }
}

impl fmt::Display for SubgroupChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SubgroupChoice::Centralizer => "centralizer",
            SubgroupChoice::Full => "full",
            SubgroupChoice::Commutator => "commutator",
        })
    }
}

pub fn choose_subgroup(
    choice: SubgroupChoice,
    sys: &EquationSystem,
    group: &FiniteGroup,
    binding: &CoefficientBinding,
) -> Result<Subgroup, SimError> {
    Ok(match choice {
        SubgroupChoice::Centralizer => centralizer(group, &binding.used_values(sys)?),
        SubgroupChoice::Full => Subgroup::whole(group),
        SubgroupChoice::Commutator => commutator_subgroup(group),
    })
}

/// Solutions of a system together with their similarity classes.
#[derive(Debug, Clone)]
pub struct PartitionRun {
    pub homs: Vec<Hom>,
    pub subgroup_order: usize,
    pub report: ConditionReport,
    /// Present when both closure conditions hold.
    pub partition: Option<SimilarityPartition>,
}

/// Enumerates the solutions, checks the closure conditions and partitions
/// them into similarity classes.
pub fn partition_solutions(
    sys: &EquationSystem,
    group: &FiniteGroup,
    binding: &CoefficientBinding,
    subgroup: Subgroup,
    budget: u64,
) -> Result<PartitionRun, SimError> {
    let ctx = IndexedHomContext::new(sys, group, binding, subgroup)?;
    let solutions = enumerate_solutions(sys, group, binding, budget)?;
    let homs = ctx.homs_from_solutions(&solutions)?;
    let report = ctx.check_conditions(&homs);
    let partition = if report.condition_one_holds() && report.condition_two_holds() {
        Some(ctx.partition_classes(&homs)?)
    } else {
        None
    };
    Ok(PartitionRun {
        homs,
        subgroup_order: ctx.subgroup().order(),
        report,
        partition,
    })
}

/// Coefficients `c` with `Σ cᵢ·dᵢ = 1`, from the extended Euclidean
/// algorithm folded over the degrees; a generator of degree ±1 is used on
/// its own.
fn degree_one_word(degrees: &[i64]) -> Vec<(usize, i64)> {
    if let Some(i) = degrees.iter().position(|d| d.abs() == 1) {
        return vec![(i, degrees[i])];
    }
    let mut coeffs = vec![0i64; degrees.len()];
    let mut g = 0i64;
    for (i, &d) in degrees.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let e = g.extended_gcd(&d);
        for c in coeffs.iter_mut() {
            *c *= e.x;
        }
        coeffs[i] = e.y;
        g = e.gcd;
    }
    debug_assert_eq!(g, 1, "degrees are primitive");
    coeffs.into_iter().enumerate().filter(|&(_, c)| c != 0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionWitness {
    pub condition: u8,
    pub hom_index: usize,
    pub element: usize,
}

impl fmt::Display for ConditionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = if self.condition == 1 { "conjugating" } else { "twisting" };
        write!(
            f,
            "Condition {} fails: {what} homomorphism #{} by element {} leaves the set",
            if self.condition == 1 { "I" } else { "II" },
            self.hom_index,
            self.element
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    pub condition_one: Option<ConditionWitness>,
    pub condition_two: Option<ConditionWitness>,
}

impl ConditionReport {
    pub fn condition_one_holds(&self) -> bool {
        self.condition_one.is_none()
    }

    pub fn condition_two_holds(&self) -> bool {
        self.condition_two.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityClass {
    /// Indices into the partitioned list, sorted.
    pub members: Vec<usize>,
    /// Size of the `H`-orbit of the tail.
    pub distinct_tails: usize,
    /// `|H_φ|` for a representative.
    pub core_order: usize,
}

impl SimilarityClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityPartition {
    pub classes: Vec<SimilarityClass>,
    pub subgroup_order: usize,
}

impl SimilarityPartition {
    pub fn total(&self) -> usize {
        self.classes.iter().map(SimilarityClass::size).sum()
    }

    /// Every class has `|H|` members and `#tails · |H_φ| = |H|`.
    pub fn is_uniform(&self) -> bool {
        self.classes
            .iter()
            .all(|c| c.size() == self.subgroup_order && c.distinct_tails * c.core_order == self.subgroup_order)
    }
}
