//! Finite groups stored as multiplication tables.
//!
//! Elements are indices `0..order`. Groups given by permutations keep their
//! permutation realization so elements can be named in cycle notation, but
//! every group operation goes through the table.
//!
//! Permutations compose left to right: in `p·q` the left factor `p` is
//! applied first, so `(p·q)(i) = q(p(i))`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::word::GroupOps;

pub const DEFAULT_SIZE_CAP: usize = 10_000;

const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 64;
const SAMPLED_TRIPLES: usize = 10_000;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("malformed group spec `{0}`")]
    MalformedSpec(String),
    #[error("malformed permutation `{0}`")]
    MalformedPermutation(String),
    #[error("group closure exceeds the size cap of {cap} elements")]
    TooLarge { cap: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("element `{0}` is not in the group")]
    NoSuchElement(String),
    #[error("cannot read group table {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// A permutation of `0..n`, stored as its image list.
pub type Perm = Vec<u32>;

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    identity: usize,
    element_orders: Vec<u64>,
    labels: Vec<String>,
    perms: Option<Vec<Perm>>,
}

impl FiniteGroup {
    /// Builds a group from a full multiplication table (`table[g][h] = g·h`),
    /// checking the group axioms. Associativity is checked on every triple up
    /// to 64 elements and on a seeded random sample above that.
    pub fn from_table(name: &str, rows: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        Self::from_table_seeded(name, rows, 0)
    }

    /// [`FiniteGroup::from_table`] with an explicit sampling seed.
    pub fn from_table_seeded(name: &str, rows: Vec<Vec<usize>>, seed: u64) -> Result<Self, GroupError> {
        let n = rows.len();
        if n == 0 {
            return Err(GroupError::NotAGroup("empty table".into()));
        }
        let mut table = Vec::with_capacity(n * n);
        for (g, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::NotAGroup(format!(
                    "row {g} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &h in row {
                if h >= n {
                    return Err(GroupError::NotAGroup(format!("entry {h} out of range")));
                }
                table.push(h as u32);
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e * n + g] as usize == g && table[g * n + e] as usize == g))
            .ok_or_else(|| GroupError::NotAGroup("no identity element".into()))?;
        let mut inverse = vec![0u32; n];
        for g in 0..n {
            let inv = (0..n)
                .find(|&h| table[g * n + h] as usize == identity && table[h * n + g] as usize == identity)
                .ok_or_else(|| GroupError::NotAGroup(format!("element {g} has no inverse")))?;
            inverse[g] = inv as u32;
        }
        let group = FiniteGroup::assemble(name.to_string(), n, table, inverse, identity, None, None);
        group.check_associativity(seed)?;
        Ok(group)
    }

    /// Reads the `table{file}` format: first line `N`, then `N` rows of `N`
    /// whitespace-separated indices.
    pub fn from_table_file(path: &Path) -> Result<Self, GroupError> {
        Self::from_table_file_seeded(path, 0)
    }

    pub fn from_table_file_seeded(path: &Path, seed: u64) -> Result<Self, GroupError> {
        let text = std::fs::read_to_string(path).map_err(|source| GroupError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut tokens = text.split_whitespace();
        let bad = || GroupError::MalformedSpec(format!("table{{{}}}", path.display()));
        let n: usize = tokens.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            let row = (0..n)
                .map(|_| tokens.next().and_then(|t| t.parse().ok()).ok_or_else(bad))
                .collect::<Result<Vec<usize>, _>>()?;
            rows.push(row);
        }
        if tokens.next().is_some() {
            return Err(bad());
        }
        FiniteGroup::from_table_seeded(&format!("table{{{}}}", path.display()), rows, seed)
    }

    /// Closes a set of permutations of a common degree under composition.
    pub fn from_permutations(name: &str, generators: &[Perm], cap: usize) -> Result<Self, GroupError> {
        let degree = generators.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let gens: Vec<Perm> = generators.iter().map(|g| extend_perm(g, degree)).collect();
        let id: Perm = (0..degree as u32).collect();
        let mut index: HashMap<Perm, usize> = HashMap::new();
        let mut elements = vec![id.clone()];
        index.insert(id, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in &gens {
                let p = compose(&elements[i], g);
                if !index.contains_key(&p) {
                    if elements.len() >= cap {
                        return Err(GroupError::TooLarge { cap });
                    }
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        elements.sort();
        let index: HashMap<&Perm, usize> = elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                table.push(index[&compose(a, b)] as u32);
            }
        }
        let inverse = elements.iter().map(|p| index[&invert_perm(p)] as u32).collect();
        let labels = elements.iter().map(|p| cycle_notation(p)).collect();
        Ok(FiniteGroup::assemble(
            name.to_string(),
            n,
            table,
            inverse,
            0,
            Some(labels),
            Some(elements),
        ))
    }

    fn assemble(
        name: String,
        n: usize,
        table: Vec<u32>,
        inverse: Vec<u32>,
        identity: usize,
        labels: Option<Vec<String>>,
        perms: Option<Vec<Perm>>,
    ) -> Self {
        let mut group = FiniteGroup {
            name,
            order: n,
            table,
            inverse,
            identity,
            element_orders: Vec::new(),
            labels: labels.unwrap_or_else(|| (0..n).map(|i| format!("g{i}")).collect()),
            perms,
        };
        group.element_orders = (0..n)
            .map(|g| {
                let mut k = 1u64;
                let mut x = g;
                while x != identity {
                    x = group.mul(x, g);
                    k += 1;
                }
                k
            })
            .collect();
        group
    }

    /// Direct product. Two permutation groups act on the disjoint union of
    /// their points; otherwise element `(g, h)` has index `g·|H| + h`.
    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let name = format!("product({},{})", a.name, b.name);
        if let (Some(pa), Some(pb)) = (&a.perms, &b.perms) {
            // Act on the disjoint union of the two point sets.
            let da = pa[0].len();
            let db = pb[0].len();
            let mut gens: Vec<Perm> = Vec::new();
            for p in pa {
                let mut q = p.clone();
                q.extend((da..da + db).map(|i| i as u32));
                gens.push(q);
            }
            for p in pb {
                let mut q: Perm = (0..da as u32).collect();
                q.extend(p.iter().map(|&i| i + da as u32));
                gens.push(q);
            }
            return FiniteGroup::from_permutations(&name, &gens, usize::MAX)
                .expect("uncapped closure of a finite product");
        }
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let mut table = Vec::with_capacity(n * n);
        for g in 0..n {
            for h in 0..n {
                let (g1, g2) = (g / nb, g % nb);
                let (h1, h2) = (h / nb, h % nb);
                table.push((a.mul(g1, h1) * nb + b.mul(g2, h2)) as u32);
            }
        }
        let inverse = (0..n).map(|g| (a.inv(g / nb) * nb + b.inv(g % nb)) as u32).collect();
        let labels = (0..n)
            .map(|g| format!("({},{})", a.label(g / nb), b.label(g % nb)))
            .collect();
        FiniteGroup::assemble(
            name,
            n,
            table,
            inverse,
            a.identity * nb + b.identity,
            Some(labels),
            None,
        )
    }

    fn check_associativity(&self, seed: u64) -> Result<(), GroupError> {
        let n = self.order;
        let check = |a: usize, b: usize, c: usize| -> Result<(), GroupError> {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(GroupError::NotAGroup(format!("associativity fails on ({a}, {b}, {c})")));
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..SAMPLED_TRIPLES {
                check(rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n))?;
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }

    /// `h^g = g⁻¹·h·g`.
    #[inline]
    pub fn conj(&self, h: usize, g: usize) -> usize {
        self.mul(self.mul(self.inv(g), h), g)
    }

    /// `[a, b] = a⁻¹b⁻¹ab`.
    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.element_orders[a]
    }

    /// Least common multiple of all element orders.
    pub fn exponent(&self) -> u64 {
        self.element_orders.iter().fold(1u64, |acc, &o| acc.lcm(&o))
    }

    /// `a^k` with `k` reduced modulo the order of `a`.
    pub fn pow(&self, a: usize, k: i64) -> usize {
        let ord = self.element_orders[a] as i64;
        let mut e = k.rem_euclid(ord);
        let mut result = self.identity;
        let mut sq = a;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(sq, sq);
            }
        }
        result
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn permutations(&self) -> Option<&[Perm]> {
        self.perms.as_deref()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Resolves an element written in cycle notation (permutation groups) or
    /// as an index `#k` (any group).
    pub fn parse_element(&self, text: &str) -> Result<usize, GroupError> {
        let t = text.trim();
        if let Some(index) = t.strip_prefix('#') {
            return index
                .parse::<usize>()
                .ok()
                .filter(|&i| i < self.order)
                .ok_or_else(|| GroupError::NoSuchElement(text.to_string()));
        }
        if self.perms.is_none() {
            return Err(GroupError::NoSuchElement(text.to_string()));
        }
        let p = parse_cycles(t)?;
        self.element_of_perm(&p)
            .ok_or_else(|| GroupError::NoSuchElement(text.to_string()))
    }

    /// Index of the permutation `p` (extended by fixed points as needed).
    pub fn element_of_perm(&self, p: &Perm) -> Option<usize> {
        let perms = self.perms.as_ref()?;
        let degree = perms[0].len();
        if p.len() > degree && p[degree..].iter().enumerate().any(|(i, &v)| v as usize != degree + i) {
            return None;
        }
        let q = extend_perm(&p[..p.len().min(degree)], degree);
        perms.binary_search(&q).ok()
    }
}

impl GroupOps for FiniteGroup {
    type Elem = usize;

    fn identity(&self) -> usize {
        self.identity
    }

    fn mul(&self, a: &usize, b: &usize) -> usize {
        FiniteGroup::mul(self, *a, *b)
    }

    fn inv(&self, a: &usize) -> usize {
        FiniteGroup::inv(self, *a)
    }

    fn order_of(&self, a: &usize) -> Option<u64> {
        Some(self.element_orders[*a])
    }
}

/// A subgroup, as a sorted member list plus a membership mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    members: Vec<usize>,
    mask: Vec<bool>,
}

impl Subgroup {
    pub fn from_members(group_order: usize, mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        let mut mask = vec![false; group_order];
        for &m in &members {
            mask[m] = true;
        }
        Subgroup { members, mask }
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Subgroup::from_members(group.order(), group.elements().collect())
    }

    pub fn trivial(group: &FiniteGroup) -> Self {
        Subgroup::from_members(group.order(), vec![group.identity()])
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    #[inline]
    pub fn contains(&self, g: usize) -> bool {
        self.mask[g]
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&g| other.contains(g))
    }

    fn is_closed_in(&self, group: &FiniteGroup) -> bool {
        self.contains(group.identity())
            && self
                .members
                .iter()
                .all(|&a| self.contains(group.inv(a)) && self.members.iter().all(|&b| self.contains(group.mul(a, b))))
    }

    pub fn is_normal_in(&self, group: &FiniteGroup) -> bool {
        group
            .elements()
            .all(|g| self.members.iter().all(|&h| self.contains(group.conj(h, g))))
    }
}

/// Smallest subgroup containing `seeds`.
pub fn subgroup_closure(group: &FiniteGroup, seeds: &[usize]) -> Subgroup {
    let mut mask = vec![false; group.order()];
    let mut members = vec![group.identity()];
    mask[group.identity()] = true;
    let gens: Vec<usize> = seeds.iter().copied().filter(|&s| s != group.identity()).collect();
    let mut i = 0;
    while i < members.len() {
        let a = members[i];
        for &g in &gens {
            let p = group.mul(a, g);
            if !mask[p] {
                mask[p] = true;
                members.push(p);
            }
        }
        i += 1;
    }
    let sub = Subgroup::from_members(group.order(), members);
    debug_assert!(sub.is_closed_in(group));
    debug_assert_eq!(group.order() % sub.order(), 0);
    sub
}

/// `C(X) = {g : gx = xg for all x ∈ X}`.
pub fn centralizer(group: &FiniteGroup, set: &[usize]) -> Subgroup {
    let members = group
        .elements()
        .filter(|&g| set.iter().all(|&x| group.mul(g, x) == group.mul(x, g)))
        .collect();
    let sub = Subgroup::from_members(group.order(), members);
    debug_assert!(sub.is_closed_in(group));
    sub
}

/// `[G, G]`, the closure of all commutators.
pub fn commutator_subgroup(group: &FiniteGroup) -> Subgroup {
    let mut comms: Vec<usize> = Vec::new();
    let mut seen = vec![false; group.order()];
    for a in group.elements() {
        for b in group.elements() {
            let c = group.commutator(a, b);
            if !seen[c] {
                seen[c] = true;
                comms.push(c);
            }
        }
    }
    subgroup_closure(group, &comms)
}

/// Parses a group spec: `S<n>`, `A<n>`, `C<n>`, `D<n>` (dihedral of order
/// `2n`), `product(spec,spec)`, `perm{cycles,...}`, or `table{path}`.
pub fn build_group(spec: &str, cap: usize) -> Result<FiniteGroup, GroupError> {
    build_group_seeded(spec, cap, 0)
}

/// [`build_group`] with the seed used to sample associativity of large
/// tables.
pub fn build_group_seeded(spec: &str, cap: usize, seed: u64) -> Result<FiniteGroup, GroupError> {
    let s = spec.trim();
    let malformed = || GroupError::MalformedSpec(spec.to_string());
    let group = if let Some(inner) = s.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
        let split = top_level_comma(inner).ok_or_else(malformed)?;
        let a = build_group_seeded(&inner[..split], cap, seed)?;
        let b = build_group_seeded(&inner[split + 1..], cap, seed)?;
        if a.order().saturating_mul(b.order()) > cap {
            return Err(GroupError::TooLarge { cap });
        }
        FiniteGroup::direct_product(&a, &b)
    } else if let Some(inner) = s.strip_prefix("perm{").and_then(|r| r.strip_suffix('}')) {
        let gens = split_generators(inner)
            .iter()
            .map(|g| parse_cycles(g))
            .collect::<Result<Vec<_>, _>>()?;
        FiniteGroup::from_permutations(s, &gens, cap)?
    } else if let Some(inner) = s.strip_prefix("table{").and_then(|r| r.strip_suffix('}')) {
        let g = FiniteGroup::from_table_file_seeded(Path::new(inner.trim()), seed)?;
        if g.order() > cap {
            return Err(GroupError::TooLarge { cap });
        }
        g
    } else {
        let (family, n) = s.split_at(1.min(s.len()));
        let n: usize = n.parse().map_err(|_| malformed())?;
        if n == 0 {
            return Err(malformed());
        }
        let gens = match family {
            "S" => symmetric_generators(n),
            "A" => (3..=n).map(|k| cycle(&[1, 2, k], n)).collect(),
            "C" => vec![cycle(&(1..=n).collect::<Vec<_>>(), n)],
            "D" => dihedral_generators(n),
            _ => return Err(malformed()),
        };
        FiniteGroup::from_permutations(s, &gens, cap)?
    };
    Ok(group)
}

fn symmetric_generators(n: usize) -> Vec<Perm> {
    if n < 2 {
        return vec![];
    }
    vec![cycle(&[1, 2], n), cycle(&(1..=n).collect::<Vec<_>>(), n)]
}

fn dihedral_generators(n: usize) -> Vec<Perm> {
    match n {
        1 => vec![cycle(&[1, 2], 2)],
        2 => vec![cycle(&[1, 2], 4), cycle(&[3, 4], 4)],
        _ => {
            let rotation = cycle(&(1..=n).collect::<Vec<_>>(), n);
            let reflection: Perm = (0..n as u32).map(|i| n as u32 - 1 - i).collect();
            vec![rotation, reflection]
        }
    }
}

/// The cycle `(points)` on `1..=degree`, as a 0-based permutation.
fn cycle(points: &[usize], degree: usize) -> Perm {
    let mut p: Perm = (0..degree as u32).collect();
    for (i, &a) in points.iter().enumerate() {
        let b = points[(i + 1) % points.len()];
        p[a - 1] = (b - 1) as u32;
    }
    p
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' | '[' => depth += 1,
            ')' | '}' | ']' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Splits `"(1 2),(1 2 3)"` into generator strings at top-level commas.
fn split_generators(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = s;
    while let Some(i) = top_level_comma(rest) {
        out.push(&rest[..i]);
        rest = &rest[i + 1..];
    }
    if !rest.trim().is_empty() {
        out.push(rest);
    }
    out
}

/// Parses cycle notation with 1-based points, e.g. `(1 2 3)(4 5)`, `(1,2)`,
/// or `()` for the identity.
pub fn parse_cycles(text: &str) -> Result<Perm, GroupError> {
    let bad = || GroupError::MalformedPermutation(text.to_string());
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = text.trim();
    if rest == "e" || rest == "1" {
        return Ok(vec![0]);
    }
    while !rest.is_empty() {
        let inner_end = rest.find(')').ok_or_else(bad)?;
        let inner = rest.strip_prefix('(').ok_or_else(bad)?;
        let body = &inner[..inner_end - 1];
        let points = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().ok().filter(|&p| p >= 1).ok_or_else(bad))
            .collect::<Result<Vec<_>, _>>()?;
        let mut sorted = points.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() {
            return Err(bad());
        }
        cycles.push(points);
        rest = rest[inner_end + 1..].trim_start();
    }
    let degree = cycles.iter().flatten().copied().max().unwrap_or(1);
    // Cycles written side by side compose left to right as well.
    let mut p: Perm = (0..degree as u32).collect();
    for c in &cycles {
        if c.len() > 1 {
            p = compose(&p, &cycle(c, degree));
        }
    }
    Ok(p)
}

/// `(a·b)(i) = b(a(i))`.
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    let n = a.len().max(b.len());
    let a = extend_perm(a, n);
    let b = extend_perm(b, n);
    a.iter().map(|&i| b[i as usize]).collect()
}

fn invert_perm(p: &Perm) -> Perm {
    let mut q = vec![0u32; p.len()];
    for (i, &v) in p.iter().enumerate() {
        q[v as usize] = i as u32;
    }
    q
}

fn extend_perm(p: &[u32], degree: usize) -> Perm {
    let mut q = p.to_vec();
    q.extend((p.len()..degree).map(|i| i as u32));
    q
}

/// Cycle notation with 1-based points; the identity prints as `()`.
pub fn cycle_notation(p: &[u32]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] as usize == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        let mut first = true;
        while !seen[i] {
            seen[i] = true;
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "{}", i + 1);
            i = p[i] as usize;
        }
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}
