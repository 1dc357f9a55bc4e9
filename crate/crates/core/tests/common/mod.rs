//! Oracles that share no code with the library: point counting over
//! SL2(F_p) for solution-variety dimensions, the subgroup lattice for
//! epimorphism counts, and Bareiss elimination for ranks and determinants.

#![allow(dead_code)]

use groupeq::eqlang::{CoefficientValue, GeqDocument};
use std::collections::BTreeSet;

use groupeq::fingroup::FiniteGroup;
use groupeq::word::{GroupOps, LetterKind};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

pub type Mat = [u64; 4];

pub struct Sl2p {
    pub p: u64,
}

impl Sl2p {
    pub fn elements(&self) -> Vec<Mat> {
        let p = self.p;
        let mut out = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        if (a * d + p * p - b * c) % p == 1 {
                            out.push([a, b, c, d]);
                        }
                    }
                }
            }
        }
        out
    }

    fn reduce(&self, q: &num_rational::BigRational) -> u64 {
        let p = num_bigint::BigInt::from(self.p);
        let num = q.numer().mod_floor(&p).to_u64().unwrap();
        let den = q.denom().mod_floor(&p).to_u64().unwrap();
        assert!(den != 0, "denominator divisible by {}", self.p);
        num * pow_mod(den, self.p - 2, self.p) % self.p
    }

    pub fn matrix(&self, value: &CoefficientValue) -> Mat {
        let CoefficientValue::Matrix(rows) = value else {
            panic!("not a matrix")
        };
        [
            self.reduce(&rows[0][0]),
            self.reduce(&rows[0][1]),
            self.reduce(&rows[1][0]),
            self.reduce(&rows[1][1]),
        ]
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

impl GroupOps for Sl2p {
    type Elem = Mat;

    fn identity(&self) -> Mat {
        [1, 0, 0, 1]
    }

    fn mul(&self, x: &Mat, y: &Mat) -> Mat {
        let p = self.p;
        [
            (x[0] * y[0] + x[1] * y[2]) % p,
            (x[0] * y[1] + x[1] * y[3]) % p,
            (x[2] * y[0] + x[3] * y[2]) % p,
            (x[2] * y[1] + x[3] * y[3]) % p,
        ]
    }

    fn inv(&self, x: &Mat) -> Mat {
        let p = self.p;
        [x[3], (p - x[1]) % p, (p - x[2]) % p, x[0]]
    }
}

/// Number of tuples in SL2(F_p)^m solving every equation of the document.
pub fn count_points(doc: &GeqDocument, p: u64) -> u64 {
    let g = Sl2p { p };
    let elems = g.elements();
    let sys = &doc.system;
    let m = sys.unknowns().len();
    assert!(m <= 2, "oracle enumerates at most pairs");
    let coeff = |s: &str| g.matrix(doc.value_of(s).expect("bound coefficient"));
    let solves = |tuple: &[Mat]| {
        sys.equations().iter().all(|eq| {
            let v = eq
                .lhs()
                .evaluate(&g, |s, kind| match kind {
                    LetterKind::Unknown => sys.unknowns().iter().position(|u| u == s).map(|i| tuple[i]),
                    LetterKind::Coefficient => Some(coeff(s)),
                })
                .unwrap();
            v == g.identity()
        })
    };
    match m {
        0 => solves(&[]) as u64,
        1 => elems.iter().filter(|x| solves(&[**x])).count() as u64,
        _ => elems
            .iter()
            .map(|x| elems.iter().filter(|y| solves(&[*x, **y])).count() as u64)
            .sum(),
    }
}

/// Dimension estimated from the growth of `N_p ≈ c·p^d` between two primes.
/// Returns the rounded exponent and the raw slope.
pub fn point_count_dimension(doc: &GeqDocument, primes: (u64, u64)) -> (usize, f64, (u64, u64)) {
    let (p, q) = primes;
    let (np, nq) = (count_points(doc, p), count_points(doc, q));
    assert!(np > 0 && nq > 0, "no points over F_{p} or F_{q}");
    let slope = (nq as f64 / np as f64).ln() / (q as f64 / p as f64).ln();
    (slope.round() as usize, slope, (np, nq))
}

/// Closure by breadth-first multiplication, independent of the library.
pub fn closure(g: &FiniteGroup, seeds: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut set: BTreeSet<usize> = seeds.clone();
    set.insert(g.identity());
    loop {
        let next: BTreeSet<usize> = set
            .iter()
            .flat_map(|&a| set.iter().map(move |&b| (a, b)))
            .map(|(a, b)| g.mul(a, b))
            .collect();
        if next.is_subset(&set) {
            return set;
        }
        set.extend(next);
    }
}

pub fn all_subgroups(g: &FiniteGroup) -> Vec<BTreeSet<usize>> {
    let mut found: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let mut frontier = vec![closure(g, &BTreeSet::new())];
    while let Some(h) = frontier.pop() {
        if !found.insert(h.clone()) {
            continue;
        }
        for x in g.elements().filter(|x| !h.contains(x)) {
            let mut seeds = h.clone();
            seeds.insert(x);
            let k = closure(g, &seeds);
            if !found.contains(&k) {
                frontier.push(k);
            }
        }
    }
    found.into_iter().collect()
}

/// Generating r-tuples via Möbius inversion on the subgroup lattice:
/// `Σ_H μ(H, G) |H|^r`.
pub fn hall_epimorphisms(g: &FiniteGroup, r: u32) -> i64 {
    let mut subs = all_subgroups(g);
    subs.sort_by_key(|h| std::cmp::Reverse(h.len()));
    let mut mu: Vec<i64> = Vec::with_capacity(subs.len());
    for (i, h) in subs.iter().enumerate() {
        let value = if i == 0 {
            1
        } else {
            -(0..i)
                .filter(|&j| subs[j].len() > h.len() && h.is_subset(&subs[j]))
                .map(|j| mu[j])
                .sum::<i64>()
        };
        mu.push(value);
    }
    subs.iter().zip(&mu).map(|(h, m)| m * (h.len() as i64).pow(r)).sum()
}

/// Fraction-free Gaussian elimination; returns the rank.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let (n, m) = (a.len(), a.first().map_or(0, Vec::len));
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..n {
            for j in c + 1..m {
                a[i][j] = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == n {
            break;
        }
    }
    r
}

/// Determinant by Bareiss elimination.
pub fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}
