//! The bundled corpus of `.geq` systems and a runner that checks every
//! pinned result against a fresh computation.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::eqlang::{exponent_matrix, parse_document, GeqDocument};
use crate::fingroup::{build_group, DEFAULT_SIZE_CAP};
use crate::geomdim::{build_group_model, theorem_verdicts, DimOptions, MatrixBinding, ModelKind};
use crate::poly::Dimension;
use crate::simclass::{choose_subgroup, partition_solutions, SubgroupChoice};
use crate::solvecount::{
    count_epimorphisms, divisibility_verdicts, enumerate_solutions, CoefficientBinding, Theorem, DEFAULT_EVAL_BUDGET,
};
use crate::zlinalg::rank;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! corpus {
    ($($name:literal),* $(,)?) => {
        &[$(CorpusEntry { name: $name, source: include_str!(concat!("../corpus/", $name)) }),*]
    };
}

pub const CORPUS: &[CorpusEntry] = corpus![
    "commute.geq",
    "free_one.geq",
    "involution.geq",
    "rank_one.geq",
    "s3_cube.geq",
    "s3_squares.geq",
    "torus_centralizer.geq",
    "two_squares.geq",
];

pub fn corpus_source(name: &str) -> Option<&'static str> {
    CORPUS.iter().find(|e| e.name == name).map(|e| e.source)
}

/// Parses a corpus file. Panics if the name is unknown or the file is
/// malformed; both are bugs in the bundled data.
pub fn corpus_document(name: &str) -> GeqDocument {
    let src = corpus_source(name).unwrap_or_else(|| panic!("no corpus file {name}"));
    parse_document(src).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
enum Check {
    Count {
        file: &'static str,
        group: &'static str,
        count: u64,
        theorem: Theorem,
        divisor: u64,
    },
    Matrix {
        file: &'static str,
        matrix: &'static str,
        rank: usize,
    },
    DivisibleByOrder {
        file: &'static str,
        group: &'static str,
    },
    Partition {
        file: &'static str,
        group: &'static str,
        classes: usize,
        size: usize,
    },
    Epi {
        group: &'static str,
        count: Option<u64>,
        divisor: u64,
    },
    Dim {
        file: &'static str,
        model: &'static str,
        dim: Dimension,
    },
}

fn checks() -> Vec<Check> {
    use Check::*;
    let mut out = vec![
        Count {
            file: "s3_cube.geq",
            group: "S3",
            count: 3,
            theorem: Theorem::Km,
            divisor: 3,
        },
        Count {
            file: "s3_squares.geq",
            group: "S3",
            count: 90,
            theorem: Theorem::Grv,
            divisor: 6,
        },
        Count {
            file: "commute.geq",
            group: "S3",
            count: 18,
            theorem: Theorem::Solomon,
            divisor: 6,
        },
        Matrix {
            file: "rank_one.geq",
            matrix: "((100,100),(2020,2020))",
            rank: 1,
        },
    ];
    for group in ["S3", "S4", "D4", "C6"] {
        out.push(DivisibleByOrder {
            file: "rank_one.geq",
            group,
        });
    }
    out.extend([
        Partition {
            file: "s3_cube.geq",
            group: "S3",
            classes: 1,
            size: 3,
        },
        Partition {
            file: "s3_squares.geq",
            group: "S3",
            classes: 15,
            size: 6,
        },
        Epi {
            group: "S3",
            count: Some(18),
            divisor: 3,
        },
        Epi {
            group: "S4",
            count: None,
            divisor: 12,
        },
        Epi {
            group: "product(C2,C2)",
            count: Some(6),
            divisor: 1,
        },
        Dim {
            file: "commute.geq",
            model: "SL2",
            dim: Dimension::Finite(4),
        },
        Dim {
            file: "involution.geq",
            model: "SL2",
            dim: Dimension::Finite(0),
        },
        Dim {
            file: "two_squares.geq",
            model: "SL2",
            dim: Dimension::Finite(4),
        },
        Dim {
            file: "free_one.geq",
            model: "SL2",
            dim: Dimension::Finite(3),
        },
        Dim {
            file: "torus_centralizer.geq",
            model: "SL2",
            dim: Dimension::Finite(1),
        },
    ]);
    out
}

fn run_check(check: &Check) -> CheckOutcome {
    let start = Instant::now();
    let (name, result) = match check {
        Check::Count { file, group, .. } => (format!("count {file} in {group}"), check_count(check)),
        Check::Matrix { file, .. } => (format!("matrix of {file}"), check_matrix(check)),
        Check::DivisibleByOrder { file, group } => (format!("divisibility of {file} in {group}"), check_count(check)),
        Check::Partition { file, group, .. } => (format!("partition {file} in {group}"), check_partition(check)),
        Check::Epi { group, .. } => (format!("epimorphisms F2 -> {group}"), check_epi(check)),
        Check::Dim { file, model, .. } => (format!("dimension of {file} over {model}"), check_dim(check)),
    };
    let (passed, detail) = match result {
        Ok((passed, detail)) => (passed, detail),
        Err(e) => (false, format!("error: {e}")),
    };
    CheckOutcome {
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

type CheckResult = Result<(bool, String), Box<dyn std::error::Error + Send + Sync>>;

fn check_count(check: &Check) -> CheckResult {
    let (file, group) = match check {
        Check::Count { file, group, .. } | Check::DivisibleByOrder { file, group } => (*file, *group),
        _ => unreachable!(),
    };
    let doc = corpus_document(file);
    let g = build_group(group, DEFAULT_SIZE_CAP)?;
    let binding = CoefficientBinding::from_document(&doc, &g)?;
    let n = enumerate_solutions(&doc.system, &g, &binding, DEFAULT_EVAL_BUDGET)?.count() as u64;
    let verdicts = divisibility_verdicts(&doc.system, &g, &binding, n)?;
    Ok(match check {
        Check::Count {
            count,
            theorem,
            divisor,
            ..
        } => {
            let v = verdicts
                .iter()
                .find(|v| v.theorem == *theorem)
                .expect("all theorems reported");
            let ok = n == *count && v.applicable && v.passed && v.divisor == *divisor;
            (
                ok,
                format!(
                    "count={n} {}_divisor={} {}_passed={}",
                    theorem.key(),
                    v.divisor,
                    theorem.key(),
                    v.passed
                ),
            )
        }
        _ => {
            let order = g.order() as u64;
            (n.is_multiple_of(order), format!("count={n} order={order}"))
        }
    })
}

fn check_matrix(check: &Check) -> CheckResult {
    let Check::Matrix { file, matrix, rank: r } = check else {
        unreachable!()
    };
    let doc = corpus_document(file);
    let m = exponent_matrix(&doc.system);
    let got = rank(&m);
    Ok((m.to_string() == *matrix && got == *r, format!("matrix={m} rank={got}")))
}

fn check_partition(check: &Check) -> CheckResult {
    let Check::Partition {
        file,
        group,
        classes,
        size,
    } = check
    else {
        unreachable!()
    };
    let doc = corpus_document(file);
    let g = build_group(group, DEFAULT_SIZE_CAP)?;
    let binding = CoefficientBinding::from_document(&doc, &g)?;
    let h = choose_subgroup(SubgroupChoice::Centralizer, &doc.system, &g, &binding)?;
    let run = partition_solutions(&doc.system, &g, &binding, h, DEFAULT_EVAL_BUDGET)?;
    let Some(p) = run.partition else {
        return Ok((false, "closure conditions fail".into()));
    };
    let sizes_ok = p.classes.iter().all(|c| c.size() == *size);
    let ok = p.classes.len() == *classes && sizes_ok && p.is_uniform() && p.total() == run.homs.len();
    Ok((
        ok,
        format!(
            "classes={} class_size={} uniform={}",
            p.classes.len(),
            size,
            p.is_uniform()
        ),
    ))
}

fn check_epi(check: &Check) -> CheckResult {
    let Check::Epi { group, count, divisor } = check else {
        unreachable!()
    };
    let g = build_group(group, DEFAULT_SIZE_CAP)?;
    let (n, v) = count_epimorphisms(2, &g, DEFAULT_EVAL_BUDGET)?;
    let ok = count.is_none_or(|c| c == n) && v.divisor == *divisor && v.passed;
    Ok((ok, format!("count={n} divisor={} passed={}", v.divisor, v.passed)))
}

fn check_dim(check: &Check) -> CheckResult {
    let Check::Dim { file, model, dim } = check else {
        unreachable!()
    };
    let doc = corpus_document(file);
    let kind: ModelKind = model.parse()?;
    let model = build_group_model(&kind)?;
    let bind = MatrixBinding::from_document(&doc);
    let v = theorem_verdicts(&doc.system, &model, &bind, &DimOptions::default())?;
    let agree = v.report.crosscheck.is_none_or(|d| d == v.report.dimension);
    let ok = v.report.dimension == *dim && agree && v.passed();
    Ok((
        ok,
        format!(
            "dim={} crosscheck_agrees={agree} passed={}",
            v.report.dimension,
            v.passed()
        ),
    ))
}

/// Runs every pinned check, in parallel, in a fixed order.
pub fn run_corpus() -> Vec<CheckOutcome> {
    checks().par_iter().map(run_check).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_parses() {
        for e in CORPUS {
            let doc = parse_document(e.source).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            let again = parse_document(&crate::eqlang::print_document(&doc)).unwrap();
            assert_eq!(again, doc, "{}", e.name);
        }
        assert_eq!(corpus_document("free_one.geq").system.unknowns(), ["x"]);
        assert!(corpus_source("missing.geq").is_none());
    }

    #[test]
    fn every_check_passes() {
        for o in run_corpus() {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }
}
