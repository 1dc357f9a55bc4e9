//! `groupeq`: count, classify and measure solutions of equations over groups.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use groupeq::eqlang::{exponent_matrix, parse_document, GeqDocument};
use groupeq::fingroup::{build_group_seeded, FiniteGroup, DEFAULT_SIZE_CAP};
use groupeq::geomdim::{
    build_group_model, theorem_verdicts, Bound, DimOptions, Encoding, MatrixBinding, ModelKind, COMPONENT_NOTE,
};
use groupeq::poly::DEFAULT_PAIR_BUDGET;
use groupeq::simclass::{choose_subgroup, partition_solutions, SubgroupChoice};
use groupeq::solvecount::{
    count_epimorphisms, divisibility_verdicts, enumerate_solutions, CoefficientBinding, DEFAULT_EVAL_BUDGET,
};
use groupeq::verify::run_corpus;
use groupeq::zlinalg::{make_indexing, smith_normal_form};

#[derive(Parser, Debug)]
#[command(name = "groupeq", version, about = "Equations over finite and algebraic groups")]
struct Cli {
    /// Print only key=value lines.
    #[arg(long, global = true)]
    machine: bool,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exponent-sum matrix, rank, Smith form and indexing.
    Analyze { file: PathBuf },
    /// Count solutions in a finite group and check divisibility.
    Count {
        file: PathBuf,
        #[command(flatten)]
        finite: FiniteArgs,
    },
    /// Split the solutions into similarity classes.
    Partition {
        file: PathBuf,
        #[command(flatten)]
        finite: FiniteArgs,
        /// Acting subgroup: centralizer, full or commutator.
        #[arg(long, default_value = "centralizer")]
        subgroup: SubgroupChoice,
    },
    /// Count generating tuples of a finite group.
    Epi {
        #[command(flatten)]
        finite: FiniteArgs,
        /// Number of free generators.
        #[arg(long, default_value_t = 2)]
        generators: usize,
    },
    /// Dimension of the solution variety over a matrix group.
    Dim {
        file: PathBuf,
        /// SL2, GL2, torus(k) or product(...).
        #[arg(long)]
        model: ModelKind,
        /// direct, slp or auto.
        #[arg(long, default_value = "auto")]
        encoding: Encoding,
        /// Maximum number of S-pair reductions.
        #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
        budget: u64,
        /// Skip the F_32003 cross-check.
        #[arg(long)]
        no_crosscheck: bool,
    },
    /// Run the bundled corpus.
    Verify,
}

#[derive(Args, Debug)]
struct FiniteArgs {
    /// S<n>, A<n>, C<n>, D<n>, product(G,H), perm{...} or table{file}.
    #[arg(long)]
    group: String,
    /// Maximum number of word evaluations.
    #[arg(long, default_value_t = DEFAULT_EVAL_BUDGET)]
    budget: u64,
    /// Largest group to build.
    #[arg(long, default_value_t = DEFAULT_SIZE_CAP)]
    cap: usize,
}

#[derive(Default)]
struct Report {
    prose: Vec<String>,
    keys: Vec<(String, String)>,
    warnings: Vec<String>,
    failed: bool,
}

impl Report {
    fn say(&mut self, line: impl Into<String>) {
        self.prose.push(line.into());
    }

    fn key(&mut self, k: impl Into<String>, v: impl Display) {
        self.keys.push((k.into(), v.to_string()));
    }

    fn print(&self, machine: bool) {
        if !machine {
            self.prose.iter().for_each(|l| println!("{l}"));
            if !self.prose.is_empty() {
                println!();
            }
        }
        for (k, v) in &self.keys {
            println!("{k}={v}");
        }
        for w in &self.warnings {
            eprintln!("warning: {w}");
        }
    }
}

type AnyError = Box<dyn std::error::Error>;

fn read_document(path: &Path) -> Result<GeqDocument, AnyError> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_document(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

fn group(args: &FiniteArgs, seed: u64) -> Result<FiniteGroup, AnyError> {
    Ok(build_group_seeded(&args.group, args.cap, seed)?)
}

fn analyze(file: &Path) -> Result<Report, AnyError> {
    let doc = read_document(file)?;
    let sys = &doc.system;
    let m = exponent_matrix(sys);
    let snf = smith_normal_form(&m);
    let r = snf.rank();
    let (unknowns, equations) = (sys.unknowns().len(), sys.equations().len());
    let free = sys.is_coefficient_free();
    let indexing = make_indexing(sys)
        .map(|i| i.to_string())
        .unwrap_or_else(|_| "none".into());
    let diag: Vec<String> = snf.diagonal().iter().map(ToString::to_string).collect();

    let mut rep = Report::default();
    rep.say(format!(
        "{equations} equation(s) in {unknowns} unknown(s): {}",
        sys.unknowns().join(", ")
    ));
    rep.say(format!("exponent-sum matrix {m} has rank {r}"));
    if r < unknowns {
        rep.say(format!("degree map onto Z: {indexing}"));
    } else {
        rep.say("full column rank: no degree map onto Z");
    }
    rep.key("unknowns", unknowns);
    rep.key("equations", equations);
    rep.key("coefficient_free", free);
    rep.key("matrix", &m);
    rep.key("rank", r);
    rep.key("snf", format!("({})", diag.join(",")));
    rep.key("indexing", indexing);
    rep.key("thm_solomon_applicable", free && equations < unknowns);
    rep.key("thm_grv_applicable", free && r < unknowns);
    rep.key("thm_km_applicable", r < unknowns);
    Ok(rep)
}

fn count(file: &Path, args: &FiniteArgs, seed: u64) -> Result<Report, AnyError> {
    let doc = read_document(file)?;
    let g = group(args, seed)?;
    let binding = CoefficientBinding::from_document(&doc, &g)?;
    let n = enumerate_solutions(&doc.system, &g, &binding, args.budget)?.count() as u64;
    let verdicts = divisibility_verdicts(&doc.system, &g, &binding, n)?;

    let mut rep = Report::default();
    rep.say(format!("{n} solution(s) in {} (order {})", g.name(), g.order()));
    rep.key("group", g.name());
    rep.key("order", g.order());
    rep.key("count", n);
    for v in &verdicts {
        let status = match (v.applicable, v.passed) {
            (false, _) => "does not apply".to_string(),
            (true, true) => format!("{} divides {}", v.divisor, v.count),
            (true, false) => format!("FAILS: {} does not divide {}", v.divisor, v.count),
        };
        rep.say(format!("{}: {} ({})", v.theorem, status, v.reason));
        let k = v.theorem.key();
        rep.key(format!("{k}_applicable"), v.applicable);
        rep.key(format!("{k}_divisor"), v.divisor);
        rep.key(format!("{k}_passed"), v.passed);
    }
    let passed = verdicts.iter().all(|v| v.holds());
    rep.key("passed", passed);
    rep.failed = !passed;
    Ok(rep)
}

fn partition(file: &Path, args: &FiniteArgs, choice: SubgroupChoice, seed: u64) -> Result<Report, AnyError> {
    let doc = read_document(file)?;
    let g = group(args, seed)?;
    let binding = CoefficientBinding::from_document(&doc, &g)?;
    let h = choose_subgroup(choice, &doc.system, &g, &binding)?;
    let run = partition_solutions(&doc.system, &g, &binding, h, args.budget)?;

    let mut rep = Report::default();
    rep.say(format!(
        "{} solution(s) in {}; acting subgroup H = {choice} of order {}",
        run.homs.len(),
        g.name(),
        run.subgroup_order
    ));
    for w in [run.report.condition_one, run.report.condition_two]
        .into_iter()
        .flatten()
    {
        rep.say(w.to_string());
    }
    rep.key("group", g.name());
    rep.key("subgroup", choice);
    rep.key("subgroup_order", run.subgroup_order);
    rep.key("count", run.homs.len());
    rep.key("condition_one", run.report.condition_one_holds());
    rep.key("condition_two", run.report.condition_two_holds());
    match &run.partition {
        Some(p) => {
            for (i, c) in p.classes.iter().enumerate() {
                rep.say(format!(
                    "class {}: {} homomorphism(s), {} tail(s), core order {}",
                    i + 1,
                    c.size(),
                    c.distinct_tails,
                    c.core_order
                ));
            }
            let sizes_equal = p.classes.iter().all(|c| c.size() == p.subgroup_order);
            let orbit = p
                .classes
                .iter()
                .all(|c| c.distinct_tails * c.core_order == p.subgroup_order);
            rep.key("classes", p.classes.len());
            rep.key(
                "class_size",
                if sizes_equal {
                    p.subgroup_order.to_string()
                } else {
                    "mixed".into()
                },
            );
            rep.key("orbit_stabilizer", orbit);
            rep.key("total", p.total());
            let passed = sizes_equal && orbit && p.total() == run.homs.len();
            rep.key("passed", passed);
            rep.failed = !passed;
        }
        None => {
            rep.key("classes", "na");
            rep.key("class_size", "na");
            rep.key("orbit_stabilizer", "na");
            rep.key("total", "na");
            rep.key("passed", false);
            rep.failed = true;
        }
    }
    Ok(rep)
}

fn epi(args: &FiniteArgs, generators: usize, seed: u64) -> Result<Report, AnyError> {
    let g = group(args, seed)?;
    let (n, v) = count_epimorphisms(generators, &g, args.budget)?;
    let mut rep = Report::default();
    rep.say(format!(
        "{n} generating {generators}-tuple(s) of {} (order {})",
        g.name(),
        g.order()
    ));
    rep.say(format!(
        "commutator subgroup order {} {} the count",
        v.divisor,
        if v.passed { "divides" } else { "does NOT divide" }
    ));
    rep.key("group", g.name());
    rep.key("generators", generators);
    rep.key("count", n);
    rep.key("km17_divisor", v.divisor);
    rep.key("km17_passed", v.passed);
    rep.key("passed", v.passed);
    rep.failed = !v.passed;
    Ok(rep)
}

fn dim(file: &Path, kind: &ModelKind, opts: &DimOptions) -> Result<Report, AnyError> {
    let doc = read_document(file)?;
    let model = build_group_model(kind)?;
    let bind = MatrixBinding::from_document(&doc);
    let v = theorem_verdicts(&doc.system, &model, &bind, opts)?;
    let r = &v.report;

    let mut rep = Report::default();
    rep.say(format!(
        "solution variety over {kind} (dim G = {}) has dimension {} ({} encoding, {} variables)",
        v.group_dim, r.dimension, r.encoding, r.variables
    ));
    let describe = |name: &str, b: Option<Bound>| match b {
        None => format!("{name}: does not apply"),
        Some(b) => format!(
            "{name}: lower bound {} {}",
            b.value,
            if b.passed { "holds" } else { "FAILS" }
        ),
    };
    rep.say(describe("Theorem 0", Some(v.thm0)));
    rep.say(describe("Theorem 1", v.thm1));
    rep.say(describe("Corollary", v.corollary));
    rep.say(format!("note: {COMPONENT_NOTE}"));

    let na = |b: Option<Bound>, f: fn(Bound) -> String| b.map(f).unwrap_or_else(|| "na".into());
    rep.key("model", kind);
    rep.key("group_dim", v.group_dim);
    rep.key("encoding", r.encoding);
    rep.key("variables", r.variables);
    rep.key("aux_variables", r.aux_vars);
    rep.key("dim", r.dimension);
    rep.key(
        "dim_f32003",
        r.crosscheck.map(|d| d.to_string()).unwrap_or_else(|| "skipped".into()),
    );
    rep.key(
        "crosscheck_agrees",
        r.crosscheck
            .map(|d| (d == r.dimension).to_string())
            .unwrap_or_else(|| "na".into()),
    );
    rep.key("unknowns", v.unknowns);
    rep.key("equations", v.equations);
    rep.key("rank", v.rank);
    rep.key("thm0_bound", v.thm0.value);
    rep.key("thm0_passed", v.thm0.passed);
    rep.key("thm1_applicable", v.thm1.is_some());
    rep.key("thm1_bound", na(v.thm1, |b| b.value.to_string()));
    rep.key("thm1_passed", na(v.thm1, |b| b.passed.to_string()));
    rep.key("corollary_applicable", v.corollary.is_some());
    rep.key("corollary_bound", na(v.corollary, |b| b.value.to_string()));
    rep.key("corollary_passed", na(v.corollary, |b| b.passed.to_string()));
    rep.key("passed", v.passed());
    rep.warnings = r.warnings.clone();
    rep.failed = !v.passed();
    Ok(rep)
}

fn verify() -> Report {
    let outcomes = run_corpus();
    let mut rep = Report::default();
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    for o in &outcomes {
        rep.say(format!(
            "{} {} ({}; {:.2?})",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.detail,
            o.elapsed
        ));
    }
    rep.key("checks", outcomes.len());
    rep.key("failed", failed);
    for o in &outcomes {
        let slug: String = o
            .name
            .chars()
            .map(|c| {
                if c.is_ascii_alphanumeric() {
                    c.to_ascii_lowercase()
                } else {
                    '_'
                }
            })
            .collect();
        rep.key(format!("check.{slug}"), if o.passed { "pass" } else { "fail" });
    }
    rep.key("passed", failed == 0);
    rep.failed = failed > 0;
    rep
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze { file } => analyze(file),
        Command::Count { file, finite } => count(file, finite, cli.seed),
        Command::Partition { file, finite, subgroup } => partition(file, finite, *subgroup, cli.seed),
        Command::Epi { finite, generators } => epi(finite, *generators, cli.seed),
        Command::Dim {
            file,
            model,
            encoding,
            budget,
            no_crosscheck,
        } => dim(
            file,
            model,
            &DimOptions {
                encoding: *encoding,
                budget: *budget,
                crosscheck: !no_crosscheck,
            },
        ),
        Command::Verify => Ok(verify()),
    };
    match result {
        Ok(rep) => {
            rep.print(cli.machine);
            if rep.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
