//! Command-line driver. Exit codes: 0 pass, 1 fail, 2 unknown, 3 input error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use stasheff::barpost::{build_tower, lift_obstruction, BarContext};
use stasheff::dga::{build_square_zero_extension, build_truncated_polynomial_example_over, formal_dga, homology, Dga};
use stasheff::field::Field;
use stasheff::graded::{same_space, MultiMap};
use stasheff::io::{self, Report, Structure, WindowDoc};
use stasheff::models::{hochschild_cocycle, truncated_polynomial_algebra};
use stasheff::obstruction::{ext, hochschild_cohomology, phi_n, try_extend, BaarComplex, Extension};
use stasheff::structures::{
    check_algebra, check_algebra_morphism, check_module, check_morphism, AlgebraMorphism, AnAlgebra, AnModule, Certified, RelationReport,
    Verdict,
};
use stasheff::transfer::kadeishvili_transfer;

#[derive(Parser)]
#[command(name = "stasheff", version, about = "Exact computations with A_n-algebras and A_n-modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Builder {
    TruncPoly,
    SquareZero,
}

#[derive(Args, Clone)]
struct Common {
    /// Prime of the coefficient field for built examples.
    #[arg(long, default_value_t = 5, conflicts_with = "rational")]
    p: u32,
    /// Use rational coefficients for built examples.
    #[arg(long)]
    rational: bool,
    /// Degree window LO:HI to certify.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<(i64, i64)>,
    /// Emit the report as JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct Source {
    /// Build the input instead of reading a file.
    #[arg(long, value_enum)]
    builder: Option<Builder>,
    /// Height of `k[z]/z^n` (trunc-poly) or arity of the cocycle (square-zero).
    #[arg(long)]
    n: Option<usize>,
    /// Height `m` of `k[t]/t^m` for the square-zero builder.
    #[arg(long, default_value_t = 2)]
    m: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Check the defining identities of a structure file.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 6)]
        order: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Transfer the structure of a DGA to its homology.
    Transfer {
        file: Option<PathBuf>,
        #[arg(long, alias = "upto", default_value_t = 6)]
        order: usize,
        #[command(flatten)]
        source: Source,
        /// Where to write the transferred algebra and quasi-isomorphism.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compute the obstruction to extending a module past stage `n`.
    Obstruct {
        file: PathBuf,
        #[arg(long)]
        stage: Option<usize>,
        /// DGA whose minimal model the module lives over, for the tower comparison.
        #[arg(long)]
        dga: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        common: Common,
    },
    /// Extend a module by one stage when the obstruction vanishes.
    Extend {
        file: PathBuf,
        #[arg(long)]
        stage: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Build the bar-construction Postnikov tower of a module.
    Tower {
        file: PathBuf,
        #[arg(long, default_value_t = 1)]
        stages: usize,
        #[arg(long)]
        dga: Option<PathBuf>,
        #[command(flatten)]
        source: Source,
        /// Directory receiving one file per stage and attaching map.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate Ext^{s,t}(X, X) on the bar complex.
    Ext {
        file: PathBuf,
        /// Largest homological degree `s`.
        #[arg(long, default_value_t = 4)]
        stages: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Hochschild cohomology of an associative algebra, or a square-zero extension.
    Hochschild {
        file: Option<PathBuf>,
        /// Arity of the cochains.
        #[arg(long, default_value_t = 3)]
        order: usize,
        /// Internal degree of the cochains.
        #[arg(long, default_value_t = 0)]
        degree: i64,
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{e}"))?;
    if lo > hi {
        return Err("empty window".into());
    }
    Ok((lo, hi))
}

/// Input problems map to exit code 3.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}
impl std::error::Error for InputError {}

fn input<T>(r: Result<T>) -> Result<T> {
    r.map_err(|e| anyhow!(InputError(e)))
}

fn read_structure(path: &PathBuf) -> Result<(Structure, Option<(i64, i64)>)> {
    input((|| {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        io::parse(&text).with_context(|| format!("parsing {}", path.display()))
    })())
}

fn field_of(c: &Common) -> Result<Field> {
    if c.rational {
        Ok(Field::Rational)
    } else {
        input(Field::prime(c.p).map_err(|e| anyhow!(e)))
    }
}

fn write_out(path: &Option<PathBuf>, s: &Structure, window: Option<(i64, i64)>) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, io::serialize(s, window)).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn certified(rep: &RelationReport) -> Option<WindowDoc> {
    match rep.certified {
        Certified::Window(lo, hi) => Some(WindowDoc { lo, hi }),
        _ => None,
    }
}

fn relation_report(command: &str, rep: &RelationReport, details: serde_json::Value) -> Report {
    Report { command: command.into(), verdict: rep.verdict, certified: certified(rep), first_failure: rep.first_failure.clone(), details }
}

fn emit(report: &Report, common: &Common, summary: &str) -> ExitCode {
    if common.json {
        print!("{}", report.to_text());
    } else {
        println!("command: {}", report.command);
        println!("verdict: {}", serde_json::to_value(report.verdict).unwrap().as_str().unwrap_or(""));
        if let Some(f) = &report.first_failure {
            println!("first_failure: order {} at ({})", f.order, f.tuple.join(", "));
        }
        if let serde_json::Value::Object(m) = &report.details {
            for (k, v) in m {
                println!("{k}: {v}");
            }
        }
    }
    eprintln!("{summary}");
    ExitCode::from(report.verdict.exit_code() as u8)
}

/// A DGA from a file or a builder.
fn dga_source(file: &Option<PathBuf>, source: &Source, common: &Common) -> Result<Dga> {
    match (file, source.builder) {
        (Some(p), None) => io::expect_dga(read_structure(p)?.0).map_err(|e| anyhow!(InputError(e.into()))),
        (None, Some(Builder::TruncPoly)) => {
            let n = source.n.ok_or_else(|| anyhow!(InputError(anyhow!("--n is required for trunc-poly"))))?;
            input(build_truncated_polynomial_example_over(field_of(common)?, n).map_err(|e| anyhow!(e)))
        }
        (None, Some(Builder::SquareZero)) => bail!(InputError(anyhow!("square-zero builds an A_n-algebra; use the hochschild command"))),
        (Some(_), Some(_)) => bail!(InputError(anyhow!("give either a file or --builder"))),
        (None, None) => bail!(InputError(anyhow!("missing input file"))),
    }
}

/// The bar context of a module, with the DGA given explicitly or, for formal
/// algebras, the algebra itself.
fn context_for(x: AnModule, dga: &Option<PathBuf>, source: &Source, common: &Common, order: usize) -> Result<BarContext> {
    if dga.is_none() && source.builder.is_none() {
        let h = x.algebra.clone();
        if (3..=h.order).any(|k| h.op(k).is_some()) {
            bail!(InputError(anyhow!("the algebra has higher operations; pass --dga or --builder")));
        }
        let unit = find_unit(&h).ok_or_else(|| anyhow!(InputError(anyhow!("the algebra has no unit basis vector"))))?;
        let a = input(formal_dga(&h, unit).map_err(|e| anyhow!(e)))?;
        let id = MultiMap::identity(&h.space);
        let f = AlgebraMorphism::new("id", h.clone(), Arc::new(a.as_algebra()), vec![id.clone().renamed("f1")], order)?;
        return Ok(BarContext::new(Arc::new(x), Arc::new(a), Arc::new(f), Arc::new(id))?);
    }
    let a = dga_source(dga, source, common)?;
    let hd = homology(&a.complex(), "h")?;
    let (h, mut f) = kadeishvili_transfer(&a, &hd, order)?;
    if !same_space(&h.space, &x.algebra.space) {
        bail!(InputError(anyhow!("the module's algebra is not the minimal model of the DGA")));
    }
    for k in 2..=x.order.min(order) {
        if h.op_or_zero(k) != x.algebra.op_or_zero(k) {
            bail!(InputError(anyhow!("operation m{k} of the module's algebra differs from the transferred one")));
        }
    }
    f.source = x.algebra.clone();
    Ok(BarContext::new(Arc::new(x), Arc::new(a), Arc::new(f), Arc::new(hd.proj))?)
}

fn find_unit(h: &AnAlgebra) -> Option<usize> {
    let m2 = h.op(2)?;
    let one = h.field().one();
    (0..h.space.dim()).find(|&u| {
        (0..h.space.dim()).all(|j| {
            let l = m2.eval(&[u, j]).map(|v| v.to_vec()).unwrap_or_default();
            let r = m2.eval(&[j, u]).map(|v| v.to_vec()).unwrap_or_default();
            l == vec![(j, one.clone())] && r == vec![(j, one.clone())]
        })
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { file, order, common } => {
            let (s, _) = read_structure(&file)?;
            let (rep, what) = match &s {
                Structure::AnAlgebra(r) => (check_algebra(r, order), "algebra"),
                Structure::AnModule(x) => (check_algebra(&x.algebra, order).and_then_module(x, order), "module"),
                Structure::AnMorphism(g) => (check_morphism(g, order), "morphism"),
                Structure::AlgebraMorphism(f) => {
                    (check_algebra(&f.source, order).merge(check_algebra_morphism(f, order)), "algebra morphism")
                }
                Structure::Dga(a) => {
                    let ok = a.validate();
                    let mut rep = RelationReport::empty();
                    if let Err(e) = &ok {
                        rep.verdict = Verdict::Fail;
                        eprintln!("{e}");
                    }
                    (rep, "dga")
                }
                Structure::Complex(c) => {
                    let mut rep = RelationReport::empty();
                    let sq = stasheff::signs::square(c)?;
                    if !sq.is_zero() {
                        rep.verdict = Verdict::Fail;
                    }
                    (rep, "complex")
                }
                Structure::ChainMap(_) => (RelationReport::empty(), "map"),
            };
            let report = relation_report(
                "check",
                &rep,
                json!({ "kind": s.kind(), "order": order, "tuples_checked": rep.tuples_checked, "tuples_unknown": rep.tuples_unknown }),
            );
            let summary = format!("{what} identities up to order {order}: {:?}", rep.verdict);
            Ok(emit(&report, &common, &summary))
        }
        Command::Transfer { file, order, source, out, common } => {
            let a = dga_source(&file, &source, &common)?;
            a.validate()?;
            let hd = homology(&a.complex(), "h")?;
            let (h, f) = kadeishvili_transfer(&a, &hd, order)?;
            let rep = check_algebra(&h, order).merge(check_algebra_morphism(&f, order));
            let dims: Vec<(i64, usize)> = h.space.classes().into_iter().map(|c| (c, h.space.dim_in(c))).collect();
            let nonzero: Vec<usize> = (2..=order).filter(|&k| h.op(k).is_some()).collect();
            write_out(&out, &Structure::AlgebraMorphism(f), common.window)?;
            let report = relation_report("transfer", &rep, json!({ "homology_dims": dims, "nonzero_operations": nonzero, "order": order }));
            Ok(emit(&report, &common, &format!("transferred to order {order}; nonzero m_k for k in {nonzero:?}")))
        }
        Command::Obstruct { file, stage, dga, source, common } => {
            let x = io::expect_module(read_structure(&file)?.0).map_err(|e| anyhow!(InputError(e.into())))?;
            let n = stage.unwrap_or(x.order);
            if n < 3 || n > x.order {
                bail!(InputError(anyhow!("stage must lie in 3..={}", x.order)));
            }
            let x = x.truncated(n);
            let valid = check_module(&x, n);
            if valid.verdict != Verdict::Pass {
                let report = relation_report("obstruct", &valid, json!({ "stage": n, "reason": "not a module at this stage" }));
                return Ok(emit(&report, &common, "input is not a valid module"));
            }
            let phi = phi_n(&x, n)?;
            let bc = BaarComplex::new(&x, &x)?;
            let cocycle = bc.differential(&phi).value.is_zero();
            let mut details = json!({ "stage": n, "phi_is_zero": phi.value.is_zero(), "phi_is_cocycle": cocycle });
            let verdict = match try_extend(&x)? {
                Extension::Extended(d) => {
                    details["free_parameters"] = json!(d.free_parameters.len());
                    Verdict::Pass
                }
                Extension::Refused(c) => {
                    details["ext_dim"] = json!(c.ext_dim);
                    details["class_coordinates"] = json!(c.coordinates.iter().map(|(i, s)| (i, s.to_text())).collect::<Vec<_>>());
                    details["generator_of_line"] = json!(c.is_generator_of_line());
                    Verdict::Fail
                }
                Extension::Unknown(why) => {
                    details["reason"] = json!(why);
                    Verdict::Unknown
                }
            };
            if dga.is_some() || source.builder.is_some() || (3..=x.algebra.order).all(|k| x.algebra.op(k).is_none()) {
                let ctx = context_for(x.clone(), &dga, &source, &common, n + 1)?;
                let lift = lift_obstruction(&ctx, n - 1)?;
                details["two_path_agreement"] = json!(lift.agree());
                details["chain_level_match"] = json!(lift.chain_level_match);
                details["lift_class_trivial"] = json!(lift.class_trivial);
                if !lift.agree() || lift.class_trivial != (verdict == Verdict::Pass) {
                    bail!("tower comparison disagrees with the extension solver");
                }
            }
            let report = Report { command: "obstruct".into(), verdict, certified: None, first_failure: None, details };
            Ok(emit(&report, &common, &format!("stage {n}: {:?}", verdict)))
        }
        Command::Extend { file, stage, out, common } => {
            let x = io::expect_module(read_structure(&file)?.0).map_err(|e| anyhow!(InputError(e.into())))?;
            let n = stage.unwrap_or(x.order);
            if n < 3 || n > x.order {
                bail!(InputError(anyhow!("stage must lie in 3..={}", x.order)));
            }
            let (verdict, details) = match try_extend(&x.truncated(n))? {
                Extension::Extended(d) => {
                    let check = check_module(&d.module, n + 1).verdict;
                    write_out(&out, &Structure::AnModule(d.module), common.window)?;
                    (check, json!({ "stage": n, "new_order": n + 1, "free_parameters": d.free_parameters.len() }))
                }
                Extension::Refused(c) => (Verdict::Fail, json!({ "stage": n, "ext_dim": c.ext_dim })),
                Extension::Unknown(why) => (Verdict::Unknown, json!({ "stage": n, "reason": why })),
            };
            let report = Report { command: "extend".into(), verdict, certified: None, first_failure: None, details };
            Ok(emit(&report, &common, &format!("extension past stage {n}: {verdict:?}")))
        }
        Command::Tower { file, stages, dga, source, out, common } => {
            let x = io::expect_module(read_structure(&file)?.0).map_err(|e| anyhow!(InputError(e.into())))?;
            let need = stages + 1;
            let valid = check_module(&x, need.min(x.order));
            if x.order < need || valid.verdict != Verdict::Pass {
                let report =
                    relation_report("tower", &valid, json!({ "stages": stages, "reason": format!("needs a valid A_{need} module") }));
                let mut report = report;
                report.verdict = if valid.verdict == Verdict::Unknown { Verdict::Unknown } else { Verdict::Fail };
                return Ok(emit(&report, &common, "invalid module"));
            }
            let ctx = context_for(x.truncated(need), &dga, &source, &common, need)?;
            let tower = build_tower(&ctx, stages)?;
            let ok = tower.resolution_exact && tower.stages.iter().all(|s| s.checks.all());
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir)?;
                for k in 1..=stages {
                    let y = ctx.tower_complex(k)?;
                    std::fs::write(dir.join(format!("Y{k}.json")), io::serialize(&Structure::Complex(y), None))?;
                    let i = ctx.attaching_multimap(k)?;
                    std::fs::write(dir.join(format!("i{k}.json")), io::serialize(&Structure::ChainMap(i), None))?;
                }
            }
            let checks: Vec<serde_json::Value> = tower
                .stages
                .iter()
                .map(|s| {
                    json!({ "stage": s.k, "d_squared_zero": s.checks.d_squared_zero, "chain_map": s.checks.chain_map,
                            "inductive": s.checks.inductive, "exact_sequence": s.checks.exact_sequence, "multiplication": s.checks.multiplication })
                })
                .collect();
            let verdict = if ok { Verdict::Pass } else { Verdict::Fail };
            let report = Report {
                command: "tower".into(),
                verdict,
                certified: None,
                first_failure: None,
                details: json!({ "stages": checks, "resolution_exact": tower.resolution_exact }),
            };
            Ok(emit(&report, &common, &format!("tower with {stages} stages: {verdict:?}")))
        }
        Command::Ext { file, stages, common } => {
            let x = io::expect_module(read_structure(&file)?.0).map_err(|e| anyhow!(InputError(e.into())))?;
            let (lo, hi) = common.window.unwrap_or((0, 1));
            let s_values: Vec<usize> = (0..=stages).collect();
            let t_values: Vec<i64> = (lo..=hi).collect();
            let cells = ext(&x, &x, &s_values, &t_values)?;
            let unknown = cells.iter().any(|c| c.dim.is_none());
            let table: Vec<serde_json::Value> = cells.iter().map(|c| json!({ "s": c.s, "t": c.t, "dim": c.dim })).collect();
            let verdict = if unknown { Verdict::Unknown } else { Verdict::Pass };
            let report = Report {
                command: "ext".into(),
                verdict,
                certified: Some(WindowDoc { lo, hi }),
                first_failure: None,
                details: json!({ "cells": table }),
            };
            Ok(emit(&report, &common, &format!("{} Ext cells", cells.len())))
        }
        Command::Hochschild { file, order, degree, source, out, common } => match (file, source.builder) {
            (Some(p), None) => {
                let r = io::expect_algebra(read_structure(&p)?.0).map_err(|e| anyhow!(InputError(e.into())))?;
                if (3..=r.order).any(|k| r.op(k).is_some()) {
                    bail!(InputError(anyhow!("Hochschild cohomology needs an associative algebra")));
                }
                let (dim, _) = hochschild_cohomology(&r, order, degree);
                let report = Report {
                    command: "hochschild".into(),
                    verdict: Verdict::Pass,
                    certified: None,
                    first_failure: None,
                    details: json!({ "arity": order, "degree": degree, "dim": dim }),
                };
                Ok(emit(&report, &common, &format!("dim HH^({order},{degree}) = {dim}")))
            }
            (None, Some(Builder::SquareZero)) => {
                let n = source.n.unwrap_or(4);
                let r = input(truncated_polynomial_algebra(field_of(&common)?, source.m).map_err(|e| anyhow!(e)))?;
                let (c, nontrivial) = hochschild_cocycle(&r, n);
                let s = build_square_zero_extension(&r, n, &c)?;
                let rep = check_algebra(&s, 6.max(order));
                let nonzero: Vec<usize> = (2..=s.order).filter(|&k| s.op(k).is_some()).collect();
                write_out(&out, &Structure::AnAlgebra(s), common.window)?;
                let report =
                    relation_report("hochschild", &rep, json!({ "arity": n, "class_nonzero": nontrivial, "nonzero_operations": nonzero }));
                Ok(emit(&report, &common, &format!("square-zero extension by a degree 0 cocycle of arity {n}")))
            }
            _ => bail!(InputError(anyhow!("give an algebra file or --builder square-zero"))),
        },
    }
}

trait Merge {
    fn merge(self, o: RelationReport) -> RelationReport;
    fn and_then_module(self, x: &AnModule, order: usize) -> RelationReport;
}

impl Merge for RelationReport {
    fn merge(mut self, o: RelationReport) -> RelationReport {
        self.verdict = self.verdict.and(o.verdict);
        self.tuples_checked += o.tuples_checked;
        self.tuples_unknown += o.tuples_unknown;
        self.first_failure = self.first_failure.or(o.first_failure);
        self.failures.extend(o.failures);
        self
    }

    fn and_then_module(self, x: &AnModule, order: usize) -> RelationReport {
        self.merge(check_module(x, order))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<InputError>().is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
