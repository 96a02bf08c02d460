//! `robustsat`: decide, find and verify fault-tolerant models from the
//! command line.
//!
//! Exit codes: 0 decided yes (or nothing to decide), 1 decided no, 2 error,
//! 3 oracle cap exceeded.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use robustsat::affine::{delta11_affine, delta_rs_affine, delta_star_affine, solve_affine};
use robustsat::formula::{example3_cnf, exactly_k_cnf, gen_h, gen_pair_chain};
use robustsat::reductions::{reduce, verify_reduction, HornOptions, Reduction, ReductionError, ReductionKind};
use robustsat::report::Report;
use robustsat::twosat::{
    algorithm1, algorithm2, delta_star_2sat, enforce_strong_3_consistency, solve_2sat, Consistency,
};
use robustsat::{
    classify, emit, parse, validate, Assignment, ClassFlag, Degree, Format, Formula, Oracle, OracleError,
    RobustnessSpec,
};

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "robustsat",
    version,
    about = "Fault-tolerant (delta) models of Boolean formulas",
    long_about = "Fault-tolerant (delta) models of Boolean formulas.\n\n\
        A model is a delta(r,s)-model when every flip of at most r variables can be \
        repaired by flipping at most s other variables. Degrees: --degree k asks that \
        repairs land on degree k-1 models, --star that they stay inside a stable set.\n\n\
        Formulas are read as DIMACS CNF; with --format auto (the default) `x` lines \
        are parity clauses. Use `-` to read from stdin.\n\n\
        Exit codes: 0 yes, 1 no, 2 error, 3 oracle cap exceeded."
)]
struct Cli {
    /// Print a versioned JSON report instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Largest variable count the exhaustive oracle will enumerate (at most 28)
    #[arg(long, global = true, default_value_t = 24, value_parser = clap::value_parser!(u32).range(0..=28))]
    cap: u32,
    /// Input format
    #[arg(long, global = true, value_enum, default_value_t = InputFormat::Auto)]
    format: InputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum InputFormat {
    /// DIMACS, with or without parity lines
    Auto,
    /// Plain DIMACS CNF
    Cnf,
    /// DIMACS with `x` parity lines
    Xcnf,
}

#[derive(Args, Debug, Serialize)]
struct Robustness {
    /// Largest break size (at least 1)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    r: u32,
    /// Largest repair size
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Ask for a delta* model (member of a stable set)
    #[arg(long, conflicts_with = "degree")]
    star: bool,
    /// Ask for degree k (0 means any model; default 1)
    #[arg(long)]
    degree: Option<u32>,
}

impl Robustness {
    fn spec(&self) -> Result<RobustnessSpec> {
        let degree = if self.star {
            Degree::Star
        } else {
            Degree::Finite(self.degree.unwrap_or(1))
        };
        Ok(RobustnessSpec::new(self.r as usize, self.s as usize, degree)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SolveClass {
    /// Pick from the formula's classes: 2sat, then affine, then the oracle (with --oracle)
    Auto,
    #[value(name = "2sat")]
    #[serde(rename = "2sat")]
    TwoSat,
    Affine,
    /// Exhaustive enumeration
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
enum Algorithm {
    /// Graph conditions with forced literals
    #[value(name = "1")]
    #[serde(rename = "1")]
    One,
    /// Branching on strong 3-consistency tables
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Kind {
    /// Append a fresh positive variable to every clause
    Escape,
    /// Append the negation of a fresh variable to every clause
    #[value(name = "0valid")]
    #[serde(rename = "0valid")]
    ZeroValid,
    /// Append a fresh variable to every clause
    #[value(name = "1valid")]
    #[serde(rename = "1valid")]
    OneValid,
    /// (s+1)-SAT to 2-SAT
    Ksat2sat,
    /// 3-SAT to Horn
    Horn,
    /// 3-SAT to dual-Horn
    Dualhorn,
}

#[derive(Args, Debug, Serialize)]
struct ReductionArgs {
    /// Reduction to apply
    #[arg(long, value_enum)]
    kind: Kind,
    /// Repair budget of the construction (ksat2sat: clause width - 1 by default; horn: 1)
    #[arg(long)]
    s: Option<u32>,
    /// Horn kinds: also emit the x/x' exclusion clauses
    #[arg(long)]
    exclusion_clauses: bool,
    /// Horn kinds: fix pure literals first
    #[arg(long)]
    normalize_pure_literals: bool,
}

impl ReductionArgs {
    fn kind(&self, f: &Formula) -> ReductionKind {
        let options = HornOptions {
            normalize_pure_literals: self.normalize_pure_literals,
            exclusion_clauses: self.exclusion_clauses,
        };
        let s = self.s.map(|s| s as usize);
        match self.kind {
            Kind::Escape => ReductionKind::Escape,
            Kind::ZeroValid => ReductionKind::ZeroValid,
            Kind::OneValid => ReductionKind::OneValid,
            Kind::Ksat2sat => ReductionKind::KsatTo2sat {
                s: s.unwrap_or(f.max_clause_len().saturating_sub(1)),
            },
            Kind::Horn => ReductionKind::Horn { s: s.unwrap_or(1), options },
            Kind::Dualhorn => ReductionKind::DualHorn { s: s.unwrap_or(1), options },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Family {
    /// Exactly k of n variables true
    #[value(name = "H", alias = "h")]
    #[serde(rename = "H")]
    H,
    /// (v1 = v2) and (v3 = v4) and ...
    Pairchain,
    /// Pair chain with at most four variables true
    Example3,
    /// Random validate-clean 2-SAT
    #[value(name = "random-2sat")]
    #[serde(rename = "random-2sat")]
    Random2sat,
    /// Random parity system
    RandomAffine,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Report the formula's classes and assumption violations
    Classify {
        /// DIMACS file, or - for stdin
        input: String,
    },
    /// Decide whether a robust model exists and produce one
    Solve {
        input: String,
        /// Procedure family
        #[arg(long, value_enum, default_value_t = SolveClass::Auto)]
        class: SolveClass,
        #[command(flatten)]
        robustness: Robustness,
        /// Allow falling back to exhaustive enumeration
        #[arg(long)]
        oracle: bool,
        /// 2-SAT procedure for plain delta-models
        #[arg(long, value_enum, default_value_t = Algorithm::One)]
        algorithm: Algorithm,
        /// Attach the strong 3-consistent formula (algorithm 2)
        #[arg(long)]
        emit_f_hat: bool,
    },
    /// Check one assignment and print its repair certificate
    Check {
        input: String,
        /// Assignment as a 0/1 string, v1 first
        assignment: String,
        #[command(flatten)]
        robustness: Robustness,
    },
    /// Largest degree of an assignment (or *)
    Degree {
        input: String,
        assignment: String,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        r: u32,
        #[arg(long, default_value_t = 1)]
        s: u32,
        /// Report at most this degree
        #[arg(long, default_value_t = 16)]
        k_max: u32,
    },
    /// Build a gadget instance; prints DIMACS and writes the variable map
    Reduce {
        input: String,
        #[command(flatten)]
        reduction: ReductionArgs,
        /// Write DIMACS here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the role -> variable map as JSON (default with --output: <output>.varmap.json)
        #[arg(long)]
        varmap: Option<PathBuf>,
    },
    /// Generate a formula family
    Gen {
        #[arg(long, value_enum)]
        family: Family,
        /// Number of variables
        #[arg(long, default_value_t = 4)]
        n: u32,
        /// H: number of true variables
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// Random families: number of clauses (default n)
        #[arg(long)]
        m: Option<u32>,
        /// Random families: seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the oracle on both sides of a reduction
    VerifyReduction {
        input: String,
        #[command(flatten)]
        reduction: ReductionArgs,
    },
    /// List all models in lexicographic order
    Enumerate {
        input: String,
        /// Print at most this many
        #[arg(long)]
        limit: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Solve { .. } => "solve",
            Command::Check { .. } => "check",
            Command::Degree { .. } => "degree",
            Command::Reduce { .. } => "reduce",
            Command::Gen { .. } => "gen",
            Command::VerifyReduction { .. } => "verify-reduction",
            Command::Enumerate { .. } => "enumerate",
        }
    }
}

struct Outcome {
    verdict: Option<bool>,
    text: String,
    result: Value,
}

fn read_formula(input: &str, format: InputFormat) -> Result<Formula> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        s
    } else {
        fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    let format = match format {
        InputFormat::Cnf => Format::DimacsCnf,
        InputFormat::Auto | InputFormat::Xcnf => Format::DimacsXcnf,
    };
    parse(&text, format).with_context(|| format!("parsing {input}"))
}

fn label(spec: RobustnessSpec) -> String {
    let base = if spec.r == 1 && spec.s == 1 {
        "δ".to_string()
    } else {
        format!("δ({},{})", spec.r, spec.s)
    };
    match spec.degree {
        Degree::Finite(0) => "model".into(),
        Degree::Finite(1) => format!("{base}-model"),
        Degree::Finite(k) => format!("{base} degree-{k} model"),
        Degree::Star => {
            if spec.r == 1 && spec.s == 1 {
                "δ*-model".into()
            } else {
                format!("δ*({},{})-model", spec.r, spec.s)
            }
        }
    }
}

fn verdict_line(found: bool, spec: RobustnessSpec, model: Option<&Assignment>) -> String {
    match (found, model) {
        (true, Some(x)) => format!("{}: {x}\n", label(spec)),
        (true, None) => format!("{} exists\n", label(spec)),
        (false, _) => format!("no {}\n", label(spec)),
    }
}

fn indent(dimacs: &str) -> String {
    dimacs.lines().map(|l| format!("  {l}\n")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Procedure {
    TwoSat,
    Affine,
    Oracle,
}

fn supports(p: Procedure, spec: RobustnessSpec) -> bool {
    match p {
        Procedure::TwoSat => {
            spec.degree == Degree::Finite(0) || (spec.r == 1 && spec.s == 1 && matches!(spec.degree, Degree::Finite(1) | Degree::Star))
        }
        // parity systems are robust uniformly, so every degree reduces to δ(r,s)
        Procedure::Affine | Procedure::Oracle => true,
    }
}

fn solve(
    f: &Formula,
    class: SolveClass,
    rb: &Robustness,
    allow_oracle: bool,
    algorithm: Algorithm,
    emit_f_hat: bool,
    oracle: &Oracle,
) -> Result<Outcome> {
    let spec = rb.spec()?;
    let classes = classify(f);
    let mut notes = Vec::new();
    let procedure = match class {
        SolveClass::TwoSat | SolveClass::Affine => {
            let (p, flag, name) = if class == SolveClass::TwoSat {
                (Procedure::TwoSat, ClassFlag::TwoSat, "2sat")
            } else {
                (Procedure::Affine, ClassFlag::Affine, "affine")
            };
            if !classes.contains(flag) {
                bail!(
                    "--class {name} does not apply: formula classes are {classes} (longest clause {})",
                    f.max_clause_len()
                );
            }
            if supports(p, spec) {
                p
            } else if allow_oracle {
                notes.push(format!("{name} procedures do not cover {}; using the oracle", label(spec)));
                Procedure::Oracle
            } else {
                bail!("no {name} procedure decides {}; rerun with --oracle", label(spec));
            }
        }
        SolveClass::Oracle => Procedure::Oracle,
        SolveClass::Auto => {
            let candidates = [(ClassFlag::TwoSat, Procedure::TwoSat), (ClassFlag::Affine, Procedure::Affine)];
            let member: Vec<_> = candidates.iter().filter(|(c, _)| classes.contains(*c)).collect();
            match member.iter().find(|(_, p)| supports(*p, spec)) {
                Some(&&(_, p)) => {
                    if member.len() > 1 {
                        notes.push(format!("formula is in several classes {classes}; chose {p:?} by the fixed order 2sat, affine, oracle"));
                    }
                    p
                }
                None if allow_oracle => Procedure::Oracle,
                None => bail!(
                    "no polynomial procedure applies (classes {classes}, {}); rerun with --oracle",
                    label(spec)
                ),
            }
        }
    };

    let mut text = String::new();
    let (verdict, result) = match procedure {
        Procedure::TwoSat => match spec.degree {
            Degree::Finite(0) => {
                let x = solve_2sat(f)?;
                text += &verdict_line(x.is_some(), spec, x.as_ref());
                (x.is_some(), json!({"procedure": "2sat-solver", "model": x}))
            }
            Degree::Star => {
                let res = delta_star_2sat(f)?;
                text += &verdict_line(res.verdict, spec, res.y0.as_ref());
                text += "procedure: delta-star 2-SAT\n";
                if let Some(r) = &res.rejection {
                    text += &format!("reason: {}\n", serde_json::to_string(r)?);
                }
                (res.verdict, json!({"procedure": "delta-star-2sat", "model": res.y0, "detail": res}))
            }
            _ if algorithm == Algorithm::One => {
                let res = algorithm1(f)?;
                text += &verdict_line(res.verdict, spec, res.model.as_ref());
                text += "procedure: algorithm 1\n";
                if let Some(r) = &res.rejection {
                    text += &format!("reason: {}\n", serde_json::to_string(r)?);
                }
                let phi_b = emit(&res.phi_b);
                text += &format!("phi_B:\n{}", indent(&phi_b));
                (
                    res.verdict,
                    json!({"procedure": "algorithm-1", "model": res.model, "phi_b": phi_b, "detail": res}),
                )
            }
            _ => {
                let res = algorithm2(f)?;
                text += &verdict_line(res.verdict, spec, res.model.as_ref());
                text += "procedure: algorithm 2\n";
                if let Some(r) = &res.rejection {
                    text += &format!("reason: {}\n", serde_json::to_string(r)?);
                }
                let mut result = json!({"procedure": "algorithm-2", "model": res.model, "detail": res});
                if emit_f_hat {
                    let f_hat = match enforce_strong_3_consistency(f)? {
                        Consistency::Consistent { f_hat, .. } => Some(emit(&f_hat)),
                        Consistency::Unsat => None,
                    };
                    if let Some(d) = &f_hat {
                        text += &format!("f_hat:\n{}", indent(d));
                    }
                    result["f_hat"] = json!(f_hat);
                }
                (res.verdict, result)
            }
        },
        Procedure::Affine => {
            let (verdict, mut result) = match (spec.r, spec.s, spec.degree) {
                (_, _, Degree::Finite(0)) => {
                    let x = solve_affine(f)?;
                    (x.is_some(), json!({"procedure": "gaussian-elimination"}))
                }
                (1, 1, Degree::Star) => {
                    let res = delta11_affine(f)?;
                    let v = delta_star_affine(f)?;
                    (v, json!({"procedure": "affine-delta-star", "pairing": res.pairing, "unmatched": res.unmatched}))
                }
                (1, 1, _) => {
                    let res = delta11_affine(f)?;
                    (res.verdict, json!({"procedure": "affine-delta11", "pairing": res.pairing, "unmatched": res.unmatched}))
                }
                (r, s, _) => {
                    let res = delta_rs_affine(f, r, s)?;
                    (res.verdict, json!({"procedure": "affine-column-sums", "counterexample": res.counterexample}))
                }
            };
            let model = if verdict { solve_affine(f)? } else { None };
            text += &verdict_line(verdict, spec, model.as_ref());
            text += &format!("procedure: {}\n", result["procedure"].as_str().unwrap_or_default());
            if let Some(p) = result.get("pairing").filter(|p| !p.is_null()) {
                text += &format!("pairing: {p}\n");
            }
            result["model"] = json!(model);
            (verdict, result)
        }
        Procedure::Oracle => {
            let x = oracle.find_delta_model(f, spec)?;
            text += &verdict_line(x.is_some(), spec, x.as_ref());
            text += "procedure: oracle\n";
            let certificate = match &x {
                Some(x) => oracle.is_delta_model(f, x, spec)?.certificate,
                None => None,
            };
            (x.is_some(), json!({"procedure": "oracle", "model": x, "certificate": certificate}))
        }
    };
    for n in &notes {
        text += &format!("note: {n}\n");
    }
    let mut result = result;
    result["spec"] = json!(spec);
    result["classes"] = json!(classes);
    result["notes"] = json!(notes);
    Ok(Outcome {
        verdict: Some(verdict),
        text,
        result,
    })
}

fn check(f: &Formula, assignment: &str, rb: &Robustness, oracle: &Oracle) -> Result<Outcome> {
    let spec = rb.spec()?;
    let x: Assignment = assignment.parse()?;
    let res = match oracle.is_delta_model(f, &x, spec) {
        Err(OracleError::NotAModel(_)) => {
            return Ok(Outcome {
                verdict: Some(false),
                text: format!("{x} is not a model\n"),
                result: json!({"assignment": x, "spec": spec, "is_model": false, "holds": false}),
            })
        }
        other => other?,
    };
    let mut text = if res.holds {
        format!("{x} is a {}\n", label(spec))
    } else {
        format!("{x} is not a {}\n", label(spec))
    };
    if let Some(cert) = &res.certificate {
        for e in &cert.entries {
            let names = |vs: &[robustsat::Var]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
            let repair = if e.repair.is_empty() { "nothing".to_string() } else { names(&e.repair) };
            text += &format!("  break {} -> repair {}\n", names(&e.break_set), repair);
        }
    }
    if let Some(b) = &res.unrepairable {
        let names: Vec<String> = b.iter().map(|v| v.to_string()).collect();
        text += &format!("  unrepairable break: {}\n", names.join(" "));
    }
    Ok(Outcome {
        verdict: Some(res.holds),
        text,
        result: json!({"assignment": x, "spec": spec, "is_model": true, "holds": res.holds,
                       "certificate": res.certificate, "unrepairable": res.unrepairable}),
    })
}

fn write_out(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => Ok(()),
    }
}

fn reduction_result(red: &Reduction, dimacs: &str) -> Value {
    json!({
        "kind": red.kind,
        "num_vars": red.target.num_vars(),
        "num_clauses": red.target.clauses().len(),
        "classes": classify(&red.target),
        "fixed": red.fixed,
        "var_map": red.var_map,
        "dimacs": dimacs,
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let oracle = Oracle::with_cap(cli.cap as usize)?;
    match &cli.command {
        Command::Classify { input } => {
            let f = read_formula(input, cli.format)?;
            let classes = classify(&f);
            let report = validate(&f);
            let mut text = format!(
                "classes: {classes}\nvariables: {}\nclauses: {}\n",
                f.num_vars(),
                f.clauses().len()
            );
            if report.is_clean() {
                text += "assumptions: clean\n";
            }
            for issue in &report.issues {
                text += &format!("assumption: {issue}\n");
            }
            Ok(Outcome {
                verdict: None,
                text,
                result: json!({"classes": classes, "num_vars": f.num_vars(),
                               "num_clauses": f.clauses().len(), "validation": report}),
            })
        }
        Command::Solve { input, class, robustness, oracle: allow, algorithm, emit_f_hat } => {
            let f = read_formula(input, cli.format)?;
            solve(&f, *class, robustness, *allow, *algorithm, *emit_f_hat, &oracle)
        }
        Command::Check { input, assignment, robustness } => {
            let f = read_formula(input, cli.format)?;
            check(&f, assignment, robustness, &oracle)
        }
        Command::Degree { input, assignment, r, s, k_max } => {
            let f = read_formula(input, cli.format)?;
            let x: Assignment = assignment.parse()?;
            match oracle.delta_degree(&f, &x, *r as usize, *s as usize, *k_max) {
                Err(OracleError::NotAModel(_)) => Ok(Outcome {
                    verdict: Some(false),
                    text: format!("{x} is not a model\n"),
                    result: json!({"assignment": x, "is_model": false}),
                }),
                res => {
                    let d = res?;
                    Ok(Outcome {
                        verdict: None,
                        text: format!("degree: {d}\n"),
                        result: json!({"assignment": x, "is_model": true, "degree": d, "k_max": k_max}),
                    })
                }
            }
        }
        Command::Reduce { input, reduction, output, varmap } => {
            let f = read_formula(input, cli.format)?;
            let red = reduce(&f, reduction.kind(&f))?;
            let dimacs = emit(&red.target);
            let sidecar = serde_json::to_string_pretty(&red.var_map)?;
            let varmap_path = varmap
                .clone()
                .or_else(|| output.as_ref().map(|o| PathBuf::from(format!("{}.varmap.json", o.display()))));
            write_out(output.as_deref(), &dimacs)?;
            write_out(varmap_path.as_deref(), &sidecar)?;
            let mut text = String::new();
            if output.is_none() {
                for (role, v) in red.var_map.iter() {
                    text += &format!("c var {} {role}\n", v.index());
                }
                text += &dimacs;
            } else {
                text += &format!(
                    "wrote {} ({} variables, {} clauses)\n",
                    output.as_ref().unwrap().display(),
                    red.target.num_vars(),
                    red.target.clauses().len()
                );
            }
            if let Some(p) = &varmap_path {
                if output.is_some() {
                    text += &format!("wrote {}\n", p.display());
                }
            }
            Ok(Outcome {
                verdict: None,
                text,
                result: reduction_result(&red, &dimacs),
            })
        }
        Command::Gen { family, n, k, m, seed, output } => {
            let (n, k) = (*n as usize, *k as usize);
            let mut rng = robustsat::random::rng(*seed);
            let f = match family {
                Family::H if k <= 1 => gen_h(n, k)?.cnf.expect("k <= 1 has a CNF"),
                Family::H => exactly_k_cnf(n, k)?,
                Family::Pairchain => gen_pair_chain(n)?,
                Family::Example3 => example3_cnf(n)?,
                Family::Random2sat => robustsat::random::random_2sat(&mut rng, n, m.map_or(n, |m| m as usize))?,
                Family::RandomAffine => {
                    robustsat::random::random_affine(&mut rng, n, m.map_or(n.div_ceil(2), |m| m as usize), 0.4)?
                }
            };
            let dimacs = emit(&f);
            write_out(output.as_deref(), &dimacs)?;
            Ok(Outcome {
                verdict: None,
                text: if output.is_some() { String::new() } else { dimacs.clone() },
                result: json!({"family": family, "num_vars": f.num_vars(),
                               "num_clauses": f.clauses().len(), "dimacs": dimacs}),
            })
        }
        Command::VerifyReduction { input, reduction } => {
            let f = read_formula(input, cli.format)?;
            let rep = verify_reduction(&f, reduction.kind(&f), &oracle)?;
            let yes = |b: bool| if b { "yes" } else { "no" };
            let mut text = format!(
                "reduction: {}\ntarget: {} variables, {} clauses\nsource satisfiable: {}\n",
                rep.kind,
                rep.target.num_vars(),
                rep.target.clauses().len(),
                yes(rep.source_satisfiable)
            );
            for c in &rep.claims {
                text += &format!(
                    "target has {}: {} ({})\n",
                    label(c.spec),
                    yes(c.target_has_model),
                    if c.holds { "consistent" } else { "INCONSISTENT" }
                );
            }
            if let Some(w) = &rep.canonical_witness {
                text += &format!("canonical witness {}: {}\n", w.assignment, if w.passes { "passes" } else { "fails" });
            }
            for n in &rep.notes {
                text += &format!("note: {n}\n");
            }
            text += &format!("equivalence: {}\n", yes(rep.equivalence));
            Ok(Outcome {
                verdict: Some(rep.equivalence),
                text,
                result: serde_json::to_value(&rep)?,
            })
        }
        Command::Enumerate { input, limit } => {
            let f = read_formula(input, cli.format)?;
            let models = oracle.enumerate_models(&f)?;
            let shown: Vec<&Assignment> = models.iter().take(limit.unwrap_or(usize::MAX)).collect();
            let mut text: String = shown.iter().map(|x| format!("{x}\n")).collect();
            text += &format!("{} model(s)\n", models.len());
            Ok(Outcome {
                verdict: Some(!models.is_empty()),
                text,
                result: json!({"count": models.len(), "models": shown}),
            })
        }
    }
}

fn cap_exceeded(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        matches!(c.downcast_ref::<OracleError>(), Some(OracleError::CapExceeded { .. }))
            || matches!(
                c.downcast_ref::<ReductionError>(),
                Some(ReductionError::Oracle(OracleError::CapExceeded { .. }))
            )
    })
}

// a closed pipe (e.g. `| head`) is not an error worth a panic
fn stdout(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn out_line(text: &str) {
    stdout(&format!("{text}\n"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                match Report::new(cli.command.name(), &cli, out.verdict, &out.result) {
                    Ok(r) => out_line(&r.to_json()),
                    Err(e) => {
                        eprintln!("error: {}", anyhow!(e));
                        return ExitCode::from(2);
                    }
                }
            } else {
                stdout(&out.text);
            }
            ExitCode::from(if out.verdict == Some(false) { 1 } else { 0 })
        }
        Err(e) => {
            let code = if cap_exceeded(&e) { 3 } else { 2 };
            if cli.json {
                let err = json!({"error": format!("{e:#}"), "cap_exceeded": code == 3});
                if let Ok(r) = Report::new(cli.command.name(), &cli, None, &err) {
                    out_line(&r.to_json());
                }
            }
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
