//! Command dispatch. Reports go to the output stream, diagnostics to the
//! error stream; the exit code is the machine-readable summary:
//!
//! * 0 — analysis complete, nothing wrong found
//! * 1 — a violation or impossibility was found (CI-friendly failure)
//! * 2 — input error (unreadable file, parse error, unsupported shape)
//! * 3 — a size limit was exceeded

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fdnf_core::closure::{attribute_closure, candidate_keys, Limits};
use fdnf_core::decompose::{analyze_case, decompose_2nf, plan_precise_2nf, synthesize_3nf, PlanResult};
use fdnf_core::diagnose::theorem1_verdict;
use fdnf_core::nf::{classify_database, classify_schema, NormalForm, NormalFormLabel};
use fdnf_core::schema::{Attribute, AttributeSet, Decomposition, Schema};
use fdnf_core::verify::{chase_lossless, generate_instance, instance_join_test, preservation_check};

use crate::parse::{parse_decomposition_file, parse_schema_file, render_decomposition, DecompositionError};
use crate::report::{AnalysisReport, ClosureSection, SchemaSection, SpuriousDemo, VerificationSection};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "fdnf",
    version,
    about = "Functional-dependency analysis: closures, keys, normal forms, verified decomposition, and precisely-2NF diagnosis"
)]
pub struct Cli {
    /// Emit the machine-readable JSON report instead of the human one.
    #[arg(long, global = true)]
    pub json: bool,

    /// Seed for the tuple-level counterexample search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Upper bound on the attribute counts the searches accept.
    #[arg(long, global = true, value_name = "N")]
    pub max_attrs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute the attribute closure of a set under the schema's dependencies.
    Closure {
        /// Attribute names, comma-separated (or repeat the flag).
        #[arg(long, required = true, value_delimiter = ',')]
        set: Vec<String>,
        /// Schema file (.fd).
        schema: PathBuf,
    },
    /// List the candidate keys of the schema.
    Keys {
        /// Schema file (.fd).
        schema: PathBuf,
    },
    /// Classify the schema — or a decomposition of it — up to 3NF, with witnesses.
    Classify {
        /// Decomposition file (.dec) to classify instead of the schema itself.
        #[arg(long)]
        decomposition: Option<PathBuf>,
        /// Schema file (.fd).
        schema: PathBuf,
    },
    /// Decompose the schema and verify the result.
    Decompose {
        /// What to aim for.
        #[arg(long, value_enum)]
        target: Target,
        /// Schema file (.fd).
        schema: PathBuf,
    },
    /// Verify a decomposition: lossless join and dependency preservation.
    Check {
        /// Decomposition file (.dec).
        #[arg(long)]
        decomposition: PathBuf,
        /// Schema file (.fd).
        schema: PathBuf,
    },
    /// Decide whether reaching 2NF without transitivity-based splits is ruled out.
    Diagnose {
        /// Schema file (.fd).
        schema: PathBuf,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Target {
    /// Split every partial dependency out; keep the key table.
    #[value(name = "2nf")]
    TwoNf,
    /// Synthesize third normal form from the minimal cover.
    #[value(name = "3nf")]
    ThreeNf,
    /// 2NF through partial-dependency splits only, or a proof it cannot be done.
    #[value(name = "precise2nf")]
    Precise2nf,
}

impl Target {
    fn name(self) -> &'static str {
        match self {
            Target::TwoNf => "2nf",
            Target::ThreeNf => "3nf",
            Target::Precise2nf => "precise2nf",
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

fn input(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

fn from_core(e: fdnf_core::Error) -> Failure {
    let code = match &e {
        fdnf_core::Error::SizeLimitExceeded { .. } => EXIT_LIMIT,
        _ => EXIT_INPUT,
    };
    Failure { code, message: e.to_string() }
}

/// Runs a parsed command line, writing the report to `out` and any
/// diagnostics to `err`, and returns the exit code.
pub fn run(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> i32 {
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "{}", f.message);
            f.code
        }
    }
}

fn load_schema(path: &Path) -> Result<Schema, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    let doc = parse_schema_file(&text).map_err(|errors| {
        let name = path.display();
        let lines: Vec<String> = errors.iter().map(|e| format!("{name}: {e}")).collect();
        input(lines.join("\n"))
    })?;
    Ok(doc.schema)
}

fn load_decomposition(path: &Path, schema: &Schema, limits: &Limits) -> Result<Decomposition, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    parse_decomposition_file(&text, schema, limits).map_err(|e| {
        let name = path.display();
        match e {
            DecompositionError::Parse(errors) => {
                let lines: Vec<String> = errors.iter().map(|p| format!("{name}: {p}")).collect();
                input(lines.join("\n"))
            }
            DecompositionError::Incomplete(_) => input(format!("{name}: {e}")),
            DecompositionError::Limit(core) => from_core(core),
        }
    })
}

/// Tries a window of seeds for an instance whose projections join back to
/// extra tuples. `None` when the dependency graph is cyclic or no seed in
/// the window collides.
fn find_spurious_demo(
    schema: &Schema,
    d: &Decomposition,
    seed: u64,
    limits: &Limits,
) -> Option<SpuriousDemo> {
    for offset in 0..20u64 {
        let s = seed.wrapping_add(offset);
        let inst = match generate_instance(schema, 3, s, limits) {
            Ok(inst) => inst,
            Err(_) => return None,
        };
        let join = instance_join_test(&inst, d);
        if join.spurious_count > 0 {
            return Some(SpuriousDemo {
                seed: s,
                instance: inst,
                spurious_count: join.spurious_count,
                spurious_tuples: join.spurious_tuples,
            });
        }
    }
    None
}

fn verify_section(
    schema: &Schema,
    d: &Decomposition,
    seed: u64,
    limits: &Limits,
) -> (VerificationSection, bool) {
    let (lossless, _) = chase_lossless(d, schema);
    let preservation = preservation_check(d, schema);
    let mut section = VerificationSection::new(lossless, preservation.preserved, &preservation.lost);
    if !lossless {
        section.spurious_demo = find_spurious_demo(schema, d, seed, limits);
    }
    (section, lossless && preservation.preserved)
}

fn classification_exit(label: &NormalFormLabel) -> i32 {
    let clean = label.level == NormalForm::Third
        && label.lossless != Some(false)
        && label.preserving != Some(false);
    if clean {
        EXIT_CLEAN
    } else {
        EXIT_FINDING
    }
}

fn execute(cli: Cli, out: &mut impl Write) -> Result<i32, Failure> {
    let limits = match cli.max_attrs {
        Some(n) => Limits::with_max_attrs(n),
        None => Limits::default(),
    };
    let schema_path = match &cli.command {
        Command::Closure { schema, .. }
        | Command::Keys { schema }
        | Command::Classify { schema, .. }
        | Command::Decompose { schema, .. }
        | Command::Check { schema, .. }
        | Command::Diagnose { schema } => schema.clone(),
    };
    let schema = load_schema(&schema_path)?;
    let keys = candidate_keys(schema.universe(), schema.fds(), &limits).map_err(from_core)?;
    let mut prime = AttributeSet::empty();
    for k in &keys {
        prime = prime.union(k);
    }

    let command_name = match &cli.command {
        Command::Closure { .. } => "closure".to_string(),
        Command::Keys { .. } => "keys".to_string(),
        Command::Classify { .. } => "classify".to_string(),
        Command::Decompose { target, .. } => format!("decompose --target {}", target.name()),
        Command::Check { .. } => "check".to_string(),
        Command::Diagnose { .. } => "diagnose".to_string(),
    };
    let mut report =
        AnalysisReport::new(&command_name, cli.seed, SchemaSection::new(&schema, keys, prime));

    let code = match cli.command {
        Command::Closure { set, .. } => {
            let mut of = AttributeSet::empty();
            for raw in &set {
                let a = Attribute::new(raw)
                    .map_err(|_| input(format!("invalid attribute name `{raw}`")))?;
                if !schema.universe().contains(&a) {
                    return Err(input(format!("unknown attribute `{a}` (not in the schema)")));
                }
                of.insert(a);
            }
            let closure = attribute_closure(&of, schema.fds());
            report.closure = Some(ClosureSection { of, closure });
            EXIT_CLEAN
        }
        Command::Keys { .. } => EXIT_CLEAN,
        Command::Classify { decomposition, .. } => match decomposition {
            None => {
                let label = classify_schema(&schema, &limits).map_err(from_core)?;
                let code = classification_exit(&label);
                report.classification = Some(label);
                code
            }
            Some(path) => {
                let d = load_decomposition(&path, &schema, &limits)?;
                let label = classify_database(&d, &schema, &limits).map_err(from_core)?;
                let (verification, _) = verify_section(&schema, &d, cli.seed, &limits);
                let code = classification_exit(&label);
                report.classification = Some(label);
                report.verification = Some(verification);
                report.decomposition = Some(d);
                code
            }
        },
        Command::Decompose { target, .. } => match target {
            Target::TwoNf => {
                let ca = analyze_case(&schema, &limits).map_err(from_core)?;
                let d = decompose_2nf(&schema, &limits).map_err(from_core)?;
                let (verification, legit) = verify_section(&schema, &d, cli.seed, &limits);
                report.case = Some(ca);
                report.verification = Some(verification);
                report.rendered_decomposition = Some(render_decomposition(&d));
                report.decomposition = Some(d);
                if legit {
                    EXIT_CLEAN
                } else {
                    EXIT_FINDING
                }
            }
            Target::ThreeNf => {
                let d = synthesize_3nf(&schema, &limits).map_err(from_core)?;
                let (verification, legit) = verify_section(&schema, &d, cli.seed, &limits);
                report.verification = Some(verification);
                report.rendered_decomposition = Some(render_decomposition(&d));
                report.decomposition = Some(d);
                if legit {
                    EXIT_CLEAN
                } else {
                    EXIT_FINDING
                }
            }
            Target::Precise2nf => {
                let ca = analyze_case(&schema, &limits).map_err(from_core)?;
                let plan = plan_precise_2nf(&schema, &limits).map_err(from_core)?;
                report.case = Some(ca);
                let code = match &plan.result {
                    PlanResult::Decomposed { decomposition } => {
                        report.rendered_decomposition = Some(render_decomposition(decomposition));
                        EXIT_CLEAN
                    }
                    PlanResult::Impossible { .. } => EXIT_FINDING,
                };
                report.plan = Some(plan);
                code
            }
        },
        Command::Check { decomposition, .. } => {
            let d = load_decomposition(&decomposition, &schema, &limits)?;
            let (verification, legit) = verify_section(&schema, &d, cli.seed, &limits);
            report.verification = Some(verification);
            report.decomposition = Some(d);
            if legit {
                EXIT_CLEAN
            } else {
                EXIT_FINDING
            }
        }
        Command::Diagnose { .. } => {
            let verdict = theorem1_verdict(&schema, &limits).map_err(from_core)?;
            let code = if verdict.impossible == Some(true) {
                EXIT_FINDING
            } else {
                EXIT_CLEAN
            };
            report.verdict = Some(verdict);
            code
        }
    };

    let rendered = if cli.json { report.to_json() } else { report.to_human() };
    let _ = out.write_all(rendered.as_bytes());
    Ok(code)
}
