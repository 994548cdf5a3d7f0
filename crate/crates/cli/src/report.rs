//! One analysis run, rendered two ways: a stable machine-readable JSON
//! document (canonical field order, byte-identical across runs for the
//! same inputs, flags, and seed) and a human reading of the same facts.

use fdnf_core::decompose::{CaseAnalysis, PlanOutcome, PlanResult};
use fdnf_core::diagnose::Theorem1Verdict;
use fdnf_core::nf::NormalFormLabel;
use fdnf_core::schema::{AttributeSet, Decomposition, Fd, Schema};
use fdnf_core::verify::RelationInstance;
use serde::Serialize;

/// The human rendering lists at most this many witnesses per table and
/// category; the JSON report always carries the complete lists.
const WITNESS_DISPLAY_CAP: usize = 6;

#[derive(Serialize)]
pub struct SchemaSection {
    pub attributes: AttributeSet,
    pub dependencies: Vec<String>,
    pub candidate_keys: Vec<AttributeSet>,
    pub prime_attributes: AttributeSet,
}

impl SchemaSection {
    pub fn new(schema: &Schema, keys: Vec<AttributeSet>, prime: AttributeSet) -> SchemaSection {
        SchemaSection {
            attributes: schema.universe().clone(),
            dependencies: schema.fds().iter().map(|fd| fd.to_string()).collect(),
            candidate_keys: keys,
            prime_attributes: prime,
        }
    }
}

#[derive(Serialize)]
pub struct ClosureSection {
    pub of: AttributeSet,
    pub closure: AttributeSet,
}

/// A tuple-level counterexample: a seeded instance whose projections join
/// back to more tuples than it started with.
#[derive(Serialize)]
pub struct SpuriousDemo {
    pub seed: u64,
    pub instance: RelationInstance,
    pub spurious_count: usize,
    pub spurious_tuples: Vec<fdnf_core::verify::Tuple>,
}

#[derive(Serialize)]
pub struct VerificationSection {
    pub lossless: bool,
    pub preserved: bool,
    pub lost: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spurious_demo: Option<SpuriousDemo>,
}

impl VerificationSection {
    pub fn new(lossless: bool, preserved: bool, lost: &[Fd]) -> VerificationSection {
        VerificationSection {
            lossless,
            preserved,
            lost: lost.iter().map(|fd| fd.to_string()).collect(),
            spurious_demo: None,
        }
    }
}

/// The whole report. Sections are present exactly when the subcommand
/// produced them; field order is fixed.
#[derive(Serialize)]
pub struct AnalysisReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub schema: SchemaSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<ClosureSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<NormalFormLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseAnalysis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<Decomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Theorem1Verdict>,
    /// Emitted decompositions in file syntax, ready to be re-read.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rendered_decomposition: Option<String>,
}

impl AnalysisReport {
    pub fn new(command: &str, seed: u64, schema: SchemaSection) -> AnalysisReport {
        AnalysisReport {
            tool: "fdnf",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            schema,
            closure: None,
            classification: None,
            case: None,
            decomposition: None,
            verification: None,
            plan: None,
            verdict: None,
            rendered_decomposition: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report types always serialize");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("{} {} — {} (seed {})", self.tool, self.version, self.command, self.seed));
        line(String::new());
        line("schema".to_string());
        line(format!("  attributes: {}", self.schema.attributes.braced()));
        if self.schema.dependencies.is_empty() {
            line("  dependencies: (none)".to_string());
        } else {
            line("  dependencies:".to_string());
            for fd in &self.schema.dependencies {
                line(format!("    {fd}"));
            }
        }
        line(format!(
            "  candidate keys: {}",
            self.schema.candidate_keys.iter().map(|k| k.braced().to_string()).collect::<Vec<_>>().join(", ")
        ));
        line(format!("  prime attributes: {}", self.schema.prime_attributes.braced()));

        if let Some(c) = &self.closure {
            line(String::new());
            line(format!("closure of {}: {}", c.of.braced(), c.closure.braced()));
        }

        if let Some(label) = &self.classification {
            line(String::new());
            line(format!("classification: {}", label.level));
            if let Some(l) = label.lossless {
                line(format!("  lossless join: {}", if l { "yes" } else { "NO" }));
            }
            if let Some(p) = label.preserving {
                line(format!("  dependency preserving: {}", if p { "yes" } else { "NO" }));
            }
            for t in &label.tables {
                line(format!(
                    "  {} {} — {} (keys: {})",
                    t.name,
                    t.attrs.braced(),
                    t.level,
                    t.candidate_keys.iter().map(|k| k.braced().to_string()).collect::<Vec<_>>().join(", ")
                ));
                for w in t.partial.iter().take(WITNESS_DISPLAY_CAP) {
                    line(format!(
                        "    2NF violation: {} → {} with {} a proper part of key {}",
                        w.part.braced(),
                        w.attribute,
                        w.part.braced(),
                        w.key.braced()
                    ));
                }
                if t.partial.len() > WITNESS_DISPLAY_CAP {
                    line(format!(
                        "    … and {} more 2NF violations (full list in --json output)",
                        t.partial.len() - WITNESS_DISPLAY_CAP
                    ));
                }
                for w in t.transitive.iter().take(WITNESS_DISPLAY_CAP) {
                    line(format!(
                        "    3NF violation: {} → {} → {} (transitive route from the key)",
                        w.alpha.braced(),
                        w.beta.braced(),
                        w.attribute
                    ));
                }
                if t.transitive.len() > WITNESS_DISPLAY_CAP {
                    line(format!(
                        "    … and {} more 3NF violations (full list in --json output)",
                        t.transitive.len() - WITNESS_DISPLAY_CAP
                    ));
                }
                for w in t.prime_transitive.iter().take(WITNESS_DISPLAY_CAP) {
                    line(format!(
                        "    note: prime attribute {} also sits on a transitive route {} → {} → {}",
                        w.attribute,
                        w.alpha.braced(),
                        w.beta.braced(),
                        w.attribute
                    ));
                }
                if t.prime_transitive.len() > WITNESS_DISPLAY_CAP {
                    line(format!(
                        "    … and {} more such routes (full list in --json output)",
                        t.prime_transitive.len() - WITNESS_DISPLAY_CAP
                    ));
                }
            }
        }

        if let Some(ca) = &self.case {
            line(String::new());
            line(format!("case analysis (key {})", ca.key.braced()));
            line(format!("  component reaches: {} and {}", ca.alpha1.braced(), ca.alpha2.braced()));
            line(format!("  overlap: {}", render_maybe_empty(&ca.overlap)));
            line(format!("  outside both reaches: {}", render_maybe_empty(&ca.residual)));
            line(format!("  case: {} (merged {})", ca.raw_case, ca.merged_case));
        }

        if let Some(d) = &self.decomposition {
            line(String::new());
            line("decomposition".to_string());
            for (rel, tag) in d.iter() {
                let why = match tag {
                    Some(p) => format!(" [{p}]"),
                    None => String::new(),
                };
                line(format!("  {} {}{}", rel.name(), rel.attrs().braced(), why));
            }
        }

        if let Some(v) = &self.verification {
            line(String::new());
            line("verification".to_string());
            line(format!("  lossless join: {}", if v.lossless { "yes" } else { "NO" }));
            line(format!("  dependency preserving: {}", if v.preserved { "yes" } else { "NO" }));
            for fd in &v.lost {
                line(format!("    lost: {fd}"));
            }
            if let Some(demo) = &v.spurious_demo {
                line(format!(
                    "  counterexample (seed {}): joining the projections of a {}-tuple instance invents {} tuple(s)",
                    demo.seed,
                    demo.instance.tuples.len(),
                    demo.spurious_count
                ));
            }
        }

        if let Some(plan) = &self.plan {
            line(String::new());
            match &plan.result {
                PlanResult::Decomposed { decomposition } => {
                    line("plan: reachable with partial-dependency splits only".to_string());
                    for (rel, tag) in decomposition.iter() {
                        let why = match tag {
                            Some(p) => format!(" [{p}]"),
                            None => String::new(),
                        };
                        line(format!("  {} {}{}", rel.name(), rel.attrs().braced(), why));
                    }
                }
                PlanResult::Impossible { impossibility } => {
                    line("plan: IMPOSSIBLE — no sequence of 2NF-only splits lands on 2NF".to_string());
                    let kp = &impossibility.key_placement;
                    line("  keeping the met attributes beside the key loses:".to_string());
                    for fd in &kp.lost {
                        line(format!("    {fd}"));
                    }
                    if let Some(sp) = &impossibility.split_placement {
                        if let Some(t) = &sp.transitivity_table {
                            line(format!(
                                "  splitting them out as {} verifies, but that split rides a transitive route — a 3NF step",
                                t.braced()
                            ));
                        }
                    }
                }
            }
            if let Some(w) = &plan.witness {
                line(format!("  chain a: {}", w.chain_a));
                line(format!("  chain b: {}", w.chain_b));
                line(format!("  meeting: {}", w.meeting));
            }
            for step in &plan.narrative {
                line(format!("  · {}", step.note));
            }
        }

        if let Some(v) = &self.verdict {
            line(String::new());
            line("diagnosis".to_string());
            line(format!(
                "  single candidate key: {}",
                if v.assumptions.single_candidate_key { "yes" } else { "no" }
            ));
            line(format!(
                "  two-component key: {}",
                if v.assumptions.two_component_key { "yes" } else { "no" }
            ));
            match v.impossible {
                None => line(
                    "  verdict: not applicable — the schema is outside the single two-part-key shape"
                        .to_string(),
                ),
                Some(false) => line(
                    "  verdict: no blocking chain pair — a precisely-2NF decomposition is not ruled out"
                        .to_string(),
                ),
                Some(true) => {
                    line("  verdict: IMPOSSIBLE to decompose precisely into 2NF".to_string());
                    if let Some(w) = &v.witness {
                        line(format!("  chain a: {}", w.chain_a));
                        line(format!("  chain b: {}", w.chain_b));
                        line(format!("  meeting: {}", w.meeting));
                        line(format!(
                            "  keeping {} with the key loses {}; splitting {} out is a transitivity-based (3NF) step",
                            w.gamma.braced(),
                            w.meeting,
                            w.meeting.attrs().braced()
                        ));
                    }
                }
            }
        }

        if let Some(r) = &self.rendered_decomposition {
            line(String::new());
            line("emitted tables (decomposition file syntax)".to_string());
            for l in r.lines() {
                line(format!("  {l}"));
            }
        }
        out
    }
}

fn render_maybe_empty(s: &AttributeSet) -> String {
    if s.is_empty() {
        "(none)".to_string()
    } else {
        s.braced().to_string()
    }
}
