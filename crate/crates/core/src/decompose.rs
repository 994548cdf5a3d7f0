//! Decomposition: case analysis over a single two-part key, the 2NF
//! construction, the known-bad shortcuts and why they fail, 3NF synthesis,
//! and the strict planner that only accepts a 2NF result built from
//! partial-dependency splits.

use serde::Serialize;

use crate::closure::{attribute_closure, candidate_keys, minimal_cover, Limits};
use crate::diagnose::{find_overlapping_pairs, ChainPair};
use crate::error::{AssumptionViolation, Error, Result};
use crate::schema::{
    Attribute, AttributeSet, Decomposition, Fd, Provenance, RelationSchema, Schema,
};
use crate::verify::{
    chase_lossless, generate_instance, instance_join_test, preservation_check, JoinReport,
    RelationInstance,
};

/// The raw shape of a schema with one two-part key `{c1, c2}`, determined
/// by whether the two components' reaches overlap and whether they cover
/// the universe. `ThreeA` and `FourA` are the rejected shortcut variants of
/// the overlapping shapes; analysis itself only produces the other four.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum RawCase {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3a")]
    ThreeA,
    #[serde(rename = "3b")]
    ThreeB,
    #[serde(rename = "4a")]
    FourA,
    #[serde(rename = "4b")]
    FourB,
}

impl std::fmt::Display for RawCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RawCase::One => "1",
            RawCase::Two => "2",
            RawCase::ThreeA => "3a",
            RawCase::ThreeB => "3b",
            RawCase::FourA => "4a",
            RawCase::FourB => "4b",
        })
    }
}

/// The two shapes that actually matter for the construction: disjoint
/// reaches (A) or overlapping reaches (B).
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum MergedCase {
    A,
    B,
}

impl std::fmt::Display for MergedCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MergedCase::A => "A",
            MergedCase::B => "B",
        })
    }
}

/// What `analyze_case` learned about a single-key, two-component schema.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CaseAnalysis {
    pub key: AttributeSet,
    /// The lexicographically smaller key component.
    pub comp1: Attribute,
    pub comp2: Attribute,
    /// Everything `comp1` determines (including itself).
    pub alpha1: AttributeSet,
    pub alpha2: AttributeSet,
    pub overlap: AttributeSet,
    /// Attributes only the whole key reaches.
    pub residual: AttributeSet,
    pub raw_case: RawCase,
    pub merged_case: MergedCase,
}

/// Checks the preconditions (exactly one candidate key, exactly two
/// attributes wide, neither component determining everything) and works out
/// which shape the schema has.
pub fn analyze_case(schema: &Schema, limits: &Limits) -> Result<CaseAnalysis> {
    let keys = candidate_keys(schema.universe(), schema.fds(), limits)?;
    if keys.len() != 1 {
        return Err(AssumptionViolation::MultipleCandidateKeys(keys).into());
    }
    let key = keys.into_iter().next().unwrap();
    if key.len() != 2 {
        return Err(AssumptionViolation::KeyWidth { key }.into());
    }
    let (comp1, comp2) = {
        let mut parts = key.iter().cloned();
        (parts.next().unwrap(), parts.next().unwrap())
    };

    let alpha1 = attribute_closure(&AttributeSet::singleton(comp1.clone()), schema.fds());
    let alpha2 = attribute_closure(&AttributeSet::singleton(comp2.clone()), schema.fds());
    // Unreachable when the key really is minimal, but checked for direct
    // callers constructing odd inputs.
    if alpha1.is_superset(schema.universe()) {
        return Err(AssumptionViolation::ComponentReachesUniverse { component: comp1 }.into());
    }
    if alpha2.is_superset(schema.universe()) {
        return Err(AssumptionViolation::ComponentReachesUniverse { component: comp2 }.into());
    }

    let overlap = alpha1.intersection(&alpha2);
    let union = alpha1.union(&alpha2);
    let covers = union.is_superset(schema.universe());
    let residual = schema.universe().difference(&union);
    let raw_case = match (overlap.is_empty(), covers) {
        (true, true) => RawCase::One,
        (true, false) => RawCase::Two,
        (false, true) => RawCase::ThreeB,
        (false, false) => RawCase::FourB,
    };
    let merged_case = if overlap.is_empty() { MergedCase::A } else { MergedCase::B };
    Ok(CaseAnalysis { key, comp1, comp2, alpha1, alpha2, overlap, residual, raw_case, merged_case })
}

/// Sorts tables into canonical order, names them `R1..Rn`, computes their
/// keys, and assembles a decomposition.
pub fn build_decomposition(
    mut parts: Vec<(AttributeSet, Option<Provenance>)>,
    schema: &Schema,
    limits: &Limits,
) -> Result<Decomposition> {
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let mut relations = Vec::with_capacity(parts.len());
    let mut provenance = Vec::with_capacity(parts.len());
    for (i, (attrs, tag)) in parts.into_iter().enumerate() {
        relations.push(RelationSchema::derive(format!("R{}", i + 1), attrs, schema.fds(), limits)?);
        provenance.push(tag);
    }
    Decomposition::new(relations, provenance, schema.universe())
        .map_err(|e| Error::Validation(vec![e]))
}

pub fn two_nf_tables(ca: &CaseAnalysis) -> Vec<(AttributeSet, Option<Provenance>)> {
    let residual_table = ca.key.union(&ca.residual);
    vec![
        (ca.alpha1.clone(), Some(Provenance::PartialDependencySplit)),
        (ca.alpha2.clone(), Some(Provenance::PartialDependencySplit)),
        (residual_table, Some(Provenance::ResidualKeyTable)),
    ]
}

/// The 2NF construction for a single two-part key: one table per key
/// component carrying everything that component determines, plus the key
/// table carrying the residual. The key table is emitted even when the
/// residual is empty — dropping it is exactly the rejected lossy shortcut.
pub fn decompose_2nf(schema: &Schema, limits: &Limits) -> Result<Decomposition> {
    let ca = analyze_case(schema, limits)?;
    build_decomposition(two_nf_tables(&ca), schema, limits)
}

/// The tempting shortcuts and what each one breaks.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IllegitimateVariant {
    /// Disjoint reaches covering everything, key table dropped: loses tuples.
    OneWithoutR3,
    /// Overlapping reaches covering everything, overlap removed from the
    /// second table: loses dependencies.
    ThreeA,
    /// Overlapping reaches not covering everything, same removal: loses
    /// dependencies.
    FourA,
}

impl std::fmt::Display for IllegitimateVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            IllegitimateVariant::OneWithoutR3 => "1-without-R3",
            IllegitimateVariant::ThreeA => "3a",
            IllegitimateVariant::FourA => "4a",
        })
    }
}

/// Tuple-level evidence that a decomposition loses information: a seeded
/// instance whose projections join back to something strictly larger.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SpuriousDemo {
    pub seed: u64,
    pub instance: RelationInstance,
    pub join: JoinReport,
}

/// The rejected construction together with the evidence against it.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct RejectionReport {
    pub variant: IllegitimateVariant,
    pub decomposition: Decomposition,
    pub lossless: bool,
    pub preserved: bool,
    pub lost: Vec<Fd>,
    pub spurious_demo: Option<SpuriousDemo>,
}

fn inapplicable(variant: IllegitimateVariant, reason: &str) -> Error {
    Error::VariantInapplicable { variant: variant.to_string(), reason: reason.to_string() }
}

/// Builds one of the known-bad variants and demonstrates its failure:
/// the lossy one gets a chase refusal plus (when a seeded instance shows
/// one within 20 seeds) a spurious-tuple demo; the dependency-losing ones
/// get the list of lost dependencies.
pub fn reject_illegitimate(
    schema: &Schema,
    variant: IllegitimateVariant,
    limits: &Limits,
) -> Result<RejectionReport> {
    let ca = analyze_case(schema, limits)?;
    let parts = match variant {
        IllegitimateVariant::OneWithoutR3 => {
            if !ca.residual.is_empty() {
                return Err(inapplicable(
                    variant,
                    "the key components' reaches do not cover every attribute, so the key table cannot be dropped",
                ));
            }
            vec![
                (ca.alpha1.clone(), Some(Provenance::PartialDependencySplit)),
                (ca.alpha2.clone(), Some(Provenance::PartialDependencySplit)),
            ]
        }
        IllegitimateVariant::ThreeA | IllegitimateVariant::FourA => {
            if ca.overlap.is_empty() {
                return Err(inapplicable(variant, "the key components' reaches do not overlap"));
            }
            let expected_residual_empty = variant == IllegitimateVariant::ThreeA;
            if ca.residual.is_empty() != expected_residual_empty {
                let reason = if expected_residual_empty {
                    "some attributes need the whole key; this is the 4a shape"
                } else {
                    "the key components' reaches cover everything; this is the 3a shape"
                };
                return Err(inapplicable(variant, reason));
            }
            // Second table stripped of the overlap it shares with the first.
            let comp2 = AttributeSet::singleton(ca.comp2.clone());
            let stripped = comp2.union(&ca.alpha2.difference(&ca.alpha1));
            let mut parts = vec![
                (ca.alpha1.clone(), Some(Provenance::PartialDependencySplit)),
                (stripped, Some(Provenance::PartialDependencySplit)),
            ];
            if !ca.residual.is_empty() {
                parts.push((ca.key.union(&ca.residual), Some(Provenance::ResidualKeyTable)));
            }
            parts
        }
    };

    let d = build_decomposition(parts, schema, limits)?;
    let (lossless, _) = chase_lossless(&d, schema);
    let preservation = preservation_check(&d, schema);
    let mut spurious_demo = None;
    if !lossless {
        for seed in 0..20 {
            let Ok(instance) = generate_instance(schema, 3, seed, limits) else {
                break; // cyclic cover: no instance evidence available
            };
            let join = instance_join_test(&instance, &d);
            if join.spurious_count > 0 {
                spurious_demo = Some(SpuriousDemo { seed, instance, join });
                break;
            }
        }
    }
    Ok(RejectionReport {
        variant,
        decomposition: d,
        lossless,
        preserved: preservation.preserved,
        lost: preservation.lost,
        spurious_demo,
    })
}

/// Classic 3NF synthesis: group a minimal cover by left-hand side, one
/// table per group, drop tables contained in others, and add a key table
/// if no table holds a candidate key. Always lossless and preserving.
pub fn synthesize_3nf(schema: &Schema, limits: &Limits) -> Result<Decomposition> {
    let cover = minimal_cover(schema.fds());

    let mut groups: Vec<(AttributeSet, AttributeSet)> = Vec::new(); // (lhs, table attrs)
    for fd in cover.iter() {
        match groups.iter_mut().find(|(lhs, _)| lhs == fd.lhs()) {
            Some((_, attrs)) => *attrs = attrs.union(fd.rhs()),
            None => groups.push((fd.lhs().clone(), fd.attrs())),
        }
    }
    let mut tables: Vec<AttributeSet> = groups.into_iter().map(|(_, attrs)| attrs).collect();

    // Drop tables subsumed by others (ties broken toward keeping the first
    // in canonical order).
    tables.sort();
    let mut kept: Vec<AttributeSet> = Vec::new();
    for t in &tables {
        if !tables.iter().any(|u| t != u && t.is_subset(u))
            && !kept.contains(t)
        {
            kept.push(t.clone());
        }
    }

    let keys = candidate_keys(schema.universe(), schema.fds(), limits)?;
    let mut parts: Vec<(AttributeSet, Option<Provenance>)> = kept
        .into_iter()
        .map(|t| (t, Some(Provenance::Synthesis)))
        .collect();
    if !parts.iter().any(|(t, _)| keys.iter().any(|k| k.is_subset(t))) {
        parts.push((keys[0].clone(), Some(Provenance::KeyFragment)));
    }
    build_decomposition(parts, schema, limits)
}

/// One narrated step of the planner.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PlanStep {
    pub note: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<AttributeSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl PlanStep {
    fn note(note: impl Into<String>) -> Self {
        PlanStep { note: note.into(), table: None, provenance: None }
    }

    fn table(note: impl Into<String>, table: AttributeSet, provenance: Provenance) -> Self {
        PlanStep { note: note.into(), table: Some(table), provenance: Some(provenance) }
    }
}

/// One of the two ways of placing the blocking attributes, with its
/// verification results and — for the split placement — the table whose
/// very existence is a transitivity-based step.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Placement {
    pub decomposition: Decomposition,
    pub lossless: bool,
    pub preserved: bool,
    pub lost: Vec<Fd>,
    /// The table that was split out along a transitive route, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transitivity_table: Option<AttributeSet>,
}

/// Why no decomposition built purely from partial-dependency splits works:
/// keeping the blocking attributes with the key loses a dependency, and
/// splitting them out rides a transitive route — which is a 3NF step, not
/// a 2NF one.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Impossibility {
    pub key_placement: Placement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_placement: Option<Placement>,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlanResult {
    Decomposed { decomposition: Decomposition },
    Impossible { impossibility: Impossibility },
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct PlanOutcome {
    pub result: PlanResult,
    /// The chain pair blocking the plan, when diagnosis finds one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ChainPair>,
    pub narrative: Vec<PlanStep>,
}

/// Plans a decomposition that lands exactly on 2NF using only
/// partial-dependency splits plus the key table. The construction is
/// verified (chase + preservation); when it fails, the planner reports
/// impossibility, attaches the blocking chain pair when diagnosis finds
/// one, and contrasts the two placements of the blocked attributes.
pub fn plan_precise_2nf(schema: &Schema, limits: &Limits) -> Result<PlanOutcome> {
    let ca = analyze_case(schema, limits)?;
    let mut narrative = vec![PlanStep::note(format!(
        "key {} with component reaches {} and {} (case {}/{})",
        ca.key.braced(),
        ca.alpha1.braced(),
        ca.alpha2.braced(),
        ca.raw_case,
        ca.merged_case,
    ))];

    let d = build_decomposition(two_nf_tables(&ca), schema, limits)?;
    for (rel, tag) in d.iter() {
        narrative.push(PlanStep::table(
            format!("emit {} = {}", rel.name(), rel.attrs().braced()),
            rel.attrs().clone(),
            tag.expect("constructed tables are tagged"),
        ));
    }

    let (lossless, _) = chase_lossless(&d, schema);
    let preservation = preservation_check(&d, schema);
    narrative.push(PlanStep::note(format!(
        "verified: lossless {}, dependencies preserved {}",
        if lossless { "yes" } else { "no" },
        if preservation.preserved { "yes" } else { "no" },
    )));

    if lossless && preservation.preserved {
        // Every step above is a partial-dependency split or the key table;
        // nothing rode a transitive route.
        debug_assert!(d.provenance().iter().all(|p| matches!(
            p,
            Some(Provenance::PartialDependencySplit) | Some(Provenance::ResidualKeyTable)
        )));
        narrative.push(PlanStep::note(
            "audit: every step is a partial-dependency split or the key table",
        ));
        return Ok(PlanOutcome { result: PlanResult::Decomposed { decomposition: d }, witness: None, narrative });
    }

    let witness = find_overlapping_pairs(schema, limits)?.into_iter().next();
    for fd in &preservation.lost {
        narrative.push(PlanStep::note(format!("keeping things as built loses {fd}")));
    }

    let key_placement = Placement {
        decomposition: d,
        lossless,
        preserved: preservation.preserved,
        lost: preservation.lost,
        transitivity_table: None,
    };

    let split_placement = match &witness {
        None => None,
        Some(pair) => {
            let meeting_table = pair.meeting.attrs();
            let residual_rest = ca.residual.difference(&pair.gamma);
            let parts = vec![
                (ca.alpha1.clone(), Some(Provenance::PartialDependencySplit)),
                (ca.alpha2.clone(), Some(Provenance::PartialDependencySplit)),
                (ca.key.union(&residual_rest), Some(Provenance::ResidualKeyTable)),
                (meeting_table.clone(), Some(Provenance::TransitivitySplit)),
            ];
            let alt = build_decomposition(parts, schema, limits)?;
            let (alt_lossless, _) = chase_lossless(&alt, schema);
            let alt_pres = preservation_check(&alt, schema);
            narrative.push(PlanStep::note(format!(
                "splitting {} into its own table saves {} but is a transitivity-based step — a 3NF move, not a 2NF one",
                meeting_table.braced(),
                pair.meeting,
            )));
            Some(Placement {
                decomposition: alt,
                lossless: alt_lossless,
                preserved: alt_pres.preserved,
                lost: alt_pres.lost,
                transitivity_table: Some(meeting_table),
            })
        }
    };

    Ok(PlanOutcome {
        result: PlanResult::Impossible {
            impossibility: Impossibility { key_placement, split_placement },
        },
        witness,
        narrative,
    })
}
