//! Normal-form classification with witnesses.
//!
//! A table is dropped to 1NF by a partial dependency (a non-prime attribute
//! hanging off a proper part of a candidate key) and held at 2NF by a
//! transitive dependency (a non-prime attribute reachable through a set
//! that no candidate key determines back). Classification never just says
//! "2NF" — it returns the witnesses that block the next level.
//!
//! A database is classified as the weakest of its tables, and demoted to
//! 1NF outright when the decomposition loses tuples or dependencies; the
//! flags record which.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::closure::{
    attribute_closure, minimal_cover, nonempty_subsets, project_fds, Limits,
};
use crate::error::{Error, Result};
use crate::schema::{Attribute, AttributeSet, Decomposition, FdSet, RelationSchema, Schema};
use crate::verify::{chase_lossless, preservation_check};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub enum NormalForm {
    #[serde(rename = "1NF")]
    First,
    #[serde(rename = "2NF")]
    Second,
    #[serde(rename = "3NF")]
    Third,
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalForm::First => "1NF",
            NormalForm::Second => "2NF",
            NormalForm::Third => "3NF",
        })
    }
}

/// A non-prime attribute functionally dependent on a proper part of a
/// candidate key.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub struct PartialDependencyWitness {
    pub key: AttributeSet,
    pub part: AttributeSet,
    pub attribute: Attribute,
}

/// `alpha → beta → attribute` where `beta` does not determine `alpha` back
/// and is not contained in it: the attribute depends on the key only
/// through `beta`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub struct TransitiveDependencyWitness {
    pub alpha: AttributeSet,
    pub beta: AttributeSet,
    pub attribute: Attribute,
}

/// Everything classification learned about one table.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct TableAnalysis {
    pub name: String,
    pub attrs: AttributeSet,
    pub candidate_keys: Vec<AttributeSet>,
    pub level: NormalForm,
    pub partial: Vec<PartialDependencyWitness>,
    pub transitive: Vec<TransitiveDependencyWitness>,
    /// Transitive routes ending in a prime attribute; they do not affect
    /// the level but are worth seeing.
    pub prime_transitive: Vec<TransitiveDependencyWitness>,
}

/// Classification result for a table or a whole decomposition. The two
/// flags are `None` for a single table (they only make sense for a
/// decomposition).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct NormalFormLabel {
    pub level: NormalForm,
    pub tables: Vec<TableAnalysis>,
    pub lossless: Option<bool>,
    pub preserving: Option<bool>,
}

/// Every (key, proper part, non-prime attribute) triple where the part
/// determines the attribute. Exhaustive over all proper parts of every
/// candidate key, in canonical order.
pub fn partial_dependency_witnesses(
    rel: &RelationSchema,
    f: &FdSet,
    limits: &Limits,
) -> Result<Vec<PartialDependencyWitness>> {
    let mut out = Vec::new();
    for key in rel.candidate_keys() {
        if key.len() > limits.projection_attrs {
            return Err(Error::SizeLimitExceeded {
                operation: "key part enumeration",
                size: key.len(),
                limit: limits.projection_attrs,
            });
        }
        let key_attrs: Vec<Attribute> = key.iter().cloned().collect();
        for part in nonempty_subsets(&key_attrs) {
            if part.len() == key.len() {
                continue; // only proper parts
            }
            let reach = attribute_closure(&part, f);
            for a in rel.attrs().iter() {
                if rel.is_prime(a) || part.contains(a) {
                    continue;
                }
                if reach.contains(a) {
                    out.push(PartialDependencyWitness {
                        key: key.clone(),
                        part: part.clone(),
                        attribute: a.clone(),
                    });
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Candidate middle sets for transitive routes inside a relation: the
/// left-hand sides of the projected minimal cover, plus — for relations of
/// up to eight attributes — every non-empty subset, so that small relations
/// are searched exhaustively.
fn beta_candidates(rel: &RelationSchema, f: &FdSet, limits: &Limits) -> Result<BTreeSet<AttributeSet>> {
    let mut betas: BTreeSet<AttributeSet> = BTreeSet::new();
    let projected = project_fds(f, rel.attrs(), limits)?;
    for fd in minimal_cover(&projected.fds).iter() {
        betas.insert(fd.lhs().clone());
    }
    if rel.attrs().len() <= 8 {
        let pool: Vec<Attribute> = rel.attrs().iter().cloned().collect();
        betas.extend(nonempty_subsets(&pool));
    }
    Ok(betas)
}

fn transitive_witnesses_split(
    rel: &RelationSchema,
    f: &FdSet,
    limits: &Limits,
) -> Result<(Vec<TransitiveDependencyWitness>, Vec<TransitiveDependencyWitness>)> {
    let betas = beta_candidates(rel, f, limits)?;
    let mut non_prime = Vec::new();
    let mut prime = Vec::new();
    for alpha in rel.candidate_keys() {
        let alpha_reach = attribute_closure(alpha, f);
        for beta in &betas {
            if beta.is_subset(alpha) || !beta.is_subset(&alpha_reach) {
                continue;
            }
            if attribute_closure(beta, f).is_superset(alpha) {
                continue; // beta determines the key back: not transitive
            }
            let beta_reach = attribute_closure(beta, f);
            for a in rel.attrs().iter() {
                if alpha.contains(a) || beta.contains(a) || !beta_reach.contains(a) {
                    continue;
                }
                let w = TransitiveDependencyWitness {
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    attribute: a.clone(),
                };
                if rel.is_prime(a) {
                    prime.push(w);
                } else {
                    non_prime.push(w);
                }
            }
        }
    }
    non_prime.sort();
    non_prime.dedup();
    prime.sort();
    prime.dedup();
    Ok((non_prime, prime))
}

/// Every `alpha → beta → attribute` route to a non-prime attribute, with
/// `alpha` a candidate key. Routes ending in prime attributes are reported
/// separately by [`classify_table`].
pub fn transitive_dependency_witnesses(
    rel: &RelationSchema,
    f: &FdSet,
    limits: &Limits,
) -> Result<Vec<TransitiveDependencyWitness>> {
    Ok(transitive_witnesses_split(rel, f, limits)?.0)
}

/// Classifies one table: 1NF if any partial dependency exists, else 2NF if
/// any transitive dependency to a non-prime attribute exists, else 3NF.
pub fn classify_table(rel: &RelationSchema, f: &FdSet, limits: &Limits) -> Result<NormalFormLabel> {
    let partial = partial_dependency_witnesses(rel, f, limits)?;
    let (transitive, prime_transitive) = transitive_witnesses_split(rel, f, limits)?;
    let level = if !partial.is_empty() {
        NormalForm::First
    } else if !transitive.is_empty() {
        NormalForm::Second
    } else {
        NormalForm::Third
    };
    Ok(NormalFormLabel {
        level,
        tables: vec![TableAnalysis {
            name: rel.name().to_string(),
            attrs: rel.attrs().clone(),
            candidate_keys: rel.candidate_keys().to_vec(),
            level,
            partial,
            transitive,
            prime_transitive,
        }],
        lossless: None,
        preserving: None,
    })
}

/// Classifies a decomposition: the weakest table level, demoted to 1NF when
/// the decomposition is lossy or loses dependencies. The flags always
/// record the two checks separately.
pub fn classify_database(
    d: &Decomposition,
    schema: &Schema,
    limits: &Limits,
) -> Result<NormalFormLabel> {
    let mut tables = Vec::new();
    let mut level = NormalForm::Third;
    for rel in d.relations() {
        let label = classify_table(rel, schema.fds(), limits)?;
        level = level.min(label.level);
        tables.extend(label.tables);
    }
    let lossless = chase_lossless(d, schema).0;
    let preserving = preservation_check(d, schema).preserved;
    if !lossless || !preserving {
        level = NormalForm::First;
    }
    Ok(NormalFormLabel { level, tables, lossless: Some(lossless), preserving: Some(preserving) })
}

/// Classifies a schema as the single-table database `{universe}`; the
/// trivial decomposition is lossless and preserving, so the flags are true.
pub fn classify_schema(schema: &Schema, limits: &Limits) -> Result<NormalFormLabel> {
    let rel = RelationSchema::derive("R", schema.universe().clone(), schema.fds(), limits)?;
    let d = Decomposition::untagged(vec![rel], schema.universe())
        .expect("single table over the universe covers it");
    classify_database(&d, schema, limits)
}
