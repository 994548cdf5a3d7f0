//! Diagnosis: chains of transitive dependencies growing out of the two key
//! components, and the impossibility verdict when two such chains meet.
//!
//! A chain is a sequence of pairwise-disjoint attribute sets, each
//! determining the next. When one chain from each key component meets in a
//! joint dependency — the two chain ends together fully determining some
//! fresh attributes — no decomposition built purely from partial-dependency
//! splits can keep that joint dependency: storing the met attributes with
//! the key loses it, and splitting them out is a transitivity-based step.

use serde::Serialize;

use crate::closure::{attribute_closure, candidate_keys, minimal_cover, nonempty_subsets, Limits};
use crate::error::{Error, Result};
use crate::schema::{Attribute, AttributeSet, Fd, FdSet, Schema};

/// A chain `n₁ → n₂ → … → nₖ` of pairwise-disjoint attribute sets, each
/// step entailed by the schema's dependencies. At least two nodes.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub struct TransitiveChain {
    pub nodes: Vec<AttributeSet>,
    /// The entailed dependency justifying each step; `links[i]` connects
    /// `nodes[i]` to `nodes[i+1]`.
    pub links: Vec<Fd>,
}

impl TransitiveChain {
    fn from_nodes(nodes: Vec<AttributeSet>) -> TransitiveChain {
        let links = nodes
            .windows(2)
            .map(|w| Fd::new(w[0].clone(), w[1].clone()))
            .collect();
        TransitiveChain { nodes, links }
    }

    /// All attributes mentioned by any node.
    pub fn attrs(&self) -> AttributeSet {
        let mut out = AttributeSet::empty();
        for n in &self.nodes {
            out = out.union(n);
        }
        out
    }

    pub fn last(&self) -> &AttributeSet {
        self.nodes.last().expect("chains have at least one node")
    }
}

impl std::fmt::Display for TransitiveChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, " → ")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Two chains, one per key component, meeting in a joint dependency on
/// some fresh attributes `gamma`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub struct ChainPair {
    /// Chain growing from the lexicographically smaller key component.
    pub chain_a: TransitiveChain,
    pub chain_b: TransitiveChain,
    /// The joint dependency: both chain ends together → gamma.
    pub meeting: Fd,
    /// Attributes fully dependent on the two chain ends together: no
    /// proper non-empty subset of the ends determines any of them.
    pub gamma: AttributeSet,
}

/// Node vocabulary for chain building: every left-hand side of the minimal
/// cover plus every single attribute.
fn chain_vocabulary(schema: &Schema) -> Vec<AttributeSet> {
    let mut vocab: Vec<AttributeSet> = schema
        .universe()
        .iter()
        .map(|a| AttributeSet::singleton(a.clone()))
        .collect();
    for fd in minimal_cover(schema.fds()).iter() {
        if !vocab.contains(fd.lhs()) {
            vocab.push(fd.lhs().clone());
        }
    }
    vocab.sort();
    vocab
}

/// Depth-first enumeration of every chain from `origin` (including
/// non-maximal ones), marking which are *maximal* (extendable no further).
/// Chains are capped by `limits.chain_budget` to keep dense inputs from
/// exploding.
fn all_chains_from(
    origin: &AttributeSet,
    vocab: &[AttributeSet],
    f: &FdSet,
    budget: usize,
) -> Result<Vec<(TransitiveChain, bool)>> {
    fn recurse(
        nodes: &mut Vec<AttributeSet>,
        used: &AttributeSet,
        vocab: &[AttributeSet],
        f: &FdSet,
        budget: usize,
        out: &mut Vec<(TransitiveChain, bool)>,
    ) -> Result<()> {
        let reach = attribute_closure(nodes.last().unwrap(), f);
        let mut extended = false;
        for v in vocab {
            if v.is_disjoint(used) && v.is_subset(&reach) {
                extended = true;
                nodes.push(v.clone());
                let used = used.union(v);
                recurse(nodes, &used, vocab, f, budget, out)?;
                nodes.pop();
            }
        }
        if nodes.len() >= 2 {
            if out.len() >= budget {
                return Err(Error::SizeLimitExceeded {
                    operation: "chain enumeration",
                    size: out.len() + 1,
                    limit: budget,
                });
            }
            out.push((TransitiveChain::from_nodes(nodes.clone()), !extended));
        }
        Ok(())
    }

    let mut out = Vec::new();
    let mut nodes = vec![origin.clone()];
    recurse(&mut nodes, origin, vocab, f, budget, &mut out)?;
    out.sort();
    Ok(out)
}

/// Maximal chains from `origin`, with chains whose attributes are a strict
/// subset of another listed chain's attributes pruned away.
pub fn find_chains(
    schema: &Schema,
    origin: &AttributeSet,
    limits: &Limits,
) -> Result<Vec<TransitiveChain>> {
    if schema.universe().len() > limits.key_search_attrs {
        return Err(Error::SizeLimitExceeded {
            operation: "chain search",
            size: schema.universe().len(),
            limit: limits.key_search_attrs,
        });
    }
    let vocab = chain_vocabulary(schema);
    let maximal: Vec<TransitiveChain> = all_chains_from(origin, &vocab, schema.fds(), limits.chain_budget)?
        .into_iter()
        .filter(|(_, is_max)| *is_max)
        .map(|(c, _)| c)
        .collect();
    let kept: Vec<TransitiveChain> = maximal
        .iter()
        .filter(|c| {
            !maximal
                .iter()
                .any(|other| c.attrs().is_proper_subset(&other.attrs()))
        })
        .cloned()
        .collect();
    Ok(kept)
}

/// All pairs of chains, one per key component, that are attribute-disjoint
/// and meet in a joint dependency. Requires the single two-part key shape.
pub fn find_overlapping_pairs(schema: &Schema, limits: &Limits) -> Result<Vec<ChainPair>> {
    let keys = candidate_keys(schema.universe(), schema.fds(), limits)?;
    if keys.len() != 1 {
        return Err(crate::error::AssumptionViolation::MultipleCandidateKeys(keys).into());
    }
    let key = &keys[0];
    if key.len() != 2 {
        return Err(crate::error::AssumptionViolation::KeyWidth { key: key.clone() }.into());
    }
    let mut comps = key.iter().cloned();
    let comp1 = AttributeSet::singleton(comps.next().unwrap());
    let comp2 = AttributeSet::singleton(comps.next().unwrap());

    let vocab = chain_vocabulary(schema);
    let chains_a = all_chains_from(&comp1, &vocab, schema.fds(), limits.chain_budget)?;
    let chains_b = all_chains_from(&comp2, &vocab, schema.fds(), limits.chain_budget)?;

    let mut pairs = Vec::new();
    for (a, _) in &chains_a {
        for (b, _) in &chains_b {
            if !a.attrs().is_disjoint(&b.attrs()) {
                continue;
            }
            let meeting_lhs = a.last().union(b.last());
            let reach = attribute_closure(&meeting_lhs, schema.fds());
            let chain_attrs = a.attrs().union(&b.attrs());

            // Reaches of every proper non-empty part of the meeting set.
            let lhs_attrs: Vec<Attribute> = meeting_lhs.iter().cloned().collect();
            let partial_reaches: Vec<AttributeSet> = nonempty_subsets(&lhs_attrs)
                .into_iter()
                .filter(|d| d.len() < meeting_lhs.len())
                .map(|d| attribute_closure(&d, schema.fds()))
                .collect();

            let gamma: AttributeSet = reach
                .iter()
                .filter(|g| {
                    !chain_attrs.contains(g)
                        && !partial_reaches.iter().any(|r| r.contains(g))
                })
                .cloned()
                .collect();
            if gamma.is_empty() {
                continue;
            }
            pairs.push(ChainPair {
                chain_a: a.clone(),
                chain_b: b.clone(),
                meeting: Fd::new(meeting_lhs, gamma.clone()),
                gamma,
            });
        }
    }
    pairs.sort();
    Ok(pairs)
}

/// The precondition record and the verdict: `impossible` is `None` when
/// the schema falls outside the single two-part-key shape, otherwise
/// `Some(true)` exactly when a blocking chain pair exists.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Theorem1Verdict {
    pub assumptions: AssumptionCheck,
    pub impossible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ChainPair>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct AssumptionCheck {
    /// The analysis always works on a single source schema.
    pub single_source_table: bool,
    pub single_candidate_key: bool,
    pub two_component_key: bool,
    pub candidate_keys: Vec<AttributeSet>,
}

/// Checks the preconditions and, when they hold, decides whether a
/// blocking chain pair makes a pure-2NF decomposition impossible.
pub fn theorem1_verdict(schema: &Schema, limits: &Limits) -> Result<Theorem1Verdict> {
    let keys = candidate_keys(schema.universe(), schema.fds(), limits)?;
    let single = keys.len() == 1;
    let two_wide = single && keys[0].len() == 2;
    let assumptions = AssumptionCheck {
        single_source_table: true,
        single_candidate_key: single,
        two_component_key: two_wide,
        candidate_keys: keys,
    };
    if !two_wide {
        return Ok(Theorem1Verdict { assumptions, impossible: None, witness: None });
    }
    let pairs = find_overlapping_pairs(schema, limits)?;
    Ok(Theorem1Verdict {
        assumptions,
        impossible: Some(!pairs.is_empty()),
        witness: pairs.into_iter().next(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn attr(name: &str) -> Attribute {
        Attribute::new(name).unwrap()
    }

    fn set(names: &[&str]) -> AttributeSet {
        names.iter().map(|n| attr(n)).collect()
    }

    fn fds(pairs: &[(&[&str], &[&str])]) -> FdSet {
        pairs.iter().map(|(l, r)| Fd::new(set(l), set(r))).collect()
    }

    fn schema(attrs: &[&str], pairs: &[(&[&str], &[&str])]) -> Schema {
        Schema::new(set(attrs), fds(pairs)).unwrap()
    }

    fn chain7() -> Schema {
        schema(
            &["A1", "A2", "A3", "A4", "A5", "A6", "A7"],
            &[
                (&["A1", "A2"], &["A7"]),
                (&["A1"], &["A3"]),
                (&["A2"], &["A4"]),
                (&["A4"], &["A5"]),
                (&["A5"], &["A6"]),
            ],
        )
    }

    fn meeting5() -> Schema {
        schema(
            &["A1", "A2", "A3", "A4", "A5"],
            &[(&["A1"], &["A3"]), (&["A2"], &["A4"]), (&["A3", "A4"], &["A5"])],
        )
    }

    fn students() -> Schema {
        schema(
            &["sid", "cid", "st", "cr", "rd"],
            &[(&["sid"], &["st"]), (&["cid"], &["cr"]), (&["st", "cr"], &["rd"])],
        )
    }

    #[test]
    fn the_long_chain_is_found_whole() {
        let chains = find_chains(&chain7(), &set(&["A2"]), &Limits::default()).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].nodes, vec![set(&["A2"]), set(&["A4"]), set(&["A5"]), set(&["A6"])]);
        assert_eq!(chains[0].to_string(), "A2 → A4 → A5 → A6");
        assert_eq!(
            chains[0].links,
            vec![
                Fd::new(set(&["A2"]), set(&["A4"])),
                Fd::new(set(&["A4"]), set(&["A5"])),
                Fd::new(set(&["A5"]), set(&["A6"])),
            ]
        );
    }

    #[test]
    fn short_side_chains_are_single_steps() {
        let chains = find_chains(&chain7(), &set(&["A1"]), &Limits::default()).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].nodes, vec![set(&["A1"]), set(&["A3"])]);
    }

    #[test]
    fn no_dependencies_means_no_chains() {
        let s = schema(&["A1", "A2"], &[]);
        assert!(find_chains(&s, &set(&["A1"]), &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn composite_nodes_appear_in_chains() {
        let chains = find_chains(&students(), &set(&["cid", "sid"]), &Limits::default()).unwrap();
        // {sid, cid} → {st, cr} → rd survives pruning; the single-attribute
        // detours are strict sub-chains by attribute content.
        assert!(chains
            .iter()
            .any(|c| c.nodes.contains(&set(&["cr", "st"])) && c.attrs().contains(&attr("rd"))));
    }

    #[test]
    fn chains_meeting_in_a_fresh_attribute_are_found() {
        let pairs = find_overlapping_pairs(&meeting5(), &Limits::default()).unwrap();
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!(p.chain_a.nodes, vec![set(&["A1"]), set(&["A3"])]);
        assert_eq!(p.chain_b.nodes, vec![set(&["A2"]), set(&["A4"])]);
        assert_eq!(p.meeting, Fd::new(set(&["A3", "A4"]), set(&["A5"])));
        assert_eq!(p.gamma, set(&["A5"]));
    }

    #[test]
    fn the_student_chains_meet_in_the_room_assignment() {
        let pairs = find_overlapping_pairs(&students(), &Limits::default()).unwrap();
        assert_eq!(pairs.len(), 1);
        let p = &pairs[0];
        assert_eq!(p.chain_a.nodes, vec![set(&["cid"]), set(&["cr"])]);
        assert_eq!(p.chain_b.nodes, vec![set(&["sid"]), set(&["st"])]);
        assert_eq!(p.meeting, Fd::new(set(&["cr", "st"]), set(&["rd"])));
    }

    #[test]
    fn independent_chains_never_pair_up() {
        assert!(find_overlapping_pairs(&chain7(), &Limits::default()).unwrap().is_empty());
        let keyres5 = schema(
            &["A1", "A2", "A3", "A4", "A5"],
            &[(&["A1", "A2"], &["A5"]), (&["A1"], &["A3"]), (&["A2"], &["A4"])],
        );
        assert!(find_overlapping_pairs(&keyres5, &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn partially_determined_meetings_do_not_count() {
        // A5 already hangs off A3 alone, so {A3, A4} → A5 is not a full
        // joint dependence.
        let s = schema(
            &["A1", "A2", "A3", "A4", "A5"],
            &[(&["A1"], &["A3"]), (&["A2"], &["A4"]), (&["A3"], &["A5"])],
        );
        assert!(find_overlapping_pairs(&s, &Limits::default()).unwrap().is_empty());
    }

    #[test]
    fn verdict_is_impossible_exactly_when_chains_meet() {
        let v = theorem1_verdict(&meeting5(), &Limits::default()).unwrap();
        assert_eq!(v.impossible, Some(true));
        assert!(v.witness.is_some());
        assert!(v.assumptions.single_candidate_key && v.assumptions.two_component_key);

        let v = theorem1_verdict(&students(), &Limits::default()).unwrap();
        assert_eq!(v.impossible, Some(true));

        let v = theorem1_verdict(&chain7(), &Limits::default()).unwrap();
        assert_eq!(v.impossible, Some(false));
        assert!(v.witness.is_none());
    }

    #[test]
    fn verdict_reports_unmet_assumptions_instead_of_guessing() {
        let s = schema(&["A1", "A2", "A3"], &[(&["A1"], &["A2"]), (&["A1"], &["A3"])]);
        let v = theorem1_verdict(&s, &Limits::default()).unwrap();
        assert_eq!(v.impossible, None);
        assert!(v.assumptions.single_candidate_key);
        assert!(!v.assumptions.two_component_key);
        assert_eq!(v.assumptions.candidate_keys, vec![set(&["A1"])]);
    }

    #[test]
    fn verdict_is_stable_under_attribute_renaming() {
        let original = meeting5();
        let renamed = schema(
            &["x", "y", "p", "q", "z"],
            &[(&["x"], &["p"]), (&["y"], &["q"]), (&["p", "q"], &["z"])],
        );
        let a = theorem1_verdict(&original, &Limits::default()).unwrap();
        let b = theorem1_verdict(&renamed, &Limits::default()).unwrap();
        assert_eq!(a.impossible, b.impossible);
    }
}
