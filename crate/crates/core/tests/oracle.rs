//! Brute-force cross-checks. Everything here recomputes results through an
//! independent path — closed-set enumeration over bitmasks — and compares
//! against the library's fixpoint/search implementations on seeded random
//! inputs.

use std::collections::BTreeSet;

use fdnf_core::closure::{attribute_closure, candidate_keys, implies, minimal_cover, project_fds, Limits};
use fdnf_core::decompose::{plan_precise_2nf, synthesize_3nf, PlanResult};
use fdnf_core::diagnose::{find_overlapping_pairs, theorem1_verdict};
use fdnf_core::gen::{arbitrary_decomposition, arbitrary_schema, chain_pair_schema, structured_two_key_schema};
use fdnf_core::nf::{
    classify_database, partial_dependency_witnesses, transitive_dependency_witnesses, NormalForm,
    PartialDependencyWitness, TransitiveDependencyWitness,
};
use fdnf_core::schema::{Attribute, AttributeSet, Fd, FdSet, RelationSchema, Schema};
use fdnf_core::verify::{chase_lossless, generate_instance, instance_join_test, preservation_check};
use fdnf_core::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A set S is closed under F when every dependency whose left side lies
/// inside S also has its right side inside S. The closure of X is the
/// intersection of all closed supersets of X — computed here by scanning
/// the full powerset, with no shared code with the library's fixpoint.
struct BitOracle {
    attrs: Vec<Attribute>,
    fds: Vec<(u64, u64)>,
    full: u64,
}

impl BitOracle {
    fn over(universe: &AttributeSet, f: &FdSet) -> BitOracle {
        let attrs: Vec<Attribute> = universe.iter().cloned().collect();
        assert!(attrs.len() <= 16, "oracle is for small universes");
        let mut o = BitOracle { full: (1u64 << attrs.len()) - 1, attrs, fds: Vec::new() };
        o.fds = f.iter().map(|fd| (o.mask(fd.lhs()), o.mask(fd.rhs()))).collect();
        o
    }

    fn new(schema: &Schema) -> BitOracle {
        BitOracle::over(schema.universe(), schema.fds())
    }

    fn mask(&self, s: &AttributeSet) -> u64 {
        s.iter()
            .map(|a| 1u64 << self.attrs.iter().position(|x| x == a).expect("attr in universe"))
            .fold(0, |m, b| m | b)
    }

    fn unmask(&self, m: u64) -> AttributeSet {
        self.attrs
            .iter()
            .enumerate()
            .filter(|(i, _)| m & (1 << i) != 0)
            .map(|(_, a)| a.clone())
            .collect()
    }

    fn is_closed(&self, s: u64) -> bool {
        self.fds.iter().all(|(l, r)| s & l != *l || s & r == *r)
    }

    fn closure(&self, x: u64) -> u64 {
        let mut inter = self.full;
        for s in 0..=self.full {
            if s & x == x && self.is_closed(s) {
                inter &= s;
            }
        }
        inter
    }

    fn entails(&self, fd: &Fd) -> bool {
        let rhs = self.mask(fd.rhs());
        self.closure(self.mask(fd.lhs())) & rhs == rhs
    }

    /// Minimal determining sets, by scanning the whole powerset.
    fn keys(&self) -> Vec<AttributeSet> {
        let determining: Vec<u64> =
            (0..=self.full).filter(|&m| self.closure(m) == self.full).collect();
        let mut keys: Vec<AttributeSet> = determining
            .iter()
            .filter(|&&m| !determining.iter().any(|&t| t != m && t & m == t))
            .map(|&m| self.unmask(m))
            .collect();
        keys.sort();
        keys
    }

    /// All closures, indexed by mask.
    fn closure_table(&self) -> Vec<u64> {
        (0..=self.full).map(|m| self.closure(m)).collect()
    }
}

fn random_fd_candidate<R: Rng>(rng: &mut R, universe: &AttributeSet) -> Fd {
    let pool: Vec<Attribute> = universe.iter().cloned().collect();
    let side = |rng: &mut R| -> AttributeSet {
        let len = rng.gen_range(1..=2.min(pool.len()));
        let mut s = AttributeSet::empty();
        while s.len() < len {
            s.insert(pool[rng.gen_range(0..pool.len())].clone());
        }
        s
    };
    Fd::new(side(rng), side(rng))
}

#[test]
fn closure_and_entailment_match_the_closed_set_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..300 {
        let s = arbitrary_schema(&mut rng, 6, 6);
        let o = BitOracle::new(&s);
        for m in 0..=o.full {
            let x = o.unmask(m);
            assert_eq!(
                attribute_closure(&x, s.fds()),
                o.unmask(o.closure(m)),
                "closure mismatch for {x} under {:?}",
                s.fds()
            );
        }
        for _ in 0..5 {
            let fd = random_fd_candidate(&mut rng, s.universe());
            assert_eq!(implies(s.fds(), &fd), o.entails(&fd), "entailment mismatch for {fd}");
        }
    }
}

#[test]
fn candidate_keys_match_the_powerset_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let limits = Limits::default();
    for _ in 0..300 {
        let s = arbitrary_schema(&mut rng, 6, 6);
        let o = BitOracle::new(&s);
        let got = candidate_keys(s.universe(), s.fds(), &limits).unwrap();
        assert_eq!(got, o.keys(), "key mismatch under {:?}", s.fds());
    }
}

#[test]
fn minimal_cover_is_equivalent_reduced_and_irredundant() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..300 {
        let s = arbitrary_schema(&mut rng, 6, 6);
        let cover = minimal_cover(s.fds());
        let o_orig = BitOracle::new(&s);
        let o_cover = BitOracle::over(s.universe(), &cover);
        for fd in cover.iter() {
            assert_eq!(fd.rhs().len(), 1, "cover right sides are single attributes");
            assert!(o_orig.entails(fd), "cover dependency {fd} not entailed by the original");
        }
        for fd in s.fds().iter() {
            assert!(o_cover.entails(fd), "original dependency {fd} not entailed by the cover");
        }
        for fd in cover.iter() {
            let reduced = cover.without(fd);
            let o_reduced = BitOracle::over(s.universe(), &reduced);
            assert!(!o_reduced.entails(fd), "cover dependency {fd} is redundant");
            if fd.lhs().len() > 1 {
                for a in fd.lhs().iter() {
                    let mut smaller = fd.lhs().clone();
                    smaller.remove(a);
                    let shrunk = Fd::new(smaller, fd.rhs().clone());
                    assert!(
                        !o_cover.entails(&shrunk),
                        "cover keeps an unnecessary determinant attribute in {fd}"
                    );
                }
            }
        }
    }
}

#[test]
fn projection_matches_scoped_closures_on_every_subset() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let limits = Limits::default();
    for _ in 0..200 {
        let s = arbitrary_schema(&mut rng, 6, 6);
        let o = BitOracle::new(&s);
        let pool: Vec<Attribute> = s.universe().iter().cloned().collect();
        for _ in 0..3 {
            let scope_len = rng.gen_range(1..=pool.len());
            let mut scope = AttributeSet::empty();
            while scope.len() < scope_len {
                scope.insert(pool[rng.gen_range(0..pool.len())].clone());
            }
            let projected = project_fds(s.fds(), &scope, &limits).unwrap();
            let op = BitOracle::over(&scope, &projected.fds);
            for m in 1..=op.full {
                let x = op.unmask(m);
                let scoped_direct = o.unmask(o.closure(o.mask(&x))).intersection(&scope);
                let scoped_projected = op.unmask(op.closure(m));
                assert_eq!(
                    scoped_projected, scoped_direct,
                    "projection differs from the scoped closure on {x} within {scope}"
                );
            }
        }
    }
}

#[test]
fn witnesses_match_a_full_powerset_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(113);
    let limits = Limits::default();
    for _ in 0..150 {
        let s = arbitrary_schema(&mut rng, 5, 6);
        let o = BitOracle::new(&s);
        let cl = o.closure_table();
        let rel = RelationSchema::derive("R", s.universe().clone(), s.fds(), &limits).unwrap();

        let keys = o.keys();
        let mut prime = AttributeSet::empty();
        for k in &keys {
            prime = prime.union(k);
        }

        let mut expected_partial = Vec::new();
        for key in &keys {
            let key_mask = o.mask(key);
            let mut part = (key_mask - 1) & key_mask;
            while part != 0 {
                for a in s.universe().iter() {
                    let bit = o.mask(&AttributeSet::singleton(a.clone()));
                    if prime.contains(a) || part & bit != 0 {
                        continue;
                    }
                    if cl[part as usize] & bit != 0 {
                        expected_partial.push(PartialDependencyWitness {
                            key: key.clone(),
                            part: o.unmask(part),
                            attribute: a.clone(),
                        });
                    }
                }
                part = (part - 1) & key_mask;
            }
        }
        expected_partial.sort();
        expected_partial.dedup();
        assert_eq!(
            partial_dependency_witnesses(&rel, s.fds(), &limits).unwrap(),
            expected_partial,
            "partial-dependency witnesses diverge under {:?}",
            s.fds()
        );

        let mut expected_transitive = Vec::new();
        for alpha in &keys {
            let alpha_mask = o.mask(alpha);
            for beta in 1..=o.full {
                if beta & alpha_mask == beta || cl[alpha_mask as usize] & beta != beta {
                    continue;
                }
                if cl[beta as usize] & alpha_mask == alpha_mask {
                    continue;
                }
                for a in s.universe().iter() {
                    let bit = o.mask(&AttributeSet::singleton(a.clone()));
                    if (alpha_mask | beta) & bit != 0 || cl[beta as usize] & bit == 0 {
                        continue;
                    }
                    if prime.contains(a) {
                        continue;
                    }
                    expected_transitive.push(TransitiveDependencyWitness {
                        alpha: alpha.clone(),
                        beta: o.unmask(beta),
                        attribute: a.clone(),
                    });
                }
            }
        }
        expected_transitive.sort();
        expected_transitive.dedup();
        assert_eq!(
            transitive_dependency_witnesses(&rel, s.fds(), &limits).unwrap(),
            expected_transitive,
            "transitive-dependency witnesses diverge under {:?}",
            s.fds()
        );
    }
}

/// Reachable chain states from `origin`: every (used, last) pair where
/// `used` is the union of a chain's nodes and `last` its final node, for
/// chains of at least two nodes over the FULL powerset vocabulary.
fn powerset_chain_states(cl: &[u64], origin: u64) -> Vec<(u64, u64)> {
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut stack = vec![(origin, origin)];
    let mut out: BTreeSet<(u64, u64)> = BTreeSet::new();
    while let Some((used, last)) = stack.pop() {
        let reach = cl[last as usize] & !used;
        let mut next = reach;
        while next != 0 {
            let state = (used | next, next);
            out.insert(state);
            if seen.insert(state) {
                stack.push(state);
            }
            next = (next - 1) & reach;
        }
    }
    out.into_iter().collect()
}

fn powerset_pair_exists(o: &BitOracle, comp1: u64, comp2: u64) -> bool {
    let cl = o.closure_table();
    let states_a = powerset_chain_states(&cl, comp1);
    let states_b = powerset_chain_states(&cl, comp2);
    for &(ua, la) in &states_a {
        for &(ub, lb) in &states_b {
            if ua & ub != 0 {
                continue;
            }
            let meeting = la | lb;
            let candidates = cl[meeting as usize] & !(ua | ub);
            let mut g = candidates;
            while g != 0 {
                let bit = g & g.wrapping_neg();
                let mut fully = true;
                let mut delta = (meeting - 1) & meeting;
                while delta != 0 {
                    if cl[delta as usize] & bit != 0 {
                        fully = false;
                        break;
                    }
                    delta = (delta - 1) & meeting;
                }
                if fully {
                    return true;
                }
                g &= g - 1;
            }
        }
    }
    false
}

#[test]
fn chain_pair_existence_matches_the_powerset_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(127);
    let limits = Limits::default();
    let mut qualifying = 0usize;
    let mut attempts = 0usize;
    while qualifying < 60 {
        attempts += 1;
        assert!(attempts <= 2000, "only {qualifying} schemas qualified; check generators");
        // Mix the unconstrained family with the two-key families, skipping
        // whatever fails the shape requirements or is too big to brute-force.
        let s = match attempts % 4 {
            0 => structured_two_key_schema(&mut rng),
            1 => chain_pair_schema(&mut rng),
            _ => arbitrary_schema(&mut rng, 6, 6),
        };
        if s.universe().len() > 6 {
            continue;
        }
        let keys = candidate_keys(s.universe(), s.fds(), &limits).unwrap();
        if keys.len() != 1 || keys[0].len() != 2 {
            continue;
        }
        qualifying += 1;
        let o = BitOracle::new(&s);
        let mut comps = keys[0].iter();
        let c1 = o.mask(&AttributeSet::singleton(comps.next().unwrap().clone()));
        let c2 = o.mask(&AttributeSet::singleton(comps.next().unwrap().clone()));
        let expected = powerset_pair_exists(&o, c1, c2);
        let got = !find_overlapping_pairs(&s, &limits).unwrap().is_empty();
        assert_eq!(got, expected, "pair existence diverges under {:?}", s.fds());
    }
}

#[test]
fn reported_chain_pairs_satisfy_every_definition_clause() {
    let mut rng = ChaCha8Rng::seed_from_u64(131);
    let limits = Limits::default();
    let mut schemas: Vec<Schema> = (0..50).map(|_| chain_pair_schema(&mut rng)).collect();
    let attr = |n: &str| Attribute::new(n).unwrap();
    let set = |names: &[&str]| names.iter().map(|n| attr(n)).collect::<AttributeSet>();
    schemas.push(
        Schema::new(
            set(&["A1", "A2", "A3", "A4", "A5"]),
            [
                Fd::new(set(&["A1"]), set(&["A3"])),
                Fd::new(set(&["A2"]), set(&["A4"])),
                Fd::new(set(&["A3", "A4"]), set(&["A5"])),
            ]
            .into_iter()
            .collect(),
        )
        .unwrap(),
    );
    for s in &schemas {
        let keys = candidate_keys(s.universe(), s.fds(), &limits).unwrap();
        let key = &keys[0];
        for pair in find_overlapping_pairs(s, &limits).unwrap() {
            let mut origins = pair.chain_a.nodes[0].union(&pair.chain_b.nodes[0]);
            assert_eq!(&origins, key, "chains must start at the two key components");
            for chain in [&pair.chain_a, &pair.chain_b] {
                assert!(chain.nodes.len() >= 2);
                for (i, link) in chain.links.iter().enumerate() {
                    assert_eq!(link.lhs(), &chain.nodes[i]);
                    assert_eq!(link.rhs(), &chain.nodes[i + 1]);
                    assert!(implies(s.fds(), link), "chain link {link} not entailed");
                }
                for i in 0..chain.nodes.len() {
                    for j in i + 1..chain.nodes.len() {
                        assert!(chain.nodes[i].is_disjoint(&chain.nodes[j]));
                    }
                }
            }
            assert!(pair.chain_a.attrs().is_disjoint(&pair.chain_b.attrs()));
            assert_eq!(
                pair.meeting.lhs(),
                &pair.chain_a.last().union(pair.chain_b.last()),
                "meeting determinant must be the two chain ends"
            );
            assert!(!pair.gamma.is_empty());
            assert_eq!(pair.meeting.rhs(), &pair.gamma);
            assert!(implies(s.fds(), &pair.meeting), "meeting {} not entailed", pair.meeting);
            origins = pair.chain_a.attrs().union(&pair.chain_b.attrs());
            assert!(pair.gamma.is_disjoint(&origins), "gamma overlaps the chains");
            let lhs_attrs: Vec<Attribute> = pair.meeting.lhs().iter().cloned().collect();
            for delta_mask in 1..(1u64 << lhs_attrs.len()) - 1 {
                let delta: AttributeSet = lhs_attrs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| delta_mask & (1 << i) != 0)
                    .map(|(_, a)| a.clone())
                    .collect();
                for g in pair.gamma.iter() {
                    let partial = Fd::new(delta.clone(), AttributeSet::singleton(g.clone()));
                    assert!(
                        !implies(s.fds(), &partial),
                        "{partial} holds, so the meeting is not a full joint dependence"
                    );
                }
            }
        }
    }
}

#[test]
fn synthesis_always_lands_in_third_normal_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(137);
    let limits = Limits::default();
    for _ in 0..1000 {
        let s = arbitrary_schema(&mut rng, 7, 8);
        let d = synthesize_3nf(&s, &limits).unwrap();
        let label = classify_database(&d, &s, &limits).unwrap();
        assert_eq!(label.level, NormalForm::Third, "synthesis left {:?} below 3NF", s.fds());
        assert_eq!(label.lossless, Some(true));
        assert_eq!(label.preserving, Some(true));
    }
}

#[test]
fn preservation_agrees_with_materialized_projections() {
    let mut rng = ChaCha8Rng::seed_from_u64(139);
    let limits = Limits::default();
    for _ in 0..200 {
        let s = arbitrary_schema(&mut rng, 6, 6);
        let d = arbitrary_decomposition(&mut rng, &s, &limits).unwrap();
        let mut materialized = FdSet::empty();
        for rel in d.relations() {
            for fd in project_fds(s.fds(), rel.attrs(), &limits).unwrap().fds.iter() {
                materialized.insert(fd.clone());
            }
        }
        let o = BitOracle::over(s.universe(), &materialized);
        let expected = s.fds().iter().all(|fd| o.entails(fd));
        let report = preservation_check(&d, &s);
        assert_eq!(report.preserved, expected, "preservation verdict diverges on {:?}", s.fds());
        for lost in &report.lost {
            assert!(!o.entails(lost), "reported-lost {lost} is actually recoverable");
        }
        assert_eq!(report.preserved, report.lost.is_empty());
    }
}

#[test]
fn chase_soundness_holds_against_generated_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(149);
    let limits = Limits::default();
    let mut exercised = 0usize;
    for _ in 0..200 {
        let s = arbitrary_schema(&mut rng, 5, 5);
        let d = arbitrary_decomposition(&mut rng, &s, &limits).unwrap();
        let (lossless, _) = chase_lossless(&d, &s);
        for seed in 0..3u64 {
            let inst = match generate_instance(&s, 3, seed, &limits) {
                Ok(inst) => inst,
                Err(Error::CyclicCover { .. }) => break,
                Err(e) => panic!("unexpected error: {e}"),
            };
            exercised += 1;
            let join = instance_join_test(&inst, &d);
            if lossless {
                assert_eq!(
                    join.spurious_count, 0,
                    "chase said lossless but the join invented tuples for {:?}",
                    s.fds()
                );
            }
            if join.spurious_count > 0 {
                assert!(!lossless);
            }
        }
    }
    assert!(exercised >= 100, "only {exercised} instances exercised");
}

#[test]
fn verdicts_survive_attribute_renaming() {
    let mut rng = ChaCha8Rng::seed_from_u64(151);
    let limits = Limits::default();
    let mut schemas: Vec<Schema> = Vec::new();
    for _ in 0..40 {
        schemas.push(chain_pair_schema(&mut rng));
        schemas.push(structured_two_key_schema(&mut rng));
    }
    for s in &schemas {
        let originals: Vec<Attribute> = s.universe().iter().cloned().collect();
        let mut fresh: Vec<Attribute> =
            (0..originals.len()).map(|i| Attribute::new(&format!("n{i}")).unwrap()).collect();
        fresh.shuffle(&mut rng);
        let rename = |a: &Attribute| -> Attribute {
            fresh[originals.iter().position(|x| x == a).unwrap()].clone()
        };
        let rename_set =
            |xs: &AttributeSet| -> AttributeSet { xs.iter().map(&rename).collect() };
        let renamed_fds: FdSet = s
            .fds()
            .iter()
            .map(|fd| Fd::new(rename_set(fd.lhs()), rename_set(fd.rhs())))
            .collect();
        let renamed = Schema::new(rename_set(s.universe()), renamed_fds).unwrap();

        let a = theorem1_verdict(s, &limits).unwrap();
        let b = theorem1_verdict(&renamed, &limits).unwrap();
        assert_eq!(a.impossible, b.impossible);
        assert_eq!(a.witness.is_some(), b.witness.is_some());

        let pa = plan_precise_2nf(s, &limits).unwrap();
        let pb = plan_precise_2nf(&renamed, &limits).unwrap();
        assert_eq!(
            matches!(pa.result, PlanResult::Decomposed { .. }),
            matches!(pb.result, PlanResult::Decomposed { .. })
        );
    }
}
