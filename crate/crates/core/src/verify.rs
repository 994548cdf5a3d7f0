//! Decomposition verification: dependency preservation, lossless-join
//! checking (binary rule and chase), and tuple-level evidence via generated
//! instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::closure::{attribute_closure, minimal_cover, Limits};
use crate::error::{Error, Result};
use crate::schema::{Attribute, AttributeSet, Decomposition, Fd, FdSet, RelationSchema, Schema};

/// Outcome of a dependency-preservation check.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct PreservationReport {
    pub preserved: bool,
    /// Cover dependencies not recoverable from the projections.
    pub lost: Vec<Fd>,
}

/// Is every dependency recoverable from the decomposition's projections?
///
/// Works without materializing any projection: for each cover dependency
/// `α → β`, grow `Z` from `α` by repeatedly adding, per relation,
/// `closure(Z ∩ Rᵢ) ∩ Rᵢ` until fixpoint; the dependency is preserved iff
/// `β ⊆ Z`.
pub fn preservation_check(d: &Decomposition, schema: &Schema) -> PreservationReport {
    let cover = minimal_cover(schema.fds());
    let mut lost = Vec::new();
    for fd in cover.iter() {
        let mut z = fd.lhs().clone();
        loop {
            let mut grew = false;
            for rel in d.relations() {
                let inside = z.intersection(rel.attrs());
                if inside.is_empty() {
                    continue;
                }
                let gain = attribute_closure(&inside, schema.fds()).intersection(rel.attrs());
                if !gain.is_subset(&z) {
                    z = z.union(&gain);
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        if !fd.rhs().is_subset(&z) {
            lost.push(fd.clone());
        }
    }
    PreservationReport { preserved: lost.is_empty(), lost }
}

/// The two-relation lossless-join criterion: the shared attributes must
/// determine one side or the other.
pub fn binary_lossless(r1: &RelationSchema, r2: &RelationSchema, f: &FdSet) -> bool {
    let shared = r1.attrs().intersection(r2.attrs());
    let reach = attribute_closure(&shared, f);
    reach.is_superset(r1.attrs()) || reach.is_superset(r2.attrs())
}

/// One value in a chase tableau. Symbols live per column: `Distinguished`
/// stands for that column's goal value, `Subscript(i)` for the placeholder
/// row `i` started with.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Symbol {
    Distinguished,
    Subscript(u32),
}

/// One equating step of the chase: rows `row_a` and `row_b` agreed on the
/// left side of `fd`, so the listed substitutions were applied (each one
/// column-wide).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ChaseStep {
    pub fd: Fd,
    pub row_a: usize,
    pub row_b: usize,
    pub substitutions: Vec<Substitution>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Substitution {
    pub column: Attribute,
    pub from: Symbol,
    pub to: Symbol,
}

/// A finished chase: the starting tableau, the trace that transformed it,
/// and the final rows. Replaying `trace` over `initial` yields `rows`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct ChaseTableau {
    pub columns: Vec<Attribute>,
    pub initial: Vec<Vec<Symbol>>,
    pub rows: Vec<Vec<Symbol>>,
    pub trace: Vec<ChaseStep>,
    /// Index of an all-distinguished row, when one exists.
    pub lossless_row: Option<usize>,
}

impl ChaseTableau {
    /// Re-applies the trace to the initial tableau; true iff it reproduces
    /// the final rows.
    pub fn replay(&self) -> bool {
        let mut rows = self.initial.clone();
        for step in &self.trace {
            for sub in &step.substitutions {
                let Some(c) = self.columns.iter().position(|a| a == &sub.column) else {
                    return false;
                };
                for row in rows.iter_mut() {
                    if row[c] == sub.from {
                        row[c] = sub.to;
                    }
                }
            }
        }
        rows == self.rows
    }
}

/// Multiway lossless-join test by chasing a tableau with one row per
/// relation. Lossless iff some row becomes all-distinguished.
pub fn chase_lossless(d: &Decomposition, schema: &Schema) -> (bool, ChaseTableau) {
    let columns: Vec<Attribute> = schema.universe().iter().cloned().collect();
    let initial: Vec<Vec<Symbol>> = d
        .relations()
        .iter()
        .enumerate()
        .map(|(i, rel)| {
            columns
                .iter()
                .map(|a| {
                    if rel.attrs().contains(a) {
                        Symbol::Distinguished
                    } else {
                        Symbol::Subscript(i as u32)
                    }
                })
                .collect()
        })
        .collect();

    let mut rows = initial.clone();
    let mut trace = Vec::new();
    let col_of = |a: &Attribute| columns.iter().position(|c| c == a).unwrap();
    loop {
        let mut changed = false;
        for fd in schema.fds().iter() {
            let lhs_cols: Vec<usize> = fd.lhs().iter().map(col_of).collect();
            let rhs_cols: Vec<usize> = fd.rhs().iter().map(col_of).collect();
            for i in 0..rows.len() {
                for j in i + 1..rows.len() {
                    if lhs_cols.iter().any(|&c| rows[i][c] != rows[j][c]) {
                        continue;
                    }
                    let mut substitutions = Vec::new();
                    for &c in &rhs_cols {
                        let (x, y) = (rows[i][c], rows[j][c]);
                        if x == y {
                            continue;
                        }
                        let (to, from) = if x < y { (x, y) } else { (y, x) };
                        for row in rows.iter_mut() {
                            if row[c] == from {
                                row[c] = to;
                            }
                        }
                        substitutions.push(Substitution { column: columns[c].clone(), from, to });
                    }
                    if !substitutions.is_empty() {
                        trace.push(ChaseStep { fd: fd.clone(), row_a: i, row_b: j, substitutions });
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let lossless_row = rows
        .iter()
        .position(|row| row.iter().all(|s| *s == Symbol::Distinguished));
    (
        lossless_row.is_some(),
        ChaseTableau { columns, initial, rows, trace, lossless_row },
    )
}

/// A tuple maps attributes to small integer values.
pub type Tuple = BTreeMap<Attribute, u64>;

/// A concrete instance of one relation schema.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct RelationInstance {
    pub relation: RelationSchema,
    pub tuples: BTreeSet<Tuple>,
}

impl RelationInstance {
    /// Pairwise scan: no two tuples agree on a left side yet differ on the
    /// right side.
    pub fn satisfies(&self, f: &FdSet) -> bool {
        let tuples: Vec<&Tuple> = self.tuples.iter().collect();
        for fd in f.iter() {
            if !fd.attrs().is_subset(self.relation.attrs()) {
                continue;
            }
            for (n, s) in tuples.iter().enumerate() {
                for t in &tuples[n + 1..] {
                    let agree_lhs = fd.lhs().iter().all(|a| s.get(a) == t.get(a));
                    if agree_lhs && fd.rhs().iter().any(|a| s.get(a) != t.get(a)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Projection onto a sub-scope, duplicates collapsed.
    pub fn project(&self, attrs: &AttributeSet) -> BTreeSet<Tuple> {
        self.tuples
            .iter()
            .map(|t| {
                t.iter()
                    .filter(|(a, _)| attrs.contains(a))
                    .map(|(a, v)| (a.clone(), *v))
                    .collect()
            })
            .collect()
    }
}

// Platform-stable mixing so generated instances are reproducible everywhere.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix(h: u64, v: u64) -> u64 {
    splitmix(h ^ splitmix(v))
}

fn mix_name(h: u64, a: &Attribute) -> u64 {
    a.name().bytes().fold(mix(h, 0x6e61_6d65), |acc, b| mix(acc, b as u64))
}

/// Generates a seeded instance over the whole universe with `n_keys`
/// distinct source tuples, satisfying every dependency by construction:
/// source attributes (never determined by anything) get sampled values,
/// every other attribute is a function of its determinants.
///
/// Needs an acyclic minimal cover; otherwise refuses with `CyclicCover`.
pub fn generate_instance(
    schema: &Schema,
    n_keys: usize,
    seed: u64,
    limits: &Limits,
) -> Result<RelationInstance> {
    assert!(n_keys >= 1, "an instance needs at least one tuple");
    let cover = minimal_cover(schema.fds());

    // Determinant graph: lhs attribute → rhs attribute, per cover dependency.
    let mut rdeps: BTreeMap<Attribute, BTreeSet<Attribute>> = BTreeMap::new();
    for a in schema.universe().iter() {
        rdeps.insert(a.clone(), BTreeSet::new());
    }
    for fd in cover.iter() {
        let target = fd.rhs().iter().next().unwrap();
        rdeps.get_mut(target).unwrap().extend(fd.lhs().iter().cloned());
    }

    // Topological order (Kahn), canonical tie-break via BTreeMap iteration.
    let mut order: Vec<Attribute> = Vec::new();
    let mut pending = rdeps.clone();
    while !pending.is_empty() {
        let ready: Vec<Attribute> = pending
            .iter()
            .filter(|(_, deps)| deps.iter().all(|d| order.contains(d)))
            .map(|(a, _)| a.clone())
            .collect();
        if ready.is_empty() {
            return Err(Error::CyclicCover { involved: pending.keys().cloned().collect() });
        }
        for a in ready {
            pending.remove(&a);
            order.push(a);
        }
    }

    let sources: Vec<Attribute> = order
        .iter()
        .filter(|a| rdeps[a].is_empty())
        .cloned()
        .collect();
    let determined: Vec<Attribute> = order
        .iter()
        .filter(|a| !rdeps[a].is_empty())
        .cloned()
        .collect();

    // Small domains make column collisions (and hence join anomalies)
    // likely: the least d with d^m ≥ n_keys, at least 2.
    let m = sources.len() as u32;
    let mut domain: u64 = 2;
    while (domain as u128).pow(m) < n_keys as u128 {
        domain += 1;
    }

    // Distinct source vectors: enumerate the d^m grid when small, sample
    // with rejection otherwise. Either way seeded and reproducible.
    let total = (domain as u128).pow(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut source_vectors: Vec<Vec<u64>> = Vec::with_capacity(n_keys);
    if total <= 1 << 16 {
        let mut grid: Vec<u128> = (0..total).collect();
        grid.shuffle(&mut rng);
        for code in grid.into_iter().take(n_keys) {
            let mut v = Vec::with_capacity(m as usize);
            let mut rest = code;
            for _ in 0..m {
                v.push((rest % domain as u128) as u64);
                rest /= domain as u128;
            }
            source_vectors.push(v);
        }
    } else {
        let mut seen = BTreeSet::new();
        while source_vectors.len() < n_keys {
            let v: Vec<u64> = (0..m).map(|_| rng.gen_range(0..domain)).collect();
            if seen.insert(v.clone()) {
                source_vectors.push(v);
            }
        }
    }

    // Per-attribute value functions. An attribute with exactly one cover
    // dependency targeting it is a hash of its determinants; one with
    // several gets a constant, which satisfies them all at once.
    let defining: BTreeMap<Attribute, Option<AttributeSet>> = determined
        .iter()
        .map(|a| {
            let dets: Vec<&Fd> = cover
                .iter()
                .filter(|fd| fd.rhs().contains(a))
                .collect();
            let unique = if dets.len() == 1 { Some(dets[0].lhs().clone()) } else { None };
            (a.clone(), unique)
        })
        .collect();

    let mut tuples: BTreeSet<Tuple> = BTreeSet::new();
    for v in &source_vectors {
        let mut t: Tuple = Tuple::new();
        for (a, val) in sources.iter().zip(v) {
            t.insert(a.clone(), *val);
        }
        for a in &determined {
            let h = mix_name(seed, a);
            let value = match &defining[a] {
                Some(lhs) => {
                    let mut acc = h;
                    for d in lhs.iter() {
                        acc = mix(acc, t[d]);
                    }
                    acc % domain
                }
                None => h % domain,
            };
            t.insert(a.clone(), value);
        }
        tuples.insert(t);
    }

    let relation = RelationSchema::derive("R", schema.universe().clone(), schema.fds(), limits)?;
    let instance = RelationInstance { relation, tuples };
    debug_assert!(instance.satisfies(schema.fds()));
    Ok(instance)
}

/// Result of projecting an instance through a decomposition and joining the
/// pieces back together.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct JoinReport {
    pub lossless_observed: bool,
    /// |join| − |instance|; never negative, since the join always contains
    /// the original tuples.
    pub spurious_count: usize,
    pub spurious_tuples: Vec<Tuple>,
}

pub fn join_compatible(s: &Tuple, t: &Tuple) -> Option<Tuple> {
    for (a, v) in s {
        if let Some(w) = t.get(a) {
            if v != w {
                return None;
            }
        }
    }
    let mut out = s.clone();
    for (a, v) in t {
        out.insert(a.clone(), *v);
    }
    Some(out)
}

/// Projects `inst` onto every relation of `d` and folds a natural join over
/// the projections, counting tuples the join invents.
pub fn instance_join_test(inst: &RelationInstance, d: &Decomposition) -> JoinReport {
    let mut joined: BTreeSet<Tuple> = BTreeSet::from([Tuple::new()]);
    for rel in d.relations() {
        let projection = inst.project(rel.attrs());
        let mut next = BTreeSet::new();
        for s in &joined {
            for t in &projection {
                if let Some(u) = join_compatible(s, t) {
                    next.insert(u);
                }
            }
        }
        joined = next;
    }
    // The join of the projections always contains the original instance.
    assert!(inst.tuples.iter().all(|t| joined.contains(t)));
    let spurious_tuples: Vec<Tuple> = joined
        .iter()
        .filter(|t| !inst.tuples.contains(*t))
        .cloned()
        .collect();
    JoinReport {
        lossless_observed: spurious_tuples.is_empty(),
        spurious_count: spurious_tuples.len(),
        spurious_tuples,
    }
}
