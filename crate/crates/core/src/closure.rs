//! The closure engine: attribute closures, entailment, minimal covers,
//! candidate keys, prime attributes and dependency projection.
//!
//! Entailment is always decided through attribute closures; the full set of
//! entailed dependencies is never materialized. The two genuinely
//! exponential searches (candidate keys, projection) take an explicit
//! [`Limits`] and refuse inputs past their bound instead of hanging.

use crate::error::{Error, Result};
use crate::schema::{Attribute, AttributeSet, Fd, FdSet, RelationSchema};

/// Bounds for the exponential searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Maximum attribute count for candidate-key search (default 20).
    pub key_search_attrs: usize,
    /// Maximum scope width for dependency projection (default 16).
    pub projection_attrs: usize,
    /// Maximum number of chains enumerated during diagnosis.
    pub chain_budget: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { key_search_attrs: 20, projection_attrs: 16, chain_budget: 1 << 18 }
    }
}

impl Limits {
    /// One bound for everything, as set by `--max-attrs`.
    pub fn with_max_attrs(n: usize) -> Self {
        Limits { key_search_attrs: n, projection_attrs: n, ..Limits::default() }
    }
}

/// The set of attributes determined by `x` under `f`: the least fixpoint of
/// "add every right-hand side whose left-hand side is already covered".
/// Terminates in at most one pass per attribute added.
pub fn attribute_closure(x: &AttributeSet, f: &FdSet) -> AttributeSet {
    let mut closure = x.clone();
    loop {
        let mut grew = false;
        for fd in f.iter() {
            if fd.lhs().is_subset(&closure) && !fd.rhs().is_subset(&closure) {
                closure = closure.union(fd.rhs());
                grew = true;
            }
        }
        if !grew {
            return closure;
        }
    }
}

/// Does `f` entail `candidate`? Decided via the closure of the left-hand
/// side, never by materializing entailed dependencies.
pub fn implies(f: &FdSet, candidate: &Fd) -> bool {
    candidate.rhs().is_subset(&attribute_closure(candidate.lhs(), f))
}

/// Do two dependency sets entail each other?
pub fn equivalent(f: &FdSet, g: &FdSet) -> bool {
    f.iter().all(|fd| implies(g, fd)) && g.iter().all(|fd| implies(f, fd))
}

/// A minimal cover: singleton right-hand sides, no extraneous left-hand
/// attributes, no redundant dependencies. Entails exactly what `f` entails.
/// Deterministic: candidates are processed in canonical order.
pub fn minimal_cover(f: &FdSet) -> FdSet {
    // Split right-hand sides and drop trivial parts.
    let mut g = FdSet::empty();
    for fd in f.iter() {
        for a in fd.rhs().iter() {
            if !fd.lhs().contains(a) {
                g.insert(Fd::new(fd.lhs().clone(), AttributeSet::singleton(a.clone())));
            }
        }
    }

    // Drop extraneous left-hand attributes. Each removal can expose more,
    // so repeat until stable.
    loop {
        let mut changed = false;
        for fd in g.iter().cloned().collect::<Vec<_>>() {
            if !g.contains(&fd) {
                continue; // replaced by a slimmer version earlier this pass
            }
            for b in fd.lhs().iter().cloned().collect::<Vec<_>>() {
                if fd.lhs().len() == 1 {
                    break;
                }
                let mut slim_lhs = fd.lhs().clone();
                slim_lhs.remove(&b);
                if fd.rhs().is_subset(&attribute_closure(&slim_lhs, &g)) {
                    g.remove(&fd);
                    g.insert(Fd::new(slim_lhs, fd.rhs().clone()));
                    changed = true;
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }

    // Drop redundant dependencies.
    for fd in g.iter().cloned().collect::<Vec<_>>() {
        let rest = g.without(&fd);
        if implies(&rest, &fd) {
            g = rest;
        }
    }
    g
}

/// All subsets of `pool` with exactly `k` elements, in lexicographic order.
pub(crate) fn subsets_of_size(pool: &[Attribute], k: usize) -> Vec<AttributeSet> {
    let mut out = Vec::new();
    if k > pool.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| pool[i].clone()).collect());
        // advance the index vector
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + pool.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All non-empty subsets of `pool`, smallest first, lexicographic within a
/// size.
pub(crate) fn nonempty_subsets(pool: &[Attribute]) -> Vec<AttributeSet> {
    let mut out = Vec::new();
    for k in 1..=pool.len() {
        out.extend(subsets_of_size(pool, k));
    }
    out
}

/// Every minimal set of attributes (within `attrs`) that determines all of
/// `attrs` under `f`, in canonical order.
///
/// The search first pins down the attributes no key can do without — those
/// whose removal from `attrs` loses reach — then grows that seed with
/// subsets of the remaining useful attributes, smallest first, pruning
/// supersets of keys already found. Worst case is exponential, so inputs
/// wider than `limits.key_search_attrs` are refused.
pub fn candidate_keys(
    attrs: &AttributeSet,
    f: &FdSet,
    limits: &Limits,
) -> Result<Vec<AttributeSet>> {
    assert!(!attrs.is_empty(), "candidate keys of an empty attribute set");
    if attrs.len() > limits.key_search_attrs {
        return Err(Error::SizeLimitExceeded {
            operation: "candidate key search",
            size: attrs.len(),
            limit: limits.key_search_attrs,
        });
    }

    // Attributes every key must contain: dropping them loses reach.
    let seed: AttributeSet = attrs
        .iter()
        .filter(|a| {
            let mut rest = attrs.clone();
            rest.remove(a);
            !attribute_closure(&rest, f).is_superset(attrs)
        })
        .cloned()
        .collect();

    // Anything the seed already determines can never appear in a minimal key.
    let reach = attribute_closure(&seed, f);
    let pool: Vec<Attribute> = attrs.difference(&reach).iter().cloned().collect();

    let mut keys: Vec<AttributeSet> = Vec::new();
    for k in 0..=pool.len() {
        for extra in subsets_of_size(&pool, k) {
            let candidate = seed.union(&extra);
            if keys.iter().any(|key| key.is_subset(&candidate)) {
                continue;
            }
            if attribute_closure(&candidate, f).is_superset(attrs) {
                keys.push(candidate);
            }
        }
    }
    keys.sort();
    Ok(keys)
}

/// Attributes appearing in at least one candidate key.
pub fn prime_attributes(attrs: &AttributeSet, f: &FdSet, limits: &Limits) -> Result<AttributeSet> {
    let mut out = AttributeSet::empty();
    for key in candidate_keys(attrs, f, limits)? {
        out = out.union(&key);
    }
    Ok(out)
}

/// The dependencies `f` induces on a sub-scope.
#[derive(Clone, PartialEq, Eq, Debug, serde::Serialize)]
pub struct ProjectedFdSet {
    pub scope: AttributeSet,
    pub fds: FdSet,
}

/// Projects `f` onto `scope`: for each non-empty `X ⊆ scope` the closure of
/// `X` is cut down to the scope and emitted as `X → (closure ∩ scope) − X`.
/// Subsets whose yield is already entailed by a kept smaller subset are
/// skipped. The result is reduced but entails exactly the projection.
/// Exponential in the scope width, hence the limit.
pub fn project_fds(f: &FdSet, scope: &AttributeSet, limits: &Limits) -> Result<ProjectedFdSet> {
    if scope.len() > limits.projection_attrs {
        return Err(Error::SizeLimitExceeded {
            operation: "dependency projection",
            size: scope.len(),
            limit: limits.projection_attrs,
        });
    }
    let pool: Vec<Attribute> = scope.iter().cloned().collect();
    // (subset, its closure cut to scope), kept in discovery order
    let mut kept: Vec<(AttributeSet, AttributeSet)> = Vec::new();
    let mut fds = FdSet::empty();
    for x in nonempty_subsets(&pool) {
        let scoped = attribute_closure(&x, f).intersection(scope);
        let rhs = scoped.difference(&x);
        if rhs.is_empty() {
            continue;
        }
        if kept
            .iter()
            .any(|(y, yc)| y.is_proper_subset(&x) && rhs.is_subset(yc))
        {
            continue;
        }
        fds.insert(Fd::new(x.clone(), rhs));
        kept.push((x, scoped));
    }
    Ok(ProjectedFdSet { scope: scope.clone(), fds })
}

impl RelationSchema {
    /// Builds a relation over `attrs`, computing its candidate keys from
    /// the schema's dependencies. Keys are never taken from input.
    pub fn derive(
        name: impl Into<String>,
        attrs: AttributeSet,
        f: &FdSet,
        limits: &Limits,
    ) -> Result<RelationSchema> {
        assert!(!attrs.is_empty(), "relation schema with no attributes");
        let keys = candidate_keys(&attrs, f, limits)?;
        Ok(RelationSchema { name: name.into(), attrs, candidate_keys: keys })
    }
}
