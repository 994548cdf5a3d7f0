//! Seedable generators for randomized testing: unconstrained schemas, a
//! structured family with a single two-part key that always decomposes
//! cleanly, a family with planted meeting chains that never does, and
//! random decompositions.

use rand::Rng;

use crate::closure::Limits;
use crate::decompose::build_decomposition;
use crate::error::Result;
use crate::schema::{Attribute, AttributeSet, Decomposition, Fd, FdSet, Schema};

fn attr(i: usize) -> Attribute {
    Attribute::new(&format!("A{i}")).expect("generated names are valid")
}

fn attrs(n: usize) -> Vec<Attribute> {
    (1..=n).map(attr).collect()
}

fn pick<'a, R: Rng, T>(rng: &mut R, pool: &'a [T]) -> &'a T {
    &pool[rng.gen_range(0..pool.len())]
}

/// A random non-empty subset of `pool` with at most `max_len` elements.
fn random_subset<R: Rng>(rng: &mut R, pool: &[Attribute], max_len: usize) -> AttributeSet {
    let len = rng.gen_range(1..=max_len.min(pool.len()));
    let mut out = AttributeSet::empty();
    while out.len() < len {
        out.insert(pick(rng, pool).clone());
    }
    out
}

/// An unconstrained random schema: 2..=`max_attrs` attributes and up to
/// `max_fds` dependencies with small sides.
pub fn arbitrary_schema<R: Rng>(rng: &mut R, max_attrs: usize, max_fds: usize) -> Schema {
    assert!(max_attrs >= 2);
    let n = rng.gen_range(2..=max_attrs);
    let pool = attrs(n);
    let universe: AttributeSet = pool.iter().cloned().collect();
    let n_fds = rng.gen_range(0..=max_fds);
    let mut fds = FdSet::empty();
    for _ in 0..n_fds {
        let lhs = random_subset(rng, &pool, 2);
        let rhs = random_subset(rng, &pool, 2);
        fds.insert(Fd::new(lhs, rhs));
    }
    Schema::new(universe, fds).expect("generated schemas are well-formed")
}

/// A schema whose only candidate key is `{A1, A2}` and whose dependencies
/// never cross between the two key components: every non-key attribute is
/// reachable from `A1` alone, from `A2` alone, from both, or only from the
/// whole key. Such schemas always admit a clean three-table split.
pub fn structured_two_key_schema<R: Rng>(rng: &mut R) -> Schema {
    let n_a = rng.gen_range(0..=3usize);
    let n_b = rng.gen_range(0..=3usize);
    let n_ov = rng.gen_range(0..=2usize);
    let n_res = rng.gen_range(0..=2usize);

    let mut next = 3usize;
    let mut take = |count: usize| -> Vec<Attribute> {
        let out = (next..next + count).map(attr).collect();
        next += count;
        out
    };
    let side_a = take(n_a);
    let side_b = take(n_b);
    let overlap = take(n_ov);
    let residual = take(n_res);

    let key = [attr(1), attr(2)];
    let mut fds = FdSet::empty();

    // Each side grows as a mix of direct arrows from the key component and
    // chained arrows from earlier attributes of the same side.
    let mut grow_side = |rng: &mut R, root: &Attribute, side: &[Attribute]| {
        let mut reachable = vec![root.clone()];
        for a in side {
            let det = pick(rng, &reachable).clone();
            fds.insert(Fd::new(
                AttributeSet::singleton(det),
                AttributeSet::singleton(a.clone()),
            ));
            reachable.push(a.clone());
        }
        reachable
    };
    let reach_a = grow_side(rng, &key[0], &side_a);
    let reach_b = grow_side(rng, &key[1], &side_b);

    // Overlap attributes hang off both sides at once.
    for o in &overlap {
        let da = pick(rng, &reach_a).clone();
        let db = pick(rng, &reach_b).clone();
        fds.insert(Fd::new(AttributeSet::singleton(da), AttributeSet::singleton(o.clone())));
        fds.insert(Fd::new(AttributeSet::singleton(db), AttributeSet::singleton(o.clone())));
    }

    // Residual attributes need the whole key.
    let key_set: AttributeSet = key.iter().cloned().collect();
    for r in &residual {
        fds.insert(Fd::new(key_set.clone(), AttributeSet::singleton(r.clone())));
    }

    let universe: AttributeSet = attrs(next - 1).into_iter().collect();
    Schema::new(universe, fds).expect("generated schemas are well-formed")
}

/// A schema with a planted pair of meeting chains: one chain of single
/// attributes grows from each key component, and the two chain ends
/// jointly determine at least one fresh attribute. Splitting along the
/// key components always loses that joint dependency.
pub fn chain_pair_schema<R: Rng>(rng: &mut R) -> Schema {
    let len_a = rng.gen_range(1..=3usize);
    let len_b = rng.gen_range(1..=3usize);
    let n_gamma = rng.gen_range(1..=2usize);
    let n_res = rng.gen_range(0..=2usize);

    let mut next = 3usize;
    let mut take = |count: usize| -> Vec<Attribute> {
        let out = (next..next + count).map(attr).collect();
        next += count;
        out
    };
    let chain_a = take(len_a);
    let chain_b = take(len_b);
    let gamma = take(n_gamma);
    let residual = take(n_res);

    let mut fds = FdSet::empty();
    let mut plant = |root: Attribute, chain: &[Attribute]| -> Attribute {
        let mut prev = root;
        for c in chain {
            fds.insert(Fd::new(
                AttributeSet::singleton(prev.clone()),
                AttributeSet::singleton(c.clone()),
            ));
            prev = c.clone();
        }
        prev
    };
    let end_a = plant(attr(1), &chain_a);
    let end_b = plant(attr(2), &chain_b);

    let meeting: AttributeSet = [end_a, end_b].into_iter().collect();
    let gamma_set: AttributeSet = gamma.into_iter().collect();
    fds.insert(Fd::new(meeting, gamma_set));

    let key_set: AttributeSet = [attr(1), attr(2)].into_iter().collect();
    for r in &residual {
        fds.insert(Fd::new(key_set.clone(), AttributeSet::singleton(r.clone())));
    }

    let universe: AttributeSet = attrs(next - 1).into_iter().collect();
    Schema::new(universe, fds).expect("generated schemas are well-formed")
}

/// A random decomposition of `schema` into 1..=3 relations. Attribute
/// coverage is patched up by folding any missing attributes into the
/// first relation, so the result always passes validation.
pub fn arbitrary_decomposition<R: Rng>(
    rng: &mut R,
    schema: &Schema,
    limits: &Limits,
) -> Result<Decomposition> {
    let pool: Vec<Attribute> = schema.universe().iter().cloned().collect();
    let n_rel = rng.gen_range(1..=3usize);
    let mut parts: Vec<AttributeSet> = (0..n_rel)
        .map(|_| random_subset(rng, &pool, pool.len()))
        .collect();
    let mut covered = AttributeSet::empty();
    for p in &parts {
        covered = covered.union(p);
    }
    let missing = schema.universe().difference(&covered);
    parts[0] = parts[0].union(&missing);
    parts.sort();
    parts.dedup();
    build_decomposition(parts.into_iter().map(|p| (p, None)).collect(), schema, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::candidate_keys;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn arbitrary_schemas_are_well_formed_and_reproducible() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = arbitrary_schema(&mut r1, 6, 8);
            let b = arbitrary_schema(&mut r2, 6, 8);
            assert_eq!(a.universe(), b.universe());
            assert_eq!(a.fds(), b.fds());
            assert!(a.universe().len() >= 2 && a.universe().len() <= 6);
        }
    }

    #[test]
    fn structured_schemas_have_exactly_the_two_part_key() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let limits = Limits::default();
        for _ in 0..100 {
            let s = structured_two_key_schema(&mut rng);
            let keys = candidate_keys(s.universe(), s.fds(), &limits).unwrap();
            let expected: AttributeSet = [attr(1), attr(2)].into_iter().collect();
            assert_eq!(keys, vec![expected]);
        }
    }

    #[test]
    fn chain_pair_schemas_have_the_two_part_key_too() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let limits = Limits::default();
        for _ in 0..100 {
            let s = chain_pair_schema(&mut rng);
            let keys = candidate_keys(s.universe(), s.fds(), &limits).unwrap();
            let expected: AttributeSet = [attr(1), attr(2)].into_iter().collect();
            assert_eq!(keys, vec![expected]);
        }
    }

    #[test]
    fn random_decompositions_cover_the_universe() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let limits = Limits::default();
        for _ in 0..50 {
            let s = arbitrary_schema(&mut rng, 6, 6);
            let d = arbitrary_decomposition(&mut rng, &s, &limits).unwrap();
            let mut covered = AttributeSet::empty();
            for rel in d.relations() {
                covered = covered.union(rel.attrs());
            }
            assert_eq!(&covered, s.universe());
            assert!(d.provenance().iter().all(|p| p.is_none()));
        }
    }
}
