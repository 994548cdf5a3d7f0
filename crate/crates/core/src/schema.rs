//! The data model: attributes, attribute sets, functional dependencies,
//! schemas, relation schemas and decompositions.
//!
//! Everything here is an immutable value with structural equality. Sets are
//! kept in `BTreeSet`s so iteration order — and therefore every derived
//! artifact, rendering and search — is the lexicographic order of attribute
//! names. Rendering the same value twice always yields identical text.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::ValidationError;

/// A single attribute, identified by its exact (case-sensitive) name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Attribute(String);

impl Attribute {
    /// Parses an attribute name: a letter followed by letters, digits or
    /// underscores.
    pub fn new(name: &str) -> Result<Self, ValidationError> {
        let mut chars = name.chars();
        let ok = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            }
            _ => false,
        };
        if ok {
            Ok(Attribute(name.to_string()))
        } else {
            Err(ValidationError::BadAttributeName { name: name.to_string() })
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A set of attributes in canonical (lexicographic) order.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct AttributeSet(BTreeSet<Attribute>);

impl AttributeSet {
    pub fn empty() -> Self {
        AttributeSet(BTreeSet::new())
    }

    pub fn singleton(a: Attribute) -> Self {
        AttributeSet(BTreeSet::from([a]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, a: &Attribute) -> bool {
        self.0.contains(a)
    }

    pub fn insert(&mut self, a: Attribute) {
        self.0.insert(a);
    }

    pub fn remove(&mut self, a: &Attribute) {
        self.0.remove(a);
    }

    pub fn iter(&self) -> impl Iterator<Item = &Attribute> {
        self.0.iter()
    }

    pub fn union(&self, other: &Self) -> Self {
        AttributeSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        AttributeSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        AttributeSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_superset(&self, other: &Self) -> bool {
        self.0.is_superset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// True when `self` is a strict subset of `other`.
    pub fn is_proper_subset(&self, other: &Self) -> bool {
        self.len() < other.len() && self.is_subset(other)
    }

    /// Renders with braces even for single attributes; plain `Display`
    /// drops the braces around a singleton, matching the usual arrow
    /// notation (`A1 → A3` but `{A1, A2} → A7`).
    pub fn braced(&self) -> Braced<'_> {
        Braced(self)
    }
}

impl FromIterator<Attribute> for AttributeSet {
    fn from_iter<T: IntoIterator<Item = Attribute>>(iter: T) -> Self {
        AttributeSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a AttributeSet {
    type Item = &'a Attribute;
    type IntoIter = std::collections::btree_set::Iter<'a, Attribute>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            write!(f, "{}", self.0.iter().next().unwrap())
        } else {
            write!(f, "{}", self.braced())
        }
    }
}

impl fmt::Debug for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.braced())
    }
}

/// Always-braced rendering of an [`AttributeSet`].
pub struct Braced<'a>(&'a AttributeSet);

impl fmt::Display for Braced<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// A functional dependency `lhs → rhs`. Both sides are non-empty.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Fd {
    lhs: AttributeSet,
    rhs: AttributeSet,
}

impl Fd {
    /// Both sides must be non-empty; input paths validate this before
    /// construction, so violating it is a programming error.
    pub fn new(lhs: AttributeSet, rhs: AttributeSet) -> Fd {
        assert!(!lhs.is_empty() && !rhs.is_empty(), "dependency sides must be non-empty");
        Fd { lhs, rhs }
    }

    pub fn lhs(&self) -> &AttributeSet {
        &self.lhs
    }

    pub fn rhs(&self) -> &AttributeSet {
        &self.rhs
    }

    /// All attributes mentioned on either side.
    pub fn attrs(&self) -> AttributeSet {
        self.lhs.union(&self.rhs)
    }
}

impl fmt::Display for Fd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} → {}", self.lhs, self.rhs)
    }
}

impl fmt::Debug for Fd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A set of functional dependencies with set semantics: duplicates collapse
/// and order of insertion is irrelevant to equality and iteration.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct FdSet(BTreeSet<Fd>);

impl FdSet {
    pub fn empty() -> Self {
        FdSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn insert(&mut self, fd: Fd) {
        self.0.insert(fd);
    }

    pub fn contains(&self, fd: &Fd) -> bool {
        self.0.contains(fd)
    }

    pub fn remove(&mut self, fd: &Fd) {
        self.0.remove(fd);
    }

    /// A copy with one dependency left out.
    pub fn without(&self, fd: &Fd) -> FdSet {
        let mut out = self.clone();
        out.remove(fd);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fd> {
        self.0.iter()
    }
}

impl FromIterator<Fd> for FdSet {
    fn from_iter<T: IntoIterator<Item = Fd>>(iter: T) -> Self {
        FdSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a FdSet {
    type Item = &'a Fd;
    type IntoIter = std::collections::btree_set::Iter<'a, Fd>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for FdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// An attribute universe together with the dependencies stated over it.
#[derive(Clone, PartialEq, Eq, Serialize, Debug)]
pub struct Schema {
    universe: AttributeSet,
    fds: FdSet,
}

impl Schema {
    /// Builds a schema from already-formed dependencies, reporting every
    /// violation (empty universe, attributes outside the universe).
    pub fn new(universe: AttributeSet, fds: FdSet) -> Result<Schema, Vec<ValidationError>> {
        let mut errors = Vec::new();
        if universe.is_empty() {
            errors.push(ValidationError::EmptyUniverse);
        }
        for fd in fds.iter() {
            for a in fd.attrs().iter() {
                if !universe.contains(a) {
                    errors.push(ValidationError::UnknownAttribute {
                        fd: fd.to_string(),
                        name: a.name().to_string(),
                    });
                }
            }
        }
        if errors.is_empty() {
            Ok(Schema { universe, fds })
        } else {
            Err(errors)
        }
    }

    pub fn universe(&self) -> &AttributeSet {
        &self.universe
    }

    pub fn fds(&self) -> &FdSet {
        &self.fds
    }
}

/// Validates raw `(lhs, rhs)` pairs — which may still have empty sides —
/// against a universe, collecting every violation.
pub fn validate_schema(
    universe: AttributeSet,
    raw_fds: &[(AttributeSet, AttributeSet)],
) -> Result<Schema, Vec<ValidationError>> {
    let mut errors = Vec::new();
    if universe.is_empty() {
        errors.push(ValidationError::EmptyUniverse);
    }
    let mut fds = FdSet::empty();
    for (lhs, rhs) in raw_fds {
        let rendered = format!("{lhs} → {rhs}");
        if lhs.is_empty() || rhs.is_empty() {
            errors.push(ValidationError::EmptyFdSide { fd: rendered });
            continue;
        }
        let fd = Fd::new(lhs.clone(), rhs.clone());
        for a in fd.attrs().iter() {
            if !universe.contains(a) {
                errors.push(ValidationError::UnknownAttribute {
                    fd: fd.to_string(),
                    name: a.name().to_string(),
                });
            }
        }
        fds.insert(fd);
    }
    if errors.is_empty() {
        Ok(Schema { universe, fds })
    } else {
        Err(errors)
    }
}

/// One relation inside a decomposition. Candidate keys are always computed
/// from the dependencies, never taken on trust from input.
#[derive(Clone, PartialEq, Eq, Serialize, Debug)]
pub struct RelationSchema {
    pub(crate) name: String,
    pub(crate) attrs: AttributeSet,
    pub(crate) candidate_keys: Vec<AttributeSet>,
}

impl RelationSchema {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn attrs(&self) -> &AttributeSet {
        &self.attrs
    }

    pub fn candidate_keys(&self) -> &[AttributeSet] {
        &self.candidate_keys
    }

    /// Union of all candidate keys.
    pub fn prime_attrs(&self) -> AttributeSet {
        let mut out = AttributeSet::empty();
        for k in &self.candidate_keys {
            out = out.union(k);
        }
        out
    }

    pub fn is_prime(&self, a: &Attribute) -> bool {
        self.candidate_keys.iter().any(|k| k.contains(a))
    }
}

/// Why a relation was created during decomposition.
#[derive(Clone, Copy, PartialEq, Eq, Serialize, Debug)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Carries (part of) the original key.
    KeyFragment,
    /// Splits a partial dependency away from the key.
    PartialDependencySplit,
    /// Splits a transitive dependency into its own relation.
    TransitivitySplit,
    /// The key plus whatever only the whole key determines.
    ResidualKeyTable,
    /// Grouped from a minimal cover during synthesis.
    Synthesis,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Provenance::KeyFragment => "key-fragment",
            Provenance::PartialDependencySplit => "partial-dependency-split",
            Provenance::TransitivitySplit => "transitivity-split",
            Provenance::ResidualKeyTable => "residual-key-table",
            Provenance::Synthesis => "synthesis",
        };
        f.write_str(s)
    }
}

/// A list of relation schemas covering the universe, with an optional
/// provenance tag per relation (`None` for decompositions read from files).
#[derive(Clone, PartialEq, Serialize, Debug)]
pub struct Decomposition {
    relations: Vec<RelationSchema>,
    provenance: Vec<Option<Provenance>>,
}

impl Decomposition {
    pub fn new(
        relations: Vec<RelationSchema>,
        provenance: Vec<Option<Provenance>>,
        universe: &AttributeSet,
    ) -> Result<Decomposition, ValidationError> {
        assert_eq!(relations.len(), provenance.len());
        let mut covered = AttributeSet::empty();
        for r in &relations {
            covered = covered.union(&r.attrs);
        }
        let missing = universe.difference(&covered);
        if missing.is_empty() {
            Ok(Decomposition { relations, provenance })
        } else {
            Err(ValidationError::NotAttributePreserving { missing })
        }
    }

    pub fn untagged(
        relations: Vec<RelationSchema>,
        universe: &AttributeSet,
    ) -> Result<Decomposition, ValidationError> {
        let n = relations.len();
        Decomposition::new(relations, vec![None; n], universe)
    }

    pub fn relations(&self) -> &[RelationSchema] {
        &self.relations
    }

    pub fn provenance(&self) -> &[Option<Provenance>] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RelationSchema, Option<Provenance>)> {
        self.relations.iter().zip(self.provenance.iter().copied())
    }
}
