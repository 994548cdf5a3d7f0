//! Functional-dependency analysis for relational schemas: closures, keys,
//! and minimal covers; normal-form classification up to third normal form
//! with concrete witnesses; decomposition along a two-part key with
//! verified rejection of the tempting-but-wrong variants; third-normal-form
//! synthesis; diagnosis of meeting chains that rule out a pure
//! partial-dependency decomposition; and verification tooling (dependency
//! preservation, the chase, seeded instances, project–join round trips).
//!
//! Everything is deterministic: attribute sets are ordered, all
//! enumeration orders are canonical, and randomized helpers take explicit
//! seeds.
//!
//! ```
//! use fdnf_core::closure::{attribute_closure, Limits};
//! use fdnf_core::decompose::plan_precise_2nf;
//! use fdnf_core::schema::{Attribute, AttributeSet, Fd, FdSet, Schema};
//!
//! let set = |ns: &[&str]| -> AttributeSet {
//!     ns.iter().map(|n| Attribute::new(n).unwrap()).collect()
//! };
//!
//! let schema = Schema::new(
//!     set(&["A1", "A2", "A3", "A4", "A5"]),
//!     [
//!         Fd::new(set(&["A1"]), set(&["A3"])),
//!         Fd::new(set(&["A2"]), set(&["A4"])),
//!         Fd::new(set(&["A3", "A4"]), set(&["A5"])),
//!     ]
//!     .into_iter()
//!     .collect::<FdSet>(),
//! )
//! .unwrap();
//!
//! assert_eq!(attribute_closure(&set(&["A1"]), schema.fds()), set(&["A1", "A3"]));
//! let plan = plan_precise_2nf(&schema, &Limits::default()).unwrap();
//! // This schema's chains meet at {A3, A4} → A5: no 2NF-only plan exists.
//! assert!(plan.witness.is_some());
//! ```

pub mod closure;
pub mod decompose;
pub mod diagnose;
pub mod error;
pub mod gen;
pub mod nf;
pub mod schema;
pub mod verify;

pub use closure::{
    attribute_closure, candidate_keys, equivalent, implies, minimal_cover, prime_attributes,
    project_fds, Limits, ProjectedFdSet,
};
pub use decompose::{
    analyze_case, build_decomposition, decompose_2nf, plan_precise_2nf, reject_illegitimate,
    synthesize_3nf, two_nf_tables, CaseAnalysis, IllegitimateVariant, Impossibility, MergedCase,
    Placement, PlanOutcome, PlanResult, PlanStep, RawCase, RejectionReport, SpuriousDemo,
};
pub use diagnose::{
    find_chains, find_overlapping_pairs, theorem1_verdict, AssumptionCheck, ChainPair,
    Theorem1Verdict, TransitiveChain,
};
pub use error::{AssumptionViolation, Error, Result, ValidationError};
pub use nf::{
    classify_database, classify_schema, classify_table, partial_dependency_witnesses,
    transitive_dependency_witnesses, NormalForm, NormalFormLabel, PartialDependencyWitness,
    TableAnalysis, TransitiveDependencyWitness,
};
pub use schema::{
    validate_schema, Attribute, AttributeSet, Decomposition, Fd, FdSet, Provenance,
    RelationSchema, Schema,
};
pub use verify::{
    binary_lossless, chase_lossless, generate_instance, instance_join_test, join_compatible,
    preservation_check, ChaseStep, ChaseTableau, JoinReport, PreservationReport,
    RelationInstance, Substitution, Symbol, Tuple,
};
