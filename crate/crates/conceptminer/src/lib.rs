//! Association-rule mining on binary contexts via formal concept analysis.
//!
//! The pipeline: parse a context ([`context`]), cover its incidence relation
//! with formal concepts chosen by a relevance measure ([`coverage`], built on
//! [`optimal`] and [`relevance`]), then expand the covered itemsets into
//! support/confidence-filtered rules ([`rules`]). A levelwise Apriori miner
//! in [`rules`] and an exhaustive lattice enumerator in [`concepts`] serve as
//! baselines and oracles.
//!
//! ```
//! use conceptminer::{mine_sfc2a, parse_fimi, MiningParams, RelevanceConfig};
//!
//! let ctx = parse_fimi("0 1\n0 1\n1 2\n1 2 3\n2 3").unwrap();
//! let params = MiningParams::new(0.35, 0.75).unwrap();
//! let rules = mine_sfc2a(&ctx, &params, &RelevanceConfig::default()).unwrap();
//! assert_eq!(rules.len(), 2); // i0 -> i1 and i3 -> i2, both at confidence 1
//! ```

pub mod bitset;
pub mod concepts;
pub mod context;
pub mod coverage;
pub mod optimal;
pub mod relevance;
pub mod rules;

pub use bitset::{BitSet, ObjectSet, PropertySet};
pub use concepts::{
    enumerate_concepts, enumerate_concepts_guarded, infimum, is_concept, supremum, ConceptLattice,
    FormalConcept, GuardExceeded, DEFAULT_ENUMERATION_GUARD,
};
pub use context::{parse_csv, parse_cxt, parse_fimi, FormalContext, IncidenceRelation};
pub use coverage::{
    partition_rows, sfc2a, validate_coverage, Coverage, CoverageReport, Package, PartialRelation,
};
pub use optimal::{brute_optimal_concept, heuristic_optimal_concept, OptimalError, PseudoConcept};
pub use relevance::{
    concept_confidence, concept_relevance, pcf_relevance, pcf_size, PcfFormula, RelevanceConfig,
};
pub use rules::{
    apriori_frequent, apriori_rules, mine_sfc2a, rules_from_itemset, rules_from_itemsets,
    AssociationRule, MiningParams, RuleError,
};
