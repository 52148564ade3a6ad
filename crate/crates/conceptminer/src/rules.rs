//! Association rules: expansion of itemsets into support/confidence-filtered
//! rules, the levelwise Apriori baseline, and the coverage-driven miner.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::bitset::{BitSet, PropertySet};
use crate::context::{FormalContext, IncidenceRelation};
use crate::coverage::{fraction_of, sfc2a};
use crate::relevance::RelevanceConfig;

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("{name} = {value} is outside [0, 1]")]
    InvalidFraction { name: &'static str, value: f64 },
    #[error("itemset of {len} properties exceeds the rule-expansion cap of {cap}")]
    IntentTooLarge { len: usize, cap: usize },
}

pub const DEFAULT_EXPANSION_CAP: usize = 16;

/// Support and confidence thresholds plus the expansion guard.
#[derive(Debug, Clone, Copy)]
pub struct MiningParams {
    pub min_sup: f64,
    pub min_conf: f64,
    /// Itemsets with more properties than this are refused rather than
    /// silently truncated; expansion is exponential in the itemset size.
    pub max_intent_for_rule_expansion: usize,
}

impl MiningParams {
    pub fn new(min_sup: f64, min_conf: f64) -> Result<Self, RuleError> {
        if !(0.0..=1.0).contains(&min_sup) {
            return Err(RuleError::InvalidFraction { name: "min_sup", value: min_sup });
        }
        if !(0.0..=1.0).contains(&min_conf) {
            return Err(RuleError::InvalidFraction { name: "min_conf", value: min_conf });
        }
        Ok(MiningParams { min_sup, min_conf, max_intent_for_rule_expansion: DEFAULT_EXPANSION_CAP })
    }

    pub fn with_expansion_cap(mut self, cap: usize) -> Self {
        self.max_intent_for_rule_expansion = cap;
        self
    }
}

/// `antecedent → consequent` with its support and confidence. The two sides
/// are disjoint and non-empty, and `support <= confidence`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRule {
    pub antecedent: PropertySet,
    pub consequent: PropertySet,
    pub support: f64,
    pub confidence: f64,
}

/// Every rule `X → B∖X` over non-empty proper subsets `X ⊂ B` that passes
/// both thresholds. Support is `|B◀| / |O|`, confidence `|B◀| / |X◀|`.
/// Itemsets with fewer than two properties yield no rules; itemsets with an
/// empty extent yield only vacuous rules and are skipped.
pub fn rules_from_itemset(
    ctx: &FormalContext,
    itemset: &PropertySet,
    params: &MiningParams,
) -> Result<Vec<AssociationRule>, RuleError> {
    let k = itemset.len();
    if k < 2 {
        return Ok(Vec::new());
    }
    if k > params.max_intent_for_rule_expansion {
        return Err(RuleError::IntentTooLarge { len: k, cap: params.max_intent_for_rule_expansion });
    }

    let whole_extent = ctx.extent_of(itemset);
    if whole_extent.is_empty() {
        return Ok(Vec::new());
    }
    let whole = whole_extent.len();
    let support = fraction_of(whole, ctx.object_count());
    if support < params.min_sup {
        return Ok(Vec::new());
    }

    let items: Vec<usize> = itemset.iter().collect();
    let nprops = ctx.property_count();
    let mut out = Vec::new();
    for mask in 1u32..(1 << k) - 1 {
        let antecedent = BitSet::from_indices(
            nprops,
            items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p),
        );
        let mut x_extent = ctx.full_object_set();
        for p in antecedent.iter() {
            x_extent.intersect_with(ctx.col(p));
        }
        let confidence = fraction_of(whole, x_extent.len());
        if confidence >= params.min_conf {
            let consequent = BitSet::from_indices(
                nprops,
                items.iter().enumerate().filter(|(i, _)| mask & (1 << i) == 0).map(|(_, &p)| p),
            );
            out.push(AssociationRule { antecedent, consequent, support, confidence });
        }
    }
    out.sort_by(|a, b| a.antecedent.cmp(&b.antecedent));
    Ok(out)
}

/// Expand a batch of `(itemset, support)` pairs: itemsets below `min_sup`
/// are skipped before expansion (their rules would all fail the support
/// filter anyway), the rest go through [`rules_from_itemset`]; the union is
/// deduplicated and sorted by confidence desc, support desc, then
/// antecedent/consequent order.
pub fn rules_from_itemsets(
    ctx: &FormalContext,
    itemsets: &[(PropertySet, f64)],
    params: &MiningParams,
) -> Result<Vec<AssociationRule>, RuleError> {
    let mut seen: BTreeSet<(PropertySet, PropertySet)> = BTreeSet::new();
    let mut out = Vec::new();
    for (itemset, support) in itemsets {
        if *support < params.min_sup {
            continue;
        }
        for rule in rules_from_itemset(ctx, itemset, params)? {
            if seen.insert((rule.antecedent.clone(), rule.consequent.clone())) {
                out.push(rule);
            }
        }
    }
    out.sort_by(|a, b| {
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap()
            .then_with(|| b.support.partial_cmp(&a.support).unwrap())
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
    Ok(out)
}

/// Mine rules from the itemsets of an incremental concept coverage.
pub fn mine_sfc2a(
    ctx: &FormalContext,
    params: &MiningParams,
    cfg: &RelevanceConfig,
) -> Result<Vec<AssociationRule>, RuleError> {
    let coverage = sfc2a(ctx, cfg);
    rules_from_itemsets(ctx, &coverage.itemsets(), params)
}

/// All itemsets with support `>= min_sup` and a non-empty extent, by the
/// classic levelwise scheme: join `(k-1)`-itemsets sharing a `(k-2)`-prefix,
/// prune candidates with an infrequent subset, count by extent intersection.
pub fn apriori_frequent(ctx: &FormalContext, min_sup: f64) -> BTreeMap<PropertySet, f64> {
    let n = ctx.object_count();
    let nprops = ctx.property_count();
    let mut out = BTreeMap::new();

    let mut level: Vec<(Vec<usize>, BitSet)> = Vec::new();
    for p in 0..nprops {
        let extent = ctx.col(p).clone();
        if !extent.is_empty() && fraction_of(extent.len(), n) >= min_sup {
            out.insert(BitSet::from_indices(nprops, [p]), fraction_of(extent.len(), n));
            level.push((vec![p], extent));
        }
    }

    while level.len() > 1 {
        let frequent_keys: HashSet<&[usize]> =
            level.iter().map(|(items, _)| items.as_slice()).collect();
        let k = level[0].0.len();
        let mut next: Vec<(Vec<usize>, BitSet)> = Vec::new();
        for i in 0..level.len() - 1 {
            for j in i + 1..level.len() {
                let (a, ea) = &level[i];
                let (b, eb) = &level[j];
                if a[..k - 1] != b[..k - 1] {
                    continue;
                }
                let mut candidate = a.clone();
                candidate.push(b[k - 1]);
                let all_subsets_frequent = (0..candidate.len()).all(|skip| {
                    let subset: Vec<usize> = candidate
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    frequent_keys.contains(subset.as_slice())
                });
                if !all_subsets_frequent {
                    continue;
                }
                let extent = ea.intersection(eb);
                if !extent.is_empty() && fraction_of(extent.len(), n) >= min_sup {
                    out.insert(
                        BitSet::from_indices(nprops, candidate.iter().copied()),
                        fraction_of(extent.len(), n),
                    );
                    next.push((candidate, extent));
                }
            }
        }
        next.sort_by(|(a, _), (b, _)| a.cmp(b));
        level = next;
    }

    out
}

/// Apriori baseline: frequent itemsets expanded into filtered rules, with
/// the same ordering as [`mine_sfc2a`].
pub fn apriori_rules(
    ctx: &FormalContext,
    params: &MiningParams,
) -> Result<Vec<AssociationRule>, RuleError> {
    let frequent: Vec<(PropertySet, f64)> = apriori_frequent(ctx, params.min_sup).into_iter().collect();
    rules_from_itemsets(ctx, &frequent, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::parse_fimi;
    use crate::fixtures::{props, reference_context};
    use itertools::Itertools;

    /// Oracle: support of every non-empty itemset by direct column
    /// intersection over the full powerset.
    fn powerset_supports(ctx: &FormalContext, min_sup: f64) -> BTreeMap<PropertySet, f64> {
        let mut out = BTreeMap::new();
        for set in (0..ctx.property_count()).powerset().filter(|s| !s.is_empty()) {
            let b = BitSet::from_indices(ctx.property_count(), set.iter().copied());
            let extent = ctx.extent_of(&b);
            let support = fraction_of(extent.len(), ctx.object_count());
            if !extent.is_empty() && support >= min_sup {
                out.insert(b, support);
            }
        }
        out
    }

    /// Oracle: every rule from every itemset, filtered, by brute force.
    fn rule_sweep(ctx: &FormalContext, params: &MiningParams) -> Vec<(PropertySet, PropertySet)> {
        let mut out = BTreeSet::new();
        for (itemset, _) in powerset_supports(ctx, params.min_sup) {
            if itemset.len() < 2 {
                continue;
            }
            let whole = ctx.extent_of(&itemset).len();
            let items: Vec<usize> = itemset.iter().collect();
            for mask in 1u32..(1 << items.len()) - 1 {
                let ant = BitSet::from_indices(
                    ctx.property_count(),
                    items.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p),
                );
                let conf = fraction_of(whole, ctx.extent_of(&ant).len());
                if conf >= params.min_conf {
                    let mut cons = itemset.clone();
                    for p in ant.iter() {
                        cons.remove(p);
                    }
                    out.insert((ant, cons));
                }
            }
        }
        out.into_iter().collect()
    }

    fn rule_keys(rules: &[AssociationRule]) -> Vec<(PropertySet, PropertySet)> {
        let mut keys: Vec<_> =
            rules.iter().map(|r| (r.antecedent.clone(), r.consequent.clone())).collect();
        keys.sort();
        keys
    }

    #[test]
    fn params_validate_fractions() {
        assert!(MiningParams::new(0.35, 0.75).is_ok());
        assert_eq!(
            MiningParams::new(1.5, 0.5).unwrap_err(),
            RuleError::InvalidFraction { name: "min_sup", value: 1.5 }
        );
        assert_eq!(
            MiningParams::new(0.5, -0.1).unwrap_err(),
            RuleError::InvalidFraction { name: "min_conf", value: -0.1 }
        );
    }

    #[test]
    fn rules_from_reference_pairs() {
        let ctx = reference_context();
        let params = MiningParams::new(0.35, 0.75).unwrap();

        let ab = rules_from_itemset(&ctx, &props(&ctx, &[0, 1]), &params).unwrap();
        assert_eq!(ab.len(), 1);
        assert_eq!(ab[0].antecedent, props(&ctx, &[0]));
        assert_eq!(ab[0].consequent, props(&ctx, &[1]));
        assert_eq!(ab[0].support, 0.4);
        assert_eq!(ab[0].confidence, 1.0);

        let cd = rules_from_itemset(&ctx, &props(&ctx, &[2, 3]), &params).unwrap();
        assert_eq!(cd.len(), 1);
        assert_eq!(cd[0].antecedent, props(&ctx, &[3]));
        assert_eq!(cd[0].confidence, 1.0);

        assert!(rules_from_itemset(&ctx, &props(&ctx, &[1]), &params).unwrap().is_empty());
    }

    #[test]
    fn expansion_cap_is_an_explicit_refusal() {
        let ctx = parse_fimi("0 1 2\n0 1 2").unwrap();
        let params = MiningParams::new(0.0, 0.0).unwrap().with_expansion_cap(2);
        let err = rules_from_itemset(&ctx, &props(&ctx, &[0, 1, 2]), &params).unwrap_err();
        assert_eq!(err, RuleError::IntentTooLarge { len: 3, cap: 2 });
        assert!(err.to_string().contains("cap of 2"));
    }

    #[test]
    fn apriori_frequent_reference_values() {
        let ctx = reference_context();
        let frequent = apriori_frequent(&ctx, 0.35);
        let expected: BTreeMap<PropertySet, f64> = [
            (props(&ctx, &[0]), 0.4),
            (props(&ctx, &[1]), 0.8),
            (props(&ctx, &[2]), 0.6),
            (props(&ctx, &[3]), 0.4),
            (props(&ctx, &[0, 1]), 0.4),
            (props(&ctx, &[1, 2]), 0.4),
            (props(&ctx, &[2, 3]), 0.4),
        ]
        .into_iter()
        .collect();
        assert_eq!(frequent, expected);
        assert_eq!(frequent, powerset_supports(&ctx, 0.35));
    }

    #[test]
    fn apriori_frequent_boundary_thresholds() {
        let ctx = reference_context();
        assert!(apriori_frequent(&ctx, 1.0).is_empty());
        // min_sup 0 keeps every itemset with a non-empty extent.
        assert_eq!(apriori_frequent(&ctx, 0.0), powerset_supports(&ctx, 0.0));
    }

    #[test]
    fn apriori_antimonotone() {
        let ctx = reference_context();
        let frequent = apriori_frequent(&ctx, 0.2);
        for itemset in frequent.keys() {
            for p in itemset.iter() {
                let mut subset = itemset.clone();
                subset.remove(p);
                if !subset.is_empty() {
                    assert!(frequent.contains_key(&subset), "{subset:?} missing");
                }
            }
        }
    }

    #[test]
    fn apriori_rules_reference_thresholds() {
        let ctx = reference_context();
        let params = MiningParams::new(0.35, 0.75).unwrap();
        let rules = apriori_rules(&ctx, &params).unwrap();
        assert_eq!(rules.len(), 2);
        // Sorted: equal confidence/support, antecedent order A before D.
        assert_eq!(rules[0].antecedent, props(&ctx, &[0]));
        assert_eq!(rules[0].consequent, props(&ctx, &[1]));
        assert_eq!((rules[0].support, rules[0].confidence), (0.4, 1.0));
        assert_eq!(rules[1].antecedent, props(&ctx, &[3]));
        assert_eq!(rules[1].consequent, props(&ctx, &[2]));
        assert_eq!((rules[1].support, rules[1].confidence), (0.4, 1.0));
        assert_eq!(rule_keys(&rules), rule_sweep(&ctx, &params));
    }

    #[test]
    fn apriori_rules_lower_confidence_matches_sweep() {
        let ctx = reference_context();
        let params = MiningParams::new(0.35, 0.5).unwrap();
        let rules = apriori_rules(&ctx, &params).unwrap();
        // Frozen from the sweep oracle: all six rules over the frequent
        // pairs pass at 0.5 (B→C sits exactly on the threshold).
        assert_eq!(rules.len(), 6);
        assert_eq!(rule_keys(&rules), rule_sweep(&ctx, &params));
        let ordered: Vec<(Vec<usize>, Vec<usize>)> = rules
            .iter()
            .map(|r| (r.antecedent.iter().collect(), r.consequent.iter().collect()))
            .collect();
        assert_eq!(
            ordered,
            vec![
                (vec![0], vec![1]),
                (vec![3], vec![2]),
                (vec![2], vec![1]),
                (vec![2], vec![3]),
                (vec![1], vec![0]),
                (vec![1], vec![2]),
            ]
        );
    }

    #[test]
    fn apriori_rules_empty_context() {
        let ctx = parse_fimi("").unwrap();
        let params = MiningParams::new(0.35, 0.75).unwrap();
        assert!(apriori_rules(&ctx, &params).unwrap().is_empty());
        assert!(mine_sfc2a(&ctx, &params, &RelevanceConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn mine_sfc2a_reference_rules() {
        let ctx = reference_context();
        let params = MiningParams::new(0.35, 0.75).unwrap();
        let rules = mine_sfc2a(&ctx, &params, &RelevanceConfig::default()).unwrap();
        assert_eq!(rule_keys(&rules), vec![
            (props(&ctx, &[0]), props(&ctx, &[1])),
            (props(&ctx, &[3]), props(&ctx, &[2])),
        ]);
        for r in &rules {
            assert_eq!(r.confidence, 1.0);
            assert_eq!(r.support, 0.4);
        }
    }

    #[test]
    fn mine_sfc2a_full_rectangle_all_splits() {
        // A full 2x2 rectangle covers as one concept whose intent expands
        // into both single-antecedent rules.
        let ctx = parse_fimi("0 1\n0 1").unwrap();
        let params = MiningParams::new(0.0, 0.0).unwrap();
        let rules = mine_sfc2a(&ctx, &params, &RelevanceConfig::default()).unwrap();
        assert_eq!(rules.len(), 2);
        for r in &rules {
            assert_eq!(r.support, 1.0);
            assert_eq!(r.confidence, 1.0);
            assert_eq!(r.antecedent.len() + r.consequent.len(), 2);
        }
    }

    #[test]
    fn sfc2a_rules_subset_of_apriori() {
        let ctx = reference_context();
        for (min_sup, min_conf) in [(0.2, 0.0), (0.35, 0.5), (0.35, 0.75), (0.6, 0.9)] {
            let params = MiningParams::new(min_sup, min_conf).unwrap();
            let sf = rule_keys(&mine_sfc2a(&ctx, &params, &RelevanceConfig::default()).unwrap());
            let ap = rule_keys(&apriori_rules(&ctx, &params).unwrap());
            for key in &sf {
                assert!(ap.contains(key), "rule {key:?} missing from apriori output");
            }
        }
    }

    #[test]
    fn rule_invariants() {
        let ctx = reference_context();
        let params = MiningParams::new(0.0, 0.0).unwrap();
        for r in apriori_rules(&ctx, &params).unwrap() {
            assert!(r.antecedent.intersection(&r.consequent).is_empty());
            assert!(!r.antecedent.is_empty() && !r.consequent.is_empty());
            assert!((0.0..=1.0).contains(&r.support));
            assert!((0.0..=1.0).contains(&r.confidence));
            assert!(r.support <= r.confidence + 1e-15);
        }
    }
}
