//! Incremental concept coverage of a binary relation.
//!
//! The relation is partitioned into one package per object row. Packages are
//! merged in one at a time: within the partial relation made of the already
//! covered couples plus the new package, each still-uncovered couple is
//! resolved to a concept by the pseudo-concept heuristic, redundant members
//! are dropped, and covered couples leave the package. A finalization pass
//! re-closes every member against the full context and removes rectangles
//! contained in another member's rectangle.

use std::collections::BTreeMap;
use std::fmt;

use crate::bitset::{BitSet, ObjectSet, PropertySet};
use crate::concepts::{is_concept, FormalConcept};
use crate::context::{FormalContext, IncidenceRelation};
use crate::optimal::{heuristic_optimal_concept, PseudoConcept};
use crate::relevance::{pcf_score, RelevanceConfig, Score};

/// One object's share of the relation: the incident couples of its row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Package {
    pub object: usize,
    pub couples: Vec<(usize, usize)>,
}

/// One package per object with a non-empty row, in object-index order.
pub fn partition_rows(ctx: &FormalContext) -> Vec<Package> {
    (0..ctx.object_count())
        .filter(|&o| !ctx.row(o).is_empty())
        .map(|o| Package { object: o, couples: ctx.row(o).iter().map(|p| (o, p)).collect() })
        .collect()
}

/// An explicit couple-set over the same index space as its parent context;
/// the universe the incremental steps search in.
#[derive(Debug, Clone)]
pub struct PartialRelation {
    rows: Vec<PropertySet>,
    cols: Vec<ObjectSet>,
    n_couples: usize,
}

impl PartialRelation {
    pub fn new(n_objects: usize, n_properties: usize) -> Self {
        PartialRelation {
            rows: vec![BitSet::new(n_properties); n_objects],
            cols: vec![BitSet::new(n_objects); n_properties],
            n_couples: 0,
        }
    }

    pub fn insert(&mut self, o: usize, p: usize) {
        if !self.rows[o].contains(p) {
            self.rows[o].insert(p);
            self.cols[p].insert(o);
            self.n_couples += 1;
        }
    }

    /// Add every couple of a (dense) rectangle.
    pub fn insert_rectangle(&mut self, extent: &ObjectSet, intent: &PropertySet) {
        for o in extent.iter() {
            for p in intent.iter() {
                self.insert(o, p);
            }
        }
    }
}

impl IncidenceRelation for PartialRelation {
    fn object_count(&self) -> usize {
        self.rows.len()
    }

    fn property_count(&self) -> usize {
        self.cols.len()
    }

    fn row(&self, o: usize) -> &PropertySet {
        &self.rows[o]
    }

    fn col(&self, p: usize) -> &ObjectSet {
        &self.cols[p]
    }

    fn couple_count(&self) -> usize {
        self.n_couples
    }
}

/// A set of formal concepts whose rectangles jointly contain every incident
/// couple of the context. Members are sorted by intent, then extent.
#[derive(Debug, Clone)]
pub struct Coverage<'a> {
    context: &'a FormalContext,
    members: Vec<FormalConcept>,
}

impl<'a> Coverage<'a> {
    pub fn new(context: &'a FormalContext, members: Vec<FormalConcept>) -> Self {
        Coverage { context, members }
    }

    pub fn context(&self) -> &'a FormalContext {
        self.context
    }

    pub fn members(&self) -> &[FormalConcept] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Distinct member intents, each with its support `|extent| / |O|`,
    /// sorted by intent.
    pub fn itemsets(&self) -> Vec<(PropertySet, f64)> {
        let n = self.context.object_count();
        let mut out: BTreeMap<PropertySet, f64> = BTreeMap::new();
        for m in &self.members {
            out.entry(m.intent.clone())
                .or_insert_with(|| fraction_of(m.extent.len(), n));
        }
        out.into_iter().collect()
    }

    /// One member per line: `{o-labels} | {p-labels}`, members in coverage
    /// order. Byte-stable for identical inputs.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.members {
            out.push_str(&self.context.format_objects(&m.extent));
            out.push_str(" | ");
            out.push_str(&self.context.format_properties(&m.intent));
            out.push('\n');
        }
        out
    }
}

/// `count / total` as an f64, with the empty-universe convention of 0.
/// All support and confidence values are computed through this division so
/// threshold comparisons stay bit-stable.
pub fn fraction_of(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        count as f64 / total as f64
    }
}

/// Build a concept coverage of `ctx` incrementally, package by package.
/// Deterministic: identical input and config yield an identical coverage.
pub fn sfc2a<'a>(ctx: &'a FormalContext, cfg: &RelevanceConfig) -> Coverage<'a> {
    let mut members: Vec<FormalConcept> = Vec::new();

    for package in partition_rows(ctx) {
        // R_i = couples already covered + the new package.
        let mut universe = PartialRelation::new(ctx.object_count(), ctx.property_count());
        for m in &members {
            universe.insert_rectangle(&m.extent, &m.intent);
        }
        for &(o, p) in &package.couples {
            universe.insert(o, p);
        }

        // Sort the package couples by the relevance of their pseudo-concepts
        // in R_i, descending; ties by property then object index.
        let mut pending: Vec<(Score, usize, usize)> = package
            .couples
            .iter()
            .map(|&(o, p)| {
                let pcf = PseudoConcept::anchored(&universe, o, p)
                    .expect("package couples are incident in R_i");
                (pcf_score(&pcf, cfg), o, p)
            })
            .collect();
        pending.sort_by(|(sa, oa, pa), (sb, ob, pb)| {
            sb.total_cmp(sa).then_with(|| (pa, oa).cmp(&(pb, ob)))
        });
        let mut pending: Vec<(usize, usize)> =
            pending.into_iter().map(|(_, o, p)| (o, p)).collect();

        while let Some(&(a, b)) = pending.first() {
            let fc = heuristic_optimal_concept(&universe, a, b, cfg)
                .expect("selected couple is incident in R_i");
            debug_assert!(fc.contains_couple(a, b));
            members.retain(|m| !m.sub_rectangle_of(&fc));
            members.push(fc.clone());
            pending.retain(|&(x, y)| !fc.contains_couple(x, y));
        }
    }

    // Finalization: members were closed against partial relations only;
    // re-close them in the full context, then drop contained rectangles.
    for m in &mut members {
        let mut extent = ctx.extent_of(&m.intent);
        let mut intent = ctx.intent_of(&extent);
        loop {
            let next_extent = ctx.extent_of(&intent);
            let next_intent = ctx.intent_of(&next_extent);
            if next_extent == extent && next_intent == intent {
                break;
            }
            extent = next_extent;
            intent = next_intent;
        }
        *m = FormalConcept { extent, intent };
    }
    members.sort_unstable_by(|a, b| a.intent.cmp(&b.intent).then_with(|| a.extent.cmp(&b.extent)));
    members.dedup();
    let mut kept = Vec::with_capacity(members.len());
    for (i, m) in members.iter().enumerate() {
        let subsumed =
            members.iter().enumerate().any(|(j, other)| i != j && m.sub_rectangle_of(other));
        if !subsumed {
            kept.push(m.clone());
        }
    }

    Coverage { context: ctx, members: kept }
}

/// Everything wrong with a proposed coverage; empty iff all coverage
/// invariants hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageReport {
    /// Incident couples of the context inside no member's rectangle.
    pub uncovered: Vec<(usize, usize)>,
    /// Indices of members that are not formal concepts of the context.
    pub non_concepts: Vec<usize>,
    /// Pairs `(i, j)` where member `i`'s rectangle is contained in `j`'s.
    pub subsumed: Vec<(usize, usize)>,
}

impl CoverageReport {
    pub fn is_empty(&self) -> bool {
        self.uncovered.is_empty() && self.non_concepts.is_empty() && self.subsumed.is_empty()
    }
}

impl fmt::Display for CoverageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "coverage ok");
        }
        write!(
            f,
            "uncovered couples: {:?}; non-concept members: {:?}; subsumed member pairs: {:?}",
            self.uncovered, self.non_concepts, self.subsumed
        )
    }
}

/// Check the coverage invariants: every incident couple covered, every
/// member mutually closed in the full context, no member's rectangle inside
/// another's.
pub fn validate_coverage(ctx: &FormalContext, coverage: &Coverage<'_>) -> CoverageReport {
    let members = coverage.members();
    let mut report = CoverageReport::default();

    for o in 0..ctx.object_count() {
        for p in ctx.row(o).iter() {
            if !members.iter().any(|m| m.contains_couple(o, p)) {
                report.uncovered.push((o, p));
            }
        }
    }
    for (i, m) in members.iter().enumerate() {
        if !is_concept(ctx, &m.extent, &m.intent) {
            report.non_concepts.push(i);
        }
    }
    for (i, m) in members.iter().enumerate() {
        for (j, other) in members.iter().enumerate() {
            if i != j && m.sub_rectangle_of(other) {
                report.subsumed.push((i, j));
            }
        }
    }
    report
}
