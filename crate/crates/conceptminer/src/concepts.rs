//! Formal concepts, exhaustive lattice enumeration, the lattice order, and
//! Hasse-diagram export.

use thiserror::Error;

use crate::bitset::{BitSet, ObjectSet, PropertySet};
use crate::context::{extent_in, intent_in, FormalContext, IncidenceRelation};

/// Properties beyond which [`enumerate_concepts`] refuses to run.
pub const DEFAULT_ENUMERATION_GUARD: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("context has {properties} properties, which exceeds the enumeration guard of {limit}")]
pub struct GuardExceeded {
    pub properties: usize,
    pub limit: usize,
}

/// A mutually closed (extent, intent) pair: `extent▶ = intent` and
/// `intent◀ = extent`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormalConcept {
    pub extent: ObjectSet,
    pub intent: PropertySet,
}

impl FormalConcept {
    /// Lattice order: `self ≪ other` iff `self.extent ⊆ other.extent`
    /// (equivalently `other.intent ⊆ self.intent`).
    pub fn leq(&self, other: &FormalConcept) -> bool {
        self.extent.is_subset(&other.extent)
    }

    /// True when `other`'s rectangle contains this one's: extent and intent
    /// both included. Distinct concepts of one context never satisfy this,
    /// but concepts of partial relations can.
    pub fn sub_rectangle_of(&self, other: &FormalConcept) -> bool {
        self.extent.is_subset(&other.extent) && self.intent.is_subset(&other.intent)
    }

    /// True when the rectangle contains the couple `(o, p)`.
    pub fn contains_couple(&self, o: usize, p: usize) -> bool {
        self.extent.contains(o) && self.intent.contains(p)
    }
}

/// True iff `(extent, intent)` is a formal concept of `rel`.
pub fn is_concept<R: IncidenceRelation + ?Sized>(
    rel: &R,
    extent: &ObjectSet,
    intent: &PropertySet,
) -> bool {
    intent_in(rel, extent) == *intent && extent_in(rel, intent) == *extent
}

/// All concepts of a context, ordered lexicographically by intent.
#[derive(Debug, Clone)]
pub struct ConceptLattice<'a> {
    context: &'a FormalContext,
    concepts: Vec<FormalConcept>,
}

impl<'a> ConceptLattice<'a> {
    pub fn context(&self) -> &'a FormalContext {
        self.context
    }

    pub fn concepts(&self) -> &[FormalConcept] {
        &self.concepts
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    /// Cover relation of `≪`: pairs `(i, j)` where concept `i` is covered by
    /// concept `j`, computed by transitive reduction. Quadratic-ish; meant
    /// for enumeration-scale lattices.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.concepts.len();
        let mut below = vec![Vec::new(); n]; // strictly-less-than lists
        for (j, list) in below.iter_mut().enumerate() {
            for i in 0..n {
                if i != j && self.concepts[i].leq(&self.concepts[j]) {
                    list.push(i);
                }
            }
        }
        let mut edges = Vec::new();
        for (j, list) in below.iter().enumerate() {
            for &i in list {
                let direct =
                    !list.iter().any(|&k| k != i && self.concepts[i].leq(&self.concepts[k]));
                if direct {
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// DOT digraph of the Hasse diagram. Node `c<i>` is the i-th concept in
    /// lattice order; edges point from subconcept to superconcept.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph concept_lattice {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, c) in self.concepts.iter().enumerate() {
            let label = format!(
                "{} | {}",
                self.context.format_objects(&c.extent),
                self.context.format_properties(&c.intent)
            );
            out.push_str(&format!("  c{} [label=\"{}\"];\n", i, escape_dot(&label)));
        }
        for (i, j) in self.hasse_edges() {
            out.push_str(&format!("  c{i} -> c{j};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Enumerate every concept with the default property-count guard.
pub fn enumerate_concepts(ctx: &FormalContext) -> Result<ConceptLattice<'_>, GuardExceeded> {
    enumerate_concepts_guarded(ctx, DEFAULT_ENUMERATION_GUARD)
}

/// Enumerate every concept of `ctx`, refusing when the property count
/// exceeds `guard`. Closed intents are generated in lectic order (each one
/// exactly once), then sorted lexicographically.
pub fn enumerate_concepts_guarded(
    ctx: &FormalContext,
    guard: usize,
) -> Result<ConceptLattice<'_>, GuardExceeded> {
    if ctx.property_count() > guard {
        return Err(GuardExceeded { properties: ctx.property_count(), limit: guard });
    }

    let mut concepts = Vec::new();
    let mut intent = ctx.close_intent(&BitSet::new(ctx.property_count()));
    loop {
        concepts.push(FormalConcept { extent: ctx.extent_of(&intent), intent: intent.clone() });
        match next_closed_intent(ctx, &intent) {
            Some(next) => intent = next,
            None => break,
        }
    }
    concepts.sort_unstable_by(|a, b| a.intent.cmp(&b.intent));
    Ok(ConceptLattice { context: ctx, concepts })
}

/// Successor of `current` among closed intents in lectic order, or `None`
/// when `current` is the last one (the full closed property set).
fn next_closed_intent(ctx: &FormalContext, current: &PropertySet) -> Option<PropertySet> {
    let m = ctx.property_count();
    let mut stem = current.clone();
    for i in (0..m).rev() {
        if stem.contains(i) {
            stem.remove(i);
        } else {
            let mut candidate = stem.clone();
            candidate.insert(i);
            let closed = ctx.close_intent(&candidate);
            let canonical = closed.iter().take_while(|&j| j < i).all(|j| stem.contains(j));
            if canonical {
                return Some(closed);
            }
        }
    }
    None
}

/// Least upper bound: `(extent_of(∩ intents), ∩ intents)`. The intersection
/// over an empty family is the full property set, so `supremum(ctx, [])` is
/// the bottom concept.
pub fn supremum(ctx: &FormalContext, concepts: &[FormalConcept]) -> FormalConcept {
    let mut intent = ctx.full_property_set();
    for c in concepts {
        intent.intersect_with(&c.intent);
    }
    FormalConcept { extent: ctx.extent_of(&intent), intent }
}

/// Greatest lower bound: `(∩ extents, intent_of(∩ extents))`;
/// `infimum(ctx, [])` is the top concept.
pub fn infimum(ctx: &FormalContext, concepts: &[FormalConcept]) -> FormalConcept {
    let mut extent = ctx.full_object_set();
    for c in concepts {
        extent.intersect_with(&c.extent);
    }
    FormalConcept { intent: ctx.intent_of(&extent), extent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::parse_fimi;
    use crate::fixtures::{obj, props, reference_context};

    fn concept(ctx: &FormalContext, e: &[usize], i: &[usize]) -> FormalConcept {
        FormalConcept { extent: obj(ctx, e), intent: props(ctx, i) }
    }

    /// Oracle: close every subset of P, deduplicate.
    fn powerset_closure_sweep(ctx: &FormalContext) -> Vec<FormalConcept> {
        let m = ctx.property_count();
        assert!(m <= 12, "oracle is for small contexts");
        let mut out = std::collections::BTreeSet::new();
        for mask in 0u32..(1 << m) {
            let b = BitSet::from_indices(m, (0..m).filter(|&p| mask & (1 << p) != 0));
            let intent = ctx.close_intent(&b);
            let extent = ctx.extent_of(&intent);
            out.insert(FormalConcept { extent, intent });
        }
        out.into_iter().collect()
    }

    #[test]
    fn is_concept_examples() {
        let ctx = reference_context();
        assert!(is_concept(&ctx, &obj(&ctx, &[0, 1]), &props(&ctx, &[0, 1])));
        assert!(!is_concept(&ctx, &obj(&ctx, &[2]), &props(&ctx, &[1, 2])));
        let top_intent = ctx.intent_of(&ctx.full_object_set());
        assert!(is_concept(&ctx, &ctx.full_object_set(), &top_intent));
    }

    #[test]
    fn reference_context_has_eight_concepts() {
        let ctx = reference_context();
        let lattice = enumerate_concepts(&ctx).unwrap();
        assert_eq!(lattice.len(), 8);
        let expected: Vec<FormalConcept> = vec![
            concept(&ctx, &[0, 1, 2, 3, 4], &[]),
            concept(&ctx, &[0, 1], &[0, 1]),
            concept(&ctx, &[], &[0, 1, 2, 3]),
            concept(&ctx, &[0, 1, 2, 3], &[1]),
            concept(&ctx, &[2, 3], &[1, 2]),
            concept(&ctx, &[3], &[1, 2, 3]),
            concept(&ctx, &[2, 3, 4], &[2]),
            concept(&ctx, &[3, 4], &[2, 3]),
        ];
        assert_eq!(lattice.concepts(), expected.as_slice());
    }

    #[test]
    fn enumeration_matches_powerset_sweep() {
        for text in ["0 1\n0 1\n1 2\n1 2 3\n2 3", "0\n1\n2", "0 1 2\n0 1 2", ""] {
            let ctx = parse_fimi(text).unwrap();
            let lattice = enumerate_concepts(&ctx).unwrap();
            let mut got = lattice.concepts().to_vec();
            got.sort_unstable();
            assert_eq!(got, powerset_closure_sweep(&ctx));
            for c in lattice.concepts() {
                assert!(is_concept(&ctx, &c.extent, &c.intent));
            }
        }
    }

    #[test]
    fn empty_context_yields_single_concept() {
        let ctx = parse_fimi("").unwrap();
        let lattice = enumerate_concepts(&ctx).unwrap();
        assert_eq!(lattice.len(), 1);
        assert_eq!(lattice.concepts()[0], FormalConcept { extent: BitSet::new(0), intent: BitSet::new(0) });
    }

    #[test]
    fn guard_refusal_names_the_limit() {
        let ctx = reference_context();
        let err = enumerate_concepts_guarded(&ctx, 3).unwrap_err();
        assert_eq!(err, GuardExceeded { properties: 4, limit: 3 });
        assert!(err.to_string().contains('3'));
    }

    #[test]
    fn leq_examples() {
        let ctx = reference_context();
        let ab = concept(&ctx, &[0, 1], &[0, 1]);
        let b = concept(&ctx, &[0, 1, 2, 3], &[1]);
        let cd = concept(&ctx, &[3, 4], &[2, 3]);
        assert!(ab.leq(&b));
        assert!(!b.leq(&ab));
        assert!(ab.leq(&ab));
        assert!(!ab.leq(&cd) && !cd.leq(&ab));
    }

    #[test]
    fn supremum_and_infimum_formulas() {
        let ctx = reference_context();
        let ab = concept(&ctx, &[0, 1], &[0, 1]);
        let bc = concept(&ctx, &[2, 3], &[1, 2]);
        let b = concept(&ctx, &[0, 1, 2, 3], &[1]);
        let c = concept(&ctx, &[2, 3, 4], &[2]);

        assert_eq!(supremum(&ctx, &[ab.clone(), bc.clone()]), b);
        assert_eq!(supremum(&ctx, std::slice::from_ref(&ab)), ab);
        assert_eq!(infimum(&ctx, &[b, c]), bc);

        // Bounds land in the lattice and bound their inputs.
        let lattice = enumerate_concepts(&ctx).unwrap();
        for x in lattice.concepts() {
            for y in lattice.concepts() {
                let sup = supremum(&ctx, &[x.clone(), y.clone()]);
                let inf = infimum(&ctx, &[x.clone(), y.clone()]);
                assert!(lattice.concepts().contains(&sup));
                assert!(lattice.concepts().contains(&inf));
                assert!(x.leq(&sup) && y.leq(&sup));
                assert!(inf.leq(x) && inf.leq(y));
                for z in lattice.concepts() {
                    if x.leq(z) && y.leq(z) {
                        assert!(sup.leq(z));
                    }
                    if z.leq(x) && z.leq(y) {
                        assert!(z.leq(&inf));
                    }
                }
            }
        }
    }

    /// Oracle: transitive reduction of the full ≪ relation.
    fn hasse_oracle(concepts: &[FormalConcept]) -> Vec<(usize, usize)> {
        let n = concepts.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || !concepts[i].leq(&concepts[j]) {
                    continue;
                }
                let between = (0..n).any(|k| {
                    k != i && k != j && concepts[i].leq(&concepts[k]) && concepts[k].leq(&concepts[j])
                });
                if !between {
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    #[test]
    fn hasse_edges_match_reduction_oracle() {
        let ctx = reference_context();
        let lattice = enumerate_concepts(&ctx).unwrap();
        let edges = lattice.hasse_edges();
        assert_eq!(edges, hasse_oracle(lattice.concepts()));
        // Frozen from the oracle: the 8-concept diamond has 10 cover edges.
        assert_eq!(edges.len(), 10);
    }

    #[test]
    fn dot_export_shape() {
        let ctx = reference_context();
        let lattice = enumerate_concepts(&ctx).unwrap();
        let dot = lattice.to_dot();
        assert!(dot.starts_with("digraph concept_lattice {"));
        assert!(dot.trim_end().ends_with('}'));
        assert_eq!(dot.matches("label=").count(), 8);
        assert_eq!(dot.matches(" -> ").count(), 10);
        assert!(dot.contains("{t0,t1} | {i0,i1}"));

        let empty = parse_fimi("").unwrap();
        let dot = enumerate_concepts(&empty).unwrap().to_dot();
        assert_eq!(dot.matches("label=").count(), 1);
        assert_eq!(dot.matches(" -> ").count(), 0);
    }
}
