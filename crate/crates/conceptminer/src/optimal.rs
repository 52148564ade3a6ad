//! Pseudo-concepts and the search that shrinks one to a formal concept.
//!
//! The pseudo-concept of an incident couple `(o, p)` is the rectangle
//! `({p}◀, {o}▶)`; it contains every formal concept containing `(o, p)`.
//! [`heuristic_optimal_concept`] repeatedly replaces the rectangle with its
//! best-scoring sub-rectangle anchored on `(o, p)`'s row or column until it
//! is dense, then closes it. [`brute_optimal_concept`] is the enumeration
//! oracle for the same question.

use thiserror::Error;

use crate::bitset::{ObjectSet, PropertySet};
use crate::concepts::{FormalConcept, GuardExceeded};
use crate::context::{extent_in, intent_in, FormalContext, IncidenceRelation};
use crate::relevance::{concept_score, pcf_score_parts, RelevanceConfig, Score};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OptimalError {
    #[error("couple (object {object}, property {property}) is not incident in the universe")]
    NotIncident { object: usize, property: usize },
    #[error("invalid pseudo-concept rectangle: {0}")]
    InvalidRectangle(String),
    #[error(transparent)]
    Guard(#[from] GuardExceeded),
}

/// A rectangle `rows × cols` inside a universe relation, anchored on an
/// incident couple `(o, p)`. Every row holds `p` and every column is held by
/// `o`, so the anchor stays inside across shrink steps.
#[derive(Debug, Clone)]
pub struct PseudoConcept<'r, R: IncidenceRelation> {
    universe: &'r R,
    rows: ObjectSet,
    cols: PropertySet,
    anchor: (usize, usize),
}

impl<'r, R: IncidenceRelation> PseudoConcept<'r, R> {
    /// The pseudo-concept of `(o, p)`: rows `{p}◀`, cols `{o}▶`, derivations
    /// taken in `universe`.
    pub fn anchored(universe: &'r R, o: usize, p: usize) -> Result<Self, OptimalError> {
        if !universe.has(o, p) {
            return Err(OptimalError::NotIncident { object: o, property: p });
        }
        Ok(PseudoConcept {
            universe,
            rows: universe.col(p).clone(),
            cols: universe.row(o).clone(),
            anchor: (o, p),
        })
    }

    /// An explicit rectangle, validated against the anchor invariants.
    pub fn from_parts(
        universe: &'r R,
        rows: ObjectSet,
        cols: PropertySet,
        o: usize,
        p: usize,
    ) -> Result<Self, OptimalError> {
        if !universe.has(o, p) {
            return Err(OptimalError::NotIncident { object: o, property: p });
        }
        if !rows.contains(o) || !cols.contains(p) {
            return Err(OptimalError::InvalidRectangle(format!(
                "anchor ({o}, {p}) outside the rectangle"
            )));
        }
        if !rows.is_subset(universe.col(p)) {
            return Err(OptimalError::InvalidRectangle(format!(
                "some row lacks the anchor property {p}"
            )));
        }
        if !cols.is_subset(universe.row(o)) {
            return Err(OptimalError::InvalidRectangle(format!(
                "some column is not held by the anchor object {o}"
            )));
        }
        Ok(PseudoConcept { universe, rows, cols, anchor: (o, p) })
    }

    pub fn universe(&self) -> &'r R {
        self.universe
    }

    pub fn rows(&self) -> &ObjectSet {
        &self.rows
    }

    pub fn cols(&self) -> &PropertySet {
        &self.cols
    }

    pub fn anchor(&self) -> (usize, usize) {
        self.anchor
    }

    /// Incident couples of the universe inside the rectangle.
    pub fn size(&self) -> usize {
        self.rows
            .iter()
            .map(|o| self.universe.row(o).intersection_len(&self.cols))
            .sum()
    }

    /// True iff every `(row, col)` pair is incident; vacuously true when
    /// either side is empty.
    pub fn is_dense(&self) -> bool {
        self.size() == self.rows.len() * self.cols.len()
    }
}

/// A candidate shrink of the current rectangle: either the columns change
/// (pseudo-concept of `(x, p)`) or the rows change (pseudo-concept of
/// `(o, y)`).
enum Shrink {
    Cols(PropertySet),
    Rows(ObjectSet),
}

/// Find a formal concept of `universe` containing the incident couple
/// `(o, p)` by shrinking its pseudo-concept: while the rectangle has a zero,
/// score every anchored sub-rectangle with the configured pseudo-concept
/// relevance, adopt the best one (ties broken by smaller intent, then
/// smaller extent), and finally close the dense result.
pub fn heuristic_optimal_concept<R: IncidenceRelation>(
    universe: &R,
    o: usize,
    p: usize,
    cfg: &RelevanceConfig,
) -> Result<FormalConcept, OptimalError> {
    let seed = PseudoConcept::anchored(universe, o, p)?;
    let mut rows = seed.rows;
    let mut cols = seed.cols;

    let mut col_tally = vec![0usize; universe.property_count()];
    let mut row_tally = vec![0usize; universe.object_count()];

    loop {
        let mut size = 0usize;
        for c in cols.iter() {
            let n = universe.col(c).intersection_len(&rows);
            col_tally[c] = n;
            size += n;
        }
        if size == rows.len() * cols.len() {
            break;
        }
        for r in rows.iter() {
            row_tally[r] = universe.row(r).intersection_len(&cols);
        }

        let mut best: Option<(Score, Shrink)> = None;
        for x in rows.iter() {
            let cand_cols = universe.row(x).intersection(&cols);
            if cand_cols == cols {
                continue;
            }
            let s: usize = cand_cols.iter().map(|c| col_tally[c]).sum();
            let score =
                pcf_score_parts(universe, s, cand_cols.len(), rows.len(), &cand_cols, cfg);
            consider(&mut best, score, Shrink::Cols(cand_cols), &rows, &cols);
        }
        for y in cols.iter() {
            let cand_rows = universe.col(y).intersection(&rows);
            if cand_rows == rows {
                continue;
            }
            let s: usize = cand_rows.iter().map(|r| row_tally[r]).sum();
            let score = pcf_score_parts(universe, s, cols.len(), cand_rows.len(), &cols, cfg);
            consider(&mut best, score, Shrink::Rows(cand_rows), &rows, &cols);
        }

        match best {
            Some((_, Shrink::Cols(c))) => cols = c,
            Some((_, Shrink::Rows(r))) => rows = r,
            // A zero at (x*, y*) always yields the strictly smaller
            // candidate (x*, p), so a non-dense rectangle has candidates.
            None => unreachable!("non-dense rectangle produced no shrinking candidate"),
        }
    }

    let extent = extent_in(universe, &cols);
    let intent = intent_in(universe, &extent);
    Ok(FormalConcept { extent, intent })
}

/// Keep the higher-scoring candidate; on score ties prefer the smaller
/// intent, then the smaller extent, in index-sequence order.
fn consider(
    best: &mut Option<(Score, Shrink)>,
    score: Score,
    candidate: Shrink,
    rows: &ObjectSet,
    cols: &PropertySet,
) {
    let replace = match best {
        None => true,
        Some((best_score, best_shape)) => match score.total_cmp(best_score) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                let (cand_intent, cand_extent) = shrink_views(&candidate, rows, cols);
                let (best_intent, best_extent) = shrink_views(best_shape, rows, cols);
                cand_intent
                    .cmp(best_intent)
                    .then_with(|| cand_extent.cmp(best_extent))
                    .is_lt()
            }
        },
    };
    if replace {
        *best = Some((score, candidate));
    }
}

fn shrink_views<'a>(
    shrink: &'a Shrink,
    rows: &'a ObjectSet,
    cols: &'a PropertySet,
) -> (&'a PropertySet, &'a ObjectSet) {
    match shrink {
        Shrink::Cols(c) => (c, rows),
        Shrink::Rows(r) => (cols, r),
    }
}

/// Among all concepts of `ctx` whose rectangle contains `(o, p)`, the one
/// maximizing concept relevance, ties broken by smaller intent then smaller
/// extent. Enumeration-backed; subject to the default enumeration guard.
pub fn brute_optimal_concept(
    ctx: &FormalContext,
    o: usize,
    p: usize,
    cfg: &RelevanceConfig,
) -> Result<FormalConcept, OptimalError> {
    if !ctx.has(o, p) {
        return Err(OptimalError::NotIncident { object: o, property: p });
    }
    let lattice = crate::concepts::enumerate_concepts(ctx)?;
    let mut best: Option<(Score, &FormalConcept)> = None;
    for c in lattice.concepts().iter().filter(|c| c.contains_couple(o, p)) {
        let score = concept_score(ctx, c, cfg);
        let replace = match &best {
            None => true,
            Some((best_score, best_concept)) => match score.total_cmp(best_score) {
                std::cmp::Ordering::Greater => true,
                std::cmp::Ordering::Less => false,
                std::cmp::Ordering::Equal => c
                    .intent
                    .cmp(&best_concept.intent)
                    .then_with(|| c.extent.cmp(&best_concept.extent))
                    .is_lt(),
            },
        };
        if replace {
            best = Some((score, c));
        }
    }
    Ok(best.expect("an incident couple always lies in some concept").1.clone())
}
