//! Quality measures for concepts and pseudo-concepts: length, width, rule
//! confidence, and the composite relevance scores the miner optimizes.
//!
//! Two pseudo-concept formulas exist side by side. [`PcfFormula::Def10`]
//! scores `[Size/(length+width)] * [(length+width) - Size]`;
//! [`PcfFormula::Def10Conf`] replaces the first denominator with
//! `length + conf`. Def10 is the default.

use std::cmp::Ordering;

use thiserror::Error;

use crate::bitset::PropertySet;
use crate::concepts::{is_concept, FormalConcept};
use crate::context::{extent_in, FormalContext, IncidenceRelation};
use crate::optimal::PseudoConcept;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RelevanceError {
    #[error("input pair is not a formal concept of the context")]
    NotAConcept,
}

/// Which pseudo-concept relevance formula to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PcfFormula {
    /// `[Size/(length+width)] * [(length+width) - Size]`
    #[default]
    Def10,
    /// `[Size/(length+conf)] * [(length+width) - Size]`
    Def10Conf,
}

/// Scoring knobs shared by the optimal-concept search and the cover builder.
#[derive(Debug, Clone, Copy)]
pub struct RelevanceConfig {
    pub pcf_formula: PcfFormula,
    /// Confidence assigned to intents with fewer than two properties, which
    /// generate no rules. Must lie in `[0, 1]`.
    pub single_item_conf: f64,
}

impl Default for RelevanceConfig {
    fn default() -> Self {
        RelevanceConfig { pcf_formula: PcfFormula::Def10, single_item_conf: 0.0 }
    }
}

/// A relevance value. Comparisons go through the exact integer ratio when
/// both sides have one (cross-multiplication), falling back to the float
/// value with an absolute epsilon of 1e-12.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Score {
    pub value: f64,
    exact: Option<(i128, i128)>,
}

const SCORE_EPSILON: f64 = 1e-12;

impl Score {
    pub(crate) fn from_ratio(num: i128, den: i128) -> Self {
        debug_assert!(den > 0);
        Score { value: num as f64 / den as f64, exact: Some((num, den)) }
    }

    pub(crate) fn from_float(value: f64) -> Self {
        Score { value, exact: None }
    }

    pub(crate) fn total_cmp(&self, other: &Score) -> Ordering {
        match (self.exact, other.exact) {
            (Some((n1, d1)), Some((n2, d2))) => (n1 * d2).cmp(&(n2 * d1)),
            _ => {
                if (self.value - other.value).abs() <= SCORE_EPSILON {
                    Ordering::Equal
                } else {
                    self.value.partial_cmp(&other.value).unwrap_or(Ordering::Equal)
                }
            }
        }
    }
}

/// A confidence, kept as an exact count ratio when it comes from the data.
#[derive(Debug, Clone, Copy)]
pub(crate) enum ConfValue {
    Ratio(u64, u64),
    Float(f64),
}

impl ConfValue {
    fn to_f64(self) -> f64 {
        match self {
            ConfValue::Ratio(_, 0) => 0.0,
            ConfValue::Ratio(n, d) => n as f64 / d as f64,
            ConfValue::Float(v) => v,
        }
    }
}

/// Maximum confidence over the rules `X → B∖X` generated from `intent`.
/// By antitonicity of derivation the maximum is reached at a co-atom
/// (`intent` minus one property), so only those are probed.
pub(crate) fn intent_confidence_value<R: IncidenceRelation + ?Sized>(
    rel: &R,
    intent: &PropertySet,
    single_item_conf: f64,
) -> ConfValue {
    if intent.len() < 2 {
        return if single_item_conf == 0.0 {
            ConfValue::Ratio(0, 1)
        } else {
            ConfValue::Float(single_item_conf)
        };
    }
    let full = extent_in(rel, intent).len() as u64;
    let mut min_coatom = u64::MAX;
    for b in intent.iter() {
        let mut coatom = intent.clone();
        coatom.remove(b);
        min_coatom = min_coatom.min(extent_in(rel, &coatom).len() as u64);
    }
    if min_coatom == 0 {
        ConfValue::Ratio(0, 1)
    } else {
        ConfValue::Ratio(full, min_coatom)
    }
}

/// Maximum confidence of the rules generated from the concept's intent, or
/// `single_item_conf` when the intent has fewer than two properties.
pub fn concept_confidence(
    ctx: &FormalContext,
    concept: &FormalConcept,
    cfg: &RelevanceConfig,
) -> Result<f64, RelevanceError> {
    if !is_concept(ctx, &concept.extent, &concept.intent) {
        return Err(RelevanceError::NotAConcept);
    }
    Ok(intent_confidence_value(ctx, &concept.intent, cfg.single_item_conf).to_f64())
}

pub(crate) fn concept_score(
    ctx: &FormalContext,
    concept: &FormalConcept,
    cfg: &RelevanceConfig,
) -> Score {
    let length = concept.intent.len() as i128;
    let width = concept.extent.len() as i128;
    match intent_confidence_value(ctx, &concept.intent, cfg.single_item_conf) {
        ConfValue::Ratio(num, den) => {
            debug_assert!(den > 0);
            Score::from_ratio((length * den as i128 + num as i128) * (length + width), den as i128)
        }
        ConfValue::Float(v) => {
            Score::from_float((length as f64 + v) * (length + width) as f64)
        }
    }
}

/// `(length + conf) * (length + width)` with length = |intent|,
/// width = |extent| and conf = [`concept_confidence`].
pub fn concept_relevance(
    ctx: &FormalContext,
    concept: &FormalConcept,
    cfg: &RelevanceConfig,
) -> Result<f64, RelevanceError> {
    if !is_concept(ctx, &concept.extent, &concept.intent) {
        return Err(RelevanceError::NotAConcept);
    }
    Ok(concept_score(ctx, concept, cfg).value)
}

/// Number of incident couples inside the pseudo-concept's rectangle. Equals
/// `length * width` exactly when the rectangle is dense.
pub fn pcf_size<R: IncidenceRelation>(pcf: &PseudoConcept<'_, R>) -> usize {
    pcf.size()
}

pub(crate) fn pcf_score_parts<R: IncidenceRelation + ?Sized>(
    universe: &R,
    size: usize,
    length: usize,
    width: usize,
    intent: &PropertySet,
    cfg: &RelevanceConfig,
) -> Score {
    let size = size as i128;
    let length = length as i128;
    let total = length + width as i128;
    let slack = total - size;
    match cfg.pcf_formula {
        PcfFormula::Def10 => {
            if total == 0 {
                Score::from_ratio(0, 1)
            } else {
                Score::from_ratio(size * slack, total)
            }
        }
        PcfFormula::Def10Conf => {
            match intent_confidence_value(universe, intent, cfg.single_item_conf) {
                ConfValue::Ratio(num, den) => {
                    let denominator = length * den as i128 + num as i128;
                    if denominator == 0 {
                        Score::from_ratio(0, 1)
                    } else {
                        Score::from_ratio(size * den as i128 * slack, denominator)
                    }
                }
                ConfValue::Float(v) => {
                    let denominator = length as f64 + v;
                    if denominator == 0.0 {
                        Score::from_float(0.0)
                    } else {
                        Score::from_float(size as f64 / denominator * slack as f64)
                    }
                }
            }
        }
    }
}

pub(crate) fn pcf_score<R: IncidenceRelation>(
    pcf: &PseudoConcept<'_, R>,
    cfg: &RelevanceConfig,
) -> Score {
    pcf_score_parts(pcf.universe(), pcf.size(), pcf.cols().len(), pcf.rows().len(), pcf.cols(), cfg)
}

/// Relevance of a pseudo-concept under the configured formula.
pub fn pcf_relevance<R: IncidenceRelation>(pcf: &PseudoConcept<'_, R>, cfg: &RelevanceConfig) -> f64 {
    pcf_score(pcf, cfg).value
}
