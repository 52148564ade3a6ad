//! Binary contexts: objects, properties, an incidence relation, and the
//! derivation operators over them.
//!
//! A [`FormalContext`] is immutable after construction and safe to share
//! across threads; the parsers are pure functions of their input text.
//! Internally everything is index-based — labels only matter at the I/O
//! boundary.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bitset::{BitSet, ObjectSet, PropertySet};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContextError {
    #[error("line {line}: invalid token {token:?}, expected a non-negative integer")]
    InvalidToken { line: usize, token: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("line {line}: cell {cell:?} is not 0 or 1")]
    InvalidCell { line: usize, cell: String },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("duplicate object label {0:?}")]
    DuplicateObject(String),
    #[error("duplicate property label {0:?}")]
    DuplicateProperty(String),
    #[error("object {object}: property index {index} out of bounds ({bound} properties)")]
    PropertyOutOfBounds { object: usize, index: usize, bound: usize },
}

/// Anything that behaves as a binary relation between the index spaces
/// `0..object_count` and `0..property_count`. Implemented by the full
/// [`FormalContext`] and by partial relations built during covering.
pub trait IncidenceRelation {
    fn object_count(&self) -> usize;
    fn property_count(&self) -> usize;
    /// Properties incident to object `o`.
    fn row(&self, o: usize) -> &PropertySet;
    /// Objects incident to property `p`.
    fn col(&self, p: usize) -> &ObjectSet;

    fn has(&self, o: usize, p: usize) -> bool {
        self.row(o).contains(p)
    }

    fn couple_count(&self) -> usize {
        (0..self.object_count()).map(|o| self.row(o).len()).sum()
    }

    /// All incident couples `(o, p)`, row-major.
    fn couples(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.couple_count());
        for o in 0..self.object_count() {
            for p in self.row(o).iter() {
                out.push((o, p));
            }
        }
        out
    }
}

/// Properties common to every object of `objects`; the full property set when
/// `objects` is empty.
pub fn intent_in<R: IncidenceRelation + ?Sized>(rel: &R, objects: &ObjectSet) -> PropertySet {
    let mut out = BitSet::full(rel.property_count());
    for o in objects.iter() {
        out.intersect_with(rel.row(o));
    }
    out
}

/// Objects holding every property of `properties`; the full object set when
/// `properties` is empty.
pub fn extent_in<R: IncidenceRelation + ?Sized>(rel: &R, properties: &PropertySet) -> ObjectSet {
    let mut out = BitSet::full(rel.object_count());
    for p in properties.iter() {
        out.intersect_with(rel.col(p));
    }
    out
}

/// Closure of a property set: derive its extent, then that extent's intent.
/// Extensive, monotone and idempotent.
pub fn close_intent_in<R: IncidenceRelation + ?Sized>(rel: &R, properties: &PropertySet) -> PropertySet {
    intent_in(rel, &extent_in(rel, properties))
}

/// An immutable binary context: labelled objects and properties plus the
/// incidence relation between them, stored both row-wise and column-wise.
#[derive(Debug, Clone)]
pub struct FormalContext {
    object_labels: Vec<String>,
    property_labels: Vec<String>,
    rows: Vec<PropertySet>,
    cols: Vec<ObjectSet>,
    n_couples: usize,
}

impl FormalContext {
    /// Build a context from labels and per-object property-index lists.
    /// Duplicate indices within a row collapse. Labels must be unique.
    pub fn new(
        object_labels: Vec<String>,
        property_labels: Vec<String>,
        incidence: Vec<Vec<usize>>,
    ) -> Result<Self, ContextError> {
        assert_eq!(object_labels.len(), incidence.len(), "one incidence row per object");
        check_unique(&object_labels).map_err(ContextError::DuplicateObject)?;
        check_unique(&property_labels).map_err(ContextError::DuplicateProperty)?;

        let n_objects = object_labels.len();
        let n_props = property_labels.len();
        let mut rows = Vec::with_capacity(n_objects);
        for (o, props) in incidence.into_iter().enumerate() {
            let mut row = BitSet::new(n_props);
            for p in props {
                if p >= n_props {
                    return Err(ContextError::PropertyOutOfBounds { object: o, index: p, bound: n_props });
                }
                row.insert(p);
            }
            rows.push(row);
        }

        let mut cols = vec![BitSet::new(n_objects); n_props];
        let mut n_couples = 0;
        for (o, row) in rows.iter().enumerate() {
            n_couples += row.len();
            for p in row.iter() {
                cols[p].insert(o);
            }
        }

        Ok(FormalContext { object_labels, property_labels, rows, cols, n_couples })
    }

    pub fn object_labels(&self) -> &[String] {
        &self.object_labels
    }

    pub fn property_labels(&self) -> &[String] {
        &self.property_labels
    }

    pub fn object_label(&self, o: usize) -> &str {
        &self.object_labels[o]
    }

    pub fn property_label(&self, p: usize) -> &str {
        &self.property_labels[p]
    }

    /// The `A▶` operator: properties common to all objects of `objects`.
    pub fn intent_of(&self, objects: &ObjectSet) -> PropertySet {
        intent_in(self, objects)
    }

    /// The `B◀` operator: objects holding all properties of `properties`.
    pub fn extent_of(&self, properties: &PropertySet) -> ObjectSet {
        extent_in(self, properties)
    }

    /// `(B◀)▶`.
    pub fn close_intent(&self, properties: &PropertySet) -> PropertySet {
        close_intent_in(self, properties)
    }

    pub fn full_object_set(&self) -> ObjectSet {
        BitSet::full(self.object_count())
    }

    pub fn full_property_set(&self) -> PropertySet {
        BitSet::full(self.property_count())
    }

    /// Render an object set as `{o1,o2}` using labels, members in index order.
    pub fn format_objects(&self, objects: &ObjectSet) -> String {
        format_labels(objects, &self.object_labels)
    }

    /// Render a property set as `{A,B}` using labels, members in index order.
    pub fn format_properties(&self, properties: &PropertySet) -> String {
        format_labels(properties, &self.property_labels)
    }

    /// Serialize to Burmeister `.cxt` text. `parse_cxt` of the result yields
    /// this context back, byte-identically re-serialized.
    pub fn to_cxt(&self) -> String {
        let mut out = String::from("B\n\n");
        out.push_str(&format!("{}\n{}\n\n", self.object_count(), self.property_count()));
        for label in &self.object_labels {
            out.push_str(label);
            out.push('\n');
        }
        for label in &self.property_labels {
            out.push_str(label);
            out.push('\n');
        }
        for row in &self.rows {
            for p in 0..self.property_count() {
                out.push(if row.contains(p) { 'X' } else { '.' });
            }
            out.push('\n');
        }
        out
    }
}

impl IncidenceRelation for FormalContext {
    fn object_count(&self) -> usize {
        self.object_labels.len()
    }

    fn property_count(&self) -> usize {
        self.property_labels.len()
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

fn check_unique(labels: &[String]) -> Result<(), String> {
    let mut seen = std::collections::HashSet::new();
    for label in labels {
        if !seen.insert(label.as_str()) {
            return Err(label.clone());
        }
    }
    Ok(())
}

fn format_labels(set: &BitSet, labels: &[String]) -> String {
    let mut out = String::from("{");
    for (k, i) in set.iter().enumerate() {
        if k > 0 {
            out.push(',');
        }
        out.push_str(&labels[i]);
    }
    out.push('}');
    out
}

/// Parse FIMI `.dat` text: one transaction per line, whitespace-separated
/// non-negative integer item ids. Objects are labelled `t<line-index>`
/// (0-based), properties `i<id>` ordered by ascending id. Duplicate items
/// within a line collapse; an empty line is an object with an empty row.
pub fn parse_fimi(text: &str) -> Result<FormalContext, ContextError> {
    let mut transactions: Vec<Vec<u64>> = Vec::new();
    let mut items: BTreeMap<u64, usize> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        let mut tx = Vec::new();
        for token in line.split_whitespace() {
            let id: u64 = token.parse().map_err(|_| ContextError::InvalidToken {
                line: lineno + 1,
                token: token.to_string(),
            })?;
            items.insert(id, 0);
            tx.push(id);
        }
        transactions.push(tx);
    }
    for (index, slot) in items.values_mut().enumerate() {
        *slot = index;
    }

    let object_labels = (0..transactions.len()).map(|i| format!("t{i}")).collect();
    let property_labels = items.keys().map(|id| format!("i{id}")).collect();
    let incidence = transactions
        .into_iter()
        .map(|tx| tx.into_iter().map(|id| items[&id]).collect())
        .collect();
    FormalContext::new(object_labels, property_labels, incidence)
}

/// Parse a 0/1 table: a header whose first cell is empty or `O\I` followed by
/// property labels, then one row per object (label first, then 0/1 cells).
/// The delimiter is `;` when the header contains one, `,` otherwise.
pub fn parse_csv(text: &str) -> Result<FormalContext, ContextError> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n, l.trim_end_matches('\r')));
    let (_, header) = lines.next().ok_or(ContextError::Malformed {
        line: 1,
        msg: "empty input, expected a header row".into(),
    })?;
    let sep = if header.contains(';') { ';' } else { ',' };
    let mut cells = header.split(sep);
    let corner = cells.next().unwrap_or("").trim();
    if !corner.is_empty() && corner != "O\\I" {
        return Err(ContextError::Malformed {
            line: 1,
            msg: format!("first header cell must be empty or \"O\\I\", found {corner:?}"),
        });
    }
    let property_labels: Vec<String> = cells.map(|c| c.trim().to_string()).collect();
    if property_labels.iter().any(String::is_empty) {
        return Err(ContextError::Malformed { line: 1, msg: "empty property label in header".into() });
    }

    let n_props = property_labels.len();
    let mut object_labels = Vec::new();
    let mut incidence = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split(sep);
        let label = cells.next().unwrap().trim().to_string();
        let mut row = Vec::new();
        let mut found = 0;
        for (p, cell) in cells.enumerate() {
            found += 1;
            match cell.trim() {
                "0" => {}
                "1" => row.push(p),
                other => {
                    return Err(ContextError::InvalidCell { line: lineno + 1, cell: other.to_string() })
                }
            }
        }
        if found != n_props {
            return Err(ContextError::RaggedRow { line: lineno + 1, expected: n_props, found });
        }
        object_labels.push(label);
        incidence.push(row);
    }
    FormalContext::new(object_labels, property_labels, incidence)
}

/// Parse Burmeister `.cxt` text: `B`, a name line, the object and property
/// counts, a blank line, object labels, property labels, then one `.`/`X`
/// row per object.
pub fn parse_cxt(text: &str) -> Result<FormalContext, ContextError> {
    struct Cursor<'a> {
        lines: Vec<&'a str>,
        at: usize,
    }
    impl<'a> Cursor<'a> {
        fn next(&mut self, what: &str) -> Result<&'a str, ContextError> {
            let line = self.lines.get(self.at).copied().ok_or(ContextError::Malformed {
                line: self.at + 1,
                msg: format!("unexpected end of input, expected {what}"),
            })?;
            self.at += 1;
            Ok(line)
        }
    }

    let mut cur = Cursor { lines: text.lines().map(|l| l.trim_end_matches('\r')).collect(), at: 0 };

    let magic = cur.next("format tag \"B\"")?;
    if magic.trim() != "B" {
        return Err(ContextError::Malformed { line: 1, msg: format!("expected \"B\", found {magic:?}") });
    }
    cur.next("name line")?;
    let n_objects: usize = parse_count(cur.next("object count")?, cur.at)?;
    let n_props: usize = parse_count(cur.next("property count")?, cur.at)?;
    let sep = cur.next("blank separator line")?;
    if !sep.trim().is_empty() {
        return Err(ContextError::Malformed {
            line: cur.at,
            msg: "expected a blank line after the counts".into(),
        });
    }

    let mut object_labels = Vec::with_capacity(n_objects);
    for _ in 0..n_objects {
        object_labels.push(cur.next("object label")?.to_string());
    }
    let mut property_labels = Vec::with_capacity(n_props);
    for _ in 0..n_props {
        property_labels.push(cur.next("property label")?.to_string());
    }

    let mut incidence = Vec::with_capacity(n_objects);
    for _ in 0..n_objects {
        let row_line = cur.next("incidence row")?;
        let lineno = cur.at;
        if row_line.chars().count() != n_props {
            return Err(ContextError::RaggedRow {
                line: lineno,
                expected: n_props,
                found: row_line.chars().count(),
            });
        }
        let mut row = Vec::new();
        for (p, c) in row_line.chars().enumerate() {
            match c {
                'X' | 'x' => row.push(p),
                '.' => {}
                other => {
                    return Err(ContextError::InvalidCell { line: lineno, cell: other.to_string() })
                }
            }
        }
        incidence.push(row);
    }
    FormalContext::new(object_labels, property_labels, incidence)
}

fn parse_count(line: &str, lineno: usize) -> Result<usize, ContextError> {
    line.trim().parse().map_err(|_| ContextError::InvalidToken {
        line: lineno,
        token: line.to_string(),
    })
}
