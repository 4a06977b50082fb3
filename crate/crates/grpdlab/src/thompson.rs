//! Elements of the generalized Brin–Thompson group V_{k_1,…,k_m} as box
//! tables.
//!
//! A table is a list of columns (v; u), each a pair of word tuples. The
//! v-boxes form a partition of the product Cantor space, the u-boxes form
//! another, and the induced homeomorphism sends the point v_j·x to u_j·x
//! (prefix substitution with independent tails per coordinate). Partition
//! certificates are exact rationals. Column order is preserved verbatim so
//! that serialized tables round-trip bit-exactly; only `reduce` rewrites
//! the column list, and semantic comparisons go through `equals`.

use crate::config::MAX_ALPHABET;
use crate::sft::{
    box_kraft, boxes_disjoint, is_full_group_element, relate_cell, CellRelation,
    CylinderBisection, CylinderPair, SftError, Word, WordBox,
};
use num_rational::Rational64;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ThompsonError {
    #[error(transparent)]
    Word(#[from] SftError),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("coordinate counts disagree: {0} vs {1}")]
    CoordinateMismatch(usize, usize),
    #[error("prefix tuple is too shallow to lie inside a single column")]
    DepthTooSmall,
    #[error("table is not valid: {0}")]
    InvalidTable(String),
    #[error("words `{0}` and `{1}` are prefix-comparable; no transposition")]
    ComparableWords(String, String),
    #[error("bisection is not a full-group element; it has no table")]
    NotFullGroup,
}

/// One table column: domain box v, range box u.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TableColumn {
    pub v: WordBox,
    pub u: WordBox,
}

/// A box table over alphabets k_1,…,k_m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    alphabets: Vec<u32>,
    columns: Vec<TableColumn>,
}

/// Wire format: `{"alphabets":[k_i],"columns":[{"v":["w_1",…],"u":[…]}]}`,
/// words as digit strings, ε as `""`. Column order is significant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableJson {
    pub alphabets: Vec<u32>,
    pub columns: Vec<TableColumnJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TableColumnJson {
    pub v: Vec<String>,
    pub u: Vec<String>,
}

/// Diagnostic partition report for the two rows of a table.
#[derive(Debug, Clone)]
pub struct TableValidation {
    pub violations: Vec<String>,
    pub v_measure: Rational64,
    pub u_measure: Rational64,
}

impl TableValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for TableValidation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return write!(f, "valid table (both rows partition, measure 1)");
        }
        writeln!(f, "invalid table:")?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        write!(
            f,
            "  v-row measure {}, u-row measure {}",
            self.v_measure, self.u_measure
        )
    }
}

impl Table {
    /// Structural checks only (alphabet ranges, coordinate counts); the
    /// partition condition is reported by [`Table::validate`] so that
    /// malformed tables can still be diagnosed.
    pub fn new(alphabets: Vec<u32>, columns: Vec<TableColumn>) -> Result<Self, ThompsonError> {
        for &k in &alphabets {
            if !(2..=MAX_ALPHABET).contains(&k) {
                return Err(SftError::BadAlphabet(k).into());
            }
        }
        for c in &columns {
            for row in [&c.v, &c.u] {
                if row.len() != alphabets.len() {
                    return Err(ThompsonError::CoordinateMismatch(row.len(), alphabets.len()));
                }
                for (w, &k) in row.iter().zip(&alphabets) {
                    if w.k() != k {
                        return Err(ThompsonError::AlphabetMismatch(format!(
                            "word alphabet {} vs declared {k}",
                            w.k()
                        )));
                    }
                }
            }
        }
        Ok(Table { alphabets, columns })
    }

    pub fn identity(alphabets: Vec<u32>) -> Result<Self, ThompsonError> {
        let eps: WordBox = alphabets
            .iter()
            .map(|&k| Word::empty(k))
            .collect::<Result<_, _>>()?;
        Self::new(
            alphabets,
            vec![TableColumn {
                v: eps.clone(),
                u: eps,
            }],
        )
    }

    pub fn alphabets(&self) -> &[u32] {
        &self.alphabets
    }

    pub fn m(&self) -> usize {
        self.alphabets.len()
    }

    pub fn columns(&self) -> &[TableColumn] {
        &self.columns
    }

    pub fn from_json(j: &TableJson) -> Result<Self, ThompsonError> {
        let parse_row = |row: &[String]| -> Result<WordBox, ThompsonError> {
            if row.len() != j.alphabets.len() {
                return Err(ThompsonError::CoordinateMismatch(
                    row.len(),
                    j.alphabets.len(),
                ));
            }
            Ok(row
                .iter()
                .zip(&j.alphabets)
                .map(|(s, &k)| Word::parse(s, k))
                .collect::<Result<_, _>>()?)
        };
        let columns = j
            .columns
            .iter()
            .map(|c| {
                Ok(TableColumn {
                    v: parse_row(&c.v)?,
                    u: parse_row(&c.u)?,
                })
            })
            .collect::<Result<Vec<_>, ThompsonError>>()?;
        Self::new(j.alphabets.clone(), columns)
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            alphabets: self.alphabets.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| TableColumnJson {
                    v: c.v.iter().map(Word::to_string).collect(),
                    u: c.u.iter().map(Word::to_string).collect(),
                })
                .collect(),
        }
    }

    /// Checks that both rows are partitions: pairwise disjoint boxes and
    /// exact Kraft measure 1.
    pub fn validate(&self) -> TableValidation {
        let mut violations = Vec::new();
        for (row_name, row) in [("v", 0), ("u", 1)] {
            let boxes: Vec<&WordBox> = self
                .columns
                .iter()
                .map(|c| if row == 0 { &c.v } else { &c.u })
                .collect();
            for i in 0..boxes.len() {
                for j in (i + 1)..boxes.len() {
                    if !boxes_disjoint(boxes[i], boxes[j]) {
                        violations
                            .push(format!("{row_name}-boxes of columns {i} and {j} overlap"));
                    }
                }
            }
        }
        let v_measure: Rational64 = self.columns.iter().map(|c| box_kraft(&c.v)).sum();
        let u_measure: Rational64 = self.columns.iter().map(|c| box_kraft(&c.u)).sum();
        if !v_measure.is_one() {
            violations.push(format!(
                "v-row Kraft measure {v_measure} (deficit {})",
                Rational64::one() - v_measure
            ));
        }
        if !u_measure.is_one() {
            violations.push(format!(
                "u-row Kraft measure {u_measure} (deficit {})",
                Rational64::one() - u_measure
            ));
        }
        TableValidation {
            violations,
            v_measure,
            u_measure,
        }
    }

    fn require_valid(&self) -> Result<(), ThompsonError> {
        let rep = self.validate();
        if rep.is_valid() {
            Ok(())
        } else {
            Err(ThompsonError::InvalidTable(rep.violations.join("; ")))
        }
    }

    /// Max v-word length in coordinate `i`.
    pub(crate) fn v_depth(&self, i: usize) -> usize {
        self.columns.iter().map(|c| c.v[i].len()).max().unwrap_or(0)
    }
}

/// Evaluates the table on a prefix tuple deep enough to lie inside a
/// single v-box: substitutes u-words for v-words, preserving tails.
pub fn apply(t: &Table, input: &[Word]) -> Result<WordBox, ThompsonError> {
    t.require_valid()?;
    if input.iter().map(Word::k).collect::<Vec<_>>() != t.alphabets {
        return Err(ThompsonError::AlphabetMismatch(
            "input alphabets differ from the table".into(),
        ));
    }
    for col in &t.columns {
        if col.v.iter().zip(input).all(|(v, w)| v.is_prefix_of(w)) {
            return Ok(col
                .u
                .iter()
                .zip(&col.v)
                .zip(input)
                .map(|((u, v), w)| {
                    let tail = v.extension_to(w).expect("v-box contains the input");
                    u.concat(tail)
                })
                .collect());
        }
    }
    Err(ThompsonError::DepthTooSmall)
}

/// `outer ∘ inner` via common box refinement of inner's u-row against
/// outer's v-row; tails are pulled back through inner and pushed forward
/// through outer.
pub fn compose(outer: &Table, inner: &Table) -> Result<Table, ThompsonError> {
    inner.require_valid()?;
    outer.require_valid()?;
    if inner.alphabets != outer.alphabets {
        return Err(ThompsonError::AlphabetMismatch(format!(
            "{:?} vs {:?}",
            inner.alphabets, outer.alphabets
        )));
    }
    let mut columns = Vec::new();
    for ci in &inner.columns {
        for co in &outer.columns {
            if let Some(col) = compose_pair(ci, co) {
                columns.push(col);
            }
        }
    }
    let out = Table::new(inner.alphabets.clone(), columns)?;
    debug_assert!(out.validate().is_valid());
    Ok(out)
}

fn compose_pair(ci: &TableColumn, co: &TableColumn) -> Option<TableColumn> {
    let mut v = Vec::with_capacity(ci.v.len());
    let mut u = Vec::with_capacity(ci.v.len());
    for i in 0..ci.v.len() {
        // middle-space overlap of inner's u-box and outer's v-box
        let w = if ci.u[i].is_prefix_of(&co.v[i]) {
            co.v[i].clone()
        } else if co.v[i].is_prefix_of(&ci.u[i]) {
            ci.u[i].clone()
        } else {
            return None;
        };
        let back = ci.u[i].extension_to(&w).expect("w refines inner u");
        let fwd = co.v[i].extension_to(&w).expect("w refines outer v");
        v.push(ci.v[i].concat(back));
        u.push(co.u[i].concat(fwd));
    }
    Some(TableColumn { v, u })
}

/// Row swap: the table of the inverse homeomorphism.
pub fn invert(t: &Table) -> Table {
    Table {
        alphabets: t.alphabets.clone(),
        columns: t
            .columns
            .iter()
            .map(|c| TableColumn {
                v: c.u.clone(),
                u: c.v.clone(),
            })
            .collect(),
    }
}

/// Semantic equality of the induced homeomorphisms: evaluates both tables
/// on every prefix tuple of per-coordinate depth max(v-depths) and
/// compares the image tuples exactly. Exact comparison is sound because
/// the image of a common input cell determines the image words.
pub fn equals(s: &Table, t: &Table) -> Result<bool, ThompsonError> {
    s.require_valid()?;
    t.require_valid()?;
    if s.alphabets != t.alphabets {
        return Err(ThompsonError::AlphabetMismatch(format!(
            "{:?} vs {:?}",
            s.alphabets, t.alphabets
        )));
    }
    let depths: Vec<usize> = (0..s.m()).map(|i| s.v_depth(i).max(t.v_depth(i))).collect();
    for input in depth_tuples(&s.alphabets, &depths) {
        if apply(s, &input)? != apply(t, &input)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All word tuples with the given per-coordinate depths.
pub(crate) fn depth_tuples(alphabets: &[u32], depths: &[usize]) -> Vec<WordBox> {
    let mut tuples: Vec<WordBox> = vec![Vec::new()];
    for (i, &k) in alphabets.iter().enumerate() {
        let words: Vec<Word> = crate::sft::all_words(k, depths[i])
            .into_iter()
            .map(|letters| Word::new(k, letters).expect("letters below k"))
            .collect();
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                words.iter().map(move |w| {
                    let mut t2 = t.clone();
                    t2.push(w.clone());
                    t2
                })
            })
            .collect();
    }
    tuples
}

/// Display-form reduction: repeatedly merges any family of k_i columns
/// identical except in coordinate i, where the v-words are w·0,…,w·(k_i−1)
/// and the u-words are w′·0,…,w′·(k_i−1) with matching last letters. The
/// result induces the same homeomorphism; equality checks never rely on
/// reduced forms.
pub fn reduce(t: &Table) -> Result<Table, ThompsonError> {
    t.require_valid()?;
    let mut columns = t.columns.clone();
    'restart: loop {
        for i in 0..t.m() {
            let k = t.alphabets[i];
            // key: the column with coordinate i replaced by the parents
            let mut groups: BTreeMap<(WordBox, WordBox), Vec<(u8, usize)>> = BTreeMap::new();
            for (pos, col) in columns.iter().enumerate() {
                let (Some(&cv), Some(&cu)) = (col.v[i].letters().last(), col.u[i].letters().last())
                else {
                    continue;
                };
                if cv != cu {
                    continue;
                }
                let mut v_parent = col.v.clone();
                let mut u_parent = col.u.clone();
                v_parent[i] = Word::new(col.v[i].k(), col.v[i].letters()[..col.v[i].len() - 1].to_vec())
                    .expect("parent of a valid word");
                u_parent[i] = Word::new(col.u[i].k(), col.u[i].letters()[..col.u[i].len() - 1].to_vec())
                    .expect("parent of a valid word");
                groups.entry((v_parent, u_parent)).or_default().push((cv, pos));
            }
            for ((v_parent, u_parent), members) in groups {
                if members.len() != k as usize {
                    continue;
                }
                let mut letters: Vec<u8> = members.iter().map(|&(c, _)| c).collect();
                letters.sort_unstable();
                if letters != (0..k as u8).collect::<Vec<_>>() {
                    continue;
                }
                let first = members.iter().map(|&(_, p)| p).min().expect("nonempty");
                let drop: Vec<usize> = members.iter().map(|&(_, p)| p).collect();
                columns[first] = TableColumn {
                    v: v_parent,
                    u: u_parent,
                };
                let mut pos = 0usize;
                columns.retain(|_| {
                    let keep = pos == first || !drop.contains(&pos);
                    pos += 1;
                    keep
                });
                continue 'restart;
            }
        }
        break;
    }
    Table::new(t.alphabets.clone(), columns)
}

/// The table swapping the coordinate-`i` prefix boxes a· ↔ b· and fixing
/// the complement, which is partitioned into canonical prefix cells.
pub fn prefix_transposition(
    alphabets: &[u32],
    coordinate: usize,
    a: &Word,
    b: &Word,
) -> Result<Table, ThompsonError> {
    if coordinate >= alphabets.len() {
        return Err(ThompsonError::CoordinateMismatch(coordinate, alphabets.len()));
    }
    if a.k() != alphabets[coordinate] || b.k() != alphabets[coordinate] {
        return Err(ThompsonError::AlphabetMismatch(format!(
            "words over alphabet {}/{} vs coordinate alphabet {}",
            a.k(),
            b.k(),
            alphabets[coordinate]
        )));
    }
    if a.comparable(b) {
        return Err(ThompsonError::ComparableWords(
            format!("{a}"),
            format!("{b}"),
        ));
    }
    let mut box_a: WordBox = alphabets
        .iter()
        .map(|&k| Word::empty(k))
        .collect::<Result<_, _>>()?;
    let mut box_b = box_a.clone();
    box_a[coordinate] = a.clone();
    box_b[coordinate] = b.clone();

    let mut cells = Vec::new();
    let root: WordBox = alphabets
        .iter()
        .map(|&k| Word::empty(k))
        .collect::<Result<_, _>>()?;
    let mut stack = vec![root];
    while let Some(cell) = stack.pop() {
        let rel_a = relate_cell(&cell, &box_a);
        if matches!(rel_a, CellRelation::Inside) {
            continue; // covered by the swap columns
        }
        if let CellRelation::Straddles(j) = rel_a {
            for c in 0..alphabets[j] as u8 {
                let mut child = cell.clone();
                child[j] = child[j].child(c);
                stack.push(child);
            }
            continue;
        }
        match relate_cell(&cell, &box_b) {
            CellRelation::Inside => {}
            CellRelation::Straddles(j) => {
                for c in 0..alphabets[j] as u8 {
                    let mut child = cell.clone();
                    child[j] = child[j].child(c);
                    stack.push(child);
                }
            }
            CellRelation::Disjoint => cells.push(cell),
        }
    }
    cells.sort();
    let mut columns = vec![
        TableColumn {
            v: box_a.clone(),
            u: box_b.clone(),
        },
        TableColumn {
            v: box_b,
            u: box_a,
        },
    ];
    columns.extend(cells.into_iter().map(|cell| TableColumn {
        v: cell.clone(),
        u: cell,
    }));
    let out = Table::new(alphabets.to_vec(), columns)?;
    debug_assert!(out.validate().is_valid());
    Ok(out)
}

/// The full-group bisection of a table: column (v;u) becomes the cylinder
/// pair Z(u,v) (range u, domain v), so the bisection action agrees with
/// `apply`.
pub fn table_to_bisection(t: &Table) -> Result<CylinderBisection, ThompsonError> {
    t.require_valid()?;
    let columns = t
        .columns
        .iter()
        .map(|c| CylinderPair::new(c.u.clone(), c.v.clone()))
        .collect::<Result<Vec<_>, _>>()?;
    let s = CylinderBisection::new(t.alphabets.clone(), columns)?;
    debug_assert!(is_full_group_element(&s));
    Ok(s)
}

/// The table of a full-group bisection: cylinder pair Z(γ,δ) becomes the
/// column (δ;γ).
pub fn bisection_to_table(s: &CylinderBisection) -> Result<Table, ThompsonError> {
    if !is_full_group_element(s) {
        return Err(ThompsonError::NotFullGroup);
    }
    let columns = s
        .columns()
        .iter()
        .map(|c| TableColumn {
            v: c.domain_box(),
            u: c.range_box(),
        })
        .collect();
    let out = Table::new(s.alphabets().to_vec(), columns)?;
    debug_assert!(out.validate().is_valid());
    Ok(out)
}
