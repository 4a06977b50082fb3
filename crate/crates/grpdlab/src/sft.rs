//! Symbolic calculus for products of full shifts G_{k_1}×…×G_{k_m}.
//!
//! Arrows of a full shift are tail equivalences with lag, and the compact
//! open bisections used here are finite unions of product cylinder pairs
//! ⋃_j ∏_i Z(γ_i^(j), δ_i^(j)), stored as [`CylinderBisection`] columns.
//! All measures are exact rationals (Kraft sums Σ ∏ k_i^{-|δ_i|}); no
//! floating point appears in this module.

use crate::config::MAX_ALPHABET;
use itertools::Itertools;
use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SftError {
    #[error("alphabet size {0} out of range (need 2 ≤ k ≤ {MAX_ALPHABET})")]
    BadAlphabet(u32),
    #[error("letter `{0}` is not a digit below the alphabet size {1}")]
    BadLetter(char, u32),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("coordinate counts disagree: {0} vs {1}")]
    CoordinateMismatch(usize, usize),
    #[error("{row} boxes of columns {col1} and {col2} overlap")]
    BisectionOverlap {
        row: &'static str,
        col1: usize,
        col2: usize,
    },
    #[error("box escapes the domain of the bisection")]
    BoxEscapesDomain,
    #[error("domain and range boxes overlap; pre-split the cylinder pair first")]
    OverlappingBoxes,
    #[error("box family is not pairwise disjoint")]
    NotDisjointFamily,
    #[error("not a full-group element (Kraft measures must equal 1 exactly)")]
    NotFullGroup,
    #[error("cannot split: the pair keeps a periodic overlap direction ({0})")]
    PeriodicCore(String),
}

/// A finite word over `{0,…,k-1}`, carrying its alphabet size.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    k: u32,
    letters: Vec<u8>,
}

impl Word {
    pub fn new(k: u32, letters: Vec<u8>) -> Result<Self, SftError> {
        if !(2..=MAX_ALPHABET).contains(&k) {
            return Err(SftError::BadAlphabet(k));
        }
        if let Some(&bad) = letters.iter().find(|&&c| u32::from(c) >= k) {
            return Err(SftError::BadLetter((b'0' + bad) as char, k));
        }
        Ok(Word { k, letters })
    }

    pub fn empty(k: u32) -> Result<Self, SftError> {
        Self::new(k, Vec::new())
    }

    /// Parses a digit string; `""` is the empty word ε.
    pub fn parse(s: &str, k: u32) -> Result<Self, SftError> {
        let letters = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .filter(|&d| d < k)
                    .map(|d| d as u8)
                    .ok_or(SftError::BadLetter(c, k))
            })
            .collect::<Result<Vec<u8>, _>>()?;
        Self::new(k, letters)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.letters.len() >= self.letters.len()
            && other.letters[..self.letters.len()] == self.letters[..]
    }

    pub fn comparable(&self, other: &Word) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// `other = self·u` → `u`.
    pub fn extension_to<'a>(&self, other: &'a Word) -> Option<&'a [u8]> {
        if self.is_prefix_of(other) {
            Some(&other.letters[self.letters.len()..])
        } else {
            None
        }
    }

    pub fn concat(&self, tail: &[u8]) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(tail);
        Word { k: self.k, letters }
    }

    pub fn child(&self, c: u8) -> Word {
        self.concat(&[c])
    }

    /// Kraft weight k^{-|w|}.
    pub fn kraft(&self) -> Rational64 {
        Rational64::new(1, (i64::from(self.k)).pow(self.letters.len() as u32))
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &c in &self.letters {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A product box ∏_i w_i X_{k_i} of the unit space, one word per coordinate.
pub type WordBox = Vec<Word>;

pub fn box_kraft(b: &[Word]) -> Rational64 {
    b.iter().map(Word::kraft).product()
}

/// Boxes are disjoint iff some coordinate has prefix-incomparable words.
pub fn boxes_disjoint(a: &[Word], b: &[Word]) -> bool {
    a.iter().zip(b).any(|(x, y)| !x.comparable(y))
}

/// Intersection of product boxes: coordinatewise the longer word, when all
/// coordinates are comparable.
pub fn box_intersection(a: &[Word], b: &[Word]) -> Option<WordBox> {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            if x.is_prefix_of(y) {
                Some(y.clone())
            } else if y.is_prefix_of(x) {
                Some(x.clone())
            } else {
                None
            }
        })
        .collect()
}

/// One product cylinder ∏_i Z(γ_i, δ_i): range words γ, domain words δ.
/// Its arrows are ((γ_i x_i)_i, (|γ_i|-|δ_i|)_i, (δ_i x_i)_i) over
/// independent tails x_i.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CylinderPair {
    range: Vec<Word>,
    domain: Vec<Word>,
}

impl CylinderPair {
    pub fn new(range: Vec<Word>, domain: Vec<Word>) -> Result<Self, SftError> {
        if range.len() != domain.len() {
            return Err(SftError::CoordinateMismatch(range.len(), domain.len()));
        }
        for (i, (g, d)) in range.iter().zip(&domain).enumerate() {
            if g.k() != d.k() {
                return Err(SftError::AlphabetMismatch(format!(
                    "coordinate {i}: range alphabet {} vs domain alphabet {}",
                    g.k(),
                    d.k()
                )));
            }
        }
        Ok(CylinderPair { range, domain })
    }

    pub fn parse(range: &[&str], domain: &[&str], alphabets: &[u32]) -> Result<Self, SftError> {
        let r = range
            .iter()
            .zip(alphabets)
            .map(|(s, &k)| Word::parse(s, k))
            .collect::<Result<Vec<_>, _>>()?;
        let d = domain
            .iter()
            .zip(alphabets)
            .map(|(s, &k)| Word::parse(s, k))
            .collect::<Result<Vec<_>, _>>()?;
        if range.len() != alphabets.len() || domain.len() != alphabets.len() {
            return Err(SftError::CoordinateMismatch(range.len(), alphabets.len()));
        }
        Self::new(r, d)
    }

    pub fn m(&self) -> usize {
        self.range.len()
    }

    pub fn signature(&self) -> Vec<u32> {
        self.range.iter().map(Word::k).collect()
    }

    pub fn range(&self) -> &[Word] {
        &self.range
    }

    pub fn domain(&self) -> &[Word] {
        &self.domain
    }

    pub fn range_box(&self) -> WordBox {
        self.range.clone()
    }

    pub fn domain_box(&self) -> WordBox {
        self.domain.clone()
    }
}

/// `Z(γ,δ)⁻¹ = Z(δ,γ)` coordinatewise.
pub fn cyl_inverse(a: &CylinderPair) -> CylinderPair {
    CylinderPair {
        range: a.domain.clone(),
        domain: a.range.clone(),
    }
}

/// Coordinatewise product of cylinders: `Z(γ,δ)·Z(γ′,δ′)` is `Z(γw, δ′)`
/// when γ′ = δw, `Z(γ, δ′w)` when δ = γ′w, and empty otherwise.
pub fn cyl_product(a: &CylinderPair, b: &CylinderPair) -> Result<Option<CylinderPair>, SftError> {
    if a.signature() != b.signature() {
        return Err(SftError::AlphabetMismatch(format!(
            "{:?} vs {:?}",
            a.signature(),
            b.signature()
        )));
    }
    let mut range = Vec::with_capacity(a.m());
    let mut domain = Vec::with_capacity(a.m());
    for i in 0..a.m() {
        let (g, d) = (&a.range[i], &a.domain[i]);
        let (g2, d2) = (&b.range[i], &b.domain[i]);
        if let Some(w) = d.extension_to(g2) {
            range.push(g.concat(w));
            domain.push(d2.clone());
        } else if let Some(w) = g2.extension_to(d) {
            range.push(g.clone());
            domain.push(d2.concat(w));
        } else {
            return Ok(None);
        }
    }
    Ok(Some(CylinderPair { range, domain }))
}

/// A compact open bisection: a finite union of product cylinders with
/// pairwise disjoint domain boxes and pairwise disjoint range boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderBisection {
    alphabets: Vec<u32>,
    columns: Vec<CylinderPair>,
}

/// Wire format: `{"alphabets":[k_i],
/// "columns":[{"range":["γ_1",…],"domain":["δ_1",…]}]}`, ε as `""`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BisectionJson {
    pub alphabets: Vec<u32>,
    pub columns: Vec<BisectionColumnJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BisectionColumnJson {
    pub range: Vec<String>,
    pub domain: Vec<String>,
}

impl CylinderBisection {
    pub fn new(alphabets: Vec<u32>, columns: Vec<CylinderPair>) -> Result<Self, SftError> {
        for &k in &alphabets {
            if !(2..=MAX_ALPHABET).contains(&k) {
                return Err(SftError::BadAlphabet(k));
            }
        }
        for c in &columns {
            if c.signature() != alphabets {
                return Err(SftError::AlphabetMismatch(format!(
                    "column signature {:?} vs bisection alphabets {:?}",
                    c.signature(),
                    alphabets
                )));
            }
        }
        for i in 0..columns.len() {
            for j in (i + 1)..columns.len() {
                if !boxes_disjoint(&columns[i].domain, &columns[j].domain) {
                    return Err(SftError::BisectionOverlap {
                        row: "domain",
                        col1: i,
                        col2: j,
                    });
                }
                if !boxes_disjoint(&columns[i].range, &columns[j].range) {
                    return Err(SftError::BisectionOverlap {
                        row: "range",
                        col1: i,
                        col2: j,
                    });
                }
            }
        }
        let mut columns = columns;
        columns.sort(); // canonical storage order; semantics are a set
        Ok(CylinderBisection { alphabets, columns })
    }

    /// The identity bisection ∏_i Z(ε,ε).
    pub fn identity(alphabets: Vec<u32>) -> Result<Self, SftError> {
        let eps: Vec<Word> = alphabets
            .iter()
            .map(|&k| Word::empty(k))
            .collect::<Result<_, _>>()?;
        let col = CylinderPair::new(eps.clone(), eps)?;
        Self::new(alphabets, vec![col])
    }

    pub fn alphabets(&self) -> &[u32] {
        &self.alphabets
    }

    pub fn m(&self) -> usize {
        self.alphabets.len()
    }

    pub fn columns(&self) -> &[CylinderPair] {
        &self.columns
    }

    pub fn from_json(j: &BisectionJson) -> Result<Self, SftError> {
        let columns = j
            .columns
            .iter()
            .map(|c| {
                CylinderPair::parse(
                    &c.range.iter().map(String::as_str).collect::<Vec<_>>(),
                    &c.domain.iter().map(String::as_str).collect::<Vec<_>>(),
                    &j.alphabets,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(j.alphabets.clone(), columns)
    }

    pub fn to_json(&self) -> BisectionJson {
        BisectionJson {
            alphabets: self.alphabets.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| BisectionColumnJson {
                    range: c.range.iter().map(Word::to_string).collect(),
                    domain: c.domain.iter().map(Word::to_string).collect(),
                })
                .collect(),
        }
    }

    /// Maximum word length appearing in coordinate `i` (both rows).
    fn max_depth(&self, i: usize) -> usize {
        self.columns
            .iter()
            .map(|c| c.range[i].len().max(c.domain[i].len()))
            .max()
            .unwrap_or(0)
    }

    /// Expands the arrow set to sub-cylinders whose domain words have the
    /// given per-coordinate depths (each must be ≥ the max word length).
    /// Two bisections are semantically equal iff their expansions at a
    /// common sufficient depth coincide.
    pub fn arrow_expansion(&self, depths: &[usize]) -> BTreeSet<(WordBox, WordBox)> {
        let mut out = BTreeSet::new();
        for col in &self.columns {
            let tails_per_coord: Vec<Vec<Vec<u8>>> = (0..self.m())
                .map(|i| {
                    let extra = depths[i].saturating_sub(col.domain[i].len());
                    all_words(self.alphabets[i], extra)
                })
                .collect();
            for tails in tails_per_coord.iter().multi_cartesian_product() {
                let range: WordBox = col
                    .range
                    .iter()
                    .zip(&tails)
                    .map(|(w, &t)| w.concat(t))
                    .collect();
                let domain: WordBox = col
                    .domain
                    .iter()
                    .zip(&tails)
                    .map(|(w, &t)| w.concat(t))
                    .collect();
                out.insert((range, domain));
            }
        }
        out
    }

    /// Semantic equality of arrow sets, decided by expanding both sides to
    /// depth max-word-length + 1.
    pub fn semantic_eq(&self, other: &CylinderBisection) -> Result<bool, SftError> {
        if self.alphabets != other.alphabets {
            return Err(SftError::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabets, other.alphabets
            )));
        }
        let depths: Vec<usize> = (0..self.m())
            .map(|i| self.max_depth(i).max(other.max_depth(i)) + 1)
            .collect();
        Ok(self.arrow_expansion(&depths) == other.arrow_expansion(&depths))
    }
}

pub(crate) fn all_words(k: u32, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..k as u8).map(move |c| {
                    let mut w2 = w.clone();
                    w2.push(c);
                    w2
                })
            })
            .collect();
    }
    out
}

/// `S·T`: all columnwise cylinder products with empties dropped.
pub fn bisection_product(
    s: &CylinderBisection,
    t: &CylinderBisection,
) -> Result<CylinderBisection, SftError> {
    if s.alphabets != t.alphabets {
        return Err(SftError::AlphabetMismatch(format!(
            "{:?} vs {:?}",
            s.alphabets, t.alphabets
        )));
    }
    let mut columns = Vec::new();
    for a in &s.columns {
        for b in &t.columns {
            if let Some(c) = cyl_product(a, b)? {
                columns.push(c);
            }
        }
    }
    CylinderBisection::new(s.alphabets.clone(), columns)
}

/// `S⁻¹`: columnwise inverse.
pub fn bisection_inverse(s: &CylinderBisection) -> CylinderBisection {
    CylinderBisection::new(
        s.alphabets.clone(),
        s.columns.iter().map(cyl_inverse).collect(),
    )
    .expect("inverting swaps the two disjoint rows")
}

/// `S ∩ T` as arrow sets: per column pair and coordinate, both the γ and δ
/// words must be comparable and the finer column must extend both by the
/// same tail; the intersection is then the finer cylinder.
pub fn bisection_intersection(
    s: &CylinderBisection,
    t: &CylinderBisection,
) -> Result<CylinderBisection, SftError> {
    if s.alphabets != t.alphabets {
        return Err(SftError::AlphabetMismatch(format!(
            "{:?} vs {:?}",
            s.alphabets, t.alphabets
        )));
    }
    let mut columns = Vec::new();
    for a in &s.columns {
        for b in &t.columns {
            if let Some(c) = cyl_intersection(a, b) {
                columns.push(c);
            }
        }
    }
    CylinderBisection::new(s.alphabets.clone(), columns)
}

fn cyl_intersection(a: &CylinderPair, b: &CylinderPair) -> Option<CylinderPair> {
    let mut range = Vec::with_capacity(a.m());
    let mut domain = Vec::with_capacity(a.m());
    for i in 0..a.m() {
        let (g_coarse, d_coarse, g_fine, d_fine) = if a.range[i].len() <= b.range[i].len() {
            (&a.range[i], &a.domain[i], &b.range[i], &b.domain[i])
        } else {
            (&b.range[i], &b.domain[i], &a.range[i], &a.domain[i])
        };
        match g_coarse.extension_to(g_fine) {
            Some(u) if d_coarse.concat(u) == *d_fine => {
                range.push(g_fine.clone());
                domain.push(d_fine.clone());
            }
            _ => return None,
        }
    }
    Some(CylinderPair { range, domain })
}

/// Domain boxes with their exact Kraft measure Σ_j ∏_i k_i^{-|δ_i^(j)|}.
pub fn domain_boxes(s: &CylinderBisection) -> (Vec<WordBox>, Rational64) {
    let boxes: Vec<WordBox> = s.columns.iter().map(CylinderPair::domain_box).collect();
    let measure = boxes.iter().map(|b| box_kraft(b)).sum();
    (boxes, measure)
}

/// Range boxes with their exact Kraft measure.
pub fn range_boxes(s: &CylinderBisection) -> (Vec<WordBox>, Rational64) {
    let boxes: Vec<WordBox> = s.columns.iter().map(CylinderPair::range_box).collect();
    let measure = boxes.iter().map(|b| box_kraft(b)).sum();
    (boxes, measure)
}

/// Full-group membership: both Kraft measures equal 1 exactly (disjointness
/// is already a bisection invariant, so measure 1 means partition).
pub fn is_full_group_element(s: &CylinderBisection) -> bool {
    domain_boxes(s).1.is_one() && range_boxes(s).1.is_one()
}

/// Image of a box under the bisection action α_S = r|_S ∘ (d|_S)⁻¹,
/// computed by prefix replacement per overlapping column. Errors unless
/// the box is covered by the domain boxes.
pub fn alpha_apply(s: &CylinderBisection, b: &[Word]) -> Result<Vec<WordBox>, SftError> {
    if b.iter().map(Word::k).collect::<Vec<_>>() != s.alphabets {
        return Err(SftError::AlphabetMismatch(
            "box alphabets differ from the bisection".into(),
        ));
    }
    let mut covered = Rational64::zero();
    let mut images = Vec::new();
    for col in &s.columns {
        let Some(overlap) = box_intersection(b, &col.domain) else {
            continue;
        };
        covered += box_kraft(&overlap);
        let image: WordBox = overlap
            .iter()
            .zip(&col.domain)
            .zip(&col.range)
            .map(|((w, d), g)| {
                let tail = d.extension_to(w).expect("overlap refines the domain box");
                g.concat(tail)
            })
            .collect();
        images.push(image);
    }
    if covered != box_kraft(b) {
        return Err(SftError::BoxEscapesDomain);
    }
    images.sort();
    Ok(images)
}

pub(crate) fn relate_cell(cell: &[Word], target: &[Word]) -> CellRelation {
    if boxes_disjoint(cell, target) {
        return CellRelation::Disjoint;
    }
    for (i, (c, t)) in cell.iter().zip(target).enumerate() {
        if c.len() < t.len() {
            return CellRelation::Straddles(i);
        }
    }
    CellRelation::Inside
}

pub(crate) enum CellRelation {
    Inside,
    Disjoint,
    Straddles(usize),
}

/// Builds the full-group element S = T ∪ T⁻¹ ∪ (identity on the complement)
/// for T = {a}, given that the domain and range boxes of `a` are disjoint.
/// The complement is partitioned into canonical prefix cells by splitting
/// one letter at a time toward the two boxes.
pub fn extend_to_full_group_bisection(a: &CylinderPair) -> Result<CylinderBisection, SftError> {
    let alphabets = a.signature();
    if !boxes_disjoint(&a.range, &a.domain) {
        return Err(SftError::OverlappingBoxes);
    }
    let mut columns = Vec::new();
    let root: WordBox = alphabets
        .iter()
        .map(|&k| Word::empty(k))
        .collect::<Result<_, _>>()?;
    let mut stack = vec![root];
    while let Some(cell) = stack.pop() {
        match relate_cell(&cell, &a.domain) {
            CellRelation::Inside => {
                debug_assert_eq!(cell, a.domain);
                columns.push(a.clone());
            }
            CellRelation::Straddles(i) => {
                for c in 0..alphabets[i] as u8 {
                    let mut child = cell.clone();
                    child[i] = child[i].child(c);
                    stack.push(child);
                }
            }
            CellRelation::Disjoint => match relate_cell(&cell, &a.range) {
                CellRelation::Inside => {
                    debug_assert_eq!(cell, a.range);
                    columns.push(cyl_inverse(a));
                }
                CellRelation::Straddles(i) => {
                    for c in 0..alphabets[i] as u8 {
                        let mut child = cell.clone();
                        child[i] = child[i].child(c);
                        stack.push(child);
                    }
                }
                CellRelation::Disjoint => {
                    columns.push(CylinderPair {
                        range: cell.clone(),
                        domain: cell,
                    });
                }
            },
        }
    }
    let s = CylinderBisection::new(alphabets, columns)?;
    debug_assert!(is_full_group_element(&s));
    Ok(s)
}

/// Pre-splitter for [`extend_to_full_group_bisection`]: refines `a` into
/// cylinder pairs with disjoint domain/range boxes by splitting shared
/// tails one letter at a time. Pairs whose overlap persists along a
/// periodic direction (e.g. Z(γ, γu) around the tail u^∞) cannot be split;
/// after `max_splits` letters the offending direction is reported.
pub fn split_into_box_disjoint(
    a: &CylinderPair,
    max_splits: usize,
) -> Result<Vec<CylinderPair>, SftError> {
    let mut done = Vec::new();
    let mut queue = vec![(a.clone(), 0usize)];
    while let Some((pair, splits)) = queue.pop() {
        if boxes_disjoint(&pair.range, &pair.domain) {
            done.push(pair);
            continue;
        }
        // all coordinates comparable; find one with a nonempty overlap tail
        let Some(i) = (0..pair.m()).find(|&i| pair.range[i] != pair.domain[i]) else {
            return Err(SftError::PeriodicCore(format!(
                "Z({},{}) is an identity cylinder",
                display_box(&pair.range),
                display_box(&pair.domain)
            )));
        };
        if splits >= max_splits {
            return Err(SftError::PeriodicCore(format!(
                "overlap persists after {max_splits} splits near coordinate {i}"
            )));
        }
        for c in 0..pair.range[i].k() as u8 {
            let mut child = pair.clone();
            child.range[i] = child.range[i].child(c);
            child.domain[i] = child.domain[i].child(c);
            queue.push((child, splits + 1));
        }
    }
    done.sort();
    Ok(done)
}

fn display_box(b: &[Word]) -> String {
    b.iter().map(|w| format!("[{w}]")).join("")
}

/// A full-group element together with a clopen restriction: the data of a
/// localized full-group member S·U with U a disjoint box family.
#[derive(Debug, Clone)]
pub struct LocBisection {
    pub full: CylinderBisection,
    pub restriction: Vec<WordBox>,
    restricted: CylinderBisection,
}

impl LocBisection {
    /// The bisection T·U: columns of the full element cut down to U.
    pub fn restricted(&self) -> &CylinderBisection {
        &self.restricted
    }
}

/// Restricts a full-group bisection to a clopen set given as a disjoint
/// family of boxes.
pub fn loc_restrict(s: &CylinderBisection, u: &[WordBox]) -> Result<LocBisection, SftError> {
    if !is_full_group_element(s) {
        return Err(SftError::NotFullGroup);
    }
    for b in u {
        if b.iter().map(Word::k).collect::<Vec<_>>() != s.alphabets {
            return Err(SftError::AlphabetMismatch(
                "restriction box alphabets differ from the bisection".into(),
            ));
        }
    }
    for i in 0..u.len() {
        for j in (i + 1)..u.len() {
            if !boxes_disjoint(&u[i], &u[j]) {
                return Err(SftError::NotDisjointFamily);
            }
        }
    }
    let mut columns = Vec::new();
    for col in &s.columns {
        for b in u {
            let Some(overlap) = box_intersection(b, &col.domain) else {
                continue;
            };
            let range: Vec<Word> = overlap
                .iter()
                .zip(&col.domain)
                .zip(&col.range)
                .map(|((w, d), g)| {
                    let tail = d.extension_to(w).expect("overlap refines the domain box");
                    g.concat(tail)
                })
                .collect();
            columns.push(CylinderPair {
                range,
                domain: overlap,
            });
        }
    }
    let restricted = CylinderBisection::new(s.alphabets.clone(), columns)?;
    Ok(LocBisection {
        full: s.clone(),
        restriction: u.to_vec(),
        restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s, 2).unwrap()
    }

    fn pair1(range: &str, domain: &str) -> CylinderPair {
        CylinderPair::new(vec![w(range)], vec![w(domain)]).unwrap()
    }

    fn bis(cols: &[(&str, &str)]) -> CylinderBisection {
        CylinderBisection::new(
            vec![2],
            cols.iter().map(|&(r, d)| pair1(r, d)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn cyl_product_examples() {
        // Z(0,ε)·Z(ε,1) = Z(0,1): frozen from the arrow-set expansion
        // {(0x,1,x)}·{(y,-1,1y)} = {(0y,0,1y)}.
        let p = cyl_product(&pair1("0", ""), &pair1("", "1")).unwrap().unwrap();
        assert_eq!(p, pair1("0", "1"));
        // Z(γ,δ)·Z(δ,γ) = Z(γ,γ)
        let p = cyl_product(&pair1("01", "10"), &pair1("10", "01"))
            .unwrap()
            .unwrap();
        assert_eq!(p, pair1("01", "01"));
        // prefix clash
        assert_eq!(cyl_product(&pair1("0", "1"), &pair1("0", "1")).unwrap(), None);
    }

    #[test]
    fn cyl_inverse_examples() {
        let a = pair1("01", "1");
        assert_eq!(cyl_inverse(&a), pair1("1", "01"));
        assert_eq!(cyl_inverse(&cyl_inverse(&a)), a);
        let u = pair1("0", "0");
        assert_eq!(cyl_inverse(&u), u);
    }

    #[test]
    fn bisection_rejects_overlapping_rows() {
        let err = CylinderBisection::new(vec![2], vec![pair1("0", "0"), pair1("1", "01")])
            .unwrap_err();
        assert!(matches!(err, SftError::BisectionOverlap { row: "domain", .. }));
    }

    #[test]
    fn product_and_inverse_identities() {
        let s = bis(&[("00", "0"), ("01", "10"), ("1", "11")]);
        let id_on_range = bisection_product(&s, &bisection_inverse(&s)).unwrap();
        // S·S⁻¹ is the identity on r(S) = everything here
        let identity = CylinderBisection::identity(vec![2]).unwrap();
        assert!(id_on_range.semantic_eq(&identity).unwrap());
        // S·S⁻¹·S = S
        let back = bisection_product(&id_on_range, &s).unwrap();
        assert!(back.semantic_eq(&s).unwrap());
    }

    #[test]
    fn intersection_examples() {
        let s = bis(&[("00", "0"), ("01", "10"), ("1", "11")]);
        assert!(bisection_intersection(&s, &s)
            .unwrap()
            .semantic_eq(&s)
            .unwrap());
        let a = bis(&[("0", "0")]);
        let b = bis(&[("1", "1")]);
        let empty = bisection_intersection(&a, &b).unwrap();
        assert!(empty.columns().is_empty());
        // refinement intersects to the finer column
        let coarse = bis(&[("0", "1")]);
        let fine = bis(&[("00", "10")]);
        let got = bisection_intersection(&coarse, &fine).unwrap();
        assert!(got.semantic_eq(&fine).unwrap());
        // comparable boxes but mismatched tails: Z(0,1) ∩ Z(00,11) = ∅
        let clash = bis(&[("00", "11")]);
        assert!(bisection_intersection(&coarse, &clash)
            .unwrap()
            .columns()
            .is_empty());
    }

    #[test]
    fn kraft_measures() {
        let full = bis(&[("0", "0"), ("1", "1")]);
        assert_eq!(domain_boxes(&full).1, Rational64::one());
        let partial = bis(&[("0", "0"), ("1", "10")]);
        assert_eq!(domain_boxes(&partial).1, Rational64::new(3, 4));
        assert!(is_full_group_element(&full));
        assert!(!is_full_group_element(&partial));
        assert!(!is_full_group_element(&bis(&[("0", "1")])));
        assert!(is_full_group_element(&bis(&[("0", "1"), ("1", "0")])));
        assert!(is_full_group_element(
            &CylinderBisection::identity(vec![2]).unwrap()
        ));
    }

    #[test]
    fn alpha_apply_examples() {
        let identity = CylinderBisection::identity(vec![2]).unwrap();
        assert_eq!(
            alpha_apply(&identity, &[w("01")]).unwrap(),
            vec![vec![w("01")]]
        );
        let swap = bis(&[("0", "1"), ("1", "0")]);
        assert_eq!(alpha_apply(&swap, &[w("1")]).unwrap(), vec![vec![w("0")]]);
        // frozen from prefix replacement on all depth-4 words: the column
        // Z(1,11) maps 11· onto 1·.
        let s = bis(&[("00", "0"), ("01", "10"), ("1", "11")]);
        assert_eq!(alpha_apply(&s, &[w("11")]).unwrap(), vec![vec![w("1")]]);
        // a box escaping the domain errors
        let partial = bis(&[("0", "0")]);
        assert_eq!(
            alpha_apply(&partial, &[w("1")]).unwrap_err(),
            SftError::BoxEscapesDomain
        );
        assert_eq!(
            alpha_apply(&partial, &[w("")]).unwrap_err(),
            SftError::BoxEscapesDomain
        );
    }

    #[test]
    fn extension_examples() {
        let s = extend_to_full_group_bisection(&pair1("0", "1")).unwrap();
        assert!(s.semantic_eq(&bis(&[("0", "1"), ("1", "0")])).unwrap());

        let s = extend_to_full_group_bisection(&pair1("00", "01")).unwrap();
        assert!(s
            .semantic_eq(&bis(&[("00", "01"), ("01", "00"), ("1", "1")]))
            .unwrap());
        assert!(is_full_group_element(&s));
        assert!(s.columns().contains(&pair1("00", "01")));

        assert_eq!(
            extend_to_full_group_bisection(&pair1("0", "0")).unwrap_err(),
            SftError::OverlappingBoxes
        );
    }

    #[test]
    fn splitter_behaviour() {
        // already disjoint: unchanged
        assert_eq!(
            split_into_box_disjoint(&pair1("00", "01"), 8).unwrap(),
            vec![pair1("00", "01")]
        );
        // Z(0,ε): arrows (0x, x); the piece along the tail 0^∞ keeps
        // overlapping, the others separate after one letter
        let parts = split_into_box_disjoint(&pair1("0", ""), 8);
        assert!(matches!(parts, Err(SftError::PeriodicCore(_))));
        // identity cylinder cannot be split at all
        assert!(matches!(
            split_into_box_disjoint(&pair1("0", "0"), 8),
            Err(SftError::PeriodicCore(_))
        ));
    }

    #[test]
    fn loc_restrict_examples() {
        let identity = CylinderBisection::identity(vec![2]).unwrap();
        let r = loc_restrict(&identity, &[vec![w("0")]]).unwrap();
        assert!(r.restricted().semantic_eq(&bis(&[("0", "0")])).unwrap());

        let swap = bis(&[("0", "1"), ("1", "0")]);
        let r = loc_restrict(&swap, &[vec![w("0")]]).unwrap();
        assert!(r.restricted().semantic_eq(&bis(&[("1", "0")])).unwrap());

        let r = loc_restrict(&swap, &[vec![w("")]]).unwrap();
        assert!(r.restricted().semantic_eq(&swap).unwrap());

        assert_eq!(
            loc_restrict(&swap, &[vec![w("0")], vec![w("00")]]).unwrap_err(),
            SftError::NotDisjointFamily
        );
        assert_eq!(
            loc_restrict(&bis(&[("0", "0")]), &[vec![w("0")]]).unwrap_err(),
            SftError::NotFullGroup
        );
    }

    #[test]
    fn json_round_trip() {
        let s = bis(&[("00", "0"), ("01", "10"), ("1", "11")]);
        let j = s.to_json();
        let text = serde_json::to_string(&j).unwrap();
        let j2: BisectionJson = serde_json::from_str(&text).unwrap();
        assert_eq!(CylinderBisection::from_json(&j2).unwrap(), s);
    }

    #[test]
    fn product_alphabet_mismatch_errors() {
        let a = CylinderBisection::identity(vec![2]).unwrap();
        let b = CylinderBisection::identity(vec![3]).unwrap();
        assert!(matches!(
            bisection_product(&a, &b),
            Err(SftError::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn multi_coordinate_product_boxes() {
        // columns over G_2 × G_3
        let k23 = vec![2u32, 3u32];
        let col = |r0: &str, r1: &str, d0: &str, d1: &str| {
            CylinderPair::parse(&[r0, r1], &[d0, d1], &k23).unwrap()
        };
        let s = CylinderBisection::new(
            k23.clone(),
            vec![col("0", "", "1", ""), col("1", "", "0", "")],
        )
        .unwrap();
        assert!(is_full_group_element(&s));
        let (_, measure) = domain_boxes(&s);
        assert_eq!(measure, Rational64::one());
        // image of the box 1· × 2·: first coordinate swaps to 0, second kept
        let image = alpha_apply(&s, &[w("1"), Word::parse("2", 3).unwrap()]).unwrap();
        assert_eq!(image, vec![vec![w("0"), Word::parse("2", 3).unwrap()]]);
    }
}
