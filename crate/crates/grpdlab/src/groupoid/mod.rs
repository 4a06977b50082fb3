//! Finite groupoids as explicit arrow tables.
//!
//! A [`FiniteGroupoid`] stores an arrow set with distinguished units, source
//! and target maps into the units, a partial composition table and an
//! inverse map. Construction only requires the tables to be *well formed*
//! (all ids resolve); the groupoid axioms themselves are checked by
//! [`validate_groupoid`], which returns a full diagnostic report rather than
//! failing fast. The convention throughout: `compose(a, b)` is "a after b",
//! defined iff `src(a) = tgt(b)`, so an arrow `(a,b)` of the full
//! equivalence relation `[n]²` points from unit `b` to unit `a` and
//! `(a,b)·(b,c) = (a,c)`.

mod elementary;
mod germ;

pub use elementary::{
    decompose_elementary, validate_af_chain, AFChain, Decomposition, ElementaryBlock,
    ElementaryGroupoid, NonPrincipal,
};
pub use germ::{
    germ_groupoid, ActionElementJson, ActionJson, FinitePartialBijectionSemigroup,
    PartialInjection,
};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupoidError {
    #[error("unknown arrow id `{0}`")]
    UnknownArrow(String),
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrow(String),
    #[error("arrow `{0}` is missing a {1} entry")]
    MissingEntry(String, &'static str),
    #[error("duplicate composition entry for (`{0}`, `{1}`)")]
    DuplicateComposition(String, String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("groupoid fails validation: {0}")]
    Invalid(String),
}

/// A finite (discrete) groupoid given by explicit tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroupoid {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    is_unit: Vec<bool>,
    src: Vec<usize>,
    tgt: Vec<usize>,
    compose: BTreeMap<(usize, usize), usize>,
    inv: Vec<usize>,
}

/// Wire format: `{"arrows":[...], "units":[...], "src":{...}, "tgt":{...},
/// "compose":[[a,b,c],...], "inv":{...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupoidJson {
    pub arrows: Vec<String>,
    pub units: Vec<String>,
    pub src: BTreeMap<String, String>,
    pub tgt: BTreeMap<String, String>,
    pub compose: Vec<[String; 3]>,
    pub inv: BTreeMap<String, String>,
}

impl FiniteGroupoid {
    /// Builds a groupoid from raw tables. Ids must resolve and the maps must
    /// be total on the arrow set; the groupoid *axioms* are not enforced
    /// here (see [`validate_groupoid`]).
    pub fn from_tables(
        arrows: Vec<String>,
        units: &[String],
        src: &BTreeMap<String, String>,
        tgt: &BTreeMap<String, String>,
        compose: &[[String; 3]],
        inv: &BTreeMap<String, String>,
    ) -> Result<Self, GroupoidError> {
        let mut index = HashMap::new();
        for (i, label) in arrows.iter().enumerate() {
            if index.insert(label.clone(), i).is_some() {
                return Err(GroupoidError::DuplicateArrow(label.clone()));
            }
        }
        let resolve = |id: &String| -> Result<usize, GroupoidError> {
            index
                .get(id)
                .copied()
                .ok_or_else(|| GroupoidError::UnknownArrow(id.clone()))
        };
        let mut is_unit = vec![false; arrows.len()];
        for u in units {
            is_unit[resolve(u)?] = true;
        }
        let lookup_total = |map: &BTreeMap<String, String>,
                            what: &'static str|
         -> Result<Vec<usize>, GroupoidError> {
            arrows
                .iter()
                .map(|a| match map.get(a) {
                    Some(v) => resolve(v),
                    None => Err(GroupoidError::MissingEntry(a.clone(), what)),
                })
                .collect()
        };
        let src = lookup_total(src, "src")?;
        let tgt = lookup_total(tgt, "tgt")?;
        let inv = lookup_total(inv, "inv")?;
        let mut table = BTreeMap::new();
        for [a, b, c] in compose {
            let key = (resolve(a)?, resolve(b)?);
            if table.insert(key, resolve(c)?).is_some() {
                return Err(GroupoidError::DuplicateComposition(a.clone(), b.clone()));
            }
        }
        Ok(FiniteGroupoid {
            labels: arrows,
            index,
            is_unit,
            src,
            tgt,
            compose: table,
            inv,
        })
    }

    pub fn from_json(j: &GroupoidJson) -> Result<Self, GroupoidError> {
        Self::from_tables(j.arrows.clone(), &j.units, &j.src, &j.tgt, &j.compose, &j.inv)
    }

    pub fn to_json(&self) -> GroupoidJson {
        GroupoidJson {
            arrows: self.labels.clone(),
            units: self.unit_indices().map(|u| self.labels[u].clone()).collect(),
            src: self
                .arrow_indices()
                .map(|a| (self.labels[a].clone(), self.labels[self.src[a]].clone()))
                .collect(),
            tgt: self
                .arrow_indices()
                .map(|a| (self.labels[a].clone(), self.labels[self.tgt[a]].clone()))
                .collect(),
            compose: self
                .compose
                .iter()
                .map(|(&(a, b), &c)| {
                    [
                        self.labels[a].clone(),
                        self.labels[b].clone(),
                        self.labels[c].clone(),
                    ]
                })
                .collect(),
            inv: self
                .arrow_indices()
                .map(|a| (self.labels[a].clone(), self.labels[self.inv[a]].clone()))
                .collect(),
        }
    }

    pub fn n_arrows(&self) -> usize {
        self.labels.len()
    }

    pub fn arrow_indices(&self) -> std::ops::Range<usize> {
        0..self.labels.len()
    }

    pub fn unit_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.labels.len()).filter(|&a| self.is_unit[a])
    }

    pub fn n_units(&self) -> usize {
        self.is_unit.iter().filter(|&&b| b).count()
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn arrow_by_label(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn is_unit(&self, a: usize) -> bool {
        self.is_unit[a]
    }

    pub fn src(&self, a: usize) -> usize {
        self.src[a]
    }

    pub fn tgt(&self, a: usize) -> usize {
        self.tgt[a]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    /// `compose(a, b)` = "a after b", defined iff `src(a) = tgt(b)`.
    pub fn compose(&self, a: usize, b: usize) -> Option<usize> {
        self.compose.get(&(a, b)).copied()
    }

    pub fn composable(&self, a: usize, b: usize) -> bool {
        self.src[a] == self.tgt[b]
    }

    /// The domain fiber 𝒢x: arrows with source x.
    pub fn domain_fiber(&self, x: usize) -> Vec<usize> {
        self.arrow_indices().filter(|&a| self.src[a] == x).collect()
    }

    /// All stored composition entries `(a, b, a·b)` in index order.
    pub fn composition_entries(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.compose.iter().map(|(&(a, b), &c)| (a, b, c))
    }

    /// The full equivalence relation `[n]²`: arrows `(a,b)` with
    /// `(a,b)·(b,c) = (a,c)`, labels 1-based.
    pub fn full_equivalence(n: usize) -> Self {
        assert!(n >= 1, "need at least one unit");
        let pair = |a: usize, b: usize| format!("({},{})", a + 1, b + 1);
        let arrows: Vec<String> = (0..n)
            .flat_map(|a| (0..n).map(move |b| pair(a, b)))
            .collect();
        let units: Vec<String> = (0..n).map(|a| pair(a, a)).collect();
        let src: BTreeMap<_, _> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (pair(a, b), pair(b, b))))
            .collect();
        let tgt: BTreeMap<_, _> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (pair(a, b), pair(a, a))))
            .collect();
        let inv: BTreeMap<_, _> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (pair(a, b), pair(b, a))))
            .collect();
        let compose: Vec<[String; 3]> = (0..n)
            .flat_map(|a| {
                (0..n).flat_map(move |b| {
                    (0..n).map(move |c| [pair(a, b), pair(b, c), pair(a, c)])
                })
            })
            .collect();
        Self::from_tables(arrows, &units, &src, &tgt, &compose, &inv)
            .expect("full equivalence tables are well formed")
    }

    /// A group as a one-unit groupoid. `table[i][j]` is the product index,
    /// `identity` the index of the neutral element.
    pub fn group_groupoid(
        labels: Vec<String>,
        table: &[Vec<usize>],
        identity: usize,
    ) -> Result<Self, GroupoidError> {
        let k = labels.len();
        if table.len() != k || table.iter().any(|row| row.len() != k) {
            return Err(GroupoidError::Invalid("group table is not square".into()));
        }
        let unit = labels[identity].clone();
        let src: BTreeMap<_, _> = labels.iter().map(|l| (l.clone(), unit.clone())).collect();
        let compose: Vec<[String; 3]> = (0..k)
            .flat_map(|i| {
                let labels = &labels;
                (0..k).map(move |j| {
                    [
                        labels[i].clone(),
                        labels[j].clone(),
                        labels[table[i][j]].clone(),
                    ]
                })
            })
            .collect();
        let mut inv = BTreeMap::new();
        for i in 0..k {
            let j = (0..k)
                .find(|&j| table[i][j] == identity && table[j][i] == identity)
                .ok_or_else(|| {
                    GroupoidError::Invalid(format!("element `{}` has no inverse", labels[i]))
                })?;
            inv.insert(labels[i].clone(), labels[j].clone());
        }
        Self::from_tables(
            labels.clone(),
            std::slice::from_ref(&unit),
            &src,
            &src,
            &compose,
            &inv,
        )
    }

    /// The cyclic group Z_k as a one-unit groupoid, labels `g0..g(k-1)`.
    pub fn cyclic_group(k: usize) -> Self {
        assert!(k >= 1);
        let labels: Vec<String> = (0..k).map(|i| format!("g{i}")).collect();
        let table: Vec<Vec<usize>> = (0..k).map(|i| (0..k).map(|j| (i + j) % k).collect()).collect();
        Self::group_groupoid(labels, &table, 0).expect("cyclic tables are well formed")
    }

    /// Disjoint union. Labels are kept when the two label sets are disjoint
    /// and prefixed with `L.`/`R.` otherwise.
    pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Self {
        let clash = b.labels.iter().any(|l| a.index.contains_key(l));
        let rename = |side: &str, l: &str| {
            if clash {
                format!("{side}.{l}")
            } else {
                l.to_string()
            }
        };
        let ja = a.to_json();
        let jb = b.to_json();
        let mut arrows: Vec<String> = ja.arrows.iter().map(|l| rename("L", l)).collect();
        arrows.extend(jb.arrows.iter().map(|l| rename("R", l)));
        let mut units: Vec<String> = ja.units.iter().map(|l| rename("L", l)).collect();
        units.extend(jb.units.iter().map(|l| rename("R", l)));
        let merge_map = |ma: &BTreeMap<String, String>, mb: &BTreeMap<String, String>| {
            let mut out = BTreeMap::new();
            for (k, v) in ma {
                out.insert(rename("L", k), rename("L", v));
            }
            for (k, v) in mb {
                out.insert(rename("R", k), rename("R", v));
            }
            out
        };
        let src = merge_map(&ja.src, &jb.src);
        let tgt = merge_map(&ja.tgt, &jb.tgt);
        let inv = merge_map(&ja.inv, &jb.inv);
        let mut compose: Vec<[String; 3]> = ja
            .compose
            .iter()
            .map(|[x, y, z]| [rename("L", x), rename("L", y), rename("L", z)])
            .collect();
        compose.extend(
            jb.compose
                .iter()
                .map(|[x, y, z]| [rename("R", x), rename("R", y), rename("R", z)]),
        );
        Self::from_tables(arrows, &units, &src, &tgt, &compose, &inv)
            .expect("disjoint union of well-formed tables is well formed")
    }
}

/// Diagnostic output of [`validate_groupoid`]: empty iff the tables satisfy
/// every groupoid axiom.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  - {v}")?;
            }
            Ok(())
        }
    }
}

/// Checks every groupoid axiom exhaustively and reports all violations.
pub fn validate_groupoid(g: &FiniteGroupoid) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let l = |a: usize| g.label(a);

    for a in g.arrow_indices() {
        if !g.is_unit(g.src(a)) {
            rep.violations
                .push(format!("src(`{}`) = `{}` is not a unit", l(a), l(g.src(a))));
        }
        if !g.is_unit(g.tgt(a)) {
            rep.violations
                .push(format!("tgt(`{}`) = `{}` is not a unit", l(a), l(g.tgt(a))));
        }
    }
    for u in g.unit_indices() {
        if g.src(u) != u || g.tgt(u) != u {
            rep.violations
                .push(format!("unit `{}` must have src = tgt = itself", l(u)));
        }
    }

    // composability: the table is defined exactly on src(a) = tgt(b), and a
    // composite inherits src from the right factor and tgt from the left.
    for (&(a, b), &c) in &g.compose {
        if !g.composable(a, b) {
            rep.violations.push(format!(
                "composability: compose(`{}`, `{}`) defined but src(`{}`) ≠ tgt(`{}`)",
                l(a),
                l(b),
                l(a),
                l(b)
            ));
        } else {
            if g.src(c) != g.src(b) || g.tgt(c) != g.tgt(a) {
                rep.violations.push(format!(
                    "compose(`{}`, `{}`) = `{}` has wrong endpoints",
                    l(a),
                    l(b),
                    l(c)
                ));
            }
        }
    }
    for a in g.arrow_indices() {
        for b in g.arrow_indices() {
            if g.composable(a, b) && g.compose(a, b).is_none() {
                rep.violations.push(format!(
                    "missing composition for composable pair (`{}`, `{}`)",
                    l(a),
                    l(b)
                ));
            }
        }
    }

    // unit laws.
    for a in g.arrow_indices() {
        if g.compose(g.tgt(a), a) != Some(a) {
            rep.violations
                .push(format!("unit law: tgt·a ≠ a for `{}`", l(a)));
        }
        if g.compose(a, g.src(a)) != Some(a) {
            rep.violations
                .push(format!("unit law: a·src ≠ a for `{}`", l(a)));
        }
    }

    // inverses.
    for a in g.arrow_indices() {
        if g.inv(g.inv(a)) != a {
            rep.violations
                .push(format!("inv(inv(`{}`)) ≠ `{}`", l(a), l(a)));
        }
        if g.compose(a, g.inv(a)) != Some(g.tgt(a)) {
            rep.violations
                .push(format!("a·inv(a) ≠ tgt(a) for `{}`", l(a)));
        }
        if g.compose(g.inv(a), a) != Some(g.src(a)) {
            rep.violations
                .push(format!("inv(a)·a ≠ src(a) for `{}`", l(a)));
        }
    }

    // associativity wherever both sides are defined.
    for (&(a, b), &ab) in &g.compose {
        for c in g.arrow_indices() {
            if !g.composable(b, c) {
                continue;
            }
            let Some(bc) = g.compose(b, c) else { continue };
            let lhs = g.compose(ab, c);
            let rhs = g.compose(a, bc);
            if let (Some(x), Some(y)) = (lhs, rhs) {
                if x != y {
                    rep.violations.push(format!(
                        "associativity fails on (`{}`, `{}`, `{}`)",
                        l(a),
                        l(b),
                        l(c)
                    ));
                }
            }
        }
    }
    rep
}

/// True iff every arrow with equal source and target is a unit.
pub fn is_principal(g: &FiniteGroupoid) -> bool {
    g.arrow_indices()
        .all(|a| g.src(a) != g.tgt(a) || g.is_unit(a))
}

/// Effectiveness report for finite (discrete) models.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectivenessReport {
    pub effective: bool,
    pub advisory: String,
}

/// For a finite groupoid the discrete topology makes the interior of the
/// isotropy bundle the bundle itself, so effectiveness coincides with
/// principality; the report says so explicitly instead of equating the two
/// notions silently.
pub fn is_effective_finite(g: &FiniteGroupoid) -> EffectivenessReport {
    EffectivenessReport {
        effective: is_principal(g),
        advisory: "finite discrete model: every set is open, so the interior of the isotropy \
                   bundle is the bundle itself and effectiveness coincides with principality"
            .to_string(),
    }
}

/// Per-unit witnesses for condition (W): an arrow into the fiber of `x`
/// that is not isotropy at `x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionWReport {
    pub holds: bool,
    /// unit label → witness arrow label, if one exists.
    pub witnesses: BTreeMap<String, Option<String>>,
}

impl std::fmt::Display for ConditionWReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "condition (W): {}", if self.holds { "holds" } else { "fails" })?;
        for (u, w) in &self.witnesses {
            match w {
                Some(a) => writeln!(f, "  {u}: witness {a}")?,
                None => writeln!(f, "  {u}: no non-isotropy arrow in the fiber")?,
            }
        }
        Ok(())
    }
}

/// Condition (W): every unit `x` has an arrow in 𝒢x that is not in x𝒢x,
/// i.e. some arrow with source `x` and target ≠ `x`.
pub fn condition_w_check(g: &FiniteGroupoid) -> ConditionWReport {
    let mut witnesses = BTreeMap::new();
    let mut holds = true;
    for x in g.unit_indices() {
        let w = g
            .arrow_indices()
            .find(|&a| g.src(a) == x && g.tgt(a) != x)
            .map(|a| g.label(a).to_string());
        if w.is_none() {
            holds = false;
        }
        witnesses.insert(g.label(x).to_string(), w);
    }
    ConditionWReport { holds, witnesses }
}

/// Orbit partition of the unit space: x ~ y iff some arrow joins them.
pub(crate) fn unit_orbits(g: &FiniteGroupoid) -> Vec<BTreeSet<usize>> {
    let units: Vec<usize> = g.unit_indices().collect();
    let mut parent: HashMap<usize, usize> = units.iter().map(|&u| (u, u)).collect();
    fn find(parent: &mut HashMap<usize, usize>, x: usize) -> usize {
        let p = parent[&x];
        if p == x {
            x
        } else {
            let r = find(parent, p);
            parent.insert(x, r);
            r
        }
    }
    for a in g.arrow_indices() {
        let (s, t) = (g.src(a), g.tgt(a));
        if parent.contains_key(&s) && parent.contains_key(&t) {
            let (rs, rt) = (find(&mut parent, s), find(&mut parent, t));
            if rs != rt {
                parent.insert(rs, rt);
            }
        }
    }
    let mut orbits: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &u in &units {
        let r = find(&mut parent, u);
        orbits.entry(r).or_default().insert(u);
    }
    let mut out: Vec<BTreeSet<usize>> = orbits.into_values().collect();
    // deterministic order: by smallest unit index
    out.sort_by_key(|o| *o.iter().next().unwrap());
    out
}
