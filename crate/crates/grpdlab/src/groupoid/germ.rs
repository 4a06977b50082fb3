//! Germ groupoids of inverse-semigroup actions by partial injections.
//!
//! The semigroup is given concretely: every element carries a partial
//! injection of the finite point set X, plus abstract product/star tables.
//! The tables may identify fewer elements than the maps do (non-faithful
//! actions are allowed, e.g. a group acting trivially), which is exactly
//! what the germ relation is sensitive to: `[s,x] = [s',x]` iff some
//! idempotent `e` with `x ∈ dom(β_e)` satisfies `se = s'e` *in the table*.

use super::{FiniteGroupoid, GroupoidError};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A partial injection on `{0, …, |X|-1}` stored pointwise.
pub type PartialInjection = Vec<Option<usize>>;

fn compose_maps(outer: &PartialInjection, inner: &PartialInjection) -> PartialInjection {
    inner
        .iter()
        .map(|&y| y.and_then(|y| outer.get(y).copied().flatten()))
        .collect()
}

fn invert_map(m: &PartialInjection) -> Option<PartialInjection> {
    let mut out = vec![None; m.len()];
    for (x, &y) in m.iter().enumerate() {
        if let Some(y) = y {
            if y >= m.len() || out[y].is_some() {
                return None; // not injective / out of range
            }
            out[y] = Some(x);
        }
    }
    Some(out)
}

/// An inverse semigroup acting on a finite set X by partial injections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePartialBijectionSemigroup {
    x_labels: Vec<String>,
    element_labels: Vec<String>,
    maps: Vec<PartialInjection>,
    product: Vec<Vec<usize>>,
    star: Vec<usize>,
}

/// Wire format for actions. `product`/`star` may be omitted when the
/// element list is closed under composition and inversion as concrete maps;
/// they are then derived by matching maps (the faithful case).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionJson {
    pub x: Vec<String>,
    pub elements: Vec<ActionElementJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub star: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionElementJson {
    pub label: String,
    /// point label → point label; absent points are outside the domain.
    pub map: BTreeMap<String, String>,
}

impl FinitePartialBijectionSemigroup {
    /// Builds from explicit tables; validates consistency.
    pub fn from_tables(
        x_labels: Vec<String>,
        element_labels: Vec<String>,
        maps: Vec<PartialInjection>,
        product: Vec<Vec<usize>>,
        star: Vec<usize>,
    ) -> Result<Self, GroupoidError> {
        let s = FinitePartialBijectionSemigroup {
            x_labels,
            element_labels,
            maps,
            product,
            star,
        };
        s.validate()?;
        Ok(s)
    }

    /// Builds from a list of partial injections, deriving product and star
    /// tables by composing maps. Fails unless the list is closed (as maps)
    /// under composition and inversion, without duplicates.
    pub fn from_partial_maps(
        x_labels: Vec<String>,
        element_labels: Vec<String>,
        maps: Vec<PartialInjection>,
    ) -> Result<Self, GroupoidError> {
        let n = maps.len();
        for (i, m) in maps.iter().enumerate() {
            if maps[..i].contains(m) {
                return Err(GroupoidError::InvalidAction(format!(
                    "duplicate map at element {i}; use explicit tables for non-faithful actions"
                )));
            }
        }
        let locate = |m: &PartialInjection, what: String| -> Result<usize, GroupoidError> {
            maps.iter()
                .position(|c| c == m)
                .ok_or(GroupoidError::InvalidAction(what))
        };
        let mut product = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let m = compose_maps(&maps[i], &maps[j]);
                product[i][j] = locate(
                    &m,
                    format!("element list not closed under composition ({i}∘{j})"),
                )?;
            }
        }
        let mut star = vec![0; n];
        for i in 0..n {
            let m = invert_map(&maps[i]).ok_or_else(|| {
                GroupoidError::InvalidAction(format!("element {i} is not injective"))
            })?;
            star[i] = locate(&m, format!("element list not closed under inversion ({i})"))?;
        }
        Self::from_tables(x_labels, element_labels, maps, product, star)
    }

    /// A group action: `table` is a group multiplication table and `perms`
    /// assigns each group element a (total) permutation of X such that the
    /// assignment is a homomorphism. Non-faithful actions are fine.
    pub fn group_action(
        x_labels: Vec<String>,
        element_labels: Vec<String>,
        table: Vec<Vec<usize>>,
        perms: Vec<Vec<usize>>,
    ) -> Result<Self, GroupoidError> {
        let maps: Vec<PartialInjection> = perms
            .iter()
            .map(|p| p.iter().map(|&y| Some(y)).collect())
            .collect();
        let star = {
            let k = table.len();
            let identity = (0..k)
                .find(|&e| (0..k).all(|i| table[e][i] == i && table[i][e] == i))
                .ok_or_else(|| GroupoidError::InvalidAction("table has no identity".into()))?;
            (0..k)
                .map(|i| {
                    (0..k)
                        .find(|&j| table[i][j] == identity)
                        .ok_or_else(|| GroupoidError::InvalidAction("missing inverse".into()))
                })
                .collect::<Result<Vec<_>, _>>()?
        };
        Self::from_tables(x_labels, element_labels, maps, table, star)
    }

    pub fn from_json(j: &ActionJson) -> Result<Self, GroupoidError> {
        let point: BTreeMap<&str, usize> = j
            .x
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let mut maps = Vec::new();
        let mut labels = Vec::new();
        for e in &j.elements {
            let mut m: PartialInjection = vec![None; j.x.len()];
            for (from, to) in &e.map {
                let (&f, &t) = (
                    point.get(from.as_str()).ok_or_else(|| {
                        GroupoidError::InvalidAction(format!("unknown point `{from}`"))
                    })?,
                    point.get(to.as_str()).ok_or_else(|| {
                        GroupoidError::InvalidAction(format!("unknown point `{to}`"))
                    })?,
                );
                m[f] = Some(t);
            }
            maps.push(m);
            labels.push(e.label.clone());
        }
        match (&j.product, &j.star) {
            (Some(p), Some(s)) => {
                Self::from_tables(j.x.clone(), labels, maps, p.clone(), s.clone())
            }
            (None, None) => Self::from_partial_maps(j.x.clone(), labels, maps),
            _ => Err(GroupoidError::InvalidAction(
                "provide both product and star tables, or neither".into(),
            )),
        }
    }

    pub fn n_elements(&self) -> usize {
        self.maps.len()
    }

    pub fn x_size(&self) -> usize {
        self.x_labels.len()
    }

    pub fn map(&self, s: usize) -> &PartialInjection {
        &self.maps[s]
    }

    /// Checks that the tables describe an inverse-semigroup action: the
    /// product table matches composition of maps, star matches inversion,
    /// and s·s*·s = s holds in the table.
    pub fn validate(&self) -> Result<(), GroupoidError> {
        let n = self.maps.len();
        let err = |m: String| Err(GroupoidError::InvalidAction(m));
        if self.element_labels.len() != n || self.product.len() != n || self.star.len() != n {
            return err("table sizes disagree with the element count".into());
        }
        for (i, m) in self.maps.iter().enumerate() {
            if m.len() != self.x_labels.len() {
                return err(format!("map {i} has wrong point count"));
            }
            if invert_map(m).is_none() {
                return err(format!("element `{}` is not injective", self.element_labels[i]));
            }
        }
        for i in 0..n {
            if self.product[i].len() != n {
                return err("product table is not square".into());
            }
            for j in 0..n {
                let k = self.product[i][j];
                if k >= n {
                    return err(format!("product[{i}][{j}] out of range"));
                }
                if self.maps[k] != compose_maps(&self.maps[i], &self.maps[j]) {
                    return err(format!(
                        "product table inconsistent with composition at ({i},{j})"
                    ));
                }
            }
            let s = self.star[i];
            if s >= n {
                return err(format!("star[{i}] out of range"));
            }
            if Some(&self.maps[s]) != invert_map(&self.maps[i]).as_ref() {
                return err(format!("star table inconsistent with inversion at {i}"));
            }
            let ssi = self.product[self.product[i][self.star[i]]][i];
            if ssi != i {
                return err(format!("s·s*·s ≠ s at element {i}"));
            }
        }
        // the table itself must be an inverse semigroup, not just map-wise
        // consistent: non-faithful tables can fail associativity even when
        // every entry composes correctly as a partial map.
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.product[self.product[i][j]][k] != self.product[i][self.product[j][k]] {
                        return err(format!("product table not associative at ({i},{j},{k})"));
                    }
                }
            }
            for j in 0..n {
                if self.star[self.product[i][j]] != self.product[self.star[j]][self.star[i]] {
                    return err(format!("(st)* ≠ t*s* at ({i},{j})"));
                }
            }
        }
        let idem: Vec<usize> = (0..n).filter(|&e| self.product[e][e] == e).collect();
        for &e in &idem {
            for &f in &idem {
                if self.product[e][f] != self.product[f][e] {
                    return err(format!("idempotents {e} and {f} do not commute"));
                }
            }
        }
        Ok(())
    }

    fn idempotents(&self) -> Vec<usize> {
        (0..self.maps.len())
            .filter(|&e| self.product[e][e] == e)
            .collect()
    }

    /// Germ equality: (s,x) ~ (s',x) iff some idempotent e with
    /// x ∈ dom(β_e) has se = s'e in the product table.
    fn germs_equal(&self, idem: &[usize], s1: usize, s2: usize, x: usize) -> bool {
        if s1 == s2 {
            return true;
        }
        idem.iter().any(|&e| {
            self.maps[e][x].is_some() && self.product[s1][e] == self.product[s2][e]
        })
    }
}

/// The germ groupoid of an action: arrows are germ classes `[s,x]` over
/// points x in the domain of β_s, with `[s, β_t(y)]·[t, y] = [st, y]` and
/// `[s,x]⁻¹ = [s*, β_s(x)]`. Decided by exhaustive search over idempotents.
pub fn germ_groupoid(
    action: &FinitePartialBijectionSemigroup,
) -> Result<FiniteGroupoid, GroupoidError> {
    action.validate()?;
    let idem = action.idempotents();
    let nx = action.x_size();

    // all germ pairs (s, x), grouped by point
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for s in 0..action.n_elements() {
        for x in 0..nx {
            if action.maps[s][x].is_some() {
                pairs.push((s, x));
            }
        }
    }

    // germ classes per point by exhaustive pairwise comparison
    let mut class_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut reps: Vec<(usize, usize)> = Vec::new();
    for &(s, x) in &pairs {
        let found = reps
            .iter()
            .position(|&(r, rx)| rx == x && action.germs_equal(&idem, s, r, x));
        match found {
            Some(c) => {
                class_of.insert((s, x), c);
            }
            None => {
                class_of.insert((s, x), reps.len());
                reps.push((s, x));
            }
        }
    }

    let label_of = |c: usize| -> String {
        let (s, x) = reps[c];
        format!("[{};{}]", action.element_labels[s], action.x_labels[x])
    };

    // the unit over x is the germ of any idempotent whose domain contains x;
    // s*s works for every germ pair (s, x).
    let unit_class = |s: usize, x: usize| -> usize {
        let e = action.product[action.star[s]][s];
        class_of[&(e, x)]
    };

    let n = reps.len();
    let arrows: Vec<String> = (0..n).map(label_of).collect();
    let mut units: Vec<String> = Vec::new();
    let mut src = BTreeMap::new();
    let mut tgt = BTreeMap::new();
    let mut inv = BTreeMap::new();
    for (c, &(s, x)) in reps.iter().enumerate() {
        let sx = unit_class(s, x);
        let y = action.maps[s][x].expect("germ pairs have x in the domain");
        let tx = unit_class(action.star[s], y);
        src.insert(label_of(c), label_of(sx));
        tgt.insert(label_of(c), label_of(tx));
        inv.insert(label_of(c), label_of(class_of[&(action.star[s], y)]));
        if sx == c {
            units.push(label_of(c));
        }
    }
    let mut compose: Vec<[String; 3]> = Vec::new();
    for (c1, &(s, x1)) in reps.iter().enumerate() {
        for (c2, &(t, y)) in reps.iter().enumerate() {
            // [s, β_t(y)]·[t, y] defined iff x1 = β_t(y)
            if action.maps[t][y] == Some(x1) {
                let st = action.product[s][t];
                compose.push([label_of(c1), label_of(c2), label_of(class_of[&(st, y)])]);
            }
        }
    }
    FiniteGroupoid::from_tables(arrows, &units, &src, &tgt, &compose, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::validate_groupoid;

    fn trivial_action(n: usize) -> FinitePartialBijectionSemigroup {
        let x: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        FinitePartialBijectionSemigroup::from_partial_maps(
            x,
            vec!["id".into()],
            vec![(0..n).map(Some).collect()],
        )
        .unwrap()
    }

    #[test]
    fn trivial_semigroup_gives_only_units() {
        let g = germ_groupoid(&trivial_action(2)).unwrap();
        assert!(validate_groupoid(&g).is_valid());
        assert_eq!(g.n_arrows(), 2);
        assert_eq!(g.n_units(), 2);
    }

    #[test]
    fn z2_swap_has_four_germs() {
        let action = FinitePartialBijectionSemigroup::group_action(
            vec!["0".into(), "1".into()],
            vec!["e".into(), "s".into()],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let g = germ_groupoid(&action).unwrap();
        assert!(validate_groupoid(&g).is_valid());
        assert_eq!(g.n_arrows(), 4);
        assert_eq!(g.n_units(), 2);
        assert!(crate::groupoid::is_principal(&g));
    }

    #[test]
    fn restricted_identity_germ_collapses_to_unit() {
        // one partial injection 0↦0 on {0,1}, plus the identity. The germ of
        // the restriction over 0 equals the unit germ because e = s itself is
        // an idempotent with 0 in its domain and s·s = id·s.
        let x = vec!["0".to_string(), "1".to_string()];
        let id: PartialInjection = vec![Some(0), Some(1)];
        let s: PartialInjection = vec![Some(0), None];
        let action = FinitePartialBijectionSemigroup::from_partial_maps(
            x,
            vec!["id".into(), "s".into()],
            vec![id, s],
        )
        .unwrap();
        let g = germ_groupoid(&action).unwrap();
        assert!(validate_groupoid(&g).is_valid());
        // germs collapse to exactly the two units
        assert_eq!(g.n_arrows(), 2);
        assert_eq!(g.n_units(), 2);
    }

    #[test]
    fn non_faithful_group_action_keeps_distinct_germs() {
        // Z_2 acting trivially on one point: germs [e,x] and [s,x] stay
        // distinct because the only idempotent is e and se = s ≠ e = ee.
        let action = FinitePartialBijectionSemigroup::group_action(
            vec!["x".into()],
            vec!["e".into(), "s".into()],
            vec![vec![0, 1], vec![1, 0]],
            vec![vec![0], vec![0]],
        )
        .unwrap();
        let g = germ_groupoid(&action).unwrap();
        assert!(validate_groupoid(&g).is_valid());
        assert_eq!(g.n_arrows(), 2);
        assert_eq!(g.n_units(), 1);
        assert!(!crate::groupoid::is_principal(&g));
    }

    #[test]
    fn inconsistent_product_table_is_rejected() {
        let x = vec!["0".to_string(), "1".to_string()];
        let id: PartialInjection = vec![Some(0), Some(1)];
        let sw: PartialInjection = vec![Some(1), Some(0)];
        // claim sw·sw = sw, contradicting composition of the maps
        let r = FinitePartialBijectionSemigroup::from_tables(
            x,
            vec!["id".into(), "sw".into()],
            vec![id, sw],
            vec![vec![0, 1], vec![1, 1]],
            vec![0, 1],
        );
        assert!(r.is_err());
    }
}
