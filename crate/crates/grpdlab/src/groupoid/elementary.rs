//! Elementary groupoids ⊔_i X_i × [N_i]², orbit decompositions of
//! principal groupoids, and finite AF chains.

use super::{is_principal, unit_orbits, FiniteGroupoid, ValidationReport};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// One block X_i × [N_i]²: a finite space times a full equivalence relation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryBlock {
    #[serde(rename = "X")]
    pub x: Vec<String>,
    #[serde(rename = "N")]
    pub n: usize,
}

/// A finite disjoint union of blocks. Wire format
/// `{"blocks":[{"X":[labels],"N":n}]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementaryGroupoid {
    pub blocks: Vec<ElementaryBlock>,
}

impl ElementaryGroupoid {
    /// Total number of arrows Σ |X_i|·N_i².
    pub fn n_arrows(&self) -> usize {
        self.blocks.iter().map(|b| b.x.len() * b.n * b.n).sum()
    }

    /// Σ N_i² per point of X_i: the dimension of the block algebra
    /// ⊕ C(X_i) ⊗ M_{N_i}.
    pub fn algebra_dimension(&self) -> usize {
        self.n_arrows()
    }

    /// Materializes the block description as a concrete groupoid. Arrow
    /// labels are `x:(a,b)` with 1-based matrix indices.
    pub fn to_groupoid(&self) -> FiniteGroupoid {
        let mut parts: Vec<FiniteGroupoid> = Vec::new();
        for block in &self.blocks {
            for x in &block.x {
                let full = FiniteGroupoid::full_equivalence(block.n);
                let j = full.to_json();
                let tag = |l: &String| format!("{x}:{l}");
                let g = FiniteGroupoid::from_tables(
                    j.arrows.iter().map(&tag).collect(),
                    &j.units.iter().map(&tag).collect::<Vec<_>>(),
                    &j.src.iter().map(|(k, v)| (tag(k), tag(v))).collect(),
                    &j.tgt.iter().map(|(k, v)| (tag(k), tag(v))).collect(),
                    &j.compose
                        .iter()
                        .map(|[a, b, c]| [tag(a), tag(b), tag(c)])
                        .collect::<Vec<_>>(),
                    &j.inv.iter().map(|(k, v)| (tag(k), tag(v))).collect(),
                )
                .expect("tagged full-equivalence tables are well formed");
                parts.push(g);
            }
        }
        parts
            .into_iter()
            .reduce(|a, b| FiniteGroupoid::disjoint_union(&a, &b))
            .unwrap_or_else(|| FiniteGroupoid::full_equivalence(1))
    }

    /// Optional post-processing: merges blocks with equal N into one block
    /// whose X collects the constituent spaces. Off by default everywhere.
    pub fn merge_isomorphic(&self) -> ElementaryGroupoid {
        let mut by_n: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for b in &self.blocks {
            by_n.entry(b.n).or_default().extend(b.x.iter().cloned());
        }
        ElementaryGroupoid {
            blocks: by_n
                .into_iter()
                .map(|(n, x)| ElementaryBlock { x, n })
                .collect(),
        }
    }
}

/// Failure value of [`decompose_elementary`]: the offending isotropy arrow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonPrincipal {
    pub witness_arrow: String,
}

impl std::fmt::Display for NonPrincipal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "not principal: arrow `{}` is non-unit isotropy",
            self.witness_arrow
        )
    }
}

impl std::error::Error for NonPrincipal {}

/// Successful decomposition: the block data plus the orbit each unit
/// belongs to (unit labels, sorted within each orbit).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decomposition {
    pub elementary: ElementaryGroupoid,
    pub orbits: Vec<Vec<String>>,
}

/// Orbit decomposition of a principal groupoid: one singleton-X block per
/// orbit with N = orbit size. Fails on non-principal inputs with an
/// isotropy witness.
pub fn decompose_elementary(g: &FiniteGroupoid) -> Result<Decomposition, NonPrincipal> {
    if let Some(a) = g
        .arrow_indices()
        .find(|&a| g.src(a) == g.tgt(a) && !g.is_unit(a))
    {
        return Err(NonPrincipal {
            witness_arrow: g.label(a).to_string(),
        });
    }
    debug_assert!(is_principal(g));
    let orbits = unit_orbits(g);
    let mut blocks = Vec::new();
    let mut orbit_labels = Vec::new();
    for orbit in &orbits {
        let labels: Vec<String> = orbit.iter().map(|&u| g.label(u).to_string()).collect();
        blocks.push(ElementaryBlock {
            x: vec![labels[0].clone()],
            n: orbit.len(),
        });
        orbit_labels.push(labels);
    }
    Ok(Decomposition {
        elementary: ElementaryGroupoid { blocks },
        orbits: orbit_labels,
    })
}

/// A finite AF chain: stages over one shared unit space, with explicit
/// arrow inclusion maps stage j → stage j+1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AFChain {
    pub stages: Vec<ElementaryGroupoid>,
    /// inclusions[j]: arrow label of stage j → arrow label of stage j+1.
    pub inclusions: Vec<BTreeMap<String, String>>,
}

/// Confirms the chain is increasing: one shared unit space, and each
/// inclusion is an injective, unit-fixing groupoid homomorphism.
pub fn validate_af_chain(c: &AFChain) -> ValidationReport {
    let mut rep = ValidationReport::default();
    if c.stages.is_empty() {
        rep.violations.push("chain has no stages".to_string());
        return rep;
    }
    if c.inclusions.len() + 1 != c.stages.len() {
        rep.violations.push(format!(
            "expected {} inclusion map(s), got {}",
            c.stages.len() - 1,
            c.inclusions.len()
        ));
        return rep;
    }
    let groupoids: Vec<FiniteGroupoid> = c.stages.iter().map(|e| e.to_groupoid()).collect();
    let unit_set = |g: &FiniteGroupoid| -> BTreeSet<String> {
        g.unit_indices().map(|u| g.label(u).to_string()).collect()
    };
    let base_units = unit_set(&groupoids[0]);
    for (j, g) in groupoids.iter().enumerate().skip(1) {
        if unit_set(g) != base_units {
            rep.violations
                .push(format!("unit spaces differ between stage 0 and stage {j}"));
        }
    }
    for (j, inc) in c.inclusions.iter().enumerate() {
        let (g, h) = (&groupoids[j], &groupoids[j + 1]);
        let mut image = BTreeSet::new();
        let mut resolved: BTreeMap<usize, usize> = BTreeMap::new();
        let violations_before = rep.violations.len();
        for a in g.arrow_indices() {
            let al = g.label(a);
            let Some(target) = inc.get(al) else {
                rep.violations
                    .push(format!("inclusion {j} is missing arrow `{al}`"));
                continue;
            };
            let Some(b) = h.arrow_by_label(target) else {
                rep.violations.push(format!(
                    "inclusion {j} maps `{al}` to unknown arrow `{target}`"
                ));
                continue;
            };
            if !image.insert(b) {
                rep.violations
                    .push(format!("inclusion {j} is not injective at `{target}`"));
            }
            resolved.insert(a, b);
        }
        if rep.violations.len() > violations_before {
            continue; // structural problems make the algebraic checks noise
        }
        for (&a, &b) in &resolved {
            if g.is_unit(a) && (h.label(b) != g.label(a) || !h.is_unit(b)) {
                rep.violations.push(format!(
                    "inclusion {j} must fix the shared unit `{}`",
                    g.label(a)
                ));
            }
            if h.label(h.src(b)) != g.label(g.src(a)) || h.label(h.tgt(b)) != g.label(g.tgt(a)) {
                rep.violations.push(format!(
                    "inclusion {j} does not preserve endpoints of `{}`",
                    g.label(a)
                ));
            }
            if resolved.get(&g.inv(a)) != Some(&h.inv(b)) {
                rep.violations.push(format!(
                    "inclusion {j} does not preserve the inverse of `{}`",
                    g.label(a)
                ));
            }
        }
        for (&a1, &b1) in &resolved {
            for (&a2, &b2) in &resolved {
                if let Some(a12) = g.compose(a1, a2) {
                    if h.compose(b1, b2) != resolved.get(&a12).copied() {
                        rep.violations.push(format!(
                            "inclusion {j} does not preserve compose(`{}`, `{}`)",
                            g.label(a1),
                            g.label(a2)
                        ));
                    }
                }
            }
        }
    }
    rep
}
