//! The convolution *-algebra C_c(𝒢) of a finite groupoid, optionally
//! twisted by a normalized 2-cocycle: convolution, involution, the left
//! regular representation per domain fiber, the reduced p-norm, the
//! conditional expectation onto the units, and admissible-pair checks.

use crate::config::{IDENTITY_SLACK, POSITIVITY_IMAG_SLACK};
use crate::groupoid::{FiniteGroupoid, GroupoidJson};
use crate::pnorm::{p_operator_norm, PMatrix, PNormError, PNormReport};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("elements live over different groupoids")]
    GroupoidMismatch,
    #[error("`{0}` is not a unit")]
    NotAUnit(String),
    #[error("arrow set is not a bisection: {0}")]
    NotABisection(String),
    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("invalid unit map: {0}")]
    BadUnitMap(String),
    #[error(transparent)]
    PNorm(#[from] PNormError),
}

/// An element of C_c(𝒢): one complex coefficient per arrow.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    groupoid: Arc<FiniteGroupoid>,
    coeffs: Vec<Complex64>,
}

/// Wire format: a groupoid (inline or a path resolved by the caller) plus
/// sparse coefficients keyed by arrow label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraElementJson {
    pub groupoid: GroupoidRef,
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupoidRef {
    Path(String),
    Inline(GroupoidJson),
}

impl AlgebraElement {
    pub fn zero(groupoid: Arc<FiniteGroupoid>) -> Self {
        let coeffs = vec![Complex64::new(0.0, 0.0); groupoid.n_arrows()];
        AlgebraElement { groupoid, coeffs }
    }

    /// δ_γ for the arrow with the given label.
    pub fn delta(groupoid: Arc<FiniteGroupoid>, label: &str) -> Result<Self, AlgebraError> {
        let a = groupoid
            .arrow_by_label(label)
            .ok_or_else(|| AlgebraError::UnknownArrow(label.into()))?;
        let mut f = Self::zero(groupoid);
        f.coeffs[a] = Complex64::new(1.0, 0.0);
        Ok(f)
    }

    /// The indicator 1_S of an arrow subset.
    pub fn indicator(
        groupoid: Arc<FiniteGroupoid>,
        arrows: &BTreeSet<usize>,
    ) -> Result<Self, AlgebraError> {
        if let Some(&bad) = arrows.iter().find(|&&a| a >= groupoid.n_arrows()) {
            return Err(AlgebraError::UnknownArrow(format!("index {bad}")));
        }
        let mut f = Self::zero(groupoid);
        for &a in arrows {
            f.coeffs[a] = Complex64::new(1.0, 0.0);
        }
        Ok(f)
    }

    /// The identity of the algebra: 1 on every unit.
    pub fn unit_indicator(groupoid: Arc<FiniteGroupoid>) -> Self {
        let mut f = Self::zero(groupoid.clone());
        for u in groupoid.unit_indices() {
            f.coeffs[u] = Complex64::new(1.0, 0.0);
        }
        f
    }

    pub fn from_coeffs(
        groupoid: Arc<FiniteGroupoid>,
        coeffs: &BTreeMap<String, [f64; 2]>,
    ) -> Result<Self, AlgebraError> {
        let mut f = Self::zero(groupoid.clone());
        for (label, &[re, im]) in coeffs {
            let a = groupoid
                .arrow_by_label(label)
                .ok_or_else(|| AlgebraError::UnknownArrow(label.clone()))?;
            f.coeffs[a] = Complex64::new(re, im);
        }
        Ok(f)
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn coeff(&self, arrow: usize) -> Complex64 {
        self.coeffs[arrow]
    }

    pub fn set_coeff(&mut self, arrow: usize, z: Complex64) {
        self.coeffs[arrow] = z;
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        same_groupoid(self, other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(AlgebraElement {
            groupoid: self.groupoid.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
        same_groupoid(self, other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(AlgebraElement {
            groupoid: self.groupoid.clone(),
            coeffs,
        })
    }

    pub fn scale(&self, z: Complex64) -> AlgebraElement {
        AlgebraElement {
            groupoid: self.groupoid.clone(),
            coeffs: self.coeffs.iter().map(|a| a * z).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &AlgebraElement) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Unit-supported with nonnegative real coefficients, up to the
    /// positivity slacks.
    pub fn is_nonneg_unit_supported(&self) -> bool {
        self.groupoid.arrow_indices().all(|a| {
            let z = self.coeffs[a];
            if self.groupoid.is_unit(a) {
                z.im.abs() <= POSITIVITY_IMAG_SLACK && z.re >= -IDENTITY_SLACK
            } else {
                z.norm() <= IDENTITY_SLACK
            }
        })
    }

    pub fn to_json(&self, groupoid: GroupoidRef) -> AlgebraElementJson {
        let mut coeffs = BTreeMap::new();
        for a in self.groupoid.arrow_indices() {
            let z = self.coeffs[a];
            if z != Complex64::new(0.0, 0.0) {
                coeffs.insert(self.groupoid.label(a).to_string(), [z.re, z.im]);
            }
        }
        AlgebraElementJson { groupoid, coeffs }
    }
}

fn same_groupoid(f: &AlgebraElement, g: &AlgebraElement) -> Result<(), AlgebraError> {
    if Arc::ptr_eq(&f.groupoid, &g.groupoid) || f.groupoid == g.groupoid {
        Ok(())
    } else {
        Err(AlgebraError::GroupoidMismatch)
    }
}

/// A normalized unit-modulus 2-cocycle on the composable pairs.
#[derive(Debug, Clone)]
pub struct Cocycle {
    groupoid: Arc<FiniteGroupoid>,
    values: BTreeMap<(usize, usize), Complex64>,
}

/// Wire format: `{"entries":[[a,b,[re,im]]]}` with arrow labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleJson {
    pub entries: Vec<(String, String, [f64; 2])>,
}

impl Cocycle {
    pub fn trivial(groupoid: Arc<FiniteGroupoid>) -> Self {
        let values = groupoid
            .composition_entries()
            .map(|(a, b, _)| ((a, b), Complex64::new(1.0, 0.0)))
            .collect();
        Cocycle { groupoid, values }
    }

    pub fn new(
        groupoid: Arc<FiniteGroupoid>,
        values: BTreeMap<(usize, usize), Complex64>,
    ) -> Result<Self, AlgebraError> {
        let c = Cocycle { groupoid, values };
        c.validate()?;
        Ok(c)
    }

    pub fn from_json(
        groupoid: Arc<FiniteGroupoid>,
        j: &CocycleJson,
    ) -> Result<Self, AlgebraError> {
        let mut values = BTreeMap::new();
        for (la, lb, [re, im]) in &j.entries {
            let a = groupoid
                .arrow_by_label(la)
                .ok_or_else(|| AlgebraError::UnknownArrow(la.clone()))?;
            let b = groupoid
                .arrow_by_label(lb)
                .ok_or_else(|| AlgebraError::UnknownArrow(lb.clone()))?;
            values.insert((a, b), Complex64::new(*re, *im));
        }
        Self::new(groupoid, values)
    }

    pub fn to_json(&self) -> CocycleJson {
        CocycleJson {
            entries: self
                .values
                .iter()
                .map(|(&(a, b), z)| {
                    (
                        self.groupoid.label(a).to_string(),
                        self.groupoid.label(b).to_string(),
                        [z.re, z.im],
                    )
                })
                .collect(),
        }
    }

    pub fn value(&self, a: usize, b: usize) -> Complex64 {
        self.values[&(a, b)]
    }

    /// Checks the domain (exactly the composable pairs), unit modulus,
    /// normalization, and the 2-cocycle identity on all composable
    /// triples.
    fn validate(&self) -> Result<(), AlgebraError> {
        let g = &self.groupoid;
        let mut pairs = BTreeSet::new();
        for (a, b, _) in g.composition_entries() {
            pairs.insert((a, b));
            match self.values.get(&(a, b)) {
                None => {
                    return Err(AlgebraError::InvalidCocycle(format!(
                        "missing value on composable pair ({}, {})",
                        g.label(a),
                        g.label(b)
                    )))
                }
                Some(z) => {
                    if (z.norm() - 1.0).abs() > POSITIVITY_IMAG_SLACK {
                        return Err(AlgebraError::InvalidCocycle(format!(
                            "|c({}, {})| = {}",
                            g.label(a),
                            g.label(b),
                            z.norm()
                        )));
                    }
                    if (g.is_unit(a) || g.is_unit(b))
                        && (z - Complex64::new(1.0, 0.0)).norm() > POSITIVITY_IMAG_SLACK
                    {
                        return Err(AlgebraError::InvalidCocycle(format!(
                            "not normalized at ({}, {})",
                            g.label(a),
                            g.label(b)
                        )));
                    }
                }
            }
        }
        if let Some(&(a, b)) = self.values.keys().find(|k| !pairs.contains(k)) {
            return Err(AlgebraError::InvalidCocycle(format!(
                "value on non-composable pair ({}, {})",
                g.label(a),
                g.label(b)
            )));
        }
        // 2-cocycle identity c(γ,η)c(γη,ζ) = c(η,ζ)c(γ,ηζ)
        for (gamma, eta, gamma_eta) in g.composition_entries() {
            for zeta in g.arrow_indices() {
                let Some(eta_zeta) = g.compose(eta, zeta) else {
                    continue;
                };
                let lhs = self.value(gamma, eta) * self.value(gamma_eta, zeta);
                let rhs = self.value(eta, zeta) * self.value(gamma, eta_zeta);
                if (lhs - rhs).norm() > POSITIVITY_IMAG_SLACK {
                    return Err(AlgebraError::InvalidCocycle(format!(
                        "2-cocycle identity fails on ({}, {}, {})",
                        g.label(gamma),
                        g.label(eta),
                        g.label(zeta)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Untwisted convolution (f*g)(γ) = Σ_{τ: tgt(τ)=tgt(γ)} f(τ)·g(τ⁻¹γ).
pub fn convolve(f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement, AlgebraError> {
    convolve_impl(f, g, None)
}

/// Twisted convolution: the summand picks up the factor c(τ, τ⁻¹γ).
pub fn twisted_convolve(
    f: &AlgebraElement,
    g: &AlgebraElement,
    c: &Cocycle,
) -> Result<AlgebraElement, AlgebraError> {
    if !(Arc::ptr_eq(&c.groupoid, &f.groupoid) || c.groupoid == f.groupoid) {
        return Err(AlgebraError::GroupoidMismatch);
    }
    convolve_impl(f, g, Some(c))
}

fn convolve_impl(
    f: &AlgebraElement,
    g: &AlgebraElement,
    c: Option<&Cocycle>,
) -> Result<AlgebraElement, AlgebraError> {
    same_groupoid(f, g)?;
    let mut out = AlgebraElement::zero(f.groupoid.clone());
    // summing f(a)·g(b) over composable pairs a·b = γ is the same sum
    // reindexed by τ = a, τ⁻¹γ = b
    for (a, b, ab) in f.groupoid.composition_entries() {
        let factor = match c {
            Some(c) => c.value(a, b),
            None => Complex64::new(1.0, 0.0),
        };
        out.coeffs[ab] += f.coeffs[a] * g.coeffs[b] * factor;
    }
    Ok(out)
}

/// The involution f*(γ) = conj(f(γ⁻¹)).
pub fn involute(f: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.groupoid.clone());
    for a in f.groupoid.arrow_indices() {
        out.coeffs[a] = f.coeffs[f.groupoid.inv(a)].conj();
    }
    out
}

/// Arrows with exactly nonzero stored coefficient.
pub fn strict_support(f: &AlgebraElement) -> BTreeSet<usize> {
    f.groupoid
        .arrow_indices()
        .filter(|&a| f.coeffs[a] != Complex64::new(0.0, 0.0))
        .collect()
}

/// The matrix of λ_x(f) on the domain fiber 𝒢x.
#[derive(Debug, Clone)]
pub struct FiberRepresentation {
    pub unit: String,
    pub basis: Vec<String>,
    pub matrix: PMatrix,
}

/// Left regular representation at the unit x: entry at (σ, τ) is
/// f(στ⁻¹)·c(στ⁻¹, τ) on the basis {δ_τ : τ ∈ 𝒢x}.
pub fn lambda_matrix(
    f: &AlgebraElement,
    x: usize,
    p: f64,
    cocycle: Option<&Cocycle>,
) -> Result<FiberRepresentation, AlgebraError> {
    let g = &f.groupoid;
    if x >= g.n_arrows() || !g.is_unit(x) {
        let name = if x < g.n_arrows() {
            g.label(x).to_string()
        } else {
            format!("index {x}")
        };
        return Err(AlgebraError::NotAUnit(name));
    }
    let fiber = g.domain_fiber(x);
    let dim = fiber.len();
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (row, &sigma) in fiber.iter().enumerate() {
        for (col, &tau) in fiber.iter().enumerate() {
            let st = g
                .compose(sigma, g.inv(tau))
                .expect("both arrows share the source x");
            let factor = match cocycle {
                Some(c) => c.value(st, tau),
                None => Complex64::new(1.0, 0.0),
            };
            entries[row * dim + col] = f.coeffs[st] * factor;
        }
    }
    Ok(FiberRepresentation {
        unit: g.label(x).to_string(),
        basis: fiber.iter().map(|&a| g.label(a).to_string()).collect(),
        matrix: PMatrix::new(dim, p, entries)?,
    })
}

/// The reduced norm with its arg-max fiber.
#[derive(Debug, Clone)]
pub struct ReducedNormReport {
    pub value: f64,
    pub fiber: String,
    pub fiber_dim: usize,
    pub norm: PNormReport,
}

/// ‖f‖_λ = max over units x of ‖λ_x(f)‖_{p→p}; exact finite max over
/// fibers, each fiber norm via the ascent engine.
pub fn reduced_norm(
    f: &AlgebraElement,
    p: f64,
    cocycle: Option<&Cocycle>,
) -> Result<ReducedNormReport, AlgebraError> {
    let g = &f.groupoid;
    let mut best: Option<ReducedNormReport> = None;
    for x in g.unit_indices() {
        let fiber = lambda_matrix(f, x, p, cocycle)?;
        if fiber.matrix.n() == 0 {
            continue;
        }
        let rep = p_operator_norm(&fiber.matrix);
        if best.as_ref().is_none_or(|b| rep.value > b.value) {
            best = Some(ReducedNormReport {
                value: rep.value,
                fiber: fiber.unit.clone(),
                fiber_dim: fiber.basis.len(),
                norm: rep,
            });
        }
    }
    // every unit has at least itself in its fiber, so best is set
    Ok(best.expect("groupoid has at least one unit"))
}

/// Restriction of the coefficients to the unit space.
pub fn expectation(f: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero(f.groupoid.clone());
    for u in f.groupoid.unit_indices() {
        out.coeffs[u] = f.coeffs[u];
    }
    out
}

/// The j-map computed through the pairing ⟨λ_x(f)δ_x, δ_σ⟩ with
/// x = src(σ), rather than read off the coefficients; for finite
/// groupoids the two agree, and this function is the documented
/// consistency witness.
pub fn j_map(f: &AlgebraElement, cocycle: Option<&Cocycle>) -> Result<AlgebraElement, AlgebraError> {
    let g = &f.groupoid;
    let mut out = AlgebraElement::zero(g.clone());
    for x in g.unit_indices() {
        let fiber = lambda_matrix(f, x, 2.0, cocycle)?;
        let arrows = g.domain_fiber(x);
        let col = arrows
            .iter()
            .position(|&a| a == x)
            .expect("the unit lies in its own fiber");
        for (row, &sigma) in arrows.iter().enumerate() {
            out.coeffs[sigma] = fiber.matrix.entry(row, col);
        }
    }
    Ok(out)
}

fn bisection_check(
    g: &FiniteGroupoid,
    arrows: &BTreeSet<usize>,
) -> Result<(), AlgebraError> {
    let mut srcs = BTreeSet::new();
    let mut tgts = BTreeSet::new();
    for &a in arrows {
        if a >= g.n_arrows() {
            return Err(AlgebraError::UnknownArrow(format!("index {a}")));
        }
        if !srcs.insert(g.src(a)) {
            return Err(AlgebraError::NotABisection(format!(
                "source {} repeated",
                g.label(g.src(a))
            )));
        }
        if !tgts.insert(g.tgt(a)) {
            return Err(AlgebraError::NotABisection(format!(
                "target {} repeated",
                g.label(g.tgt(a))
            )));
        }
    }
    Ok(())
}

/// Verifies (1_S * f)(σ) = f(1_S⁻¹σ) on every arrow, where 1_S⁻¹σ is the
/// unique composition τ⁻¹σ with τ ∈ S, tgt(τ) = tgt(σ), when it exists.
pub fn indicator_convolution_check(
    g: &Arc<FiniteGroupoid>,
    s: &BTreeSet<usize>,
    f: &AlgebraElement,
) -> Result<bool, AlgebraError> {
    if !(Arc::ptr_eq(g, &f.groupoid) || **g == *f.groupoid) {
        return Err(AlgebraError::GroupoidMismatch);
    }
    bisection_check(g, s)?;
    let ind = AlgebraElement::indicator(g.clone(), s)?;
    let lhs = convolve(&ind, f)?;
    for sigma in g.arrow_indices() {
        let mut rhs = Complex64::new(0.0, 0.0);
        for &tau in s.iter() {
            if g.tgt(tau) == g.tgt(sigma) {
                if let Some(rest) = g.compose(g.inv(tau), sigma) {
                    rhs = f.coeffs[rest];
                }
                break; // tgt is injective on a bisection
            }
        }
        if lhs.coeffs[sigma] != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A partial bijection of the unit space.
#[derive(Debug, Clone, Default)]
pub struct PartialUnitMap {
    map: BTreeMap<usize, usize>,
}

impl PartialUnitMap {
    pub fn new(g: &FiniteGroupoid, map: BTreeMap<usize, usize>) -> Result<Self, AlgebraError> {
        let mut seen = BTreeSet::new();
        for (&x, &y) in &map {
            for e in [x, y] {
                if e >= g.n_arrows() || !g.is_unit(e) {
                    return Err(AlgebraError::BadUnitMap(format!(
                        "entry {e} is not a unit"
                    )));
                }
            }
            if !seen.insert(y) {
                return Err(AlgebraError::BadUnitMap(format!(
                    "target {} repeated",
                    g.label(y)
                )));
            }
        }
        Ok(PartialUnitMap { map })
    }

    /// The action x ↦ tgt(τ) for the unique τ ∈ S with src(τ) = x.
    pub fn from_bisection(
        g: &FiniteGroupoid,
        s: &BTreeSet<usize>,
    ) -> Result<Self, AlgebraError> {
        bisection_check(g, s)?;
        let map = s.iter().map(|&a| (g.src(a), g.tgt(a))).collect();
        Ok(PartialUnitMap { map })
    }

    pub fn domain(&self) -> BTreeSet<usize> {
        self.map.keys().copied().collect()
    }

    pub fn range(&self) -> BTreeSet<usize> {
        self.map.values().copied().collect()
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.map.get(&x).copied()
    }

    pub fn preimage(&self, y: usize) -> Option<usize> {
        self.map
            .iter()
            .find_map(|(&x, &fy)| (fy == y).then_some(x))
    }
}

/// Per-condition admissibility report for a pair (a, b) against a partial
/// homeomorphism β of the unit space.
#[derive(Debug, Clone)]
pub struct AdmissiblePairReport {
    pub n1_positivity: bool,
    pub n2_supports: bool,
    pub r1_intertwine: bool,
    pub r2_intertwine: bool,
    pub details: Vec<String>,
}

impl AdmissiblePairReport {
    pub fn admissible(&self) -> bool {
        self.n1_positivity && self.n2_supports && self.r1_intertwine && self.r2_intertwine
    }
}

/// Checks the normalization conditions for (a, b, β):
///   (N1) b·f·a and a·f·b are nonnegative unit-supported for f in the
///        positive cone of C(X) (spanned by single-unit indicators),
///   (N2) strict supports of ba and ab equal dom β and ran β,
///   (R1) b·f·a = (f∘β)·(b·a) for all single-unit indicators f,
///   (R2) a·f·b = (f∘β⁻¹)·(a·b) likewise,
/// all identities to 1e−9.
pub fn verify_admissible_pair(
    a: &AlgebraElement,
    b: &AlgebraElement,
    beta: &PartialUnitMap,
    _p: f64,
) -> Result<AdmissiblePairReport, AlgebraError> {
    same_groupoid(a, b)?;
    let g = a.groupoid.clone();
    let mut details = Vec::new();

    let ba = convolve(b, a)?;
    let ab = convolve(a, b)?;

    // N1 over the spanning family of single-unit indicators
    let mut n1 = true;
    for u in g.unit_indices() {
        let f = AlgebraElement::delta(g.clone(), g.label(u))
            .expect("unit label exists");
        let bfa = convolve(&convolve(b, &f)?, a)?;
        let afb = convolve(&convolve(a, &f)?, b)?;
        if !bfa.is_nonneg_unit_supported() {
            n1 = false;
            details.push(format!("N1: b·δ_{}·a is not nonnegative unit-supported", g.label(u)));
        }
        if !afb.is_nonneg_unit_supported() {
            n1 = false;
            details.push(format!("N1: a·δ_{}·b is not nonnegative unit-supported", g.label(u)));
        }
    }

    // N2: strict supports against dom/ran β
    let supp_ba = strict_support(&ba);
    let supp_ab = strict_support(&ab);
    let mut n2 = supp_ba == beta.domain() && supp_ab == beta.range();
    if supp_ba != beta.domain() {
        details.push("N2: supp(ba) differs from dom β".into());
    }
    if supp_ab != beta.range() {
        details.push("N2: supp(ab) differs from ran β".into());
        n2 = false;
    }

    // R1/R2 over the spanning family
    let mut r1 = true;
    let mut r2 = true;
    for u in g.unit_indices() {
        let f = AlgebraElement::delta(g.clone(), g.label(u)).expect("unit label exists");
        // f∘β is supported on β⁻¹(u)
        let mut f_beta = AlgebraElement::zero(g.clone());
        if let Some(x) = beta.preimage(u) {
            f_beta.set_coeff(x, Complex64::new(1.0, 0.0));
        }
        let lhs = convolve(&convolve(b, &f)?, a)?;
        let rhs = convolve(&f_beta, &ba)?;
        if lhs.max_abs_diff(&rhs) > IDENTITY_SLACK {
            r1 = false;
            details.push(format!("R1 fails at δ_{}", g.label(u)));
        }
        // f∘β⁻¹ is supported on β(u)
        let mut f_beta_inv = AlgebraElement::zero(g.clone());
        if let Some(y) = beta.apply(u) {
            f_beta_inv.set_coeff(y, Complex64::new(1.0, 0.0));
        }
        let lhs = convolve(&convolve(a, &f)?, b)?;
        let rhs = convolve(&f_beta_inv, &ab)?;
        if lhs.max_abs_diff(&rhs) > IDENTITY_SLACK {
            r2 = false;
            details.push(format!("R2 fails at δ_{}", g.label(u)));
        }
    }

    Ok(AdmissiblePairReport {
        n1_positivity: n1,
        n2_supports: n2,
        r1_intertwine: r1,
        r2_intertwine: r2,
        details,
    })
}
