//! The convolution algebra of a finite groupoid, with optional twist.
//!
//! Elements are finitely supported complex functions on arrows,
//! (f * g)(γ) = Σ f(α) g(β) over factorizations γ = αβ. On the full
//! equivalence relation [n]² the deltas are matrix units; a 2-cocycle
//! twists the product by a phase; the left regular representation turns
//! every element into one matrix per unit fiber, and the reduced p-norm
//! is the largest fiber norm.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use grpdlab::algebra::{
    convolve, expectation, involute, lambda_matrix, reduced_norm, twisted_convolve,
    verify_admissible_pair, AlgebraElement, Cocycle, PartialUnitMap,
};
use grpdlab::groupoid::FiniteGroupoid;
use num_complex::Complex64;

fn main() -> anyhow::Result<()> {
    // deltas on [3]² multiply like matrix units: e_{12} e_{23} = e_{13}
    let g = Arc::new(FiniteGroupoid::full_equivalence(3));
    let e12 = AlgebraElement::delta(g.clone(), "(1,2)")?;
    let e23 = AlgebraElement::delta(g.clone(), "(2,3)")?;
    let e13 = AlgebraElement::delta(g.clone(), "(1,3)")?;
    assert_eq!(convolve(&e12, &e23)?.max_abs_diff(&e13), 0.0);
    assert_eq!(convolve(&e12, &e13)?.max_abs(), 0.0);
    println!("matrix unit law on [3]^2: e12 * e23 = e13, e12 * e13 = 0");

    // the involution conjugates and flips arrows; it reverses products
    let f = e12.add(&e13.scale(Complex64::new(0.0, 2.0)))?;
    let h = e23.scale(Complex64::new(0.5, -1.0));
    let lhs = involute(&convolve(&f, &h)?);
    let rhs = convolve(&involute(&h), &involute(&f))?;
    assert!(lhs.max_abs_diff(&rhs) < 1e-15);
    println!("(f * h)^* = h^* * f^*");

    // unit indicator is the multiplicative identity
    let one = AlgebraElement::unit_indicator(g.clone());
    assert_eq!(convolve(&one, &f)?.max_abs_diff(&f), 0.0);
    assert_eq!(convolve(&f, &one)?.max_abs_diff(&f), 0.0);

    // each unit fiber of [n]² carries the element as a literal matrix:
    // the (σ, τ) entry of λ_x is f(στ^{-1})
    let rep = lambda_matrix(&f, g.arrow_by_label("(1,1)").unwrap(), 2.0, None)?;
    println!(
        "λ at (1,1): basis {:?}, dim {}",
        rep.basis,
        rep.matrix.n()
    );

    // reduced norm of e11 + e12 grows with p: the fiber matrix has a
    // single nonzero row (1, 1, 0), and such a row has p->p norm 2^{1-1/p}
    let row = AlgebraElement::delta(g.clone(), "(1,1)")?.add(&e12)?;
    for p in [1.0, 2.0, 3.0] {
        let r = reduced_norm(&row, p, None)?;
        println!(
            "|e11 + e12|_λ at p = {p}: {:.12} on fiber {} (dim {})",
            r.value, r.fiber, r.fiber_dim
        );
    }
    let r3 = reduced_norm(&row, 3.0, None)?;
    assert!((r3.value - 2f64.powf(2.0 / 3.0)).abs() < 1e-8);

    // a sign cocycle on Z_2 makes the generator square to -1, so the
    // twisted algebra is C ⊕ C with a complex unit, not C ⊕ C with signs
    let z2 = Arc::new(FiniteGroupoid::cyclic_group(2));
    let e = z2.arrow_by_label("g0").unwrap();
    let s = z2.arrow_by_label("g1").unwrap();
    let mut vals = BTreeMap::new();
    vals.insert((e, e), Complex64::new(1.0, 0.0));
    vals.insert((e, s), Complex64::new(1.0, 0.0));
    vals.insert((s, e), Complex64::new(1.0, 0.0));
    vals.insert((s, s), Complex64::new(-1.0, 0.0));
    let sign = Cocycle::new(z2.clone(), vals)?;
    let ds = AlgebraElement::delta(z2.clone(), "g1")?;
    let de = AlgebraElement::delta(z2.clone(), "g0")?;
    let sq = twisted_convolve(&ds, &ds, &sign)?;
    assert_eq!(sq.max_abs_diff(&de.scale(Complex64::new(-1.0, 0.0))), 0.0);
    let tw = reduced_norm(&ds, 3.0, Some(&sign))?;
    println!("twisted Z_2: δs * δs = -δe, |δs|_λ = {:.12}", tw.value);
    assert!((tw.value - 1.0).abs() < 1e-9);

    // the expectation keeps only unit coefficients; for a bisection
    // indicator 1_S it recovers the range projection 1_{r(S)}
    let arrows: BTreeSet<usize> = ["(1,2)", "(2,3)"]
        .iter()
        .map(|l| g.arrow_by_label(l).unwrap())
        .collect();
    let ind = AlgebraElement::indicator(g.clone(), &arrows)?;
    let proj = convolve(&ind, &involute(&ind))?;
    let ranges: BTreeSet<usize> = ["(1,1)", "(2,2)"]
        .iter()
        .map(|l| g.arrow_by_label(l).unwrap())
        .collect();
    let range_proj = AlgebraElement::indicator(g.clone(), &ranges)?;
    assert_eq!(expectation(&proj).max_abs_diff(&range_proj), 0.0);
    println!("E(1_S * 1_S^*) = 1_r(S) for S = {{(1,2), (2,3)}}");

    // the pair (1_S, 1_S^*) is admissible for the unit map of S: both
    // products are positive unit projections with the right supports, and
    // the intertwining relations hold exactly
    let beta = PartialUnitMap::from_bisection(&g, &arrows)?;
    let report = verify_admissible_pair(&ind, &involute(&ind), &beta, 2.0)?;
    println!(
        "admissible pair: N1 {} N2 {} R1 {} R2 {}",
        report.n1_positivity, report.n2_supports, report.r1_intertwine, report.r2_intertwine
    );
    assert!(report.admissible());

    Ok(())
}
