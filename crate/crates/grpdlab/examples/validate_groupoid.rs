//! Build finite groupoids from explicit arrow tables, validate the axioms,
//! and query the structural predicates (principality, effectiveness,
//! condition (W)).

use grpdlab::groupoid::{
    condition_w_check, is_effective_finite, is_principal, validate_groupoid,
};
use grpdlab::FiniteGroupoid;

fn main() -> anyhow::Result<()> {
    // the full equivalence relation on {1,..,4}: arrows (a,b), composition
    // (a,b)(b,c) = (a,c)
    let g = FiniteGroupoid::full_equivalence(4);
    println!(
        "[4]^2: {} arrows over {} units",
        g.n_arrows(),
        g.n_units()
    );

    let report = validate_groupoid(&g);
    assert!(report.is_valid());
    println!("axioms: {report}");

    // composition is only defined when sources and targets match up
    let a = g.arrow_by_label("(1,2)").unwrap();
    let b = g.arrow_by_label("(2,4)").unwrap();
    let ab = g.compose(a, b).unwrap();
    println!("(1,2) after (2,4) = {}", g.label(ab));
    assert_eq!(g.label(ab), "(1,4)");
    assert!(g.compose(b, a).is_none(), "mismatched ends never compose");

    // a group is a groupoid with one unit; it has isotropy, so it is not
    // principal, and for finite models effectiveness means the same thing
    let z3 = FiniteGroupoid::cyclic_group(3);
    println!(
        "\nZ_3: principal = {}, effective = {}",
        is_principal(&z3),
        is_effective_finite(&z3).effective
    );
    assert!(!is_principal(&z3));
    assert!(is_principal(&g));

    // condition (W): every unit must see an arrow leaving its own fiber
    let w = condition_w_check(&g);
    println!("\n{w}");
    assert!(w.holds);
    let w_z3 = condition_w_check(&z3);
    assert!(!w_z3.holds, "a group has no non-isotropy arrows at all");

    // the JSON form round-trips
    let j = g.to_json();
    let back = FiniteGroupoid::from_json(&j)?;
    assert_eq!(back, g);
    println!("JSON round trip ok");
    Ok(())
}
