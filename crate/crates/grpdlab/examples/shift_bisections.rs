//! Symbolic bisections of product shift spaces: cylinder pairs Z(γ; δ),
//! their exact Kraft measures, composition, extension to full-group
//! elements, and localized restrictions.

use grpdlab::sft::{
    alpha_apply, bisection_inverse, bisection_product, domain_boxes, extend_to_full_group_bisection,
    is_full_group_element, loc_restrict, range_boxes, CylinderPair,
};
use grpdlab::{CylinderBisection, Word};

fn pair(range: &[&str], domain: &[&str], alphabets: &[u32]) -> CylinderPair {
    CylinderPair::parse(range, domain, alphabets).unwrap()
}

fn main() -> anyhow::Result<()> {
    let k2 = [2u32];

    // the odometer-flavored example: S = Z(00;0) ∪ Z(01;10) ∪ Z(1;11)
    let s = CylinderBisection::new(
        vec![2],
        vec![
            pair(&["00"], &["0"], &k2),
            pair(&["01"], &["10"], &k2),
            pair(&["1"], &["11"], &k2),
        ],
    )?;

    // both rows partition the whole space, so S lies in the full group
    let (dom, dom_measure) = domain_boxes(&s);
    let (_, ran_measure) = range_boxes(&s);
    println!("domain boxes: {}", dom.len());
    println!("domain measure = {dom_measure}, range measure = {ran_measure}");
    assert!(is_full_group_element(&s));

    // composing with the inverse gives (a refinement of) the identity
    let round_trip = bisection_product(&s, &bisection_inverse(&s))?;
    let identity = CylinderBisection::identity(vec![2])?;
    assert!(round_trip.semantic_eq(&identity)?);
    println!("S · S^-1 = id (semantically)");

    // pointwise action on boxes: alpha_S maps the cylinder 11· into 1·
    let image = alpha_apply(&s, &[Word::parse("11", 2)?])?;
    println!(
        "alpha_S(11*) = {}",
        image
            .iter()
            .map(|b| b.iter().map(|w| w.to_string()).collect::<String>())
            .collect::<Vec<_>>()
            .join(" ∪ ")
    );

    // a single cylinder pair extends to a full-group element by splitting
    // the complements into matching cells
    let z = pair(&["00"], &["01"], &k2);
    let full = extend_to_full_group_bisection(&z)?;
    assert!(is_full_group_element(&full));
    println!("extension of Z(00; 01) has {} columns", full.columns().len());

    // directions along u^infinity cannot be fixed by finitely many splits
    let periodic = pair(&["0"], &[""], &k2);
    let err = extend_to_full_group_bisection(&periodic).unwrap_err();
    println!("extension of Z(0; ε): {err}");

    // a full-group element restricted to a clopen set: only the columns
    // meeting the set survive, cut down to it
    let loc = loc_restrict(&s, &[vec![Word::parse("11", 2)?]])?;
    println!(
        "S restricted to 11*: {} column(s)",
        loc.restricted().columns().len()
    );

    // multi-coordinate bisections work per coordinate; the measures are
    // products of per-coordinate Kraft weights
    let t = CylinderBisection::new(
        vec![2, 3],
        vec![
            pair(&["0", ""], &["1", ""], &[2, 3]),
            pair(&["1", ""], &["0", ""], &[2, 3]),
        ],
    )?;
    assert!(is_full_group_element(&t));
    let (_, m) = domain_boxes(&t);
    println!("swap in G_2 x G_3: domain measure {m}");

    Ok(())
}
