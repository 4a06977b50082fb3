//! Elementary decompositions ⊔ X_i × [N_i]^2 of principal groupoids, the
//! AF-chain validator, and the AF-structure report.

use grpdlab::groupoid::{
    decompose_elementary, validate_af_chain, AFChain, ElementaryBlock, ElementaryGroupoid,
};
use grpdlab::rigidity::{af_embeddability_report, Verdict};
use grpdlab::FiniteGroupoid;
use std::collections::BTreeMap;

fn main() -> anyhow::Result<()> {
    // a principal groupoid decomposes orbit by orbit
    let g = FiniteGroupoid::disjoint_union(
        &FiniteGroupoid::full_equivalence(2),
        &FiniteGroupoid::full_equivalence(3),
    );
    let d = decompose_elementary(&g).expect("principal");
    println!("blocks:");
    for b in &d.elementary.blocks {
        println!("  |X| = {}, N = {}", b.x.len(), b.n);
    }
    let arrow_count: usize = d.elementary.n_arrows();
    assert_eq!(arrow_count, g.n_arrows(), "sum of N_i^2 matches the arrow count");

    // groups have isotropy, so the decomposition refuses them with a witness
    let z2 = FiniteGroupoid::cyclic_group(2);
    let err = decompose_elementary(&z2).unwrap_err();
    println!("\nZ_2: {err}");

    // the AF report follows the same dividing line: principal inputs get a
    // block decomposition, inputs with isotropy get an abstention (never a
    // non-embeddability claim)
    let rep = af_embeddability_report(&g, 3.0);
    println!("\n{rep}");
    assert_eq!(rep.verdict, Verdict::Confirmed);
    let rep = af_embeddability_report(&z2, 3.0);
    assert_eq!(rep.verdict, Verdict::Inconclusive);
    assert!(rep.statistics["caveat"].contains("Fourier"));

    // a finite AF chain over one unit space, with explicit inclusions
    let stage = ElementaryGroupoid {
        blocks: vec![ElementaryBlock { x: vec!["x".into()], n: 2 }],
    };
    let model = stage.to_groupoid();
    let identity: BTreeMap<String, String> = model
        .arrow_indices()
        .map(|a| (model.label(a).to_string(), model.label(a).to_string()))
        .collect();
    let chain = AFChain {
        stages: vec![stage.clone(), stage.clone()],
        inclusions: vec![identity.clone()],
    };
    assert!(validate_af_chain(&chain).is_valid());
    println!("constant chain over {} arrows: valid", model.n_arrows());

    // break the inclusion and the validator names the failure
    let mut bad = identity;
    bad.insert("x:(1,2)".into(), "x:(2,1)".into());
    let broken = AFChain {
        stages: vec![stage.clone(), stage],
        inclusions: vec![bad],
    };
    let rep = validate_af_chain(&broken);
    assert!(!rep.is_valid());
    println!("broken chain: {}", rep.violations[0]);

    Ok(())
}
