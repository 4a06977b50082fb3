//! Germ groupoids of inverse-semigroup actions by partial bijections.
//!
//! Two germs [s, x] and [t, x] coincide when s and t agree on some
//! idempotent neighborhood of x. For a group acting on a finite set this
//! never collapses anything except what the action itself collapses, so
//! the germ count of a free enough action is |G| * |X|.

use grpdlab::groupoid::{
    germ_groupoid, validate_groupoid, FinitePartialBijectionSemigroup,
};

fn main() -> anyhow::Result<()> {
    // Z_2 swapping two points: germs [e,x0], [e,x1], [s,x0], [s,x1] give
    // exactly the four arrows of [2]^2
    let swap = FinitePartialBijectionSemigroup::group_action(
        vec!["x0".into(), "x1".into()],
        vec!["e".into(), "s".into()],
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![0, 1], vec![1, 0]],
    )?;
    let g = germ_groupoid(&swap)?;
    println!("Z_2 swap action: {} germs over {} units", g.n_arrows(), g.n_units());
    assert!(validate_groupoid(&g).is_valid());
    assert_eq!(g.n_arrows(), 4);
    assert_eq!(g.n_units(), 2);

    // the non-unit germs connect the two points
    let movers = g
        .arrow_indices()
        .filter(|&a| !g.is_unit(a) && g.src(a) != g.tgt(a))
        .count();
    assert_eq!(movers, 2);

    // a partial bijection semigroup needs its idempotents spelled out; the
    // semigroup {id restricted to {x0}, the empty map, id} is closed under
    // composition and stars
    let partial = FinitePartialBijectionSemigroup::from_partial_maps(
        vec!["x0".into(), "x1".into()],
        vec!["id".into(), "p".into(), "zero".into()],
        vec![
            vec![Some(0), Some(1)],
            vec![Some(0), None],
            vec![None, None],
        ],
    )?;
    let h = germ_groupoid(&partial)?;
    println!("partial-identity action: {} germs", h.n_arrows());
    // germs of restrictions of the identity are unit germs, so only the
    // two units survive
    assert_eq!(h.n_arrows(), 2);

    // a non-faithful action: Z_2 acting trivially still has 2|X| germs
    // because germs remember the group element through the idempotent test
    let trivial_z2 = FinitePartialBijectionSemigroup::group_action(
        vec!["x0".into(), "x1".into(), "x2".into()],
        vec!["e".into(), "s".into()],
        vec![vec![0, 1], vec![1, 0]],
        vec![vec![0, 1, 2], vec![0, 1, 2]],
    )?;
    let t = germ_groupoid(&trivial_z2)?;
    println!("trivial Z_2 on 3 points: {} germs", t.n_arrows());
    assert_eq!(t.n_arrows(), 6);

    Ok(())
}
