//! Box tables: the finite data behind higher-dimensional Thompson
//! group elements.
//!
//! A table over alphabets k_1,…,k_m is a bijection between two complete
//! prefix partitions of the product tree, stored column by column as
//! (v; u) with v the domain box. Composition, inversion, application to
//! long words, and the reduction to a canonical minimal form are all
//! exact.

use grpdlab::sft::Word;
use grpdlab::thompson::{
    apply, bisection_to_table, compose, equals, invert, prefix_transposition, reduce,
    table_to_bisection, Table, TableColumn,
};

fn w(s: &str) -> Word {
    Word::parse(s, 2).unwrap()
}

fn show(t: &Table) -> String {
    t.columns()
        .iter()
        .map(|c| {
            let v: Vec<String> = c.v.iter().map(|x| format!("{x}")).collect();
            let u: Vec<String> = c.u.iter().map(|x| format!("{x}")).collect();
            format!("({}; {})", v.join(","), u.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> anyhow::Result<()> {
    // the baker's-map style element x_0 of Thompson's V: 00->0, 01->10, 1->11
    let x0 = Table::new(
        vec![2],
        vec![
            TableColumn { v: vec![w("00")], u: vec![w("0")] },
            TableColumn { v: vec![w("01")], u: vec![w("10")] },
            TableColumn { v: vec![w("1")], u: vec![w("11")] },
        ],
    )?;
    assert!(x0.validate().is_valid());
    println!("x0 = {}", show(&x0));

    // evaluation refines the input until some domain word is a prefix
    let image = apply(&x0, &[w("0110")])?;
    println!("x0(0110) = {}", image[0]);
    assert_eq!(image[0], w("1010"));

    // composition follows function order: (outer . inner)(x) = outer(inner(x))
    let sq = compose(&x0, &x0)?;
    println!("x0^2 = {}", show(&sq));
    assert_eq!(apply(&sq, &[w("0110")])?[0], apply(&x0, &[w("1010")])?[0]);

    // inverse columns swap the two boxes; the product reduces to the identity
    let inv = invert(&x0);
    let id = Table::identity(vec![2])?;
    let round = compose(&x0, &inv)?;
    assert!(equals(&round, &id)?);
    assert_eq!(reduce(&round)?, id);
    println!("x0 . x0^-1 reduces from {} columns to 1", round.columns().len());

    // two prefix transpositions that do not commute: a = 00<->01, b = 01<->10
    let a = prefix_transposition(&[2], 0, &w("00"), &w("01"))?;
    let b = prefix_transposition(&[2], 0, &w("01"), &w("10"))?;
    assert!(equals(&compose(&a, &a)?, &id)?);
    assert!(equals(&compose(&b, &b)?, &id)?);
    let commutator = compose(&a, &compose(&b, &compose(&a, &b)?)?)?;
    assert!(!equals(&commutator, &id)?);
    println!("[a, b](010) = {}", apply(&commutator, &[w("010")])?[0]);
    assert_eq!(apply(&commutator, &[w("010")])?[0], w("000"));

    // tables over several coordinates act on tuples of words
    let grid_swap = Table::new(
        vec![2, 3],
        vec![
            TableColumn {
                v: vec![w("0"), Word::parse("", 3)?],
                u: vec![w("1"), Word::parse("", 3)?],
            },
            TableColumn {
                v: vec![w("1"), Word::parse("", 3)?],
                u: vec![w("0"), Word::parse("", 3)?],
            },
        ],
    )?;
    let out = apply(&grid_swap, &[w("01"), Word::parse("21", 3)?])?;
    println!(
        "swap in V_(2,3): (01, 21) -> ({}, {})",
        out[0], out[1]
    );
    assert_eq!(out[0], w("11"));

    // every table is the same data as a full-group cylinder bisection
    let s = table_to_bisection(&x0)?;
    let back = bisection_to_table(&s)?;
    assert!(equals(&back, &x0)?);
    println!("x0 -> bisection -> table round trip agrees");

    Ok(())
}
