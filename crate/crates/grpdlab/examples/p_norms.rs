//! p-operator norms of complex matrices and the hermitian machinery
//! built on top of them.
//!
//! The norm ‖A‖_{p→p} is computed by projected gradient ascent on the
//! unit p-sphere with multiple restarts; every report carries the best
//! witness vector. Hermitian elements are detected by checking that
//! exp(itA) stays an invertible isometry along a grid of times, and
//! spatial partial isometries come from weighted coordinate injections.

use grpdlab::pnorm::{
    build_spatial, hermitian_test, is_invertible_isometry, is_mp_partial_isometry, matrix_exp,
    p_operator_norm, vector_p_norm, PMatrix, SpatialData,
};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> anyhow::Result<()> {
    // the all-ones 2x2 matrix has ‖A‖_{p→p} = 2 for every p: the norm of
    // a rank one matrix u v^T is ‖u‖_p ‖v‖_q
    let ones = PMatrix::from_rows(3.0, &vec![vec![c(1.0, 0.0); 2]; 2])?;
    let rep = p_operator_norm(&ones);
    println!(
        "‖ones‖_3 = {:.12} after {} restarts (converged: {})",
        rep.value, rep.restarts, rep.converged
    );
    assert!((rep.value - 2.0).abs() < 1e-9);

    // the witness achieves the reported ratio
    let ratio = vector_p_norm(&ones.apply(&rep.witness), 3.0) / vector_p_norm(&rep.witness, 3.0);
    assert!((ratio - rep.value).abs() < 1e-9);

    // p = 1 and p = ∞-like large p bracket the 2-norm for this matrix
    let a = PMatrix::from_rows(1.0, &[vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])?;
    println!("‖A‖_1 = {:.9} (max column sum 3)", p_operator_norm(&a).value);
    assert!((p_operator_norm(&a).value - 3.0).abs() < 1e-9);
    let a16 = a.with_p(16.0)?;
    println!("‖A‖_16 = {:.9} (approaches max row sum 3)", p_operator_norm(&a16).value);

    // exp of a nilpotent matrix truncates: exp(N) = I + N
    let nil = PMatrix::from_rows(2.0, &[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])?;
    let en = matrix_exp(&nil);
    let mut expect = PMatrix::identity(2, 2.0)?;
    expect.set(0, 1, c(1.0, 0.0));
    assert!(en.max_abs_diff(&expect) < 1e-12);
    println!("exp(nilpotent) = I + N, entrywise error {:.2e}", en.max_abs_diff(&expect));

    // a real diagonal matrix is hermitian for every p: all exp(itA) are
    // diagonal with unimodular entries, hence isometries
    let p = 4.0;
    let diag = PMatrix::from_rows(p, &[vec![c(0.3, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]])?;
    let h = hermitian_test(&diag, None);
    println!(
        "diag(0.3, -1) at p = {p}: hermitian = {} after {} grid points",
        h.hermitian, h.grid_points_checked
    );
    assert!(h.hermitian);

    // the symmetric but non-diagonal e12 + e21 fails away from p = 2: the
    // grid finds a time where exp(itA) expands some vector
    let sym = PMatrix::from_rows(p, &[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])?;
    let h = hermitian_test(&sym, None);
    println!(
        "e12 + e21 at p = {p}: hermitian = {}, worst ‖exp(itA)‖ = {:.6} at t = {:.4}",
        h.hermitian, h.worst_norm, h.worst_t
    );
    assert!(!h.hermitian);

    // at p = 2 the same matrix is honestly hermitian
    let h2 = hermitian_test(&sym.with_p(2.0)?, None);
    assert!(h2.hermitian);
    println!("e12 + e21 at p = 2: hermitian = {}", h2.hermitian);

    // spatial partial isometries: u moves coordinate 0 to 1 with a phase
    // and kills coordinate 1; its reversal is the MP partner
    let theta = vec![Some(1), None, Some(0)];
    let weights = vec![c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0)];
    let s = SpatialData::new(1.5, theta, weights)?;
    let u = build_spatial(&s);
    let v = build_spatial(&s.reversed());
    assert!(is_mp_partial_isometry(&u, &v)?);
    println!("spatial u with Θ = (0→1, 2→0): MP pair with its reversal");

    // signed permutations are the invertible isometries in the p ≠ 2
    // world; a generic invertible matrix is not
    let perm = PMatrix::from_rows(3.0, &[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])?;
    let rep = is_invertible_isometry(&perm);
    println!("phase permutation: {rep}");
    assert!(rep.isometry);

    let skew = PMatrix::from_rows(3.0, &[vec![c(1.0, 0.0), c(0.4, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])?;
    let rep = is_invertible_isometry(&skew);
    println!("unipotent shear: {rep}");
    assert!(!rep.isometry);

    Ok(())
}
