//! grpdlab: a desk-scale lab for finite étale groupoids and their ℓ^p machinery.
//!
//! The crate models the objects at finite scale only: groupoids are explicit
//! arrow tables, symbolic bisections are finite unions of cylinder pairs over
//! products of full shifts, and full-group elements are two-row "box tables"
//! (generalized Brin–Thompson elements). On top of that sit the convolution
//! algebra of a finite groupoid with its reduced ℓ^p norm, a numerical
//! p-operator-norm engine, and a suite of statistical rigidity checks.
//!
//! Everything combinatorial (Kraft measures, partitions, germ classes) is
//! exact; everything analytic (operator norms, matrix exponentials) is double
//! precision with the tolerances collected in [`config`].

#![forbid(unsafe_code)]

pub mod algebra;
pub mod config;
pub mod groupoid;
pub mod pnorm;
pub mod rigidity;
pub mod sft;
pub mod thompson;

pub use groupoid::FiniteGroupoid;
pub use pnorm::{PMatrix, PNormReport};
pub use sft::{CylinderBisection, CylinderPair, Word};
pub use thompson::Table;

/// Builds the global rayon pool once, capped by the `GRPDLAB_THREADS`
/// environment variable when it is set to a positive integer. Called
/// lazily by every parallel entry point; the first configuration wins.
pub fn configure_threads_from_env() {
    static INIT: std::sync::Once = std::sync::Once::new();
    INIT.call_once(|| {
        let threads = std::env::var("GRPDLAB_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&k| k >= 1);
        if let Some(k) = threads {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    });
}
