//! Linear complexity: three measurements, the closed-form predictor, and
//! the identity checks behind it.

mod bm;
mod identities;
mod measure;

pub use bm::{berlekamp_massey, lfsr_synthesis};
pub use identities::{
    shift_parity, verify_identities, verify_identities_for, Evaluator, Identity, IdentityReport,
    IdentityResult, EXHAUSTIVE_PERIOD,
};
pub use measure::{
    lc_via_bm, lc_via_gcd, lc_via_roots, measure, predict_lc, Branch, LcReport, Methods, Outcome,
    Prediction, RootCount, RootSweep,
};
