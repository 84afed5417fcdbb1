//! Generalized cyclotomic binary sequences of period `p^n` and their linear
//! complexity over GF(2).
//!
//! The crate builds the sequences from the cyclotomic classes modulo `p^j`,
//! measures their linear complexity three independent ways
//! (Berlekamp–Massey, `gcd(x^N - 1, S(x))`, and counting roots of `S` among
//! the `N`-th roots of unity in `GF(2^k)`), and compares the result with the
//! closed form
//!
//! ```text
//! L = p^n - (p-1)/2 - δ((p^n+1)/2)   if 2 ∈ D_0(p)
//! L = p^n - δ((p^n+1)/2)             otherwise
//! ```
//!
//! ```
//! use cyclotomic_lc::{lc, CyclotomicParams, Limits};
//!
//! let params = CyclotomicParams::new(7, 2, 3, 0)?;
//! let report = lc::measure(&params, lc::Methods::ALL, &Limits::default())?;
//! assert_eq!(report.bm.value(), Some(46));
//! assert!(report.agree);
//! # Ok::<(), cyclotomic_lc::Error>(())
//! ```
//!
//! See the guide under `book/` for a walk through the construction.

pub mod bits;
pub mod cyclotomy;
mod error;
pub mod gf2;
pub mod lc;
mod limits;
pub mod number_theory;
pub mod sequence;

pub use bits::BitVec;
pub use cyclotomy::{
    CharacteristicSets, Classification, CyclotomicClass, CyclotomicParams, Cyclotomy,
};
pub use error::{Error, Result};
pub use gf2::{FieldCtx, FieldElement, Gf2Poly};
pub use lc::{LcReport, Prediction};
pub use limits::Limits;
pub use sequence::{BinarySequence, SequenceFormat};

// Compiles and runs every Rust snippet in the guide as a doctest.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/cyclotomy.md")]
    mod cyclotomy {}
    #[doc = include_str!("../../../book/src/sequences.md")]
    mod sequences {}
    #[doc = include_str!("../../../book/src/linear-complexity.md")]
    mod linear_complexity {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/identities.md")]
    mod identities {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
