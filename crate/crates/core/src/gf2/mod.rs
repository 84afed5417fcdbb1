//! Arithmetic in GF(2)[x] and in binary extension fields GF(2^k).

mod field;
mod poly;

pub use field::{build_field_ctx, find_irreducible, is_irreducible, FieldCtx, FieldElement};
pub use poly::{poly_gcd, Gf2Poly};
