use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::One;

use super::poly::{poly_gcd, Gf2Poly};
use crate::error::{invalid, Error, Result};
use crate::limits::Limits;
use crate::number_theory::{checked_prime_power, multiplicative_order, require_odd_prime};

static NEXT_CTX_ID: AtomicU64 = AtomicU64::new(1);

/// Rabin-style test: `f` of degree `k` is irreducible iff
/// `gcd(x^(2^i) - x mod f, f) = 1` for every `1 ≤ i ≤ k/2`.
pub fn is_irreducible(f: &Gf2Poly) -> bool {
    let Some(k) = f.degree() else { return false };
    if k == 0 {
        return false;
    }
    let x = Gf2Poly::monomial(1);
    let mut frob = x.rem(f).expect("nonzero modulus");
    for _ in 1..=k / 2 {
        frob = frob.square().rem(f).expect("nonzero modulus");
        if !poly_gcd(&(&frob + &x), f).expect("f nonzero").is_one() {
            return false;
        }
    }
    true
}

/// The monic irreducible of degree `k` with the smallest integer encoding.
pub fn find_irreducible(k: usize) -> Result<Gf2Poly> {
    if k == 0 {
        return Err(invalid("irreducible degree must be at least 1"));
    }
    let top = Gf2Poly::monomial(k);
    (0u64..)
        .map(|low| &top + &Gf2Poly::from_u128(low as u128))
        .find(is_irreducible)
        .ok_or_else(|| invalid(format!("no irreducible of degree {k} found")))
}

/// An element of a specific [`FieldCtx`], stored as a reduced residue.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    ctx: u64,
    value: Gf2Poly,
}

impl FieldElement {
    pub fn value(&self) -> &Gf2Poly {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    /// Whether the element lies in the prime field GF(2).
    pub fn in_prime_field(&self) -> bool {
        self.is_zero() || self.is_one()
    }
}

/// `GF(2^k)` with `k = ord_{p^n}(2)`, plus a fixed primitive `p^n`-th root
/// of unity `α_n` and its powers `α_j = α_n^(p^(n-j))`.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    id: u64,
    p: u64,
    n: u32,
    k: usize,
    modulus: Gf2Poly,
    /// `alpha[j - 1] = α_j`.
    alpha: Vec<FieldElement>,
}

impl FieldCtx {
    /// Builds the smallest field containing the `p^n`-th roots of unity.
    pub fn new(p: u64, n: u32, limits: &Limits) -> Result<Self> {
        require_odd_prime(p)?;
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let pn = checked_prime_power(p, n)
            .ok_or_else(|| invalid(format!("{p}^{n} overflows a 64-bit modulus")))?;
        let k = multiplicative_order(2, pn)?;
        if k > limits.degree_cap {
            return Err(Error::SizeCap {
                what: "extension degree k",
                value: k,
                cap: limits.degree_cap,
            });
        }
        let k = k as usize;
        let mut ctx = Self {
            id: NEXT_CTX_ID.fetch_add(1, Ordering::Relaxed),
            p,
            n,
            k,
            modulus: find_irreducible(k)?,
            alpha: Vec::new(),
        };

        let cofactor = ((BigUint::one() << k) - 1u32) / BigUint::from(pn);
        let below = pn / p;
        let alpha_n = (2u64..)
            .map(|enc| ctx.element(Gf2Poly::from_u128(enc as u128)))
            .filter(|z| !z.is_zero())
            .map(|z| ctx.pow_big_unchecked(&z, &cofactor))
            .find(|w| !ctx.pow_unchecked(w, below).is_one())
            .expect("the multiplicative group is cyclic of order divisible by p^n");

        let mut alpha = vec![alpha_n];
        for _ in 1..n {
            let next = ctx.pow_unchecked(alpha.last().unwrap(), p);
            alpha.push(next);
        }
        alpha.reverse();
        ctx.alpha = alpha;
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Extension degree over GF(2).
    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> &Gf2Poly {
        &self.modulus
    }

    /// `α_j`, a primitive `p^j`-th root of unity, for `1 ≤ j ≤ n`.
    pub fn alpha(&self, j: u32) -> Result<&FieldElement> {
        if j == 0 || j > self.n {
            return Err(invalid(format!(
                "root level j = {j} must lie in [1, {}]",
                self.n
            )));
        }
        Ok(&self.alpha[(j - 1) as usize])
    }

    pub fn alpha_n(&self) -> &FieldElement {
        self.alpha.last().expect("n >= 1")
    }

    /// Wraps a polynomial as an element, reducing it modulo the field modulus.
    pub fn element(&self, value: Gf2Poly) -> FieldElement {
        FieldElement {
            ctx: self.id,
            value: value.rem(&self.modulus).expect("nonzero modulus"),
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(Gf2Poly::zero())
    }

    pub fn one(&self) -> FieldElement {
        self.element(Gf2Poly::one())
    }

    fn check(&self, a: &FieldElement) -> Result<()> {
        if a.ctx != self.id {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add_unchecked(a, b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul_unchecked(a, b))
    }

    pub fn pow(&self, a: &FieldElement, exp: u64) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.pow_unchecked(a, exp))
    }

    /// Power with an exponent that may exceed 64 bits (up to `2^k - 1`).
    pub fn pow_big(&self, a: &FieldElement, exp: &BigUint) -> Result<FieldElement> {
        self.check(a)?;
        Ok(self.pow_big_unchecked(a, exp))
    }

    /// Horner evaluation of a GF(2) polynomial at a field element.
    pub fn eval_poly(&self, f: &Gf2Poly, x: &FieldElement) -> Result<FieldElement> {
        self.check(x)?;
        let mut acc = self.zero();
        let Some(deg) = f.degree() else {
            return Ok(acc);
        };
        for t in (0..=deg).rev() {
            acc = self.mul_unchecked(&acc, x);
            if f.coeff(t) {
                acc.value += &Gf2Poly::one();
            }
        }
        Ok(acc)
    }

    pub(crate) fn add_unchecked(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            ctx: self.id,
            value: &a.value + &b.value,
        }
    }

    pub(crate) fn mul_unchecked(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            ctx: self.id,
            value: a
                .value
                .mul_mod(&b.value, &self.modulus)
                .expect("nonzero modulus"),
        }
    }

    pub(crate) fn square_unchecked(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            ctx: self.id,
            value: a
                .value
                .square()
                .rem(&self.modulus)
                .expect("nonzero modulus"),
        }
    }

    pub(crate) fn pow_unchecked(&self, a: &FieldElement, mut exp: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_unchecked(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.square_unchecked(&base);
            }
        }
        acc
    }

    fn pow_big_unchecked(&self, a: &FieldElement, exp: &BigUint) -> FieldElement {
        let mut acc = self.one();
        for i in (0..exp.bits()).rev() {
            acc = self.square_unchecked(&acc);
            if exp.bit(i) {
                acc = self.mul_unchecked(&acc, a);
            }
        }
        acc
    }

    /// Wraps raw words that are already reduced; internal fast paths only.
    pub(crate) fn element_from_reduced(&self, words: Vec<u64>) -> FieldElement {
        FieldElement {
            ctx: self.id,
            value: Gf2Poly::from_words(words),
        }
    }

    /// Number of 64-bit words in a reduced element.
    pub(crate) fn word_len(&self) -> usize {
        self.k.div_ceil(64)
    }
}

/// Builds the field context for period `p^n`.
pub fn build_field_ctx(p: u64, n: u32, limits: &Limits) -> Result<FieldCtx> {
    FieldCtx::new(p, n, limits)
}
