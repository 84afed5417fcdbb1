use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use crate::bits::{words_for, xor_shifted, BitVec};
use crate::error::{Error, Result};

/// A polynomial over GF(2); bit `t` of the packed words is the coefficient of `x^t`.
///
/// Trailing zero words are always trimmed, so the zero polynomial has no
/// words and equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Gf2Poly {
    words: Vec<u64>,
}

/// Carry-less 64x64 -> 128 multiplication.
#[inline]
fn clmul(a: u64, b: u64) -> (u64, u64) {
    let (mut lo, mut hi) = (0u64, 0u64);
    let mut b = b;
    while b != 0 {
        let i = b.trailing_zeros();
        lo ^= a << i;
        if i != 0 {
            hi ^= a >> (64 - i);
        }
        b &= b - 1;
    }
    (lo, hi)
}

impl Gf2Poly {
    pub fn zero() -> Self {
        Self { words: Vec::new() }
    }

    pub fn one() -> Self {
        Self { words: vec![1] }
    }

    /// `x^d`.
    pub fn monomial(d: usize) -> Self {
        let mut words = vec![0; d / 64 + 1];
        words[d / 64] = 1 << (d % 64);
        Self { words }
    }

    pub fn from_words(mut words: Vec<u64>) -> Self {
        while words.last() == Some(&0) {
            words.pop();
        }
        Self { words }
    }

    /// Integer encoding: bit `t` of `bits` is the coefficient of `x^t`.
    pub fn from_u128(bits: u128) -> Self {
        Self::from_words(vec![bits as u64, (bits >> 64) as u64])
    }

    pub fn from_exponents(exps: &[usize]) -> Self {
        let top = exps.iter().copied().max().map_or(0, |d| d + 1);
        let mut words = vec![0u64; words_for(top)];
        for &t in exps {
            words[t / 64] ^= 1 << (t % 64);
        }
        Self::from_words(words)
    }

    /// Coefficients taken directly from a bit vector.
    pub fn from_bits(bits: &BitVec) -> Self {
        Self::from_words(bits.words().to_vec())
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words == [1]
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, t: usize) -> bool {
        self.words
            .get(t / 64)
            .is_some_and(|w| (w >> (t % 64)) & 1 == 1)
    }

    /// Exponents with nonzero coefficient, ascending.
    pub fn exponents(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (k, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(k * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    /// Value at `x = 1`, i.e. the number of terms mod 2.
    pub fn eval_at_one(&self) -> bool {
        self.words.iter().map(|w| w.count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn shl(&self, shift: usize) -> Self {
        let Some(deg) = self.degree() else {
            return Self::zero();
        };
        let mut words = vec![0u64; words_for(deg + shift + 1)];
        xor_shifted(&mut words, &self.words, shift);
        Self::from_words(words)
    }

    pub fn square(&self) -> Self {
        let mut words = vec![0u64; self.words.len() * 2];
        for (k, &w) in self.words.iter().enumerate() {
            let (lo, hi) = clmul(w, w);
            words[2 * k] = lo;
            words[2 * k + 1] = hi;
        }
        Self::from_words(words)
    }

    /// Quotient and remainder; errors on division by zero.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor
            .degree()
            .ok_or_else(|| Error::InvalidParameter("division by the zero polynomial".into()))?;
        let mut rem = self.words.clone();
        let Some(mut top) = self.degree() else {
            return Ok((Self::zero(), Self::zero()));
        };
        if top < dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![0u64; words_for(top - dd + 1)];
        loop {
            if (rem[top / 64] >> (top % 64)) & 1 == 1 {
                let shift = top - dd;
                quot[shift / 64] ^= 1 << (shift % 64);
                xor_shifted(&mut rem, &divisor.words, shift);
            }
            if top == dd {
                break;
            }
            top -= 1;
        }
        Ok((Self::from_words(quot), Self::from_words(rem)))
    }

    /// Remainder modulo a nonzero polynomial.
    pub fn rem(&self, modulus: &Self) -> Result<Self> {
        let dd = modulus
            .degree()
            .ok_or_else(|| Error::InvalidParameter("reduction by the zero polynomial".into()))?;
        let mut rem = self.words.clone();
        reduce_in_place(&mut rem, &modulus.words, dd);
        Ok(Self::from_words(rem))
    }

    pub fn mul_mod(&self, other: &Self, modulus: &Self) -> Result<Self> {
        (self * other).rem(modulus)
    }

    pub fn pow_mod(&self, mut exp: u64, modulus: &Self) -> Result<Self> {
        let mut base = self.rem(modulus)?;
        let mut acc = Self::one().rem(modulus)?;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_mod(&base, modulus)?;
            }
            base = base.square().rem(modulus)?;
            exp >>= 1;
        }
        Ok(acc)
    }

    /// Coefficient vector of fixed length `len` (truncating higher terms).
    pub fn to_bits(&self, len: usize) -> BitVec {
        BitVec::from_fn(len, |t| self.coeff(t))
    }
}

/// Reduces `rem` in place modulo the polynomial in `modulus` of degree `dd`.
pub(crate) fn reduce_in_place(rem: &mut Vec<u64>, modulus: &[u64], dd: usize) {
    loop {
        while rem.last() == Some(&0) {
            rem.pop();
        }
        let Some(&top_word) = rem.last() else { return };
        let top = (rem.len() - 1) * 64 + 63 - top_word.leading_zeros() as usize;
        if top < dd {
            return;
        }
        xor_shifted(rem, modulus, top - dd);
    }
}

/// Monic gcd over GF(2) by Euclid's algorithm; `gcd(a, 0) = a`.
pub fn poly_gcd(a: &Gf2Poly, b: &Gf2Poly) -> Result<Gf2Poly> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::UndefinedGcd);
    }
    let (mut a, mut b) = (a.words.clone(), b.words.clone());
    while !b.is_empty() {
        let db = Gf2Poly { words: b.clone() }.degree().expect("nonzero");
        reduce_in_place(&mut a, &b, db);
        std::mem::swap(&mut a, &mut b);
    }
    // Over GF(2) every nonzero polynomial is already monic.
    Ok(Gf2Poly::from_words(a))
}

impl Add for &Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: &Gf2Poly) -> Gf2Poly {
        let (long, short) = if self.words.len() >= rhs.words.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut words = long.words.clone();
        for (w, &s) in words.iter_mut().zip(&short.words) {
            *w ^= s;
        }
        Gf2Poly::from_words(words)
    }
}

impl Add for Gf2Poly {
    type Output = Gf2Poly;

    fn add(self, rhs: Gf2Poly) -> Gf2Poly {
        &self + &rhs
    }
}

impl AddAssign<&Gf2Poly> for Gf2Poly {
    fn add_assign(&mut self, rhs: &Gf2Poly) {
        if self.words.len() < rhs.words.len() {
            self.words.resize(rhs.words.len(), 0);
        }
        for (w, &s) in self.words.iter_mut().zip(&rhs.words) {
            *w ^= s;
        }
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl Mul for &Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: &Gf2Poly) -> Gf2Poly {
        if self.is_zero() || rhs.is_zero() {
            return Gf2Poly::zero();
        }
        let mut words = vec![0u64; self.words.len() + rhs.words.len()];
        for (i, &a) in self.words.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in rhs.words.iter().enumerate() {
                let (lo, hi) = clmul(a, b);
                words[i + j] ^= lo;
                words[i + j + 1] ^= hi;
            }
        }
        Gf2Poly::from_words(words)
    }
}

impl Mul for Gf2Poly {
    type Output = Gf2Poly;

    fn mul(self, rhs: Gf2Poly) -> Gf2Poly {
        &self * &rhs
    }
}

impl fmt::Display for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .exponents()
            .into_iter()
            .rev()
            .map(|t| match t {
                0 => "1".to_string(),
                1 => "x".to_string(),
                t => format!("x^{t}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl fmt::Debug for Gf2Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Gf2Poly({self})")
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn p(exps: &[usize]) -> Gf2Poly {
        Gf2Poly::from_exponents(exps)
    }

    /// Bit-by-bit schoolbook product on u128 encodings.
    fn naive_mul(a: u128, b: u64) -> u128 {
        let mut acc = 0u128;
        for i in 0..64 {
            if (b >> i) & 1 == 1 {
                acc ^= a << i;
            }
        }
        acc
    }

    #[test]
    fn gcd_examples() {
        let x5 = p(&[5, 0]);
        assert!(poly_gcd(&x5, &p(&[4, 1, 0])).unwrap().is_one());
        let f = p(&[4, 2, 1, 0]);
        assert_eq!(poly_gcd(&p(&[7, 0]), &f).unwrap(), f);
        assert_eq!(poly_gcd(&f, &f).unwrap(), f);
        assert_eq!(poly_gcd(&f, &Gf2Poly::zero()).unwrap(), f);
        assert_eq!(
            poly_gcd(&Gf2Poly::zero(), &Gf2Poly::zero()),
            Err(Error::UndefinedGcd)
        );
        // x^4 + x^2 + x + 1 = (x + 1)(x^3 + x^2 + 1)
        assert_eq!(&p(&[1, 0]) * &p(&[3, 2, 0]), f);
    }

    #[test]
    fn degree_and_display() {
        assert_eq!(Gf2Poly::zero().degree(), None);
        assert_eq!(Gf2Poly::one().degree(), Some(0));
        assert_eq!(Gf2Poly::monomial(130).degree(), Some(130));
        assert_eq!(p(&[4, 1, 0]).to_string(), "x^4 + x + 1");
        assert_eq!(Gf2Poly::zero().to_string(), "0");
        assert!(p(&[4, 1, 0]).eval_at_one());
        assert!(!p(&[4, 0]).eval_at_one());
    }

    proptest! {
        #[test]
        fn mul_matches_naive(a in any::<u64>(), b in any::<u64>()) {
            let want = Gf2Poly::from_u128(naive_mul(a as u128, b));
            prop_assert_eq!(&Gf2Poly::from_u128(a as u128) * &Gf2Poly::from_u128(b as u128), want);
        }

        #[test]
        fn square_is_self_product(a in proptest::collection::vec(any::<u64>(), 0..4)) {
            let a = Gf2Poly::from_words(a);
            prop_assert_eq!(a.square(), &a * &a);
        }

        #[test]
        fn div_rem_reconstructs(
            a in proptest::collection::vec(any::<u64>(), 0..4),
            b in proptest::collection::vec(any::<u64>(), 1..3),
        ) {
            let a = Gf2Poly::from_words(a);
            let b = Gf2Poly::from_words(b);
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert!(r.degree() < b.degree());
            prop_assert_eq!(&(&q * &b) + &r, a.clone());
            prop_assert_eq!(a.rem(&b).unwrap(), r);
        }

        #[test]
        fn gcd_scales_by_common_factor(a in 1u64.., b in 1u64.., d in 1u32..) {
            let (a, b, d) = (
                Gf2Poly::from_u128(a as u128),
                Gf2Poly::from_u128(b as u128),
                Gf2Poly::from_u128(d as u128),
            );
            let g = poly_gcd(&a, &b).unwrap();
            prop_assert_eq!(poly_gcd(&(&a * &d), &(&b * &d)).unwrap(), &g * &d);
            prop_assert!(a.rem(&g).unwrap().is_zero());
            prop_assert!(b.rem(&g).unwrap().is_zero());
        }
    }
}
