//! Modular arithmetic on word-sized moduli: primitive roots, multiplicative
//! orders, discrete logarithms, the Wieferich test and the `δ` parity function.
//!
//! Every modulus fits in a `u64`; products are formed in `u128` so no
//! intermediate value is ever truncated.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Group orders at or above this size switch the discrete log from an
/// exhaustive sweep to baby-step/giant-step.
pub const SWEEP_LIMIT: u64 = 1 << 16;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut base = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic Miller-Rabin; the witness set is exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &w in &WITNESSES {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs in
/// increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Euler's totient, with its own factorization (needed for order computations).
fn totient_factored(m: u64) -> (u64, Vec<(u64, u32)>) {
    let mut phi_factors: HashMap<u64, u32> = HashMap::new();
    let mut phi = 1u64;
    for (q, k) in factorize(m) {
        // φ(q^k) = q^(k-1) (q - 1)
        phi *= q.pow(k - 1) * (q - 1);
        if k > 1 {
            *phi_factors.entry(q).or_default() += k - 1;
        }
        for (r, j) in factorize(q - 1) {
            *phi_factors.entry(r).or_default() += j;
        }
    }
    let mut factors: Vec<_> = phi_factors.into_iter().collect();
    factors.sort_unstable();
    (phi, factors)
}

pub fn totient(m: u64) -> u64 {
    totient_factored(m).0
}

/// The least `t ≥ 1` with `a^t ≡ 1 (mod m)`.
///
/// Starts from `φ(m)` and strips prime factors while the power stays at one.
pub fn multiplicative_order(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(invalid(format!("modulus must be at least 2, got {m}")));
    }
    if gcd(a % m, m) != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    let (phi, factors) = totient_factored(m);
    let mut order = phi;
    for (q, k) in factors {
        for _ in 0..k {
            if pow_mod(a, order / q, m) == 1 {
                order /= q;
            } else {
                break;
            }
        }
    }
    Ok(order)
}

pub(crate) fn require_odd_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(invalid(format!("p must be an odd prime, got {p}")));
    }
    Ok(())
}

/// `p^n`, or `None` on `u64` overflow.
pub fn checked_prime_power(p: u64, n: u32) -> Option<u64> {
    p.checked_pow(n)
}

/// The smallest `g ≥ 2` that is a primitive root modulo `p²`, and therefore
/// modulo every `p^j`.
pub fn find_primitive_root(p: u64) -> Result<u64> {
    require_odd_prime(p)?;
    let m = p
        .checked_mul(p)
        .ok_or_else(|| invalid(format!("p = {p} is too large: p^2 overflows")))?;
    let target = p * (p - 1);
    let phi_factors: Vec<u64> = {
        let mut qs: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
        qs.push(p);
        qs.sort_unstable();
        qs.dedup();
        qs
    };
    (2..m)
        .find(|&g| g % p != 0 && phi_factors.iter().all(|&q| pow_mod(g, target / q, m) != 1))
        .ok_or_else(|| invalid(format!("no primitive root modulo {p}^2")))
}

/// Checks that `g` generates the unit group modulo `p²`.
pub fn is_primitive_root_mod_p_squared(g: u64, p: u64) -> Result<bool> {
    require_odd_prime(p)?;
    let m = p * p;
    if gcd(g % m, m) != 1 {
        return Ok(false);
    }
    Ok(multiplicative_order(g, m)? == p * (p - 1))
}

/// `2^(p-1) ≡ 1 (mod p²)`.
pub fn is_wieferich(p: u64) -> Result<bool> {
    require_odd_prime(p)?;
    let m = (p as u128 * p as u128)
        .try_into()
        .map_err(|_| invalid(format!("p = {p} is too large: p^2 overflows")))?;
    Ok(pow_mod(2, p - 1, m) == 1)
}

/// Odd primes `p ≤ limit`, by an odd-only sieve of Eratosthenes.
pub fn odd_primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    // slot i stands for 2i + 3
    let slots = ((limit - 1) / 2) as usize;
    let mut composite = vec![0u64; slots.div_ceil(64)];
    let mut i = 0usize;
    loop {
        let q = 2 * i as u64 + 3;
        if q * q > limit {
            break;
        }
        if composite[i / 64] >> (i % 64) & 1 == 0 {
            let mut k = ((q * q - 3) / 2) as usize;
            while k < slots {
                composite[k / 64] |= 1 << (k % 64);
                k += q as usize;
            }
        }
        i += 1;
    }
    (0..slots)
        .filter(|&i| composite[i / 64] >> (i % 64) & 1 == 0)
        .map(|i| 2 * i as u64 + 3)
        .collect()
}

/// Largest bound accepted by [`wieferich_primes`]; keeps `p²` inside a `u64`.
pub const WIEFERICH_SCAN_MAX: u64 = u32::MAX as u64;

/// Every Wieferich prime `p ≤ limit`.
pub fn wieferich_primes(limit: u64) -> Result<Vec<u64>> {
    if limit > WIEFERICH_SCAN_MAX {
        return Err(invalid(format!(
            "scan limit {limit} exceeds {WIEFERICH_SCAN_MAX}"
        )));
    }
    Ok(odd_primes_up_to(limit)
        .into_iter()
        .filter(|&p| pow_mod(2, p - 1, p * p) == 1)
        .collect())
}

/// The unique `x` in `[0, ord_m(g))` with `g^x ≡ a (mod m)`.
pub fn discrete_log(g: u64, a: u64, m: u64) -> Result<u64> {
    let order = multiplicative_order(g, m)?;
    if gcd(a % m, m) != 1 {
        return Err(Error::NotInvertible { a, m });
    }
    let a = a % m;
    let found = if order < SWEEP_LIMIT {
        sweep_log(g, a, m, order)
    } else {
        bsgs_log(g, a, m, order)
    };
    found.ok_or(Error::NoSolution {
        base: g,
        target: a,
        modulus: m,
    })
}

fn sweep_log(g: u64, a: u64, m: u64, order: u64) -> Option<u64> {
    let mut x = 1 % m;
    for t in 0..order {
        if x == a {
            return Some(t);
        }
        x = mul_mod(x, g, m);
    }
    None
}

fn bsgs_log(g: u64, a: u64, m: u64, order: u64) -> Option<u64> {
    let step = (order as f64).sqrt().ceil() as u64;
    let mut baby = HashMap::with_capacity(step as usize);
    let mut x = 1 % m;
    for j in 0..step {
        baby.entry(x).or_insert(j);
        x = mul_mod(x, g, m);
    }
    // g^(-step) = g^(order - step)
    let giant = pow_mod(g, (order - step % order) % order, m);
    let mut y = a;
    for i in 0..=step {
        if let Some(&j) = baby.get(&y) {
            let x = i * step + j;
            if x < order {
                return Some(x);
            }
        }
        y = mul_mod(y, giant, m);
    }
    None
}

/// `δ(t)`: 1 when `t` is even, 0 when odd.
pub fn delta(t: u64) -> u8 {
    ((t + 1) % 2) as u8
}

/// `δ((p^n + 1) / 2)` computed from `p^n mod 4`, so `p^n` itself never has
/// to be formed.
pub fn delta_half_successor(p: u64, n: u32) -> u8 {
    // (p^n + 1)/2 is even iff p^n ≡ 3 (mod 4)
    u8::from(pow_mod(p % 4, n as u64, 4) == 3)
}

/// Facts about the powers of two modulo `p^j` for one odd prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModTwoProfile {
    pub p: u64,
    /// Least `c ≥ 1` with `2^c ≡ 1 (mod p)`.
    pub c: u64,
    pub wieferich: bool,
    /// `ind_g 2` modulo `p²`.
    pub u: u64,
    /// `orders[j - 1] = ord_{p^j}(2)` for `1 ≤ j ≤ n`.
    pub orders: Vec<u64>,
}

impl ModTwoProfile {
    pub fn new(p: u64, n: u32, g: u64) -> Result<Self> {
        require_odd_prime(p)?;
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        let orders = (1..=n)
            .map(|j| {
                let m = checked_prime_power(p, j)
                    .ok_or_else(|| invalid(format!("{p}^{j} overflows a 64-bit modulus")))?;
                multiplicative_order(2, m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p,
            c: multiplicative_order(2, p)?,
            wieferich: is_wieferich(p)?,
            u: discrete_log(g, 2, p * p)?,
            orders,
        })
    }

    /// Order of 2 modulo `p^j`.
    pub fn order(&self, j: u32) -> Option<u64> {
        self.orders.get((j as usize).checked_sub(1)?).copied()
    }
}
