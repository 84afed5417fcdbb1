//! Evaluation of the class sums
//!
//! ```text
//! E_l(p^j)(x) = Σ_{y ∈ D_l(p^j)} x^y
//! H_k(p^j)(x) = Σ_{q < d_j/2} E_{k+q}(p^j)(x)
//! T_k(p^j)(x) = H_k(p^j)(x) + H_k(p^(j-1))(x^p) + … + H_k(p)(x^(p^(j-1)))
//! ```
//!
//! at points of `GF(2^k)`, and checks of the algebraic identities they
//! satisfy at roots of unity. Class subscripts are always reduced modulo
//! `d_j` of the level they are used at. Since `S(x) = T_b(p^n)(x) + 1`,
//! these sums are what decides where `S` vanishes.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::measure::{check_ctx, RootPowers};
use crate::cyclotomy::Cyclotomy;
use crate::error::{invalid, Result};
use crate::gf2::{FieldCtx, FieldElement};
use crate::number_theory::gcd;

/// Source of `x^y` for the point `x` being evaluated.
trait Powers {
    fn power(&self, y: u64) -> &[u64];
}

/// `x^0, …, x^(len-1)` for an arbitrary point.
struct PointPowers {
    words_per: usize,
    data: Vec<u64>,
}

impl PointPowers {
    fn new(ctx: &FieldCtx, x: &FieldElement, len: u64) -> Self {
        let words_per = ctx.word_len();
        let mut data = vec![0u64; len as usize * words_per];
        let mut acc = ctx.one();
        for t in 0..len as usize {
            let w = acc.value().words();
            data[t * words_per..t * words_per + w.len()].copy_from_slice(w);
            acc = ctx.mul_unchecked(&acc, x);
        }
        Self { words_per, data }
    }
}

impl Powers for PointPowers {
    fn power(&self, y: u64) -> &[u64] {
        let y = y as usize;
        &self.data[y * self.words_per..(y + 1) * self.words_per]
    }
}

/// Powers of the point `α_n^h`, read from the shared table of `α_n^t`.
struct RootPoint<'a> {
    table: &'a RootPowers,
    h: u64,
}

impl Powers for RootPoint<'_> {
    fn power(&self, y: u64) -> &[u64] {
        let n = self.table.period() as u64;
        self.table.get((self.h % n * (y % n) % n) as usize)
    }
}

fn xor_into(acc: &mut [u64], w: &[u64]) {
    for (a, &b) in acc.iter_mut().zip(w) {
        *a ^= b;
    }
}

/// Adds `E_l(p^level)` evaluated at `x^scale` into `acc`.
fn add_e(cyc: &Cyclotomy, pw: &dyn Powers, level: u32, l: u64, scale: u64, acc: &mut [u64]) {
    let class = cyc.class(level, l).expect("level validated by caller");
    for &y in &class.elements {
        xor_into(acc, pw.power(scale * y));
    }
}

fn add_h(cyc: &Cyclotomy, pw: &dyn Powers, level: u32, k: u64, scale: u64, acc: &mut [u64]) {
    let d = cyc.params().d(level);
    for q in 0..d / 2 {
        add_e(cyc, pw, level, (k % d + q) % d, scale, acc);
    }
}

fn add_t(cyc: &Cyclotomy, pw: &dyn Powers, j: u32, k: u64, acc: &mut [u64]) {
    let p = cyc.params().p();
    for t in 0..j {
        add_h(cyc, pw, j - t, k, p.pow(t), acc);
    }
}

/// Evaluates the class sums for one `(Cyclotomy, FieldCtx)` pair.
pub struct Evaluator<'a> {
    cyc: &'a Cyclotomy,
    ctx: &'a FieldCtx,
    roots: RootPowers,
}

impl<'a> Evaluator<'a> {
    pub fn new(cyc: &'a Cyclotomy, ctx: &'a FieldCtx) -> Result<Self> {
        check_ctx(ctx, cyc.params())?;
        Ok(Self {
            cyc,
            ctx,
            roots: RootPowers::new(ctx),
        })
    }

    fn check_level(&self, j: u32) -> Result<()> {
        self.cyc.classes(j).map(|_| ())
    }

    fn finish(&self, acc: Vec<u64>) -> FieldElement {
        self.ctx.element_from_reduced(acc)
    }

    fn point_powers(&self, j: u32, x: &FieldElement) -> Result<PointPowers> {
        self.check_level(j)?;
        // surfaces a context mismatch before any arithmetic
        self.ctx.add(x, &self.ctx.zero())?;
        Ok(PointPowers::new(self.ctx, x, self.cyc.params().modulus(j)))
    }

    /// `E_l(p^j)(x)`.
    pub fn eval_e(&self, j: u32, l: u64, x: &FieldElement) -> Result<FieldElement> {
        let pw = self.point_powers(j, x)?;
        let mut acc = vec![0u64; self.ctx.word_len()];
        add_e(self.cyc, &pw, j, l, 1, &mut acc);
        Ok(self.finish(acc))
    }

    /// `H_k(p^j)(x)`.
    pub fn eval_h(&self, j: u32, k: u64, x: &FieldElement) -> Result<FieldElement> {
        let pw = self.point_powers(j, x)?;
        let mut acc = vec![0u64; self.ctx.word_len()];
        add_h(self.cyc, &pw, j, k, 1, &mut acc);
        Ok(self.finish(acc))
    }

    /// `T_k(p^j)(x)`.
    pub fn eval_t(&self, j: u32, k: u64, x: &FieldElement) -> Result<FieldElement> {
        let pw = self.point_powers(j, x)?;
        let mut acc = vec![0u64; self.ctx.word_len()];
        add_t(self.cyc, &pw, j, k, &mut acc);
        Ok(self.finish(acc))
    }

    /// `T_k(p^j)(α_n^h)`, without building a per-point power table.
    pub fn t_at_root(&self, j: u32, k: u64, h: u64) -> Result<FieldElement> {
        self.check_level(j)?;
        let pw = RootPoint {
            table: &self.roots,
            h,
        };
        let mut acc = vec![0u64; self.ctx.word_len()];
        add_t(self.cyc, &pw, j, k, &mut acc);
        Ok(self.finish(acc))
    }

    /// `T_k(p^j)(α_j^a)`; `α_j^a = α_n^(a·p^(n-j))`.
    pub fn t_at_alpha(&self, j: u32, k: u64, a: u64) -> Result<FieldElement> {
        let p = self.cyc.params();
        let h = (a % p.modulus(j)) * p.modulus(p.n() - j);
        self.t_at_root(j, k, h)
    }

    /// `|{a ∈ [1, p-1] : T_k(p)(α_1^a) = 1}|`.
    pub fn level_one_unit_count(&self, k: u64) -> Result<usize> {
        let p = self.cyc.params().p();
        let mut count = 0;
        for a in 1..p {
            if self.t_at_alpha(1, k, a)?.is_one() {
                count += 1;
            }
        }
        Ok(count)
    }
}

/// `(p^l - 1)/2 mod 2`, from `p mod 4`: `p^l ≡ (±1)^l (mod 4)`.
pub fn shift_parity(p: u64, l: u32) -> bool {
    p % 4 == 3 && l % 2 == 1
}

/// The identity families checked by [`verify_identities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// `T_i(p^j)(α_j^a) + T_{i+d_j/2}(p^j)(α_j^a) = 1` for `p ∤ a`.
    Complement,
    /// `T_i(p^j)(α_j^(p^l a)) = T_i(p^(j-l))(α_{j-l}^a) + ((p^l - 1)/2 mod 2)` for `l < j`.
    Shift,
    /// `T_i(p^j)(α_j^(p^l a)) = T_i(p^(j-l))(α_{j-l}^a)` for `l < j`, with no constant.
    ShiftExact,
    /// `T_i(p^m)(α_m^a)^2 = T_{i+u}(p^m)(α_m^a)` with `u = ind_g 2 mod d_m`.
    Frobenius,
    /// `T_k(p^n)(α_n^h) ∉ {0, 1}` whenever `p^(n-1) ∤ h`.
    OutsidePrimeField,
}

impl Identity {
    pub const ALL: [Identity; 5] = [
        Self::Complement,
        Self::Shift,
        Self::ShiftExact,
        Self::Frobenius,
        Self::OutsidePrimeField,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Complement => "complement",
            Self::Shift => "shift",
            Self::ShiftExact => "shift_exact",
            Self::Frobenius => "frobenius",
            Self::OutsidePrimeField => "outside_prime_field",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub identity: Identity,
    pub checked: u64,
    pub failures: u64,
    pub exhaustive: bool,
    /// Human-readable description of the first failing case.
    pub first_failure: Option<String>,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub p: u64,
    pub n: u32,
    pub e: u64,
    pub b: u64,
    pub g: u64,
    pub results: Vec<IdentityResult>,
}

impl IdentityReport {
    pub fn get(&self, identity: Identity) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.identity == identity)
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(IdentityResult::passed)
    }
}

/// Periods up to this size always get an exhaustive prime-field check.
pub const EXHAUSTIVE_PERIOD: u64 = 2500;

/// One case: level `j`, unit `a` (or exponent `h`), depth `l`, class index `i`.
#[derive(Debug, Clone, Copy)]
struct Case {
    j: u32,
    a: u64,
    l: u32,
    i: u64,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "j={} a={} l={} i={}", self.j, self.a, self.l, self.i)
    }
}

struct Tally {
    checked: u64,
    failures: u64,
    first_failure: Option<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checked: 0,
            failures: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, case: Case, ok: Result<bool>) -> Result<()> {
        self.checked += 1;
        if !ok? {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(case.to_string());
            }
        }
        Ok(())
    }
}

/// Checks every identity family; a family runs exhaustively when its case
/// count fits in `sample_budget`, otherwise on `sample_budget` cases drawn
/// from a fixed-seed generator.
pub fn verify_identities(ev: &Evaluator<'_>, sample_budget: u64) -> Result<IdentityReport> {
    let prm = *ev.cyc.params();
    let (p, n) = (prm.p(), prm.n());
    let one = ev.ctx.one();

    let units = |j: u32| prm.modulus(j) / p * (p - 1);
    // (j, a, i) over every level: Σ_j φ(p^j)·d_j
    let unit_cases: u64 = (1..=n).map(|j| units(j) * prm.d(j)).sum();
    let shift_cases: u64 = (1..=n).map(|j| units(j) * prm.d(j) * j as u64).sum();
    let big = prm.period();
    let top_cases = if n == 1 {
        0
    } else {
        (big - big / prm.modulus(n - 1)) * prm.d(n)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut results = Vec::new();

    let complement = |c: Case| -> Result<bool> {
        let d = prm.d(c.j);
        let s = ev.ctx.add(
            &ev.t_at_alpha(c.j, c.i, c.a)?,
            &ev.t_at_alpha(c.j, c.i + d / 2, c.a)?,
        )?;
        Ok(s.is_one())
    };
    let shift = |c: Case, parity: bool| -> Result<bool> {
        let lhs = ev.t_at_alpha(c.j, c.i, p.pow(c.l) * c.a)?;
        let mut rhs = ev.t_at_alpha(c.j - c.l, c.i, c.a)?;
        if parity && shift_parity(p, c.l) {
            rhs = ev.ctx.add(&rhs, &one)?;
        }
        Ok(lhs == rhs)
    };
    let frobenius = |c: Case| -> Result<bool> {
        let m = prm.modulus(c.j);
        let u = ev.cyc.unit_class_index(c.j, 2 % m);
        let lhs = ev.ctx.pow(&ev.t_at_alpha(c.j, c.i, c.a)?, 2)?;
        Ok(lhs == ev.t_at_alpha(c.j, c.i + u, c.a)?)
    };
    let outside = |c: Case| -> Result<bool> { Ok(!ev.t_at_root(n, c.i, c.a)?.in_prime_field()) };

    let mut run = |identity: Identity,
                   count: u64,
                   force_exhaustive: bool,
                   cases: &mut dyn Iterator<Item = Case>,
                   draw: &mut dyn FnMut(&mut ChaCha8Rng) -> Case,
                   check: &dyn Fn(Case) -> Result<bool>|
     -> Result<()> {
        let exhaustive = force_exhaustive || count <= sample_budget;
        let mut tally = Tally::new();
        if exhaustive {
            for c in cases {
                tally.record(c, check(c))?;
            }
        } else {
            for _ in 0..sample_budget {
                let c = draw(&mut rng);
                tally.record(c, check(c))?;
            }
        }
        results.push(IdentityResult {
            identity,
            checked: tally.checked,
            failures: tally.failures,
            exhaustive,
            first_failure: tally.first_failure,
        });
        Ok(())
    };

    let all_units = move |j: u32| (1..prm.modulus(j)).filter(move |a| a % p != 0);
    let unit_iter = || {
        (1..=n).flat_map(move |j| {
            all_units(j).flat_map(move |a| (0..prm.d(j)).map(move |i| Case { j, a, l: 0, i }))
        })
    };
    let shift_iter = || {
        (1..=n).flat_map(move |j| {
            all_units(j).flat_map(move |a| {
                (0..j).flat_map(move |l| (0..prm.d(j)).map(move |i| Case { j, a, l, i }))
            })
        })
    };
    let random_unit = move |rng: &mut ChaCha8Rng, j: u32| loop {
        let a = rng.gen_range(1..prm.modulus(j));
        if gcd(a, p) == 1 {
            return a;
        }
    };
    let mut draw_unit = |rng: &mut ChaCha8Rng| {
        let j = rng.gen_range(1..=n);
        let a = random_unit(rng, j);
        Case {
            j,
            a,
            l: 0,
            i: rng.gen_range(0..prm.d(j)),
        }
    };
    let mut draw_shift = |rng: &mut ChaCha8Rng| {
        let j = rng.gen_range(1..=n);
        let a = random_unit(rng, j);
        let l = rng.gen_range(0..j);
        Case {
            j,
            a,
            l,
            i: rng.gen_range(0..prm.d(j)),
        }
    };
    let below = prm.modulus(n - 1);
    let top_iter = move || {
        (0..big).filter(move |h| h % below != 0).flat_map(move |h| {
            (0..prm.d(n)).map(move |i| Case {
                j: n,
                a: h,
                l: 0,
                i,
            })
        })
    };
    let mut draw_top = |rng: &mut ChaCha8Rng| loop {
        let h = rng.gen_range(0..big);
        if h % below != 0 {
            return Case {
                j: n,
                a: h,
                l: 0,
                i: rng.gen_range(0..prm.d(n)),
            };
        }
    };

    run(
        Identity::Complement,
        unit_cases,
        false,
        &mut unit_iter(),
        &mut draw_unit,
        &complement,
    )?;
    run(
        Identity::Shift,
        shift_cases,
        false,
        &mut shift_iter(),
        &mut draw_shift,
        &|c| shift(c, true),
    )?;
    run(
        Identity::ShiftExact,
        shift_cases,
        false,
        &mut shift_iter(),
        &mut draw_shift,
        &|c| shift(c, false),
    )?;
    run(
        Identity::Frobenius,
        unit_cases,
        false,
        &mut unit_iter(),
        &mut draw_unit,
        &frobenius,
    )?;
    run(
        Identity::OutsidePrimeField,
        top_cases,
        big <= EXHAUSTIVE_PERIOD,
        &mut top_iter(),
        &mut draw_top,
        &outside,
    )?;

    Ok(IdentityReport {
        p,
        n,
        e: prm.e(),
        b: prm.b(),
        g: prm.g(),
        results,
    })
}

/// Convenience wrapper: builds the evaluator and checks everything.
pub fn verify_identities_for(
    cyc: &Cyclotomy,
    ctx: &FieldCtx,
    sample_budget: u64,
) -> Result<IdentityReport> {
    if sample_budget == 0 {
        return Err(invalid("sample budget must be positive"));
    }
    verify_identities(&Evaluator::new(cyc, ctx)?, sample_budget)
}
