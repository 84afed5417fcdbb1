//! Generalized cyclotomic classes modulo `p^j` and the characteristic sets
//! built from them.
//!
//! Fix an odd prime `p = e·f + 1` with `f = 2^r`, and a primitive root `g`
//! modulo `p²`. At level `j` there are `d_j = f·p^(j-1)` classes
//!
//! ```text
//! D_i(p^j) = { g^(i + d_j·t) mod p^j : 0 ≤ t < e },   0 ≤ i < d_j,
//! ```
//!
//! each of size `e`, partitioning the units modulo `p^j`. Every nonzero
//! residue `x` modulo `p^n` lies in exactly one scaled class
//! `p^(n-j)·D_i(p^j)`. The set `C_1` keeps, at every level, the `d_j/2`
//! classes with indices `b, b+1, …, b + d_j/2 - 1 (mod d_j)`, plus zero.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::limits::Limits;
use crate::number_theory::{
    checked_prime_power, find_primitive_root, is_primitive_root_mod_p_squared, mul_mod,
    require_odd_prime,
};

/// The parameter tuple `(p, n, e, f = 2^r, b, g)` of one sequence instance.
///
/// Only constructible through validating constructors, so every value in
/// circulation satisfies `e·f = p - 1`, `f = 2^r` with `r ≥ 1`,
/// `0 ≤ b < p^(n-1)·f` and `g` primitive modulo `p²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ParamsRecord", into = "ParamsRecord")]
pub struct CyclotomicParams {
    p: u64,
    n: u32,
    e: u64,
    f: u64,
    r: u32,
    b: u64,
    g: u64,
}

/// Serialized form of [`CyclotomicParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub p: u64,
    pub n: u32,
    pub e: u64,
    pub b: u64,
    pub g: u64,
}

impl TryFrom<ParamsRecord> for CyclotomicParams {
    type Error = Error;

    fn try_from(r: ParamsRecord) -> Result<Self> {
        Self::with_generator(r.p, r.n, r.e, r.b, r.g)
    }
}

impl From<CyclotomicParams> for ParamsRecord {
    fn from(c: CyclotomicParams) -> Self {
        Self {
            p: c.p,
            n: c.n,
            e: c.e,
            b: c.b,
            g: c.g,
        }
    }
}

impl CyclotomicParams {
    /// Parameters with `g` set to the smallest primitive root modulo `p²`.
    pub fn new(p: u64, n: u32, e: u64, b: u64) -> Result<Self> {
        require_odd_prime(p)?;
        Self::with_generator(p, n, e, b, find_primitive_root(p)?)
    }

    pub fn with_generator(p: u64, n: u32, e: u64, b: u64, g: u64) -> Result<Self> {
        require_odd_prime(p)?;
        if n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if e == 0 || (p - 1) % e != 0 {
            return Err(invalid(format!("e = {e} must divide p - 1 = {}", p - 1)));
        }
        let f = (p - 1) / e;
        if f < 2 || !f.is_power_of_two() {
            return Err(invalid(format!(
                "f = (p - 1)/e = {f} must be a power of two 2^r with r >= 1"
            )));
        }
        let d_n = checked_prime_power(p, n - 1)
            .and_then(|q| q.checked_mul(f))
            .filter(|_| checked_prime_power(p, n).is_some())
            .ok_or_else(|| invalid(format!("{p}^{n} overflows a 64-bit modulus")))?;
        if b >= d_n {
            return Err(invalid(format!(
                "b = {b} must lie in [0, p^(n-1) f - 1] = [0, {}]",
                d_n - 1
            )));
        }
        if !is_primitive_root_mod_p_squared(g, p)? {
            return Err(invalid(format!(
                "g = {g} is not a primitive root modulo {p}^2"
            )));
        }
        Ok(Self {
            p,
            n,
            e,
            f,
            r: f.trailing_zeros(),
            b,
            g,
        })
    }

    /// Same instance with a different offset `b`.
    pub fn with_offset(&self, b: u64) -> Result<Self> {
        Self::with_generator(self.p, self.n, self.e, b, self.g)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn e(&self) -> u64 {
        self.e
    }
    pub fn f(&self) -> u64 {
        self.f
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn b(&self) -> u64 {
        self.b
    }
    pub fn g(&self) -> u64 {
        self.g
    }

    /// `p^j`; callers pass `j ≤ n`, which never overflows.
    pub fn modulus(&self, j: u32) -> u64 {
        self.p.pow(j)
    }

    /// The period `N = p^n`.
    pub fn period(&self) -> u64 {
        self.modulus(self.n)
    }

    /// Number of classes at level `j`: `d_j = φ(p^j)/e = f·p^(j-1)`.
    pub fn d(&self, j: u32) -> u64 {
        self.f * self.p.pow(j - 1)
    }

    /// `(p^n + 1)/2`, the size of `C_1`.
    pub fn c1_size(&self) -> u64 {
        self.period() / 2 + 1
    }

    pub fn record(&self) -> ParamsRecord {
        (*self).into()
    }
}

impl std::fmt::Display for CyclotomicParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "p={},n={},e={},b={},g={}",
            self.p, self.n, self.e, self.b, self.g
        )
    }
}

/// One class `D_i(p^j)` as an explicit sorted residue set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclotomicClass {
    pub j: u32,
    pub i: u64,
    pub elements: Vec<u64>,
}

/// Where a residue modulo `p^n` sits in the partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Zero,
    /// `x ∈ p^(n-j)·D_i(p^j)`.
    Class {
        j: u32,
        i: u64,
    },
}

/// `Z_{p^n} = C_0 ∪ C_1`, both sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicSets {
    pub c0: Vec<u64>,
    pub c1: Vec<u64>,
}

/// JSON dump of every class and both characteristic sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDump {
    pub params: ParamsRecord,
    /// Keyed by `"j,i"`.
    pub classes: BTreeMap<String, Vec<u64>>,
    pub c0: Vec<u64>,
    pub c1: Vec<u64>,
}

const NOT_A_UNIT: u32 = u32::MAX;

/// The cyclotomic structure of one parameter set.
///
/// Holds an index table `ind_g x mod φ(p^n)` for every unit `x` modulo
/// `p^n`. Because `d_j` divides `φ(p^j)`, which divides `φ(p^n)`, the class
/// index at any level is a reduction of that one table entry.
#[derive(Debug)]
pub struct Cyclotomy {
    params: CyclotomicParams,
    index: Vec<u32>,
    levels: Vec<OnceLock<Vec<CyclotomicClass>>>,
}

impl Cyclotomy {
    pub fn new(params: CyclotomicParams, limits: &Limits) -> Result<Self> {
        let modulus = params.period();
        if modulus > limits.period_cap {
            return Err(Error::SizeCap {
                what: "period p^n",
                value: modulus,
                cap: limits.period_cap,
            });
        }
        if modulus >= NOT_A_UNIT as u64 {
            return Err(Error::SizeCap {
                what: "period p^n",
                value: modulus,
                cap: NOT_A_UNIT as u64 - 1,
            });
        }
        let phi = modulus / params.p * (params.p - 1);
        let mut index = vec![NOT_A_UNIT; modulus as usize];
        let mut x = 1u64;
        for t in 0..phi {
            index[x as usize] = t as u32;
            x = mul_mod(x, params.g, modulus);
        }
        Ok(Self {
            params,
            index,
            levels: (0..params.n).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn params(&self) -> &CyclotomicParams {
        &self.params
    }

    fn check_level(&self, j: u32) -> Result<()> {
        if j == 0 || j > self.params.n {
            return Err(invalid(format!(
                "level j = {j} must lie in [1, {}]",
                self.params.n
            )));
        }
        Ok(())
    }

    fn level(&self, j: u32) -> &[CyclotomicClass] {
        self.levels[(j - 1) as usize].get_or_init(|| {
            let p = &self.params;
            let m = p.modulus(j);
            let d = p.d(j);
            let mut classes: Vec<CyclotomicClass> = (0..d)
                .map(|i| CyclotomicClass {
                    j,
                    i,
                    elements: Vec::with_capacity(p.e as usize),
                })
                .collect();
            let mut x = 1u64;
            for t in 0..d * p.e {
                classes[(t % d) as usize].elements.push(x);
                x = mul_mod(x, p.g, m);
            }
            for c in &mut classes {
                c.elements.sort_unstable();
            }
            classes
        })
    }

    /// All `d_j` classes at level `j`, indexed by `i`.
    pub fn classes(&self, j: u32) -> Result<&[CyclotomicClass]> {
        self.check_level(j)?;
        Ok(self.level(j))
    }

    /// `D_i(p^j)`, with `i` taken modulo `d_j`.
    pub fn class(&self, j: u32, i: u64) -> Result<&CyclotomicClass> {
        self.check_level(j)?;
        Ok(&self.level(j)[(i % self.params.d(j)) as usize])
    }

    /// Index of a unit `y` modulo `p^j` (`y < p^j`, `p ∤ y`) among the classes at level `j`.
    pub(crate) fn unit_class_index(&self, j: u32, y: u64) -> u64 {
        self.index[y as usize] as u64 % self.params.d(j)
    }

    pub fn classify(&self, x: u64) -> Result<Classification> {
        if x >= self.params.period() {
            return Err(invalid(format!(
                "residue {x} out of range [0, {})",
                self.params.period()
            )));
        }
        Ok(self.classify_unchecked(x))
    }

    fn classify_unchecked(&self, mut x: u64) -> Classification {
        if x == 0 {
            return Classification::Zero;
        }
        let p = self.params.p;
        let mut j = self.params.n;
        while x % p == 0 {
            x /= p;
            j -= 1;
        }
        Classification::Class {
            j,
            i: self.unit_class_index(j, x),
        }
    }

    /// Whether class `i` at level `j` is one of the `d_j/2` classes selected into `C_1`.
    pub fn class_in_c1(&self, j: u32, i: u64) -> bool {
        let d = self.params.d(j);
        (i % d + d - self.params.b % d) % d < d / 2
    }

    /// Membership of `x ∈ [0, p^n)` in `C_1`.
    pub fn in_c1(&self, x: u64) -> bool {
        match self.classify_unchecked(x) {
            Classification::Zero => true,
            Classification::Class { j, i } => self.class_in_c1(j, i),
        }
    }

    pub fn characteristic_sets(&self) -> CharacteristicSets {
        let (c1, c0) = (0..self.params.period()).partition(|&x| self.in_c1(x));
        CharacteristicSets { c0, c1 }
    }

    pub fn dump(&self) -> ClassDump {
        let mut classes = BTreeMap::new();
        for j in 1..=self.params.n {
            for c in self.level(j) {
                classes.insert(format!("{},{}", c.j, c.i), c.elements.clone());
            }
        }
        let sets = self.characteristic_sets();
        ClassDump {
            params: self.params.record(),
            classes,
            c0: sets.c0,
            c1: sets.c1,
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::number_theory::discrete_log;

    fn cyc(p: u64, n: u32, e: u64, b: u64) -> Cyclotomy {
        Cyclotomy::new(
            CyclotomicParams::new(p, n, e, b).unwrap(),
            &Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(CyclotomicParams::new(4, 1, 1, 0).is_err());
        assert!(CyclotomicParams::new(7, 1, 2, 0).is_err()); // f = 3
        assert!(CyclotomicParams::new(7, 1, 6, 0).is_err()); // f = 1
        assert!(CyclotomicParams::new(7, 1, 4, 0).is_err()); // e does not divide 6
        assert!(CyclotomicParams::new(5, 0, 2, 0).is_err());
        assert!(CyclotomicParams::new(5, 2, 2, 10).is_err());
        assert!(CyclotomicParams::new(5, 2, 2, 9).is_ok());
        assert!(CyclotomicParams::with_generator(5, 1, 2, 0, 4).is_err());
        // 7 is primitive mod 5 but 7^4 ≡ 1 (mod 25).
        assert!(CyclotomicParams::with_generator(5, 1, 2, 0, 7).is_err());
        let p = CyclotomicParams::new(17, 2, 1, 0).unwrap();
        assert_eq!((p.f(), p.r(), p.d(2)), (16, 4, 272));
    }

    #[test]
    fn params_serde_round_trip_validates() {
        let p = CyclotomicParams::new(7, 2, 3, 5).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"p":7,"n":2,"e":3,"b":5,"g":3}"#);
        assert_eq!(serde_json::from_str::<CyclotomicParams>(&s).unwrap(), p);
        assert!(
            serde_json::from_str::<CyclotomicParams>(r#"{"p":7,"n":2,"e":3,"b":5,"g":2}"#).is_err()
        );
    }

    #[test]
    fn class_examples() {
        let c = cyc(5, 2, 2, 0);
        assert_eq!(c.class(1, 0).unwrap().elements, vec![1, 4]);
        assert_eq!(c.class(1, 1).unwrap().elements, vec![2, 3]);
        assert_eq!(c.class(2, 0).unwrap().elements, vec![1, 24]);
        // index canonicalized mod d_j
        assert_eq!(c.class(1, 3).unwrap().elements, vec![2, 3]);
        assert!(c.class(0, 0).is_err());
        assert!(c.class(3, 0).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = cyc(5, 2, 2, 0);
        assert_eq!(
            c.classify(10).unwrap(),
            Classification::Class { j: 1, i: 1 }
        );
        assert_eq!(c.classify(0).unwrap(), Classification::Zero);
        assert_eq!(
            c.classify(24).unwrap(),
            Classification::Class { j: 2, i: 0 }
        );
        assert!(c.classify(25).is_err());
    }

    #[test]
    fn classify_agrees_with_discrete_log() {
        for (p, n, e) in [(5, 3, 2), (7, 2, 3), (13, 2, 3), (3, 4, 1)] {
            let c = cyc(p, n, e, 0);
            let g = c.params().g();
            for x in 1..c.params().period() {
                let Classification::Class { j, i } = c.classify(x).unwrap() else {
                    panic!()
                };
                let y = x / p.pow(n - j);
                let expect = discrete_log(g, y, p.pow(j)).unwrap() % c.params().d(j);
                assert_eq!(i, expect);
                assert!(c.class(j, i).unwrap().elements.binary_search(&y).is_ok());
            }
        }
    }

    #[test]
    fn characteristic_set_examples() {
        let s = cyc(5, 1, 2, 0).characteristic_sets();
        assert_eq!(s.c1, vec![0, 1, 4]);
        assert_eq!(s.c0, vec![2, 3]);
        let s = cyc(7, 1, 3, 0).characteristic_sets();
        assert_eq!(s.c1, vec![0, 1, 2, 4]);
        assert_eq!(s.c0, vec![3, 5, 6]);
    }

    #[test]
    fn characteristic_sets_match_union_definition() {
        // Build C_1 literally as the union of scaled classes and compare.
        for (p, n, e) in [(5, 2, 2), (7, 2, 3), (17, 1, 2), (3, 3, 1)] {
            let params = CyclotomicParams::new(p, n, e, 0).unwrap();
            for b in 0..params.d(n) {
                let c = cyc(p, n, e, b);
                let mut union = BTreeSet::from([0u64]);
                for j in 1..=n {
                    let d = params.d(j);
                    for i in 0..d / 2 {
                        for &y in &c.class(j, (i + b) % d).unwrap().elements {
                            union.insert(p.pow(n - j) * y);
                        }
                    }
                }
                let sets = c.characteristic_sets();
                assert_eq!(sets.c1, union.into_iter().collect::<Vec<_>>());
                assert_eq!(sets.c1.len() as u64, params.c1_size());
            }
        }
    }

    #[test]
    fn size_cap() {
        let params = CyclotomicParams::new(5, 3, 2, 0).unwrap();
        let limits = Limits {
            period_cap: 100,
            ..Limits::default()
        };
        assert!(matches!(
            Cyclotomy::new(params, &limits),
            Err(Error::SizeCap { value: 125, .. })
        ));
    }

    #[test]
    fn dump_has_every_class() {
        let d = cyc(5, 2, 2, 0).dump();
        assert_eq!(d.classes.len(), 2 + 10);
        assert_eq!(d.classes["2,0"], vec![1, 24]);
        assert_eq!(d.c1.len() + d.c0.len(), 25);
    }
}
