use std::collections::BTreeSet;

use cyclotomic_lc::{
    BinarySequence, Classification, CyclotomicParams, Cyclotomy, Limits, SequenceFormat,
};
use proptest::prelude::*;

/// Small valid (p, n, e) with p^n modest; f = (p-1)/e is a power of two ≥ 2.
const SMALL: &[(u64, u32, u64)] = &[
    (3, 1, 1),
    (3, 2, 1),
    (3, 4, 1),
    (5, 1, 2),
    (5, 1, 1),
    (5, 2, 2),
    (5, 3, 1),
    (7, 2, 3),
    (11, 2, 5),
    (13, 2, 3),
    (13, 2, 6),
    (17, 2, 1),
    (17, 2, 8),
];

fn powmod_slow(g: u64, k: u64, m: u64) -> u64 {
    (0..k).fold(1 % m, |acc, _| acc * g % m)
}

/// `D_i^(p^j)` straight from its definition.
fn class_by_definition(prm: &CyclotomicParams, j: u32, i: u64) -> BTreeSet<u64> {
    let m = prm.modulus(j);
    let d = prm.d(j);
    (0..prm.e())
        .map(|t| powmod_slow(prm.g(), i + d * t, m))
        .collect()
}

/// `C_1^(p^n)` straight from its definition: the `d_j/2` classes starting at
/// `b`, scaled by `p^(n-j)`, plus zero.
fn c1_by_definition(prm: &CyclotomicParams) -> BTreeSet<u64> {
    let n = prm.n();
    let mut out = BTreeSet::from([0]);
    for j in 1..=n {
        let d = prm.d(j);
        let scale = prm.modulus(n - j);
        for i in 0..d / 2 {
            for y in class_by_definition(prm, j, (i + prm.b()) % d) {
                out.insert(scale * y);
            }
        }
    }
    out
}

fn small_params() -> impl Strategy<Value = CyclotomicParams> {
    (0..SMALL.len(), any::<u64>()).prop_map(|(k, b)| {
        let (p, n, e) = SMALL[k];
        let base = CyclotomicParams::new(p, n, e, 0).unwrap();
        base.with_offset(b % base.d(n)).unwrap()
    })
}

#[test]
fn classes_match_definition_and_partition_units() {
    for &(p, n, e) in SMALL {
        let prm = CyclotomicParams::new(p, n, e, 0).unwrap();
        let cyc = Cyclotomy::new(prm, &Limits::default()).unwrap();
        for j in 1..=n {
            let m = prm.modulus(j);
            let mut seen = BTreeSet::new();
            for class in cyc.classes(j).unwrap() {
                let set: BTreeSet<u64> = class.elements.iter().copied().collect();
                assert_eq!(
                    set,
                    class_by_definition(&prm, j, class.i),
                    "{prm} j={j} i={}",
                    class.i
                );
                assert_eq!(set.len() as u64, e);
                for &x in &set {
                    assert!(seen.insert(x), "{prm}: {x} in two classes");
                }
            }
            let units: BTreeSet<u64> = (1..m).filter(|x| x % p != 0).collect();
            assert_eq!(seen, units, "{prm} level {j}");
        }
    }
}

#[test]
fn scaled_levels_partition_the_ring() {
    for &(p, n, e) in SMALL {
        let prm = CyclotomicParams::new(p, n, e, 0).unwrap();
        let cyc = Cyclotomy::new(prm, &Limits::default()).unwrap();
        let mut hits = vec![0u32; prm.period() as usize];
        hits[0] += 1;
        for j in 1..=n {
            let scale = prm.modulus(n - j);
            for class in cyc.classes(j).unwrap() {
                for &y in &class.elements {
                    hits[(scale * y) as usize] += 1;
                }
            }
        }
        assert!(hits.iter().all(|&h| h == 1), "{prm}");
    }
}

#[test]
fn reduction_is_a_bijection_onto_lower_class() {
    for &(p, n, e) in SMALL {
        let prm = CyclotomicParams::new(p, n, e, 0).unwrap();
        let cyc = Cyclotomy::new(prm, &Limits::default()).unwrap();
        for j in 2..=n {
            for l in 1..j {
                let ml = prm.modulus(l);
                for class in cyc.classes(j).unwrap() {
                    let reduced: BTreeSet<u64> = class.elements.iter().map(|x| x % ml).collect();
                    assert_eq!(reduced.len(), class.elements.len(), "{prm} j={j} l={l}");
                    let target = cyc.class(l, class.i % prm.d(l)).unwrap();
                    let target: BTreeSet<u64> = target.elements.iter().copied().collect();
                    assert_eq!(reduced, target);
                }
            }
        }
    }
}

#[test]
fn multiplying_by_g_shifts_the_index() {
    for &(p, n, e) in SMALL {
        let prm = CyclotomicParams::new(p, n, e, 0).unwrap();
        let cyc = Cyclotomy::new(prm, &Limits::default()).unwrap();
        for j in 1..=n {
            let m = prm.modulus(j);
            let d = prm.d(j);
            for class in cyc.classes(j).unwrap() {
                for k in [1, 2, d - 1] {
                    let gk = powmod_slow(prm.g(), k, m);
                    let moved: BTreeSet<u64> = class.elements.iter().map(|x| x * gk % m).collect();
                    let want: BTreeSet<u64> = cyc
                        .class(j, (class.i + k) % d)
                        .unwrap()
                        .elements
                        .iter()
                        .copied()
                        .collect();
                    assert_eq!(moved, want);
                }
            }
        }
    }
}

#[test]
fn fixture_sequences() {
    let bits = |p, n, e, b| {
        BinarySequence::generate(
            CyclotomicParams::new(p, n, e, b).unwrap(),
            &Limits::default(),
        )
        .unwrap()
        .bits()
        .to_ascii()
    };
    assert_eq!(bits(5, 1, 2, 0), "11001");
    assert_eq!(bits(7, 1, 3, 0), "1110100");
    // b = 1 at p = 5 picks the non-residues {2, 3} instead of {1, 4}
    assert_eq!(bits(5, 1, 2, 1), "10110");
}

#[test]
fn offset_must_lie_below_d_n() {
    let base = CyclotomicParams::new(7, 2, 3, 0).unwrap();
    let d = base.d(2);
    assert_eq!(d, 14);
    assert!(base.with_offset(d - 1).is_ok());
    assert!(base.with_offset(d).is_err());
}

#[test]
fn period_cap_is_enforced() {
    let prm = CyclotomicParams::new(3, 9, 1, 0).unwrap();
    let tight = Limits {
        period_cap: 1000,
        ..Limits::default()
    };
    assert!(matches!(
        Cyclotomy::new(prm, &tight),
        Err(cyclotomic_lc::Error::SizeCap { .. })
    ));
}

#[test]
fn rejects_invalid_parameters() {
    assert!(CyclotomicParams::new(4, 1, 1, 0).is_err());
    assert!(CyclotomicParams::new(2, 1, 1, 0).is_err());
    assert!(
        CyclotomicParams::new(7, 1, 2, 0).is_err(),
        "f = 3 is not a power of two"
    );
    assert!(
        CyclotomicParams::new(5, 1, 4, 0).is_err(),
        "f = 1 is excluded"
    );
    assert!(CyclotomicParams::new(5, 0, 2, 0).is_err());
    assert!(CyclotomicParams::with_generator(5, 1, 2, 0, 4).is_err());
    // 7 is a primitive root mod 5 but not mod 25 (7^4 = 2401 ≡ 1 mod 25)
    assert!(CyclotomicParams::with_generator(5, 2, 2, 0, 7).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn c1_matches_definition(prm in small_params()) {
        let cyc = Cyclotomy::new(prm, &Limits::default()).unwrap();
        let sets = cyc.characteristic_sets();
        let c1: BTreeSet<u64> = sets.c1.iter().copied().collect();
        prop_assert_eq!(&c1, &c1_by_definition(&prm));
        prop_assert_eq!(sets.c1.len() as u64, prm.period().div_ceil(2));
        prop_assert_eq!((sets.c0.len() + sets.c1.len()) as u64, prm.period());
        prop_assert!(sets.c0.iter().all(|x| !c1.contains(x)));
    }

    #[test]
    fn classify_agrees_with_classes(prm in small_params(), x in any::<u64>()) {
        let cyc = Cyclotomy::new(prm, &Limits::default()).unwrap();
        let x = x % prm.period();
        match cyc.classify(x).unwrap() {
            Classification::Zero => prop_assert_eq!(x, 0),
            Classification::Class { j, i } => {
                let scale = prm.modulus(prm.n() - j);
                prop_assert_eq!(x % scale, 0);
                prop_assert!(class_by_definition(&prm, j, i).contains(&(x / scale)));
            }
        }
    }

    #[test]
    fn sequence_is_indicator_of_c1(prm in small_params()) {
        let cyc = Cyclotomy::new(prm, &Limits::default()).unwrap();
        let seq = BinarySequence::from_cyclotomy(&cyc);
        let c1 = c1_by_definition(&prm);
        for i in 0..seq.period() {
            prop_assert_eq!(seq.bits().get(i), c1.contains(&(i as u64)));
        }
        prop_assert!(seq.bits().get(0));
        prop_assert_eq!(seq.weight() as u64, prm.period().div_ceil(2));
    }

    #[test]
    fn formats_round_trip(prm in small_params(), which in 0usize..4) {
        let format = [SequenceFormat::Bits, SequenceFormat::Hex, SequenceFormat::Csv, SequenceFormat::Json][which];
        let seq = BinarySequence::generate(prm, &Limits::default()).unwrap();
        let back = BinarySequence::decode(&seq.encode(format), format).unwrap();
        prop_assert_eq!(back.params(), seq.params());
        prop_assert_eq!(back.bits(), seq.bits());
    }
}
