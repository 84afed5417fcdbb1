use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bm::berlekamp_massey;
use crate::bits::BitVec;
use crate::cyclotomy::{CyclotomicParams, ParamsRecord};
use crate::error::{invalid, Error, Result};
use crate::gf2::{poly_gcd, FieldCtx, Gf2Poly};
use crate::limits::Limits;
use crate::number_theory::{delta_half_successor, discrete_log, is_wieferich};
use crate::sequence::{generating_polynomial, BinarySequence};

/// Periodic linear complexity by Berlekamp–Massey.
///
/// A sequence of period `N` has linear complexity at most `N`, and
/// Berlekamp–Massey pins down any complexity `L` from `2L` terms, so two
/// periods always suffice. One period alone does not: the impulse
/// `1 0 0 … 0` has periodic complexity `N` but its first `N` terms are
/// generated by a length-1 register.
pub fn lc_via_bm(period: &BitVec) -> Result<usize> {
    let n = period.len();
    let doubled = BitVec::from_fn(2 * n, |i| period.get(i % n));
    berlekamp_massey(&doubled)
}

/// `L = N - deg gcd(x^N - 1, S(x))`; an all-zero period gives 0.
pub fn lc_via_gcd(period: &BitVec) -> Result<usize> {
    let n = period.len();
    if n == 0 {
        return Err(invalid("empty period"));
    }
    let xn1 = &Gf2Poly::monomial(n) + &Gf2Poly::one();
    let g = poly_gcd(&xn1, &generating_polynomial(period))?;
    Ok(n - g.degree().expect("gcd of nonzero polynomials is nonzero"))
}

/// How [`lc_via_roots`] walks the `N`-th roots of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootSweep {
    /// Evaluate `S(α_n^i)` at every `i`.
    #[default]
    Full,
    /// Evaluate one representative per orbit `{i·2^t mod N}`; zero-ness is
    /// preserved by squaring, so each orbit is counted in full.
    Orbits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootCount {
    pub lc: usize,
    pub zero_count: usize,
}

/// Powers `α_n^t` for `0 ≤ t < N`, flattened `words_per` words each.
pub(crate) struct RootPowers {
    words_per: usize,
    period: usize,
    data: Vec<u64>,
}

impl RootPowers {
    pub(crate) fn new(ctx: &FieldCtx) -> Self {
        let period = ctx.p().pow(ctx.n()) as usize;
        let words_per = ctx.word_len();
        let mut data = vec![0u64; period * words_per];
        let mut x = ctx.one();
        for t in 0..period {
            let w = x.value().words();
            data[t * words_per..t * words_per + w.len()].copy_from_slice(w);
            x = ctx.mul_unchecked(&x, ctx.alpha_n());
        }
        Self {
            words_per,
            period,
            data,
        }
    }

    #[inline]
    pub(crate) fn get(&self, t: usize) -> &[u64] {
        &self.data[t * self.words_per..(t + 1) * self.words_per]
    }

    pub(crate) fn words_per(&self) -> usize {
        self.words_per
    }

    pub(crate) fn period(&self) -> usize {
        self.period
    }
}

pub(crate) fn check_ctx(ctx: &FieldCtx, params: &CyclotomicParams) -> Result<()> {
    if ctx.p() != params.p() || ctx.n() != params.n() {
        return Err(invalid(format!(
            "field context built for p={}, n={} but parameters have p={}, n={}",
            ctx.p(),
            ctx.n(),
            params.p(),
            params.n()
        )));
    }
    Ok(())
}

/// `L = N - |{i : S(α_n^i) = 0}|` by direct evaluation at every `N`-th root of unity.
pub fn lc_via_roots(period: &BitVec, ctx: &FieldCtx, sweep: RootSweep) -> Result<RootCount> {
    let n = period.len();
    if n as u64 != ctx.p().pow(ctx.n()) {
        return Err(invalid(format!(
            "period {n} does not match the field context's p^n = {}",
            ctx.p().pow(ctx.n())
        )));
    }
    let powers = RootPowers::new(ctx);
    let support: Vec<usize> = period.ones_positions().collect();
    let mut acc = vec![0u64; powers.words_per()];
    let mut is_root = |i: usize| {
        acc.fill(0);
        for &t in &support {
            let e = (i as u64 * t as u64 % n as u64) as usize;
            for (a, &w) in acc.iter_mut().zip(powers.get(e)) {
                *a ^= w;
            }
        }
        acc.iter().all(|&w| w == 0)
    };

    let zero_count = match sweep {
        RootSweep::Full => (0..n).filter(|&i| is_root(i)).count(),
        RootSweep::Orbits => {
            let mut seen = vec![false; n];
            let mut count = 0;
            for i in 0..n {
                if seen[i] {
                    continue;
                }
                let mut orbit = 0;
                let mut x = i;
                while !seen[x] {
                    seen[x] = true;
                    orbit += 1;
                    x = 2 * x % n;
                }
                if is_root(i) {
                    count += orbit;
                }
            }
            count
        }
    };
    Ok(RootCount {
        lc: n - zero_count,
        zero_count,
    })
}

/// Which case of the closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// `2 ∈ D_0(p)`.
    TwoInD0,
    TwoNotInD0,
}

impl Branch {
    pub fn of(params: &CyclotomicParams) -> Self {
        let p = params.p();
        let u = discrete_log(params.g() % p, 2 % p, p).expect("g is primitive modulo p");
        if u % params.f() == 0 {
            Self::TwoInD0
        } else {
            Self::TwoNotInD0
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::TwoInD0 => "2 in D0",
            Self::TwoNotInD0 => "2 not in D0",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2 in D0" => Ok(Self::TwoInD0),
            "2 not in D0" => Ok(Self::TwoNotInD0),
            other => Err(Error::Parse(format!("unknown branch {other:?}"))),
        }
    }
}

impl Serialize for Branch {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Branch {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Predicted {
        lc: u64,
        branch: Branch,
    },
    /// `p` is a Wieferich prime; the closed form is not claimed there.
    NotApplicable {
        branch: Branch,
    },
}

impl Prediction {
    pub fn lc(&self) -> Option<u64> {
        match self {
            Self::Predicted { lc, .. } => Some(*lc),
            Self::NotApplicable { .. } => None,
        }
    }

    pub fn branch(&self) -> Branch {
        match self {
            Self::Predicted { branch, .. } | Self::NotApplicable { branch } => *branch,
        }
    }
}

/// Closed-form linear complexity:
///
/// ```text
/// L = p^n - (p-1)/2 - δ((p^n+1)/2)   if 2 ∈ D_0(p)
/// L = p^n - δ((p^n+1)/2)             otherwise
/// ```
///
/// valid for `f = 2^r`, `r ≥ 1`, and `2^(p-1) ≢ 1 (mod p²)`. Independent of `b`.
pub fn predict_lc(params: &CyclotomicParams) -> Prediction {
    let branch = Branch::of(params);
    if is_wieferich(params.p()).expect("p validated as an odd prime") {
        return Prediction::NotApplicable { branch };
    }
    let delta = delta_half_successor(params.p(), params.n()) as u64;
    let lc = match branch {
        Branch::TwoInD0 => params.period() - (params.p() - 1) / 2 - delta,
        Branch::TwoNotInD0 => params.period() - delta,
    };
    Prediction::Predicted { lc, branch }
}

/// One cell of a report row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Outcome {
    Value(u64),
    /// Requested but beyond a configured cap.
    Skipped,
    /// The closed form does not apply.
    NotApplicable,
    #[default]
    NotRun,
}

impl Outcome {
    pub fn value(&self) -> Option<u64> {
        match self {
            Self::Value(v) => Some(*v),
            _ => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Self::Value(v) => v.to_string(),
            Self::Skipped => "skipped".into(),
            Self::NotApplicable => "n/a".into(),
            Self::NotRun => String::new(),
        }
    }

    fn parse_csv(s: &str) -> Result<Self> {
        match s {
            "" => Ok(Self::NotRun),
            "skipped" => Ok(Self::Skipped),
            "n/a" => Ok(Self::NotApplicable),
            v => v
                .parse()
                .map(Self::Value)
                .map_err(|_| Error::Parse(format!("bad report cell {v:?}"))),
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Value(v) => s.serialize_u64(*v),
            Self::Skipped => s.serialize_str("skipped"),
            Self::NotApplicable => s.serialize_str("n/a"),
            Self::NotRun => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
            Null(()),
        }
        match Option::<Raw>::deserialize(d)? {
            None | Some(Raw::Null(())) => Ok(Self::NotRun),
            Some(Raw::Num(v)) => Ok(Self::Value(v)),
            Some(Raw::Text(t)) => match t.as_str() {
                "skipped" => Ok(Self::Skipped),
                "n/a" => Ok(Self::NotApplicable),
                other => Err(serde::de::Error::custom(format!(
                    "bad report cell {other:?}"
                ))),
            },
        }
    }
}

/// Which measurements [`measure`] runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Methods {
    pub bm: bool,
    pub gcd: bool,
    pub roots: bool,
    pub sweep: RootSweep,
}

impl Methods {
    pub const ALL: Self = Self {
        bm: true,
        gcd: true,
        roots: true,
        sweep: RootSweep::Full,
    };
    pub const NONE: Self = Self {
        bm: false,
        gcd: false,
        roots: false,
        sweep: RootSweep::Full,
    };
}

/// Prediction and measurements for one parameter set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcReport {
    #[serde(flatten)]
    pub params: ParamsRecord,
    pub branch: Branch,
    pub predicted: Outcome,
    pub bm: Outcome,
    pub gcd: Outcome,
    pub roots: Outcome,
    /// `|{i : S(α_n^i) = 0}|`, from the root sweep when it ran, else `N - L`.
    pub zero_count: Outcome,
    /// Every measured value equal, and equal to the prediction when one applies.
    pub agree: bool,
}

impl LcReport {
    pub const CSV_HEADER: &'static str = "p,n,e,b,g,branch,predicted,bm,gcd,roots,zero_count,agree";

    pub fn to_csv_row(&self) -> String {
        let p = &self.params;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.p,
            p.n,
            p.e,
            p.b,
            p.g,
            self.branch,
            self.predicted.csv(),
            self.bm.csv(),
            self.gcd.csv(),
            self.roots.csv(),
            self.zero_count.csv(),
            self.agree
        )
    }

    pub fn from_csv_row(row: &str) -> Result<Self> {
        let cells: Vec<&str> = row.trim_end_matches(['\r', '\n']).split(',').collect();
        let [p, n, e, b, g, branch, predicted, bm, gcd, roots, zero_count, agree] = cells[..]
        else {
            return Err(Error::Parse(format!("expected 12 cells in {row:?}")));
        };
        let num = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}")))
        };
        Ok(Self {
            params: ParamsRecord {
                p: num(p)?,
                n: u32::try_from(num(n)?).map_err(|_| Error::Parse("n out of range".into()))?,
                e: num(e)?,
                b: num(b)?,
                g: num(g)?,
            },
            branch: branch.parse()?,
            predicted: Outcome::parse_csv(predicted)?,
            bm: Outcome::parse_csv(bm)?,
            gcd: Outcome::parse_csv(gcd)?,
            roots: Outcome::parse_csv(roots)?,
            zero_count: Outcome::parse_csv(zero_count)?,
            agree: agree
                .parse()
                .map_err(|_| Error::Parse(format!("bad agree flag {agree:?}")))?,
        })
    }

    /// The measured values that were actually computed.
    pub fn measured(&self) -> impl Iterator<Item = u64> + '_ {
        [self.bm, self.gcd, self.roots]
            .into_iter()
            .filter_map(|o| o.value())
    }
}

/// Runs the requested measurements on the generated sequence.
///
/// A root sweep whose field would exceed `limits.degree_cap` is reported as
/// [`Outcome::Skipped`] rather than failing the whole report.
pub fn measure(params: &CyclotomicParams, methods: Methods, limits: &Limits) -> Result<LcReport> {
    let prediction = predict_lc(params);
    let needs_sequence = methods.bm || methods.gcd || methods.roots;
    let seq = needs_sequence
        .then(|| BinarySequence::generate(*params, limits))
        .transpose()?;
    let bits = seq.as_ref().map(|s| s.bits());

    let bm = match bits {
        Some(bits) if methods.bm => Outcome::Value(lc_via_bm(bits)? as u64),
        _ => Outcome::NotRun,
    };
    let gcd = match bits {
        Some(bits) if methods.gcd => Outcome::Value(lc_via_gcd(bits)? as u64),
        _ => Outcome::NotRun,
    };
    let (roots, root_zeros) = match bits {
        Some(bits) if methods.roots => match FieldCtx::new(params.p(), params.n(), limits) {
            Ok(ctx) => {
                let rc = lc_via_roots(bits, &ctx, methods.sweep)?;
                (Outcome::Value(rc.lc as u64), Some(rc.zero_count as u64))
            }
            Err(Error::SizeCap { .. }) => (Outcome::Skipped, None),
            Err(e) => return Err(e),
        },
        _ => (Outcome::NotRun, None),
    };

    let period = params.period();
    let zero_count = match root_zeros {
        Some(z) => Outcome::Value(z),
        None => gcd
            .value()
            .or(bm.value())
            .map_or(Outcome::NotRun, |l| Outcome::Value(period - l)),
    };

    let predicted = match prediction {
        Prediction::Predicted { lc, .. } => Outcome::Value(lc),
        Prediction::NotApplicable { .. } => Outcome::NotApplicable,
    };
    let mut report = LcReport {
        params: params.record(),
        branch: prediction.branch(),
        predicted,
        bm,
        gcd,
        roots,
        zero_count,
        agree: false,
    };
    let mut values: Vec<u64> = report.measured().collect();
    values.extend(predicted.value().filter(|_| !values.is_empty()));
    report.agree = values.windows(2).all(|w| w[0] == w[1]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomy::Cyclotomy;

    fn params(p: u64, n: u32, e: u64, b: u64) -> CyclotomicParams {
        CyclotomicParams::new(p, n, e, b).unwrap()
    }

    fn bits(s: &str) -> BitVec {
        BitVec::from_ascii(s).unwrap()
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(lc_via_gcd(&bits("11001")).unwrap(), 5);
        assert_eq!(lc_via_gcd(&bits("1110100")).unwrap(), 3);
        assert_eq!(lc_via_gcd(&bits("11111")).unwrap(), 1);
        assert_eq!(lc_via_gcd(&BitVec::zeros(7)).unwrap(), 0);
    }

    #[test]
    fn bm_uses_two_periods() {
        let mut impulse = BitVec::zeros(9);
        impulse.set(0, true);
        assert_eq!(berlekamp_massey(&impulse).unwrap(), 1);
        assert_eq!(lc_via_bm(&impulse).unwrap(), 9);
        assert_eq!(lc_via_gcd(&impulse).unwrap(), 9);
    }

    #[test]
    fn roots_examples() {
        let lim = Limits::default();
        let ctx5 = FieldCtx::new(5, 1, &lim).unwrap();
        let rc = lc_via_roots(&bits("11001"), &ctx5, RootSweep::Full).unwrap();
        assert_eq!((rc.zero_count, rc.lc), (0, 5));
        let ctx7 = FieldCtx::new(7, 1, &lim).unwrap();
        let rc = lc_via_roots(&bits("1110100"), &ctx7, RootSweep::Full).unwrap();
        assert_eq!((rc.zero_count, rc.lc), (4, 3));
        let rc = lc_via_roots(&BitVec::zeros(7), &ctx7, RootSweep::Orbits).unwrap();
        assert_eq!((rc.zero_count, rc.lc), (7, 0));
        assert!(lc_via_roots(&bits("11001"), &ctx7, RootSweep::Full).is_err());
    }

    #[test]
    fn orbit_sweep_matches_full_sweep() {
        let lim = Limits::default();
        for (p, n, e) in [(5, 2, 2), (7, 2, 3), (3, 3, 1), (13, 1, 3)] {
            let ctx = FieldCtx::new(p, n, &lim).unwrap();
            let prm = params(p, n, e, 0);
            for b in 0..prm.d(n) {
                let s = BinarySequence::generate(prm.with_offset(b).unwrap(), &lim).unwrap();
                assert_eq!(
                    lc_via_roots(s.bits(), &ctx, RootSweep::Full).unwrap(),
                    lc_via_roots(s.bits(), &ctx, RootSweep::Orbits).unwrap()
                );
            }
        }
    }

    #[test]
    fn prediction_examples() {
        assert_eq!(
            predict_lc(&params(5, 1, 2, 0)),
            Prediction::Predicted {
                lc: 5,
                branch: Branch::TwoNotInD0
            }
        );
        assert_eq!(
            predict_lc(&params(7, 1, 3, 0)),
            Prediction::Predicted {
                lc: 3,
                branch: Branch::TwoInD0
            }
        );
        assert_eq!(predict_lc(&params(7, 2, 3, 0)).lc(), Some(46));
        assert!(matches!(
            predict_lc(&params(1093, 1, 546, 0)),
            Prediction::NotApplicable { .. }
        ));
        assert!(matches!(
            predict_lc(&params(3511, 1, 1755, 0)),
            Prediction::NotApplicable { .. }
        ));
    }

    #[test]
    fn branch_matches_class_membership() {
        let lim = Limits::default();
        for (p, e) in [
            (3, 1),
            (5, 1),
            (5, 2),
            (7, 3),
            (13, 3),
            (17, 1),
            (17, 2),
            (17, 4),
            (17, 8),
            (41, 5),
            (73, 9),
        ] {
            let prm = params(p, 1, e, 0);
            let cyc = Cyclotomy::new(prm, &lim).unwrap();
            let in_d0 = cyc.class(1, 0).unwrap().elements.contains(&(2 % p));
            assert_eq!(Branch::of(&prm) == Branch::TwoInD0, in_d0, "p={p} e={e}");
        }
    }

    #[test]
    fn report_csv_round_trip() {
        let lim = Limits::default();
        for prm in [params(5, 2, 2, 3), params(7, 2, 3, 0), params(17, 2, 2, 5)] {
            let r = measure(&prm, Methods::ALL, &lim).unwrap();
            let row = r.to_csv_row();
            assert_eq!(LcReport::from_csv_row(&row).unwrap(), r);
            let json = serde_json::to_string(&r).unwrap();
            assert_eq!(serde_json::from_str::<LcReport>(&json).unwrap(), r);
        }
        assert!(LcReport::from_csv_row("1,2,3").is_err());
    }

    #[test]
    fn measure_example_rows() {
        let lim = Limits::default();
        let r = measure(&params(5, 2, 2, 3), Methods::ALL, &lim).unwrap();
        assert_eq!(r.to_csv_row(), "5,2,2,3,2,2 not in D0,25,25,25,25,0,true");
        // k = ord_{17^2}(2) = 136 exceeds the default degree cap.
        let r = measure(&params(17, 2, 2, 0), Methods::ALL, &lim).unwrap();
        assert_eq!(r.roots, Outcome::Skipped);
        assert!(r.agree);
        let r = measure(
            &params(1093, 1, 546, 0),
            Methods {
                roots: false,
                ..Methods::ALL
            },
            &lim,
        )
        .unwrap();
        assert_eq!(r.predicted, Outcome::NotApplicable);
        assert_eq!(r.bm, r.gcd);
        let r = measure(&params(7, 2, 3, 0), Methods::NONE, &lim).unwrap();
        assert_eq!(r.to_csv_row(), "7,2,3,0,3,2 in D0,46,,,,,true");
    }
}
