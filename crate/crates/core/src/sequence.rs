//! One period of the binary sequence `s_i = [i mod p^n ∈ C_1]` and its
//! generating polynomial `S(x) = s_0 + s_1 x + … + s_{N-1} x^(N-1)`.

use std::fmt::Write as _;
use std::io;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitVec;
use crate::cyclotomy::{CyclotomicParams, Cyclotomy, ParamsRecord};
use crate::error::{Error, Result};
use crate::gf2::Gf2Poly;
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySequence {
    params: CyclotomicParams,
    bits: BitVec,
}

/// On-disk encodings of one period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceFormat {
    /// ASCII `0`/`1`.
    Bits,
    /// Hex of little-endian bytes; byte `k` bit `m` is `s_{8k+m}`.
    Hex,
    /// `index,value` rows.
    Csv,
    Json,
}

impl FromStr for SequenceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bits" => Ok(Self::Bits),
            "hex" => Ok(Self::Hex),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Parse(format!("unknown sequence format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceJson {
    params: ParamsRecord,
    period: u64,
    weight: u64,
    bits: String,
}

impl BinarySequence {
    pub fn generate(params: CyclotomicParams, limits: &Limits) -> Result<Self> {
        Ok(Self::from_cyclotomy(&Cyclotomy::new(params, limits)?))
    }

    /// Streams the `C_1` membership predicate over one period.
    pub fn from_cyclotomy(cyc: &Cyclotomy) -> Self {
        let n = cyc.params().period() as usize;
        Self {
            params: *cyc.params(),
            bits: BitVec::from_fn(n, |i| cyc.in_c1(i as u64)),
        }
    }

    pub fn params(&self) -> &CyclotomicParams {
        &self.params
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn period(&self) -> usize {
        self.bits.len()
    }

    pub fn weight(&self) -> usize {
        self.bits.weight()
    }

    pub fn generating_polynomial(&self) -> Gf2Poly {
        generating_polynomial(&self.bits)
    }

    fn header(&self) -> String {
        format!("# {}", self.params)
    }

    pub fn encode(&self, format: SequenceFormat) -> String {
        let mut out = String::new();
        match format {
            SequenceFormat::Bits => {
                let _ = writeln!(out, "{}", self.header());
                let _ = writeln!(out, "{}", self.bits.to_ascii());
            }
            SequenceFormat::Hex => {
                let _ = writeln!(out, "{}", self.header());
                for byte in self.bits.to_bytes() {
                    let _ = write!(out, "{byte:02x}");
                }
                out.push('\n');
            }
            SequenceFormat::Csv => {
                let _ = writeln!(out, "{}", self.header());
                out.push_str("index,value\n");
                for (i, b) in self.bits.iter().enumerate() {
                    let _ = writeln!(out, "{i},{}", u8::from(b));
                }
            }
            SequenceFormat::Json => {
                let doc = SequenceJson {
                    params: self.params.record(),
                    period: self.period() as u64,
                    weight: self.weight() as u64,
                    bits: self.bits.to_ascii(),
                };
                out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
                out.push('\n');
            }
        }
        out
    }

    pub fn write_to(&self, w: &mut impl io::Write, format: SequenceFormat) -> io::Result<()> {
        w.write_all(self.encode(format).as_bytes())
    }

    /// Parses any of the [`SequenceFormat`] encodings back into a sequence.
    ///
    /// The parameters are validated and the period length checked, but the
    /// bits are taken as given.
    pub fn decode(text: &str, format: SequenceFormat) -> Result<Self> {
        if format == SequenceFormat::Json {
            let doc: SequenceJson =
                serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            let params = CyclotomicParams::try_from(doc.params)?;
            return Self::checked(params, BitVec::from_ascii(&doc.bits)?);
        }
        let mut lines = text.lines();
        let params = parse_header(lines.next().unwrap_or_default())?;
        let len = params.period() as usize;
        let bits = match format {
            SequenceFormat::Bits => BitVec::from_ascii(&lines.collect::<String>())?,
            SequenceFormat::Hex => {
                let hex: String = lines
                    .flat_map(|l| l.chars())
                    .filter(|c| !c.is_whitespace())
                    .collect();
                if hex.len() % 2 != 0 {
                    return Err(Error::Parse("odd number of hex digits".into()));
                }
                let bytes = (0..hex.len())
                    .step_by(2)
                    .map(|i| {
                        u8::from_str_radix(&hex[i..i + 2], 16)
                            .map_err(|e| Error::Parse(format!("bad hex byte: {e}")))
                    })
                    .collect::<Result<Vec<u8>>>()?;
                BitVec::from_bytes(&bytes, len)?
            }
            SequenceFormat::Csv => {
                if lines.next().map(str::trim) != Some("index,value") {
                    return Err(Error::Parse("missing `index,value` header".into()));
                }
                let mut bits = BitVec::zeros(len);
                let mut count = 0;
                for line in lines.filter(|l| !l.trim().is_empty()) {
                    let (i, v) = line
                        .split_once(',')
                        .ok_or_else(|| Error::Parse(format!("bad csv row {line:?}")))?;
                    let i: usize = i
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad index in {line:?}")))?;
                    if i != count || i >= len {
                        return Err(Error::Parse(format!("row {line:?} out of sequence")));
                    }
                    match v.trim() {
                        "0" => {}
                        "1" => bits.set(i, true),
                        _ => return Err(Error::Parse(format!("bad value in {line:?}"))),
                    }
                    count += 1;
                }
                if count != len {
                    return Err(Error::Parse(format!("expected {len} rows, found {count}")));
                }
                bits
            }
            SequenceFormat::Json => unreachable!(),
        };
        Self::checked(params, bits)
    }

    fn checked(params: CyclotomicParams, bits: BitVec) -> Result<Self> {
        if bits.len() as u64 != params.period() {
            return Err(Error::Parse(format!(
                "expected {} bits for {params}, found {}",
                params.period(),
                bits.len()
            )));
        }
        Ok(Self { params, bits })
    }
}

fn parse_header(line: &str) -> Result<CyclotomicParams> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("missing `# p=..,n=..,e=..,b=..,g=..` header".into()))?;
    let mut fields = [None::<u64>; 5];
    for kv in body.trim().split(',') {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header field {kv:?}")))?;
        let slot = match k.trim() {
            "p" => 0,
            "n" => 1,
            "e" => 2,
            "b" => 3,
            "g" => 4,
            other => return Err(Error::Parse(format!("unknown header key {other:?}"))),
        };
        fields[slot] = Some(
            v.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad header value {kv:?}")))?,
        );
    }
    let [Some(p), Some(n), Some(e), Some(b), Some(g)] = fields else {
        return Err(Error::Parse("header must record p, n, e, b and g".into()));
    };
    let n = u32::try_from(n).map_err(|_| Error::Parse("n out of range".into()))?;
    CyclotomicParams::with_generator(p, n, e, b, g)
}

/// `S(x)` for an arbitrary bit vector: coefficient `t` is bit `t`.
pub fn generating_polynomial(bits: &BitVec) -> Gf2Poly {
    Gf2Poly::from_bits(bits)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn seq(p: u64, n: u32, e: u64, b: u64) -> BinarySequence {
        BinarySequence::generate(
            CyclotomicParams::new(p, n, e, b).unwrap(),
            &Limits::default(),
        )
        .unwrap()
    }

    #[test]
    fn generate_examples() {
        assert_eq!(seq(5, 1, 2, 0).bits().to_ascii(), "11001");
        assert_eq!(seq(7, 1, 3, 0).bits().to_ascii(), "1110100");
    }

    #[test]
    fn balance_and_leading_one() {
        for (p, n, e) in [
            (3, 5, 1),
            (5, 3, 2),
            (7, 2, 3),
            (13, 2, 3),
            (17, 2, 4),
            (29, 1, 7),
        ] {
            let params = CyclotomicParams::new(p, n, e, 0).unwrap();
            for b in [0, 1, params.d(n) / 2, params.d(n) - 1] {
                let s = seq(p, n, e, b);
                assert_eq!(s.weight() as u64, params.c1_size());
                assert!(s.bits().get(0));
                assert_eq!(
                    s.generating_polynomial().eval_at_one(),
                    params.c1_size() % 2 == 1
                );
            }
        }
    }

    #[test]
    fn polynomial_examples() {
        let s = BitVec::from_ascii("11001").unwrap();
        assert_eq!(generating_polynomial(&s).to_string(), "x^4 + x + 1");
        assert!(generating_polynomial(&BitVec::zeros(5)).is_zero());
        let s = BitVec::from_ascii("1110100").unwrap();
        assert_eq!(generating_polynomial(&s).to_string(), "x^4 + x^2 + x + 1");
    }

    #[test]
    fn period_cap() {
        let params = CyclotomicParams::new(3, 7, 1, 0).unwrap();
        let limits = Limits {
            period_cap: 1000,
            ..Limits::default()
        };
        assert!(matches!(
            BinarySequence::generate(params, &limits),
            Err(Error::SizeCap { value: 2187, .. })
        ));
    }

    #[test]
    fn encodings() {
        let s = seq(5, 1, 2, 0);
        assert_eq!(
            s.encode(SequenceFormat::Bits),
            "# p=5,n=1,e=2,b=0,g=2\n11001\n"
        );
        assert_eq!(s.encode(SequenceFormat::Hex), "# p=5,n=1,e=2,b=0,g=2\n13\n");
        assert_eq!(
            s.encode(SequenceFormat::Csv),
            "# p=5,n=1,e=2,b=0,g=2\nindex,value\n0,1\n1,1\n2,0\n3,0\n4,1\n"
        );
        assert!(BinarySequence::decode("11001\n", SequenceFormat::Bits).is_err());
        assert!(
            BinarySequence::decode("# p=5,n=1,e=2,b=0,g=2\n1100\n", SequenceFormat::Bits).is_err()
        );
        assert!(
            BinarySequence::decode("# p=5,n=1,e=2,b=0,g=4\n11001\n", SequenceFormat::Bits).is_err()
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn encode_decode_round_trip(
            (p, e) in prop::sample::select(vec![(5u64, 2u64), (7, 3), (13, 3), (17, 4), (3, 1)]),
            n in 1u32..3,
            b_seed in any::<u64>(),
            fmt in prop::sample::select(vec![
                SequenceFormat::Bits, SequenceFormat::Hex, SequenceFormat::Csv, SequenceFormat::Json,
            ]),
        ) {
            let params = CyclotomicParams::new(p, n, e, 0).unwrap();
            let s = seq(p, n, e, b_seed % params.d(n));
            prop_assert_eq!(BinarySequence::decode(&s.encode(fmt), fmt).unwrap(), s);
        }
    }
}
