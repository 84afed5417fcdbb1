use crate::bits::{word_at, words_for, xor_shifted, BitVec};
use crate::error::{invalid, Result};
use crate::gf2::Gf2Poly;

/// Length of the shortest LFSR generating the finite bit vector.
pub fn berlekamp_massey(s: &BitVec) -> Result<usize> {
    Ok(lfsr_synthesis(s)?.0)
}

/// Berlekamp–Massey over GF(2) on packed words.
///
/// Returns the linear complexity `L` and a connection polynomial
/// `C(x) = 1 + c_1 x + … + c_L x^L` with `s_t = Σ c_i s_{t-i}` for `L ≤ t < len`.
///
/// The sequence is scanned through its bit-reversal so that the discrepancy
/// window `s_t, s_{t-1}, …, s_{t-L}` is a contiguous, word-aligned run
/// that pairs directly with the packed coefficients of `C`.
pub fn lfsr_synthesis(s: &BitVec) -> Result<(usize, Gf2Poly)> {
    let len = s.len();
    if len == 0 {
        return Err(invalid("Berlekamp-Massey needs a nonempty sequence"));
    }
    let rev = s.reversed();
    let rw = rev.words();
    let cap = words_for(len + 2) + 1;

    let mut c = vec![0u64; cap];
    let mut b = vec![0u64; cap];
    let mut scratch = vec![0u64; cap];
    c[0] = 1;
    b[0] = 1;
    let mut l = 0usize;
    // degree bound of b, in words
    let mut b_words = 1usize;
    let mut shift = 1usize;

    for t in 0..len {
        let offset = len - 1 - t;
        let c_words = l / 64 + 1;
        let mut acc = 0u64;
        for (w, &cw) in c[..c_words].iter().enumerate() {
            let mut cw = cw;
            if w == c_words - 1 && l % 64 != 63 {
                cw &= (1u64 << (l % 64 + 1)) - 1;
            }
            acc ^= cw & word_at(rw, offset + 64 * w);
        }
        if acc.count_ones() % 2 == 0 {
            shift += 1;
            continue;
        }
        if 2 * l <= t {
            let keep = c_words;
            scratch[..keep].copy_from_slice(&c[..keep]);
            scratch[keep..].fill(0);
            xor_shifted(&mut c, &b[..b_words], shift);
            std::mem::swap(&mut b, &mut scratch);
            b_words = keep;
            l = t + 1 - l;
            shift = 1;
        } else {
            xor_shifted(&mut c, &b[..b_words], shift);
            shift += 1;
        }
    }

    let mut poly = c[..=l / 64].to_vec();
    if l % 64 != 63 {
        *poly.last_mut().unwrap() &= (1u64 << (l % 64 + 1)) - 1;
    }
    Ok((l, Gf2Poly::from_words(poly)))
}
