//! Sliding-window match compressor (LZSS, no entropy stage).
//!
//! Stream layout: a 4-byte little-endian raw length, then groups of up to
//! eight tokens each preceded by a flag byte (bit `k` set = token `k` is a
//! match). A literal is one byte; a match is a 2-byte little-endian
//! `offset - 1` followed by one byte `length - MIN_MATCH`.

pub const WINDOW: usize = 32 * 1024;
pub const MIN_MATCH: usize = 3;
pub const MAX_MATCH: usize = 258;
pub const HEADER_LEN: usize = 4;

const HASH_BITS: u32 = 15;
const MAX_CHAIN: usize = 256;
const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Literal(u8),
    Match { offset: u16, len: u16 },
}

fn hash3(b: &[u8]) -> usize {
    let v = (b[0] as u32) << 16 | (b[1] as u32) << 8 | b[2] as u32;
    (v.wrapping_mul(0x9E37_79B1) >> (32 - HASH_BITS)) as usize
}

fn tokenize(data: &[u8]) -> Vec<Token> {
    let n = data.len();
    let mut head = vec![NIL; 1 << HASH_BITS];
    let mut prev = vec![NIL; n];
    let mut tokens = Vec::new();
    let insert = |pos: usize, head: &mut [u32], prev: &mut [u32]| {
        if pos + MIN_MATCH <= n {
            let h = hash3(&data[pos..]);
            prev[pos] = head[h];
            head[h] = pos as u32;
        }
    };

    let mut i = 0;
    while i < n {
        let mut best_len = 0;
        let mut best_off = 0;
        if i + MIN_MATCH <= n {
            let limit = (n - i).min(MAX_MATCH);
            let mut cand = head[hash3(&data[i..])];
            let mut chain = 0;
            while cand != NIL && chain < MAX_CHAIN {
                let c = cand as usize;
                if i - c > WINDOW {
                    break;
                }
                let len = data[c..]
                    .iter()
                    .zip(&data[i..i + limit])
                    .take_while(|(a, b)| a == b)
                    .count();
                if len > best_len {
                    best_len = len;
                    best_off = i - c;
                    if len == limit {
                        break;
                    }
                }
                cand = prev[c];
                chain += 1;
            }
        }
        if best_len >= MIN_MATCH {
            tokens.push(Token::Match {
                offset: best_off as u16,
                len: best_len as u16,
            });
            for p in i..i + best_len {
                insert(p, &mut head, &mut prev);
            }
            i += best_len;
        } else {
            tokens.push(Token::Literal(data[i]));
            insert(i, &mut head, &mut prev);
            i += 1;
        }
    }
    tokens
}

pub fn compress(data: &[u8]) -> Vec<u8> {
    assert!(data.len() <= u32::MAX as usize, "payload too large for the header");
    let mut out = Vec::with_capacity(HEADER_LEN + data.len() + data.len() / 8 + 1);
    out.extend_from_slice(&(data.len() as u32).to_le_bytes());
    for group in tokenize(data).chunks(8) {
        let flag_at = out.len();
        out.push(0);
        for (k, t) in group.iter().enumerate() {
            match *t {
                Token::Literal(b) => out.push(b),
                Token::Match { offset, len } => {
                    out[flag_at] |= 1 << k;
                    out.extend_from_slice(&(offset - 1).to_le_bytes());
                    out.push((len as usize - MIN_MATCH) as u8);
                }
            }
        }
    }
    out
}

/// Length of [`compress`]'s output without materializing it.
pub fn compressed_len(data: &[u8]) -> u64 {
    let tokens = tokenize(data);
    let body: usize = tokens
        .iter()
        .map(|t| match t {
            Token::Literal(_) => 1,
            Token::Match { .. } => 3,
        })
        .sum();
    (HEADER_LEN + tokens.len().div_ceil(8) + body) as u64
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("stream shorter than its header")]
    Truncated,
    #[error("match at output position {pos} reaches back {offset} bytes")]
    BadOffset { pos: usize, offset: usize },
    #[error("decoded {got} bytes, header says {want}")]
    LengthMismatch { got: usize, want: usize },
}

pub fn decompress(stream: &[u8]) -> Result<Vec<u8>, DecodeError> {
    let header: [u8; 4] = stream
        .get(..HEADER_LEN)
        .ok_or(DecodeError::Truncated)?
        .try_into()
        .expect("slice of length 4");
    let want = u32::from_le_bytes(header) as usize;
    let mut out = Vec::with_capacity(want);
    let mut p = HEADER_LEN;
    while out.len() < want {
        let flags = *stream.get(p).ok_or(DecodeError::Truncated)?;
        p += 1;
        for k in 0..8 {
            if out.len() >= want {
                break;
            }
            if flags >> k & 1 == 0 {
                out.push(*stream.get(p).ok_or(DecodeError::Truncated)?);
                p += 1;
            } else {
                let b = stream.get(p..p + 3).ok_or(DecodeError::Truncated)?;
                p += 3;
                let offset = u16::from_le_bytes([b[0], b[1]]) as usize + 1;
                let len = b[2] as usize + MIN_MATCH;
                if offset > out.len() {
                    return Err(DecodeError::BadOffset {
                        pos: out.len(),
                        offset,
                    });
                }
                let start = out.len() - offset;
                for j in 0..len {
                    out.push(out[start + j]);
                }
            }
        }
    }
    if out.len() != want || p != stream.len() {
        return Err(DecodeError::LengthMismatch {
            got: out.len(),
            want,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bytes(seed: u64, n: usize) -> Vec<u8> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.gen()).collect()
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(compress(&[]), vec![0, 0, 0, 0]);
        assert_eq!(compressed_len(&[]), HEADER_LEN as u64);
        assert_eq!(decompress(&[0, 0, 0, 0]).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn repeated_byte_shrinks() {
        let data = vec![b'a'; 1000];
        let len = compressed_len(&data);
        // 1 literal + 4 matches: header 4, flags 1, body 1 + 12
        assert_eq!(len, 18);
        assert!(len * 20 <= 1000);
    }

    #[test]
    fn random_does_not_shrink() {
        let data = random_bytes(7, 1000);
        assert!(compressed_len(&data) * 100 >= 95 * 1000);
    }

    #[test]
    fn len_matches_stream() {
        for seed in 0..20 {
            let mut data = random_bytes(seed, 300);
            data.extend_from_within(10..200);
            assert_eq!(compressed_len(&data), compress(&data).len() as u64);
        }
    }

    #[test]
    fn long_range_and_window_edge() {
        let block = random_bytes(1, 3000);
        let mut data = block.clone();
        data.extend(random_bytes(2, WINDOW - 3000));
        data.extend(&block);
        assert_eq!(decompress(&compress(&data)).unwrap(), data);
        let mut far = block.clone();
        far.extend(random_bytes(3, WINDOW + 10));
        far.extend(&block);
        assert_eq!(decompress(&compress(&far)).unwrap(), far);
    }

    #[test]
    fn roundtrip_fixed_seed_payloads() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1000 {
            let n = rng.gen_range(0..600);
            let alphabet = rng.gen_range(1..=255u8);
            let data: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=alphabet)).collect();
            let packed = compress(&data);
            assert_eq!(decompress(&packed).unwrap(), data);
            assert_eq!(compress(&data), packed);
        }
    }

    #[test]
    fn corrupt_streams_rejected() {
        assert_eq!(decompress(&[1, 0]), Err(DecodeError::Truncated));
        assert_eq!(decompress(&[1, 0, 0, 0]), Err(DecodeError::Truncated));
        assert!(matches!(
            decompress(&[3, 0, 0, 0, 1, 0, 0, 0]),
            Err(DecodeError::BadOffset { pos: 0, offset: 1 })
        ));
        assert!(matches!(
            decompress(&[1, 0, 0, 0, 0, b'x', b'y']),
            Err(DecodeError::LengthMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn roundtrip(data in prop::collection::vec(0u8..4, 0..2000)) {
            let packed = compress(&data);
            prop_assert_eq!(packed.len() as u64, compressed_len(&data));
            prop_assert_eq!(decompress(&packed).unwrap(), data);
        }
    }
}
