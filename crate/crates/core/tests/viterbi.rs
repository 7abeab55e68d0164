mod common;

use common::*;
use convk_core::registry::default_code;
use convk_core::viterbi::{
    default_window, viterbi_decode_hard, viterbi_decode_soft, viterbi_decode_stream, StreamDecoder,
    ViterbiDecoder,
};
use convk_core::{encode_block, CodeSpec, Error, SoftWord, Trellis};
use rand::Rng;

fn k3() -> CodeSpec {
    CodeSpec::new(3, &["7", "5"]).unwrap()
}

fn hamming(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

/// Mismatch cost of codeword `c` against soft input: summed |llr| where the
/// codeword disagrees with the sign decision.
fn soft_cost(c: &[u8], llrs: &[f64]) -> f64 {
    c.iter()
        .zip(llrs)
        .filter(|(&b, &l)| b != u8::from(l < 0.0))
        .map(|(_, l)| l.abs())
        .sum()
}

fn all_codewords(code: &CodeSpec, len: usize) -> Vec<(Vec<u8>, Vec<u8>)> {
    (0..1u32 << len)
        .map(|m| {
            let msg: Vec<u8> = (0..len).map(|i| ((m >> i) & 1) as u8).collect();
            let cw = oracle_encode(code.constraint_length(), &code.taps(), &msg, true);
            (msg, cw)
        })
        .collect()
}

#[test]
fn noiseless_round_trip_has_zero_metric() {
    let trellis = Trellis::new(&k3());
    let msg = [1, 0, 1, 1, 0];
    let cw = encode_block(&k3(), &msg, true).unwrap();
    let r = viterbi_decode_hard(&trellis, &cw, true).unwrap();
    assert_eq!(r.decoded, msg);
    assert_eq!(r.final_metric, 0);
    assert_eq!(r.traceback_ties, 0);

    let mut rng = rng(1);
    for k in 3..=9 {
        let code = default_code(k).unwrap();
        let trellis = Trellis::new(&code);
        for terminated in [true, false] {
            let msg = random_bits(&mut rng, 300);
            let cw = encode_block(&code, &msg, terminated).unwrap();
            assert_eq!(viterbi_decode_hard(&trellis, &cw, terminated).unwrap().decoded, msg);
            let soft = SoftWord::from_bits(&cw, 2.0);
            let r = viterbi_decode_soft(&trellis, &soft, terminated).unwrap();
            assert_eq!(r.decoded, msg);
            assert_eq!(r.final_metric, 0.0);
        }
    }
}

#[test]
fn corrects_every_double_error_in_worked_example() {
    let trellis = Trellis::new(&k3());
    let msg = [1, 0, 1, 1, 0];
    let cw = encode_block(&k3(), &msg, true).unwrap();
    let mut count = 0;
    for i in 0..cw.len() {
        for j in i + 1..cw.len() {
            let mut r = cw.clone();
            r[i] ^= 1;
            r[j] ^= 1;
            let out = viterbi_decode_hard(&trellis, &r, true).unwrap();
            assert_eq!(out.decoded, msg, "flips at {} and {}", i, j);
            assert_eq!(out.final_metric, 2);
            count += 1;
        }
    }
    assert_eq!(count, 91);
}

#[test]
fn hard_decoding_is_maximum_likelihood() {
    let mut rng = rng(2);
    let code = k3();
    let trellis = Trellis::new(&code);
    let book = all_codewords(&code, 8);
    for _ in 0..300 {
        let msg = random_bits(&mut rng, 8);
        let mut r = oracle_encode(3, &code.taps(), &msg, true);
        for _ in 0..3 {
            let p = rng.random_range(0..r.len());
            r[p] ^= 1;
        }
        check_hard_ml(&trellis, &book, &r);
    }
}

fn check_hard_ml(trellis: &Trellis, book: &[(Vec<u8>, Vec<u8>)], r: &[u8]) {
    let out = viterbi_decode_hard(trellis, r, true).unwrap();
    let best = book.iter().map(|(_, c)| hamming(c, r)).min().unwrap();
    assert_eq!(out.final_metric, best);
    let minimisers: Vec<&Vec<u8>> = book.iter().filter(|(_, c)| hamming(c, r) == best).map(|(m, _)| m).collect();
    assert!(minimisers.contains(&&out.decoded));
    if out.traceback_ties == 0 {
        assert_eq!(minimisers.len(), 1);
    }
}

#[test]
fn ml_optimality_across_constraint_lengths() {
    let mut rng = rng(3);
    for k in 3..=5u8 {
        let code = default_code(k).unwrap();
        let trellis = Trellis::new(&code);
        let len = 10;
        let book = all_codewords(&code, len);
        for _ in 0..200 {
            let msg = random_bits(&mut rng, len);
            let cw = oracle_encode(k, &code.taps(), &msg, true);

            let mut hard = cw.clone();
            for b in hard.iter_mut() {
                if rng.random_bool(0.1) {
                    *b ^= 1;
                }
            }
            check_hard_ml(&trellis, &book, &hard);

            let llrs = noisy_llrs(&mut rng, &cw, 1.0, 0.5);
            let out = viterbi_decode_soft(&trellis, &SoftWord::new(llrs.clone()).unwrap(), true).unwrap();
            let best = book
                .iter()
                .map(|(_, c)| soft_cost(c, &llrs))
                .fold(f64::INFINITY, f64::min);
            assert!((out.final_metric - best).abs() < 1e-9 * (1.0 + best));
            let own = book.iter().find(|(m, _)| *m == out.decoded).unwrap();
            assert!((soft_cost(&own.1, &llrs) - best).abs() < 1e-9 * (1.0 + best));
        }
    }
}

#[test]
fn soft_with_equal_magnitudes_matches_hard() {
    let mut rng = rng(4);
    let code = default_code(5).unwrap();
    let trellis = Trellis::new(&code);
    for i in 0..1000 {
        let terminated = i % 2 == 0;
        let msg = random_bits(&mut rng, 40);
        let mut r = encode_block(&code, &msg, terminated).unwrap();
        for b in r.iter_mut() {
            if rng.random_bool(0.08) {
                *b ^= 1;
            }
        }
        let hard = viterbi_decode_hard(&trellis, &r, terminated).unwrap();
        let soft = viterbi_decode_soft(&trellis, &SoftWord::from_bits(&r, 1.0), terminated).unwrap();
        assert_eq!(hard.decoded, soft.decoded);
        assert_eq!(hard.final_metric as f64, soft.final_metric);
        assert_eq!(hard.traceback_ties, soft.traceback_ties);
    }
}

#[test]
fn recovers_from_an_erased_symbol() {
    let code = default_code(7).unwrap();
    let trellis = Trellis::new(&code);
    let mut rng = rng(5);
    let msg = random_bits(&mut rng, 100);
    let cw = encode_block(&code, &msg, true).unwrap();
    for step in [0, 37, 105] {
        let mut llrs = SoftWord::from_bits(&cw, 4.0).into_inner();
        llrs[2 * step] = 0.0;
        llrs[2 * step + 1] = 0.0;
        let r = viterbi_decode_soft(&trellis, &SoftWord::new(llrs).unwrap(), true).unwrap();
        assert_eq!(r.decoded, msg);
    }
}

#[test]
fn input_validation() {
    let trellis = Trellis::new(&k3());
    assert_eq!(
        viterbi_decode_hard(&trellis, &[0, 1, 1], true),
        Err(Error::LengthNotMultipleOfN { len: 3, n: 2 })
    );
    assert_eq!(
        viterbi_decode_hard(&trellis, &[0, 1], true),
        Err(Error::BlockTooShort { len: 2, tail: 4 })
    );
    assert!(SoftWord::new(vec![1.0, f64::NAN]).is_err());
    assert_eq!(
        StreamDecoder::new(&trellis, 2).err(),
        Some(Error::WindowTooSmall { window: 2, k: 3 })
    );
    assert!(StreamDecoder::new(&trellis, 3).is_ok());
}

#[test]
fn decoding_is_deterministic_and_reusable() {
    let code = default_code(6).unwrap();
    let trellis = Trellis::new(&code);
    let mut rng = rng(6);
    let msg = random_bits(&mut rng, 500);
    let cw = encode_block(&code, &msg, true).unwrap();
    let soft = SoftWord::new(noisy_llrs(&mut rng, &cw, 2.0, 0.5)).unwrap();
    let mut dec = ViterbiDecoder::new(&trellis);
    let a = dec.decode_soft(&soft, true).unwrap();
    let _ = dec.decode_soft(&SoftWord::from_bits(&cw[..40], 1.0), false).unwrap();
    let b = dec.decode_soft(&soft, true).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, viterbi_decode_soft(&trellis, &soft, true).unwrap());
}

#[test]
fn survivor_memory_is_one_entry_per_state() {
    for k in 3..=9 {
        let trellis = Trellis::new(&default_code(k).unwrap());
        assert_eq!(ViterbiDecoder::new(&trellis).survivor_entries_per_step(), 1 << (k - 1));
    }
}

#[test]
fn stream_matches_block_on_clean_input() {
    let mut rng = rng(7);
    for k in [3u8, 5, 7] {
        let code = default_code(k).unwrap();
        let trellis = Trellis::new(&code);
        let msg = random_bits(&mut rng, 10_000);
        let cw = encode_block(&code, &msg, false).unwrap();
        let soft = SoftWord::from_bits(&cw, 1.0);
        let streamed = viterbi_decode_stream(&trellis, &soft, default_window(k)).unwrap();
        assert_eq!(streamed, msg);
        assert_eq!(streamed, viterbi_decode_soft(&trellis, &soft, false).unwrap().decoded);
    }
}

#[test]
fn stream_releases_bits_after_window() {
    let trellis = Trellis::new(&k3());
    let mut dec = StreamDecoder::new(&trellis, 15).unwrap();
    let msg = [1u8, 1, 0, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 0, 1, 0, 1, 1, 0, 1];
    let cw = encode_block(&k3(), &msg, false).unwrap();
    let llrs = SoftWord::from_bits(&cw, 1.0);
    let mut out = Vec::new();
    for (t, sym) in llrs.chunks(2).enumerate() {
        let bit = dec.push(sym);
        assert_eq!(bit.is_some(), t >= 15, "step {}", t);
        out.extend(bit);
    }
    out.extend(dec.finish());
    assert_eq!(out, msg);
}

#[test]
fn stream_ber_close_to_block_ber() {
    let code = default_code(7).unwrap();
    let trellis = Trellis::new(&code);
    for (ebno, len) in [(6.0, 100_000), (2.5, 200_000)] {
        let mut rng = rng(8);
        let msg = random_bits(&mut rng, len);
        let cw = encode_block(&code, &msg, true).unwrap();
        let soft = SoftWord::new(noisy_llrs(&mut rng, &cw, ebno, 0.5)).unwrap();
        let block = viterbi_decode_soft(&trellis, &soft, true).unwrap().decoded;
        let stream = viterbi_decode_stream(&trellis, &soft, default_window(7)).unwrap();
        let block_errors = hamming(&block, &msg);
        let stream_errors = hamming(&stream[..len], &msg);
        assert!(
            stream_errors <= 2 * block_errors.max(1),
            "{} dB: stream {} vs block {}",
            ebno,
            stream_errors,
            block_errors
        );
    }
}

#[test]
fn long_stream_metrics_stay_bounded() {
    let code = k3();
    let trellis = Trellis::new(&code);
    let mut dec = StreamDecoder::new(&trellis, 15).unwrap();
    let mut rng = rng(9);
    let mut errors = 0u64;
    let mut released = 0usize;
    let mut enc = convk_core::Encoder::new(&code);
    let mut history = std::collections::VecDeque::new();
    for _ in 0..1_000_000 {
        let u = rng.random_range(0..2u8);
        history.push_back(u);
        let mut sym = Vec::with_capacity(2);
        enc.push(u, &mut sym);
        let llrs = noisy_llrs(&mut rng, &sym, 3.0, 0.5);
        if let Some(bit) = dec.push(&llrs) {
            errors += u64::from(bit != history.pop_front().unwrap());
            released += 1;
        }
    }
    assert!(dec.metrics().iter().all(|m| m.is_finite() && *m >= 0.0 && *m < 1e6));
    assert_eq!(released, 1_000_000 - 15);
    assert!((errors as f64) / (released as f64) < 0.01);
}
