//! Monte Carlo BER/FER measurement.
//!
//! Each point runs blocks of `block_len` random message bits through
//! encode, puncture, interleave, channel and back, until its stop rule
//! holds. Block `i` of a point draws its message from stream `2i` and its
//! noise from stream `2i + 1` of the point seed, which depends only on the
//! master seed and the channel point (plus the scheme and decoder when
//! unpaired). Blocks are simulated in parallel batches but tallied in order,
//! so results do not depend on the worker count.

use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use convk_core::bcjr::{bcjr_decode, MapVariant};
use convk_core::channel::{hard_to_llr, stream_rng, transmit, ChannelModel, Received};
use convk_core::viterbi::ViterbiDecoder;
use convk_core::{encode_block, SoftWord, Trellis};
use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::plan::{PlanPoint, SweepPlan};
use crate::scheme::Decoder;

/// Two-sided 95% normal quantile.
pub const WILSON_Z: f64 = 1.959_963_984_540_054;

/// Blocks simulated per parallel batch. Blocks past the stopping block are
/// discarded, so this only trades wasted work against scheduling overhead.
const BATCH_BLOCKS: u64 = 64;
const WARM_UP: Duration = Duration::from_millis(100);

pub const CSV_HEADER: [&str; 19] = [
    "code_id",
    "k",
    "effective_rate",
    "decoder",
    "channel_model",
    "ebno_db",
    "bits_tested",
    "bit_errors",
    "ber",
    "frames_tested",
    "frame_errors",
    "fer",
    "ci_low",
    "ci_high",
    "elapsed_seconds",
    "decoded_bits_per_second",
    "states",
    "seed",
    "paired",
];

pub const PLOT_HEADER: [&str; 5] = ["series", "ebno_db", "ber", "ci_low", "ci_high"];

/// 95% Wilson score interval for `errors` successes in `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the interval always covers p; clamp away rounding at the ends
    ((centre - half).clamp(0.0, p), (centre + half).clamp(p, 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub code_id: String,
    pub k: u8,
    pub effective_rate: f64,
    pub decoder: Decoder,
    pub channel_model: ChannelModel,
    pub ebno_db: f64,
    pub bits_tested: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub frames_tested: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub elapsed_seconds: Option<f64>,
    pub decoded_bits_per_second: Option<f64>,
    pub states: usize,
    pub seed: u64,
    pub paired: bool,
}

impl BerRecord {
    pub fn csv_fields(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        vec![
            self.code_id.clone(),
            self.k.to_string(),
            self.effective_rate.to_string(),
            self.decoder.to_string(),
            self.channel_model.name().to_string(),
            self.ebno_db.to_string(),
            self.bits_tested.to_string(),
            self.bit_errors.to_string(),
            self.ber.to_string(),
            self.frames_tested.to_string(),
            self.frame_errors.to_string(),
            self.fer.to_string(),
            self.ci_low.to_string(),
            self.ci_high.to_string(),
            opt(self.elapsed_seconds),
            opt(self.decoded_bits_per_second),
            self.states.to_string(),
            self.seed.to_string(),
            self.paired.to_string(),
        ]
    }

    /// Name of the curve this record belongs to in the plot file.
    pub fn series(&self) -> String {
        format!("{} {} {}", self.code_id, self.decoder, self.channel_model.name())
    }

    fn sort_key(&self) -> (u8, Decoder, f64, &str, &str) {
        (self.k, self.decoder, self.ebno_db, &self.code_id, self.channel_model.name())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepResult {
    /// Sorted by K, decoder, Eb/N0, then code id and channel model.
    pub records: Vec<BerRecord>,
    /// Points that failed, with the reason.
    pub errors: Vec<String>,
    /// Set when the sweep was cancelled before every point finished.
    pub truncated: Option<String>,
}

impl SweepResult {
    /// CSV with a header row. Failures and truncation are appended as `#`
    /// comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(CSV_HEADER)?;
            for r in &self.records {
                w.write_record(r.csv_fields())?;
            }
            w.flush()?;
        }
        for e in &self.errors {
            writeln!(out, "# error: {}", one_line(e))?;
        }
        if let Some(t) = &self.truncated {
            writeln!(out, "# truncated: {}", one_line(t))?;
        }
        Ok(())
    }

    pub fn write_plot<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(PLOT_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.series(),
                r.ebno_db.to_string(),
                r.ber.to_string(),
                r.ci_low.to_string(),
                r.ci_high.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 fields")
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of a point's message and noise streams.
pub fn point_seed(master: u64, point: &PlanPoint, paired: bool) -> u64 {
    let seed = splitmix(master ^ splitmix(point.channel_index as u64));
    if paired {
        seed
    } else {
        let tag = ((point.scheme_index as u64) << 8) | point.decoder as u64;
        splitmix(seed ^ splitmix(tag.wrapping_add(1)))
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    bits: u64,
    errors: u64,
    frames: u64,
    frame_errors: u64,
    decode_time: Duration,
}

impl Tally {
    fn add(&mut self, block: BlockStats) {
        self.bits += block.bits;
        self.errors += block.errors;
        self.frames += 1;
        self.frame_errors += u64::from(block.errors > 0);
        self.decode_time += block.decode_time;
    }
}

#[derive(Clone, Copy, Debug)]
struct BlockStats {
    bits: u64,
    errors: u64,
    decode_time: Duration,
}

enum DecoderInput {
    Hard(Vec<u8>),
    Soft(SoftWord),
}

/// Everything one point needs to simulate a block; shared read-only by the
/// workers.
struct Link<'p> {
    point: &'p PlanPoint,
    trellis: Option<Trellis>,
    seed: u64,
    /// Crossover probability assumed when turning hard channel outputs into
    /// LLRs.
    hard_p: f64,
}

impl<'p> Link<'p> {
    fn new(plan: &SweepPlan, point: &'p PlanPoint) -> Self {
        let ch = &point.channel;
        Link {
            point,
            trellis: point.scheme.code().map(Trellis::new),
            seed: point_seed(plan.seed, point, plan.paired),
            hard_p: match ch.model {
                ChannelModel::Bsc => ch.bsc_p,
                ChannelModel::GilbertElliott => ch.ge.mean_error(),
                ChannelModel::Awgn => 0.0,
            },
        }
    }

    fn message(&self, index: u64, len: usize) -> Vec<u8> {
        let mut rng = stream_rng(self.seed, 2 * index);
        let mut msg = Vec::with_capacity(len);
        while msg.len() < len {
            let word = rng.next_u64();
            let take = (len - msg.len()).min(64);
            msg.extend((0..take).map(|i| ((word >> i) & 1) as u8));
        }
        msg
    }

    fn block(&self, index: u64, len: usize, viterbi: &mut Option<ViterbiDecoder<'_>>) -> Result<BlockStats> {
        let scheme = &self.point.scheme;
        let msg = self.message(index, len);
        let coded = match scheme.code() {
            Some(code) => encode_block(code, &msg, true)?,
            None => msg.clone(),
        };
        let n = scheme.code().map_or(1, |c| c.n());
        let steps = coded.len() / n;
        let sent = match scheme.puncture() {
            Some(p) => p.puncture(&coded)?,
            None => coded,
        };
        let sent_len = sent.len();
        let on_air = match scheme.interleaver() {
            Some(il) => {
                let mut padded = sent;
                padded.resize(il.padded_len(sent_len), 0);
                il.interleave(&padded)?
            }
            None => sent,
        };

        let channel = convk_core::channel::ChannelConfig {
            seed: self.seed,
            stream: 2 * index + 1,
            ..self.point.channel
        };
        let received = match transmit(&on_air, &channel)? {
            Received::Soft(word) => {
                let mut llrs = word.into_inner();
                if let Some(il) = scheme.interleaver() {
                    llrs = il.deinterleave(&llrs)?;
                }
                llrs.truncate(sent_len);
                llrs
            }
            Received::Hard(bits) => {
                let mut bits = match scheme.interleaver() {
                    Some(il) => il.deinterleave(&bits)?,
                    None => bits,
                };
                bits.truncate(sent_len);
                hard_to_llr(&bits, self.hard_p).into_inner()
            }
        };

        let decoder = self.point.decoder;
        let input = if decoder.wants_soft() {
            DecoderInput::Soft(match scheme.puncture() {
                Some(p) => p.depuncture(&received, steps)?,
                None => SoftWord::new(received)?,
            })
        } else {
            match scheme.puncture() {
                // hard decisions with erasures in the punctured positions
                Some(p) => {
                    let signs: Vec<f64> = received.iter().map(|&l| if l < 0.0 { -1.0 } else { 1.0 }).collect();
                    DecoderInput::Soft(p.depuncture(&signs, steps)?)
                }
                None => DecoderInput::Hard(received.iter().map(|&l| u8::from(l < 0.0)).collect()),
            }
        };

        let start = Instant::now();
        let decoded = match (decoder, input) {
            (Decoder::Uncoded, DecoderInput::Hard(bits)) => bits,
            (Decoder::ViterbiHard, DecoderInput::Hard(bits)) => {
                self.viterbi(viterbi)?.decode_hard(&bits, true)?.decoded
            }
            (Decoder::ViterbiHard | Decoder::ViterbiSoft, DecoderInput::Soft(word)) => {
                self.viterbi(viterbi)?.decode_soft(&word, true)?.decoded
            }
            (Decoder::BcjrLogMap, DecoderInput::Soft(word)) => {
                bcjr_decode(self.trellis()?, &word, true, MapVariant::LogMap)?.hard_decisions()
            }
            (Decoder::BcjrMaxLog, DecoderInput::Soft(word)) => {
                bcjr_decode(self.trellis()?, &word, true, MapVariant::MaxLogMap)?.hard_decisions()
            }
            (d, _) => return Err(Error::Plan(format!("decoder {} does not apply to {}", d, scheme))),
        };
        let decode_time = start.elapsed();
        let errors = decoded.iter().zip(&msg).filter(|(a, b)| a != b).count() as u64;
        Ok(BlockStats {
            bits: len as u64,
            errors,
            decode_time,
        })
    }

    fn trellis(&self) -> Result<&Trellis> {
        self.trellis
            .as_ref()
            .ok_or_else(|| Error::Plan("the uncoded baseline has no trellis".into()))
    }

    fn viterbi<'a, 'v>(&self, slot: &'a mut Option<ViterbiDecoder<'v>>) -> Result<&'a mut ViterbiDecoder<'v>> {
        slot.as_mut()
            .ok_or_else(|| Error::Plan("the uncoded baseline has no trellis".into()))
    }

    fn record(&self, plan: &SweepPlan, tally: Tally, elapsed: Duration) -> BerRecord {
        let point = self.point;
        let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let (ci_low, ci_high) = wilson_interval(tally.errors, tally.bits);
        let decode_secs = tally.decode_time.as_secs_f64();
        BerRecord {
            code_id: point.scheme.to_string(),
            k: point.scheme.constraint_length(),
            effective_rate: point.scheme.rate(),
            decoder: point.decoder,
            channel_model: point.channel.model,
            ebno_db: point.channel.ebno_db,
            bits_tested: tally.bits,
            bit_errors: tally.errors,
            ber: ratio(tally.errors, tally.bits),
            frames_tested: tally.frames,
            frame_errors: tally.frame_errors,
            fer: ratio(tally.frame_errors, tally.frames),
            ci_low,
            ci_high,
            elapsed_seconds: plan.timing.then_some(elapsed.as_secs_f64()),
            decoded_bits_per_second: (plan.timing && decode_secs > 0.0)
                .then(|| tally.bits as f64 / decode_secs),
            states: point.scheme.states(),
            seed: plan.seed,
            paired: plan.paired,
        }
    }
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Simulates one point until its stop rule holds. Returns `None` if
/// `cancel` was raised first.
pub fn run_point(
    plan: &SweepPlan,
    point: &PlanPoint,
    pool: &rayon::ThreadPool,
    cancel: &AtomicBool,
) -> Result<Option<BerRecord>> {
    let started = Instant::now();
    let link = Link::new(plan, point);
    let block_len = plan.block_len as u64;
    let max_bits = plan.stop.max_bits;
    let total_blocks = max_bits.div_ceil(block_len);
    // the last block is shortened so bits never exceed max_bits
    let len_of = |b: u64| block_len.min(max_bits - b * block_len) as usize;

    let simulate = |range: std::ops::Range<u64>| -> Vec<Result<BlockStats>> {
        pool.install(|| {
            range
                .into_par_iter()
                .map_init(
                    || link.trellis.as_ref().map(ViterbiDecoder::new),
                    |viterbi, b| link.block(b, len_of(b), viterbi),
                )
                .collect()
        })
    };
    if plan.timing {
        // untimed passes so clock ramp-up and cold caches do not land on
        // whichever point happens to run first
        let warm = Instant::now();
        while warm.elapsed() < WARM_UP && !cancel.load(Ordering::Relaxed) {
            simulate(0..BATCH_BLOCKS.min(total_blocks));
        }
    }

    let mut tally = Tally::default();
    let mut next = 0;
    'run: while next < total_blocks {
        if cancel.load(Ordering::Relaxed) {
            return Ok(None);
        }
        let end = (next + BATCH_BLOCKS).min(total_blocks);
        for stats in simulate(next..end) {
            tally.add(stats?);
            if plan.stop.satisfied(tally.bits, tally.errors) {
                break 'run;
            }
        }
        next = end;
    }
    Ok(Some(link.record(plan, tally, started.elapsed())))
}

/// Runs every point of a validated plan. A failing point is reported in
/// [`SweepResult::errors`] and the sweep moves on.
pub fn run_sweep(plan: &SweepPlan, workers: usize, cancel: &AtomicBool) -> Result<SweepResult> {
    plan.validate()?;
    let pool = thread_pool(workers)?;
    let points = plan.points();
    let mut result = SweepResult::default();
    for (i, point) in points.iter().enumerate() {
        match run_point(plan, point, &pool, cancel) {
            Ok(Some(record)) => result.records.push(record),
            Ok(None) => {
                result.truncated = Some(format!("interrupted after {} of {} points", i, points.len()));
                break;
            }
            Err(e) => result.errors.push(format!(
                "{} {} {} dB: {}",
                point.scheme,
                point.decoder,
                point.channel.ebno_db,
                e
            )),
        }
    }
    result.records.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        (ka.0, ka.1)
            .cmp(&(kb.0, kb.1))
            .then(ka.2.total_cmp(&kb.2))
            .then((ka.3, ka.4).cmp(&(kb.3, kb.4)))
    });
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 100 / 10^4: centre 0.0102, half-width ~0.0019
        let (lo, hi) = wilson_interval(100, 10_000);
        assert!((lo - 0.008_227).abs() < 1e-5, "{}", lo);
        assert!((hi - 0.012_153).abs() < 1e-5, "{}", hi);
        assert_eq!(wilson_interval(0, 1000).0, 0.0);
        let (lo, hi) = wilson_interval(0, 1000);
        assert!(lo == 0.0 && hi > 0.0 && hi < 0.004);
        let (lo, hi) = wilson_interval(1000, 1000);
        assert!(lo < 1.0 && hi == 1.0);
    }

    #[test]
    fn paired_seeds_ignore_scheme() {
        let mut plan = SweepPlan::default();
        plan.apply("codes", "3;5").unwrap();
        plan.apply("ebno_db", "1,2").unwrap();
        let points = plan.points();
        let seeds: Vec<u64> = points.iter().map(|p| point_seed(7, p, true)).collect();
        assert_eq!(seeds[0], seeds[2]);
        assert_ne!(seeds[0], seeds[1]);
        let unpaired: Vec<u64> = points.iter().map(|p| point_seed(7, p, false)).collect();
        assert_ne!(unpaired[0], unpaired[2]);
    }

    fn quick_plan(text: &str) -> SweepPlan {
        let mut plan = SweepPlan::default();
        plan.apply_text(text).unwrap();
        plan
    }

    #[test]
    fn noiseless_point_runs_to_max_bits() {
        let plan = quick_plan("codes=5+p=110/101+il=8x8\ndecoders=viterbi-hard,viterbi-soft,bcjr-maxlog\nebno_db=40\nmax_bits=5000\nblock_len=300");
        let result = run_sweep(&plan, 2, &AtomicBool::new(false)).unwrap();
        assert_eq!(result.records.len(), 3);
        for r in &result.records {
            assert_eq!((r.bits_tested, r.bit_errors, r.ber), (5000, 0, 0.0));
            assert_eq!(r.frames_tested, 17);
            assert!(r.elapsed_seconds.is_none());
        }
    }

    #[test]
    fn stops_on_errors() {
        let plan = quick_plan("codes=uncoded\nebno_db=0\nmin_errors=100\nmax_bits=100000000");
        let result = run_sweep(&plan, 4, &AtomicBool::new(false)).unwrap();
        let r = &result.records[0];
        assert!(r.bit_errors >= 100 && r.bit_errors < 100 + 1024);
        assert_eq!(r.bits_tested % 1024, 0);
        assert!(r.ci_low <= r.ber && r.ber <= r.ci_high);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let plan = quick_plan("codes=3;uncoded\ndecoders=viterbi-soft,bcjr-logmap\nebno_db=1,3\nmax_bits=40000\nblock_len=500");
        let cancel = AtomicBool::new(false);
        let one = run_sweep(&plan, 1, &cancel).unwrap();
        let many = run_sweep(&plan, 5, &cancel).unwrap();
        assert_eq!(one.to_csv_string(), many.to_csv_string());
        assert_eq!(one.records.len(), 6);
    }

    #[test]
    fn cancelled_sweep_is_marked() {
        let plan = quick_plan("codes=3\nebno_db=1");
        let result = run_sweep(&plan, 1, &AtomicBool::new(true)).unwrap();
        assert!(result.records.is_empty());
        let csv = result.to_csv_string();
        assert!(csv.lines().last().unwrap().starts_with("# truncated: interrupted after 0 of 1"));
    }

    #[test]
    fn hard_channels_run() {
        for model in ["bsc\nbsc_p=0.02", "ge"] {
            let plan = quick_plan(&format!(
                "codes=5;uncoded\ndecoders=viterbi-hard,viterbi-soft\nebno_db=0\nmax_bits=20000\nmodel={}",
                model
            ));
            let result = run_sweep(&plan, 2, &AtomicBool::new(false)).unwrap();
            assert_eq!(result.records.len(), 3);
            assert!(result.errors.is_empty());
        }
    }

    #[test]
    fn csv_layout() {
        let plan = quick_plan("codes=3\nebno_db=2\nmax_bits=2048\ntiming=true");
        let result = run_sweep(&plan, 1, &AtomicBool::new(false)).unwrap();
        let csv = result.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
        let row = lines.next().unwrap();
        assert!(row.starts_with("\"3:1/2:7,5\",3,0.5,viterbi-soft,awgn,2,"), "{}", row);
        assert!(row.ends_with(",4,0,true"), "{}", row);
        assert!(result.records[0].decoded_bits_per_second.unwrap() > 0.0);
        let mut plot = Vec::new();
        result.write_plot(&mut plot).unwrap();
        let plot = String::from_utf8(plot).unwrap();
        assert!(plot.starts_with("series,ebno_db,ber,ci_low,ci_high\n3:1/2:7,5 viterbi-soft awgn,2,") || plot.contains("\"3:1/2:7,5 viterbi-soft awgn\",2,"), "{}", plot);
    }
}
