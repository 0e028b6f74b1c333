//! Deterministic synthetic 5.0 corpus: mixtures of panned pink-ish noise
//! sources and tones with per-channel coloration and a shared bed, plus
//! low-level independent noise. Channels end up strongly correlated and
//! partially predictable from each other's past, which is the structure the
//! multichannel and hierarchical models exploit.

use std::fs;
use std::path::{Path, PathBuf};

use mlc_core::{write_wav, Result, SampleBlock};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct CorpusParams {
    pub seed: u64,
    pub count: usize,
    pub seconds: f64,
    pub sample_rate: u32,
}

impl Default for CorpusParams {
    fn default() -> CorpusParams {
        CorpusParams {
            seed: 1,
            count: 20,
            seconds: 10.0,
            sample_rate: 44100,
        }
    }
}

const CHANNELS: usize = 5;

/// Pink-ish noise: white noise through two cascaded leaky integrators.
struct PinkSource {
    a1: f64,
    a2: f64,
    s1: f64,
    s2: f64,
}

impl PinkSource {
    fn new(rng: &mut ChaCha8Rng) -> PinkSource {
        PinkSource {
            a1: rng.gen_range(0.05..0.25),
            a2: rng.gen_range(0.2..0.6),
            s1: 0.0,
            s2: 0.0,
        }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        let w = rng.gen_range(-1.0..1.0);
        self.s1 += self.a1 * (w - self.s1);
        self.s2 += self.a2 * (self.s1 - self.s2);
        self.s2 * 8.0
    }
}

/// AR(2) colored noise with a resonance at a random frequency.
struct ArSource {
    c1: f64,
    c2: f64,
    y1: f64,
    y2: f64,
}

impl ArSource {
    fn new(rng: &mut ChaCha8Rng) -> ArSource {
        let r = rng.gen_range(0.85..0.97);
        let theta = rng.gen_range(0.05..0.9);
        ArSource {
            c1: 2.0 * r * theta.cos(),
            c2: -r * r,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> f64 {
        let y = self.c1 * self.y1 + self.c2 * self.y2 + rng.gen_range(-1.0..1.0);
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

/// Pure tone via the two-term oscillator recurrence.
struct ToneSource {
    c: f64,
    y1: f64,
    y2: f64,
}

impl ToneSource {
    fn new(rng: &mut ChaCha8Rng, sample_rate: u32) -> ToneSource {
        let freq = rng.gen_range(80.0..3500.0);
        let omega = std::f64::consts::TAU * freq / f64::from(sample_rate);
        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
        let amp = rng.gen_range(0.5..2.0);
        ToneSource {
            c: 2.0 * omega.cos(),
            y2: amp * phase.sin(),
            y1: amp * (phase + omega).sin(),
        }
    }

    fn next(&mut self) -> f64 {
        let y = self.c * self.y1 - self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

fn file_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Synthesizes one deterministic 5.0 block of `len` samples.
pub fn synth_surround(seed: u64, index: usize, len: usize, sample_rate: u32) -> SampleBlock {
    let mut rng = file_rng(seed, index);

    let mut bed = PinkSource::new(&mut rng);
    let bed_gains: Vec<f64> = (0..CHANNELS).map(|_| rng.gen_range(0.5..0.9)).collect();

    const AR_SOURCES: usize = 2;
    let mut ar: Vec<ArSource> = (0..AR_SOURCES).map(|_| ArSource::new(&mut rng)).collect();
    let ar_gains: Vec<Vec<f64>> = (0..AR_SOURCES)
        .map(|_| (0..CHANNELS).map(|_| rng.gen_range(0.1..1.0)).collect())
        .collect();
    // Front channels hear sources immediately; the surrounds mostly with a
    // short delay, so the joint model can read them from the fronts' past.
    let ar_delays: Vec<Vec<usize>> = (0..AR_SOURCES)
        .map(|_| {
            (0..CHANNELS)
                .map(|c| if c < 3 { 0 } else { rng.gen_range(1..=2) })
                .collect()
        })
        .collect();

    const TONES: usize = 2;
    let mut tones: Vec<ToneSource> = (0..TONES)
        .map(|_| ToneSource::new(&mut rng, sample_rate))
        .collect();
    let tone_gains: Vec<Vec<f64>> = (0..TONES)
        .map(|_| (0..CHANNELS).map(|_| rng.gen_range(0.1..0.8)).collect())
        .collect();

    let color: Vec<f64> = (0..CHANNELS).map(|_| rng.gen_range(0.0..0.25)).collect();
    let peak_target = rng.gen_range(9000.0..15000.0);

    const MAX_DELAY: usize = 2;
    let mut ar_hist = vec![[0.0f64; MAX_DELAY + 1]; AR_SOURCES];
    let mut colored_state = vec![0.0f64; CHANNELS];
    let mut raw = vec![0.0f64; CHANNELS * len];
    for t in 0..len {
        let b = bed.next(&mut rng);
        for (s, src) in ar.iter_mut().enumerate() {
            let v = src.next(&mut rng);
            ar_hist[s].rotate_right(1);
            ar_hist[s][0] = v;
        }
        let tone_vals: Vec<f64> = tones.iter_mut().map(|t| t.next()).collect();
        for c in 0..CHANNELS {
            let mut v = bed_gains[c] * b;
            for s in 0..AR_SOURCES {
                v += ar_gains[s][c] * ar_hist[s][ar_delays[s][c].min(t)];
            }
            for (m, tone) in tone_vals.iter().enumerate() {
                v += tone_gains[m][c] * tone;
            }
            colored_state[c] = v + color[c] * colored_state[c];
            raw[c * len + t] = colored_state[c];
        }
    }

    let peak = raw.iter().fold(1e-9f64, |m, &v| m.max(v.abs()));
    let scale = peak_target / peak;
    let mut data = vec![0i16; CHANNELS * len];
    for (slot, &v) in data.iter_mut().zip(raw.iter()) {
        let noisy = v * scale + rng.gen_range(-2.0..2.0);
        *slot = noisy.round().clamp(-32768.0, 32767.0) as i16;
    }
    SampleBlock::from_planar(CHANNELS, len, sample_rate, data).expect("sized above")
}

/// Writes `count` seed-reproducible 5.0 WAV files into `dir`, creating it if
/// needed. Returns the written paths in order.
pub fn generate_corpus(dir: impl AsRef<Path>, params: &CorpusParams) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let len = (params.seconds * f64::from(params.sample_rate)) as usize;
    let mut paths = Vec::with_capacity(params.count);
    for index in 0..params.count {
        let block = synth_surround(params.seed, index, len, params.sample_rate);
        let path = dir.join(format!("synth_{index:03}.wav"));
        write_wav(&path, &block)?;
        paths.push(path);
    }
    Ok(paths)
}

/// Pearson correlation between two channels; used by tests to check the
/// corpus has the promised inter-channel structure.
pub fn channel_correlation(block: &SampleBlock, a: usize, b: usize) -> f64 {
    let n = block.len() as f64;
    let (xa, xb) = (block.channel(a), block.channel(b));
    let ma = xa.iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    let mb = xb.iter().map(|&v| f64::from(v)).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for t in 0..block.len() {
        let da = f64::from(xa[t]) - ma;
        let db = f64::from(xb[t]) - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    cov / (va.sqrt() * vb.sqrt()).max(1e-12)
}
