//! Per-frame pipeline: solve, quantize, predict, optionally project the
//! residual block, Rice-code, and serialize — plus the exact mirror for
//! decoding. The encoder evaluates direct coding (with per-channel verbatim
//! escape) against the projected mode and keeps whichever chunk is smaller.

use half::f16;

use crate::bits::{BitSink, BitSource};
use crate::block::{BlockView, SampleBlock};
use crate::error::{Error, Result};
use crate::predictor::{compute_residuals, reconstruct_frame, ResidualBlock};
use crate::rice::{best_rice_param, rice_decode, rice_encode, RiceParam};
use crate::solver::{solve_frame_coefficients, ModelSpec};
use crate::transform::{fit_projection, forward_project, inverse_project, ProjectionMatrix};

/// Default analysis frame length in samples.
pub const DEFAULT_FRAME_SIZE: usize = 4096;

/// How one mix of the container is coded: the prediction model plus whether
/// the encoder may use the projected residual mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixConfig {
    pub model: ModelSpec,
    pub svd: bool,
}

impl MixConfig {
    pub fn new(model: ModelSpec, svd: bool) -> MixConfig {
        MixConfig { model, svd }
    }
}

/// Structural accounting of one decoded chunk, in bits. Payload covers the
/// Rice streams and verbatim sample runs; everything else is side
/// information.
#[derive(Debug, Clone, Default)]
pub struct ChunkStats {
    pub svd_mode: bool,
    pub escapes: Vec<bool>,
    pub flag_bits: u64,
    pub warmup_bits: u64,
    pub coeff_bits: u64,
    pub matrix_bits: u64,
    pub rice_param_bits: u64,
    pub payload_bits: u64,
    pub pad_bits: u64,
    pub total_bits: u64,
}

impl ChunkStats {
    /// Side information: everything except payload and padding.
    pub fn side_info_bits(&self) -> u64 {
        self.flag_bits + self.warmup_bits + self.coeff_bits + self.matrix_bits
            + self.rice_param_bits
    }
}

/// Start offset and length of frame `index` in a stream of `total` samples.
pub(crate) fn frame_bounds(total: usize, index: usize, frame_size: usize) -> (usize, usize) {
    let start = index * frame_size;
    (start, frame_size.min(total - start))
}

const RICE_PARAM_BITS: u32 = 5;

struct DirectPlan {
    /// Per channel: the Rice parameter, or None when escaped to verbatim.
    rice: Vec<Option<(RiceParam, u64)>>,
    total_bits: u64,
}

struct SvdPlan {
    q: ProjectionMatrix,
    transformed: ResidualBlock,
    correction: ResidualBlock,
    /// Rice parameters for the C transformed columns then the C corrections.
    rice: Vec<(RiceParam, u64)>,
    total_bits: u64,
}

fn common_bits(channels: usize, warmup: usize) -> u64 {
    1 + channels as u64 + (warmup * channels * 16) as u64
}

fn plan_direct(
    residuals: &ResidualBlock,
    coeff_bits_per_channel: u64,
    warmup: usize,
) -> Result<DirectPlan> {
    let region = residuals.len() as u64;
    let mut rice = Vec::with_capacity(residuals.channels());
    let mut total = common_bits(residuals.channels(), warmup);
    for c in 0..residuals.channels() {
        let (param, payload) = best_rice_param(residuals.channel(c))?;
        let coded = coeff_bits_per_channel + u64::from(RICE_PARAM_BITS) + payload;
        let verbatim = 16 * region;
        if coded > verbatim {
            rice.push(None);
            total += verbatim;
        } else {
            rice.push(Some((param, payload)));
            total += coded;
        }
    }
    Ok(DirectPlan {
        rice,
        total_bits: total,
    })
}

fn plan_svd(
    residuals: &ResidualBlock,
    coeff_bits_per_channel: u64,
    warmup: usize,
) -> Result<SvdPlan> {
    let c = residuals.channels();
    let q = fit_projection(residuals)?;
    let (transformed, correction) = forward_project(residuals, &q)?;
    let mut rice = Vec::with_capacity(2 * c);
    let mut total = common_bits(c, warmup)
        + c as u64 * coeff_bits_per_channel
        + (c * c * 16) as u64
        + 2 * c as u64 * u64::from(RICE_PARAM_BITS);
    for block in [&transformed, &correction] {
        for ch in 0..c {
            let (param, payload) = best_rice_param(block.channel(ch))?;
            total += payload;
            rice.push((param, payload));
        }
    }
    Ok(SvdPlan {
        q,
        transformed,
        correction,
        rice,
        total_bits: total,
    })
}

fn write_warmup(sink: &mut BitSink, frame: &BlockView, warmup: usize) {
    for c in 0..frame.channels() {
        for t in 0..warmup {
            sink.write_bits(u64::from(frame.sample(c, t) as u16), 16);
        }
    }
}

fn write_coeffs(sink: &mut BitSink, entry: &[f16]) {
    for h in entry {
        sink.write_bits(u64::from(h.to_bits()), 16);
    }
}

/// Encodes one frame of `mix` into a self-contained chunk (without the
/// container's length prefix). `downmix` must be present exactly when the
/// model uses one and is read at the same sample range.
pub fn encode_frame(
    mix: &SampleBlock,
    downmix: Option<&SampleBlock>,
    frame_index: usize,
    frame_size: usize,
    config: &MixConfig,
) -> Result<Vec<u8>> {
    let model = &config.model;
    let (start, len) = frame_bounds(mix.len(), frame_index, frame_size);
    let frame = BlockView::range(mix, start, len);
    let dmx = downmix.map(|d| BlockView::range(d, start, len));
    let channels = mix.channels();
    let warmup = if frame_index == 0 {
        model.order().min(len)
    } else {
        0
    };
    let region = len - warmup;

    let mut sink = BitSink::new();
    if region == 0 {
        // Nothing predictable: flags plus raw warm-up samples only.
        sink.write_bit(false);
        sink.write_bits(0, channels as u32);
        write_warmup(&mut sink, &frame, warmup);
        return Ok(sink.into_bytes());
    }

    let coeff_set = solve_frame_coefficients(frame, dmx, model)?;
    let dequant: Vec<Vec<f64>> = (0..channels).map(|c| coeff_set.dequantized(c)).collect();
    let residuals = compute_residuals(frame, dmx, &dequant, model)?;
    let coeff_bits = 16 * model.coeff_count(channels) as u64;

    let direct = plan_direct(&residuals, coeff_bits, warmup)?;
    let svd = if config.svd && channels >= 2 {
        Some(plan_svd(&residuals, coeff_bits, warmup)?)
    } else {
        None
    };
    let use_svd = svd
        .as_ref()
        .is_some_and(|plan| plan.total_bits < direct.total_bits);

    sink.write_bit(use_svd);
    if use_svd {
        sink.write_bits(0, channels as u32);
    } else {
        for c in 0..channels {
            sink.write_bit(direct.rice[c].is_none());
        }
    }
    write_warmup(&mut sink, &frame, warmup);

    if use_svd {
        let plan = svd.expect("svd plan chosen");
        for c in 0..channels {
            write_coeffs(&mut sink, coeff_set.entry(c));
        }
        for h in plan.q.entries() {
            sink.write_bits(u64::from(h.to_bits()), 16);
        }
        for (param, _) in &plan.rice {
            sink.write_bits(u64::from(param.get()), RICE_PARAM_BITS);
        }
        for (block, params) in [
            (&plan.transformed, &plan.rice[..channels]),
            (&plan.correction, &plan.rice[channels..]),
        ] {
            for c in 0..channels {
                let param = params[c].0;
                for &v in block.channel(c) {
                    rice_encode(v, param, &mut sink);
                }
            }
        }
        debug_assert_eq!(sink.bit_len(), plan.total_bits);
    } else {
        for c in 0..channels {
            if direct.rice[c].is_some() {
                write_coeffs(&mut sink, coeff_set.entry(c));
            }
        }
        for plan in direct.rice.iter() {
            if let Some((param, _)) = plan {
                sink.write_bits(u64::from(param.get()), RICE_PARAM_BITS);
            }
        }
        for c in 0..channels {
            match direct.rice[c] {
                Some((param, _)) => {
                    for &v in residuals.channel(c) {
                        rice_encode(v, param, &mut sink);
                    }
                }
                None => {
                    for t in 0..region {
                        let raw = frame.sample(c, warmup + t) as u16;
                        sink.write_bits(u64::from(raw), 16);
                    }
                }
            }
        }
        debug_assert_eq!(sink.bit_len(), direct.total_bits);
    }
    Ok(sink.into_bytes())
}

fn read_f16s(src: &mut BitSource, count: usize) -> Result<Vec<f16>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let h = f16::from_bits(src.read_bits(16)? as u16);
        if !h.is_finite() {
            return Err(Error::stream("non-finite binary16 parameter"));
        }
        out.push(h);
    }
    Ok(out)
}

fn read_rice_param(src: &mut BitSource) -> Result<RiceParam> {
    RiceParam::new(src.read_bits(RICE_PARAM_BITS)? as u8)
        .map_err(|_| Error::stream("rice parameter out of range"))
}

/// Decodes one chunk into `out` at the frame's sample range, returning the
/// chunk's structural accounting. The chunk must consume its bytes exactly.
pub fn decode_frame(
    chunk: &[u8],
    out: &mut SampleBlock,
    downmix: Option<&SampleBlock>,
    frame_index: usize,
    frame_size: usize,
    config: &MixConfig,
) -> Result<ChunkStats> {
    let model = &config.model;
    let (start, len) = frame_bounds(out.len(), frame_index, frame_size);
    let channels = out.channels();
    let warmup = if frame_index == 0 {
        model.order().min(len)
    } else {
        0
    };
    let region = len - warmup;

    let mut stats = ChunkStats {
        total_bits: chunk.len() as u64 * 8,
        ..ChunkStats::default()
    };
    let mut src = BitSource::new(chunk);

    let svd_mode = src.read_bit()?;
    let mut escapes = vec![false; channels];
    for escape in escapes.iter_mut() {
        *escape = src.read_bit()?;
    }
    if svd_mode && escapes.iter().any(|&e| e) {
        return Err(Error::stream("escape flags set in projected mode"));
    }
    if svd_mode && (channels < 2 || region == 0) {
        return Err(Error::stream("projected mode on an unprojectable frame"));
    }
    stats.svd_mode = svd_mode;
    stats.escapes = escapes.clone();
    stats.flag_bits = 1 + channels as u64;

    for c in 0..channels {
        for t in 0..warmup {
            let raw = src.read_bits(16)? as u16;
            out.set_sample(c, start + t, raw as i16);
        }
    }
    stats.warmup_bits = (warmup * channels * 16) as u64;

    if region > 0 {
        let k = model.coeff_count(channels);
        let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(channels);
        for c in 0..channels {
            if escapes[c] {
                coeffs.push(vec![0.0; k]);
            } else {
                let entry = read_f16s(&mut src, k)?;
                stats.coeff_bits += 16 * k as u64;
                coeffs.push(entry.iter().map(|&h| f64::from(h)).collect());
            }
        }

        let residuals;
        if svd_mode {
            let q = ProjectionMatrix::from_raw(channels, read_f16s(&mut src, channels * channels)?)?;
            stats.matrix_bits = (channels * channels * 16) as u64;
            let mut params = Vec::with_capacity(2 * channels);
            for _ in 0..2 * channels {
                params.push(read_rice_param(&mut src)?);
            }
            stats.rice_param_bits = 2 * channels as u64 * u64::from(RICE_PARAM_BITS);
            let payload_from = src.bits_consumed();
            let mut transformed = ResidualBlock::new(channels, region);
            let mut correction = ResidualBlock::new(channels, region);
            for (block, params) in [
                (&mut transformed, &params[..channels]),
                (&mut correction, &params[channels..]),
            ] {
                for c in 0..channels {
                    for t in 0..region {
                        block.set(c, t, rice_decode(&mut src, params[c])?);
                    }
                }
            }
            stats.payload_bits = src.bits_consumed() - payload_from;
            residuals = inverse_project(&transformed, &correction, &q)?;
        } else {
            let mut params: Vec<Option<RiceParam>> = Vec::with_capacity(channels);
            for c in 0..channels {
                if escapes[c] {
                    params.push(None);
                } else {
                    params.push(Some(read_rice_param(&mut src)?));
                    stats.rice_param_bits += u64::from(RICE_PARAM_BITS);
                }
            }
            let payload_from = src.bits_consumed();
            let mut res = ResidualBlock::new(channels, region);
            for c in 0..channels {
                match params[c] {
                    Some(param) => {
                        for t in 0..region {
                            res.set(c, t, rice_decode(&mut src, param)?);
                        }
                    }
                    None => {
                        // Verbatim escape: raw samples, written straight out.
                        for t in 0..region {
                            let raw = src.read_bits(16)? as u16;
                            out.set_sample(c, start + warmup + t, raw as i16);
                        }
                    }
                }
            }
            stats.payload_bits = src.bits_consumed() - payload_from;
            residuals = res;
        }

        let active: Vec<bool> = escapes.iter().map(|&e| !e).collect();
        let dmx = downmix.map(|d| BlockView::range(d, start, len));
        reconstruct_frame(out, start, len, &residuals, dmx, &coeffs, &active, model)?;
    }

    let consumed = src.bits_consumed();
    src.align_to_byte()?;
    stats.pad_bits = src.bits_consumed() - consumed;
    if src.bits_consumed() != chunk.len() as u64 * 8 {
        return Err(Error::stream(format!(
            "chunk declared {} bytes but decoding consumed {}",
            chunk.len(),
            src.bits_consumed().div_ceil(8)
        )));
    }
    Ok(stats)
}
