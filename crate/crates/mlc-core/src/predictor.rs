//! Bit-exact integer prediction: residual computation and frame
//! reconstruction share one accumulation routine, so the decoder mirrors the
//! encoder's datatype changes and rounding exactly.
//!
//! The determinism contract: coefficients and context are combined in strict
//! left-to-right canonical order with plain double-precision multiply-adds —
//! no FMA, no reassociation — then scaled back to the integer domain with
//! the one shared rounding convention.

use crate::block::{round_half_away, BlockView, SampleBlock, SAMPLE_SCALE};
use crate::error::{Error, Result};
use crate::solver::{check_downmix, fill_context_row, predictable_from, ModelSpec};

/// Integer prediction residuals for the predictable region of one frame:
/// `channels` rows of `len` values, channel-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualBlock {
    channels: usize,
    len: usize,
    data: Vec<i32>,
}

impl ResidualBlock {
    pub fn new(channels: usize, len: usize) -> ResidualBlock {
        ResidualBlock {
            channels,
            len,
            data: vec![0; channels * len],
        }
    }

    pub fn from_planar(channels: usize, len: usize, data: Vec<i32>) -> Result<ResidualBlock> {
        if data.len() != channels * len {
            return Err(Error::shape(format!(
                "residual data length {} does not match {} x {}",
                data.len(),
                channels,
                len
            )));
        }
        Ok(ResidualBlock {
            channels,
            len,
            data,
        })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn channel(&self, c: usize) -> &[i32] {
        &self.data[c * self.len..(c + 1) * self.len]
    }

    pub fn channel_mut(&mut self, c: usize) -> &mut [i32] {
        &mut self.data[c * self.len..(c + 1) * self.len]
    }

    pub fn get(&self, c: usize, t: usize) -> i32 {
        self.data[c * self.len + t]
    }

    pub fn set(&mut self, c: usize, t: usize, value: i32) {
        self.data[c * self.len + t] = value;
    }
}

/// Strict sequential dot product; the indexed loop pins evaluation order and
/// keeps the optimizer from fusing or reassociating.
#[inline]
fn accumulate(coeffs: &[f64], context: &[f64]) -> f64 {
    debug_assert_eq!(coeffs.len(), context.len());
    let mut acc = 0.0f64;
    for i in 0..coeffs.len() {
        acc += coeffs[i] * context[i];
    }
    acc
}

/// Predicts one sample from its normalized context and dequantized
/// coefficients, returning the rounded 16-bit-domain integer.
pub fn predict_sample(context: &[f64], coeffs: &[f64]) -> Result<i32> {
    if context.len() != coeffs.len() {
        return Err(Error::shape(format!(
            "context length {} != coefficient count {}",
            context.len(),
            coeffs.len()
        )));
    }
    Ok(round_half_away(accumulate(coeffs, context) * SAMPLE_SCALE))
}

fn check_coeff_lengths(
    frame: &BlockView,
    coeffs: &[Vec<f64>],
    model: &ModelSpec,
) -> Result<usize> {
    let want = model.coeff_count(frame.channels());
    if coeffs.len() != frame.channels() {
        return Err(Error::shape(format!(
            "coefficient entries for {} channels, frame has {}",
            coeffs.len(),
            frame.channels()
        )));
    }
    for (c, entry) in coeffs.iter().enumerate() {
        if entry.len() != want {
            return Err(Error::shape(format!(
                "channel {c} has {} coefficients, model wants {want}",
                entry.len()
            )));
        }
    }
    Ok(want)
}

/// Residuals `e_c(t) = s_c(t) - predict(t)` over the predictable region of
/// the frame. Wrapping subtraction: the reconstruction below is its exact
/// mod-2^32 inverse even for pathological coefficients.
pub fn compute_residuals(
    frame: BlockView,
    downmix: Option<BlockView>,
    coeffs: &[Vec<f64>],
    model: &ModelSpec,
) -> Result<ResidualBlock> {
    check_downmix(&frame, downmix.as_ref(), model)?;
    let width = check_coeff_lengths(&frame, coeffs, model)?;
    let t0 = predictable_from(&frame, model.order())?;
    let region = frame.len() - t0.min(frame.len());
    let mut out = ResidualBlock::new(frame.channels(), region);
    let mut ctx = vec![0.0f64; width];
    for c in 0..frame.channels() {
        for t in t0..frame.len() {
            fill_context_row(&mut ctx, &frame, downmix.as_ref(), model, c, t);
            let pred = round_half_away(accumulate(&coeffs[c], &ctx) * SAMPLE_SCALE);
            let e = i32::from(frame.sample(c, t)).wrapping_sub(pred);
            out.set(c, t - t0, e);
        }
    }
    Ok(out)
}

/// Rebuilds samples from residuals, in increasing time so every
/// reconstructed sample feeds the later predictions. Channels whose entry in
/// `active` is false are left untouched (the codec writes those verbatim
/// before calling this). Bit-identical inverse of [`compute_residuals`].
pub fn reconstruct_frame(
    block: &mut SampleBlock,
    frame_start: usize,
    frame_len: usize,
    residuals: &ResidualBlock,
    downmix: Option<BlockView>,
    coeffs: &[Vec<f64>],
    active: &[bool],
    model: &ModelSpec,
) -> Result<()> {
    if frame_start + frame_len > block.len() {
        return Err(Error::shape("frame range out of block bounds"));
    }
    // Validate against a read view; writes go through the block directly.
    let (t0, width) = {
        let frame = BlockView::range(block, frame_start, frame_len);
        check_downmix(&frame, downmix.as_ref(), model)?;
        let width = check_coeff_lengths(&frame, coeffs, model)?;
        (predictable_from(&frame, model.order())?, width)
    };
    let region = frame_len - t0.min(frame_len);
    if residuals.channels() != block.channels() || residuals.len() != region {
        return Err(Error::shape(format!(
            "residual block {}x{} does not match frame region {}x{}",
            residuals.channels(),
            residuals.len(),
            block.channels(),
            region
        )));
    }
    if active.len() != block.channels() {
        return Err(Error::shape("active mask length != channel count"));
    }
    let mut ctx = vec![0.0f64; width];
    for t in t0..frame_len {
        for c in 0..block.channels() {
            if !active[c] {
                continue;
            }
            let frame = BlockView::range(block, frame_start, frame_len);
            fill_context_row(&mut ctx, &frame, downmix.as_ref(), model, c, t);
            let pred = round_half_away(accumulate(&coeffs[c], &ctx) * SAMPLE_SCALE);
            let s = pred.wrapping_add(residuals.get(c, t - t0));
            block.set_sample(c, frame_start + t, s as i16);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::normalize;
    use crate::solver::{quantize_coefficients, solve_frame_coefficients};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_block(rng: &mut StdRng, channels: usize, len: usize, amp: i16) -> SampleBlock {
        let data = (0..channels * len)
            .map(|_| rng.gen_range(-amp..=amp))
            .collect();
        SampleBlock::from_planar(channels, len, 44100, data).unwrap()
    }

    #[test]
    fn zero_coefficients_predict_zero() {
        let ctx = [0.25, -0.5, 0.125];
        assert_eq!(predict_sample(&ctx, &[0.0, 0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn identity_predictor_returns_previous_sample() {
        for s in [-32768i16, -1, 0, 1, 12345, 32767] {
            let ctx = [normalize(s)];
            assert_eq!(predict_sample(&ctx, &[1.0]).unwrap(), i32::from(s));
        }
    }

    #[test]
    fn hand_evaluated_accumulation() {
        // (100/32768 * 0.5 + 200/32768 * 0.25) * 32768 = 100.
        let ctx = [normalize(100), normalize(200)];
        assert_eq!(predict_sample(&ctx, &[0.5, 0.25]).unwrap(), 100);
    }

    #[test]
    fn context_length_mismatch_is_an_error() {
        assert!(predict_sample(&[0.0, 0.0], &[1.0]).is_err());
    }

    #[test]
    fn zero_coefficients_leave_the_signal_as_residual() {
        let mut rng = StdRng::seed_from_u64(1);
        let block = random_block(&mut rng, 2, 64, 1000);
        let model = ModelSpec::sep(4);
        let coeffs = vec![vec![0.0; 4]; 2];
        let res =
            compute_residuals(BlockView::full(&block), None, &coeffs, &model).unwrap();
        for c in 0..2 {
            for t in 4..64 {
                assert_eq!(res.get(c, t - 4), i32::from(block.sample(c, t)));
            }
        }
    }

    #[test]
    fn sep_dmx_copy_channel_has_zero_residual() {
        // gamma = 1, beta = 0, upmix == downmix: prediction is exact.
        let mut rng = StdRng::seed_from_u64(2);
        let dmx = random_block(&mut rng, 1, 128, 20000);
        let model = ModelSpec::sep_dmx(2, 1, 1e-4);
        let coeffs = vec![vec![0.0, 0.0, 1.0]];
        let res = compute_residuals(
            BlockView::full(&dmx),
            Some(BlockView::full(&dmx)),
            &coeffs,
            &model,
        )
        .unwrap();
        assert!(res.channel(0).iter().all(|&e| e == 0));

        let mut out = SampleBlock::new(1, 128, 44100);
        // Warm-up samples come from the original.
        for t in 0..2 {
            out.set_sample(0, t, dmx.sample(0, t));
        }
        reconstruct_frame(
            &mut out,
            0,
            128,
            &res,
            Some(BlockView::full(&dmx)),
            &coeffs,
            &[true],
            &model,
        )
        .unwrap();
        assert_eq!(out, dmx);
    }

    #[test]
    fn roundtrip_of_random_coefficients_is_exact() {
        let mut rng = StdRng::seed_from_u64(3);
        for &(channels, len, order) in
            &[(1usize, 40usize, 3usize), (2, 129, 8), (5, 96, 4)]
        {
            let block = random_block(&mut rng, channels, len, i16::MAX);
            let model = if channels > 1 {
                ModelSpec::joint(order, 1e-4)
            } else {
                ModelSpec::sep(order)
            };
            let want = model.coeff_count(channels);
            // Random (even unreasonable) quantized coefficients.
            let coeffs: Vec<Vec<f64>> = (0..channels)
                .map(|_| {
                    let raw: Vec<f64> =
                        (0..want).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    quantize_coefficients(&raw)
                        .iter()
                        .map(|&h| f64::from(h))
                        .collect()
                })
                .collect();
            let res =
                compute_residuals(BlockView::full(&block), None, &coeffs, &model).unwrap();

            let mut out = SampleBlock::new(channels, len, 44100);
            for c in 0..channels {
                for t in 0..order.min(len) {
                    out.set_sample(c, t, block.sample(c, t));
                }
            }
            reconstruct_frame(
                &mut out,
                0,
                len,
                &res,
                None,
                &coeffs,
                &vec![true; channels],
                &model,
            )
            .unwrap();
            assert_eq!(out, block);
        }
    }

    #[test]
    fn roundtrip_with_solved_coefficients_and_frame_history() {
        let mut rng = StdRng::seed_from_u64(4);
        // Smooth-ish signal so the solve is meaningful.
        let len = 300;
        let mut data = Vec::with_capacity(2 * len);
        for _ in 0..2 {
            let mut s = 0i32;
            for _ in 0..len {
                s = (s * 9 / 10 + rng.gen_range(-500..=500)).clamp(-30000, 30000);
                data.push(s as i16);
            }
        }
        let block = SampleBlock::from_planar(2, len, 44100, data).unwrap();
        let model = ModelSpec::joint(8, 1e-4);
        // Second half is the frame, first half provides history.
        let frame = BlockView::range(&block, 150, 150);
        let coeff_set = solve_frame_coefficients(frame, None, &model).unwrap();
        let coeffs: Vec<Vec<f64>> = (0..2).map(|c| coeff_set.dequantized(c)).collect();
        let res = compute_residuals(frame, None, &coeffs, &model).unwrap();
        assert_eq!(res.len(), 150);

        let mut out = block.clone();
        for c in 0..2 {
            for t in 150..len {
                out.set_sample(c, t, 0);
            }
        }
        reconstruct_frame(&mut out, 150, 150, &res, None, &coeffs, &[true, true], &model)
            .unwrap();
        assert_eq!(out, block);
    }

    #[test]
    fn residuals_of_zero_signal_are_zero() {
        let block = SampleBlock::new(3, 50, 44100);
        let model = ModelSpec::joint(4, 1e-4);
        let coeffs: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..12).map(|i| (i as f64) * 0.01).collect())
            .collect();
        let res = compute_residuals(BlockView::full(&block), None, &coeffs, &model).unwrap();
        assert!((0..3).all(|c| res.channel(c).iter().all(|&e| e == 0)));
    }
}
