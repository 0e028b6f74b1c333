//! Fundamental audio types: planar 16-bit sample blocks, channel layouts,
//! integer/normalized-float conversion, the ITU 5.0-to-2.0 downmix, and the
//! compression-ratio metric.

use crate::error::{Error, Result};

/// Channel layouts understood by the container.
///
/// The 5.0 channel order is fixed as (L, R, C, Ls, Rs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelLayout {
    Mono,
    Stereo,
    Surround5_0,
}

impl ChannelLayout {
    pub fn channels(self) -> usize {
        match self {
            ChannelLayout::Mono => 1,
            ChannelLayout::Stereo => 2,
            ChannelLayout::Surround5_0 => 5,
        }
    }

    pub fn from_channels(channels: usize) -> Option<ChannelLayout> {
        match channels {
            1 => Some(ChannelLayout::Mono),
            2 => Some(ChannelLayout::Stereo),
            5 => Some(ChannelLayout::Surround5_0),
            _ => None,
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            ChannelLayout::Mono => 0,
            ChannelLayout::Stereo => 1,
            ChannelLayout::Surround5_0 => 2,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<ChannelLayout> {
        match tag {
            0 => Some(ChannelLayout::Mono),
            1 => Some(ChannelLayout::Stereo),
            2 => Some(ChannelLayout::Surround5_0),
            _ => None,
        }
    }
}

/// Planar 16-bit integer PCM: `channels` rows of `len` samples, channel-major.
///
/// Immutable by convention once filled; the decoder is the only writer and
/// owns its block exclusively while reconstructing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBlock {
    channels: usize,
    len: usize,
    sample_rate: u32,
    data: Vec<i16>,
}

impl SampleBlock {
    /// An all-zero block.
    pub fn new(channels: usize, len: usize, sample_rate: u32) -> SampleBlock {
        assert!(channels >= 1, "a block needs at least one channel");
        SampleBlock {
            channels,
            len,
            sample_rate,
            data: vec![0; channels * len],
        }
    }

    /// Wraps planar channel-major data; `data.len()` must equal `channels * len`.
    pub fn from_planar(
        channels: usize,
        len: usize,
        sample_rate: u32,
        data: Vec<i16>,
    ) -> Result<SampleBlock> {
        if channels < 1 {
            return Err(Error::shape("a block needs at least one channel"));
        }
        if data.len() != channels * len {
            return Err(Error::shape(format!(
                "planar data length {} does not match {} channels x {} samples",
                data.len(),
                channels,
                len
            )));
        }
        Ok(SampleBlock {
            channels,
            len,
            sample_rate,
            data,
        })
    }

    /// Builds a block from per-channel slices of equal length.
    pub fn from_channels(sample_rate: u32, channels: &[&[i16]]) -> Result<SampleBlock> {
        if channels.is_empty() {
            return Err(Error::shape("a block needs at least one channel"));
        }
        let len = channels[0].len();
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::shape("channel lengths differ"));
        }
        let mut data = Vec::with_capacity(channels.len() * len);
        for ch in channels {
            data.extend_from_slice(ch);
        }
        Ok(SampleBlock {
            channels: channels.len(),
            len,
            sample_rate,
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

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn layout(&self) -> Option<ChannelLayout> {
        ChannelLayout::from_channels(self.channels)
    }

    pub fn channel(&self, c: usize) -> &[i16] {
        &self.data[c * self.len..(c + 1) * self.len]
    }

    pub fn sample(&self, c: usize, t: usize) -> i16 {
        self.data[c * self.len + t]
    }

    pub fn set_sample(&mut self, c: usize, t: usize, value: i16) {
        self.data[c * self.len + t] = value;
    }

    /// Raw bit count of the 16-bit representation.
    pub fn raw_bits(&self) -> u64 {
        16 * self.channels as u64 * self.len as u64
    }
}

/// Borrowed view of a contiguous time range of a block. `sample` indexes
/// relative to the view start; `before` reads samples preceding it, which is
/// how lagged prediction context crosses a frame boundary.
#[derive(Clone, Copy)]
pub struct BlockView<'a> {
    block: &'a SampleBlock,
    start: usize,
    len: usize,
}

impl<'a> BlockView<'a> {
    pub fn full(block: &'a SampleBlock) -> BlockView<'a> {
        BlockView {
            block,
            start: 0,
            len: block.len(),
        }
    }

    pub fn range(block: &'a SampleBlock, start: usize, len: usize) -> BlockView<'a> {
        assert!(start + len <= block.len(), "view out of range");
        BlockView { block, start, len }
    }

    pub fn channels(&self) -> usize {
        self.block.channels()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn sample(&self, c: usize, t: usize) -> i16 {
        debug_assert!(t < self.len);
        self.block.sample(c, self.start + t)
    }

    /// Sample `k >= 1` steps before the view start.
    pub fn before(&self, c: usize, k: usize) -> i16 {
        debug_assert!(k >= 1 && k <= self.start);
        self.block.sample(c, self.start - k)
    }

    /// Number of samples available before the view start.
    pub fn preceding(&self) -> usize {
        self.start
    }
}

/// A downmix/upmix pair of equal length and sample rate; the downmix is the
/// lower mix in the hierarchy.
#[derive(Debug, Clone)]
pub struct MixPair {
    pub downmix: SampleBlock,
    pub upmix: SampleBlock,
}

impl MixPair {
    pub fn new(downmix: SampleBlock, upmix: SampleBlock) -> Result<MixPair> {
        if downmix.len() != upmix.len() {
            return Err(Error::shape(format!(
                "downmix length {} != upmix length {}",
                downmix.len(),
                upmix.len()
            )));
        }
        if downmix.sample_rate() != upmix.sample_rate() {
            return Err(Error::shape("downmix and upmix sample rates differ"));
        }
        Ok(MixPair { downmix, upmix })
    }
}

/// Sample scale: 16-bit integers map to [-1, 1) by exact division by 32768.
pub const SAMPLE_SCALE: f64 = 32768.0;

/// Maps a 16-bit sample to [-1, 1). Exact: division by a power of two.
#[inline]
pub fn normalize(sample: i16) -> f64 {
    f64::from(sample) / SAMPLE_SCALE
}

/// Rounds half away from zero: sign(x) * floor(|x| + 0.5), clamped to the
/// 32-bit signed range. The one rounding convention mirrored by encoder and
/// decoder everywhere integers are produced from floats. `f64::round` is
/// exactly this convention, without the double-rounding artifact of a
/// literal `|x| + 0.5`.
#[inline]
pub fn round_half_away(x: f64) -> i32 {
    let v = x.round();
    if v <= f64::from(i32::MIN) {
        i32::MIN
    } else if v >= f64::from(i32::MAX) {
        i32::MAX
    } else {
        v as i32
    }
}

/// Center/surround gain of the ITU-R BS.775 downmix: 1/sqrt(2).
pub const ITU_SURROUND_GAIN: f64 = 0.707_106_781_186_547_52;

/// ITU 5.0 -> 2.0 stereo downmix with sum normalization so the output never
/// leaves the 16-bit range:
///   Lo = g * (L + a*C + a*Ls),  Ro = g * (R + a*C + a*Rs),  g = 1/(1+2a).
pub fn itu_downmix_5to2(upmix: &SampleBlock) -> Result<SampleBlock> {
    if upmix.layout() != Some(ChannelLayout::Surround5_0) {
        return Err(Error::shape(format!(
            "ITU 5.0->2.0 downmix needs a 5-channel block, got {}",
            upmix.channels()
        )));
    }
    let a = ITU_SURROUND_GAIN;
    let g = 1.0 / (1.0 + 2.0 * a);
    let n = upmix.len();
    let (l, r, c, ls, rs) = (
        upmix.channel(0),
        upmix.channel(1),
        upmix.channel(2),
        upmix.channel(3),
        upmix.channel(4),
    );
    let mut data = vec![0i16; 2 * n];
    let (lo, ro) = data.split_at_mut(n);
    for t in 0..n {
        let center = a * f64::from(c[t]);
        let left = g * (f64::from(l[t]) + center + a * f64::from(ls[t]));
        let right = g * (f64::from(r[t]) + center + a * f64::from(rs[t]));
        lo[t] = round_half_away(left.clamp(-32768.0, 32767.0)) as i16;
        ro[t] = round_half_away(right.clamp(-32768.0, 32767.0)) as i16;
    }
    SampleBlock::from_planar(2, n, upmix.sample_rate(), data)
}

/// Compressed bits divided by the bits of the raw 16-bit representation.
pub fn compression_ratio(compressed_bits: u64, original: &SampleBlock) -> Result<f64> {
    if original.is_empty() {
        return Err(Error::Empty("compression ratio of a zero-length block"));
    }
    Ok(compressed_bits as f64 / original.raw_bits() as f64)
}
