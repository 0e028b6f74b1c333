//! The serialized stream: a header describing every mix, followed by
//! frame-interleaved chunks in hierarchy order (lowest mix first within each
//! frame index), each chunk prefixed with its 32-bit byte length. Decoding a
//! frame of a higher mix therefore always has the same frame of its downmix
//! already reconstructed.

use crate::block::{compression_ratio, ChannelLayout, MixPair, SampleBlock};
use crate::codec::{decode_frame, encode_frame, frame_bounds, ChunkStats, MixConfig};
use crate::error::{Error, Result};
use crate::solver::{ModelKind, ModelSpec};

pub const MAGIC: [u8; 4] = *b"MLC1";
pub const FORMAT_VERSION: u8 = 1;
const BIT_DEPTH: u8 = 16;
const MIX_RECORD_BYTES: usize = 13;

/// One mix's layout and coding configuration as recorded in the header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixDescriptor {
    pub layout: ChannelLayout,
    pub config: MixConfig,
}

/// Everything needed to decode the chunks that follow.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainerHeader {
    pub sample_rate: u32,
    pub frame_size: usize,
    pub total_samples: u64,
    pub mixes: Vec<MixDescriptor>,
}

impl ContainerHeader {
    pub fn frame_count(&self) -> u64 {
        self.total_samples.div_ceil(self.frame_size as u64)
    }

    fn write_to(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&self.sample_rate.to_le_bytes());
        out.push(BIT_DEPTH);
        out.extend_from_slice(&(self.frame_size as u32).to_le_bytes());
        out.extend_from_slice(&self.total_samples.to_le_bytes());
        out.push(self.mixes.len() as u8);
        for mix in &self.mixes {
            out.push(mix.layout.tag());
            out.push(mix.config.model.kind().tag());
            out.push(mix.config.model.order() as u8);
            out.push(mix.config.model.downmix_channels() as u8);
            out.extend_from_slice(&mix.config.model.delta().to_le_bytes());
            out.push(u8::from(mix.config.svd));
        }
    }

    fn parse(bytes: &[u8]) -> Result<(ContainerHeader, usize)> {
        let fixed = 4 + 1 + 4 + 1 + 4 + 8 + 1;
        if bytes.len() < fixed {
            return Err(Error::stream("truncated header"));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::stream("bad magic"));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(Error::stream(format!("unsupported version {}", bytes[4])));
        }
        let sample_rate = u32::from_le_bytes(bytes[5..9].try_into().unwrap());
        if bytes[9] != BIT_DEPTH {
            return Err(Error::stream(format!("unsupported bit depth {}", bytes[9])));
        }
        let frame_size = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
        if frame_size == 0 {
            return Err(Error::stream("zero frame size"));
        }
        let total_samples = u64::from_le_bytes(bytes[14..22].try_into().unwrap());
        let mix_count = bytes[22] as usize;
        if mix_count == 0 {
            return Err(Error::stream("stream with no mixes"));
        }
        let mut offset = fixed;
        let mut mixes = Vec::with_capacity(mix_count);
        for _ in 0..mix_count {
            if bytes.len() < offset + MIX_RECORD_BYTES {
                return Err(Error::stream("truncated mix record"));
            }
            let rec = &bytes[offset..offset + MIX_RECORD_BYTES];
            let layout = ChannelLayout::from_tag(rec[0])
                .ok_or_else(|| Error::stream(format!("unknown layout tag {}", rec[0])))?;
            let kind = ModelKind::from_tag(rec[1])
                .ok_or_else(|| Error::stream(format!("unknown model tag {}", rec[1])))?;
            let delta = f64::from_le_bytes(rec[4..12].try_into().unwrap());
            let model = ModelSpec::new(kind, rec[2] as usize, rec[3] as usize, delta)
                .map_err(|e| Error::stream(format!("invalid model in header: {e}")))?;
            let svd = match rec[12] {
                0 => false,
                1 => true,
                other => {
                    return Err(Error::stream(format!("invalid svd flag {other}")));
                }
            };
            mixes.push(MixDescriptor {
                layout,
                config: MixConfig::new(model, svd),
            });
            offset += MIX_RECORD_BYTES;
        }
        let header = ContainerHeader {
            sample_rate,
            frame_size,
            total_samples,
            mixes,
        };
        validate_hierarchy(&header)?;
        Ok((header, offset))
    }
}

fn validate_hierarchy(header: &ContainerHeader) -> Result<()> {
    for (i, mix) in header.mixes.iter().enumerate() {
        let model = &mix.config.model;
        if model.order() > header.frame_size {
            return Err(Error::config(format!(
                "order {} exceeds frame size {}",
                model.order(),
                header.frame_size
            )));
        }
        if model.kind().uses_downmix() {
            if i == 0 {
                return Err(Error::config(
                    "the lowest mix cannot use a downmix-predicted model",
                ));
            }
            let below = header.mixes[i - 1].layout.channels();
            if model.downmix_channels() != below {
                return Err(Error::config(format!(
                    "mix {i} predicts from {} downmix channels but the mix below has {below}",
                    model.downmix_channels()
                )));
            }
        }
    }
    Ok(())
}

/// Bit accounting of an encoded stream: header plus per-mix chunk bits
/// (length prefixes included with their chunks).
#[derive(Debug, Clone)]
pub struct EncodeStats {
    pub header_bits: u64,
    pub mix_bits: Vec<u64>,
}

impl EncodeStats {
    pub fn total_bits(&self) -> u64 {
        self.header_bits + self.mix_bits.iter().sum::<u64>()
    }
}

fn check_mixes(mixes: &[&SampleBlock], configs: &[MixConfig], frame_size: usize) -> Result<ContainerHeader> {
    if mixes.is_empty() {
        return Err(Error::config("a container needs at least one mix"));
    }
    if mixes.len() != configs.len() {
        return Err(Error::config("one coding config per mix is required"));
    }
    if mixes.len() > 255 {
        return Err(Error::config("at most 255 mixes"));
    }
    let len = mixes[0].len();
    let rate = mixes[0].sample_rate();
    let mut descriptors = Vec::with_capacity(mixes.len());
    for (i, mix) in mixes.iter().enumerate() {
        if mix.len() != len {
            return Err(Error::shape(format!(
                "mix {i} has {} samples, mix 0 has {len}",
                mix.len()
            )));
        }
        if mix.sample_rate() != rate {
            return Err(Error::shape("mixes have different sample rates"));
        }
        let layout = mix.layout().ok_or_else(|| {
            Error::config(format!(
                "no layout for a {}-channel mix (supported: 1, 2, 5)",
                mix.channels()
            ))
        })?;
        descriptors.push(MixDescriptor {
            layout,
            config: configs[i],
        });
    }
    let header = ContainerHeader {
        sample_rate: rate,
        frame_size,
        total_samples: len as u64,
        mixes: descriptors,
    };
    validate_hierarchy(&header)?;
    Ok(header)
}

/// Encodes an ordered mix list (lowest mix first) into a self-delimiting
/// stream, returning the bytes and their bit accounting.
pub fn encode_container_with_stats(
    mixes: &[&SampleBlock],
    configs: &[MixConfig],
    frame_size: usize,
) -> Result<(Vec<u8>, EncodeStats)> {
    let header = check_mixes(mixes, configs, frame_size)?;
    let mut out = Vec::new();
    header.write_to(&mut out);
    let mut stats = EncodeStats {
        header_bits: out.len() as u64 * 8,
        mix_bits: vec![0; mixes.len()],
    };
    for k in 0..header.frame_count() {
        for (i, mix) in mixes.iter().enumerate() {
            let downmix = header.mixes[i]
                .config
                .model
                .kind()
                .uses_downmix()
                .then(|| mixes[i - 1]);
            let chunk = encode_frame(mix, downmix, k as usize, frame_size, &configs[i])
                .map_err(|e| e.at_frame(k))?;
            out.extend_from_slice(&(chunk.len() as u32).to_le_bytes());
            out.extend_from_slice(&chunk);
            stats.mix_bits[i] += (4 + chunk.len() as u64) * 8;
        }
    }
    Ok((out, stats))
}

pub fn encode_container(
    mixes: &[&SampleBlock],
    configs: &[MixConfig],
    frame_size: usize,
) -> Result<Vec<u8>> {
    encode_container_with_stats(mixes, configs, frame_size).map(|(bytes, _)| bytes)
}

/// Decodes a stream back into its mixes, lowest first, bit-exactly.
pub fn decode_container(bytes: &[u8]) -> Result<(ContainerHeader, Vec<SampleBlock>)> {
    let (header, mut offset) = ContainerHeader::parse(bytes)?;
    let total = header.total_samples as usize;
    let mut blocks: Vec<SampleBlock> = header
        .mixes
        .iter()
        .map(|m| SampleBlock::new(m.layout.channels(), total, header.sample_rate))
        .collect();
    for k in 0..header.frame_count() {
        for i in 0..blocks.len() {
            if bytes.len() < offset + 4 {
                return Err(Error::stream("truncated chunk length").at_frame(k));
            }
            let len = u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap()) as usize;
            offset += 4;
            if bytes.len() < offset + len {
                return Err(Error::stream("truncated chunk").at_frame(k));
            }
            let chunk = &bytes[offset..offset + len];
            offset += len;
            let config = header.mixes[i].config;
            let (before, rest) = blocks.split_at_mut(i);
            let downmix = config
                .model
                .kind()
                .uses_downmix()
                .then(|| &before[i - 1] as &SampleBlock);
            decode_frame(chunk, &mut rest[0], downmix, k as usize, header.frame_size, &config)
                .map_err(|e| e.at_frame(k))?;
        }
    }
    if offset != bytes.len() {
        return Err(Error::stream(format!(
            "{} trailing bytes after the last chunk",
            bytes.len() - offset
        )));
    }
    Ok((header, blocks))
}

/// Decodes only the chunk structure of one mix, returning per-frame stats
/// without reconstructing other mixes more than necessary. Used for stream
/// inspection and overhead accounting.
pub fn inspect_mix(bytes: &[u8], mix_index: usize) -> Result<Vec<ChunkStats>> {
    let (header, mut offset) = ContainerHeader::parse(bytes)?;
    if mix_index >= header.mixes.len() {
        return Err(Error::config(format!("stream has no mix {mix_index}")));
    }
    let total = header.total_samples as usize;
    let mut blocks: Vec<SampleBlock> = header
        .mixes
        .iter()
        .map(|m| SampleBlock::new(m.layout.channels(), total, header.sample_rate))
        .collect();
    let mut stats = Vec::new();
    for k in 0..header.frame_count() {
        for i in 0..blocks.len() {
            if bytes.len() < offset + 4 {
                return Err(Error::stream("truncated chunk length").at_frame(k));
            }
            let len = u32::from_le_bytes(bytes[offset..offset + 4].try_into().unwrap()) as usize;
            offset += 4;
            if bytes.len() < offset + len {
                return Err(Error::stream("truncated chunk").at_frame(k));
            }
            let chunk = &bytes[offset..offset + len];
            offset += len;
            let config = header.mixes[i].config;
            let (before, rest) = blocks.split_at_mut(i);
            let downmix = config
                .model
                .kind()
                .uses_downmix()
                .then(|| &before[i - 1] as &SampleBlock);
            let s = decode_frame(chunk, &mut rest[0], downmix, k as usize, header.frame_size, &config)
                .map_err(|e| e.at_frame(k))?;
            if i == mix_index {
                stats.push(s);
            }
        }
    }
    Ok(stats)
}

/// Knobs for the model comparison; defaults follow the frame pipeline's.
#[derive(Debug, Clone, Copy)]
pub struct MeasureParams {
    pub frame_size: usize,
    pub order: usize,
    pub delta: f64,
}

impl Default for MeasureParams {
    fn default() -> MeasureParams {
        MeasureParams {
            frame_size: crate::codec::DEFAULT_FRAME_SIZE,
            order: crate::solver::DEFAULT_ORDER,
            delta: crate::solver::DEFAULT_DELTA,
        }
    }
}

/// Ratios for one upmix coding configuration: the upmix alone and the total
/// for sending both mixes.
#[derive(Debug, Clone, Copy)]
pub struct ConfigMeasurement {
    pub name: &'static str,
    pub upmix_ratio: f64,
    pub total_ratio: f64,
}

/// The fixed comparison matrix: upmix model configurations in the order of
/// the baseline-to-hierarchical comparison, each evaluated on a container
/// holding the stereo downmix (always coded separate-channel) plus the
/// upmix.
pub const MEASURE_CONFIG_NAMES: [&str; 6] = [
    "sep",
    "joint",
    "joint+svd",
    "sep-dmx+svd",
    "joint-dmx",
    "joint-dmx+svd",
];

pub fn measure(pair: &MixPair, params: &MeasureParams) -> Result<Vec<ConfigMeasurement>> {
    let d = pair.downmix.channels();
    let p = params.order;
    let delta = params.delta;
    let configs: [(&'static str, MixConfig); 6] = [
        ("sep", MixConfig::new(ModelSpec::sep(p), false)),
        ("joint", MixConfig::new(ModelSpec::joint(p, delta), false)),
        ("joint+svd", MixConfig::new(ModelSpec::joint(p, delta), true)),
        (
            "sep-dmx+svd",
            MixConfig::new(ModelSpec::sep_dmx(p, d, delta), true),
        ),
        (
            "joint-dmx",
            MixConfig::new(ModelSpec::joint_dmx(p, d, delta), false),
        ),
        (
            "joint-dmx+svd",
            MixConfig::new(ModelSpec::joint_dmx(p, d, delta), true),
        ),
    ];
    let downmix_config = MixConfig::new(ModelSpec::sep(p), false);
    let raw_total = pair.downmix.raw_bits() + pair.upmix.raw_bits();
    let mut out = Vec::with_capacity(configs.len());
    for (name, config) in configs {
        let (_, stats) = encode_container_with_stats(
            &[&pair.downmix, &pair.upmix],
            &[downmix_config, config],
            params.frame_size,
        )?;
        out.push(ConfigMeasurement {
            name,
            upmix_ratio: compression_ratio(stats.mix_bits[1], &pair.upmix)?,
            total_ratio: stats.total_bits() as f64 / raw_total as f64,
        });
    }
    Ok(out)
}

/// Frame count / bounds helper re-exported for stream tooling.
pub fn frame_range(total: usize, index: usize, frame_size: usize) -> (usize, usize) {
    frame_bounds(total, index, frame_size)
}
