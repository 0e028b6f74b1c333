//! Reading and writing 16-bit PCM RIFF/WAVE files, deinterleaving into
//! planar blocks. 5.1 input drops the LFE channel (index 3 in the standard
//! L, R, C, LFE, Ls, Rs order), yielding 5.0 as (L, R, C, Ls, Rs).

use std::fs;
use std::path::Path;

use crate::block::SampleBlock;
use crate::error::{Error, Result};

/// Facts about a parsed file: channel count as stored (before any LFE
/// drop), sample rate, bits per sample, and data length in sample frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WavInfo {
    pub channels: u16,
    pub sample_rate: u32,
    pub bits_per_sample: u16,
    pub frames: u64,
}

const PCM_FORMAT_TAG: u16 = 1;

fn wav_err(msg: impl Into<String>) -> Error {
    Error::Wav(msg.into())
}

fn read_u16(bytes: &[u8], at: usize) -> Result<u16> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes(b.try_into().unwrap()))
        .ok_or_else(|| wav_err("unexpected end of file"))
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()))
        .ok_or_else(|| wav_err("unexpected end of file"))
}

/// Reads a 16-bit PCM WAV file into a planar block. Accepts 1, 2, 5, or 6
/// channels; 6-channel (5.1) input drops the LFE.
pub fn read_wav(path: impl AsRef<Path>) -> Result<(WavInfo, SampleBlock)> {
    let bytes = fs::read(path)?;
    parse_wav(&bytes)
}

pub fn parse_wav(bytes: &[u8]) -> Result<(WavInfo, SampleBlock)> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(wav_err("not a RIFF/WAVE file"));
    }
    let mut offset = 12usize;
    let mut fmt: Option<(u16, u16, u32, u16)> = None; // tag, channels, rate, bits
    let mut data: Option<&[u8]> = None;
    while offset + 8 <= bytes.len() {
        let id = &bytes[offset..offset + 4];
        let size = read_u32(bytes, offset + 4)? as usize;
        let body_at = offset + 8;
        if body_at + size > bytes.len() {
            return Err(wav_err("chunk runs past end of file"));
        }
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(wav_err("fmt chunk too short"));
                }
                fmt = Some((
                    read_u16(bytes, body_at)?,
                    read_u16(bytes, body_at + 2)?,
                    read_u32(bytes, body_at + 4)?,
                    read_u16(bytes, body_at + 14)?,
                ));
            }
            b"data" => {
                data = Some(&bytes[body_at..body_at + size]);
            }
            _ => {}
        }
        // Chunks are word-aligned; odd sizes carry a pad byte.
        offset = body_at + size + (size & 1);
    }
    let (tag, channels, sample_rate, bits) = fmt.ok_or_else(|| wav_err("missing fmt chunk"))?;
    let data = data.ok_or_else(|| wav_err("missing data chunk"))?;
    if tag != PCM_FORMAT_TAG {
        return Err(wav_err(format!("unsupported format tag {tag} (PCM only)")));
    }
    if bits != 16 {
        return Err(wav_err(format!("unsupported bit depth {bits} (16 only)")));
    }
    if !matches!(channels, 1 | 2 | 5 | 6) {
        return Err(wav_err(format!(
            "unsupported channel count {channels} (1, 2, 5, or 6)"
        )));
    }
    let frame_bytes = 2 * channels as usize;
    if data.len() % frame_bytes != 0 {
        return Err(wav_err("data chunk is not a whole number of frames"));
    }
    let frames = data.len() / frame_bytes;
    let info = WavInfo {
        channels,
        sample_rate,
        bits_per_sample: bits,
        frames: frames as u64,
    };

    // Deinterleave, dropping LFE (stored index 3) for 5.1 input.
    let kept: Vec<usize> = match channels {
        6 => vec![0, 1, 2, 4, 5],
        n => (0..n as usize).collect(),
    };
    let mut planar = vec![0i16; kept.len() * frames];
    for (out_c, &in_c) in kept.iter().enumerate() {
        let row = &mut planar[out_c * frames..(out_c + 1) * frames];
        for (t, slot) in row.iter_mut().enumerate() {
            let at = t * frame_bytes + 2 * in_c;
            *slot = i16::from_le_bytes([data[at], data[at + 1]]);
        }
    }
    let block = SampleBlock::from_planar(kept.len(), frames, sample_rate, planar)?;
    Ok((info, block))
}

/// Writes a block as a 16-bit PCM WAV file, interleaving the channels in
/// block order (5.0 blocks come out as L, R, C, Ls, Rs).
pub fn write_wav(path: impl AsRef<Path>, block: &SampleBlock) -> Result<()> {
    fs::write(path, render_wav(block))?;
    Ok(())
}

pub fn render_wav(block: &SampleBlock) -> Vec<u8> {
    let channels = block.channels();
    let frames = block.len();
    let data_bytes = 2 * channels * frames;
    let mut out = Vec::with_capacity(44 + data_bytes);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_bytes) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&PCM_FORMAT_TAG.to_le_bytes());
    out.extend_from_slice(&(channels as u16).to_le_bytes());
    out.extend_from_slice(&block.sample_rate().to_le_bytes());
    let byte_rate = block.sample_rate() * 2 * channels as u32;
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&(2 * channels as u16).to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_bytes as u32).to_le_bytes());
    for t in 0..frames {
        for c in 0..channels {
            out.extend_from_slice(&block.sample(c, t).to_le_bytes());
        }
    }
    out
}
