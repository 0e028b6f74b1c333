//! Bit-level I/O, most-significant-bit first within bytes, with byte-aligned
//! finalization. Unary runs get a byte fast path because Rice coding at small
//! parameters can emit very long runs.

use crate::error::{Error, Result};

/// Accumulates bits MSB-first into a byte buffer.
#[derive(Debug, Default)]
pub struct BitSink {
    bytes: Vec<u8>,
    cur: u8,
    cur_bits: u8,
}

impl BitSink {
    pub fn new() -> BitSink {
        BitSink::default()
    }

    /// Total bits written so far.
    pub fn bit_len(&self) -> u64 {
        self.bytes.len() as u64 * 8 + u64::from(self.cur_bits)
    }

    pub fn write_bit(&mut self, bit: bool) {
        if bit {
            self.cur |= 1 << (7 - self.cur_bits);
        }
        self.cur_bits += 1;
        if self.cur_bits == 8 {
            self.bytes.push(self.cur);
            self.cur = 0;
            self.cur_bits = 0;
        }
    }

    /// Writes the low `n` bits of `value`, MSB-first. `n <= 64`.
    pub fn write_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        for i in (0..n).rev() {
            self.write_bit((value >> i) & 1 == 1);
        }
    }

    /// `run` one-bits followed by a terminating zero-bit.
    pub fn write_unary(&mut self, mut run: u64) {
        loop {
            if run >= 8 && self.cur_bits == 0 {
                self.bytes.push(0xFF);
                run -= 8;
            } else if run > 0 {
                self.write_bit(true);
                run -= 1;
            } else {
                self.write_bit(false);
                return;
            }
        }
    }

    /// Pads with zero bits to the next byte boundary.
    pub fn align_to_byte(&mut self) {
        if self.cur_bits > 0 {
            self.bytes.push(self.cur);
            self.cur = 0;
            self.cur_bits = 0;
        }
    }

    /// Finalizes (zero-padding to a byte boundary) and returns the bytes.
    pub fn into_bytes(mut self) -> Vec<u8> {
        self.align_to_byte();
        self.bytes
    }

    pub fn clear(&mut self) {
        self.bytes.clear();
        self.cur = 0;
        self.cur_bits = 0;
    }
}

/// Reads bits MSB-first from a byte slice; running past the end is an error.
#[derive(Debug)]
pub struct BitSource<'a> {
    bytes: &'a [u8],
    byte_pos: usize,
    bit_pos: u8,
}

impl<'a> BitSource<'a> {
    pub fn new(bytes: &'a [u8]) -> BitSource<'a> {
        BitSource {
            bytes,
            byte_pos: 0,
            bit_pos: 0,
        }
    }

    /// Total bits consumed so far.
    pub fn bits_consumed(&self) -> u64 {
        self.byte_pos as u64 * 8 + u64::from(self.bit_pos)
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let Some(&byte) = self.bytes.get(self.byte_pos) else {
            return Err(Error::stream("bit source exhausted"));
        };
        let bit = (byte >> (7 - self.bit_pos)) & 1 == 1;
        self.bit_pos += 1;
        if self.bit_pos == 8 {
            self.bit_pos = 0;
            self.byte_pos += 1;
        }
        Ok(bit)
    }

    /// Reads `n <= 64` bits MSB-first.
    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        debug_assert!(n <= 64);
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Ok(v)
    }

    /// Counts one-bits until a terminating zero-bit.
    pub fn read_unary(&mut self) -> Result<u64> {
        let mut run = 0u64;
        loop {
            if self.bit_pos == 0 {
                match self.bytes.get(self.byte_pos) {
                    Some(0xFF) => {
                        run += 8;
                        self.byte_pos += 1;
                        continue;
                    }
                    Some(_) => {}
                    None => return Err(Error::stream("bit source exhausted in unary run")),
                }
            }
            if self.read_bit()? {
                run += 1;
            } else {
                return Ok(run);
            }
        }
    }

    /// Skips to the next byte boundary, requiring the padding bits to be zero.
    pub fn align_to_byte(&mut self) -> Result<()> {
        while self.bit_pos != 0 {
            if self.read_bit()? {
                return Err(Error::stream("nonzero padding bits"));
            }
        }
        Ok(())
    }
}
