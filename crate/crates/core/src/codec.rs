//! Quantize, block and Huffman-encode sample sequences, and the `LAPQ`
//! container that carries the result.
//!
//! Layout (all integers big-endian):
//!
//! | bytes   | field                                   |
//! |---------|-----------------------------------------|
//! | 0..4    | magic `LAPQ`                            |
//! | 4       | format version, `1`                     |
//! | 5       | block size `M`                          |
//! | 6..14   | threshold `t1`, IEEE-754 double         |
//! | 14..22  | sample count, u64                       |
//! | 22      | pad bits in the final payload byte      |
//! | 23..27  | codebook JSON length, u32               |
//! | 27..    | codebook JSON, then payload bytes       |
//!
//! The payload is packed most significant bit first. When the sample count is
//! not a multiple of `M` the last block is completed with `Low` symbols; the
//! header keeps the true count and the decoder drops the filler.

use crate::block_code::{build_block_model, build_huffman, CodeBook, DecodeTable, Step};
use crate::error::{Error, Result};
use crate::quantizer::{QuantizerDesign, Symbol};

pub const MAGIC: &[u8; 4] = b"LAPQ";
pub const VERSION: u8 = 1;
const FIXED_HEADER_LEN: usize = 27;

/// Appends bits MSB-first into bytes.
#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    bit_len: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        let offset = (self.bit_len % 8) as u8;
        if offset == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().expect("byte pushed above") |= 0x80 >> offset;
        }
        self.bit_len += 1;
    }

    pub fn push_all(&mut self, bits: &[bool]) {
        for &b in bits {
            self.push(b);
        }
    }

    pub fn bit_len(&self) -> u64 {
        self.bit_len
    }

    /// Bytes and the number of unused bits at the end of the last byte.
    pub fn finish(self) -> (Vec<u8>, u8) {
        let pad = ((8 - self.bit_len % 8) % 8) as u8;
        (self.bytes, pad)
    }
}

/// Reads the first `bit_len` bits of a byte slice MSB-first.
#[derive(Debug)]
pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: u64,
    bit_len: u64,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8], bit_len: u64) -> Self {
        debug_assert!(bit_len <= bytes.len() as u64 * 8);
        BitReader {
            bytes,
            pos: 0,
            bit_len,
        }
    }

    #[inline]
    pub fn read(&mut self) -> Option<bool> {
        if self.pos >= self.bit_len {
            return None;
        }
        let byte = self.bytes[(self.pos / 8) as usize];
        let bit = byte & (0x80 >> (self.pos % 8)) != 0;
        self.pos += 1;
        Some(bit)
    }

    pub fn remaining(&self) -> u64 {
        self.bit_len - self.pos
    }
}

/// An encoded sample sequence with everything needed to decode it.
#[derive(Debug, Clone, PartialEq)]
pub struct BitStream {
    pub block_size: usize,
    pub t1: f64,
    pub sample_count: u64,
    pub codebook: CodeBook,
    pub payload: Vec<u8>,
    pub pad_bits: u8,
}

impl BitStream {
    /// Number of payload bits that belong to codewords.
    pub fn code_bits(&self) -> u64 {
        self.payload.len() as u64 * 8 - u64::from(self.pad_bits)
    }

    /// Code bits divided by the true (unpadded) sample count.
    pub fn bits_per_symbol(&self) -> f64 {
        self.code_bits() as f64 / self.sample_count as f64
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let json = serde_json::to_vec(&self.codebook).expect("codebook serializes");
        let mut out = Vec::with_capacity(FIXED_HEADER_LEN + json.len() + self.payload.len());
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(self.block_size as u8);
        out.extend_from_slice(&self.t1.to_be_bytes());
        out.extend_from_slice(&self.sample_count.to_be_bytes());
        out.push(self.pad_bits);
        out.extend_from_slice(&(json.len() as u32).to_be_bytes());
        out.extend_from_slice(&json);
        out.extend_from_slice(&self.payload);
        out
    }

    /// Parses and validates a container. The codebook must be exactly the
    /// one this crate builds for the header's `t1` and block size, in the
    /// exact JSON form [`BitStream::to_bytes`] writes.
    pub fn from_bytes(bytes: &[u8]) -> Result<BitStream> {
        let corrupt = |msg: &str| Error::CorruptHeader(msg.to_string());
        if bytes.len() < FIXED_HEADER_LEN {
            return Err(corrupt("shorter than the fixed header"));
        }
        if &bytes[0..4] != MAGIC {
            return Err(corrupt("bad magic"));
        }
        if bytes[4] != VERSION {
            return Err(Error::CorruptHeader(format!(
                "unsupported version {}",
                bytes[4]
            )));
        }
        let block_size = bytes[5] as usize;
        let t1 = f64::from_be_bytes(bytes[6..14].try_into().expect("8 bytes"));
        let sample_count = u64::from_be_bytes(bytes[14..22].try_into().expect("8 bytes"));
        let pad_bits = bytes[22];
        let json_len = u32::from_be_bytes(bytes[23..27].try_into().expect("4 bytes")) as usize;

        if !(t1.is_finite() && t1 >= 0.0) {
            return Err(corrupt("threshold is not a finite non-negative number"));
        }
        if sample_count == 0 {
            return Err(corrupt("zero sample count"));
        }
        if pad_bits > 7 {
            return Err(corrupt("pad bits above 7"));
        }
        let json_end = FIXED_HEADER_LEN
            .checked_add(json_len)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| corrupt("codebook length exceeds file"))?;
        let json = &bytes[FIXED_HEADER_LEN..json_end];
        let codebook: CodeBook = serde_json::from_slice(json)
            .map_err(|e| Error::CorruptHeader(format!("codebook: {e}")))?;
        if codebook.block_size != block_size {
            return Err(corrupt("codebook block size differs from header"));
        }
        let design = QuantizerDesign::from_threshold(t1)?;
        let expected =
            codebook_for(&design, block_size).map_err(|e| Error::CorruptHeader(e.to_string()))?;
        if codebook != expected {
            return Err(corrupt("codebook does not match the header threshold"));
        }
        if serde_json::to_vec(&codebook).expect("codebook serializes") != json {
            return Err(corrupt("codebook JSON is not in canonical form"));
        }
        let payload = bytes[json_end..].to_vec();
        if payload.is_empty() && pad_bits != 0 {
            return Err(corrupt("pad bits without payload"));
        }
        Ok(BitStream {
            block_size,
            t1,
            sample_count,
            codebook,
            payload,
            pad_bits,
        })
    }
}

/// The codebook used for a design at block size `m`.
pub fn codebook_for(design: &QuantizerDesign, m: usize) -> Result<CodeBook> {
    build_huffman(&build_block_model(design.p1, design.p2, m)?)
}

/// Encodes `samples` with `design` and a codebook built from it.
pub fn encode(samples: &[f64], design: &QuantizerDesign, codebook: &CodeBook) -> Result<BitStream> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = samples.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFiniteSample(i));
    }
    let reference = QuantizerDesign::from_threshold(design.t1)?;
    if codebook_for(&reference, codebook.block_size).ok().as_ref() != Some(codebook) {
        return Err(Error::CodebookMismatch);
    }

    let m = codebook.block_size;
    let mut writer = BitWriter::new();
    for chunk in samples.chunks(m) {
        let mut index = 0usize;
        for k in 0..m {
            // Tail filler is `Low`, i.e. a zero bit in the index.
            let high = chunk
                .get(k)
                .is_some_and(|&x| design.quantize(x) == Symbol::High);
            index = (index << 1) | usize::from(high);
        }
        writer.push_all(codebook.code(index).bits());
    }
    let (payload, pad_bits) = writer.finish();
    Ok(BitStream {
        block_size: m,
        t1: design.t1,
        sample_count: samples.len() as u64,
        codebook: codebook.clone(),
        payload,
        pad_bits,
    })
}

/// Decodes the symbol sequence, filler removed.
pub fn decode_symbols(stream: &BitStream) -> Result<Vec<Symbol>> {
    let table: DecodeTable = stream.codebook.decoder().map_err(Error::CorruptHeader)?;
    let m = stream.block_size;
    if m != stream.codebook.block_size || m == 0 {
        return Err(Error::CorruptHeader(
            "codebook block size differs from header".into(),
        ));
    }
    if stream.pad_bits > 7 || (stream.payload.is_empty() && stream.pad_bits > 0) {
        return Err(Error::CorruptHeader("invalid pad bit count".into()));
    }
    let n = usize::try_from(stream.sample_count)
        .map_err(|_| Error::CorruptHeader("sample count too large".into()))?;
    let expected_blocks = stream.sample_count.div_ceil(m as u64);

    let mut reader = BitReader::new(&stream.payload, stream.code_bits());
    let mut symbols = Vec::with_capacity(n);
    let mut decoded = 0u64;
    while decoded < expected_blocks {
        let mut state = 0;
        let index = loop {
            let Some(bit) = reader.read() else {
                return Err(Error::TruncatedPayload {
                    decoded,
                    expected: expected_blocks,
                });
            };
            match table.step(state, bit) {
                Step::Continue(next) => state = next,
                Step::Emit(index) => break index,
            }
        };
        for bit in (0..m).rev() {
            if symbols.len() < n {
                symbols.push(if index >> bit & 1 == 1 {
                    Symbol::High
                } else {
                    Symbol::Low
                });
            }
        }
        decoded += 1;
    }
    if reader.remaining() > 0 {
        return Err(Error::DanglingBits(reader.remaining()));
    }
    Ok(symbols)
}

/// Decodes to reconstruction levels recomputed from the header threshold.
pub fn decode(stream: &BitStream) -> Result<Vec<f64>> {
    let design = QuantizerDesign::from_threshold(stream.t1)
        .map_err(|_| Error::CorruptHeader("invalid threshold".into()))?;
    Ok(decode_symbols(stream)?
        .into_iter()
        .map(|s| design.level(s))
        .collect())
}
