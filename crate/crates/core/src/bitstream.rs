//! Container format: fixed little-endian header followed by packed codes.
//!
//! Payload codes are band-interleaved per frame (all L codes of a frame, then
//! its H codes), each stored MSB-first as `code + 2^(nq-1)` in `nq` bits. The
//! last byte is zero-padded.

use crate::adpcm::PredictorKind;
use crate::error::{Error, Result};
use crate::quantizer::{check_bits, half_levels};

pub const MAGIC: [u8; 4] = *b"SBQM";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Header {
    pub predictor: PredictorKind,
    pub nq_low: u8,
    pub nq_high: u8,
    pub frame_length: u16,
    pub num_input_samples: u32,
    pub seed_base: u64,
}

impl Header {
    /// Samples per band: `ceil(num_input_samples / 2)`.
    pub fn band_len(&self) -> usize {
        (self.num_input_samples as usize).div_ceil(2)
    }

    pub fn payload_bits(&self) -> usize {
        self.band_len() * usize::from(self.nq_low + self.nq_high)
    }

    pub fn payload_bytes(&self) -> usize {
        self.payload_bits().div_ceil(8)
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut b = [0u8; HEADER_LEN];
        b[0..4].copy_from_slice(&MAGIC);
        b[4] = VERSION;
        b[5] = self.predictor.to_u8();
        b[6] = self.nq_low;
        b[7] = self.nq_high;
        b[8..10].copy_from_slice(&self.frame_length.to_le_bytes());
        b[10..14].copy_from_slice(&self.num_input_samples.to_le_bytes());
        b[14..22].copy_from_slice(&self.seed_base.to_le_bytes());
        b
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Corrupt(format!(
                "header needs {HEADER_LEN} bytes, got {}",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::Corrupt("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::Corrupt(format!("unsupported version {}", bytes[4])));
        }
        let predictor = PredictorKind::from_u8(bytes[5])
            .ok_or_else(|| Error::Corrupt(format!("unknown predictor id {}", bytes[5])))?;
        let header = Self {
            predictor,
            nq_low: bytes[6],
            nq_high: bytes[7],
            frame_length: u16::from_le_bytes([bytes[8], bytes[9]]),
            num_input_samples: u32::from_le_bytes(bytes[10..14].try_into().unwrap()),
            seed_base: u64::from_le_bytes(bytes[14..22].try_into().unwrap()),
        };
        check_bits(header.nq_low).map_err(|e| Error::Corrupt(e.to_string()))?;
        check_bits(header.nq_high).map_err(|e| Error::Corrupt(e.to_string()))?;
        if header.frame_length == 0 {
            return Err(Error::Corrupt("zero frame length".into()));
        }
        Ok(header)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitstream {
    pub header: Header,
    pub low: Vec<i32>,
    pub high: Vec<i32>,
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    nbits: u32,
}

impl BitWriter {
    fn new() -> Self {
        Self {
            bytes: Vec::new(),
            acc: 0,
            nbits: 0,
        }
    }

    fn put(&mut self, value: u32, bits: u32) {
        self.acc = (self.acc << bits) | u64::from(value);
        self.nbits += bits;
        while self.nbits >= 8 {
            self.nbits -= 8;
            self.bytes.push((self.acc >> self.nbits) as u8);
        }
        self.acc &= (1u64 << self.nbits) - 1;
    }

    fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            self.bytes.push((self.acc << (8 - self.nbits)) as u8);
        }
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn get(&mut self, bits: u32) -> u32 {
        let mut v = 0u32;
        for _ in 0..bits {
            let bit = (self.bytes[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            v = (v << 1) | u32::from(bit);
            self.pos += 1;
        }
        v
    }
}

impl Bitstream {
    pub fn new(header: Header, low: Vec<i32>, high: Vec<i32>) -> Result<Self> {
        let n = header.band_len();
        if low.len() != n || high.len() != n {
            return Err(Error::LengthMismatch {
                left: low.len(),
                right: high.len(),
            });
        }
        for (codes, nq) in [(&low, header.nq_low), (&high, header.nq_high)] {
            let half = half_levels(nq);
            if let Some(&code) = codes.iter().find(|&&c| c < -half || c >= half) {
                return Err(Error::CodeRange { code, nq });
            }
        }
        Ok(Self { header, low, high })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let frame = usize::from(h.frame_length);
        let mut w = BitWriter::new();
        let (ol, oh) = (half_levels(h.nq_low), half_levels(h.nq_high));
        for start in (0..h.band_len()).step_by(frame) {
            let end = (start + frame).min(h.band_len());
            for &c in &self.low[start..end] {
                w.put((c + ol) as u32, u32::from(h.nq_low));
            }
            for &c in &self.high[start..end] {
                w.put((c + oh) as u32, u32::from(h.nq_high));
            }
        }
        let mut out = h.to_bytes().to_vec();
        out.extend(w.finish());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = Header::parse(bytes)?;
        let payload = &bytes[HEADER_LEN..];
        let expected = header.payload_bytes();
        if payload.len() < expected {
            return Err(Error::Corrupt(format!(
                "truncated payload: {} of {expected} bytes",
                payload.len()
            )));
        }
        if payload.len() > expected {
            return Err(Error::Corrupt(format!(
                "{} trailing bytes after payload",
                payload.len() - expected
            )));
        }
        let n = header.band_len();
        let frame = usize::from(header.frame_length);
        let (ol, oh) = (half_levels(header.nq_low), half_levels(header.nq_high));
        let mut r = BitReader { bytes: payload, pos: 0 };
        let mut low = Vec::with_capacity(n);
        let mut high = Vec::with_capacity(n);
        for start in (0..n).step_by(frame) {
            let len = frame.min(n - start);
            for _ in 0..len {
                low.push(r.get(u32::from(header.nq_low)) as i32 - ol);
            }
            for _ in 0..len {
                high.push(r.get(u32::from(header.nq_high)) as i32 - oh);
            }
        }
        Ok(Self { header, low, high })
    }
}
