//! Binary framing of per-node feature frames sent to the access point.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! "CSFF" | version u8 | node_id u16 | frame_index u32 | feature_count u8 |
//! features f32 * count | energy f32 | entropy_neg f32 | crc32 u32
//! ```
//!
//! The CRC-32 (reflected, polynomial 0xEDB88320) covers every byte between
//! the magic and the checksum. A `.csff` file is a plain concatenation of
//! frames.

use std::fs;
use std::path::Path;

use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"CSFF";
pub const VERSION: u8 = 0x01;
/// Bytes of a frame without feature payload.
pub const OVERHEAD: usize = 4 + 1 + 2 + 4 + 1 + 4 + 4 + 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0:#04x}")]
    BadVersion(u8),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    BadCrc { stored: u32, computed: u32 },
    #[error("truncated frame: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("feature_count {declared} does not match {actual} feature values")]
    CountMismatch { declared: u8, actual: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWireFrame {
    pub node_id: u16,
    pub frame_index: u32,
    pub feature_count: u8,
    pub features: Vec<f32>,
    pub energy: f32,
    pub entropy_neg: f32,
}

impl FeatureWireFrame {
    pub fn new(
        node_id: u16,
        frame_index: u32,
        features: Vec<f32>,
        energy: f32,
        entropy_neg: f32,
    ) -> Self {
        Self {
            node_id,
            frame_index,
            feature_count: features.len().min(u8::MAX as usize) as u8,
            features,
            energy,
            entropy_neg,
        }
    }

    pub fn from_feature_frame(
        node_id: u16,
        frame_index: u32,
        frame: &crate::features::FeatureFrame,
    ) -> Self {
        Self::new(
            node_id,
            frame_index,
            frame.values.iter().map(|&v| v as f32).collect(),
            frame.energy as f32,
            frame.entropy_neg as f32,
        )
    }

    pub fn to_feature_frame(&self) -> crate::features::FeatureFrame {
        crate::features::FeatureFrame {
            values: self.features.iter().map(|&v| v as f64).collect(),
            energy: self.energy as f64,
            entropy_neg: self.entropy_neg as f64,
        }
    }

    pub fn encoded_len(&self) -> usize {
        OVERHEAD + 4 * self.features.len()
    }
}

pub fn crc32(bytes: &[u8]) -> u32 {
    crc32fast::hash(bytes)
}

pub fn encode_frame(frame: &FeatureWireFrame) -> Result<Vec<u8>, EncodeError> {
    if frame.feature_count as usize != frame.features.len() {
        return Err(EncodeError::CountMismatch {
            declared: frame.feature_count,
            actual: frame.features.len(),
        });
    }
    let mut out = Vec::with_capacity(frame.encoded_len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&frame.node_id.to_le_bytes());
    out.extend_from_slice(&frame.frame_index.to_le_bytes());
    out.push(frame.feature_count);
    for v in &frame.features {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&frame.energy.to_le_bytes());
    out.extend_from_slice(&frame.entropy_neg.to_le_bytes());
    let crc = crc32(&out[MAGIC.len()..]);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

fn f32_at(b: &[u8], at: usize) -> f32 {
    f32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Decode one frame from the start of `bytes`; returns it with the number of bytes consumed.
pub fn decode_prefix(bytes: &[u8]) -> Result<(FeatureWireFrame, usize), DecodeError> {
    let truncated = |needed| DecodeError::Truncated {
        needed,
        available: bytes.len(),
    };
    if bytes.len() < 4 {
        return Err(truncated(OVERHEAD));
    }
    if bytes[..4] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    if bytes.len() < 12 {
        return Err(truncated(OVERHEAD));
    }
    let count = bytes[11] as usize;
    let total = OVERHEAD + 4 * count;
    if bytes.len() < total {
        return Err(truncated(total));
    }
    let body = &bytes[4..total - 4];
    let stored = u32::from_le_bytes(bytes[total - 4..total].try_into().expect("4 bytes"));
    let computed = crc32(body);
    if stored != computed {
        return Err(DecodeError::BadCrc { stored, computed });
    }
    if bytes[4] != VERSION {
        return Err(DecodeError::BadVersion(bytes[4]));
    }
    let features = (0..count).map(|k| f32_at(bytes, 12 + 4 * k)).collect();
    let tail = 12 + 4 * count;
    Ok((
        FeatureWireFrame {
            node_id: u16::from_le_bytes([bytes[5], bytes[6]]),
            frame_index: u32::from_le_bytes(bytes[7..11].try_into().expect("4 bytes")),
            feature_count: count as u8,
            features,
            energy: f32_at(bytes, tail),
            entropy_neg: f32_at(bytes, tail + 4),
        },
        total,
    ))
}

/// Decode exactly one frame; trailing bytes are an error.
///
/// The buffer bounds the frame, so a corrupted count byte that disagrees with
/// the buffer length is reported as a checksum failure when the checksum over
/// the buffer's own extent does not match.
pub fn decode_frame(bytes: &[u8]) -> Result<FeatureWireFrame, DecodeError> {
    if bytes.len() >= OVERHEAD && bytes[..4] == MAGIC && (bytes.len() - OVERHEAD).is_multiple_of(4)
    {
        let declared = OVERHEAD + 4 * bytes[11] as usize;
        let end = bytes.len() - 4;
        if declared != bytes.len() {
            let stored = u32::from_le_bytes(bytes[end..].try_into().expect("4 bytes"));
            let computed = crc32(&bytes[4..end]);
            if stored != computed {
                return Err(DecodeError::BadCrc { stored, computed });
            }
        }
    }
    let (frame, used) = decode_prefix(bytes)?;
    if used != bytes.len() {
        return Err(DecodeError::Truncated {
            needed: used,
            available: bytes.len(),
        });
    }
    Ok(frame)
}

/// Result of scanning a byte stream of concatenated frames.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StreamDecode {
    pub frames: Vec<FeatureWireFrame>,
    /// Corrupt frames skipped while resynchronizing.
    pub skipped: usize,
    /// Bytes left over at the end that do not form a complete frame.
    pub trailing: usize,
}

/// Decode concatenated frames, skipping corrupt ones by searching for the next magic.
pub fn decode_stream(bytes: &[u8]) -> StreamDecode {
    let mut out = StreamDecode::default();
    let mut pos = 0;
    while pos < bytes.len() {
        match decode_prefix(&bytes[pos..]) {
            Ok((frame, used)) => {
                out.frames.push(frame);
                pos += used;
            }
            Err(DecodeError::Truncated { .. }) if bytes[pos..].starts_with(&MAGIC) => {
                // might still be a corrupted count byte; look for a later frame
                match find_magic(bytes, pos + 1) {
                    Some(next) => {
                        out.skipped += 1;
                        pos = next;
                    }
                    None => {
                        out.trailing = bytes.len() - pos;
                        break;
                    }
                }
            }
            Err(_) => {
                if bytes[pos..].starts_with(&MAGIC) {
                    out.skipped += 1;
                }
                match find_magic(bytes, pos + 1) {
                    Some(next) => pos = next,
                    None => {
                        out.trailing = bytes.len() - pos;
                        break;
                    }
                }
            }
        }
    }
    out
}

fn find_magic(bytes: &[u8], from: usize) -> Option<usize> {
    if from >= bytes.len() {
        return None;
    }
    bytes[from..]
        .windows(MAGIC.len())
        .position(|w| w == MAGIC)
        .map(|p| p + from)
}

pub fn write_csff(path: &Path, frames: &[FeatureWireFrame]) -> crate::Result<()> {
    let mut buf = Vec::new();
    for f in frames {
        buf.extend(encode_frame(f).map_err(|e| crate::Error::Config(e.to_string()))?);
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_csff(path: &Path) -> crate::Result<StreamDecode> {
    Ok(decode_stream(&fs::read(path)?))
}
