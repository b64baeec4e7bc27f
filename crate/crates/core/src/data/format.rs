//! Binary activation files.
//!
//! Layout, all integers little-endian:
//!
//! | offset | size | field                                     |
//! |--------|------|-------------------------------------------|
//! | 0      | 4    | magic `b"TLNS"`                           |
//! | 4      | 2    | format version (`1`)                      |
//! | 6      | 1    | dtype tag (`1` = float32)                 |
//! | 7      | 1    | condition code (0-4, `255` = unlabeled)   |
//! | 8      | 4    | layer id                                  |
//! | 12     | 8    | N (rows)                                  |
//! | 20     | 8    | D (columns)                               |
//! | 28     | N*D*4| row-major float32 payload                 |

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::ph::{Condition, PointCloud, PointTag};

pub const MAGIC: [u8; 4] = *b"TLNS";
pub const VERSION: u16 = 1;
pub const DTYPE_F32: u8 = 1;
pub const UNLABELED: u8 = 255;
pub const HEADER_LEN: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivationHeader {
    pub layer: u32,
    pub condition: Option<Condition>,
    pub n: u64,
    pub d: u64,
}

impl ActivationHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut h = [0u8; HEADER_LEN];
        h[0..4].copy_from_slice(&MAGIC);
        h[4..6].copy_from_slice(&VERSION.to_le_bytes());
        h[6] = DTYPE_F32;
        h[7] = self.condition.map_or(UNLABELED, Condition::code);
        h[8..12].copy_from_slice(&self.layer.to_le_bytes());
        h[12..20].copy_from_slice(&self.n.to_le_bytes());
        h[20..28].copy_from_slice(&self.d.to_le_bytes());
        h
    }

    pub fn parse(bytes: &[u8]) -> std::result::Result<ActivationHeader, FormatError> {
        if bytes.len() < HEADER_LEN {
            return Err(FormatError::Truncated {
                expected: HEADER_LEN as u64,
                found: bytes.len() as u64,
            });
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(FormatError::BadMagic { found: magic });
        }
        let version = u16::from_le_bytes(bytes[4..6].try_into().unwrap());
        if version != VERSION {
            return Err(FormatError::VersionMismatch {
                found: version,
                supported: VERSION,
            });
        }
        if bytes[6] != DTYPE_F32 {
            return Err(FormatError::UnsupportedDtype(bytes[6]));
        }
        let condition = match bytes[7] {
            UNLABELED => None,
            code => Some(
                Condition::from_code(code)
                    .ok_or_else(|| FormatError::InvalidHeader(format!("condition code {code}")))?,
            ),
        };
        let layer = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let n = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
        let d = u64::from_le_bytes(bytes[20..28].try_into().unwrap());
        if n == 0 || d == 0 {
            return Err(FormatError::InvalidHeader(format!("N = {n}, D = {d}")));
        }
        if n.checked_mul(d).and_then(|v| v.checked_mul(4)).is_none() {
            return Err(FormatError::InvalidHeader(format!("N*D overflows: {n} x {d}")));
        }
        Ok(ActivationHeader { layer, condition, n, d })
    }

    pub fn payload_len(&self) -> u64 {
        self.n * self.d * 4
    }
}

/// Serializes a cloud; coordinates are narrowed to float32.
pub fn encode_activations(cloud: &PointCloud, layer: u32, condition: Option<Condition>) -> Vec<u8> {
    let header = ActivationHeader {
        layer,
        condition,
        n: cloud.len() as u64,
        d: cloud.dim() as u64,
    };
    let mut out = Vec::with_capacity(HEADER_LEN + cloud.coords().len() * 4);
    out.extend_from_slice(&header.to_bytes());
    for &v in cloud.coords() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_activations(bytes: &[u8]) -> std::result::Result<(ActivationHeader, PointCloud), FormatError> {
    let header = ActivationHeader::parse(bytes)?;
    let payload = &bytes[HEADER_LEN..];
    let expected = header.payload_len();
    let found = payload.len() as u64;
    if found < expected {
        return Err(FormatError::Truncated { expected, found });
    }
    if found > expected {
        return Err(FormatError::TrailingBytes {
            extra: found - expected,
        });
    }
    let (n, d) = (header.n as usize, header.d as usize);
    let mut coords = Vec::with_capacity(n * d);
    for (idx, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(FormatError::NonFinite {
                row: idx / d,
                col: idx % d,
            });
        }
        coords.push(v as f64);
    }
    let tags = (0..n)
        .map(|i| PointTag {
            condition: header.condition,
            layer: Some(header.layer),
            sample: Some(i as u64),
        })
        .collect();
    let cloud = PointCloud::new(coords, n, d)
        .and_then(|c| c.with_tags(tags))
        .expect("shape validated by header");
    Ok((header, cloud))
}

pub fn write_activations(path: &Path, cloud: &PointCloud, layer: u32, condition: Option<Condition>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode_activations(cloud, layer, condition))?;
    f.sync_all()?;
    Ok(())
}

pub fn read_activation_file(path: &Path) -> Result<(ActivationHeader, PointCloud)> {
    let bytes = fs::read(path)?;
    decode_activations(&bytes).map_err(|source| Error::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads only the header, for manifest validation.
pub fn read_header(path: &Path) -> Result<ActivationHeader> {
    use std::io::Read;
    let mut f = fs::File::open(path)?;
    let mut buf = Vec::with_capacity(HEADER_LEN);
    (&mut f).take(HEADER_LEN as u64).read_to_end(&mut buf)?;
    let header = ActivationHeader::parse(&buf).map_err(|source| Error::Format {
        path: path.to_path_buf(),
        source,
    })?;
    let len = f.metadata()?.len();
    let found = len.saturating_sub(HEADER_LEN as u64);
    let fail = |source| Error::Format {
        path: path.to_path_buf(),
        source,
    };
    if found < header.payload_len() {
        return Err(fail(FormatError::Truncated {
            expected: header.payload_len(),
            found,
        }));
    }
    if found > header.payload_len() {
        return Err(fail(FormatError::TrailingBytes {
            extra: found - header.payload_len(),
        }));
    }
    Ok(header)
}

pub fn read_activations(path: &Path) -> Result<PointCloud> {
    read_activation_file(path).map(|(_, cloud)| cloud)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> Vec<u8> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"TLNS");
        bytes.extend_from_slice(&1u16.to_le_bytes());
        bytes.push(1);
        bytes.push(1);
        bytes.extend_from_slice(&8u32.to_le_bytes());
        bytes.extend_from_slice(&2u64.to_le_bytes());
        bytes.extend_from_slice(&3u64.to_le_bytes());
        for v in [1.0f32, -2.5, 0.125, 3.0, 4.5, -0.0] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        bytes
    }

    #[test]
    fn known_bytes_decode_exactly() {
        let (h, cloud) = decode_activations(&fixture()).unwrap();
        assert_eq!(h.layer, 8);
        assert_eq!(h.condition, Some(Condition::Poisoned));
        assert_eq!((cloud.len(), cloud.dim()), (2, 3));
        assert_eq!(cloud.point(0), &[1.0, -2.5, 0.125]);
        assert_eq!(cloud.point(1), &[3.0, 4.5, -0.0]);
        assert_eq!(cloud.tags().unwrap()[1].layer, Some(8));
    }

    #[test]
    fn encode_matches_fixture() {
        let (h, cloud) = decode_activations(&fixture()).unwrap();
        assert_eq!(encode_activations(&cloud, h.layer, h.condition), fixture());
    }

    #[test]
    fn short_payload_is_truncation() {
        let bytes = fixture();
        let err = decode_activations(&bytes[..bytes.len() - 4]).unwrap_err();
        assert!(matches!(
            err,
            FormatError::Truncated {
                expected: 24,
                found: 20
            }
        ));
        assert_eq!(err.code(), "E_TRUNCATED");
    }

    #[test]
    fn errors_have_distinct_codes() {
        let mut bad_magic = fixture();
        bad_magic[0] = b'X';
        let mut bad_version = fixture();
        bad_version[4] = 2;
        let mut trailing = fixture();
        trailing.push(0);
        let codes: Vec<&str> = [bad_magic, bad_version, trailing]
            .iter()
            .map(|b| decode_activations(b).unwrap_err().code())
            .collect();
        assert_eq!(codes, vec!["E_MAGIC", "E_VERSION", "E_TRAILING"]);
    }

    #[test]
    fn header_rejects_zero_rows() {
        let mut bytes = fixture();
        bytes[12..20].copy_from_slice(&0u64.to_le_bytes());
        assert!(matches!(decode_activations(&bytes), Err(FormatError::InvalidHeader(_))));
    }
}
