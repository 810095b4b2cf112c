//! Minimal `.npy` support: 2-D, C-order, little-endian `f4`/`f8`, format
//! versions 1.0, 2.0 and 3.0.

use std::io::Write;

use crate::error::{Error, Result};
use crate::model::ActivationMap;

pub(crate) const MAGIC: &[u8; 6] = b"\x93NUMPY";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    fn descr(self) -> &'static str {
        match self {
            Dtype::F32 => "<f4",
            Dtype::F64 => "<f8",
        }
    }

    fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Header {
    dtype: Dtype,
    fortran_order: bool,
    shape: Vec<usize>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::UnsupportedFormat(msg.into())
}

/// Pulls the literal following `'key':` out of the header dict.
fn dict_value<'a>(dict: &'a str, key: &str) -> Result<&'a str> {
    let needle_sq = format!("'{key}'");
    let needle_dq = format!("\"{key}\"");
    let start = dict
        .find(&needle_sq)
        .map(|p| p + needle_sq.len())
        .or_else(|| dict.find(&needle_dq).map(|p| p + needle_dq.len()))
        .ok_or_else(|| bad(format!("npy header has no `{key}` entry")))?;
    let rest = dict[start..].trim_start();
    let rest = rest
        .strip_prefix(':')
        .ok_or_else(|| bad("malformed npy header"))?
        .trim_start();
    let end = if rest.starts_with('(') {
        rest.find(')').map(|p| p + 1)
    } else if rest.starts_with('\'') || rest.starts_with('"') {
        let quote = rest.as_bytes()[0] as char;
        rest[1..].find(quote).map(|p| p + 2)
    } else {
        rest.find([',', '}'])
    }
    .ok_or_else(|| bad("malformed npy header"))?;
    Ok(rest[..end].trim())
}

fn parse_header(dict: &str) -> Result<Header> {
    let descr = dict_value(dict, "descr")?.trim_matches(['\'', '"']);
    let dtype = match descr {
        "<f4" => Dtype::F32,
        "<f8" => Dtype::F64,
        other => return Err(Error::UnsupportedDtype(other.to_owned())),
    };
    let fortran_order = match dict_value(dict, "fortran_order")? {
        "False" => false,
        "True" => true,
        other => return Err(bad(format!("bad fortran_order `{other}`"))),
    };
    let shape_lit = dict_value(dict, "shape")?;
    let inner = shape_lit
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| bad(format!("bad shape `{shape_lit}`")))?;
    let shape = inner
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| bad(format!("bad shape `{shape_lit}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Header {
        dtype,
        fortran_order,
        shape,
    })
}

fn split_header(bytes: &[u8]) -> Result<(Header, &[u8])> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err(bad("missing npy magic"));
    }
    let major = bytes[6];
    let (header_len, offset) = match major {
        1 => (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10),
        2 | 3 => {
            if bytes.len() < 12 {
                return Err(bad("truncated npy header"));
            }
            (
                u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize,
                12,
            )
        }
        v => return Err(bad(format!("npy format version {v} is not supported"))),
    };
    let end = offset + header_len;
    if bytes.len() < end {
        return Err(bad("truncated npy header"));
    }
    let dict = std::str::from_utf8(&bytes[offset..end]).map_err(|_| bad("npy header is not text"))?;
    Ok((parse_header(dict)?, &bytes[end..]))
}

/// Decodes an in-memory `.npy` file into a validated map.
pub fn decode(bytes: &[u8]) -> Result<ActivationMap> {
    let (header, data) = split_header(bytes)?;
    if header.shape.len() != 2 {
        return Err(Error::NotTwoDimensional(header.shape));
    }
    if header.fortran_order {
        return Err(bad("Fortran-order arrays are not supported"));
    }
    let (h, w) = (header.shape[0], header.shape[1]);
    let n = h * w;
    let size = header.dtype.size();
    if data.len() < n * size {
        return Err(bad(format!(
            "npy payload has {} bytes, shape ({h}, {w}) needs {}",
            data.len(),
            n * size
        )));
    }
    let values: Vec<f64> = match header.dtype {
        Dtype::F32 => data[..n * 4]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect(),
        Dtype::F64 => data[..n * 8]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    };
    ActivationMap::new(h, w, values)
}

/// Encodes a map as a version 1.0 `.npy` file.
///
/// `Dtype::F32` narrows each value; maps that were read from float32 files
/// round-trip bit-exactly.
pub fn encode(map: &ActivationMap, dtype: Dtype) -> Vec<u8> {
    let dict = format!(
        "{{'descr': '{}', 'fortran_order': False, 'shape': ({}, {}), }}",
        dtype.descr(),
        map.height(),
        map.width()
    );
    // Pad so that magic + version + length + dict + '\n' is a multiple of 64.
    let unpadded = MAGIC.len() + 2 + 2 + dict.len() + 1;
    let pad = (64 - unpadded % 64) % 64;
    let header_len = dict.len() + pad + 1;

    let mut out = Vec::with_capacity(unpadded + pad + map.values().len() * dtype.size());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header_len as u16).to_le_bytes());
    out.extend_from_slice(dict.as_bytes());
    out.extend(std::iter::repeat_n(b' ', pad));
    out.push(b'\n');
    match dtype {
        Dtype::F32 => {
            for &v in map.values() {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        Dtype::F64 => {
            for &v in map.values() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    out
}

pub fn write<W: Write>(writer: &mut W, map: &ActivationMap, dtype: Dtype) -> std::io::Result<()> {
    writer.write_all(&encode(map, dtype))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn raw_npy(major: u8, dict: &str, payload: &[u8]) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&[major, 0]);
        let body = format!("{dict}\n");
        if major == 1 {
            out.extend_from_slice(&(body.len() as u16).to_le_bytes());
        } else {
            out.extend_from_slice(&(body.len() as u32).to_le_bytes());
        }
        out.extend_from_slice(body.as_bytes());
        out.extend_from_slice(payload);
        out
    }

    #[test]
    fn header_is_64_byte_aligned() {
        let map = ActivationMap::zeros(3, 7).unwrap();
        let bytes = encode(&map, Dtype::F32);
        assert_eq!((bytes.len() - 21 * 4) % 64, 0);
        assert_eq!(bytes[(bytes.len() - 21 * 4) - 1], b'\n');
    }

    #[test]
    fn reads_v2_float64() {
        let payload: Vec<u8> = [0.0f64, 0.5, 1.0, 0.25].iter().flat_map(|v| v.to_le_bytes()).collect();
        let bytes = raw_npy(2, "{'descr': '<f8', 'fortran_order': False, 'shape': (2, 2), }", &payload);
        let map = decode(&bytes).unwrap();
        assert_eq!(map.values(), &[0.0, 0.5, 1.0, 0.25]);
    }

    #[test]
    fn rejects_three_dimensional() {
        let payload = vec![0u8; 8 * 4];
        let bytes = raw_npy(1, "{'descr': '<f4', 'fortran_order': False, 'shape': (2, 2, 2), }", &payload);
        assert!(matches!(decode(&bytes), Err(Error::NotTwoDimensional(s)) if s == vec![2, 2, 2]));
    }

    #[test]
    fn rejects_other_dtypes_and_orders() {
        let payload = vec![0u8; 16];
        let be = raw_npy(1, "{'descr': '>f4', 'fortran_order': False, 'shape': (2, 2), }", &payload);
        assert!(matches!(decode(&be), Err(Error::UnsupportedDtype(d)) if d == ">f4"));
        let int = raw_npy(1, "{'descr': '<i4', 'fortran_order': False, 'shape': (2, 2), }", &payload);
        assert!(matches!(decode(&int), Err(Error::UnsupportedDtype(_))));
        let fortran = raw_npy(1, "{'descr': '<f4', 'fortran_order': True, 'shape': (2, 2), }", &payload);
        assert!(matches!(decode(&fortran), Err(Error::UnsupportedFormat(_))));
        assert!(matches!(decode(b"hello"), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn rejects_truncated_payload() {
        let bytes = raw_npy(1, "{'descr': '<f4', 'fortran_order': False, 'shape': (2, 2), }", &[0u8; 12]);
        assert!(matches!(decode(&bytes), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn out_of_range_values_fail_validation() {
        let payload: Vec<u8> = [0.0f32, 1.5].iter().flat_map(|v| v.to_le_bytes()).collect();
        let bytes = raw_npy(1, "{'descr': '<f4', 'fortran_order': False, 'shape': (1, 2), }", &payload);
        assert!(matches!(decode(&bytes), Err(Error::OutOfRangeValue { .. })));
    }

    proptest! {
        #[test]
        fn float32_round_trip_is_bit_exact(
            (h, w, vals) in (1usize..9, 1usize..9).prop_flat_map(|(h, w)| {
                (Just(h), Just(w), prop::collection::vec(0.0f32..=1.0, h * w))
            })
        ) {
            let map = ActivationMap::new(h, w, vals.iter().map(|&v| v as f64).collect()).unwrap();
            let bytes = encode(&map, Dtype::F32);
            let back = decode(&bytes).unwrap();
            prop_assert_eq!(back.shape(), (h, w));
            for (a, b) in back.values().iter().zip(&vals) {
                prop_assert_eq!((*a as f32).to_bits(), b.to_bits());
            }
            prop_assert_eq!(encode(&back, Dtype::F32), bytes);
        }
    }
}
