//! IIM1: a small binary container for integral images.
//!
//! PGM sample values stop at 65535, far below what integral values reach,
//! so computed grids are stored in their own format:
//!
//! ```text
//! offset  size             field
//! 0       4                magic "IIM1"
//! 4       4                rows, u32 little-endian
//! 8       4                cols, u32 little-endian
//! 12      8 * rows * cols  values, u64 little-endian, row-major
//! ```
//!
//! Total length is exactly `12 + 8 * rows * cols` bytes.

use std::io::{self, Write};

use integral_engine::image::{ImageError, IntegralImage};
use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"IIM1";

#[derive(Debug, Error)]
pub enum Iim1Error {
    #[error("not an IIM1 stream")]
    BadMagic,
    #[error("stream is {actual} bytes, expected {expected} for {rows}x{cols}")]
    LengthMismatch {
        rows: u32,
        cols: u32,
        expected: u128,
        actual: usize,
    },
    #[error("stream shorter than the 12-byte header")]
    TruncatedHeader,
    #[error(transparent)]
    Invalid(#[from] ImageError),
}

pub fn write_iim1<W: Write>(ii: &IntegralImage, out: &mut W) -> io::Result<()> {
    let rows = u32::try_from(ii.rows())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "row count exceeds u32"))?;
    let cols = u32::try_from(ii.cols())
        .map_err(|_| io::Error::new(io::ErrorKind::InvalidInput, "column count exceeds u32"))?;
    let mut buf = Vec::with_capacity(12 + 8 * ii.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&rows.to_le_bytes());
    buf.extend_from_slice(&cols.to_le_bytes());
    for &value in ii.values() {
        buf.extend_from_slice(&value.to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn read_iim1(bytes: &[u8]) -> Result<IntegralImage, Iim1Error> {
    if bytes.len() < 12 {
        return Err(Iim1Error::TruncatedHeader);
    }
    if &bytes[..4] != MAGIC {
        return Err(Iim1Error::BadMagic);
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    // u128 so a hostile header cannot wrap the expected length.
    let expected = 12 + 8 * rows as u128 * cols as u128;
    if bytes.len() as u128 != expected {
        return Err(Iim1Error::LengthMismatch {
            rows,
            cols,
            expected,
            actual: bytes.len(),
        });
    }
    let values: Vec<u64> = bytes[12..]
        .chunks_exact(8)
        .map(|chunk| u64::from_le_bytes(chunk.try_into().unwrap()))
        .collect();
    Ok(IntegralImage::from_values(
        rows as usize,
        cols as usize,
        values,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_layout_for_a_known_grid() {
        // integral image of [[1,2],[3,4]]
        let ii = IntegralImage::from_values(2, 2, vec![1, 3, 4, 10]).unwrap();
        let mut buf = Vec::new();
        write_iim1(&ii, &mut buf).unwrap();
        #[rustfmt::skip]
        let expected: Vec<u8> = vec![
            b'I', b'I', b'M', b'1',
            2, 0, 0, 0,
            2, 0, 0, 0,
            1, 0, 0, 0, 0, 0, 0, 0,
            3, 0, 0, 0, 0, 0, 0, 0,
            4, 0, 0, 0, 0, 0, 0, 0,
            10, 0, 0, 0, 0, 0, 0, 0,
        ];
        assert_eq!(buf, expected);
        assert_eq!(buf.len(), 12 + 8 * 4);
    }

    #[test]
    fn round_trip() {
        let ii = IntegralImage::from_values(1, 3, vec![7, 15, 24]).unwrap();
        let mut buf = Vec::new();
        write_iim1(&ii, &mut buf).unwrap();
        assert_eq!(read_iim1(&buf).unwrap(), ii);
    }

    #[test]
    fn rejects_bad_magic_and_bad_lengths() {
        assert!(matches!(read_iim1(b"IIM"), Err(Iim1Error::TruncatedHeader)));
        assert!(matches!(
            read_iim1(b"IIM2\x01\0\0\0\x01\0\0\0\0\0\0\0\0\0\0\0"),
            Err(Iim1Error::BadMagic)
        ));
        let mut buf = Vec::new();
        write_iim1(
            &IntegralImage::from_values(1, 1, vec![5]).unwrap(),
            &mut buf,
        )
        .unwrap();
        buf.push(0);
        assert!(matches!(
            read_iim1(&buf),
            Err(Iim1Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn rejects_values_that_are_not_an_integral_image() {
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&2u32.to_le_bytes());
        buf.extend_from_slice(&9u64.to_le_bytes());
        buf.extend_from_slice(&3u64.to_le_bytes()); // decreasing along the row
        assert!(matches!(read_iim1(&buf), Err(Iim1Error::Invalid(_))));
    }
}
