//! PGM (portable graymap) reading and writing.
//!
//! Supports the ASCII `P2` and binary `P5` variants with maxval up to
//! 65535; binary samples above 255 are two bytes, big-endian, per the
//! format convention. `#` comments are accepted anywhere whitespace is in
//! the header, and between ASCII samples. Each parse error carries the
//! byte offset it was detected at.

use std::io::{self, Write};

use integral_engine::image::Image;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// `P2`: ASCII decimal samples.
    Ascii,
    /// `P5`: raw binary samples.
    Binary,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct PgmError {
    pub offset: usize,
    pub kind: PgmErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmErrorKind {
    #[error("not a P2/P5 PGM stream")]
    BadMagic,
    #[error("unexpected end of data")]
    UnexpectedEof,
    #[error("expected an unsigned decimal number")]
    BadNumber,
    #[error("image dimension is zero")]
    ZeroDimension,
    #[error("maxval {0} outside 1..=65535")]
    MaxvalOutOfRange(u64),
    #[error("image too large to represent")]
    TooLarge,
    #[error("sample value {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u64, maxval: u32 },
    #[error("expected a single whitespace byte before binary samples")]
    MissingDataSeparator,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.bytes.get(self.pos).is_some_and(|&b| b != b'\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    /// Reads a decimal token, returning (value, token offset).
    fn read_number(&mut self) -> Result<(u64, usize), PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        if start >= self.bytes.len() {
            return Err(PgmError {
                offset: start,
                kind: PgmErrorKind::UnexpectedEof,
            });
        }
        let mut value: u64 = 0;
        let mut digits = 0usize;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or(PgmError {
                    offset: start,
                    kind: PgmErrorKind::TooLarge,
                })?;
            digits += 1;
            self.pos += 1;
        }
        if digits == 0 {
            return Err(PgmError {
                offset: start,
                kind: PgmErrorKind::BadNumber,
            });
        }
        Ok((value, start))
    }
}

/// Parses a P2 or P5 stream into an [`Image`] with `rows = height`,
/// `cols = width`, and `pmax = maxval`.
pub fn parse_pgm(bytes: &[u8]) -> Result<Image, PgmError> {
    let format = match bytes.get(..2) {
        Some(b"P2") => PgmFormat::Ascii,
        Some(b"P5") => PgmFormat::Binary,
        _ => {
            return Err(PgmError {
                offset: 0,
                kind: PgmErrorKind::BadMagic,
            })
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };

    let (width, w_off) = cur.read_number()?;
    if width == 0 {
        return Err(PgmError {
            offset: w_off,
            kind: PgmErrorKind::ZeroDimension,
        });
    }
    let (height, h_off) = cur.read_number()?;
    if height == 0 {
        return Err(PgmError {
            offset: h_off,
            kind: PgmErrorKind::ZeroDimension,
        });
    }
    let (maxval, m_off) = cur.read_number()?;
    if !(1..=65535).contains(&maxval) {
        return Err(PgmError {
            offset: m_off,
            kind: PgmErrorKind::MaxvalOutOfRange(maxval),
        });
    }

    let count = width
        .checked_mul(height)
        .filter(|&n| n <= usize::MAX as u64)
        .filter(|&n| (n as u128) * (maxval as u128) <= u64::MAX as u128)
        .ok_or(PgmError {
            offset: w_off,
            kind: PgmErrorKind::TooLarge,
        })? as usize;

    let mut samples = Vec::with_capacity(count);
    match format {
        PgmFormat::Ascii => {
            for _ in 0..count {
                let (value, off) = cur.read_number()?;
                if value > maxval {
                    return Err(PgmError {
                        offset: off,
                        kind: PgmErrorKind::SampleOutOfRange {
                            value,
                            maxval: maxval as u32,
                        },
                    });
                }
                samples.push(value as u32);
            }
        }
        PgmFormat::Binary => {
            match bytes.get(cur.pos) {
                None => {
                    return Err(PgmError {
                        offset: cur.pos,
                        kind: PgmErrorKind::UnexpectedEof,
                    })
                }
                Some(b) if !b.is_ascii_whitespace() => {
                    return Err(PgmError {
                        offset: cur.pos,
                        kind: PgmErrorKind::MissingDataSeparator,
                    })
                }
                Some(_) => cur.pos += 1,
            }
            let bytes_per_sample = if maxval > 255 { 2 } else { 1 };
            let needed = count
                .checked_mul(bytes_per_sample)
                .filter(|&n| n <= bytes.len() - cur.pos)
                .ok_or(PgmError {
                    offset: bytes.len(),
                    kind: PgmErrorKind::UnexpectedEof,
                })?;
            let data = &bytes[cur.pos..cur.pos + needed];
            for (i, chunk) in data.chunks_exact(bytes_per_sample).enumerate() {
                let value = if bytes_per_sample == 1 {
                    chunk[0] as u64
                } else {
                    ((chunk[0] as u64) << 8) | chunk[1] as u64
                };
                if value > maxval {
                    return Err(PgmError {
                        offset: cur.pos + i * bytes_per_sample,
                        kind: PgmErrorKind::SampleOutOfRange {
                            value,
                            maxval: maxval as u32,
                        },
                    });
                }
                samples.push(value as u32);
            }
        }
    }

    Ok(
        Image::new(height as usize, width as usize, maxval as u32, samples)
            .expect("header and samples validated above"),
    )
}

/// Writes an image as PGM. The image's `pmax` becomes the maxval, so it
/// must be within the format's 65535 cap.
pub fn write_pgm<W: Write>(img: &Image, format: PgmFormat, out: &mut W) -> io::Result<()> {
    if img.pmax() > 65535 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("pmax {} exceeds the PGM maxval cap of 65535", img.pmax()),
        ));
    }
    let magic = match format {
        PgmFormat::Ascii => "P2",
        PgmFormat::Binary => "P5",
    };
    write!(
        out,
        "{magic}\n{} {}\n{}\n",
        img.cols(),
        img.rows(),
        img.pmax()
    )?;
    match format {
        PgmFormat::Ascii => {
            for r in 0..img.rows() {
                let row = img.row(r);
                let mut line = String::with_capacity(row.len() * 4);
                for (c, px) in row.iter().enumerate() {
                    if c > 0 {
                        line.push(' ');
                    }
                    line.push_str(&px.to_string());
                }
                line.push('\n');
                out.write_all(line.as_bytes())?;
            }
        }
        PgmFormat::Binary => {
            if img.pmax() > 255 {
                let mut buf = Vec::with_capacity(img.pixels().len() * 2);
                for &px in img.pixels() {
                    buf.extend_from_slice(&(px as u16).to_be_bytes());
                }
                out.write_all(&buf)?;
            } else {
                let buf: Vec<u8> = img.pixels().iter().map(|&px| px as u8).collect();
                out.write_all(&buf)?;
            }
        }
    }
    Ok(())
}
