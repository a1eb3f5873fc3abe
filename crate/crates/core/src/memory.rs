//! Buffer sizing for hardware integral-image computation.
//!
//! A recursion-based engine keeps one row of state in internal memory to
//! compute the next row. The standard design stores full integral values,
//! so each word needs `ceil(log2(rows * cols * pmax))` bits; the
//! difference-buffer design stores only adjacent-column differences, whose
//! worst case is one full column sum, so each word needs
//! `ceil(log2(rows * pmax))` bits. Both buffers are `cols` words deep.
//!
//! All widths are computed by exact integer comparison against powers of
//! two; no floating-point logarithms are involved anywhere.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("geometry dimensions and pmax must all be at least 1")]
    ZeroField,
    #[error("rows, cols, and pmax are capped at 2^32, and their product at 2^64")]
    TooLarge,
}

/// Image geometry for sizing purposes: row count, column count, and the
/// maximum pixel value. Each field is at least 1 and at most 2^32, and
/// `rows * cols * pmax` is representable in 64 bits, so every derived
/// quantity (widths, bit totals, worst-case differences) fits `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Geometry {
    rows: u64,
    cols: u64,
    pmax: u64,
}

impl Geometry {
    const FIELD_CAP: u64 = 1 << 32;

    pub fn new(rows: u64, cols: u64, pmax: u64) -> Result<Self, GeometryError> {
        if rows == 0 || cols == 0 || pmax == 0 {
            return Err(GeometryError::ZeroField);
        }
        if rows > Self::FIELD_CAP || cols > Self::FIELD_CAP || pmax > Self::FIELD_CAP {
            return Err(GeometryError::TooLarge);
        }
        let product = (rows as u128) * (cols as u128) * (pmax as u128);
        if product > u64::MAX as u128 {
            return Err(GeometryError::TooLarge);
        }
        Ok(Self { rows, cols, pmax })
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn cols(&self) -> u64 {
        self.cols
    }

    pub fn pmax(&self) -> u64 {
        self.pmax
    }

    /// Largest value an integral image of this geometry can hold.
    pub fn max_output_value(&self) -> u64 {
        self.rows * self.cols * self.pmax
    }

    /// Largest possible difference between horizontally adjacent integral
    /// values: a full column sum, `rows * pmax`.
    pub fn max_column_sum(&self) -> u64 {
        self.rows * self.pmax
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{} pmax {}", self.rows, self.cols, self.pmax)
    }
}

/// A percentage held in tenths, displayed with exactly one decimal digit.
/// `TenthsPct(344)` prints as `34.4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TenthsPct(pub u32);

impl TenthsPct {
    pub fn tenths(&self) -> u32 {
        self.0
    }
}

impl fmt::Display for TenthsPct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.0 / 10, self.0 % 10)
    }
}

/// Sizing report for one geometry: word widths, depth, total bits for the
/// standard and difference-buffer designs, and the saving of the latter
/// over the former.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryProfile {
    pub geometry: Geometry,
    pub std_width_bits: u32,
    pub prop_width_bits: u32,
    pub depth_words: u64,
    pub std_total_bits: u64,
    pub prop_total_bits: u64,
    /// `100 * (1 - prop_total / std_total)`, truncated to one decimal.
    pub reduction_pct: TenthsPct,
}

/// Smallest `w` with `2^w >= x`; 0 for `x <= 1`.
fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// Word width of the standard design: `ceil(log2(rows * cols * pmax))`,
/// floored at one bit.
pub fn width_standard(g: Geometry) -> u32 {
    ceil_log2(g.max_output_value() as u128).max(1)
}

/// Word width of the difference-buffer design: `ceil(log2(rows * pmax))`,
/// floored at one bit.
pub fn width_proposed(g: Geometry) -> u32 {
    ceil_log2(g.max_column_sum() as u128).max(1)
}

/// Buffer depth in words; the same for both designs: one word per column.
pub fn buffer_depth(g: Geometry) -> u64 {
    g.cols()
}

/// Worst-case difference between adjacent integral values in one row: the
/// full column sum `rows * pmax`, reached in the last row of an image whose
/// pixels are all at the maximum.
pub fn worst_case_adjacent_difference(g: Geometry) -> u64 {
    g.max_column_sum()
}

/// Bits needed to represent every value in `[0, max_value]`:
/// `ceil(log2(max_value + 1))`, floored at one bit.
///
/// This differs from the `ceil(log2(x))` width convention exactly when `x`
/// is a power of two, where one extra bit is required to hold `x` itself.
/// The simulator defaults to this width so that exact powers of two cannot
/// silently overflow.
pub fn safe_width(max_value: u64) -> u32 {
    ceil_log2(max_value as u128 + 1).max(1)
}

/// Full sizing report for a geometry.
pub fn memory_profile(g: Geometry) -> MemoryProfile {
    let std_width_bits = width_standard(g);
    let prop_width_bits = width_proposed(g);
    let depth_words = buffer_depth(g);
    let std_total_bits = std_width_bits as u64 * depth_words;
    let prop_total_bits = prop_width_bits as u64 * depth_words;
    // Truncate toward zero at one decimal digit.
    let tenths =
        (1000u128 * (std_total_bits - prop_total_bits) as u128 / std_total_bits as u128) as u32;
    MemoryProfile {
        geometry: g,
        std_width_bits,
        prop_width_bits,
        depth_words,
        std_total_bits,
        prop_total_bits,
        reduction_pct: TenthsPct(tenths),
    }
}

/// Standard-design total bits per geometry, in input order; the series
/// behind the memory-requirements bar chart for common image sizes.
pub fn figure1_series(geometries: &[Geometry]) -> Vec<(Geometry, u64)> {
    geometries
        .iter()
        .map(|&g| (g, width_standard(g) as u64 * buffer_depth(g)))
        .collect()
}
