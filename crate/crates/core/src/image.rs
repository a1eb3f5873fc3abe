//! Image and integral-image containers.
//!
//! An [`Image`] is a rectangular grid of non-negative pixel samples with a
//! declared maximum sample value. An [`IntegralImage`] holds the inclusive
//! 2-D prefix sums of an image: entry (r, c) is the sum of every pixel at or
//! above row r and at or left of column c. All grids are row-major and
//! zero-based, indexed as (row, column).

use thiserror::Error;

use crate::memory::Geometry;

/// Errors raised while constructing an [`Image`] or [`IntegralImage`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image dimensions must be at least 1x1 (got {rows}x{cols})")]
    EmptyDimensions { rows: usize, cols: usize },
    #[error("maximum pixel value must be at least 1")]
    ZeroPmax,
    #[error("pixel buffer holds {actual} samples, expected {rows}x{cols} = {expected}")]
    PixelCountMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        actual: usize,
    },
    #[error("pixel at ({row},{col}) is {value}, above the declared maximum {pmax}")]
    PixelOutOfRange {
        row: usize,
        col: usize,
        value: u32,
        pmax: u32,
    },
    #[error("rows x cols x pmax does not fit in 64-bit integral values")]
    ValueRangeTooWide,
    #[error("value grid at ({row},{col}) is not a prefix sum of non-negative pixels")]
    NotAnIntegralImage { row: usize, col: usize },
}

/// Errors raised by row- and rectangle-addressed queries.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("row index {row} out of range for {rows} rows")]
    RowOutOfRange { row: usize, rows: usize },
    #[error("malformed rectangle: top {top}..bottom {bottom}, left {left}..right {right}")]
    MalformedRect {
        top: usize,
        left: usize,
        bottom: usize,
        right: usize,
    },
    #[error("rectangle corner ({bottom},{right}) out of bounds for {rows}x{cols}")]
    RectOutOfBounds {
        bottom: usize,
        right: usize,
        rows: usize,
        cols: usize,
    },
}

/// A rectangular grid of pixel samples.
///
/// Invariants, enforced at construction: both dimensions are at least 1,
/// every sample is at most `pmax`, and `rows * cols * pmax` fits in a `u64`
/// so that every derived integral value does too.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    rows: usize,
    cols: usize,
    pmax: u32,
    pixels: Vec<u32>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, pmax: u32, pixels: Vec<u32>) -> Result<Self, ImageError> {
        if rows == 0 || cols == 0 {
            return Err(ImageError::EmptyDimensions { rows, cols });
        }
        if pmax == 0 {
            return Err(ImageError::ZeroPmax);
        }
        // Aligned with the Geometry caps, so geometry() below cannot fail.
        if rows as u128 > 1 << 32 || cols as u128 > 1 << 32 {
            return Err(ImageError::ValueRangeTooWide);
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or(ImageError::ValueRangeTooWide)?;
        if pixels.len() != expected {
            return Err(ImageError::PixelCountMismatch {
                rows,
                cols,
                expected,
                actual: pixels.len(),
            });
        }
        if (rows as u128) * (cols as u128) * (pmax as u128) > u64::MAX as u128 {
            return Err(ImageError::ValueRangeTooWide);
        }
        for (i, &value) in pixels.iter().enumerate() {
            if value > pmax {
                return Err(ImageError::PixelOutOfRange {
                    row: i / cols,
                    col: i % cols,
                    value,
                    pmax,
                });
            }
        }
        Ok(Self {
            rows,
            cols,
            pmax,
            pixels,
        })
    }

    /// Image with every sample set to `value`.
    pub fn constant(rows: usize, cols: usize, pmax: u32, value: u32) -> Result<Self, ImageError> {
        Self::new(rows, cols, pmax, vec![value; rows * cols])
    }

    /// Builds an image by evaluating `f(row, col)` for every position.
    pub fn from_fn(
        rows: usize,
        cols: usize,
        pmax: u32,
        mut f: impl FnMut(usize, usize) -> u32,
    ) -> Result<Self, ImageError> {
        let mut pixels = Vec::with_capacity(rows.saturating_mul(cols));
        for r in 0..rows {
            for c in 0..cols {
                pixels.push(f(r, c));
            }
        }
        Self::new(rows, cols, pmax, pixels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Declared maximum sample value (255 for 8-bit imagery).
    pub fn pmax(&self) -> u32 {
        self.pmax
    }

    pub fn pixel(&self, row: usize, col: usize) -> u32 {
        assert!(
            row < self.rows && col < self.cols,
            "pixel index out of range"
        );
        self.pixels[row * self.cols + col]
    }

    /// Row-major sample slice.
    pub fn pixels(&self) -> &[u32] {
        &self.pixels
    }

    /// One row of samples.
    pub fn row(&self, row: usize) -> &[u32] {
        assert!(row < self.rows, "row index out of range");
        &self.pixels[row * self.cols..(row + 1) * self.cols]
    }

    /// Sizing-model view of this image's dimensions.
    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.rows as u64, self.cols as u64, self.pmax as u64)
            .expect("image invariants imply a valid geometry")
    }
}

/// Inclusive 2-D prefix sums of an [`Image`].
///
/// Values are held in 64 bits; the source image constructor guarantees the
/// total sum fits. Equality is bitwise, which is what the cross-method
/// equivalence checks rely on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralImage {
    rows: usize,
    cols: usize,
    values: Vec<u64>,
}

impl IntegralImage {
    /// Wraps a precomputed value grid, verifying that it really is the
    /// integral image of some non-negative pixel grid: the first row and
    /// first column must be non-decreasing and every unit box
    /// `v(r,c) + v(r-1,c-1) - v(r-1,c) - v(r,c-1)` must be non-negative.
    pub fn from_values(rows: usize, cols: usize, values: Vec<u64>) -> Result<Self, ImageError> {
        if rows == 0 || cols == 0 {
            return Err(ImageError::EmptyDimensions { rows, cols });
        }
        let expected = rows
            .checked_mul(cols)
            .ok_or(ImageError::ValueRangeTooWide)?;
        if values.len() != expected {
            return Err(ImageError::PixelCountMismatch {
                rows,
                cols,
                expected,
                actual: values.len(),
            });
        }
        let at = |r: usize, c: usize| values[r * cols + c];
        for c in 1..cols {
            if at(0, c) < at(0, c - 1) {
                return Err(ImageError::NotAnIntegralImage { row: 0, col: c });
            }
        }
        for r in 1..rows {
            if at(r, 0) < at(r - 1, 0) {
                return Err(ImageError::NotAnIntegralImage { row: r, col: 0 });
            }
            for c in 1..cols {
                let with = at(r, c) as u128 + at(r - 1, c - 1) as u128;
                let without = at(r - 1, c) as u128 + at(r, c - 1) as u128;
                if with < without {
                    return Err(ImageError::NotAnIntegralImage { row: r, col: c });
                }
            }
        }
        Ok(Self { rows, cols, values })
    }

    /// Used by the computation routines, which construct valid grids by
    /// definition.
    pub(crate) fn from_computed(rows: usize, cols: usize, values: Vec<u64>) -> Self {
        debug_assert_eq!(values.len(), rows * cols);
        Self { rows, cols, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn value(&self, row: usize, col: usize) -> u64 {
        assert!(
            row < self.rows && col < self.cols,
            "value index out of range"
        );
        self.values[row * self.cols + col]
    }

    /// Row-major value slice.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    /// One row of values.
    pub fn row(&self, row: usize) -> &[u64] {
        assert!(row < self.rows, "row index out of range");
        &self.values[row * self.cols..(row + 1) * self.cols]
    }

    /// Total sum of the source image: the bottom-right value.
    pub fn total(&self) -> u64 {
        self.values[self.rows * self.cols - 1]
    }

    /// Differences between horizontally adjacent values of row `row`.
    ///
    /// Entry 0 is the row's first value itself; entry c is
    /// `v(row,c) - v(row,c-1)`. Each entry equals the column prefix sum of
    /// pixels down to `row` in that column, which is exactly the quantity
    /// the engine keeps in its narrow row buffer.
    pub fn adjacent_column_diffs(&self, row: usize) -> Result<Vec<u64>, RegionError> {
        if row >= self.rows {
            return Err(RegionError::RowOutOfRange {
                row,
                rows: self.rows,
            });
        }
        let values = self.row(row);
        let mut diffs = Vec::with_capacity(self.cols);
        diffs.push(values[0]);
        for c in 1..self.cols {
            diffs.push(values[c] - values[c - 1]);
        }
        Ok(diffs)
    }

    /// Sum of pixels in the inclusive rectangle, from four corner lookups.
    ///
    /// Corner terms that would fall above row 0 or left of column 0 count
    /// as zero.
    pub fn box_sum(
        &self,
        top: usize,
        left: usize,
        bottom: usize,
        right: usize,
    ) -> Result<u64, RegionError> {
        if top > bottom || left > right {
            return Err(RegionError::MalformedRect {
                top,
                left,
                bottom,
                right,
            });
        }
        if bottom >= self.rows || right >= self.cols {
            return Err(RegionError::RectOutOfBounds {
                bottom,
                right,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let corner = |r: i64, c: i64| -> u128 {
            if r < 0 || c < 0 {
                0
            } else {
                self.values[r as usize * self.cols + c as usize] as u128
            }
        };
        let (top, left, bottom, right) = (top as i64, left as i64, bottom as i64, right as i64);
        let plus = corner(bottom, right) + corner(top - 1, left - 1);
        let minus = corner(top - 1, right) + corner(bottom, left - 1);
        Ok((plus - minus) as u64)
    }
}

/// Per-row inclusive prefix sums: entry (r, c) is the sum of the pixels of
/// row r through column c. Rows are independent of one another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowSumPlane {
    rows: usize,
    cols: usize,
    sums: Vec<u64>,
}

impl RowSumPlane {
    pub(crate) fn from_computed(rows: usize, cols: usize, sums: Vec<u64>) -> Self {
        debug_assert_eq!(sums.len(), rows * cols);
        Self { rows, cols, sums }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sum(&self, row: usize, col: usize) -> u64 {
        assert!(row < self.rows && col < self.cols, "sum index out of range");
        self.sums[row * self.cols + col]
    }

    /// Row-major slice of the whole plane.
    pub fn sums(&self) -> &[u64] {
        &self.sums
    }

    /// One row of prefix sums.
    pub fn row(&self, row: usize) -> &[u64] {
        assert!(row < self.rows, "row index out of range");
        &self.sums[row * self.cols..(row + 1) * self.cols]
    }
}
