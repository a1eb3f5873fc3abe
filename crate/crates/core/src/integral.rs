//! Reference integral-image computations.
//!
//! Three routes to the same grid, used to cross-check one another and the
//! cycle-level engine model:
//!
//! - [`integral_naive`]: direct double summation per output value, the
//!   golden model everything else is compared against,
//! - [`integral_serial`]: the serial Viola–Jones recurrences (running row
//!   sum, then vertical accumulation),
//! - [`integral_row_parallel`]: the same two recurrences decomposed into a
//!   row-parallel phase and a column-distributable phase.
//!
//! All three produce bit-identical [`IntegralImage`]s for any valid input;
//! the parallel variant is bit-identical for every worker count.

use std::num::NonZeroUsize;
use std::thread;

use crate::image::{Image, IntegralImage, RowSumPlane};

/// Integral image by direct double summation.
///
/// Every output value is computed by summing its own rectangle of pixels
/// from scratch; no partial sums are shared between cells. Quadratic in the
/// rectangle area, so this is the slowest route by far, but its simplicity
/// is the point: it is the oracle the recursive methods and the engine
/// simulator are verified against. Rows are dealt out to threads when the
/// host has them; the per-cell arithmetic is unaffected.
pub fn integral_naive(img: &Image) -> IntegralImage {
    let rows = img.rows();
    let cols = img.cols();
    let threads = available_threads(rows);
    let mut values = vec![0u64; rows * cols];

    if threads == 1 {
        for (r, out_row) in values.chunks_exact_mut(cols).enumerate() {
            naive_row(img, r, out_row);
        }
    } else {
        // Later rows cost more, so deal rows round-robin to balance work.
        thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|t| {
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut r = t;
                        while r < rows {
                            let mut row = vec![0u64; cols];
                            naive_row(img, r, &mut row);
                            out.push((r, row));
                            r += threads;
                        }
                        out
                    })
                })
                .collect();
            for handle in handles {
                for (r, row) in handle.join().expect("worker panicked") {
                    values[r * cols..(r + 1) * cols].copy_from_slice(&row);
                }
            }
        });
    }

    IntegralImage::from_computed(rows, cols, values)
}

fn naive_row(img: &Image, r: usize, out: &mut [u64]) {
    for (c, slot) in out.iter_mut().enumerate() {
        let mut acc = 0u64;
        for rr in 0..=r {
            let mut row_sum = 0u64;
            for &px in &img.row(rr)[..=c] {
                row_sum += px as u64;
            }
            acc += row_sum;
        }
        *slot = acc;
    }
}

/// Integral image via the serial recurrences: a running sum along the
/// current row plus the value directly above,
/// `s(r,c) = s(r,c-1) + i(r,c)` and `ii(r,c) = ii(r-1,c) + s(r,c)`,
/// with both recurrences zero outside the grid.
pub fn integral_serial(img: &Image) -> IntegralImage {
    let rows = img.rows();
    let cols = img.cols();
    let mut values = vec![0u64; rows * cols];
    for r in 0..rows {
        let pixels = img.row(r);
        let mut row_sum = 0u64;
        for c in 0..cols {
            row_sum += pixels[c] as u64;
            let above = if r == 0 {
                0
            } else {
                values[(r - 1) * cols + c]
            };
            values[r * cols + c] = above + row_sum;
        }
    }
    IntegralImage::from_computed(rows, cols, values)
}

/// Per-row inclusive prefix sums. Rows are independent, which is what makes
/// the row-parallel decomposition possible.
pub fn row_sum_plane(img: &Image) -> RowSumPlane {
    let rows = img.rows();
    let cols = img.cols();
    let mut sums = vec![0u64; rows * cols];
    for (out_row, px_row) in sums
        .chunks_exact_mut(cols)
        .zip(img.pixels().chunks_exact(cols))
    {
        prefix_row(px_row, out_row);
    }
    RowSumPlane::from_computed(rows, cols, sums)
}

/// Row-parallel integral image.
///
/// Phase 1 computes the row-sum plane with rows distributed over `workers`;
/// phase 2 accumulates vertically, `ii(r,c) = ii(r-1,c) + S(r,c)`, with
/// columns distributed over `workers`. Both phases assign each output
/// element to exactly one worker and use exact integer addition, so the
/// result is bit-identical to [`integral_naive`] for every worker count.
pub fn integral_row_parallel(img: &Image, workers: NonZeroUsize) -> IntegralImage {
    let rows = img.rows();
    let cols = img.cols();
    let workers = workers.get();
    let mut values = vec![0u64; rows * cols];

    // Phase 1: row prefix sums.
    if workers == 1 {
        for (out_row, px_row) in values
            .chunks_exact_mut(cols)
            .zip(img.pixels().chunks_exact(cols))
        {
            prefix_row(px_row, out_row);
        }
    } else {
        let block = rows.div_ceil(workers) * cols;
        thread::scope(|scope| {
            for (out_block, px_block) in values.chunks_mut(block).zip(img.pixels().chunks(block)) {
                scope.spawn(move || {
                    for (out_row, px_row) in out_block
                        .chunks_exact_mut(cols)
                        .zip(px_block.chunks_exact(cols))
                    {
                        prefix_row(px_row, out_row);
                    }
                });
            }
        });
    }

    // Phase 2: vertical accumulation of the row sums.
    if rows > 1 {
        if workers == 1 {
            for r in 1..rows {
                let (head, tail) = values.split_at_mut(r * cols);
                let prev = &head[(r - 1) * cols..];
                for (cur, &above) in tail[..cols].iter_mut().zip(prev) {
                    *cur += above;
                }
            }
        } else {
            // Transpose so each worker owns whole columns as contiguous
            // memory, accumulate down each column, transpose back.
            let mut transposed = vec![0u64; rows * cols];
            for r in 0..rows {
                for c in 0..cols {
                    transposed[c * rows + r] = values[r * cols + c];
                }
            }
            let block = cols.div_ceil(workers) * rows;
            thread::scope(|scope| {
                for col_block in transposed.chunks_mut(block) {
                    scope.spawn(move || {
                        for column in col_block.chunks_exact_mut(rows) {
                            let mut acc = 0u64;
                            for v in column {
                                acc += *v;
                                *v = acc;
                            }
                        }
                    });
                }
            });
            for r in 0..rows {
                for c in 0..cols {
                    values[r * cols + c] = transposed[c * rows + r];
                }
            }
        }
    }

    IntegralImage::from_computed(rows, cols, values)
}

fn prefix_row(pixels: &[u32], out: &mut [u64]) {
    let mut acc = 0u64;
    for (slot, &px) in out.iter_mut().zip(pixels) {
        acc += px as u64;
        *slot = acc;
    }
}

fn available_threads(rows: usize) -> usize {
    thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img(rows: usize, cols: usize, pixels: &[u32]) -> Image {
        Image::new(rows, cols, 255, pixels.to_vec()).unwrap()
    }

    #[test]
    fn naive_single_pixel() {
        let ii = integral_naive(&img(1, 1, &[5]));
        assert_eq!(ii.values(), &[5]);
    }

    #[test]
    fn naive_all_ones_total_is_pixel_count() {
        let ii = integral_naive(&Image::constant(3, 3, 255, 1).unwrap());
        assert_eq!(ii.value(2, 2), 9);
    }

    #[test]
    fn naive_two_by_two() {
        let ii = integral_naive(&img(2, 2, &[1, 2, 3, 4]));
        assert_eq!(ii.values(), &[1, 3, 4, 10]);
    }

    #[test]
    fn serial_matches_naive_two_by_two() {
        let ii = integral_serial(&img(2, 2, &[1, 2, 3, 4]));
        assert_eq!(ii.values(), &[1, 3, 4, 10]);
    }

    #[test]
    fn serial_single_row_is_prefix_sums() {
        let ii = integral_serial(&img(1, 4, &[2, 7, 1, 8]));
        assert_eq!(ii.values(), &[2, 9, 10, 18]);
    }

    #[test]
    fn serial_matches_naive_on_fixed_random_image() {
        // 5x7, pmax 255, fixed pattern
        let image =
            Image::from_fn(5, 7, 255, |r, c| ((r * 131 + c * 37 + 11) % 256) as u32).unwrap();
        assert_eq!(integral_serial(&image), integral_naive(&image));
    }

    #[test]
    fn row_sum_plane_examples() {
        let plane = row_sum_plane(&img(2, 2, &[1, 2, 3, 4]));
        assert_eq!(plane.sums(), &[1, 3, 3, 7]);

        let zeros = row_sum_plane(&Image::constant(3, 4, 255, 0).unwrap());
        assert!(zeros.sums().iter().all(|&s| s == 0));

        let single_col = row_sum_plane(&img(3, 1, &[4, 5, 6]));
        assert_eq!(single_col.sums(), &[4, 5, 6]);
    }

    #[test]
    fn row_parallel_matches_naive() {
        let image = img(2, 2, &[1, 2, 3, 4]);
        let one = NonZeroUsize::new(1).unwrap();
        assert_eq!(integral_row_parallel(&image, one).values(), &[1, 3, 4, 10]);

        let image = Image::from_fn(16, 16, 255, |r, c| ((r * 31 + c * 7) % 256) as u32).unwrap();
        let expected = integral_naive(&image);
        for workers in [1usize, 2, 4, 8] {
            let w = NonZeroUsize::new(workers).unwrap();
            assert_eq!(
                integral_row_parallel(&image, w),
                expected,
                "workers={workers}"
            );
        }
    }

    #[test]
    fn row_parallel_worker_count_does_not_change_output() {
        let image = Image::from_fn(9, 5, 255, |r, c| ((r * 53 + c * 17 + 3) % 256) as u32).unwrap();
        let w1 = integral_row_parallel(&image, NonZeroUsize::new(1).unwrap());
        let w8 = integral_row_parallel(&image, NonZeroUsize::new(8).unwrap());
        assert_eq!(w1, w8);
    }
}
