//! Cycle-level model of the difference-buffered integral-image engine.
//!
//! The modeled datapath computes two integral-image values per clock from a
//! pair of pixels in the same row. Instead of keeping a full row of
//! integral values between rows, it keeps only the differences between
//! horizontally adjacent values — one column sum per buffer word — plus the
//! first-column integral value in a separate register. Reading a buffer
//! word, adding the incoming pixel, writing it back, and chaining the
//! result onto the previous column's integral value reconstructs the full
//! values on the fly:
//!
//! ```text
//! d_new(c)  = d_old(c) + i(r,c)           // column sum through row r
//! ii(r,c)   = ii(r,c-1) + d_new(c)        // ii(r,0) = d_new(0)
//! ```
//!
//! The column sum never exceeds `rows * pmax`, so buffer words are narrow;
//! that bound is what the sizing model in [`crate::memory`] exploits.
//!
//! The model is bit-width faithful: every buffer word and output is checked
//! against its configured width each cycle, and a mis-sized configuration
//! either traps (default) or wraps like a hardware register, by choice.
//! Results move through a configurable-depth pipeline, so values computed
//! in cycle `n` emerge in cycle `n + latency`. State is per frame; a new
//! frame needs a fresh [`Engine`], matching a design that re-zeroes its
//! buffer during vertical blanking.

use std::collections::VecDeque;
use std::fmt;
use std::io;

use thiserror::Error;

use crate::image::{Image, IntegralImage};
use crate::memory::{safe_width, Geometry};

/// What to do when a value exceeds its configured bit width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverflowPolicy {
    /// Fail the run; distinguishes a sizing bug from silent corruption.
    Trap,
    /// Discard high bits like a hardware register would.
    Wrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverflowSite {
    DiffBuffer,
    Output,
}

impl fmt::Display for OverflowSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OverflowSite::DiffBuffer => write!(f, "difference buffer"),
            OverflowSite::Output => write!(f, "output"),
        }
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{site} value {value} needs more than {width_bits} bits at cycle {cycle} (row {row}, col {col})")]
    Overflow {
        site: OverflowSite,
        cycle: u64,
        row: usize,
        col: usize,
        value: u128,
        width_bits: u32,
    },
    #[error("{site} width {got} bits is below the safe minimum {min}; set it explicitly to exercise the overflow trap")]
    WidthBelowSafeMinimum {
        site: OverflowSite,
        got: u32,
        min: u32,
    },
    #[error("width {got} bits exceeds the 64-bit datapath")]
    WidthTooWide { got: u32 },
    #[error("pixels fed past the end of the image")]
    PastEndOfImage,
    #[error("cycle at column {col} expects {expected} pixel(s), got {got}")]
    PairWidthMismatch {
        col: usize,
        expected: usize,
        got: usize,
    },
    #[error("pixel value {value} exceeds configured pmax {pmax}")]
    PixelAbovePmax { value: u32, pmax: u64 },
    #[error("config geometry is {config}, image is {image_rows}x{image_cols} pmax {image_pmax}")]
    GeometryMismatch {
        config: Geometry,
        image_rows: usize,
        image_cols: usize,
        image_pmax: u32,
    },
    #[error("trace sink: {0}")]
    Io(#[from] io::Error),
}

/// Simulator parameters: geometry, register widths, and pipeline depth.
///
/// Defaults size both widths with [`safe_width`], which can represent every
/// reachable value, including exact powers of two that the plain
/// `ceil(log2)` convention cannot. Narrower widths must be set explicitly;
/// [`Engine::new`] rejects implicitly undersized configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineConfig {
    geometry: Geometry,
    diff_width_bits: u32,
    output_width_bits: u32,
    pipeline_latency: usize,
    overflow_policy: OverflowPolicy,
    explicit_widths: bool,
}

impl EngineConfig {
    /// Safe defaults for a geometry: trap on overflow, latency 2 (buffer
    /// read/add stage, chained add/output stage).
    pub fn for_geometry(geometry: Geometry) -> Self {
        Self {
            geometry,
            diff_width_bits: safe_width(geometry.max_column_sum()),
            output_width_bits: safe_width(geometry.max_output_value()),
            pipeline_latency: 2,
            overflow_policy: OverflowPolicy::Trap,
            explicit_widths: false,
        }
    }

    pub fn with_pipeline_latency(mut self, cycles: usize) -> Self {
        self.pipeline_latency = cycles;
        self
    }

    /// Explicitly sets the difference-buffer word width. Marks the widths
    /// as deliberate, which permits undersized values.
    pub fn with_diff_width_bits(mut self, bits: u32) -> Self {
        self.diff_width_bits = bits;
        self.explicit_widths = true;
        self
    }

    /// Explicitly sets the output width. Marks the widths as deliberate,
    /// which permits undersized values.
    pub fn with_output_width_bits(mut self, bits: u32) -> Self {
        self.output_width_bits = bits;
        self.explicit_widths = true;
        self
    }

    pub fn with_overflow_policy(mut self, policy: OverflowPolicy) -> Self {
        self.overflow_policy = policy;
        self
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn diff_width_bits(&self) -> u32 {
        self.diff_width_bits
    }

    pub fn output_width_bits(&self) -> u32 {
        self.output_width_bits
    }

    pub fn pipeline_latency(&self) -> usize {
        self.pipeline_latency
    }

    pub fn overflow_policy(&self) -> OverflowPolicy {
        self.overflow_policy
    }
}

/// One integral-image value leaving the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Output {
    pub row: usize,
    pub col: usize,
    pub value: u64,
}

/// An exact ratio of outputs to cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        // gcd(0, den) = den, so 0/anything reduces to 0/1.
        let g = gcd(num, den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Counters from a completed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleStats {
    /// Compute cycles plus pipeline drain: `latency + rows * ceil(cols/2)`.
    pub total_cycles: u64,
    /// Always `rows * cols`.
    pub outputs_emitted: u64,
    /// Outputs per compute cycle once the pipeline is full:
    /// `cols / ceil(cols/2)`, i.e. exactly 2 for even widths.
    pub steady_state_throughput: Rational,
    /// Largest value ever written to the difference buffer.
    pub peak_buffer_value: u64,
    /// Row being processed when the peak was last raised.
    pub peak_buffer_row: usize,
}

/// One read-modify-write of a difference-buffer word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BufferOp {
    pub col: usize,
    pub old: u64,
    pub new: u64,
}

/// Everything observable in one clock cycle.
///
/// Serialized form (see [`TraceRecord::CSV_HEADER`]): `row` and `col` are
/// the cursor of the pixel pair consumed this cycle (`col` is the pair's
/// base column; empty on drain cycles), `buf_read`/`buf_write` are the old
/// and new buffer words in pair order joined with `;`, `first_col_reg` is
/// the register value when latched this cycle, and `out0`/`out1` are the
/// values emerging from the pipeline. Outputs emerge in row-major scan
/// order, so collecting `out0`/`out1` across a whole trace reconstructs the
/// integral image without needing positions in the record.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TraceRecord {
    pub cycle: u64,
    /// (row, base column) of the pair consumed this cycle, if any.
    pub cursor: Option<(usize, usize)>,
    pub buffer_ops: Vec<BufferOp>,
    pub first_col_update: Option<u64>,
    pub emitted: Vec<Output>,
}

impl TraceRecord {
    pub const CSV_HEADER: &'static str = "cycle,row,col,buf_read,buf_write,first_col_reg,out0,out1";

    pub fn to_csv_line(&self) -> String {
        let join = |f: fn(&BufferOp) -> u64| -> String {
            self.buffer_ops
                .iter()
                .map(|op| f(op).to_string())
                .collect::<Vec<_>>()
                .join(";")
        };
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            self.cycle,
            opt(self.cursor.map(|(r, _)| r.to_string())),
            opt(self.cursor.map(|(_, c)| c.to_string())),
            join(|op| op.old),
            join(|op| op.new),
            opt(self.first_col_update.map(|v| v.to_string())),
            opt(self.emitted.first().map(|o| o.value.to_string())),
            opt(self.emitted.get(1).map(|o| o.value.to_string())),
        )
    }
}

struct Pending {
    ready_at: u64,
    output: Output,
}

/// Live simulator state: the narrow difference buffer, the first-column
/// register, the scan cursor, and the in-flight pipeline.
pub struct Engine {
    cfg: EngineConfig,
    rows: usize,
    cols: usize,
    diff_buffer: Vec<u64>,
    first_col_reg: u64,
    row: usize,
    pair: usize,
    row_acc: u64,
    pipeline: VecDeque<Pending>,
    cycle_count: u64,
    outputs_emitted: u64,
    peak_buffer_value: u64,
    peak_buffer_row: usize,
}

impl Engine {
    /// Fresh state: zeroed buffer and register, cursor at the first pixel
    /// pair, empty pipeline, cycle count 0.
    pub fn new(cfg: EngineConfig) -> Result<Self, EngineError> {
        for (got, site) in [
            (cfg.diff_width_bits, OverflowSite::DiffBuffer),
            (cfg.output_width_bits, OverflowSite::Output),
        ] {
            if got > 64 {
                return Err(EngineError::WidthTooWide { got });
            }
            let min = match site {
                OverflowSite::DiffBuffer => safe_width(cfg.geometry.max_column_sum()),
                OverflowSite::Output => safe_width(cfg.geometry.max_output_value()),
            };
            if got < min && !cfg.explicit_widths {
                return Err(EngineError::WidthBelowSafeMinimum { site, got, min });
            }
        }
        let rows = cfg.geometry.rows() as usize;
        let cols = cfg.geometry.cols() as usize;
        Ok(Self {
            cfg,
            rows,
            cols,
            diff_buffer: vec![0; cols],
            first_col_reg: 0,
            row: 0,
            pair: 0,
            row_acc: 0,
            pipeline: VecDeque::new(),
            cycle_count: 0,
            outputs_emitted: 0,
            peak_buffer_value: 0,
            peak_buffer_row: 0,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// Column sums of the most recently completed rows, one word per column.
    pub fn diff_buffer(&self) -> &[u64] {
        &self.diff_buffer
    }

    /// Integral value of the current row's first column.
    pub fn first_col_reg(&self) -> u64 {
        self.first_col_reg
    }

    pub fn cycle_count(&self) -> u64 {
        self.cycle_count
    }

    pub fn peak_buffer_value(&self) -> u64 {
        self.peak_buffer_value
    }

    /// (row, base column) of the next pixel pair, or `None` when the whole
    /// image has been fed.
    pub fn cursor(&self) -> Option<(usize, usize)> {
        (self.row < self.rows).then_some((self.row, self.pair * 2))
    }

    /// Number of pixels the next [`Engine::step`] call expects: 2, or 1 for
    /// the lone final column of an odd-width row.
    pub fn expected_pixels(&self) -> usize {
        self.cursor().map_or(0, |(_, c0)| (self.cols - c0).min(2))
    }

    /// Runs one clock cycle: consumes the next one or two pixels of the
    /// current row, updates the buffer and registers, and returns whatever
    /// emerges from the pipeline this cycle.
    ///
    /// Pairs never straddle rows, so an odd-width row ends with a
    /// single-pixel cycle.
    pub fn step(&mut self, pixels: &[u32]) -> Result<Vec<Output>, EngineError> {
        let mut emitted = Vec::with_capacity(2);
        self.advance(Some(pixels), &mut emitted, None)?;
        Ok(emitted)
    }

    /// Runs one clock cycle without feeding pixels, letting in-flight
    /// results emerge.
    pub fn drain_cycle(&mut self) -> Vec<Output> {
        let mut emitted = Vec::with_capacity(2);
        self.advance(None, &mut emitted, None)
            .expect("a drain cycle performs no arithmetic");
        emitted
    }

    pub fn pipeline_is_empty(&self) -> bool {
        self.pipeline.is_empty()
    }

    fn advance(
        &mut self,
        pixels: Option<&[u32]>,
        emitted: &mut Vec<Output>,
        mut record: Option<&mut TraceRecord>,
    ) -> Result<(), EngineError> {
        // Feed validation happens before the clock edge, so a rejected call
        // leaves the cycle count untouched. Only overflow aborts mid-cycle.
        if let Some(pixels) = pixels {
            if self.row >= self.rows {
                return Err(EngineError::PastEndOfImage);
            }
            let base_col = self.pair * 2;
            let expected = (self.cols - base_col).min(2);
            if pixels.len() != expected {
                return Err(EngineError::PairWidthMismatch {
                    col: base_col,
                    expected,
                    got: pixels.len(),
                });
            }
            for &pixel in pixels {
                if pixel as u64 > self.cfg.geometry.pmax() {
                    return Err(EngineError::PixelAbovePmax {
                        value: pixel,
                        pmax: self.cfg.geometry.pmax(),
                    });
                }
            }
        }

        self.cycle_count += 1;
        let now = self.cycle_count;
        if let Some(rec) = record.as_deref_mut() {
            rec.cycle = now;
            rec.cursor = None;
            rec.buffer_ops.clear();
            rec.first_col_update = None;
            rec.emitted.clear();
        }

        if let Some(pixels) = pixels {
            let base_col = self.pair * 2;
            let expected = pixels.len();
            if let Some(rec) = record.as_deref_mut() {
                rec.cursor = Some((self.row, base_col));
            }

            for (k, &pixel) in pixels.iter().enumerate() {
                let col = base_col + k;
                let old = self.diff_buffer[col];
                let diff = self.clamp(
                    old as u128 + pixel as u128,
                    self.cfg.diff_width_bits,
                    OverflowSite::DiffBuffer,
                    col,
                )?;
                self.diff_buffer[col] = diff;
                if diff > self.peak_buffer_value {
                    self.peak_buffer_value = diff;
                    self.peak_buffer_row = self.row;
                }

                let chained = if col == 0 { 0 } else { self.row_acc };
                let value = self.clamp(
                    chained as u128 + diff as u128,
                    self.cfg.output_width_bits,
                    OverflowSite::Output,
                    col,
                )?;
                if col == 0 {
                    self.first_col_reg = value;
                    if let Some(rec) = record.as_deref_mut() {
                        rec.first_col_update = Some(value);
                    }
                }
                self.row_acc = value;

                if let Some(rec) = record.as_deref_mut() {
                    rec.buffer_ops.push(BufferOp {
                        col,
                        old,
                        new: diff,
                    });
                }
                self.pipeline.push_back(Pending {
                    ready_at: now + self.cfg.pipeline_latency as u64,
                    output: Output {
                        row: self.row,
                        col,
                        value,
                    },
                });
            }

            if base_col + expected == self.cols {
                self.row += 1;
                self.pair = 0;
                self.row_acc = 0;
            } else {
                self.pair += 1;
            }
        }

        while self
            .pipeline
            .front()
            .is_some_and(|pending| pending.ready_at <= now)
        {
            let output = self.pipeline.pop_front().expect("front checked").output;
            self.outputs_emitted += 1;
            emitted.push(output);
            if let Some(rec) = record.as_deref_mut() {
                rec.emitted.push(output);
            }
        }
        Ok(())
    }

    fn clamp(
        &self,
        value: u128,
        width_bits: u32,
        site: OverflowSite,
        col: usize,
    ) -> Result<u64, EngineError> {
        if value < (1u128 << width_bits) {
            return Ok(value as u64);
        }
        match self.cfg.overflow_policy {
            OverflowPolicy::Trap => Err(EngineError::Overflow {
                site,
                cycle: self.cycle_count,
                row: self.row,
                col,
                value,
                width_bits,
            }),
            OverflowPolicy::Wrap => {
                let mask = if width_bits == 64 {
                    u64::MAX
                } else {
                    (1u64 << width_bits) - 1
                };
                Ok(value as u64 & mask)
            }
        }
    }

    fn stats(&self) -> CycleStats {
        CycleStats {
            total_cycles: self.cycle_count,
            outputs_emitted: self.outputs_emitted,
            steady_state_throughput: Rational::new(self.cols as u64, self.cols.div_ceil(2) as u64),
            peak_buffer_value: self.peak_buffer_value,
            peak_buffer_row: self.peak_buffer_row,
        }
    }
}

/// Streams a whole image through the engine, drains the pipeline, and
/// returns the assembled integral image with run statistics.
pub fn run(cfg: &EngineConfig, img: &Image) -> Result<(IntegralImage, CycleStats), EngineError> {
    run_inner(cfg, img, None::<&mut fn(&TraceRecord) -> io::Result<()>>)
}

/// Like [`run`], invoking `sink` with the trace record of every cycle,
/// drain cycles included. Sink failures abort the run.
pub fn run_with_trace<F>(
    cfg: &EngineConfig,
    img: &Image,
    mut sink: F,
) -> Result<(IntegralImage, CycleStats), EngineError>
where
    F: FnMut(&TraceRecord) -> io::Result<()>,
{
    run_inner(cfg, img, Some(&mut sink))
}

/// Like [`run`], writing the trace as CSV (header line included) to `out`.
pub fn run_traced_csv<W: io::Write>(
    cfg: &EngineConfig,
    img: &Image,
    out: &mut W,
) -> Result<(IntegralImage, CycleStats), EngineError> {
    writeln!(out, "{}", TraceRecord::CSV_HEADER)?;
    run_with_trace(cfg, img, |rec| writeln!(out, "{}", rec.to_csv_line()))
}

fn run_inner<F>(
    cfg: &EngineConfig,
    img: &Image,
    mut sink: Option<&mut F>,
) -> Result<(IntegralImage, CycleStats), EngineError>
where
    F: FnMut(&TraceRecord) -> io::Result<()>,
{
    let g = cfg.geometry();
    if img.rows() as u64 != g.rows()
        || img.cols() as u64 != g.cols()
        || img.pmax() as u64 != g.pmax()
    {
        return Err(EngineError::GeometryMismatch {
            config: g,
            image_rows: img.rows(),
            image_cols: img.cols(),
            image_pmax: img.pmax(),
        });
    }

    let mut engine = Engine::new(*cfg)?;
    let rows = img.rows();
    let cols = img.cols();
    let mut values = vec![0u64; rows * cols];
    let mut emitted = Vec::with_capacity(2);
    let mut record = TraceRecord::default();

    for r in 0..rows {
        let pixels = img.row(r);
        let mut c = 0;
        while c < cols {
            let take = (cols - c).min(2);
            let rec = sink.is_some().then_some(&mut record);
            engine.advance(Some(&pixels[c..c + take]), &mut emitted, rec)?;
            if let Some(sink) = sink.as_deref_mut() {
                sink(&record)?;
            }
            for out in emitted.drain(..) {
                values[out.row * cols + out.col] = out.value;
            }
            c += take;
        }
    }
    while !engine.pipeline_is_empty() {
        let rec = sink.is_some().then_some(&mut record);
        engine.advance(None, &mut emitted, rec)?;
        if let Some(sink) = sink.as_deref_mut() {
            sink(&record)?;
        }
        for out in emitted.drain(..) {
            values[out.row * cols + out.col] = out.value;
        }
    }

    let stats = engine.stats();
    debug_assert_eq!(stats.outputs_emitted, (rows * cols) as u64);
    Ok((IntegralImage::from_computed(rows, cols, values), stats))
}
