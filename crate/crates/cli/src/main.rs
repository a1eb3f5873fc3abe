//! `iiengine`: integral-image computation, memory sizing reports, engine
//! simulation, and box-sum queries.
//!
//! Exit codes: 0 success, 1 I/O or input-data error, 2 usage error,
//! 3 overflow trap in the simulated engine.

use std::fs;
use std::io::{BufWriter, Write};
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use integral_engine::engine::{self, EngineConfig, EngineError, OverflowPolicy};
use integral_engine::image::Image;
use integral_engine::integral::{integral_naive, integral_row_parallel, integral_serial};
use integral_engine::memory::{figure1_series, memory_profile, Geometry};

use integral_engine_cli::{iim1, output, pgm};

#[derive(Parser)]
#[command(
    name = "iiengine",
    version,
    about = "Integral-image tools: reference computations, buffer sizing reports, and a cycle-level engine simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Brute-force double summation (the reference)
    Naive,
    /// Serial recurrences
    Serial,
    /// Two-phase row-parallel decomposition
    Rowparallel,
    /// Cycle-level difference-buffer engine model
    Engine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ComputeFormat {
    /// One text line per image row, comma separated
    Csv,
    /// IIM1 binary container (u64 little-endian values)
    Iim1,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Table,
}

/// Geometry given as `ROWSxCOLS` — rows first.
#[derive(Clone, Copy)]
struct Size {
    rows: u64,
    cols: u64,
}

fn parse_size(s: &str) -> Result<Size, String> {
    let (rows, cols) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("'{s}' is not of the form ROWSxCOLS"))?;
    let parse = |part: &str| {
        part.trim()
            .parse::<u64>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("'{part}' is not a positive integer in '{s}'"))
    };
    Ok(Size {
        rows: parse(rows)?,
        cols: parse(cols)?,
    })
}

#[derive(Subcommand)]
enum Command {
    /// Compute the integral image of a PGM input
    Compute {
        /// Input image (PGM, P2 or P5)
        image: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Output file
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ComputeFormat::Csv)]
        format: ComputeFormat,
        /// Worker count for the row-parallel method (defaults to the host
        /// parallelism; the output does not depend on it)
        #[arg(long)]
        workers: Option<NonZeroUsize>,
    },
    /// Buffer sizing report for the standard and difference-buffer designs
    Memreport {
        /// Geometries as ROWSxCOLS (rows first), comma separated
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_size)]
        sizes: Vec<Size>,
        /// Maximum pixel value
        #[arg(long, default_value_t = 255)]
        pmax: u64,
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Standard-design total-bits series (CSV suitable for plotting)
    Figure1 {
        /// Geometries as ROWSxCOLS (rows first), comma separated
        #[arg(long, value_delimiter = ',', required = true, value_parser = parse_size)]
        sizes: Vec<Size>,
        /// Maximum pixel value
        #[arg(long, default_value_t = 255)]
        pmax: u64,
        /// Write to a file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stream a PGM through the engine model and print run statistics
    Simulate {
        /// Input image (PGM, P2 or P5)
        image: PathBuf,
        /// Pipeline depth in cycles
        #[arg(long, default_value_t = 2)]
        latency: usize,
        /// Write a per-cycle CSV trace to this path
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Difference-buffer word width override; undersizing it exercises
        /// the overflow trap
        #[arg(long)]
        diff_width: Option<u32>,
        /// Output width override
        #[arg(long)]
        output_width: Option<u32>,
        /// Wrap on overflow like a hardware register instead of trapping
        #[arg(long)]
        wrap: bool,
    },
    /// Sum of an inclusive pixel rectangle via four integral-image lookups
    Boxsum {
        /// Input image (PGM, P2 or P5)
        image: PathBuf,
        top: usize,
        left: usize,
        bottom: usize,
        right: usize,
    },
}

enum CliError {
    /// Exit 1: filesystem failures and malformed input data.
    Io(String),
    /// Exit 2: bad arguments or out-of-range requests.
    Usage(String),
    /// Exit 3: the simulated engine overflowed a configured width.
    Trap(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Trap(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Usage(m) | CliError::Trap(m) => m,
        }
    }
}

fn engine_error(err: EngineError) -> CliError {
    match err {
        EngineError::Overflow { .. } => CliError::Trap(format!("overflow trap: {err}")),
        EngineError::Io(_) => CliError::Io(err.to_string()),
        _ => CliError::Usage(err.to_string()),
    }
}

fn read_image(path: &Path) -> Result<Image, CliError> {
    let bytes =
        fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    pgm::parse_pgm(&bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn geometries(sizes: &[Size], pmax: u64) -> Result<Vec<Geometry>, CliError> {
    sizes
        .iter()
        .map(|s| {
            Geometry::new(s.rows, s.cols, pmax)
                .map_err(|e| CliError::Usage(format!("{}x{} pmax {pmax}: {e}", s.rows, s.cols)))
        })
        .collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_compute(
    image: &Path,
    method: Method,
    out: &Path,
    format: ComputeFormat,
    workers: Option<NonZeroUsize>,
) -> Result<(), CliError> {
    let img = read_image(image)?;
    let ii = match method {
        Method::Naive => integral_naive(&img),
        Method::Serial => integral_serial(&img),
        Method::Rowparallel => {
            let workers = workers
                .or_else(|| thread::available_parallelism().ok())
                .unwrap_or(NonZeroUsize::MIN);
            integral_row_parallel(&img, workers)
        }
        Method::Engine => {
            let cfg = EngineConfig::for_geometry(img.geometry());
            engine::run(&cfg, &img).map_err(engine_error)?.0
        }
    };
    let bytes = match format {
        ComputeFormat::Csv => output::integral_csv(&ii).into_bytes(),
        ComputeFormat::Iim1 => {
            let mut buf = Vec::new();
            iim1::write_iim1(&ii, &mut buf).map_err(|e| CliError::Io(e.to_string()))?;
            buf
        }
    };
    write_file(out, &bytes)
}

fn cmd_memreport(
    sizes: &[Size],
    pmax: u64,
    format: ReportFormat,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let profiles: Vec<_> = geometries(sizes, pmax)?
        .into_iter()
        .map(memory_profile)
        .collect();
    let text = match format {
        ReportFormat::Csv => output::memreport_csv(&profiles),
        ReportFormat::Table => output::memreport_table(&profiles),
    };
    emit(out, &text)
}

fn cmd_figure1(sizes: &[Size], pmax: u64, out: Option<&Path>) -> Result<(), CliError> {
    let series = figure1_series(&geometries(sizes, pmax)?);
    emit(out, &output::figure1_csv(&series))
}

fn cmd_simulate(
    image: &Path,
    latency: usize,
    trace: Option<&Path>,
    diff_width: Option<u32>,
    output_width: Option<u32>,
    wrap: bool,
) -> Result<(), CliError> {
    let img = read_image(image)?;
    let mut cfg = EngineConfig::for_geometry(img.geometry()).with_pipeline_latency(latency);
    if let Some(bits) = diff_width {
        cfg = cfg.with_diff_width_bits(bits);
    }
    if let Some(bits) = output_width {
        cfg = cfg.with_output_width_bits(bits);
    }
    if wrap {
        cfg = cfg.with_overflow_policy(OverflowPolicy::Wrap);
    }

    let started = Instant::now();
    let result = match trace {
        Some(path) => {
            let file = fs::File::create(path)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            let mut writer = BufWriter::new(file);
            let result = engine::run_traced_csv(&cfg, &img, &mut writer);
            writer
                .flush()
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
            result
        }
        None => engine::run(&cfg, &img),
    };
    let (_, stats) = result.map_err(engine_error)?;
    print!("{}", output::simulate_summary(&cfg, &stats));
    println!("wall time: {:.3}s", started.elapsed().as_secs_f64());
    Ok(())
}

fn cmd_boxsum(
    image: &Path,
    top: usize,
    left: usize,
    bottom: usize,
    right: usize,
) -> Result<(), CliError> {
    let img = read_image(image)?;
    let ii = integral_serial(&img);
    let sum = ii
        .box_sum(top, left, bottom, right)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    println!("{sum}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Compute {
            image,
            method,
            out,
            format,
            workers,
        } => cmd_compute(&image, method, &out, format, workers),
        Command::Memreport {
            sizes,
            pmax,
            format,
            out,
        } => cmd_memreport(&sizes, pmax, format, out.as_deref()),
        Command::Figure1 { sizes, pmax, out } => cmd_figure1(&sizes, pmax, out.as_deref()),
        Command::Simulate {
            image,
            latency,
            trace,
            diff_width,
            output_width,
            wrap,
        } => cmd_simulate(
            &image,
            latency,
            trace.as_deref(),
            diff_width,
            output_width,
            wrap,
        ),
        Command::Boxsum {
            image,
            top,
            left,
            bottom,
            right,
        } => cmd_boxsum(&image, top, left, bottom, right),
    }
}

fn main() -> ExitCode {
    // clap itself exits with 2 on argument errors, matching Usage below.
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}
