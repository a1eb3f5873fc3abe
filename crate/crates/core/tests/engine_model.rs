//! Simulator checks against the golden model: value equivalence, buffer
//! semantics, width bounds, cycle accounting, and trace fidelity.

use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};

use integral_engine::engine::{
    run, run_traced_csv, EngineConfig, OverflowPolicy, Rational, TraceRecord,
};
use integral_engine::image::Image;
use integral_engine::integral::integral_naive;
use integral_engine::memory::Geometry;
use integral_engine::Engine;

fn random_image(rng: &mut StdRng, max_dim: usize, pmax: u32) -> Image {
    let rows = rng.random_range(1..=max_dim);
    let cols = rng.random_range(1..=max_dim);
    let pixels = (0..rows * cols)
        .map(|_| rng.random_range(0..=pmax))
        .collect();
    Image::new(rows, cols, pmax, pixels).unwrap()
}

fn config_for(img: &Image) -> EngineConfig {
    let g = Geometry::new(img.rows() as u64, img.cols() as u64, img.pmax() as u64).unwrap();
    EngineConfig::for_geometry(g)
}

#[test]
fn engine_matches_oracle_across_random_corpus() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    for round in 0..150 {
        let pmax = [1u32, 255, 65535][round % 3];
        let img = random_image(&mut rng, 48, pmax);
        let cfg = config_for(&img);
        let (ii, stats) = run(&cfg, &img).expect("default widths never trap");
        assert_eq!(ii, integral_naive(&img), "round {round}");
        assert_eq!(stats.outputs_emitted, (img.rows() * img.cols()) as u64);
        assert!(stats.peak_buffer_value <= img.rows() as u64 * pmax as u64);
    }
}

#[test]
fn buffer_holds_column_sums_after_each_row() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for _ in 0..25 {
        let img = random_image(&mut rng, 12, 255);
        let oracle = integral_naive(&img);
        let mut engine = Engine::new(config_for(&img)).unwrap();
        for r in 0..img.rows() {
            let pixels = img.row(r);
            let mut c = 0;
            while c < img.cols() {
                let take = (img.cols() - c).min(2);
                engine.step(&pixels[c..c + take]).unwrap();
                c += take;
            }
            assert_eq!(
                engine.diff_buffer(),
                oracle.adjacent_column_diffs(r).unwrap().as_slice(),
                "row {r}"
            );
        }
    }
}

#[test]
fn cycle_count_formula_holds_for_all_latencies() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0003);
    for _ in 0..40 {
        let img = random_image(&mut rng, 32, 255);
        for latency in [0usize, 1, 2, 5] {
            let cfg = config_for(&img).with_pipeline_latency(latency);
            let (ii, stats) = run(&cfg, &img).unwrap();
            let pairs_per_row = img.cols().div_ceil(2) as u64;
            assert_eq!(
                stats.total_cycles,
                latency as u64 + img.rows() as u64 * pairs_per_row
            );
            assert_eq!(ii, integral_naive(&img), "latency {latency}");
        }
    }
}

#[test]
fn steady_state_throughput_is_two_for_even_widths() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0004);
    for _ in 0..40 {
        let img = random_image(&mut rng, 32, 255);
        let (_, stats) = run(&config_for(&img), &img).unwrap();
        if img.cols().is_multiple_of(2) {
            assert_eq!(stats.steady_state_throughput, Rational::new(2, 1));
        } else {
            assert_eq!(
                stats.steady_state_throughput,
                Rational::new(img.cols() as u64, img.cols().div_ceil(2) as u64)
            );
            assert!(stats.steady_state_throughput.as_f64() <= 2.0);
        }
    }
}

#[test]
fn peak_buffer_value_is_tight_on_constant_images() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    for pmax in [1u32, 255, 65535] {
        for _ in 0..10 {
            let rows = rng.random_range(1..=24);
            let cols = rng.random_range(1..=24);
            let img = Image::constant(rows, cols, pmax, pmax).unwrap();
            let (_, stats) = run(&config_for(&img), &img).unwrap();
            assert_eq!(stats.peak_buffer_value, rows as u64 * pmax as u64);
            assert_eq!(stats.peak_buffer_row, rows - 1);
        }
    }
}

/// Rebuilds the output stream from a CSV trace: outputs emerge in scan
/// order, so the non-empty out0/out1 fields are the integral image.
fn replay_csv_outputs(csv: &str) -> Vec<u64> {
    let mut values = Vec::new();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 8, "malformed trace line: {line}");
        for field in [fields[6], fields[7]] {
            if !field.is_empty() {
                values.push(field.parse::<u64>().unwrap());
            }
        }
    }
    values
}

#[test]
fn replaying_a_trace_reconstructs_the_outputs() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    for _ in 0..20 {
        let img = random_image(&mut rng, 16, 255);
        let cfg = config_for(&img);
        let mut csv = Vec::new();
        let (ii, stats) = run_traced_csv(&cfg, &img, &mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();

        assert_eq!(csv.lines().count() as u64, 1 + stats.total_cycles);
        assert_eq!(replay_csv_outputs(&csv), ii.values());
    }
}

#[test]
fn traces_are_deterministic() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let img = random_image(&mut rng, 20, 255);
    let cfg = config_for(&img);
    let mut first = Vec::new();
    let mut second = Vec::new();
    run_traced_csv(&cfg, &img, &mut first).unwrap();
    run_traced_csv(&cfg, &img, &mut second).unwrap();
    assert_eq!(first, second);
}

#[test]
fn trace_records_expose_buffer_ops() {
    let img = Image::new(2, 2, 255, vec![1, 2, 3, 4]).unwrap();
    let cfg = config_for(&img);
    let mut records: Vec<TraceRecord> = Vec::new();
    integral_engine::engine::run_with_trace(&cfg, &img, |rec| {
        records.push(rec.clone());
        Ok(())
    })
    .unwrap();
    assert_eq!(records.len(), 4);
    assert_eq!(records[0].cursor, Some((0, 0)));
    assert_eq!(records[0].buffer_ops.len(), 2);
    assert_eq!(records[0].first_col_update, Some(1));
    assert_eq!(records[1].buffer_ops[0].old, 1);
    assert_eq!(records[1].buffer_ops[0].new, 4);
    assert!(records[2].cursor.is_none());
    assert_eq!(records[3].emitted.last().unwrap().value, 10);
}

#[test]
fn default_widths_never_trap_and_wrap_mode_masks() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    for _ in 0..30 {
        let img = random_image(&mut rng, 24, 65535);
        assert!(run(&config_for(&img), &img).is_ok());
    }

    // An 8-bit buffer on an image whose column sums reach 1020.
    let img = Image::constant(4, 3, 255, 255).unwrap();
    let trap_cfg = config_for(&img).with_diff_width_bits(8);
    assert!(run(&trap_cfg, &img).is_err());

    let wrap_cfg = trap_cfg.with_overflow_policy(OverflowPolicy::Wrap);
    let (_, stats) = run(&wrap_cfg, &img).unwrap();
    assert!(stats.peak_buffer_value < 1 << 8);
}
