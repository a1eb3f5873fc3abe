//! Text renderings: integral-image CSV, memory reports, the plot-data
//! series, and simulation summaries.

use integral_engine::engine::{CycleStats, EngineConfig};
use integral_engine::image::IntegralImage;
use integral_engine::memory::{Geometry, MemoryProfile};

pub const MEMREPORT_CSV_HEADER: &str =
    "rows,cols,pmax,std_width_bits,prop_width_bits,depth_words,std_total_bits,prop_total_bits,reduction_pct";

pub const FIGURE1_CSV_HEADER: &str = "label,std_total_bits";

/// One CSV line per image row, values comma separated.
pub fn integral_csv(ii: &IntegralImage) -> String {
    let mut out = String::new();
    for r in 0..ii.rows() {
        let row = ii.row(r);
        for (c, value) in row.iter().enumerate() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&value.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn memreport_csv(profiles: &[MemoryProfile]) -> String {
    let mut out = String::from(MEMREPORT_CSV_HEADER);
    out.push('\n');
    for p in profiles {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            p.geometry.rows(),
            p.geometry.cols(),
            p.geometry.pmax(),
            p.std_width_bits,
            p.prop_width_bits,
            p.depth_words,
            p.std_total_bits,
            p.prop_total_bits,
            p.reduction_pct,
        ));
    }
    out
}

pub fn memreport_table(profiles: &[MemoryProfile]) -> String {
    let mut out = String::from(
        "   rows    cols    pmax   std_w  prop_w    depth    std_bits   prop_bits  reduction\n",
    );
    for p in profiles {
        out.push_str(&format!(
            "{:>7} {:>7} {:>7} {:>7} {:>7} {:>8} {:>11} {:>11} {:>9}%\n",
            p.geometry.rows(),
            p.geometry.cols(),
            p.geometry.pmax(),
            p.std_width_bits,
            p.prop_width_bits,
            p.depth_words,
            p.std_total_bits,
            p.prop_total_bits,
            p.reduction_pct,
        ));
    }
    out
}

pub fn figure1_csv(series: &[(Geometry, u64)]) -> String {
    let mut out = String::from(FIGURE1_CSV_HEADER);
    out.push('\n');
    for (g, bits) in series {
        out.push_str(&format!("{}x{},{}\n", g.rows(), g.cols(), bits));
    }
    out
}

pub fn simulate_summary(cfg: &EngineConfig, stats: &CycleStats) -> String {
    let g = cfg.geometry();
    let buffer_bits = cfg.diff_width_bits() as u64 * g.cols();
    format!(
        "geometry: {}x{} pmax {}\n\
         diff buffer: {} bits x {} words = {} bits\n\
         first-column register: {} bits\n\
         output width: {} bits\n\
         pipeline latency: {} cycles\n\
         total cycles: {}\n\
         outputs emitted: {}\n\
         steady-state throughput: {} outputs/cycle\n\
         peak buffer value: {} (row {})\n",
        g.rows(),
        g.cols(),
        g.pmax(),
        cfg.diff_width_bits(),
        g.cols(),
        buffer_bits,
        cfg.output_width_bits(),
        cfg.output_width_bits(),
        cfg.pipeline_latency(),
        stats.total_cycles,
        stats.outputs_emitted,
        stats.steady_state_throughput,
        stats.peak_buffer_value,
        stats.peak_buffer_row,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use integral_engine::memory::memory_profile;

    #[test]
    fn integral_csv_lines() {
        let ii = IntegralImage::from_values(2, 2, vec![1, 3, 4, 10]).unwrap();
        assert_eq!(integral_csv(&ii), "1,3\n4,10\n");
    }

    #[test]
    fn memreport_csv_hd_row() {
        let p = memory_profile(Geometry::new(1920, 1080, 255).unwrap());
        let csv = memreport_csv(&[p]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(MEMREPORT_CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("1920,1080,255,29,19,1080,31320,20520,34.4")
        );
    }

    #[test]
    fn table_contains_the_numbers() {
        let p = memory_profile(Geometry::new(360, 240, 255).unwrap());
        let table = memreport_table(&[p]);
        for needle in ["360", "240", "4080", "6000", "32.0%"] {
            assert!(table.contains(needle), "missing {needle} in:\n{table}");
        }
    }

    #[test]
    fn figure1_rows() {
        let g = Geometry::new(360, 240, 255).unwrap();
        let csv = figure1_csv(&[(g, 6000)]);
        assert_eq!(csv, "label,std_total_bits\n360x240,6000\n");
    }
}
