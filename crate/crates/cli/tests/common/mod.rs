//! Helpers shared by the CLI integration and acceptance suites.
#![allow(dead_code)] // each test binary uses a different subset

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::RngExt;

use integral_engine::image::Image;
use integral_engine_cli::pgm::{write_pgm, PgmFormat};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_iiengine"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to spawn iiengine")
}

/// Runs the binary, asserting exit code 0, and returns stdout as text.
pub fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "iiengine {:?} failed with {:?}: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout was not UTF-8")
}

pub fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("no exit code")
}

pub fn random_image(rng: &mut StdRng, max_dim: usize, pmax: u32) -> Image {
    let rows = rng.random_range(1..=max_dim);
    let cols = rng.random_range(1..=max_dim);
    let pixels = (0..rows * cols)
        .map(|_| rng.random_range(0..=pmax))
        .collect();
    Image::new(rows, cols, pmax, pixels).unwrap()
}

pub fn write_pgm_file(dir: &Path, name: &str, img: &Image) -> PathBuf {
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_pgm(img, PgmFormat::Binary, &mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

pub fn path_str(path: &Path) -> &str {
    path.to_str().expect("non-UTF-8 temp path")
}
