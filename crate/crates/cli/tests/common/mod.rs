#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EXAMPLE: [f64; 16] = [11., 10., 21., 25., 12., 14., 18., 19., 26., 13., 16., 20., 24., 30., 15., 17.];

pub fn write_values(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let text: String = values.iter().map(|v| format!("{v}\n")).collect();
    write_text(dir, name, &text)
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

pub fn write_labeled(dir: &Path, name: &str, rows: &[(String, Vec<f64>)]) -> PathBuf {
    let text: String = rows
        .iter()
        .map(|(label, v)| {
            let fields: Vec<String> = v.iter().map(f64::to_string).collect();
            format!("{label},{}\n", fields.join(","))
        })
        .collect();
    write_text(dir, name, &text)
}

pub fn oppminer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oppminer")).args(args).env_remove("OPPMINER_LOG").output().unwrap()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Two classes that repeat a four-step motif, rising within the period for
/// one class and falling for the other. Offset, scale and phase are drawn
/// from the same ranges for both classes, so raw values carry no class signal
/// beyond the shape.
pub fn trend_dataset(seed: u64, per_class: usize, len: usize) -> Vec<(String, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let motifs = [("up", [0.0, 2.0, 1.0, 3.0]), ("down", [3.0, 1.0, 2.0, 0.0])];
    let mut rows = Vec::new();
    for _ in 0..per_class {
        for (label, motif) in motifs {
            let offset = rng.random_range(0.0..500.0);
            let scale = rng.random_range(1.0..20.0);
            let phase = rng.random_range(0..4);
            let values =
                (0..len).map(|t| offset + scale * (motif[(t + phase) % 4] + rng.random_range(-0.3..0.3))).collect();
            rows.push((label.to_string(), values));
        }
    }
    rows
}
