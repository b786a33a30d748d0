#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn isvar(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isvar"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

pub fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&read(path)).unwrap()
}

/// Rows of a headed CSV without quoting, header dropped.
pub fn rows(path: impl AsRef<Path>) -> Vec<Vec<String>> {
    read(path)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

pub fn quarter(i: usize) -> String {
    format!("{}Q{}", 1980 + i / 4, i % 4 + 1)
}

pub fn wide_csv(columns: &[(&str, &[f64])]) -> String {
    let n = columns[0].1.len();
    let mut out = String::from("period");
    for (name, _) in columns {
        write!(out, ",{name}").unwrap();
    }
    out.push('\n');
    for t in 0..n {
        out.push_str(&quarter(t));
        for (_, c) in columns {
            write!(out, ",{:?}", c[t]).unwrap();
        }
        out.push('\n');
    }
    out
}

pub struct Normals(ChaCha8Rng);

impl Normals {
    pub fn new(seed: u64) -> Self {
        Self(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn draw(&mut self) -> f64 {
        StandardNormal.sample(&mut self.0)
    }
}

/// Intervention index `s`, one control `w` and two recursively ordered
/// variables `dp`, `dy` with one lag, after a burn-in.
pub fn svar_data(t: usize, seed: u64) -> String {
    let mut z = Normals::new(seed);
    let burn = 100;
    let (mut s, mut w, mut dp, mut dy) = (vec![0.2], vec![0.0], vec![0.0], vec![0.0]);
    for i in 1..t + burn {
        s.push(0.06 + 0.7 * s[i - 1] + 0.12 * z.draw());
        w.push(0.4 * w[i - 1] + 0.02 * z.draw());
        dp.push(0.01 + 0.5 * dp[i - 1] + 0.1 * dy[i - 1] + 0.3 * s[i] - 0.2 * s[i - 1] + 0.5 * w[i] + 0.2 * z.draw());
        dy.push(
            0.005 + 0.4 * dp[i] + 0.2 * dp[i - 1] + 0.3 * dy[i - 1] - 0.2 * s[i] + 0.1 * s[i - 1] + 0.2 * w[i]
                + 0.1 * z.draw(),
        );
    }
    wide_csv(&[("dp", &dp[burn..]), ("dy", &dy[burn..]), ("s", &s[burn..]), ("w", &w[burn..])])
}

pub const SVAR_CONFIG: &str = r#"{
  "inputs": { "data": "data.csv" },
  "model": { "ordering": ["dp", "dy"], "lags": [1], "controls": ["w"] },
  "horizon": 12,
  "global": "w"
}"#;

/// `dy_t = 0.01 + lambda dy_{t-1} + beta s_{t-1} + sd e_t`.
pub fn dynamic_regression(t: usize, beta: f64, lambda: f64, sd: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut z = Normals::new(seed);
    let (mut s, mut dy) = (vec![0.3], vec![0.0]);
    for i in 1..t {
        s.push(0.1 + 0.6 * s[i - 1] + 0.2 * z.draw());
        dy.push(0.01 + lambda * dy[i - 1] + beta * s[i - 1] + sd * z.draw());
    }
    (s, dy)
}
