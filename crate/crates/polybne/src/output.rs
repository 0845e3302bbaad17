//! Result files: JSON documents, curve tables and the run lock.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use polybne_core::diagnostics::CURVE_POINTS;
use polybne_core::{GameSpec, StrategyProfile};
use serde::Serialize;

const LOCK_NAME: &str = ".polybne.lock";

/// Exclusive claim on an output directory, released on drop.
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let path = dir.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                writeln!(f, "{}", std::process::id()).ok();
                Ok(Self { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                bail!(
                    "output directory {} is in use by another run ({} exists)",
                    dir.display(),
                    path.display()
                )
            }
            Err(e) => Err(e).with_context(|| format!("cannot write to output directory {}", dir.display())),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

/// `x` in plain decimal notation with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x.is_infinite() {
            (if x > 0.0 { "inf" } else { "-inf" }).into()
        } else {
            "0.00000000000".into()
        };
    }
    // the exponent after rounding to 12 digits
    let sci = format!("{:.11e}", x);
    let exp: i32 = sci.split('e').nth(1).and_then(|e| e.parse().ok()).unwrap_or(0);
    if exp >= 11 {
        let digits: String = sci
            .split('e')
            .next()
            .unwrap_or("")
            .chars()
            .filter(|c| c.is_ascii_digit())
            .collect();
        let sign = if x < 0.0 { "-" } else { "" };
        let zeros = "0".repeat((exp - 11) as usize);
        return format!("{sign}{digits}{zeros}");
    }
    let decimals = (11 - exp) as usize;
    format!("{:.*}", decimals, x)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).context("cannot serialize result")?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// Writes `<stem>.csv`, or `<stem>_player<i>.csv` per player when the type
/// domains differ. Returns the file names written.
pub fn write_curves(dir: &Path, stem: &str, game: &GameSpec, profile: &StrategyProfile) -> Result<Vec<String>> {
    let n = game.players();
    let shared = (1..n).all(|i| game.type_domain(i) == game.type_domain(0));
    let header: String = std::iter::once("theta".to_string())
        .chain((1..=n).map(|i| format!("f_{i}")))
        .collect::<Vec<_>>()
        .join(",");
    let mut names = Vec::new();
    let files: Vec<(String, usize)> = if shared {
        vec![(format!("{stem}.csv"), 0)]
    } else {
        (1..=n).map(|i| (format!("{stem}_player{i}.csv"), i - 1)).collect()
    };
    for (name, grid_player) in files {
        let path = dir.join(&name);
        let file = File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{header}")?;
        let domain = game.type_domain(grid_player);
        for k in 0..CURVE_POINTS {
            let theta = domain.grid_point(k, CURVE_POINTS);
            let mut line = format_sig12(theta);
            for s in profile.strategies() {
                line.push(',');
                line.push_str(&format_sig12(s.eval_unchecked(s.domain().clamp(theta))));
            }
            writeln!(w, "{line}")?;
        }
        w.flush().with_context(|| format!("cannot write {}", path.display()))?;
        names.push(name);
    }
    Ok(names)
}
