//! CSV and JSON artifact writers.
//!
//! Floats are written with 17 significant digits so a downstream fit over
//! the CSV reproduces the internal fit exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use spindrift::experiments::TrajectorySample;

pub const TRAJECTORY_HEADER: &str =
    "t,energy,energy_error,orth_defect,w1,w2,w3,aa1,aa2,aa3,q11,q12,q13,q21,q22,q23,q31,q32,q33";

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory_csv(path: &Path, samples: &[TrajectorySample]) -> Result<()> {
    let file = File::create(path)
        .with_context(|| format!("cannot create output file {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in samples {
        let q = s.q.matrix();
        let fields = [
            s.t,
            s.energy,
            s.energy_error,
            s.orth_defect,
            s.w.x,
            s.w.y,
            s.w.z,
            s.axis_angle.x,
            s.axis_angle.y,
            s.axis_angle.z,
            q[(0, 0)],
            q[(0, 1)],
            q[(0, 2)],
            q[(1, 0)],
            q[(1, 1)],
            q[(1, 2)],
            q[(2, 0)],
            q[(2, 1)],
            q[(2, 2)],
        ];
        let row: Vec<String> = fields.iter().copied().map(fmt).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n")
        .with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_uses_17_significant_digits_and_round_trips() {
        let values = [0.25, -3.873e-6, 1.0 / 3.0, 15000.0];
        for v in values {
            let text = fmt(v);
            let mantissa = text
                .trim_start_matches('-')
                .split('e')
                .next()
                .unwrap()
                .replace('.', "");
            assert_eq!(mantissa.len(), 17, "{text}");
            assert_eq!(text.parse::<f64>().unwrap(), v, "{text}");
        }
    }
}
