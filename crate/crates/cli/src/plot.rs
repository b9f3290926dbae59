//! Matplotlib script emission.

use std::path::{Path, PathBuf};

use crate::config::Scenario;
use crate::output::check_header;
use crate::CliError;

/// Path of `target` relative to the directory `from`, when both share a prefix.
fn relative(target: &Path, from: &Path) -> PathBuf {
    let t: Vec<_> = target.components().collect();
    let f: Vec<_> = from.components().collect();
    let common = t.iter().zip(&f).take_while(|(a, b)| a == b).count();
    if common == 0 {
        return target.to_path_buf();
    }
    let mut p = PathBuf::new();
    for _ in common..f.len() {
        p.push("..");
    }
    for c in &t[common..] {
        p.push(c);
    }
    p
}

fn absolute(p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        std::env::current_dir().map(|d| d.join(p)).unwrap_or_else(|_| p.to_path_buf())
    }
}

pub fn script_text(csv_rel: &Path, scenario: Scenario) -> String {
    let (x_expr, xlabel, ylabel, logy) = match scenario {
        Scenario::Pdf => ("flag_value(row, 'h')", "h", "density", false),
        Scenario::Mgf => ("flag_value(row, 's')", "s", "MGF", true),
        Scenario::Op => ("float(row['rho_db'])", "average SNR (dB)", "outage probability", true),
        Scenario::Aser => ("float(row['rho_db'])", "average SNR (dB)", "average symbol error rate", true),
        Scenario::Diversity => ("float(row['rho_db'])", "average SNR (dB)", "outage probability", true),
    };
    let csv_lit = csv_rel.to_string_lossy().replace('\\', "/");
    format!(
        r#"#!/usr/bin/env python3
import csv
import math
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
CSV = os.path.join(HERE, "{csv_lit}")


def flag_value(row, key):
    for f in row["flags"].split(";"):
        if f.startswith(key + "="):
            return float(f[len(key) + 1:])
    return float("nan")


curves = {{}}
with open(CSV, newline="") as fh:
    for row in csv.DictReader(fh):
        flags = row["flags"].split(";")
        if "mass" in flags or not row["rho_db"] and {need_rho}:
            continue
        if row["method"].endswith("_slope") or row["method"] in ("diversity_order", "upper_ratio"):
            continue
        x = {x_expr}
        # Break the line at points that did not evaluate.
        y = float(row["value"]) if "ok" in flags and row["value"] else float("nan")
        if {logy} and not y > 0:
            y = float("nan")
        label = "N={{}} M={{}} {{}}".format(row["n"], row["m"] or "-", row["method"])
        curves.setdefault(label, []).append((x, y))

fig, ax = plt.subplots(figsize=(6, 4.5))
for label, pts in curves.items():
    xs, ys = zip(*pts)
    style = "o" if label.endswith(" mc") else "-"
    ax.plot(xs, ys, style, label=label, markersize=3)
if {logy}:
    ax.set_yscale("log")
else:
    # Truncated series and power-law forms grow without bound away from
    # their range; scale the axis to the reference curves.
    ref = [y for label, pts in curves.items() if label.split()[-1] in ("exact", "mc")
           for _, y in pts if y == y]
    if ref:
        ax.set_ylim(0, 1.2 * max(ref))
ax.set_xlabel("{xlabel}")
ax.set_ylabel("{ylabel}")
ax.grid(True, which="both", alpha=0.3)
ax.legend(fontsize=7)
fig.tight_layout()
out = os.path.splitext(CSV)[0] + ".png"
fig.savefig(out, dpi=150)
print(out, file=sys.stderr)
"#,
        need_rho = if matches!(scenario, Scenario::Pdf | Scenario::Mgf) { "False" } else { "True" },
        logy = if logy { "True" } else { "False" },
    )
}

/// Validates the CSV header and writes a plot script next to `out`.
pub fn emit(csv_path: &Path, scenario: Scenario, out: &Path) -> Result<(), CliError> {
    check_header(csv_path)?;
    let out_abs = absolute(out);
    let dir = out_abs.parent().unwrap_or(Path::new("/"));
    let rel = relative(&absolute(csv_path), dir);
    crate::output::ensure_parent(out)?;
    std::fs::write(out, script_text(&rel, scenario)).map_err(|e| CliError::io(format!("{}: {e}", out.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_paths() {
        assert_eq!(relative(Path::new("/a/b/c.csv"), Path::new("/a/b")), PathBuf::from("c.csv"));
        assert_eq!(relative(Path::new("/a/x/c.csv"), Path::new("/a/b")), PathBuf::from("../x/c.csv"));
    }

    #[test]
    fn axes_follow_scenario() {
        let op = script_text(Path::new("f.csv"), Scenario::Op);
        assert!(op.contains("if True:\n    ax.set_yscale(\"log\")"));
        assert!(op.contains("average SNR (dB)"));
        let pdf = script_text(Path::new("f.csv"), Scenario::Pdf);
        assert!(pdf.contains("if False:\n    ax.set_yscale(\"log\")"));
        assert!(pdf.contains("set_ylim"));
    }
}
