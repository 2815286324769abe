//! Profile CSV, verification reports and the plain-text grid format.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use freqlab_core::frequency::{frequency_value, FrequencyKind, RadialProfile, RadialSample, VerificationReport};
use freqlab_core::solver::GridSolution;

use crate::error::CliError;

pub const CSV_HEADER: [&str; 11] = ["r", "I", "D", "H", "F", "F_drift", "Ip", "Dp", "F_p", "F_p_tilde", "rn_residual"];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn sample_row(s: &RadialSample) -> Vec<String> {
    let f = |k| frequency_value(s, k).ok();
    vec![
        num(s.r),
        num(s.i),
        num(s.d),
        num(s.h),
        opt(f(FrequencyKind::Classical)),
        opt(f(FrequencyKind::Drift)),
        opt(s.power.map(|p| p.ip)),
        opt(s.power.map(|p| p.dp)),
        opt(f(FrequencyKind::P)),
        opt(f(FrequencyKind::PTilde)),
        num(s.rn_residual),
    ]
}

/// One row per radius, failed radii included with empty cells.
pub fn write_profile_csv<W: Write>(profile: &RadialProfile, out: W) -> Result<(), CliError> {
    let mut rows: Vec<(f64, Vec<String>)> = profile.samples.iter().map(|s| (s.r, sample_row(s))).collect();
    for (r, _) in &profile.failures {
        let mut row = vec![String::new(); CSV_HEADER.len()];
        row[0] = num(*r);
        rows.push((*r, row));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::Usage(format!("cannot write CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (_, row) in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io("cannot write CSV", e))
}

pub const REPORT_HEADER: &str = "check\tradius\tlhs\trhs\tmargin\ttolerance\tstatus\tmetadata\tnote";

/// Sorts by check name, then radius (unset radii first); ties keep their order.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| {
        a.check.cmp(&b.check).then_with(|| match (a.radius, b.radius) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (x, y) => x.is_some().cmp(&y.is_some()),
        })
    });
}

pub fn summary_line(reports: &[VerificationReport]) -> String {
    let failed = reports.iter().filter(|r| r.failed_check()).count();
    if failed > 0 {
        format!("FAIL {failed}/{}", reports.len())
    } else {
        format!("PASS {}/{}", reports.len(), reports.len())
    }
}

/// Tab-separated report in deterministic order, ending with a `PASS m/m` or
/// `FAIL k/m` summary line. An empty list gives the header alone.
pub fn render_report(reports: &[VerificationReport]) -> String {
    let mut sorted = reports.to_vec();
    sort_reports(&mut sorted);
    let mut s = String::new();
    s.push_str(REPORT_HEADER);
    s.push('\n');
    if sorted.is_empty() {
        return s;
    }
    for r in &sorted {
        let meta = r.metadata.iter().map(|(k, v)| format!("{k}={}", num(*v))).collect::<Vec<_>>().join(",");
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.check,
            opt(r.radius),
            num(r.lhs),
            num(r.rhs),
            num(r.margin),
            num(r.tolerance),
            r.status.as_str(),
            meta,
            r.note.replace(['\t', '\n'], " ")
        );
    }
    s.push_str(&summary_line(&sorted));
    s.push('\n');
    s
}

pub fn write_grid<W: Write>(sol: &GridSolution, mut out: W) -> std::io::Result<()> {
    let (x0, y0) = sol.origin();
    writeln!(out, "2 {} {} {} {} {}", sol.rows(), sol.cols(), num(sol.h()), num(x0), num(y0))?;
    for j in 0..sol.rows() {
        let line = sol.row(j).iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ");
        writeln!(out, "{line}")?;
    }
    out.flush()
}

pub fn read_grid<R: Read>(input: R) -> Result<GridSolution, CliError> {
    let bad = |m: String| CliError::Usage(format!("malformed grid file: {m}"));
    let mut lines = BufReader::new(input).lines();
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?.map_err(|e| CliError::io("cannot read grid", e))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "2" {
        return Err(bad(format!("header must be `2 rows cols h x0 y0`, got `{header}`")));
    }
    let int = |s: &str| s.parse::<usize>().map_err(|_| bad(format!("bad integer `{s}`")));
    let real = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
    let (rows, cols) = (int(fields[1])?, int(fields[2])?);
    let (h, x0, y0) = (real(fields[3])?, real(fields[4])?, real(fields[5])?);
    let mut values = Vec::with_capacity(rows * cols);
    for (j, line) in lines.enumerate() {
        let line = line.map_err(|e| CliError::io("cannot read grid", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line.split_whitespace().map(real).collect::<Result<Vec<_>, _>>()?;
        if row.len() != cols {
            return Err(bad(format!("row {j} has {} values, expected {cols}", row.len())));
        }
        values.extend(row);
    }
    if values.len() != rows * cols {
        return Err(bad(format!("expected {rows} rows, got {}", values.len() / cols.max(1))));
    }
    Ok(GridSolution::from_values(rows, cols, h, x0, y0, values)?)
}

pub fn read_grid_file(path: &Path) -> Result<GridSolution, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::io(format!("cannot open grid {}", path.display()), e))?;
    read_grid(f)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(format!("cannot write {}", path.display()), e))
}
