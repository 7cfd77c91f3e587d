use std::fmt::Write as _;

use crate::algorithms::AdaptiveState;

use super::HarnessError;

/// Rows of already-formatted cells under a header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl ResultTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Numeric values of a column; empty cells become `None`.
    pub fn values(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let c = self.column(name)?;
        Some(self.rows.iter().map(|r| r[c].parse().ok()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut r = csv::ReaderBuilder::new().flexible(false).from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<_, _>>()?;
        Ok(Self { header, rows })
    }

    /// Right-aligned columns separated by two spaces; empty cells show `-`.
    pub fn to_aligned(&self) -> String {
        let cell = |s: &str| if s.is_empty() { "-".to_string() } else { s.to_string() };
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell(c).chars().count());
            }
        }
        let mut out = String::new();
        let line = |cells: Vec<String>, out: &mut String| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        };
        line(self.header.clone(), &mut out);
        line(widths.iter().map(|&w| "-".repeat(w)).collect(), &mut out);
        for r in &self.rows {
            line(r.iter().map(|c| cell(c)).collect(), &mut out);
        }
        out
    }
}

/// Reformats CSV text as an aligned table.
pub fn format_table(csv_text: &str) -> Result<String, HarnessError> {
    Ok(ResultTable::from_csv(csv_text)?.to_aligned())
}

pub(crate) fn fmt_value(v: f64) -> String {
    format!("{v:.12}")
}

pub(crate) fn fmt_error(v: f64) -> String {
    format!("{v:.6e}")
}

pub(crate) fn fmt_order(v: f64) -> String {
    format!("{v:.2}")
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slopes over the final half of a sequence (at least two points).
pub fn final_half_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let start = xs.len() / 2;
    let start = start.min(xs.len().saturating_sub(2));
    loglog_slope(&xs[start..], &ys[start..])
}

/// Whitespace-separated columns `N |λ̄−λ| |λ−λ| η² κ`, preceded by `#`
/// comment lines with the final-half log-log slopes.
pub fn plot_data(trace: &[AdaptiveState], lambda_ref: f64) -> String {
    let n: Vec<f64> = trace.iter().map(|s| s.dofs as f64).collect();
    let rq: Vec<f64> = trace.iter().map(|s| (s.rayleigh - lambda_ref).abs()).collect();
    let en: Vec<f64> = trace.iter().map(|s| (s.enhanced - lambda_ref).abs()).collect();
    let eta2: Vec<f64> = trace.iter().map(|s| s.estimator.global.powi(2)).collect();
    plot_columns(&n, &rq, &en, &eta2)
}

pub(crate) fn plot_columns(n: &[f64], rq: &[f64], en: &[f64], eta2: &[f64]) -> String {
    let slope = |ys: &[f64]| match final_half_slope(n, ys) {
        Some(s) => format!("{s:.4}"),
        None => "nan".into(),
    };
    let mut out = String::new();
    writeln!(out, "# slope rayleigh_error {}", slope(rq)).unwrap();
    writeln!(out, "# slope enhanced_error {}", slope(en)).unwrap();
    writeln!(out, "# slope eta2 {}", slope(eta2)).unwrap();
    writeln!(out, "# N rayleigh_error enhanced_error eta2 kappa").unwrap();
    for k in 0..n.len() {
        let kappa = if rq[k] > 0.0 { eta2[k] / rq[k] } else { f64::NAN };
        writeln!(out, "{} {:.6e} {:.6e} {:.6e} {:.6}", n[k], rq[k], en[k], eta2[k], kappa).unwrap();
    }
    out
}

/// Reads the `# slope <name> <value>` lines written by [`plot_data`].
pub fn parse_slopes(plot: &str) -> Vec<(String, f64)> {
    plot.lines()
        .filter_map(|l| l.strip_prefix("# slope "))
        .filter_map(|l| {
            let mut it = l.split_whitespace();
            Some((it.next()?.to_string(), it.next()?.parse().ok()?))
        })
        .collect()
}
