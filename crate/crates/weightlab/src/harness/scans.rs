//! Scan drivers and report emission.
//!
//! The drivers turn inequality instances into tables and verdicts: ratio
//! scans across refinement schedules (stability and blow-up rules), power/log
//! growth fits for sharpness studies, and the level-set comparison behind
//! good-λ arguments.  Emission covers JSON, CSV of the scan tables, and
//! self-contained SVG line plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::grid::GriddedFunction;
use crate::harness::report::{InequalityReport, ScanTable, Verdict};
use crate::{Error, Result};

/// Relative increase of the maximal ratio tolerated over the final
/// refinement step by the stability rule.  Inequalities that hold with an
/// unspecified constant are scored by this surrogate: the observed maximal
/// ratio must stop growing (to within this drift) as the grid refines.
pub const STABILITY_DRIFT: f64 = 0.10;

/// Minimal per-doubling growth factor certifying divergence.
pub const BLOWUP_FACTOR: f64 = 1.5;

/// Number of consecutive doubling steps the growth factor must persist for
/// a blow-up verdict; fewer steps separate poorly from grid noise.
pub const BLOWUP_DOUBLINGS: usize = 3;

// ─── Ratio scans ────────────────────────────────────────────────────────────

/// One evaluated inequality sample: left- and right-hand side for one probe
/// at one schedule stage.
#[derive(Clone, Copy, Debug)]
pub struct RatioSample {
    pub lhs: f64,
    pub rhs: f64,
}

/// Tabulated `lhs/rhs` ratios across a refinement or growth schedule.
#[derive(Clone, Debug)]
pub struct RatioScan {
    /// One row per probe plus a final `max` row; one column per stage.
    pub table: ScanTable,
    /// Per-stage maximum over the admitted probes.
    pub max_ratios: Vec<f64>,
    /// `probe@stage` pairs whose right-hand side vanished.  They are
    /// excluded from the maxima (their table entry is `NaN`) but recorded
    /// so a rejection is never silent.
    pub rejected: Vec<String>,
}

impl RatioScan {
    /// Stability verdict at the default drift tolerance.
    pub fn stability_verdict(&self) -> Verdict {
        stability_verdict(&self.max_ratios, STABILITY_DRIFT)
    }

    /// Blow-up verdict at the default growth factor and persistence.
    pub fn blowup_verdict(&self) -> Verdict {
        blowup_verdict(&self.max_ratios, BLOWUP_FACTOR, BLOWUP_DOUBLINGS)
    }

    /// Relative change of the maximal ratio over the final stage step.
    pub fn final_drift(&self) -> f64 {
        final_drift(&self.max_ratios)
    }
}

/// Builds the ratio table for `samples[stage][probe]`.  A vanishing
/// right-hand side rejects that sample; a stage whose samples are all
/// rejected is an error (the maximum would be vacuous).
pub fn ratio_scan(
    title: &str,
    stage_labels: &[String],
    probe_labels: &[String],
    samples: &[Vec<RatioSample>],
) -> Result<RatioScan> {
    if stage_labels.is_empty() || probe_labels.is_empty() {
        return Err(Error::Harness("ratio scan needs at least one stage and one probe".into()));
    }
    if samples.len() != stage_labels.len() {
        return Err(Error::Harness(format!(
            "{} sample stages supplied for {} stage labels",
            samples.len(),
            stage_labels.len()
        )));
    }
    for (s, stage) in samples.iter().enumerate() {
        if stage.len() != probe_labels.len() {
            return Err(Error::Harness(format!(
                "stage {} has {} samples for {} probes",
                stage_labels[s],
                stage.len(),
                probe_labels.len()
            )));
        }
    }

    let mut ratios = vec![vec![f64::NAN; stage_labels.len()]; probe_labels.len()];
    let mut rejected = Vec::new();
    let mut max_ratios = Vec::with_capacity(stage_labels.len());
    for (s, stage) in samples.iter().enumerate() {
        let mut stage_max = f64::NEG_INFINITY;
        let mut admitted = 0usize;
        for (p, sample) in stage.iter().enumerate() {
            if sample.rhs == 0.0 {
                rejected.push(format!("{}@{}", probe_labels[p], stage_labels[s]));
                continue;
            }
            let r = sample.lhs / sample.rhs;
            ratios[p][s] = r;
            stage_max = stage_max.max(r);
            admitted += 1;
        }
        if admitted == 0 {
            return Err(Error::Harness(format!(
                "every probe was rejected at stage {} (all right-hand sides vanished)",
                stage_labels[s]
            )));
        }
        max_ratios.push(stage_max);
    }

    let mut table = ScanTable::new(title, stage_labels.to_vec());
    for (p, row) in ratios.into_iter().enumerate() {
        table.push_row(probe_labels[p].clone(), row);
    }
    table.push_row("max", max_ratios.clone());
    Ok(RatioScan { table, max_ratios, rejected })
}

/// Stability rule: every maximal ratio finite and the final step increases
/// the maximum by at most `drift_tol` (relative).  A single stage cannot be
/// judged and is inconclusive.
pub fn stability_verdict(max_ratios: &[f64], drift_tol: f64) -> Verdict {
    if max_ratios.iter().any(|r| !r.is_finite()) {
        return Verdict::Fail;
    }
    if max_ratios.len() < 2 {
        return Verdict::Inconclusive;
    }
    let last = max_ratios[max_ratios.len() - 1];
    let prev = max_ratios[max_ratios.len() - 2];
    Verdict::from_bool(last <= prev * (1.0 + drift_tol))
}

/// Relative change of the final step: `last/prev − 1` (0 when both vanish).
pub fn final_drift(max_ratios: &[f64]) -> f64 {
    if max_ratios.len() < 2 {
        return f64::NAN;
    }
    let last = max_ratios[max_ratios.len() - 1];
    let prev = max_ratios[max_ratios.len() - 2];
    if prev == 0.0 {
        return if last == 0.0 { 0.0 } else { f64::INFINITY };
    }
    last / prev - 1.0
}

/// Blow-up rule: at least `doublings` consecutive steps, each multiplying
/// the ratio by at least `factor`.  Too short a schedule, or data on which
/// growth cannot be measured, is inconclusive.
pub fn blowup_verdict(max_ratios: &[f64], factor: f64, doublings: usize) -> Verdict {
    if max_ratios.len() < doublings + 1 {
        return Verdict::Inconclusive;
    }
    if max_ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Verdict::Inconclusive;
    }
    let sustained = max_ratios.windows(2).all(|w| w[1] >= factor * w[0]);
    Verdict::from_bool(sustained)
}

// ─── Growth fits ────────────────────────────────────────────────────────────

/// Least-squares fits of a sampled growth curve against the two competing
/// models: a power law `v ≈ A·size^e` (fit in log–log coordinates) and a
/// logarithmic law `v ≈ c + m·ln(size)`.  Residuals are root-mean-square
/// misfits in value space, relative to the mean magnitude, so the two
/// models are directly comparable.
#[derive(Clone, Debug)]
pub struct GrowthFit {
    /// Slope of the power-law fit in log–log coordinates.
    pub exponent: f64,
    /// Relative RMS misfit of the power model.
    pub power_residual: f64,
    /// Slope of the value-versus-`ln(size)` fit.
    pub log_slope: f64,
    /// Relative RMS misfit of the logarithmic model.
    pub log_residual: f64,
    /// Whether the samples are monotone (non-strictly, either direction).
    /// Non-monotone data supports neither growth model.
    pub monotone: bool,
}

/// Fits both growth models to `(sizes[i], values[i])`.
pub fn sharpness_scan(sizes: &[f64], values: &[f64]) -> Result<GrowthFit> {
    if sizes.len() != values.len() {
        return Err(Error::Harness(format!(
            "{} sizes against {} values",
            sizes.len(),
            values.len()
        )));
    }
    if sizes.len() < 3 {
        return Err(Error::Harness("growth fit needs at least three samples".into()));
    }
    if !sizes.windows(2).all(|w| w[0] > 0.0 && w[1] > w[0]) {
        return Err(Error::Harness("sizes must be positive and strictly increasing".into()));
    }
    if !values.iter().all(|v| v.is_finite() && *v > 0.0) {
        return Err(Error::Harness("growth fit needs finite positive values".into()));
    }

    let monotone = values.windows(2).all(|w| w[1] >= w[0])
        || values.windows(2).all(|w| w[1] <= w[0]);
    let ln_sizes: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ln_values: Vec<f64> = values.iter().map(|v| v.ln()).collect();

    let (ln_a, exponent) = least_squares(&ln_sizes, &ln_values);
    let power_fit: Vec<f64> = ln_sizes.iter().map(|x| (ln_a + exponent * x).exp()).collect();
    let (c, log_slope) = least_squares(&ln_sizes, values);
    let log_fit: Vec<f64> = ln_sizes.iter().map(|x| c + log_slope * x).collect();

    let scale = values.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64;
    let rel_rms = |fit: &[f64]| -> f64 {
        let mse = fit
            .iter()
            .zip(values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / values.len() as f64;
        mse.sqrt() / scale
    };

    Ok(GrowthFit {
        exponent,
        power_residual: rel_rms(&power_fit),
        log_slope,
        log_residual: rel_rms(&log_fit),
        monotone,
    })
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

// ─── Level-set comparison ───────────────────────────────────────────────────

/// Outcome of the good-λ comparison: for each level λ the Lebesgue measure
/// (cell counting) of the restricted set
/// `{oscillation > γ₂λ and comparison ≤ γ₁λ}` against the base set
/// `{oscillation > λ}`, and the fitted constant
/// `C = max over admitted λ of restricted/(γ₁·base)`.
#[derive(Clone, Debug)]
pub struct LevelSetComparison {
    /// One row per level; columns: restricted measure, base measure,
    /// constant estimate at that level.
    pub table: ScanTable,
    pub fitted_c: f64,
}

/// Runs the level-set comparison on a shared grid.  Requires `γ₂ > 1` (so
/// the restricted set is contained in the base set) and a level grid that
/// meets the range of the oscillation somewhere.
pub fn good_lambda_check(
    oscillation: &GriddedFunction,
    comparison: &GriddedFunction,
    gamma1: f64,
    gamma2: f64,
    lambdas: &[f64],
) -> Result<LevelSetComparison> {
    if oscillation.grid() != comparison.grid() {
        return Err(Error::Harness("level-set comparison needs a shared grid".into()));
    }
    if !(gamma1 > 0.0 && gamma1.is_finite()) {
        return Err(Error::Harness(format!("γ₁ must be positive, got {gamma1}")));
    }
    if !(gamma2 > 1.0 && gamma2.is_finite()) {
        return Err(Error::Harness(format!(
            "γ₂ must exceed 1 (restricted set inside base set), got {gamma2}"
        )));
    }
    if lambdas.is_empty() || !lambdas.iter().all(|l| l.is_finite() && *l > 0.0) {
        return Err(Error::Harness("level grid must be nonempty, positive, finite".into()));
    }

    let cell_volume = oscillation.grid().cell_volume();
    let mut table = ScanTable::new(
        "level-set comparison",
        vec![
            "restricted measure".into(),
            "base measure".into(),
            "constant estimate".into(),
        ],
    );
    let mut fitted_c = f64::NEG_INFINITY;
    for &lambda in lambdas {
        let mut restricted = 0usize;
        let mut base = 0usize;
        for (&osc, &cmp) in oscillation.values().iter().zip(comparison.values()) {
            if osc > lambda {
                base += 1;
            }
            if osc > gamma2 * lambda && cmp <= gamma1 * lambda {
                restricted += 1;
            }
        }
        let restricted = restricted as f64 * cell_volume;
        let base = base as f64 * cell_volume;
        let estimate = if base > 0.0 {
            let e = restricted / (gamma1 * base);
            fitted_c = fitted_c.max(e);
            e
        } else {
            f64::NAN
        };
        table.push_row(format!("{lambda:.6e}"), vec![restricted, base, estimate]);
    }
    if fitted_c == f64::NEG_INFINITY {
        return Err(Error::Harness(
            "every base level-set measure is zero — the level grid misses the range of the \
             oscillation"
                .into(),
        ));
    }
    Ok(LevelSetComparison { table, fitted_c })
}

// ─── SVG line plots ─────────────────────────────────────────────────────────

/// One plotted curve.
#[derive(Clone, Debug)]
pub struct PlotSeries {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PLOT_WIDTH: f64 = 640.0;
const PLOT_HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 18.0;
const MARGIN_TOP: f64 = 38.0;
const MARGIN_BOTTOM: f64 = 46.0;
const PALETTE: [&str; 9] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
    "#bcbd22",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-3..1e5).contains(&a) {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.3e}")
    }
}

/// Renders a static line plot (fixed canvas, no interactive surface).
/// Non-finite points break the polyline; the y axis switches to a log₁₀
/// scale when all plotted values are positive and span more than two
/// decades.
pub fn render_line_plot(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[PlotSeries],
) -> String {
    let finite: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();

    let log_y = !finite.is_empty() && finite.iter().all(|&(_, y)| y > 0.0) && {
        let max = finite.iter().map(|&(_, y)| y).fold(f64::MIN, f64::max);
        let min = finite.iter().map(|&(_, y)| y).fold(f64::MAX, f64::min);
        max / min > 100.0
    };
    let ty = |y: f64| if log_y { y.log10() } else { y };

    let (mut x0, mut x1, mut y0, mut y1) = finite.iter().fold(
        (f64::MAX, f64::MIN, f64::MAX, f64::MIN),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(ty(y)), d.max(ty(y))),
    );
    if finite.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 0.0 {
        y0 -= 0.5;
        y1 += 0.5;
    }

    let px = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * (PLOT_WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let py =
        |y: f64| PLOT_HEIGHT - MARGIN_BOTTOM - (y - y0) / (y1 - y0) * (PLOT_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" \
         viewBox=\"0 0 {PLOT_WIDTH} {PLOT_HEIGHT}\" font-family=\"sans-serif\">\n"
    );
    let _ = write!(svg, "<rect width=\"{PLOT_WIDTH}\" height=\"{PLOT_HEIGHT}\" fill=\"#ffffff\"/>\n");
    let _ = write!(
        svg,
        "<text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        PLOT_WIDTH / 2.0,
        xml_escape(title)
    );

    // Axis ticks and grid lines.
    for i in 0..5 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let xp = px(xv);
        let yp = py(yv);
        let _ = write!(
            svg,
            "<line x1=\"{xp:.2}\" y1=\"{:.2}\" x2=\"{xp:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>\n",
            py(y0),
            py(y1)
        );
        let _ = write!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{yp:.2}\" x2=\"{:.2}\" y2=\"{yp:.2}\" stroke=\"#dddddd\"/>\n",
            px(x0),
            px(x1)
        );
        let _ = write!(
            svg,
            "<text x=\"{xp:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"11\">{}</text>\n",
            PLOT_HEIGHT - MARGIN_BOTTOM + 16.0,
            fmt_tick(xv)
        );
        let ylabel = if log_y { format!("1e{}", fmt_tick(yv)) } else { fmt_tick(yv) };
        let _ = write!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" font-size=\"11\">{}</text>\n",
            MARGIN_LEFT - 6.0,
            yp + 4.0,
            ylabel
        );
    }
    let _ = write!(
        svg,
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{:.2}\" height=\"{:.2}\" \
         fill=\"none\" stroke=\"#333333\"/>\n",
        PLOT_WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        PLOT_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    );
    let _ = write!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
        MARGIN_LEFT + (PLOT_WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        PLOT_HEIGHT - 8.0,
        xml_escape(x_label)
    );
    let _ = write!(
        svg,
        "<text x=\"14\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"12\" \
         transform=\"rotate(-90 14 {:.2})\">{}</text>\n",
        PLOT_HEIGHT / 2.0,
        PLOT_HEIGHT / 2.0,
        xml_escape(y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut path = String::new();
        let mut pen_down = false;
        for &(x, y) in &s.points {
            if !(x.is_finite() && y.is_finite()) {
                pen_down = false;
                continue;
            }
            let cmd = if pen_down { 'L' } else { 'M' };
            let _ = write!(path, "{cmd}{:.2} {:.2} ", px(x), py(ty(y)));
            pen_down = true;
        }
        if !path.is_empty() {
            let _ = write!(
                svg,
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                path.trim_end()
            );
        }
        let ly = MARGIN_TOP + 14.0 + 14.0 * k as f64;
        let _ = write!(
            svg,
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" \
             stroke-width=\"2\"/>\n<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{}</text>\n",
            MARGIN_LEFT + 8.0,
            MARGIN_LEFT + 26.0,
            MARGIN_LEFT + 30.0,
            ly + 4.0,
            xml_escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Horizontal coordinate for a table column: the label itself if numeric,
/// the value after `=` or `:` if the label is `key=value`-shaped, the
/// column index otherwise.
fn column_coordinate(label: &str, index: usize) -> f64 {
    if let Ok(v) = label.trim().parse::<f64>() {
        return v;
    }
    for sep in ['=', ':'] {
        if let Some(tail) = label.rsplit(sep).next() {
            if let Ok(v) = tail.trim().parse::<f64>() {
                return v;
            }
        }
    }
    index as f64
}

/// Plots every row of a scan table as one series over the column grid.
pub fn render_table_plot(table: &ScanTable) -> String {
    let series: Vec<PlotSeries> = table
        .rows
        .iter()
        .map(|row| PlotSeries {
            label: row.label.clone(),
            points: row
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let x = table
                        .columns
                        .get(i)
                        .map(|c| column_coordinate(c, i))
                        .unwrap_or(i as f64);
                    (x, v)
                })
                .collect(),
        })
        .collect();
    render_line_plot(&table.title, "scan stage", "value", &series)
}

// ─── Emission ───────────────────────────────────────────────────────────────

/// Output formats for `emit_report`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Svg,
}

/// Writes the report under `dir` in the requested formats and returns the
/// written paths: `<scenario>.json`, `<scenario>.csv` (scan tables), and
/// one `<scenario>-<k>.svg` per table.
pub fn emit_report(
    report: &InequalityReport,
    formats: &[ReportFormat],
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if formats.contains(&ReportFormat::Json) {
        let path = dir.join(format!("{}.json", report.scenario));
        fs::write(&path, report.to_json_string()?)?;
        written.push(path);
    }
    if formats.contains(&ReportFormat::Csv) && !report.tables.is_empty() {
        let path = dir.join(format!("{}.csv", report.scenario));
        fs::write(&path, report.tables_to_csv_string())?;
        written.push(path);
    }
    if formats.contains(&ReportFormat::Svg) {
        for (k, table) in report.tables.iter().enumerate() {
            let path = dir.join(format!("{}-{}.svg", report.scenario, k));
            fs::write(&path, render_table_plot(table))?;
            written.push(path);
        }
    }
    Ok(written)
}

/// The byte-comparison form for determinism checks: the report's JSON with
/// the runtime field zeroed (runtime is the one legitimately varying field).
pub fn deterministic_json(report: &InequalityReport) -> Result<String> {
    let mut fixed = report.clone();
    fixed.runtime_ms = 0;
    fixed.to_json_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, GriddedFunction};
    use crate::harness::report::NamedValue;

    fn labels(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn equal_sides_give_unit_ratios_and_pass() {
        let stages = labels(&["N=256", "N=512"]);
        let probes = labels(&["p0", "p1"]);
        let samples = vec![
            vec![RatioSample { lhs: 2.0, rhs: 2.0 }, RatioSample { lhs: 5.0, rhs: 5.0 }],
            vec![RatioSample { lhs: 3.0, rhs: 3.0 }, RatioSample { lhs: 7.0, rhs: 7.0 }],
        ];
        let scan = ratio_scan("t", &stages, &probes, &samples).unwrap();
        assert_eq!(scan.max_ratios, vec![1.0, 1.0]);
        assert!(scan.rejected.is_empty());
        assert_eq!(scan.stability_verdict(), Verdict::Pass);
        assert_eq!(scan.final_drift(), 0.0);
        // Rows: two probes plus the max row.
        assert_eq!(scan.table.rows.len(), 3);
        assert_eq!(scan.table.rows[2].label, "max");
    }

    #[test]
    fn vanishing_rhs_is_rejected_and_recorded() {
        let stages = labels(&["s0"]);
        let probes = labels(&["good", "bad"]);
        let samples = vec![vec![
            RatioSample { lhs: 1.0, rhs: 4.0 },
            RatioSample { lhs: 1.0, rhs: 0.0 },
        ]];
        let scan = ratio_scan("t", &stages, &probes, &samples).unwrap();
        assert_eq!(scan.rejected, vec!["bad@s0".to_string()]);
        assert_eq!(scan.max_ratios, vec![0.25]);
        assert!(scan.table.rows[1].values[0].is_nan());
    }

    #[test]
    fn all_probes_rejected_is_an_error() {
        let stages = labels(&["s0"]);
        let probes = labels(&["p"]);
        let samples = vec![vec![RatioSample { lhs: 1.0, rhs: 0.0 }]];
        assert!(ratio_scan("t", &stages, &probes, &samples).is_err());
    }

    #[test]
    fn stability_rule_boundaries() {
        assert_eq!(stability_verdict(&[1.0, 1.05], 0.10), Verdict::Pass);
        assert_eq!(stability_verdict(&[1.0, 1.11], 0.10), Verdict::Fail);
        assert_eq!(stability_verdict(&[5.0, 2.0, 1.0], 0.10), Verdict::Pass);
        assert_eq!(stability_verdict(&[1.0, f64::INFINITY], 0.10), Verdict::Fail);
        assert_eq!(stability_verdict(&[1.0], 0.10), Verdict::Inconclusive);
    }

    #[test]
    fn blowup_rule_boundaries() {
        assert_eq!(blowup_verdict(&[1.0, 1.6, 2.6, 4.2], 1.5, 3), Verdict::Pass);
        assert_eq!(blowup_verdict(&[1.0, 1.6, 2.6, 3.0], 1.5, 3), Verdict::Fail);
        assert_eq!(blowup_verdict(&[1.0, 2.0, 4.0], 1.5, 3), Verdict::Inconclusive);
        assert_eq!(
            blowup_verdict(&[1.0, f64::INFINITY, 2.0, 3.0], 1.5, 3),
            Verdict::Inconclusive
        );
    }

    #[test]
    fn power_law_is_fit_exactly() {
        let sizes = [2.0f64, 4.0, 8.0, 16.0, 32.0];
        let values: Vec<f64> = sizes.iter().map(|r| 3.0 * r.powf(0.8)).collect();
        let fit = sharpness_scan(&sizes, &values).unwrap();
        assert!((fit.exponent - 0.8).abs() < 1e-12);
        assert!(fit.power_residual < 1e-12);
        assert!(fit.monotone);
        assert!(fit.log_residual > fit.power_residual);
    }

    #[test]
    fn logarithmic_growth_prefers_the_log_model() {
        let sizes = [2.0, 4.0, 8.0, 16.0, 32.0, 64.0];
        let values: Vec<f64> = sizes.iter().map(|r| 2.0 + (r / 2.0f64).ln()).collect();
        let fit = sharpness_scan(&sizes, &values).unwrap();
        assert!(fit.log_residual < 1e-12);
        assert!(fit.power_residual > fit.log_residual);
        assert!((fit.log_slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_monotone_data_is_flagged() {
        let sizes = [2.0, 4.0, 8.0];
        let values = [1.0, 3.0, 2.0];
        let fit = sharpness_scan(&sizes, &values).unwrap();
        assert!(!fit.monotone);
    }

    #[test]
    fn level_set_measures_are_cell_counts() {
        let grid = make_grid(1, 1.0, 8).unwrap();
        // cell volume 1/4
        let osc =
            GriddedFunction::new(grid, vec![4.0, 3.0, 2.0, 1.0, 0.5, 0.25, 0.0, 0.0]).unwrap();
        let cmp =
            GriddedFunction::new(grid, vec![0.0, 10.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let out = good_lambda_check(&osc, &cmp, 0.5, 2.0, &[1.0]).unwrap();
        // base = {osc > 1} = 3 cells = 0.75; restricted = {osc > 2, cmp ≤ 0.5} = {4.0, 3.0}
        // minus the cell where cmp = 10 → 1 cell = 0.25.
        assert_eq!(out.table.rows[0].values[0], 0.25);
        assert_eq!(out.table.rows[0].values[1], 0.75);
        assert!((out.fitted_c - 0.25 / (0.5 * 0.75)).abs() < 1e-15);
    }

    #[test]
    fn halving_gamma1_at_most_doubles_the_constant() {
        let grid = make_grid(1, 1.0, 16).unwrap();
        let osc = GriddedFunction::from_fn(grid, |x| (2.0 - x[0].abs()) * 3.0).unwrap();
        let cmp = GriddedFunction::from_fn(grid, |x| 1.0 + x[0] * x[0]).unwrap();
        let lambdas = [4.0, 2.0, 1.0, 0.5];
        let c1 = good_lambda_check(&osc, &cmp, 0.2, 1.5, &lambdas).unwrap().fitted_c;
        let c2 = good_lambda_check(&osc, &cmp, 0.1, 1.5, &lambdas).unwrap().fitted_c;
        assert!(c2 <= 2.0 * c1 * (1.0 + 1e-12));
    }

    #[test]
    fn missing_the_range_is_an_error() {
        let grid = make_grid(1, 1.0, 8).unwrap();
        let osc = GriddedFunction::constant(grid, 0.0).unwrap();
        let cmp = GriddedFunction::constant(grid, 1.0).unwrap();
        assert!(good_lambda_check(&osc, &cmp, 0.5, 2.0, &[1.0]).is_err());
    }

    #[test]
    fn svg_output_is_deterministic_and_escaped() {
        let series = [PlotSeries {
            label: "a<b&c".into(),
            points: vec![(1.0, 1.0), (2.0, f64::NAN), (3.0, 2.0)],
        }];
        let one = render_line_plot("t", "x", "y", &series);
        let two = render_line_plot("t", "x", "y", &series);
        assert_eq!(one, two);
        assert!(one.starts_with("<svg"));
        assert!(one.contains("a&lt;b&amp;c"));
        assert!(!one.contains("a<b"));
    }

    #[test]
    fn log_scale_engages_on_wide_positive_ranges() {
        let series = [PlotSeries {
            label: "growth".into(),
            points: vec![(1.0, 1.0), (2.0, 1000.0)],
        }];
        let svg = render_line_plot("t", "x", "y", &series);
        assert!(svg.contains("1e"));
    }

    #[test]
    fn emit_writes_requested_formats() {
        let dir = tempfile::tempdir().unwrap();
        let mut report = InequalityReport::new("demo");
        report.results.push(NamedValue::plain("answer", 1.5));
        let mut table = ScanTable::new("curve", labels(&["1", "2"]));
        table.push_row("r", vec![1.0, 2.0]);
        report.tables.push(table);
        let files = emit_report(
            &report,
            &[ReportFormat::Json, ReportFormat::Csv, ReportFormat::Svg],
            dir.path(),
        )
        .unwrap();
        assert_eq!(files.len(), 3);
        let json = std::fs::read_to_string(dir.path().join("demo.json")).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["schema_version"], 1);
        assert_eq!(parsed["scenario"], "demo");
        assert!(dir.path().join("demo.csv").exists());
        assert!(dir.path().join("demo-0.svg").exists());
    }

    #[test]
    fn deterministic_json_ignores_runtime() {
        let mut a = InequalityReport::new("d");
        let mut b = InequalityReport::new("d");
        a.runtime_ms = 17;
        b.runtime_ms = 99;
        assert_eq!(deterministic_json(&a).unwrap(), deterministic_json(&b).unwrap());
        assert_ne!(a.to_json_string().unwrap(), b.to_json_string().unwrap());
    }
}
