//! Structured result types shared by the verification scenarios, the weight
//! estimators, and the command-line front end.
//!
//! Every scenario produces an [`InequalityReport`]: a named collection of
//! measured quantities (each optionally tagged with the cube where a supremum
//! was attained), optional scan tables, and a final verdict.  Reports
//! serialize to a stable JSON layout (`schema_version` 1) so runs can be
//! diffed and archived; tables can also be flattened to CSV.

use serde::Serialize;

use crate::grid::{Cube, CubeFamily, Grid, ShiftFraction};

/// Version stamp written into every serialized report.
pub const SCHEMA_VERSION: u32 = 1;

/// Grid parameters echoed into a report.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridInfo {
    /// Dimension of the domain.
    pub d: usize,
    /// Half side length of the domain.
    #[serde(rename = "L")]
    pub l: f64,
    /// Cells per axis.
    #[serde(rename = "N")]
    pub n: usize,
}

impl GridInfo {
    /// Captures the parameters of `grid`.
    pub fn from_grid(grid: &Grid) -> Self {
        GridInfo {
            d: grid.d(),
            l: grid.l(),
            n: grid.n(),
        }
    }
}

/// Cube family parameters echoed into a report.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyInfo {
    /// Inclusive `[min, max]` range of dyadic levels.
    pub levels: [u32; 2],
    /// Shift fractions used along every axis, e.g. `["0", "1/3", "2/3"]`.
    pub shifts: Vec<String>,
}

impl FamilyInfo {
    /// Captures the parameters of `family`.
    pub fn from_family(family: &CubeFamily) -> Self {
        FamilyInfo {
            levels: [family.level_min(), family.level_max()],
            shifts: family.shifts().iter().map(ShiftFraction::to_string).collect(),
        }
    }
}

/// Serializable reference to a single cube of a shifted dyadic family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubeRef {
    /// Dyadic level of the cube.
    pub level: u32,
    /// Per-axis shift fractions, `d` entries.
    pub shift: Vec<String>,
    /// Per-axis anchor indices, `d` entries.
    pub anchor: Vec<i64>,
}

impl CubeRef {
    /// Captures the identity of `cube` within its `family`.
    pub fn from_cube(cube: &Cube, family: &CubeFamily) -> Self {
        let d = family.grid().d();
        let shift_vector = &family.shift_vectors()[cube.shift()];
        CubeRef {
            level: cube.level(),
            shift: shift_vector[..d].iter().map(ShiftFraction::to_string).collect(),
            anchor: cube.anchor()[..d].to_vec(),
        }
    }
}

/// One measured quantity inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct NamedValue {
    /// Identifier of the quantity, unique within the report.
    pub name: String,
    /// Measured value.
    pub value: f64,
    /// Cube attaining the value, when the quantity is a supremum over cubes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<CubeRef>,
}

impl NamedValue {
    /// A plain named value without an attaining cube.
    pub fn plain(name: impl Into<String>, value: f64) -> Self {
        NamedValue {
            name: name.into(),
            value,
            argmax: None,
        }
    }

    /// A named value together with the cube attaining it.
    pub fn with_argmax(name: impl Into<String>, value: f64, argmax: Option<CubeRef>) -> Self {
        NamedValue {
            name: name.into(),
            value,
            argmax,
        }
    }
}

/// One labelled row of a scan table.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    /// Row label, e.g. the scanned parameter value.
    pub label: String,
    /// One entry per table column.
    pub values: Vec<f64>,
}

/// A rectangular table produced by a parameter scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanTable {
    /// Table title.
    pub title: String,
    /// Column headers (not counting the row label).
    pub columns: Vec<String>,
    /// Table rows.
    pub rows: Vec<ScanRow>,
}

impl ScanTable {
    /// Creates an empty table with the given title and column headers.
    pub fn new(title: impl Into<String>, columns: Vec<String>) -> Self {
        ScanTable {
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    /// Appends a row; the number of values must match the column count.
    pub fn push_row(&mut self, label: impl Into<String>, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(ScanRow {
            label: label.into(),
            values,
        });
    }

    /// Renders the table as CSV with the row label in the first column.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str("label");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.replace(',', ";"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.label.replace(',', ";"));
            for v in &row.values {
                out.push(',');
                out.push_str(&format!("{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Final outcome of a verification scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Every checked inequality held within its tolerance.
    Pass,
    /// At least one checked inequality failed.
    Fail,
    /// The data did not separate pass from fail (e.g. a scan that has not
    /// stabilized at the largest affordable resolution).
    Inconclusive,
}

impl Verdict {
    /// Conjunction: `Fail` dominates, then `Inconclusive`, then `Pass`.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            (Pass, Pass) => Pass,
        }
    }

    /// `Pass` for `true`, `Fail` for `false`.
    pub fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

/// Structured outcome of one verification scenario.
#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    /// Layout version of this report.
    pub schema_version: u32,
    /// Scenario identifier.
    pub scenario: String,
    /// Scenario parameters (exponents as exact `"num/den"` strings).
    pub params: serde_json::Value,
    /// Grid used, when the scenario discretizes a domain.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridInfo>,
    /// Cube family used, when the scenario takes suprema over cubes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cube_family: Option<FamilyInfo>,
    /// Measured quantities.
    pub results: Vec<NamedValue>,
    /// Scan tables.
    pub tables: Vec<ScanTable>,
    /// Final verdict, recomputable from `results` and `tables`.
    pub verdict: Verdict,
    /// Wall-clock runtime of the scenario in milliseconds.
    pub runtime_ms: u64,
}

impl InequalityReport {
    /// Creates an empty report for `scenario` with an inconclusive verdict.
    pub fn new(scenario: impl Into<String>) -> Self {
        InequalityReport {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.into(),
            params: serde_json::Value::Null,
            grid: None,
            cube_family: None,
            results: Vec::new(),
            tables: Vec::new(),
            verdict: Verdict::Inconclusive,
            runtime_ms: 0,
        }
    }

    /// Returns the value of a named result, if present.
    pub fn value(&self, name: &str) -> Option<f64> {
        self.results.iter().find(|r| r.name == name).map(|r| r.value)
    }

    /// Serializes the report as pretty-printed JSON.
    pub fn to_json_string(&self) -> crate::Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| crate::Error::Harness(format!("report serialization failed: {e}")))
    }

    /// Flattens all scan tables to one CSV stream, tables separated by a
    /// comment line with the table title.
    pub fn tables_to_csv_string(&self) -> String {
        let mut out = String::new();
        for table in &self.tables {
            out.push_str(&format!("# {}\n", table.title));
            out.push_str(&table.to_csv_string());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{default_shifts, enumerate_cubes, make_grid};

    #[test]
    fn report_serializes_with_stable_keys() {
        let grid = make_grid(1, 1.0, 8).unwrap();
        let family = enumerate_cubes(grid, 0, 1, &default_shifts()).unwrap();
        let mut report = InequalityReport::new("demo");
        report.params = serde_json::json!({ "p": "3/2" });
        report.grid = Some(GridInfo::from_grid(&grid));
        report.cube_family = Some(FamilyInfo::from_family(&family));
        let cube = &family.cubes()[0];
        report.results.push(NamedValue::with_argmax(
            "constant",
            1.25,
            Some(CubeRef::from_cube(cube, &family)),
        ));
        report.verdict = Verdict::Pass;
        let json = report.to_json_string().unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        assert!(json.contains("\"L\": 1.0"));
        assert!(json.contains("\"N\": 8"));
        assert!(json.contains("\"verdict\": \"pass\""));
        assert!(json.contains("\"anchor\""));
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["results"][0]["name"], "constant");
        assert_eq!(parsed["cube_family"]["shifts"][0], "0");
    }

    #[test]
    fn verdict_conjunction_prefers_failure() {
        use Verdict::*;
        assert_eq!(Pass.and(Pass), Pass);
        assert_eq!(Pass.and(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.and(Fail), Fail);
        assert_eq!(Fail.and(Pass), Fail);
        assert_eq!(format!("{Fail}"), "fail");
    }

    #[test]
    fn scan_table_csv_escapes_commas_and_keeps_shape() {
        let mut table = ScanTable::new("growth", vec!["N".into(), "ratio".into()]);
        table.push_row("step,one", vec![128.0, 1.5]);
        let csv = table.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "label,N,ratio");
        let row = lines.next().unwrap();
        assert!(row.starts_with("step;one,"));
        assert_eq!(row.split(',').count(), 3);
    }
}
