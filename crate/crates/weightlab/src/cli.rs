//! Command-line front end: norms, weight constants, operators, the exact
//! exponent calculators, the verification catalog, and config-driven ratio
//! scans.
//!
//! Exit codes: `0` pass, `1` fail verdict, `2` inconclusive, `3` usage or
//! validation error. Gridded functions cross the boundary in the `d,L,N`
//! CSV format; structured output is JSON with exact exponents rendered as
//! `"num/den"` strings and `∞` as `"inf"`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::json;

use weightlab::exponents::{
    derived_deltas, dual_tuple, multilinear_target_check, offdiagonal_chain,
    one_var_extrapolation, parse_rational, ExponentSystem, ExtReal,
};
use weightlab::grid::{
    default_shifts, enumerate_cubes, make_grid, read_csv, write_csv, CubeFamily, Grid,
    GriddedFunction, ShiftFraction,
};
use weightlab::harness::report::{
    FamilyInfo, GridInfo, InequalityReport, NamedValue, Verdict,
};
use weightlab::harness::scans::{emit_report, ratio_scan, RatioSample, ReportFormat};
use weightlab::harness::scenarios::{run_scenario, CATALOG, DEFAULT_SEED, PROBE_LABELS};
use weightlab::norms::{
    bmo_norm, lebesgue_norm, lorentz_norm, luxemburg_norm, morrey_norm, OrliczFunction,
};
use weightlab::operators::{
    commutator, fractional_integral, fractional_maximal, modified_maximal,
    multilinear_fractional_maximal, probe_family, truncated_commutator_sup,
    default_epsilon_set,
};
use weightlab::weights::{
    ap_constant, apq_constant, partial_constant, power_gate, power_weight, ConstantEstimate,
    MembershipStatus, Weight, WeightVector,
};
use weightlab::{Error, Result};

// ─── argument surface ───────────────────────────────────────────────────────

#[derive(Parser, Debug)]
#[command(
    name = "weightlab",
    version,
    about = "Numerical laboratory for weighted harmonic analysis on discretized domains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Dimension of the domain (1..=3)
    #[arg(long = "d", global = true, value_name = "DIM")]
    d: Option<usize>,

    /// Half side length: the domain is [-L, L]^d
    #[arg(long = "L", global = true, value_name = "HALF", allow_hyphen_values = true)]
    l: Option<f64>,

    /// Cells per axis (even, ≥ 4)
    #[arg(long = "N", global = true, value_name = "CELLS")]
    n: Option<usize>,

    /// Dyadic level range of the cube family, `lmin:lmax`
    #[arg(long, global = true, value_name = "LMIN:LMAX")]
    levels: Option<String>,

    /// Comma-separated shift fractions of the cube family, e.g. `0,1/3,2/3`
    #[arg(long, global = true, value_name = "FRACTIONS")]
    shifts: Option<String>,

    /// Seed for every random choice (probe noise)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path: a file for norm/weight-constant/operator/exponents, a
    /// directory of report files for verify/scan
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Also render SVG plots of any scan tables (verify/scan, needs --out)
    #[arg(long, global = true)]
    emit_plot: bool,

    /// JSON file supplying default parameter values (explicit flags win)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute a norm of a gridded function
    Norm(NormArgs),
    /// Compute a weight-class constant over the cube family
    WeightConstant(WeightConstantArgs),
    /// Apply an operator to gridded input and write the result as CSV
    Operator(OperatorArgs),
    /// Exact rational exponent calculators (no floating point)
    Exponents(ExponentsArgs),
    /// Run verification scenarios from the catalog
    Verify(VerifyArgs),
    /// Ratio scan over a refinement schedule described in the config file
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
struct NormArgs {
    /// Gridded-function CSV to measure
    #[arg(long, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Standard probe index (0..=7) instead of an input file
    #[arg(long, value_name = "K")]
    probe: Option<usize>,

    /// Which norm to compute
    #[arg(long, value_enum, default_value = "lebesgue")]
    kind: NormKind,

    /// Main exponent (rational, decimal, or `inf`)
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    p: String,

    /// Secondary exponent: Lorentz second index, or Morrey inner exponent
    #[arg(long, value_name = "EXP", allow_hyphen_values = true)]
    secondary: Option<String>,

    /// Coefficient of the logarithmic factor in the Orlicz gauge
    /// `t^p·log(e+t)^c` (Luxemburg norm only)
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    log_power: f64,

    /// Weight CSV for the weighted Lebesgue norm
    #[arg(long, value_name = "FILE")]
    weight: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormKind {
    Lebesgue,
    Lorentz,
    Luxemburg,
    Morrey,
    Bmo,
}

#[derive(Args, Debug)]
struct WeightConstantArgs {
    /// Component weight CSV file; repeat for a weight vector (slot order)
    #[arg(long = "weight", value_name = "FILE")]
    weights: Vec<PathBuf>,

    /// Power-law component weight |x|^B; repeatable, appended after files
    #[arg(long = "power", value_name = "B", allow_hyphen_values = true)]
    powers: Vec<f64>,

    /// Partial weight CSV (selects the partial-class constant)
    #[arg(long, value_name = "FILE")]
    partial: Option<PathBuf>,

    /// Power-law partial weight |x|^E
    #[arg(long, value_name = "E", allow_hyphen_values = true)]
    partial_power: Option<f64>,

    /// Comma-separated component exponents, e.g. `2` or `3/2,2`
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    p: String,

    /// Target exponent; omit for the classical one-weight constant
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,

    /// Comma-separated grading exponents (partial constant only)
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
}

#[derive(Args, Debug)]
struct OperatorArgs {
    /// Input gridded-function CSV; repeat for multilinear operators
    #[arg(long = "input", value_name = "FILE")]
    inputs: Vec<PathBuf>,

    /// Standard probe index (0..=7); repeatable, instead of input files
    #[arg(long = "probe", value_name = "K")]
    probes: Vec<usize>,

    /// Which operator to apply
    #[arg(long, value_enum)]
    kind: OperatorKind,

    /// Fractional order α
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,

    /// Inner power of the maximal operator
    #[arg(long, default_value_t = 1.0)]
    s: f64,

    /// Exponent of the weight-modified maximal operator (0 < γ ≤ 1)
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,

    /// Commutator symbol
    #[arg(long, value_enum, default_value = "sgn")]
    symbol: SymbolKind,

    /// Modifying weight CSV (weight-modified maximal operator)
    #[arg(long, value_name = "FILE")]
    modifier: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OperatorKind {
    Maximal,
    MultilinearMaximal,
    Integral,
    Commutator,
    CommutatorSup,
    ModifiedMaximal,
}

/// The four standard commutator symbols.
#[derive(Clone, Copy, Debug, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SymbolKind {
    /// b ≡ 1
    Const,
    /// b(x) = sign of the first coordinate
    Sgn,
    /// b(x) = log|x|
    LogAbs,
    /// b(x) = first coordinate
    Coordinate,
}

#[derive(Args, Debug)]
struct ExponentsArgs {
    #[command(subcommand)]
    op: ExponentsOp,
}

#[derive(Subcommand, Debug)]
enum ExponentsOp {
    /// Dual exponent tuple at one slot
    Dual {
        /// Comma-separated source exponents
        #[arg(long)]
        p: String,
        /// Target exponent
        #[arg(long)]
        q: String,
        /// Slot to dualize (0-based)
        #[arg(long, default_value_t = 0)]
        slot: usize,
    },
    /// One-variable extrapolation target from a known source triple
    Extrapolate {
        #[arg(long)]
        p0: String,
        #[arg(long)]
        q0: String,
        #[arg(long)]
        t0: String,
        /// New source exponent
        #[arg(long)]
        p: String,
    },
    /// Defect exponents of a (optionally graded) system
    Deltas {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Grading tuple with one more slot than p
        #[arg(long)]
        r: Option<String>,
    },
    /// Off-diagonal iteration chain with its exact stopping index
    Chain {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        p: String,
        #[arg(long, default_value = "1")]
        s: String,
    },
    /// Power-weight membership gate: (|x|^b, |x|^a) in the partial class
    Gate {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Partial power a ≥ 0
        #[arg(long)]
        a: String,
        /// Component power b
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Source/target admissibility for a shared grading tuple
    TargetCheck {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long = "p-star")]
        p_star: String,
        #[arg(long = "q-star")]
        q_star: String,
        #[arg(long)]
        r: String,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Scenario name; repeat to run several. Omit to run the whole catalog
    #[arg(long = "scenario", value_name = "NAME")]
    scenarios: Vec<String>,

    /// List the catalog (name and summary) and exit
    #[arg(long)]
    list: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {}

// ─── config file ────────────────────────────────────────────────────────────

/// Defaults supplied by `--config`; explicit flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    d: Option<usize>,
    #[serde(rename = "L")]
    l: Option<f64>,
    #[serde(rename = "N")]
    n: Option<usize>,
    levels: Option<String>,
    shifts: Option<String>,
    seed: Option<u64>,
    /// Ratio-scan description (the `scan` subcommand requires it).
    scan: Option<serde_json::Value>,
}

/// Fully resolved common parameters: flag > config > default.
struct Params {
    d: usize,
    l: f64,
    n: usize,
    levels: Option<(u32, u32)>,
    shifts: Vec<ShiftFraction>,
    seed: u64,
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile> {
    match path {
        None => Ok(ConfigFile::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::Parse(format!("config {}: {e}", p.display())))
        }
    }
}

fn merge_params(cli: &Cli, config: &ConfigFile) -> Result<Params> {
    let levels = match cli.levels.as_deref().or(config.levels.as_deref()) {
        Some(s) => Some(parse_levels(s)?),
        None => None,
    };
    let shifts = match cli.shifts.as_deref().or(config.shifts.as_deref()) {
        Some(s) => parse_shifts(s)?,
        None => default_shifts(),
    };
    Ok(Params {
        d: cli.d.or(config.d).unwrap_or(1),
        l: cli.l.or(config.l).unwrap_or(1.0),
        n: cli.n.or(config.n).unwrap_or(256),
        levels,
        shifts,
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
    })
}

fn parse_levels(s: &str) -> Result<(u32, u32)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("levels must be `lmin:lmax`, got {s:?}")))?;
    let lo: u32 = lo
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad level {lo:?}: {e}")))?;
    let hi: u32 = hi
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad level {hi:?}: {e}")))?;
    if lo > hi {
        return Err(Error::Parse(format!("levels {lo}:{hi} are not increasing")));
    }
    Ok((lo, hi))
}

fn parse_shifts(s: &str) -> Result<Vec<ShiftFraction>> {
    let mut shifts = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        let frac = match part.split_once('/') {
            None => {
                let num: u32 = part
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad shift {part:?}: {e}")))?;
                if num == 0 {
                    ShiftFraction::ZERO
                } else {
                    return Err(Error::Parse(format!(
                        "shift {part:?} must lie in [0, 1)"
                    )));
                }
            }
            Some((n, d)) => {
                let num: u32 = n
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad shift numerator {n:?}: {e}")))?;
                let den: u32 = d
                    .trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad shift denominator {d:?}: {e}")))?;
                ShiftFraction::new(num, den)?
            }
        };
        shifts.push(frac);
    }
    if shifts.is_empty() {
        return Err(Error::Parse("empty shift list".into()));
    }
    Ok(shifts)
}

/// The cube family of `grid` under the resolved parameters: requested level
/// range (default: all levels) with the requested shifts.
fn family_for(grid: &Grid, params: &Params) -> Result<CubeFamily> {
    let (lmin, lmax) = params.levels.unwrap_or((0, grid.max_level()));
    enumerate_cubes(*grid, lmin, lmax, &params.shifts)
}

// ─── shared helpers ─────────────────────────────────────────────────────────

fn extreal_to_f64(x: &ExtReal) -> Result<f64> {
    match x {
        ExtReal::Infinity => Ok(f64::INFINITY),
        ExtReal::Finite(r) => r
            .to_f64()
            .ok_or_else(|| Error::Parse(format!("exponent {x} does not fit an f64"))),
    }
}

fn parse_exponent_f64(s: &str) -> Result<f64> {
    extreal_to_f64(&s.parse::<ExtReal>()?)
}

fn parse_extreal_list(s: &str) -> Result<Vec<ExtReal>> {
    s.split(',').map(|part| part.parse::<ExtReal>()).collect()
}

fn extreal_strings(xs: &[ExtReal]) -> Vec<String> {
    xs.iter().map(ExtReal::to_string).collect()
}

/// Explicit `--d/--L/--N` flags must agree with the grid an input file
/// carries; a silent mismatch would misattribute every coordinate.
fn check_grid_flags(grid: &Grid, cli: &Cli, source: &Path) -> Result<()> {
    if let Some(d) = cli.d {
        if d != grid.d() {
            return Err(Error::Parse(format!(
                "--d {d} disagrees with {} (d = {})",
                source.display(),
                grid.d()
            )));
        }
    }
    if let Some(l) = cli.l {
        if l != grid.l() {
            return Err(Error::Parse(format!(
                "--L {l} disagrees with {} (L = {})",
                source.display(),
                grid.l()
            )));
        }
    }
    if let Some(n) = cli.n {
        if n != grid.n() {
            return Err(Error::Parse(format!(
                "--N {n} disagrees with {} (N = {})",
                source.display(),
                grid.n()
            )));
        }
    }
    Ok(())
}

fn probe_by_index(grid: &Grid, seed: u64, k: usize) -> Result<(GriddedFunction, &'static str)> {
    if k >= PROBE_LABELS.len() {
        return Err(Error::Parse(format!(
            "probe index {k} out of range 0..={}",
            PROBE_LABELS.len() - 1
        )));
    }
    let f = probe_family(grid, seed)?.swap_remove(k);
    Ok((f, PROBE_LABELS[k]))
}

fn json_value<T: serde::Serialize>(value: &T) -> Result<serde_json::Value> {
    serde_json::to_value(value).map_err(|e| Error::Harness(format!("serialization failed: {e}")))
}

/// Print a line to stdout, ignoring a closed pipe (e.g. `weightlab … | head`).
fn print_line(text: &str) {
    use std::io::Write as _;
    let _ = writeln!(std::io::stdout(), "{text}");
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Print structured output and mirror it to `--out` when given.
fn deliver_json(value: &serde_json::Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Harness(format!("serialization failed: {e}")))?;
    print_line(&text);
    if let Some(path) = out {
        write_text(path, &text)?;
    }
    Ok(())
}

fn verdict_exit(v: Verdict) -> ExitCode {
    match v {
        Verdict::Pass => ExitCode::SUCCESS,
        Verdict::Fail => ExitCode::from(1),
        Verdict::Inconclusive => ExitCode::from(2),
    }
}

// ─── norm ───────────────────────────────────────────────────────────────────

fn load_norm_input(
    args: &NormArgs,
    cli: &Cli,
    params: &Params,
) -> Result<(GriddedFunction, serde_json::Value)> {
    match (&args.input, args.probe) {
        (Some(path), None) => {
            let f = read_csv(path)?;
            check_grid_flags(&f.grid(), cli, path)?;
            Ok((f, json!(path.display().to_string())))
        }
        (None, Some(k)) => {
            let grid = make_grid(params.d, params.l, params.n)?;
            let (f, label) = probe_by_index(&grid, params.seed, k)?;
            Ok((f, json!(label)))
        }
        (Some(_), Some(_)) => Err(Error::Parse(
            "give either --input or --probe, not both".into(),
        )),
        (None, None) => Err(Error::Parse("one of --input or --probe is required".into())),
    }
}

fn run_norm(args: &NormArgs, cli: &Cli, params: &Params) -> Result<ExitCode> {
    let (f, source) = load_norm_input(args, cli, params)?;
    let grid = f.grid();
    let p = parse_exponent_f64(&args.p)?;

    let mut output = json!({
        "kind": format!("{:?}", args.kind).to_lowercase(),
        "input": source,
        "p": args.p.parse::<ExtReal>()?.to_string(),
        "grid": json_value(&GridInfo::from_grid(&grid))?,
    });
    let value = match args.kind {
        NormKind::Lebesgue => {
            let weight = match &args.weight {
                None => None,
                Some(path) => {
                    let w = Weight::new(read_csv(path)?)?;
                    check_grid_flags(&w.grid(), cli, path)?;
                    output["weight"] = json!(path.display().to_string());
                    Some(w)
                }
            };
            lebesgue_norm(&f, p, weight.as_ref())?
        }
        NormKind::Lorentz => {
            let q = args
                .secondary
                .as_deref()
                .ok_or_else(|| Error::Parse("Lorentz norm needs --secondary".into()))?;
            output["secondary"] = json!(q.parse::<ExtReal>()?.to_string());
            lorentz_norm(&f, p, parse_exponent_f64(q)?)?
        }
        NormKind::Luxemburg => {
            let phi = OrliczFunction::power_log(p, args.log_power)?;
            output["log_power"] = json!(args.log_power);
            // Gauge over the whole domain: the single level-zero cube.
            let whole = enumerate_cubes(grid, 0, 0, &[ShiftFraction::ZERO])?;
            luxemburg_norm(&f, &phi, &whole.cubes()[0])?
        }
        NormKind::Morrey => {
            let s = match args.secondary.as_deref() {
                Some(s) => parse_exponent_f64(s)?,
                None => 1.0,
            };
            output["secondary"] = json!(s);
            let family = family_for(&grid, params)?;
            let est = morrey_norm(&f, p, s, &family)?;
            attach_estimate(&mut output, &est)?;
            est.value
        }
        NormKind::Bmo => {
            let family = family_for(&grid, params)?;
            let est = bmo_norm(&f, &family)?;
            attach_estimate(&mut output, &est)?;
            est.value
        }
    };
    output["value"] = json!(value);
    deliver_json(&output, cli.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn attach_estimate(output: &mut serde_json::Value, est: &ConstantEstimate) -> Result<()> {
    output["argmax"] = json_value(&est.argmax)?;
    output["per_level"] = json_value(&est.per_level)?;
    output["cube_family"] = json_value(&est.family)?;
    Ok(())
}

// ─── weight-constant ────────────────────────────────────────────────────────

fn run_weight_constant(args: &WeightConstantArgs, cli: &Cli, params: &Params) -> Result<ExitCode> {
    // Component weights: files first (they fix the grid), then power laws.
    let mut components: Vec<Weight> = Vec::new();
    let mut described: Vec<serde_json::Value> = Vec::new();
    let mut grid: Option<Grid> = None;
    for path in &args.weights {
        let w = Weight::new(read_csv(path)?)?;
        check_grid_flags(&w.grid(), cli, path)?;
        match grid {
            None => grid = Some(w.grid()),
            Some(g) if g == w.grid() => {}
            Some(_) => {
                return Err(Error::Parse(format!(
                    "weight {} sits on a different grid than an earlier input",
                    path.display()
                )))
            }
        }
        components.push(w);
        described.push(json!({ "file": path.display().to_string() }));
    }
    let grid = match grid {
        Some(g) => g,
        None => make_grid(params.d, params.l, params.n)?,
    };
    let origin = vec![0.0; grid.d()];
    for &b in &args.powers {
        components.push(power_weight(&grid, b, &origin, None)?);
        described.push(json!({ "power": b }));
    }
    if components.is_empty() {
        return Err(Error::Parse(
            "no components: give --weight files and/or --power exponents".into(),
        ));
    }

    let partial: Option<(Weight, serde_json::Value)> =
        match (&args.partial, args.partial_power) {
            (Some(_), Some(_)) => {
                return Err(Error::Parse(
                    "give either --partial or --partial-power, not both".into(),
                ))
            }
            (Some(path), None) => {
                let u = Weight::new(read_csv(path)?)?;
                check_grid_flags(&u.grid(), cli, path)?;
                if u.grid() != grid {
                    return Err(Error::Parse(format!(
                        "partial weight {} sits on a different grid than the components",
                        path.display()
                    )));
                }
                Some((u, json!({ "file": path.display().to_string() })))
            }
            (None, Some(e)) => Some((
                power_weight(&grid, e, &origin, None)?,
                json!({ "power": e }),
            )),
            (None, None) => None,
        };

    let p_list = parse_extreal_list(&args.p)?;
    if p_list.len() != components.len() {
        return Err(Error::Parse(format!(
            "{} component exponents for {} components",
            p_list.len(),
            components.len()
        )));
    }
    let q = args.q.as_deref().map(|s| s.parse::<ExtReal>()).transpose()?;
    let r_list = args.r.as_deref().map(parse_extreal_list).transpose()?;
    if r_list.is_some() && partial.is_none() {
        return Err(Error::Parse(
            "--r applies only to the partial-class constant".into(),
        ));
    }

    let family = family_for(&grid, params)?;
    let mut output = json!({
        "components": described,
        "p": extreal_strings(&p_list),
        "grid": json_value(&GridInfo::from_grid(&grid))?,
    });
    let est = match (partial, &q) {
        (Some((u, partial_desc)), Some(q)) => {
            output["kind"] = json!("partial");
            output["partial"] = partial_desc;
            output["q"] = json!(q.to_string());
            if let Some(r) = &r_list {
                output["r"] = json!(extreal_strings(r));
            }
            let wv = WeightVector::with_partial(components, u)?;
            partial_constant(&wv, &p_list, q, r_list.as_deref(), &family)?
        }
        (Some(_), None) => {
            return Err(Error::Parse(
                "the partial-class constant needs --q".into(),
            ))
        }
        (None, Some(q)) => {
            output["kind"] = json!("vector");
            output["q"] = json!(q.to_string());
            let wv = WeightVector::new(components)?;
            apq_constant(&wv, &p_list, q, &family)?
        }
        (None, None) => {
            if components.len() != 1 {
                return Err(Error::Parse(
                    "a weight vector needs --q; the classical constant takes one component".into(),
                ));
            }
            output["kind"] = json!("classical");
            ap_constant(&components[0], &p_list[0], &family)?
        }
    };
    output["constant"] = json!(est.value);
    attach_estimate(&mut output, &est)?;
    deliver_json(&output, cli.out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

// ─── operator ───────────────────────────────────────────────────────────────

fn symbol_function(grid: &Grid, kind: SymbolKind) -> Result<GriddedFunction> {
    let d = grid.d();
    match kind {
        SymbolKind::Const => GriddedFunction::constant(*grid, 1.0),
        SymbolKind::Sgn => GriddedFunction::from_fn(*grid, |x| x[0].signum()),
        SymbolKind::LogAbs => GriddedFunction::from_fn(*grid, |x| {
            x[..d].iter().map(|t| t * t).sum::<f64>().sqrt().ln()
        }),
        SymbolKind::Coordinate => GriddedFunction::from_fn(*grid, |x| x[0]),
    }
}

fn load_operator_inputs(
    args: &OperatorArgs,
    cli: &Cli,
    params: &Params,
) -> Result<(Vec<GriddedFunction>, Vec<serde_json::Value>)> {
    if !args.inputs.is_empty() && !args.probes.is_empty() {
        return Err(Error::Parse(
            "give either --input files or --probe indices, not both".into(),
        ));
    }
    if args.inputs.is_empty() && args.probes.is_empty() {
        return Err(Error::Parse(
            "at least one --input or --probe is required".into(),
        ));
    }
    let mut fs = Vec::new();
    let mut described = Vec::new();
    if !args.inputs.is_empty() {
        let mut grid: Option<Grid> = None;
        for path in &args.inputs {
            let f = read_csv(path)?;
            check_grid_flags(&f.grid(), cli, path)?;
            match grid {
                None => grid = Some(f.grid()),
                Some(g) if g == f.grid() => {}
                Some(_) => {
                    return Err(Error::Parse(format!(
                        "input {} sits on a different grid than an earlier input",
                        path.display()
                    )))
                }
            }
            described.push(json!(path.display().to_string()));
            fs.push(f);
        }
    } else {
        let grid = make_grid(params.d, params.l, params.n)?;
        for &k in &args.probes {
            let (f, label) = probe_by_index(&grid, params.seed, k)?;
            described.push(json!(label));
            fs.push(f);
        }
    }
    Ok((fs, described))
}

fn run_operator(args: &OperatorArgs, cli: &Cli, params: &Params) -> Result<ExitCode> {
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| Error::Parse("operator output needs --out <file.csv>".into()))?;
    let (fs, described) = load_operator_inputs(args, cli, params)?;
    let grid = fs[0].grid();
    let single = || -> Result<&GriddedFunction> {
        if fs.len() != 1 {
            return Err(Error::Parse(format!(
                "this operator takes exactly one input, got {}",
                fs.len()
            )));
        }
        Ok(&fs[0])
    };

    let mut output = json!({
        "kind": format!("{:?}", args.kind),
        "inputs": described,
        "grid": json_value(&GridInfo::from_grid(&grid))?,
        "out": out.display().to_string(),
    });
    let result = match args.kind {
        OperatorKind::Maximal => {
            let family = family_for(&grid, params)?;
            output["alpha"] = json!(args.alpha);
            output["s"] = json!(args.s);
            fractional_maximal(single()?, args.alpha, args.s, &family)?
        }
        OperatorKind::MultilinearMaximal => {
            let family = family_for(&grid, params)?;
            output["alpha"] = json!(args.alpha);
            let refs: Vec<&GriddedFunction> = fs.iter().collect();
            multilinear_fractional_maximal(&refs, args.alpha, &family)?
        }
        OperatorKind::Integral => {
            output["alpha"] = json!(args.alpha);
            fractional_integral(single()?, args.alpha)?
        }
        OperatorKind::Commutator => {
            output["alpha"] = json!(args.alpha);
            output["symbol"] = json!(format!("{:?}", args.symbol).to_lowercase());
            let b = symbol_function(&grid, args.symbol)?;
            commutator(&b, single()?, args.alpha)?
        }
        OperatorKind::CommutatorSup => {
            output["alpha"] = json!(args.alpha);
            output["symbol"] = json!(format!("{:?}", args.symbol).to_lowercase());
            let b = symbol_function(&grid, args.symbol)?;
            truncated_commutator_sup(&b, single()?, args.alpha, &default_epsilon_set(&grid))?
        }
        OperatorKind::ModifiedMaximal => {
            let family = family_for(&grid, params)?;
            let path = args.modifier.as_deref().ok_or_else(|| {
                Error::Parse("the weight-modified maximal operator needs --modifier".into())
            })?;
            let u = Weight::new(read_csv(path)?)?;
            check_grid_flags(&u.grid(), cli, path)?;
            if u.grid() != grid {
                return Err(Error::Parse(format!(
                    "modifier {} sits on a different grid than the input",
                    path.display()
                )));
            }
            output["gamma"] = json!(args.gamma);
            output["modifier"] = json!(path.display().to_string());
            modified_maximal(single()?, &u, args.gamma, &family)?
        }
    };
    write_csv(&result, out)?;
    let (lo, hi) = result.range();
    output["min"] = json!(lo);
    output["max"] = json!(hi);
    // The CSV went to --out; the summary goes to stdout only.
    print_line(
        &serde_json::to_string_pretty(&output)
            .map_err(|e| Error::Harness(format!("serialization failed: {e}")))?,
    );
    Ok(ExitCode::SUCCESS)
}

// ─── exponents ──────────────────────────────────────────────────────────────

fn run_exponents(args: &ExponentsArgs, cli: &Cli, params: &Params) -> Result<ExitCode> {
    let (output, code) = match &args.op {
        ExponentsOp::Dual { p, q, slot } => {
            let p_list = parse_extreal_list(p)?;
            let q: ExtReal = q.parse()?;
            let (dual_p, dual_q) = dual_tuple(&p_list, &q, *slot)?;
            (
                json!({
                    "op": "dual",
                    "slot": slot,
                    "p": extreal_strings(&p_list),
                    "q": q.to_string(),
                    "dual_p": extreal_strings(&dual_p),
                    "dual_q": dual_q.to_string(),
                }),
                ExitCode::SUCCESS,
            )
        }
        ExponentsOp::Extrapolate { p0, q0, t0, p } => {
            let (q, t) = one_var_extrapolation(
                &p0.parse()?,
                &q0.parse()?,
                &t0.parse()?,
                &p.parse()?,
            )?;
            (
                json!({
                    "op": "extrapolate",
                    "p0": p0.parse::<ExtReal>()?.to_string(),
                    "q0": q0.parse::<ExtReal>()?.to_string(),
                    "t0": t0.parse::<ExtReal>()?.to_string(),
                    "p": p.parse::<ExtReal>()?.to_string(),
                    "q": q.to_string(),
                    "t": t.to_string(),
                }),
                ExitCode::SUCCESS,
            )
        }
        ExponentsOp::Deltas { p, q, r } => {
            let mut system = ExponentSystem::new(parse_extreal_list(p)?, q.parse()?)?;
            if let Some(r) = r {
                system = system.with_grading(parse_extreal_list(r)?)?;
            }
            let derived = derived_deltas(&system)?;
            let mut v = json!({ "op": "deltas" });
            v["derived"] = json_value(&derived)?;
            (v, ExitCode::SUCCESS)
        }
        ExponentsOp::Chain { alpha, beta, p, s } => {
            let chain = offdiagonal_chain(
                params.d as u32,
                &parse_rational(alpha)?,
                &parse_rational(beta)?,
                &parse_rational(p)?,
                &parse_rational(s)?,
            )?;
            let mut v = json!({ "op": "chain", "d": params.d });
            v["chain"] = json_value(&chain)?;
            (v, ExitCode::SUCCESS)
        }
        ExponentsOp::Gate { p, q, a, b } => {
            let report = power_gate(
                params.d,
                &p.parse()?,
                &q.parse()?,
                &parse_rational(a)?,
                &parse_rational(b)?,
            )?;
            let code = match report.status {
                MembershipStatus::Member => ExitCode::SUCCESS,
                MembershipStatus::NonMember => ExitCode::from(1),
                MembershipStatus::Boundary => ExitCode::from(2),
            };
            let mut v = json!({ "op": "gate", "d": params.d });
            v["gate"] = json_value(&report)?;
            (v, code)
        }
        ExponentsOp::TargetCheck {
            p,
            q,
            p_star,
            q_star,
            r,
        } => {
            let verdict = multilinear_target_check(
                &parse_extreal_list(p)?,
                &q.parse()?,
                &parse_extreal_list(p_star)?,
                &q_star.parse()?,
                &parse_extreal_list(r)?,
            )?;
            let code = if verdict.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            let mut v = json!({ "op": "target-check" });
            v["verdict"] = json_value(&verdict)?;
            (v, code)
        }
    };
    deliver_json(&output, cli.out.as_deref())?;
    Ok(code)
}

// ─── verify ─────────────────────────────────────────────────────────────────

fn run_verify(args: &VerifyArgs, cli: &Cli, params: &Params) -> Result<ExitCode> {
    if args.list {
        for entry in CATALOG {
            print_line(&format!("{:<20} {}", entry.name, entry.summary));
        }
        return Ok(ExitCode::SUCCESS);
    }
    let names: Vec<&str> = if args.scenarios.is_empty() {
        CATALOG.iter().map(|e| e.name).collect()
    } else {
        args.scenarios.iter().map(String::as_str).collect()
    };
    // Reject unknown names before any numerics run.
    for name in &names {
        if !CATALOG.iter().any(|e| e.name == *name) {
            let known: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
            return Err(Error::Harness(format!(
                "unknown scenario {name:?}; the catalog contains: {}",
                known.join(", ")
            )));
        }
    }
    if cli.emit_plot && cli.out.is_none() {
        return Err(Error::Parse("--emit-plot needs --out <dir>".into()));
    }
    let mut formats = vec![ReportFormat::Json, ReportFormat::Csv];
    if cli.emit_plot {
        formats.push(ReportFormat::Svg);
    }
    let mut worst = Verdict::Pass;
    for name in names {
        let report = run_scenario(name, params.seed)?;
        print_line(&format!(
            "{}: {} ({} ms)",
            report.scenario, report.verdict, report.runtime_ms
        ));
        if let Some(dir) = cli.out.as_deref() {
            emit_report(&report, &formats, dir)?;
        }
        worst = worst.and(report.verdict);
    }
    Ok(verdict_exit(worst))
}

// ─── scan ───────────────────────────────────────────────────────────────────

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSpec {
    /// Name of the scan; becomes the report's scenario field and file stem.
    title: String,
    operator: ScanOperator,
    lhs: ScanSide,
    rhs: ScanSide,
    schedule: Vec<ScanStage>,
    /// How many of the standard probes to run (1..=8).
    #[serde(default = "default_probe_count")]
    probes: usize,
}

fn default_probe_count() -> usize {
    PROBE_LABELS.len()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
#[serde(tag = "kind")]
enum ScanOperator {
    /// LHS uses the probe unchanged.
    Identity,
    Maximal {
        #[serde(default)]
        alpha: f64,
        #[serde(default = "one")]
        s: f64,
    },
    Integral {
        alpha: f64,
    },
    Commutator {
        alpha: f64,
        symbol: SymbolKind,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanSide {
    /// Norm exponent (rational, decimal, or `inf`).
    p: String,
    /// Pointwise multiplier factors applied before the norm.
    #[serde(default)]
    multiplier: Vec<ScanFactor>,
}

/// One multiplier factor: a power law `|x − anchor|^power` or a smooth
/// envelope `(1 + |x|)^smooth`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanFactor {
    power: Option<f64>,
    #[serde(default)]
    anchor: Vec<f64>,
    smooth: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanStage {
    #[serde(rename = "L")]
    l: f64,
    #[serde(rename = "N")]
    n: usize,
}

fn build_multiplier(grid: &Grid, factors: &[ScanFactor]) -> Result<Option<GriddedFunction>> {
    let mut acc: Option<GriddedFunction> = None;
    for factor in factors {
        let piece = match (factor.power, factor.smooth) {
            (Some(b), None) => {
                let anchor = if factor.anchor.is_empty() {
                    vec![0.0; grid.d()]
                } else {
                    factor.anchor.clone()
                };
                power_weight(grid, b, &anchor, None)?.function().clone()
            }
            (None, Some(e)) => {
                let d = grid.d();
                GriddedFunction::from_fn(*grid, |x| {
                    let r = x[..d].iter().map(|t| t * t).sum::<f64>().sqrt();
                    (1.0 + r).powf(e)
                })?
            }
            _ => {
                return Err(Error::Parse(
                    "each multiplier factor needs exactly one of `power` or `smooth`".into(),
                ))
            }
        };
        acc = Some(match acc {
            None => piece,
            Some(prev) => prev.zip_with(&piece, |a, b| a * b)?,
        });
    }
    Ok(acc)
}

fn apply_multiplier(
    f: &GriddedFunction,
    multiplier: &Option<GriddedFunction>,
) -> Result<GriddedFunction> {
    match multiplier {
        None => Ok(f.clone()),
        Some(m) => f.zip_with(m, |a, b| a * b),
    }
}

fn apply_scan_operator(
    op: &ScanOperator,
    f: &GriddedFunction,
    family: &CubeFamily,
) -> Result<GriddedFunction> {
    match op {
        ScanOperator::Identity => Ok(f.clone()),
        ScanOperator::Maximal { alpha, s } => fractional_maximal(f, *alpha, *s, family),
        ScanOperator::Integral { alpha } => fractional_integral(f, *alpha),
        ScanOperator::Commutator { alpha, symbol } => {
            let b = symbol_function(&f.grid(), *symbol)?;
            commutator(&b, f, *alpha)
        }
    }
}

fn run_scan(cli: &Cli, params: &Params, config: &ConfigFile) -> Result<ExitCode> {
    let raw = config.scan.clone().ok_or_else(|| {
        Error::Parse("the scan subcommand needs --config with a `scan` section".into())
    })?;
    let spec: ScanSpec = serde_json::from_value(raw.clone())
        .map_err(|e| Error::Parse(format!("scan section: {e}")))?;
    if spec.schedule.is_empty() {
        return Err(Error::Parse("scan schedule is empty".into()));
    }
    if spec.probes == 0 || spec.probes > PROBE_LABELS.len() {
        return Err(Error::Parse(format!(
            "probe count must lie in 1..={}, got {}",
            PROBE_LABELS.len(),
            spec.probes
        )));
    }
    if cli.emit_plot && cli.out.is_none() {
        return Err(Error::Parse("--emit-plot needs --out <dir>".into()));
    }
    let lhs_p = parse_exponent_f64(&spec.lhs.p)?;
    let rhs_p = parse_exponent_f64(&spec.rhs.p)?;

    let mut stage_labels = Vec::new();
    let mut samples = Vec::new();
    let mut last_geometry = None;
    for stage in &spec.schedule {
        let grid = make_grid(params.d, stage.l, stage.n)?;
        let family = family_for(&grid, params)?;
        let probes = probe_family(&grid, params.seed)?;
        let lhs_mult = build_multiplier(&grid, &spec.lhs.multiplier)?;
        let rhs_mult = build_multiplier(&grid, &spec.rhs.multiplier)?;
        let mut row = Vec::with_capacity(spec.probes);
        for f in probes.iter().take(spec.probes) {
            let transformed = apply_scan_operator(&spec.operator, f, &family)?;
            let lhs = lebesgue_norm(&apply_multiplier(&transformed, &lhs_mult)?, lhs_p, None)?;
            let rhs = lebesgue_norm(&apply_multiplier(f, &rhs_mult)?, rhs_p, None)?;
            row.push(RatioSample { lhs, rhs });
        }
        stage_labels.push(format!("L={} N={}", stage.l, stage.n));
        samples.push(row);
        last_geometry = Some((grid, family));
    }

    let probe_labels: Vec<String> = PROBE_LABELS[..spec.probes]
        .iter()
        .map(|s| (*s).to_string())
        .collect();
    let scan = ratio_scan(&spec.title, &stage_labels, &probe_labels, &samples)?;

    let mut report = InequalityReport::new(&spec.title);
    report.params = json!({
        "scan": raw,
        "d": params.d,
        "seed": params.seed,
        "rejected": scan.rejected,
    });
    if let Some((grid, family)) = &last_geometry {
        report.grid = Some(GridInfo::from_grid(grid));
        report.cube_family = Some(FamilyInfo::from_family(family));
    }
    report
        .results
        .push(NamedValue::plain("final-max-ratio", *scan.max_ratios.last().unwrap()));
    report
        .results
        .push(NamedValue::plain("final-drift", scan.final_drift()));
    report.verdict = scan.stability_verdict();
    report.tables.push(scan.table);

    print_line(&format!(
        "{}: {} (final max ratio {:.6}, drift {:+.2}%)",
        report.scenario,
        report.verdict,
        report.value("final-max-ratio").unwrap(),
        100.0 * report.value("final-drift").unwrap()
    ));
    if let Some(dir) = cli.out.as_deref() {
        let mut formats = vec![ReportFormat::Json, ReportFormat::Csv];
        if cli.emit_plot {
            formats.push(ReportFormat::Svg);
        }
        emit_report(&report, &formats, dir)?;
    }
    Ok(verdict_exit(report.verdict))
}

// ─── entry point ────────────────────────────────────────────────────────────

fn dispatch(cli: &Cli) -> Result<ExitCode> {
    let config = load_config(cli.config.as_deref())?;
    let params = merge_params(cli, &config)?;
    match &cli.command {
        Command::Norm(args) => run_norm(args, cli, &params),
        Command::WeightConstant(args) => run_weight_constant(args, cli, &params),
        Command::Operator(args) => run_operator(args, cli, &params),
        Command::Exponents(args) => run_exponents(args, cli, &params),
        Command::Verify(args) => run_verify(args, cli, &params),
        Command::Scan(_) => run_scan(cli, &params, &config),
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version are successful exits; everything else is a
            // usage error, which this tool reports as 3.
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            use std::io::Write as _;
            let _ = writeln!(std::io::stderr(), "error: {err}");
            ExitCode::from(3)
        }
    }
}
