//! The operator zoo: fractional and multilinear maximal functions, a
//! fractional integral with singularity-corrected quadrature, commutators,
//! a truncated commutator supremum, a weight-modified maximal operator, and
//! the majorant-producing iteration built on top of it.
//!
//! Every operator is a pure function of gridded data. Kernel sums are
//! parallel across target cells with the inner sums in fixed index order, so
//! results are deterministic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::grid::{Cube, CubeFamily, Grid, GriddedFunction, PrefixSums, MAX_DIM};
use crate::norms::lebesgue_norm;
use crate::norms::lorentz_norm;
use crate::weights::{ln_power_mean, Weight};
use crate::{Error, Result};

/// Largest per-axis cell count admitted to a dense `O(N^{2d})` kernel pass,
/// indexed by dimension − 1. Keeps full evaluations at desk scale (minutes).
pub const KERNEL_BUDGET: [usize; 3] = [8192, 128, 16];

/// Seed for the fixed probe family used by operator-norm estimation.
pub const PROBE_SEED: u64 = 0xC0FFEE;

/// Volume of the unit ball, indexed by dimension − 1.
const UNIT_BALL_VOLUME: [f64; 3] = [
    2.0,
    std::f64::consts::PI,
    4.0 * std::f64::consts::PI / 3.0,
];

// ─── shared validation helpers ──────────────────────────────────────────────

fn check_family_grid(grid: Grid, family: &CubeFamily) -> Result<()> {
    if family.grid() != grid {
        return Err(Error::Operator(
            "cube family was enumerated on a different grid than the input".into(),
        ));
    }
    Ok(())
}

fn check_same_grid(a: Grid, b: Grid, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::Operator(format!("{what} live on different grids")));
    }
    Ok(())
}

fn check_nonnegative(f: &GriddedFunction, what: &str) -> Result<()> {
    if let Some(k) = f.values().iter().position(|&v| v < 0.0) {
        return Err(Error::Operator(format!(
            "{what} must be nonnegative; cell {k} holds {}",
            f.values()[k]
        )));
    }
    Ok(())
}

fn check_kernel_order(alpha: f64, d: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < d as f64) {
        return Err(Error::Operator(format!(
            "kernel order must satisfy 0 < α < d = {d}; got α = {alpha}"
        )));
    }
    Ok(())
}

fn check_kernel_budget(grid: &Grid) -> Result<()> {
    let limit = KERNEL_BUDGET[grid.d() - 1];
    if grid.n() > limit {
        return Err(Error::Budget(format!(
            "dense kernel pass in d = {} is limited to N ≤ {limit} cells per axis; got N = {}",
            grid.d(),
            grid.n()
        )));
    }
    Ok(())
}

// ─── maximal functions ──────────────────────────────────────────────────────

/// Evaluate `per_cube` on every family cube (in parallel), then scatter the
/// running maximum onto the cells each cube covers. Cells outside every cube
/// keep 0, which is the supremum over an empty collection of nonnegative
/// cube values.
fn scatter_sup(
    family: &CubeFamily,
    per_cube: impl Fn(&Cube) -> f64 + Sync,
) -> Result<Vec<f64>> {
    let grid = family.grid();
    let vals: Vec<f64> = family.cubes().par_iter().map(&per_cube).collect();
    if let Some(bad) = vals.iter().position(|v| v.is_nan()) {
        return Err(Error::Operator(format!(
            "cube evaluation produced NaN on cube #{bad}"
        )));
    }
    let mut out = vec![0.0; grid.len()];
    for (cube, &v) in family.cubes().iter().zip(&vals) {
        cube.for_each_cell(&grid, |k| {
            if v > out[k] {
                out[k] = v;
            }
        });
    }
    Ok(out)
}

/// Fractional maximal function with an inner power: at each cell the maximum
/// over family cubes `Q` containing it of
/// `(|Q|^{α/d} ⟨|f|^s⟩_Q)^{1/s}`.
///
/// `α = 0`, `s = 1` is the classical (Hardy–Littlewood style) maximal
/// function over the family.
pub fn fractional_maximal(
    f: &GriddedFunction,
    alpha: f64,
    s: f64,
    family: &CubeFamily,
) -> Result<GriddedFunction> {
    let grid = f.grid();
    check_family_grid(grid, family)?;
    let d = grid.d() as f64;
    if !(alpha >= 0.0 && alpha < d) {
        return Err(Error::Operator(format!(
            "fractional order must satisfy 0 ≤ α < d = {d}; got α = {alpha}"
        )));
    }
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::Operator(format!(
            "inner exponent must satisfy 1 ≤ s < ∞; got s = {s}"
        )));
    }
    let plain = s == 1.0;
    let powered: Vec<f64> = if plain {
        f.values().iter().map(|v| v.abs()).collect()
    } else {
        f.values().iter().map(|v| v.abs().powf(s)).collect()
    };
    let sup = scatter_sup(family, |q| {
        let mut sum = 0.0;
        q.for_each_cell(&grid, |k| sum += powered[k]);
        q.volume(&grid).powf(alpha / d) * (sum / q.cell_count() as f64)
    })?;
    let values = if plain {
        sup
    } else {
        sup.into_iter().map(|v| v.powf(1.0 / s)).collect()
    };
    GriddedFunction::new(grid, values)
}

/// Multilinear fractional maximal function: at each cell the maximum over
/// family cubes `Q` containing it of `|Q|^{α/d} Π_i ⟨f_i⟩_Q`. All inputs
/// must be nonnegative and share one grid; `0 ≤ α < m·d`.
pub fn multilinear_fractional_maximal(
    fs: &[&GriddedFunction],
    alpha: f64,
    family: &CubeFamily,
) -> Result<GriddedFunction> {
    let m = fs.len();
    if m == 0 {
        return Err(Error::Operator(
            "multilinear maximal needs at least one input function".into(),
        ));
    }
    let grid = fs[0].grid();
    check_family_grid(grid, family)?;
    for (i, f) in fs.iter().enumerate() {
        check_same_grid(grid, f.grid(), "multilinear maximal inputs")?;
        check_nonnegative(f, &format!("multilinear maximal input #{i}"))?;
    }
    let d = grid.d() as f64;
    let md = m as f64 * d;
    if !(alpha >= 0.0 && alpha < md) {
        return Err(Error::Operator(format!(
            "fractional order must satisfy 0 ≤ α < m·d = {md}; got α = {alpha}"
        )));
    }
    let sup = scatter_sup(family, |q| {
        let count = q.cell_count() as f64;
        let mut prod = q.volume(&grid).powf(alpha / d);
        for f in fs {
            let mut sum = 0.0;
            q.for_each_cell(&grid, |k| sum += f.values()[k]);
            prod *= sum / count;
        }
        prod
    })?;
    GriddedFunction::new(grid, sup)
}

// ─── fractional integral and commutators ────────────────────────────────────

/// Radius of the ball whose volume equals one grid cell.
fn equal_volume_ball_radius(grid: &Grid) -> f64 {
    let d = grid.d();
    (grid.cell_volume() / UNIT_BALL_VOLUME[d - 1]).powf(1.0 / d as f64)
}

/// Kernel weight a cell assigns to itself: the exact radial integral of
/// `|z|^{α−d}` over the ball of one cell volume, `(σ_{d−1}/α)·ρ^α` with
/// `σ_{d−1} = d·V_d` the unit-sphere area.
fn self_cell_coefficient(grid: &Grid, alpha: f64) -> f64 {
    let d = grid.d();
    let sigma = d as f64 * UNIT_BALL_VOLUME[d - 1];
    let rho = equal_volume_ball_radius(grid);
    sigma / alpha * rho.powf(alpha)
}

fn euclidean_distance(a: &[f64; MAX_DIM], b: &[f64; MAX_DIM], d: usize) -> f64 {
    let mut r2 = 0.0;
    for axis in 0..d {
        let diff = a[axis] - b[axis];
        r2 += diff * diff;
    }
    r2.sqrt()
}

/// One dense kernel pass: for every target cell `k` and every payload `p`,
/// `Σ_j payload_p[j]·K(x_k, y_j)` with `K(x,y) = |x−y|^{α−d}·cellvol` off
/// the diagonal and the equal-volume-ball quadrature on it. Parallel across
/// targets; inner sums in fixed index order. Returns one sum vector per
/// payload.
fn kernel_pass(grid: &Grid, alpha: f64, payloads: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
    let d = grid.d();
    check_kernel_order(alpha, d)?;
    check_kernel_budget(grid)?;
    let len = grid.len();
    let vol = grid.cell_volume();
    let expo = alpha - d as f64;
    let self_coeff = self_cell_coefficient(grid, alpha);
    let positions: Vec<[f64; MAX_DIM]> = (0..len).map(|k| grid.position(k)).collect();
    let per_target: Vec<Vec<f64>> = (0..len)
        .into_par_iter()
        .map(|k| {
            let mut acc = vec![0.0; payloads.len()];
            for j in 0..len {
                let w = if j == k {
                    self_coeff
                } else {
                    euclidean_distance(&positions[k], &positions[j], d).powf(expo) * vol
                };
                for (p, payload) in payloads.iter().enumerate() {
                    acc[p] += payload[j] * w;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![vec![0.0; len]; payloads.len()];
    for (k, acc) in per_target.iter().enumerate() {
        for (p, &v) in acc.iter().enumerate() {
            out[p][k] = v;
        }
    }
    Ok(out)
}

/// Fractional integral: `Σ_y f(y)·|x−y|^{α−d}·cellvol` over source cells,
/// with the singular self-cell replaced by the exact radial integral of the
/// kernel over the ball of one cell volume. Linear and positivity-preserving.
pub fn fractional_integral(f: &GriddedFunction, alpha: f64) -> Result<GriddedFunction> {
    let grid = f.grid();
    let sums = kernel_pass(&grid, alpha, &[f.values()])?;
    GriddedFunction::new(grid, sums.into_iter().next().unwrap())
}

/// Commutator of a symbol with the fractional integral:
/// `b(x)·I_α f(x) − I_α(bf)(x)`, computed in one kernel pass.
pub fn commutator(
    b: &GriddedFunction,
    f: &GriddedFunction,
    alpha: f64,
) -> Result<GriddedFunction> {
    let grid = f.grid();
    check_same_grid(grid, b.grid(), "symbol and argument")?;
    let bf = b.zip_with(f, |x, y| x * y)?;
    let sums = kernel_pass(&grid, alpha, &[f.values(), bf.values()])?;
    let values = (0..grid.len())
        .map(|k| b.values()[k] * sums[0][k] - sums[1][k])
        .collect();
    GriddedFunction::new(grid, values)
}

/// Default truncation radii `{2^j·h : j = 0..log2(N)}` in decreasing order —
/// every scale the grid resolves, from one cell width up to the domain
/// diameter.
pub fn default_epsilon_set(grid: &Grid) -> Vec<f64> {
    let h = grid.h();
    let jmax = (grid.n() as f64).log2().floor() as i32;
    (0..=jmax).rev().map(|j| 2f64.powi(j) * h).collect()
}

/// Truncated commutator supremum: at each cell `x` the maximum over the
/// truncation radii of
/// `|(b(x) − ⟨b⟩_{Q(x,ε)})·Σ_{|x−y|>ε} f(y)|x−y|^{α−d}·cellvol|`,
/// where `⟨b⟩_{Q(x,ε)}` averages the symbol over the axis-aligned cube of
/// side `2ε` at `x`, clipped to the domain. The radii must be a strictly
/// decreasing list with every entry at least one cell width.
pub fn truncated_commutator_sup(
    b: &GriddedFunction,
    f: &GriddedFunction,
    alpha: f64,
    eps_set: &[f64],
) -> Result<GriddedFunction> {
    let grid = f.grid();
    check_same_grid(grid, b.grid(), "symbol and argument")?;
    let d = grid.d();
    check_kernel_order(alpha, d)?;
    check_kernel_budget(&grid)?;
    if eps_set.is_empty() {
        return Err(Error::Operator("truncation radius list is empty".into()));
    }
    let h = grid.h();
    for pair in eps_set.windows(2) {
        if !(pair[1] < pair[0]) {
            return Err(Error::Operator(format!(
                "truncation radii must be strictly decreasing; got {} before {}",
                pair[0], pair[1]
            )));
        }
    }
    for &eps in eps_set {
        if !eps.is_finite() || eps < h * (1.0 - 1e-12) {
            return Err(Error::Operator(format!(
                "every truncation radius must be a finite length ≥ one cell width {h}; got {eps}"
            )));
        }
    }
    let len = grid.len();
    let n = grid.n();
    let vol = grid.cell_volume();
    let expo = alpha - d as f64;
    let positions: Vec<[f64; MAX_DIM]> = (0..len).map(|k| grid.position(k)).collect();
    let b_sums = PrefixSums::new(b);
    // Cell layers on each side of the center whose centers the radius reaches.
    let layers: Vec<usize> = eps_set
        .iter()
        .map(|&eps| ((eps / h) * (1.0 + 1e-12)).floor() as usize)
        .collect();
    let values: Vec<f64> = (0..len)
        .into_par_iter()
        .map(|k| {
            // Kernel contributions from every source cell, reused across radii.
            let mut kf = vec![0.0; len];
            let mut dist = vec![0.0; len];
            for j in 0..len {
                if j != k {
                    let r = euclidean_distance(&positions[k], &positions[j], d);
                    dist[j] = r;
                    kf[j] = f.values()[j] * r.powf(expo) * vol;
                }
            }
            let center = grid.coords(k);
            let mut best = 0.0f64;
            for (i, &eps) in eps_set.iter().enumerate() {
                let mut tail = 0.0;
                for j in 0..len {
                    if dist[j] > eps {
                        tail += kf[j];
                    }
                }
                let mut lo = [0usize; MAX_DIM];
                let mut hi = [0usize; MAX_DIM];
                for axis in 0..d {
                    lo[axis] = center[axis].saturating_sub(layers[i]);
                    hi[axis] = (center[axis] + layers[i] + 1).min(n);
                }
                let count: usize = (0..d).map(|a| hi[a] - lo[a]).product();
                let mean_b = b_sums.box_sum(&lo[..d], &hi[..d]) / count as f64;
                let v = ((b.values()[k] - mean_b) * tail).abs();
                if v > best {
                    best = v;
                }
            }
            best
        })
        .collect();
    GriddedFunction::new(grid, values)
}

// ─── modified maximal operator and the majorant iteration ───────────────────

/// Weight-modified maximal operator:
/// `u(x)^{1/γ} · sup_{Q∋x} ⟨f⟩_Q ⟨u^{−1/γ}⟩_Q` with `0 < γ ≤ 1` and `f ≥ 0`.
/// Larger exponents are rejected: the iteration handles them by running at
/// `γ = 1` and raising the result afterwards.
pub fn modified_maximal(
    f: &GriddedFunction,
    u: &Weight,
    gamma: f64,
    family: &CubeFamily,
) -> Result<GriddedFunction> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Operator(format!(
            "modified maximal exponent must satisfy 0 < γ ≤ 1; got γ = {gamma}"
        )));
    }
    let grid = f.grid();
    check_same_grid(grid, u.grid(), "argument and modifying weight")?;
    check_family_grid(grid, family)?;
    check_nonnegative(f, "modified maximal argument")?;
    let s = -1.0 / gamma;
    let ln_u = u.ln_values();
    let sup = scatter_sup(family, |q| {
        let mut sum = 0.0;
        q.for_each_cell(&grid, |k| sum += f.values()[k]);
        let mean_f = sum / q.cell_count() as f64;
        mean_f * (s * ln_power_mean(&ln_u, &grid, q, s)).exp()
    })?;
    let values = sup
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            let uk = u.values()[k];
            if gamma == 1.0 {
                uk * v
            } else {
                uk.powf(1.0 / gamma) * v
            }
        })
        .collect();
    GriddedFunction::new(grid, values)
}

/// The fixed 8-member probe family used for operator-norm estimation: four
/// Gaussian bumps (two centers × two widths), two indicators (a unit cube at
/// the origin clipped to the domain, and a half-domain), and two seeded
/// random step functions with 8 levels along the first axis. Deterministic
/// for a given grid and seed.
pub fn probe_family(grid: &Grid, seed: u64) -> Result<Vec<GriddedFunction>> {
    let l = grid.l();
    let d = grid.d();
    let mut probes = Vec::with_capacity(8);
    for &center_scale in &[0.0, 1.0 / 3.0] {
        for &width in &[l / 4.0, l / 12.0] {
            let c = center_scale * l;
            probes.push(GriddedFunction::from_fn(*grid, |x| {
                let r2: f64 = x[..d].iter().map(|&xi| (xi - c) * (xi - c)).sum();
                (-r2 / (2.0 * width * width)).exp()
            })?);
        }
    }
    let edge = l.min(1.0);
    probes.push(GriddedFunction::from_fn(*grid, |x| {
        if x[..d].iter().all(|&xi| (0.0..=edge).contains(&xi)) {
            1.0
        } else {
            0.0
        }
    })?);
    probes.push(GriddedFunction::from_fn(*grid, |x| {
        if x[0] < 0.0 {
            1.0
        } else {
            0.0
        }
    })?);
    let n = grid.n();
    for offset in 0..2u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(offset));
        let levels: Vec<f64> = (0..8).map(|_| rng.gen_range(0.25..4.0)).collect();
        let values: Vec<f64> = (0..grid.len())
            .map(|k| levels[grid.coords(k)[0] * 8 / n])
            .collect();
        probes.push(GriddedFunction::new(*grid, values)?);
    }
    Ok(probes)
}

/// Outcome of the majorant iteration: the truncated series, the estimated
/// operator norm that damps it, and the reported truncation tail.
#[derive(Debug, Clone)]
pub struct RdfOutcome {
    /// `Σ_{k<K} M^k f / (2·norm_estimate)^k` — the truncated majorant series.
    pub series: GriddedFunction,
    /// Estimated operator norm on `L^{tγ}(w^t)`: twice the best probe ratio.
    /// The safety factor keeps the geometric ratio below ½ under estimation
    /// error.
    pub norm_estimate: f64,
    /// Best raw ratio `‖Mg‖/‖g‖` observed over the probe family.
    pub probe_ratio: f64,
    /// `2^{−K}·‖f‖` — the norm budget of the discarded tail.
    pub tail_bound: f64,
    /// Number of series terms kept (orders `0..K`).
    pub terms: usize,
}

/// Majorant iteration: the truncated series
/// `Σ_{k=0}^{K−1} M_{u,γ}^k f / (2‖M_{u,γ}‖)^k`
/// with the operator norm on `L^{tγ}(w^t)` estimated from the fixed probe
/// family. The output dominates `f` cell-wise, its norm stays within
/// `2‖f‖` plus the reported tail bound, and — by construction of the
/// damping — its maximal function is controlled by `2·norm_estimate` times
/// itself.
pub fn rdf_iterate(
    f: &GriddedFunction,
    u: &Weight,
    gamma: f64,
    t: f64,
    w: &Weight,
    k_terms: usize,
    family: &CubeFamily,
) -> Result<RdfOutcome> {
    let grid = f.grid();
    check_same_grid(grid, u.grid(), "argument and modifying weight")?;
    check_same_grid(grid, w.grid(), "argument and norm weight")?;
    check_family_grid(grid, family)?;
    check_nonnegative(f, "iteration seed")?;
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::Operator(format!(
            "iteration exponent must satisfy 0 < γ ≤ 1 (run at γ = 1 and raise the \
             result for larger targets); got γ = {gamma}"
        )));
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Operator(format!(
            "norm exponent must satisfy 0 < t < ∞; got t = {t}"
        )));
    }
    if k_terms == 0 {
        return Err(Error::Operator(
            "iteration needs at least one series term".into(),
        ));
    }
    let p_norm = t * gamma;
    let wt = w.pow(t)?;
    let norm_f = lebesgue_norm(f, p_norm, Some(&wt))?;
    if !norm_f.is_finite() {
        return Err(Error::Norm(
            "iteration seed has a non-finite norm at grid scale".into(),
        ));
    }
    let mut best = 0.0f64;
    for g in probe_family(&grid, PROBE_SEED)? {
        let ng = lebesgue_norm(&g, p_norm, Some(&wt))?;
        if !(ng.is_finite() && ng > 0.0) {
            continue;
        }
        let mg = modified_maximal(&g, u, gamma, family)?;
        let nm = lebesgue_norm(&mg, p_norm, Some(&wt))?;
        let ratio = nm / ng;
        if ratio.is_finite() && ratio > best {
            best = ratio;
        }
    }
    if best <= 0.0 {
        return Err(Error::Operator(
            "probe family is degenerate: no probe produced a positive finite norm ratio".into(),
        ));
    }
    let norm_estimate = 2.0 * best;
    let denom = 2.0 * norm_estimate;
    let mut series = f.clone();
    let mut term = f.clone();
    for _ in 1..k_terms {
        term = modified_maximal(&term, u, gamma, family)?.map(|v| v / denom)?;
        series = series.zip_with(&term, |a, b| a + b)?;
    }
    let tail_bound = 2f64.powi(-(k_terms as i32)) * norm_f;
    Ok(RdfOutcome {
        series,
        norm_estimate,
        probe_ratio: best,
        tail_bound,
        terms: k_terms,
    })
}

/// Cell-wise slack in the domination of the fractional maximal function by
/// the bilinear one:
/// `‖u‖_{L^{d/(α−β),1}} · M_{β,2}(f, u^{−1}) − M_α f`.
/// The per-cube chain behind the bound is exact, so the result is shown to
/// be no smaller than `−1e-9` relative to its first term.
pub fn domination_gap(
    f: &GriddedFunction,
    u: &Weight,
    alpha: f64,
    beta: f64,
    family: &CubeFamily,
) -> Result<GriddedFunction> {
    let grid = f.grid();
    check_same_grid(grid, u.grid(), "argument and partial weight")?;
    check_family_grid(grid, family)?;
    check_nonnegative(f, "domination argument")?;
    let d = grid.d() as f64;
    if !(0.0 <= beta && beta < alpha && alpha < d) {
        return Err(Error::Operator(format!(
            "domination orders must satisfy 0 ≤ β < α < d = {d}; got β = {beta}, α = {alpha}"
        )));
    }
    let lorentz_p = d / (alpha - beta);
    let u_norm = lorentz_norm(u.function(), lorentz_p, 1.0)?;
    if !u_norm.is_finite() {
        return Err(Error::Norm(format!(
            "partial weight has no finite L^({lorentz_p},1) norm at grid scale"
        )));
    }
    let lhs = fractional_maximal(f, alpha, 1.0, family)?;
    let u_inv = u.reciprocal()?;
    let rhs = multilinear_fractional_maximal(&[f, u_inv.function()], beta, family)?;
    rhs.zip_with(&lhs, |r, l| u_norm * r - l)
}

// ─── tests ──────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{cube_average, default_shifts, enumerate_cubes, make_grid};

    fn full_family(grid: Grid) -> CubeFamily {
        enumerate_cubes(grid, 0, grid.max_level(), &default_shifts()).unwrap()
    }

    fn seeded_function(grid: Grid, seed: u64, lo: f64, hi: f64) -> GriddedFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..grid.len()).map(|_| rng.gen_range(lo..hi)).collect();
        GriddedFunction::new(grid, values).unwrap()
    }

    #[test]
    fn maximal_of_constant_is_constant() {
        for (d, n) in [(1usize, 64usize), (2, 16)] {
            let grid = make_grid(d, 1.0, n).unwrap();
            let fam = full_family(grid);
            let f = GriddedFunction::constant(grid, 2.5).unwrap();
            let out = fractional_maximal(&f, 0.0, 1.0, &fam).unwrap();
            for &v in out.values() {
                assert!((v - 2.5).abs() <= 1e-12, "d={d}: got {v}");
            }
        }
    }

    #[test]
    fn maximal_of_indicator_matches_interval_search() {
        // Domain [−2,2], f the indicator of [0,1]; at the rightmost cell the
        // best family cube is [0,2] with average 1/2, and no cell interval
        // containing that cell does better.
        let grid = make_grid(1, 2.0, 64).unwrap();
        let fam = full_family(grid);
        let f = GriddedFunction::from_fn(grid, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let out = fractional_maximal(&f, 0.0, 1.0, &fam).unwrap();
        let target = grid.len() - 1;
        let mut brute = 0.0f64;
        for lo in 0..=target {
            let count = (target - lo + 1) as f64;
            let sum: f64 = f.values()[lo..=target].iter().sum();
            brute = brute.max(sum / count);
        }
        assert!((brute - 0.5).abs() <= 1e-12, "interval search gave {brute}");
        assert!(
            (out.values()[target] - brute).abs() <= 1e-12,
            "family sup {} vs interval search {brute}",
            out.values()[target]
        );
    }

    #[test]
    fn maximal_inner_exponents_are_ordered() {
        let grid = make_grid(1, 1.0, 128).unwrap();
        let fam = full_family(grid);
        let f = seeded_function(grid, 7, -2.0, 3.0);
        let m1 = fractional_maximal(&f, 0.3, 1.0, &fam).unwrap();
        let m2 = fractional_maximal(&f, 0.3, 2.0, &fam).unwrap();
        for k in 0..grid.len() {
            assert!(
                m1.values()[k] <= m2.values()[k] + 1e-12,
                "cell {k}: {} > {}",
                m1.values()[k],
                m2.values()[k]
            );
        }
    }

    #[test]
    fn maximal_dominates_every_cube_average() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let fam = full_family(grid);
        let f = seeded_function(grid, 11, 0.1, 4.0);
        let out = fractional_maximal(&f, 0.0, 1.0, &fam).unwrap();
        for q in fam.cubes() {
            let avg = cube_average(&f, q).unwrap();
            q.for_each_cell(&grid, |k| {
                assert!(
                    out.values()[k] >= avg * (1.0 - 1e-15),
                    "cell {k} below the average of a containing cube"
                );
            });
        }
    }

    #[test]
    fn maximal_rejects_bad_exponents() {
        let grid = make_grid(1, 1.0, 16).unwrap();
        let fam = full_family(grid);
        let f = GriddedFunction::constant(grid, 1.0).unwrap();
        assert!(fractional_maximal(&f, 1.0, 1.0, &fam).is_err());
        assert!(fractional_maximal(&f, -0.1, 1.0, &fam).is_err());
        assert!(fractional_maximal(&f, 0.0, 0.5, &fam).is_err());
    }

    #[test]
    fn multilinear_reduces_to_single_function_case() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let fam = full_family(grid);
        let f = seeded_function(grid, 3, 0.2, 2.0);
        let single = fractional_maximal(&f, 0.3, 1.0, &fam).unwrap();
        let multi = multilinear_fractional_maximal(&[&f], 0.3, &fam).unwrap();
        for k in 0..grid.len() {
            let a = single.values()[k];
            let b = multi.values()[k];
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "cell {k}: {a} vs {b}");
        }
    }

    #[test]
    fn multilinear_constant_pair_takes_largest_cube() {
        let grid = make_grid(1, 1.0, 32).unwrap();
        let fam = full_family(grid);
        let f1 = GriddedFunction::constant(grid, 1.5).unwrap();
        let f2 = GriddedFunction::constant(grid, 0.8).unwrap();
        let out = multilinear_fractional_maximal(&[&f1, &f2], 0.5, &fam).unwrap();
        let expect = 2f64.powf(0.5) * 1.5 * 0.8;
        for &v in out.values() {
            assert!((v - expect).abs() <= 1e-12, "got {v}, want {expect}");
        }
    }

    #[test]
    fn multilinear_annihilated_by_zero_factor() {
        let grid = make_grid(1, 1.0, 32).unwrap();
        let fam = full_family(grid);
        let f1 = seeded_function(grid, 5, 0.1, 2.0);
        let f2 = GriddedFunction::constant(grid, 0.0).unwrap();
        let out = multilinear_fractional_maximal(&[&f1, &f2], 0.25, &fam).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn multilinear_rejects_signed_input() {
        let grid = make_grid(1, 1.0, 16).unwrap();
        let fam = full_family(grid);
        let f = seeded_function(grid, 9, -1.0, 1.0);
        assert!(multilinear_fractional_maximal(&[&f], 0.0, &fam).is_err());
    }

    #[test]
    fn integral_of_zero_vanishes() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let f = GriddedFunction::constant(grid, 0.0).unwrap();
        let out = fractional_integral(&f, 0.5).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn integral_rejects_bad_order_and_budget() {
        let grid = make_grid(1, 1.0, 16).unwrap();
        let f = GriddedFunction::constant(grid, 1.0).unwrap();
        assert!(matches!(
            fractional_integral(&f, 0.0),
            Err(Error::Operator(_))
        ));
        assert!(matches!(
            fractional_integral(&f, 1.0),
            Err(Error::Operator(_))
        ));
        let wide = make_grid(2, 1.0, 256).unwrap();
        let g = GriddedFunction::constant(wide, 1.0).unwrap();
        assert!(matches!(fractional_integral(&g, 0.5), Err(Error::Budget(_))));
    }

    #[test]
    fn integral_recovers_closed_form_near_singularity() {
        // ∫_{−1}^{1} |y|^{−1/2} dy = 4; evaluate at the cell nearest 0.
        let grid = make_grid(1, 1.0, 4096).unwrap();
        let f = GriddedFunction::constant(grid, 1.0).unwrap();
        let out = fractional_integral(&f, 0.5).unwrap();
        let k = grid.len() / 2;
        let v = out.values()[k];
        assert!((v - 4.0).abs() <= 0.02 * 4.0, "got {v}, want 4.0 ± 2%");
    }

    #[test]
    fn integral_preserves_even_symmetry() {
        let grid = make_grid(1, 1.0, 512).unwrap();
        let f = GriddedFunction::from_fn(grid, |x| (-2.0 * x[0] * x[0]).exp()).unwrap();
        let out = fractional_integral(&f, 0.5).unwrap();
        let n = grid.len();
        for k in 0..n / 2 {
            let a = out.values()[k];
            let b = out.values()[n - 1 - k];
            assert!(
                (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                "cells {k} and {}: {a} vs {b}",
                n - 1 - k
            );
        }
    }

    #[test]
    fn integral_is_linear() {
        let grid = make_grid(1, 1.0, 128).unwrap();
        let f = seeded_function(grid, 21, -1.0, 2.0);
        let g = seeded_function(grid, 22, -1.0, 2.0);
        let combo = f.zip_with(&g, |a, b| 2.0 * a + 3.0 * b).unwrap();
        let lhs = fractional_integral(&combo, 0.5).unwrap();
        let fi = fractional_integral(&f, 0.5).unwrap();
        let gi = fractional_integral(&g, 0.5).unwrap();
        for k in 0..grid.len() {
            let want = 2.0 * fi.values()[k] + 3.0 * gi.values()[k];
            let got = lhs.values()[k];
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "cell {k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn commutator_with_constant_symbol_vanishes() {
        let grid = make_grid(1, 1.0, 128).unwrap();
        let b = GriddedFunction::constant(grid, std::f64::consts::PI).unwrap();
        let f = seeded_function(grid, 31, -1.0, 2.0);
        let out = commutator(&b, &f, 0.5).unwrap();
        let scale = fractional_integral(&f, 0.5)
            .unwrap()
            .values()
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        for &v in out.values() {
            assert!(v.abs() <= 1e-12 * scale.max(1.0), "residual {v}");
        }
    }

    #[test]
    fn commutator_ignores_constant_shifts() {
        let grid = make_grid(1, 1.0, 128).unwrap();
        let b = GriddedFunction::from_fn(grid, |x| x[0].signum()).unwrap();
        let shifted = b.map(|v| v + 7.5).unwrap();
        let f = seeded_function(grid, 33, 0.0, 2.0);
        let out1 = commutator(&b, &f, 0.5).unwrap();
        let out2 = commutator(&shifted, &f, 0.5).unwrap();
        let scale = out1.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        for k in 0..grid.len() {
            let diff = (out1.values()[k] - out2.values()[k]).abs();
            assert!(diff <= 1e-11 * scale.max(1.0), "cell {k}: drift {diff}");
        }
    }

    #[test]
    fn commutator_matches_direct_double_sum() {
        let grid = make_grid(1, 1.0, 128).unwrap();
        let b = GriddedFunction::from_fn(grid, |x| x[0].signum()).unwrap();
        let f = GriddedFunction::from_fn(grid, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let alpha = 0.5;
        let out = commutator(&b, &f, alpha).unwrap();
        // Independent oracle: Σ_y (b(x)−b(y))·K(x,y)·f(y) summed directly.
        let k = grid.len() / 4; // cell nearest −0.5
        let vol = grid.cell_volume();
        let xk = grid.center_coord(k);
        let mut want = 0.0;
        for j in 0..grid.len() {
            if j == k {
                continue; // the symbol difference vanishes on the diagonal
            }
            let yj = grid.center_coord(j);
            let kernel = (xk - yj).abs().powf(alpha - 1.0) * vol;
            want += (b.values()[k] - b.values()[j]) * kernel * f.values()[j];
        }
        let got = out.values()[k];
        assert!(
            (got - want).abs() <= 1e-12 * want.abs().max(1.0),
            "{got} vs direct sum {want}"
        );
    }

    #[test]
    fn truncation_radius_defaults_cover_grid_scales() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let eps = default_epsilon_set(&grid);
        assert_eq!(eps.len(), 7);
        assert!((eps[0] - 2.0).abs() <= 1e-15, "largest radius {}", eps[0]);
        assert!((eps[6] - grid.h()).abs() <= 1e-15);
        assert!(eps.windows(2).all(|p| p[1] < p[0]));
    }

    #[test]
    fn truncated_commutator_constant_symbol_vanishes() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let b = GriddedFunction::constant(grid, 3.0).unwrap();
        let f = seeded_function(grid, 41, 0.0, 2.0);
        let out = truncated_commutator_sup(&b, &f, 0.5, &default_epsilon_set(&grid)).unwrap();
        for &v in out.values() {
            assert!(v.abs() <= 1e-12, "residual {v}");
        }
    }

    #[test]
    fn truncated_commutator_dominates_each_radius() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let b = GriddedFunction::from_fn(grid, |x| x[0].signum()).unwrap();
        let f = seeded_function(grid, 43, 0.0, 2.0);
        let eps = default_epsilon_set(&grid);
        let full = truncated_commutator_sup(&b, &f, 0.5, &eps).unwrap();
        for &e in &eps {
            let single = truncated_commutator_sup(&b, &f, 0.5, &[e]).unwrap();
            for k in 0..grid.len() {
                assert!(
                    full.values()[k] >= single.values()[k],
                    "cell {k} at radius {e}"
                );
            }
        }
    }

    #[test]
    fn truncated_commutator_matches_brute_force() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let b = GriddedFunction::from_fn(grid, |x| x[0].signum()).unwrap();
        let f = GriddedFunction::from_fn(grid, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let alpha = 0.5;
        let eps = default_epsilon_set(&grid);
        let out = truncated_commutator_sup(&b, &f, alpha, &eps).unwrap();
        let n = grid.len();
        let h = grid.h();
        let vol = grid.cell_volume();
        for k in 0..n {
            let xk = grid.center_coord(k);
            let mut best = 0.0f64;
            for &e in &eps {
                let mut tail = 0.0;
                for j in 0..n {
                    let yj = grid.center_coord(j);
                    let dist = (xk - yj).abs();
                    if j != k && dist > e {
                        tail += f.values()[j] * dist.powf(alpha - 1.0) * vol;
                    }
                }
                let layers = ((e / h) * (1.0 + 1e-12)).floor() as i64;
                let lo = (k as i64 - layers).max(0) as usize;
                let hi = ((k as i64 + layers) as usize + 1).min(n);
                let mean_b: f64 =
                    b.values()[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
                best = best.max(((b.values()[k] - mean_b) * tail).abs());
            }
            let got = out.values()[k];
            assert!(
                (got - best).abs() <= 1e-12 * best.abs().max(1.0),
                "cell {k}: {got} vs brute force {best}"
            );
        }
    }

    #[test]
    fn truncated_commutator_is_sublinear() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let b = GriddedFunction::from_fn(grid, |x| x[0]).unwrap();
        let f = seeded_function(grid, 51, -1.0, 2.0);
        let g = seeded_function(grid, 52, -1.0, 2.0);
        let sum = f.zip_with(&g, |a, c| a + c).unwrap();
        let eps = default_epsilon_set(&grid);
        let cf = truncated_commutator_sup(&b, &f, 0.5, &eps).unwrap();
        let cg = truncated_commutator_sup(&b, &g, 0.5, &eps).unwrap();
        let cs = truncated_commutator_sup(&b, &sum, 0.5, &eps).unwrap();
        for k in 0..grid.len() {
            let bound = cf.values()[k] + cg.values()[k];
            assert!(
                cs.values()[k] <= bound + 1e-12 * bound.max(1.0),
                "cell {k}: {} > {bound}",
                cs.values()[k]
            );
        }
    }

    #[test]
    fn truncated_commutator_validates_radii() {
        let grid = make_grid(1, 1.0, 32).unwrap();
        let b = GriddedFunction::constant(grid, 1.0).unwrap();
        let f = GriddedFunction::constant(grid, 1.0).unwrap();
        let h = grid.h();
        assert!(truncated_commutator_sup(&b, &f, 0.5, &[]).is_err());
        assert!(truncated_commutator_sup(&b, &f, 0.5, &[h, 2.0 * h]).is_err());
        assert!(truncated_commutator_sup(&b, &f, 0.5, &[h / 4.0]).is_err());
    }

    #[test]
    fn modified_maximal_with_unit_weight_is_plain_maximal() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let fam = full_family(grid);
        let f = seeded_function(grid, 61, 0.0, 2.0);
        let u = Weight::constant(&grid, 1.0).unwrap();
        for gamma in [0.4, 0.7, 1.0] {
            let modified = modified_maximal(&f, &u, gamma, &fam).unwrap();
            let plain = fractional_maximal(&f, 0.0, 1.0, &fam).unwrap();
            for k in 0..grid.len() {
                let a = modified.values()[k];
                let b = plain.values()[k];
                assert!(
                    (a - b).abs() <= 1e-12 * b.abs().max(1.0),
                    "γ={gamma}, cell {k}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn modified_maximal_matches_bilinear_factorization() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let fam = full_family(grid);
        let u = Weight::from_fn(&grid, |x| 1.0 / (1.0 + x[0].abs())).unwrap();
        let f = GriddedFunction::from_fn(grid, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let modified = modified_maximal(&f, &u, 1.0, &fam).unwrap();
        let u_inv = u.reciprocal().unwrap();
        let bilinear =
            multilinear_fractional_maximal(&[&f, u_inv.function()], 0.0, &fam).unwrap();
        for k in 0..grid.len() {
            let want = u.values()[k] * bilinear.values()[k];
            let got = modified.values()[k];
            assert!(
                (got - want).abs() <= 1e-12 * want.abs().max(1.0),
                "cell {k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn modified_maximal_rejects_out_of_range_exponents() {
        let grid = make_grid(1, 1.0, 16).unwrap();
        let fam = full_family(grid);
        let f = GriddedFunction::constant(grid, 1.0).unwrap();
        let u = Weight::constant(&grid, 1.0).unwrap();
        assert!(modified_maximal(&f, &u, 1.5, &fam).is_err());
        assert!(modified_maximal(&f, &u, 0.0, &fam).is_err());
    }

    #[test]
    fn probe_family_is_deterministic() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let a = probe_family(&grid, PROBE_SEED).unwrap();
        let b = probe_family(&grid, PROBE_SEED).unwrap();
        assert_eq!(a.len(), 8);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.values(), y.values());
        }
        for (i, g) in a.iter().enumerate() {
            assert!(g.values().iter().all(|&v| v >= 0.0), "probe {i} is signed");
            assert!(
                g.values().iter().any(|&v| v > 0.0),
                "probe {i} is identically zero"
            );
        }
    }

    #[test]
    fn iteration_series_dominates_input_and_stays_bounded() {
        let grid = make_grid(1, 1.0, 256).unwrap();
        let fam = full_family(grid);
        let f = GriddedFunction::from_fn(grid, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let one = Weight::constant(&grid, 1.0).unwrap();
        let out = rdf_iterate(&f, &one, 1.0, 2.0, &one, 30, &fam).unwrap();
        assert_eq!(out.terms, 30);
        for k in 0..grid.len() {
            assert!(out.series.values()[k] >= f.values()[k], "cell {k}");
        }
        let wt = one.pow(2.0).unwrap();
        let norm_f = lebesgue_norm(&f, 2.0, Some(&wt)).unwrap();
        let norm_series = lebesgue_norm(&out.series, 2.0, Some(&wt)).unwrap();
        assert!((out.tail_bound - 2f64.powi(-30) * norm_f).abs() <= 1e-15 * norm_f);
        assert!(
            norm_series <= 2.0 * norm_f + out.tail_bound * (1.0 + 1e-9),
            "series norm {norm_series} exceeds 2·{norm_f} + tail"
        );
    }

    #[test]
    fn iteration_output_is_a_controlled_majorizing_weight() {
        use crate::exponents::ExtReal;
        use crate::weights::{partial_constant, WeightVector};

        let grid = make_grid(1, 1.0, 256).unwrap();
        let fam = full_family(grid);
        let f = GriddedFunction::from_fn(grid, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let one = Weight::constant(&grid, 1.0).unwrap();
        let out = rdf_iterate(&f, &one, 1.0, 2.0, &one, 30, &fam).unwrap();
        let majorant = Weight::new(out.series.clone()).unwrap();
        let wv = WeightVector::with_partial(vec![majorant], one.clone()).unwrap();
        let est = partial_constant(&wv, &[ExtReal::from_int(1)], &ExtReal::from_int(1), None, &fam)
            .unwrap();
        let bound = 2.0 * out.norm_estimate * 1.05;
        assert!(
            est.value <= bound,
            "first-order constant {} exceeds 2×estimated norm with 5% headroom {bound}",
            est.value
        );
    }

    #[test]
    fn domination_gap_vanishes_for_zero_input() {
        let grid = make_grid(1, 1.0, 64).unwrap();
        let fam = full_family(grid);
        let u = Weight::constant(&grid, 1.0).unwrap();
        let f = GriddedFunction::constant(grid, 0.0).unwrap();
        let gap = domination_gap(&f, &u, 0.6, 0.1, &fam).unwrap();
        assert!(gap.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn domination_gap_is_nonnegative_at_tolerance() {
        let grid = make_grid(1, 1.0, 256).unwrap();
        let fam = full_family(grid);
        let f = GriddedFunction::from_fn(grid, |x| {
            if (0.0..=1.0).contains(&x[0]) {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let flat = Weight::constant(&grid, 1.0).unwrap();
        let decaying = Weight::from_fn(&grid, |x| 1.0 / (1.0 + x[0].abs())).unwrap();
        for u in [&flat, &decaying] {
            let (alpha, beta) = (0.6, 0.1);
            let gap = domination_gap(&f, u, alpha, beta, &fam).unwrap();
            // Reconstruct the dominating side to scale the tolerance.
            let u_norm =
                lorentz_norm(u.function(), 1.0 / (alpha - beta), 1.0).unwrap();
            let u_inv = u.reciprocal().unwrap();
            let rhs =
                multilinear_fractional_maximal(&[&f, u_inv.function()], beta, &fam).unwrap();
            for k in 0..grid.len() {
                let scale = u_norm * rhs.values()[k];
                assert!(
                    gap.values()[k] >= -1e-9 * scale.max(1.0),
                    "cell {k}: gap {} against scale {scale}",
                    gap.values()[k]
                );
            }
        }
    }

    #[test]
    fn domination_gap_validates_orders() {
        let grid = make_grid(1, 1.0, 32).unwrap();
        let fam = full_family(grid);
        let u = Weight::constant(&grid, 1.0).unwrap();
        let f = GriddedFunction::constant(grid, 1.0).unwrap();
        assert!(domination_gap(&f, &u, 0.1, 0.6, &fam).is_err());
        assert!(domination_gap(&f, &u, 1.0, 0.1, &fam).is_err());
    }

    #[test]
    fn integral_to_maximal_ratio_is_stable_under_refinement() {
        use crate::weights::power_weight;

        let alpha = 0.5;
        let mut ratios = vec![Vec::new(), Vec::new()];
        for n in [256usize, 512] {
            let grid = make_grid(1, 1.0, n).unwrap();
            let fam = full_family(grid);
            let w = power_weight(&grid, 0.3, &[0.0], None).unwrap();
            let probes = probe_family(&grid, PROBE_SEED).unwrap();
            for (qi, q) in [1.0, 2.0].into_iter().enumerate() {
                let mut worst = 0.0f64;
                for g in [&probes[0], &probes[4]] {
                    let ig = fractional_integral(g, alpha).unwrap();
                    let mg = fractional_maximal(g, alpha, 1.0, &fam).unwrap();
                    let top = lebesgue_norm(&ig, q, Some(&w)).unwrap().powf(q);
                    let bot = lebesgue_norm(&mg, q, Some(&w)).unwrap().powf(q);
                    worst = worst.max(top / bot);
                }
                ratios[qi].push(worst);
            }
        }
        for (qi, q) in [1.0, 2.0].into_iter().enumerate() {
            let drift = (ratios[qi][1] - ratios[qi][0]).abs() / ratios[qi][0];
            assert!(
                drift < 0.10,
                "q={q}: ratio drifted {drift:.3} across refinement ({:?})",
                ratios[qi]
            );
        }
    }
}
