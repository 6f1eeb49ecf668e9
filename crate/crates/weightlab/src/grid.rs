//! Discretization substrate: boxes, cell-centered sampled functions,
//! shifted dyadic cube families, averages and integrals.
//!
//! The domain is the box `[−L, L]^d` split into `N` cells per axis. All
//! sampling is cell-centered: centers sit at `−L + (k + 1/2)h` with
//! `h = 2L/N`, so a singularity placed at the origin or at any dyadic
//! lattice point never coincides with a sample.
//!
//! Suprema "over all cubes" are approximated by shifted dyadic families:
//! at level `ℓ` the nominal side is `2L·2^{−ℓ}`, and each axis may be
//! offset by a fraction of the side drawn from a fixed shift set
//! (default `{0, 1/3, 2/3}`). Shifted cubes are clipped to the domain and
//! keep their clipped cell set and clipped volume. Membership of a cell in
//! a cube is decided in exact integer arithmetic, never by comparing
//! floating-point coordinates.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result};

/// Maximum supported dimension.
pub const MAX_DIM: usize = 3;

// ─── Grid ───────────────────────────────────────────────────────────────────

/// A cell-centered grid on the box `[−L, L]^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    d: usize,
    l: f64,
    n: usize,
}

impl Grid {
    /// Dimension (1, 2, or 3).
    pub fn d(&self) -> usize {
        self.d
    }

    /// Half-width of the domain box.
    pub fn l(&self) -> f64 {
        self.l
    }

    /// Cells per axis (a power of two).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell side `h = 2L/N`.
    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    /// Volume of one cell, `h^d`.
    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.d as i32)
    }

    /// Total cell count `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest admissible cube level, `log2(N)`.
    pub fn max_level(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// Coordinate of the center of cell `k` along any axis.
    pub fn center_coord(&self, k: usize) -> f64 {
        -self.l + (k as f64 + 0.5) * self.h()
    }

    /// Linear index of the cell with per-axis indices `coords`
    /// (row-major, first axis fastest): `k_0 + N·k_1 + N²·k_2`.
    pub fn index(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.d);
        let mut idx = 0;
        for axis in (0..self.d).rev() {
            idx = idx * self.n + coords[axis];
        }
        idx
    }

    /// Per-axis cell indices of the cell with the given linear index.
    pub fn coords(&self, index: usize) -> [usize; MAX_DIM] {
        let mut rem = index;
        let mut out = [0usize; MAX_DIM];
        for axis in 0..self.d {
            out[axis] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    /// Center position of the cell with the given linear index
    /// (only the first `d` entries are meaningful).
    pub fn position(&self, index: usize) -> [f64; MAX_DIM] {
        let c = self.coords(index);
        let mut out = [0.0; MAX_DIM];
        for axis in 0..self.d {
            out[axis] = self.center_coord(c[axis]);
        }
        out
    }
}

/// Build a grid on `[−L, L]^d` with `N` cells per axis.
pub fn make_grid(d: usize, l: f64, n: usize) -> Result<Grid> {
    if !(1..=MAX_DIM).contains(&d) {
        return Err(Error::Grid(format!("dimension must be 1, 2, or 3, got {d}")));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Grid(format!("half-width must be positive and finite, got {l}")));
    }
    if n < 4 || !n.is_power_of_two() {
        return Err(Error::Grid(format!("cell count must be a power of two ≥ 4, got {n}")));
    }
    Ok(Grid { d, l, n })
}

// ─── GriddedFunction ────────────────────────────────────────────────────────

/// A real-valued function sampled at cell centers, stored row-major with
/// the first axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GriddedFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GriddedFunction {
    /// Wrap an explicit value vector; every value must be finite.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Grid(format!(
                "value count {} does not match cell count {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!(
                "non-finite value {} at cell {}",
                values[bad], bad
            )));
        }
        Ok(GriddedFunction { grid, values })
    }

    /// Sample a function of position at every cell center.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let d = grid.d();
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let pos = grid.position(i);
                f(&pos[..d])
            })
            .collect();
        Self::new(grid, values)
    }

    /// The constant function `c`.
    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cell-wise map; errors if the image leaves the finite reals.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Cell-wise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::Grid("grid mismatch in cell-wise combination".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values)
    }

    /// Cell-wise absolute value.
    pub fn abs(&self) -> Self {
        // |v| of a finite value is finite; unwrap is safe.
        self.map(f64::abs).expect("absolute value preserves finiteness")
    }

    /// Cell-wise power `v ↦ v^e`; errors if any cell leaves the finite
    /// reals (e.g. a negative base with fractional exponent, or 0^e, e<0).
    pub fn powf(&self, e: f64) -> Result<Self> {
        self.map(|v| v.powf(e))
    }

    /// Midpoint-rule integral over the whole domain, summed in index order.
    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Minimum and maximum cell value over the whole domain.
    pub fn range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

// ─── Cubes ──────────────────────────────────────────────────────────────────

/// One cube of a shifted dyadic family.
///
/// The cube lives at `level` ℓ (nominal side `2L·2^{−ℓ}`), is offset by the
/// shift vector with index `shift` into its family's shift-vector list, and
/// has integer `anchor` coordinates: the lower corner sits at
/// `−L + (anchor + shift_fraction)·side` per axis. An anchor entry may be
/// −1 for a shifted cube protruding past the lower domain face; the
/// realized cell ranges are clipped to the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cube {
    level: u32,
    shift: usize,
    anchor: [i64; MAX_DIM],
    /// Per-axis half-open realized cell ranges `[lo, hi)`, clipped.
    cell_lo: [usize; MAX_DIM],
    cell_hi: [usize; MAX_DIM],
    d: usize,
}

impl Cube {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn anchor(&self) -> &[i64] {
        &self.anchor[..self.d]
    }

    /// Half-open realized cell range along `axis`.
    pub fn cell_range(&self, axis: usize) -> std::ops::Range<usize> {
        self.cell_lo[axis]..self.cell_hi[axis]
    }

    /// Number of grid cells realizing the cube.
    pub fn cell_count(&self) -> usize {
        (0..self.d).map(|a| self.cell_hi[a] - self.cell_lo[a]).product()
    }

    /// Measure of the realized (clipped) cube: cell count × cell volume.
    /// For an unclipped cube this equals `side^d` exactly.
    pub fn volume(&self, grid: &Grid) -> f64 {
        self.cell_count() as f64 * grid.cell_volume()
    }

    /// Nominal side length `2L·2^{−ℓ}`.
    pub fn side(&self, grid: &Grid) -> f64 {
        2.0 * grid.l() / (1u64 << self.level) as f64
    }

    /// Visit the linear index of every cell in the cube, in index order.
    pub fn for_each_cell(&self, grid: &Grid, mut visit: impl FnMut(usize)) {
        let n = grid.n();
        match self.d {
            1 => {
                for k0 in self.cell_range(0) {
                    visit(k0);
                }
            }
            2 => {
                for k1 in self.cell_range(1) {
                    let base = k1 * n;
                    for k0 in self.cell_range(0) {
                        visit(base + k0);
                    }
                }
            }
            3 => {
                for k2 in self.cell_range(2) {
                    for k1 in self.cell_range(1) {
                        let base = (k2 * n + k1) * n;
                        for k0 in self.cell_range(0) {
                            visit(base + k0);
                        }
                    }
                }
            }
            _ => unreachable!("dimension checked at grid construction"),
        }
    }
}

/// A shift fraction `p/q` of the side length, held exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftFraction {
    pub num: u32,
    pub den: u32,
}

impl ShiftFraction {
    pub const ZERO: ShiftFraction = ShiftFraction { num: 0, den: 1 };

    pub fn new(num: u32, den: u32) -> Result<Self> {
        if den == 0 || num >= den {
            return Err(Error::Grid(format!(
                "shift fraction must satisfy 0 ≤ p/q < 1, got {num}/{den}"
            )));
        }
        Ok(ShiftFraction { num, den })
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }
}

impl std::fmt::Display for ShiftFraction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// The default per-axis shift set `{0, 1/3, 2/3}` (the one-third trick).
pub fn default_shifts() -> Vec<ShiftFraction> {
    vec![
        ShiftFraction::ZERO,
        ShiftFraction { num: 1, den: 3 },
        ShiftFraction { num: 2, den: 3 },
    ]
}

/// Ceiling of `a / b` for positive `b`.
fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Realized half-open cell range along one axis for side length `m` cells,
/// shift `p/q`, anchor `j`: the cells `k` whose centers satisfy
/// `k + 1/2 ∈ [(j + p/q)·m, (j + 1 + p/q)·m)`, clipped to `[0, n)`.
/// Decided in exact integer arithmetic.
fn axis_cell_range(n: usize, m: i64, shift: ShiftFraction, j: i64) -> (usize, usize) {
    let q = i64::from(shift.den);
    let p = i64::from(shift.num);
    // k ≥ (2(jq+p)m − q) / (2q)  ⇔  k + 1/2 ≥ (j + p/q)m.
    let lo = ceil_div(2 * (j * q + p) * m - q, 2 * q);
    let hi = ceil_div(2 * ((j + 1) * q + p) * m - q, 2 * q);
    let lo = lo.clamp(0, n as i64) as usize;
    let hi = hi.clamp(0, n as i64) as usize;
    (lo, hi.max(lo))
}

/// A deterministic list of shifted dyadic cubes over a level range.
#[derive(Debug, Clone)]
pub struct CubeFamily {
    grid: Grid,
    level_min: u32,
    level_max: u32,
    shifts: Vec<ShiftFraction>,
    /// Shift vectors: elements of the per-axis shift set, one per axis,
    /// in odometer order (first axis fastest).
    shift_vectors: Vec<[ShiftFraction; MAX_DIM]>,
    cubes: Vec<Cube>,
}

impl CubeFamily {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn level_min(&self) -> u32 {
        self.level_min
    }

    pub fn level_max(&self) -> u32 {
        self.level_max
    }

    /// The per-axis shift set the family was built from.
    pub fn shifts(&self) -> &[ShiftFraction] {
        &self.shifts
    }

    /// All per-axis shift combinations, indexed by `Cube::shift`.
    pub fn shift_vectors(&self) -> &[[ShiftFraction; MAX_DIM]] {
        &self.shift_vectors
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }
}

/// Enumerate the shifted dyadic cubes of a grid for levels
/// `level_min..=level_max` and the given per-axis shift set.
///
/// Enumeration order is deterministic: level ascending, then shift-vector
/// index ascending, then anchor lexicographic (last axis most significant).
/// Cubes whose realized cell set is empty are dropped; cubes protruding
/// past the domain boundary are clipped.
pub fn enumerate_cubes(
    grid: Grid,
    level_min: u32,
    level_max: u32,
    shifts: &[ShiftFraction],
) -> Result<CubeFamily> {
    if level_min > level_max || level_max > grid.max_level() {
        return Err(Error::Grid(format!(
            "level range {level_min}..={level_max} must lie within 0..={}",
            grid.max_level()
        )));
    }
    if shifts.is_empty() {
        return Err(Error::Grid("shift set must be nonempty".into()));
    }
    let d = grid.d();
    let n = grid.n();

    // Shift vectors in odometer order, first axis fastest.
    let mut shift_vectors = Vec::with_capacity(shifts.len().pow(d as u32));
    let mut counter = [0usize; MAX_DIM];
    loop {
        let mut sv = [ShiftFraction::ZERO; MAX_DIM];
        for axis in 0..d {
            sv[axis] = shifts[counter[axis]];
        }
        shift_vectors.push(sv);
        let mut axis = 0;
        loop {
            if axis == d {
                break;
            }
            counter[axis] += 1;
            if counter[axis] < shifts.len() {
                break;
            }
            counter[axis] = 0;
            axis += 1;
        }
        if axis == d {
            break;
        }
    }

    let mut cubes = Vec::new();
    for level in level_min..=level_max {
        let blocks = 1i64 << level;
        let m = (n >> level) as i64; // cells per cube side
        for (shift_idx, sv) in shift_vectors.iter().enumerate() {
            // Anchor range per axis: aligned shifts tile [0, 2^ℓ); nonzero
            // shifts additionally admit j = −1 (clipped at the lower face).
            let j_start: Vec<i64> =
                (0..d).map(|a| if sv[a].is_zero() { 0 } else { -1 }).collect();
            let mut anchor = [0i64; MAX_DIM];
            anchor[..d].copy_from_slice(&j_start);
            'anchors: loop {
                let mut cell_lo = [0usize; MAX_DIM];
                let mut cell_hi = [1usize; MAX_DIM];
                let mut nonempty = true;
                for axis in 0..d {
                    let (lo, hi) = axis_cell_range(n, m, sv[axis], anchor[axis]);
                    cell_lo[axis] = lo;
                    cell_hi[axis] = hi;
                    if lo >= hi {
                        nonempty = false;
                    }
                }
                if nonempty {
                    cubes.push(Cube {
                        level,
                        shift: shift_idx,
                        anchor,
                        cell_lo,
                        cell_hi,
                        d,
                    });
                }
                // Lexicographic advance, first axis fastest.
                let mut axis = 0;
                loop {
                    if axis == d {
                        break 'anchors;
                    }
                    anchor[axis] += 1;
                    if anchor[axis] < blocks {
                        break;
                    }
                    anchor[axis] = j_start[axis];
                    axis += 1;
                }
            }
        }
    }

    Ok(CubeFamily {
        grid,
        level_min,
        level_max,
        shifts: shifts.to_vec(),
        shift_vectors,
        cubes,
    })
}

/// Midpoint-rule average of `f` over the cells realizing `Q`, summed in
/// index order.
pub fn cube_average(f: &GriddedFunction, q: &Cube) -> Result<f64> {
    let count = q.cell_count();
    if count == 0 {
        return Err(Error::Grid("cube has an empty cell set".into()));
    }
    let mut sum = 0.0;
    q.for_each_cell(&f.grid(), |i| sum += f.values()[i]);
    Ok(sum / count as f64)
}

/// Integration region: the whole domain or a single cube.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    Domain,
    Cube(&'a Cube),
}

/// Midpoint-rule integral of `f` over a region, summed in index order.
pub fn integrate(f: &GriddedFunction, region: Region<'_>) -> Result<f64> {
    match region {
        Region::Domain => Ok(f.integrate()),
        Region::Cube(q) => {
            if q.cell_count() == 0 {
                return Err(Error::Grid("cube has an empty cell set".into()));
            }
            let mut sum = 0.0;
            q.for_each_cell(&f.grid(), |i| sum += f.values()[i]);
            Ok(sum * f.grid().cell_volume())
        }
    }
}

/// Minimum and maximum cell value of `f` over the cells realizing `Q`
/// (the grid surrogate for essential bounds).
pub fn ess_range(f: &GriddedFunction, q: &Cube) -> Result<(f64, f64)> {
    if q.cell_count() == 0 {
        return Err(Error::Grid("cube has an empty cell set".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    q.for_each_cell(&f.grid(), |i| {
        let v = f.values()[i];
        lo = lo.min(v);
        hi = hi.max(v);
    });
    Ok((lo, hi))
}

// ─── Prefix sums ────────────────────────────────────────────────────────────

/// Cumulative sums of a gridded function, giving O(1) box sums by
/// inclusion–exclusion. Entry `(i_1..i_d)` holds the sum over the cell
/// block `[0, i_1) × ⋯ × [0, i_d)`.
#[derive(Debug, Clone)]
pub struct PrefixSums {
    grid: Grid,
    stride: usize, // n + 1
    table: Vec<f64>,
}

impl PrefixSums {
    pub fn new(f: &GriddedFunction) -> Self {
        let grid = f.grid();
        let d = grid.d();
        let n = grid.n();
        let stride = n + 1;
        let table_len = stride.pow(d as u32);
        let mut table = vec![0.0; table_len];

        // Seed the table with the cell values at offset (1,..,1), then
        // sweep a running sum along each axis in turn.
        let planes = if d >= 3 { n } else { 1 };
        let rows = if d >= 2 { n } else { 1 };
        for k2 in 0..planes {
            for k1 in 0..rows {
                for k0 in 0..n {
                    let src = match d {
                        1 => k0,
                        2 => k1 * n + k0,
                        _ => (k2 * n + k1) * n + k0,
                    };
                    let dst = match d {
                        1 => k0 + 1,
                        2 => (k1 + 1) * stride + (k0 + 1),
                        _ => ((k2 + 1) * stride + (k1 + 1)) * stride + (k0 + 1),
                    };
                    table[dst] = f.values()[src];
                }
            }
        }
        for axis in 0..d {
            let step = stride.pow(axis as u32);
            for idx in 0..table_len {
                let coord = (idx / step) % stride;
                if coord > 0 {
                    table[idx] = table[idx] + table[idx - step];
                }
            }
        }

        PrefixSums { grid, stride, table }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn entry(&self, c: &[usize; MAX_DIM]) -> f64 {
        let mut idx = 0;
        for axis in (0..self.grid.d()).rev() {
            idx = idx * self.stride + c[axis];
        }
        self.table[idx]
    }

    /// Sum of cell values over the box `Π [lo_a, hi_a)`.
    pub fn box_sum(&self, lo: &[usize], hi: &[usize]) -> f64 {
        let d = self.grid.d();
        let mut sum = 0.0;
        for corner in 0..(1usize << d) {
            let mut c = [0usize; MAX_DIM];
            let mut sign = 1.0;
            for axis in 0..d {
                if corner & (1 << axis) != 0 {
                    c[axis] = hi[axis];
                } else {
                    c[axis] = lo[axis];
                    sign = -sign;
                }
            }
            sum += sign * self.entry(&c);
        }
        sum
    }

    /// Sum of cell values over the cells realizing `Q`.
    pub fn cube_sum(&self, q: &Cube) -> f64 {
        let d = self.grid.d();
        let mut lo = [0usize; MAX_DIM];
        let mut hi = [0usize; MAX_DIM];
        for axis in 0..d {
            let r = q.cell_range(axis);
            lo[axis] = r.start;
            hi[axis] = r.end;
        }
        self.box_sum(&lo[..d], &hi[..d])
    }

    /// Average of cell values over the cells realizing `Q`.
    pub fn cube_average(&self, q: &Cube) -> f64 {
        self.cube_sum(q) / q.cell_count() as f64
    }
}

// ─── CSV round trip ─────────────────────────────────────────────────────────

/// Serialize to the gridded-function file format: first line `d,L,N`, then
/// one value per line (17 significant digits), row-major, first axis
/// fastest. `L` and all values are written so the round trip is bit-exact.
pub fn to_csv_string(f: &GriddedFunction) -> String {
    let g = f.grid();
    let mut out = String::with_capacity(f.values().len() * 26 + 32);
    let _ = writeln!(out, "{},{:.16e},{}", g.d(), g.l(), g.n());
    for v in f.values() {
        let _ = writeln!(out, "{v:.16e}");
    }
    out
}

/// Parse the gridded-function file format produced by [`to_csv_string`].
pub fn from_csv_string(text: &str) -> Result<GriddedFunction> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty gridded-function file".into()))?;
    let fields: Vec<&str> = header.split(',').collect();
    if fields.len() != 3 {
        return Err(Error::Parse(format!(
            "header must be `d,L,N`, got {header:?}"
        )));
    }
    let d: usize = fields[0]
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad dimension {:?}: {e}", fields[0])))?;
    let l: f64 = fields[1]
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad half-width {:?}: {e}", fields[1])))?;
    let n: usize = fields[2]
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("bad cell count {:?}: {e}", fields[2])))?;
    let grid = make_grid(d, l, n)?;
    let mut values = Vec::with_capacity(grid.len());
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|e| Error::Parse(format!("bad value on line {}: {e}", lineno + 2)))?;
        values.push(v);
    }
    GriddedFunction::new(grid, values)
}

/// Write a gridded function to a file in the CSV format.
pub fn write_csv(f: &GriddedFunction, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_csv_string(f))?;
    Ok(())
}

/// Read a gridded function from a file in the CSV format.
pub fn read_csv(path: impl AsRef<Path>) -> Result<GriddedFunction> {
    let text = std::fs::read_to_string(path)?;
    from_csv_string(&text)
}

// ─── tests ──────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_1d_8() -> Grid {
        make_grid(1, 1.0, 8).unwrap()
    }

    #[test]
    fn make_grid_validates_and_centers() {
        let g = grid_1d_8();
        assert_eq!(g.h(), 0.25);
        assert_eq!(g.center_coord(0), -0.875);
        assert_eq!(g.center_coord(7), 0.875);
        // No center coincides with 0.
        for k in 0..8 {
            assert_ne!(g.center_coord(k), 0.0);
        }
        assert!(make_grid(4, 1.0, 8).is_err());
        assert!(make_grid(1, 1.0, 7).is_err());
        assert!(make_grid(1, 0.0, 8).is_err());
        assert!(make_grid(1, 1.0, 2).is_err());
    }

    #[test]
    fn volume_sum_matches_box_volume() {
        let g = make_grid(2, 2.0, 4).unwrap();
        assert_eq!(g.len(), 16);
        let one = GriddedFunction::constant(g, 1.0).unwrap();
        let total = one.integrate();
        assert!((total - 16.0).abs() <= 1e-12 * 16.0);
    }

    #[test]
    fn indexing_is_row_major_first_axis_fastest() {
        let g = make_grid(3, 1.0, 4).unwrap();
        assert_eq!(g.index(&[1, 2, 3]), 1 + 4 * 2 + 16 * 3);
        let c = g.coords(1 + 4 * 2 + 16 * 3);
        assert_eq!(&c[..3], &[1, 2, 3]);
    }

    #[test]
    fn whole_domain_is_one_cube_at_level_zero() {
        let fam = enumerate_cubes(grid_1d_8(), 0, 0, &[ShiftFraction::ZERO]).unwrap();
        assert_eq!(fam.len(), 1);
        let q = &fam.cubes()[0];
        assert_eq!(q.cell_range(0), 0..8);
        assert_eq!(q.volume(&grid_1d_8()), 2.0);
    }

    #[test]
    fn aligned_dyadic_count_is_geometric() {
        let fam = enumerate_cubes(grid_1d_8(), 0, 3, &[ShiftFraction::ZERO]).unwrap();
        assert_eq!(fam.len(), 1 + 2 + 4 + 8);
    }

    #[test]
    fn shifted_level_one_family_matches_brute_enumeration() {
        // d=1, N=8, level 1, shifts {0, 1/3}: the aligned pair plus a
        // clipped triple. Brute check: a cell k belongs to the shifted cube
        // with anchor j iff k + 1/2 ∈ [(j + 1/3)·4, (j + 4/3)·4).
        let shifts = [ShiftFraction::ZERO, ShiftFraction::new(1, 3).unwrap()];
        let fam = enumerate_cubes(grid_1d_8(), 1, 1, &shifts).unwrap();
        assert_eq!(fam.len(), 5);
        let ranges: Vec<_> = fam.cubes().iter().map(|q| q.cell_range(0)).collect();
        assert_eq!(ranges, vec![0..4, 4..8, 0..1, 1..5, 5..8]);

        // Brute enumeration of the shifted sub-family.
        for (j, expect) in [(-1i64, 0..1), (0, 1..5), (1, 5..8)] {
            let members: Vec<usize> = (0..8)
                .filter(|&k| {
                    let c = k as f64 + 0.5;
                    let lo = (j as f64 + 1.0 / 3.0) * 4.0;
                    c >= lo && c < lo + 4.0
                })
                .collect();
            let got: Vec<usize> = expect.clone().collect();
            assert_eq!(members, got, "anchor {j}");
        }
    }

    #[test]
    fn empty_shifted_cubes_are_dropped() {
        // At the finest level (m = 1) the shifted j = −1 cube holds no cell
        // center for shift 1/3 but one for shift 2/3.
        let g = grid_1d_8();
        let third = [ShiftFraction::new(1, 3).unwrap()];
        let fam = enumerate_cubes(g, 3, 3, &third).unwrap();
        assert_eq!(fam.len(), 8);
        assert!(fam.cubes().iter().all(|q| q.anchor()[0] >= 0));

        // For shift 2/3 it is the last anchor that dies instead: j = −1
        // holds cell 0 and j = 7 holds nothing, so the count is again 8.
        let two_thirds = [ShiftFraction::new(2, 3).unwrap()];
        let fam = enumerate_cubes(g, 3, 3, &two_thirds).unwrap();
        assert_eq!(fam.len(), 8);
        assert_eq!(fam.cubes()[0].anchor()[0], -1);
        assert_eq!(fam.cubes().last().unwrap().anchor()[0], 6);
    }

    #[test]
    fn every_cell_is_covered_at_every_level() {
        for d in 1..=2usize {
            let g = make_grid(d, 1.0, 8).unwrap();
            let fam = enumerate_cubes(g, 0, 3, &default_shifts()).unwrap();
            for level in 0..=3u32 {
                let mut covered = vec![false; g.len()];
                for q in fam.cubes().iter().filter(|q| q.level() == level) {
                    q.for_each_cell(&g, |i| covered[i] = true);
                }
                assert!(covered.iter().all(|&c| c), "level {level} d {d}");
            }
        }
    }

    #[test]
    fn cube_average_of_constants_and_odd_functions() {
        let g = make_grid(1, 1.0, 64).unwrap();
        let c = GriddedFunction::constant(g, 3.25).unwrap();
        let fam = enumerate_cubes(g, 0, 2, &default_shifts()).unwrap();
        for q in fam.cubes() {
            assert_eq!(cube_average(&c, q).unwrap(), 3.25);
        }
        // Odd function on a symmetric cube averages to zero.
        let f = GriddedFunction::from_fn(g, |x| x[0]).unwrap();
        let whole = enumerate_cubes(g, 0, 0, &[ShiftFraction::ZERO]).unwrap();
        let avg = cube_average(&f, &whole.cubes()[0]).unwrap();
        assert!(avg.abs() <= 1e-15);
    }

    #[test]
    fn indicator_average_is_exact() {
        // f = χ_{[0,1]} on [−1,1], N = 64: centers in (0,1) are exactly half.
        let g = make_grid(1, 1.0, 64).unwrap();
        let f = GriddedFunction::from_fn(g, |x| f64::from(x[0] > 0.0)).unwrap();
        let whole = enumerate_cubes(g, 0, 0, &[ShiftFraction::ZERO]).unwrap();
        assert_eq!(cube_average(&f, &whole.cubes()[0]).unwrap(), 0.5);
        assert_eq!(ess_range(&f, &whole.cubes()[0]).unwrap(), (0.0, 1.0));
    }

    #[test]
    fn integrate_converges_quadratically_on_kinked_data() {
        // ∫_{−1}^{1} |x| dx = 1; midpoint rule on the kink is O(h²).
        let mut errors = Vec::new();
        for n in [16usize, 32, 64, 128] {
            let g = make_grid(1, 1.0, n).unwrap();
            let f = GriddedFunction::from_fn(g, |x| x[0].abs()).unwrap();
            errors.push((f.integrate() - 1.0).abs());
        }
        for w in errors.windows(2) {
            // Halving h should cut the error by about 4; allow slack.
            assert!(w[1] <= w[0] / 3.0 + 1e-15, "errors {errors:?}");
        }
    }

    #[test]
    fn parent_average_is_volume_weighted_child_mean() {
        let g = make_grid(2, 1.5, 16).unwrap();
        let f = GriddedFunction::from_fn(g, |x| (x[0] + 0.3).exp() + x[1] * x[1]).unwrap();
        let fam = enumerate_cubes(g, 1, 2, &[ShiftFraction::ZERO]).unwrap();
        let parents: Vec<_> = fam.cubes().iter().filter(|q| q.level() == 1).collect();
        for parent in parents {
            let children: Vec<_> = fam
                .cubes()
                .iter()
                .filter(|q| {
                    q.level() == 2
                        && (0..2).all(|a| {
                            q.anchor()[a] >> 1 == parent.anchor()[a]
                        })
                })
                .collect();
            assert_eq!(children.len(), 4);
            let total_vol: f64 = children.iter().map(|q| q.volume(&g)).sum();
            let weighted: f64 = children
                .iter()
                .map(|q| cube_average(&f, q).unwrap() * q.volume(&g))
                .sum();
            let parent_avg = cube_average(&f, parent).unwrap();
            assert!((weighted / total_vol - parent_avg).abs() <= 1e-12 * parent_avg.abs());
        }
    }

    #[test]
    fn cube_average_is_linear() {
        let g = make_grid(1, 2.0, 32).unwrap();
        let f = GriddedFunction::from_fn(g, |x| x[0].sin() + 2.0).unwrap();
        let gfn = GriddedFunction::from_fn(g, |x| x[0] * x[0]).unwrap();
        let c = 3.7;
        let combined = f
            .map(|v| c * v)
            .unwrap()
            .zip_with(&gfn, |a, b| a + b)
            .unwrap();
        let fam = enumerate_cubes(g, 0, 3, &default_shifts()).unwrap();
        for q in fam.cubes() {
            let lhs = cube_average(&combined, q).unwrap();
            let rhs = c * cube_average(&f, q).unwrap() + cube_average(&gfn, q).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let g = make_grid(2, 1.0, 16).unwrap();
        let a = enumerate_cubes(g, 0, 4, &default_shifts()).unwrap();
        let b = enumerate_cubes(g, 0, 4, &default_shifts()).unwrap();
        assert_eq!(a.cubes(), b.cubes());
    }

    #[test]
    fn prefix_sums_match_direct_averages() {
        for d in 1..=3usize {
            let n = if d == 3 { 8 } else { 16 };
            let g = make_grid(d, 1.0, n).unwrap();
            let f = GriddedFunction::from_fn(g, |x| {
                1.0 + x.iter().enumerate().map(|(i, v)| v * (i as f64 + 1.0)).sum::<f64>().cos()
            })
            .unwrap();
            let sums = PrefixSums::new(&f);
            let fam = enumerate_cubes(g, 0, g.max_level().min(3), &default_shifts()).unwrap();
            for q in fam.cubes() {
                let direct = cube_average(&f, q).unwrap();
                let fast = sums.cube_average(q);
                assert!(
                    (direct - fast).abs() <= 1e-10 * direct.abs().max(1.0),
                    "d={d} cube {q:?}: {direct} vs {fast}"
                );
            }
        }
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let g = make_grid(2, 0.75, 8).unwrap();
        let f = GriddedFunction::from_fn(g, |x| (x[0] * 3.1).sin() * (x[1] + 0.2).exp()).unwrap();
        let text = to_csv_string(&f);
        let back = from_csv_string(&text).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert_eq!(back.values(), f.values());
        // And through a file.
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        write_csv(&f, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn csv_rejects_malformed_input() {
        assert!(from_csv_string("").is_err());
        assert!(from_csv_string("1,1.0").is_err());
        assert!(from_csv_string("1,1.0,8\n1.0\n").is_err()); // too few values
        assert!(from_csv_string("5,1.0,8\n").is_err()); // bad dimension
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let g = grid_1d_8();
        let mut vals = vec![1.0; 8];
        vals[3] = f64::NAN;
        assert!(GriddedFunction::new(g, vals).is_err());
        let f = GriddedFunction::constant(g, 0.0).unwrap();
        assert!(f.powf(-1.0).is_err()); // 0^{-1} = ∞ must be caught
    }
}
