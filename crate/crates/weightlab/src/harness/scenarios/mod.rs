//! Scenario catalog: every statement the laboratory covers, as an executable
//! check at desk scale.
//!
//! Each scenario is a pure function of a seed. It validates its exponents
//! through the rational calculus first, runs the numerics, and returns an
//! [`InequalityReport`] whose verdict is recomputable from the recorded
//! numbers alone. The catalog pairs each scenario with a one-line summary;
//! [`claim_map`] lists the behavioral claims the suite covers and which
//! scenario exercises each one, so coverage can be audited mechanically.

pub mod class_checks;
pub mod operator_checks;

use crate::exponents::ExtReal;
use crate::grid::{enumerate_cubes, default_shifts, CubeFamily, Grid, GriddedFunction};
use crate::harness::report::{FamilyInfo, GridInfo, InequalityReport};
use crate::weights::Weight;
use crate::{Error, Result};

use rayon::prelude::*;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;

/// Labels of the eight standard probe functions, in the order the probe
/// builder emits them.
pub const PROBE_LABELS: [&str; 8] = [
    "gauss-wide-centered",
    "gauss-narrow-centered",
    "gauss-wide-offset",
    "gauss-narrow-offset",
    "unit-box",
    "left-half",
    "noise-a",
    "noise-b",
];

// ─── shared construction helpers ────────────────────────────────────────────

/// The full shifted dyadic family of a grid: every level from the whole
/// domain down to single cells, with the default shift set.
pub(crate) fn full_family(grid: &Grid) -> Result<CubeFamily> {
    enumerate_cubes(*grid, 0, grid.max_level(), &default_shifts())
}

/// Euclidean norm of the finite-difference gradient: central differences in
/// the interior, one-sided at the domain edges.
pub(crate) fn gradient_magnitude(f: &GriddedFunction) -> Result<GriddedFunction> {
    let grid = f.grid();
    let n = grid.n();
    let h = grid.h();
    let v = f.values();
    let mut out = vec![0.0; grid.len()];
    for k in 0..grid.len() {
        let coords = grid.coords(k);
        let mut sq = 0.0;
        for axis in 0..grid.d() {
            let c = coords[axis];
            let mut shifted = coords;
            let deriv = if c == 0 {
                shifted[axis] = 1;
                (v[grid.index(&shifted[..grid.d()])] - v[k]) / h
            } else if c == n - 1 {
                shifted[axis] = n - 2;
                (v[k] - v[grid.index(&shifted[..grid.d()])]) / h
            } else {
                shifted[axis] = c + 1;
                let hi = v[grid.index(&shifted[..grid.d()])];
                shifted[axis] = c - 1;
                let lo = v[grid.index(&shifted[..grid.d()])];
                (hi - lo) / (2.0 * h)
            };
            sq += deriv * deriv;
        }
        out[k] = sq.sqrt();
    }
    GriddedFunction::new(grid, out)
}

/// The weight `x ↦ (1 + |x|)^e` (Euclidean norm).
pub(crate) fn one_plus_abs_pow(grid: &Grid, e: f64) -> Result<Weight> {
    let d = grid.d();
    Weight::from_fn(grid, |x| {
        let r = x[..d].iter().map(|t| t * t).sum::<f64>().sqrt();
        (1.0 + r).powf(e)
    })
}

/// Shorthand for a finite rational exponent.
pub(crate) fn xr(n: i64, d: i64) -> ExtReal {
    ExtReal::from_pair(n, d)
}

/// The first `count` probe labels as owned strings, for table rows.
pub(crate) fn probe_label_strings(count: usize) -> Vec<String> {
    PROBE_LABELS[..count].iter().map(|s| (*s).to_string()).collect()
}

/// Stage labels `N=…` for a resolution schedule.
pub(crate) fn n_labels(ns: &[usize]) -> Vec<String> {
    ns.iter().map(|n| format!("N={n}")).collect()
}

/// Stage labels `L=…` for a domain-size schedule.
pub(crate) fn l_labels(ls: &[f64]) -> Vec<String> {
    ls.iter().map(|l| format!("L={l}")).collect()
}

/// Record the grid and cube family a scenario ran on.
pub(crate) fn attach_geometry(report: &mut InequalityReport, grid: &Grid, family: Option<&CubeFamily>) {
    report.grid = Some(GridInfo::from_grid(grid));
    report.cube_family = family.map(FamilyInfo::from_family);
}

// ─── catalog ────────────────────────────────────────────────────────────────

/// A named scenario with a one-line summary.
pub struct ScenarioEntry {
    pub name: &'static str,
    pub summary: &'static str,
    run: fn(u64) -> Result<InequalityReport>,
}

/// The full scenario catalog, in canonical order.
pub const CATALOG: &[ScenarioEntry] = &[
    ScenarioEntry {
        name: "mam",
        summary: "multilinear fractional maximal operator between weighted Lebesgue spaces",
        run: operator_checks::mam,
    },
    ScenarioEntry {
        name: "lp-lq-m",
        summary: "fractional maximal operator with a partial weight pair",
        run: operator_checks::lp_lq_m,
    },
    ScenarioEntry {
        name: "lp-lq-ia",
        summary: "fractional integral against a Morrey-controlled factor",
        run: operator_checks::lp_lq_ia,
    },
    ScenarioEntry {
        name: "ia-ma",
        summary: "fractional integral dominates the fractional maximal function in norm",
        run: operator_checks::ia_ma,
    },
    ScenarioEntry {
        name: "fefferman-phong",
        summary: "gradient embedding with a Morrey-controlled multiplier",
        run: operator_checks::fefferman_phong,
    },
    ScenarioEntry {
        name: "hardy-leray",
        summary: "axis-weighted quadratic form bounds in three dimensions",
        run: operator_checks::hardy_leray,
    },
    ScenarioEntry {
        name: "poincare",
        summary: "mean-oscillation embedding on a subdomain",
        run: operator_checks::poincare,
    },
    ScenarioEntry {
        name: "ckn",
        summary: "interpolative product bound combining a gradient factor and a plain norm",
        run: operator_checks::ckn,
    },
    ScenarioEntry {
        name: "commutator-bmo",
        summary: "commutator upper bound for a bounded-mean-oscillation symbol",
        run: operator_checks::commutator_bmo,
    },
    ScenarioEntry {
        name: "commutator-not-bmo",
        summary: "commutator blow-up for a symbol outside bounded mean oscillation",
        run: operator_checks::commutator_not_bmo,
    },
    ScenarioEntry {
        name: "good-lambda",
        summary: "level-set comparison between a commutator and its controlling sum",
        run: operator_checks::good_lambda,
    },
    ScenarioEntry {
        name: "bump",
        summary: "Orlicz-bump variants of the two-weight constant stay finite",
        run: operator_checks::bump,
    },
    ScenarioEntry {
        name: "domination",
        summary: "pointwise domination gap and the bilinear maximal norm bound",
        run: operator_checks::domination,
    },
    ScenarioEntry {
        name: "rdf",
        summary: "iterated maximal construction of a bounded majorant",
        run: operator_checks::rdf,
    },
    ScenarioEntry {
        name: "majorant",
        summary: "explicit majorant built from two maximal factors",
        run: class_checks::majorant,
    },
    ScenarioEntry {
        name: "power-gate",
        summary: "power-weight membership interval and drift outside it",
        run: class_checks::power_gate,
    },
    ScenarioEntry {
        name: "sharpness",
        summary: "growth rate of the constant at and beyond the membership boundary",
        run: class_checks::sharpness,
    },
    ScenarioEntry {
        name: "factorization",
        summary: "composite weights from a factor pair, all four exponent cases",
        run: class_checks::factorization,
    },
    ScenarioEntry {
        name: "characterization",
        summary: "componentwise classical-class membership induced by the vector class",
        run: class_checks::characterization,
    },
    ScenarioEntry {
        name: "duality",
        summary: "exact identity between a vector constant and its dual at each slot",
        run: class_checks::duality,
    },
    ScenarioEntry {
        name: "rh-openness",
        summary: "reverse Hölder indices and openness of the partial class in both exponents",
        run: class_checks::rh_openness,
    },
    ScenarioEntry {
        name: "eta-power",
        summary: "stability of membership under small and reverse-Hölder-sized powers",
        run: class_checks::eta_power,
    },
    ScenarioEntry {
        name: "class-union",
        summary: "monotonicity in the partial power and the union description of the class",
        run: class_checks::class_union,
    },
    ScenarioEntry {
        name: "embedding",
        summary: "embeddings between classical, partial, and shifted-index classes",
        run: class_checks::embedding,
    },
    ScenarioEntry {
        name: "a1-product",
        summary: "products of powered maximal functions land in the first-order class",
        run: class_checks::a1_product,
    },
    ScenarioEntry {
        name: "lorentz-embed",
        summary: "Lorentz secondary-exponent embedding with the explicit constant",
        run: class_checks::lorentz_embed,
    },
    ScenarioEntry {
        name: "offdiag-chain",
        summary: "exact rational off-diagonal iteration chain",
        run: class_checks::offdiag_chain,
    },
    ScenarioEntry {
        name: "extrapolation-spot",
        summary: "extrapolation exponent identities plus a numeric spot instance",
        run: class_checks::extrapolation_spot,
    },
];

/// Behavioral claims covered by the suite, each paired with the scenario
/// that exercises it. Every catalog scenario appears at least once; no claim
/// is split across scenarios.
pub const CLAIM_MAP: &[(&str, &str)] = &[
    ("multilinear-maximal-boundedness", "mam"),
    ("partial-weighted-maximal-bound", "lp-lq-m"),
    ("weighted-fractional-integral-bound", "lp-lq-ia"),
    ("fractional-integral-factor-bound", "lp-lq-ia"),
    ("integral-vs-maximal-norm-control", "ia-ma"),
    ("gradient-embedding-weighted", "fefferman-phong"),
    ("axis-weighted-hardy", "hardy-leray"),
    ("axis-weighted-hardy-instance", "hardy-leray"),
    ("mean-oscillation-poincare", "poincare"),
    ("interpolative-gradient-product-bound", "ckn"),
    ("commutator-upper-bound-bmo", "commutator-bmo"),
    ("commutator-necessity-bmo", "commutator-not-bmo"),
    ("commutator-level-set-comparison", "good-lambda"),
    ("orlicz-bump-first", "bump"),
    ("orlicz-bump-second", "bump"),
    ("maximal-bilinear-domination", "domination"),
    ("bilinear-maximal-norm-bound", "domination"),
    ("weighted-maximal-iteration-bound", "rdf"),
    ("majorizing-weight-construction", "rdf"),
    ("composite-majorant-construction", "majorant"),
    ("single-majorant-construction", "majorant"),
    ("power-weight-membership", "power-gate"),
    ("power-weight-endpoint-membership", "power-gate"),
    ("power-weight-membership-summary", "power-gate"),
    ("power-weight-optimality", "sharpness"),
    ("two-weight-factorization", "factorization"),
    ("component-class-characterization", "characterization"),
    ("component-infinity-membership", "characterization"),
    ("dual-class-identity", "duality"),
    ("partial-class-openness", "rh-openness"),
    ("reverse-holder-product", "rh-openness"),
    ("reverse-holder-slots", "rh-openness"),
    ("small-power-stability", "eta-power"),
    ("large-power-stability", "eta-power"),
    ("partial-class-union", "class-union"),
    ("partial-order-monotonicity", "class-union"),
    ("classical-to-partial-embedding", "embedding"),
    ("partial-product-relations", "embedding"),
    ("partial-index-shift-embedding", "embedding"),
    ("maximal-product-a1", "a1-product"),
    ("lorentz-secondary-embedding", "lorentz-embed"),
    ("offdiagonal-exponent-chain", "offdiag-chain"),
    ("one-variable-extrapolation", "extrapolation-spot"),
    ("offdiagonal-extrapolation", "extrapolation-spot"),
    ("stepwise-offdiagonal-extrapolation", "extrapolation-spot"),
    ("endpoint-offdiagonal-extrapolation", "extrapolation-spot"),
    ("multilinear-extrapolation", "extrapolation-spot"),
    ("diagonal-to-offdiagonal-transfer", "extrapolation-spot"),
    ("derived-exponent-bookkeeping", "extrapolation-spot"),
];

/// Run one catalog scenario by name. The report's runtime field is filled
/// with the measured wall-clock time; everything else is deterministic in
/// the seed.
pub fn run_scenario(name: &str, seed: u64) -> Result<InequalityReport> {
    let entry = CATALOG.iter().find(|e| e.name == name).ok_or_else(|| {
        let names: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
        Error::Harness(format!(
            "unknown scenario {name:?}; the catalog contains: {}",
            names.join(", ")
        ))
    })?;
    let start = std::time::Instant::now();
    let mut report = (entry.run)(seed)?;
    report.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

/// Run the whole catalog in canonical order, scenarios in parallel.
pub fn run_all(seed: u64) -> Result<Vec<InequalityReport>> {
    CATALOG
        .par_iter()
        .map(|e| run_scenario(e.name, seed))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{BTreeMap, BTreeSet};

    #[test]
    fn catalog_names_are_unique_and_dispatchable() {
        let mut seen = BTreeSet::new();
        for e in CATALOG {
            assert!(seen.insert(e.name), "duplicate scenario name {}", e.name);
            assert!(!e.summary.is_empty());
        }
        assert_eq!(CATALOG.len(), 28);
    }

    #[test]
    fn claim_map_covers_catalog_exactly() {
        let names: BTreeSet<&str> = CATALOG.iter().map(|e| e.name).collect();
        let mut claims = BTreeSet::new();
        let mut covered = BTreeSet::new();
        let mut homes: BTreeMap<&str, &str> = BTreeMap::new();
        for (claim, scenario) in CLAIM_MAP {
            assert!(claims.insert(*claim), "claim {claim} listed twice");
            assert!(
                names.contains(scenario),
                "claim {claim} points at unknown scenario {scenario}"
            );
            if let Some(prev) = homes.insert(claim, scenario) {
                panic!("claim {claim} split across {prev} and {scenario}");
            }
            covered.insert(*scenario);
        }
        assert_eq!(covered, names, "some scenario exercises no claim");
    }

    #[test]
    fn unknown_scenario_error_lists_catalog() {
        let err = run_scenario("no-such-scenario", DEFAULT_SEED).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("no-such-scenario"));
        assert!(msg.contains("duality"));
        assert!(msg.contains("offdiag-chain"));
    }

    #[test]
    fn gradient_magnitude_matches_a_linear_function() {
        // f(x, y) = 3x + 4y has |∇f| = 5 everywhere, and both the central
        // and one-sided differences are exact on affine functions.
        let grid = crate::grid::make_grid(2, 1.0, 8).unwrap();
        let f = GriddedFunction::from_fn(grid, |x| 3.0 * x[0] + 4.0 * x[1]).unwrap();
        let g = gradient_magnitude(&f).unwrap();
        for v in g.values() {
            assert!((v - 5.0).abs() < 1e-12, "|∇f| = {v}");
        }
    }
}
