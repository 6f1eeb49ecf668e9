//! Scenarios that drive the weight classes and the exponent calculus:
//! membership gates, sharpness rates, factorization, characterization,
//! duality, reverse Hölder openness, unions and embeddings, and the exact
//! rational extrapolation identities.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exponents::{
    derived_deltas, dual_tuple, multilinear_target_check, offdiagonal_chain,
    one_var_extrapolation, rat, ExponentSystem, ExtReal, FactorizationCase,
};
use crate::grid::{enumerate_cubes, make_grid, Cube, ShiftFraction};
use crate::harness::report::{InequalityReport, NamedValue, ScanTable, Verdict};
use crate::harness::scans::{
    ratio_scan, sharpness_scan, stability_verdict, RatioSample, STABILITY_DRIFT,
};
use crate::norms::{lebesgue_norm, lorentz_embedding_constant, lorentz_norm, morrey_norm};
use crate::operators::{fractional_maximal, probe_family};
use crate::weights::{
    ap_constant, apq_constant, characterization_check, construct_majorant, factorization_check,
    ln_power_mean, partial_constant, power_gate as gate_decision, power_weight,
    reverse_holder_index, ConstantEstimate, MembershipStatus, Weight, WeightVector,
};
use crate::Result;

use super::{
    attach_geometry, full_family, n_labels, one_plus_abs_pow, probe_label_strings, xr,
    PROBE_LABELS,
};

/// Partial-class constant of a single weight `w` against the modifier `u`.
fn single_partial(
    w: &Weight,
    u: &Weight,
    p: ExtReal,
    q: ExtReal,
    family: &crate::grid::CubeFamily,
) -> Result<ConstantEstimate> {
    let wv = WeightVector::with_partial(vec![w.clone()], u.clone())?;
    partial_constant(&wv, &[p], &q, None, family)
}

/// Explicit majorant built from two maximal factors: it sits above the
/// product it majorizes, lands in the first-order class, carries the
/// predicted Morrey scale, and admits the constant weight into the induced
/// partial class. Run once with two genuine factors and once degenerate.
pub(crate) fn majorant(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("majorant");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "resolutions": [128, 256],
        "two_factor": {"beta1": "1/10", "beta2": "1/2", "alpha": "3/5",
                        "s2": "2", "eps0": "1/2", "theta": "2", "inner": "3/2",
                        "factor": "(1+|x|)^(-1)", "second": "(1+|x|)^(-3/10)",
                        "morrey_primary": "5/2", "second_morrey": "10",
                        "membership": {"p": "16/15", "q": "80/67"}},
        "single_factor": {"beta1": "1/10", "beta2": "3/10", "alpha": "2/5",
                           "s2": "3/2", "eps0": "1/2", "theta": "9/2", "inner": "1",
                           "factor": "(1+|x|)^(-1)",
                           "morrey_primary": "5",
                           "membership": {"p": "5/4", "q": "10/7"}},
    });
    let ns = [128usize, 256];
    let mut two_ratios = Vec::new();
    let mut single_ratios = Vec::new();
    let mut min_excess_two = f64::INFINITY;
    let mut min_excess_single = f64::INFINITY;
    let mut finals: Vec<NamedValue> = Vec::new();
    let mut keep = None;
    for &n in &ns {
        let grid = make_grid(1, 1.0, n)?;
        let family = full_family(&grid)?;
        let u_big = one_plus_abs_pow(&grid, -1.0)?;

        // Two genuine factors.
        let u2 = one_plus_abs_pow(&grid, -0.3)?;
        let maj = construct_majorant(u_big.function(), &u2, 0.1, 0.5, 0.6, 2.0, 0.5, &family)?;
        let floor = u2.function().zip_with(u_big.function(), |a, b| a * b)?;
        min_excess_two = min_excess_two
            .min(maj.function().zip_with(&floor, |m, fl| m / fl)?.range().0);
        let morrey_ratio = morrey_norm(maj.function(), 2.5, 1.05, &family)?.value
            / (lorentz_norm(u_big.function(), 2.5, f64::INFINITY)?
                * morrey_norm(u2.function(), 10.0, 2.0, &family)?.value);
        two_ratios.push(morrey_ratio);

        // Degenerate second factor: the majorant of the factor alone.
        let one = Weight::constant(&grid, 1.0)?;
        let maj_s = construct_majorant(u_big.function(), &one, 0.1, 0.3, 0.4, 1.5, 0.5, &family)?;
        min_excess_single = min_excess_single.min(
            maj_s
                .function()
                .zip_with(u_big.function(), |m, fl| m / fl)?
                .range()
                .0,
        );
        let single_ratio = morrey_norm(maj_s.function(), 5.0, 1.05, &family)?.value
            / lorentz_norm(u_big.function(), 5.0, f64::INFINITY)?;
        single_ratios.push(single_ratio);

        if n == *ns.last().unwrap() {
            let a1_two = ap_constant(&maj, &ExtReal::from_int(1), &family)?;
            let a1_single = ap_constant(&maj_s, &ExtReal::from_int(1), &family)?;
            let member_two = single_partial(&one, &maj, xr(16, 15), xr(80, 67), &family)?;
            let member_single = single_partial(&one, &maj_s, xr(5, 4), xr(10, 7), &family)?;
            finals = vec![
                NamedValue::with_argmax(
                    "two-factor-first-order-constant",
                    a1_two.value,
                    a1_two.argmax.clone(),
                ),
                NamedValue::with_argmax(
                    "single-factor-first-order-constant",
                    a1_single.value,
                    a1_single.argmax.clone(),
                ),
                NamedValue::plain("two-factor-membership-constant", member_two.value),
                NamedValue::plain("single-factor-membership-constant", member_single.value),
            ];
        }
        keep = Some((grid, family));
    }
    let (grid, family) = keep.unwrap();
    let mut table = ScanTable::new("majorant-scale-ratios", n_labels(&ns));
    table.push_row("two-factor-morrey-ratio", two_ratios.clone());
    table.push_row("single-factor-morrey-ratio", single_ratios.clone());
    report
        .results
        .push(NamedValue::plain("two-factor-min-excess", min_excess_two));
    report
        .results
        .push(NamedValue::plain("single-factor-min-excess", min_excess_single));
    let finite = finals.iter().all(|nv| nv.value.is_finite());
    report.results.extend(finals);
    report.verdict = Verdict::from_bool(min_excess_two >= 1.0 - 1e-12)
        .and(Verdict::from_bool(min_excess_single >= 1.0 - 1e-12))
        .and(Verdict::from_bool(finite))
        .and(stability_verdict(&two_ratios, STABILITY_DRIFT))
        .and(stability_verdict(&single_ratios, STABILITY_DRIFT));
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table);
    Ok(report)
}

/// Power-weight membership interval: the exact rational gate agrees with
/// itself on members, boundary points, and non-members; member constants
/// drift under 5% across a fourfold refinement; non-member constants grow
/// under refinement. Domain-doubling factors are recorded for inspection:
/// origin-anchored power pairs are scale-invariant, so those factors sit
/// at 1.
pub(crate) fn power_gate(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("power-gate");
    report.params = serde_json::json!({
        "d": 1, "p": "2", "q": "1", "a": "1/2",
        "gate": {"lower": "-1/2", "upper": "1/2"},
        "members": ["-1/4", "0", "1/4"],
        "non_members": ["-3/4", "3/5"],
        "resolutions": [1024, 2048, 4096],
        "domain_halfwidths": [1.0, 2.0, 4.0, 8.0],
    });
    let p = xr(2, 1);
    let q = xr(1, 1);
    let a = rat(1, 2);
    let bs = [
        ("b=-3/4", rat(-3, 4), -0.75, false),
        ("b=-1/4", rat(-1, 4), -0.25, true),
        ("b=0", rat(0, 1), 0.0, true),
        ("b=1/4", rat(1, 4), 0.25, true),
        ("b=3/5", rat(3, 5), 0.6, false),
    ];

    // Exact gate decisions, including both endpoint flavors.
    let mut gate_ok = true;
    for (_, b_rat, _, member) in &bs {
        let verdict = gate_decision(1, &p, &q, &a, b_rat)?;
        gate_ok = gate_ok && (verdict.status == MembershipStatus::Member) == *member;
    }
    let open_upper = gate_decision(1, &p, &q, &a, &rat(1, 2))?;
    gate_ok = gate_ok && open_upper.status == MembershipStatus::Boundary && !open_upper.upper_closed;
    let closed_upper = gate_decision(1, &xr(1, 1), &q, &a, &rat(0, 1))?;
    gate_ok = gate_ok && closed_upper.status == MembershipStatus::Member && closed_upper.upper_closed;
    let above_closed = gate_decision(1, &xr(1, 1), &q, &a, &rat(1, 10))?;
    gate_ok = gate_ok && above_closed.status == MembershipStatus::NonMember;

    // Constants under refinement at fixed domain.
    let ns = [1024usize, 2048, 4096];
    let mut by_n: Vec<Vec<f64>> = vec![Vec::new(); bs.len()];
    for &n in &ns {
        let grid = make_grid(1, 1.0, n)?;
        let family = full_family(&grid)?;
        let u = power_weight(&grid, -0.5, &[0.0], None)?;
        for (row, (_, _, bf, _)) in bs.iter().enumerate() {
            let w = power_weight(&grid, *bf, &[0.0], None)?;
            by_n[row].push(single_partial(&w, &u, p.clone(), q.clone(), &family)?.value);
        }
    }
    let mut n_table = ScanTable::new("membership-constants-by-resolution", n_labels(&ns));
    for ((label, _, _, _), vals) in bs.iter().zip(&by_n) {
        n_table.push_row(*label, vals.clone());
    }
    let mut member_drift: f64 = 0.0;
    let mut nonmember_growth = f64::INFINITY;
    for ((_, _, _, member), vals) in bs.iter().zip(&by_n) {
        if *member {
            member_drift = member_drift.max((vals[2] / vals[0] - 1.0).abs());
        } else {
            for step in vals.windows(2) {
                nonmember_growth = nonmember_growth.min(step[1] / step[0]);
            }
        }
    }

    // Constants under domain doubling at fixed resolution, for the record.
    let ls = [1.0f64, 2.0, 4.0, 8.0];
    let mut l_table = ScanTable::new(
        "membership-constants-by-domain",
        ls.iter().map(|l| format!("L={l}")).collect(),
    );
    for (label, _, bf, _) in &bs {
        let mut vals = Vec::new();
        for &l in &ls {
            let grid = make_grid(1, l, 1024)?;
            let family = full_family(&grid)?;
            let u = power_weight(&grid, -0.5, &[0.0], None)?;
            let w = power_weight(&grid, *bf, &[0.0], None)?;
            vals.push(single_partial(&w, &u, p.clone(), q.clone(), &family)?.value);
        }
        l_table.push_row(*label, vals);
    }

    let grid = make_grid(1, 1.0, *ns.last().unwrap())?;
    let family = full_family(&grid)?;
    report
        .results
        .push(NamedValue::plain("gate-agreement", f64::from(u8::from(gate_ok))));
    report
        .results
        .push(NamedValue::plain("member-max-drift", member_drift));
    report
        .results
        .push(NamedValue::plain("non-member-min-growth", nonmember_growth));
    report.verdict = Verdict::from_bool(gate_ok)
        .and(Verdict::from_bool(member_drift < 0.05))
        .and(Verdict::from_bool(nonmember_growth >= 1.02));
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(n_table);
    report.tables.push(l_table);
    Ok(report)
}

/// Growth rate of the pair constant in the domain size: below the gate the
/// constant grows like the predicted power `aq − bq − d`, at the open lower
/// endpoint it grows logarithmically, and inside the gate it stays flat.
/// The cell width is held fixed while the domain grows, so the near-anchor
/// mass is the same constant at every size and the growth in the domain is
/// isolated from refinement effects.
pub(crate) fn sharpness(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("sharpness");
    report.params = serde_json::json!({
        "d": 1, "p": "2", "q": "1", "a": "3/4",
        "partial_anchor": "0", "weight_anchor": "1/2",
        "interior": {"b": "-3/4", "predicted_exponent": "1/2"},
        "boundary": {"b": "-1/4"},
        "member": {"b": "1/8"},
        "domain_halfwidths": [2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
        "cells_per_unit": 512,
    });
    let rs = [2.0f64, 4.0, 8.0, 16.0, 32.0, 64.0];
    let bs = [("b=-3/4", -0.75), ("b=-1/4", -0.25), ("b=1/8", 0.125)];
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (_, bf) in &bs {
        let mut vals = Vec::new();
        for &r in &rs {
            let grid = make_grid(1, r, 512 * r as usize)?;
            // A single cube: the whole domain.
            let family = enumerate_cubes(grid, 0, 0, &[ShiftFraction::ZERO])?;
            let u = power_weight(&grid, -0.75, &[0.0], None)?;
            let w = power_weight(&grid, *bf, &[0.5], None)?;
            vals.push(single_partial(&w, &u, xr(2, 1), xr(1, 1), &family)?.value);
        }
        rows.push(vals);
    }
    let interior = sharpness_scan(&rs, &rows[0])?;
    let boundary = sharpness_scan(&rs, &rows[1])?;
    let member = sharpness_scan(&rs, &rows[2])?;

    let leg = |fit: &crate::harness::scans::GrowthFit, ok: bool| {
        if fit.monotone {
            Verdict::from_bool(ok)
        } else {
            Verdict::Inconclusive
        }
    };
    let interior_ok = (interior.exponent - 0.5).abs() / 0.5 <= 0.20;
    let boundary_ok = boundary.log_residual < boundary.power_residual;
    let member_ok = member.exponent.abs() < 0.1;

    let mut table = ScanTable::new(
        "pair-constant-by-domain",
        rs.iter().map(|r| format!("L={r}")).collect(),
    );
    for ((label, _), vals) in bs.iter().zip(&rows) {
        table.push_row(*label, vals.clone());
    }
    report
        .results
        .push(NamedValue::plain("interior-fitted-exponent", interior.exponent));
    report
        .results
        .push(NamedValue::plain("interior-predicted-exponent", 0.5));
    report
        .results
        .push(NamedValue::plain("boundary-log-residual", boundary.log_residual));
    report
        .results
        .push(NamedValue::plain("boundary-power-residual", boundary.power_residual));
    report
        .results
        .push(NamedValue::plain("member-fitted-exponent", member.exponent));
    report.verdict = leg(&interior, interior_ok)
        .and(leg(&boundary, boundary_ok))
        .and(leg(&member, member_ok));
    let grid = make_grid(1, rs[0], 512 * rs[0] as usize)?;
    attach_geometry(&mut report, &grid, None);
    report.tables.push(table);
    Ok(report)
}

/// Composite weights from a factor pair: in all four exponent cases the
/// composite `μ^A w^B` lands in the target class with the predicted
/// per-cube bound, and the exact rational exponents match hand-derived
/// values.
pub(crate) fn factorization(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("factorization");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "n": 256,
        "w": "|x|^(1/5)·(1+|x|)^(1/10)", "mu": "(1+|x|)^(-3/10)",
        "downward_modifier": "(1+|x|)^(-1/5)", "upward_modifier": "1",
        "cases": [
            {"label": "case-i",   "p": "2", "r": "2",   "p0": "3", "r0": "3"},
            {"label": "case-ii",  "p": "2", "r": "1",   "p0": "6", "r0": "3/2"},
            {"label": "case-iii", "p": "3", "r": "3",   "p0": "2", "r0": "2"},
            {"label": "case-iv",  "p": "6", "r": "3/2", "p0": "2", "r0": "1"},
        ],
    });
    let grid = make_grid(1, 1.0, 256)?;
    let family = full_family(&grid)?;
    let w = power_weight(&grid, 0.2, &[0.0], None)?.product(&one_plus_abs_pow(&grid, 0.1)?)?;
    let mu = one_plus_abs_pow(&grid, -0.3)?;
    let u_down = one_plus_abs_pow(&grid, -0.2)?;
    let u_up = Weight::constant(&grid, 1.0)?;

    type CaseRow = (
        &'static str,
        ExtReal,
        BigRational,
        ExtReal,
        BigRational,
        bool,
        FactorizationCase,
        BigRational,
        BigRational,
        BigRational,
    );
    let cases: [CaseRow; 4] = [
        (
            "case-i",
            xr(2, 1),
            rat(2, 1),
            xr(3, 1),
            rat(3, 1),
            false,
            FactorizationCase::I,
            rat(1, 1),
            rat(-1, 3),
            rat(2, 3),
        ),
        (
            "case-ii",
            xr(2, 1),
            rat(1, 1),
            xr(6, 1),
            rat(3, 2),
            false,
            FactorizationCase::II,
            rat(3, 2),
            rat(-1, 2),
            rat(2, 3),
        ),
        (
            "case-iii",
            xr(3, 1),
            rat(3, 1),
            xr(2, 1),
            rat(2, 1),
            true,
            FactorizationCase::III,
            rat(1, 1),
            rat(1, 4),
            rat(3, 4),
        ),
        (
            "case-iv",
            xr(6, 1),
            rat(3, 2),
            xr(2, 1),
            rat(1, 1),
            true,
            FactorizationCase::IV,
            rat(3, 2),
            rat(3, 5),
            rat(3, 5),
        ),
    ];

    let mut table = ScanTable::new(
        "factorization-cases",
        vec![
            "gamma".to_string(),
            "mu-exponent".to_string(),
            "w-exponent".to_string(),
            "composite-constant".to_string(),
            "bound".to_string(),
            "max-cube-ratio".to_string(),
        ],
    );
    let mut all_ok = true;
    let mut exact_ok = true;
    for (label, p, r, p0, r0, upward, case, gamma, mu_e, w_e) in cases {
        let u = if upward { &u_up } else { &u_down };
        let out = factorization_check(&w, &mu, u, &p, &r, &p0, &r0, &family)?;
        exact_ok = exact_ok
            && out.case == case
            && out.gamma == gamma
            && out.mu_exponent == mu_e
            && out.w_exponent == w_e;
        all_ok = all_ok && out.ok && out.max_cube_ratio <= 1.0 + 1e-9;
        table.push_row(
            label,
            vec![
                out.gamma.to_f64().unwrap_or(f64::NAN),
                out.mu_exponent.to_f64().unwrap_or(f64::NAN),
                out.w_exponent.to_f64().unwrap_or(f64::NAN),
                out.composite_constant.value,
                out.bound,
                out.max_cube_ratio,
            ],
        );
    }
    report
        .results
        .push(NamedValue::plain("exact-exponents", f64::from(u8::from(exact_ok))));
    report
        .results
        .push(NamedValue::plain("per-cube-bounds", f64::from(u8::from(all_ok))));
    report.verdict = Verdict::from_bool(exact_ok && all_ok);
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table);
    Ok(report)
}

/// Componentwise classical-class membership induced by the vector class:
/// for twenty seeded weight pairs every slot, product, converse, and
/// duality item passes with its predicted per-cube bound, and the squared
/// product weights land in the exponential-mean class.
pub(crate) fn characterization(seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("characterization");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "n": 256, "vectors": 20,
        "p": ["2", "2"], "q": "2",
        "recipe": "|x|^b·(1+|x|)^c with b in (-3/10, 3/10), c in (-1/2, 1/2)",
    });
    let grid = make_grid(1, 1.0, 256)?;
    let family = full_family(&grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = [xr(2, 1), xr(2, 1)];
    let q = xr(2, 1);
    let mut table: Option<ScanTable> = None;
    let mut all_ok = true;
    for k in 0..20 {
        let component = |rng: &mut ChaCha8Rng| -> Result<Weight> {
            let b = rng.gen_range(-0.3..0.3);
            let c = rng.gen_range(-0.5..0.5);
            power_weight(&grid, b, &[0.0], None)?.product(&one_plus_abs_pow(&grid, c)?)
        };
        let w1 = component(&mut rng)?;
        let w2 = component(&mut rng)?;
        let wv = WeightVector::new(vec![w1, w2])?;
        let outcome = characterization_check(&wv, &p, &q, &family)?;
        all_ok = all_ok && outcome.ok;
        let tbl = table.get_or_insert_with(|| {
            ScanTable::new(
                "characterization-max-cube-ratios",
                outcome.items.iter().map(|i| i.name.clone()).collect(),
            )
        });
        tbl.push_row(
            format!("vector-{k:02}"),
            outcome.items.iter().map(|i| i.max_cube_ratio).collect(),
        );
    }

    // The squared product weights of a partial pair land in the
    // exponential-mean class with finite constants.
    let u = one_plus_abs_pow(&grid, -1.0)?;
    let w = power_weight(&grid, 0.125, &[0.0], None)?;
    let fwd = ap_constant(&u.product(&w)?.pow(2.0)?, &ExtReal::Infinity, &family)?;
    let rev = ap_constant(&w.pow(-2.0)?, &ExtReal::Infinity, &family)?;
    report
        .results
        .push(NamedValue::plain("product-exponential-constant", fwd.value));
    report
        .results
        .push(NamedValue::plain("inverse-exponential-constant", rev.value));
    report.verdict = Verdict::from_bool(all_ok)
        .and(Verdict::from_bool(fwd.value.is_finite() && rev.value.is_finite()));
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table.expect("twenty vectors were run"));
    Ok(report)
}

/// Exact identity between a vector constant and its dual at each slot:
/// replacing component `i` by the reciprocal product weight and swapping
/// `(p_i, q) → (q', p_i')` leaves the constant unchanged cube by cube, so
/// the family constants agree to full precision.
pub(crate) fn duality(seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("duality");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "n": 1024, "vectors": 20,
        "p_pool": ["3/2", "2", "3"], "q_pool": ["1", "2", "4"],
        "recipe": "|x|^b·(1+|x|)^c with b in (-3/10, 3/10), c in (-1/2, 1/2)",
        "tolerance": "1e-12",
    });
    let grid = make_grid(1, 1.0, 1024)?;
    let family = full_family(&grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p_pool = [xr(3, 2), xr(2, 1), xr(3, 1)];
    let q_pool = [xr(1, 1), xr(2, 1), xr(4, 1)];
    let mut table = ScanTable::new(
        "dual-constants",
        vec![
            "base".to_string(),
            "dual-slot-1".to_string(),
            "dual-slot-2".to_string(),
            "max-relative-deviation".to_string(),
        ],
    );
    let mut max_dev: f64 = 0.0;
    for k in 0..20 {
        let component = |rng: &mut ChaCha8Rng| -> Result<Weight> {
            let b = rng.gen_range(-0.3..0.3);
            let c = rng.gen_range(-0.5..0.5);
            power_weight(&grid, b, &[0.0], None)?.product(&one_plus_abs_pow(&grid, c)?)
        };
        let w1 = component(&mut rng)?;
        let w2 = component(&mut rng)?;
        let p = vec![
            p_pool[rng.gen_range(0..p_pool.len())].clone(),
            p_pool[rng.gen_range(0..p_pool.len())].clone(),
        ];
        let q = q_pool[rng.gen_range(0..q_pool.len())].clone();
        let base = apq_constant(
            &WeightVector::new(vec![w1.clone(), w2.clone()])?,
            &p,
            &q,
            &family,
        )?
        .value;
        let nu_inv = w1.product(&w2)?.reciprocal()?;
        let mut duals = [f64::NAN; 2];
        let mut vector_dev: f64 = 0.0;
        for slot in 0..2 {
            let (p_star, q_star) = dual_tuple(&p, &q, slot)?;
            let components = if slot == 0 {
                vec![nu_inv.clone(), w2.clone()]
            } else {
                vec![w1.clone(), nu_inv.clone()]
            };
            let dual = apq_constant(&WeightVector::new(components)?, &p_star, &q_star, &family)?
                .value;
            duals[slot] = dual;
            vector_dev = vector_dev.max((dual / base - 1.0).abs());
        }
        max_dev = max_dev.max(vector_dev);
        table.push_row(
            format!("vector-{k:02}"),
            vec![base, duals[0], duals[1], vector_dev],
        );
    }
    report
        .results
        .push(NamedValue::plain("max-relative-deviation", max_dev));
    report.verdict = Verdict::from_bool(max_dev <= 1e-12);
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table);
    Ok(report)
}

/// Reverse Hölder indices of the two constant-forming weights exceed 1, and
/// the partial class is open in both exponents: nearby-index constants stay
/// finite and stable, with the exact slot monotonicity between them.
pub(crate) fn rh_openness(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("rh-openness");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "n": 512, "r_max": "4",
        "partial_weight": "(1+|x|)^(-1/2)", "weight": "|x|^(1/8)",
        "base": {"p": "2", "q": "2"},
        "perturbed": [{"p": "2", "q": "5/2"}, {"p": "5/2", "q": "5/2"}, {"p": "5/3", "q": "2"}],
        "resolutions": [256, 512],
    });
    let rh_product = reverse_holder_index(1, 1.0, 512, 4.0, |g| {
        one_plus_abs_pow(g, -0.5)?
            .product(&power_weight(g, 0.125, &[0.0], None)?)?
            .pow(2.0)
    })?;
    let rh_slot = reverse_holder_index(1, 1.0, 512, 4.0, |g| {
        power_weight(g, 0.125, &[0.0], None)?.pow(-2.0)
    })?;

    let ns = [256usize, 512];
    let indices = [
        ("p=2,q=2", xr(2, 1), xr(2, 1)),
        ("p=2,q=5/2", xr(2, 1), xr(5, 2)),
        ("p=5/2,q=5/2", xr(5, 2), xr(5, 2)),
        ("p=5/3,q=2", xr(5, 3), xr(2, 1)),
    ];
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); indices.len()];
    let mut keep = None;
    for &n in &ns {
        let grid = make_grid(1, 1.0, n)?;
        let family = full_family(&grid)?;
        let u = one_plus_abs_pow(&grid, -0.5)?;
        let w = power_weight(&grid, 0.125, &[0.0], None)?;
        for (row, (_, p, q)) in indices.iter().enumerate() {
            rows[row].push(single_partial(&w, &u, p.clone(), q.clone(), &family)?.value);
        }
        keep = Some((grid, family));
    }
    let (grid, family) = keep.unwrap();
    let mut table = ScanTable::new("partial-constants-by-resolution", n_labels(&ns));
    for ((label, _, _), vals) in indices.iter().zip(&rows) {
        table.push_row(*label, vals.clone());
    }
    // Raising the slot exponent weakens the slot mean: exact monotonicity.
    let monotone = rows[2].last().unwrap() <= &(rows[1].last().unwrap() * (1.0 + 1e-9));

    report
        .results
        .push(NamedValue::plain("product-rh-lower", rh_product.lower));
    report
        .results
        .push(NamedValue::plain("product-rh-upper", rh_product.upper));
    report.results.push(NamedValue::plain(
        "product-rh-crossed",
        f64::from(u8::from(rh_product.crossed)),
    ));
    report
        .results
        .push(NamedValue::plain("slot-rh-lower", rh_slot.lower));
    report
        .results
        .push(NamedValue::plain("slot-rh-upper", rh_slot.upper));
    report.results.push(NamedValue::plain(
        "slot-rh-crossed",
        f64::from(u8::from(rh_slot.crossed)),
    ));
    let mut verdict = Verdict::from_bool(rh_product.lower > 1.0 && rh_slot.lower > 1.0)
        .and(Verdict::from_bool(monotone));
    for vals in &rows {
        verdict = verdict.and(stability_verdict(vals, STABILITY_DRIFT));
    }
    report.verdict = verdict;
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table);
    Ok(report)
}

/// Stability of membership under powers: a small power `η = 1/2` keeps the
/// constant comparable to the powered constant; a power sized by the
/// measured reverse Hölder gap does too; and a power that exits the gate
/// makes the constant grow under refinement at the predicted rate.
pub(crate) fn eta_power(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("eta-power");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "partial_weight": "|x|^(-1/2)", "eta": "1/2",
        "small": {"p": "2", "q": "2", "weight": "|x|^(1/8)"},
        "exit": {"p": "2", "q": "4", "weight": "|x|^(5/16)",
                  "gate": {"lower": "1/4", "upper": "1/2"},
                  "resolutions": [512, 1024, 2048], "min_growth": 1.05},
        "resolutions": [256, 512],
    });
    let p = xr(2, 1);

    // Exact gate decisions for the exit leg.
    let gate_full = gate_decision(1, &p, &xr(4, 1), &rat(1, 2), &rat(5, 16))?;
    let gate_half = gate_decision(1, &p, &xr(4, 1), &rat(1, 2), &rat(5, 32))?;
    let gates_ok = gate_full.status == MembershipStatus::Member
        && gate_half.status == MembershipStatus::NonMember;

    // Reverse Hölder gap for the adapted-power leg.
    let rh_product = reverse_holder_index(1, 1.0, 512, 4.0, |g| {
        power_weight(g, -0.75, &[0.0], None)
    })?;
    let rh_slot = reverse_holder_index(1, 1.0, 512, 4.0, |g| {
        power_weight(g, -0.25, &[0.0], None)
    })?;
    let eps0 = (rh_product.lower.min(rh_slot.lower) - 1.0).min(0.5);

    // Stability of the two power ratios under refinement.
    let ns = [256usize, 512];
    let mut ratio_small = Vec::new();
    let mut ratio_adapted = Vec::new();
    let mut keep = None;
    for &n in &ns {
        let grid = make_grid(1, 1.0, n)?;
        let family = full_family(&grid)?;
        let u = power_weight(&grid, -0.5, &[0.0], None)?;
        let w = power_weight(&grid, 0.125, &[0.0], None)?;
        let base = single_partial(&w, &u, p.clone(), xr(2, 1), &family)?.value;
        let halved = single_partial(&w.pow(0.5)?, &u, p.clone(), xr(2, 1), &family)?.value;
        let adapted =
            single_partial(&w.pow(1.0 + eps0)?, &u, p.clone(), xr(2, 1), &family)?.value;
        ratio_small.push(halved / base.powf(0.5));
        ratio_adapted.push(adapted / base.powf(1.0 + eps0));
        keep = Some((grid, family));
    }
    let (grid, family) = keep.unwrap();

    // Growth of the exited constant under refinement.
    let exit_ns = [512usize, 1024, 2048];
    let mut exited = Vec::new();
    for &n in &exit_ns {
        let g = make_grid(1, 1.0, n)?;
        let fam = full_family(&g)?;
        let u = power_weight(&g, -0.5, &[0.0], None)?;
        let w_half = power_weight(&g, 0.15625, &[0.0], None)?;
        exited.push(single_partial(&w_half, &u, p.clone(), xr(4, 1), &fam)?.value);
    }
    let mut min_growth = f64::INFINITY;
    for step in exited.windows(2) {
        min_growth = min_growth.min(step[1] / step[0]);
    }

    let mut ratio_table = ScanTable::new("power-ratio-stability", n_labels(&ns));
    ratio_table.push_row("eta-half", ratio_small.clone());
    ratio_table.push_row("eta-adapted", ratio_adapted.clone());
    let mut growth_table = ScanTable::new("exited-constant-growth", n_labels(&exit_ns));
    growth_table.push_row("constant", exited.clone());

    report
        .results
        .push(NamedValue::plain("gate-agreement", f64::from(u8::from(gates_ok))));
    report.results.push(NamedValue::plain("adapted-epsilon", eps0));
    report
        .results
        .push(NamedValue::plain("exit-min-growth", min_growth));
    report.verdict = Verdict::from_bool(gates_ok)
        .and(Verdict::from_bool(eps0 > 0.0))
        .and(stability_verdict(&ratio_small, STABILITY_DRIFT))
        .and(stability_verdict(&ratio_adapted, STABILITY_DRIFT))
        .and(Verdict::from_bool(min_growth >= 1.05));
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(ratio_table);
    report.tables.push(growth_table);
    Ok(report)
}

/// Monotonicity in the partial power — cube by cube, raising the power of a
/// sub-unit modifier raises the constant — and the union description: a
/// reverse-Hölder-sized bump of the power keeps the constant finite and
/// stable.
pub(crate) fn class_union(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("class-union");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "p": "2", "q": "2", "a": "1/2",
        "partial_weight": "(1+|x|)^(-1)", "weight": "|x|^(1/8)",
        "monotonicity_powers": ["3/10", "7/10"],
        "resolutions": [256, 512],
    });
    let grid = make_grid(1, 1.0, 512)?;
    let family = full_family(&grid)?;
    let u = one_plus_abs_pow(&grid, -1.0)?;
    let w = power_weight(&grid, 0.125, &[0.0], None)?;

    // Per-cube monotonicity in the power of the modifier.
    let ln_u = u.ln_values();
    let ln_w = w.ln_values();
    let combo = |a: f64| -> Vec<f64> {
        ln_u.iter().zip(&ln_w).map(|(lu, lw)| a * lu + lw).collect()
    };
    let ln_lo = combo(0.3);
    let ln_hi = combo(0.7);
    let mono = ConstantEstimate::from_family(&family, |cube: &Cube| {
        let lo = ln_power_mean(&ln_lo, &grid, cube, 2.0);
        let hi = ln_power_mean(&ln_hi, &grid, cube, 2.0);
        let min_ln_u = ln_power_mean(&ln_u, &grid, cube, f64::NEG_INFINITY);
        Ok((lo - hi + 0.4 * min_ln_u).exp())
    })?;

    // Union leg: bump the power by the measured reverse Hölder gap.
    let a = 0.5;
    let rh = reverse_holder_index(1, 1.0, 512, 4.0, |g| {
        one_plus_abs_pow(g, -0.5)?
            .product(&power_weight(g, 0.125, &[0.0], None)?)?
            .pow(2.0)
    })?;
    let eps0 = rh.lower - 1.0;
    let b = (a + eps0 / (2.0 * (1.0 + eps0))).min(1.0);

    let ns = [256usize, 512];
    let mut bumped = Vec::new();
    for &n in &ns {
        let g = make_grid(1, 1.0, n)?;
        let fam = full_family(&g)?;
        let u_n = one_plus_abs_pow(&g, -1.0)?;
        let w_n = power_weight(&g, 0.125, &[0.0], None)?;
        bumped.push(single_partial(&w_n, &u_n.pow(b)?, xr(2, 1), xr(2, 1), &fam)?.value);
    }

    let mut table = ScanTable::new("bumped-power-constants", n_labels(&ns));
    table.push_row("constant", bumped.clone());
    report.results.push(NamedValue::with_argmax(
        "monotonicity-max-cube-ratio",
        mono.value,
        mono.argmax.clone(),
    ));
    report.results.push(NamedValue::plain("rh-lower", rh.lower));
    report.results.push(NamedValue::plain("bumped-power", b));
    report.verdict = Verdict::from_bool(mono.value <= 1.0 + 1e-9)
        .and(Verdict::from_bool(a < b && b <= 1.0))
        .and(Verdict::from_bool(rh.lower > 1.0))
        .and(stability_verdict(&bumped, STABILITY_DRIFT));
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table);
    Ok(report)
}

/// Embeddings between classical, partial, and shifted-index classes: the
/// classical pair class sits inside the index-shifted partial class, a
/// modified pair constant never exceeds the partial constant cube by cube,
/// and the three index-shift relations keep finite, stable constants.
pub(crate) fn embedding(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("embedding");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "resolutions": [256, 512],
        "shift": {"modifier": "|x|^(-1/2)", "weight": "|x|^(1/8)",
                   "classical": {"p": "2", "q": "1"}, "partial": {"p": "2", "q": "2/3"}},
        "pairwise": {"modifier": "(1+|x|)^(-1)", "weight": "|x|^(1/8)", "p": "2", "q": "2"},
        "raised": {"modifier": "|x|^(-1/2)", "component": "|x|^(5/8)", "p": "6", "q": "2"},
        "inverse": {"modifier": "|x|^(-1/2)", "component": "|x|^(1/2)", "p": "3", "q": "2"},
        "split": {"power_part": "|x|^(-1/4)", "smooth_part": "(1+|x|)^(-1/4)",
                   "weight": "|x|^(1/16)", "p": "4/3", "q_joint": "4/3", "q_smooth": "2"},
    });
    let ns = [256usize, 512];
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let mut keep = None;
    for &n in &ns {
        let grid = make_grid(1, 1.0, n)?;
        let family = full_family(&grid)?;

        // (1) Classical pair class into the index-shifted partial class.
        let u_pow = power_weight(&grid, -0.5, &[0.0], None)?;
        let w8 = power_weight(&grid, 0.125, &[0.0], None)?;
        let shifted = single_partial(&w8, &u_pow, xr(2, 1), xr(2, 3), &family)?.value;
        let classical = apq_constant(
            &WeightVector::new(vec![w8.clone()])?,
            &[xr(2, 1)],
            &xr(1, 1),
            &family,
        )?
        .value;
        rows[0].push(shifted / classical);

        // (2) Raised-index component u^{-1}w at the shifted source exponent.
        let w_raised = u_pow.reciprocal()?.product(&w8)?;
        rows[1].push(single_partial(&w_raised, &u_pow, xr(6, 1), xr(2, 1), &family)?.value);

        // (3) The inverse modifier as its own component.
        let w_inv = u_pow.reciprocal()?;
        rows[2].push(single_partial(&w_inv, &u_pow, xr(3, 1), xr(2, 1), &family)?.value);

        // (4) Splitting the modifier shifts the secondary index.
        let u_part = power_weight(&grid, -0.25, &[0.0], None)?;
        let u_smooth = one_plus_abs_pow(&grid, -0.25)?;
        let u_joint = u_part.product(&u_smooth)?;
        let w16 = power_weight(&grid, 0.0625, &[0.0], None)?;
        let joint = single_partial(&w16, &u_joint, xr(4, 3), xr(4, 3), &family)?.value;
        let smooth = single_partial(&w16, &u_smooth, xr(4, 3), xr(2, 1), &family)?.value;
        rows[3].push(joint / smooth);

        keep = Some((grid, family));
    }
    let (grid, family) = keep.unwrap();

    // Per-cube comparison: the pair constant of u·w never exceeds the
    // partial constant of (w, u).
    let u = one_plus_abs_pow(&grid, -1.0)?;
    let w = power_weight(&grid, 0.125, &[0.0], None)?;
    let ln_uw = u.product(&w)?.ln_values();
    let ln_w = w.ln_values();
    let ln_u = u.ln_values();
    let pairwise = ConstantEstimate::from_family(&family, |cube: &Cube| {
        let target = ln_power_mean(&ln_uw, &grid, cube, 2.0);
        let pair = target - ln_power_mean(&ln_uw, &grid, cube, -2.0);
        let partial = target
            - ln_power_mean(&ln_w, &grid, cube, -2.0)
            - ln_power_mean(&ln_u, &grid, cube, f64::NEG_INFINITY);
        Ok((pair - partial).exp())
    })?;

    let labels = [
        "shifted-over-classical",
        "raised-index-constant",
        "inverse-modifier-constant",
        "split-over-smooth",
    ];
    let mut table = ScanTable::new("embedding-constants", n_labels(&ns));
    for (label, vals) in labels.iter().zip(&rows) {
        table.push_row(*label, vals.clone());
    }
    report.results.push(NamedValue::with_argmax(
        "pairwise-max-cube-ratio",
        pairwise.value,
        pairwise.argmax.clone(),
    ));
    let mut verdict = Verdict::from_bool(pairwise.value <= 1.0 + 1e-9);
    for vals in &rows {
        verdict = verdict
            .and(stability_verdict(vals, STABILITY_DRIFT))
            .and(Verdict::from_bool(vals.iter().all(|v| v.is_finite())));
    }
    report.verdict = verdict;
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table);
    Ok(report)
}

/// Products of powered maximal functions land in the first-order class:
/// `M(f₁)^{1/3}·M(f₂)^{1/3}` has a finite, refinement-stable first-order
/// constant for probe pairs.
pub(crate) fn a1_product(seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("a1-product");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "powers": ["1/3", "1/3"],
        "pairs": [[0, 6], [2, 4]],
        "resolutions": [256, 512],
    });
    let ns = [256usize, 512];
    let pairs = [(0usize, 6usize), (2, 4)];
    let pair_labels: Vec<String> = pairs
        .iter()
        .map(|(i, j)| format!("{}×{}", PROBE_LABELS[*i], PROBE_LABELS[*j]))
        .collect();
    let mut rows: Vec<Vec<f64>> = vec![Vec::new(); pairs.len()];
    let mut keep = None;
    for &n in &ns {
        let grid = make_grid(1, 1.0, n)?;
        let family = full_family(&grid)?;
        let probes = probe_family(&grid, seed)?;
        for (row, (i, j)) in pairs.iter().enumerate() {
            let m1 = fractional_maximal(&probes[*i], 0.0, 1.0, &family)?.powf(1.0 / 3.0)?;
            let m2 = fractional_maximal(&probes[*j], 0.0, 1.0, &family)?.powf(1.0 / 3.0)?;
            let g = Weight::new(m1.zip_with(&m2, |a, b| a * b)?)?;
            rows[row].push(ap_constant(&g, &ExtReal::from_int(1), &family)?.value);
        }
        keep = Some((grid, family));
    }
    let (grid, family) = keep.unwrap();
    let mut table = ScanTable::new("first-order-constants", n_labels(&ns));
    for (label, vals) in pair_labels.iter().zip(&rows) {
        table.push_row(label.clone(), vals.clone());
    }
    let mut verdict = Verdict::Pass;
    for vals in &rows {
        verdict = verdict
            .and(stability_verdict(vals, STABILITY_DRIFT))
            .and(Verdict::from_bool(vals.iter().all(|v| v.is_finite())));
    }
    report.verdict = verdict;
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(table);
    Ok(report)
}

/// Lorentz secondary-exponent embedding with the explicit constant:
/// `‖f‖_{p,q} ≤ C(p,r,q)·‖f‖_{p,r}` for `r = 1`, on every probe, in both a
/// finite-`q` and a weak-endpoint instance.
pub(crate) fn lorentz_embed(seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("lorentz-embed");
    report.params = serde_json::json!({
        "d": 1, "l": 1.0, "n": 512,
        "cases": [{"p": "2", "r": "1", "q": "2"}, {"p": "3/2", "r": "1", "q": "inf"}],
    });
    let grid = make_grid(1, 1.0, 512)?;
    let probes = probe_family(&grid, seed)?;
    let cases = [(2.0, 1.0, 2.0), (1.5, 1.0, f64::INFINITY)];
    let mut table = ScanTable::new(
        "embedding-ratio-to-bound",
        vec!["p=2,q=2".to_string(), "p=3/2,q=inf".to_string()],
    );
    let mut max_ratio: f64 = 0.0;
    for (f, label) in probes.iter().zip(PROBE_LABELS) {
        let mut row = Vec::new();
        for (p, r, q) in cases {
            let lhs = lorentz_norm(f, p, q)?;
            let bound = lorentz_embedding_constant(p, r, q) * lorentz_norm(f, p, r)?;
            let ratio = lhs / bound;
            max_ratio = max_ratio.max(ratio);
            row.push(ratio);
        }
        table.push_row(label, row);
    }
    report
        .results
        .push(NamedValue::plain("max-ratio-to-bound", max_ratio));
    report.verdict = Verdict::from_bool(max_ratio <= 1.0 + 1e-9);
    attach_geometry(&mut report, &grid, None);
    report.tables.push(table);
    Ok(report)
}

/// Exact rational off-diagonal iteration chain: the canonical instance
/// stops at step five with the hand-derived second smoothing order and
/// limit, and a second instance stops at step four.
pub(crate) fn offdiag_chain(_seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("offdiag-chain");
    let first = offdiagonal_chain(1, &rat(9, 10), &rat(1, 5), &rat(10, 9), &rat(1, 1))?;
    let second = offdiagonal_chain(1, &rat(4, 5), &rat(1, 10), &rat(10, 9), &rat(1, 1))?;
    report.params = serde_json::json!({
        "first": {"d": 1, "alpha": "9/10", "beta": "1/5", "p": "10/9", "s": "1",
                   "expected": {"k0": 5, "beta2": "21/40", "beta_limit": "17/20"}},
        "second": {"d": 1, "alpha": "4/5", "beta": "1/10", "p": "10/9", "s": "1",
                    "expected": {"k0": 4, "final_beta": "5/8", "beta_limit": "7/10"}},
    });
    let exact_first = first.k0 == 5
        && first.entries.len() == 5
        && first.entries[1].beta == rat(21, 40)
        && first.beta_limit == rat(17, 20);
    let exact_second = second.k0 == 4
        && second.entries.last().map(|e| e.beta == rat(5, 8)) == Some(true)
        && second.beta_limit == rat(7, 10);

    let mut table = ScanTable::new(
        "iteration-chain",
        vec!["beta".to_string(), "q".to_string(), "s".to_string()],
    );
    for (k, entry) in first.entries.iter().enumerate() {
        table.push_row(
            format!("k={}", k + 1),
            vec![
                entry.beta.to_f64().unwrap_or(f64::NAN),
                entry.q.to_f64().unwrap_or(f64::NAN),
                entry.s.to_f64().unwrap_or(f64::NAN),
            ],
        );
    }
    report.results.push(NamedValue::plain(
        "first-chain-exact",
        f64::from(u8::from(exact_first)),
    ));
    report.results.push(NamedValue::plain(
        "second-chain-exact",
        f64::from(u8::from(exact_second)),
    ));
    report.results.push(NamedValue::plain(
        "first-beta-limit",
        first.beta_limit.to_f64().unwrap_or(f64::NAN),
    ));
    report
        .results
        .push(NamedValue::plain("second-steps", second.k0 as f64));
    report.verdict = Verdict::from_bool(exact_first && exact_second);
    report.tables.push(table);
    Ok(report)
}

/// Extrapolation exponent identities plus a numeric spot instance: the
/// one-variable target is exact, composition of two extrapolation steps
/// matches the direct step, the endpoint target is rejected, the graded
/// defect bookkeeping matches hand-derived values, the slot-duality map is
/// an involution, the multilinear source/target pair is admissible, and an
/// off-diagonal maximal instance scans stably.
pub(crate) fn extrapolation_spot(seed: u64) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("extrapolation-spot");
    report.params = serde_json::json!({
        "one_variable": {"source": ["2", "4", "3"], "p": "5/2", "expected": ["20/3", "30/7"]},
        "stepwise": {"second_p": "10/3", "expected": ["20", "15/2"]},
        "endpoint_p": "4",
        "graded": {"p": ["2", "2"], "q": "2", "r": ["3/2", "3/2", "7/6"],
                    "expected": {"delta": ["6", "6", "14/5"], "kappa": "29/42",
                                  "rho": "21/11", "theta": ["21/11"]}},
        "multilinear": {"p": ["2", "2"], "q": "2", "p_star": ["3", "3"], "q_star": "6",
                         "r": ["3/2", "3/2", "7/6"]},
        "numeric": {"d": 1, "l": 1.0, "alpha": "3/5", "p": "5/4", "q": "5",
                     "weight": "|x|^(1/20)", "resolutions": [256, 512]},
    });

    // One-variable extrapolation target, exactly.
    let (q1, t1) = one_var_extrapolation(&xr(2, 1), &xr(4, 1), &xr(3, 1), &xr(5, 2))?;
    let one_var_ok = q1 == xr(20, 3) && t1 == xr(30, 7);

    // Composing two steps agrees with the direct step.
    let (q2, t2) = one_var_extrapolation(&xr(5, 2), &q1, &t1, &xr(10, 3))?;
    let (q2d, t2d) = one_var_extrapolation(&xr(2, 1), &xr(4, 1), &xr(3, 1), &xr(10, 3))?;
    let stepwise_ok = q2 == q2d && t2 == t2d && q2 == xr(20, 1) && t2 == xr(15, 2);

    // The endpoint source exponent produces no positive target.
    let endpoint_rejected =
        one_var_extrapolation(&xr(2, 1), &xr(4, 1), &xr(3, 1), &xr(4, 1)).is_err();

    // Graded defect bookkeeping on a two-slot system.
    let system = ExponentSystem::new(vec![xr(2, 1), xr(2, 1)], xr(2, 1))?
        .with_grading(vec![xr(3, 2), xr(3, 2), xr(7, 6)])?;
    let deltas = derived_deltas(&system)?;
    let graded_ok = deltas.delta == vec![ExtReal::from_int(6), ExtReal::from_int(6), xr(14, 5)]
        && deltas.kappa == rat(29, 42)
        && deltas.rho == xr(21, 11)
        && deltas.theta == vec![xr(21, 11)];

    // Slot duality is an involution.
    let p = [xr(3, 2), xr(3, 1)];
    let q = xr(2, 1);
    let (p_star, q_star) = dual_tuple(&p, &q, 0)?;
    let (p_back, q_back) = dual_tuple(&p_star, &q_star, 0)?;
    let duality_ok = p_back == p && q_back == q;

    // Multilinear source/target admissibility.
    let mt = multilinear_target_check(
        &[xr(2, 1), xr(2, 1)],
        &xr(2, 1),
        &[xr(3, 1), xr(3, 1)],
        &xr(6, 1),
        &[xr(3, 2), xr(3, 2), xr(7, 6)],
    )?;

    // Numeric spot instance of the off-diagonal maximal bound.
    let ns = [256usize, 512];
    let mut samples = Vec::new();
    let mut keep = None;
    for &n in &ns {
        let grid = make_grid(1, 1.0, n)?;
        let family = full_family(&grid)?;
        let v = power_weight(&grid, 0.05, &[0.0], None)?;
        let v5 = v.pow(5.0)?;
        let v54 = v.pow(1.25)?;
        let probes = probe_family(&grid, seed)?;
        let mut stage = Vec::new();
        for f in &probes {
            let m = fractional_maximal(f, 0.6, 1.0, &family)?;
            stage.push(RatioSample {
                lhs: lebesgue_norm(&m, 5.0, Some(&v5))?,
                rhs: lebesgue_norm(f, 1.25, Some(&v54))?,
            });
        }
        samples.push(stage);
        keep = Some((grid, family));
    }
    let (grid, family) = keep.unwrap();
    let scan = ratio_scan(
        "offdiagonal-maximal-ratio",
        &n_labels(&ns),
        &probe_label_strings(8),
        &samples,
    )?;

    let exact_ok = one_var_ok && stepwise_ok && endpoint_rejected && graded_ok && duality_ok;
    report.results.push(NamedValue::plain(
        "exact-identities",
        f64::from(u8::from(exact_ok)),
    ));
    report.results.push(NamedValue::plain(
        "multilinear-admissible",
        f64::from(u8::from(mt.ok)),
    ));
    report
        .results
        .push(NamedValue::plain("numeric-final-drift", scan.final_drift()));
    report.verdict = Verdict::from_bool(exact_ok)
        .and(Verdict::from_bool(mt.ok))
        .and(scan.stability_verdict());
    attach_geometry(&mut report, &grid, Some(&family));
    report.tables.push(scan.table);
    Ok(report)
}
