//! Exact rational exponent calculus.
//!
//! Everything here is computed over the rationals extended with a single
//! point +∞; no floating point enters this module. Exponents are handled in
//! inverse space wherever possible: an exponent `p ∈ (0, ∞]` is carried as
//! `1/p ∈ [0, ∞)`, which makes Hölder bookkeeping additive, keeps `1/∞ = 0`
//! exact, and lets a target exponent `q ∈ (0, 1]` carry its raw conjugate
//! `1/q' = 1 − 1/q ≤ 0` without a sign restriction.
//!
//! Conventions:
//! * the conjugate of 1 is ∞ and the conjugate of ∞ is 1;
//! * an m-tuple `p⃗` has the Hölder aggregate `1/p = Σ 1/p_i`;
//! * a grading tuple `r⃗ = (r_1, …, r_{m+1})` pairs its first m slots with
//!   `p⃗` and its last slot with the target `q` through
//!   `1/δ_{m+1} = 1/r_{m+1} + 1/q − 1`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

// ─── rational helpers ───────────────────────────────────────────────────────

/// Exact rational `n/d`. Panics if `d == 0`; use only with literal inputs.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact integer rational.
pub fn rat_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Parse an exact rational from `"num/den"`, an integer, or a finite
/// decimal (decimals are exact: `a.b = (a·10^k + b)/10^k`).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let num = BigInt::from_str(n.trim())
            .map_err(|e| Error::Parse(format!("bad numerator {n:?}: {e}")))?;
        let den = BigInt::from_str(d.trim())
            .map_err(|e| Error::Parse(format!("bad denominator {d:?}: {e}")))?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        // Finite decimals are exact rationals: a.b = (a*10^k + b) / 10^k.
        let sign = if int_part.trim_start().starts_with('-') { -1 } else { 1 };
        let int_digits = int_part.trim().trim_start_matches(['-', '+']);
        let int_val = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_digits)
                .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let frac_val = BigInt::from_str(frac_part)
            .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let unsigned = BigRational::new(int_val * &scale + frac_val, scale);
        return Ok(if sign < 0 { -unsigned } else { unsigned });
    }
    let num =
        BigInt::from_str(s).map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?;
    Ok(BigRational::from_integer(num))
}

/// Render a rational as `num/den`, eliding a unit denominator.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

// ─── extended reals ─────────────────────────────────────────────────────────

/// A rational extended with +∞. The finite payload may be negative: raw
/// conjugates of exponents below 1 are stored as-is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtReal {
    Finite(BigRational),
    Infinity,
}

impl ExtReal {
    pub fn from_int(n: i64) -> Self {
        ExtReal::Finite(rat_int(n))
    }

    pub fn from_pair(n: i64, d: i64) -> Self {
        ExtReal::Finite(rat(n, d))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, ExtReal::Finite(r) if r.is_one())
    }

    /// The inverse as a plain rational, with `1/∞ = 0`. Errors on 1/0.
    pub fn inv(&self) -> Result<BigRational> {
        match self {
            ExtReal::Infinity => Ok(BigRational::zero()),
            ExtReal::Finite(r) if r.is_zero() => {
                Err(Error::Exponent("reciprocal of zero".into()))
            }
            ExtReal::Finite(r) => Ok(r.recip()),
        }
    }

    /// The extended real with the given inverse; `0 ↦ ∞`.
    pub fn from_inv(inv: &BigRational) -> Self {
        if inv.is_zero() {
            ExtReal::Infinity
        } else {
            ExtReal::Finite(inv.recip())
        }
    }

    /// Hölder conjugate via `1/x' = 1 − 1/x`. For x < 1 the raw (negative)
    /// value is returned unchanged, for use inside defect computations only.
    pub fn conjugate(&self) -> Result<ExtReal> {
        let inv = self.inv()?;
        Ok(ExtReal::from_inv(&(BigRational::one() - inv)))
    }

    /// Nearest f64, with ∞ mapping to `f64::INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Infinity => f64::INFINITY,
            ExtReal::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn ge_int(&self, n: i64) -> bool {
        match self {
            ExtReal::Infinity => true,
            ExtReal::Finite(r) => *r >= rat_int(n),
        }
    }

    fn gt_int(&self, n: i64) -> bool {
        match self {
            ExtReal::Infinity => true,
            ExtReal::Finite(r) => *r > rat_int(n),
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
            (ExtReal::Infinity, _) => Ordering::Greater,
            (_, ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Infinity => write!(f, "inf"),
            ExtReal::Finite(r) => write!(f, "{}", format_rational(r)),
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "∞" || t.eq_ignore_ascii_case("infinity") {
            return Ok(ExtReal::Infinity);
        }
        Ok(ExtReal::Finite(parse_rational(t)?))
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serialize a `BigRational` as its `num/den` string (used in report JSON).
pub fn serialize_rational<S: Serializer>(
    r: &BigRational,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&format_rational(r))
}

/// Serialize a `Vec<BigRational>` as `num/den` strings.
pub fn serialize_rationals<S: Serializer>(
    rs: &[BigRational],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = serializer.serialize_seq(Some(rs.len()))?;
    for r in rs {
        seq.serialize_element(&format_rational(r))?;
    }
    seq.end()
}

// ─── exponent systems ───────────────────────────────────────────────────────

/// An m-tuple of source exponents with a target exponent and an optional
/// grading tuple of length m+1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentSystem {
    /// Source exponents `p_1..p_m`, each in [1, ∞].
    pub p: Vec<ExtReal>,
    /// Target exponent, in (0, ∞].
    pub q: ExtReal,
    /// Grading tuple `r_1..r_{m+1}`, each in [1, ∞].
    pub r: Option<Vec<ExtReal>>,
}

impl ExponentSystem {
    pub fn new(p: Vec<ExtReal>, q: ExtReal) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Exponent("empty exponent tuple".into()));
        }
        for (i, pi) in p.iter().enumerate() {
            if !pi.ge_int(1) {
                return Err(Error::Exponent(format!("p_{} = {} is below 1", i + 1, pi)));
            }
        }
        match &q {
            ExtReal::Infinity => {}
            ExtReal::Finite(v) if v.is_positive() => {}
            other => {
                return Err(Error::Exponent(format!("target q = {other} must be positive")));
            }
        }
        Ok(ExponentSystem { p, q, r: None })
    }

    pub fn with_grading(mut self, r: Vec<ExtReal>) -> Result<Self> {
        if r.len() != self.p.len() + 1 {
            return Err(Error::Exponent(format!(
                "grading tuple has {} slots, expected {}",
                r.len(),
                self.p.len() + 1
            )));
        }
        for (i, ri) in r.iter().enumerate() {
            if !ri.ge_int(1) {
                return Err(Error::Exponent(format!("r_{} = {} is below 1", i + 1, ri)));
            }
        }
        self.r = Some(r);
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.p.len()
    }

    /// `1/p = Σ 1/p_i`.
    pub fn holder_inverse(&self) -> Result<BigRational> {
        let mut acc = BigRational::zero();
        for pi in &self.p {
            acc += pi.inv()?;
        }
        Ok(acc)
    }
}

/// Outcome of a named multi-condition test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub ok: bool,
    /// Human-readable descriptions of every failed condition.
    pub failures: Vec<String>,
}

impl Verdict {
    fn from_failures(failures: Vec<String>) -> Self {
        Verdict { ok: failures.is_empty(), failures }
    }
}

/// Per-slot defect exponents and their aggregates for a graded system.
///
/// `1/δ_i = 1/r_i − 1/p_i` for the m source slots and
/// `1/δ_{m+1} = 1/r_{m+1} + 1/q − 1` for the target slot. The aggregate
/// `κ = Σ 1/δ_i` always equals `1/r − 1/p − 1/q'` and must be positive.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedExponents {
    #[serde(serialize_with = "serialize_rationals")]
    pub delta_inv: Vec<BigRational>,
    pub delta: Vec<ExtReal>,
    #[serde(serialize_with = "serialize_rational")]
    pub kappa: BigRational,
    /// `1/ϱ = 1/δ_m + 1/δ_{m+1}`.
    pub rho: ExtReal,
    /// `1/θ_i = κ − 1/δ_i` for `i = 1..m−1`.
    pub theta: Vec<ExtReal>,
}

fn slot_defect_invs(system: &ExponentSystem) -> Result<Vec<BigRational>> {
    let r = system
        .r
        .as_ref()
        .ok_or_else(|| Error::Exponent("grading tuple required".into()))?;
    let m = system.m();
    let q_inv = system.q.inv()?;
    let mut out = Vec::with_capacity(m + 1);
    for i in 0..m {
        out.push(r[i].inv()? - system.p[i].inv()?);
    }
    out.push(r[m].inv()? + &q_inv - BigRational::one());
    Ok(out)
}

/// Check `r⃗ ⪯ (p⃗, q)` (or the strict variant `≺`): the first m grading
/// slots satisfy `r_i ≤ p_i` (strict: `<`), and the target slot satisfies
/// `r'_{m+1} > q`, i.e. `1/r_{m+1} + 1/q − 1 > 0`, which is strict either way.
pub fn admissible(system: &ExponentSystem, strict: bool) -> Result<Verdict> {
    let defects = slot_defect_invs(system)?;
    let m = system.m();
    let mut failures = Vec::new();
    for (i, d) in defects.iter().take(m).enumerate() {
        if strict {
            if !d.is_positive() {
                failures.push(format!(
                    "slot {}: need r_{} < p_{} (defect 1/δ = {})",
                    i + 1,
                    i + 1,
                    i + 1,
                    format_rational(d)
                ));
            }
        } else if d.is_negative() {
            failures.push(format!(
                "slot {}: need r_{} <= p_{} (defect 1/δ = {})",
                i + 1,
                i + 1,
                i + 1,
                format_rational(d)
            ));
        }
    }
    if !defects[m].is_positive() {
        failures.push(format!(
            "target slot: need r'_{} > q (defect 1/δ = {})",
            m + 1,
            format_rational(&defects[m])
        ));
    }
    Ok(Verdict::from_failures(failures))
}

/// Defect exponents of an admissible graded system.
pub fn derived_deltas(system: &ExponentSystem) -> Result<DerivedExponents> {
    let verdict = admissible(system, false)?;
    if !verdict.ok {
        return Err(Error::Exponent(format!(
            "inadmissible grading: {}",
            verdict.failures.join("; ")
        )));
    }
    let delta_inv = slot_defect_invs(system)?;
    let m = system.m();

    let kappa: BigRational = delta_inv.iter().sum();
    // Identity check: κ = 1/r − 1/p − 1/q' with 1/q' = 1 − 1/q.
    let r = system.r.as_ref().unwrap();
    let mut r_inv = BigRational::zero();
    for ri in r {
        r_inv += ri.inv()?;
    }
    let qc_inv = BigRational::one() - system.q.inv()?;
    debug_assert_eq!(kappa, &r_inv - system.holder_inverse()? - qc_inv);
    if !kappa.is_positive() {
        return Err(Error::Exponent(format!(
            "aggregate defect κ = {} is not positive",
            format_rational(&kappa)
        )));
    }

    let rho_inv = &delta_inv[m - 1] + &delta_inv[m];
    let delta: Vec<ExtReal> = delta_inv.iter().map(ExtReal::from_inv).collect();
    let theta: Vec<ExtReal> = (0..m.saturating_sub(1))
        .map(|i| ExtReal::from_inv(&(&kappa - &delta_inv[i])))
        .collect();

    Ok(DerivedExponents {
        delta_inv,
        delta,
        kappa,
        rho: ExtReal::from_inv(&rho_inv),
        theta,
    })
}

// ─── extrapolation and duality ──────────────────────────────────────────────

/// One-variable extrapolation target: from a known source triple
/// `(p₀, q₀, t₀)` and a new source exponent `p`, the target pair is
/// `1/q = 1/q₀ + 1/p − 1/p₀` and `1/t = 1/t₀ + 1/p − 1/p₀`.
/// Errors if either resulting inverse fails to be positive.
pub fn one_var_extrapolation(
    p0: &ExtReal,
    q0: &ExtReal,
    t0: &ExtReal,
    p: &ExtReal,
) -> Result<(ExtReal, ExtReal)> {
    let shift = p.inv()? - p0.inv()?;
    let q_inv = q0.inv()? + &shift;
    let t_inv = t0.inv()? + &shift;
    if !q_inv.is_positive() {
        return Err(Error::Exponent(format!(
            "extrapolated target 1/q = {} is not positive",
            format_rational(&q_inv)
        )));
    }
    if !t_inv.is_positive() {
        return Err(Error::Exponent(format!(
            "extrapolated target 1/t = {} is not positive",
            format_rational(&t_inv)
        )));
    }
    Ok((ExtReal::from_inv(&q_inv), ExtReal::from_inv(&t_inv)))
}

/// Dual exponent tuple at slot `i` (0-based): replace `p_i` by `q'` and
/// retarget to `p_i'`. Applying the map twice at the same slot is the
/// identity. Requires `1 < p_i < ∞` and `1 ≤ q ≤ ∞`.
pub fn dual_tuple(p: &[ExtReal], q: &ExtReal, i: usize) -> Result<(Vec<ExtReal>, ExtReal)> {
    if i >= p.len() {
        return Err(Error::Exponent(format!(
            "slot {} out of range for an {}-tuple",
            i,
            p.len()
        )));
    }
    if !p[i].gt_int(1) || p[i].is_infinite() {
        return Err(Error::Exponent(format!(
            "dual slot requires 1 < p_{} < ∞, got {}",
            i + 1,
            p[i]
        )));
    }
    if !q.ge_int(1) {
        return Err(Error::Exponent(format!("dual requires q ≥ 1, got {q}")));
    }
    let mut dual = p.to_vec();
    dual[i] = q.conjugate()?;
    let target = p[i].conjugate()?;
    Ok((dual, target))
}

// ─── off-diagonal iteration chain ───────────────────────────────────────────

/// One step of the off-diagonal chain: smoothing order `β_k`, target
/// exponent `q_k`, and inner exponent `s_k`.
#[derive(Debug, Clone, Serialize)]
pub struct ChainEntry {
    #[serde(serialize_with = "serialize_rational")]
    pub beta: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub q: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub s: BigRational,
}

/// The full iteration chain with its stopping index and limit order.
#[derive(Debug, Clone, Serialize)]
pub struct OffdiagonalChain {
    pub entries: Vec<ChainEntry>,
    /// 1-based index of the final step (the first k with `β_k ≥ 2α − d`).
    pub k0: usize,
    /// `lim_k β_k = 3α/2 − d/2`.
    #[serde(serialize_with = "serialize_rational")]
    pub beta_limit: BigRational,
}

/// Build the off-diagonal iteration chain for dimension `d`, order `α`,
/// initial smoothing `β`, source exponent `p`, and inner exponent `s`.
///
/// The chain is
/// `β_k = β + (3α/2 − d/2 − β)(1 − 2^{1−k})`,
/// `1/q_k = 1/p − β_k/d`,
/// `1/s_k = 1/s − (β_k − β)/d + (1 − 2^{1−k})((α − β)/d − 1/s)`,
/// stopping at the first `k₀` with `α ≤ (d + β_{k₀})/2`. Every consecutive
/// pair is validated against the chain invariants
/// `0 ≤ β_k < β_{k+1} < α < d`,
/// `1 < p ≤ q_k < q_{k+1} < d/(β_{k+1} − β_k)`,
/// `1 ≤ s_k < d/(α − β_k)` with `1/s_k > 1/s_{k+1} + (β_{k+1} − β_k)/d`,
/// and the exact telescoping identity `2β_{k+1} − β_k = 3α/2 − d/2`;
/// any violation is an error rather than a silently wrong chain.
pub fn offdiagonal_chain(
    d: u32,
    alpha: &BigRational,
    beta: &BigRational,
    p: &BigRational,
    s: &BigRational,
) -> Result<OffdiagonalChain> {
    if d == 0 {
        return Err(Error::Exponent("dimension must be positive".into()));
    }
    let dd = rat_int(d as i64);
    let one = BigRational::one();
    if !alpha.is_positive() || *alpha >= dd {
        return Err(Error::Exponent(format!(
            "need 0 < α < d, got α = {}",
            format_rational(alpha)
        )));
    }
    if beta.is_negative() || beta > alpha {
        return Err(Error::Exponent(format!(
            "need 0 ≤ β ≤ α, got β = {}",
            format_rational(beta)
        )));
    }
    if *p <= one {
        return Err(Error::Exponent(format!("need p > 1, got {}", format_rational(p))));
    }
    // 1 ≤ s < d/(α − β), i.e. 1/s > (α − β)/d.
    if *s < one || s.recip() <= (alpha - beta) / &dd {
        return Err(Error::Exponent(format!(
            "need 1 ≤ s < d/(α−β), got s = {}",
            format_rational(s)
        )));
    }

    let beta_limit = alpha * rat(3, 2) - &dd / rat_int(2);
    let stop_threshold = alpha * rat_int(2) - &dd; // β_k ≥ 2α − d ⇔ α ≤ (d + β_k)/2
    let gap = &beta_limit - beta; // 3α/2 − d/2 − β
    let s_drift = (alpha - beta) / &dd - s.recip(); // (α − β)/d − 1/s, negative

    let entry_at = |k: usize| -> Result<ChainEntry> {
        // c_k = 1 − 2^{1−k} for k ≥ 1.
        let c_k = &one - rat(1, 1 << (k - 1));
        let beta_k = beta + &gap * &c_k;
        let q_inv = p.recip() - &beta_k / &dd;
        if !q_inv.is_positive() {
            return Err(Error::Exponent(format!(
                "chain step {k}: target inverse 1/q = {} is not positive \
                 (p too large for this α, β)",
                format_rational(&q_inv)
            )));
        }
        let s_inv = s.recip() - (&beta_k - beta) / &dd + &s_drift * &c_k;
        if !s_inv.is_positive() {
            return Err(Error::Exponent(format!(
                "chain step {k}: inner inverse 1/s = {} is not positive",
                format_rational(&s_inv)
            )));
        }
        Ok(ChainEntry { beta: beta_k, q: q_inv.recip(), s: s_inv.recip() })
    };

    let mut entries = vec![entry_at(1)?];
    // β_k increases strictly toward β_limit > 2α − d, so the stop is reached.
    while entries.last().unwrap().beta < stop_threshold {
        let k_next = entries.len() + 1;
        if k_next > 64 {
            return Err(Error::ChainInvariant(
                "chain failed to terminate within 64 steps".into(),
            ));
        }
        entries.push(entry_at(k_next)?);
    }
    let k0 = entries.len();

    // Invariant sweep over consecutive pairs.
    for k in 0..k0 {
        let e = &entries[k];
        if e.beta.is_negative() || e.beta >= *alpha {
            return Err(Error::ChainInvariant(format!(
                "step {}: β = {} escapes [0, α)",
                k + 1,
                format_rational(&e.beta)
            )));
        }
        if e.q < *p {
            return Err(Error::ChainInvariant(format!(
                "step {}: q = {} dropped below p",
                k + 1,
                format_rational(&e.q)
            )));
        }
        if e.s < one || e.s.recip() <= (alpha - &e.beta) / &dd {
            return Err(Error::ChainInvariant(format!(
                "step {}: s = {} escapes [1, d/(α−β_k))",
                k + 1,
                format_rational(&e.s)
            )));
        }
        if k + 1 < k0 {
            let n = &entries[k + 1];
            let dbeta = &n.beta - &e.beta;
            if !dbeta.is_positive() {
                return Err(Error::ChainInvariant(format!("step {}: β not increasing", k + 1)));
            }
            // 2β_{k+1} − β_k = 3α/2 − d/2 exactly.
            if &n.beta * rat_int(2) - &e.beta != beta_limit {
                return Err(Error::ChainInvariant(format!(
                    "step {}: telescoping identity 2β_(k+1) − β_k = 3α/2 − d/2 failed",
                    k + 1
                )));
            }
            if n.q <= e.q || n.q.recip() <= &dbeta / &dd {
                return Err(Error::ChainInvariant(format!(
                    "step {}: need q_k < q_(k+1) < d/Δβ",
                    k + 1
                )));
            }
            if e.s.recip() <= n.s.recip() + &dbeta / &dd {
                return Err(Error::ChainInvariant(format!(
                    "step {}: need 1/s_k > 1/s_(k+1) + Δβ/d",
                    k + 1
                )));
            }
        }
    }

    Ok(OffdiagonalChain { entries, k0, beta_limit })
}

// ─── characterization indices ───────────────────────────────────────────────

/// How one slot of a weight vector embeds into a classical weight class.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum SlotIndex {
    /// `w_i^{−p_i'}` lands in the Muckenhoupt class with this index.
    Standard {
        #[serde(serialize_with = "serialize_rational")]
        index: BigRational,
    },
    /// Degenerate slot: `w^{power}` lands in the first-order class instead.
    FirstOrder {
        #[serde(serialize_with = "serialize_rational")]
        power: BigRational,
    },
}

/// The full family of classical indices induced by a multilinear system.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterizationIndices {
    /// Index for each source slot.
    pub slot: Vec<SlotIndex>,
    /// Index for the product weight (`w^q`, or the first-order form at q=∞).
    pub product: SlotIndex,
    /// Index for the inverse partial weight, present when requested.
    pub partial: Option<SlotIndex>,
    /// For each pivot slot j, the inner Hölder tuple `s⃗` (None when the
    /// pivot denominator is not positive). Entries may be ∞.
    pub s_system: Vec<Option<Vec<ExtReal>>>,
    /// Slots or product entries whose index fails to exceed 1; checks on
    /// these are reported and skipped downstream.
    pub flagged: Vec<String>,
}

/// Classical-class indices induced by `(p⃗, q)`, with the partial-weight
/// variants when `with_partial` is set (every occurrence of the slot count m
/// is then replaced by m+1 and the inverse partial weight gets its own
/// index `m + 1 + 1/q − 1/p`).
pub fn characterization_indices(
    p: &[ExtReal],
    q: &ExtReal,
    with_partial: bool,
) -> Result<CharacterizationIndices> {
    if p.is_empty() {
        return Err(Error::Exponent("empty exponent tuple".into()));
    }
    for (i, pi) in p.iter().enumerate() {
        if !pi.ge_int(1) {
            return Err(Error::Exponent(format!("p_{} = {} is below 1", i + 1, pi)));
        }
    }
    let m = p.len();
    let m_eff = rat_int(if with_partial { m as i64 + 1 } else { m as i64 });
    let q_inv = q.inv()?;
    if q_inv.is_negative() {
        return Err(Error::Exponent("target q must be positive".into()));
    }
    let mut p_inv = BigRational::zero();
    for pi in p {
        p_inv += pi.inv()?;
    }
    let one = BigRational::one();
    let mut flagged = Vec::new();

    // Slot indices: σ_i = m·p_i' + p_i'/q − p_i'/p, or the first-order power
    // 1/(m + 1/q − 1/p) when p_i = 1.
    let base = &m_eff + &q_inv - &p_inv; // m + 1/q − 1/p
    let mut slot = Vec::with_capacity(m);
    for (i, pi) in p.iter().enumerate() {
        if pi.is_one() {
            if !base.is_positive() {
                return Err(Error::Exponent(format!(
                    "slot {}: first-order power denominator {} not positive",
                    i + 1,
                    format_rational(&base)
                )));
            }
            slot.push(SlotIndex::FirstOrder { power: base.recip() });
        } else {
            let pc_inv = &one - pi.inv()?; // 1/p_i'
            let pc = pc_inv.recip(); // p_i'
            let index = &m_eff * &pc + &pc * &q_inv - &pc * &p_inv;
            if index <= one {
                flagged.push(format!("slot {} index {} ≤ 1", i + 1, format_rational(&index)));
            }
            slot.push(SlotIndex::Standard { index });
        }
    }

    // Product index: mq + 1 − q/p, or the first-order power −1/(m − 1/p) at q=∞.
    let product = if q.is_infinite() {
        let denom = &m_eff - &p_inv;
        if !denom.is_positive() {
            return Err(Error::Exponent(
                "product first-order power denominator not positive".into(),
            ));
        }
        SlotIndex::FirstOrder { power: -denom.recip() }
    } else {
        let qv = q_inv.recip();
        let index = &m_eff * &qv + &one - &qv * &p_inv;
        if index <= one {
            flagged.push(format!("product index {} ≤ 1", format_rational(&index)));
        }
        SlotIndex::Standard { index }
    };

    // Partial index: m + 1 + 1/q − 1/p on the inverse partial weight
    // (m_eff is already m + 1 when the partial slot is present).
    let partial = if with_partial {
        let index = &m_eff + &q_inv - &p_inv;
        if index <= one {
            flagged.push(format!("partial index {} ≤ 1", format_rational(&index)));
        }
        Some(SlotIndex::Standard { index })
    } else {
        None
    };

    // Inner Hölder tuples: pivot j gives λ_j = 1/(m − 1 + 1/p_j + 1/q − 1/p),
    // then 1/s_j = λ_j/q and 1/s_i = λ_j/p_i' for i ≠ j.
    let mut s_system = Vec::with_capacity(m);
    for j in 0..m {
        let denom = &m_eff - &one + p[j].inv()? + &q_inv - &p_inv;
        if !denom.is_positive() {
            s_system.push(None);
            continue;
        }
        let lambda = denom.recip();
        let mut tuple = Vec::with_capacity(m);
        let mut total = BigRational::zero();
        for (i, pi) in p.iter().enumerate() {
            let s_inv = if i == j {
                &lambda * &q_inv
            } else {
                let pc_inv = &one - pi.inv()?;
                &lambda * &pc_inv
            };
            total += &s_inv;
            tuple.push(ExtReal::from_inv(&s_inv));
        }
        if with_partial {
            // The partial slot behaves like an extra p = ∞ slot: 1/p' = 1.
            let s_inv = lambda.clone();
            total += &s_inv;
            tuple.push(ExtReal::from_inv(&s_inv));
        }
        debug_assert!(total == one, "inner Hölder tuple must sum to one");
        s_system.push(Some(tuple));
    }

    Ok(CharacterizationIndices { slot, product, partial, s_system, flagged })
}

// ─── factorization exponents ────────────────────────────────────────────────

/// Which ordering of `(p, p₀, r, r₀, γ)` a factorization instance falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FactorizationCase {
    /// `p ≤ p₀`, `r < r₀`, `γ ≤ 1`.
    I,
    /// `p ≤ p₀`, `r < r₀`, `γ > 1`.
    II,
    /// `p₀ < p`, `r₀ < r`, `γ ≤ 1`.
    III,
    /// `p₀ < p`, `r₀ < r`, `γ > 1`.
    IV,
    /// `p = p₀` and `r = r₀`: the composite weight is `w` itself.
    Degenerate,
}

/// Exact exponents for a factorization instance.
#[derive(Debug, Clone, Serialize)]
pub struct FactorizationExponents {
    /// `γ = 1/r + 1/p'`.
    #[serde(serialize_with = "serialize_rational")]
    pub gamma: BigRational,
    pub case: FactorizationCase,
    /// Exponent of the auxiliary weight μ in the composite weight.
    #[serde(serialize_with = "serialize_rational")]
    pub mu_exponent: BigRational,
    /// Exponent of w in the composite weight.
    #[serde(serialize_with = "serialize_rational")]
    pub w_exponent: BigRational,
    /// Whether `1/p − 1/p₀ = 1/r − 1/r₀` (required by the statement; the
    /// exponents are still computable without it).
    pub consistent: bool,
}

/// Composite-weight exponents for the factorization construction.
///
/// Cases with `r < r₀` use `μ^{γ(r−r₀)/r₀} w^{r/r₀}`; cases with `r₀ < r`
/// use `μ^{γ(r−r₀)/((rγ−1)r₀)} w^{r(r₀γ−1)/((rγ−1)r₀)}`.
pub fn factorization_exponents(
    p: &ExtReal,
    p0: &ExtReal,
    r: &BigRational,
    r0: &BigRational,
) -> Result<FactorizationExponents> {
    if !p.ge_int(1) || !p0.ge_int(1) {
        return Err(Error::Exponent("need p, p₀ ≥ 1".into()));
    }
    if !r.is_positive() || !r0.is_positive() {
        return Err(Error::Exponent("need r, r₀ > 0".into()));
    }
    let one = BigRational::one();
    let p_inv = p.inv()?;
    let p0_inv = p0.inv()?;
    let gamma = r.recip() + &one - &p_inv; // 1/r + 1/p'
    let consistent = &p_inv - &p0_inv == r.recip() - r0.recip();

    let case = if p_inv == p0_inv && r == r0 {
        FactorizationCase::Degenerate
    } else if p_inv >= p0_inv && r < r0 {
        // p ≤ p₀ in direct order means 1/p ≥ 1/p₀.
        if gamma <= one {
            FactorizationCase::I
        } else {
            FactorizationCase::II
        }
    } else if p0_inv > p_inv && r0 < r {
        if gamma <= one {
            FactorizationCase::III
        } else {
            FactorizationCase::IV
        }
    } else {
        return Err(Error::Exponent(format!(
            "no factorization case matches p = {p}, p₀ = {p0}, r = {}, r₀ = {}",
            format_rational(r),
            format_rational(r0)
        )));
    };

    let (mu_exponent, w_exponent) = match case {
        FactorizationCase::Degenerate => (BigRational::zero(), one.clone()),
        FactorizationCase::I | FactorizationCase::II => {
            (&gamma * (r - r0) / r0, r / r0)
        }
        FactorizationCase::III | FactorizationCase::IV => {
            let r_gamma = r * &gamma - &one;
            if !r_gamma.is_positive() {
                return Err(Error::Exponent(
                    "composite exponent undefined: rγ − 1 must be positive (needs p > 1)".into(),
                ));
            }
            let denom = &r_gamma * r0;
            ((&gamma * (r - r0)) / &denom, (r * (r0 * &gamma - &one)) / &denom)
        }
    };

    Ok(FactorizationExponents { gamma, case, mu_exponent, w_exponent, consistent })
}

// ─── multilinear target admissibility ───────────────────────────────────────

/// Check a source/target pair of multilinear systems against a shared grading
/// tuple: the scaling balance `1/p − 1/q = 1/p* − 1/q*`, non-strict
/// admissibility of `r⃗` for the source, strict admissibility for the target,
/// the side condition `1/p > max{0, 1/q − 1}`, and `p*_i > 1` per slot.
pub fn multilinear_target_check(
    p: &[ExtReal],
    q: &ExtReal,
    p_star: &[ExtReal],
    q_star: &ExtReal,
    r: &[ExtReal],
) -> Result<Verdict> {
    if p.len() != p_star.len() {
        return Err(Error::Exponent(format!(
            "source tuple has {} slots but target has {}",
            p.len(),
            p_star.len()
        )));
    }
    let mut failures = Vec::new();

    let source = ExponentSystem::new(p.to_vec(), q.clone())?.with_grading(r.to_vec())?;
    let target = ExponentSystem::new(p_star.to_vec(), q_star.clone())?.with_grading(r.to_vec())?;

    let p_inv = source.holder_inverse()?;
    let ps_inv = target.holder_inverse()?;
    let q_inv = q.inv()?;
    let qs_inv = q_star.inv()?;
    if &p_inv - &q_inv != &ps_inv - &qs_inv {
        failures.push(format!(
            "scaling balance 1/p − 1/q = 1/p* − 1/q* fails ({} vs {})",
            format_rational(&(&p_inv - &q_inv)),
            format_rational(&(&ps_inv - &qs_inv))
        ));
    }

    let src = admissible(&source, false)?;
    if !src.ok {
        for f in src.failures {
            failures.push(format!("source grading: {f}"));
        }
    }
    let tgt = admissible(&target, true)?;
    if !tgt.ok {
        for f in tgt.failures {
            failures.push(format!("target grading: {f}"));
        }
    }

    if !p_inv.is_positive() || p_inv <= &q_inv - &BigRational::one() {
        failures.push(format!(
            "side condition 1/p > max(0, 1/q − 1) fails (1/p = {})",
            format_rational(&p_inv)
        ));
    }
    for (i, pi) in p_star.iter().enumerate() {
        if !pi.gt_int(1) {
            failures.push(format!("target slot {}: need p*_{} > 1, got {}", i + 1, i + 1, pi));
        }
    }

    Ok(Verdict::from_failures(failures))
}

// ─── tests ──────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    fn er(n: i64, d: i64) -> ExtReal {
        ExtReal::from_pair(n, d)
    }

    #[test]
    fn conjugate_endpoints() {
        assert_eq!(ExtReal::from_int(1).conjugate().unwrap(), ExtReal::Infinity);
        assert_eq!(ExtReal::Infinity.conjugate().unwrap(), ExtReal::from_int(1));
        assert_eq!(er(3, 2).conjugate().unwrap(), ExtReal::from_int(3));
        assert_eq!(ExtReal::from_int(2).conjugate().unwrap(), ExtReal::from_int(2));
        // Below 1 the raw conjugate is negative: 1/q' = 1 − 2 = −1.
        assert_eq!(er(1, 2).conjugate().unwrap(), ExtReal::from_int(-1));
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["3/2", "inf", "2", "-1", "7/3"] {
            let v: ExtReal = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        let v: ExtReal = "0.25".parse().unwrap();
        assert_eq!(v, er(1, 4));
        let v: ExtReal = "-0.5".parse().unwrap();
        assert_eq!(v, er(-1, 2));
        assert!("1/0".parse::<ExtReal>().is_err());
    }

    #[test]
    fn extrapolation_examples() {
        // (p₀, q₀, t₀) = (2, 2, 2), p = 3 → (q, t) = (3, 3).
        let (q, t) = one_var_extrapolation(
            &ExtReal::from_int(2),
            &ExtReal::from_int(2),
            &ExtReal::from_int(2),
            &ExtReal::from_int(3),
        )
        .unwrap();
        assert_eq!(q, ExtReal::from_int(3));
        assert_eq!(t, ExtReal::from_int(3));

        // (1, 2, 2), p = 2 pushes 1/q to 0: error, not a silent ∞.
        assert!(one_var_extrapolation(
            &ExtReal::from_int(1),
            &ExtReal::from_int(2),
            &ExtReal::from_int(2),
            &ExtReal::from_int(2),
        )
        .is_err());
    }

    #[test]
    fn dual_tuple_examples() {
        // m = 1: p⃗ = (2), q = 3, slot 1 → ((3/2), 2).
        let (dual, target) = dual_tuple(&[ExtReal::from_int(2)], &ExtReal::from_int(3), 0).unwrap();
        assert_eq!(dual, vec![er(3, 2)]);
        assert_eq!(target, ExtReal::from_int(2));

        // m = 2: p⃗ = (2, 4), q = 2, slot 2 → ((2, 2), 4/3).
        let (dual, target) = dual_tuple(
            &[ExtReal::from_int(2), ExtReal::from_int(4)],
            &ExtReal::from_int(2),
            1,
        )
        .unwrap();
        assert_eq!(dual, vec![ExtReal::from_int(2), ExtReal::from_int(2)]);
        assert_eq!(target, er(4, 3));
    }

    #[test]
    fn dual_tuple_is_an_involution() {
        let p = vec![ExtReal::from_int(2), ExtReal::from_int(4), er(7, 2)];
        let q = er(5, 2);
        for i in 0..p.len() {
            let (dual, target) = dual_tuple(&p, &q, i).unwrap();
            let (back, back_target) = dual_tuple(&dual, &target, i).unwrap();
            assert_eq!(back, p);
            assert_eq!(back_target, q);
        }
    }

    #[test]
    fn derived_deltas_examples() {
        // m = 1, r⃗ = (1,1), p⃗ = (2), q = 2 → δ⃗ = (2,2), κ = 1, ϱ = 1.
        let sys = ExponentSystem::new(vec![ExtReal::from_int(2)], ExtReal::from_int(2))
            .unwrap()
            .with_grading(vec![ExtReal::from_int(1), ExtReal::from_int(1)])
            .unwrap();
        let d = derived_deltas(&sys).unwrap();
        assert_eq!(d.delta, vec![ExtReal::from_int(2), ExtReal::from_int(2)]);
        assert_eq!(d.kappa, rat_int(1));
        assert_eq!(d.rho, ExtReal::from_int(1));

        // p⃗ = (∞), q = 1 → 1/δ₁ = 1, 1/δ₂ = 1, κ = 2.
        let sys = ExponentSystem::new(vec![ExtReal::Infinity], ExtReal::from_int(1))
            .unwrap()
            .with_grading(vec![ExtReal::from_int(1), ExtReal::from_int(1)])
            .unwrap();
        let d = derived_deltas(&sys).unwrap();
        assert_eq!(d.delta_inv, vec![rat_int(1), rat_int(1)]);
        assert_eq!(d.kappa, rat_int(2));
    }

    #[test]
    fn kappa_identity_holds_on_a_sweep() {
        // κ must equal 1/r − 1/p − 1/q' for every admissible combination.
        let pool = [er(1, 1), er(3, 2), er(2, 1), er(4, 1)];
        let qs = [er(1, 2), er(1, 1), er(2, 1), er(4, 1)];
        for p1 in &pool {
            for p2 in &pool {
                for q in &qs {
                    for r1 in &pool {
                        let sys = ExponentSystem::new(vec![p1.clone(), p2.clone()], q.clone())
                            .unwrap()
                            .with_grading(vec![r1.clone(), er(1, 1), er(1, 1)])
                            .unwrap();
                        let Ok(d) = derived_deltas(&sys) else { continue };
                        let r_inv = r1.inv().unwrap() + rat_int(2);
                        let p_inv = p1.inv().unwrap() + p2.inv().unwrap();
                        let qc_inv = rat_int(1) - q.inv().unwrap();
                        assert_eq!(d.kappa, r_inv - p_inv - qc_inv);
                    }
                }
            }
        }
    }

    #[test]
    fn admissibility_strictness() {
        // r_i = p_i passes the non-strict check and fails the strict one.
        let sys = ExponentSystem::new(vec![ExtReal::from_int(2)], ExtReal::from_int(2))
            .unwrap()
            .with_grading(vec![ExtReal::from_int(2), ExtReal::from_int(1)])
            .unwrap();
        assert!(admissible(&sys, false).unwrap().ok);
        let strict = admissible(&sys, true).unwrap();
        assert!(!strict.ok);
        assert_eq!(strict.failures.len(), 1);

        // q = ∞ makes the target slot inadmissible outright.
        let sys = ExponentSystem::new(vec![ExtReal::from_int(2)], ExtReal::Infinity)
            .unwrap()
            .with_grading(vec![ExtReal::from_int(1), ExtReal::from_int(1)])
            .unwrap();
        assert!(!admissible(&sys, false).unwrap().ok);
    }

    #[test]
    fn chain_example_matches_hand_computation() {
        // d = 1, α = 9/10, β = 1/5: limit 17/20, β₂ = 21/40, stop at k₀ = 5.
        let chain =
            offdiagonal_chain(1, &rat(9, 10), &rat(1, 5), &rat(10, 9), &rat(5, 4)).unwrap();
        assert_eq!(chain.beta_limit, rat(17, 20));
        assert_eq!(chain.k0, 5);
        assert_eq!(chain.entries[0].beta, rat(1, 5));
        assert_eq!(chain.entries[1].beta, rat(21, 40));
        // β₅ = 259/320 is the first value at or above 2α − d = 4/5.
        assert_eq!(chain.entries[4].beta, rat(259, 320));
        assert!(chain.entries[3].beta < rat(4, 5));
        // q₁ = 1/(1/p − β/d) = 1/(9/10 − 1/5) = 10/7.
        assert_eq!(chain.entries[0].q, rat(10, 7));
        // s₁ = s at the base step.
        assert_eq!(chain.entries[0].s, rat(5, 4));
    }

    #[test]
    fn chain_below_threshold_is_a_single_step() {
        // α ≤ (d + β)/2 already: the chain is just (β, q, s).
        let chain = offdiagonal_chain(1, &rat(1, 2), &rat(1, 5), &rat(3, 2), &rat(1, 1)).unwrap();
        assert_eq!(chain.k0, 1);
        assert_eq!(chain.entries[0].beta, rat(1, 5));
        // 1/q = 2/3 − 1/5 = 7/15.
        assert_eq!(chain.entries[0].q, rat(15, 7));
    }

    #[test]
    fn chain_rejects_bad_inputs() {
        assert!(offdiagonal_chain(1, &rat(11, 10), &rat(1, 5), &rat(10, 9), &rat(5, 4)).is_err());
        assert!(offdiagonal_chain(1, &rat(9, 10), &rat(-1, 5), &rat(10, 9), &rat(5, 4)).is_err());
        // s ≥ d/(α−β) = 10/7 is out of range.
        assert!(offdiagonal_chain(1, &rat(9, 10), &rat(1, 5), &rat(10, 9), &rat(10, 7)).is_err());
        // p too large: 1/p − β_k/d turns nonpositive before the stop index.
        assert!(offdiagonal_chain(1, &rat(9, 10), &rat(1, 5), &rat(2, 1), &rat(5, 4)).is_err());
    }

    #[test]
    fn characterization_m1_diagonal() {
        // m = 1, p⃗ = (2), q = 2: slot index 2, product index 2.
        let idx =
            characterization_indices(&[ExtReal::from_int(2)], &ExtReal::from_int(2), false)
                .unwrap();
        match &idx.slot[0] {
            SlotIndex::Standard { index } => assert_eq!(*index, rat_int(2)),
            other => panic!("unexpected slot form {other:?}"),
        }
        match &idx.product {
            SlotIndex::Standard { index } => assert_eq!(*index, rat_int(2)),
            other => panic!("unexpected product form {other:?}"),
        }
        assert!(idx.flagged.is_empty());
        // With one slot the inner tuple is the pivot alone: λ = 2, 1/s = λ/q = 1.
        let s = idx.s_system[0].as_ref().unwrap();
        assert_eq!(s, &vec![ExtReal::from_int(1)]);
    }

    #[test]
    fn characterization_m2_product_index() {
        // m = 2, p⃗ = (2,2), q = 4: product index mq + 1 − q/p = 5.
        let idx = characterization_indices(
            &[ExtReal::from_int(2), ExtReal::from_int(2)],
            &ExtReal::from_int(4),
            false,
        )
        .unwrap();
        match &idx.product {
            SlotIndex::Standard { index } => assert_eq!(*index, rat_int(5)),
            other => panic!("unexpected product form {other:?}"),
        }
    }

    #[test]
    fn characterization_first_order_forms() {
        // p_i = 1 → first-order power 1/(m + 1/q − 1/p).
        let idx =
            characterization_indices(&[ExtReal::from_int(1)], &ExtReal::from_int(2), false)
                .unwrap();
        match &idx.slot[0] {
            SlotIndex::FirstOrder { power } => assert_eq!(*power, rat(2, 1)),
            other => panic!("unexpected slot form {other:?}"),
        }
        // q = ∞ → product power −1/(m − 1/p).
        let idx =
            characterization_indices(&[ExtReal::from_int(2)], &ExtReal::Infinity, false).unwrap();
        match &idx.product {
            SlotIndex::FirstOrder { power } => assert_eq!(*power, rat(-2, 1)),
            other => panic!("unexpected product form {other:?}"),
        }
    }

    #[test]
    fn characterization_partial_shifts_slot_count() {
        let plain =
            characterization_indices(&[ExtReal::from_int(2)], &ExtReal::from_int(2), false)
                .unwrap();
        let partial =
            characterization_indices(&[ExtReal::from_int(2)], &ExtReal::from_int(2), true)
                .unwrap();
        let (SlotIndex::Standard { index: a }, SlotIndex::Standard { index: b }) =
            (&plain.slot[0], &partial.slot[0])
        else {
            panic!("expected standard indices");
        };
        // m ↦ m+1 raises the slot index by exactly p_i' = 2.
        assert_eq!(b - a, rat_int(2));
        let Some(SlotIndex::Standard { index }) = &partial.partial else {
            panic!("expected a partial index");
        };
        // m + 1 + 1/q − 1/p = 2 + 1/2 − 1/2 = 2.
        assert_eq!(*index, rat_int(2));
    }

    #[test]
    fn factorization_case_detection_and_exponents() {
        // (p, r) = (2, 1), (p₀, r₀) = (3, 3/2): γ = 3/2 lands in case II with
        // composite μ^{−1/2} w^{2/3}; the data is inconsistent with the
        // scaling relation and must be flagged as such.
        let fx = factorization_exponents(
            &ExtReal::from_int(2),
            &ExtReal::from_int(3),
            &rat_int(1),
            &rat(3, 2),
        )
        .unwrap();
        assert_eq!(fx.gamma, rat(3, 2));
        assert_eq!(fx.case, FactorizationCase::II);
        assert_eq!(fx.mu_exponent, rat(-1, 2));
        assert_eq!(fx.w_exponent, rat(2, 3));
        assert!(!fx.consistent);

        // Degenerate data reproduces w itself.
        let fx = factorization_exponents(
            &ExtReal::from_int(2),
            &ExtReal::from_int(2),
            &rat_int(1),
            &rat_int(1),
        )
        .unwrap();
        assert_eq!(fx.case, FactorizationCase::Degenerate);
        assert_eq!(fx.mu_exponent, rat_int(0));
        assert_eq!(fx.w_exponent, rat_int(1));

        // A consistent case I instance: p = 2 → p₀ = 3 with r = 2 → r₀ = 3.
        let fx = factorization_exponents(
            &ExtReal::from_int(2),
            &ExtReal::from_int(3),
            &rat_int(2),
            &rat_int(3),
        )
        .unwrap();
        assert_eq!(fx.case, FactorizationCase::I);
        assert_eq!(fx.gamma, rat_int(1));
        assert!(fx.consistent);
        assert_eq!(fx.mu_exponent, rat(-1, 3));
        assert_eq!(fx.w_exponent, rat(2, 3));

        // Transposed data lands in case III with the (rγ−1)r₀ denominators.
        let fx = factorization_exponents(
            &ExtReal::from_int(3),
            &ExtReal::from_int(2),
            &rat_int(3),
            &rat_int(2),
        )
        .unwrap();
        assert_eq!(fx.case, FactorizationCase::III);
        assert!(fx.consistent);
        // γ = 1, so μ-exponent γ(r−r₀)/((rγ−1)r₀) = 1/4.
        assert_eq!(fx.mu_exponent, rat(1, 4));
        assert_eq!(fx.w_exponent, rat(3, 4));

        // Mixed orderings match no case.
        assert!(factorization_exponents(
            &ExtReal::from_int(2),
            &ExtReal::from_int(3),
            &rat_int(3),
            &rat_int(2),
        )
        .is_err());
    }

    #[test]
    fn multilinear_target_check_names_failures() {
        let p = [ExtReal::from_int(2), ExtReal::from_int(2)];
        let p_star = [ExtReal::from_int(4), ExtReal::from_int(4)];
        let r = [ExtReal::from_int(1), ExtReal::from_int(1), ExtReal::from_int(1)];
        // Balanced: 1/p − 1/q = 1 − 1/2 = 1/2; target 1/2 − 0 ... pick q* so
        // that 1/p* − 1/q* = 1/2 with 1/p* = 1/2: q* = ∞ fails the strict
        // grading, so use q* = 4 and q = 4/3 instead: 1 − 3/4 = 1/4 = 1/2 − 1/4.
        let v = multilinear_target_check(&p, &er(4, 3), &p_star, &ExtReal::from_int(4), &r)
            .unwrap();
        assert!(v.ok, "failures: {:?}", v.failures);

        // Break the balance.
        let v = multilinear_target_check(&p, &er(4, 3), &p_star, &ExtReal::from_int(2), &r)
            .unwrap();
        assert!(!v.ok);
        assert!(v.failures.iter().any(|f| f.contains("scaling balance")));

        // Break strict target admissibility: r₁ = p*₁.
        let r_eq = [ExtReal::from_int(4), ExtReal::from_int(1), ExtReal::from_int(1)];
        let v = multilinear_target_check(&p, &er(4, 3), &p_star, &ExtReal::from_int(4), &r_eq)
            .unwrap();
        assert!(!v.ok);
        assert!(v.failures.iter().any(|f| f.contains("target grading")));
    }

    #[test]
    fn serde_uses_num_den_and_inf() {
        let sys = ExponentSystem::new(vec![er(3, 2), ExtReal::Infinity], ExtReal::from_int(2))
            .unwrap();
        let json = serde_json::to_string(&sys).unwrap();
        assert!(json.contains("\"3/2\""));
        assert!(json.contains("\"inf\""));
        let back: ExponentSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back.p, sys.p);
        assert_eq!(back.q, sys.q);
    }
}
