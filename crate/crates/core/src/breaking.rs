//! Symmetry-breaking witnesses from the two-block family `BIP_{a,b}`.
//!
//! `BIP_{a,b}` has two blocks of measure ½, value `a` inside each block and
//! `b` across, so `t(K_3, BIP_{a,b}) = ¼a³ + ¾ab²`. Choosing
//! `b(x) = √((4q³ − x³)/(3x))` keeps the triangle density exactly at `q³`,
//! which turns the search into the one-dimensional gap
//! `½I(x) + ½I(b(x)) − I(q)` on the admissible interval `[x_min, q]` where
//! `b(x_min)` equals the upper value (`p`, or `1` in the sparse problem).
//!
//! A negative gap proves the constant graphon is not a minimizer. Absence of
//! a witness only bounds the breaking region from one side.

use std::sync::OnceLock;

use serde::Serialize;

use crate::entropy::{xlogx, Entropy};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::kernel::{density, StepGraphon};
use crate::numeric::{bisect_predicate, minimize_seeded};

/// Gaps must fall below `-WITNESS_TOL` to count as breaking.
pub const WITNESS_TOL: f64 = 1e-10;
/// Grid size seeding the golden-section refinement.
pub const SEARCH_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `BIP_{0,p}` or `BIP_{0,1}`: zero triangle density.
    Trivial,
    /// Minimizer of the one-dimensional BIP gap.
    Bip,
    /// Critical sparse pair rescaled to a smaller `r`.
    Scaled,
}

#[derive(Debug, Clone, Serialize)]
pub struct BreakingWitness {
    #[serde(flatten)]
    pub graphon: StepGraphon,
    pub kind: WitnessKind,
    pub a: f64,
    pub b: f64,
    /// `I_p(q)` or `h(r)`.
    pub constant_value: f64,
    /// Entropy cost of the witness.
    pub witness_value: f64,
    pub margin: f64,
    /// `t(K_3, W)`.
    pub constraint_value: f64,
    pub entropy: Entropy,
}

impl BreakingWitness {
    fn new(entropy: Entropy, kind: WitnessKind, a: f64, b: f64, target: f64) -> Result<Self> {
        let constant_value = entropy.value(target);
        let witness_value = 0.5 * entropy.value(a) + 0.5 * entropy.value(b);
        Ok(Self {
            graphon: StepGraphon::bip(a, b)?,
            kind,
            a,
            b,
            constant_value,
            witness_value,
            margin: constant_value - witness_value,
            constraint_value: bip_triangle_density(a, b),
            entropy,
        })
    }

    /// Recomputes `(E[entropy(W)], t(K_3, W))` by block enumeration,
    /// independently of the closed forms used in the search.
    pub fn revalidate(&self) -> Result<(f64, f64)> {
        let ent = self.entropy;
        let cost = self.graphon.expect(|x| ent.value(x))?;
        let t = density(&Graph::complete(3)?, &self.graphon)?;
        Ok((cost, t))
    }
}

/// `t(K_3, BIP_{a,b}) = ¼a³ + ¾ab²`.
pub fn bip_triangle_density(a: f64, b: f64) -> f64 {
    0.25 * a * a * a + 0.75 * a * b * b
}

fn b_of(q: f64, x: f64) -> f64 {
    ((4.0 * q * q * q - x * x * x) / (3.0 * x)).sqrt()
}

/// Admissible interval `[x_min, q]` of the BIP gap: `b(x) ≤ upper` exactly
/// when `x ≥ x_min`, since `b` decreases from `+∞` to `q`.
pub fn admissible_interval(q: f64, upper: f64) -> (f64, f64) {
    if q >= upper {
        return (q, q);
    }
    let (_, x_min) = bisect_predicate(|x| b_of(q, x) > upper, 0.0, q, 1e-12 * q);
    (x_min, q)
}

fn gap_unchecked(ent: Entropy, q: f64, x: f64) -> f64 {
    let b = b_of(q, x).min(ent.upper_value());
    0.5 * ent.value(x) + 0.5 * ent.value(b) - ent.value(q)
}

fn checked_gap(ent: Entropy, q: f64, x: f64, what: &'static str) -> Result<f64> {
    let (lo, hi) = admissible_interval(q, ent.upper_value());
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain { what, x, lo, hi });
    }
    Ok(gap_unchecked(ent, q, x))
}

/// `½ I_p(x) + ½ I_p(b(x)) − I_p(q)` for `0 < q ≤ p < 1`.
pub fn bip_gap(p: f64, q: f64, x: f64) -> Result<f64> {
    if !(q > 0.0 && q <= p && p < 1.0) {
        return Err(invalid(format!(
            "need 0 < q <= p < 1, got p = {p}, q = {q}"
        )));
    }
    checked_gap(Entropy::FiniteP { p }, q, x, "bip gap")
}

/// `½ h(x) + ½ h(b(x)) − h(r)` for `0 < r ≤ 1`.
pub fn bip_gap_sparse(r: f64, x: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(invalid(format!("need 0 < r <= 1, got r = {r}")));
    }
    checked_gap(Entropy::Sparse, r, x, "sparse bip gap")
}

/// Seeded minimum `(x, gap)` of the BIP gap over its admissible interval.
pub fn bip_gap_minimum(ent: Entropy, q: f64) -> (f64, f64) {
    let (lo, hi) = admissible_interval(q, ent.upper_value());
    if hi - lo <= 0.0 {
        return (q, 0.0);
    }
    minimize_seeded(|x| gap_unchecked(ent, q, x), lo, hi, SEARCH_GRID)
}

fn bip_witness(ent: Entropy, q: f64) -> Option<BreakingWitness> {
    let (x, g) = bip_gap_minimum(ent, q);
    if g < -WITNESS_TOL {
        let b = b_of(q, x).min(ent.upper_value());
        BreakingWitness::new(ent, WitnessKind::Bip, x, b, q).ok()
    } else {
        None
    }
}

/// Searches for a BIP witness that `W ≡ q` does not minimize `LT_p(K_3, q)`.
/// `BIP_{0,p}` is tried first.
pub fn find_breaking(p: f64, q: f64) -> Result<Option<BreakingWitness>> {
    if !(q > 0.0 && q <= p && p < 1.0) {
        return Err(invalid(format!(
            "need 0 < q <= p < 1, got p = {p}, q = {q}"
        )));
    }
    let ent = Entropy::FiniteP { p };
    let trivial = BreakingWitness::new(ent, WitnessKind::Trivial, 0.0, p, q)?;
    if trivial.margin > WITNESS_TOL {
        return Ok(Some(trivial));
    }
    Ok(bip_witness(ent, q))
}

/// Sparse analogue of [`find_breaking`]: `BIP_{0,1}`, then the BIP gap, then
/// rescaling of the critical pair.
pub fn find_breaking_sparse(r: f64) -> Result<Option<BreakingWitness>> {
    if !(r > 0.0 && r < 1.0) {
        return Err(invalid(format!("need 0 < r < 1, got r = {r}")));
    }
    let ent = Entropy::Sparse;
    let trivial = BreakingWitness::new(ent, WitnessKind::Trivial, 0.0, 1.0, r)?;
    if trivial.margin > WITNESS_TOL {
        return Ok(Some(trivial));
    }
    if let Some(w) = bip_witness(ent, r) {
        return Ok(Some(w));
    }
    let crit = critical_triple();
    if r < crit.r {
        let w = scale_witness(crit, r)?;
        if w.margin > WITNESS_TOL {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// `(a₁, b₁, r₁)`: the largest `r₁` whose sparse BIP gap still dips below
/// zero, with the pair attaining the dip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalTriple {
    pub a: f64,
    pub b: f64,
    pub r: f64,
}

/// Cached critical triple; `r` is within `1e-9` of the supremum.
pub fn critical_triple() -> CriticalTriple {
    static CELL: OnceLock<CriticalTriple> = OnceLock::new();
    *CELL.get_or_init(compute_critical_triple)
}

fn compute_critical_triple() -> CriticalTriple {
    let dips = |r: f64| bip_gap_minimum(Entropy::Sparse, r).1 < -WITNESS_TOL;
    let (r, _) = bisect_predicate(dips, 0.15, 0.3, 1e-10);
    let (a, _) = bip_gap_minimum(Entropy::Sparse, r);
    CriticalTriple {
        a,
        b: b_of(r, a),
        r,
    }
}

/// Rescales a critical pair to `r ≤ r₁` with `s = r/r₁`. The margin comes
/// from the scaling identity `h(sx) = s h(x) + (s log s) x − s + 1`.
pub fn scale_witness(critical: CriticalTriple, r: f64) -> Result<BreakingWitness> {
    let CriticalTriple {
        a: a1,
        b: b1,
        r: r1,
    } = critical;
    let h = Entropy::Sparse;
    if (bip_triangle_density(a1, b1) - r1.powi(3)).abs() > 1e-10 {
        return Err(invalid(
            "critical pair does not meet the density constraint",
        ));
    }
    let base = 0.5 * h.value(a1) + 0.5 * h.value(b1) - h.value(r1);
    if base > 0.0 {
        return Err(invalid("critical pair does not beat the constant"));
    }
    if !(r > 0.0 && r <= r1) {
        return Err(invalid(format!("need 0 < r <= r1 = {r1}, got {r}")));
    }
    let s = r / r1;
    let (a, b) = (s * a1, s * b1);
    let mut w = BreakingWitness::new(h, WitnessKind::Scaled, a, b, r)?;
    w.margin = -(s * base + xlogx(s) * (0.5 * a1 + 0.5 * b1 - r1));
    w.witness_value = w.constant_value - w.margin;
    Ok(w)
}
