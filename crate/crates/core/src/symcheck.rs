//! Replica-symmetry certificates.
//!
//! Each checker verifies a tangent-line inequality `f(x) ≥ 0` whose validity
//! proves that the constant graphon is the unique minimizer. A failed check
//! is reported as [`Verdict::Inconclusive`]: the sufficient condition does not
//! hold, which says nothing about symmetry breaking.
//!
//! Where a one-point reduction is available (`p ≤ 1/2` for the triangle
//! lower tail, the sparse triangle condition at `x = 1`, the log-tangent at
//! `x = r^{m r^{-m}}`) the verdict comes from that single evaluation and the
//! grid is recorded as evidence. Otherwise the verdict comes from a guarded
//! grid scan: every grid cell gets a rigorous lower bound from a second-order
//! expansion with an explicit curvature bound, cells inside the convex
//! neighbourhood of the tangency point are covered by convexity, and the
//! log singularities at the ends of `[0,1]` are handled by geometrically
//! refined cells.

use serde::Serialize;

use crate::entropy::{xlogx, Entropy};
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

/// Recorded gaps below this count as violations.
pub const GAP_TOL: f64 = 1e-12;
/// Step of the uniform part of every evidence grid.
pub const GRID_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    Inconclusive,
}

/// Which inequality was tested, and how.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// Triangle lower tail tangent condition, decided at `x = p` (`p ≤ 1/2`).
    LtK3PointReduction,
    /// Triangle lower tail tangent condition, decided by the guarded grid.
    LtK3GuardedGrid,
    /// Triangle upper tail convex-minorant condition, guarded grid.
    UtK3ConvexMinorant,
    /// Sparse triangle lower tail tangent condition, decided at `x = 1`.
    LtHK3PointReduction,
    /// Sparse general-`H` log-tangent condition at `x = r^{m r^{-m}}`.
    LtHLogTangent,
}

/// The tangent-gap functions whose nonnegativity is checked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GapKind {
    /// `I_p(x) − I_p(q) + (I_p'(q)/2q)((2q−x)_+² − q²)`.
    LtK3 { p: f64, q: f64 },
    /// `I_p(y) − I_p(q) − (I_p'(q)/2q)(y² − q²)`, the convex-minorant
    /// condition written in the graphon value `y = √x`.
    UtK3 { p: f64, q: f64 },
    /// `h(x) − h(r) + (h'(r)/2r)((2r−x)_+² − r²)`.
    LtHK3 { r: f64 },
    /// `h(x) − h(r) − r h'(r)(log x − log r)`.
    HExp { r: f64 },
}

impl GapKind {
    /// Point where the gap and its derivative vanish.
    pub fn tangency(&self) -> f64 {
        match *self {
            GapKind::LtK3 { q, .. } | GapKind::UtK3 { q, .. } => q,
            GapKind::LtHK3 { r } | GapKind::HExp { r } => r,
        }
    }

    fn domain(&self) -> (f64, f64) {
        match *self {
            GapKind::HExp { .. } => (f64::MIN_POSITIVE, 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// Unchecked evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            GapKind::LtK3 { p, q } => {
                let ip = Entropy::FiniteP { p };
                let plus = (2.0 * q - x).max(0.0);
                ip.value(x) - ip.value(q) + ip.derivative(q) / (2.0 * q) * (plus * plus - q * q)
            }
            GapKind::UtK3 { p, q } => {
                let ip = Entropy::FiniteP { p };
                ip.value(x) - ip.value(q) - ip.derivative(q) / (2.0 * q) * (x * x - q * q)
            }
            GapKind::LtHK3 { r } => {
                let h = Entropy::Sparse;
                let plus = (2.0 * r - x).max(0.0);
                h.value(x) - h.value(r) + r.ln() / (2.0 * r) * (plus * plus - r * r)
            }
            GapKind::HExp { r } => {
                let h = Entropy::Sparse;
                h.value(x) - h.value(r) - xlogx(r) * (x.ln() - r.ln())
            }
        }
    }

    /// Unchecked first derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            GapKind::LtK3 { p, q } => {
                let ip = Entropy::FiniteP { p };
                ip.derivative(x) - ip.derivative(q) / q * (2.0 * q - x).max(0.0)
            }
            GapKind::UtK3 { p, q } => {
                let ip = Entropy::FiniteP { p };
                ip.derivative(x) - ip.derivative(q) / q * x
            }
            GapKind::LtHK3 { r } => x.ln() - r.ln() / r * (2.0 * r - x).max(0.0),
            GapKind::HExp { r } => x.ln() - xlogx(r) / x,
        }
    }

    /// Bounds `(min f'', max |f''|)` over the cell `[a, b]`, `0 < a < b`.
    fn curvature_bounds(&self, a: f64, b: f64) -> (f64, f64) {
        // 1/(x(1−x)) is convex with its minimum at 1/2
        let bern_max = |a: f64, b: f64| (1.0 / (a * (1.0 - a))).max(1.0 / (b * (1.0 - b)));
        let bern_min = |a: f64, b: f64| {
            let m = 0.5f64.clamp(a, b);
            1.0 / (m * (1.0 - m))
        };
        match *self {
            GapKind::LtK3 { p, q } => {
                let c = Entropy::FiniteP { p }.derivative(q) / q;
                let kink = if a < 2.0 * q { c.min(0.0) } else { 0.0 };
                let kink_hi = if a < 2.0 * q { c.abs() } else { 0.0 };
                (bern_min(a, b) + kink, bern_max(a, b) + kink_hi)
            }
            GapKind::UtK3 { p, q } => {
                let c = Entropy::FiniteP { p }.derivative(q) / q;
                (bern_min(a, b) - c, bern_max(a, b) + c.abs())
            }
            GapKind::LtHK3 { r } => {
                let c = r.ln() / r;
                let kink = if a < 2.0 * r { c.min(0.0) } else { 0.0 };
                (
                    1.0 / b + kink,
                    1.0 / a + if a < 2.0 * r { c.abs() } else { 0.0 },
                )
            }
            GapKind::HExp { r } => {
                let s = xlogx(r);
                // f'' = (x + r log r)/x²
                let lo = if a + s >= 0.0 {
                    (a + s) / (b * b)
                } else {
                    (a + s) / (a * a)
                };
                (lo, 1.0 / a + s.abs() / (a * a))
            }
        }
    }

    /// Crude bound on `|f'|` near a singular endpoint, used to cover the
    /// innermost cell `[0, x₁]` (or `[1 − x₁, 1]`).
    fn endpoint_slope_bound(&self, x1: f64) -> f64 {
        let log_term = x1.ln().abs();
        match *self {
            GapKind::LtK3 { p, q } | GapKind::UtK3 { p, q } => {
                let ip = Entropy::FiniteP { p };
                log_term + p.ln().abs() + (-p).ln_1p().abs() + 2.0 * ip.derivative(q).abs() + 2.0
            }
            GapKind::LtHK3 { r } => log_term + 2.0 * r.ln().abs() + 2.0,
            GapKind::HExp { .. } => f64::INFINITY,
        }
    }
}

/// Checked evaluation of a tangent gap.
pub fn tangent_gap(kind: GapKind, x: f64) -> Result<f64> {
    validate_kind(&kind)?;
    let (lo, hi) = kind.domain();
    if !(x >= lo && x <= hi) {
        return Err(Error::Domain {
            what: "tangent gap",
            x,
            lo,
            hi,
        });
    }
    Ok(kind.eval(x))
}

fn validate_kind(kind: &GapKind) -> Result<()> {
    let ok = match *kind {
        GapKind::LtK3 { p, q } => q > 0.0 && q <= p && p < 1.0,
        GapKind::UtK3 { p, q } => p > 0.0 && p <= q && q < 1.0,
        GapKind::LtHK3 { r } | GapKind::HExp { r } => r > 0.0 && r <= 1.0,
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("parameters out of range for {kind:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Parameters {
    Dense { p: f64, q: f64 },
    Sparse { r: f64 },
    SparseGraph { edges: usize, r: f64 },
}

/// Numerical evidence behind a verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    /// `(x, gap(x))` samples, `x` ascending.
    pub grid: Vec<[f64; 2]>,
    pub min_gap: f64,
    pub argmin: f64,
    /// The single point a reduction decided on, if one was used.
    pub decisive_point: Option<[f64; 2]>,
    /// Rigorous lower bound on the gap over the whole domain, when the
    /// guarded scan was used.
    pub guarded_lower_bound: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub condition: ConditionId,
    pub parameters: Parameters,
    pub gap: Option<GapKind>,
    pub evidence: Evidence,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

struct Scan {
    grid: Vec<[f64; 2]>,
    min_gap: f64,
    argmin: f64,
    lower_bound: f64,
}

/// Grid nodes on `[lo, hi]`: uniform with [`GRID_STEP`], plus geometric
/// refinement towards singular endpoints, plus the tangency point.
fn grid_nodes(lo: f64, hi: f64, singular_lo: bool, singular_hi: bool, extra: &[f64]) -> Vec<f64> {
    const INNER: f64 = 1e-16;
    const RATIO: f64 = 1.05;
    let n = ((hi - lo) / GRID_STEP).ceil().max(1.0) as usize;
    let mut xs: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect();
    let first_step = (hi - lo) / n as f64;
    if singular_lo {
        let mut d = INNER;
        while d < first_step {
            xs.push(lo + d);
            d *= RATIO;
        }
    }
    if singular_hi {
        let mut d = INNER;
        while d < first_step {
            xs.push(hi - d);
            d *= RATIO;
        }
    }
    xs.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs
}

fn scan(kind: &GapKind, lo: f64, hi: f64, guarded: bool) -> Scan {
    let (dlo, dhi) = kind.domain();
    let singular_lo = lo <= dlo + f64::EPSILON && !matches!(kind, GapKind::HExp { .. });
    let singular_hi = hi >= dhi && matches!(kind, GapKind::UtK3 { .. });
    let x0 = kind.tangency();
    let mut extra = vec![x0];
    if let GapKind::LtK3 { q, .. } = *kind {
        extra.push(2.0 * q);
    }
    if let GapKind::LtHK3 { r } = *kind {
        extra.push(2.0 * r);
    }
    let xs = grid_nodes(lo, hi, singular_lo, singular_hi, &extra);
    let vals: Vec<f64> = xs.iter().map(|&x| kind.eval(x)).collect();
    let (mut min_gap, mut argmin) = (f64::INFINITY, lo);
    for (&x, &v) in xs.iter().zip(&vals) {
        if v < min_gap {
            min_gap = v;
            argmin = x;
        }
    }
    let lower_bound = if guarded {
        guarded_bound(kind, &xs, &vals, singular_lo, singular_hi)
    } else {
        f64::NAN
    };
    Scan {
        grid: xs.into_iter().zip(vals).map(|(x, v)| [x, v]).collect(),
        min_gap,
        argmin,
        lower_bound,
    }
}

fn guarded_bound(
    kind: &GapKind,
    xs: &[f64],
    vals: &[f64],
    singular_lo: bool,
    singular_hi: bool,
) -> f64 {
    let n = xs.len();
    let x0 = kind.tangency();
    // convex neighbourhood of the tangency point: maximal run of cells
    // around x0 with a positive lower bound on f''
    let convex: Vec<bool> = (0..n - 1)
        .map(|i| {
            let (a, b) = (xs[i], xs[i + 1]);
            a > 0.0 && b < 1.0 && kind.curvature_bounds(a, b).0 > 0.0
        })
        .collect();
    let mut covered = vec![false; n - 1];
    if let Some(c0) = xs.iter().position(|&x| x == x0) {
        let mut i = c0;
        while i < n - 1 && convex[i] {
            covered[i] = true;
            i += 1;
        }
        let mut i = c0;
        while i > 0 && convex[i - 1] {
            covered[i - 1] = true;
            i -= 1;
        }
    }
    let mut bound = f64::INFINITY;
    for i in 0..n - 1 {
        let (a, b) = (xs[i], xs[i + 1]);
        let (fa, fb) = (vals[i], vals[i + 1]);
        let cell = if covered[i] {
            0.0_f64.min(fa).min(fb)
        } else if (i == 0 && singular_lo) || (i == n - 2 && singular_hi) {
            let (inner, f_inner) = if i == 0 { (b, fb) } else { (a, fa) };
            let width = b - a;
            let slope = kind.endpoint_slope_bound(width.min(inner.min(1.0 - inner)).max(width));
            f_inner.min(if i == 0 { fa } else { fb }) - slope * width
        } else {
            let d = b - a;
            let (_, m2) = kind.curvature_bounds(a, b);
            let (da, db) = (kind.derivative(a), kind.derivative(b));
            let left = fa.min(fa + da * d - 0.5 * m2 * d * d);
            let right = fb.min(fb - db * d - 0.5 * m2 * d * d);
            left.max(right)
        };
        bound = bound.min(cell);
    }
    bound
}

fn evidence_from(
    scan: Scan,
    decisive: Option<[f64; 2]>,
    guarded: bool,
    notes: Vec<String>,
) -> Evidence {
    Evidence {
        grid: scan.grid,
        min_gap: scan.min_gap,
        argmin: scan.argmin,
        decisive_point: decisive,
        guarded_lower_bound: guarded.then_some(scan.lower_bound),
        notes,
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Certified
    } else {
        Verdict::Inconclusive
    }
}

/// Guarded verdict of the triangle lower-tail tangent condition on `[0, p]`
/// without building an evidence record.
pub(crate) fn lt_k3_guarded_ok(p: f64, q: f64) -> bool {
    let kind = GapKind::LtK3 { p, q };
    let s = scan(&kind, 0.0, p, true);
    s.lower_bound >= -GAP_TOL && s.min_gap >= -GAP_TOL
}

/// Triangle lower tail, `0 < q ≤ p < 1`: is `W ≡ q` certified as the unique
/// minimizer of `LT_p(K_3, q)`?
pub fn lt_k3_certificate(p: f64, q: f64) -> Result<Certificate> {
    if !(q > 0.0 && q <= p && p < 1.0) {
        return Err(invalid(format!(
            "need 0 < q <= p < 1, got p = {p}, q = {q}"
        )));
    }
    let kind = GapKind::LtK3 { p, q };
    let parameters = Parameters::Dense { p, q };
    if p <= 0.5 {
        let at_p = kind.eval(p);
        let s = scan(&kind, 0.0, p, false);
        let ok = at_p >= -GAP_TOL;
        Ok(Certificate {
            verdict: verdict(ok),
            condition: ConditionId::LtK3PointReduction,
            parameters,
            gap: Some(kind),
            evidence: evidence_from(s, Some([p, at_p]), false, Vec::new()),
        })
    } else {
        let s = scan(&kind, 0.0, p, true);
        let ok = s.lower_bound >= -GAP_TOL && s.min_gap >= -GAP_TOL;
        Ok(Certificate {
            verdict: verdict(ok),
            condition: ConditionId::LtK3GuardedGrid,
            parameters,
            gap: Some(kind),
            evidence: evidence_from(s, None, true, Vec::new()),
        })
    }
}

/// Triangle upper tail, `0 < p ≤ q < 1`: does the tangent to `x ↦ I_p(√x)`
/// at `x = q²` minorize it on `[0, 1]`? Evidence is recorded in the graphon
/// value `y = √x`.
pub fn ut_k3_certificate(p: f64, q: f64) -> Result<Certificate> {
    if !(p > 0.0 && p <= q && q < 1.0) {
        return Err(invalid(format!(
            "need 0 < p <= q < 1, got p = {p}, q = {q}"
        )));
    }
    let kind = GapKind::UtK3 { p, q };
    let s = scan(&kind, 0.0, 1.0, true);
    let ok = s.lower_bound >= -GAP_TOL && s.min_gap >= -GAP_TOL;
    Ok(Certificate {
        verdict: verdict(ok),
        condition: ConditionId::UtK3ConvexMinorant,
        parameters: Parameters::Dense { p, q },
        gap: Some(kind),
        evidence: evidence_from(s, None, true, vec!["abscissa is y = sqrt(x)".into()]),
    })
}

/// Sparse triangle lower tail, `0 < r ≤ 1`: decided at `x = 1`.
pub fn lt_h_k3_certificate(r: f64) -> Result<Certificate> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(invalid(format!("need 0 < r <= 1, got r = {r}")));
    }
    let kind = GapKind::LtHK3 { r };
    let at_one = kind.eval(1.0);
    let s = scan(&kind, 0.0, 1.0, false);
    Ok(Certificate {
        verdict: verdict(at_one >= -GAP_TOL),
        condition: ConditionId::LtHK3PointReduction,
        parameters: Parameters::Sparse { r },
        gap: Some(kind),
        evidence: evidence_from(s, Some([1.0, at_one]), false, Vec::new()),
    })
}

/// Sparse lower tail for any `H` with `m = e(H) ≥ 1` edges: certified iff the
/// log-tangent inequality holds at `c = r^{m r^{-m}}` and `r ≥ 1/e`.
pub fn lt_h_general_certificate(h: &Graph, r: f64) -> Result<Certificate> {
    let m = h.e();
    if m == 0 {
        return Err(invalid("graph has no edges"));
    }
    lt_h_edges_certificate(m, r)
}

/// [`lt_h_general_certificate`] keyed by the edge count alone.
pub fn lt_h_edges_certificate(m: usize, r: f64) -> Result<Certificate> {
    if !(r > 0.0 && r < 1.0) || m == 0 {
        return Err(invalid(format!(
            "need 0 < r < 1 and m >= 1, got r = {r}, m = {m}"
        )));
    }
    let kind = GapKind::HExp { r };
    let parameters = Parameters::SparseGraph { edges: m, r };
    let exponent = m as f64 * r.powf(-(m as f64));
    let log_c = exponent * r.ln();
    if !log_c.is_finite() {
        return Ok(Certificate {
            verdict: Verdict::Inconclusive,
            condition: ConditionId::LtHLogTangent,
            parameters,
            gap: Some(kind),
            evidence: Evidence {
                grid: Vec::new(),
                min_gap: f64::NAN,
                argmin: f64::NAN,
                decisive_point: None,
                guarded_lower_bound: None,
                notes: vec![format!(
                    "m r^-m = {exponent} overflows; lower bound r^(m r^-m) underflows to 0"
                )],
            },
        });
    }
    let c = log_c.exp();
    let h = Entropy::Sparse;
    // evaluated through log c so that an underflowing c stays exact
    let at_c = h.value(c) - h.value(r) - xlogx(r) * (log_c - r.ln());
    let mut notes = vec![format!("lower bound c = r^(m r^-m) = {c:e}")];
    let above_inv_e = r >= (-1.0f64).exp();
    if !above_inv_e {
        notes.push("r < 1/e: the monotonicity argument does not apply".into());
    }
    let s = scan(&kind, c.max(1e-300), 1.0, false);
    Ok(Certificate {
        verdict: verdict(at_c >= -GAP_TOL && above_inv_e),
        condition: ConditionId::LtHLogTangent,
        parameters,
        gap: Some(kind),
        evidence: evidence_from(s, Some([c, at_c]), false, notes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn certified(c: Result<Certificate>) -> bool {
        c.unwrap().is_certified()
    }

    #[test]
    fn lt_k3_examples() {
        assert!(certified(lt_k3_certificate(0.1, 0.06)));
        assert!(!certified(lt_k3_certificate(0.1, 0.045)));
        for &p in &[0.05, 0.3, 0.5, 0.7, 0.9] {
            assert!(certified(lt_k3_certificate(p, p)));
        }
        assert!(lt_k3_certificate(0.1, 0.2).is_err());
        assert!(lt_k3_certificate(0.1, 0.0).is_err());
    }

    #[test]
    fn ut_k3_examples() {
        for &p in &[0.05, 0.3, 0.8] {
            assert!(certified(ut_k3_certificate(p, p)));
        }
        // upper tail boundary at q = 0.95 sits at p ≈ 0.0366
        assert!(certified(ut_k3_certificate(0.05, 0.95)));
        // … and at q = 0.9 at p ≈ 0.0603, so p = 0.05 is outside
        assert!(!certified(ut_k3_certificate(0.05, 0.9)));
        assert!(!certified(ut_k3_certificate(0.05, 0.10)));
        assert!(ut_k3_certificate(0.5, 0.4).is_err());
    }

    #[test]
    fn lt_h_k3_examples() {
        assert!(certified(lt_h_k3_certificate(0.5)));
        assert!(!certified(lt_h_k3_certificate(0.4)));
        assert!(certified(lt_h_k3_certificate(1.0)));
        assert!(lt_h_k3_certificate(0.0).is_err());
    }

    #[test]
    fn lt_h_general_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert!(certified(lt_h_general_certificate(&k3, 0.7)));
        assert!(!certified(lt_h_general_certificate(&k3, 0.68)));
        assert!(certified(lt_h_edges_certificate(10, 0.9)));
        let c = lt_h_edges_certificate(1000, 0.01).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.evidence.notes[0].contains("overflows"));
    }

    #[test]
    fn tangent_gap_examples() {
        let g = tangent_gap(GapKind::LtK3 { p: 0.1, q: 0.05 }, 0.05).unwrap();
        assert!(g.abs() < 1e-15);
        let g = tangent_gap(GapKind::HExp { r: 0.6 }, 0.6).unwrap();
        assert!(g.abs() < 1e-15);
        assert!(tangent_gap(GapKind::LtK3 { p: 0.1, q: 0.047 }, 0.1).unwrap() > 0.0);
        assert!(tangent_gap(GapKind::HExp { r: 0.6 }, 0.0).is_err());
        assert!(tangent_gap(GapKind::LtK3 { p: 0.1, q: 0.05 }, 1.5).is_err());
    }

    #[test]
    fn tangency_has_zero_slope() {
        let kinds = [
            GapKind::LtK3 { p: 0.3, q: 0.1 },
            GapKind::UtK3 { p: 0.2, q: 0.6 },
            GapKind::LtHK3 { r: 0.4 },
            GapKind::HExp { r: 0.7 },
        ];
        for k in kinds {
            let x0 = k.tangency();
            assert!(k.eval(x0).abs() < 1e-15, "{k:?}");
            assert!(k.derivative(x0).abs() < 1e-13, "{k:?}");
            let e = 1e-6;
            let fd = (k.eval(x0 + e) - k.eval(x0 - e)) / (2.0 * e);
            assert!(fd.abs() < 1e-8, "{k:?}");
        }
    }

    #[test]
    fn certified_implies_nonnegative_evidence() {
        let mut certs = Vec::new();
        for i in 1..=10 {
            let p = 0.09 * i as f64;
            for j in 1..=10 {
                let q = if j == 10 { p } else { p * j as f64 / 10.0 };
                certs.push(lt_k3_certificate(p, q).unwrap());
            }
        }
        for i in 1..=10 {
            certs.push(lt_h_k3_certificate(0.1 * i as f64).unwrap());
            certs.push(lt_h_edges_certificate(3, 0.05 + 0.09 * i as f64).unwrap());
        }
        for c in certs.iter().filter(|c| c.is_certified()) {
            assert!(c.evidence.min_gap >= -GAP_TOL, "{:?}", c.parameters);
        }
    }

    #[test]
    fn certificate_region_is_an_interval_in_q() {
        for i in 1..=10 {
            let p = 0.05 * i as f64;
            let verdicts: Vec<bool> = (1..=60)
                .map(|j| {
                    lt_k3_certificate(p, (p * j as f64 / 60.0).min(p))
                        .unwrap()
                        .is_certified()
                })
                .collect();
            let first = verdicts.iter().position(|&v| v).unwrap();
            assert!(verdicts[first..].iter().all(|&v| v), "p = {p}");
        }
    }

    #[test]
    fn log_tangent_monotone_region() {
        for &(x0, r0) in &[(0.2, 0.5), (0.1, 0.6), (0.4, 0.4), (0.3, 0.7)] {
            if (GapKind::HExp { r: r0 }).eval(x0) < 0.0 {
                continue;
            }
            for i in 0..=20 {
                for j in 0..=20 {
                    let x = x0 + (1.0 - x0) * i as f64 / 20.0;
                    let r = r0 + (1.0 - r0) * j as f64 / 20.0;
                    assert!(GapKind::HExp { r }.eval(x) >= -1e-14, "x={x} r={r}");
                }
            }
        }
    }

    #[test]
    fn guarded_grid_matches_point_reduction_below_half() {
        for i in 1..=10 {
            let p = 0.05 * i as f64;
            for j in 1..=20 {
                let q = (p * j as f64 / 20.0).min(p);
                let reduced = lt_k3_certificate(p, q).unwrap().is_certified();
                assert_eq!(reduced, lt_k3_guarded_ok(p, q), "p={p} q={q}");
            }
        }
    }

    #[test]
    fn certificate_json_has_evidence() {
        let c = lt_h_k3_certificate(0.5).unwrap();
        let v: serde_json::Value = serde_json::to_value(&c).unwrap();
        assert_eq!(v["verdict"], "certified");
        assert_eq!(v["condition"], "lt_h_k3_point_reduction");
        assert!(v["evidence"]["grid"].as_array().unwrap().len() > 1000);
    }
}
