//! Phase boundaries and constants of the triangle lower tail, and the
//! plain-text data files they are plotted from.
//!
//! `q̄(p)` is pinned to the boundary of the tangent certificate and `q̲(p)` to
//! the supremum of the BIP breaking region. Between the two curves neither
//! side has a proof.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::breaking::{
    admissible_interval, bip_gap, bip_gap_sparse, critical_triple, find_breaking,
};
use crate::entropy::{xlogx, Entropy};
use crate::error::{invalid, Error, Result};
use crate::numeric::{bisect, bisect_predicate, linspace, logspace};
use crate::symcheck::{lt_k3_guarded_ok, tangent_gap, GapKind};

/// Edge counts tabulated by [`sparse_constants`].
pub const TABLE_M: [usize; 10] = [3, 4, 5, 6, 7, 8, 9, 10, 20, 100];
/// Default number of samples per curve.
pub const DEFAULT_POINTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    UpperQ,
    LowerQ,
    UtBoundary,
    Diagonal,
}

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub kind: CurveKind,
    /// `(p, q)` pairs ordered by `p`; for the upper-tail boundary, `(q, p)`
    /// pairs ordered by `q`.
    pub samples: Vec<(f64, f64)>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SparseConstants {
    /// `r̄`: certified for `r ≥ r̄`.
    pub r_upper: f64,
    /// `r̲`: BIP breaking for `r < r̲`.
    pub r_lower: f64,
    /// `h(r) = ½`: `BIP_{0,1}` breaks symmetry below it.
    pub r_trivial: f64,
    pub r_m: BTreeMap<usize, f64>,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("p = {p} must lie in (0, 1)")))
    }
}

/// `I_p(q) + ½ q I_p'(q)`; its root below `p` is `q̄(p)` when `p ≤ ½`.
pub fn upper_q_residual(p: f64, q: f64) -> f64 {
    let ip = Entropy::FiniteP { p };
    ip.value(q) + 0.5 * q * ip.derivative(q)
}

/// `q̄(p)`: the smallest `q` from which the triangle tangent certificate holds
/// up to `p`.
pub fn upper_q_curve(p: f64) -> Result<f64> {
    check_p(p)?;
    if p <= 0.5 {
        let f = |q| upper_q_residual(p, q);
        // the residual also vanishes at q = p; bracket strictly below it
        let hi = [0.9, 0.8, 0.7, 0.6]
            .iter()
            .map(|s| s * p)
            .find(|&q| f(q) < 0.0)
            .ok_or_else(|| invalid(format!("no bracket for the upper curve at p = {p}")))?;
        bisect(f, 1e-3 * p, hi, 1e-12 * p)
    } else {
        let lo = 1e-3 * p;
        if lt_k3_guarded_ok(p, lo) {
            return Ok(lo);
        }
        let (_, first_ok) = bisect_predicate(|q| !lt_k3_guarded_ok(p, q), lo, p, 1e-9);
        Ok(first_ok)
    }
}

/// `q̲(p)`: supremum of the `q` at which [`find_breaking`] returns a witness.
pub fn lower_q_curve(p: f64) -> Result<f64> {
    check_p(p)?;
    let breaks = |q: f64| matches!(find_breaking(p, q), Ok(Some(_)));
    let lo = 1e-6 * p;
    if !breaks(lo) {
        return Err(invalid(format!(
            "no breaking witness near q = 0 at p = {p}"
        )));
    }
    let (last, _) = bisect_predicate(breaks, lo, p, 1e-8 * p);
    Ok(last)
}

/// The `p` at which the triangle upper-tail certificate boundary sits for a
/// given `q`: `p = 1/(1 + (1/q − 1)^{1/(1−2q)})`, with the limit
/// `1/(1 + e²)` at `q = ½`.
pub fn ut_boundary_k3(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(invalid(format!("q = {q} must lie in (0, 1)")));
    }
    let d = 1.0 - 2.0 * q;
    let exponent = if d == 0.0 { 2.0 } else { (d / q).ln_1p() / d };
    Ok(1.0 / (1.0 + exponent.exp()))
}

/// Log-tangent gap at the lower bound `c = r^{m r^{−m}}`; `r_m` is its
/// first upward zero.
pub fn r_m_residual(m: usize, r: f64) -> f64 {
    let log_c = m as f64 * r.powf(-(m as f64)) * r.ln();
    let h = Entropy::Sparse;
    h.value(log_c.exp()) - h.value(r) - xlogx(r) * (log_c - r.ln())
}

/// `r_m`: the general-`H` certificate holds for `r ≥ r_m` when `e(H) = m`.
pub fn r_m(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("m must be at least 1"));
    }
    let f = |r| r_m_residual(m, r);
    let grid = linspace(0.01, 0.999, 990);
    let i = grid
        .windows(2)
        .position(|w| f(w[0]) < 0.0 && f(w[1]) >= 0.0)
        .ok_or_else(|| invalid(format!("no sign change for r_{m}")))?;
    let root = bisect(f, grid[i], grid[i + 1], 1e-13)?;
    Ok(root.max((-1.0f64).exp()))
}

pub fn sparse_constants() -> Result<SparseConstants> {
    let r_upper = bisect(
        |r| 1.5 * xlogx(r) - r + 1.0,
        1e-9,
        (-1.0f64 / 3.0).exp(),
        1e-13,
    )?;
    let r_trivial = bisect(|r| Entropy::Sparse.value(r) - 0.5, 1e-12, 1.0, 1e-13)?;
    let r_m = TABLE_M
        .iter()
        .map(|&m| r_m(m).map(|v| (m, v)))
        .collect::<Result<_>>()?;
    Ok(SparseConstants {
        r_upper,
        r_lower: critical_triple().r,
        r_trivial,
        r_m,
    })
}

/// `min(δ^{2/3}, 2δ/3)`.
pub fn ut_sparse_rate(delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta = {delta} must be positive")));
    }
    Ok(delta.cbrt().powi(2).min(2.0 * delta / 3.0))
}

/// Abscissae of a curve on `(0, 1)`: a fifth of the points log-spaced on
/// `[1e-4, 1e-2)`, the rest evenly spaced on `[1e-2, 0.999]`.
pub fn curve_abscissae(points: usize) -> Vec<f64> {
    let points = points.max(2);
    let n_log = points / 5;
    let mut xs: Vec<f64> = if n_log > 0 {
        let mut l = logspace(1e-4, 1e-2, n_log + 1);
        l.pop();
        l
    } else {
        Vec::new()
    };
    xs.extend(linspace(1e-2, 0.999, points - n_log));
    xs
}

pub fn sample_curve(kind: CurveKind, xs: &[f64]) -> Result<Curve> {
    let f: fn(f64) -> Result<f64> = match kind {
        CurveKind::UpperQ => upper_q_curve,
        CurveKind::LowerQ => lower_q_curve,
        CurveKind::UtBoundary => ut_boundary_k3,
        CurveKind::Diagonal => Ok,
    };
    let samples = xs
        .par_iter()
        .map(|&x| f(x).map(|y| (x, y)))
        .collect::<Result<Vec<_>>>()?;
    let tolerance = match kind {
        CurveKind::UpperQ => 1e-9,
        CurveKind::LowerQ => 1e-8,
        CurveKind::UtBoundary | CurveKind::Diagonal => 0.0,
    };
    Ok(Curve {
        kind,
        samples,
        tolerance,
    })
}

/// Named functions that can be written to a data file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Series {
    Curve(CurveKind),
    LtK3Gap { p: f64, q: f64 },
    UtK3Gap { p: f64, q: f64 },
    LtHK3Gap { r: f64 },
    HExpGap { r: f64 },
    BipGap { p: f64, q: f64 },
    BipGapSparse { r: f64 },
}

/// Parameters for [`Series::from_name`]; unused ones are ignored.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeriesParams {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
}

impl SeriesParams {
    fn get(&self, name: &'static str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| invalid(format!("series needs parameter {name}")))
    }
}

/// Registered series names.
pub const SERIES_NAMES: [&str; 10] = [
    "upper_q_curve",
    "lower_q_curve",
    "ut_boundary",
    "diagonal",
    "lt_k3_gap",
    "ut_k3_gap",
    "lt_h_k3_gap",
    "h_exp_gap",
    "bip_gap",
    "bip_gap_sparse",
];

impl Series {
    /// Looks up a registered name; `-` and `_` are interchangeable.
    pub fn from_name(name: &str, params: SeriesParams) -> Result<Self> {
        let p = || params.get("p", params.p);
        let q = || params.get("q", params.q);
        let r = || params.get("r", params.r);
        let s = match name.replace('-', "_").as_str() {
            "upper_q_curve" | "upper_q" => Series::Curve(CurveKind::UpperQ),
            "lower_q_curve" | "lower_q" => Series::Curve(CurveKind::LowerQ),
            "ut_boundary" | "ut_boundary_k3" => Series::Curve(CurveKind::UtBoundary),
            "diagonal" => Series::Curve(CurveKind::Diagonal),
            "lt_k3_gap" | "lt_k3" => Series::LtK3Gap { p: p()?, q: q()? },
            "ut_k3_gap" | "ut_k3" => Series::UtK3Gap { p: p()?, q: q()? },
            "lt_h_k3_gap" | "lt_h_k3" => Series::LtHK3Gap { r: r()? },
            "h_exp_gap" | "h_exp" => Series::HExpGap { r: r()? },
            "bip_gap" | "bip" => Series::BipGap { p: p()?, q: q()? },
            "bip_gap_sparse" | "bip_sparse" => Series::BipGapSparse { r: r()? },
            _ => return Err(Error::UnknownSeries(name.to_string())),
        };
        Ok(s)
    }

    /// Default abscissae when no explicit range is given.
    pub fn default_grid(&self, points: usize) -> Vec<f64> {
        match *self {
            Series::Curve(_) => curve_abscissae(points),
            _ => {
                let (lo, hi) = self.domain();
                linspace(lo, hi, points)
            }
        }
    }

    /// Natural domain of the abscissa.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            Series::Curve(_) => (0.0, 1.0),
            Series::LtK3Gap { p, .. } => (0.0, p),
            Series::UtK3Gap { .. } | Series::LtHK3Gap { .. } => (0.0, 1.0),
            Series::HExpGap { .. } => (1e-4, 1.0),
            Series::BipGap { p, q } => admissible_interval(q, p),
            Series::BipGapSparse { r } => admissible_interval(r, 1.0),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            Series::Curve(CurveKind::UpperQ) => upper_q_curve(x),
            Series::Curve(CurveKind::LowerQ) => lower_q_curve(x),
            Series::Curve(CurveKind::UtBoundary) => ut_boundary_k3(x),
            Series::Curve(CurveKind::Diagonal) => Ok(x),
            Series::LtK3Gap { p, q } => tangent_gap(GapKind::LtK3 { p, q }, x),
            Series::UtK3Gap { p, q } => tangent_gap(GapKind::UtK3 { p, q }, x),
            Series::LtHK3Gap { r } => tangent_gap(GapKind::LtHK3 { r }, x),
            Series::HExpGap { r } => tangent_gap(GapKind::HExp { r }, x),
            Series::BipGap { p, q } => bip_gap(p, q, x),
            Series::BipGapSparse { r } => bip_gap_sparse(r, x),
        }
    }

    pub fn sample(&self, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
        xs.par_iter()
            .map(|&x| {
                let y = self.eval(x)?;
                if y.is_finite() {
                    Ok((x, y))
                } else {
                    Err(invalid(format!("non-finite value at x = {x}")))
                }
            })
            .collect()
    }
}

/// Renders `x y` lines with shortest round-trip formatting.
pub fn format_dat(rows: &[(f64, f64)]) -> String {
    let mut s = String::with_capacity(rows.len() * 40);
    for (x, y) in rows {
        let _ = writeln!(s, "{x} {y}");
    }
    s
}

/// Samples a series on `xs` (ascending) and writes the data file.
pub fn emit_curve(series: &Series, xs: &[f64], path: &Path) -> Result<Vec<(f64, f64)>> {
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("abscissae must be strictly ascending"));
    }
    let rows = series.sample(xs)?;
    std::fs::write(path, format_dat(&rows))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcheck::lt_k3_certificate;

    #[test]
    fn upper_curve_residual_and_slope() {
        let q = upper_q_curve(0.3).unwrap();
        assert!(upper_q_residual(0.3, q).abs() < 1e-10);
        let s = upper_q_curve(1e-3).unwrap() / 1e-3;
        assert!((0.46..=0.48).contains(&s), "{s}");
        for &p in &[0.01, 0.2, 0.5, 0.6, 0.9] {
            assert!(upper_q_curve(p).unwrap() <= p);
        }
    }

    #[test]
    fn upper_curve_is_certificate_boundary_above_half() {
        for &p in &[0.6, 0.8, 0.95] {
            let q = upper_q_curve(p).unwrap();
            assert!(lt_k3_certificate(p, q + 1e-4).unwrap().is_certified());
            assert!(!lt_k3_certificate(p, q - 1e-3).unwrap().is_certified());
        }
        assert!((upper_q_curve(0.6).unwrap() - 0.2962).abs() < 1e-3);
    }

    #[test]
    fn lower_curve_examples() {
        let q = lower_q_curve(0.1).unwrap();
        assert!((q - 0.0215).abs() < 5e-4, "{q}");
        let s = lower_q_curve(1e-3).unwrap() / 1e-3;
        assert!((0.20..=0.22).contains(&s), "{s}");
        for &p in &[0.01, 0.3, 0.7] {
            assert!(lower_q_curve(p).unwrap() <= upper_q_curve(p).unwrap());
        }
    }

    #[test]
    fn ut_boundary_values() {
        assert!((ut_boundary_k3(0.6).unwrap() - 1.0 / (1.0 + 7.59375)).abs() < 1e-12);
        let lim = 1.0 / (1.0 + 2f64.exp());
        assert!((ut_boundary_k3(0.5).unwrap() - lim).abs() < 1e-15);
        assert!((ut_boundary_k3(0.5 + 1e-9).unwrap() - lim).abs() < 1e-8);
        for &q in &[0.3, 0.7, 0.9] {
            let p = ut_boundary_k3(q).unwrap();
            let resid = (1.0 + (1.0 / q - 1.0).powf(1.0 / (1.0 - 2.0 * q))) * p - 1.0;
            assert!(resid.abs() <= 1e-12);
        }
    }

    #[test]
    fn sparse_constant_values() {
        let c = sparse_constants().unwrap();
        assert!((c.r_upper - 0.466).abs() < 1e-3);
        assert!((c.r_lower - 0.209).abs() < 1e-3);
        assert!((c.r_trivial - 0.186).abs() < 1e-3);
        let h = Entropy::Sparse;
        assert!((h.value(c.r_upper) + 0.5 * c.r_upper * h.derivative(c.r_upper)).abs() < 1e-12);
        assert!(c.r_trivial < c.r_lower && c.r_lower < c.r_upper && c.r_upper < 1.0);
        let vals: Vec<f64> = c.r_m.values().copied().collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]) && vals[vals.len() - 1] < 1.0);
    }

    #[test]
    fn table_values() {
        let expected = [
            0.686, 0.735, 0.770, 0.795, 0.815, 0.831, 0.844, 0.855, 0.911, 0.973,
        ];
        for (&m, &e) in TABLE_M.iter().zip(&expected) {
            let v = r_m(m).unwrap();
            if m == 100 {
                // 0.97366…, listed truncated rather than rounded
                assert_eq!((v * 1000.0).floor() / 1000.0, e);
            } else {
                assert!((v - e).abs() < 5e-4, "m={m}: {v}");
            }
        }
    }

    #[test]
    fn ut_sparse_rate_values() {
        assert!((ut_sparse_rate(1.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((ut_sparse_rate(3.375).unwrap() - 2.25).abs() < 1e-12);
        assert_eq!(ut_sparse_rate(8.0).unwrap(), 4.0);
        assert!(ut_sparse_rate(0.0).is_err());
    }

    #[test]
    fn series_registry() {
        let params = SeriesParams {
            p: Some(0.1),
            q: Some(0.045),
            r: None,
        };
        for name in SERIES_NAMES {
            let needs_r = matches!(name, "lt_h_k3_gap" | "h_exp_gap" | "bip_gap_sparse");
            assert_eq!(Series::from_name(name, params).is_ok(), !needs_r, "{name}");
        }
        assert!(matches!(
            Series::from_name("nope", params),
            Err(Error::UnknownSeries(_))
        ));
        assert_eq!(
            Series::from_name("upper-q", params).unwrap(),
            Series::Curve(CurveKind::UpperQ)
        );
    }

    #[test]
    fn emitted_gap_file_format() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gap.dat");
        let s = Series::LtK3Gap { p: 0.1, q: 0.045 };
        let xs = linspace(0.0, 0.1, 1000);
        let rows = emit_curve(&s, &xs, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 1000);
        for (line, (x, y)) in text.lines().zip(&rows) {
            let mut it = line.split(' ');
            assert_eq!(it.next().unwrap().parse::<f64>().unwrap(), *x);
            assert_eq!(it.next().unwrap().parse::<f64>().unwrap(), *y);
            assert!(it.next().is_none());
        }
        // the condition fails at x = p
        assert!(rows.iter().any(|r| r.1 < 0.0));
        assert!(rows.last().unwrap().1 < 0.0);
        assert!(emit_curve(&s, &[0.05, 0.01], &path).is_err());
        assert!(emit_curve(&s, &xs, &dir.path().join("missing/gap.dat")).is_err());
    }

    #[test]
    fn curve_grid_is_ascending_and_log_near_zero() {
        let xs = curve_abscissae(DEFAULT_POINTS);
        assert_eq!(xs.len(), DEFAULT_POINTS);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(xs[0], 1e-4);
        let c = sample_curve(CurveKind::UtBoundary, &xs).unwrap();
        assert_eq!(c.samples.len(), DEFAULT_POINTS);
    }
}
