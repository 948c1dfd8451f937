//! Brute-force oracle for the discretised lower-tail problems
//!
//! ```text
//! minimize E[ent(W)]  subject to  t(H, W) ≤ target^{e(H)}
//! ```
//!
//! over step graphons on `k` equal blocks, where `ent` is `I_p` (values in
//! `[0, p]`) or the sparse `h` (values in `[0, 1]`). The free variables are the
//! `k(k+1)/2` upper-triangle block values. Each restart runs an
//! augmented-Lagrangian loop whose inner problem is solved by projected
//! Barzilai–Borwein gradient descent, restores exact feasibility by scaling
//! (`t` is homogeneous of degree `e(H)`), and finishes with a Newton step on
//! the stationarity system `ent'(W) + λ t'(H, W) = 0`, `t(H, W) = target^{e(H)}`
//! over the interior blocks.
//!
//! The oracle gives upper bounds on the variational value and consistency
//! checks. It never proves global optimality.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::Entropy;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::kernel::{
    density_with_budget, functional_derivative_with_budget, StepGraphon, StepKernel, DEFAULT_BUDGET,
};

/// Values closer than this to `0` or to the upper bound count as boundary
/// contact.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// The two variational problems: `Entropy::FiniteP { p }` or `Entropy::Sparse`.
pub type Mode = Entropy;

#[derive(Debug, Clone, Serialize)]
pub struct SolverOptions {
    pub seed: u64,
    pub restarts: usize,
    pub budget: u64,
    /// Lower bound on block values during descent.
    pub floor: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// Tolerance on `t/T − 1`.
    pub feasibility_tol: f64,
    /// Stationarity residual below which a solution counts as converged.
    pub stationarity_tol: f64,
    pub polish: bool,
    /// Objective window for reporting alternative near-optimal solutions.
    pub alternative_window: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 20,
            budget: DEFAULT_BUDGET,
            floor: 1e-12,
            max_outer: 60,
            max_inner: 3000,
            feasibility_tol: 1e-11,
            stationarity_tol: 1e-6,
            polish: true,
            alternative_window: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Alternative {
    pub objective: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSolution {
    #[serde(flatten)]
    pub graphon: StepGraphon,
    pub objective: f64,
    /// `λ ≥ 0` in `ent'(W) + λ t'(H, W) = 0`.
    pub multiplier: f64,
    pub constraint_value: f64,
    /// `target^{e(H)} − t(H, W)`; nonnegative up to rounding.
    pub constraint_slack: f64,
    /// `None` when every block touches the boundary.
    pub stationarity_residual: Option<f64>,
    pub interior_blocks: usize,
    pub boundary_blocks: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// Distinct restart outcomes within the alternative window.
    pub alternatives: Vec<Alternative>,
    /// Objective of the constant graphon `W ≡ target`.
    pub constant_objective: f64,
    pub mode: Mode,
    pub target: f64,
    pub k: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub residual: f64,
    pub interior_blocks: usize,
    pub boundary_blocks: usize,
    /// The finite-`p` residual is an extension of the sparse condition.
    pub extension: bool,
}

fn upper_bound(mode: Mode) -> f64 {
    mode.upper_value()
}

fn is_interior(v: f64, hi: f64) -> bool {
    v > BOUNDARY_TOL && v < hi - BOUNDARY_TOL
}

/// `max |ent'(W) + λ t'(H, W)|` over interior blocks.
pub fn stationarity_residual(
    h: &Graph,
    w: &StepKernel,
    lambda: f64,
    mode: Mode,
) -> Result<StationarityReport> {
    let tp = functional_derivative_with_budget(h, w, DEFAULT_BUDGET)?;
    let hi = upper_bound(mode);
    let k = w.k();
    let (mut residual, mut interior, mut boundary) = (0.0f64, 0, 0);
    for i in 0..k {
        for j in i..k {
            let v = w.value(i, j);
            if is_interior(v, hi) {
                interior += 1;
                residual = residual.max((mode.derivative(v) + lambda * tp.value(i, j)).abs());
            } else {
                boundary += 1;
            }
        }
    }
    if interior == 0 {
        return Err(Error::NoInteriorBlocks);
    }
    Ok(StationarityReport {
        residual,
        interior_blocks: interior,
        boundary_blocks: boundary,
        extension: matches!(mode, Entropy::FiniteP { .. }),
    })
}

/// Least-squares multiplier over interior blocks, clamped at zero.
pub fn estimate_multiplier(h: &Graph, w: &StepKernel, mode: Mode) -> Result<f64> {
    let tp = functional_derivative_with_budget(h, w, DEFAULT_BUDGET)?;
    let hi = upper_bound(mode);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..w.k() {
        for j in i..w.k() {
            let v = w.value(i, j);
            if is_interior(v, hi) {
                let t = tp.value(i, j);
                num -= mode.derivative(v) * t;
                den += t * t;
            }
        }
    }
    Ok(if den > 0.0 { (num / den).max(0.0) } else { 0.0 })
}

struct Problem<'a> {
    h: &'a Graph,
    mode: Mode,
    k: usize,
    t_target: f64,
    lo: f64,
    hi: f64,
    weights: Vec<f64>,
    budget: u64,
}

impl<'a> Problem<'a> {
    fn new(h: &'a Graph, mode: Mode, target: f64, k: usize, opts: &SolverOptions) -> Self {
        let kk = (k * k) as f64;
        let weights = (0..k)
            .flat_map(|i| (i..k).map(move |j| if i == j { 1.0 / kk } else { 2.0 / kk }))
            .collect();
        Self {
            h,
            mode,
            k,
            t_target: target.powi(h.e() as i32),
            lo: opts.floor,
            hi: upper_bound(mode),
            weights,
            budget: opts.budget,
        }
    }

    fn n(&self) -> usize {
        self.weights.len()
    }

    fn kernel(&self, u: &[f64]) -> StepKernel {
        StepKernel::from_upper_triangle(self.k, u).expect("block values in range")
    }

    fn objective(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * self.mode.value(x))
            .sum()
    }

    fn density(&self, u: &[f64]) -> f64 {
        density_with_budget(self.h, &self.kernel(u), self.budget).expect("budget checked")
    }

    /// `t'` on the upper triangle.
    fn derivative(&self, u: &[f64]) -> Vec<f64> {
        let tp = functional_derivative_with_budget(self.h, &self.kernel(u), self.budget)
            .expect("budget checked");
        tp.upper_triangle()
    }

    fn project(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Augmented Lagrangian value and gradient for `g = t/T − 1 ≤ 0`.
    fn lagrangian(&self, u: &[f64], lambda: f64, mu: f64) -> (f64, Vec<f64>) {
        let g = self.density(u) / self.t_target - 1.0;
        let shifted = (lambda + mu * g).max(0.0);
        let value = self.objective(u) + (shifted * shifted - lambda * lambda) / (2.0 * mu);
        let mut grad: Vec<f64> = u
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * self.mode.derivative(x))
            .collect();
        if shifted > 0.0 {
            let tp = self.derivative(u);
            for ((gi, &w), t) in grad.iter_mut().zip(&self.weights).zip(tp) {
                *gi += shifted * w * t / self.t_target;
            }
        }
        (value, grad)
    }

    fn projected_step_norm(&self, u: &[f64], grad: &[f64]) -> f64 {
        u.iter()
            .zip(grad)
            .map(|(&x, &g)| (self.project(x - g) - x).abs())
            .fold(0.0, f64::max)
    }

    /// Projected Barzilai–Borwein descent with a nonmonotone Armijo test.
    fn inner(&self, u: &mut Vec<f64>, lambda: f64, mu: f64, max_iter: usize) {
        const MEMORY: usize = 10;
        let (mut f, mut g) = self.lagrangian(u, lambda, mu);
        let mut history = vec![f];
        let mut alpha = 1.0 / g.iter().fold(1e-12f64, |m, x| m.max(x.abs()));
        for _ in 0..max_iter {
            if self.projected_step_norm(u, &g) < 1e-14 {
                break;
            }
            let f_ref = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut step = alpha;
            let mut accepted = None;
            for _ in 0..60 {
                let cand: Vec<f64> = u
                    .iter()
                    .zip(&g)
                    .map(|(&x, &gi)| self.project(x - step * gi))
                    .collect();
                let decrease: f64 = cand
                    .iter()
                    .zip(u.iter())
                    .zip(&g)
                    .map(|((&c, &x), &gi)| gi * (c - x))
                    .sum();
                let (fc, gc) = self.lagrangian(&cand, lambda, mu);
                if fc <= f_ref + 1e-4 * decrease {
                    accepted = Some((cand, fc, gc));
                    break;
                }
                step *= 0.5;
            }
            let Some((cand, fc, gc)) = accepted else {
                break;
            };
            let s: Vec<f64> = cand.iter().zip(u.iter()).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = gc.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|a| a * a).sum();
            alpha = if sy > 0.0 {
                (ss / sy).clamp(1e-12, 1e12)
            } else {
                step * 2.0
            };
            let moved = s.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            *u = cand;
            f = fc;
            g = gc;
            history.push(f);
            if history.len() > MEMORY {
                history.remove(0);
            }
            if moved < 1e-16 {
                break;
            }
        }
    }

    fn augmented_lagrangian(&self, u: &mut Vec<f64>, opts: &SolverOptions) {
        let (mut lambda, mut mu) = (0.0, 10.0);
        let mut last_violation = f64::INFINITY;
        for _ in 0..opts.max_outer {
            self.inner(u, lambda, mu, opts.max_inner);
            let g = self.density(u) / self.t_target - 1.0;
            let violation = g.max(-lambda / mu).abs();
            lambda = (lambda + mu * g).max(0.0);
            if violation < opts.feasibility_tol {
                break;
            }
            if violation > 0.25 * last_violation {
                mu = (mu * 10.0).min(1e10);
            }
            last_violation = violation;
        }
    }

    /// Scales `W` down so that `t(H, W) ≤ T`.
    fn restore(&self, u: &mut [f64]) {
        let m = self.h.e() as f64;
        for _ in 0..3 {
            let t = self.density(u);
            if t <= self.t_target {
                return;
            }
            let s = (self.t_target / t).powf(1.0 / m) * (1.0 - 1e-15);
            for x in u.iter_mut() {
                *x = (*x * s).min(self.hi);
            }
        }
    }

    /// Newton iterations on the interior stationarity system.
    fn polish(&self, u: &[f64]) -> Option<Vec<f64>> {
        let idx: Vec<usize> = (0..self.n())
            .filter(|&i| is_interior(u[i], self.hi))
            .collect();
        if idx.is_empty() {
            return None;
        }
        let lambda0 = estimate_multiplier(self.h, &self.kernel(u), self.mode).ok()?;
        let nz = idx.len() + 1;
        let residual = |z: &[f64]| -> Option<DVector<f64>> {
            let mut v = u.to_vec();
            for (slot, &i) in idx.iter().enumerate() {
                if !(z[slot] > 0.0 && z[slot] < self.hi) {
                    return None;
                }
                v[i] = z[slot];
            }
            let lam = z[nz - 1];
            let tp = self.derivative(&v);
            let mut f = DVector::zeros(nz);
            for (slot, &i) in idx.iter().enumerate() {
                f[slot] = self.mode.derivative(v[i]) + lam * tp[i];
            }
            f[nz - 1] = self.density(&v) / self.t_target - 1.0;
            Some(f)
        };
        let mut z: Vec<f64> = idx.iter().map(|&i| u[i]).chain([lambda0]).collect();
        let mut fz = residual(&z)?;
        for _ in 0..30 {
            let norm = fz.amax();
            if norm < 1e-14 {
                break;
            }
            let mut jac = DMatrix::zeros(nz, nz);
            for c in 0..nz {
                let hstep = 1e-6 * z[c].abs().max(1e-8);
                let mut zp = z.clone();
                let mut zm = z.clone();
                zp[c] += hstep;
                zm[c] -= hstep;
                let (fp, fm) = (residual(&zp)?, residual(&zm)?);
                jac.set_column(c, &((fp - fm) / (2.0 * hstep)));
            }
            let delta = jac.lu().solve(&(-&fz))?;
            let mut scale = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let cand: Vec<f64> = z
                    .iter()
                    .zip(delta.iter())
                    .map(|(a, d)| a + scale * d)
                    .collect();
                if let Some(fc) = residual(&cand) {
                    if fc.amax() < norm {
                        z = cand;
                        fz = fc;
                        improved = true;
                        break;
                    }
                }
                scale *= 0.5;
            }
            if !improved {
                break;
            }
        }
        let mut v = u.to_vec();
        for (slot, &i) in idx.iter().enumerate() {
            v[i] = z[slot];
        }
        Some(v)
    }
}

struct Candidate {
    u: Vec<f64>,
    objective: f64,
    sorted: Vec<f64>,
}

impl Candidate {
    fn new(problem: &Problem, u: Vec<f64>) -> Self {
        let mut sorted = u.clone();
        sorted.sort_by(f64::total_cmp);
        Self {
            objective: problem.objective(&u),
            u,
            sorted,
        }
    }
}

fn cmp_candidates(a: &Candidate, b: &Candidate) -> std::cmp::Ordering {
    let tie = 1e-12 * (1.0 + a.objective.abs());
    if (a.objective - b.objective).abs() > tie {
        a.objective.total_cmp(&b.objective)
    } else {
        a.sorted
            .iter()
            .zip(&b.sorted)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Initial points: the constant, BIP-shaped embeddings, then uniform random.
fn starting_points(problem: &Problem, target: f64, opts: &SolverOptions) -> Vec<Vec<f64>> {
    let k = problem.k;
    let n = problem.n();
    let (lo, hi) = (problem.lo, problem.hi);
    let mut starts = vec![vec![target; n]];
    if k >= 2 {
        let half = k.div_ceil(2);
        for &a in &[lo.max(1e-6 * target), 0.25 * target, 0.5 * target] {
            for &b in &[hi, 0.5 * (hi + target)] {
                let u = (0..k)
                    .flat_map(|i| (i..k).map(move |j| ((i < half) == (j < half), i, j)))
                    .map(|(same, _, _)| if same { a } else { b })
                    .collect();
                starts.push(u);
            }
        }
    }
    let mut index = starts.len() as u64;
    while starts.len() < opts.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(index));
        starts.push((0..n).map(|_| rng.random_range(lo..=hi)).collect());
        index += 1;
    }
    starts.truncate(opts.restarts.max(1));
    starts
}

fn run_restart(problem: &Problem, start: Vec<f64>, opts: &SolverOptions) -> Candidate {
    let mut u: Vec<f64> = start.into_iter().map(|x| problem.project(x)).collect();
    problem.augmented_lagrangian(&mut u, opts);
    problem.restore(&mut u);
    let mut best = Candidate::new(problem, u);
    if opts.polish {
        if let Some(mut v) = problem.polish(&best.u) {
            problem.restore(&mut v);
            let cand = Candidate::new(problem, v);
            if cand.objective <= best.objective + 1e-12 {
                best = cand;
            }
        }
    }
    best
}

/// Solves `LT_p(H, target)` (finite `p`) or `LT(H, target)` (sparse) over
/// `k`-block step graphons.
pub fn solve_lt(
    h: &Graph,
    mode: Mode,
    target: f64,
    k: usize,
    opts: &SolverOptions,
) -> Result<OracleSolution> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    if h.e() == 0 {
        return Err(invalid("graph has no edges"));
    }
    if let Entropy::FiniteP { p } = mode {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("p = {p} must lie in (0, 1)")));
        }
    }
    let hi = upper_bound(mode);
    if !(target > 0.0 && target <= hi) {
        return Err(invalid(format!("target {target} must lie in (0, {hi}]")));
    }
    if (k as f64).powi(h.v() as i32) > opts.budget as f64 {
        return Err(Error::Budget {
            terms: (k as f64).powi(h.v() as i32),
            budget: opts.budget,
        });
    }
    let problem = Problem::new(h, mode, target, k, opts);
    let starts = starting_points(&problem, target, opts);
    let restarts_used = starts.len();
    let mut pool: Vec<Candidate> = starts
        .into_par_iter()
        .map(|s| run_restart(&problem, s, opts))
        .collect();
    pool.push(Candidate::new(&problem, vec![target; problem.n()]));
    pool.retain(|c| c.objective.is_finite());
    pool.sort_by(cmp_candidates);
    let best = pool.swap_remove(0);

    let mut alternatives: Vec<Alternative> = Vec::new();
    for c in &pool {
        if c.objective > best.objective + opts.alternative_window {
            break;
        }
        let distinct = |s: &[f64]| s.iter().zip(&c.sorted).any(|(x, y)| (x - y).abs() > 1e-4);
        if distinct(&best.sorted)
            && alternatives.iter().all(|a| {
                let mut s = a.values.clone();
                s.sort_by(f64::total_cmp);
                distinct(&s)
            })
        {
            alternatives.push(Alternative {
                objective: c.objective,
                values: c.u.clone(),
            });
        }
    }

    let kernel = problem.kernel(&best.u);
    let t = density_with_budget(h, &kernel, opts.budget)?;
    let multiplier = estimate_multiplier(h, &kernel, mode)?;
    let stationarity = match stationarity_residual(h, &kernel, multiplier, mode) {
        Ok(r) => Some(r),
        Err(Error::NoInteriorBlocks) => None,
        Err(e) => return Err(e),
    };
    let boundary_ok = boundary_signs_ok(&problem, &best.u, multiplier, opts.stationarity_tol);
    let (residual, interior, boundary) = match &stationarity {
        Some(r) => (Some(r.residual), r.interior_blocks, r.boundary_blocks),
        None => (None, 0, problem.n()),
    };
    let converged = residual.is_none_or(|r| r <= opts.stationarity_tol) && boundary_ok;
    Ok(OracleSolution {
        graphon: StepGraphon::try_from(kernel)?,
        objective: best.objective,
        multiplier,
        constraint_value: t,
        constraint_slack: problem.t_target - t,
        stationarity_residual: residual,
        interior_blocks: interior,
        boundary_blocks: boundary,
        restarts_used,
        converged,
        alternatives,
        constant_objective: mode.value(target),
        mode,
        target,
        k,
    })
}

/// Sign conditions at blocks on the box boundary: moving inward must not
/// decrease `ent + λ t`.
fn boundary_signs_ok(problem: &Problem, u: &[f64], lambda: f64, tol: f64) -> bool {
    let tp = problem.derivative(u);
    u.iter().zip(tp).all(|(&v, t)| {
        let g = problem.mode.derivative(v.max(problem.lo)) + lambda * t;
        if v <= BOUNDARY_TOL {
            g >= -tol
        } else if v >= problem.hi - BOUNDARY_TOL {
            g <= tol
        } else {
            true
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditCheck {
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    /// Every block value is at least `r^{m r^{−m}}`.
    pub lower_bound: AuditCheck,
    /// `E[log W] ≤ log r`.
    pub log_mean: AuditCheck,
    /// `E[t'(H, W) W] = e(H) t(H, W)`; `value` is the absolute difference.
    pub derivative_identity: AuditCheck,
    pub boundary_contacts: usize,
}

impl AuditReport {
    pub fn all_passed(&self) -> bool {
        self.lower_bound.passed && self.log_mean.passed && self.derivative_identity.passed
    }
}

/// Audits a sparse solution against the necessary conditions of a minimizer.
pub fn audit_solution(sol: &OracleSolution, h: &Graph) -> Result<AuditReport> {
    audit_graphon(&sol.graphon, h, sol.mode, sol.target)
}

/// [`audit_solution`] for an arbitrary graphon claimed to be a minimizer.
pub fn audit_graphon(w: &StepKernel, h: &Graph, mode: Mode, target: f64) -> Result<AuditReport> {
    if mode != Entropy::Sparse {
        return Err(invalid("the audit applies to the sparse problem only"));
    }
    if !(target > 0.0 && target <= 1.0) {
        return Err(invalid(format!("target {target} must lie in (0, 1]")));
    }
    let m = h.e() as f64;
    let log_bound = m * target.powf(-m) * target.ln();
    let bound = log_bound.exp();
    let min = w.min_value();
    let lower_bound = AuditCheck {
        passed: min >= bound - 1e-9,
        value: min,
        bound,
    };
    let log_w = w.expect(|x| if x > 0.0 { x.ln() } else { -1e300 })?;
    let log_w = if w.min_value() > 0.0 {
        log_w
    } else {
        f64::NEG_INFINITY
    };
    let log_mean = AuditCheck {
        passed: log_w <= target.ln() + 1e-9,
        value: log_w,
        bound: target.ln(),
    };
    let t = density_with_budget(h, w, DEFAULT_BUDGET)?;
    let tp = functional_derivative_with_budget(h, w, DEFAULT_BUDGET)?;
    let lhs = tp.zip_with(w, |a, b| a * b).expect(|x| x)?;
    let diff = (lhs - m * t).abs();
    let derivative_identity = AuditCheck {
        passed: diff <= 1e-10,
        value: diff,
        bound: 1e-10,
    };
    let k = w.k();
    let boundary_contacts = (0..k)
        .flat_map(|i| (i..k).map(move |j| (i, j)))
        .filter(|&(i, j)| !is_interior(w.value(i, j), 1.0))
        .count();
    Ok(AuditReport {
        lower_bound,
        log_mean,
        derivative_identity,
        boundary_contacts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::complete(3).unwrap()
    }

    fn quick() -> SolverOptions {
        SolverOptions {
            restarts: 8,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn edge_constraint_forces_constant() {
        let k2 = Graph::complete(2).unwrap();
        let sol = solve_lt(&k2, Entropy::Sparse, 0.6, 4, &quick()).unwrap();
        assert!((sol.objective - Entropy::Sparse.value(0.6)).abs() < 1e-9);
        assert!(sol
            .graphon
            .upper_triangle()
            .iter()
            .all(|v| (v - 0.6).abs() < 1e-6));
    }

    #[test]
    fn certified_sparse_triangle_is_constant() {
        let sol = solve_lt(&k3(), Entropy::Sparse, 0.8, 4, &quick()).unwrap();
        assert!((sol.objective - 0.021_485).abs() < 1e-6);
        assert!((sol.objective - Entropy::Sparse.value(0.8)).abs() < 1e-6);
        assert!(sol.converged);
        assert!(sol.stationarity_residual.unwrap() <= 1e-6);
        assert!(sol.constraint_slack >= -1e-9);
    }

    #[test]
    fn small_r_breaks_symmetry() {
        let sol = solve_lt(&k3(), Entropy::Sparse, 0.1, 2, &quick()).unwrap();
        assert!(sol.objective <= 0.5, "{}", sol.objective);
        assert!(sol.objective < Entropy::Sparse.value(0.1));
        let v = sol.graphon.upper_triangle();
        assert!((v[0] - v[1]).abs() > 0.5);
    }

    #[test]
    fn finite_p_near_half() {
        let sol = solve_lt(&k3(), Entropy::FiniteP { p: 0.5 }, 0.45, 4, &quick()).unwrap();
        assert!(
            (sol.objective - 0.005_008_37).abs() < 1e-7,
            "{}",
            sol.objective
        );
    }

    #[test]
    fn deterministic_given_seed() {
        let a = solve_lt(&k3(), Entropy::Sparse, 0.3, 3, &quick()).unwrap();
        let b = solve_lt(&k3(), Entropy::Sparse, 0.3, 3, &quick()).unwrap();
        assert_eq!(a.graphon, b.graphon);
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn stationarity_of_constant() {
        let r: f64 = 0.4;
        let w = StepKernel::constant(r);
        let lam = -r.ln() / (3.0 * r * r);
        let rep = stationarity_residual(&k3(), &w, lam, Entropy::Sparse).unwrap();
        assert!(rep.residual < 1e-15);
        let rep = stationarity_residual(&k3(), &w, 0.0, Entropy::Sparse).unwrap();
        assert!((rep.residual - r.ln().abs()).abs() < 1e-15);
        let bip = StepGraphon::bip(0.0, 1.0).unwrap();
        assert!(matches!(
            stationarity_residual(&k3(), &bip, 1.0, Entropy::Sparse),
            Err(Error::NoInteriorBlocks)
        ));
        let rep = stationarity_residual(&k3(), &w, 0.0, Entropy::FiniteP { p: 0.5 }).unwrap();
        assert!(rep.extension);
    }

    #[test]
    fn audit_examples() {
        let w = StepKernel::constant(0.7);
        let rep = audit_graphon(&w, &k3(), Entropy::Sparse, 0.7).unwrap();
        assert!(rep.all_passed(), "{rep:?}");
        let zero = StepGraphon::bip(0.0, 0.8).unwrap();
        let rep = audit_graphon(&zero, &k3(), Entropy::Sparse, 0.7).unwrap();
        assert!(!rep.lower_bound.passed);
        assert!(audit_graphon(&w, &k3(), Entropy::FiniteP { p: 0.5 }, 0.4).is_err());

        let sol = solve_lt(&k3(), Entropy::Sparse, 0.3, 3, &quick()).unwrap();
        let rep = audit_solution(&sol, &k3()).unwrap();
        assert!(
            rep.log_mean.passed && rep.derivative_identity.passed,
            "{rep:?}"
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_lt(&k3(), Entropy::Sparse, 0.0, 2, &quick()).is_err());
        assert!(solve_lt(&k3(), Entropy::FiniteP { p: 0.3 }, 0.4, 2, &quick()).is_err());
        assert!(solve_lt(&k3(), Entropy::Sparse, 0.5, 0, &quick()).is_err());
        let tight = SolverOptions {
            budget: 10,
            ..quick()
        };
        assert!(matches!(
            solve_lt(&k3(), Entropy::Sparse, 0.5, 4, &tight),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn solution_json_has_kernel_and_metadata() {
        let sol = solve_lt(&k3(), Entropy::Sparse, 0.8, 2, &quick()).unwrap();
        let v = serde_json::to_value(&sol).unwrap();
        assert!(v["measures"].is_array() && v["values"].is_array());
        assert!(v["objective"].is_number() && v["multiplier"].is_number());
    }
}
