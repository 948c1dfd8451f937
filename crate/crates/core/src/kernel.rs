//! Symmetric step functions on `[0,1]²`.
//!
//! A [`StepKernel`] is constant on the rectangles `B_i × B_j` of a partition of
//! `[0,1]` into consecutive intervals with lengths `measures[i]`. Values may be
//! any real number, so signed perturbations such as `q ± X` are first-class.
//! A [`StepGraphon`] is a kernel whose values lie in `[0,1]`.
//!
//! Homomorphism densities are computed exactly by summing over all block
//! assignments `V(H) → [k]`. The sum is organised as a nested product over
//! vertices so that zero blocks prune whole subtrees, and the outermost
//! vertex is split across threads with a fixed-order reduction.

use std::ops::Deref;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numeric::{pairwise_sum, KahanSum};

/// Default cap on the number of terms `k^{v(H)}` of an exact enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

const MEASURE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelRepr", into = "KernelRepr")]
pub struct StepKernel {
    measures: Vec<f64>,
    /// Row-major `k × k`.
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct KernelRepr {
    measures: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<KernelRepr> for StepKernel {
    type Error = Error;

    fn try_from(r: KernelRepr) -> Result<Self> {
        StepKernel::new(r.measures, r.values)
    }
}

impl From<StepKernel> for KernelRepr {
    fn from(k: StepKernel) -> Self {
        KernelRepr {
            values: k.rows(),
            measures: k.measures,
        }
    }
}

impl StepKernel {
    /// Validates positivity and normalisation of the block measures, the
    /// shape of the value matrix and its exact symmetry.
    pub fn new(measures: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        let k = measures.len();
        if k == 0 {
            return Err(Error::InvalidKernel("no blocks".into()));
        }
        if measures.iter().any(|&m| !(m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidKernel(
                "block measures must be positive".into(),
            ));
        }
        let total: f64 = measures.iter().copied().collect::<KahanSum>().value();
        if (total - 1.0).abs() > MEASURE_TOL {
            return Err(Error::InvalidKernel(format!(
                "block measures sum to {total}, not 1"
            )));
        }
        if values.len() != k || values.iter().any(|row| row.len() != k) {
            return Err(Error::InvalidKernel(format!(
                "value matrix must be {k} x {k}"
            )));
        }
        for i in 0..k {
            for j in 0..k {
                if !values[i][j].is_finite() {
                    return Err(Error::InvalidKernel("non-finite value".into()));
                }
                if values[i][j] != values[j][i] {
                    return Err(Error::InvalidKernel(format!(
                        "values[{i}][{j}] != values[{j}][{i}]"
                    )));
                }
            }
        }
        Ok(Self {
            measures,
            values: values.into_iter().flatten().collect(),
        })
    }

    /// Kernel on `k` equal blocks.
    pub fn uniform(values: Vec<Vec<f64>>) -> Result<Self> {
        let k = values.len();
        Self::new(vec![1.0 / k as f64; k], values)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            measures: vec![1.0],
            values: vec![c],
        }
    }

    /// Builds a kernel on equal blocks from the upper triangle
    /// `(0,0), (0,1), …, (0,k−1), (1,1), …` of its value matrix.
    pub fn from_upper_triangle(k: usize, upper: &[f64]) -> Result<Self> {
        if upper.len() != k * (k + 1) / 2 {
            return Err(Error::InvalidKernel(format!(
                "expected {} upper-triangle values, got {}",
                k * (k + 1) / 2,
                upper.len()
            )));
        }
        let mut values = vec![vec![0.0; k]; k];
        let mut it = upper.iter();
        for i in 0..k {
            for j in i..k {
                let v = *it.next().unwrap();
                values[i][j] = v;
                values[j][i] = v;
            }
        }
        Self::uniform(values)
    }

    /// Number of blocks.
    pub fn k(&self) -> usize {
        self.measures.len()
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.k() + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.k()).map(<[f64]>::to_vec).collect()
    }

    /// Upper triangle of the value matrix, row by row.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let k = self.k();
        (0..k)
            .flat_map(|i| (i..k).map(move |j| (i, j)))
            .map(|(i, j)| self.value(i, j))
            .collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Applies `f` entrywise; the block structure is unchanged.
    pub fn pointwise_map<F: Fn(f64) -> f64>(&self, f: F) -> StepKernel {
        StepKernel {
            measures: self.measures.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `E[f(W)] = Σ_{i,j} μ_i μ_j f(W_ij)`. A non-finite `f` value is a
    /// domain error; limit conventions belong inside `f`.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let k = self.k();
        let mut acc = KahanSum::new();
        for i in 0..k {
            for j in 0..k {
                let w = self.value(i, j);
                let fv = f(w);
                if !fv.is_finite() {
                    return Err(Error::Domain {
                        what: "expectation integrand",
                        x: w,
                        lo: f64::NEG_INFINITY,
                        hi: f64::INFINITY,
                    });
                }
                acc.add(self.measures[i] * self.measures[j] * fv);
            }
        }
        Ok(acc.value())
    }

    /// Both kernels expressed on their common refinement (the partition
    /// generated by both sets of breakpoints).
    pub fn refine(&self, other: &StepKernel) -> (StepKernel, StepKernel) {
        let cuts = |m: &[f64]| -> Vec<f64> {
            let mut acc = 0.0;
            m.iter()
                .map(|&x| {
                    acc += x;
                    acc
                })
                .collect()
        };
        let (ca, cb) = (cuts(&self.measures), cuts(&other.measures));
        let (mut ia, mut ib) = (0usize, 0usize);
        let mut prev = 0.0;
        let mut cells: Vec<(f64, usize, usize)> = Vec::new();
        while ia < ca.len() && ib < cb.len() {
            let (xa, xb) = (ca[ia], cb[ib]);
            let next = xa.min(xb);
            let width = next - prev;
            if width > MEASURE_TOL {
                cells.push((width, ia, ib));
            }
            prev = next;
            if (xa - xb).abs() <= MEASURE_TOL {
                ia += 1;
                ib += 1;
            } else if xa < xb {
                ia += 1;
            } else {
                ib += 1;
            }
        }
        let total: f64 = cells.iter().map(|c| c.0).sum();
        let measures: Vec<f64> = cells.iter().map(|c| c.0 / total).collect();
        let lift = |kern: &StepKernel, pick: &dyn Fn(&(f64, usize, usize)) -> usize| {
            let n = cells.len();
            let mut values = Vec::with_capacity(n * n);
            for a in &cells {
                for b in &cells {
                    values.push(kern.value(pick(a), pick(b)));
                }
            }
            StepKernel {
                measures: measures.clone(),
                values,
            }
        };
        (lift(self, &|c| c.1), lift(other, &|c| c.2))
    }

    /// Entrywise combination on the common refinement.
    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &StepKernel, f: F) -> StepKernel {
        let (a, b) = if self.measures == other.measures {
            (self.clone(), other.clone())
        } else {
            self.refine(other)
        };
        StepKernel {
            values: a
                .values
                .iter()
                .zip(&b.values)
                .map(|(&x, &y)| f(x, y))
                .collect(),
            measures: a.measures,
        }
    }

    /// Relabels blocks: new block `i` is old block `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<StepKernel> {
        let k = self.k();
        let mut seen = vec![false; k];
        if perm.len() != k
            || perm
                .iter()
                .any(|&p| p >= k || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::InvalidKernel("not a permutation".into()));
        }
        let mut values = Vec::with_capacity(k * k);
        for &pi in perm {
            for &pj in perm {
                values.push(self.value(pi, pj));
            }
        }
        Ok(StepKernel {
            measures: perm.iter().map(|&p| self.measures[p]).collect(),
            values,
        })
    }

    /// Splits block `b` into two halves that copy its values.
    pub fn split_block(&self, b: usize) -> StepKernel {
        let k = self.k();
        let src: Vec<usize> = (0..k)
            .flat_map(|i| if i == b { vec![i, i] } else { vec![i] })
            .collect();
        let mut measures: Vec<f64> = src.iter().map(|&i| self.measures[i]).collect();
        measures[b] /= 2.0;
        measures[b + 1] /= 2.0;
        let mut values = Vec::with_capacity(src.len() * src.len());
        for &i in &src {
            for &j in &src {
                values.push(self.value(i, j));
            }
        }
        StepKernel { measures, values }
    }
}

/// A step kernel with values in `[0,1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepKernel", into = "StepKernel")]
pub struct StepGraphon(StepKernel);

impl TryFrom<StepKernel> for StepGraphon {
    type Error = Error;

    fn try_from(k: StepKernel) -> Result<Self> {
        if k.values.iter().all(|&v| (0.0..=1.0).contains(&v)) {
            Ok(StepGraphon(k))
        } else {
            Err(Error::InvalidKernel(
                "graphon values must lie in [0, 1]".into(),
            ))
        }
    }
}

impl From<StepGraphon> for StepKernel {
    fn from(g: StepGraphon) -> Self {
        g.0
    }
}

impl Deref for StepGraphon {
    type Target = StepKernel;

    fn deref(&self) -> &StepKernel {
        &self.0
    }
}

impl AsRef<StepKernel> for StepGraphon {
    fn as_ref(&self) -> &StepKernel {
        &self.0
    }
}

impl StepGraphon {
    pub fn new(measures: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        StepKernel::new(measures, values)?.try_into()
    }

    pub fn constant(c: f64) -> Result<Self> {
        StepKernel::constant(c).try_into()
    }

    /// The two-block graphon with `a` on the diagonal blocks and `b` across.
    pub fn bip(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![0.5, 0.5], vec![vec![a, b], vec![b, a]])
    }

    pub fn kernel(&self) -> &StepKernel {
        &self.0
    }
}

/// Vertex order plus, for each position, the earlier positions it is joined to.
struct Plan {
    back: Vec<Vec<usize>>,
}

impl Plan {
    fn new(order: &[usize], edges: &[(usize, usize)]) -> Self {
        let mut pos = vec![usize::MAX; order.iter().max().map_or(0, |m| m + 1)];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut back = vec![Vec::new(); order.len()];
        for &(u, v) in edges {
            let (pu, pv) = (pos[u], pos[v]);
            let (lo, hi) = (pu.min(pv), pu.max(pv));
            back[hi].push(lo);
        }
        Plan { back }
    }

    /// Nested sum over positions `from..` given blocks fixed for `..from`.
    fn sum_from(&self, w: &StepKernel, from: usize, assign: &mut [usize]) -> f64 {
        if from == assign.len() {
            return 1.0;
        }
        let mut acc = KahanSum::new();
        for b in 0..w.k() {
            let mut prod = w.measures[b];
            for &j in &self.back[from] {
                prod *= w.value(b, assign[j]);
                if prod == 0.0 {
                    break;
                }
            }
            if prod == 0.0 {
                continue;
            }
            assign[from] = b;
            acc.add(prod * self.sum_from(w, from + 1, assign));
        }
        acc.value()
    }
}

fn check_budget(k: usize, exponent: usize, budget: u64) -> Result<()> {
    let terms = (k as f64).powi(exponent as i32);
    if terms > budget as f64 {
        Err(Error::Budget { terms, budget })
    } else {
        Ok(())
    }
}

/// Enumerations below this many terms run on the calling thread.
const PARALLEL_THRESHOLD: f64 = 1e4;

fn is_small(k: usize, exponent: usize) -> bool {
    (k as f64).powi(exponent as i32) < PARALLEL_THRESHOLD
}

/// `t(H, W)` with the default budget.
pub fn density(h: &Graph, w: &StepKernel) -> Result<f64> {
    density_with_budget(h, w, DEFAULT_BUDGET)
}

/// Exact `t(H, W)`; fails if `k^{v(H)}` exceeds `budget`.
pub fn density_with_budget(h: &Graph, w: &StepKernel, budget: u64) -> Result<f64> {
    check_budget(w.k(), h.v(), budget)?;
    let order: Vec<usize> = (0..h.v()).collect();
    let plan = Plan::new(&order, h.edges());
    let n = h.v();
    let term = |b: usize| {
        let mut assign = vec![0usize; n];
        assign[0] = b;
        w.measures[b] * plan.sum_from(w, 1, &mut assign)
    };
    let partial: Vec<f64> = if is_small(w.k(), n) {
        (0..w.k()).map(term).collect()
    } else {
        (0..w.k()).into_par_iter().map(term).collect()
    };
    Ok(pairwise_sum(&partial))
}

/// `t'(H, W)` with the default budget.
pub fn functional_derivative(h: &Graph, w: &StepKernel) -> Result<StepKernel> {
    functional_derivative_with_budget(h, w, DEFAULT_BUDGET)
}

/// The functional derivative `t'(H,W) = Σ_{ab ∈ E(H)} t_ab(H,W)` as a step
/// kernel on the blocks of `W`. Each `t_ab` is symmetrised, which leaves
/// `E[t'(H,W) U]` unchanged for symmetric `U`.
pub fn functional_derivative_with_budget(
    h: &Graph,
    w: &StepKernel,
    budget: u64,
) -> Result<StepKernel> {
    check_budget(w.k(), h.v(), budget)?;
    let k = w.k();
    let n = h.v();
    let plans: Vec<Plan> = h
        .edges()
        .iter()
        .map(|&(a, b)| {
            let order: Vec<usize> = [a, b]
                .into_iter()
                .chain((0..n).filter(|&v| v != a && v != b))
                .collect();
            let rest: Vec<(usize, usize)> =
                h.edges().iter().copied().filter(|&e| e != (a, b)).collect();
            Plan::new(&order, &rest)
        })
        .collect();
    let cells: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let cell = |&(i, j): &(usize, usize)| {
        let mut acc = KahanSum::new();
        for plan in &plans {
            let mut assign = vec![0usize; n];
            assign[0] = i;
            assign[1] = j;
            // edges between the two fixed endpoints other than ab itself
            let mut prod = 1.0;
            for &p in &plan.back[1] {
                prod *= w.value(j, assign[p]);
            }
            if prod != 0.0 {
                acc.add(prod * plan.sum_from(w, 2, &mut assign));
            }
        }
        acc.value()
    };
    let raw: Vec<f64> = if is_small(k, n) {
        cells.iter().map(cell).collect()
    } else {
        cells.par_iter().map(cell).collect()
    };
    let mut values = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            values[i * k + j] = 0.5 * (raw[i * k + j] + raw[j * k + i]);
        }
    }
    Ok(StepKernel {
        measures: w.measures.clone(),
        values,
    })
}
