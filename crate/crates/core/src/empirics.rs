//! Monte-Carlo lower-tail probabilities of subgraph densities in `G(n, p)`.
//!
//! Plain sampling only: each trial draws one graph from its own ChaCha stream
//! `(seed, trial)`, so estimates are reproducible and independent of thread
//! scheduling. Graphs are stored as adjacency bitsets; triangles are counted
//! by intersecting the rows of each edge, other patterns by a depth-first
//! homomorphism count with bitset candidate sets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::Entropy;
use crate::error::{invalid, Result};
use crate::graph::Graph;
use crate::oracle::{solve_lt, SolverOptions};
use crate::symcheck::lt_k3_certificate;

/// Largest pattern handled by exact counting.
pub const MAX_PATTERN_VERTICES: usize = 5;
/// Largest host graph.
pub const MAX_HOST_VERTICES: usize = 200;
/// Two-sided 95% normal quantile used by the Wilson interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Simple graph on `n` vertices as adjacency bitsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitGraph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl BitGraph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Self {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    /// Samples `G(n, p)` from `rng`, visiting pairs `i < j` in order.
    pub fn sample<R: Rng>(n: usize, p: f64, rng: &mut R) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.rows[i * self.words + j / 64] |= 1 << (j % 64);
        self.rows[j * self.words + i / 64] |= 1 << (i % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.row(i)[j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words..(i + 1) * self.words]
    }

    pub fn edge_count(&self) -> u64 {
        self.rows
            .iter()
            .map(|w| u64::from(w.count_ones()))
            .sum::<u64>()
            / 2
    }

    /// Number of triangles (unordered vertex triples).
    pub fn triangle_count(&self) -> u64 {
        let mut total = 0u64;
        for i in 0..self.n {
            let ri = self.row(i);
            for j in i + 1..self.n {
                if !self.has_edge(i, j) {
                    continue;
                }
                let rj = self.row(j);
                // common neighbours above j
                for w in j / 64..self.words {
                    let mut common = ri[w] & rj[w];
                    if w == j / 64 {
                        let shift = j % 64 + 1;
                        common = if shift == 64 {
                            0
                        } else {
                            common >> shift << shift
                        };
                    }
                    total += u64::from(common.count_ones());
                }
            }
        }
        total
    }

    /// `hom(H, G)`: maps `V(H) → V(G)` sending edges to edges.
    pub fn hom_count(&self, h: &Graph) -> Result<u64> {
        check_sizes(h, self.n)?;
        let order = search_order(h);
        let mut pos = vec![0; h.v()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let back: Vec<Vec<usize>> = order
            .iter()
            .map(|&v| {
                h.neighbors(v)
                    .into_iter()
                    .filter(|&u| pos[u] < pos[v])
                    .map(|u| pos[u])
                    .collect()
            })
            .collect();
        let mut full = vec![0u64; self.words];
        for i in 0..self.n {
            full[i / 64] |= 1 << (i % 64);
        }
        let mut assign = vec![0usize; h.v()];
        Ok(self.extend(&back, &full, 0, &mut assign))
    }

    fn candidates(&self, back: &[usize], full: &[u64], assign: &[usize]) -> Vec<u64> {
        let mut c = full.to_vec();
        for &b in back {
            for (cw, rw) in c.iter_mut().zip(self.row(assign[b])) {
                *cw &= rw;
            }
        }
        c
    }

    fn extend(&self, back: &[Vec<usize>], full: &[u64], depth: usize, assign: &mut [usize]) -> u64 {
        let cand = self.candidates(&back[depth], full, assign);
        if depth + 1 == back.len() {
            return cand.iter().map(|w| u64::from(w.count_ones())).sum();
        }
        let mut total = 0;
        for (w, &word) in cand.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                assign[depth] = w * 64 + b;
                total += self.extend(back, full, depth + 1, assign);
            }
        }
        total
    }

    /// `t(H, G) = hom(H, G)/n^{v(H)}`.
    pub fn density(&self, h: &Graph) -> Result<f64> {
        let hom = if is_triangle(h) {
            check_sizes(h, self.n)?;
            6 * self.triangle_count()
        } else {
            self.hom_count(h)?
        };
        Ok(hom as f64 / (self.n as f64).powi(h.v() as i32))
    }
}

fn is_triangle(h: &Graph) -> bool {
    h.v() == 3 && h.e() == 3
}

fn check_sizes(h: &Graph, n: usize) -> Result<()> {
    if h.v() > MAX_PATTERN_VERTICES || n > MAX_HOST_VERTICES {
        return Err(invalid(format!(
            "exact counting supports v(H) <= {MAX_PATTERN_VERTICES} and n <= {MAX_HOST_VERTICES}, got v(H) = {}, n = {n}",
            h.v()
        )));
    }
    if n < h.v() {
        return Err(invalid(format!("n = {n} is smaller than v(H) = {}", h.v())));
    }
    Ok(())
}

/// Vertices ordered so that each one after the first of its component has an
/// earlier neighbour, highest degree first.
fn search_order(h: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(h.v());
    let mut placed = vec![false; h.v()];
    while order.len() < h.v() {
        let next = (0..h.v())
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = h.neighbors(v).iter().filter(|&&u| placed[u]).count();
                (links, h.degree(v), std::cmp::Reverse(v))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
    }
    order
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("p = {p} must lie in [0, 1]")))
    }
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `t(H, G)` for one `G ~ G(n, p)`.
pub fn sample_subgraph_density(h: &Graph, n: usize, p: f64, seed: u64) -> Result<f64> {
    check_p(p)?;
    check_sizes(h, n)?;
    BitGraph::sample(n, p, &mut trial_rng(seed, 0)).density(h)
}

/// Densities of `trials` independent graphs; trial `i` uses stream `i`.
pub fn sample_densities(h: &Graph, n: usize, p: f64, trials: u64, seed: u64) -> Result<Vec<f64>> {
    check_p(p)?;
    check_sizes(h, n)?;
    (0..trials)
        .into_par_iter()
        .map(|i| BitGraph::sample(n, p, &mut trial_rng(seed, i)).density(h))
        .collect()
}

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let phat = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if hits == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo.min(phat), hi.max(phat))
}

#[derive(Debug, Clone, Serialize)]
pub struct TailEstimate {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    /// `q/p`.
    pub threshold_ratio: f64,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// `log p̂`; `None` when there were no hits.
    pub log_prob: Option<f64>,
    /// `(log ci_lo, log ci_hi)`; the lower end is `-inf` when censored.
    pub log_prob_ci: (f64, f64),
    pub censored: bool,
    /// `−(2/n²) log p̂`.
    pub empirical_rate: Option<f64>,
    /// Variational value used for the prediction (`LT_p(H, q)` or an
    /// oracle upper bound on it).
    pub lt_value: Option<f64>,
    /// `(n²/2)·LT`, the predicted `−log P` to leading order.
    pub predicted_rate: Option<f64>,
}

impl TailEstimate {
    fn new(n: usize, p: f64, q: f64, trials: u64, hits: u64, lt_value: Option<f64>) -> Self {
        let p_hat = hits as f64 / trials as f64;
        let (ci_lo, ci_hi) = wilson_interval(hits, trials, Z95);
        let censored = hits == 0;
        let log_prob = (!censored).then(|| p_hat.ln());
        let n2 = (n * n) as f64;
        Self {
            n,
            p,
            q,
            threshold_ratio: q / p,
            trials,
            hits,
            p_hat,
            ci_lo,
            ci_hi,
            log_prob,
            log_prob_ci: (ci_lo.ln(), ci_hi.ln()),
            censored,
            empirical_rate: log_prob.map(|l| -2.0 * l / n2),
            lt_value,
            predicted_rate: lt_value.map(|v| 0.5 * n2 * v),
        }
    }

    pub const CSV_HEADER: &'static str = "n,p,q,trials,hits,p_hat,ci_lo,ci_hi,predicted_rate";

    /// One CSV row in [`Self::CSV_HEADER`] order; a missing prediction is an
    /// empty field.
    pub fn csv_row(&self) -> String {
        let pred = self
            .predicted_rate
            .map(|v| v.to_string())
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.p,
            self.q,
            self.trials,
            self.hits,
            self.p_hat,
            self.ci_lo,
            self.ci_hi,
            pred
        )
    }
}

/// `LT_p(H, q)`: exact `I_p(q)` where the triangle certificate holds,
/// otherwise the 4-block oracle value (an upper bound). `None` outside
/// `0 < q ≤ p < 1`.
pub fn variational_rate(h: &Graph, p: f64, q: f64) -> Result<Option<f64>> {
    if !(q > 0.0 && q <= p && p < 1.0) {
        return Ok(None);
    }
    let ip = Entropy::FiniteP { p };
    if is_triangle(h) && lt_k3_certificate(p, q)?.is_certified() {
        return Ok(Some(ip.value(q)));
    }
    let sol = solve_lt(h, ip, q, 4, &SolverOptions::default())?;
    Ok(Some(sol.objective))
}

/// Empirical `P(t(H, G(n,p)) ≤ q^{e(H)})` with a Wilson interval and the
/// variational prediction.
pub fn lower_tail_estimate(
    h: &Graph,
    n: usize,
    p: f64,
    q: f64,
    trials: u64,
    seed: u64,
) -> Result<TailEstimate> {
    Ok(lower_tail_curve(h, n, p, &[q], trials, seed)?.remove(0))
}

/// [`lower_tail_estimate`] for several thresholds on one set of sampled
/// graphs (common random numbers), so the estimates are monotone in `q`.
pub fn lower_tail_curve(
    h: &Graph,
    n: usize,
    p: f64,
    qs: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<TailEstimate>> {
    if trials == 0 {
        return Err(invalid("trials must be at least 1"));
    }
    if qs.iter().any(|q| !(*q >= 0.0 && *q <= 1.0)) {
        return Err(invalid("thresholds q must lie in [0, 1]"));
    }
    let ts = sample_densities(h, n, p, trials, seed)?;
    let m = h.e() as i32;
    qs.iter()
        .map(|&q| {
            let threshold = q.powi(m);
            let hits = ts.iter().filter(|&&t| t <= threshold).count() as u64;
            let lt = variational_rate(h, p, q)?;
            Ok(TailEstimate::new(n, p, q, trials, hits, lt))
        })
        .collect()
}
