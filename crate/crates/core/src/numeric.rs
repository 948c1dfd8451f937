//! Small numerical building blocks: compensated summation, bracketed
//! bisection and seeded golden-section minimization.

use crate::error::{Error, Result};

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = KahanSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Pairwise summation of a slice; the reduction tree depends only on the
/// slice length, so results are reproducible regardless of threading.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        xs.iter().copied().collect::<KahanSum>().value()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// `n` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// `n` log-spaced points covering `[lo, hi]` inclusive (`0 < lo < hi`).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    linspace(a, b, n)
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                t.exp()
            }
        })
        .collect()
}

/// Root of `f` on `[lo, hi]` by bisection. Requires a sign change; stops when
/// the bracket is narrower than `tol` and returns its midpoint.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoBracket {
            lo,
            hi,
            flo: fa,
            fhi: fb,
        });
    }
    let neg_at_a = fa < 0.0;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Boundary of a monotone predicate: `pred(lo)` must be true and `pred(hi)`
/// false. Returns `(last_true, first_false)` with width at most `tol`.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(
    mut pred: P,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        if pred(m) {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Global minimum of `f` on `[lo, hi]`: an `n`-point grid locates the best
/// cell, golden-section refines inside its neighbours. Non-finite grid values
/// are ignored.
pub fn minimize_seeded<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let xs = linspace(lo, hi, n.max(3));
    let mut best = (lo, f64::INFINITY);
    let mut best_i = 0;
    for (i, &x) in xs.iter().enumerate() {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let a = xs[best_i.saturating_sub(1)];
    let b = xs[(best_i + 1).min(xs.len() - 1)];
    let (x, v) = golden_section(&mut f, a, b, 1e-13 * (1.0 + hi.abs()));
    if v < best.1 {
        (x, v)
    } else {
        best
    }
}
