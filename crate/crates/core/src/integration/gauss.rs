//! Gauss-Legendre rules read as tagged partitions.
//!
//! Cumulative sums of the weights separate consecutive nodes (the
//! Markov-Stieltjes inequalities), so an n-point rule on `[u, w]` is exactly
//! the Riemann sum of a tagged partition of `[u, w]` into n pieces with the
//! nodes as tags.

use std::sync::OnceLock;

/// Number of nodes per rule.
pub const ORDER: usize = 24;

#[derive(Debug, Clone)]
pub struct GaussRule {
    /// Nodes on `[-1, 1]`, increasing.
    pub nodes: Vec<f64>,
    /// Weights on `[-1, 1]`, summing to 2.
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            // Newton iteration from the Tricomi estimate
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    pub fn standard() -> &'static GaussRule {
        static RULE: OnceLock<GaussRule> = OnceLock::new();
        RULE.get_or_init(|| GaussRule::new(ORDER))
    }

    /// Applies the rule on `[lo, hi]`, returning the Riemann sum and the sum
    /// of `|f|` weighted the same way.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: &F, lo: f64, hi: f64) -> (f64, f64, bool) {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut sum = 0.0;
        let mut abs = 0.0;
        let mut finite = true;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let y = f(mid + half * x);
            if !y.is_finite() {
                finite = false;
            }
            sum += w * y;
            abs += w * y.abs();
        }
        (sum * half, abs * half, finite)
    }

    /// Piece boundaries on `[lo, hi]`: `n + 1` increasing points starting at
    /// `lo` and ending at `hi`, with the i-th node strictly between the i-th
    /// and (i+1)-th boundary.
    pub fn piece_bounds(&self, lo: f64, hi: f64) -> Vec<f64> {
        let half = 0.5 * (hi - lo);
        let mut out = Vec::with_capacity(self.nodes.len() + 1);
        out.push(lo);
        let mut acc = 0.0;
        let last = self.weights.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            out.push(if i == last { hi } else { lo + half * acc });
        }
        out
    }
}

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let r = GaussRule::new(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15 && (r.nodes[1] - x).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_high_degree_polynomials() {
        let r = GaussRule::standard();
        let (v, _, _) = r.apply(&|x: f64| x.powi(30), 0.0, 1.0);
        assert!((v - 1.0 / 31.0).abs() < 1e-14);
        let total: f64 = r.weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn cumulative_weights_separate_nodes() {
        for n in [1, 2, 3, 5, 8, 16, ORDER, 40] {
            let r = GaussRule::new(n);
            let b = r.piece_bounds(-1.0, 1.0);
            for (i, x) in r.nodes.iter().enumerate() {
                assert!(b[i] < *x && *x < b[i + 1], "n={n} i={i}");
            }
        }
    }
}
