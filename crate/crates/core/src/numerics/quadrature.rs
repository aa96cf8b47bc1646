//! Gauss-Laguerre, Gauss-Chebyshev (first kind) and Fejér rules.
//!
//! Laguerre weights fall below the smallest positive `f64` once the order
//! passes roughly 180, so rules keep their weights in log form and callers
//! exponentiate inside the integrand product.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest Gauss-Laguerre order that can be built.
pub const MAX_LAGUERRE_ORDER: usize = 1024;
/// Largest Gauss-Chebyshev order that can be built.
pub const MAX_CHEBYSHEV_ORDER: usize = 1 << 20;

/// Log-weight below which a Laguerre node cannot move a sum of O(1) terms.
pub const NEGLIGIBLE_LOG_WEIGHT: f64 = -50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    /// ∫₀^∞ e^{−x} f(x) dx
    Laguerre,
    /// ∫₋₁¹ f(x)/√(1−x²) dx with equal weights π/W
    Chebyshev1,
    /// ∫₋₁¹ f(x) dx on the Chebyshev nodes (Fejér's first rule)
    Fejer1,
}

/// Nodes and weights of a Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    kind: QuadKind,
    nodes: Vec<f64>,
    log_weights: Vec<f64>,
}

impl QuadRule {
    pub fn kind(&self) -> QuadKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Natural log of every weight.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.log_weights[i].exp()
    }

    /// Weights in linear scale; tail entries of large Laguerre rules are 0.
    pub fn weights(&self) -> Vec<f64> {
        self.log_weights.iter().map(|lw| lw.exp()).collect()
    }

    /// `(node, weight)` pairs, skipping nodes whose weight is below
    /// `e^{NEGLIGIBLE_LOG_WEIGHT}`.
    pub fn significant(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.log_weights)
            .filter(|(_, lw)| **lw > NEGLIGIBLE_LOG_WEIGHT)
            .map(|(x, lw)| (*x, lw.exp()))
    }
}

/// Gauss-Laguerre rule of order `order` (weight function `e^{−x}`).
///
/// Nodes are eigenvalues of the symmetric Jacobi matrix, polished by Newton
/// steps on `L_n`; weights come from `x / ((n+1) L_{n+1}(x))²` in log form.
pub fn laguerre_rule(order: usize) -> Result<QuadRule> {
    if !(1..=MAX_LAGUERRE_ORDER).contains(&order) {
        return Err(Error::OrderOutOfRange {
            order,
            min: 1,
            max: MAX_LAGUERRE_ORDER,
        });
    }
    let n = order;
    let mut diag: Vec<f64> = (0..n).map(|i| (2 * i + 1) as f64).collect();
    let mut off: Vec<f64> = (0..n).map(|i| if i + 1 < n { (i + 1) as f64 } else { 0.0 }).collect();
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(f64::total_cmp);

    let nodes: Vec<f64> = diag.into_iter().map(|x| newton_polish(n, x)).collect();
    let nf = n as f64;
    let log_weights = nodes
        .iter()
        .map(|&x| {
            let (_, next, log_scale) = scaled_laguerre(n + 1, x);
            x.ln() - 2.0 * (nf + 1.0).ln() - 2.0 * (next.abs().ln() + log_scale)
        })
        .collect();
    Ok(QuadRule {
        kind: QuadKind::Laguerre,
        nodes,
        log_weights,
    })
}

/// Gauss-Chebyshev nodes `z_w = cos((2w−1)π/(2W))`, `w = 1..W`, weights `π/W`.
pub fn chebyshev_nodes(order: usize) -> Result<QuadRule> {
    if !(1..=MAX_CHEBYSHEV_ORDER).contains(&order) {
        return Err(Error::OrderOutOfRange {
            order,
            min: 1,
            max: MAX_CHEBYSHEV_ORDER,
        });
    }
    let w = order as f64;
    let nodes = (1..=order)
        .map(|i| ((2 * i - 1) as f64 * PI / (2.0 * w)).cos())
        .collect();
    Ok(QuadRule {
        kind: QuadKind::Chebyshev1,
        nodes,
        log_weights: vec![(PI / w).ln(); order],
    })
}

/// Fejér's first rule: the Chebyshev nodes with weights that integrate `f`
/// itself, converging spectrally for smooth `f`.
///
/// Weighting the plain Gauss-Chebyshev rule by `√(1−x²)` also targets ∫ f dx,
/// but the square root's endpoint behaviour caps its error at O(W⁻²).
pub fn fejer_rule(order: usize) -> Result<QuadRule> {
    let cheb = chebyshev_nodes(order)?;
    let w = order as f64;
    let log_weights = (1..=order)
        .map(|j| {
            let theta = (2 * j - 1) as f64 * PI / (2.0 * w);
            let tail: f64 = (1..=order / 2)
                .map(|k| {
                    let k = k as f64;
                    (2.0 * k * theta).cos() / (4.0 * k * k - 1.0)
                })
                .sum();
            (2.0 / w * (1.0 - 2.0 * tail)).ln()
        })
        .collect();
    Ok(QuadRule {
        kind: QuadKind::Fejer1,
        nodes: cheb.nodes,
        log_weights,
    })
}

// Evaluates (L_{n−1}(x), L_n(x)) with both rescaled by e^{-log_scale} so the
// recurrence survives orders where L_n itself overflows.
fn scaled_laguerre(n: usize, x: f64) -> (f64, f64, f64) {
    let mut prev = 1.0;
    let mut cur = 1.0 - x;
    let mut log_scale = 0.0;
    if n == 0 {
        return (0.0, 1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > 1e150 {
            prev *= 1e-150;
            cur *= 1e-150;
            log_scale += 150.0 * 10f64.ln();
        }
    }
    (prev, cur, log_scale)
}

fn newton_polish(n: usize, mut x: f64) -> f64 {
    let nf = n as f64;
    for _ in 0..4 {
        let (prev, cur, _) = scaled_laguerre(n, x);
        // x L_n' = n (L_n − L_{n−1}); the shared scale cancels in the ratio
        let deriv_times_x = nf * (cur - prev);
        if deriv_times_x == 0.0 {
            break;
        }
        let step = x * cur / deriv_times_x;
        x -= step;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
// `off[i]` couples rows i and i+1; eigenvalues overwrite `diag`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let n = diag.len();
    for l in 0..n {
        let mut sweeps = 0;
        'converge: loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NoConvergence {
                    function: "laguerre_rule",
                    iterations: MAX_SWEEPS,
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    continue 'converge;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_integrates_polynomials_and_smooth_functions() {
        let r = fejer_rule(9).unwrap();
        for k in 0..9 {
            let got: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "k = {k}");
        }
        let r = fejer_rule(40).unwrap();
        let got: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.exp()).sum();
        assert!((got - (1f64.exp() - (-1f64).exp())).abs() < 1e-14);
        assert!(r.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn order_one_rule() {
        let r = laguerre_rule(1).unwrap();
        assert!((r.nodes()[0] - 1.0).abs() < 1e-15);
        assert!((r.weight(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_orders() {
        assert!(matches!(laguerre_rule(0), Err(Error::OrderOutOfRange { .. })));
        assert!(matches!(laguerre_rule(MAX_LAGUERRE_ORDER + 1), Err(Error::OrderOutOfRange { .. })));
        assert!(chebyshev_nodes(0).is_err());
    }

    #[test]
    fn laguerre_moments_are_factorials() {
        for &n in &[5usize, 20, 64, 150] {
            let r = laguerre_rule(n).unwrap();
            let mut fact = 1.0;
            for k in 0..=8 {
                if k > 0 {
                    fact *= k as f64;
                }
                let got: f64 = r
                    .nodes()
                    .iter()
                    .zip(r.weights())
                    .map(|(x, w)| w * x.powi(k))
                    .sum();
                assert!(((got - fact) / fact).abs() < 1e-10, "n = {n}, k = {k}");
            }
        }
    }

    #[test]
    fn large_order_log_weights_stay_finite() {
        let r = laguerre_rule(300).unwrap();
        assert!(r.log_weights().iter().all(|lw| lw.is_finite()));
        assert!(r.weights().contains(&0.0));
        let total: f64 = r.weights().iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
        let mean: f64 = r.significant().map(|(x, w)| x * w).sum();
        assert!((mean - 1.0).abs() < 1e-10);
    }

    #[test]
    fn chebyshev_small_orders() {
        assert!(chebyshev_nodes(1).unwrap().nodes()[0].abs() < 1e-16);
        let r = chebyshev_nodes(2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((r.nodes()[0] - h).abs() < 1e-15 && (r.nodes()[1] + h).abs() < 1e-15);
        assert!((r.weight(0) - PI / 2.0).abs() < 1e-15);
    }
}
