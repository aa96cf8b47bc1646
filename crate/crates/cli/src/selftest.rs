//! Closed-form identities the special functions and quadrature rules must meet.

use std::f64::consts::PI;

use anyhow::Result;
use mfris_core::analysis::{QuadOrders, QuadRules};
use mfris_core::numerics::{
    bessel_i, chebyshev_nodes, fejer_rule, gamma_fn, gauss_2f1, kummer_1f1, laguerre_rule,
    lower_incomplete_gamma, BesselOrder, QuadRule,
};

struct Check {
    name: &'static str,
    got: f64,
    want: f64,
    tol: f64,
}

impl Check {
    fn passes(&self) -> bool {
        (self.got - self.want).abs() <= self.tol * self.want.abs().max(1.0)
    }
}

fn checks(orders: QuadOrders) -> mfris_core::Result<Vec<Check>> {
    let integrate = |rule: &QuadRule, f: &dyn Fn(f64) -> f64| -> f64 {
        rule.nodes().iter().zip(rule.weights()).map(|(x, w)| w * f(*x)).sum()
    };
    let laguerre = laguerre_rule(orders.x)?;
    let chebyshev = chebyshev_nodes(orders.w)?;
    let fejer = fejer_rule(orders.w)?;
    Ok(vec![
        Check { name: "Γ(5) = 24", got: gamma_fn(5.0)?, want: 24.0, tol: 1e-13 },
        Check { name: "Γ(½) = √π", got: gamma_fn(0.5)?, want: PI.sqrt(), tol: 1e-13 },
        Check {
            name: "γ(1, 2) = 1 − e⁻²",
            got: lower_incomplete_gamma(1.0, 2.0)?,
            want: 1.0 - (-2.0f64).exp(),
            tol: 1e-13,
        },
        Check { name: "₁F₁(a; a; z) = eᶻ", got: kummer_1f1(1.5, 1.5, 0.7)?, want: 0.7f64.exp(), tol: 1e-13 },
        Check { name: "₁F₁(a; b; 0) = 1", got: kummer_1f1(-0.5, 1.0, 0.0)?, want: 1.0, tol: 0.0 },
        Check {
            name: "₂F₁(1, 1; 2; z) = −ln(1−z)/z",
            got: gauss_2f1(1.0, 1.0, 2.0, 0.5)?,
            want: 2.0 * 2f64.ln(),
            tol: 1e-13,
        },
        Check { name: "I₀(0) = 1", got: bessel_i(BesselOrder::Zero, 0.0)?, want: 1.0, tol: 0.0 },
        Check { name: "I₁(0) = 0", got: bessel_i(BesselOrder::One, 0.0)?, want: 0.0, tol: 0.0 },
        Check {
            name: "Laguerre weights sum to 1",
            got: laguerre.weights().iter().sum(),
            want: 1.0,
            // Rounding in the eigenvector components grows with the order.
            tol: 1e-10,
        },
        Check {
            name: "Laguerre log-weights finite",
            got: laguerre.log_weights().iter().filter(|w| !w.is_finite()).count() as f64,
            want: 0.0,
            tol: 0.0,
        },
        Check { name: "Laguerre ∫x e⁻ˣ = 1", got: integrate(&laguerre, &|x| x), want: 1.0, tol: 1e-10 },
        Check {
            name: "Chebyshev ∫x²/√(1−x²) = π/2",
            got: integrate(&chebyshev, &|x| x * x),
            want: PI / 2.0,
            tol: 1e-13,
        },
        Check { name: "Fejér ∫x² = 2/3", got: integrate(&fejer, &|x| x * x), want: 2.0 / 3.0, tol: 1e-13 },
        Check {
            name: "Fejér ∫eˣ = e − 1/e",
            got: integrate(&fejer, &f64::exp),
            want: 1f64.exp() - (-1f64).exp(),
            tol: 1e-13,
        },
    ])
}

/// Prints one line per check and reports whether all passed.
pub fn run(orders: QuadOrders) -> Result<bool> {
    QuadRules::new(orders)?;
    let checks = checks(orders)?;
    let mut all = true;
    for c in &checks {
        let ok = c.passes();
        all &= ok;
        println!(
            "{:<32} {:<4} got {:.15e}, want {:.15e}",
            c.name,
            if ok { "ok" } else { "FAIL" },
            c.got,
            c.want
        );
    }
    println!("orders {orders}: {}", if all { "all checks passed" } else { "some checks failed" });
    Ok(all)
}
