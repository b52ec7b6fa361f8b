//! Gauss-Legendre quadrature.
//!
//! Nodes and weights come from Newton iteration on the Legendre recurrence;
//! this is accurate to machine precision for the node counts used here
//! (well below 10⁵). Composite rules split the interval into equal panels,
//! which is what the oscillatory integrands in this crate need: the panel
//! count grows with the oscillation frequency, the per-panel order stays
//! fixed.

use num_complex::Complex64;

/// A Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Build an `n`-point rule. Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                let step = p / d;
                x -= step;
                if step.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
            let (_, d) = legendre_with_derivative(n, 0.0);
            weights[n / 2] = 2.0 / (d * d);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes mapped to [a, b] together with the scaled weights.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// ∫_a^b f(x) dx with a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// ∫_a^b f(x) dx for complex-valued f with a single panel.
    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(
        &self,
        a: f64,
        b: f64,
        mut f: F,
    ) -> Complex64 {
        self.mapped(a, b).map(|(x, w)| f(x) * w).sum()
    }

    /// Composite rule over `panels` equal subintervals.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        assert!(panels > 0);
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + k as f64 * h;
                self.integrate(lo, lo + h, &mut f)
            })
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
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
    // derivative from the standard relation (1-x^2) P_n' = n (P_{n-1} - x P_n)
    let d = if (1.0 - x * x).abs() > f64::EPSILON {
        n as f64 * (p0 - x * p1) / (1.0 - x * x)
    } else {
        // endpoint limit, P_n'(±1) = ±^{n+1} n(n+1)/2
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        sign * n as f64 * (n as f64 + 1.0) / 2.0
    };
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_rule_matches_reference() {
        // classical 5-point Gauss-Legendre abscissae
        let rule = GaussLegendre::new(5);
        let expected = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        for (x, e) in rule.nodes.iter().zip(expected) {
            assert!((x - e).abs() < 1e-14, "{x} vs {e}");
        }
        let wsum: f64 = rule.weights.iter().sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn polynomial_exactness() {
        // an n-point rule integrates degree 2n-1 exactly
        let rule = GaussLegendre::new(8);
        for deg in 0..16 {
            let exact = (3.0f64.powi(deg + 1) - (-1.0f64).powi(deg + 1)) / (deg as f64 + 1.0);
            let got = rule.integrate(-1.0, 3.0, |x| x.powi(deg));
            assert!(
                (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "deg {deg}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn oscillatory_integral_with_panels() {
        // ∫_0^1 cos(40 x) dx = sin(40)/40
        let rule = GaussLegendre::new(16);
        let got = rule.integrate_panels(0.0, 1.0, 8, |x| (40.0 * x).cos());
        let exact = 40.0f64.sin() / 40.0;
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn complex_integrand() {
        // ∫_0^π e^{ix} dx = 2i
        let rule = GaussLegendre::new(24);
        let got = rule.integrate_complex(0.0, std::f64::consts::PI, |x| {
            Complex64::new(0.0, x).exp()
        });
        assert!((got - Complex64::new(0.0, 2.0)).norm() < 1e-13);
    }
}
