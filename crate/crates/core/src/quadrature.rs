//! Gauss-Legendre rules normalized to the unit interval.
//!
//! Every integral in the crate (expected conditional copulas, dependence
//! measures, Kullback-Leibler divergences) goes through a [`QuadratureRule`].
//! Rules are built once and shared by reference.

use std::f64::consts::PI;

/// Default order for one-dimensional rules and for each axis of tensor rules.
pub const DEFAULT_ORDER: usize = 64;

/// Nodes and weights of an `order`-point Gauss-Legendre rule on `[0, 1]`.
///
/// Weights sum to one, so `integrate` returns the mean of `f` under the
/// uniform law on the unit interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Node/weight pairs in ascending node order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `∫₀¹ f(x) dx`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }

    /// `∫ₐᵇ f(x) dx` by the affine map of the rule onto `[a, b]`.
    pub fn integrate_on<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let len = b - a;
        len * self.integrate(|x| f(a + len * x))
    }

    /// `∫₀¹∫₀¹ f(x, y) dx dy` on the tensor-product grid.
    pub fn integrate2<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let mut total = 0.0;
        for (x, wx) in self.iter() {
            let mut row = 0.0;
            for (y, wy) in self.iter() {
                row += wy * f(x, y);
            }
            total += wx * row;
        }
        total
    }

    /// `∫₀¹∫₀¹∫₀¹ f(x, y, z)` on the tensor-product grid.
    pub fn integrate3<F: FnMut(f64, f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let mut total = 0.0;
        for (x, wx) in self.iter() {
            total += wx * self.integrate2(|y, z| f(x, y, z));
        }
        total
    }
}

impl Default for QuadratureRule {
    fn default() -> Self {
        gauss_rule(DEFAULT_ORDER)
    }
}

/// Builds the `order`-point Gauss-Legendre rule mapped to `[0, 1]`.
///
/// Roots of the Legendre polynomial are found by Newton iteration from the
/// Chebyshev-like initial guesses; weights follow from `P'ₙ` at each root.
///
/// # Panics
///
/// Panics if `order < 2`.
pub fn gauss_rule(order: usize) -> QuadratureRule {
    assert!(order >= 2, "quadrature order must be at least 2, got {order}");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // x is the i-th largest root on [-1, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    QuadratureRule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
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
    fn two_point_rule_is_classical() {
        let rule = gauss_rule(2);
        let s = 1.0 / 3f64.sqrt();
        assert!((rule.nodes()[0] - (1.0 - s) / 2.0).abs() < 1e-15);
        assert!((rule.nodes()[1] - (1.0 + s) / 2.0).abs() < 1e-15);
        assert!((rule.weights()[0] - 0.5).abs() < 1e-15);
        assert!((rule.weights()[1] - 0.5).abs() < 1e-15);
        assert!((rule.integrate(|x| x.powi(3)) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exp_integral_at_order_16() {
        let rule = gauss_rule(16);
        let got = rule.integrate(f64::exp);
        assert!((got - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn monomials_up_to_full_degree() {
        for order in [2, 3, 5, 8, 16, 33, 64, 128] {
            let rule = gauss_rule(order);
            assert_eq!(rule.order(), order);
            let wsum: f64 = rule.weights().iter().sum();
            assert!((wsum - 1.0).abs() < 1e-12, "order {order}: {wsum}");
            assert!(rule.nodes().iter().all(|&x| x > 0.0 && x < 1.0));
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            for k in 0..(2 * order) {
                let got = rule.integrate(|x| x.powi(k as i32));
                let want = 1.0 / (k as f64 + 1.0);
                assert!((got - want).abs() < 1e-12, "order {order}, x^{k}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn nodes_ascend() {
        let rule = gauss_rule(31);
        assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        // odd order has the midpoint as a node
        assert!((rule.nodes()[15] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tensor_integrals() {
        let rule = gauss_rule(8);
        let got = rule.integrate2(|x, y| x * x * y);
        assert!((got - 1.0 / 6.0).abs() < 1e-14);
        let got = rule.integrate3(|x, y, z| x * y * z);
        assert!((got - 0.125).abs() < 1e-14);
        let got = rule.integrate_on(1.0, 3.0, |x| x);
        assert!((got - 4.0).abs() < 1e-13);
    }

    #[test]
    #[should_panic]
    fn order_one_rejected() {
        gauss_rule(1);
    }
}
