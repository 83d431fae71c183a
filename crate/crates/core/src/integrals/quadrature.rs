//! Gauss-Hermite and Gauss-Legendre rules at double precision.
//!
//! Nodes are found by Newton iteration on the orthonormal recurrences, with
//! interlacing-based initial guesses, and cached per node count. A rule with
//! `n` nodes integrates polynomials of degree `2n - 1` exactly.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const NEWTON_EPS: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;
const PI_POW_MINUS_QUARTER: f64 = 0.751_125_544_464_942_5;

/// Nodes and weights for `integral e^(-x^2) f(x) dx` over the real line.
/// Weights are the raw ones (they sum to sqrt(pi)).
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let mut z = 0.0f64;
        // roots found so far, largest first, for the interlacing guesses
        let mut found = Vec::with_capacity(m);
        for i in 0..m {
            z = match i {
                0 => {
                    let anu = (2 * n + 1) as f64;
                    anu.sqrt() - 1.85575 * anu.powf(-1.0 / 6.0)
                }
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * found[0],
                3 => 1.91 * z - 0.91 * found[1],
                _ => 2.0 * z - found[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..NEWTON_MAX_ITER {
                // orthonormal Hermite functions h~_j with respect to e^(-x^2)
                let mut p1 = PI_POW_MINUS_QUARTER;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                // h~_n'(z) = sqrt(2n) h~_{n-1}(z)
                pp = (2.0 * n as f64).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= NEWTON_EPS {
                    break;
                }
            }
            found.push(z);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / (pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussHermite { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `integral e^(-x^2) f(x) dx`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `integral e^(-x^2)/sqrt(pi) f(x) dx` — the normalized kernel used by
    /// the closed-form table.
    pub fn integrate_normalized(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.integrate(f) / std::f64::consts::PI.sqrt()
    }
}

/// Shared, lazily computed rule per node count.
pub fn gauss_hermite_rule(n: usize) -> Arc<GaussHermite> {
    static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let rules = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = rules.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| Arc::new(GaussHermite::new(n)))
        .clone()
}

/// Nodes and weights for `integral_{-1}^{1} f(x) dx`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..NEWTON_MAX_ITER {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
                }
                pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= NEWTON_EPS {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * pp * pp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// `integral_a^b f(x) dx` by affine transformation of the canonical rule.
    pub fn integrate_on(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half
            * self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&t, &w)| w * f(mid + half * t))
                .sum::<f64>()
    }
}

pub fn gauss_legendre_rule(n: usize) -> Arc<GaussLegendre> {
    static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let rules = RULES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = rules.lock().unwrap();
    map.entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_three_node_rule() {
        let rule = GaussHermite::new(3);
        let expect_nodes = [-1.224_744_871_391_589, 0.0, 1.224_744_871_391_589];
        let expect_weights = [
            0.295_408_975_150_919_35,
            1.181_635_900_603_677_4,
            0.295_408_975_150_919_35,
        ];
        for (got, want) in rule.nodes.iter().zip(expect_nodes) {
            assert!((got - want).abs() < 1e-13, "node {} vs {}", got, want);
        }
        for (got, want) in rule.weights.iter().zip(expect_weights) {
            assert!((got - want).abs() < 1e-13, "weight {} vs {}", got, want);
        }
    }

    #[test]
    fn hermite_weights_sum_to_sqrt_pi() {
        for n in [1, 2, 5, 16, 64] {
            let rule = gauss_hermite_rule(n);
            let total: f64 = rule.weights.iter().sum();
            assert!(
                (total - std::f64::consts::PI.sqrt()).abs() < 1e-12,
                "n={} sum={}",
                n,
                total
            );
        }
    }

    #[test]
    fn hermite_moments_exact() {
        // integral e^(-x^2) x^(2k) dx = Gamma(k + 1/2); k = 1 gives sqrt(pi)/2
        let rule = GaussHermite::new(10);
        let m2 = rule.integrate(|x| x * x);
        assert!((m2 - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-13);
        let m1 = rule.integrate(|x| x);
        assert!(m1.abs() < 1e-14);
        // degree 2n-1 exactness: x^18 with 10 nodes vs 17!!/2^9 * sqrt(pi)
        let m18 = rule.integrate(|x| x.powi(18));
        let double_fact_17: f64 = (1..=17).step_by(2).map(|k| k as f64).product();
        let exact = double_fact_17 / 2f64.powi(9) * std::f64::consts::PI.sqrt();
        assert!((m18 - exact).abs() / exact < 1e-12);
    }

    #[test]
    fn legendre_three_node_rule() {
        let rule = GaussLegendre::new(3);
        let expect_nodes = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
        let expect_weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        for (got, want) in rule.nodes.iter().zip(expect_nodes) {
            assert!((got - want).abs() < 1e-14);
        }
        for (got, want) in rule.weights.iter().zip(expect_weights) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = GaussLegendre::new(5);
        // integral_0^2 x^3 dx = 4
        let v = rule.integrate_on(0.0, 2.0, |x| x.powi(3));
        assert!((v - 4.0).abs() < 1e-13);
        // integral_{-1}^{3} (x^2 - x) dx = 28/3 - 4 = 16/3
        let v = rule.integrate_on(-1.0, 3.0, |x| x * x - x);
        assert!((v - 16.0 / 3.0).abs() < 1e-12);
    }
}
