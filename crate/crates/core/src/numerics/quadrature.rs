//! Gauss-Hermite and Gauss-Legendre rules, plus Gaussian expectations built
//! on them.

use std::f64::consts::PI;

use crate::numerics::linalg::{sym_eig, SymMatrix};
use crate::{Error, Result};

/// A quadrature rule: `Σ wᵢ g(xᵢ)` approximates a weighted integral.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(Error::Dimension {
                expected: nodes.len(),
                got: weights.len(),
            });
        }
        if nodes.is_empty() || weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Domain("quadrature weights must be positive".into()));
        }
        Ok(Self { nodes, weights })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss-Hermite rule for `∫ g(x) e^{−x²} dx`.
///
/// Root estimates come from the eigenvalues of the symmetric tridiagonal
/// Jacobi matrix; each is then polished by Newton iteration on the
/// orthonormal Hermite recurrence, which also yields the weight. This stays
/// in floating-point range up to order 256.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if !(2..=256).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let n = order;
    let jacobi = SymMatrix::from_fn(n, |i, j| {
        if i == j + 1 {
            (i as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut guesses = sym_eig(&jacobi)?.values;
    guesses.reverse();

    let pim4 = PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    // Solve the nonnegative half and mirror it.
    for i in (n / 2)..n {
        let mut z = guesses[i].max(0.0);
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged || (z - guesses[i]).abs() > 1e-6 * guesses[i].abs().max(1.0) {
            return Err(Error::Convergence {
                what: format!("Gauss-Hermite root {i} of order {n}"),
                best_point: vec![z],
                best_value: f64::NAN,
            });
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    QuadratureRule::new(x, w)
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Result<QuadratureRule> {
    if !(1..=256).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let n = order;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 1.0;
        for _ in 0..100 {
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
            if (z - z1).abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    QuadratureRule::new(x, w)
}

/// `E[g(Z)]` for `Z ~ N(mean, sd²)` with a Gauss-Hermite rule.
pub fn normal_expectation_gh<F: Fn(f64) -> f64>(
    rule: &QuadratureRule,
    mean: f64,
    sd: f64,
    g: F,
) -> f64 {
    let scale = std::f64::consts::SQRT_2 * sd;
    let s: f64 = rule.iter().map(|(u, w)| w * g(mean + scale * u)).sum();
    s / PI.sqrt()
}

/// `E[g(Z)]` for `Z ~ N(mean, sd²)` where `g` is smooth between the given
/// breakpoints (jumps and kinks allowed at them).
///
/// The range `mean ± 12·sd` is split at the breakpoints and into panels no
/// wider than `sd/2`, each integrated with a 16-point Gauss-Legendre rule
/// against the Gaussian density. Mass beyond 12 standard deviations is
/// below 1e-32 and is dropped.
pub fn normal_expectation_piecewise<F: Fn(f64) -> f64>(
    mean: f64,
    sd: f64,
    breakpoints: &[f64],
    g: F,
) -> f64 {
    thread_local! {
        static GL16: QuadratureRule = gauss_legendre(16).expect("fixed order");
    }
    if sd == 0.0 {
        return g(mean);
    }
    let lo = mean - 12.0 * sd;
    let hi = mean + 12.0 * sd;
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|b| *b > lo && *b < hi)
        .collect();
    cuts.push(lo);
    cuts.push(hi);
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    cuts.dedup();

    let norm = 1.0 / (sd * (2.0 * PI).sqrt());
    GL16.with(|rule| {
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let panels = (((b - a) / (0.5 * sd)).ceil() as usize).max(1);
            let h = (b - a) / panels as f64;
            for p in 0..panels {
                let pa = a + p as f64 * h;
                let c = pa + 0.5 * h;
                let mut s = 0.0;
                for (u, w) in rule.iter() {
                    let y = c + 0.5 * h * u;
                    let d = (y - mean) / sd;
                    s += w * g(y) * (-0.5 * d * d).exp();
                }
                total += 0.5 * h * s;
            }
        }
        total * norm
    })
}
