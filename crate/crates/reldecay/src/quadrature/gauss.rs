//! Gauss–Legendre and Gauss–Hermite node/weight generation.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use once_cell::sync::Lazy;

/// Nodes and weights for n-point Gauss–Legendre on [−1, 1], by Newton
/// iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z -= p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * pp * pp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub static GL15: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| gauss_legendre(15));

/// Shared nodes-and-weights table.
pub type Rule = Arc<(Vec<f64>, Vec<f64>)>;

static HERMITE_CACHE: Lazy<Mutex<HashMap<usize, Rule>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Nodes and weights for n-point Gauss–Hermite (weight e^{−x²} on ℝ),
/// via the Golub–Welsch eigenvalue construction.  Results are cached per
/// size.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 2);
    let mut cache = HERMITE_CACHE.lock().unwrap();
    if let Some(v) = cache.get(&n) {
        return v.clone();
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jac[(k, k - 1)] = b;
        jac[(k - 1, k)] = b;
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let w = std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, i)].powi(2);
            (eig.eigenvalues[i], w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let out = Arc::new((
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1).collect(),
    ));
    cache.insert(n, out.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl15_integrates_polynomials_exactly() {
        let (x, w) = (&GL15.0, &GL15.1);
        // degree 29 is the highest exact degree of a 15-point rule
        for k in [0usize, 3, 10, 29] {
            let got: f64 = x.iter().zip(w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let expect = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - expect).abs() < 1e-13, "k={k}: {got} vs {expect}");
        }
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
    }

    #[test]
    fn hermite_moments() {
        for n in [8usize, 64] {
            let nw = gauss_hermite(n);
            let total: f64 = nw.1.iter().sum();
            assert_relative_eq!(total, std::f64::consts::PI.sqrt(), max_relative = 1e-12);
            let second: f64 = nw.0.iter().zip(&nw.1).map(|(x, w)| w * x * x).sum();
            assert_relative_eq!(second, 0.5 * std::f64::consts::PI.sqrt(), max_relative = 1e-11);
        }
    }
}
