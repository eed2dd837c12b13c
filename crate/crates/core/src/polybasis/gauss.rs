//! One-dimensional Gauss-Legendre and Gauss-Lobatto points on `[0, 1]`.

use std::f64::consts::PI;

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for m in 2..=n {
        let m = m as f64;
        let p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-300 {
        // P_n'(±1) = (±1)^(n+1) n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Orthonormal shifted Legendre polynomial on `[0, 1]`: `sqrt(2j+1) P_j(2t - 1)`.
pub fn shifted_legendre_orthonormal(j: usize, t: f64) -> f64 {
    ((2 * j + 1) as f64).sqrt() * legendre(j, 2.0 * t - 1.0).0
}

/// `n`-point Gauss-Legendre rule on `[0, 1]`, ascending points.
///
/// Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points.push(0.5 * (1.0 - x));
        weights.push(0.5 * w);
    }
    (points, weights)
}

/// Number of Gauss-Legendre points needed to integrate degree `degree` exactly.
pub fn points_for_degree(degree: usize) -> usize {
    degree / 2 + 1
}

/// The `k - 1` interior Gauss-Lobatto abscissae on `[0, 1]` (roots of `P_k'`), ascending.
pub fn gauss_lobatto_interior(k: usize) -> Vec<f64> {
    if k < 2 {
        return Vec::new();
    }
    let kf = k as f64;
    let mut nodes: Vec<f64> = (1..k)
        .map(|j| {
            let mut x = (PI * j as f64 / kf).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(k, x);
                let ddp = (2.0 * x * dp - kf * (kf + 1.0) * p) / (1.0 - x * x);
                let dx = dp / ddp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            0.5 * (1.0 + x)
        })
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes
}

/// Values and derivatives of the Lagrange basis on `nodes` at `t`.
pub fn lagrange(nodes: &[f64], t: f64) -> (Vec<f64>, Vec<f64>) {
    let n = nodes.len();
    let mut values = vec![0.0; n];
    let mut derivs = vec![0.0; n];
    for j in 0..n {
        let mut denom = 1.0;
        for m in 0..n {
            if m != j {
                denom *= nodes[j] - nodes[m];
            }
        }
        let mut value = 1.0;
        for m in 0..n {
            if m != j {
                value *= t - nodes[m];
            }
        }
        let mut deriv = 0.0;
        for skip in 0..n {
            if skip == j {
                continue;
            }
            let mut prod = 1.0;
            for m in 0..n {
                if m != j && m != skip {
                    prod *= t - nodes[m];
                }
            }
            deriv += prod;
        }
        values[j] = value / denom;
        derivs[j] = deriv / denom;
    }
    (values, derivs)
}
