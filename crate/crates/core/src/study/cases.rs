//! Manufactured solutions.

use crate::polybasis::exponents;
use crate::{Result, VemError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

type Scalar<const D: usize> = Arc<dyn Fn([f64; D]) -> f64 + Send + Sync>;
type Vector<const D: usize> = Arc<dyn Fn([f64; D]) -> [f64; D] + Send + Sync>;

/// A closed-form solution with its gradient and source `f = −Δu`.
#[derive(Clone)]
pub struct ManufacturedCase<const D: usize> {
    pub name: String,
    pub u: Scalar<D>,
    pub grad: Vector<D>,
    pub f: Scalar<D>,
    /// Whether `u` vanishes on the boundary; otherwise its interpolant is
    /// imposed on the boundary dofs.
    pub homogeneous: bool,
    /// Sobolev index `ℓ` with `u ∈ H^ℓ` (infinite for smooth cases).
    pub smoothness: f64,
    pub domain: &'static str,
    /// Whether `u` is a polynomial of degree `<= k` (all errors at round-off).
    pub polynomial: bool,
}

impl<const D: usize> ManufacturedCase<D> {
    /// Whether order-`k` convergence rates are expected for this case.
    pub fn rates_apply(&self, k: usize) -> bool {
        self.smoothness >= (k + 1) as f64
    }

    /// Largest mismatch of `−Δu` against `f` and of the finite-difference
    /// gradient against `∇u`, over `n` random points with coordinates in
    /// `[lo, 1 − lo]`. Uses sixth-order central differences with step `h`.
    pub fn finite_difference_residual(&self, n: usize, lo: f64, h: f64, seed: u64) -> f64 {
        const D2: [f64; 4] = [-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0];
        const D1: [f64; 4] = [0.0, 3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..n {
            let x: [f64; D] = std::array::from_fn(|_| rng.random_range(lo..1.0 - lo));
            let grad = (self.grad)(x);
            let mut lap = 0.0;
            for i in 0..D {
                let at = |s: f64| {
                    let mut y = x;
                    y[i] += s * h;
                    (self.u)(y)
                };
                let mut second = D2[0] * at(0.0);
                let mut first = 0.0;
                for m in 1..4 {
                    let (p, q) = (at(m as f64), at(-(m as f64)));
                    second += D2[m] * (p + q);
                    first += D1[m] * (p - q);
                }
                lap += second / (h * h);
                worst = worst.max((first / h - grad[i]).abs());
            }
            worst = worst.max((-lap - (self.f)(x)).abs());
        }
        worst
    }
}

fn unit_domain(dim: usize) -> &'static str {
    if dim == 2 {
        "unit_square"
    } else {
        "unit_cube"
    }
}

impl<const D: usize> std::fmt::Debug for ManufacturedCase<D> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManufacturedCase")
            .field("name", &self.name)
            .field("homogeneous", &self.homogeneous)
            .field("smoothness", &self.smoothness)
            .field("domain", &self.domain)
            .field("polynomial", &self.polynomial)
            .finish()
    }
}

/// `u = Π_i sin(π x_i)`, `f = D π² u`.
pub fn sine<const D: usize>() -> ManufacturedCase<D> {
    let u = |x: [f64; D]| (0..D).map(|i| (PI * x[i]).sin()).product::<f64>();
    ManufacturedCase {
        name: "sine".into(),
        u: Arc::new(u),
        grad: Arc::new(|x: [f64; D]| {
            std::array::from_fn(|i| {
                (0..D)
                    .map(|j| if j == i { PI * (PI * x[j]).cos() } else { (PI * x[j]).sin() })
                    .product()
            })
        }),
        f: Arc::new(move |x| D as f64 * PI * PI * u(x)),
        homogeneous: true,
        smoothness: f64::INFINITY,
        domain: unit_domain(D),
        polynomial: false,
    }
}

/// A reproducible random polynomial of total degree `degree`.
pub fn random_polynomial<const D: usize>(degree: usize, seed: u64) -> ManufacturedCase<D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terms: Vec<([usize; D], f64)> = exponents::<D>(degree)
        .into_iter()
        .map(|e| (e, rng.random_range(-1.0..1.0)))
        .collect();
    let terms = Arc::new(terms);
    let pow = |x: f64, p: usize| x.powi(p as i32);
    let t = Arc::clone(&terms);
    let u = move |x: [f64; D]| {
        t.iter()
            .map(|(e, c)| c * (0..D).map(|i| pow(x[i], e[i])).product::<f64>())
            .sum::<f64>()
    };
    let t = Arc::clone(&terms);
    let grad = move |x: [f64; D]| {
        std::array::from_fn(|i| {
            t.iter()
                .filter(|(e, _)| e[i] > 0)
                .map(|(e, c)| {
                    c * e[i] as f64
                        * (0..D)
                            .map(|j| if j == i { pow(x[j], e[j] - 1) } else { pow(x[j], e[j]) })
                            .product::<f64>()
                })
                .sum::<f64>()
        })
    };
    let t = Arc::clone(&terms);
    let f = move |x: [f64; D]| {
        -t.iter()
            .map(|(e, c)| {
                (0..D)
                    .filter(|&i| e[i] >= 2)
                    .map(|i| {
                        c * (e[i] * (e[i] - 1)) as f64
                            * (0..D)
                                .map(|j| if j == i { pow(x[j], e[j] - 2) } else { pow(x[j], e[j]) })
                                .product::<f64>()
                    })
                    .sum::<f64>()
            })
            .sum::<f64>()
    };
    ManufacturedCase {
        name: "poly".into(),
        u: Arc::new(u),
        grad: Arc::new(grad),
        f: Arc::new(f),
        homogeneous: false,
        smoothness: f64::INFINITY,
        domain: unit_domain(D),
        polynomial: true,
    }
}

/// Harmonic `u = r^{2/3} sin(2θ/3)` about the origin; only in `H^{5/3-ε}`.
pub fn corner() -> ManufacturedCase<2> {
    let a = 2.0 / 3.0;
    ManufacturedCase {
        name: "corner".into(),
        u: Arc::new(move |x: [f64; 2]| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r == 0.0 {
                return 0.0;
            }
            r.powf(a) * (a * x[1].atan2(x[0])).sin()
        }),
        grad: Arc::new(move |x: [f64; 2]| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r == 0.0 {
                return [f64::NAN, f64::NAN];
            }
            let th = x[1].atan2(x[0]);
            let ur = a * r.powf(a - 1.0) * (a * th).sin();
            let ut = a * r.powf(a - 1.0) * (a * th).cos();
            [ur * th.cos() - ut * th.sin(), ur * th.sin() + ut * th.cos()]
        }),
        f: Arc::new(|_| 0.0),
        homogeneous: false,
        smoothness: 5.0 / 3.0,
        domain: "unit_square",
        polynomial: false,
    }
}

/// Resolves a case name; `poly` and `patch` use a polynomial of degree `k`.
pub fn case_by_name<const D: usize>(name: &str, k: usize) -> Result<ManufacturedCase<D>> {
    match name.to_ascii_lowercase().as_str() {
        "sine" | "sin" => Ok(sine::<D>()),
        "poly" | "patch" => Ok(random_polynomial::<D>(k, 2024)),
        "corner" if D == 2 => {
            let c = corner();
            // re-wrap for the generic dimension (D == 2 here)
            let u = Arc::clone(&c.u);
            let g = Arc::clone(&c.grad);
            Ok(ManufacturedCase {
                name: c.name,
                u: Arc::new(move |x: [f64; D]| u([x[0], x[1]])),
                grad: Arc::new(move |x: [f64; D]| {
                    let v = g([x[0], x[1]]);
                    std::array::from_fn(|i| v[i])
                }),
                f: Arc::new(|_| 0.0),
                homogeneous: false,
                smoothness: c.smoothness,
                domain: c.domain,
                polynomial: false,
            })
        }
        _ => Err(VemError::InvalidArgument(format!("unknown case {name:?} in {D}D"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sources_match_laplacians() {
        assert!(sine::<2>().finite_difference_residual(100, 0.0, 1e-2, 1) < 1e-8);
        assert!(sine::<3>().finite_difference_residual(100, 0.0, 1e-2, 2) < 1e-8);
        assert!(random_polynomial::<2>(4, 3).finite_difference_residual(100, 0.0, 1e-2, 3) < 1e-8);
        assert!(random_polynomial::<3>(2, 4).finite_difference_residual(100, 0.0, 1e-2, 4) < 1e-8);
        assert!(corner().finite_difference_residual(100, 0.25, 1e-2, 5) < 1e-8);
    }

    #[test]
    fn a_wrong_source_is_detected() {
        let mut c = sine::<2>();
        c.f = Arc::new(|x| 2.0 * PI * PI * (PI * x[0]).sin() * (PI * x[1]).sin() + 1e-6);
        assert!(c.finite_difference_residual(10, 0.0, 1e-2, 1) > 5e-7);
    }

    #[test]
    fn sine_vanishes_on_the_boundary() {
        let c = sine::<2>();
        for t in [0.0, 0.3, 0.9] {
            for p in [[t, 0.0], [0.0, t], [1.0, t], [t, 1.0]] {
                assert!((c.u)(p).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rate_tags() {
        assert!(sine::<2>().rates_apply(4));
        assert!(!corner().rates_apply(1));
        assert_eq!(sine::<3>().domain, "unit_cube");
    }

    #[test]
    fn unknown_names_are_rejected() {
        assert!(case_by_name::<3>("corner", 1).is_err());
        assert!(case_by_name::<2>("bogus", 1).is_err());
        assert!(case_by_name::<2>("corner", 1).is_ok());
    }
}
