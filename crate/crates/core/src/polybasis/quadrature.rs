//! Quadrature on segments, triangles, tetrahedra, and fan sub-triangulations
//! of star-shaped polygons, planar faces and polyhedra.
//!
//! Triangle and tetrahedron rules are collapsed (Duffy) tensor products of
//! Gauss-Legendre rules, so every weight is positive and the exactness degree
//! can be chosen freely.

use super::gauss::{gauss_legendre, points_for_degree};
use crate::vecops::{cross2, cross3, lerp, norm, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<const D: usize> {
    pub points: Vec<[f64; D]>,
    pub weights: Vec<f64>,
    /// Polynomial degree integrated exactly.
    pub degree: usize,
}

impl<const D: usize> QuadratureRule<D> {
    pub fn empty(degree: usize) -> Self {
        Self {
            points: Vec::new(),
            weights: Vec::new(),
            degree,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn([f64; D]) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    pub fn append(&mut self, other: QuadratureRule<D>) {
        self.points.extend(other.points);
        self.weights.extend(other.weights);
        self.degree = self.degree.min(other.degree);
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; D], f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss-Legendre rule on the segment `[a, b]`.
pub fn segment_rule<const D: usize>(a: [f64; D], b: [f64; D], degree: usize) -> QuadratureRule<D> {
    let (t, w) = gauss_legendre(points_for_degree(degree));
    let len = norm(sub(b, a));
    QuadratureRule {
        points: t.iter().map(|&t| lerp(a, b, t)).collect(),
        weights: w.iter().map(|w| w * len).collect(),
        degree,
    }
}

fn collapsed_triangle<const D: usize>(
    a: [f64; D],
    b: [f64; D],
    c: [f64; D],
    area: f64,
    degree: usize,
) -> QuadratureRule<D> {
    // (u, v) in [0,1]^2 -> (xi, eta) = (u, v (1 - u)); Jacobian (1 - u).
    let (u, wu) = gauss_legendre(points_for_degree(degree + 1));
    let (v, wv) = gauss_legendre(points_for_degree(degree));
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(u.len() * v.len()),
        weights: Vec::with_capacity(u.len() * v.len()),
        degree,
    };
    let ab = sub(b, a);
    let ac = sub(c, a);
    for (&ui, &wi) in u.iter().zip(&wu) {
        for (&vj, &wj) in v.iter().zip(&wv) {
            let xi = ui;
            let eta = vj * (1.0 - ui);
            rule.points
                .push(std::array::from_fn(|d| a[d] + xi * ab[d] + eta * ac[d]));
            rule.weights.push(2.0 * area * wi * wj * (1.0 - ui));
        }
    }
    rule
}

/// Rule on the planar triangle `abc`, exact to `degree`.
pub fn triangle_rule(a: [f64; 2], b: [f64; 2], c: [f64; 2], degree: usize) -> QuadratureRule<2> {
    let area = 0.5 * cross2(sub(b, a), sub(c, a)).abs();
    collapsed_triangle(a, b, c, area, degree)
}

/// Rule on a triangle embedded in space, exact to `degree`.
pub fn triangle_rule_3d(a: [f64; 3], b: [f64; 3], c: [f64; 3], degree: usize) -> QuadratureRule<3> {
    let area = 0.5 * norm(cross3(sub(b, a), sub(c, a)));
    collapsed_triangle(a, b, c, area, degree)
}

/// Rule on the tetrahedron `abcd`, exact to `degree`.
pub fn tetrahedron_rule(a: [f64; 3], b: [f64; 3], c: [f64; 3], d: [f64; 3], degree: usize) -> QuadratureRule<3> {
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ad = sub(d, a);
    let det = crate::vecops::dot(ab, cross3(ac, ad));
    let volume = det.abs() / 6.0;
    // (u, v, w) -> (u, v (1-u), w (1-u)(1-v)); Jacobian (1-u)^2 (1-v).
    let (u, wu) = gauss_legendre(points_for_degree(degree + 2));
    let (v, wv) = gauss_legendre(points_for_degree(degree + 1));
    let (w, ww) = gauss_legendre(points_for_degree(degree));
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(u.len() * v.len() * w.len()),
        weights: Vec::with_capacity(u.len() * v.len() * w.len()),
        degree,
    };
    for (&ui, &wui) in u.iter().zip(&wu) {
        for (&vj, &wvj) in v.iter().zip(&wv) {
            for (&wk, &wwk) in w.iter().zip(&ww) {
                let x1 = ui;
                let x2 = vj * (1.0 - ui);
                let x3 = wk * (1.0 - ui) * (1.0 - vj);
                rule.points
                    .push(std::array::from_fn(|i| a[i] + x1 * ab[i] + x2 * ac[i] + x3 * ad[i]));
                let jac = (1.0 - ui) * (1.0 - ui) * (1.0 - vj);
                rule.weights.push(6.0 * volume * wui * wvj * wwk * jac);
            }
        }
    }
    rule
}

/// Fan sub-triangulation rule of a polygon that is star-shaped with respect to `center`.
pub fn polygon_rule(vertices: &[[f64; 2]], center: [f64; 2], degree: usize) -> QuadratureRule<2> {
    let n = vertices.len();
    let mut rule = QuadratureRule::empty(degree);
    for i in 0..n {
        rule.append(triangle_rule(center, vertices[i], vertices[(i + 1) % n], degree));
    }
    rule.degree = degree;
    rule
}

/// Fan rule of a planar polygon in space, star-shaped with respect to `center`.
pub fn planar_polygon_rule(vertices: &[[f64; 3]], center: [f64; 3], degree: usize) -> QuadratureRule<3> {
    let n = vertices.len();
    let mut rule = QuadratureRule::empty(degree);
    for i in 0..n {
        rule.append(triangle_rule_3d(center, vertices[i], vertices[(i + 1) % n], degree));
    }
    rule.degree = degree;
    rule
}

/// Tetrahedral fan rule of a polyhedron that is star-shaped with respect to
/// `center`; each face is fanned from its own star center `face_centers[f]`.
pub fn polyhedron_rule(
    faces: &[Vec<[f64; 3]>],
    face_centers: &[[f64; 3]],
    center: [f64; 3],
    degree: usize,
) -> QuadratureRule<3> {
    let mut rule = QuadratureRule::empty(degree);
    for (face, &fc) in faces.iter().zip(face_centers) {
        let n = face.len();
        for i in 0..n {
            rule.append(tetrahedron_rule(center, fc, face[i], face[(i + 1) % n], degree));
        }
    }
    rule.degree = degree;
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom_fact(a: usize) -> f64 {
        (1..=a).map(|i| i as f64).product()
    }

    #[test]
    fn reference_triangle_monomials() {
        // ∫_T x^a y^b = a! b! / (a+b+2)!
        for degree in 0..10 {
            let rule = triangle_rule([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], degree);
            for a in 0..=degree {
                for b in 0..=degree - a {
                    let exact = binom_fact(a) * binom_fact(b) / binom_fact(a + b + 2);
                    let approx = rule.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!((approx - exact).abs() < 1e-15, "deg {degree} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn reference_tetrahedron_monomials() {
        // ∫_T x^a y^b z^c = a! b! c! / (a+b+c+3)!
        for degree in 0..7 {
            let rule = tetrahedron_rule([0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], degree);
            for a in 0..=degree {
                for b in 0..=degree - a {
                    for c in 0..=degree - a - b {
                        let exact = binom_fact(a) * binom_fact(b) * binom_fact(c) / binom_fact(a + b + c + 3);
                        let approx = rule.integrate(|p| {
                            p[0].powi(a as i32) * p[1].powi(b as i32) * p[2].powi(c as i32)
                        });
                        assert!((approx - exact).abs() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn weights_sum_to_measure() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let rule = polygon_rule(&square, [0.5, 0.5], 6);
        assert!((rule.total_weight() - 1.0).abs() < 1e-14);
        assert!(rule.weights.iter().all(|&w| w > 0.0));

        let seg = segment_rule([0.0, 0.0, 0.0], [1.0, 2.0, 2.0], 5);
        assert!((seg.total_weight() - 3.0).abs() < 1e-14);
    }
}
