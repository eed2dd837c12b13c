use nalgebra::DMatrix;

/// Number of monomials of total degree `<= degree` in `dim` variables.
///
/// Negative degrees give an empty space.
pub fn monomial_count(dim: usize, degree: isize) -> usize {
    if degree < 0 {
        return 0;
    }
    let d = degree as usize;
    // binomial(d + dim, dim)
    let mut num = 1usize;
    let mut den = 1usize;
    for i in 1..=dim {
        num *= d + i;
        den *= i;
    }
    num / den
}

fn exponents_of_degree<const D: usize>(degree: usize, pos: usize, current: &mut [usize; D], out: &mut Vec<[usize; D]>) {
    if pos == D - 1 {
        current[pos] = degree;
        out.push(*current);
        return;
    }
    for v in (0..=degree).rev() {
        current[pos] = v;
        exponents_of_degree(degree - v, pos + 1, current, out);
    }
}

/// Multi-indices of total degree `<= degree`, graded and lexicographically
/// descending within a degree: `(0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...`.
pub fn exponents<const D: usize>(degree: usize) -> Vec<[usize; D]> {
    let mut out = Vec::with_capacity(monomial_count(D, degree as isize));
    let mut current = [0usize; D];
    for d in 0..=degree {
        exponents_of_degree(d, 0, &mut current, &mut out);
    }
    out
}

/// Scaled monomials `m_a(x) = ((x - center) / scale)^a`, `|a| <= degree`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMonomials<const D: usize> {
    center: [f64; D],
    scale: f64,
    degree: usize,
    exponents: Vec<[usize; D]>,
}

impl<const D: usize> ScaledMonomials<D> {
    pub fn new(center: [f64; D], scale: f64, degree: usize) -> Self {
        assert!(scale > 0.0, "monomial scale must be positive");
        Self {
            center,
            scale,
            degree,
            exponents: exponents(degree),
        }
    }

    pub fn center(&self) -> [f64; D] {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[[usize; D]] {
        &self.exponents
    }

    /// Number of basis members with degree `<= degree` (a prefix of the basis).
    pub fn count_up_to(&self, degree: isize) -> usize {
        monomial_count(D, degree.min(self.degree as isize))
    }

    pub fn index_of(&self, exponent: &[usize; D]) -> Option<usize> {
        self.exponents.iter().position(|e| e == exponent)
    }

    fn powers(&self, x: [f64; D]) -> [Vec<f64>; D] {
        std::array::from_fn(|i| {
            let s = (x[i] - self.center[i]) / self.scale;
            let mut p = Vec::with_capacity(self.degree + 1);
            let mut acc = 1.0;
            for _ in 0..=self.degree {
                p.push(acc);
                acc *= s;
            }
            p
        })
    }

    /// Values of every basis member at `x`.
    pub fn values(&self, x: [f64; D]) -> Vec<f64> {
        let pw = self.powers(x);
        self.exponents
            .iter()
            .map(|e| (0..D).map(|i| pw[i][e[i]]).product())
            .collect()
    }

    /// Gradients of every basis member at `x`.
    pub fn gradients(&self, x: [f64; D]) -> Vec<[f64; D]> {
        let pw = self.powers(x);
        let inv = 1.0 / self.scale;
        self.exponents
            .iter()
            .map(|e| {
                std::array::from_fn(|i| {
                    if e[i] == 0 {
                        return 0.0;
                    }
                    let mut v = e[i] as f64 * inv;
                    for j in 0..D {
                        v *= if j == i { pw[j][e[j] - 1] } else { pw[j][e[j]] };
                    }
                    v
                })
            })
            .collect()
    }

    /// Evaluates the polynomial with the given coefficients.
    pub fn evaluate(&self, coeffs: &[f64], x: [f64; D]) -> f64 {
        self.values(x).iter().zip(coeffs).map(|(v, c)| v * c).sum()
    }

    /// Gradient of the polynomial with the given coefficients.
    pub fn evaluate_gradient(&self, coeffs: &[f64], x: [f64; D]) -> [f64; D] {
        let mut g = [0.0; D];
        for (grad, c) in self.gradients(x).iter().zip(coeffs) {
            for i in 0..D {
                g[i] += c * grad[i];
            }
        }
        g
    }

    /// Matrix of `d/dx_i`: column `a` holds the coefficients of `d m_a / dx_i`
    /// in the basis of degree `degree - 1`.
    pub fn derivative_matrix(&self, axis: usize) -> DMatrix<f64> {
        let rows = self.count_up_to(self.degree as isize - 1);
        let mut m = DMatrix::zeros(rows, self.len());
        for (col, e) in self.exponents.iter().enumerate() {
            if e[axis] == 0 {
                continue;
            }
            let mut lower = *e;
            lower[axis] -= 1;
            let row = self.index_of(&lower).expect("lowered exponent is in the basis");
            m[(row, col)] = e[axis] as f64 / self.scale;
        }
        m
    }

    /// Matrix of the Laplacian: column `a` holds the coefficients of `Δ m_a`
    /// in the basis of degree `degree - 2`, i.e.
    /// `Δ m_a = sum_i a_i (a_i - 1) / scale² · m_{a - 2 e_i}`.
    pub fn laplacian_matrix(&self) -> DMatrix<f64> {
        let rows = self.count_up_to(self.degree as isize - 2);
        let mut m = DMatrix::zeros(rows, self.len());
        let h2 = self.scale * self.scale;
        for (col, e) in self.exponents.iter().enumerate() {
            for i in 0..D {
                if e[i] < 2 {
                    continue;
                }
                let mut lower = *e;
                lower[i] -= 2;
                let row = self.index_of(&lower).expect("lowered exponent is in the basis");
                m[(row, col)] += (e[i] * (e[i] - 1)) as f64 / h2;
            }
        }
        m
    }
}
