use crate::{Result, VemError};
use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix, CsrMatrix};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Systems up to this size are factorized; larger ones use CG.
pub const DIRECT_LIMIT: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    /// Cholesky up to [`DIRECT_LIMIT`] unknowns, CG above.
    Auto,
    Cholesky,
    Cg,
}

impl std::str::FromStr for Solver {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "cholesky" | "direct" => Ok(Self::Cholesky),
            "cg" | "pcg" => Ok(Self::Cg),
            _ => Err(VemError::InvalidArgument(format!("unknown solver {s:?}"))),
        }
    }
}

impl std::fmt::Display for Solver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::Cholesky => "cholesky",
            Self::Cg => "cg",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveInfo {
    pub solver: String,
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖ / ‖b‖`.
    pub residual: f64,
}

/// Reverse Cuthill-McKee ordering of a structurally symmetric matrix:
/// `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix<f64>) -> Vec<usize> {
    let n = a.nrows();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).nnz()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut starts: Vec<usize> = (0..n).collect();
    starts.sort_by_key(|&i| (degree[i], i));
    let mut queue = VecDeque::new();
    for &s in &starts {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        queue.push_back(s);
        while let Some(i) = queue.pop_front() {
            order.push(i);
            let mut next: Vec<usize> = a
                .row(i)
                .col_indices()
                .iter()
                .copied()
                .filter(|&j| !visited[j])
                .collect();
            next.sort_by_key(|&j| (degree[j], j));
            for j in next {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

const REFINEMENT_STEPS: usize = 2;

/// Sparse Cholesky solve after a bandwidth-reducing reordering.
pub fn solve_cholesky(a: &CsrMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(DVector::zeros(0));
    }
    let perm = reverse_cuthill_mckee(a);
    let mut inv = vec![0; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut coo = CooMatrix::new(n, n);
    for (i, j, &v) in a.triplet_iter() {
        coo.push(inv[i], inv[j], v);
    }
    let pa = CscMatrix::from(&coo);
    let chol = CscCholesky::factor(&pa).map_err(|e| VemError::NotSpd(format!("sparse Cholesky: {e:?}")))?;
    let pb = DVector::from_fn(n, |i, _| b[perm[i]]);
    let mut px = DVector::from_column_slice(chol.solve(&pb).as_slice());
    // iterative refinement with the same factor
    for _ in 0..REFINEMENT_STEPS {
        let r = &pb - &pa * &px;
        px += DVector::from_column_slice(chol.solve(&r).as_slice());
    }
    let mut x = DVector::zeros(n);
    for (new, &old) in perm.iter().enumerate() {
        x[old] = px[new];
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(VemError::NotSpd("sparse Cholesky produced non-finite values".into()));
    }
    Ok(x)
}

/// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
pub fn solve_cg(a: &CsrMatrix<f64>, b: &DVector<f64>, tol: f64, max_iter: usize) -> Result<(DVector<f64>, usize, f64)> {
    let n = a.nrows();
    let mut x = DVector::zeros(n);
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return Ok((x, 0, 0.0));
    }
    let mut diag = DVector::zeros(n);
    for (i, j, &v) in a.triplet_iter() {
        if i == j {
            diag[i] = v;
        }
    }
    if diag.iter().any(|&d| !(d > 0.0)) {
        return Err(VemError::NotSpd("non-positive diagonal entry".into()));
    }
    let mut r = b.clone();
    let mut z = r.component_div(&diag);
    let mut p = z.clone();
    let mut rz = r.dot(&z);
    for it in 1..=max_iter {
        let ap = a * &p;
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            return Err(VemError::NotSpd("CG met a non-positive curvature direction".into()));
        }
        let alpha = rz / pap;
        x.axpy(alpha, &p, 1.0);
        r.axpy(-alpha, &ap, 1.0);
        let res = r.norm() / bnorm;
        if res <= tol {
            return Ok((x, it, res));
        }
        z = r.component_div(&diag);
        let rz_new = r.dot(&z);
        p = &z + (rz_new / rz) * &p;
        rz = rz_new;
    }
    Err(VemError::NotConverged {
        iterations: max_iter,
        residual: r.norm() / bnorm,
    })
}

fn relative_residual(a: &CsrMatrix<f64>, x: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return (a * x).norm();
    }
    (b - a * x).norm() / bnorm
}

/// Solves `Ax = b` for a symmetric positive definite `A`.
pub fn solve(a: &CsrMatrix<f64>, b: &DVector<f64>, solver: Solver, tol: f64) -> Result<(DVector<f64>, SolveInfo)> {
    if a.nrows() == 0 {
        let info = SolveInfo {
            solver: "none".into(),
            iterations: 0,
            residual: 0.0,
        };
        return Ok((DVector::zeros(0), info));
    }
    let direct = match solver {
        Solver::Auto => a.nrows() <= DIRECT_LIMIT,
        Solver::Cholesky => true,
        Solver::Cg => false,
    };
    if direct {
        let x = solve_cholesky(a, b)?;
        let residual = relative_residual(a, &x, b);
        Ok((
            x,
            SolveInfo {
                solver: "cholesky".into(),
                iterations: 0,
                residual,
            },
        ))
    } else {
        let (x, iterations, residual) = solve_cg(a, b, tol, 20 * a.nrows().max(100))?;
        Ok((
            x,
            SolveInfo {
                solver: "cg-jacobi".into(),
                iterations,
                residual,
            },
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &m * m.transpose() + DMatrix::identity(n, n) * n as f64
    }

    fn to_csr(m: &DMatrix<f64>) -> CsrMatrix<f64> {
        let mut coo = CooMatrix::new(m.nrows(), m.ncols());
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                if m[(i, j)] != 0.0 {
                    coo.push(i, j, m[(i, j)]);
                }
            }
        }
        CsrMatrix::from(&coo)
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let a = to_csr(&random_spd(10, 1));
        let b = DVector::zeros(10);
        for s in [Solver::Cholesky, Solver::Cg] {
            let (x, _) = solve(&a, &b, s, 1e-12).unwrap();
            assert_eq!(x.amax(), 0.0);
        }
    }

    #[test]
    fn identity_returns_rhs() {
        let a = to_csr(&DMatrix::identity(7, 7));
        let b = DVector::from_fn(7, |i, _| i as f64 - 3.0);
        for s in [Solver::Cholesky, Solver::Cg] {
            let (x, _) = solve(&a, &b, s, 1e-14).unwrap();
            assert!((x - &b).amax() < 1e-15);
        }
    }

    #[test]
    fn random_spd_matches_dense_oracle() {
        let m = random_spd(50, 4);
        let a = to_csr(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = DVector::from_fn(50, |_, _| rng.random_range(-1.0..1.0));
        let oracle = m.clone().cholesky().unwrap().solve(&b);
        for s in [Solver::Cholesky, Solver::Cg, Solver::Auto] {
            let (x, info) = solve(&a, &b, s, 1e-14).unwrap();
            assert!((x - &oracle).amax() < 1e-10, "{info:?}");
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let mut m = DMatrix::identity(4, 4);
        m[(2, 2)] = -1.0;
        let a = to_csr(&m);
        let b = DVector::from_element(4, 1.0);
        assert!(matches!(solve_cholesky(&a, &b), Err(VemError::NotSpd(_))));
        assert!(solve_cg(&a, &b, 1e-12, 100).is_err());
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = to_csr(&random_spd(20, 2));
        let mut p = reverse_cuthill_mckee(&a);
        p.sort_unstable();
        assert_eq!(p, (0..20).collect::<Vec<_>>());
    }
}
