use super::*;
use crate::mesh::{generate_cube_mesh, generate_square_mesh, CubeFamily, SquareFamily};
use std::path::PathBuf;

fn fixture_k1() -> serde_json::Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/unit_square_k1_stiffness.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn single_cell_has_no_free_dofs() {
    let mesh = generate_square_mesh(1, SquareFamily::Uniform).unwrap();
    let disc = discretize_2d(&mesh, 1).unwrap();
    let sys = disc.assemble(Stabilization::S1, &|_| 1.0, None).unwrap();
    assert_eq!(sys.matrix.nrows(), 0);
    assert_eq!(sys.rhs.len(), 0);
    let (u, _, _) = disc.solve(Stabilization::S1, &|_| 1.0, None, Solver::Auto, 1e-12).unwrap();
    assert_eq!(u.amax(), 0.0);
}

#[test]
fn two_by_two_center_entry_matches_dense_oracle() {
    let mesh = generate_square_mesh(2, SquareFamily::Uniform).unwrap();
    let disc = discretize_2d(&mesh, 1).unwrap();
    let fx = fixture_k1();
    for (stab, key) in [(Stabilization::S1, "s1"), (Stabilization::S2, "s2"), (Stabilization::S2Tilde, "s2tilde")] {
        let sys = disc.assemble(stab, &|_| 0.0, None).unwrap();
        assert_eq!(sys.matrix.nrows(), 1);
        // the k = 1 local matrix is scale invariant: the centre vertex is a
        // corner of four unit-square-like cells
        let diag = fx[key][0][0].as_f64().unwrap();
        let a = sys.matrix.triplet_iter().next().unwrap().2;
        assert!((a - 4.0 * diag).abs() < 1e-13, "{key}: {a}");
    }
}

#[test]
fn assembly_is_symmetric_and_deterministic() {
    let mesh = generate_square_mesh(4, SquareFamily::Distorted(3)).unwrap();
    let disc = discretize_2d(&mesh, 3).unwrap();
    let f = |p: [f64; 2]| (p[0] * 3.0).cos() + p[1];
    let a = disc.assemble(Stabilization::S2, &f, None).unwrap();
    let b = disc.assemble(Stabilization::S2, &f, None).unwrap();
    assert_eq!(asymmetry(&a.matrix), 0.0);
    assert_eq!(a.matrix, b.matrix);
    assert_eq!(a.rhs, b.rhs);
}

#[test]
fn load_is_linear_in_the_source() {
    let mesh = generate_square_mesh(3, SquareFamily::SmallEdge(0.01)).unwrap();
    let disc = discretize_2d(&mesh, 2).unwrap();
    let f1 = |p: [f64; 2]| p[0] * p[1];
    let f2 = |p: [f64; 2]| (p[0] - p[1]).exp();
    let b1 = disc.assemble(Stabilization::S1, &f1, None).unwrap().rhs;
    let b2 = disc.assemble(Stabilization::S1, &f2, None).unwrap().rhs;
    let b12 = disc.assemble(Stabilization::S1, &|p| f1(p) + f2(p), None).unwrap().rhs;
    assert!((b12 - (b1 + b2)).amax() < 1e-15);
}

#[test]
fn dof_counts() {
    let mesh = generate_square_mesh(2, SquareFamily::Uniform).unwrap();
    let m = GlobalDofMap::new_2d(&mesh, 3);
    // 9 vertices, 12 edges × 2 nodes, 4 cells × 3 moments
    assert_eq!(m.n_total(), 9 + 24 + 12);
    // free: 1 vertex, 4 interior edges × 2, 12 moments
    assert_eq!(m.n_free(), 1 + 8 + 12);
    let mesh = generate_cube_mesh(2, CubeFamily::Uniform).unwrap();
    let m = GlobalDofMap::new_3d(&mesh, 2);
    // 27 vertices, 54 edges, 36 faces, 8 cells
    assert_eq!(m.n_total(), 27 + 54 + 36 + 8);
    // free: 1 vertex, 6 interior edges, 12 interior faces, 8 cells
    assert_eq!(m.n_free(), 1 + 6 + 12 + 8);
}

#[test]
fn shared_edge_nodes_agree() {
    // the interpolant of a non-symmetric field must be single valued
    let mesh = generate_square_mesh(3, SquareFamily::Hanging).unwrap();
    let disc = discretize_2d(&mesh, 4).unwrap();
    let u = |p: [f64; 2]| (2.0 * p[0] + p[1] * p[1]).sin();
    let v = disc.interpolate(&u);
    for c in 0..disc.n_cells() {
        let local = disc.elements[c].interpolate(&u);
        assert!((disc.local_dofs(c, &v) - local).amax() < 1e-15);
    }
    let mesh = generate_cube_mesh(2, CubeFamily::FaceSplit(0.1)).unwrap();
    let disc = discretize_3d(&mesh, 3).unwrap();
    let u = |p: [f64; 3]| (2.0 * p[0] + p[1] * p[2]).sin();
    let v = disc.interpolate(&u);
    for c in 0..disc.n_cells() {
        let local = disc.elements[c].interpolate(&u);
        assert!((disc.local_dofs(c, &v) - local).amax() < 1e-15);
    }
}

#[test]
fn g_format_matches_c() {
    assert_eq!(format_g(0.1, 17), "0.10000000000000001");
    assert_eq!(format_g(100.0, 17), "100");
    assert_eq!(format_g(-2.5, 17), "-2.5");
    assert_eq!(format_g(1e-20, 17), "9.9999999999999995e-21");
    assert_eq!(format_g(1.5e17, 17), "1.5e+17");
    assert_eq!(format_g(1.0 / 3.0, 17), "0.33333333333333331");
    assert_eq!(format_g(0.0001, 17), "0.0001");
    assert_eq!(format_g(0.0, 17), "0");
}

#[test]
fn matrix_dump_round_trips() {
    let mesh = generate_square_mesh(3, SquareFamily::Uniform).unwrap();
    let disc = discretize_2d(&mesh, 2).unwrap();
    let sys = disc.assemble(Stabilization::S2, &|_| 1.0, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    dump_matrix(&sys.matrix, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines().skip(1);
    let header: Vec<usize> = lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    let n = sys.matrix.nrows();
    let mut dense = nalgebra::DMatrix::zeros(n, n);
    let mut count = 0;
    for line in lines {
        let t: Vec<&str> = line.split(' ').collect();
        let (i, j, v): (usize, usize, f64) = (t[0].parse().unwrap(), t[1].parse().unwrap(), t[2].parse().unwrap());
        assert!(j <= i);
        dense[(i - 1, j - 1)] = v;
        dense[(j - 1, i - 1)] = v;
        count += 1;
    }
    assert_eq!(header, vec![n, n, count]);
    assert_eq!(dense, nalgebra::DMatrix::from(&sys.matrix));
}
