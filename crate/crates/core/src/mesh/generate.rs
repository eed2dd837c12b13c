//! Unit-square and unit-cube mesh families, including meshes with
//! arbitrarily small edges.

use super::{PolygonalMesh, PolyhedralMesh};
use crate::{Point2, Point3, Result, VemError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SquareFamily {
    /// `n × n` squares.
    Uniform,
    /// Every cell gets exactly one split edge, with a piece of relative length `ε`.
    SmallEdge(f64),
    /// Checkerboard of cells refined 2:1; coarse cells carry the hanging nodes.
    Hanging,
    /// Interior vertices jittered by at most `0.2 / n`, reproducibly from the seed.
    Distorted(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CubeFamily {
    /// `n³` hexahedra.
    Uniform,
    /// Vertical edges in a checkerboard pattern are split at relative height
    /// `ε`, so every vertical face has one small edge.
    FaceSplit(f64),
}

fn parse_family(s: &str) -> (String, Option<String>) {
    let s = s.trim();
    if let Some((name, rest)) = s.split_once(['(', ':', '=']) {
        let param = rest.trim_end_matches(')').trim().to_string();
        (name.trim().to_ascii_lowercase(), Some(param))
    } else {
        (s.to_ascii_lowercase(), None)
    }
}

fn parse_eps(name: &str, param: Option<String>) -> Result<f64> {
    let p = param.ok_or_else(|| VemError::InvalidArgument(format!("family {name} needs a parameter")))?;
    p.parse::<f64>()
        .map_err(|_| VemError::InvalidArgument(format!("bad parameter {p:?} for family {name}")))
}

impl FromStr for SquareFamily {
    type Err = VemError;

    /// Accepts `uniform`, `smalledge:0.1` (or `smalledge(0.1)`), `hanging`, `distorted:42`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = parse_family(s);
        match name.as_str() {
            "uniform" => Ok(Self::Uniform),
            "hanging" => Ok(Self::Hanging),
            "smalledge" => Ok(Self::SmallEdge(parse_eps(&name, param)?)),
            "distorted" => {
                let seed = match param {
                    Some(p) => p
                        .parse()
                        .map_err(|_| VemError::InvalidArgument(format!("bad seed {p:?}")))?,
                    None => 0,
                };
                Ok(Self::Distorted(seed))
            }
            _ => Err(VemError::InvalidArgument(format!("unknown 2D mesh family {s:?}"))),
        }
    }
}

impl fmt::Display for SquareFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => write!(f, "uniform"),
            Self::SmallEdge(e) => write!(f, "smalledge:{e}"),
            Self::Hanging => write!(f, "hanging"),
            Self::Distorted(s) => write!(f, "distorted:{s}"),
        }
    }
}

impl FromStr for CubeFamily {
    type Err = VemError;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = parse_family(s);
        match name.as_str() {
            "uniform" => Ok(Self::Uniform),
            "facesplit" => Ok(Self::FaceSplit(parse_eps(&name, param)?)),
            _ => Err(VemError::InvalidArgument(format!("unknown 3D mesh family {s:?}"))),
        }
    }
}

impl fmt::Display for CubeFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Uniform => write!(f, "uniform"),
            Self::FaceSplit(e) => write!(f, "facesplit:{e}"),
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(VemError::InvalidArgument(format!("ε = {eps} outside (0, 1/2]")));
    }
    Ok(())
}

/// Mesh of the unit square with `n` cells per side.
pub fn generate_square_mesh(n: usize, family: SquareFamily) -> Result<PolygonalMesh> {
    if n == 0 {
        return Err(VemError::InvalidArgument("n must be at least 1".into()));
    }
    match family {
        SquareFamily::Uniform => square_grid(n, None),
        SquareFamily::Distorted(seed) => square_grid(n, Some(seed)),
        SquareFamily::SmallEdge(eps) => {
            check_eps(eps)?;
            square_small_edge(n, eps)
        }
        SquareFamily::Hanging => square_hanging(n),
    }
}

fn square_grid(n: usize, jitter_seed: Option<u64>) -> Result<PolygonalMesh> {
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices: Vec<Point2> = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    if let Some(seed) = jitter_seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for j in 1..n {
            for i in 1..n {
                let r = 0.2 * h * rng.random::<f64>().sqrt();
                let theta = std::f64::consts::TAU * rng.random::<f64>();
                let v = &mut vertices[id(i, j)];
                v[0] += r * theta.cos();
                v[1] += r * theta.sin();
            }
        }
    }
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolygonalMesh::new(vertices, cells)
}

fn square_small_edge(n: usize, eps: f64) -> Result<PolygonalMesh> {
    let h = 1.0 / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices: Vec<Point2> = Vec::with_capacity((n + 1) * (n + 1) + n * n);
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    // Columns are paired (0,1), (2,3), ... and the shared vertical edge is
    // split; an unpaired last column splits its right boundary edge.
    let mut cells = vec![Vec::new(); n * n];
    for j in 0..n {
        let y = j as f64 * h + eps * h;
        let mut i = 0;
        while i < n {
            let x_split = i + 1;
            let s = vertices.len();
            vertices.push([x_split as f64 * h, y]);
            // left cell: split vertex on its right side
            cells[j * n + i] = vec![id(i, j), id(i + 1, j), s, id(i + 1, j + 1), id(i, j + 1)];
            if i + 1 < n {
                let r = i + 1;
                cells[j * n + r] = vec![id(r, j), id(r + 1, j), id(r + 1, j + 1), id(r, j + 1), s];
            }
            i += 2;
        }
    }
    PolygonalMesh::new(vertices, cells)
}

fn square_hanging(n: usize) -> Result<PolygonalMesh> {
    let h = 0.5 / n as f64;
    let refined = |i: usize, j: usize| (i + j).is_multiple_of(2);
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut vertices: Vec<Point2> = Vec::new();
    let mut vid = |p: (usize, usize), vertices: &mut Vec<Point2>| -> usize {
        *index.entry(p).or_insert_with(|| {
            vertices.push([p.0 as f64 * h, p.1 as f64 * h]);
            vertices.len() - 1
        })
    };
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (x0, y0) = (2 * i, 2 * j);
            if refined(i, j) {
                for (dj, di) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let (a, b) = (x0 + di, y0 + dj);
                    cells.push(vec![
                        vid((a, b), &mut vertices),
                        vid((a + 1, b), &mut vertices),
                        vid((a + 1, b + 1), &mut vertices),
                        vid((a, b + 1), &mut vertices),
                    ]);
                }
            } else {
                let bottom = j > 0 && refined(i, j - 1);
                let right = i + 1 < n && refined(i + 1, j);
                let top = j + 1 < n && refined(i, j + 1);
                let left = i > 0 && refined(i - 1, j);
                let mut cell = vec![vid((x0, y0), &mut vertices)];
                if bottom {
                    cell.push(vid((x0 + 1, y0), &mut vertices));
                }
                cell.push(vid((x0 + 2, y0), &mut vertices));
                if right {
                    cell.push(vid((x0 + 2, y0 + 1), &mut vertices));
                }
                cell.push(vid((x0 + 2, y0 + 2), &mut vertices));
                if top {
                    cell.push(vid((x0 + 1, y0 + 2), &mut vertices));
                }
                cell.push(vid((x0, y0 + 2), &mut vertices));
                if left {
                    cell.push(vid((x0, y0 + 1), &mut vertices));
                }
                cells.push(cell);
            }
        }
    }
    PolygonalMesh::new(vertices, cells)
}

/// Mesh of the unit cube with `n³` hexahedral cells.
pub fn generate_cube_mesh(n: usize, family: CubeFamily) -> Result<PolyhedralMesh> {
    if n == 0 {
        return Err(VemError::InvalidArgument("n must be at least 1".into()));
    }
    let eps = match family {
        CubeFamily::Uniform => None,
        CubeFamily::FaceSplit(e) => {
            check_eps(e)?;
            Some(e)
        }
    };
    let h = 1.0 / n as f64;
    let m = n + 1;
    let id = |i: usize, j: usize, l: usize| (l * m + j) * m + i;
    let mut vertices: Vec<Point3> = Vec::with_capacity(m * m * m);
    for l in 0..=n {
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64 * h, j as f64 * h, l as f64 * h]);
            }
        }
    }
    // split vertex on the vertical edge above grid point (i, j, l)
    let split_edge = |i: usize, j: usize| eps.is_some() && (i + j).is_multiple_of(2);
    let mut split: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    if let Some(e) = eps {
        for l in 0..n {
            for j in 0..=n {
                for i in 0..=n {
                    if split_edge(i, j) {
                        split.insert((i, j, l), vertices.len());
                        vertices.push([i as f64 * h, j as f64 * h, (l as f64 + e) * h]);
                    }
                }
            }
        }
    }
    let sv = |i: usize, j: usize, l: usize| split.get(&(i, j, l)).copied();

    let mut faces: Vec<Vec<usize>> = Vec::new();
    // x-faces, normal +x, loop counter-clockwise in (y, z)
    let mut xface = BTreeMap::new();
    for i in 0..=n {
        for j in 0..n {
            for l in 0..n {
                let mut f = vec![id(i, j, l), id(i, j + 1, l)];
                f.extend(sv(i, j + 1, l));
                f.push(id(i, j + 1, l + 1));
                f.push(id(i, j, l + 1));
                f.extend(sv(i, j, l));
                xface.insert((i, j, l), faces.len());
                faces.push(f);
            }
        }
    }
    // y-faces, normal +y, loop counter-clockwise in (z, x)
    let mut yface = BTreeMap::new();
    for j in 0..=n {
        for i in 0..n {
            for l in 0..n {
                let mut f = vec![id(i, j, l)];
                f.extend(sv(i, j, l));
                f.push(id(i, j, l + 1));
                f.push(id(i + 1, j, l + 1));
                f.extend(sv(i + 1, j, l));
                f.push(id(i + 1, j, l));
                yface.insert((i, j, l), faces.len());
                faces.push(f);
            }
        }
    }
    // z-faces, normal +z
    let mut zface = BTreeMap::new();
    for l in 0..=n {
        for j in 0..n {
            for i in 0..n {
                zface.insert((i, j, l), faces.len());
                faces.push(vec![id(i, j, l), id(i + 1, j, l), id(i + 1, j + 1, l), id(i, j + 1, l)]);
            }
        }
    }
    let mut cells = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for j in 0..n {
            for i in 0..n {
                cells.push(vec![
                    (xface[&(i, j, l)], -1),
                    (xface[&(i + 1, j, l)], 1),
                    (yface[&(i, j, l)], -1),
                    (yface[&(i, j + 1, l)], 1),
                    (zface[&(i, j, l)], -1),
                    (zface[&(i, j, l + 1)], 1),
                ]);
            }
        }
    }
    PolyhedralMesh::new(vertices, faces, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_parsing() {
        assert_eq!("uniform".parse::<SquareFamily>().unwrap(), SquareFamily::Uniform);
        assert_eq!("smalledge(0.1)".parse::<SquareFamily>().unwrap(), SquareFamily::SmallEdge(0.1));
        assert_eq!("smalledge:1e-4".parse::<SquareFamily>().unwrap(), SquareFamily::SmallEdge(1e-4));
        assert_eq!("distorted:7".parse::<SquareFamily>().unwrap(), SquareFamily::Distorted(7));
        assert_eq!("facesplit:0.05".parse::<CubeFamily>().unwrap(), CubeFamily::FaceSplit(0.05));
        assert!("voronoi".parse::<SquareFamily>().is_err());
        assert!("smalledge".parse::<SquareFamily>().is_err());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(generate_square_mesh(0, SquareFamily::Uniform).is_err());
        assert!(generate_square_mesh(2, SquareFamily::SmallEdge(0.0)).is_err());
        assert!(generate_square_mesh(2, SquareFamily::SmallEdge(0.6)).is_err());
        assert!(generate_cube_mesh(0, CubeFamily::Uniform).is_err());
        assert!(generate_cube_mesh(1, CubeFamily::FaceSplit(-1.0)).is_err());
    }

    fn euler_and_area(mesh: &PolygonalMesh) {
        let v = mesh.vertices().len() as i64;
        let e = mesh.edges().len() as i64;
        let c = mesh.n_cells() as i64;
        assert_eq!(v - e + c, 1);
        let area: f64 = (0..mesh.n_cells()).map(|c| mesh.cell_geometry(c).unwrap().area).sum();
        assert!((area - 1.0).abs() < 1e-12);
    }

    #[test]
    fn square_families_are_valid() {
        for n in [1, 2, 3, 4, 7] {
            for family in [
                SquareFamily::Uniform,
                SquareFamily::SmallEdge(0.1),
                SquareFamily::SmallEdge(1e-6),
                SquareFamily::Hanging,
                SquareFamily::Distorted(42),
            ] {
                euler_and_area(&generate_square_mesh(n, family).unwrap());
            }
        }
    }

    #[test]
    fn unit_square_single_cell() {
        let m = generate_square_mesh(1, SquareFamily::Uniform).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert_eq!(m.vertices().len(), 4);
        assert_eq!(m.edges().len(), 4);
        assert!((0..4).all(|e| m.is_boundary_edge(e)));
    }

    #[test]
    fn small_edge_cells_have_five_edges() {
        let m = generate_square_mesh(2, SquareFamily::SmallEdge(0.1)).unwrap();
        let mut min_edge = f64::MAX;
        for c in 0..m.n_cells() {
            let g = m.cell_geometry(c).unwrap();
            assert_eq!(g.edge_lengths.len(), 5);
            min_edge = min_edge.min(g.edge_lengths.iter().cloned().fold(f64::MAX, f64::min));
            // longest edge h = 1/2 over shortest ε h
            assert!((g.edge_ratio() - 10.0).abs() < 1e-12);
        }
        assert!((min_edge - 0.05).abs() < 1e-15);
        // odd n splits a boundary edge in the last column
        let m = generate_square_mesh(3, SquareFamily::SmallEdge(0.1)).unwrap();
        assert!((0..m.n_cells()).all(|c| m.cells()[c].len() == 5));
    }

    #[test]
    fn hanging_nodes_split_coarse_edges() {
        let m = generate_square_mesh(4, SquareFamily::Hanging).unwrap();
        assert_eq!(m.n_cells(), 8 * 4 + 8);
        // a coarse interior cell sees four fine neighbours: 8 vertices
        let coarse = m.cells().iter().filter(|c| c.len() == 8).count();
        assert!(coarse > 0);
        // every fine-side half of a coarse edge is its own mesh edge, so all
        // interior edges have the fine length
        for (e, edge) in m.edges().iter().enumerate() {
            let [a, b] = edge.vertices;
            let len = crate::vecops::dist(m.vertices()[a], m.vertices()[b]);
            if !m.is_boundary_edge(e) {
                assert!((len - 0.125).abs() < 1e-15, "edge {e} has length {len}");
            }
        }
    }

    #[test]
    fn distorted_is_reproducible_and_bounded() {
        let a = generate_square_mesh(5, SquareFamily::Distorted(7)).unwrap();
        let b = generate_square_mesh(5, SquareFamily::Distorted(7)).unwrap();
        let u = generate_square_mesh(5, SquareFamily::Uniform).unwrap();
        assert_eq!(a.vertices(), b.vertices());
        let max_shift = a
            .vertices()
            .iter()
            .zip(u.vertices())
            .map(|(p, q)| crate::vecops::dist(*p, *q))
            .fold(0.0, f64::max);
        assert!(max_shift > 0.0 && max_shift <= 0.2 / 5.0 + 1e-15);
        for (v, p) in a.vertices().iter().enumerate() {
            if a.is_boundary_vertex(v) {
                assert_eq!(*p, u.vertices()[v]);
            }
        }
    }

    #[test]
    fn cube_counts() {
        let m = generate_cube_mesh(1, CubeFamily::Uniform).unwrap();
        assert_eq!(m.n_cells(), 1);
        assert_eq!(m.faces().len(), 6);
        assert!((m.cell_geometry(0).unwrap().volume - 1.0).abs() < 1e-15);
        let m = generate_cube_mesh(2, CubeFamily::Uniform).unwrap();
        assert_eq!(m.n_cells(), 8);
        assert_eq!(m.faces().len(), 36);
    }

    #[test]
    fn facesplit_faces_get_a_small_edge() {
        let m = generate_cube_mesh(1, CubeFamily::FaceSplit(0.25)).unwrap();
        let five: Vec<usize> = (0..6).filter(|&f| m.faces()[f].len() == 5).collect();
        assert_eq!(five.len(), 4);
        for f in five {
            assert!((m.face_edge_ratio(f) - 4.0).abs() < 1e-12);
        }
        for n in [2, 3] {
            let m = generate_cube_mesh(n, CubeFamily::FaceSplit(0.05)).unwrap();
            let vol: f64 = (0..m.n_cells()).map(|c| m.cell_geometry(c).unwrap().volume).sum();
            assert!((vol - 1.0).abs() < 1e-12);
            for f in 0..m.faces().len() {
                let vertical = m.face_points(f).iter().any(|p| p[2] != m.face_points(f)[0][2]);
                assert_eq!(m.faces()[f].len(), if vertical { 5 } else { 4 });
            }
        }
    }
}
