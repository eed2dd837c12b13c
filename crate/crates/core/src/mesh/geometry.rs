//! Exact cell geometry: measures, centroids, diameters and star centers.

use crate::vecops::{add, cross2, cross3, diameter, dot, norm, scale, sub};
use crate::{Point2, Point3, Result, VemError};
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

/// Geometry of a polygonal cell (vertices counter-clockwise).
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry2 {
    pub diameter: f64,
    pub area: f64,
    pub perimeter: f64,
    pub centroid: Point2,
    pub edge_lengths: Vec<f64>,
    /// Point the cell is star-shaped with respect to; used as the fan center.
    pub star_center: Point2,
    /// Center and radius of the largest disc inscribed in the kernel.
    pub kernel_center: Point2,
    pub kernel_radius: f64,
}

impl CellGeometry2 {
    /// Ratio of the longest to the shortest edge.
    pub fn edge_ratio(&self) -> f64 {
        let max = self.edge_lengths.iter().cloned().fold(0.0, f64::max);
        let min = self.edge_lengths.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    /// Kernel-disc radius relative to the diameter.
    pub fn rho(&self) -> f64 {
        self.kernel_radius / self.diameter
    }
}

/// Geometry of a polyhedral cell with outward-oriented face loops.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry3 {
    pub diameter: f64,
    pub volume: f64,
    pub surface_area: f64,
    pub centroid: Point3,
    pub face_areas: Vec<f64>,
    pub face_diameters: Vec<f64>,
    pub face_centroids: Vec<Point3>,
    /// Outward unit normals.
    pub face_normals: Vec<Point3>,
    pub star_center: Point3,
    pub kernel_center: Point3,
    pub kernel_radius: f64,
}

impl CellGeometry3 {
    pub fn rho(&self) -> f64 {
        self.kernel_radius / self.diameter
    }
}

/// Signed area (positive for counter-clockwise loops).
pub fn signed_area(vertices: &[Point2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| cross2(vertices[i], vertices[(i + 1) % n]))
        .sum::<f64>()
}

/// Half-plane `n · x <= c` with unit `n`, one per edge of non-zero length.
fn edge_halfplanes(vertices: &[Point2]) -> Vec<(Point2, f64)> {
    let n = vertices.len();
    (0..n)
        .filter_map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let d = sub(b, a);
            let len = norm(d);
            if len == 0.0 {
                return None;
            }
            let normal = [d[1] / len, -d[0] / len];
            Some((normal, dot(normal, a)))
        })
        .collect()
}

/// Largest disc inside the intersection of half-planes `n_i·x <= c_i`.
///
/// The maximiser of the small LP `max r s.t. n_i·x + r <= c_i` sits at a
/// vertex with three active constraints, so all triples are enumerated.
/// Ties keep the first triple found, which makes the result deterministic.
fn chebyshev_center_2d(planes: &[(Point2, f64)], scale: f64) -> Option<(Point2, f64)> {
    let tol = 1e-12 * scale;
    let m = planes.len();
    let mut best: Option<(Point2, f64)> = None;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let rows = [planes[i], planes[j], planes[k]];
                let a = Matrix3::from_fn(|r, c| if c < 2 { rows[r].0[c] } else { 1.0 });
                let rhs = Vector3::new(rows[0].1, rows[1].1, rows[2].1);
                let Some(sol) = a.lu().solve(&rhs) else { continue };
                if !sol.iter().all(|v| v.is_finite()) {
                    continue;
                }
                let x = [sol[0], sol[1]];
                let r = sol[2];
                if planes.iter().all(|(n, c)| dot(*n, x) + r <= c + tol)
                    && best.is_none_or(|(_, br)| r > br + tol)
                {
                    best = Some((x, r));
                }
            }
        }
    }
    best
}

fn chebyshev_center_3d(planes: &[(Point3, f64)], scale: f64) -> Option<(Point3, f64)> {
    let tol = 1e-12 * scale;
    let m = planes.len();
    let mut best: Option<(Point3, f64)> = None;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                for l in k + 1..m {
                    let rows = [planes[i], planes[j], planes[k], planes[l]];
                    let a = Matrix4::from_fn(|r, c| if c < 3 { rows[r].0[c] } else { 1.0 });
                    let rhs = Vector4::new(rows[0].1, rows[1].1, rows[2].1, rows[3].1);
                    let Some(sol) = a.lu().solve(&rhs) else { continue };
                    if !sol.iter().all(|v| v.is_finite()) {
                        continue;
                    }
                    let x = [sol[0], sol[1], sol[2]];
                    let r = sol[3];
                    if planes.iter().all(|(n, c)| dot(*n, x) + r <= c + tol)
                        && best.is_none_or(|(_, br)| r > br + tol)
                    {
                        best = Some((x, r));
                    }
                }
            }
        }
    }
    best
}

/// Geometry of a counter-clockwise polygon.
///
/// Fails with [`VemError::KernelEmpty`] when the polygon is not star-shaped
/// with respect to any disc.
pub fn polygon_geometry(vertices: &[Point2]) -> Result<CellGeometry2> {
    let n = vertices.len();
    if n < 3 {
        return Err(VemError::InvalidMesh(format!("polygon with {n} vertices")));
    }
    let mut area2 = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut edge_lengths = Vec::with_capacity(n);
    // about the first vertex to limit cancellation
    let o = vertices[0];
    for i in 0..n {
        let a = sub(vertices[i], o);
        let b = sub(vertices[(i + 1) % n], o);
        let c = cross2(a, b);
        area2 += c;
        cx += (a[0] + b[0]) * c;
        cy += (a[1] + b[1]) * c;
        edge_lengths.push(norm(sub(b, a)));
    }
    let area = 0.5 * area2;
    if area <= 0.0 {
        return Err(VemError::InvalidMesh(format!("polygon has non-positive signed area {area}")));
    }
    let centroid = [o[0] + cx / (3.0 * area2), o[1] + cy / (3.0 * area2)];
    let diam = diameter(vertices);
    let planes = edge_halfplanes(vertices);
    let (kernel_center, kernel_radius) = chebyshev_center_2d(&planes, diam).ok_or(VemError::KernelEmpty)?;
    if kernel_radius <= 1e-14 * diam {
        return Err(VemError::KernelEmpty);
    }
    let centroid_inside = planes
        .iter()
        .all(|(nrm, c)| dot(*nrm, centroid) < c - 1e-10 * diam);
    Ok(CellGeometry2 {
        diameter: diam,
        area,
        perimeter: edge_lengths.iter().sum(),
        centroid,
        edge_lengths,
        star_center: if centroid_inside { centroid } else { kernel_center },
        kernel_center,
        kernel_radius,
    })
}

/// Area vector (Newell's method): `|A|` is the area, `A/|A|` the normal
/// consistent with the loop orientation.
pub fn face_area_vector(loop_pts: &[Point3]) -> Point3 {
    let n = loop_pts.len();
    let mut acc = [0.0; 3];
    // about the first vertex to limit cancellation
    let o = loop_pts[0];
    for i in 1..n - 1 {
        acc = add(acc, cross3(sub(loop_pts[i], o), sub(loop_pts[i + 1], o)));
    }
    scale(acc, 0.5)
}

/// Area-weighted centroid of a planar polygon in space.
pub fn face_centroid(loop_pts: &[Point3]) -> Point3 {
    let n = loop_pts.len();
    let normal = face_area_vector(loop_pts);
    let o = loop_pts[0];
    let mut total = 0.0;
    let mut acc = [0.0; 3];
    for i in 1..n - 1 {
        let a = dot(cross3(sub(loop_pts[i], o), sub(loop_pts[i + 1], o)), normal);
        let c = scale(add(add(o, loop_pts[i]), loop_pts[i + 1]), 1.0 / 3.0);
        acc = add(acc, scale(c, a));
        total += a;
    }
    scale(acc, 1.0 / total)
}

/// Geometry of a polyhedron given by face loops oriented with outward normals.
pub fn polyhedron_geometry(faces: &[Vec<Point3>]) -> Result<CellGeometry3> {
    if faces.len() < 4 {
        return Err(VemError::InvalidMesh(format!("polyhedron with {} faces", faces.len())));
    }
    let mut all_pts: Vec<Point3> = faces.iter().flatten().copied().collect();
    all_pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all_pts.dedup();
    let diam = diameter(&all_pts);
    let vertex_mean = scale(
        all_pts.iter().fold([0.0; 3], |acc, p| add(acc, *p)),
        1.0 / all_pts.len() as f64,
    );

    let mut face_areas = Vec::with_capacity(faces.len());
    let mut face_diameters = Vec::with_capacity(faces.len());
    let mut face_centroids = Vec::with_capacity(faces.len());
    let mut face_normals = Vec::with_capacity(faces.len());
    let mut planes = Vec::with_capacity(faces.len());
    let mut volume_div = 0.0;
    for f in faces {
        let av = face_area_vector(f);
        let area = norm(av);
        if area <= 0.0 {
            return Err(VemError::InvalidMesh("degenerate face".into()));
        }
        let nrm = scale(av, 1.0 / area);
        let fc = face_centroid(f);
        volume_div += dot(av, f[0]) / 3.0;
        planes.push((nrm, dot(nrm, fc)));
        face_areas.push(area);
        face_diameters.push(diameter(f));
        face_centroids.push(fc);
        face_normals.push(nrm);
    }

    // Tetrahedral fan from the vertex mean over face fans.
    let mut volume = 0.0;
    let mut moment = [0.0; 3];
    for (f, &fc) in faces.iter().zip(&face_centroids) {
        let n = f.len();
        for i in 0..n {
            let (a, b) = (f[i], f[(i + 1) % n]);
            let v = dot(sub(fc, vertex_mean), cross3(sub(a, vertex_mean), sub(b, vertex_mean))) / 6.0;
            let c = scale(add(add(vertex_mean, fc), add(a, b)), 0.25);
            volume += v;
            moment = add(moment, scale(c, v));
        }
    }
    if volume <= 0.0 {
        return Err(VemError::InvalidMesh(format!(
            "polyhedron has non-positive volume {volume} (faces not outward)"
        )));
    }
    if (volume - volume_div).abs() > 1e-10 * volume {
        return Err(VemError::InvalidMesh(format!(
            "volume routes disagree: fan {volume} vs divergence {volume_div}"
        )));
    }
    let centroid = scale(moment, 1.0 / volume);
    let (kernel_center, kernel_radius) = chebyshev_center_3d(&planes, diam).ok_or(VemError::KernelEmpty)?;
    if kernel_radius <= 1e-14 * diam {
        return Err(VemError::KernelEmpty);
    }
    let centroid_inside = planes
        .iter()
        .all(|(nrm, c)| dot(*nrm, centroid) < c - 1e-10 * diam);
    Ok(CellGeometry3 {
        diameter: diam,
        volume,
        surface_area: face_areas.iter().sum(),
        centroid,
        face_areas,
        face_diameters,
        face_centroids,
        face_normals,
        star_center: if centroid_inside { centroid } else { kernel_center },
        kernel_center,
        kernel_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square() {
        let g = polygon_geometry(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.area - 1.0).abs() < 1e-15);
        assert_eq!(g.centroid, [0.5, 0.5]);
        assert_eq!(g.star_center, [0.5, 0.5]);
        assert!((g.rho() - 0.5 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn triangle() {
        let g = polygon_geometry(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        assert!((g.area - 0.5).abs() < 1e-15);
        assert!((g.diameter - 2f64.sqrt()).abs() < 1e-15);
        // inradius of the right isoceles triangle: (2 - sqrt 2)/2
        assert!((g.kernel_radius - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn l_shaped_hexagon() {
        let l = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 1.0], [1.0, 2.0], [0.0, 2.0]];
        let g = polygon_geometry(&l).unwrap();
        // shoelace: 2x1 + 1x1
        assert!((g.area - 3.0).abs() < 1e-15);
        assert!((g.centroid[0] - 5.0 / 6.0).abs() < 1e-15);
        // kernel is [0,1]^2, which contains the centroid (5/6, 5/6)
        assert_eq!(g.star_center, g.centroid);
        assert!((g.kernel_radius - 0.5).abs() < 1e-14);
    }

    #[test]
    fn non_star_shaped_is_rejected() {
        // comb with two deep notches: kernel is empty
        let comb = [
            [0.0, 0.0],
            [5.0, 0.0],
            [5.0, 3.0],
            [4.0, 3.0],
            [4.0, 0.5],
            [3.0, 0.5],
            [3.0, 3.0],
            [2.0, 3.0],
            [2.0, 0.5],
            [1.0, 0.5],
            [1.0, 3.0],
            [0.0, 3.0],
        ];
        assert!(matches!(polygon_geometry(&comb), Err(VemError::KernelEmpty)));
    }

    #[test]
    fn clockwise_is_rejected() {
        let cw = [[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(matches!(polygon_geometry(&cw), Err(VemError::InvalidMesh(_))));
    }

    fn unit_cube_faces() -> Vec<Vec<Point3>> {
        let p = |x: f64, y: f64, z: f64| [x, y, z];
        vec![
            vec![p(0., 0., 0.), p(0., 1., 0.), p(1., 1., 0.), p(1., 0., 0.)],
            vec![p(0., 0., 1.), p(1., 0., 1.), p(1., 1., 1.), p(0., 1., 1.)],
            vec![p(0., 0., 0.), p(1., 0., 0.), p(1., 0., 1.), p(0., 0., 1.)],
            vec![p(0., 1., 0.), p(0., 1., 1.), p(1., 1., 1.), p(1., 1., 0.)],
            vec![p(0., 0., 0.), p(0., 0., 1.), p(0., 1., 1.), p(0., 1., 0.)],
            vec![p(1., 0., 0.), p(1., 1., 0.), p(1., 1., 1.), p(1., 0., 1.)],
        ]
    }

    #[test]
    fn unit_cube() {
        let g = polyhedron_geometry(&unit_cube_faces()).unwrap();
        assert!((g.volume - 1.0).abs() < 1e-15);
        assert!((g.diameter - 3f64.sqrt()).abs() < 1e-15);
        assert!((g.surface_area - 6.0).abs() < 1e-15);
        for c in g.centroid {
            assert!((c - 0.5).abs() < 1e-15);
        }
        assert!((g.kernel_radius - 0.5).abs() < 1e-14);
        assert!((g.face_diameters[0] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn inward_cube_is_rejected() {
        let faces: Vec<Vec<Point3>> = unit_cube_faces()
            .into_iter()
            .map(|mut f| {
                f.reverse();
                f
            })
            .collect();
        assert!(polyhedron_geometry(&faces).is_err());
    }
}
