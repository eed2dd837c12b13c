//! JSON mesh files.
//!
//! 2D: `{"dim":2, "vertices":[[x,y],...], "cells":[[v0,v1,...],...]}`
//! 3D: `{"dim":3, "vertices":[[x,y,z],...], "faces":[[v...],...], "cells":[[[face,±1],...],...]}`

use super::{PolygonalMesh, PolyhedralMesh};
use crate::{Result, VemError};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone)]
pub enum Mesh {
    Polygonal(PolygonalMesh),
    Polyhedral(PolyhedralMesh),
}

impl Mesh {
    pub fn dim(&self) -> usize {
        match self {
            Mesh::Polygonal(_) => 2,
            Mesh::Polyhedral(_) => 3,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct File2 {
    dim: usize,
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct File3 {
    dim: usize,
    vertices: Vec<[f64; 3]>,
    faces: Vec<Vec<usize>>,
    cells: Vec<Vec<(usize, i8)>>,
}

#[derive(Deserialize)]
struct Header {
    dim: usize,
}

pub fn to_json(mesh: &Mesh) -> Result<String> {
    Ok(match mesh {
        Mesh::Polygonal(m) => serde_json::to_string(&File2 {
            dim: 2,
            vertices: m.vertices().to_vec(),
            cells: m.cells().to_vec(),
        })?,
        Mesh::Polyhedral(m) => serde_json::to_string(&File3 {
            dim: 3,
            vertices: m.vertices().to_vec(),
            faces: m.faces().to_vec(),
            cells: m.cells().to_vec(),
        })?,
    })
}

pub fn from_json(text: &str) -> Result<Mesh> {
    let header: Header = serde_json::from_str(text)?;
    match header.dim {
        2 => {
            let f: File2 = serde_json::from_str(text)?;
            Ok(Mesh::Polygonal(PolygonalMesh::new(f.vertices, f.cells)?))
        }
        3 => {
            let f: File3 = serde_json::from_str(text)?;
            Ok(Mesh::Polyhedral(PolyhedralMesh::new(f.vertices, f.faces, f.cells)?))
        }
        d => Err(VemError::InvalidMesh(format!("unsupported dimension {d}"))),
    }
}

pub fn write_mesh(mesh: &Mesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_json(mesh)? + "\n")?;
    Ok(())
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Mesh> {
    from_json(&std::fs::read_to_string(path)?)
}
