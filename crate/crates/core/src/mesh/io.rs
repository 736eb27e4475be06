//! Line-oriented text format for curved surface meshes.
//!
//! Sections, in order: VERTICES / ELEMENTS / GEOMNODES / SURFACE. Coordinates
//! are written with 17 significant digits so that a write/read round trip is
//! bit-exact.

use super::{build_adjacency, SurfaceKind, SurfaceMesh, V3};
use crate::error::{Error, Result};
use crate::refelem::node_count;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub fn write_mesh(mesh: &SurfaceMesh, path: &Path) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "VERTICES {}", mesh.vertices.len()).unwrap();
    for v in &mesh.vertices {
        writeln!(out, "{:.16e} {:.16e} {:.16e}", v.x, v.y, v.z).unwrap();
    }
    writeln!(out, "ELEMENTS {}", mesh.elements.len()).unwrap();
    for t in &mesh.elements {
        writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
    }
    writeln!(out, "GEOMNODES {} {}", mesh.elements.len(), mesh.geometric_order_q).unwrap();
    for g in &mesh.geom_nodes {
        for p in g {
            writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z).unwrap();
        }
    }
    match mesh.kind {
        SurfaceKind::Sphere { radius } => {
            writeln!(out, "SURFACE SPHERE {:.16e}", radius).unwrap();
        }
        SurfaceKind::Ellipsoid { a, b, c } => {
            writeln!(out, "SURFACE ELLIPSOID {:.16e} {:.16e} {:.16e}", a, b, c).unwrap();
        }
    }
    fs::write(path, out)?;
    Ok(())
}

struct Lines<'a> {
    iter: std::str::Lines<'a>,
    current: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        loop {
            self.current += 1;
            match self.iter.next() {
                None => {
                    return Err(Error::Parse {
                        line: self.current,
                        message: "unexpected end of file".into(),
                    })
                }
                Some(l) if l.trim().is_empty() => continue,
                Some(l) => return Ok(l.trim()),
            }
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.current, message: message.into() }
    }
}

fn parse_f64(lines: &Lines, tok: &str) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| lines.err(format!("invalid float '{tok}'")))
}

fn parse_usize(lines: &Lines, tok: &str) -> Result<usize> {
    tok.parse::<usize>().map_err(|_| lines.err(format!("invalid integer '{tok}'")))
}

fn parse_point(lines: &mut Lines) -> Result<V3> {
    let l = lines.next_line()?;
    let toks: Vec<&str> = l.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(lines.err(format!("expected 3 coordinates, got {}", toks.len())));
    }
    Ok(V3::new(
        parse_f64(lines, toks[0])?,
        parse_f64(lines, toks[1])?,
        parse_f64(lines, toks[2])?,
    ))
}

pub fn read_mesh(path: &Path) -> Result<SurfaceMesh> {
    let text = fs::read_to_string(path)?;
    let mut lines = Lines { iter: text.lines(), current: 0 };

    // VERTICES
    let header = lines.next_line()?;
    let n_vertices = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["VERTICES", n] => parse_usize(&lines, n)?,
        _ => return Err(lines.err("expected 'VERTICES <count>'")),
    };
    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        vertices.push(parse_point(&mut lines)?);
    }

    // ELEMENTS
    let header = lines.next_line()?;
    let n_elements = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["ELEMENTS", n] => parse_usize(&lines, n)?,
        _ => return Err(lines.err("expected 'ELEMENTS <count>'")),
    };
    let mut elements = Vec::with_capacity(n_elements);
    for _ in 0..n_elements {
        let l = lines.next_line()?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(lines.err("expected 3 vertex indices"));
        }
        let tri = [
            parse_usize(&lines, toks[0])?,
            parse_usize(&lines, toks[1])?,
            parse_usize(&lines, toks[2])?,
        ];
        for &v in &tri {
            if v >= n_vertices {
                return Err(lines.err(format!("vertex index {v} out of range")));
            }
        }
        elements.push(tri);
    }

    // GEOMNODES
    let header = lines.next_line()?;
    let (ge, q) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["GEOMNODES", ne, q] => (parse_usize(&lines, ne)?, parse_usize(&lines, q)?),
        _ => return Err(lines.err("expected 'GEOMNODES <elements> <q>'")),
    };
    if ge != n_elements {
        return Err(lines.err(format!("GEOMNODES element count {ge} != ELEMENTS {n_elements}")));
    }
    let per_elem = node_count(q);
    let mut geom_nodes = Vec::with_capacity(n_elements);
    for _ in 0..n_elements {
        let mut g = Vec::with_capacity(per_elem);
        for _ in 0..per_elem {
            g.push(parse_point(&mut lines)?);
        }
        geom_nodes.push(g);
    }

    // SURFACE
    let header = lines.next_line()?;
    let kind = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["SURFACE", "SPHERE", r] => SurfaceKind::Sphere { radius: parse_f64(&lines, r)? },
        ["SURFACE", "ELLIPSOID", a, b, c] => SurfaceKind::Ellipsoid {
            a: parse_f64(&lines, a)?,
            b: parse_f64(&lines, b)?,
            c: parse_f64(&lines, c)?,
        },
        _ => return Err(lines.err("expected 'SURFACE SPHERE <r>' or 'SURFACE ELLIPSOID <a> <b> <c>'")),
    };

    let (edges, element_edges) = build_adjacency(&elements)?;
    for e in &edges {
        if e.right.is_none() {
            return Err(Error::BadAdjacency(format!(
                "boundary edge {:?} in closed-surface mesh",
                e.vertices
            )));
        }
        if !e.reversed {
            return Err(Error::BadAdjacency(format!(
                "edge {:?} traversed in the same direction by both elements",
                e.vertices
            )));
        }
    }

    Ok(SurfaceMesh {
        kind,
        geometric_order_q: q,
        vertices,
        elements,
        geom_nodes,
        edges,
        element_edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_sphere_mesh;

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.txt");
        let mesh = generate_sphere_mesh(1, 3).unwrap();
        write_mesh(&mesh, &path).unwrap();
        let back = read_mesh(&path).unwrap();
        assert_eq!(mesh.vertices.len(), back.vertices.len());
        for (a, b) in mesh.vertices.iter().zip(&back.vertices) {
            assert_eq!(a, b, "vertex coordinates must round-trip exactly");
        }
        for (a, b) in mesh.elements.iter().zip(&back.elements) {
            assert_eq!(a, b);
        }
        for (ga, gb) in mesh.geom_nodes.iter().zip(&back.geom_nodes) {
            for (a, b) in ga.iter().zip(gb) {
                assert_eq!(a, b);
            }
        }
        assert_eq!(mesh.edges.len(), back.edges.len());
        // writing again produces identical bytes
        let path2 = dir.path().join("mesh2.txt");
        write_mesh(&back, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.txt");
        let mesh = generate_sphere_mesh(0, 2).unwrap();
        write_mesh(&mesh, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let cut: String = text.lines().take(8).collect::<Vec<_>>().join("\n");
        std::fs::write(&path, cut).unwrap();
        match read_mesh(&path) {
            Err(Error::Parse { line, .. }) => assert!(line > 0),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn edited_vertex_reads_fine_but_fails_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mesh.txt");
        let mut mesh = generate_sphere_mesh(0, 2).unwrap();
        mesh.vertices[0] *= 1.0 + 1e-3;
        write_mesh(&mesh, &path).unwrap();
        let back = read_mesh(&path).unwrap();
        let v = back.validate();
        assert!(!v.ok());
        assert!(v.max_vertex_residual > 1e-4);
    }
}
