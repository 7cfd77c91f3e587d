//! Two-file plain-text mesh format.
//!
//! Node file: a count line, then `index x y boundary_flag` per vertex.
//! Element file: a count line, then `index v0 v1 v2` per triangle.
//! Indices are 0-based, fields whitespace-separated, lines end with LF.

use std::fmt::Write as _;
use std::path::Path;

use super::{signed_area, Mesh, MeshError};

pub fn write_mesh(mesh: &Mesh) -> (String, String) {
    let mut nodes = format!("{}\n", mesh.num_vertices());
    for (i, (p, &b)) in mesh.vertices().iter().zip(mesh.boundary_vertex()).enumerate() {
        writeln!(nodes, "{i} {:?} {:?} {}", p[0], p[1], u8::from(b)).unwrap();
    }
    let mut elements = format!("{}\n", mesh.num_triangles());
    for (i, t) in mesh.triangles().iter().enumerate() {
        writeln!(elements, "{i} {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    (nodes, elements)
}

/// Parses the two files. Clockwise triangles are reoriented; boundary flags
/// must agree with the boundary implied by the triangles.
pub fn read_mesh(nodes: &str, elements: &str) -> Result<Mesh, MeshError> {
    let node_rows = parse_table(nodes, 4, "node")?;
    let vertices: Vec<[f64; 2]> = node_rows
        .iter()
        .map(|r| Ok([parse_f64(r[1])?, parse_f64(r[2])?]))
        .collect::<Result<_, MeshError>>()?;
    let flags: Vec<bool> = node_rows
        .iter()
        .map(|r| Ok(parse_usize(r[3])? != 0))
        .collect::<Result<_, MeshError>>()?;
    let mut triangles: Vec<[usize; 3]> = parse_table(elements, 4, "element")?
        .iter()
        .map(|r| Ok([parse_usize(r[1])?, parse_usize(r[2])?, parse_usize(r[3])?]))
        .collect::<Result<_, MeshError>>()?;
    for t in &mut triangles {
        if t.iter().all(|&v| v < vertices.len()) && signed_area(&vertices, t) < 0.0 {
            t.swap(1, 2);
        }
    }
    let mesh = Mesh::new(vertices, triangles)?;
    if let Some(v) = (0..mesh.num_vertices()).find(|&v| flags[v] != mesh.boundary_vertex()[v]) {
        return Err(MeshError::BoundaryFlagMismatch(v));
    }
    Ok(mesh)
}

pub fn write_mesh_files(mesh: &Mesh, prefix: impl AsRef<Path>) -> Result<(), MeshError> {
    let (nodes, elements) = write_mesh(mesh);
    let prefix = prefix.as_ref();
    std::fs::write(prefix.with_extension("node"), nodes)?;
    std::fs::write(prefix.with_extension("ele"), elements)?;
    Ok(())
}

/// Reads `<prefix>.node` and `<prefix>.ele`.
pub fn read_mesh_files(prefix: impl AsRef<Path>) -> Result<Mesh, MeshError> {
    let prefix = prefix.as_ref();
    let nodes = std::fs::read_to_string(prefix.with_extension("node"))?;
    let elements = std::fs::read_to_string(prefix.with_extension("ele"))?;
    read_mesh(&nodes, &elements)
}

/// Edge segments as `x y` pairs separated by blank lines, the layout
/// gnuplot and similar tools expect for line plots.
pub fn write_wireframe(mesh: &Mesh) -> String {
    let mut out = String::new();
    for &[a, b] in mesh.edges() {
        let (p, q) = (mesh.vertices()[a], mesh.vertices()[b]);
        writeln!(out, "{:?} {:?}\n{:?} {:?}\n", p[0], p[1], q[0], q[1]).unwrap();
    }
    out
}

fn parse_table<'a>(text: &'a str, width: usize, what: &str) -> Result<Vec<Vec<&'a str>>, MeshError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let count = lines
        .next()
        .ok_or_else(|| MeshError::Parse(format!("empty {what} file")))?;
    let count = count
        .split_whitespace()
        .next()
        .map(parse_usize)
        .transpose()?
        .unwrap_or(0);
    let mut rows = Vec::with_capacity(count);
    for (k, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < width {
            return Err(MeshError::Parse(format!("{what} line {}: expected {width} fields", k + 2)));
        }
        if parse_usize(fields[0])? != k {
            return Err(MeshError::Parse(format!("{what} line {}: index out of sequence", k + 2)));
        }
        rows.push(fields);
    }
    if rows.len() != count {
        return Err(MeshError::Parse(format!(
            "{what} file declares {count} rows but has {}",
            rows.len()
        )));
    }
    Ok(rows)
}

fn parse_f64(s: &str) -> Result<f64, MeshError> {
    s.parse().map_err(|_| MeshError::Parse(format!("bad number {s:?}")))
}

fn parse_usize(s: &str) -> Result<usize, MeshError> {
    s.parse().map_err(|_| MeshError::Parse(format!("bad index {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::super::{generate_lshape, regular_refine};
    use super::*;

    #[test]
    fn round_trip_preserves_mesh() {
        let m = regular_refine(&generate_lshape(2).unwrap()).unwrap();
        let (n, e) = write_mesh(&m);
        let back = read_mesh(&n, &e).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
    }

    #[test]
    fn format_layout() {
        let m = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 0.5]], vec![[0, 1, 2]]).unwrap();
        let (n, e) = write_mesh(&m);
        assert_eq!(n, "3\n0 0.0 0.0 1\n1 1.0 0.0 1\n2 0.0 0.5 1\n");
        assert_eq!(e, "1\n0 0 1 2\n");
    }

    #[test]
    fn reorients_clockwise_input() {
        let n = "3\n0 0 0 1\n1 1 0 1\n2 0 1 1\n";
        let e = "1\n0 0 2 1\n";
        let m = read_mesh(n, e).unwrap();
        assert!(m.area(0) > 0.0);
    }

    #[test]
    fn rejects_malformed_files() {
        let n = "3\n0 0 0 1\n1 1 0 1\n2 0 1 1\n";
        assert!(matches!(read_mesh(n, "2\n0 0 1 2\n"), Err(MeshError::Parse(_))));
        assert!(matches!(read_mesh(n, "1\n0 0 1\n"), Err(MeshError::Parse(_))));
        assert!(matches!(read_mesh(n, "1\n0 0 1 x\n"), Err(MeshError::Parse(_))));
        let bad_flag = "3\n0 0 0 1\n1 1 0 0\n2 0 1 1\n";
        assert!(matches!(
            read_mesh(bad_flag, "1\n0 0 1 2\n"),
            Err(MeshError::BoundaryFlagMismatch(1))
        ));
    }

    #[test]
    fn files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let m = generate_lshape(1).unwrap();
        write_mesh_files(&m, dir.path().join("l")).unwrap();
        assert!(dir.path().join("l.node").exists());
        let back = read_mesh_files(dir.path().join("l")).unwrap();
        assert_eq!(back.triangles(), m.triangles());
    }
}
