//! Plain-text mesh format.
//!
//! ```text
//! # comment lines and blank lines are ignored
//! dim n_nodes n_cells
//! x y [z]                      (n_nodes lines)
//! v0 v1 v2 v3 [v4..v7] fluid   (n_cells lines, subdomain `fluid` or `solid`)
//! v0 v1 [v2 v3] inflow         (any number of facet-tag lines)
//! circle cx cy r               (optional, enables obstacle snapping)
//! ```
//!
//! Vertex indices are 0-based and follow the tensor-product ordering of
//! [`Mesh`](super::Mesh). Tag names are `inflow`, `outflow`, `top`, `bottom`,
//! `side`, `obstacle` and `solid_base`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{facet_key, BoundaryTag, Circle, Mesh, Subdomain};
use crate::error::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::MeshParse { line, msg: msg.into() }
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hl, header) = lines.next().ok_or_else(|| perr(0, "empty mesh file"))?;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| perr(hl, format!("bad header token `{t}`"))))
        .collect::<Result<_>>()?;
    if h.len() != 3 {
        return Err(perr(hl, "header must be `dim n_nodes n_cells`"));
    }
    let (dim, n_nodes, n_cells) = (h[0], h[1], h[2]);
    if dim != 2 && dim != 3 {
        return Err(perr(hl, format!("unsupported dimension {dim}")));
    }

    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (ln, l) = lines.next().ok_or_else(|| perr(hl, "unexpected end of file in node list"))?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| perr(ln, format!("bad coordinate `{t}`"))))
            .collect::<Result<_>>()?;
        if xs.len() != dim {
            return Err(perr(ln, format!("expected {dim} coordinates")));
        }
        let mut p = [0.0; 3];
        p[..dim].copy_from_slice(&xs);
        nodes.push(p);
    }

    let nv = 1 << dim;
    let mut cells = Vec::with_capacity(n_cells);
    let mut subs = Vec::with_capacity(n_cells);
    for _ in 0..n_cells {
        let (ln, l) = lines.next().ok_or_else(|| perr(hl, "unexpected end of file in cell list"))?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != nv + 1 {
            return Err(perr(ln, format!("expected {nv} vertex ids and a subdomain")));
        }
        let verts = parse_ids(&toks[..nv], n_nodes, ln)?;
        let sub = match toks[nv] {
            "fluid" => Subdomain::Fluid,
            "solid" => Subdomain::Solid,
            other => return Err(perr(ln, format!("unknown subdomain `{other}`"))),
        };
        cells.push(verts);
        subs.push(sub);
    }

    let nf = nv / 2;
    let mut tags = BTreeMap::new();
    let mut circle = None;
    for (ln, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks[0] == "circle" {
            let v: Vec<f64> = toks[1..]
                .iter()
                .map(|t| t.parse().map_err(|_| perr(ln, format!("bad number `{t}`"))))
                .collect::<Result<_>>()?;
            if v.len() != 3 || v[2] <= 0.0 {
                return Err(perr(ln, "circle line must be `circle cx cy r` with r > 0"));
            }
            circle = Some(Circle {
                center: [v[0], v[1], 0.0],
                radius: v[2],
            });
            continue;
        }
        if toks.len() != nf + 1 {
            return Err(perr(ln, format!("expected {nf} vertex ids and a tag")));
        }
        let verts = parse_ids(&toks[..nf], n_nodes, ln)?;
        let tag = BoundaryTag::from_name(toks[nf]).ok_or_else(|| perr(ln, format!("unknown tag `{}`", toks[nf])))?;
        tags.insert(facet_key(&verts), tag);
    }

    let mesh = Mesh::from_parts(dim, nodes, cells, subs, tags, circle)?;
    mesh.validate()?;
    Ok(mesh)
}

fn parse_ids(toks: &[&str], n_nodes: usize, line: usize) -> Result<Vec<usize>> {
    toks.iter()
        .map(|t| {
            let v: usize = t.parse().map_err(|_| perr(line, format!("bad vertex id `{t}`")))?;
            if v >= n_nodes {
                return Err(perr(line, format!("vertex id {v} out of range")));
            }
            Ok(v)
        })
        .collect()
}

pub fn write_mesh(mesh: &Mesh) -> String {
    let dim = mesh.dim();
    let mut s = String::new();
    let _ = writeln!(s, "{} {} {}", dim, mesh.n_nodes(), mesh.n_cells());
    for p in mesh.nodes() {
        let coords: Vec<String> = p[..dim].iter().map(|x| format!("{x:.17e}")).collect();
        let _ = writeln!(s, "{}", coords.join(" "));
    }
    for c in 0..mesh.n_cells() {
        let ids: Vec<String> = mesh.cell_vertices(c).iter().map(usize::to_string).collect();
        let sub = match mesh.subdomain(c) {
            Subdomain::Fluid => "fluid",
            Subdomain::Solid => "solid",
        };
        let _ = writeln!(s, "{} {sub}", ids.join(" "));
    }
    let nf = 1 << (dim - 1);
    for (key, tag) in mesh.facet_tags() {
        let ids: Vec<String> = key[..nf].iter().map(usize::to_string).collect();
        let _ = writeln!(s, "{} {}", ids.join(" "), tag.name());
    }
    if let Some(c) = mesh.obstacle() {
        let _ = writeln!(s, "circle {:.17e} {:.17e} {:.17e}", c.center[0], c.center[1], c.radius);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_fsi2_mesh;

    #[test]
    fn roundtrip_fsi2() {
        let m = build_fsi2_mesh(0).unwrap();
        let back = read_mesh(&write_mesh(&m)).unwrap();
        assert_eq!(back.n_cells(), m.n_cells());
        assert_eq!(back.nodes(), m.nodes());
        assert_eq!(back.facet_tags(), m.facet_tags());
        assert_eq!(back.subdomains(), m.subdomains());
    }

    #[test]
    fn single_cell_text() {
        let text = "2 4 1\n0 0\n1 0\n0 1\n1 1\n0 1 2 3 fluid\n0 2 inflow\n1 3 outflow\n0 1 bottom\n2 3 top\n";
        let m = read_mesh(text).unwrap();
        assert_eq!(m.n_cells(), 1);
    }

    #[test]
    fn untagged_boundary_rejected() {
        let text = "2 4 1\n0 0\n1 0\n0 1\n1 1\n0 1 2 3 fluid\n0 2 inflow\n";
        assert!(read_mesh(text).is_err());
    }

    #[test]
    fn bad_token_reports_line() {
        let text = "2 4 1\n0 0\n1 x\n";
        match read_mesh(text) {
            Err(Error::MeshParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
