//! Polygonal meshes with derived edges and one fixed normal per edge.
//!
//! Edges are extracted from the cell cycles. Each edge is stored in the
//! direction its lowest-numbered incident cell traverses it, and its normal
//! `n_e` is the outward normal of that cell. For boundary edges this is
//! the outward normal of the domain; for interior edges it points from the
//! lower-numbered cell into the higher-numbered one.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Result, WgError};
use crate::{Point, Vector};

/// An edge of a cell, seen from that cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellEdge {
    /// Global edge id.
    pub edge: usize,
    /// Incidence sign σ(T, e) = n_∂T · n_e, either +1 or -1.
    pub sign: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellGeometry {
    pub area: f64,
    pub centroid: Point,
    /// Cell diameter h_T (maximum pairwise vertex distance).
    pub diameter: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeGeometry {
    /// Length h_e.
    pub length: f64,
    pub midpoint: Point,
    /// The fixed global unit normal n_e.
    pub normal: Vector,
    /// Unit tangent from the stored start vertex to the stored end vertex.
    pub tangent: Vector,
    pub start: Point,
    pub end: Point,
}

impl EdgeGeometry {
    fn from_points(start: Point, end: Point) -> Self {
        let d = end - start;
        let length = d.norm();
        let tangent = d / length;
        EdgeGeometry {
            length,
            midpoint: nalgebra::center(&start, &end),
            normal: Vector::new(tangent.y, -tangent.x),
            tangent,
            start,
            end,
        }
    }

    /// Maps the reference parameter t ∈ [-1, 1] onto the edge.
    pub fn point_at(&self, t: f64) -> Point {
        self.start + (self.end - self.start) * (0.5 * (t + 1.0))
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<[usize; 2]>,
    edge_cells: Vec<(usize, Option<usize>)>,
    cell_edges: Vec<Vec<CellEdge>>,
}

/// Signed area of a closed polygon (positive when counter-clockwise).
pub fn signed_area(points: &[Point]) -> f64 {
    let m = points.len();
    (0..m)
        .map(|i| {
            let p = points[i];
            let q = points[(i + 1) % m];
            p.x * q.y - q.x * p.y
        })
        .sum::<f64>()
        * 0.5
}

/// Area-weighted centroid of a simple polygon.
pub fn polygon_centroid(points: &[Point]) -> Point {
    let m = points.len();
    let area = signed_area(points);
    let (mut cx, mut cy) = (0.0, 0.0);
    for i in 0..m {
        let p = points[i];
        let q = points[(i + 1) % m];
        let cross = p.x * q.y - q.x * p.y;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    Point::new(cx / (6.0 * area), cy / (6.0 * area))
}

pub fn polygon_diameter(points: &[Point]) -> f64 {
    let mut h: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            h = h.max((p - q).norm());
        }
    }
    h
}

impl Mesh {
    /// Builds a mesh from vertices and counter-clockwise cell cycles.
    ///
    /// Rejects cells with fewer than three vertices, repeated or out of range
    /// vertex ids, non-positive area, cells that are not star-shaped with
    /// respect to their centroid, edges shared by more than two cells or
    /// traversed twice in the same direction, and subdivisions violating the
    /// Euler relation V - E + F = 1.
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(WgError::InvalidMesh("mesh has no cells".into()));
        }
        let nv = vertices.len();
        let mut edges: Vec<[usize; 2]> = Vec::new();
        let mut edge_cells: Vec<(usize, Option<usize>)> = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();

        for (c, cycle) in cells.iter().enumerate() {
            let m = cycle.len();
            if m < 3 {
                return Err(WgError::InvalidMesh(format!("cell {c} has {m} vertices")));
            }
            for (i, &v) in cycle.iter().enumerate() {
                if v >= nv {
                    return Err(WgError::InvalidMesh(format!(
                        "cell {c} references vertex {v} but there are {nv} vertices"
                    )));
                }
                if cycle[..i].contains(&v) {
                    return Err(WgError::InvalidMesh(format!("cell {c} repeats vertex {v}")));
                }
            }
            let pts: Vec<Point> = cycle.iter().map(|&v| vertices[v]).collect();
            let area = signed_area(&pts);
            if !(area > 0.0) {
                return Err(WgError::InvalidMesh(format!(
                    "cell {c} has signed area {area:e}; cells must be counter-clockwise and non-degenerate"
                )));
            }
            let centroid = polygon_centroid(&pts);
            for i in 0..m {
                let tri = [centroid, pts[i], pts[(i + 1) % m]];
                if !(signed_area(&tri) > 0.0) {
                    return Err(WgError::InvalidMesh(format!(
                        "cell {c} is not star-shaped with respect to its centroid"
                    )));
                }
            }

            let mut local = Vec::with_capacity(m);
            for i in 0..m {
                let a = cycle[i];
                let b = cycle[(i + 1) % m];
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    None => {
                        let id = edges.len();
                        edges.push([a, b]);
                        edge_cells.push((c, None));
                        lookup.insert(key, id);
                        local.push(CellEdge { edge: id, sign: 1.0 });
                    }
                    Some(&id) => {
                        if edge_cells[id].1.is_some() {
                            return Err(WgError::InvalidMesh(format!(
                                "edge ({a}, {b}) is shared by more than two cells"
                            )));
                        }
                        if edges[id] != [b, a] {
                            return Err(WgError::InvalidMesh(format!(
                                "edge ({a}, {b}) is traversed in the same direction by two cells"
                            )));
                        }
                        edge_cells[id].1 = Some(c);
                        local.push(CellEdge { edge: id, sign: -1.0 });
                    }
                }
            }
            cell_edges.push(local);
        }

        let mesh = Mesh {
            vertices,
            cells,
            edges,
            edge_cells,
            cell_edges,
        };
        let euler = mesh.euler_characteristic();
        if euler != 1 {
            return Err(WgError::InvalidMesh(format!(
                "V - E + F = {euler}; the mesh must cover a simply connected domain without unused vertices"
            )));
        }
        Ok(mesh)
    }

    /// Unit square split into n×n squares, each cut along the diagonal from
    /// its lower-left to its upper-right corner.
    pub fn uniform_triangles(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(WgError::ZeroRefinement);
        }
        let vertices = grid_vertices(n);
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut cells = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (ll, lr, ur, ul) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
                cells.push(vec![ll, lr, ur]);
                cells.push(vec![ll, ur, ul]);
            }
        }
        Mesh::new(vertices, cells)
    }

    /// Unit square split into n×n squares.
    pub fn uniform_quads(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(WgError::ZeroRefinement);
        }
        let vertices = grid_vertices(n);
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut cells = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        Mesh::new(vertices, cells)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cell(&self, cell: usize) -> &[usize] {
        &self.cells[cell]
    }

    pub fn cell_points(&self, cell: usize) -> Vec<Point> {
        self.cells[cell].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Local edges of a cell; local edge i joins cell vertices i and i+1.
    pub fn cell_edges(&self, cell: usize) -> &[CellEdge] {
        &self.cell_edges[cell]
    }

    /// Stored vertex pair of an edge (orientation defines the tangent).
    pub fn edge(&self, edge: usize) -> [usize; 2] {
        self.edges[edge]
    }

    /// Incident cells as (lower id, higher id); boundary edges have one.
    pub fn edge_cells(&self, edge: usize) -> (usize, Option<usize>) {
        self.edge_cells[edge]
    }

    pub fn is_boundary_edge(&self, edge: usize) -> bool {
        self.edge_cells[edge].1.is_none()
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_edges()).filter(|&e| self.is_boundary_edge(e))
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_cells() as i64
    }

    pub fn cell_geometry(&self, cell: usize) -> CellGeometry {
        let pts = self.cell_points(cell);
        CellGeometry {
            area: signed_area(&pts),
            centroid: polygon_centroid(&pts),
            diameter: polygon_diameter(&pts),
        }
    }

    pub fn edge_geometry(&self, edge: usize) -> EdgeGeometry {
        let [a, b] = self.edges[edge];
        EdgeGeometry::from_points(self.vertices[a], self.vertices[b])
    }

    /// Mesh size h = max_T h_T.
    pub fn max_diameter(&self) -> f64 {
        (0..self.num_cells())
            .map(|c| self.cell_geometry(c).diameter)
            .fold(0.0, f64::max)
    }

    /// Parses the plain-text format: a header "V E F", V lines "x y", then
    /// F lines "m i_1 ... i_m" with 0-based counter-clockwise vertex ids.
    /// E must equal the number of derived edges.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_err = |line: usize, message: String| WgError::MeshParse { line, message };

        let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty mesh file".into()))?;
        let counts = parse_usizes(header).map_err(|m| parse_err(hl, m))?;
        let [nv, ne, nf] = counts[..] else {
            return Err(parse_err(hl, "header must be \"V E F\"".into()));
        };

        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(hl, format!("expected {nv} vertex lines")))?;
            let xy: Vec<f64> = l
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| parse_err(ln, format!("bad coordinate: {e}")))?;
            let [x, y] = xy[..] else {
                return Err(parse_err(ln, "vertex line must be \"x y\"".into()));
            };
            vertices.push(Point::new(x, y));
        }

        let mut cells = Vec::with_capacity(nf);
        for _ in 0..nf {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| parse_err(hl, format!("expected {nf} cell lines")))?;
            let ids = parse_usizes(l).map_err(|m| parse_err(ln, m))?;
            let Some((&m, rest)) = ids.split_first() else {
                return Err(parse_err(ln, "empty cell line".into()));
            };
            if rest.len() != m {
                return Err(parse_err(
                    ln,
                    format!("cell declares {m} vertices but lists {}", rest.len()),
                ));
            }
            cells.push(rest.to_vec());
        }
        if let Some((ln, _)) = lines.next() {
            return Err(parse_err(ln, "trailing content after the last cell".into()));
        }

        let mesh = Mesh::new(vertices, cells)?;
        if mesh.num_edges() != ne {
            return Err(parse_err(
                hl,
                format!("header declares {ne} edges but the cells define {}", mesh.num_edges()),
            ));
        }
        Ok(mesh)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Mesh::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.num_vertices(), self.num_edges(), self.num_cells());
        for p in &self.vertices {
            let _ = writeln!(out, "{:.17e} {:.17e}", p.x, p.y);
        }
        for cycle in &self.cells {
            let _ = write!(out, "{}", cycle.len());
            for v in cycle {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn grid_vertices(n: usize) -> Vec<Point> {
    let h = 1.0 / n as f64;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push(Point::new(i as f64 * h, j as f64 * h));
        }
    }
    v
}

fn parse_usizes(line: &str) -> std::result::Result<Vec<usize>, String> {
    line.split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|e| format!("bad integer '{t}': {e}")))
        .collect()
}
