//! The discrete space V_h on a mesh: degree, DOF layout, quadrature, and
//! per-cell geometric data shared by every local kernel.

use crate::assembly::DofLayout;
use crate::basis::{cell_dim, CellBasis, EdgeBasis};
use crate::error::{Result, WgError};
use crate::mesh::{CellGeometry, EdgeGeometry, Mesh};
use crate::quadrature::{edge_quadrature, polygon_quadrature, QuadratureRule};
use crate::Point;

/// Quadrature exactness overrides. Defaults are 2k + 2 on cells and 2k + 3
/// on edges, enough for every polynomial integrand of the scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QuadratureConfig {
    pub cell_exactness: Option<usize>,
    pub edge_exactness: Option<usize>,
}

impl QuadratureConfig {
    pub fn cell(&self, k: usize) -> usize {
        self.cell_exactness.unwrap_or(2 * k + 2)
    }

    pub fn edge(&self, k: usize) -> usize {
        self.edge_exactness.unwrap_or(2 * k + 3)
    }
}

#[derive(Clone, Debug)]
pub struct WgSpace<'m> {
    mesh: &'m Mesh,
    k: usize,
    layout: DofLayout,
    quadrature: QuadratureConfig,
    edge_rule: QuadratureRule<f64>,
}

impl<'m> WgSpace<'m> {
    pub fn new(mesh: &'m Mesh, k: usize) -> Result<Self> {
        Self::with_quadrature(mesh, k, QuadratureConfig::default())
    }

    pub fn with_quadrature(mesh: &'m Mesh, k: usize, quadrature: QuadratureConfig) -> Result<Self> {
        let layout = DofLayout::new(mesh, k)?;
        let needed_cell = 2 * k;
        let needed_edge = 2 * k;
        if quadrature.cell(k) < needed_cell || quadrature.edge(k) < needed_edge {
            return Err(WgError::InvalidStudy(format!(
                "quadrature exactness must be at least {needed_cell} on cells and {needed_edge} on edges for k = {k}"
            )));
        }
        Ok(WgSpace {
            mesh,
            k,
            layout,
            quadrature,
            edge_rule: edge_quadrature(quadrature.edge(k)),
        })
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quadrature
    }

    /// Gauss rule on the reference edge parameter t ∈ [-1, 1].
    pub fn edge_rule(&self) -> &QuadratureRule<f64> {
        &self.edge_rule
    }

    /// Basis of P_{k-1}(e).
    pub fn edge_basis(&self, edge: usize) -> EdgeBasis {
        EdgeBasis::new(self.k - 1, &self.mesh.edge_geometry(edge))
    }

    pub fn cell(&self, cell: usize) -> Result<LocalCell> {
        let vertices = self.mesh.cell_points(cell);
        let geometry = self.mesh.cell_geometry(cell);
        let rule = polygon_quadrature(&vertices, self.quadrature.cell(self.k))?;
        let edges = self
            .mesh
            .cell_edges(cell)
            .iter()
            .map(|ce| LocalEdge {
                edge: ce.edge,
                sign: ce.sign,
                geometry: self.mesh.edge_geometry(ce.edge),
            })
            .collect();
        Ok(LocalCell {
            id: cell,
            k: self.k,
            basis: CellBasis::new(self.k, geometry.centroid, geometry.diameter),
            vertices,
            geometry,
            rule,
            edges,
        })
    }

    /// Physical points and weights of the edge rule on one edge.
    pub fn edge_points(&self, edge: &EdgeGeometry) -> impl Iterator<Item = (f64, Point, f64)> + '_ {
        let g = *edge;
        self.edge_rule
            .iter()
            .map(move |(t, w)| (t, g.point_at(t), 0.5 * w * g.length))
    }
}

#[derive(Clone, Debug)]
pub struct LocalEdge {
    pub edge: usize,
    /// σ(T, e): +1 when n_e is the outward normal of this cell.
    pub sign: f64,
    pub geometry: EdgeGeometry,
}

/// Everything a local kernel needs about one cell.
///
/// Local DOF order: the cell polynomial (dim P_k), then the traces of each
/// local edge (k coefficients each), then the fluxes of each local edge.
#[derive(Clone, Debug)]
pub struct LocalCell {
    pub id: usize,
    pub k: usize,
    pub vertices: Vec<Point>,
    pub geometry: CellGeometry,
    pub basis: CellBasis,
    pub rule: QuadratureRule<Point>,
    pub edges: Vec<LocalEdge>,
}

impl LocalCell {
    pub fn interior_dim(&self) -> usize {
        cell_dim(self.k)
    }

    pub fn num_dofs(&self) -> usize {
        self.interior_dim() + 2 * self.k * self.edges.len()
    }

    pub fn trace_offset(&self, local_edge: usize) -> usize {
        self.interior_dim() + local_edge * self.k
    }

    pub fn flux_offset(&self, local_edge: usize) -> usize {
        self.interior_dim() + (self.edges.len() + local_edge) * self.k
    }

    /// Global DOF index of every local DOF.
    pub fn global_dofs(&self, layout: &DofLayout) -> Vec<usize> {
        let mut dofs = Vec::with_capacity(self.num_dofs());
        let base = layout.interior_offset(self.id);
        dofs.extend(base..base + self.interior_dim());
        for e in &self.edges {
            let t = layout.trace_offset(e.edge);
            dofs.extend(t..t + self.k);
        }
        for e in &self.edges {
            let f = layout.flux_offset(e.edge);
            dofs.extend(f..f + self.k);
        }
        dofs
    }
}
