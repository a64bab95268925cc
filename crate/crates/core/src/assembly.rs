//! Global DOF layout, assembly of (Δ_w u, Δ_w v)_h + s(u, v) = (f, v_0),
//! and elimination of the clamped boundary data.

use rayon::prelude::*;

use crate::basis::cell_dim;
use crate::error::{Result, WgError};
use crate::mesh::Mesh;
use crate::projection::{project_edge, NormalFlux, ScalarField, WgField};
use crate::sparse::CsrMatrix;
use crate::space::{LocalCell, WgSpace};
use crate::weak_laplacian::LocalOperators;

/// Global DOF numbering: all cell blocks in cell order, then all edge
/// trace blocks in edge order, then all edge flux blocks in edge order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofLayout {
    k: usize,
    num_cells: usize,
    num_edges: usize,
    boundary_edge: Vec<bool>,
}

impl DofLayout {
    pub fn new(mesh: &Mesh, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(WgError::InvalidDegree(k));
        }
        Ok(DofLayout {
            k,
            num_cells: mesh.num_cells(),
            num_edges: mesh.num_edges(),
            boundary_edge: (0..mesh.num_edges()).map(|e| mesh.is_boundary_edge(e)).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// dim P_k(T).
    pub fn cell_dim(&self) -> usize {
        cell_dim(self.k)
    }

    pub fn num_dofs(&self) -> usize {
        self.num_cells * self.cell_dim() + 2 * self.k * self.num_edges
    }

    pub fn num_interior_dofs(&self) -> usize {
        self.num_cells * self.cell_dim()
    }

    pub fn interior_offset(&self, cell: usize) -> usize {
        cell * self.cell_dim()
    }

    pub fn trace_offset(&self, edge: usize) -> usize {
        self.num_interior_dofs() + edge * self.k
    }

    pub fn flux_offset(&self, edge: usize) -> usize {
        self.num_interior_dofs() + (self.num_edges + edge) * self.k
    }

    pub fn is_boundary_dof(&self, dof: usize) -> bool {
        let ni = self.num_interior_dofs();
        if dof < ni {
            return false;
        }
        let edge = ((dof - ni) / self.k) % self.num_edges;
        self.boundary_edge[edge]
    }

    /// Trace and flux DOFs of boundary edges, ascending.
    pub fn boundary_dofs(&self) -> Vec<usize> {
        (self.num_interior_dofs()..self.num_dofs())
            .filter(|&d| self.is_boundary_dof(d))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AssemblyOptions {
    /// Compute element matrices on the rayon pool. The scatter itself is
    /// always sequential in cell order, so results are identical either way.
    pub parallel: bool,
}

/// The assembled system on all of V_h (boundary DOFs not yet eliminated).
#[derive(Clone, Debug)]
pub struct SparseSymmetricSystem {
    pub layout: DofLayout,
    pub matrix: CsrMatrix,
    pub load: Vec<f64>,
}

/// The system restricted to V_h^0 after lifting the boundary data.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    /// Free-free block of the global matrix.
    pub matrix: CsrMatrix,
    /// b_free - A_free,boundary · u_boundary.
    pub rhs: Vec<f64>,
    /// Full-length vector holding Q_b g and Q_b φ on boundary DOFs, zero elsewhere.
    pub lift: Vec<f64>,
    /// Global index of each free DOF.
    pub free_dofs: Vec<usize>,
    /// Free index of each global DOF (None on boundary DOFs).
    pub free_index: Vec<Option<usize>>,
}

impl ReducedSystem {
    /// Combines a free-DOF solution with the boundary lift.
    pub fn expand(&self, space: &WgSpace, free: &[f64]) -> WgField {
        assert_eq!(free.len(), self.free_dofs.len());
        let mut coeffs = self.lift.clone();
        for (&g, &x) in self.free_dofs.iter().zip(free) {
            coeffs[g] = x;
        }
        WgField::from_vec(space.layout(), coeffs)
    }
}

fn local_load(cell: &LocalCell, f: &dyn ScalarField) -> Vec<f64> {
    let mut load = vec![0.0; cell.interior_dim()];
    for (p, w) in cell.rule.iter() {
        let fw = w * f.value(p);
        for (i, v) in cell.basis.values(p).into_iter().enumerate() {
            load[i] += fw * v;
        }
    }
    load
}

fn element_contributions(
    space: &WgSpace,
    f: &dyn ScalarField,
    parallel: bool,
) -> Result<Vec<(LocalOperators, Vec<f64>)>> {
    let build = |c: usize| -> Result<(LocalOperators, Vec<f64>)> {
        let cell = space.cell(c)?;
        Ok((LocalOperators::new(space, &cell)?, local_load(&cell, f)))
    };
    let n = space.mesh().num_cells();
    if parallel {
        (0..n).into_par_iter().map(build).collect()
    } else {
        (0..n).map(build).collect()
    }
}

pub fn assemble_system(
    space: &WgSpace,
    f: &dyn ScalarField,
    options: &AssemblyOptions,
) -> Result<SparseSymmetricSystem> {
    let layout = space.layout().clone();
    let n = layout.num_dofs();
    let elements = element_contributions(space, f, options.parallel)?;

    let nnz_estimate: usize = elements.iter().map(|(o, _)| o.dofs.len() * o.dofs.len()).sum();
    let mut triplets = Vec::with_capacity(nnz_estimate);
    let mut load = vec![0.0; n];
    for (c, (op, local)) in elements.iter().enumerate() {
        let m = op.system_matrix();
        for (a, &ga) in op.dofs.iter().enumerate() {
            for (b, &gb) in op.dofs.iter().enumerate() {
                triplets.push((ga, gb, m[(a, b)]));
            }
        }
        let base = layout.interior_offset(c);
        for (i, v) in local.iter().enumerate() {
            load[base + i] += v;
        }
    }
    Ok(SparseSymmetricSystem {
        matrix: CsrMatrix::from_triplets(n, n, triplets),
        layout,
        load,
    })
}

/// Sets u_b = Q_b g and u_n = Q_b φ on boundary edges and restricts the
/// system to the remaining DOFs. On boundary edges n_e is the outward
/// normal, so φ is projected without sign changes.
pub fn apply_boundary_conditions(
    space: &WgSpace,
    system: &SparseSymmetricSystem,
    g: &dyn ScalarField,
    phi: &dyn NormalFlux,
) -> Result<ReducedSystem> {
    let mesh = space.mesh();
    let layout = &system.layout;
    let k = layout.k();
    let n = layout.num_dofs();
    let mut lift = vec![0.0; n];

    for e in mesh.boundary_edges() {
        let geo = mesh.edge_geometry(e);
        let trace = project_edge(|p| g.value(p), &geo, k - 1, space.edge_rule());
        let flux = project_edge(|p| phi.flux(p, geo.normal), &geo, k - 1, space.edge_rule());
        if trace.iter().chain(&flux).any(|v| !v.is_finite()) {
            return Err(WgError::BoundaryData(e));
        }
        let t = layout.trace_offset(e);
        lift[t..t + k].copy_from_slice(&trace);
        let fo = layout.flux_offset(e);
        lift[fo..fo + k].copy_from_slice(&flux);
    }

    let mut free_index = vec![None; n];
    let mut free_dofs = Vec::with_capacity(n);
    for (d, slot) in free_index.iter_mut().enumerate() {
        if !layout.is_boundary_dof(d) {
            *slot = Some(free_dofs.len());
            free_dofs.push(d);
        }
    }

    let lifted = system.matrix.mul_vec(&lift);
    let rhs = free_dofs.iter().map(|&d| system.load[d] - lifted[d]).collect();
    let matrix = system.matrix.submatrix(&free_index, free_dofs.len());
    Ok(ReducedSystem {
        matrix,
        rhs,
        lift,
        free_dofs,
        free_index,
    })
}
