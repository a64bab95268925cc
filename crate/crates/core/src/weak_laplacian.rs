//! Element kernels: the discrete weak Laplacian Δ_{w,k-2,T} as a matrix
//! from local DOFs to P_{k-2}(T) coefficients, its Gram matrix, and the
//! edge stabilizer.
//!
//! For a local weak function v and every test polynomial φ ∈ P_{k-2}(T),
//!
//! (Δ_w v, φ)_T = (v_0, Δφ)_T - Σ_e ⟨v_b, ∇φ·n⟩_e + Σ_e σ(T,e) ⟨v_n, φ⟩_e
//!
//! where n is the outward normal of T and σ(T,e) = n · n_e.

use nalgebra::{DMatrix, DVector};

use crate::basis::{cell_dim, legendre_values};
use crate::error::Result;
use crate::projection::{cell_mass, spd_solve};
use crate::space::{LocalCell, WgSpace};

/// Δ_w on one cell: `matrix` maps local DOFs to P_{k-2}(T) coefficients.
#[derive(Clone, Debug)]
pub struct WeakLaplacian {
    /// D_T, size dim P_{k-2} × local DOFs.
    pub matrix: DMatrix<f64>,
    /// Mass matrix of P_{k-2}(T).
    pub mass: DMatrix<f64>,
    /// Moment matrix B with M D = B.
    pub moments: DMatrix<f64>,
}

impl WeakLaplacian {
    pub fn apply(&self, local: &DVector<f64>) -> DVector<f64> {
        &self.matrix * local
    }
}

#[derive(Clone, Debug)]
pub struct LocalOperators {
    pub weak_laplacian: WeakLaplacian,
    /// A_T = D_Tᵀ M D_T.
    pub stiffness: DMatrix<f64>,
    /// S_T, both penalty terms of s(·,·) restricted to ∂T.
    pub stabilizer: DMatrix<f64>,
    /// Global index of each local DOF.
    pub dofs: Vec<usize>,
}

impl LocalOperators {
    pub fn new(space: &WgSpace, cell: &LocalCell) -> Result<Self> {
        let weak_laplacian = local_weak_laplacian(space, cell)?;
        let stiffness = local_stiffness(&weak_laplacian);
        let stabilizer = local_stabilizer(space, cell);
        Ok(LocalOperators {
            weak_laplacian,
            stiffness,
            stabilizer,
            dofs: cell.global_dofs(space.layout()),
        })
    }

    /// A_T + S_T.
    pub fn system_matrix(&self) -> DMatrix<f64> {
        &self.stiffness + &self.stabilizer
    }
}

pub fn local_weak_laplacian(space: &WgSpace, cell: &LocalCell) -> Result<WeakLaplacian> {
    let k = cell.k;
    let nr = cell_dim(k - 2);
    let nloc = cell.num_dofs();
    let ni = cell.interior_dim();
    let mut b = DMatrix::zeros(nr, nloc);

    for (p, w) in cell.rule.iter() {
        let ev = cell.basis.evaluate(p);
        for j in 0..nr {
            let lap = ev.laplacians[j];
            if lap == 0.0 {
                continue;
            }
            for i in 0..ni {
                b[(j, i)] += w * ev.values[i] * lap;
            }
        }
    }

    for (le, edge) in cell.edges.iter().enumerate() {
        let outward = edge.geometry.normal * edge.sign;
        let trace = cell.trace_offset(le);
        let flux = cell.flux_offset(le);
        for (t, p, w) in space.edge_points(&edge.geometry) {
            let ev = cell.basis.evaluate(p);
            let leg = legendre_values(k - 1, t);
            for j in 0..nr {
                let dn = ev.gradients[j].dot(&outward);
                for (l, &ll) in leg.iter().enumerate() {
                    b[(j, trace + l)] -= w * ll * dn;
                    b[(j, flux + l)] += w * edge.sign * ll * ev.values[j];
                }
            }
        }
    }

    let mass = cell_mass(&cell.basis, &cell.rule, nr);
    let matrix = spd_solve(mass.clone(), b.clone(), cell.id)?;
    Ok(WeakLaplacian {
        matrix,
        mass,
        moments: b,
    })
}

pub fn local_stiffness(wl: &WeakLaplacian) -> DMatrix<f64> {
    let mut a = wl.moments.transpose() * &wl.matrix;
    symmetrize(&mut a);
    a
}

pub fn local_stabilizer(space: &WgSpace, cell: &LocalCell) -> DMatrix<f64> {
    let k = cell.k;
    let nloc = cell.num_dofs();
    let ni = cell.interior_dim();
    let h = cell.geometry.diameter;
    let (w_flux, w_trace) = (1.0 / h, 1.0 / (h * h * h));
    let mut s = DMatrix::zeros(nloc, nloc);
    let mut row = DVector::zeros(nloc);

    for (le, edge) in cell.edges.iter().enumerate() {
        let n_e = edge.geometry.normal;
        let h_e = edge.geometry.length;
        let trace = cell.trace_offset(le);
        let flux = cell.flux_offset(le);
        // Q_b of each interior basis function, in Legendre coefficients.
        let mut qb = DMatrix::<f64>::zeros(k, ni);

        for (t, p, w) in space.edge_points(&edge.geometry) {
            let ev = cell.basis.evaluate(p);
            let leg = legendre_values(k - 1, t);
            row.fill(0.0);
            for i in 0..ni {
                row[i] = ev.gradients[i].dot(&n_e);
            }
            for (l, &ll) in leg.iter().enumerate() {
                row[flux + l] = -ll;
                for i in 0..ni {
                    qb[(l, i)] += w * ll * ev.values[i];
                }
            }
            s.ger(w_flux * w, &row, &row, 1.0);
        }

        for l in 0..k {
            let mass = h_e / (2 * l + 1) as f64;
            row.fill(0.0);
            for i in 0..ni {
                row[i] = qb[(l, i)] / mass;
            }
            row[trace + l] = -1.0;
            s.ger(w_trace * mass, &row, &row, 1.0);
        }
    }
    symmetrize(&mut s);
    s
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}
