//! Error measures between a discrete weak function and an exact solution.
//!
//! The discrete H² norm is evaluated pointwise by quadrature from the
//! field's polynomials, independently of the assembled matrices:
//!
//! |||v|||² = Σ_T ‖Δ_w v‖²_T + h_T⁻¹ ‖∇v_0·n_e - v_n‖²_∂T + h_T⁻³ ‖Q_b v_0 - v_b‖²_∂T

use crate::basis::{cell_dim, legendre_values};
use crate::error::Result;
use crate::projection::{project_edge, project_field, ScalarField, WgField};
use crate::space::WgSpace;
use crate::weak_laplacian::local_weak_laplacian;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ErrorReport {
    /// |||Q_h u - u_h|||
    pub triple_bar: f64,
    /// ‖Q_0 u - u_0‖
    pub l2_interior: f64,
    /// (Σ_e h_e ‖Q_b u - u_b‖²_e)^½
    pub l2_edge_trace: f64,
    /// (Σ_e h_e ‖Q_b(∇u·n_e) - u_n‖²_e)^½
    pub l2_edge_flux: f64,
    /// max over edge quadrature points of |Q_b u - u_b|
    pub linf_edge_trace: f64,
    /// max over edge quadrature points of |Q_b(∇u·n_e) - u_n|
    pub linf_edge_flux: f64,
}

impl ErrorReport {
    /// The six measures in table order.
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.triple_bar,
            self.l2_interior,
            self.l2_edge_trace,
            self.l2_edge_flux,
            self.linf_edge_trace,
            self.linf_edge_flux,
        ]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        ErrorReport {
            triple_bar: a[0],
            l2_interior: a[1],
            l2_edge_trace: a[2],
            l2_edge_flux: a[3],
            linf_edge_trace: a[4],
            linf_edge_flux: a[5],
        }
    }
}

pub fn triple_bar_norm(space: &WgSpace, v: &WgField) -> Result<f64> {
    let mesh = space.mesh();
    let k = space.k();
    let nr = cell_dim(k - 2);
    let mut total = 0.0;
    for c in 0..mesh.num_cells() {
        let cell = space.cell(c)?;
        let local = v.gather(&cell);
        let wl = local_weak_laplacian(space, &cell)?;
        let lap = wl.apply(&local);
        total += cell
            .rule
            .integrate(|p| cell.basis.combine(&lap.as_slice()[..nr], p).powi(2));

        let v0 = v.interior(c);
        let h = cell.geometry.diameter;
        for edge in &cell.edges {
            let g = &edge.geometry;
            let vb = v.trace(edge.edge);
            let vn = v.flux(edge.edge);
            let qb = project_edge(|p| cell.basis.combine(v0, p), g, k - 1, space.edge_rule());
            let mut flux_jump = 0.0;
            let mut trace_jump = 0.0;
            for (t, p, w) in space.edge_points(g) {
                let ev = cell.basis.evaluate(p);
                let dn: f64 = v0
                    .iter()
                    .zip(&ev.gradients)
                    .map(|(c, grad)| c * grad.dot(&g.normal))
                    .sum();
                let leg = legendre_values(k - 1, t);
                let at = |coeffs: &[f64]| -> f64 { coeffs.iter().zip(&leg).map(|(c, l)| c * l).sum() };
                flux_jump += w * (dn - at(vn)).powi(2);
                trace_jump += w * (at(&qb) - at(vb)).powi(2);
            }
            total += flux_jump / h + trace_jump / (h * h * h);
        }
    }
    Ok(total.sqrt())
}

/// Compares u_h with Q_h u in the six measures.
pub fn compute_errors(space: &WgSpace, uh: &WgField, u: &dyn ScalarField) -> Result<ErrorReport> {
    let mesh = space.mesh();
    let k = space.k();
    let qh = project_field(u, space)?;
    let err = qh.sub(uh);

    let mut l2_interior = 0.0;
    for c in 0..mesh.num_cells() {
        let cell = space.cell(c)?;
        let e0 = err.interior(c);
        l2_interior += cell.rule.integrate(|p| cell.basis.combine(e0, p).powi(2));
    }

    let (mut l2_trace, mut l2_flux, mut inf_trace, mut inf_flux) = (0.0, 0.0, 0.0f64, 0.0f64);
    for e in 0..mesh.num_edges() {
        let g = mesh.edge_geometry(e);
        let (eb, en) = (err.trace(e), err.flux(e));
        let (mut sb, mut sn) = (0.0, 0.0);
        for (t, _, w) in space.edge_points(&g) {
            let leg = legendre_values(k - 1, t);
            let b: f64 = eb.iter().zip(&leg).map(|(c, l)| c * l).sum();
            let n: f64 = en.iter().zip(&leg).map(|(c, l)| c * l).sum();
            sb += w * b * b;
            sn += w * n * n;
            inf_trace = inf_trace.max(b.abs());
            inf_flux = inf_flux.max(n.abs());
        }
        l2_trace += g.length * sb;
        l2_flux += g.length * sn;
    }

    Ok(ErrorReport {
        triple_bar: triple_bar_norm(space, &err)?,
        l2_interior: l2_interior.sqrt(),
        l2_edge_trace: l2_trace.sqrt(),
        l2_edge_flux: l2_flux.sqrt(),
        linf_edge_trace: inf_trace,
        linf_edge_flux: inf_flux,
    })
}
