//! Local L² projections Q_0, Q_b, ℚ_h and the composite projection Q_h
//! into the weak Galerkin space.

use nalgebra::{DMatrix, DVector};

use crate::assembly::DofLayout;
use crate::basis::{legendre_values, CellBasis};
use crate::error::{Result, WgError};
use crate::mesh::EdgeGeometry;
use crate::quadrature::QuadratureRule;
use crate::space::{LocalCell, WgSpace};
use crate::{Point, Vector};

/// An evaluable scalar function with optional derivatives.
pub trait ScalarField: Sync {
    fn value(&self, p: Point) -> f64;

    fn gradient(&self, _p: Point) -> Option<Vector> {
        None
    }

    fn laplacian(&self, _p: Point) -> Option<f64> {
        None
    }
}

type ValueFn = Box<dyn Fn(Point) -> f64 + Send + Sync>;
type GradientFn = Box<dyn Fn(Point) -> Vector + Send + Sync>;

/// A [`ScalarField`] assembled from closures.
pub struct FieldFn {
    value: ValueFn,
    gradient: Option<GradientFn>,
    laplacian: Option<ValueFn>,
}

impl FieldFn {
    pub fn new(value: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        FieldFn {
            value: Box::new(value),
            gradient: None,
            laplacian: None,
        }
    }

    pub fn zero() -> Self {
        FieldFn::new(|_| 0.0)
            .with_gradient(|_| Vector::zeros())
            .with_laplacian(|_| 0.0)
    }

    pub fn with_gradient(mut self, g: impl Fn(Point) -> Vector + Send + Sync + 'static) -> Self {
        self.gradient = Some(Box::new(g));
        self
    }

    pub fn with_laplacian(mut self, l: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        self.laplacian = Some(Box::new(l));
        self
    }
}

impl ScalarField for FieldFn {
    fn value(&self, p: Point) -> f64 {
        (self.value)(p)
    }

    fn gradient(&self, p: Point) -> Option<Vector> {
        self.gradient.as_ref().map(|g| g(p))
    }

    fn laplacian(&self, p: Point) -> Option<f64> {
        self.laplacian.as_ref().map(|l| l(p))
    }
}

/// Boundary normal-derivative data φ, evaluated with the outward normal.
pub trait NormalFlux: Sync {
    fn flux(&self, p: Point, outward: Vector) -> f64;
}

impl<F: Fn(Point, Vector) -> f64 + Sync> NormalFlux for F {
    fn flux(&self, p: Point, outward: Vector) -> f64 {
        self(p, outward)
    }
}

/// φ = ∇u · n taken from a field's gradient.
pub struct GradientFlux<'a>(pub &'a dyn ScalarField);

impl NormalFlux for GradientFlux<'_> {
    fn flux(&self, p: Point, outward: Vector) -> f64 {
        self.0
            .gradient(p)
            .expect("GradientFlux requires a field with a gradient")
            .dot(&outward)
    }
}

/// Coefficients of a discrete weak function {v_0, v_b, v_n n_e}.
///
/// v_0 is expanded in the scaled monomials of each cell, v_b and v_n in
/// the Legendre basis of each edge; v_n is measured against the global
/// edge normal n_e.
#[derive(Clone, Debug, PartialEq)]
pub struct WgField {
    layout: DofLayout,
    coeffs: Vec<f64>,
}

impl WgField {
    pub fn zeros(layout: &DofLayout) -> Self {
        WgField {
            layout: layout.clone(),
            coeffs: vec![0.0; layout.num_dofs()],
        }
    }

    pub fn from_vec(layout: &DofLayout, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), layout.num_dofs(), "coefficient vector does not match the layout");
        WgField {
            layout: layout.clone(),
            coeffs,
        }
    }

    pub fn layout(&self) -> &DofLayout {
        &self.layout
    }

    pub fn degree(&self) -> usize {
        self.layout.k()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn interior(&self, cell: usize) -> &[f64] {
        let o = self.layout.interior_offset(cell);
        &self.coeffs[o..o + self.layout.cell_dim()]
    }

    pub fn interior_mut(&mut self, cell: usize) -> &mut [f64] {
        let o = self.layout.interior_offset(cell);
        let d = self.layout.cell_dim();
        &mut self.coeffs[o..o + d]
    }

    pub fn trace(&self, edge: usize) -> &[f64] {
        let o = self.layout.trace_offset(edge);
        &self.coeffs[o..o + self.layout.k()]
    }

    pub fn trace_mut(&mut self, edge: usize) -> &mut [f64] {
        let o = self.layout.trace_offset(edge);
        let k = self.layout.k();
        &mut self.coeffs[o..o + k]
    }

    pub fn flux(&self, edge: usize) -> &[f64] {
        let o = self.layout.flux_offset(edge);
        &self.coeffs[o..o + self.layout.k()]
    }

    pub fn flux_mut(&mut self, edge: usize) -> &mut [f64] {
        let o = self.layout.flux_offset(edge);
        let k = self.layout.k();
        &mut self.coeffs[o..o + k]
    }

    /// Local DOF vector of one cell in the [`LocalCell`] ordering.
    pub fn gather(&self, cell: &LocalCell) -> DVector<f64> {
        let dofs = cell.global_dofs(&self.layout);
        DVector::from_iterator(dofs.len(), dofs.iter().map(|&i| self.coeffs[i]))
    }

    pub fn sub(&self, other: &WgField) -> WgField {
        assert_eq!(self.layout, other.layout);
        WgField {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, alpha: f64) -> WgField {
        WgField {
            layout: self.layout.clone(),
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
        }
    }
}

/// Mass matrix of the leading `dim` members of the cell basis.
pub(crate) fn cell_mass(basis: &CellBasis, rule: &QuadratureRule<Point>, dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for (p, w) in rule.iter() {
        let v = basis.values(p);
        for i in 0..dim {
            for j in 0..=i {
                m[(i, j)] += w * v[i] * v[j];
            }
        }
    }
    m.fill_upper_triangle_with_lower_triangle();
    m
}

pub(crate) fn spd_solve(m: DMatrix<f64>, b: DMatrix<f64>, cell: usize) -> Result<DMatrix<f64>> {
    let chol = m.cholesky().ok_or(WgError::SingularMass(cell))?;
    Ok(chol.solve(&b))
}

/// L² projection of `f` onto P_r(T) in the cell's scaled monomial basis.
pub fn project_cell(f: &dyn ScalarField, cell: &LocalCell, r: usize) -> Result<Vec<f64>> {
    project_cell_with(|p| f.value(p), cell, r)
}

pub fn project_cell_with(f: impl Fn(Point) -> f64, cell: &LocalCell, r: usize) -> Result<Vec<f64>> {
    let basis = CellBasis::new(r, cell.basis.center(), cell.basis.scale());
    let dim = basis.dim();
    let mass = cell_mass(&basis, &cell.rule, dim);
    let mut rhs = DMatrix::zeros(dim, 1);
    for (p, w) in cell.rule.iter() {
        let fw = w * f(p);
        for (i, v) in basis.values(p).into_iter().enumerate() {
            rhs[(i, 0)] += fw * v;
        }
    }
    Ok(spd_solve(mass, rhs, cell.id)?.column(0).iter().copied().collect())
}

/// ℚ_h Δu: projection of the Laplacian onto P_{k-2}(T).
pub fn project_laplacian(u: &dyn ScalarField, cell: &LocalCell) -> Result<Vec<f64>> {
    let probe = cell.rule.points[0];
    u.laplacian(probe).ok_or(WgError::MissingDerivative("laplacian"))?;
    project_cell_with(|p| u.laplacian(p).unwrap_or(f64::NAN), cell, cell.k - 2)
}

/// L² projection onto P_degree(e) in the Legendre basis of the edge.
pub fn project_edge(
    f: impl Fn(Point) -> f64,
    edge: &EdgeGeometry,
    degree: usize,
    rule: &QuadratureRule<f64>,
) -> Vec<f64> {
    let mut c = vec![0.0; degree + 1];
    for (t, w) in rule.iter() {
        let fw = w * f(edge.point_at(t));
        for (j, l) in legendre_values(degree, t).into_iter().enumerate() {
            c[j] += fw * l;
        }
    }
    // ∫_e f L_j ds / (h_e / (2j + 1)) with ds = h_e/2 dt.
    for (j, cj) in c.iter_mut().enumerate() {
        *cj *= (2 * j + 1) as f64 / 2.0;
    }
    c
}

/// Q_h u = {Q_0 u, Q_b u, Q_b(∇u · n_e)} with the global edge normals.
pub fn project_field(u: &dyn ScalarField, space: &WgSpace) -> Result<WgField> {
    let mesh = space.mesh();
    let k = space.k();
    if mesh.num_cells() > 0 {
        let probe = mesh.cell_geometry(0).centroid;
        u.gradient(probe).ok_or(WgError::MissingDerivative("gradient"))?;
    }
    let mut field = WgField::zeros(space.layout());
    for c in 0..mesh.num_cells() {
        let cell = space.cell(c)?;
        let coeffs = project_cell(u, &cell, k)?;
        field.interior_mut(c).copy_from_slice(&coeffs);
    }
    for e in 0..mesh.num_edges() {
        let g = mesh.edge_geometry(e);
        let trace = project_edge(|p| u.value(p), &g, k - 1, space.edge_rule());
        field.trace_mut(e).copy_from_slice(&trace);
        let flux = project_edge(
            |p| u.gradient(p).map_or(f64::NAN, |d| d.dot(&g.normal)),
            &g,
            k - 1,
            space.edge_rule(),
        );
        field.flux_mut(e).copy_from_slice(&flux);
    }
    Ok(field)
}
