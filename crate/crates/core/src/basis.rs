//! Scaled monomial bases on cells and Legendre bases on edges.

use crate::mesh::EdgeGeometry;
use crate::{Point, Vector};

/// Dimension of P_k in two variables.
pub fn cell_dim(k: usize) -> usize {
    (k + 1) * (k + 2) / 2
}

/// Scaled monomials ((x - x_T)/h_T)^a ((y - y_T)/h_T)^b with a + b ≤ k,
/// ordered by total degree so that the first `cell_dim(r)` members span
/// P_r for every r ≤ k.
#[derive(Clone, Debug)]
pub struct CellBasis {
    degree: usize,
    center: Point,
    scale: f64,
    exponents: Vec<(u32, u32)>,
}

/// Values, gradients and Laplacians of every basis member at one point.
#[derive(Clone, Debug, Default)]
pub struct BasisEval {
    pub values: Vec<f64>,
    pub gradients: Vec<Vector>,
    pub laplacians: Vec<f64>,
}

impl CellBasis {
    pub fn new(degree: usize, center: Point, scale: f64) -> Self {
        let mut exponents = Vec::with_capacity(cell_dim(degree));
        for d in 0..=degree as u32 {
            for b in 0..=d {
                exponents.push((d - b, b));
            }
        }
        CellBasis {
            degree,
            center,
            scale,
            exponents,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.exponents
    }

    pub fn values(&self, p: Point) -> Vec<f64> {
        let (xs, ys) = self.powers(p);
        self.exponents
            .iter()
            .map(|&(a, b)| xs[a as usize] * ys[b as usize])
            .collect()
    }

    pub fn evaluate(&self, p: Point) -> BasisEval {
        let (xs, ys) = self.powers(p);
        let h = self.scale;
        let n = self.dim();
        let mut out = BasisEval {
            values: Vec::with_capacity(n),
            gradients: Vec::with_capacity(n),
            laplacians: Vec::with_capacity(n),
        };
        for &(a, b) in &self.exponents {
            let (a, b) = (a as usize, b as usize);
            out.values.push(xs[a] * ys[b]);
            let dx = if a > 0 { a as f64 * xs[a - 1] * ys[b] } else { 0.0 };
            let dy = if b > 0 { b as f64 * xs[a] * ys[b - 1] } else { 0.0 };
            out.gradients.push(Vector::new(dx, dy) / h);
            let dxx = if a > 1 { (a * (a - 1)) as f64 * xs[a - 2] * ys[b] } else { 0.0 };
            let dyy = if b > 1 { (b * (b - 1)) as f64 * xs[a] * ys[b - 2] } else { 0.0 };
            out.laplacians.push((dxx + dyy) / (h * h));
        }
        out
    }

    /// Evaluates Σ c_i φ_i at p, using the leading `coeffs.len()` members.
    pub fn combine(&self, coeffs: &[f64], p: Point) -> f64 {
        let v = self.values(p);
        coeffs.iter().zip(&v).map(|(c, v)| c * v).sum()
    }

    fn powers(&self, p: Point) -> (Vec<f64>, Vec<f64>) {
        let xi = (p.x - self.center.x) / self.scale;
        let eta = (p.y - self.center.y) / self.scale;
        let mut xs = vec![1.0; self.degree + 1];
        let mut ys = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            xs[i] = xs[i - 1] * xi;
            ys[i] = ys[i - 1] * eta;
        }
        (xs, ys)
    }
}

/// Legendre polynomials L_0..L_degree in the edge parameter t ∈ [-1, 1],
/// running from the stored start vertex (t = -1) to the end vertex. The
/// edge mass matrix is diag(h_e / (2j + 1)).
#[derive(Clone, Copy, Debug)]
pub struct EdgeBasis {
    degree: usize,
    length: f64,
}

impl EdgeBasis {
    pub fn new(degree: usize, edge: &EdgeGeometry) -> Self {
        EdgeBasis {
            degree,
            length: edge.length,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.degree + 1
    }

    pub fn values(&self, t: f64) -> Vec<f64> {
        legendre_values(self.degree, t)
    }

    /// ∫_e L_j² ds.
    pub fn mass(&self, j: usize) -> f64 {
        self.length / (2 * j + 1) as f64
    }

    pub fn combine(&self, coeffs: &[f64], t: f64) -> f64 {
        legendre_values(coeffs.len().saturating_sub(1), t)
            .iter()
            .zip(coeffs)
            .map(|(l, c)| l * c)
            .sum()
    }
}

pub fn legendre_values(degree: usize, t: f64) -> Vec<f64> {
    let mut v = Vec::with_capacity(degree + 1);
    v.push(1.0);
    if degree >= 1 {
        v.push(t);
    }
    for j in 2..=degree {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * t * v[j - 1] - (jf - 1.0) * v[j - 2]) / jf;
        v.push(next);
    }
    v
}
