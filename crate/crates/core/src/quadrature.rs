//! Gauss–Legendre rules on [-1, 1], Duffy-collapsed tensor rules on
//! triangles, and fan-triangulated rules on star-shaped polygons.

use std::f64::consts::PI;

use crate::error::{Result, WgError};
use crate::mesh::{polygon_centroid, signed_area};
use crate::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    /// Highest total polynomial degree integrated exactly.
    pub exactness: usize,
}

impl<P: Copy> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (P, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, mut f: impl FnMut(P) -> f64) -> f64 {
        self.iter().map(|(p, w)| w * f(p)).sum()
    }
}

/// n-point Gauss–Legendre rule on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> QuadratureRule<f64> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one point");
    let mut points = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess, refined by Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i] = -x;
        points[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
    QuadratureRule {
        points,
        weights,
        exactness: 2 * n - 1,
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let j = j as f64;
        let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Gauss–Legendre rule on [-1, 1] exact for polynomials of the given degree.
pub fn edge_quadrature(exactness: usize) -> QuadratureRule<f64> {
    let mut rule = gauss_legendre(exactness / 2 + 1);
    rule.exactness = exactness;
    rule
}

/// Rule on the reference triangle {x, y ≥ 0, x + y ≤ 1} via the collapsed
/// map (u, v) ↦ (u, (1 - u) v) of the unit square.
pub fn reference_triangle_quadrature(exactness: usize) -> QuadratureRule<Point> {
    // The Jacobian (1 - u) raises the degree in u by one.
    let gu = gauss_legendre(exactness.div_ceil(2) + 1);
    let gv = gauss_legendre(exactness / 2 + 1);
    let mut points = Vec::with_capacity(gu.len() * gv.len());
    let mut weights = Vec::with_capacity(gu.len() * gv.len());
    for (tu, wu) in gu.iter() {
        let u = 0.5 * (tu + 1.0);
        for (tv, wv) in gv.iter() {
            let v = 0.5 * (tv + 1.0);
            points.push(Point::new(u, (1.0 - u) * v));
            weights.push(0.25 * wu * wv * (1.0 - u));
        }
    }
    QuadratureRule {
        points,
        weights,
        exactness,
    }
}

/// Maps the reference rule affinely onto the triangle (a, b, c).
pub fn triangle_quadrature(
    tri: [Point; 3],
    exactness: usize,
) -> Result<QuadratureRule<Point>> {
    let area = signed_area(&tri);
    if !(area > 0.0) {
        return Err(WgError::DegeneratePolygon(area));
    }
    Ok(map_reference(&reference_triangle_quadrature(exactness), tri, area))
}

fn map_reference(rule: &QuadratureRule<Point>, [a, b, c]: [Point; 3], area: f64) -> QuadratureRule<Point> {
    let (e1, e2) = (b - a, c - a);
    QuadratureRule {
        points: rule.points.iter().map(|p| a + e1 * p.x + e2 * p.y).collect(),
        weights: rule.weights.iter().map(|w| w * 2.0 * area).collect(),
        exactness: rule.exactness,
    }
}

/// Fan-triangulates the polygon from its centroid and concatenates a
/// triangle rule of the requested exactness on each sub-triangle.
pub fn polygon_quadrature(polygon: &[Point], exactness: usize) -> Result<QuadratureRule<Point>> {
    let area = signed_area(polygon);
    if polygon.len() < 3 || !(area > 0.0) {
        return Err(WgError::DegeneratePolygon(area));
    }
    let reference = reference_triangle_quadrature(exactness);
    let centroid = polygon_centroid(polygon);
    let m = polygon.len();
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(m * reference.len()),
        weights: Vec::with_capacity(m * reference.len()),
        exactness,
    };
    for i in 0..m {
        let tri = [centroid, polygon[i], polygon[(i + 1) % m]];
        let sub_area = signed_area(&tri);
        if !(sub_area > 0.0) {
            return Err(WgError::DegeneratePolygon(sub_area));
        }
        let sub = map_reference(&reference, tri, sub_area);
        rule.points.extend(sub.points);
        rule.weights.extend(sub.weights);
    }
    Ok(rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// ∫∫ x^a y^b over the reference triangle = a! b! / (a + b + 2)!.
    fn triangle_moment(a: u32, b: u32) -> f64 {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r = edge_quadrature(0);
        assert_eq!(r.points, vec![0.0]);
        assert_eq!(r.weights, vec![2.0]);

        let r = edge_quadrature(3);
        assert_eq!(r.len(), 2);
        // t³ on an edge mapped to [0, 1]: ∫ s³ ds = 1/4.
        let v = r.integrate(|t| {
            let s = 0.5 * (t + 1.0);
            0.5 * s.powi(3)
        });
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-15);

        let r = edge_quadrature(5);
        assert_eq!(r.len(), 3);
        assert_abs_diff_eq!(r.integrate(|t| t.powi(4)), 0.4, epsilon = 1e-14);
    }

    #[test]
    fn gauss_legendre_exactness_and_weights() {
        for n in 1..=20 {
            let r = gauss_legendre(n);
            assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            for p in 0..=(2 * n - 1) {
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert_abs_diff_eq!(r.integrate(|t| t.powi(p as i32)), exact, epsilon = 1e-13);
            }
            assert!(r.points.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn triangle_rule_integrates_monomials() {
        for exactness in 0..=12 {
            let r = reference_triangle_quadrature(exactness);
            assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 0.5, epsilon = 1e-14);
            for a in 0..=exactness as u32 {
                for b in 0..=(exactness as u32 - a) {
                    let v = r.integrate(|p| p.x.powi(a as i32) * p.y.powi(b as i32));
                    assert_relative_eq!(v, triangle_moment(a, b), max_relative = 1e-13);
                }
            }
        }
    }

    #[test]
    fn polygon_rule_on_unit_right_triangle() {
        let tri = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let r = polygon_quadrature(&tri, 3).unwrap();
        assert_abs_diff_eq!(r.integrate(|p| p.x * p.x * p.y), 1.0 / 60.0, epsilon = 1e-14);
        let r = polygon_quadrature(&tri, 0).unwrap();
        assert_abs_diff_eq!(r.integrate(|_| 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn polygon_rule_on_unit_square() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ];
        for exactness in 0..8 {
            let r = polygon_quadrature(&sq, exactness).unwrap();
            assert_abs_diff_eq!(r.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
        }
        // ∫∫ x³ y² over the square = 1/12.
        let r = polygon_quadrature(&sq, 5).unwrap();
        assert_relative_eq!(r.integrate(|p| p.x.powi(3) * p.y.powi(2)), 1.0 / 12.0, max_relative = 1e-13);
    }

    #[test]
    fn raising_exactness_keeps_exact_integrals() {
        let pent = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.1),
            Point::new(1.3, 0.9),
            Point::new(0.5, 1.4),
            Point::new(-0.2, 0.7),
        ];
        let f = |p: Point| 1.0 + p.x - 2.0 * p.y * p.x + p.x.powi(3) * p.y - p.y.powi(4);
        let base = polygon_quadrature(&pent, 4).unwrap().integrate(f);
        for e in 5..12 {
            let v = polygon_quadrature(&pent, e).unwrap().integrate(f);
            assert_relative_eq!(v, base, max_relative = 1e-13);
        }
    }

    #[test]
    fn degenerate_polygon_rejected() {
        let flat = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)];
        assert!(matches!(polygon_quadrature(&flat, 2), Err(WgError::DegeneratePolygon(_))));
        assert!(triangle_quadrature(flat, 2).is_err());
    }
}
