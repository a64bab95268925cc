//! Manufactured clamped-plate problems on the unit square.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Result, WgError};
use crate::projection::{FieldFn, NormalFlux, ScalarField};
use crate::{Point, Vector};

/// Data of Δ²u = f with u = g and ∂u/∂n = φ on the boundary, plus the
/// exact solution the data was derived from.
pub struct Problem {
    id: String,
    solution: FieldFn,
    source: FieldFn,
    trace: FieldFn,
    flux: Box<dyn NormalFlux + Send>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem").field("id", &self.id).finish_non_exhaustive()
    }
}

impl Problem {
    /// Looks up "example1", "example2" or "patch-<k>".
    pub fn from_id(id: &str) -> Result<Self> {
        match id {
            "example1" => Ok(Problem::example_1()),
            "example2" => Ok(Problem::example_2()),
            _ => {
                let k = id
                    .strip_prefix("patch-")
                    .and_then(|k| k.parse::<usize>().ok())
                    .ok_or_else(|| WgError::UnknownProblem(id.to_string()))?;
                Problem::polynomial_patch(k)
            }
        }
    }

    /// u = x²(1-x)² y²(1-y)², clamped homogeneously.
    pub fn example_1() -> Self {
        let p = |x: f64| x * x * (1.0 - x) * (1.0 - x);
        let dp = |x: f64| 2.0 * x - 6.0 * x * x + 4.0 * x * x * x;
        let d2p = |x: f64| 2.0 - 12.0 * x + 12.0 * x * x;
        let d4p = 24.0;
        let solution = FieldFn::new(move |q| p(q.x) * p(q.y))
            .with_gradient(move |q| Vector::new(dp(q.x) * p(q.y), p(q.x) * dp(q.y)))
            .with_laplacian(move |q| d2p(q.x) * p(q.y) + p(q.x) * d2p(q.y));
        let source = FieldFn::new(move |q| d4p * p(q.y) + 2.0 * d2p(q.x) * d2p(q.y) + p(q.x) * d4p);
        Problem {
            id: "example1".into(),
            solution,
            source,
            trace: FieldFn::zero(),
            flux: Box::new(|_: Point, _: Vector| 0.0),
        }
    }

    /// u = sin(πx) sin(πy); the normal derivative is nonzero on ∂Ω.
    pub fn example_2() -> Self {
        let u = |q: Point| (PI * q.x).sin() * (PI * q.y).sin();
        let grad = |q: Point| {
            Vector::new(
                PI * (PI * q.x).cos() * (PI * q.y).sin(),
                PI * (PI * q.x).sin() * (PI * q.y).cos(),
            )
        };
        let solution = FieldFn::new(u)
            .with_gradient(grad)
            .with_laplacian(move |q| -2.0 * PI * PI * u(q));
        let source = FieldFn::new(move |q| 4.0 * PI.powi(4) * u(q));
        Problem {
            id: "example2".into(),
            solution,
            source,
            trace: FieldFn::new(u),
            flux: Box::new(move |q: Point, n: Vector| grad(q).dot(&n)),
        }
    }

    /// u = Σ_{a+b≤k} x^a y^b, which the scheme reproduces exactly.
    pub fn polynomial_patch(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(WgError::InvalidDegree(k));
        }
        let mut terms = Vec::new();
        for d in 0..=k as u32 {
            for b in 0..=d {
                terms.push(((d - b, b), 1.0));
            }
        }
        Ok(Problem::from_polynomial(format!("patch-{k}"), Polynomial::new(terms)))
    }

    pub fn from_polynomial(id: String, u: Polynomial) -> Self {
        let (dx, dy) = (u.dx(), u.dy());
        let lap = u.laplacian();
        let bilap = lap.laplacian();
        let trace = u.clone();
        let flux_grad = (dx.clone(), dy.clone());
        let value = u.clone();
        let solution = FieldFn::new(move |p| value.eval(p))
            .with_gradient(move |p| Vector::new(dx.eval(p), dy.eval(p)))
            .with_laplacian(move |p| lap.eval(p));
        Problem {
            id,
            solution,
            source: FieldFn::new(move |p| bilap.eval(p)),
            trace: FieldFn::new(move |p| trace.eval(p)),
            flux: Box::new(move |p: Point, n: Vector| flux_grad.0.eval(p) * n.x + flux_grad.1.eval(p) * n.y),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn solution(&self) -> &dyn ScalarField {
        &self.solution
    }

    /// f = Δ²u.
    pub fn source(&self) -> &dyn ScalarField {
        &self.source
    }

    /// g = u on ∂Ω.
    pub fn trace(&self) -> &dyn ScalarField {
        &self.trace
    }

    /// φ = ∇u · n on ∂Ω.
    pub fn flux(&self) -> &dyn NormalFlux {
        self.flux.as_ref()
    }
}

/// A polynomial in x and y stored as (exponents, coefficient) terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    terms: Vec<((u32, u32), f64)>,
}

impl Polynomial {
    pub fn new(terms: Vec<((u32, u32), f64)>) -> Self {
        let mut p = Polynomial { terms };
        p.terms.retain(|&(_, c)| c != 0.0);
        p
    }

    pub fn monomial(a: u32, b: u32) -> Self {
        Polynomial::new(vec![((a, b), 1.0)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, p: Point) -> f64 {
        self.terms
            .iter()
            .map(|&((a, b), c)| c * p.x.powi(a as i32) * p.y.powi(b as i32))
            .sum()
    }

    pub fn dx(&self) -> Self {
        Polynomial::new(
            self.terms
                .iter()
                .filter(|((a, _), _)| *a > 0)
                .map(|&((a, b), c)| ((a - 1, b), c * a as f64))
                .collect(),
        )
    }

    pub fn dy(&self) -> Self {
        Polynomial::new(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b > 0)
                .map(|&((a, b), c)| ((a, b - 1), c * b as f64))
                .collect(),
        )
    }

    pub fn laplacian(&self) -> Self {
        let mut terms = self.dx().dx().terms;
        terms.extend(self.dy().dy().terms);
        let mut merged: Vec<((u32, u32), f64)> = Vec::new();
        for (e, c) in terms {
            match merged.iter_mut().find(|(m, _)| *m == e) {
                Some((_, mc)) => *mc += c,
                None => merged.push((e, c)),
            }
        }
        Polynomial::new(merged)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// 13-point finite-difference Δ² stencil.
    fn fd_bilaplacian(u: &dyn ScalarField, p: Point, h: f64) -> f64 {
        let at = |i: f64, j: f64| u.value(Point::new(p.x + i * h, p.y + j * h));
        let c = at(0.0, 0.0);
        let axis = at(1.0, 0.0) + at(-1.0, 0.0) + at(0.0, 1.0) + at(0.0, -1.0);
        let diag = at(1.0, 1.0) + at(1.0, -1.0) + at(-1.0, 1.0) + at(-1.0, -1.0);
        let far = at(2.0, 0.0) + at(-2.0, 0.0) + at(0.0, 2.0) + at(0.0, -2.0);
        (20.0 * c - 8.0 * axis + 2.0 * diag + far) / h.powi(4)
    }

    fn random_points(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Point::new(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95)))
            .collect()
    }

    fn check_derivatives(problem: &Problem) {
        let u = problem.solution();
        let step = 1e-6;
        for p in random_points(100, 17) {
            let g = u.gradient(p).unwrap();
            let fdx = (u.value(Point::new(p.x + step, p.y)) - u.value(Point::new(p.x - step, p.y))) / (2.0 * step);
            let fdy = (u.value(Point::new(p.x, p.y + step)) - u.value(Point::new(p.x, p.y - step))) / (2.0 * step);
            let scale = g.norm().max(1e-3);
            assert!((Vector::new(fdx, fdy) - g).norm() / scale < 1e-7, "{}: gradient at {p}", problem.id());

            let hl = 1e-4;
            let fdl = (u.value(Point::new(p.x + hl, p.y))
                + u.value(Point::new(p.x - hl, p.y))
                + u.value(Point::new(p.x, p.y + hl))
                + u.value(Point::new(p.x, p.y - hl))
                - 4.0 * u.value(p))
                / (hl * hl);
            let lap = u.laplacian(p).unwrap();
            assert!((fdl - lap).abs() / lap.abs().max(1e-2) < 1e-5, "{}: laplacian at {p}", problem.id());
        }
        for p in random_points(200, 23) {
            let f = problem.source().value(p);
            // Richardson extrapolation of the O(h²) stencil.
            let fd = (4.0 * fd_bilaplacian(u, p, 5e-3) - fd_bilaplacian(u, p, 1e-2)) / 3.0;
            assert!((fd - f).abs() / f.abs().max(1.0) < 1e-4, "{}: source at {p}: {fd} vs {f}", problem.id());
        }
    }

    fn boundary_samples(n: usize) -> Vec<(Point, Vector)> {
        let mut out = Vec::new();
        for i in 0..n {
            let s = (i as f64 + 0.5) / n as f64;
            out.push((Point::new(s, 0.0), Vector::new(0.0, -1.0)));
            out.push((Point::new(1.0, s), Vector::new(1.0, 0.0)));
            out.push((Point::new(s, 1.0), Vector::new(0.0, 1.0)));
            out.push((Point::new(0.0, s), Vector::new(-1.0, 0.0)));
        }
        out
    }

    fn check_boundary_data(problem: &Problem) {
        let u = problem.solution();
        for (p, n) in boundary_samples(13) {
            assert!((problem.trace().value(p) - u.value(p)).abs() < 1e-12);
            assert!((problem.flux().flux(p, n) - u.gradient(p).unwrap().dot(&n)).abs() < 1e-12);
        }
    }

    #[test]
    fn example_1_values() {
        let pb = Problem::example_1();
        let c = Point::new(0.5, 0.5);
        assert_abs_diff_eq!(pb.solution().value(c), 0.00390625, epsilon = 1e-17);
        assert_abs_diff_eq!(pb.source().value(c), 5.0, epsilon = 1e-14);
        for (p, n) in boundary_samples(13) {
            assert!(pb.solution().value(p).abs() < 1e-15);
            assert!(pb.solution().gradient(p).unwrap().dot(&n).abs() < 1e-15);
            assert_eq!(pb.trace().value(p), 0.0);
            assert_eq!(pb.flux().flux(p, n), 0.0);
        }
        check_derivatives(&pb);
        check_boundary_data(&pb);
    }

    #[test]
    fn example_2_values() {
        let pb = Problem::example_2();
        let c = Point::new(0.5, 0.5);
        assert_abs_diff_eq!(pb.solution().value(c), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pb.source().value(c), 4.0 * PI.powi(4), epsilon = 1e-12);
        assert_abs_diff_eq!(4.0 * PI.powi(4), 389.6363641360, epsilon = 1e-9);
        let phi = pb.flux().flux(Point::new(0.0, 0.5), Vector::new(-1.0, 0.0));
        assert_abs_diff_eq!(phi, -PI, epsilon = 1e-14);
        check_derivatives(&pb);
        check_boundary_data(&pb);
    }

    #[test]
    fn patch_sources() {
        for k in [2, 3] {
            let pb = Problem::polynomial_patch(k).unwrap();
            for p in random_points(20, 5) {
                assert_eq!(pb.source().value(p), 0.0);
            }
            check_boundary_data(&pb);
        }
        let quartic = Polynomial::monomial(4, 0);
        assert_eq!(quartic.laplacian().laplacian(), Polynomial::new(vec![((0, 0), 24.0)]));
        let pb = Problem::polynomial_patch(4).unwrap();
        // Δ²(x⁴ + x²y² + y⁴) = 24 + 8 + 24.
        assert_abs_diff_eq!(pb.source().value(Point::new(0.3, 0.7)), 56.0, epsilon = 1e-12);
        check_derivatives(&pb);
    }

    #[test]
    fn problem_ids() {
        assert_eq!(Problem::from_id("example1").unwrap().id(), "example1");
        assert_eq!(Problem::from_id("example2").unwrap().id(), "example2");
        assert_eq!(Problem::from_id("patch-3").unwrap().id(), "patch-3");
        assert!(matches!(Problem::from_id("patch-x"), Err(WgError::UnknownProblem(_))));
        assert!(matches!(Problem::from_id("patch-1"), Err(WgError::InvalidDegree(1))));
        assert!(Problem::from_id("example3").is_err());
    }
}
