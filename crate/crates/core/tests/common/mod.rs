#![allow(dead_code)]

use rand::Rng;
use wg_biharmonic::mesh::{signed_area, Mesh};
use wg_biharmonic::Point;

/// A single-cell mesh on a random triangle of area at least 0.05.
pub fn random_triangle(rng: &mut impl Rng) -> Mesh {
    loop {
        let mut pts: Vec<Point> = (0..3)
            .map(|_| Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let a = signed_area(&pts);
        if a.abs() < 0.05 {
            continue;
        }
        if a < 0.0 {
            pts.swap(1, 2);
        }
        return Mesh::new(pts, vec![vec![0, 1, 2]]).expect("valid triangle");
    }
}

/// A single-cell mesh on a convex quadrilateral obtained by jittering the
/// corners of a randomly placed and scaled square.
pub fn random_quad(rng: &mut impl Rng) -> Mesh {
    let s = rng.gen_range(0.2..1.0);
    let (x0, y0) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let corners = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let pts: Vec<Point> = corners
        .iter()
        .map(|&(a, b)| {
            Point::new(
                x0 + s * (a + rng.gen_range(-0.2..0.2)),
                y0 + s * (b + rng.gen_range(-0.2..0.2)),
            )
        })
        .collect();
    Mesh::new(pts, vec![vec![0, 1, 2, 3]]).expect("valid quadrilateral")
}

/// Alternates triangles and quadrilaterals.
pub fn random_cell(rng: &mut impl Rng, i: usize) -> Mesh {
    if i.is_multiple_of(2) {
        random_triangle(rng)
    } else {
        random_quad(rng)
    }
}
