//! Per-triangle quadrature rules mapped onto the ambient.

use rayon::prelude::*;

use super::SurfaceMesh;
use crate::ambient::{Ambient, Point};
use crate::error::{invalid, Result};
use crate::linalg::{self, Vec4};

// symmetric degree-4 rule (Dunavant)
const D4_A: [f64; 2] = [0.445948490915965, 0.091576213509771];
const D4_W: [f64; 2] = [0.223381589678011, 0.109951743655322];

/// Barycentric nodes and unit-sum weights of a supported rule.
fn rule(order: usize) -> Result<Vec<([f64; 3], f64)>> {
    Ok(match order {
        1 => vec![([1.0 / 3.0; 3], 1.0)],
        3 => vec![([0.5, 0.5, 0.0], 1.0 / 3.0), ([0.0, 0.5, 0.5], 1.0 / 3.0), ([0.5, 0.0, 0.5], 1.0 / 3.0)],
        6 => {
            let total: f64 = 3.0 * (D4_W[0] + D4_W[1]);
            let mut r = Vec::with_capacity(6);
            for (a, w) in D4_A.iter().zip(D4_W) {
                let b = 1.0 - 2.0 * a;
                for bary in [[*a, *a, b], [*a, b, *a], [b, *a, *a]] {
                    r.push((bary, w / total));
                }
            }
            r
        }
        _ => return invalid(format!("quadrature order must be 1, 3 or 6, got {order}")),
    })
}

/// Flat list of quadrature nodes (ambient chart coordinates) and weights.
/// Weights of each triangle sum to its area.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSet {
    pub nodes: Vec<Vec4>,
    pub weights: Vec<f64>,
    pub order: usize,
}

impl QuadratureSet {
    pub fn new(mesh: &SurfaceMesh, order: usize) -> Result<Self> {
        let rule = rule(order)?;
        let ambient = *mesh.ambient();
        let per_triangle: Vec<Vec<(Vec4, f64)>> = (0..mesh.triangle_count())
            .into_par_iter()
            .map(|i| {
                let p = mesh.corners(i);
                let area = mesh.triangle_area(i);
                rule.iter()
                    .map(|(b, w)| {
                        let x = linalg::axpy(&linalg::axpy(&linalg::scale(&p[0], b[0]), b[1], &p[1]), b[2], &p[2]);
                        let x = match ambient {
                            Ambient::Euclidean { .. } => x,
                            _ => *ambient.project(&x).vec4(),
                        };
                        (x, w * area)
                    })
                    .collect()
            })
            .collect();
        let mut nodes = Vec::with_capacity(rule.len() * mesh.triangle_count());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (x, w) in per_triangle.into_iter().flatten() {
            nodes.push(x);
            weights.push(w);
        }
        Ok(Self { nodes, weights, order })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Quadrature nodes as ambient points with their weights.
pub fn quadrature_points(mesh: &SurfaceMesh, order: usize) -> Result<Vec<(Point, f64)>> {
    let q = QuadratureSet::new(mesh, order)?;
    let d = mesh.ambient().chart_dim();
    Ok(q.nodes
        .iter()
        .zip(&q.weights)
        .map(|(x, w)| (Point::raw(*x, d), *w))
        .collect())
}
