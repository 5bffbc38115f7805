//! Zariski-closure proxy for finite point sets.
//!
//! Finite data cannot decide density; this only reports the lowest-degree
//! containment that exact linear algebra finds: a hyperplane, or a conic on `P^2`.

use std::fmt;

use crate::exactnum::linalg::kernel_vector;
use crate::exactnum::{format_rational, Rational};
use crate::polydyn::{exponents_of_degree, ProjPoint};

#[derive(Clone, Debug, PartialEq)]
pub enum Containment {
    Empty,
    /// Points of `P^1`: always a finite set of points.
    FinitePoints,
    /// `sum c_i x_i = 0` contains every point.
    Hyperplane(Vec<Rational>),
    /// Coefficients on the degree-2 monomials in lexicographically decreasing order.
    Conic(Vec<Rational>),
    NoLowDegree,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureProxy {
    pub points: usize,
    pub containment: Containment,
}

impl fmt::Display for ClosureProxy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs = |c: &[Rational]| c.iter().map(format_rational).collect::<Vec<_>>().join(", ");
        match &self.containment {
            Containment::Empty => write!(f, "empty"),
            Containment::FinitePoints => write!(f, "{} points", self.points),
            Containment::Hyperplane(c) => write!(f, "{} points on the hyperplane [{}]", self.points, coeffs(c)),
            Containment::Conic(c) => write!(f, "{} points on the conic [{}]", self.points, coeffs(c)),
            Containment::NoLowDegree => {
                write!(f, "{} points, no low-degree containment found", self.points)
            }
        }
    }
}

pub fn closure_proxy(points: &[ProjPoint]) -> ClosureProxy {
    let mut distinct: Vec<&ProjPoint> = Vec::new();
    for p in points {
        if !distinct.contains(&p) {
            distinct.push(p);
        }
    }
    let k = distinct.len();
    let containment = match distinct.first() {
        None => Containment::Empty,
        Some(p) if p.coords().len() == 2 => Containment::FinitePoints,
        Some(p) => {
            let nvars = p.coords().len();
            let rows: Vec<Vec<Rational>> = distinct.iter().map(|q| q.as_rationals()).collect();
            if let Some(c) = kernel_vector(&rows) {
                Containment::Hyperplane(c)
            } else if nvars == 3 {
                let monos = exponents_of_degree(3, 2);
                let rows: Vec<Vec<Rational>> = distinct
                    .iter()
                    .map(|q| {
                        let x = q.as_rationals();
                        monos
                            .iter()
                            .map(|e| {
                                e.iter()
                                    .zip(&x)
                                    .map(|(&k, xi)| num_traits::pow(xi.clone(), k as usize))
                                    .product()
                            })
                            .collect()
                    })
                    .collect();
                kernel_vector(&rows).map_or(Containment::NoLowDegree, Containment::Conic)
            } else {
                Containment::NoLowDegree
            }
        }
    };
    ClosureProxy { points: k, containment }
}
