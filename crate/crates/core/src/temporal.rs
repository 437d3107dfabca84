//! Reference-interval dG(r) temporal finite element: Lagrange basis on a
//! selectable support-point family, its derivative, endpoint limits and
//! Gauss quadrature in time.

use crate::polynomial::{
    barycentric_weights, gauss_legendre, gauss_lobatto_nodes, gauss_radau_left_nodes,
    gauss_radau_right_nodes, lagrange_derivative, lagrange_value,
};
use crate::{Error, Result};

/// Maximum supported temporal degree.
pub const MAX_TEMPORAL_DEGREE: usize = 10;

/// Placement family of the `r + 1` temporal support points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SupportType {
    #[default]
    Lobatto,
    Legendre,
    RadauLeft,
    RadauRight,
}

impl SupportType {
    pub const ALL: [SupportType; 4] = [
        SupportType::Lobatto,
        SupportType::Legendre,
        SupportType::RadauLeft,
        SupportType::RadauRight,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SupportType::Lobatto => "lobatto",
            SupportType::Legendre => "legendre",
            SupportType::RadauLeft => "radau-left",
            SupportType::RadauRight => "radau-right",
        }
    }

    pub fn parse(s: &str) -> Result<SupportType> {
        match s.to_ascii_lowercase().as_str() {
            "lobatto" => Ok(SupportType::Lobatto),
            "legendre" => Ok(SupportType::Legendre),
            "radau-left" | "radauleft" => Ok(SupportType::RadauLeft),
            "radau-right" | "radauright" => Ok(SupportType::RadauRight),
            other => Err(Error::InvalidConfig(format!(
                "unknown support type '{other}'"
            ))),
        }
    }
}

/// Support points of the given family for degree `r`, mapped to `[0, 1]`.
///
/// For `r = 0` each family returns the single node of its one-point rule
/// (midpoint for Lobatto and Legendre, the fixed endpoint for Radau).
pub fn make_support_points(r: usize, support_type: SupportType) -> Result<Vec<f64>> {
    if r > MAX_TEMPORAL_DEGREE {
        return Err(Error::UnsupportedDegree {
            degree: r,
            max: MAX_TEMPORAL_DEGREE,
        });
    }
    let n = r + 1;
    Ok(match support_type {
        SupportType::Lobatto => {
            if n == 1 {
                vec![0.5]
            } else {
                gauss_lobatto_nodes(n)
            }
        }
        SupportType::Legendre => gauss_legendre(n).0,
        SupportType::RadauLeft => gauss_radau_left_nodes(n),
        SupportType::RadauRight => gauss_radau_right_nodes(n),
    })
}

/// Nodal Lagrange basis of degree `r` on the reference interval `(0, 1)`.
#[derive(Debug, Clone)]
pub struct TemporalBasis {
    degree: usize,
    support_type: SupportType,
    nodes: Vec<f64>,
    bary_weights: Vec<f64>,
}

impl TemporalBasis {
    pub fn new(degree: usize, support_type: SupportType) -> Result<TemporalBasis> {
        let nodes = make_support_points(degree, support_type)?;
        let bary_weights = barycentric_weights(&nodes);
        Ok(TemporalBasis {
            degree,
            support_type,
            nodes,
            bary_weights,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn support_type(&self) -> SupportType {
        self.support_type
    }

    /// Number of basis functions, `r + 1`.
    pub fn n_dofs(&self) -> usize {
        self.degree + 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Value of the `i`-th basis polynomial at `t` in `[0, 1]`.
    pub fn shape_value(&self, i: usize, t: f64) -> f64 {
        assert!(i < self.n_dofs(), "basis index {i} out of range");
        lagrange_value(&self.nodes, &self.bary_weights, i, t)
    }

    /// Derivative of the `i`-th basis polynomial at `t`.
    pub fn shape_dt(&self, i: usize, t: f64) -> f64 {
        assert!(i < self.n_dofs(), "basis index {i} out of range");
        if self.degree == 0 {
            return 0.0;
        }
        lagrange_derivative(&self.nodes, i, t)
    }

    /// Coefficients of the limit from above at the interval start:
    /// `c_i = phi_i(0)`. A finite element function's limit is `sum_i c_i u_i`.
    pub fn limit_left(&self) -> Vec<f64> {
        (0..self.n_dofs()).map(|i| self.shape_value(i, 0.0)).collect()
    }

    /// Coefficients of the limit from below at the interval end: `c_i = phi_i(1)`.
    pub fn limit_right(&self) -> Vec<f64> {
        (0..self.n_dofs()).map(|i| self.shape_value(i, 1.0)).collect()
    }

    /// `M_ij = \int_0^1 phi_j phi_i dt`.
    pub fn mass_matrix(&self) -> Vec<Vec<f64>> {
        let quad = TemporalQuadrature::gauss(self.degree + 2);
        let n = self.n_dofs();
        let mut m = vec![vec![0.0; n]; n];
        for (&t, &w) in quad.points().iter().zip(quad.weights()) {
            for i in 0..n {
                let vi = self.shape_value(i, t);
                for j in 0..n {
                    m[i][j] += w * self.shape_value(j, t) * vi;
                }
            }
        }
        m
    }

    /// `D_ij = \int_0^1 phi'_j phi_i dt`.
    pub fn derivative_matrix(&self) -> Vec<Vec<f64>> {
        let quad = TemporalQuadrature::gauss(self.degree + 2);
        let n = self.n_dofs();
        let mut d = vec![vec![0.0; n]; n];
        for (&t, &w) in quad.points().iter().zip(quad.weights()) {
            for i in 0..n {
                let vi = self.shape_value(i, t);
                for j in 0..n {
                    d[i][j] += w * self.shape_dt(j, t) * vi;
                }
            }
        }
        d
    }
}

/// Gauss-Legendre quadrature on the reference interval `(0, 1)`.
#[derive(Debug, Clone)]
pub struct TemporalQuadrature {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl TemporalQuadrature {
    /// `n`-point Gauss rule, exact for polynomials up to degree `2n - 1`.
    pub fn gauss(n: usize) -> TemporalQuadrature {
        let (points, weights) = gauss_legendre(n);
        TemporalQuadrature { points, weights }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
