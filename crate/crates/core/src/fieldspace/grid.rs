//! Radial discretization on the reflected Chebyshev grid.
//!
//! The disk radius `r ∈ [0, κ]` is the positive half of a Chebyshev–Lobatto
//! grid on `[-κ, κ]` with an even number `2·n_r` of points, so no node sits on
//! the axis. A radial coefficient function attached to azimuthal mode `m`
//! extends through the axis with parity `(-1)^m`; differentiation and
//! interpolation act on the folded half grid.

use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Parity class of the radial function carried by azimuthal mode `m`.
#[inline]
pub(crate) fn parity(m: i64) -> usize {
    m.rem_euclid(2) as usize
}

#[derive(Debug)]
pub struct RadialGrid {
    kappa: f64,
    n_r: usize,
    /// Radial nodes, descending from `r[0] = κ`.
    r: Vec<f64>,
    inv_r: Vec<f64>,
    /// Folded first and second derivative matrices, indexed by parity.
    d1: [DMatrix<f64>; 2],
    d2: [DMatrix<f64>; 2],
    quad_nodes: Vec<f64>,
    /// Gauss–Legendre weights including the polar Jacobian `r`.
    quad_weights: Vec<f64>,
    interp: [DMatrix<f64>; 2],
    gram: [DMatrix<f64>; 2],
}

impl RadialGrid {
    pub fn new(kappa: f64, n_r: usize, quad_order: usize) -> Self {
        let n_full = 2 * n_r;
        let x = chebyshev_lobatto(n_full);
        let d_full = chebyshev_diff(n_full) / kappa;
        let d2_full = &d_full * &d_full;

        let fold = |m: &DMatrix<f64>, rows: usize, sign: f64| {
            DMatrix::from_fn(rows, n_r, |i, j| {
                m[(i, j)] + sign * m[(i, n_full - 1 - j)]
            })
        };
        let d1 = [fold(&d_full, n_r, 1.0), fold(&d_full, n_r, -1.0)];
        let d2 = [fold(&d2_full, n_r, 1.0), fold(&d2_full, n_r, -1.0)];

        let (t, w) = gauss_legendre(quad_order);
        let quad_nodes: Vec<f64> = t.iter().map(|&ti| kappa * 0.5 * (ti + 1.0)).collect();
        let quad_weights: Vec<f64> = w
            .iter()
            .zip(&quad_nodes)
            .map(|(&wi, &ri)| 0.5 * kappa * wi * ri)
            .collect();

        let full_interp = barycentric_matrix(&x, &quad_nodes.iter().map(|r| r / kappa).collect::<Vec<_>>());
        let interp = [fold(&full_interp, quad_order, 1.0), fold(&full_interp, quad_order, -1.0)];
        let weights = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(quad_weights.clone()));
        let gram = [
            interp[0].transpose() * &weights * &interp[0],
            interp[1].transpose() * &weights * &interp[1],
        ];

        let r: Vec<f64> = x[..n_r].iter().map(|xi| kappa * xi).collect();
        let inv_r = r.iter().map(|ri| 1.0 / ri).collect();
        Self {
            kappa,
            n_r,
            r,
            inv_r,
            d1,
            d2,
            quad_nodes,
            quad_weights,
            interp,
            gram,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn nodes(&self) -> &[f64] {
        &self.r
    }

    pub(crate) fn inv_nodes(&self) -> &[f64] {
        &self.inv_r
    }

    pub fn quad_nodes(&self) -> &[f64] {
        &self.quad_nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    pub fn d1(&self, m: i64) -> &DMatrix<f64> {
        &self.d1[parity(m)]
    }

    pub fn d2(&self, m: i64) -> &DMatrix<f64> {
        &self.d2[parity(m)]
    }

    /// Interpolation from grid values of mode `m` to the quadrature nodes.
    pub fn interp(&self, m: i64) -> &DMatrix<f64> {
        &self.interp[parity(m)]
    }

    /// Gram matrix `G` with `∫₀^κ u v̄ r dr = v̄ᵀ G u` for mode-`m` functions.
    pub fn gram(&self, m: i64) -> &DMatrix<f64> {
        &self.gram[parity(m)]
    }

    /// Evaluates the mode-`m` interpolant of `values` at an arbitrary radius.
    pub fn eval_at(&self, m: i64, values: &[num_complex::Complex64], r: f64) -> num_complex::Complex64 {
        let n_full = 2 * self.n_r;
        let x = chebyshev_lobatto(n_full);
        let row = barycentric_matrix(&x, &[r / self.kappa]);
        let sign = if parity(m) == 0 { 1.0 } else { -1.0 };
        (0..self.n_r)
            .map(|j| values[j] * (row[(0, j)] + sign * row[(0, n_full - 1 - j)]))
            .sum()
    }
}

/// Chebyshev–Lobatto points `cos(πj/(N-1))`, `j = 0..N`, descending.
pub(crate) fn chebyshev_lobatto(n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|j| {
            // sin form keeps the grid exactly antisymmetric
            (PI * (last - 2.0 * j as f64) / (2.0 * last)).sin()
        })
        .collect()
}

/// Chebyshev differentiation matrix on [`chebyshev_lobatto`] points.
pub(crate) fn chebyshev_diff(n: usize) -> DMatrix<f64> {
    let big_n = (n - 1) as f64;
    let c = |i: usize| {
        let base = if i == 0 || i == n - 1 { 2.0 } else { 1.0 };
        if i % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let diff = 2.0
                    * (PI * (i + j) as f64 / (2.0 * big_n)).sin()
                    * (PI * (j as f64 - i as f64) / (2.0 * big_n)).sin();
                d[(i, j)] = c(i) / c(j) / diff;
            }
        }
    }
    for i in 0..n {
        let s: f64 = (0..n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -s;
    }
    d
}

/// Barycentric interpolation matrix from Chebyshev–Lobatto nodes `x` to `targets`.
pub(crate) fn barycentric_matrix(x: &[f64], targets: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let w: Vec<f64> = (0..n)
        .map(|j| {
            let s = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * s
            } else {
                s
            }
        })
        .collect();
    let mut out = DMatrix::zeros(targets.len(), n);
    for (q, &t) in targets.iter().enumerate() {
        if let Some(hit) = x.iter().position(|&xj| xj == t) {
            out[(q, hit)] = 1.0;
            continue;
        }
        let terms: Vec<f64> = (0..n).map(|j| w[j] / (t - x[j])).collect();
        let denom: f64 = terms.iter().sum();
        for j in 0..n {
            out[(q, j)] = terms[j] / denom;
        }
    }
    out
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        // exact up to degree 13
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(12)).sum();
        assert_relative_eq!(s, 2.0 / 13.0, epsilon = 1e-14);
        let total: f64 = w.iter().sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn grid_has_no_axis_node() {
        let g = RadialGrid::new(0.5, 9, 18);
        assert_eq!(g.nodes()[0], 0.5);
        assert!(g.nodes().iter().all(|&r| r > 0.0));
        assert!(g.nodes().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn folded_derivative_exact_on_parity_polynomials() {
        let g = RadialGrid::new(0.7, 8, 16);
        // even: r^4 - r^2, odd: r^5
        let even: Vec<f64> = g.nodes().iter().map(|r| r.powi(4) - r * r).collect();
        let odd: Vec<f64> = g.nodes().iter().map(|r| r.powi(5)).collect();
        let de = g.d1(0) * nalgebra::DVector::from_vec(even);
        let d2o = g.d2(1) * nalgebra::DVector::from_vec(odd);
        for (j, &r) in g.nodes().iter().enumerate() {
            assert_relative_eq!(de[j], 4.0 * r.powi(3) - 2.0 * r, epsilon = 1e-11);
            assert_relative_eq!(d2o[j], 20.0 * r.powi(3), epsilon = 1e-10);
        }
    }

    #[test]
    fn gram_reproduces_polar_integral() {
        let g = RadialGrid::new(0.5, 6, 12);
        let ones = nalgebra::DVector::from_element(6, 1.0);
        let val = (ones.transpose() * g.gram(0) * &ones)[(0, 0)];
        assert_relative_eq!(val, 0.125, epsilon = 1e-14);
    }
}
