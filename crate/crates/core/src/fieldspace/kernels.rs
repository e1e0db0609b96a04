//! Single-axial-mode kernels.
//!
//! A slab holds the coefficients of one axial mode `n`: `(2·n_theta + 1)`
//! azimuthal blocks of `n_r` radial values, `m` ascending from `-n_theta`.
//! Writing `∂ = ∂₁ + i∂₂` and `∂̄ = ∂₁ - i∂₂`, the Cartesian derivatives of
//! `f(r) e^{imθ}` are
//!
//! ```text
//! ∂ (f e^{imθ}) = (f' - m f / r) e^{i(m+1)θ}
//! ∂̄ (f e^{imθ}) = (f' + m f / r) e^{i(m-1)θ}
//! ```
//!
//! Output modes beyond `±n_theta` are dropped.

use super::grid::RadialGrid;
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy)]
pub(crate) struct SlabCtx<'a> {
    pub grid: &'a RadialGrid,
    pub n_theta: usize,
    pub beta: f64,
}

impl<'a> SlabCtx<'a> {
    #[inline]
    pub fn n_r(&self) -> usize {
        self.grid.n_r()
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        2 * self.n_theta + 1
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n_modes() * self.n_r()
    }

    #[inline]
    pub fn m_of(&self, idx: usize) -> i64 {
        idx as i64 - self.n_theta as i64
    }

    #[inline]
    pub fn idx_of(&self, m: i64) -> Option<usize> {
        let t = self.n_theta as i64;
        (m >= -t && m <= t).then(|| (m + t) as usize)
    }

    pub fn zeros(&self) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); self.len()]
    }

    #[inline]
    pub fn block<'s>(&self, slab: &'s [Complex64], idx: usize) -> &'s [Complex64] {
        let n_r = self.n_r();
        &slab[idx * n_r..(idx + 1) * n_r]
    }

    #[inline]
    pub fn block_mut<'s>(&self, slab: &'s mut [Complex64], idx: usize) -> &'s mut [Complex64] {
        let n_r = self.n_r();
        &mut slab[idx * n_r..(idx + 1) * n_r]
    }
}

#[inline]
pub(crate) fn is_zero(block: &[Complex64]) -> bool {
    block.iter().all(|c| c.re == 0.0 && c.im == 0.0)
}

fn matvec(mat: &nalgebra::DMatrix<f64>, x: &[Complex64], out: &mut [Complex64]) {
    let n = x.len();
    out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
    for (j, xj) in x.iter().enumerate() {
        if xj.re == 0.0 && xj.im == 0.0 {
            continue;
        }
        let col = mat.column(j);
        for i in 0..n {
            out[i] += xj * col[i];
        }
    }
}

/// `∂` (shift `m → m + 1`) when `up`, else `∂̄` (shift `m → m - 1`).
pub(crate) fn shift_derivative(ctx: SlabCtx, input: &[Complex64], up: bool) -> Vec<Complex64> {
    let mut out = ctx.zeros();
    let mut tmp = vec![Complex64::new(0.0, 0.0); ctx.n_r()];
    let inv_r = ctx.grid.inv_nodes();
    for idx in 0..ctx.n_modes() {
        let f = ctx.block(input, idx);
        if is_zero(f) {
            continue;
        }
        let m = ctx.m_of(idx);
        let target = if up { m + 1 } else { m - 1 };
        let Some(t_idx) = ctx.idx_of(target) else { continue };
        matvec(ctx.grid.d1(m), f, &mut tmp);
        let mf = if up { -(m as f64) } else { m as f64 };
        let o = ctx.block_mut(&mut out, t_idx);
        for j in 0..f.len() {
            o[j] = tmp[j] + f[j] * (mf * inv_r[j]);
        }
    }
    out
}

/// `∂/∂a₁`.
pub(crate) fn d_x(ctx: SlabCtx, input: &[Complex64]) -> Vec<Complex64> {
    let up = shift_derivative(ctx, input, true);
    let down = shift_derivative(ctx, input, false);
    up.iter().zip(&down).map(|(a, b)| (a + b) * 0.5).collect()
}

/// `∂/∂a₂`.
pub(crate) fn d_y(ctx: SlabCtx, input: &[Complex64]) -> Vec<Complex64> {
    let up = shift_derivative(ctx, input, true);
    let down = shift_derivative(ctx, input, false);
    up.iter().zip(&down).map(|(a, b)| (a - b) * (-0.5 * I)).collect()
}

/// `∂/∂a₃`, diagonal in the axial mode.
pub(crate) fn d_z(ctx: SlabCtx, input: &[Complex64]) -> Vec<Complex64> {
    let k = I * ctx.beta;
    input.iter().map(|c| c * k).collect()
}

/// Radial derivative `∂_r`, mode by mode.
pub(crate) fn d_r(ctx: SlabCtx, input: &[Complex64]) -> Vec<Complex64> {
    let mut out = ctx.zeros();
    for idx in 0..ctx.n_modes() {
        let f = ctx.block(input, idx);
        if is_zero(f) {
            continue;
        }
        let m = ctx.m_of(idx);
        matvec(ctx.grid.d1(m), f, ctx.block_mut(&mut out, idx));
    }
    out
}

/// Three-dimensional Laplacian of one axial mode:
/// `f'' + f'/r - m² f / r² - β² f` per azimuthal block.
pub(crate) fn laplacian(ctx: SlabCtx, input: &[Complex64]) -> Vec<Complex64> {
    let mut out = ctx.zeros();
    let n_r = ctx.n_r();
    let mut t1 = vec![Complex64::new(0.0, 0.0); n_r];
    let mut t2 = vec![Complex64::new(0.0, 0.0); n_r];
    let inv_r = ctx.grid.inv_nodes();
    let b2 = ctx.beta * ctx.beta;
    for idx in 0..ctx.n_modes() {
        let f = ctx.block(input, idx);
        if is_zero(f) {
            continue;
        }
        let m = ctx.m_of(idx);
        let m2 = (m * m) as f64;
        matvec(ctx.grid.d1(m), f, &mut t1);
        matvec(ctx.grid.d2(m), f, &mut t2);
        let o = ctx.block_mut(&mut out, idx);
        for j in 0..n_r {
            let ir = inv_r[j];
            o[j] = t2[j] + t1[j] * ir - f[j] * (m2 * ir * ir) - f[j] * b2;
        }
    }
    out
}

/// `∫_𝔻 u v̄` for two slabs (Parseval in θ, Gauss–Legendre in r).
pub(crate) fn disk_inner(ctx: SlabCtx, u: &[Complex64], v: &[Complex64]) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    let n_r = ctx.n_r();
    for idx in 0..ctx.n_modes() {
        let a = ctx.block(u, idx);
        let b = ctx.block(v, idx);
        if is_zero(a) || is_zero(b) {
            continue;
        }
        let g = ctx.grid.gram(ctx.m_of(idx));
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n_r {
            if a[j].re == 0.0 && a[j].im == 0.0 {
                continue;
            }
            let col = g.column(j);
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..n_r {
                s += b[i].conj() * col[i];
            }
            acc += s * a[j];
        }
        total += acc;
    }
    total * (2.0 * std::f64::consts::PI)
}

pub(crate) fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Values at `r = κ` for every azimuthal mode.
pub(crate) fn trace(ctx: SlabCtx, input: &[Complex64]) -> Vec<Complex64> {
    (0..ctx.n_modes()).map(|idx| ctx.block(input, idx)[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx(grid: &RadialGrid) -> SlabCtx<'_> {
        SlabCtx {
            grid,
            n_theta: 4,
            beta: 0.0,
        }
    }

    #[test]
    fn holomorphic_square() {
        // (a₁ + i a₂)² = r² e^{2iθ}: ∂ annihilates it, ∂̄ gives 4 r e^{iθ}
        let grid = RadialGrid::new(0.5, 8, 16);
        let c = ctx(&grid);
        let mut slab = c.zeros();
        let idx = c.idx_of(2).unwrap();
        for (j, r) in grid.nodes().iter().enumerate() {
            slab[idx * 8 + j] = Complex64::new(r * r, 0.0);
        }
        let up = shift_derivative(c, &slab, true);
        assert!(up.iter().all(|v| v.norm() < 1e-11));
        let down = shift_derivative(c, &slab, false);
        let t = c.idx_of(1).unwrap();
        for (j, r) in grid.nodes().iter().enumerate() {
            assert_relative_eq!(down[t * 8 + j].re, 4.0 * r, epsilon = 1e-11);
        }
    }

    #[test]
    fn laplacian_of_r_squared() {
        let grid = RadialGrid::new(0.5, 8, 16);
        let c = ctx(&grid);
        let mut slab = c.zeros();
        let idx = c.idx_of(0).unwrap();
        for (j, r) in grid.nodes().iter().enumerate() {
            slab[idx * 8 + j] = Complex64::new(r * r / 4.0, 0.0);
        }
        let lap = laplacian(c, &slab);
        for j in 0..8 {
            assert_relative_eq!(lap[idx * 8 + j].re, 1.0, epsilon = 1e-10);
        }
    }
}
