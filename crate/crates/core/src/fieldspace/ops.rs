use super::kernels;
use super::{ScalarField, TensorField, TraceField, VectorField, ZERO};
use num_complex::Complex64;

/// `∇φ` in Cartesian components.
pub fn grad(phi: &ScalarField) -> VectorField {
    VectorField {
        components: [phi.d_x(), phi.d_y(), phi.d_z()],
    }
}

/// `∇·v`.
///
/// Computed as `½[∂(v₁ - i v₂) + ∂̄(v₁ + i v₂)] + ∂₃v₃`, which avoids
/// intermediate azimuthal modes outside the band of `v`.
pub fn div(v: &VectorField) -> ScalarField {
    let [v1, v2, v3] = &v.components;
    let domain = v1.domain().clone();
    let mut out = ScalarField::zeros(&domain);
    let i = Complex64::new(0.0, 1.0);
    for n in domain.axial_modes() {
        let (s1, s2, s3) = (v1.slab(n), v2.slab(n), v3.slab(n));
        if kernels::is_zero(s1) && kernels::is_zero(s2) && kernels::is_zero(s3) {
            continue;
        }
        let ctx = domain.slab_ctx(n);
        let minus: Vec<Complex64> = s1.iter().zip(s2).map(|(a, b)| a - i * b).collect();
        let plus: Vec<Complex64> = s1.iter().zip(s2).map(|(a, b)| a + i * b).collect();
        let up = kernels::shift_derivative(ctx, &minus, true);
        let down = kernels::shift_derivative(ctx, &plus, false);
        let dz = kernels::d_z(ctx, s3);
        let slab = out.slab_mut(n);
        for k in 0..slab.len() {
            slab[k] = 0.5 * (up[k] + down[k]) + dz[k];
        }
    }
    out.with_real(v.is_real())
}

/// Velocity gradient `entries[i][j] = Dⱼ vᵢ`.
pub fn velocity_gradient(v: &VectorField) -> TensorField {
    let row = |c: &ScalarField| [c.d_x(), c.d_y(), c.d_z()];
    TensorField {
        entries: [
            row(&v.components[0]),
            row(&v.components[1]),
            row(&v.components[2]),
        ],
    }
}

/// `entries[i][j] = Dⱼvᵢ + Dᵢvⱼ`.
pub fn sym_grad(v: &VectorField) -> TensorField {
    let g = velocity_gradient(v);
    let e = |i: usize, j: usize| &g.entries[i][j] + &g.entries[j][i];
    TensorField {
        entries: [
            [e(0, 0), e(0, 1), e(0, 2)],
            [e(1, 0), e(1, 1), e(1, 2)],
            [e(2, 0), e(2, 1), e(2, 2)],
        ],
    }
}

/// Restriction to the free surface `r = κ`.
pub fn trace_sf(f: &ScalarField) -> TraceField {
    let domain = f.domain().clone();
    let mut out = TraceField::zeros(&domain);
    for n in domain.axial_modes() {
        let t = kernels::trace(domain.slab_ctx(n), f.slab(n));
        out.row_mut(n).copy_from_slice(&t);
    }
    out.with_real(f.is_real())
}

/// Relative mismatch of `D₃ᵏ f` between the faces `a₃ = 0` and `a₃ = ℓ`,
/// maximised over `k ≤ order` and over the azimuthal/radial grid.
pub fn periodicity_defect(f: &ScalarField, order: usize) -> f64 {
    let domain = f.domain();
    let cfg = domain.config();
    let mut worst: f64 = 0.0;
    for k in 0..=order {
        let mut diff = vec![ZERO; domain.slab_len()];
        let mut scale = vec![0.0; domain.slab_len()];
        for n in domain.axial_modes() {
            let beta = cfg.beta(n);
            let factor = Complex64::new(0.0, beta).powu(k as u32);
            let phase = Complex64::from_polar(1.0, beta * cfg.ell) - 1.0;
            for (idx, c) in f.slab(n).iter().enumerate() {
                diff[idx] += factor * c * phase;
                scale[idx] += (factor * c).norm();
            }
        }
        for (d, s) in diff.iter().zip(&scale) {
            if *s > 0.0 {
                worst = worst.max(d.norm() / s);
            }
        }
    }
    worst
}
