//! The two truncated heat-kernel representations: eigenfunction sum (good for
//! large t) and method-of-images / Poisson resummation (good for small t).
//! Their agreement cross-validates everything downstream.

use crate::boxmodel::{b_hl, c_n, omega_sq, shell_for_each, BoxGeometry, ImageIndex, ShellKind};
use crate::boxmodel::l_for_each;
use crate::certified::Accum;

#[derive(Debug, Clone, Copy)]
pub struct HeatParams {
    pub t: f64,
    pub n_shell: f64,
}

/// Default shell radius keeping the dropped eigen-terms below ~e^{-60}.
pub fn default_n_large(t: f64, g: &BoxGeometry) -> f64 {
    (8.0 * g.a_max() / t.sqrt()).ceil().max(6.0)
}

/// Default shell radius for the images representation.
pub fn default_n_small(t: f64, g: &BoxGeometry) -> f64 {
    ((8.0 * t.sqrt()).ceil() / g.a_min() + 2.0 * (g.d() as f64).sqrt()).max(6.0)
}

/// K(t;x,y) ≈ (2^d/Πaᵢ) Σ_{|n|≤N} e^{-ω_n² t} C_n(x,y).
pub fn heat_large(t: f64, x: &[f64], y: &[f64], g: &BoxGeometry, n_shell: f64) -> f64 {
    assert!(t > 0.0, "diffusion time must be positive");
    let mut acc = Accum::new();
    shell_for_each(g.d(), ShellKind::PositiveOrthant, n_shell, |n| {
        let e = omega_sq(n, g) * t;
        if e > 745.0 {
            return;
        }
        acc.add((-e).exp() * c_n(n, x, y, g));
    });
    let pref = 2f64.powi(g.d() as i32) / g.volume();
    pref * acc.value()
}

/// K(t;x,y) ≈ (4πt)^{-d/2} Σ_{|h|≤N, l} δ_l e^{-b_hl(x,y)/t}.
pub fn heat_small(t: f64, x: &[f64], y: &[f64], g: &BoxGeometry, n_shell: f64) -> f64 {
    assert!(t > 0.0, "diffusion time must be positive");
    let d = g.d();
    let mut acc = Accum::new();
    shell_for_each(d, ShellKind::FullLattice, n_shell, |h| {
        l_for_each(d, |l| {
            let idx = ImageIndex { h: h.to_vec(), l: l.to_vec() };
            let e = b_hl(&idx, x, y, g) / t;
            if e > 745.0 {
                return;
            }
            acc.add(idx.delta() * (-e).exp());
        });
    });
    let pref = (4.0 * std::f64::consts::PI * t).powf(-(d as f64) / 2.0);
    pref * acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;

    fn geom(sides: &[f64]) -> BoxGeometry {
        BoxGeometry::new(sides.to_vec()).unwrap()
    }

    #[test]
    fn large_t_leading_term_dominates() {
        let g = geom(&[1.0]);
        let (t, x, y) = (10.0, [0.3], [0.6]);
        let pi = std::f64::consts::PI;
        let leading = 2.0 * (-pi * pi * t).exp() * (pi * x[0]).sin() * (pi * y[0]).sin();
        let full = heat_large(t, &x, &y, &g, 5.0);
        // Next mode is suppressed by e^{-3π²·10} ≈ e^{-296}.
        assert_relative_eq!(full, leading, max_relative = 1e-100);
    }

    #[test]
    fn boundary_vanishing() {
        let g = geom(&[1.0, 1.3]);
        assert_eq!(heat_large(0.5, &[0.0, 0.7], &[0.4, 0.2], &g, 10.0), 0.0);
        let v = heat_small(0.1, &[0.0, 0.7], &[0.0, 0.7], &g, 10.0);
        assert!(v.abs() < 1e-12, "image cancellation on the boundary: {v}");
    }

    #[test]
    fn cross_representation_reference_value() {
        // d=1, a=1, t=0.1, x=y=0.5: high-N eigen-sum oracle.
        let g = geom(&[1.0]);
        let oracle = heat_large(0.1, &[0.5], &[0.5], &g, 400.0);
        let large = heat_large(0.1, &[0.5], &[0.5], &g, 40.0);
        let small = heat_small(0.1, &[0.5], &[0.5], &g, 10.0);
        assert_relative_eq!(large, oracle, max_relative = 1e-13);
        assert_relative_eq!(small, oracle, max_relative = 1e-13);
    }

    #[test]
    fn representations_agree_on_random_samples() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..40 {
            let d = rng.gen_range(1..=2usize);
            let sides: Vec<f64> = (0..d).map(|_| rng.gen_range(0.6..1.8)).collect();
            let g = BoxGeometry::new(sides.clone()).unwrap();
            let t = rng.gen_range(0.05..5.0);
            let x: Vec<f64> = sides.iter().map(|&a| rng.gen_range(0.05..0.95) * a).collect();
            let y: Vec<f64> = sides.iter().map(|&a| rng.gen_range(0.05..0.95) * a).collect();
            let kl = heat_large(t, &x, &y, &g, default_n_large(t, &g));
            let ks = heat_small(t, &x, &y, &g, default_n_small(t, &g));
            assert!(
                (kl - ks).abs() <= 1e-10 * kl.abs().max(1.0),
                "d={d} t={t} x={x:?} y={y:?}: {kl} vs {ks}"
            );
        }
    }

    #[test]
    fn diagonal_positivity() {
        let g = geom(&[1.0, 0.8]);
        for &t in &[0.05, 0.2, 1.0, 4.0] {
            let v = heat_small(t, &[0.4, 0.3], &[0.4, 0.3], &g, default_n_small(t, &g));
            assert!(v > 0.0, "t={t}: {v}");
        }
    }

    #[test]
    fn small_t_diagonal_asymptotics() {
        let g = geom(&[1.0]);
        let t = 0.002;
        let v = heat_small(t, &[0.5], &[0.5], &g, 10.0);
        let free = (4.0 * std::f64::consts::PI * t).powf(-0.5);
        assert_relative_eq!(v, free, max_relative = 1e-12);
    }

    #[test]
    fn semigroup_property_by_quadrature() {
        // K(t₁+t₂;x,y) = ∫ K(t₁;x,z) K(t₂;z,y) dz, 200-point midpoint rule.
        let g = geom(&[1.0]);
        let (t1, t2, x, y) = (0.4, 0.3, [0.3], [0.7]);
        let m = 200;
        let mut acc = 0.0;
        for k in 0..m {
            let z = [(k as f64 + 0.5) / m as f64];
            acc += heat_large(t1, &x, &z, &g, 30.0) * heat_large(t2, &z, &y, &g, 30.0);
        }
        acc /= m as f64;
        let direct = heat_large(t1 + t2, &x, &y, &g, 30.0);
        assert_relative_eq!(acc, direct, max_relative = 1e-6);
    }
}
