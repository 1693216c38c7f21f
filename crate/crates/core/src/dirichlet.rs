//! Certified evaluation of the split Dirichlet kernel.
//!
//! The kernel D_s(x,y) of 𝒜^{-s} splits at a Mellin cut T:
//!
//!   D_s^(>) = (2^d / Πaᵢ Γ(s)) Σ_n ω_n^{-2s} Γ(s, ω_n²T) C_n(x,y),
//!   D_s^(<) = (T^{s-d/2} / ((4π)^{d/2} Γ(s))) Σ_{h,l} δ_l 𝒫_{s-d/2}(b_hl/T),
//!
//! each truncated at shell radius N with an explicit remainder radius built
//! from the tail-bound family H_N^{(d)}. The sum D^(>)+D^(<) is T-independent
//! within the certified radii. D^(>) is entire in s; the only singularities
//! live in D^(<) (diagonal, s = d/2) and its second derivatives (diagonal,
//! s = d/2 + 1).

use num_complex::Complex64;

use crate::boxmodel::{
    b_hl, b_hl_d1, b_hl_d2, c_n_deriv, classify_zero, l_for_each, omega_sq, shell_for_each,
    BoxGeometry, ImageIndex, ShellKind,
};
use crate::certified::{CAccum, CertifiedValue};
use crate::error::{Error, Result};
use crate::specfun::{cpow, p_func, recip_gamma, upper_gamma, upper_gamma_re};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    /// Mellin cut T.
    pub t_cut: f64,
    /// Shell radius N.
    pub n_shell: f64,
    /// Bound-splitting parameter α ∈ (0,1).
    pub alpha: f64,
}

impl TruncationParams {
    pub fn new(t_cut: f64, n_shell: f64, alpha: f64) -> Result<Self> {
        if !(t_cut > 0.0) {
            return Err(Error::Domain(format!("Mellin cut T = {t_cut} must be > 0")));
        }
        if !(n_shell > 0.0) {
            return Err(Error::Domain(format!("shell radius N = {n_shell} must be > 0")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!("alpha = {alpha} must lie in (0,1)")));
        }
        Ok(TruncationParams { t_cut, n_shell, alpha })
    }

    /// Default α: 0.03 for d=1, 0.04 otherwise.
    pub fn default_alpha(d: usize) -> f64 {
        if d == 1 {
            0.03
        } else {
            0.04
        }
    }

    pub fn with_n(&self, n_shell: f64) -> Self {
        TruncationParams { n_shell, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichPoint {
    X,
    Y,
}

/// Selects a second mixed derivative ∂_z ∂_w with z, w each one coordinate
/// of x or y (axes 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivSelector {
    pub first: (WhichPoint, usize),
    pub second: (WhichPoint, usize),
}

impl DerivSelector {
    pub fn xy(axis_x: usize, axis_y: usize) -> Self {
        DerivSelector { first: (WhichPoint::X, axis_x), second: (WhichPoint::Y, axis_y) }
    }

    pub fn xx(axis_i: usize, axis_j: usize) -> Self {
        DerivSelector { first: (WhichPoint::X, axis_i), second: (WhichPoint::X, axis_j) }
    }

    fn validate(&self, d: usize) -> Result<()> {
        if self.first.1 >= d || self.second.1 >= d {
            return Err(Error::Domain(format!("derivative axes out of range for d={d}")));
        }
        Ok(())
    }

    fn same_axis(&self) -> bool {
        self.first.1 == self.second.1
    }
}

/// Tail bound H_N^{(d)}(α, β; σ, ρ): an explicit upper bound for lattice-sum
/// tails past shell radius N, decaying like e^{-βN²}.
pub fn h_bound(d: usize, n: f64, alpha: f64, beta: f64, sigma: f64, rho: f64) -> Result<f64> {
    let df = d as f64;
    let sqrt_d = df.sqrt();
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("h_bound: beta = {beta} must be > 0")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("h_bound: alpha = {alpha} not in (0,1)")));
    }
    if n <= 2.0 * sqrt_d {
        return Err(Error::Domain(format!("h_bound: N = {n} must exceed 2√d = {}", 2.0 * sqrt_d)));
    }
    if rho > 0.0 {
        let thr = 2.0 * sqrt_d + (rho / (2.0 * alpha * beta)).sqrt();
        if n <= thr {
            return Err(Error::Domain(format!(
                "h_bound: rho = {rho} > 0 requires N > 2√d + sqrt(rho/(2αβ)) = {thr}, got {n}"
            )));
        }
    }
    let z1 = (1.0 - alpha) * beta * n * n;
    let z2 = alpha * beta * (n - 2.0 * sqrt_d).powi(2);
    let g1 = upper_gamma_re(sigma, z1)?;
    let g2 = upper_gamma_re(0.5 * (df + rho), z2)?;
    let gamma_half_d = crate::specfun::gamma(Complex64::new(0.5 * df, 0.0))?.re;
    let pref = std::f64::consts::PI.powf(0.5 * df)
        / ((1.0 - alpha).powf(sigma) * (alpha * beta).powf(0.5 * (df + rho)) * gamma_half_d);
    let geo = ((n - sqrt_d) / (n - 2.0 * sqrt_d)).powf(df - 1.0);
    Ok((pref * geo * g1 * g2).max(0.0))
}

/// C_{a,A}^{(d)}(σ, N) = max[(a(1-√d/N))^{2σ}, (A(1+√d/N))^{2σ}].
pub fn c_const(g: &BoxGeometry, sigma: f64, n: f64) -> f64 {
    let sqrt_d = (g.d() as f64).sqrt();
    assert!(n > sqrt_d, "c_const requires N > √d");
    let lo = g.a_min() * (1.0 - sqrt_d / n);
    let hi = g.a_max() * (1.0 + sqrt_d / n);
    lo.powf(2.0 * sigma).max(hi.powf(2.0 * sigma))
}

fn max_pow(g: &BoxGeometry, expnt: f64) -> f64 {
    g.a_min().powf(expnt).max(g.a_max().powf(expnt))
}

fn check_point(g: &BoxGeometry, x: &[f64], y: &[f64]) -> Result<()> {
    if !g.contains(x) || !g.contains(y) {
        return Err(Error::Domain("points must lie in the closed box".into()));
    }
    Ok(())
}

/// D_s^(>)(x,y), truncated, with certified remainder radius. Entire in s.
pub fn d_sup(
    s: Complex64,
    x: &[f64],
    y: &[f64],
    g: &BoxGeometry,
    tp: &TruncationParams,
) -> Result<CertifiedValue> {
    check_point(g, x, y)?;
    let d = g.d();
    let sigma = s.re;
    let radius = {
        let beta = std::f64::consts::PI.powi(2) * tp.t_cut / g.a_max().powi(2);
        let h = h_bound(d, tp.n_shell, tp.alpha, beta, sigma, -2.0 * sigma)?;
        max_pow(g, 2.0 * sigma) / (g.volume() * std::f64::consts::PI.powf(2.0 * sigma))
            * recip_gamma(s).norm()
            * h
    };
    let orders = vec![(0u8, 0u8); d];
    let value = sup_series(s, x, y, g, tp, &orders)?;
    Ok(CertifiedValue::new(value, radius))
}

fn sup_series(
    s: Complex64,
    x: &[f64],
    y: &[f64],
    g: &BoxGeometry,
    tp: &TruncationParams,
    orders: &[(u8, u8)],
) -> Result<Complex64> {
    let d = g.d();
    let rg = recip_gamma(s);
    if rg.norm() == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut acc = CAccum::new();
    let mut err: Option<Error> = None;
    shell_for_each(d, ShellKind::PositiveOrthant, tp.n_shell, |n| {
        if err.is_some() {
            return;
        }
        let w2 = omega_sq(n, g);
        let z = w2 * tp.t_cut;
        if z > 760.0 {
            return;
        }
        let cn = c_n_deriv(n, x, y, g, orders);
        if cn == 0.0 {
            return;
        }
        match upper_gamma(s, z) {
            Ok(gam) => acc.add(cpow(w2, -s) * gam * cn),
            Err(e) => err = Some(e),
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let pref = 2f64.powi(d as i32) / g.volume();
    Ok(pref * rg * acc.value())
}

/// ∂_z ∂_w D_s^(>)(x,y), truncated, with certified radius.
pub fn d_sup_deriv(
    s: Complex64,
    sel: &DerivSelector,
    x: &[f64],
    y: &[f64],
    g: &BoxGeometry,
    tp: &TruncationParams,
) -> Result<CertifiedValue> {
    check_point(g, x, y)?;
    sel.validate(g.d())?;
    let d = g.d();
    let sigma = s.re;
    let radius = {
        let beta = std::f64::consts::PI.powi(2) * tp.t_cut / g.a_max().powi(2);
        let h = h_bound(d, tp.n_shell, tp.alpha, beta, sigma, 2.0 * (1.0 - sigma))?;
        max_pow(g, 2.0 * sigma)
            / (g.volume() * g.a_min().powi(2) * std::f64::consts::PI.powf(2.0 * (sigma - 1.0)))
            * recip_gamma(s).norm()
            * h
    };
    let mut orders = vec![(0u8, 0u8); d];
    for &(which, axis) in [&sel.first, &sel.second] {
        match which {
            WhichPoint::X => orders[axis].0 += 1,
            WhichPoint::Y => orders[axis].1 += 1,
        }
    }
    let value = sup_series(s, x, y, g, tp, &orders)?;
    Ok(CertifiedValue::new(value, radius))
}

fn inf_beta(g: &BoxGeometry, tp: &TruncationParams) -> f64 {
    let sqrt_d = (g.d() as f64).sqrt();
    (g.a_min() * (1.0 - sqrt_d / tp.n_shell)).powi(2) / tp.t_cut
}

/// D_s^(<)(x,y), truncated, with certified radius.
/// PoleError on the diagonal at s = d/2.
pub fn d_inf(
    s: Complex64,
    x: &[f64],
    y: &[f64],
    g: &BoxGeometry,
    tp: &TruncationParams,
) -> Result<CertifiedValue> {
    check_point(g, x, y)?;
    let d = g.d();
    let df = d as f64;
    let on_diagonal = x == y;
    if on_diagonal && s == Complex64::new(0.5 * df, 0.0) {
        return Err(Error::pole(s, "d_inf on the diagonal"));
    }
    let sigma = s.re;
    let sqrt_d = df.sqrt();
    if sigma > 0.5 * df {
        let thr = 3.0 * sqrt_d + ((sigma - 0.5 * df) * tp.t_cut / tp.alpha).sqrt() / g.a_min();
        if tp.n_shell <= thr {
            return Err(Error::Domain(format!(
                "d_inf: Re s = {sigma} > d/2 requires N > {thr}, got {}",
                tp.n_shell
            )));
        }
    }
    let radius = c_const(g, sigma - 0.5 * df, tp.n_shell) / std::f64::consts::PI.powf(0.5 * df)
        * recip_gamma(s).norm()
        * h_bound(d, tp.n_shell, tp.alpha, inf_beta(g, tp), 0.5 * df - sigma, 2.0 * sigma - df)?;

    let sd = s - 0.5 * df;
    let rg = recip_gamma(s);
    let mut acc = CAccum::new();
    let mut err: Option<Error> = None;
    shell_for_each(d, ShellKind::FullLattice, tp.n_shell, |h| {
        l_for_each(d, |l| {
            if err.is_some() {
                return;
            }
            let idx = ImageIndex { h: h.to_vec(), l: l.to_vec() };
            if classify_zero(&idx, x, y, g) {
                // 𝒫_{s-d/2}(0) = 1/(s-d/2), the continuation branch.
                acc.add(idx.delta() / sd);
                return;
            }
            let beta = b_hl(&idx, x, y, g) / tp.t_cut;
            if beta > 760.0 {
                return;
            }
            match p_func(sd, beta) {
                Ok(p) => acc.add(idx.delta() * p),
                Err(e) => err = Some(e),
            }
        });
    });
    if let Some(e) = err {
        return Err(e);
    }
    let pref = cpow(tp.t_cut, sd) / (4.0 * std::f64::consts::PI).powf(0.5 * df);
    Ok(CertifiedValue::new(pref * rg * acc.value(), radius))
}

/// ∂_z ∂_w D_s^(<)(x,y), truncated, with certified radius.
/// PoleError on the diagonal at s = d/2 + 1 for equal-axis selectors.
pub fn d_inf_deriv(
    s: Complex64,
    sel: &DerivSelector,
    x: &[f64],
    y: &[f64],
    g: &BoxGeometry,
    tp: &TruncationParams,
) -> Result<CertifiedValue> {
    check_point(g, x, y)?;
    sel.validate(g.d())?;
    let d = g.d();
    let df = d as f64;
    let on_diagonal = x == y;
    if on_diagonal && sel.same_axis() && s == Complex64::new(0.5 * df + 1.0, 0.0) {
        return Err(Error::pole(s, "d_inf_deriv on the diagonal"));
    }
    let sigma = s.re;
    let sqrt_d = df.sqrt();
    if sigma > 0.5 * df + 1.0 {
        let thr =
            3.0 * sqrt_d + ((sigma - 0.5 * df - 1.0) * tp.t_cut / tp.alpha).sqrt() / g.a_min();
        if tp.n_shell <= thr {
            return Err(Error::Domain(format!(
                "d_inf_deriv: Re s = {sigma} > d/2+1 requires N > {thr}, got {}",
                tp.n_shell
            )));
        }
    }
    let beta_b = inf_beta(g, tp);
    let radius = {
        let n = tp.n_shell;
        let first = (1.0 + sqrt_d / n).powi(2)
            * g.a_max().powi(2)
            * c_const(g, sigma - 0.5 * df - 2.0, n)
            * h_bound(d, n, tp.alpha, beta_b, 0.5 * df + 2.0 - sigma, 2.0 * sigma - df - 2.0)?;
        let second = if sel.same_axis() {
            0.5 * c_const(g, sigma - 0.5 * df - 1.0, n)
                * h_bound(d, n, tp.alpha, beta_b, 0.5 * df + 1.0 - sigma, 2.0 * sigma - df - 2.0)?
        } else {
            0.0
        };
        (first + second) / std::f64::consts::PI.powf(0.5 * df) * recip_gamma(s).norm()
    };

    let sd = s - 0.5 * df;
    let rg = recip_gamma(s);
    let t = tp.t_cut;
    let (wy1, ax1) = (sel.first.0 == WhichPoint::Y, sel.first.1);
    let (wy2, ax2) = (sel.second.0 == WhichPoint::Y, sel.second.1);
    let mut acc = CAccum::new();
    let mut err: Option<Error> = None;
    shell_for_each(d, ShellKind::FullLattice, tp.n_shell, |h| {
        l_for_each(d, |l| {
            if err.is_some() {
                return;
            }
            let idx = ImageIndex { h: h.to_vec(), l: l.to_vec() };
            let d2b = b_hl_d2(&idx, ax1, wy1, ax2, wy2);
            if classify_zero(&idx, x, y, g) {
                // First-derivative factors vanish on zero-b terms; only the
                // -T 𝒫_{s-d/2-1}(0) ∂_zw b piece survives.
                if d2b != 0.0 {
                    acc.add(idx.delta() * (-t * d2b) / (sd - 1.0));
                }
                return;
            }
            let beta = b_hl(&idx, x, y, g) / t;
            if beta > 760.0 {
                return;
            }
            let dzb = b_hl_d1(&idx, ax1, wy1, x, y, g);
            let dwb = b_hl_d1(&idx, ax2, wy2, x, y, g);
            let p2 = match p_func(sd - 2.0, beta) {
                Ok(p) => p,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            };
            let p1 = match p_func(sd - 1.0, beta) {
                Ok(p) => p,
                Err(e) => {
                    err = Some(e);
                    return;
                }
            };
            acc.add(idx.delta() * (p2 * dzb * dwb - t * p1 * d2b));
        });
    });
    if let Some(e) = err {
        return Err(e);
    }
    let pref = cpow(t, sd - 2.0) / (4.0 * std::f64::consts::PI).powf(0.5 * df);
    Ok(CertifiedValue::new(pref * rg * acc.value(), radius))
}

/// Full kernel D_s = D^(>) + D^(<) as a certified value.
pub fn d_full(
    s: Complex64,
    x: &[f64],
    y: &[f64],
    g: &BoxGeometry,
    tp: &TruncationParams,
) -> Result<CertifiedValue> {
    Ok(d_sup(s, x, y, g, tp)? + d_inf(s, x, y, g, tp)?)
}

/// Full second derivative ∂_z∂_w D_s as a certified value.
pub fn d_full_deriv(
    s: Complex64,
    sel: &DerivSelector,
    x: &[f64],
    y: &[f64],
    g: &BoxGeometry,
    tp: &TruncationParams,
) -> Result<CertifiedValue> {
    Ok(d_sup_deriv(s, sel, x, y, g, tp)? + d_inf_deriv(s, sel, x, y, g, tp)?)
}
