//! Box geometry, eigendata and lattice enumeration.
//!
//! The box is Ω = ×ᵢ (0, aᵢ). Eigenmodes are indexed by n ∈ ℕ^d with
//! ω_n² = Σᵢ nᵢ²π²/aᵢ², eigenfunction products C_n(x,y) = Πᵢ sin(nᵢπyⁱ/aᵢ)
//! sin(nᵢπxⁱ/aᵢ). The method-of-images representation is indexed by
//! (h,l) ∈ ℤ^d × {1,2}^d with signs δ_l = Π δ_{lᵢ} (δ₁ = +1, δ₂ = -1) and
//! exponents b_hl(x,y) = Σᵢ aᵢ²(hᵢ - U_{lᵢ}(xⁱ,yⁱ))², where
//! U₁ = (x-y)/(2aᵢ), U₂ = (x+y)/(2aᵢ).

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoxGeometry {
    sides: Vec<f64>,
}

impl BoxGeometry {
    pub fn new(sides: Vec<f64>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::Domain("box needs at least one side".into()));
        }
        if sides.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::Domain(format!("all sides must be positive: {sides:?}")));
        }
        Ok(BoxGeometry { sides })
    }

    pub fn d(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[f64] {
        &self.sides
    }

    pub fn side(&self, i: usize) -> f64 {
        self.sides[i]
    }

    /// Smallest side a.
    pub fn a_min(&self) -> f64 {
        self.sides.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Largest side A.
    pub fn a_max(&self) -> f64 {
        self.sides.iter().cloned().fold(0.0, f64::max)
    }

    pub fn volume(&self) -> f64 {
        self.sides.iter().product()
    }

    /// Is x inside the open box?
    pub fn is_interior(&self, x: &[f64]) -> bool {
        x.len() == self.d() && x.iter().zip(&self.sides).all(|(&xi, &ai)| xi > 0.0 && xi < ai)
    }

    /// Is x inside the closed box?
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.d() && x.iter().zip(&self.sides).all(|(&xi, &ai)| (0.0..=ai).contains(&xi))
    }

    /// Geometry with axis `p` moved to the front (for side-1-specific formulas).
    pub fn permuted_front(&self, p: usize) -> BoxGeometry {
        let mut sides = Vec::with_capacity(self.d());
        sides.push(self.sides[p]);
        for (i, &a) in self.sides.iter().enumerate() {
            if i != p {
                sides.push(a);
            }
        }
        BoxGeometry { sides }
    }
}

/// A side π_{p,λ} of the box: the face xᵖ = λ·aₚ (axis 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideId {
    pub axis: usize,
    pub lambda: u8,
}

impl SideId {
    pub fn new(axis: usize, lambda: u8, d: usize) -> Result<Self> {
        if axis >= d || lambda > 1 {
            return Err(Error::Domain(format!(
                "side (axis={axis}, lambda={lambda}) invalid for d={d}"
            )));
        }
        Ok(SideId { axis, lambda })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeIndex {
    pub n: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageIndex {
    pub h: Vec<i64>,
    /// Entries in {1,2}.
    pub l: Vec<u8>,
}

impl ImageIndex {
    pub fn delta(&self) -> f64 {
        let neg = self.l.iter().filter(|&&li| li == 2).count();
        if neg % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

pub fn omega_sq(n: &[i64], g: &BoxGeometry) -> f64 {
    let pi = std::f64::consts::PI;
    n.iter()
        .zip(g.sides())
        .map(|(&ni, &ai)| {
            let k = ni as f64 * pi / ai;
            k * k
        })
        .sum()
}

pub fn c_n(n: &[i64], x: &[f64], y: &[f64], g: &BoxGeometry) -> f64 {
    c_n_deriv(n, x, y, g, &vec![(0u8, 0u8); g.d()])
}

/// C_n with per-axis derivative orders (order in xⁱ, order in yⁱ), each ≤ 2.
pub(crate) fn c_n_deriv(n: &[i64], x: &[f64], y: &[f64], g: &BoxGeometry, orders: &[(u8, u8)]) -> f64 {
    let pi = std::f64::consts::PI;
    let mut prod = 1.0;
    for i in 0..g.d() {
        let k = n[i] as f64 * pi / g.side(i);
        let f = |theta: f64, order: u8| match order {
            0 => theta.sin(),
            1 => k * theta.cos(),
            2 => -k * k * theta.sin(),
            _ => unreachable!("derivative order > 2"),
        };
        prod *= f(k * x[i], orders[i].0) * f(k * y[i], orders[i].1);
    }
    prod
}

pub(crate) fn u_l(l: u8, x: f64, y: f64, a: f64) -> f64 {
    match l {
        1 => (x - y) / (2.0 * a),
        2 => (x + y) / (2.0 * a),
        _ => unreachable!("l must be 1 or 2"),
    }
}

pub fn b_hl(idx: &ImageIndex, x: &[f64], y: &[f64], g: &BoxGeometry) -> f64 {
    let mut b = 0.0;
    for i in 0..g.d() {
        let a = g.side(i);
        let t = a * (idx.h[i] as f64 - u_l(idx.l[i], x[i], y[i], a));
        b += t * t;
    }
    b
}

/// Exact (structural) detection of b_hl = 0: for every axis one of
///   (hᵢ=0, lᵢ=1, yⁱ=xⁱ), (hᵢ=0, lᵢ=2, yⁱ=xⁱ=0), (hᵢ=1, lᵢ=2, yⁱ=xⁱ=aᵢ)
/// must hold, decided by exact coordinate comparison.
pub fn classify_zero(idx: &ImageIndex, x: &[f64], y: &[f64], g: &BoxGeometry) -> bool {
    (0..g.d()).all(|i| {
        let (h, l, xi, yi, ai) = (idx.h[i], idx.l[i], x[i], y[i], g.side(i));
        (h == 0 && l == 1 && yi == xi)
            || (h == 0 && l == 2 && xi == 0.0 && yi == 0.0)
            || (h == 1 && l == 2 && xi == ai && yi == ai)
    })
}

/// First derivative of b_hl in xⁱ (`wrt_y = false`) or yⁱ (`wrt_y = true`).
pub(crate) fn b_hl_d1(idx: &ImageIndex, axis: usize, wrt_y: bool, x: &[f64], y: &[f64], g: &BoxGeometry) -> f64 {
    let a = g.side(axis);
    let c = a * (idx.h[axis] as f64 - u_l(idx.l[axis], x[axis], y[axis], a));
    if wrt_y {
        if idx.l[axis] == 1 {
            c
        } else {
            -c
        }
    } else {
        -c
    }
}

/// Second mixed derivative of b_hl; nonzero only for equal axes:
/// ∂²_{xx} = ∂²_{yy} = 1/2, ∂²_{xy} = -δ_{lᵢ}/2.
pub(crate) fn b_hl_d2(idx: &ImageIndex, axis_i: usize, wrt_y_i: bool, axis_j: usize, wrt_y_j: bool) -> f64 {
    if axis_i != axis_j {
        return 0.0;
    }
    if wrt_y_i == wrt_y_j {
        0.5
    } else {
        let delta_li = if idx.l[axis_i] == 1 { 1.0 } else { -1.0 };
        -delta_li * 0.5
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShellKind {
    /// n ∈ ℕ^d (all components ≥ 1).
    PositiveOrthant,
    /// h ∈ ℤ^d (zero included).
    FullLattice,
}

/// Visit every tuple with Euclidean norm ≤ n_max in lexicographic order.
pub(crate) fn shell_for_each<F: FnMut(&[i64])>(d: usize, kind: ShellKind, n_max: f64, mut f: F) {
    let n2 = n_max * n_max;
    let mut tuple = vec![0i64; d];
    fn rec<F: FnMut(&[i64])>(
        tuple: &mut Vec<i64>,
        level: usize,
        d: usize,
        kind: ShellKind,
        rem2: f64,
        f: &mut F,
    ) {
        if level == d {
            f(tuple);
            return;
        }
        let m = rem2.max(0.0).sqrt().floor() as i64;
        let lo = match kind {
            ShellKind::PositiveOrthant => 1,
            ShellKind::FullLattice => -m,
        };
        for v in lo..=m {
            let v2 = (v * v) as f64;
            if v2 > rem2 {
                continue;
            }
            tuple[level] = v;
            rec(tuple, level + 1, d, kind, rem2 - v2, f);
        }
    }
    rec(&mut tuple, 0, d, kind, n2, &mut f);
}

/// Materialized shell, deterministic lexicographic order.
pub fn enumerate_shell(d: usize, kind: ShellKind, n_max: f64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    shell_for_each(d, kind, n_max, |t| out.push(t.to_vec()));
    out
}

/// Visit all 2^d tuples l ∈ {1,2}^d in lexicographic order.
pub(crate) fn l_for_each<F: FnMut(&[u8])>(d: usize, mut f: F) {
    let mut l = vec![1u8; d];
    for mask in 0..(1u64 << d) {
        for (i, li) in l.iter_mut().enumerate() {
            *li = if mask & (1 << (d - 1 - i)) != 0 { 2 } else { 1 };
        }
        f(&l);
    }
}

/// One entry per p-element subset S of the axes, with product 𝔞_S = Π_{i∈S} aᵢ.
///
/// Replaces the symmetric-group sums: once h is summed over ℤ^p,
/// Σ_{σ∈S_d} 𝔞_{σ,p} f(B_{σ,p}) / ((d-p)! p!) = Σ_{|S|=p} 𝔞_S f(B_S).
pub fn subset_coefficients(g: &BoxGeometry, p: usize) -> Vec<(f64, Vec<usize>)> {
    assert!(p <= g.d(), "subset size {p} > dimension {}", g.d());
    let mut out = Vec::new();
    let mut sel = Vec::with_capacity(p);
    fn rec(g: &BoxGeometry, p: usize, start: usize, sel: &mut Vec<usize>, out: &mut Vec<(f64, Vec<usize>)>) {
        if sel.len() == p {
            let prod = sel.iter().map(|&i| g.side(i)).product();
            out.push((prod, sel.clone()));
            return;
        }
        for i in start..g.d() {
            sel.push(i);
            rec(g, p, i + 1, sel, out);
            sel.pop();
        }
    }
    rec(g, p, 0, &mut sel, &mut out);
    out
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
    fn omega_sq_examples() {
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        assert_relative_eq!(omega_sq(&[1], &geom(&[std::f64::consts::PI])), 1.0, max_relative = 1e-15);
        assert_relative_eq!(omega_sq(&[1, 1], &geom(&[1.0, 1.0])), 2.0 * pi2, max_relative = 1e-15);
        assert_relative_eq!(
            omega_sq(&[2, 3], &geom(&[1.0, 5.0])),
            4.0 * pi2 + 9.0 * pi2 / 25.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn omega_sq_sandwich() {
        let mut rng = StdRng::seed_from_u64(7);
        let g = geom(&[0.8, 2.5, 1.1]);
        let (a, aa) = (g.a_min(), g.a_max());
        let pi2 = std::f64::consts::PI * std::f64::consts::PI;
        for _ in 0..200 {
            let n: Vec<i64> = (0..3).map(|_| rng.gen_range(1..20)).collect();
            let norm2: f64 = n.iter().map(|&v| (v * v) as f64).sum();
            let w2 = omega_sq(&n, &g);
            assert!(pi2 / (aa * aa) * norm2 <= w2 * (1.0 + 1e-12));
            assert!(w2 <= pi2 / (a * a) * norm2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn c_n_examples_and_bound() {
        let g1 = geom(&[1.0]);
        assert_eq!(c_n(&[3], &[0.0], &[0.4], &g1), 0.0);
        assert_relative_eq!(c_n(&[1], &[0.5], &[0.5], &g1), 1.0, max_relative = 1e-14);
        let g2 = geom(&[1.0, 2.0]);
        assert_relative_eq!(c_n(&[1, 1], &[0.5, 1.0], &[0.5, 1.0], &g2), 1.0, max_relative = 1e-14);
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..200 {
            let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0)];
            let y = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0)];
            let n = [rng.gen_range(1..15), rng.gen_range(1..15)];
            assert!(c_n(&n, &x, &y, &g2).abs() <= 1.0 + 1e-14);
        }
    }

    #[test]
    fn b_hl_examples() {
        let g1 = geom(&[1.0]);
        let idx = ImageIndex { h: vec![0], l: vec![1] };
        assert_eq!(b_hl(&idx, &[0.3], &[0.3], &g1), 0.0);
        let idx = ImageIndex { h: vec![1], l: vec![2] };
        assert_eq!(b_hl(&idx, &[1.0], &[1.0], &g1), 0.0);
        let g2 = geom(&[1.0, 1.0]);
        let idx = ImageIndex { h: vec![1, 0], l: vec![1, 1] };
        assert_relative_eq!(b_hl(&idx, &[0.3, 0.4], &[0.3, 0.4], &g2), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn classify_zero_cases() {
        let g2 = geom(&[1.0, 0.7]);
        let x = [0.2, 0.35];
        let on = ImageIndex { h: vec![0, 0], l: vec![1, 1] };
        assert!(classify_zero(&on, &x, &x, &g2));
        assert_eq!(b_hl(&on, &x, &x, &g2), 0.0);
        let y = [0.2, 0.36];
        assert!(!classify_zero(&on, &x, &y, &g2));
        // Corner (0, a₂) with the case-2/case-3 pattern.
        let corner = [0.0, 0.7];
        let idx = ImageIndex { h: vec![0, 1], l: vec![2, 2] };
        assert!(classify_zero(&idx, &corner, &corner, &g2));
        assert_eq!(b_hl(&idx, &corner, &corner, &g2), 0.0);
    }

    #[test]
    fn classify_zero_agrees_with_b_on_samples() {
        // Structural zero ⇔ numerically zero, over all small (h,l) at exact points.
        let g2 = geom(&[1.0, 0.5]);
        let points: Vec<[f64; 2]> = vec![[0.25, 0.25], [0.0, 0.25], [1.0, 0.5], [0.0, 0.0]];
        for x in &points {
            shell_for_each(2, ShellKind::FullLattice, 3.0, |h| {
                l_for_each(2, |l| {
                    let idx = ImageIndex { h: h.to_vec(), l: l.to_vec() };
                    let b = b_hl(&idx, x, x, &g2);
                    assert_eq!(classify_zero(&idx, x, x, &g2), b == 0.0, "h={h:?} l={l:?} x={x:?}");
                });
            });
        }
    }

    #[test]
    fn b_sandwich_on_diagonal() {
        // a²(1-√d/N)²|h|² ≤ b_hl ≤ A²(1+√d/N)²|h|² for |h| > N > √d.
        let mut rng = StdRng::seed_from_u64(3);
        let g = geom(&[0.9, 1.7]);
        let (a, aa) = (g.a_min(), g.a_max());
        let d = 2.0_f64;
        let n = 4.0;
        for _ in 0..500 {
            let x = [rng.gen_range(0.0..0.9), rng.gen_range(0.0..1.7)];
            let h = [rng.gen_range(-12i64..=12), rng.gen_range(-12i64..=12)];
            let norm: f64 = (h.iter().map(|&v| (v * v) as f64).sum::<f64>()).sqrt();
            if norm <= n {
                continue;
            }
            l_for_each(2, |l| {
                let idx = ImageIndex { h: h.to_vec(), l: l.to_vec() };
                let b = b_hl(&idx, &x, &x, &g);
                let lo = a * a * (1.0 - d.sqrt() / n).powi(2) * norm * norm;
                let hi = aa * aa * (1.0 + d.sqrt() / n).powi(2) * norm * norm;
                assert!(lo <= b * (1.0 + 1e-12) && b <= hi * (1.0 + 1e-12), "h={h:?} l={l:?}");
            });
        }
    }

    #[test]
    fn b_derivatives_match_finite_differences() {
        let g = geom(&[1.0, 1.4]);
        let idx = ImageIndex { h: vec![2, -1], l: vec![1, 2] };
        let x = [0.3, 0.9];
        let y = [0.55, 0.2];
        let h = 1e-6;
        for axis in 0..2 {
            for wrt_y in [false, true] {
                let mut xp = x;
                let mut xm = x;
                let mut yp = y;
                let mut ym = y;
                if wrt_y {
                    yp[axis] += h;
                    ym[axis] -= h;
                } else {
                    xp[axis] += h;
                    xm[axis] -= h;
                }
                let fd = (b_hl(&idx, &xp, &yp, &g) - b_hl(&idx, &xm, &ym, &g)) / (2.0 * h);
                let an = b_hl_d1(&idx, axis, wrt_y, &x, &y, &g);
                assert_relative_eq!(fd, an, max_relative = 1e-6);
            }
        }
        // Second derivatives are constants ±1/2 on-axis, 0 off-axis.
        assert_eq!(b_hl_d2(&idx, 0, false, 0, false), 0.5);
        assert_eq!(b_hl_d2(&idx, 0, false, 0, true), -0.5); // l₁=1
        assert_eq!(b_hl_d2(&idx, 1, false, 1, true), 0.5); // l₂=2
        assert_eq!(b_hl_d2(&idx, 0, false, 1, true), 0.0);
    }

    #[test]
    fn shell_examples() {
        assert_eq!(
            enumerate_shell(1, ShellKind::PositiveOrthant, 3.5),
            vec![vec![1], vec![2], vec![3]]
        );
        assert_eq!(
            enumerate_shell(2, ShellKind::FullLattice, 1.0),
            vec![vec![-1, 0], vec![0, -1], vec![0, 0], vec![0, 1], vec![1, 0]]
        );
        let s = enumerate_shell(2, ShellKind::PositiveOrthant, 2.9);
        assert_eq!(s, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        // Brute-force cross-check of the same shell.
        let mut brute = Vec::new();
        for i in 1..=3i64 {
            for j in 1..=3i64 {
                if ((i * i + j * j) as f64).sqrt() <= 2.9 {
                    brute.push(vec![i, j]);
                }
            }
        }
        assert_eq!(s, brute);
    }

    #[test]
    fn positive_orthant_is_restriction_of_full() {
        for n_max in [1.0, 2.5, 4.0] {
            let full: Vec<_> = enumerate_shell(3, ShellKind::FullLattice, n_max)
                .into_iter()
                .filter(|t| t.iter().all(|&v| v > 0))
                .collect();
            assert_eq!(full, enumerate_shell(3, ShellKind::PositiveOrthant, n_max));
        }
    }

    #[test]
    fn subset_coefficients_examples() {
        let g = geom(&[1.0, 5.0]);
        let p1 = subset_coefficients(&g, 1);
        assert_eq!(p1, vec![(1.0, vec![0]), (5.0, vec![1])]);
        let p2 = subset_coefficients(&g, 2);
        assert_eq!(p2, vec![(5.0, vec![0, 1])]);
        let g3 = geom(&[2.0, 3.0, 4.0]);
        let mut prods: Vec<f64> = subset_coefficients(&g3, 2).iter().map(|e| e.0).collect();
        prods.sort_by(f64::total_cmp);
        assert_eq!(prods, vec![6.0, 8.0, 12.0]);
    }

    #[test]
    fn subset_form_equals_permutation_sum() {
        // Σ_{σ∈S_d} 𝔞_{σ,p} f(B-data of σ) / ((d-p)! p!) = Σ_{|S|=p} 𝔞_S f(B-data of S)
        // for f depending symmetrically on the chosen side multiset.
        fn permutations(v: &[usize]) -> Vec<Vec<usize>> {
            if v.len() <= 1 {
                return vec![v.to_vec()];
            }
            let mut out = Vec::new();
            for (i, &x) in v.iter().enumerate() {
                let mut rest = v.to_vec();
                rest.remove(i);
                for mut p in permutations(&rest) {
                    p.insert(0, x);
                    out.push(p);
                }
            }
            out
        }
        fn factorial(n: usize) -> f64 {
            (1..=n).map(|k| k as f64).product::<f64>().max(1.0)
        }
        let mut rng = StdRng::seed_from_u64(11);
        for d in 1..=4usize {
            let sides: Vec<f64> = (0..d).map(|_| rng.gen_range(0.5..2.0)).collect();
            let g = BoxGeometry::new(sides).unwrap();
            // f: symmetric test function of the selected side lengths.
            let f = |sel: &mut Vec<f64>| -> f64 {
                sel.sort_by(f64::total_cmp);
                sel.iter().enumerate().map(|(k, a)| (k as f64 + 0.3) * a.cos()).sum()
            };
            let axes: Vec<usize> = (0..d).collect();
            for p in 0..=d {
                let mut perm_sum = 0.0;
                for sigma in permutations(&axes) {
                    let prod: f64 = sigma[..p].iter().map(|&i| g.side(i)).product();
                    let mut sel: Vec<f64> = sigma[..p].iter().map(|&i| g.side(i)).collect();
                    perm_sum += prod * f(&mut sel);
                }
                perm_sum /= factorial(d - p) * factorial(p);
                let mut subset_sum = 0.0;
                for (prod, sel) in subset_coefficients(&g, p) {
                    let mut lens: Vec<f64> = sel.iter().map(|&i| g.side(i)).collect();
                    subset_sum += prod * f(&mut lens);
                }
                assert!((perm_sum - subset_sum).abs() <= 1e-12 * perm_sum.abs().max(1.0), "d={d} p={p}");
            }
        }
    }
}
