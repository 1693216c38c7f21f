//! Values paired with a rigorous truncation-remainder radius.
//!
//! Arithmetic is sub-additive in the radius: |f+g - (F+G)| ≤ r_f + r_g when
//! |f-F| ≤ r_f and |g-G| ≤ r_g. The radius covers series truncation only;
//! special-function evaluation error (≲1e-13 relative) is documented as a
//! caveat, and an outward 1e-14 relative inflation is applied once at the
//! final combination step of each observable (`inflated`). A radius of
//! `f64::INFINITY` means "no bound available for these parameters".

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifiedValue {
    pub value: Complex64,
    pub radius: f64,
}

impl CertifiedValue {
    pub fn new(value: Complex64, radius: f64) -> Self {
        debug_assert!(radius >= 0.0 || radius.is_nan());
        CertifiedValue { value, radius }
    }

    pub fn exact(value: Complex64) -> Self {
        CertifiedValue { value, radius: 0.0 }
    }

    pub fn exact_re(value: f64) -> Self {
        Self::exact(Complex64::new(value, 0.0))
    }

    pub fn zero() -> Self {
        Self::exact(Complex64::new(0.0, 0.0))
    }

    pub fn re(&self) -> f64 {
        self.value.re
    }

    /// Multiply by a complex constant; the radius scales by its modulus.
    pub fn scaled(&self, c: Complex64) -> Self {
        CertifiedValue::new(self.value * c, self.radius * c.norm())
    }

    pub fn scaled_re(&self, c: f64) -> Self {
        CertifiedValue::new(self.value * c, self.radius * c.abs())
    }

    /// Outward rounding applied once per observable: a 1e-14 relative
    /// inflation that keeps the quasi-rigorous radius honest against the
    /// double-precision floor of the summation itself.
    pub fn inflated(&self) -> Self {
        CertifiedValue::new(self.value, self.radius + 1e-14 * self.value.norm())
    }

    /// Same value with the radius replaced.
    pub fn with_radius(&self, radius: f64) -> Self {
        CertifiedValue::new(self.value, radius)
    }

    /// Do the certified intervals (as complex disks) intersect?
    pub fn overlaps(&self, other: &CertifiedValue) -> bool {
        (self.value - other.value).norm() <= self.radius + other.radius
    }
}

impl std::ops::Add for CertifiedValue {
    type Output = CertifiedValue;
    fn add(self, rhs: CertifiedValue) -> CertifiedValue {
        CertifiedValue::new(self.value + rhs.value, self.radius + rhs.radius)
    }
}

impl std::ops::Sub for CertifiedValue {
    type Output = CertifiedValue;
    fn sub(self, rhs: CertifiedValue) -> CertifiedValue {
        CertifiedValue::new(self.value - rhs.value, self.radius + rhs.radius)
    }
}

/// Neumaier-compensated accumulator for deterministic, low-error summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    pub fn new() -> Self {
        Accum::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise compensated accumulator for complex sums.
#[derive(Debug, Clone, Copy, Default)]
pub struct CAccum {
    re: Accum,
    im: Accum,
}

impl CAccum {
    pub fn new() -> Self {
        CAccum::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}
