//! Small dense linear algebra for the 2x2 complex generators.
//!
//! Everything here is closed-form: eigenvalues from the quadratic formula
//! and the matrix exponential from the trace/traceless split
//!
//! ```text
//! A = α I + B,  α = tr(A)/2,  B² = μ² I,  μ² = ((a-d)/2)² + bc
//! e^{At} = e^{αt} [cosh(μt) I + sinh(μt)/μ · B]
//! ```
//!
//! evaluated as half-sums of e^{(α±μ)t} so nothing overflows for strongly
//! damped systems, with a power series for |μt| → 0 so the defective
//! (exceptional-point) case μ = 0 is handled without a branch in the
//! eigenbasis.

use num_complex::Complex64;

/// Complex 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

/// Series switch for sinh(z)/z and cosh(z); |z| below this uses the series.
const SERIES_CUTOFF: f64 = 1e-5;

impl Mat2 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.a * v[0] + self.b * v[1],
            self.c * v[0] + self.d * v[1],
        ]
    }

    /// Eigenvalues (α + μ, α − μ); μ is one branch of sqrt(μ²).
    pub fn eigenvalues(&self) -> (Complex64, Complex64) {
        let alpha = (self.a + self.d) * 0.5;
        let mu = (((self.a - self.d) * 0.5).powi(2) + self.b * self.c).sqrt();
        (alpha + mu, alpha - mu)
    }

    /// Largest real part among the eigenvalues (slowest decay for Hurwitz
    /// generators).
    pub fn slowest_decay(&self) -> f64 {
        let (l1, l2) = self.eigenvalues();
        l1.re.max(l2.re)
    }

    /// exp(self * t), exact up to round-off for any t.
    pub fn exp_scaled(&self, t: f64) -> Mat2 {
        let alpha = (self.a + self.d) * 0.5;
        let beta = (self.a - self.d) * 0.5; // B = [[β, b], [c, −β]]
        let mu = (beta * beta + self.b * self.c).sqrt();
        let z = mu * t;
        let (ch, shc) = if z.norm() < SERIES_CUTOFF {
            // cosh(z) and t·sinh(z)/z by series, scaled by e^{αt}
            let ea = (alpha * t).exp();
            let z2 = z * z;
            (
                ea * (1.0 + z2 * 0.5 + z2 * z2 / 24.0),
                ea * t * (1.0 + z2 / 6.0 + z2 * z2 / 120.0),
            )
        } else {
            let ep = ((alpha + mu) * t).exp();
            let em = ((alpha - mu) * t).exp();
            ((ep + em) * 0.5, (ep - em) / (mu * 2.0))
        };
        Mat2::new(
            ch + shc * beta,
            shc * self.b,
            shc * self.c,
            ch - shc * beta,
        )
    }
}
