//! Rank-one perturbation `H = Ω + |g⟩⟨h|` of the multiplication operator on
//! `G = (−c, −1) ∪ (1, c)`.
//!
//! `g(y) = κ·g₀(|y|)` is even with `g₀` a test function supported in `[1, c]`,
//! and `h(y) = −g(y)` for `y > 1`, `h(y) = g(y)` for `y < −1`. The model is
//! discretized by a Gauss–Legendre rule on `(1, c)` mirrored to `(−c, −1)`,
//! so the discrete operator acts on `2n` samples with the weighted inner
//! product `⟨u|v⟩ = Σ wⱼ ū(ωⱼ) v(ωⱼ)`. Bras built from the real fields `g`,
//! `h` are bilinear: `⟨h|f⟩ = Σ wⱼ h(ωⱼ) f(ωⱼ)`.

mod checks;
mod eigen;
mod lowrank;

pub use checks::{CrosscheckRow, NonNormality};
pub use eigen::{
    BoundaryValue, Completeness, GramCheck, MuPairing, MultiplicativityCheck, Profile, Side,
};
pub use lowrank::LowRank;

use std::sync::{Arc, OnceLock};

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::quad::{self, Circle, QuadError};
use crate::testfn::{TestFn1D, TestFnError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KreinError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("z = {0} lies on the slits")]
    OnSlit(C64),
    #[error("z = {0} is a spectral point")]
    SpectralPoint(C64),
    #[error("C(0) = {c0:e} > 0 and C(1) = {c1:e} ≥ 0: zero location not covered")]
    RegimeUnsupported { c0: f64, c1: f64 },
    #[error("the model has no discrete spectrum")]
    NoDiscreteSpectrum,
    #[error("C(0) = {0:e} is not a double zero")]
    NotDoubleZero(f64),
    #[error("x = {0} is not inside G")]
    XOutsideG(f64),
    #[error("support ({0}, {1}) is not inside a single slit")]
    SupportViolation(f64, f64),
    #[error("contour radius {0} does not enclose the spectrum")]
    ContourHitsSpectrum(f64),
    #[error("vector length {got} does not match the grid size {expected}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    TestFn(#[from] TestFnError),
}

pub type Result<T> = std::result::Result<T, KreinError>;

/// Gauss order for continuum (profile-level) integrals such as `C₁(x)`.
pub const REFERENCE_ORDER: usize = 512;

/// Distance from the slits below which `z` counts as on them.
pub const SLIT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    ImaginaryPair,
    RealPair,
    DoubleZero,
    None,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::ImaginaryPair => "imaginary_pair",
            Regime::RealPair => "real_pair",
            Regime::DoubleZero => "double_zero",
            Regime::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub location: C64,
    pub multiplicity: usize,
}

/// Zeros of the characteristic function and the data used to classify them.
#[derive(Debug, Clone, PartialEq)]
pub struct CharFunction {
    pub regime: Regime,
    pub zeros: Vec<Zero>,
    /// `C(0)`
    pub at_zero: f64,
    /// `C(1)`
    pub at_one: f64,
    /// `max |C(z₀)|` over the located zeros.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct KreinModel {
    c: f64,
    kappa: f64,
    profile: TestFn1D,
    n: usize,
    nodes: Arc<[f64]>,
    weights: Arc<[f64]>,
    g: Vec<f64>,
    h: Vec<f64>,
    reference: Arc<quad::Grid>,
    reference_g2: Arc<[f64]>,
    node_boundary: OnceLock<Arc<Vec<BoundaryValue>>>,
}

impl KreinModel {
    /// Model with the standard bump on `(1, c)` as `g₀`.
    pub fn new(c: f64, kappa: f64, n: usize) -> Result<Self> {
        if !(c.is_finite() && c > 1.0) {
            return Err(KreinError::InvalidParams(format!("c = {c} must exceed 1")));
        }
        Self::with_profile(c, kappa, TestFn1D::bump(1.0, c)?, n)
    }

    /// Model with a caller-supplied `g₀` supported in `[1, c]`.
    pub fn with_profile(c: f64, kappa: f64, profile: TestFn1D, n: usize) -> Result<Self> {
        if !(c.is_finite() && c > 1.0) {
            return Err(KreinError::InvalidParams(format!("c = {c} must exceed 1")));
        }
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(KreinError::InvalidParams(format!("kappa = {kappa} must be ≥ 0")));
        }
        if n < 16 {
            return Err(KreinError::InvalidParams(format!("n = {n} must be ≥ 16")));
        }
        let (a, b) = profile.support();
        if a < 1.0 || b > c {
            return Err(KreinError::InvalidParams(format!(
                "profile support ({a}, {b}) is not inside (1, {c})"
            )));
        }
        let half = quad::gauss_grid(1.0, c, n)?;
        let mut nodes = Vec::with_capacity(2 * n);
        let mut weights = Vec::with_capacity(2 * n);
        for j in (0..n).rev() {
            nodes.push(-half.nodes[j]);
            weights.push(half.weights[j]);
        }
        nodes.extend_from_slice(&half.nodes);
        weights.extend_from_slice(&half.weights);
        let g: Vec<f64> = nodes.iter().map(|&y| kappa * profile.eval(y.abs())).collect();
        let h: Vec<f64> = nodes.iter().zip(&g).map(|(&y, &gy)| if y > 0.0 { -gy } else { gy }).collect();
        let reference = quad::gauss_grid(1.0, c, REFERENCE_ORDER)?;
        let reference_g2: Vec<f64> = reference
            .nodes
            .iter()
            .map(|&s| (kappa * profile.eval(s)).powi(2))
            .collect();
        Ok(KreinModel {
            c,
            kappa,
            profile,
            n,
            nodes: nodes.into(),
            weights: weights.into(),
            g,
            h,
            reference: Arc::new(reference),
            reference_g2: reference_g2.into(),
            node_boundary: OnceLock::new(),
        })
    }

    /// Same parameters on an `n`-point half grid.
    pub fn refined(&self, n: usize) -> Result<Self> {
        Self::with_profile(self.c, self.kappa, self.profile.clone(), n)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn profile(&self) -> &TestFn1D {
        &self.profile
    }

    /// Nodes per slit.
    pub fn half_len(&self) -> usize {
        self.n
    }

    /// Total number of grid samples, `2n`.
    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Ascending nodes on both slits; node `j` mirrors node `2n − 1 − j`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn weights_arc(&self) -> Arc<[f64]> {
        self.weights.clone()
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// `g` off the grid.
    pub fn g_at(&self, y: f64) -> f64 {
        if y.abs() <= 1.0 || y.abs() >= self.c {
            return 0.0;
        }
        self.kappa * self.profile.eval(y.abs())
    }

    /// `h` off the grid.
    pub fn h_at(&self, y: f64) -> f64 {
        if y > 0.0 {
            -self.g_at(y)
        } else {
            self.g_at(y)
        }
    }

    /// `true` if `x` is in the open set `G`.
    pub fn in_g(&self, x: f64) -> bool {
        x.abs() > 1.0 && x.abs() < self.c
    }

    fn check_len(&self, f: &[C64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(KreinError::Dimension {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(())
    }

    /// `⟨u|v⟩ = Σ w ū v`
    pub fn inner(&self, u: &[C64], v: &[C64]) -> C64 {
        let terms: Vec<C64> = u
            .iter()
            .zip(v)
            .zip(self.weights.iter())
            .map(|((a, b), w)| a.conj() * b * w)
            .collect();
        quad::pairwise_sum(&terms)
    }

    /// `Σ w u v`
    pub fn bilinear(&self, u: &[C64], v: &[C64]) -> C64 {
        let terms: Vec<C64> = u
            .iter()
            .zip(v)
            .zip(self.weights.iter())
            .map(|((a, b), w)| a * b * w)
            .collect();
        quad::pairwise_sum(&terms)
    }

    pub fn norm(&self, u: &[C64]) -> f64 {
        self.inner(u, u).re.max(0.0).sqrt()
    }

    /// Samples a function at the grid nodes.
    pub fn sample<F: Fn(f64) -> C64>(&self, f: F) -> Vec<C64> {
        self.nodes.iter().map(|&x| f(x)).collect()
    }

    fn real_vec(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    pub fn g_vec(&self) -> Vec<C64> {
        Self::real_vec(&self.g)
    }

    pub fn h_vec(&self) -> Vec<C64> {
        Self::real_vec(&self.h)
    }

    fn on_slit(&self, z: C64) -> bool {
        let dist_re = if z.re.abs() < 1.0 {
            1.0 - z.re.abs()
        } else if z.re.abs() > self.c {
            z.re.abs() - self.c
        } else {
            0.0
        };
        dist_re.hypot(z.im) < SLIT_TOLERANCE
    }

    /// Discrete characteristic function `C(z) = 1 − Σ w g h/(z − ω)`.
    pub fn char_eval(&self, z: C64) -> Result<C64> {
        if self.on_slit(z) {
            return Err(KreinError::OnSlit(z));
        }
        Ok(self.char_unchecked(z))
    }

    /// Even form over the right slit: `1 + Σ w 2y g²/(z² − y²)`.
    fn char_unchecked(&self, z: C64) -> C64 {
        let z2 = z * z;
        let terms: Vec<C64> = (self.n..2 * self.n)
            .map(|j| {
                let y = self.nodes[j];
                let g = self.g[j];
                (2.0 * y * g * g * self.weights[j]) / (z2 - y * y)
            })
            .collect();
        C64::new(1.0, 0.0) + quad::pairwise_sum(&terms)
    }

    /// `C′(z) = Σ w g h/(z − ω)²`.
    pub fn char_derivative(&self, z: C64) -> C64 {
        let terms: Vec<C64> = (0..self.len())
            .map(|j| {
                let d = z - self.nodes[j];
                (self.weights[j] * self.g[j] * self.h[j]) / (d * d)
            })
            .collect();
        quad::pairwise_sum(&terms)
    }

    /// Continuum `C(z) = 1 + ∫₁^c 2y g(y)²/(z² − y²) dy` on the reference rule,
    /// independent of the model grid. `z` must stay away from the slits.
    pub fn char_reference(&self, z: C64) -> Result<C64> {
        if self.on_slit(z) {
            return Err(KreinError::OnSlit(z));
        }
        let z2 = z * z;
        let terms: Vec<C64> = (0..self.reference.len())
            .map(|j| {
                let y = self.reference.nodes[j];
                C64::new(2.0 * y * self.reference_g2[j] * self.reference.weights[j], 0.0) / (z2 - y * y)
            })
            .collect();
        Ok(C64::new(1.0, 0.0) + quad::pairwise_sum(&terms))
    }

    /// `(C(0), C(1))` on the grid. `C(1)` is finite since `g` vanishes to all
    /// orders at the slit ends.
    pub fn edge_values(&self) -> (f64, f64) {
        (
            self.char_unchecked(C64::new(0.0, 0.0)).re,
            self.char_unchecked(C64::new(1.0, 0.0)).re,
        )
    }

    /// `κ*` with `C(0) = 0` for this profile: `1/√(∫₁^c 2g₀²/y dy)` on the grid.
    pub fn kappa_star(&self) -> f64 {
        let terms: Vec<f64> = (self.n..2 * self.n)
            .map(|j| {
                let g0 = self.profile.eval(self.nodes[j]);
                2.0 * g0 * g0 / self.nodes[j] * self.weights[j]
            })
            .collect();
        1.0 / quad::pairwise_sum_real(&terms).sqrt()
    }

    /// Classify the zero regime from the signs of `C(0)` and `C(1)` and locate
    /// the zeros by bisection followed by one Newton step.
    pub fn find_zeros(&self) -> Result<CharFunction> {
        let (c0, c1) = self.edge_values();
        let mut cf = CharFunction {
            regime: Regime::None,
            zeros: Vec::new(),
            at_zero: c0,
            at_one: c1,
            residual: 0.0,
        };
        if self.kappa == 0.0 {
            return Ok(cf);
        }
        let on_axis = |t: f64, imag: bool| {
            let z = if imag { C64::new(0.0, t) } else { C64::new(t, 0.0) };
            self.char_unchecked(z).re
        };
        if c0.abs() <= 1e-10 {
            cf.regime = Regime::DoubleZero;
            cf.zeros.push(Zero {
                location: C64::new(0.0, 0.0),
                multiplicity: 2,
            });
            cf.residual = c0.abs();
            return Ok(cf);
        }
        let (imag, lo, hi) = if c0 < 0.0 {
            // C(iu) increases in u; bound from C(iu) ≥ 1 − ∫2y g²/u²
            let g2: f64 = (self.n..2 * self.n)
                .map(|j| 2.0 * self.nodes[j] * self.g[j] * self.g[j] * self.weights[j])
                .sum();
            let mut u_max = (2.0 * g2).sqrt().max(1.0);
            while on_axis(u_max, true) <= 0.0 {
                u_max *= 2.0;
            }
            (true, 0.0, u_max)
        } else if c1 < 0.0 {
            (false, 0.0, 1.0)
        } else {
            return Err(KreinError::RegimeUnsupported { c0, c1 });
        };
        let increasing = imag;
        let (mut lo, mut hi) = (lo, hi);
        while hi - lo > 1e-13 * hi.max(1.0) {
            let mid = 0.5 * (lo + hi);
            let v = on_axis(mid, imag);
            if (v < 0.0) == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut t = 0.5 * (lo + hi);
        // Newton polish along the axis
        let z = if imag { C64::new(0.0, t) } else { C64::new(t, 0.0) };
        let dz = if imag { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
        let slope = (self.char_derivative(z) * dz).re;
        if slope != 0.0 {
            let step = on_axis(t, imag) / slope;
            if step.abs() < hi - lo + 1e-13 {
                t -= step;
            }
        }
        let z0 = if imag { C64::new(0.0, t) } else { C64::new(t, 0.0) };
        cf.regime = if imag {
            Regime::ImaginaryPair
        } else {
            Regime::RealPair
        };
        cf.zeros = vec![
            Zero {
                location: z0,
                multiplicity: 1,
            },
            Zero {
                location: -z0,
                multiplicity: 1,
            },
        ];
        cf.residual = self
            .char_unchecked(z0)
            .norm()
            .max(self.char_unchecked(-z0).norm());
        Ok(cf)
    }

    /// `(Hf)(ω) = ωf(ω) + g(ω)⟨h|f⟩`.
    pub fn apply_h(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.check_len(f)?;
        let hf = self.bilinear(&self.h_vec(), f);
        Ok((0..self.len())
            .map(|j| f[j] * self.nodes[j] + hf * self.g[j])
            .collect())
    }

    /// `(H*f)(ω) = ωf(ω) + h(ω)⟨g|f⟩`, adjoint for the weighted inner product.
    pub fn apply_h_adjoint(&self, f: &[C64]) -> Result<Vec<C64>> {
        self.check_len(f)?;
        let gf = self.bilinear(&self.g_vec(), f);
        Ok((0..self.len())
            .map(|j| f[j] * self.nodes[j] + gf * self.h[j])
            .collect())
    }

    /// `R(z)f = f/(z − ω) + g/(z − ω)·⟨h|R_Ω(z)f⟩/C(z)` (Krein's formula).
    pub fn resolvent_apply(&self, z: C64, f: &[C64]) -> Result<Vec<C64>> {
        self.check_len(f)?;
        if self.on_slit(z) {
            return Err(KreinError::OnSlit(z));
        }
        let cz = self.char_unchecked(z);
        if cz.norm() < 1e-13 {
            return Err(KreinError::SpectralPoint(z));
        }
        let rf: Vec<C64> = (0..self.len()).map(|j| f[j] / (z - self.nodes[j])).collect();
        let coupling = self.bilinear(&self.h_vec(), &rf) / cz;
        Ok((0..self.len())
            .map(|j| rf[j] + coupling * self.g[j] / (z - self.nodes[j]))
            .collect())
    }

    /// `‖(z − H)R(z)f − f‖/‖f‖`.
    pub fn resolvent_residual(&self, z: C64, f: &[C64]) -> Result<f64> {
        let rf = self.resolvent_apply(z, f)?;
        let hrf = self.apply_h(&rf)?;
        let res: Vec<C64> = (0..self.len()).map(|j| rf[j] * z - hrf[j] - f[j]).collect();
        Ok(self.norm(&res) / self.norm(f))
    }

    /// `‖R(z₁)f − R(z₂)f − (z₂ − z₁)R(z₁)R(z₂)f‖/‖R(z₁)f‖`.
    pub fn resolvent_equation_residual(&self, z1: C64, z2: C64, f: &[C64]) -> Result<f64> {
        if z1 == z2 {
            return Ok(0.0);
        }
        let r1 = self.resolvent_apply(z1, f)?;
        let r2 = self.resolvent_apply(z2, f)?;
        let r12 = self.resolvent_apply(z1, &r2)?;
        let res: Vec<C64> = (0..self.len())
            .map(|j| r1[j] - r2[j] - r12[j] * (z2 - z1))
            .collect();
        Ok(self.norm(&res) / self.norm(&r1))
    }

    /// `(1/2πi)∮ q(z) R(z)f dz` on `circle`.
    pub fn contour_apply<Q: Fn(C64) -> C64>(&self, circle: &Circle, q: Q, f: &[C64]) -> Result<Vec<C64>> {
        self.check_len(f)?;
        let err = std::cell::RefCell::new(None);
        let out = quad::contour_integral(
            |z| match self.resolvent_apply(z, f) {
                Ok(v) => {
                    let s = q(z);
                    v.into_iter().map(|x| x * s).collect()
                }
                Err(e) => {
                    err.borrow_mut().get_or_insert(e);
                    vec![C64::new(0.0, 0.0); f.len()]
                }
            },
            circle,
        )?;
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(out),
        }
    }

    /// Residues `r_± = |g/(±z₀ − ω)⟩⟨h/(±z₀ − ω)|/C′(±z₀)` at a simple pair,
    /// or the Jordan data `(a, p)` at a double zero.
    pub fn discrete_spectrum(&self, cf: &CharFunction) -> Result<DiscreteSpectrum> {
        match cf.regime {
            Regime::ImaginaryPair | Regime::RealPair => self.residues(cf),
            Regime::DoubleZero => self.double_zero_data(),
            Regime::None => Err(KreinError::NoDiscreteSpectrum),
        }
    }

    pub fn residues(&self, cf: &CharFunction) -> Result<DiscreteSpectrum> {
        if !matches!(cf.regime, Regime::ImaginaryPair | Regime::RealPair) {
            return Err(KreinError::NoDiscreteSpectrum);
        }
        let mut residues = Vec::new();
        let mut points = Vec::new();
        for zero in &cf.zeros {
            let z0 = zero.location;
            let ket: Vec<C64> = (0..self.len()).map(|j| self.g[j] / (z0 - self.nodes[j])).collect();
            let scale = self.char_derivative(z0);
            let bra: Vec<C64> = (0..self.len())
                .map(|j| self.h[j] / (z0 - self.nodes[j]) / scale)
                .collect();
            residues.push(LowRank::rank_one(self.weights_arc(), ket, bra));
            points.push(z0);
        }
        Ok(DiscreteSpectrum {
            regime: cf.regime,
            points,
            residues,
            jordan: None,
        })
    }

    /// Jordan data at a double zero `C(0) = 0`:
    /// `a = |Ω⁻¹g⟩⟨hΩ⁻¹|/D`, `p = (|Ω⁻²g⟩⟨hΩ⁻¹| + |Ω⁻¹g⟩⟨hΩ⁻²|)/D`,
    /// `D = ⟨h|Ω⁻³|g⟩`.
    pub fn double_zero_data(&self) -> Result<DiscreteSpectrum> {
        let (c0, _) = self.edge_values();
        if self.kappa == 0.0 || c0.abs() > 1e-10 {
            return Err(KreinError::NotDoubleZero(c0));
        }
        let inv = |k: i32| -> (Vec<C64>, Vec<C64>) {
            let ket = (0..self.len())
                .map(|j| C64::new(self.g[j] * self.nodes[j].powi(-k), 0.0))
                .collect();
            let bra = (0..self.len())
                .map(|j| C64::new(self.h[j] * self.nodes[j].powi(-k), 0.0))
                .collect();
            (ket, bra)
        };
        let (g1, h1) = inv(1);
        let (g2, h2) = inv(2);
        let d_terms: Vec<f64> = (0..self.len())
            .map(|j| self.weights[j] * self.h[j] * self.g[j] * self.nodes[j].powi(-3))
            .collect();
        let d = quad::pairwise_sum_real(&d_terms);
        let scaled = |v: &[C64]| v.iter().map(|x| x / d).collect::<Vec<_>>();
        let w = self.weights_arc();
        let a = LowRank::rank_one(w.clone(), g1.clone(), scaled(&h1));
        let p = LowRank {
            weights: w,
            terms: vec![(g2, scaled(&h1)), (g1, scaled(&h2))],
        };
        Ok(DiscreteSpectrum {
            regime: Regime::DoubleZero,
            points: vec![C64::new(0.0, 0.0)],
            residues: Vec::new(),
            jordan: Some(JordanData { a, p }),
        })
    }
}

#[derive(Debug, Clone)]
pub struct JordanData {
    pub a: LowRank,
    pub p: LowRank,
}

#[derive(Debug, Clone)]
pub struct DiscreteSpectrum {
    pub regime: Regime,
    pub points: Vec<C64>,
    /// `r_+`, `r_−` in the order of `points`.
    pub residues: Vec<LowRank>,
    pub jordan: Option<JordanData>,
}

impl DiscreteSpectrum {
    /// Sum of the discrete projectors: `r_+ + r_−`, or `p` at a double zero.
    pub fn projector_apply(&self, f: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        let ops: Vec<&LowRank> = match &self.jordan {
            Some(j) => vec![&j.p],
            None => self.residues.iter().collect(),
        };
        for op in ops {
            for (o, v) in out.iter_mut().zip(op.apply(f)) {
                *o += v;
            }
        }
        out
    }
}
