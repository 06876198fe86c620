//! Compactly supported C∞ test functions `(P/Qʲ)(t)·(1 − t²)^(−m)·exp(−λ/(1 − t²))`
//! in the normalized variable `t = (2x − a − b)/(b − a)`, closed under exact
//! differentiation and under products on a common support.
//!
//! Two-dimensional test functions are finite sums of products
//! `c·fx(x)·fy(y)`, which keeps `∂ = (∂ₓ − i∂ᵧ)/2` and `∂̄ = (∂ₓ + i∂ᵧ)/2` exact.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::poly::Poly;
use crate::quad::{self, pairwise_sum};

/// Highest derivative order supported by the exact recursion.
pub const MAX_ORDER: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TestFnError {
    #[error("invalid support ({a}, {b})")]
    InvalidInterval { a: f64, b: f64 },
    #[error("denominator vanishes on the support")]
    DenominatorRoot,
    #[error("derivative order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(usize),
    #[error("products need a common support: ({0}, {1}) vs ({2}, {3})")]
    SupportMismatch(f64, f64, f64, f64),
    #[error("jet interpolation is singular")]
    SingularJet,
}

pub type Result<T> = std::result::Result<T, TestFnError>;

#[derive(Debug, Clone, PartialEq)]
pub struct TestFn1D {
    a: f64,
    b: f64,
    num: Poly,
    den: Option<Poly>,
    den_power: u32,
    s_power: u32,
    lambda: f64,
    /// Number of x-derivatives already taken (bookkeeping for the cap).
    order: usize,
}

impl TestFn1D {
    /// Standard bump on `(a, b)`: `exp(−1/(1 − t²))`, equal to `e⁻¹` at the midpoint.
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        Self::with_rational(a, b, Poly::constant(1.0), None)
    }

    /// `(P/Q)(t)·exp(−1/(1 − t²))`; `Q` must not vanish on `[−1, 1]`.
    pub fn with_rational(a: f64, b: f64, num: Poly, den: Option<Poly>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(TestFnError::InvalidInterval { a, b });
        }
        if let Some(q) = &den {
            if q.is_zero() || has_root_on_unit_interval(q) {
                return Err(TestFnError::DenominatorRoot);
            }
        }
        Ok(TestFn1D {
            a,
            b,
            num,
            den,
            den_power: 1,
            s_power: 0,
            lambda: 1.0,
            order: 0,
        })
    }

    /// Polynomial in `x` times the standard bump on `(a, b)`; `coeffs` are
    /// ascending coefficients in `x`.
    pub fn poly_times_bump(a: f64, b: f64, coeffs: &[f64]) -> Result<Self> {
        let bump = Self::bump(a, b)?;
        let x = bump.x_poly();
        let mut p = Poly::zero();
        let mut xk = Poly::constant(1.0);
        for &c in coeffs {
            p = &p + &xk.scale(c);
            xk = &xk * &x;
        }
        Ok(TestFn1D { num: p, ..bump })
    }

    /// The zero function on `(a, b)`.
    pub fn zero(a: f64, b: f64) -> Result<Self> {
        Self::with_rational(a, b, Poly::zero(), None)
    }

    /// Polynomial-times-bump whose derivatives match prescribed jets:
    /// for each `(x, jet)`, `f^(k)(x) = jet[k]`. Used for test functions that
    /// are locally flat (`jet = [1, 0, 0, …]`) at chosen points.
    pub fn with_jet(a: f64, b: f64, jets: &[(f64, Vec<f64>)]) -> Result<Self> {
        let n: usize = jets.iter().map(|(_, j)| j.len()).sum();
        if jets.iter().any(|(_, j)| j.len() > MAX_ORDER + 1) {
            return Err(TestFnError::OrderTooLarge(MAX_ORDER + 1));
        }
        let bump = Self::bump(a, b)?;
        // column d: derivatives of tᵈ·bump at the jet points
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
        for d in 0..n {
            let basis = TestFn1D {
                num: Poly::monomial(d),
                ..bump.clone()
            };
            let mut col = Vec::with_capacity(n);
            for (x, jet) in jets {
                for k in 0..jet.len() {
                    col.push(basis.derivative(k)?.eval(*x));
                }
            }
            cols.push(col);
        }
        let rhs: Vec<f64> = jets.iter().flat_map(|(_, j)| j.iter().copied()).collect();
        let mat: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| cols[c][r]).collect()).collect();
        let coeffs = solve_real(mat, rhs).ok_or(TestFnError::SingularJet)?;
        Ok(TestFn1D {
            num: Poly(coeffs),
            ..bump
        })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `x` as a polynomial in the normalized variable.
    fn x_poly(&self) -> Poly {
        Poly::linear(0.5 * (self.a + self.b), 0.5 * (self.b - self.a))
    }

    fn to_t(&self, x: f64) -> f64 {
        (2.0 * x - self.a - self.b) / (self.b - self.a)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > self.a && x < self.b) || self.num.is_zero() {
            return 0.0;
        }
        let t = self.to_t(x);
        let s = (1.0 - t) * (1.0 + t);
        if s <= 0.0 {
            return 0.0;
        }
        let expo = -self.lambda / s - self.s_power as f64 * s.ln();
        if expo < -740.0 {
            return 0.0;
        }
        let mut v = self.num.eval(t) * expo.exp();
        if let Some(q) = &self.den {
            v /= q.eval(t).powi(self.den_power as i32);
        }
        v
    }

    pub fn eval_c(&self, x: f64) -> C64 {
        C64::new(self.eval(x), 0.0)
    }

    /// Exact `k`-th derivative in `x`.
    pub fn derivative(&self, k: usize) -> Result<Self> {
        if self.order + k > MAX_ORDER {
            return Err(TestFnError::OrderTooLarge(self.order + k));
        }
        let mut f = self.clone();
        for _ in 0..k {
            f = f.derivative_once();
        }
        Ok(f)
    }

    fn derivative_once(&self) -> Self {
        // d/dt [P Q^{-j} s^{-m} e^{-λ/s}], s = 1 − t², s' = −2t:
        //   Q^{-j-1} s^{-m-2} e^{-λ/s} [P'Q s² − jPQ' s² + 2mt P Q s − 2λ t P Q]
        let chain = 2.0 / (self.b - self.a);
        let s = Poly(vec![1.0, 0.0, -1.0]);
        let s2 = &s * &s;
        let t = Poly::monomial(1);
        let p = &self.num;
        let m = self.s_power as f64;
        let (q, qd, j) = match &self.den {
            Some(q) => (q.clone(), q.derivative(), self.den_power as f64),
            None => (Poly::constant(1.0), Poly::zero(), 0.0),
        };
        let term1 = &(&(&p.derivative() * &q) - &(p * &qd).scale(j)) * &s2;
        let term2 = &(&(&t * p) * &(&q * &s)).scale(2.0 * m);
        let term3 = (&(&t * p) * &q).scale(-2.0 * self.lambda);
        let num = (&(&term1 + term2) + &term3).scale(chain);
        TestFn1D {
            num,
            den: self.den.clone(),
            den_power: if self.den.is_some() { self.den_power + 1 } else { 1 },
            s_power: self.s_power + 2,
            order: self.order + 1,
            ..self.clone()
        }
    }

    /// Pointwise product; both factors must share the same support.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.a != other.a || self.b != other.b {
            return Err(TestFnError::SupportMismatch(self.a, self.b, other.a, other.b));
        }
        let (den, den_power) = match (&self.den, &other.den) {
            (None, None) => (None, 1),
            (Some(q), None) => (Some(q.clone()), self.den_power),
            (None, Some(q)) => (Some(q.clone()), other.den_power),
            (Some(q1), Some(q2)) if q1 == q2 => (Some(q1.clone()), self.den_power + other.den_power),
            (Some(q1), Some(q2)) => (
                Some(&q1.pow(self.den_power) * &q2.pow(other.den_power)),
                1,
            ),
        };
        Ok(TestFn1D {
            a: self.a,
            b: self.b,
            num: &self.num * &other.num,
            den,
            den_power,
            s_power: self.s_power + other.s_power,
            lambda: self.lambda + other.lambda,
            order: self.order.max(other.order),
        })
    }

    /// `x·f(x)`.
    pub fn times_x(&self) -> Self {
        TestFn1D {
            num: &self.num * &self.x_poly(),
            ..self.clone()
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        TestFn1D {
            num: self.num.scale(c),
            ..self.clone()
        }
    }

    /// `∫ f dx` by `n`-point Gauss–Legendre on the support.
    pub fn integral(&self, n: usize) -> f64 {
        let grid = quad::gauss_grid(self.a, self.b, n).expect("valid support");
        quad::integrate(|x| self.eval_c(x), &grid).expect("finite").re
    }
}

fn has_root_on_unit_interval(q: &Poly) -> bool {
    const SAMPLES: usize = 4096;
    let mut prev = q.eval(-1.0);
    if prev == 0.0 {
        return true;
    }
    for i in 1..=SAMPLES {
        let t = -1.0 + 2.0 * i as f64 / SAMPLES as f64;
        let v = q.eval(t);
        if v == 0.0 || v.signum() != prev.signum() {
            return true;
        }
        prev = v;
    }
    false
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_real(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    Some(x)
}

/// `max_{k ≤ m} max |f^(k)|` sampled on at least 2048 points of the support.
///
/// This is a lower bound of the true seminorm, adequate as a normalization scale.
pub fn norm_m(f: &TestFn1D, m: usize) -> Result<f64> {
    norm_m_sampled(f, m, 2048)
}

pub fn norm_m_sampled(f: &TestFn1D, m: usize, samples: usize) -> Result<f64> {
    let (a, b) = f.support();
    let mut best: f64 = 0.0;
    for k in 0..=m {
        let d = f.derivative(k)?;
        for i in 0..=samples {
            let x = a + (b - a) * i as f64 / samples as f64;
            best = best.max(d.eval(x).abs());
        }
    }
    Ok(best)
}

/// One product term `coeff·fx(x)·fy(y)` of a [`TestFn2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub coeff: C64,
    pub fx: TestFn1D,
    pub fy: TestFn1D,
}

/// Test function on ℂ ≅ ℝ², a finite sum of product terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFn2D {
    pub terms: Vec<ProductTerm>,
}

impl TestFn2D {
    pub fn product(fx: TestFn1D, fy: TestFn1D) -> Self {
        TestFn2D {
            terms: vec![ProductTerm {
                coeff: C64::new(1.0, 0.0),
                fx,
                fy,
            }],
        }
    }

    pub fn fx(&self) -> &TestFn1D {
        &self.terms[0].fx
    }

    pub fn fy(&self) -> &TestFn1D {
        &self.terms[0].fy
    }

    /// Bounding rectangle `((x0, x1), (y0, y1))` of all terms.
    pub fn support(&self) -> ((f64, f64), (f64, f64)) {
        let mut x = (f64::INFINITY, f64::NEG_INFINITY);
        let mut y = (f64::INFINITY, f64::NEG_INFINITY);
        for t in &self.terms {
            let (a, b) = t.fx.support();
            let (c, d) = t.fy.support();
            x = (x.0.min(a), x.1.max(b));
            y = (y.0.min(c), y.1.max(d));
        }
        (x, y)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.terms
            .iter()
            .map(|t| t.coeff * (t.fx.eval(z.re) * t.fy.eval(z.im)))
            .sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        TestFn2D {
            terms: self
                .terms
                .iter()
                .map(|t| ProductTerm {
                    coeff: t.coeff * c,
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TestFn2D { terms }
    }

    /// Mixed partial `∂ₓʲ ∂ᵧᵏ`.
    pub fn partial(&self, jx: usize, ky: usize) -> Result<Self> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(ProductTerm {
                    coeff: t.coeff,
                    fx: t.fx.derivative(jx)?,
                    fy: t.fy.derivative(ky)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TestFn2D { terms })
    }

    /// `∂ᵏ` with `∂ = (∂ₓ − i∂ᵧ)/2`.
    pub fn del(&self, k: usize) -> Result<Self> {
        self.wirtinger(k, -1.0)
    }

    /// `∂̄ᵏ` with `∂̄ = (∂ₓ + i∂ᵧ)/2`.
    pub fn del_bar(&self, k: usize) -> Result<Self> {
        self.wirtinger(k, 1.0)
    }

    fn wirtinger(&self, k: usize, sign: f64) -> Result<Self> {
        let mut terms = Vec::new();
        let scale = 0.5f64.powi(k as i32);
        let iu = C64::new(0.0, sign);
        for j in 0..=k {
            // C(k, j) ∂ₓʲ (±i∂ᵧ)^{k−j}
            let c = binomial(k, j) * scale;
            let factor = iu.powu((k - j) as u32) * c;
            for t in &self.terms {
                terms.push(ProductTerm {
                    coeff: t.coeff * factor,
                    fx: t.fx.derivative(j)?,
                    fy: t.fy.derivative(k - j)?,
                });
            }
        }
        Ok(TestFn2D { terms })
    }

    /// Value of `∂ᵏφ` at `z`.
    pub fn del_at(&self, k: usize, z: C64) -> Result<C64> {
        Ok(self.del(k)?.eval(z))
    }

    pub fn del_bar_at(&self, k: usize, z: C64) -> Result<C64> {
        Ok(self.del_bar(k)?.eval(z))
    }

    /// Pointwise product; product terms must pairwise share supports.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for o in &other.terms {
                terms.push(ProductTerm {
                    coeff: s.coeff * o.coeff,
                    fx: s.fx.product(&o.fx)?,
                    fy: s.fy.product(&o.fy)?,
                });
            }
        }
        Ok(TestFn2D { terms })
    }

    /// `z·φ(z)` with `z = x + iy`.
    pub fn times_z(&self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            terms.push(ProductTerm {
                coeff: t.coeff,
                fx: t.fx.times_x(),
                fy: t.fy.clone(),
            });
            terms.push(ProductTerm {
                coeff: t.coeff * C64::new(0.0, 1.0),
                fx: t.fx.clone(),
                fy: t.fy.times_x(),
            });
        }
        TestFn2D { terms }
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Polar-coordinate quadrature resolution for [`cauchy_transform`].
#[derive(Debug, Clone, Copy)]
pub struct PolarRule {
    pub n_theta: usize,
    pub n_rho: usize,
}

impl Default for PolarRule {
    fn default() -> Self {
        PolarRule {
            n_theta: 512,
            n_rho: 128,
        }
    }
}

/// `(𝔯 ∗ φ)(z) = ∬ φ(ζ)/(z − ζ) d²ζ`.
pub fn cauchy_transform(f: &TestFn2D, z: C64) -> C64 {
    cauchy_transform_with(f, z, PolarRule::default())
}

/// [`cauchy_transform`] with an explicit resolution. Integrates in polar
/// coordinates centered at `z`: with `ζ = z + ρe^{iθ}` the kernel times the
/// Jacobian is `−e^{−iθ}`, which is bounded.
pub fn cauchy_transform_with(f: &TestFn2D, z: C64, rule: PolarRule) -> C64 {
    let (t_ref, w_ref) = {
        let g = quad::gauss_grid(-1.0, 1.0, rule.n_rho).expect("valid order");
        (g.nodes, g.weights)
    };
    let mut total = C64::new(0.0, 0.0);
    for term in &f.terms {
        let (ax, bx) = term.fx.support();
        let (ay, by) = term.fy.support();
        let mut per_theta = Vec::with_capacity(rule.n_theta);
        for j in 0..rule.n_theta {
            let theta = 2.0 * PI * j as f64 / rule.n_theta as f64;
            let (c, s) = (theta.cos(), theta.sin());
            let Some((r0, r1)) = ray_box(z.re, z.im, c, s, (ax, bx), (ay, by)) else {
                per_theta.push(C64::new(0.0, 0.0));
                continue;
            };
            let half = 0.5 * (r1 - r0);
            let mid = 0.5 * (r1 + r0);
            let vals: Vec<C64> = t_ref
                .iter()
                .zip(&w_ref)
                .map(|(t, w)| {
                    let rho = mid + half * t;
                    C64::new(term.fx.eval(z.re + rho * c) * term.fy.eval(z.im + rho * s) * w * half, 0.0)
                })
                .collect();
            per_theta.push(pairwise_sum(&vals) * C64::new(-c, s));
        }
        total += term.coeff * pairwise_sum(&per_theta) * (2.0 * PI / rule.n_theta as f64);
    }
    total
}

/// Parameter range `[ρ0, ρ1] ⊂ [0, ∞)` where the ray `p + ρ(c, s)` is inside the box.
fn ray_box(px: f64, py: f64, c: f64, s: f64, xr: (f64, f64), yr: (f64, f64)) -> Option<(f64, f64)> {
    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for (p, d, (a, b)) in [(px, c, xr), (py, s, yr)] {
        if d.abs() < 1e-300 {
            if p <= a || p >= b {
                return None;
            }
        } else {
            let (t0, t1) = ((a - p) / d, (b - p) / d);
            lo = lo.max(t0.min(t1));
            hi = hi.min(t0.max(t1));
        }
    }
    (hi > lo).then_some((lo, hi))
}
