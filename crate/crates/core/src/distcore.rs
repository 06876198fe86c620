//! One-variable distributions (δ and its derivatives, principal values
//! `P/x^{k+1}`, boundary values `1/(x ± i0)`) and numerical checks of the
//! kernel identities built from them: the Plemelj limit, `∂̄(1/z) = πδ`, the
//! jump formula for `∂̄F`, and the product rule for two principal values.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::quad::{self, QuadError};
use crate::testfn::{self, TestFn1D, TestFn2D, TestFnError, MAX_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("derivative order {0} exceeds the test-function cap")]
    UnsupportedOrder(usize),
    #[error("bad u sequence: {0}")]
    BadSequence(&'static str),
    #[error("the origin is not in the interior of the support")]
    OriginOutside,
    #[error("ω = {0} lies on a support boundary")]
    OmegaOutside(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    TestFn(#[from] TestFnError),
}

pub type Result<T> = std::result::Result<T, DistError>;

/// Gauss order used when smearing against a test function's support.
pub const SMEAR_ORDER: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `x + i0`
    Plus,
    /// `x − i0`
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }
}

pub type SmoothKernel = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
pub enum Dist1D {
    /// `δ^(k)(x − x₀)`
    Delta { x0: f64, order: usize },
    /// `P/(x − x₀)^power`, `power ≥ 1`
    PvPower { x0: f64, power: usize },
    /// `1/(x − x₀ ± i0)`
    Boundary { x0: f64, side: Side },
    /// Locally integrable function.
    Smooth(SmoothKernel),
}

impl fmt::Debug for Dist1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dist1D::Delta { x0, order } => write!(f, "Delta({x0}, {order})"),
            Dist1D::PvPower { x0, power } => write!(f, "PvPower({x0}, {power})"),
            Dist1D::Boundary { x0, side } => write!(f, "Boundary({x0}, {side:?})"),
            Dist1D::Smooth(_) => write!(f, "Smooth(..)"),
        }
    }
}

impl Dist1D {
    pub fn delta(x0: f64) -> Self {
        Dist1D::Delta { x0, order: 0 }
    }

    pub fn pv(x0: f64) -> Self {
        Dist1D::PvPower { x0, power: 1 }
    }

    pub fn boundary(x0: f64, side: Side) -> Self {
        Dist1D::Boundary { x0, side }
    }

    /// Evaluate the distribution on `φ`.
    pub fn apply(&self, phi: &TestFn1D) -> Result<C64> {
        match self {
            Dist1D::Delta { x0, order } => {
                if *order > MAX_ORDER {
                    return Err(DistError::UnsupportedOrder(*order));
                }
                let d = phi.derivative(*order)?;
                let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
                Ok(C64::new(sign * d.eval(*x0), 0.0))
            }
            Dist1D::PvPower { x0, power } => {
                let k = power.saturating_sub(1);
                if *power == 0 || k > MAX_ORDER {
                    return Err(DistError::UnsupportedOrder(k));
                }
                // ⟨P/x^{k+1}, φ⟩ = (1/k!)⟨P/x, φ^(k)⟩
                let d = phi.derivative(k)?;
                let fact: f64 = (1..=k).map(|i| i as f64).product();
                Ok(pv_smear(&d, *x0)? / fact)
            }
            Dist1D::Boundary { x0, side } => {
                let pv = pv_smear(phi, *x0)?;
                Ok(pv - C64::new(0.0, side.sign() * PI * phi.eval(*x0)))
            }
            Dist1D::Smooth(f) => {
                let (a, b) = phi.support();
                let grid = quad::gauss_grid(a, b, SMEAR_ORDER)?;
                Ok(quad::integrate(|x| f(x) * phi.eval(x), &grid)?)
            }
        }
    }
}

/// `⟨P/(x − x₀), φ⟩`, an ordinary integral when `x₀` is off the support.
pub fn pv_smear(phi: &TestFn1D, x0: f64) -> Result<C64> {
    let (a, b) = phi.support();
    let grid = quad::gauss_grid(a, b, SMEAR_ORDER)?;
    let f = |x: f64| phi.eval_c(x);
    let values: Vec<C64> = grid.nodes.iter().map(|&x| f(x)).collect();
    Ok(quad::cauchy_pv_on(&f, &values, x0, &grid)?)
}

/// `∫ φ(x)/(x − x₀ + iu) dx`, resolved near the pole by a graded composite rule.
pub fn regularized_smear(phi: &TestFn1D, x0: f64, u: f64) -> Result<C64> {
    let (a, b) = phi.support();
    let grid = quad::graded_grid(a, b, x0, 0.5 * u.abs(), 20)?;
    Ok(quad::integrate(|x| phi.eval_c(x) / C64::new(x - x0, u), &grid)?)
}

/// Geometric schedule `u_j = 2^{−j}`, `j = first..=last`, with sign `side`.
pub fn u_schedule(first: i32, last: i32, side: Side) -> Vec<f64> {
    (first..=last).map(|j| side.sign() * 2f64.powi(-j)).collect()
}

fn validate_sequence(us: &[f64]) -> Result<Side> {
    if us.len() < 4 {
        return Err(DistError::BadSequence("need at least four values"));
    }
    if us.iter().any(|u| *u == 0.0 || !u.is_finite()) {
        return Err(DistError::BadSequence("values must be finite and nonzero"));
    }
    let side = if us[0] > 0.0 { Side::Plus } else { Side::Minus };
    if us.iter().any(|u| (u.signum() > 0.0) != (side == Side::Plus)) {
        return Err(DistError::BadSequence("mixed signs"));
    }
    if us.windows(2).any(|w| w[1].abs() >= w[0].abs()) {
        return Err(DistError::BadSequence("not strictly decreasing in magnitude"));
    }
    Ok(side)
}

#[derive(Debug, Clone)]
pub struct PlemeljLimit {
    pub side: Side,
    pub values: Vec<C64>,
    pub extrapolated: C64,
    /// Smallest empirical convergence order over the last four samples.
    pub order: f64,
}

/// Values of `T_u(φ) = ∫ φ(x)/(x + iu) dx` along `u_sequence` and their
/// extrapolation to `u → ±0`.
pub fn plemelj_limit(phi: &TestFn1D, u_sequence: &[f64]) -> Result<PlemeljLimit> {
    plemelj_limit_at(phi, 0.0, u_sequence)
}

/// As [`plemelj_limit`] with the pole at `x₀`.
pub fn plemelj_limit_at(phi: &TestFn1D, x0: f64, u_sequence: &[f64]) -> Result<PlemeljLimit> {
    let side = validate_sequence(u_sequence)?;
    let values = u_sequence
        .iter()
        .map(|&u| regularized_smear(phi, x0, u))
        .collect::<Result<Vec<_>>>()?;
    let extrapolated = quad::richardson_u_log(u_sequence, &values);
    let order = empirical_order(u_sequence, &values, extrapolated);
    Ok(PlemeljLimit {
        side,
        values,
        extrapolated,
        order,
    })
}

/// Minimum of `log(e_j/e_{j+1})/log(u_j/u_{j+1})` over the last four samples.
pub fn empirical_order(us: &[f64], values: &[C64], limit: C64) -> f64 {
    let k = us.len();
    let start = k.saturating_sub(4);
    let mut order = f64::INFINITY;
    for j in start..k - 1 {
        let e0 = (values[j] - limit).norm();
        let e1 = (values[j + 1] - limit).norm();
        if e1 == 0.0 || e0 == 0.0 {
            continue;
        }
        order = order.min((e0 / e1).ln() / (us[j] / us[j + 1]).abs().ln());
    }
    order
}

#[derive(Debug, Clone, Copy)]
pub struct IdentityCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub defect: f64,
}

fn origin_inside(phi: &TestFn2D) -> bool {
    let ((x0, x1), (y0, y1)) = phi.support();
    x0 < 0.0 && 0.0 < x1 && y0 < 0.0 && 0.0 < y1
}

/// `−∬ (1/z)(∂̄φ)(z) d²z` against `πφ(0)`.
pub fn dbar_identity_check(phi: &TestFn2D) -> Result<IdentityCheck> {
    if !origin_inside(phi) {
        return Err(DistError::OriginOutside);
    }
    let dbar = phi.del_bar(1)?;
    // cauchy_transform at 0 is ∬ ψ/(0 − ζ) = −∬ ψ/ζ
    let lhs = testfn::cauchy_transform(&dbar, C64::new(0.0, 0.0));
    let rhs = phi.eval(C64::new(0.0, 0.0)) * PI;
    Ok(IdentityCheck {
        lhs,
        rhs,
        defect: (lhs - rhs).norm() / rhs.norm().max(1.0),
    })
}

/// Strip half-widths `ε_k = 10⁻³·2^{−k}`, `k = 0..4`.
pub const STRIP_WIDTHS: [f64; 5] = [1e-3, 5e-4, 2.5e-4, 1.25e-4, 6.25e-5];

/// Checks `∂̄F = (i/2)(F(x + i0) − F(x − i0))δ(y)` smeared against `φ`.
///
/// `f` is `F` off the real axis; `jump` pairs the boundary jump
/// `F(x + i0) − F(x − i0)` (possibly a distribution) with a test function on ℝ.
/// The left side `−∬_{|y|>ε} F ∂̄φ` is extrapolated over [`STRIP_WIDTHS`].
pub fn jump_formula_check(
    f: &(dyn Fn(C64) -> C64 + Sync),
    jump: &dyn Fn(&TestFn1D) -> Result<C64>,
    phi: &TestFn2D,
) -> Result<IdentityCheck> {
    let dbar = phi.del_bar(1)?;
    let mut strip_values = Vec::with_capacity(STRIP_WIDTHS.len());
    for &eps in &STRIP_WIDTHS {
        let mut total = C64::new(0.0, 0.0);
        for term in &dbar.terms {
            let (ax, bx) = term.fx.support();
            let (ay, by) = term.fy.support();
            let inner = |y: f64| {
                let fy = term.fy.eval(y);
                if fy == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let g = |x: f64| f(C64::new(x, y)) * term.fx.eval(x);
                quad::adaptive_integrate(&g, ax, bx, 1e-12) * fy
            };
            let mut part = C64::new(0.0, 0.0);
            if by > eps {
                part += quad::adaptive_integrate(&inner, ay.max(eps), by, 1e-11);
            }
            if ay < -eps {
                part += quad::adaptive_integrate(&inner, ay, by.min(-eps), 1e-11);
            }
            if !(part.re.is_finite() && part.im.is_finite()) {
                return Err(QuadError::NonfiniteValue { at: C64::new(0.0, eps) }.into());
            }
            total -= term.coeff * part;
        }
        strip_values.push(total);
    }
    let lhs = quad::polynomial_extrapolate(&STRIP_WIDTHS, &strip_values);
    let mut rhs = C64::new(0.0, 0.0);
    for term in &phi.terms {
        let fy0 = term.fy.eval(0.0);
        if fy0 != 0.0 {
            rhs += term.coeff * fy0 * jump(&term.fx)?;
        }
    }
    rhs *= C64::new(0.0, 0.5);
    let scale = rhs.norm().max(1.0);
    Ok(IdentityCheck {
        lhs,
        rhs,
        defect: (lhs - rhs).norm() / scale,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct Lemma11Check {
    /// `PV₁·PV₂`
    pub lhs: C64,
    /// Extrapolated regularized double integral minus the cross terms.
    pub rhs: C64,
    /// `u → 0` limit of the grouped double integral.
    pub grouped_limit: C64,
    /// `u → 0` limit of the factorized product `T₁(u)T₂(u)`.
    pub product_limit: C64,
    pub defect: f64,
}

/// Default `u` schedule for [`lemma11_check`]: `2^{−j}`, `j = 4..=14`.
pub fn lemma11_schedule() -> Vec<f64> {
    u_schedule(4, 14, Side::Plus)
}

/// Checks `P/(x−ω)·P/(y−ω) = P/(y−x)[P/(x−ω) − P/(y−ω)] + π²δ(x−ω)δ(y−ω)`
/// smeared against `φ₁(x)φ₂(y)`.
///
/// The double integral is regularized with `+iu`, evaluated in the grouped
/// form `[1/(x−ω+iu) − 1/(y−ω+iu)]/(y−x)` by 2-D quadrature, extrapolated to
/// `u → 0`, and compared both with the separable product and, after removing
/// the `−iπ` cross terms and `−π²φ₁(ω)φ₂(ω)`, with `PV₁·PV₂`.
pub fn lemma11_check(
    phi1: &TestFn1D,
    phi2: &TestFn1D,
    omega: f64,
    u_sequence: &[f64],
) -> Result<Lemma11Check> {
    validate_sequence(u_sequence)?;
    for phi in [phi1, phi2] {
        let (a, b) = phi.support();
        if omega == a || omega == b {
            return Err(DistError::OmegaOutside(omega));
        }
    }
    let pv1 = Dist1D::pv(omega).apply(phi1)?;
    let pv2 = Dist1D::pv(omega).apply(phi2)?;
    let (v1, v2) = (phi1.eval(omega), phi2.eval(omega));

    let mut grouped = Vec::with_capacity(u_sequence.len());
    let mut product = Vec::with_capacity(u_sequence.len());
    for &u in u_sequence {
        grouped.push(grouped_double_integral(phi1, phi2, omega, u)?);
        product.push(regularized_smear(phi1, omega, u)? * regularized_smear(phi2, omega, u)?);
    }
    let grouped_limit = quad::richardson_u_log(u_sequence, &grouped);
    let product_limit = quad::richardson_u_log(u_sequence, &product);

    let i_pi = C64::new(0.0, PI);
    let rhs = grouped_limit + i_pi * v1 * pv2 + i_pi * v2 * pv1 + PI * PI * v1 * v2;
    let lhs = pv1 * pv2;
    let scale = lhs.norm().max(PI * PI * (v1 * v2).abs()).max(1e-3);
    let defect = ((lhs - rhs).norm() / scale).max((grouped_limit - product_limit).norm() / scale);
    Ok(Lemma11Check {
        lhs,
        rhs,
        grouped_limit,
        product_limit,
        defect,
    })
}

fn grouped_double_integral(phi1: &TestFn1D, phi2: &TestFn1D, omega: f64, u: f64) -> Result<C64> {
    let (a1, b1) = phi1.support();
    let (a2, b2) = phi2.support();
    let gx = quad::graded_grid(a1, b1, omega, 0.5 * u.abs(), 16)?;
    let gy = quad::graded_grid(a2, b2, omega, 0.5 * u.abs(), 16)?;
    let fx: Vec<f64> = gx.nodes.iter().map(|&x| phi1.eval(x)).collect();
    let fy: Vec<f64> = gy.nodes.iter().map(|&y| phi2.eval(y)).collect();
    let scale = (b1 - a1).max(b2 - a2);
    let mut rows = Vec::with_capacity(gx.len());
    for (i, &x) in gx.nodes.iter().enumerate() {
        let rx = 1.0 / C64::new(x - omega, u);
        let mut cols = Vec::with_capacity(gy.len());
        for (j, &y) in gy.nodes.iter().enumerate() {
            let ry = 1.0 / C64::new(y - omega, u);
            let k = if (y - x).abs() > 1e-9 * scale {
                (rx - ry) / (y - x)
            } else {
                rx * ry
            };
            cols.push(k * (fy[j] * gy.weights[j]));
        }
        rows.push(quad::pairwise_sum(&cols) * (fx[i] * gx.weights[i]));
    }
    Ok(quad::pairwise_sum(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_INV: f64 = 0.367_879_441_171_442_3;

    fn bump() -> TestFn1D {
        TestFn1D::bump(-1.0, 1.0).unwrap()
    }

    #[test]
    fn apply_examples() {
        let b = bump();
        assert!((Dist1D::delta(0.0).apply(&b).unwrap().re - E_INV).abs() < 1e-16);
        assert!(Dist1D::pv(0.0).apply(&b).unwrap().norm() < 1e-14);
        let v = Dist1D::boundary(0.0, Side::Plus).apply(&b).unwrap();
        assert!((v - C64::new(0.0, -PI * E_INV)).norm() < 1e-14);
        assert!(matches!(
            Dist1D::Delta { x0: 0.0, order: 13 }.apply(&b),
            Err(DistError::UnsupportedOrder(13))
        ));
    }

    #[test]
    fn delta_derivative_sign() {
        let f = TestFn1D::poly_times_bump(-1.0, 2.0, &[0.3, 1.0, -0.4]).unwrap();
        let v = Dist1D::Delta { x0: 0.4, order: 1 }.apply(&f).unwrap();
        assert_eq!(v.re, -f.derivative(1).unwrap().eval(0.4));
        let v = Dist1D::Delta { x0: 0.4, order: 2 }.apply(&f).unwrap();
        assert_eq!(v.re, f.derivative(2).unwrap().eval(0.4));
    }

    #[test]
    fn pv_power_two_matches_finite_part() {
        // pole outside: ordinary integral of φ/(x−x₀)²
        let f = TestFn1D::poly_times_bump(0.0, 1.0, &[1.0, 2.0]).unwrap();
        let v = Dist1D::PvPower { x0: -0.5, power: 2 }.apply(&f).unwrap();
        let g = quad::gauss_grid(0.0, 1.0, 400).unwrap();
        let direct = quad::integrate(|x| C64::new(f.eval(x) / (x + 0.5).powi(2), 0.0), &g).unwrap();
        assert!((v - direct).norm() < 1e-12);
    }

    #[test]
    fn plemelj_split_and_jump() {
        let f = TestFn1D::poly_times_bump(-1.0, 1.5, &[0.4, 1.0, 0.3]).unwrap();
        for x0 in [-0.3, 0.2, 1.0] {
            let p = Dist1D::boundary(x0, Side::Plus).apply(&f).unwrap();
            let m = Dist1D::boundary(x0, Side::Minus).apply(&f).unwrap();
            let pv = Dist1D::pv(x0).apply(&f).unwrap();
            assert_eq!(p + m, pv * 2.0);
            assert!((m - p - C64::new(0.0, 2.0 * PI * f.eval(x0))).norm() < 1e-15);
        }
    }

    #[test]
    fn plemelj_even_bump() {
        let us = u_schedule(3, 12, Side::Plus);
        let lim = plemelj_limit(&bump(), &us).unwrap();
        assert!((lim.extrapolated - C64::new(0.0, -PI * E_INV)).norm() <= 1e-6);
        assert!(lim.order >= 0.9, "order {}", lim.order);
        let us = u_schedule(3, 12, Side::Minus);
        let lim = plemelj_limit(&bump(), &us).unwrap();
        assert!((lim.extrapolated - C64::new(0.0, PI * E_INV)).norm() <= 1e-6);
    }

    #[test]
    fn plemelj_pole_outside_support() {
        let f = TestFn1D::bump(2.0, 3.0).unwrap();
        let us = u_schedule(3, 13, Side::Plus);
        let lim = plemelj_limit(&f, &us).unwrap();
        let direct = Dist1D::pv(0.0).apply(&f).unwrap();
        assert!((lim.extrapolated - direct).norm() < 1e-8);
    }

    #[test]
    fn plemelj_asymmetric() {
        let f = TestFn1D::poly_times_bump(-0.7, 1.3, &[1.0, 1.5, -0.6]).unwrap();
        let us = u_schedule(3, 12, Side::Plus);
        let lim = plemelj_limit(&f, &us).unwrap();
        let oracle = Dist1D::pv(0.0).apply(&f).unwrap() - C64::new(0.0, PI * f.eval(0.0));
        assert!((lim.extrapolated - oracle).norm() <= 1e-6);
    }

    #[test]
    fn bad_sequences() {
        let f = bump();
        assert!(plemelj_limit(&f, &[0.1, -0.05, 0.02, 0.01]).is_err());
        assert!(plemelj_limit(&f, &[0.1, 0.2, 0.05, 0.01]).is_err());
        assert!(plemelj_limit(&f, &[0.1, 0.05]).is_err());
        assert!(plemelj_limit(&f, &[0.1, 0.05, 0.0, 0.01]).is_err());
    }

    fn product(fx: TestFn1D, fy: TestFn1D) -> TestFn2D {
        TestFn2D::product(fx, fy)
    }

    #[test]
    fn dbar_examples() {
        let c = dbar_identity_check(&product(bump(), bump())).unwrap();
        assert!(c.defect <= 1e-6, "{c:?}");
        let shifted = product(TestFn1D::bump(0.5, 2.0).unwrap(), bump());
        assert_eq!(dbar_identity_check(&shifted).unwrap_err(), DistError::OriginOutside);
        let odd = product(TestFn1D::poly_times_bump(-1.0, 1.0, &[0.0, 1.0]).unwrap(), bump());
        let c = dbar_identity_check(&odd).unwrap();
        assert!(c.lhs.norm() <= 1e-8, "{c:?}");
    }

    #[test]
    fn jump_analytic_function() {
        let phi = product(
            TestFn1D::poly_times_bump(-1.2, 1.3, &[1.0, 0.5]).unwrap(),
            TestFn1D::bump(-1.0, 1.1).unwrap(),
        );
        let f = |z: C64| 1.0 / (z - 5.0);
        let c = jump_formula_check(&f, &|_| Ok(C64::new(0.0, 0.0)), &phi).unwrap();
        assert!(c.lhs.norm() <= 1e-8 && c.rhs.norm() <= 1e-8, "{c:?}");
    }

    #[test]
    fn jump_of_cauchy_kernel() {
        let phi = product(bump(), bump());
        let f = |z: C64| 1.0 / z;
        let jump = |g: &TestFn1D| Ok(C64::new(0.0, -2.0 * PI) * g.eval(0.0));
        let c = jump_formula_check(&f, &jump, &phi).unwrap();
        let oracle = dbar_identity_check(&phi).unwrap();
        assert!(c.defect <= 1e-5, "{c:?}");
        assert!((c.lhs - oracle.lhs).norm() <= 1e-5);
    }

    #[test]
    fn jump_of_shifted_pole() {
        let w0 = 0.35;
        let phi = product(
            TestFn1D::poly_times_bump(-0.8, 1.4, &[1.0, -0.4]).unwrap(),
            TestFn1D::poly_times_bump(-0.9, 0.7, &[1.0, 0.8]).unwrap(),
        );
        let f = move |z: C64| 1.0 / (z - w0);
        let jump = move |g: &TestFn1D| Ok(C64::new(0.0, -2.0 * PI) * g.eval(w0));
        let c = jump_formula_check(&f, &jump, &phi).unwrap();
        assert!(c.defect <= 1e-5, "{c:?}");
        assert!((c.rhs - phi.eval(C64::new(w0, 0.0)) * PI).norm() < 1e-14);
    }

    #[test]
    fn lemma11_symmetric() {
        let b = bump();
        let c = lemma11_check(&b, &b, 0.0, &lemma11_schedule()).unwrap();
        assert!(c.lhs.norm() < 1e-14);
        assert!((c.grouped_limit + PI * PI * E_INV * E_INV).norm() <= 1e-4 * PI * PI * E_INV * E_INV);
        assert!(c.defect <= 1e-4, "{c:?}");
    }

    #[test]
    fn lemma11_outside() {
        let f1 = TestFn1D::bump(1.0, 2.0).unwrap();
        let f2 = TestFn1D::poly_times_bump(1.5, 3.0, &[1.0, 0.2]).unwrap();
        let c = lemma11_check(&f1, &f2, 0.0, &lemma11_schedule()).unwrap();
        assert!(c.defect <= 1e-7, "{c:?}");
        assert!(lemma11_check(&f1, &f2, 1.0, &lemma11_schedule()).is_err());
    }

    #[test]
    fn lemma11_asymmetric() {
        let f1 = TestFn1D::poly_times_bump(-1.0, 1.2, &[1.0, 0.7]).unwrap();
        let f2 = TestFn1D::poly_times_bump(-0.6, 1.5, &[0.5, -0.3, 1.0]).unwrap();
        let c = lemma11_check(&f1, &f2, 0.1, &lemma11_schedule()).unwrap();
        assert!(c.defect <= 1e-4, "{c:?}");
    }

    #[test]
    fn delta_chain_rule() {
        // ∭ δ(x−y)δ(y−z) f₁(x)f₂(y)f₃(z) = ∫ f₁f₂f₃
        let supp = (-1.0, 1.5);
        let fs: Vec<TestFn1D> = [[1.0, 0.3, 0.0], [0.2, -1.0, 0.5], [1.0, 0.0, -0.7]]
            .iter()
            .map(|c| TestFn1D::poly_times_bump(supp.0, supp.1, c).unwrap())
            .collect();
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            let (f1, f2, f3) = (&fs[i], &fs[j], &fs[k]);
            let grid = quad::gauss_grid(supp.0, supp.1, 128).unwrap();
            let iterated = quad::integrate(
                |z| {
                    let inner = Dist1D::delta(z).apply(f1).unwrap() * f2.eval(z);
                    inner * f3.eval(z)
                },
                &grid,
            )
            .unwrap();
            let direct = f1.product(f2).unwrap().product(f3).unwrap().integral(128);
            assert!((iterated.re - direct).abs() < 1e-14, "{iterated} {direct}");
        }
    }
}
