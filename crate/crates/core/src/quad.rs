//! Deterministic quadrature: Gauss–Legendre and composite rules on intervals,
//! Cauchy principal values by singularity subtraction, and trapezoid
//! contour integrals on circles.
//!
//! Every reduction goes through [`pairwise_sum`] in ascending node order, so
//! results are bit-reproducible for identical inputs.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("invalid interval ({a}, {b}): need a < b")]
    InvalidInterval { a: f64, b: f64 },
    #[error("invalid quadrature order {0}")]
    InvalidOrder(usize),
    #[error("integrand is not finite at {at}")]
    NonfiniteValue { at: C64 },
    #[error("pole {pole} is outside ({a}, {b})")]
    PoleOutside { pole: f64, a: f64, b: f64 },
    #[error("invalid circle: radius {radius}, {n_points} points")]
    InvalidCircle { radius: f64, n_points: usize },
}

pub type Result<T> = std::result::Result<T, QuadError>;

/// Default number of trapezoid points on a circle.
pub const DEFAULT_CIRCLE_POINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    GaussLegendre,
    Composite,
}

/// Nodes and positive weights on an interval `(a, b)`, nodes ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: (f64, f64),
    pub rule: Rule,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn a(&self) -> f64 {
        self.interval.0
    }

    pub fn b(&self) -> f64 {
        self.interval.1
    }

    /// Weighted sum of precomputed samples `Σ wᵢ vᵢ`.
    pub fn sum(&self, values: &[C64]) -> C64 {
        debug_assert_eq!(values.len(), self.nodes.len());
        let terms: Vec<C64> = self
            .weights
            .iter()
            .zip(values)
            .map(|(w, v)| v * *w)
            .collect();
        pairwise_sum(&terms)
    }
}

/// Pairwise (cascade) summation with a fixed split, so the rounding pattern
/// depends only on the length of the input.
pub fn pairwise_sum(values: &[C64]) -> C64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        let mut acc = C64::new(0.0, 0.0);
        for v in values {
            acc += v;
        }
        return acc;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_real(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_real(&values[..mid]) + pairwise_sum_real(&values[mid..])
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    Ok(())
}

/// Legendre nodes and weights on (-1, 1), ascending.
fn legendre_reference(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..half {
        // Tricomi-type initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_eval(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss–Legendre rule mapped to `(a, b)`.
pub fn gauss_grid(a: f64, b: f64, n: usize) -> Result<Grid> {
    check_interval(a, b)?;
    if n < 2 {
        return Err(QuadError::InvalidOrder(n));
    }
    let (t, w) = legendre_reference(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(Grid {
        nodes: t.iter().map(|t| mid + half * t).collect(),
        weights: w.iter().map(|w| half * w).collect(),
        interval: (a, b),
        rule: Rule::GaussLegendre,
    })
}

/// Composite Gauss–Legendre rule over the panels delimited by `breaks`
/// (ascending, first = a, last = b), `order` points per panel.
pub fn composite_grid(breaks: &[f64], order: usize) -> Result<Grid> {
    if breaks.len() < 2 {
        return Err(QuadError::InvalidOrder(breaks.len()));
    }
    if order < 2 {
        return Err(QuadError::InvalidOrder(order));
    }
    let (t, w) = legendre_reference(order);
    let mut nodes = Vec::with_capacity((breaks.len() - 1) * order);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        check_interval(pair[0], pair[1])?;
        let half = 0.5 * (pair[1] - pair[0]);
        let mid = 0.5 * (pair[1] + pair[0]);
        for (ti, wi) in t.iter().zip(&w) {
            nodes.push(mid + half * ti);
            weights.push(half * wi);
        }
    }
    Ok(Grid {
        nodes,
        weights,
        interval: (breaks[0], breaks[breaks.len() - 1]),
        rule: Rule::Composite,
    })
}

/// Coarsest panel count used by [`graded_grid`].
pub const GRADED_MAX_PANELS: usize = 16;

/// Composite rule on `(a, b)` whose panels shrink geometrically toward
/// `focus`, down to width `min_width`. Resolves integrands with a near
/// singularity at distance ~`min_width` from the real point `focus`.
/// Panels are never wider than `(b − a)/GRADED_MAX_PANELS`.
pub fn graded_grid(a: f64, b: f64, focus: f64, min_width: f64, order: usize) -> Result<Grid> {
    check_interval(a, b)?;
    let cap = (b - a) / GRADED_MAX_PANELS as f64;
    let mut breaks = Vec::new();
    if focus > a && focus < b && min_width > 0.0 {
        let mut right = Vec::new();
        let (mut x, mut w) = (focus, min_width);
        while x + w < b {
            x += w;
            right.push(x);
            w = (2.0 * w).min(cap);
        }
        let mut left = Vec::new();
        let (mut x, mut w) = (focus, min_width);
        while x - w > a {
            x -= w;
            left.push(x);
            w = (2.0 * w).min(cap);
        }
        breaks.push(a);
        breaks.extend(left.iter().rev());
        breaks.push(focus);
        breaks.extend(right.iter());
        breaks.push(b);
        // drop slivers that would make a panel degenerate
        breaks.dedup_by(|x, y| (*x - *y).abs() <= 1e-12 * (b - a));
    } else {
        breaks.extend((0..=GRADED_MAX_PANELS).map(|i| a + cap * i as f64));
        breaks[GRADED_MAX_PANELS] = b;
    }
    composite_grid(&breaks, order)
}

/// `Σ wᵢ f(xᵢ)` in ascending node order with pairwise summation.
pub fn integrate<F>(f: F, grid: &Grid) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    let mut terms = Vec::with_capacity(grid.len());
    for (&x, &w) in grid.nodes.iter().zip(&grid.weights) {
        let v = f(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(QuadError::NonfiniteValue { at: C64::new(x, 0.0) });
        }
        terms.push(v * w);
    }
    Ok(pairwise_sum(&terms))
}

/// Principal value `PV ∫ₐᵇ f(x)/(x − pole) dx` with an `n`-point Gauss rule.
pub fn pv_integral<F>(f: F, pole: f64, a: f64, b: f64, n: usize) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    let grid = gauss_grid(a, b, n)?;
    pv_integral_on(&f, pole, &grid)
}

/// Principal value on a precomputed grid: `∫ (f(x) − f(p))/(x − p) dx +
/// f(p)·ln((b − p)/(p − a))`. Nodes closer than `1e-6·(b − a)` to the pole
/// use a centered-difference derivative `f'(p)` with step `1e-5·(b − a)`.
pub fn pv_integral_on<F>(f: &F, pole: f64, grid: &Grid) -> Result<C64>
where
    F: Fn(f64) -> C64 + ?Sized,
{
    let values: Vec<C64> = grid.nodes.iter().map(|&x| f(x)).collect();
    pv_integral_sampled(f, &values, pole, grid)
}

/// As [`pv_integral_on`] with `f` already sampled at the grid nodes; `f` is
/// only called at the pole and, if needed, for the derivative.
pub fn pv_integral_sampled<F>(f: &F, values: &[C64], pole: f64, grid: &Grid) -> Result<C64>
where
    F: Fn(f64) -> C64 + ?Sized,
{
    let (a, b) = grid.interval;
    if !(pole > a && pole < b) {
        return Err(QuadError::PoleOutside { pole, a, b });
    }
    let len = b - a;
    let delta = 1e-6 * len;
    let step = 1e-5 * len;
    let f_pole = f(pole);
    finite(f_pole, pole)?;
    let mut deriv: Option<C64> = None;
    let mut terms = Vec::with_capacity(grid.len());
    for ((&x, &w), &v) in grid.nodes.iter().zip(&grid.weights).zip(values) {
        finite(v, x)?;
        let q = if (x - pole).abs() < delta {
            *deriv.get_or_insert_with(|| (f(pole + step) - f(pole - step)) / (2.0 * step))
        } else {
            (v - f_pole) / (x - pole)
        };
        terms.push(q * w);
    }
    let log_term = f_pole * ((b - pole) / (pole - a)).ln();
    Ok(pairwise_sum(&terms) + log_term)
}

/// `∫ f(x)/(x − pole) dx` on the grid: principal value when the pole is
/// inside the interval, an ordinary sum otherwise.
pub fn cauchy_pv_on<F>(f: &F, values: &[C64], pole: f64, grid: &Grid) -> Result<C64>
where
    F: Fn(f64) -> C64 + ?Sized,
{
    let (a, b) = grid.interval;
    if pole > a && pole < b {
        return pv_integral_sampled(f, values, pole, grid);
    }
    let terms: Vec<C64> = grid
        .nodes
        .iter()
        .zip(&grid.weights)
        .zip(values)
        .map(|((&x, &w), &v)| v * (w / (x - pole)))
        .collect();
    let s = pairwise_sum(&terms);
    finite(s, pole)?;
    Ok(s)
}

fn finite(v: C64, at: f64) -> Result<()> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(())
    } else {
        Err(QuadError::NonfiniteValue { at: C64::new(at, 0.0) })
    }
}

/// Circle `|z − center| = radius` sampled at `n_points` equispaced angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
    pub n_points: usize,
}

impl Circle {
    pub fn new(center: C64, radius: f64, n_points: usize) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(QuadError::InvalidCircle { radius, n_points });
        }
        Ok(Circle {
            center,
            radius,
            n_points,
        })
    }

    pub fn with_default_points(center: C64, radius: f64) -> Result<Self> {
        Self::new(center, radius, DEFAULT_CIRCLE_POINTS)
    }

    /// Sample points `z_j` and trapezoid weights `w_j` such that
    /// `(1/2πi)∮F dz ≈ Σ w_j F(z_j)` (counter-clockwise).
    pub fn samples(&self) -> Vec<(C64, C64)> {
        let n = self.n_points as f64;
        (0..self.n_points)
            .map(|j| {
                let theta = 2.0 * PI * j as f64 / n;
                let e = C64::from_polar(1.0, theta);
                (self.center + e * self.radius, e * (self.radius / n))
            })
            .collect()
    }
}

/// `(1/2πi)∮ F(z) dz` for vector-valued `F` (any fixed length, e.g. a
/// flattened matrix) by the trapezoid rule. The reduction over sample points
/// is pairwise, entry by entry.
pub fn contour_integral<F>(f: F, circle: &Circle) -> Result<Vec<C64>>
where
    F: Fn(C64) -> Vec<C64>,
{
    let samples = circle.samples();
    let mut columns: Vec<Vec<C64>> = Vec::new();
    for (j, (z, w)) in samples.iter().enumerate() {
        let v = f(*z);
        if j == 0 {
            columns = vec![Vec::with_capacity(samples.len()); v.len()];
        }
        for (k, x) in v.iter().enumerate() {
            if !(x.re.is_finite() && x.im.is_finite()) {
                return Err(QuadError::NonfiniteValue { at: *z });
            }
            columns[k].push(x * w);
        }
    }
    Ok(columns.iter().map(|c| pairwise_sum(c)).collect())
}

/// Scalar convenience wrapper around [`contour_integral`].
pub fn contour_integral_scalar<F>(f: F, circle: &Circle) -> Result<C64>
where
    F: Fn(C64) -> C64,
{
    Ok(contour_integral(|z| vec![f(z)], circle)?[0])
}

/// Fits `v(u) = v₀ + c₁u + c₂·u ln|u|` through the last three samples and
/// returns `v₀`. Used to extrapolate regularized values to `u → 0`.
pub fn richardson_u_log(us: &[f64], values: &[C64]) -> C64 {
    assert!(us.len() >= 3 && us.len() == values.len());
    let k = us.len();
    let rows: Vec<[f64; 3]> = (k - 3..k)
        .map(|j| [1.0, us[j], us[j] * us[j].abs().ln()])
        .collect();
    let rhs: Vec<C64> = values[k - 3..].to_vec();
    solve3(&rows, &rhs)[0]
}

fn solve3(m: &[[f64; 3]], rhs: &[C64]) -> [C64; 3] {
    let det = |a: [[f64; 3]; 3]| {
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    };
    let base = [m[0], m[1], m[2]];
    let d = det(base);
    let mut out = [C64::new(0.0, 0.0); 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut re = base;
        let mut im = base;
        for r in 0..3 {
            re[r][col] = rhs[r].re;
            im[r][col] = rhs[r].im;
        }
        *slot = C64::new(det(re) / d, det(im) / d);
    }
    out
}

/// Neville polynomial extrapolation of `values(h)` to `h = 0`.
pub fn polynomial_extrapolate(hs: &[f64], values: &[C64]) -> C64 {
    assert!(!hs.is_empty() && hs.len() == values.len());
    let mut p = values.to_vec();
    let n = hs.len();
    for m in 1..n {
        for i in 0..n - m {
            let (hi, hj) = (hs[i], hs[i + m]);
            p[i] = (p[i + 1] * hi - p[i] * hj) / (hi - hj);
        }
    }
    p[0]
}

/// Adaptive Gauss–Kronrod (7/15) integration of a smooth but possibly
/// sharply peaked integrand. Subdivision order is deterministic
/// (depth-first, left before right); there is no discontinuity handling.
pub fn adaptive_integrate<F>(f: &F, a: f64, b: f64, tol: f64) -> C64
where
    F: Fn(f64) -> C64 + ?Sized,
{
    fn rec<F: Fn(f64) -> C64 + ?Sized>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
        out: &mut Vec<C64>,
    ) {
        let (k, g) = gk15(f, a, b);
        if (k - g).norm() <= tol || depth >= 40 || (b - a) <= 1e-14 * a.abs().max(b.abs()).max(1.0) {
            out.push(k);
            return;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth + 1, out);
        rec(f, m, b, 0.5 * tol, depth + 1, out);
    }
    let mut parts = Vec::new();
    rec(f, a, b, tol, 0, &mut parts);
    pairwise_sum(&parts)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> C64 + ?Sized>(f: &F, a: f64, b: f64) -> (C64, C64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = half * XGK[j];
        let s = f(mid - x) + f(mid + x);
        k += s * WGK[j];
        if j % 2 == 1 {
            g += s * WG[j / 2];
        }
    }
    (k * half, g * half)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn two_point_rule() {
        let g = gauss_grid(-1.0, 1.0, 2).unwrap();
        let r = 1.0 / 3f64.sqrt();
        assert!((g.nodes[0] + r).abs() < 1e-15 && (g.nodes[1] - r).abs() < 1e-15);
        assert!((g.weights[0] - 1.0).abs() < 1e-15 && (g.weights[1] - 1.0).abs() < 1e-15);
        let g = gauss_grid(0.0, 2.0, 2).unwrap();
        assert!((g.nodes[0] - (1.0 - r)).abs() < 1e-15);
        assert!((g.nodes[1] - (1.0 + r)).abs() < 1e-15);
    }

    #[test]
    fn grid_errors() {
        assert_eq!(
            gauss_grid(1.0, 1.0, 4),
            Err(QuadError::InvalidInterval { a: 1.0, b: 1.0 })
        );
        assert_eq!(gauss_grid(0.0, 1.0, 1), Err(QuadError::InvalidOrder(1)));
    }

    #[test]
    fn weights_sum_to_length() {
        for n in [2, 3, 7, 64, 255, 512, 1024] {
            let g = gauss_grid(1.0, 3.5, n).unwrap();
            let s = pairwise_sum_real(&g.weights);
            assert!((s - 2.5).abs() <= 1e-13 * 2.5, "n={n} sum={s}");
            assert!(g.weights.iter().all(|&w| w > 0.0));
            assert!(g.nodes.iter().all(|&x| x > 1.0 && x < 3.5));
            assert!(g.nodes.windows(2).all(|p| p[0] < p[1]));
        }
        let g = graded_grid(-1.0, 2.0, 0.3, 1e-4, 12).unwrap();
        assert!((pairwise_sum_real(&g.weights) - 3.0).abs() < 1e-13 * 3.0);
    }

    #[test]
    fn deterministic_nodes() {
        let a = gauss_grid(0.3, 1.7, 97).unwrap();
        let b = gauss_grid(0.3, 1.7, 97).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn integrate_examples() {
        let g = gauss_grid(1.0, 2.0, 64).unwrap();
        assert!((integrate(c, &g).unwrap().re - 1.5).abs() < 1e-14);
        let g = gauss_grid(0.0, 1.0, 8).unwrap();
        assert!((integrate(|_| c(1.0), &g).unwrap().re - 1.0).abs() < 1e-14);
        // e from its series
        let e: f64 = (0..25).scan(1.0, |f, k| {
            let t = 1.0 / *f;
            *f *= (k + 1) as f64;
            Some(t)
        }).sum();
        let g = gauss_grid(0.0, 1.0, 32).unwrap();
        let v = integrate(|x| c(x.exp()), &g).unwrap();
        assert!((v.re - (e - 1.0)).abs() < 1e-13);
        // antiderivative ln(4 + y²)
        let g = gauss_grid(1.0, 2.0, 64).unwrap();
        let v = integrate(|y| c(2.0 * y / (4.0 + y * y)), &g).unwrap();
        assert!((v.re - (8.0f64 / 5.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_nonfinite() {
        let g = gauss_grid(0.0, 1.0, 4).unwrap();
        assert!(matches!(
            integrate(|_| c(f64::NAN), &g),
            Err(QuadError::NonfiniteValue { .. })
        ));
    }

    /// Shi(1) = Σ 1/((2k+1)(2k+1)!)
    fn shi1() -> f64 {
        let mut fact = 1.0;
        let mut s = 0.0;
        for m in 1..40 {
            fact *= m as f64;
            if m % 2 == 1 {
                s += 1.0 / (m as f64 * fact);
            }
        }
        s
    }

    #[test]
    fn pv_examples() {
        let v = pv_integral(|_| c(1.0), 0.0, -1.0, 1.0, 16).unwrap();
        assert!(v.norm() < 1e-14);
        let v = pv_integral(|_| c(1.0), 1.0, 0.0, 2.0, 16).unwrap();
        assert!(v.norm() < 1e-14);
        let v = pv_integral(|x| c(x.exp()), 0.0, -1.0, 1.0, 32).unwrap();
        assert!((v.re - 2.0 * shi1()).abs() < 1e-13, "{v}");
        assert!((2.0 * shi1() - 2.114_501_750_75).abs() < 1e-10);
    }

    #[test]
    fn pv_pole_outside() {
        assert!(matches!(
            pv_integral(|_| c(1.0), 2.0, -1.0, 1.0, 8),
            Err(QuadError::PoleOutside { .. })
        ));
    }

    #[test]
    fn pv_pole_on_node() {
        // odd n puts a node exactly on the midpoint
        let v = pv_integral(|x| c(x.exp()), 0.0, -1.0, 1.0, 33).unwrap();
        assert!((v.re - 2.0 * shi1()).abs() < 1e-9);
    }

    #[test]
    fn pv_even_about_pole() {
        let v = pv_integral(|x| c((-(x - 0.3).powi(2)).exp()), 0.3, -0.7, 1.3, 40).unwrap();
        assert!(v.norm() <= 1e-12 * 2.0);
    }

    #[test]
    fn contour_examples() {
        let unit = Circle::new(C64::new(0.0, 0.0), 1.0, 64).unwrap();
        let v = contour_integral_scalar(|z| 1.0 / z, &unit).unwrap();
        assert!((v - 1.0).norm() < 1e-13);
        let v = contour_integral_scalar(|z| 1.0 / (z - 2.0), &unit).unwrap();
        assert!(v.norm() < 1e-13);
        let unit = Circle::with_default_points(C64::new(0.0, 0.0), 1.0).unwrap();
        let v = contour_integral(|z| vec![1.0 / (z - 0.5), 1.0 / (z - 3.0)], &unit).unwrap();
        assert!((v[0] - 1.0).norm() < 1e-12 && v[1].norm() < 1e-12);
    }

    #[test]
    fn contour_analytic_vanishes() {
        let circ = Circle::new(C64::new(0.2, -0.1), 0.7, 64).unwrap();
        let v = contour_integral_scalar(|z| z.exp() * z.sin(), &circ).unwrap();
        assert!(v.norm() <= 1e-10);
    }

    #[test]
    fn circle_validation() {
        assert!(Circle::new(C64::new(0.0, 0.0), 1.0, 7).is_err());
        assert!(Circle::new(C64::new(0.0, 0.0), 1.0, 9).is_err());
        assert!(Circle::new(C64::new(0.0, 0.0), -1.0, 8).is_err());
    }

    #[test]
    fn doubling_does_not_increase_error() {
        let exact = 2.0 * shi1();
        let mut last = f64::INFINITY;
        for n in [4, 8, 16, 32] {
            let v = pv_integral(|x| c(x.exp()), 0.0, -1.0, 1.0, n).unwrap();
            let err = (v.re - exact).abs();
            assert!(err <= last.max(1e-15), "n={n}");
            last = err;
        }
    }

    #[test]
    fn extrapolation_helpers() {
        let us: Vec<f64> = (3..8).map(|j| 2f64.powi(-j)).collect();
        let vals: Vec<C64> = us
            .iter()
            .map(|&u| C64::new(1.5 + 2.0 * u + 0.5 * u * u.ln(), -1.0 + u))
            .collect();
        let v0 = richardson_u_log(&us, &vals);
        assert!((v0 - C64::new(1.5, -1.0)).norm() < 1e-12);
        let vals: Vec<C64> = us.iter().map(|&u| c(3.0 - u + 4.0 * u * u)).collect();
        assert!((polynomial_extrapolate(&us, &vals) - 3.0).norm() < 1e-12);
    }

    #[test]
    fn adaptive_peaked() {
        let u = 1e-5;
        let v = adaptive_integrate(&|x: f64| C64::new(u / (x * x + u * u), 0.0), -1.0, 1.0, 1e-12);
        let exact = 2.0 * (1.0 / u).atan();
        assert!((v.re - exact).abs() < 1e-9);
    }
}
