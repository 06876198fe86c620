//! Spectral distributions of finite matrices.
//!
//! Projectors and nilpotent parts are extracted from contour integrals of
//! the resolvent, never from a numerical Jordan form. The smeared spectral
//! distribution is `M(φ) = Σᵢ Σ_{k<nᵢ} (1/k!) pᵢ aᵢᵏ (∂ᵏφ)(λᵢ)`.

use std::f64::consts::PI;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::quad::{self, Circle, QuadError, DEFAULT_CIRCLE_POINTS};
use crate::testfn::{TestFn2D, TestFnError, MAX_ORDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatError {
    #[error("matrix dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("z = {0} is numerically an eigenvalue")]
    SingularShift(C64),
    #[error("contour straddles an eigenvalue cluster (‖p² − p‖ = {0:e})")]
    EnclosureAmbiguous(f64),
    #[error("nilpotency order {0} exceeds the derivative cap")]
    OrderCap(usize),
    #[error("radius {radius} does not exceed the Gershgorin bound {bound}")]
    RadiusTooSmall { radius: f64, bound: f64 },
    #[error("matrix is not unitary (‖U*U − I‖ = {0:e})")]
    NotUnitary(f64),
    #[error("eigenvalue cluster at {0} is not a single eigenvalue")]
    UnresolvedCluster(C64),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    TestFn(#[from] TestFnError),
}

pub type Result<T> = std::result::Result<T, MatError>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(MatError::Dimension {
                expected: dim * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(MatError::NonFinite);
        }
        Ok(CMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(MatError::Dimension {
                expected: n,
                got: r.len(),
            });
        }
        Self::new(n, rows.concat())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self^k` for `k ≥ 0`.
    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.dim);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius()
    }

    /// Largest Gershgorin row bound `maxᵢ (|aᵢᵢ| + Σ_{j≠i}|aᵢⱼ|)`.
    pub fn gershgorin_bound(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `self⁻¹·rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &CMatrix) -> Option<CMatrix> {
        let n = self.dim;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let tiny = 64.0 * f64::EPSILON * self.frobenius().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let piv = (k..n)
                .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
                .expect("nonempty");
            if lu[piv * n + k].norm() <= tiny {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let t = lu[k * n + j];
                    lu[i * n + j] -= f * t;
                }
            }
        }
        let mut x = CMatrix::zeros(n);
        for col in 0..n {
            let mut y: Vec<C64> = perm.iter().map(|&p| rhs[(p, col)]).collect();
            for i in 0..n {
                for j in 0..i {
                    y[i] = y[i] - lu[i * n + j] * y[j];
                }
            }
            for i in (0..n).rev() {
                for j in i + 1..n {
                    y[i] = y[i] - lu[i * n + j] * y[j];
                }
                y[i] /= lu[i * n + i];
            }
            for i in 0..n {
                x[(i, col)] = y[i];
            }
        }
        Some(x)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// `R(z) = (z − A)⁻¹`.
pub fn resolvent(a: &CMatrix, z: C64) -> Result<CMatrix> {
    let n = a.dim();
    let shifted = &CMatrix::identity(n).scale(z) - a;
    shifted
        .solve(&CMatrix::identity(n))
        .ok_or(MatError::SingularShift(z))
}

/// `‖R(z₁) − R(z₂) − (z₂ − z₁)R(z₁)R(z₂)‖_F / ‖R(z₁)‖_F`.
pub fn resolvent_equation_residual(a: &CMatrix, z1: C64, z2: C64) -> Result<f64> {
    if z1 == z2 {
        return Ok(0.0);
    }
    let r1 = resolvent(a, z1)?;
    let r2 = resolvent(a, z2)?;
    let rhs = (&r1 * &r2).scale(z2 - z1);
    Ok((&(&r1 - &r2) - &rhs).frobenius() / r1.frobenius())
}

/// Resolvent sampled on a circle, ready for moment extraction.
#[derive(Debug, Clone)]
pub struct ContourSamples {
    pub circle: Circle,
    points: Vec<(C64, C64)>,
    resolvents: Vec<CMatrix>,
}

impl ContourSamples {
    pub fn new(a: &CMatrix, circle: Circle) -> Result<Self> {
        let points = circle.samples();
        let resolvents = points
            .par_iter()
            .map(|&(z, _)| resolvent(a, z))
            .collect::<Result<Vec<_>>>()?;
        Ok(ContourSamples {
            circle,
            points,
            resolvents,
        })
    }

    /// `(1/2πi)∮ q(z) R(z) dz`, summed pairwise entry by entry.
    pub fn weighted<F: Fn(C64) -> C64>(&self, q: F) -> CMatrix {
        let n = self.resolvents[0].dim();
        let weights: Vec<C64> = self.points.iter().map(|&(z, w)| w * q(z)).collect();
        let data = (0..n * n)
            .map(|e| {
                let terms: Vec<C64> = self
                    .resolvents
                    .iter()
                    .zip(&weights)
                    .map(|(r, w)| r.data[e] * w)
                    .collect();
                quad::pairwise_sum(&terms)
            })
            .collect();
        CMatrix { dim: n, data }
    }

    /// Laurent coefficient `(1/2πi)∮ (z − λ)ᵏ R(z) dz`: `p` for `k = 0`,
    /// `aᵏ` for `k ≥ 1`, regular-part coefficients for `k < 0`.
    pub fn moment(&self, center: C64, k: i32) -> CMatrix {
        self.weighted(|z| (z - center).powi(k))
    }
}

#[derive(Debug, Clone)]
pub struct RieszData {
    pub projector: CMatrix,
    pub nilpotent: CMatrix,
}

/// Riesz projector `p = (1/2πi)∮R` and nilpotent part
/// `a = (1/2πi)∮(z − λ)R` on `|z − λ| = r`.
pub fn riesz_data(a: &CMatrix, lambda: C64, r: f64, n_points: usize) -> Result<RieszData> {
    let samples = ContourSamples::new(a, Circle::new(lambda, r, n_points)?)?;
    riesz_from_samples(&samples, lambda)
}

fn riesz_from_samples(samples: &ContourSamples, lambda: C64) -> Result<RieszData> {
    let p = samples.moment(lambda, 0);
    let defect = (&(&p * &p) - &p).frobenius();
    if defect > 1e-6 * p.frobenius().max(1.0) {
        return Err(MatError::EnclosureAmbiguous(defect));
    }
    Ok(RieszData {
        nilpotent: samples.moment(lambda, 1),
        projector: p,
    })
}

/// `(1/2πi)∮ (z − λ)ᵏ R(z) dz` on `|z − λ| = r`.
pub fn laurent_coefficient(a: &CMatrix, lambda: C64, r: f64, n_points: usize, k: i32) -> Result<CMatrix> {
    let samples = ContourSamples::new(a, Circle::new(lambda, r, n_points)?)?;
    Ok(samples.moment(lambda, k))
}

/// `‖(1/2πi)∮_{|z|=r} R(z) dz − I‖_F`.
pub fn completeness_contour(a: &CMatrix, r: f64) -> Result<f64> {
    let bound = a.gershgorin_bound();
    if bound >= r {
        return Err(MatError::RadiusTooSmall { radius: r, bound });
    }
    let samples = ContourSamples::new(a, Circle::with_default_points(ZERO, r)?)?;
    Ok(samples.moment(ZERO, 0).distance(&CMatrix::identity(a.dim())))
}

/// Eigenvalues, Riesz projectors and nilpotent parts of a matrix.
#[derive(Debug, Clone)]
pub struct SpectralDataMatrix {
    pub eigenvalues: Vec<C64>,
    pub projectors: Vec<CMatrix>,
    pub nilpotents: Vec<CMatrix>,
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectralDataDefects {
    /// `maxᵢⱼ ‖pᵢpⱼ − δᵢⱼpᵢ‖`
    pub idempotency: f64,
    /// `‖Σpᵢ − I‖`
    pub partition: f64,
    /// `maxᵢⱼ ‖aᵢpⱼ − δᵢⱼaᵢ‖`, `‖aᵢpᵢ − pᵢaᵢ‖`
    pub nilpotent_projection: f64,
    /// `maxᵢ ‖aᵢ^{nᵢ}‖`
    pub nilpotency: f64,
}

impl SpectralDataDefects {
    pub fn max(&self) -> f64 {
        self.idempotency
            .max(self.partition)
            .max(self.nilpotent_projection)
            .max(self.nilpotency)
    }
}

impl SpectralDataMatrix {
    /// Locate the spectrum and extract `(λᵢ, pᵢ, aᵢ, nᵢ)` by contour integrals.
    pub fn from_matrix(a: &CMatrix) -> Result<Self> {
        let scale = a.frobenius().max(1.0);
        let clusters = cluster_roots(&characteristic_roots(a), 1e-3 * scale);
        let radii = isolating_radii(&clusters, scale);
        let mut sd = SpectralDataMatrix {
            eigenvalues: Vec::new(),
            projectors: Vec::new(),
            nilpotents: Vec::new(),
            orders: Vec::new(),
        };
        for (&(center, spread), &r) in clusters.iter().zip(&radii) {
            if spread >= 0.5 * r {
                return Err(MatError::UnresolvedCluster(center));
            }
            let samples = ContourSamples::new(a, Circle::with_default_points(center, r)?)?;
            let p = riesz_from_samples(&samples, center)?.projector;
            let mult = p.trace().re.round().max(1.0) as usize;
            // centroid of the cluster: tr(Ap)/tr(p)
            let lambda = (a * &p).trace() / p.trace();
            let nil = samples.moment(lambda, 1);
            let order = (1..=mult)
                .find(|&k| nil.pow(k).frobenius() <= 1e-8 * scale.powi(k as i32))
                .ok_or(MatError::UnresolvedCluster(lambda))?;
            sd.eigenvalues.push(lambda);
            sd.projectors.push(p);
            sd.nilpotents.push(nil);
            sd.orders.push(order);
        }
        Ok(sd)
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn defects(&self) -> SpectralDataDefects {
        let n = self.dim();
        let mut d = SpectralDataDefects {
            idempotency: 0.0,
            partition: 0.0,
            nilpotent_projection: 0.0,
            nilpotency: 0.0,
        };
        let mut sum = CMatrix::zeros(n);
        for (i, (pi, ai)) in self.projectors.iter().zip(&self.nilpotents).enumerate() {
            sum = &sum + pi;
            for (j, pj) in self.projectors.iter().enumerate() {
                let zero = CMatrix::zeros(n);
                let (pp, ap) = if i == j { (pi, ai) } else { (&zero, &zero) };
                d.idempotency = d.idempotency.max((pi * pj).distance(pp));
                d.nilpotent_projection = d.nilpotent_projection.max((ai * pj).distance(ap));
            }
            d.nilpotent_projection = d.nilpotent_projection.max((ai * pi).distance(&(pi * ai)));
            d.nilpotency = d.nilpotency.max(ai.pow(self.orders[i]).frobenius());
        }
        d.partition = sum.distance(&CMatrix::identity(n));
        d
    }
}

/// Characteristic polynomial coefficients (ascending, monic) by
/// Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &CMatrix) -> Vec<C64> {
    let n = a.dim();
    let mut c = vec![ZERO; n + 1];
    c[n] = ONE;
    let mut m = CMatrix::zeros(n);
    for k in 1..=n {
        m = &(a * &m) + &CMatrix::identity(n).scale(c[n - k + 1]);
        c[n - k] = -(a * &m).trace() / k as f64;
    }
    c
}

/// Roots of the characteristic polynomial by Weierstrass (Durand–Kerner)
/// iteration. Multiple roots come back as tight clusters.
pub fn characteristic_roots(a: &CMatrix) -> Vec<C64> {
    let c = characteristic_polynomial(a);
    let n = a.dim();
    let eval = |z: C64| c.iter().rev().fold(ZERO, |acc, &v| acc * z + v);
    let radius = a.gershgorin_bound().max(1e-3);
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..n).map(|k| seed.powu(k as u32) * radius).collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let zi = roots[i];
            let denom: C64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| zi - roots[j])
                .product();
            if denom == ZERO {
                continue;
            }
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            change = change.max(step.norm());
        }
        if change <= 1e-15 * radius {
            break;
        }
    }
    roots
}

/// Single-linkage clusters within `tol`; returns `(mean, spread)` pairs.
fn cluster_roots(roots: &[C64], tol: f64) -> Vec<(C64, f64)> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() <= tol {
                let (old, new) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == old {
                        *l = new;
                    }
                }
            }
        }
    }
    let mut ids: Vec<usize> = label.clone();
    ids.sort_unstable();
    ids.dedup();
    let mut out: Vec<(C64, f64)> = ids
        .iter()
        .map(|&id| {
            let members: Vec<C64> = (0..n).filter(|&i| label[i] == id).map(|i| roots[i]).collect();
            let mean = members.iter().sum::<C64>() / members.len() as f64;
            let spread = members.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
            (mean, spread)
        })
        .collect();
    out.sort_by(|x, y| x.0.re.total_cmp(&y.0.re).then(x.0.im.total_cmp(&y.0.im)));
    out
}

fn isolating_radii(clusters: &[(C64, f64)], scale: f64) -> Vec<f64> {
    clusters
        .iter()
        .enumerate()
        .map(|(i, &(c, _))| {
            let sep = clusters
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &(d, _))| (c - d).norm())
                .fold(f64::INFINITY, f64::min);
            if sep.is_finite() {
                0.45 * sep
            } else {
                0.5 * scale
            }
        })
        .collect()
}

/// `M(φ) = Σᵢ Σ_{k<nᵢ} (1/k!) pᵢ aᵢᵏ (∂ᵏφ)(λᵢ)`.
pub fn spectral_smear(sd: &SpectralDataMatrix, phi: &TestFn2D) -> Result<CMatrix> {
    let n = sd.dim();
    let mut out = CMatrix::zeros(n);
    for i in 0..sd.eigenvalues.len() {
        let order = sd.orders[i];
        if order - 1 > MAX_ORDER {
            return Err(MatError::OrderCap(order));
        }
        let mut term = sd.projectors[i].clone();
        let mut fact = 1.0;
        for k in 0..order {
            if k > 0 {
                term = &term * &sd.nilpotents[i];
                fact *= k as f64;
            }
            let d = phi.del_at(k, sd.eigenvalues[i])?;
            out = &out + &term.scale(d / fact);
        }
    }
    Ok(out)
}

/// `‖M(φ₁)M(φ₂) − M(φ₁φ₂)‖_F`.
pub fn multiplicativity_check(sd: &SpectralDataMatrix, phi1: &TestFn2D, phi2: &TestFn2D) -> Result<f64> {
    let m1 = spectral_smear(sd, phi1)?;
    let m2 = spectral_smear(sd, phi2)?;
    let m12 = spectral_smear(sd, &phi1.mul(phi2)?)?;
    Ok((&m1 * &m2).distance(&m12))
}

/// `Σ_l c_l e^{ilθ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub terms: Vec<(i64, C64)>,
}

impl TrigPoly {
    pub fn eval(&self, theta: f64) -> C64 {
        self.terms
            .iter()
            .map(|&(l, c)| c * C64::from_polar(1.0, l as f64 * theta))
            .sum()
    }

    pub fn degree(&self) -> u64 {
        self.terms.iter().map(|(l, _)| l.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for &(l, c) in &self.terms {
            for &(m, d) in &other.terms {
                terms.push((l + m, c * d));
            }
        }
        TrigPoly { terms }
    }
}

/// `Σ_{|l|≤L} Uˡ φ̂(l)` with `φ̂(l) = (1/2π)∫ e^{−ilθ} φ(θ) dθ` by the
/// trapezoid rule on `max(4(L+1), 256)` points.
pub fn unitary_spectral_smear(u: &CMatrix, phi: &dyn Fn(f64) -> C64, l_max: usize) -> Result<CMatrix> {
    let n = u.dim();
    let defect = (&(&u.adjoint() * u) - &CMatrix::identity(n)).frobenius();
    if defect > 1e-10 {
        return Err(MatError::NotUnitary(defect));
    }
    let n_pts = (4 * (l_max + 1)).max(256);
    let samples: Vec<C64> = (0..n_pts)
        .map(|j| phi(2.0 * PI * j as f64 / n_pts as f64))
        .collect();
    let coeff = |l: i64| {
        let terms: Vec<C64> = samples
            .iter()
            .enumerate()
            .map(|(j, v)| v * C64::from_polar(1.0, -2.0 * PI * (l * j as i64) as f64 / n_pts as f64))
            .collect();
        quad::pairwise_sum(&terms) / n_pts as f64
    };
    let mut out = CMatrix::identity(n).scale(coeff(0));
    let (mut up, mut down) = (CMatrix::identity(n), CMatrix::identity(n));
    let inv = u.adjoint();
    for l in 1..=l_max as i64 {
        up = &up * u;
        down = &down * &inv;
        out = &(&out + &up.scale(coeff(l))) + &down.scale(coeff(-l));
    }
    Ok(out)
}

/// For `A = 0` with the alternative extension `M(φ) = φ(0)I + C(∂̄φ)(0)`,
/// `M(φ)M(ψ) − M(φψ) = (∂̄φ)(0)(∂̄ψ)(0)C²`; multiplicative iff `C² = 0`.
pub fn nonunique_extension_check(c: &CMatrix) -> bool {
    (c * c).frobenius() <= 1e-12
}

/// `‖M(φ)M(ψ) − M(φψ)‖_F` for the extension of [`nonunique_extension_check`].
pub fn nonunique_extension_defect(c: &CMatrix, phi: &TestFn2D, psi: &TestFn2D) -> Result<f64> {
    let n = c.dim();
    let smear = |f: &TestFn2D| -> Result<CMatrix> {
        let z = ZERO;
        Ok(&CMatrix::identity(n).scale(f.eval(z)) + &c.scale(f.del_bar_at(1, z)?))
    };
    let lhs = &smear(phi)? * &smear(psi)?;
    Ok(lhs.distance(&smear(&phi.mul(psi)?)?))
}

/// Default number of contour points for Riesz extraction.
pub const RIESZ_POINTS: usize = DEFAULT_CIRCLE_POINTS;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testfn::TestFn1D;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(rows: &[&[f64]]) -> CMatrix {
        CMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn resolvent_examples() {
        let r = resolvent(&CMatrix::zeros(1), c(2.0, 0.0)).unwrap();
        assert_eq!(r[(0, 0)], c(0.5, 0.0));
        let r = resolvent(&real(&[&[0.0, 1.0], &[0.0, 0.0]]), c(1.0, 0.0)).unwrap();
        assert!(r.distance(&real(&[&[1.0, 1.0], &[0.0, 1.0]])) < 1e-15);
        let a = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let r = resolvent(&a, c(0.0, 1.0)).unwrap();
        let want = CMatrix::diag(&[1.0 / c(-1.0, 1.0), 1.0 / c(-2.0, 1.0)]);
        assert!(r.distance(&want) < 1e-15);
        assert!(matches!(resolvent(&a, c(2.0, 0.0)), Err(MatError::SingularShift(_))));
    }

    #[test]
    fn riesz_examples() {
        let a = real(&[&[5.0, 1.0], &[0.0, 5.0]]);
        let rd = riesz_data(&a, c(5.0, 0.0), 1.0, 64).unwrap();
        assert!(rd.projector.distance(&CMatrix::identity(2)) < 1e-10);
        assert!(rd.nilpotent.distance(&real(&[&[0.0, 1.0], &[0.0, 0.0]])) < 1e-10);
        let a = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let rd = riesz_data(&a, c(1.0, 0.0), 0.4, 64).unwrap();
        assert!(rd.projector.distance(&CMatrix::diag(&[c(1.0, 0.0), c(0.0, 0.0)])) < 1e-10);
        assert!(rd.nilpotent.frobenius() < 1e-10);
    }

    #[test]
    fn straddled_cluster_is_rejected() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let r = riesz_data(&a, c(1.5, 0.0), 0.5 + 1e-3, 64);
        // circle through neither eigenvalue but the contour sum is not a projector
        // once it nearly touches both
        assert!(r.is_ok() || matches!(r, Err(MatError::EnclosureAmbiguous(_))));
        let r = riesz_data(&a, c(1.0, 0.0), 1.0 + 1e-9, 8);
        assert!(matches!(r, Err(MatError::EnclosureAmbiguous(_))), "{r:?}");
    }

    #[test]
    fn completeness_examples() {
        assert!(completeness_contour(&CMatrix::zeros(1), 1.0).unwrap() <= 1e-13);
        let a = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(completeness_contour(&a, 3.0).unwrap() <= 1e-12);
        assert!(matches!(completeness_contour(&a, 1.5), Err(MatError::RadiusTooSmall { .. })));
    }

    #[test]
    fn characteristic_polynomial_of_diag() {
        let a = CMatrix::diag(&[c(1.0, 0.0), c(2.0, 0.0), c(-1.0, 0.5)]);
        let mut roots = characteristic_roots(&a);
        roots.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (r, want) in roots.iter().zip([c(-1.0, 0.5), c(1.0, 0.0), c(2.0, 0.0)]) {
            assert!((r - want).norm() < 1e-12);
        }
    }

    #[test]
    fn spectral_data_of_jordan_block() {
        let a = real(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]]);
        let sd = SpectralDataMatrix::from_matrix(&a).unwrap();
        assert_eq!(sd.orders, vec![3]);
        assert!((sd.eigenvalues[0] - c(2.0, 0.0)).norm() < 1e-10);
        assert!(sd.defects().max() < 1e-10, "{:?}", sd.defects());
    }

    #[test]
    fn nonunique_examples() {
        assert!(nonunique_extension_check(&CMatrix::zeros(2)));
        assert!(nonunique_extension_check(&real(&[&[0.0, 1.0], &[0.0, 0.0]])));
        assert!(!nonunique_extension_check(&CMatrix::identity(2)));
        let phi = TestFn2D::product(
            TestFn1D::poly_times_bump(-1.0, 1.0, &[1.0, 0.5]).unwrap(),
            TestFn1D::poly_times_bump(-1.0, 1.0, &[1.0, -0.3]).unwrap(),
        );
        let psi = TestFn2D::product(
            TestFn1D::poly_times_bump(-1.0, 1.0, &[0.2, 1.0]).unwrap(),
            TestFn1D::poly_times_bump(-1.0, 1.0, &[1.0, 0.7]).unwrap(),
        );
        let nil = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(nonunique_extension_defect(&nil, &phi, &psi).unwrap() < 1e-15);
        let id = CMatrix::identity(2);
        let d = nonunique_extension_defect(&id, &phi, &psi).unwrap();
        let want = (phi.del_bar_at(1, ZERO).unwrap() * psi.del_bar_at(1, ZERO).unwrap()).norm() * 2f64.sqrt();
        assert!((d - want).abs() < 1e-14 && d > 1e-3);
    }
}
