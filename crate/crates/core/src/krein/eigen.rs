//! Boundary values of `C`, the generalized eigenvectors
//! `|α_x⟩ = N(x)(C₁(x)|δ_x⟩ + h(x)·P/(x − Ω)|g⟩)`,
//! `⟨α′_x| = N(x)(C₁(x)⟨δ_x| + g(x)·⟨h|P/(x − Ω))`, `N = (C₁² + π²C₂²)^{−1/2}`,
//! and the checks built on them.
//!
//! Every principal value here is a single one-dimensional integral; nested
//! PV×PV products are always reduced to iterated single PVs first.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{KreinError, KreinModel, Regime, Result, REFERENCE_ORDER};
use crate::quad::{self, Circle, Grid};
use crate::testfn::TestFn1D;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `C(x ± i0) = C₁(x) ± iπC₂(x)` and `N(x) = (C₁² + π²C₂²)^{−1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryValue {
    pub c1: f64,
    pub c2: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `∫ φ(x)|α_x⟩ dx`
    Right,
    /// `∫ φ(x)⟨α′_x| dx`
    Left,
}

type ProfileFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// A function on `G` that is smooth on each listed piece, vanishes to high
/// order at the piece ends and is zero off the pieces. Each piece lies in
/// one slit.
#[derive(Clone)]
pub struct Profile {
    f: ProfileFn,
    pieces: Vec<(f64, f64)>,
}

impl std::fmt::Debug for Profile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Profile").field("pieces", &self.pieces).finish()
    }
}

impl Profile {
    pub fn from_fn<F>(f: F, pieces: Vec<(f64, f64)>) -> Self
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        Profile {
            f: Arc::new(f),
            pieces,
        }
    }

    pub fn from_testfn(phi: &TestFn1D) -> Self {
        let phi = phi.clone();
        let pieces = vec![phi.support()];
        Self::from_fn(move |x| phi.eval_c(x), pieces)
    }

    /// `Σ cₖφₖ`
    pub fn combination(terms: &[(C64, TestFn1D)]) -> Self {
        let terms = terms.to_vec();
        let mut pieces: Vec<(f64, f64)> = terms.iter().map(|(_, t)| t.support()).collect();
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
        pieces.dedup();
        Self::from_fn(move |x| terms.iter().map(|(c, t)| c * t.eval(x)).sum(), merge(pieces))
    }

    pub fn pieces(&self) -> &[(f64, f64)] {
        &self.pieces
    }

    pub fn eval(&self, x: f64) -> C64 {
        if self.pieces.iter().any(|&(a, b)| x > a && x < b) {
            (self.f)(x)
        } else {
            ZERO
        }
    }

    pub fn conj(&self) -> Self {
        let f = self.f.clone();
        Profile {
            f: Arc::new(move |x| f(x).conj()),
            pieces: self.pieces.clone(),
        }
    }
}

fn merge(mut pieces: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for p in pieces {
        match out.last_mut() {
            Some(last) if p.0 < last.1 => last.1 = last.1.max(p.1),
            _ => out.push(p),
        }
    }
    out
}

/// `q(y)` sampled on a Gauss rule per piece, for repeated Cauchy integrals
/// `∫ q(y)/(x − y) dy` at varying `x`.
struct Sampled<'a> {
    q: Box<dyn Fn(f64) -> C64 + Sync + 'a>,
    grids: Vec<Grid>,
    values: Vec<Vec<C64>>,
}

impl<'a> Sampled<'a> {
    fn new<F>(q: F, pieces: &[(f64, f64)], order: usize) -> Result<Self>
    where
        F: Fn(f64) -> C64 + Sync + 'a,
    {
        let grids = pieces
            .iter()
            .map(|&(a, b)| quad::gauss_grid(a, b, order))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let values = grids
            .iter()
            .map(|g| g.nodes.par_iter().map(|&y| q(y)).collect())
            .collect();
        Ok(Sampled {
            q: Box::new(q),
            grids,
            values,
        })
    }

    /// `∫ q(y)/(x − y) dy`, principal value when `x` is inside a piece.
    fn hilbert(&self, x: f64) -> Result<C64> {
        let mut s = ZERO;
        for (g, v) in self.grids.iter().zip(&self.values) {
            s -= quad::cauchy_pv_on(&*self.q, v, x, g)?;
        }
        Ok(s)
    }

    /// `∫ q(y) r(y) dy` for a smooth `r`.
    fn integrate_against<R: Fn(f64) -> C64>(&self, r: R) -> C64 {
        let mut s = ZERO;
        for (g, v) in self.grids.iter().zip(&self.values) {
            let t: Vec<C64> = g
                .nodes
                .iter()
                .zip(&g.weights)
                .zip(v)
                .map(|((&y, &w), &q)| q * r(y) * w)
                .collect();
            s += quad::pairwise_sum(&t);
        }
        s
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GramCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub defect: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MuPairing {
    /// `⟨f₁|μ(x)|f₂⟩` from the δ + PV kernel split.
    pub value: C64,
    /// `⟨f₁|α_x⟩⟨α′_x|f₂⟩`
    pub factorized: C64,
    pub defect: f64,
}

#[derive(Debug, Clone)]
pub struct Completeness {
    /// `(1/2πi)∮ R(z)f dz`
    pub contour: Vec<C64>,
    /// Discrete projectors plus `∫_G |α_x⟩⟨α′_x|f⟩ dx`.
    pub spectral: Vec<C64>,
    pub contour_defect: f64,
    pub spectral_defect: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct MultiplicativityCheck {
    pub lhs: C64,
    pub rhs: C64,
    pub defect: f64,
}

impl KreinModel {
    /// `C₁(x) = 1 + PV∫₁^c 2s g(s)²/(x² − s²) ds`, `C₂(x) = g(x)h(x)`.
    pub fn char_boundary(&self, x: f64) -> Result<BoundaryValue> {
        let ax = x.abs();
        let f = |s: f64| {
            let g = self.g_at(s);
            C64::new(2.0 * s * g * g / (ax + s), 0.0)
        };
        let values: Vec<C64> = (0..self.reference.len())
            .map(|j| {
                let s = self.reference.nodes[j];
                C64::new(2.0 * s * self.reference_g2[j] / (ax + s), 0.0)
            })
            .collect();
        let c1 = 1.0 - quad::cauchy_pv_on(&f, &values, ax, &self.reference)?.re;
        let c2 = self.g_at(x) * self.h_at(x);
        Ok(BoundaryValue {
            c1,
            c2,
            norm: 1.0 / c1.hypot(PI * c2),
        })
    }

    /// `C₁ ± iπC₂` at every grid node, computed once.
    pub fn node_boundary(&self) -> Result<Arc<Vec<BoundaryValue>>> {
        if let Some(v) = self.node_boundary.get() {
            return Ok(v.clone());
        }
        let v = self
            .nodes
            .par_iter()
            .map(|&x| self.char_boundary(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.node_boundary.get_or_init(|| Arc::new(v)).clone())
    }

    fn check_pieces(&self, pieces: &[(f64, f64)]) -> Result<()> {
        for &(a, b) in pieces {
            let right = a >= 1.0 && b <= self.c;
            let left = a >= -self.c && b <= -1.0;
            if !(a < b && (right || left)) {
                return Err(KreinError::SupportViolation(a, b));
            }
        }
        Ok(())
    }

    fn slits(&self) -> Vec<(f64, f64)> {
        vec![(-self.c, -1.0), (1.0, self.c)]
    }

    /// Right smear `ω ↦ N(ω)C₁(ω)q(ω) + g(ω)·PV∫ q(x)N(x)h(x)/(x − ω) dx`;
    /// the left smear swaps `g` and `h`. The `x` rule has `n + 1` nodes per
    /// piece so that it never coincides with the `n`-point slit rule.
    pub fn smear_weight(
        &self,
        q: &(dyn Fn(f64) -> C64 + Sync),
        pieces: &[(f64, f64)],
        side: Side,
    ) -> Result<Vec<C64>> {
        self.check_pieces(pieces)?;
        let (outer, inner): (&[f64], fn(&KreinModel, f64) -> f64) = match side {
            Side::Right => (&self.g, KreinModel::h_at),
            Side::Left => (&self.h, KreinModel::g_at),
        };
        let kernel = |x: f64| -> C64 {
            let bv = self.char_boundary(x).expect("finite boundary value");
            q(x) * (bv.norm * inner(self, x))
        };
        let sampled = Sampled::new(kernel, pieces, self.n + 1)?;
        let boundary = self.node_boundary()?;
        let inside = |x: f64| pieces.iter().any(|&(a, b)| x > a && x < b);
        (0..self.len())
            .into_par_iter()
            .map(|j| {
                let w = self.nodes[j];
                let bv = boundary[j];
                let local = if inside(w) {
                    q(w) * (bv.norm * bv.c1)
                } else {
                    ZERO
                };
                // ∫ F(x)/(x − ω) dx = −∫ F(x)/(ω − x) dx
                Ok(local - sampled.hilbert(w)? * outer[j])
            })
            .collect()
    }

    /// `∫ φ(x)|α_x⟩ dx` (right) or `∫ φ(x)⟨α′_x| dx` (left) on the grid.
    pub fn eigenfunction_smear(&self, phi: &TestFn1D, side: Side) -> Result<Vec<C64>> {
        let (a, b) = phi.support();
        self.check_pieces(&[(a, b)])?;
        let q = |x: f64| phi.eval_c(x);
        self.smear_weight(&q, &[(a, b)], side)
    }

    /// `⟨smear(φ₁, left), smear(φ₂, right)⟩` against `∫φ₁φ₂`, relative to
    /// `max(|∫φ₁φ₂|, ‖φ₁‖‖φ₂‖)`.
    pub fn orthogonality_gram(&self, phi1: &TestFn1D, phi2: &TestFn1D) -> Result<GramCheck> {
        let u = self.eigenfunction_smear(phi1, Side::Left)?;
        let v = self.eigenfunction_smear(phi2, Side::Right)?;
        let lhs = self.bilinear(&u, &v);
        let (a1, b1) = phi1.support();
        let (a2, b2) = phi2.support();
        let (lo, hi) = (a1.max(a2), b1.min(b2));
        let rhs = if lo < hi {
            let g = quad::gauss_grid(lo, hi, REFERENCE_ORDER)?;
            quad::integrate(|x| C64::new(phi1.eval(x) * phi2.eval(x), 0.0), &g)?
        } else {
            ZERO
        };
        let l2 = |phi: &TestFn1D| -> Result<f64> {
            let (a, b) = phi.support();
            let g = quad::gauss_grid(a, b, REFERENCE_ORDER)?;
            Ok(quad::integrate(|x| C64::new(phi.eval(x).powi(2), 0.0), &g)?.re.sqrt())
        };
        let scale = rhs.norm().max(l2(phi1)? * l2(phi2)?);
        Ok(GramCheck {
            lhs,
            rhs,
            defect: (lhs - rhs).norm() / scale,
        })
    }

    /// `⟨f₁|μ(x)|f₂⟩` from the kernel split
    /// `f̄₁(x)f₂(x) + (A₁C₂A₂ + A₁C₁B₂ + B₁C₁A₂ − π²B₁C₂B₂)/(C₁² + π²C₂²)` with
    /// `A₁ = PV∫ f̄₁g/(x − ω)`, `A₂ = PV∫ hf₂/(x − ω)`, `B₁ = g(x)f̄₁(x)`,
    /// `B₂ = h(x)f₂(x)`, compared with `⟨f₁|α_x⟩⟨α′_x|f₂⟩`.
    pub fn mu_apply(&self, x: f64, f1: &Profile, f2: &Profile) -> Result<MuPairing> {
        self.check_pieces(f1.pieces())?;
        self.check_pieces(f2.pieces())?;
        let kernel = MuKernel::new(self, f1, f2)?;
        kernel.at(x)
    }

    /// `⟨α′_x|f⟩ = N(C₁f(x) + g(x)·PV∫ h f/(x − ω))` on a closure.
    fn beta_fn<'a>(&'a self, f: &'a Profile, sampled: &'a Sampled<'a>) -> impl Fn(f64) -> C64 + Sync + 'a {
        move |x: f64| {
            let bv = self.char_boundary(x).expect("finite boundary value");
            let a2 = sampled.hilbert(x).expect("finite PV");
            (f.eval(x) * bv.c1 + a2 * self.g_at(x)) * bv.norm
        }
    }

    /// Reconstruct `f` by the contour integral `(1/2πi)∮_{|z|=r}R(z)f dz` and
    /// by the spectral route `Σ discrete + ∫_G |α_x⟩⟨α′_x|f⟩ dx`.
    pub fn completeness_apply(&self, f: &Profile, r_big: f64) -> Result<Completeness> {
        self.check_pieces(f.pieces())?;
        let cf = self.find_zeros()?;
        let reach = cf.zeros.iter().map(|z| z.location.norm()).fold(self.c, f64::max);
        if !(r_big > reach) {
            return Err(KreinError::ContourHitsSpectrum(r_big));
        }
        let f_grid = self.sample(|x| f.eval(x));
        let f_norm = self.norm(&f_grid);
        let contour = self.contour_apply(
            &Circle::with_default_points(ZERO, r_big)?,
            |_| C64::new(1.0, 0.0),
            &f_grid,
        )?;

        let hf = |y: f64| f.eval(y) * self.h_at(y);
        let sampled = Sampled::new(hf, f.pieces(), REFERENCE_ORDER)?;
        let beta = self.beta_fn(f, &sampled);
        let mut spectral = self.smear_weight(&beta, &self.slits(), Side::Right)?;
        if cf.regime != Regime::None {
            let disc = self.discrete_spectrum(&cf)?;
            for (s, d) in spectral.iter_mut().zip(disc.projector_apply(&f_grid)) {
                *s += d;
            }
        }
        let gap = |v: &[C64]| {
            let d: Vec<C64> = v.iter().zip(&f_grid).map(|(a, b)| a - b).collect();
            self.norm(&d) / f_norm
        };
        let contour_defect = gap(&contour);
        let spectral_defect = gap(&spectral);
        Ok(Completeness {
            contour,
            spectral,
            contour_defect,
            spectral_defect,
            defect: contour_defect.max(spectral_defect),
        })
    }

    /// `⟨f₁|M(φ₁)M(φ₂)|f₂⟩` against `⟨f₁|M(φ₁φ₂)|f₂⟩` in the continuum:
    /// the left side pairs `∫φ₁(x)⟨f₁|α_x⟩⟨α′_x| dx` with
    /// `∫φ₂(y)|α_y⟩⟨α′_y|f₂⟩ dy` on the grid, the right side is
    /// `∫φ₁φ₂⟨f₁|α_x⟩⟨α′_x|f₂⟩ dx`.
    pub fn continuum_multiplicativity(
        &self,
        phi1: &TestFn1D,
        phi2: &TestFn1D,
        f1: &Profile,
        f2: &Profile,
    ) -> Result<MultiplicativityCheck> {
        let kernel = MuKernel::new(self, f1, f2)?;
        let s1 = [phi1.support()];
        let s2 = [phi2.support()];
        self.check_pieces(&s1)?;
        self.check_pieces(&s2)?;
        let left_w = |x: f64| phi1.eval(x) * kernel.gamma(x).expect("finite PV");
        let right_w = |x: f64| phi2.eval(x) * kernel.beta(x).expect("finite PV");
        let u = self.smear_weight(&left_w, &s1, Side::Left)?;
        let v = self.smear_weight(&right_w, &s2, Side::Right)?;
        let lhs = self.bilinear(&u, &v);
        let (lo, hi) = (s1[0].0.max(s2[0].0), s1[0].1.min(s2[0].1));
        let rhs = if lo < hi {
            let g = quad::gauss_grid(lo, hi, 128)?;
            quad::integrate(|x| left_w(x) * right_w(x), &g)?
        } else {
            ZERO
        };
        let l2 = |w: &dyn Fn(f64) -> C64, (a, b): (f64, f64)| -> Result<f64> {
            let g = quad::gauss_grid(a, b, 128)?;
            Ok(quad::integrate(|x| C64::new(w(x).norm_sqr(), 0.0), &g)?.re.sqrt())
        };
        let scale = rhs.norm().max(l2(&left_w, s1[0])? * l2(&right_w, s2[0])?);
        Ok(MultiplicativityCheck {
            lhs,
            rhs,
            defect: (lhs - rhs).norm() / scale,
        })
    }

    /// `∫φ(x)⟨f₁|μ(x)R(ζ)|f₂⟩ dx` against `∫φ(x)/(ζ − x)·⟨f₁|μ(x)|f₂⟩ dx`,
    /// with `R(ζ)f₂` evaluated by Krein's formula in the continuum.
    pub fn insertion_check(&self, phi: &TestFn1D, f1: &Profile, f2: &Profile, zeta: C64) -> Result<MultiplicativityCheck> {
        self.check_pieces(f2.pieces())?;
        let (a, b) = phi.support();
        self.check_pieces(&[(a, b)])?;
        let cz = self.char_reference(zeta)?;
        let hf = |y: f64| f2.eval(y) * self.h_at(y) / (zeta - y);
        let sampled = Sampled::new(hf, f2.pieces(), REFERENCE_ORDER)?;
        let coupling = sampled.integrate_against(|_| C64::new(1.0, 0.0)) / cz;
        let f2c = f2.clone();
        let model = self.clone();
        let resolved = Profile::from_fn(
            move |y| (f2c.eval(y) + coupling * model.g_at(y)) / (zeta - y),
            self.slits(),
        );
        let with_r = MuKernel::new(self, f1, &resolved)?;
        let plain = MuKernel::new(self, f1, f2)?;
        let grid = quad::gauss_grid(a, b, 128)?;
        let lhs_terms = grid
            .nodes
            .par_iter()
            .map(|&x| Ok(with_r.at(x)?.value * phi.eval(x)))
            .collect::<Result<Vec<_>>>()?;
        let rhs_terms = grid
            .nodes
            .par_iter()
            .map(|&x| Ok(plain.at(x)?.value * phi.eval(x) / (zeta - x)))
            .collect::<Result<Vec<_>>>()?;
        let lhs = grid.sum(&lhs_terms);
        let rhs = grid.sum(&rhs_terms);
        Ok(MultiplicativityCheck {
            lhs,
            rhs,
            defect: (lhs - rhs).norm() / rhs.norm().max(1e-300),
        })
    }
}

/// Precomputed Cauchy integrals of `f̄₁g` and `hf₂` for evaluating
/// `⟨f₁|α_x⟩`, `⟨α′_x|f₂⟩` and `⟨f₁|μ(x)|f₂⟩` at many `x`.
struct MuKernel<'a> {
    model: &'a KreinModel,
    f1: &'a Profile,
    f2: &'a Profile,
    a1: Sampled<'a>,
    a2: Sampled<'a>,
}

impl<'a> MuKernel<'a> {
    fn new(model: &'a KreinModel, f1: &'a Profile, f2: &'a Profile) -> Result<Self> {
        model.check_pieces(f1.pieces())?;
        model.check_pieces(f2.pieces())?;
        let q1 = move |y: f64| f1.eval(y).conj() * model.g_at(y);
        let q2 = move |y: f64| f2.eval(y) * model.h_at(y);
        Ok(MuKernel {
            model,
            f1,
            f2,
            a1: Sampled::new(q1, f1.pieces(), REFERENCE_ORDER)?,
            a2: Sampled::new(q2, f2.pieces(), REFERENCE_ORDER)?,
        })
    }

    /// `⟨f₁|α_x⟩ = N(C₁f̄₁(x) + h(x)A₁)`
    fn gamma(&self, x: f64) -> Result<C64> {
        let bv = self.model.char_boundary(x)?;
        Ok((self.f1.eval(x).conj() * bv.c1 + self.a1.hilbert(x)? * self.model.h_at(x)) * bv.norm)
    }

    /// `⟨α′_x|f₂⟩ = N(C₁f₂(x) + g(x)A₂)`
    fn beta(&self, x: f64) -> Result<C64> {
        let bv = self.model.char_boundary(x)?;
        Ok((self.f2.eval(x) * bv.c1 + self.a2.hilbert(x)? * self.model.g_at(x)) * bv.norm)
    }

    fn at(&self, x: f64) -> Result<MuPairing> {
        if !self.model.in_g(x) {
            return Err(KreinError::XOutsideG(x));
        }
        let m = self.model;
        let bv = m.char_boundary(x)?;
        let (c1, c2) = (bv.c1, bv.c2);
        let a1 = self.a1.hilbert(x)?;
        let a2 = self.a2.hilbert(x)?;
        let f1x = self.f1.eval(x).conj();
        let f2x = self.f2.eval(x);
        let b1 = f1x * m.g_at(x);
        let b2 = f2x * m.h_at(x);
        let value = f1x * f2x
            + (a1 * c2 * a2 + a1 * c1 * b2 + b1 * c1 * a2 - b1 * c2 * b2 * (PI * PI))
                / (c1 * c1 + PI * PI * c2 * c2);
        let factorized = self.gamma(x)? * self.beta(x)?;
        Ok(MuPairing {
            value,
            factorized,
            defect: (value - factorized).norm() / value.norm().max(1.0),
        })
    }
}
