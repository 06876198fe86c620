use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::quad;

/// Finite-rank operator `Σ |ketₖ⟩⟨braₖ|` on grid vectors, with bilinear
/// weighted bras: `(Kf)(ω) = Σₖ ketₖ(ω) Σⱼ wⱼ braₖ(ωⱼ) f(ωⱼ)`.
#[derive(Debug, Clone)]
pub struct LowRank {
    pub weights: Arc<[f64]>,
    pub terms: Vec<(Vec<C64>, Vec<C64>)>,
}

fn pair(w: &[f64], u: &[C64], v: &[C64]) -> C64 {
    let t: Vec<C64> = u.iter().zip(v).zip(w).map(|((a, b), w)| a * b * w).collect();
    quad::pairwise_sum(&t)
}

impl LowRank {
    pub fn rank_one(weights: Arc<[f64]>, ket: Vec<C64>, bra: Vec<C64>) -> Self {
        LowRank {
            weights,
            terms: vec![(ket, bra)],
        }
    }

    pub fn zero(weights: Arc<[f64]>) -> Self {
        LowRank {
            weights,
            terms: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); f.len()];
        for (ket, bra) in &self.terms {
            let s = pair(&self.weights, bra, f);
            for (o, k) in out.iter_mut().zip(ket) {
                *o += k * s;
            }
        }
        out
    }

    /// Row vector `uᵀK` in the same bilinear pairing: `Σₖ (Σ w u ketₖ) braₖ`.
    pub fn apply_left(&self, u: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); u.len()];
        for (ket, bra) in &self.terms {
            let s = pair(&self.weights, u, ket);
            for (o, b) in out.iter_mut().zip(bra) {
                *o += b * s;
            }
        }
        out
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &LowRank) -> LowRank {
        let mut terms = Vec::new();
        for (k1, b1) in &self.terms {
            for (k2, b2) in &other.terms {
                let s = pair(&self.weights, b1, k2);
                terms.push((k1.clone(), b2.iter().map(|b| b * s).collect()));
            }
        }
        LowRank {
            weights: self.weights.clone(),
            terms,
        }
    }

    pub fn scale(&self, s: C64) -> LowRank {
        LowRank {
            weights: self.weights.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, b)| (k.clone(), b.iter().map(|x| x * s).collect()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &LowRank) -> LowRank {
        let mut terms = self.terms.clone();
        terms.extend(other.scale(C64::new(-1.0, 0.0)).terms);
        LowRank {
            weights: self.weights.clone(),
            terms,
        }
    }

    pub fn trace(&self) -> C64 {
        self.terms.iter().map(|(k, b)| pair(&self.weights, k, b)).sum()
    }

    /// Hilbert–Schmidt norm for the weighted inner product.
    pub fn hs_norm(&self) -> f64 {
        let w = &self.weights;
        let herm = |u: &[C64], v: &[C64]| -> C64 {
            let t: Vec<C64> = u.iter().zip(v).zip(w.iter()).map(|((a, b), w)| a.conj() * b * w).collect();
            quad::pairwise_sum(&t)
        };
        let mut s = C64::new(0.0, 0.0);
        for (ki, bi) in &self.terms {
            for (kj, bj) in &self.terms {
                s += herm(kj, ki) * herm(bj, bi);
            }
        }
        s.re.max(0.0).sqrt()
    }
}
