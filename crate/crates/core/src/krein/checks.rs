use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::{CharFunction, KreinModel, Regime, Result};

/// Dense real operator in the sample representation: `(Mf)ᵢ = Σⱼ Mᵢⱼ fⱼ`.
struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: vec![0.0; n * n],
        }
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Hilbert–Schmidt norm for `⟨u|v⟩ = Σ w ū v`: `Σ |Mᵢⱼ|² wᵢ/wⱼ`.
    fn hs(&self, w: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.at(i, j).powi(2) * w[i] / w[j];
            }
        }
        s.sqrt()
    }

    fn sub(&self, other: &Dense) -> Dense {
        Dense {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `S·M·S` with `(Sf)(ω) = ½(f(ω) + f(−ω))`; node `i` mirrors `n − 1 − i`.
    fn even_sandwich(&self) -> Dense {
        let n = self.n;
        let mut out = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let (ii, jj) = (n - 1 - i, n - 1 - j);
                out.data[i * n + j] =
                    0.25 * (self.at(i, j) + self.at(ii, j) + self.at(i, jj) + self.at(ii, jj));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct NonNormality {
    /// `‖HH* − H*H‖_HS`
    pub comm_norm: f64,
    /// `c + ‖g‖‖h‖`, an upper bound for `‖H‖`.
    pub scale: f64,
    /// Largest relative defect of `S·H*H·S = Ω²S` and
    /// `S·HH*·S = Ω²S + |Ωh⟩⟨g| + |g⟩⟨Ωh| + ‖h‖²|g⟩⟨g|`.
    pub s_identity_defect: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckRow {
    pub n: usize,
    pub regime: Regime,
    pub zeros: Vec<C64>,
    /// `max |z_N − z₀|` over the zeros; `∞` if the regime differs.
    pub gap: f64,
}

impl KreinModel {
    fn dense_h(&self, adjoint: bool) -> Dense {
        let n = self.len();
        let w = self.weights();
        let (ket, bra) = if adjoint { (self.h(), self.g()) } else { (self.g(), self.h()) };
        let mut m = Dense::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = ket[i] * bra[j] * w[j];
            }
            m.data[i * n + i] += self.nodes()[i];
        }
        m
    }

    /// `A·B` where `A` is `H` (or `H*`) applied column by column.
    fn h_times(&self, b: &Dense, adjoint: bool) -> Dense {
        let n = self.len();
        let w = self.weights();
        let (ket, bra) = if adjoint { (self.h(), self.g()) } else { (self.g(), self.h()) };
        let cols: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let col: Vec<f64> = (0..n).map(|i| b.at(i, j)).collect();
                let s: f64 = (0..n).map(|k| w[k] * bra[k] * col[k]).sum();
                (0..n).map(|i| self.nodes()[i] * col[i] + ket[i] * s).collect()
            })
            .collect();
        let mut out = Dense::zeros(n);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                out.data[i * n + j] = col[i];
            }
        }
        out
    }

    /// Commutator norm `‖HH* − H*H‖` and the even-part identities.
    pub fn nonnormality_check(&self) -> NonNormality {
        let n = self.len();
        let w = self.weights();
        let h_mat = self.dense_h(false);
        let hs_mat = self.dense_h(true);
        let hhs = self.h_times(&hs_mat, false);
        let hsh = self.h_times(&h_mat, true);
        let comm_norm = hhs.sub(&hsh).hs(w);

        let gv = self.g();
        let hv = self.h();
        let g_norm = gv.iter().zip(w).map(|(g, w)| g * g * w).sum::<f64>().sqrt();
        let h_norm2: f64 = hv.iter().zip(w).map(|(h, w)| h * h * w).sum();
        let scale = self.c() + g_norm * h_norm2.sqrt();

        let mut omega2_s = Dense::zeros(n);
        for i in 0..n {
            let x2 = self.nodes()[i].powi(2);
            omega2_s.data[i * n + i] += 0.5 * x2;
            omega2_s.data[i * n + (n - 1 - i)] += 0.5 * x2;
        }
        let mut rhs_hhs = Dense::zeros(n);
        for i in 0..n {
            let oh_i = self.nodes()[i] * hv[i];
            for j in 0..n {
                let oh_j = self.nodes()[j] * hv[j];
                rhs_hhs.data[i * n + j] = omega2_s.at(i, j)
                    + (oh_i * gv[j] + gv[i] * oh_j + h_norm2 * gv[i] * gv[j]) * w[j];
            }
        }
        let d1 = hsh.even_sandwich().sub(&omega2_s).hs(w);
        let d2 = hhs.even_sandwich().sub(&rhs_hhs).hs(w);
        NonNormality {
            comm_norm,
            scale,
            s_identity_defect: d1.max(d2) / (scale * scale),
        }
    }

    /// Zeros of the `n`-point discrete characteristic function for each `n`,
    /// against the zeros `cf` of this model.
    pub fn discrete_crosscheck(&self, cf: &CharFunction, n_sequence: &[usize]) -> Result<Vec<CrosscheckRow>> {
        n_sequence
            .iter()
            .map(|&n| {
                let coarse = self.refined(n)?.find_zeros()?;
                let zeros: Vec<C64> = coarse.zeros.iter().map(|z| z.location).collect();
                let gap = if coarse.regime != cf.regime || zeros.len() != cf.zeros.len() {
                    f64::INFINITY
                } else {
                    zeros
                        .iter()
                        .zip(&cf.zeros)
                        .map(|(a, b)| (a - b.location).norm())
                        .fold(0.0, f64::max)
                };
                Ok(CrosscheckRow {
                    n,
                    regime: coarse.regime,
                    zeros,
                    gap,
                })
            })
            .collect()
    }
}
