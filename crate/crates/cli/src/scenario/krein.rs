use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde_json::{json, Value};

use spectral_dist::krein::{CharFunction, KreinError, KreinModel, Profile, Regime, Side};
use spectral_dist::testfn::TestFn1D;
use spectral_dist::C64;

use crate::config::{KreinParams, PlotKind, Scenario};
use crate::report::{Checks, PlotTable, Relation};

pub const CHECKS: &[&str] = &[
    "resolvent_equation",
    "krein_formula",
    "zero_residual",
    "crosscheck_gap",
    "residue_trace",
    "jordan_relations",
    "jordan_hp",
    "gram",
    "gram_disjoint",
    "completeness_contour",
    "completeness_spectral",
    "annihilation",
    "commutator",
    "s_identity",
    "continuum_multiplicativity",
    "insertion",
];

/// Output of a Krein run besides the check table.
pub struct KreinOutcome {
    pub data: BTreeMap<String, Value>,
    pub plot_data: BTreeMap<PlotKind, PlotTable>,
    pub grid_sizes: Vec<usize>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Test bump inside the right slit, its mirror partner in the left slit, and
/// a two-slit profile `f` for the reconstruction checks.
struct Probes {
    bump: TestFn1D,
    far: TestFn1D,
    profile: Profile,
}

impl Probes {
    fn new(p: &KreinParams) -> Result<Self, KreinError> {
        let w = p.c - 1.0;
        let (a, b) = p.test_bump.unwrap_or((1.0 + 0.2 * w, 1.0 + 0.8 * w));
        let bump = TestFn1D::bump(a, b)?;
        let far = TestFn1D::bump(-b, -a)?;
        let profile = Profile::combination(&[
            (c(1.0, 0.0), TestFn1D::poly_times_bump(1.0 + 0.1 * w, 1.0 + 0.9 * w, &[1.0, 0.5])?),
            (c(0.0, 0.7), TestFn1D::bump(-1.0 - 0.8 * w, -1.0 - 0.2 * w)?),
        ]);
        Ok(Probes { bump, far, profile })
    }
}

fn diff_norm(m: &KreinModel, a: &[C64], b: &[C64]) -> f64 {
    let d: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    m.norm(&d)
}

/// Deterministic off-axis sample points spread around the slits.
fn probe_points(cmax: f64) -> Vec<C64> {
    (0..20)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 20.0 + 0.3;
            let im = (0.1 + 1.5 * t.sin().abs()) * if k % 2 == 0 { 1.0 } else { -1.0 };
            c((cmax + 1.0) * t.cos(), im)
        })
        .collect()
}

fn zeros_json(cf: &CharFunction) -> Value {
    Value::Array(
        cf.zeros
            .iter()
            .map(|z| json!({"re": z.location.re, "im": z.location.im, "multiplicity": z.multiplicity}))
            .collect(),
    )
}

pub fn run(sc: &Scenario, p: &KreinParams, checks: &mut Checks) -> Result<KreinOutcome, KreinError> {
    let profile = TestFn1D::poly_times_bump(1.0, p.c, &p.profile)?;
    let m = KreinModel::with_profile(p.c, p.kappa, profile, p.n)?;
    let probes = Probes::new(p)?;
    let f = m.sample(|w| probes.profile.eval(w));
    let tol = |name: &str, default: f64| sc.tolerance(name, default);
    let mut data = BTreeMap::new();
    let mut plot_data = BTreeMap::new();

    let (c0, c1) = m.edge_values();
    data.insert("C_at_0".into(), json!(c0));
    data.insert("C_at_1".into(), json!(c1));
    data.insert("kappa_star".into(), json!(m.kappa_star()));

    checks.at_most(
        "resolvent_equation",
        "R(z1) - R(z2) = (z2 - z1) R(z1) R(z2)",
        tol("resolvent_equation", 1e-11),
        [(c(3.0, 0.0), c(0.0, 2.0)), (c(0.5, 0.5), c(-1.5, -0.3)), (c(2.5, 1.0), c(0.0, -4.0))]
            .iter()
            .map(|&(z1, z2)| m.resolvent_equation_residual(z1, z2, &f))
            .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v))),
    );
    checks.at_most(
        "krein_formula",
        "(z - H) R(z) f = f",
        tol("krein_formula", 1e-11),
        probe_points(p.c)
            .iter()
            .map(|&z| m.resolvent_residual(z, &f))
            .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v))),
    );

    let zeros = m.find_zeros();
    let regime = match &zeros {
        Ok(cf) => cf.regime.as_str(),
        Err(KreinError::RegimeUnsupported { .. }) => "unsupported",
        Err(e) => return Err(e.clone()),
    };
    data.insert("regime".into(), json!(regime));
    let discrete = match &zeros {
        Ok(cf) if cf.regime != Regime::None => {
            data.insert("zeros".into(), zeros_json(cf));
            match cf.regime {
                Regime::ImaginaryPair => {
                    data.insert("u0".into(), json!(cf.zeros[0].location.im.abs()));
                }
                Regime::RealPair => {
                    data.insert("x0".into(), json!(cf.zeros[0].location.re.abs()));
                }
                _ => {}
            }
            let (anchor, default) = if cf.regime == Regime::DoubleZero {
                ("|C(0)| at a double zero", 1e-10)
            } else {
                ("|C(z0)| at the located zeros", 1e-12)
            };
            checks.at_most("zero_residual", anchor, tol("zero_residual", default), Ok::<_, KreinError>(cf.residual));
            Some(m.discrete_spectrum(cf))
        }
        Ok(_) => {
            data.insert("zeros".into(), json!([]));
            None
        }
        Err(e) => {
            checks.skip("zero_residual", e.to_string());
            None
        }
    };

    // discrete data
    let discrete_reason = if regime == "none" { "no discrete spectrum" } else { "zero location not covered" };
    match (&zeros, &discrete) {
        (Ok(cf), Some(Ok(ds))) if cf.regime != Regime::DoubleZero => {
            let rows = m.discrete_crosscheck(cf, &p.n_sequence)?;
            let gap = rows.last().map_or(f64::INFINITY, |r| r.gap);
            checks.at_most(
                "crosscheck_gap",
                "discrete zeros converge to continuum zeros",
                tol("crosscheck_gap", 1e-8),
                Ok::<_, KreinError>(gap),
            );
            plot_data.insert(
                PlotKind::Convergence,
                PlotTable {
                    columns: vec!["n".into(), "gap".into()],
                    rows: rows.iter().filter(|r| r.gap.is_finite()).map(|r| vec![r.n as f64, r.gap]).collect(),
                },
            );
            let trace = ds.residues.iter().map(|r| (r.trace() - 1.0).norm()).fold(0.0, f64::max);
            checks.at_most("residue_trace", "tr r = 1", tol("residue_trace", 1e-8), Ok::<_, KreinError>(trace));
            checks.skip("jordan_relations", "simple zeros");
            checks.skip("jordan_hp", "simple zeros");
        }
        (Ok(_), Some(Ok(ds))) => {
            checks.skip("crosscheck_gap", "a double zero splits on finite grids");
            checks.skip("residue_trace", "double zero");
            let j = ds.jordan.as_ref().expect("double zero carries Jordan data");
            let fnorm = m.norm(&f) * j.p.hs_norm().max(1.0);
            let pf = j.p.apply(&f);
            let af = j.a.apply(&f);
            let rel = [
                diff_norm(&m, &j.p.apply(&pf), &pf),
                m.norm(&j.a.apply(&af)),
                diff_norm(&m, &j.a.apply(&pf), &af),
                diff_norm(&m, &j.p.apply(&af), &af),
            ]
            .into_iter()
            .fold(0.0, f64::max)
                / (fnorm * j.p.hs_norm().max(j.a.hs_norm()).max(1.0));
            checks.at_most(
                "jordan_relations",
                "p^2 = p, a^2 = 0, ap = pa = a",
                tol("jordan_relations", 1e-8),
                Ok::<_, KreinError>(rel),
            );
            let hp = m.apply_h(&pf)?;
            checks.at_most(
                "jordan_hp",
                "Hp = a",
                tol("jordan_hp", 1e-6),
                Ok::<_, KreinError>(diff_norm(&m, &hp, &af) / fnorm),
            );
        }
        (_, Some(Err(e))) => return Err(e.clone()),
        _ => {
            for name in ["crosscheck_gap", "residue_trace", "jordan_relations", "jordan_hp"] {
                checks.skip(name, discrete_reason);
            }
        }
    }

    // continuum
    checks.at_most(
        "gram",
        "<smear(phi, left), smear(phi, right)> = int phi^2",
        tol("gram", 1e-3),
        m.orthogonality_gram(&probes.bump, &probes.bump).map(|g| g.defect),
    );
    checks.at_most(
        "gram_disjoint",
        "<smear(phi1, left), smear(phi2, right)> = 0 for disjoint supports",
        tol("gram_disjoint", 1e-4),
        m.orthogonality_gram(&probes.bump, &probes.far).map(|g| g.defect),
    );
    if regime == "unsupported" {
        for name in ["completeness_contour", "completeness_spectral", "annihilation"] {
            checks.skip(name, discrete_reason);
        }
    } else {
        let comp = m.completeness_apply(&probes.profile, 3.0 * p.c);
        let default = if p.kappa == 0.0 { 1e-10 } else { 1e-3 };
        checks.at_most(
            "completeness_contour",
            "(1/2 pi i) contour integral of R(z) f dz = f",
            tol("completeness_contour", default),
            comp.as_ref().map(|c| c.contour_defect).map_err(Clone::clone),
        );
        checks.at_most(
            "completeness_spectral",
            "discrete projectors plus continuum integral reproduce f",
            tol("completeness_spectral", 1e-3),
            comp.map(|c| c.spectral_defect),
        );
        match &discrete {
            Some(Ok(ds)) => {
                let mut ops: Vec<_> = ds.residues.iter().collect();
                if let Some(j) = &ds.jordan {
                    ops.push(&j.a);
                    ops.push(&j.p);
                }
                let value = (|| {
                    let mut worst = 0.0f64;
                    for phi in [&probes.bump, &probes.far] {
                        let v = m.eigenfunction_smear(phi, Side::Right)?;
                        let u = m.eigenfunction_smear(phi, Side::Left)?;
                        for op in &ops {
                            let s = op.hs_norm();
                            worst = worst
                                .max(m.norm(&op.apply(&v)) / (s * m.norm(&v)))
                                .max(m.norm(&op.apply_left(&u)) / (s * m.norm(&u)));
                        }
                    }
                    Ok::<_, KreinError>(worst)
                })();
                checks.at_most(
                    "annihilation",
                    "pole coefficients annihilate continuum eigenvectors",
                    tol("annihilation", 1e-4),
                    value,
                );
            }
            _ => checks.skip("annihilation", discrete_reason),
        }
    }

    let nn = m.nonnormality_check();
    let (relation, anchor) = if p.kappa > 0.0 {
        (Relation::Above, "HH* - H*H != 0 for kappa > 0")
    } else {
        (Relation::Equal, "HH* - H*H = 0 for kappa = 0")
    };
    checks.record("commutator", anchor, relation, 0.0, Ok::<_, KreinError>(nn.comm_norm));
    checks.at_most(
        "s_identity",
        "S H*H S = Omega^2 S and the matching HH* identity",
        tol("s_identity", 1e-10),
        Ok::<_, KreinError>(nn.s_identity_defect),
    );

    let phi2 = TestFn1D::poly_times_bump(probes.bump.support().0, probes.bump.support().1, &[1.0, 0.3])?;
    let f2 = Profile::from_testfn(&TestFn1D::poly_times_bump(1.0 + 0.05 * (p.c - 1.0), 1.0 + 0.95 * (p.c - 1.0), &[0.5, 1.0])?);
    checks.at_most(
        "continuum_multiplicativity",
        "<f1|M(phi1) M(phi2)|f2> = <f1|M(phi1 phi2)|f2>",
        tol("continuum_multiplicativity", 1e-3),
        m.continuum_multiplicativity(&probes.bump, &phi2, &probes.profile, &f2).map(|r| r.defect),
    );
    checks.at_most(
        "insertion",
        "M(phi) R(zeta) = M(phi / (zeta - x)) at zeta = 3i",
        tol("insertion", 1e-3),
        m.insertion_check(&probes.bump, &probes.profile, &f2, c(0.0, 3.0)).map(|r| r.defect),
    );

    plot_data.insert(PlotKind::CBoundary, boundary_table(&m)?);
    if let Ok(t) = mu_table(&m, &probes.profile) {
        plot_data.insert(PlotKind::MuDiag, t);
    }
    let v = m.eigenfunction_smear(&probes.bump, Side::Right)?;
    plot_data.insert(
        PlotKind::Eigenfunction,
        PlotTable {
            columns: vec!["omega".into(), "re".into(), "im".into()],
            rows: m.nodes().iter().zip(&v).map(|(w, x)| vec![*w, x.re, x.im]).collect(),
        },
    );

    let mut grid_sizes = vec![p.n];
    grid_sizes.extend(&p.n_sequence);
    Ok(KreinOutcome {
        data,
        plot_data,
        grid_sizes,
    })
}

/// `x, C₁(x), πC₂(x)` at 512 midpoints over `(−c − 0.5, c + 0.5)`.
fn boundary_table(m: &KreinModel) -> Result<PlotTable, KreinError> {
    let (lo, hi) = (-m.c() - 0.5, m.c() + 0.5);
    let h = (hi - lo) / 512.0;
    let rows: Result<Vec<Vec<f64>>, KreinError> = (0..512)
        .into_par_iter()
        .map(|j| {
            let x = lo + (j as f64 + 0.5) * h;
            let bv = m.char_boundary(x)?;
            Ok(vec![x, bv.c1, PI * bv.c2])
        })
        .collect();
    Ok(PlotTable {
        columns: vec!["x".into(), "C1".into(), "pi_C2".into()],
        rows: rows?,
    })
}

/// `x, Re, Im` of `⟨f|μ(x)|f⟩` at 64 interior points of each slit.
fn mu_table(m: &KreinModel, f: &Profile) -> Result<PlotTable, KreinError> {
    let w = m.c() - 1.0;
    let xs: Vec<f64> = (0..64)
        .map(|j| 1.0 + w * (j as f64 + 0.5) / 64.0)
        .flat_map(|x| [-x, x])
        .collect();
    let mut rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| m.mu_apply(x, f, f).map(|mu| vec![x, mu.value.re, mu.value.im]))
        .collect::<Result<_, _>>()?;
    rows.sort_by(|a, b| a[0].total_cmp(&b[0]));
    Ok(PlotTable {
        columns: vec!["x".into(), "re".into(), "im".into()],
        rows,
    })
}
