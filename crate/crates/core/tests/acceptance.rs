//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on failure.

use std::error::Error;
use std::f64::consts::TAU;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_dist::distcore::{self, Dist1D, Side as USide};
use spectral_dist::krein::{KreinModel, Profile, Regime, Side};
use spectral_dist::matspec::*;
use spectral_dist::quad;
use spectral_dist::testfn::{TestFn1D, TestFn2D};
use spectral_dist::C64;

type Outcome = std::result::Result<(bool, String), Box<dyn Error>>;

const C: f64 = 2.0;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn real(rows: &[&[f64]]) -> CMatrix {
    CMatrix::from_real_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let data = (0..n * n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    CMatrix::new(n, data).unwrap()
}

fn ptb(a: f64, b: f64, cs: &[f64]) -> TestFn1D {
    TestFn1D::poly_times_bump(a, b, cs).unwrap()
}

/// `κ*` from adaptive quadrature of `∫₁^c 2g₀²/y`, independent of the grid code.
fn kappa_star_oracle() -> f64 {
    let g0 = TestFn1D::bump(1.0, C).unwrap();
    let f = |y: f64| c(2.0 * g0.eval(y).powi(2) / y, 0.0);
    1.0 / quad::adaptive_integrate(&f, 1.0, C, 1e-15).re.sqrt()
}

fn regime_kappas() -> [f64; 3] {
    [4.0, kappa_star_oracle(), 3.0]
}

fn resolvent_equation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_matrix = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2..=8);
        let a = random_matrix(&mut rng, n);
        let b = a.gershgorin_bound();
        let z1 = C64::from_polar(b + rng.gen_range(0.1..2.0), rng.gen_range(0.0..TAU));
        let z2 = C64::from_polar(b + rng.gen_range(0.1..2.0), rng.gen_range(0.0..TAU));
        worst_matrix = worst_matrix.max(resolvent_equation_residual(&a, z1, z2)?);
    }
    let mut worst_krein = 0.0f64;
    for kappa in regime_kappas() {
        let m = KreinModel::new(C, kappa, 256)?;
        for _ in 0..5 {
            let (freq, shift): (f64, f64) = (rng.gen_range(0.5..3.0), rng.gen_range(-1.0..1.0));
            let f = m.sample(|w| c((w * freq).sin(), shift + w.cos()));
            let z1 = c(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..2.0));
            let z2 = c(rng.gen_range(-3.0..3.0), -rng.gen_range(0.1..2.0));
            worst_krein = worst_krein.max(m.resolvent_equation_residual(z1, z2, &f)?);
            worst_krein = worst_krein.max(m.resolvent_equation_residual(c(3.0, 0.0), c(0.0, 2.0), &f)?);
        }
    }
    Ok((
        worst_matrix <= 1e-12 && worst_krein <= 1e-11,
        format!("matrix {worst_matrix:.2e} (≤ 1e-12), Krein n=256 {worst_krein:.2e} (≤ 1e-11)"),
    ))
}

fn plemelj() -> Outcome {
    let phis = [
        TestFn1D::bump(-1.0, 1.0)?,
        ptb(-1.0, 1.0, &[1.0, 0.5]),
        TestFn1D::bump(-0.5, 1.5)?,
        ptb(-2.0, 1.0, &[0.3, 1.0, -0.4]),
        ptb(-0.7, 0.9, &[-1.0, 0.2, 0.0, 0.6]),
    ];
    let mut worst = 0.0f64;
    let mut min_order = f64::INFINITY;
    for phi in &phis {
        for side in [USide::Plus, USide::Minus] {
            let lim = distcore::plemelj_limit(phi, &distcore::u_schedule(3, 12, side))?;
            let exact = Dist1D::boundary(0.0, side).apply(phi)?;
            worst = worst.max((lim.extrapolated - exact).norm());
            min_order = min_order.min(lim.order);
        }
    }
    Ok((
        worst <= 1e-6 && min_order >= 0.9,
        format!("max error {worst:.2e} (≤ 1e-6), min order {min_order:.2} (≥ 0.9)"),
    ))
}

fn dbar_kernel() -> Outcome {
    let phis = [
        TestFn2D::product(TestFn1D::bump(-1.0, 1.0)?, TestFn1D::bump(-1.0, 1.0)?),
        TestFn2D::product(ptb(-1.0, 1.5, &[1.0, 0.4]), ptb(-0.8, 1.2, &[0.5, -1.0, 0.3])),
        TestFn2D::product(ptb(-2.0, 0.5, &[0.2, 1.0]), TestFn1D::bump(-0.3, 0.6)?),
    ];
    let mut worst = 0.0f64;
    for phi in &phis {
        worst = worst.max(distcore::dbar_identity_check(phi)?.defect);
    }
    Ok((worst <= 1e-6, format!("max defect {worst:.2e} (≤ 1e-6)")))
}

fn lemma() -> Outcome {
    let bump = TestFn1D::bump(-1.0, 1.0)?;
    let triples = [
        (bump.clone(), bump, 0.0),
        (ptb(-1.0, 1.2, &[1.0, 0.7]), ptb(-0.6, 1.4, &[0.4, -1.0, 0.5]), 0.3),
        (ptb(-1.5, 0.5, &[0.2, 1.0]), ptb(-0.9, 0.8, &[1.0, 0.0, -0.8]), -0.25),
    ];
    let us = distcore::lemma11_schedule();
    let mut worst = 0.0f64;
    for (p1, p2, w) in &triples {
        worst = worst.max(distcore::lemma11_check(p1, p2, *w, &us)?.defect);
    }
    Ok((worst <= 1e-4, format!("max defect {worst:.2e} (≤ 1e-4)")))
}

fn matrix_distribution() -> Outcome {
    // contour-extracted Jordan data
    let s = real(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0]]);
    let s_inv = s.solve(&CMatrix::identity(3)).ok_or("singular similarity")?;
    let mut jordan_defect = 0.0f64;
    let examples = [
        &(&s * &real(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 3.0]])) * &s_inv,
        real(&[&[1.0, 1.0, 0.0], &[0.0, 1.0, 1.0], &[0.0, 0.0, 1.0]]),
        real(&[&[2.0, 0.5, 0.0], &[0.0, -1.0, 0.0], &[0.3, 0.0, 0.5]]),
    ];
    for a in &examples {
        jordan_defect = jordan_defect.max(SpectralDataMatrix::from_matrix(a)?.defects().max());
    }
    // multiplicativity on blocks of order 1, 2, 3
    let phi1 = TestFn2D::product(ptb(-1.0, 2.0, &[1.0, 0.4, 0.1]), ptb(-1.0, 1.0, &[1.0, -0.6]));
    let phi2 = TestFn2D::product(ptb(-1.0, 2.0, &[0.3, 1.0]), ptb(-1.0, 1.0, &[1.0, 0.2, 0.3]));
    let mut mult = 0.0f64;
    for a in [
        CMatrix::diag(&[c(0.2, 0.1), c(1.1, 0.0)]),
        real(&[&[0.3, 1.0], &[0.0, 0.3]]),
        real(&[&[0.5, 1.0, 2.0], &[0.0, 0.5, 3.0], &[0.0, 0.0, 0.5]]),
    ] {
        mult = mult.max(multiplicativity_check(&SpectralDataMatrix::from_matrix(&a)?, &phi1, &phi2)?);
    }
    // completeness
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut complete = 0.0f64;
    for a in examples.iter().cloned().chain((0..3).map(|_| random_matrix(&mut rng, 6))) {
        complete = complete.max(completeness_contour(&a, 2.0 * a.gershgorin_bound())?);
    }
    // two isolated poles
    let a = real(&[&[0.0, 1.0, 0.5], &[0.0, 0.0, 1.0], &[0.0, 0.0, 3.0]]);
    let mut two_pole = 0.0f64;
    for k in 0..3 {
        for l in 0..3 {
            let b = laurent_coefficient(&a, c(0.0, 0.0), 1.0, RIESZ_POINTS, k)?;
            let d = laurent_coefficient(&a, c(3.0, 0.0), 1.0, RIESZ_POINTS, l)?;
            two_pole = two_pole.max((&b * &d).frobenius()).max((&d * &b).frobenius());
        }
    }
    Ok((
        jordan_defect <= 1e-9 && mult <= 1e-11 && complete <= 1e-10 && two_pole <= 1e-9,
        format!(
            "Jordan data {jordan_defect:.2e} (≤ 1e-9), multiplicativity {mult:.2e} (≤ 1e-11), \
             completeness {complete:.2e} (≤ 1e-10), two-pole {two_pole:.2e} (≤ 1e-9)"
        ),
    ))
}

fn nonuniqueness() -> Outcome {
    let phi = TestFn2D::product(ptb(-1.0, 1.0, &[1.0, 0.5]), ptb(-1.0, 1.0, &[1.0, -0.3]));
    let psi = TestFn2D::product(ptb(-1.0, 1.0, &[0.2, 1.0]), ptb(-1.0, 1.0, &[1.0, 0.7]));
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, cm) in [
        ("0", CMatrix::zeros(2)),
        ("nilpotent", real(&[&[0.0, 1.0], &[0.0, 0.0]])),
        ("identity", CMatrix::identity(2)),
    ] {
        let claimed = nonunique_extension_check(&cm);
        let square_zero = (&cm * &cm).frobenius() <= 1e-12;
        let defect = nonunique_extension_defect(&cm, &phi, &psi)?;
        ok &= claimed == square_zero && (defect <= 1e-12) == square_zero;
        detail.push(format!("{name}: {claimed} (defect {defect:.1e})"));
    }
    Ok((ok, detail.join(", ")))
}

fn unitary() -> Outcome {
    let trig = TrigPoly {
        terms: vec![(0, c(0.5, 0.0)), (1, c(0.2, -0.1)), (-2, c(0.0, 0.3)), (3, c(-0.4, 0.0))],
    };
    let phi = |t: f64| trig.eval(t);
    let degree = trig.degree() as usize;
    let mut worst = 0.0f64;
    let diag = CMatrix::diag(&[c(1.0, 0.0), c(0.0, 1.0)]);
    let want = CMatrix::diag(&[phi(0.0), phi(std::f64::consts::FRAC_PI_2)]);
    let theta0 = 0.7f64;
    let (s, co) = theta0.sin_cos();
    let rot = real(&[&[co, -s], &[s, co]]);
    let proj = |sign: f64| {
        let v = [c(1.0, 0.0), c(0.0, -sign)];
        let rows: Vec<Vec<C64>> = (0..2).map(|i| (0..2).map(|j| 0.5 * v[i] * v[j].conj()).collect()).collect();
        CMatrix::from_rows(&rows).unwrap()
    };
    let rot_want = &proj(1.0).scale(phi(theta0)) + &proj(-1.0).scale(phi(-theta0));
    for l in degree..degree + 4 {
        worst = worst.max(unitary_spectral_smear(&diag, &phi, l)?.distance(&want));
        worst = worst.max(unitary_spectral_smear(&rot, &phi, l)?.distance(&rot_want));
    }
    Ok((worst <= 1e-12, format!("max defect for L ≥ {degree}: {worst:.2e} (≤ 1e-12)")))
}

fn krein_regimes() -> Outcome {
    let oracle = kappa_star_oracle();
    let base = KreinModel::new(C, 1.0, 512)?;
    let star = base.kappa_star();
    let star_rel = (star - oracle).abs() / oracle;
    let sweep = [4.0, 3.6, star, 3.0, 2.6];
    let expected = [
        Regime::ImaginaryPair,
        Regime::ImaginaryPair,
        Regime::DoubleZero,
        Regime::RealPair,
        Regime::RealPair,
    ];
    let mut ok = star_rel <= 1e-8;
    let mut worst_c = 0.0f64;
    let mut labels = Vec::new();
    let mut final_gap = 0.0f64;
    for (kappa, want) in sweep.iter().zip(expected) {
        let m = KreinModel::new(C, *kappa, 512)?;
        let cf = m.find_zeros()?;
        ok &= cf.regime == want;
        labels.push(cf.regime.as_str());
        worst_c = worst_c.max(cf.residual);
        if want != Regime::DoubleZero {
            let rows = m.discrete_crosscheck(&cf, &[32, 64, 128, 256])?;
            let gap = rows.last().map_or(f64::INFINITY, |r| r.gap);
            ok &= rows.windows(2).all(|w| w[1].gap < w[0].gap || w[1].gap <= 1e-14);
            final_gap = final_gap.max(gap);
        }
    }
    ok &= worst_c <= 1e-12 && final_gap <= 1e-8;
    Ok((
        ok,
        format!(
            "{} ; κ* = {star:.12} (oracle rel {star_rel:.1e} ≤ 1e-8), max |C(zero)| {worst_c:.1e} (≤ 1e-12), \
             final crosscheck gap {final_gap:.1e} (≤ 1e-8)",
            labels.join(" → ")
        ),
    ))
}

fn generalized_eigenfunctions() -> Outcome {
    let pairs = [
        (TestFn1D::bump(1.2, 1.8)?, TestFn1D::bump(1.2, 1.8)?),
        (ptb(1.1, 1.9, &[1.0, 0.5]), ptb(1.3, 1.95, &[0.2, -1.0, 0.6])),
    ];
    let far = TestFn1D::bump(-1.7, -1.3)?;
    let mut ok = true;
    let mut worst256 = 0.0f64;
    let mut worst_ratio = f64::INFINITY;
    let mut disjoint = 0.0f64;
    for kappa in regime_kappas() {
        let coarse = KreinModel::new(C, kappa, 256)?;
        let fine = coarse.refined(512)?;
        for (p1, p2) in &pairs {
            let d256 = coarse.orthogonality_gram(p1, p2)?.defect;
            let d512 = fine.orthogonality_gram(p1, p2)?.defect;
            worst256 = worst256.max(d256);
            // at least halving, with the ±2× slack: d256/d512 ≥ 2/2
            let ratio = d256 / d512.max(f64::MIN_POSITIVE);
            worst_ratio = worst_ratio.min(ratio);
            ok &= d512 <= d256 || d256 <= 1e-14;
        }
        disjoint = disjoint
            .max(coarse.orthogonality_gram(&pairs[0].0, &far)?.defect)
            .max(coarse.orthogonality_gram(&far, &pairs[1].1)?.defect);
    }
    ok &= worst256 <= 1e-3 && disjoint <= 1e-4;
    Ok((
        ok,
        format!(
            "Gram n=256 {worst256:.2e} (≤ 1e-3), min reduction 256→512 ×{worst_ratio:.1} (≥ ×1), \
             disjoint {disjoint:.2e} (≤ 1e-4)"
        ),
    ))
}

fn completeness() -> Outcome {
    let f = Profile::combination(&[
        (c(1.0, 0.0), ptb(1.1, 1.9, &[1.0, 0.5])),
        (c(0.0, 0.7), TestFn1D::bump(-1.8, -1.2)?),
        (c(0.4, 0.0), ptb(-1.95, -1.05, &[0.0, 1.0])),
    ]);
    let mut worst = 0.0f64;
    for kappa in regime_kappas() {
        let comp = KreinModel::new(C, kappa, 256)?.completeness_apply(&f, 3.0 * C)?;
        worst = worst.max(comp.contour_defect).max(comp.spectral_defect);
    }
    let flat = KreinModel::new(C, 0.0, 256)?.completeness_apply(&f, 3.0 * C)?;
    Ok((
        worst <= 1e-3 && flat.contour_defect <= 1e-10,
        format!(
            "both routes, three regimes {worst:.2e} (≤ 1e-3), κ = 0 contour {:.2e} (≤ 1e-10)",
            flat.contour_defect
        ),
    ))
}

fn annihilation() -> Outcome {
    let phis = [ptb(1.2, 1.8, &[1.0, 0.4]), TestFn1D::bump(-1.9, -1.05)?];
    let mut worst = 0.0f64;
    for kappa in regime_kappas() {
        let m = KreinModel::new(C, kappa, 256)?;
        let ds = m.discrete_spectrum(&m.find_zeros()?)?;
        let mut ops: Vec<_> = ds.residues.iter().collect();
        if let Some(j) = &ds.jordan {
            ops.push(&j.a);
            ops.push(&j.p);
        }
        for phi in &phis {
            let v = m.eigenfunction_smear(phi, Side::Right)?;
            let u = m.eigenfunction_smear(phi, Side::Left)?;
            for op in &ops {
                let scale = op.hs_norm();
                worst = worst
                    .max(m.norm(&op.apply(&v)) / (scale * m.norm(&v)))
                    .max(m.norm(&op.apply_left(&u)) / (scale * m.norm(&u)));
            }
        }
    }
    Ok((worst <= 1e-4, format!("max relative pairing {worst:.2e} (≤ 1e-4)")))
}

fn nonnormality() -> Outcome {
    let flat = KreinModel::new(C, 0.0, 128)?.nonnormality_check();
    let mut ok = flat.comm_norm == 0.0 && flat.s_identity_defect <= 1e-10;
    let mut min_comm = f64::INFINITY;
    let mut worst_s = flat.s_identity_defect;
    for kappa in [0.5, 1.0, 3.0] {
        let nn = KreinModel::new(C, kappa, 128)?.nonnormality_check();
        ok &= nn.comm_norm > 0.0;
        min_comm = min_comm.min(nn.comm_norm);
        worst_s = worst_s.max(nn.s_identity_defect);
    }
    ok &= worst_s <= 1e-10;
    Ok((
        ok,
        format!(
            "κ = 0 commutator {:.1e}, κ > 0 min commutator {min_comm:.2e} (> 0), S-identities {worst_s:.2e} (≤ 1e-10)",
            flat.comm_norm
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<f64>); 12] = [
        ("resolvent equation", resolvent_equation, Some(5.0)),
        ("Plemelj limit", plemelj, None),
        ("dbar of the Cauchy kernel", dbar_kernel, None),
        ("product of principal values", lemma, None),
        ("matrix spectral distribution", matrix_distribution, Some(10.0)),
        ("non-unique extension at A = 0", nonuniqueness, None),
        ("unitary measure", unitary, None),
        ("Krein regimes", krein_regimes, Some(60.0)),
        ("generalized eigenfunctions", generalized_eigenfunctions, None),
        ("completeness", completeness, None),
        ("pole-coefficient annihilation", annihilation, None),
        ("non-normality", nonnormality, None),
    ];
    let mut failures = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok((pass, detail)) => (pass, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.is_none_or(|b| secs < b);
        let budget_note = budget.map_or(String::new(), |b| format!(" / budget {b:.0} s"));
        let pass = pass && in_time;
        if !pass {
            failures += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{secs:.2} s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            k + 1
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
