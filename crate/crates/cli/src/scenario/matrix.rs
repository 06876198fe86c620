use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use spectral_dist::matspec::{
    completeness_contour, laurent_coefficient, multiplicativity_check, resolvent, resolvent_equation_residual,
    spectral_smear, unitary_spectral_smear, CMatrix, MatError, SpectralDataMatrix, TrigPoly,
};
use spectral_dist::testfn::{TestFn1D, TestFn2D};
use spectral_dist::C64;

use crate::config::{Entry, Generator, MatrixParams, Scenario, UnitaryParams};
use crate::report::Checks;

pub const MATRIX_CHECKS: &[&str] = &[
    "resolvent_equation",
    "resolvent_identity",
    "spectral_data",
    "completeness",
    "multiplicativity",
    "z_insertion",
    "two_pole",
];

pub const UNITARY_CHECKS: &[&str] = &["unitarity", "eigen_decomposition", "multiplicativity"];

pub fn build(entries: &[Vec<Entry>]) -> Result<CMatrix, MatError> {
    let rows: Vec<Vec<C64>> = entries
        .iter()
        .map(|r| r.iter().map(|e| { let (re, im) = e.parts(); C64::new(re, im) }).collect())
        .collect();
    CMatrix::from_rows(&rows)
}

fn generate(g: &Generator) -> Result<CMatrix, MatError> {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let data = (0..g.dim * g.dim)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * g.scale)
        .collect();
    CMatrix::new(g.dim, data)
}

fn eigen_json(sd: &SpectralDataMatrix) -> Value {
    Value::Array(
        sd.eigenvalues
            .iter()
            .zip(&sd.orders)
            .map(|(l, k)| json!({"re": l.re, "im": l.im, "order": k}))
            .collect(),
    )
}

/// Degree-2 polynomial-times-bump products covering the disc of radius `r`.
fn covering_tests(r: f64) -> Result<(TestFn2D, TestFn2D), MatError> {
    let s = r + 1.0;
    let f = |cs: &[f64]| TestFn1D::poly_times_bump(-s, s, cs);
    Ok((
        TestFn2D::product(f(&[1.0, 0.4, 0.1])?, f(&[1.0, -0.6])?),
        TestFn2D::product(f(&[0.3, 1.0])?, f(&[1.0, 0.2, 0.3])?),
    ))
}

pub fn run_matrix(sc: &Scenario, p: &MatrixParams, checks: &mut Checks) -> Result<BTreeMap<String, Value>, MatError> {
    let a = match (&p.entries, &p.generator) {
        (Some(e), _) => build(e)?,
        (None, Some(g)) => generate(g)?,
        (None, None) => unreachable!("validated"),
    };
    let tol = |name: &str, default: f64| sc.tolerance(name, default);
    let n = a.dim();
    let gersh = a.gershgorin_bound();
    let radius = if gersh > 0.0 { 2.0 * gersh } else { 1.0 };
    let mut data = BTreeMap::new();

    let points: Vec<C64> = (0..20).map(|k| C64::from_polar(0.75 * radius + 0.5, TAU * k as f64 / 20.0 + 0.1)).collect();
    checks.at_most(
        "resolvent_equation",
        "R(z1) - R(z2) = (z2 - z1) R(z1) R(z2)",
        tol("resolvent_equation", 1e-12),
        points
            .windows(2)
            .map(|w| resolvent_equation_residual(&a, w[0], w[1] * 1.3))
            .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v))),
    );
    checks.at_most(
        "resolvent_identity",
        "A R(z) = -I + z R(z)",
        tol("resolvent_identity", 1e-12),
        points
            .iter()
            .map(|&z| {
                let r = resolvent(&a, z)?;
                let rhs = &r.scale(z) - &CMatrix::identity(n);
                Ok((&a * &r).distance(&rhs) / r.frobenius().max(1.0))
            })
            .try_fold(0.0f64, |acc, r: Result<f64, MatError>| r.map(|v| acc.max(v))),
    );

    let sd = SpectralDataMatrix::from_matrix(&a);
    checks.at_most(
        "spectral_data",
        "p_i p_j = delta_ij p_i, sum p_i = I, a_i p_i = a_i, a_i^n_i = 0",
        tol("spectral_data", 1e-9),
        sd.as_ref().map(|s| s.defects().max()).map_err(Clone::clone),
    );
    checks.at_most(
        "completeness",
        "(1/2 pi i) contour integral of R(z) dz = I",
        tol("completeness", 1e-10),
        completeness_contour(&a, radius),
    );
    let sd = sd?;
    data.insert("eigenvalues".into(), eigen_json(&sd));
    data.insert("gershgorin_bound".into(), json!(gersh));

    let (phi1, phi2) = covering_tests(gersh)?;
    checks.at_most(
        "multiplicativity",
        "M(phi1) M(phi2) = M(phi1 phi2)",
        tol("multiplicativity", 1e-11),
        (|| {
            let m1 = spectral_smear(&sd, &phi1)?;
            let m2 = spectral_smear(&sd, &phi2)?;
            Ok::<_, MatError>(multiplicativity_check(&sd, &phi1, &phi2)? / m1.frobenius().max(1.0) / m2.frobenius().max(1.0))
        })(),
    );
    checks.at_most(
        "z_insertion",
        "A M(phi) = M(z phi)",
        tol("z_insertion", 1e-10),
        (|| {
            let m = spectral_smear(&sd, &phi1)?;
            let mz = spectral_smear(&sd, &phi1.times_z())?;
            Ok::<_, MatError>((&a * &m).distance(&mz) / (a.frobenius() * m.frobenius()).max(1.0))
        })(),
    );

    if sd.eigenvalues.len() < 2 {
        checks.skip("two_pole", "a single eigenvalue cluster");
    } else {
        let (l1, l2) = (sd.eigenvalues[0], sd.eigenvalues[1]);
        let sep = sd
            .eigenvalues
            .iter()
            .enumerate()
            .flat_map(|(i, x)| sd.eigenvalues[i + 1..].iter().map(move |y| (x - y).norm()))
            .fold(f64::INFINITY, f64::min);
        let r = 0.45 * sep;
        checks.at_most(
            "two_pole",
            "b_k(l1) c_l(l2) = 0 for distinct poles",
            tol("two_pole", 1e-9),
            (|| {
                let mut worst = 0.0f64;
                for k in 0..sd.orders[0] as i32 {
                    for l in 0..sd.orders[1] as i32 {
                        let b = laurent_coefficient(&a, l1, r, p.n_points, k)?;
                        let d = laurent_coefficient(&a, l2, r, p.n_points, l)?;
                        worst = worst.max((&b * &d).frobenius()).max((&d * &b).frobenius());
                    }
                }
                Ok::<_, MatError>(worst)
            })(),
        );
    }
    Ok(data)
}

pub fn run_unitary(sc: &Scenario, p: &UnitaryParams, checks: &mut Checks) -> Result<BTreeMap<String, Value>, MatError> {
    let u = match (&p.entries, p.rotation) {
        (Some(e), _) => build(e)?,
        (None, Some(theta)) => {
            let (s, c) = theta.sin_cos();
            CMatrix::from_real_rows(&[vec![c, -s], vec![s, c]])?
        }
        (None, None) => unreachable!("validated"),
    };
    let tol = |name: &str, default: f64| sc.tolerance(name, default);
    let phi = TrigPoly {
        terms: p.phi.iter().map(|&(l, re, im)| (l, C64::new(re, im))).collect(),
    };
    let eval = |t: f64| phi.eval(t);
    let id = CMatrix::identity(u.dim());
    checks.at_most(
        "unitarity",
        "U* U = I",
        tol("unitarity", 1e-10),
        Ok::<_, MatError>((&u.adjoint() * &u).distance(&id)),
    );

    let sd = SpectralDataMatrix::from_matrix(&u)?;
    let mut oracle = CMatrix::zeros(u.dim());
    for (l, proj) in sd.eigenvalues.iter().zip(&sd.projectors) {
        oracle = &oracle + &proj.scale(eval(l.arg()));
    }
    checks.at_most(
        "eigen_decomposition",
        "sum_l U^l phi_l = sum_i phi(theta_i) p_i",
        tol("eigen_decomposition", 1e-12),
        unitary_spectral_smear(&u, &eval, p.l_max).map(|m| m.distance(&oracle)),
    );
    let square = phi.mul(&phi);
    let l = p.l_max.max(square.degree() as usize);
    checks.at_most(
        "multiplicativity",
        "M(phi) M(phi) = M(phi^2)",
        tol("multiplicativity", 1e-12),
        (|| {
            let m = unitary_spectral_smear(&u, &eval, l)?;
            let m2 = unitary_spectral_smear(&u, &|t| square.eval(t), l)?;
            Ok::<_, MatError>((&m * &m).distance(&m2))
        })(),
    );

    let mut data = BTreeMap::new();
    data.insert("eigenvalues".into(), eigen_json(&sd));
    data.insert("phi_degree".into(), json!(phi.degree()));
    Ok(data)
}
