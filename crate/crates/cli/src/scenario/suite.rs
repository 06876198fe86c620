use std::collections::BTreeMap;

use serde_json::{json, Value};

use spectral_dist::distcore::{self, Dist1D, DistError, Side};
use spectral_dist::testfn::{TestFn1D, TestFn2D};
use spectral_dist::C64;

use crate::config::{Scenario, SuiteParams};
use crate::report::{Checks, Relation};

pub const CHECKS: &[&str] = &["plemelj", "plemelj_order", "dbar", "lemma", "jump"];

fn ptb(a: f64, b: f64, cs: &[f64]) -> Result<TestFn1D, DistError> {
    Ok(TestFn1D::poly_times_bump(a, b, cs)?)
}

pub fn run(sc: &Scenario, p: &SuiteParams, checks: &mut Checks) -> Result<BTreeMap<String, Value>, DistError> {
    let tol = |name: &str, default: f64| sc.tolerance(name, default);
    let phis = [
        TestFn1D::bump(-1.0, 1.0)?,
        ptb(-1.0, 1.0, &[1.0, 0.5])?,
        TestFn1D::bump(-0.5, 1.5)?,
        ptb(-2.0, 1.0, &[0.3, 1.0, -0.4])?,
        ptb(-0.7, 0.9, &[-1.0, 0.2, 0.0, 0.6])?,
    ];
    let mut err = 0.0f64;
    let mut order = f64::INFINITY;
    for phi in &phis {
        for side in [Side::Plus, Side::Minus] {
            let lim = distcore::plemelj_limit(phi, &distcore::u_schedule(p.u_first, p.u_last, side))?;
            err = err.max((lim.extrapolated - Dist1D::boundary(0.0, side).apply(phi)?).norm());
            order = order.min(lim.order);
        }
    }
    checks.at_most(
        "plemelj",
        "1/(x + i0) = P/x - i pi delta, 1/(x - i0) = P/x + i pi delta",
        tol("plemelj", 1e-6),
        Ok::<_, DistError>(err),
    );
    checks.record(
        "plemelj_order",
        "empirical convergence order in u",
        Relation::AtLeast,
        tol("plemelj_order", 0.9),
        Ok::<_, DistError>(order),
    );

    let products = [
        TestFn2D::product(TestFn1D::bump(-1.0, 1.0)?, TestFn1D::bump(-1.0, 1.0)?),
        TestFn2D::product(ptb(-1.0, 1.5, &[1.0, 0.4])?, ptb(-0.8, 1.2, &[0.5, -1.0, 0.3])?),
        TestFn2D::product(ptb(-2.0, 0.5, &[0.2, 1.0])?, TestFn1D::bump(-0.3, 0.6)?),
    ];
    let dbar = products
        .iter()
        .map(|phi| distcore::dbar_identity_check(phi).map(|c| c.defect))
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
    checks.at_most("dbar", "dbar(1/z) = pi delta", tol("dbar", 1e-6), dbar);

    let bump = TestFn1D::bump(-1.0, 1.0)?;
    let triples = [
        (bump.clone(), bump, 0.0),
        (ptb(-1.0, 1.2, &[1.0, 0.7])?, ptb(-0.6, 1.4, &[0.4, -1.0, 0.5])?, 0.3),
        (ptb(-1.5, 0.5, &[0.2, 1.0])?, ptb(-0.9, 0.8, &[1.0, 0.0, -0.8])?, -0.25),
    ];
    let us = distcore::lemma11_schedule();
    let lemma = triples
        .iter()
        .map(|(a, b, w)| distcore::lemma11_check(a, b, *w, &us).map(|c| c.defect))
        .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)));
    checks.at_most(
        "lemma",
        "P/(x-w) P/(y-w) = P/(y-x) [P/(x-w) - P/(y-w)] + pi^2 delta(x-w) delta(y-w)",
        tol("lemma", 1e-4),
        lemma,
    );

    // F = 1/(z − ω₀): the jump F(x + i0) − F(x − i0) is −2πi δ(x − ω₀)
    let w0 = 0.2;
    let f = move |z: C64| 1.0 / (z - w0);
    let jump = move |phi: &TestFn1D| -> Result<C64, DistError> { Ok(C64::new(0.0, -2.0 * std::f64::consts::PI * phi.eval(w0))) };
    checks.at_most(
        "jump",
        "dbar F = (i/2)(F(x + i0) - F(x - i0)) delta(y)",
        tol("jump", 1e-5),
        distcore::jump_formula_check(&f, &jump, &products[1]).map(|c| c.defect),
    );

    let mut data = BTreeMap::new();
    data.insert("plemelj_max_error".into(), json!(err));
    data.insert("plemelj_min_order".into(), json!(order));
    Ok(data)
}
