//! Gil-Pelaez inversion and Monte Carlo against closed forms and each other.

use std::f64::consts::PI;
use std::sync::Arc;

use spa_outage::cgf::{gamma_gain_cgf, omega_cgf, ppp_comp_cgf, CgfRef, GainLaw, GaussianCgf, NigCgf, OmegaSpec, PppGain, PppGeometry};
use spa_outage::cli::{run_method, Method, Model, Scenario};
use spa_outage::oracles::{
    gil_pelaez_ccdf, mc_outage_compound, mc_outage_ppp_comp, Aggregation, InversionSettings, McEstimate, McSettings,
};
use spa_outage::quad::QuadratureSettings;
use spa_outage::spa::NigParams;
use spa_outage::specfun::nig_cdf;

fn inv() -> InversionSettings {
    InversionSettings::default()
}

fn geometry(n_bs: f64) -> PppGeometry {
    PppGeometry::new(n_bs / (PI * 1e6), 30.0, 150.0, 4.0, 1.0)
}

fn within(est: &McEstimate, exact: f64, k: f64) -> bool {
    (est.p_hat - exact).abs() <= k * est.ci_halfwidth
}

#[test]
fn gil_pelaez_closed_forms() {
    let g = GaussianCgf::new(0.0, 1.0).unwrap();
    assert!((gil_pelaez_ccdf(&g, 0.0, &inv()).unwrap().value - 0.5).abs() <= 1e-10);

    let e: CgfRef = Arc::new(gamma_gain_cgf(GainLaw::rayleigh()).unwrap());
    let k = omega_cgf(OmegaSpec { signal: e.clone(), interference: e, theta: 2.0 }).unwrap();
    assert!((gil_pelaez_ccdf(&k, 0.0, &inv()).unwrap().value - 2.0 / 3.0).abs() <= 1e-6);

    let p = NigParams::new(2.0, 1.0, 0.0, 1.0).unwrap();
    let r = gil_pelaez_ccdf(&NigCgf::new(p).unwrap(), 1.0, &inv()).unwrap();
    assert!((r.value - (1.0 - nig_cdf(1.0, &p).unwrap())).abs() <= 1e-7);
    assert!(!r.unstable);
}

#[test]
fn gil_pelaez_budget_exhaustion_is_an_error() {
    let e: CgfRef = Arc::new(gamma_gain_cgf(GainLaw::new(0.3, 1.0).unwrap()).unwrap());
    let k = omega_cgf(OmegaSpec { signal: e.clone(), interference: e, theta: 2.0 }).unwrap();
    let tight = InversionSettings { abs_tol: 1e-15, rel_tol: 1e-15, max_panels: 16, tail_cut: None };
    assert!(matches!(gil_pelaez_ccdf(&k, 0.0, &tight), Err(spa_outage::Error::Inversion { .. })));
}

#[test]
fn mc_degenerate_aggregations() {
    let mc = McSettings { trials: 200_000, seed: 11, ..Default::default() };
    // No interferers: outage only when no transmitter cooperates.
    let est = mc_outage_compound(Aggregation::Poisson { lam1: 2.0, lam2: 0.0 }, GainLaw::rayleigh(), 3.0, 0.0, &mc).unwrap();
    assert!(within(&est, (-2f64).exp(), 3.0), "{est:?}");
    // p = 1: every node cooperates, no interference, no outage.
    let est = mc_outage_compound(Aggregation::Binomial { trials: 10, prob: 1.0 }, GainLaw::rayleigh(), 5.0, 0.0, &mc).unwrap();
    assert_eq!(est.outages, 0);
}

#[test]
fn mc_matches_inversion_on_poisson_point() {
    let sc = Scenario {
        model: Model::PoissonNakagami,
        lambda: Some(10.0),
        p: 0.7,
        theta_db: 0.0,
        mc: McSettings { trials: 1_000_000, seed: 5, ..Default::default() },
        ..Default::default()
    };
    let gp = run_method(&sc, Method::GilPelaez).unwrap();
    let mc = run_method(&sc, Method::Mc).unwrap();
    assert!((mc.p_out - gp.p_out).abs() <= 3.0 * mc.ci_halfwidth.unwrap(), "{} vs {}", mc.p_out, gp.p_out);
}

#[test]
fn mc_matches_inversion_with_noise() {
    // σ² > 0 moves the inversion point off zero.
    let sc = Scenario {
        model: Model::PoissonNakagami,
        lambda: Some(6.0),
        p: 0.6,
        theta_db: 2.0,
        sigma2: 0.7,
        mc: McSettings { trials: 1_000_000, seed: 9, ..Default::default() },
        ..Default::default()
    };
    let gp = run_method(&sc, Method::GilPelaez).unwrap();
    let mc = run_method(&sc, Method::Mc).unwrap();
    assert!((mc.p_out - gp.p_out).abs() <= 3.0 * mc.ci_halfwidth.unwrap(), "{} vs {}", mc.p_out, gp.p_out);
    let sir = run_method(&Scenario { sigma2: 0.0, ..sc }, Method::GilPelaez).unwrap();
    assert!(gp.p_out > sir.p_out);
}

#[test]
fn ppp_small_threshold_gives_only_void_outage() {
    let geom = geometry(100.0);
    let mc = McSettings { trials: 100_000, seed: 3, ..Default::default() };
    let est = mc_outage_ppp_comp(&geom, PppGain::Gamma(GainLaw::rayleigh()), 1e-12, 0.0, &mc).unwrap();
    let void = (-geom.lam * PI * (150f64.powi(2) - 30f64.powi(2))).exp();
    assert!(within(&est, void, 4.0), "{est:?} vs {void}");
    // With a dense network the cooperation set is never empty.
    let est = mc_outage_ppp_comp(&geometry(2000.0), PppGain::Deterministic, 1e-12, 0.0, &mc).unwrap();
    assert_eq!(est.outages, 0);
}

#[test]
fn ppp_outer_radius_effect_matches_inversion() {
    let law = GainLaw::rayleigh();
    let quad = QuadratureSettings::default();
    let gp = |r_tot: f64| {
        let k = ppp_comp_cgf(&geometry(100.0).truncated(r_tot), law, 1.0, quad).unwrap();
        gil_pelaez_ccdf(&k, 0.0, &inv()).unwrap().value
    };
    let mc = |r_tot: f64| {
        let s = McSettings { trials: 1_000_000, seed: 17, r_tot, ..Default::default() };
        mc_outage_ppp_comp(&geometry(100.0), PppGain::Gamma(law), 1.0, 0.0, &s).unwrap()
    };
    let (g1, g2) = (gp(1000.0), gp(2000.0));
    let (m1, m2) = (mc(1000.0), mc(2000.0));
    assert!(within(&m1, g1, 3.0) && within(&m2, g2, 3.0), "{m1:?} vs {g1}, {m2:?} vs {g2}");
    // More interferers, more outage; the whole-plane value bounds both.
    let whole = gil_pelaez_ccdf(&ppp_comp_cgf(&geometry(100.0), law, 1.0, quad).unwrap(), 0.0, &inv()).unwrap().value;
    assert!(g1 < g2 && g2 < whole);
    let diff_ci = (m1.ci_halfwidth.powi(2) + m2.ci_halfwidth.powi(2)).sqrt();
    assert!(((m2.p_hat - m1.p_hat) - (g2 - g1)).abs() <= 3.0 * diff_ci);
}

#[test]
fn inversion_flags_deep_tail() {
    for lam in [90.0, 120.0, 150.0] {
        let sc = Scenario { model: Model::PoissonNakagami, lambda: Some(lam), theta_db: -5.0, ..Default::default() };
        let r = run_method(&sc, Method::GilPelaez).unwrap();
        assert!(r.raw < 1e-8 && r.unstable == Some(true), "lambda {lam}: {r:?}");
    }
}
