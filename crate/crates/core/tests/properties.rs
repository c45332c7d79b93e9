//! Randomized invariants across the library.

use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use spa_outage::cgf::{
    compound_binomial_cgf, compound_poisson_cgf, gamma_gain_cgf, omega_cgf, Cgf, CgfRef, ConvergenceStrip, GainLaw,
    GaussianCgf, NigCgf, OmegaSpec,
};
use spa_outage::cli::{run_method, run_sweep, Method, Model, Scale, Scenario, Sweep};
use spa_outage::oracles::{gil_pelaez_ccdf, mc_outage_compound, Aggregation, InversionSettings, McSettings};
use spa_outage::quad::{integrate, QuadratureSettings};
use spa_outage::saddle::{analytic_saddle_poisson_nakagami, solve_saddle};
use spa_outage::spa::{spa_cdf, BaseKind, NigParams, SpaMethod};
use spa_outage::specfun::{bessel_k1, lower_inc_gamma, nig_cdf, nig_pdf, normal_cdf, upper_inc_gamma};
use spa_outage::Result;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Law of `a·V + b` for `a > 0`.
#[derive(Debug)]
struct Affine {
    inner: CgfRef,
    a: f64,
    b: f64,
}

impl Cgf for Affine {
    fn strip(&self) -> ConvergenceStrip {
        self.inner.strip().scaled(self.a)
    }

    fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.b * t + self.inner.eval(self.a * t)?)
    }

    fn deriv(&self, n: usize, t: f64) -> Result<f64> {
        let d = self.a.powi(n as i32) * self.inner.deriv(n, self.a * t)?;
        Ok(if n == 1 { d + self.b } else { d })
    }

    fn char_exponent(&self, u: f64) -> Result<Complex64> {
        Ok(self.inner.char_exponent(self.a * u)? + Complex64::new(0.0, self.b * u))
    }
}

fn gain_law() -> impl Strategy<Value = GainLaw> {
    (0.5f64..4.0, 0.5f64..3.0).prop_map(|(m, r)| GainLaw::new(m, r).unwrap())
}

fn nig_params() -> impl Strategy<Value = NigParams> {
    (0.5f64..4.0, -0.9f64..0.9, -1.0f64..1.0, 0.3f64..3.0)
        .prop_map(|(alpha, frac, mu, delta)| NigParams::new(alpha, frac * alpha, mu, delta).unwrap())
}

/// A model CGF of each builder kind.
fn model_cgf() -> impl Strategy<Value = CgfRef> {
    let gamma = gain_law().prop_map(|g| Arc::new(gamma_gain_cgf(g).unwrap()) as CgfRef);
    let poisson = (0.5f64..20.0, gain_law())
        .prop_map(|(l, g)| Arc::new(compound_poisson_cgf(l, Arc::new(gamma_gain_cgf(g).unwrap())).unwrap()) as CgfRef);
    let binomial = (1u32..20, 0.05f64..0.95, gain_law()).prop_map(|(n, p, g)| {
        Arc::new(compound_binomial_cgf(n, p, Arc::new(gamma_gain_cgf(g).unwrap())).unwrap()) as CgfRef
    });
    let nig = nig_params().prop_map(|p| Arc::new(NigCgf::new(p).unwrap()) as CgfRef);
    let omega = (0.5f64..20.0, 0.5f64..20.0, 0.1f64..10.0, gain_law()).prop_map(|(l1, l2, theta, g)| {
        let x: CgfRef = Arc::new(compound_poisson_cgf(l1, Arc::new(gamma_gain_cgf(g).unwrap())).unwrap());
        let y: CgfRef = Arc::new(compound_poisson_cgf(l2, Arc::new(gamma_gain_cgf(g).unwrap())).unwrap());
        Arc::new(omega_cgf(OmegaSpec { signal: x, interference: y, theta }).unwrap()) as CgfRef
    });
    prop_oneof![gamma, poisson, binomial, nig, omega]
}

/// Interior point of the strip, `frac` of the way to the edge on one side.
fn interior(s: &ConvergenceStrip, frac: f64, scale: f64) -> f64 {
    let lo = if s.lo.is_finite() { s.lo } else { -scale };
    let hi = if s.hi.is_finite() { s.hi } else { scale };
    if frac >= 0.0 {
        frac * 0.98 * hi
    } else {
        -frac * 0.98 * lo
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn incomplete_gammas_sum_to_gamma(a in 0.1f64..6.0, z in 0.01f64..30.0) {
        let sum = lower_inc_gamma(a, z).unwrap() + upper_inc_gamma(a, z).unwrap();
        prop_assert!(rel(sum, statrs::function::gamma::gamma(a)) < 1e-12);
    }

    #[test]
    fn incomplete_gamma_recurrence(a in prop::sample::select(vec![-0.5, 0.5, 1.5]), z in prop::sample::select(vec![0.1, 1.0, 10.0])) {
        let lhs = upper_inc_gamma(a + 1.0, z).unwrap();
        let rhs = a * upper_inc_gamma(a, z).unwrap() + z.powf(a) * (-z).exp();
        prop_assert!(rel(lhs, rhs) < 1e-10);
    }

    #[test]
    fn bessel_k1_positive_and_decreasing(x in 1e-5f64..80.0, step in 1e-3f64..5.0) {
        let (a, b) = (bessel_k1(x).unwrap(), bessel_k1(x + step).unwrap());
        prop_assert!(a > 0.0 && b > 0.0 && b < a);
    }

    #[test]
    fn nig_cdf_monotone(p in nig_params(), z1 in -6.0f64..6.0, dz in 0.0f64..4.0) {
        prop_assert!(nig_cdf(z1, &p).unwrap() <= nig_cdf(z1 + dz, &p).unwrap());
    }

    #[test]
    fn symmetric_nig_density_is_even(alpha in 0.5f64..4.0, mu in -1.0f64..1.0, delta in 0.3f64..3.0, d in 0.0f64..5.0) {
        let p = NigParams::new(alpha, 0.0, mu, delta).unwrap();
        prop_assert!(rel(nig_pdf(mu + d, &p).unwrap(), nig_pdf(mu - d, &p).unwrap()) < 1e-13);
    }

    #[test]
    fn cgf_basics(k in model_cgf(), frac in -1.0f64..1.0) {
        prop_assert_eq!(k.eval(0.0).unwrap(), 0.0);
        prop_assert!(rel(k.deriv(1, 0.0).unwrap(), k.cumulant(1).unwrap()) < 1e-12);
        let t = interior(&k.strip(), frac, 1.0);
        prop_assert!(k.deriv(2, t).unwrap() > 0.0, "K'' at {t}");
    }

    #[test]
    fn char_exponent_conjugate_symmetric(k in model_cgf(), u in 0.0f64..20.0) {
        prop_assert_eq!(k.char_exponent(0.0).unwrap(), Complex64::new(0.0, 0.0));
        let (a, b) = (k.char_exponent(u).unwrap(), k.char_exponent(-u).unwrap());
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn omega_cumulant_identity(l1 in 0.5f64..20.0, l2 in 0.5f64..20.0, theta in 0.1f64..10.0, gx in gain_law(), gy in gain_law()) {
        let x: CgfRef = Arc::new(compound_poisson_cgf(l1, Arc::new(gamma_gain_cgf(gx).unwrap())).unwrap());
        let y: CgfRef = Arc::new(compound_poisson_cgf(l2, Arc::new(gamma_gain_cgf(gy).unwrap())).unwrap());
        let k = omega_cgf(OmegaSpec { signal: x.clone(), interference: y.clone(), theta }).unwrap();
        for n in 1..=4 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let expected = theta.powi(n as i32) * y.cumulant(n).unwrap() + sign * x.cumulant(n).unwrap();
            prop_assert!((k.cumulant(n).unwrap() - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn saddle_round_trip_and_sign(k in model_cgf(), frac in -0.9f64..0.9) {
        let t0 = interior(&k.strip(), frac, 3.0 / k.cumulant(2).unwrap().sqrt());
        let x = k.deriv(1, t0).unwrap();
        let s = solve_saddle(k.as_ref(), x).unwrap();
        prop_assert!((s.t_hat - t0).abs() <= 1e-9 * t0.abs().max(1.0), "{} vs {t0}", s.t_hat);
        prop_assert!(s.c <= 0.0);
        let k1 = k.cumulant(1).unwrap();
        if x != k1 {
            prop_assert_eq!(s.t_hat.signum(), (x - k1).signum());
        }
    }

    #[test]
    fn analytic_poisson_saddle_matches_solver(l1 in 1.0f64..20.0, l2 in 1.0f64..20.0, theta in 0.2f64..5.0, g in gain_law()) {
        let x: CgfRef = Arc::new(compound_poisson_cgf(l1, Arc::new(gamma_gain_cgf(g).unwrap())).unwrap());
        let y: CgfRef = Arc::new(compound_poisson_cgf(l2, Arc::new(gamma_gain_cgf(g).unwrap())).unwrap());
        let k = omega_cgf(OmegaSpec { signal: x, interference: y, theta }).unwrap();
        let numeric = solve_saddle(&k, 0.0).unwrap().t_hat;
        let analytic = analytic_saddle_poisson_nakagami(l1, l2, theta, g).unwrap();
        prop_assert!((numeric - analytic).abs() <= 1e-10 * analytic.abs().max(1.0), "{numeric} vs {analytic}");
    }

    #[test]
    fn spa_location_scale_invariant(k in model_cgf(), a in 0.2f64..5.0, b in -3.0f64..3.0, z in -2.5f64..2.5) {
        let x = k.cumulant(1).unwrap() + z * k.cumulant(2).unwrap().sqrt();
        let shifted = Affine { inner: k.clone(), a, b };
        for m in [SpaMethod::Auto, SpaMethod::Base(BaseKind::SymmetricNig), SpaMethod::Base(BaseKind::Normal)] {
            let (Ok(r1), Ok(r2)) = (spa_cdf(k.as_ref(), x, m), spa_cdf(&shifted, a * x + b, m)) else { continue };
            prop_assert_eq!(r1.method_used, r2.method_used);
            prop_assert!((r1.cdf - r2.cdf).abs() < 1e-9, "{m:?}: {} vs {}", r1.cdf, r2.cdf);
        }
    }

    #[test]
    fn spa_output_is_a_probability(k in model_cgf(), z in -6.0f64..6.0) {
        let x = k.cumulant(1).unwrap() + z * k.cumulant(2).unwrap().sqrt();
        for m in [SpaMethod::Auto, SpaMethod::Base(BaseKind::AsymmetricNig), SpaMethod::Base(BaseKind::SymmetricNig), SpaMethod::Base(BaseKind::Normal)] {
            if let Ok(r) = spa_cdf(k.as_ref(), x, m) {
                prop_assert!((0.0..=1.0).contains(&r.cdf) && (0.0..=1.0).contains(&r.ccdf));
                prop_assert_eq!(r.cdf, r.raw_cdf.clamp(0.0, 1.0));
                let again = spa_cdf(k.as_ref(), x, m).unwrap();
                prop_assert_eq!(r, again);
            }
        }
    }

    #[test]
    fn gaussian_target_exact(mean in -5.0f64..5.0, var in 0.05f64..10.0, z in -5.0f64..5.0) {
        let g = GaussianCgf::new(mean, var).unwrap();
        let x = mean + z * var.sqrt();
        let r = spa_cdf(&g, x, SpaMethod::Base(BaseKind::Normal)).unwrap();
        prop_assert!((r.cdf - normal_cdf(z)).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn nig_density_integrates_to_one(p in nig_params()) {
        let q = QuadratureSettings::with_tolerances(1e-13, 1e-12);
        let sd = (p.delta * p.alpha * p.alpha / p.gamma().powi(3)).sqrt();
        let mean = p.mu + p.delta * p.beta / p.gamma();
        let (lo, hi) = (mean - 400.0 * sd.max(p.delta), mean + 400.0 * sd.max(p.delta));
        let mut total = 0.0;
        let mut cuts = vec![lo];
        for k in -40..=40 {
            cuts.push(mean + k as f64 * 0.5 * sd.min(p.delta));
        }
        cuts.push(hi);
        for w in cuts.windows(2) {
            total += integrate(|z: f64| nig_pdf(z, &p).unwrap(), w[0], w[1], &q).unwrap().value;
        }
        prop_assert!((total - 1.0).abs() < 1e-8, "{p:?}: {total}");
    }

    #[test]
    fn outage_monotone_in_threshold(l in 2.0f64..20.0, p in 0.2f64..0.8, th_db in -5.0f64..8.0, dth in 0.1f64..3.0) {
        let sc = |t: f64| Scenario { model: Model::PoissonNakagami, lambda: Some(l), p, theta_db: t, ..Default::default() };
        for name in ["normal", "gil_pelaez"] {
            let m: Method = name.parse().unwrap();
            let lo = run_method(&sc(th_db), m).unwrap().p_out;
            let hi = run_method(&sc(th_db + dth), m).unwrap().p_out;
            prop_assert!(lo <= hi + 1e-9, "{name}: {lo} > {hi}");
        }
    }

    #[test]
    fn gil_pelaez_gamma_round_trip(m in 0.5f64..5.0, r in 0.5f64..3.0, f in 0.1f64..4.0) {
        let k = gamma_gain_cgf(GainLaw::new(m, r).unwrap()).unwrap();
        let w = f * m / r;
        let exact = statrs::function::gamma::gamma_ur(m, r * w);
        let inv = gil_pelaez_ccdf(&k, w, &InversionSettings::default()).unwrap();
        prop_assert!((inv.value - exact).abs() < 1e-6, "{} vs {exact}", inv.value);
    }

    #[test]
    fn mc_independent_of_thread_count(seed in any::<u64>(), l in 1.0f64..10.0) {
        let agg = Aggregation::Poisson { lam1: 0.7 * l, lam2: 0.3 * l };
        let run = |threads| {
            let mc = McSettings { trials: 20_000, seed, stream_block: 1_500, threads: Some(threads), ..Default::default() };
            mc_outage_compound(agg, GainLaw::rayleigh(), 1.0, 0.0, &mc).unwrap()
        };
        let one = run(1);
        prop_assert_eq!(one, run(3));
        prop_assert_eq!(one, run(7));
    }

    #[test]
    fn sweep_rows_in_grid_order(from in 2.0f64..5.0, span in 1.0f64..15.0, steps in 2usize..12, log in any::<bool>()) {
        let sweep = Sweep { field: "lambda".into(), from, to: from + span, steps, scale: if log { Scale::Log } else { Scale::Linear } };
        let sc = Scenario {
            model: Model::PoissonNakagami,
            lambda: Some(from),
            theta_db: 1.0,
            methods: vec!["normal".parse().unwrap(), "sym_nig".parse().unwrap()],
            sweep: Some(sweep.clone()),
            ..Default::default()
        };
        let rows = run_sweep(&sc).unwrap();
        prop_assert_eq!(rows.len(), 2 * steps);
        for (i, v) in sweep.grid().iter().enumerate() {
            for (j, m) in sc.methods.iter().enumerate() {
                let r = &rows[2 * i + j];
                prop_assert_eq!(r.sweep_value, Some(*v));
                prop_assert_eq!(r.method, *m);
                let p = r.p_out().unwrap();
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }
    }
}

/// Every method is monotone in the threshold across the model sweeps.
#[test]
fn outage_monotone_in_threshold_on_model_grids() {
    let mut points: Vec<Scenario> = Vec::new();
    for k in 2..=20 {
        points.push(Scenario { model: Model::PoissonNakagami, lambda: Some(k as f64), ..Default::default() });
        points.push(Scenario { model: Model::BinomialNakagami, l: k, ..Default::default() });
    }
    for n in [50.0, 100.0, 150.0, 200.0, 250.0, 300.0] {
        points.push(Scenario { model: Model::PppComp, avg_bs_count: Some(n), ..Default::default() });
    }
    let mut violations = Vec::new();
    for base in &points {
        for name in ["auto", "nig", "sym_nig", "normal", "gil_pelaez"] {
            let m: Method = name.parse().unwrap();
            let v: Vec<f64> = [-5.0, 0.0, 5.0]
                .iter()
                .map(|&t| run_method(&Scenario { theta_db: t, ..base.clone() }, m).unwrap().p_out)
                .collect();
            if !v.windows(2).all(|w| w[0] <= w[1] + 1e-9) {
                violations.push(format!("{name} {} lambda={:?} L={} N={:?}: {v:?}", base.model, base.lambda, base.l, base.avg_bs_count));
            }
        }
    }
    assert!(violations.is_empty(), "{}", violations.join("\n"));
}
