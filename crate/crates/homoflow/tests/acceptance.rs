//! End-to-end acceptance checks, one test per numbered criterion. Each test
//! exercises the public API the way a study script would and asserts the
//! quantitative tolerance for that criterion, so the pass/fail summary of
//! this target is the scorecard of the whole laboratory.

use homoflow::collision::{self, MomentOde, M11, M22};
use homoflow::dispersion::solve_root;
use homoflow::entropy::{self, Domain};
use homoflow::frozen::{
    collision_rate_decay, cylindrical_free_flow, shear_energy_ratio, shear_free_flow,
    weak_limit_check, FreeFlowSolution, PredictedDecay, Regime, VelocityProfile,
};
use homoflow::mc::{self, McRun, RateMode};
use homoflow::toy::{
    adiabatic_check, reconstruct_total_moment, solve_field, solve_lambda_volterra,
    solve_selfconsistent, AdiabaticReport, InitialProfile,
};
use homoflow::wkb;

const PI: f64 = std::f64::consts::PI;

fn isotropic_start() -> [f64; 6] {
    let mut m = [0.0; 6];
    m[M11] = 1.0;
    m[collision::M22] = 1.0;
    m[collision::M33] = 1.0;
    m
}

fn maxwellian3(rho: f64, theta: f64) -> impl Fn([f64; 3]) -> f64 + Sync {
    move |w: [f64; 3]| {
        let q = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) / theta;
        rho * (-q).exp() / (PI * theta).powf(1.5)
    }
}

#[test]
fn criterion_01_collision_constant_oracles() {
    let flat = collision::collision_rate(|_| 1.0).unwrap();
    let quadratic = collision::collision_rate(|x| x * x).unwrap();
    assert!(
        (flat - 4.0 * PI / 5.0).abs() <= 1e-12 * (4.0 * PI / 5.0),
        "b(1) = {flat}, expected 4pi/5"
    );
    assert!(
        (quadratic - 12.0 * PI / 35.0).abs() <= 1e-12 * (12.0 * PI / 35.0),
        "b(x^2) = {quadratic}, expected 12pi/35"
    );
}

#[test]
fn criterion_02_moment_growth_and_b_scaling() {
    let times: Vec<f64> = (1..=300).map(|i| 0.5 * i as f64).collect();
    let fit_c1 = |b: f64| {
        let ode = MomentOde::new(1.0, 1.0, b).unwrap();
        let traj = collision::integrate_moments(&ode, isotropic_start(), &times, 1e-9, 1e-11)
            .unwrap();
        collision::fit_growth(&traj, 50.0, 150.0).unwrap()
    };
    let fit = fit_c1(1.0);
    let c1_pred = 0.6 * (4.0 / 3.0f64).powf(1.0 / 3.0);
    let c2_pred = -4.0 / 3.0;
    assert!(
        (fit.c1 - c1_pred).abs() <= 0.05 * c1_pred,
        "c1 = {} vs predicted {c1_pred}",
        fit.c1
    );
    assert!(
        (fit.c2 - c2_pred).abs() <= 0.20 * c2_pred.abs(),
        "c2 = {} vs predicted {c2_pred}",
        fit.c2
    );
    let reference = fit.c1;
    for b in [0.5, 2.0] {
        let ratio = fit_c1(b).c1 / reference;
        let scaling = b.powf(1.0 / 3.0);
        assert!(
            (ratio / scaling - 1.0).abs() <= 0.05,
            "c1({b})/c1(1) = {ratio} vs b^(1/3) = {scaling}"
        );
    }
}

#[test]
fn criterion_03_wkb_dominant_cycle_and_direct_loop() {
    // moment-system graph: the dominant cycle must be the length-3,
    // two-thick-edge circuit with exponent 5/3 and the moment growth
    // amplitude, reproduced here symbolically
    let ode = MomentOde::new(1.0, 1.0, 1.0).unwrap();
    let g = wkb::moment_graph(&ode).unwrap();
    let dom = g.dominant_cycles().unwrap();
    let top = &dom[0];
    assert_eq!((top.len, top.thick), (3, 2), "dominant cycle shape");
    assert!((top.exponent - 5.0 / 3.0).abs() < 1e-14);
    let amp_pred = 0.6 * (4.0 / 3.0f64).powf(1.0 / 3.0);
    assert!(
        (top.amplitude * top.omega.re - amp_pred).abs() <= 1e-12 * amp_pred,
        "amplitude {} vs {amp_pred}",
        top.amplitude * top.omega.re
    );

    // two-node thick/thin loop against direct integration
    let mut pair = wkb::WkbGraph::new(vec!["X", "Y"]);
    pair.add_coupling(1, 0, 0.0, 1.0).unwrap(); // X' = t Y
    pair.add_coupling(0, 1, 1.0, 0.0).unwrap(); // Y' = X
    let loop_report = &pair.dominant_cycles().unwrap()[0];
    assert!((loop_report.exponent - 1.5).abs() < 1e-14);

    let mut state = [1.0, 1.0];
    let mut t = 0.0;
    let mut stepper = homoflow::ode::Dp54::<2>::new(1e-10, 1e-12, 1e-3);
    let mut f = |t: f64, y: &[f64; 2]| [t * y[1], y[0]];
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for target in (1..=80).map(|i| 0.5 * i as f64) {
        while t < target {
            stepper.step(&mut f, &mut t, &mut state, target).unwrap();
        }
        if target >= 20.0 {
            ts.push(target);
            logs.push(state[0].ln());
        }
    }
    let fit = homoflow::fit::fit_basis(&ts, &logs, &[&|t: f64| t.powf(1.5), &|t: f64| t, &|_| 1.0])
        .unwrap();
    let direct = fit.coeffs[0];
    let predicted = loop_report.omega.re * loop_report.amplitude;
    assert!(
        (direct / predicted - 1.0).abs() <= 0.02,
        "direct t^(3/2) coefficient {direct} vs predicted {predicted}"
    );
}

#[test]
fn criterion_04_dispersion_roots() {
    // beta = 1: closed form z0 = eps
    for eps in [0.05, 0.5] {
        let root = solve_root(eps, 0.0, 1.0).unwrap();
        assert!(
            (root.z0.re - eps).abs() <= 1e-13 * eps && root.z0.im == 0.0,
            "beta=1 root {} vs eps {eps}",
            root.z0
        );
        assert!(root.residual < 1e-10);
    }

    // beta = 2: z0 / sqrt(eps) -> 1 monotonically; the closed form
    // [eps + sqrt(eps^2 + 4 eps)]/2 approaches from above
    let mut ratios = Vec::new();
    for eps in [1e-3, 1e-4, 1e-5] {
        let root = solve_root(eps, 0.0, 2.0).unwrap();
        assert!(root.residual < 1e-10);
        ratios.push(root.z0.re / eps.sqrt());
    }
    println!("beta=2 ratios through eps = 1e-3, 1e-4, 1e-5: {ratios:?}");
    assert!(
        ratios[0] > ratios[1] && ratios[1] > ratios[2] && ratios[2] > 1.0,
        "ratios {ratios:?} not approaching 1 monotonically"
    );
    assert!(
        (ratios[2] - 1.0).abs() <= 0.03,
        "final ratio {} outside 3% of 1",
        ratios[2]
    );

    // spatial modes damp the growth rate
    let base = solve_root(0.05, 0.0, 2.0).unwrap();
    for k in [0.05, 0.1, 0.5] {
        let root = solve_root(0.05, k, 2.0).unwrap();
        assert!(root.residual < 1e-10, "k = {k} residual {}", root.residual);
        assert!(
            root.z0.re < base.z0.re,
            "Re z0({k}) = {} not below z0(0) = {}",
            root.z0.re,
            base.z0.re
        );
    }
}

#[test]
fn criterion_05_toy_cross_oracles() {
    let eps = 0.05;
    let profile = InitialProfile::gaussian(0.0, 1.0).unwrap();

    // Volterra growth rate against the dispersion root
    let series = solve_lambda_volterra(2.0, |_| eps, &profile, 80.0, 8000).unwrap();
    let rate = series.log_slope(40.0, 80.0).unwrap();
    let z0 = solve_root(eps, 0.0, 2.0).unwrap().z0.re;
    assert!(
        (rate / z0 - 1.0).abs() <= 0.02,
        "Volterra rate {rate} vs dispersion root {z0}"
    );

    // field solution against the Volterra march on the same grid
    let field = solve_field(&profile, |_| eps, -10.0, 25.0, 700, 20.0, 1000).unwrap();
    let volterra = solve_lambda_volterra(2.0, |_| eps, &profile, 20.0, 1000).unwrap();
    let lambda_field = field.moment_series(2.0);
    for t in [10.0, 20.0] {
        let i = field.time_index(t);
        let gap = (lambda_field[i] / volterra.lambda[i] - 1.0).abs();
        assert!(gap <= 0.01, "t = {t}: field/Volterra gap {gap}");
    }

    // Monte Carlo total moment against the deterministic reconstruction;
    // ensemble order beta-1 pairs with reconstruction order beta
    let record_times = vec![2.0, 4.0, 6.0, 8.0, 10.0];
    let run = McRun {
        n_particles: 1_000_000,
        mode: RateMode::Constant(eps),
        t_end: 10.0,
        seed: 90210,
        record_times: record_times.clone(),
        betas: vec![1.0],
        log_events: false,
    };
    let traj = mc::simulate(&run, &profile).unwrap();
    let c1 = profile.moment(1.0).unwrap();
    for (row, t) in traj.rows.iter().skip(1).zip(&record_times) {
        let (est, se) = row.moments[0];
        let det = reconstruct_total_moment(&field, &profile, 2.0, field.time_index(*t)).unwrap();
        let diff = (c1 * est - det).abs();
        assert!(
            diff <= 3.0 * c1 * se,
            "t = {t}: MC {} vs deterministic {det}, gap {diff} > 3 SE = {}",
            c1 * est,
            3.0 * c1 * se
        );
    }
}

#[test]
fn criterion_06_self_consistent_rate() {
    let profile = InitialProfile::gaussian(0.0, 1.0).unwrap();
    let mut failures = Vec::new();

    for a in [0.2, 0.5, 0.8] {
        let series = solve_selfconsistent(a, &profile, 1e4, 20_000).unwrap();
        let t_end = *series.times.last().unwrap();
        let te = t_end * series.epsilon.last().unwrap();
        let target = 1.0 - a;
        let tol = 0.05 * target + 0.02;
        if (te - target).abs() >= tol {
            failures.push(format!(
                "a = {a}: t*eps(T) = {te:.4} vs {target} +/- {tol:.3} \
                 (correction decays like t^-a; at a = 0.2 the band needs T ~ 1e7, \
                 see the endpoint analysis in the solver docs)"
            ));
        }
        let slope = series.loglog_slope(1e3, 1e4).unwrap();
        let predicted = -(1.0 + a);
        if (slope - predicted).abs() >= 0.1 {
            failures.push(format!(
                "a = {a}: lambda log-log slope {slope:.4} vs {predicted} +/- 0.1"
            ));
        }
    }

    // Monte Carlo route at a = 0.5
    let run = McRun {
        n_particles: 1_000_000,
        mode: RateMode::SelfConsistent { a: 0.5 },
        t_end: 1e3,
        seed: 1414,
        record_times: vec![1.0, 3.16, 10.0, 31.6, 100.0, 178.0, 316.0, 562.0, 1000.0],
        betas: vec![],
        log_events: false,
    };
    let traj = mc::simulate(&run, &profile).unwrap();
    let trace = mc::epsilon_trace_check(&traj, 0.5).unwrap();
    if (trace.fitted - 0.5).abs() >= 0.07 {
        failures.push(format!(
            "MC a = 0.5: t*eps plateau {:.4} vs 0.5 +/- 0.07",
            trace.fitted
        ));
    }

    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn criterion_07_adiabatic_regimes() {
    let profile = InitialProfile::gaussian(0.0, 1.0).unwrap();
    let (report, _) = adiabatic_check(2.0, 1.0, &profile, 1e4, 20_000).unwrap();
    match report {
        AdiabaticReport::Growing { ratio, .. } => {
            assert!((ratio - 1.0).abs() <= 0.1, "growth ratio {ratio}");
        }
        other => panic!("expected stretched-exponential growth, got {other:?}"),
    }
    let (report, _) = adiabatic_check(0.5, 1.0, &profile, 1e3, 10_000).unwrap();
    match report {
        AdiabaticReport::Decaying {
            fitted_exponent,
            predicted_exponent,
        } => {
            assert!((predicted_exponent + 1.5).abs() < 1e-14);
            assert!(
                (fitted_exponent - predicted_exponent).abs() <= 0.1,
                "decay exponent {fitted_exponent} vs {predicted_exponent}"
            );
        }
        other => panic!("expected algebraic decay, got {other:?}"),
    }
}

#[test]
fn criterion_08_frozen_decay_exponents() {
    let p = VelocityProfile::maxwellian();
    let grid: Vec<f64> = (0..=24).map(|i| 0.5 * i as f64).collect();
    for (gamma, predicted) in [(0.0, -1.0), (-0.5, -1.0), (-1.5, -0.5)] {
        let d = collision_rate_decay(&p, gamma, &grid).unwrap();
        assert_eq!(d.predicted, PredictedDecay::Exponent(predicted));
        assert!(
            (d.fitted_slope - predicted).abs() <= 0.05,
            "gamma = {gamma}: slope {} vs {predicted}",
            d.fitted_slope
        );
    }
    let below = collision_rate_decay(&p, -1.1, &grid).unwrap().fitted_slope;
    let at = collision_rate_decay(&p, -1.0, &grid).unwrap().fitted_slope;
    let above = collision_rate_decay(&p, -0.9, &grid).unwrap().fitted_slope;
    assert!(
        above < at && at < below,
        "logarithmic case not bracketed: {above} {at} {below}"
    );
}

#[test]
fn criterion_09_free_flow_invariants() {
    let p = VelocityProfile::maxwellian();
    let cube = Domain::cube(8.0).unwrap();

    // mass under all three free flows
    let dilatation = FreeFlowSolution {
        regime: Regime::HomogeneousDilatation,
        profile: p.clone(),
        gamma: 0.0,
        k_shear: 0.0,
    };
    let mass_hom: Vec<f64> = [0.0, 1.0]
        .iter()
        .map(|&tau| {
            let d = dilatation.clone();
            entropy::report(&move |w| d.density(tau, w).unwrap(), &cube)
                .unwrap()
                .rho
        })
        .collect();
    assert!(
        (mass_hom[1] - mass_hom[0]).abs() < 1e-8,
        "homogeneous dilatation mass drift {:?}",
        mass_hom
    );

    let mass_cyl: Vec<f64> = [0.0, 1.0, 2.0]
        .iter()
        .map(|&tau| {
            let p = p.clone();
            entropy::report(&move |w| cylindrical_free_flow(&p, tau, w).unwrap(), &cube)
                .unwrap()
                .rho
        })
        .collect();
    for m in &mass_cyl[1..] {
        assert!((m - mass_cyl[0]).abs() < 1e-8, "cylindrical mass {mass_cyl:?}");
    }

    let mass_shear: Vec<f64> = [1.0, 25.0, 50.0]
        .iter()
        .map(|&t| {
            let p = p.clone();
            let d = Domain::shear_window(8.0, 8.0, -(t - 1.0)).unwrap();
            entropy::report(&move |w| shear_free_flow(&p, 1.0, t, w).unwrap(), &d)
                .unwrap()
                .rho
        })
        .collect();
    for m in &mass_shear[1..] {
        assert!((m - mass_shear[0]).abs() < 1e-8, "shear mass {mass_shear:?}");
    }

    // shear heating ratio settles within 1% by t = 50
    let ratio = shear_energy_ratio(&p, 1.0, 50.0).unwrap();
    assert!((ratio - 1.0).abs() <= 0.01, "energy ratio {ratio}");

    // weak limit: gap decreasing in tau, final below 1% of sup phi
    let phi = |x: [f64; 3]| {
        let r2 = ((x[0] - 0.3) * (x[0] - 0.3)
            + (x[1] + 0.2) * (x[1] + 0.2)
            + (x[2] - 0.1) * (x[2] - 0.1))
            / 4.0;
        if r2 >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - r2)).exp()
        }
    };
    let sup = (-1.0f64).exp();
    let taus: Vec<f64> = (1..=6).map(|i| i as f64).collect();
    let gaps = weak_limit_check(&p, 1.0, &taus, &phi).unwrap().gaps;
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "weak-limit gaps not decreasing: {gaps:?}");
    }
    assert!(
        *gaps.last().unwrap() < 0.01 * sup,
        "final weak-limit gap {} vs 1% of sup {sup}",
        gaps.last().unwrap()
    );
}

#[test]
fn criterion_10_entropy_identities() {
    let cg = entropy::c_g(&maxwellian3(1.0, 1.0), &Domain::cube(9.0).unwrap()).unwrap();
    let cg_pred = 1.5 * (1.0 + PI.ln() - 1.5f64.ln());
    assert!(
        (cg - cg_pred).abs() <= 1e-8,
        "C_G = {cg} vs Maxwellian value {cg_pred}"
    );

    for (rho, theta) in [(1.0f64, 1.0f64), (2.0, 0.5), (0.3, 3.0)] {
        let d = Domain::cube(9.0 * theta.sqrt().max(1.0)).unwrap();
        let r = entropy::ideal_form_residual(&maxwellian3(rho, theta), &d, rho).unwrap();
        assert!(
            r.abs() <= 1e-6,
            "rho = {rho}, theta = {theta}: residual {r}"
        );
    }

    // entropy per particle frozen along the shear family while the energy
    // grows, and along the cylindrical family (transported by value)
    let p = VelocityProfile::maxwellian();
    let mut s_ref = None;
    let mut eps_prev = 0.0;
    for t in [2.0, 5.0, 10.0] {
        let p = p.clone();
        let d = Domain::shear_window(8.0, 8.0, -(t - 1.0)).unwrap();
        let rep = entropy::report(&move |w| shear_free_flow(&p, 1.0, t, w).unwrap(), &d).unwrap();
        let s0 = *s_ref.get_or_insert(rep.s_per_particle);
        assert!(
            (rep.s_per_particle - s0).abs() <= 1e-6,
            "shear t = {t}: s/rho {} vs {s0}",
            rep.s_per_particle
        );
        assert!(rep.eps > eps_prev, "energy not growing at t = {t}");
        eps_prev = rep.eps;
    }
    let mut s_ref = None;
    for tau in [0.0, 1.0, 2.0] {
        let p = p.clone();
        let rep = entropy::report(
            &move |w| cylindrical_free_flow(&p, tau, w).unwrap() * (-2.0 * tau).exp(),
            &Domain::cube(8.0).unwrap(),
        )
        .unwrap();
        let s0 = *s_ref.get_or_insert(rep.s_per_particle);
        assert!(
            (rep.s_per_particle - s0).abs() <= 1e-6,
            "cylindrical tau = {tau}: s/rho {} vs {s0}",
            rep.s_per_particle
        );
    }
}

#[test]
fn criterion_11_non_self_similarity_witnesses() {
    // moment rates separate across orders at fixed collision rate
    let profile = InitialProfile::gaussian(0.0, 1.0).unwrap();
    let mut rates = Vec::new();
    for beta in [0.5, 1.0, 2.0] {
        let series = solve_lambda_volterra(beta, |_| 0.05, &profile, 400.0, 4000).unwrap();
        rates.push(series.log_slope(200.0, 400.0).unwrap());
    }
    assert!(
        rates[0] < rates[1] && rates[1] < rates[2],
        "moment growth rates not strictly increasing in order: {rates:?}"
    );

    // anisotropy ratio M11/M22 diverges monotonically past the transient
    let ode = MomentOde::new(1.0, 1.0, 1.0).unwrap();
    let times: Vec<f64> = (1..=150).map(|i| i as f64).collect();
    let traj =
        collision::integrate_moments(&ode, isotropic_start(), &times, 1e-9, 1e-11).unwrap();
    let ratio = traj.ratio(M11, M22);
    let late: Vec<f64> = traj
        .times
        .iter()
        .zip(&ratio)
        .filter(|(t, _)| **t > 50.0)
        .map(|(_, r)| *r)
        .collect();
    for w in late.windows(2) {
        assert!(w[1] > w[0], "M11/M22 not monotone: {late:?}");
    }
    assert!(
        late.last().unwrap() / late.first().unwrap() > 2.0,
        "M11/M22 grew only from {} to {}",
        late.first().unwrap(),
        late.last().unwrap()
    );
}

#[test]
fn criterion_12_mc_determinism_across_thread_counts() {
    let profile = InitialProfile::gaussian(0.1, 0.8).unwrap();
    let run = McRun {
        n_particles: 20_000,
        mode: RateMode::SelfConsistent { a: 0.5 },
        t_end: 5.0,
        seed: 777,
        record_times: vec![1.0, 2.0, 3.0, 4.0, 5.0],
        betas: vec![0.5, 1.0],
        log_events: false,
    };
    let csv_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let traj = pool.install(|| mc::simulate(&run, &profile)).unwrap();
        mc::summary_csv(&traj)
    };
    let single = csv_with(1);
    let multi = csv_with(4);
    assert!(!single.is_empty() && single.lines().count() == 7);
    assert_eq!(
        single.as_bytes(),
        multi.as_bytes(),
        "summary CSV differs between 1 and 4 worker threads"
    );
}
