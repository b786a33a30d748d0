//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 2 3`.

#![allow(clippy::needless_range_loop)]

mod common;

use std::time::{Duration, Instant};

use common::*;
use intensity_svar::bootstrap::{bootstrap_irf, BootstrapSettings};
use intensity_svar::dynamics::{fevd, impulse_responses, irf_sanction, stacked_dynamics, Shock};
use intensity_svar::factor::{augment_regressors, gdp_ppp_weights, weighted_average};
use intensity_svar::index::{grid_search_weight, IndexKind, IntensityIndex};
use intensity_svar::regression::{breusch_godfrey, long_run_ratio, ols, Design, INTERCEPT};
use intensity_svar::svar::{estimate_svar, DataPanel, Regressor, StructuralModel, SvarSpec};
use intensity_svar::timeseries::{
    convert_iranian_annual, convert_iranian_monthly, convert_iranian_quarterly, Calendar, CalendarSeries, PeriodLabel,
};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SYSTEMS: usize = 100;
const HORIZON: usize = 24;

fn secs(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}

fn systems() -> Vec<StructuralModel> {
    (0..SYSTEMS)
        .map(|i| random_stable_model(&mut ChaCha8Rng::seed_from_u64(9000 + i as u64), 4, 2))
        .collect()
}

fn quarters_from(start: PeriodLabel, values: Vec<f64>) -> CalendarSeries {
    CalendarSeries::gregorian(start, values).unwrap()
}

fn q0() -> PeriodLabel {
    PeriodLabel::quarter(1000, 1).unwrap()
}

fn fevd_normalization() -> bool {
    let models = systems();
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut tables = 0;
    for m in &models {
        for g in ["w0", "w1"] {
            let f = fevd(m, HORIZON, Some(g)).unwrap();
            worst = worst.max(f.max_row_error());
            tables += f.tables.len();
        }
    }
    let elapsed = t0.elapsed();
    report(
        1,
        "FEVD rows sum to one",
        worst <= 1e-10 && elapsed < Duration::from_secs(10),
        &format!("max |row sum - 1| = {worst:.2e} over {tables} tables, h = 0..{HORIZON}, {}", secs(elapsed)),
    )
}

fn irf_oracle() -> bool {
    let models = systems();
    let t0 = Instant::now();
    let worst = models
        .iter()
        .enumerate()
        .map(|(n, model)| {
            let m = model.variables.len();
            let k = model.controls.len();
            let start = random_start(&mut ChaCha8Rng::seed_from_u64(500 + n as u64), m, k);
            let mut worst = 0.0f64;
            for (c, g) in ["w0", "w1"].iter().enumerate() {
                let irf = impulse_responses(model, HORIZON, Some(g)).unwrap();
                let mut impulses: Vec<(Shock, Shocks)> = (0..m)
                    .map(|j| {
                        let mut s = Shocks::zero(m, k);
                        s.e[j] = model.sigma[j].sqrt();
                        (Shock::Domestic(model.variables[j].clone()), s)
                    })
                    .collect();
                let mut s = Shocks::zero(m, k);
                s.eta = model.omega_s;
                impulses.push((Shock::Sanction, s));
                let mut s = Shocks::zero(m, k);
                s.v[c] = model.omega_w[(c, c)].sqrt();
                impulses.push((Shock::Global(g.to_string()), s));
                for (shock, impulse) in impulses {
                    let sim = response_by_simulation(model, &start, impulse, HORIZON);
                    let r = irf.get(&shock).unwrap();
                    for (h, row) in sim.iter().enumerate() {
                        for (i, v) in row.iter().enumerate() {
                            worst = worst.max((r.at(h, i) - v).abs());
                        }
                    }
                }
            }
            worst
        })
        .fold(0.0f64, f64::max);
    let elapsed = t0.elapsed();
    report(
        2,
        "analytic IRFs equal shocked-minus-baseline simulation",
        worst < 1e-8 && elapsed < Duration::from_secs(30),
        &format!("max abs deviation {worst:.2e} over {SYSTEMS} systems, 7 shocks each, {}", secs(elapsed)),
    )
}

fn direct_vs_stacked() -> bool {
    let models = systems();
    let mut irf_dev = 0.0f64;
    let mut fevd_dev = 0.0f64;
    for m in &models {
        for g in ["w0", "w1"] {
            let d = impulse_responses(m, HORIZON, Some(g)).unwrap();
            let f = fevd(m, HORIZON, Some(g)).unwrap();
            let (si, sf) = stacked_dynamics(m, HORIZON, Some(g)).unwrap();
            assert_eq!(d.shocks.len(), si.shocks.len());
            irf_dev = irf_dev.max(d.max_deviation(&si));
            fevd_dev = fevd_dev.max(f.max_deviation(&sf));
        }
    }
    report(
        3,
        "direct and stacked dynamics agree",
        irf_dev < 1e-10 && fevd_dev < 1e-10,
        &format!("max IRF deviation {irf_dev:.2e}, max FEVD deviation {fevd_dev:.2e}"),
    )
}

fn estimation_truth() -> StructuralModel {
    let mut m = StructuralModel::zeros(&["de", "dm", "dp", "dy"], &["dyw"]);
    m.a0 = DMatrix::from_row_slice(
        4,
        4,
        &[1.0, 0.0, 0.0, 0.0, -0.2, 1.0, 0.0, 0.0, -0.3, -0.1, 1.0, 0.0, 0.1, -0.05, 0.2, 1.0],
    );
    m.a1 = DMatrix::from_row_slice(
        4,
        4,
        &[0.3, 0.05, 0.0, 0.1, 0.1, 0.4, 0.0, 0.0, 0.05, 0.1, 0.5, -0.1, -0.05, 0.0, 0.1, 0.2],
    );
    m.a2 = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, -0.1, 0.2, 0.05]));
    m.gamma0 = DVector::from_vec(vec![0.303, 0.1, 0.05, -0.05]);
    m.gamma1 = DVector::from_vec(vec![-0.245, 0.0, 0.02, 0.01]);
    m.dw = DMatrix::from_column_slice(4, 1, &[0.2, 0.1, -0.1, 0.5]);
    m.intercept = DVector::from_vec(vec![0.01, 0.02, 0.03, 0.005]);
    m.sigma = vec![0.01, 0.004, 0.001, 0.0004];
    m.s_intercept = 0.063;
    m.rho_s = 0.743;
    m.omega_s = 0.125;
    m.zw_intercept[0] = 0.005;
    m.a_zw[(0, 0)] = 0.4;
    m.omega_w[(0, 0)] = 0.0001;
    m
}

fn simulated_panel(model: &StructuralModel, t: usize, seed: u64, burn: usize) -> DataPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = model.variables.len();
    let k = model.controls.len();
    let shocks: Vec<Shocks> = (0..t + burn).map(|_| draw_shocks(&mut rng, model)).collect();
    let path = simulate(model, &Start::zero(m, k), &shocks);
    let mut panel = DataPanel::new();
    for (j, name) in model.variables.iter().enumerate() {
        panel.insert(name.clone(), quarters_from(q0(), path.q[burn..].iter().map(|r| r[j]).collect()));
    }
    panel.insert("s", quarters_from(q0(), path.s[burn..].to_vec()));
    for (c, name) in model.controls.iter().enumerate() {
        panel.insert(name.clone(), quarters_from(q0(), path.z[burn..].iter().map(|r| r[c]).collect()));
    }
    panel
}

/// `(label, estimate, standard error, truth)` for every estimated
/// structural and exogenous-process coefficient.
fn coefficient_table(spec: &SvarSpec, truth: &StructuralModel, panel: &DataPanel) -> Vec<(String, f64, f64, f64)> {
    let est = estimate_svar(spec, panel).unwrap();
    let mut out = Vec::new();
    for (i, fit) in est.equations.iter().enumerate() {
        for r in spec.regressors(i) {
            let value = match r {
                Regressor::Intervention { lag: 0 } => truth.gamma0[i],
                Regressor::Intervention { .. } => truth.gamma1[i],
                Regressor::Endogenous { index, lag: 0 } => -truth.a0[(i, index)],
                Regressor::Endogenous { index, lag: 1 } => truth.a1[(i, index)],
                Regressor::Endogenous { index, .. } => truth.a2[(i, index)],
                Regressor::Control { index } => truth.dw[(i, index)],
            };
            let name = spec.regressor_name(&r);
            let j = fit.index_of(&name).unwrap();
            out.push((format!("{}:{name}", spec.ordering[i]), fit.coefficients[j], fit.standard_errors[j], value));
        }
        let j = fit.index_of(INTERCEPT).unwrap();
        out.push((format!("{}:const", spec.ordering[i]), fit.coefficients[j], fit.standard_errors[j], truth.intercept[i]));
    }
    let s = est.s_process.as_ref().unwrap();
    out.push(("s:rho".into(), s.rho(), s.fit.standard_errors[0], truth.rho_s));
    let c = s.fit.index_of(INTERCEPT).unwrap();
    out.push(("s:const".into(), s.intercept, s.fit.standard_errors[c], truth.s_intercept));
    if let intensity_svar::svar::ControlFits::Ar1 { fits } = &est.controls_process {
        for (k, f) in fits.iter().enumerate() {
            out.push((format!("{}:rho", truth.controls[k]), f.rho(), f.fit.standard_errors[0], truth.a_zw[(k, k)]));
        }
    }
    out
}

fn estimation_consistency() -> bool {
    let truth = estimation_truth();
    let spec = SvarSpec::new(&["de", "dm", "dp", "dy"]).with_controls(&["dyw"]);
    let t0 = Instant::now();
    let reps: Vec<Vec<(String, bool)>> = (0..100u64)
        .into_par_iter()
        .map(|r| {
            let panel = simulated_panel(&truth, 20_000, 40_000 + r, 200);
            coefficient_table(&spec, &truth, &panel)
                .into_iter()
                .map(|(name, b, se, v)| (name, (b - v).abs() <= 3.0 * se))
                .collect()
        })
        .collect();
    let elapsed = t0.elapsed();
    let ncoef = reps[0].len();
    let counts: Vec<usize> = (0..ncoef).map(|c| reps.iter().filter(|r| r[c].1).count()).collect();
    let (worst_i, worst) = counts.iter().enumerate().min_by_key(|(_, c)| **c).unwrap();
    let joint = reps.iter().filter(|r| r.iter().all(|(_, ok)| *ok)).count();
    report(
        4,
        "estimation recovers structural coefficients",
        *worst >= 95 && elapsed < Duration::from_secs(120),
        &format!(
            "{ncoef} coefficients; fewest within 3 SE: {worst}/100 ({}); all jointly within: {joint}/100; {}",
            reps[0][worst_i].0,
            secs(elapsed)
        ),
    )
}

fn grid_search() -> bool {
    let hits = (0..100u64)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = ChaCha8Rng::seed_from_u64(70_000 + r);
            let n = 5000;
            let mut on = vec![0.5; n];
            let mut off = vec![0.3; n];
            let mut dy = vec![0.0; n];
            for t in 1..n {
                on[t] = 0.5 + 0.8 * (on[t - 1] - 0.5) + 0.1 * normal(&mut rng);
                off[t] = 0.3 + 0.8 * (off[t - 1] - 0.3) + 0.1 * normal(&mut rng);
                dy[t] = 0.01 + 0.3 * dy[t - 1] - 0.5 * (on[t - 1] - 0.4 * off[t - 1]) + 0.05 * normal(&mut rng);
            }
            let index = |v: Vec<f64>, kind| IntensityIndex {
                series: quarters_from(q0(), v),
                kind,
                normalization_max: 1.0,
                net_weight: None,
            };
            let s = grid_search_weight(
                &index(on, IndexKind::On),
                &index(off, IndexKind::Off),
                &quarters_from(q0(), dy),
                0.1,
            )
            .unwrap();
            s.w_hat == 0.4
        })
        .count();
    report(
        5,
        "grid search recovers w = 0.4",
        hits >= 99,
        &format!("w_hat = 0.4 exactly in {hits}/100 replications at T = 5000"),
    )
}

fn published_value_arithmetic() -> bool {
    let theta = long_run_ratio(-0.037, -0.186).unwrap();
    let theta_ok = (theta - -0.031).abs() <= 0.001 && format!("{theta:.3}") == "-0.031";

    // Only the printed exchange-rate coefficients are set; a one-period
    // intensity impulse with no persistence isolates the impact and the
    // next-quarter term.
    let mut m = StructuralModel::zeros(&["de", "dm", "dp", "dy"], &[]);
    m.gamma0[0] = 0.303;
    m.gamma1[0] = -0.245;
    m.omega_s = 0.125;
    m.rho_s = 0.743;
    let one_sd = irf_sanction(&m, 1).unwrap().at(0, 0);
    m.omega_s = 0.16;
    m.rho_s = 0.0;
    let median = irf_sanction(&m, 1).unwrap();
    let impact = median.at(0, 0);
    let reversal = -median.at(1, 0);

    let checks = [
        theta_ok,
        (0.047..=0.050).contains(&impact),
        (0.03..=0.04).contains(&one_sd),
        (reversal - 0.038).abs() <= 0.002,
    ];
    report(
        6,
        "printed-coefficient arithmetic",
        checks.iter().all(|c| *c),
        &format!(
            "long-run {theta:.4} (printed -0.031); median impact {impact:.4} in [0.047, 0.050]; \
             one-sd impact {one_sd:.4} in [0.03, 0.04]; reversal {reversal:.4} vs 0.038 +- 0.002"
        ),
    )
}

fn bg_oracle_and_size() -> bool {
    let lags = 4;
    let mut worst = 0.0f64;
    for r in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(80_000 + r);
        let n = 125;
        let x1: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
        let x2: Vec<f64> = (0..n).map(|_| uniform(&mut rng, 0.0, 2.0)).collect();
        let rho = 0.6 * (r % 3) as f64 / 2.0;
        let mut u = vec![0.0; n];
        for t in 0..n {
            u[t] = if t > 0 { rho * u[t - 1] } else { 0.0 } + normal(&mut rng);
        }
        let y: Vec<f64> = (0..n).map(|t| 1.0 + 0.5 * x1[t] - 0.3 * x2[t] + u[t]).collect();
        let fit = ols(&y, &Design::new().with("x1", x1.clone()).with("x2", x2.clone()), true).unwrap();
        let lm = breusch_godfrey(&fit, lags).unwrap().lm_stat;

        let b = normal_equations(&[vec![1.0; n], x1.clone(), x2.clone()], &y);
        let e: Vec<f64> = (0..n).map(|t| y[t] - b[0] - b[1] * x1[t] - b[2] * x2[t]).collect();
        let mut cols = vec![vec![1.0; n], x1, x2];
        for l in 1..=lags {
            cols.push((0..n).map(|t| if t >= l { e[t - l] } else { 0.0 }).collect());
        }
        let g = normal_equations(&cols, &e);
        let ssr: f64 = (0..n)
            .map(|t| {
                let fitted: f64 = cols.iter().zip(&g).map(|(c, gi)| c[t] * gi).sum();
                (e[t] - fitted).powi(2)
            })
            .sum();
        let tss: f64 = e.iter().map(|v| v * v).sum();
        let oracle = n as f64 * (1.0 - ssr / tss);
        worst = worst.max((lm - oracle).abs() / oracle.abs().max(1.0));
    }

    let reps = 5000u64;
    let rejections = (0..reps)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = ChaCha8Rng::seed_from_u64(90_000 + r);
            let n = 125;
            let x: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
            let y: Vec<f64> = x.iter().map(|v| 1.0 + 0.5 * v + normal(&mut rng)).collect();
            let fit = ols(&y, &Design::new().with("x", x), true).unwrap();
            breusch_godfrey(&fit, lags).unwrap().p_value < 0.05
        })
        .count();
    let size = rejections as f64 / reps as f64;
    report(
        7,
        "Breusch-Godfrey statistic and size",
        worst < 1e-10 && (0.04..=0.06).contains(&size),
        &format!("max |LM - n R^2| (relative) {worst:.2e}; rejection rate {size:.4} over {reps} white-noise samples"),
    )
}

fn calendar_conversions() -> bool {
    type Convert = fn(&CalendarSeries) -> intensity_svar::Result<CalendarSeries>;
    let cases: [(&str, Convert, f64, f64, f64); 3] = [
        ("1380", convert_iranian_annual, 80.0, 285.0, 365.0),
        ("1380Q1", convert_iranian_quarterly, 8.0, 1.0, 9.0),
        ("1380-01", convert_iranian_monthly, 1.0, 2.0, 3.0),
    ];
    let mut exact = true;
    let mut worst = 0.0f64;
    for (label, convert, prev, cur, den) in cases {
        let start: PeriodLabel = label.parse().unwrap();
        let run = |v: Vec<f64>| convert(&CalendarSeries::new(Calendar::Iranian, start, v).unwrap()).unwrap();
        let n = 12;
        let constant = run(vec![7.0 * den; n]);
        exact &= constant.values().iter().all(|v| *v == 7.0 * den);
        exact &= constant.len() == n - 1 && constant.calendar() == Calendar::Gregorian;
        let mut imp = vec![0.0; n];
        imp[4] = den;
        let g = run(imp);
        for (i, v) in g.values().iter().enumerate() {
            let want = match i + 1 {
                4 => cur,
                5 => prev,
                _ => 0.0,
            };
            exact &= *v == want;
        }
        let ramp = run((0..n).map(|t| den * t as f64).collect());
        for (i, v) in ramp.values().iter().enumerate() {
            let t = (i + 1) as f64;
            exact &= *v == prev * (t - 1.0) + cur * t;
        }
        let raw: Vec<f64> = (0..n).map(|t| 0.1 * t as f64 + (t as f64).sqrt()).collect();
        let g = run(raw.clone());
        for (i, v) in g.values().iter().enumerate() {
            let want = prev / den * raw[i] + cur / den * raw[i + 1];
            worst = worst.max((v - want).abs());
        }
    }
    report(
        8,
        "Iranian-to-Gregorian conversions",
        exact && worst <= 1e-12,
        &format!("scaled fixtures exact: {exact}; unscaled max error {worst:.2e}"),
    )
}

fn bootstrap_truth() -> StructuralModel {
    let mut m = StructuralModel::zeros(&["a", "b"], &["w"]);
    m.a0[(1, 0)] = -0.4;
    m.a1 = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.2, 0.3]);
    m.gamma0 = DVector::from_vec(vec![0.3, -0.2]);
    m.gamma1 = DVector::from_vec(vec![-0.2, 0.1]);
    m.dw = DMatrix::from_column_slice(2, 1, &[0.5, 0.2]);
    m.sigma = vec![0.04, 0.01];
    m.s_intercept = 0.06;
    m.rho_s = 0.7;
    m.omega_s = 0.12;
    m.a_zw[(0, 0)] = 0.4;
    m.omega_w[(0, 0)] = 0.0004;
    m
}

fn bootstrap_bands() -> bool {
    let truth = bootstrap_truth();
    let spec = SvarSpec::new(&["a", "b"]).with_lags(&[1]).with_controls(&["w"]);
    let horizons = [0usize, 1, 4];
    let t0 = Instant::now();

    let panel = simulated_panel(&truth, 250, 1, 100);
    let est = estimate_svar(&spec, &panel).unwrap();
    let settings = |seed| BootstrapSettings {
        replications: 200,
        seed,
        ..Default::default()
    };
    let a = bootstrap_irf(&est, &panel, 4, Some("w"), &settings(17)).unwrap();
    let b = bootstrap_irf(&est, &panel, 4, Some("w"), &settings(17)).unwrap();
    let identical = a == b && serde_json::to_string(&a).unwrap() == serde_json::to_string(&b).unwrap();

    let point = impulse_responses(&truth, 4, Some("w")).unwrap();
    let cells: Vec<(Shock, usize, usize)> = point
        .shocks
        .iter()
        .flat_map(|s| {
            horizons
                .iter()
                .flat_map(move |&h| (0..2).map(move |i| (s.shock.clone(), h, i)))
                .filter(|(_, h, i)| s.at(*h, *i) != 0.0)
        })
        .collect();
    let trials = 500u64;
    let hits: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let panel = simulated_panel(&truth, 250, 100_000 + trial, 100);
            let est = estimate_svar(&spec, &panel).unwrap();
            let bands = bootstrap_irf(&est, &panel, 4, Some("w"), &settings(trial * 1000)).unwrap();
            cells
                .iter()
                .map(|(shock, h, i)| {
                    let t = bands.get(shock).unwrap();
                    let v = point.get(shock).unwrap().at(*h, *i);
                    t.lower[(*h, *i)] <= v && v <= t.upper[(*h, *i)]
                })
                .collect()
        })
        .collect();
    let elapsed = t0.elapsed();
    let coverage: Vec<f64> = (0..cells.len())
        .map(|c| hits.iter().filter(|r| r[c]).count() as f64 / trials as f64)
        .collect();
    let (worst, lo) = coverage
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (c, v)| if v < acc.1 { (c, v) } else { acc });
    let (ws, wh, wi) = &cells[worst];
    let hi = coverage.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = coverage.iter().sum::<f64>() / coverage.len() as f64;
    report(
        9,
        "bootstrap determinism and band coverage",
        identical && lo >= 0.80 && hi <= 0.97 && elapsed < Duration::from_secs(600),
        &format!(
            "same seed identical: {identical}; nominal 90% coverage over {} cells at h in {{0,1,4}}: \
             min {lo:.3} ({ws:?}, h {wh}, var {wi}), mean {mean:.3}, max {hi:.3} ({trials} trials, R = 200); {}",
            cells.len(),
            secs(elapsed)
        ),
    )
}

/// Multi-country factor model: country `i` has output growth and one
/// observed driver, both loading on two common factors; the target
/// country's intensity variable is correlated with the first factor.
struct FactorDraw {
    dy: Vec<f64>,
    s: Vec<f64>,
    f: [Vec<f64>; 2],
    members_dy: Vec<Vec<f64>>,
    members_x: Vec<Vec<f64>>,
    gdp: Vec<f64>,
}

const PSI: (f64, f64) = (-0.5, 0.3);

fn factor_draw(seed: u64, n: usize, t: usize) -> FactorDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let burn = 50;
    let len = t + burn;
    let mut f = [vec![0.0; len], vec![0.0; len]];
    for j in 0..2 {
        for s in 1..len {
            f[j][s] = 0.5 * f[j][s - 1] + normal(&mut rng);
        }
    }
    let mut members_dy = Vec::with_capacity(n);
    let mut members_x = Vec::with_capacity(n);
    let mut gdp = Vec::with_capacity(n);
    for _ in 0..n {
        let gx = [uniform(&mut rng, 0.5, 1.5), uniform(&mut rng, -1.0, 0.2)];
        let gy = [uniform(&mut rng, -0.5, 0.5), uniform(&mut rng, 0.5, 1.5)];
        let beta = uniform(&mut rng, 0.0, 0.5);
        let (ax, ay) = (0.1 * normal(&mut rng), 0.1 * normal(&mut rng));
        let x: Vec<f64> = (0..len).map(|s| ax + gx[0] * f[0][s] + gx[1] * f[1][s] + normal(&mut rng)).collect();
        let y: Vec<f64> = (0..len)
            .map(|s| ay + beta * x[s] + gy[0] * f[0][s] + gy[1] * f[1][s] + normal(&mut rng))
            .collect();
        members_x.push(x[burn..].to_vec());
        members_dy.push(y[burn..].to_vec());
        gdp.push(uniform(&mut rng, 0.5, 1.5));
    }
    let mut s = vec![0.0; len];
    let mut dy = vec![0.0; len];
    for k in 1..len {
        s[k] = 0.3 + 0.5 * s[k - 1] + 0.5 * f[0][k] + 0.5 * normal(&mut rng);
        dy[k] = 0.1 + 0.3 * dy[k - 1] + PSI.0 * s[k] + PSI.1 * s[k - 1] + f[0][k] + f[1][k] + 0.2 * normal(&mut rng);
    }
    FactorDraw {
        dy: dy[burn..].to_vec(),
        s: s[burn..].to_vec(),
        f: [f[0][burn..].to_vec(), f[1][burn..].to_vec()],
        members_dy,
        members_x,
        gdp,
    }
}

/// `(psi0, psi1)` from the regression of `dy` on its lag, `s`, `s(-1)`
/// and `extra` proxies.
fn psi_hat(d: &FactorDraw, start: PeriodLabel, proxies: &[(&str, &CalendarSeries)]) -> (f64, f64) {
    let t = d.dy.len();
    let base = Design::new()
        .with("dy(-1)", d.dy[..t - 1].to_vec())
        .with("s", d.s[1..].to_vec())
        .with("s(-1)", d.s[..t - 1].to_vec());
    let design = augment_regressors(&base, start.offset(1), proxies).unwrap();
    let fit = ols(&d.dy[1..], &design, true).unwrap();
    (fit.coefficient("s").unwrap(), fit.coefficient("s(-1)").unwrap())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn identification_harness() -> bool {
    let sizes = [5usize, 10, 25, 50];
    let t = 1000;
    let start = q0();
    let per_rep: Vec<Vec<(f64, f64, f64)>> = (0..200u64)
        .into_par_iter()
        .map(|r| {
            let d = factor_draw(110_000 + r, 50, t);
            let f1 = quarters_from(start, d.f[0].clone());
            let f2 = quarters_from(start, d.f[1].clone());
            let infeasible = psi_hat(&d, start, &[("f1", &f1), ("f2", &f2)]);
            sizes
                .iter()
                .map(|&n| {
                    let name = |i: usize| format!("c{i:02}");
                    let gdp: Vec<(String, CalendarSeries)> = (0..n)
                        .map(|i| {
                            let y = PeriodLabel::annual(2014);
                            (name(i), CalendarSeries::gregorian(y, vec![d.gdp[i]; 3]).unwrap())
                        })
                        .collect();
                    let w = gdp_ppp_weights(&gdp, (PeriodLabel::annual(2014), PeriodLabel::annual(2016))).unwrap();
                    let panel = |src: &[Vec<f64>]| -> Vec<(String, CalendarSeries)> {
                        (0..n).map(|i| (name(i), quarters_from(start, src[i].clone()))).collect()
                    };
                    let dyw = weighted_average(&panel(&d.members_dy), &w).unwrap();
                    let xw = weighted_average(&panel(&d.members_x), &w).unwrap();
                    let (p0, p1) = psi_hat(&d, start, &[("dyw", &dyw), ("xw", &xw)]);
                    let gap = (p0 - infeasible.0).abs().max((p1 - infeasible.1).abs());
                    ((p0 - PSI.0).abs(), (p1 - PSI.1).abs(), gap)
                })
                .collect()
        })
        .collect();
    let col = |n: usize, f: fn(&(f64, f64, f64)) -> f64| median(per_rep.iter().map(|r| f(&r[n])).collect());
    let b0: Vec<f64> = (0..sizes.len()).map(|n| col(n, |x| x.0)).collect();
    let b1: Vec<f64> = (0..sizes.len()).map(|n| col(n, |x| x.1)).collect();
    let gap: Vec<f64> = (0..sizes.len()).map(|n| col(n, |x| x.2)).collect();
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    report(
        10,
        "cross-section proxies remove factor bias as n grows",
        decreasing(&b0) && decreasing(&b1) && decreasing(&gap),
        &format!(
            "n = 5, 10, 25, 50: median |psi0 error| [{}], median |psi1 error| [{}], median gap to infeasible [{}]",
            fmt(&b0),
            fmt(&b1),
            fmt(&gap)
        ),
    )
}

fn main() {
    let criteria: [(usize, fn() -> bool); 10] = [
        (1, fevd_normalization),
        (2, irf_oracle),
        (3, direct_vs_stacked),
        (4, estimation_consistency),
        (5, grid_search),
        (6, published_value_arithmetic),
        (7, bg_oracle_and_size),
        (8, calendar_conversions),
        (9, bootstrap_bands),
        (10, identification_harness),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        if !run() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
