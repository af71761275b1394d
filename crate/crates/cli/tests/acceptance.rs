//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances and budgets are fixed here and never relaxed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricycle::cycle::{reversible_amplitude, reversible_cop, CycleCoefficients};
use tricycle::heat_model::{MasterEquation, SlowDriving};
use tricycle::lindblad::{drazin_inverse, gibbs_state, liouvillian};
use tricycle::numerics::{linspace, CompositeGaussLegendre};
use tricycle::optimize::{
    alpha_sweep, envelope_curve, free_time_sweep, max_cooling_rate, max_figure_of_merit, profile_gap,
    time_allocation_profile, AlphaSweep, Envelope,
};
use tricycle::protocol::{Bath, BranchProtocol, Phase};
use tricycle::thermo::{branch_entropy_change, equilibrium_derivative, sigma_coefficient};
use tricycle::{HeatModel, PerReservoir, Reservoir, TricycleConfig, TricycleParams};
use tricycle_cli::commands::commands;
use tricycle_cli::config::RunConfig;
use tricycle_cli::report::{Cell, Report};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Runner {
    failed: usize,
}

impl Runner {
    fn check(&mut self, id: &str, title: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let mut o = f();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > b {
                o.pass = false;
                o.detail.push_str(&format!("; over budget {:.0} s", b.as_secs_f64()));
            }
        }
        if !o.pass {
            self.failed += 1;
        }
        println!(
            "{} [{id}] {title}: {} ({:.2} s)",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn summary_num(report: &Report, key: &str) -> Option<f64> {
    report.summary.iter().find_map(|(k, v)| match v {
        Cell::Num(x) if k == key => Some(*x),
        _ => None,
    })
}

fn run_command(name: &str) -> Result<Report, String> {
    let cfg = RunConfig::default();
    let model = cfg.validate().map_err(|e| e.to_string())?;
    let registry = commands();
    let cmd = registry.get(name).map_err(|e| e.to_string())?;
    cmd.run(&cfg, &model).map_err(|e| e.message)
}

fn defaults() -> TricycleConfig {
    TricycleConfig::new(TricycleParams::default()).expect("defaults are valid")
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

fn random_bath(rng: &mut ChaCha8Rng) -> Bath {
    Bath {
        temperature: rng.gen_range(0.05..2.0),
        gamma0: rng.gen_range(0.2..5.0),
        alpha: rng.gen_range(-0.5..1.5),
    }
}

fn random_params(rng: &mut ChaCha8Rng) -> TricycleParams {
    let t_c = rng.gen_range(0.05..0.5);
    let t_h = rng.gen_range(0.6..2.0);
    let t_p = rng.gen_range(t_c + 0.02 * (t_h - t_c)..t_h - 0.02 * (t_h - t_c));
    TricycleParams {
        t_c,
        t_h,
        t_p,
        zeta_c: rng.gen_range(1.05..4.0),
        zeta_h: rng.gen_range(1.05..4.0),
        delta_c: rng.gen_range(0.05..1.5),
        gamma0: rng.gen_range(0.2..5.0),
        alpha: rng.gen_range(-0.5..1.5),
    }
}

fn criterion_1() -> Outcome {
    match run_command("reversible-delta") {
        Ok(rep) => match summary_num(&rep, "delta_c_r") {
            Some(d) => outcome(within(d, 0.3492, 0.001), format!("delta_c_r = {d:.6} (target 0.3492 +- 0.001)")),
            None => outcome(false, "no delta_c_r line"),
        },
        Err(e) => outcome(false, e),
    }
}

fn criterion_2() -> Outcome {
    let psi_r = match reversible_cop(0.2, 1.0, 0.5) {
        Ok(v) => v,
        Err(e) => return outcome(false, e.to_string()),
    };
    let exact = psi_r == 1.0 / 3.0;
    let p = TricycleParams::default();
    let psi = reversible_amplitude(&p)
        .and_then(|d| TricycleConfig::new(TricycleParams { delta_c: d, ..p }))
        .and_then(|cfg| tricycle::evaluate_cycle(&cfg, &PerReservoir::new(1e9, 1e9, 1e9)))
        .map(|m| m.psi);
    match psi {
        Ok(psi) => {
            let gap = (psi - 1.0 / 3.0).abs();
            outcome(
                exact && gap < 1e-4,
                format!("psi_r = {psi_r:?} (exact 1/3: {exact}); quasi-static psi = {psi:.8}, gap {gap:.2e} (< 1e-4)"),
            )
        }
        Err(e) => outcome(false, e.to_string()),
    }
}

/// Fixed-α optimum locations at α = 0.
fn criterion_3(part: char) -> Outcome {
    let cfg = defaults();
    let opts = RunConfig::default().curve_options();
    let (name, target, found) = match part {
        'a' => ("psi_alpha_R", 0.13, max_cooling_rate(&cfg, &opts)),
        _ => ("psi_alpha_chi", 0.20, max_figure_of_merit(&cfg, &opts)),
    };
    match found {
        Ok(o) => outcome(
            within(o.psi, target, 0.02),
            format!("{name} = {:.5} at tau_c = {:.4} (target {target} +- 0.02)", o.psi, o.allocation.tau_c),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_4(sweep: &Result<AlphaSweep, String>) -> Outcome {
    match sweep {
        Ok(s) => outcome(
            within(s.alpha_chi, 0.057, 0.02) && within(s.alpha_r, 0.448, 0.02),
            format!(
                "alpha_chi = {:.4} (target 0.057 +- 0.02), alpha_R = {:.4} (target 0.448 +- 0.02), {} failed alphas",
                s.alpha_chi,
                s.alpha_r,
                s.failed.len()
            ),
        ),
        Err(e) => outcome(false, e.clone()),
    }
}

fn criterion_5(sweep: &Result<AlphaSweep, String>, env: &Result<Envelope, String>) -> Outcome {
    let cfg = defaults();
    let opts = RunConfig::default().curve_options();
    let (r, chi) = match (max_cooling_rate(&cfg, &opts), max_figure_of_merit(&cfg, &opts)) {
        (Ok(r), Ok(c)) => (r, c),
        (Err(e), _) | (_, Err(e)) => return outcome(false, e.to_string()),
    };
    let (s, e) = match (sweep, env) {
        (Ok(s), Ok(e)) => (s, e),
        (Err(m), _) | (_, Err(m)) => return outcome(false, m.clone()),
    };
    let a = r.psi < chi.psi;
    let b = s.alpha_chi < s.alpha_r;
    let c = e.psi_r.psi < e.psi_chi.psi;
    outcome(
        a && b && c,
        format!(
            "psi_alpha_R {:.5} < psi_alpha_chi {:.5}: {a}; alpha_chi {:.4} < alpha_R {:.4}: {b}; psi_R {:.5} < psi_chi {:.5}: {c}",
            r.psi, chi.psi, s.alpha_chi, s.alpha_r, e.psi_r.psi, e.psi_chi.psi
        ),
    )
}

fn criterion_6() -> Outcome {
    let branch = defaults().branch(Reservoir::Cold);
    let slow = SlowDriving::default();
    let exact = MasterEquation { steps: None };
    let mut errs = Vec::new();
    for tau in [100.0, 200.0, 400.0] {
        let (s, q) = match (slow.branch_heat(&branch, tau), exact.branch_heat(&branch, tau)) {
            (Ok(s), Ok(q)) => (s, q.q),
            (Err(e), _) | (_, Err(e)) => return outcome(false, e.to_string()),
        };
        errs.push((q - s.q0 - s.q1).abs());
    }
    let (r1, r2) = (errs[1] / errs[0], errs[2] / errs[1]);
    let ok = |r: f64| (0.2..=0.35).contains(&r);
    outcome(
        ok(r1) && ok(r2),
        format!("E(200)/E(100) = {r1:.4}, E(400)/E(200) = {r2:.4} (each in [0.2, 0.35])"),
    )
}

/// Worst-case residuals over the randomized draws.
#[derive(Default)]
struct PropertyWorst {
    sigma_max: f64,
    entropy_closure: f64,
    drazin: f64,
    trace: f64,
    hermiticity: f64,
    psi_excess: f64,
    entropy_production_min: f64,
    balanced: usize,
}

fn criterion_7() -> Outcome {
    const DRAWS: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    let quad = CompositeGaussLegendre::default();
    let mut w = PropertyWorst {
        sigma_max: f64::NEG_INFINITY,
        psi_excess: f64::NEG_INFINITY,
        entropy_production_min: f64::INFINITY,
        ..PropertyWorst::default()
    };
    for _ in 0..DRAWS {
        let p = random_params(&mut rng);
        let cfg = match TricycleConfig::new(p) {
            Ok(c) => c,
            Err(e) => return outcome(false, format!("draw rejected: {e}")),
        };
        let mut closure = 0.0;
        for r in Reservoir::CYCLE {
            let b = cfg.branch(r);
            match (sigma_coefficient(&b, &quad), branch_entropy_change(&b)) {
                (Ok(sig), Ok(ds)) => {
                    w.sigma_max = w.sigma_max.max(sig);
                    closure += ds;
                }
                (Err(e), _) | (_, Err(e)) => return outcome(false, e.to_string()),
            }
            let s = rng.gen_range(0.0..=1.0);
            let lag = b
                .frequency(s)
                .and_then(|om| drazin_inverse(&b.bath, om))
                .and_then(|d| Ok(d.apply(&equilibrium_derivative(&b, s)?)));
            match lag {
                Ok(v) => {
                    let scale = v.norm_max().max(1e-300);
                    w.trace = w.trace.max(v.trace().norm() / scale);
                    w.hermiticity = w.hermiticity.max((v.rho01 - v.rho10.conj()).norm() / scale);
                }
                Err(e) => return outcome(false, e.to_string()),
            }
        }
        w.entropy_closure = w.entropy_closure.max(closure.abs());

        let bath = random_bath(&mut rng);
        let omega = rng.gen_range(0.05..4.0);
        let (l, d) = match (liouvillian(&bath, omega), drazin_inverse(&bath, omega)) {
            (Ok(l), Ok(d)) => (l, d),
            (Err(e), _) | (_, Err(e)) => return outcome(false, e.to_string()),
        };
        let (nl, nd) = (l.max_norm(), d.max_norm());
        let g = gibbs_state(bath.temperature, omega).expect("valid bath");
        let residuals = [
            (l.compose(&d).compose(&l) - l).max_norm() / nl,
            (d.compose(&l).compose(&d) - d).max_norm() / nd,
            (l.compose(&d) - d.compose(&l)).max_norm(),
            l.apply(&g).norm_max() / nl,
            d.apply(&g).norm_max() / nd,
        ];
        w.drazin = residuals.iter().fold(w.drazin, |a, &b| a.max(b));
        for z in l.trace_column_sums().iter().chain(d.trace_column_sums().iter()) {
            w.trace = w.trace.max(z.norm() / nl.max(nd));
        }

        let coeffs = match CycleCoefficients::new(&cfg, &quad) {
            Ok(c) => c,
            Err(e) => return outcome(false, e.to_string()),
        };
        let (tau_c, tau_p) = (10f64.powf(rng.gen_range(0.0..3.0)), 10f64.powf(rng.gen_range(0.0..3.0)));
        if let Some(tau_h) = coeffs.balanced_tau_h(tau_c, tau_p) {
            if let Ok(m) = coeffs.metrics(&PerReservoir::new(tau_c, tau_h, tau_p)) {
                let psi_r = reversible_cop(p.t_c, p.t_h, p.t_p).expect("ordered temperatures");
                w.psi_excess = w.psi_excess.max(m.psi - psi_r);
                w.entropy_production_min = w.entropy_production_min.min(m.entropy_production);
                w.balanced += 1;
            }
        }
    }
    let pass = w.sigma_max <= 0.0
        && w.entropy_closure < 1e-10
        && w.drazin < 1e-10
        && w.trace < 1e-10
        && w.hermiticity < 1e-10
        && w.psi_excess <= 1e-10
        && w.entropy_production_min >= -1e-10
        && w.balanced > 0;
    outcome(
        pass,
        format!(
            "{DRAWS} draws: max Sigma {:.2e}, closure {:.1e}, Drazin {:.1e}, trace {:.1e}, hermiticity {:.1e}, \
             {} balanced cycles with max psi - psi_r {:.2e}, min entropy production {:.2e}",
            w.sigma_max,
            w.entropy_closure,
            w.drazin,
            w.trace,
            w.hermiticity,
            w.balanced,
            w.psi_excess,
            w.entropy_production_min
        ),
    )
}

const FD_STEP: f64 = 1e-5;

/// Excited minus ground population of `L⁻¹ ∂_s ρ_eq`.
fn lag_polarization(branch: &BranchProtocol, s: f64) -> f64 {
    let w = branch.frequency(s).unwrap();
    let v = drazin_inverse(&branch.bath, w)
        .unwrap()
        .apply(&equilibrium_derivative(branch, s).unwrap());
    v.rho11.re - v.rho00.re
}

/// `β ∫ Tr[H d/ds{L⁻¹ ∂_s ρ_eq}] ds` with a central-difference derivative.
fn sigma_direct(branch: &BranchProtocol) -> f64 {
    let f = |s: f64| {
        let d = (lag_polarization(branch, s + FD_STEP) - lag_polarization(branch, s - FD_STEP)) / (2.0 * FD_STEP);
        0.5 * branch.frequency(s).unwrap() * d
    };
    CompositeGaussLegendre::default().fixed(&f, 0.0, 1.0, 256) / branch.temperature()
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5167);
    let quad = CompositeGaussLegendre::default().with_rel_tol(1e-12);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let reservoir = Reservoir::CYCLE[rng.gen_range(0..3)];
        let phase = if rng.gen_bool(0.5) { Phase::Decreasing } else { Phase::Increasing };
        let bath = random_bath(&mut rng);
        let b = match BranchProtocol::new(reservoir, bath, rng.gen_range(0.05..1.5), rng.gen_range(1.05..4.0), phase) {
            Ok(b) => b,
            Err(e) => return outcome(false, e.to_string()),
        };
        let closed = match sigma_coefficient(&b, &quad) {
            Ok(s) => s,
            Err(e) => return outcome(false, e.to_string()),
        };
        worst = worst.max((closed - sigma_direct(&b)).abs() / closed.abs());
    }
    outcome(worst < 1e-6, format!("20 branches, max relative gap {worst:.2e} (< 1e-6)"))
}

fn criterion_9() -> Outcome {
    let run = RunConfig::default();
    let (gc, gp) = run.sweep_grids();
    let sweep = CycleCoefficients::new(&defaults(), &run.quadrature()).and_then(|c| free_time_sweep(&c, &gc, &gp));
    match sweep {
        Ok(s) => match s.argmax() {
            Some((i, j)) => outcome(
                s.has_interior_maximum(),
                format!(
                    "max R = {:.5e} at tau_c = {:.3}, tau_p = {:.3}; interior: {}",
                    s.values[i][j].map_or(f64::NAN, |p| p.cooling_rate),
                    gc[i],
                    gp[j],
                    s.has_interior_maximum()
                ),
            ),
            None => outcome(false, "no refrigerating point on the grid"),
        },
        Err(e) => outcome(false, e.to_string()),
    }
}

fn criterion_10(sweep: &Result<AlphaSweep, String>, env: &Result<Envelope, String>) -> Outcome {
    let (s, e) = match (sweep, env) {
        (Ok(s), Ok(e)) => (s, e),
        (Err(m), _) | (_, Err(m)) => return outcome(false, m.clone()),
    };
    let run = RunConfig::default();
    let opts = run.curve_options();
    let grid = linspace(e.psi_r.psi, e.psi_chi.psi, run.profile_points);
    let base = defaults();
    let profile = |alpha: f64| {
        base.with_alpha(alpha)
            .and_then(|cfg| time_allocation_profile(&cfg, &grid, &opts))
            .map_err(|e| format!("alpha = {alpha}: {e}"))
    };
    let (pc, pr) = match (profile(s.alpha_chi), profile(s.alpha_r)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(m), _) | (_, Err(m)) => return outcome(false, m),
    };
    let gap = profile_gap(&pc, &pr);
    let flags = |p: &tricycle::optimize::AllocationProfile| {
        (p.tau_total_increasing, p.tau_h_ratio_decreasing, p.tau_c_ratio_decreasing)
    };
    let (fc, fr) = (flags(&pc), flags(&pr));
    let all = |f: (bool, bool, bool)| f.0 && f.1 && f.2;
    outcome(
        all(fc) && all(fr) && gap < 0.05,
        format!(
            "psi in [{:.5}, {:.5}]; (tau up, tau_h/tau_p down, tau_c/tau_p down) at alpha_chi {fc:?}, at alpha_R {fr:?}; \
             max relative gap {gap:.4} (< 0.05)",
            e.psi_r.psi, e.psi_chi.psi
        ),
    )
}

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored.
    let mut runner = Runner { failed: 0 };
    runner.check("1", "reversible amplitude", secs(5), criterion_1);
    runner.check("2", "reversible COP", secs(10), criterion_2);
    runner.check("3a", "psi at maximum cooling rate, alpha = 0", secs(60), || criterion_3('a'));
    runner.check("3b", "psi at maximum figure of merit, alpha = 0", secs(60), || criterion_3('b'));

    let run = RunConfig::default();
    let start = Instant::now();
    let sweep = alpha_sweep(&defaults(), &run.alpha_grid(), &run.curve_options()).map_err(|e| e.to_string());
    let sweep_time = start.elapsed();
    runner.check("4", "alpha extrema", secs(600), || {
        let mut o = criterion_4(&sweep);
        o.detail.push_str(&format!("; sweep {:.2} s", sweep_time.as_secs_f64()));
        if sweep_time > Duration::from_secs(600) {
            o.pass = false;
        }
        o
    });

    let start = Instant::now();
    let env = envelope_curve(&defaults(), None, &run.envelope_options()).map_err(|e| e.to_string());
    let env_time = start.elapsed();
    runner.check("5", "ordering of optimal COPs and exponents", None, || {
        let mut o = criterion_5(&sweep, &env);
        o.detail.push_str(&format!("; envelope {:.2} s", env_time.as_secs_f64()));
        o
    });
    runner.check("6", "slow-driving heat against master equation", secs(60), criterion_6);
    runner.check("7", "randomized property suite", secs(60), criterion_7);
    runner.check("8", "closed-form Sigma against direct quadrature", secs(30), criterion_8);
    runner.check("9", "interior maximum of R over free times", None, criterion_9);
    runner.check("10", "time allocation across the optimal COP range", secs(300), || {
        let mut o = criterion_10(&sweep, &env);
        let total = sweep_time + env_time;
        o.detail.push_str(&format!("; plus shared sweeps {:.2} s", total.as_secs_f64()));
        if total > Duration::from_secs(300) {
            o.pass = false;
        }
        o
    });

    println!("{} criteria failed", runner.failed);
    if runner.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
