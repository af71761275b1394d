//! Subcommands, registered by name and dispatched at runtime.

use tricycle::cycle::{reversible_cop, zeroth_heat_sum_curve, AmplitudeScan, CycleCoefficients};
use tricycle::heat_model::MasterEquation;
use tricycle::numerics::linspace;
use tricycle::optimize::{
    alpha_sweep, envelope_curve, free_time_sweep, objectives, profile_gap, time_allocation_profile, AllocationProfile,
    SkippedPoint, SweepRecord, TauCurve,
};
use tricycle::thermo::ts_trajectory;
use tricycle::{heat_models, HeatModel, Named, PerReservoir, Registry, Reservoir, TricycleConfig};

use crate::config::RunConfig;
use crate::report::{Cell, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input: exit code 2.
    Config,
    /// A solver gave up: exit code 3.
    Solver,
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct RunError {
    pub kind: ErrorKind,
    pub message: String,
    /// Whatever was computed before the failure, for the diagnostic file.
    pub partial: Option<Box<Report>>,
}

impl From<tricycle::Error> for RunError {
    fn from(e: tricycle::Error) -> Self {
        use tricycle::Error as E;
        let kind = match e {
            E::InvalidParameter { .. } | E::Domain { .. } | E::UnknownStrategy { .. } => ErrorKind::Config,
            _ => ErrorKind::Solver,
        };
        RunError {
            kind,
            message: e.to_string(),
            partial: None,
        }
    }
}

fn solver_error(message: impl Into<String>, partial: Option<Report>) -> RunError {
    RunError {
        kind: ErrorKind::Solver,
        message: message.into(),
        partial: partial.map(Box::new),
    }
}

pub trait Command: Named + Send + Sync {
    fn about(&self) -> &'static str;

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError>;
}

fn record_failures(report: &mut Report, context: &str, skipped: &[SkippedPoint]) {
    for s in skipped {
        report.fail(context, s.at, s.reason.clone());
    }
}

fn sweep_row(r: &SweepRecord) -> Vec<Cell> {
    vec![
        r.alpha.into(),
        r.psi.into(),
        r.cooling_rate.into(),
        r.chi.into(),
        r.tau_c.into(),
        r.tau_h.into(),
        r.tau_p.into(),
    ]
}

const SWEEP_COLUMNS: [&str; 7] = ["alpha", "psi", "R", "chi", "tau_c", "tau_h", "tau_p"];

/// Branch durations from the config; an unset `tau_h` balances the heats.
fn cycle_taus(run: &RunConfig, model: &TricycleConfig) -> Result<(PerReservoir<f64>, &'static str), RunError> {
    if let Some(tau_h) = run.tau_h {
        return Ok((PerReservoir::new(run.tau_c, tau_h, run.tau_p), "given"));
    }
    let coeffs = CycleCoefficients::new(model, &run.quadrature())?;
    let tau_h = coeffs.balanced_tau_h(run.tau_c, run.tau_p).ok_or_else(|| {
        solver_error(
            format!(
                "no positive tau_h balances the heats at tau_c = {}, tau_p = {}; set tau_h explicitly",
                run.tau_c, run.tau_p
            ),
            None,
        )
    })?;
    Ok((PerReservoir::new(run.tau_c, tau_h, run.tau_p), "balanced"))
}

fn heat_model(run: &RunConfig) -> Result<Box<dyn HeatModel>, RunError> {
    let name = heat_models().get(&run.heat_model)?.name();
    Ok(match name {
        "master-equation" => Box::new(MasterEquation { steps: run.oracle_steps }),
        _ => Box::new(tricycle::heat_model::SlowDriving {
            quadrature: run.quadrature(),
        }),
    })
}

pub struct Branch;

impl Named for Branch {
    fn name(&self) -> &'static str {
        "branch"
    }
}

impl Command for Branch {
    fn about(&self) -> &'static str {
        "per-branch entropy change, dissipation coefficient and heats"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let (taus, source) = cycle_taus(run, model)?;
        let hm = heat_model(run)?;
        let mut rep = Report::new(vec![
            "reservoir", "T", "tau", "omega_start", "omega_end", "dS_eq", "Sigma", "Q0", "Q1", "Q",
        ]);
        for r in Reservoir::CYCLE {
            let b = model.branch(r);
            let t = hm.branch_heat(&b, taus[r])?;
            rep.push(vec![
                r.label().into(),
                t.temperature.into(),
                t.tau.into(),
                b.frequency(0.0)?.into(),
                b.frequency(1.0)?.into(),
                t.d_s_eq.into(),
                t.sigma.into(),
                t.q0.into(),
                t.q1.into(),
                t.q.into(),
            ]);
        }
        rep.note("heat_model", hm.name());
        rep.note("tau_h_source", source);
        Ok(rep)
    }
}

pub struct Cycle;

impl Named for Cycle {
    fn name(&self) -> &'static str {
        "cycle"
    }
}

impl Command for Cycle {
    fn about(&self) -> &'static str {
        "COP, cooling rate, figure of merit and work residual of one cycle"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let (taus, source) = cycle_taus(run, model)?;
        let hm = heat_model(run)?;
        let m = tricycle::evaluate_cycle_with(model, &taus, hm.as_ref())?;
        let p = model.params();
        let mut rep = Report::new(vec![
            "tau_c",
            "tau_h",
            "tau_p",
            "Q_c",
            "Q_h",
            "Q_p",
            "psi",
            "R",
            "chi",
            "work_residual",
            "entropy_production",
            "psi_r",
        ]);
        rep.push(vec![
            taus.c.into(),
            taus.h.into(),
            taus.p.into(),
            m.branches.c.q.into(),
            m.branches.h.q.into(),
            m.branches.p.q.into(),
            m.psi.into(),
            m.cooling_rate.into(),
            m.chi.into(),
            m.work_residual.into(),
            m.entropy_production.into(),
            reversible_cop(p.t_c, p.t_h, p.t_p)?.into(),
        ]);
        rep.note("heat_model", hm.name());
        rep.note("tau_h_source", source);
        Ok(rep)
    }
}

pub struct TsDiagram;

impl Named for TsDiagram {
    fn name(&self) -> &'static str {
        "ts-diagram"
    }
}

impl Command for TsDiagram {
    fn about(&self) -> &'static str {
        "effective temperature and entropy along the cycle"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let (taus, source) = cycle_taus(run, model)?;
        let pts = ts_trajectory(model, &taus, run.ts_samples)?;
        let mut rep = Report::new(vec!["segment", "s", "omega", "T_eff", "S"]);
        for p in pts {
            rep.push(vec![p.segment.label().into(), p.s.into(), p.omega.into(), p.t_eff.into(), p.entropy.into()]);
        }
        rep.note("tau_h_source", source);
        Ok(rep)
    }
}

pub struct SweepTimes;

impl Named for SweepTimes {
    fn name(&self) -> &'static str {
        "sweep-times"
    }
}

impl Command for SweepTimes {
    fn about(&self) -> &'static str {
        "cooling rate over a (tau_c, tau_p) grid with tau_h fixed by the heat balance"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let coeffs = CycleCoefficients::new(model, &run.quadrature())?;
        let (gc, gp) = run.sweep_grids();
        let sweep = free_time_sweep(&coeffs, &gc, &gp)?;
        let mut rep = Report::new(vec!["tau_c", "tau_p", "tau_h", "R", "psi", "work_residual"]);
        for (i, row) in sweep.values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                rep.push(vec![
                    gc[i].into(),
                    gp[j].into(),
                    v.map(|p| p.tau_h).into(),
                    v.map(|p| p.cooling_rate).into(),
                    v.map(|p| p.psi).into(),
                    v.map(|p| p.work_residual).into(),
                ]);
            }
        }
        rep.note("present", sweep.present() as f64);
        rep.note("total", (gc.len() * gp.len()) as f64);
        if let Some((i, j)) = sweep.argmax() {
            let p = sweep.values[i][j].expect("argmax is present");
            rep.note("argmax_tau_c", gc[i]);
            rep.note("argmax_tau_p", gp[j]);
            rep.note("argmax_tau_h", p.tau_h);
            rep.note("R_max", p.cooling_rate);
        }
        rep.note("interior_maximum", sweep.has_interior_maximum().to_string());
        Ok(rep)
    }
}

pub struct OptimalCurveCmd;

impl Named for OptimalCurveCmd {
    fn name(&self) -> &'static str {
        "optimal-curve"
    }
}

impl Command for OptimalCurveCmd {
    fn about(&self) -> &'static str {
        "optimal cooling rate versus COP at fixed alpha, with its maxima"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let curve = TauCurve::build(model, &run.curve_options())?;
        let mut rep = Report::new(SWEEP_COLUMNS.to_vec());
        for r in curve.records() {
            rep.push(sweep_row(&r));
        }
        record_failures(&mut rep, "tau_c", &curve.skipped);
        for obj in objectives().iter() {
            let o = curve.maximize(obj);
            let sym = obj.symbol();
            rep.note(format!("psi_alpha_{sym}"), o.psi);
            rep.note(format!("{sym}_alpha_max"), o.value);
            rep.note(format!("tau_c_at_{sym}_max"), o.allocation.tau_c);
        }
        rep.note("skipped", curve.skipped.len() as f64);
        Ok(rep)
    }
}

pub struct AlphaSweepCmd;

impl Named for AlphaSweepCmd {
    fn name(&self) -> &'static str {
        "alpha-sweep"
    }
}

impl Command for AlphaSweepCmd {
    fn about(&self) -> &'static str {
        "maximum cooling rate and figure of merit as functions of alpha"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let sw = alpha_sweep(model, &run.alpha_grid(), &run.curve_options())?;
        let mut rep = Report::new(vec!["alpha", "psi_at_R_max", "R_max", "psi_at_chi_max", "chi_max"]);
        for p in &sw.points {
            rep.push(vec![
                p.alpha.into(),
                p.psi_at_r_max.into(),
                p.r_max.into(),
                p.psi_at_chi_max.into(),
                p.chi_max.into(),
            ]);
        }
        record_failures(&mut rep, "alpha", &sw.failed);
        rep.note("failed", sw.failed.len() as f64);
        rep.note("chi_peak", sw.chi_peak);
        rep.note("R_peak", sw.r_peak);
        rep.note("alpha_chi", sw.alpha_chi);
        rep.note("alpha_R", sw.alpha_r);
        Ok(rep)
    }
}

fn psi_grid(run: &RunConfig, n: usize) -> Option<Vec<f64>> {
    match (run.psi_min, run.psi_max) {
        (Some(lo), Some(hi)) => Some(linspace(lo, hi, n)),
        _ => None,
    }
}

pub struct EnvelopeCmd;

impl Named for EnvelopeCmd {
    fn name(&self) -> &'static str {
        "envelope"
    }
}

impl Command for EnvelopeCmd {
    fn about(&self) -> &'static str {
        "upper envelope over alpha of the optimal curves and the optimal COP range"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let grid = psi_grid(run, run.envelope_psi_points);
        let env = envelope_curve(model, grid.as_deref(), &run.envelope_options())?;
        let mut rep = Report::new(SWEEP_COLUMNS.to_vec());
        for r in &env.rows {
            rep.push(sweep_row(r));
        }
        rep.note("R_at_psi_R", env.psi_r.cooling_rate);
        rep.note("alpha_at_psi_R", env.psi_r.alpha);
        rep.note("chi_at_psi_chi", env.psi_chi.chi);
        rep.note("alpha_at_psi_chi", env.psi_chi.alpha);
        rep.note("psi_R", env.psi_r.psi);
        rep.note("psi_chi", env.psi_chi.psi);
        Ok(rep)
    }
}

pub struct TimeAllocation;

impl Named for TimeAllocation {
    fn name(&self) -> &'static str {
        "time-allocation"
    }
}

fn profile_rows(rep: &mut Report, prof: &AllocationProfile) {
    for r in &prof.rows {
        rep.push(vec![
            r.alpha.into(),
            r.psi.into(),
            r.tau_total.into(),
            r.tau_h_over_tau_p.into(),
            r.tau_c_over_tau_p.into(),
            r.tau_c.into(),
            r.tau_h.into(),
            r.tau_p.into(),
            r.cooling_rate.into(),
            r.chi.into(),
        ]);
    }
}

impl Command for TimeAllocation {
    fn about(&self) -> &'static str {
        "total time and time ratios across the optimal COP range at alpha_chi and alpha_R"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let opts = run.curve_options();
        let sw = alpha_sweep(model, &run.alpha_grid(), &opts)?;
        let (lo, hi) = match (run.psi_min, run.psi_max) {
            (Some(lo), Some(hi)) => (lo, hi),
            _ => {
                let env = envelope_curve(model, None, &run.envelope_options())?;
                (env.psi_r.psi, env.psi_chi.psi)
            }
        };
        let grid = linspace(lo, hi, run.profile_points);
        let mut rep = Report::new(vec![
            "alpha",
            "psi",
            "tau_total",
            "tau_h_over_tau_p",
            "tau_c_over_tau_p",
            "tau_c",
            "tau_h",
            "tau_p",
            "R",
            "chi",
        ]);
        let mut profiles = Vec::new();
        for (label, alpha) in [("alpha_chi", sw.alpha_chi), ("alpha_R", sw.alpha_r)] {
            let prof = time_allocation_profile(&model.with_alpha(alpha)?, &grid, &opts).map_err(|e| {
                let mut partial = rep.clone();
                partial.fail(label, alpha, e.to_string());
                solver_error(format!("profile at {label} = {alpha}: {e}"), Some(partial))
            })?;
            profile_rows(&mut rep, &prof);
            profiles.push((label, prof));
        }
        rep.note("alpha_chi", sw.alpha_chi);
        rep.note("alpha_R", sw.alpha_r);
        rep.note("psi_R", lo);
        rep.note("psi_chi", hi);
        for (label, prof) in &profiles {
            rep.note(format!("tau_total_increasing_{label}"), prof.tau_total_increasing.to_string());
            rep.note(format!("tau_h_ratio_decreasing_{label}"), prof.tau_h_ratio_decreasing.to_string());
            rep.note(format!("tau_c_ratio_decreasing_{label}"), prof.tau_c_ratio_decreasing.to_string());
        }
        rep.note("max_relative_gap", profile_gap(&profiles[0].1, &profiles[1].1));
        Ok(rep)
    }
}

pub struct ReversibleDelta;

impl Named for ReversibleDelta {
    fn name(&self) -> &'static str {
        "reversible-delta"
    }
}

impl Command for ReversibleDelta {
    fn about(&self) -> &'static str {
        "zeroth-order heat sum versus delta_c and the reversible amplitude"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let params = *model.params();
        let curve = zeroth_heat_sum_curve(&params, &run.delta_grid())?;
        let mut rep = Report::new(vec!["delta_c", "sum_Q0"]);
        for &(d, q) in &curve {
            rep.push(vec![d.into(), q.into()]);
        }
        let scan = AmplitudeScan {
            lo: run.delta_min,
            hi: run.delta_max,
            points: run.delta_points,
        };
        match tricycle::cycle::reversible_amplitude_with(&params, scan) {
            Ok(d) => {
                rep.note("delta_c_r", d);
                Ok(rep)
            }
            Err(e) => {
                let mut partial = rep;
                partial.fail("delta_c", scan.lo, e.to_string());
                Err(solver_error(e.to_string(), Some(partial)))
            }
        }
    }
}

pub struct OracleCheck;

impl Named for OracleCheck {
    fn name(&self) -> &'static str {
        "oracle-check"
    }
}

impl Command for OracleCheck {
    fn about(&self) -> &'static str {
        "master-equation heats against the slow-driving expansion"
    }

    fn run(&self, run: &RunConfig, model: &TricycleConfig) -> Result<Report, RunError> {
        let slow = tricycle::heat_model::SlowDriving {
            quadrature: run.quadrature(),
        };
        let exact = MasterEquation { steps: run.oracle_steps };
        let mut rep = Report::new(vec!["reservoir", "tau", "Q_oracle", "Q0", "Q1", "Q_slow", "error", "error_ratio"]);
        for r in Reservoir::CYCLE {
            let b = model.branch(r);
            let mut prev: Option<f64> = None;
            for &tau in &run.oracle_taus {
                let s = slow.branch_heat(&b, tau)?;
                let q = exact.branch_heat(&b, tau)?.q;
                let e = (q - s.q0 - s.q1).abs();
                rep.push(vec![
                    r.label().into(),
                    tau.into(),
                    q.into(),
                    s.q0.into(),
                    s.q1.into(),
                    s.q.into(),
                    e.into(),
                    prev.map(|p| e / p).into(),
                ]);
                prev = Some(e);
            }
        }
        Ok(rep)
    }
}

pub fn commands() -> Registry<dyn Command> {
    let mut reg: Registry<dyn Command> = Registry::new("subcommand");
    reg.register(Box::new(Branch))
        .register(Box::new(Cycle))
        .register(Box::new(TsDiagram))
        .register(Box::new(SweepTimes))
        .register(Box::new(OptimalCurveCmd))
        .register(Box::new(AlphaSweepCmd))
        .register(Box::new(EnvelopeCmd))
        .register(Box::new(TimeAllocation))
        .register(Box::new(ReversibleDelta))
        .register(Box::new(OracleCheck));
    reg
}
