use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ggkdv::gram::{ingham_report, observability_constants, ObservationWindow};
use ggkdv::hum::{
    assemble_lambda, duality_sides, solve_with, verify_roundtrip, ControlMode, ControlPlan,
};
use ggkdv::modal::{energy, evolve, forced_evolve};
use ggkdv::spectral::{
    critical_time, gap_report, modal_dim, resonance_check, Branch, ModeBranch, PhysicalParams,
    Spectrum,
};
use ggkdv::stabilization::{
    closed_loop_matrix, closed_loop_simulate, feedback_gains_on, spectral_abscissa,
};
use ggkdv::{AdjointState, ExpTerm, ExponentialSignal, ModalState};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Config, StateSpec, INGHAM_WINDOW};
use crate::error::CliError;
use crate::output::{num, write_json, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Gaps,
    Resonance,
    Observe,
    Ingham,
    Control,
    Stabilize,
    Duality,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Spectrum,
        Command::Gaps,
        Command::Resonance,
        Command::Observe,
        Command::Ingham,
        Command::Control,
        Command::Stabilize,
        Command::Duality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Gaps => "gaps",
            Command::Resonance => "resonance",
            Command::Observe => "observe",
            Command::Ingham => "ingham",
            Command::Control => "control",
            Command::Stabilize => "stabilize",
            Command::Duality => "duality",
        }
    }

    /// Whether the command depends on the physical parameters at all.
    fn uses_params(self) -> bool {
        self != Command::Ingham
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command `{s}`")))
    }
}

/// Runs one experiment into `out`, returning human-readable summary lines.
pub fn execute(cmd: Command, cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    if cmd.uses_params() {
        let params = cfg.params()?;
        if params.is_resonant() {
            eprintln!(
                "warning: resonant parameters (ad = 1): observability and control need windows longer than T0 = {:.12}",
                critical_time(&params)
            );
        }
    }
    fs::create_dir_all(out)?;
    match cmd {
        Command::Spectrum => spectrum(cfg, out),
        Command::Gaps => gaps(cfg, out),
        Command::Resonance => resonance(cfg, out),
        Command::Observe => observe(cfg, out),
        Command::Ingham => ingham(cfg, out),
        Command::Control => control(cfg, out),
        Command::Stabilize => stabilize(cfg, out),
        Command::Duality => duality(cfg, out),
    }
}

fn wrote(path: PathBuf, rows: usize) -> String {
    format!("wrote {} ({rows} rows)", path.display())
}

fn spectrum(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let spec = Spectrum::new(cfg.params()?, cfg.n());
    let mut csv = Csv::new(
        out,
        "spectrum.csv",
        &["k", "branch", "omega", "z1_re", "z1_im", "z2_re", "z2_im"],
    );
    let ni = spec.n() as i64;
    for k in -ni..=ni {
        for branch in [Branch::Plus, Branch::Minus] {
            let pair = spec.get(ModeBranch::new(k, branch));
            csv.row(&[
                k.to_string(),
                branch.symbol().to_string(),
                num(pair.omega),
                num(pair.z[0]),
                num(0.0),
                num(pair.z[1]),
                num(0.0),
            ]);
        }
    }
    Ok(vec![wrote(csv.finish()?, spec.dim())])
}

#[derive(Serialize)]
struct GapSummary {
    #[serde(rename = "N")]
    n: usize,
    a_const: f64,
    b_or_slope: f64,
    /// `null` when the density estimate vanishes.
    gamma_inf_estimate: Option<f64>,
    d_plus_estimate: f64,
    t0: f64,
}

fn gaps(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let report = gap_report(&cfg.params()?, cfg.n())?;
    let mut csv = Csv::new(out, "gaps.csv", &["k", "plus_gap", "minus_gap"]);
    let ni = report.n as i64;
    for (j, (p, m)) in report.plus_gaps.iter().zip(&report.minus_gaps).enumerate() {
        csv.row(&[(j as i64 - ni).to_string(), num(*p), num(*m)]);
    }
    let rows = report.plus_gaps.len();
    let summary = GapSummary {
        n: report.n,
        a_const: report.a_const,
        b_or_slope: report.b_or_slope,
        gamma_inf_estimate: report
            .gamma_inf_estimate
            .is_finite()
            .then_some(report.gamma_inf_estimate),
        d_plus_estimate: report.d_plus_estimate,
        t0: report.t0,
    };
    Ok(vec![
        wrote(csv.finish()?, rows),
        format!(
            "wrote {}",
            write_json(out, "gaps_summary.json", &summary)?.display()
        ),
    ])
}

fn resonance(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let params = cfg.params()?;
    let report = resonance_check(&params, cfg.n(), cfg.tol.unwrap_or(1e-9))?;
    let spec = Spectrum::new(params, cfg.n());
    let mut csv = Csv::new(
        out,
        "resonance.csv",
        &[
            "k1",
            "branch1",
            "omega1",
            "k2",
            "branch2",
            "omega2",
            "difference",
        ],
    );
    for (p, q) in &report.pairs {
        let (wp, wq) = (spec.get(*p).omega, spec.get(*q).omega);
        csv.row(&[
            p.k.to_string(),
            p.branch.symbol().to_string(),
            num(wp),
            q.k.to_string(),
            q.branch.symbol().to_string(),
            num(wq),
            num(wp - wq),
        ]);
    }
    Ok(vec![wrote(csv.finish()?, report.pairs.len())])
}

fn observe(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let params = cfg.params()?;
    let mode = cfg.observation_mode()?;
    let ns = cfg.n_list.clone().unwrap_or_else(|| vec![cfg.n()]);
    let lengths = cfg.window_lengths(&params)?;
    let start = cfg.window_start.unwrap_or(0.0);
    let mut csv = Csv::new(
        out,
        "observability.csv",
        &["N", "window_length", "mode", "alpha", "beta", "kernel_dim"],
    );
    for &len in &lengths {
        let window = ObservationWindow::new(start, start + len)?;
        for &n in &ns {
            let r = observability_constants(&params, n, cfg.x0(), window, mode)?;
            csv.row(&[
                n.to_string(),
                num(len),
                mode.name().to_string(),
                num(r.alpha),
                num(r.beta),
                r.kernel_dim.to_string(),
            ]);
        }
    }
    Ok(vec![wrote(csv.finish()?, ns.len() * lengths.len())])
}

fn ingham(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let len = cfg.window.unwrap_or(INGHAM_WINDOW);
    let start = cfg.window_start.unwrap_or(0.0);
    let window = ObservationWindow::new(start, start + len)?;
    let families: Vec<Vec<f64>> = match &cfg.frequencies {
        Some(f) => vec![f.clone()],
        None => cfg
            .family_sizes
            .clone()
            .unwrap_or_else(|| vec![11, 21, 41])
            .into_iter()
            .map(|m| {
                if m % 2 == 0 {
                    return Err(CliError::Config(format!("family size {m} must be odd")));
                }
                let h = (m / 2) as i64;
                Ok((-h..=h).map(|k| k as f64).collect())
            })
            .collect::<Result<_, _>>()?,
    };
    let mut csv = Csv::new(
        out,
        "ingham.csv",
        &["members", "window_length", "direct", "inverse"],
    );
    for fam in &families {
        let (direct, inverse) = ingham_report(fam, window)?;
        csv.row(&[fam.len().to_string(), num(len), num(direct), num(inverse)]);
    }
    Ok(vec![wrote(csv.finish()?, families.len())])
}

/// Real fields of unit energy.
fn random_real_unit(spec: &Spectrum, rng: &mut ChaCha8Rng, mean_free: bool) -> ModalState {
    let mut s = ModalState::random_real(spec.n(), rng);
    if mean_free {
        for b in [Branch::Plus, Branch::Minus] {
            s.set(ModeBranch::new(0, b), Complex64::new(0.0, 0.0));
        }
    }
    let e = energy(spec, &s);
    s.scaled(Complex64::new(1.0 / e.sqrt(), 0.0))
}

fn resolve_state(
    spec: &Spectrum,
    which: &StateSpec,
    rng: &mut ChaCha8Rng,
) -> Result<ModalState, CliError> {
    match which {
        StateSpec::Named(name) => match name.as_str() {
            "zero" => Ok(ModalState::zeros(spec.n())),
            "random" => Ok(random_real_unit(spec, rng, false)),
            "random_mean_free" => Ok(random_real_unit(spec, rng, true)),
            other => Err(CliError::Config(format!("unknown state preset `{other}`"))),
        },
        StateSpec::Coeffs(c) => {
            if c.len() != modal_dim(spec.n()) {
                return Err(CliError::Config(format!(
                    "expected {} modal coefficients for N={}, got {}",
                    modal_dim(spec.n()),
                    spec.n(),
                    c.len()
                )));
            }
            Ok(ModalState::from_coeffs(
                spec.n(),
                c.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
            )?)
        }
    }
}

#[derive(Serialize)]
struct ParamsJson {
    a: f64,
    c: f64,
    d: f64,
    r: f64,
}

impl From<&PhysicalParams> for ParamsJson {
    fn from(p: &PhysicalParams) -> Self {
        Self {
            a: p.a(),
            c: p.c(),
            d: p.d(),
            r: p.r(),
        }
    }
}

#[derive(Serialize)]
struct TermJson {
    amplitude: [f64; 2],
    frequency: f64,
    degree: u32,
}

fn terms(signal: &Option<ExponentialSignal>) -> Option<Vec<TermJson>> {
    signal.as_ref().map(|s| {
        s.terms
            .iter()
            .map(|t| TermJson {
                amplitude: [t.amplitude.re, t.amplitude.im],
                frequency: t.frequency,
                degree: t.degree,
            })
            .collect()
    })
}

#[derive(Serialize)]
struct PlanJson {
    params: ParamsJson,
    #[serde(rename = "N")]
    n: usize,
    x0: f64,
    #[serde(rename = "T")]
    horizon: f64,
    mode: &'static str,
    f: Option<Vec<TermJson>>,
    g: Option<Vec<TermJson>>,
    adjoint_seed: Vec<[f64; 2]>,
    cost: f64,
}

fn control(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let params = cfg.params()?;
    let mode = cfg.control_mode()?;
    let spec = Spectrum::new(params, cfg.n());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let default_initial = StateSpec::Named(
        if mode == ControlMode::Both {
            "random"
        } else {
            "random_mean_free"
        }
        .into(),
    );
    let initial = resolve_state(
        &spec,
        cfg.initial.as_ref().unwrap_or(&default_initial),
        &mut rng,
    )?;
    let target = resolve_state(
        &spec,
        cfg.target
            .as_ref()
            .unwrap_or(&StateSpec::Named("zero".into())),
        &mut rng,
    )?;

    let t = cfg.horizon(&params);
    let system = assemble_lambda(&params, spec.n(), cfg.x0(), t, mode)?;
    // a constraint violation leaves no plan behind
    let plan = solve_with(&system, &initial, &target)?;

    let reached = forced_evolve(
        &spec,
        &initial,
        plan.f.as_ref(),
        plan.g.as_ref(),
        plan.x0,
        t,
    );
    let free = evolve(&spec, &initial, t);
    let drift_u = (reached.mean_u(&spec) - free.mean_u(&spec)).norm();
    let drift_v = (reached.mean_v(&spec) - free.mean_v(&spec)).norm();
    let mut csv = Csv::new(out, "verify.csv", &["metric", "value"]);
    for (name, value) in [
        (
            "roundtrip_error",
            verify_roundtrip(&spec, &plan, &initial, &target),
        ),
        (
            "reconstruction_residual",
            plan.reconstruction_residual(&spec),
        ),
        ("cost", plan.cost()),
        ("lambda_coercivity", system.coercivity()),
        ("lambda_condition", system.condition()),
        ("mean_u_drift", drift_u),
        ("mean_v_drift", drift_v),
    ] {
        csv.row(&[name.to_string(), num(value)]);
    }
    let verify = csv.finish()?;
    let plan_path = write_json(out, "plan.json", &plan_json(&spec, &plan))?;
    Ok(vec![
        format!("wrote {}", plan_path.display()),
        format!("wrote {}", verify.display()),
    ])
}

fn plan_json(spec: &Spectrum, plan: &ControlPlan) -> PlanJson {
    PlanJson {
        params: spec.params().into(),
        n: spec.n(),
        x0: plan.x0,
        horizon: plan.horizon,
        mode: plan.mode.name(),
        f: terms(&plan.f),
        g: terms(&plan.g),
        adjoint_seed: plan
            .adjoint_seed
            .coeffs()
            .iter()
            .map(|z| [z.re, z.im])
            .collect(),
        cost: plan.cost(),
    }
}

#[derive(Serialize)]
struct StabilizeJson {
    omega_target: f64,
    fitted_rate: f64,
    #[serde(rename = "fitted_M")]
    fitted_m: f64,
    abscissa: f64,
    #[serde(rename = "Th")]
    horizon: f64,
    #[serde(rename = "N")]
    n: usize,
    x0: f64,
    #[serde(rename = "T_sim")]
    t_sim: f64,
}

fn stabilize(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let params = cfg.params()?;
    let spec = Spectrum::new(params, cfg.n());
    let th = cfg.th(&params);
    let gains = feedback_gains_on(&spec, cfg.x0(), cfg.omega_target(), th)?;
    let abscissa = spectral_abscissa(&closed_loop_matrix(&spec, &gains));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let state0 = random_real_unit(&spec, &mut rng, false);
    let sim = closed_loop_simulate(&spec, &gains, &state0, cfg.t_sim())?;

    let mut csv = Csv::new(out, "decay.csv", &["t", "energy", "log_energy"]);
    for (t, e) in sim.times.iter().zip(&sim.energies) {
        csv.row(&[num(*t), num(*e), num(e.ln())]);
    }
    let rows = sim.times.len();
    let summary = StabilizeJson {
        omega_target: gains.omega_target,
        fitted_rate: sim.fitted_rate,
        fitted_m: sim.fitted_m,
        abscissa,
        horizon: th,
        n: spec.n(),
        x0: cfg.x0(),
        t_sim: cfg.t_sim(),
    };
    Ok(vec![
        wrote(csv.finish()?, rows),
        format!(
            "wrote {}",
            write_json(out, "stabilize.json", &summary)?.display()
        ),
        format!("abscissa {abscissa:.6}, fitted rate {:.6}", sim.fitted_rate),
    ])
}

/// A few random exponentials, including one secular term.
fn random_control(rng: &mut ChaCha8Rng) -> ExponentialSignal {
    let mut terms: Vec<ExpTerm> = (0..3)
        .map(|_| {
            let amp = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            ExpTerm::new(amp, rng.random_range(-10.0..10.0), 0)
        })
        .collect();
    terms.push(ExpTerm::new(
        Complex64::new(rng.random_range(-1.0..1.0), 0.0),
        rng.random_range(-10.0..10.0),
        1,
    ));
    ExponentialSignal::new(terms)
}

fn duality(cfg: &Config, out: &Path) -> Result<Vec<String>, CliError> {
    let params = cfg.params()?;
    let spec = Spectrum::new(params, cfg.n());
    let t = cfg.horizon.unwrap_or(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed());
    let draws = cfg.draws.unwrap_or(20);
    let mut csv = Csv::new(
        out,
        "duality.csv",
        &["draw", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual"],
    );
    let mut worst: f64 = 0.0;
    for j in 0..draws {
        let f = random_control(&mut rng);
        let g = random_control(&mut rng);
        let initial = ModalState::random(spec.n(), &mut rng);
        let seed = AdjointState::random(spec.n(), &mut rng);
        let s = duality_sides(&spec, Some(&f), Some(&g), cfg.x0(), &initial, &seed, t);
        worst = worst.max(s.residual());
        csv.row(&[
            j.to_string(),
            num(s.lhs.re),
            num(s.lhs.im),
            num(s.rhs.re),
            num(s.rhs.im),
            num(s.residual()),
        ]);
    }
    Ok(vec![
        wrote(csv.finish()?, draws),
        format!("largest residual {worst:.3e}"),
    ])
}

/// The fixed experiment list behind `suite`; only the seed is taken from the caller.
pub fn suite_plan(seed: u64) -> Vec<(&'static str, Command, Config)> {
    let base = |preset: &str| Config {
        preset: Some(preset.into()),
        seed: Some(seed),
        ..Default::default()
    };
    vec![
        (
            "spectrum_generic",
            Command::Spectrum,
            Config {
                n: Some(8),
                ..base("generic")
            },
        ),
        (
            "spectrum_resonant",
            Command::Spectrum,
            Config {
                n: Some(8),
                ..base("resonant")
            },
        ),
        (
            "gaps_generic",
            Command::Gaps,
            Config {
                n: Some(100),
                ..base("generic")
            },
        ),
        (
            "gaps_resonant",
            Command::Gaps,
            Config {
                n: Some(400),
                ..base("resonant")
            },
        ),
        (
            "resonance_generic",
            Command::Resonance,
            Config {
                n: Some(16),
                ..base("generic")
            },
        ),
        (
            "observe_resonant",
            Command::Observe,
            Config {
                n_list: Some(vec![4, 8, 16, 32]),
                windows_t0: Some(vec![0.5, 1.0, 1.5]),
                ..base("resonant")
            },
        ),
        ("ingham", Command::Ingham, base("generic")),
        (
            "control_generic",
            Command::Control,
            Config {
                horizon: Some(1.0),
                ..base("generic")
            },
        ),
        ("control_resonant", Command::Control, base("resonant")),
        ("stabilize_generic", Command::Stabilize, base("generic")),
        ("duality_generic", Command::Duality, base("generic")),
    ]
}

pub fn suite(seed: u64, out: &Path) -> Result<Vec<String>, CliError> {
    let mut lines = Vec::new();
    for (dir, cmd, cfg) in suite_plan(seed) {
        lines.extend(execute(cmd, &cfg, &out.join(dir))?);
    }
    Ok(lines)
}
