//! Argument parsing and subcommand dispatch.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use loopsim_core::analysis::{odd_generator_product, stabilizer_generators, svn_prime, Observable, PhaseScan};
use loopsim_core::entlen::{depolarizing_length_bound, ChainSweep, DEFAULT_CAP, DEFAULT_TOLERANCE};
use loopsim_core::montecarlo::{
    subtract_background, visibility_with_errors, BackgroundModel, Counts, DetectorModel, MonteCarloConfig,
    PulseSequence, DEFAULT_DEAD_TIME_NS, DEFAULT_EXTINCTION, DEFAULT_WINDOW_NS,
};
use loopsim_core::protocol::{build_chain, NoiseKindTag, NoiseModel};
use loopsim_core::qcore::{Pauli, PauliString};
use loopsim_core::scaling::{budget_points, detection_rate, fig4b_curves, scaling_ratio, EfficiencyBudget, Preset};

use crate::config::{FileConfig, NoiseArg, ObservableArg, PresetArg, SweepNoiseArg};
use crate::emit::{emit_table, Format, Table, Value};
use crate::error::{CliError, Result};
use crate::parallel;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "LOOPSIM_OUTPUT_DIR";

/// Simulate sequential loop-based generation of linear photonic cluster
/// states: noisy visibilities, stabilizers, entanglement length, rate
/// scaling and event-level coincidence counting.
#[derive(Debug, Parser)]
#[command(name = "loopsim", version, disable_help_subcommand = true, max_term_width = 100)]
pub struct Cli {
    #[command(flatten, next_help_heading = "Global options")]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output file [default: $LOOPSIM_OUTPUT_DIR/<subcommand>.<format>, else stdout]
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// TOML file whose keys mirror the long flags; flags take precedence
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads [default: all cores]
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Random seed for Monte Carlo runs [default: 1]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Visibility versus loop phase: simulated chain and closed form
    PhaseScan(PhaseScanArgs),
    /// Entanglement length of noisy chains (chain-end concurrence)
    Entlen(EntlenArgs),
    /// Detection rates, scaling ratio and the PDC comparison curve
    Scaling(ScalingArgs),
    /// Event-level Monte Carlo of the coincidence-counting pipeline
    Montecarlo(MonteCarloArgs),
    /// Check cluster stabilizer generators on ideal chains
    StabilizerCheck(StabilizerArgs),
}

/// Fusion-noise flags shared by phase scans and Monte Carlo runs.
#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Mean wave-packet overlap M in [0, 1] [default: 1]
    #[arg(long = "M", value_name = "M")]
    pub m: Option<f64>,

    /// Two-photon emission probability g2 in [0, 1) [default: 0]
    #[arg(long)]
    pub g2: Option<f64>,

    /// Depolarizing strength delta in [0, 1] [default: 0]
    #[arg(long)]
    pub delta: Option<f64>,

    /// Fusion noise [default: depolarizing if --delta is set, else distinguishing]
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
}

#[derive(Debug, Args)]
pub struct PhaseScanArgs {
    /// Number of photons n >= 2 [default: 2]
    #[arg(long)]
    pub photons: Option<usize>,

    #[command(flatten)]
    pub noise: NoiseArgs,

    /// Observable [default: xn]
    #[arg(long, value_enum)]
    pub observable: Option<ObservableArg>,

    /// Grid points, endpoints included [default: 41]
    #[arg(long)]
    pub points: Option<usize>,

    /// First phase in radians [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub phi_min: Option<f64>,

    /// Last phase in radians [default: 2*pi]
    #[arg(long, allow_negative_numbers = true)]
    pub phi_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EntlenArgs {
    /// Two-photon visibilities in (0, 1], comma separated [default: 0.93,0.76]
    #[arg(long, value_delimiter = ',')]
    pub v2: Vec<f64>,

    /// Evenly spaced visibilities MIN:MAX:POINTS, added to --v2
    #[arg(long, value_name = "MIN:MAX:POINTS")]
    pub v2_grid: Option<String>,

    /// Noise family [default: both]
    #[arg(long, value_enum)]
    pub noise: Option<SweepNoiseArg>,

    /// Longest chain examined [default: 64]
    #[arg(long)]
    pub cap: Option<usize>,

    /// Concurrence counted as positive above this value [default: 1e-9]
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Emit the concurrence of every chain length instead of the lengths
    #[arg(long)]
    pub concurrences: bool,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    /// Efficiency preset [default: paper]
    #[arg(long, value_enum)]
    pub preset: Option<PresetArg>,

    /// Single-photon repetition rate in Hz (overrides the preset)
    #[arg(long)]
    pub rate: Option<f64>,

    /// Detector efficiency (overrides the preset)
    #[arg(long)]
    pub eta_d: Option<f64>,

    /// Source efficiency (overrides the preset)
    #[arg(long)]
    pub eta_s: Option<f64>,

    /// Loop transmission (overrides the preset)
    #[arg(long)]
    pub eta_l: Option<f64>,

    /// Brightness per pulse (overrides the preset)
    #[arg(long)]
    pub eta_b: Option<f64>,

    /// Fusion gate success probability (overrides the preset)
    #[arg(long)]
    pub eta_g: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub budget: BudgetArgs,

    /// Emit the visibility/scaling-ratio comparison instead of rates
    #[arg(long)]
    pub fig4b: bool,

    /// Largest photon number in the rate table [default: 6]
    #[arg(long)]
    pub n_max: Option<usize>,

    /// Comparison-curve visibilities MIN:MAX:POINTS [default: 0.05:0.95:19]
    #[arg(long, value_name = "MIN:MAX:POINTS")]
    pub v2_grid: Option<String>,

    /// Two-photon visibility at which the budget point is placed [default: 0.76]
    #[arg(long)]
    pub point_v2: Option<f64>,

    /// Detector efficiency of the extrapolated budget point [default: 0.9]
    #[arg(long)]
    pub eta_d_extrapolate: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    /// Modulator pattern over loop bins, ending in >= 2 zeros [default: 1100]
    #[arg(long)]
    pub pattern: Option<String>,

    /// Number of sequences [default: 1000000]
    #[arg(long)]
    pub shots: Option<u64>,

    /// Loop phase in radians [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,

    #[command(flatten)]
    pub noise: NoiseArgs,

    #[command(flatten)]
    pub budget: BudgetArgs,

    /// Continuous background as accidental share of true coincidences, in [0, 1) [default: 0]
    #[arg(long)]
    pub background: Option<f64>,

    /// Relative leakage of closed bins, in [0, 1) [default: 0.01]
    #[arg(long)]
    pub extinction: Option<f64>,

    /// Coincidence window in ns [default: 5]
    #[arg(long)]
    pub window_ns: Option<f64>,

    /// Detector dead time in ns [default: 60]
    #[arg(long)]
    pub dead_time: Option<f64>,

    /// Loop round-trip time in ns [default: 74]
    #[arg(long)]
    pub bin_ns: Option<f64>,

    /// Run the background sequences and subtract them
    #[arg(long)]
    pub subtract: bool,
}

#[derive(Debug, Args)]
pub struct StabilizerArgs {
    /// Largest chain checked, from 2 photons up [default: 6]
    #[arg(long)]
    pub photons: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_range(name: &str, x: f64, lo: f64, hi: f64, lo_open: bool, hi_open: bool) -> Result<f64> {
    let ok_lo = if lo_open { x > lo } else { x >= lo };
    let ok_hi = if hi_open { x < hi } else { x <= hi };
    if ok_lo && ok_hi && x.is_finite() {
        Ok(x)
    } else {
        let l = if lo_open { '(' } else { '[' };
        let h = if hi_open { ')' } else { ']' };
        Err(usage(format!("--{name} {x} outside {l}{lo}, {hi}{h}")))
    }
}

fn closed_unit(name: &str, x: f64) -> Result<f64> {
    check_range(name, x, 0.0, 1.0, false, false)
}

fn half_open_unit(name: &str, x: f64) -> Result<f64> {
    check_range(name, x, 0.0, 1.0, false, true)
}

fn efficiency(name: &str, x: f64) -> Result<f64> {
    check_range(name, x, 0.0, 1.0, true, false)
}

fn positive(name: &str, x: f64) -> Result<f64> {
    check_range(name, x, 0.0, f64::INFINITY, true, true)
}

fn non_negative(name: &str, x: f64) -> Result<f64> {
    check_range(name, x, 0.0, f64::INFINITY, false, true)
}

fn parse_enum<T: ValueEnum>(name: &str, text: &str) -> Result<T> {
    T::from_str(text, true).map_err(|_| usage(format!("invalid value {text:?} for {name}")))
}

/// Parses `MIN:MAX:POINTS`.
fn parse_grid(name: &str, text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || usage(format!("--{name} expects MIN:MAX:POINTS, got {text:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![lo]),
        _ => Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()),
    }
}

/// Settings after merging flags, file and defaults.
struct Context {
    file: FileConfig,
    format: Format,
    output: Option<PathBuf>,
    seed: u64,
}

fn resolve_noise(args: &NoiseArgs, file: &FileConfig) -> Result<NoiseModel> {
    let m = args.m.or(file.m).map(|x| closed_unit("M", x)).transpose()?;
    let delta = args.delta.or(file.delta).map(|x| closed_unit("delta", x)).transpose()?;
    let g2 = half_open_unit("g2", args.g2.or(file.g2).unwrap_or(0.0))?;
    let kind = match args.noise {
        Some(k) => Some(k),
        None => file.noise.as_deref().map(|s| parse_enum::<NoiseArg>("noise", s)).transpose()?,
    };
    let kind = kind.unwrap_or(if delta.is_some() { NoiseArg::Depolarizing } else { NoiseArg::Distinguishing });
    let noise = match kind {
        NoiseArg::Ideal => {
            if m.is_some_and(|m| m != 1.0) || delta.is_some_and(|d| d != 0.0) {
                return Err(usage("--noise ideal conflicts with --M < 1 or --delta > 0"));
            }
            NoiseModel::ideal()
        }
        NoiseArg::Distinguishing => {
            if delta.is_some_and(|d| d != 0.0) {
                return Err(usage("--delta requires --noise depolarizing"));
            }
            NoiseModel::distinguishing(m.unwrap_or(1.0))?
        }
        NoiseArg::Depolarizing => {
            if m.is_some_and(|m| m != 1.0) {
                return Err(usage("--M requires --noise distinguishing"));
            }
            NoiseModel::depolarizing(delta.unwrap_or(0.0))?
        }
    };
    Ok(noise.with_g2(g2)?)
}

fn noise_meta(t: &mut Table, noise: &NoiseModel) {
    use loopsim_core::protocol::NoiseKind;
    let (name, m, delta) = match noise.kind() {
        NoiseKind::Ideal => ("ideal", 1.0, 0.0),
        NoiseKind::Distinguishing { m } => ("distinguishing", m, 0.0),
        NoiseKind::Depolarizing { delta } => ("depolarizing", 1.0, delta),
    };
    t.meta("noise", name).meta("M", m).meta("delta", delta).meta("g2", noise.g2());
}

fn resolve_budget(args: &BudgetArgs, file: &FileConfig) -> Result<(PresetArg, EfficiencyBudget)> {
    let preset = args.preset.or(file.preset).unwrap_or(PresetArg::Paper);
    let mut b = core_preset(preset).budget();
    if let Some(r) = args.rate.or(file.rate) {
        b.rate_hz = positive("rate", r)?;
    }
    let overrides = [
        ("eta-d", args.eta_d.or(file.eta_d), &mut b.eta_d),
        ("eta-s", args.eta_s.or(file.eta_s), &mut b.eta_s),
        ("eta-l", args.eta_l.or(file.eta_l), &mut b.eta_l),
        ("eta-b", args.eta_b.or(file.eta_b), &mut b.eta_b),
        ("eta-g", args.eta_g.or(file.eta_g), &mut b.eta_g),
    ];
    for (name, value, slot) in overrides {
        if let Some(v) = value {
            *slot = efficiency(name, v)?;
        }
    }
    Ok((preset, b))
}

fn core_preset(p: PresetArg) -> Preset {
    match p {
        PresetArg::Paper => Preset::Paper,
        PresetArg::PaperDim => Preset::PaperDim,
        PresetArg::IdealGate => Preset::IdealGate,
        PresetArg::Deterministic => Preset::Deterministic,
    }
}

fn budget_meta(t: &mut Table, preset: PresetArg, b: &EfficiencyBudget) {
    t.meta("preset", core_preset(preset).name()).meta("rate_hz", b.rate_hz);
    for (name, v) in b.named() {
        t.meta(name, v);
    }
}

fn phase_scan(args: &PhaseScanArgs, ctx: &Context) -> Result<Table> {
    let f = &ctx.file;
    let n = args.photons.or(f.photons).unwrap_or(2);
    if n < 2 {
        return Err(usage(format!("--photons must be at least 2, got {n}")));
    }
    let noise = resolve_noise(&args.noise, f)?;
    let obs = match args.observable.or(f.observable).unwrap_or(ObservableArg::Xn) {
        ObservableArg::Xn => Observable::Xn,
        ObservableArg::Svnp => Observable::SvnPrime,
    };
    let points = args.points.or(f.points).unwrap_or(41);
    if points == 0 {
        return Err(usage("--points must be positive"));
    }
    let lo = args.phi_min.or(f.phi_min).unwrap_or(0.0);
    let hi = args.phi_max.or(f.phi_max).unwrap_or(TAU);
    if !(lo.is_finite() && hi.is_finite()) || (points > 1 && hi <= lo) {
        return Err(usage("--phi-max must exceed --phi-min"));
    }
    let scan = PhaseScan::uniform(n, noise, obs, points, lo, hi)?;
    let rows = parallel::phase_scan(&scan)?;
    let mut t = Table::new(&["phi", "simulated", "predicted"]);
    t.meta("subcommand", "phase-scan").meta("photons", n);
    noise_meta(&mut t, &noise);
    t.meta("observable", obs.tag()).meta("pauli", obs.pauli(n)?.to_string());
    for r in rows {
        t.push(vec![r.phi.into(), r.simulated.into(), r.predicted.into()])?;
    }
    Ok(t)
}

fn entlen(args: &EntlenArgs, ctx: &Context) -> Result<(Table, Vec<String>)> {
    let f = &ctx.file;
    let mut v2s: Vec<f64> = if args.v2.is_empty() { f.v2.clone().unwrap_or_default() } else { args.v2.clone() };
    if let Some(g) = args.v2_grid.as_deref().or(f.v2_grid.as_deref()) {
        v2s.extend(parse_grid("v2-grid", g)?);
    }
    if v2s.is_empty() {
        v2s = vec![0.93, 0.76];
    }
    for &v in &v2s {
        efficiency("v2", v)?;
    }
    let family = match args.noise {
        Some(k) => k,
        None => f
            .noise
            .as_deref()
            .map(|s| parse_enum::<SweepNoiseArg>("noise", s))
            .transpose()?
            .unwrap_or(SweepNoiseArg::Both),
    };
    let kinds: &[NoiseKindTag] = match family {
        SweepNoiseArg::Distinguishing => &[NoiseKindTag::Distinguishing],
        SweepNoiseArg::Depolarizing => &[NoiseKindTag::Depolarizing],
        SweepNoiseArg::Both => &[NoiseKindTag::Distinguishing, NoiseKindTag::Depolarizing],
    };
    let cap = args.cap.or(f.cap).unwrap_or(DEFAULT_CAP);
    if cap < 2 {
        return Err(usage(format!("--cap must be at least 2, got {cap}")));
    }
    let tol = check_range("tolerance", args.tolerance.or(f.tolerance).unwrap_or(DEFAULT_TOLERANCE), 0.0, 1.0, false, true)?;
    let mut sweeps = Vec::new();
    for &kind in kinds {
        for &v in &v2s {
            sweeps.push(ChainSweep::new(v, kind)?.with_cap(cap)?.with_tolerance(tol)?);
        }
    }
    let results = parallel::entanglement_lengths(&sweeps)?;
    let name = |k: NoiseKindTag| match k {
        NoiseKindTag::Distinguishing => "distinguishing",
        NoiseKindTag::Depolarizing => "depolarizing",
    };
    let concurrences = args.concurrences || f.concurrences.unwrap_or(false);
    let mut t = if concurrences {
        Table::new(&["v2", "noise", "n", "concurrence"])
    } else {
        Table::new(&["v2", "noise", "L", "cap_limited", "modes", "threshold_L"])
    };
    t.meta("subcommand", "entlen").meta("cap", cap).meta("tolerance", tol);
    let mut summary = Vec::new();
    for (s, r) in sweeps.iter().zip(&results) {
        let flag = if r.cap_limited { " (cap-limited)" } else { "" };
        summary.push(format!("v2={} noise={} L={}{flag}", crate::emit::format_float(s.v2()), name(s.kind()), r.length));
        if concurrences {
            for &(n, c) in &r.concurrences {
                t.push(vec![s.v2().into(), name(s.kind()).into(), n.into(), c.into()])?;
            }
        } else {
            t.push(vec![
                s.v2().into(),
                name(s.kind()).into(),
                r.length.into(),
                r.cap_limited.into(),
                s.modes().into(),
                depolarizing_length_bound(s.v2(), cap)?.into(),
            ])?;
        }
    }
    Ok((t, summary))
}

fn scaling(args: &ScalingArgs, ctx: &Context) -> Result<Table> {
    let f = &ctx.file;
    let (preset, budget) = resolve_budget(&args.budget, f)?;
    let r = scaling_ratio(&budget)?;
    if args.fig4b || f.fig4b.unwrap_or(false) {
        let grid = parse_grid("v2-grid", args.v2_grid.as_deref().or(f.v2_grid.as_deref()).unwrap_or("0.05:0.95:19"))?;
        for &v in &grid {
            check_range("v2-grid", v, 0.0, 1.0, true, true)?;
        }
        let point_v2 = efficiency("point-v2", args.point_v2.or(f.point_v2).unwrap_or(0.76))?;
        let eta_x = efficiency("eta-d-extrapolate", args.eta_d_extrapolate.or(f.eta_d_extrapolate).unwrap_or(0.9))?;
        let mut t = Table::new(&["kind", "label", "v2", "r"]);
        t.meta("subcommand", "scaling").meta("view", "fig4b");
        budget_meta(&mut t, preset, &budget);
        for row in fig4b_curves(&grid)? {
            t.push(vec!["pdc-gate".into(), "".into(), row.v2.into(), row.r_pdc_gate.into()])?;
        }
        for row in fig4b_curves(&grid)? {
            t.push(vec!["gate-floor".into(), "".into(), row.v2.into(), row.r_gate_floor.into()])?;
        }
        for p in budget_points("this work", &budget, point_v2, Some(eta_x))? {
            t.push(vec!["point".into(), p.label.into(), p.v2.into(), p.r.into()])?;
        }
        return Ok(t);
    }
    let n_max = args.n_max.or(f.n_max).unwrap_or(6);
    if n_max < 1 {
        return Err(usage("--n-max must be at least 1"));
    }
    let mut t = Table::new(&["n", "rate_hz", "ratio_to_next"]);
    t.meta("subcommand", "scaling").meta("view", "rates");
    budget_meta(&mut t, preset, &budget);
    t.meta("scaling_ratio", r);
    for n in 1..=n_max {
        let rn = detection_rate(&budget, n)?;
        let next = detection_rate(&budget, n + 1)?;
        t.push(vec![n.into(), rn.into(), (rn / next).into()])?;
    }
    Ok(t)
}

fn montecarlo(args: &MonteCarloArgs, ctx: &Context) -> Result<Table> {
    let f = &ctx.file;
    let pattern = args.pattern.clone().or_else(|| f.pattern.clone()).unwrap_or_else(|| "1100".into());
    let mut seq = PulseSequence::parse(&pattern)?;
    if let Some(bin) = args.bin_ns.or(f.bin_ns) {
        seq = seq.with_bin_ns(positive("bin-ns", bin)?)?;
    }
    let n = seq.photons();
    if n < 2 {
        return Err(usage("the pattern needs at least two open bins"));
    }
    let shots = args.shots.or(f.shots).unwrap_or(1_000_000);
    if shots == 0 {
        return Err(usage("--shots must be positive"));
    }
    let phi = args.phi.or(f.phi).unwrap_or(0.0);
    if !phi.is_finite() {
        return Err(usage("--phi must be finite"));
    }
    let noise = resolve_noise(&args.noise, f)?;
    let (preset, budget) = resolve_budget(&args.budget, f)?;
    let dead = non_negative("dead-time", args.dead_time.or(f.dead_time).unwrap_or(DEFAULT_DEAD_TIME_NS))?;
    let detector = DetectorModel::new(budget.eta_d, dead)?;
    let background = BackgroundModel::new(
        half_open_unit("background", args.background.or(f.background).unwrap_or(0.0))?,
        half_open_unit("extinction", args.extinction.or(f.extinction).unwrap_or(DEFAULT_EXTINCTION))?,
        positive("window-ns", args.window_ns.or(f.window_ns).unwrap_or(DEFAULT_WINDOW_NS))?,
    )?;
    let cfg = MonteCarloConfig { sequence: seq.clone(), noise, budget, detector, background, phi };
    let tally = parallel::run_sequence(&cfg, shots, ctx.seed)?;
    let subtract = args.subtract || f.subtract.unwrap_or(false);
    let observable = PauliString::uniform(Pauli::X, n);

    let mut t = if subtract {
        Table::new(&["pattern", "count", "corrected", "variance"])
    } else {
        Table::new(&["pattern", "count"])
    };
    t.meta("photons", n).meta("shots", shots).meta("seed", ctx.seed);
    t.meta("subcommand", "montecarlo").meta("pattern", seq.pattern_string()).meta("phi", phi);
    noise_meta(&mut t, &noise);
    budget_meta(&mut t, preset, &budget);
    t.meta("dead_time_ns", dead)
        .meta("bin_ns", seq.bin_ns())
        .meta("window_ns", background.window_ns)
        .meta("cw_fraction", background.cw_fraction)
        .meta("extinction", background.extinction)
        .meta("coincidences", tally.total());
    let fmt_vis = |t: &mut Table, prefix: &str, counts: &Counts| match visibility_with_errors(counts, &observable) {
        Ok((v, s)) => {
            t.meta(&format!("{prefix}visibility"), v).meta(&format!("{prefix}sigma"), s);
        }
        Err(_) => {
            t.meta(&format!("{prefix}visibility"), "n/a");
        }
    };
    let raw = Counts::from(&tally);
    fmt_vis(&mut t, "", &raw);
    let corrected = if subtract {
        let bgs = parallel::background_runs(&cfg, shots, ctx.seed)?;
        let c = subtract_background(&tally, &bgs)?;
        t.meta("background_coincidences", bgs.iter().map(|b| b.total()).sum::<u64>());
        fmt_vis(&mut t, "corrected_", &c);
        t.meta("negative_counts", c.has_negative);
        Some(c)
    } else {
        None
    };
    for (i, (label, count)) in tally.rows().enumerate() {
        let mut row: Vec<Value> = vec![label.into(), count.into()];
        if let Some(c) = &corrected {
            row.push(c.values[i].into());
            row.push(c.variances[i].into());
        }
        t.push(row)?;
    }
    Ok(t)
}

fn stabilizer_check(args: &StabilizerArgs, ctx: &Context) -> Result<Table> {
    let n_max = args.photons.or(ctx.file.photons).unwrap_or(6);
    if !(2..=loopsim_core::qcore::MAX_PURE_QUBITS).contains(&n_max) {
        return Err(usage(format!("--photons must be in [2, {}]", loopsim_core::qcore::MAX_PURE_QUBITS)));
    }
    let mut t = Table::new(&["photons", "name", "pauli", "expectation", "stabilizes"]);
    t.meta("subcommand", "stabilizer-check").meta("phi", 0.0);
    for n in 2..=n_max {
        let chain = build_chain(n, 0.0, &NoiseModel::ideal())?;
        let state = chain.state().ok_or(loopsim_core::Error::ProtocolOrder("empty chain"))?;
        let mut checks: Vec<(String, PauliString)> = stabilizer_generators(n)?
            .into_iter()
            .enumerate()
            .map(|(i, g)| (format!("g{}", i + 1), g))
            .collect();
        if n >= 4 && n % 2 == 0 {
            let closed = svn_prime(n)?;
            let product = odd_generator_product(n)?;
            if closed != product {
                return Err(loopsim_core::Error::Argument(format!(
                    "S_Vn' closed form {closed} differs from generator product {product}"
                ))
                .into());
            }
            checks.push(("svn-prime".into(), closed));
        }
        for (name, p) in checks {
            let e = state.expectation(&p)?;
            t.push(vec![n.into(), name.into(), p.to_string().into(), e.into(), ((e - 1.0).abs() < 1e-10).into()])?;
        }
    }
    Ok(t)
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::PhaseScan(_) => "phase-scan",
        Command::Entlen(_) => "entlen",
        Command::Scaling(_) => "scaling",
        Command::Montecarlo(_) => "montecarlo",
        Command::StabilizerCheck(_) => "stabilizer-check",
    }
}

/// Runs a parsed command line.
pub fn execute(cli: Cli) -> Result<()> {
    let file = match &cli.global.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let format = cli.global.format.or(file.format).unwrap_or(Format::Csv);
    let name = subcommand_name(&cli.command);
    let output = cli.global.output.clone().or_else(|| file.output.clone()).or_else(|| {
        std::env::var_os(OUTPUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{name}.{}", format.extension())))
    });
    let seed = cli.global.seed.or(file.seed).unwrap_or(1);
    let threads = cli.global.threads.or(file.threads);
    if threads == Some(0) {
        return Err(usage("--threads must be positive"));
    }
    let ctx = Context { file, format, output, seed };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::ThreadPool(e.to_string()))?;
    pool.install(|| {
        let (table, summary) = match &cli.command {
            Command::PhaseScan(a) => (phase_scan(a, &ctx)?, Vec::new()),
            Command::Entlen(a) => entlen(a, &ctx)?,
            Command::Scaling(a) => (scaling(a, &ctx)?, Vec::new()),
            Command::Montecarlo(a) => (montecarlo(a, &ctx)?, Vec::new()),
            Command::StabilizerCheck(a) => (stabilizer_check(a, &ctx)?, Vec::new()),
        };
        emit_table(&table, ctx.format, ctx.output.as_deref())?;
        if !summary.is_empty() {
            let text = summary.join("\n") + "\n";
            // Keep stdout a clean table when the table itself goes there.
            let res = if ctx.output.is_some() {
                std::io::stdout().lock().write_all(text.as_bytes())
            } else {
                std::io::stderr().lock().write_all(text.as_bytes())
            };
            res.map_err(|e| CliError::io("<stdout>", e))?;
        }
        Ok(())
    })
}

/// Parses `argv`, runs the command and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    0
                }
                _ => {
                    let text = e.to_string();
                    let line = text.lines().next().unwrap_or("invalid arguments");
                    eprintln!("{line}");
                    2
                }
            };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg);
            eprintln!("error: {msg}");
            e.exit_code()
        }
    }
}
