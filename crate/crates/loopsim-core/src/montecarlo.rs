//! Event-level simulation of the loop experiment's detection pipeline.
//!
//! Each shot plays one excitation sequence: photons are emitted per open
//! time bin, routed through the loop (entry, fusion, exit), assigned
//! polarisation outcomes drawn from the exact chain distribution, detected
//! with finite efficiency and dead time, and mixed with background clicks.
//! Coincidences are counted per outcome pattern.
//!
//! Randomness comes from ChaCha8 keyed by the run seed, with stream `2·shot`
//! for photon events and `2·shot + 1` for background, so a shot's outcome
//! does not depend on thread scheduling and runs with and without
//! background are paired shot by shot.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::analysis::{pattern_label, MeasurementPlan};
use crate::error::arg_err;
use crate::protocol::{build_chain, NoiseModel};
use crate::qcore::{MeasurementBasis, Pauli, PauliString, MAX_MIXED_QUBITS, MAX_PURE_QUBITS};
use crate::scaling::EfficiencyBudget;
use crate::{Error, Result};

/// Loop round-trip time in nanoseconds.
pub const DEFAULT_BIN_NS: f64 = 74.0;
/// Laser pulses per loop round trip.
pub const DEFAULT_PULSES_PER_BIN: u32 = 6;
/// Excitation laser period in nanoseconds.
pub const DEFAULT_LASER_PERIOD_NS: f64 = 12.3;
/// Detector dead time in nanoseconds.
pub const DEFAULT_DEAD_TIME_NS: f64 = 60.0;
/// Number of analysis detectors.
pub const DETECTORS: usize = 2;
/// Coincidence window width in nanoseconds.
pub const DEFAULT_WINDOW_NS: f64 = 5.0;
/// Continuous background relative to the photon click rate.
pub const DEFAULT_CW_FRACTION: f64 = 0.10;
/// Residual transmission of a closed modulator bin.
pub const DEFAULT_EXTINCTION: f64 = 0.01;

/// Relative mismatch tolerated between bin length and pulses × laser period.
const TIMING_TOLERANCE: f64 = 0.02;

/// Modulator pattern over loop time bins, e.g. `1100`.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSequence {
    pattern: Vec<bool>,
    bin_ns: f64,
    pulses_per_bin: u32,
    laser_period_ns: f64,
}

impl PulseSequence {
    /// Parses a `0`/`1` pattern with default timing. The pattern needs at
    /// least one open bin and must end in at least two closed bins.
    pub fn parse(pattern: &str) -> Result<Self> {
        let bits = pattern
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(Error::Config(alloc::format!("invalid pattern symbol {other:?} in {pattern:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_bits(bits)
    }

    pub fn from_bits(pattern: Vec<bool>) -> Result<Self> {
        if !pattern.iter().any(|&b| b) {
            return Err(Error::Config("pulse pattern has no open bin".into()));
        }
        let trailing = pattern.iter().rev().take_while(|&&b| !b).count();
        if trailing < 2 {
            return Err(Error::Config(alloc::format!(
                "pulse pattern must end with at least two closed bins, found {trailing}"
            )));
        }
        Ok(Self {
            pattern,
            bin_ns: DEFAULT_BIN_NS,
            pulses_per_bin: DEFAULT_PULSES_PER_BIN,
            laser_period_ns: DEFAULT_LASER_PERIOD_NS,
        })
    }

    /// Sets explicit timing; `pulses_per_bin × laser_period_ns` must match
    /// `bin_ns` within 2 %.
    pub fn with_timing(mut self, bin_ns: f64, pulses_per_bin: u32, laser_period_ns: f64) -> Result<Self> {
        if !(bin_ns > 0.0 && bin_ns.is_finite()) || pulses_per_bin == 0 || laser_period_ns.is_nan() || laser_period_ns <= 0.0 {
            return Err(Error::Config("bin length, pulses per bin and laser period must be positive".into()));
        }
        let mismatch = (pulses_per_bin as f64 * laser_period_ns - bin_ns).abs() / bin_ns;
        if mismatch > TIMING_TOLERANCE {
            return Err(Error::Config(alloc::format!(
                "{pulses_per_bin} pulses of {laser_period_ns} ns do not fill a {bin_ns} ns bin"
            )));
        }
        self.bin_ns = bin_ns;
        self.pulses_per_bin = pulses_per_bin;
        self.laser_period_ns = laser_period_ns;
        Ok(self)
    }

    /// Rescales the bin length, keeping the pulse count per bin.
    pub fn with_bin_ns(self, bin_ns: f64) -> Result<Self> {
        let ppb = self.pulses_per_bin;
        self.with_timing(bin_ns, ppb, bin_ns / ppb as f64)
    }

    /// The canonical `1…100` pattern for `n` photons.
    pub fn for_photons(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(arg_err!("need at least one photon"));
        }
        let mut bits = vec![true; n];
        bits.extend([false, false]);
        Self::from_bits(bits)
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn pattern_string(&self) -> alloc::string::String {
        self.pattern.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn bins(&self) -> usize {
        self.pattern.len()
    }

    /// Number of open bins.
    pub fn photons(&self) -> usize {
        self.pattern.iter().filter(|&&b| b).count()
    }

    pub fn bin_ns(&self) -> f64 {
        self.bin_ns
    }

    pub fn pulses_per_bin(&self) -> u32 {
        self.pulses_per_bin
    }

    pub fn laser_period_ns(&self) -> f64 {
        self.laser_period_ns
    }

    /// Coincidence bins for an `n`-photon readout: the exit bins of photons
    /// `1..n−1` (the bins of the following open pulses) and the two bins in
    /// which the last photon can leave the loop.
    pub fn coincidence_bins(&self) -> Vec<usize> {
        let open: Vec<usize> = (0..self.bins()).filter(|&t| self.pattern[t]).collect();
        let last = *open.last().expect("pattern has an open bin");
        let mut bins: Vec<usize> = open[1..].to_vec();
        bins.extend([last + 1, last + 2]);
        bins
    }

    /// Variant with the `k`-th open bin (1-based) closed.
    pub fn with_closed(&self, k: usize) -> Result<Self> {
        let idx = (0..self.bins())
            .filter(|&t| self.pattern[t])
            .nth(k.wrapping_sub(1))
            .ok_or_else(|| arg_err!("pattern has no open bin number {k}"))?;
        let mut s = self.clone();
        s.pattern[idx] = false;
        Ok(s)
    }
}

/// Threshold detectors with a common efficiency and non-paralysable dead
/// time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorModel {
    pub efficiency: f64,
    pub dead_time_ns: f64,
}

impl DetectorModel {
    pub fn new(efficiency: f64, dead_time_ns: f64) -> Result<Self> {
        if !(efficiency > 0.0 && efficiency <= 1.0) {
            return Err(Error::Config(alloc::format!("detector efficiency {efficiency} outside (0, 1]")));
        }
        if !(dead_time_ns >= 0.0 && dead_time_ns.is_finite()) {
            return Err(Error::Config(alloc::format!("dead time {dead_time_ns} must be non-negative")));
        }
        Ok(Self { efficiency, dead_time_ns })
    }

    pub fn from_budget(budget: &EfficiencyBudget) -> Self {
        Self { efficiency: budget.eta_d, dead_time_ns: DEFAULT_DEAD_TIME_NS }
    }
}

/// Continuous background and modulator leakage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundModel {
    /// Accidental n-fold coincidences from continuous background, relative
    /// to true n-folds, for a dim source (the per-window click probability
    /// is calibrated from the pulse pattern).
    pub cw_fraction: f64,
    /// Emission probability of a closed bin relative to an open one.
    pub extinction: f64,
    pub window_ns: f64,
}

impl BackgroundModel {
    pub fn new(cw_fraction: f64, extinction: f64, window_ns: f64) -> Result<Self> {
        for (name, v) in [("cw background fraction", cw_fraction), ("extinction", extinction)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::Config(alloc::format!("{name} {v} outside [0, 1)")));
            }
        }
        if !(window_ns > 0.0 && window_ns.is_finite()) {
            return Err(Error::Config(alloc::format!("coincidence window {window_ns} must be positive")));
        }
        Ok(Self { cw_fraction, extinction, window_ns })
    }

    /// No background and perfect extinction.
    pub const fn none() -> Self {
        Self { cw_fraction: 0.0, extinction: 0.0, window_ns: DEFAULT_WINDOW_NS }
    }
}

impl Default for BackgroundModel {
    fn default() -> Self {
        Self { cw_fraction: DEFAULT_CW_FRACTION, extinction: DEFAULT_EXTINCTION, window_ns: DEFAULT_WINDOW_NS }
    }
}

/// Everything a run needs besides shots and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloConfig {
    pub sequence: PulseSequence,
    pub noise: NoiseModel,
    pub budget: EfficiencyBudget,
    pub detector: DetectorModel,
    pub background: BackgroundModel,
    pub phi: f64,
}

impl MonteCarloConfig {
    /// Budget-derived detector, default background.
    pub fn new(sequence: PulseSequence, noise: NoiseModel, budget: EfficiencyBudget, phi: f64) -> Self {
        Self {
            sequence,
            noise,
            detector: DetectorModel::from_budget(&budget),
            budget,
            background: BackgroundModel::default(),
            phi,
        }
    }
}

/// One detector click.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub detector: u8,
    /// Loop time bin the click is assigned to.
    pub bin: usize,
    /// Absolute time within the sequence in nanoseconds.
    pub time_ns: f64,
    pub sequence: u64,
}

/// Coincidence counts per outcome pattern (photon 1 most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoincidenceTally {
    pub photons: usize,
    pub counts: Vec<u64>,
    pub shots: u64,
    pub seed: u64,
}

impl CoincidenceTally {
    pub fn empty(photons: usize, seed: u64) -> Self {
        Self { photons, counts: vec![0; 1 << photons], shots: 0, seed }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count(&self, label: &str) -> Result<u64> {
        let i = crate::analysis::pattern_index(label)?;
        self.counts.get(i).copied().ok_or_else(|| arg_err!("label {label:?} has the wrong length"))
    }

    /// Merges a tally of disjoint shots from the same run.
    pub fn merge(&mut self, other: &CoincidenceTally) -> Result<()> {
        if other.photons != self.photons {
            return Err(arg_err!("cannot merge {}- and {}-photon tallies", self.photons, other.photons));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.shots += other.shots;
        Ok(())
    }

    /// `(label, count)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (alloc::string::String, u64)> + '_ {
        self.counts.iter().enumerate().map(|(i, &c)| (pattern_label(i, self.photons), c))
    }
}

/// Counts with per-pattern variance estimates.
#[derive(Debug, Clone, PartialEq)]
pub struct Counts {
    pub values: Vec<f64>,
    pub variances: Vec<f64>,
    /// Some background-corrected count is negative.
    pub has_negative: bool,
}

impl From<&CoincidenceTally> for Counts {
    fn from(t: &CoincidenceTally) -> Self {
        let values: Vec<f64> = t.counts.iter().map(|&c| c as f64).collect();
        Self { variances: values.clone(), values, has_negative: false }
    }
}

/// `N_i = N_i^meas − Σ_k N_{i,k}^bg`, keeping negative values; Poisson
/// variances add.
pub fn subtract_background(meas: &CoincidenceTally, bgs: &[CoincidenceTally]) -> Result<Counts> {
    let mut out = Counts::from(meas);
    for bg in bgs {
        if bg.counts.len() != meas.counts.len() {
            return Err(arg_err!(
                "background tally has {} patterns, measurement has {}",
                bg.counts.len(),
                meas.counts.len()
            ));
        }
        for (i, &c) in bg.counts.iter().enumerate() {
            out.values[i] -= c as f64;
            out.variances[i] += c as f64;
        }
    }
    out.has_negative = out.values.iter().any(|&v| v < 0.0);
    Ok(out)
}

/// Visibility estimate with first-order Poisson error:
/// `V = Σ s_i N_i / Σ N_i`, `σ = √(Σ var_i) / Σ N_i`.
pub fn visibility_with_errors(counts: &Counts, observable: &PauliString) -> Result<(f64, f64)> {
    if observable.letters().iter().any(|l| !matches!(l, Pauli::X | Pauli::I)) {
        return Err(arg_err!("tallies are recorded in the diagonal basis; observable {observable} needs other letters"));
    }
    let plan = MeasurementPlan::new(observable.clone())?;
    let signs = plan.signs();
    if signs.len() != counts.values.len() {
        return Err(arg_err!("{}-photon observable for a {}-pattern tally", observable.len(), counts.values.len()));
    }
    let total: f64 = counts.values.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyData("no coincidences"));
    }
    let signed: f64 = signs.iter().zip(&counts.values).map(|(s, n)| s * n).sum();
    let var: f64 = counts.variances.iter().sum();
    Ok((signed / total, libm::sqrt(var) / total))
}

/// Precomputed run: outcome distributions and derived probabilities.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: MonteCarloConfig,
    photons: usize,
    windows: Vec<usize>,
    /// Cumulative outcome distributions of chains of length `m` (index m).
    cumulative: Vec<Option<Vec<f64>>>,
    emit_open: f64,
    emit_closed: f64,
    survive: f64,
    background_click: f64,
}

struct Chain {
    exits: Vec<usize>,
    first_twin: bool,
    /// Last photon re-entered the loop after a `v` outcome.
    carried: bool,
}

struct Hit {
    detector: u8,
    bin: usize,
    time_ns: f64,
}

#[inline]
fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[inline]
fn coin(rng: &mut ChaCha8Rng) -> bool {
    rng.next_u64() >> 63 == 1
}

impl Simulator {
    /// Simulator whose coincidence windows follow the configured pattern.
    pub fn new(cfg: MonteCarloConfig) -> Result<Self> {
        let parent = cfg.sequence.clone();
        Self::with_parent(cfg, &parent)
    }

    /// Simulator whose coincidence windows (and photon count) follow
    /// `parent`, as for background runs with one bin closed.
    pub fn with_parent(cfg: MonteCarloConfig, parent: &PulseSequence) -> Result<Self> {
        cfg.budget.validate()?;
        let photons = parent.photons();
        if photons < 2 {
            return Err(Error::Config("coincidences need at least two photons".into()));
        }
        if parent.bins() != cfg.sequence.bins() {
            return Err(Error::Config("background pattern length differs from the measurement pattern".into()));
        }
        let windows = parent.coincidence_bins();
        let limit = if cfg.noise.is_coherent() { MAX_PURE_QUBITS } else { MAX_MIXED_QUBITS };
        if photons > limit {
            return Err(Error::Capacity { requested: photons, limit });
        }
        // Leaked pulses can make chains longer than the pattern; those use
        // the exact distribution while it fits, uniform outcomes beyond.
        let longest = cfg.sequence.bins().min(limit);
        let mut cumulative = vec![None; longest + 1];
        for (m, slot) in cumulative.iter_mut().enumerate().skip(2) {
            let leaked = m > cfg.sequence.photons().max(photons);
            if leaked && cfg.background.extinction == 0.0 {
                continue;
            }
            *slot = Some(outcome_cdf(m, cfg.phi, &cfg.noise)?);
        }
        let b = &cfg.budget;
        let survive = b.eta_s * b.eta_l;
        let background_click = if cfg.background.cw_fraction > 0.0 {
            let single = b.eta_b * survive * cfg.detector.efficiency;
            cfg.background.cw_fraction * single * accidental_calibration(&cfg, parent)?
        } else {
            0.0
        };
        Ok(Self {
            photons,
            windows,
            cumulative,
            emit_open: b.eta_b,
            emit_closed: b.eta_b * cfg.background.extinction,
            survive,
            background_click,
            cfg,
        })
    }

    pub fn config(&self) -> &MonteCarloConfig {
        &self.cfg
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    fn base_rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn stream(base: &ChaCha8Rng, stream: u64) -> ChaCha8Rng {
        let mut r = base.clone();
        r.set_stream(stream);
        r
    }

    fn sample_pattern(&self, m: usize, first_twin: bool, rng: &mut ChaCha8Rng) -> usize {
        let misrouted = first_twin && coin(rng);
        let u = uniform(rng);
        match self.cumulative.get(m).and_then(Option::as_ref) {
            Some(cdf) if !misrouted => cdf.partition_point(|&c| c <= u).min(cdf.len() - 1),
            _ => ((u * (1u64 << m) as f64) as usize).min((1 << m) - 1),
        }
    }

    /// Photon clicks of one shot before detection losses.
    fn photon_hits(&self, rng: &mut ChaCha8Rng, hits: &mut Vec<Hit>) {
        let bins = self.cfg.sequence.bins();
        let g2 = self.cfg.noise.g2();
        let mut chain: Option<Chain> = None;
        let push = |hits: &mut Vec<Hit>, bin: usize, detector: u8| {
            if bin < bins {
                hits.push(Hit { detector, bin, time_ns: bin as f64 * self.cfg.sequence.bin_ns });
            }
        };
        for t in 0..bins {
            let p_emit = if self.cfg.sequence.pattern[t] { self.emit_open } else { self.emit_closed };
            let emitted = p_emit > 0.0 && uniform(rng) < p_emit;
            let twin = emitted && g2 > 0.0 && uniform(rng) < g2;
            let fresh = emitted && uniform(rng) < self.survive;
            match chain.as_mut() {
                None => {
                    if fresh {
                        if coin(rng) {
                            chain = Some(Chain { exits: Vec::new(), first_twin: twin, carried: false });
                        } else {
                            push(hits, t, coin(rng) as u8);
                        }
                    }
                }
                Some(c) if fresh => {
                    if coin(rng) {
                        c.exits.push(t);
                        c.carried = false;
                    } else {
                        // Failed fusion: both photons leave together.
                        let m = c.exits.len() + 1;
                        let j = self.sample_pattern(m, c.first_twin, rng);
                        for (i, &bin) in c.exits.iter().enumerate() {
                            push(hits, bin, ((j >> (m - 1 - i)) & 1) as u8);
                        }
                        push(hits, t, coin(rng) as u8);
                        push(hits, t, coin(rng) as u8);
                        chain = None;
                    }
                }
                Some(c) if c.carried => {
                    push(hits, t, coin(rng) as u8);
                    chain = None;
                }
                Some(c) => {
                    let m = c.exits.len() + 1;
                    let j = self.sample_pattern(m, c.first_twin, rng);
                    for (i, &bin) in c.exits.iter().enumerate() {
                        push(hits, bin, ((j >> (m - 1 - i)) & 1) as u8);
                    }
                    if j & 1 == 0 {
                        push(hits, t, coin(rng) as u8);
                        chain = None;
                    } else {
                        // `v`: one more round trip; the photon leaves at t+1
                        // unless a fresh photon arrives to fuse with it.
                        chain = Some(Chain { exits: Vec::new(), first_twin: false, carried: true });
                    }
                }
            }
        }
        // Photons still circulating at the end of the sequence are lost,
        // but their exited partners were detected.
        if let Some(c) = chain {
            if !c.carried && !c.exits.is_empty() {
                let m = c.exits.len() + 1;
                let j = self.sample_pattern(m, c.first_twin, rng);
                for (i, &bin) in c.exits.iter().enumerate() {
                    push(hits, bin, ((j >> (m - 1 - i)) & 1) as u8);
                }
            }
        }
    }

    /// Number of ways one background click turns the photon clicks of a
    /// shot into an n-fold coincidence: all readout slots but one hold
    /// exactly one click, and the empty slot offers its windows.
    fn completion_weight(&self, hits: &[Hit]) -> u32 {
        let n = self.photons;
        let half = self.cfg.background.window_ns / 2.0;
        let bin_ns = self.cfg.sequence.bin_ns;
        let in_window = |h: &Hit, bin: usize| (h.time_ns - bin as f64 * bin_ns).abs() <= half;
        let mut empty = None;
        for slot in 0..n {
            let bins: &[usize] = if slot + 1 < n { &self.windows[slot..=slot] } else { &self.windows[n - 1..=n] };
            match hits.iter().filter(|h| bins.iter().any(|&b| in_window(h, b))).count() {
                0 if empty.is_none() => empty = Some(bins.len() as u32),
                1 => {}
                _ => return 0,
            }
        }
        empty.unwrap_or(0)
    }

    fn background_hits(&self, rng: &mut ChaCha8Rng, hits: &mut Vec<Hit>) {
        if self.background_click <= 0.0 {
            return;
        }
        let w = self.cfg.background.window_ns;
        for &bin in &self.windows {
            if uniform(rng) < self.background_click {
                let time_ns = bin as f64 * self.cfg.sequence.bin_ns + (uniform(rng) - 0.5) * w;
                hits.push(Hit { detector: coin(rng) as u8, bin, time_ns });
            }
        }
    }

    /// Detected clicks of one shot after efficiency, bucket merging and dead
    /// time, sorted by time.
    fn detected(&self, base: &ChaCha8Rng, shot: u64) -> Vec<Hit> {
        let mut rng = Self::stream(base, 2 * shot);
        let mut raw = Vec::new();
        self.photon_hits(&mut rng, &mut raw);
        let eff = self.cfg.detector.efficiency;
        let mut hits: Vec<Hit> = raw.into_iter().filter(|_| eff >= 1.0 || uniform(&mut rng) < eff).collect();
        let mut bg = Self::stream(base, 2 * shot + 1);
        self.background_hits(&mut bg, &mut hits);
        hits.sort_by(|a, b| a.detector.cmp(&b.detector).then(a.time_ns.total_cmp(&b.time_ns)));
        let dead = self.cfg.detector.dead_time_ns;
        let mut kept: Vec<Hit> = Vec::with_capacity(hits.len());
        for h in hits {
            if let Some(last) = kept.last() {
                if last.detector == h.detector && (h.time_ns == last.time_ns || h.time_ns - last.time_ns < dead) {
                    continue;
                }
            }
            kept.push(h);
        }
        kept.sort_by(|a, b| a.time_ns.total_cmp(&b.time_ns).then(a.detector.cmp(&b.detector)));
        kept
    }

    /// Outcome pattern of a shot, if it produced an n-fold coincidence.
    pub fn shot_outcome(&self, base: &ChaCha8Rng, shot: u64) -> Option<usize> {
        let hits = self.detected(base, shot);
        let n = self.photons;
        if hits.len() < n {
            return None;
        }
        let half = self.cfg.background.window_ns / 2.0;
        let bin_ns = self.cfg.sequence.bin_ns;
        let in_window = |h: &Hit, bin: usize| (h.time_ns - bin as f64 * bin_ns).abs() <= half;
        let mut index = 0usize;
        for &bin in &self.windows[..n - 1] {
            let mut found = hits.iter().filter(|h| in_window(h, bin));
            let first = found.next()?;
            if found.next().is_some() {
                return None;
            }
            index = (index << 1) | first.detector as usize;
        }
        let (h_bin, v_bin) = (self.windows[n - 1], self.windows[n]);
        let mut last = hits.iter().filter_map(|h| {
            if in_window(h, h_bin) {
                Some(0)
            } else if in_window(h, v_bin) {
                Some(1)
            } else {
                None
            }
        });
        let bit = last.next()?;
        if last.next().is_some() {
            return None;
        }
        Some((index << 1) | bit)
    }

    /// Clicks of one shot, for inspection.
    pub fn shot_events(&self, seed: u64, shot: u64) -> Vec<EventRecord> {
        let base = Self::base_rng(seed);
        self.detected(&base, shot)
            .into_iter()
            .map(|h| EventRecord { detector: h.detector, bin: h.bin, time_ns: h.time_ns, sequence: shot })
            .collect()
    }

    /// Tally of the shots in `range`.
    pub fn run_range(&self, seed: u64, range: Range<u64>) -> CoincidenceTally {
        let base = Self::base_rng(seed);
        let mut tally = CoincidenceTally::empty(self.photons, seed);
        tally.shots = range.end.saturating_sub(range.start);
        for shot in range {
            if let Some(j) = self.shot_outcome(&base, shot) {
                tally.counts[j] += 1;
            }
        }
        tally
    }

    /// Tally of shots `0..shots`.
    pub fn run(&self, shots: u64, seed: u64) -> Result<CoincidenceTally> {
        if shots == 0 {
            return Err(arg_err!("need at least one shot"));
        }
        Ok(self.run_range(seed, 0..shots))
    }
}

/// Shots of the pilot runs that calibrate the continuous background.
const CALIBRATION_SHOTS: u64 = 1 << 15;
const CALIBRATION_SEED: u64 = 0x6c6f_6f70;

/// Ratio of true n-fold coincidences to single-click completions by one
/// background click, both to leading order in the photon efficiency.
///
/// Pilot runs at unit efficiencies give the conditional probabilities: the
/// true n-fold rate of the full pattern, and for every pattern with one open
/// bin closed, the expected number of windows in which a single stray click
/// would complete an n-fold. Scaling the per-window click probability by
/// this ratio makes `cw_fraction` the accidental share of coincidences of a
/// dim source, independent of the pattern.
fn accidental_calibration(cfg: &MonteCarloConfig, parent: &PulseSequence) -> Result<f64> {
    let mut unit = cfg.clone();
    unit.sequence = parent.clone().with_timing(cfg.sequence.bin_ns, cfg.sequence.pulses_per_bin, cfg.sequence.laser_period_ns)?;
    unit.budget.eta_b = 1.0;
    unit.budget.eta_s = 1.0;
    unit.budget.eta_l = 1.0;
    unit.budget.eta_d = 1.0;
    unit.detector.efficiency = 1.0;
    unit.background = BackgroundModel { cw_fraction: 0.0, extinction: 0.0, ..cfg.background };
    let base = Simulator::base_rng(CALIBRATION_SEED);
    let full = Simulator::new(unit.clone())?;
    let true_folds = (0..CALIBRATION_SHOTS).filter(|&s| full.shot_outcome(&base, s).is_some()).count() as f64;
    let mut completions = 0.0;
    for k in 1..=parent.photons() {
        let seq = unit.sequence.with_closed(k)?;
        let sim = Simulator::with_parent(MonteCarloConfig { sequence: seq, ..unit.clone() }, &unit.sequence)?;
        completions += (0..CALIBRATION_SHOTS)
            .map(|s| sim.completion_weight(&sim.detected(&base, s)) as f64)
            .sum::<f64>();
    }
    if true_folds == 0.0 || completions == 0.0 {
        return Err(Error::Config("background calibration found no coincidences".into()));
    }
    Ok(true_folds / completions)
}

/// Cumulative X-basis outcome distribution of an `m`-photon chain.
fn outcome_cdf(m: usize, phi: f64, noise: &NoiseModel) -> Result<Vec<f64>> {
    let chain = build_chain(m, phi, noise)?;
    let state = chain.state().ok_or(Error::ProtocolOrder("empty chain"))?;
    let pops = state.basis_populations(&vec![MeasurementBasis::PM; m])?;
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = pops
        .iter()
        .map(|p| {
            acc += p.max(0.0);
            acc
        })
        .collect();
    let total = acc;
    cdf.iter_mut().for_each(|c| *c /= total);
    Ok(cdf)
}

/// Runs a configuration for `shots` sequences.
pub fn run_sequence(cfg: &MonteCarloConfig, shots: u64, seed: u64) -> Result<CoincidenceTally> {
    Simulator::new(cfg.clone())?.run(shots, seed)
}

/// Seed of the `k`-th background run derived from the measurement seed.
pub fn background_seed(seed: u64, k: usize) -> u64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream((1 << 63) | k as u64);
    r.next_u64()
}

/// Simulators for the background runs: one per open bin, with that bin
/// closed and the coincidence windows of the full pattern.
pub fn background_simulators(cfg: &MonteCarloConfig) -> Result<Vec<Simulator>> {
    (1..=cfg.sequence.photons())
        .map(|k| {
            let seq = cfg.sequence.with_closed(k)?;
            Simulator::with_parent(MonteCarloConfig { sequence: seq, ..cfg.clone() }, &cfg.sequence)
        })
        .collect()
}

/// Background tallies `k = 1..n` for a measurement configuration.
pub fn background_runs(cfg: &MonteCarloConfig, shots: u64, seed: u64) -> Result<Vec<CoincidenceTally>> {
    background_simulators(cfg)?
        .iter()
        .enumerate()
        .map(|(i, sim)| sim.run(shots, background_seed(seed, i + 1)))
        .collect()
}
