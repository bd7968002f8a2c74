//! Detection-rate and scaling-ratio models for the loop source and for
//! parametric down-conversion sources.

use alloc::vec::Vec;

use crate::error::arg_err;
use crate::{Error, Result};

/// Efficiencies of the source (`eta_s`), loop (`eta_l`), detectors
/// (`eta_d`), excitation/brightness (`eta_b`), fusion gate (`eta_g`) and the
/// single-photon repetition rate `rate_hz`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyBudget {
    pub rate_hz: f64,
    pub eta_d: f64,
    pub eta_s: f64,
    pub eta_l: f64,
    pub eta_b: f64,
    pub eta_g: f64,
}

/// Named budget presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// The loop experiment at its brightest setting.
    Paper,
    /// The loop experiment at reduced brightness (`eta_b = 0.04`).
    PaperDim,
    /// Unit efficiencies except the probabilistic gate (`eta_g = 0.5`).
    IdealGate,
    /// All efficiencies one.
    Deterministic,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Paper, Preset::PaperDim, Preset::IdealGate, Preset::Deterministic];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Paper => "paper",
            Preset::PaperDim => "paper-dim",
            Preset::IdealGate => "ideal-gate",
            Preset::Deterministic => "deterministic",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn budget(self) -> EfficiencyBudget {
        let paper = EfficiencyBudget {
            rate_hz: 81.0e6,
            eta_d: 0.25,
            eta_s: 0.7,
            eta_l: 0.75,
            eta_b: 0.15,
            eta_g: 0.5,
        };
        match self {
            Preset::Paper => paper,
            Preset::PaperDim => EfficiencyBudget { eta_b: 0.04, ..paper },
            Preset::IdealGate => EfficiencyBudget { rate_hz: 1.0, eta_g: 0.5, ..EfficiencyBudget::unit() },
            Preset::Deterministic => EfficiencyBudget::unit(),
        }
    }
}

impl EfficiencyBudget {
    /// All efficiencies one at 1 Hz.
    pub const fn unit() -> Self {
        Self { rate_hz: 1.0, eta_d: 1.0, eta_s: 1.0, eta_l: 1.0, eta_b: 1.0, eta_g: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rate_hz > 0.0 && self.rate_hz.is_finite()) {
            return Err(Error::Config(alloc::format!("repetition rate {} must be positive", self.rate_hz)));
        }
        for (name, v) in self.named() {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::Config(alloc::format!("{name} = {v} outside (0, 1]")));
            }
        }
        Ok(())
    }

    /// `(name, value)` of each efficiency.
    pub fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("eta_d", self.eta_d),
            ("eta_s", self.eta_s),
            ("eta_l", self.eta_l),
            ("eta_b", self.eta_b),
            ("eta_g", self.eta_g),
        ]
    }

    /// Efficiency of delivering one photon to a detector (gate excluded).
    pub fn photon_efficiency(&self) -> f64 {
        self.eta_d * self.eta_s * self.eta_l * self.eta_b
    }
}

/// `R_n = R (η_d η_s η_l η_b)ⁿ η_g^{n−1}`.
pub fn detection_rate(budget: &EfficiencyBudget, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(arg_err!("detection rate needs n >= 1"));
    }
    budget.validate()?;
    Ok(budget.rate_hz * libm::pow(budget.photon_efficiency(), n as f64) * libm::pow(budget.eta_g, (n - 1) as f64))
}

/// `r = R_n / R_{n+1} = (η_d η_s η_l η_b η_g)^{−1}`.
pub fn scaling_ratio(budget: &EfficiencyBudget) -> Result<f64> {
    budget.validate()?;
    Ok(1.0 / (budget.photon_efficiency() * budget.eta_g))
}

/// Down-conversion source with interaction strength `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdcSource {
    tau: f64,
}

impl PdcSource {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(arg_err!("interaction parameter {tau} must be finite and non-negative"));
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Squeezing parameter `λ = tanh τ`.
    pub fn lambda(&self) -> f64 {
        libm::tanh(self.tau)
    }
}

/// Pair emission probability `tanh²τ`.
pub fn pdc_pair_probability(src: &PdcSource) -> f64 {
    let l = src.lambda();
    l * l
}

/// `V₂ = (1 − tanh²τ)/(1 + tanh²τ)`.
pub fn pdc_visibility(src: &PdcSource) -> f64 {
    let p = pdc_pair_probability(src);
    (1.0 - p) / (1.0 + p)
}

/// `r = (1 + V₂)/(1 − V₂)`, doubled for a gate with `η_g = ½`.
pub fn pdc_scaling_ratio(v2: f64, include_gate: bool) -> Result<f64> {
    if v2 == 1.0 {
        return Err(Error::SingularLimit("unit visibility needs vanishing pair probability"));
    }
    if !(v2 > 0.0 && v2 < 1.0) {
        return Err(arg_err!("two-photon visibility {v2} outside (0, 1)"));
    }
    let r = (1.0 + v2) / (1.0 - v2);
    Ok(if include_gate { 2.0 * r } else { r })
}

/// Probabilistic-gate floor on the scaling ratio.
pub const GATE_FLOOR: f64 = 2.0;

/// One row of the visibility/scaling-ratio comparison curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub v2: f64,
    pub r_pdc_gate: f64,
    pub r_gate_floor: f64,
}

/// A budget plotted as a point at its two-photon visibility.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetPoint {
    pub label: alloc::string::String,
    pub v2: f64,
    pub r: f64,
}

/// Curve rows for each `v2` in the grid.
pub fn fig4b_curves(grid: &[f64]) -> Result<Vec<CurveRow>> {
    if grid.is_empty() {
        return Err(Error::EmptyData("visibility grid"));
    }
    grid.iter()
        .map(|&v2| {
            Ok(CurveRow { v2, r_pdc_gate: pdc_scaling_ratio(v2, true)?, r_gate_floor: GATE_FLOOR })
        })
        .collect()
}

/// Point for `budget` at `v2`, plus the same budget with detector efficiency
/// replaced by `eta_d_extrapolated` when given.
pub fn budget_points(
    label: &str,
    budget: &EfficiencyBudget,
    v2: f64,
    eta_d_extrapolated: Option<f64>,
) -> Result<Vec<BudgetPoint>> {
    let mut out = alloc::vec![BudgetPoint { label: label.into(), v2, r: scaling_ratio(budget)? }];
    if let Some(eta_d) = eta_d_extrapolated {
        let b = EfficiencyBudget { eta_d, ..*budget };
        out.push(BudgetPoint { label: alloc::format!("{label} (eta_d={eta_d})"), v2, r: scaling_ratio(&b)? });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn unit_budget() {
        for n in 1..6 {
            assert_abs_diff_eq!(detection_rate(&EfficiencyBudget::unit(), n).unwrap(), 1.0);
        }
        assert_abs_diff_eq!(scaling_ratio(&EfficiencyBudget::unit()).unwrap(), 1.0);
        assert_abs_diff_eq!(scaling_ratio(&Preset::IdealGate.budget()).unwrap(), 2.0);
    }

    #[test]
    fn paper_budget_ratio() {
        let b = Preset::Paper.budget();
        let r = scaling_ratio(&b).unwrap();
        assert_abs_diff_eq!(r, 101.587_301_587, epsilon = 1e-6);
        let r23 = detection_rate(&b, 2).unwrap() / detection_rate(&b, 3).unwrap();
        assert_relative_eq!(r23, r, max_relative = 1e-12);
        for measured in [480.0 / 4.3, 4.3 / 0.04] {
            assert!((measured - r).abs() / r < 0.25);
        }
    }

    #[test]
    fn n_independence() {
        let b = EfficiencyBudget { rate_hz: 3.0e7, eta_d: 0.4, eta_s: 0.9, eta_l: 0.6, eta_b: 0.3, eta_g: 0.5 };
        let r = scaling_ratio(&b).unwrap();
        for n in 1..=10 {
            let q = detection_rate(&b, n).unwrap() / detection_rate(&b, n + 1).unwrap();
            assert_relative_eq!(q, r, max_relative = 1e-12);
        }
    }

    #[test]
    fn budget_validation() {
        let mut b = Preset::Paper.budget();
        b.eta_l = 0.0;
        assert!(matches!(scaling_ratio(&b), Err(Error::Config(_))));
        b.eta_l = 1.2;
        assert!(scaling_ratio(&b).is_err());
        assert!(detection_rate(&Preset::Paper.budget(), 0).is_err());
    }

    #[test]
    fn pdc_relations() {
        assert_abs_diff_eq!(pdc_pair_probability(&PdcSource::new(0.0).unwrap()), 0.0);
        assert_abs_diff_eq!(pdc_visibility(&PdcSource::new(0.0).unwrap()), 1.0);
        assert_abs_diff_eq!(pdc_pair_probability(&PdcSource::new(0.5).unwrap()), 0.213_552_267_034, epsilon = 1e-11);
        assert!(pdc_pair_probability(&PdcSource::new(20.0).unwrap()) > 1.0 - 1e-12);
        assert_abs_diff_eq!(pdc_scaling_ratio(1.0 / 3.0, false).unwrap(), 2.0, epsilon = 1e-14);
        assert!(matches!(pdc_scaling_ratio(1.0, true), Err(Error::SingularLimit(_))));
        for k in 1..=20 {
            let src = PdcSource::new(0.25 * k as f64).unwrap();
            let v = pdc_visibility(&src);
            if v < 1.0 {
                let r = pdc_scaling_ratio(v, false).unwrap();
                assert_relative_eq!(r * pdc_pair_probability(&src), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn fig4b_points() {
        let rows = fig4b_curves(&[0.5, 0.76]).unwrap();
        assert_abs_diff_eq!(rows[0].r_pdc_gate, 6.0, epsilon = 1e-12);
        assert!(rows.iter().all(|r| r.r_gate_floor == 2.0));
        let pts = budget_points("this work", &Preset::Paper.budget(), 0.76, Some(0.9)).unwrap();
        assert_abs_diff_eq!(pts[0].r, 101.587, epsilon = 1e-3);
        assert_abs_diff_eq!(pts[1].r, 101.587_301_587 * 0.25 / 0.9, epsilon = 1e-6);
        assert_abs_diff_eq!(pts[1].r, 28.2, epsilon = 0.05);
        assert!(fig4b_curves(&[]).is_err());
    }

    #[test]
    fn preset_names() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
        assert_eq!(Preset::from_name("nope"), None);
    }
}
