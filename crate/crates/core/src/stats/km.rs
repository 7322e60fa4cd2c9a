use serde::{Deserialize, Serialize};

use super::Observation;
use crate::error::{Error, Result};

/// One step of a product-limit curve, at a distinct observed time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmStep {
    pub time: f64,
    pub at_risk: usize,
    pub deaths: usize,
    pub censored: usize,
    /// Survival just after `time`.
    pub survival: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmCurve {
    pub steps: Vec<KmStep>,
}

impl KmCurve {
    /// Survival at time `t` (right-continuous).
    pub fn survival_at(&self, t: f64) -> f64 {
        self.steps
            .iter()
            .take_while(|s| s.time <= t)
            .last()
            .map_or(1.0, |s| s.survival)
    }

    pub fn censoring_times(&self) -> Vec<f64> {
        self.steps.iter().filter(|s| s.censored > 0).map(|s| s.time).collect()
    }
}

/// Kaplan-Meier curve with median and restricted mean survival.
#[derive(Debug, Clone, PartialEq)]
pub struct KmSummary {
    pub curve: KmCurve,
    pub n: usize,
    pub deaths: usize,
    /// First time with survival at or below 0.5.
    pub median: Option<f64>,
    /// Area under the curve up to the largest observed time.
    pub rmst: f64,
    pub rmst_se: f64,
    pub rmst_ci: (f64, f64),
}

/// Distinct times in increasing order with (deaths, censored) at each.
pub(crate) fn tally(obs: &[Observation]) -> Vec<(f64, usize, usize)> {
    let mut sorted: Vec<Observation> = obs.to_vec();
    sorted.sort_by(|a, b| a.time.total_cmp(&b.time));
    let mut out: Vec<(f64, usize, usize)> = Vec::new();
    for o in sorted {
        match out.last_mut() {
            Some(last) if last.0 == o.time => {
                if o.event {
                    last.1 += 1;
                } else {
                    last.2 += 1;
                }
            }
            _ => out.push((o.time, usize::from(o.event), usize::from(!o.event))),
        }
    }
    out
}

pub fn km_estimate(obs: &[Observation]) -> Result<KmSummary> {
    if obs.is_empty() {
        return Err(Error::InsufficientData("Kaplan-Meier on an empty group".into()));
    }
    let mut at_risk = obs.len();
    let mut s = 1.0;
    let mut steps = Vec::new();
    for (time, deaths, censored) in tally(obs) {
        if deaths > 0 {
            s *= (at_risk - deaths) as f64 / at_risk as f64;
        }
        steps.push(KmStep {
            time,
            at_risk,
            deaths,
            censored,
            survival: s,
        });
        at_risk -= deaths + censored;
    }
    let median = steps.iter().find(|st| st.survival <= 0.5).map(|st| st.time);
    let tmax = steps.last().map_or(0.0, |st| st.time);

    // area under S from 0 to tmax, and the tail area beyond each step
    let mut rmst = 0.0;
    let mut prev_t = 0.0;
    let mut prev_s = 1.0;
    for st in &steps {
        rmst += prev_s * (st.time - prev_t);
        prev_t = st.time;
        prev_s = st.survival;
    }
    let mut var = 0.0;
    let mut tail = 0.0;
    for i in (0..steps.len()).rev() {
        let st = steps[i];
        let next_t = steps.get(i + 1).map_or(tmax, |n| n.time);
        tail += st.survival * (next_t - st.time);
        if st.deaths > 0 && st.at_risk > st.deaths {
            let (n, d) = (st.at_risk as f64, st.deaths as f64);
            var += tail * tail * d / (n * (n - d));
        }
    }
    let se = var.sqrt();
    Ok(KmSummary {
        n: obs.len(),
        deaths: obs.iter().filter(|o| o.event).count(),
        median,
        rmst,
        rmst_se: se,
        rmst_ci: (rmst - 1.96 * se, rmst + 1.96 * se),
        curve: KmCurve { steps },
    })
}
