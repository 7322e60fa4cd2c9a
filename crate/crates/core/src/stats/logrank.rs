use serde::{Deserialize, Serialize};

use super::linalg::{solve, symmetric_eigen};
use super::{chi_square_sf, Observation};
use crate::error::{Error, Result};

/// Result of a k-group log-rank test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRank {
    pub statistic: f64,
    pub df: usize,
    pub p: f64,
    /// Observed deaths per group.
    pub observed: Vec<f64>,
    /// Expected deaths per group under the null.
    pub expected: Vec<f64>,
    /// Set when there were no events and `p = 1` by convention.
    pub flagged: bool,
}

/// Observed, expected and the hypergeometric covariance of `O - E`.
fn oe_table(groups: &[&[Observation]]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let k = groups.len();
    let mut all: Vec<(f64, usize, bool)> = Vec::new();
    for (g, obs) in groups.iter().enumerate() {
        all.extend(obs.iter().map(|o| (o.time, g, o.event)));
    }
    all.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut at_risk: Vec<f64> = groups.iter().map(|g| g.len() as f64).collect();
    let mut observed = vec![0.0; k];
    let mut expected = vec![0.0; k];
    let mut var = vec![0.0; k * k];
    let mut i = 0;
    while i < all.len() {
        let t = all[i].0;
        let mut j = i;
        let mut deaths = vec![0.0; k];
        let mut leaving = vec![0.0; k];
        while j < all.len() && all[j].0 == t {
            let (_, g, e) = all[j];
            leaving[g] += 1.0;
            if e {
                deaths[g] += 1.0;
            }
            j += 1;
        }
        let d: f64 = deaths.iter().sum();
        let n: f64 = at_risk.iter().sum();
        if d > 0.0 {
            for g in 0..k {
                observed[g] += deaths[g];
                expected[g] += d * at_risk[g] / n;
            }
            if n > 1.0 {
                let f = d * (n - d) / (n * n * (n - 1.0));
                for a in 0..k {
                    for b in 0..k {
                        let delta = if a == b { at_risk[a] * n } else { 0.0 };
                        var[a * k + b] += f * (delta - at_risk[a] * at_risk[b]);
                    }
                }
            }
        }
        for g in 0..k {
            at_risk[g] -= leaving[g];
        }
        i = j;
    }
    (observed, expected, var)
}

/// Log-rank test across `k >= 2` groups, chi-square with `k - 1` degrees of
/// freedom. A degenerate covariance falls back to its pseudo-inverse with the
/// degrees of freedom reduced to its rank.
pub fn logrank_k(groups: &[&[Observation]]) -> Result<LogRank> {
    let k = groups.len();
    if k < 2 || groups.iter().any(|g| g.is_empty()) {
        return Err(Error::InsufficientData(
            "log-rank needs at least two non-empty groups".into(),
        ));
    }
    let (observed, expected, var) = oe_table(groups);
    let total: f64 = observed.iter().sum();
    if total == 0.0 {
        return Ok(LogRank {
            statistic: 0.0,
            df: k - 1,
            p: 1.0,
            observed,
            expected,
            flagged: true,
        });
    }
    let m = k - 1;
    let u: Vec<f64> = (0..m).map(|g| observed[g] - expected[g]).collect();
    let v: Vec<f64> = (0..m)
        .flat_map(|a| (0..m).map(move |b| (a, b)))
        .map(|(a, b)| var[a * k + b])
        .collect();
    let (statistic, df) = match solve(&v, &u) {
        Some(x) => (u.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>(), m),
        None => {
            let eig = symmetric_eigen(&v, m);
            let tol = 1e-10 * eig.values.first().copied().unwrap_or(0.0).abs();
            let mut stat = 0.0;
            let mut rank = 0;
            for (lam, vec) in eig.values.iter().zip(&eig.vectors) {
                if *lam > tol && *lam > 0.0 {
                    let proj: f64 = vec.iter().zip(&u).map(|(a, b)| a * b).sum();
                    stat += proj * proj / lam;
                    rank += 1;
                }
            }
            (stat, rank)
        }
    };
    let statistic = statistic.max(0.0);
    let (p, flagged) = if df == 0 {
        (1.0, true)
    } else {
        (chi_square_sf(statistic, df), false)
    };
    Ok(LogRank {
        statistic,
        df,
        p,
        observed,
        expected,
        flagged,
    })
}

/// Two-group log-rank test.
pub fn logrank_test(a: &[Observation], b: &[Observation]) -> Result<LogRank> {
    logrank_k(&[a, b])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HazardRatio {
    pub hr: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `(O_H / E_H) / (O_L / E_L)` with `SE(ln HR) = sqrt(1/E_H + 1/E_L)`.
/// `None` when any observed or expected count is 0.
pub fn hazard_ratio(high: &[Observation], low: &[Observation]) -> Option<HazardRatio> {
    if high.is_empty() || low.is_empty() {
        return None;
    }
    let (o, e, _) = oe_table(&[high, low]);
    if o.iter().chain(&e).any(|&x| x <= 0.0) {
        return None;
    }
    let hr = (o[0] / e[0]) / (o[1] / e[1]);
    let se = (1.0 / e[0] + 1.0 / e[1]).sqrt();
    let ln = hr.ln();
    Some(HazardRatio {
        hr,
        lower: (ln - 1.96 * se).exp().min(hr),
        upper: (ln + 1.96 * se).exp().max(hr),
    })
}
