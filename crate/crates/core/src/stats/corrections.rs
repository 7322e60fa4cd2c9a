use serde::{Deserialize, Serialize};

/// Constants of the minimum-p-value correction
/// `p_cor = a * p * (1 + b * ln p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltmanConstants {
    pub a: f64,
    pub b: f64,
    /// Largest raw p-value the approximation is used for.
    pub valid_below: f64,
}

impl Default for AltmanConstants {
    /// Values for a cutoff searched over the 10th to 90th percentiles.
    fn default() -> Self {
        AltmanConstants {
            a: -1.63,
            b: 2.35,
            valid_below: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AltmanResult {
    pub p: f64,
    /// Raw p was outside the validity range and the result was set to 1.
    pub flagged: bool,
}

pub fn altman_correct(p_min: f64) -> AltmanResult {
    altman_correct_with(p_min, AltmanConstants::default())
}

/// Corrected p-value, clamped to `[p_min, 1]`.
pub fn altman_correct_with(p_min: f64, c: AltmanConstants) -> AltmanResult {
    if p_min >= c.valid_below {
        return AltmanResult {
            p: 1.0,
            flagged: true,
        };
    }
    if p_min <= 0.0 {
        return AltmanResult {
            p: 0.0,
            flagged: false,
        };
    }
    let raw = c.a * p_min * (1.0 + c.b * p_min.ln());
    AltmanResult {
        p: raw.clamp(p_min, 1.0),
        flagged: false,
    }
}

/// Benjamini-Hochberg step-up adjustment. Missing values stay missing and do
/// not count towards the number of tests.
pub fn bh_adjust(p: &[Option<f64>]) -> Vec<Option<f64>> {
    let mut idx: Vec<usize> = (0..p.len()).filter(|&i| p[i].is_some()).collect();
    idx.sort_by(|&a, &b| p[a].unwrap().total_cmp(&p[b].unwrap()).then(a.cmp(&b)));
    let m = idx.len() as f64;
    let mut out = vec![None; p.len()];
    let mut running = 1.0f64;
    for (rank, &i) in idx.iter().enumerate().rev() {
        let adj = p[i].unwrap() * m / (rank + 1) as f64;
        running = running.min(adj);
        out[i] = Some(running.min(1.0).max(p[i].unwrap()));
    }
    out
}
