//! Brute-force oracles and fixtures shared by the integration tests.
//!
//! Every oracle here is written from the textbook definition with naive
//! loops over voxel pairs, segments or neighborhoods, independent of the
//! library's own bookkeeping.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use morphorad::features::{DirectionSet13, COARSENESS_CAP};
use morphorad::stats::Observation;
use morphorad::volume::{discretize, BinPolicy, DiscretizedVolume, Grid, ScalarVolume, VoiMask};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `|a - b| <= tol * max(|a|, |b|)`, with exact equality accepted for 0.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

pub fn close_opt(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (None, None) => true,
        (Some(x), Some(y)) => rel_close(x, y, tol),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// Random inputs

/// Small integer-valued volume with a random non-empty mask, dims in 1..=max.
pub fn random_pair(r: &mut ChaCha8Rng, max_dim: usize, max_value: i32) -> (ScalarVolume, VoiMask) {
    let dims = [0; 3].map(|_| r.random_range(1..=max_dim));
    let g = Grid::unit(dims);
    let values: Vec<f64> = (0..g.len()).map(|_| f64::from(r.random_range(0..=max_value))).collect();
    let density = [0.5, 0.8, 1.0][r.random_range(0..3)];
    let mut mask: Vec<bool> = (0..g.len()).map(|_| r.random_bool(density)).collect();
    if !mask.iter().any(|&m| m) {
        let i = r.random_range(0..g.len());
        mask[i] = true;
    }
    (ScalarVolume::new(g, values).unwrap(), VoiMask::new(g, mask).unwrap())
}

/// A random discretized volume of at most 6³ voxels.
pub fn random_disc(r: &mut ChaCha8Rng) -> DiscretizedVolume {
    let max_value = r.random_range(1..=6);
    let (v, m) = random_pair(r, 6, max_value);
    let policy = if r.random_bool(0.5) {
        BinPolicy::FixedBinSize(1.0)
    } else {
        BinPolicy::FixedBinCount(r.random_range(1..=8))
    };
    discretize(&v, &m, policy).unwrap()
}

/// Integer volume on a full grid for the morphology oracles.
pub fn random_int_volume(r: &mut ChaCha8Rng, max_dim: usize) -> ScalarVolume {
    let dims = [0; 3].map(|_| r.random_range(1..=max_dim));
    let g = Grid::unit(dims);
    let hi = r.random_range(1..=50);
    ScalarVolume::new(g, (0..g.len()).map(|_| f64::from(r.random_range(-hi..=hi))).collect()).unwrap()
}

fn voxels(d: &DiscretizedVolume) -> Vec<([i64; 3], usize)> {
    let [nx, ny, nz] = d.grid.dims;
    let mut out = Vec::new();
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let l = d.level(x, y, z) as usize;
                if l > 0 {
                    out.push(([x as i64, y as i64, z as i64], l));
                }
            }
        }
    }
    out
}

fn level_at(d: &DiscretizedVolume, p: [i64; 3]) -> usize {
    let [nx, ny, nz] = d.grid.dims.map(|v| v as i64);
    if p[0] < 0 || p[1] < 0 || p[2] < 0 || p[0] >= nx || p[1] >= ny || p[2] >= nz {
        return 0;
    }
    d.level(p[0] as usize, p[1] as usize, p[2] as usize) as usize
}

// ---------------------------------------------------------------------------
// Texture oracles

/// Symmetric co-occurrence counts for one offset by scanning every ordered
/// pair of in-VOI voxels.
pub fn oracle_glcm_counts(d: &DiscretizedVolume, offset: [i64; 3]) -> Vec<u64> {
    let ng = d.ng as usize;
    let vs = voxels(d);
    let mut m = vec![0u64; ng * ng];
    for &(p, a) in &vs {
        for &(q, b) in &vs {
            if q[0] - p[0] == offset[0] && q[1] - p[1] == offset[1] && q[2] - p[2] == offset[2] {
                m[(a - 1) * ng + (b - 1)] += 1;
                m[(b - 1) * ng + (a - 1)] += 1;
            }
        }
    }
    m
}

/// Maximal runs along `offset`, keyed by `(level, length)`: every segment
/// `p, p + u, ..., p + (len - 1) u` of equal in-VOI level is tested, and kept
/// when neither end can be extended.
pub fn oracle_runs(d: &DiscretizedVolume, u: [i64; 3]) -> BTreeMap<(usize, usize), u64> {
    let longest = *d.grid.dims.iter().max().unwrap();
    let mut runs = BTreeMap::new();
    for (p, l) in voxels(d) {
        for len in 1..=longest {
            let at = |k: i64| level_at(d, [p[0] + k * u[0], p[1] + k * u[1], p[2] + k * u[2]]);
            if !(0..len as i64).all(|k| at(k) == l) {
                break;
            }
            if at(-1) != l && at(len as i64) != l {
                *runs.entry((l, len)).or_insert(0) += 1;
            }
        }
    }
    runs
}

/// 26-connected zones of equal level by breadth-first flood fill, keyed by
/// `(level, size)`.
pub fn oracle_zones(d: &DiscretizedVolume) -> BTreeMap<(usize, usize), u64> {
    let vs = voxels(d);
    let mut seen = vec![false; vs.len()];
    let mut zones = BTreeMap::new();
    for start in 0..vs.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let level = vs[start].1;
        let mut queue = VecDeque::from([start]);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            for j in 0..vs.len() {
                let adjacent = (0..3).all(|a| (vs[i].0[a] - vs[j].0[a]).abs() <= 1);
                if !seen[j] && adjacent && vs[j].1 == level {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        *zones.entry((level, size)).or_insert(0) += 1;
    }
    zones
}

/// Neighborhood gray-tone difference table: per level, voxel count and the
/// summed `|level - mean of in-VOI 26-neighbors|`, skipping voxels with no
/// in-VOI neighbor.
pub fn oracle_ngtdm(d: &DiscretizedVolume) -> (Vec<u64>, Vec<f64>) {
    let ng = d.ng as usize;
    let vs = voxels(d);
    let mut n = vec![0u64; ng];
    let mut s = vec![0.0; ng];
    for &(p, l) in &vs {
        let neigh: Vec<usize> = vs
            .iter()
            .filter(|(q, _)| *q != p && (0..3).all(|a| (q[a] - p[a]).abs() <= 1))
            .map(|&(_, lq)| lq)
            .collect();
        if neigh.is_empty() {
            continue;
        }
        let mean = neigh.iter().sum::<usize>() as f64 / neigh.len() as f64;
        n[l - 1] += 1;
        s[l - 1] += (l as f64 - mean).abs();
    }
    (n, s)
}

/// Keyed counts laid out as the library's `ng x lmax` row-major matrix.
pub fn dense(map: &BTreeMap<(usize, usize), u64>, ng: usize) -> (usize, Vec<u64>) {
    let lmax = map.keys().map(|k| k.1).max().unwrap_or(0);
    let mut m = vec![0u64; ng * lmax];
    for (&(l, len), &c) in map {
        m[(l - 1) * lmax + (len - 1)] += c;
    }
    (lmax, m)
}

/// GLCM features of a normalized matrix, straight from the definitions.
pub fn oracle_glcm_features(p: &[f64], ng: usize) -> Vec<Option<f64>> {
    let at = |i: usize, j: usize| p[(i - 1) * ng + (j - 1)];
    let levels = 1..=ng;
    let mu_x: f64 = levels.clone().flat_map(|i| (1..=ng).map(move |j| (i, j))).map(|(i, j)| i as f64 * at(i, j)).sum();
    let mu_y: f64 = levels.clone().flat_map(|i| (1..=ng).map(move |j| (i, j))).map(|(i, j)| j as f64 * at(i, j)).sum();
    let sum = |f: &dyn Fn(f64, f64, f64) -> f64| -> f64 {
        let mut acc = 0.0;
        for i in 1..=ng {
            for j in 1..=ng {
                let v = at(i, j);
                if v > 0.0 {
                    acc += f(i as f64, j as f64, v);
                }
            }
        }
        acc
    };
    let var_x = sum(&|i, _, v| (i - mu_x).powi(2) * v);
    let var_y = sum(&|_, j, v| (j - mu_y).powi(2) * v);
    let cov = sum(&|i, j, v| (i - mu_x) * (j - mu_y) * v);
    let corr = (var_x > 0.0 && var_y > 0.0).then(|| cov / (var_x.sqrt() * var_y.sqrt()));
    vec![
        Some(var_x),
        Some(sum(&|_, _, v| v * v)),
        Some(sum(&|_, _, v| -v * v.log2())),
        corr,
        Some(sum(&|i, j, v| (i - j).abs() * v)),
        Some(sum(&|i, j, v| (i - j).powi(2) * v)),
        Some(sum(&|i, j, v| v / (1.0 + (i - j).abs()))),
        Some(sum(&|i, j, v| v / (1.0 + (i - j).powi(2)))),
        Some(sum(&|i, j, v| (i + j - mu_x - mu_y).powi(3) * v)),
        Some(sum(&|i, j, v| (i + j - mu_x - mu_y).powi(2) * v)),
    ]
}

/// Run-length / size-zone features of an `ng x lmax` matrix: SRE, LRE, LGRE,
/// HGRE, SRLGE, LRLGE, SRHGE, LRHGE, percentage, GLNU, size NU.
pub fn oracle_emphasis(m: &[f64], ng: usize, lmax: usize, voxels: usize) -> Vec<Option<f64>> {
    let total: f64 = m.iter().sum();
    if total == 0.0 {
        return vec![None; 11];
    }
    let weighted = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..ng {
            for k in 0..lmax {
                acc += m[i * lmax + k] * f((i + 1) as f64, (k + 1) as f64);
            }
        }
        acc / total
    };
    let glnu: f64 = (0..ng)
        .map(|i| (0..lmax).map(|k| m[i * lmax + k]).sum::<f64>().powi(2))
        .sum::<f64>()
        / total;
    let snu: f64 = (0..lmax)
        .map(|k| (0..ng).map(|i| m[i * lmax + k]).sum::<f64>().powi(2))
        .sum::<f64>()
        / total;
    vec![
        Some(weighted(&|_, j| 1.0 / (j * j))),
        Some(weighted(&|_, j| j * j)),
        Some(weighted(&|i, _| 1.0 / (i * i))),
        Some(weighted(&|i, _| i * i)),
        Some(weighted(&|i, j| 1.0 / (i * i * j * j))),
        Some(weighted(&|i, j| j * j / (i * i))),
        Some(weighted(&|i, j| i * i / (j * j))),
        Some(weighted(&|i, j| i * i * j * j)),
        Some(total / voxels as f64),
        Some(glnu),
        Some(snu),
    ]
}

/// Coarseness, Contrast, Busyness, Complexity, Strength from per-level
/// counts and difference sums.
pub fn oracle_ngtdm_features(n: &[u64], s: &[f64]) -> Vec<Option<f64>> {
    let nvc: u64 = n.iter().sum();
    if nvc == 0 {
        return vec![None; 5];
    }
    let nvc = nvc as f64;
    let p: Vec<f64> = n.iter().map(|&c| c as f64 / nvc).collect();
    let present: Vec<usize> = (0..n.len()).filter(|&i| n[i] > 0).collect();
    let ngp = present.len() as f64;
    let ps: f64 = present.iter().map(|&i| p[i] * s[i]).sum();
    let s_sum: f64 = s.iter().sum();
    let coarse = if ps == 0.0 { COARSENESS_CAP } else { (1.0 / ps).min(COARSENESS_CAP) };
    let mut diff2 = 0.0;
    let mut busy = 0.0;
    let mut complexity = 0.0;
    let mut strength = 0.0;
    for &a in &present {
        for &b in &present {
            let (i, j) = ((a + 1) as f64, (b + 1) as f64);
            diff2 += p[a] * p[b] * (i - j).powi(2);
            busy += (i * p[a] - j * p[b]).abs();
            complexity += (i - j).abs() * (p[a] * s[a] + p[b] * s[b]) / (p[a] + p[b]);
            strength += (p[a] + p[b]) * (i - j).powi(2);
        }
    }
    let contrast = if ngp > 1.0 { diff2 / (ngp * (ngp - 1.0)) * s_sum / nvc } else { 0.0 };
    vec![
        Some(coarse),
        Some(contrast),
        (busy > 0.0).then(|| ps / busy),
        Some(complexity / nvc),
        (s_sum > 0.0).then(|| strength / s_sum),
    ]
}

/// Checks every texture matrix of `d` against its oracle (exact) and every
/// texture feature against the oracle formulas (relative `tol`).
pub fn check_texture(d: &DiscretizedVolume, tol: f64) -> Result<(), String> {
    use morphorad::features::*;
    let ng = d.ng as usize;
    let dirs = DirectionSet13::canonical();
    let n_vox = d.voxel_count();

    let mut glcm_sum = vec![0u64; ng * ng];
    let mut run_sum = BTreeMap::new();
    for u in dirs.iter() {
        let want = oracle_glcm_counts(d, u);
        if glcm_counts(d, u) != want {
            return Err(format!("GLCM counts differ for direction {u:?}"));
        }
        for (t, c) in glcm_sum.iter_mut().zip(&want) {
            *t += c;
        }
        let runs = oracle_runs(d, u);
        let (rmax, dense_runs) = dense(&runs, ng);
        let got = run_counts(d, u);
        if got.rmax != rmax || got.counts != dense_runs {
            return Err(format!("run counts differ for direction {u:?}"));
        }
        let covered: u64 = runs.iter().map(|(&(_, len), &c)| len as u64 * c).sum();
        if covered as usize != n_vox {
            return Err(format!("runs along {u:?} cover {covered} of {n_vox} voxels"));
        }
        for (k, c) in runs {
            *run_sum.entry(k).or_insert(0) += c;
        }
    }

    let pairs: u64 = glcm_sum.iter().sum();
    let glcm = glcm_mean(d, &dirs, 1);
    if glcm.pairs != pairs {
        return Err(format!("GLCM pair total {} vs {pairs}", glcm.pairs));
    }
    let got = glcm_features(&glcm).map_err(|e| e.to_string())?;
    if pairs > 0 {
        let p: Vec<f64> = glcm_sum.iter().map(|&c| c as f64 / pairs as f64).collect();
        if glcm.p != p {
            return Err("normalized GLCM differs".into());
        }
        compare("GLCM", &got, &oracle_glcm_features(&p, ng), tol)?;
    } else if got.iter().any(|(_, v)| v.is_some()) {
        return Err("GLCM features present without pairs".into());
    }

    let (rmax, summed) = dense(&run_sum, ng);
    let mean: Vec<f64> = summed.iter().map(|&c| c as f64 / 13.0).collect();
    let glrlm = glrlm_mean(d, &dirs, 1);
    if glrlm.rmax != rmax || glrlm.m != mean {
        return Err("mean GLRLM differs".into());
    }
    compare("GLRLM", &glrlm_features(&glrlm), &oracle_emphasis(&mean, ng, rmax, n_vox), tol)?;

    let zones = oracle_zones(d);
    let (zmax, dense_zones) = dense(&zones, ng);
    let z = glszm(d);
    if z.zmax != zmax || z.counts != dense_zones {
        return Err("GLSZM differs from flood fill".into());
    }
    let zf: Vec<f64> = dense_zones.iter().map(|&c| c as f64).collect();
    compare("GLSZM", &glszm_features(&z), &oracle_emphasis(&zf, ng, zmax, n_vox), tol)?;

    let (n, s) = oracle_ngtdm(d);
    let g = gldm(d);
    if g.n != n {
        return Err(format!("GLDM counts {:?} vs {n:?}", g.n));
    }
    for (a, b) in g.s.iter().zip(&s) {
        if !rel_close(*a, *b, tol) {
            return Err(format!("GLDM s {:?} vs {s:?}", g.s));
        }
    }
    compare("GLDM", &gldm_features(&g), &oracle_ngtdm_features(&n, &s), tol)?;
    Ok(())
}

fn compare(what: &str, got: &[(&str, Option<f64>)], want: &[Option<f64>], tol: f64) -> Result<(), String> {
    if got.len() != want.len() {
        return Err(format!("{what}: {} features vs {}", got.len(), want.len()));
    }
    for ((name, g), w) in got.iter().zip(want) {
        if !close_opt(*g, *w, tol) {
            return Err(format!("{what}.{name}: {g:?} vs oracle {w:?}"));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Morphology oracles

/// Minimum (or maximum) over the grid voxels within Chebyshev distance `r`.
pub fn oracle_box(vol: &ScalarVolume, r: usize, max: bool) -> ScalarVolume {
    let g = vol.grid;
    let r = r as i64;
    let coords: Vec<[i64; 3]> = (0..g.len()).map(|i| g.coords(i).map(|c| c as i64)).collect();
    let mut out = vol.clone();
    for (i, &p) in coords.iter().enumerate() {
        let mut acc = if max { f64::NEG_INFINITY } else { f64::INFINITY };
        for (j, q) in coords.iter().enumerate() {
            if (0..3).all(|a| (q[a] - p[a]).abs() <= r) {
                let v = vol.values[j];
                acc = if max { acc.max(v) } else { acc.min(v) };
            }
        }
        out.values[i] = acc;
    }
    out
}

/// `min(f(x), f(x + v))` over every voxel pair at displacement `v`; voxels
/// without a partner keep their value.
pub fn oracle_two_point(vol: &ScalarVolume, v: [i64; 3]) -> ScalarVolume {
    let g = vol.grid;
    let coords: Vec<[i64; 3]> = (0..g.len()).map(|i| g.coords(i).map(|c| c as i64)).collect();
    let mut out = vol.clone();
    for (i, p) in coords.iter().enumerate() {
        for (j, q) in coords.iter().enumerate() {
            if (0..3).all(|a| q[a] - p[a] == v[a]) {
                out.values[i] = vol.values[i].min(vol.values[j]);
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Statistics oracles

pub fn obs(v: &[(f64, bool)]) -> Vec<Observation> {
    v.iter().map(|&(time, event)| Observation { time, event }).collect()
}

/// Fraction of (positive, negative) pairs ranked correctly, ties counting
/// one half.
pub fn oracle_auc(values: &[f64], labels: &[bool]) -> f64 {
    let mut score = 0.0;
    let mut pairs = 0.0;
    for (i, &vi) in values.iter().enumerate() {
        if !labels[i] {
            continue;
        }
        for (j, &vj) in values.iter().enumerate() {
            if labels[j] {
                continue;
            }
            pairs += 1.0;
            if vi > vj {
                score += 1.0;
            } else if vi == vj {
                score += 0.5;
            }
        }
    }
    score / pairs
}

/// Two-group log-rank chi-square written out as a sum over distinct event
/// times.
pub fn oracle_logrank_statistic(a: &[Observation], b: &[Observation]) -> f64 {
    let mut times: Vec<f64> = a.iter().chain(b).filter(|o| o.event).map(|o| o.time).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (mut o_minus_e, mut var) = (0.0, 0.0);
    for t in times {
        let at_risk = |g: &[Observation]| g.iter().filter(|o| o.time >= t).count() as f64;
        let deaths = |g: &[Observation]| g.iter().filter(|o| o.time == t && o.event).count() as f64;
        let (na, nb) = (at_risk(a), at_risk(b));
        let n = na + nb;
        let d = deaths(a) + deaths(b);
        o_minus_e += deaths(a) - d * na / n;
        if n > 1.0 {
            var += d * (na / n) * (nb / n) * (n - d) / (n - 1.0);
        }
    }
    if var == 0.0 {
        0.0
    } else {
        o_minus_e * o_minus_e / var
    }
}

/// Permutation p-value of the log-rank statistic: group labels are shuffled
/// `draws` times and the fraction of statistics at least the observed one is
/// returned.
pub fn permutation_logrank_p(a: &[Observation], b: &[Observation], draws: usize, seed: u64) -> f64 {
    use rand::seq::SliceRandom;
    let observed = oracle_logrank_statistic(a, b);
    let mut pooled: Vec<Observation> = a.iter().chain(b).copied().collect();
    let mut r = rng(seed);
    let mut hits = 0usize;
    for _ in 0..draws {
        pooled.shuffle(&mut r);
        let (x, y) = pooled.split_at(a.len());
        if oracle_logrank_statistic(x, y) >= observed * (1.0 - 1e-12) {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

// ---------------------------------------------------------------------------
// Morphology checks shared with the acceptance suite

/// Opening by a random cube is idempotent and anti-extensive, erosion and
/// dilation match [`oracle_box`], and the granulometry volume never grows
/// with the radius.
pub fn check_opening_axioms(r: &mut ChaCha8Rng) -> Result<(), String> {
    use morphorad::morphology::*;
    let vol = random_int_volume(r, 8);
    let rad = r.random_range(1..=3);
    let se = chebyshev_ball(rad);
    let er = erode(&vol, &se).unwrap();
    if er != oracle_box(&vol, rad, false) {
        return Err(format!("erosion r={rad} differs from oracle on {:?}", vol.grid.dims));
    }
    if dilate(&vol, &se).unwrap() != oracle_box(&vol, rad, true) {
        return Err(format!("dilation r={rad} differs from oracle on {:?}", vol.grid.dims));
    }
    let o = opening(&vol, &se).unwrap();
    if opening(&o, &se).unwrap() != o {
        return Err(format!("opening r={rad} not idempotent on {:?}", vol.grid.dims));
    }
    if o.values.iter().zip(&vol.values).any(|(a, b)| a > b) {
        return Err(format!("opening r={rad} not anti-extensive on {:?}", vol.grid.dims));
    }
    let g = vol.grid;
    let mask = VoiMask::new(g, (0..g.len()).map(|_| r.random_bool(0.7)).collect()).unwrap();
    if mask.is_empty_voi() {
        return Ok(());
    }
    let shift = intensity_shift(&vol, &mask).unwrap();
    let gran = granulometry_series(&vol, &mask, shift, BinPolicy::default()).unwrap();
    let vols: Vec<f64> = gran.measures().map(|m| m.volume).collect();
    let first = measure_vector(&vol, &mask, shift, BinPolicy::default()).unwrap().volume;
    if std::iter::once(first).chain(vols.iter().copied()).collect::<Vec<_>>().windows(2).any(|w| w[1] > w[0]) {
        return Err(format!("granulometry volume increases: {first} then {vols:?}"));
    }
    Ok(())
}

/// Every entry of the covariance series equals the measures of the
/// brute-force two-point erosion.
pub fn check_covariance_series(r: &mut ChaCha8Rng) -> Result<(), String> {
    use morphorad::morphology::*;
    let (vol, mask) = random_pair(r, 6, 60);
    let shift = intensity_shift(&vol, &mask).unwrap();
    let dirs = DirectionSet13::canonical();
    let series = covariance_series(&vol, &mask, shift, &dirs, BinPolicy::default()).unwrap();
    if series.len() != 130 {
        return Err(format!("{} covariance entries", series.len()));
    }
    for (u, dir) in dirs.iter().enumerate() {
        for d in 1..=10i64 {
            let v = dir.map(|c| c * d);
            let want = measure_vector(&oracle_two_point(&vol, v), &mask, shift, BinPolicy::default()).unwrap();
            let (idx, got) = &series.entries[u * 10 + (d as usize - 1)];
            let expected_idx = morphorad::morphology::SeriesIndex::Vector { direction: u, distance: d as usize };
            if *idx != expected_idx || *got != want {
                return Err(format!("covariance entry u={u} d={d} differs on {:?}", vol.grid.dims));
            }
        }
    }
    Ok(())
}

/// Covariance volume along the stripe axis for a noise-free striped cube.
pub fn stripe_volume_curve(period: usize, axis: usize) -> Vec<f64> {
    use morphorad::morphology::*;
    use morphorad::phantom::{make_phantom, PhantomSpec, Shape, Texture};
    let (vol, mask) = make_phantom(&PhantomSpec {
        dims: [32; 3],
        shape: Shape::Cube { s: 26 },
        texture: Texture::Stripes { period, axis },
        ..PhantomSpec::default()
    })
    .unwrap();
    let shift = intensity_shift(&vol, &mask).unwrap();
    let dirs = DirectionSet13::canonical();
    let series = covariance_series(&vol, &mask, shift, &dirs, BinPolicy::default()).unwrap();
    let u = dirs.iter().position(|o| o == std::array::from_fn::<i64, 3, _>(|a| i64::from(a == axis))).unwrap();
    series.entries[u * 10..u * 10 + 10].iter().map(|(_, m)| m.volume).collect()
}

/// The curve dips at half the period and recovers at the full period.
pub fn check_stripe_period(period: usize, axis: usize) -> Result<(), String> {
    let curve = stripe_volume_curve(period, axis);
    // curve[k] is distance k + 1
    let argmin = (0..period).min_by(|&a, &b| curve[a].total_cmp(&curve[b])).unwrap() + 1;
    let half = period as f64 / 2.0;
    if (argmin as f64 - half).abs() > 0.5 {
        return Err(format!("period {period} axis {axis}: minimum at d={argmin}, curve {curve:?}"));
    }
    let lo = argmin - 1;
    let argmax = (lo..curve.len()).max_by(|&a, &b| curve[a].total_cmp(&curve[b]).then(b.cmp(&a))).unwrap() + 1;
    if argmax != period {
        return Err(format!("period {period} axis {axis}: recovery at d={argmax}, curve {curve:?}"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Statistics checks shared with the acceptance suite

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn near(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((a - b).abs() <= tol, || format!("{what}: {a} vs {b}"))
}

/// Kaplan-Meier, log-rank and hazard ratio on small instances expanded by
/// hand, to 1e-12.
pub fn check_survival_hand() -> Result<(), String> {
    use morphorad::stats::*;
    const TOL: f64 = 1e-12;

    // KM: 5 dead, 10 censored, 15 dead
    let k = km_estimate(&obs(&[(5.0, true), (10.0, false), (15.0, true)])).map_err(|e| e.to_string())?;
    let s: Vec<f64> = k.curve.steps.iter().map(|s| s.survival).collect();
    ensure(s.len() == 3, || format!("KM steps {s:?}"))?;
    near(s[0], 2.0 / 3.0, TOL, "KM S(5)")?;
    near(s[1], 2.0 / 3.0, TOL, "KM S(10)")?;
    near(s[2], 0.0, TOL, "KM S(15)")?;
    ensure(k.median == Some(15.0), || format!("KM median {:?}", k.median))?;
    near(k.rmst, 5.0 + 10.0 * 2.0 / 3.0, TOL, "KM restricted mean")?;

    // KM: four uncensored deaths step by 1/4, median at the 2nd time
    let k = km_estimate(&obs(&[(7.0, true), (2.0, true), (9.0, true), (4.0, true)])).map_err(|e| e.to_string())?;
    let s: Vec<f64> = k.curve.steps.iter().map(|s| s.survival).collect();
    for (got, want) in s.iter().zip([0.75, 0.5, 0.25, 0.0]) {
        near(*got, want, TOL, "KM uncensored step")?;
    }
    ensure(k.median == Some(4.0), || format!("uncensored median {:?}", k.median))?;

    // log-rank, A = {1 dead, 3 dead}, B = {2 dead}
    //   t=1: n=3 (2,1): E_A = 2/3, V = 2*1*2/(9*2) = 2/9
    //   t=2: n=2 (1,1): E_A = 1/2, V = 1/4
    //   t=3: n=1 (1,0): E_A = 1,   V = 0
    //   O_A - E_A = 2 - 13/6 = -1/6, V = 17/36, chi2 = 1/17
    let a = obs(&[(1.0, true), (3.0, true)]);
    let b = obs(&[(2.0, true)]);
    let lr = logrank_test(&a, &b).map_err(|e| e.to_string())?;
    near(lr.expected[0], 13.0 / 6.0, TOL, "log-rank E_A")?;
    near(lr.observed[0], 2.0, TOL, "log-rank O_A")?;
    near(lr.statistic, 1.0 / 17.0, TOL, "log-rank statistic")?;
    near(lr.statistic, oracle_logrank_statistic(&a, &b), TOL, "log-rank vs sum oracle")?;

    // HR, H = {1 dead, 2 dead, 5 cens}, L = {3 dead, 4 cens, 6 dead}
    //   E_H = 1/2 + 2/5 + 1/4 + 0 = 23/20, E_L = 4 - 23/20 = 57/20
    let h = obs(&[(1.0, true), (2.0, true), (5.0, false)]);
    let l = obs(&[(3.0, true), (4.0, false), (6.0, true)]);
    let hr = hazard_ratio(&h, &l).ok_or("HR missing")?;
    let want = (2.0 / (23.0 / 20.0)) / (2.0 / (57.0 / 20.0));
    near(hr.hr, want, TOL, "HR")?;
    let se = (20.0 / 23.0 + 20.0 / 57.0f64).sqrt();
    near(hr.lower, (want.ln() - 1.96 * se).exp(), TOL, "HR lower")?;
    near(hr.upper, (want.ln() + 1.96 * se).exp(), TOL, "HR upper")?;

    // three groups {1 dead}, {2 dead}, {3 censored}:
    //   O - E = (2/3, 1/6), V = [[2/9, -1/9], [-1/9, 17/36]]
    let g = [obs(&[(1.0, true)]), obs(&[(2.0, true)]), obs(&[(3.0, false)])];
    let lr3 = logrank_k(&[&g[0], &g[1], &g[2]]).map_err(|e| e.to_string())?;
    let (u0, u1) = (2.0 / 3.0, 1.0 / 6.0);
    let (va, vb, vd) = (2.0 / 9.0, -1.0 / 9.0, 17.0 / 36.0);
    let det = va * vd - vb * vb;
    let want = (u0 * (vd * u0 - vb * u1) + u1 * (va * u1 - vb * u0)) / det;
    near(lr3.statistic, want, TOL, "3-group log-rank")?;
    ensure(lr3.df == 2, || format!("3-group df {}", lr3.df))?;
    Ok(())
}

/// The two-group instance with B's death times twice A's, 10 per group.
pub fn doubled_instance() -> (Vec<Observation>, Vec<Observation>) {
    let a: Vec<(f64, bool)> = (1..=10).map(|t| (f64::from(t), true)).collect();
    let b: Vec<(f64, bool)> = (1..=10).map(|t| (f64::from(2 * t), true)).collect();
    (obs(&a), obs(&b))
}

/// Log-rank p against a `draws`-sample permutation p, within 3 Monte-Carlo
/// standard errors. Returns both p-values and the z score.
pub fn check_permutation(a: &[Observation], b: &[Observation], draws: usize) -> Result<String, String> {
    use morphorad::stats::logrank_test;
    let lr = logrank_test(a, b).map_err(|e| e.to_string())?;
    let perm = permutation_logrank_p(a, b, draws, 0x9e37);
    let se = (perm * (1.0 - perm) / draws as f64).sqrt().max(1.0 / draws as f64);
    let z = (lr.p - perm) / se;
    let msg = format!("chi-square p {:.5}, permutation p {perm:.5}, z {z:.1}", lr.p);
    if z.abs() <= 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Random binary-label instance with many tied values.
pub fn random_roc_instance(r: &mut ChaCha8Rng) -> (Vec<f64>, Vec<bool>) {
    let n = r.random_range(2..=40);
    let distinct = r.random_range(1..=12);
    let mut labels: Vec<bool> = (0..n).map(|_| r.random_bool(0.4)).collect();
    labels[0] = true;
    labels[1] = false;
    let values = (0..n).map(|_| f64::from(r.random_range(0..distinct)) * 0.5).collect();
    (values, labels)
}

pub fn check_auc(instances: usize, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for case in 0..instances {
        let (v, l) = random_roc_instance(&mut r);
        let got = morphorad::stats::auc(&v, &l).map_err(|e| e.to_string())?;
        let want = oracle_auc(&v, &l);
        ensure(got == want, || format!("case {case}: AUC {got} vs pair count {want}"))?;
    }
    Ok(())
}

pub fn check_corrections() -> Result<(), String> {
    use morphorad::stats::*;
    let adj = bh_adjust(&[Some(0.01), Some(0.02), Some(0.03), Some(0.04)]);
    ensure(adj == vec![Some(0.04); 4], || format!("BH {adj:?}"))?;
    let a = altman_correct(0.01);
    near(a.p, 0.1601, 5e-4, "Altman(0.01)")?;
    let mut p = 1e-12;
    while p < 1.0 {
        let c = altman_correct(p).p;
        ensure(c >= p && c <= 1.0, || format!("Altman({p}) = {c}"))?;
        p *= 1.07;
    }
    Ok(())
}

/// A random `n x l` feature block with correlated columns.
pub fn random_block(r: &mut ChaCha8Rng, n: usize, l: usize) -> morphorad::stats::FeatureTable {
    let latent: Vec<[f64; 2]> = (0..n).map(|_| [r.random::<f64>(), r.random::<f64>()]).collect();
    let mix: Vec<[f64; 3]> = (0..l).map(|_| [r.random::<f64>() * 4.0 - 2.0, r.random::<f64>() * 4.0 - 2.0, r.random::<f64>()]).collect();
    let rows = latent
        .iter()
        .map(|z| mix.iter().map(|m| Some(m[0] * z[0] + m[1] * z[1] + m[2] * r.random::<f64>())).collect())
        .collect();
    morphorad::stats::FeatureTable::new(
        (0..n).map(|i| format!("P{i:03}")).collect(),
        (1..=l).map(|i| format!("MM.gran.volume.r{i:02}")).collect(),
        rows,
    )
    .unwrap()
}

/// Orthonormal loadings, non-increasing explained variance, full-spectrum
/// reconstruction of the standardized covariance and a stable sign
/// convention.
pub fn check_pca(r: &mut ChaCha8Rng, n: usize, l: usize, k: usize) -> Result<(), String> {
    use morphorad::stats::linalg::symmetric_eigen;
    use morphorad::stats::*;
    let block = random_block(r, n, l);
    let (model, scores) = pca_fit_project(&block, "MM.gran.volume", k).map_err(|e| e.to_string())?;
    for a in 0..k {
        for b in 0..k {
            let dot: f64 = model.loadings.iter().map(|row| row[a] * row[b]).sum();
            let want = if a == b { 1.0 } else { 0.0 };
            near(dot, want, 1e-10, &format!("loadings {a}.{b}"))?;
        }
        let col: Vec<f64> = model.loadings.iter().map(|row| row[a]).collect();
        let big = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let first = col.iter().find(|v| v.abs() == big).unwrap();
        ensure(*first > 0.0, || format!("component {a} sign convention: {col:?}"))?;
    }
    ensure(model.explained.windows(2).all(|w| w[1] <= w[0]), || format!("explained {:?}", model.explained))?;
    for c in 0..k {
        let s: Vec<f64> = (0..n).map(|i| scores.get(i, c).unwrap()).collect();
        let var = s.iter().map(|v| v * v).sum::<f64>() / n as f64;
        near(var, model.explained[c], 1e-10 * l as f64, "score variance")?;
    }

    let cov = standardized_covariance(&block);
    let eig = symmetric_eigen(&cov, l);
    ensure(eig.values.windows(2).all(|w| w[1] <= w[0]), || "eigenvalues not sorted".into())?;
    for i in 0..l {
        for j in 0..l {
            let rec: f64 = (0..l).map(|c| eig.values[c] * eig.vectors[c][i] * eig.vectors[c][j]).sum();
            near(rec, cov[i * l + j], 1e-8, &format!("reconstruction {i},{j}"))?;
        }
    }
    for _ in 0..3 {
        let (again, s2) = pca_fit_project(&block, "MM.gran.volume", k).map_err(|e| e.to_string())?;
        ensure(again == model && s2 == scores, || "PCA differs between runs".into())?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Pipeline fixtures

/// Runs every stage the way the command line does, reading each stage's
/// output back from disk, and returns the analysis report.
pub fn run_pipeline(
    manifest: &std::path::Path,
    out: &std::path::Path,
    cfg: &morphorad::pipeline::RunConfig,
) -> morphorad::pipeline::Report {
    use morphorad::pipeline::*;
    use morphorad::stats::FeatureTable;
    let m = CohortManifest::load(manifest).unwrap();
    let extracted = run_extract(&m, cfg).unwrap();
    write_extract(out, &extracted).unwrap();
    let table = FeatureTable::read_csv_file(out.join(FEATURES_FILE)).unwrap();
    let reduced = run_reduce(&table, cfg).unwrap();
    write_reduce(out, &reduced).unwrap();
    let table = FeatureTable::read_csv_file(out.join(REDUCED_FILE)).unwrap();
    let report = run_analyze(&table, &m, cfg).unwrap();
    write_analyze(out, &report).unwrap();
    write_report(out, &report).unwrap();
    report
}

/// Generates a phantom cohort under `dir` and returns its manifest path.
pub fn make_cohort_in(spec: &morphorad::phantom::CohortSpec, dir: &std::path::Path) -> std::path::PathBuf {
    std::fs::create_dir_all(dir).unwrap();
    morphorad::phantom::make_cohort(spec, dir).unwrap();
    dir.join(morphorad::phantom::MANIFEST_FILE)
}

/// Relative path and contents of every file below `root`, sorted by path.
pub fn tree_contents(root: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = walkdir::WalkDir::new(root)
        .into_iter()
        .map(Result::unwrap)
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e.path().strip_prefix(root).unwrap().to_string_lossy().into_owned();
            (rel, std::fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}
