use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::table::FeatureTable;

/// Mid-ranks (1-based); tied values share the average of their positions.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided p-value of a correlation via `t = rho sqrt((n-2)/(1-rho^2))`.
pub fn correlation_p_value(rho: f64, n: usize) -> Option<f64> {
    if n < 3 {
        return None;
    }
    if rho.abs() >= 1.0 {
        return Some(0.0);
    }
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).ok()?;
    Some((2.0 * dist.sf(t.abs())).min(1.0))
}

/// Spearman correlation on pairwise-complete observations, with its p-value.
/// `None` when fewer than 3 complete pairs remain or either side is constant.
pub fn spearman(x: &[Option<f64>], y: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let (a, b): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    if a.len() < 3 {
        return (None, None);
    }
    match pearson(&mid_ranks(&a), &mid_ranks(&b)) {
        Some(rho) => (Some(rho), correlation_p_value(rho, a.len())),
        None => (None, None),
    }
}

/// Symmetric Spearman matrices over all feature pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct SpearmanMatrix {
    pub names: Vec<String>,
    /// Row-major `k x k`.
    pub rho: Vec<Option<f64>>,
    pub p: Vec<Option<f64>>,
}

impl SpearmanMatrix {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn rho_at(&self, i: usize, j: usize) -> Option<f64> {
        self.rho[i * self.names.len() + j]
    }

    pub fn p_at(&self, i: usize, j: usize) -> Option<f64> {
        self.p[i * self.names.len() + j]
    }
}

struct Prepared {
    complete: bool,
    /// Centered ranks and their sum of squares when the column is complete.
    centered: Vec<f64>,
    ss: f64,
}

fn prepare(col: &[Option<f64>]) -> Prepared {
    if col.iter().any(Option::is_none) {
        return Prepared {
            complete: false,
            centered: Vec::new(),
            ss: 0.0,
        };
    }
    let v: Vec<f64> = col.iter().map(|x| x.unwrap()).collect();
    let r = mid_ranks(&v);
    let n = r.len() as f64;
    let m = r.iter().sum::<f64>() / n;
    let centered: Vec<f64> = r.iter().map(|x| x - m).collect();
    let ss = centered.iter().map(|x| x * x).sum();
    Prepared {
        complete: true,
        centered,
        ss,
    }
}

/// All pairwise Spearman correlations; the diagonal is 1 for non-constant
/// features.
pub fn spearman_matrix(table: &FeatureTable) -> SpearmanMatrix {
    let k = table.n_features();
    let n = table.n_patients();
    let cols: Vec<Vec<Option<f64>>> = (0..k).map(|j| table.column(j)).collect();
    let prepared: Vec<Prepared> = cols.par_iter().map(|c| prepare(c)).collect();
    let rows: Vec<Vec<(Option<f64>, Option<f64>)>> = (0..k)
        .into_par_iter()
        .map(|i| {
            (0..k)
                .map(|j| {
                    let (a, b) = (&prepared[i], &prepared[j]);
                    if a.complete && b.complete {
                        if n < 3 || a.ss == 0.0 || b.ss == 0.0 {
                            (None, None)
                        } else {
                            let rho = if i == j {
                                1.0
                            } else {
                                let sxy: f64 =
                                    a.centered.iter().zip(&b.centered).map(|(x, y)| x * y).sum();
                                (sxy / (a.ss * b.ss).sqrt()).clamp(-1.0, 1.0)
                            };
                            (Some(rho), correlation_p_value(rho, n))
                        }
                    } else if i == j {
                        let (r, _) = spearman(&cols[i], &cols[j]);
                        (r.map(|_| 1.0), r.map(|_| 0.0))
                    } else {
                        spearman(&cols[i], &cols[j])
                    }
                })
                .collect()
        })
        .collect();
    let mut rho = Vec::with_capacity(k * k);
    let mut p = Vec::with_capacity(k * k);
    for row in rows {
        for (r, q) in row {
            rho.push(r);
            p.push(q);
        }
    }
    // Symmetrize so (i, j) and (j, i) agree bit for bit.
    for i in 0..k {
        for j in 0..i {
            rho[i * k + j] = rho[j * k + i];
            p[i * k + j] = p[j * k + i];
        }
    }
    SpearmanMatrix {
        names: table.features().to_vec(),
        rho,
        p,
    }
}

/// Connected components of the graph with an edge wherever
/// `|rho| >= threshold` and `p < alpha`. Groups are sorted by their first
/// member's column index.
pub fn redundancy_groups(m: &SpearmanMatrix, threshold: f64, alpha: f64) -> Vec<Vec<usize>> {
    let k = m.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for i in 0..k {
        for j in i + 1..k {
            let linked = matches!(
                (m.rho_at(i, j), m.p_at(i, j)),
                (Some(r), Some(p)) if r.abs() >= threshold && p < alpha
            );
            if linked {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    fn some(v: &[f64]) -> Vec<Option<f64>> {
        v.iter().map(|&x| Some(x)).collect()
    }

    #[test]
    fn mid_ranks_with_ties() {
        assert_eq!(mid_ranks(&[10.0, 20.0, 10.0, 5.0]), vec![2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn monotone_transforms() {
        let x: Vec<f64> = (1..=9).map(|i| f64::from(i) * 0.7 - 2.0).collect();
        let cube: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert_eq!(spearman(&some(&x), &some(&cube)).0, Some(1.0));
        assert_eq!(spearman(&some(&x), &some(&neg)).0, Some(-1.0));
        assert_eq!(spearman(&some(&x), &some(&cube)).1, Some(0.0));
    }

    #[test]
    fn constant_or_short_is_missing() {
        assert_eq!(spearman(&some(&[1.0, 1.0, 1.0, 1.0]), &some(&[1.0, 2.0, 3.0, 4.0])), (None, None));
        assert_eq!(spearman(&some(&[1.0, 2.0]), &some(&[1.0, 2.0])), (None, None));
        let x = vec![Some(1.0), None, Some(3.0), Some(2.0)];
        let y = some(&[1.0, 9.0, 3.0, 2.0]);
        assert_eq!(spearman(&x, &y).0, Some(1.0));
    }

    #[test]
    fn p_value_reference() {
        // rho = 0.5, n = 12: t = 0.5 * sqrt(10 / 0.75) = 1.8257, df 10, two-sided p = 0.0979
        let p = correlation_p_value(0.5, 12).unwrap();
        assert!((p - 0.09785).abs() < 1e-4, "{p}");
    }

    #[test]
    fn matrix_agrees_with_pairwise() {
        let cols = [
            vec![1.0, 4.0, 2.0, 8.0, 5.0, 7.0],
            vec![2.0, 3.0, 1.0, 9.0, 9.0, 6.0],
            vec![6.0, 5.0, 4.0, 3.0, 2.0, 1.0],
        ];
        let rows: Vec<Vec<Option<f64>>> =
            (0..6).map(|i| cols.iter().map(|c| Some(c[i])).collect()).collect();
        let mut rows_missing = rows.clone();
        rows_missing[2][1] = None;
        for rows in [rows, rows_missing] {
            let t = FeatureTable::new(
                (0..6).map(|i| format!("p{i}")).collect(),
                vec!["a".into(), "b".into(), "c".into()],
                rows,
            )
            .unwrap();
            let m = spearman_matrix(&t);
            for i in 0..3 {
                assert_eq!(m.rho_at(i, i), Some(1.0));
                for j in 0..3 {
                    if i != j {
                        let (r, p) = spearman(&t.column(i), &t.column(j));
                        assert_eq!(m.rho_at(i, j), r);
                        assert!((m.p_at(i, j).unwrap() - p.unwrap()).abs() < 1e-12);
                        assert_eq!(m.rho_at(i, j), m.rho_at(j, i));
                    }
                }
            }
        }
    }

    #[test]
    fn groups_from_known_pattern() {
        // edges: 0-1, 1-2, 3-4 (4 features linked, 5th isolated)
        let k = 5;
        let mut rho = vec![Some(0.1); k * k];
        let mut p = vec![Some(0.5); k * k];
        for (i, j) in [(0, 1), (1, 2), (3, 4)] {
            rho[i * k + j] = Some(0.9);
            rho[j * k + i] = Some(-0.9);
            p[i * k + j] = Some(0.001);
            p[j * k + i] = Some(0.001);
        }
        // strong but not significant: no edge
        rho[2 * k + 3] = Some(0.95);
        p[2 * k + 3] = Some(0.2);
        let m = SpearmanMatrix {
            names: (0..k).map(|i| i.to_string()).collect(),
            rho,
            p,
        };
        assert_eq!(redundancy_groups(&m, 0.8, 0.05), vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn singleton_and_duplicate_groups() {
        let t = FeatureTable::new(
            (0..5).map(|i| format!("p{i}")).collect(),
            vec!["a".into(), "dup".into(), "c".into()],
            vec![
                vec![Some(1.0), Some(1.0), Some(3.0)],
                vec![Some(2.0), Some(2.0), Some(1.0)],
                vec![Some(3.0), Some(3.0), Some(5.0)],
                vec![Some(4.0), Some(4.0), Some(2.0)],
                vec![Some(5.0), Some(5.0), Some(4.0)],
            ],
        )
        .unwrap();
        let m = spearman_matrix(&t);
        assert_eq!(redundancy_groups(&m, 0.8, 0.05), vec![vec![0, 1], vec![2]]);
    }
}
