//! Two-component PCA of attribution sets.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::attribution::AttributionSet;
use crate::error::{AsiError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    pub coordinates: Vec<[f64; 2]>,
    pub explained_variance_ratio: [f64; 2],
    pub component_loadings: [Vec<f64>; 2],
}

/// Projects mean-centred attributions onto the top two eigenvectors of their
/// covariance. Each loading vector is signed so its largest-magnitude entry
/// is positive.
pub fn project_attributions(set: &AttributionSet) -> Result<Projection2D> {
    project_rows(set.rows())
}

pub fn project_rows(rows: &[Vec<f64>]) -> Result<Projection2D> {
    let n = rows.len();
    if n < 3 {
        return Err(AsiError::InsufficientData {
            needed: 3,
            found: n,
        });
    }
    let m = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != m) {
        return Err(AsiError::Dimension {
            what: "projection row",
            expected: m,
            found: bad.len(),
        });
    }
    let mut x = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
    for j in 0..m {
        let mean = x.column(j).sum() / n as f64;
        x.column_mut(j).add_scalar_mut(-mean);
    }
    let cov = (x.transpose() * &x) / (n as f64 - 1.0);
    let total: f64 = cov.diagonal().sum();
    if total <= 0.0 {
        return Err(AsiError::DegenerateProjection(
            "attributions have zero variance",
        ));
    }
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });

    let mut loadings: [Vec<f64>; 2] = [vec![0.0; m], vec![0.0; m]];
    let mut ratio = [0.0; 2];
    for (k, slot) in loadings.iter_mut().enumerate() {
        let Some(&idx) = order.get(k) else { break };
        let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let pivot = v.iter().enumerate().fold(
            0,
            |best, (i, c)| if c.abs() > v[best].abs() { i } else { best },
        );
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|c| *c = -*c);
        }
        *slot = v;
        ratio[k] = (eig.eigenvalues[idx].max(0.0) / total).clamp(0.0, 1.0);
    }
    if ratio[1] > ratio[0] {
        ratio[1] = ratio[0];
    }

    let coordinates = (0..n)
        .map(|i| {
            let row = x.row(i);
            let dot = |v: &[f64]| row.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
            [dot(&loadings[0]), dot(&loadings[1])]
        })
        .collect();
    Ok(Projection2D {
        coordinates,
        explained_variance_ratio: ratio,
        component_loadings: loadings,
    })
}

/// Smallest distance between class centroids divided by the mean distance
/// of points to their own centroid. Returns `+inf` when every class is a
/// point mass.
pub fn cluster_separation(proj: &Projection2D, labels: &[usize]) -> Result<f64> {
    if labels.len() != proj.coordinates.len() {
        return Err(AsiError::Dimension {
            what: "projection labels",
            expected: proj.coordinates.len(),
            found: labels.len(),
        });
    }
    let classes = labels.iter().copied().max().map_or(0, |c| c + 1);
    let mut sums = vec![[0.0; 2]; classes];
    let mut counts = vec![0usize; classes];
    for (p, &l) in proj.coordinates.iter().zip(labels) {
        sums[l][0] += p[0];
        sums[l][1] += p[1];
        counts[l] += 1;
    }
    let centroids: Vec<(usize, [f64; 2])> = (0..classes)
        .filter(|&c| counts[c] > 0)
        .map(|c| {
            (
                c,
                [sums[c][0] / counts[c] as f64, sums[c][1] / counts[c] as f64],
            )
        })
        .collect();
    if centroids.len() < 2 {
        return Err(AsiError::InsufficientData {
            needed: 2,
            found: centroids.len(),
        });
    }
    let dist = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut min_between = f64::INFINITY;
    for (i, a) in centroids.iter().enumerate() {
        for b in &centroids[i + 1..] {
            min_between = min_between.min(dist(a.1, b.1));
        }
    }
    let mut centroid_of = vec![[0.0; 2]; classes];
    for (c, v) in &centroids {
        centroid_of[*c] = *v;
    }
    let within = proj
        .coordinates
        .iter()
        .zip(labels)
        .map(|(p, &l)| dist(*p, centroid_of[l]))
        .sum::<f64>()
        / labels.len() as f64;
    if within == 0.0 {
        return Ok(if min_between > 0.0 {
            f64::INFINITY
        } else {
            0.0
        });
    }
    Ok(min_between / within)
}
