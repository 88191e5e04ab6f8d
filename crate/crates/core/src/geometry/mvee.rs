use log::warn;
use nalgebra::{DMatrix, DVector, Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::Ellipsoid3;
use crate::{Error, Point3, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MveeOptions {
    /// Relative optimality tolerance of Khachiyan's iteration.
    pub eps: f64,
    pub max_iter: usize,
    /// Smallest semi-axis of the returned ellipsoid. Flat or collinear point
    /// sets get this thickness along their missing directions.
    pub min_thickness: f64,
}

impl Default for MveeOptions {
    fn default() -> Self {
        Self { eps: 1e-3, max_iter: 10_000, min_thickness: crate::layout::DEFAULT_EDGE_RADIUS }
    }
}

/// Spread, relative to the largest principal spread, below which a direction
/// counts as missing. Round-off in the scatter of exactly collinear or
/// coplanar points already reaches about 1e-8 in these units.
const RANK_TOL: f64 = 1e-6;

/// Approximate minimum-volume enclosing ellipsoid of `points` (Khachiyan's algorithm).
///
/// The points are centered and the affine hull dimension is detected from
/// their principal spreads; the iteration runs in that subspace and the
/// missing directions receive `min_thickness`. The result is rescaled so the
/// farthest point lies exactly on the boundary, which keeps every input point
/// inside while staying within a `(1 + eps)`-factor of the optimal volume
/// (up to the thickness inflation for degenerate inputs).
pub fn mvee(points: &[Point3], opts: &MveeOptions) -> Result<Ellipsoid3> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("minimum enclosing ellipsoid of no points".into()));
    }
    if !(opts.eps > 0.0) || opts.max_iter == 0 {
        return Err(Error::InvalidArgument("eps > 0 and max_iter >= 1 are required".into()));
    }
    let n = points.len() as f64;
    let mean = points.iter().sum::<Point3>() / n;
    let scale = points.iter().map(|p| (p - mean).norm()).fold(0.0, f64::max);

    let mut scatter = Matrix3::zeros();
    for p in points {
        let d = (p - mean) / if scale > 0.0 { scale } else { 1.0 };
        scatter += d * d.transpose();
    }
    let eig = SymmetricEigen::new(scatter);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let basis = Matrix3::from_columns(&order.map(|i| eig.eigenvectors.column(i).into_owned()));
    // Spread of unit-scaled points along each principal direction.
    let rank = if scale > 0.0 {
        let top = eig.eigenvalues[order[0]].max(0.0).sqrt();
        order.iter().filter(|&&i| eig.eigenvalues[i].max(0.0).sqrt() > RANK_TOL * top).count()
    } else {
        0
    };

    let mut semi = [opts.min_thickness; 3];
    let mut dirs = basis;
    let mut center = mean;
    if rank > 0 {
        // Coordinates in the principal subspace, unit scale.
        let coords: Vec<DVector<f64>> = points
            .iter()
            .map(|p| {
                let y = basis.transpose() * ((p - mean) / scale);
                DVector::from_iterator(rank, y.iter().take(rank).copied())
            })
            .collect();
        let (c, form) = khachiyan(&coords, opts.eps, opts.max_iter)?;
        let sub_eig = SymmetricEigen::new(form);
        let sub_basis = basis.columns(0, rank) * &sub_eig.eigenvectors;
        for k in 0..rank {
            semi[k] = scale / sub_eig.eigenvalues[k].sqrt();
            dirs.set_column(k, &sub_basis.column(k));
        }
        center = mean + basis.columns(0, rank) * c * scale;
    }
    if opts.min_thickness > 0.0 {
        semi.iter_mut().for_each(|a| *a = a.max(opts.min_thickness));
    } else if rank < 3 {
        return Err(Error::Degenerate(format!(
            "point set spans {rank} dimension(s) and no minimum thickness is configured"
        )));
    }
    let e = Ellipsoid3::from_axes(center, &dirs, semi)?;
    // Points dropped from a missing direction keep a residual of up to
    // RANK_TOL; grow the ellipsoid if that pushes any of them outside.
    let reach = points.iter().map(|p| e.quadratic_form(p)).fold(0.0, f64::max);
    if reach > 1.0 {
        return e.scaled(reach.sqrt());
    }
    Ok(e)
}

/// Khachiyan's barycentric coordinate ascent on the lifted points. Returns
/// the center and a form scaled so the maximum form value over the points is 1.
fn khachiyan(points: &[DVector<f64>], eps: f64, max_iter: usize) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let d = points[0].len();
    let m = points.len();
    let lifted = DMatrix::from_fn(d + 1, m, |r, c| if r < d { points[c][r] } else { 1.0 });
    let mut u = DVector::from_element(m, 1.0 / m as f64);
    let dd = (d + 1) as f64;

    let weights = |u: &DVector<f64>| -> Result<(usize, f64)> {
        let x = &lifted * DMatrix::from_diagonal(u) * lifted.transpose();
        let inv = x
            .cholesky()
            .ok_or_else(|| Error::Degenerate("lifted scatter matrix is singular".into()))?
            .inverse();
        let mut best = (0, f64::NEG_INFINITY);
        for (j, col) in lifted.column_iter().enumerate() {
            let mj = col.dot(&(&inv * col));
            if mj > best.1 {
                best = (j, mj);
            }
        }
        Ok(best)
    };

    let mut iter = 0;
    let (mut j, mut kappa) = weights(&u)?;
    while kappa > (1.0 + eps) * dd {
        if iter == max_iter {
            warn!("Khachiyan stopped after {max_iter} iterations (kappa = {kappa:.6}, target {dd})");
            break;
        }
        let step = (kappa - dd) / (dd * (kappa - 1.0));
        u *= 1.0 - step;
        u[j] += step;
        (j, kappa) = weights(&u)?;
        iter += 1;
    }

    let pts = lifted.rows(0, d);
    let center = &pts * &u;
    let cov = &pts * DMatrix::from_diagonal(&u) * pts.transpose() - &center * center.transpose();
    let inv = cov
        .cholesky()
        .ok_or_else(|| Error::Degenerate("weighted covariance is singular".into()))?
        .inverse();
    // (x - c)^T cov^-1 (x - c) = x~^T X^-1 x~ - 1 <= kappa - 1 for every point.
    let form = inv / (kappa - 1.0);
    let form = (&form + form.transpose()) / 2.0;
    Ok((center, form))
}
