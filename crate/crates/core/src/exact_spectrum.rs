//! Full (2J+1)-dimensional diagonalization of the cubic CEF Hamiltonian.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::classify_phi;
use crate::linalg::{hermitian_eigen, Eigen};
use crate::spin_algebra::{build_cubic_cef, OperatorMatrix, SpinValue};
use crate::{Error, Result};

pub const DEFAULT_GAP_RATIO: f64 = 10.0;

/// Values closer than this fraction of max|E| count as one level in [`detect_multiplets`].
pub const MERGE_REL: f64 = 1e-12;

/// Eigenpairs of `h`, ascending, with the residual ‖Hv − λv‖ ≤ 1e−9‖H‖ checked.
pub fn diagonalize(h: &OperatorMatrix) -> Result<Eigen> {
    let eig = hermitian_eigen(&h.matrix)?;
    let scale = eig
        .values
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    for (k, &lambda) in eig.values.iter().enumerate() {
        let v = eig.vectors.column(k);
        let r = (&h.matrix * v - v * crate::linalg::real(lambda)).norm();
        if r > 1e-9 * scale {
            return Err(Error::Numerical(format!(
                "eigenpair {k} residual {r:e} exceeds 1e-9 of |H| = {scale:e}"
            )));
        }
    }
    Ok(eig)
}

pub fn eigenvalues(h: &OperatorMatrix) -> Result<Vec<f64>> {
    diagonalize(h).map(|e| e.values)
}

/// Cluster sizes from the bottom of an ascending list.
///
/// Values equal up to [`MERGE_REL`] are merged first. A gap closes the current cluster
/// when it exceeds `ratio` times the running mean of the gaps inside the cluster and is
/// itself no smaller than 1/`ratio` of every gap above it. The second condition keeps
/// staircase sublevel structure together: spacings inside one multiplet can grow by
/// more than `ratio` from one to the next while all of them stay far below the gaps
/// between multiplets. A lone top level is compared with the inner gaps seen so far.
pub fn detect_multiplets(eigs: &[f64], ratio: f64) -> Vec<usize> {
    if eigs.is_empty() {
        return vec![];
    }
    let scale = eigs.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let exact = MERGE_REL * scale.max(1e-300);
    let mut uniq: Vec<(f64, usize)> = Vec::new();
    for &e in eigs {
        match uniq.last_mut() {
            Some(last) if e - last.0 <= exact => last.1 += 1,
            _ => uniq.push((e, 1)),
        }
    }
    let gaps: Vec<f64> = uniq.windows(2).map(|w| w[1].0 - w[0].0).collect();
    // largest gap strictly above each position
    let mut above = vec![0.0f64; gaps.len()];
    for k in (0..gaps.len().saturating_sub(1)).rev() {
        above[k] = above[k + 1].max(gaps[k + 1]);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let mut sizes = Vec::new();
    let mut current = uniq[0].1;
    let mut inner: Vec<f64> = Vec::new();
    let mut all_inner: Vec<f64> = Vec::new();
    for (k, &g) in gaps.iter().enumerate() {
        let last = k + 1 == gaps.len();
        let boundary = if inner.is_empty() && last {
            !all_inner.is_empty() && g > ratio * mean(&all_inner)
        } else {
            let local = inner.is_empty() || g > ratio * mean(&inner);
            local && g * ratio >= above[k]
        };
        if boundary {
            sizes.push(current);
            current = 0;
            all_inner.append(&mut inner);
        } else {
            inner.push(g);
        }
        current += uniq[k + 1].1;
    }
    sizes.push(current);
    sizes
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub phi: f64,
    pub eigenvalues: Vec<f64>,
    pub multiplet_size: usize,
    /// RMS of the ground multiplet after shifting its centroid to zero.
    pub r: f64,
    pub minus_ln_r_over_j: f64,
    /// Mean spacing inside the ground multiplet over the gap to the next level.
    pub gap_ratio: f64,
    /// Full ground-multiplet width over the gap to the next level.
    pub width_ratio: f64,
    /// Classical class of φ.
    pub n_minima: u32,
    pub boundary: bool,
}

#[derive(Debug)]
pub struct SweepResult {
    pub spin: SpinValue,
    /// One entry per grid point, in grid order; failures do not abort the sweep.
    pub points: Vec<Result<SweepPoint>>,
}

impl SweepResult {
    pub fn ok_points(&self) -> impl Iterator<Item = &SweepPoint> {
        self.points.iter().filter_map(|p| p.as_ref().ok())
    }
}

pub fn analyze_point(spin: SpinValue, phi: f64, ratio: f64) -> Result<SweepPoint> {
    let eigs = eigenvalues(&build_cubic_cef(spin, phi)?)?;
    let sizes = detect_multiplets(&eigs, ratio);
    let g = sizes[0];
    let ground = &eigs[..g];
    let centroid = ground.iter().sum::<f64>() / g as f64;
    let r = (ground.iter().map(|e| (e - centroid).powi(2)).sum::<f64>() / g as f64).sqrt();
    let width = ground[g - 1] - ground[0];
    let width_ratio = match eigs.get(g) {
        Some(next) => width / (next - ground[g - 1]),
        None => f64::NAN,
    };
    let gap_ratio = if g > 1 { width_ratio / (g - 1) as f64 } else { 0.0 };
    let class = classify_phi(phi);
    Ok(SweepPoint {
        phi,
        eigenvalues: eigs,
        multiplet_size: g,
        r,
        minus_ln_r_over_j: -r.ln() / spin.j(),
        gap_ratio,
        width_ratio,
        n_minima: class.n_minima,
        boundary: class.boundary,
    })
}

/// Parallel over grid points, results kept in grid order.
pub fn sweep_phi(spin: SpinValue, grid: &[f64], ratio: f64) -> SweepResult {
    let points = grid.par_iter().map(|&phi| analyze_point(spin, phi, ratio)).collect();
    SweepResult { spin, points }
}

/// −ln((E1 − E0)/4)/J with E0, E1 the lowest two sublevel means of the 6-fold multiplet.
pub fn splitting_exponent(spin: SpinValue, u: f64) -> Result<f64> {
    if !(u > -2.0 / 3.0 && u < 1.0 / 15.0) {
        return Err(Error::Domain(format!("u = {u} outside the single-path window (-2/3, 1/15)")));
    }
    let (e0, e1) = lowest_sublevels(spin, u.atan())?;
    Ok(-((e1 - e0) / 4.0).ln() / spin.j())
}

/// Sublevel means (E0, E1) of the 6-fold ground multiplet at angle φ.
pub fn lowest_sublevels(spin: SpinValue, phi: f64) -> Result<(f64, f64)> {
    let eigs = eigenvalues(&build_cubic_cef(spin, phi)?)?;
    let sizes = detect_multiplets(&eigs, DEFAULT_GAP_RATIO);
    if sizes[0] != 6 {
        return Err(Error::Region(format!(
            "ground multiplet at phi = {phi} has {} levels, not 6",
            sizes[0]
        )));
    }
    let six = &eigs[..6];
    let spread = six[5] - six[0];
    let mut means = Vec::new();
    let mut start = 0;
    for k in 1..=6 {
        if k == 6 || six[k] - six[k - 1] > 0.1 * spread {
            means.push(six[start..k].iter().sum::<f64>() / (k - start) as f64);
            start = k;
        }
    }
    if means.len() < 2 {
        return Err(Error::Numerical("ground multiplet is unresolved".into()));
    }
    Ok((means[0], means[1]))
}
