//! Reduced N×N tunneling Hamiltonians with Berry-phase gauges.
//!
//! Every plaquette c of a configuration must satisfy Σ_{∂c} φ_ij ≡ J·Ω(c) (mod 2π).
//! The gauge is fixed on a spanning tree and the remaining edges are solved
//! by integer elimination, so that the hopping matrix is w·exp(iφ_ij).

use std::collections::VecDeque;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geometry::{dot, ConfigId, Configuration, EdgeKind, Group, Vec3};
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::spin_algebra::SpinValue;
use crate::{Error, Result};

/// Wraps an angle into (−π, π].
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

/// One phase per edge of the configuration, in edge order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugePhases {
    pub phases: Vec<f64>,
}

/// Σ_{∂c} φ − J·Ω(c) reduced mod 2π, per plaquette.
pub fn plaquette_residuals(config: &Configuration, j: f64, phases: &[f64]) -> Vec<f64> {
    config
        .plaquettes
        .iter()
        .map(|p| {
            let s: f64 = p.boundary.iter().map(|&(e, o)| o as f64 * phases[e]).sum();
            wrap_angle(s - j * p.solid_angle)
        })
        .collect()
}

fn residual_tol(j: f64) -> f64 {
    1e-10 * j.abs().max(1.0)
}

pub fn solve_gauge(config: &Configuration, spin: SpinValue) -> Result<GaugePhases> {
    solve_gauge_flux(config, spin.j())
}

/// Gauge for an arbitrary real flux multiplier j (j = −J gives the time-reversed gauge).
pub fn solve_gauge_flux(config: &Configuration, j: f64) -> Result<GaugePhases> {
    let n_e = config.edges.len();
    let n_p = config.plaquettes.len();
    let mut tree = vec![false; n_e];
    let mut seen = vec![false; config.n_sites];
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); config.n_sites];
    for (k, e) in config.edges.iter().enumerate() {
        adj[e.i].push((e.j, k));
        adj[e.j].push((e.i, k));
    }
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(u, k) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                tree[k] = true;
                queue.push_back(u);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Geometry(format!("{} edge graph is disconnected", config.id)));
    }
    let cols: Vec<usize> = (0..n_e).filter(|&k| !tree[k]).collect();
    let mut m = vec![vec![0i64; cols.len()]; n_p];
    let mut rhs = vec![0.0; n_p];
    for (r, p) in config.plaquettes.iter().enumerate() {
        for &(e, o) in &p.boundary {
            if let Some(c) = cols.iter().position(|&x| x == e) {
                m[r][c] += o as i64;
            }
        }
        rhs[r] = wrap_angle(j * p.solid_angle);
    }

    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols.len() {
        let Some(p) = (row..n_p).find(|&i| m[i][c].abs() == 1) else {
            continue;
        };
        m.swap(row, p);
        rhs.swap(row, p);
        if m[row][c] == -1 {
            m[row].iter_mut().for_each(|x| *x = -*x);
            rhs[row] = -rhs[row];
        }
        for i in 0..n_p {
            if i != row && m[i][c] != 0 {
                let f = m[i][c];
                for k in 0..cols.len() {
                    m[i][k] -= f * m[row][k];
                }
                rhs[i] -= f as f64 * rhs[row];
            }
        }
        pivots.push((row, c));
        row += 1;
    }
    for i in row..n_p {
        if m[i].iter().any(|&x| x != 0) {
            return Err(Error::Numerical(format!(
                "{}: flux system has no unimodular pivot",
                config.id
            )));
        }
        if wrap_angle(rhs[i]).abs() > 1e-9 {
            return Err(Error::Geometry(format!(
                "{}: inconsistent flux equations (residual {})",
                config.id, rhs[i]
            )));
        }
    }
    let mut phases = vec![0.0; n_e];
    for (r, c) in pivots {
        phases[cols[c]] = wrap_angle(rhs[r]);
    }
    let worst = plaquette_residuals(config, j, &phases)
        .iter()
        .fold(0.0f64, |a, r| a.max(r.abs()));
    if worst > residual_tol(j) {
        return Err(Error::Numerical(format!(
            "{}: gauge residual {worst:e} above tolerance",
            config.id
        )));
    }
    Ok(GaugePhases { phases })
}

/// N×N effective Hamiltonian.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    pub matrix: CMatrix,
    pub config: ConfigId,
    pub spin: SpinValue,
    pub w: f64,
    pub field: Vec3,
    pub x: Option<f64>,
}

fn check_x(config: &Configuration, x: Option<f64>) -> Result<f64> {
    match (config.id.is_multipath(), x) {
        (true, Some(v)) if v.is_finite() => Ok(v),
        (true, Some(v)) => Err(Error::InvalidArgument(format!("x = {v} is not finite"))),
        (true, None) => Err(Error::InvalidArgument(format!("{} needs the path factor x", config.id))),
        (false, Some(_)) => Err(Error::InvalidArgument(format!(
            "x only applies to the multipath configuration, not {}",
            config.id
        ))),
        (false, None) => Ok(1.0),
    }
}

/// Hopping matrix with flux multiplier `j` and the given site-diagonal.
///
/// Nearest-neighbour links carry w; the multipath face diagonals carry x·w.
pub fn effective_matrix(
    config: &Configuration,
    j: f64,
    w: f64,
    x: Option<f64>,
    diagonal: &[f64],
) -> Result<CMatrix> {
    let xv = check_x(config, x)?;
    if diagonal.len() != config.n_sites {
        return Err(Error::InvalidArgument(format!(
            "diagonal has {} entries for {} sites",
            diagonal.len(),
            config.n_sites
        )));
    }
    let gauge = solve_gauge_flux(config, j)?;
    let n = config.n_sites;
    let mut m = CMatrix::zeros(n, n);
    for (k, e) in config.edges.iter().enumerate() {
        let amp = match e.kind {
            EdgeKind::Nn => w,
            EdgeKind::Nnn => xv * w,
        };
        let t = Complex64::from_polar(amp, gauge.phases[k]);
        m[(e.i, e.j)] += t;
        m[(e.j, e.i)] += t.conj();
    }
    for (k, d) in diagonal.iter().enumerate() {
        m[(k, k)] += Complex64::new(*d, 0.0);
    }
    Ok(m)
}

/// Zeeman diagonal −J·h·n_k with h = gμ_B·H.
pub fn build_effective(
    config: &Configuration,
    spin: SpinValue,
    w: f64,
    h: Vec3,
    x: Option<f64>,
) -> Result<EffectiveHamiltonian> {
    let j = spin.j();
    let diag: Vec<f64> = config.vertices.iter().map(|&n| -j * dot(h, n)).collect();
    Ok(EffectiveHamiltonian {
        matrix: effective_matrix(config, j, w, x, &diag)?,
        config: config.id,
        spin,
        w,
        field: h,
        x,
    })
}

/// Same as [`build_effective`] but in the reduced field h̄ = hJ, diagonal −h̄·n_k.
pub fn build_effective_reduced(
    config: &Configuration,
    spin: SpinValue,
    w: f64,
    hbar: Vec3,
    x: Option<f64>,
) -> Result<EffectiveHamiltonian> {
    let diag: Vec<f64> = config.vertices.iter().map(|&n| -dot(hbar, n)).collect();
    let j = spin.j();
    Ok(EffectiveHamiltonian {
        matrix: effective_matrix(config, j, w, x, &diag)?,
        config: config.id,
        spin,
        w,
        field: if j > 0.0 { [hbar[0] / j, hbar[1] / j, hbar[2] / j] } else { [0.0; 3] },
        x,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub value: f64,
    pub multiplicity: usize,
}

/// Distinct levels in increasing order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub levels: Vec<Level>,
    /// Absolute gap at or below which eigenvalues were merged.
    pub tol: f64,
}

pub const DEFAULT_TOL: f64 = 1e-8;

impl Spectrum {
    /// Clusters sorted values with gaps ≤ tol·max(1, width).
    pub fn from_values(values: &[f64], tol: f64) -> Spectrum {
        let mut v: Vec<f64> = values.to_vec();
        v.sort_by(f64::total_cmp);
        let width = match (v.first(), v.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        };
        let abs_tol = tol * width.max(1.0);
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for x in v {
            match groups.last_mut() {
                Some(g) if x - g[g.len() - 1] <= abs_tol => g.push(x),
                _ => groups.push(vec![x]),
            }
        }
        Spectrum {
            levels: groups
                .iter()
                .map(|g| Level {
                    value: g.iter().sum::<f64>() / g.len() as f64,
                    multiplicity: g.len(),
                })
                .collect(),
            tol: abs_tol,
        }
    }

    /// Merges (value, multiplicity) pairs whose values coincide within tol·max(1, width).
    pub fn from_pairs(pairs: &[(f64, usize)], tol: f64) -> Spectrum {
        let flat: Vec<f64> = pairs
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(v, m))
            .collect();
        Spectrum::from_values(&flat, tol)
    }

    pub fn size(&self) -> usize {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    /// Every eigenvalue repeated by multiplicity, ascending.
    pub fn flatten(&self) -> Vec<f64> {
        self.levels
            .iter()
            .flat_map(|l| std::iter::repeat_n(l.value, l.multiplicity))
            .collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.multiplicity).collect()
    }

    /// Largest level difference, or None if the multiplicity patterns differ.
    pub fn max_deviation(&self, other: &Spectrum) -> Option<f64> {
        if self.multiplicities() != other.multiplicities() {
            return None;
        }
        Some(
            self.levels
                .iter()
                .zip(&other.levels)
                .map(|(a, b)| (a.value - b.value).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn matches(&self, other: &Spectrum, tol: f64) -> bool {
        self.max_deviation(other).is_some_and(|d| d <= tol)
    }

    /// E → −E
    pub fn negated(&self) -> Spectrum {
        Spectrum {
            levels: self
                .levels
                .iter()
                .rev()
                .map(|l| Level { value: -l.value, multiplicity: l.multiplicity })
                .collect(),
            tol: self.tol,
        }
    }
}

/// Eigenvalues clustered with relative tolerance `tol` (default 1e−8).
pub fn spectrum(h: &EffectiveHamiltonian, tol: Option<f64>) -> Result<Spectrum> {
    matrix_spectrum(&h.matrix, tol)
}

pub fn matrix_spectrum(m: &CMatrix, tol: Option<f64>) -> Result<Spectrum> {
    let e = hermitian_eigenvalues(m)?;
    Ok(Spectrum::from_values(&e, tol.unwrap_or(DEFAULT_TOL)))
}

/// U·M·U† with U = diag(e^{iθ_k}); leaves the spectrum unchanged.
pub fn gauge_transform(m: &CMatrix, theta: &[f64]) -> Result<CMatrix> {
    if theta.len() != m.nrows() {
        return Err(Error::InvalidArgument(format!(
            "{} gauge angles for a {}x{} matrix",
            theta.len(),
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(CMatrix::from_fn(m.nrows(), m.ncols(), |a, b| {
        m[(a, b)] * Complex64::from_polar(1.0, theta[a] - theta[b])
    }))
}

/// Extra inputs some closed forms need.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormParams {
    pub alpha: Option<f64>,
    /// Multipath factor x = 2cos(JΩ/2).
    pub x: Option<f64>,
}

fn chi_o4(x: f64) -> f64 {
    let s = (2.0 * x / 3.0).sin() * (x / 2.0).sin();
    (2.0 * x / 3.0).cos() * (x / 2.0).cos() - ((x / 3.0).cos().powi(2) + s * s).sqrt()
}

fn xi_o3(x: f64) -> f64 {
    let rho = (4.0 * ((x / 2.0).sin() * (x / 3.0).sin()).powi(2) + 1.0).sqrt();
    let v = 3.0 + 2.0 * x.cos() * (2.0 * x / 3.0).cos() + 4.0 * (x / 2.0).cos() * (x / 3.0).cos() * rho;
    // v is a cancellation of O(10) terms; anything within rounding of zero is a zero mode,
    // otherwise √ would amplify 1e-15 noise to 3e-8
    if v < 64.0 * f64::EPSILON * (5.0 + 4.0 * rho) {
        return 0.0;
    }
    v.sqrt()
}

/// 2J reduced into [0, s/2] by J → |J + n·s/2|.
pub fn reduced_two_j(two_j: u32, s: u32) -> u32 {
    let r = two_j % s;
    r.min(s - r)
}

/// Representative of the class of J under J → |J + n·s/2|, in [0, s/4].
pub fn equivalence_class(spin: SpinValue, config: ConfigId) -> Result<SpinValue> {
    let s = config.s_parameter().ok_or_else(|| {
        Error::InvalidArgument(format!("{config} has no fixed plaquette flux"))
    })?;
    Ok(SpinValue::new(reduced_two_j(spin.two_j, s)))
}

/// True when a table or closed form exists for this (config, J).
pub fn has_reference_spectrum(config: ConfigId, spin: SpinValue) -> bool {
    match config {
        ConfigId::Y2 => spin.two_j % 4 == 2,
        _ => true,
    }
}

fn table_y5(t: u32) -> Vec<(f64, usize)> {
    let r5 = 5f64.sqrt();
    let c1 = (PI / 10.0).cos();
    let c3 = (3.0 * PI / 10.0).cos();
    match t {
        0 => vec![(-r5, 3), (-1.0, 5), (r5, 3), (5.0, 1)],
        1 => vec![(-2.0 * c1, 6), ((3.0 - r5) * c1, 4), (2.0 * r5 * c1, 2)],
        2 => vec![(-r5, 4), ((r5 - 3.0) / 2.0, 5), ((5.0 + r5) / 2.0, 3)],
        3 => vec![(-2.0 * r5 * c3, 2), (-2.0 * c3, 6), ((3.0 + r5) * c3, 4)],
        4 => vec![(-r5, 4), ((r5 - 5.0) / 2.0, 3), ((r5 + 3.0) / 2.0, 5)],
        5 => vec![(-r5, 6), (r5, 6)],
        6 => vec![(-(r5 + 3.0) / 2.0, 5), ((5.0 - r5) / 2.0, 3), (r5, 4)],
        7 => vec![(-(3.0 + r5) * c3, 4), (2.0 * c3, 6), (2.0 * r5 * c3, 2)],
        8 => vec![(-(5.0 + r5) / 2.0, 3), ((3.0 - r5) / 2.0, 5), (r5, 4)],
        9 => vec![(-2.0 * r5 * c1, 2), ((r5 - 3.0) * c1, 4), (2.0 * c1, 6)],
        _ => vec![(-5.0, 1), (-r5, 3), (1.0, 5), (r5, 3)],
    }
}

fn table_y3(t: u32) -> Vec<(f64, usize)> {
    let r3 = 3f64.sqrt();
    let r5 = 5f64.sqrt();
    let r7 = 7f64.sqrt();
    let r13 = 13f64.sqrt();
    match t {
        0 => vec![(-r5, 3), (-2.0, 4), (0.0, 4), (1.0, 5), (r5, 3), (3.0, 1)],
        1 => vec![
            (-(r3 + r7) / 2.0, 6),
            (r3 * (1.0 - r5) / 2.0, 2),
            ((r7 - r3) / 2.0, 6),
            (r3, 4),
            (r3 * (1.0 + r5) / 2.0, 2),
        ],
        2 => vec![
            (-(1.0 + r13) / 2.0, 5),
            (-1.0, 4),
            ((3.0 - r5) / 2.0, 3),
            ((r13 - 1.0) / 2.0, 5),
            ((3.0 + r5) / 2.0, 3),
        ],
        3 => vec![(-6f64.sqrt(), 4), (-1.0, 6), (1.0, 6), (6f64.sqrt(), 4)],
        4 => vec![
            (-(3.0 + r5) / 2.0, 3),
            ((1.0 - r13) / 2.0, 5),
            (-(3.0 - r5) / 2.0, 3),
            (1.0, 4),
            ((1.0 + r13) / 2.0, 5),
        ],
        5 => vec![
            (-r3 * (1.0 + r5) / 2.0, 2),
            (-r3, 4),
            ((r3 - r7) / 2.0, 6),
            (r3 * (r5 - 1.0) / 2.0, 2),
            ((r3 + r7) / 2.0, 6),
        ],
        _ => vec![(-3.0, 1), (-r5, 3), (-1.0, 5), (0.0, 4), (2.0, 4), (r5, 3)],
    }
}

fn table_multipath(t: u32, x: f64) -> Vec<(f64, usize)> {
    let r3 = 3f64.sqrt();
    let r6 = 6f64.sqrt();
    match t {
        0 => vec![(-3.0 * (1.0 - x), 1), (-(1.0 + x), 3), (1.0 - x, 3), (3.0 * (1.0 + x), 1)],
        1 => vec![(-(r6 - x * r3), 2), (-x * r3, 4), (r6 + x * r3, 2)],
        2 => vec![(-2.0 * (1.0 - x / 2.0), 3), (-3.0 * x, 2), (2.0 * (1.0 + x / 2.0), 3)],
        3 => {
            let e = (3.0 * (1.0 + x * x)).sqrt();
            vec![(-e, 4), (e, 4)]
        }
        4 => vec![(-2.0 * (1.0 + x / 2.0), 3), (3.0 * x, 2), (2.0 * (1.0 - x / 2.0), 3)],
        5 => vec![(-(r6 + x * r3), 2), (x * r3, 4), (r6 - x * r3, 2)],
        _ => vec![(-3.0 * (1.0 + x), 1), (-(1.0 - x), 3), (1.0 + x, 3), (3.0 * (1.0 - x), 1)],
    }
}

fn table_hybrid(t: u32) -> Vec<(f64, usize)> {
    let r3 = 3f64.sqrt();
    let pm = |v: f64, m: usize| vec![(-v, m), (v, m)];
    let mut out = match t {
        0 => [pm(2.0 * r3, 1), pm(2.0, 3), vec![(0.0, 6)]].concat(),
        1 => [pm((6.0 + 2.0 * r3).sqrt(), 2), pm((3.0 - r3).sqrt(), 4), vec![(0.0, 2)]].concat(),
        2 => [pm(1.0 + r3, 3), pm(r3 - 1.0, 3), vec![(0.0, 2)]].concat(),
        3 => [pm(6f64.sqrt(), 4), vec![(0.0, 6)]].concat(),
        4 => [pm(6f64.sqrt(), 2), pm(2.0, 3), vec![(0.0, 4)]].concat(),
        5 => [pm((6.0 - 2.0 * r3).sqrt(), 2), pm((3.0 + r3).sqrt(), 4), vec![(0.0, 2)]].concat(),
        _ => [pm(2.0, 6), vec![(0.0, 2)]].concat(),
    };
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn table_o2(spin: SpinValue, alpha: f64) -> Vec<(f64, usize)> {
    let x = spin.j() * (alpha + 2.0 * PI) / 4.0;
    let (s, c) = x.sin_cos();
    if spin.is_half_integer() {
        let r = (2.0 + c * c).sqrt();
        let q = 2f64.sqrt() * s;
        vec![(2.0 * (c + q), 2), (2.0 * (c - q), 2), (-c + r, 4), (-c - r, 4)]
    } else {
        let r = (8.0 - 7.0 * c * c).max(0.0).sqrt();
        vec![(4.0 * c, 1), (-2.0 * c, 2), (2.0 * c, 3), (-c + r, 3), (-c - r, 3)]
    }
}

fn table_y2_odd(spin: SpinValue, alpha: f64) -> Vec<(f64, usize)> {
    let x = (spin.j() * (alpha + 3.0 * PI) / 5.0).cos();
    let r5 = 5f64.sqrt();
    let a = (4.0 - 3.0 * x * x).sqrt();
    let b = (4.0 + (5.0 - 4.0 * r5) * x * x).max(0.0).sqrt();
    let c = (4.0 + (5.0 + 4.0 * r5) * x * x).sqrt();
    vec![
        (1.0 + 2.0 * x, 4),
        (-1.0 + 2.0 * x, 4),
        (-x + a, 5),
        (-x - a, 5),
        ((1.0 + r5) * (-x + b) / 2.0, 3),
        ((1.0 + r5) * (-x - b) / 2.0, 3),
        ((1.0 - r5) * (-x + c) / 2.0, 3),
        ((1.0 - r5) * (-x - c) / 2.0, 3),
    ]
}

/// Analytic spectra in units of w, scaled by w (a negative w inverts the spectrum).
pub fn closed_form_spectrum(
    config: ConfigId,
    spin: SpinValue,
    w: f64,
    params: ClosedFormParams,
) -> Result<Spectrum> {
    let j = spin.j();
    let need_alpha = || {
        params.alpha.ok_or_else(|| Error::InvalidArgument(format!("{config} needs alpha")))
    };
    let pairs: Vec<(f64, usize)> = match config {
        ConfigId::D2_2 | ConfigId::D4_4 | ConfigId::D6_6 => {
            let e = match config {
                ConfigId::D2_2 => 2.0 * (PI * j).cos(),
                ConfigId::D4_4 => 4.0 * (PI * j).cos() * (PI * j / 2.0).cos(),
                _ => 2.0 * (PI * j).cos() * (1.0 + 2.0 * (2.0 * PI * j / 3.0).cos()),
            };
            vec![(-e, 1), (e, 1)]
        }
        ConfigId::D4_2 | ConfigId::D6_2 => {
            let n = config.n_sites();
            (0..n)
                .map(|k| (2.0 * (2.0 * PI * (k as f64 + j) / n as f64).cos(), 1))
                .collect()
        }
        ConfigId::O4 => (0..6)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                (sign * 2.0 * chi_o4(PI * (j + 2.0 * k as f64)), 1)
            })
            .collect(),
        ConfigId::O3 => (0..4)
            .flat_map(|k| {
                let e = xi_o3(PI * (j + 3.0 * k as f64));
                [(e, 1), (-e, 1)]
            })
            .collect(),
        ConfigId::O3Multipath => {
            let x = params.x.ok_or_else(|| {
                Error::InvalidArgument("multipath closed form needs x".into())
            })?;
            table_multipath(reduced_two_j(spin.two_j, 12), x)
        }
        ConfigId::Y5 => table_y5(reduced_two_j(spin.two_j, 20)),
        ConfigId::Y3 => table_y3(reduced_two_j(spin.two_j, 12)),
        ConfigId::Hybrid14 => table_hybrid(reduced_two_j(spin.two_j, 12)),
        ConfigId::O2 => table_o2(spin, need_alpha()?),
        ConfigId::Y2 => {
            if !has_reference_spectrum(config, spin) {
                return Err(Error::UnsupportedClosedForm(format!("Y2 at J = {spin} (odd J only)")));
            }
            table_y2_odd(spin, need_alpha()?)
        }
    };
    let scaled: Vec<(f64, usize)> = pairs.iter().map(|&(v, m)| (w * v, m)).collect();
    Ok(Spectrum::from_pairs(&scaled, 1e-9))
}

/// Tr Hⁿ for n = 0..=n_max.
pub fn trace_invariants(h: &CMatrix, n_max: usize) -> Vec<f64> {
    let n = h.nrows();
    let mut p = CMatrix::identity(n, n);
    let mut out = Vec::with_capacity(n_max + 1);
    for k in 0..=n_max {
        if k > 0 {
            p = &p * h;
        }
        out.push(p.trace().re);
    }
    out
}

/// Upper end of the split-trajectory solid angle.
pub fn omega_cap(group: Group) -> Result<f64> {
    match group {
        Group::O => Ok(PI / 3.0),
        Group::Y => Ok(2.0 * PI / 15.0),
        g => Err(Error::InvalidArgument(format!("no double-path regime for {g}"))),
    }
}

/// w₁ + w₂ = 2|w|·e^{i(φ₁ − JΩ/2)}·cos(JΩ/2).
pub fn double_path_complex(w: f64, phi1: f64, spin: SpinValue, omega: f64) -> Complex64 {
    let j = spin.j();
    Complex64::from_polar(w.abs(), phi1) + Complex64::from_polar(w.abs(), phi1 - j * omega)
}

/// |w_e| = 2|w||cos(JΩ/2)| for 0 ≤ Ω < cap(group).
pub fn double_path_amplitude(w: f64, spin: SpinValue, omega: f64, group: Group) -> Result<f64> {
    let cap = omega_cap(group)?;
    if !(0.0..cap).contains(&omega) {
        return Err(Error::Domain(format!("Omega = {omega} outside [0, {cap})")));
    }
    Ok(2.0 * w.abs() * (spin.j() * omega / 2.0).cos().abs())
}

/// Ground-state response of C(O,2) to an infinitesimal field along a 4-fold axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundResponse {
    /// Moment in units of gJμ_B.
    Moment(f64),
    /// Susceptibility in units of (gJμ_B)²/w.
    Susceptibility(f64),
}

pub fn co2_ground_response(spin: SpinValue, alpha: f64, w: f64) -> Result<GroundResponse> {
    if !(w > 0.0) {
        return Err(Error::InvalidArgument(format!("w = {w} must be positive")));
    }
    let x = spin.j() * (alpha + 2.0 * PI) / 4.0;
    let (s, c) = x.sin_cos();
    if spin.is_half_integer() {
        if c < (3.0 * PI / 8.0).cos() {
            return Ok(GroundResponse::Moment(1.0 / 3.0));
        }
        let r = (2.0 + c * c).sqrt();
        let num = c * c + 5.0 + 3.0 * c * r + 2.0 * 2f64.sqrt() * s.abs() * (3.0 * c + r);
        Ok(GroundResponse::Moment((num / (2.0 * (2.0 + c * c))).sqrt() / 3.0))
    } else if c > -0.5 {
        Ok(GroundResponse::Moment(2.0 * s.abs() / (2.0 * (8.0 - 7.0 * c * c)).sqrt()))
    } else {
        Ok(GroundResponse::Susceptibility(-1.0 / (3.0 * w * c)))
    }
}

/// JSON form of a spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub config: String,
    pub two_j: u32,
    pub levels: Vec<Level>,
    /// False where no closed form or table exists to check against.
    pub verified: bool,
}

impl SpectrumReport {
    pub fn new(config: ConfigId, spin: SpinValue, s: &Spectrum) -> Self {
        SpectrumReport {
            config: config.name().to_string(),
            two_j: spin.two_j,
            levels: s.levels.clone(),
            verified: has_reference_spectrum(config, spin),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_configuration, ConfigParams};

    fn cfg(id: ConfigId) -> Configuration {
        make_configuration(id, ConfigParams::default()).unwrap()
    }

    #[test]
    fn zero_spin_has_trivial_gauge() {
        for id in [ConfigId::O4, ConfigId::O3, ConfigId::Y5, ConfigId::D6_6, ConfigId::O3Multipath] {
            let g = solve_gauge(&cfg(id), SpinValue::new(0)).unwrap();
            assert!(g.phases.iter().all(|p| p.abs() < 1e-15));
        }
    }

    #[test]
    fn explicit_o4_phases_satisfy_plaquettes() {
        // sites 1..6 = +z, −z, +x, −x, +y, −y; φ13 = φ14 = φ15 = φ16 = φ25 = 0
        let c = cfg(ConfigId::O4);
        for tj in 0..12 {
            let j = tj as f64 / 2.0;
            let table = [
                ((2, 3), -PI * j),
                ((2, 4), PI * j),
                ((2, 6), 2.0 * PI * j),
                ((3, 5), PI * j / 2.0),
                ((3, 6), -PI * j / 2.0),
                ((4, 5), -PI * j / 2.0),
                ((4, 6), PI * j / 2.0),
            ];
            let phases: Vec<f64> = c
                .edges
                .iter()
                .map(|e| {
                    let (a, b) = (e.i + 1, e.j + 1);
                    table
                        .iter()
                        .find_map(|&((p, q), v)| {
                            if (p, q) == (a, b) {
                                Some(v)
                            } else if (q, p) == (a, b) {
                                Some(-v)
                            } else {
                                None
                            }
                        })
                        .unwrap_or(0.0)
                })
                .collect();
            let r = plaquette_residuals(&c, j, &phases);
            assert!(r.iter().all(|x| x.abs() < 1e-12), "J={j}: {r:?}");
        }
    }

    #[test]
    fn ring_loop_phase() {
        let c = cfg(ConfigId::D6_2);
        for tj in 0..8 {
            let g = solve_gauge(&c, SpinValue::new(tj)).unwrap();
            let loop_sum: f64 = g.phases.iter().sum();
            assert!(wrap_angle(loop_sum - 2.0 * PI * tj as f64 / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn o4_row_sums_at_zero_spin() {
        let h = build_effective(&cfg(ConfigId::O4), SpinValue::new(0), 1.0, [0.0; 3], None).unwrap();
        for r in 0..6 {
            let s: Complex64 = h.matrix.row(r).iter().sum();
            assert!((s - Complex64::new(4.0, 0.0)).norm() < 1e-14);
        }
        let s = spectrum(&h, None).unwrap();
        assert_eq!(s.multiplicities(), vec![2, 3, 1]);
        assert!((s.levels[0].value + 2.0).abs() < 1e-12 && (s.levels[2].value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn o4_zeeman_diagonal() {
        let h = build_effective(&cfg(ConfigId::O4), SpinValue::new(4), 1.0, [0.0, 0.0, 0.3], None).unwrap();
        let d: Vec<f64> = (0..6).map(|k| h.matrix[(k, k)].re).collect();
        let want = [-0.6, 0.6, 0.0, 0.0, 0.0, 0.0];
        for (a, b) in d.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn d44_offdiagonal() {
        let c = cfg(ConfigId::D4_4);
        for tj in 0..10 {
            let j = tj as f64 / 2.0;
            let h = build_effective(&c, SpinValue::new(tj), 1.0, [0.0; 3], None).unwrap();
            let want = (4.0 * (PI * j).cos() * (PI * j / 2.0).cos()).abs();
            assert!((h.matrix[(0, 1)].norm() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn x_only_for_multipath() {
        let s = SpinValue::new(2);
        assert!(build_effective(&cfg(ConfigId::O4), s, 1.0, [0.0; 3], Some(0.5)).is_err());
        assert!(build_effective(&cfg(ConfigId::O3Multipath), s, 1.0, [0.0; 3], None).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(
            &build_effective(&cfg(ConfigId::O3), SpinValue::new(1), 1.0, [0.0; 3], None).unwrap(),
            None,
        )
        .unwrap();
        let r6 = 6f64.sqrt();
        let want = Spectrum::from_pairs(&[(-r6, 2), (0.0, 4), (r6, 2)], 1e-9);
        assert!(s.matches(&want, 1e-10));
        let h = spectrum(
            &build_effective(&cfg(ConfigId::Hybrid14), SpinValue::new(0), 1.0, [0.0; 3], None).unwrap(),
            None,
        )
        .unwrap();
        assert_eq!(h.multiplicities(), vec![1, 3, 6, 3, 1]);
    }

    #[test]
    fn d66_closed_form() {
        let s = closed_form_spectrum(ConfigId::D6_6, SpinValue::new(6), 1.0, ClosedFormParams::default())
            .unwrap();
        assert!((s.levels[0].value + 6.0).abs() < 1e-12 && (s.levels[1].value - 6.0).abs() < 1e-12);
    }

    #[test]
    fn o2_at_cos_one() {
        // J = 4 and α = 0 give x = 2π, cos x = 1 (α = 0 is only a formula check)
        let s = closed_form_spectrum(
            ConfigId::O2,
            SpinValue::new(8),
            1.0,
            ClosedFormParams { alpha: Some(0.0), x: None },
        )
        .unwrap();
        let want = Spectrum::from_pairs(&[(-2.0, 5), (0.0, 3), (2.0, 3), (4.0, 1)], 1e-9);
        assert!(s.matches(&want, 1e-12), "{s:?}");
    }

    #[test]
    fn y2_even_unsupported() {
        let e = closed_form_spectrum(
            ConfigId::Y2,
            SpinValue::new(4),
            1.0,
            ClosedFormParams { alpha: Some(0.3), x: None },
        );
        assert!(matches!(e, Err(Error::UnsupportedClosedForm(_))));
    }

    #[test]
    fn o4_traces() {
        let c = cfg(ConfigId::O4);
        for tj in 0..8 {
            let h = build_effective(&c, SpinValue::new(tj), 1.0, [0.0; 3], None).unwrap();
            let t = trace_invariants(&h.matrix, 3);
            let j = tj as f64 / 2.0;
            let want = [6.0, 0.0, 24.0, 48.0 * (PI * j / 2.0).cos()];
            for (a, b) in t.iter().zip(want) {
                assert!((a - b).abs() < 1e-10, "{t:?}");
            }
        }
        let o3 = build_effective(&cfg(ConfigId::O3), SpinValue::new(3), 1.0, [0.0; 3], None).unwrap();
        assert!(trace_invariants(&o3.matrix, 3)[3].abs() < 1e-12);
    }

    #[test]
    fn equivalence_examples() {
        assert_eq!(equivalence_class(SpinValue::new(10), ConfigId::O4).unwrap().two_j, 2);
        assert_eq!(equivalence_class(SpinValue::new(6), ConfigId::O3).unwrap().two_j, 0);
        assert_eq!(equivalence_class(SpinValue::new(3), ConfigId::Y5).unwrap().two_j, 3);
        assert!(equivalence_class(SpinValue::new(3), ConfigId::O2).is_err());
    }

    #[test]
    fn double_path() {
        let s = SpinValue::new(48);
        assert_eq!(double_path_amplitude(1.5, s, 0.0, Group::O).unwrap(), 3.0);
        assert!(double_path_amplitude(1.0, s, PI / 24.0, Group::O).unwrap() < 1e-14);
        assert!(double_path_amplitude(1.0, s, PI / 3.0, Group::O).is_err());
        assert!(double_path_amplitude(1.0, s, 0.1, Group::D4).is_err());
        let z = double_path_complex(1.0, 0.3, s, 0.2);
        assert!((z.norm() - double_path_amplitude(1.0, s, 0.2, Group::O).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn co2_response_branches() {
        // integer J, cos x = −1: J = 2, α = 0 → x = π
        match co2_ground_response(SpinValue::new(4), 0.0, 1.0).unwrap() {
            GroundResponse::Susceptibility(c) => assert!((c - 1.0 / 3.0).abs() < 1e-14),
            r => panic!("{r:?}"),
        }
        // half-integer J with cos x = −1: J = 1/2, α = 2π → x = π (formula check)
        match co2_ground_response(SpinValue::new(1), 2.0 * PI, 1.0).unwrap() {
            GroundResponse::Moment(m) => assert!((m - 1.0 / 3.0).abs() < 1e-14),
            r => panic!("{r:?}"),
        }
        match co2_ground_response(SpinValue::new(8), 0.0, 1.0).unwrap() {
            GroundResponse::Moment(m) => assert!(m.abs() < 1e-14),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn report_flags_unverified_y2() {
        let s = Spectrum::from_values(&[0.0], 1e-8);
        assert!(!SpectrumReport::new(ConfigId::Y2, SpinValue::new(4), &s).verified);
        assert!(SpectrumReport::new(ConfigId::Y2, SpinValue::new(2), &s).verified);
    }

    #[test]
    fn gauge_transform_keeps_spectrum() {
        let c = cfg(ConfigId::O3);
        let h = build_effective(&c, SpinValue::new(3), 1.0, [0.2, 0.0, -0.1], None).unwrap().matrix;
        let theta: Vec<f64> = (0..8).map(|k| 0.7 * k as f64).collect();
        let g = gauge_transform(&h, &theta).unwrap();
        let a = matrix_spectrum(&h, None).unwrap().flatten();
        let b = matrix_spectrum(&g, None).unwrap().flatten();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!((g[(0, 1)] - h[(0, 1)]).norm() > 1e-3 || h[(0, 1)].norm() == 0.0);
        assert!(gauge_transform(&h, &theta[..3]).is_err());
    }
}
