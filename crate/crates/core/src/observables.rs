//! Susceptibility, magnetization oscillations and the order-of-magnitude estimators.
//!
//! Energies are in units of w, temperatures in w/k_B, and susceptibilities are
//! coefficients of (gJμ_B)². The field enters the effective model in the reduced form
//! h̄ = gμ_B·H·J, so that a site polarized along n_k shifts by −h̄·n_k.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::berry_effective::{build_effective, build_effective_reduced};
use crate::geometry::{dot, normalize, ConfigId, Configuration, Vec3};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues};
use crate::spin_algebra::SpinValue;
use crate::{Error, Result};

/// CGS constants.
pub mod units {
    /// erg·s
    pub const HBAR: f64 = 1.054_571_817e-27;
    /// erg/K
    pub const K_B: f64 = 1.380_649e-16;
    /// erg/G
    pub const MU_B: f64 = 9.274_010_078_3e-21;
}

/// Effective model whose spectrum is recomputed for every field value.
#[derive(Clone, Debug)]
pub struct ThermoModel {
    pub config: Configuration,
    pub spin: SpinValue,
    pub w: f64,
    pub x: Option<f64>,
}

impl ThermoModel {
    pub fn new(config: Configuration, spin: SpinValue, w: f64, x: Option<f64>) -> Self {
        Self { config, spin, w, x }
    }

    pub fn levels(&self, hbar: Vec3) -> Result<Vec<f64>> {
        let h = build_effective_reduced(&self.config, self.spin, self.w, hbar, self.x)?;
        hermitian_eigenvalues(&h.matrix)
    }

    /// F = −T ln Σ e^{−E/T}
    pub fn free_energy(&self, hbar: Vec3, t: f64) -> Result<f64> {
        let e = self.levels(hbar)?;
        let e0 = e[0];
        let z: f64 = e.iter().map(|v| (-(v - e0) / t).exp()).sum();
        Ok(e0 - t * z.ln())
    }
}

fn check_temperature(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("temperature {t} must be positive")))
    }
}

/// χ = −∂²F/∂h̄² along `direction` at zero field.
///
/// Central second difference with δ = min(|w|, T)/100, Richardson-extrapolated from δ and 2δ.
pub fn susceptibility(model: &ThermoModel, t: f64, direction: Vec3) -> Result<f64> {
    check_temperature(t)?;
    let d = normalize(direction);
    if !d.iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("field direction must be nonzero".into()));
    }
    let delta = model.w.abs().min(t) / 100.0;
    if !(delta > 1e-150 && delta < 1e150) {
        return Err(Error::Numerical(format!("field step {delta:e} under- or overflows")));
    }
    let f0 = model.free_energy([0.0; 3], t)?;
    let second = |s: f64| -> Result<f64> {
        let fp = model.free_energy(d.map(|c| c * s), t)?;
        let fm = model.free_energy(d.map(|c| -c * s), t)?;
        Ok((fp - 2.0 * f0 + fm) / (s * s))
    };
    let d1 = second(delta)?;
    let d2 = second(2.0 * delta)?;
    Ok(-(4.0 * d1 - d2) / 3.0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermoCurve {
    pub config: ConfigId,
    pub two_j: u32,
    pub w: f64,
    pub direction: Vec3,
    pub temperatures: Vec<f64>,
    pub chi: Vec<f64>,
}

pub fn thermo_curve(model: &ThermoModel, temperatures: &[f64], direction: Vec3) -> Result<ThermoCurve> {
    let chi = temperatures
        .par_iter()
        .map(|&t| susceptibility(model, t, direction))
        .collect::<Result<Vec<f64>>>()?;
    Ok(ThermoCurve {
        config: model.config.id,
        two_j: model.spin.two_j,
        w: model.w,
        direction: normalize(direction),
        temperatures: temperatures.to_vec(),
        chi,
    })
}

/// Low-temperature limit χ ≈ curie/T + van_vleck from degenerate perturbation theory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowTResponse {
    /// (1/g₀)Σ m_i² over the ground multiplet.
    pub curie: f64,
    /// (2/g₀)Σ |⟨i|n·d|e⟩|²/(E_e − E₀), in units of 1/w.
    pub van_vleck: f64,
    pub ground_degeneracy: usize,
}

impl LowTResponse {
    /// True when the ground multiplet carries no moment and χ saturates.
    pub fn saturates(&self) -> bool {
        self.curie.abs() < 1e-9
    }
}

pub fn low_t_susceptibility(model: &ThermoModel, direction: Vec3) -> Result<LowTResponse> {
    let d = normalize(direction);
    let h = build_effective(&model.config, model.spin, model.w, [0.0; 3], model.x)?;
    let eig = hermitian_eigen(&h.matrix)?;
    let n = eig.values.len();
    let tol = 1e-8 * model.w.abs().max(1e-300);
    let g0 = eig.values.iter().take_while(|&&e| e - eig.values[0] <= tol).count();
    let moment: Vec<f64> = model.config.vertices.iter().map(|&v| dot(v, d)).collect();
    // M_ab = ⟨a|D|b⟩ with D = diag(n_k·d)
    let elem = |a: usize, b: usize| -> num_complex::Complex64 {
        (0..n)
            .map(|k| eig.vectors[(k, a)].conj() * eig.vectors[(k, b)] * moment[k])
            .sum()
    };
    let block = crate::CMatrix::from_fn(g0, g0, elem);
    let m = hermitian_eigenvalues(&block)?;
    let curie = m.iter().map(|v| v * v).sum::<f64>() / g0 as f64;
    let mut vv = 0.0;
    for a in 0..g0 {
        for e in g0..n {
            vv += 2.0 * elem(a, e).norm_sqr() / (eig.values[e] - eig.values[0]);
        }
    }
    Ok(LowTResponse { curie, van_vleck: vv / g0 as f64, ground_degeneracy: g0 })
}

/// d in the high-temperature law χ = 1/(d·T): the inverse mean of (n_k·d̂)².
pub fn curie_dimension(config: &Configuration, direction: Vec3) -> f64 {
    let d = normalize(direction);
    let mean = config.vertices.iter().map(|&v| dot(v, d).powi(2)).sum::<f64>() / config.n_sites as f64;
    1.0 / mean
}

/// Magnetic moment along the starting site's direction after releasing the spin from
/// site k at t = 0, in units of μ_B:
/// M(t) = gJ·Σ_k' cos γ_kk' |⟨k'|e^{−iHt}|k⟩|², with ħ = 1 and t in 1/w.
pub fn magnetization_oscillation(
    config: &Configuration,
    spin: SpinValue,
    w: f64,
    x: Option<f64>,
    site: usize,
    times: &[f64],
    g: f64,
) -> Result<Vec<f64>> {
    let (eig, cosg) = oscillation_setup(config, spin, w, x, site)?;
    let n = config.n_sites;
    let j = spin.j();
    Ok(times
        .iter()
        .map(|&t| {
            let phase: Vec<num_complex::Complex64> = eig
                .values
                .iter()
                .map(|&e| num_complex::Complex64::from_polar(1.0, -e * t))
                .collect();
            let mut m = 0.0;
            for (kp, c) in cosg.iter().enumerate() {
                let amp: num_complex::Complex64 = (0..n)
                    .map(|a| eig.vectors[(kp, a)] * eig.vectors[(site, a)].conj() * phase[a])
                    .sum();
                m += c * amp.norm_sqr();
            }
            g * j * m
        })
        .collect())
}

/// Time average of M(t): Σ over distinct levels of |⟨k'|P_E|k⟩|² weighted by cos γ.
pub fn magnetization_dc(
    config: &Configuration,
    spin: SpinValue,
    w: f64,
    x: Option<f64>,
    site: usize,
    g: f64,
) -> Result<f64> {
    let (eig, cosg) = oscillation_setup(config, spin, w, x, site)?;
    let n = config.n_sites;
    let tol = 1e-9 * w.abs().max(1e-300);
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for a in 1..=n {
        if a == n || eig.values[a] - eig.values[a - 1] > tol {
            groups.push((start, a));
            start = a;
        }
    }
    let mut m = 0.0;
    for (kp, c) in cosg.iter().enumerate() {
        for &(lo, hi) in &groups {
            let p: num_complex::Complex64 = (lo..hi)
                .map(|a| eig.vectors[(kp, a)] * eig.vectors[(site, a)].conj())
                .sum();
            m += c * p.norm_sqr();
        }
    }
    Ok(g * spin.j() * m)
}

fn oscillation_setup(
    config: &Configuration,
    spin: SpinValue,
    w: f64,
    x: Option<f64>,
    site: usize,
) -> Result<(crate::linalg::Eigen, Vec<f64>)> {
    if site >= config.n_sites {
        return Err(Error::InvalidArgument(format!(
            "site {site} out of range for {} sites",
            config.n_sites
        )));
    }
    let h = build_effective(config, spin, w, [0.0; 3], x)?;
    let eig = hermitian_eigen(&h.matrix)?;
    let nk = config.vertices[site];
    let cosg = config.vertices.iter().map(|&v| dot(nk, v)).collect();
    Ok((eig, cosg))
}

/// τ ∼ ħρs⁵/((k_BΔ)²ω³) in seconds, for ρ in g/cm³, Δ in K, ω in 1/s and s in cm/s.
/// With a temperature (K) the result is multiplied by ħω/(k_BT).
pub fn relaxation_time(rho: f64, delta_k: f64, omega: f64, sound: f64, temperature: Option<f64>) -> Result<f64> {
    for (name, v) in [("rho", rho), ("Delta", delta_k), ("omega", omega), ("s", sound)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidArgument(format!("{name} = {v} must be positive")));
        }
    }
    let e = units::K_B * delta_k;
    let mut tau = units::HBAR * rho * sound.powi(5) / (e * e * omega.powi(3));
    if let Some(t) = temperature {
        check_temperature(t)?;
        tau *= units::HBAR * omega / (units::K_B * t);
    }
    Ok(tau)
}

/// δω ∼ g²μ_B²J²n·x/ħ in 1/s, for n in 1/cm³.
pub fn dipolar_broadening(g: f64, spin: SpinValue, n: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("concentration x = {x} outside [0, 1]")));
    }
    if !(n >= 0.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("density n = {n} must be nonnegative")));
    }
    let j = spin.j();
    Ok((g * units::MU_B * j).powi(2) * n * x / units::HBAR)
}
