//! WKB actions along imaginary-time geodesics between neighbouring classical minima.
//!
//! On the arc from [100] to [010] the spin is n = √(1+t)(cosφ, sinφ, 0) + i√t ẑ, which
//! keeps n·n = 1. Energy conservation H(n) = H_min fixes t(φ) and κ = √t is the
//! imaginary J_z per unit J; the action per unit J is c = ∫κ dφ.

use std::f64::consts::PI;

use num_complex::Complex64;
use quadrature::double_exponential;
use serde::{Deserialize, Serialize};

use crate::geometry::{icosa_ab, normalize, Vec3};
use crate::spin_algebra::SpinValue;
use crate::{Error, Result};

/// Single-path window of the 6-fold configuration.
pub const U_MIN: f64 = -2.0 / 3.0;
pub const U_MAX: f64 = 1.0 / 15.0;

const QUAD_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionResult {
    pub c: f64,
    pub u: f64,
    pub valid: bool,
}

fn check_window(u: f64) -> Result<()> {
    if u > U_MIN && u < U_MAX {
        Ok(())
    } else {
        Err(Error::Domain(format!("u = {u} outside the single-path window (-2/3, 1/15)")))
    }
}

/// (S4 + u·S6) − (1 + u) on the complexified arc; real because only t enters.
fn cubic_energy(t: f64, phi: f64, u: f64) -> f64 {
    let s = (2.0 * phi).sin().powi(2) / 4.0;
    let s4 = (1.0 + t).powi(2) * (1.0 - 2.0 * s) + t * t;
    let s6 = (1.0 + t).powi(3) * (1.0 - 3.0 * s) - t.powi(3) - 30.0 * t * (1.0 + t).powi(2) * s;
    s4 + u * s6 - (1.0 + u)
}

/// Smallest positive root of `f`, given f(0) has sign opposite to large t.
fn first_root(f: impl Fn(f64) -> f64) -> Result<f64> {
    let s0 = f(0.0).signum();
    if f(0.0) == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1e-6;
    while f(hi).signum() == s0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Numerical("no turning point on the arc".into()));
        }
    }
    let mut lo = if hi > 1e-6 { hi / 2.0 } else { 0.0 };
    while hi - lo > 1e-15 * hi.max(1e-300) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == s0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// κ(φ) on the [100]→[010] geodesic.
pub fn kappa_profile(u: f64, phi: f64) -> Result<f64> {
    check_window(u)?;
    if !(0.0..=PI / 2.0).contains(&phi) {
        return Err(Error::Domain(format!("phi = {phi} outside [0, pi/2]")));
    }
    if phi == 0.0 || phi == PI / 2.0 {
        return Ok(0.0);
    }
    Ok(first_root(|t| cubic_energy(t, phi, u))?.sqrt())
}

pub fn action_c(u: f64) -> Result<ActionResult> {
    action_c_tol(u, QUAD_TOL)
}

/// Same as [`action_c`] with an explicit absolute quadrature target.
pub fn action_c_tol(u: f64, tol: f64) -> Result<ActionResult> {
    check_window(u)?;
    let out = double_exponential::integrate(
        |phi| kappa_profile(u, phi).unwrap_or(f64::NAN),
        0.0,
        PI / 2.0,
        tol,
    );
    if !out.integral.is_finite() {
        return Err(Error::Numerical(format!("quadrature failed at u = {u}")));
    }
    Ok(ActionResult { c: out.integral, u, valid: true })
}

/// Endpoints of the icosahedral geodesic: two adjacent vertices (α, ±β, 0).
fn icosa_frame() -> (Vec3, Vec3, Vec3, f64) {
    let (a, b) = icosa_ab();
    let v1 = [a, b, 0.0];
    let v2 = [a, -b, 0.0];
    let c = v1[0] * v2[0] + v1[1] * v2[1];
    let e2 = normalize([v2[0] - c * v1[0], v2[1] - c * v1[1], 0.0]);
    let e3 = crate::geometry::cross(v1, e2);
    (v1, e2, e3, c.acos())
}

/// Angle between adjacent 5-fold vertices, arccos(1/√5).
pub fn icosahedral_arc() -> f64 {
    icosa_frame().3
}

/// S6 − 3√5·P, the icosahedral sextic, on a complex direction.
fn icosa_energy(n: [Complex64; 3]) -> Complex64 {
    let [x, y, z] = n.map(|c| c * c);
    let s6 = x * x * x + y * y * y + z * z * z + 30.0 * x * y * z;
    let p = x * y * (x - y) + y * z * (y - z) + z * x * (z - x);
    s6 - 3.0 * 5f64.sqrt() * p
}

/// κ(p) at arc angle p on the icosahedral geodesic.
pub fn icosahedral_kappa(p: f64) -> Result<f64> {
    let (e1, e2, e3, arc) = icosa_frame();
    if !(0.0..=arc).contains(&p) {
        return Err(Error::Domain(format!("p = {p} outside [0, {arc}]")));
    }
    if p == 0.0 || p == arc {
        return Ok(0.0);
    }
    let fmin = icosa_energy(e1.map(Complex64::from));
    let g = |t: f64| {
        let r = (1.0 + t).sqrt();
        let n: [Complex64; 3] = std::array::from_fn(|k| {
            Complex64::new(r * (p.cos() * e1[k] + p.sin() * e2[k]), t.sqrt() * e3[k])
        });
        (icosa_energy(n) - fmin).re
    };
    Ok(first_root(g)?.sqrt())
}

/// Action per unit J between adjacent minima of the icosahedral CEF (about 0.28).
pub fn action_c_icosahedral() -> Result<f64> {
    let arc = icosahedral_arc();
    let out = double_exponential::integrate(
        |p| icosahedral_kappa(p).unwrap_or(f64::NAN),
        0.0,
        arc,
        QUAD_TOL,
    );
    if !out.integral.is_finite() {
        return Err(Error::Numerical("icosahedral quadrature failed".into()));
    }
    Ok(out.integral)
}

/// Full periods of cos(JΩ/2) for Ω in [0, Ω_max].
pub fn oscillation_count(spin: SpinValue, omega_max: f64) -> f64 {
    spin.j() * omega_max / (4.0 * PI)
}
