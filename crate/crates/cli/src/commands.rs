//! One function per leaf subcommand, each returning a [`Report`].

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::Args;
use largespin::berry_effective::{
    build_effective, closed_form_spectrum, gauge_transform, matrix_spectrum, ClosedFormParams, Level,
};
use largespin::exact_spectrum::{analyze_point, detect_multiplets, sweep_phi, DEFAULT_GAP_RATIO};
use largespin::geometry::{make_configuration, ConfigId, ConfigParams, Configuration, Vec3};
use largespin::group_rep::decompose;
use largespin::observables::{
    dipolar_broadening, low_t_susceptibility, magnetization_dc, magnetization_oscillation, relaxation_time,
    thermo_curve, ThermoModel,
};
use largespin::semiclassics::action_c_tol;
use largespin::{Error, Result, SpinValue};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::output::{fmt_f64, num, Format, Report};

fn parse_config(s: &str) -> std::result::Result<ConfigId, String> {
    s.parse::<ConfigId>().map_err(|e| e.to_string())
}

/// "hx,hy,hz"
fn parse_vec3(s: &str) -> std::result::Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| format!("'{p}' is not a number"))?;
    }
    Ok(v)
}

#[derive(Args, Debug, Serialize)]
pub struct OutArgs {
    /// Output file; stdout if omitted. A file also gets a <out>.manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
}

#[derive(Args, Debug, Serialize)]
pub struct ModelArgs {
    /// Configuration name, e.g. O4, O3, O3M (multipath), O2, Y5, Y3, Y2, O14, D4_2.
    #[arg(long, value_parser = parse_config)]
    pub config: ConfigId,
    /// Twice the spin, J = two_j/2.
    #[arg(long)]
    pub two_j: u32,
    /// Tunneling amplitude.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub w: f64,
    /// Plaquette solid angle for O2 and Y2.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Multipath path factor; NNN links carry x·w.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "omega")]
    pub x: Option<f64>,
    /// Multipath triangle solid angle; sets x = 2cos(JΩ/2).
    #[arg(long, allow_negative_numbers = true)]
    pub omega: Option<f64>,
}

impl ModelArgs {
    fn configuration(&self) -> Result<Configuration> {
        make_configuration(self.config, ConfigParams { alpha: self.alpha })
    }

    fn path_factor(&self, spin: SpinValue) -> Result<Option<f64>> {
        match (self.config.is_multipath(), self.x, self.omega) {
            (true, Some(x), _) => Ok(Some(x)),
            (true, None, Some(o)) => Ok(Some(2.0 * (spin.j() * o / 2.0).cos())),
            (true, None, None) => Err(Error::InvalidArgument(format!("{} needs --x or --omega", self.config))),
            (false, None, None) => Ok(None),
            (false, _, _) => Err(Error::InvalidArgument(format!(
                "--x and --omega only apply to the multipath configuration, not {}",
                self.config
            ))),
        }
    }
}

fn levels_json(levels: &[Level]) -> Value {
    levels
        .iter()
        .map(|l| json!({"value": num(l.value), "multiplicity": l.multiplicity}))
        .collect()
}

fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn vec3(v: Vec3) -> Value {
    Value::Array(v.iter().map(|&c| num(c)).collect())
}

#[derive(Args, Debug, Serialize)]
pub struct GeometryDump {
    #[arg(long, value_parser = parse_config)]
    pub config: ConfigId,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

pub fn geometry_dump(a: &GeometryDump) -> Result<Report> {
    let c = make_configuration(a.config, ConfigParams { alpha: a.alpha })?;
    let json = serde_json::to_value(&c).map_err(|e| Error::Numerical(e.to_string()))?;
    let mut r = Report::new(json, &["site", "x", "y", "z"]);
    for (k, v) in c.vertices.iter().enumerate() {
        r.row(vec![k.to_string(), fmt_f64(v[0]), fmt_f64(v[1]), fmt_f64(v[2])]);
    }
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct EffectiveSpectrum {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Zeeman field h = gμ_B·H in units of w, as hx,hy,hz.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true)]
    pub field: Option<Vec3>,
    /// Apply a random site gauge drawn from this seed before diagonalizing.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Degeneracy tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

pub fn effective_spectrum(a: &EffectiveSpectrum) -> Result<Report> {
    let m = &a.model;
    let c = m.configuration()?;
    let spin = SpinValue::new(m.two_j);
    let x = m.path_factor(spin)?;
    let field = a.field.unwrap_or([0.0; 3]);
    let mut h = build_effective(&c, spin, m.w, field, x)?.matrix;
    if let Some(seed) = a.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta: Vec<f64> = (0..c.n_sites).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        h = gauge_transform(&h, &theta)?;
    }
    let s = matrix_spectrum(&h, Some(a.tol))?;
    let deviation = if field == [0.0; 3] {
        match closed_form_spectrum(m.config, spin, m.w, ClosedFormParams { alpha: c.alpha, x }) {
            Ok(cf) => cf.max_deviation(&s),
            Err(Error::UnsupportedClosedForm(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let json = json!({
        "config": m.config.name(),
        "two_j": m.two_j,
        "w": num(m.w),
        "alpha": opt(c.alpha),
        "x": opt(x),
        "field": vec3(field),
        "gauge_seed": a.seed,
        "tol": num(a.tol),
        "levels": levels_json(&s.levels),
        "closed_form_deviation": opt(deviation),
        "verified": deviation.is_some_and(|d| d <= 1e-10),
    });
    let mut r = Report::new(json, &["config", "two_j", "w", "value", "multiplicity"]);
    for l in &s.levels {
        r.row(vec![
            m.config.name().into(),
            m.two_j.to_string(),
            fmt_f64(m.w),
            fmt_f64(l.value),
            l.multiplicity.to_string(),
        ]);
    }
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct EffectiveSweep {
    /// --two-j is the last 2J of the sweep, which starts at 0.
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

pub fn effective_sweep(a: &EffectiveSweep) -> Result<Report> {
    let m = &a.model;
    let c = m.configuration()?;
    let mut r = Report::new(Value::Null, &["config", "two_j", "w", "x", "value", "multiplicity"]);
    let mut spectra = Vec::new();
    for tj in 0..=m.two_j {
        let spin = SpinValue::new(tj);
        let x = m.path_factor(spin)?;
        let h = build_effective(&c, spin, m.w, [0.0; 3], x)?;
        let s = matrix_spectrum(&h.matrix, Some(a.tol))?;
        for l in &s.levels {
            r.row(vec![
                m.config.name().into(),
                tj.to_string(),
                fmt_f64(m.w),
                x.map_or(String::new(), fmt_f64),
                fmt_f64(l.value),
                l.multiplicity.to_string(),
            ]);
        }
        spectra.push(json!({"two_j": tj, "x": opt(x), "levels": levels_json(&s.levels)}));
    }
    r.json = json!({
        "config": m.config.name(),
        "w": num(m.w),
        "alpha": opt(c.alpha),
        "tol": num(a.tol),
        "spectra": spectra,
    });
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct GroupDecompose {
    #[arg(long, value_parser = parse_config)]
    pub config: ConfigId,
    #[arg(long)]
    pub two_j: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

pub fn group_decompose(a: &GroupDecompose) -> Result<Report> {
    let c = make_configuration(a.config, ConfigParams { alpha: a.alpha })?;
    let d = decompose(&c, SpinValue::new(a.two_j))?;
    let irreps: serde_json::Map<String, Value> =
        d.as_pairs().into_iter().map(|(l, m)| (l, Value::from(m))).collect();
    let json = json!({
        "config": a.config.name(),
        "group": c.group.to_string(),
        "two_j": a.two_j,
        "n_sites": c.n_sites,
        "irreps": irreps,
        "dimension_sum": d.total_dim(),
        "dimension_check": d.total_dim() == c.n_sites,
    });
    let mut r = Report::new(json, &["config", "two_j", "irrep", "dim", "multiplicity"]);
    for comp in d.components.iter().filter(|c| c.multiplicity > 0) {
        r.row(vec![
            a.config.name().into(),
            a.two_j.to_string(),
            comp.label.clone(),
            comp.dim.to_string(),
            comp.multiplicity.to_string(),
        ]);
    }
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct ExactSpectrum {
    #[arg(long)]
    pub two_j: u32,
    /// Mixing angle of the quartic and sextic cubic terms.
    #[arg(long, allow_negative_numbers = true, required_unless_present = "u", conflicts_with = "u")]
    pub phi: Option<f64>,
    /// u = tan φ.
    #[arg(long, allow_negative_numbers = true)]
    pub u: Option<f64>,
    /// Gap ratio separating multiplets.
    #[arg(long, default_value_t = DEFAULT_GAP_RATIO)]
    pub ratio: f64,
}

pub fn exact_spectrum(a: &ExactSpectrum) -> Result<Report> {
    let phi = a.phi.or(a.u.map(f64::atan)).expect("clap requires --phi or --u");
    let spin = SpinValue::new(a.two_j);
    let p = analyze_point(spin, phi, a.ratio)?;
    let sizes = detect_multiplets(&p.eigenvalues, a.ratio);
    let mut json = serde_json::to_value(&p).map_err(|e| Error::Numerical(e.to_string()))?;
    json["two_j"] = Value::from(a.two_j);
    json["multiplets"] = Value::from(sizes.clone());
    let mut r = Report::new(json, &["two_j", "phi", "index", "energy", "multiplet"]);
    let mut k = 0;
    for (cluster, &n) in sizes.iter().enumerate() {
        for e in &p.eigenvalues[k..k + n] {
            r.row(vec![a.two_j.to_string(), fmt_f64(phi), k.to_string(), fmt_f64(*e), cluster.to_string()]);
            k += 1;
        }
    }
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct ExactSweep {
    #[arg(long)]
    pub two_j: u32,
    #[arg(long, default_value_t = -PI, allow_negative_numbers = true)]
    pub phi_min: f64,
    #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
    pub phi_max: f64,
    #[arg(long, default_value_t = 361)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_GAP_RATIO)]
    pub ratio: f64,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 || !(lo <= hi) {
        return Err(Error::InvalidArgument(format!("bad grid: {n} points on [{lo}, {hi}]")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}

fn geomspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) {
        return Err(Error::InvalidArgument(format!("--tmin {lo} must be positive")));
    }
    Ok(linspace(lo.ln(), hi.ln(), n)?.into_iter().map(f64::exp).collect())
}

pub fn exact_sweep(a: &ExactSweep) -> Result<Report> {
    let grid = linspace(a.phi_min, a.phi_max, a.steps)?;
    let spin = SpinValue::new(a.two_j);
    let res = sweep_phi(spin, &grid, a.ratio);
    let header = [
        "two_j",
        "phi",
        "multiplet_size",
        "r",
        "minus_ln_r_over_j",
        "gap_ratio",
        "width_ratio",
        "n_minima",
        "boundary",
        "error",
    ];
    let mut r = Report::new(Value::Null, &header);
    let mut points = Vec::new();
    for (&phi, p) in grid.iter().zip(&res.points) {
        match p {
            Ok(p) => {
                r.row(vec![
                    a.two_j.to_string(),
                    fmt_f64(phi),
                    p.multiplet_size.to_string(),
                    fmt_f64(p.r),
                    fmt_f64(p.minus_ln_r_over_j),
                    fmt_f64(p.gap_ratio),
                    fmt_f64(p.width_ratio),
                    p.n_minima.to_string(),
                    p.boundary.to_string(),
                    String::new(),
                ]);
                points.push(json!({
                    "phi": num(phi),
                    "multiplet_size": p.multiplet_size,
                    "r": num(p.r),
                    "minus_ln_r_over_j": num(p.minus_ln_r_over_j),
                    "gap_ratio": num(p.gap_ratio),
                    "width_ratio": num(p.width_ratio),
                    "n_minima": p.n_minima,
                    "boundary": p.boundary,
                }));
            }
            Err(e) => {
                let mut row = vec![String::new(); header.len()];
                row[0] = a.two_j.to_string();
                row[1] = fmt_f64(phi);
                row[9] = e.to_string();
                r.row(row);
                points.push(json!({"phi": num(phi), "error": e.to_string()}));
            }
        }
    }
    r.json = json!({"two_j": a.two_j, "ratio": num(a.ratio), "points": points});
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct WkbCOfU {
    /// Single u; otherwise the grid --u-min..--u-max.
    #[arg(long, allow_negative_numbers = true, conflicts_with_all = ["u_min", "u_max"])]
    pub u: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = -0.65)]
    pub u_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.065)]
    pub u_max: f64,
    #[arg(long, default_value_t = 72)]
    pub steps: usize,
    /// Absolute quadrature target.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

pub fn wkb_c_of_u(a: &WkbCOfU) -> Result<Report> {
    let grid = match a.u {
        Some(u) => vec![u],
        None => linspace(a.u_min, a.u_max, a.steps)?,
    };
    let mut r = Report::new(Value::Null, &["u", "c"]);
    let mut points = Vec::new();
    for u in grid {
        let c = action_c_tol(u, a.tol)?.c;
        r.row(vec![fmt_f64(u), fmt_f64(c)]);
        points.push(json!({"u": num(u), "c": num(c)}));
    }
    r.json = if a.u.is_some() { points.remove(0) } else { json!({"points": points}) };
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct ThermoChi {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Field direction hx,hy,hz.
    #[arg(long, value_parser = parse_vec3, allow_hyphen_values = true, default_value = "0,0,1")]
    pub field: Vec3,
    /// Temperatures in units of w/k_B, geometrically spaced.
    #[arg(long, default_value_t = 0.01)]
    pub tmin: f64,
    #[arg(long, default_value_t = 100.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 101)]
    pub tsteps: usize,
}

pub fn thermo_chi(a: &ThermoChi) -> Result<Report> {
    let m = &a.model;
    let spin = SpinValue::new(m.two_j);
    let model = ThermoModel::new(m.configuration()?, spin, m.w, m.path_factor(spin)?);
    let temps = geomspace(a.tmin, a.tmax, a.tsteps)?;
    let curve = thermo_curve(&model, &temps, a.field)?;
    let low = low_t_susceptibility(&model, a.field)?;
    let mut r = Report::new(Value::Null, &["config", "two_j", "w", "t", "chi"]);
    for (t, chi) in curve.temperatures.iter().zip(&curve.chi) {
        r.row(vec![m.config.name().into(), m.two_j.to_string(), fmt_f64(m.w), fmt_f64(*t), fmt_f64(*chi)]);
    }
    r.json = json!({
        "config": m.config.name(),
        "two_j": m.two_j,
        "w": num(m.w),
        "x": opt(model.x),
        "direction": vec3(curve.direction),
        "temperatures": curve.temperatures.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        "chi": curve.chi.iter().map(|&c| num(c)).collect::<Vec<_>>(),
        "low_t": {
            "curie": num(low.curie),
            "van_vleck": num(low.van_vleck),
            "ground_degeneracy": low.ground_degeneracy,
            "saturates": low.saturates(),
        },
    });
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct DynamicsOscillate {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Starting site.
    #[arg(long, default_value_t = 0)]
    pub site: usize,
    #[arg(long, default_value_t = 2.0)]
    pub g: f64,
    /// Times in units of ħ/w, evenly spaced.
    #[arg(long, default_value_t = 0.0)]
    pub tmin: f64,
    #[arg(long, default_value_t = 20.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = 201)]
    pub tsteps: usize,
}

pub fn dynamics_oscillate(a: &DynamicsOscillate) -> Result<Report> {
    let m = &a.model;
    let c = m.configuration()?;
    let spin = SpinValue::new(m.two_j);
    let x = m.path_factor(spin)?;
    let times = linspace(a.tmin, a.tmax, a.tsteps)?;
    let series = magnetization_oscillation(&c, spin, m.w, x, a.site, &times, a.g)?;
    let dc = magnetization_dc(&c, spin, m.w, x, a.site, a.g)?;
    let mut r = Report::new(Value::Null, &["config", "two_j", "site", "t", "m"]);
    for (t, v) in times.iter().zip(&series) {
        r.row(vec![m.config.name().into(), m.two_j.to_string(), a.site.to_string(), fmt_f64(*t), fmt_f64(*v)]);
    }
    r.json = json!({
        "config": m.config.name(),
        "two_j": m.two_j,
        "w": num(m.w),
        "x": opt(x),
        "site": a.site,
        "g": num(a.g),
        "dc": num(dc),
        "times": times.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        "m": series.iter().map(|&v| num(v)).collect::<Vec<_>>(),
    });
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct EstimateTau {
    /// Mass density, g/cm³.
    #[arg(long)]
    pub rho: f64,
    /// Tunnel splitting in K.
    #[arg(long)]
    pub delta: f64,
    /// Transition frequency, 1/s.
    #[arg(long)]
    pub omega: f64,
    /// Sound velocity, cm/s.
    #[arg(long)]
    pub sound: f64,
    /// Bath temperature in K for the thermal factor ħω/k_BT.
    #[arg(long)]
    pub temperature: Option<f64>,
}

pub fn estimate_tau(a: &EstimateTau) -> Result<Report> {
    let tau = relaxation_time(a.rho, a.delta, a.omega, a.sound, a.temperature)?;
    let mut r = Report::new(
        json!({
            "rho": num(a.rho),
            "delta_k": num(a.delta),
            "omega": num(a.omega),
            "sound": num(a.sound),
            "temperature": opt(a.temperature),
            "tau_s": num(tau),
        }),
        &["rho", "delta_k", "omega", "sound", "temperature", "tau_s"],
    );
    r.row(vec![
        fmt_f64(a.rho),
        fmt_f64(a.delta),
        fmt_f64(a.omega),
        fmt_f64(a.sound),
        a.temperature.map_or(String::new(), fmt_f64),
        fmt_f64(tau),
    ]);
    Ok(r)
}

#[derive(Args, Debug, Serialize)]
pub struct EstimateDipolar {
    #[arg(long, default_value_t = 2.0)]
    pub g: f64,
    #[arg(long)]
    pub two_j: u32,
    /// Spin density, 1/cm³.
    #[arg(long)]
    pub n: f64,
    /// Concentration in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub x: f64,
}

pub fn estimate_dipolar(a: &EstimateDipolar) -> Result<Report> {
    let d = dipolar_broadening(a.g, SpinValue::new(a.two_j), a.n, a.x)?;
    let mut r = Report::new(
        json!({"g": num(a.g), "two_j": a.two_j, "n": num(a.n), "x": num(a.x), "delta_omega_per_s": num(d)}),
        &["g", "two_j", "n", "x", "delta_omega_per_s"],
    );
    r.row(vec![fmt_f64(a.g), a.two_j.to_string(), fmt_f64(a.n), fmt_f64(a.x), fmt_f64(d)]);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec3_parsing() {
        assert_eq!(parse_vec3("1, -2,0.5").unwrap(), [1.0, -2.0, 0.5]);
        assert!(parse_vec3("1,2").is_err());
        assert!(parse_vec3("1,a,2").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(linspace(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 2.0, 1).unwrap(), vec![2.0]);
        assert!(linspace(1.0, 0.0, 4).is_err());
        let g = geomspace(0.01, 100.0, 5).unwrap();
        assert!((g[2] - 1.0).abs() < 1e-12 && (g[4] - 100.0).abs() < 1e-9);
        assert!(geomspace(0.0, 1.0, 3).is_err());
    }
}
