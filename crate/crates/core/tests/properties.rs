//! Randomized invariants across modules.

use std::f64::consts::PI;

use largespin::berry_effective::{build_effective, gauge_transform, matrix_spectrum, SpectrumReport};
use largespin::exact_spectrum::{analyze_point, eigenvalues, DEFAULT_GAP_RATIO};
use largespin::geometry::{
    classify_extrema, make_configuration, phi_regions, ConfigId, ConfigParams, Configuration, Vec3,
};
use largespin::group_rep::decompose;
use largespin::linalg::{hermitian_eigenvalues, real};
use largespin::observables::magnetization_oscillation;
use largespin::spin_algebra::{
    build_cubic_cef, build_spin_operators, build_stevens, build_zeeman, coherent_expectation, rotation_operator,
    OperatorMatrix, StevensLabel,
};
use largespin::{CMatrix, SpinValue};
use proptest::prelude::*;

fn config(id: ConfigId) -> Configuration {
    let alpha = match id {
        ConfigId::O2 => Some(0.83),
        ConfigId::Y2 => Some(0.29),
        _ => None,
    };
    make_configuration(id, ConfigParams { alpha }).unwrap()
}

fn x_for(id: ConfigId) -> Option<f64> {
    id.is_multipath().then_some(0.61)
}

fn eigs(m: &CMatrix) -> Vec<f64> {
    hermitian_eigenvalues(m).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn config_id() -> impl Strategy<Value = ConfigId> {
    prop::sample::select(ConfigId::ALL.to_vec())
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Period in J of the site characters.
fn character_period(id: ConfigId) -> u32 {
    id.folds().into_iter().fold(1, |l, p| l / gcd(l, p) * p)
}

fn all_stevens(s: SpinValue) -> [OperatorMatrix; 4] {
    [StevensLabel::O40, StevensLabel::O44, StevensLabel::O60, StevensLabel::O64].map(|l| build_stevens(s, l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn operators_are_hermitian(tj in 0u32..30, h in prop::array::uniform3(-2.0f64..2.0), phi in -PI..PI) {
        let s = SpinValue::new(tj);
        for op in all_stevens(s) {
            let scale = op.matrix.norm().max(1.0);
            prop_assert!(op.hermiticity_defect() <= 1e-12 * scale);
        }
        prop_assert!(build_zeeman(s, h).hermiticity_defect() <= 1e-12 * build_zeeman(s, h).matrix.norm().max(1.0));
        let cef = build_cubic_cef(s, phi).unwrap();
        prop_assert!(cef.hermiticity_defect() <= 1e-12 * cef.matrix.norm().max(1.0));
    }

    // U J_x U† with U = exp(−iθJ_z) turns J_x toward J_y since [J_z, J_x] = iJ_y.
    #[test]
    fn rotation_covariance(tj in 0u32..=20, theta in -PI..PI) {
        let s = SpinValue::new(tj);
        let ops = build_spin_operators(s);
        let u = rotation_operator(s, [0.0, 0.0, 1.0], theta).unwrap();
        let lhs = &u * &ops.jx * u.adjoint();
        let rhs = &ops.jx * real(theta.cos()) + &ops.jy * real(theta.sin());
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + s.j()));
    }

    #[test]
    fn cef_spectrum_is_even_in_field(tj in 1u32..=24, phi in -PI..PI, h in prop::array::uniform3(-0.5f64..0.5)) {
        let s = SpinValue::new(tj);
        let cef = build_cubic_cef(s, phi).unwrap().matrix;
        let plus = eigs(&(&cef + build_zeeman(s, h).matrix));
        let minus = eigs(&(&cef + build_zeeman(s, [-h[0], -h[1], -h[2]]).matrix));
        prop_assert!(max_diff(&plus, &minus) <= 1e-10 * (1.0 + plus.iter().map(|e| e.abs()).fold(0.0, f64::max)));
    }

    #[test]
    fn kramers_pairs(k in 0u32..12, phi in -PI..PI) {
        let s = SpinValue::new(2 * k + 1);
        let e = eigenvalues(&build_cubic_cef(s, phi).unwrap()).unwrap();
        let scale = e.iter().map(|v| v.abs()).fold(1.0, f64::max);
        for pair in e.chunks(2) {
            prop_assert!((pair[1] - pair[0]).abs() <= 1e-10 * scale, "{e:?}");
        }
    }

    #[test]
    fn classification_is_scale_invariant(a in -3.0f64..3.0, b in -3.0f64..3.0, lambda in 1e-3f64..1e3) {
        prop_assume!(a.abs() + b.abs() > 1e-6);
        prop_assert_eq!(classify_extrema(a, b).unwrap(), classify_extrema(lambda * a, lambda * b).unwrap());
    }

    #[test]
    fn random_gauge_invariance(id in config_id(), tj in 0u32..14, seed in prop::collection::vec(0.0..2.0 * PI, 30)) {
        let c = config(id);
        let h = build_effective(&c, SpinValue::new(tj), 1.0, [0.13, -0.07, 0.21], x_for(id)).unwrap().matrix;
        let g = gauge_transform(&h, &seed[..c.n_sites]).unwrap();
        prop_assert!(max_diff(&eigs(&h), &eigs(&g)) <= 1e-12);
    }

    #[test]
    fn spectra_are_periodic_and_reflection_symmetric(id in config_id(), tj in 0u32..24) {
        let c = config(id);
        let Some(s) = c.s_parameter else { return Ok(()); };
        // multipath x = 2cos(JΩ/2) would change with J; hold it fixed
        let spec = |two_j: u32| eigs(&build_effective(&c, SpinValue::new(two_j), 0.9, [0.0; 3], x_for(id)).unwrap().matrix);
        let base = spec(tj);
        prop_assert!(max_diff(&base, &spec(tj + s)) <= 1e-10);
        let reflected = (s - tj % s) % s;
        prop_assert!(max_diff(&base, &spec(reflected)) <= 1e-10);
    }

    #[test]
    fn decomposition_completeness_and_symmetry(id in config_id(), tj in 0u32..=12) {
        let c = config(id);
        let p = character_period(id);
        let d = decompose(&c, SpinValue::new(tj)).unwrap();
        prop_assert_eq!(d.total_dim(), c.n_sites);
        let shifted = decompose(&c, SpinValue::new(tj + 2 * p)).unwrap();
        prop_assert_eq!(d.as_pairs(), shifted.as_pairs());
        let k = tj.div_ceil(2 * p);
        let reflected = decompose(&c, SpinValue::new(2 * p * k - tj)).unwrap();
        prop_assert_eq!(d.as_pairs(), reflected.as_pairs());
    }

    #[test]
    fn axial_doublet_in_field(n in prop::sample::select(vec![ConfigId::D2_2, ConfigId::D4_4, ConfigId::D6_6]),
                              tj in 0u32..16, h in -1.5f64..1.5, w in -2.0f64..2.0) {
        let c = config(n);
        let s = SpinValue::new(tj);
        let e0 = eigs(&build_effective(&c, s, w, [0.0; 3], None).unwrap().matrix);
        let axis = c.vertices[0];
        let e = eigs(&build_effective(&c, s, w, axis.map(|v| h * v), None).unwrap().matrix);
        let r = (e0[1].powi(2) + (h * s.j()).powi(2)).sqrt();
        prop_assert!(max_diff(&e, &[-r, r]) <= 1e-10);
    }

    #[test]
    fn square_ring_in_plane_field(tj in 1u32..16, hbar in 0.0f64..3.0, phi_h in -PI..PI) {
        let c = config(ConfigId::D4_2);
        let s = SpinValue::new(tj);
        let w = 1.0;
        let field = [hbar * phi_h.cos() / s.j(), hbar * phi_h.sin() / s.j(), 0.0];
        let h = build_effective(&c, s, w, field, None).unwrap().matrix;
        let mut sq: Vec<f64> = eigs(&h).iter().map(|e| e * e).collect();
        sq.sort_by(f64::total_cmp);
        let root = (4.0 * w.powi(4) * (PI * s.j()).cos().powi(2)
            + 2.0 * hbar * hbar * w * w
            + hbar.powi(4) / 4.0 * (2.0 * phi_h).cos().powi(2))
        .sqrt();
        let lo = 2.0 * w * w + hbar * hbar / 2.0 - root;
        let hi = 2.0 * w * w + hbar * hbar / 2.0 + root;
        prop_assert!(max_diff(&sq, &[lo, lo, hi, hi]) <= 1e-9 * (1.0 + hi), "{sq:?} vs {lo} {hi}");
    }
}

fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let a = golden * k as f64;
            [r * a.cos(), r * a.sin(), z]
        })
        .collect()
}

#[test]
fn quantum_spectrum_within_classical_band() {
    let mut dirs = fibonacci_sphere(300);
    let r2 = 0.5f64.sqrt();
    let r3 = (1.0f64 / 3.0).sqrt();
    dirs.extend([[1.0, 0.0, 0.0], [r2, r2, 0.0], [r3, r3, r3]]);
    for tj in [40, 47, 60] {
        let s = SpinValue::new(tj);
        for phi in [-2.5, -1.2, 0.3, 1.0, 2.2] {
            let h = build_cubic_cef(s, phi).unwrap();
            let f: Vec<f64> = dirs.iter().map(|&n| coherent_expectation(s, &h.matrix, n).unwrap()).collect();
            let (fmin, fmax) = f.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
            let e = eigenvalues(&h).unwrap();
            let band = 5.0 / s.j() * (fmax - fmin);
            let (emin, emax) = (e[0], e[e.len() - 1]);
            assert!(emin <= fmin + 1e-9 && emin >= fmin - band, "2J={tj} phi={phi}: {emin} vs {fmin}");
            assert!(emax >= fmax - 1e-9 && emax <= fmax + band, "2J={tj} phi={phi}: {emax} vs {fmax}");
        }
    }
}

/// Exact degeneracies inside the ground multiplet against irrep dimensions.
#[test]
fn ground_multiplet_pattern_matches_irreps() {
    for (n, lo, hi) in phi_regions() {
        let id = match n {
            6 => ConfigId::O4,
            8 => ConfigId::O3,
            _ => ConfigId::O2,
        };
        let c = config(id);
        for tj in [46, 47, 48] {
            let s = SpinValue::new(tj);
            let mut want = decompose(&c, s).unwrap().dims_multiset();
            want.sort_unstable();
            for frac in [0.35, 0.5, 0.65] {
                let phi = lo + frac * (hi - lo);
                let p = analyze_point(s, phi, DEFAULT_GAP_RATIO).unwrap();
                assert_eq!(p.multiplet_size, n as usize);
                let g = &p.eigenvalues[..p.multiplet_size];
                let spread = g[g.len() - 1] - g[0];
                let mut pattern = vec![1usize];
                for w in g.windows(2) {
                    if w[1] - w[0] <= 1e-6 * spread {
                        *pattern.last_mut().unwrap() += 1;
                    } else {
                        pattern.push(1);
                    }
                }
                pattern.sort_unstable();
                assert_eq!(pattern, want, "{id} 2J={tj} phi={phi:.3}: {g:?}");
            }
        }
    }
}

#[test]
fn oscillation_frequencies_are_level_differences() {
    let c = config(ConfigId::O3);
    let s = SpinValue::new(2);
    let levels = matrix_spectrum(&build_effective(&c, s, 1.0, [0.0; 3], None).unwrap().matrix, None).unwrap();
    let n = 4096;
    let dt = 0.05;
    let times: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
    let m = magnetization_oscillation(&c, s, 1.0, None, 0, &times, 2.0).unwrap();
    let mean = m.iter().sum::<f64>() / n as f64;
    let resolution = 2.0 * PI / (n as f64 * dt);
    let power = |omega: f64| {
        let (re, im) = m.iter().zip(&times).fold((0.0, 0.0), |(a, b), (v, t)| {
            (a + (v - mean) * (omega * t).cos(), b + (v - mean) * (omega * t).sin())
        });
        re * re + im * im
    };
    let grid: Vec<f64> = (1..n / 8).map(|k| k as f64 * resolution).collect();
    let peak = grid.iter().copied().max_by(|a, b| power(*a).total_cmp(&power(*b))).unwrap();
    let diffs: Vec<f64> = levels
        .levels
        .iter()
        .flat_map(|a| levels.levels.iter().map(move |b| (a.value - b.value).abs()))
        .filter(|d| *d > 1e-9)
        .collect();
    let nearest = diffs.iter().map(|d| (d - peak).abs()).fold(f64::MAX, f64::min);
    assert!(nearest <= resolution, "peak {peak} vs differences {diffs:?}");
}

#[test]
fn spectrum_report_json_schema() {
    let c = config(ConfigId::O4);
    let s = SpinValue::new(0);
    let spec = matrix_spectrum(&build_effective(&c, s, 1.0, [0.0; 3], None).unwrap().matrix, None).unwrap();
    let v = serde_json::to_value(SpectrumReport::new(ConfigId::O4, s, &spec)).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys.len(), 4);
    for k in ["config", "two_j", "levels", "verified"] {
        assert!(keys.contains(&k));
    }
    assert_eq!(v["levels"][2]["multiplicity"], 1);
    let back: SpectrumReport = serde_json::from_value(v).unwrap();
    assert_eq!(back.levels, spec.levels);
}
