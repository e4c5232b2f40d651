//! Spin-J matrices, Stevens operator equivalents and point-group invariants.
//!
//! Basis ordering is |J⟩, |J−1⟩, …, |−J⟩, so row k carries m = J − k.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{hermitian_eigen, hermiticity_defect, real, CMatrix};
use crate::{Error, Result};

/// A spin quantum number stored as the integer 2J.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpinValue {
    pub two_j: u32,
}

impl SpinValue {
    pub fn new(two_j: u32) -> Self {
        SpinValue { two_j }
    }

    pub fn from_j(j: f64) -> Result<Self> {
        let t = 2.0 * j;
        if !(t >= 0.0) || (t - t.round()).abs() > 1e-12 || t > u32::MAX as f64 {
            return Err(Error::InvalidArgument(format!("J = {j} is not a nonnegative half-integer")));
        }
        Ok(SpinValue { two_j: t.round() as u32 })
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    pub fn is_half_integer(&self) -> bool {
        self.two_j % 2 == 1
    }

    /// J(J+1)
    pub fn casimir(&self) -> f64 {
        let j = self.j();
        j * (j + 1.0)
    }

    /// m values down the diagonal.
    pub fn m_values(&self) -> Vec<f64> {
        let j = self.j();
        (0..self.dim()).map(|k| j - k as f64).collect()
    }
}

impl std::fmt::Display for SpinValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.two_j % 2 == 0 {
            write!(f, "{}", self.two_j / 2)
        } else {
            write!(f, "{}/2", self.two_j)
        }
    }
}

/// Square complex matrix with a flag recording whether it was built Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub matrix: CMatrix,
    pub hermitian: bool,
}

impl OperatorMatrix {
    pub fn hermitian(matrix: CMatrix) -> Self {
        OperatorMatrix { matrix, hermitian: true }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }
}

#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub jx: CMatrix,
    pub jy: CMatrix,
    pub jz: CMatrix,
    pub jplus: CMatrix,
    pub jminus: CMatrix,
}

impl SpinOperators {
    /// n·J for a (not necessarily unit) vector n.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        &self.jx * real(n[0]) + &self.jy * real(n[1]) + &self.jz * real(n[2])
    }

    pub fn component(&self, axis: usize) -> &CMatrix {
        match axis {
            0 => &self.jx,
            1 => &self.jy,
            _ => &self.jz,
        }
    }
}

pub fn build_spin_operators(spin: SpinValue) -> SpinOperators {
    let n = spin.dim();
    let j = spin.j();
    let m = spin.m_values();
    let mut jplus = CMatrix::zeros(n, n);
    for k in 1..n {
        let mm = m[k];
        jplus[(k - 1, k)] = real((j * (j + 1.0) - mm * (mm + 1.0)).sqrt());
    }
    let jminus = jplus.adjoint();
    let jz = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, m.iter().map(|&x| real(x))));
    let jx = (&jplus + &jminus) * real(0.5);
    let jy = (&jplus - &jminus) * Complex64::new(0.0, -0.5);
    SpinOperators { jx, jy, jz, jplus, jminus }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StevensLabel {
    O40,
    O44,
    O60,
    O64,
}

/// Stevens operator equivalents, Hutchings normalization.
pub fn build_stevens(spin: SpinValue, label: StevensLabel) -> OperatorMatrix {
    let n = spin.dim();
    let ops = build_spin_operators(spin);
    let x = spin.casimir();
    let id = CMatrix::identity(n, n);
    let jz2 = &ops.jz * &ops.jz;
    let jz4 = &jz2 * &jz2;
    let p4 = || {
        let jp2 = &ops.jplus * &ops.jplus;
        let jm2 = &ops.jminus * &ops.jminus;
        &jp2 * &jp2 + &jm2 * &jm2
    };
    let m = match label {
        StevensLabel::O40 => {
            &jz4 * real(35.0) + &jz2 * real(25.0 - 30.0 * x) + &id * real(3.0 * x * x - 6.0 * x)
        }
        StevensLabel::O44 => p4() * real(0.5),
        StevensLabel::O60 => {
            let jz6 = &jz4 * &jz2;
            &jz6 * real(231.0)
                + &jz4 * real(735.0 - 315.0 * x)
                + &jz2 * real(105.0 * x * x - 525.0 * x + 294.0)
                + &id * real(-5.0 * x * x * x + 40.0 * x * x - 60.0 * x)
        }
        StevensLabel::O64 => {
            let a = &jz2 * real(11.0) - &id * real(x + 38.0);
            let p = p4();
            (&a * &p + &p * &a) * real(0.25)
        }
    };
    OperatorMatrix::hermitian(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvariantLabel {
    /// Jx⁴ + Jy⁴ + Jz⁴
    Cubic4,
    /// Jx⁶ + Jy⁶ + Jz⁶ + 30 Jx²Jy²Jz²
    Cubic6,
    /// Cubic6 − 3√5 Σ_cyc Jx²Jy²(Jx² − Jy²); minima on the icosahedron vertices for a negative prefactor
    Icosa6,
}

/// Average of all distinct orderings of a product with `powers[a]` factors of component a.
pub fn symmetrized_monomial(ops: &SpinOperators, powers: [u32; 3]) -> CMatrix {
    let n = ops.jz.nrows();
    let mut acc = CMatrix::zeros(n, n);
    let mut count = 0usize;
    let mut left = powers;
    let start = CMatrix::identity(n, n);
    fn dfs(
        ops: &SpinOperators,
        prefix: &CMatrix,
        left: &mut [u32; 3],
        acc: &mut CMatrix,
        count: &mut usize,
    ) {
        if left.iter().all(|&p| p == 0) {
            *acc += prefix;
            *count += 1;
            return;
        }
        for a in 0..3 {
            if left[a] > 0 {
                left[a] -= 1;
                let next = prefix * ops.component(a);
                dfs(ops, &next, left, acc, count);
                left[a] += 1;
            }
        }
    }
    dfs(ops, &start, &mut left, &mut acc, &mut count);
    acc * real(1.0 / count as f64)
}

fn pure_power(m: &CMatrix, k: u32) -> CMatrix {
    let mut out = CMatrix::identity(m.nrows(), m.ncols());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

pub fn build_invariant(spin: SpinValue, label: InvariantLabel) -> OperatorMatrix {
    let ops = build_spin_operators(spin);
    let quartic = || pure_power(&ops.jx, 4) + pure_power(&ops.jy, 4) + pure_power(&ops.jz, 4);
    let sextic = || {
        pure_power(&ops.jx, 6)
            + pure_power(&ops.jy, 6)
            + pure_power(&ops.jz, 6)
            + symmetrized_monomial(&ops, [2, 2, 2]) * real(30.0)
    };
    let m = match label {
        InvariantLabel::Cubic4 => quartic(),
        InvariantLabel::Cubic6 => sextic(),
        InvariantLabel::Icosa6 => {
            let s = |p| symmetrized_monomial(&ops, p);
            let p = s([4, 2, 0]) - s([2, 4, 0]) + s([0, 4, 2]) - s([0, 2, 4]) + s([2, 0, 4])
                - s([4, 0, 2]);
            sextic() - p * real(3.0 * 5f64.sqrt())
        }
    };
    OperatorMatrix::hermitian(m)
}

/// O4 and O6 cubic combinations, O40 + 5 O44 and O60 − 21 O64.
pub fn cubic_stevens(spin: SpinValue) -> (CMatrix, CMatrix) {
    let o4 = build_stevens(spin, StevensLabel::O40).matrix
        + build_stevens(spin, StevensLabel::O44).matrix * real(5.0);
    let o6 = build_stevens(spin, StevensLabel::O60).matrix
        - build_stevens(spin, StevensLabel::O64).matrix * real(21.0);
    (o4, o6)
}

/// H(φ) = −cosφ·O4c/X² − (5/14)·sinφ·O6c/X³ with X = J(J+1).
///
/// Classically this is −20(cosφ·S4 + sinφ·S6) + const on the unit sphere, so
/// u = tanφ plays the role of bJ²/a.
pub fn build_cubic_cef(spin: SpinValue, phi: f64) -> Result<OperatorMatrix> {
    if !(-std::f64::consts::PI - 1e-12..=std::f64::consts::PI + 1e-12).contains(&phi) {
        return Err(Error::InvalidArgument(format!("phi = {phi} outside [-pi, pi]")));
    }
    let n = spin.dim();
    if spin.two_j == 0 {
        return Ok(OperatorMatrix::hermitian(CMatrix::zeros(n, n)));
    }
    let x = spin.casimir();
    let (o4, o6) = cubic_stevens(spin);
    let m = o4 * real(-phi.cos() / (x * x)) + o6 * real(-(5.0 / 14.0) * phi.sin() / (x * x * x));
    Ok(OperatorMatrix::hermitian(m))
}

/// −h·J
pub fn build_zeeman(spin: SpinValue, h: [f64; 3]) -> OperatorMatrix {
    let ops = build_spin_operators(spin);
    OperatorMatrix::hermitian(ops.along([-h[0], -h[1], -h[2]]))
}

/// exp(−iθ n̂·J) for a unit axis n̂.
pub fn rotation_operator(spin: SpinValue, axis: [f64; 3], theta: f64) -> Result<CMatrix> {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("zero rotation axis".into()));
    }
    let ops = build_spin_operators(spin);
    let nj = ops.along([axis[0] / norm, axis[1] / norm, axis[2] / norm]);
    let eig = hermitian_eigen(&nj)?;
    let n = spin.dim();
    let phases = nalgebra::DVector::from_iterator(
        n,
        eig.values.iter().map(|&l| Complex64::from_polar(1.0, -theta * l)),
    );
    let v = &eig.vectors;
    Ok(v * CMatrix::from_diagonal(&phases) * v.adjoint())
}

/// Spin coherent state: the n̂·J = J eigenvector.
pub fn coherent_state(spin: SpinValue, n: [f64; 3]) -> Result<nalgebra::DVector<Complex64>> {
    let ops = build_spin_operators(spin);
    let eig = hermitian_eigen(&ops.along(n))?;
    Ok(eig.vectors.column(spin.dim() - 1).into_owned())
}

/// ⟨n|H|n⟩
pub fn coherent_expectation(spin: SpinValue, h: &CMatrix, n: [f64; 3]) -> Result<f64> {
    let v = coherent_state(spin, n)?;
    Ok((v.adjoint() * h * &v)[(0, 0)].re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermLabel {
    Cubic4,
    Cubic6,
    Icosa6,
    O40,
    O44,
    O60,
    O64,
    Zeeman,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    /// Each term divided by X^{k/2}, X = J(J+1), k its rank.
    StevensNormalized,
}

/// Linear combination of invariant operators. Zeeman terms take the field along z
/// with the coefficient as its magnitude; use [`build_zeeman`] for other directions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CefModel {
    pub spin: SpinValue,
    pub terms: Vec<(TermLabel, f64)>,
    pub normalization: Normalization,
}

impl CefModel {
    pub fn build(&self) -> OperatorMatrix {
        let n = self.spin.dim();
        let x = self.spin.casimir().max(f64::MIN_POSITIVE);
        let mut acc = CMatrix::zeros(n, n);
        for &(label, coef) in &self.terms {
            let (m, rank) = match label {
                TermLabel::Cubic4 => (build_invariant(self.spin, InvariantLabel::Cubic4), 4),
                TermLabel::Cubic6 => (build_invariant(self.spin, InvariantLabel::Cubic6), 6),
                TermLabel::Icosa6 => (build_invariant(self.spin, InvariantLabel::Icosa6), 6),
                TermLabel::O40 => (build_stevens(self.spin, StevensLabel::O40), 4),
                TermLabel::O44 => (build_stevens(self.spin, StevensLabel::O44), 4),
                TermLabel::O60 => (build_stevens(self.spin, StevensLabel::O60), 6),
                TermLabel::O64 => (build_stevens(self.spin, StevensLabel::O64), 6),
                TermLabel::Zeeman => (build_zeeman(self.spin, [0.0, 0.0, 1.0]), 0),
            };
            let scale = match self.normalization {
                Normalization::Raw => 1.0,
                Normalization::StevensNormalized => x.powi(rank / 2),
            };
            acc += m.matrix * real(coef / scale);
        }
        OperatorMatrix::hermitian(acc)
    }
}
