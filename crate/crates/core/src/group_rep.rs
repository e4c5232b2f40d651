//! Double point groups and the decomposition of the main representation W(G,p,J).
//!
//! Group elements are unit quaternions (SU(2)), so the 2π rotation Q = −1 is a
//! separate element and half-integer J is handled by ordinary linear characters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::{dot, normalize, rotate, Configuration, Group, Vec3};
use crate::spin_algebra::SpinValue;
use crate::{Error, Result};

type Quat = [f64; 4];

fn qmul(a: Quat, b: Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn qconj(a: Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

fn qclose(a: Quat, b: Quat) -> bool {
    (0..4).all(|k| (a[k] - b[k]).abs() < 1e-9)
}

fn quat(axis: Vec3, theta: f64) -> Quat {
    let n = normalize(axis);
    let (s, c) = (theta / 2.0).sin_cos();
    [c, s * n[0], s * n[1], s * n[2]]
}

/// SU(2) angle in [0, 2π] and unit axis (z for ±1).
fn angle_axis(q: Quat) -> (f64, Vec3) {
    let v = [q[1], q[2], q[3]];
    let s = dot(v, v).sqrt();
    let theta = 2.0 * s.atan2(q[0]);
    if s < 1e-12 {
        (theta, [0.0, 0.0, 1.0])
    } else {
        (theta, [v[0] / s, v[1] / s, v[2] / s])
    }
}

/// All 2|G| elements generated by the group's rotations.
fn closure(group: Group) -> Vec<Quat> {
    let gens: Vec<Quat> = group.generators().iter().map(|&(a, t)| quat(a, t)).collect();
    let mut elems: Vec<Quat> = vec![[1.0, 0.0, 0.0, 0.0]];
    let mut frontier = elems.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in &gens {
                let p = qmul(*a, *g);
                if !elems.iter().any(|e| qclose(*e, p)) {
                    elems.push(p);
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    elems
}

/// A column of a character table, identified by a representative rotation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub name: String,
    pub size: usize,
    /// SU(2) rotation angle of the representative, in [0, 2π].
    pub angle: f64,
    pub axis: Vec3,
    /// Whether the class is the Q-multiple of a single-group class.
    pub q_flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    pub double_valued: bool,
    pub characters: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleGroupTable {
    pub group: Group,
    pub classes: Vec<ClassInfo>,
    pub irreps: Vec<Irrep>,
    #[serde(skip)]
    elements: Vec<Quat>,
    /// Table column of every element.
    #[serde(skip)]
    element_class: Vec<usize>,
}

impl DoubleGroupTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn irrep(&self, label: &str) -> Option<&Irrep> {
        self.irreps.iter().find(|i| i.label == label)
    }

    /// Class-weighted inner product ⟨a, b⟩ = (1/|G̃|) Σ size·a·b.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.classes
            .iter()
            .zip(a.iter().zip(b))
            .map(|(c, (x, y))| c.size as f64 * x * y)
            .sum::<f64>()
            / self.order() as f64
    }
}

struct Raw {
    classes: Vec<(&'static str, f64, Vec3, bool)>,
    irreps: Vec<(&'static str, bool, Vec<f64>)>,
}

fn raw_table(group: Group) -> Raw {
    let (x, y, z) = ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
    let r2 = 2f64.sqrt();
    let r3 = 3f64.sqrt();
    let tau = (1.0 + 5f64.sqrt()) / 2.0;
    match group {
        Group::D2 => Raw {
            classes: vec![
                ("E", 0.0, z, false),
                ("Q", 2.0 * PI, z, true),
                ("C2z", PI, z, false),
                ("C2y", PI, y, false),
                ("C2x", PI, x, false),
            ],
            irreps: vec![
                ("A", false, vec![1.0, 1.0, 1.0, 1.0, 1.0]),
                ("B1", false, vec![1.0, 1.0, 1.0, -1.0, -1.0]),
                ("B2", false, vec![1.0, 1.0, -1.0, 1.0, -1.0]),
                ("B3", false, vec![1.0, 1.0, -1.0, -1.0, 1.0]),
                ("E'", true, vec![2.0, -2.0, 0.0, 0.0, 0.0]),
            ],
        },
        Group::D4 => Raw {
            classes: vec![
                ("E", 0.0, z, false),
                ("Q", 2.0 * PI, z, true),
                ("C4", PI / 2.0, z, false),
                ("C4Q", 3.0 * PI / 2.0, z, true),
                ("C2", PI, z, false),
                ("C2'", PI, x, false),
                ("C2''", PI, normalize([1.0, 1.0, 0.0]), false),
            ],
            irreps: vec![
                ("A1", false, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
                ("A2", false, vec![1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0]),
                ("B1", false, vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0]),
                ("B2", false, vec![1.0, 1.0, -1.0, -1.0, 1.0, -1.0, 1.0]),
                ("E", false, vec![2.0, 2.0, 0.0, 0.0, -2.0, 0.0, 0.0]),
                ("E1'", true, vec![2.0, -2.0, r2, -r2, 0.0, 0.0, 0.0]),
                ("E2'", true, vec![2.0, -2.0, -r2, r2, 0.0, 0.0, 0.0]),
            ],
        },
        Group::D6 => Raw {
            classes: vec![
                ("E", 0.0, z, false),
                ("Q", 2.0 * PI, z, true),
                ("C6", PI / 3.0, z, false),
                ("C3", 2.0 * PI / 3.0, z, false),
                ("C2", PI, z, false),
                ("C3Q", 4.0 * PI / 3.0, z, true),
                ("C6Q", 5.0 * PI / 3.0, z, true),
                ("C2'", PI, x, false),
                ("C2''", PI, y, false),
            ],
            irreps: vec![
                ("A1", false, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
                ("A2", false, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0]),
                ("B1", false, vec![1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0]),
                ("B2", false, vec![1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0]),
                ("E1", false, vec![2.0, 2.0, 1.0, -1.0, -2.0, -1.0, 1.0, 0.0, 0.0]),
                ("E2", false, vec![2.0, 2.0, -1.0, -1.0, 2.0, -1.0, -1.0, 0.0, 0.0]),
                ("E1'", true, vec![2.0, -2.0, r3, 1.0, 0.0, -1.0, -r3, 0.0, 0.0]),
                ("E2'", true, vec![2.0, -2.0, -r3, 1.0, 0.0, -1.0, r3, 0.0, 0.0]),
                ("E3'", true, vec![2.0, -2.0, 0.0, -2.0, 0.0, 2.0, 0.0, 0.0, 0.0]),
            ],
        },
        Group::O => {
            let d = normalize([1.0, 1.0, 1.0]);
            Raw {
                classes: vec![
                    ("E", 0.0, z, false),
                    ("Q", 2.0 * PI, z, true),
                    ("C3", 2.0 * PI / 3.0, d, false),
                    ("C3Q", 4.0 * PI / 3.0, d, true),
                    ("C4", PI / 2.0, z, false),
                    ("C4Q", 3.0 * PI / 2.0, z, true),
                    ("C2", PI, z, false),
                    ("C2'", PI, normalize([1.0, 1.0, 0.0]), false),
                ],
                irreps: vec![
                    ("A1", false, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]),
                    ("A2", false, vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0]),
                    ("E", false, vec![2.0, 2.0, -1.0, -1.0, 0.0, 0.0, 2.0, 0.0]),
                    ("F1", false, vec![3.0, 3.0, 0.0, 0.0, 1.0, 1.0, -1.0, -1.0]),
                    ("F2", false, vec![3.0, 3.0, 0.0, 0.0, -1.0, -1.0, -1.0, 1.0]),
                    ("E1'", true, vec![2.0, -2.0, 1.0, -1.0, r2, -r2, 0.0, 0.0]),
                    ("E2'", true, vec![2.0, -2.0, 1.0, -1.0, -r2, r2, 0.0, 0.0]),
                    ("G'", true, vec![4.0, -4.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
                ],
            }
        }
        Group::Y => {
            let (a, b) = crate::geometry::icosa_ab();
            let v5 = [a, b, 0.0];
            let d = normalize([1.0, 1.0, 1.0]);
            let t1 = 1.0 - tau;
            Raw {
                classes: vec![
                    ("E", 0.0, z, false),
                    ("Q", 2.0 * PI, z, true),
                    ("C5", 2.0 * PI / 5.0, v5, false),
                    ("C5^2", 4.0 * PI / 5.0, v5, false),
                    ("C5^3", 6.0 * PI / 5.0, v5, true),
                    ("C5^4", 8.0 * PI / 5.0, v5, true),
                    ("C3", 2.0 * PI / 3.0, d, false),
                    ("C3Q", 4.0 * PI / 3.0, d, true),
                    ("C2", PI, x, false),
                ],
                irreps: vec![
                    ("A", false, vec![1.0; 9]),
                    ("F1", false, vec![3.0, 3.0, tau, t1, t1, tau, 0.0, 0.0, -1.0]),
                    ("F2", false, vec![3.0, 3.0, t1, tau, tau, t1, 0.0, 0.0, -1.0]),
                    ("G", false, vec![4.0, 4.0, -1.0, -1.0, -1.0, -1.0, 1.0, 1.0, 0.0]),
                    ("H", false, vec![5.0, 5.0, 0.0, 0.0, 0.0, 0.0, -1.0, -1.0, 1.0]),
                    ("E1'", true, vec![2.0, -2.0, tau, tau - 1.0, t1, -tau, 1.0, -1.0, 0.0]),
                    ("E2'", true, vec![2.0, -2.0, t1, -tau, tau, tau - 1.0, 1.0, -1.0, 0.0]),
                    ("G'", true, vec![4.0, -4.0, 1.0, -1.0, 1.0, -1.0, -1.0, 1.0, 0.0]),
                    ("I'", true, vec![6.0, -6.0, -1.0, 1.0, -1.0, 1.0, 0.0, 0.0, 0.0]),
                ],
            }
        }
    }
}

/// Embedded character table with class sizes taken from the explicit group closure.
pub fn builtin_table(group: Group) -> Result<DoubleGroupTable> {
    let raw = raw_table(group);
    let elements = closure(group);
    if elements.len() != 2 * group.order() {
        return Err(Error::Numerical(format!(
            "{group}: closure has {} elements, expected {}",
            elements.len(),
            2 * group.order()
        )));
    }
    let conj_class = |g: Quat| -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for h in &elements {
            let c = qmul(qmul(*h, g), qconj(*h));
            let k = elements
                .iter()
                .position(|e| qclose(*e, c))
                .expect("closure is a group");
            if !out.contains(&k) {
                out.push(k);
            }
        }
        out
    };
    let mut element_class = vec![usize::MAX; elements.len()];
    let mut classes = Vec::with_capacity(raw.classes.len());
    for (col, &(name, angle, axis, q_flag)) in raw.classes.iter().enumerate() {
        let rep = quat(axis, angle);
        let members = conj_class(rep);
        for &k in &members {
            if element_class[k] != usize::MAX {
                return Err(Error::Numerical(format!("{group}: classes {name} overlap")));
            }
            element_class[k] = col;
        }
        classes.push(ClassInfo { name: name.to_string(), size: members.len(), angle, axis, q_flag });
    }
    if element_class.contains(&usize::MAX) {
        return Err(Error::Numerical(format!("{group}: table misses a conjugacy class")));
    }
    let irreps = raw
        .irreps
        .into_iter()
        .map(|(label, double_valued, characters)| Irrep {
            label: label.to_string(),
            dim: characters[0].round() as usize,
            double_valued,
            characters,
        })
        .collect();
    Ok(DoubleGroupTable { group, classes, irreps, elements, element_class })
}

/// Character of W(G,p,J) at an element: each site on the rotation axis contributes
/// cos(Jθ·(n̂·v)); all other sites are permuted and contribute nothing.
fn element_character(q: Quat, sites: &[Vec3], j: f64) -> f64 {
    let (theta, axis) = angle_axis(q);
    if theta < 1e-12 || (theta - 2.0 * PI).abs() < 1e-12 {
        return sites.len() as f64 * (j * theta).cos();
    }
    sites
        .iter()
        .filter_map(|&v| {
            let c = dot(axis, v);
            ((c.abs() - 1.0).abs() < 1e-9).then(|| (j * theta * c).cos())
        })
        .sum()
}

/// χ_W per table class.
pub fn main_rep_characters(
    table: &DoubleGroupTable,
    sites: &[Vec3],
    spin: SpinValue,
) -> Vec<(String, f64)> {
    table
        .classes
        .iter()
        .map(|c| (c.name.clone(), element_character(quat(c.axis, c.angle), sites, spin.j())))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub label: String,
    pub dim: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrrepDecomposition {
    pub group: Group,
    pub n_sites: usize,
    /// Nonzero components in table order.
    pub components: Vec<Component>,
}

impl IrrepDecomposition {
    pub fn multiplicity(&self, label: &str) -> usize {
        self.components
            .iter()
            .find(|c| c.label == label)
            .map_or(0, |c| c.multiplicity)
    }

    pub fn total_dim(&self) -> usize {
        self.components.iter().map(|c| c.dim * c.multiplicity).sum()
    }

    /// Irrep dimensions repeated by multiplicity, sorted.
    pub fn dims_multiset(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self
            .components
            .iter()
            .flat_map(|c| std::iter::repeat_n(c.dim, c.multiplicity))
            .collect();
        d.sort_unstable();
        d
    }

    /// (label, multiplicity) pairs, e.g. for comparing with a table row.
    pub fn as_pairs(&self) -> Vec<(String, usize)> {
        self.components.iter().map(|c| (c.label.clone(), c.multiplicity)).collect()
    }
}

pub fn decompose(config: &Configuration, spin: SpinValue) -> Result<IrrepDecomposition> {
    decompose_sites(config.group, &config.vertices, spin)
}

/// m_λ = (1/|G̃|) Σ_g χ_W(g) χ_λ(g) over every element of the double group.
pub fn decompose_sites(group: Group, sites: &[Vec3], spin: SpinValue) -> Result<IrrepDecomposition> {
    let table = builtin_table(group)?;
    let chi_w: Vec<f64> = table
        .elements
        .iter()
        .map(|&q| element_character(q, sites, spin.j()))
        .collect();
    let mut components = Vec::new();
    for irr in &table.irreps {
        let m: f64 = chi_w
            .iter()
            .zip(&table.element_class)
            .map(|(w, &c)| w * irr.characters[c])
            .sum::<f64>()
            / table.order() as f64;
        let r = m.round();
        if (m - r).abs() > 1e-8 || r < 0.0 {
            return Err(Error::Numerical(format!(
                "{group}: multiplicity of {} is {m}, not a nonnegative integer",
                irr.label
            )));
        }
        if r > 0.0 {
            components.push(Component {
                label: irr.label.clone(),
                dim: irr.dim,
                multiplicity: r as usize,
            });
        }
    }
    let out = IrrepDecomposition { group, n_sites: sites.len(), components };
    if out.total_dim() != sites.len() {
        return Err(Error::Numerical(format!(
            "{group}: dimensions sum to {} for {} sites",
            out.total_dim(),
            sites.len()
        )));
    }
    Ok(out)
}

/// `copies` generic orbits of the group, i.e. the C(G,1) site set with N = copies·|G|.
pub fn regular_sites(group: Group, copies: usize) -> Vec<Vec3> {
    let elements = closure(group);
    let mut out: Vec<Vec3> = Vec::new();
    for c in 0..copies {
        let p = normalize([0.123 + 0.05 * c as f64, 0.457, 0.881]);
        for q in &elements {
            let (theta, axis) = angle_axis(*q);
            let v = rotate(axis, theta, p);
            if !out.iter().any(|u| (0..3).all(|k| (u[k] - v[k]).abs() < 1e-9)) {
                out.push(v);
            }
        }
    }
    out
}
