//! Symmetric site configurations C(G,p) on the unit sphere and the classical
//! phase diagram of the cubic crystal field.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    [a[0] / n, a[1] / n, a[2] / n]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Rodrigues rotation of `v` by `theta` about the unit axis `n`.
pub fn rotate(n: Vec3, theta: f64, v: Vec3) -> Vec3 {
    let n = normalize(n);
    let (s, c) = theta.sin_cos();
    let k = cross(n, v);
    let d = dot(n, v) * (1.0 - c);
    add(add(scale(v, c), scale(k, s)), scale(n, d))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Group {
    D2,
    D4,
    D6,
    O,
    Y,
}

impl Group {
    pub fn order(&self) -> usize {
        match self {
            Group::D2 => 4,
            Group::D4 => 8,
            Group::D6 => 12,
            Group::O => 24,
            Group::Y => 60,
        }
    }

    /// (axis, angle) pairs generating the rotation group.
    pub fn generators(&self) -> Vec<(Vec3, f64)> {
        let x = [1.0, 0.0, 0.0];
        let y = [0.0, 1.0, 0.0];
        let z = [0.0, 0.0, 1.0];
        match self {
            Group::D2 => vec![(x, PI), (y, PI)],
            Group::D4 => vec![(z, PI / 2.0), (x, PI)],
            Group::D6 => vec![(z, PI / 3.0), (x, PI)],
            Group::O => vec![(z, PI / 2.0), (x, PI / 2.0)],
            Group::Y => {
                let (a, b) = icosa_ab();
                vec![
                    ([a, b, 0.0], 2.0 * PI / 5.0),
                    (x, PI),
                    (normalize([1.0, 1.0, 1.0]), 2.0 * PI / 3.0),
                ]
            }
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// α, β with α² = (5+√5)/10 and β² = (5−√5)/10.
pub fn icosa_ab() -> (f64, f64) {
    let r5 = 5f64.sqrt();
    (((5.0 + r5) / 10.0).sqrt(), ((5.0 - r5) / 10.0).sqrt())
}

/// Every configuration with an effective model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConfigId {
    D2_2,
    D4_4,
    D4_2,
    D6_6,
    D6_2,
    O4,
    O3,
    /// C(O,3) with face-diagonal second-neighbour paths (double cover by triangles).
    O3Multipath,
    O2,
    Y5,
    Y3,
    Y2,
    /// 6 + 8 sites on the 4-fold and 3-fold axes at the b = 3a boundary.
    Hybrid14,
}

impl ConfigId {
    pub const ALL: [ConfigId; 13] = [
        ConfigId::D2_2,
        ConfigId::D4_4,
        ConfigId::D4_2,
        ConfigId::D6_6,
        ConfigId::D6_2,
        ConfigId::O4,
        ConfigId::O3,
        ConfigId::O3Multipath,
        ConfigId::O2,
        ConfigId::Y5,
        ConfigId::Y3,
        ConfigId::Y2,
        ConfigId::Hybrid14,
    ];

    /// Look up by group, fold and the multipath flag.
    pub fn new(group: Group, p: u32, multipath: bool) -> Result<ConfigId> {
        use ConfigId::*;
        let id = match (group, p, multipath) {
            (Group::D2, 2, false) => D2_2,
            (Group::D4, 4, false) => D4_4,
            (Group::D4, 2, false) => D4_2,
            (Group::D6, 6, false) => D6_6,
            (Group::D6, 2, false) => D6_2,
            (Group::O, 4, false) => O4,
            (Group::O, 3, false) => O3,
            (Group::O, 3, true) => O3Multipath,
            (Group::O, 2, false) => O2,
            (Group::Y, 5, false) => Y5,
            (Group::Y, 3, false) => Y3,
            (Group::Y, 2, false) => Y2,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "no configuration C({group},{p}){}",
                    if multipath { " with multipath" } else { "" }
                )))
            }
        };
        Ok(id)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConfigId::D2_2 => "D2-2",
            ConfigId::D4_4 => "D4-4",
            ConfigId::D4_2 => "D4-2",
            ConfigId::D6_6 => "D6-6",
            ConfigId::D6_2 => "D6-2",
            ConfigId::O4 => "O4",
            ConfigId::O3 => "O3",
            ConfigId::O3Multipath => "O3M",
            ConfigId::O2 => "O2",
            ConfigId::Y5 => "Y5",
            ConfigId::Y3 => "Y3",
            ConfigId::Y2 => "Y2",
            ConfigId::Hybrid14 => "O14",
        }
    }

    pub fn group(&self) -> Group {
        match self {
            ConfigId::D2_2 => Group::D2,
            ConfigId::D4_4 | ConfigId::D4_2 => Group::D4,
            ConfigId::D6_6 | ConfigId::D6_2 => Group::D6,
            ConfigId::O4 | ConfigId::O3 | ConfigId::O3Multipath | ConfigId::O2 | ConfigId::Hybrid14 => {
                Group::O
            }
            ConfigId::Y5 | ConfigId::Y3 | ConfigId::Y2 => Group::Y,
        }
    }

    /// Axis orders of the sites. The hybrid has two kinds.
    pub fn folds(&self) -> Vec<u32> {
        match self {
            ConfigId::D2_2 | ConfigId::D4_2 | ConfigId::D6_2 | ConfigId::O2 | ConfigId::Y2 => vec![2],
            ConfigId::D4_4 | ConfigId::O4 => vec![4],
            ConfigId::D6_6 => vec![6],
            ConfigId::O3 | ConfigId::O3Multipath | ConfigId::Y3 => vec![3],
            ConfigId::Y5 => vec![5],
            ConfigId::Hybrid14 => vec![4, 3],
        }
    }

    pub fn n_sites(&self) -> usize {
        let g = self.group().order();
        self.folds().iter().map(|&p| g / p as usize).sum()
    }

    /// s in the periodicity J → J + s/2, when the flux through every plaquette is a fixed
    /// multiple of 4π/s. None for the α-dependent configurations.
    pub fn s_parameter(&self) -> Option<u32> {
        match self {
            ConfigId::D2_2 => Some(2),
            ConfigId::D4_4 => Some(4),
            ConfigId::D6_6 => Some(6),
            ConfigId::D4_2 | ConfigId::D6_2 => Some(2),
            ConfigId::O4 => Some(8),
            ConfigId::O3 => Some(6),
            ConfigId::O3Multipath => Some(12),
            ConfigId::Y5 => Some(20),
            ConfigId::Y3 => Some(12),
            ConfigId::Hybrid14 => Some(12),
            ConfigId::O2 | ConfigId::Y2 => None,
        }
    }

    /// Open/closed range allowed for the free plaquette angle α.
    pub fn alpha_range(&self) -> Option<(f64, f64, bool)> {
        match self {
            ConfigId::O2 => Some((0.0, 2.0 * PI / 3.0, false)),
            ConfigId::Y2 => Some((0.0, PI / 3.0, true)),
            _ => None,
        }
    }

    pub fn is_multipath(&self) -> bool {
        matches!(self, ConfigId::O3Multipath)
    }
}

impl fmt::Display for ConfigId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConfigId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ',' | ' ' | '(' | ')' | 'C' | 'c'))
            .collect::<String>()
            .to_ascii_uppercase();
        let id = match key.as_str() {
            "D22" => ConfigId::D2_2,
            "D44" => ConfigId::D4_4,
            "D42" => ConfigId::D4_2,
            "D66" => ConfigId::D6_6,
            "D62" => ConfigId::D6_2,
            "O4" => ConfigId::O4,
            "O3" => ConfigId::O3,
            "O3M" | "O3MULTIPATH" => ConfigId::O3Multipath,
            "O2" => ConfigId::O2,
            "Y5" => ConfigId::Y5,
            "Y3" => ConfigId::Y3,
            "Y2" => ConfigId::Y2,
            "O14" | "O4+3" | "HYBRID" | "HYBRID14" => ConfigId::Hybrid14,
            _ => return Err(Error::InvalidArgument(format!("unknown configuration '{s}'"))),
        };
        Ok(id)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "NN")]
    Nn,
    #[serde(rename = "NNN")]
    Nnn,
}

/// Tunneling link from site `i` to site `j`; the gauge phase lives on this orientation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub kind: EdgeKind,
    /// Number of parallel paths joining i and j (this edge being one of them).
    pub path_multiplicity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plaquette {
    pub cycle: Vec<usize>,
    /// (edge index, +1 if traversed i→j, −1 if j→i)
    pub boundary: Vec<(usize, i8)>,
    /// Flux solid angle, counterclockwise seen from outside is positive.
    pub solid_angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub id: ConfigId,
    pub group: Group,
    pub folds: Vec<u32>,
    pub n_sites: usize,
    pub vertices: Vec<Vec3>,
    pub edges: Vec<Edge>,
    pub plaquettes: Vec<Plaquette>,
    pub s_parameter: Option<u32>,
    pub alpha: Option<f64>,
}

impl Configuration {
    pub fn total_solid_angle(&self) -> f64 {
        self.plaquettes.iter().map(|p| p.solid_angle).sum()
    }

    /// Number of times the plaquettes cover the sphere (1, or 2 for the multipath).
    pub fn cover(&self) -> u32 {
        if self.id.is_multipath() {
            2
        } else {
            1
        }
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.i == v {
                    Some(e.j)
                } else if e.j == v {
                    Some(e.i)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigParams {
    pub alpha: Option<f64>,
}

pub fn make_configuration(id: ConfigId, params: ConfigParams) -> Result<Configuration> {
    let alpha = match id.alpha_range() {
        Some((lo, hi, closed_lo)) => {
            let a = params.alpha.ok_or_else(|| {
                Error::InvalidArgument(format!("configuration {id} needs alpha"))
            })?;
            let ok_lo = if closed_lo { a >= lo } else { a > lo };
            if !(ok_lo && a < hi) {
                return Err(Error::InvalidArgument(format!(
                    "alpha = {a} outside {}{lo}, {hi})",
                    if closed_lo { "[" } else { "(" }
                )));
            }
            Some(a)
        }
        None => None,
    };
    let mut cfg = match id {
        ConfigId::D2_2 => lune_config(id, [1.0, 0.0, 0.0], 2),
        ConfigId::D4_4 => lune_config(id, [0.0, 0.0, 1.0], 4),
        ConfigId::D6_6 => lune_config(id, [0.0, 0.0, 1.0], 6),
        ConfigId::D4_2 => ring_config(id, 4),
        ConfigId::D6_2 => ring_config(id, 6),
        ConfigId::O4 => polyhedron_config(id, octahedron(), |_| PI / 2.0)?,
        ConfigId::O3 => polyhedron_config(id, cube(), |_| 2.0 * PI / 3.0)?,
        ConfigId::O3Multipath => multipath_config()?,
        ConfigId::O2 => {
            let a = alpha.unwrap_or_default();
            polyhedron_config(id, cuboctahedron(), move |len| {
                if len == 4 {
                    a
                } else {
                    PI / 2.0 - 3.0 * a / 4.0
                }
            })?
        }
        ConfigId::Y5 => polyhedron_config(id, icosahedron(), |_| PI / 5.0)?,
        ConfigId::Y3 => polyhedron_config(id, dodecahedron()?, |_| PI / 3.0)?,
        ConfigId::Y2 => {
            let a = alpha.unwrap_or_default();
            polyhedron_config(id, icosidodecahedron()?, move |len| {
                if len == 5 {
                    a
                } else {
                    PI / 5.0 - 3.0 * a / 5.0
                }
            })?
        }
        ConfigId::Hybrid14 => {
            let mut v = octahedron();
            v.extend(cube());
            polyhedron_config(id, v, |_| PI / 3.0)?
        }
    };
    cfg.alpha = alpha;
    Ok(cfg)
}

/// Octahedron in the order +z, −z, +x, −x, +y, −y.
pub fn octahedron() -> Vec<Vec3> {
    vec![
        [0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
}

pub fn cube() -> Vec<Vec3> {
    let s = 1.0 / 3f64.sqrt();
    let mut v = Vec::with_capacity(8);
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                v.push([a * s, b * s, c * s]);
            }
        }
    }
    v
}

pub fn cuboctahedron() -> Vec<Vec3> {
    let s = 0.5f64.sqrt();
    let mut v = Vec::with_capacity(12);
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            v.push([a * s, b * s, 0.0]);
            v.push([a * s, 0.0, b * s]);
            v.push([0.0, a * s, b * s]);
        }
    }
    v
}

/// (±α, ±β, 0) and its cyclic permutations (0, ±α, ±β), (±β, 0, ±α).
pub fn icosahedron() -> Vec<Vec3> {
    let (a, b) = icosa_ab();
    let mut v = Vec::with_capacity(12);
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            v.push([s1 * a, s2 * b, 0.0]);
            v.push([0.0, s1 * a, s2 * b]);
            v.push([s2 * b, 0.0, s1 * a]);
        }
    }
    v
}

fn dodecahedron() -> Result<Vec<Vec3>> {
    let ico = icosahedron();
    let edges = nearest_neighbour_edges(&ico);
    let faces = trace_faces(&ico, &edges)?;
    Ok(faces
        .iter()
        .map(|f| normalize(f.iter().fold([0.0; 3], |acc, &k| add(acc, ico[k]))))
        .collect())
}

fn icosidodecahedron() -> Result<Vec<Vec3>> {
    let ico = icosahedron();
    Ok(nearest_neighbour_edges(&ico)
        .iter()
        .map(|&(i, j)| normalize(add(ico[i], ico[j])))
        .collect())
}

/// Pairs at the minimal angular distance.
pub fn nearest_neighbour_edges(v: &[Vec3]) -> Vec<(usize, usize)> {
    let n = v.len();
    let mut dmin = f64::INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            dmin = dmin.min(angle_between(v[i], v[j]));
        }
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (angle_between(v[i], v[j]) - dmin).abs() < 1e-6 {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Orthonormal tangent frame (e1, e2) at unit `z` with e1 × e2 = z.
fn tangent_frame(z: Vec3) -> (Vec3, Vec3) {
    let k = (0..3)
        .min_by(|&a, &b| z[a].abs().total_cmp(&z[b].abs()))
        .unwrap_or(0);
    let mut r = [0.0; 3];
    r[k] = 1.0;
    let e1 = normalize(cross(z, r));
    let e2 = cross(z, e1);
    (e1, e2)
}

/// Faces of an embedded planar graph on the sphere, each oriented counterclockwise
/// seen from outside.
pub fn trace_faces(v: &[Vec3], edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    let n = v.len();
    let mut nb: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(i, j) in edges {
        nb[i].push(j);
        nb[j].push(i);
    }
    for (c, list) in nb.iter_mut().enumerate() {
        let (e1, e2) = tangent_frame(v[c]);
        list.sort_by(|&a, &b| {
            let ang = |u: usize| {
                let t = sub(v[u], scale(v[c], dot(v[u], v[c])));
                dot(t, e2).atan2(dot(t, e1))
            };
            ang(a).total_cmp(&ang(b))
        });
    }
    let mut used: HashSet<(usize, usize)> = HashSet::new();
    let mut faces = Vec::new();
    for &(i, j) in edges {
        for (a, b) in [(i, j), (j, i)] {
            if used.contains(&(a, b)) {
                continue;
            }
            let mut cyc = vec![a];
            let (mut u, mut w) = (a, b);
            loop {
                if !used.insert((u, w)) {
                    return Err(Error::Geometry("face traversal revisited a dart".into()));
                }
                cyc.push(w);
                let r = &nb[w];
                let k = r.iter().position(|&x| x == u).ok_or_else(|| {
                    Error::Geometry("inconsistent adjacency in face traversal".into())
                })?;
                let next = r[(k + r.len() - 1) % r.len()];
                u = w;
                w = next;
                if (u, w) == (a, b) {
                    break;
                }
                if cyc.len() > 2 * edges.len() + 2 {
                    return Err(Error::Geometry("face traversal did not close".into()));
                }
            }
            cyc.pop();
            faces.push(cyc);
        }
    }
    Ok(faces)
}

/// Oriented area of the geodesic polygon through `cycle`, in (−2π, 2π].
///
/// Counterclockwise traversal seen from outside gives the positive (left-hand) area.
pub fn solid_angle(cycle: &[Vec3]) -> Result<f64> {
    let n = cycle.len();
    if n < 3 {
        return Err(Error::Geometry(format!("polygon with {n} vertices")));
    }
    let mut turning = 0.0;
    for k in 0..n {
        let p = normalize(cycle[(k + n - 1) % n]);
        let c = normalize(cycle[k]);
        let q = normalize(cycle[(k + 1) % n]);
        for other in [p, q] {
            if norm(cross(other, c)) < 1e-12 {
                return Err(Error::Geometry(
                    "consecutive vertices coincide or are antipodal".into(),
                ));
            }
        }
        let tin = scale(normalize(sub(p, scale(c, dot(p, c)))), -1.0);
        let tout = normalize(sub(q, scale(c, dot(q, c))));
        turning += dot(cross(tin, tout), c).atan2(dot(tin, tout));
    }
    let area = 2.0 * PI - turning;
    Ok(if area > 2.0 * PI + 1e-12 { area - 4.0 * PI } else { area })
}

fn edge_lookup(edges: &[Edge], a: usize, b: usize) -> Option<(usize, i8)> {
    edges.iter().enumerate().find_map(|(k, e)| {
        if e.i == a && e.j == b {
            Some((k, 1))
        } else if e.i == b && e.j == a {
            Some((k, -1))
        } else {
            None
        }
    })
}

fn boundary_of(edges: &[Edge], cycle: &[usize]) -> Result<Vec<(usize, i8)>> {
    (0..cycle.len())
        .map(|k| {
            let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
            edge_lookup(edges, a, b)
                .ok_or_else(|| Error::Geometry(format!("plaquette uses missing edge {a}-{b}")))
        })
        .collect()
}

/// Nearest-neighbour graph with its faces; `flux` maps face length to the flux angle.
fn polyhedron_config(
    id: ConfigId,
    vertices: Vec<Vec3>,
    flux: impl Fn(usize) -> f64,
) -> Result<Configuration> {
    let pairs = nearest_neighbour_edges(&vertices);
    let edges: Vec<Edge> = pairs
        .iter()
        .map(|&(i, j)| Edge { i, j, kind: EdgeKind::Nn, path_multiplicity: 1 })
        .collect();
    let faces = trace_faces(&vertices, &pairs)?;
    let mut plaquettes = Vec::with_capacity(faces.len());
    for f in faces {
        let pts: Vec<Vec3> = f.iter().map(|&k| vertices[k]).collect();
        if solid_angle(&pts)? <= 0.0 {
            return Err(Error::Geometry("face traced clockwise".into()));
        }
        plaquettes.push(Plaquette {
            boundary: boundary_of(&edges, &f)?,
            solid_angle: flux(f.len()),
            cycle: f,
        });
    }
    Ok(Configuration {
        id,
        group: id.group(),
        folds: id.folds(),
        n_sites: vertices.len(),
        vertices,
        edges,
        plaquettes,
        s_parameter: id.s_parameter(),
        alpha: None,
    })
}

/// Two antipodal sites joined by `p` meridian paths; lune k lies between paths k and k+1.
fn lune_config(id: ConfigId, axis: Vec3, p: u32) -> Configuration {
    let vertices = vec![axis, scale(axis, -1.0)];
    let edges: Vec<Edge> = (0..p)
        .map(|_| Edge { i: 0, j: 1, kind: EdgeKind::Nn, path_multiplicity: p })
        .collect();
    let plaquettes = (0..p as usize)
        .map(|k| Plaquette {
            cycle: vec![0, 1],
            boundary: vec![(k, 1), ((k + 1) % p as usize, -1)],
            solid_angle: 4.0 * PI / p as f64,
        })
        .collect();
    Configuration {
        id,
        group: id.group(),
        folds: id.folds(),
        n_sites: 2,
        vertices,
        edges,
        plaquettes,
        s_parameter: id.s_parameter(),
        alpha: None,
    }
}

/// N sites on the equator; the two hemispheres are the plaquettes.
fn ring_config(id: ConfigId, n: usize) -> Configuration {
    let vertices: Vec<Vec3> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect();
    let edges: Vec<Edge> = (0..n)
        .map(|k| Edge { i: k, j: (k + 1) % n, kind: EdgeKind::Nn, path_multiplicity: 1 })
        .collect();
    let north: Vec<usize> = (0..n).collect();
    let south: Vec<usize> = (0..n).rev().collect();
    let plaquettes = [north, south]
        .into_iter()
        .map(|c| Plaquette {
            boundary: boundary_of(&edges, &c).expect("ring edges"),
            cycle: c,
            solid_angle: 2.0 * PI,
        })
        .collect();
    Configuration {
        id,
        group: id.group(),
        folds: id.folds(),
        n_sites: n,
        vertices,
        edges,
        plaquettes,
        s_parameter: id.s_parameter(),
        alpha: None,
    }
}

/// Cube vertices with face diagonals; each face contributes four triangles of π/3.
fn multipath_config() -> Result<Configuration> {
    let vertices = cube();
    let pairs = nearest_neighbour_edges(&vertices);
    let faces = trace_faces(&vertices, &pairs)?;
    let mut edges: Vec<Edge> = pairs
        .iter()
        .map(|&(i, j)| Edge { i, j, kind: EdgeKind::Nn, path_multiplicity: 1 })
        .collect();
    for f in &faces {
        for (a, c) in [(f[0], f[2]), (f[1], f[3])] {
            edges.push(Edge { i: a.min(c), j: a.max(c), kind: EdgeKind::Nnn, path_multiplicity: 1 });
        }
    }
    let mut plaquettes = Vec::with_capacity(24);
    for f in &faces {
        for k in 0..4 {
            let tri = vec![f[k], f[(k + 1) % 4], f[(k + 2) % 4]];
            plaquettes.push(Plaquette {
                boundary: boundary_of(&edges, &tri)?,
                cycle: tri,
                solid_angle: PI / 3.0,
            });
        }
    }
    let id = ConfigId::O3Multipath;
    Ok(Configuration {
        id,
        group: id.group(),
        folds: id.folds(),
        n_sites: 8,
        vertices,
        edges,
        plaquettes,
        s_parameter: id.s_parameter(),
        alpha: None,
    })
}

/// Which set of classical minima is deepest for H = −a·S4 − b·S6 on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtremaClass {
    pub n_minima: u32,
    pub boundary: bool,
}

/// Depths at [100], [111], [110].
pub fn cubic_depths(a: f64, b: f64) -> [(u32, f64); 3] {
    [
        (6, -a - b),
        (8, -a / 3.0 - 11.0 * b / 9.0),
        (12, -a / 2.0 - b / 4.0),
    ]
}

pub fn classify_extrema(a: f64, b: f64) -> Result<ExtremaClass> {
    if a == 0.0 && b == 0.0 {
        return Err(Error::InvalidArgument("a = b = 0 has no anisotropy".into()));
    }
    let mut d = cubic_depths(a, b);
    d.sort_by(|x, y| x.1.total_cmp(&y.1));
    let tol = 1e-12 * a.abs().max(b.abs());
    Ok(ExtremaClass {
        n_minima: d[0].0,
        boundary: d[1].1 - d[0].1 <= tol,
    })
}

/// Classical class for the CEF angle φ, with a = cosφ and b = sinφ.
pub fn classify_phi(phi: f64) -> ExtremaClass {
    classify_extrema(phi.cos(), phi.sin()).expect("unit vector is never zero")
}

/// Interior intervals of φ (radians, within [−π, π] modulo 2π) for each class.
pub fn phi_regions() -> [(u32, f64, f64); 3] {
    let b68 = 3f64.atan();
    let b612 = (-2.0f64 / 3.0).atan();
    // E8 = E12 where a/6 = 35b/36, i.e. tanφ = 6/35 with a < 0
    let b812 = (6.0f64 / 35.0).atan() + PI;
    [(6, b612, b68), (8, b68, b812), (12, b812 - 2.0 * PI, b612)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_configs() -> Vec<Configuration> {
        ConfigId::ALL
            .iter()
            .map(|&id| {
                let alpha = match id {
                    ConfigId::O2 => Some(2.0 * PI / 9.0),
                    ConfigId::Y2 => Some(0.4),
                    _ => None,
                };
                make_configuration(id, ConfigParams { alpha }).unwrap()
            })
            .collect()
    }

    #[test]
    fn octant_and_cube_face() {
        let a = solid_angle(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!((a - PI / 2.0).abs() < 1e-14);
        let r = solid_angle(&[[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]).unwrap();
        assert!((r + PI / 2.0).abs() < 1e-14);
        let s = 1.0 / 3f64.sqrt();
        let t = solid_angle(&[[s, s, s], [-s, s, s], [-s, -s, s]]).unwrap();
        assert!((t - PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn antipodal_is_rejected() {
        let e = solid_angle(&[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(e, Err(Error::Geometry(_))));
    }

    #[test]
    fn counts_and_sums() {
        for c in all_configs() {
            let total = c.total_solid_angle();
            let want = 4.0 * PI * c.cover() as f64;
            assert!((total - want).abs() < 1e-10, "{}: {total}", c.id);
            assert_eq!(c.n_sites, c.id.n_sites(), "{}", c.id);
            assert_eq!(c.vertices.len(), c.n_sites);
            for v in &c.vertices {
                assert!((norm(*v) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn octahedron_layout() {
        let c = make_configuration(ConfigId::O4, ConfigParams::default()).unwrap();
        assert_eq!((c.n_sites, c.edges.len(), c.plaquettes.len()), (6, 12, 8));
        assert!(c.plaquettes.iter().all(|p| (p.solid_angle - PI / 2.0).abs() < 1e-15));
    }

    #[test]
    fn cuboctahedron_plaquettes() {
        let a = 2.0 * PI / 9.0;
        let c = make_configuration(ConfigId::O2, ConfigParams { alpha: Some(a) }).unwrap();
        let sq: Vec<_> = c.plaquettes.iter().filter(|p| p.cycle.len() == 4).collect();
        let tr: Vec<_> = c.plaquettes.iter().filter(|p| p.cycle.len() == 3).collect();
        assert_eq!((sq.len(), tr.len()), (6, 8));
        assert!(tr.iter().all(|p| (p.solid_angle - PI / 3.0).abs() < 1e-14));
    }

    #[test]
    fn ring_and_hybrid() {
        let r = make_configuration(ConfigId::D4_2, ConfigParams::default()).unwrap();
        assert_eq!((r.n_sites, r.edges.len(), r.plaquettes.len()), (4, 4, 2));
        let h = make_configuration(ConfigId::Hybrid14, ConfigParams::default()).unwrap();
        assert_eq!((h.edges.len(), h.plaquettes.len()), (24, 12));
        assert!(h.edges.iter().all(|e| (e.i < 6) != (e.j < 6)));
        let m = make_configuration(ConfigId::O3Multipath, ConfigParams::default()).unwrap();
        assert_eq!((m.edges.len(), m.plaquettes.len()), (24, 24));
    }

    #[test]
    fn icosahedral_counts() {
        let y3 = make_configuration(ConfigId::Y3, ConfigParams::default()).unwrap();
        assert_eq!((y3.n_sites, y3.edges.len(), y3.plaquettes.len()), (20, 30, 12));
        let y2 = make_configuration(ConfigId::Y2, ConfigParams { alpha: Some(0.0) }).unwrap();
        assert_eq!((y2.n_sites, y2.edges.len(), y2.plaquettes.len()), (30, 60, 32));
    }

    #[test]
    fn geometric_faces_are_counterclockwise() {
        for c in all_configs() {
            if c.n_sites == 2 || matches!(c.id, ConfigId::D4_2 | ConfigId::D6_2) {
                continue;
            }
            for p in &c.plaquettes {
                let pts: Vec<Vec3> = p.cycle.iter().map(|&k| c.vertices[k]).collect();
                assert!(solid_angle(&pts).unwrap() > 0.0, "{}", c.id);
            }
        }
    }

    #[test]
    fn vertex_sets_are_group_orbits() {
        for c in all_configs() {
            for (axis, th) in c.group.generators() {
                for v in &c.vertices {
                    let w = rotate(axis, th, *v);
                    let hit = c.vertices.iter().any(|u| norm(sub(*u, w)) < 1e-12);
                    assert!(hit, "{} not closed", c.id);
                }
            }
        }
    }

    #[test]
    fn alpha_is_validated() {
        assert!(make_configuration(ConfigId::O2, ConfigParams::default()).is_err());
        assert!(make_configuration(ConfigId::O2, ConfigParams { alpha: Some(0.0) }).is_err());
        assert!(make_configuration(ConfigId::O2, ConfigParams { alpha: Some(2.2) }).is_err());
        assert!(make_configuration(ConfigId::Y2, ConfigParams { alpha: Some(PI / 3.0) }).is_err());
    }

    #[test]
    fn parse_names() {
        for id in ConfigId::ALL {
            assert_eq!(id.name().parse::<ConfigId>().unwrap(), id);
        }
        assert_eq!("d4,2".parse::<ConfigId>().unwrap(), ConfigId::D4_2);
        assert_eq!("hybrid".parse::<ConfigId>().unwrap(), ConfigId::Hybrid14);
        assert!("O5".parse::<ConfigId>().is_err());
        assert!(ConfigId::new(Group::D4, 3, false).is_err());
    }

    #[test]
    fn phase_diagram() {
        assert_eq!(classify_extrema(1.0, 0.0).unwrap(), ExtremaClass { n_minima: 6, boundary: false });
        let b = classify_extrema(1.0, 3.0).unwrap();
        assert!(b.boundary && (b.n_minima == 6 || b.n_minima == 8));
        assert_eq!(classify_extrema(1.0, -1.0).unwrap().n_minima, 12);
        assert!(classify_extrema(0.0, 0.0).is_err());
        for (n, lo, hi) in phi_regions() {
            assert_eq!(classify_phi(0.5 * (lo + hi)).n_minima, n);
        }
    }

    #[test]
    fn depths_match_dense_grid() {
        // brute-force minimum of −a·S4 − b·S6 over the sphere
        for (a, b) in [(1.0, 0.0), (1.0, -1.0), (-1.0, 0.3), (0.2, 1.0), (-0.5, -1.0)] {
            let mut best = (f64::INFINITY, [0.0; 3]);
            let n = 400;
            for i in 0..=n {
                for k in 0..n {
                    let th = PI * i as f64 / n as f64;
                    let ph = 0.5 * PI * k as f64 / n as f64;
                    let v = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
                    let s4 = v.iter().map(|x| x.powi(4)).sum::<f64>();
                    let s6 = v.iter().map(|x| x.powi(6)).sum::<f64>()
                        + 30.0 * (v[0] * v[1] * v[2]).powi(2);
                    let e = -a * s4 - b * s6;
                    if e < best.0 {
                        best = (e, v);
                    }
                }
            }
            let d = cubic_depths(a, b);
            let m = d.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
            assert!((best.0 - m).abs() < 1e-3, "{a} {b}: {} vs {m}", best.0);
        }
    }
}
