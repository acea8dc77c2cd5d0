//! Triangulated torus `Rⁿ/L` with the point group acting by simplicial maps.

use std::collections::HashMap;

use num_integer::Integer;

use super::delta::DeltaComplex;
use super::space::{FlatSpace, Resolution};
use super::ComplexError;

/// Vertex permutations of the point group, per element and dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupActionOnComplex {
    /// `perms[g][k][i]` is the image of the `k`-simplex `i` under element `g`.
    perms: Vec<Vec<Vec<usize>>>,
}

impl GroupActionOnComplex {
    pub fn order(&self) -> usize {
        self.perms.len()
    }

    pub fn image(&self, g: usize, k: usize, i: usize) -> usize {
        self.perms[g][k][i]
    }

    /// Indices of the simplices in the orbit of `(k, i)`, element order.
    pub fn orbit(&self, k: usize, i: usize) -> Vec<usize> {
        self.perms.iter().map(|p| p[k][i]).collect()
    }
}

/// Which of the regularity conditions for quotienting fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Regularity {
    pub fixed_vertices: usize,
    pub fixed_simplices: usize,
    pub adjacent_orbit_mates: usize,
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        *self == Regularity::default()
    }
}

/// A Δ-complex structure on the torus `Rⁿ/L`, invariant under the point
/// group, with coordinates in ticks of length `1/scale`.
#[derive(Debug, Clone)]
pub struct EquivariantComplex {
    pub(crate) complex: DeltaComplex,
    pub(crate) scale: i64,
    pub(crate) period_ticks: Vec<i64>,
    /// Vertex positions reduced into the box `[0, period)`.
    pub(crate) positions: Vec<Vec<i64>>,
    /// A lift of each simplex to `Rⁿ`: one position per vertex.
    pub(crate) lifts: Vec<Vec<Vec<Vec<i64>>>>,
    pub(crate) action: GroupActionOnComplex,
    pub(crate) subdivisions: usize,
}

fn reduce(x: &[i64], periods: &[i64]) -> Vec<i64> {
    x.iter().zip(periods).map(|(v, p)| v.rem_euclid(*p)).collect()
}

/// All permutations of `0..n` in lexicographic order.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|r| if r >= first { r + 1 } else { r }));
            out.push(p);
        }
    }
    out
}

/// Interning table keyed by geometric position: first vertex reduced mod
/// the lattice, then offsets of the remaining vertices.
struct GeometricTable {
    periods: Vec<i64>,
    index: Vec<HashMap<Vec<i64>, usize>>,
    simplices: Vec<Vec<Vec<usize>>>,
    faces: Vec<Vec<Vec<usize>>>,
    lifts: Vec<Vec<Vec<Vec<i64>>>>,
}

impl GeometricTable {
    fn new(periods: Vec<i64>, dim: usize) -> Self {
        Self {
            periods,
            index: vec![HashMap::new(); dim + 1],
            simplices: vec![Vec::new(); dim + 1],
            faces: vec![Vec::new(); dim + 1],
            lifts: vec![Vec::new(); dim + 1],
        }
    }

    fn key(&self, tuple: &[Vec<i64>]) -> Vec<i64> {
        let first = &tuple[0];
        let mut key = reduce(first, &self.periods);
        for v in &tuple[1..] {
            key.extend(v.iter().zip(first).map(|(a, b)| a - b));
        }
        key
    }

    fn lookup(&self, tuple: &[Vec<i64>]) -> Option<usize> {
        self.index[tuple.len() - 1].get(&self.key(tuple)).copied()
    }

    fn intern(&mut self, tuple: &[Vec<i64>]) -> usize {
        let k = tuple.len() - 1;
        let key = self.key(tuple);
        if let Some(&i) = self.index[k].get(&key) {
            return i;
        }
        let (verts, faces) = if k == 0 {
            (vec![self.simplices[0].len()], Vec::new())
        } else {
            let faces: Vec<usize> = (0..=k)
                .map(|j| {
                    let mut face = tuple.to_vec();
                    face.remove(j);
                    self.intern(&face)
                })
                .collect();
            let verts = tuple.iter().map(|v| self.intern(std::slice::from_ref(v))).collect();
            (verts, faces)
        };
        let i = self.simplices[k].len();
        self.simplices[k].push(verts);
        self.faces[k].push(faces);
        let lift = if k == 0 {
            vec![reduce(&tuple[0], &self.periods)]
        } else {
            tuple.to_vec()
        };
        self.lifts[k].push(lift);
        self.index[k].insert(key, i);
        i
    }
}

impl EquivariantComplex {
    /// Cubical grid of spacing `resolution` on `Rⁿ/L`, each cube cut into `n!`
    /// simplices along monotone paths that start at the cube corner with all
    /// coordinates even (in grid units). Vertices along each path are
    /// ordered by their number of odd coordinates.
    ///
    /// The point group maps this triangulation to itself, order included,
    /// whenever its translations and the lattice periods are even in grid
    /// units.
    pub fn triangulated_torus(space: &FlatSpace, resolution: Resolution) -> Result<Self, ComplexError> {
        let n = space.dim();
        let scale = resolution.denominator();
        let incompatible = |reason: String| ComplexError::IncompatibleResolution { resolution, reason };
        let periods = space
            .period_ticks(scale)
            .ok_or_else(|| incompatible("lattice periods are not whole grid steps".into()))?;
        if periods.iter().any(|p| *p < 2 || p % 2 != 0) {
            return Err(incompatible(format!(
                "lattice periods {periods:?} (grid steps) must be even"
            )));
        }
        for r in 0..space.point_group_order() {
            let (_, shift) = space
                .rep_ticks(r, scale)
                .ok_or_else(|| incompatible(format!("translation of representative {r} is off the grid")))?;
            if shift.iter().any(|v| v % 2 != 0) {
                return Err(incompatible(format!(
                    "translation of representative {r} is an odd number of steps"
                )));
            }
        }

        let mut table = GeometricTable::new(periods.clone(), n);
        let perms = permutations(n);
        let cube_count: i64 = periods.iter().product();
        for cube in 0..cube_count {
            let mut corner = vec![0i64; n];
            let mut rest = cube;
            for i in (0..n).rev() {
                corner[i] = rest % periods[i];
                rest /= periods[i];
            }
            let start: Vec<i64> = corner.iter().map(|&c| if c % 2 == 0 { c } else { c + 1 }).collect();
            let dir: Vec<i64> = corner.iter().map(|&c| if c % 2 == 0 { 1 } else { -1 }).collect();
            for perm in &perms {
                let mut tuple = vec![start.clone()];
                let mut cur = start.clone();
                for &axis in perm {
                    cur[axis] += dir[axis];
                    tuple.push(cur.clone());
                }
                table.intern(&tuple);
            }
        }

        let mut group_perms = Vec::with_capacity(space.point_group_order());
        for r in 0..space.point_group_order() {
            let mut per_dim = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let mut images = Vec::with_capacity(table.simplices[k].len());
                for lift in &table.lifts[k] {
                    let image: Vec<Vec<i64>> = lift.iter().map(|x| space.apply_rep_ticks(r, scale, x)).collect();
                    let j = table.lookup(&image).ok_or(ComplexError::NotInvariant)?;
                    images.push(j);
                }
                per_dim.push(images);
            }
            group_perms.push(per_dim);
        }

        let positions = table.lifts[0].iter().map(|l| l[0].clone()).collect();
        let complex = DeltaComplex::new(table.simplices, table.faces)?;
        Ok(Self {
            complex,
            scale,
            period_ticks: periods,
            positions,
            lifts: table.lifts,
            action: GroupActionOnComplex { perms: group_perms },
            subdivisions: 0,
        })
    }

    pub fn complex(&self) -> &DeltaComplex {
        &self.complex
    }

    pub fn action(&self) -> &GroupActionOnComplex {
        &self.action
    }

    pub fn subdivisions(&self) -> usize {
        self.subdivisions
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn regularity(&self) -> Regularity {
        let mut reg = Regularity::default();
        let n = self.complex.dim();
        for g in 1..self.action.order() {
            for v in 0..self.complex.count(0) {
                if self.action.image(g, 0, v) == v {
                    reg.fixed_vertices += 1;
                }
            }
            for k in 1..=n {
                for i in 0..self.complex.count(k) {
                    if self.action.image(g, k, i) == i {
                        reg.fixed_simplices += 1;
                    }
                }
            }
        }
        for e in 0..self.complex.count(1) {
            let (a, b) = self.complex.edge_endpoints(e);
            if (0..self.action.order()).any(|g| self.action.image(g, 0, a) == b) {
                reg.adjacent_orbit_mates += 1;
            }
        }
        reg
    }

    /// Barycentric subdivision. New vertices are the old simplices, ordered
    /// by dimension, so every simplicial automorphism preserves vertex order.
    pub fn barycentric_subdivision(&self) -> Result<Self, ComplexError> {
        let n = self.complex.dim();
        for k in 1..=n {
            for i in 0..self.complex.count(k) {
                let mut v = self.complex.vertices(k, i).to_vec();
                v.sort_unstable();
                v.dedup();
                if v.len() != k + 1 {
                    return Err(ComplexError::Integrity(format!(
                        "simplex ({k}, {i}) repeats a vertex; cannot subdivide"
                    )));
                }
            }
        }
        let factor = (1..=n as i64 + 1).fold(1i64, |acc, m| acc.lcm(&m));
        let scale = self
            .scale
            .checked_mul(factor)
            .ok_or_else(|| ComplexError::Integrity("tick scale overflow".into()))?;
        let periods: Vec<i64> = self.period_ticks.iter().map(|p| p * factor).collect();

        let mut sd = ChainTable::new(n);
        let mut vertex_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut positions: Vec<Vec<i64>> = Vec::new();
        let perms = permutations(n + 1);
        for top in 0..self.complex.count(n) {
            let lift = &self.lifts[n][top];
            for order in &perms {
                let mut chain = Vec::with_capacity(n + 1);
                for m in 0..=n {
                    let mut keep: Vec<usize> = order[..=m].to_vec();
                    keep.sort_unstable();
                    let cell = self.sub_face(n, top, &keep);
                    let bary = barycenter(&keep.iter().map(|&p| lift[p].clone()).collect::<Vec<_>>(), factor);
                    let id = *vertex_of.entry(cell).or_insert_with(|| {
                        positions.push(reduce(&bary, &periods));
                        positions.len() - 1
                    });
                    chain.push((id, bary));
                }
                sd.intern(&chain);
            }
        }
        if vertex_of.len() != (0..=n).map(|k| self.complex.count(k)).sum::<usize>() {
            return Err(ComplexError::Integrity(
                "complex is not pure; some simplex lies in no top simplex".into(),
            ));
        }
        let old_cell: Vec<(usize, usize)> = {
            let mut cells = vec![(0, 0); vertex_of.len()];
            for (&cell, &id) in &vertex_of {
                cells[id] = cell;
            }
            cells
        };

        let mut group_perms = Vec::with_capacity(self.action.order());
        for g in 0..self.action.order() {
            let vmap: Vec<usize> = old_cell
                .iter()
                .map(|&(k, i)| vertex_of[&(k, self.action.image(g, k, i))])
                .collect();
            let mut per_dim = Vec::with_capacity(n + 1);
            for k in 0..=n {
                let images = sd.simplices[k]
                    .iter()
                    .map(|verts| {
                        let image: Vec<usize> = verts.iter().map(|&v| vmap[v]).collect();
                        sd.index[k].get(&image).copied().ok_or(ComplexError::NotInvariant)
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                per_dim.push(images);
            }
            group_perms.push(per_dim);
        }

        let mut lifts = sd.lifts;
        lifts[0] = positions.iter().map(|p| vec![p.clone()]).collect();
        let complex = DeltaComplex::new(sd.simplices, sd.faces)?;
        Ok(Self {
            complex,
            scale,
            period_ticks: periods,
            positions,
            lifts,
            action: GroupActionOnComplex { perms: group_perms },
            subdivisions: self.subdivisions + 1,
        })
    }

    /// The face of `(k, i)` spanned by the local vertex positions in `keep` (sorted).
    fn sub_face(&self, k: usize, i: usize, keep: &[usize]) -> (usize, usize) {
        let mut cur: Vec<usize> = (0..=k).collect();
        let (mut dim, mut idx) = (k, i);
        while cur.len() > keep.len() {
            let p = cur.iter().position(|c| !keep.contains(c)).expect("a vertex to drop");
            idx = self.complex.face(dim, idx, p);
            dim -= 1;
            cur.remove(p);
        }
        (dim, idx)
    }
}

/// Barycenter in the refined scale: each old coordinate is multiplied by
/// `factor`, which is divisible by the vertex count.
fn barycenter(points: &[Vec<i64>], factor: i64) -> Vec<i64> {
    let m = points.len() as i64;
    let dim = points[0].len();
    (0..dim)
        .map(|c| points.iter().map(|p| p[c]).sum::<i64>() * (factor / m))
        .collect()
}

/// Interning table for simplices of a subdivision, keyed by vertex ids.
struct ChainTable {
    index: Vec<HashMap<Vec<usize>, usize>>,
    simplices: Vec<Vec<Vec<usize>>>,
    faces: Vec<Vec<Vec<usize>>>,
    lifts: Vec<Vec<Vec<Vec<i64>>>>,
}

impl ChainTable {
    fn new(dim: usize) -> Self {
        Self {
            index: vec![HashMap::new(); dim + 1],
            simplices: vec![Vec::new(); dim + 1],
            faces: vec![Vec::new(); dim + 1],
            lifts: vec![Vec::new(); dim + 1],
        }
    }

    fn intern(&mut self, chain: &[(usize, Vec<i64>)]) -> usize {
        let k = chain.len() - 1;
        let key: Vec<usize> = chain.iter().map(|(v, _)| *v).collect();
        if let Some(&i) = self.index[k].get(&key) {
            return i;
        }
        if k == 0 {
            // vertex ids are assigned by the caller in creation order
            while self.simplices[0].len() <= key[0] {
                let id = self.simplices[0].len();
                self.simplices[0].push(vec![id]);
                self.faces[0].push(Vec::new());
                self.lifts[0].push(Vec::new());
                self.index[0].insert(vec![id], id);
            }
            self.lifts[0][key[0]] = vec![chain[0].1.clone()];
            return key[0];
        }
        let faces: Vec<usize> = (0..=k)
            .map(|j| {
                let mut face = chain.to_vec();
                face.remove(j);
                self.intern(&face)
            })
            .collect();
        let i = self.simplices[k].len();
        self.simplices[k].push(key.clone());
        self.faces[k].push(faces);
        self.lifts[k].push(chain.iter().map(|(_, p)| p.clone()).collect());
        self.index[k].insert(key, i);
        i
    }
}
