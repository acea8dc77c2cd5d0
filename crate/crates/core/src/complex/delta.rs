use crate::gf2::{BitMatrix, BitVector};

use super::ComplexError;

/// An ordered Δ-complex: each `k`-simplex has an ordered vertex tuple and
/// explicit faces, the `j`-th face being the one opposite vertex `j`.
///
/// Distinct simplices may share a vertex tuple, so faces are stored by index
/// rather than recovered from vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaComplex {
    simplices: Vec<Vec<Vec<usize>>>,
    faces: Vec<Vec<Vec<usize>>>,
}

impl DeltaComplex {
    pub fn new(simplices: Vec<Vec<Vec<usize>>>, faces: Vec<Vec<Vec<usize>>>) -> Result<Self, ComplexError> {
        let bad = |msg: String| Err(ComplexError::Integrity(msg));
        if simplices.len() != faces.len() || simplices.is_empty() {
            return bad("simplex and face tables disagree in depth".into());
        }
        let vertex_count = simplices[0].len();
        for (k, level) in simplices.iter().enumerate() {
            if faces[k].len() != level.len() {
                return bad(format!(
                    "dimension {k}: {} simplices but {} face lists",
                    level.len(),
                    faces[k].len()
                ));
            }
            for (i, verts) in level.iter().enumerate() {
                if verts.len() != k + 1 || verts.iter().any(|&v| v >= vertex_count) {
                    return bad(format!("simplex ({k}, {i}) has malformed vertices {verts:?}"));
                }
                if k == 0 {
                    if verts[0] != i || !faces[0][i].is_empty() {
                        return bad(format!("vertex {i} is not self-indexed"));
                    }
                    continue;
                }
                let fs = &faces[k][i];
                if fs.len() != k + 1 {
                    return bad(format!("simplex ({k}, {i}) has {} faces", fs.len()));
                }
                for (j, &f) in fs.iter().enumerate() {
                    let Some(face_verts) = simplices[k - 1].get(f) else {
                        return bad(format!("face {j} of ({k}, {i}) is not listed"));
                    };
                    let expected: Vec<usize> = verts
                        .iter()
                        .enumerate()
                        .filter(|&(p, _)| p != j)
                        .map(|(_, &v)| v)
                        .collect();
                    if *face_verts != expected {
                        return bad(format!(
                            "face {j} of ({k}, {i}) has vertices {face_verts:?}, expected {expected:?}"
                        ));
                    }
                }
            }
        }
        let complex = Self { simplices, faces };
        for k in 2..=complex.dim() {
            if !complex
                .boundary_matrix(k)
                .mul(&complex.boundary_matrix(k - 1))?
                .is_zero()
            {
                return bad(format!("boundary of boundary is nonzero in dimension {k}"));
            }
        }
        Ok(complex)
    }

    /// Top dimension (number of levels minus one; trailing empty levels are kept).
    pub fn dim(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices.get(k).map_or(0, Vec::len)
    }

    pub fn cells_per_dim(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn vertices(&self, k: usize, i: usize) -> &[usize] {
        &self.simplices[k][i]
    }

    pub fn faces(&self, k: usize, i: usize) -> &[usize] {
        &self.faces[k][i]
    }

    pub fn face(&self, k: usize, i: usize, j: usize) -> usize {
        self.faces[k][i][j]
    }

    /// The face spanned by the first `p + 1` vertices.
    pub fn front_face(&self, k: usize, i: usize, p: usize) -> usize {
        assert!(p <= k);
        let mut idx = i;
        for d in (p + 1..=k).rev() {
            idx = self.faces[d][idx][d];
        }
        idx
    }

    /// The face spanned by the last `q + 1` vertices.
    pub fn back_face(&self, k: usize, i: usize, q: usize) -> usize {
        assert!(q <= k);
        let mut idx = i;
        for d in (q + 1..=k).rev() {
            idx = self.faces[d][idx][0];
        }
        idx
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let v = &self.simplices[1][e];
        (v[0], v[1])
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    /// `∂ₖ` with one row per `k`-simplex and one column per `(k−1)`-simplex.
    /// Signs vanish mod 2; a face occurring twice cancels.
    pub fn boundary_matrix(&self, k: usize) -> BitMatrix {
        if k == 0 {
            return BitMatrix::zeros(self.count(0), 0);
        }
        let mut m = BitMatrix::zeros(self.count(k), self.count(k - 1));
        for i in 0..self.count(k) {
            for &f in &self.faces[k][i] {
                m.flip(i, f);
            }
        }
        m
    }

    pub fn boundary_matrices(&self) -> Vec<BitMatrix> {
        (0..=self.dim()).map(|k| self.boundary_matrix(k)).collect()
    }

    /// Number of incidences of each `k`-simplex as a face of a `(k+1)`-simplex.
    pub fn coface_counts(&self, k: usize) -> Vec<usize> {
        let mut counts = vec![0; self.count(k)];
        if k < self.dim() {
            for fs in &self.faces[k + 1] {
                for &f in fs {
                    counts[f] += 1;
                }
            }
        }
        counts
    }

    /// Every codimension-one simplex lies in exactly two top simplices.
    pub fn is_closed_pseudomanifold(&self) -> bool {
        let n = self.dim();
        n > 0 && self.count(n) > 0 && self.coface_counts(n - 1).iter().all(|&c| c == 2)
    }

    /// Sum of all top simplices, the mod-2 fundamental cycle of a closed pseudomanifold.
    pub fn fundamental_cycle(&self) -> BitVector {
        BitVector::ones(self.count(self.dim()))
    }
}
