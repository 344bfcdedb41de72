//! GF(2) simplicial homology of the underlying semi-simplicial set. The
//! `∅`-level is not part of the chains, so the homology is unreduced.

use crate::cset::{Cset, SimplexId};

/// Dense GF(2) matrix, one bit-packed row per column of the boundary map's
/// source (i.e. stored transposed: `rows[j]` is the boundary of basis
/// element `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
struct BitMatrix {
    width: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    fn zeros(height: usize, width: usize) -> Self {
        BitMatrix {
            width,
            rows: vec![vec![0; width.div_ceil(64)]; height],
        }
    }

    fn flip(&mut self, r: usize, c: usize) {
        self.rows[r][c / 64] ^= 1 << (c % 64);
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r][c / 64] >> (c % 64) & 1 == 1
    }

    /// Rank by Gaussian elimination.
    fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.width {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r][c / 64] >> (c % 64) & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[c / 64] >> (c % 64) & 1 == 1 {
                    for (w, pw) in row.iter_mut().zip(&pivot) {
                        *w ^= pw;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Chains `C_k` spanned by the simplices with `k+1` colors, with the
/// sign-free boundary (sum of codimension-1 faces).
#[derive(Clone, Debug)]
pub struct ChainComplexGF2 {
    basis: Vec<Vec<SimplexId>>,
    /// `boundary[k]` maps `C_k` to `C_{k-1}`; `boundary[0]` is zero.
    boundary: Vec<BitMatrix>,
    /// Faces of faces, computed through the face maps of the cset rather
    /// than by composing matrices.
    double: Vec<BitMatrix>,
}

impl ChainComplexGF2 {
    pub fn new(x: &Cset) -> Self {
        let top = x.max_dimension().map_or(0, |d| d + 1);
        let basis: Vec<Vec<SimplexId>> = (0..top).map(|k| x.dimension(k)).collect();
        let mut position = vec![0; x.len()];
        for ids in &basis {
            for (i, &id) in ids.iter().enumerate() {
                position[id] = i;
            }
        }
        let mut boundary = Vec::with_capacity(top);
        let mut double = Vec::with_capacity(top);
        for k in 0..top {
            let below = if k == 0 { 0 } else { basis[k - 1].len() };
            let below2 = if k < 2 { 0 } else { basis[k - 2].len() };
            let mut m = BitMatrix::zeros(basis[k].len(), below);
            let mut dd = BitMatrix::zeros(basis[k].len(), below2);
            for (j, &s) in basis[k].iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let color = x.color(s);
                for a in color.iter() {
                    let f = x.face(s, color.without(a)).expect("complete faces");
                    m.flip(j, position[f]);
                    if k >= 2 {
                        let fc = x.color(f);
                        for b in fc.iter() {
                            let g = x.face(f, fc.without(b)).expect("complete faces");
                            dd.flip(j, position[g]);
                        }
                    }
                }
            }
            boundary.push(m);
            double.push(dd);
        }
        ChainComplexGF2 {
            basis,
            boundary,
            double,
        }
    }

    /// `dim C_k`.
    pub fn rank_of_chains(&self, k: usize) -> usize {
        self.basis.get(k).map_or(0, Vec::len)
    }

    pub fn boundary_rank(&self, k: usize) -> usize {
        self.boundary.get(k).map_or(0, BitMatrix::rank)
    }

    /// Whether `∂_{k-1} ∘ ∂_k` vanishes in every degree.
    pub fn boundary_squared_is_zero(&self) -> bool {
        self.double
            .iter()
            .all(|m| m.rows.iter().all(|r| r.iter().all(|&w| w == 0)))
    }

    /// Entry of `∂_k` at (source basis element, target basis element).
    pub fn incidence(&self, k: usize, source: usize, target: usize) -> bool {
        self.boundary[k].get(source, target)
    }

    /// `b_k = dim C_k - rank ∂_k - rank ∂_{k+1}` for `k` up to the top
    /// dimension.
    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = (0..=self.basis.len()).map(|k| self.boundary_rank(k)).collect();
        (0..self.basis.len())
            .map(|k| self.basis[k].len() - ranks[k] - ranks[k + 1])
            .collect()
    }
}

pub fn betti(x: &Cset) -> Vec<usize> {
    ChainComplexGF2::new(x).betti()
}

/// `∂∂ = 0`, evaluated through the face maps.
pub fn boundary_squared_is_zero(x: &Cset) -> bool {
    ChainComplexGF2::new(x).boundary_squared_is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::DynamicNetworkModel;
    use crate::cset::{AgentMask, AgentSet};
    use crate::protocol::ProtocolFunctor;

    fn triangle() -> Cset {
        let agents = AgentSet::alphabetic(3);
        Cset::standard_simplex(&agents, agents.full()).unwrap()
    }

    fn hollow() -> Cset {
        let x = triangle();
        let top = x.level(AgentMask(0b111))[0];
        x.restrict(|id| id != top).unwrap().0
    }

    #[test]
    fn simplex_and_circle() {
        assert_eq!(betti(&triangle()), vec![1, 0, 0]);
        assert_eq!(betti(&hollow()), vec![1, 1]);
        assert!(betti(&Cset::empty(AgentSet::alphabetic(2))).is_empty());
    }

    #[test]
    fn snapshot_round_preserves_homology() {
        let f = ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(AgentSet::alphabetic(3))).unwrap();
        for x in [triangle(), hollow()] {
            let p = f.extend(&x).unwrap();
            assert!(boundary_squared_is_zero(&p.complex));
            assert_eq!(betti(&p.complex), betti(&x));
        }
    }

    #[test]
    fn disjoint_union_adds() {
        let (a, b) = (triangle(), hollow());
        let sum = Cset::coproduct(&[&a, &b]).unwrap();
        assert_eq!(betti(&sum), vec![2, 1, 0]);
    }

    #[test]
    fn broken_faces_are_detected() {
        let mut x = triangle();
        let ab = x.level(AgentMask(0b011))[0];
        // point the ab-edge's a-vertex at b's vertex
        let vb = x.level(AgentMask(0b010))[0];
        x.corrupt_face(ab, AgentMask(0b001), vb);
        assert!(!x.validate().is_valid());
        assert!(!boundary_squared_is_zero(&x));
    }
}
