//! Horizon-truncated free algebra `I, F(I), F²(I), …` with the chain of
//! next-state projections.

use crate::cset::{Cset, CsetMorphism, SimplexId, SimplicialModel};
use crate::error::{Error, Result};
use crate::protocol::{ProtocolComplex, ProtocolFunctor};

/// How a next-state projection was obtained.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// `q`, the projection of `F_!(I)` onto `I`.
    Base,
    /// `F^n(q)`, obtained by lifting `q` through `n` applications of `F_!`.
    Lifted(usize),
}

#[derive(Clone, Debug)]
pub struct FreeAlgebraTrunc {
    rounds: Vec<SimplicialModel>,
    next_proj: Vec<CsetMorphism>,
    provenance: Vec<Provenance>,
    canonical: Vec<CsetMorphism>,
    fibers: Vec<Vec<Vec<SimplexId>>>,
}

impl FreeAlgebraTrunc {
    /// Materializes rounds `0..=horizon`. `p_0 = q` and
    /// `p_n = F_!(p_{n-1})`; a round larger than `budget` simplices aborts.
    pub fn build(f: &ProtocolFunctor, input: SimplicialModel, horizon: usize, budget: Option<usize>) -> Result<Self> {
        let mut rounds = vec![input];
        let mut next_proj: Vec<CsetMorphism> = Vec::with_capacity(horizon);
        let mut canonical = Vec::with_capacity(horizon);
        let mut provenance = Vec::with_capacity(horizon);
        let mut prev: Option<ProtocolComplex> = None;
        for n in 0..horizon {
            let (next, ext) = f.extend_model(&rounds[n])?;
            if let Some(budget) = budget {
                if next.cset.len() > budget {
                    return Err(Error::BudgetExceeded {
                        round: n + 1,
                        size: next.cset.len(),
                        budget,
                    });
                }
            }
            let p = match &prev {
                None => {
                    provenance.push(Provenance::Base);
                    ext.projection.clone()
                }
                Some(prev_ext) => {
                    provenance.push(Provenance::Lifted(n));
                    f.apply_to_morphism(&next_proj[n - 1], &ext, prev_ext)?
                }
            };
            canonical.push(ext.projection.clone());
            next_proj.push(p);
            rounds.push(next);
            prev = Some(ext);
        }
        let fibers = next_proj
            .iter()
            .enumerate()
            .map(|(n, p)| {
                let mut fib = vec![Vec::new(); rounds[n].cset.len()];
                for (y, &x) in p.as_slice().iter().enumerate() {
                    fib[x].push(y);
                }
                fib
            })
            .collect();
        Ok(FreeAlgebraTrunc {
            rounds,
            next_proj,
            provenance,
            canonical,
            fibers,
        })
    }

    pub fn horizon(&self) -> usize {
        self.rounds.len() - 1
    }

    pub fn round(&self, n: usize) -> &Cset {
        &self.rounds[n].cset
    }

    pub fn model(&self, n: usize) -> &SimplicialModel {
        &self.rounds[n]
    }

    pub fn rounds(&self) -> &[SimplicialModel] {
        &self.rounds
    }

    /// `p_n : X_{n+1} -> X_n`.
    pub fn next_projection(&self, n: usize) -> &CsetMorphism {
        &self.next_proj[n]
    }

    pub fn provenance(&self, n: usize) -> Provenance {
        self.provenance[n]
    }

    /// The canonical projection of `F_!(X_n)` onto `X_n`, kept for comparison
    /// with `p_n`.
    pub fn canonical_projection(&self, n: usize) -> &CsetMorphism {
        &self.canonical[n]
    }

    /// Rounds where `p_n` differs from the canonical projection.
    pub fn projection_disagreements(&self) -> Vec<usize> {
        (0..self.next_proj.len())
            .filter(|&n| self.next_proj[n] != self.canonical[n])
            .collect()
    }

    pub fn check_world(&self, round: usize, world: SimplexId) -> Result<()> {
        if round > self.horizon() || world >= self.round(round).len() || self.round(round).color(world).is_empty() {
            return Err(Error::WorldOutOfRange { round, world });
        }
        Ok(())
    }

    /// `{ y ∈ X_{n+1} | p_n(y) = x }`.
    pub fn successors(&self, round: usize, x: SimplexId) -> Result<&[SimplexId]> {
        if round >= self.horizon() {
            return Err(Error::HorizonExhausted { round });
        }
        if x >= self.round(round).len() {
            return Err(Error::WorldOutOfRange { round, world: x });
        }
        Ok(&self.fibers[round][x])
    }

    /// `g_n = p_0 ∘ … ∘ p_{n-1}` applied to a round-`n` simplex.
    pub fn to_input(&self, round: usize, x: SimplexId) -> SimplexId {
        (0..round).rev().fold(x, |y, n| self.next_proj[n].apply(y))
    }

    /// Rows `(round, simplex, image)` for every `p_n`.
    pub fn projection_table(&self) -> Vec<(usize, SimplexId, SimplexId)> {
        self.next_proj
            .iter()
            .enumerate()
            .flat_map(|(n, p)| p.as_slice().iter().enumerate().map(move |(y, &x)| (n + 1, y, x)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::DynamicNetworkModel;
    use crate::cset::{AgentMask, AgentSet};

    fn is_functor(n: usize) -> ProtocolFunctor {
        ProtocolFunctor::new(DynamicNetworkModel::immediate_snapshot(AgentSet::alphabetic(n))).unwrap()
    }

    fn edge_input() -> SimplicialModel {
        let agents = AgentSet::alphabetic(2);
        SimplicialModel::unlabeled(Cset::standard_simplex(&agents, agents.full()).unwrap())
    }

    #[test]
    fn horizon_zero_has_no_projections() {
        let t = FreeAlgebraTrunc::build(&is_functor(2), edge_input(), 0, None).unwrap();
        assert_eq!(t.horizon(), 0);
        assert!(t.projection_table().is_empty());
        assert!(matches!(t.successors(0, 0), Err(Error::HorizonExhausted { round: 0 })));
    }

    #[test]
    fn snapshot_growth_on_an_edge() {
        let t = FreeAlgebraTrunc::build(&is_functor(2), edge_input(), 2, None).unwrap();
        assert_eq!(t.round(1).facets().len(), 3);
        assert_eq!(t.round(2).facets().len(), 9);
        let top = t.round(0).level(AgentMask(0b11))[0];
        for &y in &t.round(1).facets() {
            assert_eq!(t.next_projection(0).apply(y), top);
        }
        let succ = t.successors(0, top).unwrap();
        assert_eq!(succ.len(), 3);
        for n in 0..2 {
            t.next_projection(n).check(t.round(n + 1), t.round(n)).unwrap();
        }
        assert_eq!(t.provenance(1), Provenance::Lifted(1));
        // F(q) and the canonical projection differ as maps from round 2 ...
        assert_eq!(t.projection_disagreements(), vec![1]);
        // ... but agree once composed down to the input
        for y in 0..t.round(2).len() {
            let via_canonical = t.next_projection(0).apply(t.canonical_projection(1).apply(y));
            assert_eq!(t.to_input(2, y), via_canonical);
        }
    }

    #[test]
    fn fibers_partition_rounds() {
        let t = FreeAlgebraTrunc::build(&is_functor(2), edge_input(), 2, None).unwrap();
        for n in 0..2 {
            let total: usize = (0..t.round(n).len()).map(|x| t.successors(n, x).unwrap().len()).sum();
            assert_eq!(total, t.round(n + 1).len());
        }
        let a = t.round(0).vertices()[0];
        let succ = t.successors(0, a).unwrap();
        assert!(succ.iter().all(|&y| t.round(1).color(y) == t.round(0).color(a)));
        assert_eq!(succ.len(), 2);
        for y in t.round(2).worlds() {
            assert!(!t.round(0).color(t.to_input(2, y)).is_empty());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = FreeAlgebraTrunc::build(&is_functor(2), edge_input(), 2, Some(8)).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { round: 2, .. }));
    }
}
