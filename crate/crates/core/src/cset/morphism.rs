use super::{Cset, SimplexId};
use crate::error::{Error, Result};

/// A natural transformation between csets, stored as the image of every
/// source simplex. Source and target are supplied when checking.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CsetMorphism {
    map: Vec<SimplexId>,
}

impl CsetMorphism {
    pub fn new(map: Vec<SimplexId>) -> Self {
        CsetMorphism { map }
    }

    pub fn identity(x: &Cset) -> Self {
        CsetMorphism::new((0..x.len()).collect())
    }

    pub fn apply(&self, id: SimplexId) -> SimplexId {
        self.map[id]
    }

    pub fn as_slice(&self) -> &[SimplexId] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &CsetMorphism) -> CsetMorphism {
        CsetMorphism::new(self.map.iter().map(|&y| then.apply(y)).collect())
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.map.len());
        self.map.iter().all(|y| seen.insert(*y))
    }

    /// Verifies color preservation and naturality `f ∘ ∂ = ∂ ∘ f`.
    pub fn check(&self, source: &Cset, target: &Cset) -> Result<()> {
        if source.agents() != target.agents() {
            return Err(Error::AgentSetMismatch);
        }
        if self.map.len() != source.len() {
            return Err(Error::NotAMorphism(format!(
                "map has {} entries for {} simplices",
                self.map.len(),
                source.len()
            )));
        }
        for (x, &fx) in self.map.iter().enumerate() {
            if fx >= target.len() {
                return Err(Error::NotAMorphism(format!("image {} out of range", fx)));
            }
            if source.color(x) != target.color(fx) {
                return Err(Error::NotAMorphism(format!("simplex {} changes color", x)));
            }
            for &(u, face) in source.simplex(x).faces() {
                if self.map[face] != target.face(fx, u).expect("same color") {
                    return Err(Error::NotAMorphism(format!(
                        "naturality fails at simplex {} for face {}",
                        x,
                        source.agents().braced(u)
                    )));
                }
            }
        }
        Ok(())
    }
}
