//! Stage resolution of group elements relative to an odometer point.
//!
//! For a point `z`, the element `g` is captured at stage `n` when
//! `g ∈ z_nΓ_nD_{n-1}` and at no earlier stage; elements captured at no stage
//! up to the available depth are reported as unresolved.

use serde::{Deserialize, Serialize};

use crate::group::{GroupWord, QuotientChain};
use crate::odometer::{act_unchecked, OdometerPoint};
use crate::tower::TransversalTower;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellResolution {
    /// Captured at `stage`; `rep` is the position in `D_{stage-1}` of the `d` with `g ∈ z_nΓ_n d`.
    Resolved { stage: usize, rep: usize },
    Unresolved { depth: usize },
}

impl CellResolution {
    pub fn stage(&self) -> Option<usize> {
        match self {
            CellResolution::Resolved { stage, .. } => Some(*stage),
            CellResolution::Unresolved { .. } => None,
        }
    }

    /// Resolved at a stage `≤ i`.
    pub fn resolved_by(&self, i: usize) -> bool {
        self.stage().is_some_and(|s| s <= i)
    }
}

/// Resolves elements against a fixed point `z`, up to `min(depth(z), depth(tower))`.
#[derive(Clone, Debug)]
pub struct StageResolver<'a> {
    chain: &'a QuotientChain,
    tower: &'a TransversalTower,
    point: OdometerPoint,
    depth: usize,
}

impl<'a> StageResolver<'a> {
    pub fn new(chain: &'a QuotientChain, tower: &'a TransversalTower, point: OdometerPoint) -> Self {
        let depth = point.depth().min(tower.depth());
        StageResolver { chain, tower, point, depth }
    }

    /// Resolver at the basepoint `ē`, which drives the Toeplitz marking.
    pub fn at_basepoint(chain: &'a QuotientChain, tower: &'a TransversalTower, depth: usize) -> Self {
        Self::new(chain, tower, OdometerPoint::basepoint(chain, depth.min(tower.depth())))
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn point(&self) -> &OdometerPoint {
        &self.point
    }

    pub fn chain(&self) -> &'a QuotientChain {
        self.chain
    }

    pub fn tower(&self) -> &'a TransversalTower {
        self.tower
    }

    pub fn resolve(&self, g: &GroupWord) -> CellResolution {
        for n in 1..=self.depth {
            let rc = self.chain.relative_right_cell(n, self.point.cell(n), g);
            if let Some(rep) = self.tower.capture_index(n, rc) {
                return CellResolution::Resolved { stage: n, rep };
            }
        }
        CellResolution::Unresolved { depth: self.depth }
    }

    /// The representative `d ∈ D_{n-1}` of a resolved verdict.
    pub fn rep_word(&self, r: &CellResolution) -> Option<&'a GroupWord> {
        match r {
            CellResolution::Resolved { stage, rep } => Some(&self.tower.level(stage - 1)[*rep]),
            CellResolution::Unresolved { .. } => None,
        }
    }

    /// The resolver for `g·z`.
    pub fn translated(&self, g: &GroupWord) -> StageResolver<'a> {
        StageResolver::new(self.chain, self.tower, act_unchecked(self.chain, g, &self.point))
    }
}

pub fn resolve_cells(
    chain: &QuotientChain,
    tower: &TransversalTower,
    z: &OdometerPoint,
    window: &[GroupWord],
) -> Vec<CellResolution> {
    let r = StageResolver::new(chain, tower, z.clone());
    window.iter().map(|g| r.resolve(g)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayoutViolation {
    pub cell: String,
    pub translated: CellResolution,
    pub original: CellResolution,
}

/// Compares the layout of `g·z` at `h` with the layout of `z` at `g^{-1}h`, for `h` in the window.
pub fn jpartition_equivariance_check(
    chain: &QuotientChain,
    tower: &TransversalTower,
    z: &OdometerPoint,
    g: &GroupWord,
    window: &[GroupWord],
) -> Vec<LayoutViolation> {
    let base = StageResolver::new(chain, tower, z.clone());
    let moved = base.translated(g);
    let gi = g.inverse();
    window
        .iter()
        .filter_map(|h| {
            let translated = moved.resolve(h);
            let original = base.resolve(&gi.mul(h).expect("window words match the chain"));
            (translated != original).then(|| LayoutViolation { cell: h.to_string(), translated, original })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dihedral_chain, dyadic_chain, s4_nonnormal_chain};

    fn ints(r: std::ops::RangeInclusive<i64>) -> Vec<GroupWord> {
        r.map(|i| GroupWord::Zd(vec![i])).collect()
    }

    /// Literal stage definition: least `n` with `g d^{-1} ∈ z_nΓ_n` for some `d ∈ D_{n-1}`.
    fn stage_by_definition(c: &QuotientChain, t: &TransversalTower, z: &OdometerPoint, g: &GroupWord) -> Option<usize> {
        (1..=z.depth()).find(|&n| {
            t.level(n - 1).iter().any(|d| c.left_cell(n, &g.mul(&d.inverse()).unwrap()) == z.cell(n))
        })
    }

    #[test]
    fn ruler_stages_at_the_basepoint() {
        let c = dyadic_chain(6);
        let t = TransversalTower::build(&c, 6).unwrap();
        let r = StageResolver::at_basepoint(&c, &t, 6);
        let res: Vec<CellResolution> = ints(0..=7).iter().map(|g| r.resolve(g)).collect();
        let stages: Vec<usize> = res.iter().map(|v| v.stage().unwrap()).collect();
        assert_eq!(stages, [1, 2, 1, 3, 1, 2, 1, 4]);
        let reps: Vec<String> = res.iter().map(|v| r.rep_word(v).unwrap().to_string()).collect();
        assert_eq!(reps, ["0", "1", "0", "3", "0", "1", "0", "7"]);
    }

    #[test]
    fn minus_one_is_never_captured() {
        let c = dyadic_chain(4);
        let t = TransversalTower::build(&c, 4).unwrap();
        let r = StageResolver::at_basepoint(&c, &t, 4);
        let unresolved: Vec<GroupWord> =
            ints(-8..=8).into_iter().filter(|g| r.resolve(g).stage().is_none()).collect();
        assert_eq!(unresolved, [GroupWord::Zd(vec![-1])]);
    }

    #[test]
    fn agrees_with_the_definition() {
        for c in [dyadic_chain(5), dihedral_chain(4), s4_nonnormal_chain()] {
            let t = TransversalTower::build(&c, c.depth()).unwrap();
            let window = c.word_kind().ball(5);
            for z in OdometerPoint::enumerate(&c, c.depth()).iter().take(40) {
                let r = StageResolver::new(&c, &t, z.clone());
                for g in &window {
                    let v = r.resolve(g);
                    assert_eq!(v.stage(), stage_by_definition(&c, &t, z, g));
                    if let Some(d) = r.rep_word(&v) {
                        let n = v.stage().unwrap();
                        assert_eq!(c.left_cell(n, &g.mul(&d.inverse()).unwrap()), z.cell(n));
                    }
                }
            }
        }
    }

    #[test]
    fn translation_moves_the_layout() {
        let c = dyadic_chain(5);
        let t = TransversalTower::build(&c, 5).unwrap();
        let e = OdometerPoint::basepoint(&c, 5);
        let w = ints(0..=7);
        assert!(jpartition_equivariance_check(&c, &t, &e, &c.identity(), &w).is_empty());
        assert!(jpartition_equivariance_check(&c, &t, &e, &GroupWord::Zd(vec![1]), &w).is_empty());
    }
}
