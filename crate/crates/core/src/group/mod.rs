//! Group elements and finite-quotient subgroup chains.

mod chain;
mod presets;
mod quotient;
mod word;

use thiserror::Error;

pub use chain::{
    BackendTag, ChainSpec, FiniteQuotientElement, QuotientChain, QuotientSpec, Side, TableSpec, ZdSpec,
};
pub use presets::{dihedral_chain, dyadic_chain, preset, s4_chain, s4_nonnormal_chain, zd_power_chain, PRESETS};
pub use quotient::QElem;
pub use word::{GroupWord, WordKind};
pub(crate) use word::free_letters;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("words come from different backends")]
    BackendMismatch,
    #[error("expected a vector of length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown generator letter {0}")]
    UnknownGenerator(i32),
    #[error("word is not freely reduced")]
    NotReduced,
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("generator images do not generate the quotient at level {level}")]
    NotSurjective { level: usize },
    #[error("level {level} is outside 1..={depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("left-side transversals are only supported for abelian backends")]
    UnsupportedSide,
    #[error("conjugating sequence is not compatible at level {level}")]
    IncompatibleSequence { level: usize },
    #[error("chain file: {0}")]
    Json(String),
}

/// Bounded certificate that the odometer action at `z` is free.
///
/// Lists the non-identity words of length at most `radius` that fix every
/// level of `z`, i.e. lie in `z_n Γ_n z_n^{-1}` for all `n ≤ depth`. An empty
/// list certifies freeness only up to this radius and depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeOrbitCertificate {
    pub radius: usize,
    pub depth: usize,
    pub stabilizers: Vec<GroupWord>,
}

impl FreeOrbitCertificate {
    pub fn is_free(&self) -> bool {
        self.stabilizers.is_empty()
    }
}

/// Scans the ball of radius `radius` for words stabilizing the point whose level-`n` coordinate
/// is the left cell `cells[n-1]`.
pub fn free_orbit_certificate(chain: &QuotientChain, cells: &[usize], radius: usize) -> FreeOrbitCertificate {
    let stabilizers = chain
        .word_kind()
        .ball(radius)
        .into_iter()
        .filter(|g| !g.is_identity())
        .filter(|g| cells.iter().enumerate().all(|(i, &c)| chain.act_cell(i + 1, g, c) == c))
        .collect();
    FreeOrbitCertificate { radius, depth: cells.len(), stabilizers }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_cosets() {
        let c = dyadic_chain(4);
        assert_eq!(c.coset(3, &GroupWord::Zd(vec![13])).unwrap().cell, 5);
        assert_eq!(c.coset(3, &GroupWord::Zd(vec![-1])).unwrap().cell, 7);
        assert_eq!(c.coset(2, &c.identity()).unwrap().cell, 0);
        assert!(matches!(c.coset(5, &c.identity()), Err(GroupError::LevelOutOfRange { .. })));
    }

    #[test]
    fn z2_cosets_are_componentwise() {
        let c = zd_power_chain(2, 3);
        let cell = c.coset(2, &GroupWord::Zd(vec![5, -1])).unwrap().cell;
        assert_eq!(c.cell_label(2, cell), "1,3");
    }

    #[test]
    fn index_sizes() {
        let d = dihedral_chain(4);
        assert_eq!((1..=4).map(|n| d.index(n)).collect::<Vec<_>>(), [4, 8, 16, 32]);
        let s = s4_chain();
        assert_eq!((1..=3).map(|n| s.index(n)).collect::<Vec<_>>(), [2, 6, 24]);
        let t = s4_nonnormal_chain();
        assert_eq!((1..=3).map(|n| t.index(n)).collect::<Vec<_>>(), [4, 12, 24]);
        assert!(s.is_normal() && d.is_normal() && !t.is_normal());
    }

    #[test]
    fn projections_are_compatible() {
        for c in [dihedral_chain(4), s4_chain(), s4_nonnormal_chain()] {
            for g in c.word_kind().ball(4) {
                for n in 2..=c.depth() {
                    assert_eq!(c.project_cell(n, c.left_cell(n, &g)), c.left_cell(n - 1, &g));
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        for c in [dyadic_chain(5), dihedral_chain(3), s4_nonnormal_chain()] {
            let back = QuotientChain::from_json(&c.to_json()).unwrap();
            assert_eq!(back.to_json(), c.to_json());
        }
    }

    #[test]
    fn rejects_bad_tables() {
        let mut spec = s4_chain().to_spec();
        spec.table.as_mut().unwrap().quotients[1].mul[0][0] = 1;
        assert!(QuotientChain::from_spec(&spec).is_err());

        let mut spec = s4_chain().to_spec();
        spec.table.as_mut().unwrap().projections[0][0] = 1;
        assert!(QuotientChain::from_spec(&spec).is_err());

        // both generators sent to the identity
        let mut spec = s4_chain().to_spec();
        spec.table.as_mut().unwrap().quotients[0].gen_images = vec![0, 0];
        assert!(matches!(QuotientChain::from_spec(&spec), Err(GroupError::NotSurjective { level: 1 })));

        let mut spec = dyadic_chain(3).to_spec();
        spec.zd.as_mut().unwrap().moduli[1] = vec![3];
        assert!(QuotientChain::from_spec(&spec).is_err());

        let mut spec = s4_chain().to_spec();
        spec.side = Side::Left;
        assert_eq!(QuotientChain::from_spec(&spec).unwrap_err(), GroupError::UnsupportedSide);
    }

    #[test]
    fn conjugation_is_trivial_on_abelian_chains() {
        let c = zd_power_chain(2, 3);
        let z: Vec<GroupWord> = (0..3).map(|_| GroupWord::Zd(vec![3, -5])).collect();
        assert_eq!(c.conjugate(&z).unwrap().to_json(), c.to_json());
    }

    #[test]
    fn conjugation_rejects_incompatible_sequences() {
        let c = s4_nonnormal_chain();
        let k = c.word_kind();
        let z = vec![k.parse("e").unwrap(), k.parse("a").unwrap(), k.parse("a").unwrap()];
        assert!(matches!(c.conjugate(&z), Err(GroupError::IncompatibleSequence { level: 1 })));
    }

    #[test]
    fn free_orbit_certificates() {
        let c = dyadic_chain(4);
        // ℤ acts freely only up to the modulus 16
        let cert = free_orbit_certificate(&c, &[0, 0, 0, 0], 15);
        assert!(cert.is_free());
        let cert = free_orbit_certificate(&c, &[0, 0, 0, 0], 16);
        assert_eq!(cert.stabilizers.len(), 2);
    }
}
