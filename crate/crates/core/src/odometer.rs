//! Truncated odometer points, the translation action and clopen cells.

use serde::{Deserialize, Serialize};

use crate::group::{GroupError, GroupWord, QuotientChain};
use crate::rational::{from_usize, Rational};

/// A point of the depth-`N` odometer: one left cell id per level `1..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OdometerPoint {
    pub cells: Vec<usize>,
}

impl OdometerPoint {
    /// The basepoint `ē = (Γ_n)_n`.
    pub fn basepoint(chain: &QuotientChain, depth: usize) -> Self {
        let cells = (1..=depth).map(|n| chain.left_cell(n, &chain.identity())).collect();
        OdometerPoint { cells }
    }

    /// The point `g·ē`.
    pub fn of_word(chain: &QuotientChain, depth: usize, g: &GroupWord) -> Self {
        OdometerPoint { cells: (1..=depth).map(|n| chain.left_cell(n, g)).collect() }
    }

    /// The unique point whose top coordinate is the cell `c` at level `depth`.
    pub fn from_top_cell(chain: &QuotientChain, depth: usize, c: usize) -> Self {
        let mut cells = vec![0; depth];
        let mut cur = c;
        for n in (1..=depth).rev() {
            cells[n - 1] = cur;
            cur = chain.project_cell(n, cur);
        }
        OdometerPoint { cells }
    }

    /// All points of the depth-`depth` odometer, ordered by top cell id.
    pub fn enumerate(chain: &QuotientChain, depth: usize) -> Vec<Self> {
        (0..chain.index(depth)).map(|c| Self::from_top_cell(chain, depth, c)).collect()
    }

    pub fn depth(&self) -> usize {
        self.cells.len()
    }

    /// Coordinate at level `n`; level 0 is the single trivial cell.
    pub fn cell(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            self.cells[n - 1]
        }
    }

    pub fn truncate(&self, depth: usize) -> Self {
        OdometerPoint { cells: self.cells[..depth.min(self.cells.len())].to_vec() }
    }

    /// Inverse-limit compatibility of consecutive coordinates.
    pub fn is_compatible(&self, chain: &QuotientChain) -> bool {
        self.cells.iter().enumerate().all(|(i, &c)| c < chain.index(i + 1))
            && (2..=self.depth()).all(|n| chain.project_cell(n, self.cells[n - 1]) == self.cells[n - 2])
    }

    /// Parses comma separated cell ids, lowest level first.
    pub fn parse(chain: &QuotientChain, s: &str) -> Result<Self, GroupError> {
        let cells = s
            .split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| GroupError::Parse(s.to_string()))?;
        if cells.len() > chain.depth() {
            return Err(GroupError::LevelOutOfRange { level: cells.len(), depth: chain.depth() });
        }
        let p = OdometerPoint { cells };
        if !p.is_compatible(chain) {
            return Err(GroupError::InvalidChain(format!("point {s} is not compatible with the projections")));
        }
        Ok(p)
    }
}

/// `g·z`, levelwise.
pub fn act(chain: &QuotientChain, g: &GroupWord, z: &OdometerPoint) -> Result<OdometerPoint, GroupError> {
    chain.word_kind().check(g)?;
    Ok(act_unchecked(chain, g, z))
}

pub(crate) fn act_unchecked(chain: &QuotientChain, g: &GroupWord, z: &OdometerPoint) -> OdometerPoint {
    let cells = z.cells.iter().enumerate().map(|(i, &c)| chain.act_cell(i + 1, g, c)).collect();
    OdometerPoint { cells }
}

/// The clopen set `gC_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenCell {
    pub level: usize,
    pub translator: GroupWord,
}

impl ClopenCell {
    pub fn new(level: usize, translator: GroupWord) -> Self {
        ClopenCell { level, translator }
    }

    /// Whether `gC_n = hC_n` as sets.
    pub fn same_set(&self, other: &ClopenCell, chain: &QuotientChain) -> bool {
        self.level == other.level
            && chain.left_cell(self.level, &self.translator) == chain.left_cell(other.level, &other.translator)
    }
}

/// The invariant measure of `gC_n`, `1/[G:Γ_n]`.
pub fn cell_measure(chain: &QuotientChain, cell: &ClopenCell) -> Rational {
    from_usize(1) / from_usize(chain.index(cell.level))
}

pub fn in_cell(chain: &QuotientChain, z: &OdometerPoint, cell: &ClopenCell) -> bool {
    cell.level <= z.depth() && z.cell(cell.level) == chain.left_cell(cell.level, &cell.translator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dihedral_chain, dyadic_chain, s4_nonnormal_chain, zd_power_chain};
    use crate::rational::ratio;

    #[test]
    fn translating_the_basepoint() {
        let c = dyadic_chain(3);
        let e = OdometerPoint::basepoint(&c, 3);
        assert_eq!(act(&c, &c.identity(), &e).unwrap(), e);
        assert_eq!(act(&c, &GroupWord::Zd(vec![1]), &e).unwrap().cells, [1, 1, 1]);
        assert_eq!(act(&c, &GroupWord::Zd(vec![13]), &e).unwrap().cells, [1, 1, 5]);
    }

    #[test]
    fn measures_of_cells() {
        let c = dyadic_chain(3);
        assert_eq!(cell_measure(&c, &ClopenCell::new(3, GroupWord::Zd(vec![5]))), ratio(1, 8));
        let z2 = zd_power_chain(2, 3);
        assert_eq!(cell_measure(&z2, &ClopenCell::new(2, GroupWord::Zd(vec![1, -4]))), ratio(1, 16));
    }

    #[test]
    fn membership() {
        let c = dyadic_chain(3);
        let p5 = OdometerPoint::of_word(&c, 3, &GroupWord::Zd(vec![5]));
        assert!(in_cell(&c, &p5, &ClopenCell::new(2, GroupWord::Zd(vec![1]))));
        let e = OdometerPoint::basepoint(&c, 3);
        assert!((1..=3).all(|n| in_cell(&c, &e, &ClopenCell::new(n, c.identity()))));
    }

    #[test]
    fn level_cells_partition_the_points() {
        for c in [dyadic_chain(3), dihedral_chain(3), s4_nonnormal_chain()] {
            let pts = OdometerPoint::enumerate(&c, 3);
            assert_eq!(pts.len(), c.index(3));
            let cells: Vec<ClopenCell> = c
                .word_kind()
                .ball(8)
                .into_iter()
                .map(|g| ClopenCell::new(3, g))
                .fold(Vec::new(), |mut acc: Vec<ClopenCell>, cell| {
                    if !acc.iter().any(|o| o.same_set(&cell, &c)) {
                        acc.push(cell);
                    }
                    acc
                });
            assert_eq!(cells.len(), c.index(3));
            for p in &pts {
                assert!(p.is_compatible(&c));
                assert_eq!(cells.iter().filter(|cell| in_cell(&c, p, cell)).count(), 1);
            }
        }
    }

    #[test]
    fn parse_points() {
        let c = dyadic_chain(3);
        assert_eq!(OdometerPoint::parse(&c, "1,1,5").unwrap().cells, [1, 1, 5]);
        assert!(OdometerPoint::parse(&c, "1,2,5").is_err());
        assert!(OdometerPoint::parse(&c, "1,1,5,1").is_err());
    }
}
