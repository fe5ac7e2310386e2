//! Exact rational measures on the odometer cylinder algebras and the bounds
//! built from them. Nothing here touches floating point.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cells::StageResolver;
use crate::group::{GroupWord, QuotientChain};
use crate::odometer::OdometerPoint;
use crate::rational::{from_usize, pow2_inv, to_pq, Rational};
use crate::tower::{ThinningPlan, TransversalTower};

/// Largest odometer enumerated by the empirical counters.
pub const ENUMERATION_LIMIT: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MeasureError {
    #[error("expected {expected} weights, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("negative weight")]
    Negative,
    #[error("weights sum to {0}, not 1")]
    NotNormalized(String),
    #[error("level {requested} requested, measure is defined to level {available}")]
    LevelOverflow { requested: usize, available: usize },
    #[error("measures are defined over different partitions")]
    PartitionMismatch,
    #[error("odometer of size {size} exceeds the enumeration limit {limit}")]
    EnumerationTooLarge { size: usize, limit: usize },
    #[error("plan has {have} stages, {need} required")]
    PlanTooShallow { need: usize, have: usize },
}

/// Weights on the level-`n` cells, indexed by left cell id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CylinderMeasure {
    level: usize,
    weights: Vec<Rational>,
}

impl CylinderMeasure {
    pub fn new(chain: &QuotientChain, level: usize, weights: Vec<Rational>) -> Result<Self, MeasureError> {
        if level > chain.depth() {
            return Err(MeasureError::LevelOverflow { requested: level, available: chain.depth() });
        }
        if weights.len() != chain.index(level) {
            return Err(MeasureError::WrongLength { expected: chain.index(level), found: weights.len() });
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(MeasureError::Negative);
        }
        let total: Rational = weights.iter().fold(Rational::zero(), |a, b| a + b);
        if total != from_usize(1) {
            return Err(MeasureError::NotNormalized(to_pq(&total)));
        }
        Ok(CylinderMeasure { level, weights })
    }

    /// The invariant measure: every level-`n` cell has weight `1/[G:Γ_n]`.
    pub fn uniform(chain: &QuotientChain, level: usize) -> Self {
        let k = chain.index(level);
        CylinderMeasure { level, weights: vec![from_usize(1) / from_usize(k); k] }
    }

    /// Point mass at `z`, seen at level `depth(z)`.
    pub fn point_mass(chain: &QuotientChain, z: &OdometerPoint) -> Self {
        let level = z.depth();
        let mut weights = vec![Rational::zero(); chain.index(level)];
        weights[z.cell(level)] = from_usize(1);
        CylinderMeasure { level, weights }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    /// The pushforward to level `m ≤ level`.
    pub fn marginal(&self, chain: &QuotientChain, m: usize) -> Result<CylinderMeasure, MeasureError> {
        if m > self.level {
            return Err(MeasureError::LevelOverflow { requested: m, available: self.level });
        }
        let mut cur = self.clone();
        while cur.level > m {
            let n = cur.level;
            let mut w = vec![Rational::zero(); chain.index(n - 1)];
            for (c, x) in cur.weights.iter().enumerate() {
                w[chain.project_cell(n, c)] += x;
            }
            cur = CylinderMeasure { level: n - 1, weights: w };
        }
        Ok(cur)
    }

    /// Splits every cell uniformly among its children at the next level.
    pub fn refine(&self, chain: &QuotientChain) -> Result<CylinderMeasure, MeasureError> {
        let n = self.level + 1;
        if n > chain.depth() {
            return Err(MeasureError::LevelOverflow { requested: n, available: chain.depth() });
        }
        let split = from_usize(chain.index(n) / chain.index(self.level));
        let weights = (0..chain.index(n)).map(|c| &self.weights[chain.project_cell(n, c)] / &split).collect();
        Ok(CylinderMeasure { level: n, weights })
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    pub fn weights_pq(&self) -> Vec<String> {
        self.weights.iter().map(to_pq).collect()
    }
}

/// Partial sum of the metric through level `N` and the certified tail `2^{1-N}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricTruncation {
    pub level: usize,
    pub partial: Rational,
    pub tail: Rational,
}

impl MetricTruncation {
    /// Whether `value ∈ [partial, partial + tail]`.
    pub fn contains(&self, value: &Rational) -> bool {
        *value >= self.partial && *value <= &self.partial + &self.tail
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "level": self.level,
            "partial": to_pq(&self.partial),
            "tail": to_pq(&self.tail),
        })
    }
}

/// `Σ_{n≤N} Σ_{K∈P_n} |μ_1(K) − μ_2(K)| / (2ⁿ s_n)` with `s_n = |P_n|`.
pub fn metric_d(
    chain: &QuotientChain,
    mu1: &CylinderMeasure,
    mu2: &CylinderMeasure,
    level: usize,
) -> Result<MetricTruncation, MeasureError> {
    if mu1.level < level || mu2.level < level {
        return Err(MeasureError::LevelOverflow { requested: level, available: mu1.level.min(mu2.level) });
    }
    let mut a = mu1.marginal(chain, level)?;
    let mut b = mu2.marginal(chain, level)?;
    let mut partial = Rational::zero();
    for n in (1..=level).rev() {
        let diff = a.weights.iter().zip(&b.weights).fold(Rational::zero(), |acc, (x, y)| acc + (x - y).abs());
        partial += diff * pow2_inv(n) / from_usize(chain.index(n));
        if n > 1 {
            a = a.marginal(chain, n - 1)?;
            b = b.marginal(chain, n - 1)?;
        }
    }
    Ok(MetricTruncation { level, partial, tail: pow2_inv(level) * from_usize(2) })
}

/// `(1/|D_n|) Σ_{g∈D_n} gλ`, with `(gλ)(K) = λ(g^{-1}K)`.
pub fn average_measure(
    chain: &QuotientChain,
    tower: &TransversalTower,
    lambda: &CylinderMeasure,
    n: usize,
) -> Result<CylinderMeasure, MeasureError> {
    if n > lambda.level || n > tower.depth() {
        return Err(MeasureError::LevelOverflow { requested: n, available: lambda.level.min(tower.depth()) });
    }
    let level = lambda.level;
    let inverses: Vec<GroupWord> = tower.inverse_level(n);
    let count = from_usize(inverses.len());
    let weights = (0..chain.index(level))
        .map(|c| {
            let s = inverses
                .iter()
                .fold(Rational::zero(), |acc, di| acc + &lambda.weights[chain.act_cell(level, di, c)]);
            s / &count
        })
        .collect();
    Ok(CylinderMeasure { level, weights })
}

/// Levels `m ≤ n` whose marginal is not uniform.
pub fn nonuniform_marginals(chain: &QuotientChain, mu: &CylinderMeasure, n: usize) -> Vec<usize> {
    (1..=n.min(mu.level)).filter(|&m| !mu.marginal(chain, m).map(|x| x.is_uniform()).unwrap_or(false)).collect()
}

/// The bound on the set where `φ` and `φ_k` differ on `D'_n`, in plan indices:
/// `Σ_{k<m≤M} |D'_n| r_m`, the tail `|D'_n| 2^{-(max(k,M)+1)}`, and the
/// ceiling `|D'_n| 2^{-k}` the total must stay under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VknBound {
    pub partial: Rational,
    pub tail: Rational,
    pub ceiling: Rational,
}

impl VknBound {
    pub fn total(&self) -> Rational {
        &self.partial + &self.tail
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "partial": to_pq(&self.partial),
            "tail": to_pq(&self.tail),
            "total": to_pq(&self.total()),
            "ceiling": to_pq(&self.ceiling),
        })
    }
}

pub fn vkn_bound(
    tower: &TransversalTower,
    plan: &ThinningPlan,
    n: usize,
    k: usize,
    horizon: usize,
) -> Result<VknBound, MeasureError> {
    let need = n.max(horizon);
    if need > plan.len() {
        return Err(MeasureError::PlanTooShallow { need, have: plan.len() });
    }
    let dn = from_usize(tower.size(plan.level(n)));
    let partial = (k + 1..=horizon).fold(Rational::zero(), |acc, m| acc + &dn * plan.ratio(m));
    Ok(VknBound {
        partial,
        tail: &dn * pow2_inv(k.max(horizon) + 1),
        ceiling: &dn * pow2_inv(k),
    })
}

fn enumerate_guarded(chain: &QuotientChain, depth: usize) -> Result<Vec<OdometerPoint>, MeasureError> {
    let size = chain.index(depth);
    if size > ENUMERATION_LIMIT {
        return Err(MeasureError::EnumerationTooLarge { size, limit: ENUMERATION_LIMIT });
    }
    Ok(OdometerPoint::enumerate(chain, depth))
}

fn fraction_where(
    chain: &QuotientChain,
    tower: &TransversalTower,
    depth: usize,
    window: &[GroupWord],
    hit: impl Fn(Option<usize>) -> bool,
) -> Result<Rational, MeasureError> {
    let points = enumerate_guarded(chain, depth)?;
    let total = points.len();
    let count = points
        .into_iter()
        .filter(|z| {
            let r = StageResolver::new(chain, tower, z.clone());
            window.iter().any(|g| hit(r.resolve(g).stage()))
        })
        .count();
    Ok(from_usize(count) / from_usize(total))
}

/// Fraction of depth-`M` points `z` for which some `g` in the window is
/// captured at a stage in `(k, M]`.
pub fn empirical_unresolved_fraction(
    chain: &QuotientChain,
    tower: &TransversalTower,
    window: &[GroupWord],
    k: usize,
    depth: usize,
) -> Result<Rational, MeasureError> {
    fraction_where(chain, tower, depth, window, |s| s.is_some_and(|s| s > k))
}

/// Fraction of depth-`M` points `z` for which some `g` in the window is not
/// captured by stage `k`, counting points never captured up to `M`.
pub fn unresolved_by_stage_fraction(
    chain: &QuotientChain,
    tower: &TransversalTower,
    window: &[GroupWord],
    k: usize,
    depth: usize,
) -> Result<Rational, MeasureError> {
    fraction_where(chain, tower, depth, window, |s| s.is_none_or(|s| s > k))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundsRow {
    pub n: usize,
    pub k: usize,
    pub horizon: usize,
    pub empirical: String,
    pub total: String,
    pub ceiling: String,
    pub holds: bool,
}

/// Checks `empirical ≤ bound total ≤ ceiling` on the thinned chain for one configuration.
pub fn bounds_chain_row(
    thinned: &QuotientChain,
    thinned_tower: &TransversalTower,
    tower: &TransversalTower,
    plan: &ThinningPlan,
    n: usize,
    k: usize,
    horizon: usize,
) -> Result<BoundsRow, MeasureError> {
    let bound = vkn_bound(tower, plan, n, k, horizon)?;
    let empirical = empirical_unresolved_fraction(thinned, thinned_tower, thinned_tower.level(n), k, horizon)?;
    let total = bound.total();
    Ok(BoundsRow {
        n,
        k,
        horizon,
        holds: empirical <= total && total <= bound.ceiling,
        empirical: to_pq(&empirical),
        total: to_pq(&total),
        ceiling: to_pq(&bound.ceiling),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dihedral_chain, dyadic_chain, s4_nonnormal_chain};
    use crate::rational::ratio;
    use crate::tower::greedy_plan;

    #[test]
    fn uniform_and_point_masses() {
        let c = dyadic_chain(5);
        let nu = CylinderMeasure::uniform(&c, 3);
        assert_eq!(nu.weights()[5], ratio(1, 8));
        assert_eq!(nu.marginal(&c, 1).unwrap().weights(), [ratio(1, 2), ratio(1, 2)]);
        assert_eq!(nu.refine(&c).unwrap(), CylinderMeasure::uniform(&c, 4));
        let e = CylinderMeasure::point_mass(&c, &OdometerPoint::basepoint(&c, 3));
        assert_eq!(e.marginal(&c, 2).unwrap().weights()[0], ratio(1, 1));
        assert!(CylinderMeasure::new(&c, 1, vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(CylinderMeasure::new(&c, 1, vec![ratio(3, 2), ratio(-1, 2)]).is_err());
    }

    #[test]
    fn metric_between_uniform_and_point_mass() {
        let c = dyadic_chain(10);
        let nu = CylinderMeasure::uniform(&c, 10);
        let e = CylinderMeasure::point_mass(&c, &OdometerPoint::basepoint(&c, 10));
        let limit = ratio(8, 21);
        for n in [1, 4, 6, 10] {
            let d = metric_d(&c, &nu, &e, n).unwrap();
            // closed form of the partial sums: Σ 2(4^{-m} - 8^{-m})
            let closed = (1..=n).fold(Rational::zero(), |a, m| {
                a + from_usize(2) * (pow2_inv(2 * m) - pow2_inv(3 * m))
            });
            assert_eq!(d.partial, closed);
            assert!(d.contains(&limit));
            assert_eq!(metric_d(&c, &e, &nu, n).unwrap(), d);
        }
        let same = metric_d(&c, &nu, &nu, 6).unwrap();
        assert_eq!((same.partial, same.tail), (Rational::zero(), ratio(1, 32)));
    }

    #[test]
    fn averaging_a_point_mass() {
        let c = dyadic_chain(5);
        let t = TransversalTower::build(&c, 5).unwrap();
        let e = CylinderMeasure::point_mass(&c, &OdometerPoint::basepoint(&c, 4));
        let avg = average_measure(&c, &t, &e, 2).unwrap();
        assert!(avg.marginal(&c, 2).unwrap().is_uniform());
        assert!(nonuniform_marginals(&c, &average_measure(&c, &t, &e, 3).unwrap(), 3).is_empty());
        let nu = CylinderMeasure::uniform(&c, 4);
        assert_eq!(average_measure(&c, &t, &nu, 3).unwrap(), nu);
        assert!(average_measure(&c, &t, &e, 5).is_err());
    }

    #[test]
    fn averaging_over_normal_table_chains() {
        let c = dihedral_chain(4);
        let t = TransversalTower::build(&c, 4).unwrap();
        let z = OdometerPoint::from_top_cell(&c, 4, 7);
        let avg = average_measure(&c, &t, &CylinderMeasure::point_mass(&c, &z), 3).unwrap();
        assert!(nonuniform_marginals(&c, &avg, 3).is_empty());
    }

    #[test]
    fn averaging_fails_without_normality() {
        // With Γ_1 the stabilizer of a point in S_4, translates of a point mass
        // by D_1 need not spread evenly over the level-1 cells once a deeper
        // level is averaged.
        let c = s4_nonnormal_chain();
        let t = TransversalTower::build(&c, 3).unwrap();
        let any_nonuniform = OdometerPoint::enumerate(&c, 3).iter().any(|z| {
            let avg = average_measure(&c, &t, &CylinderMeasure::point_mass(&c, z), 2).unwrap();
            !nonuniform_marginals(&c, &avg, 2).is_empty()
        });
        assert!(any_nonuniform);
    }

    #[test]
    fn vkn_on_the_dyadic_plan() {
        let c = dyadic_chain(12);
        let t = TransversalTower::build(&c, 12).unwrap();
        let p = greedy_plan(&t);
        let b = vkn_bound(&t, &p, 1, 2, 3).unwrap();
        assert_eq!(b.partial, ratio(1, 4));
        assert_eq!(b.tail, ratio(8, 16));
        assert!(b.total() <= b.ceiling);
        let empty = vkn_bound(&t, &p, 1, 3, 3).unwrap();
        assert_eq!(empty.partial, Rational::zero());
        assert!(vkn_bound(&t, &p, 1, 2, 4).is_err());
    }

    #[test]
    fn minus_one_left_open_by_stage_three() {
        let c = dyadic_chain(5);
        let t = TransversalTower::build(&c, 5).unwrap();
        let w = [GroupWord::Zd(vec![-1])];
        assert_eq!(unresolved_by_stage_fraction(&c, &t, &w, 3, 5).unwrap(), ratio(4, 32));
        assert_eq!(empirical_unresolved_fraction(&c, &t, &w, 3, 5).unwrap(), ratio(3, 32));
        let mut prev = from_usize(1);
        for k in 0..=5 {
            let f = unresolved_by_stage_fraction(&c, &t, &w, k, 5).unwrap();
            assert!(f <= prev);
            prev = f;
        }
        assert_eq!(empirical_unresolved_fraction(&c, &t, &[c.identity()], 5, 5).unwrap(), Rational::zero());
    }
}
