//! The staged maps `φ_i` into marker/free arrays over a pointed system
//! `(Y, y_0, π: Y → Z)`, window samples of the resulting extension, and the
//! finite checks that go with them.

mod coding;

pub use coding::{
    clopen_code, fiber_product, CodedWindow, CodingError, FiberPairs, FiberSample, SymbolicWindow, WindowPredicate,
};

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::cells::{CellResolution, StageResolver};
use crate::group::{GroupWord, QuotientChain};
use crate::odometer::{act_unchecked, OdometerPoint};
use crate::toeplitz::{FactorMap, Symbol, ToeplitzArray};
use crate::tower::TransversalTower;

/// A pointed `G`-system with a factor map onto the depth-`N` odometer.
pub trait PointedSystem: Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;
    type Pattern: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    fn chain(&self) -> &QuotientChain;
    fn tower(&self) -> &TransversalTower;
    /// Odometer depth used for `π` and for stage resolution.
    fn depth(&self) -> usize;
    fn base_point(&self) -> Self::Point;
    /// `g·y`.
    fn act(&self, g: &GroupWord, y: &Self::Point) -> Self::Point;
    /// `π(y)` truncated to [`PointedSystem::depth`], `None` if it cannot be determined.
    fn factor(&self, y: &Self::Point) -> Option<OdometerPoint>;
    /// Finite description of `y`; higher levels separate more points.
    fn pattern(&self, y: &Self::Point, level: usize) -> Self::Pattern;
    /// Level at which free values are stored.
    fn comparison_level(&self) -> usize;
    /// `π` read back from a pattern at the comparison level, when possible.
    fn pattern_base(&self, p: &Self::Pattern) -> Option<OdometerPoint>;
}

/// The odometer itself with `π = id`.
#[derive(Clone, Debug)]
pub struct OdometerSystem<'a> {
    chain: &'a QuotientChain,
    tower: &'a TransversalTower,
    depth: usize,
}

impl<'a> OdometerSystem<'a> {
    pub fn new(chain: &'a QuotientChain, tower: &'a TransversalTower, depth: usize) -> Self {
        OdometerSystem { chain, tower, depth: depth.min(tower.depth()) }
    }
}

impl PointedSystem for OdometerSystem<'_> {
    type Point = OdometerPoint;
    type Pattern = OdometerPoint;

    fn chain(&self) -> &QuotientChain {
        self.chain
    }
    fn tower(&self) -> &TransversalTower {
        self.tower
    }
    fn depth(&self) -> usize {
        self.depth
    }
    fn base_point(&self) -> OdometerPoint {
        OdometerPoint::basepoint(self.chain, self.depth)
    }
    fn act(&self, g: &GroupWord, y: &OdometerPoint) -> OdometerPoint {
        act_unchecked(self.chain, g, y)
    }
    fn factor(&self, y: &OdometerPoint) -> Option<OdometerPoint> {
        Some(y.truncate(self.depth))
    }
    fn pattern(&self, y: &OdometerPoint, level: usize) -> OdometerPoint {
        y.truncate(level)
    }
    fn comparison_level(&self) -> usize {
        self.depth
    }
    fn pattern_base(&self, p: &OdometerPoint) -> Option<OdometerPoint> {
        Some(p.clone())
    }
}

/// The orbit of a stage-marked Toeplitz array; a point is a translator `t`
/// standing for `t·x`, and `π` is read from period layouts.
#[derive(Clone, Debug)]
pub struct ToeplitzSystem<'a> {
    array: ToeplitzArray<'a>,
    factor_map: FactorMap,
    radius: usize,
}

impl<'a> ToeplitzSystem<'a> {
    /// `cells` is the window the factor map reads; patterns at level `k` are
    /// the symbols on the cells of length at most `k`.
    pub fn new(array: ToeplitzArray<'a>, cells: &[GroupWord]) -> Self {
        let factor_map = FactorMap::new(&array, cells);
        let radius = cells.iter().map(|c| c.length()).max().unwrap_or(0);
        ToeplitzSystem { array, factor_map, radius }
    }

    pub fn array(&self) -> &ToeplitzArray<'a> {
        &self.array
    }
}

impl PointedSystem for ToeplitzSystem<'_> {
    type Point = GroupWord;
    type Pattern = Vec<Symbol>;

    fn chain(&self) -> &QuotientChain {
        self.array.chain()
    }
    fn tower(&self) -> &TransversalTower {
        self.array.tower()
    }
    fn depth(&self) -> usize {
        self.array.depth()
    }
    fn base_point(&self) -> GroupWord {
        self.array.chain().identity()
    }
    fn act(&self, g: &GroupWord, t: &GroupWord) -> GroupWord {
        g.mul(t).expect("words match the chain")
    }
    fn factor(&self, t: &GroupWord) -> Option<OdometerPoint> {
        self.factor_map.factor(&self.array, t).ok()
    }
    fn pattern(&self, t: &GroupWord, level: usize) -> Vec<Symbol> {
        let cells: Vec<GroupWord> =
            self.factor_map.cells().iter().filter(|c| c.length() <= level).cloned().collect();
        self.array.window(t, &cells).values
    }
    fn comparison_level(&self) -> usize {
        self.radius
    }
    fn pattern_base(&self, p: &Vec<Symbol>) -> Option<OdometerPoint> {
        if p.len() != self.factor_map.cells().len() {
            return None;
        }
        let mut w = self.array.window(&self.array.chain().identity(), self.factor_map.cells());
        w.values = p.clone();
        self.factor_map.factor_window(self.array.chain(), &w).ok()
    }
}

/// Value of `φ_i(y)` at a cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PhiValue<P> {
    /// `d^{-1}y_0` for the stage representative `d`.
    Marker(GroupWord),
    /// The pattern of `g^{-1}y`.
    Free(P),
    /// Captured at a stage beyond the computation depth, or not at all.
    Pending,
}

/// `t_{n,y} ∈ D_n^{-1}` with `π(y) ∈ t_{n,y}C_n`.
pub fn fiber_coordinate<S: PointedSystem>(sys: &S, y: &S::Point, n: usize) -> Option<GroupWord> {
    let z = sys.factor(y)?;
    sys.tower().inverse_level(n).into_iter().find(|t| sys.chain().left_cell(n, t) == z.cell(n))
}

/// Checks `t_{n,gy}^{-1}·g·t_{n,y} ∈ Γ_n`.
pub fn fiber_coordinate_equation<S: PointedSystem>(sys: &S, y: &S::Point, g: &GroupWord, n: usize) -> bool {
    let gy = sys.act(g, y);
    match (fiber_coordinate(sys, y, n), fiber_coordinate(sys, &gy, n)) {
        (Some(t), Some(tg)) => {
            let gamma = tg.inverse().mul(g).and_then(|x| x.mul(&t)).expect("words match the chain");
            sys.chain().contains(n, &gamma)
        }
        _ => false,
    }
}

fn resolver_for<'s, S: PointedSystem>(sys: &'s S, y: &S::Point) -> Option<StageResolver<'s>> {
    sys.factor(y).map(|z| StageResolver::new(sys.chain(), sys.tower(), z))
}

/// `φ_i(y)` on the window: markers for cells captured by stage `i`, free
/// patterns elsewhere. `None` when `π(y)` cannot be determined.
pub fn phi_stage<S: PointedSystem>(
    sys: &S,
    y: &S::Point,
    i: usize,
    window: &[GroupWord],
) -> Option<Vec<PhiValue<S::Pattern>>> {
    let r = resolver_for(sys, y)?;
    Some(
        window
            .iter()
            .map(|g| {
                let v = r.resolve(g);
                if v.resolved_by(i) {
                    PhiValue::Marker(r.rep_word(&v).unwrap().clone())
                } else {
                    PhiValue::Free(sys.pattern(&sys.act(&g.inverse(), y), sys.comparison_level()))
                }
            })
            .collect(),
    )
}

/// `φ(y)` as far as depth `i` determines it: markers, and `Pending` elsewhere.
pub fn phi_approx<S: PointedSystem>(
    sys: &S,
    y: &S::Point,
    i: usize,
    window: &[GroupWord],
) -> Option<Vec<PhiValue<S::Pattern>>> {
    let r = resolver_for(sys, y)?;
    Some(
        window
            .iter()
            .map(|g| {
                let v = r.resolve(g);
                if v.resolved_by(i) {
                    PhiValue::Marker(r.rep_word(&v).unwrap().clone())
                } else {
                    PhiValue::Pending
                }
            })
            .collect(),
    )
}

/// Cells where `φ_i(hy)(g) ≠ φ_i(y)(h^{-1}g)`.
pub fn phi_equivariance_check<S: PointedSystem>(
    sys: &S,
    y: &S::Point,
    h: &GroupWord,
    i: usize,
    window: &[GroupWord],
) -> Vec<String> {
    let hy = sys.act(h, y);
    let hi = h.inverse();
    let shifted: Vec<GroupWord> = window.iter().map(|g| hi.mul(g).expect("words match the chain")).collect();
    match (phi_stage(sys, &hy, i, window), phi_stage(sys, y, i, &shifted)) {
        (Some(a), Some(b)) => window
            .iter()
            .zip(a.iter().zip(&b))
            .filter(|(_, (x, y))| x != y)
            .map(|(g, _)| g.to_string())
            .collect(),
        _ => vec![format!("factor of the translate by {h} is undetermined")],
    }
}

/// One window of `h^{-1}ψ(y_0)`: its base point and `φ(h^{-1}y_0)` at the system depth.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ExtensionSample<P> {
    pub base: OdometerPoint,
    pub stages: Vec<Option<usize>>,
    pub values: Vec<PhiValue<P>>,
}

/// Distinct windows of `h^{-1}ψ(y_0)` for `h` in `translators`, in first-seen order.
pub fn sample_extension_window<S: PointedSystem>(
    sys: &S,
    translators: &[GroupWord],
    window: &[GroupWord],
) -> Vec<ExtensionSample<S::Pattern>> {
    let y0 = sys.base_point();
    let mut out: Vec<ExtensionSample<S::Pattern>> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for h in translators {
        let y = sys.act(&h.inverse(), &y0);
        let Some(r) = resolver_for(sys, &y) else { continue };
        let verdicts: Vec<CellResolution> = window.iter().map(|g| r.resolve(g)).collect();
        let values = phi_stage(sys, &y, sys.depth(), window).expect("factor already determined");
        let s = ExtensionSample {
            base: r.point().clone(),
            stages: verdicts.iter().map(|v| v.stage()).collect(),
            values,
        };
        if seen.insert(s.clone()) {
            out.push(s);
        }
    }
    out
}

/// Samples whose bases agree to level `k` must agree on every cell captured
/// by stage `k`. Returns the offending `(level, cell)` pairs.
pub fn fiber_agreement_violations<P: Eq + Hash + Clone>(
    samples: &[ExtensionSample<P>],
    window: &[GroupWord],
) -> Vec<(usize, String)> {
    let depth = samples.iter().map(|s| s.base.depth()).min().unwrap_or(0);
    let mut out = Vec::new();
    for k in 1..=depth {
        let mut groups: HashMap<&[usize], Vec<&ExtensionSample<P>>> = HashMap::new();
        for s in samples {
            groups.entry(&s.base.cells[..k]).or_default().push(s);
        }
        let mut keys: Vec<&&[usize]> = groups.keys().collect();
        keys.sort();
        for key in keys {
            let group = &groups[*key];
            for (c, g) in window.iter().enumerate() {
                let captured: Vec<_> = group.iter().filter(|s| s.stages[c].is_some_and(|st| st <= k)).collect();
                if captured.is_empty() {
                    continue;
                }
                let first = captured[0];
                if captured.len() != group.len()
                    || captured.iter().any(|s| s.stages[c] != first.stages[c] || s.values[c] != first.values[c])
                {
                    out.push((k, g.to_string()));
                }
            }
        }
    }
    out
}

/// Cross-checks a sample against `π`: a marker `d` at a stage-`j` cell `g`
/// has `d^{-1}ē` agreeing with `g^{-1}z` up to level `j`, and a free pattern
/// at `g` factors to `g^{-1}z`. Returns offending cells and the number of
/// free cells whose pattern could not be factored.
pub fn sample_consistency<S: PointedSystem>(
    sys: &S,
    sample: &ExtensionSample<S::Pattern>,
    window: &[GroupWord],
) -> (Vec<String>, usize) {
    let chain = sys.chain();
    let z = &sample.base;
    let mut bad = Vec::new();
    let mut unreadable = 0;
    for (c, g) in window.iter().enumerate() {
        let gz = act_unchecked(chain, &g.inverse(), z);
        match &sample.values[c] {
            PhiValue::Marker(d) => {
                let j = sample.stages[c].unwrap_or(0);
                let di = d.inverse();
                if (1..=j).any(|n| chain.left_cell(n, &di) != gz.cell(n)) {
                    bad.push(g.to_string());
                }
            }
            PhiValue::Free(p) => match sys.pattern_base(p) {
                Some(b) => {
                    if b != gz.truncate(b.depth()) {
                        bad.push(g.to_string());
                    }
                }
                None => unreadable += 1,
            },
            PhiValue::Pending => {}
        }
    }
    (bad, unreadable)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    Found(GroupWord),
    /// Nothing within the radius; not a refutation.
    NotFound { radius: usize },
}

/// Looks for `h` with `|h| ≤ radius` such that `h^{-1}y_0` agrees with the
/// target at level `k` and `h ∈ Γ_k t_{k,y}^{-1}`.
pub fn bounded_minimality_search<S: PointedSystem>(sys: &S, target: &S::Point, k: usize, radius: usize) -> SearchOutcome {
    let y0 = sys.base_point();
    let want = sys.pattern(target, k);
    let Some(zt) = sys.factor(target) else {
        return SearchOutcome::NotFound { radius };
    };
    for h in sys.chain().word_kind().ball(radius) {
        // h ∈ Γ_k t^{-1} exactly when h^{-1}ē lies in the level-k cell of π(y)
        if k > 0 && sys.chain().left_cell(k, &h.inverse()) != zt.cell(k) {
            continue;
        }
        if sys.pattern(&sys.act(&h.inverse(), &y0), k) == want {
            return SearchOutcome::Found(h);
        }
    }
    SearchOutcome::NotFound { radius }
}
