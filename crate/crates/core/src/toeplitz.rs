//! Toeplitz arrays marked by capture stage, their period sets on finite
//! windows, and the factor map onto the odometer read off from period layouts.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::cells::{CellResolution, StageResolver};
use crate::group::{GroupWord, QuotientChain};
use crate::odometer::OdometerPoint;
use crate::rational::{from_usize, Rational};
use crate::tower::TransversalTower;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Symbol {
    Letter(char),
    Hole,
}

impl Symbol {
    pub fn to_char(self) -> char {
        match self {
            Symbol::Letter(c) => c,
            Symbol::Hole => '.',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ToeplitzError {
    #[error("a marking needs at least two distinct symbols")]
    AlphabetTooSmall,
    #[error("marking covers stages 1..={have}, depth {need} requested")]
    MarkingTooShort { need: usize, have: usize },
    #[error("depth {depth} exceeds the tower depth {tower}")]
    DepthTooLarge { depth: usize, tower: usize },
    #[error("window too small to identify the level-{level} coset")]
    Inconclusive { level: usize },
}

/// Symbol assigned to each capture stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marking {
    symbols: Vec<char>,
    cyclic: bool,
}

impl Marking {
    /// Stage `k` gets `alphabet[(k-1) mod |alphabet|]`.
    pub fn cyclic(alphabet: &str) -> Result<Self, ToeplitzError> {
        let symbols: Vec<char> = alphabet.chars().collect();
        let m = Marking { symbols, cyclic: true };
        m.check_alphabet()?;
        Ok(m)
    }

    /// Stage `k` gets `symbols[k-1]`; stages beyond the list are not marked.
    pub fn explicit(symbols: &str) -> Result<Self, ToeplitzError> {
        let m = Marking { symbols: symbols.chars().collect(), cyclic: false };
        m.check_alphabet()?;
        Ok(m)
    }

    fn check_alphabet(&self) -> Result<(), ToeplitzError> {
        if self.alphabet().len() < 2 {
            Err(ToeplitzError::AlphabetTooSmall)
        } else {
            Ok(())
        }
    }

    pub fn alphabet(&self) -> Vec<char> {
        let mut a = self.symbols.clone();
        a.sort_unstable();
        a.dedup();
        a
    }

    pub fn symbol(&self, stage: usize) -> Option<char> {
        if self.cyclic {
            Some(self.symbols[(stage - 1) % self.symbols.len()])
        } else {
            self.symbols.get(stage - 1).copied()
        }
    }

    fn covers(&self, depth: usize) -> Result<(), ToeplitzError> {
        if self.cyclic || self.symbols.len() >= depth {
            Ok(())
        } else {
            Err(ToeplitzError::MarkingTooShort { need: depth, have: self.symbols.len() })
        }
    }
}

/// The array `x(g) = marking(min(g))`, with holes where no stage up to
/// `depth` captures `g` at the basepoint.
#[derive(Clone, Debug)]
pub struct ToeplitzArray<'a> {
    resolver: StageResolver<'a>,
    marking: Marking,
}

impl<'a> ToeplitzArray<'a> {
    pub fn new(
        chain: &'a QuotientChain,
        tower: &'a TransversalTower,
        marking: Marking,
        depth: usize,
    ) -> Result<Self, ToeplitzError> {
        if depth > tower.depth() {
            return Err(ToeplitzError::DepthTooLarge { depth, tower: tower.depth() });
        }
        marking.covers(depth)?;
        Ok(ToeplitzArray { resolver: StageResolver::at_basepoint(chain, tower, depth), marking })
    }

    pub fn chain(&self) -> &'a QuotientChain {
        self.resolver.chain()
    }

    pub fn tower(&self) -> &'a TransversalTower {
        self.resolver.tower()
    }

    pub fn depth(&self) -> usize {
        self.resolver.depth()
    }

    pub fn marking(&self) -> &Marking {
        &self.marking
    }

    /// `(min(g), x(g))`.
    pub fn value(&self, g: &GroupWord) -> (Option<usize>, Symbol) {
        match self.resolver.resolve(g) {
            CellResolution::Resolved { stage, .. } => {
                (Some(stage), self.marking.symbol(stage).map_or(Symbol::Hole, Symbol::Letter))
            }
            CellResolution::Unresolved { .. } => (None, Symbol::Hole),
        }
    }

    /// The window of `t·x`, whose value at `w` is `x(t^{-1}w)`.
    pub fn window(&self, t: &GroupWord, cells: &[GroupWord]) -> ToeplitzWindow {
        let ti = t.inverse();
        let (stages, values) = cells
            .iter()
            .map(|w| self.value(&ti.mul(w).expect("window words match the chain")))
            .unzip();
        ToeplitzWindow {
            cells: cells.to_vec(),
            stages,
            values,
            depth: self.depth(),
            alphabet: self.marking.alphabet(),
        }
    }
}

/// A Toeplitz array restricted to a finite window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToeplitzWindow {
    pub cells: Vec<GroupWord>,
    /// Capture stage of the underlying coordinate, `None` for holes.
    pub stages: Vec<Option<usize>>,
    pub values: Vec<Symbol>,
    pub depth: usize,
    pub alphabet: Vec<char>,
}

impl ToeplitzWindow {
    pub fn text(&self) -> String {
        self.values.iter().map(|s| s.to_char()).collect()
    }

    pub fn holes(&self) -> Vec<&GroupWord> {
        self.cells.iter().zip(&self.values).filter(|(_, v)| **v == Symbol::Hole).map(|(c, _)| c).collect()
    }
}

pub fn generate_toeplitz(
    chain: &QuotientChain,
    tower: &TransversalTower,
    marking: &Marking,
    depth: usize,
    cells: &[GroupWord],
) -> Result<ToeplitzWindow, ToeplitzError> {
    let x = ToeplitzArray::new(chain, tower, marking.clone(), depth)?;
    Ok(x.window(&chain.identity(), cells))
}

/// Cells of the window grouped by right coset `Γ_n w`.
fn orbit_classes(chain: &QuotientChain, cells: &[GroupWord], n: usize) -> HashMap<usize, Vec<usize>> {
    let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, w) in cells.iter().enumerate() {
        classes.entry(chain.right_cell(n, w)).or_default().push(i);
    }
    classes
}

/// Per cell, the symbol `α` with the cell in `Per(x, Γ_n, α)`, window-relative:
/// every visible point of its `Γ_n`-orbit carries `α` and at least two are visible.
pub fn layout(chain: &QuotientChain, x: &ToeplitzWindow, n: usize) -> Vec<Option<char>> {
    let mut out = vec![None; x.cells.len()];
    for members in orbit_classes(chain, &x.cells, n).values() {
        if members.len() < 2 {
            continue;
        }
        if let Symbol::Letter(a) = x.values[members[0]] {
            if members.iter().all(|&i| x.values[i] == Symbol::Letter(a)) {
                for &i in members {
                    out[i] = Some(a);
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub level: usize,
    /// `Per(x, Γ_n, α) ∩ W` per symbol, in window order.
    pub per: BTreeMap<char, Vec<String>>,
}

pub fn per_sets(chain: &QuotientChain, x: &ToeplitzWindow, n: usize) -> PeriodReport {
    let mut per: BTreeMap<char, Vec<String>> = x.alphabet.iter().map(|&a| (a, Vec::new())).collect();
    for (i, a) in layout(chain, x, n).into_iter().enumerate() {
        if let Some(a) = a {
            per.entry(a).or_default().push(x.cells[i].to_string());
        }
    }
    PeriodReport { level: n, per }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EssentialVerdict {
    /// Every shift outside `Γ_n` within the radius visibly breaks a period set.
    Essential { radius: usize, shifts_checked: usize },
    NotEssential { witness: String },
    Inconclusive,
}

/// Tests on the window whether `Γ_n` is an essential period of `x`.
///
/// A shift `g` preserves the period sets if for every `h ∈ Per(x,Γ_n,α) ∩ W`
/// the visible orbit of `h` in `gx`, namely `{gu : u ∈ W, Γ_n gu = Γ_n h}`,
/// carries only `α`.
pub fn essential_test(chain: &QuotientChain, x: &ToeplitzWindow, n: usize, radius: usize) -> EssentialVerdict {
    let lay = layout(chain, x, n);
    let per_cells: Vec<(usize, char)> = lay.iter().enumerate().filter_map(|(i, a)| a.map(|a| (i, a))).collect();
    if per_cells.is_empty() {
        return EssentialVerdict::Inconclusive;
    }
    let per_classes: Vec<(usize, char)> =
        per_cells.iter().map(|&(i, a)| (chain.right_cell(n, &x.cells[i]), a)).collect();
    let mut checked = 0;
    let mut inconclusive = false;
    for g in chain.word_kind().ball(radius) {
        if chain.contains(n, &g) {
            continue;
        }
        checked += 1;
        let mut seen: HashMap<usize, Vec<Symbol>> = HashMap::new();
        for (u, v) in x.cells.iter().zip(&x.values) {
            let gu = g.mul(u).expect("window words match the chain");
            seen.entry(chain.right_cell(n, &gu)).or_default().push(*v);
        }
        let mut evidence = false;
        let mut violated = false;
        for (rc, a) in &per_classes {
            if let Some(vals) = seen.get(rc) {
                evidence = true;
                if vals.iter().any(|v| *v != Symbol::Letter(*a)) {
                    violated = true;
                    break;
                }
            }
        }
        if !violated {
            if evidence {
                return EssentialVerdict::NotEssential { witness: g.to_string() };
            }
            inconclusive = true;
        }
    }
    if inconclusive {
        EssentialVerdict::Inconclusive
    } else {
        EssentialVerdict::Essential { radius, shifts_checked: checked }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionReport {
    pub level: usize,
    pub classes: usize,
    /// Pairs of translators where layout equality and coset equality disagree.
    pub violations: Vec<(String, String)>,
}

/// Groups the translates `g^{-1}x` by their level-`n` layout and checks that
/// two share a layout exactly when `Γ_n g = Γ_n g'`.
pub fn bn_partition_check(
    x: &ToeplitzArray<'_>,
    translators: &[GroupWord],
    cells: &[GroupWord],
    n: usize,
) -> PartitionReport {
    let chain = x.chain();
    let keyed: Vec<(Vec<Option<char>>, usize)> = translators
        .iter()
        .map(|g| (layout(chain, &x.window(&g.inverse(), cells), n), chain.right_cell(n, g)))
        .collect();
    let mut violations = Vec::new();
    for i in 0..keyed.len() {
        for j in i + 1..keyed.len() {
            if (keyed[i].0 == keyed[j].0) != (keyed[i].1 == keyed[j].1) {
                violations.push((translators[i].to_string(), translators[j].to_string()));
            }
        }
    }
    let mut layouts: Vec<&Vec<Option<char>>> = keyed.iter().map(|k| &k.0).collect();
    layouts.sort();
    layouts.dedup();
    PartitionReport { level: n, classes: layouts.len(), violations }
}

/// Reads the odometer coordinates of a translate `t·x` from its period
/// layouts on a fixed window.
#[derive(Clone, Debug)]
pub struct FactorMap {
    cells: Vec<GroupWord>,
    /// Per level, layout → left cell (`None` when two cells share the layout).
    tables: Vec<HashMap<Vec<Option<char>>, Option<usize>>>,
}

impl FactorMap {
    pub fn new(x: &ToeplitzArray<'_>, cells: &[GroupWord]) -> Self {
        let chain = x.chain();
        let tables = (1..=x.depth())
            .map(|n| {
                let mut t: HashMap<Vec<Option<char>>, Option<usize>> = HashMap::new();
                for ti in x.tower().inverse_level(n) {
                    let key = layout(chain, &x.window(&ti, cells), n);
                    let cell = chain.left_cell(n, &ti);
                    t.entry(key).and_modify(|c| if *c != Some(cell) { *c = None }).or_insert(Some(cell));
                }
                t
            })
            .collect();
        FactorMap { cells: cells.to_vec(), tables }
    }

    pub fn cells(&self) -> &[GroupWord] {
        &self.cells
    }

    pub fn depth(&self) -> usize {
        self.tables.len()
    }

    /// Odometer point of the translate whose window (on [`FactorMap::cells`]) is `w`.
    pub fn factor_window(&self, chain: &QuotientChain, w: &ToeplitzWindow) -> Result<OdometerPoint, ToeplitzError> {
        let cells = (1..=self.depth())
            .map(|n| {
                self.tables[n - 1]
                    .get(&layout(chain, w, n))
                    .copied()
                    .flatten()
                    .ok_or(ToeplitzError::Inconclusive { level: n })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(OdometerPoint { cells })
    }

    /// Odometer point of `t·x`.
    pub fn factor(&self, x: &ToeplitzArray<'_>, t: &GroupWord) -> Result<OdometerPoint, ToeplitzError> {
        self.factor_window(x.chain(), &x.window(t, &self.cells))
    }
}

pub fn factor_to_odometer(x: &ToeplitzArray<'_>, t: &GroupWord, cells: &[GroupWord]) -> Result<OdometerPoint, ToeplitzError> {
    FactorMap::new(x, cells).factor(x, t)
}

/// Window violations of `x(γg) = x(g)` for `γ ∈ Γ_{min(g)}`.
pub fn window_property_violations(chain: &QuotientChain, x: &ToeplitzWindow) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for n in 1..=x.depth {
        for members in orbit_classes(chain, &x.cells, n).values() {
            for &i in members.iter().filter(|&&i| x.stages[i] == Some(n)) {
                for &j in members {
                    if x.values[j] != x.values[i] {
                        out.push((x.cells[i].to_string(), x.cells[j].to_string()));
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoleDensity {
    pub holes: Rational,
    pub bound: Rational,
}

/// Hole fraction of the window `D_M` at generation depth `N < M`, against
/// `Σ_{N<m≤M} |D_{m-1}|/|D_m|` plus the fraction still unresolved at depth `M`.
pub fn hole_density(
    chain: &QuotientChain,
    tower: &TransversalTower,
    generation_depth: usize,
    window_level: usize,
) -> HoleDensity {
    let cells = tower.level(window_level);
    let shallow = StageResolver::at_basepoint(chain, tower, generation_depth);
    let deep = StageResolver::at_basepoint(chain, tower, window_level);
    let size = from_usize(cells.len());
    let count = |r: &StageResolver<'_>| cells.iter().filter(|g| r.resolve(g).stage().is_none()).count();
    let tail = (generation_depth + 1..=window_level)
        .map(|m| from_usize(tower.size(m - 1)) / from_usize(tower.size(m)))
        .fold(from_usize(0), |a, b| a + b);
    HoleDensity {
        holes: from_usize(count(&shallow)) / size.clone(),
        bound: tail + from_usize(count(&deep)) / size,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dyadic_chain, zd_power_chain};
    use crate::window::Window;

    fn ruler(depth: usize) -> (QuotientChain, TransversalTower) {
        let c = dyadic_chain(depth);
        let t = TransversalTower::build(&c, depth).unwrap();
        (c, t)
    }

    #[test]
    fn ruler_window() {
        let (c, t) = ruler(6);
        let m = Marking::cyclic("ab").unwrap();
        let x = generate_toeplitz(&c, &t, &m, 4, &Window::line(0, 7).cells).unwrap();
        assert_eq!(x.text(), "abaaabab");
        let x0 = generate_toeplitz(&c, &t, &m, 4, &Window::line(0, 0).cells).unwrap();
        assert_eq!(x0.text(), "a");
        let wide = generate_toeplitz(&c, &t, &m, 4, &Window::line(-8, 8).cells).unwrap();
        assert_eq!(wide.holes(), [&GroupWord::Zd(vec![-1])]);
        assert!(window_property_violations(&c, &wide).is_empty());
    }

    #[test]
    fn markings() {
        assert_eq!(Marking::cyclic("aa").unwrap_err(), ToeplitzError::AlphabetTooSmall);
        let (c, t) = ruler(4);
        let short = Marking::explicit("ab").unwrap();
        assert!(ToeplitzArray::new(&c, &t, short, 3).is_err());
    }

    #[test]
    fn ruler_periods_at_level_one() {
        let (c, t) = ruler(6);
        let m = Marking::cyclic("ab").unwrap();
        let x = generate_toeplitz(&c, &t, &m, 6, &Window::line(0, 15).cells).unwrap();
        let p = per_sets(&c, &x, 1);
        let evens: Vec<String> = (0..16).step_by(2).map(|i: i64| i.to_string()).collect();
        assert_eq!(p.per[&'a'], evens);
        assert!(p.per[&'b'].is_empty());
        assert_eq!(
            essential_test(&c, &x, 1, 8),
            EssentialVerdict::Essential { radius: 8, shifts_checked: 8 }
        );
    }

    #[test]
    fn constant_windows() {
        let c = dyadic_chain(4);
        let x = ToeplitzWindow {
            cells: Window::line(0, 15).cells,
            stages: vec![Some(1); 16],
            values: vec![Symbol::Letter('a'); 16],
            depth: 4,
            alphabet: vec!['a', 'b'],
        };
        for n in 1..=3 {
            assert_eq!(per_sets(&c, &x, n).per[&'a'].len(), 16);
            assert!(matches!(essential_test(&c, &x, n, 4), EssentialVerdict::NotEssential { .. }));
        }
        let one = ToeplitzWindow { cells: x.cells[..1].to_vec(), stages: vec![Some(1)], values: vec![Symbol::Letter('a')], ..x };
        assert_eq!(essential_test(&c, &one, 1, 4), EssentialVerdict::Inconclusive);
    }

    #[test]
    fn layout_classes_follow_cosets() {
        let (c, t) = ruler(6);
        let x = ToeplitzArray::new(&c, &t, Marking::cyclic("ab").unwrap(), 6).unwrap();
        let w = Window::line(0, 31).cells;
        let sample = Window::line(0, 15).cells;
        let r = bn_partition_check(&x, &sample, &w, 2);
        assert_eq!((r.classes, r.violations.len()), (4, 0));
        let stage_one = ToeplitzArray::new(&c, &t, Marking::explicit("abbbbb").unwrap(), 6).unwrap();
        let r = bn_partition_check(&stage_one, &sample, &w, 1);
        assert_eq!((r.classes, r.violations.len()), (2, 0));
        let r = bn_partition_check(&x, &[c.identity()], &w, 3);
        assert_eq!((r.classes, r.violations.len()), (1, 0));
    }

    #[test]
    fn factor_map_recovers_cosets() {
        let (c, t) = ruler(6);
        let x = ToeplitzArray::new(&c, &t, Marking::cyclic("ab").unwrap(), 3).unwrap();
        let f = FactorMap::new(&x, &Window::line(-16, 15).cells);
        assert_eq!(f.factor(&x, &c.identity()).unwrap(), OdometerPoint::basepoint(&c, 3));
        assert_eq!(f.factor(&x, &GroupWord::Zd(vec![5])).unwrap().cells, [1, 1, 5]);
        for g in -20..20 {
            let g = GroupWord::Zd(vec![g]);
            assert_eq!(f.factor(&x, &g).unwrap(), OdometerPoint::of_word(&c, 3, &g));
        }
    }

    #[test]
    fn holes_stay_within_the_tail() {
        for c in [dyadic_chain(8), zd_power_chain(2, 5)] {
            let t = TransversalTower::build(&c, c.depth()).unwrap();
            for n in 1..c.depth() {
                let h = hole_density(&c, &t, n, c.depth());
                assert!(h.holes <= h.bound);
            }
        }
    }
}
