//! Recoding a symbolic window through a clopen partition, and pairing two
//! families of windows over matching odometer coordinates.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::group::GroupWord;
use crate::odometer::OdometerPoint;
use crate::toeplitz::{Symbol, ToeplitzWindow};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("pattern at {cell} matches {matches} partition elements")]
    PartitionViolation { cell: String, matches: usize },
    #[error("no cell of the window sees the whole predicate support")]
    WindowTooSmall,
    #[error("no sample over base {base} on the other side")]
    FiberMismatch { base: String },
}

/// A cylinder condition on the pattern around the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowPredicate {
    Symbol { at: GroupWord, symbol: Symbol },
    Not(Box<WindowPredicate>),
    All(Vec<WindowPredicate>),
    Any(Vec<WindowPredicate>),
}

impl WindowPredicate {
    pub fn symbol(at: GroupWord, c: char) -> Self {
        WindowPredicate::Symbol { at, symbol: Symbol::Letter(c) }
    }

    pub fn support(&self) -> Vec<GroupWord> {
        match self {
            WindowPredicate::Symbol { at, .. } => vec![at.clone()],
            WindowPredicate::Not(p) => p.support(),
            WindowPredicate::All(ps) | WindowPredicate::Any(ps) => ps.iter().flat_map(|p| p.support()).collect(),
        }
    }

    /// Evaluates on the pattern `u ↦ value(u)`.
    pub fn eval(&self, value: &dyn Fn(&GroupWord) -> Option<Symbol>) -> Option<bool> {
        match self {
            WindowPredicate::Symbol { at, symbol } => value(at).map(|v| v == *symbol),
            WindowPredicate::Not(p) => p.eval(value).map(|b| !b),
            WindowPredicate::All(ps) => {
                let mut all = true;
                for p in ps {
                    all &= p.eval(value)?;
                }
                Some(all)
            }
            WindowPredicate::Any(ps) => {
                let mut any = false;
                for p in ps {
                    any |= p.eval(value)?;
                }
                Some(any)
            }
        }
    }
}

/// Symbols on an explicit finite set of cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicWindow {
    pub values: HashMap<GroupWord, Symbol>,
}

impl From<&ToeplitzWindow> for SymbolicWindow {
    fn from(w: &ToeplitzWindow) -> Self {
        SymbolicWindow { values: w.cells.iter().cloned().zip(w.values.iter().copied()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodedWindow {
    pub cells: Vec<GroupWord>,
    /// 1-based index of the partition element containing `g^{-1}x`.
    pub codes: Vec<usize>,
}

impl CodedWindow {
    pub fn get(&self, g: &GroupWord) -> Option<usize> {
        self.cells.iter().position(|c| c == g).map(|i| self.codes[i])
    }
}

/// Codes `g` by the partition element containing `g^{-1}x`, whose value at
/// `u` is `x(gu)`. Only cells `g` (from `order`) with the whole support visible are coded.
pub fn clopen_code(
    x: &SymbolicWindow,
    order: &[GroupWord],
    partition: &[WindowPredicate],
) -> Result<CodedWindow, CodingError> {
    let support: Vec<GroupWord> = partition.iter().flat_map(|p| p.support()).collect();
    let mut cells = Vec::new();
    let mut codes = Vec::new();
    for g in order {
        let shifted: Option<Vec<()>> = support
            .iter()
            .map(|u| g.mul(u).ok().filter(|gu| x.values.contains_key(gu)).map(|_| ()))
            .collect();
        if shifted.is_none() {
            continue;
        }
        let value = |u: &GroupWord| g.mul(u).ok().and_then(|gu| x.values.get(&gu).copied());
        let hits: Vec<usize> = partition
            .iter()
            .enumerate()
            .filter(|(_, p)| p.eval(&value) == Some(true))
            .map(|(i, _)| i + 1)
            .collect();
        if hits.len() != 1 {
            return Err(CodingError::PartitionViolation { cell: g.to_string(), matches: hits.len() });
        }
        cells.push(g.clone());
        codes.push(hits[0]);
    }
    if cells.is_empty() && !order.is_empty() {
        return Err(CodingError::WindowTooSmall);
    }
    Ok(CodedWindow { cells, codes })
}

/// A window together with the odometer coordinates of its point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberSample<T> {
    pub base: OdometerPoint,
    pub window: T,
}

/// Matched pairs from [`fiber_product`].
pub type FiberPairs<A, B> = Vec<(FiberSample<A>, FiberSample<B>)>;

/// Pairs every `a` with every `b` whose base agrees with `a`'s up to `level`.
///
/// Fails when a sample on either side has no partner.
pub fn fiber_product<A: Clone, B: Clone>(
    a: &[FiberSample<A>],
    b: &[FiberSample<B>],
    level: usize,
) -> Result<FiberPairs<A, B>, CodingError> {
    let key = |p: &OdometerPoint| p.truncate(level);
    let mut by_base: HashMap<OdometerPoint, Vec<&FiberSample<B>>> = HashMap::new();
    for s in b {
        by_base.entry(key(&s.base)).or_default().push(s);
    }
    let mut used: HashMap<OdometerPoint, bool> = by_base.keys().map(|k| (k.clone(), false)).collect();
    let mut out = Vec::new();
    for s in a {
        let k = key(&s.base);
        let partners = by_base.get(&k).ok_or_else(|| CodingError::FiberMismatch { base: format!("{:?}", k.cells) })?;
        used.insert(k, true);
        out.extend(partners.iter().map(|p| (s.clone(), (*p).clone())));
    }
    if let Some(s) = b.iter().find(|s| !used[&key(&s.base)]) {
        return Err(CodingError::FiberMismatch { base: format!("{:?}", key(&s.base).cells) });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::dyadic_chain;
    use crate::toeplitz::{generate_toeplitz, Marking};
    use crate::tower::TransversalTower;
    use crate::window::Window;

    fn z(i: i64) -> GroupWord {
        GroupWord::Zd(vec![i])
    }

    #[test]
    fn identity_partition_reproduces_the_window() {
        let c = dyadic_chain(6);
        let t = TransversalTower::build(&c, 6).unwrap();
        let w = generate_toeplitz(&c, &t, &Marking::cyclic("ab").unwrap(), 6, &Window::line(0, 31).cells).unwrap();
        let parts = vec![WindowPredicate::symbol(z(0), 'a'), WindowPredicate::symbol(z(0), 'b')];
        let coded = clopen_code(&SymbolicWindow::from(&w), &w.cells, &parts).unwrap();
        let back: String = coded.codes.iter().map(|&i| ['a', 'b'][i - 1]).collect();
        assert_eq!(back, w.text());
    }

    #[test]
    fn stage_one_partition_is_parity() {
        let c = dyadic_chain(6);
        let t = TransversalTower::build(&c, 6).unwrap();
        let w = generate_toeplitz(&c, &t, &Marking::cyclic("ab").unwrap(), 6, &Window::line(0, 31).cells).unwrap();
        let even = WindowPredicate::All(vec![WindowPredicate::symbol(z(0), 'a'), WindowPredicate::symbol(z(2), 'a')]);
        let parts = vec![even.clone(), WindowPredicate::Not(Box::new(even))];
        let coded = clopen_code(&SymbolicWindow::from(&w), &w.cells, &parts).unwrap();
        assert_eq!(coded.cells.len(), 30);
        for (g, code) in coded.cells.iter().zip(&coded.codes) {
            let GroupWord::Zd(v) = g else { unreachable!() };
            assert_eq!(*code, 1 + v[0].rem_euclid(2) as usize);
        }
    }

    #[test]
    fn overlapping_predicates_are_rejected() {
        let c = dyadic_chain(4);
        let t = TransversalTower::build(&c, 4).unwrap();
        let w = generate_toeplitz(&c, &t, &Marking::cyclic("ab").unwrap(), 4, &Window::line(0, 7).cells).unwrap();
        let a = WindowPredicate::symbol(z(0), 'a');
        let parts = vec![a.clone(), WindowPredicate::Any(vec![a, WindowPredicate::symbol(z(0), 'b')])];
        assert!(matches!(
            clopen_code(&SymbolicWindow::from(&w), &w.cells, &parts),
            Err(CodingError::PartitionViolation { .. })
        ));
        let far = vec![WindowPredicate::symbol(z(100), 'a'), WindowPredicate::Not(Box::new(WindowPredicate::symbol(z(100), 'a')))];
        assert_eq!(clopen_code(&SymbolicWindow::from(&w), &w.cells, &far), Err(CodingError::WindowTooSmall));
    }

    #[test]
    fn products() {
        let p = |c: Vec<usize>| OdometerPoint { cells: c };
        let a = vec![FiberSample { base: p(vec![0, 0]), window: 'x' }, FiberSample { base: p(vec![1, 1]), window: 'y' }];
        let diag = fiber_product(&a, &a, 2).unwrap();
        assert!(diag.iter().all(|(l, r)| l == r));
        assert_eq!(diag.len(), 2);
        let b = vec![FiberSample { base: p(vec![1, 3]), window: 'z' }];
        assert!(matches!(fiber_product(&a, &b, 2), Err(CodingError::FiberMismatch { .. })));
    }
}
