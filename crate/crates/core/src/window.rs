//! Finite windows `W ⊂ G` and their text specifications.
//!
//! Accepted forms:
//! - `a..b`: integers `a..=b` in ℤ, or the square `[a..b]²` in ℤ²;
//! - `a..b,c..d`: the box `[a..b] × [c..d]` in ℤ²;
//! - `ball:R`: all words of length at most `R`, shortest first;
//! - `w1;w2;...`: an explicit list of words.

use crate::group::{GroupError, GroupWord, WordKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Consecutive integers.
    Line { lo: i64, hi: i64 },
    /// A box in ℤ², listed row by row (second coordinate outer).
    Grid { x: (i64, i64), y: (i64, i64) },
    List,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub cells: Vec<GroupWord>,
    pub shape: Shape,
}

impl Window {
    pub fn line(lo: i64, hi: i64) -> Self {
        Window { cells: (lo..=hi).map(|i| GroupWord::Zd(vec![i])).collect(), shape: Shape::Line { lo, hi } }
    }

    pub fn grid(x: (i64, i64), y: (i64, i64)) -> Self {
        let cells = (y.0..=y.1).flat_map(|j| (x.0..=x.1).map(move |i| GroupWord::Zd(vec![i, j]))).collect();
        Window { cells, shape: Shape::Grid { x, y } }
    }

    pub fn list(cells: Vec<GroupWord>) -> Self {
        Window { cells, shape: Shape::List }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn parse(kind: WordKind, spec: &str) -> Result<Self, GroupError> {
        let spec = spec.trim();
        let bad = || GroupError::Parse(spec.to_string());
        if let Some(r) = spec.strip_prefix("ball:") {
            let r: usize = r.trim().parse().map_err(|_| bad())?;
            return Ok(Window::list(kind.ball(r)));
        }
        if spec.contains("..") {
            let ranges = spec
                .split(',')
                .map(|part| {
                    let (a, b) = part.split_once("..").ok_or_else(bad)?;
                    let a: i64 = a.trim().parse().map_err(|_| bad())?;
                    let b: i64 = b.trim().parse().map_err(|_| bad())?;
                    Ok((a, b))
                })
                .collect::<Result<Vec<_>, GroupError>>()?;
            return match (kind, ranges.as_slice()) {
                (WordKind::Zd(1), [(a, b)]) => Ok(Window::line(*a, *b)),
                (WordKind::Zd(2), [r]) => Ok(Window::grid(*r, *r)),
                (WordKind::Zd(2), [x, y]) => Ok(Window::grid(*x, *y)),
                _ => Err(bad()),
            };
        }
        if spec.is_empty() {
            return Ok(Window::list(Vec::new()));
        }
        let cells = spec.split(';').map(|w| kind.parse(w)).collect::<Result<Vec<_>, _>>()?;
        Ok(Window::list(cells))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_form() {
        let z = WordKind::Zd(1);
        assert_eq!(Window::parse(z, "-2..2").unwrap().len(), 5);
        assert_eq!(Window::parse(z, "-1;3").unwrap().cells, [GroupWord::Zd(vec![-1]), GroupWord::Zd(vec![3])]);
        let z2 = WordKind::Zd(2);
        let w = Window::parse(z2, "0..3,0..1").unwrap();
        assert_eq!(w.len(), 8);
        assert_eq!(w.cells[1], GroupWord::Zd(vec![1, 0]));
        assert_eq!(Window::parse(z2, "0..1").unwrap().len(), 4);
        assert_eq!(Window::parse(WordKind::Free(2), "ball:1").unwrap().len(), 5);
        assert!(Window::parse(WordKind::Free(2), "0..3").is_err());
        assert!(Window::parse(z, "").unwrap().is_empty());
        assert!(Window::parse(z, "1..x").is_err());
    }
}
