use std::cmp::Ordering;
use std::fmt;

use super::GroupError;

/// An element of `G` in backend normal form.
///
/// `Zd` carries the integer coordinates of an element of ℤ^d. `Free` carries a
/// freely reduced word over generators `1..=k`, where a negative letter denotes
/// the inverse generator. The identity is the zero vector or the empty word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupWord {
    Zd(Vec<i64>),
    Free(Vec<i32>),
}

/// Which kind of words a chain accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordKind {
    /// ℤ^d with the given dimension.
    Zd(usize),
    /// Free group on the given number of generators.
    Free(usize),
}

impl WordKind {
    pub fn identity(self) -> GroupWord {
        match self {
            WordKind::Zd(d) => GroupWord::Zd(vec![0; d]),
            WordKind::Free(_) => GroupWord::Free(Vec::new()),
        }
    }

    /// Checks that `w` is a well-formed word of this kind.
    pub fn check(self, w: &GroupWord) -> Result<(), GroupError> {
        match (self, w) {
            (WordKind::Zd(d), GroupWord::Zd(v)) => {
                if v.len() == d {
                    Ok(())
                } else {
                    Err(GroupError::DimensionMismatch { expected: d, found: v.len() })
                }
            }
            (WordKind::Free(k), GroupWord::Free(letters)) => {
                for &l in letters {
                    if l == 0 || l.unsigned_abs() as usize > k {
                        return Err(GroupError::UnknownGenerator(l));
                    }
                }
                if letters.windows(2).any(|p| p[0] == -p[1]) {
                    return Err(GroupError::NotReduced);
                }
                Ok(())
            }
            _ => Err(GroupError::BackendMismatch),
        }
    }

    /// Parses a word.
    ///
    /// ℤ^d words are comma separated integers, optionally parenthesised
    /// (`3,-2` or `(3,-2)`). Free words use `a`, `b`, ... for generators and
    /// upper case letters for their inverses; `e`, `1` or the empty string is
    /// the identity. Free words are reduced while parsing.
    pub fn parse(self, s: &str) -> Result<GroupWord, GroupError> {
        let s = s.trim();
        match self {
            WordKind::Zd(_) => {
                let inner = s.trim_start_matches('(').trim_end_matches(')');
                let coords = inner
                    .split(',')
                    .map(|c| c.trim().parse::<i64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| GroupError::Parse(s.to_string()))?;
                let w = GroupWord::Zd(coords);
                self.check(&w)?;
                Ok(w)
            }
            WordKind::Free(k) => {
                if s.is_empty() || s == "e" || s == "1" {
                    return Ok(GroupWord::Free(Vec::new()));
                }
                let mut letters = Vec::with_capacity(s.len());
                for ch in s.chars() {
                    let l = letter_from_char(ch).ok_or_else(|| GroupError::Parse(s.to_string()))?;
                    if l.unsigned_abs() as usize > k {
                        return Err(GroupError::UnknownGenerator(l));
                    }
                    push_reduced(&mut letters, l);
                }
                Ok(GroupWord::Free(letters))
            }
        }
    }

    /// All elements of word length at most `radius`, shortest first.
    ///
    /// ℤ^d uses the ℓ¹ norm (standard generators); ties are broken
    /// lexicographically. Free words are listed in shortlex order with
    /// letters ordered `a < A < b < B < ...`.
    pub fn ball(self, radius: usize) -> Vec<GroupWord> {
        match self {
            WordKind::Zd(d) => {
                let r = radius as i64;
                let mut out = Vec::new();
                let mut cur = vec![0i64; d];
                zd_ball_rec(&mut cur, 0, r, &mut out);
                out.sort_by(|a, b| a.ball_cmp(b));
                out
            }
            WordKind::Free(k) => {
                let mut out = vec![GroupWord::Free(Vec::new())];
                let mut frontier: Vec<Vec<i32>> = vec![Vec::new()];
                let letters = free_letters(k);
                for _ in 0..radius {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for &l in &letters {
                            if w.last() == Some(&-l) {
                                continue;
                            }
                            let mut nw = w.clone();
                            nw.push(l);
                            next.push(nw);
                        }
                    }
                    out.extend(next.iter().cloned().map(GroupWord::Free));
                    frontier = next;
                }
                out
            }
        }
    }
}

fn zd_ball_rec(cur: &mut Vec<i64>, pos: usize, budget: i64, out: &mut Vec<GroupWord>) {
    if pos == cur.len() {
        out.push(GroupWord::Zd(cur.clone()));
        return;
    }
    for v in -budget..=budget {
        cur[pos] = v;
        zd_ball_rec(cur, pos + 1, budget - v.abs(), out);
    }
    cur[pos] = 0;
}

/// Letters of the free group in generator order: `a, A, b, B, ...`.
pub(crate) fn free_letters(k: usize) -> Vec<i32> {
    (1..=k as i32).flat_map(|g| [g, -g]).collect()
}

fn letter_key(l: i32) -> (u32, bool) {
    (l.unsigned_abs(), l < 0)
}

fn letter_from_char(ch: char) -> Option<i32> {
    if ch.is_ascii_lowercase() {
        Some((ch as u8 - b'a') as i32 + 1)
    } else if ch.is_ascii_uppercase() {
        Some(-((ch as u8 - b'A') as i32 + 1))
    } else {
        None
    }
}

fn letter_to_char(l: i32) -> char {
    let base = if l > 0 { b'a' } else { b'A' };
    (base + (l.unsigned_abs() as u8 - 1)) as char
}

fn push_reduced(letters: &mut Vec<i32>, l: i32) {
    if letters.last() == Some(&-l) {
        letters.pop();
    } else {
        letters.push(l);
    }
}

impl GroupWord {
    pub fn kind(&self) -> WordKind {
        match self {
            GroupWord::Zd(v) => WordKind::Zd(v.len()),
            GroupWord::Free(letters) => WordKind::Free(
                letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0),
            ),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupWord::Zd(v) => v.iter().all(|&c| c == 0),
            GroupWord::Free(letters) => letters.is_empty(),
        }
    }

    /// Group product `self · other`.
    pub fn mul(&self, other: &GroupWord) -> Result<GroupWord, GroupError> {
        match (self, other) {
            (GroupWord::Zd(a), GroupWord::Zd(b)) => {
                if a.len() != b.len() {
                    return Err(GroupError::DimensionMismatch { expected: a.len(), found: b.len() });
                }
                Ok(GroupWord::Zd(a.iter().zip(b).map(|(x, y)| x + y).collect()))
            }
            (GroupWord::Free(a), GroupWord::Free(b)) => {
                let mut out = a.clone();
                for &l in b {
                    push_reduced(&mut out, l);
                }
                Ok(GroupWord::Free(out))
            }
            _ => Err(GroupError::BackendMismatch),
        }
    }

    pub fn inverse(&self) -> GroupWord {
        match self {
            GroupWord::Zd(v) => GroupWord::Zd(v.iter().map(|c| -c).collect()),
            GroupWord::Free(letters) => GroupWord::Free(letters.iter().rev().map(|l| -l).collect()),
        }
    }

    /// Word length: ℓ¹ norm for ℤ^d, number of letters for free words.
    pub fn length(&self) -> usize {
        match self {
            GroupWord::Zd(v) => v.iter().map(|c| c.unsigned_abs() as usize).sum(),
            GroupWord::Free(letters) => letters.len(),
        }
    }

    /// Shortest-first order used for balls and representative choice.
    pub fn ball_cmp(&self, other: &GroupWord) -> Ordering {
        self.length().cmp(&other.length()).then_with(|| match (self, other) {
            (GroupWord::Free(a), GroupWord::Free(b)) => {
                a.iter().map(|&l| letter_key(l)).cmp(b.iter().map(|&l| letter_key(l)))
            }
            _ => self.cmp(other),
        })
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupWord::Zd(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
            GroupWord::Free(letters) if letters.is_empty() => write!(f, "e"),
            GroupWord::Free(letters) => {
                for &l in letters {
                    write!(f, "{}", letter_to_char(l))?;
                }
                Ok(())
            }
        }
    }
}

/// Serialized as its display string.
impl serde::Serialize for GroupWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zd_product_is_componentwise() {
        let a = GroupWord::Zd(vec![1, 2]);
        let b = GroupWord::Zd(vec![3, -2]);
        assert_eq!(a.mul(&b).unwrap(), GroupWord::Zd(vec![4, 0]));
    }

    #[test]
    fn inverse_gives_identity() {
        let k = WordKind::Free(2);
        let a = k.parse("abAb").unwrap();
        assert!(a.mul(&a.inverse()).unwrap().is_identity());
        let z = GroupWord::Zd(vec![5, -7, 1]);
        assert!(z.mul(&z.inverse()).unwrap().is_identity());
    }

    #[test]
    fn free_reduction() {
        let k = WordKind::Free(2);
        let ab = k.parse("ab").unwrap();
        let ba = k.parse("Ba").unwrap();
        assert_eq!(ab.mul(&ba).unwrap(), k.parse("aa").unwrap());
        assert_eq!(k.parse("aAbB").unwrap(), GroupWord::Free(vec![]));
    }

    #[test]
    fn backend_mismatch_is_an_error() {
        let a = GroupWord::Zd(vec![1]);
        let b = GroupWord::Free(vec![1]);
        assert!(matches!(a.mul(&b), Err(GroupError::BackendMismatch)));
        let c = GroupWord::Zd(vec![1, 2]);
        assert!(matches!(a.mul(&c), Err(GroupError::DimensionMismatch { .. })));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let k = WordKind::Free(3);
        for s in ["e", "a", "AbC", "ccB"] {
            assert_eq!(k.parse(s).unwrap().to_string(), s);
        }
        let z = WordKind::Zd(2);
        assert_eq!(z.parse("(5,-1)").unwrap(), GroupWord::Zd(vec![5, -1]));
        assert_eq!(z.parse("5,-1").unwrap().to_string(), "5,-1");
        assert!(z.parse("5").is_err());
        assert!(k.parse("ad").is_err());
    }

    #[test]
    fn ball_sizes() {
        // |B_r| in ℤ^2 is 2r^2+2r+1; in F_2 it is 1 + 4(3^r - 1)/2.
        assert_eq!(WordKind::Zd(2).ball(3).len(), 25);
        assert_eq!(WordKind::Free(2).ball(3).len(), 1 + 4 + 12 + 36);
        let b = WordKind::Free(2).ball(1);
        let names: Vec<String> = b.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["e", "a", "A", "b", "B"]);
        let z = WordKind::Zd(1).ball(2);
        let names: Vec<String> = z.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["0", "-1", "1", "-2", "2"]);
    }
}
