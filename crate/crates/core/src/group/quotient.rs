//! Finite quotients `Q_n` and the coset bookkeeping of `Γ_n` inside them.
//!
//! Every level maps a word to an element of a finite group `Q_n`; `Γ_n` is
//! the preimage of a subgroup `H_n ≤ Q_n`. Left cosets `gΓ_n` are odometer
//! coordinates, right cosets `Γ_n g` index transversals.

use super::{GroupError, GroupWord};

/// Element of a finite quotient, in the level's own encoding.
pub type QElem = usize;

#[derive(Clone, Debug)]
pub(crate) enum QuotientLevel {
    /// ℤ^d / (m_1ℤ × ... × m_dℤ); elements are residue vectors in mixed radix,
    /// first coordinate most significant.
    Zd { moduli: Vec<u64>, size: usize },
    Table(TableQuotient),
}

#[derive(Clone, Debug)]
pub(crate) struct TableQuotient {
    pub size: usize,
    pub mul: Vec<u32>,
    pub identity: QElem,
    pub inverse: Vec<u32>,
    pub gen_images: Vec<QElem>,
    pub subgroup: Vec<QElem>,
    in_subgroup: Vec<bool>,
    left_id: Vec<u32>,
    right_id: Vec<u32>,
    left_rep: Vec<QElem>,
    right_rep: Vec<QElem>,
}

impl TableQuotient {
    /// Validates a multiplication table and precomputes coset ids.
    pub fn new(
        level: usize,
        rows: &[Vec<u32>],
        gen_images: &[u32],
        subgroup: Option<&[u32]>,
    ) -> Result<Self, GroupError> {
        let bad = |msg: String| GroupError::InvalidChain(format!("level {level}: {msg}"));
        let size = rows.len();
        if size == 0 {
            return Err(bad("empty multiplication table".into()));
        }
        let mut mul = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(bad("multiplication table is not square".into()));
            }
            if row.iter().any(|&e| e as usize >= size) {
                return Err(bad("multiplication table entry out of range".into()));
            }
            mul.extend_from_slice(row);
        }
        let m = |a: usize, b: usize| mul[a * size + b] as usize;
        let identity = (0..size)
            .find(|&e| (0..size).all(|x| m(e, x) == x && m(x, e) == x))
            .ok_or_else(|| bad("no identity element".into()))?;
        for a in 0..size {
            for b in 0..size {
                let ab = m(a, b);
                for c in 0..size {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(bad(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        let mut inverse = vec![0u32; size];
        for a in 0..size {
            let inv = (0..size)
                .find(|&b| m(a, b) == identity)
                .ok_or_else(|| bad(format!("element {a} has no inverse")))?;
            inverse[a] = inv as u32;
        }
        if gen_images.iter().any(|&g| g as usize >= size) {
            return Err(bad("generator image out of range".into()));
        }
        let gens: Vec<QElem> = gen_images.iter().map(|&g| g as usize).collect();
        let mut reached = vec![false; size];
        reached[identity] = true;
        let mut stack = vec![identity];
        while let Some(x) = stack.pop() {
            for &g in &gens {
                for y in [m(x, g), m(x, inverse[g] as usize)] {
                    if !reached[y] {
                        reached[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        if reached.iter().any(|r| !r) {
            return Err(GroupError::NotSurjective { level });
        }
        let subgroup: Vec<QElem> = match subgroup {
            Some(s) => {
                let mut v: Vec<QElem> = s.iter().map(|&e| e as usize).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
            None => vec![identity],
        };
        if subgroup.iter().any(|&e| e >= size) {
            return Err(bad("subgroup element out of range".into()));
        }
        let mut in_subgroup = vec![false; size];
        for &h in &subgroup {
            in_subgroup[h] = true;
        }
        if !in_subgroup[identity] {
            return Err(bad("subgroup misses the identity".into()));
        }
        for &a in &subgroup {
            for &b in &subgroup {
                if !in_subgroup[m(a, b)] {
                    return Err(bad("subgroup is not closed under multiplication".into()));
                }
            }
        }
        let mut q = TableQuotient {
            size,
            mul,
            identity,
            inverse,
            gen_images: gens,
            subgroup,
            in_subgroup,
            left_id: Vec::new(),
            right_id: Vec::new(),
            left_rep: Vec::new(),
            right_rep: Vec::new(),
        };
        q.index_cosets();
        Ok(q)
    }

    fn index_cosets(&mut self) {
        let size = self.size;
        let mut left_id = vec![u32::MAX; size];
        let mut right_id = vec![u32::MAX; size];
        let mut left_rep = Vec::new();
        let mut right_rep = Vec::new();
        for e in 0..size {
            if left_id[e] == u32::MAX {
                let id = left_rep.len() as u32;
                left_rep.push(e);
                for &h in &self.subgroup {
                    left_id[self.m(e, h)] = id;
                }
            }
            if right_id[e] == u32::MAX {
                let id = right_rep.len() as u32;
                right_rep.push(e);
                for &h in &self.subgroup {
                    right_id[self.m(h, e)] = id;
                }
            }
        }
        self.left_id = left_id;
        self.right_id = right_id;
        self.left_rep = left_rep;
        self.right_rep = right_rep;
    }

    #[inline]
    pub fn m(&self, a: QElem, b: QElem) -> QElem {
        self.mul[a * self.size + b] as usize
    }

    pub fn is_normal_subgroup(&self) -> bool {
        (0..self.size).all(|g| {
            let gi = self.inverse[g] as usize;
            self.subgroup.iter().all(|&h| self.in_subgroup[self.m(self.m(g, h), gi)])
        })
    }

    /// Same group, subgroup replaced by `c H c^{-1}`.
    pub fn conjugated(&self, c: QElem) -> TableQuotient {
        let ci = self.inverse[c] as usize;
        let mut out = self.clone();
        let mut sub: Vec<QElem> = self.subgroup.iter().map(|&h| self.m(self.m(c, h), ci)).collect();
        sub.sort_unstable();
        out.in_subgroup = vec![false; self.size];
        for &h in &sub {
            out.in_subgroup[h] = true;
        }
        out.subgroup = sub;
        out.index_cosets();
        out
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.mul.chunks(self.size).map(|r| r.to_vec()).collect()
    }
}

impl QuotientLevel {
    pub fn zd(moduli: Vec<u64>) -> Result<Self, GroupError> {
        if moduli.contains(&0) {
            return Err(GroupError::InvalidChain("zero modulus".into()));
        }
        let size = moduli
            .iter()
            .try_fold(1usize, |acc, &m| acc.checked_mul(m as usize))
            .ok_or_else(|| GroupError::InvalidChain("quotient too large".into()))?;
        Ok(QuotientLevel::Zd { moduli, size })
    }

    /// Number of elements of `Q_n`.
    pub fn size(&self) -> usize {
        match self {
            QuotientLevel::Zd { size, .. } => *size,
            QuotientLevel::Table(t) => t.size,
        }
    }

    /// The index `[G:Γ_n]`, i.e. the number of cosets.
    pub fn index(&self) -> usize {
        match self {
            QuotientLevel::Zd { size, .. } => *size,
            QuotientLevel::Table(t) => t.left_rep.len(),
        }
    }

    pub fn identity(&self) -> QElem {
        match self {
            QuotientLevel::Zd { .. } => 0,
            QuotientLevel::Table(t) => t.identity,
        }
    }

    pub fn image(&self, w: &GroupWord) -> QElem {
        match (self, w) {
            (QuotientLevel::Zd { moduli, .. }, GroupWord::Zd(v)) => {
                let residues: Vec<u64> =
                    v.iter().zip(moduli).map(|(&c, &m)| c.rem_euclid(m as i64) as u64).collect();
                self.encode(&residues)
            }
            (QuotientLevel::Table(t), GroupWord::Free(letters)) => {
                let mut e = t.identity;
                for &l in letters {
                    let g = t.gen_images[l.unsigned_abs() as usize - 1];
                    let g = if l > 0 { g } else { t.inverse[g] as usize };
                    e = t.m(e, g);
                }
                e
            }
            _ => unreachable!("word kind checked by the chain"),
        }
    }

    pub fn mul(&self, a: QElem, b: QElem) -> QElem {
        match self {
            QuotientLevel::Zd { moduli, .. } => {
                let (x, y) = (self.decode(a), self.decode(b));
                let r: Vec<u64> = x.iter().zip(&y).zip(moduli).map(|((p, q), m)| (p + q) % m).collect();
                self.encode(&r)
            }
            QuotientLevel::Table(t) => t.m(a, b),
        }
    }

    pub fn inv(&self, a: QElem) -> QElem {
        match self {
            QuotientLevel::Zd { moduli, .. } => {
                let x = self.decode(a);
                let r: Vec<u64> = x.iter().zip(moduli).map(|(p, m)| (m - p) % m).collect();
                self.encode(&r)
            }
            QuotientLevel::Table(t) => t.inverse[a] as usize,
        }
    }

    pub fn left_id(&self, e: QElem) -> usize {
        match self {
            QuotientLevel::Zd { .. } => e,
            QuotientLevel::Table(t) => t.left_id[e] as usize,
        }
    }

    pub fn right_id(&self, e: QElem) -> usize {
        match self {
            QuotientLevel::Zd { .. } => e,
            QuotientLevel::Table(t) => t.right_id[e] as usize,
        }
    }

    pub fn left_rep(&self, c: usize) -> QElem {
        match self {
            QuotientLevel::Zd { .. } => c,
            QuotientLevel::Table(t) => t.left_rep[c],
        }
    }

    pub fn in_subgroup(&self, e: QElem) -> bool {
        match self {
            QuotientLevel::Zd { .. } => e == 0,
            QuotientLevel::Table(t) => t.in_subgroup[e],
        }
    }

    pub fn is_normal(&self) -> bool {
        match self {
            QuotientLevel::Zd { .. } => true,
            QuotientLevel::Table(t) => t.is_normal_subgroup(),
        }
    }

    pub fn moduli(&self) -> Option<&[u64]> {
        match self {
            QuotientLevel::Zd { moduli, .. } => Some(moduli),
            QuotientLevel::Table(_) => None,
        }
    }

    pub fn decode(&self, e: QElem) -> Vec<u64> {
        match self {
            QuotientLevel::Zd { moduli, .. } => {
                let mut out = vec![0u64; moduli.len()];
                let mut rest = e as u64;
                for (i, &m) in moduli.iter().enumerate().rev() {
                    out[i] = rest % m;
                    rest /= m;
                }
                out
            }
            QuotientLevel::Table(_) => vec![e as u64],
        }
    }

    pub fn encode(&self, residues: &[u64]) -> QElem {
        match self {
            QuotientLevel::Zd { moduli, .. } => {
                let mut e = 0u64;
                for (&r, &m) in residues.iter().zip(moduli) {
                    e = e * m + r;
                }
                e as usize
            }
            QuotientLevel::Table(_) => residues[0] as usize,
        }
    }
}
