use serde::{Deserialize, Serialize};

use super::quotient::{QElem, QuotientLevel, TableQuotient};
use super::{GroupError, GroupWord, WordKind};

/// Which coset family the transversals `D_n` represent.
///
/// `Right` is the convention used throughout: `D_n` holds one element of each
/// right coset `Γ_n g`, and the clopen cells are indexed by `D_n^{-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    #[default]
    Right,
    Left,
}

/// A coset `gΓ_n` of `G/Γ_n`, identified by its cell id at level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteQuotientElement {
    pub level: usize,
    pub cell: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendTag {
    Zd,
    Table,
}

/// On-disk chain description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainSpec {
    pub backend: BackendTag,
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zd: Option<ZdSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableSpec>,
    #[serde(default)]
    pub side: Side,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZdSpec {
    pub d: usize,
    pub moduli: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TableSpec {
    pub quotients: Vec<QuotientSpec>,
    pub projections: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuotientSpec {
    pub size: usize,
    pub mul: Vec<Vec<u32>>,
    pub gen_images: Vec<u32>,
    /// Elements of `Q_n` whose preimage is `Γ_n`; the identity alone when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgroup: Option<Vec<u32>>,
}

/// A strictly decreasing chain `Γ_1 ⊋ Γ_2 ⊋ ... ⊋ Γ_N` presented by finite
/// quotients with compatible projections. Level 0 is the trivial quotient
/// `G/G`.
#[derive(Clone, Debug)]
pub struct QuotientChain {
    name: Option<String>,
    side: Side,
    kind: WordKind,
    levels: Vec<QuotientLevel>,
    /// `projections[n-1]` maps `Q_{n+1}` onto `Q_n` (table backend only).
    projections: Vec<Vec<QElem>>,
}

impl QuotientChain {
    pub fn from_spec(spec: &ChainSpec) -> Result<Self, GroupError> {
        if spec.depth == 0 {
            return Err(GroupError::InvalidChain("depth must be at least 1".into()));
        }
        let chain = match spec.backend {
            BackendTag::Zd => {
                let zd = spec
                    .zd
                    .as_ref()
                    .ok_or_else(|| GroupError::InvalidChain("missing \"zd\" section".into()))?;
                if zd.moduli.len() < spec.depth {
                    return Err(GroupError::InvalidChain(format!(
                        "depth {} but only {} modulus vectors",
                        spec.depth,
                        zd.moduli.len()
                    )));
                }
                let mut levels = Vec::with_capacity(spec.depth);
                for (n, m) in zd.moduli.iter().take(spec.depth).enumerate() {
                    if m.len() != zd.d {
                        return Err(GroupError::InvalidChain(format!(
                            "level {}: modulus vector has {} entries, expected {}",
                            n + 1,
                            m.len(),
                            zd.d
                        )));
                    }
                    levels.push(QuotientLevel::zd(m.clone())?);
                }
                for n in 1..levels.len() {
                    let (lo, hi) = (levels[n - 1].moduli().unwrap(), levels[n].moduli().unwrap());
                    if lo.iter().zip(hi).any(|(a, b)| b % a != 0) {
                        return Err(GroupError::InvalidChain(format!(
                            "level {}: moduli do not divide the next level",
                            n
                        )));
                    }
                }
                QuotientChain {
                    name: spec.name.clone(),
                    side: spec.side,
                    kind: WordKind::Zd(zd.d),
                    levels,
                    projections: Vec::new(),
                }
            }
            BackendTag::Table => {
                if spec.side != Side::Right {
                    return Err(GroupError::UnsupportedSide);
                }
                let table = spec
                    .table
                    .as_ref()
                    .ok_or_else(|| GroupError::InvalidChain("missing \"table\" section".into()))?;
                if table.quotients.len() < spec.depth {
                    return Err(GroupError::InvalidChain(format!(
                        "depth {} but only {} quotients",
                        spec.depth,
                        table.quotients.len()
                    )));
                }
                let gens = table.quotients[0].gen_images.len();
                if gens == 0 {
                    return Err(GroupError::InvalidChain("no generators".into()));
                }
                let mut levels = Vec::with_capacity(spec.depth);
                for (i, q) in table.quotients.iter().take(spec.depth).enumerate() {
                    if q.size != q.mul.len() {
                        return Err(GroupError::InvalidChain(format!(
                            "level {}: size {} disagrees with table",
                            i + 1,
                            q.size
                        )));
                    }
                    if q.gen_images.len() != gens {
                        return Err(GroupError::InvalidChain(format!(
                            "level {}: expected {} generator images",
                            i + 1,
                            gens
                        )));
                    }
                    let t = TableQuotient::new(i + 1, &q.mul, &q.gen_images, q.subgroup.as_deref())?;
                    levels.push(QuotientLevel::Table(t));
                }
                if table.projections.len() < spec.depth - 1 {
                    return Err(GroupError::InvalidChain("missing projection maps".into()));
                }
                let projections: Vec<Vec<QElem>> = table
                    .projections
                    .iter()
                    .take(spec.depth - 1)
                    .map(|p| p.iter().map(|&e| e as usize).collect())
                    .collect();
                let chain = QuotientChain {
                    name: spec.name.clone(),
                    side: spec.side,
                    kind: WordKind::Free(gens),
                    levels,
                    projections,
                };
                chain.check_projections()?;
                chain
            }
        };
        chain.check_indices()?;
        Ok(chain)
    }

    pub fn from_json(text: &str) -> Result<Self, GroupError> {
        let spec: ChainSpec = serde_json::from_str(text).map_err(|e| GroupError::Json(e.to_string()))?;
        Self::from_spec(&spec)
    }

    pub fn to_spec(&self) -> ChainSpec {
        match self.kind {
            WordKind::Zd(d) => ChainSpec {
                backend: BackendTag::Zd,
                depth: self.depth(),
                name: self.name.clone(),
                zd: Some(ZdSpec {
                    d,
                    moduli: self.levels.iter().map(|l| l.moduli().unwrap().to_vec()).collect(),
                }),
                table: None,
                side: self.side,
            },
            WordKind::Free(_) => ChainSpec {
                backend: BackendTag::Table,
                depth: self.depth(),
                name: self.name.clone(),
                zd: None,
                table: Some(TableSpec {
                    quotients: self
                        .levels
                        .iter()
                        .map(|l| match l {
                            QuotientLevel::Table(t) => QuotientSpec {
                                size: t.size,
                                mul: t.rows(),
                                gen_images: t.gen_images.iter().map(|&g| g as u32).collect(),
                                subgroup: if t.subgroup.len() == 1 {
                                    None
                                } else {
                                    Some(t.subgroup.iter().map(|&h| h as u32).collect())
                                },
                            },
                            QuotientLevel::Zd { .. } => unreachable!(),
                        })
                        .collect(),
                    projections: self
                        .projections
                        .iter()
                        .map(|p| p.iter().map(|&e| e as u32).collect())
                        .collect(),
                }),
                side: self.side,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_spec()).expect("chain spec serializes")
    }

    fn check_projections(&self) -> Result<(), GroupError> {
        for n in 1..self.depth() {
            let (lo, hi) = match (&self.levels[n - 1], &self.levels[n]) {
                (QuotientLevel::Table(a), QuotientLevel::Table(b)) => (a, b),
                _ => unreachable!(),
            };
            let p = &self.projections[n - 1];
            let bad = |msg: &str| GroupError::InvalidChain(format!("projection {}→{}: {msg}", n + 1, n));
            if p.len() != hi.size || p.iter().any(|&e| e >= lo.size) {
                return Err(bad("wrong length or entry out of range"));
            }
            for a in 0..hi.size {
                for b in 0..hi.size {
                    if p[hi.m(a, b)] != lo.m(p[a], p[b]) {
                        return Err(bad("not a homomorphism"));
                    }
                }
            }
            if hi.gen_images.iter().zip(&lo.gen_images).any(|(&g, &h)| p[g] != h) {
                return Err(bad("does not commute with the generator images"));
            }
            let lo_level = &self.levels[n - 1];
            if hi.subgroup.iter().any(|&h| !lo_level.in_subgroup(p[h])) {
                return Err(bad("subgroups are not nested"));
            }
        }
        Ok(())
    }

    fn check_indices(&self) -> Result<(), GroupError> {
        let mut prev = 1usize;
        for n in 1..=self.depth() {
            let idx = self.index(n);
            if idx <= prev || !idx.is_multiple_of(prev) {
                return Err(GroupError::InvalidChain(format!(
                    "index at level {n} is {idx}, which does not strictly refine {prev}"
                )));
            }
            prev = idx;
        }
        Ok(())
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn word_kind(&self) -> WordKind {
        self.kind
    }

    pub fn identity(&self) -> GroupWord {
        self.kind.identity()
    }

    pub fn parse_word(&self, s: &str) -> Result<GroupWord, GroupError> {
        self.kind.parse(s)
    }

    pub fn is_abelian_backend(&self) -> bool {
        matches!(self.kind, WordKind::Zd(_))
    }

    /// Whether every `Γ_n` is normal in `G`.
    pub fn is_normal(&self) -> bool {
        self.levels.iter().all(|l| l.is_normal())
    }

    /// `[G:Γ_n]`; level 0 is `G` itself.
    pub fn index(&self, n: usize) -> usize {
        if n == 0 {
            1
        } else {
            self.levels[n - 1].index()
        }
    }

    pub(crate) fn level(&self, n: usize) -> &QuotientLevel {
        &self.levels[n - 1]
    }

    fn check_level(&self, n: usize) -> Result<(), GroupError> {
        if n == 0 || n > self.depth() {
            Err(GroupError::LevelOutOfRange { level: n, depth: self.depth() })
        } else {
            Ok(())
        }
    }

    /// The coset `gΓ_n`.
    pub fn coset(&self, n: usize, g: &GroupWord) -> Result<FiniteQuotientElement, GroupError> {
        self.check_level(n)?;
        self.kind.check(g)?;
        Ok(FiniteQuotientElement { level: n, cell: self.left_cell(n, g) })
    }

    /// Cell id of `gΓ_n` (level 0 has the single cell 0).
    pub fn left_cell(&self, n: usize, g: &GroupWord) -> usize {
        if n == 0 {
            return 0;
        }
        let l = self.level(n);
        l.left_id(l.image(g))
    }

    /// Id of the right coset `Γ_n g`.
    pub fn right_cell(&self, n: usize, g: &GroupWord) -> usize {
        if n == 0 {
            return 0;
        }
        let l = self.level(n);
        l.right_id(l.image(g))
    }

    /// Membership `g ∈ Γ_n`.
    pub fn contains(&self, n: usize, g: &GroupWord) -> bool {
        if n == 0 {
            return true;
        }
        let l = self.level(n);
        l.in_subgroup(l.image(g))
    }

    /// Projection of a left cell id from level `n` to level `n - 1`.
    pub fn project_cell(&self, n: usize, c: usize) -> usize {
        if n <= 1 {
            return 0;
        }
        let hi = self.level(n);
        let lo = self.level(n - 1);
        let e = self.project_elem(n, hi.left_rep(c));
        lo.left_id(e)
    }

    /// Projection `Q_n → Q_{n-1}` of quotient elements, `n ≥ 2`.
    pub(crate) fn project_elem(&self, n: usize, e: QElem) -> QElem {
        let hi = self.level(n);
        let lo = self.level(n - 1);
        match (hi, lo) {
            (QuotientLevel::Zd { .. }, QuotientLevel::Zd { moduli, .. }) => {
                let r: Vec<u64> = hi.decode(e).iter().zip(moduli).map(|(x, m)| x % m).collect();
                lo.encode(&r)
            }
            _ => self.projections[n - 2][e],
        }
    }

    /// Cell id of `g · c` where `c` is a left cell at level `n`.
    pub fn act_cell(&self, n: usize, g: &GroupWord, c: usize) -> usize {
        if n == 0 {
            return 0;
        }
        let l = self.level(n);
        l.left_id(l.mul(l.image(g), l.left_rep(c)))
    }

    /// Right coset id of `z^{-1} g` at level `n`, where `z` is any element of the left cell `c`.
    ///
    /// This is well defined: replacing `z` by `zγ` changes `z^{-1}g` to `γ^{-1}z^{-1}g`,
    /// which lies in the same right coset.
    pub fn relative_right_cell(&self, n: usize, c: usize, g: &GroupWord) -> usize {
        if n == 0 {
            return 0;
        }
        let l = self.level(n);
        l.right_id(l.mul(l.inv(l.left_rep(c)), l.image(g)))
    }

    /// Human readable label of a left cell: residues for ℤ^d, the id otherwise.
    pub fn cell_label(&self, n: usize, c: usize) -> String {
        if n == 0 {
            return "0".into();
        }
        match self.level(n) {
            l @ QuotientLevel::Zd { .. } => {
                let parts: Vec<String> = l.decode(c).iter().map(|r| r.to_string()).collect();
                parts.join(",")
            }
            QuotientLevel::Table(_) => c.to_string(),
        }
    }

    /// The chain restricted to the given increasing list of levels.
    pub fn subchain(&self, levels: &[usize]) -> Result<QuotientChain, GroupError> {
        if levels.is_empty() {
            return Err(GroupError::InvalidChain("empty level list".into()));
        }
        for w in levels.windows(2) {
            if w[0] >= w[1] {
                return Err(GroupError::InvalidChain("levels must increase".into()));
            }
        }
        for &n in levels {
            self.check_level(n)?;
        }
        let new_levels = levels.iter().map(|&n| self.levels[n - 1].clone()).collect();
        let mut projections = Vec::new();
        if matches!(self.kind, WordKind::Free(_)) {
            for w in levels.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let size = self.level(hi).size();
                let map = (0..size)
                    .map(|e| {
                        let mut x = e;
                        for n in (lo + 1..=hi).rev() {
                            x = self.project_elem(n, x);
                        }
                        x
                    })
                    .collect();
                projections.push(map);
            }
        }
        Ok(QuotientChain {
            name: self.name.clone(),
            side: self.side,
            kind: self.kind,
            levels: new_levels,
            projections,
        })
    }

    /// The chain presenting `z_n Γ_n z_n^{-1}`.
    ///
    /// `z` must hold one word per level with `z_{n+1} ∈ z_n Γ_n`.
    pub fn conjugate(&self, z: &[GroupWord]) -> Result<QuotientChain, GroupError> {
        if z.len() != self.depth() {
            return Err(GroupError::InvalidChain(format!(
                "expected {} conjugators, got {}",
                self.depth(),
                z.len()
            )));
        }
        for w in z {
            self.kind.check(w)?;
        }
        for n in 1..self.depth() {
            if self.left_cell(n, &z[n]) != self.left_cell(n, &z[n - 1]) {
                return Err(GroupError::IncompatibleSequence { level: n });
            }
        }
        let mut out = self.clone();
        if let WordKind::Free(_) = self.kind {
            for (n, zn) in z.iter().enumerate() {
                if let QuotientLevel::Table(t) = &self.levels[n] {
                    let c = self.levels[n].image(zn);
                    out.levels[n] = QuotientLevel::Table(t.conjugated(c));
                }
            }
        }
        Ok(out)
    }
}
