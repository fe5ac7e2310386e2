//! Nested transversal towers `D_0 ⊆ D_1 ⊆ ...`, their verification, and the
//! greedy thinning that makes consecutive index ratios summable.

use std::collections::{HashMap, HashSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{free_letters, GroupError, GroupWord, QuotientChain, WordKind};
use crate::rational::{from_usize, pow2_inv, to_pq, Rational};

const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("tower file: {0}")]
    Format(String),
    #[error("depth exhausted: stage {stage} cannot be placed, plan so far {achieved:?}")]
    DepthExhausted { stage: usize, achieved: Vec<usize> },
    #[error("plan does not match tower: {0}")]
    PlanMismatch(String),
    #[error("plan has {have} levels, {need} required")]
    PlanTooShallow { need: usize, have: usize },
}

/// The sets `D_0 = {1}, D_1, ..., D_N`, each a right transversal of `Γ_n`,
/// with stored factorization witnesses.
#[derive(Clone, Debug)]
pub struct TransversalTower {
    levels: Vec<Vec<GroupWord>>,
    /// `witnesses[n][j][w] = (v, d)` with `D_n[w] = D_n[v]·D_j[d]`, `D_n[v] ∈ Γ_j`, for `j < n`.
    witnesses: Vec<Vec<Vec<(u32, u32)>>>,
    /// `right_index[n][rc]`: position in `D_n` of the representative of right coset `rc`.
    right_index: Vec<Vec<u32>>,
    /// `capture[n][rc]`: position in `D_{n-1}` of an element of right coset `rc` at level `n`.
    capture: Vec<Vec<u32>>,
}

/// Right-coset lookup tables for the given levels; missing cosets map to `NONE`.
fn index_levels(chain: &QuotientChain, levels: &[Vec<GroupWord>]) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let mut right_index = Vec::with_capacity(levels.len());
    let mut capture = Vec::with_capacity(levels.len());
    for (n, d) in levels.iter().enumerate() {
        let mut idx = vec![NONE; chain.index(n)];
        for (i, w) in d.iter().enumerate() {
            let rc = chain.right_cell(n, w);
            if idx[rc] == NONE {
                idx[rc] = i as u32;
            }
        }
        right_index.push(idx);
        let mut cap = vec![NONE; chain.index(n)];
        if n > 0 {
            for (i, w) in levels[n - 1].iter().enumerate() {
                let rc = chain.right_cell(n, w);
                if cap[rc] == NONE {
                    cap[rc] = i as u32;
                }
            }
        }
        capture.push(cap);
    }
    (right_index, capture)
}

impl TransversalTower {
    /// Builds `D_0..D_depth` with `D_{n+1} = V_n·D_n`, where `V_n` is a right
    /// transversal of `Γ_{n+1}` in `Γ_n` containing `1`.
    pub fn build(chain: &QuotientChain, depth: usize) -> Result<Self, TowerError> {
        if depth > chain.depth() {
            return Err(GroupError::LevelOutOfRange { level: depth, depth: chain.depth() }.into());
        }
        let mut levels = vec![vec![chain.identity()]];
        for n in 0..depth {
            let v = step_transversal(chain, n);
            let mut next = Vec::with_capacity(v.len() * levels[n].len());
            for vi in &v {
                for d in &levels[n] {
                    next.push(vi.mul(d)?);
                }
            }
            levels.push(next);
        }
        Self::from_levels(chain, levels)
    }

    /// Wraps explicit levels, computing witnesses by right-coset lookup.
    pub fn from_levels(chain: &QuotientChain, levels: Vec<Vec<GroupWord>>) -> Result<Self, TowerError> {
        if levels.is_empty() || levels.len() > chain.depth() + 1 {
            return Err(TowerError::Format(format!("tower has {} levels", levels.len())));
        }
        for d in &levels {
            for w in d {
                chain.word_kind().check(w)?;
            }
        }
        let (right_index, capture) = index_levels(chain, &levels);
        let mut witnesses = vec![Vec::new()];
        for n in 1..levels.len() {
            let pos: HashMap<&GroupWord, u32> =
                levels[n].iter().enumerate().map(|(i, w)| (w, i as u32)).collect();
            let mut per_j = Vec::with_capacity(n);
            for j in 0..n {
                let mut row = Vec::with_capacity(levels[n].len());
                for w in &levels[n] {
                    let d = right_index[j][chain.right_cell(j, w)];
                    let found = (d != NONE)
                        .then(|| w.mul(&levels[j][d as usize].inverse()).ok())
                        .flatten()
                        .and_then(|v| pos.get(&v).copied());
                    match found {
                        Some(v) => row.push((v, d)),
                        None => {
                            return Err(TowerError::Format(format!(
                                "no factorization of {w} through level {j} inside level {n}"
                            )))
                        }
                    }
                }
                per_j.push(row);
            }
            witnesses.push(per_j);
        }
        Ok(TransversalTower { levels, witnesses, right_index, capture })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `D_n` in construction order.
    pub fn level(&self, n: usize) -> &[GroupWord] {
        &self.levels[n]
    }

    pub fn size(&self, n: usize) -> usize {
        self.levels[n].len()
    }

    /// `D_n^{-1}`, the translators `t_{n,y}` of the clopen cells.
    pub fn inverse_level(&self, n: usize) -> Vec<GroupWord> {
        self.levels[n].iter().map(|w| w.inverse()).collect()
    }

    /// Witness `(v, d)` for `D_n[w]` through level `j < n`.
    pub fn witness(&self, n: usize, j: usize, w: usize) -> (&GroupWord, &GroupWord) {
        let (v, d) = self.witnesses[n][j][w];
        (&self.levels[n][v as usize], &self.levels[j][d as usize])
    }

    /// Position in `D_n` of the representative of the right coset `Γ_n g`.
    pub fn rep_index(&self, chain: &QuotientChain, n: usize, g: &GroupWord) -> Option<usize> {
        let i = self.right_index[n][chain.right_cell(n, g)];
        (i != NONE).then_some(i as usize)
    }

    /// Position in `D_{n-1}` of an element of the right coset with id `rc` at level `n`.
    pub(crate) fn capture_index(&self, n: usize, rc: usize) -> Option<usize> {
        let i = self.capture[n][rc];
        (i != NONE).then_some(i as usize)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|d| d.len()).collect()
    }

    /// The tower restricted to the levels of a plan: `D'_i = D_{n_i}`, with its chain.
    pub fn restrict(&self, chain: &QuotientChain, plan: &ThinningPlan) -> Result<(QuotientChain, Self), TowerError> {
        plan.check_against(self)?;
        let sub = chain.subchain(&plan.levels)?;
        let mut levels = vec![self.levels[0].clone()];
        levels.extend(plan.levels.iter().map(|&n| self.levels[n].clone()));
        let t = TransversalTower::from_levels(&sub, levels)?;
        Ok((sub, t))
    }

    /// Largest `R` such that every word of length at most `R` lies in `D_N`.
    pub fn coverage_radius(&self, kind: WordKind) -> Option<usize> {
        let top: HashSet<&GroupWord> = self.levels[self.depth()].iter().collect();
        let mut r = 0;
        loop {
            let ball = kind.ball(r);
            if ball.len() > top.len() || !ball.iter().all(|g| top.contains(g)) {
                return r.checked_sub(1);
            }
            r += 1;
        }
    }

    pub fn to_file(&self) -> TowerFile {
        TowerFile {
            depth: self.depth(),
            levels: self.levels.iter().map(|d| d.iter().map(|w| w.to_string()).collect()).collect(),
            witnesses: (0..self.levels.len())
                .map(|n| {
                    (0..n)
                        .map(|j| {
                            self.witnesses[n][j]
                                .iter()
                                .enumerate()
                                .map(|(w, &(v, d))| [w, v as usize, d as usize])
                                .collect()
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("tower serializes")
    }

    /// Loads a tower file without trusting it: witnesses are kept as given and
    /// checked by [`verify_tower`].
    pub fn from_file(chain: &QuotientChain, file: &TowerFile) -> Result<Self, TowerError> {
        if file.levels.len() != file.depth + 1 || file.depth > chain.depth() {
            return Err(TowerError::Format(format!("depth {} does not fit the chain", file.depth)));
        }
        let levels = file
            .levels
            .iter()
            .map(|d| d.iter().map(|s| chain.parse_word(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let (right_index, capture) = index_levels(chain, &levels);
        let mut witnesses: Vec<Vec<Vec<(u32, u32)>>> = Vec::with_capacity(levels.len());
        for n in 0..levels.len() {
            let given = file.witnesses.get(n).map(|v| v.as_slice()).unwrap_or(&[]);
            let mut per_j = Vec::with_capacity(n);
            for j in 0..n {
                let mut row = vec![(NONE, NONE); levels[n].len()];
                for t in given.get(j).map(|v| v.as_slice()).unwrap_or(&[]) {
                    if let Some(slot) = row.get_mut(t[0]) {
                        *slot = (t[1].min(NONE as usize) as u32, t[2].min(NONE as usize) as u32);
                    }
                }
                per_j.push(row);
            }
            witnesses.push(per_j);
        }
        Ok(TransversalTower { levels, witnesses, right_index, capture })
    }

    pub fn from_json(chain: &QuotientChain, text: &str) -> Result<Self, TowerError> {
        let file: TowerFile = serde_json::from_str(text).map_err(|e| TowerError::Format(e.to_string()))?;
        Self::from_file(chain, &file)
    }
}

/// Serialized tower: `D_n` as word strings and witness triples `[w, v, d]`
/// (positions in `D_n`, `D_n`, `D_j`) for every `j < n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TowerFile {
    pub depth: usize,
    pub levels: Vec<Vec<String>>,
    pub witnesses: Vec<Vec<Vec<[usize; 3]>>>,
}

/// A right transversal of `Γ_{n+1}` in `Γ_n`, identity first.
fn step_transversal(chain: &QuotientChain, n: usize) -> Vec<GroupWord> {
    let hi = chain.level(n + 1);
    match chain.word_kind() {
        WordKind::Zd(d) => {
            let lo: Vec<u64> = if n == 0 { vec![1; d] } else { chain.level(n).moduli().unwrap().to_vec() };
            let hi_m = hi.moduli().unwrap();
            let steps: Vec<u64> = hi_m.iter().zip(&lo).map(|(h, l)| h / l).collect();
            let mut out = vec![Vec::new()];
            for i in 0..d {
                out = out
                    .into_iter()
                    .flat_map(|prefix: Vec<i64>| {
                        let step = lo[i];
                        (0..steps[i]).map(move |k| {
                            let mut p = prefix.clone();
                            p.push((k * step) as i64);
                            p
                        })
                    })
                    .collect();
            }
            out.into_iter().map(GroupWord::Zd).collect()
        }
        WordKind::Free(k) => {
            // Breadth-first search over the Cayley graph of Q_{n+1}; the first
            // word reaching an element is shortlex minimal.
            let letters = free_letters(k);
            let gens: Vec<usize> = letters.iter().map(|&l| hi.image(&GroupWord::Free(vec![l]))).collect();
            let mut words: Vec<Option<Vec<i32>>> = vec![None; hi.size()];
            let start = hi.identity();
            words[start] = Some(Vec::new());
            let mut queue = std::collections::VecDeque::from([start]);
            let mut order = Vec::with_capacity(hi.size());
            while let Some(e) = queue.pop_front() {
                order.push(e);
                let w = words[e].clone().unwrap();
                for (&l, &g) in letters.iter().zip(&gens) {
                    let f = hi.mul(e, g);
                    if words[f].is_none() {
                        let mut nw = w.clone();
                        nw.push(l);
                        words[f] = Some(nw);
                        queue.push_back(f);
                    }
                }
            }
            let mut seen = vec![false; hi.index()];
            let mut out = Vec::new();
            for e in order {
                let inside = n == 0 || chain.level(n).in_subgroup(chain.project_elem(n + 1, e));
                let rc = hi.right_id(e);
                if inside && !seen[rc] {
                    seen[rc] = true;
                    out.push(GroupWord::Free(words[e].clone().unwrap()));
                }
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerProperty {
    /// `D_0 = {1}`, `1 ∈ D_1`, `D_n ⊆ D_{n+1}`.
    Nesting,
    /// `D_n` meets every right coset of `Γ_n` exactly once.
    Transversal,
    /// `D_n = ⋃ vD_j` over `v ∈ D_n ∩ Γ_j`, disjointly, with valid witnesses.
    Factorization,
}

impl TowerProperty {
    pub fn name(self) -> &'static str {
        match self {
            TowerProperty::Nesting => "nesting",
            TowerProperty::Transversal => "transversal",
            TowerProperty::Factorization => "factorization",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub property: TowerProperty,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerReport {
    pub checks: Vec<PropertyCheck>,
}

impl TowerReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failure(&self, p: TowerProperty) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.property == p && !c.passed)
    }
}

fn check(property: TowerProperty, result: Result<(), String>) -> PropertyCheck {
    PropertyCheck { property, passed: result.is_ok(), counterexample: result.err() }
}

/// Recomputes the nesting, transversal and factorization properties from scratch.
pub fn verify_tower(chain: &QuotientChain, t: &TransversalTower) -> TowerReport {
    TowerReport {
        checks: vec![
            check(TowerProperty::Nesting, verify_nesting(chain, t)),
            check(TowerProperty::Transversal, verify_transversal(chain, t)),
            check(TowerProperty::Factorization, verify_factorization(chain, t)),
        ],
    }
}

fn verify_nesting(chain: &QuotientChain, t: &TransversalTower) -> Result<(), String> {
    if t.levels[0].len() != 1 || !t.levels[0][0].is_identity() {
        return Err("level 0 is not {1}".into());
    }
    if t.depth() >= 1 && !t.levels[1].iter().any(|w| w.is_identity()) {
        return Err(format!("{} is missing from level 1", chain.identity()));
    }
    for n in 1..t.levels.len() {
        let upper: HashSet<&GroupWord> = t.levels[n].iter().collect();
        if let Some(w) = t.levels[n - 1].iter().find(|w| !upper.contains(w)) {
            return Err(format!("{w} is in level {} but not in level {n}", n - 1));
        }
    }
    Ok(())
}

fn verify_transversal(chain: &QuotientChain, t: &TransversalTower) -> Result<(), String> {
    for (n, d) in t.levels.iter().enumerate() {
        if d.len() != chain.index(n) {
            return Err(format!("level {n} has {} elements, index is {}", d.len(), chain.index(n)));
        }
        let mut seen = vec![None; chain.index(n)];
        for w in d {
            let rc = chain.right_cell(n, w);
            if let Some(other) = seen[rc] {
                return Err(format!("{other} and {w} share a right coset at level {n}"));
            }
            seen[rc] = Some(w);
        }
    }
    Ok(())
}

fn verify_factorization(chain: &QuotientChain, t: &TransversalTower) -> Result<(), String> {
    for n in 1..t.levels.len() {
        let dn = &t.levels[n];
        let members: HashSet<&GroupWord> = dn.iter().collect();
        for j in 0..n {
            for (w, &(v, d)) in t.witnesses[n][j].iter().enumerate() {
                let (Some(vw), Some(dw)) = (dn.get(v as usize), t.levels[j].get(d as usize)) else {
                    return Err(format!("missing witness for {} through level {j} at level {n}", dn[w]));
                };
                if !chain.contains(j, vw) {
                    return Err(format!("witness {vw} for {} is not in the level-{j} subgroup", dn[w]));
                }
                if vw.mul(dw).ok().as_ref() != Some(&dn[w]) {
                    return Err(format!("witness {vw}·{dw} does not give {} (levels {j}, {n})", dn[w]));
                }
            }
            let mut union = HashSet::with_capacity(dn.len());
            for v in dn.iter().filter(|v| chain.contains(j, v)) {
                for d in &t.levels[j] {
                    let p = v.mul(d).map_err(|e| e.to_string())?;
                    if !members.contains(&p) {
                        return Err(format!("{v}·{d} lies outside level {n} (through level {j})"));
                    }
                    if !union.insert(p.clone()) {
                        return Err(format!("{p} is covered twice at level {n} through level {j}"));
                    }
                }
            }
            if let Some(w) = dn.iter().find(|w| !union.contains(*w)) {
                return Err(format!("{w} at level {n} is not covered through level {j}"));
            }
        }
    }
    Ok(())
}

/// Increasing levels `n_1 < n_2 < ...` with `|D_{n_{i-1}}|/|D_{n_i}| < 2^{-(i+1)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThinningPlan {
    pub levels: Vec<usize>,
    pub ratios: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
pub struct PlanFile {
    pub levels: Vec<usize>,
    pub ratios: Vec<String>,
}

impl ThinningPlan {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Plan level `i` as a tower level; `0 ↦ 0`.
    pub fn level(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.levels[i - 1]
        }
    }

    /// `r_i`, 1-based.
    pub fn ratio(&self, i: usize) -> &Rational {
        &self.ratios[i - 1]
    }

    /// Recomputes the ratios from `t` and checks the strict inequalities.
    pub fn check_against(&self, t: &TransversalTower) -> Result<(), TowerError> {
        if self.levels.len() != self.ratios.len() {
            return Err(TowerError::PlanMismatch("levels and ratios differ in length".into()));
        }
        let mut prev = 0;
        for (i, &n) in self.levels.iter().enumerate() {
            if n <= prev && i > 0 || n == 0 || n > t.depth() {
                return Err(TowerError::PlanMismatch(format!("level {n} out of order or beyond the tower")));
            }
            let r = from_usize(t.size(prev)) / from_usize(t.size(n));
            if r != self.ratios[i] {
                return Err(TowerError::PlanMismatch(format!("ratio at level {n} is {}", to_pq(&r))));
            }
            if r >= pow2_inv(i + 2) {
                return Err(TowerError::PlanMismatch(format!("ratio {} at stage {} is too large", to_pq(&r), i + 1)));
            }
            prev = n;
        }
        Ok(())
    }

    pub fn to_file(&self) -> PlanFile {
        PlanFile { levels: self.levels.clone(), ratios: self.ratios.iter().map(to_pq).collect() }
    }

    pub fn from_file(t: &TransversalTower, f: &PlanFile) -> Result<Self, TowerError> {
        let ratios = f
            .ratios
            .iter()
            .map(|s| crate::rational::parse_pq(s).ok_or_else(|| TowerError::Format(format!("bad ratio {s}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let plan = ThinningPlan { levels: f.levels.clone(), ratios };
        plan.check_against(t)?;
        Ok(plan)
    }
}

/// The maximal greedy plan: `n_i` is the least level with ratio below `2^{-(i+1)}`.
pub fn greedy_plan(t: &TransversalTower) -> ThinningPlan {
    let mut levels = Vec::new();
    let mut ratios = Vec::new();
    let mut prev = 0;
    for n in 1..=t.depth() {
        let i = levels.len() + 1;
        let r = from_usize(t.size(prev)) / from_usize(t.size(n));
        if r < pow2_inv(i + 1) {
            levels.push(n);
            ratios.push(r);
            prev = n;
        }
    }
    ThinningPlan { levels, ratios }
}

/// Greedy plan with at least `required` stages, else `DepthExhausted`.
pub fn thin_summable(t: &TransversalTower, required: usize) -> Result<ThinningPlan, TowerError> {
    let plan = greedy_plan(t);
    if plan.len() < required.max(1) {
        return Err(TowerError::DepthExhausted { stage: plan.len() + 1, achieved: plan.levels });
    }
    Ok(plan)
}

/// `Σ r_j`, the union bound on the measure of the stage sets used to build `Z_0`.
pub fn z0_bound(t: &TransversalTower, plan: &ThinningPlan) -> Result<Rational, TowerError> {
    plan.check_against(t)?;
    Ok(plan.ratios.iter().fold(Rational::zero(), |acc, r| acc + r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dihedral_chain, dyadic_chain, s4_chain, s4_nonnormal_chain, zd_power_chain};
    use crate::rational::ratio;

    fn ints(t: &TransversalTower, n: usize) -> Vec<i64> {
        t.level(n)
            .iter()
            .map(|w| match w {
                GroupWord::Zd(v) => v[0],
                _ => unreachable!(),
            })
            .collect()
    }

    #[test]
    fn dyadic_levels_are_initial_segments() {
        let c = dyadic_chain(6);
        let t = TransversalTower::build(&c, 6).unwrap();
        for n in 0..=6 {
            assert_eq!(ints(&t, n), (0..1i64 << n).collect::<Vec<_>>());
        }
        assert!(verify_tower(&c, &t).passed());
    }

    #[test]
    fn verification_passes_on_every_preset() {
        for c in [zd_power_chain(2, 4), dihedral_chain(5), s4_chain(), s4_nonnormal_chain()] {
            let t = TransversalTower::build(&c, c.depth()).unwrap();
            let r = verify_tower(&c, &t);
            assert!(r.passed(), "{:?}", r);
        }
    }

    #[test]
    fn depth_zero_and_one() {
        let c = dyadic_chain(3);
        let t0 = TransversalTower::build(&c, 0).unwrap();
        assert!(verify_tower(&c, &t0).passed());
        let t1 = TransversalTower::build(&c, 1).unwrap();
        assert!(t1.level(1).contains(&c.identity()));
        assert!(verify_tower(&c, &t1).passed());
    }

    #[test]
    fn replacing_an_element_breaks_nesting_and_factorization() {
        let c = dyadic_chain(4);
        let t = TransversalTower::build(&c, 4).unwrap();
        let mut file = t.to_file();
        file.levels[2][1] = "5".into();
        let bad = TransversalTower::from_file(&c, &file).unwrap();
        let r = verify_tower(&c, &bad);
        assert!(r.failure(TowerProperty::Nesting).is_some());
        assert!(r.failure(TowerProperty::Factorization).is_some());
        assert!(r.failure(TowerProperty::Transversal).is_none());
    }

    #[test]
    fn file_round_trip() {
        let c = s4_chain();
        let t = TransversalTower::build(&c, 3).unwrap();
        let back = TransversalTower::from_json(&c, &t.to_json()).unwrap();
        assert_eq!(back.to_json(), t.to_json());
        assert!(verify_tower(&c, &back).passed());
    }

    #[test]
    fn greedy_plans() {
        let c = dyadic_chain(16);
        let t = TransversalTower::build(&c, 16).unwrap();
        let p = thin_summable(&t, 1).unwrap();
        assert_eq!(p.levels, [3, 7, 12]);
        assert_eq!(z0_bound(&t, &p).unwrap(), ratio(7, 32));

        let c = zd_power_chain(2, 8);
        let t = TransversalTower::build(&c, 8).unwrap();
        assert_eq!(greedy_plan(&t).levels, [2, 4, 7]);

        let c = dihedral_chain(6);
        let t = TransversalTower::build(&c, 6).unwrap();
        assert_eq!(greedy_plan(&t).levels, [2, 6]);
    }

    #[test]
    fn shallow_towers_exhaust() {
        let c = dyadic_chain(2);
        let t = TransversalTower::build(&c, 2).unwrap();
        assert_eq!(
            thin_summable(&t, 1).unwrap_err(),
            TowerError::DepthExhausted { stage: 1, achieved: vec![] }
        );
        let empty = ThinningPlan { levels: vec![], ratios: vec![] };
        assert_eq!(z0_bound(&t, &empty).unwrap(), Rational::zero());
    }

    #[test]
    fn restriction_keeps_the_tower_properties() {
        let c = dyadic_chain(12);
        let t = TransversalTower::build(&c, 12).unwrap();
        let p = greedy_plan(&t);
        let (sub, st) = t.restrict(&c, &p).unwrap();
        assert_eq!(st.sizes(), [1, 8, 128, 4096]);
        assert!(verify_tower(&sub, &st).passed());
    }

    #[test]
    fn coverage() {
        let c = dyadic_chain(4);
        let t = TransversalTower::build(&c, 4).unwrap();
        // -1 is never a representative
        assert_eq!(t.coverage_radius(c.word_kind()), Some(0));
    }
}
