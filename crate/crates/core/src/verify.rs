//! The full invariant corpus behind `verify all`.
//!
//! Every check owns a ChaCha stream derived from the seed and its position,
//! so the report does not depend on how checks are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cells::{jpartition_equivariance_check, CellResolution, StageResolver};
use crate::extension::{
    fiber_agreement_violations, phi_equivariance_check, sample_consistency, sample_extension_window,
    OdometerSystem,
};
use crate::group::{GroupWord, QuotientChain, WordKind};
use crate::measure::{
    average_measure, bounds_chain_row, metric_d, nonuniform_marginals, CylinderMeasure, ENUMERATION_LIMIT,
};
use crate::odometer::OdometerPoint;
use crate::rational::{ratio, to_pq};
use crate::toeplitz::{generate_toeplitz, hole_density, window_property_violations, Marking};
use crate::tower::{thin_summable, verify_tower, z0_bound, TowerProperty, TowerReport, TransversalTower};

pub const DEFAULT_SEED: u64 = 0x0d0f_0e9e;

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: u64,
    pub jobs: usize,
    /// Random cases per equivariance sweep.
    pub sweep: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { seed: DEFAULT_SEED, jobs: 1, sweep: 1000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply to this chain.
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    pub cases: usize,
    pub violations: usize,
    pub detail: Option<String>,
}

impl CheckOutcome {
    fn from_failures(name: &'static str, cases: usize, failures: Vec<String>) -> Self {
        CheckOutcome {
            name,
            status: if failures.is_empty() { Status::Pass } else { Status::Fail },
            cases,
            violations: failures.len(),
            detail: failures.into_iter().next(),
        }
    }

    fn skip(name: &'static str, why: &str) -> Self {
        CheckOutcome { name, status: Status::Skip, cases: 0, violations: 0, detail: Some(why.into()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub chain: String,
    pub depth: usize,
    pub seed: u64,
    pub violations: usize,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn first_failure(&self) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// A uniformly random element of the depth-`depth` odometer.
pub fn random_point(chain: &QuotientChain, depth: usize, rng: &mut impl Rng) -> OdometerPoint {
    OdometerPoint::from_top_cell(chain, depth, rng.gen_range(0..chain.index(depth)))
}

/// A random word: coordinates in `[-radius, radius]`, or a reduced word of length at most `radius`.
pub fn random_word(kind: WordKind, radius: usize, rng: &mut impl Rng) -> GroupWord {
    let r = radius as i64;
    match kind {
        WordKind::Zd(d) => GroupWord::Zd((0..d).map(|_| rng.gen_range(-r..=r)).collect()),
        WordKind::Free(k) => {
            let len = rng.gen_range(0..=radius);
            let mut w: Vec<i32> = Vec::with_capacity(len);
            while w.len() < len {
                let l = rng.gen_range(1..=k as i32) * if rng.gen_bool(0.5) { 1 } else { -1 };
                if w.last() != Some(&-l) {
                    w.push(l);
                }
            }
            GroupWord::Free(w)
        }
    }
}

/// Window used by the layout checks: `[-16, 16]` on ℤ, a radius-4 box-ball on ℤ^d, radius 3 on free groups.
pub fn default_window(kind: WordKind) -> Vec<GroupWord> {
    match kind {
        WordKind::Zd(1) => (-16..=16).map(|i| GroupWord::Zd(vec![i])).collect(),
        WordKind::Zd(_) => kind.ball(4),
        WordKind::Free(_) => kind.ball(3),
    }
}

/// `g` is captured at stage `n` iff `z_n^{-1}g ∈ Γ_n D_{n-1}`, tested with a
/// left-cell representative `z_n` taken from `D_n^{-1}`.
pub fn literal_stage(chain: &QuotientChain, tower: &TransversalTower, z: &OdometerPoint, g: &GroupWord) -> Option<usize> {
    (1..=z.depth()).find(|&n| {
        let zn = tower
            .inverse_level(n)
            .into_iter()
            .find(|t| chain.left_cell(n, t) == z.cell(n))
            .expect("inverse transversal meets every left cell");
        let rc = chain.right_cell(n, &zn.inverse().mul(g).expect("words match the chain"));
        tower.level(n - 1).iter().any(|d| chain.right_cell(n, d) == rc)
    })
}

struct Ctx<'a> {
    chain: &'a QuotientChain,
    tower: &'a TransversalTower,
    cfg: &'a VerifyConfig,
    tower_report: TowerReport,
    /// Odometer depth for sampled checks.
    small: usize,
    window: Vec<GroupWord>,
}

type Check = fn(&Ctx<'_>, &mut ChaCha8Rng) -> Vec<CheckOutcome>;

const CHECKS: &[Check] = &[
    tower_checks,
    plan_checks,
    stage_partition,
    stage_translation,
    phi_translation,
    fiber_agreement,
    toeplitz_checks,
    metric_check,
    averaging_check,
    bounds_check,
];

/// Runs every check on `jobs` workers and merges in declaration order.
pub fn run_verify_all(chain: &QuotientChain, tower: &TransversalTower, cfg: &VerifyConfig) -> VerifyReport {
    let ctx = Ctx {
        chain,
        tower,
        cfg,
        tower_report: verify_tower(chain, tower),
        small: tower.depth().min(5),
        window: default_window(chain.word_kind()),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.max(1)).build().expect("thread pool");
    let results: Vec<Vec<CheckOutcome>> = pool.install(|| {
        CHECKS
            .par_iter()
            .enumerate()
            .map(|(i, check)| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(i as u64 + 1);
                check(&ctx, &mut rng)
            })
            .collect()
    });
    let checks: Vec<CheckOutcome> = results.into_iter().flatten().collect();
    VerifyReport {
        chain: chain.name().unwrap_or("unnamed").to_string(),
        depth: tower.depth(),
        seed: cfg.seed,
        violations: checks.iter().map(|c| c.violations).sum(),
        checks,
    }
}

fn tower_checks(ctx: &Ctx<'_>, _: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    ctx.tower_report
        .checks
        .iter()
        .map(|c| {
            let name = match c.property {
                TowerProperty::Nesting => "tower.nesting",
                TowerProperty::Transversal => "tower.transversal",
                TowerProperty::Factorization => "tower.factorization",
            };
            CheckOutcome::from_failures(name, ctx.tower.depth() + 1, c.counterexample.iter().cloned().collect())
        })
        .collect()
}

fn plan_checks(ctx: &Ctx<'_>, _: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    if !ctx.tower_report.passed() {
        return vec![
            CheckOutcome::skip("plan.ratios", "tower failed verification"),
            CheckOutcome::skip("plan.z0-bound", "tower failed verification"),
        ];
    }
    let plan = match thin_summable(ctx.tower, 1) {
        Ok(p) => p,
        Err(e) => {
            return vec![
                CheckOutcome::from_failures("plan.ratios", 1, vec![e.to_string()]),
                CheckOutcome::skip("plan.z0-bound", "no plan"),
            ]
        }
    };
    let ratios = CheckOutcome::from_failures(
        "plan.ratios",
        plan.len(),
        plan.check_against(ctx.tower).err().map(|e| e.to_string()).into_iter().collect(),
    );
    let z0 = match z0_bound(ctx.tower, &plan) {
        Ok(v) if v <= ratio(1, 2) => vec![],
        Ok(v) => vec![format!("z0 bound {} exceeds 1/2", to_pq(&v))],
        Err(e) => vec![e.to_string()],
    };
    vec![ratios, CheckOutcome::from_failures("plan.z0-bound", 1, z0)]
}

/// Points checked exhaustively when the level is small, else sampled.
fn points(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng, budget: usize) -> Vec<OdometerPoint> {
    if ctx.chain.index(ctx.small) <= budget {
        OdometerPoint::enumerate(ctx.chain, ctx.small)
    } else {
        (0..budget).map(|_| random_point(ctx.chain, ctx.small, rng)).collect()
    }
}

fn stage_partition(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let pts = points(ctx, rng, 64);
    let mut bad = Vec::new();
    for z in &pts {
        let r = StageResolver::new(ctx.chain, ctx.tower, z.clone());
        for g in &ctx.window {
            let got = r.resolve(g);
            let ok = match (&got, literal_stage(ctx.chain, ctx.tower, z, g)) {
                (CellResolution::Resolved { stage, .. }, Some(s)) => *stage == s,
                (CellResolution::Unresolved { .. }, None) => true,
                _ => false,
            };
            if !ok {
                bad.push(format!("cell {g} at {:?}: {got:?}", z.cells));
            }
        }
    }
    vec![CheckOutcome::from_failures("stages.partition", pts.len() * ctx.window.len(), bad)]
}

fn stage_translation(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let kind = ctx.chain.word_kind();
    let mut bad = Vec::new();
    for _ in 0..ctx.cfg.sweep {
        let z = random_point(ctx.chain, ctx.small, rng);
        let g = random_word(kind, 12, rng);
        for v in jpartition_equivariance_check(ctx.chain, ctx.tower, &z, &g, &ctx.window) {
            bad.push(format!("translate by {g} at {:?}, cell {}", z.cells, v.cell));
        }
    }
    vec![CheckOutcome::from_failures("stages.translation", ctx.cfg.sweep, bad)]
}

fn phi_translation(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let sys = OdometerSystem::new(ctx.chain, ctx.tower, ctx.small);
    let kind = ctx.chain.word_kind();
    let mut bad = Vec::new();
    for _ in 0..ctx.cfg.sweep {
        let y = random_point(ctx.chain, ctx.small, rng);
        let h = random_word(kind, 12, rng);
        let i = rng.gen_range(0..=ctx.small);
        for cell in phi_equivariance_check(&sys, &y, &h, i, &ctx.window) {
            bad.push(format!("translate by {h}, stage {i}, at {:?}: {cell}", y.cells));
        }
    }
    vec![CheckOutcome::from_failures("phi.translation", ctx.cfg.sweep, bad)]
}

fn fiber_agreement(ctx: &Ctx<'_>, _: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let sys = OdometerSystem::new(ctx.chain, ctx.tower, ctx.small);
    let translators = ctx.tower.level(ctx.small);
    let samples = sample_extension_window(&sys, translators, &ctx.window);
    let agreement: Vec<String> = fiber_agreement_violations(&samples, &ctx.window)
        .into_iter()
        .map(|(k, g)| format!("bases agreeing to level {k} disagree at {g}"))
        .collect();
    let mut consistency = Vec::new();
    for s in &samples {
        let (bad, _) = sample_consistency(&sys, s, &ctx.window);
        consistency.extend(bad.into_iter().map(|g| format!("sample over {:?} at {g}", s.base.cells)));
    }
    vec![
        CheckOutcome::from_failures("extension.fiber-agreement", samples.len(), agreement),
        CheckOutcome::from_failures("extension.sample-consistency", samples.len(), consistency),
    ]
}

fn toeplitz_checks(ctx: &Ctx<'_>, _: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let depth = ctx.tower.depth().min(8);
    let marking = Marking::cyclic("ab").expect("two letters");
    let window = match ctx.chain.word_kind() {
        WordKind::Zd(1) => (-64..=64).map(|i| GroupWord::Zd(vec![i])).collect(),
        kind => kind.ball(if matches!(kind, WordKind::Zd(_)) { 8 } else { 4 }),
    };
    let x = match generate_toeplitz(ctx.chain, ctx.tower, &marking, depth, &window) {
        Ok(x) => x,
        Err(e) => return vec![CheckOutcome::from_failures("toeplitz.window-property", 1, vec![e.to_string()])],
    };
    let property = window_property_violations(ctx.chain, &x)
        .into_iter()
        .map(|(g, h)| format!("{g} and {h} share an orbit but differ"))
        .collect();
    let mut density = Vec::new();
    for n in 0..depth {
        let h = hole_density(ctx.chain, ctx.tower, n, depth);
        if h.holes > h.bound {
            density.push(format!("depth {n}: hole fraction {} above {}", to_pq(&h.holes), to_pq(&h.bound)));
        }
    }
    vec![
        CheckOutcome::from_failures("toeplitz.window-property", window.len(), property),
        CheckOutcome::from_failures("toeplitz.hole-density", depth, density),
    ]
}

fn metric_check(ctx: &Ctx<'_>, _: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let top = (1..=ctx.tower.depth()).take_while(|&n| ctx.chain.index(n) <= 1 << 12).last().unwrap_or(0);
    if top < 2 {
        return vec![CheckOutcome::skip("measure.metric", "chain too shallow")];
    }
    let nu = CylinderMeasure::uniform(ctx.chain, top);
    let point = CylinderMeasure::point_mass(ctx.chain, &OdometerPoint::basepoint(ctx.chain, top));
    let mut bad = Vec::new();
    let mut cases = 0;
    for n in 1..top {
        let fine = (n + 4).min(top);
        let (Ok(a), Ok(b), Ok(ba)) =
            (metric_d(ctx.chain, &nu, &point, n), metric_d(ctx.chain, &nu, &point, fine), metric_d(ctx.chain, &point, &nu, n))
        else {
            bad.push(format!("metric at level {n} failed"));
            continue;
        };
        cases += 1;
        if !a.contains(&b.partial) {
            bad.push(format!("level {fine} partial {} escapes the level-{n} interval", to_pq(&b.partial)));
        }
        if a != ba {
            bad.push(format!("metric at level {n} is not symmetric"));
        }
    }
    vec![CheckOutcome::from_failures("measure.metric", cases, bad)]
}

fn averaging_check(ctx: &Ctx<'_>, rng: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    if !ctx.chain.is_normal() {
        return vec![CheckOutcome::skip("measure.averaging", "uniform marginals need normal subgroups")];
    }
    let n = (1..=ctx.tower.depth()).take_while(|&n| ctx.chain.index(n) <= 256).last().unwrap_or(0);
    if n == 0 {
        return vec![CheckOutcome::skip("measure.averaging", "chain too shallow")];
    }
    let mut inputs = vec![CylinderMeasure::point_mass(ctx.chain, &OdometerPoint::basepoint(ctx.chain, n))];
    for _ in 0..4 {
        let raw: Vec<i64> = (0..ctx.chain.index(n)).map(|_| rng.gen_range(0..16)).collect();
        let total: i64 = raw.iter().sum::<i64>().max(1);
        let weights = if raw.iter().all(|&w| w == 0) {
            CylinderMeasure::uniform(ctx.chain, n).weights().to_vec()
        } else {
            raw.iter().map(|&w| ratio(w, total)).collect()
        };
        inputs.push(CylinderMeasure::new(ctx.chain, n, weights).expect("weights sum to one"));
    }
    let mut bad = Vec::new();
    for (i, lambda) in inputs.iter().enumerate() {
        match average_measure(ctx.chain, ctx.tower, lambda, n) {
            Ok(mu) => {
                let off = nonuniform_marginals(ctx.chain, &mu, n);
                if !off.is_empty() {
                    bad.push(format!("input {i}: marginals at levels {off:?} are not uniform"));
                }
            }
            Err(e) => bad.push(e.to_string()),
        }
    }
    vec![CheckOutcome::from_failures("measure.averaging", inputs.len(), bad)]
}

/// Work budget for one bounds row: odometer points times window cells.
const ROW_BUDGET: usize = 1 << 18;

fn bounds_check(ctx: &Ctx<'_>, _: &mut ChaCha8Rng) -> Vec<CheckOutcome> {
    let Ok(plan) = thin_summable(ctx.tower, 1) else {
        return vec![CheckOutcome::skip("measure.bounds", "no thinning plan")];
    };
    let Ok((thinned, thinned_tower)) = ctx.tower.restrict(ctx.chain, &plan) else {
        return vec![CheckOutcome::skip("measure.bounds", "plan does not restrict")];
    };
    let len = plan.len();
    let mut bad = Vec::new();
    let mut cases = 0;
    for horizon in 1..=len {
        let points = thinned.index(horizon);
        if points > ENUMERATION_LIMIT {
            continue;
        }
        for n in 0..=len {
            if points * thinned_tower.size(n) > ROW_BUDGET {
                continue;
            }
            for k in 0..=len + 1 {
                match bounds_chain_row(&thinned, &thinned_tower, ctx.tower, &plan, n, k, horizon) {
                    Ok(row) => {
                        cases += 1;
                        if !row.holds {
                            bad.push(format!(
                                "n={n} k={k} M={horizon}: empirical {} total {} ceiling {}",
                                row.empirical, row.total, row.ceiling
                            ));
                        }
                    }
                    Err(e) => bad.push(e.to_string()),
                }
            }
        }
    }
    vec![CheckOutcome::from_failures("measure.bounds", cases, bad)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dihedral_chain, dyadic_chain, s4_nonnormal_chain};

    fn run(chain: &QuotientChain, jobs: usize) -> VerifyReport {
        let t = TransversalTower::build(chain, chain.depth()).unwrap();
        run_verify_all(chain, &t, &VerifyConfig { jobs, sweep: 50, ..Default::default() })
    }

    #[test]
    fn small_chains_pass() {
        for c in [dyadic_chain(8), dihedral_chain(4)] {
            let r = run(&c, 2);
            assert!(r.passed(), "{}", r.to_json());
            assert!(r.checks.iter().all(|c| c.status == Status::Pass), "{}", r.to_json());
        }
    }

    #[test]
    fn non_normal_chain_skips_averaging() {
        let r = run(&s4_nonnormal_chain(), 1);
        assert!(r.passed(), "{}", r.to_json());
        let avg = r.checks.iter().find(|c| c.name == "measure.averaging").unwrap();
        assert_eq!(avg.status, Status::Skip);
    }

    #[test]
    fn reports_do_not_depend_on_workers() {
        let c = dyadic_chain(6);
        assert_eq!(run(&c, 1).to_json(), run(&c, 4).to_json());
    }

    #[test]
    fn literal_stage_matches_ruler() {
        let c = dyadic_chain(5);
        let t = TransversalTower::build(&c, 5).unwrap();
        let e = OdometerPoint::basepoint(&c, 5);
        let got: Vec<Option<usize>> =
            (0..8).map(|i| literal_stage(&c, &t, &e, &GroupWord::Zd(vec![i]))).collect();
        assert_eq!(got, [Some(1), Some(2), Some(1), Some(3), Some(1), Some(2), Some(1), Some(4)]);
    }

    #[test]
    fn random_free_words_are_reduced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let kind = WordKind::Free(2);
        for _ in 0..200 {
            let w = random_word(kind, 6, &mut rng);
            kind.check(&w).unwrap();
        }
    }
}
