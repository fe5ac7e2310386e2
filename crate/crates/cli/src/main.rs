mod export;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use odoforge_core::cells::{CellResolution, StageResolver};
use odoforge_core::extension::{
    bounded_minimality_search, clopen_code, fiber_product, phi_approx, phi_stage, sample_extension_window,
    FiberSample, OdometerSystem, PhiValue, SearchOutcome, SymbolicWindow, WindowPredicate,
};
use odoforge_core::group::{preset, GroupWord, QuotientChain, PRESETS};
use odoforge_core::measure::{
    average_measure, empirical_unresolved_fraction, metric_d, nonuniform_marginals, vkn_bound, CylinderMeasure,
};
use odoforge_core::odometer::{act, cell_measure, ClopenCell, OdometerPoint};
use odoforge_core::rational::{pow2_inv, to_pq};
use odoforge_core::toeplitz::{
    essential_test, per_sets, EssentialVerdict, FactorMap, Marking, Symbol, ToeplitzArray,
};
use odoforge_core::tower::{thin_summable, verify_tower, z0_bound, PlanFile, ThinningPlan, TransversalTower};
use odoforge_core::verify::{run_verify_all, VerifyConfig, DEFAULT_SEED};
use odoforge_core::window::Window;
use serde_json::{json, Value};

use export::{export_window, pgm, pretty, Format};

#[derive(Parser)]
#[command(name = "odoforge", version, about = "Finite-depth odometers, transversal towers, Toeplitz windows and exact measure bounds")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Opts {
    /// Chain JSON file.
    #[arg(long, global = true)]
    chain: Option<PathBuf>,
    /// Built-in chain instead of a file (dyadic, z2, dihedral, s4, s4-nonnormal).
    #[arg(long, global = true, conflicts_with = "chain")]
    preset: Option<String>,
    /// Tower JSON file; built from the chain when absent.
    #[arg(long, global = true)]
    tower: Option<PathBuf>,
    /// Thinning plan JSON file; greedy when absent.
    #[arg(long, global = true)]
    plan: Option<PathBuf>,
    /// Tower and generation depth; defaults to the chain depth.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Window specification: `a..b`, `a..b,c..d`, `ball:R` or `w1;w2;...`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// Word-length radius for searches and essential-period tests.
    #[arg(long, global = true, default_value_t = 4)]
    radius: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for `verify all`.
    #[arg(long, global = true, env = "ODOFORGE_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Subgroup chains: presets, summary, conjugation.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Odometer cells and the translation action.
    #[command(subcommand)]
    Odometer(OdometerCmd),
    /// Transversal towers and thinning plans.
    #[command(subcommand)]
    Tower(TowerCmd),
    /// Stage-marked Toeplitz windows and their period structure.
    #[command(subcommand)]
    Toeplitz(ToeplitzCmd),
    /// Capture stages, the staged extension maps and their samples.
    #[command(subcommand)]
    Extension(ExtensionCmd),
    /// Exact metric, averaging and bound computations.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// The full invariant corpus.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum ChainCmd {
    /// Print a built-in chain as JSON.
    Preset { name: String },
    /// Indices, backend and normality.
    Info,
    /// The chain `z_n Γ_n z_n^{-1}` for an odometer point `z`.
    Conjugate {
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand)]
enum OdometerCmd {
    /// Cells of level `n` with labels and measures.
    Cells {
        #[arg(long)]
        level: usize,
    },
    /// `g·z` for a point given as comma separated cell ids.
    Act {
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long)]
        point: String,
    },
}

#[derive(Subcommand)]
enum TowerCmd {
    /// Build `D_0..D_depth` with factorization witnesses.
    Build,
    /// Recheck nesting, transversal and factorization; exit 1 on failure.
    Verify,
    /// Greedy thinning plan with its z0 bound.
    Thin {
        #[arg(long, default_value_t = 1)]
        required: usize,
    },
}

#[derive(Args, Clone)]
struct MarkingArgs {
    /// Letters assigned cyclically to stages 1, 2, ...
    #[arg(long, default_value = "ab")]
    marking: String,
    /// Use `marking` literally, one letter per stage.
    #[arg(long)]
    explicit: bool,
}

impl MarkingArgs {
    fn marking(&self) -> Result<Marking> {
        Ok(if self.explicit { Marking::explicit(&self.marking)? } else { Marking::cyclic(&self.marking)? })
    }
}

#[derive(Subcommand)]
enum ToeplitzCmd {
    /// The window of `t·x`.
    Window {
        #[command(flatten)]
        marking: MarkingArgs,
        #[arg(long, allow_hyphen_values = true)]
        translate: Option<String>,
    },
    /// Window-relative period sets at a level.
    Periods {
        #[command(flatten)]
        marking: MarkingArgs,
        #[arg(long)]
        level: usize,
    },
    /// Whether the level-`n` subgroup is an essential period, within `--radius`.
    Essential {
        #[command(flatten)]
        marking: MarkingArgs,
        #[arg(long)]
        level: usize,
    },
    /// Odometer coordinates of `t·x` read from period layouts.
    Factor {
        #[command(flatten)]
        marking: MarkingArgs,
        #[arg(long, allow_hyphen_values = true)]
        translate: Option<String>,
    },
}

#[derive(Subcommand)]
enum ExtensionCmd {
    /// Capture stages of the window cells at a point.
    Resolve {
        #[arg(long)]
        point: Option<String>,
    },
    /// `φ_i` on the window at a point of the odometer.
    Phi {
        #[arg(long)]
        point: Option<String>,
        #[arg(long)]
        stage: usize,
        /// Mark cells beyond the stage as pending instead of free.
        #[arg(long)]
        approx: bool,
    },
    /// Distinct windows of `h^{-1}ψ(ē)` for `h` in `D_level`.
    Sample {
        #[arg(long)]
        level: usize,
    },
    /// A short `h` with `h^{-1}ē` agreeing with the point to level `k`.
    Search {
        #[arg(long)]
        point: String,
        #[arg(long)]
        k: usize,
    },
    /// Codes a Toeplitz window by the symbol at the identity, holes last.
    Code {
        #[command(flatten)]
        marking: MarkingArgs,
    },
    /// Pairs Toeplitz and odometer samples over `D_level` with matching bases to level `k`.
    Fiber {
        #[command(flatten)]
        marking: MarkingArgs,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Truncated metric between two measures: `uniform` or `point:CSV`.
    Distance {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value = "uniform")]
        first: String,
        #[arg(long, default_value = "point:")]
        second: String,
    },
    /// Average of the translates of a measure over `D_level`.
    Average {
        #[arg(long)]
        level: usize,
        #[arg(long, default_value = "point:")]
        input: String,
    },
    /// Bound on the set where `φ` and `φ_k` differ on `D'_n`, in plan indices.
    Vkn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        horizon: usize,
    },
    /// Exact fraction of depth-`horizon` points where `φ` and `φ_k` differ on `D'_n`.
    Empirical {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        horizon: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Every invariant check; exit 1 when any fails.
    All {
        /// Random cases per equivariance sweep.
        #[arg(long, default_value_t = 1000)]
        sweep: usize,
    },
}

/// Rendered output and whether it records violations.
struct Outcome {
    text: String,
    ok: bool,
}

impl Outcome {
    fn json(v: Value) -> Self {
        Outcome { text: pretty(&v), ok: true }
    }
}

struct Env {
    opts: Opts,
    chain: QuotientChain,
}

impl Env {
    fn load(opts: Opts) -> Result<Self> {
        let chain = match (&opts.chain, &opts.preset) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                QuotientChain::from_json(&text)?
            }
            (None, Some(name)) => {
                preset(name, None).ok_or_else(|| anyhow!("unknown preset {name}; known: {}", PRESETS.join(", ")))?
            }
            (None, None) => bail!("pass --chain FILE or --preset NAME"),
        };
        Ok(Env { opts, chain })
    }

    fn depth(&self) -> Result<usize> {
        let d = self.opts.depth.unwrap_or(self.chain.depth());
        if d > self.chain.depth() {
            bail!("depth {d} exceeds the chain depth {}", self.chain.depth());
        }
        Ok(d)
    }

    fn tower(&self) -> Result<TransversalTower> {
        match &self.opts.tower {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(TransversalTower::from_json(&self.chain, &text)?)
            }
            None => Ok(TransversalTower::build(&self.chain, self.depth()?)?),
        }
    }

    fn plan(&self, tower: &TransversalTower) -> Result<ThinningPlan> {
        match &self.opts.plan {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                let file: PlanFile = serde_json::from_str(&text)?;
                Ok(ThinningPlan::from_file(tower, &file)?)
            }
            None => Ok(thin_summable(tower, 1)?),
        }
    }

    fn window(&self) -> Result<Window> {
        let spec = self.opts.window.as_deref().ok_or_else(|| anyhow!("--window is required"))?;
        Ok(Window::parse(self.chain.word_kind(), spec)?)
    }

    fn word(&self, s: &str) -> Result<GroupWord> {
        Ok(self.chain.parse_word(s)?)
    }

    fn point(&self, s: Option<&str>, depth: usize) -> Result<OdometerPoint> {
        match s {
            Some(s) if !s.trim().is_empty() => {
                let p = OdometerPoint::parse(&self.chain, s)?;
                if p.depth() < depth {
                    bail!("point has {} coordinates, {depth} needed", p.depth());
                }
                Ok(p.truncate(depth))
            }
            _ => Ok(OdometerPoint::basepoint(&self.chain, depth)),
        }
    }

    /// `uniform` or `point:CSV` (empty CSV for the basepoint) at `level`.
    fn measure(&self, spec: &str, level: usize) -> Result<CylinderMeasure> {
        if spec == "uniform" {
            return Ok(CylinderMeasure::uniform(&self.chain, level));
        }
        let csv = spec.strip_prefix("point:").ok_or_else(|| anyhow!("measure must be uniform or point:CSV"))?;
        Ok(CylinderMeasure::point_mass(&self.chain, &self.point(Some(csv), level)?))
    }
}

fn point_text(p: &OdometerPoint) -> String {
    p.cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn symbols_text(s: &[Symbol]) -> String {
    s.iter().map(|v| v.to_char()).collect()
}

fn resolution_json(r: &CellResolution, resolver: &StageResolver<'_>) -> Value {
    match r {
        CellResolution::Resolved { stage, .. } => {
            json!({ "stage": stage, "rep": resolver.rep_word(r).map(|w| w.to_string()) })
        }
        CellResolution::Unresolved { depth } => json!({ "unresolved": depth }),
    }
}

fn phi_json<P>(v: &PhiValue<P>, render: impl Fn(&P) -> String) -> Value {
    match v {
        PhiValue::Marker(d) => json!({ "marker": d.to_string() }),
        PhiValue::Free(p) => json!({ "free": render(p) }),
        PhiValue::Pending => json!("pending"),
    }
}

fn chain_cmd(env: &Env, cmd: &ChainCmd) -> Result<Outcome> {
    let c = &env.chain;
    match cmd {
        ChainCmd::Preset { .. } => unreachable!("handled before a chain is loaded"),
        ChainCmd::Info => Ok(Outcome::json(json!({
            "name": c.name(),
            "kind": format!("{:?}", c.word_kind()),
            "depth": c.depth(),
            "indices": (0..=c.depth()).map(|n| c.index(n)).collect::<Vec<_>>(),
            "normal": c.is_normal(),
            "side": format!("{:?}", c.side()).to_lowercase(),
        }))),
        ChainCmd::Conjugate { point } => {
            let p = OdometerPoint::parse(c, point)?;
            let tower = TransversalTower::build(c, p.depth())?;
            let z: Vec<GroupWord> = (1..=p.depth())
                .map(|n| {
                    tower.inverse_level(n).into_iter().find(|t| c.left_cell(n, t) == p.cell(n)).expect("left cell")
                })
                .collect();
            // the conjugated chain stops at the depth of the point
            let levels: Vec<usize> = (1..=p.depth()).collect();
            let truncated = c.subchain(&levels)?;
            Ok(Outcome { text: truncated.conjugate(&z)?.to_json() + "\n", ok: true })
        }
    }
}

fn odometer_cmd(env: &Env, cmd: &OdometerCmd) -> Result<Outcome> {
    let c = &env.chain;
    match cmd {
        OdometerCmd::Cells { level } => {
            if *level > c.depth() {
                bail!("level {level} exceeds the chain depth {}", c.depth());
            }
            let tower = TransversalTower::build(c, *level)?;
            let reps = tower.inverse_level(*level);
            let cells: Vec<Value> = (0..c.index(*level))
                .map(|id| {
                    let rep = reps.iter().find(|t| c.left_cell(*level, t) == id).expect("left transversal");
                    json!({
                        "id": id,
                        "label": c.cell_label(*level, id),
                        "translator": rep.to_string(),
                        "measure": to_pq(&cell_measure(c, &ClopenCell::new(*level, rep.clone()))),
                    })
                })
                .collect();
            Ok(Outcome::json(json!({ "level": level, "cells": cells })))
        }
        OdometerCmd::Act { g, point } => {
            let z = OdometerPoint::parse(c, point)?;
            let gz = act(c, &env.word(g)?, &z)?;
            Ok(Outcome::json(json!({ "point": point_text(&gz) })))
        }
    }
}

fn tower_cmd(env: &Env, cmd: &TowerCmd) -> Result<Outcome> {
    let tower = env.tower()?;
    match cmd {
        TowerCmd::Build => Ok(Outcome { text: tower.to_json() + "\n", ok: true }),
        TowerCmd::Verify => {
            let report = verify_tower(&env.chain, &tower);
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("{} failed: {}", c.property.name(), c.counterexample.as_deref().unwrap_or(""));
            }
            Ok(Outcome { text: pretty(&serde_json::to_value(&report)?), ok: report.passed() })
        }
        TowerCmd::Thin { required } => {
            let plan = thin_summable(&tower, *required)?;
            let file = plan.to_file();
            Ok(Outcome::json(json!({
                "levels": file.levels,
                "ratios": file.ratios,
                "z0": to_pq(&z0_bound(&tower, &plan)?),
                "tail": to_pq(&pow2_inv(plan.len() + 1)),
            })))
        }
    }
}

fn toeplitz_array<'a>(env: &'a Env, tower: &'a TransversalTower, m: &MarkingArgs) -> Result<ToeplitzArray<'a>> {
    Ok(ToeplitzArray::new(&env.chain, tower, m.marking()?, tower.depth())?)
}

fn toeplitz_cmd(env: &Env, cmd: &ToeplitzCmd) -> Result<Outcome> {
    let tower = env.tower()?;
    let window = env.window()?;
    let id = env.chain.identity();
    match cmd {
        ToeplitzCmd::Window { marking, translate } => {
            let x = toeplitz_array(env, &tower, marking)?;
            let t = translate.as_deref().map(|s| env.word(s)).transpose()?.unwrap_or(id);
            let w = x.window(&t, &window.cells);
            Ok(Outcome { text: export_window(&window, &w, env.opts.format)?, ok: true })
        }
        ToeplitzCmd::Periods { marking, level } => {
            let x = toeplitz_array(env, &tower, marking)?;
            let w = x.window(&id, &window.cells);
            Ok(Outcome::json(serde_json::to_value(per_sets(&env.chain, &w, *level))?))
        }
        ToeplitzCmd::Essential { marking, level } => {
            let x = toeplitz_array(env, &tower, marking)?;
            let w = x.window(&id, &window.cells);
            let verdict = match essential_test(&env.chain, &w, *level, env.opts.radius) {
                EssentialVerdict::Essential { radius, shifts_checked } => {
                    json!({ "verdict": "essential", "radius": radius, "shifts_checked": shifts_checked })
                }
                EssentialVerdict::NotEssential { witness } => json!({ "verdict": "not-essential", "witness": witness }),
                EssentialVerdict::Inconclusive => json!({ "verdict": "inconclusive" }),
            };
            Ok(Outcome::json(verdict))
        }
        ToeplitzCmd::Factor { marking, translate } => {
            let x = toeplitz_array(env, &tower, marking)?;
            let t = translate.as_deref().map(|s| env.word(s)).transpose()?.unwrap_or(id);
            let p = FactorMap::new(&x, &window.cells).factor(&x, &t)?;
            Ok(Outcome::json(json!({ "point": point_text(&p) })))
        }
    }
}

fn extension_cmd(env: &Env, cmd: &ExtensionCmd) -> Result<Outcome> {
    let tower = env.tower()?;
    let depth = tower.depth();
    let window = match cmd {
        ExtensionCmd::Search { .. } => Window::list(Vec::new()),
        _ => env.window()?,
    };
    let c = &env.chain;
    match cmd {
        ExtensionCmd::Resolve { point } => {
            let z = env.point(point.as_deref(), depth)?;
            let r = StageResolver::new(c, &tower, z);
            let verdicts: Vec<CellResolution> = window.cells.iter().map(|g| r.resolve(g)).collect();
            if env.opts.format == Format::Pgm {
                let levels: Vec<u32> = verdicts.iter().map(|v| v.stage().map_or(0, |s| s as u32)).collect();
                return Ok(Outcome { text: pgm(&window, &levels, depth as u32)?, ok: true });
            }
            let cells: Vec<Value> = window
                .cells
                .iter()
                .zip(&verdicts)
                .map(|(g, v)| json!({ "cell": g.to_string(), "verdict": resolution_json(v, &r) }))
                .collect();
            Ok(Outcome::json(json!({ "point": point_text(r.point()), "cells": cells })))
        }
        ExtensionCmd::Phi { point, stage, approx } => {
            let sys = OdometerSystem::new(c, &tower, depth);
            let y = env.point(point.as_deref(), depth)?;
            let values = if *approx {
                phi_approx(&sys, &y, *stage, &window.cells)
            } else {
                phi_stage(&sys, &y, *stage, &window.cells)
            }
            .expect("odometer points always factor");
            let cells: Vec<Value> = window
                .cells
                .iter()
                .zip(&values)
                .map(|(g, v)| json!({ "cell": g.to_string(), "value": phi_json(v, point_text) }))
                .collect();
            Ok(Outcome::json(json!({ "point": point_text(&y), "stage": stage, "cells": cells })))
        }
        ExtensionCmd::Sample { level } => {
            let sys = OdometerSystem::new(c, &tower, depth);
            let samples = sample_extension_window(&sys, tower.level((*level).min(depth)), &window.cells);
            let records: Vec<Value> = samples
                .iter()
                .map(|s| {
                    json!({
                        "base": point_text(&s.base),
                        "stages": s.stages,
                        "values": s.values.iter().map(|v| phi_json(v, point_text)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            Ok(Outcome::json(Value::Array(records)))
        }
        ExtensionCmd::Search { point, k } => {
            let sys = OdometerSystem::new(c, &tower, depth);
            let y = env.point(Some(point), depth)?;
            let found = match bounded_minimality_search(&sys, &y, *k, env.opts.radius) {
                SearchOutcome::Found(h) => json!({ "found": h.to_string() }),
                SearchOutcome::NotFound { radius } => json!({ "not_found_within": radius }),
            };
            Ok(Outcome::json(found))
        }
        ExtensionCmd::Code { marking } => {
            let x = toeplitz_array(env, &tower, marking)?;
            let w = x.window(&c.identity(), &window.cells);
            // one element per letter, then one for holes
            let mut partition: Vec<WindowPredicate> =
                x.marking().alphabet().into_iter().map(|a| WindowPredicate::symbol(c.identity(), a)).collect();
            partition.push(WindowPredicate::Symbol { at: c.identity(), symbol: Symbol::Hole });
            let coded = clopen_code(&SymbolicWindow::from(&w), &window.cells, &partition)?;
            Ok(Outcome::json(json!({
                "partition": x.marking().alphabet().into_iter().chain(['.']).collect::<String>(),
                "cells": coded.cells.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
                "codes": coded.codes,
            })))
        }
        ExtensionCmd::Fiber { marking, level, k } => {
            let x = toeplitz_array(env, &tower, marking)?;
            let factor = FactorMap::new(&x, &window.cells);
            let translators = tower.level((*level).min(depth));
            let mut toeplitz = Vec::new();
            for h in translators {
                let t = h.inverse();
                let base = factor.factor(&x, &t)?;
                toeplitz.push(FiberSample { base, window: symbols_text(&x.window(&t, &window.cells).values) });
            }
            let odometer: Vec<FiberSample<String>> = translators
                .iter()
                .map(|h| {
                    let p = OdometerPoint::of_word(c, depth, &h.inverse());
                    FiberSample { base: p.clone(), window: point_text(&p) }
                })
                .collect();
            let pairs = fiber_product(&toeplitz, &odometer, *k)?;
            let records: Vec<Value> = pairs
                .iter()
                .map(|(a, b)| json!({ "base": point_text(&a.base.truncate(*k)), "window": a.window, "point": b.window }))
                .collect();
            Ok(Outcome::json(json!({ "level": k, "pairs": records.len(), "records": records })))
        }
    }
}

fn measure_cmd(env: &Env, cmd: &MeasureCmd) -> Result<Outcome> {
    let c = &env.chain;
    match cmd {
        MeasureCmd::Distance { level, first, second } => {
            let d = metric_d(c, &env.measure(first, *level)?, &env.measure(second, *level)?, *level)?;
            Ok(Outcome::json(d.to_json()))
        }
        MeasureCmd::Average { level, input } => {
            let tower = env.tower()?;
            let mu = average_measure(c, &tower, &env.measure(input, *level)?, *level)?;
            Ok(Outcome::json(json!({
                "level": level,
                "weights": mu.weights_pq(),
                "nonuniform_levels": nonuniform_marginals(c, &mu, *level),
            })))
        }
        MeasureCmd::Vkn { n, k, horizon } => {
            let tower = env.tower()?;
            let plan = env.plan(&tower)?;
            let b = vkn_bound(&tower, &plan, *n, *k, *horizon)?;
            let mut v = b.to_json();
            v["plan"] = json!(plan.levels);
            v["within_ceiling"] = json!(b.total() <= b.ceiling);
            Ok(Outcome::json(v))
        }
        MeasureCmd::Empirical { n, k, horizon } => {
            let tower = env.tower()?;
            let plan = env.plan(&tower)?;
            let bound = vkn_bound(&tower, &plan, *n, *k, *horizon)?;
            let (thinned, thinned_tower) = tower.restrict(c, &plan)?;
            let frac = empirical_unresolved_fraction(&thinned, &thinned_tower, thinned_tower.level(*n), *k, *horizon)?;
            let holds = frac <= bound.total() && bound.total() <= bound.ceiling;
            Ok(Outcome {
                text: pretty(&json!({
                    "plan": plan.levels,
                    "empirical": to_pq(&frac),
                    "bound": bound.to_json(),
                    "holds": holds,
                })),
                ok: holds,
            })
        }
    }
}

fn verify_cmd(env: &Env, cmd: &VerifyCmd) -> Result<Outcome> {
    let VerifyCmd::All { sweep } = cmd;
    let tower = env.tower()?;
    let cfg = VerifyConfig { seed: env.opts.seed, jobs: env.opts.jobs, sweep: *sweep };
    let report = run_verify_all(&env.chain, &tower, &cfg);
    if let Some(f) = report.first_failure() {
        eprintln!("{} failed: {}", f.name, f.detail.as_deref().unwrap_or(""));
    }
    Ok(Outcome { text: report.to_json() + "\n", ok: report.passed() })
}

fn run(cli: Cli) -> Result<Outcome> {
    if let Command::Chain(ChainCmd::Preset { name }) = &cli.command {
        let chain = preset(name, cli.opts.depth)
            .ok_or_else(|| anyhow!("unknown preset {name}; known: {}", PRESETS.join(", ")))?;
        return Ok(Outcome { text: chain.to_json() + "\n", ok: true });
    }
    let env = Env::load(cli.opts.clone())?;
    match &cli.command {
        Command::Chain(c) => chain_cmd(&env, c),
        Command::Odometer(c) => odometer_cmd(&env, c),
        Command::Tower(c) => tower_cmd(&env, c),
        Command::Toeplitz(c) => toeplitz_cmd(&env, c),
        Command::Extension(c) => extension_cmd(&env, c),
        Command::Measure(c) => measure_cmd(&env, c),
        Command::Verify(c) => verify_cmd(&env, c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.opts.output.clone();
    match run(cli) {
        Ok(out) => {
            let written = match &output {
                Some(path) => std::fs::write(path, &out.text).with_context(|| format!("writing {}", path.display())),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::FAILURE;
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use odoforge_core::tower::greedy_plan;

    #[test]
    fn arguments_parse() {
        Cli::command_check();
    }

    impl Cli {
        fn command_check() {
            use clap::CommandFactory;
            Cli::command().debug_assert();
        }
    }

    #[test]
    fn greedy_plan_is_used_without_a_file() {
        let env = Env::load(Opts {
            chain: None,
            preset: Some("dyadic".into()),
            tower: None,
            plan: None,
            depth: Some(12),
            window: None,
            radius: 4,
            format: Format::Json,
            jobs: 1,
            seed: DEFAULT_SEED,
            output: None,
        })
        .unwrap();
        let t = env.tower().unwrap();
        assert_eq!(env.plan(&t).unwrap(), greedy_plan(&t));
    }
}
