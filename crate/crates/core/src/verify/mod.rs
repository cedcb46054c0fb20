//! Named, seeded property checks. Each check pairs the operation under test
//! with a brute-force oracle and reports the first counterexample in a form
//! that [`replay`] can re-run.

mod autos_checks;
mod ends;
mod geometry_checks;
pub(crate) mod oracle;

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chambers::{BuildingSpec, Chamber};
use crate::error::{Error, Result};
use crate::geometry::{Ball, BallCenter, Residue, DEFAULT_BALL_CAP};

pub use ends::{ends_ball_heuristic, has_partition_brute_force, residue_tree_edges, residue_tree_shape, TreeShape};

/// Registered checks, in report order.
pub const CHECKS: [&str; 21] = [
    "gate",
    "nested_proj",
    "product_residue",
    "constant_distance",
    "parallel_criterion",
    "parallel_equivalence",
    "wing_convexity",
    "wing_inclusion",
    "concat_gallery",
    "balls_in_wings",
    "partition_into_wings",
    "panel_extension",
    "fix_product_decomposition",
    "nonabelian",
    "strong_transitivity",
    "commutator",
    "peeling",
    "fix_generators",
    "ends_consistency",
    "tree_decomposition",
    "local_splitting",
];

/// Deliberate defects for exercising the harness itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Projections onto residues of positive rank are moved one step off.
    CorruptProjection,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest ball any check may enumerate.
    pub ball_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { ball_cap: DEFAULT_BALL_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub spec: BuildingSpec,
    pub radius: usize,
    pub trials: usize,
    pub seed: u64,
    pub limits: Limits,
    pub fault: Option<Fault>,
}

impl CheckConfig {
    pub fn new(spec: BuildingSpec, radius: usize, trials: usize, seed: u64) -> Result<Self> {
        if radius == 0 {
            return Err(Error::BadConfig("radius must be at least 1".into()));
        }
        if trials == 0 {
            return Err(Error::BadConfig("trials must be at least 1".into()));
        }
        Ok(CheckConfig { spec, radius, trials, seed, limits: Limits::default(), fault: None })
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The check hit a resource cap before finishing.
    ResourceLimit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub status: Status,
    pub instances: u64,
    pub counterexamples: u64,
    /// `{"instance": ..., "reason": ...}` for the first failure.
    pub counterexample: Option<Value>,
    pub note: Option<String>,
    pub elapsed_ms: u64,
    pub seed: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Outcome of one instance: the number of elementary cases covered, or the
/// reason it failed.
pub(crate) type Verdict = std::result::Result<u64, String>;

pub(crate) trait Check {
    type Inst: Serialize + DeserializeOwned;

    fn instances(&self, ctx: &Ctx, rng: &mut ChaCha8Rng) -> Result<Vec<Self::Inst>>;

    fn eval(&self, ctx: &Ctx, inst: &Self::Inst) -> Result<Verdict>;

    fn note(&self, _ctx: &Ctx) -> Result<Option<String>> {
        Ok(None)
    }
}

/// Shared state for one check run.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a CheckConfig,
    pub spec: &'a BuildingSpec,
    pub center: Chamber,
    pub ball: Ball,
    residues: OnceLock<Vec<(Residue, Vec<Chamber>)>>,
}

impl<'a> Ctx<'a> {
    fn new(cfg: &'a CheckConfig) -> Result<Self> {
        let center = Chamber::identity();
        let ball = cfg.spec.ball(BallCenter::Chamber(center.clone()), cfg.radius, cfg.limits.ball_cap)?;
        Ok(Ctx { cfg, spec: &cfg.spec, center, ball, residues: OnceLock::new() })
    }

    /// Projection as seen by the checks; the only place a fault is injected.
    pub fn proj(&self, r: &Residue, c: &Chamber) -> Chamber {
        let p = self.spec.proj(r, c);
        match self.cfg.fault {
            Some(Fault::CorruptProjection) if r.rank() > 0 => {
                let t = r.types().first().expect("positive rank");
                self.spec.step(&p, t, 1)
            }
            _ => p,
        }
    }

    pub fn ball_around(&self, c: &Chamber, n: usize) -> Result<Ball> {
        self.spec.ball(BallCenter::Chamber(c.clone()), n, self.cfg.limits.ball_cap)
    }

    pub fn residue_ball(&self, r: &Residue, n: usize) -> Result<Ball> {
        self.spec.ball(BallCenter::Residue(r.clone()), n, self.cfg.limits.ball_cap)
    }

    /// Spherical residues of positive rank lying entirely in the ball, with
    /// their chambers enumerated by the oracle.
    pub fn residues(&self) -> &[(Residue, Vec<Chamber>)] {
        self.residues.get_or_init(|| {
            let d = self.spec.diagram();
            let types: Vec<_> =
                d.all_types().subsets().filter(|j| !j.is_empty() && d.is_clique(*j)).collect();
            let mut seen: HashMap<Residue, Vec<Chamber>> = HashMap::new();
            for x in self.ball.members() {
                for &j in &types {
                    let r = self.spec.res(x, j);
                    if seen.contains_key(&r) {
                        continue;
                    }
                    let members = oracle::span(self.spec, x, j);
                    seen.insert(r, members);
                }
            }
            let mut out: Vec<_> = seen
                .into_iter()
                .filter(|(_, m)| m.iter().all(|x| self.ball.contains(x)))
                .collect();
            out.sort();
            out
        })
    }

    /// Chambers at most `r` from the center.
    pub fn near(&self, r: usize) -> &[Chamber] {
        self.ball.within(r.min(self.ball.radius()))
    }

    /// Is the ball small enough to sweep every instance rather than sample?
    pub fn exhaustive(&self) -> bool {
        self.ball.len() <= EXHAUSTIVE_BALL
    }
}

/// Balls up to this size are swept exhaustively by the sampling checks.
pub(crate) const EXHAUSTIVE_BALL: usize = 64;

fn check_index(name: &str) -> Result<usize> {
    CHECKS.iter().position(|&n| n == name).ok_or_else(|| Error::UnknownCheck(name.to_string()))
}

struct Tally {
    instances: u64,
    counterexamples: u64,
    first: Option<Value>,
}

fn run_instances<C: Check>(check: &C, ctx: &Ctx, insts: &[C::Inst]) -> Result<Tally> {
    let mut tally = Tally { instances: 0, counterexamples: 0, first: None };
    for inst in insts {
        let verdict = match check.eval(ctx, inst) {
            Ok(v) => v,
            Err(e @ Error::ResourceLimit { .. }) => return Err(e),
            Err(e) => Err(format!("error: {e}")),
        };
        match verdict {
            Ok(n) => tally.instances += n,
            Err(reason) => {
                tally.instances += 1;
                tally.counterexamples += 1;
                if tally.first.is_none() {
                    tally.first = Some(json!({ "instance": inst, "reason": reason }));
                }
            }
        }
    }
    Ok(tally)
}

fn run_typed<C: Check>(check: &C, ctx: &Ctx, stream: u64, directed: Option<&Value>) -> Result<(Tally, Option<String>)> {
    let insts = match directed {
        Some(v) => {
            let inst = v.get("instance").unwrap_or(v);
            let inst: C::Inst = serde_json::from_value(inst.clone())
                .map_err(|e| Error::BadConfig(format!("counterexample does not match the check: {e}")))?;
            vec![inst]
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
            rng.set_stream(stream);
            check.instances(ctx, &mut rng)?
        }
    };
    let tally = run_instances(check, ctx, &insts)?;
    let note = if directed.is_none() { check.note(ctx)? } else { None };
    Ok((tally, note))
}

fn dispatch(index: usize, ctx: &Ctx, directed: Option<&Value>) -> Result<(Tally, Option<String>)> {
    use autos_checks as a;
    use geometry_checks as g;
    let s = index as u64;
    match CHECKS[index] {
        "gate" => run_typed(&g::Gate, ctx, s, directed),
        "nested_proj" => run_typed(&g::NestedProj, ctx, s, directed),
        "product_residue" => run_typed(&g::ProductResidue, ctx, s, directed),
        "constant_distance" => run_typed(&g::ConstantDistance, ctx, s, directed),
        "parallel_criterion" => run_typed(&g::ParallelCriterion, ctx, s, directed),
        "parallel_equivalence" => run_typed(&g::ParallelEquivalence, ctx, s, directed),
        "wing_convexity" => run_typed(&g::WingConvexity, ctx, s, directed),
        "wing_inclusion" => run_typed(&g::WingInclusion, ctx, s, directed),
        "concat_gallery" => run_typed(&g::ConcatGallery, ctx, s, directed),
        "balls_in_wings" => run_typed(&g::BallsInWings, ctx, s, directed),
        "partition_into_wings" => run_typed(&g::PartitionIntoWings, ctx, s, directed),
        "panel_extension" => run_typed(&a::PanelExtension, ctx, s, directed),
        "fix_product_decomposition" => run_typed(&a::FixDecomposition, ctx, s, directed),
        "nonabelian" => run_typed(&a::NonAbelian, ctx, s, directed),
        "strong_transitivity" => run_typed(&a::StrongTransitivity, ctx, s, directed),
        "commutator" => run_typed(&a::Commutator, ctx, s, directed),
        "peeling" => run_typed(&a::Peeling, ctx, s, directed),
        "fix_generators" => run_typed(&a::FixGenerators, ctx, s, directed),
        "ends_consistency" => run_typed(&ends::EndsConsistency, ctx, s, directed),
        "tree_decomposition" => run_typed(&ends::TreeDecomposition, ctx, s, directed),
        "local_splitting" => run_typed(&a::LocalSplitting, ctx, s, directed),
        other => unreachable!("unregistered check {other}"),
    }
}

fn run_inner(name: &str, cfg: &CheckConfig, directed: Option<&Value>) -> Result<CheckReport> {
    let index = check_index(name)?;
    let start = Instant::now();
    let ctx = Ctx::new(cfg)?;
    let (tally, note) = dispatch(index, &ctx, directed)?;
    Ok(CheckReport {
        name: name.to_string(),
        status: if tally.counterexamples == 0 { Status::Pass } else { Status::Fail },
        instances: tally.instances,
        counterexamples: tally.counterexamples,
        counterexample: tally.first,
        note,
        elapsed_ms: start.elapsed().as_millis() as u64,
        seed: cfg.seed,
    })
}

/// Runs one registered check.
pub fn run_check(name: &str, cfg: &CheckConfig) -> Result<CheckReport> {
    run_inner(name, cfg, None)
}

/// Re-runs a check on the single instance recorded in a counterexample.
pub fn replay(name: &str, cfg: &CheckConfig, counterexample: &Value) -> Result<CheckReport> {
    run_inner(name, cfg, Some(counterexample))
}

/// Every registered check, in [`CHECKS`] order. A check stopped by a
/// resource cap is reported with [`Status::ResourceLimit`].
pub fn run_all(cfg: &CheckConfig) -> Vec<CheckReport> {
    CHECKS
        .iter()
        .map(|name| {
            let start = Instant::now();
            run_check(name, cfg).unwrap_or_else(|e| {
                let limited = matches!(e, Error::ResourceLimit { .. });
                CheckReport {
                    name: name.to_string(),
                    status: if limited { Status::ResourceLimit } else { Status::Fail },
                    instances: 0,
                    counterexamples: u64::from(!limited),
                    // failed before any instance existed: nothing to replay
                    counterexample: (!limited).then(|| json!({ "instance": null, "reason": e.to_string() })),
                    note: Some(e.to_string()),
                    elapsed_ms: start.elapsed().as_millis() as u64,
                    seed: cfg.seed,
                }
            })
        })
        .collect()
}

/// Draws `count` instance seeds.
pub(crate) fn seeds(rng: &mut ChaCha8Rng, count: usize) -> Vec<u64> {
    (0..count).map(|_| rng.next_u64()).collect()
}
