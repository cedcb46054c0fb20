//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output; exits non-zero if any
//! criterion fails.

use std::collections::{HashSet, VecDeque};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rabuild::coxeter::{EndsClass, Partition};
use rabuild::verify::{ends_ball_heuristic, residue_tree_shape, run_check, CheckConfig, CheckReport};
use rabuild::{BallCenter, BuildingSpec, Chamber, TypeSet};
use rabuild_cli::SpecFile;

// Pinned thresholds.
const NORMAL_FORM_MAX_LEN: usize = 6;
const NORMAL_FORM_BUDGET: Duration = Duration::from_secs(60);
const END_TO_END_BUDGET: Duration = Duration::from_secs(300);
/// Every property criterion tolerates exactly this many counterexamples.
const ALLOWED_COUNTEREXAMPLES: u64 = 0;
const DIHEDRAL_RADIUS: usize = 4;
const PENTAGON_RADIUS: usize = 3;
const SPLITTING_RADIUS: usize = 3;
const VALIDITY_TRIALS: usize = 500;
const FIX_DECOMPOSITION_TRIALS: usize = 100;
const STRONG_TRANSITIVITY_TRIALS: usize = 50;
const STRONG_TRANSITIVITY_RADIUS: usize = 3;
const PEELING_TRIALS: usize = 100;
const COMMUTATOR_TRIALS: usize = 50;
const GEOMETRY_TRIALS: usize = 500;
const SEED: u64 = 1;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.toml"))
}

fn fixture(name: &str) -> BuildingSpec {
    SpecFile::load(&fixture_path(name)).and_then(|f| f.building()).expect("bundled fixture")
}

struct Fixture {
    name: &'static str,
    spec: BuildingSpec,
    radius: usize,
}

fn fixtures() -> [Fixture; 3] {
    [
        Fixture { name: "dihedral", spec: fixture("dihedral"), radius: DIHEDRAL_RADIUS },
        Fixture { name: "pentagon", spec: fixture("pentagon"), radius: PENTAGON_RADIUS },
        Fixture { name: "splitting", spec: fixture("splitting"), radius: SPLITTING_RADIUS },
    ]
}

/// Runs `check` and returns a failure message unless it passes with no
/// counterexamples.
fn clean(check: &str, f: &Fixture, radius: usize, trials: usize) -> Result<CheckReport, String> {
    let cfg = CheckConfig::new(f.spec.clone(), radius, trials, SEED).map_err(|e| e.to_string())?;
    let r = run_check(check, &cfg).map_err(|e| format!("{check} on {}: {e}", f.name))?;
    if !r.passed() || r.counterexamples > ALLOWED_COUNTEREXAMPLES {
        let reason = r.counterexample.as_ref().map(|c| c.to_string()).unwrap_or_default();
        return Err(format!("{check} on {}: {:?}, {} counterexample(s) {reason}", f.name, r.status, r.counterexamples));
    }
    Ok(r)
}

// ---- criterion 1: normal forms against a rewriting closure ----------------

type Word = Vec<(u8, u8)>;

/// Least word, by length and then lexicographically, among everything
/// reachable from `w` by swapping adjacent commuting syllables and merging
/// adjacent syllables of equal type. Merges only shorten, so the search is
/// finite.
fn closure_min(w: Word, q: u8, commute: &impl Fn(u8, u8) -> bool) -> Word {
    let mut seen: HashSet<Word> = HashSet::from([w.clone()]);
    let mut queue = VecDeque::from([w.clone()]);
    let mut best = w;
    while let Some(v) = queue.pop_front() {
        if (v.len(), &v) < (best.len(), &best) {
            best = v.clone();
        }
        for k in 0..v.len().saturating_sub(1) {
            let (a, b) = (v[k], v[k + 1]);
            let next = if a.0 == b.0 {
                let mut u = v.clone();
                let e = (a.1 + b.1) % q;
                u.remove(k + 1);
                if e == 0 {
                    u.remove(k);
                } else {
                    u[k].1 = e;
                }
                u
            } else if commute(a.0, b.0) {
                let mut u = v.clone();
                u.swap(k, k + 1);
                u
            } else {
                continue;
            };
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    best
}

/// Compares `normalize` with the closure on every syllable word up to the
/// length bound. The closure of a prefix's least word extended by one
/// syllable reaches the same element, so prefixes are reused.
fn normal_forms_agree(spec: &BuildingSpec) -> Result<usize, String> {
    let d = spec.diagram();
    let q = spec.thickness(0) as u8;
    assert!((0..spec.rank()).all(|i| spec.thickness(i) as u8 == q), "uniform thickness");
    let commute = |a: u8, b: u8| d.commute(a as usize, b as usize);
    let letters: Vec<(u8, u8)> =
        (0..spec.rank() as u8).flat_map(|t| (1..q).map(move |e| (t, e))).collect();
    let mut checked = 0;
    let mut stack: Vec<(Word, Word)> = vec![(Vec::new(), Vec::new())];
    while let Some((word, least)) = stack.pop() {
        let input: Vec<(usize, u32)> = word.iter().map(|&(t, e)| (t as usize, e as u32)).collect();
        let nf = spec.normalize(&input).map_err(|e| e.to_string())?;
        let got: Word = nf.syllables().iter().map(|s| (s.ty, s.exp as u8)).collect();
        if got != least {
            return Err(format!("{word:?}: normalize gives {got:?}, closure gives {least:?}"));
        }
        checked += 1;
        if word.len() < NORMAL_FORM_MAX_LEN {
            for &s in &letters {
                let mut w = word.clone();
                w.push(s);
                let mut l = least.clone();
                l.push(s);
                stack.push((w, closure_min(l, q, &commute)));
            }
        }
    }
    Ok(checked)
}

fn criterion_1() -> Result<String, String> {
    let start = Instant::now();
    let mut counts = Vec::new();
    for name in ["dihedral", "pentagon"] {
        counts.push(format!("{name} {}", normal_forms_agree(&fixture(name))?));
    }
    let t = start.elapsed();
    if t > NORMAL_FORM_BUDGET {
        return Err(format!("took {t:?}, budget {NORMAL_FORM_BUDGET:?}"));
    }
    Ok(format!("words of length <= {NORMAL_FORM_MAX_LEN}: {} agree, {:.1}s", counts.join(", "), t.as_secs_f64()))
}

// ---- criteria 2-10 ---------------------------------------------------------

fn geometry_checks(checks: &[&str]) -> Result<String, String> {
    let mut parts = Vec::new();
    for f in fixtures().iter().take(2) {
        for check in checks {
            let r = clean(check, f, f.radius, GEOMETRY_TRIALS)?;
            parts.push(format!("{} {check} {}", f.name, r.instances));
        }
    }
    Ok(parts.join(", "))
}

fn criterion_2() -> Result<String, String> {
    geometry_checks(&["gate"])
}

fn criterion_3() -> Result<String, String> {
    geometry_checks(&["parallel_criterion", "parallel_equivalence"])
}

fn criterion_4() -> Result<String, String> {
    geometry_checks(&["wing_convexity", "wing_inclusion", "concat_gallery", "balls_in_wings", "partition_into_wings"])
}

fn criterion_5() -> Result<String, String> {
    let [dih, pent, split] = fixtures();
    let mut parts = Vec::new();
    for f in [&dih, &pent] {
        for check in ["panel_extension", "fix_product_decomposition", "strong_transitivity", "peeling", "commutator"] {
            let r = clean(check, f, f.radius, VALIDITY_TRIALS)?;
            parts.push(format!("{} {check} {}", f.name, r.instances));
        }
    }
    // splitting generators exist only where a partition does
    for f in [&dih, &split] {
        let r = clean("local_splitting", f, f.radius, VALIDITY_TRIALS)?;
        parts.push(format!("{} local_splitting {}", f.name, r.instances));
    }
    Ok(format!("{VALIDITY_TRIALS} seeds per kind: {}", parts.join(", ")))
}

fn criterion_6() -> Result<String, String> {
    let mut parts = Vec::new();
    for f in fixtures().iter().take(2) {
        let r = clean("fix_product_decomposition", f, f.radius, FIX_DECOMPOSITION_TRIALS)?;
        parts.push(format!("{} {}", f.name, r.instances));
    }
    Ok(format!("{FIX_DECOMPOSITION_TRIALS} seeds: {}", parts.join(", ")))
}

fn criterion_7() -> Result<String, String> {
    let mut parts = Vec::new();
    for f in fixtures().iter().take(2) {
        let r = clean("strong_transitivity", f, STRONG_TRANSITIVITY_RADIUS, STRONG_TRANSITIVITY_TRIALS)?;
        parts.push(format!("{} {}", f.name, r.instances));
    }
    Ok(format!("{STRONG_TRANSITIVITY_TRIALS} fragment pairs at radius {STRONG_TRANSITIVITY_RADIUS}: {}", parts.join(", ")))
}

fn criterion_8() -> Result<String, String> {
    let mut parts = Vec::new();
    for f in fixtures().iter().take(2) {
        let peel = clean("peeling", f, f.radius, PEELING_TRIALS)?;
        let approx = clean("fix_generators", f, f.radius, PEELING_TRIALS)?;
        parts.push(format!("{} peel {} approximate {}", f.name, peel.instances, approx.instances));
    }
    Ok(format!("{PEELING_TRIALS} seeds: {}", parts.join(", ")))
}

fn criterion_9() -> Result<String, String> {
    let [dih, ..] = fixtures();
    let r = clean("commutator", &dih, DIHEDRAL_RADIUS, COMMUTATOR_TRIALS)?;
    Ok(format!("{COMMUTATOR_TRIALS} seeds on dihedral radius {DIHEDRAL_RADIUS}: {} cases", r.instances))
}

fn criterion_10() -> Result<String, String> {
    let [dih, pent, split] = fixtures();
    let class = |f: &Fixture| f.spec.diagram().ends_classify().map_err(|e| e.to_string());
    let mut parts = Vec::new();
    for f in [&dih, &split] {
        let Ok(EndsClass::Partition(_)) = class(f) else {
            return Err(format!("{} is not classified as splitting", f.name));
        };
        let tree = clean("tree_decomposition", f, f.radius, 1)?;
        if tree.instances == 0 {
            return Err(format!("tree_decomposition did not run on {}", f.name));
        }
        let local = clean("local_splitting", f, f.radius, VALIDITY_TRIALS)?;
        parts.push(format!("{} partition, tree with {} edges, {} commuting pairs", f.name, tree.instances, local.instances));
    }
    if class(&pent)? != EndsClass::OneEnded {
        return Err("pentagon is not classified one-ended".into());
    }
    // one-ended: nothing to decompose, and a forced split of the generators
    // does not give a tree
    let tree = clean("tree_decomposition", &pent, pent.radius, 1)?;
    if tree.instances != 0 {
        return Err("tree_decomposition produced a tree on the pentagon".into());
    }
    let forced = Partition { i0: TypeSet::EMPTY, i1: [0, 1].into_iter().collect(), i2: [2, 3, 4].into_iter().collect() };
    let ball = pent.spec.ball(BallCenter::Chamber(Chamber::identity()), pent.radius, 1 << 20).map_err(|e| e.to_string())?;
    if residue_tree_shape(&pent.spec, &forced, &ball).is_tree() {
        return Err("forced pentagon split yields a tree".into());
    }
    if !ends_ball_heuristic(&pent.spec, &Chamber::identity(), 1, 4).map_err(|e| e.to_string())? {
        return Err("heuristic false on the pentagon at (1, 4)".into());
    }
    parts.push("pentagon one-ended, no tree, heuristic true at (1, 4)".into());
    Ok(parts.join("; "))
}

// ---- criterion 11 ----------------------------------------------------------

fn criterion_11() -> Result<String, String> {
    let start = Instant::now();
    let mut parts = Vec::new();
    for name in ["dihedral", "pentagon", "splitting"] {
        let t = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_rabuild"))
            .args(["check", "--suite", "all"])
            .arg(fixture_path(name))
            .output()
            .map_err(|e| e.to_string())?;
        if out.status.code() != Some(0) {
            return Err(format!("{name}: exit {:?}\n{}", out.status.code(), String::from_utf8_lossy(&out.stdout)));
        }
        parts.push(format!("{name} {:.1}s", t.elapsed().as_secs_f64()));
    }
    let total = start.elapsed();
    if total > END_TO_END_BUDGET {
        return Err(format!("took {total:?}, budget {END_TO_END_BUDGET:?}"));
    }
    Ok(format!("exit 0 on {}; total {:.1}s", parts.join(", "), total.as_secs_f64()))
}

fn main() {
    // libtest-style arguments (filters, --nocapture, ...) are ignored
    let criteria: [(&str, fn() -> Result<String, String>); 11] = [
        ("normal-form soundness", criterion_1),
        ("gate property", criterion_2),
        ("parallelism criterion and equivalence", criterion_3),
        ("wing suite", criterion_4),
        ("automorphism validity", criterion_5),
        ("fixator decomposition", criterion_6),
        ("strong transitivity", criterion_7),
        ("peeling", criterion_8),
        ("commutator", criterion_9),
        ("ends trichotomy", criterion_10),
        ("end-to-end check suites", criterion_11),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2} {name} ({secs:.1}s): {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name} ({secs:.1}s): {why}", k + 1);
            }
        }
    }
    println!("{}/{} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
