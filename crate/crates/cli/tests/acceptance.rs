//! Acceptance run. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use anyhow::{anyhow, ensure, Result};
use qhom::constructions::{AuditKind, Experiment, ExperimentConfig};
use qhom::counting::{
    counting_value_in, max_nonoverlapping_copies, penalized_infimum, DefectReport, OmegaSegment,
};
use qhom::graph::{
    farey_corridor, farey_height, quasi_geodesic_constants, tree_ball, QuasiGeodesicConstants,
    Slope, TruncatedGraph, Vertex,
};
use qhom::moebius::{evaluate_word, GenId, GroupWord, Letter};
use qhom::{GeneratorSet, GraphPath};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

fn experiment() -> &'static Experiment {
    static EX: OnceLock<Experiment> = OnceLock::new();
    EX.get_or_init(|| Experiment::build(ExperimentConfig::flagship(), GeneratorSet::standard()).unwrap())
}

fn defects() -> &'static (Vec<DefectReport>, Duration) {
    static D: OnceLock<(Vec<DefectReport>, Duration)> = OnceLock::new();
    D.get_or_init(|| {
        let t = Instant::now();
        let r = experiment().defects().unwrap();
        (r, t.elapsed())
    })
}

fn defect_values() -> Vec<i64> {
    defects().0.iter().map(|r| r.d_report).collect()
}

/// A random non-backtracking walk of `len` edges inside `g`.
fn random_walk(g: &TruncatedGraph, len: usize, rng: &mut ChaCha8Rng) -> Option<GraphPath> {
    let mut ids = vec![rng.gen_range(0..g.len() as u32)];
    while ids.len() <= len {
        let last = *ids.last().unwrap();
        let prev = ids.len().checked_sub(2).map(|i| ids[i]);
        let next: Vec<u32> = g.neighbor_ids(last).iter().copied().filter(|&n| Some(n) != prev).collect();
        ids.push(*next.choose(rng)?);
    }
    Some(g.path_from_ids(&ids))
}

fn random_omega(g: &TruncatedGraph, len: usize, rng: &mut ChaCha8Rng) -> OmegaSegment {
    loop {
        if let Some(p) = random_walk(g, len, rng) {
            if let Ok(om) = OmegaSegment::new(g.model(), p) {
                return om;
            }
        }
    }
}

/// Minimum of `|α| - W·|α|_ω` over walks `x -> y` of length at most
/// `max_len`, enumerated exhaustively. Walks that can no longer reach `y`
/// within the length budget are cut.
fn exhaustive_infimum(g: &TruncatedGraph, omega: &OmegaSegment, w: u32, x: u32, y: u32, max_len: usize) -> i64 {
    let to_y = g.bfs(&[y]);
    let mut best = i64::MAX;
    let mut walk = vec![x];
    #[allow(clippy::too_many_arguments)]
    fn go(
        g: &TruncatedGraph,
        omega: &OmegaSegment,
        w: u32,
        y: u32,
        max_len: usize,
        to_y: &[u32],
        walk: &mut Vec<u32>,
        best: &mut i64,
    ) {
        let last = *walk.last().unwrap();
        let used = walk.len() - 1;
        if last == y {
            let p = g.path_from_ids(walk);
            let k = max_nonoverlapping_copies(&p, omega).unwrap() as i64;
            *best = (*best).min(used as i64 - w as i64 * k);
        }
        for &n in g.neighbor_ids(last) {
            if used + 1 + to_y[n as usize] as usize > max_len {
                continue;
            }
            walk.push(n);
            go(g, omega, w, y, max_len, to_y, walk, best);
            walk.pop();
        }
    }
    go(g, omega, w, y, max_len, &to_y, &mut walk, &mut best);
    best
}

fn oracle_equivalence() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let balls: Vec<TruncatedGraph> = (2..=5).map(|r| tree_ball(2, r)).collect::<qhom::Result<_>>()?;
    let instances = 60;
    for _ in 0..instances {
        let g = &balls[rng.gen_range(0..balls.len())];
        let omega = random_omega(g, rng.gen_range(2..=3), &mut rng);
        let (x, y) = loop {
            let (x, y) = (rng.gen_range(0..g.len() as u32), rng.gen_range(0..g.len() as u32));
            if g.bfs(&[x])[y as usize] <= 6 {
                break (x, y);
            }
        };
        let d = g.bfs(&[x])[y as usize] as usize;
        let l = omega.len();
        let bound = d * l / (l - 1);
        let fast = penalized_infimum(g.vertex(x), g.vertex(y), &omega, 1, g)? as i64;
        let slow = exhaustive_infimum(g, &omega, 1, x, y, bound);
        ensure!(fast == slow, "{} -> {} with omega {omega}: {fast} != {slow}", g.vertex(x), g.vertex(y));
    }
    let elapsed = start.elapsed();
    Ok(Outcome::new(
        elapsed <= Duration::from_secs(60),
        format!("{instances} tree instances agree, {:.1}s (limit 60s)", elapsed.as_secs_f64()),
    ))
}

fn counting_bounds() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let graphs = [tree_ball(2, 4)?, farey_height(6)];
    let per_model = 300;
    for g in &graphs {
        for _ in 0..per_model {
            let l = rng.gen_range(2..=4);
            let omega = random_omega(g, l, &mut rng);
            let w = rng.gen_range(1..l as u32);
            let (x, y) = (g.vertex(rng.gen_range(0..g.len() as u32)), g.vertex(rng.gen_range(0..g.len() as u32)));
            let c = counting_value_in(x, y, &omega, w, g)?;
            let d = g.distance(x, y)? as i64;
            ensure!(c >= 0 && c * l as i64 <= w as i64 * d, "C({x}, {y}) = {c} with |omega| = {l}, W = {w}, d = {d}");
        }
    }
    Ok(Outcome::new(true, format!("{} instances, 0 <= C <= W d/|omega| in tree and Farey models", 2 * per_model)))
}

fn defect() -> Result<Outcome> {
    let ex = experiment();
    let (reports, elapsed) = defects();
    ensure!(ex.config.w == 1, "W = {}", ex.config.w);
    for m in &ex.family {
        ensure!(m.segment.omega.len() >= 8, "|omega| = {} for {}", m.segment.omega.len(), m.label);
    }
    let mut ok = ex.config.defect_max_len <= 8;
    for r in reports {
        ok &= r.pairs >= 300 && r.excluded == 0 && r.stabilized;
    }
    let checks = ex.doubling_checks(&defect_values())?;
    let consistent = checks.iter().filter(|c| c.consistent).count();
    ok &= consistent == checks.len() && !checks.is_empty();
    ok &= *elapsed <= Duration::from_secs(600);
    let d: Vec<String> = reports
        .iter()
        .map(|r| format!("D={} ({} pairs, last increase at {})", r.d_report, r.pairs, r.increases.last().map_or(0, |i| i.0)))
        .collect();
    Ok(Outcome::new(
        ok,
        format!("{}; doubling {consistent}/{} consistent; {:.0}s (limit 600s)", d.join(", "), checks.len(), elapsed.as_secs_f64()),
    ))
}

fn handlebody() -> Result<Outcome> {
    let ex = experiment();
    let disk = ex.disk_set()?;
    let basepoint_in_disk = disk.contains(&ex.config.basepoint);
    let avoidance = ex.avoidance_audits()?;
    let at_one: Vec<_> = avoidance.iter().filter(|r| r.parameters.get("b").map(String::as_str) == Some("1")).collect();
    let avoids = at_one.len() == ex.family.len() && at_one.iter().all(|r| r.passed == Some(true));
    let audits = ex.subgroup_audits(AuditKind::Handlebody)?;
    let sup_zero = audits.iter().all(|r| r.sup == 0 && r.excluded == 0);
    let words = audits.first().map_or(0, |r| r.samples);
    Ok(Outcome::new(
        basepoint_in_disk && avoids && sup_zero && ex.config.subgroup_maxlen == 6,
        format!(
            "d0 in disk set: {basepoint_in_disk}; avoidance at B=1 sup {:?}; handlebody sup {:?} over {words} words",
            at_one.iter().map(|r| r.sup).collect::<Vec<_>>(),
            audits.iter().map(|r| r.sup).collect::<Vec<_>>()
        ),
    ))
}

fn independence() -> Result<Outcome> {
    let ex = experiment();
    let ds = defect_values();
    let g = ex.growth(&ds)?;
    let certified = g.certificate.certified && g.matrix.diagonal_positive() && g.matrix.power <= 64;
    let n = ex.family.len();
    let cyclic = ex.cyclic_audits(&ds)?;
    let mut shapes_ok = ex.config.cyclic_nmax <= 20;
    let mut diag = Vec::new();
    for (k, r) in cyclic.iter().enumerate() {
        let fit = r.fit.as_ref().ok_or_else(|| anyhow!("cyclic audit without a fit"))?;
        if k / n == k % n {
            shapes_ok &= fit.growing();
            diag.push(format!("{}±{}", fit.slope, fit.error));
        } else {
            shapes_ok &= fit.flat();
        }
    }
    Ok(Outcome::new(
        certified && shapes_ok && n == 3,
        format!(
            "M={} certified={} ({}, margin {}); diagonal slopes {}; off-diagonal flat: {shapes_ok}",
            g.matrix.power,
            g.certificate.certified,
            g.certificate.method.map_or("-".into(), |m| format!("{m:?}")),
            g.certificate.margin.as_ref().map_or("-".into(), |m| m.to_string()),
            diag.join(", ")
        ),
    ))
}

fn quasi_invariance() -> Result<Outcome> {
    let ex = experiment();
    let ds = defect_values();
    let stab = ex.subgroup_audits(AuditKind::Stabilizer)?;
    let b_t: Vec<i64> = stab.iter().map(|r| r.sup).collect();
    let b_t_zero = b_t.iter().all(|&b| b == 0);
    let cosets = ex.coset_audits(&ds, &b_t)?;
    let ok = cosets.iter().zip(&ds).all(|(r, &d)| {
        r.samples >= 100 && r.excluded == 0 && r.passed == Some(true) && r.bound == Some(2 * d)
    });
    Ok(Outcome::new(
        ok && b_t_zero && ex.config.coset_cap <= 6,
        format!(
            "B_T {:?}; coset sup {:?} against 2D {:?} over {:?} samples",
            b_t,
            cosets.iter().map(|r| r.sup).collect::<Vec<_>>(),
            ds.iter().map(|d| 2 * d).collect::<Vec<_>>(),
            cosets.iter().map(|r| r.samples).collect::<Vec<_>>()
        ),
    ))
}

fn qhom() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qhom"))
}

fn model_integrity() -> Result<Outcome> {
    const N: u64 = 16;
    let (coarse, fine) = (farey_height(N / 2), farey_height(N));
    let gens = GeneratorSet::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let h = (N / 4) as i64;
    let slope = |rng: &mut ChaCha8Rng| loop {
        let (p, q) = (rng.gen_range(-h..=h), rng.gen_range(0..=h));
        if let Ok(s) = Slope::new(p, q) {
            if s.height() <= h.into() {
                return s;
            }
        }
    };
    let v = |s: &Slope| Vertex::Slope(s.clone());
    let unit = QuasiGeodesicConstants { lambda: 1, c: 0 };
    let mut triples = 0;
    let mut attempts = 0;
    while triples < 200 {
        attempts += 1;
        ensure!(attempts < 100_000, "too few margin-safe triples");
        let (a, b) = (slope(&mut rng), slope(&mut rng));
        let letters: Vec<Letter> = (0..rng.gen_range(0..6))
            .map(|_| Letter::new(GenId(rng.gen_range(0..2)), if rng.gen() { 1 } else { -1 }))
            .collect();
        let m = evaluate_word(&GroupWord::from_letters(&letters), &gens)?;
        let (ma, mb) = (a.apply(&m), b.apply(&m));
        if ma.height() > h.into() || mb.height() > h.into() {
            continue;
        }
        triples += 1;
        let d_fine = fine.distance(&v(&a), &v(&b))?;
        ensure!(d_fine <= coarse.distance(&v(&a), &v(&b))?, "truncation monotonicity fails at {a}, {b}");
        ensure!(d_fine == fine.distance(&v(&ma), &v(&mb))?, "isometry fails at {a}, {b}");
        let corridor = farey_corridor(&a, &b, 0);
        ensure!(corridor.distance(&v(&a), &v(&b))? == d_fine, "corridor distance differs at {a}, {b}");
        let path = fine.geodesic(&v(&a), &v(&b))?;
        ensure!(quasi_geodesic_constants(&path, &fine)? == unit, "geodesic {a} -> {b} is not (1,0)");
    }
    let out = qhom().args(["conecheck", "--seed", "1"]).output()?;
    let record = String::from_utf8(out.stdout)?;
    let cone_ok = out.status.success()
        && record.contains(r#""projection_failures":[]"#)
        && record.contains(r#""record":"conecheck""#);
    Ok(Outcome::new(cone_ok, format!("{triples} margin-safe triples; geodesics (1,0); cone-off apexes ok: {cone_ok}")))
}

fn determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let tree_spec = dir.path().join("tree.spec");
    fs::write(&tree_spec, "model = tree-corridor:2\nschedule = 0,1\nomega = 1; a; a b^-1; a b^-1 a\nw = 1\n")?;
    let farey_spec = dir.path().join("farey.spec");
    fs::write(&farey_spec, experiment().evaluators[0].spec().to_text())?;
    let (tree_spec, farey_spec) = (tree_spec.to_str().unwrap(), farey_spec.to_str().unwrap());
    let runs: Vec<Vec<&str>> = vec![
        vec!["dist", "0/1", "5/7"],
        vec!["--model", "tree-corridor:2", "dist", "a", "b a^-1"],
        vec!["qm", "a b^-1 a a b^-1 a", "--spec", tree_spec],
        vec!["defect", "--spec", tree_spec, "--samples", "300", "--max-len", "8"],
        vec!["defect", "--spec", farey_spec, "--samples", "40", "--max-len", "8"],
        vec!["homogenize", "a b^-1 a", "--spec", tree_spec, "--power", "16", "--defect", "2"],
        vec!["audit", "handlebody"],
        vec!["audit", "stabilizer"],
        vec!["audit", "avoidance"],
        vec!["conecheck"],
    ];
    let run = |args: &[&str], out: &Path| -> Result<(Option<i32>, Vec<u8>)> {
        let status = qhom().args(args).args(["--seed", "7", "--out"]).arg(out).output()?.status;
        Ok((status.code(), fs::read(out)?))
    };
    let mut identical = 0;
    for (i, args) in runs.iter().enumerate() {
        let first = run(args, &dir.path().join(format!("{i}a.jsonl")))?;
        let second = run(args, &dir.path().join(format!("{i}b.jsonl")))?;
        ensure!(first.0 == Some(0) || first.0 == Some(2), "`qhom {}` exited with {:?}", args.join(" "), first.0);
        ensure!(first == second, "`qhom {}` is not reproducible", args.join(" "));
        identical += 1;
    }
    Ok(Outcome::new(true, format!("{identical} commands rerun with byte-identical records")))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("counting-function bounds", counting_bounds),
        ("quasi-homomorphism defect", defect),
        ("handlebody vanishing", handlebody),
        ("growth independence", independence),
        ("double-coset quasi-invariance", quasi_invariance),
        ("model integrity", model_integrity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e:#}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "criterion {}  {:<30} {}  {}  [{:.1}s]",
            i + 1,
            name,
            if passed { "PASS" } else { "FAIL" },
            detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
