use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qhom::constructions::{growth_table, AuditKind, AuditReport, Experiment, ExperimentConfig};
use qhom::counting::{defect_estimate, homogenize, Evaluator, PenaltySpec, Sampler};
use qhom::graph::{
    cone_off, distance_stable, farey_height, project, tree_ball, ActingGroup, DistanceCache, Model, Schedule,
    TruncatedGraph, Universe, Vertex,
};
use qhom::moebius::GroupWord;
use qhom::report::{Record, Table};
use qhom::GeneratorSet;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "qhom", version, about = "Counting quasi-homomorphisms on Farey-graph and tree models")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// farey, farey-corridor, tree:R or tree-corridor:R
    #[arg(long, global = true)]
    model: Option<Universe>,
    /// Strictly increasing truncation parameters, e.g. 8,16,32
    #[arg(long = "n-schedule", global = true)]
    n_schedule: Option<Schedule>,
    /// Generator file with `name = a b c d` lines
    #[arg(long, global = true)]
    gens: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Distance cache file
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write records here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Graph distance across the truncation schedule
    Dist { x: String, y: String },
    /// Value of h_ω on a word
    Qm {
        word: String,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Defect estimate over random word pairs
    Defect {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 300)]
        samples: usize,
        #[arg(long = "max-len", default_value_t = 8)]
        max_len: u32,
    },
    /// h(g^M)/M with its error bar D/M
    Homogenize {
        word: String,
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 64)]
        power: u64,
        #[arg(long)]
        defect: i64,
    },
    /// Schottky pair, family, defects and growth-matrix certificate
    Family {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// One of the finite audits
    Audit {
        kind: AuditChoice,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Use this defect instead of estimating it
        #[arg(long)]
        defect: Option<i64>,
    },
    /// Cone off the disk set and its translates and check projections
    Conecheck {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditChoice {
    Cyclic,
    Stabilizer,
    Handlebody,
    Coset,
    Avoidance,
}

/// Exit status: 0 certified or passed, 2 inconclusive, unstable or failed.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Ok,
    Inconclusive,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Inconclusive
        }
    }

    fn and(self, other: Status) -> Status {
        if self == Status::Ok {
            other
        } else {
            self
        }
    }
}

/// Records go to the output; the summary goes to standard error.
struct Output {
    sink: Box<dyn Write>,
    model: String,
    seed: u64,
}

impl Output {
    fn open(path: Option<&Path>, model: String, seed: u64) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(
                fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
            )),
            None => Box::new(io::BufWriter::new(io::stdout())),
        };
        Ok(Output { sink, model, seed })
    }

    fn emit<T: Serialize>(&mut self, kind: &str, n_star: Option<u64>, data: &T) -> Result<()> {
        let line = Record::new(kind, &self.model, n_star, self.seed, data).to_line()?;
        writeln!(self.sink, "{line}")?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.sink.flush()?;
        Ok(())
    }
}

fn summary(text: &str) {
    eprint!("{text}");
}

fn load_gens(global: &Global) -> Result<GeneratorSet> {
    match &global.gens {
        Some(p) => Ok(GeneratorSet::load(p).with_context(|| format!("reading {}", p.display()))?),
        None => Ok(GeneratorSet::standard()),
    }
}

fn load_spec(path: &Path, global: &Global) -> Result<PenaltySpec> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = PenaltySpec::parse(&text)?;
    let universe = global.model.unwrap_or(spec.universe);
    let schedule = global.n_schedule.clone().unwrap_or_else(|| spec.schedule.clone());
    Ok(PenaltySpec::new(universe, schedule, spec.omega, spec.w, spec.basepoint)?)
}

fn evaluator(spec: PenaltySpec, global: &Global) -> Result<Evaluator> {
    let gens = match spec.universe.model {
        Model::Farey => Some(load_gens(global)?),
        Model::Tree { .. } => None,
    };
    let group = ActingGroup::for_model(spec.universe.model, gens);
    Ok(Evaluator::new(spec, group)?)
}

fn load_config(path: Option<&Path>, global: &Global) -> Result<ExperimentConfig> {
    let mut config = match path {
        Some(p) => ExperimentConfig::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => ExperimentConfig::flagship(),
    };
    if let Some(u) = global.model {
        config.universe = u;
    }
    if let Some(s) = &global.n_schedule {
        config.schedule = s.clone();
    }
    if let Some(s) = global.seed {
        config.seed = s;
    }
    Ok(config)
}

#[derive(Serialize)]
struct DistData<'a> {
    x: &'a Vertex,
    y: &'a Vertex,
    distance: u32,
    stable: bool,
    trail: &'a [(u64, Option<u32>)],
}

fn cmd_dist(x: &str, y: &str, global: &Global) -> Result<Status> {
    let universe = global.model.unwrap_or(Universe::new(Model::Farey, qhom::graph::Truncation::Corridor));
    let schedule = match &global.n_schedule {
        Some(s) => s.clone(),
        None if universe.is_pair_local() => Schedule::new(vec![0, 1])?,
        None => Schedule::new(vec![8, 16, 32])?,
    };
    let (x, y) = (universe.model.parse_vertex(x)?, universe.model.parse_vertex(y)?);
    let cache = match &global.cache {
        Some(p) => Some(DistanceCache::open(p)?),
        None => None,
    };
    let st = distance_stable(&x, &y, &universe, &schedule, cache.as_ref())?;
    if let Some(c) = &cache {
        c.save()?;
    }
    let mut out = Output::open(global.out.as_deref(), universe.to_string(), global.seed.unwrap_or(0))?;
    out.emit("dist", Some(st.n_star), &DistData { x: &x, y: &y, distance: st.value, stable: st.stable, trail: &st.trail })?;
    out.finish()?;
    summary(&format!("d({x}, {y}) = {}  (N* = {}, stable = {})\n", st.value, st.n_star, st.stable));
    Ok(Status::from_bool(st.stable))
}

#[derive(Serialize)]
struct QmData<'a, T: Serialize> {
    word: &'a str,
    omega: String,
    w: u32,
    #[serde(flatten)]
    value: &'a T,
}

fn cmd_qm(word: &str, spec: &Path, global: &Global) -> Result<Status> {
    let ev = evaluator(load_spec(spec, global)?, global)?;
    let w = ev.group().parse_word(word)?;
    let v = ev.h_word(&w)?;
    let mut out = Output::open(global.out.as_deref(), ev.spec().universe.to_string(), global.seed.unwrap_or(0))?;
    let data = QmData { word, omega: ev.spec().omega.to_list(), w: ev.spec().w, value: &v };
    out.emit("qm", Some(v.n_star), &data)?;
    out.finish()?;
    summary(&format!("h({word}) = {}  (N* = {}, stable = {})\n", v.value, v.n_star, v.stabilized));
    Ok(Status::from_bool(v.stabilized))
}

fn generator_letters(group: &ActingGroup) -> Vec<(String, GroupWord)> {
    let a = group.alphabet();
    a.ids().map(|id| (a.name(id).to_string(), GroupWord::generator(id, 1))).collect()
}

fn cmd_defect(spec: &Path, samples: usize, max_len: u32, global: &Global) -> Result<Status> {
    let ev = evaluator(load_spec(spec, global)?, global)?;
    let seed = global.seed.unwrap_or(0);
    let sampler = Sampler { letters: generator_letters(ev.group()), max_len, count: samples, seed, required: Vec::new() };
    let r = defect_estimate(&ev, &sampler)?;
    let mut out = Output::open(global.out.as_deref(), ev.spec().universe.to_string(), seed)?;
    out.emit("defect", None, &r)?;
    out.finish()?;
    summary(&format!(
        "D_report = {} over {} pairs ({} excluded), stabilized = {}\n",
        r.d_report, r.pairs, r.excluded, r.stabilized
    ));
    Ok(Status::from_bool(r.stabilized))
}

fn cmd_homogenize(word: &str, spec: &Path, power: u64, defect: i64, global: &Global) -> Result<Status> {
    let ev = evaluator(load_spec(spec, global)?, global)?;
    let g = ev.group().evaluate(&ev.group().parse_word(word)?)?;
    let h = homogenize(&ev, &g, power, defect)?;
    let mut out = Output::open(global.out.as_deref(), ev.spec().universe.to_string(), global.seed.unwrap_or(0))?;
    out.emit("homogenize", None, &h)?;
    out.finish()?;
    summary(&format!("h({word}^{})/{} = {} ± {}\n", h.power, h.power, h.value, h.error));
    Ok(Status::from_bool(h.stabilized && !h.partial))
}

fn build(config: ExperimentConfig, global: &Global, out: &mut Output) -> Result<Experiment> {
    let ex = Experiment::build(config, load_gens(global)?)?;
    out.emit("config", None, &ex.config)?;
    out.emit("pair", None, &ex.pair)?;
    for m in &ex.family {
        out.emit("family_member", None, m)?;
    }
    Ok(ex)
}

fn defects(ex: &Experiment, out: &mut Output, given: Option<i64>) -> Result<(Vec<i64>, Status)> {
    if let Some(d) = given {
        return Ok((vec![d; ex.evaluators.len()], Status::Ok));
    }
    let reports = ex.defects()?;
    let mut status = Status::Ok;
    for (i, r) in reports.iter().enumerate() {
        #[derive(Serialize)]
        struct D<'a> {
            omega: usize,
            #[serde(flatten)]
            report: &'a qhom::counting::DefectReport,
        }
        out.emit("defect", None, &D { omega: i + 1, report: r })?;
        status = status.and(Status::from_bool(r.stabilized));
    }
    Ok((reports.iter().map(|r| r.d_report).collect(), status))
}

fn cmd_family(config: Option<&Path>, global: &Global) -> Result<Status> {
    let config = load_config(config, global)?;
    let mut out = Output::open(global.out.as_deref(), config.universe.to_string(), config.seed)?;
    let ex = build(config, global, &mut out)?;
    let (ds, mut status) = defects(&ex, &mut out, None)?;
    let checks = ex.doubling_checks(&ds)?;
    for c in &checks {
        out.emit("doubling", None, c)?;
    }
    status = status.and(Status::from_bool(checks.iter().all(|c| c.consistent)));
    let g = ex.growth(&ds)?;
    out.emit("growth", None, &g)?;
    out.finish()?;
    let certified = g.certificate.certified && g.matrix.diagonal_positive();
    let mut t = Table::new(["f", "word length", "|omega|", "displacement"]);
    for m in &ex.family {
        t.row([m.label.clone(), m.word.split_whitespace().count().to_string(), m.segment.omega.len().to_string(), m.displacement.to_string()]);
    }
    summary(&format!(
        "pair certified at power {}\n{}defects {:?}\n{}certificate: {}\n",
        ex.pair.power,
        t.render(),
        ds,
        growth_table(&g.matrix),
        if certified { "certified" } else { "inconclusive" }
    ));
    Ok(status.and(Status::from_bool(certified)))
}

fn audit_table(reports: &[AuditReport]) -> String {
    let mut t = Table::new(["kind", "omega", "subject", "samples", "sup", "bound", "passed", "witness"]);
    for r in reports {
        let subject = r.parameters.get("element").or(r.parameters.get("b")).cloned().unwrap_or_default();
        t.row([
            r.kind.to_string(),
            r.parameters.get("omega").cloned().unwrap_or_default(),
            subject,
            r.samples.to_string(),
            r.sup.to_string(),
            r.bound.map(|b| b.to_string()).unwrap_or_default(),
            r.passed.map(|b| b.to_string()).unwrap_or_default(),
            r.witness.clone().unwrap_or_default(),
        ]);
    }
    t.render()
}

fn cmd_audit(kind: AuditChoice, config: Option<&Path>, defect: Option<i64>, global: &Global) -> Result<Status> {
    let config = load_config(config, global)?;
    let mut out = Output::open(global.out.as_deref(), config.universe.to_string(), config.seed)?;
    let ex = build(config, global, &mut out)?;
    let (reports, status) = match kind {
        AuditChoice::Stabilizer | AuditChoice::Handlebody => {
            let k = if matches!(kind, AuditChoice::Stabilizer) { AuditKind::Stabilizer } else { AuditKind::Handlebody };
            let rs = ex.subgroup_audits(k)?;
            let ok = rs.iter().all(|r| r.excluded == 0);
            (rs, Status::from_bool(ok))
        }
        AuditChoice::Avoidance => {
            let rs = ex.avoidance_audits()?;
            let ok = rs.iter().all(|r| r.passed == Some(true));
            (rs, Status::from_bool(ok))
        }
        AuditChoice::Cyclic => {
            let (ds, st) = defects(&ex, &mut out, defect)?;
            let rs = ex.cyclic_audits(&ds)?;
            let n = ex.family.len();
            let ok = rs.iter().enumerate().all(|(k, r)| {
                let Some(fit) = &r.fit else { return false };
                if k / n == k % n {
                    fit.growing()
                } else {
                    fit.flat()
                }
            });
            (rs, st.and(Status::from_bool(ok)))
        }
        AuditChoice::Coset => {
            let (ds, st) = defects(&ex, &mut out, defect)?;
            let stab = ex.subgroup_audits(AuditKind::Stabilizer)?;
            let b_t: Vec<i64> = stab.iter().map(|r| r.sup).collect();
            for r in &stab {
                out.emit("audit", None, r)?;
            }
            let rs = ex.coset_audits(&ds, &b_t)?;
            let ok = rs.iter().all(|r| r.passed == Some(true) && r.excluded == 0);
            (rs, st.and(Status::from_bool(ok)))
        }
    };
    for r in &reports {
        out.emit("audit", None, r)?;
    }
    out.finish()?;
    summary(&audit_table(&reports));
    Ok(status)
}

#[derive(Serialize)]
struct ConeCheck {
    graph: String,
    subsets: Vec<usize>,
    members_checked: usize,
    projection_failures: Vec<String>,
    pairs_checked: usize,
    contraction_failures: Vec<String>,
}

fn cmd_conecheck(config: Option<&Path>, global: &Global) -> Result<Status> {
    let config = load_config(config, global)?;
    let mut out = Output::open(global.out.as_deref(), config.universe.to_string(), config.seed)?;
    let ex = build(config, global, &mut out)?;
    let n = ex.config.schedule.last().max(6);
    let base: TruncatedGraph = match ex.config.universe.model {
        Model::Farey => farey_height(n),
        Model::Tree { rank } => tree_ball(rank, n)?,
    };
    let disk = ex.disk_set()?;
    let [a, b] = ex.pair.matrices(&ex.gens)?;
    let mut movers = vec![None, Some(a.clone()), Some(a.inverse()), Some(b.clone()), Some(b.inverse())];
    for id in ex.gens.alphabet().ids() {
        if let Some(m) = ex.gens.matrix(id) {
            movers.push(Some(m.clone()));
            movers.push(Some(m.inverse()));
        }
    }
    let mut subsets: Vec<Vec<Vertex>> = Vec::new();
    for m in movers {
        let e = m.map(qhom::graph::Element::Mobius);
        let mut s: Vec<Vertex> = disk
            .members
            .iter()
            .map(|v| match &e {
                Some(e) => e.apply(v),
                None => Ok(v.clone()),
            })
            .collect::<qhom::Result<Vec<_>>>()?
            .into_iter()
            .filter(|v| base.contains(v))
            .collect();
        s.sort();
        s.dedup();
        if !s.is_empty() && !subsets.contains(&s) {
            subsets.push(s);
        }
    }
    if subsets.is_empty() {
        bail!("no disk-set point lies in the truncation");
    }
    let coned = cone_off(&base, &subsets)?;
    let mut check = ConeCheck {
        graph: format!("{} {}", base.kind(), base.bound()),
        subsets: subsets.iter().map(Vec::len).collect(),
        members_checked: 0,
        projection_failures: Vec::new(),
        pairs_checked: 0,
        contraction_failures: Vec::new(),
    };
    for s in &subsets {
        for v in s {
            check.members_checked += 1;
            let apex = project(v, &coned)?;
            let Vertex::Apex(i) = apex else { bail!("projection returned a non-apex") };
            if !subsets[i as usize].contains(v) {
                check.projection_failures.push(format!("{v} -> @{i}"));
            }
        }
    }
    let verts = base.vertices();
    let step = (verts.len() / 40).max(1);
    for x in verts.iter().step_by(step) {
        for y in verts.iter().step_by(step * 3 + 1) {
            check.pairs_checked += 1;
            if coned.distance(x, y)? > base.distance(x, y)? {
                check.contraction_failures.push(format!("{x} {y}"));
            }
        }
    }
    out.emit("conecheck", None, &check)?;
    out.finish()?;
    let ok = check.projection_failures.is_empty() && check.contraction_failures.is_empty();
    summary(&format!(
        "cone-off of {} subsets in {}: {} members projected, {} pairs compared, {}\n",
        check.subsets.len(),
        check.graph,
        check.members_checked,
        check.pairs_checked,
        if ok { "all checks passed" } else { "FAILURES" }
    ));
    Ok(Status::from_bool(ok))
}

fn run(cli: Cli) -> Result<Status> {
    if let Some(j) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(j).build_global().context("starting worker pool")?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Dist { x, y } => cmd_dist(x, y, g),
        Command::Qm { word, spec } => cmd_qm(word, spec, g),
        Command::Defect { spec, samples, max_len } => cmd_defect(spec, *samples, *max_len, g),
        Command::Homogenize { word, spec, power, defect } => cmd_homogenize(word, spec, *power, *defect, g),
        Command::Family { config } => cmd_family(config.as_deref(), g),
        Command::Audit { kind, config, defect } => cmd_audit(*kind, config.as_deref(), *defect, g),
        Command::Conecheck { config } => cmd_conecheck(config.as_deref(), g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Inconclusive) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
