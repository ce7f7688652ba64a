//! Command-line surface: argument parsing, run configuration and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plumbing_core::abel::{b_invariant, dim_abel_generic, dim_abel_section5, dim_abel_via_h1, dim_rel_abel, BaseFamily};
use plumbing_core::blowup::blow_up;
use plumbing_core::box_opt::{h1_o_generic, h1_pic_generic};
use plumbing_core::tower::{build_tower, d_recursion};
use plumbing_core::{
    AnalyticOracle, BoxProblem, BundleDescriptor, Cycle, GenericOracle, GenericStructure, HypothesisMode, Limits,
    Objective, PlumbingGraph, RatCycle, RelGenericStructure, RelativeContext, Strategy, SubgraphEmbedding,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{read_file, Error, Result};
use crate::format::{
    format_class_estar, format_cycle, format_descriptor, format_ratcycle, graph_to_text, parse_class, parse_cycle,
    parse_descriptor, parse_graph, Coords, GraphDoc,
};
use crate::fuzz::{compare, fuzz_coincidence, FuzzConfig, InstanceDoc};
use crate::generate::{GenMode, InstanceParams};
use crate::memo::MemoOracle;
use crate::parallel::par_minimize_box;
use crate::report::{tower_table, AbelOut, BOut, DominanceOut, OptOut, RelH1Out, TowerOut};
use crate::table::TableOracle;

/// Version of the structured output schema.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum CommandName {
    Validate,
    Invariants,
    Chi,
    Minchi,
    H1Generic,
    H1Pic,
    H1Rel,
    H1Natural,
    Dominant,
    AbelDim,
    BInvariant,
    Blowup,
    Fuzz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AbelMode {
    Generic,
    H1,
    Relative,
    Section5,
    Tower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Hypothesis {
    Strict,
    Warn,
}

impl From<Hypothesis> for HypothesisMode {
    fn from(h: Hypothesis) -> Self {
        match h {
            Hypothesis::Strict => HypothesisMode::Strict,
            Hypothesis::Warn => HypothesisMode::Warn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyArg {
    Pruned,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Human,
    Json,
}

/// Source of analytic data on the base subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleSource {
    Generic,
    /// Table contents, embedded so runs are self-contained.
    Table { entries: String, fallback: bool },
}

/// Everything a run depends on. Serialized into structured output so that
/// the run can be repeated from the output alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
    pub coords: Coords,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v1: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bundle: Option<String>,
    pub oracle: OracleSource,
    pub hypothesis: Hypothesis,
    pub volume_cap: u64,
    pub optimizer_cap: usize,
    pub tower_cap: u64,
    pub strategy: StrategyArg,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<AbelMode>,
    #[serde(default)]
    pub compare: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fuzz: Option<FuzzConfig>,
}

impl RunConfig {
    pub fn new(command: CommandName) -> Self {
        let l = Limits::default();
        RunConfig {
            command,
            graph: None,
            cycle: None,
            class: None,
            coords: Coords::Estar,
            v1: None,
            z1: None,
            bundle: None,
            oracle: OracleSource::Generic,
            hypothesis: Hypothesis::Warn,
            volume_cap: l.volume_cap,
            optimizer_cap: l.optimizer_cap,
            tower_cap: 10_000,
            strategy: StrategyArg::Pruned,
            mode: None,
            compare: false,
            vertex: None,
            fuzz: None,
        }
    }

    pub fn limits(&self) -> Limits {
        Limits {
            volume_cap: self.volume_cap,
            optimizer_cap: self.optimizer_cap,
            strategy: match self.strategy {
                StrategyArg::Pruned => Strategy::Pruned,
                StrategyArg::Exhaustive => Strategy::Exhaustive,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "plumbing", version, about = "Lattice invariants and Abel map dimensions of plumbing graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Cmd>,
    /// Repeat the run recorded in a structured output or fuzz record.
    #[arg(long, global = true, value_name = "FILE")]
    pub replay: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
    /// Maximal number of worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Check that a graph is a negative definite tree.
    Validate(Inputs),
    /// Determinant, canonical cycle and minimal cycle.
    Invariants(Inputs),
    /// Riemann-Roch expression of a cycle (-Z) or class (-l).
    Chi(Inputs),
    /// Minimum of χ(l - l') over 0 <= l <= Z.
    Minchi(Inputs),
    /// h¹(O_Z) for a generic analytic structure.
    H1Generic(Inputs),
    /// h¹(Z, L) for L generic in Pic^{l'}(Z).
    H1Pic(Inputs),
    /// h¹(Z, L) for L relatively generic over a base bundle.
    H1Rel(Inputs),
    /// h¹ of a natural line bundle on a relatively generic structure.
    H1Natural(Inputs),
    /// Whether the relative Abel map is dominant.
    Dominant(Inputs),
    /// Dimension of the image of the Abel map.
    AbelDim(AbelArgs),
    /// The invariant b of a relative Abel map.
    BInvariant(Inputs),
    /// Blow up a vertex and pull back the inputs.
    Blowup(BlowupArgs),
    /// Compare the dimension formulas on random instances.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    /// Graph file (text or JSON).
    #[arg(short = 'g', long = "graph")]
    pub graph: Option<PathBuf>,
    /// Cycle Z, e.g. "v1:2 v2:1".
    #[arg(short = 'Z', long = "cycle", allow_hyphen_values = true)]
    pub cycle: Option<String>,
    /// Chern class l' in the chosen coordinates.
    #[arg(short = 'l', long = "class", allow_hyphen_values = true)]
    pub class: Option<String>,
    /// `estar`: integers a_v with -l' = Σ a_v E*_v; `e`: rational E-coefficients of l'.
    #[arg(long, value_enum, default_value_t = Coords::Estar)]
    pub coords: Coords,
    /// Base vertices, comma or space separated.
    #[arg(long)]
    pub v1: Option<String>,
    /// Base cycle Z₁ (defaults to the restriction of Z).
    #[arg(long, allow_hyphen_values = true)]
    pub z1: Option<String>,
    /// Base bundle descriptor, classes in E-coefficients.
    #[arg(long)]
    pub bundle: Option<String>,
    /// `generic` or the path of a table file.
    #[arg(long, default_value = "generic")]
    pub oracle: String,
    /// Answer table misses with the generic formulas.
    #[arg(long)]
    pub table_fallback: bool,
    /// Write queries missing from the table to this file.
    #[arg(long, value_name = "FILE")]
    pub misses: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Hypothesis::Warn)]
    pub hypothesis: Hypothesis,
    #[arg(long, default_value_t = Limits::default().volume_cap)]
    pub volume_cap: u64,
    #[arg(long, default_value_t = Limits::default().optimizer_cap)]
    pub optimizer_cap: usize,
    #[arg(long, default_value_t = 10_000)]
    pub tower_cap: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Pruned)]
    pub strategy: StrategyArg,
}

#[derive(Debug, Clone, Args)]
pub struct AbelArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    #[arg(long, value_enum, default_value_t = AbelMode::Generic)]
    pub mode: AbelMode,
    /// Run every formula and report whether they agree.
    #[arg(long)]
    pub compare: bool,
    /// Write the tower node table to this file (tower mode).
    #[arg(long, value_name = "FILE")]
    pub emit_table: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BlowupArgs {
    #[command(flatten)]
    pub inputs: Inputs,
    /// Vertex to blow up.
    #[arg(long)]
    pub vertex: String,
}

#[derive(Debug, Clone, Args)]
pub struct FuzzArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub count: u64,
    #[arg(long, default_value_t = 1)]
    pub min_n: usize,
    #[arg(long, default_value_t = 5)]
    pub max_n: usize,
    #[arg(long, default_value_t = -7, allow_hyphen_values = true)]
    pub euler_min: i64,
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub euler_max: i64,
    #[arg(long, value_enum, default_value_t = GenMode::Star)]
    pub gen_mode: GenMode,
    #[arg(long, default_value_t = 2)]
    pub z_extra: i64,
    #[arg(long, default_value_t = 2)]
    pub a_max: i64,
    /// At most this many nonzero a_v (0: no limit).
    #[arg(long, default_value_t = 0)]
    pub a_support: usize,
    /// Instances with a larger box [0, Z] are redrawn.
    #[arg(long, default_value_t = 2000)]
    pub max_volume: u64,
    #[arg(long, default_value_t = 10_000)]
    pub tower_cap: u64,
    #[arg(long, default_value_t = Limits::default().optimizer_cap)]
    pub optimizer_cap: usize,
}

/// Side outputs that are not part of the run configuration.
#[derive(Debug, Clone, Default)]
pub struct Sinks {
    pub emit_table: Option<PathBuf>,
    pub misses: Option<PathBuf>,
}

fn split_ids(s: &str) -> Vec<String> {
    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).map(String::from).collect()
}

fn apply_inputs(cmd: CommandName, i: &Inputs) -> Result<(RunConfig, Sinks)> {
    let mut c = RunConfig::new(cmd);
    if let Some(p) = &i.graph {
        c.graph = Some(GraphDoc::of(&parse_graph(&read_file(p)?)?));
    }
    c.cycle = i.cycle.clone();
    c.class = i.class.clone();
    c.coords = i.coords;
    c.v1 = i.v1.as_deref().map(split_ids);
    c.z1 = i.z1.clone();
    c.bundle = i.bundle.clone();
    c.oracle = if i.oracle == "generic" {
        OracleSource::Generic
    } else {
        OracleSource::Table { entries: read_file(std::path::Path::new(&i.oracle))?, fallback: i.table_fallback }
    };
    c.hypothesis = i.hypothesis;
    c.volume_cap = i.volume_cap;
    c.optimizer_cap = i.optimizer_cap;
    c.tower_cap = i.tower_cap;
    c.strategy = i.strategy;
    Ok((c, Sinks { emit_table: None, misses: i.misses.clone() }))
}

/// Turns parsed arguments into a run configuration, reading input files.
pub fn config_from_cli(cmd: &Cmd) -> Result<(RunConfig, Sinks)> {
    use CommandName as N;
    Ok(match cmd {
        Cmd::Validate(i) => apply_inputs(N::Validate, i)?,
        Cmd::Invariants(i) => apply_inputs(N::Invariants, i)?,
        Cmd::Chi(i) => apply_inputs(N::Chi, i)?,
        Cmd::Minchi(i) => apply_inputs(N::Minchi, i)?,
        Cmd::H1Generic(i) => apply_inputs(N::H1Generic, i)?,
        Cmd::H1Pic(i) => apply_inputs(N::H1Pic, i)?,
        Cmd::H1Rel(i) => apply_inputs(N::H1Rel, i)?,
        Cmd::H1Natural(i) => apply_inputs(N::H1Natural, i)?,
        Cmd::Dominant(i) => apply_inputs(N::Dominant, i)?,
        Cmd::BInvariant(i) => apply_inputs(N::BInvariant, i)?,
        Cmd::AbelDim(a) => {
            let (mut c, mut s) = apply_inputs(N::AbelDim, &a.inputs)?;
            c.mode = Some(a.mode);
            c.compare = a.compare;
            s.emit_table = a.emit_table.clone();
            (c, s)
        }
        Cmd::Blowup(b) => {
            let (mut c, s) = apply_inputs(N::Blowup, &b.inputs)?;
            c.vertex = Some(b.vertex.clone());
            (c, s)
        }
        Cmd::Fuzz(f) => {
            if f.min_n == 0 || f.min_n > f.max_n {
                return Err(Error::Usage("need 1 <= --min-n <= --max-n".into()));
            }
            if f.euler_min > f.euler_max || f.euler_max > -1 {
                return Err(Error::Usage("need --euler-min <= --euler-max <= -1".into()));
            }
            let mut c = RunConfig::new(N::Fuzz);
            c.tower_cap = f.tower_cap;
            c.optimizer_cap = f.optimizer_cap;
            c.fuzz = Some(FuzzConfig {
                seed: f.seed,
                count: f.count,
                params: InstanceParams {
                    min_n: f.min_n,
                    max_n: f.max_n,
                    euler_min: f.euler_min,
                    euler_max: f.euler_max,
                    mode: f.gen_mode,
                    z_extra: f.z_extra,
                    a_max: f.a_max,
                    a_support: f.a_support,
                    max_volume: f.max_volume,
                },
                tower_cap: f.tower_cap,
            });
            (c, Sinks::default())
        }
    })
}

/// Reads a replay file: a structured output, a bare configuration or a fuzz
/// disagreement record.
pub fn config_from_replay(text: &str) -> Result<RunConfig> {
    let v: Value = serde_json::from_str(text)?;
    if let Some(cfg) = v.get("config") {
        return Ok(serde_json::from_value(cfg.clone())?);
    }
    if let Some(inst) = v.get("instance") {
        let inst: InstanceDoc = serde_json::from_value(inst.clone())?;
        let mut c = RunConfig::new(CommandName::AbelDim);
        c.graph = Some(inst.graph);
        c.cycle = Some(inst.cycle);
        c.class = Some(inst.class);
        c.coords = inst.coords;
        c.mode = Some(AbelMode::Generic);
        c.compare = true;
        return Ok(c);
    }
    Ok(serde_json::from_value(v)?)
}

/// Result of a run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Value,
    pub human: String,
    /// False when a comparison found a disagreement.
    pub success: bool,
}

impl Outcome {
    fn ok(result: Value, human: String) -> Self {
        Outcome { result, human, success: true }
    }

    /// Structured document: schema version, configuration and result.
    pub fn document(&self, cfg: &RunConfig) -> Result<String> {
        let doc = json!({ "format": FORMAT_VERSION, "config": cfg, "result": self.result, "success": self.success });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }
}

struct Env {
    graph: PlumbingGraph,
    cfg: RunConfig,
}

enum OracleBox {
    Generic(MemoOracle<GenericOracle>),
    Table(MemoOracle<TableOracle>),
}

impl OracleBox {
    fn get(&self) -> &dyn AnalyticOracle {
        match self {
            OracleBox::Generic(o) => o,
            OracleBox::Table(o) => o,
        }
    }

    fn misses(&self) -> Vec<String> {
        match self {
            OracleBox::Generic(_) => Vec::new(),
            OracleBox::Table(t) => t.inner().misses(),
        }
    }
}

impl Env {
    fn require<'a>(&self, v: &'a Option<String>, flag: &str) -> Result<&'a str> {
        v.as_deref().ok_or_else(|| Error::Usage(format!("{} requires {flag}", name_of(self.cfg.command))))
    }

    fn z(&self) -> Result<Cycle> {
        parse_cycle(&self.graph, self.require(&self.cfg.cycle, "-Z")?)
    }

    fn class(&self) -> Result<RatCycle> {
        match &self.cfg.class {
            Some(t) => parse_class(&self.graph, t, self.cfg.coords),
            None => Ok(RatCycle::zero(self.graph.n())),
        }
    }

    fn generic_oracle(&self) -> GenericOracle {
        GenericOracle { limits: self.cfg.limits(), hypothesis: self.cfg.hypothesis.into(), ..GenericOracle::default() }
    }

    fn oracle(&self) -> Result<OracleBox> {
        Ok(match &self.cfg.oracle {
            OracleSource::Generic => OracleBox::Generic(MemoOracle::new(self.generic_oracle())),
            OracleSource::Table { entries, fallback } => {
                let mut t = TableOracle::parse(entries)?;
                if *fallback {
                    t = t.with_fallback(self.generic_oracle());
                }
                OracleBox::Table(MemoOracle::new(t))
            }
        })
    }

    fn mask(&self) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.graph.n()];
        for id in self.cfg.v1.iter().flatten() {
            mask[self.graph.index_of(id)?] = true;
        }
        Ok(mask)
    }

    fn ctx<'a>(&'a self, oracle: &'a dyn AnalyticOracle) -> Result<RelativeContext<'a>> {
        let emb = SubgraphEmbedding::new(&self.graph, &self.mask()?)?;
        Ok(RelativeContext::new(&self.graph, emb, oracle, self.cfg.hypothesis.into(), self.cfg.limits())?)
    }

    fn z1(&self, ctx: &RelativeContext, z: &Cycle) -> Result<Cycle> {
        match &self.cfg.z1 {
            Some(t) => parse_cycle(&self.graph, t),
            None => Ok(ctx.embedding().restrict(z)),
        }
    }

    /// Explicit base bundle, or the given default built from `R₁(l')`.
    fn bundle(
        &self,
        ctx: &RelativeContext,
        l: &RatCycle,
        default: fn(RatCycle) -> BundleDescriptor,
    ) -> Result<BundleDescriptor> {
        match &self.cfg.bundle {
            Some(t) => parse_descriptor(&self.graph, t),
            None => Ok(default(ctx.restrict_chern(l)?)),
        }
    }
}

fn name_of(c: CommandName) -> String {
    serde_json::to_value(c).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn with_misses(mut v: Value, oracle: &OracleBox) -> Value {
    let m = oracle.misses();
    if !m.is_empty() {
        v["oracle_misses"] = json!(m);
    }
    v
}

fn with_warnings(mut v: Value, human: &mut String, w: Vec<String>) -> Value {
    for x in &w {
        *human += &format!("warning: {x}\n");
    }
    v["warnings"] = json!(w);
    v
}

/// Executes a run. `sinks` receives side outputs.
pub fn run(cfg: &RunConfig, sinks: &Sinks) -> Result<Outcome> {
    if cfg.command == CommandName::Fuzz {
        let f = cfg.fuzz.clone().unwrap_or_default();
        let r = fuzz_coincidence(&f, &cfg.limits());
        let mut human = format!(
            "{} instances, {} agree, {} towers checked, {} disagreements\n",
            r.count,
            r.agreements,
            r.towers_checked,
            r.disagreements.len()
        );
        for d in &r.disagreements {
            human += &format!("disagreement at instance {}: {}\n", d.index, serde_json::to_string(d)?);
        }
        let ok = r.ok();
        return Ok(Outcome { result: serde_json::to_value(&r)?, human, success: ok });
    }
    let doc = cfg.graph.as_ref().ok_or_else(|| Error::Usage(format!("{} requires -g", name_of(cfg.command))))?;
    let env = Env { graph: doc.build()?, cfg: cfg.clone() };
    let oracle = env.oracle()?;
    let out = dispatch(&env, &oracle, sinks);
    write_misses(&oracle.misses(), sinks)?;
    out
}

fn dispatch(env: &Env, oracle: &OracleBox, sinks: &Sinks) -> Result<Outcome> {
    let g = &env.graph;
    let cfg = &env.cfg;
    let limits = cfg.limits();
    use CommandName as N;
    let out = match cfg.command {
        N::Validate => Outcome::ok(json!({ "valid": true, "vertices": g.n() }), format!("ok ({} vertices)\n", g.n())),
        N::Invariants => {
            let zmin = g.minimal_cycle();
            let v = json!({
                "vertices": g.n(),
                "det": g.det().to_string(),
                "discriminant_order": g.discriminant_order().to_string(),
                "zk": format_ratcycle(g, g.zk()),
                "zk_integral": g.zk().is_integral(),
                "zmin": format_cycle(g, &zmin),
                "chi_zmin": g.chi_int(&zmin),
            });
            let human = format!(
                "det {}\nZ_K = {}\nZ_min = {}\n|H| = {}\nchi(Z_min) = {}\n",
                v["det"].as_str().unwrap_or(""),
                v["zk"].as_str().unwrap_or(""),
                v["zmin"].as_str().unwrap_or(""),
                v["discriminant_order"].as_str().unwrap_or(""),
                v["chi_zmin"]
            );
            Outcome::ok(v, human)
        }
        N::Chi => {
            let mut v = json!({});
            let mut human = String::new();
            if let Some(t) = &cfg.cycle {
                let x = crate::format::parse_ratcycle(g, t)?;
                let c = g.chi(&x).to_string();
                human += &format!("chi(Z) = {c}\n");
                v["chi_cycle"] = json!(c);
            }
            if cfg.class.is_some() {
                let c = g.chi(&env.class()?).to_string();
                human += &format!("chi(l') = {c}\n");
                v["chi_class"] = json!(c);
            }
            if human.is_empty() {
                return Err(Error::Usage("chi requires -Z or -l".into()));
            }
            Outcome::ok(v, human)
        }
        N::Minchi => {
            let z = env.z()?;
            let l = env.class()?;
            let obj = Objective::chi_at(g, &-&l)?;
            let p = BoxProblem::new(g, Cycle::zero(g.n()), z, obj);
            let r = par_minimize_box(&p, &limits)?;
            let o = OptOut::of(g, &r);
            let human = format!("{}\nminimizers: {} (least {})\n", o.value, o.count, o.optimizers[0]);
            Outcome::ok(serde_json::to_value(o)?, human)
        }
        N::H1Generic => {
            let h = h1_o_generic(g, &env.z()?, &limits)?;
            Outcome::ok(json!({ "h1": h }), format!("{h}\n"))
        }
        N::H1Pic => {
            let r = h1_pic_generic(g, &env.z()?, &env.class()?, &limits)?;
            let o = OptOut::of(g, &r);
            let human = format!("{}\nminimizers: {} (least {})\n", o.value, o.count, o.optimizers[0]);
            Outcome::ok(json!({ "h1": o.value, "minimizers": o }), human)
        }
        N::H1Rel => {
            let ctx = env.ctx(oracle.get())?;
            let z = env.z()?;
            let l = env.class()?;
            let z1 = env.z1(&ctx, &z)?;
            let bundle = env.bundle(&ctx, &l, BundleDescriptor::generic_pic)?;
            let r = RelH1Out::of(g, &ctx.h1_rel_generic(&z, &z1, &l, &bundle)?);
            let mut human = format!(
                "{}\nbase: {} on {}\nminimizers: {} (least {})\n",
                r.value,
                format_descriptor(g, &bundle),
                format_cycle(g, &z1),
                r.minimizers.count,
                r.minimizers.optimizers[0]
            );
            let mut v = serde_json::to_value(&r)?;
            v["base_bundle"] = json!(format_descriptor(g, &bundle));
            v["z1"] = json!(format_cycle(g, &z1));
            v = with_warnings(v, &mut human, ctx.take_warnings());
            Outcome::ok(with_misses(v, oracle), human)
        }
        N::H1Natural => {
            let ctx = env.ctx(oracle.get())?;
            let r = RelH1Out::of(g, &ctx.h1_natural_relgen(&env.z()?, &env.class()?)?);
            let mut human = format!("{}\n", r.value);
            let v = with_warnings(serde_json::to_value(&r)?, &mut human, ctx.take_warnings());
            Outcome::ok(with_misses(v, oracle), human)
        }
        N::Dominant => {
            let ctx = env.ctx(oracle.get())?;
            let z = env.z()?;
            let l = env.class()?;
            let z1 = env.z1(&ctx, &z)?;
            let bundle = env.bundle(&ctx, &l, BundleDescriptor::generic_pic)?;
            let d = DominanceOut::of(g, &ctx.rel_dominant(&z, &z1, &l, &bundle)?);
            let mut human = format!("{}\n", d.dominant);
            if let Some(w) = &d.witness {
                human += &format!("witness: {w}\n");
            }
            let v = with_warnings(serde_json::to_value(&d)?, &mut human, ctx.take_warnings());
            Outcome::ok(with_misses(v, oracle), human)
        }
        N::BInvariant => {
            let ctx = env.ctx(oracle.get())?;
            let z = env.z()?;
            let l = env.class()?;
            let family = match &cfg.bundle {
                Some(t) => BaseFamily::Fixed(parse_descriptor(g, t)?),
                None => BaseFamily::GenericAbelImage,
            };
            let b = BOut::of(g, &b_invariant(&ctx, &z, &l, &family)?);
            let mut human = format!("{}\noptimal cycle: {}\n", b.value, b.optimal);
            for c in &b.components {
                human += &format!("  component {}: g={} D={} T={}\n", c.cycle, c.g, c.d, c.t);
            }
            let v = with_warnings(serde_json::to_value(&b)?, &mut human, ctx.take_warnings());
            Outcome::ok(with_misses(v, oracle), human)
        }
        N::Blowup => {
            let vertex = env.require(&cfg.vertex, "--vertex")?;
            let m = blow_up(g, vertex, None)?;
            let t = &m.target;
            let mut v = json!({
                "graph": GraphDoc::of(t),
                "new_vertex": t.id(m.new_vertex),
            });
            let mut human = graph_to_text(t);
            if cfg.cycle.is_some() {
                let z = format_cycle(t, &m.pullback_int(&env.z()?)?);
                human += &format!("# pullback of Z: {z}\n");
                v["cycle"] = json!(z);
            }
            if cfg.class.is_some() {
                let pl = m.pullback(&env.class()?)?;
                let s = match cfg.coords {
                    Coords::Estar => format_class_estar(t, &pl)?,
                    Coords::E => format_ratcycle(t, &pl),
                };
                human += &format!("# pullback of l': {s}\n");
                v["class"] = json!(s);
            }
            Outcome::ok(v, human)
        }
        N::AbelDim => abel_dim(env, oracle, sinks)?,
        N::Fuzz => unreachable!("handled above"),
    };
    Ok(out)
}

fn abel_dim(env: &Env, oracle: &OracleBox, sinks: &Sinks) -> Result<Outcome> {
    let g = &env.graph;
    let cfg = &env.cfg;
    let limits = cfg.limits();
    let z = env.z()?;
    let l = env.class()?;
    if cfg.compare {
        let c = compare(g, &z, &l, &limits, cfg.tower_cap);
        let mut human = String::new();
        for (k, v) in [("generic", c.generic), ("h1", c.via_h1), ("section5", c.section5), ("tower", c.tower)] {
            human += &match v {
                Some(x) => format!("{k}: {x}\n"),
                None => format!("{k}: skipped\n"),
            };
        }
        for (k, e) in &c.errors {
            human += &format!("error in {k}: {e}\n");
        }
        let ok = c.agrees();
        human += if ok { "agree\n" } else { "DISAGREE\n" };
        return Ok(Outcome { result: serde_json::to_value(&c)?, human, success: ok });
    }
    let mode = cfg.mode.unwrap_or(AbelMode::Generic);
    let base_ids = || cfg.v1.clone().unwrap_or_default();
    let (report, warnings) = match mode {
        AbelMode::Generic => (dim_abel_generic(g, &z, &l, &limits)?, Vec::new()),
        AbelMode::H1 => {
            if cfg.v1.is_some() {
                let s = RelGenericStructure::new(base_ids(), oracle.get(), cfg.hypothesis.into(), limits.clone());
                let r = dim_abel_via_h1(g, &z, &l, &s, &limits)?;
                (r, s.warnings())
            } else {
                (dim_abel_via_h1(g, &z, &l, &GenericStructure { limits: limits.clone() }, &limits)?, Vec::new())
            }
        }
        AbelMode::Relative => {
            let ctx = env.ctx(oracle.get())?;
            let bundle = env.bundle(&ctx, &l, BundleDescriptor::generic_abel_image)?;
            (dim_rel_abel(&ctx, &z, &l, &bundle, None)?, ctx.take_warnings())
        }
        AbelMode::Section5 => {
            let ctx = env.ctx(oracle.get())?;
            (dim_abel_section5(&ctx, &z, &l)?, ctx.take_warnings())
        }
        AbelMode::Tower => {
            let spec = build_tower(g, &z, &l, cfg.tower_cap)?;
            let r = if cfg.v1.is_some() {
                let s = RelGenericStructure::new(base_ids(), oracle.get(), cfg.hypothesis.into(), limits.clone());
                let r = d_recursion(&spec, &s)?;
                (r, s.warnings())
            } else {
                (d_recursion(&spec, &GenericStructure { limits: limits.clone() })?, Vec::new())
            };
            let (r, warnings) = r;
            if let Some(p) = &sinks.emit_table {
                std::fs::write(p, tower_table(&spec, &r)).map_err(|source| Error::Io { path: p.clone(), source })?;
            }
            let t = TowerOut::of(&spec, &r);
            let mut human = format!("{}\nh1(O_Z): {}\ntower size: {}\n", t.d0, t.h1, t.size);
            for v in &t.violations {
                human += &format!("violation: {v}\n");
            }
            let ok = t.violations.is_empty();
            let v = with_warnings(serde_json::to_value(&t)?, &mut human, warnings);
            return Ok(Outcome { result: with_misses(v, oracle), human, success: ok });
        }
    };
    let mut out = AbelOut::of(g, &report);
    out.warnings.extend(warnings);
    out.warnings.sort();
    out.warnings.dedup();
    let human = out.human();
    let v = with_misses(serde_json::to_value(&out)?, oracle);
    Ok(Outcome::ok(v, human))
}

fn write_misses(misses: &[String], sinks: &Sinks) -> Result<()> {
    if let Some(p) = &sinks.misses {
        let lines: String = misses.iter().map(|m| format!("{m} = ?\n")).collect();
        std::fs::write(p, lines).map_err(|source| Error::Io { path: p.clone(), source })?;
    }
    Ok(())
}
