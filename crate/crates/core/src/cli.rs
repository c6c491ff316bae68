//! Command-line front end: argument parsing, input loading, dispatch and
//! report rendering.
//!
//! Exit codes: `0` when a value was computed or a checked property holds,
//! `1` when a checked property fails (the report carries the witness), `2`
//! on malformed input or usage errors.

use crate::axioms::{self, Mode};
use crate::exec::Exec;
use crate::lattice::{HeytingAlgebra, LatticeFile};
use crate::line::{self, OpenRegion, PiecewiseFile, PiecewiseFn, RegionFile, StratumShape};
use crate::logic::{self, LineFrame, Validity};
use crate::nilpotent::{self, TruncatedPoly};
use crate::poly::Poly;
use crate::rational::{fmt_q, parse_q, Q};
use crate::sheaf::{self, Presheaf, PresheafFile, SheafVerdict, Stalk};
use crate::space::{Continuity, FiniteSpace, MapFile, PointMap, SpaceFile};
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Value,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub value: Value,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub witnesses: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Holds | Verdict::Value => 0,
            Verdict::Fails => 1,
            Verdict::Error => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Renders a report. JSON keys are sorted, so equal reports render to equal
/// bytes.
pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = format!("{}: {}\n", report.command, verdict_word(report.verdict));
            if let Some(mode) = report.mode {
                out.push_str(&format!("mode: {}\n", mode_word(mode)));
            }
            if !report.value.is_null() {
                out.push_str(&format!("value:{}\n", text_value(&report.value)));
            }
            if !report.witnesses.is_null() {
                out.push_str(&format!("witness:{}\n", text_value(&report.witnesses)));
            }
            if let Some(e) = &report.error {
                out.push_str(&format!("error: {e}\n"));
            }
            out
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Fails => "fails",
        Verdict::Value => "value",
        Verdict::Error => "error",
    }
}

fn mode_word(m: Mode) -> &'static str {
    match m {
        Mode::AsWritten => "as-written",
        Mode::Corrected => "corrected",
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Scalars inline; arrays of composites and objects one entry per line.
fn text_value(v: &Value) -> String {
    match v {
        Value::Array(items) if items.iter().any(|i| i.is_array() || i.is_object()) => items
            .iter()
            .map(|i| format!("\n  - {}", compact(i)))
            .collect(),
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| format!("\n  {k}: {}", compact(v)))
            .collect(),
        other => format!(" {}", compact(other)),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "continuum",
    about = "Point-free topology workbench: locales, finite spaces, the interval frame, sheaves, Heyting logic and nilpotent calculus",
    after_help = "Alexandrov spaces use the down-set convention: opens are the down-closed sets of the preorder.\n\
                  Closures are intersections of closed supersets (not of open supersets).\n\
                  Rationals are written `p/q` or `n`; infinite endpoints as `-inf` / `+inf`.\n\
                  File arguments accept a path or inline JSON."
)]
pub struct Cli {
    /// Emit the machine-readable JSON report.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for every randomized sampling step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Run scans on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Group,
}

#[derive(Debug, Subcommand)]
pub enum Group {
    /// Finite Heyting algebras.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Finite topological spaces.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Open regions and piecewise functions on the line.
    #[command(subcommand)]
    Line(LineCmd),
    /// Connectivity and divisibility axioms.
    #[command(subcommand)]
    Axioms(AxiomsCmd),
    /// Presheaves, stalks and gluing.
    #[command(subcommand)]
    Sheaf(SheafCmd),
    /// Truncated polynomial rings Q[e]/(e^N).
    #[command(subcommand)]
    Nil(NilCmd),
    /// Intuitionistic propositional logic.
    #[command(subcommand)]
    Logic(LogicCmd),
}

#[derive(Debug, Args)]
pub struct LatticeArg {
    /// Lattice JSON (`elements`, `order`, optional `top`/`bottom`).
    #[arg(long)]
    pub lattice: String,
}

#[derive(Debug, Subcommand)]
pub enum LatticeCmd {
    /// Validate a lattice and summarize it.
    Validate(LatticeArg),
    Meet {
        #[command(flatten)]
        l: LatticeArg,
        a: String,
        b: String,
    },
    Join {
        #[command(flatten)]
        l: LatticeArg,
        a: String,
        b: String,
    },
    /// Heyting implication a -> b.
    Implies {
        #[command(flatten)]
        l: LatticeArg,
        a: String,
        b: String,
    },
    /// Pseudo-complement a -> bottom.
    Not {
        #[command(flatten)]
        l: LatticeArg,
        a: String,
    },
}

#[derive(Debug, Args)]
pub struct SpaceArg {
    /// Space JSON (`points`, `opens`).
    #[arg(long)]
    pub space: String,
}

#[derive(Debug, Args)]
pub struct SetArg {
    /// Comma-separated point names (may be empty).
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    pub set: String,
}

#[derive(Debug, Subcommand)]
pub enum SpaceCmd {
    /// Validate an explicit family of opens.
    Validate(SpaceArg),
    /// Build the Alexandrov space (down-sets) of a preorder.
    Alexandrov {
        /// Comma-separated point names.
        #[arg(long)]
        points: String,
        /// Comma-separated pairs `a<=b`.
        #[arg(long, default_value = "")]
        order: String,
    },
    Interior {
        #[command(flatten)]
        s: SpaceArg,
        #[command(flatten)]
        set: SetArg,
    },
    Closure {
        #[command(flatten)]
        s: SpaceArg,
        #[command(flatten)]
        set: SetArg,
    },
    Boundary {
        #[command(flatten)]
        s: SpaceArg,
        #[command(flatten)]
        set: SetArg,
    },
    /// Whether an open set is connected.
    Connected {
        #[command(flatten)]
        s: SpaceArg,
        #[command(flatten)]
        set: SetArg,
    },
    /// Connected components of an open set.
    Components {
        #[command(flatten)]
        s: SpaceArg,
        #[command(flatten)]
        set: SetArg,
    },
    /// Continuity of a point map (target defaults to the source space).
    Continuous {
        #[command(flatten)]
        s: SpaceArg,
        #[arg(long)]
        target: Option<String>,
        /// Map JSON `{"map": {"p": "q"}}`.
        #[arg(long)]
        map: String,
    },
    /// The Heyting algebra of opens.
    OpensLattice(SpaceArg),
}

#[derive(Debug, Args)]
pub struct RegionArg {
    /// Region JSON (`intervals` with `lo`/`hi`).
    #[arg(long)]
    pub u: String,
}

#[derive(Debug, Args)]
pub struct FnArg {
    /// Piecewise function JSON (`breakpoints`, `pieces`, `values`).
    #[arg(long = "fn")]
    pub function: String,
}

#[derive(Debug, Subcommand)]
pub enum LineCmd {
    Meet {
        #[command(flatten)]
        u: RegionArg,
        #[arg(long)]
        v: String,
    },
    Join {
        #[command(flatten)]
        u: RegionArg,
        #[arg(long)]
        v: String,
    },
    /// Interior of the complement.
    Not(RegionArg),
    Implies {
        #[command(flatten)]
        u: RegionArg,
        #[arg(long)]
        v: String,
    },
    Boundary(RegionArg),
    /// Cut a region at an interior point.
    Divide {
        #[command(flatten)]
        u: RegionArg,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Whether the complement is closed and bounded.
    Compact(RegionArg),
    Germ {
        #[command(flatten)]
        f: FnArg,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    Catastrophe(FnArg),
    Strata {
        #[command(flatten)]
        f: FnArg,
        #[arg(long, default_value_t = line::DEFAULT_K_MAX)]
        k_max: u32,
    },
    /// Leftmost x in [a, b] with f(x) = c (piecewise-linear f).
    Ivt {
        #[command(flatten)]
        f: FnArg,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    AsWritten,
    Corrected,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::AsWritten => Mode::AsWritten,
            ModeArg::Corrected => Mode::Corrected,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum AxiomsCmd {
    /// Check the three axioms on a lattice or on the opens of a space.
    Check {
        #[arg(long, conflicts_with = "space", required_unless_present = "space")]
        lattice: Option<String>,
        #[arg(long)]
        space: Option<String>,
        #[arg(long, value_enum, default_value = "corrected")]
        mode: ModeArg,
    },
    /// Witness-based divisibility on line regions.
    CheckLine {
        /// JSON array of regions.
        #[arg(long)]
        samples: Option<String>,
        /// Number of seeded random regions (default 1000 without --samples).
        #[arg(long)]
        random: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct PresheafArg {
    /// Presheaf JSON (`space`, `sections`, `restrictions`).
    #[arg(long)]
    pub presheaf: String,
}

#[derive(Debug, Subcommand)]
pub enum SheafCmd {
    /// Check functoriality (restrictions may be given on covers only).
    Validate(PresheafArg),
    /// Check the gluing condition.
    Check(PresheafArg),
    Stalk {
        #[command(flatten)]
        p: PresheafArg,
        #[arg(long)]
        point: String,
    },
    /// Sections over the neighbourhoods of a closed set.
    Topos {
        #[command(flatten)]
        p: PresheafArg,
        /// Comma-separated points of the closed set.
        #[arg(long)]
        closed: String,
    },
    /// Smallest open invariant under a homeomorphism containing a set.
    Hull {
        #[arg(long, conflicts_with = "presheaf", required_unless_present = "presheaf")]
        space: Option<String>,
        #[arg(long)]
        presheaf: Option<String>,
        /// Map JSON `{"map": {...}}`.
        #[arg(long)]
        perm: String,
        #[command(flatten)]
        set: SetArg,
    },
}

#[derive(Debug, Args)]
pub struct OrderArg {
    #[arg(long, default_value_t = 2)]
    pub order: usize,
}

#[derive(Debug, Subcommand)]
pub enum NilCmd {
    Add {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        o: OrderArg,
    },
    Mul {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        o: OrderArg,
    },
    Neg {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[command(flatten)]
        o: OrderArg,
    },
    /// f(x + e) in Q[e]/(e^N).
    Lift {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[command(flatten)]
        o: OrderArg,
    },
    /// f'(x) via dual numbers.
    Derive {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Expand d(yz) over the dual numbers.
    Leibniz {
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum LogicCmd {
    /// Parse and pretty-print a formula.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Evaluate in a lattice (`--assign p=a`) or the line frame (`--assign-region p=<region>`).
    Eval {
        #[arg(long)]
        formula: String,
        #[arg(long, conflicts_with = "assign_region")]
        lattice: Option<String>,
        #[arg(long)]
        assign: Vec<String>,
        #[arg(long)]
        assign_region: Vec<String>,
    },
    /// Exhaustive validity in a finite algebra.
    Valid {
        #[arg(long)]
        formula: String,
        #[command(flatten)]
        l: LatticeArg,
        #[arg(long, default_value_t = logic::DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Search chains, then other small algebras, for a countermodel.
    Counter {
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 5)]
        max_size: usize,
        #[arg(long, default_value_t = logic::DEFAULT_BUDGET)]
        budget: u64,
    },
}

/// Every library operation and the one subcommand that reaches it.
pub const OPERATIONS: &[(&str, &str)] = &[
    ("build_lattice", "lattice validate"),
    ("meet", "lattice meet"),
    ("join", "lattice join"),
    ("implies", "lattice implies"),
    ("pseudo_complement", "lattice not"),
    ("validate_space", "space validate"),
    ("alexandrov_from_preorder", "space alexandrov"),
    ("interior", "space interior"),
    ("closure", "space closure"),
    ("boundary", "space boundary"),
    ("is_connected_open", "space connected"),
    ("components", "space components"),
    ("is_continuous", "space continuous"),
    ("opens_lattice", "space opens-lattice"),
    ("region_meet", "line meet"),
    ("region_join", "line join"),
    ("region_not", "line not"),
    ("region_implies", "line implies"),
    ("region_boundary", "line boundary"),
    ("divide", "line divide"),
    ("is_compact_complement", "line compact"),
    ("germ_at", "line germ"),
    ("catastrophe_set", "line catastrophe"),
    ("strata", "line strata"),
    ("ivt_witness", "line ivt"),
    ("check_global_connectivity", "axioms check"),
    ("check_local_connectivity", "axioms check"),
    ("check_divisibility", "axioms check"),
    ("check_divisibility_line", "axioms check-line"),
    ("validate_presheaf", "sheaf validate"),
    ("check_sheaf", "sheaf check"),
    ("stalk_at_point", "sheaf stalk"),
    ("topos_of", "sheaf topos"),
    ("invariant_hull", "sheaf hull"),
    ("add", "nil add"),
    ("mul", "nil mul"),
    ("neg", "nil neg"),
    ("lift_and_eval", "nil lift"),
    ("derivative", "nil derive"),
    ("leibniz_check", "nil leibniz"),
    ("parse", "logic parse"),
    ("eval", "logic eval"),
    ("is_valid", "logic valid"),
    ("find_countermodel", "logic counter"),
];

/// Names of every leaf subcommand, as `"group sub"`.
pub fn subcommand_paths() -> Vec<String> {
    Cli::command()
        .get_subcommands()
        .flat_map(|g| {
            let group = g.get_name().to_string();
            g.get_subcommands()
                .map(move |s| format!("{group} {}", s.get_name()))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Outcome = Result<(Verdict, Value, Value), Failure>;

fn load<T: DeserializeOwned>(arg: &str) -> Result<T, Failure> {
    let trimmed = arg.trim_start();
    let (name, text) = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        ("<inline>".to_string(), arg.to_string())
    } else {
        let text = std::fs::read_to_string(arg)
            .map_err(|e| Failure(format!("cannot read {arg}: {e}")))?;
        (arg.to_string(), text)
    };
    serde_json::from_str(&text).map_err(|e| {
        let msg = e.to_string();
        let msg = msg.split(" at line ").next().unwrap_or_default();
        Failure(format!(
            "input parse error in {name} at line {}, column {}: {msg}",
            e.line(),
            e.column()
        ))
    })
}

fn load_lattice(arg: &str) -> Result<HeytingAlgebra, Failure> {
    Ok(HeytingAlgebra::from_file(&load::<LatticeFile>(arg)?)?)
}

fn load_space(arg: &str) -> Result<FiniteSpace, Failure> {
    Ok(FiniteSpace::from_file(&load::<SpaceFile>(arg)?)?)
}

fn load_region(arg: &str) -> Result<OpenRegion, Failure> {
    Ok(OpenRegion::from_file(&load::<RegionFile>(arg)?)?)
}

fn load_fn(arg: &str) -> Result<PiecewiseFn, Failure> {
    Ok(PiecewiseFn::from_file(&load::<PiecewiseFile>(arg)?)?)
}

fn load_presheaf(arg: &str) -> Result<Presheaf, Failure> {
    Ok(Presheaf::from_file(&load::<PresheafFile>(arg)?)?)
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::to_string)
        .collect()
}

fn q_arg(s: &str) -> Result<Q, Failure> {
    Ok(parse_q(s)?)
}

fn truncated(s: &str, order: usize) -> Result<TruncatedPoly, Failure> {
    Ok(TruncatedPoly::new(Poly::parse_csv(s)?.coeffs().to_vec(), order)?)
}

fn region_json(r: &OpenRegion) -> Value {
    serde_json::to_value(r.to_file()).expect("json")
}

fn points_json(ps: &[Q]) -> Value {
    json!(ps.iter().map(fmt_q).collect::<Vec<_>>())
}

fn truncated_json(t: &TruncatedPoly) -> Value {
    json!({
        "order": t.order(),
        "coeffs": t.coeffs().iter().map(fmt_q).collect::<Vec<_>>(),
        "text": t.to_string(),
    })
}

fn value(v: Value) -> Outcome {
    Ok((Verdict::Value, v, Value::Null))
}

fn check(holds: bool, v: Value, witness: Value) -> Outcome {
    Ok((
        if holds { Verdict::Holds } else { Verdict::Fails },
        v,
        if holds { Value::Null } else { witness },
    ))
}

fn stalk_json(p: &Presheaf, s: &Stalk) -> Value {
    let show = |i: usize| p.space().show(p.space().opens()[i]);
    json!({
        "neighbourhoods": s.neighbourhoods.iter().map(|&i| show(i)).collect::<Vec<_>>(),
        "canonical_open": show(s.canonical_open),
        "sections": p.sections(s.canonical_open),
        "classes": s.classes.iter().map(|c| json!({
            "germ": p.label(s.canonical_open, c.canonical),
            "members": c.members.iter().map(|&(u, t)| json!([show(u), p.label(u, t)])).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

struct Ctx {
    seed: u64,
    exec: Exec,
}

fn run_lattice(cmd: &LatticeCmd) -> Outcome {
    match cmd {
        LatticeCmd::Validate(l) => {
            let file = load::<LatticeFile>(&l.lattice)?;
            match HeytingAlgebra::from_file(&file) {
                Ok(a) => check(
                    true,
                    json!({
                        "elements": a.names(),
                        "top": a.name(a.top()),
                        "bottom": a.name(a.bottom()),
                        "chain": a.is_chain(),
                        "boolean": a.is_boolean(),
                    }),
                    Value::Null,
                ),
                Err(e) => check(false, Value::Null, json!(e.to_string())),
            }
        }
        LatticeCmd::Meet { l, a, b } => value(json!(load_lattice(&l.lattice)?.meet_named(a, b)?)),
        LatticeCmd::Join { l, a, b } => value(json!(load_lattice(&l.lattice)?.join_named(a, b)?)),
        LatticeCmd::Implies { l, a, b } => {
            value(json!(load_lattice(&l.lattice)?.implies_named(a, b)?))
        }
        LatticeCmd::Not { l, a } => {
            value(json!(load_lattice(&l.lattice)?.pseudo_complement_named(a)?))
        }
    }
}

fn run_space(cmd: &SpaceCmd) -> Outcome {
    let subset_of = |s: &FiniteSpace, set: &SetArg| s.subset(&split_list(&set.set));
    match cmd {
        SpaceCmd::Validate(s) => {
            let file = load::<SpaceFile>(&s.space)?;
            match FiniteSpace::from_file(&file) {
                Ok(sp) => check(true, json!({ "opens": sp.opens().len() }), Value::Null),
                Err(e) => check(false, Value::Null, json!(e.to_string())),
            }
        }
        SpaceCmd::Alexandrov { points, order } => {
            let pts = split_list(points);
            let pairs = split_list(order)
                .into_iter()
                .map(|p| {
                    p.split_once("<=")
                        .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                        .ok_or_else(|| Failure(format!("expected `a<=b`, got `{p}`")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let sp = FiniteSpace::alexandrov(&pts, &pairs)?;
            value(serde_json::to_value(sp.to_file())?)
        }
        SpaceCmd::Interior { s, set } => {
            let sp = load_space(&s.space)?;
            value(json!(sp.names_of(sp.interior(subset_of(&sp, set)?))))
        }
        SpaceCmd::Closure { s, set } => {
            let sp = load_space(&s.space)?;
            value(json!(sp.names_of(sp.closure(subset_of(&sp, set)?))))
        }
        SpaceCmd::Boundary { s, set } => {
            let sp = load_space(&s.space)?;
            value(json!(sp.names_of(sp.boundary(subset_of(&sp, set)?))))
        }
        SpaceCmd::Connected { s, set } => {
            let sp = load_space(&s.space)?;
            let u = subset_of(&sp, set)?;
            let connected = sp.is_connected_open(u)?;
            let witness = sp
                .split_open(u)
                .map(|(v, w)| json!([sp.names_of(v), sp.names_of(w)]))
                .unwrap_or(Value::Null);
            check(connected, Value::Null, witness)
        }
        SpaceCmd::Components { s, set } => {
            let sp = load_space(&s.space)?;
            let comps = sp.components(subset_of(&sp, set)?)?;
            value(json!(comps.iter().map(|&c| sp.names_of(c)).collect::<Vec<_>>()))
        }
        SpaceCmd::Continuous { s, target, map } => {
            let src = load_space(&s.space)?;
            let tgt = match target {
                Some(t) => load_space(t)?,
                None => src.clone(),
            };
            let m = load::<MapFile>(map)?;
            let f = PointMap::new(src, tgt.clone(), &m.map)?;
            match f.is_continuous() {
                Continuity::Continuous => check(true, Value::Null, Value::Null),
                Continuity::Discontinuous { witness } => {
                    check(false, Value::Null, json!({ "open": tgt.names_of(witness) }))
                }
            }
        }
        SpaceCmd::OpensLattice(s) => {
            let sp = load_space(&s.space)?;
            value(serde_json::to_value(sp.opens_lattice().to_file())?)
        }
    }
}

fn run_line(cmd: &LineCmd) -> Outcome {
    match cmd {
        LineCmd::Meet { u, v } => value(region_json(&load_region(&u.u)?.meet(&load_region(v)?))),
        LineCmd::Join { u, v } => value(region_json(&load_region(&u.u)?.join(&load_region(v)?))),
        LineCmd::Not(u) => value(region_json(&load_region(&u.u)?.not())),
        LineCmd::Implies { u, v } => {
            value(region_json(&load_region(&u.u)?.implies(&load_region(v)?)))
        }
        LineCmd::Boundary(u) => value(points_json(&load_region(&u.u)?.boundary())),
        LineCmd::Divide { u, at } => {
            let (w, v) = load_region(&u.u)?.divide(&q_arg(at)?)?;
            value(json!({ "lower": region_json(&w), "upper": region_json(&v) }))
        }
        LineCmd::Compact(u) => {
            let r = load_region(&u.u)?;
            check(r.is_compact_complement(), Value::Null, region_json(&r.not()))
        }
        LineCmd::Germ { f, at } => {
            let g = load_fn(&f.function)?.germ_at(&q_arg(at)?);
            value(json!({
                "at": fmt_q(&g.at),
                "left": g.left.to_strings(),
                "value": fmt_q(&g.value),
                "right": g.right.to_strings(),
            }))
        }
        LineCmd::Catastrophe(f) => value(points_json(&load_fn(&f.function)?.catastrophe_set())),
        LineCmd::Strata { f, k_max } => {
            let strata = load_fn(&f.function)?.strata(*k_max);
            value(json!(strata
                .iter()
                .map(|s| match &s.shape {
                    StratumShape::Open(iv) => json!({
                        "interval": { "lo": iv.lo().to_string(), "hi": iv.hi().to_string() },
                        "class": s.class.to_string(),
                    }),
                    StratumShape::Point(x) => json!({ "point": fmt_q(x), "class": s.class.to_string() }),
                })
                .collect::<Vec<_>>()))
        }
        LineCmd::Ivt { f, a, b, c } => {
            let x = load_fn(&f.function)?.ivt_witness(&q_arg(a)?, &q_arg(b)?, &q_arg(c)?)?;
            value(json!(fmt_q(&x)))
        }
    }
}

fn run_axioms(cmd: &AxiomsCmd, ctx: &Ctx) -> Result<(Verdict, Value, Value, Option<Mode>), Failure> {
    match cmd {
        AxiomsCmd::Check {
            lattice,
            space,
            mode,
        } => {
            let algebra = match (lattice, space) {
                (Some(l), _) => load_lattice(l)?,
                (None, Some(s)) => load_space(s)?.opens_lattice(),
                (None, None) => return Err(Failure("need --lattice or --space".into())),
            };
            let mode = Mode::from(*mode);
            let reports = axioms::check_all(&algebra, mode, ctx.exec);
            let failing: Vec<_> = reports.iter().filter(|r| !r.holds).cloned().collect();
            let (v, val, w) = check(failing.is_empty(), serde_json::to_value(&reports)?, serde_json::to_value(&failing)?)?;
            Ok((v, val, w, Some(mode)))
        }
        AxiomsCmd::CheckLine { samples, random } => {
            let mut regions: Vec<OpenRegion> = match samples {
                Some(s) => load::<Vec<RegionFile>>(s)?
                    .iter()
                    .map(OpenRegion::from_file)
                    .collect::<Result<_, _>>()?,
                None => Vec::new(),
            };
            let count = random.unwrap_or(if samples.is_some() { 0 } else { 1000 });
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            regions.extend((0..count).map(|_| OpenRegion::random(&mut rng, false)));
            let out = axioms::check_divisibility_line(&regions, ctx.exec)?;
            let shown: Vec<Value> = out
                .splits
                .iter()
                .take(if samples.is_some() { usize::MAX } else { 0 })
                .map(|s| {
                    json!({
                        "region": region_json(&s.region),
                        "cut": fmt_q(&s.cut),
                        "lower": region_json(&s.lower),
                        "upper": region_json(&s.upper),
                        "passed": s.passed,
                    })
                })
                .collect();
            let (v, val, w) = check(
                out.report.holds,
                json!({ "samples": out.splits.len(), "report": out.report, "splits": shown }),
                serde_json::to_value(&out.report.witness)?,
            )?;
            Ok((v, val, w, Some(Mode::Corrected)))
        }
    }
}

fn run_sheaf(cmd: &SheafCmd, ctx: &Ctx) -> Outcome {
    match cmd {
        SheafCmd::Validate(p) => {
            let file = load::<PresheafFile>(&p.presheaf)?;
            match Presheaf::from_file(&file) {
                Ok(_) => check(true, Value::Null, Value::Null),
                Err(e) => check(false, Value::Null, json!(e.to_string())),
            }
        }
        SheafCmd::Check(p) => {
            let ps = load_presheaf(&p.presheaf)?;
            match ps.check_sheaf(ctx.exec) {
                SheafVerdict::Sheaf => check(true, Value::Null, Value::Null),
                SheafVerdict::NotSheaf(w) => {
                    check(false, Value::Null, serde_json::to_value(ps.describe(&w))?)
                }
            }
        }
        SheafCmd::Stalk { p, point } => {
            let ps = load_presheaf(&p.presheaf)?;
            let stalk = ps.stalk_at_point(point)?;
            value(stalk_json(&ps, &stalk))
        }
        SheafCmd::Topos { p, closed } => {
            let ps = load_presheaf(&p.presheaf)?;
            let stalk = ps.topos_of(&split_list(closed))?;
            value(stalk_json(&ps, &stalk))
        }
        SheafCmd::Hull {
            space,
            presheaf,
            perm,
            set,
        } => {
            let sp = match (space, presheaf) {
                (Some(s), _) => load_space(s)?,
                (None, Some(p)) => load_presheaf(p)?.space().clone(),
                (None, None) => return Err(Failure("need --space or --presheaf".into())),
            };
            let m = load::<MapFile>(perm)?;
            let phi = PointMap::new(sp.clone(), sp.clone(), &m.map)?;
            let k = sp.subset(&split_list(&set.set))?;
            value(json!(sp.names_of(sheaf::invariant_hull(&phi, k)?)))
        }
    }
}

fn run_nil(cmd: &NilCmd) -> Outcome {
    match cmd {
        NilCmd::Add { a, b, o } => value(truncated_json(
            &truncated(a, o.order)?.add(&truncated(b, o.order)?)?,
        )),
        NilCmd::Mul { a, b, o } => value(truncated_json(
            &truncated(a, o.order)?.mul(&truncated(b, o.order)?)?,
        )),
        NilCmd::Neg { a, o } => value(truncated_json(&truncated(a, o.order)?.neg())),
        NilCmd::Lift { poly, at, o } => value(truncated_json(&nilpotent::lift_and_eval(
            &Poly::parse_csv(poly)?,
            &q_arg(at)?,
            o.order,
        )?)),
        NilCmd::Derive { poly, at } => value(json!(fmt_q(&nilpotent::derivative(
            &Poly::parse_csv(poly)?,
            &q_arg(at)?
        )))),
        NilCmd::Leibniz { y, z } => {
            let t = nilpotent::leibniz_check(&truncated(y, 2)?, &truncated(z, 2)?)?;
            check(
                t.holds,
                json!({
                    "y": truncated_json(&t.y),
                    "z": truncated_json(&t.z),
                    "y_dz": fmt_q(&t.y_dz),
                    "z_dy": fmt_q(&t.z_dy),
                    "d_yz": fmt_q(&t.d_yz),
                    "discarded_dy_dz": fmt_q(&t.discarded),
                    "trace": format!(
                        "(y+dy)(z+dz) - yz = ({})e + ({})e + ({})e^2; e^2 = 0 discards {}; d(yz) = {}e",
                        fmt_q(&t.y_dz), fmt_q(&t.z_dy), fmt_q(&t.discarded), fmt_q(&t.discarded), fmt_q(&t.d_yz)
                    ),
                }),
                Value::Null,
            )
        }
    }
}

fn parse_assignments(items: &[String]) -> Result<Vec<(String, String)>, Failure> {
    items
        .iter()
        .map(|a| {
            a.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Failure(format!("expected `atom=value`, got `{a}`")))
        })
        .collect()
}

fn run_logic(cmd: &LogicCmd, ctx: &Ctx) -> Outcome {
    match cmd {
        LogicCmd::Parse { formula } => {
            let f = logic::parse(formula)?;
            value(json!({ "formula": f.to_string(), "atoms": f.atoms() }))
        }
        LogicCmd::Eval {
            formula,
            lattice,
            assign,
            assign_region,
        } => {
            let f = logic::parse(formula)?;
            match lattice {
                Some(l) => {
                    let a = load_lattice(l)?;
                    let mut v = BTreeMap::new();
                    for (k, e) in parse_assignments(assign)? {
                        v.insert(k, a.element(&e)?);
                    }
                    let r = logic::eval(&f, &a, &v)?;
                    value(json!({ "value": a.name(r), "top": r == a.top() }))
                }
                None => {
                    let mut v = BTreeMap::new();
                    for (k, r) in parse_assignments(assign_region)? {
                        v.insert(k, load_region(&r)?);
                    }
                    let r = logic::eval(&f, &LineFrame, &v)?;
                    value(json!({ "value": region_json(&r), "top": r.is_top() }))
                }
            }
        }
        LogicCmd::Valid {
            formula,
            l,
            budget,
        } => {
            let f = logic::parse(formula)?;
            let a = load_lattice(&l.lattice)?;
            match logic::is_valid(&f, &a, *budget, ctx.exec)? {
                Validity::Valid => check(true, Value::Null, Value::Null),
                Validity::Invalid(c) => check(
                    false,
                    Value::Null,
                    json!({ "assignment": c.assignment, "value": c.value }),
                ),
            }
        }
        LogicCmd::Counter {
            formula,
            max_size,
            budget,
        } => {
            let f = logic::parse(formula)?;
            match logic::find_countermodel(&f, *max_size, *budget, ctx.exec)? {
                None => check(true, Value::Null, Value::Null),
                Some(m) => check(
                    false,
                    Value::Null,
                    json!({
                        "algebra": m.algebra.name,
                        "lattice": m.algebra.algebra.to_file(),
                        "assignment": m.valuation.assignment,
                        "value": m.valuation.value,
                    }),
                ),
            }
        }
    }
}

fn command_name(g: &Group) -> String {
    let sub = match g {
        Group::Lattice(_) | Group::Space(_) | Group::Line(_) | Group::Axioms(_)
        | Group::Sheaf(_) | Group::Nil(_) | Group::Logic(_) => {
            let dbg = format!("{g:?}");
            // `Lattice(Meet { .. })` -> "meet"
            let inner = dbg.split_once('(').map_or("", |(_, r)| r);
            let word: String = inner.chars().take_while(|c| c.is_alphanumeric()).collect();
            kebab(&word)
        }
    };
    let group = match g {
        Group::Lattice(_) => "lattice",
        Group::Space(_) => "space",
        Group::Line(_) => "line",
        Group::Axioms(_) => "axioms",
        Group::Sheaf(_) => "sheaf",
        Group::Nil(_) => "nil",
        Group::Logic(_) => "logic",
    };
    format!("{group} {sub}")
}

fn kebab(camel: &str) -> String {
    let mut out = String::new();
    for (i, c) in camel.chars().enumerate() {
        if c.is_uppercase() {
            if i > 0 {
                out.push('-');
            }
            out.extend(c.to_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

/// Runs a parsed command and builds its report.
pub fn run(cli: &Cli) -> Report {
    let ctx = Ctx {
        seed: cli.seed,
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
    };
    let result = match &cli.command {
        Group::Lattice(c) => run_lattice(c).map(|(a, b, c)| (a, b, c, None)),
        Group::Space(c) => run_space(c).map(|(a, b, c)| (a, b, c, None)),
        Group::Line(c) => run_line(c).map(|(a, b, c)| (a, b, c, None)),
        Group::Axioms(c) => run_axioms(c, &ctx),
        Group::Sheaf(c) => run_sheaf(c, &ctx).map(|(a, b, c)| (a, b, c, None)),
        Group::Nil(c) => run_nil(c).map(|(a, b, c)| (a, b, c, None)),
        Group::Logic(c) => run_logic(c, &ctx).map(|(a, b, c)| (a, b, c, None)),
    };
    let command = command_name(&cli.command);
    match result {
        Ok((verdict, value, witnesses, mode)) => Report {
            schema_version: SCHEMA_VERSION,
            command,
            verdict,
            value,
            witnesses,
            mode,
            seed: cli.seed,
            error: None,
        },
        Err(Failure(msg)) => Report {
            schema_version: SCHEMA_VERSION,
            command,
            verdict: Verdict::Error,
            value: Value::Null,
            witnesses: Value::Null,
            mode: None,
            seed: cli.seed,
            error: Some(msg),
        },
    }
}

/// Output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (including the program name), runs it and renders the report.
pub fn dispatch<I, T>(argv: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Invocation { code, stdout: text, stderr: String::new() }
            } else {
                Invocation { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let report = run(&cli);
    let format = if cli.json { Format::Json } else { Format::Text };
    let stderr = report
        .error
        .as_ref()
        .map(|e| format!("error: {e}\n"))
        .unwrap_or_default();
    let stdout = if report.verdict == Verdict::Error && format == Format::Text {
        String::new()
    } else {
        emit(&report, format)
    };
    Invocation {
        code: report.exit_code(),
        stdout,
        stderr,
    }
}
