//! Command-line front end: JSON in, JSON out, one report per run.
//!
//! Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or I/O
//! error, 3 a precondition of the requested operation does not hold.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::action::{act_infinitesimal, act_lower_with, ActOptions};
use crate::axioms::{verify, Checks};
use crate::error::Gw0Error;
use crate::frobenius::{check_frobenius_invariance, check_wdvv, structure_constants_unchecked};
use crate::loopgroup::{check_symplectic, exp_lie, w_matrices, GroupElement, LieElement};
use crate::matrix::Matrix;
use crate::potential::{change_frame, points_potential, Potential};
use crate::rank1::{
    check_rank1_relations, extract_extended, point_potential, rank1_coords, rank1_from_coords, reconstruct_from_c3,
    LinearForm, OrbitCoords,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

const DEFAULT_DEG: usize = 8;
const DEFAULT_ZMAX: usize = 6;

#[derive(Parser, Debug)]
#[command(name = "gw0", version, about = "Genus-zero potentials and the twisted loop group")]
struct Cli {
    /// Degree cap D (default 8 for generated potentials; lowers the cap of inputs)
    #[arg(long, global = true)]
    deg: Option<usize>,
    /// Level cap M (default 6 for generated potentials; restricts inputs)
    #[arg(long, global = true)]
    zmax: Option<usize>,
    /// Write the result here instead of embedding it in the report
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The point potential
    GenPoint,
    /// Sum of N point potentials in the unit-first frame
    GenPoints { n: usize },
    /// Run axiom checks on a potential
    Verify {
        input: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',')]
        only: Vec<CheckKind>,
    },
    /// Act by a group element
    Act {
        input: PathBuf,
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        allow_s1: bool,
        /// With --allow-s1: the input is complete, so no reliability is lost
        #[arg(long)]
        certified_complete: bool,
    },
    /// Act by exp of a Lie algebra element, or infinitesimally
    ActLie {
        input: PathBuf,
        #[arg(long)]
        lie: PathBuf,
        #[arg(long)]
        infinitesimal: bool,
    },
    /// Exponentiate a Lie algebra element
    ExpLie {
        #[arg(long)]
        lie: PathBuf,
        /// Truncation order (default 2 zmax + 1)
        #[arg(long)]
        order: Option<usize>,
    },
    /// The matrices W_{k,l} of a group element
    WMatrices {
        #[arg(long)]
        group: PathBuf,
        #[arg(long)]
        kmax: Option<usize>,
    },
    /// Small phase space: structure constants, WDVV, invariance
    Frobenius(FrobeniusArgs),
    /// Rank-one classification
    #[command(subcommand)]
    Rank1(Rank1Command),
    /// Re-express a potential in another basis
    ChangeFrame {
        input: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Args, Debug)]
struct FrobeniusArgs {
    input: PathBuf,
    #[arg(long, group = "mode")]
    wdvv: bool,
    /// The default mode
    #[arg(long, group = "mode")]
    constants: bool,
    #[arg(long, group = "mode", value_name = "S.json")]
    invariance: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Rank1Command {
    /// Orbit coordinates of a rank-one potential
    Coords { input: PathBuf },
    /// The orbit point with given coordinates
    FromCoords { coords: PathBuf },
    /// Rebuild a potential from its cube form
    Reconstruct { form: PathBuf },
    /// The cube form, extended through the quadratic stratum
    Cube { input: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CheckKind {
    De,
    Se,
    Trr,
    Cone,
    Rank1,
}

/// One verification outcome.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

/// Truncation data of a produced or inspected potential.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct Region {
    pub degcap: usize,
    pub zmax: usize,
    pub reliable_deg: i64,
}

impl Region {
    fn of(f: &Potential) -> Self {
        Region { degcap: f.degcap(), zmax: f.zmax(), reliable_deg: f.reliable() }
    }
}

/// Everything a run did, serialized with stable key order.
#[derive(Clone, Debug, Serialize, PartialEq)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub command: Vec<String>,
    /// Path to sha256 of every file read.
    pub inputs: BTreeMap<String, String>,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<Region>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub written: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_status: i32,
    /// Help or version text from the argument parser.
    #[serde(skip)]
    pub message: Option<String>,
}

enum Failure {
    Usage(String),
    Precondition(String),
}

impl From<Gw0Error> for Failure {
    fn from(e: Gw0Error) -> Self {
        match e {
            Gw0Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Precondition(e.to_string()),
        }
    }
}

type Step<T> = std::result::Result<T, Failure>;

struct Ctx {
    report: RunReport,
    deg: Option<usize>,
    zmax: Option<usize>,
    output: Option<PathBuf>,
}

impl Ctx {
    fn read_bytes(&mut self, path: &Path) -> Step<Vec<u8>> {
        let bytes = std::fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.report.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }

    fn read_json<T: DeserializeOwned>(&mut self, path: &Path) -> Step<T> {
        let bytes = self.read_bytes(path)?;
        serde_json::from_slice(&bytes).map_err(|e| Failure::Usage(format!("malformed JSON in {}: {e}", path.display())))
    }

    /// Reads a potential and applies `--deg`/`--zmax` as further truncation.
    fn read_potential(&mut self, path: &Path) -> Step<Potential> {
        let f: Potential = self.read_json(path)?;
        let mut s = f.into_series();
        if let Some(m) = self.zmax {
            s = s.restrict_levels(m);
        }
        if let Some(d) = self.deg {
            s = s.with_degcap(d);
        }
        Ok(Potential::new(s)?)
    }

    fn trunc(&self) -> (usize, usize) {
        (self.deg.unwrap_or(DEFAULT_DEG), self.zmax.unwrap_or(DEFAULT_ZMAX))
    }

    fn emit<T: Serialize>(&mut self, value: &T) -> Step<()> {
        match &self.output {
            Some(path) => {
                let mut text = to_json(value);
                text.push('\n');
                std::fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))?;
                self.report.written = Some(path.display().to_string());
            }
            None => self.report.output = Some(serde_json::to_value(value).expect("serializable")),
        }
        Ok(())
    }

    fn emit_potential(&mut self, f: &Potential) -> Step<()> {
        self.report.region = Some(Region::of(f));
        self.emit(f)
    }

    fn check(&mut self, name: &str, pass: bool, detail: Value) {
        self.report.checks.push(CheckOutcome { name: name.into(), pass, detail });
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

/// Parses `args` (program name first), runs the command and reports.
pub fn run<I, T>(args: I) -> RunReport
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let mut report = RunReport {
        command: args.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
        inputs: BTreeMap::new(),
        checks: Vec::new(),
        region: None,
        output: None,
        written: None,
        error: None,
        exit_status: EXIT_PASS,
        message: None,
    };
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            report.message = Some(e.render().to_string());
            if code != EXIT_PASS {
                report.error = Some(e.kind().to_string());
            }
            report.exit_status = code;
            return report;
        }
    };
    let mut ctx = Ctx { report, deg: cli.deg, zmax: cli.zmax, output: cli.output };
    let status = match execute(&mut ctx, cli.command) {
        Ok(()) if ctx.report.checks.iter().all(|c| c.pass) => EXIT_PASS,
        Ok(()) => EXIT_VERIFICATION,
        Err(Failure::Usage(msg)) => {
            ctx.report.error = Some(msg);
            EXIT_USAGE
        }
        Err(Failure::Precondition(msg)) => {
            ctx.report.error = Some(msg);
            EXIT_PRECONDITION
        }
    };
    ctx.report.exit_status = status;
    ctx.report
}

/// Entry point for the binary: sets up the thread pool, runs, prints the report.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    if let Ok(v) = std::env::var("GW0_THREADS") {
        match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                // a second initialization in the same process is harmless
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("GW0_THREADS must be an integer >= 1, got {v:?}");
                return EXIT_USAGE;
            }
        }
    }
    let report = run(args);
    match &report.message {
        Some(text) if report.exit_status == EXIT_PASS => print!("{text}"),
        Some(text) => eprint!("{text}"),
        None => println!("{}", to_json(&report)),
    }
    report.exit_status
}

fn execute(ctx: &mut Ctx, command: Command) -> Step<()> {
    match command {
        Command::GenPoint => {
            let (d, m) = ctx.trunc();
            ctx.emit_potential(&point_potential(d, m))
        }
        Command::GenPoints { n } => {
            let (d, m) = ctx.trunc();
            let f = points_potential(n, d, m)?;
            ctx.emit_potential(&f)
        }
        Command::Verify { input, only } => {
            let f = ctx.read_potential(&input)?;
            ctx.report.region = Some(Region::of(&f));
            verify_cmd(ctx, &f, &only)
        }
        Command::Act { input, group, allow_s1, certified_complete } => {
            let f = ctx.read_potential(&input)?;
            let s: GroupElement = ctx.read_json(&group)?;
            let opts = ActOptions { allow_s1, certified_complete, ..Default::default() };
            let h = act_lower_with(&s, &f, opts)?;
            ctx.emit_potential(&h)
        }
        Command::ActLie { input, lie, infinitesimal } => {
            let f = ctx.read_potential(&input)?;
            let a: LieElement = ctx.read_json(&lie)?;
            if infinitesimal {
                let v = act_infinitesimal(&a, &f)?;
                ctx.report.region = Some(Region { degcap: v.degcap(), zmax: v.zmax(), reliable_deg: v.reliable() });
                ctx.emit(&v)
            } else {
                let order = 2 * f.zmax() + 1;
                if a.zmax() > order {
                    return Err(Failure::Precondition(format!(
                        "Lie element reaches z^-{} beyond the needed order {order}",
                        a.zmax()
                    )));
                }
                let h = act_lower_with(&exp_lie(&a, order), &f, ActOptions::default())?;
                ctx.emit_potential(&h)
            }
        }
        Command::ExpLie { lie, order } => {
            let a: LieElement = ctx.read_json(&lie)?;
            let order = order.unwrap_or(2 * ctx.trunc().1 + 1);
            let g = exp_lie(&a, order);
            let rep = check_symplectic(g.series());
            ctx.check("symplectic", rep.pass, serde_json::to_value(&rep).expect("serializable"));
            ctx.emit(&g)
        }
        Command::WMatrices { group, kmax } => {
            let s: GroupElement = ctx.read_json(&group)?;
            let kmax = kmax.unwrap_or(s.order().saturating_sub(1) / 2);
            let w = w_matrices(&s, kmax)?;
            let bad = w.check_adjoint_symmetry();
            ctx.check("adjointSymmetry", bad.is_none(), bad.map_or(Value::Null, |(k, l)| json!({ "k": k, "l": l })));
            ctx.emit(&w)
        }
        Command::Frobenius(args) => {
            let f = ctx.read_potential(&args.input)?;
            ctx.report.region = Some(Region::of(&f));
            if args.wdvv {
                let rep = check_wdvv(&f);
                ctx.check("wdvv", rep.pass, serde_json::to_value(&rep).expect("serializable"));
                Ok(())
            } else if let Some(path) = args.invariance {
                let s: GroupElement = ctx.read_json(&path)?;
                let rep = check_frobenius_invariance(&s, &f)?;
                ctx.check("invariance", rep.pass, Value::Null);
                ctx.emit(&rep)
            } else {
                let t = structure_constants_unchecked(&f)?;
                ctx.check("unitAxiom", t.unit_axiom(), Value::Null);
                ctx.check("commutative", t.is_commutative(), Value::Null);
                ctx.check("associative", t.is_associative(), Value::Null);
                ctx.emit(&t)
            }
        }
        Command::Rank1(cmd) => rank1_cmd(ctx, cmd),
        Command::ChangeFrame { input, matrix } => {
            let f = ctx.read_potential(&input)?;
            let b: Matrix = ctx.read_json(&matrix)?;
            let g = change_frame(&f, &b)?;
            ctx.emit_potential(&g)
        }
    }
}

fn verify_cmd(ctx: &mut Ctx, f: &Potential, only: &[CheckKind]) -> Step<()> {
    let wanted = |k: CheckKind| only.is_empty() || only.contains(&k);
    let checks = Checks {
        dilaton: wanted(CheckKind::De),
        string: wanted(CheckKind::Se),
        trr: wanted(CheckKind::Trr),
        cone: wanted(CheckKind::Cone),
    };
    let rep = verify(f.series(), checks)?;
    let to_value = |c: &crate::axioms::CheckResult| serde_json::to_value(c).expect("serializable");
    if let Some(c) = &rep.dilaton {
        ctx.check("de", c.pass, to_value(c));
    }
    if let Some(c) = &rep.string {
        ctx.check("se", c.pass, to_value(c));
    }
    if checks.trr {
        let failing: Vec<Value> = rep
            .failing_trr()
            .map(|e| json!({ "klm": [e.k, e.l, e.m], "indices": [e.alpha, e.beta, e.gamma], "checkedDeg": e.checked_deg }))
            .collect();
        let detail = json!({ "relations": rep.trr.len(), "failing": failing });
        ctx.check("trr", failing.is_empty(), detail);
    }
    if let Some(c) = &rep.cone {
        ctx.check("cone", c.pass, to_value(c));
    }
    if only.contains(&CheckKind::Rank1) {
        let r = check_rank1_relations(f)?;
        let failing: Vec<&str> = r.failures().map(|x| x.name.as_str()).collect();
        ctx.check("rank1", r.pass(), json!({ "relations": r.relations.len(), "failing": failing }));
    }
    Ok(())
}

fn rank1_cmd(ctx: &mut Ctx, cmd: Rank1Command) -> Step<()> {
    match cmd {
        Rank1Command::Coords { input } => {
            let f = ctx.read_potential(&input)?;
            ctx.report.region = Some(Region::of(&f));
            let c = rank1_coords(&f)?;
            ctx.emit(&c)
        }
        Rank1Command::FromCoords { coords } => {
            let a: OrbitCoords = ctx.read_json(&coords)?;
            let (d, m) = ctx.trunc();
            let f = rank1_from_coords(&a, d, m)?;
            ctx.emit_potential(&f)
        }
        Rank1Command::Reconstruct { form } => {
            let l: LinearForm = ctx.read_json(&form)?;
            let (d, m) = ctx.trunc();
            let f = reconstruct_from_c3(&l, d, m)?;
            ctx.emit_potential(&f)
        }
        Rank1Command::Cube { input } => {
            let f = ctx.read_potential(&input)?;
            ctx.report.region = Some(Region::of(&f));
            let l = extract_extended(&f)?;
            ctx.emit(&l)
        }
    }
}
