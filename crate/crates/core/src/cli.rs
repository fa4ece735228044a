//! Batch command line: argument and config-file handling, dispatch, and
//! exit codes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, ValueEnum};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix};
use crate::projector::lattice::{DenominatorLattice, LatticeKind};
use crate::projector::{compare, Mode, OpExpr, Realization};
use crate::ratfield::RatFunc;
use crate::registry::{self, FactorParser};
use crate::report::{envelope, result_json};
use crate::rootsys::{normal_order_from_word, positive_roots, reduced_words_of_w0, render_order, render_word, RootDatum, SubalgebraSpec, Weight};
use crate::solver::{conjecture_report, solve, FactorizationProblem, SolveOptions, Status};
use crate::verma::TruncatedVerma;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Roots,
    NormalOrders,
    Projector,
    Verify,
    Solve,
    Denominators,
    Shapovalov,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Symbolic,
    Generic,
}

#[derive(Parser, Debug, Default)]
#[command(name = "extremal", version, about = "Extremal projectors for sl_n on truncated universal Verma modules")]
pub struct Args {
    /// May instead be given as `command=` in the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Plain-text `key=value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub l: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "registry-id")]
    pub registry_id: Option<String>,
    /// Allow symbolic mode above rank 4.
    #[arg(long)]
    pub force: bool,
}

/// Fully resolved settings for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub depth: Option<usize>,
    pub mode: Mode,
    pub out: Option<PathBuf>,
    pub registry_id: Option<String>,
    /// Whether `mode` was asked for rather than defaulted from the rank.
    pub explicit_mode: bool,
    pub force: bool,
    pub seed: Option<u64>,
    pub trials: usize,
    /// Remaining keys: `l`, `m`, `m_lower`, `left`, `right`, `target`, `t`.
    pub keys: BTreeMap<String, String>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Internal(s) => write!(f, "internal error: {s}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::DecompositionFailure(_) | Error::DegenerateForm(_) | Error::NoGenericPoint(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub fn parse_config_text(text: &str) -> std::result::Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", no + 1)))?;
        out.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, CliError> {
    v.parse().map_err(|_| CliError::Usage(format!("bad value for {key}: {v:?}")))
}

impl RunConfig {
    pub fn resolve(args: &Args) -> std::result::Result<RunConfig, CliError> {
        let mut keys = match &args.config {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?;
                parse_config_text(&text)?
            }
            None => BTreeMap::new(),
        };
        let mut set = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                keys.insert(k.to_string(), v);
            }
        };
        set("n", args.n.map(|x| x.to_string()));
        set("l", args.l.clone());
        set("m", args.m.clone());
        set("depth", args.depth.map(|x| x.to_string()));
        set("mode", args.mode.map(|m| if m == ModeArg::Symbolic { "symbolic".into() } else { "generic".into() }));
        set("seed", args.seed.map(|x| x.to_string()));
        set("trials", args.trials.map(|x| x.to_string()));
        set("out", args.out.as_ref().map(|p| p.display().to_string()));
        set("registry_id", args.registry_id.clone());
        if args.force {
            keys.insert("force".into(), "true".into());
        }
        let command = match (args.command, keys.remove("command")) {
            (Some(c), _) => c,
            (None, Some(c)) => Command::from_str(&c, true).map_err(|_| CliError::Usage(format!("unknown command {c:?}")))?,
            (None, None) => return Err(CliError::Usage("no command given".into())),
        };
        let n = keys.remove("n").map(|v| parse_num::<usize>("n", &v)).transpose()?;
        let depth = keys.remove("depth").map(|v| parse_num::<usize>("depth", &v)).transpose()?;
        if depth == Some(0) {
            return Err(CliError::Usage("depth must be at least 1".into()));
        }
        let seed = keys.remove("seed").map(|v| parse_num::<u64>("seed", &v)).transpose()?;
        let trials = keys.remove("trials").map(|v| parse_num::<usize>("trials", &v)).transpose()?.unwrap_or(3);
        let force = keys.remove("force").is_some_and(|v| v == "true");
        let explicit_mode = keys.contains_key("mode");
        let mode = match keys.remove("mode").as_deref() {
            None => match (n, seed) {
                (Some(n), Some(seed)) if n > 3 => Mode::Generic { seed, trials },
                (Some(n), None) if n > 3 => Mode::Generic { seed: 1, trials },
                _ => Mode::Symbolic,
            },
            Some("symbolic") => Mode::Symbolic,
            Some("generic") => Mode::Generic { seed: seed.ok_or_else(|| CliError::Usage("generic mode requires --seed".into()))?, trials },
            Some(other) => return Err(CliError::Usage(format!("unknown mode {other:?}"))),
        };
        if mode == Mode::Symbolic && n.is_some_and(|n| n > 4) && !force {
            return Err(CliError::Usage("symbolic mode above rank 4 needs --force".into()));
        }
        if trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        let out = keys.remove("out").map(PathBuf::from);
        let registry_id = keys.remove("registry_id");
        Ok(RunConfig { command, n, depth, mode, out, registry_id, explicit_mode, force, seed, trials, keys })
    }

    /// The mode for a problem of rank `n`, which may only be known once a
    /// registry entry is loaded.
    pub fn mode_for(&self, n: usize) -> std::result::Result<Mode, CliError> {
        if !self.explicit_mode {
            return Ok(if n > 3 { Mode::Generic { seed: self.seed.unwrap_or(1), trials: self.trials } } else { Mode::Symbolic });
        }
        if self.mode == Mode::Symbolic && n > 4 && !self.force {
            return Err(CliError::Usage("symbolic mode above rank 4 needs --force".into()));
        }
        Ok(self.mode.clone())
    }

    fn need_n(&self) -> std::result::Result<usize, CliError> {
        self.n.ok_or_else(|| CliError::Usage("--n is required".into()))
    }

    fn spec(&self, key: &str) -> std::result::Result<Option<SubalgebraSpec>, CliError> {
        Ok(self.keys.get(key).map(|s| SubalgebraSpec::parse(s)).transpose()?)
    }
}

/// JSON payload plus whether the command found what was asked of it.
pub struct Outcome {
    pub json: Value,
    pub ok: bool,
}

fn matrix_json<S: Field + fmt::Display>(m: &Matrix<S>) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| m.get(i, j).to_string()).collect()).collect()
}

fn cmd_roots(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let n = cfg.need_n()?;
    let datum = RootDatum::new(n)?;
    let roots = positive_roots(n)?;
    let json = json!({
        "n": n,
        "positive_roots": roots.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "simple_roots": roots.iter().filter(|r| r.is_simple()).map(|r| r.to_string()).collect::<Vec<_>>(),
        "rho": datum.rho.to_string(),
    });
    Ok(Outcome { json, ok: true })
}

fn cmd_normal_orders(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let n = cfg.need_n()?;
    let words = reduced_words_of_w0(n)?;
    let orders: Vec<Value> = words
        .iter()
        .map(|w| Ok(json!({ "word": render_word(w), "order": render_order(&normal_order_from_word(n, w)?) })))
        .collect::<Result<_>>()?;
    Ok(Outcome { json: json!({ "n": n, "count": orders.len(), "orders": orders }), ok: true })
}

fn projector_expr(cfg: &RunConfig, n: usize) -> std::result::Result<OpExpr, CliError> {
    let l = cfg.spec("l")?.unwrap_or_else(SubalgebraSpec::cartan);
    l.validate_for(n)?;
    Ok(match cfg.spec("m")? {
        Some(m) if !m.is_full(n) => {
            m.validate_for(n)?;
            OpExpr::Relative { m, l }
        }
        _ => OpExpr::Direct(l),
    })
}

fn cmd_projector(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let n = cfg.need_n()?;
    let depth = cfg.depth.unwrap_or(3);
    let verma = Arc::new(TruncatedVerma::new(n, depth)?);
    let expr = projector_expr(cfg, n)?;
    let self_adjoint = compare(&verma, &expr.clone().adjoint(), &expr, &cfg.mode)?.equal;
    let (blocks, idempotent, support) = match &cfg.mode {
        Mode::Symbolic => {
            let op = Realization::<RatFunc>::new(verma.clone(), ()).operator(&expr)?;
            (serde_json::to_value(op.to_json()).map_err(|e| CliError::Internal(e.to_string()))?, op.is_idempotent(), op.support())
        }
        Mode::Generic { seed, .. } => {
            let (_, found) = crate::projector::compare::for_generic_points(&verma, *seed, 1, |real: &Realization<BigRational>| {
                let op = real.operator(&expr)?;
                Ok(Some((serde_json::to_value(op.to_json()).expect("plain strings"), op.is_idempotent(), op.support())))
            })?;
            found.expect("one trial").0
        }
    };
    let json = json!({
        "n": n,
        "depth": depth,
        "mode": cfg.mode.name(),
        "operator": expr.to_string(),
        "idempotent": idempotent,
        "self_adjoint": self_adjoint,
        "image_weights": support.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "blocks": blocks,
    });
    Ok(Outcome { json, ok: idempotent && self_adjoint })
}

fn cmd_verify(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let id = cfg.registry_id.as_deref().ok_or_else(|| CliError::Usage("--registry-id is required".into()))?;
    let ids: Vec<&str> = if id == "all" { registry::IDS.to_vec() } else { vec![id] };
    let mut outcomes = Vec::new();
    for id in ids {
        let mut entry = registry::lookup_at(id, cfg.seed, cfg.depth)?;
        entry.mode = cfg.mode_for(entry.n)?;
        outcomes.push(registry::run(&entry)?);
    }
    let ok = outcomes.iter().all(|o| o.passed);
    let json = if outcomes.len() == 1 { serde_json::to_value(&outcomes[0]) } else { serde_json::to_value(&outcomes) }.map_err(|e| CliError::Internal(e.to_string()))?;
    Ok(Outcome { json, ok })
}

/// A problem from `--registry-id` or from the keys `n l m m_lower left
/// right target depth`.
pub fn problem_from_config(cfg: &RunConfig) -> std::result::Result<FactorizationProblem, CliError> {
    if let Some(id) = &cfg.registry_id {
        let entry = registry::lookup_at(id, None, cfg.depth)?;
        return match entry.check {
            registry::Check::Solve { problem, .. } | registry::Check::Ambiguity { problem, .. } => Ok(problem),
            _ => Err(CliError::Usage(format!("registry entry {id} is not a factorization problem"))),
        };
    }
    let n = cfg.need_n()?;
    let depth = cfg.depth.unwrap_or(3);
    let l = cfg.spec("l")?.unwrap_or_else(SubalgebraSpec::cartan);
    let m = cfg.spec("m")?.ok_or_else(|| CliError::Usage("--m is required".into()))?;
    let middle_lower = cfg.spec("m_lower")?.unwrap_or_else(|| l.clone());
    let mut parser = FactorParser::new(n, depth);
    let list = |p: &mut FactorParser, k: &str| -> std::result::Result<Vec<OpExpr>, CliError> {
        Ok(match cfg.keys.get(k) {
            Some(v) => p.parse_list(v)?,
            None => Vec::new(),
        })
    };
    let left = list(&mut parser, "left")?;
    let right = list(&mut parser, "right")?;
    let target = match cfg.keys.get("target") {
        Some(v) => Some(OpExpr::Compose(parser.parse_list(v)?)),
        None => None,
    };
    let problem = FactorizationProblem { n, l, left, middle: m, middle_lower, right, target, depth };
    problem.validate()?;
    Ok(problem)
}

fn cmd_solve(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let problem = problem_from_config(cfg)?;
    let r = solve(&problem, &SolveOptions { mode: cfg.mode_for(problem.n)?, verify: true })?;
    let mut json = result_json(&r);
    if r.status == Status::Unique {
        json["conjecture"] = serde_json::to_value(conjecture_report(&r, problem.depth)?).map_err(|e| CliError::Internal(e.to_string()))?;
    }
    let verified = r.verification.as_ref().is_none_or(|v| v.equal);
    if r.status == Status::Unique && !verified {
        return Err(CliError::Internal("solved factor does not reproduce the target".into()));
    }
    Ok(Outcome { json, ok: r.status == Status::Unique })
}

fn cmd_denominators(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let n = cfg.need_n()?;
    let bound = cfg.depth.unwrap_or(2);
    if let Some(t) = cfg.keys.get("cartan_type") {
        crate::projector::lattice::check_type(t)?;
    }
    let l = cfg.spec("l")?.unwrap_or_else(SubalgebraSpec::cartan);
    let kind = match (cfg.keys.get("t"), l.is_cartan()) {
        (Some(t), _) => LatticeKind::RelativeT(l, Weight::parse(t)?),
        (None, true) => LatticeKind::Absolute,
        (None, false) => LatticeKind::Relative(l),
    };
    let lattice = DenominatorLattice::new(n, kind, bound)?;
    let mut json = serde_json::to_value(&lattice).map_err(|e| CliError::Internal(e.to_string()))?;
    if cfg.registry_id.is_some() {
        let problem = problem_from_config(cfg)?;
        let r = solve(&problem, &SolveOptions { mode: cfg.mode_for(problem.n)?, verify: false })?;
        if r.status == Status::Unique {
            json["conjecture"] = serde_json::to_value(conjecture_report(&r, problem.depth)?).map_err(|e| CliError::Internal(e.to_string()))?;
        }
    }
    Ok(Outcome { json, ok: true })
}

fn cmd_shapovalov(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    let n = cfg.need_n()?;
    let depth = cfg.depth.unwrap_or(2);
    let verma = TruncatedVerma::new(n, depth)?;
    let mut blocks = Vec::new();
    let mut symmetric = true;
    for b in verma.blocks() {
        let g = verma.gram_matrix(&b.weight)?;
        symmetric &= g.transpose() == g;
        blocks.push(json!({
            "weight": b.weight.to_string(),
            "basis": b.basis.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "gram": matrix_json(&g),
        }));
    }
    Ok(Outcome { json: json!({ "n": n, "depth": depth, "symmetric": symmetric, "blocks": blocks }), ok: symmetric })
}

pub fn execute(cfg: &RunConfig) -> std::result::Result<Outcome, CliError> {
    match cfg.command {
        Command::Roots => cmd_roots(cfg),
        Command::NormalOrders => cmd_normal_orders(cfg),
        Command::Projector => cmd_projector(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Solve => cmd_solve(cfg),
        Command::Denominators => cmd_denominators(cfg),
        Command::Shapovalov => cmd_shapovalov(cfg),
    }
}

fn command_name(c: Command) -> String {
    c.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

/// Runs one invocation and returns the process exit code.
pub fn main_with(argv: impl IntoIterator<Item = String>) -> i32 {
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = RunConfig::resolve(&args).and_then(|cfg| execute(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, o)) => {
            let text = serde_json::to_string_pretty(&envelope(&command_name(cfg.command), o.json)).expect("serializable") + "\n";
            match &cfg.out {
                Some(p) => {
                    if let Err(e) = std::fs::write(p, text) {
                        eprintln!("cannot write {}: {e}", p.display());
                        return EXIT_USAGE;
                    }
                }
                None => print!("{text}"),
            }
            if o.ok {
                EXIT_OK
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            eprintln!("{e}");
            match e {
                CliError::Usage(_) => EXIT_USAGE,
                CliError::Internal(_) => EXIT_INTERNAL,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> std::result::Result<RunConfig, CliError> {
        let argv = std::iter::once("extremal").chain(args.iter().copied()).map(String::from);
        RunConfig::resolve(&Args::try_parse_from(argv).unwrap())
    }

    #[test]
    fn config_text() {
        let k = parse_config_text("# problem\nn = 4\nleft=P123^12  # trailing\n\nregistry-id=x").unwrap();
        assert_eq!(k["n"], "4");
        assert_eq!(k["left"], "P123^12");
        assert_eq!(k["registry_id"], "x");
        assert!(parse_config_text("novalue").is_err());
    }

    #[test]
    fn resolution_rules() {
        assert_eq!(cfg(&["roots", "--n", "3"]).unwrap().mode, Mode::Symbolic);
        assert!(matches!(cfg(&["roots", "--n", "5", "--mode", "symbolic"]), Err(CliError::Usage(_))));
        assert!(cfg(&["roots", "--n", "5", "--mode", "symbolic", "--force"]).is_ok());
        assert!(matches!(cfg(&["roots", "--n", "3", "--mode", "generic"]), Err(CliError::Usage(_))));
        assert!(matches!(cfg(&["roots", "--depth", "0"]), Err(CliError::Usage(_))));
        assert!(matches!(cfg(&[]), Err(CliError::Usage(_))));
        assert_eq!(cfg(&["roots", "--n", "5"]).unwrap().mode, Mode::Generic { seed: 1, trials: 3 });
        let c = cfg(&["solve", "--registry-id", "sl5r2-i", "--mode", "symbolic"]).unwrap();
        assert!(matches!(c.mode_for(5), Err(CliError::Usage(_))));
        assert_eq!(c.mode_for(3).unwrap(), Mode::Symbolic);
        let c = cfg(&["verify", "--registry-id", "sl4-i", "--seed", "9", "--trials", "2"]).unwrap();
        assert_eq!(c.mode_for(4).unwrap(), Mode::Generic { seed: 9, trials: 2 });
        assert_eq!(c.mode_for(3).unwrap(), Mode::Symbolic);
    }

    #[test]
    fn normal_order_counts() {
        for (n, c) in [(2, 1), (3, 2), (4, 16)] {
            let o = execute(&cfg(&["normal-orders", "--n", &n.to_string()]).unwrap()).unwrap();
            assert_eq!(o.json["count"], c);
        }
    }
}
