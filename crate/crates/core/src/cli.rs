//! Command-line front end. `run` parses arguments, merges a JSON config
//! under the flags, dispatches to the library and returns the exit code:
//! 0 on success, 1 when a verification fails, 2 on usage or parameter errors.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::aut::{
    brute_force_aut, check_phi, check_twisted, count_h_aut, h_aut_predicate, h_equivalence_search,
    h_predicate_triples, inequivalence_certificate, phi_aut_predicate, phi_order,
    phi_predicate_triples, phi_report, preserves, sample_equivalence, square_closed_form, std_set,
    AutReport, ORACLE_BUDGET, SEARCH_BUDGET,
};
use crate::circulant::{SpaceModel, SpaceParams};
use crate::codes::{
    build_phi, build_twisted, min_rank_distance, rank_distribution, verify_mrd, Code,
    CODEWORD_BUDGET,
};
use crate::error::Error;
use crate::field::{make_field, FEl, Field};
use crate::forms::{to_std, AutTriple, AutTripleJson};
use crate::fq::FqMat;
use crate::io::{distribution_csv, emit, load_config, to_sorted_json, ConfigFile};

#[derive(Parser, Debug)]
#[command(
    name = "rankforge",
    version,
    about = "Rank-metric codes in circulant models"
)]
pub struct Cli {
    /// JSON file with defaults for any parameter flag
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel scans
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Phi,
    Twisted,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Theory,
    Count,
    Oracle,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a field and describe it
    Field(FieldArgs),
    #[command(subcommand)]
    Code(CodeOp),
    #[command(subcommand)]
    Aut(AutOp),
    /// Search for an equivalence between two twisted codes
    Equiv(EquivArgs),
    #[command(subcommand)]
    Cert(CertOp),
}

#[derive(Args, Debug)]
struct FieldArgs {
    #[arg(long)]
    p: u64,
    #[arg(long = "degree", visible_alias = "E")]
    degree: u32,
    /// Monic modulus coefficients, constant term first
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
}

#[derive(Subcommand, Debug)]
enum CodeOp {
    Build(Params),
    Mindist(Params),
    VerifyMrd(Params),
    /// Rank distribution, CSV by default
    Export(Params),
}

#[derive(Subcommand, Debug)]
enum AutOp {
    Order {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "theory")]
        method: Method,
    },
    Check {
        #[command(flatten)]
        params: Params,
        /// AutTriple JSON
        #[arg(long)]
        triple: String,
    },
}

#[derive(Args, Debug)]
struct EquivArgs {
    #[command(flatten)]
    params: Params,
    #[arg(long)]
    nu: Option<u64>,
    #[arg(long)]
    u: Option<u32>,
    /// Random elements of Aut(Ω) to try when no structured witness exists
    #[arg(long, default_value_t = 0)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum CertOp {
    Inequiv(Params),
}

#[derive(Args, Debug, Clone, Default)]
struct Params {
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    /// μ as its canonical integer in the ambient field
    #[arg(long)]
    mu: Option<u64>,
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Modulus of the ambient field, constant term first
    #[arg(long, value_delimiter = ',')]
    modulus: Option<Vec<u32>>,
    #[arg(long)]
    max_codewords: Option<u128>,
    #[arg(long)]
    max_oracle: Option<u128>,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type Res<T> = std::result::Result<T, Failure>;

struct Outcome {
    body: String,
    ok: bool,
}

fn json_out(v: &Value, ok: bool) -> Res<Outcome> {
    Ok(Outcome {
        body: to_sorted_json(v)?,
        ok,
    })
}

/// Flags merged over the config file and budget defaults.
struct Run {
    p: Params,
    cfg: ConfigFile,
    format: Format,
}

fn env_budget() -> Option<u128> {
    std::env::var("RANKFORGE_BUDGET").ok()?.trim().parse().ok()
}

impl Run {
    fn req<T: Copy>(&self, flag: Option<T>, cfg: Option<T>, name: &str) -> Res<T> {
        flag.or(cfg)
            .ok_or_else(|| Failure::Usage(format!("missing --{name}")))
    }

    fn q(&self) -> Res<u64> {
        self.req(self.p.q, self.cfg.q, "q")
    }
    fn m(&self) -> Res<u32> {
        self.req(self.p.m, self.cfg.m, "m")
    }
    fn n(&self) -> Res<u32> {
        self.req(self.p.n, self.cfg.n, "n")
    }
    fn t(&self) -> Res<u32> {
        self.req(self.p.t, self.cfg.t, "t")
    }
    fn s(&self) -> Res<u32> {
        self.req(self.p.s, self.cfg.s, "s")
    }
    fn k(&self) -> u32 {
        self.p.k.or(self.cfg.k).unwrap_or(1)
    }

    fn kind(&self) -> Res<Kind> {
        if let Some(k) = self.p.kind {
            return Ok(k);
        }
        match self.cfg.kind.as_deref() {
            None => Err(Failure::Usage("missing --kind".into())),
            Some(name) => Kind::from_str(name, true)
                .map_err(|_| Failure::Usage(format!("unknown kind {name:?}"))),
        }
    }

    fn codeword_budget(&self) -> u128 {
        self.p
            .max_codewords
            .or(self.cfg.max_codewords)
            .or_else(env_budget)
            .unwrap_or(CODEWORD_BUDGET)
    }

    fn oracle_budget(&self) -> u128 {
        self.p
            .max_oracle
            .or(self.cfg.max_oracle)
            .or_else(env_budget)
            .unwrap_or(ORACLE_BUDGET)
    }

    fn model(&self) -> Res<SpaceModel> {
        let params = SpaceParams::new(self.q()?, self.m()?, self.n()?, self.k())?;
        let modulus = self.p.modulus.clone().or_else(|| self.cfg.modulus.clone());
        let field = match modulus {
            Some(md) => make_field(params.p(), params.h() * params.d(), Some(&md))?,
            None => params.ambient_field()?,
        };
        Ok(SpaceModel::with_field(&field, params)?)
    }

    fn element(
        &self,
        model: &SpaceModel,
        flag: Option<u64>,
        cfg: Option<u64>,
        name: &str,
    ) -> Res<FEl> {
        Ok(model.field.from_int(self.req(flag, cfg, name)?)?)
    }

    fn mu(&self, model: &SpaceModel) -> Res<FEl> {
        self.element(model, self.p.mu, self.cfg.mu, "mu")
    }

    fn code(&self, model: &SpaceModel) -> Res<(Code, Value)> {
        let p = model.params;
        let t = self.t()?;
        let mut desc = json!({ "q": p.q, "m": p.m, "n": p.n, "t": t, "k": p.k });
        let code = match self.kind()? {
            Kind::Phi => {
                desc["kind"] = json!("phi");
                build_phi(model, t)?
            }
            Kind::Twisted => {
                let mu = self.mu(model)?;
                let s = self.s()?;
                desc["kind"] = json!("twisted");
                desc["mu"] = json!(model.field.to_int(mu));
                desc["s"] = json!(s);
                build_twisted(model, t, mu, s)?
            }
        };
        Ok((code, desc))
    }

    fn json_only(&self) -> Res<()> {
        match self.format {
            Format::Json => Ok(()),
            Format::Csv => Err(Failure::Usage("this command only writes JSON".into())),
        }
    }
}

fn mat_ints(m: &FqMat, model: &SpaceModel) -> Value {
    let f = &model.field;
    let rows: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| {
            (0..m.cols)
                .map(|j| f.to_int(model.sf.elem(m.get(i, j))))
                .collect()
        })
        .collect();
    json!(rows)
}

fn describe_field(args: &FieldArgs) -> Res<Outcome> {
    let f = Field::new(args.p, args.degree, args.modulus.as_deref())?;
    let subfields: Vec<u32> = (1..=args.degree)
        .filter(|d| args.degree.is_multiple_of(*d))
        .collect();
    let spec = serde_json::to_value(f.spec()).map_err(|e| Error::Parse(e.to_string()))?;
    json_out(
        &json!({
            "field": spec,
            "order": f.order(),
            "generator": f.to_int(f.generator()),
            "subfield_degrees": subfields,
        }),
        true,
    )
}

fn code_op(run: &Run, op: &CodeOp) -> Res<Outcome> {
    let model = run.model()?;
    let (code, desc) = run.code(&model)?;
    let budget = run.codeword_budget();
    match op {
        CodeOp::Build(_) => {
            run.json_only()?;
            let gens: Vec<Value> = code.gens.iter().map(|g| mat_ints(g, &model)).collect();
            json_out(
                &json!({
                    "code": desc,
                    "dimension": code.dim(),
                    "size": code.size(),
                    "generators": gens,
                }),
                true,
            )
        }
        CodeOp::Mindist(_) => {
            code.check_budget(budget)?;
            eprintln!("scanning {} codewords", code.size());
            match run.format {
                Format::Json => {
                    let d = min_rank_distance(&code, budget)?;
                    json_out(&json!({ "code": desc, "min_distance": d }), true)
                }
                Format::Csv => Ok(Outcome {
                    body: distribution_csv(&rank_distribution(&code, budget)?),
                    ok: true,
                }),
            }
        }
        CodeOp::VerifyMrd(_) => {
            run.json_only()?;
            code.check_budget(budget)?;
            eprintln!("scanning {} codewords", code.size());
            let rep = verify_mrd(&code, budget)?;
            let ok = rep.is_mrd;
            let v = serde_json::to_value(&rep).map_err(|e| Error::Parse(e.to_string()))?;
            json_out(&v, ok)
        }
        CodeOp::Export(_) => {
            code.check_budget(budget)?;
            let dist = rank_distribution(&code, budget)?;
            match run.format {
                Format::Csv => Ok(Outcome {
                    body: distribution_csv(&dist),
                    ok: true,
                }),
                Format::Json => {
                    let rows: Vec<Value> = dist
                        .iter()
                        .enumerate()
                        .map(|(r, c)| json!({ "rank": r, "count": c }))
                        .collect();
                    json_out(&json!({ "code": desc, "distribution": rows }), true)
                }
            }
        }
    }
}

fn report_value(rep: &AutReport) -> Res<Value> {
    Ok(serde_json::to_value(rep).map_err(|e| Error::Parse(e.to_string()))?)
}

fn aut_order(run: &Run, method: Method) -> Res<Outcome> {
    run.json_only()?;
    let model = run.model()?;
    let p = model.params;
    let t = run.t()?;
    let kind = run.kind()?;
    let twisted = if kind == Kind::Twisted {
        let s = run.s()?;
        Some((run.mu(&model)?, s))
    } else {
        None
    };
    match method {
        Method::Theory => {
            let (closed, factors) = match twisted {
                None => {
                    check_phi(p, t)?;
                    (Some(phi_order(p)?), None)
                }
                Some((mu, s)) => {
                    check_twisted(&model, t, mu, s)?;
                    if p.m == p.n {
                        let (c, f) = square_closed_form(&model, mu, s, t);
                        (Some(c), Some(f))
                    } else {
                        (None, None)
                    }
                }
            };
            json_out(&json!({ "closed_form": closed, "factors": factors }), true)
        }
        Method::Count => {
            let rep = match twisted {
                None => phi_report(&model, t, SEARCH_BUDGET)?,
                Some((mu, s)) => count_h_aut(&model, mu, s, t, SEARCH_BUDGET)?,
            };
            let ok = rep.agreement;
            json_out(&report_value(&rep)?, ok)
        }
        Method::Oracle => {
            let (code, _) = run.code(&model)?;
            let triples = match twisted {
                None => phi_predicate_triples(&model, t, SEARCH_BUDGET)?,
                Some((mu, s)) => h_predicate_triples(&model, mu, s, t, SEARCH_BUDGET)?,
            };
            let square = p.m == p.n;
            eprintln!(
                "running the oracle over GL({}, {}) x GL({}, {})",
                p.m, p.q, p.n, p.q
            );
            let res = brute_force_aut(&code, square, run.oracle_budget())?;
            let predicted: Vec<_> = std_set(&model, &triples)?.into_iter().collect();
            let closed = match twisted {
                None => Some(phi_order(p)?),
                Some((mu, s)) if square => Some(square_closed_form(&model, mu, s, t).0),
                Some(_) => None,
            };
            let rep = AutReport::new(
                predicted.len() as u128,
                Some(res.tuples.len() as u128),
                closed,
                None,
            );
            let sets_equal = predicted == res.tuples;
            json_out(
                &json!({
                    "report": report_value(&rep)?,
                    "sets_equal": sets_equal,
                    "transpose_coset": res.transpose_tuples.len(),
                    "examined": res.examined,
                }),
                rep.agreement && sets_equal,
            )
        }
    }
}

fn aut_check(run: &Run, triple: &str) -> Res<Outcome> {
    run.json_only()?;
    let model = run.model()?;
    let t = run.t()?;
    let j: AutTripleJson =
        serde_json::from_str(triple).map_err(|e| Failure::Usage(format!("bad triple: {e}")))?;
    let tr = AutTriple::from_json(&model.field, &j)?;
    let (code, _) = run.code(&model)?;
    let predicate = match run.kind()? {
        Kind::Phi => phi_aut_predicate(&model, &tr, t)?,
        Kind::Twisted => h_aut_predicate(&model, &tr, t, run.mu(&model)?, run.s()?)?,
    };
    let acts = match to_std(&model, &tr) {
        Ok(s) => preserves(&s, &code.gens, &code.span(), &model.sf),
        Err(Error::Singular) => false,
        Err(e) => return Err(e.into()),
    };
    json_out(
        &json!({ "predicate": predicate, "preserves_code": acts }),
        predicate && acts,
    )
}

fn equiv(run: &Run, args: &EquivArgs) -> Res<Outcome> {
    run.json_only()?;
    let model = run.model()?;
    let t = run.t()?;
    let mu = run.mu(&model)?;
    let s = run.s()?;
    let nu = run.element(&model, args.nu, run.cfg.nu, "nu")?;
    let u = run.req(args.u, run.cfg.u, "u")?;
    let witness = h_equivalence_search(&model, t, mu, s, nu, u, SEARCH_BUDGET)?;
    let mut out = json!({
        "witness": witness.as_ref().map(|w| w.to_json(&model.field)),
        "found": witness.is_some(),
    });
    if witness.is_none() && args.samples > 0 {
        let from = build_twisted(&model, t, mu, s)?;
        let to = build_twisted(&model, t, nu, u)?;
        let hit = sample_equivalence(&from, &to, args.samples, args.seed)?;
        out["samples"] = json!(args.samples);
        out["sampled_map_found"] = json!(hit.is_some());
    }
    json_out(&out, true)
}

fn cert(run: &Run) -> Res<Outcome> {
    run.json_only()?;
    let model = run.model()?;
    let c = inequivalence_certificate(&model, run.mu(&model)?, run.s()?, run.t()?)?;
    let ok = c.verdict;
    let v = serde_json::to_value(&c).map_err(|e| Error::Parse(e.to_string()))?;
    json_out(&v, ok)
}

fn params_of(cmd: &Command) -> Params {
    match cmd {
        Command::Field(_) => Params::default(),
        Command::Code(
            CodeOp::Build(p) | CodeOp::Mindist(p) | CodeOp::VerifyMrd(p) | CodeOp::Export(p),
        ) => p.clone(),
        Command::Aut(AutOp::Order { params, .. } | AutOp::Check { params, .. }) => params.clone(),
        Command::Equiv(a) => a.params.clone(),
        Command::Cert(CertOp::Inequiv(p)) => p.clone(),
    }
}

fn execute(cli: &Cli) -> Res<(Outcome, Option<PathBuf>)> {
    let cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => ConfigFile::default(),
    };
    let format = match (cli.format, cfg.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some(name)) => Format::from_str(name, true)
            .map_err(|_| Failure::Usage(format!("unknown format {name:?}")))?,
        (None, None) => match cli.command {
            Command::Code(CodeOp::Export(_)) => Format::Csv,
            _ => Format::Json,
        },
    };
    if let Some(j) = cli.jobs.or(cfg.jobs) {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be positive".into()));
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global();
    }
    let out = cli.out.clone().or_else(|| cfg.out.clone());
    let run = Run {
        p: params_of(&cli.command),
        cfg,
        format,
    };
    for (name, v) in [
        ("max-codewords", run.codeword_budget()),
        ("max-oracle", run.oracle_budget()),
    ] {
        if v == 0 {
            return Err(Failure::Usage(format!("--{name} must be positive")));
        }
    }
    let outcome = match &cli.command {
        Command::Field(a) => {
            run.json_only()?;
            describe_field(a)?
        }
        Command::Code(op) => code_op(&run, op)?,
        Command::Aut(AutOp::Order { method, .. }) => aut_order(&run, *method)?,
        Command::Aut(AutOp::Check { triple, .. }) => aut_check(&run, triple)?,
        Command::Equiv(a) => equiv(&run, a)?,
        Command::Cert(CertOp::Inequiv(_)) => cert(&run)?,
    };
    Ok((outcome, out))
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok((outcome, path)) => {
            if let Err(e) = emit(&outcome.body, path.as_deref(), start.elapsed().as_millis()) {
                eprintln!("error: {e}");
                return 2;
            }
            if outcome.ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}
