//! Command-line driver: one subcommand per verification pipeline, JSON
//! reports on stdout or to a file, exit status 0/1/2.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cascade::{
    check_layer_characterization, check_pairing, check_partition, closed_form_beta, decompose, expand, format_combo,
};
use crate::error::{Error, Result};
use crate::inversion::{self, GaussianTestFunction, InversionOptions, Stage};
use crate::limits::{cascade_stability, check_well_aligned, default_gamma, factor_transitivity, DirectChain};
use crate::nilalg::{layer_subalgebras, verify_setup_axioms, NilpotentAlgebra};
use crate::plancherel::{homogeneity_holds, plancherel_density, QuasiCenterFunctional};
use crate::rational::{format_rational, parse_rational, q, qf, Q};
use crate::report::{ReportDocument, Row};
use crate::rootsys::{build_root_system, Family, RankParams, RootSystem, Series};
use crate::schrodinger::{
    check_rep_closed, coefficient_norm_sq_closed, coefficient_norm_sq_grid, coefficient_norm_sq_quadrature,
    stepwise_rep, GaussianState, HarnessId,
};
use crate::suite::{self, SuiteOptions, DEFAULT_SEED};

pub const REPORT_DIR_ENV: &str = "STEPWISE_REPORT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "stepwise",
    version,
    about = "Verification pipelines for stepwise square integrable nilradicals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Positive roots and simple roots of a classical system.
    Roots(CommonArgs),
    /// Strongly orthogonal cascade against the closed-form table.
    Cascade(CommonArgs),
    /// Layer partition, characterization and pairing.
    Layers(CommonArgs),
    /// Layer axioms on the split nilradical.
    Axioms(CommonArgs),
    /// Per-layer Pfaffians, the Plancherel density and homogeneity.
    Pfaffian(CommonArgs),
    /// Coefficient orthogonality on a harness.
    Orthogonality(CommonArgs),
    /// Restriction and renormalization along the A1 < A3 chain.
    Restriction(CommonArgs),
    /// Fourier inversion on a harness.
    Inversion(CommonArgs),
    /// Alignment, cascade stability and factor transitivity along a chain.
    LimitCheck(CommonArgs),
    /// Every criterion in order.
    All(CommonArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Roots(_) => "roots",
            Command::Cascade(_) => "cascade",
            Command::Layers(_) => "layers",
            Command::Axioms(_) => "axioms",
            Command::Pfaffian(_) => "pfaffian",
            Command::Orthogonality(_) => "orthogonality",
            Command::Restriction(_) => "restriction",
            Command::Inversion(_) => "inversion",
            Command::LimitCheck(_) => "limit-check",
            Command::All(_) => "all",
        }
    }

    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Roots(a)
            | Command::Cascade(a)
            | Command::Layers(a)
            | Command::Axioms(a)
            | Command::Pfaffian(a)
            | Command::Orthogonality(a)
            | Command::Restriction(a)
            | Command::Inversion(a)
            | Command::LimitCheck(a)
            | Command::All(a) => a,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Series letter A, B, C or D; `--n` is then the rank.
    #[arg(long)]
    pub series: Option<String>,
    /// Parity family such as `A2n+1` or `Cn`; `--n` is then the family index.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub rank: Option<usize>,
    /// HEIS<d>, A3, C2, B2 or A1<A3.
    #[arg(long)]
    pub harness: Option<String>,
    /// Comma-separated rationals, one per active layer.
    #[arg(long, alias = "gamma", value_delimiter = ',')]
    pub lambda: Vec<String>,
    /// closed, grid, quadrature or all.
    #[arg(long)]
    pub path: Option<String>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub half_width: Option<f64>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Chain length for limit-check.
    #[arg(long)]
    pub stages: Option<usize>,
    #[arg(long)]
    pub quick: bool,
    /// JSON run configuration; its fields override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print a plain-text table instead of JSON.
    #[arg(long)]
    pub table: bool,
}

/// Resolved settings for one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub harness: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub gamma: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<usize>,
    pub seed: u64,
    pub quick: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(command: &str, a: &CommonArgs) -> Self {
        RunConfig {
            command: command.into(),
            series: a.series.clone(),
            family: a.family.clone(),
            n: a.n.or(a.rank),
            harness: a.harness.clone(),
            gamma: a.lambda.clone(),
            path: a.path.clone(),
            points: a.points,
            half_width: a.half_width,
            resolution: a.resolution,
            tolerance: a.tolerance,
            stages: a.stages,
            seed: a.seed.unwrap_or(DEFAULT_SEED),
            quick: a.quick,
            out: a.out.clone(),
        }
    }

    /// Fields present in `file` replace the corresponding flag values.
    pub fn overlay(mut self, file: &Value) -> Result<Self> {
        let obj = file
            .as_object()
            .ok_or_else(|| Error::Config("config must be a JSON object".into()))?;
        let mut base = serde_json::to_value(&self).map_err(|e| Error::Config(e.to_string()))?;
        let target = base.as_object_mut().expect("struct serializes to an object");
        for (k, v) in obj {
            target.insert(k.clone(), v.clone());
        }
        let command = self.command.clone();
        self = serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))?;
        if self.command != command {
            return Err(Error::Config(format!(
                "config names command '{}' but '{command}' was invoked",
                self.command
            )));
        }
        Ok(self)
    }

    pub fn gamma_values(&self) -> Result<Vec<Q>> {
        self.gamma.iter().map(|s| parse_rational(s)).collect()
    }

    pub fn system(&self) -> Result<RootSystem> {
        let n = self.n.ok_or_else(|| Error::Config("--n is required".into()))?;
        let params = match (&self.series, &self.family) {
            (Some(s), None) => RankParams::from_series_rank(Series::parse(s)?, n)?,
            (None, Some(f)) => RankParams::new(Family::parse(f)?, n)?,
            (Some(_), Some(_)) => return Err(Error::Config("give --series or --family, not both".into())),
            (None, None) => return Err(Error::Config("--series or --family is required".into())),
        };
        build_root_system(params.series(), params)
    }

    pub fn harness_id(&self) -> Result<HarnessId> {
        self.harness
            .as_deref()
            .ok_or_else(|| Error::Config("--harness is required".into()))?
            .parse()
    }

    fn suite_options(&self) -> SuiteOptions {
        SuiteOptions {
            quick: self.quick,
            seed: self.seed,
        }
    }
}

/// Outcome of a run: the exit status and, unless configuration failed, the report.
pub struct Outcome {
    pub code: i32,
    pub report: Option<ReportDocument>,
    pub message: String,
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_)
            | Error::InvalidRational(_)
            | Error::UnsupportedSeries(_)
            | Error::RankTooSmall { .. }
            | Error::UnknownHarness(_)
            | Error::Singular(_)
            | Error::DimensionMismatch { .. }
    )
}

/// Parses `argv` (program name first) and executes the pipeline.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut args: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    // `stepwise run all` reads the same as `stepwise all`.
    if args.get(1).is_some_and(|a| a == "run") {
        args.remove(1);
    }
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                report: None,
                message: e.render().to_string(),
            };
        }
    };
    let a = cli.command.args();
    let mut cfg = RunConfig::from_args(cli.command.name(), a);
    if let Some(path) = &a.config {
        let loaded = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
            .and_then(|s| serde_json::from_str::<Value>(&s).map_err(|e| Error::Config(e.to_string())))
            .and_then(|v| cfg.clone().overlay(&v));
        match loaded {
            Ok(c) => cfg = c,
            Err(e) => return config_failure(e),
        }
    }
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) if is_config_error(&e) => return config_failure(e),
        Err(e) => ReportDocument::new(
            &cfg.command,
            inputs_echo(&cfg),
            vec![Row::error(cfg.command.clone(), &e, "pipeline did not complete")],
        ),
    };
    let text = if a.table {
        Ok(report.render_table())
    } else {
        report.to_json()
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            return Outcome {
                code: 1,
                report: Some(report),
                message: e.to_string(),
            }
        }
    };
    if let Some(path) = output_path(&cfg) {
        if let Err(e) = write_report(&path, &text) {
            return config_failure(e);
        }
    }
    Outcome {
        code: if report.pass { 0 } else { 1 },
        report: Some(report),
        message: text,
    }
}

fn config_failure(e: Error) -> Outcome {
    Outcome {
        code: 2,
        report: None,
        message: format!("error: {e}"),
    }
}

fn output_path(cfg: &RunConfig) -> Option<PathBuf> {
    if let Some(p) = &cfg.out {
        return Some(p.clone());
    }
    std::env::var_os(REPORT_DIR_ENV).map(|d| Path::new(&d).join(format!("{}.json", cfg.command)))
}

fn write_report(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::Config(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, format!("{text}\n")).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn inputs_echo(cfg: &RunConfig) -> Value {
    let mut v = serde_json::to_value(cfg).unwrap_or(Value::Null);
    if let Some(o) = v.as_object_mut() {
        o.remove("out");
        o.remove("command");
    }
    v
}

/// Runs the pipeline named by `cfg.command`.
pub fn execute(cfg: &RunConfig) -> Result<ReportDocument> {
    let inputs = inputs_echo(cfg);
    let doc = match cfg.command.as_str() {
        "roots" => roots(cfg)?,
        "cascade" => cascade(cfg)?,
        "layers" => layers(cfg)?,
        "axioms" => axioms(cfg)?,
        "pfaffian" => pfaffian(cfg)?,
        "orthogonality" => orthogonality(cfg)?,
        "restriction" => (suite::criterion_restriction(cfg.quick)?, Value::Null),
        "inversion" => inversion_cmd(cfg)?,
        "limit-check" => limit_check(cfg)?,
        "all" => {
            let groups = suite::run_all(cfg.suite_options())?;
            let summary: Vec<Value> = groups
                .iter()
                .map(|(name, rows)| json!({"criterion": name, "pass": rows.iter().all(|r| r.pass)}))
                .collect();
            (
                groups.into_iter().flat_map(|(_, r)| r).collect(),
                json!({ "criteria": summary }),
            )
        }
        other => return Err(Error::Config(format!("unknown command '{other}'"))),
    };
    let (rows, data) = doc;
    Ok(ReportDocument::new(&cfg.command, inputs, rows).with_data(data))
}

type Rows = (Vec<Row>, Value);

fn expected_positive_count(p: RankParams) -> usize {
    let l = p.rank();
    match p.series() {
        Series::A => l * (l + 1) / 2,
        Series::B | Series::C => l * l,
        Series::D => l * (l - 1),
    }
}

fn roots(cfg: &RunConfig) -> Result<Rows> {
    let s = cfg.system()?;
    let p = s.params().expect("classical");
    let rows = vec![
        Row::exact(
            "roots/positive-count",
            expected_positive_count(p).to_string(),
            s.positives().len().to_string(),
            "l(l+1)/2, l^2, l^2 or l(l-1) by series",
        ),
        Row::exact(
            "roots/simple-count",
            p.rank().to_string(),
            s.simple().len().to_string(),
            "rank",
        ),
    ];
    let data = json!({
        "system": s.to_json(),
        "cartan": s.cartan_matrix(),
    });
    Ok((rows, data))
}

fn cascade(cfg: &RunConfig) -> Result<Rows> {
    let s = cfg.system()?;
    let p = s.params().expect("classical");
    let d = decompose(&s)?;
    let table = closed_form_beta(p)?;
    let expanded = table.iter().map(|c| expand(&s, c)).collect::<Result<Vec<_>>>()?;
    let show = |v: &[crate::rootsys::Root]| v.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
    let rows = vec![
        Row::exact("cascade/beta", show(&expanded), show(&d.beta), "closed-form beta table"),
        Row::exact(
            "cascade/length",
            table.len().to_string(),
            d.m().to_string(),
            "closed-form beta table",
        ),
    ];
    let data = json!({
        "closed_form": table.iter().map(format_combo).collect::<Vec<_>>(),
        "cascade": d.to_json(),
    });
    Ok((rows, data))
}

fn layers(cfg: &RunConfig) -> Result<Rows> {
    let s = cfg.system()?;
    let d = decompose(&s)?;
    let mut rows = Vec::new();
    for (name, res) in [
        ("partition", check_partition(&s, &d)),
        ("characterization", check_layer_characterization(&s, &d)),
        ("pairing", check_pairing(&s, &d)),
    ] {
        rows.push(Row::exact(
            format!("layers/{name}"),
            "holds",
            match res {
                Ok(()) => "holds".to_string(),
                Err(e) => e.to_string(),
            },
            "exhaustive check over the positive roots",
        ));
    }
    Ok((rows, json!({ "d": d.d_list(), "cascade": d.to_json() })))
}

fn axioms(cfg: &RunConfig) -> Result<Rows> {
    let s = cfg.system()?;
    let alg = NilpotentAlgebra::realize(&s)?;
    let d = decompose(&s)?;
    let layers = layer_subalgebras(&alg, &d)?;
    let rep = verify_setup_axioms(&alg, &layers)?;
    let rows = rep
        .checks
        .iter()
        .map(|c| {
            Row::flag(
                format!("axioms/{}/r={}/s={}", c.axiom, c.r, c.s),
                true,
                c.pass,
                "exact brackets",
            )
        })
        .collect();
    Ok((rows, Value::Null))
}

fn pfaffian(cfg: &RunConfig) -> Result<Rows> {
    let s = cfg.system()?;
    let alg = NilpotentAlgebra::realize(&s)?;
    let d = decompose(&s)?;
    let layers = layer_subalgebras(&alg, &d)?;
    let gamma = if cfg.gamma.is_empty() {
        default_gamma(d.m())
    } else {
        cfg.gamma_values()?
    };
    let data = plancherel_density(&alg, &layers, &QuasiCenterFunctional::new(gamma.clone()))?;
    let mut rows = vec![Row::flag(
        "pfaffian/nonvanishing",
        true,
        data.in_t_star,
        "product of layer Pfaffians",
    )];
    for l in &layers {
        let lam = gamma.get(l.r - 1).cloned().unwrap_or_else(|| q(1));
        for sc in [q(2), qf(-1, 3)] {
            rows.push(Row::flag(
                format!("pfaffian/homogeneity/r={}/s={}", l.r, format_rational(&sc)),
                true,
                homogeneity_holds(&alg, l, &lam, &sc)?,
                "Pf(s lambda) = s^d Pf(lambda)",
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let count = if cfg.quick { 50 } else { 200 };
    let mut ok = 0;
    for _ in 0..count {
        let n = rng.gen_range(1..=8);
        let mut m = crate::rational::QMatrix::zeros(n, n);
        for i in 0..n {
            for j in i + 1..n {
                let v = qf(rng.gen_range(-5..=5), rng.gen_range(1..=4));
                m.set(j, i, -v.clone());
                m.set(i, j, v);
            }
        }
        let pf = crate::plancherel::pfaffian(&m)?;
        if &pf * &pf == m.determinant()? {
            ok += 1;
        }
    }
    rows.push(Row::exact(
        "pfaffian/square-equals-det",
        format!("{count}/{count}"),
        format!("{ok}/{count}"),
        "exact determinant",
    ));
    Ok((rows, serde_json::to_value(data.to_json()).unwrap_or(Value::Null)))
}

fn orthogonality(cfg: &RunConfig) -> Result<Rows> {
    let h = cfg.harness_id()?;
    let gamma = if cfg.gamma.is_empty() {
        match h {
            HarnessId::Heis(_) => vec![q(1)],
            _ => vec![q(1), q(2)],
        }
    } else {
        cfg.gamma_values()?
    };
    let rep = stepwise_rep(h, &gamma)?;
    let path = cfg.path.as_deref().unwrap_or("all");
    let u = suite::sample_packet(rep.state_dim);
    let v = GaussianState::standard(rep.state_dim);
    let tol = cfg.tolerance;
    let prov = "|u|^2 |v|^2 / |Pf(gamma)| from exact Pfaffians";
    let mut rows = Vec::new();
    let mut push = |name: &str, r: Result<crate::schrodinger::NormReport>, default_tol: f64| match r {
        Ok(r) => rows.push(Row::relative(
            format!("orthogonality/{name}"),
            r.predicted,
            r.measured,
            tol.unwrap_or(default_tol),
            prov,
        )),
        Err(e) => rows.push(Row::error(format!("orthogonality/{name}"), &e, prov)),
    };
    let want = |p: &str| path == "all" || path == p;
    if !["all", "closed", "grid", "quadrature"].contains(&path) {
        return Err(Error::Config(format!("unknown path '{path}'")));
    }
    if want("closed") {
        push("closed", coefficient_norm_sq_closed(&rep, &u, &v), 1e-6);
    }
    if want("grid") && matches!(h, HarnessId::Heis(_)) {
        push(
            "grid",
            coefficient_norm_sq_grid(&rep, &u, &v, cfg.points.unwrap_or(129), cfg.half_width.unwrap_or(6.0)),
            1e-3,
        );
    }
    if want("quadrature") && (path == "quadrature" || rep.section_coords().len() <= 2) {
        let mut o = suite::quad_options(rep.section_coords().len());
        if let Some(p) = cfg.points {
            o.points = p;
        }
        if let Some(w) = cfg.half_width {
            o.half_width = w;
        }
        push("quadrature", coefficient_norm_sq_quadrature(&rep, &u, &v, o), 1e-3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let coords = rep.active_coords();
    let dim = rep.group.dim();
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..8)
        .map(|_| {
            let mut draw = || {
                let mut x = vec![0.0; dim];
                for &i in &coords {
                    x[i] = rng.gen_range(-1.0..1.0);
                }
                x
            };
            (draw(), draw())
        })
        .collect();
    let inv = check_rep_closed(&rep, &pairs, &u)?;
    rows.push(Row::bound(
        "representation/homomorphism",
        1e-8,
        inv.homomorphism_err,
        "pi(g)pi(h) = pi(gh)",
    ));
    rows.push(Row::bound(
        "representation/unitarity",
        1e-8,
        inv.unitarity_err,
        "|pi(g)v| = |v|",
    ));
    let data = json!({
        "harness": h.to_string(),
        "gamma": gamma.iter().map(format_rational).collect::<Vec<_>>(),
        "pf_product": format_rational(&rep.pf_product),
        "predicted_over_norms": format_rational(&(q(1) / num_traits::Signed::abs(&rep.pf_product))),
    });
    Ok((rows, data))
}

fn inversion_cmd(cfg: &RunConfig) -> Result<Rows> {
    let h = cfg.harness_id().unwrap_or(HarnessId::Heis(1));
    let mut opts = InversionOptions::default();
    if let Some(r) = cfg.resolution {
        opts.resolution = r;
    }
    if let Some(t) = cfg.tolerance {
        opts.tolerance = t;
    }
    let prov = "value of the test function at x";
    let mut rows = Vec::new();
    match h {
        HarnessId::Heis(d) => {
            let st = Stage::heisenberg(d)?;
            let f = GaussianTestFunction::standard(st.dim());
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 7);
            let count = cfg.points.unwrap_or(if cfg.quick { 3 } else { 10 });
            let mut xs = vec![vec![0.0; st.dim()]];
            for _ in 0..count {
                xs.push((0..st.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect());
            }
            for (k, x) in xs.iter().enumerate() {
                let name = format!("inversion/{h}/point-{k}");
                match inversion::heisenberg_inversion(&st, &f, x, opts) {
                    Ok(r) => rows.push(Row::relative(name, r.expected[0], r.value[0], opts.tolerance, prov)),
                    Err(e) => rows.push(Row::error(name, &e, prov)),
                }
            }
        }
        HarnessId::A1InA3 => {
            let (s1, s2) = inversion::a1_a3_stages()?;
            let fb = GaussianTestFunction::standard(s2.dim());
            let r = inversion::limit_inversion_check(&s1, &s2, &fb, None, &[0.0], opts)?;
            rows.push(Row::bound(
                "inversion/A1<A3/agreement",
                1e-3,
                r.agreement,
                "both stages reconstruct f(x)",
            ));
            for (i, s) in r.stages.iter().enumerate() {
                rows.push(Row::relative(
                    format!("inversion/A1<A3/stage-{}", i + 1),
                    s.expected[0],
                    s.value[0],
                    1e-3,
                    prov,
                ));
            }
        }
        other => {
            return Err(Error::Config(format!(
                "inversion supports HEIS<d> and A1<A3, not {other}"
            )))
        }
    }
    Ok((rows, Value::Null))
}

fn limit_check(cfg: &RunConfig) -> Result<Rows> {
    let family = Family::parse(
        cfg.family
            .as_deref()
            .ok_or_else(|| Error::Config("--family is required".into()))?,
    )?;
    let n = cfg.n.unwrap_or(family.min_n());
    let stages = cfg.stages.unwrap_or(4).max(2);
    let ch = DirectChain::propagate(RankParams::new(family, n)?, stages - 1)?;
    let a = check_well_aligned(&ch);
    let s = cascade_stability(&ch)?;
    let m = decompose(ch.systems.last().expect("nonempty"))?.m();
    let t = factor_transitivity(&ch, &default_gamma(m))?;
    let mut rows = vec![
        Row::flag("limit/well-aligned", true, a.aligned, "one type along the chain"),
        Row::flag(
            "limit/cascade-stable",
            true,
            s.stable,
            "beta_r and layers fixed by the embedding",
        ),
    ];
    for r in &t {
        rows.push(Row::flag(
            format!("limit/transitivity/{:?}", r.stages),
            true,
            r.holds,
            "factor(n->n'') = factor(n->n') factor(n'->n'')",
        ));
    }
    let data = json!({
        "stages": ch.systems.iter().map(|s| s.params().map(|p| p.label())).collect::<Vec<_>>(),
        "common_types": a.common_types.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    });
    Ok((rows, data))
}
