//! Command-line front end wiring the toolkit into reproducible pipelines
//! with JSON input and output.
//!
//! Exit codes: 0 on success, 2 on schema errors (malformed or invalid
//! input), 3 on precondition errors (a well-formed input outside the
//! domain of the requested operation), 1 on numerical breakdown.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use segre_ode::bbsolver::{self, ResonanceTol, SolveStatus};
use segre_ode::fixtures;
use segre_ode::hypersurface::{self, P0Hypersurface, Sign};
use segre_ode::linalg3;
use segre_ode::numint::{self, GrowthVerdict, PathKind, StepControl};
use segre_ode::ode::{self, FuchsianClass, NonminimalOde};
use segre_ode::schema::{self, vcomplex, vnum};

#[derive(Parser)]
#[command(name = "segre-ode", version, about = "Singular-ODE toolkit for nonminimal hypersurface data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SignArg {
    #[value(name = "+", alias = "positive", alias = "plus")]
    Plus,
    #[value(name = "-", alias = "negative", alias = "minus")]
    Minus,
}

impl From<SignArg> for Sign {
    fn from(s: SignArg) -> Sign {
        match s {
            SignArg::Plus => Sign::Positive,
            SignArg::Minus => Sign::Negative,
        }
    }
}

/// Options shared by every subcommand.
#[derive(Args)]
struct Common {
    /// Input file path, or `-` for stdin.
    #[arg(long)]
    input: Option<String>,
    /// Built-in dataset: `m-gamma:<gamma>[,<gamma>...]`, `mm0:<m>`, `ex68`.
    #[arg(long)]
    example: Option<String>,
    /// Truncation order for generated series.
    #[arg(long, default_value_t = 32)]
    order: i64,
    /// Order-of-vanishing threshold.
    #[arg(long = "tol-ord", default_value_t = 1e-9)]
    tol_ord: f64,
    /// Resonant K-vanishing threshold of the formal solver.
    #[arg(long = "tol-res", default_value_t = 1e-9)]
    tol_res: f64,
    /// Loop radius for monodromy computations.
    #[arg(long = "loop-radius", default_value_t = 0.5)]
    loop_radius: f64,
    /// Number of loop turns (negative reverses orientation).
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    turns: i32,
    /// Basepoint angle on the loop, radians.
    #[arg(long = "base-angle", default_value_t = 0.0, allow_negative_numbers = true)]
    base_angle: f64,
    /// Integrator absolute tolerance.
    #[arg(long = "abs-tol", default_value_t = 1e-10)]
    abs_tol: f64,
    /// Integrator relative tolerance.
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    rel_tol: f64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for parameter sweeps (never splits one computation).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl Common {
    fn control(&self) -> StepControl {
        StepControl {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_step: None,
            min_clearance: 1e-6,
        }
    }

    fn params_value(&self) -> Value {
        json!({
            "order": self.order,
            "tol_ord": vnum(self.tol_ord),
            "tol_res": vnum(self.tol_res),
            "loop_radius": vnum(self.loop_radius),
            "turns": self.turns,
            "base_angle": vnum(self.base_angle),
            "abs_tol": vnum(self.abs_tol),
            "rel_tol": vnum(self.rel_tol),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Hypersurface data -> associated equation.
    Associate(Common),
    /// Check the structural relations of an equation.
    Relations {
        #[command(flatten)]
        common: Common,
        /// Sign branch to check.
        #[arg(long, value_enum, default_value = "+")]
        sign: SignArg,
    },
    /// Fuchsian / non-Fuchsian classification.
    Classify(Common),
    /// Reduce a Fuchsian equation to its pole-order-1 form.
    Reduce(Common),
    /// Formal power-series solution of a reduced equation.
    SolveFormal(Common),
    /// Monodromy around the singular point.
    Monodromy {
        #[command(flatten)]
        common: Common,
        /// Path spec JSON (circle kind only), overriding the loop flags.
        #[arg(long)]
        path: Option<String>,
        /// Probe initial state "z_re,z_im,dz_re,dz_im" (nonlinear case).
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
    },
    /// Sectorial growth exponent along a ray.
    Growth {
        #[command(flatten)]
        common: Common,
        /// Ray angle, radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        ray: f64,
        /// Starting radius.
        #[arg(long, default_value_t = 0.5)]
        r0: f64,
        /// Stopping radius.
        #[arg(long = "rmin", default_value_t = 0.05)]
        r_min: f64,
        /// Initial state "z_re,z_im,dz_re,dz_im" at the ray start.
        #[arg(long, allow_hyphen_values = true)]
        init: Option<String>,
    },
    /// Full pipeline: classify, monodromy, formal solve / growth, verdict.
    Verdict(Common),
    /// Residual of sampled solution graphs against an equation.
    SegreCheck(Common),
    /// Centralizer dimension and automorphism bound of a 3x3 matrix.
    Centralizer(Common),
    /// Evaluate the associated linear map along an arc.
    MapLinear {
        #[command(flatten)]
        common: Common,
        /// Basepoint "re,im" where the fundamental pair is normalized.
        #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
        basepoint: String,
        /// psi_1 initial state "z_re,z_im,dz_re,dz_im".
        #[arg(long = "psi1-init", default_value = "1,0,0,0", allow_hyphen_values = true)]
        psi1_init: String,
        /// psi_2 initial state "z_re,z_im,dz_re,dz_im".
        #[arg(long = "psi2-init", default_value = "0,0,1,0", allow_hyphen_values = true)]
        psi2_init: String,
        /// Sample arc "radius,theta_start,theta_end,count".
        #[arg(long, default_value = "1,0,1.2,7", allow_hyphen_values = true)]
        arc: String,
    },
}

/// Classified failure carrying the exit code.
enum CliError {
    /// Exit 2: malformed or out-of-schema input.
    Schema(String),
    /// Exit 3: input violates an operation precondition.
    Precondition(String),
    /// Exit 1: numerical breakdown.
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Precondition(_) => 3,
            CliError::Numerical(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Schema(m) | CliError::Precondition(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<schema::SchemaError> for CliError {
    fn from(e: schema::SchemaError) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<hypersurface::HypersurfaceError> for CliError {
    fn from(e: hypersurface::HypersurfaceError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<ode::OdeError> for CliError {
    fn from(e: ode::OdeError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<bbsolver::BbError> for CliError {
    fn from(e: bbsolver::BbError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<linalg3::LinalgError> for CliError {
    fn from(e: linalg3::LinalgError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<numint::NumintError> for CliError {
    fn from(e: numint::NumintError) -> Self {
        match e {
            numint::NumintError::NotLinear
            | numint::NumintError::PathTooClose { .. }
            | numint::NumintError::SampleAtOrigin
            | numint::NumintError::EmptyPath => CliError::Precondition(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Associate(c)
            | Command::Classify(c)
            | Command::Reduce(c)
            | Command::SolveFormal(c)
            | Command::Verdict(c)
            | Command::SegreCheck(c)
            | Command::Centralizer(c) => c,
            Command::Relations { common, .. }
            | Command::Monodromy { common, .. }
            | Command::Growth { common, .. }
            | Command::MapLinear { common, .. } => common,
        }
    }
}

fn validate_common(c: &Common) -> Result<(), CliError> {
    if !(4..=4096).contains(&c.order) {
        return Err(CliError::Schema(format!("order must be in 4..=4096, got {}", c.order)));
    }
    for (name, v) in [("tol-ord", c.tol_ord), ("tol-res", c.tol_res), ("abs-tol", c.abs_tol), ("rel-tol", c.rel_tol)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Schema(format!("{name} must be finite and positive")));
        }
    }
    if !(c.loop_radius.is_finite() && c.loop_radius > 0.0) {
        return Err(CliError::Schema("loop-radius must be finite and positive".to_string()));
    }
    if c.turns == 0 || c.turns.abs() > 64 {
        return Err(CliError::Schema("turns must be nonzero with |turns| <= 64".to_string()));
    }
    if c.jobs == 0 || c.jobs > 256 {
        return Err(CliError::Schema("jobs must be in 1..=256".to_string()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(err) = validate_common(cli.command.common()) {
        eprintln!("error: {}", err.message());
        return ExitCode::from(err.code());
    }
    let (format, outcome) = run(&cli.command);
    match outcome {
        Ok(report) => {
            emit(&report, format);
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.code())
        }
    }
}

fn emit(report: &Value, format: Format) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    // a closed pipe is not an error worth reporting
    let _ = match format {
        Format::Json => writeln!(out, "{}", schema::write_json_17(report)),
        Format::Table => {
            let mut lines = Vec::new();
            flatten("", report, &mut lines);
            lines.iter().try_for_each(|(k, v)| writeln!(out, "{k:<40} {v}"))
        }
    };
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, val, out);
            }
        }
        Value::Array(items) if items.len() <= 8 && items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            let rendered: Vec<String> = items.iter().map(render_scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", rendered.join(", "))));
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), item, out);
            }
        }
        other => out.push((prefix.to_string(), render_scalar(other))),
    }
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.16e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Input payload of a subcommand: either a hypersurface or an equation.
enum Payload {
    Hypersurface(P0Hypersurface),
    Ode(NonminimalOde),
}

impl Payload {
    /// The equation, associating first when the payload is a hypersurface.
    fn into_ode(self) -> Result<NonminimalOde, CliError> {
        match self {
            Payload::Ode(o) => Ok(o),
            Payload::Hypersurface(h) => Ok(hypersurface::associate_ode(&h)?),
        }
    }
}

fn read_input(common: &Common) -> Result<String, CliError> {
    match common.input.as_deref() {
        Some("-") => {
            let mut buf = String::new();
            std::io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| CliError::Schema(format!("cannot read stdin: {e}")))?;
            Ok(buf)
        }
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| CliError::Schema(format!("cannot read {path}: {e}"))),
        None => Err(CliError::Schema(
            "no input: pass --input <file|-> or --example <name>".to_string(),
        )),
    }
}

/// Parses `--example` into one or more payloads (comma lists sweep).
fn example_payloads(spec: &str, order: i64) -> Result<Vec<(String, Payload)>, CliError> {
    if let Some(rest) = spec.strip_prefix("m-gamma:") {
        let mut out = Vec::new();
        for part in rest.split(',') {
            let gamma: f64 = part
                .trim()
                .parse()
                .map_err(|_| CliError::Schema(format!("bad gamma value {part:?}")))?;
            if !gamma.is_finite() {
                return Err(CliError::Schema("gamma must be finite".to_string()));
            }
            out.push((
                format!("m-gamma:{part}"),
                Payload::Hypersurface(fixtures::rotational_hypersurface(gamma, order)),
            ));
        }
        return Ok(out);
    }
    if let Some(rest) = spec.strip_prefix("mm0:") {
        let m: u32 = rest
            .trim()
            .parse()
            .map_err(|_| CliError::Schema(format!("bad m value {rest:?}")))?;
        if !(2..=64).contains(&m) {
            return Err(CliError::Schema("mm0 needs m in 2..=64".to_string()));
        }
        let ode = fixtures::higher_level_family(m, order).map_err(|e| CliError::Schema(e.to_string()))?;
        return Ok(vec![(format!("mm0:{m}"), Payload::Ode(ode))]);
    }
    if spec == "ex68" {
        return Ok(vec![("ex68".to_string(), Payload::Ode(fixtures::quadratic_blowup(order)))]);
    }
    Err(CliError::Schema(format!(
        "unknown example {spec:?}; available: m-gamma:<gamma>[,..], mm0:<m>, ex68"
    )))
}

fn load_payloads(common: &Common) -> Result<Vec<(String, Payload)>, CliError> {
    if let Some(example) = common.example.as_deref() {
        return example_payloads(example, common.order);
    }
    let text = read_input(common)?;
    // decide by shape: hypersurfaces carry "phi", equations carry "A"
    let probe: Value = serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("malformed JSON: {e}")))?;
    let payload = if probe.get("phi").is_some() {
        Payload::Hypersurface(schema::parse_hypersurface(&text)?)
    } else {
        Payload::Ode(schema::parse_ode(&text)?)
    };
    Ok(vec![("input".to_string(), payload)])
}

fn parse_init(text: &str) -> Result<(C64, C64), CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Schema(format!("bad state {text:?}; expected four comma-separated reals")))?;
    if parts.len() != 4 || parts.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Schema(format!("bad state {text:?}; expected four finite reals")));
    }
    Ok((C64::new(parts[0], parts[1]), C64::new(parts[2], parts[3])))
}

fn parse_complex(text: &str) -> Result<C64, CliError> {
    let parts: Vec<f64> = text
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Schema(format!("bad complex {text:?}; expected re,im")))?;
    if parts.len() != 2 || parts.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Schema(format!("bad complex {text:?}; expected two finite reals")));
    }
    Ok(C64::new(parts[0], parts[1]))
}

fn run(cmd: &Command) -> (Format, Result<Value, CliError>) {
    match cmd {
        Command::Associate(c) => (c.format, sweep(c, cmd_associate)),
        Command::Relations { common, sign } => {
            let s: Sign = (*sign).into();
            (common.format, sweep(common, move |c, name, p| cmd_relations(c, name, p, s)))
        }
        Command::Classify(c) => (c.format, sweep(c, cmd_classify)),
        Command::Reduce(c) => (c.format, sweep(c, cmd_reduce)),
        Command::SolveFormal(c) => (c.format, cmd_solve_formal(c)),
        Command::Monodromy { common, path, init } => (common.format, cmd_monodromy(common, path.as_deref(), init.as_deref())),
        Command::Growth { common, ray, r0, r_min, init } => {
            (common.format, cmd_growth(common, *ray, *r0, *r_min, init.as_deref()))
        }
        Command::Verdict(c) => (c.format, sweep(c, cmd_verdict)),
        Command::SegreCheck(c) => (c.format, cmd_segre_check(c)),
        Command::Centralizer(c) => (c.format, cmd_centralizer(c)),
        Command::MapLinear { common, basepoint, psi1_init, psi2_init, arc } => {
            (common.format, cmd_map_linear(common, basepoint, psi1_init, psi2_init, arc))
        }
    }
}

/// Runs one payload-based subcommand over every payload; comma-separated
/// `--example` lists become sweeps, chunked over `--jobs` threads.
fn sweep<F>(common: &Common, f: F) -> Result<Value, CliError>
where
    F: Fn(&Common, &str, Payload) -> Result<Value, CliError> + Sync,
{
    let payloads = load_payloads(common)?;
    if payloads.len() == 1 {
        let (name, payload) = payloads.into_iter().next().expect("one payload");
        return f(common, &name, payload);
    }
    let jobs = common.jobs.max(1);
    let mut slots: Vec<Option<Result<Value, CliError>>> = Vec::new();
    slots.resize_with(payloads.len(), || None);
    let work: Vec<(usize, (String, Payload))> = payloads.into_iter().enumerate().collect();
    let slots_mutex = std::sync::Mutex::new(&mut slots);
    let queue = std::sync::Mutex::new(work.into_iter());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let item = queue.lock().expect("queue lock").next();
                let Some((idx, (name, payload))) = item else { break };
                let result = f(common, &name, payload);
                slots_mutex.lock().expect("slots lock")[idx] = Some(result);
            });
        }
    });
    let mut reports = Vec::new();
    for slot in slots {
        reports.push(slot.expect("all slots filled")?);
    }
    Ok(json!({ "schema": 1, "sweep": reports }))
}

fn cmd_associate(common: &Common, name: &str, payload: Payload) -> Result<Value, CliError> {
    let h = match payload {
        Payload::Hypersurface(h) => h,
        Payload::Ode(_) => {
            return Err(CliError::Precondition("associate expects hypersurface data, not an equation".to_string()))
        }
    };
    let validation = hypersurface::validate_hypersurface(&h);
    let ode = hypersurface::associate_ode(&h)?;
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "validation": validation_value(&validation),
        "ode": schema::ode_to_value(&ode),
    }))
}

fn validation_value(v: &hypersurface::ValidationReport) -> Value {
    json!({
        "pass": v.pass(),
        "checks": v.checks.iter().map(|c| json!({"name": c.name, "ok": c.ok, "detail": c.detail})).collect::<Vec<_>>(),
        "low_confidence": v.low_confidence,
    })
}

fn cmd_relations(common: &Common, name: &str, payload: Payload, sign: Sign) -> Result<Value, CliError> {
    let ode = payload.into_ode()?;
    let rep = ode::check_relations(&ode, sign);
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "sign": sign.to_string(),
        "residual_a": vnum(rep.residual_a),
        "residual_c": vnum(rep.residual_c),
        "residual_d": vnum(rep.residual_d),
        "tol": vnum(rep.tol),
        "pass": rep.pass(),
    }))
}

fn fuchsian_value(rep: &ode::FuchsianReport) -> Value {
    json!({
        "class": if rep.class == FuchsianClass::Fuchsian { "Fuchsian" } else { "NonFuchsian" },
        "conditions": rep.conditions.iter().map(|c| json!({
            "name": c.name,
            "observed_ord": c.observed,
            "required": c.required,
            "ok": c.ok,
            "low_confidence": c.low_confidence,
        })).collect::<Vec<_>>(),
        "ord_a_f_mismatch": rep.ord_a_f_mismatch,
        "low_confidence": rep.low_confidence,
        "tol": vnum(rep.tol),
    })
}

fn cmd_classify(common: &Common, name: &str, payload: Payload) -> Result<Value, CliError> {
    let (subject, rep) = match &payload {
        Payload::Hypersurface(h) => ("hypersurface", ode::fuchsian_test_hypersurface_with(h, common.tol_ord)),
        Payload::Ode(o) => ("ode", ode::fuchsian_test_ode_with(o, common.tol_ord)),
    };
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "subject": subject,
        "fuchsian": rep.class == FuchsianClass::Fuchsian,
        "report": fuchsian_value(&rep),
    }))
}

fn cmd_reduce(common: &Common, name: &str, payload: Payload) -> Result<Value, CliError> {
    let ode = payload.into_ode()?;
    let red = ode::reduce_with(&ode, common.tol_ord)?;
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "reduced": schema::reduced_to_value(&red),
    }))
}

fn solve_reduced(
    red: &segre_ode::ode::ReducedOde,
    common: &Common,
) -> Result<(Value, bbsolver::FormalSolution), CliError> {
    let q_at_zero = [
        red.q[0].coeff_or_zero(0),
        red.q[1].coeff_or_zero(0),
        red.q[2].coeff_or_zero(0),
        red.q[3].coeff_or_zero(0),
    ];
    let z0 = bbsolver::choose_base_root(&q_at_zero)?;
    let sys = bbsolver::linearize(red, z0)?;
    let tol = ResonanceTol { eigen: 1e-8, k_vanish: common.tol_res };
    let n = common.order.clamp(4, 4096) as usize;
    let sol = bbsolver::formal_solve(&sys, n, &tol);
    let (status, resonances, obstruction) = match &sol.status {
        SolveStatus::Unique => ("unique", Vec::new(), Value::Null),
        SolveStatus::ResonantSolvable(rs) => ("resonant-solvable", rs.clone(), Value::Null),
        SolveStatus::Obstructed { r, k_abs } => ("obstructed", vec![*r], json!({"r": r, "k_abs": vnum(*k_abs)})),
    };
    let value = json!({
        "status": status,
        "z0": vcomplex(sys.z0),
        "eigenvalues": [vcomplex(sys.eigenvalues.0), vcomplex(sys.eigenvalues.1)],
        "coeffs": sol.coeffs.iter().map(|c| vcomplex(*c)).collect::<Vec<_>>(),
        "resonances": resonances,
        "obstruction": obstruction,
        "residual_order": sol.residual_order,
    });
    Ok((value, sol))
}

fn cmd_solve_formal(common: &Common) -> Result<Value, CliError> {
    let red = if common.example.is_some() {
        let payloads = load_payloads(common)?;
        let (_, payload) = payloads.into_iter().next().expect("payload");
        ode::reduce_with(&payload.into_ode()?, common.tol_ord)?
    } else {
        let text = read_input(common)?;
        // accept either a reduced equation or a full equation to reduce
        let probe: Value = serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("malformed JSON: {e}")))?;
        if probe.get("P").is_some() {
            schema::parse_reduced(&text)?
        } else if probe.get("phi").is_some() {
            let h = schema::parse_hypersurface(&text)?;
            ode::reduce_with(&hypersurface::associate_ode(&h)?, common.tol_ord)?
        } else {
            ode::reduce_with(&schema::parse_ode(&text)?, common.tol_ord)?
        }
    };
    let (solved, _) = solve_reduced(&red, common)?;
    let mut report = json!({
        "schema": 1,
        "params": common.params_value(),
        "l": red.l,
    });
    merge(&mut report, solved);
    Ok(report)
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        for (k, v) in b {
            a.insert(k, v);
        }
    }
}

fn monodromy_value(rep: &numint::MonodromyReport) -> Value {
    json!({
        "kind": if rep.matrix.is_some() { "linear" } else { "probe" },
        "matrix": rep.matrix.map(|m| json!([
            [vcomplex(m[0][0]), vcomplex(m[0][1])],
            [vcomplex(m[1][0]), vcomplex(m[1][1])],
        ])).unwrap_or(Value::Null),
        "eigenvalues": rep.eigenvalues.map(|(a, b)| json!([vcomplex(a), vcomplex(b)])).unwrap_or(Value::Null),
        "probe_deviation": rep.probe_deviation.map(vnum).unwrap_or(Value::Null),
        "trivial": rep.trivial,
        "tol": vnum(rep.tol),
        "radius_warning": rep.radius_warning,
    })
}

fn compute_monodromy(
    ode_eq: &NonminimalOde,
    common: &Common,
    radius: f64,
    base_angle: f64,
    turns: i32,
    init: Option<(C64, C64)>,
) -> Result<numint::MonodromyReport, CliError> {
    let control = common.control();
    if ode_eq.is_linear(common.tol_ord) && init.is_none() {
        Ok(numint::monodromy_linear(ode_eq, radius, base_angle, turns, control)?)
    } else {
        let init = init.unwrap_or((C64::new(1.0, 0.0), C64::new(1.0, 0.0)));
        Ok(numint::monodromy_probe(ode_eq, init, radius, base_angle, turns, control)?)
    }
}

fn cmd_monodromy(common: &Common, path: Option<&str>, init: Option<&str>) -> Result<Value, CliError> {
    let payloads = load_payloads(common)?;
    let (name, payload) = payloads.into_iter().next().expect("payload");
    let ode_eq = payload.into_ode()?;
    let (radius, base_angle, turns) = match path {
        None => (common.loop_radius, common.base_angle, common.turns),
        Some(text) => match schema::parse_path_spec(text)? {
            PathKind::Circle { radius, base_angle, turns } => (radius, base_angle, turns),
            _ => {
                return Err(CliError::Precondition(
                    "monodromy needs a closed loop: only the circle path kind is accepted".to_string(),
                ))
            }
        },
    };
    let init = init.map(parse_init).transpose()?;
    let rep = compute_monodromy(&ode_eq, common, radius, base_angle, turns, init)?;
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "monodromy": monodromy_value(&rep),
        "monodromy_trivial": rep.trivial,
    }))
}

fn growth_value(rep: &numint::GrowthReport) -> Value {
    json!({
        "theta": vnum(rep.theta),
        "exponent": rep.exponent.map(vnum).unwrap_or(Value::Null),
        "fit_residual": vnum(rep.fit_residual),
        "window_slopes": rep.window_slopes.iter().map(|s| vnum(*s)).collect::<Vec<_>>(),
        "verdict": if rep.verdict == GrowthVerdict::Irregular { "irregular" } else { "moderate" },
        "stopped_early": rep.stopped_early.clone().map(Value::String).unwrap_or(Value::Null),
    })
}

fn cmd_growth(common: &Common, ray: f64, r0: f64, r_min: f64, init: Option<&str>) -> Result<Value, CliError> {
    if !(r_min > 0.0 && r_min < r0 && r0.is_finite()) {
        return Err(CliError::Schema("need 0 < rmin < r0".to_string()));
    }
    let payloads = load_payloads(common)?;
    let (name, payload) = payloads.into_iter().next().expect("payload");
    let ode_eq = payload.into_ode()?;
    let init = match init {
        Some(text) => parse_init(text)?,
        None => (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
    };
    let rep = numint::growth_exponent(&ode_eq, init, ray, r0, r_min, common.control())?;
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "r0": vnum(r0),
        "r_min": vnum(r_min),
        "growth_report": growth_value(&rep),
        "growth": if rep.verdict == GrowthVerdict::Irregular { "irregular" } else { "moderate" },
    }))
}

/// The four cardinal rays scanned by the verdict pipeline in the
/// non-Fuchsian branch.
const SCAN_RAYS: [f64; 4] = [
    0.0,
    std::f64::consts::FRAC_PI_2,
    std::f64::consts::PI,
    3.0 * std::f64::consts::FRAC_PI_2,
];

fn cmd_verdict(common: &Common, name: &str, payload: Payload) -> Result<Value, CliError> {
    let ode_eq = payload.into_ode()?;
    let fuch = ode::fuchsian_test_ode_with(&ode_eq, common.tol_ord);
    let monodromy = compute_monodromy(&ode_eq, common, common.loop_radius, common.base_angle, common.turns, None)?;

    let mut formal = None;
    let mut formal_value = Value::Null;
    let mut growth = None;
    let mut growth_values = Vec::new();

    if monodromy.trivial && fuch.class == FuchsianClass::Fuchsian {
        let red = ode::reduce_with(&ode_eq, common.tol_ord)?;
        let (value, sol) = solve_reduced(&red, common)?;
        formal_value = value;
        formal = Some(sol);
    } else if monodromy.trivial {
        // non-Fuchsian single-valued branch: scan for irregular growth
        for theta in SCAN_RAYS {
            let rep = numint::growth_exponent(
                &ode_eq,
                (C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
                theta,
                common.loop_radius,
                0.05_f64.min(common.loop_radius / 2.0),
                common.control(),
            )?;
            growth_values.push(growth_value(&rep));
            if rep.verdict == GrowthVerdict::Irregular && growth.is_none() {
                growth = Some(rep);
            }
        }
    }

    let verdict = ode::extension_verdict(&ode_eq, &monodromy, formal.as_ref(), growth.as_ref())?;
    let growth_summary = if growth_values.is_empty() {
        Value::Null
    } else if growth.is_some() {
        Value::String("irregular".to_string())
    } else {
        Value::String("moderate".to_string())
    };
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "fuchsian": fuch.class == FuchsianClass::Fuchsian,
        "classification": fuchsian_value(&fuch),
        "monodromy": monodromy_value(&monodromy),
        "monodromy_trivial": monodromy.trivial,
        "formal": formal_value,
        "growth": growth_summary,
        "growth_rays": growth_values,
        "verdict": verdict.to_string(),
    }))
}

fn cmd_segre_check(common: &Common) -> Result<Value, CliError> {
    let text = read_input(common)?;
    let (ode_eq, samples) = schema::parse_segre_check(&text)?;
    let max_residual = numint::segre_residual(&ode_eq, &samples)?;
    Ok(json!({
        "schema": 1,
        "params": common.params_value(),
        "samples": samples.len(),
        "max_residual": vnum(max_residual),
    }))
}

fn cmd_centralizer(common: &Common) -> Result<Value, CliError> {
    let text = read_input(common)?;
    let matrix = schema::parse_matrix3(&text)?;
    let sigma = linalg3::MonodromyOperator::new(matrix)?;
    let bound = linalg3::hol_dim_bound(&sigma);
    Ok(json!({
        "schema": 1,
        "params": common.params_value(),
        "dim_gl": bound.dim_gl,
        "bound": bound.bound,
        "is_identity": bound.is_identity,
        "gap_warning": bound.gap_warning,
    }))
}

fn cmd_map_linear(
    common: &Common,
    basepoint: &str,
    psi1_init: &str,
    psi2_init: &str,
    arc: &str,
) -> Result<Value, CliError> {
    let payloads = load_payloads(common)?;
    let (name, payload) = payloads.into_iter().next().expect("payload");
    let ode_eq = payload.into_ode()?;
    let basepoint = parse_complex(basepoint)?;
    let psi1 = parse_init(psi1_init)?;
    let psi2 = parse_init(psi2_init)?;
    let arc_parts: Vec<f64> = arc
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Schema(format!("bad arc {arc:?}; expected radius,theta0,theta1,count")))?;
    if arc_parts.len() != 4 || arc_parts[0] <= 0.0 || arc_parts[3] < 1.0 || arc_parts[3] > 1000.0 {
        return Err(CliError::Schema(format!("bad arc {arc:?}; expected radius,theta0,theta1,count")));
    }
    let (radius, t0, t1, count) = (arc_parts[0], arc_parts[1], arc_parts[2], arc_parts[3] as usize);

    let map = numint::associated_map_linear(&ode_eq, basepoint, psi1, psi2, common.control())?;
    let mut samples = Vec::new();
    for k in 0..count {
        let theta = if count == 1 { t0 } else { t0 + (t1 - t0) * k as f64 / (count - 1) as f64 };
        let w = C64::from_polar(radius, theta);
        let (p1, p2) = map.fundamental_at(w)?;
        samples.push(json!({
            "w": vcomplex(w),
            "psi1": vcomplex(p1),
            "psi2": vcomplex(p2),
            "ratio": vcomplex(p2 / p1),
        }));
    }
    Ok(json!({
        "schema": 1,
        "example": name,
        "params": common.params_value(),
        "basepoint": vcomplex(basepoint),
        "samples": samples,
    }))
}
