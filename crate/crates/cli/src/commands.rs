use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use tlspin::braid::{build_unitary_braid, inversion_residual, unitarity_residual, verify_braid_equation};
use tlspin::chain::{build_hamiltonian, verify_tl_relations, ChainOperator, StateVector, DENSE_CAP};
use tlspin::entropy::{curves_to_svg, entropy_curve, EntropyCurve};
use tlspin::evolution::fit::default_samples;
use tlspin::evolution::transmission::transmit_roundtrip_with_order;
use tlspin::evolution::{ExactPropagator, SeriesPropagator, DEFAULT_ORDER};
use tlspin::projector::{build_p0, build_p0_prime, projector_checks, psi_state, tl_core_residuals};
use tlspin::qnum::{epsilon_sign, loop_constant, rapidity_params, rho_tuple};
use tlspin::{Complex64, Error, Family};

use crate::config::{Format, RunConfig};
use crate::output::{emit, num, table, to_json};

/// Exit code 1 for failed checks or computations, 2 for configuration errors.
#[derive(Debug)]
pub enum CliError {
    Failure(String),
    Config(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Config(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Failure(m) | CliError::Config(m) => m,
        }
    }
}

/// `Variant: message` for library errors.
fn describe(e: &Error) -> String {
    let debug = format!("{e:?}");
    let name: String = debug.chars().take_while(|c| c.is_alphanumeric()).collect();
    format!("{name}: {e}")
}

fn fail(context: &str, e: Error) -> CliError {
    CliError::Failure(format!("{context}: {}", describe(&e)))
}

fn config(context: &str, e: Error) -> CliError {
    CliError::Config(format!("{context}: {}", describe(&e)))
}

struct Check {
    name: &'static str,
    residual: Option<f64>,
    tolerance: f64,
    error: Option<String>,
}

impl Check {
    fn pass(&self) -> bool {
        self.error.is_none() && self.residual.is_some_and(|r| r <= self.tolerance)
    }
}

const BRAID_GRID: [f64; 5] = [-0.9, -0.3, 0.2, 0.7, 1.3];

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let chain = cfg.chain().map_err(CliError::Config)?;
    if chain.dim() > DENSE_CAP {
        return Err(CliError::Config(format!("chain dimension {} exceeds {DENSE_CAP}; use a shorter --length", chain.dim())));
    }
    let spec = &cfg.spec;
    let mut checks = Vec::new();
    let mut add = |name, tolerance, r: Result<f64, Error>| {
        let (residual, error) = match r {
            Ok(x) => (Some(x), None),
            Err(e) => (None, Some(describe(&e))),
        };
        checks.push(Check { name, residual, tolerance, error });
    };

    let pc = projector_checks(spec);
    add("projector.idempotence", 1e-12, Ok(pc.idempotence));
    add("projector.trace", 1e-12, Ok(pc.trace));
    add("projector.eigen", 1e-12, Ok(pc.eigen));
    add("projector.rank", 0.0, Ok((pc.rank as f64 - 1.0).abs()));
    add("projector.annihilation", 0.0, Ok(pc.annihilation));
    let (left, right) = tl_core_residuals(spec);
    add("tl_core", 1e-12, Ok(left.max(right)));

    let braid = || -> Result<f64, Error> {
        let mut worst: f64 = 0.0;
        for t in BRAID_GRID {
            for tp in BRAID_GRID {
                worst = worst.max(verify_braid_equation(spec, t, tp, cfg.sign)?.max_abs);
            }
        }
        Ok(worst)
    };
    add("braid.equation", 1e-10, braid());
    let inversion = || -> Result<f64, Error> {
        BRAID_GRID.iter().try_fold(0.0_f64, |m, &t| Ok(m.max(inversion_residual(spec, t, cfg.sign)?)))
    };
    add("braid.inversion", 1e-12, inversion());
    let unitarity = || -> Result<f64, Error> {
        BRAID_GRID.iter().try_fold(0.0_f64, |m, &t| Ok(m.max(unitarity_residual(build_unitary_braid(spec, t, cfg.sign)?.matrix.matrix()))))
    };
    add("braid.unitarity", 1e-12, unitarity());
    add("chain.tl_relations", 1e-12, verify_tl_relations(&chain).map(|r| r.max()));
    add("chain.hamiltonian", 0.0, build_hamiltonian(&chain).map(|_| 0.0));

    let first_failure = checks.iter().find(|c| !c.pass()).map(|c| match &c.error {
        Some(e) => format!("check {} failed: {e}", c.name),
        None => format!("check {} failed: residual {} exceeds {}", c.name, num(c.residual.unwrap_or(f64::NAN)), num(c.tolerance)),
    });

    let report = json!({
        "spec": spec.to_string(),
        "family": spec.family().tag(),
        "n": spec.n(),
        "q": spec.q(),
        "sign": cfg.sign.to_string(),
        "length": cfg.length,
        "boundary": cfg.boundary.to_string(),
        "pass": first_failure.is_none(),
        "checks": checks.iter().map(|c| json!({
            "name": c.name,
            "residual": c.residual,
            "tolerance": c.tolerance,
            "pass": c.pass(),
            "error": c.error,
        })).collect::<Vec<_>>(),
    });
    let rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.to_string(),
                c.residual.map(num).unwrap_or_else(|| "-".into()),
                num(c.tolerance),
                if c.pass() { "ok".into() } else { c.error.clone().map_or("FAIL".into(), |e| format!("FAIL ({e})")) },
            ]
        })
        .collect();
    match cfg.format {
        Some(Format::Json) => emit(cfg.out.as_deref(), &to_json(&report)).map_err(CliError::Config)?,
        Some(Format::Csv) => return Err(CliError::Config("verify reports as a table or JSON, not CSV".into())),
        None => {
            print!("{}, r = {} ({}), sign {}\n{}", spec, cfg.length, cfg.boundary, cfg.sign, table(&["check", "residual", "tolerance", "status"], &rows));
            if let Some(p) = &cfg.out {
                emit(Some(p), &to_json(&report)).map_err(CliError::Config)?;
            }
        }
    }
    match first_failure {
        Some(msg) => Err(CliError::Failure(msg)),
        None => Ok(()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Series,
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    /// Single evolution time; overrides --t-samples.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Initial basis state as comma-separated 1-based labels; defaults to
    /// `N̄ 1 1 … 1`.
    #[arg(long)]
    pub init: Option<String>,
    /// Initial state as a JSON list of `{labels, re, im}` records.
    #[arg(long = "init-json")]
    pub init_json: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "series")]
    pub method: Method,
}

fn parse_labels(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',').map(|p| p.trim().parse::<usize>().map_err(|_| CliError::Config(format!("cannot parse label '{p}' in --init")))).collect()
}

pub fn evolve(cfg: &RunConfig, args: &EvolveArgs) -> Result<(), CliError> {
    let chain = cfg.chain().map_err(CliError::Config)?;
    rapidity_params(&cfg.spec, cfg.sign).map_err(|e| config("evolve", e))?;
    let times = match (args.t, &cfg.t_samples) {
        (Some(t), _) if !(t.is_finite() && t >= 0.0) => return Err(CliError::Config(format!("--t must be finite and non-negative, got {t}"))),
        (Some(t), _) => vec![t],
        (None, Some(ts)) => ts.clone(),
        (None, None) => vec![0.0, 0.05, 0.1],
    };
    let order = cfg.order.unwrap_or(12);
    if args.method == Method::Exact && chain.dim() > DENSE_CAP {
        return Err(CliError::Config(format!("exact evolution needs dimension <= {DENSE_CAP}, got {}", chain.dim())));
    }
    let init = match (&args.init, &args.init_json) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either --init or --init-json".into())),
        (_, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            StateVector::from_json(&chain, &text).map_err(|e| config("--init-json", e))?
        }
        (Some(s), None) => StateVector::basis(&chain, &parse_labels(s)?).map_err(|e| config("--init", e))?,
        (None, None) => {
            let mut labels = vec![1; cfg.length];
            labels[0] = cfg.spec.n();
            StateVector::basis(&chain, &labels).map_err(|e| config("--init", e))?
        }
    };

    let mut frames = Vec::new();
    let lambda;
    match args.method {
        Method::Series => {
            let mut prop = SeriesPropagator::new(&chain).map_err(|e| fail("evolve", e))?;
            lambda = prop.lambda();
            for &t in &times {
                frames.push((t, prop.evolve(&init, t, order).map_err(|e| fail("evolve", e))?));
            }
        }
        Method::Exact => {
            lambda = rapidity_params(&cfg.spec, cfg.sign).map_err(|e| fail("evolve", e))?.lambda;
            let prop = ExactPropagator::new(&chain).map_err(|e| fail("evolve", e))?;
            for &t in &times {
                frames.push((t, prop.evolve(&init, t).map_err(|e| fail("evolve", e))?));
            }
        }
    }

    let text = match cfg.format {
        Some(Format::Csv) => {
            let mut out = String::from("t,labels,re,im\n");
            for (t, s) in &frames {
                for (labels, a) in records(&chain, s) {
                    let l: Vec<String> = labels.iter().map(|x| x.to_string()).collect();
                    out += &format!("{},{},{},{}\n", tlspin::format::sig17(*t), l.join(" "), tlspin::format::sig17(a.re), tlspin::format::sig17(a.im));
                }
            }
            out
        }
        _ => {
            let frames: Vec<Value> = frames
                .iter()
                .map(|(t, s)| {
                    let amps: Vec<Value> = records(&chain, s).into_iter().map(|(l, a)| json!({"labels": l, "re": a.re, "im": a.im})).collect();
                    json!({"t": t, "norm": s.norm(), "amplitudes": amps})
                })
                .collect();
            to_json(&json!({
                "spec": cfg.spec.to_string(),
                "length": cfg.length,
                "boundary": cfg.boundary.to_string(),
                "sign": cfg.sign.to_string(),
                "lambda": lambda,
                "method": match args.method { Method::Series => "series", Method::Exact => "exact" },
                "order": if args.method == Method::Series { Some(order) } else { None },
                "initial": records(&chain, &init).into_iter().map(|(l, a)| json!({"labels": l, "re": a.re, "im": a.im})).collect::<Vec<_>>(),
                "frames": frames,
            }))
        }
    };
    emit(cfg.out.as_deref(), &text).map_err(CliError::Config)
}

fn records(chain: &tlspin::chain::ChainSpec, s: &StateVector) -> Vec<(Vec<usize>, Complex64)> {
    s.amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.re != 0.0 || a.im != 0.0)
        .map(|(i, a)| (chain.decode_index(i).expect("index within dimension"), *a))
        .collect()
}

#[derive(Debug, Clone, Args)]
pub struct TransmitArgs {
    /// Amplitude of `|1̄1⟩|1111⟩` as `re,im`.
    #[arg(long, default_value = "0.6,0")]
    pub c1: String,
    /// Amplitude of `|11̄⟩|1111⟩` as `re,im`.
    #[arg(long, default_value = "0,0.8")]
    pub c2: String,
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let parse = |p: &str| p.parse::<f64>().ok().filter(|x| x.is_finite());
    match parts.as_slice() {
        [re] => parse(re).map(|r| Complex64::new(r, 0.0)),
        [re, im] => parse(re).zip(parse(im)).map(|(r, i)| Complex64::new(r, i)),
        _ => None,
    }
    .ok_or_else(|| CliError::Config(format!("cannot parse complex number '{s}' (expected re,im)")))
}

pub fn transmit(cfg: &RunConfig, args: &TransmitArgs) -> Result<(), CliError> {
    if cfg.spec.family() != Family::Orthogonal || cfg.spec.n() != 3 {
        return Err(CliError::Config(format!("transmission runs on the SO-hat(3) six-site chain, got {}", cfg.spec)));
    }
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::Config("transmit writes JSON only".into()));
    }
    rapidity_params(&cfg.spec, cfg.sign).map_err(|e| config("transmit", e))?;
    let c1 = parse_complex(&args.c1)?;
    let c2 = parse_complex(&args.c2)?;
    let order = cfg.order.unwrap_or(DEFAULT_ORDER);
    if order < 4 {
        return Err(CliError::Config(format!("transmission decoding needs --order >= 4, got {order}")));
    }
    let ts = cfg.t_samples.clone().unwrap_or_else(|| default_samples(6));
    if ts.len() < order + 1 {
        return Err(CliError::Config(format!("an order-{order} fit needs at least {} sample times, got {}", order + 1, ts.len())));
    }
    let res = transmit_roundtrip_with_order(cfg.spec.q(), cfg.sign, c1, c2, &ts, order).map_err(|e| fail("transmit", e))?;
    let mut v = serde_json::to_value(&res).map_err(|e| CliError::Failure(e.to_string()))?;
    v["error"] = json!(res.error());
    emit(cfg.out.as_deref(), &to_json(&v)).map_err(CliError::Config)
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    #[arg(long = "q-min", default_value_t = 0.01, allow_negative_numbers = true)]
    pub q_min: f64,
    #[arg(long = "q-max", default_value_t = 100.0, allow_negative_numbers = true)]
    pub q_max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    /// Linear instead of logarithmic spacing.
    #[arg(long)]
    pub linear: bool,
    /// Also write an SVG plot of the curve.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

pub fn entropy(cfg: &RunConfig, args: &EntropyArgs) -> Result<(), CliError> {
    if !(args.q_min > 0.0 && args.q_max > args.q_min && args.q_max.is_finite()) {
        return Err(CliError::Config(format!("need 0 < q-min < q-max, got [{}, {}]", args.q_min, args.q_max)));
    }
    if args.points < 2 {
        return Err(CliError::Config(format!("need at least 2 points, got {}", args.points)));
    }
    let curve: EntropyCurve =
        entropy_curve(cfg.spec.family(), cfg.spec.n(), args.q_min, args.q_max, args.points, !args.linear).map_err(|e| fail("entropy-curve", e))?;
    let text = match cfg.format {
        Some(Format::Json) => {
            let samples: Vec<Value> = curve.samples.iter().map(|(q, s)| json!({"q": q, "S": s})).collect();
            to_json(&json!({"family": curve.family.tag(), "n": curve.n, "samples": samples}))
        }
        _ => curve.to_csv(),
    };
    emit(cfg.out.as_deref(), &text).map_err(CliError::Config)?;
    if let Some(p) = &args.svg {
        emit(Some(p), &curves_to_svg(std::slice::from_ref(&curve))).map_err(CliError::Config)?;
    }
    Ok(())
}

pub fn info(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = &cfg.spec;
    let k = loop_constant(spec);
    let rapidity = rapidity_params(spec, cfg.sign);
    let rho: Vec<String> = rho_tuple(spec).iter().map(|r| r.to_string()).collect();
    let eps: Vec<i32> = (1..=spec.n()).map(|i| epsilon_sign(spec, i).expect("index in range")).collect();
    let psi = psi_state(spec, false).coeffs;
    let (eta, lambda, note) = match &rapidity {
        Ok(r) => (Some(r.eta), Some(r.lambda), None),
        Err(e) => (None, None, Some(describe(e))),
    };
    match cfg.format {
        Some(Format::Json) => {
            let v = json!({
                "spec": spec.to_string(),
                "family": spec.family().tag(),
                "n": spec.n(),
                "q": spec.q(),
                "sign": cfg.sign.to_string(),
                "k": k,
                "eta": eta,
                "lambda": lambda,
                "rapidity_error": note,
                "rho": rho,
                "epsilon": eps,
                "psi_weights": psi,
            });
            emit(cfg.out.as_deref(), &to_json(&v)).map_err(CliError::Config)
        }
        Some(Format::Csv) => Err(CliError::Config("info prints a table or JSON, not CSV".into())),
        None => {
            let show = |x: Option<f64>| x.map(num).unwrap_or_else(|| note.clone().unwrap_or_default());
            let rows = vec![
                vec!["spec".into(), spec.to_string()],
                vec!["sign".into(), cfg.sign.to_string()],
                vec!["k".into(), num(k)],
                vec!["eta".into(), show(eta)],
                vec!["lambda".into(), show(lambda)],
                vec!["rho".into(), format!("({})", rho.join(", "))],
                vec!["epsilon".into(), format!("({})", eps.iter().map(|e| format!("{e:+}")).collect::<Vec<_>>().join(", "))],
                vec!["psi weights".into(), format!("({})", psi.iter().map(|x| num(*x)).collect::<Vec<_>>().join(", "))],
            ];
            emit(cfg.out.as_deref(), &table(&["quantity", "value"], &rows)).map_err(CliError::Config)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorArg {
    /// Normalized rank-one projector.
    P0,
    /// Unnormalized `|Ψ⟩⟨Ψ|`.
    P0Prime,
    /// `H = λ Σ X′` on the configured chain.
    Hamiltonian,
    /// `H′ = Σ X′` on the configured chain.
    HamiltonianPrime,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long, value_enum, default_value = "p0-prime")]
    pub operator: OperatorArg,
}

pub fn export(cfg: &RunConfig, args: &ExportArgs) -> Result<(), CliError> {
    let json = cfg.format != Some(Format::Csv);
    let text = match args.operator {
        OperatorArg::P0 | OperatorArg::P0Prime => {
            let op = if args.operator == OperatorArg::P0 { build_p0(&cfg.spec) } else { build_p0_prime(&cfg.spec) };
            if json {
                op.to_json() + "\n"
            } else {
                op.to_csv()
            }
        }
        OperatorArg::Hamiltonian | OperatorArg::HamiltonianPrime => {
            if cfg.length > 4 {
                return Err(CliError::Config(format!("operator export is limited to chains of length <= 4, got {}", cfg.length)));
            }
            let chain = cfg.chain().map_err(CliError::Config)?;
            let h = build_hamiltonian(&chain).map_err(|e| config("export", e))?;
            let op: ChainOperator = if args.operator == OperatorArg::Hamiltonian { h } else { h.primed() };
            if json {
                let m = op.to_dense().map_err(|e| fail("export", e))?;
                let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect();
                to_json(&json!({"n": chain.n(), "length": chain.length(), "dim": chain.dim(), "rows": rows}))
            } else {
                op.to_csv().map_err(|e| fail("export", e))?
            }
        }
    };
    emit(cfg.out.as_deref(), &text).map_err(CliError::Config)
}
