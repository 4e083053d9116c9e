use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polybound::bounds::{
    choose_k, render_table, run_pipeline, BackendKind, Decimal, KChooserParams, KSpec, LipschitzMethod,
    PipelineOptions, Rounding, ShiftMode,
};
use polybound::decompose::certificate_pow;
use polybound::decompose::{direction_table, find_certificate, Objective};
use polybound::gridsum::{convergence_report, grid_lower_bound};
use polybound::integrate::{integrate_handelman, integrate_polynomial, volume, Backend};
use polybound::polytope::{coordinate_width, HRep};
use polybound::ratpoly::parse_rational;
use polybound::{Error, Polynomial, Rational};

#[derive(Parser)]
#[command(
    name = "polybound",
    version,
    about = "Exact moment bounds for polynomial maximization over polytopes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact integral of f^k (or (f+s)^k) over the polytope.
    Integrate(IntegrateArgs),
    /// Lower and upper bounds on max f.
    Bounds(BoundsArgs),
    /// Grid-sum lower bounds L_{k,m}.
    Gridsum(GridsumArgs),
    /// Handelman certificate and term-count comparison.
    Decompose(DecomposeArgs),
    /// Vertices and their tight constraints.
    Vertices(PolytopeArgs),
    /// Exact volume.
    Volume(VolumeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    LinearForms,
    Handelman,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShiftArg {
    Auto,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Sparse,
    ShiftOnly,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Sparse => Objective::SparseShift,
            ObjectiveArg::ShiftOnly => Objective::ShiftOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LipschitzArg {
    Whole,
    PerMonomial,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Table,
    Kv,
}

#[derive(Args)]
struct PolytopeArgs {
    #[arg(long)]
    polytope: PathBuf,
}

#[derive(Args)]
struct VolumeArgs {
    #[arg(long)]
    polytope: PathBuf,
    #[arg(long, default_value_t = 12)]
    digits: u32,
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    poly: PathBuf,
    #[arg(long)]
    polytope: PathBuf,
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, value_enum, default_value_t = BackendArg::LinearForms)]
    backend: BackendArg,
    /// Defaults to `auto` for the Handelman backend and `none` otherwise.
    #[arg(long, value_enum)]
    shift: Option<ShiftArg>,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Sparse)]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 12)]
    digits: u32,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("order").required(true).args(["k", "epsilon"])))]
struct BoundsArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// A single k, a list `10,20`, or a range `10..40:10`.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Upper estimate U of max(f + s).
    #[arg(long)]
    upper: Option<String>,
    #[arg(long, default_value = "1/10")]
    delta: String,
    #[arg(long, default_value = "81/20")]
    cdelta: String,
    /// Print the k-chooser components and stop.
    #[arg(long, requires = "epsilon")]
    choose_only: bool,
    #[arg(long, value_enum, default_value_t = BackendArg::LinearForms)]
    backend: BackendArg,
    #[arg(long, value_enum, default_value_t = ShiftArg::Auto)]
    shift: ShiftArg,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long)]
    lipschitz: Option<String>,
    #[arg(long, value_enum, default_value_t = LipschitzArg::PerMonomial)]
    lipschitz_method: LipschitzArg,
    #[arg(long, default_value_t = 12)]
    digits: u32,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Sparse)]
    objective: ObjectiveArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
}

#[derive(Args)]
struct GridsumArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    k: u32,
    /// A single m, a list `2,4,6`, or a range `1..15`.
    #[arg(long)]
    m: String,
    #[arg(long, default_value_t = 12)]
    digits: u32,
    /// Skip the continuous L_k row.
    #[arg(long)]
    no_limit: bool,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    inputs: Inputs,
    #[arg(long)]
    t: Option<u32>,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Sparse)]
    objective: ObjectiveArg,
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Math { stage: &'static str, error: Error },
}

impl Failure {
    fn stage(stage: &'static str) -> impl Fn(Error) -> Failure {
        move |error| match error {
            Error::Parse { .. } | Error::DimensionMismatch { .. } => Failure::Input(error.to_string()),
            error => Failure::Math { stage, error },
        }
    }
}

type Outcome = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_polytope(path: &Path) -> Result<HRep, Failure> {
    let text = read(path)?;
    HRep::parse(&text).map_err(|e| match e {
        Error::Parse { .. } => Failure::Input(format!("{}: {e}", path.display())),
        error => Failure::Math {
            stage: "polytope",
            error,
        },
    })
}

fn load_inputs(inputs: &Inputs) -> Result<(Polynomial, HRep), Failure> {
    let text = read(&inputs.poly)?;
    let f = Polynomial::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", inputs.poly.display())))?;
    let p = load_polytope(&inputs.polytope)?;
    if f.dim() != p.dim() {
        return Err(Failure::Input(format!(
            "polynomial has dimension {} but the polytope has dimension {}",
            f.dim(),
            p.dim()
        )));
    }
    Ok((f, p))
}

fn rational_arg(name: &str, text: &str) -> Result<Rational, Failure> {
    parse_rational(text).ok_or_else(|| Failure::Input(format!("--{name}: cannot parse `{text}` as a rational")))
}

/// `7`, `1,2,5`, `1..15` or `10..40:10`.
fn int_list(name: &str, text: &str) -> Result<Vec<u64>, Failure> {
    let bad = || Failure::Input(format!("--{name}: expected a number, a list or a range, got `{text}`"));
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((lo, rest)) = part.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((hi, step)) => (hi, step.parse::<u64>().map_err(|_| bad())?),
                None => (rest, 1),
            };
            let lo: u64 = lo.parse().map_err(|_| bad())?;
            let hi: u64 = hi.parse().map_err(|_| bad())?;
            if step == 0 || lo > hi {
                return Err(bad());
            }
            out.extend((lo..=hi).step_by(step as usize));
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

fn nearest(v: &Rational, digits: u32) -> String {
    Decimal::nearest(v, digits).to_string()
}

fn cmd_integrate(args: &IntegrateArgs) -> Outcome {
    let (f, p) = load_inputs(&args.inputs)?;
    let shift = args.shift.unwrap_or(match args.backend {
        BackendArg::Handelman => ShiftArg::Auto,
        BackendArg::LinearForms => ShiftArg::None,
    });
    let mut out = String::new();
    let integral = match (args.backend, shift) {
        (BackendArg::Handelman, ShiftArg::None) => {
            return Err(Failure::Input("--backend handelman requires --shift auto".into()));
        }
        (backend, ShiftArg::Auto) => {
            let t = args.t.unwrap_or_else(|| f.degree());
            let cert = find_certificate(&f, &p, t, args.objective.into()).map_err(Failure::stage("certificate"))?;
            out += &format!("s={}\nt={}\n", cert.shift, cert.t);
            match backend {
                BackendArg::Handelman => integrate_handelman(&p, &certificate_pow(&cert, args.k)),
                BackendArg::LinearForms => {
                    let g = f.clone() + Polynomial::constant(f.dim(), cert.shift.clone());
                    integrate_polynomial(&p, &g.pow(args.k), Backend::LinearForms)
                }
            }
            .map_err(Failure::stage("integration"))?
        }
        (BackendArg::LinearForms, ShiftArg::None) => {
            out += "s=0\n";
            integrate_polynomial(&p, &f.pow(args.k), Backend::LinearForms).map_err(Failure::stage("integration"))?
        }
    };
    out += &format!(
        "k={}\nintegral={integral}\nintegral_decimal~{}\n",
        args.k,
        nearest(&integral, args.digits)
    );
    Ok(out)
}

fn cmd_bounds(args: &BoundsArgs) -> Outcome {
    let (f, p) = load_inputs(&args.inputs)?;
    let upper = args.upper.as_deref().map(|u| rational_arg("upper", u)).transpose()?;
    let lipschitz = args
        .lipschitz
        .as_deref()
        .map(|l| rational_arg("lipschitz", l))
        .transpose()?;
    let options = PipelineOptions {
        backend: match args.backend {
            BackendArg::LinearForms => BackendKind::LinearForms,
            BackendArg::Handelman => BackendKind::Handelman,
        },
        shift: match args.shift {
            ShiftArg::Auto => ShiftMode::Auto,
            ShiftArg::None => ShiftMode::None,
        },
        t: args.t,
        objective: args.objective.into(),
        lipschitz,
        lipschitz_method: match args.lipschitz_method {
            LipschitzArg::Whole => LipschitzMethod::WholePolynomial,
            LipschitzArg::PerMonomial => LipschitzMethod::PerMonomial,
        },
        upper: upper.clone(),
        digits: args.digits,
    };
    let mut out = String::new();
    let specs: Vec<KSpec> = match (&args.k, &args.epsilon) {
        (Some(k), _) => int_list("k", k)?
            .into_iter()
            .map(|k| {
                u32::try_from(k)
                    .ok()
                    .filter(|&k| k > 0)
                    .map(KSpec::Fixed)
                    .ok_or_else(|| Failure::Input(format!("--k: {k} is out of range")))
            })
            .collect::<Result<_, _>>()?,
        (None, Some(eps)) => {
            let epsilon = rational_arg("epsilon", eps)?;
            let delta = rational_arg("delta", &args.delta)?;
            let c_delta = rational_arg("cdelta", &args.cdelta)?;
            if args.choose_only {
                return choose_only(&p, &f, &options, epsilon, delta, c_delta);
            }
            vec![KSpec::Epsilon {
                epsilon,
                delta,
                c_delta,
            }]
        }
        (None, None) => unreachable!("clap requires --k or --epsilon"),
    };
    let reports = specs
        .iter()
        .map(|spec| run_pipeline(&p, &f, spec, &options).map_err(Failure::stage("bounds")))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(choice) = reports.first().and_then(|r| r.choice.as_ref()) {
        out += &format_choice(&choice.components, choice.k);
    }
    match args.format {
        FormatArg::Kv => {
            let blocks: Vec<String> = reports.iter().map(|r| r.to_key_values()).collect();
            out += &blocks.join("\n");
        }
        FormatArg::Table if reports.len() == 1 => out += &reports[0].to_table(),
        FormatArg::Table => out += &render_table(&reports),
    }
    Ok(out)
}

fn format_choice(components: &[Rational; 4], k: u64) -> String {
    let labels = [
        "d(U/(ML) - 1)",
        "d/((1+eps)^(1/3) - 1)",
        "3d ln(ML/U)(1 + 1/eps)",
        "d((3c)^(1+delta)(1+1/eps)^(1+delta) - 1)",
    ];
    let width = labels.iter().map(|l| l.len()).max().unwrap_or(0);
    let mut out = String::from("k-chooser components (rounded up):\n");
    for (label, c) in labels.iter().zip(components) {
        out += &format!("  {label:<width$}  {}\n", Decimal::from_rational(c, 4, Rounding::Up));
    }
    out += &format!("selected k={k}\n");
    out
}

fn choose_only(
    p: &HRep,
    f: &Polynomial,
    options: &PipelineOptions,
    epsilon: Rational,
    delta: Rational,
    c_delta: Rational,
) -> Outcome {
    let widths = coordinate_width(p);
    let lipschitz = match &options.lipschitz {
        Some(l) => l.clone(),
        None => {
            polybound::bounds::lipschitz(f, &widths.max_abs, options.lipschitz_method)
                .map_err(Failure::stage("lipschitz"))?
                .value
        }
    };
    let upper = options
        .upper
        .clone()
        .ok_or_else(|| Failure::Input("--choose-only needs --upper".into()))?;
    let params = KChooserParams {
        epsilon,
        delta,
        c_delta,
        upper,
    };
    let choice = choose_k(&params, p.dim(), &widths.width, &lipschitz).map_err(Failure::stage("k-chooser"))?;
    Ok(format_choice(&choice.components, choice.k))
}

fn cmd_gridsum(args: &GridsumArgs) -> Outcome {
    let (f, p) = load_inputs(&args.inputs)?;
    let ms = int_list("m", &args.m)?;
    if args.no_limit {
        let rows = ms
            .iter()
            .map(|&m| grid_lower_bound(&p, &f, args.k, m, args.digits))
            .collect::<Result<Vec<_>, _>>()
            .map_err(Failure::stage("gridsum"))?;
        let mut out = String::from("m  points  L_km >=\n");
        for r in rows {
            out += &format!("{}  {}  {}\n", r.m, r.count, r.l_km);
        }
        return Ok(out);
    }
    let report = convergence_report(&p, &f, args.k, &ms, args.digits).map_err(Failure::stage("gridsum"))?;
    Ok(report.to_table())
}

fn cmd_decompose(args: &DecomposeArgs) -> Outcome {
    let (f, p) = load_inputs(&args.inputs)?;
    let t = args.t.unwrap_or_else(|| f.degree());
    let cert = find_certificate(&f, &p, t, args.objective.into()).map_err(Failure::stage("certificate"))?;
    let handelman_terms = cert.monomials.len();
    let linear_terms = direction_table(&f).num_terms();
    let mut out = String::new();
    match &args.out {
        Some(path) => {
            fs::write(path, cert.to_text()).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            out += &format!("certificate written to {}\n", path.display());
        }
        None => out += &cert.to_text(),
    }
    out += &format!("s={}\nt={}\n", cert.shift, cert.t);
    out += &format!("handelman_terms={handelman_terms}\nlinear_form_terms={linear_terms}\n");
    if linear_terms > 0 {
        let gain = Rational::from_integer((linear_terms as i64 - handelman_terms as i64).into())
            * Rational::from_integer(100.into())
            / Rational::from_integer((linear_terms as i64).into());
        out += &format!("improvement_percent={}\n", nearest(&gain, 2));
    }
    Ok(out)
}

fn cmd_vertices(args: &PolytopeArgs) -> Outcome {
    let p = load_polytope(&args.polytope)?;
    let mut out = String::new();
    for v in p.vertices() {
        let point: Vec<String> = v.point.iter().map(|x| x.to_string()).collect();
        let tight: Vec<String> = v.tight.iter().map(|x| x.to_string()).collect();
        out += &format!("{}  tight {}\n", point.join(" "), tight.join(" "));
    }
    Ok(out)
}

fn cmd_volume(args: &VolumeArgs) -> Outcome {
    let p = load_polytope(&args.polytope)?;
    let v = volume(&p);
    Ok(format!("volume={v}\nvolume_decimal~{}\n", nearest(&v, args.digits)))
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("POLYBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("POLYBOUND_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Integrate(a) => cmd_integrate(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Gridsum(a) => cmd_gridsum(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Vertices(a) => cmd_vertices(a),
        Command::Volume(a) => cmd_volume(a),
    });
    match result {
        Ok(text) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Math { stage, error }) => {
            eprintln!("error in {stage}: {error}");
            ExitCode::from(3)
        }
    }
}
