//! Command-line front end. `run` is the whole program; `main` only wires it
//! to the process streams and exit code.

mod format;

use std::ffi::OsString;
use std::fs;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qhorizon::chain_model::secular_form;
use qhorizon::criteria::{self, aux_quantities};
use qhorizon::landmarks::{ansatz_point, dep_solve, spikes};
use qhorizon::oracle;
use qhorizon::tracer::{self, default_box, Method, SliceSpec};
use qhorizon::{ChainSpec, Error, Region, ToleranceConfig, Verdict};
use serde_json::{json, Map, Value};

use format::{csv_float, float_list, range_list};

/// Exit code for every error, including usage errors.
pub const EXIT_ERROR: i32 = 3;

const ENV_PREFIX: &str = "QHORIZON_";

#[derive(Parser, Debug)]
#[command(name = "qhorizon", version, about = "Quasi-Hermiticity domains of self-dual chain Hamiltonians")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

/// Tolerance overrides. Unset flags fall back to `QHORIZON_<NAME>` in the
/// environment, then to the built-in defaults.
#[derive(Args, Debug, Default)]
struct TolArgs {
    #[arg(long, global = true, allow_hyphen_values = true)]
    real_tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    boundary_tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    cluster_tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    band_tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    eps_b: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Energies, secular roots and confluence pattern.
    Spectrum(Point),
    /// Secular coefficients and the derived abbreviations.
    Coeffs(Point),
    /// Region classification; the exit code carries the region.
    Member {
        #[command(flatten)]
        point: Point,
        #[arg(long, value_enum, default_value_t = MethodArg::Criteria)]
        method: MethodArg,
    },
    /// Spike couplings as CSV.
    Spikes {
        #[arg(long)]
        dim: usize,
    },
    /// Perturbation-ansatz point near the spike.
    Ansatz {
        #[arg(long)]
        dim: usize,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long = "G", value_delimiter = ',', allow_hyphen_values = true, required = true)]
        g_caps: Vec<f64>,
    },
    /// Points of the N = 6 double-exceptional-point curve at given c = g_1.
    Dep {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
    },
    /// Boundary points along a 1D or 2D slice, as CSV.
    Trace {
        #[arg(long)]
        dim: usize,
        /// One or two 1-based coupling indices.
        #[arg(long, value_delimiter = ',', required = true)]
        axes: Vec<usize>,
        /// Values of all couplings; entries on free axes are ignored.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        fix: Option<Vec<f64>>,
        /// `lo:hi` per free axis.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        range: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        res: Vec<usize>,
        #[arg(long, value_enum, default_value_t = SingleMethod::Criteria)]
        method: SingleMethod,
        #[arg(long)]
        out: Option<String>,
    },
    /// Seeded comparison of the closed-form criteria with the oracle.
    Verify {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `lo:hi` per coupling; defaults to `[0, 1.5 spike]`.
        #[arg(long = "box", value_delimiter = ',', allow_hyphen_values = true)]
        bounds: Option<Vec<String>>,
    },
}

#[derive(Args, Debug)]
struct Point {
    #[arg(long)]
    dim: usize,
    /// Couplings `g_1,...,g_J`, outermost first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    g: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Criteria,
    Oracle,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SingleMethod {
    Criteria,
    Oracle,
}

impl From<SingleMethod> for Method {
    fn from(m: SingleMethod) -> Self {
        match m {
            SingleMethod::Criteria => Method::Criteria,
            SingleMethod::Oracle => Method::Oracle,
        }
    }
}

/// Resolves the tolerance config: flag, then environment, then default.
fn tolerances(args: &TolArgs, env: &dyn Fn(&str) -> Option<String>) -> Result<ToleranceConfig, Error> {
    let mut tol = ToleranceConfig::default();
    let flags = [
        args.real_tol,
        args.boundary_tol,
        args.cluster_tol,
        args.band_tol,
        args.eps_b,
    ];
    for (name, flag) in ToleranceConfig::FIELDS.iter().zip(flags) {
        let value = match flag {
            Some(v) => Some(v),
            None => match env(&format!("{ENV_PREFIX}{}", name.to_uppercase())) {
                Some(raw) => Some(raw.trim().parse::<f64>().map_err(|_| {
                    Error::InvalidTolerance(format!("{ENV_PREFIX}{}: cannot parse {raw:?}", name.to_uppercase()))
                })?),
                None => None,
            },
        };
        if let Some(v) = value {
            tol.set(name, v)?;
        }
    }
    tol.validate()?;
    Ok(tol)
}

struct Ctx {
    tol: ToleranceConfig,
    /// Canonical command line, with every tolerance spelled out.
    invocation: String,
}

impl Ctx {
    fn header(&self, command: &str) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("tool".into(), json!("qhorizon"));
        m.insert("version".into(), json!(qhorizon::VERSION));
        m.insert("command".into(), json!(command));
        m.insert("invocation".into(), json!(self.invocation));
        m.insert("tolerances".into(), serde_json::to_value(self.tol).expect("plain struct"));
        m
    }

    fn csv_header(&self, extra: &[(&str, String)]) -> String {
        let t = &self.tol;
        let mut out = format!(
            "# tool: qhorizon {}\n# invocation: {}\n# tolerances: real_tol={:e} boundary_tol={:e} cluster_tol={:e} band_tol={:e} eps_b={:e}\n",
            qhorizon::VERSION,
            self.invocation,
            t.real_tol,
            t.boundary_tol,
            t.cluster_tol,
            t.band_tol,
            t.eps_b
        );
        for (k, v) in extra {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out
    }
}

fn tol_flags(tol: &ToleranceConfig) -> String {
    format!(
        "--real-tol {:e} --boundary-tol {:e} --cluster-tol {:e} --band-tol {:e} --eps-b {:e}",
        tol.real_tol, tol.boundary_tol, tol.cluster_tol, tol.band_tol, tol.eps_b
    )
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Criteria => "criteria",
        MethodArg::Oracle => "oracle",
        MethodArg::Both => "both",
    }
}

fn canonical(command: &Command, tol: &ToleranceConfig) -> String {
    let body = match command {
        Command::Spectrum(p) => format!("spectrum --dim {} --g {}", p.dim, float_list(&p.g)),
        Command::Coeffs(p) => format!("coeffs --dim {} --g {}", p.dim, float_list(&p.g)),
        Command::Member { point, method } => format!(
            "member --dim {} --g {} --method {}",
            point.dim,
            float_list(&point.g),
            method_name(*method)
        ),
        Command::Spikes { dim } => format!("spikes --dim {dim}"),
        Command::Ansatz { dim, t, g_caps } => format!("ansatz --dim {dim} --t {t} --G {}", float_list(g_caps)),
        Command::Dep { c } => format!("dep --c {c}"),
        Command::Trace {
            dim,
            axes,
            fix,
            range,
            res,
            method,
            out,
        } => {
            let mut s = format!(
                "trace --dim {dim} --axes {} --range {} --res {} --method {}",
                join(axes),
                range.join(","),
                join(res),
                Method::from(*method).as_str()
            );
            if let Some(f) = fix {
                s.push_str(&format!(" --fix {}", float_list(f)));
            }
            if let Some(o) = out {
                s.push_str(&format!(" --out {o}"));
            }
            s
        }
        Command::Verify {
            dim,
            samples,
            seed,
            bounds,
        } => {
            let mut s = format!("verify --dim {dim} --samples {samples} --seed {seed}");
            if let Some(b) = bounds {
                s.push_str(&format!(" --box {}", b.join(",")));
            }
            s
        }
    };
    format!("qhorizon {} {body}", tol_flags(tol))
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

/// Runs the program on `args` (including the program name). Returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_env(args, &|k| std::env::var(k).ok(), stdout, stderr)
}

/// As [`run`], with an explicit environment lookup.
pub fn run_with_env<I, T>(
    args: I,
    env: &dyn Fn(&str) -> Option<String>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(stderr, "{}", error_json("usage", e.to_string().trim()));
            return EXIT_ERROR;
        }
    };
    let outcome = tolerances(&cli.tol, env).and_then(|tol| {
        let ctx = Ctx {
            invocation: canonical(&cli.command, &tol),
            tol,
        };
        dispatch(&cli.command, &ctx, stdout)
    });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(e.kind(), &e.to_string()));
            EXIT_ERROR
        }
    }
}

fn emit(stdout: &mut dyn Write, value: &Map<String, Value>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(stdout, "{text}").map_err(io_error)
}

fn io_error(e: std::io::Error) -> Error {
    Error::InvalidArgument(format!("i/o error: {e}"))
}

fn region_exit(region: Region) -> i32 {
    match region {
        Region::Inside => 0,
        Region::Outside => 1,
        Region::Boundary => 2,
    }
}

fn insert_verdict(m: &mut Map<String, Value>, prefix: &str, v: &Verdict<f64>) {
    m.insert(format!("{prefix}region"), json!(v.region.as_str()));
    m.insert(format!("{prefix}margin"), json!(v.margin));
    m.insert(format!("{prefix}violated"), json!(v.violated));
    m.insert(format!("{prefix}degenerate_scaling"), json!(v.degenerate_scaling));
}

fn input(m: &mut Map<String, Value>, dim: usize, g: &[f64]) {
    m.insert("dim".into(), json!(dim));
    m.insert("couplings".into(), json!(g));
}

fn dispatch(command: &Command, ctx: &Ctx, stdout: &mut dyn Write) -> Result<i32, Error> {
    let tol = &ctx.tol;
    match command {
        Command::Spectrum(p) => {
            let spec = ChainSpec::new(p.dim, p.g.clone())?;
            let r = oracle::spectrum(&spec, tol)?;
            let v = oracle::classify(&r, tol);
            let mut m = ctx.header("spectrum");
            input(&mut m, p.dim, &p.g);
            m.insert("energies_re".into(), json!(r.energies.iter().map(|z| z.re).collect::<Vec<_>>()));
            m.insert("energies_im".into(), json!(r.energies.iter().map(|z| z.im).collect::<Vec<_>>()));
            m.insert("s_roots_re".into(), json!(r.s_roots.iter().map(|z| z.re).collect::<Vec<_>>()));
            m.insert("s_roots_im".into(), json!(r.s_roots.iter().map(|z| z.im).collect::<Vec<_>>()));
            m.insert("confluence".into(), json!(r.confluence.to_string()));
            m.insert("confluence_multiplicities".into(), json!(r.confluence.multiplicities));
            m.insert("zero_multiplicity".into(), json!(r.confluence.zero_multiplicity));
            m.insert("all_real_nonneg".into(), json!(r.all_real_nonneg));
            insert_verdict(&mut m, "", &v);
            emit(stdout, &m)?;
            Ok(0)
        }
        Command::Coeffs(p) => {
            let f = secular_form(&ChainSpec::new(p.dim, p.g.clone())?)?;
            let aux = aux_quantities(&f, tol);
            let mut m = ctx.header("coeffs");
            input(&mut m, p.dim, &p.g);
            for (name, v) in qhorizon::chain_model::COEFF_NAMES.iter().zip(&f.coeffs) {
                m.insert((*name).into(), json!(v));
            }
            m.insert("coeffs".into(), json!(f.coeffs));
            m.insert("raw_char".into(), json!(f.raw_char));
            m.insert("aux_B".into(), json!(aux.b));
            m.insert("aux_q".into(), json!(aux.q));
            m.insert("aux_C".into(), json!(aux.c));
            m.insert("aux_D".into(), json!(aux.d));
            m.insert("aux_G".into(), json!(aux.g));
            m.insert("eps_b_effective".into(), json!(aux.eps_b));
            emit(stdout, &m)?;
            Ok(0)
        }
        Command::Member { point, method } => {
            let spec = ChainSpec::new(point.dim, point.g.clone())?;
            let mut m = ctx.header("member");
            input(&mut m, point.dim, &point.g);
            m.insert("method".into(), json!(method_name(*method)));
            let by_criteria = || -> Result<Verdict<f64>, Error> { criteria::member(&secular_form(&spec)?, tol) };
            let by_oracle = || -> Result<Verdict<f64>, Error> {
                Ok(oracle::classify(&oracle::spectrum(&spec, tol)?, tol))
            };
            let region = match method {
                MethodArg::Criteria => {
                    let v = by_criteria()?;
                    insert_verdict(&mut m, "", &v);
                    v.region
                }
                MethodArg::Oracle => {
                    let v = by_oracle()?;
                    insert_verdict(&mut m, "", &v);
                    v.region
                }
                MethodArg::Both => {
                    let c = by_criteria()?;
                    let o = by_oracle()?;
                    insert_verdict(&mut m, "criteria_", &c);
                    insert_verdict(&mut m, "oracle_", &o);
                    m.insert("agree".into(), json!(c.region == o.region));
                    c.region
                }
            };
            m.insert("exit_code".into(), json!(region_exit(region)));
            emit(stdout, &m)?;
            Ok(region_exit(region))
        }
        Command::Spikes { dim } => {
            if *dim < 2 {
                return Err(Error::InvalidDimension(*dim));
            }
            let mut out = ctx.csv_header(&[("dim", dim.to_string())]);
            out.push_str("n,coupling\n");
            for (n, g) in spikes::<f64>(*dim).iter().enumerate() {
                out.push_str(&format!("{},{}\n", n + 1, csv_float(*g)));
            }
            stdout.write_all(out.as_bytes()).map_err(io_error)?;
            Ok(0)
        }
        Command::Ansatz { dim, t, g_caps } => {
            let p = ansatz_point(*dim, *t, g_caps)?;
            let spec = ChainSpec::new(*dim, p.couplings.clone())?;
            let (method, verdict) = if *dim / 2 <= 5 {
                ("criteria", criteria::member(&secular_form(&spec)?, tol)?)
            } else {
                ("oracle", oracle::classify(&oracle::spectrum(&spec, tol)?, tol))
            };
            let mut m = ctx.header("ansatz");
            m.insert("dim".into(), json!(dim));
            m.insert("t".into(), json!(t));
            m.insert("g_caps".into(), json!(p.g_caps));
            m.insert("gammas".into(), json!(p.gammas));
            m.insert("couplings".into(), json!(p.couplings));
            m.insert("method".into(), json!(method));
            insert_verdict(&mut m, "", &verdict);
            emit(stdout, &m)?;
            Ok(0)
        }
        Command::Dep { c } => {
            let sols = dep_solve(*c)?;
            let mut m = ctx.header("dep");
            m.insert("dim".into(), json!(6));
            m.insert("c".into(), json!(c));
            m.insert("solutions".into(), json!(sols.len()));
            let col = |f: &dyn Fn(&qhorizon::DepSolution64) -> Value| -> Value {
                Value::Array(sols.iter().map(f).collect())
            };
            m.insert("a".into(), col(&|s| json!(s.a)));
            m.insert("b".into(), col(&|s| json!(s.b_sq.sqrt())));
            m.insert("b_sq".into(), col(&|s| json!(s.b_sq)));
            m.insert("z_sq".into(), col(&|s| json!(s.z_sq)));
            m.insert("residual_1".into(), col(&|s| json!(s.residuals.0)));
            m.insert("residual_2".into(), col(&|s| json!(s.residuals.1)));
            m.insert("unequal_slack".into(), col(&|s| json!(s.unequal_slack)));
            m.insert("unequal_ok".into(), col(&|s| json!(s.unequal_ok)));
            let mut confluence = Vec::new();
            for s in &sols {
                let spec = ChainSpec::new(6, vec![s.c, s.b_sq.sqrt(), s.a])?;
                confluence.push(oracle::spectrum(&spec, tol)?.confluence.to_string());
            }
            m.insert("confluence".into(), json!(confluence));
            let warnings: Vec<String> = sols
                .iter()
                .filter(|s| !s.unequal_ok)
                .map(|s| format!("a = {}: validity inequality violated by {}", s.a, -s.unequal_slack))
                .collect();
            m.insert("warnings".into(), json!(warnings));
            emit(stdout, &m)?;
            Ok(0)
        }
        Command::Trace {
            dim,
            axes,
            fix,
            range,
            res,
            method,
            out,
        } => {
            let j = dim / 2;
            let slice = SliceSpec {
                dim: *dim,
                free_axes: axes.clone(),
                fixed: fix.clone().unwrap_or_else(|| vec![0.0; j]),
                ranges: range_list(range)?,
                resolution: res.clone(),
            };
            let result = tracer::slice_trace(&slice, (*method).into(), tol)?;
            let mut text = ctx.csv_header(&[
                ("dim", dim.to_string()),
                ("axes", join(axes)),
                ("fixed", float_list(&slice.fixed)),
                ("range", range.join(",")),
                ("resolution", join(res)),
                ("method", result.method.as_str().to_string()),
                ("boundary_points", result.boundary_points.len().to_string()),
            ]);
            let g_cols: Vec<String> = (1..=j).map(|k| format!("g{k}")).collect();
            text.push_str(&format!("index,position,margin,method,{}\n", g_cols.join(",")));
            for (i, p) in result.boundary_points.iter().enumerate() {
                let g: Vec<String> = p.couplings.iter().map(|&v| csv_float(v)).collect();
                text.push_str(&format!(
                    "{i},{},{},{},{}\n",
                    csv_float(p.radius),
                    csv_float(p.margin),
                    p.method.as_str(),
                    g.join(",")
                ));
            }
            match out {
                Some(path) => fs::write(path, text).map_err(io_error)?,
                None => stdout.write_all(text.as_bytes()).map_err(io_error)?,
            }
            Ok(0)
        }
        Command::Verify {
            dim,
            samples,
            seed,
            bounds,
        } => {
            let b = match bounds {
                Some(raw) => range_list(raw)?,
                None => {
                    if *dim < 2 {
                        return Err(Error::InvalidDimension(*dim));
                    }
                    default_box(*dim)
                }
            };
            let r = tracer::sample_verify(*dim, &b, *samples, *seed, tol)?;
            let mut m = ctx.header("verify");
            m.insert("dim".into(), json!(dim));
            m.insert("samples".into(), json!(r.count));
            m.insert("seed".into(), json!(r.seed));
            m.insert("box_lo".into(), json!(b.iter().map(|x| x.0).collect::<Vec<_>>()));
            m.insert("box_hi".into(), json!(b.iter().map(|x| x.1).collect::<Vec<_>>()));
            m.insert("agreed".into(), json!(r.agreed));
            m.insert("agreement_rate".into(), json!(r.agreement_rate));
            m.insert("disagreements".into(), json!(r.disagreements.len()));
            m.insert("out_of_band".into(), json!(r.out_of_band()));
            let d = &r.disagreements;
            m.insert("disagreement_index".into(), json!(d.iter().map(|x| x.index).collect::<Vec<_>>()));
            m.insert(
                "disagreement_criteria_margin".into(),
                json!(d.iter().map(|x| x.criteria_margin).collect::<Vec<_>>()),
            );
            m.insert(
                "disagreement_oracle_margin".into(),
                json!(d.iter().map(|x| x.oracle_margin).collect::<Vec<_>>()),
            );
            m.insert("disagreement_in_band".into(), json!(d.iter().map(|x| x.in_band).collect::<Vec<_>>()));
            m.insert("failure_index".into(), json!(r.failures.iter().map(|f| f.0).collect::<Vec<_>>()));
            m.insert("failure_message".into(), json!(r.failures.iter().map(|f| f.1.clone()).collect::<Vec<_>>()));
            m.insert("passed".into(), json!(r.passed()));
            emit(stdout, &m)?;
            Ok(if r.passed() { 0 } else { 1 })
        }
    }
}
