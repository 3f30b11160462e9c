use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use jetcalc::expr::Generator;
use jetcalc::jet::{euler, frechet, order, total_t, total_x};
use jetcalc::kawahara::{catalog, verify_theorem, GKESpec, TheoremReport};
use jetcalc::psd::default_precision;
use jetcalc::symmetry::{
    conservation_residual, formal_symmetry_scan, is_conserved_density, is_trivial_density, reconstruct_flux,
    symmetry_from_density, symmetry_residual, ScanVerdict,
};
use jetcalc::{EvolutionEquation, JetExpr, PsdSeries};

use crate::eqfile::{default_equation, parse_equation_file, parse_f_mode, InputError};
use crate::parse::{parse_expr, parse_series, SyntaxError};
use crate::report::{CheckDoc, FluxDiffDoc, InputDigest, Report, StepDoc};

#[derive(Debug, Parser)]
#[command(name = "jetcalc", version, about = "Exact jet-space calculus for scalar evolution equations")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Series precision in coefficient slots (default 20, or JETCALC_PRECISION).
    #[arg(long, global = true, value_name = "N")]
    pub prec: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total x-derivative.
    Dx {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Total t-derivative on the equation.
    Dt {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        eq: Option<PathBuf>,
    },
    /// Variational derivative.
    Euler {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Frechet derivative of F applied to Q.
    Frechet {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// Differential order.
    Order {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Composition of two series.
    Compose {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Formal adjoint of a series.
    Adjoint {
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Commutator [A, B].
    Commutator {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// n-th root of a series.
    Root {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(long)]
        n: u32,
    },
    /// Checks a symmetry characteristic.
    Symmetry {
        #[arg(allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        eq: Option<PathBuf>,
    },
    /// Checks a conserved density.
    Density {
        #[arg(allow_hyphen_values = true)]
        rho: String,
        #[arg(long)]
        eq: Option<PathBuf>,
        /// Reconstruct the flux.
        #[arg(long)]
        flux: bool,
    },
    /// Checks whether a density is a total x-derivative.
    Trivial {
        #[arg(allow_hyphen_values = true)]
        rho: String,
    },
    /// Maps a conserved density to the symmetry D_x(E(rho)).
    Lemma1 {
        #[arg(allow_hyphen_values = true)]
        rho: String,
        #[arg(long)]
        eq: Option<PathBuf>,
    },
    /// Obstruction scan for a formal symmetry of degree 1.
    Scan {
        #[arg(long)]
        eq: Option<PathBuf>,
        #[arg(long, default_value_t = 13)]
        rank: i64,
    },
    /// The generalized Kawahara equation.
    Kawahara {
        #[command(subcommand)]
        command: KawaharaCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum KawaharaCommand {
    /// Verifies theorem 1, 2 or 3.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        theorem: u8,
        /// abstract | linear:a,b | log:g,d,c | quadratic[:p2,p1,p0] | power:n | poly:c0,...
        #[arg(long, default_value = "abstract")]
        f: String,
        /// Coefficient of u_xxx.
        #[arg(long, default_value = "b", allow_hyphen_values = true)]
        b: String,
    },
    /// Lists the known symmetries and conservation laws with their checks.
    Catalog,
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

enum Failure {
    Usage(String),
    Library(String),
}

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<jetcalc::Error> for Failure {
    fn from(e: jetcalc::Error) -> Self {
        Failure::Library(e.to_string())
    }
}

fn echo(args: &[String]) -> String {
    let quoted: Vec<String> = args
        .iter()
        .map(|a| if a.is_empty() || a.contains(char::is_whitespace) { format!("\"{a}\"") } else { a.clone() })
        .collect();
    quoted.join(" ")
}

struct Ctx {
    prec: Option<usize>,
}

struct Loaded {
    eq: EvolutionEquation,
    digest: InputDigest,
}

fn load(path: &Option<PathBuf>) -> Result<Loaded, Failure> {
    match path {
        None => {
            let eq = default_equation();
            let text = eq.rhs().to_string();
            Ok(Loaded { digest: InputDigest::new("eq", &format!("default ({text})")), eq })
        }
        Some(p) => {
            let bytes = std::fs::read(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            let text = String::from_utf8(bytes.clone())
                .map_err(|_| Failure::Usage(format!("{}: not UTF-8", p.display())))?;
            let file = parse_equation_file(&text)?;
            Ok(Loaded {
                eq: file.equation,
                digest: InputDigest::with_bytes("eq", &p.display().to_string(), &bytes),
            })
        }
    }
}

impl Ctx {
    fn prec(&self) -> usize {
        self.prec.unwrap_or_else(default_precision)
    }

    fn series(&self, src: &str) -> Result<PsdSeries, Failure> {
        Ok(parse_series(src, self.prec())?)
    }
}

fn on_equation(report: Report, loaded: &Loaded) -> Report {
    let mut r = report;
    r.inputs.push(loaded.digest.clone());
    r.equation = Some(format!("u_t = {}", loaded.eq.rhs()));
    r
}

fn no_time_jets(e: &JetExpr) -> Result<(), Failure> {
    if e.contains_any(|g| matches!(g, Generator::JetT(_))) {
        return Err(Failure::Usage("expression must not contain u_t jets here".into()));
    }
    Ok(())
}

fn theorem_report(mut r: Report, t: &TheoremReport) -> Report {
    r.equation = Some(format!("u_t = {}", t.rhs));
    r.notes.push(format!("f = {}", t.f_label));
    if let Some(g) = &t.gate {
        r.notes.push(format!("gate: {g}"));
    }
    if let Some(a) = &t.ansatz {
        if !a.assumptions.is_empty() {
            let items: Vec<String> = a.assumptions.iter().map(|e| format!("{e} != 0")).collect();
            r.notes.push(format!("assuming {}", items.join(", ")));
        }
    }
    if let Some(tr) = &t.transformation {
        r.notes.push(format!(
            "normalization: u = w/{} - {}, X = x + ({})*t",
            tr.scale, tr.shift, tr.drift
        ));
        if let Some(s) = &tr.scale_param {
            r.notes.push(format!("{s}^2 = {}", tr.p2));
        }
    }
    if let Some(scan) = &t.scan {
        r.notes.push(format!("scan: {}", scan.verdict));
        r.steps = scan.steps.iter().map(StepDoc::from).collect();
    }
    r.checks = t.checks.iter().map(CheckDoc::from).collect();
    r.diff_vs_printed = t.fluxes.iter().map(FluxDiffDoc::from).collect();
    r.verdict(t.verified)
}


fn execute(cli: &Cli, cmd_echo: &str) -> Result<Report, Failure> {
    let ctx = Ctx { prec: cli.prec };
    let base = Report::new(cmd_echo);
    let r = match &cli.command {
        Command::Dx { expr } => {
            let e = parse_expr(expr)?;
            let mut r = base.input("expr", expr);
            r.result = Some(total_x(&e).to_string());
            r
        }
        Command::Dt { expr, eq } => {
            let e = parse_expr(expr)?;
            no_time_jets(&e)?;
            let loaded = load(eq)?;
            let mut r = on_equation(base.input("expr", expr), &loaded);
            r.result = Some(total_t(&e, &loaded.eq).to_string());
            r
        }
        Command::Euler { expr } => {
            let e = parse_expr(expr)?;
            let mut r = base.input("expr", expr);
            r.result = Some(euler(&e).to_string());
            r
        }
        Command::Frechet { f, q } => {
            let (fe, qe) = (parse_expr(f)?, parse_expr(q)?);
            let mut r = base.input("f", f).input("q", q);
            r.result = Some(frechet(&fe, &qe).to_string());
            r
        }
        Command::Order { expr } => {
            let e = parse_expr(expr)?;
            let mut r = base.input("expr", expr);
            r.result = Some(order(&e).to_string());
            r
        }
        Command::Compose { a, b } => {
            let (sa, sb) = (ctx.series(a)?, ctx.series(b)?);
            let mut r = base.input("a", a).input("b", b);
            r.result = Some(sa.compose_prec(&sb, ctx.prec()).to_string());
            r
        }
        Command::Adjoint { a } => {
            let sa = ctx.series(a)?;
            let mut r = base.input("a", a);
            r.result = Some(sa.adjoint_prec(ctx.prec()).to_string());
            r
        }
        Command::Commutator { a, b } => {
            let (sa, sb) = (ctx.series(a)?, ctx.series(b)?);
            let mut r = base.input("a", a).input("b", b);
            r.result = Some(sa.commutator_prec(&sb, ctx.prec()).to_string());
            r
        }
        Command::Root { a, n } => {
            if *n == 0 {
                return Err(Failure::Usage("--n must be positive".into()));
            }
            let sa = ctx.series(a)?;
            let root = sa.nth_root_prec(*n, ctx.prec())?;
            let mut r = base.input("a", a).input("n", &n.to_string());
            r.result = Some(root.to_string());
            r
        }
        Command::Symmetry { q, eq } => {
            let e = parse_expr(q)?;
            no_time_jets(&e)?;
            let loaded = load(eq)?;
            let q_s = loaded.eq.spec().specialize(&e);
            let res = symmetry_residual(&loaded.eq, &q_s);
            let mut r = on_equation(base.input("q", q), &loaded);
            r.residual = Some(res.to_string());
            r.verdict(res.is_zero())
        }
        Command::Density { rho, eq, flux } => {
            let e = parse_expr(rho)?;
            no_time_jets(&e)?;
            let loaded = load(eq)?;
            let rho_s = loaded.eq.spec().specialize(&e);
            let mut r = on_equation(base.input("rho", rho), &loaded);
            let conserved = is_conserved_density(&loaded.eq, &rho_s);
            if conserved && *flux {
                let sigma = reconstruct_flux(&loaded.eq, &rho_s)?;
                r.residual = Some(conservation_residual(&loaded.eq, &rho_s, &sigma).to_string());
                r.flux = Some(sigma.to_string());
            } else if !conserved {
                let dt = total_t(&rho_s, &loaded.eq);
                r.residual = Some(euler(&dt).to_string());
                r.notes.push("residual is E(D_t(rho)), zero exactly for conserved densities".into());
            }
            r.verdict(conserved)
        }
        Command::Trivial { rho } => {
            let e = parse_expr(rho)?;
            let mut r = base.input("rho", rho);
            r.residual = Some(euler(&e).to_string());
            r.verdict(is_trivial_density(&e))
        }
        Command::Lemma1 { rho, eq } => {
            let e = parse_expr(rho)?;
            no_time_jets(&e)?;
            let loaded = load(eq)?;
            let rho_s = loaded.eq.spec().specialize(&e);
            let mut r = on_equation(base.input("rho", rho), &loaded);
            let conserved = is_conserved_density(&loaded.eq, &rho_s);
            let q = symmetry_from_density(&loaded.eq, &rho_s);
            let res = symmetry_residual(&loaded.eq, &q);
            r.result = Some(q.to_string());
            r.residual = Some(res.to_string());
            r.checks.push(CheckDoc {
                label: "rho is conserved".into(),
                detail: conserved.to_string(),
                passed: conserved,
            });
            r.checks.push(CheckDoc {
                label: "D_x(E(rho)) is a symmetry".into(),
                detail: format!("residual = {res}"),
                passed: res.is_zero(),
            });
            r.verdict(conserved && res.is_zero())
        }
        Command::Scan { eq, rank } => {
            let loaded = load(eq)?;
            let report = formal_symmetry_scan(&loaded.eq, *rank)?;
            let mut r = on_equation(base.input("rank", &rank.to_string()), &loaded);
            r.steps = report.steps.iter().map(StepDoc::from).collect();
            r.notes.push(report.verdict.to_string());
            r.verdict(matches!(report.verdict, ScanVerdict::SurvivedToRank(_)))
        }
        Command::Kawahara { command: KawaharaCommand::Verify { theorem, f, b } } => {
            let spec = GKESpec::with_b(parse_expr(b)?, parse_f_mode(f)?);
            let t = verify_theorem(*theorem, &spec)?;
            let r = base.input("theorem", &theorem.to_string()).input("f", f).input("b", b);
            theorem_report(r, &t)
        }
        Command::Kawahara { command: KawaharaCommand::Catalog } => catalog_report(base),
    };
    Ok(r)
}

fn catalog_report(mut r: Report) -> Report {
    let c = catalog();
    let mut ok = true;
    for s in &c.symmetries {
        r.checks.push(CheckDoc {
            label: format!("{} = {} [{}]", s.label, s.q, s.domain),
            detail: format!("symmetry residual = {}", s.residual),
            passed: s.verified(),
        });
        ok &= s.verified();
    }
    for d in &c.densities {
        let (detail, passed) = match &d.pair {
            Ok(p) => (format!("flux = {}, characteristic = {}", p.sigma, p.characteristic), p.verified),
            Err(e) => (e.to_string(), false),
        };
        r.checks.push(CheckDoc { label: format!("{} = {} [{}]", d.label, d.rho, d.domain), detail, passed });
        r.diff_vs_printed.push(FluxDiffDoc::from(&d.printed_flux));
        ok &= passed;
    }
    r.verdict(ok)
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { stdout: String::new(), stderr: text, code: 2 }
            } else {
                Outcome { stdout: text, stderr: String::new(), code: 0 }
            };
        }
    };
    let shown: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, &echo(&shown)) {
        Ok(report) => {
            let stdout = if cli.json { report.to_json() } else { report.to_text() };
            Outcome { stdout, stderr: String::new(), code: report.exit_code }
        }
        Err(Failure::Usage(m)) | Err(Failure::Library(m)) => {
            Outcome { stdout: String::new(), stderr: format!("error: {m}\n"), code: 2 }
        }
    }
}
