use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use tautring::commands::{self, Base, FanKindArg, Which};
use tautring::core::classes::Phi;
use tautring::core::Rational;
use tautring::report::{summary, write_lines};
use tautring::{InputError, MatroidSpec, VerificationReport};

#[derive(Parser)]
#[command(name = "tautring", version, about = "Exact checks for matroid fans, Chow rings and projective-bundle rings")]
struct Cli {
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "TAUTRING_JOBS")]
    jobs: Option<usize>,
    /// Print elapsed time to stderr.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichArg {
    Identity,
    Lemmas,
    Truncation,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhiArg {
    Identity,
    Negation,
}

impl From<PhiArg> for Phi {
    fn from(p: PhiArg) -> Phi {
        match p {
            PhiArg::Identity => Phi::Identity,
            PhiArg::Negation => Phi::Negation,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Permutohedral,
    Bergman,
    Bipermutohedral,
    ProjectiveBundle,
}

#[derive(Subcommand)]
enum Command {
    /// Bundle identity, cancellation lemmas and truncation recursion for one matroid.
    Verify {
        /// Matroid JSON, inline or as a file path.
        #[arg(long)]
        matroid: String,
        #[arg(long, value_enum, default_value = "all")]
        which: WhichArg,
        /// Check the lemmas on formal biflag sums only, skipping Chow-ring comparisons.
        #[arg(long)]
        formal_only: bool,
        /// Delete loops instead of rejecting the matroid.
        #[arg(long)]
        simplify: bool,
        /// Restrict the lemma suite to this first component, written `S|T;S|T`; repeatable.
        #[arg(long)]
        first: Vec<String>,
    },
    /// Poincaré duality, Hard Lefschetz and Hodge–Riemann for a projective-bundle ring.
    Kahler {
        /// One matroid per bundle; repeat for several bundles.
        #[arg(long, required = true)]
        matroid: Vec<String>,
        /// Size of the ground set; defaults to that of the first matroid.
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        /// One value for all bundles, or one per bundle.
        #[arg(long, value_enum, default_value = "identity")]
        phi: Vec<PhiArg>,
        /// Use the Bergman fan of this matroid as base instead of the permutohedral fan.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 3)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Bloch–Gieseker hypothesis, rank conclusion and sign after twisting by the convex class.
    BlochGieseker {
        #[arg(long)]
        matroid: String,
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "identity")]
        phi: PhiArg,
        #[arg(long)]
        base: Option<String>,
        /// Positive twist parameters such as 1, 10 or 3/2.
        #[arg(long = "lambda", default_values = ["1", "10"])]
        lambdas: Vec<String>,
    },
    /// Hilbert function of A(permutohedral)/ann(s_t) against the Bergman fan's Chow ring.
    QuotientAhk {
        #[arg(long)]
        matroid: String,
        #[arg(long, value_enum, default_value = "negation")]
        phi: PhiArg,
    },
    /// Dump a fan as JSON, followed by unimodularity and balancing reports.
    Fan {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        matroid: Option<String>,
        #[arg(long = "N", alias = "n")]
        n: Option<usize>,
        #[arg(long)]
        simplify: bool,
    },
}

fn ground_size(spec: &MatroidSpec) -> Result<usize, InputError> {
    Ok(spec.build()?.ground_size())
}

fn parse_rational(s: &str) -> Result<Rational, InputError> {
    s.parse().map_err(|_| InputError::Usage(format!("not a rational number: {s}")))
}

fn emit(reports: &[VerificationReport]) -> Result<(), InputError> {
    let stdout = io::stdout();
    write_lines(&mut stdout.lock(), reports).map_err(|e| InputError::Io { path: "stdout".into(), source: e })
}

fn run(command: Command) -> Result<Vec<VerificationReport>, InputError> {
    match command {
        Command::Verify { matroid, which, formal_only, simplify, first } => {
            let spec = MatroidSpec::load(&matroid)?;
            let which = match which {
                WhichArg::Identity => Which::Identity,
                WhichArg::Lemmas => Which::Lemmas,
                WhichArg::Truncation => Which::Truncation,
                WhichArg::All => Which::All,
            };
            commands::verify(&spec, &commands::VerifyOptions { which, formal_only, simplify, firsts: &first })
        }
        Command::Kahler { matroid, n, phi, base, samples, seed } => {
            let specs = matroid.iter().map(|m| MatroidSpec::load(m)).collect::<Result<Vec<_>, _>>()?;
            if phi.len() != 1 && phi.len() != specs.len() {
                return Err(InputError::Usage(format!("{} --phi values for {} matroids", phi.len(), specs.len())));
            }
            let n = match n {
                Some(n) => n,
                None => ground_size(&specs[0])?,
            };
            let base_spec = base.as_deref().map(MatroidSpec::load).transpose()?;
            let base = Base::new(n, base_spec.as_ref())?;
            let bundles: Vec<(&MatroidSpec, Phi)> =
                specs.iter().enumerate().map(|(i, s)| (s, phi[i.min(phi.len() - 1)].into())).collect();
            let out = commands::kahler(&base, &bundles, samples, seed)?;
            if out.flipped {
                eprintln!("note: base convex class negated to make its top power positive");
            }
            Ok(out.reports)
        }
        Command::BlochGieseker { matroid, n, phi, base, lambdas } => {
            let spec = MatroidSpec::load(&matroid)?;
            let n = match n {
                Some(n) => n,
                None => ground_size(&spec)?,
            };
            let base_spec = base.as_deref().map(MatroidSpec::load).transpose()?;
            let base = Base::new(n, base_spec.as_ref())?;
            let lambdas = lambdas.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
            commands::bloch_gieseker_cmd(&base, &spec, phi.into(), &lambdas)
        }
        Command::QuotientAhk { matroid, phi } => {
            let out = commands::quotient_ahk(&MatroidSpec::load(&matroid)?, phi.into())?;
            eprintln!("quotient dims {:?}, bergman dims {:?}", out.quotient_dims, out.bergman_dims);
            Ok(out.reports)
        }
        Command::Fan { kind, matroid, n, simplify } => {
            let spec = matroid.as_deref().map(MatroidSpec::load).transpose()?;
            let kind = match kind {
                KindArg::Permutohedral => FanKindArg::Permutohedral,
                KindArg::Bergman => FanKindArg::Bergman,
                KindArg::Bipermutohedral => FanKindArg::Bipermutohedral,
                KindArg::ProjectiveBundle => FanKindArg::ProjectiveBundle,
            };
            let out = commands::fan_cmd(kind, spec.as_ref(), n, simplify)?;
            let line = serde_json::to_string(&out.dump).expect("fan dump serializes");
            writeln!(io::stdout(), "{line}").map_err(|e| InputError::Io { path: "stdout".into(), source: e })?;
            Ok(out.reports)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs.filter(|&j| j > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let reports = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&reports) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    eprintln!("{}", summary(&reports));
    if cli.timing {
        eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    }
    if reports.iter().all(VerificationReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
