mod commands;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use glnq_core::counting::Method;
use glnq_core::field_tower::PrimePower;
use glnq_core::matrix_group::GROUP_BUDGET;
use glnq_core::partitions_sym::Partition;
use glnq_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Order {
    /// Coefficient sequences compared constant term first.
    Lex,
    /// Ascending root exponent `ℓ_f`.
    Ell,
}

#[derive(Debug, Parser)]
#[command(name = "glnq", version, about = "Exact character theory and factorization counts for GL_n(F_q)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Field order (a prime power).
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Matrix size.
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Number of regular elliptic factors.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Target cycle type, e.g. "3,1".
    #[arg(long, global = true)]
    mu: Option<String>,
    /// Count only regular semisimple targets.
    #[arg(long = "box", global = true)]
    box_count: bool,
    /// closed-nu-n, closed-re-main, closed-n-minus-1, frobenius, brute, or auto.
    #[arg(long, global = true)]
    method: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    width: Option<usize>,
    /// Largest group order enumerated by brute force.
    #[arg(long, global = true, default_value_t = GROUP_BUDGET)]
    budget: u64,
    /// Directory for cached field moduli.
    #[arg(long, global = true, env = "GLNQ_CACHE")]
    cache: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full character table with an orthogonality report.
    Chartable {
        /// Irreducible that must vanish at ε_d, e.g. "z^3+z^2+1".
        #[arg(long)]
        pin: Option<String>,
    },
    /// Number of k-tuples of regular elliptic elements with product of cycle type μ.
    Count,
    /// Run a cross-verification suite: tiny-groups, quasipoly, nonpoly, or all.
    Verify {
        suite: String,
        /// Residue class for the quasipoly and nonpoly suites.
        #[arg(long)]
        residue: Option<u64>,
    },
    /// |p_{k,μ}(q) - 1/z_μ| over a range of prime powers.
    Sweep {
        #[arg(long, default_value_t = 2)]
        qmin: u64,
        #[arg(long, default_value_t = 13)]
        qmax: u64,
        /// Explicit list of q, overriding qmin/qmax.
        #[arg(long, value_delimiter = ',')]
        qs: Option<Vec<u64>>,
    },
    /// Fit g_{k,(n)}(q) on prime powers q ≡ residue (mod n).
    ///
    /// Samples are the smallest prime powers in the residue class. When the
    /// residue shares a factor with n only powers of primes dividing n qualify,
    /// so the class may hold too few samples.
    Quasipoly {
        #[arg(long)]
        residue: u64,
        #[arg(long, value_delimiter = ',')]
        samples: Option<Vec<u64>>,
        /// Degree bound; default n²(k+1).
        #[arg(long)]
        degree_bound: Option<usize>,
    },
    /// Monic irreducibles of degree d (excluding z) with ℓ_f and θ_n of the root.
    Irreducibles {
        #[arg(long)]
        d: u32,
        #[arg(long, value_enum, default_value_t = Order::Lex)]
        order: Order,
    },
    /// Conjugacy class data for one matrix ("a,b;c,d") or for every class.
    Classinfo {
        #[arg(long)]
        matrix: Option<String>,
    },
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub q: Option<u64>,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub mu: Option<Partition>,
    pub box_count: bool,
    pub method: Option<Method>,
    pub format: Format,
    pub budget: u64,
}

impl RunConfig {
    pub fn q(&self) -> Result<u64, CliError> {
        self.q.ok_or_else(|| CliError::Usage("--q is required".into()))
    }

    pub fn n(&self) -> Result<u32, CliError> {
        match (self.n, &self.mu) {
            (Some(n), _) => Ok(n),
            (None, Some(mu)) => Ok(mu.size()),
            _ => Err(CliError::Usage("--n is required".into())),
        }
    }

    pub fn k(&self) -> Result<u32, CliError> {
        self.k.ok_or_else(|| CliError::Usage("--k is required".into()))
    }

    /// `--mu`, defaulting to `(n)`.
    pub fn mu(&self) -> Result<Partition, CliError> {
        match &self.mu {
            Some(mu) => Ok(mu.clone()),
            None => Ok(Partition::new(vec![self.n()?])),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Mismatch(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 2,
            CliError::Core(e) if e.is_budget() => 3,
            CliError::Core(Error::InexactDivision(_) | Error::InexactResult(_) | Error::OrthogonalityFailure(..)) => 2,
            CliError::Core(_) | CliError::Usage(_) => 4,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) if e.is_budget() => {
                format!("{e}\nhint: raise --budget, or use a closed formula / --box with --method auto")
            }
            CliError::Core(e) => e.to_string(),
            CliError::Usage(s) | CliError::Mismatch(s) => s.clone(),
        }
    }
}

fn validate(cli: &Cli) -> Result<RunConfig, CliError> {
    if let Some(q) = cli.q {
        PrimePower::new(q)?;
    }
    let mu = cli.mu.as_deref().map(Partition::parse).transpose()?;
    if let (Some(mu), Some(n)) = (&mu, cli.n) {
        if mu.size() != n {
            return Err(CliError::Usage(format!("--mu {mu} is not a partition of --n {n}")));
        }
    }
    if let Some(mu) = &mu {
        if mu.is_empty() {
            return Err(CliError::Usage("--mu must be non-empty".into()));
        }
    }
    if cli.n == Some(0) {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if cli.k == Some(0) {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let method = match cli.method.as_deref() {
        None | Some("auto") => None,
        Some(m) => Some(Method::parse(m)?),
    };
    Ok(RunConfig {
        q: cli.q,
        n: cli.n,
        k: cli.k,
        mu,
        box_count: cli.box_count,
        method,
        format: cli.format,
        budget: cli.budget,
    })
}

fn run(cli: Cli) -> Result<String, CliError> {
    if let Some(dir) = &cli.cache {
        // read by the field layer; set before any worker thread exists
        std::env::set_var("GLNQ_CACHE", dir);
    }
    if let Some(w) = cli.width {
        if w == 0 {
            return Err(CliError::Usage("--width must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let cfg = validate(&cli)?;
    match cli.command {
        Command::Chartable { pin } => commands::chartable(&cfg, pin.as_deref()),
        Command::Count => commands::count(&cfg),
        Command::Verify { suite, residue } => verify::run(&cfg, &suite, residue),
        Command::Sweep { qmin, qmax, qs } => commands::sweep(&cfg, qmin, qmax, qs),
        Command::Quasipoly { residue, samples, degree_bound } => {
            commands::quasipoly(&cfg, residue, samples, degree_bound)
        }
        Command::Irreducibles { d, order } => commands::irreducibles(&cfg, d, order),
        Command::Classinfo { matrix } => commands::classinfo(&cfg, matrix.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(4) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Mismatch(report)) => {
            println!("{report}");
            eprintln!("verification mismatch");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
