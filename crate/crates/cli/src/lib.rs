//! Command-line front end: argument parsing, catalog caching and output.

pub mod cache;
pub mod error;
pub mod tables;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use enriques_core::definite::genus::with_jobs;
use enriques_core::definite::GenusClassCatalog;
use enriques_core::form::{form_invariants, orthogonal_group_order};
use enriques_core::lattice::IntegralLattice;
use enriques_core::pipeline::{
    delta_form, dual_catalog, gamma_twisted, genus_obstruction, ns_lattice, rep_classes, rep_method,
    report_from_catalog, seed_complement, verify_complement, verify_ns, EnriquesReport, RepMethod, RepOptions,
    SupersingularParams, ORBIT_SPACE_LIMIT,
};
use enriques_core::Error;
use serde_json::{json, Value};

pub use error::CliError;
use tables::Grid;

#[derive(Parser, Debug)]
#[command(name = "enriques", version, about = "Enriques quotients of supersingular K3 surfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the result here instead of standard output.
    #[arg(short = 'o', long = "output", global = true)]
    pub output: Option<PathBuf>,
    /// Genus catalog cache [env: ENRIQUES_CACHE, default ./.enriques-cache].
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Repeat the neighbour closure at a second prime and compare.
    #[arg(long, global = true)]
    pub cross_check: bool,
    /// Give up once a genus exceeds this many classes.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct ParamArgs {
    /// Characteristic, an odd prime.
    #[arg(short = 'p')]
    pub p: u64,
    /// Artin invariant.
    #[arg(long)]
    pub sigma: u32,
}

impl ParamArgs {
    fn params(&self) -> Result<SupersingularParams, CliError> {
        Ok(SupersingularParams::new(self.p, self.sigma)?)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gram matrix of the supersingular K3 lattice.
    NsLattice(ParamArgs),
    /// Gram matrix of Γ(2) = (U ⊕ E8)(2).
    Gamma2,
    /// Discriminant form δ of the complement genus.
    DeltaForm(ParamArgs),
    /// A lattice in the complement genus.
    Seed(ParamArgs),
    /// Catalog of all classes of the complement genus.
    Genus(ParamArgs),
    /// Lower and upper bounds for the number of Enriques quotients.
    Count(ParamArgs),
    /// Lower and upper bound tables over a grid of parameters.
    Tables {
        /// Primes, one row each.
        #[arg(short = 'p', value_delimiter = ',', default_value = "3")]
        primes: Vec<u64>,
        /// Artin invariants, one column each.
        #[arg(long = "sigma", value_delimiter = ',', default_value = "1,2,3,4,5")]
        sigmas: Vec<u32>,
    },
    /// Check a Gram file for membership in the NS genus (rank 22) or the complement genus (rank 12).
    Verify {
        file: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Order of the orthogonal group of the p-part of δ.
    OqOrder {
        #[command(flatten)]
        params: ParamArgs,
        /// Witt class of the form (default: that of δ).
        #[arg(long, allow_hyphen_values = true)]
        epsilon: Option<i8>,
    },
}

#[derive(Clone, Debug)]
pub struct Config {
    pub cache_dir: PathBuf,
    pub jobs: usize,
    pub cross_check: bool,
    pub budget: Option<usize>,
}

impl Config {
    pub fn from_args(g: &GlobalArgs) -> Result<Self, CliError> {
        let cache_dir = g
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os("ENRIQUES_CACHE").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(".enriques-cache"));
        let jobs = g.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        if cache_dir.exists() && !cache_dir.is_dir() {
            return Err(CliError::Usage(format!("cache dir {} is not a directory", cache_dir.display())));
        }
        Ok(Config { cache_dir, jobs, cross_check: g.cross_check, budget: g.budget })
    }

    fn rep_options(&self) -> RepOptions {
        RepOptions { primes: vec![], cross_check: self.cross_check, max_classes: self.budget }
    }
}

/// The genus catalog for `params`, from the cache when present.
pub fn catalog(cfg: &Config, params: &SupersingularParams) -> Result<GenusClassCatalog, CliError> {
    if let Some(cat) = cache::load(&cfg.cache_dir, params)? {
        return Ok(cat);
    }
    let cat = match rep_method(params)? {
        RepMethod::Dual(from) => {
            let src = catalog(cfg, &SupersingularParams::new(params.p, from)?)?;
            dual_catalog(&src, params)?
        }
        _ => rep_classes(params, &cfg.rep_options())?,
    };
    cache::store(&cfg.cache_dir, params, &cat)?;
    Ok(cat)
}

/// Refuses parameters whose discriminant orbit space is too large, before
/// any enumeration starts.
pub fn check_feasible(params: &SupersingularParams) -> Result<(), CliError> {
    if genus_obstruction(params)?.is_some() {
        return Ok(());
    }
    let space = (params.p as f64).powi(2 * params.sigma as i32);
    if space > ORBIT_SPACE_LIMIT as f64 {
        return Err(CliError::Math(Error::Infeasible(format!(
            "orbit space {}^{} exceeds {ORBIT_SPACE_LIMIT} points",
            params.p,
            2 * params.sigma
        ))));
    }
    Ok(())
}

pub fn report(cfg: &Config, params: &SupersingularParams) -> Result<EnriquesReport, CliError> {
    check_feasible(params)?;
    let cat = catalog(cfg, params)?;
    Ok(report_from_catalog(params, &cat)?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn read_lattice(path: &PathBuf) -> Result<IntegralLattice, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(IntegralLattice::parse(&text)?)
}

/// Runs one command and returns its standard output text.
pub fn execute(command: &Command, cfg: &Config) -> Result<String, CliError> {
    match command {
        Command::NsLattice(a) => Ok(ns_lattice(&a.params()?)?.to_json()),
        Command::Gamma2 => Ok(gamma_twisted().to_json()),
        Command::DeltaForm(a) => {
            let params = a.params()?;
            let d = delta_form(&params)?;
            let inv = form_invariants(&d)?;
            Ok(pretty(&json!({
                "params": params.to_json(),
                "order": d.order().to_string(),
                "milgram_signature": d.milgram_signature()?,
                "invariants": inv,
                "form": d.to_json(),
            })))
        }
        Command::Seed(a) => Ok(seed_complement(&a.params()?)?.to_json()),
        Command::Genus(a) => {
            let params = a.params()?;
            Ok(pretty(&catalog(cfg, &params)?.to_json(params.to_json())))
        }
        Command::Count(a) => Ok(pretty(&report(cfg, &a.params()?)?.to_json())),
        Command::Tables { primes, sigmas } => {
            let grid_params = primes
                .iter()
                .flat_map(|&p| sigmas.iter().map(move |&s| SupersingularParams::new(p, s)))
                .collect::<Result<Vec<_>, _>>()?;
            let mut grid = Grid::new(primes.clone(), sigmas.clone());
            for params in &grid_params {
                match report(cfg, params) {
                    Ok(r) => grid.insert(&r),
                    Err(CliError::Math(e @ (Error::Infeasible(_) | Error::TooLarge(_)))) => {
                        eprintln!("p={} σ={}: {e}", params.p, params.sigma);
                        grid.mark_unknown(params.p, params.sigma);
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(format!("{}\n{}", grid.lower_table(), grid.upper_table()))
        }
        Command::Verify { file, params } => {
            let params = params.params()?;
            let l = read_lattice(file)?;
            let (kind, outcome) = if l.rank() == 22 {
                ("ns", verify_ns(&l, &params))
            } else {
                ("complement", verify_complement(&l, &delta_form(&params)?))
            };
            let member = outcome.is_ok();
            let text = pretty(&json!({
                "params": params.to_json(),
                "genus": kind,
                "member": member,
                "reason": outcome.as_ref().err().map(|e| e.to_string()),
            }));
            match outcome {
                Ok(()) => Ok(text),
                Err(e) => {
                    print!("{text}");
                    Err(CliError::Math(e))
                }
            }
        }
        Command::OqOrder { params, epsilon } => {
            let params = params.params()?;
            let eps = match epsilon {
                Some(e @ (1 | -1)) => *e,
                Some(e) => return Err(CliError::Usage(format!("--epsilon must be 1 or -1, not {e}"))),
                None => delta_form(&params)?.p_part(params.p).witt_epsilon(params.p)?,
            };
            let order = orthogonal_group_order(params.p, params.sigma, eps);
            Ok(pretty(&json!({"params": params.to_json(), "epsilon": eps, "order": order.to_string()})))
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 2 {
                eprintln!("see `enriques help` for usage");
            }
            e.exit_code()
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = Config::from_args(&cli.global)?;
    let text = with_jobs(cfg.jobs, || execute(&cli.command, &cfg))??;
    match &cli.global.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
