use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use resfmb::abelian::{decompose, shape_criterion, ShapeDecision};
use resfmb::field::Field;
use resfmb::filtration::{dimension_subalgebras, lower_central_series, predicates, Analysis};
use resfmb::fmb::{decide, is_fm_basis, search_fmb, SearchBudget, SearchOutcome, DEFAULT_BUDGET};
use resfmb::format::{parse_algebra, parse_basis};
use resfmb::liealg::{LieElement, RestrictedLieAlgebra};
use resfmb::linalg::Subspace;
use resfmb::{report, with_algebra};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

/// Restricted Lie algebras and filtered multiplicative bases of their
/// restricted enveloping algebras.
#[derive(Parser)]
#[command(name = "resfmb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SearchArgs {
    /// Maximum number of search nodes.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Worker threads for the search (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl SearchArgs {
    fn budget(self) -> SearchBudget {
        SearchBudget {
            max_nodes: self.budget,
            threads: self.threads,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an algebra file.
    Check { file: PathBuf },
    /// Lower central series and dimension subalgebras.
    Series { file: PathBuf },
    /// Heights of an adapted basis and the dimensions of the powers of ω.
    Heights { file: PathBuf },
    /// Cyclic decomposition of an abelian algebra.
    Decompose { file: PathBuf },
    /// Check whether a basis file is a filtered multiplicative basis.
    FmbVerify { file: PathBuf, basis: PathBuf },
    /// Search for a filtered multiplicative basis.
    FmbSearch {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Decide whether a filtered multiplicative basis exists.
    Decide {
        file: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Write a JSON report.
    Report {
        file: PathBuf,
        #[arg(long, value_name = "OUT")]
        json: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
        /// Include wall-clock time, which makes reports non-reproducible.
        #[arg(long)]
        timing: bool,
    },
}

impl Command {
    fn file(&self) -> &PathBuf {
        match self {
            Command::Check { file }
            | Command::Series { file }
            | Command::Heights { file }
            | Command::Decompose { file }
            | Command::FmbVerify { file, .. }
            | Command::FmbSearch { file, .. }
            | Command::Decide { file, .. }
            | Command::Report { file, .. } => file,
        }
    }
}

const DEFINITE: u8 = 0;
const INCONCLUSIVE: u8 = 2;

fn span_text<F: Field>(alg: &RestrictedLieAlgebra<F>, s: &Subspace<F>) -> String {
    if s.is_zero() {
        return "0".into();
    }
    let rows: Vec<String> = s
        .rows()
        .iter()
        .map(|r| alg.render(&LieElement::new(r.clone())))
        .collect();
    format!("span{{{}}}", rows.join(", "))
}

fn analyse<F: Field>(alg: &RestrictedLieAlgebra<F>) -> Result<Analysis<F>> {
    Ok(Analysis::new(Arc::new(alg.clone()))?)
}

fn run<F: Field>(alg: &RestrictedLieAlgebra<F>, cmd: &Command) -> Result<u8> {
    match cmd {
        Command::Check { .. } => {
            let data = dimension_subalgebras(alg)?;
            let s = predicates(alg, &data);
            println!(
                "valid restricted Lie algebra over {} of dimension {}",
                alg.field().name(),
                alg.dim()
            );
            println!("abelian: {}", s.is_abelian);
            match s.nilpotency_class {
                Some(c) => println!("nilpotency class: {c}"),
                None => println!("nilpotency class: not nilpotent"),
            }
            println!("p-nilpotent: {}", s.is_p_nilpotent);
            println!("powerful: {}", s.is_powerful);
            let gens: Vec<String> = s.minimal_generators.iter().map(|g| alg.render(g)).collect();
            println!("minimal generators: {}", gens.join(", "));
        }
        Command::Series { .. } => {
            for (i, g) in lower_central_series(alg).iter().enumerate() {
                println!("γ_{} = {}", i + 1, span_text(alg, g));
            }
            let data = dimension_subalgebras(alg)?;
            for (m, d) in data.dim_subalgebras.iter().enumerate() {
                println!("D_{} = {}", m + 1, span_text(alg, d));
            }
            if !data.p_nilpotent {
                println!("the chain of dimension subalgebras does not reach 0: not p-nilpotent");
            }
        }
        Command::Heights { .. } => {
            let a = analyse(alg)?;
            let basis = a.filtration.adapted.as_ref().expect("p-nilpotent");
            for ((v, name), h) in basis.vectors.iter().zip(&basis.names).zip(&basis.heights) {
                let shown = alg.render(v);
                if shown == *name {
                    println!("ν({name}) = {h}");
                } else {
                    println!("ν({name}) = {h}   where {name} = {shown}");
                }
            }
            let dims: Vec<String> = a
                .omega
                .iter()
                .filter(|s| !s.is_zero())
                .map(|s| s.dim().to_string())
                .collect();
            println!("ω-power dims: {}", dims.join(", "));
        }
        Command::Decompose { .. } => {
            let dec = if alg.field().elements().is_some() {
                decompose(alg)?
            } else {
                match shape_criterion(alg)? {
                    ShapeDecision::HasDecomposition(dec) => dec,
                    ShapeDecision::NoDecomposition { x, y, ratio, .. } => {
                        println!(
                            "no cyclic decomposition: {}/{} ratio {} is not a p-th power in {}",
                            alg.names()[x],
                            alg.names()[y],
                            alg.field().format(&ratio),
                            alg.field().name()
                        );
                        return Ok(DEFINITE);
                    }
                }
            };
            for (g, e) in dec.generators.iter().zip(&dec.exponents) {
                println!("{}  exponent {e}", alg.render(g));
            }
        }
        Command::FmbVerify { basis, .. } => {
            let a = analyse(alg)?;
            let text = fs::read_to_string(basis).map_err(|e| format!("{}: {e}", basis.display()))?;
            let elems: Vec<_> = parse_basis(&a.input_env, &text)?
                .iter()
                .map(|b| a.from_input(b))
                .collect();
            let verdict = is_fm_basis(&a, &elems)?;
            if verdict.is_valid() {
                println!("valid filtered multiplicative basis ({} elements)", elems.len());
            } else {
                println!("not a filtered multiplicative basis");
                for line in verdict.describe(&a, &elems) {
                    println!("  {line}");
                }
            }
        }
        Command::FmbSearch { search, .. } => {
            let a = analyse(alg)?;
            match search_fmb(&a, &search.budget())? {
                SearchOutcome::Found { basis, nodes } => {
                    let shown: Vec<String> = basis.iter().map(|b| a.render(b)).collect();
                    println!("found after {nodes} nodes: {{{}}}", shown.join(", "));
                }
                SearchOutcome::Exhausted { nodes, digest } => {
                    println!("no filtered multiplicative basis: search exhausted after {nodes} nodes");
                    println!("trace digest: {digest}");
                }
                SearchOutcome::BudgetExceeded { nodes } => {
                    println!("inconclusive: budget of {nodes} nodes exhausted");
                    return Ok(INCONCLUSIVE);
                }
                SearchOutcome::NotApplicable(reason) => {
                    println!("inconclusive: {reason}");
                    return Ok(INCONCLUSIVE);
                }
            }
        }
        Command::Decide { search, .. } => {
            let a = analyse(alg)?;
            let cert = decide(&a, &search.budget())?;
            println!("{}", cert.summary(&a));
            if !cert.is_definite() {
                return Ok(INCONCLUSIVE);
            }
        }
        Command::Report {
            json, search, timing, ..
        } => {
            let start = Instant::now();
            let a = analyse(alg)?;
            let budget = search.budget();
            let cert = decide(&a, &budget)?;
            let mut value = report::build(&a, &cert, &budget);
            if *timing {
                value["timing_ms"] = (start.elapsed().as_millis() as u64).into();
            }
            fs::write(json, report::to_string(&value)).map_err(|e| format!("{}: {e}", json.display()))?;
            println!("{}", cert.summary(&a));
            if !cert.is_definite() {
                return Ok(INCONCLUSIVE);
            }
        }
    }
    Ok(DEFINITE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let path = cli.command.file();
    let outcome = fs::read_to_string(path)
        .map_err(|e| format!("{}: {e}", path.display()).into())
        .and_then(|text| parse_algebra(&text).map_err(|e| format!("{}: {e}", path.display()).into()))
        .and_then(|alg| with_algebra!(&alg, a => run(a, &cli.command)));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
