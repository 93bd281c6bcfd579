//! `pit` — batch front end for the identity-testing library.
//!
//! Exit codes: 0 means the checked object is zero (or the command
//! succeeded), 1 means a nonzero verdict (or a failed suite), 2 means
//! any error. All randomness flows from `--seed`; identical inputs and
//! seeds produce byte-identical output.

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use pit_core::circuit::Formula;
use pit_core::error::Error;
use pit_core::parse::{parse_document, render_document, render_linear, DocBody, Document};
use pit_core::pit::{
    brute_force_zero, commutative_pit, robustness_search, schwartz_zippel, PitConfig, Source,
    SzResult,
};
use pit_core::suite::{run_full_suite, SuiteConfig};
use pit_core::transforms::{
    ben_or_cleve, homogenize_and_abp, local_ring_reduction, sps_to_u2,
};

#[derive(Parser)]
#[command(
    name = "pit",
    version,
    about = "Circuit transformations and polynomial identity testing over prime fields"
)]
struct Cli {
    /// Require the input artifact to be over F_p (documents carry their
    /// own modulus; this flag guards against reading the wrong one)
    #[arg(long, global = true, value_name = "p")]
    field: Option<u64>,
    /// Monomial cap for symbolic expansions
    #[arg(long, global = true, default_value_t = pit_core::circuit::DEFAULT_EXPANSION_CAP)]
    cap: usize,
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Sample count for the random zero test
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Output style: prose or one-line key=value records
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Deterministic test for commutative algebra circuits, full
    /// expansion otherwise, random evaluation when expansion overflows
    Auto,
    /// Symbolic expansion only
    Brute,
    /// Seeded random evaluation only
    Rand,
    /// Deterministic commutative-algebra test only
    Commutative,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an artifact computes the zero polynomial
    Check {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Lower a depth-3 circuit to a 2x2 upper-triangular matrix product
    Lower {
        input: PathBuf,
        /// Write the artifact here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Homogenize a 2x2 upper-triangular product into a width-2 planar
    /// branching program
    Abp {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compile a formula into a product of 3x3 transvections
    Boc {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Map a depth-3 circuit to a term product over a power-sum local ring
    ReduceLocal {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check an algebra's structure-constant table
    ValidateAlgebra { input: PathBuf },
    /// List hyperplane pairs that drop the polynomial's degree below 2
    Robustness {
        input: PathBuf,
        /// Largest number of pairs to examine
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Run the seeded end-to-end property suite
    Suite {
        /// Random lowering instances for the soundness and size-bound checks
        #[arg(long)]
        instances: Option<usize>,
        /// Constructed zero circuits mixed into the lowering batch
        #[arg(long)]
        zero_instances: Option<usize>,
        /// Random instances tested over each algebra in the zoo
        #[arg(long)]
        per_algebra: Option<usize>,
        /// Random formulas compiled to matrix products
        #[arg(long)]
        formulas: Option<usize>,
        /// Circuits generated per power-sum ring shape
        #[arg(long)]
        per_shape: Option<usize>,
        /// Evaluation points compared per branching program
        #[arg(long)]
        points: Option<usize>,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(&cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            2
        }
    };
    std::process::exit(code);
}

/// Writes to stdout, leaving quietly with the conventional SIGPIPE code
/// when the reader has closed the pipe (e.g. `pit ... | head`).
fn say(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|()| out.flush()).is_err() {
        std::process::exit(141);
    }
}

fn sayln(text: &str) {
    say(&format!("{text}\n"));
}

fn load(cli: &Cli, path: &PathBuf) -> Result<Document, String> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let doc = parse_document(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(p) = cli.field {
        if doc.field.modulus() != p {
            return Err(format!(
                "{} is over F_{}, expected F_{p}",
                path.display(),
                doc.field.modulus()
            ));
        }
    }
    Ok(doc)
}

/// Artifact text goes to the output file or stdout; the stats line
/// always goes to stderr so redirected artifacts stay clean.
fn emit_artifact(doc: &Document, output: &Option<PathBuf>, stats: &str) -> Result<(), String> {
    let text = render_document(doc);
    match output {
        Some(path) => fs::write(path, &text)
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?,
        None => say(text.as_str()),
    }
    eprintln!("{stats}");
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<i32, String> {
    match &cli.command {
        Command::Check { input, mode } => cmd_check(cli, input, *mode),
        Command::Lower { input, output } => cmd_lower(cli, input, output),
        Command::Abp { input, output } => cmd_abp(cli, input, output),
        Command::Boc { input, output } => cmd_boc(cli, input, output),
        Command::ReduceLocal { input, output } => cmd_reduce_local(cli, input, output),
        Command::ValidateAlgebra { input } => cmd_validate_algebra(cli, input),
        Command::Robustness { input, budget } => cmd_robustness(cli, input, *budget),
        Command::Suite {
            instances,
            zero_instances,
            per_algebra,
            formulas,
            per_shape,
            points,
        } => {
            let mut config = SuiteConfig { seed: cli.seed, cap: cli.cap, ..SuiteConfig::default() };
            if let Some(v) = instances {
                config.lowering_instances = *v;
            }
            if let Some(v) = zero_instances {
                config.zero_instances = *v;
            }
            if let Some(v) = per_algebra {
                config.per_algebra = *v;
            }
            if let Some(v) = formulas {
                config.formulas = *v;
            }
            if let Some(v) = per_shape {
                config.circuits_per_shape = *v;
            }
            if let Some(v) = points {
                config.points = *v;
            }
            let report = run_full_suite(&config);
            say(&report.render());
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

struct Verdict {
    is_zero: bool,
    mode: &'static str,
    seed: Option<u64>,
    witness: Option<(Vec<u64>, u64)>,
    splits: usize,
    notes: Vec<String>,
}

impl Verdict {
    fn exact(is_zero: bool, mode: &'static str) -> Verdict {
        Verdict { is_zero, mode, seed: None, witness: None, splits: 0, notes: Vec::new() }
    }
}

fn cmd_check(cli: &Cli, input: &PathBuf, mode: Mode) -> Result<i32, String> {
    let doc = load(cli, input)?;
    let verdict = decide(cli, doc.body, mode).map_err(|e| e.to_string())?;
    match cli.format {
        Format::Text => {
            let label = match (verdict.is_zero, verdict.mode) {
                (true, "rand") => "zero at all sampled points".to_string(),
                (false, "rand") => "probably nonzero (witness found)".to_string(),
                (true, _) => "zero (exact)".to_string(),
                (false, _) => "nonzero (exact)".to_string(),
            };
            sayln(&format!("verdict: {label}"));
            if let Some(seed) = verdict.seed {
                sayln(&format!("seed: {seed} ({} trials)", cli.trials));
            }
            if let Some((xs, z)) = &verdict.witness {
                sayln(&format!("witness: x = ({}), z = {z}", join(xs)));
            }
            for note in &verdict.notes {
                sayln(&format!("  {note}"));
            }
        }
        Format::Records => {
            let witness = match &verdict.witness {
                Some((xs, z)) => format!("{}/{z}", join(xs)),
                None => "-".to_string(),
            };
            let seed = verdict.seed.map_or("-".to_string(), |s| s.to_string());
            sayln(&format!(
                "verdict={} mode={} seed={seed} witness={witness} splits={}",
                if verdict.is_zero { "zero" } else { "nonzero" },
                verdict.mode,
                verdict.splits
            ));
        }
    }
    Ok(if verdict.is_zero { 0 } else { 1 })
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

/// Applies the requested decision procedure to one artifact body.
fn decide(cli: &Cli, body: DocBody, mode: Mode) -> Result<Verdict, Error> {
    // the deterministic commutative-algebra route
    if let DocBody::Algebra { basis, circuit } = &body {
        let circuit = match circuit {
            Some(c) => c,
            None => {
                return Err(Error::WrongInput {
                    msg: "the algebra file carries no term circuit to test".to_string(),
                })
            }
        };
        match mode {
            Mode::Commutative | Mode::Auto if basis.is_commutative() => {
                let config = PitConfig { expansion_cap: cli.cap, ..PitConfig::default() };
                let verdict = commutative_pit(circuit, &config)?;
                let mut out = Verdict::exact(verdict.is_zero, "det");
                out.splits = verdict.stats.splits;
                out.notes = verdict.trace;
                return Ok(out);
            }
            Mode::Commutative => return Err(Error::NotCommutative),
            _ => {}
        }
    }
    let src = match body {
        DocBody::Poly(p) => Source::Poly(p),
        DocBody::Sps(c) => Source::Sps(c),
        DocBody::Seq(s) => Source::Seq(s),
        DocBody::Abp(a) => Source::Abp(a),
        DocBody::Formula(f) => Source::Formula(f),
        DocBody::Algebra { circuit, .. } => Source::AlgebraCircuit(circuit.unwrap()),
        // a lowered artifact stands for the masked product
        DocBody::Lowered(low) => Source::Seq(low.masked()),
    };
    match mode {
        Mode::Commutative => Err(Error::WrongInput {
            msg: "the commutative mode needs an algebra file with a term circuit".to_string(),
        }),
        Mode::Brute => Ok(Verdict::exact(brute_force_zero(&src, cli.cap)?, "brute")),
        Mode::Rand => Ok(sampled(cli, &src)?),
        Mode::Auto => match brute_force_zero(&src, cli.cap) {
            Ok(is_zero) => Ok(Verdict::exact(is_zero, "brute")),
            Err(Error::ExpansionTooLarge { .. }) => Ok(sampled(cli, &src)?),
            Err(e) => Err(e),
        },
    }
}

fn sampled(cli: &Cli, src: &Source) -> Result<Verdict, Error> {
    let result: SzResult = schwartz_zippel(src, cli.seed, cli.trials)?;
    let mut notes = Vec::new();
    if result.degree_warning {
        notes.push(
            "note: the field is no larger than the degree bound; a zero run is weak evidence"
                .to_string(),
        );
    }
    Ok(Verdict {
        is_zero: result.zero_at_all_samples(),
        mode: "rand",
        seed: Some(result.seed),
        witness: result.witness,
        splits: 0,
        notes,
    })
}

// ---------------------------------------------------------------------------
// transformations
// ---------------------------------------------------------------------------

fn cmd_lower(cli: &Cli, input: &PathBuf, output: &Option<PathBuf>) -> Result<i32, String> {
    let doc = load(cli, input)?;
    let DocBody::Sps(circuit) = doc.body else {
        return Err("lower expects a depth-3 circuit (kind sps)".to_string());
    };
    let low = sps_to_u2(&circuit);
    let len = low.seq.matrices.len();
    let rounds = low.s.max(1).next_power_of_two().trailing_zeros();
    let bound = (low.d + low.n as usize) * 4usize.pow(rounds);
    let stats = format!(
        "stats kind=lowered len={len} bound={bound} within={} factors={} zero={}",
        yes(len <= bound),
        low.l_factors.len(),
        u8::from(low.syntactic_zero)
    );
    emit_artifact(&Document { field: doc.field, body: DocBody::Lowered(low) }, output, &stats)?;
    Ok(0)
}

fn cmd_abp(cli: &Cli, input: &PathBuf, output: &Option<PathBuf>) -> Result<i32, String> {
    let doc = load(cli, input)?;
    let seq = match doc.body {
        DocBody::Lowered(low) => low.seq,
        DocBody::Seq(seq) => seq,
        _ => return Err("abp expects a lowered artifact or a matrix sequence".to_string()),
    };
    let abp = homogenize_and_abp(&seq).map_err(|e| e.to_string())?;
    let edges: usize = abp.gaps.iter().map(Vec::len).sum();
    let stats = format!(
        "stats kind=abp levels={} width={} planar={} edges={edges}",
        abp.levels.len(),
        abp.width(),
        yes(abp.is_planar())
    );
    emit_artifact(&Document { field: doc.field, body: DocBody::Abp(abp) }, output, &stats)?;
    Ok(0)
}

fn cmd_boc(cli: &Cli, input: &PathBuf, output: &Option<PathBuf>) -> Result<i32, String> {
    let doc = load(cli, input)?;
    let DocBody::Formula(formula) = doc.body else {
        return Err("boc expects a formula artifact (kind formula)".to_string());
    };
    let height = height(&formula);
    let mut seq = ben_or_cleve(&formula);
    let len = seq.matrices.len();
    let bound = 4usize.pow(height);
    let stats = format!(
        "stats kind=seq len={len} bound={bound} within={} transvections={}",
        yes(len <= bound),
        yes(seq.matrices.iter().all(|m| m.is_transvection()))
    );
    // masks select the row-3, column-1 entry that carries the formula,
    // so checking the artifact means checking the formula
    let mut left = vec![0u64; 9];
    left[2] = 1;
    let mut right = vec![0u64; 9];
    right[0] = 1;
    seq.left_mask = Some(left);
    seq.right_mask = Some(right);
    emit_artifact(&Document { field: doc.field, body: DocBody::Seq(seq) }, output, &stats)?;
    Ok(0)
}

fn height(formula: &Formula) -> u32 {
    use pit_core::circuit::FormulaNode;
    fn go(node: &FormulaNode) -> u32 {
        match node {
            FormulaNode::Leaf { .. } => 0,
            FormulaNode::Add(a, b) | FormulaNode::Mul(a, b) => 1 + go(a).max(go(b)),
        }
    }
    go(&formula.root)
}

fn cmd_reduce_local(cli: &Cli, input: &PathBuf, output: &Option<PathBuf>) -> Result<i32, String> {
    let doc = load(cli, input)?;
    let DocBody::Sps(circuit) = doc.body else {
        return Err("reduce-local expects a depth-3 circuit (kind sps)".to_string());
    };
    let normalized = circuit.normalize_degree();
    let (s, d) = (normalized.fanin(), normalized.degree());
    let (basis, product) = local_ring_reduction(&circuit).map_err(|e| e.to_string())?;
    let expected = s * (d.max(1) - 1) + 2;
    let stats = format!(
        "stats kind=algebra dim={} expected={expected} within={} terms={}",
        basis.dim(),
        yes(basis.dim() == expected),
        product.terms.len()
    );
    emit_artifact(
        &Document { field: doc.field, body: DocBody::Algebra { basis, circuit: Some(product) } },
        output,
        &stats,
    )?;
    Ok(0)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

// ---------------------------------------------------------------------------
// validation and search
// ---------------------------------------------------------------------------

fn cmd_validate_algebra(cli: &Cli, input: &PathBuf) -> Result<i32, String> {
    // parsing runs the full table validation, so reaching Ok means valid
    let doc = load(cli, input)?;
    let DocBody::Algebra { basis, circuit } = doc.body else {
        return Err("validate-algebra expects an algebra artifact (kind algebra)".to_string());
    };
    match cli.format {
        Format::Text => {
            sayln(&format!(
                "valid algebra: dim={} commutative={} terms={}",
                basis.dim(),
                yes(basis.is_commutative()),
                circuit.map_or(0, |c| c.terms.len())
            ));
        }
        Format::Records => {
            sayln(&format!(
                "valid=yes dim={} commutative={} terms={}",
                basis.dim(),
                yes(basis.is_commutative()),
                circuit.map_or(0, |c| c.terms.len())
            ));
        }
    }
    Ok(0)
}

fn cmd_robustness(cli: &Cli, input: &PathBuf, budget: u64) -> Result<i32, String> {
    let doc = load(cli, input)?;
    let DocBody::Poly(poly) = doc.body else {
        return Err("robustness expects a polynomial artifact (kind poly)".to_string());
    };
    let pairs = robustness_search(&poly, budget).map_err(|e| e.to_string())?;
    match cli.format {
        Format::Text => {
            sayln(&format!("{} degree-reducing pair(s)", pairs.len()));
            for (a, b) in &pairs {
                sayln(&format!("  {} | {}", render_linear(a), render_linear(b)));
            }
        }
        Format::Records => {
            sayln(&format!("pairs={}", pairs.len()));
            for (a, b) in &pairs {
                sayln(&format!("pair={}|{}", render_linear(a), render_linear(b)));
            }
        }
    }
    Ok(0)
}
