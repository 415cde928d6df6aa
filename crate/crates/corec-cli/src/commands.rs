use std::io::Write;
use std::path::{Path, PathBuf};
use std::rc::Rc;

use clap::{Parser, Subcommand, ValueEnum};
use corec_kernel::{tree_truncate, Elem, Int, Stream, UnaryOp};
use corec_proof::{
    build_fusion_proof, fusion_sides, hyp_check, hyp_sound, proof_check, verify_unique, Designator, EqProof, HypProof, ProofError,
    ProofSession, Rhs,
};
use corec_stream::{Mode, DEFAULT_FUEL};
use corec_universe::label;

use crate::error::CliError;
use crate::parse::parse_module;
use crate::program::{Language, Program};
use crate::sexp::{self, ProofTerm};

#[derive(Debug, Parser)]
#[command(name = "corec", about = "Check, run and prove things about corecursive stream definitions")]
pub struct Cli {
    /// Unfolding steps allowed per demanded element.
    #[arg(long, global = true, env = "COREC_FUEL", default_value_t = DEFAULT_FUEL)]
    pub fuel: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EvalMode {
    Naive,
    Memo,
}

impl From<EvalMode> for Mode {
    fn from(m: EvalMode) -> Self {
        match m {
            EvalMode::Naive => Mode::Naive,
            EvalMode::Memo => Mode::Memoized,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a verdict for every definition.
    Check { file: PathBuf },
    /// Print the first elements of a definition.
    Eval {
        file: PathBuf,
        name: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, value_enum, default_value_t = EvalMode::Naive)]
        mode: EvalMode,
        /// Evaluate even if the checker rejects the definition.
        #[arg(long, hide = true)]
        unchecked: bool,
    },
    /// Check an equality proof up to a depth.
    Verify {
        file: PathBuf,
        #[arg(long, global = true, default_value_t = 100)]
        depth: usize,
        #[command(subcommand)]
        goal: Goal,
    },
    /// Count additions in naive and memoized evaluation.
    Bench {
        file: PathBuf,
        name: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Relabel a tree, written `leaf` or `(l X r)`, breadth first from a stream.
    Label { file: PathBuf, tree: String, name: String },
}

#[derive(Debug, Subcommand)]
pub enum Goal {
    /// Two definitions denote the same stream.
    Eq { lhs: String, rhs: String },
    /// `map H (iterate F1 X) = iterate F2 (H X)`.
    Fusion {
        h: String,
        f1: String,
        f2: String,
        #[arg(allow_negative_numbers = true)]
        x: Int,
    },
    /// Both candidates solve the equation stated by `RHS` and are equal.
    Unique { rhs: String, lhs: String, other: String },
    /// A hypothesis proof read from a file.
    Hyp { proof: PathBuf },
}

/// Parses `args` and runs the command, returning the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    match run(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            if let CliError::Refuted { index, .. } = &e {
                let _ = writeln!(out, "refuted at {index}");
            }
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &Path) -> Result<Program, CliError> {
    let text = read(path)?;
    let module = parse_module(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })?;
    Ok(Program::new(&module))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io { path: "<output>".into(), source: e }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let fuel = cli.fuel;
    match &cli.command {
        Command::Check { file } => {
            let program = load(file)?;
            for v in &program.verdicts {
                writeln!(out, "{v}").map_err(io)?;
            }
            Ok(i32::from(program.verdicts.iter().any(|v| v.rejection.is_some())))
        }
        Command::Eval { file, name, n, mode, unchecked } => {
            let program = load(file)?;
            let (s, run) = program.stream(name, (*mode).into(), fuel, !unchecked)?;
            let printed = print_prefix(&s, *n, out);
            writeln!(err, "# adds={} steps={}", run.adds(), run.steps()).map_err(io)?;
            printed?;
            Ok(0)
        }
        Command::Verify { file, depth, goal } => {
            let program = load(file)?;
            verify(&program, goal, *depth, fuel)?;
            writeln!(out, "ok").map_err(io)?;
            Ok(0)
        }
        Command::Bench { file, name, n } => {
            let program = load(file)?;
            if program.language(name)? != Language::Plain {
                return Err(CliError::Usage(format!("bench compares evaluation modes of a plain definition; `{name}` is chunked")));
            }
            let mut adds = Vec::new();
            for mode in [Mode::Naive, Mode::Memoized] {
                let (s, run) = program.stream(name, mode, fuel, true)?;
                s.prefix(*n)?;
                adds.push(run.adds());
            }
            writeln!(out, "naive_adds={} memo_adds={} n={n}", adds[0], adds[1]).map_err(io)?;
            Ok(0)
        }
        Command::Label { file, tree, name } => {
            let program = load(file)?;
            let t = sexp::read(tree).and_then(|s| sexp::tree(&s)).map_err(|e| CliError::Usage(format!("tree literal: {e}")))?;
            let (labels, _) = program.stream(name, Mode::Memoized, fuel, true)?;
            let relabelled = label(&t.to_inf(), &labels)?;
            writeln!(out, "{}", tree_truncate(&relabelled, t.height() + 1)?).map_err(io)?;
            Ok(0)
        }
    }
}

fn print_prefix(s: &Stream<Elem>, n: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let mut cur = s.clone();
    for i in 0..n {
        writeln!(out, "{}", cur.head()).map_err(io)?;
        if i + 1 < n {
            cur = cur.tail()?;
        }
    }
    Ok(())
}

fn unary(name: &str) -> Result<UnaryOp, CliError> {
    name.parse().map_err(|_| CliError::UnknownName(name.to_string()))
}

fn verify(program: &Program, goal: &Goal, depth: usize, fuel: u64) -> Result<(), CliError> {
    let sess = ProofSession::with_fuel(Rc::clone(&program.plain), fuel);
    match goal {
        Goal::Eq { lhs, rhs } => {
            let (a, b) = (program.designator(lhs, fuel)?, program.designator(rhs, fuel)?);
            proof_check(&EqProof::CompleteEmbed(a.clone(), b.clone()), &a, &b, depth, &sess)?;
        }
        Goal::Fusion { h, f1, f2, x } => {
            let (h, f1, f2, x) = (unary(h)?, unary(f1)?, unary(f2)?, Elem::Int(*x));
            let checked = build_fusion_proof(h, f1, f2, x).and_then(|p| {
                let (l, r) = fusion_sides(h, f1, f2, x)?;
                proof_check(&p, &l, &r, depth, &sess)
            });
            if let Err(ProofError::HypothesisViolated(v)) = checked {
                let seeds = Stream::iterate(x, move |s| f1.apply(*s));
                let index = seeds.prefix(depth + 1)?.iter().position(|s| *s == v).unwrap_or(0);
                return Err(CliError::Refuted { index, reason: format!("{h} . {f1} and {f2} . {h} differ at {v}") });
            }
            checked?;
        }
        Goal::Unique { rhs, lhs, other } => {
            program.require_accepted(rhs)?;
            if program.language(rhs)? != Language::Plain {
                return Err(CliError::Usage(format!("`{rhs}` must be a plain definition to state an equation")));
            }
            let equation = Rhs::of_definition(&program.plain, rhs).ok_or_else(|| CliError::UnknownName(rhs.clone()))?;
            let (a, b) = (program.designator(lhs, fuel)?, program.designator(other, fuel)?);
            verify_unique(&equation, &a, &b, depth, &sess)?;
        }
        Goal::Hyp { proof } => {
            let file = sexp::proof_file(&read(proof)?).map_err(|e| CliError::Usage(format!("{}: {e}", proof.display())))?;
            let p = hyp_proof(program, &file.proof, fuel)?;
            let (a, b) = (program.designator(&file.lhs, fuel)?, program.designator(&file.rhs, fuel)?);
            // the structural check reports circular steps; unfolding then finds where heads part
            let structural = hyp_check(&[], &p, &a, &b, &program.plain);
            hyp_sound(&[], &p, &a, &b, depth, &sess)?;
            structural?;
        }
    }
    Ok(())
}

fn hyp_proof(program: &Program, t: &ProofTerm, fuel: u64) -> Result<HypProof, CliError> {
    Ok(match t {
        ProofTerm::Cons(x, sub) => HypProof::cons(*x, hyp_proof(program, sub, fuel)?),
        ProofTerm::Hyp(i) => HypProof::Hyp(*i),
        ProofTerm::Trans(mid, l, r) => {
            let mid: Designator = program.designator(mid, fuel)?;
            HypProof::trans(mid, hyp_proof(program, l, fuel)?, hyp_proof(program, r, fuel)?)
        }
    })
}
