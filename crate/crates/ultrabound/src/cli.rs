//! Command-line front end: parsing, bounded evaluation, compilation to
//! first-order sentences, family checks, and the metastability demo.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;

use crate::bounded::{compile_fo, eval_bounded};
use crate::bounds::{check_family, check_metastable, fragment_of, Bound, MonotoneFn};
use crate::logic::{parse_formula, Signature};
use crate::structures::{load_family, Env, FamilySpec};

#[derive(Debug, Parser)]
#[command(name = "ultrabound", about = "bounded satisfaction for countably-infinitary sentences", disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Machine,
    Table,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// Family description file.
    #[arg(long)]
    family: PathBuf,
    /// Override the file's tail start.
    #[arg(long)]
    tail_start: Option<usize>,
}

impl FamilyArgs {
    fn load(&self) -> Result<FamilySpec, String> {
        let mut fam = load_family(&self.family)?;
        if let Some(t) = self.tail_start {
            if t > fam.structures.len() {
                return Err(format!("tail start {t} exceeds prefix length"));
            }
            fam.tail_start = t;
        }
        Ok(fam)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a sentence and report its prenex class.
    Parse {
        formula: String,
    },
    /// Evaluate a sentence on every structure of a family under fixed
    /// bounds; true overall when every tail structure satisfies it.
    Eval {
        formula: String,
        #[command(flatten)]
        fam: FamilyArgs,
        /// Forall-side bound literal (star | nat:<n> | mono:... | pair:<n>;mono:...).
        #[arg(long = "A")]
        a: String,
        /// Exists-side bound literal.
        #[arg(long = "E")]
        e: String,
    },
    /// Compile bounded satisfaction into a plain first-order sentence.
    Compile {
        formula: String,
        #[arg(long = "A")]
        a: String,
        #[arg(long = "E")]
        e: String,
        /// Cap on generated disjunction branches.
        #[arg(long, default_value_t = 10_000)]
        cap: usize,
    },
    /// Search exists-side bounds up to a cap; succeeds when some candidate
    /// covers the whole tail.
    Check {
        formula: String,
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long = "A")]
        a: String,
        #[arg(long = "E-cap", default_value_t = 8)]
        e_cap: u64,
        /// Echo the normalized forall bound before the report.
        #[arg(long)]
        normalize_a: bool,
        #[arg(long, value_enum, default_value_t = Format::Machine)]
        format: Format,
    },
    /// Worked examples.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Debug, Subcommand)]
enum Demo {
    /// Direct metastability search: find m with d(c_m, c_{max(m,F(m))}) < eps
    /// on every tail structure, and cross-check it against the bounded
    /// reading of the convergence sentence.
    Metastable {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Rational threshold of the form 1/<n>.
        #[arg(long)]
        eps: String,
        /// Window function literal mono:<t>-><v>,...
        #[arg(long = "F")]
        func: String,
        #[arg(long = "M-cap", default_value_t = 8)]
        m_cap: u64,
        #[arg(long, value_enum, default_value_t = Format::Machine)]
        format: Format,
        /// Skip the cross-check and run only the direct search.
        #[arg(long)]
        direct_only: bool,
    },
}

const CONVERGENCE: &str = "/\\{n in N} \\/{k in N} /\\{j in N} D_{n+1}(c_k, c_{max(k,j)})";

fn parse_eps(text: &str) -> Result<(Rational64, u64), String> {
    let (num, den) = text.split_once('/').ok_or("epsilon must look like 1/<n>")?;
    if num.trim() != "1" {
        return Err("epsilon must be a unit fraction 1/<n>".into());
    }
    let n: i64 = den.trim().parse().map_err(|_| format!("bad denominator `{den}`"))?;
    if n < 1 {
        return Err("epsilon denominator must be positive".into());
    }
    Ok((Rational64::new(1, n), n as u64))
}

/// Run the CLI against explicit argv and an output sink. Returns the process
/// exit code: 0 for a true verdict, 1 for a false verdict, 2 for any error.
pub fn run(argv: Vec<String>, out: &mut impl Write) -> i32 {
    match try_run(argv, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(out, "error: {msg}");
            2
        }
    }
}

fn try_run(argv: Vec<String>, out: &mut impl Write) -> Result<i32, String> {
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    let sig = Signature::default_sig();
    let w = |out: &mut dyn Write, s: String| {
        out.write_all(s.as_bytes()).map_err(|e| e.to_string())
    };
    match cli.command {
        Command::Parse { formula } => {
            let f = parse_formula(&formula, &sig).map_err(|e| e.to_string())?;
            w(out, format!("class: {:?}\nlevels: {:?}\nsentence: {f}\n", f.classify(), f.levels()))?;
            Ok(0)
        }
        Command::Eval { formula, fam, a, e } => {
            let f = parse_formula(&formula, &sig).map_err(|e| e.to_string())?;
            let a = Bound::parse(&a)?;
            let e = Bound::parse(&e)?;
            let fam = fam.load()?;
            let pair = fragment_of(&a, &e, &f).map_err(|e| e.to_string())?;
            let mut all_tail = true;
            for (i, st) in fam.structures.iter().enumerate() {
                let v = eval_bounded(st, &pair, &f, &Env::new()).map_err(|e| e.to_string())?;
                w(out, format!("{i} {} {v}\n", st.label))?;
                if i >= fam.tail_start && !v {
                    all_tail = false;
                }
            }
            Ok(if all_tail { 0 } else { 1 })
        }
        Command::Compile { formula, a, e, cap } => {
            let f = parse_formula(&formula, &sig).map_err(|e| e.to_string())?;
            let a = Bound::parse(&a)?;
            let e = Bound::parse(&e)?;
            let pair = fragment_of(&a, &e, &f).map_err(|e| e.to_string())?;
            let g = compile_fo(&pair, &f, cap).map_err(|e| e.to_string())?;
            w(out, format!("{g}\n"))?;
            Ok(0)
        }
        Command::Check { formula, fam, a, e_cap, normalize_a, format } => {
            let f = parse_formula(&formula, &sig).map_err(|e| e.to_string())?;
            let a = Bound::parse(&a)?;
            if normalize_a {
                w(out, format!("A={a}\n"))?;
            }
            let fam = fam.load()?;
            let rep = check_family(&fam, &f, &a, e_cap).map_err(|e| e.to_string())?;
            w(out, match format {
                Format::Machine => rep.machine(),
                Format::Table => rep.table(),
            })?;
            Ok(if rep.winning.is_some() { 0 } else { 1 })
        }
        Command::Demo(Demo::Metastable { fam, eps, func, m_cap, format, direct_only }) => {
            let (eps, den) = parse_eps(&eps)?;
            let func = MonotoneFn::parse(&func)?;
            let fam = fam.load()?;
            let rep = check_metastable(&fam, eps, &func, m_cap).map_err(|e| e.to_string())?;
            w(out, match format {
                Format::Machine => rep.machine(),
                Format::Table => rep.table(),
            })?;
            if !direct_only {
                // bounded reading of the convergence sentence at matching
                // depth: thresholds 1..=den need level indices 0..den
                let f = parse_formula(CONVERGENCE, &sig).map_err(|e| e.to_string())?;
                let a = Bound::BPair(den - 1, func.clone());
                let check = check_family(&fam, &f, &a, m_cap).map_err(|e| e.to_string())?;
                let agree = check.winning == rep.winning;
                w(out, format!(
                    "cross-check A={a}: winning {} ({})\n",
                    check
                        .winning
                        .as_ref()
                        .map(|b| b.to_string())
                        .unwrap_or_else(|| "none".into()),
                    if agree { "agrees" } else { "DISAGREES" }
                ))?;
                if !agree {
                    return Err("direct search and bounded reading disagree".into());
                }
            }
            Ok(if rep.winning.is_some() { 0 } else { 1 })
        }
    }
}
