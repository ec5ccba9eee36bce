//! Command-line front end.
//!
//! Exit codes: 0 success (including a NONTRIVIAL word-problem answer),
//! 2 invalid input, 3 resource cap exceeded, 4 node budget exceeded,
//! 5 verification mismatch or failed relation.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::automaton::{
    build_union, well_definedness_check, Automaton, BuildOptions, DEFAULT_ALPHABET_CAP, DEFAULT_STATE_CAP,
};
use crate::constructions::{presentation_for, relator_check, PresentationKind};
use crate::error::Error;
use crate::linalg::{big_to_json, parse_matrix_list, IntMatrix};
use crate::nadic::{affine_apply_prefix, AffineMap, DigitWord};
use crate::treeaction::{
    act, commutator_check, conjugacy_search_bounded, format_word, is_identity, parse_word, verify_inverse_relation,
    verify_relation, ConjugacyOutcome, GroupWord, Outcome, RelationReport, DEFAULT_NODE_BUDGET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

pub const BUDGET_ENV: &str = "AUTGRP_NODE_BUDGET";
pub const DEFAULT_SEED: u64 = 20_111_001;

#[derive(Debug, Parser)]
#[command(name = "autgrp", version, about = "Affine automaton groups over n-adic digit trees")]
pub struct Cli {
    /// Emit one JSON object per line instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Limits {
    /// Maximum number of distinct section words explored by the word problem.
    #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_NODE_BUDGET)]
    pub budget: usize,
}

#[derive(Debug, Args)]
pub struct Caps {
    /// Largest alphabet n^d allowed.
    #[arg(long, default_value_t = DEFAULT_ALPHABET_CAP)]
    pub alphabet_cap: u64,

    /// Largest total state count allowed.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: u64,
}

impl Caps {
    fn options(&self) -> BuildOptions {
        BuildOptions {
            alphabet_cap: self.alphabet_cap,
            state_cap: self.state_cap,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Dot,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the automaton for a list of matrices.
    Build {
        #[arg(long)]
        matrices: PathBuf,
        #[arg(long)]
        n: u32,
        /// Merge behaviourally equal states (not part of the plain construction).
        #[arg(long)]
        dedup: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Apply a group word to a digit word.
    Act {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
    },
    /// Decide whether a group word is the identity.
    Wp {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[command(flatten)]
        limits: Limits,
    },
    /// Check the commutator and conjugation relations for every matrix and axis.
    Relations {
        #[arg(long)]
        matrices: PathBuf,
        #[arg(long)]
        n: u32,
        /// Also check the relations for inverse matrices (unimodular ones only).
        #[arg(long)]
        inverse: bool,
        #[command(flatten)]
        limits: Limits,
        #[command(flatten)]
        caps: Caps,
    },
    /// Print the group presentation and check each relator in the automaton.
    Presentation {
        #[arg(long)]
        matrices: PathBuf,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        limits: Limits,
        #[command(flatten)]
        caps: Caps,
    },
    /// Compare the automaton action with exact affine arithmetic on random prefixes.
    Verify {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Search for a conjugator of bounded length. Never claims non-conjugacy.
    Conj {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        #[command(flatten)]
        limits: Limits,
    },
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Resource { .. } => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_matrices(path: &Path) -> Result<Vec<IntMatrix>, Error> {
    let ms = parse_matrix_list(&read(path)?)?;
    if ms.is_empty() {
        return Err(Error::EmptyMatrixList);
    }
    Ok(ms)
}

fn load_automaton(path: &Path) -> Result<Automaton, Error> {
    Automaton::from_json(&read(path)?)
}

/// Runs one command, writing results to `out`. Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, Error> {
    let json = cli.json;
    match &cli.command {
        Command::Build {
            matrices,
            n,
            dedup,
            format,
            output,
            caps,
        } => {
            let ms = load_matrices(matrices)?;
            let mut aut = build_union(&ms, *n, &caps.options())?;
            if *dedup {
                aut = aut.dedup();
            }
            let text = match format {
                Format::Json => aut.to_json(),
                Format::Dot => aut.to_dot(),
            };
            match output {
                Some(path) => std::fs::write(path, text)?,
                None => writeln!(out, "{text}")?,
            }
            let bound = aut.state_bound();
            let line = if json {
                json!({"states": aut.state_count(), "bound": big_to_json(&bound), "deduplicated": dedup}).to_string()
            } else {
                format!("states={} bound={}", aut.state_count(), bound)
            };
            if output.is_some() {
                writeln!(out, "{line}")?;
            } else {
                eprintln!("{line}");
            }
            Ok(EXIT_OK)
        }
        Command::Act { automaton, word, input } => {
            let aut = load_automaton(automaton)?;
            let w = parse_word(&aut, word)?;
            let u = DigitWord::parse(input, aut.base(), aut.dim())?;
            let image = act(&aut, &w, &u)?;
            if json {
                writeln!(out, "{}", json!({"input": u.to_string(), "output": image.to_string()}))?;
            } else {
                writeln!(out, "{image}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Wp {
            automaton,
            word,
            limits,
        } => {
            let aut = load_automaton(automaton)?;
            let w = parse_word(&aut, word)?;
            let res = is_identity(&aut, &w, limits.budget);
            let witness = match &res.outcome {
                Outcome::Nontrivial { witness } => Some(witness.to_string()),
                _ => None,
            };
            if json {
                let tag = res.to_string();
                let tag = tag.split(' ').next().unwrap_or_default();
                writeln!(
                    out,
                    "{}",
                    json!({"result": tag, "visited": res.visited, "witness": witness})
                )?;
            } else {
                writeln!(out, "{res}")?;
                if let Some(wit) = witness {
                    writeln!(out, "moved prefix: {wit}")?;
                }
            }
            Ok(if res.budget_exceeded() { EXIT_BUDGET } else { EXIT_OK })
        }
        Command::Relations {
            matrices,
            n,
            inverse,
            limits,
            caps,
        } => {
            let ms = load_matrices(matrices)?;
            let aut = build_union(&ms, *n, &caps.options())?;
            let d = aut.dim();
            let mut rows: Vec<RelationReport> = Vec::new();
            for i in 0..d {
                for j in i + 1..d {
                    rows.push(commutator_check(&aut, i, j, limits.budget)?);
                }
            }
            for (k, m) in ms.iter().enumerate() {
                for j in 0..d {
                    rows.push(verify_relation(&aut, k, j, limits.budget)?);
                    if *inverse && m.is_unimodular() {
                        rows.push(verify_inverse_relation(&aut, k, j, limits.budget)?);
                    }
                }
            }
            report_rows(
                out,
                json,
                rows.iter().map(|r| (r.name.as_str(), &r.result, r.to_string())),
            )
        }
        Command::Presentation {
            matrices,
            n,
            limits,
            caps,
        } => {
            let ms = load_matrices(matrices)?;
            let p = presentation_for(&ms)?;
            let aut = build_union(&ms, *n, &caps.options())?;
            let kind = match p.kind {
                PresentationKind::SemidirectProduct => "semidirect",
                PresentationKind::AscendingHnn => "ascending-hnn",
            };
            if json {
                writeln!(out, "{}", json!({"presentation": p.to_string(), "kind": kind}))?;
            } else {
                writeln!(out, "{p}")?;
                writeln!(out, "# form: {kind}")?;
            }
            let checks = relator_check(&aut, &p, limits.budget)?;
            report_rows(
                out,
                json,
                checks.iter().map(|c| {
                    let status = status_word(&c.result.outcome);
                    let line = format!("{:<36} {:<15} visited={}", c.relator, status, c.result.visited);
                    (c.relator.as_str(), &c.result, line)
                }),
            )
        }
        Command::Verify {
            automaton,
            depth,
            samples,
            seed,
        } => {
            let aut = load_automaton(automaton)?;
            let wd = well_definedness_check(&aut);
            let (checks, mismatches) = sample_semantics(&aut, *depth, *samples, *seed);
            if json {
                writeln!(
                    out,
                    "{}",
                    json!({
                        "seed": seed,
                        "checks": checks,
                        "mismatches": mismatches,
                        "well_defined": wd.passed(),
                        "transitions_checked": wd.transitions_checked,
                        "transition_failures": wd.failure_count,
                    })
                )?;
            } else {
                writeln!(out, "seed={seed}")?;
                writeln!(out, "{wd}")?;
                writeln!(out, "checks={checks} mismatches={mismatches}")?;
            }
            Ok(if mismatches == 0 && wd.passed() {
                EXIT_OK
            } else {
                EXIT_MISMATCH
            })
        }
        Command::Conj {
            automaton,
            from,
            to,
            max_len,
            limits,
        } => {
            let aut = load_automaton(automaton)?;
            let w1 = parse_word(&aut, from)?;
            let w2 = parse_word(&aut, to)?;
            match conjugacy_search_bounded(&aut, &w1, &w2, *max_len, limits.budget)? {
                ConjugacyOutcome::Found {
                    conjugator,
                    spelling,
                    candidates,
                } => {
                    let word = format_word(&aut, &conjugator);
                    if json {
                        writeln!(
                            out,
                            "{}",
                            json!({"result": "FOUND", "conjugator": spelling, "word": word, "candidates": candidates})
                        )?;
                    } else {
                        let spelling = if spelling.is_empty() { "1" } else { &spelling };
                        writeln!(out, "FOUND conjugator={spelling} candidates={candidates}")?;
                        writeln!(out, "as states: {word}")?;
                    }
                }
                ConjugacyOutcome::Inconclusive { candidates } => {
                    if json {
                        writeln!(out, "{}", json!({"result": "INCONCLUSIVE", "candidates": candidates}))?;
                    } else {
                        writeln!(
                            out,
                            "INCONCLUSIVE no conjugator of length <= {max_len} ({candidates} candidates)"
                        )?;
                    }
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn status_word(o: &Outcome) -> &'static str {
    match o {
        Outcome::Identity => "pass",
        Outcome::Nontrivial { .. } => "FAIL",
        Outcome::BudgetExceeded => "budget-exceeded",
    }
}

fn report_rows<'a>(
    out: &mut dyn Write,
    json: bool,
    rows: impl Iterator<Item = (&'a str, &'a crate::treeaction::WordProblemResult, String)>,
) -> Result<i32, Error> {
    let mut code = EXIT_OK;
    for (name, res, line) in rows {
        if json {
            writeln!(
                out,
                "{}",
                json!({"relation": name, "status": status_word(&res.outcome), "visited": res.visited})
            )?;
        } else {
            writeln!(out, "{line}")?;
        }
        code = match res.outcome {
            Outcome::Identity => code,
            Outcome::Nontrivial { .. } => EXIT_MISMATCH,
            Outcome::BudgetExceeded if code == EXIT_OK => EXIT_BUDGET,
            Outcome::BudgetExceeded => code,
        };
    }
    Ok(code)
}

/// For every state, draws `samples` random prefixes of length `1..=depth` and
/// compares the automaton image with the affine map `u ↦ v + M u`. Returns
/// `(checks, mismatches)`.
pub fn sample_semantics(aut: &Automaton, depth: usize, samples: usize, seed: u64) -> (u64, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = 0;
    let mut mismatches = 0;
    if depth == 0 {
        return (0, 0);
    }
    for (id, s) in aut.states().iter().enumerate() {
        let f = AffineMap::new(aut.matrices()[s.matrix_index()].clone(), s.offset().clone())
            .expect("state offsets match the matrix dimension");
        let w = GroupWord::state(aut, crate::automaton::StateId(id as u32)).expect("state id in range");
        for _ in 0..samples {
            let len = rng.gen_range(1..=depth);
            let idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..aut.alphabet_size())).collect();
            let u = DigitWord::from_indices(&idx, aut.base(), aut.dim());
            checks += 1;
            let got = act(aut, &w, &u).expect("word matches automaton");
            if got != affine_apply_prefix(&f, &u) {
                mismatches += 1;
            }
        }
    }
    (checks, mismatches)
}
