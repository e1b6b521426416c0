//! Command-line front end. `dispatch` is the whole program; the binary only
//! wires it to the process streams.
//!
//! Exit codes: 0 success (and `sat`), 1 `unsat`, 2 usage, parse or
//! validation errors, 3 budget or cap exceeded.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};
use serde_json::{json, Value};

use crate::bridge::{to_alc, to_gra, AlcExpr};
use crate::gra::{eval_term, EvalEnv, DEFAULT_BUDGET};
use crate::model::{ArityRel, ElemSet, Interp};
use crate::reify::{reify, translate};
use crate::semantics::{
    check_concept, domain_bound, filtration_bound, oracle_sat, OracleConfig, OracleOutcome, Witness,
};
use crate::syntax::{parse_alcqi, parse_concept_infer, parse_gra, Concept, Signature};
use crate::tableau::{alcqi_sat, alcqp_sat, TableauConfig, Verdict};
use crate::unravel::g_unravel;
use crate::{game, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "polydl", version, about = "Reasoning tools for polyadic description logics")]
struct Cli {
    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extension of a concept in a model.
    Check {
        model: String,
        /// Concept text, a file holding it, or `-`.
        concept: String,
    },
    /// Value of an algebra term in a model.
    EvalGra {
        model: String,
        term: String,
        /// Largest complement to materialize, in tuples.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Translate a polyadic concept to ALCQI.
    Reify {
        concept: String,
        /// Conjoin the domain marker.
        #[arg(long)]
        with_dom: bool,
    },
    /// Decide satisfiability of a polyadic or ALCQI concept.
    Sat {
        concept: String,
        /// Write a witness model here when satisfiable.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = TableauConfig::default().k_cap)]
        k_cap: u64,
    },
    /// Bounded model search for a polyadic concept.
    OracleSat {
        concept: String,
        /// Largest domain to search; defaults to the computed bound.
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Unravel a binary model into a tree.
    Unravel {
        model: String,
        #[arg(long)]
        root: String,
        #[arg(long)]
        depth: usize,
    },
    /// Translate between ALC and the unary algebra fragment.
    #[command(group(ArgGroup::new("direction").required(true).args(["to_gra", "to_alc"])))]
    Bridge {
        #[arg(long, value_name = "CONCEPT")]
        to_gra: Option<String>,
        #[arg(long, value_name = "TERM")]
        to_alc: Option<String>,
        /// Binary role names of the term; other atoms are unary.
        #[arg(long = "binary", value_name = "ROLE")]
        binary: Vec<String>,
    },
    /// Play the comparison game on two pointed models.
    Game {
        left: String,
        a: String,
        right: String,
        b: String,
        #[arg(long)]
        rounds: usize,
        #[arg(long)]
        grading: usize,
        /// Also print one line of play.
        #[arg(long)]
        trace: bool,
    },
}

/// Runs one command line. `args` includes the program name.
pub fn dispatch<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        used_stdin: false,
    };
    match run(cli, &mut io, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_budget() {
                3
            } else {
                2
            }
        }
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    used_stdin: bool,
}

impl Io<'_> {
    fn read_stdin(&mut self) -> Result<String> {
        if self.used_stdin {
            return Err(Error::Usage("`-` may stand for stdin only once".into()));
        }
        self.used_stdin = true;
        let mut s = String::new();
        self.stdin.read_to_string(&mut s).map_err(|source| Error::Io {
            context: "reading stdin".into(),
            source,
        })?;
        Ok(s)
    }

    /// `-` is stdin, an existing file is read, anything else is the text
    /// itself.
    fn text(&mut self, arg: &str) -> Result<String> {
        if arg == "-" {
            return self.read_stdin();
        }
        let p = Path::new(arg);
        if p.is_file() {
            return std::fs::read_to_string(p).map_err(|source| Error::Io {
                context: format!("reading {arg}"),
                source,
            });
        }
        Ok(arg.to_string())
    }

    fn model(&mut self, arg: &str) -> Result<Interp> {
        let text = if arg == "-" {
            self.read_stdin()?
        } else {
            std::fs::read_to_string(arg).map_err(|source| Error::Io {
                context: format!("reading {arg}"),
                source,
            })?
        };
        Ok(Interp::from_json(&text)?)
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(|source| Error::Io {
        context: "writing output".into(),
        source,
    })
}

fn save(path: &Path, interp: &Interp) -> Result<()> {
    std::fs::write(path, interp.to_json() + "\n").map_err(|source| Error::Io {
        context: format!("writing {}", path.display()),
        source,
    })
}

fn elem(interp: &Interp, name: &str) -> Result<crate::model::Elem> {
    interp
        .elem(name)
        .ok_or_else(|| Error::Usage(format!("no element named `{name}`")))
}

fn show_set(interp: &Interp, set: &ElemSet) -> String {
    let names: Vec<&str> = set.iter().map(|e| interp.name(e)).collect();
    format!("{{{}}}", names.join(", "))
}

fn show_rel(interp: &Interp, rel: &ArityRel) -> String {
    let tuples: Vec<String> = rel
        .tuples()
        .map(|t| {
            let names: Vec<&str> = t.iter().map(|&e| interp.name(e)).collect();
            format!("({})", names.join(", "))
        })
        .collect();
    format!("arity {} {{{}}}", rel.arity(), tuples.join(", "))
}

fn rel_json(interp: &Interp, rel: &ArityRel) -> Value {
    let tuples: Vec<Vec<&str>> = rel
        .tuples()
        .map(|t| t.iter().map(|&e| interp.name(e)).collect())
        .collect();
    json!({ "arity": rel.arity(), "tuples": tuples })
}

enum Parsed {
    Polyadic(Concept),
    Alcqi(crate::syntax::AlcqiConcept),
}

/// Reads a polyadic concept, falling back to ALCQI syntax (inverse roles,
/// generated names).
fn parse_either(text: &str) -> Result<Parsed> {
    match parse_concept_infer(text) {
        Ok((c, _)) => Ok(Parsed::Polyadic(c)),
        Err(first) => match parse_alcqi(text) {
            Ok(c) => Ok(Parsed::Alcqi(c)),
            Err(_) => Err(first.into()),
        },
    }
}

fn verdict_output(json: bool, sat: bool, witness: Option<&Witness>, extra: Value, out: &mut dyn Write) -> Result<i32> {
    let word = if sat { "sat" } else { "unsat" };
    if json {
        let mut v = json!({ "verdict": word });
        if let Some(w) = witness {
            v["witness"] = w.interp.to_json_value();
            v["root"] = json!(w.interp.name(w.root));
        }
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        write_out(out, &v.to_string())?;
    } else {
        write_out(out, word)?;
    }
    Ok(if sat { 0 } else { 1 })
}

fn run(cli: Cli, io: &mut Io<'_>, out: &mut dyn Write) -> Result<i32> {
    let json = cli.json;
    match cli.command {
        Command::Check { model, concept } => {
            let interp = io.model(&model)?;
            let (c, _) = parse_concept_infer(&io.text(&concept)?)?;
            let set = check_concept(&c, &interp)?;
            if json {
                let names: Vec<&str> = set.iter().map(|e| interp.name(e)).collect();
                write_out(out, &json!(names).to_string())?;
            } else {
                write_out(out, &show_set(&interp, &set))?;
            }
        }
        Command::EvalGra { model, term, budget } => {
            let interp = io.model(&model)?;
            let t = parse_gra(&io.text(&term)?)?;
            let rel = eval_term(&t, &EvalEnv::new(&interp).with_budget(budget))?;
            if json {
                write_out(out, &rel_json(&interp, &rel).to_string())?;
            } else {
                write_out(out, &show_rel(&interp, &rel))?;
            }
        }
        Command::Reify { concept, with_dom } => {
            let (c, _) = parse_concept_infer(&io.text(&concept)?)?;
            let t = if with_dom { reify(&c) } else { translate(&c) };
            if json {
                write_out(out, &json!({ "concept": t.to_string() }).to_string())?;
            } else {
                write_out(out, &t.to_string())?;
            }
        }
        Command::Sat {
            concept,
            witness,
            seed,
            k_cap,
        } => {
            let config = TableauConfig {
                k_cap,
                seed,
                ..TableauConfig::default()
            };
            let verdict = match parse_either(&io.text(&concept)?)? {
                Parsed::Polyadic(c) => alcqp_sat(&c, &config)?,
                Parsed::Alcqi(c) => alcqi_sat(&c, &config)?,
            };
            let w = match &verdict {
                Verdict::Sat(w) => Some(w),
                Verdict::Unsat => None,
            };
            if let (Some(path), Some(w)) = (&witness, w) {
                save(path, &w.interp)?;
            }
            return verdict_output(json, w.is_some(), w, json!({}), out);
        }
        Command::OracleSat {
            concept,
            bound,
            witness,
        } => {
            let (c, _) = parse_concept_infer(&io.text(&concept)?)?;
            let n = bound
                .unwrap_or_else(|| domain_bound(&c).max(filtration_bound(&c)))
                .max(1);
            let outcome = oracle_sat(&c, n, OracleConfig::default())?;
            let w = match &outcome {
                OracleOutcome::Sat(w) => Some(w),
                OracleOutcome::NoModel(_) => None,
            };
            if let (Some(path), Some(w)) = (&witness, w) {
                save(path, &w.interp)?;
            }
            return verdict_output(json, w.is_some(), w, json!({ "bound": n }), out);
        }
        Command::Unravel { model, root, depth } => {
            let interp = io.model(&model)?;
            let r = elem(&interp, &root)?;
            let u = g_unravel(&interp, r, depth)?;
            let v = u.to_json_value(&interp);
            let text = if json {
                v.to_string()
            } else {
                serde_json::to_string_pretty(&v).expect("JSON values serialize")
            };
            write_out(out, &text)?;
        }
        Command::Bridge { to_gra: Some(text), .. } => {
            let (c, _) = parse_concept_infer(&io.text(&text)?)?;
            let t = to_gra(&AlcExpr::Concept(c))?;
            if json {
                write_out(out, &json!({ "kind": "term", "result": t.to_string() }).to_string())?;
            } else {
                write_out(out, &t.to_string())?;
            }
        }
        Command::Bridge {
            to_alc: Some(text),
            binary,
            ..
        } => {
            let t = parse_gra(&io.text(&text)?)?;
            let mut sig = Signature::new();
            for a in t.atoms() {
                if binary.contains(&a) {
                    sig.add_role(a, 2);
                } else {
                    sig.add_concept(a);
                }
            }
            let e = to_alc(&t, &sig)?;
            if json {
                write_out(out, &json!({ "kind": e.kind(), "result": e.to_string() }).to_string())?;
            } else {
                write_out(out, &e.to_string())?;
            }
        }
        Command::Bridge { .. } => unreachable!("clap requires a direction"),
        Command::Game {
            left,
            a,
            right,
            b,
            rounds,
            grading,
            trace,
        } => {
            if grading == 0 {
                return Err(Error::Usage("--grading must be at least 1".into()));
            }
            let (l, r) = (io.model(&left)?, io.model(&right)?);
            let (x, y) = (elem(&l, &a)?, elem(&r, &b)?);
            let outcome = game::play(&l, x, &r, y, rounds, grading, trace)?;
            let winner = if outcome.duplicator_wins {
                "duplicator"
            } else {
                "spoiler"
            };
            if json {
                let mut v = json!({ "winner": winner });
                if trace {
                    v["trace"] = json!(outcome.trace);
                }
                write_out(out, &v.to_string())?;
            } else {
                write_out(out, winner)?;
                if trace {
                    write_out(out, &outcome.trace)?;
                }
            }
        }
    }
    Ok(0)
}
