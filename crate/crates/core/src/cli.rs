//! Command-line driver: one entry point dispatching to every module, with
//! machine-readable output for regression tests.
//!
//! Output is JSON by default (keys sorted), CSV behind `--csv` where it
//! makes sense, and DOT for crystal graphs behind `--dot`. All numbers are
//! exact strings, never floats. Exit codes: 0 success, 2 domain or usage
//! error, 3 inconclusive or not computable in the frame.

use clap::{Parser, Subcommand};
use std::io::Write;
use std::sync::Arc;

use crate::cells::CellContext;
use crate::crystals::{simple_crystal_check, TensorCrystal};
use crate::error::{Error, Result};
use crate::rootdata::{build_root_datum, AffineType, PositiveRoot, Root, RootDatum};
use crate::uplus::{parse_element, UPlus};
use crate::weyl::{classical_orbit, omega_word, ExtendedWeylElement};

#[derive(Parser, Debug)]
#[command(name = "qa", version, about = "Exact workbench for affine root data, quantum PBW bases, level-zero crystals, and limit rings", disable_help_subcommand = true)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Numerical data of an affine diagram.
    Rootdata {
        #[arg(long = "type")]
        typ: String,
    },
    /// Classified positive roots up to a delta-coefficient cutoff.
    Roots {
        #[arg(long = "type")]
        typ: String,
        #[arg(long, default_value_t = 2)]
        cutoff: i64,
        #[arg(long)]
        csv: bool,
    },
    /// Reduced words, beta tables, orbits of the extended Weyl group.
    Weyl {
        #[arg(long = "type")]
        typ: String,
        /// Range "lo..hi" of beta indices to tabulate.
        #[arg(long, allow_hyphen_values = true)]
        betas: Option<String>,
        /// Comma-separated word in simple reflections to decompose.
        #[arg(long)]
        word: Option<String>,
        /// Classical orbit of the level-zero fundamental weight at a node.
        #[arg(long)]
        orbit: Option<usize>,
    },
    /// PBW indices and elements at a weight.
    Pbw {
        #[arg(long = "type")]
        typ: String,
        /// Weight as comma-separated simple-root coordinates.
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 0)]
        frame: i64,
    },
    /// The characterizing bilinear form of two elements.
    Form {
        #[arg(long = "type")]
        typ: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Canonical basis elements at a weight.
    Canonical {
        #[arg(long = "type")]
        typ: String,
        #[arg(long)]
        weight: String,
        #[arg(long, default_value_t = 0)]
        frame: i64,
    },
    /// Materialize a tensor crystal; DOT export behind --dot.
    Crystal {
        #[arg(long = "type")]
        typ: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        dot: bool,
        /// Run the simple-crystal report for one fundamental node instead.
        #[arg(long)]
        check_node: Option<usize>,
    },
    /// Cell partition of the truncated triple basis.
    Cells {
        #[arg(long = "type")]
        typ: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        trunc_boxes: Option<u64>,
        #[arg(long)]
        trunc_det: Option<i64>,
    },
    /// Structure constants of the limit ring on the truncated basis.
    Jring {
        #[arg(long = "type")]
        typ: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        trunc_boxes: Option<u64>,
        #[arg(long)]
        trunc_det: Option<i64>,
        #[arg(long)]
        csv: bool,
    },
    /// a-function values over the right components.
    Afn {
        #[arg(long = "type")]
        typ: String,
        #[arg(long)]
        lambda: String,
    },
    /// Size of the diagonal trivial-triple set.
    Dcount {
        #[arg(long = "type")]
        typ: String,
        #[arg(long)]
        lambda: String,
    },
}

fn datum_for(typ: &str) -> Result<Arc<RootDatum>> {
    build_root_datum(AffineType::parse(typ)?)
}

fn parse_lambda(datum: &RootDatum, s: &str) -> Result<Vec<i64>> {
    let lambda: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::parse(format!("bad lambda entry {t:?}"))))
        .collect::<Result<_>>()?;
    if lambda.len() != datum.rank {
        return Err(Error::domain(format!(
            "lambda needs {} entries for rank {}",
            datum.rank, datum.rank
        )));
    }
    Ok(lambda)
}

fn parse_weight(datum: &RootDatum, s: &str) -> Result<Root> {
    let coords: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::parse(format!("bad coordinate {t:?}"))))
        .collect::<Result<_>>()?;
    if coords.len() != datum.rank + 1 {
        return Err(Error::domain(format!("weight needs {} coordinates", datum.rank + 1)));
    }
    Ok(Root::new(coords))
}

fn trunc_from_env(flag: Option<u64>, var: &str, default: u64) -> u64 {
    flag.or_else(|| std::env::var(var).ok().and_then(|v| v.parse().ok())).unwrap_or(default)
}

fn trunc_det_from_env(flag: Option<i64>) -> i64 {
    flag.or_else(|| std::env::var("QA_TRUNC_DET").ok().and_then(|v| v.parse().ok())).unwrap_or(2)
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("serializable"))
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Rootdata { typ } => {
            let datum = datum_for(&typ)?;
            emit(out, &datum.to_json()).map_err(io_err)?;
        }
        Command::Roots { typ, cutoff, csv } => {
            let datum = datum_for(&typ)?;
            if cutoff < 0 {
                return Err(Error::domain("cutoff must be non-negative"));
            }
            let roots = datum.enumerate_positive_roots(cutoff);
            if csv {
                for r in &roots {
                    match r {
                        PositiveRoot::ClassicalPlus(c) => {
                            writeln!(out, "plus,{}", join(c)).map_err(io_err)?
                        }
                        PositiveRoot::ClassicalMinus(c) => {
                            writeln!(out, "minus,{}", join(c)).map_err(io_err)?
                        }
                        PositiveRoot::Imaginary { m, node } => {
                            writeln!(out, "imaginary,{m},{node}").map_err(io_err)?
                        }
                    }
                }
            } else {
                let mut plus = Vec::new();
                let mut minus = Vec::new();
                let mut imag = Vec::new();
                for r in roots {
                    match r {
                        PositiveRoot::ClassicalPlus(c) => plus.push(c),
                        PositiveRoot::ClassicalMinus(c) => minus.push(c),
                        PositiveRoot::Imaginary { m, node } => imag.push((m, node)),
                    }
                }
                emit(
                    out,
                    &serde_json::json!({
                        "classical_plus": plus,
                        "classical_minus": minus,
                        "imaginary": imag,
                    }),
                )
                .map_err(io_err)?;
            }
        }
        Command::Weyl { typ, betas, word, orbit } => {
            let datum = datum_for(&typ)?;
            let h = omega_word(&datum)?;
            if let Some(range) = betas {
                let (lo, hi) = range
                    .split_once("..")
                    .ok_or_else(|| Error::parse("beta range must be lo..hi"))?;
                let lo: i64 = lo.parse().map_err(|_| Error::parse("bad range start"))?;
                let hi: i64 = hi.parse().map_err(|_| Error::parse("bad range end"))?;
                let rows: Vec<serde_json::Value> = (lo..=hi)
                    .map(|k| serde_json::json!({"k": k, "letter": h.letter(k), "root": h.beta(k).coords}))
                    .collect();
                emit(out, &serde_json::Value::Array(rows)).map_err(io_err)?;
            } else if let Some(word) = word {
                let letters: Vec<usize> = word
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| Error::parse("bad letter")))
                    .collect::<Result<_>>()?;
                if letters.iter().any(|&l| l > datum.rank) {
                    return Err(Error::domain("letter out of node range"));
                }
                let elt = ExtendedWeylElement::from_word(&datum, &letters);
                let dec = elt.translation_decompose();
                emit(
                    out,
                    &serde_json::json!({
                        "length": elt.length(),
                        "xi": dec.xi,
                        "wbar_word": dec.wbar_word,
                        "tau": dec.tau.images,
                    }),
                )
                .map_err(io_err)?;
            } else if let Some(node) = orbit {
                if !(1..=datum.rank).contains(&node) {
                    return Err(Error::domain("orbit node out of range"));
                }
                let w = crate::rootdata::Weight::level_zero_fundamental(&datum, node);
                let orbit = classical_orbit(&datum, &datum.cl_project(&w));
                let rows: Vec<Vec<String>> = orbit
                    .iter()
                    .map(|x| x.coords.iter().map(|c| c.to_string()).collect())
                    .collect();
                emit(out, &serde_json::json!({"node": node, "size": rows.len(), "orbit": rows}))
                    .map_err(io_err)?;
            } else {
                emit(
                    out,
                    &serde_json::json!({
                        "window": h.window,
                        "period": h.period(),
                        "tau": h.tau.images,
                    }),
                )
                .map_err(io_err)?;
            }
        }
        Command::Pbw { typ, weight, frame } => {
            let datum = datum_for(&typ)?;
            let engine = UPlus::new(&datum)?;
            let nu = parse_weight(&datum, &weight)?;
            let indices = engine.enumerate_pbw_indices(&nu, frame);
            let mut rows = Vec::new();
            let mut any_infeasible = false;
            for c in &indices {
                let entry = match engine.pbw_element(c, frame) {
                    Ok(el) => serde_json::json!({
                        "index": c.describe(),
                        "element": el.to_json(),
                    }),
                    Err(e) => {
                        any_infeasible = true;
                        serde_json::json!({
                            "index": c.describe(),
                            "infeasible": e.to_string(),
                        })
                    }
                };
                rows.push(entry);
            }
            emit(out, &serde_json::Value::Array(rows)).map_err(io_err)?;
            if any_infeasible {
                return Err(Error::infeasible("some PBW indices are not computable in this frame"));
            }
        }
        Command::Form { typ, x, y } => {
            let datum = datum_for(&typ)?;
            let engine = UPlus::new(&datum)?;
            let xe = parse_element(&x)?;
            let ye = parse_element(&y)?;
            for el in [&xe, &ye] {
                if let Some(bad) = crate::uplus::letters_used(el).into_iter().find(|&l| l as usize > datum.rank) {
                    return Err(Error::domain(format!("generator E{bad} out of node range")));
                }
            }
            let v = engine.form(&xe, &ye);
            emit(out, &serde_json::json!({ "value": v.to_string() })).map_err(io_err)?;
        }
        Command::Canonical { typ, weight, frame } => {
            let datum = datum_for(&typ)?;
            let engine = UPlus::new(&datum)?;
            let nu = parse_weight(&datum, &weight)?;
            let cb = engine.canonical_basis_at_weight(&nu, frame)?;
            let rows: Vec<serde_json::Value> = cb
                .iter()
                .map(|(c, el, coeffs)| {
                    let cmap: std::collections::BTreeMap<String, String> =
                        coeffs.iter().map(|(k, v)| (k.describe(), v.to_string())).collect();
                    serde_json::json!({
                        "index": c.describe(),
                        "pbw_coefficients": cmap,
                        "element": el.to_json(),
                    })
                })
                .collect();
            emit(out, &serde_json::Value::Array(rows)).map_err(io_err)?;
        }
        Command::Crystal { typ, lambda, dot, check_node } => {
            let datum = datum_for(&typ)?;
            if let Some(node) = check_node {
                let report = simple_crystal_check(&datum, node)?;
                emit(out, &serde_json::to_value(&report).expect("serializable")).map_err(io_err)?;
                return Ok(());
            }
            let lambda = parse_lambda(&datum, &lambda)?;
            let crystal = TensorCrystal::build(&datum, &lambda)?;
            if dot {
                write!(out, "{}", crystal.to_dot()).map_err(io_err)?;
            } else {
                emit(out, &crystal.to_json()).map_err(io_err)?;
            }
        }
        Command::Cells { typ, lambda, trunc_boxes, trunc_det } => {
            let datum = datum_for(&typ)?;
            let lambda = parse_lambda(&datum, &lambda)?;
            let ctx = CellContext::new(&datum, &lambda)?;
            let boxes = trunc_from_env(trunc_boxes, "QA_TRUNC_BOXES", 3);
            let det = trunc_det_from_env(trunc_det);
            let partition = ctx.cell_partition(boxes, det)?;
            emit(out, &serde_json::to_value(&partition).expect("serializable")).map_err(io_err)?;
        }
        Command::Jring { typ, lambda, trunc_boxes, trunc_det, csv } => {
            let datum = datum_for(&typ)?;
            let lambda = parse_lambda(&datum, &lambda)?;
            let ctx = CellContext::new(&datum, &lambda)?;
            let boxes = trunc_from_env(trunc_boxes, "QA_TRUNC_BOXES", 3);
            let det = trunc_det_from_env(trunc_det);
            let triples = ctx.truncated_triples(boxes, det);
            if csv {
                writeln!(out, "left,right,result,coeff").map_err(io_err)?;
                for x in &triples {
                    for y in &triples {
                        let p = ctx.j_multiply_basis(x, y)?;
                        for (t, c) in &p.terms {
                            writeln!(out, "\"{x}\",\"{y}\",\"{t}\",{c}").map_err(io_err)?;
                        }
                    }
                }
            } else {
                let mut rows = Vec::new();
                for x in &triples {
                    for y in &triples {
                        let p = ctx.j_multiply_basis(x, y)?;
                        if p.is_zero() {
                            continue;
                        }
                        let terms: Vec<serde_json::Value> = p
                            .terms
                            .iter()
                            .map(|(t, c)| serde_json::json!({"triple": t.to_string(), "coeff": c}))
                            .collect();
                        rows.push(serde_json::json!({
                            "left": x.to_string(),
                            "right": y.to_string(),
                            "product": terms,
                        }));
                    }
                }
                emit(out, &serde_json::Value::Array(rows)).map_err(io_err)?;
            }
        }
        Command::Afn { typ, lambda } => {
            let datum = datum_for(&typ)?;
            let lambda = parse_lambda(&datum, &lambda)?;
            let ctx = CellContext::new(&datum, &lambda)?;
            let gl = ctx.gl_sizes();
            let rows: Vec<serde_json::Value> = (0..ctx.basis_size())
                .map(|b_prime| {
                    let t = crate::cells::CellTriple {
                        b: 0,
                        s: crate::symfun::GProdRep::trivial(&gl),
                        b_prime,
                    };
                    let w = ctx.crystal.weight(&ctx.crystal.elements[b_prime]);
                    serde_json::json!({
                        "b_prime": b_prime,
                        "element": ctx.crystal.elements[b_prime].to_string(),
                        "weight": w.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "a": ctx.a_function(&t).to_string(),
                    })
                })
                .collect();
            emit(out, &serde_json::Value::Array(rows)).map_err(io_err)?;
        }
        Command::Dcount { typ, lambda } => {
            let datum = datum_for(&typ)?;
            let lambda = parse_lambda(&datum, &lambda)?;
            let ctx = CellContext::new(&datum, &lambda)?;
            emit(out, &serde_json::json!(ctx.d_count())).map_err(io_err)?;
        }
    }
    Ok(())
}

fn join(v: &[i64]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

fn io_err(e: std::io::Error) -> Error {
    Error::domain(format!("io error: {e}"))
}

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version on stdout with success.
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_cli(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("qa").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn rootdata_json() {
        let (code, out, _) = run_cli(&["rootdata", "--type", "A1~1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["cartan"], serde_json::json!(["2", "-2", "-2", "2"]));
        assert_eq!(v["d"], "1");
    }

    #[test]
    fn dcount_value() {
        let (code, out, _) = run_cli(&["dcount", "--type", "A2~1", "--lambda", "1,1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "9");
    }

    #[test]
    fn form_value() {
        let (code, out, _) = run_cli(&["form", "--type", "A1~1", "--x", "E0*E1", "--y", "E0*E1"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["value"], "(q^4)/(q^4 - 2*q^2 + 1)");
    }

    #[test]
    fn bad_type_is_domain_error() {
        let (code, _, err) = run_cli(&["rootdata", "--type", "Z9~1"]);
        assert_eq!(code, 2);
        assert!(err.contains("error"));
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, _) = run_cli(&["rootdata", "--nope"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn inconclusive_cells_exit_code() {
        let (code, _, err) =
            run_cli(&["cells", "--type", "A1~1", "--lambda", "1", "--trunc-boxes", "0", "--trunc-det", "0"]);
        assert_eq!(code, 3, "{err}");
    }

    #[test]
    fn crystal_dot_and_json() {
        let (code, out, _) = run_cli(&["crystal", "--type", "A2~1", "--lambda", "1,0", "--dot"]);
        assert_eq!(code, 0);
        assert!(out.contains("digraph crystal"));
        let (code, out, _) = run_cli(&["crystal", "--type", "A2~1", "--lambda", "1,0"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["size"], 3);
    }

    #[test]
    fn json_reparses_into_module_types() {
        // Round-trip: the emitted JSON re-parses and matches the module data.
        let (_, out, _) = run_cli(&["roots", "--type", "A1~1", "--cutoff", "1"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let plus: Vec<Vec<i64>> = serde_json::from_value(v["classical_plus"].clone()).unwrap();
        assert!(plus.contains(&vec![0, 1]));
    }
}
