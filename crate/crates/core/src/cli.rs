//! Command-line front end. Exit codes: 0 success, 1 validation failure,
//! 2 parse or usage error, 3 unsupported shape (valence above 3, or a
//! family-specific mode on a graph outside the family).

use std::io::Write;

use serde::Serialize;

use crate::cf::{
    boundary_gluing_matrix, canonical_ncfs, chain_gluing_matrix, count_solid_torus,
    count_toric_annulus, leg_gluing_matrix, ncf_eval, ncf_expand, transform_slope,
    verify_chain_identity, Fraction, GluingMatrix, Ncf,
};
use crate::emit;
use crate::graph::is_two_connected;
use crate::graph::{decompose, torus_classes, validate, PlumbingGraph, ViolationKind};
use crate::stein::{
    assemble, enumerate_stein, legendrianize, lower_bound, DiagramError, HandlebodyDiagram,
    LegendrianDiagram,
};
use crate::torsion::{detect_family_y, mintwist_upper_bound, torsion_upper_bound};
use crate::wrap::{wrap, WrapError};

const USAGE: &str = "\
usage: plumbstein <command> [args]

commands:
  validate <file>                       check a plumbing graph file
  tori <file>                           list incompressible-torus classes
  decompose <file> [--format json|dot]  clusters, trees, connectors
  wrap <file> [--format json|dot|svg]   wrapped-up forms of the clusters
  stein <file> [--enumerate] [--format json|svg]
                                        handlebody/Stein diagram data
  count <file> --mode lower|mintwist|torsion [--m <int>]
                                        contact structure counts and bounds
  cf expand <p/q>                       negative continued fraction of p/q
  cf eval <a1,a2,...>                   evaluate a coefficient list
  cf transform --matrix a,b,c,d --slope <p/q>
                                        apply a gluing matrix to a slope
  cf chain|boundary|leg <a1,a2,...>     gluing matrices of an expansion
  cf count-torus|count-annulus <a1,..>  tight structure counts
  cf verify-chain <a1,...>              check the chain slope identity
  cf verify-chain --all [--max-len N] [--max-coeff M]
                                        identity report over a census

options:
  --output <path>   write the result to a file instead of stdout

exit codes: 0 ok, 1 validation failure, 2 parse/usage error, 3 unsupported shape
";

struct Parsed {
    positional: Vec<String>,
    format: String,
    output: Option<String>,
    enumerate: bool,
    mode: Option<String>,
    m: u64,
    matrix: Option<String>,
    slope: Option<String>,
    all: bool,
    max_len: usize,
    max_coeff: i64,
}

fn parse_args(args: &[String]) -> Result<Parsed, String> {
    let mut p = Parsed {
        positional: Vec::new(),
        format: "json".into(),
        output: None,
        enumerate: false,
        mode: None,
        m: 1,
        matrix: None,
        slope: None,
        all: false,
        max_len: 4,
        max_coeff: 5,
    };
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let mut take = |name: &str| -> Result<String, String> {
            it.next()
                .cloned()
                .ok_or_else(|| format!("{name} expects a value"))
        };
        match a.as_str() {
            "--format" => p.format = take("--format")?,
            "--output" => p.output = Some(take("--output")?),
            "--enumerate" => p.enumerate = true,
            "--mode" => p.mode = Some(take("--mode")?),
            "--m" => {
                p.m = take("--m")?
                    .parse()
                    .map_err(|_| "--m expects a positive integer".to_string())?
            }
            "--matrix" => p.matrix = Some(take("--matrix")?),
            "--slope" => p.slope = Some(take("--slope")?),
            "--all" => p.all = true,
            "--max-len" => {
                p.max_len = take("--max-len")?
                    .parse()
                    .map_err(|_| "--max-len expects an integer".to_string())?
            }
            "--max-coeff" => {
                p.max_coeff = take("--max-coeff")?
                    .parse()
                    .map_err(|_| "--max-coeff expects an integer".to_string())?
            }
            other if other.starts_with("--") => return Err(format!("unknown flag `{other}`")),
            other => p.positional.push(other.to_string()),
        }
    }
    Ok(p)
}

fn emit_out(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write, text: &str) -> i32 {
    match &p.output {
        None => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "cannot write `{path}`: {e}");
                2
            }
        },
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn load_graph(path: &str, err: &mut dyn Write) -> Result<PlumbingGraph, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(err, "cannot read `{path}`: {e}");
        2
    })?;
    PlumbingGraph::parse(&text).map_err(|e| {
        let _ = writeln!(err, "{path}: {e}");
        2
    })
}

/// Exit code for a failed validation: valence violations are an unsupported
/// shape (3), every other failure is a plain validation error (1).
fn validation_exit(g: &PlumbingGraph, err: &mut dyn Write) -> Option<i32> {
    let report = validate(g);
    if report.ok {
        return None;
    }
    for v in &report.violations {
        let _ = writeln!(
            err,
            "validation: {:?} at {}",
            v.kind,
            v.vertex.as_deref().unwrap_or("<graph>")
        );
    }
    Some(if report.has(ViolationKind::ValenceExceeded) {
        3
    } else {
        1
    })
}

fn parse_ncf_arg(text: &str, err: &mut dyn Write) -> Result<Ncf, i32> {
    text.parse::<Ncf>().map_err(|e| {
        let _ = writeln!(err, "{e}");
        2
    })
}

fn coeff_list(c: &Ncf) -> String {
    c.coefficients()
        .iter()
        .map(|a| a.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Runs one invocation; output goes to `out` (or `--output`), diagnostics
/// to `err`. Returns the process exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let Some(command) = args.first().map(String::as_str) else {
        let _ = err.write_all(USAGE.as_bytes());
        return 2;
    };
    let parsed = match parse_args(&args[1..]) {
        Ok(p) => p,
        Err(msg) => {
            let _ = writeln!(err, "{msg}");
            return 2;
        }
    };
    match command {
        "validate" => cmd_validate(&parsed, out, err),
        "tori" => cmd_tori(&parsed, out, err),
        "decompose" => cmd_decompose(&parsed, out, err),
        "wrap" => cmd_wrap(&parsed, out, err),
        "stein" => cmd_stein(&parsed, out, err),
        "count" => cmd_count(&parsed, out, err),
        "cf" => cmd_cf(&parsed, out, err),
        "help" | "--help" | "-h" => {
            let _ = out.write_all(USAGE.as_bytes());
            0
        }
        other => {
            let _ = writeln!(err, "unknown command `{other}`");
            let _ = err.write_all(USAGE.as_bytes());
            2
        }
    }
}

fn one_file<'a>(p: &'a Parsed, err: &mut dyn Write) -> Result<&'a str, i32> {
    match p.positional.as_slice() {
        [path] => Ok(path),
        _ => {
            let _ = writeln!(err, "expected exactly one input file");
            Err(2)
        }
    }
}

fn cmd_validate(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = match one_file(p, err) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let g = match load_graph(path, err) {
        Ok(g) => g,
        Err(c) => return c,
    };
    let report = validate(&g);
    let code = emit_out(p, out, err, &json(&report));
    if code != 0 {
        return code;
    }
    if report.ok {
        0
    } else if report.has(ViolationKind::ValenceExceeded) {
        3
    } else {
        1
    }
}

fn cmd_tori(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = match one_file(p, err) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let g = match load_graph(path, err) {
        Ok(g) => g,
        Err(c) => return c,
    };
    if let Some(code) = validation_exit(&g, err) {
        return code;
    }
    let classes = torus_classes(&g).expect("validated");
    #[derive(Serialize)]
    struct Tori<'a> {
        count: usize,
        classes: &'a [crate::graph::TorusClass],
    }
    emit_out(
        p,
        out,
        err,
        &json(&Tori {
            count: classes.len(),
            classes: &classes,
        }),
    )
}

fn cmd_decompose(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = match one_file(p, err) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let g = match load_graph(path, err) {
        Ok(g) => g,
        Err(c) => return c,
    };
    if let Some(code) = validation_exit(&g, err) {
        return code;
    }
    let d = decompose(&g).expect("validated");
    let text = match p.format.as_str() {
        "json" => json(&d),
        "dot" => emit::dot_decomposition(&g, &d),
        other => {
            let _ = writeln!(err, "decompose supports --format json|dot, not `{other}`");
            return 2;
        }
    };
    emit_out(p, out, err, &text)
}

fn cmd_wrap(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = match one_file(p, err) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let g = match load_graph(path, err) {
        Ok(g) => g,
        Err(c) => return c,
    };
    if let Some(code) = validation_exit(&g, err) {
        return code;
    }
    let d = decompose(&g).expect("validated");
    let clusters = crate::graph::cluster_graphs(&g, &d);
    let mut wrapped = Vec::new();
    for cluster in &clusters {
        match wrap(cluster) {
            Ok(w) => wrapped.push(w),
            Err(WrapError::NonPlanar(cert)) => {
                let _ = writeln!(err, "nonplanar cluster: K3,3 subdivision found");
                let _ = writeln!(err, "{}", json(&cert));
                return 3;
            }
            Err(e) => {
                let _ = writeln!(err, "{e}");
                return 3;
            }
        }
    }
    match p.format.as_str() {
        "json" => {
            #[derive(Serialize)]
            struct Wrapped<'a> {
                clusters: &'a [crate::wrap::WrappedForm],
            }
            emit_out(p, out, err, &json(&Wrapped { clusters: &wrapped }))
        }
        "dot" | "svg" => {
            if wrapped.len() != 1 || !is_two_connected(&g) {
                let _ = writeln!(
                    err,
                    "dot/svg rendering of wrap needs a single 2-connected graph; use --format json"
                );
                return 2;
            }
            let text = if p.format == "dot" {
                emit::dot_wrapped(&wrapped[0])
            } else {
                emit::svg_wrapped(&wrapped[0])
            };
            emit_out(p, out, err, &text)
        }
        other => {
            let _ = writeln!(err, "wrap supports --format json|dot|svg, not `{other}`");
            2
        }
    }
}

#[derive(Serialize)]
struct SteinOutput {
    /// Number of Stein structures (decimal).
    count: String,
    /// Canonical Legendrian diagram: the lexicographically first rotation
    /// vector. Absent when some vertex has weight -1.
    diagram: Option<LegendrianDiagram>,
    /// The diagram before stabilization (all unknots at tb = -1).
    smooth: HandlebodyDiagram,
    #[serde(skip_serializing_if = "Option::is_none")]
    enumeration: Option<crate::stein::SteinEnumeration>,
}

fn cmd_stein(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = match one_file(p, err) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let g = match load_graph(path, err) {
        Ok(g) => g,
        Err(c) => return c,
    };
    if let Some(code) = validation_exit(&g, err) {
        return code;
    }
    let d = decompose(&g).expect("validated");
    let h = match assemble(&g, &d) {
        Ok(h) => h,
        Err(DiagramError::UnsupportedNonplanar(cert)) => {
            let _ = writeln!(err, "nonplanar cluster beyond K3,3 is unsupported");
            let _ = writeln!(err, "{}", json(&cert));
            return 3;
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return 3;
        }
    };
    // canonical stabilization: every unknot takes all its stabilizations on
    // the positive side, the lexicographically first rotation vector
    let choices: Vec<(u32, u32)> = h
        .two_handles
        .iter()
        .map(|t| (0u32, (-t.framing - 2).max(0) as u32))
        .collect();
    let diagram = if h.two_handles.iter().any(|t| -t.framing - 2 < 0) {
        None
    } else {
        Some(legendrianize(&h, &choices).expect("budgets match"))
    };
    let output = SteinOutput {
        count: lower_bound(&g).expect("validated").to_string(),
        diagram,
        enumeration: p.enumerate.then(|| enumerate_stein(&h)),
        smooth: h,
    };
    match p.format.as_str() {
        "json" => emit_out(p, out, err, &json(&output)),
        "svg" => emit_out(p, out, err, &emit::svg_diagram(&output.smooth)),
        other => {
            let _ = writeln!(err, "stein supports --format json|svg, not `{other}`");
            2
        }
    }
}

fn cmd_count(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let path = match one_file(p, err) {
        Ok(p) => p,
        Err(c) => return c,
    };
    let g = match load_graph(path, err) {
        Ok(g) => g,
        Err(c) => return c,
    };
    if let Some(code) = validation_exit(&g, err) {
        return code;
    }
    let mode = p.mode.as_deref().unwrap_or("lower");
    let value = match mode {
        "lower" => lower_bound(&g).expect("validated"),
        "mintwist" | "torsion" => {
            let y = match detect_family_y(&g) {
                Ok(y) => y,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return 3;
                }
            };
            if mode == "mintwist" {
                mintwist_upper_bound(&y)
            } else {
                match torsion_upper_bound(&y, p.m) {
                    Ok(v) => v,
                    Err(e) => {
                        let _ = writeln!(err, "{e}");
                        return 2;
                    }
                }
            }
        }
        other => {
            let _ = writeln!(err, "--mode must be lower|mintwist|torsion, not `{other}`");
            return 2;
        }
    };
    emit_out(p, out, err, &format!("{value}\n"))
}

fn matrix_from_flag(text: &str) -> Result<GluingMatrix, String> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| format!("bad matrix entry `{t}`"))
        })
        .collect::<Result<_, _>>()?;
    if parts.len() != 4 {
        return Err("--matrix expects m11,m12,m21,m22".into());
    }
    let det = parts[0] * parts[3] - parts[1] * parts[2];
    if det != 1 && det != -1 {
        return Err("matrix must have determinant +1 or -1".into());
    }
    Ok(GluingMatrix::from_i64([
        [parts[0], parts[1]],
        [parts[2], parts[3]],
    ]))
}

fn cmd_cf(p: &Parsed, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let sub = match p.positional.first().map(String::as_str) {
        Some(s) => s,
        None => {
            let _ = writeln!(err, "cf expects a subcommand");
            return 2;
        }
    };
    match sub {
        "expand" => {
            let Some(arg) = p.positional.get(1) else {
                let _ = writeln!(err, "cf expand expects a fraction p/q");
                return 2;
            };
            let f: Fraction = match arg.parse() {
                Ok(f) => f,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return 2;
                }
            };
            match ncf_expand(&f) {
                Ok(c) => emit_out(p, out, err, &format!("{}\n", coeff_list(&c))),
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    2
                }
            }
        }
        "eval" => {
            let Some(arg) = p.positional.get(1) else {
                let _ = writeln!(err, "cf eval expects a coefficient list a1,a2,...");
                return 2;
            };
            let c = match parse_ncf_arg(arg, err) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match ncf_eval(&c) {
                Ok(v) => emit_out(p, out, err, &format!("{v}\n")),
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    2
                }
            }
        }
        "transform" => {
            let (Some(mtext), Some(stext)) = (&p.matrix, &p.slope) else {
                let _ = writeln!(err, "cf transform expects --matrix and --slope");
                return 2;
            };
            let m = match matrix_from_flag(mtext) {
                Ok(m) => m,
                Err(msg) => {
                    let _ = writeln!(err, "{msg}");
                    return 2;
                }
            };
            let s: Fraction = match stext.parse() {
                Ok(s) => s,
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    return 2;
                }
            };
            emit_out(p, out, err, &format!("{}\n", transform_slope(&m, &s)))
        }
        "chain" | "boundary" | "leg" => {
            let Some(arg) = p.positional.get(1) else {
                let _ = writeln!(err, "cf {sub} expects a coefficient list");
                return 2;
            };
            let c = match parse_ncf_arg(arg, err) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let m = match sub {
                "chain" => chain_gluing_matrix(&c),
                "boundary" => boundary_gluing_matrix(&c),
                _ => leg_gluing_matrix(&c),
            };
            match m {
                Ok(m) => emit_out(p, out, err, &format!("{m}\n")),
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    2
                }
            }
        }
        "count-torus" | "count-annulus" => {
            let Some(arg) = p.positional.get(1) else {
                let _ = writeln!(err, "cf {sub} expects a coefficient list");
                return 2;
            };
            let c = match parse_ncf_arg(arg, err) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let n = if sub == "count-torus" {
                count_solid_torus(&c)
            } else {
                count_toric_annulus(&c)
            };
            match n {
                Ok(n) => emit_out(p, out, err, &format!("{n}\n")),
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    2
                }
            }
        }
        "verify-chain" => {
            let mut text = String::new();
            let chains: Vec<Ncf> = if p.all {
                canonical_ncfs(p.max_len, p.max_coeff)
            } else {
                let Some(arg) = p.positional.get(1) else {
                    let _ = writeln!(err, "cf verify-chain expects a coefficient list or --all");
                    return 2;
                };
                match parse_ncf_arg(arg, err) {
                    Ok(c) => vec![c],
                    Err(code) => return code,
                }
            };
            let mut last_form_holds = 0usize;
            let mut reversed_holds = 0usize;
            for c in &chains {
                let r = match verify_chain_identity(c) {
                    Ok(r) => r,
                    Err(e) => {
                        let _ = writeln!(err, "{e}");
                        return 2;
                    }
                };
                if r.equal {
                    last_form_holds += 1;
                }
                if r.reversed_rule_holds {
                    reversed_holds += 1;
                }
                let canonical = r
                    .left_canonical
                    .as_ref()
                    .map(|c| {
                        c.iter()
                            .map(|a| a.to_string())
                            .collect::<Vec<_>>()
                            .join(",")
                    })
                    .unwrap_or_else(|| "-".into());
                text.push_str(&format!(
                    "chain=[{}] left={} last-decremented={} equal={} reversed-decremented={} canonical=[{}]\n",
                    coeff_list(c),
                    r.left_side,
                    r.last_decremented_value,
                    r.equal,
                    r.reversed_decremented_value,
                    canonical,
                ));
            }
            text.push_str(&format!(
                "checked={} last-coefficient-form-holds={} reversed-form-holds={}\n",
                chains.len(),
                last_form_holds,
                reversed_holds
            ));
            text.push_str(
                "convention: (p-q)/(p'-q') = [an,...,a2,a1-1]; the reversed word \
                 with its trailing coefficient decremented\n",
            );
            emit_out(p, out, err, &text)
        }
        other => {
            let _ = writeln!(err, "unknown cf subcommand `{other}`");
            2
        }
    }
}
