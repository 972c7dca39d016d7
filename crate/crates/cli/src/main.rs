use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use slink::geometry::{
    self, closure_b, commuting_square, gauss_linking, kappa_sample, realize, verify_conditions,
    Conditions, GeomStringLink, GeometryExport, RealizeParams,
};
use slink::operad::{act_on_links, Intervals};
use slink::par::Execution;
use slink::report::InvariantReport;
use slink::stringlink::StringLink;
use slink::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "slink",
    version,
    about = "Link-homotopy invariants of string links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Fixed reduction order, so parallel runs are bit-reproducible.
    #[arg(long, global = true)]
    deterministic: bool,

    /// Grid resolution for sampled maps.
    #[arg(long, global = true, default_value_t = geometry::DEFAULT_RESOLUTION)]
    resolution: usize,

    /// Write geometry to this file.
    #[arg(long, global = true)]
    export: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

/// Braid arguments are literal text, `-` for stdin, or `@path`.
#[derive(Subcommand)]
enum Command {
    /// Full invariant report.
    Invariants {
        braid: String,
        /// Multi-index to tabulate, e.g. `1,2,3`; repeatable.
        #[arg(long = "mu")]
        mu: Vec<String>,
    },
    /// Decide link-homotopy equality.
    Equal { a: String, b: String },
    /// Delete strand `i`.
    Delete { braid: String, i: usize },
    /// Is the link Borromean (every strand deletion trivial)?
    Borromean { braid: String },
    /// Coordinates of a Borromean link.
    Coords { braid: String },
    /// Stack `a` on top of `b`.
    Stack { a: String, b: String },
    /// Mirror inverse.
    Invert { braid: String },
    /// Realize geometrically.
    Realize { braid: String },
    /// Close up a realization by bending the cylinder into a solid torus.
    Closure { braid: String },
    /// Gauss linking number of two closed components.
    Lk { braid: String, i: usize, j: usize },
    /// Check the endpoint, support and periodicity conditions of the sampled map.
    VerifyMap { braid: String },
    /// Apply a family of intervals to string links (braid text or geometry files).
    OperadAct {
        intervals: String,
        inputs: Vec<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Syntax { .. } | Error::MalformedWord { .. } | Error::InvalidIntervals(_) => 2,
            Error::NotPureBraid { .. } => 3,
            Error::StrandMismatch { .. }
            | Error::RankMismatch { .. }
            | Error::BasepointMismatch => 4,
            _ => 6,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 6,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_arg(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        Ok(fs::read_to_string(path)?)
    } else {
        Ok(arg.to_string())
    }
}

fn link(arg: &str) -> Result<StringLink, Failure> {
    Ok(read_arg(arg)?.trim().parse::<StringLink>()?)
}

fn parse_multi_index(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure {
            code: 2,
            message: format!("bad multi-index '{s}'"),
        })
}

struct Ctx {
    format: Format,
    exec: Execution,
    resolution: usize,
    export: Option<PathBuf>,
}

impl Ctx {
    fn emit(&self, text: impl FnOnce() -> String, structured: Value) {
        match self.format {
            Format::Text => print!("{}", text()),
            Format::Structured => {
                let mut doc = structured;
                if let Value::Object(m) = &mut doc {
                    m.entry("schema_version").or_insert(json!(SCHEMA_VERSION));
                }
                println!(
                    "{}",
                    serde_json::to_string_pretty(&doc).expect("serializable")
                );
            }
        }
    }

    fn export_geometry(&self, g: &GeometryExport) -> Result<(), Failure> {
        if let Some(path) = &self.export {
            let body = match self.format {
                Format::Text => g.to_text(),
                Format::Structured => serde_json::to_string_pretty(g).expect("serializable"),
            };
            fs::write(path, body)?;
        }
        Ok(())
    }
}

fn link_text(s: &StringLink) -> String {
    format!("{s}\n")
}

fn link_doc(kind: &str, s: &StringLink) -> Value {
    json!({ "kind": kind, "n": s.n(), "braid": s.to_string() })
}

/// A string link operand: braid text is realized; anything else names a
/// geometry export file (text or structured).
fn geometric_operand(arg: &str) -> Result<GeomStringLink, Failure> {
    let text = read_arg(arg)?;
    let trimmed = text.trim_start();
    if trimmed.starts_with("n=") {
        let s: StringLink = trimmed.trim().parse()?;
        return Ok(realize(&s, &RealizeParams::default())?);
    }
    let body = if Path::new(arg).is_file() {
        fs::read_to_string(arg)?
    } else {
        text
    };
    let export = if body.trim_start().starts_with('{') {
        serde_json::from_str::<GeometryExport>(&body).map_err(|e| Failure {
            code: 2,
            message: e.to_string(),
        })?
    } else {
        GeometryExport::from_text(&body)?
    };
    Ok(export.to_string_link()?)
}

fn run(cli: Cli) -> CmdResult {
    let ctx = Ctx {
        format: cli.format,
        exec: if cli.deterministic {
            Execution::Deterministic
        } else {
            Execution::Parallel
        },
        resolution: cli.resolution,
        export: cli.export,
    };
    match cli.command {
        Command::Invariants { braid, mu } => {
            let s = link(&braid)?;
            let sel = mu
                .iter()
                .map(|m| parse_multi_index(m))
                .collect::<Result<Vec<_>, _>>()?;
            let report = InvariantReport::build(&s, (!sel.is_empty()).then_some(sel.as_slice()))?;
            let doc = serde_json::to_value(&report).expect("serializable");
            ctx.emit(|| report.to_text(), doc);
            Ok(0)
        }
        Command::Equal { a, b } => {
            let (a, b) = (link(&a)?, link(&b)?);
            if a.n() != b.n() {
                return Err(Error::StrandMismatch {
                    left: a.n(),
                    right: b.n(),
                }
                .into());
            }
            let witness = a.invariants()?.first_difference(&b.invariants()?);
            match witness {
                None => {
                    ctx.emit(|| "equal\n".into(), json!({ "verdict": "equal" }));
                    Ok(0)
                }
                Some(w) => {
                    ctx.emit(
                        || format!("distinct\nwitness: {w}\n"),
                        json!({
                            "verdict": "distinct",
                            "witness": {
                                "indices": w.indices,
                                "left": w.left.to_string(),
                                "right": w.right.to_string(),
                            }
                        }),
                    );
                    Ok(1)
                }
            }
        }
        Command::Delete { braid, i } => {
            let d = link(&braid)?.delta_i(i)?;
            ctx.emit(|| link_text(&d), link_doc("string_link", &d));
            Ok(0)
        }
        Command::Borromean { braid } => {
            let s = link(&braid)?;
            let b = s.is_borromean()?;
            let coords: Option<Vec<String>> = if b {
                Some(
                    s.borromean_coordinates()?
                        .iter()
                        .map(|c| c.to_string())
                        .collect(),
                )
            } else {
                None
            };
            ctx.emit(
                || match &coords {
                    Some(c) => format!("true\ncoordinates: [{}]\n", c.join(", ")),
                    None => "false\n".into(),
                },
                json!({ "borromean": b, "coordinates": coords }),
            );
            Ok(0)
        }
        Command::Coords { braid } => {
            let c: Vec<String> = link(&braid)?
                .borromean_coordinates()?
                .iter()
                .map(|c| c.to_string())
                .collect();
            ctx.emit(
                || format!("[{}]\n", c.join(", ")),
                json!({ "coordinates": c }),
            );
            Ok(0)
        }
        Command::Stack { a, b } => {
            let s = link(&a)?.stack(&link(&b)?)?;
            ctx.emit(|| link_text(&s), link_doc("string_link", &s));
            Ok(0)
        }
        Command::Invert { braid } => {
            let s = link(&braid)?.inverse();
            ctx.emit(|| link_text(&s), link_doc("string_link", &s));
            Ok(0)
        }
        Command::Realize { braid } => {
            let s = link(&braid)?;
            let params = RealizeParams {
                align_resolution: Some(ctx.resolution),
                ..RealizeParams::default()
            };
            let g = realize(&s, &params)?;
            let export = GeometryExport::from_string_link(&g);
            ctx.export_geometry(&export)?;
            let sep = g.min_separation();
            ctx.emit(
                || {
                    format!(
                        "strands: {}\nvertices per strand: {}\nmin separation: {sep:.6}\n",
                        g.n(),
                        g.times().len()
                    )
                },
                json!({ "n": g.n(), "vertices": g.times().len(), "min_separation": sep }),
            );
            Ok(0)
        }
        Command::Closure { braid } => {
            let g = realize(&link(&braid)?, &RealizeParams::default())?;
            let closed = closure_b(&g, geometry::DEFAULT_RADIUS)?;
            ctx.export_geometry(&GeometryExport::from_closed_link(&closed))?;
            let d = closed.min_pairwise_distance();
            ctx.emit(
                || {
                    format!(
                        "components: {}\nmin pairwise distance: {d:.6}\n",
                        closed.n()
                    )
                },
                json!({ "n": closed.n(), "min_pairwise_distance": d }),
            );
            Ok(0)
        }
        Command::Lk { braid, i, j } => {
            let s = link(&braid)?;
            let expected = s.rep().crossing_linking(i, j)?;
            let g = realize(&s, &RealizeParams::default())?;
            let lk = gauss_linking(&closure_b(&g, geometry::DEFAULT_RADIUS)?, i, j, ctx.exec)?;
            let agree = lk.rounded == expected && (lk.value - expected as f64).abs() <= 0.05;
            ctx.emit(
                || {
                    let mut t = format!("lk({i},{j}) = {:.6} (rounded {})\n", lk.value, lk.rounded);
                    if !agree {
                        t.push_str(&format!("disagrees with crossing count {expected}\n"));
                    }
                    t
                },
                json!({
                    "i": i, "j": j, "value": lk.value, "rounded": lk.rounded,
                    "crossing_linking": expected, "agree": agree,
                    "min_distance": lk.min_distance, "ill_conditioned": lk.ill_conditioned,
                }),
            );
            Ok(if agree { 0 } else { 5 })
        }
        Command::VerifyMap { braid } => {
            let s = link(&braid)?;
            let r = ctx.resolution;
            let params = RealizeParams {
                align_resolution: Some(r),
                ..RealizeParams::default()
            };
            let g = realize(&s, &params)?;
            let f = kappa_sample(&g, r, ctx.exec)?;
            let report = verify_conditions(&f, Conditions::ALL, ctx.exec);
            let square = report
                .passes()
                .then(|| commuting_square(&g, r, geometry::DEFAULT_RADIUS, ctx.exec))
                .transpose()?;
            let doc = json!({ "resolution": r, "conditions": report, "commuting_square": square });
            ctx.emit(
                || {
                    let mut t = format!(
                        "points checked: {}\nviolations: {}\n",
                        report.points_checked,
                        report.violations.len()
                    );
                    for v in report.violations.iter().take(20) {
                        t.push_str(&format!(
                            "  {:?} at {:?}, component {}\n",
                            v.condition, v.grid, v.component
                        ));
                    }
                    if let Some(sq) = &square {
                        t.push_str(&format!(
                            "commuting square: {} compared, max deviation {:e}\n",
                            sq.compared, sq.max_deviation
                        ));
                    }
                    t
                },
                doc,
            );
            Ok(if report.passes() { 0 } else { 1 })
        }
        Command::OperadAct { intervals, inputs } => {
            let ivs: Intervals = read_arg(&intervals)?.trim().parse()?;
            let links = inputs
                .iter()
                .map(|a| geometric_operand(a))
                .collect::<Result<Vec<_>, _>>()?;
            let out = act_on_links(&ivs, &links)?;
            let export = GeometryExport::from_string_link(&out);
            ctx.export_geometry(&export)?;
            let braid = out.read_braid()?;
            ctx.emit(
                || format!("{braid}\n"),
                json!({ "braid": braid.to_string(), "geometry": export }),
            );
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
