//! `kk`: command-line front end for sumset arithmetic, critical trios, and
//! structure certificates over finite abelian groups.
//!
//! Exit codes: 0 success, 1 usage/domain error, 2 theorem violation or
//! certificate verification failure.

use clap::{Parser, Subcommand};
use kk_core::*;
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "kk", version, about = "Sumset arithmetic and Kemperman structure certificates")]
struct Cli {
    /// Group spec, e.g. Z6 or Z2xZ4
    #[arg(short = 'g', long, global = true)]
    group: Option<String>,

    /// Emit machine-readable JSON records instead of plain text
    #[arg(long, global = true)]
    json: bool,

    /// Seed for sampling modes
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute A + B
    Sumset { a: String, b: String },
    /// Stabilizer subgroup of a set
    Stab { a: String },
    /// Smallest coset r + H containing a set
    Closure { a: String },
    /// Pair deficiency |A|+|B|-|A+B|, or max subgroup deficiency of A alone
    Deficiency { a: String, b: Option<String> },
    /// Build the maximal trio (A, B, complement(-(A+B))) and report its stats
    Trio { a: String, b: String },
    /// Grow a trio to a maximal one; --all lists every saturation order result
    Saturate {
        trio: String,
        #[arg(long)]
        all: bool,
    },
    /// Match a trio against the four structure kinds; --all lists every tag
    Classify {
        trio: String,
        #[arg(long)]
        all: bool,
    },
    /// Decompose a maximal critical trio into a certificate document
    Decompose { trio: String },
    /// Verify a certificate file, or every .cert file in a directory
    Verify { path: PathBuf },
    /// Enumerate all nontrivial maximal critical trios of the group
    Enumerate {
        /// Keep one representative per similarity orbit
        #[arg(long)]
        dedup: bool,
    },
    /// Run a theorem checker (by label), or every checker with --all
    Check {
        theorem: Option<String>,
        #[arg(long)]
        all: bool,
    },
    /// Write the structure atlas table plus representative certificates
    Atlas {
        out: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_order: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn group_arg(cli: &Cli) -> Result<Group> {
    let spec = cli
        .group
        .as_deref()
        .ok_or_else(|| Error::InvalidGroupSpec("missing -g/--group".into()))?;
    Group::parse(spec)
}

/// Resolve a literal argument, reading `@path` indirection from disk.
fn literal(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        Ok(fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{path}: {e}")))?
            .trim()
            .to_string())
    } else {
        Ok(arg.to_string())
    }
}

fn set_arg(g: &Group, arg: &str) -> Result<GroupSet> {
    parse_set(g, &literal(arg)?)
}

fn trio_arg(g: &Group, arg: &str) -> Result<Trio> {
    parse_trio(g, &literal(arg)?)
}

fn indices(s: &GroupSet) -> Vec<usize> {
    s.iter().map(|e| e.index()).collect()
}

fn trio_json(t: &Trio) -> serde_json::Value {
    json!({
        "universe": t.universe().members.iter().map(|e| e.index()).collect::<Vec<_>>(),
        "a": indices(&t.a()),
        "b": indices(&t.b()),
        "c": indices(&t.c()),
    })
}

fn tag_json(tag: &StructureTag) -> serde_json::Value {
    json!({
        "kind": tag.kind.label(),
        "h": tag.h.members.iter().map(|e| e.index()).collect::<Vec<_>>(),
        "r": tag.r.map(|e| e.index()),
        "perm": tag.similarity.perm,
        "shift": [tag.similarity.shifts[0].index(), tag.similarity.shifts[1].index()],
    })
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Sumset { a, b } => {
            let g = group_arg(cli)?;
            let s = setops::sumset(&set_arg(&g, a)?, &set_arg(&g, b)?)?;
            if cli.json {
                println!("{}", json!({ "group": g.to_string(), "sumset": indices(&s) }));
            } else {
                println!("{s}");
            }
            Ok(0)
        }
        Cmd::Stab { a } => {
            let g = group_arg(cli)?;
            let h = setops::stabilizer(&set_arg(&g, a)?);
            if cli.json {
                println!(
                    "{}",
                    json!({ "group": g.to_string(), "stabilizer": indices(&GroupSet::from_mask(g.clone(), h.mask())?), "order": h.order() })
                );
            } else {
                println!("{}", h.members);
            }
            Ok(0)
        }
        Cmd::Closure { a } => {
            let g = group_arg(cli)?;
            let (h, r) = setops::closure_coset(&set_arg(&g, a)?)?;
            if cli.json {
                println!(
                    "{}",
                    json!({ "group": g.to_string(), "h": indices(&GroupSet::from_mask(g.clone(), h.mask())?), "rep": r.index() })
                );
            } else {
                println!("H={} rep={}", h.members, r);
            }
            Ok(0)
        }
        Cmd::Deficiency { a, b } => {
            let g = group_arg(cli)?;
            let a = set_arg(&g, a)?;
            match b {
                Some(b) => {
                    let d = setops::deficiency_pair(&a, &set_arg(&g, b)?)?;
                    if cli.json {
                        println!("{}", json!({ "group": g.to_string(), "deficiency": d }));
                    } else {
                        println!("{d}");
                    }
                }
                None => {
                    let (d, h) = setops::deficiency_set(&a)?;
                    if cli.json {
                        println!(
                            "{}",
                            json!({ "group": g.to_string(), "deficiency": d, "h": indices(&GroupSet::from_mask(g.clone(), h.mask())?) })
                        );
                    } else {
                        println!("delta={d} H={}", h.members);
                    }
                }
            }
            Ok(0)
        }
        Cmd::Trio { a, b } => {
            let g = group_arg(cli)?;
            let t = trio::make_trio(&set_arg(&g, a)?, &set_arg(&g, b)?)?;
            let d = trio::trio_deficiency(&t);
            if cli.json {
                let mut v = trio_json(&t);
                v["deficiency"] = json!(d);
                v["critical"] = json!(t.is_critical());
                v["maximal"] = json!(trio::is_maximal(&t));
                println!("{v}");
            } else {
                println!("{t}");
                println!(
                    "deficiency={d} critical={} maximal={}",
                    t.is_critical(),
                    trio::is_maximal(&t)
                );
            }
            Ok(0)
        }
        Cmd::Saturate { trio: lit, all } => {
            let g = group_arg(cli)?;
            let t = trio_arg(&g, lit)?;
            let results = if *all {
                trio::saturate_all(&t)
            } else {
                vec![trio::saturate(&t)]
            };
            for s in &results {
                if cli.json {
                    println!("{}", trio_json(s));
                } else {
                    println!("{s}");
                }
            }
            Ok(0)
        }
        Cmd::Classify { trio: lit, all } => {
            let g = group_arg(cli)?;
            let t = trio_arg(&g, lit)?;
            let tags = if *all {
                match_structures(&t)?
            } else {
                find_structure(&t, &ALL_KINDS).into_iter().collect()
            };
            if tags.is_empty() {
                if cli.json {
                    println!("{}", json!({ "tags": [] }));
                } else {
                    println!("no structure");
                }
                return Ok(0);
            }
            if cli.json {
                println!("{}", json!({ "tags": tags.iter().map(tag_json).collect::<Vec<_>>() }));
            } else {
                for tag in &tags {
                    println!("{tag}");
                }
            }
            Ok(0)
        }
        Cmd::Decompose { trio: lit } => {
            let g = group_arg(cli)?;
            let t = trio_arg(&g, lit)?;
            let cert = decompose(&t)?;
            let doc = CertificateDocument::new(cert);
            if cli.json {
                let steps: Vec<_> = doc
                    .certificate
                    .steps
                    .iter()
                    .map(|s| {
                        let mut v = trio_json(&s.trio);
                        v["tag"] = tag_json(&s.tag);
                        v
                    })
                    .collect();
                println!("{}", json!({ "group": g.to_string(), "steps": steps }));
            } else {
                print!("{}", certify::render_document(&doc));
            }
            Ok(0)
        }
        Cmd::Verify { path } => {
            if path.is_dir() {
                let summary = batch_verify(path)?;
                if cli.json {
                    println!(
                        "{}",
                        json!({ "ok": summary.ok, "failed": summary.failed, "unreadable": summary.unreadable })
                    );
                } else {
                    print!("{summary}");
                }
                Ok(if summary.all_ok() { 0 } else { 2 })
            } else {
                let text = fs::read_to_string(path).map_err(|e| Error::Io(e.to_string()))?;
                let doc = parse_certificate(&text)?;
                match verify_certificate(&doc.certificate) {
                    Verdict::Ok => {
                        if cli.json {
                            println!("{}", json!({ "verdict": "ok", "steps": doc.certificate.steps.len() }));
                        } else {
                            println!("ok: {} steps", doc.certificate.steps.len());
                        }
                        Ok(0)
                    }
                    Verdict::Fail { step, reason } => {
                        if cli.json {
                            println!("{}", json!({ "verdict": "fail", "step": step, "reason": reason }));
                        } else {
                            println!("fail at step {step}: {reason}");
                        }
                        Ok(2)
                    }
                }
            }
        }
        Cmd::Enumerate { dedup } => {
            let g = group_arg(cli)?;
            let trios = enumerate_maximal_critical_trios(&g, *dedup)?;
            for t in &trios {
                if cli.json {
                    println!("{}", trio_json(t));
                } else {
                    println!("{t}");
                }
            }
            if !cli.json {
                println!("count: {}", trios.len());
            }
            Ok(0)
        }
        Cmd::Check { theorem, all } => {
            let g = group_arg(cli)?;
            let ids: Vec<TheoremId> = if *all {
                ALL_THEOREMS.to_vec()
            } else {
                let label = theorem.as_deref().ok_or_else(|| {
                    Error::UnknownTheorem("missing theorem label (or pass --all)".into())
                })?;
                vec![TheoremId::from_label(label)?]
            };
            let mut violations = 0usize;
            for id in ids {
                let report = match check_theorem(&g, id, cli.seed) {
                    Ok(r) => r,
                    Err(Error::TheoremDomain { .. }) if *all => continue,
                    Err(e) => return Err(e),
                };
                violations += report.violations.len();
                if cli.json {
                    println!(
                        "{}",
                        json!({
                            "theorem": report.theorem,
                            "group": report.group.to_string(),
                            "instances": report.instances,
                            "violations": report.violations.iter().map(|v| json!({ "what": v.what, "repro": v.repro })).collect::<Vec<_>>(),
                        })
                    );
                } else {
                    print!("{}", report.render());
                }
            }
            if !cli.json {
                println!("violations: {violations}");
            }
            Ok(if violations == 0 { 0 } else { 2 })
        }
        Cmd::Atlas { out, max_order } => {
            let rows = build_atlas(*max_order)?;
            fs::create_dir_all(out).map_err(|e| Error::Io(e.to_string()))?;
            let mut table = String::new();
            table.push_str("group\torbits\tfirst:pure-beat\tfirst:pure-chord\tfirst:impure-beat\tfirst:impure-chord\tadmits:pure-beat\tadmits:pure-chord\tadmits:impure-beat\tadmits:impure-chord\n");
            let mut certs = 0usize;
            for row in &rows {
                table.push_str(&format!(
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                    row.spec,
                    row.orbits,
                    row.first_step[0],
                    row.first_step[1],
                    row.first_step[2],
                    row.first_step[3],
                    row.admits[0],
                    row.admits[1],
                    row.admits[2],
                    row.admits[3],
                ));
                for (k, rep) in row.representative.iter().enumerate() {
                    let Some(t) = rep else { continue };
                    let cert = decompose(t)?;
                    let doc = CertificateDocument::new(cert);
                    let name = format!("{}-{}.cert", row.spec, ALL_KINDS[k].label());
                    fs::write(out.join(&name), certify::render_document(&doc))
                        .map_err(|e| Error::Io(e.to_string()))?;
                    certs += 1;
                }
            }
            fs::write(out.join("atlas.tsv"), &table).map_err(|e| Error::Io(e.to_string()))?;
            if cli.json {
                println!(
                    "{}",
                    json!({ "rows": rows.len(), "certificates": certs, "out": out.to_string_lossy() })
                );
            } else {
                println!("wrote {} rows and {certs} certificates to {}", rows.len(), out.display());
            }
            Ok(0)
        }
    }
}
