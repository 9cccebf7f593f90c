//! Certificate persistence: a canonical line-based text format with
//! bit-exact round-trips, plus batch re-verification of stored corpora.

use std::path::Path;

use rayon::prelude::*;

use crate::classify::{Certificate, CertStep, StructureKind, StructureTag, Verdict};
use crate::error::{Error, Result};
use crate::group::{Group, Subgroup};
use crate::set::GroupSet;
use crate::trio::{Similarity, Trio};

pub const SCHEMA_VERSION: u32 = 1;

/// A certificate together with its provenance header.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertificateDocument {
    pub schema: u32,
    pub tool: String,
    pub seed: Option<u64>,
    pub certificate: Certificate,
}

impl CertificateDocument {
    pub fn new(certificate: Certificate) -> Self {
        CertificateDocument {
            schema: SCHEMA_VERSION,
            tool: format!("kk {}", env!("CARGO_PKG_VERSION")),
            seed: None,
            certificate,
        }
    }
}

fn mask_list(mask: u64) -> String {
    let mut parts = Vec::new();
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros();
        m &= m - 1;
        parts.push(i.to_string());
    }
    parts.join(",")
}

/// Canonical text for a certificate: UTF-8, LF, fixed key order, element
/// lists as ascending comma-separated indices.  Stable across platforms.
pub fn render(cert: &Certificate) -> String {
    render_document(&CertificateDocument::new(cert.clone()))
}

pub fn render_document(doc: &CertificateDocument) -> String {
    let mut s = String::new();
    s.push_str(&format!("schema: {}\n", doc.schema));
    s.push_str(&format!("tool: {}\n", doc.tool));
    if let Some(seed) = doc.seed {
        s.push_str(&format!("seed: {seed}\n"));
    }
    s.push_str(&format!("group: {}\n", doc.certificate.group()));
    for step in &doc.certificate.steps {
        let (a, b, c) = step.trio.masks();
        s.push_str("step:\n");
        s.push_str(&format!("  universe: {}\n", mask_list(step.trio.universe_mask())));
        s.push_str(&format!("  A: {}\n", mask_list(a)));
        s.push_str(&format!("  B: {}\n", mask_list(b)));
        s.push_str(&format!("  C: {}\n", mask_list(c)));
        s.push_str(&format!("  kind: {}\n", step.tag.kind));
        s.push_str(&format!("  H: {}\n", mask_list(step.tag.h.mask())));
        if let Some(r) = step.tag.r {
            s.push_str(&format!("  R: {}\n", r.index()));
        }
        let p = step.tag.similarity.perm;
        s.push_str(&format!("  perm: {},{},{}\n", p[0], p[1], p[2]));
        s.push_str(&format!(
            "  shift: {},{}\n",
            step.tag.similarity.shifts[0].index(),
            step.tag.similarity.shifts[1].index()
        ));
    }
    s
}

struct Lines<'a> {
    iter: std::iter::Peekable<std::str::Lines<'a>>,
    lineno: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().peekable(),
            lineno: 0,
        }
    }

    fn peek(&mut self) -> Option<&str> {
        self.iter.peek().copied()
    }

    fn next(&mut self) -> Option<&'a str> {
        self.lineno += 1;
        self.iter.next()
    }

    fn expect(&mut self, key: &str) -> Result<&'a str> {
        let line = self
            .next()
            .ok_or_else(|| Error::Document(format!("unexpected end of document, wanted {key:?}")))?;
        let trimmed = line.trim_start();
        let rest = trimmed
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix(':'))
            .ok_or_else(|| {
                Error::Document(format!(
                    "line {}: expected {key:?} field, found {trimmed:?}",
                    self.lineno
                ))
            })?;
        Ok(rest.trim())
    }
}

fn parse_indices(g: &Group, s: &str, what: &str) -> Result<u64> {
    let mut mask = 0u64;
    if s.is_empty() {
        return Ok(0);
    }
    for part in s.split(',') {
        let idx: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Document(format!("bad element index {part:?} in {what}")))?;
        if idx >= g.order() {
            return Err(Error::ElementOutOfRange {
                index: idx,
                order: g.order(),
            });
        }
        mask |= 1u64 << idx;
    }
    Ok(mask)
}

/// Parse a canonical document.  Parsing is syntax-level only: it checks
/// the schema version, binds every set to the group, and rebuilds the
/// tags, but semantic validity is `verify_certificate`'s job.
pub fn parse(text: &str) -> Result<CertificateDocument> {
    let mut lines = Lines::new(text);
    let schema: u32 = lines
        .expect("schema")?
        .parse()
        .map_err(|_| Error::Document("schema version is not a number".into()))?;
    if schema != SCHEMA_VERSION {
        return Err(Error::SchemaVersion(schema));
    }
    let tool = lines.expect("tool")?.to_string();
    let seed = match lines.peek() {
        Some(l) if l.trim_start().starts_with("seed:") => {
            let v = lines.expect("seed")?;
            Some(
                v.parse::<u64>()
                    .map_err(|_| Error::Document(format!("bad seed {v:?}")))?,
            )
        }
        _ => None,
    };
    let group = Group::parse(lines.expect("group")?)?;
    let mut steps = Vec::new();
    while let Some(line) = lines.peek() {
        if line.trim().is_empty() {
            lines.next();
            continue;
        }
        let header = lines.expect("step")?;
        if !header.is_empty() {
            return Err(Error::Document(format!(
                "step header carries unexpected payload {header:?}"
            )));
        }
        let universe = parse_indices(&group, lines.expect("universe")?, "universe")?;
        let a = parse_indices(&group, lines.expect("A")?, "A")?;
        let b = parse_indices(&group, lines.expect("B")?, "B")?;
        let c = parse_indices(&group, lines.expect("C")?, "C")?;
        let kind = StructureKind::from_label(lines.expect("kind")?)?;
        let h_mask = parse_indices(&group, lines.expect("H")?, "H")?;
        let r = match lines.peek() {
            Some(l) if l.trim_start().starts_with("R:") => {
                let v = lines.expect("R")?;
                let idx: usize = v
                    .parse()
                    .map_err(|_| Error::Document(format!("bad R index {v:?}")))?;
                Some(group.element(idx)?)
            }
            _ => None,
        };
        let perm_text = lines.expect("perm")?;
        let perm_parts: Vec<usize> = perm_text
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Document(format!("bad perm {perm_text:?}")))?;
        let perm: [usize; 3] = perm_parts
            .try_into()
            .map_err(|_| Error::Document(format!("perm must have 3 entries: {perm_text:?}")))?;
        let shift_text = lines.expect("shift")?;
        let shift_parts: Vec<usize> = shift_text
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Document(format!("bad shift {shift_text:?}")))?;
        if shift_parts.len() != 2 {
            return Err(Error::Document(format!(
                "shift must have 2 entries: {shift_text:?}"
            )));
        }
        let g0 = group.element(shift_parts[0])?;
        let g1 = group.element(shift_parts[1])?;
        let trio = Trio::from_masks(group.clone(), universe, a, b, c)?;
        let h = Subgroup::new(GroupSet::from_mask(group.clone(), h_mask)?)?;
        let similarity = Similarity::perm_shifts(&group, perm, g0, g1)?;
        steps.push(CertStep {
            trio,
            tag: StructureTag {
                kind,
                h,
                r,
                similarity,
            },
        });
    }
    if steps.is_empty() {
        return Err(Error::Document("document has no steps".into()));
    }
    Ok(CertificateDocument {
        schema,
        tool,
        seed,
        certificate: Certificate { steps },
    })
}

/// Per-file outcome lists of a corpus run; file names only, sorted.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BatchSummary {
    pub ok: Vec<String>,
    pub failed: Vec<(String, String)>,
    pub unreadable: Vec<(String, String)>,
}

impl BatchSummary {
    pub fn total(&self) -> usize {
        self.ok.len() + self.failed.len() + self.unreadable.len()
    }

    pub fn all_ok(&self) -> bool {
        self.failed.is_empty() && self.unreadable.is_empty()
    }
}

impl std::fmt::Display for BatchSummary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "checked {} file(s): {} ok, {} failed, {} unreadable",
            self.total(),
            self.ok.len(),
            self.failed.len(),
            self.unreadable.len()
        )?;
        for (name, reason) in &self.failed {
            writeln!(f, "failed: {name}: {reason}")?;
        }
        for (name, reason) in &self.unreadable {
            writeln!(f, "unreadable: {name}: {reason}")?;
        }
        Ok(())
    }
}

/// Verify every regular `.cert` file in `dir` (non-recursive), in parallel
/// with per-file isolation, and merge into a deterministic summary.
pub fn batch_verify(dir: &Path) -> Result<BatchSummary> {
    let mut names: Vec<std::path::PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().map(|t| t.is_file()).unwrap_or(false))
        .map(|e| e.path())
        .filter(|p| p.extension().map(|x| x == "cert").unwrap_or(false))
        .collect();
    names.sort();

    enum Outcome {
        Ok,
        Failed(String),
        Unreadable(String),
    }

    let outcomes: Vec<(String, Outcome)> = names
        .par_iter()
        .map(|path| {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let outcome = match std::fs::read_to_string(path) {
                Err(e) => Outcome::Unreadable(e.to_string()),
                Ok(text) => match parse(&text) {
                    Err(e) => Outcome::Unreadable(e.to_string()),
                    Ok(doc) => match crate::classify::verify_certificate(&doc.certificate) {
                        Verdict::Ok => Outcome::Ok,
                        Verdict::Fail { step, reason } => {
                            Outcome::Failed(format!("step {}: {reason}", step + 1))
                        }
                    },
                },
            };
            (name, outcome)
        })
        .collect();

    let mut summary = BatchSummary::default();
    for (name, outcome) in outcomes {
        match outcome {
            Outcome::Ok => summary.ok.push(name),
            Outcome::Failed(r) => summary.failed.push((name, r)),
            Outcome::Unreadable(r) => summary.unreadable.push((name, r)),
        }
    }
    Ok(summary)
}
