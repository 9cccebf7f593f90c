//! Recognition of the four structure kinds (pure/impure beat/chord),
//! continuations, recursive decomposition of maximal critical trios into
//! certificates, and the independent certificate verifier.

use crate::error::{Error, Result};
use crate::group::{subgroup_masks_within, Element, Group, QuotientMap, Subgroup};
use crate::set::GroupSet;
use crate::setops::{closure_subgroup_mask, is_stable, sequence_profile_in, stabilizer_mask};
use crate::trio::{trio_deficiency, Similarity, Trio};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum StructureKind {
    PureBeat,
    PureChord,
    ImpureBeat,
    ImpureChord,
}

pub const ALL_KINDS: [StructureKind; 4] = [
    StructureKind::PureBeat,
    StructureKind::PureChord,
    StructureKind::ImpureBeat,
    StructureKind::ImpureChord,
];

impl StructureKind {
    pub fn is_pure(self) -> bool {
        matches!(self, StructureKind::PureBeat | StructureKind::PureChord)
    }

    pub fn is_beat(self) -> bool {
        matches!(self, StructureKind::PureBeat | StructureKind::ImpureBeat)
    }

    pub fn is_chord(self) -> bool {
        !self.is_beat()
    }

    pub fn label(self) -> &'static str {
        match self {
            StructureKind::PureBeat => "pure-beat",
            StructureKind::PureChord => "pure-chord",
            StructureKind::ImpureBeat => "impure-beat",
            StructureKind::ImpureChord => "impure-chord",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        match s {
            "pure-beat" => Ok(StructureKind::PureBeat),
            "pure-chord" => Ok(StructureKind::PureChord),
            "impure-beat" => Ok(StructureKind::ImpureBeat),
            "impure-chord" => Ok(StructureKind::ImpureChord),
            _ => Err(Error::Document(format!("unknown structure kind {s:?}"))),
        }
    }
}

impl std::fmt::Display for StructureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Witness that a trio matches a structure definition: the kind, the
/// subgroup H, the generator coset R (chords), and the similarity carrying
/// the trio onto a triple satisfying the definition verbatim.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StructureTag {
    pub kind: StructureKind,
    pub h: Subgroup,
    pub r: Option<Element>,
    pub similarity: Similarity,
}

impl StructureTag {
    fn sort_key(&self) -> (u8, usize, u64, usize, [usize; 3], usize, usize) {
        (
            self.kind as u8,
            self.h.order(),
            self.h.mask(),
            self.r.map_or(0, Element::index),
            self.similarity.perm,
            self.similarity.shifts[0].index(),
            self.similarity.shifts[1].index(),
        )
    }
}

impl std::fmt::Display for StructureTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} H={}", self.kind, self.h.members)?;
        if let Some(r) = self.r {
            write!(f, " R={r}")?;
        }
        write!(
            f,
            " perm=({},{},{}) shift=({},{})",
            self.similarity.perm[0],
            self.similarity.perm[1],
            self.similarity.perm[2],
            self.similarity.shifts[0],
            self.similarity.shifts[1]
        )
    }
}

/// Re-check a tag against a trio from first principles (no search).
/// Returns the first failing condition as the error message.
pub fn check_tag(t: &Trio, tag: &StructureTag) -> std::result::Result<(), String> {
    let g = t.group();
    let u = t.universe_mask();
    let h = tag.h.mask();
    if tag.h.group() != g {
        return Err("tag subgroup belongs to a different group".into());
    }
    if h & !u != 0 {
        return Err("H not contained in the universe".into());
    }
    if h == u {
        return Err("H must be a proper subgroup of the universe".into());
    }
    let n = crate::trio::apply_similarity(t, &tag.similarity)
        .map_err(|e| format!("similarity does not apply: {e}"))?;
    let (a, b, c) = n.masks();
    let comp = |m: u64| u & !g.neg_mask(m);
    match tag.kind {
        StructureKind::PureBeat => {
            if tag.r.is_some() {
                return Err("beat tags carry no R".into());
            }
            if a != h {
                return Err("A != H".into());
            }
            if stabilizer_mask(g, b) != h {
                return Err("stabilizer of B is not H".into());
            }
            if c != comp(g.sumset_mask(a, b)) {
                return Err("C != complement(-(A+B))".into());
            }
            if c == 0 {
                return Err("C is empty".into());
            }
        }
        StructureKind::PureChord => {
            let (q, rid) = chord_quotient(t, tag)?;
            let pa = sequence_profile_in(g, u, a, h, &q, rid)
                .map_err(|e| format!("profile of A: {e}"))?;
            if !(pa.is_sequence && pa.nontrivial_sequence) {
                return Err("A is not a nontrivial R-sequence".into());
            }
            let pb = sequence_profile_in(g, u, b, h, &q, rid)
                .map_err(|e| format!("profile of B: {e}"))?;
            if !(pb.is_sequence && pb.nontrivial_sequence) {
                return Err("B is not a nontrivial R-sequence".into());
            }
            if c != comp(g.sumset_mask(a, b)) {
                return Err("C != complement(-(A+B))".into());
            }
            if q.cosets_meeting(c).len() < 2 {
                return Err("C is contained in a single H-coset".into());
            }
        }
        StructureKind::ImpureBeat => {
            if tag.r.is_some() {
                return Err("beat tags carry no R".into());
            }
            if a == 0 {
                return Err("A is empty".into());
            }
            if a & !h != 0 || closure_subgroup_mask(g, a) != h {
                return Err("[A] != H".into());
            }
            if !is_stable(g, b & !h, h) {
                return Err("B \\ H is not H-stable".into());
            }
            if c & !h != comp(g.sumset_mask(a, b)) & !h {
                return Err("C \\ H != complement(-(A+B)) \\ H".into());
            }
            if b & h == 0 || c & h == 0 {
                return Err("B ∩ H or C ∩ H is empty".into());
            }
        }
        StructureKind::ImpureChord => {
            let (q, rid) = chord_quotient(t, tag)?;
            let pa = sequence_profile_in(g, u, a | h, h, &q, rid)
                .map_err(|e| format!("profile of H∪A: {e}"))?;
            if !(pa.is_sequence && pa.is_basic && pa.nontrivial_sequence) {
                return Err("H ∪ A is not a nontrivial basic R-sequence".into());
            }
            let pb = sequence_profile_in(g, u, b | h, h, &q, rid)
                .map_err(|e| format!("profile of H∪B: {e}"))?;
            if !(pb.is_sequence && pb.is_basic && pb.nontrivial_sequence) {
                return Err("H ∪ B is not a nontrivial basic R-sequence".into());
            }
            let off = comp(g.sumset_mask(a, b)) & !h;
            if c & !h != off {
                return Err("C \\ H != complement(-(A+B)) \\ H".into());
            }
            if off == 0 {
                return Err("C \\ H is empty".into());
            }
            if a & h == 0 || b & h == 0 || c & h == 0 {
                return Err("A ∩ H, B ∩ H or C ∩ H is empty".into());
            }
        }
    }
    Ok(())
}

fn chord_quotient(t: &Trio, tag: &StructureTag) -> std::result::Result<(QuotientMap, usize), String> {
    let r = tag.r.ok_or_else(|| "chord tag is missing R".to_string())?;
    let q = crate::trio::universe_quotient(t, tag.h.mask())
        .map_err(|e| format!("bad quotient: {e}"))?;
    let rid = q
        .coset_id(r)
        .ok_or_else(|| "R outside the universe".to_string())?;
    if !q.generators().contains(&rid) {
        return Err("R does not generate the quotient".into());
    }
    Ok((q, rid))
}

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// Every tag under which `t` matches a structure definition, searching all
/// proper subgroups of the universe, all generator cosets of cyclic
/// quotients, all 6 permutations, and all universe shifts.  Deterministic
/// order: (kind, |H|, H bitset, R, permutation, shift).
pub fn match_structures(t: &Trio) -> Result<Vec<StructureTag>> {
    if !t.is_nontrivial() {
        return Err(Error::TrivialTrio);
    }
    let mut out = Vec::new();
    search(t, &ALL_KINDS, false, &mut out);
    out.sort_by_key(StructureTag::sort_key);
    out.dedup();
    Ok(out)
}

/// First tag in the canonical search order (kind preference, smallest H
/// first), or None.
pub fn find_structure(t: &Trio, kinds: &[StructureKind]) -> Option<StructureTag> {
    let mut out = Vec::new();
    search(t, kinds, true, &mut out);
    out.into_iter().next()
}

fn mask_elements(mut m: u64) -> Vec<Element> {
    let mut v = Vec::new();
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        v.push(Element(i));
    }
    v
}

/// The general similarity has two free shift parameters (g0, g1, −g0−g1).
/// When `first_only` is set the shift loops are pruned to a provably
/// complete subset per kind:
/// - pure beat: condition C = comp(-(A+B)) is invariant under moving shift
///   weight between B and C, so (g, −g, 0) covers the orbit;
/// - pure chord: a translate of an R-sequence is an R-sequence and the C
///   condition is invariant, so the identity shift suffices;
/// - impure kinds: every condition is invariant under shifting any slot by
///   an element of H, so it is enough to take one closure-normalizing g0
///   (beat) or coset representatives for g0 (chord), and coset
///   representatives for g1.
fn search(t: &Trio, kinds: &[StructureKind], first_only: bool, out: &mut Vec<StructureTag>) {
    let g = t.group().clone();
    let u = t.universe_mask();
    let subgroups = subgroup_masks_within(&g, u);
    let universe_elems = mask_elements(u);
    let zero = Element(0);
    for &kind in kinds {
        for &h in &subgroups {
            if h == u {
                continue;
            }
            let sub = Subgroup::new(GroupSet::from_mask(g.clone(), h).unwrap()).unwrap();
            let quot = crate::trio::universe_quotient(t, h).ok();
            let rs: Vec<Option<Element>> = if kind.is_chord() {
                match &quot {
                    Some(q) if q.is_cyclic() => {
                        q.generators().iter().map(|&rid| Some(q.rep(rid))).collect()
                    }
                    _ => continue,
                }
            } else {
                vec![None]
            };
            let reps: Vec<Element> = match &quot {
                Some(q) => (0..q.num_cosets()).map(|c| q.rep(c)).collect(),
                None => universe_elems.clone(),
            };
            for r in rs {
                for perm in PERMS {
                    let shift_pairs: Vec<(Element, Element)> = if !first_only {
                        let mut v = Vec::new();
                        for &g0 in &universe_elems {
                            for &g1 in &universe_elems {
                                v.push((g0, g1));
                            }
                        }
                        v
                    } else {
                        match kind {
                            StructureKind::PureBeat => universe_elems
                                .iter()
                                .map(|&g0| (g0, g.neg(g0)))
                                .collect(),
                            StructureKind::PureChord => vec![(zero, zero)],
                            StructureKind::ImpureBeat => {
                                let a = t.set_mask(perm[0]);
                                if crate::setops::closure_subgroup_mask(&g, a) != h {
                                    continue;
                                }
                                let g0 = g.neg(Element(a.trailing_zeros() as usize));
                                reps.iter().map(|&g1| (g0, g1)).collect()
                            }
                            StructureKind::ImpureChord => {
                                let mut v = Vec::new();
                                for &g0 in &reps {
                                    for &g1 in &reps {
                                        v.push((g0, g1));
                                    }
                                }
                                v
                            }
                        }
                    };
                    for (g0, g1) in shift_pairs {
                        let sim = Similarity::perm_shifts(&g, perm, g0, g1).unwrap();
                        let tag = StructureTag {
                            kind,
                            h: sub.clone(),
                            r,
                            similarity: sim,
                        };
                        if check_tag(t, &tag).is_ok() {
                            out.push(tag);
                            if first_only {
                                return;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// The induced trio inside H extracted from an impure tag.
pub fn continuation(t: &Trio, tag: &StructureTag) -> Result<Trio> {
    if tag.kind.is_pure() {
        return Err(Error::PureTagHasNoContinuation);
    }
    check_tag(t, tag).map_err(Error::InvalidTag)?;
    let n = crate::trio::apply_similarity(t, &tag.similarity)?;
    let (a, b, c) = n.masks();
    let h = tag.h.mask();
    let a2 = match tag.kind {
        StructureKind::ImpureBeat => a, // [A] = H already puts A inside H
        StructureKind::ImpureChord => a & h,
        _ => unreachable!(),
    };
    Trio::from_masks(t.group().clone(), h, a2, b & h, c & h)
}

/// One step of a certificate: the trio at this level and the tag applied.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertStep {
    pub trio: Trio,
    pub tag: StructureTag,
}

/// A chain of trios in strictly descending subgroups, each non-final step
/// impure with continuation equal to the next step, ending in a pure
/// structure.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Certificate {
    pub steps: Vec<CertStep>,
}

impl Certificate {
    pub fn group(&self) -> &Group {
        self.steps[0].trio.group()
    }
}

/// Decompose a nontrivial maximal critical trio into a certificate.
/// Search prefers pure tags (beat before chord), then impure, smallest H
/// first; recursion follows the continuation.
pub fn decompose(t: &Trio) -> Result<Certificate> {
    if !t.is_nontrivial() {
        return Err(Error::TrivialTrio);
    }
    if !t.is_critical() {
        return Err(Error::TrioNotCritical);
    }
    if !crate::trio::is_maximal(t) {
        return Err(Error::TrioNotMaximal);
    }
    let mut steps = Vec::new();
    let mut cur = t.clone();
    loop {
        let tag = find_structure(&cur, &ALL_KINDS).ok_or_else(|| {
            Error::NoStructureFound(format!(
                "group {} universe {} trio {}",
                cur.group(),
                cur.universe().members,
                cur
            ))
        })?;
        let pure = tag.kind.is_pure();
        let next = if pure {
            None
        } else {
            Some(continuation(&cur, &tag)?)
        };
        steps.push(CertStep { trio: cur, tag });
        match next {
            None => break,
            Some(n) => cur = n,
        }
    }
    Ok(Certificate { steps })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Verdict {
    Ok,
    Fail { step: usize, reason: String },
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Ok => write!(f, "OK"),
            Verdict::Fail { step, reason } => write!(f, "FAIL at step {}: {}", step + 1, reason),
        }
    }
}

/// Re-validate a certificate from scratch using only set/trio primitives:
/// tag invariants, continuation equality, strict subgroup descent, final
/// purity, and deficiency preservation.  Reports the first failing
/// condition.
pub fn verify_certificate(cert: &Certificate) -> Verdict {
    if cert.steps.is_empty() {
        return Verdict::Fail {
            step: 0,
            reason: "certificate has no steps".into(),
        };
    }
    let fail = |step: usize, reason: &str| Verdict::Fail {
        step,
        reason: reason.into(),
    };
    for (i, step) in cert.steps.iter().enumerate() {
        let g = step.trio.group();
        if !g.is_subgroup_mask(step.trio.universe_mask()) {
            return fail(i, "universe is not a subgroup");
        }
        if let Err(reason) = check_tag(&step.trio, &step.tag) {
            return Verdict::Fail { step: i, reason };
        }
        let last = i + 1 == cert.steps.len();
        if last {
            if !step.tag.kind.is_pure() {
                return fail(i, "final step not pure");
            }
        } else {
            if step.tag.kind.is_pure() {
                return fail(i, "non-final step is pure");
            }
            let next = &cert.steps[i + 1];
            let nu = next.trio.universe_mask();
            let cu = step.trio.universe_mask();
            if nu & !cu != 0 || nu == cu {
                return fail(i, "chain not strictly descending");
            }
            if nu != step.tag.h.mask() {
                return fail(i, "next universe is not the tagged subgroup");
            }
            match continuation(&step.trio, &step.tag) {
                Ok(cont) => {
                    if cont != next.trio {
                        return fail(i, "continuation does not equal the next trio");
                    }
                }
                Err(e) => {
                    return Verdict::Fail {
                        step: i,
                        reason: format!("continuation failed: {e}"),
                    }
                }
            }
            if trio_deficiency(&next.trio) != trio_deficiency(&step.trio) {
                return fail(i, "deficiency not preserved");
            }
        }
    }
    Verdict::Ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::parse_set;
    use crate::trio::parse_trio;

    fn g(s: &str) -> Group {
        Group::parse(s).unwrap()
    }

    fn trio(gr: &Group, s: &str) -> Trio {
        parse_trio(gr, s).unwrap()
    }

    #[test]
    fn match_pure_beat() {
        let z6 = g("Z6");
        let tags = match_structures(&trio(&z6, "{0};{0,1};{1,2,3,4}")).unwrap();
        assert!(tags
            .iter()
            .any(|t| t.kind == StructureKind::PureBeat && t.h.order() == 1));
    }

    #[test]
    fn match_pure_chord() {
        let z7 = g("Z7");
        let tags = match_structures(&trio(&z7, "{0,1};{0,1,2};{1,2,3}")).unwrap();
        assert!(tags
            .iter()
            .any(|t| t.kind == StructureKind::PureChord
                && t.h.order() == 1
                && t.r == Some(Element(1))));
    }

    #[test]
    fn match_impure_beat() {
        let z6 = g("Z6");
        let tags = match_structures(&trio(&z6, "{0,2};{0,1,3,5};{2}")).unwrap();
        assert!(tags
            .iter()
            .any(|t| t.kind == StructureKind::ImpureBeat && t.h.members.to_string() == "{0,2,4}"));
    }

    #[test]
    fn match_rejects_trivial() {
        let z6 = g("Z6");
        assert!(matches!(
            match_structures(&trio(&z6, "{0};{};{1}")),
            Err(Error::TrivialTrio)
        ));
    }

    #[test]
    fn tags_pass_independent_recheck() {
        let z8 = g("Z8");
        let t = trio(&z8, "{0,1,5};{0,1,5};{1,4,5}");
        let tags = match_structures(&t).unwrap();
        assert!(!tags.is_empty());
        for tag in &tags {
            check_tag(&t, tag).unwrap();
        }
    }

    #[test]
    fn continuation_examples() {
        let z6 = g("Z6");
        let t = trio(&z6, "{0,2};{0,1,3,5};{2}");
        let tag = match_structures(&t)
            .unwrap()
            .into_iter()
            .find(|t| t.kind == StructureKind::ImpureBeat && t.h.members.to_string() == "{0,2,4}")
            .unwrap();
        let cont = continuation(&t, &tag).unwrap();
        assert_eq!(cont.universe().members.to_string(), "{0,2,4}");
        assert_eq!(trio_deficiency(&cont), trio_deficiency(&t));

        let z8 = g("Z8");
        let t8 = trio(&z8, "{0,1,5};{0,1,5};{1,4,5}");
        let tag8 = match_structures(&t8)
            .unwrap()
            .into_iter()
            .find(|t| t.kind == StructureKind::ImpureChord && t.h.members.to_string() == "{0,4}")
            .unwrap();
        let cont8 = continuation(&t8, &tag8).unwrap();
        assert_eq!(trio_deficiency(&cont8), 1);
        assert_eq!(cont8.universe().members.to_string(), "{0,4}");

        // pure tags have no continuation
        let t6 = trio(&z6, "{0};{0,1};{1,2,3,4}");
        let pure = match_structures(&t6).unwrap().into_iter().next().unwrap();
        assert!(pure.kind.is_pure());
        assert!(matches!(
            continuation(&t6, &pure),
            Err(Error::PureTagHasNoContinuation)
        ));
    }

    #[test]
    fn decompose_single_step() {
        let z6 = g("Z6");
        let cert = decompose(&trio(&z6, "{0};{0,1};{1,2,3,4}")).unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.steps[0].tag.kind, StructureKind::PureBeat);
        assert_eq!(cert.steps[0].tag.h.order(), 1);
        assert!(verify_certificate(&cert).is_ok());
    }

    #[test]
    fn decompose_two_step_chord() {
        let z8 = g("Z8");
        let cert = decompose(&trio(&z8, "{0,1,5};{0,1,5};{1,4,5}")).unwrap();
        assert_eq!(cert.steps.len(), 2);
        assert_eq!(cert.steps[0].tag.kind, StructureKind::ImpureChord);
        assert_eq!(cert.steps[0].tag.h.members.to_string(), "{0,4}");
        assert_eq!(cert.steps[1].tag.kind, StructureKind::PureBeat);
        assert!(verify_certificate(&cert).is_ok());
    }

    #[test]
    fn decompose_prefers_pure_structures() {
        // this trio is an impure beat relative to {0,2,4} but also a pure
        // beat relative to {0} (its third set is a singleton), and the
        // search order prefers the pure tag
        let z6 = g("Z6");
        let cert = decompose(&trio(&z6, "{0,2};{0,1,3,5};{2}")).unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.steps[0].tag.kind, StructureKind::PureBeat);
        assert!(verify_certificate(&cert).is_ok());
    }

    #[test]
    fn decompose_rejects_bad_inputs() {
        let z6 = g("Z6");
        assert!(matches!(
            decompose(&trio(&z6, "{0,2,4};{0,2,4};{1,3}")),
            Err(Error::TrioNotMaximal)
        ));
        assert!(matches!(
            decompose(&trio(&z6, "{1};{1};{1}")),
            Err(Error::TrioNotCritical)
        ));
        assert!(matches!(
            decompose(&trio(&z6, "{};{0,1};{1,2}")),
            Err(Error::TrivialTrio)
        ));
    }

    #[test]
    fn verify_rejects_tampering() {
        let z8 = g("Z8");
        let cert = decompose(&trio(&z8, "{0,1,5};{0,1,5};{1,4,5}")).unwrap();

        // drop the final (pure) step
        let truncated = Certificate {
            steps: vec![cert.steps[0].clone()],
        };
        match verify_certificate(&truncated) {
            Verdict::Fail { reason, .. } => assert_eq!(reason, "final step not pure"),
            v => panic!("expected failure, got {v:?}"),
        }

        // swap the chain order so it no longer descends
        let swapped = Certificate {
            steps: vec![cert.steps[1].clone(), cert.steps[0].clone()],
        };
        assert!(!verify_certificate(&swapped).is_ok());

        // tamper with H
        let mut bad = cert.clone();
        bad.steps[0].tag.h =
            Subgroup::new(parse_set(&z8, "{0,2,4,6}").unwrap()).unwrap();
        assert!(!verify_certificate(&bad).is_ok());
    }
}
