//! Set-level arithmetic: sumsets, stabilizers, closures, deficiencies,
//! quasistability, and sequence recognition.

use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups, Element, Group, QuotientMap, Subgroup};
use crate::set::GroupSet;

pub fn sumset(a: &GroupSet, b: &GroupSet) -> Result<GroupSet> {
    a.check(b)?;
    GroupSet::from_mask(a.group().clone(), a.group().sumset_mask(a.mask(), b.mask()))
}

/// `{ g : g + A = A }`.  By convention stabilizer(∅) = G.
pub fn stabilizer(a: &GroupSet) -> Subgroup {
    let g = a.group();
    let mask = stabilizer_mask(g, a.mask());
    Subgroup::new(GroupSet::from_mask(g.clone(), mask).unwrap()).unwrap()
}

pub(crate) fn stabilizer_mask(group: &Group, m: u64) -> u64 {
    if m == 0 {
        return group.full_mask();
    }
    // any stabilizing g maps min(A) into A, so g ranges over A - min(A)
    let min = Element(m.trailing_zeros() as usize);
    let mut candidates = group.translate_mask(m, group.neg(min));
    let mut stab = 0u64;
    while candidates != 0 {
        let g = Element(candidates.trailing_zeros() as usize);
        candidates &= candidates - 1;
        if group.translate_mask(m, g) == m {
            stab |= 1u64 << g.index();
        }
    }
    stab
}

pub(crate) fn is_stable(group: &Group, m: u64, h: u64) -> bool {
    group.sumset_mask(m, h) == m
}

/// Minimal subgroup H with A contained in a single H-coset, plus the least
/// representative of that coset.
pub fn closure_coset(a: &GroupSet) -> Result<(Subgroup, Element)> {
    let x = a.min_element().ok_or(Error::EmptySet("closure input"))?;
    let g = a.group();
    let h = closure_subgroup_mask(g, a.mask());
    let rep = Element(g.translate_mask(h, x).trailing_zeros() as usize);
    Ok((
        Subgroup::new(GroupSet::from_mask(g.clone(), h).unwrap()).unwrap(),
        rep,
    ))
}

/// Subgroup generated by the pairwise differences of the elements of `m`.
pub(crate) fn closure_subgroup_mask(group: &Group, m: u64) -> u64 {
    debug_assert!(m != 0);
    let x = Element(m.trailing_zeros() as usize);
    group.span_mask(group.translate_mask(m, group.neg(x)))
}

/// δ(A,B) = |A| + |B| − |A+B|.
pub fn deficiency_pair(a: &GroupSet, b: &GroupSet) -> Result<i64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("deficiency operand"));
    }
    let s = sumset(a, b)?;
    Ok(a.len() as i64 + b.len() as i64 - s.len() as i64)
}

/// |A+B| − (|A+H| + |B+H| − |H|) with H = stabilizer(A+B).  Kneser's theorem
/// asserts this is never negative.
pub fn kneser_gap(a: &GroupSet, b: &GroupSet) -> Result<i64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("kneser_gap operand"));
    }
    a.check(b)?;
    let g = a.group();
    Ok(kneser_gap_mask(g, a.mask(), b.mask()))
}

pub(crate) fn kneser_gap_mask(group: &Group, a: u64, b: u64) -> i64 {
    let s = group.sumset_mask(a, b);
    let h = stabilizer_mask(group, s);
    let ah = group.sumset_mask(a, h);
    let bh = group.sumset_mask(b, h);
    s.count_ones() as i64
        - (ah.count_ones() as i64 + bh.count_ones() as i64 - h.count_ones() as i64)
}

/// Single-set deficiency δ(A) = max over subgroups H with A+H ≠ G of δ(A,H),
/// with the maximizing H (ties: smallest order, then least bitset).  By
/// Mann's theorem this equals the max over all nonempty finite B with
/// A+B ≠ G.
pub fn deficiency_set(a: &GroupSet) -> Result<(i64, Subgroup)> {
    if a.is_empty() {
        return Err(Error::EmptySet("deficiency_set input"));
    }
    if a.is_full() {
        return Err(Error::FullSet);
    }
    let g = a.group();
    let mut best: Option<(i64, Subgroup)> = None;
    for h in enumerate_subgroups(g) {
        let ah = g.sumset_mask(a.mask(), h.mask());
        if ah == g.full_mask() {
            continue;
        }
        let d = a.len() as i64 + h.order() as i64 - ah.count_ones() as i64;
        // subgroups arrive sorted by (order, bitset); strict improvement
        // keeps the tie-break deterministic
        if best.as_ref().map_or(true, |(bd, _)| d > *bd) {
            best = Some((d, h));
        }
    }
    // H = {0} always qualifies since A != G
    Ok(best.expect("trivial subgroup always valid"))
}

/// Classification of a set against a subgroup per the quasistability
/// definition: stable, stable after deleting one H-coset's worth, or neither.
/// `exceptional` lists the least representative of every valid coset R.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Quasistability {
    Stable { exceptional: Vec<Element> },
    Quasistable { exceptional: Vec<Element> },
    Neither,
}

impl Quasistability {
    pub fn is_neither(&self) -> bool {
        matches!(self, Quasistability::Neither)
    }
}

pub fn quasistability(a: &GroupSet, h: &Subgroup) -> Result<Quasistability> {
    a.check(&h.members)?;
    let g = a.group();
    let q = QuotientMap::new(g, h)?;
    let mut exceptional = Vec::new();
    for c in 0..q.num_cosets() {
        if is_stable(g, a.mask() & !q.coset_mask(c), h.mask()) {
            exceptional.push(q.rep(c));
        }
    }
    if is_stable(g, a.mask(), h.mask()) {
        Ok(Quasistability::Stable { exceptional })
    } else if exceptional.is_empty() {
        Ok(Quasistability::Neither)
    } else {
        Ok(Quasistability::Quasistable { exceptional })
    }
}

/// How a set sits against a subgroup H and a generating coset R of a cyclic
/// quotient G/H.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SequenceProfile {
    pub h: Subgroup,
    pub r: Element,
    /// Least representatives of the head and tail cosets of A+H, when A+H is
    /// an R-sequence.
    pub head: Option<Element>,
    pub tail: Option<Element>,
    /// Number of H-cosets meeting A (the length k+1 when A+H is a sequence).
    pub length: usize,
    /// A itself is an R-sequence (H-stable, cosets form a run).
    pub is_sequence: bool,
    /// Head coset is H.
    pub is_basic: bool,
    /// A+H is an R-sequence and |(A+H)\A| < |H|.
    pub is_near: bool,
    /// A+H is an R-sequence and A\S or A\T is H-stable.
    pub is_fringed: bool,
    /// |complement(A)| >= 2|H|.
    pub is_proper: bool,
    /// Plain-sequence sense: length >= 2.
    pub nontrivial_sequence: bool,
    /// Near/fringed sense: |A| > |H|.
    pub nontrivial_near: bool,
}

pub fn sequence_profile(a: &GroupSet, h: &Subgroup, r: Element) -> Result<SequenceProfile> {
    a.check(&h.members)?;
    let g = a.group();
    let q = QuotientMap::new(g, h)?;
    let rid = q
        .coset_id(r)
        .ok_or(Error::ElementOutOfRange { index: r.index(), order: g.order() })?;
    sequence_profile_in(g, g.full_mask(), a.mask(), h.mask(), &q, rid)
}

/// Core profile computation over an explicit universe (used by classify for
/// trios living inside a subgroup).
pub(crate) fn sequence_profile_in(
    group: &Group,
    universe: u64,
    a: u64,
    h: u64,
    q: &QuotientMap,
    rid: usize,
) -> Result<SequenceProfile> {
    let dlog = q.dlogs(rid)?; // errors if R is not a generator
    let qn = q.num_cosets();
    let hn = h.count_ones() as usize;
    let sat = group.sumset_mask(a, h);
    let cosets = q.cosets_meeting(a);
    let length = cosets.len();

    // Is the exponent set {dlog[c]} a cyclic run i, i+1, ..., i+length-1?
    let mut present = vec![false; qn];
    for &c in &cosets {
        present[dlog[c]] = true;
    }
    let run_heads: Vec<usize> = if length == 0 {
        Vec::new()
    } else if length == qn {
        (0..qn).collect()
    } else {
        (0..qn)
            .filter(|&s| {
                !present[(s + qn - 1) % qn] && (0..length).all(|i| present[(s + i) % qn])
            })
            .collect()
    };
    let sat_is_seq = length > 0 && !run_heads.is_empty();

    // coset id at exponent e
    let coset_at = |e: usize| -> usize {
        let mut x = 0usize;
        for _ in 0..e {
            x = q.add_cosets(x, rid);
        }
        x
    };

    let mut head = None;
    let mut tail = None;
    let mut is_fringed = false;
    if sat_is_seq {
        // first head for reporting; for the fringed flag, any head works
        for (k, &s) in run_heads.iter().enumerate() {
            let head_id = coset_at(s);
            let tail_id = coset_at((s + length - 1) % qn);
            if k == 0 {
                head = Some(q.rep(head_id));
                tail = Some(q.rep(tail_id));
            }
            let off_head = a & !q.coset_mask(head_id);
            let off_tail = a & !q.coset_mask(tail_id);
            if is_stable(group, off_head, h) || is_stable(group, off_tail, h) {
                is_fringed = true;
                if k != 0 {
                    head = Some(q.rep(head_id));
                    tail = Some(q.rep(tail_id));
                }
                break;
            }
        }
    }

    let a_len = a.count_ones() as usize;
    let is_sequence = sat_is_seq && sat == a;
    let is_near = sat_is_seq && (sat & !a).count_ones() < hn as u32;
    let is_basic = head == Some(q.rep(0));
    let complement_len = (universe & !a).count_ones() as usize;

    Ok(SequenceProfile {
        h: Subgroup::new(GroupSet::from_mask(group.clone(), h).unwrap()).unwrap(),
        r: q.rep(rid),
        head,
        tail,
        length,
        is_sequence,
        is_basic,
        is_near,
        is_fringed,
        is_proper: complement_len >= 2 * hn,
        nontrivial_sequence: length >= 2,
        nontrivial_near: a_len > hn,
    })
}

/// All (H, R) pairs under which A is an R-sequence, near R-sequence, or
/// fringed R-sequence.  H ranges over subgroups with G/H cyclic, R over
/// generator cosets; output ordered by (|H|, H bitset, R).
pub fn recognize_sequences(a: &GroupSet) -> Result<Vec<SequenceProfile>> {
    if a.is_empty() {
        return Err(Error::EmptySet("recognize_sequences input"));
    }
    let g = a.group();
    let mut out = Vec::new();
    for h in enumerate_subgroups(g) {
        let q = QuotientMap::new(g, &h)?;
        if !q.is_cyclic() {
            continue;
        }
        for &rid in q.generators() {
            let p = sequence_profile_in(g, g.full_mask(), a.mask(), h.mask(), &q, rid)?;
            if p.is_sequence || p.is_near || p.is_fringed {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// True iff every nonzero translate of B meets B in at most one point.
pub fn is_sidon(b: &GroupSet) -> bool {
    let g = b.group();
    for t in g.elements().skip(1) {
        if (g.translate_mask(b.mask(), t) & b.mask()).count_ones() > 1 {
            return false;
        }
    }
    true
}
