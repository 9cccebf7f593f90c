//! Trios (A,B,C) with 0 ∉ A+B+C: construction, deficiency, maximality,
//! saturation, similarity, and the purification transform.
//!
//! A trio lives inside a *universe*, a subgroup of the ambient group (the
//! whole group in the common case).  Complements and the deficiency formula
//! are taken relative to the universe; element labels stay ambient.

use crate::error::{Error, Result};
use crate::group::{Element, Group, QuotientMap, Subgroup};
use crate::set::GroupSet;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Trio {
    group: Group,
    universe: u64,
    a: u64,
    b: u64,
    c: u64,
}

impl Trio {
    /// Build a trio over the whole group, checking 0 ∉ A+B+C.
    pub fn new(a: GroupSet, b: GroupSet, c: GroupSet) -> Result<Self> {
        a.check(&b)?;
        a.check(&c)?;
        let group = a.group().clone();
        let universe = group.full_mask();
        Trio::from_masks(group, universe, a.mask(), b.mask(), c.mask())
    }

    /// Build a trio inside the subgroup `universe`.
    pub fn new_in(universe: &Subgroup, a: GroupSet, b: GroupSet, c: GroupSet) -> Result<Self> {
        a.check(&b)?;
        a.check(&c)?;
        a.check(&universe.members)?;
        Trio::from_masks(
            a.group().clone(),
            universe.mask(),
            a.mask(),
            b.mask(),
            c.mask(),
        )
    }

    pub(crate) fn from_masks(group: Group, universe: u64, a: u64, b: u64, c: u64) -> Result<Self> {
        if (a | b | c) & !universe != 0 {
            return Err(Error::ElementOutOfRange {
                index: (((a | b | c) & !universe).trailing_zeros()) as usize,
                order: universe.count_ones() as usize,
            });
        }
        let ab = group.sumset_mask(a, b);
        if group.sumset_mask(ab, c) & 1 != 0 {
            return Err(Error::InvalidTag("0 ∈ A+B+C, not a trio".into()));
        }
        Ok(Trio {
            group,
            universe,
            a,
            b,
            c,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn universe_mask(&self) -> u64 {
        self.universe
    }

    pub fn universe_order(&self) -> usize {
        self.universe.count_ones() as usize
    }

    pub fn universe(&self) -> Subgroup {
        Subgroup::new(GroupSet::from_mask(self.group.clone(), self.universe).unwrap()).unwrap()
    }

    pub fn a(&self) -> GroupSet {
        GroupSet::from_mask(self.group.clone(), self.a).unwrap()
    }

    pub fn b(&self) -> GroupSet {
        GroupSet::from_mask(self.group.clone(), self.b).unwrap()
    }

    pub fn c(&self) -> GroupSet {
        GroupSet::from_mask(self.group.clone(), self.c).unwrap()
    }

    pub fn masks(&self) -> (u64, u64, u64) {
        (self.a, self.b, self.c)
    }

    pub fn set_mask(&self, i: usize) -> u64 {
        [self.a, self.b, self.c][i]
    }

    pub fn is_nontrivial(&self) -> bool {
        self.a != 0 && self.b != 0 && self.c != 0
    }

    pub fn is_critical(&self) -> bool {
        trio_deficiency(self) > 0
    }
}

impl std::fmt::Display for Trio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{};{};{}", self.a(), self.b(), self.c())
    }
}

/// Parse a trio literal: three set literals separated by `;`.
pub fn parse_trio(group: &Group, s: &str) -> Result<Trio> {
    parse_trio_in(group, group.full_mask(), s)
}

pub(crate) fn parse_trio_in(group: &Group, universe: u64, s: &str) -> Result<Trio> {
    let parts: Vec<&str> = s.split(';').collect();
    if parts.len() != 3 {
        return Err(Error::TrioLiteral(format!(
            "expected three set literals separated by ';', got {s:?}"
        )));
    }
    let a = crate::set::parse_set(group, parts[0])?;
    let b = crate::set::parse_set(group, parts[1])?;
    let c = crate::set::parse_set(group, parts[2])?;
    Trio::from_masks(group.clone(), universe, a.mask(), b.mask(), c.mask())
}

/// (A, B, complement(−(A+B))): the trio with the unique maximal third set.
pub fn make_trio(a: &GroupSet, b: &GroupSet) -> Result<Trio> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet("make_trio input"));
    }
    a.check(b)?;
    let g = a.group();
    make_trio_masks(g, g.full_mask(), a.mask(), b.mask())
}

pub(crate) fn make_trio_masks(group: &Group, universe: u64, a: u64, b: u64) -> Result<Trio> {
    let c = universe & !group.neg_mask(group.sumset_mask(a, b));
    Trio::from_masks(group.clone(), universe, a, b, c)
}

/// δ(A,B,C) = |A| + |B| + |C| − |U|.
pub fn trio_deficiency(t: &Trio) -> i64 {
    let (a, b, c) = t.masks();
    (a.count_ones() + b.count_ones() + c.count_ones()) as i64 - t.universe_order() as i64
}

/// True iff all three completion identities hold.
pub fn is_maximal(t: &Trio) -> bool {
    let g = t.group();
    let u = t.universe_mask();
    let (a, b, c) = t.masks();
    let comp = |m: u64| u & !g.neg_mask(m);
    c == comp(g.sumset_mask(a, b)) && b == comp(g.sumset_mask(a, c)) && a == comp(g.sumset_mask(b, c))
}

/// A maximal supertrio of `t`, by cyclic completion passes in the fixed
/// order C, B, A until fixpoint.  Sets only grow.
pub fn saturate(t: &Trio) -> Trio {
    saturate_order(t, [2, 1, 0])
}

/// Completion passes in the cyclic order given by `order` (component
/// indices 0=A, 1=B, 2=C) until fixpoint.
pub fn saturate_order(t: &Trio, order: [usize; 3]) -> Trio {
    let g = t.group().clone();
    let u = t.universe_mask();
    let mut sets = [t.set_mask(0), t.set_mask(1), t.set_mask(2)];
    loop {
        let before = sets;
        for &i in &order {
            let j = (i + 1) % 3;
            let k = (i + 2) % 3;
            sets[i] = u & !g.neg_mask(g.sumset_mask(sets[j], sets[k]));
        }
        if sets == before {
            break;
        }
    }
    Trio::from_masks(g, u, sets[0], sets[1], sets[2]).expect("completion preserves the trio property")
}

/// All distinct maximal supertrios reachable by the 6 cyclic pass orders.
pub fn saturate_all(t: &Trio) -> Vec<Trio> {
    const ORDERS: [[usize; 3]; 6] = [
        [2, 1, 0],
        [2, 0, 1],
        [1, 2, 0],
        [1, 0, 2],
        [0, 2, 1],
        [0, 1, 2],
    ];
    let mut out: Vec<Trio> = Vec::new();
    for order in ORDERS {
        let s = saturate_order(t, order);
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// A similarity transform: permute the three sets, then shift them by
/// `shifts` = (g0,g1,g2) with g0+g1+g2 = 0.  The primitive moves are
/// permutations and (A+g, B−g, C); every composition reduces to this form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Similarity {
    pub perm: [usize; 3],
    pub shifts: [Element; 3],
}

impl Similarity {
    pub fn identity() -> Self {
        Similarity {
            perm: [0, 1, 2],
            shifts: [Element(0); 3],
        }
    }

    pub fn permutation(perm: [usize; 3]) -> Result<Self> {
        let mut seen = [false; 3];
        for &p in &perm {
            if p > 2 || seen[p] {
                return Err(Error::InvalidTag(format!("bad permutation {perm:?}")));
            }
            seen[p] = true;
        }
        Ok(Similarity {
            perm,
            shifts: [Element(0); 3],
        })
    }

    /// The primitive move (A+g, B−g, C).
    pub fn shift(group: &Group, g: Element) -> Self {
        Similarity {
            perm: [0, 1, 2],
            shifts: [g, group.neg(g), Element(0)],
        }
    }

    /// Permutation followed by (A+g, B−g, C); the normal form that the
    /// structure search uses.
    pub fn perm_shift(group: &Group, perm: [usize; 3], g: Element) -> Result<Self> {
        Similarity::perm_shifts(group, perm, g, group.neg(g))
    }

    /// Permutation followed by independent shifts on the first two sets;
    /// the third shift is forced to −g0−g1.  This is the general element
    /// of the similarity group.
    pub fn perm_shifts(group: &Group, perm: [usize; 3], g0: Element, g1: Element) -> Result<Self> {
        let mut s = Similarity::permutation(perm)?;
        s.shifts = [g0, g1, group.neg(group.add(g0, g1))];
        Ok(s)
    }

    pub fn is_identity(&self) -> bool {
        self.perm == [0, 1, 2] && self.shifts.iter().all(|s| s.is_identity())
    }

    /// `self` after `first`: apply(t, first.then(self)) = apply(apply(t, first), self).
    pub fn then_after(&self, first: &Similarity, group: &Group) -> Similarity {
        // (P2,v2) ∘ (P1,v1): result[i] = first-out[p2[i]] + v2[i]
        //                              = t[p1[p2[i]]] + v1[p2[i]] + v2[i]
        let mut perm = [0usize; 3];
        let mut shifts = [Element(0); 3];
        for i in 0..3 {
            perm[i] = first.perm[self.perm[i]];
            shifts[i] = group.add(first.shifts[self.perm[i]], self.shifts[i]);
        }
        Similarity { perm, shifts }
    }

    pub fn inverse(&self, group: &Group) -> Similarity {
        let mut perm = [0usize; 3];
        for i in 0..3 {
            perm[self.perm[i]] = i;
        }
        let mut shifts = [Element(0); 3];
        for i in 0..3 {
            shifts[i] = group.neg(self.shifts[perm[i]]);
        }
        Similarity { perm, shifts }
    }

    fn shift_sum(&self, group: &Group) -> Element {
        group.add(group.add(self.shifts[0], self.shifts[1]), self.shifts[2])
    }
}

/// Apply a similarity; the result is again a trio with the same deficiency,
/// criticality, and maximality.
pub fn apply_similarity(t: &Trio, s: &Similarity) -> Result<Trio> {
    let g = t.group().clone();
    if !s.shift_sum(&g).is_identity() {
        return Err(Error::InvalidTag("similarity shifts must sum to zero".into()));
    }
    let u = t.universe_mask();
    let mut sets = [0u64; 3];
    for i in 0..3 {
        let m = t.set_mask(s.perm[i]);
        if s.shifts[i].index() != 0 && u >> s.shifts[i].index() & 1 == 0 {
            return Err(Error::InvalidTag("similarity shift outside universe".into()));
        }
        sets[i] = g.translate_mask(m, s.shifts[i]);
    }
    Trio::from_masks(g, u, sets[0], sets[1], sets[2])
}

/// Lemma 13 transform: (A, B ∪ R, C ∩ S) with S = complement(−(A+R)),
/// where R is the H-coset of `r`.  Requires (A,H) critical, R split by B,
/// and `t` critical.  Never decreases deficiency.
pub fn purify(t: &Trio, h: &Subgroup, r: Element) -> Result<Trio> {
    let g = t.group().clone();
    let u = t.universe_mask();
    let (a, b, c) = t.masks();
    if h.mask() & !u != 0 || u >> r.index() & 1 == 0 {
        return Err(Error::InvalidTag("H and R must lie inside the universe".into()));
    }
    if a == 0 {
        return Err(Error::EmptySet("purify A"));
    }
    let ah = g.sumset_mask(a, h.mask());
    let crit_ah = a.count_ones() as i64 + h.order() as i64 - ah.count_ones() as i64;
    if crit_ah <= 0 {
        return Err(Error::PairNotCritical);
    }
    if trio_deficiency(t) <= 0 {
        return Err(Error::TrioNotCritical);
    }
    let rcoset = g.translate_mask(h.mask(), r);
    if b & rcoset == 0 || rcoset & !b == 0 {
        return Err(Error::CosetNotSplit);
    }
    let s = u & !g.neg_mask(g.sumset_mask(a, rcoset));
    Trio::from_masks(g, u, a, b | rcoset, c & s)
}

/// Canonical representative of the similarity orbit: the lexicographically
/// least (A,B,C) mask triple over all 6 permutations and all shift pairs
/// (g1, g2, −g1−g2) with g1,g2 in the universe.
pub fn canonical_rep(t: &Trio) -> Trio {
    let g = t.group().clone();
    let u = t.universe_mask();
    let (a, b, c) = canonical_key(&g, u, t.masks());
    Trio::from_masks(g, u, a, b, c).expect("similarity preserves the trio property")
}

pub(crate) fn canonical_key(group: &Group, universe: u64, sets: (u64, u64, u64)) -> (u64, u64, u64) {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let arr = [sets.0, sets.1, sets.2];
    let elems: Vec<Element> = {
        let mut v = Vec::new();
        let mut m = universe;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            v.push(Element(i));
        }
        v
    };
    // per-set minimum translate with its argmin shifts
    let min_translate = |m: u64| -> (u64, Vec<Element>) {
        let mut best = u64::MAX;
        let mut args = Vec::new();
        for &e in &elems {
            let tm = group.translate_mask(m, e);
            if tm < best {
                best = tm;
                args.clear();
                args.push(e);
            } else if tm == best {
                args.push(e);
            }
        }
        (best, args)
    };
    let mut best: Option<(u64, u64, u64)> = None;
    for p in PERMS {
        let (s0, s1, s2) = (arr[p[0]], arr[p[1]], arr[p[2]]);
        let (a_min, g1s) = min_translate(s0);
        let (b_min, g2s) = min_translate(s1);
        let mut c_min = u64::MAX;
        for &g1 in &g1s {
            for &g2 in &g2s {
                let g3 = group.neg(group.add(g1, g2));
                let tm = group.translate_mask(s2, g3);
                if tm < c_min {
                    c_min = tm;
                }
            }
        }
        let cand = (a_min, b_min, c_min);
        if best.map_or(true, |b| cand < b) {
            best = Some(cand);
        }
    }
    best.unwrap()
}

/// Quotient of the trio's universe by a subgroup H of it.
pub(crate) fn universe_quotient(t: &Trio, h: u64) -> Result<QuotientMap> {
    QuotientMap::in_subgroup(t.group(), t.universe_mask(), h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set::parse_set;

    fn g(s: &str) -> Group {
        Group::parse(s).unwrap()
    }

    fn set(gr: &Group, s: &str) -> GroupSet {
        parse_set(gr, s).unwrap()
    }

    fn trio(gr: &Group, s: &str) -> Trio {
        parse_trio(gr, s).unwrap()
    }

    #[test]
    fn make_trio_examples() {
        let z6 = g("Z6");
        let t = make_trio(&set(&z6, "{0}"), &set(&z6, "{0,1}")).unwrap();
        assert_eq!(t.c().to_string(), "{1,2,3,4}");

        let z5 = g("Z5");
        let t = make_trio(&set(&z5, "{0,1}"), &set(&z5, "{0,1,2}")).unwrap();
        // brute-force oracle: −(A+B) = −{0,1,2,3} = {0,2,3,4}, complement {1}
        assert_eq!(t.c().to_string(), "{1}");

        let t = make_trio(&GroupSet::full(z6.clone()), &set(&z6, "{2}")).unwrap();
        assert!(t.c().is_empty());
        assert!(!t.is_nontrivial());

        assert!(make_trio(&set(&z6, "{}"), &set(&z6, "{0}")).is_err());
    }

    #[test]
    fn make_trio_c_is_maximal_third() {
        let z6 = g("Z6");
        for a in 1..64u64 {
            for b in 1..64u64 {
                let t = make_trio_masks(&z6, z6.full_mask(), a, b).unwrap();
                // no strictly larger third set keeps the trio property
                let (ta, tb, tc) = t.masks();
                for x in 0..6 {
                    if tc >> x & 1 == 0 {
                        assert!(
                            Trio::from_masks(z6.clone(), z6.full_mask(), ta, tb, tc | (1 << x))
                                .is_err()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn deficiency_examples() {
        let z6 = g("Z6");
        assert_eq!(trio_deficiency(&trio(&z6, "{0};{0,1};{1,2,3,4}")), 1);
        assert_eq!(trio_deficiency(&trio(&z6, "{0};{0,1};{1,2}")), -1);
        assert_eq!(trio_deficiency(&trio(&z6, "{};{};{}")), -6);
        // δ(A,B) = δ(A,B,C) for the completed trio
        let a = set(&z6, "{0,3}");
        let b = set(&z6, "{0,1}");
        let t = make_trio(&a, &b).unwrap();
        assert_eq!(
            trio_deficiency(&t),
            crate::setops::deficiency_pair(&a, &b).unwrap()
        );
    }

    #[test]
    fn maximality_examples() {
        let z6 = g("Z6");
        assert!(is_maximal(&trio(&z6, "{0,2};{0,1,3,5};{2}")));
        assert!(!is_maximal(&trio(&z6, "{0};{0,1};{1,2}")));
        assert!(is_maximal(&trio(&z6, "{0};{0,1};{1,2,3,4}")));
    }

    #[test]
    fn saturate_examples() {
        let z6 = g("Z6");
        let t = saturate(&trio(&z6, "{0};{0,1};{1,2}"));
        assert_eq!(t, trio(&z6, "{0};{0,1};{1,2,3,4}"));

        let m = trio(&z6, "{0,2};{0,1,3,5};{2}");
        assert_eq!(saturate(&m), m);

        let z8 = g("Z8");
        let m8 = trio(&z8, "{0,1,5};{0,1,5};{1,4,5}");
        assert!(is_maximal(&m8));
        assert_eq!(saturate(&m8), m8);
    }

    #[test]
    fn saturate_grows_and_is_idempotent() {
        let z8 = g("Z8");
        for a in 1..256u64 {
            for b in (1..256u64).step_by(3) {
                if let Ok(t) = make_trio_masks(&z8, z8.full_mask(), a, b) {
                    let s = saturate(&t);
                    let (sa, sb, sc) = s.masks();
                    let (ta, tb, tc) = t.masks();
                    assert_eq!(sa & ta, ta);
                    assert_eq!(sb & tb, tb);
                    assert_eq!(sc & tc, tc);
                    assert!(is_maximal(&s));
                    assert_eq!(saturate(&s), s);
                }
            }
        }
    }

    #[test]
    fn similarity_examples() {
        let z6 = g("Z6");
        let t = trio(&z6, "{0};{0,1};{1,2,3,4}");
        let swapped = apply_similarity(&t, &Similarity::permutation([1, 0, 2]).unwrap()).unwrap();
        assert_eq!(swapped, trio(&z6, "{0,1};{0};{1,2,3,4}"));

        let shifted = apply_similarity(&t, &Similarity::shift(&z6, Element(1))).unwrap();
        assert_eq!(shifted.a().to_string(), "{1}");
        assert_eq!(shifted.b().to_string(), "{0,5}");
        assert_eq!(trio_deficiency(&shifted), trio_deficiency(&t));

        assert_eq!(apply_similarity(&t, &Similarity::identity()).unwrap(), t);
    }

    #[test]
    fn similarity_compose_and_invert() {
        let z8 = g("Z8");
        let t = trio(&z8, "{0,1,5};{0,1,5};{1,4,5}");
        let s1 = Similarity::perm_shift(&z8, [2, 0, 1], Element(3)).unwrap();
        let s2 = Similarity::perm_shift(&z8, [1, 2, 0], Element(5)).unwrap();
        let via_compose = apply_similarity(&t, &s2.then_after(&s1, &z8)).unwrap();
        let via_steps = apply_similarity(&apply_similarity(&t, &s1).unwrap(), &s2).unwrap();
        assert_eq!(via_compose, via_steps);
        let back = apply_similarity(&via_steps, &s2.then_after(&s1, &z8).inverse(&z8)).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn purify_example() {
        let z6 = g("Z6");
        let t = trio(&z6, "{0,3};{0,1,3};{1,4}");
        let h = Subgroup::new(set(&z6, "{0,3}")).unwrap();
        let p = purify(&t, &h, Element(1)).unwrap();
        assert_eq!(p.a().to_string(), "{0,3}");
        assert_eq!(p.b().to_string(), "{0,1,3,4}");
        assert_eq!(p.c().to_string(), "{1,4}");
        assert_eq!(trio_deficiency(&t), 1);
        assert_eq!(trio_deficiency(&p), 2);

        // R fully inside B
        assert!(matches!(
            purify(&trio(&z6, "{0,3};{0,1,3,4};{1,4}"), &h, Element(1)),
            Err(Error::CosetNotSplit)
        ));
        // (A,H) not critical
        let h2 = Subgroup::new(set(&z6, "{0,2,4}")).unwrap();
        let t2 = trio(&z6, "{0,1};{0};{2,3}");
        assert!(matches!(
            purify(&t2, &h2, Element(1)),
            Err(Error::PairNotCritical)
        ));
    }

    #[test]
    fn canonical_rep_is_orbit_invariant() {
        let z8 = g("Z8");
        let t = trio(&z8, "{0,1,5};{0,1,5};{1,4,5}");
        let key = canonical_rep(&t);
        for p in [[0usize, 1, 2], [1, 2, 0], [2, 1, 0]] {
            for sh in 0..8 {
                let s = Similarity::perm_shift(&z8, p, Element(sh)).unwrap();
                let moved = apply_similarity(&t, &s).unwrap();
                assert_eq!(canonical_rep(&moved), key);
            }
        }
        // canonical rep is itself in the orbit and minimal
        let (ka, kb, kc) = key.masks();
        assert!((ka, kb, kc) <= t.masks());
    }
}
