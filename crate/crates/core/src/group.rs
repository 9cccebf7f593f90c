//! Finite abelian groups presented as direct sums of cyclic factors, with
//! dense element indexing so that subsets are single-word bitsets.
//!
//! Indexing is mixed-radix, little-endian in factor order: the element with
//! residues (r1,...,rk) over factors (n1,...,nk) has index
//! r1 + n1*(r2 + n2*(...)).  Index 0 is the identity.  The group order is
//! capped at 64 so every subset fits in a `u64`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::set::GroupSet;

/// Largest supported group order (one bitset word).
pub const MAX_ORDER: usize = 64;

/// An ordered list of cyclic factor orders.  Empty list = trivial group.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupSpec {
    factors: Vec<u32>,
}

impl GroupSpec {
    pub fn new(factors: Vec<u32>) -> Result<Self> {
        if factors.iter().any(|&n| n < 2) {
            return Err(Error::InvalidGroupSpec(
                "every cyclic factor must have order at least 2".into(),
            ));
        }
        Ok(GroupSpec { factors })
    }

    pub fn trivial() -> Self {
        GroupSpec { factors: Vec::new() }
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&n| n as u128).product()
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    /// Grammar: `Z<n>` atoms joined by `x`, case-insensitive, no whitespace.
    /// `Z1` (or the empty string) denotes the trivial group.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.eq_ignore_ascii_case("z1") {
            return Ok(GroupSpec::trivial());
        }
        let mut factors = Vec::new();
        for atom in s.split(['x', 'X']) {
            let rest = atom
                .strip_prefix('Z')
                .or_else(|| atom.strip_prefix('z'))
                .ok_or_else(|| Error::InvalidGroupSpec(format!("bad atom {atom:?} in {s:?}")))?;
            let n: u32 = rest
                .parse()
                .map_err(|_| Error::InvalidGroupSpec(format!("bad atom {atom:?} in {s:?}")))?;
            if n < 2 {
                return Err(Error::InvalidGroupSpec(format!(
                    "cyclic factor {n} too small in {s:?}"
                )));
            }
            factors.push(n);
        }
        Ok(GroupSpec { factors })
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "Z1");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A group element, identified by its dense index.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Element(pub(crate) usize);

impl Element {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct GroupData {
    spec: GroupSpec,
    order: usize,
    strides: Vec<usize>,
    full_mask: u64,
    neg: Vec<u8>,
}

/// A finite abelian group.  Cheap to clone; all state immutable.
#[derive(Clone)]
pub struct Group(Arc<GroupData>);

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for Group {}

impl std::hash::Hash for Group {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.spec.hash(state);
    }
}

impl fmt::Debug for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Group({})", self.0.spec)
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.spec)
    }
}

impl Group {
    pub fn new(spec: GroupSpec) -> Result<Self> {
        let order = spec.order();
        if order > MAX_ORDER as u128 {
            return Err(Error::OrderTooLarge {
                order,
                max: MAX_ORDER,
            });
        }
        let order = order as usize;
        let mut strides = Vec::with_capacity(spec.factors.len());
        let mut s = 1usize;
        for &n in &spec.factors {
            strides.push(s);
            s *= n as usize;
        }
        let full_mask = if order == 64 { !0u64 } else { (1u64 << order) - 1 };
        let mut neg = vec![0u8; order];
        for i in 0..order {
            let mut x = i;
            let mut r = 0usize;
            for (f, &n) in spec.factors.iter().enumerate() {
                let n = n as usize;
                let d = x % n;
                x /= n;
                let nd = if d == 0 { 0 } else { n - d };
                r += nd * strides[f];
            }
            neg[i] = r as u8;
        }
        Ok(Group(Arc::new(GroupData {
            spec,
            order,
            strides,
            full_mask,
            neg,
        })))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Group::new(s.parse()?)
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.0.spec
    }

    pub fn order(&self) -> usize {
        self.0.order
    }

    pub fn full_mask(&self) -> u64 {
        self.0.full_mask
    }

    pub fn identity(&self) -> Element {
        Element(0)
    }

    pub fn element(&self, index: usize) -> Result<Element> {
        if index < self.0.order {
            Ok(Element(index))
        } else {
            Err(Error::ElementOutOfRange {
                index,
                order: self.0.order,
            })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> {
        (0..self.0.order).map(Element)
    }

    pub fn decode(&self, x: Element) -> Vec<u32> {
        let mut i = x.0;
        let mut out = Vec::with_capacity(self.0.spec.factors.len());
        for &n in &self.0.spec.factors {
            out.push((i % n as usize) as u32);
            i /= n as usize;
        }
        out
    }

    pub fn encode(&self, residues: &[u32]) -> Result<Element> {
        if residues.len() != self.0.spec.factors.len() {
            return Err(Error::InvalidGroupSpec(format!(
                "tuple has {} components, group has {} factors",
                residues.len(),
                self.0.spec.factors.len()
            )));
        }
        let mut i = 0usize;
        for (f, (&r, &n)) in residues.iter().zip(&self.0.spec.factors).enumerate() {
            if r >= n {
                return Err(Error::ElementOutOfRange {
                    index: r as usize,
                    order: n as usize,
                });
            }
            i += r as usize * self.0.strides[f];
        }
        Ok(Element(i))
    }

    pub fn add(&self, x: Element, y: Element) -> Element {
        debug_assert!(x.0 < self.0.order && y.0 < self.0.order);
        let mut a = x.0;
        let mut b = y.0;
        let mut r = 0usize;
        for (f, &n) in self.0.spec.factors.iter().enumerate() {
            let n = n as usize;
            let s = (a % n + b % n) % n;
            a /= n;
            b /= n;
            r += s * self.0.strides[f];
        }
        Element(r)
    }

    pub fn neg(&self, x: Element) -> Element {
        debug_assert!(x.0 < self.0.order);
        Element(self.0.neg[x.0] as usize)
    }

    pub fn sub(&self, x: Element, y: Element) -> Element {
        self.add(x, self.neg(y))
    }

    /// Translate a bitset by `g`: `{ g + x : x in mask }`.
    ///
    /// Adding g decomposes into independent per-factor rotations.  Factor f
    /// with stride s and order n partitions the index space into aligned
    /// blocks of s*n bits; adding digit d rotates each block left by d*s bits.
    pub fn translate_mask(&self, mask: u64, g: Element) -> u64 {
        debug_assert!(g.0 < self.0.order);
        let mut m = mask;
        let mut gi = g.0;
        for (f, &n) in self.0.spec.factors.iter().enumerate() {
            let n = n as usize;
            let d = gi % n;
            gi /= n;
            if d == 0 {
                continue;
            }
            let s = self.0.strides[f];
            let b = s * n;
            let shift = (d * s) as u32;
            if b == 64 {
                m = m.rotate_left(shift);
            } else {
                let block_mask = (1u64 << b) - 1;
                let mut out = 0u64;
                let mut off = 0u32;
                while (off as usize) < self.0.order {
                    let blk = (m >> off) & block_mask;
                    let rot = ((blk << shift) | (blk >> (b as u32 - shift))) & block_mask;
                    out |= rot << off;
                    off += b as u32;
                }
                m = out;
            }
        }
        m
    }

    /// `{ -x : x in mask }`.
    pub fn neg_mask(&self, mask: u64) -> u64 {
        let mut out = 0u64;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= 1u64 << self.0.neg[i];
        }
        out
    }

    /// `{ a + b : a in am, b in bm }`, word-parallel over the smaller operand.
    pub fn sumset_mask(&self, am: u64, bm: u64) -> u64 {
        let (mut small, large) = if am.count_ones() <= bm.count_ones() {
            (am, bm)
        } else {
            (bm, am)
        };
        let mut out = 0u64;
        while small != 0 {
            let i = small.trailing_zeros() as usize;
            small &= small - 1;
            out |= self.translate_mask(large, Element(i));
        }
        out
    }

    /// Smallest subgroup containing the elements of `mask`.
    pub fn span_mask(&self, mask: u64) -> u64 {
        let mut h = 1u64 | mask | self.neg_mask(mask);
        loop {
            let next = self.sumset_mask(h, h);
            if next == h {
                return h;
            }
            h = next;
        }
    }

    pub fn is_subgroup_mask(&self, mask: u64) -> bool {
        mask & 1 != 0 && self.span_mask(mask) == mask
    }
}

/// A subgroup, stored as an element subset of the ambient group.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subgroup {
    pub members: GroupSet,
}

impl Subgroup {
    pub fn new(members: GroupSet) -> Result<Self> {
        if !members.group().is_subgroup_mask(members.mask()) {
            return Err(Error::NotASubgroup);
        }
        Ok(Subgroup { members })
    }

    pub fn trivial(group: &Group) -> Self {
        Subgroup {
            members: GroupSet::from_mask(group.clone(), 1).unwrap(),
        }
    }

    pub fn whole(group: &Group) -> Self {
        Subgroup {
            members: GroupSet::from_mask(group.clone(), group.full_mask()).unwrap(),
        }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn group(&self) -> &Group {
        self.members.group()
    }

    pub fn mask(&self) -> u64 {
        self.members.mask()
    }

    pub fn contains(&self, x: Element) -> bool {
        self.members.contains(x)
    }
}

impl fmt::Display for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.members)
    }
}

/// Every subgroup of `group`, sorted by (order, member bitset).
///
/// Breadth-first closure: extend each known subgroup by one outside element,
/// close under addition, deduplicate by bitset.
pub fn enumerate_subgroups(group: &Group) -> Vec<Subgroup> {
    let mut seen: Vec<u64> = vec![1u64];
    let mut frontier: Vec<u64> = vec![1u64];
    while let Some(h) = frontier.pop() {
        let mut outside = group.full_mask() & !h;
        while outside != 0 {
            let g = outside.trailing_zeros() as usize;
            outside &= outside - 1;
            let bigger = group.span_mask(h | (1u64 << g));
            if !seen.contains(&bigger) {
                seen.push(bigger);
                frontier.push(bigger);
            }
        }
    }
    seen.sort_by_key(|&m| (m.count_ones(), m));
    seen.into_iter()
        .map(|m| Subgroup {
            members: GroupSet::from_mask(group.clone(), m).unwrap(),
        })
        .collect()
}

/// Subgroups of the subgroup `universe`, sorted by (order, bitset).
pub(crate) fn subgroup_masks_within(group: &Group, universe: u64) -> Vec<u64> {
    enumerate_subgroups(group)
        .into_iter()
        .map(|h| h.mask())
        .filter(|&h| h & !universe == 0)
        .collect()
}

/// Coset id for elements of `universe` under a kernel subgroup, with
/// quotient arithmetic on the ids.
pub struct QuotientMap {
    group: Group,
    universe: u64,
    kernel: u64,
    coset_of: Vec<usize>,
    reps: Vec<Element>,
    add: Vec<usize>,
    neg: Vec<usize>,
    generators: Vec<usize>,
}

pub type CosetId = usize;

impl QuotientMap {
    /// Quotient of the whole group by `kernel`.
    pub fn new(group: &Group, kernel: &Subgroup) -> Result<Self> {
        QuotientMap::in_subgroup(group, group.full_mask(), kernel.mask())
    }

    /// Quotient U/H where H <= U <= G are subgroups given as masks.
    pub(crate) fn in_subgroup(group: &Group, universe: u64, kernel: u64) -> Result<Self> {
        if !group.is_subgroup_mask(universe) || !group.is_subgroup_mask(kernel) {
            return Err(Error::NotASubgroup);
        }
        if kernel & !universe != 0 {
            return Err(Error::NotASubgroup);
        }
        let order = group.order();
        let mut coset_of = vec![usize::MAX; order];
        let mut reps: Vec<Element> = Vec::new();
        let mut u = universe;
        while u != 0 {
            let i = u.trailing_zeros() as usize;
            // cosets are claimed in index order, so rep is the least element
            let coset = group.translate_mask(kernel, Element(i));
            let id = reps.len();
            reps.push(Element(i));
            let mut c = coset;
            while c != 0 {
                let j = c.trailing_zeros() as usize;
                c &= c - 1;
                coset_of[j] = id;
            }
            u &= !coset;
        }
        let q = reps.len();
        let mut add = vec![0usize; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = coset_of[group.add(reps[i], reps[j]).0];
            }
        }
        let mut neg = vec![0usize; q];
        for i in 0..q {
            neg[i] = coset_of[group.neg(reps[i]).0];
        }
        let mut generators = Vec::new();
        for r in 0..q {
            let mut seen = vec![false; q];
            let mut x = 0usize; // identity coset has id 0 (rep is least elem of kernel)
            let mut count = 0;
            loop {
                if seen[x] {
                    break;
                }
                seen[x] = true;
                count += 1;
                x = add[x * q + r];
            }
            if count == q {
                generators.push(r);
            }
        }
        Ok(QuotientMap {
            group: group.clone(),
            universe,
            kernel,
            coset_of,
            reps,
            add,
            neg,
            generators,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn universe_mask(&self) -> u64 {
        self.universe
    }

    pub fn kernel_mask(&self) -> u64 {
        self.kernel
    }

    pub fn kernel_order(&self) -> usize {
        self.kernel.count_ones() as usize
    }

    pub fn num_cosets(&self) -> usize {
        self.reps.len()
    }

    pub fn coset_id(&self, x: Element) -> Option<CosetId> {
        match self.coset_of[x.0] {
            usize::MAX => None,
            id => Some(id),
        }
    }

    /// Least element of the coset.
    pub fn rep(&self, id: CosetId) -> Element {
        self.reps[id]
    }

    pub fn coset_mask(&self, id: CosetId) -> u64 {
        self.group.translate_mask(self.kernel, self.reps[id])
    }

    pub fn add_cosets(&self, i: CosetId, j: CosetId) -> CosetId {
        self.add[i * self.reps.len() + j]
    }

    pub fn neg_coset(&self, i: CosetId) -> CosetId {
        self.neg[i]
    }

    pub fn is_cyclic(&self) -> bool {
        !self.generators.is_empty()
    }

    pub fn generators(&self) -> &[CosetId] {
        &self.generators
    }

    /// Ids of the cosets meeting `mask`.
    pub fn cosets_meeting(&self, mask: u64) -> Vec<CosetId> {
        let mut hit = vec![false; self.reps.len()];
        let mut m = mask & self.universe;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            hit[self.coset_of[i]] = true;
        }
        (0..self.reps.len()).filter(|&i| hit[i]).collect()
    }

    /// Discrete logs base `r`: dlog[c] = i with c = i*r.  Errors if `r` does
    /// not generate the quotient.
    pub fn dlogs(&self, r: CosetId) -> Result<Vec<usize>> {
        let q = self.reps.len();
        if !self.generators.contains(&r) {
            return Err(if self.generators.is_empty() {
                Error::QuotientNotCyclic
            } else {
                Error::NotAGenerator
            });
        }
        let mut dlog = vec![0usize; q];
        let mut x = 0usize;
        for i in 0..q {
            dlog[x] = i;
            x = self.add[x * q + r];
        }
        Ok(dlog)
    }
}
