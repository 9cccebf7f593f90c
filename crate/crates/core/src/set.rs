//! Subsets of a group's elements, stored as a single-word bitset.

use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::group::{Element, Group};

#[derive(Clone)]
pub struct GroupSet {
    group: Group,
    mask: u64,
}

impl PartialEq for GroupSet {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.mask == other.mask
    }
}

impl Eq for GroupSet {}

impl Hash for GroupSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.group.order().hash(state);
        self.mask.hash(state);
    }
}

impl fmt::Debug for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSet({}, {self})", self.group)
    }
}

impl GroupSet {
    pub fn empty(group: Group) -> Self {
        GroupSet { group, mask: 0 }
    }

    pub fn full(group: Group) -> Self {
        let mask = group.full_mask();
        GroupSet { group, mask }
    }

    pub fn singleton(group: Group, x: Element) -> Self {
        GroupSet {
            group,
            mask: 1u64 << x.index(),
        }
    }

    pub fn from_mask(group: Group, mask: u64) -> Result<Self> {
        if mask & !group.full_mask() != 0 {
            return Err(Error::ElementOutOfRange {
                index: 63 - mask.leading_zeros() as usize,
                order: group.order(),
            });
        }
        Ok(GroupSet { group, mask })
    }

    pub fn from_elements<I: IntoIterator<Item = usize>>(group: Group, iter: I) -> Result<Self> {
        let mut mask = 0u64;
        for i in iter {
            if i >= group.order() {
                return Err(Error::ElementOutOfRange {
                    index: i,
                    order: group.order(),
                });
            }
            mask |= 1u64 << i;
        }
        Ok(GroupSet { group, mask })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == self.group.full_mask()
    }

    pub fn contains(&self, x: Element) -> bool {
        self.mask >> x.index() & 1 != 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        let mut m = self.mask;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(Element(i))
            }
        })
    }

    pub fn min_element(&self) -> Option<Element> {
        if self.mask == 0 {
            None
        } else {
            Some(Element(self.mask.trailing_zeros() as usize))
        }
    }

    fn with_mask(&self, mask: u64) -> Self {
        GroupSet {
            group: self.group.clone(),
            mask,
        }
    }

    pub fn complement(&self) -> Self {
        self.with_mask(self.group.full_mask() & !self.mask)
    }

    pub fn union(&self, other: &GroupSet) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_mask(self.mask | other.mask))
    }

    pub fn intersection(&self, other: &GroupSet) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_mask(self.mask & other.mask))
    }

    pub fn difference(&self, other: &GroupSet) -> Result<Self> {
        self.check(other)?;
        Ok(self.with_mask(self.mask & !other.mask))
    }

    pub fn is_subset_of(&self, other: &GroupSet) -> bool {
        self.group == other.group && self.mask & !other.mask == 0
    }

    pub fn translate(&self, g: Element) -> Self {
        self.with_mask(self.group.translate_mask(self.mask, g))
    }

    pub fn neg(&self) -> Self {
        self.with_mask(self.group.neg_mask(self.mask))
    }

    pub(crate) fn check(&self, other: &GroupSet) -> Result<()> {
        if self.group == other.group {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }
}

impl fmt::Display for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, e) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e.index())?;
        }
        write!(f, "}}")
    }
}

/// Parse a set literal: `{e1,e2,...}` with bare indices or residue tuples
/// `(r1,...,rk)`, optionally prefixed by `~` for complement.
pub fn parse_set(group: &Group, s: &str) -> Result<GroupSet> {
    let s = s.trim();
    let (complement, body) = match s.strip_prefix('~') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let inner = body
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(|| Error::SetLiteral(format!("expected {{...}}, got {s:?}")))?;
    let mut mask = 0u64;
    for tok in split_top_level(inner) {
        let tok = tok.trim();
        if tok.is_empty() {
            continue;
        }
        let elem = if let Some(t) = tok.strip_prefix('(') {
            let t = t
                .strip_suffix(')')
                .ok_or_else(|| Error::SetLiteral(format!("unclosed tuple in {tok:?}")))?;
            let residues: Vec<u32> = t
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::SetLiteral(format!("bad residue in {tok:?}")))
                })
                .collect::<Result<_>>()?;
            group.encode(&residues)?
        } else {
            let i: usize = tok
                .parse()
                .map_err(|_| Error::SetLiteral(format!("bad element {tok:?}")))?;
            group.element(i)?
        };
        mask |= 1u64 << elem.index();
    }
    let mask = if complement {
        group.full_mask() & !mask
    } else {
        mask
    };
    GroupSet::from_mask(group.clone(), mask)
}

/// Split on commas that are not inside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}
