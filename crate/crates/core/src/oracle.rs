//! Brute-force enumeration and theorem-checking harness: generates every
//! maximal critical trio of small groups, re-checks each theorem statement
//! over its full quantifier domain, and builds the structure atlas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classify::{decompose, find_structure, StructureKind, ALL_KINDS};
use crate::error::{Error, Result};
use crate::group::{enumerate_subgroups, Group, GroupSpec, QuotientMap, Subgroup};
use crate::set::GroupSet;
use crate::setops::{
    closure_subgroup_mask, deficiency_set, is_sidon, kneser_gap_mask, sequence_profile_in,
    stabilizer_mask,
};
use crate::trio::{canonical_key, purify, saturate, trio_deficiency, Trio};

pub const DEFAULT_EXHAUSTIVE_BOUND: usize = 12;

/// Group-order ceiling for exhaustive enumeration, overridable via the
/// KK_MAX_EXHAUSTIVE environment variable.
pub fn exhaustive_bound() -> usize {
    std::env::var("KK_MAX_EXHAUSTIVE")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_EXHAUSTIVE_BOUND)
}

fn check_bound(group: &Group, bound: usize) -> Result<()> {
    if group.order() > bound {
        return Err(Error::BoundExceeded {
            order: group.order(),
            bound,
        });
    }
    Ok(())
}

/// All nontrivial maximal critical trios of the group, each exactly once
/// (up to similarity orbit when `dedup` is set), sorted by set bitsets.
///
/// Every maximal critical trio (A,B,C) satisfies C = comp(-(A+B)) and
/// δ(A,B) = δ(A,B,C) > 0, so it is regenerated from its own (A,B) pair;
/// scanning all pairs with positive deficiency is therefore complete.
pub fn enumerate_maximal_critical_trios(group: &Group, dedup: bool) -> Result<Vec<Trio>> {
    check_bound(group, exhaustive_bound())?;
    let full = group.full_mask();
    let a_masks: Vec<u64> = (1..=full).collect();
    let mut keys: Vec<(u64, u64, u64)> = a_masks
        .par_iter()
        .flat_map_iter(|&a| {
            let g = group.clone();
            let mut local = Vec::new();
            for b in 1..=full {
                let s = g.sumset_mask(a, b);
                if (a.count_ones() + b.count_ones()) as i64 <= s.count_ones() as i64 {
                    continue;
                }
                let c = full & !g.neg_mask(s);
                if c == 0 {
                    continue;
                }
                let t = Trio::from_masks(g.clone(), full, a, b, c).expect("valid by construction");
                let t = saturate(&t);
                if t.is_nontrivial() && t.is_critical() && crate::trio::is_maximal(&t) {
                    let m = t.masks();
                    local.push(if dedup {
                        canonical_key(&g, full, m)
                    } else {
                        m
                    });
                }
            }
            local
        })
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.into_iter()
        .map(|(a, b, c)| Trio::from_masks(group.clone(), full, a, b, c))
        .collect()
}

/// Independent second enumerator used to cross-check the pair-based scan:
/// walks all (A,B,C) triples directly and filters.  Cubic in 2^|G|, so
/// capped at order 6.
pub fn enumerate_trios_direct(group: &Group) -> Result<Vec<Trio>> {
    check_bound(group, 6)?;
    let full = group.full_mask();
    let mut out = Vec::new();
    for a in 1..=full {
        for b in 1..=full {
            let s = group.sumset_mask(a, b);
            for c in 1..=full {
                if group.sumset_mask(s, c) & 1 != 0 {
                    continue;
                }
                let t = Trio::from_masks(group.clone(), full, a, b, c)?;
                if t.is_critical() && crate::trio::is_maximal(&t) {
                    out.push(t);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TheoremId {
    CauchyDavenport,
    Kneser,
    KneserV2,
    Vosper,
    Kemperman,
    Mann,
    Purification,
    PurePairProp,
    MaximalTrioProp,
    BeatStability,
    ChordStability,
}

pub const ALL_THEOREMS: [TheoremId; 11] = [
    TheoremId::CauchyDavenport,
    TheoremId::Kneser,
    TheoremId::KneserV2,
    TheoremId::Vosper,
    TheoremId::Kemperman,
    TheoremId::Mann,
    TheoremId::Purification,
    TheoremId::PurePairProp,
    TheoremId::MaximalTrioProp,
    TheoremId::BeatStability,
    TheoremId::ChordStability,
];

impl TheoremId {
    pub fn label(self) -> &'static str {
        match self {
            TheoremId::CauchyDavenport => "cauchy-davenport",
            TheoremId::Kneser => "kneser",
            TheoremId::KneserV2 => "kneser-v2",
            TheoremId::Vosper => "vosper",
            TheoremId::Kemperman => "kemperman",
            TheoremId::Mann => "mann",
            TheoremId::Purification => "purification",
            TheoremId::PurePairProp => "pure-pair-prop",
            TheoremId::MaximalTrioProp => "maximal-trio-prop",
            TheoremId::BeatStability => "beat-stability",
            TheoremId::ChordStability => "chord-stability",
        }
    }

    pub fn from_label(s: &str) -> Result<Self> {
        ALL_THEOREMS
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

impl std::fmt::Display for TheoremId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub what: String,
    pub repro: String,
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub theorem: String,
    pub group: GroupSpec,
    pub instances: u64,
    pub violations: Vec<Violation>,
    pub wall: std::time::Duration,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Line-delimited record text: one line per violation plus a summary
    /// record.  Deliberately excludes wall time so repeated runs are
    /// byte-identical.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for v in &self.violations {
            s.push_str(&format!(
                "violation: theorem={} group={} {} | repro: {}\n",
                self.theorem, self.group, v.what, v.repro
            ));
        }
        s.push_str(&format!(
            "summary: theorem={} group={} instances={} violations={} status={}\n",
            self.theorem,
            self.group,
            self.instances,
            self.violations.len(),
            if self.passed() { "pass" } else { "fail" }
        ));
        s
    }
}

fn is_prime(n: usize) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn domain_err(group: &Group, id: TheoremId, reason: &str) -> Error {
    Error::TheoremDomain {
        id: id.label().to_string(),
        group: group.spec().to_string(),
        reason: reason.to_string(),
    }
}

fn set_lit(group: &Group, mask: u64) -> String {
    GroupSet::from_mask(group.clone(), mask).unwrap().to_string()
}

fn trio_lit(t: &Trio) -> String {
    t.to_string()
}

fn pair_repro(group: &Group, a: u64, b: u64) -> String {
    format!(
        "kk sumset -g {} \"{}\" \"{}\"",
        group,
        set_lit(group, a),
        set_lit(group, b)
    )
}

fn trio_repro(group: &Group, t: &Trio) -> String {
    format!("kk classify -g {} \"{}\" --all", group, trio_lit(t))
}

/// Exhaustively (or, for sampled modes, pseudo-randomly with the given
/// seed) re-check one theorem statement over this group.
pub fn check_theorem(group: &Group, id: TheoremId, seed: u64) -> Result<TheoremReport> {
    let start = std::time::Instant::now();
    let (instances, violations) = match id {
        TheoremId::CauchyDavenport => check_cauchy_davenport(group, id)?,
        TheoremId::Kneser => check_kneser(group, seed)?,
        TheoremId::KneserV2 => check_kneser_v2(group)?,
        TheoremId::Vosper => check_vosper(group, id)?,
        TheoremId::Kemperman => check_kemperman(group)?,
        TheoremId::Mann => check_mann(group, id)?,
        TheoremId::Purification => check_purification(group, seed)?,
        TheoremId::PurePairProp => check_pure_pair_prop(group, id)?,
        TheoremId::MaximalTrioProp => check_maximal_trio_prop(group, id)?,
        TheoremId::BeatStability => check_beat_stability(group)?,
        TheoremId::ChordStability => check_chord_stability(group)?,
    };
    Ok(TheoremReport {
        theorem: id.label().to_string(),
        group: group.spec().clone(),
        instances,
        violations,
        wall: start.elapsed(),
    })
}

type CheckOutcome = (u64, Vec<Violation>);

/// |A+B| >= min(p, |A|+|B|-1) over all nonempty pairs in Z/p.
fn check_cauchy_davenport(group: &Group, id: TheoremId) -> Result<CheckOutcome> {
    let p = group.order();
    if !is_prime(p) || group.spec().factors().len() != 1 {
        return Err(domain_err(group, id, "requires a cyclic group of prime order"));
    }
    let full = group.full_mask();
    let results: Vec<Violation> = (1..=full)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut local = Vec::new();
            for b in 1..=full {
                let s = group.sumset_mask(a, b);
                let bound = (p as i64).min(a.count_ones() as i64 + b.count_ones() as i64 - 1);
                if (s.count_ones() as i64) < bound {
                    local.push(Violation {
                        what: format!(
                            "|A+B|={} < min(p,|A|+|B|-1)={} for A={} B={}",
                            s.count_ones(),
                            bound,
                            set_lit(group, a),
                            set_lit(group, b)
                        ),
                        repro: pair_repro(group, a, b),
                    });
                }
            }
            local
        })
        .collect();
    Ok(((full * full) as u64, results))
}

/// Kneser's bound |A+B| >= |A+H|+|B+H|-|H| with H = stab(A+B), with
/// equality whenever the pair is critical.  Exhaustive through order 10,
/// 10^5 seeded random pairs beyond.
fn check_kneser(group: &Group, seed: u64) -> Result<CheckOutcome> {
    let full = group.full_mask();
    let check = |a: u64, b: u64| -> Option<Violation> {
        let gap = kneser_gap_mask(group, a, b);
        let s = group.sumset_mask(a, b);
        let critical = (a.count_ones() + b.count_ones()) as i64 > s.count_ones() as i64;
        if gap < 0 || (critical && gap != 0) {
            Some(Violation {
                what: format!(
                    "kneser gap {} (critical={}) for A={} B={}",
                    gap,
                    critical,
                    set_lit(group, a),
                    set_lit(group, b)
                ),
                repro: pair_repro(group, a, b),
            })
        } else {
            None
        }
    };
    if group.order() <= 10 {
        let violations: Vec<Violation> = (1..=full)
            .into_par_iter()
            .flat_map_iter(|a| {
                let check = &check;
                (1..=full).filter_map(move |b| check(a, b))
            })
            .collect();
        Ok(((full * full) as u64, violations))
    } else {
        const TRIALS: u64 = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut violations = Vec::new();
        let draw = |rng: &mut ChaCha8Rng| loop {
            let m = rng.gen::<u64>() & full;
            if m != 0 {
                return m;
            }
        };
        for _ in 0..TRIALS {
            let a = draw(&mut rng);
            let b = draw(&mut rng);
            if let Some(v) = check(a, b) {
                violations.push(v);
            }
        }
        Ok((TRIALS, violations))
    }
}

/// Kneser version II: every nontrivial maximal critical trio has
/// G_A = G_B = G_C and deficiency exactly |G_A|.
fn check_kneser_v2(group: &Group) -> Result<CheckOutcome> {
    let trios = enumerate_maximal_critical_trios(group, false)?;
    let violations: Vec<Violation> = trios
        .par_iter()
        .filter_map(|t| {
            let (a, b, c) = t.masks();
            let sa = stabilizer_mask(group, a);
            let sb = stabilizer_mask(group, b);
            let sc = stabilizer_mask(group, c);
            if sa != sb || sb != sc || trio_deficiency(t) != sa.count_ones() as i64 {
                Some(Violation {
                    what: format!(
                        "stabilizers {}/{}/{} with deficiency {} for {}",
                        set_lit(group, sa),
                        set_lit(group, sb),
                        set_lit(group, sc),
                        trio_deficiency(t),
                        trio_lit(t)
                    ),
                    repro: trio_repro(group, t),
                })
            } else {
                None
            }
        })
        .collect();
    Ok((trios.len() as u64, violations))
}

fn is_progression(mask: u64, r: usize, p: usize) -> bool {
    // walk from the unique start (an element whose predecessor is absent)
    let k = mask.count_ones() as usize;
    if k == p {
        return true;
    }
    let mut start = None;
    let mut m = mask;
    while m != 0 {
        let x = m.trailing_zeros() as usize;
        m &= m - 1;
        if mask & (1u64 << ((x + p - r) % p)) == 0 {
            start = Some(x);
            break;
        }
    }
    let mut x = match start {
        Some(x) => x,
        None => return false,
    };
    for _ in 0..k {
        if mask & (1u64 << x) == 0 {
            return false;
        }
        x = (x + r) % p;
    }
    true
}

/// Vosper version II: every nontrivial critical trio in Z/p has a
/// singleton member or consists of three arithmetic progressions with a
/// common difference.  By Cauchy-Davenport every such trio arises as
/// (A, B, comp(-(A+B))) from a critical pair with A+B != G, so scanning
/// pairs covers the full quantifier domain.
fn check_vosper(group: &Group, id: TheoremId) -> Result<CheckOutcome> {
    let p = group.order();
    if !is_prime(p) || group.spec().factors().len() != 1 {
        return Err(domain_err(group, id, "requires a cyclic group of prime order"));
    }
    let full = group.full_mask();
    let results: Vec<(u64, Vec<Violation>)> = (1..=full)
        .into_par_iter()
        .map(|a| {
            let mut local = Vec::new();
            let mut count = 0u64;
            for b in 1..=full {
                let s = group.sumset_mask(a, b);
                if s == full || (a.count_ones() + b.count_ones()) as i64 <= s.count_ones() as i64 {
                    continue;
                }
                let c = full & !group.neg_mask(s);
                count += 1;
                let min_size = a.count_ones().min(b.count_ones()).min(c.count_ones());
                if min_size == 1 {
                    continue;
                }
                let common_difference = (1..p).any(|r| {
                    is_progression(a, r, p) && is_progression(b, r, p) && is_progression(c, r, p)
                });
                if !common_difference {
                    let t = Trio::from_masks(group.clone(), full, a, b, c).unwrap();
                    local.push(Violation {
                        what: format!("neither outcome of Vosper II holds for {}", trio_lit(&t)),
                        repro: trio_repro(group, &t),
                    });
                }
            }
            (count, local)
        })
        .collect();
    let instances = results.iter().map(|(c, _)| c).sum();
    let violations = results.into_iter().flat_map(|(_, v)| v).collect();
    Ok((instances, violations))
}

/// Kemperman: every nontrivial maximal critical trio decomposes into a
/// certificate that independently re-verifies.
fn check_kemperman(group: &Group) -> Result<CheckOutcome> {
    let trios = enumerate_maximal_critical_trios(group, false)?;
    let violations: Vec<Violation> = trios
        .par_iter()
        .filter_map(|t| {
            let fail = match decompose(t) {
                Err(e) => Some(format!("decompose failed: {e}")),
                Ok(cert) => match crate::classify::verify_certificate(&cert) {
                    crate::classify::Verdict::Ok => None,
                    v => Some(format!("certificate rejected: {v}")),
                },
            };
            fail.map(|what| Violation {
                what: format!("{what} for {}", trio_lit(t)),
                repro: format!("kk decompose -g {} \"{}\"", group, trio_lit(t)),
            })
        })
        .collect();
    Ok((trios.len() as u64, violations))
}

/// Mann: the subgroup-maximizing deficiency of a set equals the maximum
/// over all nonempty B with A+B != G.  Brute force, capped at order 8.
fn check_mann(group: &Group, id: TheoremId) -> Result<CheckOutcome> {
    if group.order() > 8 {
        return Err(domain_err(group, id, "brute-force partner scan capped at order 8"));
    }
    let full = group.full_mask();
    let violations: Vec<Violation> = (1..full)
        .into_par_iter()
        .filter_map(|a| {
            let mut best: Option<i64> = None;
            for b in 1..=full {
                let s = group.sumset_mask(a, b);
                if s == full {
                    continue;
                }
                let d = (a.count_ones() + b.count_ones()) as i64 - s.count_ones() as i64;
                best = Some(best.map_or(d, |x| x.max(d)));
            }
            let brute = best.expect("singleton partner always avoids G");
            let set = GroupSet::from_mask(group.clone(), a).unwrap();
            let (via_subgroups, _) = deficiency_set(&set).unwrap();
            if brute != via_subgroups {
                Some(Violation {
                    what: format!(
                        "delta(A) brute={brute} subgroup-max={via_subgroups} for A={}",
                        set_lit(group, a)
                    ),
                    repro: format!("kk deficiency -g {} \"{}\"", group, set_lit(group, a)),
                })
            } else {
                None
            }
        })
        .collect();
    Ok(((full - 1) as u64, violations))
}

/// Purification (Lemma 13): on seeded precondition-satisfying instances,
/// the purified triple is again a trio and deficiency never decreases.
fn check_purification(group: &Group, seed: u64) -> Result<CheckOutcome> {
    const MAX_ATTEMPTS: u64 = 40_000;
    const TARGET: u64 = 10_000;
    let full = group.full_mask();
    let subgroups: Vec<Subgroup> = enumerate_subgroups(group)
        .into_iter()
        .filter(|h| h.order() > 1 && h.mask() != full)
        .collect();
    if subgroups.is_empty() {
        return Ok((0, Vec::new()));
    }
    let quotients: Vec<QuotientMap> = subgroups
        .iter()
        .map(|h| QuotientMap::new(group, h).unwrap())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = 0u64;
    let mut violations = Vec::new();
    for _ in 0..MAX_ATTEMPTS {
        if instances >= TARGET {
            break;
        }
        let hi = rng.gen_range(0..subgroups.len());
        let h = &subgroups[hi];
        let q = &quotients[hi];
        let hm = h.mask();
        let hsize = h.order() as u32;
        // a union of H-cosets with fewer than |H| points deleted keeps
        // (A,H) critical
        let near_stable = |rng: &mut ChaCha8Rng| -> u64 {
            let mut m = 0u64;
            for cid in 0..q.num_cosets() {
                if rng.gen_bool(0.5) {
                    m |= q.coset_mask(cid);
                }
            }
            if m == 0 {
                m = q.coset_mask(rng.gen_range(0..q.num_cosets()));
            }
            for _ in 0..rng.gen_range(0..hsize) {
                let bit = rng.gen_range(0..64);
                let cand = m & !(1u64 << bit);
                if cand != 0 {
                    m = cand;
                }
            }
            m
        };
        let a = near_stable(&mut rng);
        if a.count_ones() + hsize <= group.sumset_mask(a, hm).count_ones() {
            continue; // the deletions emptied a coset; (A,H) not critical
        }
        let b = near_stable(&mut rng);
        // R must split B
        let split: Vec<usize> = (0..q.num_cosets())
            .filter(|&cid| {
                let cm = q.coset_mask(cid);
                b & cm != 0 && b & cm != cm
            })
            .collect();
        if split.is_empty() {
            continue;
        }
        let r = q.rep(split[rng.gen_range(0..split.len())]);
        let s = group.sumset_mask(a, b);
        let c = full & !group.neg_mask(s);
        if c == 0 {
            continue;
        }
        let t = Trio::from_masks(group.clone(), full, a, b, c).expect("valid by construction");
        if !t.is_critical() {
            continue;
        }
        instances += 1;
        match purify(&t, h, r) {
            Err(e) => violations.push(Violation {
                what: format!("purify failed ({e}) for {} with H={} R={r}", trio_lit(&t), h.members),
                repro: format!(
                    "kk trio -g {} \"{}\" \"{}\"",
                    group,
                    set_lit(group, a),
                    set_lit(group, b)
                ),
            }),
            Ok(p) => {
                if trio_deficiency(&p) < trio_deficiency(&t) {
                    violations.push(Violation {
                        what: format!(
                            "deficiency dropped {} -> {} purifying {} with H={} R={r}",
                            trio_deficiency(&t),
                            trio_deficiency(&p),
                            trio_lit(&t),
                            h.members
                        ),
                        repro: format!(
                            "kk trio -g {} \"{}\" \"{}\"",
                            group,
                            set_lit(group, a),
                            set_lit(group, b)
                        ),
                    });
                }
            }
        }
    }
    Ok((instances, violations))
}

fn is_pure_critical(group: &Group, a: u64, b: u64) -> bool {
    let s = group.sumset_mask(a, b);
    (a.count_ones() + b.count_ones()) as i64 > s.count_ones() as i64
        && stabilizer_mask(group, a) == stabilizer_mask(group, s)
        && stabilizer_mask(group, b) == stabilizer_mask(group, s)
}

/// The section-2 proposition: a nontrivial pair is critical iff it sits
/// inside a pure critical superpair missing fewer than |H| elements.
/// Both directions checked constructively; capped at order 8.
fn check_pure_pair_prop(group: &Group, id: TheoremId) -> Result<CheckOutcome> {
    if group.order() > 8 {
        return Err(domain_err(group, id, "superpair scan capped at order 8"));
    }
    let full = group.full_mask();
    let results: Vec<(u64, Vec<Violation>)> = (1..=full)
        .into_par_iter()
        .map(|a| {
            let mut count = 0u64;
            let mut local = Vec::new();
            for b in 1..=full {
                let s = group.sumset_mask(a, b);
                let critical = (a.count_ones() + b.count_ones()) as i64 > s.count_ones() as i64;
                // forward: nontrivial critical pair -> (A+H, B+H) works
                if critical && s != full {
                    count += 1;
                    let h = stabilizer_mask(group, s);
                    let sa = group.sumset_mask(a, h);
                    let sb = group.sumset_mask(b, h);
                    let slack = (sa.count_ones() - a.count_ones())
                        + (sb.count_ones() - b.count_ones());
                    if !is_pure_critical(group, sa, sb) || slack >= h.count_ones() {
                        local.push(Violation {
                            what: format!(
                                "saturation not a qualifying pure critical superpair for A={} B={}",
                                set_lit(group, a),
                                set_lit(group, b)
                            ),
                            repro: pair_repro(group, a, b),
                        });
                    }
                }
                // backward: subpairs of a pure critical pair missing < |H|
                // elements stay critical
                if is_pure_critical(group, a, b) {
                    let h = stabilizer_mask(group, group.sumset_mask(a, b));
                    let budget = h.count_ones() as i64;
                    for da in subsets_smaller_than(a, budget) {
                        let aa = a & !da;
                        if aa == 0 {
                            continue;
                        }
                        let left = budget - da.count_ones() as i64;
                        for db in subsets_smaller_than(b, left) {
                            let bb = b & !db;
                            if bb == 0 || (da == 0 && db == 0) {
                                continue;
                            }
                            count += 1;
                            let ss = group.sumset_mask(aa, bb);
                            if (aa.count_ones() + bb.count_ones()) as i64 <= ss.count_ones() as i64
                            {
                                local.push(Violation {
                                    what: format!(
                                        "subpair A={} B={} of pure critical A*={} B*={} not critical",
                                        set_lit(group, aa),
                                        set_lit(group, bb),
                                        set_lit(group, a),
                                        set_lit(group, b)
                                    ),
                                    repro: pair_repro(group, aa, bb),
                                });
                            }
                        }
                    }
                }
            }
            (count, local)
        })
        .collect();
    let instances = results.iter().map(|(c, _)| c).sum();
    let violations = results.into_iter().flat_map(|(_, v)| v).collect();
    Ok((instances, violations))
}

/// All subsets of `mask` with strictly fewer than `budget` elements.
fn subsets_smaller_than(mask: u64, budget: i64) -> Vec<u64> {
    let mut out = vec![0u64];
    if budget <= 1 {
        return out;
    }
    let bits: Vec<u64> = {
        let mut v = Vec::new();
        let mut m = mask;
        while m != 0 {
            v.push(m & m.wrapping_neg());
            m &= m - 1;
        }
        v
    };
    let mut frontier = vec![0u64];
    for _ in 1..budget {
        let mut next = Vec::new();
        for &f in &frontier {
            for &bit in &bits {
                // a single bit exceeds f exactly when it sits above f's
                // highest set bit, so each subset is built once
                if bit > f {
                    next.push(f | bit);
                }
            }
        }
        out.extend(&next);
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The section-3 proposition: (A,B) pure critical with C = comp(-(A+B))
/// nonempty iff (A,B,C) is a maximal critical trio.  Capped at order 8.
fn check_maximal_trio_prop(group: &Group, id: TheoremId) -> Result<CheckOutcome> {
    if group.order() > 8 {
        return Err(domain_err(group, id, "pair scan capped at order 8"));
    }
    let full = group.full_mask();
    let mut instances = 0u64;
    let mut violations = Vec::new();
    for a in 1..=full {
        for b in 1..=full {
            if !is_pure_critical(group, a, b) {
                continue;
            }
            let s = group.sumset_mask(a, b);
            let c = full & !group.neg_mask(s);
            if c == 0 {
                continue;
            }
            instances += 1;
            let t = Trio::from_masks(group.clone(), full, a, b, c).unwrap();
            if !(t.is_critical() && crate::trio::is_maximal(&t)) {
                violations.push(Violation {
                    what: format!("pure critical pair yields non-maximal trio {}", trio_lit(&t)),
                    repro: trio_repro(group, &t),
                });
            }
        }
    }
    for t in enumerate_maximal_critical_trios(group, false)? {
        instances += 1;
        let (a, b, c) = t.masks();
        let expect_c = full & !group.neg_mask(group.sumset_mask(a, b));
        if !is_pure_critical(group, a, b) || c != expect_c {
            violations.push(Violation {
                what: format!("maximal critical trio without pure critical pair: {}", trio_lit(&t)),
                repro: trio_repro(group, &t),
            });
        }
    }
    Ok((instances, violations))
}

/// Beat stability (Lemma 10): a maximal critical trio with a member whose
/// difference closure is a proper subgroup is a pure or impure beat.
fn check_beat_stability(group: &Group) -> Result<CheckOutcome> {
    let full = group.full_mask();
    let trios = enumerate_maximal_critical_trios(group, false)?;
    let results: Vec<Option<Violation>> = trios
        .par_iter()
        .filter(|t| {
            let (a, b, c) = t.masks();
            [a, b, c]
                .iter()
                .any(|&m| closure_subgroup_mask(group, m) != full)
        })
        .map(|t| {
            if find_structure(t, &[StructureKind::PureBeat, StructureKind::ImpureBeat]).is_none() {
                Some(Violation {
                    what: format!("no beat structure for {}", trio_lit(t)),
                    repro: trio_repro(group, t),
                })
            } else {
                None
            }
        })
        .collect();
    let instances = results.len() as u64;
    Ok((instances, results.into_iter().flatten().collect()))
}

fn proper_cyclic_quotients(group: &Group) -> Vec<(Subgroup, QuotientMap, Vec<usize>)> {
    let full = group.full_mask();
    enumerate_subgroups(group)
        .into_iter()
        .filter(|h| h.mask() != full)
        .filter_map(|h| {
            let q = QuotientMap::new(group, &h).ok()?;
            if !q.is_cyclic() {
                return None;
            }
            let gens = q.generators().to_vec();
            Some((h, q, gens))
        })
        .collect()
}

fn is_proper_near_member(
    group: &Group,
    mask: u64,
    quotients: &[(Subgroup, QuotientMap, Vec<usize>)],
) -> bool {
    let full = group.full_mask();
    quotients.iter().any(|(h, q, gens)| {
        gens.iter().any(|&rid| {
            sequence_profile_in(group, full, mask, h.mask(), q, rid)
                .map(|p| p.is_near && p.is_proper)
                .unwrap_or(false)
        })
    })
}

/// Sequence stability (section-7 lemma): a maximal critical trio with all
/// closures equal to G and a proper near-sequence member is a pure or
/// impure chord.
fn check_chord_stability(group: &Group) -> Result<CheckOutcome> {
    let full = group.full_mask();
    let quotients = proper_cyclic_quotients(group);
    let trios = enumerate_maximal_critical_trios(group, false)?;
    let results: Vec<Option<Violation>> = trios
        .par_iter()
        .filter(|t| {
            let (a, b, c) = t.masks();
            [a, b, c]
                .iter()
                .all(|&m| closure_subgroup_mask(group, m) == full)
                && [a, b, c]
                    .iter()
                    .any(|&m| is_proper_near_member(group, m, &quotients))
        })
        .map(|t| {
            if find_structure(t, &[StructureKind::PureChord, StructureKind::ImpureChord]).is_none()
            {
                Some(Violation {
                    what: format!("no chord structure for {}", trio_lit(t)),
                    repro: trio_repro(group, t),
                })
            } else {
                None
            }
        })
        .collect();
    let instances = results.len() as u64;
    Ok((instances, results.into_iter().flatten().collect()))
}

/// The section-8 claim restated testably: every maximal critical trio with
/// |A| >= 3, all closures equal to G, no member in a proper coset, and no
/// near-sequence member has a non-Sidon B.  Returns a report whose
/// instance count is the number of non-vacuous cases.
pub fn check_sidon_claim(group: &Group) -> Result<TheoremReport> {
    let start = std::time::Instant::now();
    check_bound(group, 10.min(exhaustive_bound()))?;
    let full = group.full_mask();
    let quotients = proper_cyclic_quotients(group);
    let near_member = |m: u64| {
        quotients.iter().any(|(h, q, gens)| {
            gens.iter().any(|&rid| {
                sequence_profile_in(group, full, m, h.mask(), q, rid)
                    .map(|p| p.is_near)
                    .unwrap_or(false)
            })
        })
    };
    let mut instances = 0u64;
    let mut violations = Vec::new();
    for t in enumerate_maximal_critical_trios(group, false)? {
        let (a, b, c) = t.masks();
        if a.count_ones() < 3 {
            continue;
        }
        if [a, b, c]
            .iter()
            .any(|&m| closure_subgroup_mask(group, m) != full)
        {
            continue;
        }
        if [a, b, c].iter().any(|&m| near_member(m)) {
            continue;
        }
        instances += 1;
        let bs = GroupSet::from_mask(group.clone(), b).unwrap();
        if is_sidon(&bs) {
            violations.push(Violation {
                what: format!("B is Sidon in {}", trio_lit(&t)),
                repro: trio_repro(group, &t),
            });
        }
    }
    Ok(TheoremReport {
        theorem: "sidon-claim".to_string(),
        group: group.spec().clone(),
        instances,
        violations,
        wall: start.elapsed(),
    })
}

/// Hard-coded classification of abelian groups by order (fundamental
/// theorem: one class per choice of partitions of the prime exponents).
pub fn abelian_group_specs(order: usize) -> Vec<GroupSpec> {
    let names: &[&str] = match order {
        1 => &["Z1"],
        2 => &["Z2"],
        3 => &["Z3"],
        4 => &["Z4", "Z2xZ2"],
        5 => &["Z5"],
        6 => &["Z6"],
        7 => &["Z7"],
        8 => &["Z8", "Z2xZ4", "Z2xZ2xZ2"],
        9 => &["Z9", "Z3xZ3"],
        10 => &["Z10"],
        11 => &["Z11"],
        12 => &["Z12", "Z2xZ6"],
        13 => &["Z13"],
        14 => &["Z14"],
        15 => &["Z15"],
        16 => &["Z16", "Z2xZ8", "Z4xZ4", "Z2xZ2xZ4", "Z2xZ2xZ2xZ2"],
        17 => &["Z17"],
        18 => &["Z18", "Z3xZ6"],
        19 => &["Z19"],
        20 => &["Z20", "Z2xZ10"],
        21 => &["Z21"],
        22 => &["Z22"],
        23 => &["Z23"],
        24 => &["Z24", "Z2xZ12", "Z2xZ2xZ6"],
        _ => &[],
    };
    names
        .iter()
        .map(|s| s.parse().expect("table entries are valid specs"))
        .collect()
}

/// One atlas row per isomorphism class: orbit counts of maximal critical
/// trios, split by the first-step kind chosen by decompose, plus how many
/// orbits admit each kind at all, with a representative per kind.
#[derive(Clone, Debug)]
pub struct AtlasRow {
    pub spec: GroupSpec,
    pub orbits: usize,
    pub first_step: [usize; 4],
    pub admits: [usize; 4],
    pub representative: [Option<Trio>; 4],
}

pub fn build_atlas(max_order: usize) -> Result<Vec<AtlasRow>> {
    if max_order > exhaustive_bound() {
        return Err(Error::BoundExceeded {
            order: max_order,
            bound: exhaustive_bound(),
        });
    }
    let mut rows = Vec::new();
    for order in 2..=max_order {
        for spec in abelian_group_specs(order) {
            let group = Group::new(spec.clone())?;
            let orbits = enumerate_maximal_critical_trios(&group, true)?;
            let per_trio: Vec<(usize, [bool; 4])> = orbits
                .par_iter()
                .map(|t| {
                    let cert = decompose(t).expect("Kemperman holds at desk scale");
                    let first = cert.steps[0].tag.kind as usize;
                    let mut admits = [false; 4];
                    for (i, &kind) in ALL_KINDS.iter().enumerate() {
                        admits[i] = find_structure(t, &[kind]).is_some();
                    }
                    (first, admits)
                })
                .collect();
            let mut row = AtlasRow {
                spec,
                orbits: orbits.len(),
                first_step: [0; 4],
                admits: [0; 4],
                representative: [None, None, None, None],
            };
            for (t, (first, admits)) in orbits.iter().zip(&per_trio) {
                row.first_step[*first] += 1;
                if row.representative[*first].is_none() {
                    row.representative[*first] = Some(t.clone());
                }
                for i in 0..4 {
                    if admits[i] {
                        row.admits[i] += 1;
                    }
                }
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> Group {
        Group::parse(s).unwrap()
    }

    #[test]
    fn enumerate_z1_empty() {
        assert!(enumerate_maximal_critical_trios(&g("Z1"), false)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn enumerate_z2_single_orbit() {
        let z2 = g("Z2");
        let orbits = enumerate_maximal_critical_trios(&z2, true).unwrap();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].to_string(), "{0};{0};{1}");
        let tag = find_structure(&orbits[0], &ALL_KINDS).unwrap();
        assert_eq!(tag.kind, StructureKind::PureBeat);
        assert_eq!(tag.h.order(), 1);
    }

    #[test]
    fn enumerate_z3_contains_expected_orbit() {
        let z3 = g("Z3");
        let all = enumerate_maximal_critical_trios(&z3, false).unwrap();
        assert!(all.iter().any(|t| t.to_string() == "{0};{0};{1,2}"));
    }

    #[test]
    fn enumeration_matches_direct_scan() {
        for name in ["Z2", "Z3", "Z4", "Z2xZ2", "Z5", "Z6"] {
            let group = g(name);
            let mut fast: Vec<_> = enumerate_maximal_critical_trios(&group, false)
                .unwrap()
                .iter()
                .map(Trio::masks)
                .collect();
            let mut direct: Vec<_> = enumerate_trios_direct(&group)
                .unwrap()
                .iter()
                .filter(|t| t.is_nontrivial())
                .map(Trio::masks)
                .collect();
            fast.sort_unstable();
            direct.sort_unstable();
            direct.dedup();
            assert_eq!(fast, direct, "enumerators disagree on {name}");
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(
            enumerate_maximal_critical_trios(&g("Z16"), false),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn cauchy_davenport_z7_passes() {
        let report = check_theorem(&g("Z7"), TheoremId::CauchyDavenport, 0).unwrap();
        assert!(report.passed());
        assert_eq!(report.instances, 127 * 127);
    }

    #[test]
    fn cauchy_davenport_rejects_composite() {
        assert!(matches!(
            check_theorem(&g("Z6"), TheoremId::CauchyDavenport, 0),
            Err(Error::TheoremDomain { .. })
        ));
    }

    #[test]
    fn kneser_z8_passes() {
        let report = check_theorem(&g("Z8"), TheoremId::Kneser, 0).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn kneser_sampled_is_deterministic() {
        let z12 = g("Z12");
        let r1 = check_theorem(&z12, TheoremId::Kneser, 42).unwrap();
        let r2 = check_theorem(&z12, TheoremId::Kneser, 42).unwrap();
        assert!(r1.passed());
        assert_eq!(r1.render(), r2.render());
        assert_eq!(r1.instances, 100_000);
    }

    #[test]
    fn kneser_v2_z8_passes() {
        let report = check_theorem(&g("Z8"), TheoremId::KneserV2, 0).unwrap();
        assert!(report.passed());
        assert!(report.instances > 0);
    }

    #[test]
    fn vosper_z5_passes() {
        let report = check_theorem(&g("Z5"), TheoremId::Vosper, 0).unwrap();
        assert!(report.passed());
        assert!(report.instances > 0);
        assert!(matches!(
            check_theorem(&g("Z6"), TheoremId::Vosper, 0),
            Err(Error::TheoremDomain { .. })
        ));
    }

    #[test]
    fn kemperman_z2xz4_passes() {
        let report = check_theorem(&g("Z2xZ4"), TheoremId::Kemperman, 0).unwrap();
        assert!(report.passed());
        assert!(report.instances > 0);
    }

    #[test]
    fn mann_z8_passes() {
        let report = check_theorem(&g("Z8"), TheoremId::Mann, 0).unwrap();
        assert!(report.passed());
        assert_eq!(report.instances, 254);
    }

    #[test]
    fn purification_z8_passes() {
        let report = check_theorem(&g("Z8"), TheoremId::Purification, 7).unwrap();
        assert!(report.passed());
        assert!(report.instances > 100, "too few instances: {}", report.instances);
    }

    #[test]
    fn pair_and_trio_props_pass_z6() {
        let z6 = g("Z6");
        assert!(check_theorem(&z6, TheoremId::PurePairProp, 0).unwrap().passed());
        assert!(check_theorem(&z6, TheoremId::MaximalTrioProp, 0)
            .unwrap()
            .passed());
    }

    #[test]
    fn stability_lemmas_pass_z8() {
        let z8 = g("Z8");
        let beat = check_theorem(&z8, TheoremId::BeatStability, 0).unwrap();
        assert!(beat.passed());
        assert!(beat.instances > 0);
        let chord = check_theorem(&z8, TheoremId::ChordStability, 0).unwrap();
        assert!(chord.passed());
        assert!(chord.instances > 0);
    }

    #[test]
    fn sidon_claim_small_groups() {
        for name in ["Z5", "Z7", "Z8"] {
            let report = check_sidon_claim(&g(name)).unwrap();
            assert!(report.passed(), "sidon claim failed on {name}");
        }
    }

    #[test]
    fn classification_table() {
        assert_eq!(abelian_group_specs(8).len(), 3);
        assert_eq!(abelian_group_specs(16).len(), 5);
        assert_eq!(abelian_group_specs(24).len(), 3);
        assert_eq!(abelian_group_specs(7).len(), 1);
    }

    #[test]
    fn atlas_small_orders() {
        let rows = build_atlas(4).unwrap();
        let names: Vec<String> = rows.iter().map(|r| r.spec.to_string()).collect();
        assert_eq!(names, ["Z2", "Z3", "Z4", "Z2xZ2"]);
        let z2 = &rows[0];
        assert_eq!(z2.orbits, 1);
        assert_eq!(z2.first_step[StructureKind::PureBeat as usize], 1);
        for row in &rows {
            assert_eq!(row.first_step.iter().sum::<usize>(), row.orbits);
        }
    }

    #[test]
    fn report_render_is_stable() {
        let r = check_theorem(&g("Z5"), TheoremId::CauchyDavenport, 0).unwrap();
        assert_eq!(
            r.render(),
            "summary: theorem=cauchy-davenport group=Z5 instances=961 violations=0 status=pass\n"
        );
    }
}
