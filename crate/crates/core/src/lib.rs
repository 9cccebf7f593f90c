//! Sumset arithmetic, critical pairs and trios, and Kemperman structure
//! certificates over finite abelian groups, with exhaustive desk-scale
//! theorem checking.

pub mod certify;
pub mod classify;
pub mod error;
pub mod group;
pub mod oracle;
pub mod set;
pub mod setops;
pub mod trio;

pub use certify::{batch_verify, parse as parse_certificate, render, BatchSummary, CertificateDocument};
pub use classify::{
    check_tag, continuation, decompose, find_structure, match_structures, verify_certificate,
    CertStep, Certificate, StructureKind, StructureTag, Verdict, ALL_KINDS,
};
pub use error::{Error, Result};
pub use oracle::{
    abelian_group_specs, build_atlas, check_sidon_claim, check_theorem,
    enumerate_maximal_critical_trios, enumerate_trios_direct, exhaustive_bound, AtlasRow,
    TheoremId, TheoremReport, Violation, ALL_THEOREMS, DEFAULT_EXHAUSTIVE_BOUND,
};
pub use group::{enumerate_subgroups, Element, Group, GroupSpec, QuotientMap, Subgroup};
pub use set::{parse_set, GroupSet};
pub use setops::{Quasistability, SequenceProfile};
pub use trio::{parse_trio, Similarity, Trio};
