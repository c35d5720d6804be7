//! Finite G-sets and their embeddings into iterated power objects.
//!
//! For a finite group `G` and finite G-sets `M` and `X`, `X` embeds
//! equivariantly into some `P^n(M)` exactly when the pointwise kernel of the
//! action on `M` is contained in the pointwise kernel of the action on `X`.
//! This crate decides that condition, builds an explicit injection into
//! `P^(n+4)(M)` when it holds, checks such injections independently, and
//! carries a brute-force oracle that searches small power objects directly.
//!
//! Module map:
//!
//! - [`group`]: finite groups as Cayley tables, subgroups, cosets, conjugacy.
//! - [`gset`]: validated actions, orbits, stabilizers, isomorphism.
//! - [`hset`]: hereditarily finite sets over the points of `M`.
//! - [`embed`]: the embedding construction and certificate checker.
//! - [`oracle`]: exhaustive subobject search and orbit counting.
//! - [`cli`]: the file-driven command surface behind the `gset-power` binary.

pub mod cli;
pub mod embed;
pub mod error;
pub mod group;
pub mod gset;
pub mod hset;
pub mod oracle;

pub use embed::{
    check_conditions, embed, verify_certificate, CardTower, ConditionReport, EmbeddingCertificate,
    TowerCard, VerificationReport, WellOrder,
};
pub use error::{Error, Result};
pub use group::{Group, Subgroup};
pub use gset::{GSet, HSetGSet, InjectionReport, IsoWitness};
pub use hset::{HSet, HTree, LevelTag};
pub use oracle::{OracleReport, TheoremCheck};
