//! Seed derivation for sweep cells.
//!
//! A cell seed is built by folding each field into a running 64-bit state:
//!
//! ```text
//! h = mix(master)
//! for field in [level, instance, rep, topology, purpose]:
//!     h = mix(h ^ field)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer (Stafford variant 13). `mix` is a
//! bijection and so is `x -> h ^ x`, so two tuples that differ in exactly one
//! field always produce different seeds. Mixing the master seed first keeps
//! it from cancelling against the level in the first step.

/// Stands in for the topology when deriving seeds that must not depend on it,
/// such as problem-instance generation.
pub const TOPOLOGY_SENTINEL: u64 = u64::MAX;

/// Purpose tag for problem-instance generation.
pub const PURPOSE_INSTANCE: u64 = 1;

/// Purpose tag for a single simulation run.
pub const PURPOSE_RUN: u64 = 2;

#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(
    master: u64,
    level: u64,
    instance: u64,
    rep: u64,
    topology: u64,
    purpose: u64,
) -> u64 {
    [level, instance, rep, topology, purpose]
        .into_iter()
        .fold(mix(master), |h, field| mix(h ^ field))
}

/// Seed for generating instance `instance` of a complexity level; identical
/// for every topology.
pub fn instance_seed(master: u64, level: u64, instance: u64) -> u64 {
    derive_seed(
        master,
        level,
        instance,
        0,
        TOPOLOGY_SENTINEL,
        PURPOSE_INSTANCE,
    )
}

/// Seed for one run. Topologies share the `(level, instance, rep)` base and
/// differ only through `topology`.
pub fn run_seed(master: u64, level: u64, instance: u64, rep: u64, topology: u64) -> u64 {
    derive_seed(master, level, instance, rep, topology, PURPOSE_RUN)
}
