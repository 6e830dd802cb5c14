//! Deterministic per-cell seed derivation.
//!
//! `cell_seed(master, z_index, replica) =
//!     splitmix64(splitmix64(splitmix64(master) ^ z_index) ^ replica)`
//! with the standard splitmix64 finalizer. Fixed here and in the README;
//! any schedule of the same cells reproduces the same chains.

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn cell_seed(master: u64, z_index: u64, replica: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ z_index) ^ replica)
}
