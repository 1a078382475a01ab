//! Seed-derived random streams.
//!
//! Every unit of Monte-Carlo work (a node's hardware draw, the shadowing
//! samples at one distance for one node, one relay distance) gets its own
//! ChaCha stream under the master seed, so results do not depend on which
//! thread runs which unit or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum StreamKind {
    Hardware = 1,
    Shadowing = 2,
    Relay = 3,
}

const INDEX_BITS: u32 = 30;
const INDEX_MASK: u64 = (1 << INDEX_BITS) - 1;

/// Stream number for `(kind, major, minor)`. Indices are limited to 30 bits.
pub fn stream_id(kind: StreamKind, major: usize, minor: usize) -> u64 {
    assert!(
        (major as u64) <= INDEX_MASK && (minor as u64) <= INDEX_MASK,
        "stream index overflow"
    );
    ((kind as u64) << (2 * INDEX_BITS)) | ((major as u64) << INDEX_BITS) | minor as u64
}

pub fn substream(seed: u64, kind: StreamKind, major: usize, minor: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(kind, major, minor));
    rng
}
