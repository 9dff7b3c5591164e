//! Per-node random tapes, addressable by word index.

/// Private random bits of one node under one seed. Words are derived from a
/// SplitMix64-style mixer keyed by `(seed, id, index)`, so a tape can be read
/// lazily from any position without storing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tape {
    key: u64,
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn random_tape(seed: u64, node_id: u64) -> Tape {
    Tape {
        key: mix(mix(seed.wrapping_add(GOLDEN)) ^ node_id.wrapping_mul(GOLDEN)),
    }
}

impl Tape {
    pub fn word(&self, i: u64) -> u64 {
        mix(self.key ^ mix(i.wrapping_add(1).wrapping_mul(GOLDEN)))
    }

    pub fn bit(&self, i: u64) -> bool {
        (self.word(i / 64) >> (i % 64)) & 1 == 1
    }

    /// Bit 0: the coin used for marking.
    pub fn mark(&self) -> bool {
        self.bit(0)
    }

    /// Word 1: a tie-breaking key for symmetric choices.
    pub fn key(&self) -> u64 {
        self.word(1)
    }
}
