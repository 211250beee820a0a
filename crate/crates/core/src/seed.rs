/// Mix a base seed with a stream tag and an index into an independent seed.
///
/// SplitMix64 finalizer over the combined words; distinct `(tag, index)` pairs
/// give statistically unrelated ChaCha streams.
pub fn derive_seed(base: u64, tag: u64, index: u64) -> u64 {
    let mut z = base
        ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) mod tags {
    pub const ANALYTIC_BASIS: u64 = 1;
    pub const RANDOM_PAIR: u64 = 2;
    pub const DESCENT: u64 = 3;
    pub const RANK_PROBE: u64 = 4;
    pub const ORACLE_CHUNK: u64 = 5;
}
