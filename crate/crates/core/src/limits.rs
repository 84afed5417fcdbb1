/// Size caps that keep the quadratic algorithms at desk scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest admissible period `p^n`.
    pub period_cap: u64,
    /// Largest admissible extension degree `k` for `GF(2^k)`.
    pub degree_cap: u64,
}

impl Limits {
    pub const DEFAULT_PERIOD_CAP: u64 = 1 << 20;
    pub const DEFAULT_DEGREE_CAP: u64 = 128;
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            period_cap: Self::DEFAULT_PERIOD_CAP,
            degree_cap: Self::DEFAULT_DEGREE_CAP,
        }
    }
}
