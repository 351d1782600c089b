//! Size guards shared by the enumerators.

/// Largest `p^d` for which the whole space is enumerated.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Largest search space for raw-definition tuple enumeration, e.g.
/// `|E|^{2k+2}` for S_k(r) or `|E|^8` for C(r).
pub const BRUTE_LIMIT: u128 = 1_000_000_000;

/// Largest matrix search space for orthogonal group enumeration.
pub const GROUP_SEARCH_LIMIT: u128 = 1_000_000_000;

/// Largest vertex count |E|² of the similarity graph.
pub const GRAPH_VERTEX_LIMIT: u128 = 100_000;

/// Largest number of step-length vectors visited by the ν-identity sums.
pub const PROFILE_LIMIT: u128 = 1_000_000_000;

pub(crate) fn guard(what: &'static str, size: u128, limit: u128) -> crate::Result<()> {
    if size > limit {
        Err(crate::Error::TooLarge { what, size, limit })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn sat_pow(base: u128, exp: u32) -> u128 {
    base.checked_pow(exp).unwrap_or(u128::MAX)
}
