//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong outside of plain programmer errors
/// (out-of-range indices panic, as is usual for Rust containers).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A numeric argument was outside the mathematical domain of the
    /// operation (negative concentration, non-finite input, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Containers whose dimensions must agree did not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An enumeration-based computation was asked for more states than the
    /// configured ceiling allows.
    #[error("state space too large: {states} states exceeds limit {limit}")]
    TooManyStates { states: u128, limit: u128 },

    /// A file did not start with the expected magic bytes.
    #[error("bad magic bytes: expected {expected:?}, found {found:?}")]
    BadMagic { expected: [u8; 4], found: [u8; 4] },

    /// A file declared a format version this build does not understand.
    #[error("unsupported format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    /// A file ended before its declared payload did.
    #[error("truncated file: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    /// A file kept going after its declared payload ended.
    #[error("trailing data: {extra} unexpected bytes after payload")]
    TrailingData { extra: u64 },

    /// A payload value that must be finite was NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Malformed run configuration (unknown key, unparsable value, ...).
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
