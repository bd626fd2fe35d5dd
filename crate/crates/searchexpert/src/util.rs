//! Small shared utilities: clocks and content hashing.

use sha2::{Digest, Sha256};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Time source abstraction so pipelines and the executor can run against a
/// fixed clock in deterministic (`--mock`) mode.
pub trait Clock: Send + Sync {
    /// Milliseconds elapsed since some epoch private to the clock.
    fn now_ms(&self) -> u64;
    fn sleep(&self, d: Duration);
}

/// Wall-clock time, monotonic from process start.
pub struct SystemClock {
    start: Instant,
}

impl SystemClock {
    pub fn new() -> Self {
        Self {
            start: Instant::now(),
        }
    }
}

impl Default for SystemClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for SystemClock {
    fn now_ms(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }

    fn sleep(&self, d: Duration) {
        std::thread::sleep(d);
    }
}

/// Deterministic clock: `now_ms` is constant and `sleep` returns immediately.
///
/// Used by `--mock` runs so elapsed-time fields serialize identically across
/// runs, and by rate-limiter tests as a virtual clock.
pub struct FixedClock {
    now: AtomicU64,
}

impl FixedClock {
    pub fn new() -> Self {
        Self {
            now: AtomicU64::new(0),
        }
    }

    /// Manually advance the virtual time.
    pub fn advance_ms(&self, ms: u64) {
        self.now.fetch_add(ms, Ordering::SeqCst);
    }
}

impl Default for FixedClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for FixedClock {
    fn now_ms(&self) -> u64 {
        self.now.load(Ordering::SeqCst)
    }

    fn sleep(&self, d: Duration) {
        // Virtual sleep: advance time without blocking.
        self.advance_ms(d.as_millis() as u64);
    }
}

/// Hex-encoded SHA-256 of the input bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hex::encode(hasher.finalize())
}

/// First 8 hex chars of the SHA-256 — a short stable fingerprint used by
/// mocks and generated file names.
pub fn short_hash(bytes: &[u8]) -> String {
    sha256_hex(bytes)[..8].to_string()
}

/// A u64 derived from the SHA-256 of the input, for deterministic selection.
pub fn hash_u64(bytes: &[u8]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    u64::from_be_bytes(digest[..8].try_into().expect("sha256 is 32 bytes"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(short_hash(b"abc"), "ba7816bf");
    }

    #[test]
    fn fixed_clock_sleep_advances_virtually() {
        let clock = FixedClock::new();
        assert_eq!(clock.now_ms(), 0);
        clock.sleep(Duration::from_millis(250));
        assert_eq!(clock.now_ms(), 250);
    }
}
