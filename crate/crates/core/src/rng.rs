//! Seeded, splittable random streams.
//!
//! A [`RngStream`] names one ChaCha12 stream by `(seed, stream_id)`; the seed
//! selects the key and the stream id the 64-bit nonce, so distinct ids give
//! statistically independent sequences and the same pair always replays the
//! same sequence. Substreams are derived by mixing an index into the id,
//! which is what keeps chunked parallel sampling independent of the worker
//! count.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{complex_gaussian, Scalar};

/// Generator handed to sampling closures.
pub type StreamRng = ChaCha12Rng;

/// Name of one reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// Stream 0 for a seed.
    pub fn root(seed: u64) -> Self {
        RngStream { seed, stream_id: 0 }
    }

    /// Derived stream for chunk/operation `index`.
    pub fn substream(&self, index: u64) -> Self {
        RngStream {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(index.wrapping_add(1))),
        }
    }

    /// Instantiate the generator positioned at the start of the stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// SplitMix64 finalizer; used only to scatter substream ids.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Matrix of i.i.d. circularly symmetric complex Gaussian entries with
/// per-entry total variance `variance`, filled row by row.
pub fn sample_complex_gaussian<T: Scalar>(
    stream: RngStream,
    rows: usize,
    cols: usize,
    variance: T,
) -> Result<CMatrix<T>> {
    let mut rng = stream.rng();
    sample_complex_gaussian_with(&mut rng, rows, cols, variance)
}

/// Same as [`sample_complex_gaussian`] but drawing from an existing
/// generator.
pub fn sample_complex_gaussian_with<T: Scalar>(
    rng: &mut StreamRng,
    rows: usize,
    cols: usize,
    variance: T,
) -> Result<CMatrix<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("matrix dimensions must be positive"));
    }
    if !(variance > T::zero()) {
        return Err(Error::invalid("variance must be positive"));
    }
    Ok(CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, variance)))
}
