//! URDP: universal random data padding over a pluggable trapdoor PKE.
//!
//! The crate is organised bottom-up:
//!
//! * [`bits`]: bit strings, prefix/suffix selection and the conversion to
//!   and from unbounded integers.
//! * [`padding`]: random encoding and message extraction, plus the
//!   decryption-side parameter checks.
//! * [`pke`]: the backend trait, a Regev-style LWE backend and an insecure
//!   XOR backend for tests, and the key-file format.
//! * [`scheme`]: the composed cryptosystem and its ciphertext format.
//! * [`game`]: an executable IND-CCA2 experiment and tampering scenarios.
//! * [`cli`]: the command-line front end behind the `urdp` binary.
//!
//! ```
//! use rand::SeedableRng;
//! use urdp::{BitString, SchemeConfig, Urdp};
//! use urdp::pke::{LweBackend, LweParams};
//!
//! let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(7);
//! let scheme = Urdp::new(LweBackend::new(LweParams::default())?, SchemeConfig::default())?;
//! let (pk, sk) = scheme.keygen(&mut rng)?;
//! let m = BitString::from_bytes(b"attack at dawn");
//! let c = scheme.encrypt(&pk, &m, &mut rng)?;
//! assert_eq!(scheme.decrypt(&sk, &c)?, m);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod bits;
pub mod cli;
pub mod game;
pub mod padding;
pub mod pke;
pub mod scheme;
mod wire;

pub use bits::{BitString, BitsError};
pub use padding::{EncodedMessage, EncodingParams, PaddingError, SelectorVector};
pub use pke::{AnyBackend, BackendId, PkeBackend, PkeError};
pub use scheme::{
    DecryptError, FormatError, RejectReason, Rejection, SchemeConfig, SchemeError, Urdp,
    UrdpCiphertext,
};
pub use wire::WireError;
