//! The composed cryptosystem: URDP padding over a black-box PKE.
//!
//! Encryption draws a selector `r` (weight `h`, `0 < h < k`) and a ROB length
//! `s`, encodes the message into `m'`, and outputs
//!
//! ```text
//! C1 = DV(m') · h        C2 = Enc_pke(pk, r)
//! ```
//!
//! together with a header carrying the message length `n` and the encoded
//! length `ℓ = |m'|`; the integer conversion drops leading zeros, so `ℓ`
//! has to travel with the ciphertext.
//!
//! Decryption recovers `r`, checks that `h` divides `C1`, that `y = C1/h`
//! fits in `ℓ` bits and that `s = (ℓ − h·⌈n/h⌉)/(k − h)` is an admissible
//! integer, then runs message extraction. Every failure collapses to a
//! single [`Rejection`]; its [`RejectReason`] is available for diagnostics
//! but is not part of any wire format.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, RngCore, SeedableRng};
use thiserror::Error;

use crate::bits::BitString;
use crate::padding::{
    self, EncodedMessage, EncodingParams, PadSource, PaddingError, RngPad, SelectorVector,
    DEFAULT_S_MAX,
};
use crate::pke::{BackendId, PkeBackend, PkeError};
use crate::wire::{Reader, WireError, Writer};

pub const CIPHERTEXT_MAGIC: &[u8; 4] = b"URDP";
pub const CIPHERTEXT_VERSION: u8 = 0x01;
pub const DEFAULT_K: usize = 18;
/// Upper bound on the message length accepted by decryption (4 GiB of bits).
pub const DEFAULT_MAX_MESSAGE_BITS: u64 = 1 << 35;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("invalid scheme configuration: {0}")]
    Config(String),
    #[error("message must not be empty")]
    EmptyMessage,
    #[error("message of {0} bits exceeds the configured maximum")]
    MessageTooLong(u64),
    #[error(transparent)]
    Padding(#[from] PaddingError),
    #[error(transparent)]
    Pke(#[from] PkeError),
}

/// Malformed ciphertext bytes. Distinct from a decryption [`Rejection`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("unknown backend id {0}")]
    UnknownBackend(u8),
    #[error("C1 is not minimally encoded")]
    NonCanonicalInteger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    BackendMismatch,
    BackendFailure,
    SelectorLength,
    SelectorWeight,
    MessageLength,
    Inconsistent,
    NotDivisible,
    Overflow,
}

impl RejectReason {
    pub fn code(self) -> &'static str {
        match self {
            Self::BackendMismatch => "backend_mismatch",
            Self::BackendFailure => "backend_failure",
            Self::SelectorLength => "selector_length",
            Self::SelectorWeight => "selector_weight",
            Self::MessageLength => "message_length",
            Self::Inconsistent => "inconsistent_length",
            Self::NotDivisible => "not_divisible",
            Self::Overflow => "overflow",
        }
    }
}

/// The error symbol ⊥. Displays identically for every cause.
#[derive(Clone, Copy, PartialEq, Eq, Error)]
#[error("decryption rejected")]
pub struct Rejection {
    reason: RejectReason,
}

impl Rejection {
    fn new(reason: RejectReason) -> Self {
        Self { reason }
    }

    /// Internal cause, for tests and scenario reports only.
    pub fn reason(&self) -> RejectReason {
        self.reason
    }
}

impl fmt::Debug for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rejection({})", self.reason.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecryptError {
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Rejected(#[from] Rejection),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeConfig {
    /// Selector length.
    pub k: usize,
    /// Largest ROB length drawn by encryption and accepted by decryption.
    pub s_max: usize,
    pub max_message_bits: u64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            s_max: DEFAULT_S_MAX,
            max_message_bits: DEFAULT_MAX_MESSAGE_BITS,
        }
    }
}

impl SchemeConfig {
    pub fn with_k(k: usize) -> Self {
        Self {
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SchemeError> {
        if self.k < 3 {
            return Err(SchemeError::Config(format!(
                "k = {} must be at least 3",
                self.k
            )));
        }
        if self.s_max == 0 {
            return Err(SchemeError::Config("s_max must be at least 1".into()));
        }
        if self.max_message_bits == 0 {
            return Err(SchemeError::Config(
                "max_message_bits must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A ciphertext: header `(n, ℓ)`, `C1 = y·h` and the backend blob `C2`.
///
/// Fields are public because decryption must cope with arbitrary,
/// attacker-chosen values; nothing here is trusted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrdpCiphertext {
    pub backend: BackendId,
    /// Original message length in bits.
    pub n: u64,
    /// Length of the encoded message `m'` in bits.
    pub ell: u64,
    pub c1: BigUint,
    pub c2: Vec<u8>,
}

impl UrdpCiphertext {
    /// `"URDP" ‖ 0x01 ‖ backend id ‖ n ‖ ℓ ‖ len ‖ C1 ‖ len ‖ C2`, integers
    /// big-endian, lengths 8 bytes, `C1` minimal (zero is empty).
    pub fn to_bytes(&self) -> Vec<u8> {
        let c1 = if self.c1.is_zero() {
            Vec::new()
        } else {
            self.c1.to_bytes_be()
        };
        Writer::new()
            .bytes(CIPHERTEXT_MAGIC)
            .u8(CIPHERTEXT_VERSION)
            .u8(self.backend.as_byte())
            .u64(self.n)
            .u64(self.ell)
            .field(&c1)
            .field(&self.c2)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        let mut r = Reader::new(bytes);
        r.expect_magic(CIPHERTEXT_MAGIC)?;
        let version = r.u8()?;
        if version != CIPHERTEXT_VERSION {
            return Err(WireError::Version(version).into());
        }
        let id = r.u8()?;
        let backend = BackendId::from_byte(id).ok_or(FormatError::UnknownBackend(id))?;
        let n = r.u64()?;
        let ell = r.u64()?;
        let c1 = r.field()?;
        if c1.first() == Some(&0) {
            return Err(FormatError::NonCanonicalInteger);
        }
        let c1 = BigUint::from_bytes_be(c1);
        let c2 = r.field()?.to_vec();
        r.finish()?;
        Ok(Self {
            backend,
            n,
            ell,
            c1,
            c2,
        })
    }
}

/// Intermediate values of one encryption: `r`, `(n, v, s)`, `m'` and `y`.
#[derive(Debug, Clone)]
pub struct EncryptionTrace {
    pub selector: SelectorVector,
    pub params: EncodingParams,
    pub encoded: EncodedMessage,
    pub y: BigUint,
}

/// `n / (n + (k−h)·s + k)`: plaintext bits over padded bits plus a `k`-bit
/// selector ciphertext.
pub fn information_rate(n: usize, k: usize, h: usize, s: usize) -> f64 {
    n as f64 / (n + (k - h) * s + k) as f64
}

/// URDP over backend `B`.
#[derive(Debug, Clone)]
pub struct Urdp<B> {
    backend: B,
    config: SchemeConfig,
}

impl<B: PkeBackend> Urdp<B> {
    pub fn new(backend: B, config: SchemeConfig) -> Result<Self, SchemeError> {
        config.validate()?;
        Ok(Self { backend, config })
    }

    pub fn backend(&self) -> &B {
        &self.backend
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    /// Keys are exactly the backend's.
    pub fn keygen<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(B::PublicKey, B::SecretKey), SchemeError> {
        Ok(self.backend.generate(rng)?)
    }

    pub fn encrypt<R: RngCore + ?Sized>(
        &self,
        pk: &B::PublicKey,
        m: &BitString,
        rng: &mut R,
    ) -> Result<UrdpCiphertext, SchemeError> {
        Ok(self.encrypt_traced(pk, m, rng)?.0)
    }

    /// Encrypts and also returns the intermediate values.
    pub fn encrypt_traced<R: RngCore + ?Sized>(
        &self,
        pk: &B::PublicKey,
        m: &BitString,
        rng: &mut R,
    ) -> Result<(UrdpCiphertext, EncryptionTrace), SchemeError> {
        let selector = SelectorVector::random(self.config.k, rng)?;
        let s = rng.gen_range(1..=self.config.s_max);
        let mut pad_rng = rand_chacha::ChaCha20Rng::from_rng(&mut *rng)
            .map_err(|e| SchemeError::Config(e.to_string()))?;
        self.encrypt_with(pk, m, selector, s, &mut RngPad(&mut pad_rng), rng)
    }

    /// Encrypts with caller-chosen selector, ROB length and filler bits.
    /// `rng` is only used by the backend.
    pub fn encrypt_with<P: PadSource + ?Sized, R: RngCore + ?Sized>(
        &self,
        pk: &B::PublicKey,
        m: &BitString,
        selector: SelectorVector,
        s: usize,
        pad: &mut P,
        rng: &mut R,
    ) -> Result<(UrdpCiphertext, EncryptionTrace), SchemeError> {
        if m.is_empty() {
            return Err(SchemeError::EmptyMessage);
        }
        if m.len() as u64 > self.config.max_message_bits {
            return Err(SchemeError::MessageTooLong(m.len() as u64));
        }
        if selector.len() != self.config.k {
            return Err(SchemeError::Config(format!(
                "selector has {} bits, scheme uses k = {}",
                selector.len(),
                self.config.k
            )));
        }
        let params = EncodingParams::for_selector(m.len(), &selector, s, self.config.s_max)?;
        let encoded = padding::encode(m, &selector, &params, pad)?;
        let y = encoded.payload().to_integer();
        let c1 = &y * BigUint::from(selector.weight());
        let c2 = self.backend.encrypt(pk, selector.bits(), rng)?;
        let ct = UrdpCiphertext {
            backend: self.backend.id(),
            n: m.len() as u64,
            ell: encoded.bit_len() as u64,
            c1,
            c2,
        };
        Ok((
            ct,
            EncryptionTrace {
                selector,
                params,
                encoded,
                y,
            },
        ))
    }

    pub fn decrypt(&self, sk: &B::SecretKey, c: &UrdpCiphertext) -> Result<BitString, Rejection> {
        use RejectReason::*;
        let reject = |reason| Rejection::new(reason);

        if c.backend != self.backend.id() {
            return Err(reject(BackendMismatch));
        }
        let r = self
            .backend
            .decrypt(sk, &c.c2)
            .map_err(|_| reject(BackendFailure))?;
        if r.len() != self.config.k {
            return Err(reject(SelectorLength));
        }
        let selector = SelectorVector::new(r).map_err(|_| reject(SelectorWeight))?;
        let h = selector.weight();
        if c.n == 0 || c.n > self.config.max_message_bits {
            return Err(reject(MessageLength));
        }
        let params = padding::derive_params(
            c.n,
            self.config.k as u64,
            h as u64,
            c.ell,
            self.config.s_max,
        )
        .map_err(|_| reject(Inconsistent))?;
        let (y, rem) = c.c1.div_rem(&BigUint::from(h));
        if !rem.is_zero() {
            return Err(reject(NotDivisible));
        }
        // ℓ = h·v + (k−h)·s is bounded by derive_params, so it fits in usize.
        let ell = c.ell as usize;
        let m_prime = BitString::from_integer(&y, ell).map_err(|_| reject(Overflow))?;
        padding::extract(&EncodedMessage::new(m_prime), &selector, &params)
            .map_err(|_| reject(Inconsistent))
    }

    /// Parses then decrypts, keeping format errors apart from ⊥.
    pub fn decrypt_bytes(
        &self,
        sk: &B::SecretKey,
        bytes: &[u8],
    ) -> Result<BitString, DecryptError> {
        let c = UrdpCiphertext::from_bytes(bytes)?;
        Ok(self.decrypt(sk, &c)?)
    }
}
