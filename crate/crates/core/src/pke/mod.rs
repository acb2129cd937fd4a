//! Trapdoor public-key encryption backends.
//!
//! The URDP construction treats its PKE as a black box that encrypts the
//! `k`-bit selector vector. [`PkeBackend`] is that box. Two implementations
//! ship with the crate:
//!
//! * [`lwe::LweBackend`], a small Regev-style LWE scheme that encrypts bit by bit;
//! * [`xor::InsecureXorBackend`], a deterministic one-time-pad stand-in whose
//!   only purpose is isolating the padding logic in tests. It offers no
//!   security whatsoever.
//!
//! [`AnyBackend`] dispatches between them at runtime and owns the key-file
//! format.

use std::fmt;

use rand::RngCore;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::bits::BitString;
use crate::wire::{Reader, WireError, Writer};

pub mod lwe;
pub mod xor;

pub use lwe::{LweBackend, LweParams, LwePublicKey, LweSecretKey};
pub use xor::{InsecureXorBackend, InsecureXorKey};

pub const PUBLIC_KEY_MAGIC: &[u8; 4] = b"URPK";
pub const SECRET_KEY_MAGIC: &[u8; 4] = b"URSK";
pub const KEY_FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PkeError {
    #[error("invalid backend parameters: {0}")]
    InvalidParams(String),
    #[error("plaintext has {got} bits, backend expects {expected}")]
    PlaintextLength { expected: usize, got: usize },
    #[error("malformed backend ciphertext: {0}")]
    MalformedCiphertext(&'static str),
    #[error("malformed key: {0}")]
    MalformedKey(&'static str),
    #[error("key or ciphertext belongs to a different backend")]
    BackendMismatch,
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// Wire identifier of a backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum BackendId {
    Lwe = 1,
    InsecureXor = 255,
}

impl BackendId {
    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(Self::Lwe),
            255 => Some(Self::InsecureXor),
            _ => None,
        }
    }

    pub fn as_byte(self) -> u8 {
        self as u8
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Lwe => "lwe",
            Self::InsecureXor => "insecure-xor",
        }
    }
}

impl fmt::Display for BackendId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A public-key encryption scheme `(Gen, Enc, Dec)` over bit strings.
///
/// Ciphertexts are opaque, self-describing byte blobs. Decryption of a blob
/// produced by `encrypt` under the matching key must return the plaintext.
pub trait PkeBackend {
    type PublicKey: Clone + fmt::Debug;
    type SecretKey: Clone + fmt::Debug;

    fn id(&self) -> BackendId;

    fn generate<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(Self::PublicKey, Self::SecretKey), PkeError>;

    fn encrypt<R: RngCore + ?Sized>(
        &self,
        pk: &Self::PublicKey,
        plaintext: &BitString,
        rng: &mut R,
    ) -> Result<Vec<u8>, PkeError>;

    fn decrypt(&self, sk: &Self::SecretKey, blob: &[u8]) -> Result<BitString, PkeError>;
}

/// Writes a key file: magic, backend id, version, then length-prefixed fields.
pub(crate) fn write_key(magic: &[u8; 4], id: BackendId, fields: &[&[u8]]) -> Vec<u8> {
    let mut w = Writer::new();
    w.bytes(magic).u8(id.as_byte()).u8(KEY_FORMAT_VERSION);
    for f in fields {
        w.field(f);
    }
    w.finish()
}

/// Parses a key-file header and returns the backend id plus a reader
/// positioned at the first field.
pub(crate) fn read_key_header<'a>(
    magic: &[u8; 4],
    bytes: &'a [u8],
) -> Result<(BackendId, Reader<'a>), PkeError> {
    let mut r = Reader::new(bytes);
    r.expect_magic(magic)?;
    let id = BackendId::from_byte(r.u8()?).ok_or(PkeError::MalformedKey("unknown backend id"))?;
    let version = r.u8()?;
    if version != KEY_FORMAT_VERSION {
        return Err(WireError::Version(version).into());
    }
    Ok((id, r))
}

/// Short hex SHA-256 fingerprint of serialized key bytes.
pub fn fingerprint(bytes: &[u8]) -> String {
    Sha256::digest(bytes)[..16]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Runtime choice between the shipped backends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyBackend {
    Lwe(LweBackend),
    InsecureXor(InsecureXorBackend),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyPublicKey {
    Lwe(LwePublicKey),
    InsecureXor(InsecureXorKey),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnySecretKey {
    Lwe(LweSecretKey),
    InsecureXor(InsecureXorKey),
}

impl AnyPublicKey {
    pub fn backend_id(&self) -> BackendId {
        match self {
            Self::Lwe(_) => BackendId::Lwe,
            Self::InsecureXor(_) => BackendId::InsecureXor,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Self::Lwe(k) => k.to_bytes(),
            Self::InsecureXor(k) => k.to_bytes(PUBLIC_KEY_MAGIC),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PkeError> {
        let (id, _) = read_key_header(PUBLIC_KEY_MAGIC, bytes)?;
        Ok(match id {
            BackendId::Lwe => Self::Lwe(LwePublicKey::from_bytes(bytes)?),
            BackendId::InsecureXor => {
                Self::InsecureXor(InsecureXorKey::from_bytes(PUBLIC_KEY_MAGIC, bytes)?)
            }
        })
    }
}

impl AnySecretKey {
    pub fn backend_id(&self) -> BackendId {
        match self {
            Self::Lwe(_) => BackendId::Lwe,
            Self::InsecureXor(_) => BackendId::InsecureXor,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Self::Lwe(k) => k.to_bytes(),
            Self::InsecureXor(k) => k.to_bytes(SECRET_KEY_MAGIC),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PkeError> {
        let (id, _) = read_key_header(SECRET_KEY_MAGIC, bytes)?;
        Ok(match id {
            BackendId::Lwe => Self::Lwe(LweSecretKey::from_bytes(bytes)?),
            BackendId::InsecureXor => {
                Self::InsecureXor(InsecureXorKey::from_bytes(SECRET_KEY_MAGIC, bytes)?)
            }
        })
    }

    /// The backend this key belongs to, reconstructed from the key itself.
    pub fn backend(&self) -> AnyBackend {
        match self {
            Self::Lwe(k) => AnyBackend::Lwe(LweBackend::new(*k.params()).expect("validated key")),
            Self::InsecureXor(k) => AnyBackend::InsecureXor(InsecureXorBackend::new(k.len())),
        }
    }
}

impl AnyPublicKey {
    pub fn backend(&self) -> AnyBackend {
        match self {
            Self::Lwe(k) => AnyBackend::Lwe(LweBackend::new(*k.params()).expect("validated key")),
            Self::InsecureXor(k) => AnyBackend::InsecureXor(InsecureXorBackend::new(k.len())),
        }
    }
}

impl PkeBackend for AnyBackend {
    type PublicKey = AnyPublicKey;
    type SecretKey = AnySecretKey;

    fn id(&self) -> BackendId {
        match self {
            Self::Lwe(b) => b.id(),
            Self::InsecureXor(b) => b.id(),
        }
    }

    fn generate<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(AnyPublicKey, AnySecretKey), PkeError> {
        match self {
            Self::Lwe(b) => {
                let (pk, sk) = b.generate(rng)?;
                Ok((AnyPublicKey::Lwe(pk), AnySecretKey::Lwe(sk)))
            }
            Self::InsecureXor(b) => {
                let (pk, sk) = b.generate(rng)?;
                Ok((AnyPublicKey::InsecureXor(pk), AnySecretKey::InsecureXor(sk)))
            }
        }
    }

    fn encrypt<R: RngCore + ?Sized>(
        &self,
        pk: &AnyPublicKey,
        plaintext: &BitString,
        rng: &mut R,
    ) -> Result<Vec<u8>, PkeError> {
        match (self, pk) {
            (Self::Lwe(b), AnyPublicKey::Lwe(pk)) => b.encrypt(pk, plaintext, rng),
            (Self::InsecureXor(b), AnyPublicKey::InsecureXor(pk)) => b.encrypt(pk, plaintext, rng),
            _ => Err(PkeError::BackendMismatch),
        }
    }

    fn decrypt(&self, sk: &AnySecretKey, blob: &[u8]) -> Result<BitString, PkeError> {
        match (self, sk) {
            (Self::Lwe(b), AnySecretKey::Lwe(sk)) => b.decrypt(sk, blob),
            (Self::InsecureXor(b), AnySecretKey::InsecureXor(sk)) => b.decrypt(sk, blob),
            _ => Err(PkeError::BackendMismatch),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn key_files_round_trip_through_any() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for backend in [
            AnyBackend::Lwe(LweBackend::new(LweParams::default()).unwrap()),
            AnyBackend::InsecureXor(InsecureXorBackend::new(18)),
        ] {
            let (pk, sk) = backend.generate(&mut rng).unwrap();
            let pk_bytes = pk.to_bytes();
            let sk_bytes = sk.to_bytes();
            assert_eq!(&pk_bytes[..4], PUBLIC_KEY_MAGIC);
            assert_eq!(&sk_bytes[..4], SECRET_KEY_MAGIC);
            assert_eq!(pk_bytes[4], backend.id().as_byte());
            assert_eq!(pk_bytes[5], KEY_FORMAT_VERSION);
            assert_eq!(AnyPublicKey::from_bytes(&pk_bytes).unwrap(), pk);
            assert_eq!(AnySecretKey::from_bytes(&sk_bytes).unwrap(), sk);
            assert_eq!(sk.backend(), backend);
            assert_eq!(pk.backend(), backend);
            // A public key is not a secret key.
            assert!(AnySecretKey::from_bytes(&pk_bytes).is_err());
        }
    }

    #[test]
    fn key_parsing_rejects_bad_headers() {
        let (_, sk) = InsecureXorBackend::new(4)
            .generate(&mut ChaCha20Rng::seed_from_u64(0))
            .unwrap();
        let good = sk.to_bytes(SECRET_KEY_MAGIC);
        let mut bad_version = good.clone();
        bad_version[5] = 9;
        assert_eq!(
            AnySecretKey::from_bytes(&bad_version),
            Err(PkeError::Wire(WireError::Version(9)))
        );
        let mut bad_id = good.clone();
        bad_id[4] = 7;
        assert!(matches!(
            AnySecretKey::from_bytes(&bad_id),
            Err(PkeError::MalformedKey(_))
        ));
        let mut trailing = good.clone();
        trailing.push(1);
        assert!(AnySecretKey::from_bytes(&trailing).is_err());
        assert!(AnySecretKey::from_bytes(&good[..good.len() - 1]).is_err());
    }

    #[test]
    fn mismatched_backend_and_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let lwe = AnyBackend::Lwe(LweBackend::new(LweParams::default()).unwrap());
        let xor = AnyBackend::InsecureXor(InsecureXorBackend::new(18));
        let (pk, sk) = xor.generate(&mut rng).unwrap();
        let r = BitString::zeros(18);
        assert_eq!(
            lwe.encrypt(&pk, &r, &mut rng),
            Err(PkeError::BackendMismatch)
        );
        let blob = xor.encrypt(&pk, &r, &mut rng).unwrap();
        assert_eq!(lwe.decrypt(&sk, &blob), Err(PkeError::BackendMismatch));
    }

    #[test]
    fn fingerprint_is_stable_hex() {
        let fp = fingerprint(b"abc");
        assert_eq!(fp, "ba7816bf8f01cfea414140de5dae2223");
    }
}
