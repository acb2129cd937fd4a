//! INSECURE one-time-pad backend for tests.
//!
//! The public and secret keys are the same `k`-bit pad `p`, and
//! `Enc(x) = x ⊕ p`. Anyone holding the "public" key can decrypt. This
//! backend exists so scheme-level tests can exercise the padding without
//! lattice noise in the way; never use it to protect data.

use rand::RngCore;

use super::{read_key_header, write_key, BackendId, PkeBackend, PkeError};
use crate::bits::BitString;
use crate::padding::random_bits;
use crate::wire::{Reader, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InsecureXorBackend {
    k: usize,
}

/// The XOR pad; serves as both public and secret key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InsecureXorKey {
    pad: BitString,
}

impl InsecureXorKey {
    pub fn new(pad: BitString) -> Self {
        Self { pad }
    }

    pub fn pad(&self) -> &BitString {
        &self.pad
    }

    pub fn len(&self) -> usize {
        self.pad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pad.is_empty()
    }

    pub(crate) fn to_bytes(&self, magic: &[u8; 4]) -> Vec<u8> {
        let mut len = Writer::new();
        len.u64(self.pad.len() as u64);
        write_key(
            magic,
            BackendId::InsecureXor,
            &[&len.finish(), self.pad.as_packed()],
        )
    }

    pub(crate) fn from_bytes(magic: &[u8; 4], bytes: &[u8]) -> Result<Self, PkeError> {
        let (id, mut r) = read_key_header(magic, bytes)?;
        if id != BackendId::InsecureXor {
            return Err(PkeError::BackendMismatch);
        }
        let mut len_field = Reader::new(r.field()?);
        let k = len_field.u64()?;
        len_field.finish()?;
        let packed = r.field()?;
        r.finish()?;
        let pad = unpack_exact(packed, k).ok_or(PkeError::MalformedKey("pad"))?;
        Ok(Self { pad })
    }
}

/// Unpacks exactly `k` bits, requiring the minimal byte count and zero
/// trailing bits.
fn unpack_exact(packed: &[u8], k: u64) -> Option<BitString> {
    let k = usize::try_from(k).ok()?;
    if packed.len() != k.div_ceil(8) {
        return None;
    }
    let bits = BitString::from_packed(packed, k).ok()?;
    (bits.as_packed() == packed).then_some(bits)
}

fn xor(a: &BitString, b: &BitString) -> BitString {
    a.iter().zip(b.iter()).map(|(x, y)| x ^ y).collect()
}

impl InsecureXorBackend {
    pub fn new(k: usize) -> Self {
        Self { k }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn check_len(&self, got: usize) -> Result<(), PkeError> {
        if got != self.k {
            return Err(PkeError::PlaintextLength {
                expected: self.k,
                got,
            });
        }
        Ok(())
    }
}

impl PkeBackend for InsecureXorBackend {
    type PublicKey = InsecureXorKey;
    type SecretKey = InsecureXorKey;

    fn id(&self) -> BackendId {
        BackendId::InsecureXor
    }

    fn generate<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(InsecureXorKey, InsecureXorKey), PkeError> {
        let key = InsecureXorKey::new(random_bits(self.k, rng));
        Ok((key.clone(), key))
    }

    /// Blob layout: backend id byte, 8-byte bit count, packed `x ⊕ p`.
    fn encrypt<R: RngCore + ?Sized>(
        &self,
        pk: &InsecureXorKey,
        plaintext: &BitString,
        _rng: &mut R,
    ) -> Result<Vec<u8>, PkeError> {
        self.check_len(plaintext.len())?;
        self.check_len(pk.len())?;
        let body = xor(plaintext, &pk.pad);
        let mut w = Writer::new();
        w.u8(BackendId::InsecureXor.as_byte())
            .u64(body.len() as u64)
            .bytes(body.as_packed());
        Ok(w.finish())
    }

    fn decrypt(&self, sk: &InsecureXorKey, blob: &[u8]) -> Result<BitString, PkeError> {
        self.check_len(sk.len())?;
        let mut r = Reader::new(blob);
        let id = r.u8().map_err(|_| PkeError::MalformedCiphertext("empty"))?;
        if id != BackendId::InsecureXor.as_byte() {
            return Err(PkeError::BackendMismatch);
        }
        let k = r.u64()?;
        if k != self.k as u64 {
            return Err(PkeError::MalformedCiphertext("length"));
        }
        let rest = r.take(r.remaining())?;
        let body = unpack_exact(rest, k).ok_or(PkeError::MalformedCiphertext("body"))?;
        Ok(xor(&body, &sk.pad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn all_strings(k: usize) -> impl Iterator<Item = BitString> {
        (0u32..1 << k).map(move |x| BitString::from_integer(&x.into(), k).unwrap())
    }

    #[test]
    fn zero_pad_is_identity() {
        let backend = InsecureXorBackend::new(5);
        let key = InsecureXorKey::new(BitString::zeros(5));
        let x = BitString::parse("10110").unwrap();
        let blob = backend.encrypt(&key, &x, &mut rand::thread_rng()).unwrap();
        assert_eq!(&blob[9..], x.as_packed());
    }

    #[test]
    fn exhaustive_round_trip_and_involution() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        for k in 1..=8 {
            let backend = InsecureXorBackend::new(k);
            for key in all_strings(k).map(InsecureXorKey::new) {
                for x in all_strings(k) {
                    let blob = backend.encrypt(&key, &x, &mut rng).unwrap();
                    let y = backend.decrypt(&key, &blob).unwrap();
                    assert_eq!(y, x);
                    // Encrypting the ciphertext body again strips the pad.
                    let body = BitString::from_packed(&blob[9..], k).unwrap();
                    let twice = backend.encrypt(&key, &body, &mut rng).unwrap();
                    assert_eq!(&twice[9..], x.as_packed());
                }
            }
        }
    }

    #[test]
    fn length_checks() {
        let backend = InsecureXorBackend::new(3);
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let (pk, sk) = backend.generate(&mut rng).unwrap();
        assert_eq!(
            backend.encrypt(&pk, &BitString::zeros(4), &mut rng),
            Err(PkeError::PlaintextLength {
                expected: 3,
                got: 4
            })
        );
        let blob = backend
            .encrypt(&pk, &BitString::zeros(3), &mut rng)
            .unwrap();
        let mut dirty_tail = blob.clone();
        dirty_tail[9] |= 0x01;
        assert!(backend.decrypt(&sk, &dirty_tail).is_err());
        let mut extra = blob.clone();
        extra.push(0);
        assert!(backend.decrypt(&sk, &extra).is_err());
    }

    #[test]
    fn seeded_keygen_reproducible() {
        let backend = InsecureXorBackend::new(3);
        let a = backend
            .generate(&mut ChaCha20Rng::seed_from_u64(4))
            .unwrap();
        let b = backend
            .generate(&mut ChaCha20Rng::seed_from_u64(4))
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.0.len(), 3);
    }
}
