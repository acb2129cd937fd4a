//! Regev-style LWE encryption of individual bits.
//!
//! Key generation samples `s ∈ Z_q^dim`, a uniform `samples × dim` matrix
//! `A` and errors `e_i` uniform on `[-error_bound, error_bound]`, and
//! publishes `(A, b = A·s + e)`. A bit is encrypted by summing a uniformly
//! random subset of the rows of `(A, b)` and adding `bit·⌊q/2⌋` to the last
//! coordinate. Decryption rounds `c − ⟨a, s⟩` to the nearer of `0` and `⌊q/2⌋`.
//!
//! The accumulated error is at most `samples · error_bound`, so requiring
//! `q > 4·max(dim, samples)·error_bound + 4` makes decryption exact.

use rand::{Rng, RngCore};

use super::{
    read_key_header, write_key, BackendId, PkeBackend, PkeError, PUBLIC_KEY_MAGIC, SECRET_KEY_MAGIC,
};
use crate::bits::BitString;
use crate::wire::{Reader, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LweParams {
    pub dimension: usize,
    /// Odd prime below `2^32`.
    pub modulus: u32,
    pub error_bound: u32,
    /// Rows of the public matrix; each bit encryption sums a random subset.
    pub samples: usize,
}

impl Default for LweParams {
    fn default() -> Self {
        Self {
            dimension: 32,
            modulus: 12289,
            error_bound: 4,
            samples: 32,
        }
    }
}

impl LweParams {
    pub fn validate(&self) -> Result<(), PkeError> {
        if self.dimension == 0 || self.samples == 0 {
            return Err(PkeError::InvalidParams(
                "dimension and samples must be positive".into(),
            ));
        }
        if !is_odd_prime(self.modulus) {
            return Err(PkeError::InvalidParams(format!(
                "modulus {} is not an odd prime",
                self.modulus
            )));
        }
        let rows = self.dimension.max(self.samples) as u128;
        let bound = 4 * rows * self.error_bound as u128 + 4;
        if (self.modulus as u128) <= bound {
            return Err(PkeError::InvalidParams(format!(
                "modulus {} must exceed 4·{}·{} + 4 = {bound}",
                self.modulus, rows, self.error_bound
            )));
        }
        Ok(())
    }

    fn half(&self) -> u32 {
        self.modulus / 2
    }

    fn to_field(self) -> Vec<u8> {
        let mut w = Writer::new();
        w.u64(self.dimension as u64)
            .u64(self.modulus as u64)
            .u64(self.error_bound as u64)
            .u64(self.samples as u64);
        w.finish()
    }

    fn from_field(bytes: &[u8]) -> Result<Self, PkeError> {
        let mut r = Reader::new(bytes);
        let small = |v: u64| usize::try_from(v).ok().filter(|v| *v <= 1 << 20);
        let dimension = small(r.u64()?).ok_or(PkeError::MalformedKey("dimension"))?;
        let modulus = u32::try_from(r.u64()?).map_err(|_| PkeError::MalformedKey("modulus"))?;
        let error_bound =
            u32::try_from(r.u64()?).map_err(|_| PkeError::MalformedKey("error bound"))?;
        let samples = small(r.u64()?).ok_or(PkeError::MalformedKey("samples"))?;
        r.finish()?;
        let params = Self {
            dimension,
            modulus,
            error_bound,
            samples,
        };
        params
            .validate()
            .map_err(|_| PkeError::MalformedKey("invalid parameters"))?;
        Ok(params)
    }
}

fn is_odd_prime(q: u32) -> bool {
    if q < 3 || q.is_multiple_of(2) {
        return false;
    }
    let q = q as u64;
    let mut d = 3u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn encode_vec(values: &[u32]) -> Vec<u8> {
    values.iter().flat_map(|v| v.to_be_bytes()).collect()
}

fn decode_vec(bytes: &[u8], len: usize, q: u32) -> Result<Vec<u32>, PkeError> {
    if bytes.len() != len * 4 {
        return Err(PkeError::MalformedKey("vector length"));
    }
    bytes
        .chunks_exact(4)
        .map(|c| {
            let v = u32::from_be_bytes(c.try_into().expect("4 bytes"));
            if v < q {
                Ok(v)
            } else {
                Err(PkeError::MalformedKey("entry not reduced mod q"))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LwePublicKey {
    params: LweParams,
    /// Row-major `samples × dimension`.
    matrix: Vec<u32>,
    b: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LweSecretKey {
    params: LweParams,
    s: Vec<u32>,
}

impl LwePublicKey {
    pub fn params(&self) -> &LweParams {
        &self.params
    }

    pub fn row(&self, i: usize) -> &[u32] {
        let d = self.params.dimension;
        &self.matrix[i * d..(i + 1) * d]
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        write_key(
            PUBLIC_KEY_MAGIC,
            BackendId::Lwe,
            &[
                &self.params.to_field(),
                &encode_vec(&self.matrix),
                &encode_vec(&self.b),
            ],
        )
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PkeError> {
        let (id, mut r) = read_key_header(PUBLIC_KEY_MAGIC, bytes)?;
        if id != BackendId::Lwe {
            return Err(PkeError::BackendMismatch);
        }
        let params = LweParams::from_field(r.field()?)?;
        let q = params.modulus;
        let matrix = decode_vec(r.field()?, params.samples * params.dimension, q)?;
        let b = decode_vec(r.field()?, params.samples, q)?;
        r.finish()?;
        Ok(Self { params, matrix, b })
    }
}

impl LweSecretKey {
    /// Builds a key directly from a secret vector.
    pub fn from_secret(params: LweParams, s: Vec<u32>) -> Result<Self, PkeError> {
        params.validate()?;
        if s.len() != params.dimension || s.iter().any(|v| *v >= params.modulus) {
            return Err(PkeError::InvalidParams("secret vector shape".into()));
        }
        Ok(Self { params, s })
    }

    pub fn params(&self) -> &LweParams {
        &self.params
    }

    pub fn secret(&self) -> &[u32] {
        &self.s
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        write_key(
            SECRET_KEY_MAGIC,
            BackendId::Lwe,
            &[&self.params.to_field(), &encode_vec(&self.s)],
        )
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, PkeError> {
        let (id, mut r) = read_key_header(SECRET_KEY_MAGIC, bytes)?;
        if id != BackendId::Lwe {
            return Err(PkeError::BackendMismatch);
        }
        let params = LweParams::from_field(r.field()?)?;
        let s = decode_vec(r.field()?, params.dimension, params.modulus)?;
        r.finish()?;
        Ok(Self { params, s })
    }
}

/// Encryption of one bit: `(a, c)` with `c = ⟨a, s⟩ + e + bit·⌊q/2⌋ mod q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LweBitCiphertext {
    pub a: Vec<u32>,
    pub c: u32,
}

fn inner_mod(a: &[u32], s: &[u32], q: u32) -> u32 {
    let q = q as u64;
    a.iter()
        .zip(s)
        .fold(0u64, |acc, (x, y)| (acc + (*x as u64) * (*y as u64)) % q) as u32
}

pub fn encrypt_bit<R: RngCore + ?Sized>(
    pk: &LwePublicKey,
    bit: bool,
    rng: &mut R,
) -> LweBitCiphertext {
    let p = &pk.params;
    let q = p.modulus as u64;
    let mut a = vec![0u64; p.dimension];
    let mut c = 0u64;
    for i in 0..p.samples {
        if rng.gen::<bool>() {
            for (acc, x) in a.iter_mut().zip(pk.row(i)) {
                *acc = (*acc + *x as u64) % q;
            }
            c = (c + pk.b[i] as u64) % q;
        }
    }
    if bit {
        c = (c + p.half() as u64) % q;
    }
    LweBitCiphertext {
        a: a.into_iter().map(|v| v as u32).collect(),
        c: c as u32,
    }
}

/// Rounds `c − ⟨a, s⟩ mod q` to the nearer of `0` and `⌊q/2⌋`.
pub fn decrypt_bit(sk: &LweSecretKey, ct: &LweBitCiphertext) -> bool {
    let q = sk.params.modulus;
    let d = ((ct.c as u64 + q as u64 - inner_mod(&ct.a, &sk.s, q) as u64) % q as u64) as u32;
    let to_zero = d.min(q - d);
    let to_half = d.abs_diff(sk.params.half());
    to_half < to_zero
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LweBackend {
    params: LweParams,
}

impl LweBackend {
    pub fn new(params: LweParams) -> Result<Self, PkeError> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &LweParams {
        &self.params
    }

    fn uniform<R: RngCore + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.params.modulus)
    }
}

impl PkeBackend for LweBackend {
    type PublicKey = LwePublicKey;
    type SecretKey = LweSecretKey;

    fn id(&self) -> BackendId {
        BackendId::Lwe
    }

    fn generate<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(LwePublicKey, LweSecretKey), PkeError> {
        let p = self.params;
        let q = p.modulus as i64;
        let s: Vec<u32> = (0..p.dimension).map(|_| self.uniform(rng)).collect();
        let matrix: Vec<u32> = (0..p.samples * p.dimension)
            .map(|_| self.uniform(rng))
            .collect();
        let bound = p.error_bound as i64;
        let b = matrix
            .chunks_exact(p.dimension)
            .map(|row| {
                let e = rng.gen_range(-bound..=bound);
                (inner_mod(row, &s, p.modulus) as i64 + e).rem_euclid(q) as u32
            })
            .collect();
        Ok((
            LwePublicKey {
                params: p,
                matrix,
                b,
            },
            LweSecretKey { params: p, s },
        ))
    }

    /// Blob layout: backend id byte, 8-byte bit count, 8-byte dimension, then
    /// for every bit `dimension` entries of `a` followed by `c`, each a 4-byte
    /// big-endian integer.
    fn encrypt<R: RngCore + ?Sized>(
        &self,
        pk: &LwePublicKey,
        plaintext: &BitString,
        rng: &mut R,
    ) -> Result<Vec<u8>, PkeError> {
        if pk.params != self.params {
            return Err(PkeError::BackendMismatch);
        }
        let mut w = Writer::new();
        w.u8(BackendId::Lwe.as_byte())
            .u64(plaintext.len() as u64)
            .u64(self.params.dimension as u64);
        for bit in plaintext.iter() {
            let ct = encrypt_bit(pk, bit, rng);
            w.bytes(&encode_vec(&ct.a)).bytes(&ct.c.to_be_bytes());
        }
        Ok(w.finish())
    }

    fn decrypt(&self, sk: &LweSecretKey, blob: &[u8]) -> Result<BitString, PkeError> {
        let mut r = Reader::new(blob);
        let id = r.u8().map_err(|_| PkeError::MalformedCiphertext("empty"))?;
        if id != BackendId::Lwe.as_byte() {
            return Err(PkeError::BackendMismatch);
        }
        let count = r.u64()?;
        let dim = r.u64()?;
        if dim != sk.params.dimension as u64 {
            return Err(PkeError::MalformedCiphertext("dimension"));
        }
        let per_bit = 4 * (sk.params.dimension as u64 + 1);
        if count.checked_mul(per_bit) != Some(r.remaining() as u64) {
            return Err(PkeError::MalformedCiphertext("length"));
        }
        let q = sk.params.modulus;
        let mut out = BitString::with_capacity(count as usize);
        for _ in 0..count {
            let chunk = r.take(per_bit as usize)?;
            let mut values = decode_vec(chunk, sk.params.dimension + 1, q)
                .map_err(|_| PkeError::MalformedCiphertext("entry not reduced mod q"))?;
            let c = values.pop().expect("dimension + 1 entries");
            out.push(decrypt_bit(sk, &LweBitCiphertext { a: values, c }));
        }
        r.finish()?;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn toy(dimension: usize, modulus: u32, error_bound: u32) -> LweParams {
        LweParams {
            dimension,
            modulus,
            error_bound,
            samples: dimension,
        }
    }

    #[test]
    fn params_validation() {
        LweParams::default().validate().unwrap();
        toy(2, 17, 1).validate().unwrap();
        assert!(toy(2, 6, 0).validate().is_err());
        assert!(toy(2, 15, 0).validate().is_err());
        assert!(toy(2, 2, 0).validate().is_err());
        // 4·2·2 + 4 = 20 ≥ 17.
        assert!(toy(2, 17, 2).validate().is_err());
        // The bound uses the larger of dimension and samples.
        let wide = LweParams {
            samples: 8,
            ..toy(2, 17, 1)
        };
        assert!(wide.validate().is_err());
        assert!(LweBackend::new(toy(0, 17, 0)).is_err());
    }

    #[test]
    fn zero_error_key_is_exact() {
        let backend = LweBackend::new(toy(2, 17, 0)).unwrap();
        let (pk, sk) = backend
            .generate(&mut ChaCha20Rng::seed_from_u64(5))
            .unwrap();
        for i in 0..2 {
            assert_eq!(pk.b()[i], inner_mod(pk.row(i), sk.secret(), 17));
        }
    }

    #[test]
    fn keygen_is_deterministic_under_seed() {
        let backend = LweBackend::new(LweParams::default()).unwrap();
        let a = backend
            .generate(&mut ChaCha20Rng::seed_from_u64(9))
            .unwrap();
        let b = backend
            .generate(&mut ChaCha20Rng::seed_from_u64(9))
            .unwrap();
        assert_eq!(a, b);
        let c = backend
            .generate(&mut ChaCha20Rng::seed_from_u64(10))
            .unwrap();
        assert_ne!(a.1, c.1);
    }

    #[test]
    fn hand_computed_bit_ciphertexts() {
        let sk = LweSecretKey::from_secret(toy(2, 17, 0), vec![3, 5]).unwrap();
        // ⟨(1,2),(3,5)⟩ = 13; 13 + 8 = 21 ≡ 4 (mod 17).
        let one = LweBitCiphertext {
            a: vec![1, 2],
            c: 4,
        };
        assert!(decrypt_bit(&sk, &one));
        let zero = LweBitCiphertext {
            a: vec![1, 2],
            c: 13,
        };
        assert!(!decrypt_bit(&sk, &zero));
    }

    #[test]
    fn exhaustive_decryption_for_q17() {
        // Every secret, every a, every admissible error sum (two rows with
        // error bound 1), both bits.
        let params = toy(2, 17, 1);
        let max_err = (params.samples as i64) * params.error_bound as i64;
        for s0 in 0..17 {
            for s1 in 0..17 {
                let sk = LweSecretKey::from_secret(params, vec![s0, s1]).unwrap();
                for a0 in 0..17 {
                    for a1 in 0..17 {
                        let ip = ((a0 * s0 + a1 * s1) % 17) as i64;
                        for e in -max_err..=max_err {
                            for bit in [false, true] {
                                let c = (ip + e + if bit { 8 } else { 0 }).rem_euclid(17) as u32;
                                let ct = LweBitCiphertext { a: vec![a0, a1], c };
                                assert_eq!(decrypt_bit(&sk, &ct), bit);
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn completeness_under_default_params() {
        let backend = LweBackend::new(LweParams::default()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(77);
        for _ in 0..200 {
            let (pk, sk) = backend.generate(&mut rng).unwrap();
            let msg = crate::padding::random_bits(18, &mut rng);
            let blob = backend.encrypt(&pk, &msg, &mut rng).unwrap();
            assert_eq!(backend.decrypt(&sk, &blob).unwrap(), msg);
        }
    }

    #[test]
    fn encryption_is_probabilistic() {
        let backend = LweBackend::new(LweParams::default()).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let (pk, _) = backend.generate(&mut rng).unwrap();
        for bit in [false, true] {
            for _ in 0..500 {
                let x = encrypt_bit(&pk, bit, &mut rng);
                let y = encrypt_bit(&pk, bit, &mut rng);
                assert_ne!(x, y);
            }
        }
    }

    #[test]
    fn decrypt_rejects_malformed_blobs() {
        let backend = LweBackend::new(toy(2, 17, 1)).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pk, sk) = backend.generate(&mut rng).unwrap();
        let blob = backend
            .encrypt(&pk, &BitString::parse("101").unwrap(), &mut rng)
            .unwrap();
        assert!(backend.decrypt(&sk, &[]).is_err());
        assert!(backend.decrypt(&sk, &blob[..blob.len() - 1]).is_err());
        let mut extra = blob.clone();
        extra.extend_from_slice(&[0; 12]);
        assert!(backend.decrypt(&sk, &extra).is_err());
        let mut unreduced = blob.clone();
        let last = unreduced.len() - 1;
        unreduced[last] = 0xFF;
        assert!(backend.decrypt(&sk, &unreduced).is_err());
        let mut huge_count = blob.clone();
        huge_count[1..9].copy_from_slice(&u64::MAX.to_be_bytes());
        assert!(backend.decrypt(&sk, &huge_count).is_err());
    }

    #[test]
    fn keys_round_trip() {
        let backend = LweBackend::new(LweParams::default()).unwrap();
        let (pk, sk) = backend
            .generate(&mut ChaCha20Rng::seed_from_u64(1))
            .unwrap();
        assert_eq!(LwePublicKey::from_bytes(&pk.to_bytes()).unwrap(), pk);
        assert_eq!(LweSecretKey::from_bytes(&sk.to_bytes()).unwrap(), sk);
    }
}
