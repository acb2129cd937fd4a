//! Reference adversaries for the experiment harness. None of these attacks
//! the scheme; they check that the harness itself behaves.

use rand::{Rng, RngCore};

use super::{Adversary, DecryptionOracle, GameError, OracleResponse};
use crate::bits::BitString;
use crate::padding::random_bits;
use crate::pke::PkeBackend;
use crate::scheme::UrdpCiphertext;

fn random_pair(bits: usize, rng: &mut dyn RngCore) -> (BitString, BitString) {
    (random_bits(bits, rng), random_bits(bits, rng))
}

/// Ignores everything and guesses uniformly.
#[derive(Debug, Clone)]
pub struct CoinFlip {
    bits: usize,
}

impl CoinFlip {
    pub fn new(message_bits: usize) -> Self {
        Self { bits: message_bits }
    }
}

impl<B: PkeBackend> Adversary<B> for CoinFlip {
    fn choose(
        &mut self,
        _: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<(BitString, BitString), GameError> {
        Ok(random_pair(self.bits, rng))
    }

    fn guess(
        &mut self,
        _: &UrdpCiphertext,
        _: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<bool, GameError> {
        Ok(rng.gen())
    }
}

/// Always answers `b' = 0`.
#[derive(Debug, Clone)]
pub struct AlwaysZero {
    bits: usize,
}

impl AlwaysZero {
    pub fn new(message_bits: usize) -> Self {
        Self { bits: message_bits }
    }
}

impl<B: PkeBackend> Adversary<B> for AlwaysZero {
    fn choose(
        &mut self,
        _: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<(BitString, BitString), GameError> {
        Ok(random_pair(self.bits, rng))
    }

    fn guess(
        &mut self,
        _: &UrdpCiphertext,
        _: &mut DecryptionOracle<'_, B>,
        _: &mut dyn RngCore,
    ) -> Result<bool, GameError> {
        Ok(false)
    }
}

/// Decrypts the challenge with a secret key leaked out of band. Only
/// meaningful under [`super::KeyExposure::Leaked`]; without the key it
/// falls back to guessing 0.
pub struct Omniscient<B: PkeBackend> {
    bits: usize,
    sk: Option<B::SecretKey>,
    m0: Option<BitString>,
}

impl<B: PkeBackend> Default for Omniscient<B> {
    fn default() -> Self {
        Self {
            bits: 64,
            sk: None,
            m0: None,
        }
    }
}

impl<B: PkeBackend> Adversary<B> for Omniscient<B> {
    fn choose(
        &mut self,
        _: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<(BitString, BitString), GameError> {
        let (m0, mut m1) = random_pair(self.bits, rng);
        if m0 == m1 {
            m1.flip(0);
        }
        self.m0 = Some(m0.clone());
        Ok((m0, m1))
    }

    fn guess(
        &mut self,
        challenge: &UrdpCiphertext,
        oracle: &mut DecryptionOracle<'_, B>,
        _: &mut dyn RngCore,
    ) -> Result<bool, GameError> {
        let Some(sk) = &self.sk else {
            return Ok(false);
        };
        let m = oracle.scheme().decrypt(sk, challenge).ok();
        Ok(m.as_ref() != self.m0.as_ref())
    }

    fn receive_secret_key(&mut self, sk: &B::SecretKey) {
        self.sk = Some(sk.clone());
    }
}

/// Replays the challenge verbatim, then submits it with one bit of `C1`
/// flipped, then guesses uniformly. Counts how often the replay was refused.
#[derive(Debug, Clone)]
pub struct ReplayChallenge {
    bits: usize,
    attempts: usize,
    refusals: usize,
}

impl ReplayChallenge {
    pub fn new(message_bits: usize) -> Self {
        Self {
            bits: message_bits,
            attempts: 0,
            refusals: 0,
        }
    }

    pub fn attempts(&self) -> usize {
        self.attempts
    }

    pub fn refusals(&self) -> usize {
        self.refusals
    }
}

impl<B: PkeBackend> Adversary<B> for ReplayChallenge {
    fn choose(
        &mut self,
        _: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<(BitString, BitString), GameError> {
        Ok(random_pair(self.bits, rng))
    }

    fn guess(
        &mut self,
        challenge: &UrdpCiphertext,
        oracle: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<bool, GameError> {
        self.attempts += 1;
        if oracle.query(challenge) == OracleResponse::Refused {
            self.refusals += 1;
        }
        let mut tweaked = challenge.clone();
        tweaked.c1 ^= num_bigint::BigUint::from(1u8);
        oracle.query(&tweaked);
        Ok(rng.gen())
    }
}

/// Before the challenge, encrypts `m0` itself and asks the oracle to decrypt
/// it, recording whether the answer matched. Guesses uniformly.
#[derive(Debug, Clone)]
pub struct HonestQuery {
    bits: usize,
    mismatches: usize,
}

impl HonestQuery {
    pub fn new(message_bits: usize) -> Self {
        Self {
            bits: message_bits,
            mismatches: 0,
        }
    }

    pub fn mismatches(&self) -> usize {
        self.mismatches
    }
}

impl<B: PkeBackend> Adversary<B> for HonestQuery {
    fn choose(
        &mut self,
        oracle: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<(BitString, BitString), GameError> {
        let (m0, m1) = random_pair(self.bits, rng);
        let c = oracle.scheme().encrypt(oracle.public_key(), &m0, rng)?;
        if oracle.query(&c) != OracleResponse::Message(m0.clone()) {
            self.mismatches += 1;
        }
        Ok((m0, m1))
    }

    fn guess(
        &mut self,
        _: &UrdpCiphertext,
        _: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<bool, GameError> {
        Ok(rng.gen())
    }
}
