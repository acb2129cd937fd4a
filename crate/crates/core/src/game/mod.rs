//! Executable IND-CCA2 experiment.
//!
//! [`run_experiment`] plays one round of the two-stage game:
//!
//! ```text
//! (pk, sk) ← Gen
//! (m0, m1) ← A.choose(pk)        with Dec(sk, ·)
//! b ← {0, 1};  C* ← Enc(pk, m_b)
//! b' ← A.guess(C*)               with Dec(sk, ·) except on C*
//! win = (b' = b)
//! ```
//!
//! The challenge is excluded by byte equality of serialized ciphertexts; the
//! oracle answers a replay with [`OracleResponse::Refused`] rather than ⊥.
//! [`estimate_advantage`] repeats the experiment and reports `|win − 1/2|`
//! with a 95% normal-approximation half-width.
//!
//! The [`scenario`] submodule runs the tampering games, and [`adversaries`]
//! collects reference adversaries.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::pke::PkeBackend;
use crate::scheme::{DecryptError, EncryptionTrace, SchemeError, Urdp, UrdpCiphertext};

pub mod adversaries;
pub mod scenario;

pub use scenario::{scenario_tamper, ScenarioConfig, ScenarioStats, TamperVariant, TrialOutcome};

/// z-score for a two-sided 95% interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("adversary broke the protocol: {0}")]
    Protocol(String),
    #[error("invalid game parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    BeforeChallenge,
    AfterChallenge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleResponse {
    Message(BitString),
    /// ⊥
    Rejected,
    /// The query was the challenge ciphertext.
    Refused,
    /// The bytes did not parse as a ciphertext.
    Malformed,
}

#[derive(Debug, Clone)]
pub struct QueryRecord {
    pub phase: Phase,
    pub ciphertext: Vec<u8>,
    pub response: OracleResponse,
}

/// Decryption oracle handed to the adversary. Holds the secret key and logs
/// every query.
pub struct DecryptionOracle<'a, B: PkeBackend> {
    scheme: &'a Urdp<B>,
    pk: &'a B::PublicKey,
    sk: &'a B::SecretKey,
    challenge: Option<Vec<u8>>,
    log: Vec<QueryRecord>,
}

impl<'a, B: PkeBackend> DecryptionOracle<'a, B> {
    fn new(scheme: &'a Urdp<B>, pk: &'a B::PublicKey, sk: &'a B::SecretKey) -> Self {
        Self {
            scheme,
            pk,
            sk,
            challenge: None,
            log: Vec::new(),
        }
    }

    pub fn scheme(&self) -> &'a Urdp<B> {
        self.scheme
    }

    pub fn public_key(&self) -> &'a B::PublicKey {
        self.pk
    }

    pub fn phase(&self) -> Phase {
        if self.challenge.is_some() {
            Phase::AfterChallenge
        } else {
            Phase::BeforeChallenge
        }
    }

    pub fn query(&mut self, c: &UrdpCiphertext) -> OracleResponse {
        self.query_bytes(&c.to_bytes())
    }

    pub fn query_bytes(&mut self, bytes: &[u8]) -> OracleResponse {
        let response = if self.challenge.as_deref() == Some(bytes) {
            OracleResponse::Refused
        } else {
            match self.scheme.decrypt_bytes(self.sk, bytes) {
                Ok(m) => OracleResponse::Message(m),
                Err(DecryptError::Rejected(_)) => OracleResponse::Rejected,
                Err(DecryptError::Format(_)) => OracleResponse::Malformed,
            }
        };
        self.log.push(QueryRecord {
            phase: self.phase(),
            ciphertext: bytes.to_vec(),
            response: response.clone(),
        });
        response
    }

    pub fn queries(&self) -> &[QueryRecord] {
        &self.log
    }
}

/// A two-stage adversary. Any state carried from `choose` to `guess` lives
/// in `self`.
pub trait Adversary<B: PkeBackend> {
    /// Outputs two messages of equal, non-zero length.
    fn choose(
        &mut self,
        oracle: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<(BitString, BitString), GameError>;

    fn guess(
        &mut self,
        challenge: &UrdpCiphertext,
        oracle: &mut DecryptionOracle<'_, B>,
        rng: &mut dyn RngCore,
    ) -> Result<bool, GameError>;

    /// Called before `choose` when the experiment runs with
    /// [`KeyExposure::Leaked`]. Used only for sanity-ceiling tests.
    fn receive_secret_key(&mut self, _sk: &B::SecretKey) {}
}

/// Whether the experiment hands the secret key to the adversary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KeyExposure {
    #[default]
    Hidden,
    Leaked,
}

#[derive(Debug, Clone)]
pub struct GameTranscript {
    pub m0: BitString,
    pub m1: BitString,
    pub b: bool,
    pub c_star: UrdpCiphertext,
    /// `r*`, `s*`, `m'*`, `y*` of the challenge encryption.
    pub challenge_trace: EncryptionTrace,
    pub queries: Vec<QueryRecord>,
    pub b_guess: bool,
}

impl GameTranscript {
    pub fn won(&self) -> bool {
        self.b == self.b_guess
    }

    pub fn refusals(&self) -> usize {
        self.queries
            .iter()
            .filter(|q| q.response == OracleResponse::Refused)
            .count()
    }
}

pub fn run_experiment<B, A, R>(
    scheme: &Urdp<B>,
    adversary: &mut A,
    rng: &mut R,
) -> Result<(bool, GameTranscript), GameError>
where
    B: PkeBackend,
    A: Adversary<B> + ?Sized,
    R: RngCore + ?Sized,
{
    run_experiment_with(scheme, adversary, KeyExposure::Hidden, rng)
}

pub fn run_experiment_with<B, A, R>(
    scheme: &Urdp<B>,
    adversary: &mut A,
    exposure: KeyExposure,
    rng: &mut R,
) -> Result<(bool, GameTranscript), GameError>
where
    B: PkeBackend,
    A: Adversary<B> + ?Sized,
    R: RngCore + ?Sized,
{
    let mut rng = ChaCha20Rng::from_rng(rng).map_err(|e| GameError::Params(e.to_string()))?;
    let (pk, sk) = scheme.keygen(&mut rng)?;
    if exposure == KeyExposure::Leaked {
        adversary.receive_secret_key(&sk);
    }
    let mut oracle = DecryptionOracle::new(scheme, &pk, &sk);

    let (m0, m1) = adversary.choose(&mut oracle, &mut rng)?;
    if m0.len() != m1.len() {
        return Err(GameError::Protocol(format!(
            "challenge messages differ in length ({} vs {})",
            m0.len(),
            m1.len()
        )));
    }
    if m0.is_empty() {
        return Err(GameError::Protocol("challenge messages are empty".into()));
    }

    let b: bool = rng.gen();
    let (c_star, challenge_trace) =
        scheme.encrypt_traced(&pk, if b { &m1 } else { &m0 }, &mut rng)?;
    oracle.challenge = Some(c_star.to_bytes());

    let b_guess = adversary.guess(&c_star, &mut oracle, &mut rng)?;
    let transcript = GameTranscript {
        m0,
        m1,
        b,
        c_star,
        challenge_trace,
        queries: oracle.log,
        b_guess,
    };
    Ok((transcript.won(), transcript))
}

/// One experiment's summary line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ExperimentRecord {
    pub trial: usize,
    pub b: u8,
    pub guess: u8,
    pub win: bool,
    pub queries: usize,
    pub refusals: usize,
}

#[derive(Debug, Clone)]
pub struct AdvantageEstimate {
    pub trials: usize,
    pub wins: usize,
    pub win_rate: f64,
    /// `|win_rate − 1/2|`
    pub advantage: f64,
    /// 95% half-width of the win-rate interval.
    pub half_width: f64,
    pub records: Vec<ExperimentRecord>,
}

impl AdvantageEstimate {
    fn from_records(records: Vec<ExperimentRecord>) -> Self {
        let trials = records.len();
        let wins = records.iter().filter(|r| r.win).count();
        let p = wins as f64 / trials as f64;
        Self {
            trials,
            wins,
            win_rate: p,
            advantage: (p - 0.5).abs(),
            half_width: Z_95 * (p * (1.0 - p) / trials as f64).sqrt(),
            records,
        }
    }

    /// Upper end of the 95% interval for the advantage.
    pub fn upper_bound(&self) -> f64 {
        self.advantage + self.half_width
    }
}

pub const MIN_TRIALS: usize = 100;

pub fn estimate_advantage<B, A, R>(
    scheme: &Urdp<B>,
    adversary: &mut A,
    trials: usize,
    rng: &mut R,
) -> Result<AdvantageEstimate, GameError>
where
    B: PkeBackend,
    A: Adversary<B> + ?Sized,
    R: RngCore + ?Sized,
{
    estimate_advantage_with(scheme, adversary, trials, KeyExposure::Hidden, rng)
}

pub fn estimate_advantage_with<B, A, R>(
    scheme: &Urdp<B>,
    adversary: &mut A,
    trials: usize,
    exposure: KeyExposure,
    rng: &mut R,
) -> Result<AdvantageEstimate, GameError>
where
    B: PkeBackend,
    A: Adversary<B> + ?Sized,
    R: RngCore + ?Sized,
{
    if trials < MIN_TRIALS {
        return Err(GameError::Params(format!(
            "need at least {MIN_TRIALS} trials, got {trials}"
        )));
    }
    let mut records = Vec::with_capacity(trials);
    for trial in 0..trials {
        let (win, t) = run_experiment_with(scheme, adversary, exposure, rng)?;
        records.push(ExperimentRecord {
            trial,
            b: t.b as u8,
            guess: t.b_guess as u8,
            win,
            queries: t.queries.len(),
            refusals: t.refusals(),
        });
    }
    Ok(AdvantageEstimate::from_records(records))
}

#[cfg(test)]
mod tests {
    use super::adversaries::{AlwaysZero, CoinFlip, HonestQuery, Omniscient, ReplayChallenge};
    use super::*;
    use crate::pke::{InsecureXorBackend, LweBackend, LweParams};
    use crate::scheme::SchemeConfig;

    fn xor_scheme() -> Urdp<InsecureXorBackend> {
        Urdp::new(InsecureXorBackend::new(18), SchemeConfig::default()).unwrap()
    }

    struct Unequal;

    impl<B: PkeBackend> Adversary<B> for Unequal {
        fn choose(
            &mut self,
            _: &mut DecryptionOracle<'_, B>,
            _: &mut dyn RngCore,
        ) -> Result<(BitString, BitString), GameError> {
            Ok((BitString::zeros(3), BitString::zeros(4)))
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

    #[test]
    fn unequal_lengths_are_a_protocol_error() {
        let err = run_experiment(
            &xor_scheme(),
            &mut Unequal,
            &mut ChaCha20Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(matches!(err, GameError::Protocol(_)));
    }

    #[test]
    fn replay_is_refused_and_logged() {
        let scheme = xor_scheme();
        let mut adv = ReplayChallenge::new(64);
        let (_, t) = run_experiment(&scheme, &mut adv, &mut ChaCha20Rng::seed_from_u64(1)).unwrap();
        let after: Vec<_> = t
            .queries
            .iter()
            .filter(|q| q.phase == Phase::AfterChallenge)
            .collect();
        assert_eq!(after[0].response, OracleResponse::Refused);
        assert_eq!(after[0].ciphertext, t.c_star.to_bytes());
        // The single-bit variant of C* is answered.
        assert_ne!(after[1].response, OracleResponse::Refused);
        assert_eq!(t.refusals(), 1);
        assert_eq!(adv.attempts(), 1);
        assert_eq!(adv.refusals(), 1);
    }

    #[test]
    fn oracle_decrypts_honest_ciphertexts_before_challenge() {
        let scheme = Urdp::new(
            LweBackend::new(LweParams::default()).unwrap(),
            SchemeConfig::default(),
        )
        .unwrap();
        let mut adv = HonestQuery::new(100);
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..5 {
            let (_, t) = run_experiment(&scheme, &mut adv, &mut rng).unwrap();
            assert_eq!(t.queries[0].phase, Phase::BeforeChallenge);
            assert_eq!(t.queries[0].response, OracleResponse::Message(t.m0.clone()));
        }
        assert_eq!(adv.mismatches(), 0);
    }

    #[test]
    fn null_adversaries_have_small_advantage() {
        let scheme = xor_scheme();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let coin = estimate_advantage(&scheme, &mut CoinFlip::new(32), 2000, &mut rng).unwrap();
        assert!(coin.advantage <= 0.05, "{coin:?}");
        let zero = estimate_advantage(&scheme, &mut AlwaysZero::new(32), 2000, &mut rng).unwrap();
        assert!(zero.advantage <= 0.05, "{}", zero.advantage);
        assert_eq!(zero.records.iter().filter(|r| r.guess == 1).count(), 0);
    }

    #[test]
    fn leaked_key_gives_full_advantage() {
        let scheme = xor_scheme();
        let est = estimate_advantage_with(
            &scheme,
            &mut Omniscient::default(),
            200,
            KeyExposure::Leaked,
            &mut ChaCha20Rng::seed_from_u64(4),
        )
        .unwrap();
        assert!(est.advantage >= 0.45);
    }

    #[test]
    fn too_few_trials() {
        assert!(matches!(
            estimate_advantage(
                &xor_scheme(),
                &mut CoinFlip::new(8),
                99,
                &mut ChaCha20Rng::seed_from_u64(0)
            ),
            Err(GameError::Params(_))
        ));
    }

    #[test]
    fn seeded_experiments_are_reproducible() {
        let scheme = xor_scheme();
        let run = || {
            let mut rng = ChaCha20Rng::seed_from_u64(42);
            (0..20)
                .map(|_| {
                    let (_, t) =
                        run_experiment(&scheme, &mut ReplayChallenge::new(40), &mut rng).unwrap();
                    (
                        t.c_star.to_bytes(),
                        t.b,
                        t.b_guess,
                        t.queries
                            .iter()
                            .map(|q| q.ciphertext.clone())
                            .collect::<Vec<_>>(),
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
