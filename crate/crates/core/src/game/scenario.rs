//! Tampering scenarios.
//!
//! Each trial builds an honest challenge `C* = (C1*, C2*)` for a random
//! `m_b`, derives a tampered ciphertext according to the variant, feeds it
//! to the real decryptor and classifies the result:
//!
//! * `Game1`: fresh `C2 = Enc(r')` with `r' ≠ r*`, `wt(r') = h*`, and
//!   `C1 = h*·y'` for a fresh uniform `ℓ*`-bit `y' ≠ y*`;
//! * `Game2`: the same fresh `C2`, but `C1 = C1*`;
//! * `Game3`: `C2 = C2*`, and `C1` uniform over `ℓ*`-bit integers, `≠ C1*`.
//!
//! The harness measures how often the decryptor rejects, returns some
//! other message, or returns `m_b` itself; it does not presume the answer.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_bigint::{BigUint, RandBigInt};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use super::GameError;
use crate::bits::BitString;
use crate::padding::{random_bits, SelectorVector};
use crate::pke::PkeBackend;
use crate::scheme::{RejectReason, Urdp, UrdpCiphertext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TamperVariant {
    Game1,
    Game2,
    Game3,
}

impl TamperVariant {
    pub const ALL: [Self; 3] = [Self::Game1, Self::Game2, Self::Game3];

    pub fn name(self) -> &'static str {
        match self {
            Self::Game1 => "game1",
            Self::Game2 => "game2",
            Self::Game3 => "game3",
        }
    }
}

impl fmt::Display for TamperVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TamperVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown tamper variant {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Rejected(RejectReason),
    WrongMessage,
    RecoveredMb,
}

impl TrialOutcome {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rejected(_) => "rejected",
            Self::WrongMessage => "wrong_message",
            Self::RecoveredMb => "recovered_mb",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub variant: TamperVariant,
    pub trial: usize,
    pub outcome: &'static str,
    pub reason: Option<&'static str>,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    /// Length of the random challenge messages.
    pub message_bits: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self { message_bits: 256 }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioStats {
    pub variant: TamperVariant,
    pub trials: usize,
    pub rejected: usize,
    pub wrong_message: usize,
    pub recovered_mb: usize,
    pub records: Vec<TrialRecord>,
}

#[derive(Serialize)]
struct Summary<'a> {
    summary: bool,
    variant: &'a TamperVariant,
    trials: usize,
    rejected: usize,
    wrong_message: usize,
    recovered_mb: usize,
}

impl ScenarioStats {
    fn new(variant: TamperVariant) -> Self {
        Self {
            variant,
            trials: 0,
            rejected: 0,
            wrong_message: 0,
            recovered_mb: 0,
            records: Vec::new(),
        }
    }

    fn record(&mut self, outcome: TrialOutcome) {
        match outcome {
            TrialOutcome::Rejected(_) => self.rejected += 1,
            TrialOutcome::WrongMessage => self.wrong_message += 1,
            TrialOutcome::RecoveredMb => self.recovered_mb += 1,
        }
        self.records.push(TrialRecord {
            variant: self.variant,
            trial: self.trials,
            outcome: outcome.name(),
            reason: match outcome {
                TrialOutcome::Rejected(r) => Some(r.code()),
                _ => None,
            },
        });
        self.trials += 1;
    }

    /// Count of each rejection reason code.
    pub fn reason_counts(&self) -> Vec<(&'static str, usize)> {
        let mut counts: Vec<(&'static str, usize)> = Vec::new();
        for reason in self.records.iter().filter_map(|r| r.reason) {
            match counts.iter_mut().find(|(c, _)| *c == reason) {
                Some((_, n)) => *n += 1,
                None => counts.push((reason, 1)),
            }
        }
        counts
    }

    /// One JSON object per trial, then a summary object.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for r in &self.records {
            serde_json::to_writer(&mut out, r)?;
            out.write_all(b"\n")?;
        }
        self.write_summary(out)
    }

    pub fn write_summary<W: Write>(&self, mut out: W) -> io::Result<()> {
        serde_json::to_writer(
            &mut out,
            &Summary {
                summary: true,
                variant: &self.variant,
                trials: self.trials,
                rejected: self.rejected,
                wrong_message: self.wrong_message,
                recovered_mb: self.recovered_mb,
            },
        )?;
        out.write_all(b"\n")
    }
}

/// A uniformly random selector of weight `h` different from `avoid`.
fn reselect<R: RngCore + ?Sized>(avoid: &SelectorVector, rng: &mut R) -> SelectorVector {
    let k = avoid.len();
    let mut positions: Vec<usize> = (0..k).collect();
    loop {
        positions.shuffle(rng);
        let mut bits = BitString::zeros(k);
        for &p in &positions[..avoid.weight()] {
            bits.set(p, true);
        }
        let sel = SelectorVector::new(bits).expect("0 < h < k preserved");
        if &sel != avoid {
            return sel;
        }
    }
}

fn random_below_pow2<R: RngCore + ?Sized>(bits: u64, avoid: &BigUint, rng: &mut R) -> BigUint {
    let mut rng = ChaCha20Rng::from_rng(rng).expect("chacha seeding");
    loop {
        let v = rng.gen_biguint(bits);
        if &v != avoid {
            return v;
        }
    }
}

pub fn scenario_tamper<B, R>(
    scheme: &Urdp<B>,
    variant: TamperVariant,
    trials: usize,
    rng: &mut R,
) -> Result<ScenarioStats, GameError>
where
    B: PkeBackend,
    R: RngCore + ?Sized,
{
    scenario_tamper_with(scheme, variant, trials, &ScenarioConfig::default(), rng)
}

pub fn scenario_tamper_with<B, R>(
    scheme: &Urdp<B>,
    variant: TamperVariant,
    trials: usize,
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<ScenarioStats, GameError>
where
    B: PkeBackend,
    R: RngCore + ?Sized,
{
    if trials == 0 {
        return Err(GameError::Params("trials must be at least 1".into()));
    }
    if config.message_bits == 0 {
        return Err(GameError::Params("message_bits must be positive".into()));
    }
    let mut stats = ScenarioStats::new(variant);
    for _ in 0..trials {
        // Independent stream per trial.
        let mut trial_rng =
            ChaCha20Rng::from_rng(&mut *rng).map_err(|e| GameError::Params(e.to_string()))?;
        let outcome = run_trial(scheme, variant, config, &mut trial_rng)?;
        stats.record(outcome);
    }
    Ok(stats)
}

fn run_trial<B: PkeBackend>(
    scheme: &Urdp<B>,
    variant: TamperVariant,
    config: &ScenarioConfig,
    rng: &mut ChaCha20Rng,
) -> Result<TrialOutcome, GameError> {
    let (pk, sk) = scheme.keygen(rng)?;
    let m0 = random_bits(config.message_bits, rng);
    let m1 = random_bits(config.message_bits, rng);
    let m_b = if rng.gen() { m1 } else { m0 };
    let (c_star, trace) = scheme.encrypt_traced(&pk, &m_b, rng)?;
    let h_star = trace.selector.weight();

    let tampered = match variant {
        TamperVariant::Game1 => {
            let r = reselect(&trace.selector, rng);
            let y = random_below_pow2(c_star.ell, &trace.y, rng);
            UrdpCiphertext {
                c1: y * BigUint::from(h_star),
                c2: scheme
                    .backend()
                    .encrypt(&pk, r.bits(), rng)
                    .map_err(crate::SchemeError::from)?,
                ..c_star.clone()
            }
        }
        TamperVariant::Game2 => {
            let r = reselect(&trace.selector, rng);
            UrdpCiphertext {
                c2: scheme
                    .backend()
                    .encrypt(&pk, r.bits(), rng)
                    .map_err(crate::SchemeError::from)?,
                ..c_star.clone()
            }
        }
        TamperVariant::Game3 => UrdpCiphertext {
            c1: random_below_pow2(c_star.ell, &c_star.c1, rng),
            ..c_star.clone()
        },
    };
    debug_assert_ne!(tampered.to_bytes(), c_star.to_bytes());

    Ok(match scheme.decrypt(&sk, &tampered) {
        Err(rej) => TrialOutcome::Rejected(rej.reason()),
        Ok(m) if m == m_b => TrialOutcome::RecoveredMb,
        Ok(_) => TrialOutcome::WrongMessage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pke::{InsecureXorBackend, LweBackend, LweParams};
    use crate::scheme::SchemeConfig;

    #[test]
    fn zero_trials_rejected() {
        let scheme = Urdp::new(InsecureXorBackend::new(18), SchemeConfig::default()).unwrap();
        assert!(matches!(
            scenario_tamper(
                &scheme,
                TamperVariant::Game1,
                0,
                &mut ChaCha20Rng::seed_from_u64(0)
            ),
            Err(GameError::Params(_))
        ));
    }

    #[test]
    fn reselect_keeps_weight_and_differs() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..200 {
            let sel = SelectorVector::random(5, &mut rng).unwrap();
            let other = reselect(&sel, &mut rng);
            assert_eq!(other.weight(), sel.weight());
            assert_ne!(other, sel);
        }
    }

    #[test]
    fn counts_partition_trials() {
        let scheme = Urdp::new(
            LweBackend::new(LweParams::default()).unwrap(),
            SchemeConfig::default(),
        )
        .unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for variant in TamperVariant::ALL {
            let stats = scenario_tamper(&scheme, variant, 50, &mut rng).unwrap();
            assert_eq!(
                stats.rejected + stats.wrong_message + stats.recovered_mb,
                50
            );
            assert_eq!(stats.records.len(), 50);
            assert_eq!(stats.recovered_mb, 0, "{variant}");
            let reasons: usize = stats.reason_counts().iter().map(|(_, n)| n).sum();
            assert_eq!(reasons, stats.rejected);
        }
    }

    #[test]
    fn game2_never_shifts_lengths() {
        // C1 and the header are untouched, so s stays integral and the only
        // effect is misplaced blocks.
        let scheme = Urdp::new(InsecureXorBackend::new(18), SchemeConfig::default()).unwrap();
        let stats = scenario_tamper(
            &scheme,
            TamperVariant::Game2,
            200,
            &mut ChaCha20Rng::seed_from_u64(1),
        )
        .unwrap();
        assert_eq!(stats.rejected, 0);
        assert_eq!(stats.wrong_message, 200);
    }

    #[test]
    fn jsonl_report() {
        let scheme = Urdp::new(InsecureXorBackend::new(18), SchemeConfig::default()).unwrap();
        let stats = scenario_tamper(
            &scheme,
            TamperVariant::Game3,
            5,
            &mut ChaCha20Rng::seed_from_u64(2),
        )
        .unwrap();
        let mut buf = Vec::new();
        stats.write_jsonl(&mut buf).unwrap();
        let lines: Vec<serde_json::Value> = String::from_utf8(buf)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(lines.len(), 6);
        assert_eq!(lines[0]["variant"], "game3");
        assert_eq!(lines[5]["summary"], true);
        assert_eq!(lines[5]["trials"], 5);
    }

    #[test]
    fn variant_names_parse() {
        for v in TamperVariant::ALL {
            assert_eq!(v.name().parse::<TamperVariant>().unwrap(), v);
        }
        assert!("game4".parse::<TamperVariant>().is_err());
    }

    #[test]
    fn seeded_scenarios_reproduce() {
        let scheme = Urdp::new(InsecureXorBackend::new(18), SchemeConfig::default()).unwrap();
        let run = || {
            let stats = scenario_tamper(
                &scheme,
                TamperVariant::Game3,
                40,
                &mut ChaCha20Rng::seed_from_u64(77),
            )
            .unwrap();
            stats
                .records
                .iter()
                .map(|r| (r.outcome, r.reason))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
