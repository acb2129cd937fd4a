//! Plays the IND-CCA2 experiment against reference adversaries and reports
//! the estimated advantage with a 95% interval.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use urdp::game::adversaries::{AlwaysZero, CoinFlip, Omniscient, ReplayChallenge};
use urdp::game::{estimate_advantage, estimate_advantage_with, AdvantageEstimate, KeyExposure};
use urdp::pke::{LweBackend, LweParams};
use urdp::{SchemeConfig, Urdp};

fn show(name: &str, est: &AdvantageEstimate) {
    println!(
        "{name:<12} win rate {:.4}  advantage {:.4} ± {:.4}",
        est.win_rate, est.advantage, est.half_width
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scheme = Urdp::new(
        LweBackend::new(LweParams::default())?,
        SchemeConfig::default(),
    )?;
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let trials = 2000;

    show(
        "coin flip",
        &estimate_advantage(&scheme, &mut CoinFlip::new(128), trials, &mut rng)?,
    );
    show(
        "always zero",
        &estimate_advantage(&scheme, &mut AlwaysZero::new(128), trials, &mut rng)?,
    );

    let mut replay = ReplayChallenge::new(128);
    show(
        "replay",
        &estimate_advantage(&scheme, &mut replay, trials, &mut rng)?,
    );
    println!(
        "             challenge replay refused {}/{}",
        replay.refusals(),
        replay.attempts()
    );

    // Sanity check of the harness: an adversary handed the secret key wins.
    let mut cheat = Omniscient::default();
    show(
        "leaked key",
        &estimate_advantage_with(&scheme, &mut cheat, trials, KeyExposure::Leaked, &mut rng)?,
    );
    Ok(())
}
