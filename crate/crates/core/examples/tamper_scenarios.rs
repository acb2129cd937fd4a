//! Runs the three ciphertext-tampering scenarios and prints outcome counts
//! with the rejection reasons seen.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use urdp::game::{scenario_tamper, TamperVariant};
use urdp::pke::{LweBackend, LweParams};
use urdp::{SchemeConfig, Urdp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: usize = std::env::args().nth(1).map_or(Ok(500), |a| a.parse())?;
    let scheme = Urdp::new(
        LweBackend::new(LweParams::default())?,
        SchemeConfig::default(),
    )?;
    let mut rng = ChaCha20Rng::seed_from_u64(5);

    for variant in TamperVariant::ALL {
        let stats = scenario_tamper(&scheme, variant, trials, &mut rng)?;
        println!(
            "{variant}: {} trials, rejected {}, wrong message {}, recovered m_b {}",
            stats.trials, stats.rejected, stats.wrong_message, stats.recovered_mb
        );
        for (reason, count) in stats.reason_counts() {
            println!("    {reason}: {count}");
        }
    }
    Ok(())
}
