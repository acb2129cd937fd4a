//! Drives the Regev-style backend directly: per-bit encryption, the noise
//! budget, and parameter validation.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use urdp::pke::lwe::{decrypt_bit, encrypt_bit};
use urdp::pke::{LweBackend, LweParams};
use urdp::{BitString, PkeBackend};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = LweParams::default();
    println!(
        "dimension {}, modulus {}, error bound {}, samples {}",
        params.dimension, params.modulus, params.error_bound, params.samples
    );
    let worst = params.dimension.max(params.samples) as u64 * params.error_bound as u64;
    println!(
        "accumulated error at most ~{worst}, decision threshold q/4 = {}",
        params.modulus / 4
    );

    let backend = LweBackend::new(params)?;
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (pk, sk) = backend.generate(&mut rng)?;

    for bit in [false, true] {
        let ct = encrypt_bit(&pk, bit, &mut rng);
        println!(
            "bit {} -> c = {:>5}, decrypts to {}",
            bit as u8,
            ct.c,
            decrypt_bit(&sk, &ct) as u8
        );
    }

    let r = BitString::parse("010110101110111010")?;
    let blob = backend.encrypt(&pk, &r, &mut rng)?;
    println!("18-bit selector -> {} byte blob", blob.len());
    assert_eq!(backend.decrypt(&sk, &blob)?, r);

    let bad = LweParams {
        modulus: 6,
        ..LweParams::default()
    };
    println!("modulus 6: {}", LweBackend::new(bad).unwrap_err());
    Ok(())
}
