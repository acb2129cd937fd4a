//! Encrypts and decrypts a text message over the LWE backend, then shows
//! that a one-bit change to C1 is rejected.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use urdp::pke::{LweBackend, LweParams};
use urdp::{BitString, SchemeConfig, Urdp};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let scheme = Urdp::new(
        LweBackend::new(LweParams::default())?,
        SchemeConfig::default(),
    )?;
    let (pk, sk) = scheme.keygen(&mut rng)?;

    let text = "Lattice ciphertexts, padded at random.";
    let m = BitString::from_bytes(text.as_bytes());
    let (c, trace) = scheme.encrypt_traced(&pk, &m, &mut rng)?;
    println!(
        "selector r = {} (h = {})",
        trace.selector.bits(),
        trace.selector.weight()
    );
    println!(
        "v = {}, s = {}, ell = {}",
        trace.params.v(),
        trace.params.s(),
        c.ell
    );
    println!("C1 has {} bits, C2 has {} bytes", c.c1.bits(), c.c2.len());

    let back = scheme.decrypt(&sk, &c)?;
    println!("decrypted: {}", String::from_utf8_lossy(back.as_packed()));

    let mut tampered = c.clone();
    tampered.c1 += 1u8;
    match scheme.decrypt(&sk, &tampered) {
        Ok(_) => println!("tampered ciphertext decrypted"),
        Err(e) => println!("tampered ciphertext: {e} ({})", e.reason().code()),
    }
    Ok(())
}
