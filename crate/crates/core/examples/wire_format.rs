//! Serializes keys and a ciphertext, dumps the header fields and shows how
//! malformed bytes are classified.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use urdp::pke::{fingerprint, AnyBackend, AnyPublicKey, AnySecretKey, InsecureXorBackend};
use urdp::{BitString, DecryptError, SchemeConfig, Urdp, UrdpCiphertext};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let backend = AnyBackend::InsecureXor(InsecureXorBackend::new(18));
    let scheme = Urdp::new(backend, SchemeConfig::default())?;
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let (pk, sk) = scheme.keygen(&mut rng)?;

    let pk_bytes = pk.to_bytes();
    let sk_bytes = sk.to_bytes();
    println!(
        "public key  {} bytes  {}  {}",
        pk_bytes.len(),
        fingerprint(&pk_bytes),
        hex(&pk_bytes)
    );
    println!(
        "secret key  {} bytes  {}",
        sk_bytes.len(),
        fingerprint(&sk_bytes)
    );
    let pk = AnyPublicKey::from_bytes(&pk_bytes)?;
    let sk = AnySecretKey::from_bytes(&sk_bytes)?;

    let c = scheme.encrypt(&pk, &BitString::parse("1010")?, &mut rng)?;
    let bytes = c.to_bytes();
    println!("ciphertext  {} bytes", bytes.len());
    println!("  magic     {}", hex(&bytes[..4]));
    println!("  version   {:02x}  backend {:02x}", bytes[4], bytes[5]);
    println!("  n         {}", hex(&bytes[6..14]));
    println!("  ell       {}", hex(&bytes[14..22]));
    println!("  rest      {}", hex(&bytes[22..]));
    assert_eq!(UrdpCiphertext::from_bytes(&bytes)?, c);

    let mut trailing = bytes.clone();
    trailing.push(0);
    let mut bad_c1 = c.clone();
    bad_c1.c1 += 1u8;
    let cases: [(&str, Vec<u8>); 4] = [
        ("intact", bytes.clone()),
        ("truncated", bytes[..bytes.len() - 1].to_vec()),
        ("trailing byte", trailing),
        ("C1 + 1", bad_c1.to_bytes()),
    ];
    for (name, input) in cases {
        let verdict = match scheme.decrypt_bytes(&sk, &input) {
            Ok(m) => format!("message {m}"),
            Err(DecryptError::Format(e)) => format!("format error: {e}"),
            Err(DecryptError::Rejected(r)) => format!("{r} ({})", r.reason().code()),
        };
        println!("{name:<14} {verdict}");
    }
    Ok(())
}
