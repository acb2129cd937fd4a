//! Encodes a 1117-bit message under the 18-bit selector from the classic
//! walkthrough and prints the block layout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use urdp::padding::{self, FixedPad};
use urdp::{BitString, EncodingParams, SelectorVector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha20Rng::seed_from_u64(2024);
    let m = BitString::from_bits((0..1117).map(|_| rng.gen::<bool>()));
    let sel = SelectorVector::new(BitString::parse("010110101110111010")?)?;
    let s = 4;

    // RBS first, then one ROB per zero of the selector.
    let pad: Vec<BitString> = [
        "10110", "0110", "1010", "1111", "0000", "1001", "0101", "0010",
    ]
    .iter()
    .map(|b| BitString::parse(b))
    .collect::<Result<_, _>>()?;
    let params = EncodingParams::for_selector(m.len(), &sel, s, 16)?;
    let encoded = padding::encode(&m, &sel, &params, &mut FixedPad::from_blocks(&pad))?;

    println!("n = {}, k = {}, h = {}", m.len(), sel.len(), sel.weight());
    println!(
        "v = {}, RBS length = {}, s = {}",
        params.v(),
        params.rbs_len(sel.weight()),
        s
    );
    println!("encoded length = {}", encoded.bit_len());

    let mut offset = 0;
    for (i, r) in sel.bits().iter().enumerate() {
        let len = if r { params.v() } else { s };
        let block = encoded.payload().slice(offset, len)?;
        let shown = if len > 12 {
            format!("{}…{}", block.msb(6)?, block.lsb(6)?)
        } else {
            block.to_string()
        };
        println!(
            "d'_{:<2} {} {:>3} bits  {}",
            i + 1,
            if r { "msg" } else { "rob" },
            len,
            shown
        );
        offset += len;
    }

    let back = padding::extract(&encoded, &sel, &params)?;
    assert_eq!(back, m);
    println!("extract recovers the message");
    Ok(())
}
