//! Tabulates plaintext-to-ciphertext bit ratios as the message grows.

use urdp::scheme::information_rate;
use urdp::SchemeConfig;

fn main() {
    let config = SchemeConfig::default();
    let k = config.k;
    println!("k = {k}, s_max = {}", config.s_max);
    println!(
        "{:>10}  {:>8}  {:>8}  {:>8}",
        "n", "worst", "typical", "best"
    );
    for exp in [6, 8, 10, 13, 16, 20, 24] {
        let n = 1usize << exp;
        let worst = information_rate(n, k, 1, config.s_max);
        let typical = information_rate(n, k, k / 2, config.s_max.div_ceil(2));
        let best = information_rate(n, k, k - 1, 1);
        println!(
            "{:>10}  {worst:>8.5}  {typical:>8.5}  {best:>8.5}",
            format!("2^{exp}")
        );
    }
}
