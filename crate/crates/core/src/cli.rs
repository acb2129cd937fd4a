//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parameter or format error, 3 decryption
//! rejected, 4 I/O failure. Every subcommand that draws randomness accepts
//! `--seed` (or `URDP_SEED`) and is then byte-for-byte reproducible.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::game::adversaries::{AlwaysZero, CoinFlip, ReplayChallenge};
use crate::game::scenario::scenario_tamper_with;
use crate::game::{
    estimate_advantage, AdvantageEstimate, Adversary, GameError, ScenarioConfig, TamperVariant,
};
use crate::pke::{
    fingerprint, AnyBackend, AnyPublicKey, AnySecretKey, InsecureXorBackend, LweBackend, LweParams,
    PkeBackend,
};
use crate::scheme::{DecryptError, SchemeConfig, SchemeError, Urdp, UrdpCiphertext, DEFAULT_K};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAM: i32 = 2;
pub const EXIT_REJECT: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Param(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error("REJECT")]
    Reject,
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Param(_) | Self::Format(_) => EXIT_PARAM,
            Self::Reject => EXIT_REJECT,
            Self::Io { .. } => EXIT_IO,
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        Self::Param(e.to_string())
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        Self::Param(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "urdp", version, about = "URDP padding over a trapdoor PKE")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendChoice {
    Lwe,
    /// One-time-pad test backend. Provides no security.
    Xor,
}

#[derive(Debug, Clone, clap::Args)]
pub struct LweArgs {
    #[arg(long, default_value_t = LweParams::default().dimension)]
    pub lwe_dimension: usize,
    #[arg(long, default_value_t = LweParams::default().modulus)]
    pub lwe_modulus: u32,
    #[arg(long, default_value_t = LweParams::default().error_bound)]
    pub lwe_error_bound: u32,
    #[arg(long, default_value_t = LweParams::default().samples)]
    pub lwe_samples: usize,
}

impl LweArgs {
    fn params(&self) -> LweParams {
        LweParams {
            dimension: self.lwe_dimension,
            modulus: self.lwe_modulus,
            error_bound: self.lwe_error_bound,
            samples: self.lwe_samples,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct SchemeArgs {
    /// Selector length; defaults to the pad length for XOR keys and 18 otherwise.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = SchemeConfig::default().s_max)]
    pub s_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scenario {
    Cca2,
    Game1,
    Game2,
    Game3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdversaryChoice {
    Coinflip,
    AlwaysZero,
    Replay,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a key pair.
    Keygen {
        #[arg(long, value_enum, default_value_t = BackendChoice::Lwe)]
        backend: BackendChoice,
        #[arg(long)]
        out_pk: PathBuf,
        #[arg(long)]
        out_sk: PathBuf,
        #[arg(long, env = "URDP_SEED")]
        seed: Option<u64>,
        /// Pad length for the XOR backend.
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[command(flatten)]
        lwe: LweArgs,
    },
    /// Encrypt a file.
    Encrypt {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long, env = "URDP_SEED")]
        seed: Option<u64>,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Decrypt a file.
    Decrypt {
        #[arg(long)]
        sk: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Run the CCA2 experiment or a tampering scenario.
    Game {
        #[arg(long, value_enum)]
        scenario: Scenario,
        #[arg(long)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = AdversaryChoice::Coinflip)]
        adversary: AdversaryChoice,
        #[arg(long, env = "URDP_SEED")]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = BackendChoice::Lwe)]
        backend: BackendChoice,
        #[arg(long, default_value_t = ScenarioConfig::default().message_bits)]
        message_bits: usize,
        /// Write line-delimited records here instead of stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        lwe: LweArgs,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command, &mut io::stdout().lock()) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("urdp: {e}");
            e.exit_code()
        }
    }
}

fn rng_from(seed: Option<u64>) -> ChaCha20Rng {
    match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn scheme_for(backend: AnyBackend, args: &SchemeArgs) -> Result<Urdp<AnyBackend>, CliError> {
    let k = match (&backend, args.k) {
        (_, Some(k)) => k,
        (AnyBackend::InsecureXor(b), None) => b.k(),
        (AnyBackend::Lwe(_), None) => DEFAULT_K,
    };
    let config = SchemeConfig {
        k,
        s_max: args.s_max,
        ..SchemeConfig::default()
    };
    Ok(Urdp::new(backend, config)?)
}

fn make_backend(choice: BackendChoice, k: usize, lwe: &LweArgs) -> Result<AnyBackend, CliError> {
    Ok(match choice {
        BackendChoice::Lwe => AnyBackend::Lwe(
            LweBackend::new(lwe.params()).map_err(|e| CliError::Param(e.to_string()))?,
        ),
        BackendChoice::Xor => AnyBackend::InsecureXor(InsecureXorBackend::new(k)),
    })
}

pub fn execute<W: Write>(command: Command, out: &mut W) -> Result<(), CliError> {
    match command {
        Command::Keygen {
            backend,
            out_pk,
            out_sk,
            seed,
            k,
            lwe,
        } => {
            if k < 3 {
                return Err(CliError::Param(format!("k = {k} must be at least 3")));
            }
            let backend = make_backend(backend, k, &lwe)?;
            let (pk, sk) = backend
                .generate(&mut rng_from(seed))
                .map_err(|e| CliError::Param(e.to_string()))?;
            let (pk, sk) = (pk.to_bytes(), sk.to_bytes());
            write(&out_pk, &pk)?;
            write(&out_sk, &sk)?;
            writeln!(
                out,
                "public key  {}  {}",
                fingerprint(&pk),
                out_pk.display()
            )
            .map_err(stdout_err)?;
            writeln!(
                out,
                "secret key  {}  {}",
                fingerprint(&sk),
                out_sk.display()
            )
            .map_err(stdout_err)?;
            Ok(())
        }
        Command::Encrypt {
            pk,
            input,
            output,
            seed,
            scheme,
        } => {
            let pk = AnyPublicKey::from_bytes(&read(&pk)?)
                .map_err(|e| CliError::Format(format!("public key: {e}")))?;
            let scheme = scheme_for(pk.backend(), &scheme)?;
            let m = BitString::from_bytes(&read(&input)?);
            let c = scheme.encrypt(&pk, &m, &mut rng_from(seed))?;
            write(&output, &c.to_bytes())
        }
        Command::Decrypt {
            sk,
            input,
            output,
            scheme,
        } => {
            let sk = AnySecretKey::from_bytes(&read(&sk)?)
                .map_err(|e| CliError::Format(format!("secret key: {e}")))?;
            let scheme = scheme_for(sk.backend(), &scheme)?;
            let m = match scheme.decrypt_bytes(&sk, &read(&input)?) {
                Ok(m) => m,
                Err(DecryptError::Format(e)) => return Err(CliError::Format(e.to_string())),
                Err(DecryptError::Rejected(_)) => {
                    writeln!(out, "REJECT").map_err(stdout_err)?;
                    return Err(CliError::Reject);
                }
            };
            write(&output, m.as_packed())
        }
        Command::Game {
            scenario,
            trials,
            adversary,
            seed,
            backend,
            message_bits,
            report,
            scheme,
            lwe,
        } => {
            if trials == 0 {
                return Err(CliError::Param("trials must be at least 1".into()));
            }
            if message_bits == 0 {
                return Err(CliError::Param("message-bits must be positive".into()));
            }
            let backend = make_backend(backend, scheme.k.unwrap_or(DEFAULT_K), &lwe)?;
            let scheme = scheme_for(backend, &scheme)?;
            let mut rng = rng_from(seed);
            let mut buf = Vec::new();
            let summary = match scenario {
                Scenario::Cca2 => {
                    let mut adv: Box<dyn Adversary<AnyBackend>> = match adversary {
                        AdversaryChoice::Coinflip => Box::new(CoinFlip::new(message_bits)),
                        AdversaryChoice::AlwaysZero => Box::new(AlwaysZero::new(message_bits)),
                        AdversaryChoice::Replay => Box::new(ReplayChallenge::new(message_bits)),
                    };
                    let est = estimate_advantage(&scheme, adv.as_mut(), trials, &mut rng)?;
                    write_cca2_report(&est, &mut buf).map_err(stdout_err)?
                }
                Scenario::Game1 | Scenario::Game2 | Scenario::Game3 => {
                    let variant = match scenario {
                        Scenario::Game1 => TamperVariant::Game1,
                        Scenario::Game2 => TamperVariant::Game2,
                        _ => TamperVariant::Game3,
                    };
                    let config = ScenarioConfig { message_bits };
                    let stats = scenario_tamper_with(&scheme, variant, trials, &config, &mut rng)?;
                    stats.write_jsonl(&mut buf).map_err(stdout_err)?;
                    let mut summary = Vec::new();
                    stats.write_summary(&mut summary).map_err(stdout_err)?;
                    summary
                }
            };
            match report {
                Some(path) => {
                    write(&path, &buf)?;
                    out.write_all(&summary).map_err(stdout_err)
                }
                None => out.write_all(&buf).map_err(stdout_err),
            }
        }
    }
}

#[derive(Serialize)]
struct Cca2Record<'a> {
    variant: &'static str,
    #[serde(flatten)]
    record: &'a crate::game::ExperimentRecord,
}

#[derive(Serialize)]
struct Cca2Summary {
    summary: bool,
    variant: &'static str,
    trials: usize,
    wins: usize,
    win_rate: f64,
    advantage: f64,
    half_width: f64,
}

/// Writes per-trial records and the summary into `buf`; returns the summary line.
fn write_cca2_report(est: &AdvantageEstimate, buf: &mut Vec<u8>) -> io::Result<Vec<u8>> {
    for record in &est.records {
        serde_json::to_writer(
            &mut *buf,
            &Cca2Record {
                variant: "cca2",
                record,
            },
        )?;
        buf.push(b'\n');
    }
    let mut summary = serde_json::to_vec(&Cca2Summary {
        summary: true,
        variant: "cca2",
        trials: est.trials,
        wins: est.wins,
        win_rate: est.win_rate,
        advantage: est.advantage,
        half_width: est.half_width,
    })?;
    summary.push(b'\n');
    buf.extend_from_slice(&summary);
    Ok(summary)
}

/// Parses a ciphertext file without decrypting; handy for inspection tools.
pub fn inspect(bytes: &[u8]) -> Result<UrdpCiphertext, CliError> {
    UrdpCiphertext::from_bytes(bytes).map_err(|e| CliError::Format(e.to_string()))
}
