//! Universal random data padding.
//!
//! A message `m` of `n` bits is split into `h` equal blocks of `v = ⌈n/h⌉`
//! bits (the last block is topped up with a random binary string, RBS, when
//! `h ∤ n`). A selector vector `r` of `k` bits and weight `h` then lays the
//! blocks out in order at its one-positions and fills each zero-position with
//! a random obscure block (ROB) of `s` bits:
//!
//! ```text
//! r  =   0     1     0     1   ...   1     0
//! m' = ROB#1 ‖ d_1 ‖ ROB#2 ‖ d_2 ‖ ... ‖ d_h ‖ ROB#(k-h)
//! ```
//!
//! [`extract`] undoes the layout given the same selector and parameters.

use rand::RngCore;
use thiserror::Error;

use crate::bits::{BitString, BitsError};

pub const DEFAULT_S_MAX: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PaddingError {
    #[error("selector weight {weight} must lie strictly between 0 and {len}")]
    SelectorWeight { weight: usize, len: usize },
    #[error("message must not be empty")]
    EmptyMessage,
    #[error("block length s = {s} outside 1..={s_max}")]
    BlockLength { s: usize, s_max: usize },
    #[error("parameter mismatch: {0}")]
    Mismatch(&'static str),
    #[error("padding source exhausted")]
    PadExhausted,
    #[error("encoded length is inconsistent with the selector")]
    Inconsistent,
    #[error(transparent)]
    Bits(#[from] BitsError),
}

/// The `k`-bit randomness `r` whose one-positions carry message blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SelectorVector {
    bits: BitString,
    weight: usize,
}

impl SelectorVector {
    /// Rejects `h = 0` and `h = k`: both leave a zero divisor in the
    /// block-length arithmetic.
    pub fn new(bits: BitString) -> Result<Self, PaddingError> {
        let weight = bits.hamming_weight();
        if weight == 0 || weight >= bits.len() {
            return Err(PaddingError::SelectorWeight {
                weight,
                len: bits.len(),
            });
        }
        Ok(Self { bits, weight })
    }

    /// Draws `r` uniformly from `{0,1}^k`, resampling until `0 < h < k`.
    pub fn random<R: RngCore + ?Sized>(k: usize, rng: &mut R) -> Result<Self, PaddingError> {
        if k < 2 {
            return Err(PaddingError::SelectorWeight { weight: 0, len: k });
        }
        loop {
            if let Ok(sel) = Self::new(random_bits(k, rng)) {
                return Ok(sel);
            }
        }
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    /// `k`
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `h`
    pub fn weight(&self) -> usize {
        self.weight
    }

    /// Number of ROB positions, `k - h`.
    pub fn filler_count(&self) -> usize {
        self.len() - self.weight
    }
}

/// Block geometry for one encoding: message length `n`, message block
/// length `v` and ROB length `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodingParams {
    n: usize,
    v: usize,
    s: usize,
}

impl EncodingParams {
    pub fn new(n: usize, h: usize, s: usize, s_max: usize) -> Result<Self, PaddingError> {
        if n == 0 {
            return Err(PaddingError::EmptyMessage);
        }
        if h == 0 {
            return Err(PaddingError::SelectorWeight { weight: 0, len: 0 });
        }
        if s == 0 || s > s_max {
            return Err(PaddingError::BlockLength { s, s_max });
        }
        Ok(Self {
            n,
            v: n.div_ceil(h),
            s,
        })
    }

    pub fn for_selector(
        n: usize,
        sel: &SelectorVector,
        s: usize,
        s_max: usize,
    ) -> Result<Self, PaddingError> {
        Self::new(n, sel.weight(), s, s_max)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Length of the RBS appended to the message for weight `h`.
    pub fn rbs_len(&self, h: usize) -> usize {
        h * self.v - self.n
    }

    /// `h·v + (k−h)·s`
    pub fn encoded_len(&self, sel: &SelectorVector) -> usize {
        sel.weight() * self.v + sel.filler_count() * self.s
    }

    fn check(&self, sel: &SelectorVector) -> Result<(), PaddingError> {
        if self.v != self.n.div_ceil(sel.weight()) {
            return Err(PaddingError::Mismatch(
                "block length does not match selector weight",
            ));
        }
        Ok(())
    }
}

/// The encoded message `m'` together with its exact bit length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedMessage {
    payload: BitString,
}

impl EncodedMessage {
    pub fn new(payload: BitString) -> Self {
        Self { payload }
    }

    pub fn payload(&self) -> &BitString {
        &self.payload
    }

    pub fn into_payload(self) -> BitString {
        self.payload
    }

    /// `ℓ`
    pub fn bit_len(&self) -> usize {
        self.payload.len()
    }
}

/// Supplier of the RBS and ROB filler bits. [`encode`] requests the RBS
/// first (when one is needed), then each ROB in selector order.
pub trait PadSource {
    fn next_bits(&mut self, len: usize) -> Result<BitString, PaddingError>;
}

/// Uniform filler bits from an RNG.
pub struct RngPad<'a, R: RngCore + ?Sized>(pub &'a mut R);

impl<R: RngCore + ?Sized> PadSource for RngPad<'_, R> {
    fn next_bits(&mut self, len: usize) -> Result<BitString, PaddingError> {
        Ok(random_bits(len, self.0))
    }
}

/// Replays a fixed bit stream, consuming it front to back.
#[derive(Debug, Clone)]
pub struct FixedPad {
    bits: BitString,
    pos: usize,
}

impl FixedPad {
    pub fn new(bits: BitString) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn from_blocks<'a, I: IntoIterator<Item = &'a BitString>>(blocks: I) -> Self {
        let mut bits = BitString::new();
        for b in blocks {
            bits.append(b);
        }
        Self::new(bits)
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }
}

impl PadSource for FixedPad {
    fn next_bits(&mut self, len: usize) -> Result<BitString, PaddingError> {
        if len > self.remaining() {
            return Err(PaddingError::PadExhausted);
        }
        let out = self.bits.slice(self.pos, len)?;
        self.pos += len;
        Ok(out)
    }
}

pub(crate) fn random_bits<R: RngCore + ?Sized>(len: usize, rng: &mut R) -> BitString {
    let mut bytes = vec![0u8; len.div_ceil(8)];
    rng.fill_bytes(&mut bytes);
    BitString::from_packed(&bytes, len).expect("buffer sized for len")
}

/// Splits `m ‖ rbs` into `h` blocks of `v = ⌈n/h⌉` bits.
pub fn setup_blocks(
    m: &BitString,
    h: usize,
    rbs: &BitString,
) -> Result<Vec<BitString>, PaddingError> {
    if m.is_empty() {
        return Err(PaddingError::EmptyMessage);
    }
    if h == 0 {
        return Err(PaddingError::SelectorWeight { weight: 0, len: 0 });
    }
    let n = m.len();
    let v = n.div_ceil(h);
    if rbs.len() != h * v - n {
        return Err(PaddingError::Mismatch("RBS length must be h·⌈n/h⌉ − n"));
    }
    let padded = m.concat(rbs);
    (0..h)
        .map(|i| padded.slice(i * v, v).map_err(PaddingError::from))
        .collect()
}

/// Random encoding: lays the message blocks out at the selector's
/// one-positions and ROBs at its zero-positions.
pub fn encode<P: PadSource + ?Sized>(
    m: &BitString,
    sel: &SelectorVector,
    params: &EncodingParams,
    pad: &mut P,
) -> Result<EncodedMessage, PaddingError> {
    if m.len() != params.n {
        return Err(PaddingError::Mismatch("message length differs from n"));
    }
    params.check(sel)?;
    let h = sel.weight();
    let rbs = pad.next_bits(params.rbs_len(h))?;

    let padded = m.concat(&rbs);
    let mut out = BitString::with_capacity(params.encoded_len(sel));
    let mut block = 0;
    for r_i in sel.bits().iter() {
        if r_i {
            out.append(&padded.slice(block * params.v, params.v)?);
            block += 1;
        } else {
            out.append(&pad.next_bits(params.s)?);
        }
    }
    Ok(EncodedMessage::new(out))
}

/// Message extraction: walks the selector left to right, dropping `s` bits
/// at each zero and taking a `v`-bit block at each one, then strips the RBS.
pub fn extract(
    encoded: &EncodedMessage,
    sel: &SelectorVector,
    params: &EncodingParams,
) -> Result<BitString, PaddingError> {
    params.check(sel)?;
    if encoded.bit_len() != params.encoded_len(sel) {
        return Err(PaddingError::Inconsistent);
    }
    let m_prime = encoded.payload();
    let mut m = BitString::with_capacity(sel.weight() * params.v);
    let mut offset = 0;
    for r_i in sel.bits().iter() {
        if r_i {
            m.append(&m_prime.slice(offset, params.v)?);
            offset += params.v;
        } else {
            offset += params.s;
        }
    }
    if m.len() == params.n {
        Ok(m)
    } else {
        Ok(m.msb(params.n)?)
    }
}

/// Recovers the block geometry on the decryption side from `n`, `k`, `h`
/// and the encoded length `ℓ`. Rejects unless `s = (ℓ − h·v)/(k − h)` is an
/// integer in `1..=s_max`.
pub fn derive_params(
    n: u64,
    k: u64,
    h: u64,
    ell: u64,
    s_max: usize,
) -> Result<EncodingParams, PaddingError> {
    if n == 0 {
        return Err(PaddingError::EmptyMessage);
    }
    if h == 0 || h >= k {
        return Err(PaddingError::SelectorWeight {
            weight: h as usize,
            len: k as usize,
        });
    }
    let v = n.div_ceil(h);
    let message_bits = (h as u128) * (v as u128);
    let filler_bits = (ell as u128)
        .checked_sub(message_bits)
        .ok_or(PaddingError::Inconsistent)?;
    let fillers = (k - h) as u128;
    if filler_bits % fillers != 0 {
        return Err(PaddingError::Inconsistent);
    }
    let s = filler_bits / fillers;
    if s == 0 || s > s_max as u128 {
        return Err(PaddingError::Inconsistent);
    }
    let n = usize::try_from(n).map_err(|_| PaddingError::Inconsistent)?;
    EncodingParams::new(n, h as usize, s as usize, s_max)
}
