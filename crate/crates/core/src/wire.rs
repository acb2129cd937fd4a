//! Big-endian length-prefixed framing shared by the key and ciphertext formats.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("unexpected end of input")]
    Truncated,
    #[error("bad magic bytes")]
    Magic,
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("{0} trailing bytes after the last field")]
    Trailing(usize),
    #[error("malformed field: {0}")]
    Field(&'static str),
}

#[derive(Debug, Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(b);
        self
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    /// 8-byte big-endian length followed by the payload.
    pub fn field(&mut self, payload: &[u8]) -> &mut Self {
        self.u64(payload.len() as u64).bytes(payload)
    }

    pub fn finish(&mut self) -> Vec<u8> {
        std::mem::take(&mut self.buf)
    }
}

pub(crate) struct Reader<'a> {
    rest: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(input: &'a [u8]) -> Self {
        Self { rest: input }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if n > self.rest.len() {
            return Err(WireError::Truncated);
        }
        let (head, tail) = self.rest.split_at(n);
        self.rest = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub fn u64(&mut self) -> Result<u64, WireError> {
        let b = self.take(8)?;
        Ok(u64::from_be_bytes(b.try_into().expect("8 bytes")))
    }

    pub fn field(&mut self) -> Result<&'a [u8], WireError> {
        let len = self.u64()?;
        let len = usize::try_from(len).map_err(|_| WireError::Truncated)?;
        self.take(len)
    }

    pub fn expect_magic(&mut self, magic: &[u8]) -> Result<(), WireError> {
        let got = self.take(magic.len()).map_err(|_| WireError::Magic)?;
        if got != magic {
            return Err(WireError::Magic);
        }
        Ok(())
    }

    pub fn remaining(&self) -> usize {
        self.rest.len()
    }

    pub fn finish(self) -> Result<(), WireError> {
        match self.rest.len() {
            0 => Ok(()),
            n => Err(WireError::Trailing(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip_and_trailing() {
        let bytes = Writer::new().bytes(b"MAGC").u8(7).field(b"abc").finish();
        let mut r = Reader::new(&bytes);
        r.expect_magic(b"MAGC").unwrap();
        assert_eq!(r.u8().unwrap(), 7);
        assert_eq!(r.field().unwrap(), b"abc");
        r.finish().unwrap();

        let mut longer = bytes.clone();
        longer.push(0);
        let mut r = Reader::new(&longer);
        r.take(bytes.len()).unwrap();
        assert_eq!(r.finish(), Err(WireError::Trailing(1)));
    }

    #[test]
    fn oversized_length_is_truncation() {
        let bytes = Writer::new().u64(u64::MAX).finish();
        assert_eq!(Reader::new(&bytes).field(), Err(WireError::Truncated));
        assert_eq!(
            Reader::new(b"MA").expect_magic(b"MAGC"),
            Err(WireError::Magic)
        );
    }
}
