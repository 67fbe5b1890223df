use super::ClassError;

pub(crate) struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    /// Offset of `bytes[0]` inside the whole class file.
    base: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        ByteReader { bytes, pos: 0, base: 0 }
    }

    pub fn offset(&self) -> usize {
        self.base + self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], ClassError> {
        if n > self.remaining() {
            return Err(ClassError::TruncatedInput { offset: self.offset(), needed: n });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    /// A reader over the next `n` bytes that reports positions relative to
    /// the whole file.
    pub fn sub(&mut self, n: usize) -> Result<ByteReader<'a>, ClassError> {
        let base = self.offset();
        let bytes = self.take(n)?;
        Ok(ByteReader { bytes, pos: 0, base })
    }

    pub fn u1(&mut self) -> Result<u8, ClassError> {
        Ok(self.take(1)?[0])
    }

    pub fn u2(&mut self) -> Result<u16, ClassError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    pub fn u4(&mut self) -> Result<u32, ClassError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }

    pub fn u8(&mut self) -> Result<u64, ClassError> {
        let b = self.take(8)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(u64::from_be_bytes(a))
    }

    pub fn expect_end(&self, what: &str) -> Result<(), ClassError> {
        if self.remaining() != 0 {
            return Err(ClassError::Malformed {
                offset: self.offset(),
                reason: format!("{} trailing bytes after {what}", self.remaining()),
            });
        }
        Ok(())
    }
}

pub(crate) trait PutBe {
    fn u1(&mut self, v: u8);
    fn u2(&mut self, v: u16);
    fn u4(&mut self, v: u32);
}

impl PutBe for Vec<u8> {
    fn u1(&mut self, v: u8) {
        self.push(v);
    }
    fn u2(&mut self, v: u16) {
        self.extend_from_slice(&v.to_be_bytes());
    }
    fn u4(&mut self, v: u32) {
        self.extend_from_slice(&v.to_be_bytes());
    }
}

/// Length prefix for a table that must fit in a u2 count.
pub(crate) fn count_u16(n: usize, what: &str) -> Result<u16, ClassError> {
    u16::try_from(n).map_err(|_| ClassError::InvariantViolation(format!("too many {what}: {n}")))
}
