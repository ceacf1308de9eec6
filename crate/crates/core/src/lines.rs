use std::io::BufRead;

use crate::error::{Error, Result};

/// Streams a reader line by line with 1-based line numbers. Trailing `\r\n`
/// or `\n` is stripped; invalid UTF-8 is reported against its line.
pub(crate) struct LineReader<R> {
    reader: R,
    line: usize,
    buf: Vec<u8>,
}

impl<R: BufRead> LineReader<R> {
    pub(crate) fn new(reader: R) -> Self {
        LineReader {
            reader,
            line: 0,
            buf: Vec::new(),
        }
    }

    /// Number of the last line returned (0 before the first read).
    pub(crate) fn line(&self) -> usize {
        self.line
    }

    pub(crate) fn next_line(&mut self) -> Result<Option<(usize, String)>> {
        self.buf.clear();
        let n = self
            .reader
            .read_until(b'\n', &mut self.buf)
            .map_err(|e| Error::parse(self.line + 1, format!("read failed: {e}")))?;
        if n == 0 {
            return Ok(None);
        }
        self.line += 1;
        if self.buf.last() == Some(&b'\n') {
            self.buf.pop();
            if self.buf.last() == Some(&b'\r') {
                self.buf.pop();
            }
        }
        let text =
            std::str::from_utf8(&self.buf).map_err(|_| Error::parse(self.line, "invalid UTF-8"))?;
        Ok(Some((self.line, text.to_owned())))
    }

    /// Next line with `#` comments removed that still has content.
    pub(crate) fn next_content(&mut self) -> Result<Option<(usize, String)>> {
        while let Some((n, mut l)) = self.next_line()? {
            if let Some(pos) = l.find('#') {
                l.truncate(pos);
            }
            if !l.trim().is_empty() {
                return Ok(Some((n, l)));
            }
        }
        Ok(None)
    }
}
