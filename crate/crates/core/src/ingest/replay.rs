use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

/// Lines of a JSON-lines file, read incrementally. Line terminators
/// (`\n` or `\r\n`) are stripped; bytes are passed through unvalidated.
pub struct ReplayLines<R> {
    reader: R,
    lines_read: u64,
}

pub fn replay_source(path: &Path) -> io::Result<ReplayLines<BufReader<File>>> {
    let file = File::open(path)?;
    Ok(ReplayLines::new(BufReader::with_capacity(1 << 16, file)))
}

impl<R: BufRead> ReplayLines<R> {
    pub fn new(reader: R) -> Self {
        Self { reader, lines_read: 0 }
    }

    pub fn lines_read(&self) -> u64 {
        self.lines_read
    }
}

impl<R: BufRead> Iterator for ReplayLines<R> {
    type Item = io::Result<Vec<u8>>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = Vec::new();
        match self.reader.read_until(b'\n', &mut buf) {
            Ok(0) => None,
            Ok(_) => {
                if buf.last() == Some(&b'\n') {
                    buf.pop();
                    if buf.last() == Some(&b'\r') {
                        buf.pop();
                    }
                }
                self.lines_read += 1;
                Some(Ok(buf))
            }
            Err(e) => Some(Err(e)),
        }
    }
}
