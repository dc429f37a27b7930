//! Plain-text stream files.
//!
//! ```text
//! alphabet_size=4
//! 1<TAB>0
//! 1.5<TAB>1
//! ```
//!
//! The header declares the alphabet; every following line is one event,
//! `lambda<TAB>letter`. Blank lines are ignored.

use std::io::{BufRead, Write};

use ordsketch::{Event, Stream};

use crate::CliError;

/// Reads events lazily; every error carries its 1-based line number.
pub struct StreamReader<R> {
    lines: std::io::Lines<R>,
    line_no: usize,
    alphabet_size: usize,
    source: String,
}

impl<R: BufRead> StreamReader<R> {
    pub fn new(input: R, source: &str) -> Result<Self, CliError> {
        let mut reader = StreamReader {
            lines: input.lines(),
            line_no: 0,
            alphabet_size: 0,
            source: source.to_string(),
        };
        let header = loop {
            match reader.next_line()? {
                Some(l) if l.trim().is_empty() => continue,
                Some(l) => break l,
                None => return Err(reader.err("missing alphabet_size=N header")),
            }
        };
        let n = header
            .trim()
            .strip_prefix("alphabet_size=")
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| reader.err(format!("expected alphabet_size=N header, found {header:?}")))?;
        reader.alphabet_size = n;
        Ok(reader)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    fn err(&self, msg: impl std::fmt::Display) -> CliError {
        CliError::Data(format!("{}:{}: {msg}", self.source, self.line_no))
    }

    fn next_line(&mut self) -> Result<Option<String>, CliError> {
        match self.lines.next() {
            None => Ok(None),
            Some(Ok(l)) => {
                self.line_no += 1;
                Ok(Some(l))
            }
            Some(Err(e)) => {
                self.line_no += 1;
                Err(self.err(e))
            }
        }
    }

    fn parse_event(&self, line: &str) -> Result<Event, CliError> {
        let mut fields = line.split('\t');
        let (Some(lambda), Some(letter), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(self.err(format!("expected lambda<TAB>letter, found {line:?}")));
        };
        let lambda: f64 = lambda
            .trim()
            .parse()
            .map_err(|_| self.err(format!("counter increase {lambda:?} is not a number")))?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(self.err(format!("counter increase {lambda} must be positive and finite")));
        }
        let letter: u64 = letter
            .trim()
            .parse()
            .map_err(|_| self.err(format!("letter {letter:?} is not a non-negative integer")))?;
        if letter >= self.alphabet_size as u64 {
            return Err(self.err(format!(
                "letter {letter} out of range for alphabet size {}",
                self.alphabet_size
            )));
        }
        Ok(Event::new(lambda, letter))
    }
}

impl<R: BufRead> Iterator for StreamReader<R> {
    type Item = Result<Event, CliError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            match self.next_line() {
                Err(e) => return Some(Err(e)),
                Ok(None) => return None,
                Ok(Some(l)) if l.trim().is_empty() => continue,
                Ok(Some(l)) => return Some(self.parse_event(&l)),
            }
        }
    }
}

pub fn read_stream<R: BufRead>(input: R, source: &str) -> Result<Stream, CliError> {
    let reader = StreamReader::new(input, source)?;
    let n = reader.alphabet_size();
    let events = reader.collect::<Result<Vec<_>, _>>()?;
    Stream::from_events(n, events).map_err(CliError::from)
}

pub fn write_stream<W: Write>(stream: &Stream, mut out: W) -> std::io::Result<()> {
    writeln!(out, "alphabet_size={}", stream.alphabet_size())?;
    for e in stream.events() {
        writeln!(out, "{}\t{}", e.lambda, e.letter.0)?;
    }
    Ok(())
}
