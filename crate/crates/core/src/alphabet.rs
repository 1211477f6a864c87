use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a symbol in its [`Alphabet`].
pub type Symbol = usize;

/// A word is a sequence of symbol indices.
pub type Word = Vec<Symbol>;

#[derive(Debug)]
struct Inner {
    tokens: Vec<String>,
    index: HashMap<String, Symbol>,
    bytes: bool,
}

/// Ordered finite set of symbol tokens. Cheap to clone.
#[derive(Clone)]
pub struct Alphabet(Arc<Inner>);

impl Alphabet {
    /// Builds an alphabet from tokens in declaration order. Duplicates are rejected.
    pub fn new<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut list = Vec::new();
        let mut index = HashMap::new();
        for tok in tokens {
            let tok = normalize_token(&tok.into());
            if index.insert(tok.clone(), list.len()).is_some() {
                return Err(Error::parse(0, format!("duplicate alphabet token `{tok}`")));
            }
            list.push(tok);
        }
        if list.is_empty() {
            return Err(Error::parse(0, "alphabet must be non-empty"));
        }
        Ok(Alphabet(Arc::new(Inner {
            tokens: list,
            index,
            bytes: false,
        })))
    }

    /// The 256-symbol byte alphabet; symbol `b` is the byte `b`, written `0xHH`.
    pub fn bytes() -> Self {
        let tokens: Vec<String> = (0..=255u8).map(|b| format!("0x{b:02x}")).collect();
        let index = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Alphabet(Arc::new(Inner {
            tokens,
            index,
            bytes: true,
        }))
    }

    pub fn len(&self) -> usize {
        self.0.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.tokens.is_empty()
    }

    pub fn is_bytes(&self) -> bool {
        self.0.bytes
    }

    pub fn symbols(&self) -> std::ops::Range<Symbol> {
        0..self.len()
    }

    pub fn token(&self, sym: Symbol) -> &str {
        &self.0.tokens[sym]
    }

    pub fn tokens(&self) -> &[String] {
        &self.0.tokens
    }

    pub fn lookup(&self, token: &str) -> Result<Symbol> {
        let tok = normalize_token(token);
        self.0
            .index
            .get(&tok)
            .copied()
            .ok_or(Error::UnknownSymbol(tok))
    }

    /// Maps a payload byte to a symbol: the `0xHH` token if declared, else the
    /// single-character token for that byte.
    pub fn lookup_byte(&self, byte: u8) -> Result<Symbol> {
        if self.0.bytes {
            return Ok(byte as Symbol);
        }
        if let Some(&s) = self.0.index.get(&format!("0x{byte:02x}")) {
            return Ok(s);
        }
        let ch = (byte as char).to_string();
        self.0
            .index
            .get(&ch)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(format!("0x{byte:02x}")))
    }

    /// Parses whitespace-separated tokens into a word.
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.split_whitespace().map(|t| self.lookup(t)).collect()
    }

    pub fn format_word(&self, word: &[Symbol]) -> String {
        word.iter()
            .map(|&s| self.token(s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.tokens == other.0.tokens
    }
}

impl Eq for Alphabet {}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.bytes {
            f.write_str("Alphabet(bytes)")
        } else {
            f.debug_tuple("Alphabet").field(&self.0.tokens).finish()
        }
    }
}

/// `0xHH` byte literals are case-insensitive; everything else is taken verbatim.
fn normalize_token(tok: &str) -> String {
    let b = tok.as_bytes();
    if b.len() == 4
        && b[0] == b'0'
        && (b[1] == b'x' || b[1] == b'X')
        && b[2].is_ascii_hexdigit()
        && b[3].is_ascii_hexdigit()
    {
        tok.to_ascii_lowercase()
    } else {
        tok.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn byte_literals_normalize() {
        let a = Alphabet::new(["0x4A", "b"]).unwrap();
        assert_eq!(a.lookup("0x4a").unwrap(), 0);
        assert_eq!(a.lookup("0X4A").unwrap(), 0);
        assert_eq!(a.lookup_byte(0x4a).unwrap(), 0);
        assert_eq!(a.lookup_byte(b'b').unwrap(), 1);
        assert!(a.lookup_byte(b'c').is_err());
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn byte_alphabet() {
        let a = Alphabet::bytes();
        assert_eq!(a.len(), 256);
        assert_eq!(a.lookup("0xff").unwrap(), 255);
        assert_eq!(a.lookup_byte(7).unwrap(), 7);
        assert_eq!(a, Alphabet::bytes());
    }
}
