use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub position: u32,
}

/// Splits on every non-alphanumeric character except hyphens and apostrophes
/// sitting between two alphanumerics, lowercasing each token. No stemming and
/// no stopword removal.
pub fn tokenize(text: &str) -> Vec<Token> {
    token_surfaces(text)
        .enumerate()
        .map(|(i, surface)| Token {
            surface,
            position: i as u32,
        })
        .collect()
}

/// Token surfaces only, in order.
pub fn token_surfaces(text: &str) -> impl Iterator<Item = String> + '_ {
    TokenIter {
        text,
        chars: text.char_indices().peekable(),
    }
}

/// Convenience: token surfaces collected into a vector.
pub fn terms(text: &str) -> Vec<String> {
    token_surfaces(text).collect()
}

struct TokenIter<'a> {
    text: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
}

impl Iterator for TokenIter<'_> {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        let start = loop {
            let (i, c) = self.chars.next()?;
            if c.is_alphanumeric() {
                break i;
            }
        };
        let mut end = self.text.len();
        while let Some(&(i, c)) = self.chars.peek() {
            if c.is_alphanumeric() {
                self.chars.next();
                continue;
            }
            if c == '-' || c == '\'' {
                let after = self.text[i + c.len_utf8()..].chars().next();
                if after.is_some_and(char::is_alphanumeric) {
                    self.chars.next();
                    continue;
                }
            }
            end = i;
            break;
        }
        Some(self.text[start..end].to_lowercase())
    }
}
