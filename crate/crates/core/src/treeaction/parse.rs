//! Text syntax for group words.
//!
//! ```text
//! word   := factor (('*' | whitespace) factor)*
//! factor := (state | trans | '1') ('^' int)?
//! state  := 'm[' int ']:(' int (',' int)* ')'
//! trans  := 't[' int ']' ('@' int)?
//! ```
//!
//! `m[i]` uses the 0-based matrix index. `t[j]` is the translation by the
//! 1-based basis vector `e_j`, built from component 0 unless `@i` is given.
//! `1` is the identity.

use num_bigint::BigInt;

use super::{power, translation_word, GroupWord};
use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::linalg::IntVector;

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn skip_separators(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace() || c == '*') {
            self.bump();
        }
    }

    fn expect(&mut self, want: char) -> Result<()> {
        self.skip_ws();
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(Error::parse(
                self.pos - c.len_utf8(),
                format!("expected `{want}`, found `{c}`"),
            )),
            None => Err(Error::parse(self.pos, format!("expected `{want}`, found end of input"))),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-' | '+')) {
            self.bump();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.text[start..self.pos]
            .parse()
            .map_err(|_| Error::parse(start, "expected an integer"))
    }

    fn index(&mut self) -> Result<usize> {
        let start = self.pos;
        let v = self.int()?;
        usize::try_from(v).map_err(|_| Error::parse(start, "expected a non-negative index"))
    }
}

pub fn parse_word(aut: &Automaton, text: &str) -> Result<GroupWord> {
    let mut cur = Cursor { text, pos: 0 };
    let mut word = GroupWord::identity();
    loop {
        cur.skip_separators();
        let start = cur.pos;
        let factor = match cur.bump() {
            None => return Ok(word),
            Some('1') => GroupWord::identity(),
            Some('m') => {
                cur.expect('[')?;
                let matrix = cur.index()?;
                cur.expect(']')?;
                cur.expect(':')?;
                cur.expect('(')?;
                let mut coords = vec![cur.int()?];
                loop {
                    cur.skip_ws();
                    match cur.bump() {
                        Some(',') => coords.push(cur.int()?),
                        Some(')') => break,
                        Some(_) => return Err(Error::parse(cur.pos - 1, "expected `,` or `)`")),
                        None => return Err(Error::parse(cur.pos, "expected `,` or `)`")),
                    }
                }
                let offset = IntVector::new(coords);
                let id = aut
                    .state(matrix, &offset)
                    .ok_or_else(|| Error::parse(start, format!("no state m[{matrix}]:{offset}")))?;
                GroupWord::state(aut, id)?
            }
            Some('t') => {
                cur.expect('[')?;
                let at = cur.pos;
                let axis = cur.index()?;
                cur.expect(']')?;
                if axis == 0 || axis > aut.dim() {
                    return Err(Error::parse(at, format!("axis must be in 1..={}", aut.dim())));
                }
                let mut matrix = 0;
                if cur.peek() == Some('@') {
                    cur.bump();
                    matrix = cur.index()?;
                }
                translation_word(aut, matrix, axis - 1).map_err(|e| Error::parse(start, e.to_string()))?
            }
            Some(c) => return Err(Error::parse(start, format!("unexpected `{c}`"))),
        };
        let factor = if cur.peek() == Some('^') {
            cur.bump();
            let exp = cur.int()?;
            power(&factor, &exp)?
        } else {
            factor
        };
        word = word.mul(&factor);
    }
}

/// Renders a word in the same syntax, one state factor at a time.
pub fn format_word(aut: &Automaton, w: &GroupWord) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    w.factors()
        .iter()
        .map(|f| {
            let label = aut.get(f.state).label();
            if f.inverse {
                format!("{label}^-1")
            } else {
                label
            }
        })
        .collect::<Vec<_>>()
        .join(" * ")
}
