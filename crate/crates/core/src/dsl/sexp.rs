use std::fmt;

use super::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Atom(String, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a, _) => Some(a),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(Sexp::as_atom)
    }

    pub fn error(&self, message: impl Into<String>) -> ParseError {
        let p = self.pos();
        ParseError::Syntax { line: p.line, col: p.col, message: message.into() }
    }

    pub fn expect_atom(&self, what: &str) -> Result<&str, ParseError> {
        self.as_atom().ok_or_else(|| self.error(format!("expected {what}")))
    }

    pub fn expect_list(&self, what: &str) -> Result<&[Sexp], ParseError> {
        self.as_list().ok_or_else(|| self.error(format!("expected {what}")))
    }

    pub fn expect_str(&self, what: &str) -> Result<&str, ParseError> {
        match self {
            Sexp::Str(s, _) => Ok(s),
            _ => Err(self.error(format!("expected {what}"))),
        }
    }
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn err(&self, pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: pos.line, col: pos.col, message: message.into() }
    }

    fn read(&mut self) -> Result<Option<Sexp>, ParseError> {
        self.skip_ws();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.chars.peek() {
                        None => return Err(self.err(pos, "unclosed parenthesis")),
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, pos)));
                        }
                        Some(_) => items.push(self.read()?.expect("peeked")),
                    }
                }
            }
            ')' => Err(self.err(pos, "unexpected ')'")),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return Err(self.err(pos, "unterminated string")),
                        Some('"') => return Ok(Some(Sexp::Str(s, pos))),
                        Some('\\') => match self.bump() {
                            Some('n') => s.push('\n'),
                            Some(c) => s.push(c),
                            None => return Err(self.err(pos, "unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' || c == '"' {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(s, pos)))
            }
        }
    }
}

/// Reads every top-level expression in `text`.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut r = Reader { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(s) = r.read()? {
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_lists_and_comments() {
        let v = read_all("; header\n(a (b c) \"d e\") x").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].head(), Some("a"));
        assert_eq!(v[1].pos(), Pos { line: 2, col: 17 });
    }

    #[test]
    fn unclosed_reports_opening_position() {
        let e = read_all("\n  (a (b)").unwrap_err();
        assert_eq!(e.to_string(), "2:3: syntax error: unclosed parenthesis");
    }

    #[test]
    fn stray_close() {
        assert!(read_all("a)").is_err());
    }
}
