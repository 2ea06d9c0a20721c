//! Character cursor shared by the Turtle and query parsers.

use std::fmt;

use crate::rdf::xsd;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub location: Location,
    pub message: String,
}

pub(crate) type LexResult<T> = Result<T, LexError>;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    column: usize,
}

fn is_pn_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-' || (!c.is_ascii() && c.is_alphanumeric())
}

const PN_LOCAL_ESC: &str = "_~.-!$&'()*+,;=/?#@%";

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    pub fn location(&self) -> Location {
        Location {
            line: self.line,
            column: self.column,
        }
    }

    pub fn error<T>(&self, message: impl Into<String>) -> LexResult<T> {
        Err(LexError {
            location: self.location(),
            message: message.into(),
        })
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek_nth(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn advance_bytes(&mut self, n: usize) {
        let end = self.pos + n;
        while self.pos < end {
            self.bump();
        }
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.rest().starts_with(s) {
            self.advance_bytes(s.len());
            true
        } else {
            false
        }
    }

    /// Case-insensitive keyword not followed by a name character.
    pub fn eat_keyword(&mut self, kw: &str) -> bool {
        let rest = self.rest();
        if rest.len() < kw.len() || !rest.is_char_boundary(kw.len()) || !rest[..kw.len()].eq_ignore_ascii_case(kw) {
            return false;
        }
        if rest[kw.len()..].chars().next().is_some_and(|c| is_pn_char(c) || c == ':') {
            return false;
        }
        self.advance_bytes(kw.len());
        true
    }

    /// Skips whitespace and `#` comments.
    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    pub fn expect(&mut self, s: &str) -> LexResult<()> {
        if self.eat(s) {
            Ok(())
        } else if self.at_end() {
            self.error(format!("expected '{s}', found end of input"))
        } else {
            let found: String = self.rest().chars().take(12).collect();
            self.error(format!("expected '{s}', found {found:?}"))
        }
    }

    fn hex_escape(&mut self, digits: usize) -> LexResult<char> {
        let loc = self.location();
        let mut v = 0u32;
        for _ in 0..digits {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => v = v * 16 + d,
                None => {
                    return Err(LexError {
                        location: loc,
                        message: "malformed unicode escape".into(),
                    })
                }
            }
        }
        char::from_u32(v).ok_or(LexError {
            location: loc,
            message: format!("invalid code point U+{v:X}"),
        })
    }

    /// `<...>` with `\u`/`\U` escapes. The cursor sits on `<`.
    pub fn iriref(&mut self) -> LexResult<String> {
        self.expect("<")?;
        let mut out = String::new();
        loop {
            match self.peek() {
                None => return self.error("unterminated IRI"),
                Some('>') => {
                    self.bump();
                    return Ok(out);
                }
                Some('\\') => {
                    self.bump();
                    match self.bump() {
                        Some('u') => out.push(self.hex_escape(4)?),
                        Some('U') => out.push(self.hex_escape(8)?),
                        _ => return self.error("invalid escape in IRI"),
                    }
                }
                Some(c) if c <= ' ' || "<\"{}|^`".contains(c) => {
                    return self.error(format!("character {c:?} not allowed in IRI"));
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    /// Short or long string, single or double quoted. The cursor sits on the quote.
    pub fn quoted_string(&mut self) -> LexResult<String> {
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return self.error("expected string literal"),
        };
        let triple: String = std::iter::repeat_n(quote, 3).collect();
        let long = self.eat(&triple);
        if !long {
            self.bump();
        }
        let mut out = String::new();
        loop {
            if long && self.eat(&triple) {
                return Ok(out);
            }
            match self.peek() {
                None => return self.error("unterminated string literal"),
                Some(c) if c == quote && !long => {
                    self.bump();
                    return Ok(out);
                }
                Some('\n' | '\r') if !long => return self.error("newline in short string literal"),
                Some('\\') => {
                    self.bump();
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_escape(4)?,
                        Some('U') => self.hex_escape(8)?,
                        _ => return self.error("invalid string escape"),
                    };
                    out.push(c);
                }
                Some(c) => {
                    self.bump();
                    out.push(c);
                }
            }
        }
    }

    pub fn at_pname(&self) -> bool {
        let mut chars = self.rest().chars();
        match chars.next() {
            Some(':') => true,
            Some(c) if c.is_alphabetic() => {
                for c in chars {
                    if c == ':' {
                        return true;
                    }
                    if !(is_pn_char(c) || c == '.') {
                        return false;
                    }
                }
                false
            }
            _ => false,
        }
    }

    /// `prefix:local`; trailing dots stay in the input.
    pub fn pname(&mut self) -> LexResult<(String, String)> {
        let mut prefix = String::new();
        loop {
            match self.peek() {
                Some(':') => {
                    self.bump();
                    break;
                }
                Some(c) if is_pn_char(c) || c == '.' => {
                    prefix.push(c);
                    self.bump();
                }
                _ => return self.error("expected prefixed name"),
            }
        }
        if prefix.ends_with('.') {
            return self.error("prefix may not end with '.'");
        }
        // Scan ahead; unescaped trailing dots are not part of the local name.
        let rest = self.rest();
        let mut local = String::new();
        let mut good_len = 0usize;
        let mut good_bytes = 0usize;
        let mut it = rest.char_indices().peekable();
        while let Some(&(i, c)) = it.peek() {
            if c == '\\' {
                let mut look = rest[i + 1..].chars();
                match look.next() {
                    Some(e) if PN_LOCAL_ESC.contains(e) => {
                        it.next();
                        it.next();
                        local.push(e);
                        good_len = local.len();
                        good_bytes = i + 1 + e.len_utf8();
                        continue;
                    }
                    _ => break,
                }
            }
            if c == '%' {
                let hex: String = rest[i + 1..].chars().take(2).collect();
                if hex.len() == 2 && hex.chars().all(|h| h.is_ascii_hexdigit()) {
                    local.push('%');
                    local.push_str(&hex);
                    it.next();
                    it.next();
                    it.next();
                    good_len = local.len();
                    good_bytes = i + 3;
                    continue;
                }
                break;
            }
            if is_pn_char(c) || c == ':' || c == '.' {
                it.next();
                local.push(c);
                if c != '.' {
                    good_len = local.len();
                    good_bytes = i + c.len_utf8();
                }
                continue;
            }
            break;
        }
        local.truncate(good_len);
        if local.starts_with('-') {
            return self.error("local name may not start with '-'");
        }
        self.advance_bytes(good_bytes);
        Ok((prefix, local))
    }

    pub fn at_number(&self) -> bool {
        let mut chars = self.rest().chars();
        match chars.next() {
            Some(c) if c.is_ascii_digit() => true,
            Some('+' | '-') => matches!(chars.next(), Some(c) if c.is_ascii_digit() || c == '.'),
            Some('.') => matches!(chars.next(), Some(c) if c.is_ascii_digit()),
            _ => false,
        }
    }

    /// Numeric literal; returns lexical form and datatype IRI.
    pub fn number(&mut self) -> LexResult<(String, &'static str)> {
        let mut lex = String::new();
        if let Some(s @ ('+' | '-')) = self.peek() {
            lex.push(s);
            self.bump();
        }
        let mut int_digits = 0;
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            lex.push(c);
            self.bump();
            int_digits += 1;
        }
        let mut datatype = xsd::INTEGER;
        if self.peek() == Some('.') && self.peek_nth(1).is_some_and(|c| c.is_ascii_digit()) {
            lex.push('.');
            self.bump();
            while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                lex.push(c);
                self.bump();
            }
            datatype = xsd::DECIMAL;
        } else if int_digits == 0 {
            return self.error("malformed number");
        }
        if let Some(e @ ('e' | 'E')) = self.peek() {
            let mut exp = String::from(e);
            let mut n = 1;
            if let Some(s @ ('+' | '-')) = self.peek_nth(1) {
                exp.push(s);
                n = 2;
            }
            if self.peek_nth(n).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..n {
                    self.bump();
                }
                while let Some(c) = self.peek().filter(char::is_ascii_digit) {
                    exp.push(c);
                    self.bump();
                }
                lex.push_str(&exp);
                datatype = xsd::DOUBLE;
            }
        }
        Ok((lex, datatype))
    }

    /// `?name` or `$name`; the cursor sits on the sigil.
    pub fn variable(&mut self) -> LexResult<String> {
        match self.peek() {
            Some('?' | '$') => {
                self.bump();
            }
            _ => return self.error("expected variable"),
        }
        let mut name = String::new();
        while let Some(c) = self.peek().filter(|c| c.is_alphanumeric() || *c == '_') {
            name.push(c);
            self.bump();
        }
        if name.is_empty() {
            return self.error("empty variable name");
        }
        Ok(name)
    }
}
