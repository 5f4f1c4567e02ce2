//! Tokenizer for model files and command-line expressions.
//!
//! Newlines are statement terminators, but only at bracket depth zero and
//! never after a trailing operator, so long equations can wrap inside
//! parentheses or after a '+'. '#' starts a comment. A run of primes binds
//! to the identifier it touches: `f''` is one token.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident { name: String, primes: usize },
    Int(i64),
    Float(f64, String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Assign,
    Colon,
    Semi,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident { name, primes } => write!(f, "{name}{}", "'".repeat(*primes)),
            Tok::Int(n) => write!(f, "{n}"),
            Tok::Float(_, raw) => write!(f, "{raw}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::Assign => write!(f, "="),
            Tok::Colon => write!(f, ":"),
            Tok::Semi => write!(f, ";"),
            Tok::Comma => write!(f, ","),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Newline => write!(f, "end of line"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diag {
    pub class: DiagClass,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagClass {
    Lex,
    Syntax,
    Semantic,
}

impl fmt::Display for Diag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let class = match self.class {
            DiagClass::Lex => "lexical",
            DiagClass::Syntax => "syntax",
            DiagClass::Semantic => "semantic",
        };
        write!(f, "{class} error at {}:{}: {}", self.line, self.col, self.msg)
    }
}

impl Diag {
    pub fn lex(line: usize, col: usize, msg: impl Into<String>) -> Diag {
        Diag { class: DiagClass::Lex, line, col, msg: msg.into() }
    }

    pub fn syntax(line: usize, col: usize, msg: impl Into<String>) -> Diag {
        Diag { class: DiagClass::Syntax, line, col, msg: msg.into() }
    }

    pub fn semantic(line: usize, col: usize, msg: impl Into<String>) -> Diag {
        Diag { class: DiagClass::Semantic, line, col, msg: msg.into() }
    }
}

/// True after tokens that cannot end a statement, so a following line break
/// is a continuation rather than a terminator.
fn suppresses_newline(t: &Tok) -> bool {
    matches!(
        t,
        Tok::Plus
            | Tok::Minus
            | Tok::Star
            | Tok::Slash
            | Tok::Caret
            | Tok::Assign
            | Tok::Colon
            | Tok::Semi
            | Tok::Comma
            | Tok::LParen
            | Tok::LBracket
            | Tok::LBrace
            | Tok::Newline
    )
}

pub fn tokenize(text: &str) -> Result<Vec<Token>, Diag> {
    let mut out: Vec<Token> = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    let mut depth = 0usize;
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            ' ' | '\t' | '\r' => {
                bump(&mut chars);
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(&mut chars);
                }
            }
            '\n' => {
                bump(&mut chars);
                let last_suppresses = out.last().map_or(true, |t| suppresses_newline(&t.tok));
                if depth == 0 && !last_suppresses {
                    out.push(Token { tok: Tok::Newline, line: tl, col: tc });
                }
            }
            '\'' => {
                return Err(Diag::lex(tl, tc, "prime without a preceding function name"));
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                let mut primes = 0;
                while chars.peek() == Some(&'\'') {
                    bump(&mut chars);
                    primes += 1;
                }
                out.push(Token { tok: Tok::Ident { name, primes }, line: tl, col: tc });
            }
            c if c.is_ascii_digit() => {
                let mut raw = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        raw.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                // fraction / exponent make it a float; a bare 'e' stays an
                // identifier so `2*e` and `2e3` both lex as intended
                let mut chars2 = chars.clone();
                let mut is_float = false;
                if chars2.peek() == Some(&'.') {
                    chars2.next();
                    if chars2.peek().is_some_and(|c| c.is_ascii_digit()) {
                        is_float = true;
                        raw.push(bump(&mut chars));
                        while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                            raw.push(bump(&mut chars));
                        }
                    }
                }
                let mut chars2 = chars.clone();
                if matches!(chars2.peek(), Some('e') | Some('E')) {
                    chars2.next();
                    let mut ahead = String::new();
                    if matches!(chars2.peek(), Some('+') | Some('-')) {
                        ahead.push(*chars2.peek().unwrap());
                        chars2.next();
                    }
                    if chars2.peek().is_some_and(|c| c.is_ascii_digit()) {
                        is_float = true;
                        raw.push(bump(&mut chars));
                        for _ in 0..ahead.len() {
                            raw.push(bump(&mut chars));
                        }
                        while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                            raw.push(bump(&mut chars));
                        }
                    }
                }
                let tok = if is_float {
                    match raw.parse::<f64>() {
                        Ok(v) => Tok::Float(v, raw),
                        Err(_) => return Err(Diag::lex(tl, tc, format!("bad number '{raw}'"))),
                    }
                } else {
                    match raw.parse::<i64>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => {
                            return Err(Diag::lex(tl, tc, format!("integer '{raw}' out of range")))
                        }
                    }
                };
                out.push(Token { tok, line: tl, col: tc });
            }
            _ => {
                let c = bump(&mut chars);
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '=' => Tok::Assign,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '(' => {
                        depth += 1;
                        Tok::LParen
                    }
                    '[' => {
                        depth += 1;
                        Tok::LBracket
                    }
                    '{' => {
                        depth += 1;
                        Tok::LBrace
                    }
                    ')' => {
                        depth = depth.saturating_sub(1);
                        Tok::RParen
                    }
                    ']' => {
                        depth = depth.saturating_sub(1);
                        Tok::RBracket
                    }
                    '}' => {
                        depth = depth.saturating_sub(1);
                        Tok::RBrace
                    }
                    other => {
                        return Err(Diag::lex(tl, tc, format!("unexpected character '{other}'")))
                    }
                };
                out.push(Token { tok, line: tl, col: tc });
            }
        }
    }
    // a trailing newline so the last statement always has its terminator
    if out.last().is_some_and(|t| !matches!(t.tok, Tok::Newline)) {
        out.push(Token { tok: Tok::Newline, line, col });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn idents_primes_and_numbers() {
        assert_eq!(
            toks("f''' u_xx 3 1e-9"),
            vec![
                Tok::Ident { name: "f".into(), primes: 3 },
                Tok::Ident { name: "u_xx".into(), primes: 0 },
                Tok::Int(3),
                Tok::Float(1e-9, "1e-9".into()),
                Tok::Newline,
                Tok::Eof
            ]
        );
        // 'e' not followed by digits is a name, not an exponent
        assert_eq!(
            toks("2*e"),
            vec![
                Tok::Int(2),
                Tok::Star,
                Tok::Ident { name: "e".into(), primes: 0 },
                Tok::Newline,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn newline_suppression() {
        // inside brackets and after a trailing operator the break is a
        // continuation; between statements it is a terminator
        assert_eq!(
            toks("a +\nb\nc"),
            vec![
                Tok::Ident { name: "a".into(), primes: 0 },
                Tok::Plus,
                Tok::Ident { name: "b".into(), primes: 0 },
                Tok::Newline,
                Tok::Ident { name: "c".into(), primes: 0 },
                Tok::Newline,
                Tok::Eof
            ]
        );
        let inside = toks("D[u,\nx]");
        assert!(!inside[..inside.len() - 2].contains(&Tok::Newline));
    }

    #[test]
    fn comments_and_positions() {
        let ts = tokenize("a # trailing\n  b").unwrap();
        assert_eq!(ts[0].tok, Tok::Ident { name: "a".into(), primes: 0 });
        assert_eq!(ts[2].tok, Tok::Ident { name: "b".into(), primes: 0 });
        assert_eq!((ts[2].line, ts[2].col), (2, 3));
        let err = tokenize("u $ x").unwrap_err();
        assert_eq!(err.class, DiagClass::Lex);
        assert_eq!((err.line, err.col), (1, 3));
    }
}
