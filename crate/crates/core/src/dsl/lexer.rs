use crate::error::{Error, Pos, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Star,
    Caret,
    At,
    Eq,
    Minus,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Star => "`*`".into(),
            Tok::Caret => "`^`".into(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// Splits `text` into tokens with their 1-based positions. `#` starts a
/// comment running to the end of the line.
pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, column: 1 };
    let advance = |c: char, pos: &mut Pos| {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c.is_whitespace() {
            chars.next();
            advance(c, &mut pos);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance(c, &mut pos);
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                s.push(c);
                chars.next();
                advance(c, &mut pos);
            }
            out.push((Tok::Ident(s), start));
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                s.push(c);
                chars.next();
                advance(c, &mut pos);
            }
            let n = s
                .parse::<u64>()
                .ok()
                .filter(|&n| n <= i64::MAX as u64)
                .ok_or_else(|| Error::parse(start, format!("integer `{s}` is too large")))?;
            out.push((Tok::Int(n), start));
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ',' => Tok::Comma,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '@' => Tok::At,
            '=' => Tok::Eq,
            '-' => Tok::Minus,
            other => {
                return Err(Error::parse(start, format!("unexpected character {other:?}")));
            }
        };
        chars.next();
        advance(c, &mut pos);
        out.push((tok, start));
    }
    out.push((Tok::Eof, pos));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = lex("gen a = (1, b) # swap\n  @ (1 2)").unwrap();
        assert_eq!(toks[0], (Tok::Ident("gen".into()), Pos { line: 1, column: 1 }));
        assert_eq!(toks[3].1, Pos { line: 1, column: 9 });
        let at = toks.iter().find(|(t, _)| *t == Tok::At).unwrap();
        assert_eq!(at.1, Pos { line: 2, column: 3 });
        assert_eq!(toks.last().unwrap().0, Tok::Eof);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = lex("gen a = $").unwrap_err();
        assert!(err.to_string().starts_with("1:9:"), "{err}");
        assert!(lex("99999999999999999999999").is_err());
    }
}
