use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Int(u64),
    Ident(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Ge,
    Eq,
    Eof,
}

impl Tok {
    pub fn text(&self) -> String {
        match self {
            Tok::Int(n) => n.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::LBrace => "{".into(),
            Tok::RBrace => "}".into(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Semi => ";".into(),
            Tok::Colon => ":".into(),
            Tok::Comma => ",".into(),
            Tok::Plus => "+".into(),
            Tok::Minus => "-".into(),
            Tok::Star => "*".into(),
            Tok::Slash => "/".into(),
            Tok::Caret => "^".into(),
            Tok::Ge => ">=".into(),
            Tok::Eq => "=".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
    /// Byte offset of the first character.
    pub offset: usize,
    pub len: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&(off, c)) = chars.peek() {
        let start = (line, col, off);
        let single = |t: Tok| Token { tok: t, line: start.0, column: start.1, offset: start.2, len: 1 };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                let n = s.parse::<u64>().map_err(|_| ParseError {
                    line: start.0,
                    column: start.1,
                    message: "integer literal too large".into(),
                    token: s.clone(),
                })?;
                out.push(Token { tok: Tok::Int(n), line: start.0, column: start.1, offset: off, len: s.len() });
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !(d.is_ascii_alphanumeric() || d == '_') {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                let len = s.len();
                out.push(Token { tok: Tok::Ident(s), line: start.0, column: start.1, offset: off, len });
            }
            '>' => {
                chars.next();
                col += 1;
                match chars.peek() {
                    Some(&(_, '=')) => {
                        chars.next();
                        col += 1;
                        out.push(Token { tok: Tok::Ge, line: start.0, column: start.1, offset: off, len: 2 });
                    }
                    _ => {
                        return Err(ParseError {
                            line: start.0,
                            column: start.1,
                            message: "expected '>='".into(),
                            token: ">".into(),
                        })
                    }
                }
            }
            _ => {
                let t = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ';' => Tok::Semi,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '=' => Tok::Eq,
                    other => {
                        return Err(ParseError {
                            line: start.0,
                            column: start.1,
                            message: format!("unexpected character '{other}'"),
                            token: other.to_string(),
                        })
                    }
                };
                chars.next();
                col += 1;
                out.push(single(t));
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, column: col, offset: src.len(), len: 0 });
    Ok(out)
}
