use std::fmt;

use num_bigint::BigInt;

use super::ExprError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    Str(String),
    /// `|` choice, also the Box separator
    Bar,
    /// `/` substitution
    Slash,
    /// `(+)` or `⊕`
    Override,
    /// `(-)` or `⊖`
    Difference,
    /// `^` or `↑`
    Hide,
    /// `!` or `↓`
    Project,
    /// `<=>` or `⇔`
    Undirected,
    /// `=>` or `⇒`
    Directed,
    /// `<=`, `⇐` or `≤`: argument-swapped directed range in context
    /// expressions, less-or-equal in Box predicates.
    LtEq,
    /// `&` or `∩`
    Amp,
    /// `%` or `∪`
    Percent,
    /// `><` or `⋈`
    Join,
    /// `[&]` or `⊓`
    SetIntersection,
    /// `[+]` or `⊞`
    SetUnion,
    /// `==`
    EqEq,
    /// `<<=` or `⊆`
    SubsetEq,
    /// `>>=` or `⊇`
    SupersetEq,
    /// `=`
    Assign,
    /// `!=` or `≠`
    NotEq,
    Lt,
    Gt,
    /// `>=` or `≥`
    GtEq,
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(name) => return f.write_str(name),
            Tok::Int(n) => return write!(f, "{n}"),
            Tok::Str(s) => return write!(f, "{s:?}"),
            Tok::Bar => "|",
            Tok::Slash => "/",
            Tok::Override => "(+)",
            Tok::Difference => "(-)",
            Tok::Hide => "^",
            Tok::Project => "!",
            Tok::Undirected => "<=>",
            Tok::Directed => "=>",
            Tok::LtEq => "<=",
            Tok::Amp => "&",
            Tok::Percent => "%",
            Tok::Join => "><",
            Tok::SetIntersection => "[&]",
            Tok::SetUnion => "[+]",
            Tok::EqEq => "==",
            Tok::SubsetEq => "<<=",
            Tok::SupersetEq => ">>=",
            Tok::Assign => "=",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::GtEq => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

/// A token and its 1-based character column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: usize,
}

// Longest spellings first so that prefixes do not shadow them.
const SYMBOLS: &[(&str, Tok)] = &[
    ("<=>", Tok::Undirected),
    ("<<=", Tok::SubsetEq),
    (">>=", Tok::SupersetEq),
    ("(+)", Tok::Override),
    ("(-)", Tok::Difference),
    ("[&]", Tok::SetIntersection),
    ("[+]", Tok::SetUnion),
    ("<=", Tok::LtEq),
    ("=>", Tok::Directed),
    ("==", Tok::EqEq),
    ("!=", Tok::NotEq),
    (">=", Tok::GtEq),
    ("><", Tok::Join),
    ("|", Tok::Bar),
    ("/", Tok::Slash),
    ("^", Tok::Hide),
    ("!", Tok::Project),
    ("&", Tok::Amp),
    ("%", Tok::Percent),
    ("=", Tok::Assign),
    ("<", Tok::Lt),
    (">", Tok::Gt),
    ("+", Tok::Plus),
    ("-", Tok::Minus),
    ("*", Tok::Star),
    ("(", Tok::LParen),
    (")", Tok::RParen),
    ("{", Tok::LBrace),
    ("}", Tok::RBrace),
    ("[", Tok::LBracket),
    ("]", Tok::RBracket),
    (",", Tok::Comma),
    ("⊕", Tok::Override),
    ("⊖", Tok::Difference),
    ("↑", Tok::Hide),
    ("↓", Tok::Project),
    ("⇔", Tok::Undirected),
    ("⇒", Tok::Directed),
    ("→", Tok::Directed),
    ("⇐", Tok::LtEq),
    ("≤", Tok::LtEq),
    ("≥", Tok::GtEq),
    ("≠", Tok::NotEq),
    ("∩", Tok::Amp),
    ("∪", Tok::Percent),
    ("⋈", Tok::Join),
    ("⊓", Tok::SetIntersection),
    ("⊞", Tok::SetUnion),
    ("⊆", Tok::SubsetEq),
    ("⊇", Tok::SupersetEq),
    ("⟨", Tok::Lt),
    ("⟩", Tok::Gt),
];

/// Splits `text` into tokens, always ending with [`Tok::Eof`].
pub fn tokenize(text: &str) -> Result<Vec<Token>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    'outer: while i < chars.len() {
        let c = chars[i];
        let pos = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            tokens.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            tokens.push(Token {
                tok: Tok::Int(digits.parse().expect("ascii digits")),
                pos,
            });
            continue;
        }
        if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => {
                        return Err(ExprError::Syntax {
                            pos,
                            msg: "unterminated string literal".into(),
                        })
                    }
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        let escaped = match chars.get(i + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => {
                                return Err(ExprError::Syntax {
                                    pos: i + 1,
                                    msg: "invalid escape in string literal".into(),
                                })
                            }
                        };
                        s.push(escaped);
                        i += 2;
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            tokens.push(Token { tok: Tok::Str(s), pos });
            continue;
        }
        for (spelling, tok) in SYMBOLS {
            let len = spelling.chars().count();
            if i + len <= chars.len() && chars[i..i + len].iter().copied().eq(spelling.chars()) {
                tokens.push(Token { tok: tok.clone(), pos });
                i += len;
                continue 'outer;
            }
        }
        return Err(ExprError::UnknownToken { pos, found: c });
    }
    tokens.push(Token {
        tok: Tok::Eof,
        pos: chars.len() + 1,
    });
    Ok(tokens)
}
