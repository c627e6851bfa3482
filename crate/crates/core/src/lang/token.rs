use std::fmt;

use serde::Serialize;

use super::FrontendError;

/// Position of a token or construct in the source text (1-based).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
}

impl Span {
    pub fn to(self, end: Span) -> Span {
        Span { line: self.line, col: self.col, end_line: end.end_line.max(self.line) }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    Str(String),

    KwClass,
    KwStatic,
    KwPublic,
    KwPrivate,
    KwVoid,
    KwInt,
    KwBoolean,
    KwIf,
    KwElse,
    KwWhile,
    KwFor,
    KwReturn,
    KwNew,
    KwTrue,
    KwFalse,
    KwAspect,
    KwPointcut,
    KwBefore,
    KwAfter,
    KwReturning,
    KwCall,

    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Colon,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Bang,
    AndAnd,
    OrOr,
    PlusPlus,
    MinusMinus,
}

impl TokenKind {
    fn keyword(word: &str) -> Option<TokenKind> {
        use TokenKind::*;
        Some(match word {
            "class" => KwClass,
            "static" => KwStatic,
            "public" => KwPublic,
            "private" => KwPrivate,
            "void" => KwVoid,
            "int" => KwInt,
            "boolean" => KwBoolean,
            "if" => KwIf,
            "else" => KwElse,
            "while" => KwWhile,
            "for" => KwFor,
            "return" => KwReturn,
            "new" => KwNew,
            "true" => KwTrue,
            "false" => KwFalse,
            "aspect" => KwAspect,
            "pointcut" => KwPointcut,
            "before" => KwBefore,
            "after" => KwAfter,
            "returning" => KwReturning,
            "call" => KwCall,
            _ => return None,
        })
    }

    /// Short name used in test expectations and token dumps, e.g. `kw_if`, `ident(n)`.
    pub fn short_name(&self) -> String {
        use TokenKind::*;
        match self {
            Ident(s) => format!("ident({s})"),
            Int(v) => format!("int({v})"),
            Str(s) => format!("str({s:?})"),
            LParen => "lparen".into(),
            RParen => "rparen".into(),
            LBrace => "lbrace".into(),
            RBrace => "rbrace".into(),
            LBracket => "lbracket".into(),
            RBracket => "rbracket".into(),
            Semi => "semi".into(),
            Comma => "comma".into(),
            Dot => "dot".into(),
            Colon => "colon".into(),
            other => {
                let text = other.to_string();
                let bare = text.trim_matches('`');
                if bare.chars().all(|c| c.is_ascii_alphabetic()) {
                    format!("kw_{bare}")
                } else {
                    format!("op({bare})")
                }
            }
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        let s = match self {
            Ident(s) => return write!(f, "identifier `{s}`"),
            Int(v) => return write!(f, "integer `{v}`"),
            Str(s) => return write!(f, "string {s:?}"),
            KwClass => "class",
            KwStatic => "static",
            KwPublic => "public",
            KwPrivate => "private",
            KwVoid => "void",
            KwInt => "int",
            KwBoolean => "boolean",
            KwIf => "if",
            KwElse => "else",
            KwWhile => "while",
            KwFor => "for",
            KwReturn => "return",
            KwNew => "new",
            KwTrue => "true",
            KwFalse => "false",
            KwAspect => "aspect",
            KwPointcut => "pointcut",
            KwBefore => "before",
            KwAfter => "after",
            KwReturning => "returning",
            KwCall => "call",
            LParen => "(",
            RParen => ")",
            LBrace => "{",
            RBrace => "}",
            LBracket => "[",
            RBracket => "]",
            Semi => ";",
            Comma => ",",
            Dot => ".",
            Colon => ":",
            Assign => "=",
            EqEq => "==",
            NotEq => "!=",
            Lt => "<",
            Le => "<=",
            Gt => ">",
            Ge => ">=",
            Plus => "+",
            Minus => "-",
            Star => "*",
            Slash => "/",
            Percent => "%",
            Bang => "!",
            AndAnd => "&&",
            OrOr => "||",
            PlusPlus => "++",
            MinusMinus => "--",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
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

    fn here(&self) -> Span {
        Span { line: self.line, col: self.col, end_line: self.line }
    }

    fn error(&self, span: Span, message: impl Into<String>) -> FrontendError {
        FrontendError::Lex { line: span.line, col: span.col, message: message.into() }
    }

    fn skip_trivia(&mut self) -> Result<(), FrontendError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    match ahead.peek() {
                        Some('/') => {
                            while let Some(c) = self.bump() {
                                if c == '\n' {
                                    break;
                                }
                            }
                        }
                        Some('*') => {
                            let start = self.here();
                            self.bump();
                            self.bump();
                            let mut closed = false;
                            while let Some(c) = self.bump() {
                                if c == '*' && self.peek() == Some('/') {
                                    self.bump();
                                    closed = true;
                                    break;
                                }
                            }
                            if !closed {
                                return Err(self.error(start, "unterminated block comment"));
                            }
                        }
                        _ => return Ok(()),
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn next_token(&mut self) -> Result<Option<Token>, FrontendError> {
        self.skip_trivia()?;
        let start = self.here();
        let Some(c) = self.bump() else {
            return Ok(None);
        };
        use TokenKind::*;
        let kind = match c {
            '(' => LParen,
            ')' => RParen,
            '{' => LBrace,
            '}' => RBrace,
            '[' => LBracket,
            ']' => RBracket,
            ';' => Semi,
            ',' => Comma,
            '.' => Dot,
            ':' => Colon,
            '*' => Star,
            '/' => Slash,
            '%' => Percent,
            '=' => self.follow('=', EqEq, Assign),
            '!' => self.follow('=', NotEq, Bang),
            '<' => self.follow('=', Le, Lt),
            '>' => self.follow('=', Ge, Gt),
            '+' => self.follow('+', PlusPlus, Plus),
            '-' => self.follow('-', MinusMinus, Minus),
            '&' => {
                if self.peek() == Some('&') {
                    self.bump();
                    AndAnd
                } else {
                    return Err(self.error(start, "unexpected character `&`"));
                }
            }
            '|' => {
                if self.peek() == Some('|') {
                    self.bump();
                    OrOr
                } else {
                    return Err(self.error(start, "unexpected character `|`"));
                }
            }
            '"' => self.string(start)?,
            c if c.is_ascii_digit() => {
                let mut text = String::from(c);
                while let Some(d) = self.peek().filter(|d| d.is_ascii_digit()) {
                    text.push(d);
                    self.bump();
                }
                let value = text
                    .parse::<i64>()
                    .map_err(|_| self.error(start, format!("integer literal `{text}` out of range")))?;
                Int(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut text = String::from(c);
                while let Some(d) = self.peek().filter(|d| d.is_ascii_alphanumeric() || *d == '_') {
                    text.push(d);
                    self.bump();
                }
                TokenKind::keyword(&text).unwrap_or(Ident(text))
            }
            other => return Err(self.error(start, format!("unexpected character `{other}`"))),
        };
        Ok(Some(Token { kind, span: start }))
    }

    fn follow(&mut self, next: char, yes: TokenKind, no: TokenKind) -> TokenKind {
        if self.peek() == Some(next) {
            self.bump();
            yes
        } else {
            no
        }
    }

    fn string(&mut self, start: Span) -> Result<TokenKind, FrontendError> {
        let mut text = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return Err(self.error(start, "unterminated string literal")),
                Some('"') => return Ok(TokenKind::Str(text)),
                Some('\\') => match self.bump() {
                    Some('n') => text.push('\n'),
                    Some('t') => text.push('\t'),
                    Some('"') => text.push('"'),
                    Some('\\') => text.push('\\'),
                    _ => return Err(self.error(start, "invalid escape in string literal")),
                },
                Some(c) => text.push(c),
            }
        }
    }
}

/// Splits MiniAJ source into tokens. Whitespace and both comment styles are dropped.
pub fn tokenize(text: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lexer = Lexer { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut tokens = Vec::new();
    while let Some(tok) = lexer.next_token()? {
        tokens.push(tok);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(src: &str) -> Vec<String> {
        tokenize(src).unwrap().iter().map(|t| t.kind.short_name()).collect()
    }

    #[test]
    fn if_header() {
        assert_eq!(
            names("if (isprime(n))"),
            ["kw_if", "lparen", "ident(isprime)", "lparen", "ident(n)", "rparen", "rparen"]
        );
    }

    #[test]
    fn empty_input() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  // only a comment\n /* and another */ ").unwrap().is_empty());
    }

    #[test]
    fn operators_and_positions() {
        let toks = tokenize("i <= n/2;\n  i++ && !b").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind.clone()).collect();
        use TokenKind::*;
        assert_eq!(
            kinds,
            vec![
                Ident("i".into()),
                Le,
                Ident("n".into()),
                Slash,
                Int(2),
                Semi,
                Ident("i".into()),
                PlusPlus,
                AndAnd,
                Bang,
                Ident("b".into())
            ]
        );
        assert_eq!((toks[6].span.line, toks[6].span.col), (2, 3));
    }

    #[test]
    fn string_literal_with_escape() {
        let toks = tokenize(r#""a \"q\" :""#).unwrap();
        assert_eq!(toks[0].kind, TokenKind::Str("a \"q\" :".into()));
    }

    #[test]
    fn rejects_foreign_characters() {
        let err = tokenize("x = 1;\n y = #;").unwrap_err();
        match err {
            FrontendError::Lex { line, col, .. } => assert_eq!((line, col), (2, 6)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(tokenize("a & b").is_err());
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("/* open").is_err());
    }
}
