//! Hand-rolled lexer. Contract comments `/*@ ... @*/` are tokenized
//! structurally: SpecOpen/SpecClose markers bracket an interior lexed like
//! ordinary code, with decorative `@` at line starts skipped. Plain block
//! and line comments are discarded.

use super::token::{Pos, Token, TokenKind};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum LexError {
    #[error("{pos}: unexpected character `{ch}`")]
    UnexpectedChar { ch: char, pos: Pos },
    #[error("{pos}: unterminated comment")]
    UnterminatedComment { pos: Pos },
    #[error("{pos}: unterminated contract comment")]
    UnterminatedContract { pos: Pos },
    #[error("{pos}: malformed number `{text}`")]
    MalformedNumber { text: String, pos: Pos },
}

impl LexError {
    pub fn pos(&self) -> Pos {
        match self {
            LexError::UnexpectedChar { pos, .. }
            | LexError::UnterminatedComment { pos }
            | LexError::UnterminatedContract { pos }
            | LexError::MalformedNumber { pos, .. } => *pos,
        }
    }
}

pub fn lex(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer::new(source);
    let mut out = Vec::new();
    loop {
        let tok = lx.next_token()?;
        let eof = tok.kind == TokenKind::Eof;
        out.push(tok);
        if eof {
            if lx.in_spec {
                return Err(LexError::UnterminatedContract { pos: lx.spec_open_pos });
            }
            return Ok(out);
        }
    }
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: u32,
    col: u32,
    in_spec: bool,
    spec_open_pos: Pos,
    at_line_start: bool,
}

impl Lexer {
    fn new(src: &str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            i: 0,
            line: 1,
            col: 1,
            in_spec: false,
            spec_open_pos: Pos { line: 1, col: 1 },
            at_line_start: true,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.i).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.i + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
            self.at_line_start = true;
        } else {
            self.col += 1;
            if !c.is_whitespace() {
                self.at_line_start = false;
            }
        }
        Some(c)
    }

    fn next_token(&mut self) -> Result<Token, LexError> {
        self.skip_trivia()?;
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok(Token {
                kind: TokenKind::Eof,
                pos,
            });
        };
        let kind = match c {
            '/' if self.peek_at(1) == Some('*') && self.peek_at(2) == Some('@') => {
                self.bump();
                self.bump();
                self.bump();
                self.in_spec = true;
                self.spec_open_pos = pos;
                TokenKind::SpecOpen
            }
            '(' => self.single(TokenKind::LParen),
            ')' => self.single(TokenKind::RParen),
            '{' => self.single(TokenKind::LBrace),
            '}' => self.single(TokenKind::RBrace),
            '[' => self.single(TokenKind::LBracket),
            ']' => self.single(TokenKind::RBracket),
            ',' => self.single(TokenKind::Comma),
            ';' => self.single(TokenKind::Semi),
            ':' => self.single(TokenKind::Colon),
            '.' => self.single(TokenKind::Dot),
            '+' => self.single(TokenKind::Plus),
            '-' => self.single(TokenKind::Minus),
            '*' => self.single(TokenKind::Star),
            '/' => self.single(TokenKind::Slash),
            '!' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    TokenKind::NotEq
                } else {
                    TokenKind::Bang
                }
            }
            '<' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    TokenKind::Le
                } else {
                    TokenKind::Lt
                }
            }
            '>' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    TokenKind::Ge
                } else {
                    TokenKind::Gt
                }
            }
            '=' => {
                self.bump();
                if self.peek() == Some('=') {
                    self.bump();
                    if self.peek() == Some('>') {
                        self.bump();
                        TokenKind::Implies
                    } else {
                        TokenKind::EqEq
                    }
                } else {
                    TokenKind::Assign
                }
            }
            '&' => {
                self.bump();
                if self.peek() == Some('&') {
                    self.bump();
                    TokenKind::AndAnd
                } else {
                    return Err(LexError::UnexpectedChar { ch: '&', pos });
                }
            }
            '|' => {
                self.bump();
                if self.peek() == Some('|') {
                    self.bump();
                    TokenKind::OrOr
                } else {
                    return Err(LexError::UnexpectedChar { ch: '|', pos });
                }
            }
            '@' if self.in_spec => {
                if self.peek_at(1) == Some('*') && self.peek_at(2) == Some('/') {
                    self.bump();
                    self.bump();
                    self.bump();
                    self.in_spec = false;
                    TokenKind::SpecClose
                } else {
                    // Stray `@` mid-line inside a contract.
                    return Err(LexError::UnexpectedChar { ch: '@', pos });
                }
            }
            '\\' => {
                self.bump();
                let mut name = String::new();
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
                if name.is_empty() {
                    return Err(LexError::UnexpectedChar { ch: '\\', pos });
                }
                TokenKind::BackslashIdent(name)
            }
            c if c.is_ascii_digit() => self.number(pos)?,
            c if c.is_ascii_alphabetic() || c == '_' => self.ident(),
            other => return Err(LexError::UnexpectedChar { ch: other, pos }),
        };
        Ok(Token { kind, pos })
    }

    fn single(&mut self, kind: TokenKind) -> TokenKind {
        self.bump();
        kind
    }

    fn skip_trivia(&mut self) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                // Decorative `@` at line starts inside contract comments.
                Some('@')
                    if self.in_spec
                        && self.at_line_start
                        && !(self.peek_at(1) == Some('*') && self.peek_at(2) == Some('/')) =>
                {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') && self.peek_at(2) != Some('@') => {
                    let pos = self.pos();
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
                        return Err(LexError::UnterminatedComment { pos });
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn number(&mut self, pos: Pos) -> Result<TokenKind, LexError> {
        let mut text = String::new();
        let mut is_fp = false;
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_fp = true;
            text.push('.');
            self.bump();
            while let Some(c) = self.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let n1 = self.peek_at(1);
            let n2 = self.peek_at(2);
            let exp_ok = n1.is_some_and(|c| c.is_ascii_digit())
                || (matches!(n1, Some('+') | Some('-')) && n2.is_some_and(|c| c.is_ascii_digit()));
            if exp_ok {
                is_fp = true;
                text.push(self.bump().unwrap());
                if matches!(self.peek(), Some('+') | Some('-')) {
                    text.push(self.bump().unwrap());
                }
                while let Some(c) = self.peek() {
                    if c.is_ascii_digit() {
                        text.push(c);
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
        }
        // `1.5f` spells a float32 literal
        if self.peek() == Some('f') && is_fp {
            text.push('f');
            self.bump();
        }
        if self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            return Err(LexError::MalformedNumber { text, pos });
        }
        Ok(if is_fp {
            TokenKind::FpNumber(text)
        } else {
            TokenKind::IntNumber(text)
        })
    }

    fn ident(&mut self) -> TokenKind {
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        match name.as_str() {
            "record" => TokenKind::Record,
            "method" => TokenKind::Method,
            "const" => TokenKind::Const,
            "var" => TokenKind::Var,
            "if" => TokenKind::If,
            "else" => TokenKind::Else,
            "while" => TokenKind::While,
            "return" => TokenKind::Return,
            "new" => TokenKind::New,
            "true" => TokenKind::True,
            "false" => TokenKind::False,
            "double" => TokenKind::Double,
            "float" => TokenKind::Float,
            "bool" => TokenKind::Bool,
            "int" => TokenKind::Int,
            "requires" => TokenKind::Requires,
            "ensures" => TokenKind::Ensures,
            "also" => TokenKind::Also,
            "loop_invariant" => TokenKind::LoopInvariant,
            "length" => TokenKind::Length,
            _ => TokenKind::Ident(name),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_contract_comment_structurally() {
        let toks = lex("/*@ requires true; @*/ method f(): double { return 1.0; }").unwrap();
        assert_eq!(toks[0].kind, TokenKind::SpecOpen);
        assert_eq!(toks[1].kind, TokenKind::Requires);
        assert_eq!(toks[2].kind, TokenKind::True);
        assert_eq!(toks[3].kind, TokenKind::Semi);
        assert_eq!(toks[4].kind, TokenKind::SpecClose);
    }

    #[test]
    fn decorative_at_signs_are_skipped() {
        let src = "/*@ requires true;\n  @ ensures false;\n  @*/";
        let toks = lex(src).unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| &t.kind).collect();
        assert!(kinds.contains(&&TokenKind::Ensures));
        assert_eq!(toks.last().unwrap().kind, TokenKind::Eof);
    }

    #[test]
    fn unterminated_contract_is_an_error() {
        assert!(matches!(
            lex("/*@ requires true;"),
            Err(LexError::UnterminatedContract { .. })
        ));
    }

    #[test]
    fn numbers_split_into_fp_and_int() {
        let toks = lex("1 1.5 6.123233995736766E-17 2e10 7").unwrap();
        assert_eq!(toks[0].kind, TokenKind::IntNumber("1".into()));
        assert_eq!(toks[1].kind, TokenKind::FpNumber("1.5".into()));
        assert_eq!(
            toks[2].kind,
            TokenKind::FpNumber("6.123233995736766E-17".into())
        );
        assert_eq!(toks[3].kind, TokenKind::FpNumber("2e10".into()));
        assert_eq!(toks[4].kind, TokenKind::IntNumber("7".into()));
    }

    #[test]
    fn positions_point_at_token_starts() {
        let toks = lex("method\n  f").unwrap();
        assert_eq!(toks[0].pos.line, 1);
        assert_eq!(toks[1].pos.line, 2);
        assert_eq!(toks[1].pos.col, 3);
    }
}
