//! Tokens of the MiniF surface syntax.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// Floating literal, original spelling preserved for bit-exact
    /// encoding and round-trip printing.
    FpNumber(String),
    IntNumber(String),
    /// `\result`, `\forall` and friends.
    BackslashIdent(String),

    // keywords
    Record,
    Method,
    Const,
    Var,
    If,
    Else,
    While,
    Return,
    New,
    True,
    False,
    Double,
    Float,
    Bool,
    Int,
    Requires,
    Ensures,
    Also,
    LoopInvariant,
    Length,

    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    Assign,
    Plus,
    Minus,
    Star,
    Slash,
    Bang,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    NotEq,
    AndAnd,
    OrOr,
    Implies,
    /// `/*@`
    SpecOpen,
    /// `@*/`
    SpecClose,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use TokenKind::*;
        match self {
            Ident(s) => write!(f, "identifier `{s}`"),
            FpNumber(s) | IntNumber(s) => write!(f, "number `{s}`"),
            BackslashIdent(s) => write!(f, "`\\{s}`"),
            Record => write!(f, "`record`"),
            Method => write!(f, "`method`"),
            Const => write!(f, "`const`"),
            Var => write!(f, "`var`"),
            If => write!(f, "`if`"),
            Else => write!(f, "`else`"),
            While => write!(f, "`while`"),
            Return => write!(f, "`return`"),
            New => write!(f, "`new`"),
            True => write!(f, "`true`"),
            False => write!(f, "`false`"),
            Double => write!(f, "`double`"),
            Float => write!(f, "`float`"),
            Bool => write!(f, "`bool`"),
            Int => write!(f, "`int`"),
            Requires => write!(f, "`requires`"),
            Ensures => write!(f, "`ensures`"),
            Also => write!(f, "`also`"),
            LoopInvariant => write!(f, "`loop_invariant`"),
            Length => write!(f, "`length`"),
            LParen => write!(f, "`(`"),
            RParen => write!(f, "`)`"),
            LBrace => write!(f, "`{{`"),
            RBrace => write!(f, "`}}`"),
            LBracket => write!(f, "`[`"),
            RBracket => write!(f, "`]`"),
            Comma => write!(f, "`,`"),
            Semi => write!(f, "`;`"),
            Colon => write!(f, "`:`"),
            Dot => write!(f, "`.`"),
            Assign => write!(f, "`=`"),
            Plus => write!(f, "`+`"),
            Minus => write!(f, "`-`"),
            Star => write!(f, "`*`"),
            Slash => write!(f, "`/`"),
            Bang => write!(f, "`!`"),
            Lt => write!(f, "`<`"),
            Le => write!(f, "`<=`"),
            Gt => write!(f, "`>`"),
            Ge => write!(f, "`>=`"),
            EqEq => write!(f, "`==`"),
            NotEq => write!(f, "`!=`"),
            AndAnd => write!(f, "`&&`"),
            OrOr => write!(f, "`||`"),
            Implies => write!(f, "`==>`"),
            SpecOpen => write!(f, "`/*@`"),
            SpecClose => write!(f, "`@*/`"),
            Eof => write!(f, "end of file"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}
