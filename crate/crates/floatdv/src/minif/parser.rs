//! Recursive descent parser for MiniF.

use super::ast::*;
use super::lexer::{lex, LexError};
use super::token::{Pos, Token, TokenKind};

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("{pos}: expected {expected}, found {found}")]
    Unexpected {
        expected: String,
        found: TokenKind,
        pos: Pos,
    },
    #[error("{pos}: duplicate declaration of `{name}`")]
    Duplicate { name: String, pos: Pos },
    #[error("{pos}: array length must be >= 1")]
    BadArrayLength { pos: Pos },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Lex(e) => e.pos(),
            ParseError::Unexpected { pos, .. }
            | ParseError::Duplicate { pos, .. }
            | ParseError::BadArrayLength { pos } => *pos,
        }
    }
}

/// Parse a full program. Errors carry line/column positions.
pub fn parse_program(source: &str) -> Result<Program, Vec<ParseError>> {
    let tokens = lex(source).map_err(|e| vec![ParseError::Lex(e)])?;
    let mut p = Parser { tokens, pos: 0 };
    match p.program() {
        Ok(prog) => Ok(prog),
        Err(e) => Err(vec![e]),
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos.min(self.tokens.len() - 1)].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<Token> {
        if *self.peek_kind() == kind {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Unexpected {
            expected: expected.to_string(),
            found: self.peek().kind.clone(),
            pos: self.peek().pos,
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                let pos = self.bump().pos;
                Ok((name, pos))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut prog = Program {
            records: Vec::new(),
            consts: Vec::new(),
            methods: Vec::new(),
        };
        let mut pending_contracts: Vec<Contract> = Vec::new();
        loop {
            match self.peek_kind() {
                TokenKind::Eof => break,
                TokenKind::Record => {
                    let r = self.record_decl()?;
                    if prog.records.iter().any(|x| x.name == r.name) {
                        return Err(ParseError::Duplicate {
                            name: r.name,
                            pos: r.pos,
                        });
                    }
                    prog.records.push(r);
                }
                TokenKind::Const => {
                    let c = self.const_decl()?;
                    if prog.consts.iter().any(|x| x.name == c.name) {
                        return Err(ParseError::Duplicate {
                            name: c.name,
                            pos: c.pos,
                        });
                    }
                    prog.consts.push(c);
                }
                TokenKind::SpecOpen => {
                    pending_contracts = self.contract_comment()?;
                }
                TokenKind::Method => {
                    let mut m = self.method_decl()?;
                    m.contracts = std::mem::take(&mut pending_contracts);
                    for (i, c) in m.contracts.iter_mut().enumerate() {
                        c.label = format!("{}#{}", m.name, i + 1);
                    }
                    if prog.methods.iter().any(|x| x.name == m.name) {
                        return Err(ParseError::Duplicate {
                            name: m.name,
                            pos: m.pos,
                        });
                    }
                    prog.methods.push(m);
                }
                _ => return Err(self.unexpected("`record`, `const`, `method`, or a contract")),
            }
        }
        Ok(prog)
    }

    fn record_decl(&mut self) -> PResult<RecordDecl> {
        let pos = self.expect(TokenKind::Record, "`record`")?.pos;
        let (name, _) = self.ident("record name")?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut fields = Vec::new();
        loop {
            if *self.peek_kind() == TokenKind::RBrace {
                break;
            }
            let (fname, fpos) = self.ident("field name")?;
            self.expect(TokenKind::Colon, "`:`")?;
            let scalar = match self.peek_kind() {
                TokenKind::Double => {
                    self.bump();
                    FpScalar::Double
                }
                TokenKind::Float => {
                    self.bump();
                    FpScalar::Float
                }
                _ => return Err(self.unexpected("`double` or `float`")),
            };
            if fields.iter().any(|(n, _)| *n == fname) {
                return Err(ParseError::Duplicate {
                    name: fname,
                    pos: fpos,
                });
            }
            fields.push((fname, scalar));
            if *self.peek_kind() == TokenKind::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(TokenKind::RBrace, "`}`")?;
        Ok(RecordDecl { name, fields, pos })
    }

    fn const_decl(&mut self) -> PResult<ConstDecl> {
        let pos = self.expect(TokenKind::Const, "`const`")?.pos;
        let (name, _) = self.ident("constant name")?;
        self.expect(TokenKind::Assign, "`=`")?;
        let mut text = String::new();
        if *self.peek_kind() == TokenKind::Minus {
            self.bump();
            text.push('-');
        }
        let (lit, scalar) = match self.peek_kind().clone() {
            TokenKind::FpNumber(t) => {
                self.bump();
                if let Some(stripped) = t.strip_suffix('f') {
                    (stripped.to_string(), FpScalar::Float)
                } else {
                    (t, FpScalar::Double)
                }
            }
            _ => return Err(self.unexpected("floating-point literal")),
        };
        text.push_str(&lit);
        self.expect(TokenKind::Semi, "`;`")?;
        Ok(ConstDecl {
            name,
            value: text,
            scalar,
            pos,
        })
    }

    /// `/*@ requires E; ensures E; [also requires E; ensures E;]* @*/`
    fn contract_comment(&mut self) -> PResult<Vec<Contract>> {
        self.expect(TokenKind::SpecOpen, "`/*@`")?;
        let mut out = Vec::new();
        loop {
            let pos = self.peek().pos;
            self.expect(TokenKind::Requires, "`requires`")?;
            let requires = self.expr()?;
            self.expect(TokenKind::Semi, "`;`")?;
            self.expect(TokenKind::Ensures, "`ensures`")?;
            let ensures = self.expr()?;
            self.expect(TokenKind::Semi, "`;`")?;
            out.push(Contract {
                label: String::new(),
                requires,
                ensures,
                pos,
            });
            if *self.peek_kind() == TokenKind::Also {
                self.bump();
                continue;
            }
            break;
        }
        self.expect(TokenKind::SpecClose, "`@*/`")?;
        Ok(out)
    }

    /// `/*@ loop_invariant E; @*/`
    fn invariant_comment(&mut self) -> PResult<Expr> {
        self.expect(TokenKind::SpecOpen, "`/*@`")?;
        self.expect(TokenKind::LoopInvariant, "`loop_invariant`")?;
        let inv = self.expr()?;
        self.expect(TokenKind::Semi, "`;`")?;
        self.expect(TokenKind::SpecClose, "`@*/`")?;
        Ok(inv)
    }

    fn method_decl(&mut self) -> PResult<MethodDecl> {
        let pos = self.expect(TokenKind::Method, "`method`")?.pos;
        let (name, _) = self.ident("method name")?;
        self.expect(TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if *self.peek_kind() != TokenKind::RParen {
            loop {
                let (pname, ppos) = self.ident("parameter name")?;
                self.expect(TokenKind::Colon, "`:`")?;
                let ty = self.type_ref()?;
                if params.iter().any(|p: &Param| p.name == pname) {
                    return Err(ParseError::Duplicate {
                        name: pname,
                        pos: ppos,
                    });
                }
                params.push(Param {
                    name: pname,
                    ty,
                    pos: ppos,
                });
                if *self.peek_kind() == TokenKind::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        self.expect(TokenKind::Colon, "`:`")?;
        let return_type = self.type_ref()?;
        let body = self.block()?;
        Ok(MethodDecl {
            name,
            params,
            return_type,
            contracts: Vec::new(),
            body,
            pos,
        })
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        match self.peek_kind().clone() {
            TokenKind::Double => {
                self.bump();
                if *self.peek_kind() == TokenKind::LBracket {
                    self.bump();
                    let len = match self.peek_kind().clone() {
                        TokenKind::IntNumber(t) => {
                            let pos = self.bump().pos;
                            let n: usize = t
                                .parse()
                                .map_err(|_| ParseError::BadArrayLength { pos })?;
                            if n == 0 {
                                return Err(ParseError::BadArrayLength { pos });
                            }
                            n
                        }
                        _ => return Err(self.unexpected("array length")),
                    };
                    self.expect(TokenKind::RBracket, "`]`")?;
                    Ok(TypeRef::Array(len))
                } else {
                    Ok(TypeRef::Double)
                }
            }
            TokenKind::Float => {
                self.bump();
                Ok(TypeRef::Float)
            }
            TokenKind::Bool => {
                self.bump();
                Ok(TypeRef::Bool)
            }
            TokenKind::Int => {
                self.bump();
                Ok(TypeRef::Int)
            }
            TokenKind::Ident(name) => {
                self.bump();
                Ok(TypeRef::Record(name))
            }
            _ => Err(self.unexpected("a type")),
        }
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut stmts = Vec::new();
        while *self.peek_kind() != TokenKind::RBrace {
            stmts.push(self.stmt()?);
        }
        self.expect(TokenKind::RBrace, "`}`")?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek_kind().clone() {
            TokenKind::Var => {
                let pos = self.bump().pos;
                let (name, _) = self.ident("variable name")?;
                self.expect(TokenKind::Colon, "`:`")?;
                let ty = self.type_ref()?;
                self.expect(TokenKind::Assign, "`=`")?;
                let init = self.expr()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Stmt::VarDecl {
                    name,
                    ty,
                    init,
                    pos,
                })
            }
            TokenKind::If => {
                let pos = self.bump().pos;
                self.expect(TokenKind::LParen, "`(`")?;
                let cond = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                let then_branch = self.block()?;
                let else_branch = if *self.peek_kind() == TokenKind::Else {
                    self.bump();
                    self.block()?
                } else {
                    Vec::new()
                };
                Ok(Stmt::If {
                    cond,
                    then_branch,
                    else_branch,
                    pos,
                })
            }
            TokenKind::SpecOpen => {
                let invariant = self.invariant_comment()?;
                let pos = self.peek().pos;
                self.expect(TokenKind::While, "`while` after loop invariant")?;
                self.while_tail(Some(invariant), pos)
            }
            TokenKind::While => {
                let pos = self.bump().pos;
                self.while_tail(None, pos)
            }
            TokenKind::Return => {
                let pos = self.bump().pos;
                let value = self.expr()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Stmt::Return { value, pos })
            }
            TokenKind::Ident(name) => {
                let pos = self.bump().pos;
                self.expect(TokenKind::Assign, "`=`")?;
                let value = self.expr()?;
                self.expect(TokenKind::Semi, "`;`")?;
                Ok(Stmt::Assign { name, value, pos })
            }
            _ => Err(self.unexpected("a statement")),
        }
    }

    fn while_tail(&mut self, invariant: Option<Expr>, pos: Pos) -> PResult<Stmt> {
        self.expect(TokenKind::LParen, "`(`")?;
        let cond = self.expr()?;
        self.expect(TokenKind::RParen, "`)`")?;
        let body = self.block()?;
        Ok(Stmt::While {
            cond,
            invariant,
            body,
            pos,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.implication()
    }

    // ==> is right-associative and binds loosest.
    fn implication(&mut self) -> PResult<Expr> {
        let lhs = self.or_expr()?;
        if *self.peek_kind() == TokenKind::Implies {
            let pos = self.bump().pos;
            let rhs = self.implication()?;
            Ok(Expr::Binary {
                op: BinOp::Implies,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            })
        } else {
            Ok(lhs)
        }
    }

    fn or_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and_expr()?;
        while *self.peek_kind() == TokenKind::OrOr {
            let pos = self.bump().pos;
            let rhs = self.and_expr()?;
            lhs = Expr::Binary {
                op: BinOp::Or,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.eq_expr()?;
        while *self.peek_kind() == TokenKind::AndAnd {
            let pos = self.bump().pos;
            let rhs = self.eq_expr()?;
            lhs = Expr::Binary {
                op: BinOp::And,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
        Ok(lhs)
    }

    fn eq_expr(&mut self) -> PResult<Expr> {
        let lhs = self.rel_expr()?;
        let op = match self.peek_kind() {
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::Ne,
            _ => return Ok(lhs),
        };
        let pos = self.bump().pos;
        let rhs = self.rel_expr()?;
        Ok(Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            pos,
        })
    }

    fn rel_expr(&mut self) -> PResult<Expr> {
        let lhs = self.add_expr()?;
        let op = match self.peek_kind() {
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            _ => return Ok(lhs),
        };
        let pos = self.bump().pos;
        let rhs = self.add_expr()?;
        Ok(Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            pos,
        })
    }

    fn add_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => break,
            };
            let pos = self.bump().pos;
            let rhs = self.mul_expr()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
        Ok(lhs)
    }

    fn mul_expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::Slash => BinOp::Div,
                _ => break,
            };
            let pos = self.bump().pos;
            let rhs = self.unary()?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        match self.peek_kind() {
            TokenKind::Minus => {
                let pos = self.bump().pos;
                let operand = self.unary()?;
                Ok(Expr::Unary {
                    op: UnOp::Neg,
                    operand: Box::new(operand),
                    pos,
                })
            }
            TokenKind::Bang => {
                let pos = self.bump().pos;
                let operand = self.unary()?;
                Ok(Expr::Unary {
                    op: UnOp::Not,
                    operand: Box::new(operand),
                    pos,
                })
            }
            _ => self.postfix(),
        }
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            match self.peek_kind() {
                TokenKind::Dot => {
                    let pos = self.bump().pos;
                    match self.peek_kind().clone() {
                        TokenKind::Length => {
                            self.bump();
                            e = Expr::Length {
                                base: Box::new(e),
                                pos,
                            };
                        }
                        TokenKind::Ident(field) => {
                            self.bump();
                            e = Expr::Field {
                                base: Box::new(e),
                                field,
                                pos,
                            };
                        }
                        _ => return Err(self.unexpected("field name")),
                    }
                }
                TokenKind::LBracket => {
                    let pos = self.bump().pos;
                    let index = self.expr()?;
                    self.expect(TokenKind::RBracket, "`]`")?;
                    e = Expr::Index {
                        base: Box::new(e),
                        index: Box::new(index),
                        pos,
                    };
                }
                _ => break,
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let pos = self.peek().pos;
        match self.peek_kind().clone() {
            TokenKind::FpNumber(text) => {
                self.bump();
                Ok(Expr::FpLit { text, pos })
            }
            TokenKind::IntNumber(text) => {
                self.bump();
                Ok(Expr::IntLit { text, pos })
            }
            TokenKind::True => {
                self.bump();
                Ok(Expr::BoolLit { value: true, pos })
            }
            TokenKind::False => {
                self.bump();
                Ok(Expr::BoolLit { value: false, pos })
            }
            TokenKind::BackslashIdent(name) => {
                self.bump();
                match name.as_str() {
                    "result" => Ok(Expr::Result { pos }),
                    other => Err(ParseError::Unexpected {
                        expected: "`\\result`".to_string(),
                        found: TokenKind::BackslashIdent(other.to_string()),
                        pos,
                    }),
                }
            }
            TokenKind::New => {
                self.bump();
                match self.peek_kind().clone() {
                    TokenKind::Ident(name) => {
                        self.bump();
                        self.expect(TokenKind::LParen, "`(`")?;
                        let args = self.args(TokenKind::RParen)?;
                        self.expect(TokenKind::RParen, "`)`")?;
                        Ok(Expr::NewRecord { name, args, pos })
                    }
                    TokenKind::Double => {
                        self.bump();
                        self.expect(TokenKind::LBracket, "`[`")?;
                        self.expect(TokenKind::RBracket, "`]`")?;
                        self.expect(TokenKind::LBrace, "`{`")?;
                        let elems = self.args(TokenKind::RBrace)?;
                        self.expect(TokenKind::RBrace, "`}`")?;
                        Ok(Expr::NewArray { elems, pos })
                    }
                    _ => Err(self.unexpected("record name or `double[]`")),
                }
            }
            TokenKind::LParen => {
                self.bump();
                if let TokenKind::BackslashIdent(name) = self.peek_kind().clone() {
                    if name == "forall" {
                        self.bump();
                        self.expect(TokenKind::Int, "`int`")?;
                        let (var, _) = self.ident("quantified variable")?;
                        self.expect(TokenKind::Semi, "`;`")?;
                        let range = self.expr()?;
                        self.expect(TokenKind::Semi, "`;`")?;
                        let body = self.expr()?;
                        self.expect(TokenKind::RParen, "`)`")?;
                        return Ok(Expr::Forall {
                            var,
                            range: Box::new(range),
                            body: Box::new(body),
                            pos,
                        });
                    }
                }
                let e = self.expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(e)
            }
            TokenKind::Ident(name) => {
                self.bump();
                if *self.peek_kind() == TokenKind::LParen {
                    self.bump();
                    let args = self.args(TokenKind::RParen)?;
                    self.expect(TokenKind::RParen, "`)`")?;
                    Ok(Expr::Call { name, args, pos })
                } else {
                    Ok(Expr::Var { name, pos })
                }
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn args(&mut self, terminator: TokenKind) -> PResult<Vec<Expr>> {
        let mut out = Vec::new();
        if *self.peek_kind() == terminator {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if *self.peek_kind() == TokenKind::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program_parses() {
        let src = r#"/*@ requires true; ensures !fp_nan(\result); @*/
method f(x: double): double { return x + 1.0; }"#;
        let p = parse_program(src).unwrap();
        assert_eq!(p.methods.len(), 1);
        assert_eq!(p.methods[0].contracts.len(), 1);
        assert_eq!(p.methods[0].contracts[0].label, "f#1");
    }

    #[test]
    fn malformed_input_reports_position() {
        let errs = parse_program("method f({").unwrap_err();
        assert!(!errs.is_empty());
        assert!(errs[0].pos().line >= 1);
    }

    #[test]
    fn duplicate_method_is_rejected() {
        let src = "method f(): double { return 1.0; } method f(): double { return 2.0; }";
        let errs = parse_program(src).unwrap_err();
        assert!(matches!(errs[0], ParseError::Duplicate { .. }));
    }

    #[test]
    fn two_contracts_via_also() {
        let src = r#"/*@ requires true; ensures true; also requires false; ensures false; @*/
method g(): double { return 1.0; }"#;
        let p = parse_program(src).unwrap();
        assert_eq!(p.methods[0].contracts.len(), 2);
    }

    #[test]
    fn loop_invariant_attaches_to_while() {
        let src = r#"method h(): double {
  var x: double = 1.0;
  var i: int = 0;
  /*@ loop_invariant 1.0 <= x; @*/
  while (i < 10) { x = x + 1.0; i = i + 1; }
  return x;
}"#;
        let p = parse_program(src).unwrap();
        let has_inv = p.methods[0].body.iter().any(|s| {
            matches!(
                s,
                Stmt::While {
                    invariant: Some(_),
                    ..
                }
            )
        });
        assert!(has_inv);
    }

    #[test]
    fn forall_spec_expression_parses() {
        let src = r#"/*@ requires (\forall int i; 0 <= i && i < vec.length; vec[i] > 1.0); ensures true; @*/
method r(vec: double[2]): double { return vec[0]; }"#;
        let p = parse_program(src).unwrap();
        assert!(matches!(
            p.methods[0].contracts[0].requires,
            Expr::Forall { .. }
        ));
    }
}
