//! Canonical printer for the untyped AST. Printing then reparsing then
//! printing again is a fixpoint; literal spellings survive verbatim.

use super::ast::*;
use std::fmt::Write;

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for c in &p.consts {
        let suffix = match c.scalar {
            FpScalar::Float => "f",
            FpScalar::Double => "",
        };
        let _ = writeln!(out, "const {} = {}{};", c.name, c.value, suffix);
    }
    if !p.consts.is_empty() {
        out.push('\n');
    }
    for r in &p.records {
        let fields: Vec<String> = r
            .fields
            .iter()
            .map(|(n, s)| {
                format!(
                    "{n}: {}",
                    match s {
                        FpScalar::Double => "double",
                        FpScalar::Float => "float",
                    }
                )
            })
            .collect();
        let _ = writeln!(out, "record {} {{ {} }}", r.name, fields.join(", "));
    }
    if !p.records.is_empty() {
        out.push('\n');
    }
    for m in &p.methods {
        print_method(&mut out, m);
        out.push('\n');
    }
    out
}

fn print_method(out: &mut String, m: &MethodDecl) {
    if !m.contracts.is_empty() {
        let _ = writeln!(out, "/*@");
        for (i, c) in m.contracts.iter().enumerate() {
            if i > 0 {
                let _ = writeln!(out, "  @ also");
            }
            let _ = writeln!(out, "  @ requires {};", print_expr(&c.requires));
            let _ = writeln!(out, "  @ ensures {};", print_expr(&c.ensures));
        }
        let _ = writeln!(out, "  @*/");
    }
    let params: Vec<String> = m
        .params
        .iter()
        .map(|p| format!("{}: {}", p.name, p.ty))
        .collect();
    let _ = writeln!(
        out,
        "method {}({}): {} {{",
        m.name,
        params.join(", "),
        m.return_type
    );
    for s in &m.body {
        print_stmt(out, s, 1);
    }
    let _ = writeln!(out, "}}");
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn print_stmt(out: &mut String, s: &Stmt, level: usize) {
    match s {
        Stmt::VarDecl { name, ty, init, .. } => {
            indent(out, level);
            let _ = writeln!(out, "var {name}: {ty} = {};", print_expr(init));
        }
        Stmt::Assign { name, value, .. } => {
            indent(out, level);
            let _ = writeln!(out, "{name} = {};", print_expr(value));
        }
        Stmt::If {
            cond,
            then_branch,
            else_branch,
            ..
        } => {
            indent(out, level);
            let _ = writeln!(out, "if ({}) {{", print_expr(cond));
            for t in then_branch {
                print_stmt(out, t, level + 1);
            }
            indent(out, level);
            if else_branch.is_empty() {
                let _ = writeln!(out, "}}");
            } else {
                let _ = writeln!(out, "}} else {{");
                for t in else_branch {
                    print_stmt(out, t, level + 1);
                }
                indent(out, level);
                let _ = writeln!(out, "}}");
            }
        }
        Stmt::While {
            cond,
            invariant,
            body,
            ..
        } => {
            if let Some(inv) = invariant {
                indent(out, level);
                let _ = writeln!(out, "/*@ loop_invariant {}; @*/", print_expr(inv));
            }
            indent(out, level);
            let _ = writeln!(out, "while ({}) {{", print_expr(cond));
            for t in body {
                print_stmt(out, t, level + 1);
            }
            indent(out, level);
            let _ = writeln!(out, "}}");
        }
        Stmt::Return { value, .. } => {
            indent(out, level);
            let _ = writeln!(out, "return {};", print_expr(value));
        }
    }
}

/// Fully parenthesized expression printing: associativity-safe and still a
/// parse fixpoint.
pub fn print_expr(e: &Expr) -> String {
    match e {
        Expr::FpLit { text, .. } => text.clone(),
        Expr::IntLit { text, .. } => text.clone(),
        Expr::BoolLit { value, .. } => value.to_string(),
        Expr::Var { name, .. } => name.clone(),
        Expr::Field { base, field, .. } => format!("{}.{field}", print_postfix_base(base)),
        Expr::Length { base, .. } => format!("{}.length", print_postfix_base(base)),
        Expr::Index { base, index, .. } => {
            format!("{}[{}]", print_postfix_base(base), print_expr(index))
        }
        Expr::Unary { op, operand, .. } => {
            let sym = match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
            };
            format!("{sym}{}", print_unary_operand(operand))
        }
        Expr::Binary { op, lhs, rhs, .. } => format!(
            "({} {} {})",
            print_expr(lhs),
            op.symbol(),
            print_expr(rhs)
        ),
        Expr::Call { name, args, .. } => format!("{name}({})", print_args(args)),
        Expr::NewRecord { name, args, .. } => format!("new {name}({})", print_args(args)),
        Expr::NewArray { elems, .. } => format!("new double[] {{ {} }}", print_args(elems)),
        Expr::Result { .. } => "\\result".to_string(),
        Expr::Forall {
            var, range, body, ..
        } => format!(
            "(\\forall int {var}; {}; {})",
            print_expr(range),
            print_expr(body)
        ),
    }
}

fn print_args(args: &[Expr]) -> String {
    args.iter().map(print_expr).collect::<Vec<_>>().join(", ")
}

fn print_postfix_base(e: &Expr) -> String {
    match e {
        Expr::Var { .. }
        | Expr::Field { .. }
        | Expr::Index { .. }
        | Expr::Call { .. }
        | Expr::Result { .. }
        | Expr::Length { .. } => print_expr(e),
        other => format!("({})", print_expr(other)),
    }
}

fn print_unary_operand(e: &Expr) -> String {
    match e {
        Expr::FpLit { .. }
        | Expr::IntLit { .. }
        | Expr::BoolLit { .. }
        | Expr::Var { .. }
        | Expr::Field { .. }
        | Expr::Index { .. }
        | Expr::Call { .. }
        | Expr::Result { .. }
        | Expr::Length { .. }
        | Expr::Binary { .. } => print_expr(e),
        other => format!("({})", print_expr(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minif::parser::parse_program;

    #[test]
    fn print_parse_print_is_a_fixpoint() {
        let src = r#"const PI = 3.141592653589793;
record Complex { re: double, im: double }
/*@ requires fp_nice(a.re) && fp_nice(a.im); ensures !fp_nan(\result.re); @*/
method add(a: Complex, b: Complex): Complex {
  var r: double = a.re + b.re;
  if (r < 0.0) { r = -r; }
  return new Complex(r, a.im + b.im);
}
method loopy(x0: double): double {
  var x: double = x0;
  var i: int = 0;
  /*@ loop_invariant 0.0 <= x; @*/
  while (i < 10) { x = x * 0.5; i = i + 1; }
  return x;
}"#;
        let p1 = parse_program(src).unwrap();
        let printed1 = print_program(&p1);
        let p2 = parse_program(&printed1).unwrap();
        let printed2 = print_program(&p2);
        assert_eq!(printed1, printed2);
    }

    #[test]
    fn literal_spelling_survives() {
        let src = "const C = 6.123233995736766E-17;\nmethod f(): double { return C; }";
        let p = parse_program(src).unwrap();
        assert!(print_program(&p).contains("6.123233995736766E-17"));
    }
}
