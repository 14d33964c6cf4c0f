//! Counterexample model parsing: a small tolerant s-expression reader
//! that normalizes z3/cvc5 `get-model` output (and their different FP
//! constant spellings) to bit-level assignments.

use crate::formula::FpLiteral;
use crate::smt::parse_fp_literal;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelValue {
    Fp(FpLiteral),
    Int(i64),
    Bool(bool),
}

/// Assignments to the declared constants; non-nullary definitions (e.g.
/// uninterpreted function graphs) are kept as raw text for inspection.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Model {
    pub assignments: BTreeMap<String, ModelValue>,
    pub functions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    fn render(&self) -> String {
        match self {
            Sexp::Atom(a) => a.clone(),
            Sexp::List(items) => {
                let inner: Vec<String> = items.iter().map(|s| s.render()).collect();
                format!("({})", inner.join(" "))
            }
        }
    }
}

fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => out.push("(".to_string()),
            ')' => out.push(")".to_string()),
            '|' => {
                let mut sym = String::new();
                for c in chars.by_ref() {
                    if c == '|' {
                        break;
                    }
                    sym.push(c);
                }
                out.push(sym);
            }
            '"' => {
                let mut s = String::new();
                for c in chars.by_ref() {
                    if c == '"' {
                        break;
                    }
                    s.push(c);
                }
                out.push(format!("\"{s}\""));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {}
            c => {
                let mut atom = String::new();
                atom.push(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' || n == ';' {
                        break;
                    }
                    atom.push(n);
                    chars.next();
                }
                out.push(atom);
            }
        }
    }
    out
}

fn parse_sexps(text: &str) -> Vec<Sexp> {
    let tokens = tokenize(text);
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in tokens {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let done = stack.pop().unwrap_or_default();
                match stack.last_mut() {
                    Some(top) => top.push(Sexp::List(done)),
                    None => stack.push(vec![Sexp::List(done)]),
                }
            }
            _ => {
                if let Some(top) = stack.last_mut() {
                    top.push(Sexp::Atom(t));
                }
            }
        }
    }
    stack.pop().unwrap_or_default()
}

/// Extract a model from solver output following a `sat` line. Returns
/// `None` when no define-fun items can be found.
pub fn parse_model(text: &str) -> Option<Model> {
    let sexps = parse_sexps(text);
    let mut model = Model::default();
    for s in &sexps {
        collect_define_funs(s, &mut model);
    }
    if model.assignments.is_empty() && model.functions.is_empty() {
        None
    } else {
        Some(model)
    }
}

fn collect_define_funs(s: &Sexp, model: &mut Model) {
    let Sexp::List(items) = s else {
        return;
    };
    // `(model (define-fun ...) ...)` or a bare list of define-funs.
    if let Some(Sexp::Atom(head)) = items.first() {
        if head == "define-fun" {
            parse_define_fun(items, model);
            return;
        }
    }
    for item in items {
        collect_define_funs(item, model);
    }
}

fn parse_define_fun(items: &[Sexp], model: &mut Model) {
    // (define-fun NAME (args...) SORT VALUE)
    if items.len() < 5 {
        return;
    }
    let Sexp::Atom(name) = &items[1] else {
        return;
    };
    let Sexp::List(args) = &items[2] else {
        return;
    };
    let value = &items[4];
    if !args.is_empty() {
        model
            .functions
            .insert(name.clone(), value.render());
        return;
    }
    if let Some(v) = parse_value(value) {
        model.assignments.insert(name.clone(), v);
    } else {
        model.functions.insert(name.clone(), value.render());
    }
}

fn parse_value(s: &Sexp) -> Option<ModelValue> {
    match s {
        Sexp::Atom(a) => match a.as_str() {
            "true" => Some(ModelValue::Bool(true)),
            "false" => Some(ModelValue::Bool(false)),
            other => other.parse::<i64>().ok().map(ModelValue::Int),
        },
        Sexp::List(items) => {
            // negative integers: (- 5)
            if items.len() == 2 {
                if let (Sexp::Atom(op), Sexp::Atom(v)) = (&items[0], &items[1]) {
                    if op == "-" {
                        if let Ok(n) = v.parse::<i64>() {
                            return Some(ModelValue::Int(-n));
                        }
                    }
                }
            }
            parse_fp_literal(&s.render()).map(ModelValue::Fp)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::FpFormat;

    #[test]
    fn parses_cvc5_style_models() {
        let text = r#"sat
(
(define-fun a () (_ FloatingPoint 11 53) (fp #b1 #b11111111110 #b1111111111111111111111111111111111111111111111100000))
(define-fun i () Int 3)
(define-fun b () Bool true)
)
"#;
        let m = parse_model(text).unwrap();
        assert_eq!(m.assignments.len(), 3);
        assert!(matches!(m.assignments["a"], ModelValue::Fp(_)));
        assert_eq!(m.assignments["i"], ModelValue::Int(3));
        assert_eq!(m.assignments["b"], ModelValue::Bool(true));
    }

    #[test]
    fn parses_z3_style_models_with_hex() {
        let text = r#"sat
(
  (define-fun x () Float64
    (_ NaN 11 53))
  (define-fun y () Float64
    (fp #b0 #b11111111110 #xfffffffffff8d))
)
"#;
        let m = parse_model(text).unwrap();
        let ModelValue::Fp(x) = &m.assignments["x"] else {
            panic!()
        };
        assert!(x.is_nan());
        assert_eq!(x.format(), FpFormat::Float64);
        let ModelValue::Fp(y) = &m.assignments["y"] else {
            panic!()
        };
        assert_eq!(y.significand(), 0xfffffffffff8d);
    }

    #[test]
    fn quoted_symbols_lose_their_pipes() {
        let text = "( (define-fun |vec[0]| () Float64 (_ +zero 11 53)) )";
        let m = parse_model(text).unwrap();
        assert!(m.assignments.contains_key("vec[0]"));
    }

    #[test]
    fn function_graphs_are_kept_raw() {
        let text = "( (define-fun sinDouble ((a Float64)) Float64 (_ +zero 11 53)) )";
        let m = parse_model(text).unwrap();
        assert!(m.functions.contains_key("sinDouble"));
        assert!(m.assignments.is_empty());
    }

    #[test]
    fn garbage_yields_none() {
        assert!(parse_model("unsat\n(error \"no model\")").is_none());
    }
}
