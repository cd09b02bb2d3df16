//! Expressions in `x` and `y` for user-supplied test functions.
//!
//! Grammar, loosest to tightest binding:
//!
//! ```text
//! expr  := term  (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'x' | 'y' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func  := sin | cos | tan | exp | log | sqrt | abs
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-x^2 = −(x²)` and `2^3^2 = 512`.

mod parser;

use std::fmt;

use thiserror::Error;

pub use parser::{parse, parse_univariate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }
}

/// Abstract syntax tree. Every call node carries exactly one argument.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("malformed number {0:?}")]
    BadNumber(String),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("function {name} takes exactly one argument, got {got}")]
    Arity { name: String, got: usize },
    #[error("variable y is not allowed in a univariate expression")]
    UnexpectedY,
    #[error("expression nested too deeply")]
    TooDeep,
}

/// A syntax error together with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("expression mentions y but no value for y was supplied")]
pub struct MissingVariable;

impl Expr {
    /// Evaluates with IEEE semantics; non-finite intermediate values propagate.
    pub fn eval(&self, x: f64, y: Option<f64>) -> Result<f64, MissingVariable> {
        match y {
            Some(y) => Ok(self.eval_xy(x, y)),
            None if self.mentions_y() => Err(MissingVariable),
            None => Ok(self.eval_xy(x, 0.0)),
        }
    }

    /// Evaluation with both variables bound.
    pub fn eval_xy(&self, x: f64, y: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::X) => x,
            Expr::Var(Var::Y) => y,
            Expr::Neg(e) => -e.eval_xy(x, y),
            Expr::Binary(op, l, r) => {
                let a = l.eval_xy(x, y);
                let b = r.eval_xy(x, y);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => f.apply(e.eval_xy(x, y)),
        }
    }

    pub fn mentions_y(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(Var::X) => false,
            Expr::Var(Var::Y) => true,
            Expr::Neg(e) | Expr::Call(_, e) => e.mentions_y(),
            Expr::Binary(_, l, r) => l.mentions_y() || r.mentions_y(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(v) if v.is_sign_negative() => 3,
            Expr::Binary(BinOp::Pow, ..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "(")?;
            self.fmt_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Y) => write!(f, "y"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.fmt_at(f, 3)
            }
            Expr::Call(func, e) => {
                write!(f, "{}(", func.name())?;
                e.fmt_at(f, 0)?;
                write!(f, ")")
            }
            Expr::Binary(op, l, r) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => ("+", 1, 2),
                    BinOp::Sub => ("-", 1, 2),
                    BinOp::Mul => ("*", 2, 3),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 3),
                };
                l.fmt_at(f, lp)?;
                write!(f, "{sym}")?;
                r.fmt_at(f, rp)
            }
        }
    }
}

/// Pretty-prints with the minimum parentheses needed to re-parse to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ev(src: &str, x: f64, y: Option<f64>) -> f64 {
        parse(src).unwrap().eval(x, y).unwrap()
    }

    #[test]
    fn worked_example_functions() {
        let f = parse("exp(-x)*sin(x*y)^2").unwrap();
        assert_relative_eq!(
            f.eval(1.0, Some(1.0)).unwrap(),
            0.260_485_653_422_834_3,
            max_relative = 1e-15
        );
        let g = parse("x^4*y^2 - 2*x^2*y^3 + x*y^2").unwrap();
        let (x, y) = (0.3_f64, 0.7_f64);
        let want = x.powi(4) * y * y - 2.0 * x * x * y.powi(3) + x * y * y;
        assert_relative_eq!(g.eval(x, Some(y)).unwrap(), want, max_relative = 1e-15);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("2^3^2", 0.0, None), 512.0);
        assert_eq!(ev("-x^2", 3.0, None), -9.0);
        assert_eq!(ev("(-x)^2", 3.0, None), 9.0);
        assert_eq!(ev("2^-1", 0.0, None), 0.5);
        assert_eq!(ev("1-2-3", 0.0, None), -4.0);
        assert_eq!(ev("8/4/2", 0.0, None), 1.0);
        assert_eq!(ev("2*3+4*5", 0.0, None), 26.0);
        assert_eq!(ev(" 1 +\t2 * x ", 2.0, None), 5.0);
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(ev("y^2*cos(x)", 0.0, Some(1.0)), 1.0);
        assert_eq!(ev("x", 0.37, None), 0.37);
        assert_relative_eq!(ev("sin(pi*x)", 0.5, None), 1.0, max_relative = 1e-15);
        assert_relative_eq!(ev("log(e)", 0.0, None), 1.0, max_relative = 1e-15);
        assert_eq!(ev("sqrt(abs(x))", -4.0, None), 2.0);
        assert_eq!(ev("(-2)^3", 0.0, None), -8.0);
        assert!(ev("log(x)", -1.0, None).is_nan());
        assert!(ev("1/x", 0.0, None).is_infinite());
    }

    #[test]
    fn missing_y_binding() {
        let e = parse("x*y").unwrap();
        assert_eq!(e.eval(1.0, None), Err(MissingVariable));
        assert_eq!(e.eval(2.0, Some(3.0)), Ok(6.0));
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let err = parse("1 + * 2").unwrap_err();
        assert_eq!(err.offset, 4);
        let err = parse("sin(x) + foo").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("foo".into()));
        assert_eq!(err.offset, 9);
        let err = parse("sin(x, y)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { got: 2, .. }));
        let err = parse("cos()").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { got: 0, .. }));
        assert_eq!(parse("   ").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(parse("(x").unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert!(matches!(
            parse("x # 1").unwrap_err().kind,
            ParseErrorKind::UnexpectedChar('#')
        ));
        assert!(matches!(
            parse("1e+").unwrap_err().kind,
            ParseErrorKind::BadNumber(_)
        ));
        assert_eq!(
            parse(&"(".repeat(10_000)).unwrap_err().kind,
            ParseErrorKind::TooDeep
        );
    }

    #[test]
    fn univariate_context_rejects_y() {
        assert!(parse_univariate("x^2+1").is_ok());
        let err = parse_univariate("x + y").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedY);
        assert_eq!(err.offset, 4);
    }

    #[test]
    fn pretty_print_examples() {
        let cases = [
            ("exp(-x)*sin(x*y)^2", "exp(-x)*sin(x*y)^2.0"),
            ("(x^2)^3", "(x^2.0)^3.0"),
            ("x^2^3", "x^2.0^3.0"),
            ("-(x+1)", "-(x+1.0)"),
            ("x-(y-1)", "x-(y-1.0)"),
            ("x*-y", "x*-y"),
        ];
        for (src, want) in cases {
            assert_eq!(parse(src).unwrap().to_string(), want);
        }
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..1e6).prop_map(Expr::Num),
            (0u32..100).prop_map(|v| Expr::Num(f64::from(v))),
            Just(Expr::Var(Var::X)),
            Just(Expr::Var(Var::Y)),
        ];
        leaf.prop_recursive(6, 64, 2, |inner| {
            let op = prop_oneof![
                Just(BinOp::Add),
                Just(BinOp::Sub),
                Just(BinOp::Mul),
                Just(BinOp::Div),
                Just(BinOp::Pow),
            ];
            let func = (0usize..Func::ALL.len()).prop_map(|i| Func::ALL[i]);
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (func, inner.clone()).prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
                (op, inner.clone(), inner)
                    .prop_map(|(op, l, r)| Expr::Binary(op, Box::new(l), Box::new(r))),
            ]
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn print_parse_print_is_fixed_point(e in arb_expr()) {
            let printed = e.to_string();
            let reparsed = parse(&printed).unwrap();
            prop_assert_eq!(&reparsed, &e);
            prop_assert_eq!(reparsed.to_string(), printed);
        }
    }

    proptest! {
        #[test]
        fn parser_never_panics_on_text(s in ".{0,64}") {
            let _ = parse(&s);
        }

        #[test]
        fn parser_never_panics_on_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
            let _ = parse(&String::from_utf8_lossy(&bytes));
        }

        #[test]
        fn parser_never_panics_on_token_soup(
            toks in proptest::collection::vec(
                prop_oneof![
                    Just("x"), Just("y"), Just("("), Just(")"), Just("+"), Just("-"),
                    Just("*"), Just("/"), Just("^"), Just("sin"), Just(","), Just("1.5e"),
                    Just("2"), Just(" "), Just("pi"),
                ],
                0..40,
            )
        ) {
            let _ = parse(&toks.concat());
        }

        #[test]
        fn multiplication_binds_tighter(a in 0.0f64..100.0, b in 0.0f64..100.0, c in 0.0f64..100.0) {
            let src = format!("{a:?}+{b:?}*{c:?}");
            let got = parse(&src).unwrap().eval(0.0, None).unwrap();
            prop_assert_eq!(got, a + b * c);
        }
    }
}
