//! Test functions `f: C^n -> C` written as small expressions.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' int)?
//! atom   := number | 'i' | var | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Numbers may carry an `i` suffix (`2i`, `0.5i`); variables are `z1..zn`;
//! functions are `conj re im abs2 exp sin cos`.

mod eval;
mod parser;

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use eval::{eval, wirtinger_ad, Wirt, WirtingerPair};
pub use parser::parse;

/// Maximum nesting depth accepted by the parser.
pub const MAX_DEPTH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    Conj,
    Re,
    Im,
    Abs2,
    Exp,
    Sin,
    Cos,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "conj" => Func::Conj,
            "re" => Func::Re,
            "im" => Func::Im,
            "abs2" => Func::Abs2,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Conj => "conj",
            Func::Re => "re",
            Func::Im => "im",
            Func::Abs2 => "abs2",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    pub fn is_holomorphic(self) -> bool {
        matches!(self, Func::Exp | Func::Sin | Func::Cos)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// `z_l`, 1-based.
    Var(usize),
    Lit(Complex<f64>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Largest variable index used, 0 for constants.
    pub fn max_var(&self) -> usize {
        match self {
            Expr::Var(l) => *l,
            Expr::Lit(_) => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_var().max(b.max_var())
            }
            Expr::Pow(a, _) | Expr::Call(_, a) => a.max_var(),
        }
    }

    /// True when the expression uses none of `conj`, `re`, `im`, `abs2`.
    pub fn is_syntactically_holomorphic(&self) -> bool {
        match self {
            Expr::Var(_) | Expr::Lit(_) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_syntactically_holomorphic() && b.is_syntactically_holomorphic()
            }
            Expr::Pow(a, _) => a.is_syntactically_holomorphic(),
            Expr::Call(f, a) => f.is_holomorphic() && a.is_syntactically_holomorphic(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Var(_) | Expr::Lit(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.depth().max(b.depth())
            }
            Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.depth(),
        }
    }
}

/// The grammar has no unary minus, so negative parts are written as `0 - x`.
fn fmt_lit(c: Complex<f64>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let re = if c.re.is_sign_negative() {
        format!("0-{:?}", -c.re)
    } else {
        format!("{:?}", c.re)
    };
    match (c.re != 0.0, c.im != 0.0) {
        (_, false) if c.re.is_sign_negative() => write!(f, "({re})"),
        (_, false) => write!(f, "{re}"),
        (false, true) if c.im < 0.0 => write!(f, "(0-{:?}i)", -c.im),
        (false, true) => write!(f, "{:?}i", c.im),
        (true, true) if c.im < 0.0 => write!(f, "({re}-{:?}i)", -c.im),
        (true, true) => write!(f, "({re}+{:?}i)", c.im),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var(l) => write!(f, "z{l}"),
            Expr::Lit(c) => fmt_lit(*c, f),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, k) => match **a {
                Expr::Var(_) | Expr::Call(..) => write!(f, "{a}^{k}"),
                _ => write!(f, "({a})^{k}"),
            },
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
