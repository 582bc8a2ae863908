//! Recursive-descent parser and evaluator for bivariate symbol expressions.
//!
//! Grammar: real literals, variables `l1` and `l2`, binary `+ - * / ^`
//! (with `^` right-associative and binding tightest), unary minus, parentheses,
//! and the functions `sin cos exp abs sqrt min max pow`. Arithmetic is real;
//! `pow` (and `^`) with a negative base and non-integer exponent is an
//! evaluation error rather than a complex promotion.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Ast {
    Num(f64),
    Var(Var),
    Neg(Box<Ast>),
    Bin(BinOp, Box<Ast>, Box<Ast>),
    Call(Func, Vec<Ast>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sqrt,
    Min,
    Max,
    Pow,
}

impl Func {
    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max | Func::Pow => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Min => "min",
            Func::Max => "max",
            Func::Pow => "pow",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize)>> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let start = self.pos;
            let c = self.src[self.pos];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.pos += 1;
                }
                b'+' => {
                    out.push((Tok::Plus, start));
                    self.pos += 1;
                }
                b'-' => {
                    out.push((Tok::Minus, start));
                    self.pos += 1;
                }
                b'*' => {
                    out.push((Tok::Star, start));
                    self.pos += 1;
                }
                b'/' => {
                    out.push((Tok::Slash, start));
                    self.pos += 1;
                }
                b'^' => {
                    out.push((Tok::Caret, start));
                    self.pos += 1;
                }
                b'(' => {
                    out.push((Tok::LParen, start));
                    self.pos += 1;
                }
                b')' => {
                    out.push((Tok::RParen, start));
                    self.pos += 1;
                }
                b',' => {
                    out.push((Tok::Comma, start));
                    self.pos += 1;
                }
                b'0'..=b'9' | b'.' => {
                    let mut end = self.pos;
                    let mut seen_e = false;
                    while end < self.src.len() {
                        let d = self.src[end];
                        let is_num = d.is_ascii_digit() || d == b'.';
                        let is_exp = (d == b'e' || d == b'E') && !seen_e;
                        let is_exp_sign = (d == b'+' || d == b'-')
                            && end > self.pos
                            && matches!(self.src[end - 1], b'e' | b'E')
                            && seen_e;
                        if is_exp {
                            seen_e = true;
                            end += 1;
                        } else if is_num || is_exp_sign {
                            end += 1;
                        } else {
                            break;
                        }
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    let v: f64 = text.parse().map_err(|_| Error::Parse {
                        pos: start,
                        msg: format!("invalid number literal `{text}`"),
                    })?;
                    out.push((Tok::Num(v), start));
                    self.pos = end;
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let mut end = self.pos;
                    while end < self.src.len()
                        && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
                    {
                        end += 1;
                    }
                    let text = std::str::from_utf8(&self.src[self.pos..end]).unwrap();
                    out.push((Tok::Ident(text.to_string()), start));
                    self.pos = end;
                }
                other => {
                    return Err(Error::Parse {
                        pos: start,
                        msg: format!("unexpected character `{}`", other as char),
                    })
                }
            }
        }
        Ok(out)
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end_pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks
            .get(self.idx)
            .map(|&(_, p)| p)
            .unwrap_or(self.end_pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.idx).map(|(t, _)| t.clone());
        self.idx += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let pos = self.pos();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected {what}"),
            }),
        }
    }

    // additive := multiplicative (("+" | "-") multiplicative)*
    fn additive(&mut self) -> Result<Ast> {
        let mut lhs = self.multiplicative()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.multiplicative()?;
                    lhs = Ast::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.multiplicative()?;
                    lhs = Ast::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn multiplicative(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Ast::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Ast::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary minus binds looser than "^": -l1^2 == -(l1^2)
    fn unary(&mut self) -> Result<Ast> {
        if let Some(Tok::Minus) = self.peek() {
            self.bump();
            let inner = self.unary()?;
            return Ok(Ast::Neg(Box::new(inner)));
        }
        self.power()
    }

    // power := atom ("^" unary)?   (right-associative)
    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let exp = self.unary()?;
            return Ok(Ast::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Ast::Num(v)),
            Some(Tok::LParen) => {
                let inner = self.additive()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let func = match name.as_str() {
                    "l1" => return Ok(Ast::Var(Var::L1)),
                    "l2" => return Ok(Ast::Var(Var::L2)),
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "abs" => Func::Abs,
                    "sqrt" => Func::Sqrt,
                    "min" => Func::Min,
                    "max" => Func::Max,
                    "pow" => Func::Pow,
                    _ => return Err(Error::UnknownIdentifier(name)),
                };
                self.expect(Tok::LParen, "`(` after function name")?;
                let mut args = vec![self.additive()?];
                while let Some(Tok::Comma) = self.peek() {
                    self.bump();
                    args.push(self.additive()?);
                }
                self.expect(Tok::RParen, "`)`")?;
                if args.len() != func.arity() {
                    return Err(Error::Arity {
                        name: func.name().to_string(),
                        expected: func.arity(),
                        got: args.len(),
                    });
                }
                Ok(Ast::Call(func, args))
            }
            _ => Err(Error::Parse {
                pos,
                msg: "expected a number, variable, function call or `(`".into(),
            }),
        }
    }
}

pub fn parse(expr: &str) -> Result<Ast> {
    let toks = Lexer::new(expr).tokens()?;
    let mut p = Parser {
        toks,
        idx: 0,
        end_pos: expr.len(),
    };
    let ast = p.additive()?;
    if p.idx != p.toks.len() {
        return Err(Error::Parse {
            pos: p.pos(),
            msg: "unexpected trailing input".into(),
        });
    }
    Ok(ast)
}

fn real_pow(base: f64, exp: f64) -> std::result::Result<f64, String> {
    if base < 0.0 && exp.fract() != 0.0 {
        return Err(format!(
            "negative base {base} raised to non-integer exponent {exp}"
        ));
    }
    if base < 0.0 {
        // exact integer exponent: keep the sign logic of powi
        let e = exp as i64;
        let mag = (-base).powf(exp);
        return Ok(if e % 2 == 0 { mag } else { -mag });
    }
    Ok(base.powf(exp))
}

/// Evaluate the AST at `(l1, l2)` in real arithmetic.
pub fn eval(ast: &Ast, l1: f64, l2: f64) -> std::result::Result<f64, String> {
    match ast {
        Ast::Num(v) => Ok(*v),
        Ast::Var(Var::L1) => Ok(l1),
        Ast::Var(Var::L2) => Ok(l2),
        Ast::Neg(e) => Ok(-eval(e, l1, l2)?),
        Ast::Bin(op, a, b) => {
            let x = eval(a, l1, l2)?;
            let y = eval(b, l1, l2)?;
            match op {
                BinOp::Add => Ok(x + y),
                BinOp::Sub => Ok(x - y),
                BinOp::Mul => Ok(x * y),
                BinOp::Div => Ok(x / y),
                BinOp::Pow => real_pow(x, y),
            }
        }
        Ast::Call(f, args) => {
            let x = eval(&args[0], l1, l2)?;
            match f {
                Func::Sin => Ok(x.sin()),
                Func::Cos => Ok(x.cos()),
                Func::Exp => Ok(x.exp()),
                Func::Abs => Ok(x.abs()),
                Func::Sqrt => {
                    if x < 0.0 {
                        Err(format!("sqrt of negative value {x}"))
                    } else {
                        Ok(x.sqrt())
                    }
                }
                Func::Min => Ok(x.min(eval(&args[1], l1, l2)?)),
                Func::Max => Ok(x.max(eval(&args[1], l1, l2)?)),
                Func::Pow => real_pow(x, eval(&args[1], l1, l2)?),
            }
        }
    }
}
