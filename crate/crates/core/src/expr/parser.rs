//! Tokenizer and recursive-descent parser.

use super::{BinOp, ExprError, Func, Mode, Node};

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
    End,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let literal = &text[start..i];
                let value: f64 = literal.parse().map_err(|_| ExprError::Syntax {
                    offset: start,
                    message: format!("malformed number `{literal}`"),
                })?;
                if !value.is_finite() {
                    return Err(ExprError::Syntax {
                        offset: start,
                        message: format!("number `{literal}` is not finite"),
                    });
                }
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

pub(super) struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
    mode: Mode,
}

impl<'a> Parser<'a> {
    pub(super) fn new(text: &str, vars: &'a [String], mode: Mode) -> Result<Self, ExprError> {
        Ok(Parser { toks: tokenize(text)?, pos: 0, vars, mode })
    }

    pub(super) fn parse(mut self) -> Result<Node, ExprError> {
        let node = self.expr()?;
        match self.peek() {
            Tok::End => Ok(node),
            tok => Err(self.unexpected(&tok.clone())),
        }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, tok: &Tok) -> ExprError {
        let message = match tok {
            Tok::End => "unexpected end of input".to_string(),
            other => format!("unexpected token {other:?}"),
        };
        ExprError::Syntax { offset: self.offset(), message }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let got = self.peek().clone();
            Err(ExprError::Syntax {
                offset: self.offset(),
                message: format!("expected {want:?}, found {got:?}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ExprError> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Node::Neg(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let save = self.pos;
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => self.identifier(name, offset),
            other => {
                self.pos = save;
                Err(self.unexpected(&other))
            }
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Node, ExprError> {
        let func = match name.as_str() {
            "ln" => Some((Some(Func::Ln), 1)),
            "exp" => Some((Some(Func::Exp), 1)),
            "sqrt" => Some((Some(Func::Sqrt), 1)),
            "pow" => Some((None, 2)),
            _ => None,
        };
        if let Some((func, expected)) = func {
            if *self.peek() != Tok::LParen {
                return Err(ExprError::Syntax {
                    offset: self.offset(),
                    message: format!("`{name}` must be followed by `(`"),
                });
            }
            self.bump();
            let mut args = vec![self.expr()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
            self.expect(Tok::RParen)?;
            if args.len() != expected {
                return Err(ExprError::Arity {
                    func: name,
                    expected,
                    found: args.len(),
                    offset,
                });
            }
            let mut args = args.into_iter();
            let first = Box::new(args.next().unwrap());
            return Ok(match func {
                Some(f) => Node::Call(f, first),
                None => Node::Binary(BinOp::Pow, first, Box::new(args.next().unwrap())),
            });
        }
        match self.vars.iter().position(|v| *v == name) {
            Some(i) => Ok(Node::Var(i)),
            None if name == "i" && self.mode == Mode::Complex => Ok(Node::ImagUnit),
            None => Err(ExprError::UnknownIdentifier { name, offset }),
        }
    }
}
