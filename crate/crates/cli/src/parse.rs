//! Recursive descent over the token stream, producing a raw tree whose
//! identifiers are still unresolved strings. Name resolution happens in
//! `model`, where declarations are known.

use crate::lex::{tokenize, Diag, Tok, Token};

#[derive(Debug, Clone, PartialEq)]
pub struct Spanned<T> {
    pub node: T,
    pub line: usize,
    pub col: usize,
}

pub type Name = Spanned<String>;

#[derive(Debug, Clone, PartialEq)]
pub enum RawExpr {
    Int(i64),
    /// Identifier with attached primes: `u`, `u_xx`, `f''`.
    Name { text: Name, primes: usize },
    /// `D[head, dir, dir, ...]`.
    Deriv { head: Name, dirs: Vec<Name> },
    Neg(Box<RawExpr>),
    Add(Box<RawExpr>, Box<RawExpr>),
    Sub(Box<RawExpr>, Box<RawExpr>),
    Mul(Box<RawExpr>, Box<RawExpr>),
    Div(Box<RawExpr>, Box<RawExpr>),
    Pow(Box<RawExpr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawItem {
    Independents(Vec<Name>),
    Dependents(Vec<Name>),
    /// (name, argument list) pairs from one `arbitrary` statement.
    Arbitrary(Vec<(Name, Vec<Name>)>),
    Equation { name: Name, lhs: RawExpr, rhs: RawExpr, lead: Option<RawExpr> },
    Constraint { name: Name, lhs: RawExpr, rhs: RawExpr, lead: Option<RawExpr> },
    Symmetry { name: Name, assigns: Vec<RawAssign> },
    Substitution { name: Name, assigns: Vec<RawAssign> },
    Option { name: Name, value: RawValue },
}

/// `xi[t] = e`, `eta[u] = e`, or `v[u] = e`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawAssign {
    pub slot: Name,
    pub target: Name,
    pub value: RawExpr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Int(i64),
    Float(f64, String),
}

pub fn parse_model_text(text: &str) -> Result<Vec<RawItem>, Diag> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens: &tokens, pos: 0 };
    let mut items = Vec::new();
    loop {
        p.skip_newlines();
        if p.at(&Tok::Eof) {
            return Ok(items);
        }
        items.push(p.item()?);
    }
}

/// Parse a standalone expression (the `--expr` flag).
pub fn parse_expr_text(text: &str) -> Result<RawExpr, Diag> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens: &tokens, pos: 0 };
    p.skip_newlines();
    let e = p.expr()?;
    p.skip_newlines();
    let t = p.peek();
    if t.tok != Tok::Eof {
        return Err(Diag::syntax(t.line, t.col, format!("expected end of input, found '{}'", t.tok)));
    }
    Ok(e)
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

impl<'t> Parser<'t> {
    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn at(&self, t: &Tok) -> bool {
        &self.peek().tok == t
    }

    fn advance(&mut self) -> &'t Token {
        let t = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn skip_newlines(&mut self) {
        while self.at(&Tok::Newline) {
            self.advance();
        }
    }

    fn expect(&mut self, want: &Tok, expected: &str) -> Result<&'t Token, Diag> {
        let t = self.peek();
        if &t.tok == want {
            Ok(self.advance())
        } else {
            Err(Diag::syntax(t.line, t.col, format!("expected {expected}, found '{}'", t.tok)))
        }
    }

    fn end_statement(&mut self) -> Result<(), Diag> {
        let t = self.peek();
        match t.tok {
            Tok::Newline => {
                self.advance();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(Diag::syntax(
                t.line,
                t.col,
                format!("expected end of statement, found '{}'", t.tok),
            )),
        }
    }

    /// A plain identifier; primes are not allowed outside expressions.
    fn ident(&mut self, what: &str) -> Result<Name, Diag> {
        let t = self.peek();
        match &t.tok {
            Tok::Ident { name, primes: 0 } => {
                self.advance();
                Ok(Spanned { node: name.clone(), line: t.line, col: t.col })
            }
            other => Err(Diag::syntax(t.line, t.col, format!("expected {what}, found '{other}'"))),
        }
    }

    fn item(&mut self) -> Result<RawItem, Diag> {
        let t = self.peek();
        let kw = match &t.tok {
            Tok::Ident { name, primes: 0 } => name.as_str(),
            other => {
                return Err(Diag::syntax(
                    t.line,
                    t.col,
                    format!(
                        "expected one of 'independents', 'dependents', 'arbitrary', \
                         'equation', 'constraint', 'symmetry', 'substitution', 'option', \
                         found '{other}'"
                    ),
                ))
            }
        };
        match kw {
            "independents" => {
                self.advance();
                let names = self.ident_list()?;
                self.end_statement()?;
                Ok(RawItem::Independents(names))
            }
            "dependents" => {
                self.advance();
                let names = self.ident_list()?;
                self.end_statement()?;
                Ok(RawItem::Dependents(names))
            }
            "arbitrary" => {
                self.advance();
                let mut decls = Vec::new();
                loop {
                    let name = self.ident("a function name")?;
                    self.expect(&Tok::LParen, "'('")?;
                    let mut args = vec![self.ident("an argument name")?];
                    while self.at(&Tok::Comma) {
                        self.advance();
                        args.push(self.ident("an argument name")?);
                    }
                    self.expect(&Tok::RParen, "')'")?;
                    decls.push((name, args));
                    if self.at(&Tok::Comma) {
                        self.advance();
                    } else {
                        break;
                    }
                }
                self.end_statement()?;
                Ok(RawItem::Arbitrary(decls))
            }
            "equation" | "constraint" => {
                let is_constraint = kw == "constraint";
                self.advance();
                let name = self.ident("an equation name")?;
                self.expect(&Tok::Colon, "':'")?;
                let lhs = self.expr()?;
                self.expect(&Tok::Assign, "'='")?;
                let rhs = self.expr()?;
                let lead = if matches!(&self.peek().tok, Tok::Ident { name, primes: 0 } if name == "lead")
                {
                    self.advance();
                    Some(self.atom()?)
                } else {
                    None
                };
                self.end_statement()?;
                if is_constraint {
                    Ok(RawItem::Constraint { name, lhs, rhs, lead })
                } else {
                    Ok(RawItem::Equation { name, lhs, rhs, lead })
                }
            }
            "symmetry" | "substitution" => {
                let is_symmetry = kw == "symmetry";
                self.advance();
                let name = self.ident("a block name")?;
                self.expect(&Tok::LBrace, "'{'")?;
                let mut assigns = Vec::new();
                while !self.at(&Tok::RBrace) {
                    let slot = self.ident(if is_symmetry {
                        "'xi' or 'eta'"
                    } else {
                        "'v'"
                    })?;
                    let ok = if is_symmetry {
                        slot.node == "xi" || slot.node == "eta"
                    } else {
                        slot.node == "v"
                    };
                    if !ok {
                        return Err(Diag::syntax(
                            slot.line,
                            slot.col,
                            format!(
                                "expected {}, found '{}'",
                                if is_symmetry { "'xi' or 'eta'" } else { "'v'" },
                                slot.node
                            ),
                        ));
                    }
                    self.expect(&Tok::LBracket, "'['")?;
                    let target = self.ident("a variable name")?;
                    self.expect(&Tok::RBracket, "']'")?;
                    self.expect(&Tok::Assign, "'='")?;
                    let value = self.expr()?;
                    self.expect(&Tok::Semi, "';'")?;
                    assigns.push(RawAssign { slot, target, value });
                }
                self.expect(&Tok::RBrace, "'}'")?;
                self.end_statement()?;
                if is_symmetry {
                    Ok(RawItem::Symmetry { name, assigns })
                } else {
                    Ok(RawItem::Substitution { name, assigns })
                }
            }
            "option" => {
                self.advance();
                let name = self.ident("an option name")?;
                self.expect(&Tok::Assign, "'='")?;
                let t = self.peek();
                let value = match &t.tok {
                    Tok::Int(n) => {
                        let v = RawValue::Int(*n);
                        self.advance();
                        v
                    }
                    Tok::Float(v, raw) => {
                        let v = RawValue::Float(*v, raw.clone());
                        self.advance();
                        v
                    }
                    other => {
                        return Err(Diag::syntax(
                            t.line,
                            t.col,
                            format!("expected a number, found '{other}'"),
                        ))
                    }
                };
                self.end_statement()?;
                Ok(RawItem::Option { name, value })
            }
            other => Err(Diag::syntax(
                t.line,
                t.col,
                format!(
                    "expected one of 'independents', 'dependents', 'arbitrary', 'equation', \
                     'constraint', 'symmetry', 'substitution', 'option', found '{other}'"
                ),
            )),
        }
    }

    fn ident_list(&mut self) -> Result<Vec<Name>, Diag> {
        let mut names = vec![self.ident("a name")?];
        while matches!(&self.peek().tok, Tok::Ident { primes: 0, .. }) {
            names.push(self.ident("a name")?);
        }
        Ok(names)
    }

    fn expr(&mut self) -> Result<RawExpr, Diag> {
        let mut e = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.advance();
                    e = RawExpr::Add(Box::new(e), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.advance();
                    e = RawExpr::Sub(Box::new(e), Box::new(self.term()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn term(&mut self) -> Result<RawExpr, Diag> {
        let mut e = self.unary()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.advance();
                    e = RawExpr::Mul(Box::new(e), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.advance();
                    e = RawExpr::Div(Box::new(e), Box::new(self.unary()?));
                }
                _ => return Ok(e),
            }
        }
    }

    fn unary(&mut self) -> Result<RawExpr, Diag> {
        if self.at(&Tok::Minus) {
            self.advance();
            return Ok(RawExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<RawExpr, Diag> {
        let base = self.atom()?;
        if !self.at(&Tok::Caret) {
            return Ok(base);
        }
        self.advance();
        let k = self.exponent()?;
        Ok(RawExpr::Pow(Box::new(base), k))
    }

    /// Integer exponent, optionally signed, optionally parenthesized.
    fn exponent(&mut self) -> Result<i64, Diag> {
        let paren = self.at(&Tok::LParen);
        if paren {
            self.advance();
        }
        let neg = self.at(&Tok::Minus);
        if neg {
            self.advance();
        }
        let t = self.peek();
        let Tok::Int(n) = t.tok else {
            return Err(Diag::syntax(
                t.line,
                t.col,
                format!("expected an integer exponent, found '{}'", t.tok),
            ));
        };
        self.advance();
        if paren {
            self.expect(&Tok::RParen, "')'")?;
        }
        Ok(if neg { -n } else { n })
    }

    fn atom(&mut self) -> Result<RawExpr, Diag> {
        let t = self.peek();
        match &t.tok {
            Tok::Int(n) => {
                let n = *n;
                self.advance();
                Ok(RawExpr::Int(n))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Tok::Ident { name, primes: 0 } if name == "D" && self.next_is_lbracket() => {
                self.advance();
                self.expect(&Tok::LBracket, "'['")?;
                let head = self.ident("a variable or function name")?;
                let mut dirs = Vec::new();
                while self.at(&Tok::Comma) {
                    self.advance();
                    dirs.push(self.ident("a direction name")?);
                }
                let close = self.expect(&Tok::RBracket, "']'")?;
                if dirs.is_empty() {
                    return Err(Diag::syntax(
                        close.line,
                        close.col,
                        "D[...] needs at least one direction".to_string(),
                    ));
                }
                Ok(RawExpr::Deriv { head, dirs })
            }
            Tok::Ident { name, primes } => {
                let e = RawExpr::Name {
                    text: Spanned { node: name.clone(), line: t.line, col: t.col },
                    primes: *primes,
                };
                self.advance();
                Ok(e)
            }
            Tok::Float(_, raw) => Err(Diag::syntax(
                t.line,
                t.col,
                format!("float literal '{raw}' is only allowed as an option value"),
            )),
            other => Err(Diag::syntax(t.line, t.col, format!("expected expression, found '{other}'"))),
        }
    }

    fn next_is_lbracket(&self) -> bool {
        self.tokens.get(self.pos + 1).is_some_and(|t| t.tok == Tok::LBracket)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lex::DiagClass;

    #[test]
    fn statements_and_blocks() {
        let text = "independents t x\ndependents u\nequation F: D[u,t] - D[u,x,x] = 0\n";
        let items = parse_model_text(text).unwrap();
        assert_eq!(items.len(), 3);
        match &items[2] {
            RawItem::Equation { name, lead, .. } => {
                assert_eq!(name.node, "F");
                assert!(lead.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_left_side_is_a_syntax_error_at_the_equals() {
        let err = parse_model_text("equation F: = 0\n").unwrap_err();
        assert_eq!(err.class, DiagClass::Syntax);
        assert_eq!((err.line, err.col), (1, 13));
    }

    #[test]
    fn precedence_and_exponents() {
        let e = parse_expr_text("-u^2 + 1/2*x").unwrap();
        // -(u^2), not (-u)^2
        let RawExpr::Add(l, _) = e else { panic!("{e:?}") };
        assert!(matches!(*l, RawExpr::Neg(_)));
        assert!(parse_expr_text("u^(-2)").is_ok());
        assert!(parse_expr_text("u^x").is_err());
    }

    #[test]
    fn d_is_a_name_unless_bracketed() {
        // a variable named D is still usable on its own
        let e = parse_expr_text("D + 1").unwrap();
        assert!(matches!(e, RawExpr::Add(_, _)));
    }

    #[test]
    fn symmetry_block_assignments() {
        let text = "symmetry S {\n  xi[t] = 3*f;\n  eta[u] = -f';\n}\n";
        let items = parse_model_text(text).unwrap();
        let RawItem::Symmetry { assigns, .. } = &items[0] else { panic!() };
        assert_eq!(assigns.len(), 2);
        assert_eq!(assigns[1].slot.node, "eta");
        let bad = parse_model_text("symmetry S { zeta[t] = 1; }\n").unwrap_err();
        assert_eq!(bad.class, DiagClass::Syntax);
    }
}
