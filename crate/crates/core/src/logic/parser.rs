use std::fmt;

use thiserror::Error;

use super::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    And,
    Or,
    Not,
    Arrow,
    Eq,
    Neq,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Not => f.write_str("`!`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '#'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '#' || c == '\''
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let single = |t: Tok| Some((t, 1));
        let tok = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            ',' => single(Tok::Comma),
            '.' => single(Tok::Dot),
            '&' => single(Tok::And),
            '|' => single(Tok::Or),
            '=' => single(Tok::Eq),
            '!' if chars.get(i + 1) == Some(&'=') => Some((Tok::Neq, 2)),
            '!' => single(Tok::Not),
            '-' if chars.get(i + 1) == Some(&'>') => Some((Tok::Arrow, 2)),
            c if is_ident_start(c) => {
                let start = i;
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                Some((Tok::Ident(word), j - start))
            }
            _ => None,
        };
        let Some((tok, len)) = tok else {
            return Err(ParseError {
                line,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        };
        out.push((tok, tl, tc));
        i += len;
        col += len;
    }
    out.push((Tok::End, line, col));
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["exists", "forall", "true", "false", "ite"];

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (_, line, column) = self.toks[self.pos];
        Err(ParseError {
            line,
            column,
            message: message.into(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {t}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.next();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Or {
            self.next();
            parts.push(self.conjunction()?);
        }
        Ok(Formula::or(parts))
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::And {
            self.next();
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.next();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(q) if q == "exists" || q == "forall" => {
                self.next();
                let mut vars = vec![self.ident()?];
                while matches!(self.peek(), Tok::Ident(_)) {
                    vars.push(self.ident()?);
                }
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
                Ok(if q == "exists" {
                    Formula::exists(&refs, body)
                } else {
                    Formula::forall(&refs, body)
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(w) if w == "true" || w == "false" => {
                self.next();
                Ok(Formula::Bool(w == "true"))
            }
            Tok::Ident(w) if w == "ite" => {
                let t = self.term()?;
                self.equation(t)
            }
            Tok::Ident(_) => {
                if *self.peek_at(1) == Tok::LBrace {
                    let r = self.ident()?;
                    self.next();
                    let a = self.term()?;
                    self.expect(Tok::Comma)?;
                    let b = self.term()?;
                    self.expect(Tok::RBrace)?;
                    return Ok(Formula::Or(vec![
                        Formula::Rel(r.clone(), vec![a.clone(), b.clone()]),
                        Formula::Rel(r, vec![b, a]),
                    ]));
                }
                let t = self.term()?;
                if matches!(self.peek(), Tok::Eq | Tok::Neq) {
                    return self.equation(t);
                }
                match t {
                    Term::Var(r) => Ok(Formula::Rel(r, vec![])),
                    Term::App(r, args) => Ok(Formula::Rel(r, args)),
                    _ => unreachable!("term() only yields variables or applications here"),
                }
            }
            other => self.error(format!("expected formula, found {other}")),
        }
    }

    fn equation(&mut self, lhs: Term) -> Result<Formula, ParseError> {
        match self.next() {
            Tok::Eq => Ok(Formula::Eq(lhs, self.term()?)),
            Tok::Neq => Ok(Formula::neq(lhs, self.term()?)),
            _ => {
                self.pos -= 1;
                self.error(format!("expected `=` or `!=`, found {}", self.peek()))
            }
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        if let Tok::Ident(w) = self.peek().clone() {
            if w == "ite" {
                self.next();
                self.expect(Tok::LParen)?;
                let c = self.formula()?;
                self.expect(Tok::Comma)?;
                let a = self.term()?;
                self.expect(Tok::Comma)?;
                let b = self.term()?;
                self.expect(Tok::RParen)?;
                return Ok(Term::ite(c, a, b));
            }
        }
        let name = self.ident()?;
        if *self.peek() != Tok::LParen {
            return Ok(Term::Var(name));
        }
        self.next();
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.next();
                args.push(self.term()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Term::App(name, args))
    }
}

fn parse_all<T>(
    src: &str,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
    };
    let out = f(&mut p)?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", p.peek()));
    }
    Ok(out)
}

pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    parse_all(src, Parser::formula)
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    parse_all(src, Parser::term)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn precedence_and_associativity() {
        let f = parse_formula("A | B & C -> D -> E").unwrap();
        let a = |n: &str| Formula::Rel(n.into(), vec![]);
        let expected = Formula::implies(
            Formula::Or(vec![a("A"), Formula::And(vec![a("B"), a("C")])]),
            Formula::implies(a("D"), a("E")),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn symmetric_sugar_expands_to_both_orientations() {
        let f = parse_formula("E{u,y}").unwrap();
        assert_eq!(
            f,
            Formula::Or(vec![
                Formula::rel("E", vec![v("u"), v("y")]),
                Formula::rel("E", vec![v("y"), v("u")]),
            ])
        );
    }

    #[test]
    fn terms_with_ite_and_hash_names() {
        let t = parse_term("ite(!E(u,v) & x = u, Succ(#edges(x)), #edges(x))").unwrap();
        let Term::Ite(c, a, b) = t else { panic!() };
        assert!(c.is_quantifier_free());
        assert_eq!(a.to_string(), "Succ(#edges(x))");
        assert_eq!(b.to_string(), "#edges(x)");
    }

    #[test]
    fn quantifier_body_extends_right() {
        let f = parse_formula("exists x y. E(x,y) & x != y").unwrap();
        assert_eq!(f.to_string(), "(exists x y. (E(x,y) & x != y))");
    }

    #[test]
    fn equations_between_function_terms() {
        let f = parse_formula("f(x) = c & Q").unwrap();
        assert_eq!(
            f,
            Formula::And(vec![
                Formula::Eq(Term::app("f", vec![v("x")]), v("c")),
                Formula::Rel("Q".into(), vec![]),
            ])
        );
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_formula("E(x,y) &\n  & F").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        let err = parse_formula("exists . E(x)").unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));
        assert!(parse_formula("E(x,y) $").is_err());
        assert!(parse_formula("(E(x,y)").is_err());
    }

    #[test]
    fn comments_are_skipped() {
        let f = parse_formula("// three nodes\nE(x,y) // edge\n").unwrap();
        assert_eq!(f, Formula::rel("E", vec![v("x"), v("y")]));
    }
}
