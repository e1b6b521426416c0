//! Tokenizer and recursive-descent parsers for the three concrete grammars:
//! ALCQP(p,s) concepts, ALCQI concepts and relation-algebra terms. The
//! grammars are LL(1) except for the sugar letters `E`/`A`, which need one
//! extra token of lookahead to be told apart from concept names.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use thiserror::Error;

use super::ast::{BinRole, GraTerm, Grade, RoleExpr, Signature, RESERVED_PREFIX};
use super::perm::PermWord;
use super::sugar::{Quantifier, Surface};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("role {role} has arity {expected} but is used with arity {found}")]
    ArityMismatch {
        role: String,
        expected: usize,
        found: usize,
    },
    #[error("counting bound must be a positive integer (byte {pos})")]
    ZeroGrade { pos: usize },
    #[error("undeclared role {0}")]
    UndeclaredRole(String),
    #[error("role {role} has arity {arity}, roles need arity at least 2")]
    RoleArity { role: String, arity: usize },
    #[error("name {0} is reserved for generated symbols")]
    Reserved(String),
    #[error("name {0} is used both as a concept and as a role")]
    NameClash(String),
}

const KEYWORDS: [&str; 4] = ["top", "bot", "not", "and"];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(BigUint),
    Ge,
    Lt,
    Eq,
    Caret,
    Minus,
    Dot,
    Comma,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("number {n}"),
            Tok::Ge => "`>=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let bytes = src.as_bytes();
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
            b'>' if bytes.get(i + 1) == Some(&b'=') => {
                i += 2;
                Tok::Ge
            }
            b'<' => {
                i += 1;
                Tok::Lt
            }
            b'=' => {
                i += 1;
                Tok::Eq
            }
            b'^' => {
                i += 1;
                Tok::Caret
            }
            b'-' => {
                i += 1;
                Tok::Minus
            }
            b'.' => {
                i += 1;
                Tok::Dot
            }
            b',' => {
                i += 1;
                Tok::Comma
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                Tok::Num(src[start..i].parse().expect("digits parse"))
            }
            b'@' | b'A'..=b'Z' | b'a'..=b'z' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Tok::Ident(src[start..i].to_string())
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(SyntaxError::Syntax {
                    pos: start,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    allow_reserved: bool,
}

impl Parser {
    fn new(src: &str, allow_reserved: bool) -> Result<Self, SyntaxError> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            allow_reserved,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError::Syntax {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", tok.describe(), self.peek().describe()))
        }
    }

    fn finish(&mut self) -> Result<(), SyntaxError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {}", self.peek().describe()))
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    /// A user-level name: not a keyword, and not reserved unless allowed.
    fn name(&mut self) -> Result<String, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                self.error(format!("keyword `{s}` cannot be used as a name"))
            }
            Tok::Ident(s) => {
                if s.starts_with(RESERVED_PREFIX) && !self.allow_reserved {
                    return Err(SyntaxError::Reserved(s));
                }
                self.bump();
                Ok(s)
            }
            other => self.error(format!("expected a name, found {}", other.describe())),
        }
    }

    fn grade(&mut self) -> Result<Grade, SyntaxError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(n) => {
                let g = Grade::from_biguint(n);
                if g.is_zero() {
                    Err(SyntaxError::ZeroGrade { pos: at })
                } else {
                    Ok(g)
                }
            }
            other => Err(SyntaxError::Syntax {
                pos: at,
                msg: format!("expected a number, found {}", other.describe()),
            }),
        }
    }

    /// `E R` / `A R` where the letter is sugar rather than a concept name.
    fn at_quantifier_letter(&self) -> bool {
        match (self.peek(), self.peek_at(1)) {
            (Tok::Ident(q), Tok::Ident(next)) => (q == "E" || q == "A") && !KEYWORDS.contains(&next.as_str()),
            _ => false,
        }
    }

    fn quantifier(&mut self) -> Result<Option<Quantifier>, SyntaxError> {
        let q = match self.peek() {
            Tok::Ge => {
                self.bump();
                Quantifier::AtLeast(self.grade()?)
            }
            Tok::Lt => {
                self.bump();
                Quantifier::Less(self.grade()?)
            }
            Tok::Eq => {
                self.bump();
                Quantifier::Exactly(self.grade()?)
            }
            Tok::Ident(_) if self.at_quantifier_letter() => {
                let Tok::Ident(letter) = self.bump() else {
                    unreachable!()
                };
                if letter == "E" {
                    Quantifier::Exists
                } else {
                    Quantifier::Forall
                }
            }
            _ => return Ok(None),
        };
        Ok(Some(q))
    }

    fn concept<R>(
        &mut self,
        restr: &mut impl FnMut(&mut Parser, Quantifier) -> Result<Surface<R>, SyntaxError>,
    ) -> Result<Surface<R>, SyntaxError> {
        let mut acc = self.unary(restr)?;
        while self.is_keyword("and") {
            self.bump();
            let rhs = self.unary(restr)?;
            acc = Surface::And(Box::new(acc), Box::new(rhs));
        }
        Ok(acc)
    }

    fn unary<R>(
        &mut self,
        restr: &mut impl FnMut(&mut Parser, Quantifier) -> Result<Surface<R>, SyntaxError>,
    ) -> Result<Surface<R>, SyntaxError> {
        if let Some(q) = self.quantifier()? {
            return restr(self, q);
        }
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.concept(restr)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(s) if s == "not" => {
                self.bump();
                Ok(Surface::Not(Box::new(self.unary(restr)?)))
            }
            Tok::Ident(s) if s == "top" => {
                self.bump();
                Ok(Surface::Top)
            }
            Tok::Ident(s) if s == "bot" => {
                self.bump();
                Ok(Surface::Bot)
            }
            Tok::Ident(_) => Ok(Surface::Atomic(self.name()?)),
            other => self.error(format!("expected a concept, found {}", other.describe())),
        }
    }
}

/// Raw ALCQP role occurrence before arity resolution.
struct RawRole {
    name: String,
    word: PermWord,
}

fn alcqp_role(p: &mut Parser) -> Result<RawRole, SyntaxError> {
    let name = p.name()?;
    let mut word = PermWord::empty();
    if *p.peek() == Tok::Caret {
        p.bump();
        let at = p.offset();
        match p.bump() {
            Tok::Ident(letters) => match PermWord::parse(&letters) {
                Some(w) => word = w,
                None => {
                    return Err(SyntaxError::Syntax {
                        pos: at,
                        msg: format!("permutation word `{letters}` may only contain p and s"),
                    })
                }
            },
            other => {
                return Err(SyntaxError::Syntax {
                    pos: at,
                    msg: format!("expected a permutation word, found {}", other.describe()),
                })
            }
        }
    }
    Ok(RawRole { name, word })
}

fn arg_list<R>(
    p: &mut Parser,
    restr: &mut impl FnMut(&mut Parser, Quantifier) -> Result<Surface<R>, SyntaxError>,
) -> Result<Vec<Surface<R>>, SyntaxError> {
    p.expect(Tok::Dot)?;
    p.expect(Tok::LParen)?;
    let mut args = vec![p.concept(restr)?];
    while *p.peek() == Tok::Comma {
        p.bump();
        args.push(p.concept(restr)?);
    }
    p.expect(Tok::RParen)?;
    Ok(args)
}

/// How role arities are determined while parsing ALCQP concepts.
enum Arities<'s> {
    Declared(&'s Signature),
    Inferred(BTreeMap<String, usize>),
}

impl Arities<'_> {
    fn resolve(&mut self, raw: RawRole, used: usize) -> Result<RoleExpr, SyntaxError> {
        let arity = match self {
            Arities::Declared(sig) => sig
                .role_arity(&raw.name)
                .ok_or_else(|| SyntaxError::UndeclaredRole(raw.name.clone()))?,
            Arities::Inferred(map) => *map.entry(raw.name.clone()).or_insert(used),
        };
        if arity < 2 {
            return Err(SyntaxError::RoleArity { role: raw.name, arity });
        }
        if arity != used {
            return Err(SyntaxError::ArityMismatch {
                role: raw.name,
                expected: arity,
                found: used,
            });
        }
        Ok(RoleExpr::new(raw.name, arity, raw.word))
    }
}

fn parse_surface_with(text: &str, arities: &mut Arities<'_>) -> Result<Surface<RoleExpr>, SyntaxError> {
    let mut p = Parser::new(text, false)?;
    let mut restr = |p: &mut Parser, q: Quantifier| {
        let raw = alcqp_role(p)?;
        restriction_tail(p, q, raw, arities)
    };
    let c = p.concept(&mut restr)?;
    p.finish()?;
    Ok(c)
}

fn restriction_tail(
    p: &mut Parser,
    q: Quantifier,
    raw: RawRole,
    arities: &mut Arities<'_>,
) -> Result<Surface<RoleExpr>, SyntaxError> {
    let mut inner = |p: &mut Parser, q: Quantifier| {
        let raw = alcqp_role(p)?;
        restriction_tail(p, q, raw, arities)
    };
    let args = arg_list(p, &mut inner)?;
    let role = arities.resolve(raw, args.len() + 1)?;
    Ok(Surface::Restrict { quant: q, role, args })
}

fn check_name_clash(c: &Surface<RoleExpr>, sig: &Signature) -> Result<(), SyntaxError> {
    let mut err = None;
    c.visit(&mut |s| {
        if let Surface::Atomic(n) = s {
            if sig.role_arity(n).is_some() && err.is_none() {
                err = Some(SyntaxError::NameClash(n.clone()));
            }
        }
    });
    err.map_or(Ok(()), Err)
}

/// Parses a possibly sugared ALCQP(p,s) concept against declared role
/// arities.
pub fn parse_surface(text: &str, sig: &Signature) -> Result<Surface<RoleExpr>, SyntaxError> {
    let c = parse_surface_with(text, &mut Arities::Declared(sig))?;
    check_name_clash(&c, sig)?;
    Ok(c)
}

/// Parses a possibly sugared ALCQP(p,s) concept, inferring each role's arity
/// from its first use and rejecting inconsistent later uses.
pub fn parse_surface_infer(text: &str) -> Result<(Surface<RoleExpr>, Signature), SyntaxError> {
    let mut arities = Arities::Inferred(BTreeMap::new());
    let c = parse_surface_with(text, &mut arities)?;
    let Arities::Inferred(map) = arities else {
        unreachable!()
    };
    let mut sig = Signature::new();
    for (r, a) in map {
        sig.add_role(r, a);
    }
    check_name_clash(&c, &sig)?;
    c.visit(&mut |s| {
        if let Surface::Atomic(n) = s {
            sig.add_concept(n.clone());
        }
    });
    Ok((c, sig))
}

fn alcqi_restriction(p: &mut Parser, q: Quantifier) -> Result<Surface<BinRole>, SyntaxError> {
    let name = p.name()?;
    let mut inverse = false;
    if *p.peek() == Tok::Caret {
        p.bump();
        p.expect(Tok::Minus)?;
        inverse = true;
    }
    p.expect(Tok::Dot)?;
    let filler = p.unary(&mut alcqi_restriction)?;
    Ok(Surface::Restrict {
        quant: q,
        role: BinRole { name, inverse },
        args: vec![filler],
    })
}

/// Parses a possibly sugared ALCQI concept. Generated `@` names are
/// accepted here, since this is the target language of reification.
pub fn parse_alcqi_surface(text: &str) -> Result<Surface<BinRole>, SyntaxError> {
    let mut p = Parser::new(text, true)?;
    let c = p.concept(&mut alcqi_restriction)?;
    p.finish()?;
    Ok(c)
}

enum OpShape {
    Unary(fn(GraTerm) -> GraTerm),
    Binary(fn(GraTerm, GraTerm) -> GraTerm),
}

fn gra_operator(name: &str) -> Option<OpShape> {
    use OpShape::*;
    Some(match name {
        "p" => Unary(GraTerm::p),
        "s" => Unary(GraTerm::s),
        "I" => Unary(GraTerm::i),
        "neg" => Unary(GraTerm::neg),
        "ex" => Unary(GraTerm::ex),
        "ex1" => Unary(GraTerm::ex1),
        "neg1" => Unary(GraTerm::neg1),
        "join" => Binary(GraTerm::join),
        "dotcap" => Binary(GraTerm::dotcap),
        "cap1" => Binary(GraTerm::cap1),
        _ => return None,
    })
}

fn gra_term(p: &mut Parser) -> Result<GraTerm, SyntaxError> {
    let at = p.offset();
    match p.bump() {
        Tok::Ident(s) if s == "e" => Ok(GraTerm::Eq),
        Tok::Ident(s) => {
            if *p.peek() == Tok::LParen {
                let Some(op) = gra_operator(&s) else {
                    return Err(SyntaxError::Syntax {
                        pos: at,
                        msg: format!("unknown operator `{s}`"),
                    });
                };
                p.bump();
                let first = gra_term(p)?;
                let term = match op {
                    OpShape::Unary(f) => f(first),
                    OpShape::Binary(f) => {
                        p.expect(Tok::Comma)?;
                        let second = gra_term(p)?;
                        f(first, second)
                    }
                };
                p.expect(Tok::RParen)?;
                Ok(term)
            } else {
                if s.starts_with(RESERVED_PREFIX) && !p.allow_reserved {
                    return Err(SyntaxError::Reserved(s));
                }
                Ok(GraTerm::Atom(s))
            }
        }
        other => Err(SyntaxError::Syntax {
            pos: at,
            msg: format!("expected a term, found {}", other.describe()),
        }),
    }
}

/// Parses a relation-algebra term. Atom arities are not checked here; see
/// [`crate::gra::arity_of_term`].
pub fn parse_gra(text: &str) -> Result<GraTerm, SyntaxError> {
    let mut p = Parser::new(text, true)?;
    let t = gra_term(&mut p)?;
    p.finish()?;
    Ok(t)
}
