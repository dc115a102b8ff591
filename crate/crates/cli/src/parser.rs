//! Expression parser and printer for enveloping-algebra elements.
//!
//! Grammar (whitespace insignificant, juxtaposition is not multiplication):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := rational | gen ('^' uint)?
//! gen      := 'e' | 'h' | 'f' | 'p' | 'q' | 'z'
//! rational := int ('/' uint)?
//! ```
//!
//! The AST keeps terms as written — a rational coefficient times a sequence
//! of generator powers — so that `format ∘ parse` is a fixpoint up to
//! re-parsing.

use std::fmt;

use sqw_core::rat::Rat;
use sqw_core::uea::{normalize, Generator, UEAElem};

/// One parsed term: accumulated rational coefficient and the generator
/// powers in source order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rat,
    pub gens: Vec<(Generator, u32)>,
}

/// Parsed expression: a sum of terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExprAst {
    pub terms: Vec<Term>,
}

/// Parse failure with a byte offset and the tokens that would have been
/// accepted there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseError {
    Syntax { offset: usize, expected: &'static str },
    ZeroDenominator { offset: usize },
    ZeroExponent { offset: usize },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "SyntaxError",
            ParseError::ZeroDenominator { .. } => "ZeroDenominator",
            ParseError::ZeroExponent { .. } => "SyntaxError",
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::Syntax { offset, expected } => {
                write!(f, "at byte {offset}: expected {expected}")
            }
            ParseError::ZeroDenominator { offset } => {
                write!(f, "at byte {offset}: denominator must be nonzero")
            }
            ParseError::ZeroExponent { offset } => {
                write!(f, "at byte {offset}: exponent must be positive")
            }
        }
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self, expected: &'static str) -> Result<String, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::Syntax { offset: start, expected });
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string())
    }
}

enum Factor {
    Rational(Rat),
    Gen(Generator, u32),
}

fn parse_factor(cur: &mut Cursor) -> Result<Factor, ParseError> {
    match cur.peek() {
        Some(c) if c == b'-' || c.is_ascii_digit() => {
            let negative = c == b'-';
            if negative {
                cur.bump();
            }
            let int_offset = cur.pos;
            let numer = cur.digits("integer digits")?;
            let mut rat = Rat::parse_fraction(&numer).expect("digits form an integer");
            if cur.eat(b'/') {
                let den_offset = cur.pos;
                let denom = cur.digits("denominator digits")?;
                let d = Rat::parse_fraction(&denom).expect("digits form an integer");
                if d.is_zero() {
                    return Err(ParseError::ZeroDenominator { offset: den_offset });
                }
                rat = rat / d;
            }
            let _ = int_offset;
            if negative {
                rat = -rat;
            }
            Ok(Factor::Rational(rat))
        }
        Some(c) if Generator::from_letter(c as char).is_some() => {
            cur.bump();
            let g = Generator::from_letter(c as char).unwrap();
            let exp = if cur.eat(b'^') {
                let exp_offset = cur.pos;
                let digits = cur.digits("exponent digits")?;
                let e: u32 = digits.parse().map_err(|_| ParseError::Syntax {
                    offset: exp_offset,
                    expected: "exponent digits",
                })?;
                if e == 0 {
                    return Err(ParseError::ZeroExponent { offset: exp_offset });
                }
                e
            } else {
                1
            };
            Ok(Factor::Gen(g, exp))
        }
        _ => Err(ParseError::Syntax {
            offset: cur.pos,
            expected: "a rational or a generator letter (e, h, f, p, q, z)",
        }),
    }
}

fn parse_term(cur: &mut Cursor) -> Result<Term, ParseError> {
    let mut coeff = Rat::one();
    let mut gens = Vec::new();
    loop {
        match parse_factor(cur)? {
            Factor::Rational(r) => coeff = coeff * r,
            Factor::Gen(g, e) => gens.push((g, e)),
        }
        if !cur.eat(b'*') {
            break;
        }
    }
    Ok(Term { coeff, gens })
}

/// Parses an expression; the entire input must be consumed.
pub fn parse_expr(src: &str) -> Result<ExprAst, ParseError> {
    let mut cur = Cursor::new(src);
    let mut terms = vec![parse_term(&mut cur)?];
    loop {
        match cur.peek() {
            Some(b'+') => {
                cur.bump();
                terms.push(parse_term(&mut cur)?);
            }
            Some(b'-') => {
                cur.bump();
                let mut t = parse_term(&mut cur)?;
                t.coeff = -t.coeff;
                terms.push(t);
            }
            Some(_) => {
                return Err(ParseError::Syntax {
                    offset: cur.pos,
                    expected: "'+', '-', '*', or end of input",
                })
            }
            None => break,
        }
    }
    Ok(ExprAst { terms })
}

fn format_gens(gens: &[(Generator, u32)]) -> String {
    gens.iter()
        .map(|(g, e)| {
            if *e == 1 {
                g.letter().to_string()
            } else {
                format!("{}^{}", g.letter(), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl ExprAst {
    /// Renders back into the expression grammar. Leading negative
    /// coefficients stay attached to the rational so the output re-parses.
    pub fn format(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let gens = format_gens(&t.gens);
            if i == 0 {
                if t.gens.is_empty() {
                    out.push_str(&t.coeff.to_string());
                } else if t.coeff.is_one() {
                    out.push_str(&gens);
                } else {
                    out.push_str(&format!("{}*{}", t.coeff, gens));
                }
            } else {
                let mag = t.coeff.abs();
                out.push_str(if t.coeff.is_negative() { " - " } else { " + " });
                if t.gens.is_empty() {
                    out.push_str(&mag.to_string());
                } else if mag.is_one() {
                    out.push_str(&gens);
                } else {
                    out.push_str(&format!("{}*{}", mag, gens));
                }
            }
        }
        out
    }

    /// Evaluates into the enveloping algebra through the rewriting engine.
    pub fn eval(&self) -> UEAElem {
        let mut out = UEAElem::zero();
        for t in &self.terms {
            let mut word = Vec::new();
            for (g, e) in &t.gens {
                word.extend(std::iter::repeat(*g).take(*e as usize));
            }
            let n = normalize(&word, &t.coeff);
            for (m, c) in n.terms() {
                out.add_term(*m, c.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_casimir_expression() {
        let ast = parse_expr("p^2*f - q^2*e - h*p*q").unwrap();
        assert_eq!(ast.terms.len(), 3);
        assert_eq!(ast.eval(), sqw_core::uea::casimir());
    }

    #[test]
    fn parses_fractional_coefficient() {
        let ast = parse_expr("3/2*e").unwrap();
        assert_eq!(ast.terms.len(), 1);
        assert_eq!(ast.terms[0].coeff, Rat::from_pair(3, 2));
        assert_eq!(ast.terms[0].gens, vec![(Generator::E, 1)]);
    }

    #[test]
    fn dangling_caret_reports_offset() {
        match parse_expr("e^") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 2),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn zero_denominator_is_rejected() {
        assert!(matches!(
            parse_expr("1/0*e"),
            Err(ParseError::ZeroDenominator { .. })
        ));
    }

    #[test]
    fn juxtaposition_is_not_multiplication() {
        assert!(parse_expr("2e").is_err());
        assert!(parse_expr("e f").is_err());
    }

    #[test]
    fn format_parse_fixpoint_samples() {
        for src in [
            "p^2*f - q^2*e - h*p*q",
            "-1*z + 3/2*e",
            "e*e*h - 4",
            "1/3",
            "2*3*f^2",
            "q - p + z - 7/2*h",
        ] {
            let a = parse_expr(src).unwrap();
            let b = parse_expr(&a.format()).unwrap();
            assert_eq!(a, b, "fixpoint broken for {src:?} -> {:?}", a.format());
        }
    }

    #[test]
    fn normalize_display_reparses() {
        let ast = parse_expr("q*p").unwrap();
        let n = ast.eval();
        assert_eq!(n.to_string(), "p*q - z");
        let again = parse_expr(&n.to_string()).unwrap().eval();
        assert_eq!(again, n);
    }
}
