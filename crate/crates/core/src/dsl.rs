//! Text syntax for machines.
//!
//! ```text
//! expr      := term ('|' term)*
//! term      := atom ('&' atom)*
//! atom      := generator | '(' expr ')' | 'T' | 'F'
//! generator := 'z' nat | 'u' nat | 'l"' binary-word '"' | 'i(' rational ',' rational ')'
//! rational  := int '/' posint | int
//! ```
//!
//! `&` is distributed over `|`, so the result is a join of meets. No
//! absorption is applied; use [`crate::syntax::normalize`] for that. The
//! `Display` impl of [`FormalMachine`] prints this syntax back.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::syntax::{
    FormalMachine, FormalMeet, GeneratorId, Polarity, RationalInterval, SyntaxError, Word,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Mismatch(SyntaxError),
}

pub fn parse_machine(text: &str) -> Result<FormalMachine, ParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let m = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected {}", p.describe())));
    }
    Ok(m)
}

pub fn print_machine(m: &FormalMachine) -> String {
    m.to_string()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

fn mismatch(e: SyntaxError) -> ParseError {
    match e {
        SyntaxError::Incompatible(..) => ParseError::Mismatch(e),
        other => ParseError::Syntax {
            line: 0,
            column: 0,
            message: other.to_string(),
        },
    }
}

impl Parser {
    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let before = &self.chars[..pos.min(self.chars.len())];
        let line = 1 + before.iter().filter(|&&c| c == '\n').count();
        let column = 1 + before.iter().rev().take_while(|&&c| c != '\n').count();
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}', found {}", self.describe())))
        }
    }

    fn expr(&mut self) -> Result<FormalMachine, ParseError> {
        let mut branches: Vec<FormalMeet> = self.term()?.branches().iter().cloned().collect();
        while self.eat('|') {
            branches.extend(self.term()?.branches().iter().cloned());
        }
        FormalMachine::new(branches).map_err(mismatch)
    }

    fn term(&mut self) -> Result<FormalMachine, ParseError> {
        let mut acc = self.atom()?;
        while self.eat('&') {
            let rhs = self.atom()?;
            let mut branches = Vec::new();
            for a in acc.branches() {
                for b in rhs.branches() {
                    branches.push(
                        FormalMeet::new(a.iter().chain(b.iter()).cloned()).map_err(mismatch)?,
                    );
                }
            }
            acc = FormalMachine::new(branches).map_err(mismatch)?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<FormalMachine, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let m = self.expr()?;
                self.expect(')')?;
                Ok(m)
            }
            Some('T') => {
                self.pos += 1;
                Ok(FormalMachine::top())
            }
            Some('F') => {
                self.pos += 1;
                Ok(FormalMachine::bottom())
            }
            Some('z') | Some('u') => {
                let polarity = if self.peek() == Some('z') {
                    Polarity::Zero
                } else {
                    Polarity::One
                };
                self.pos += 1;
                let digits = self.digits();
                if digits.is_empty() {
                    return Err(self.error("expected a digit index"));
                }
                let index = digits
                    .parse::<u64>()
                    .map_err(|_| self.error_at(start, "digit index too large"))?;
                Ok(FormalMachine::generator(GeneratorId::Digit {
                    index,
                    polarity,
                }))
            }
            Some('l') => {
                self.pos += 1;
                if self.peek() != Some('"') {
                    return Err(self.error("expected '\"' after 'l'"));
                }
                self.pos += 1;
                let mut bits = Vec::new();
                loop {
                    match self.peek() {
                        Some('0') => bits.push(false),
                        Some('1') => bits.push(true),
                        Some('"') => break,
                        _ => {
                            return Err(self.error(format!(
                                "expected '0', '1' or '\"', found {}",
                                self.describe()
                            )))
                        }
                    }
                    self.pos += 1;
                }
                self.pos += 1;
                Ok(FormalMachine::generator(GeneratorId::Prefix(Word::new(
                    bits,
                ))))
            }
            Some('i') => {
                self.pos += 1;
                if self.peek() != Some('(') {
                    return Err(self.error("expected '(' after 'i'"));
                }
                self.pos += 1;
                let lo = self.rational()?;
                self.expect(',')?;
                let hi = self.rational()?;
                self.expect(')')?;
                let iv = RationalInterval::new(lo, hi)
                    .map_err(|e| self.error_at(start, e.to_string()))?;
                Ok(FormalMachine::generator(GeneratorId::Interval(iv)))
            }
            _ => Err(self.error(format!(
                "expected a generator, '(', 'T' or 'F', found {}",
                self.describe()
            ))),
        }
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let negative = self.peek() == Some('-');
        if negative {
            self.pos += 1;
        }
        let digits = self.digits();
        if digits.is_empty() {
            return Err(self.error(format!("expected an integer, found {}", self.describe())));
        }
        let n: BigInt = digits.parse().expect("ascii digits");
        Ok(if negative { -n } else { n })
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        let n = self.integer()?;
        if self.eat('/') {
            let at = self.pos;
            let d = self.integer()?;
            if d.is_zero() || d.is_negative() {
                return Err(self.error_at(at, "denominator must be positive"));
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{normalize, GeneratorId as G};
    use proptest::prelude::*;

    #[test]
    fn parses_examples() {
        let m = parse_machine("(z0 & u1) | u2").unwrap();
        assert_eq!(
            m,
            FormalMachine::from_branches(vec![vec![G::z(0), G::u(1)], vec![G::u(2)]]).unwrap()
        );
        let m = parse_machine("i(1/3,2/3) | i(0,1/2)").unwrap();
        assert_eq!(m.branches().len(), 2);
        assert_eq!(parse_machine(" T ").unwrap(), FormalMachine::top());
        assert_eq!(parse_machine("F").unwrap(), FormalMachine::bottom());
        assert_eq!(parse_machine("l\"\" & l\"01\"").unwrap().width(), 2);
        assert_eq!(
            parse_machine("i(0, 1)").unwrap(),
            FormalMachine::generator(G::interval((0, 1), (1, 1)))
        );
    }

    #[test]
    fn distributes_meets() {
        let m = parse_machine("(z0 | u0) & z1").unwrap();
        assert_eq!(
            m,
            FormalMachine::from_branches(vec![vec![G::z(0), G::z(1)], vec![G::u(0), G::z(1)]])
                .unwrap()
        );
        assert_eq!(parse_machine("z0 & F").unwrap(), FormalMachine::bottom());
        assert_eq!(parse_machine("z0 | (z0 & u1)").unwrap().branches().len(), 2);
    }

    #[test]
    fn reports_positions() {
        match parse_machine("z0 &").unwrap_err() {
            ParseError::Syntax { line, column, .. } => assert_eq!((line, column), (1, 5)),
            e => panic!("{e}"),
        }
        match parse_machine("z0 |\n  q1").unwrap_err() {
            ParseError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 3)),
            e => panic!("{e}"),
        }
        assert!(matches!(
            parse_machine("i(2/3,1/3)"),
            Err(ParseError::Syntax { column: 1, .. })
        ));
        assert!(matches!(
            parse_machine("i(1/0,1)"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_machine("(z0"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_machine("z0 z1"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_machine("l\"012\""),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn mixed_spaces_are_a_mismatch() {
        assert!(matches!(
            parse_machine("z0 | l\"0\""),
            Err(ParseError::Mismatch(_))
        ));
        assert!(matches!(
            parse_machine("z0 & i(0,1)"),
            Err(ParseError::Mismatch(_))
        ));
    }

    fn generator() -> impl Strategy<Value = G> {
        prop_oneof![(0u64..6).prop_map(G::z), (0u64..6).prop_map(G::u),]
    }

    fn prefix_generator() -> impl Strategy<Value = G> {
        prop::collection::vec(any::<bool>(), 0..4).prop_map(|b| G::Prefix(Word::new(b)))
    }

    fn interval_generator() -> impl Strategy<Value = G> {
        (1i64..12, 1i64..12, 1i64..12).prop_filter_map("ordered", |(a, b, d)| {
            let (lo, hi) = (a.min(b) - 1, a.max(b));
            (hi <= d).then(|| G::interval((lo, d), (hi, d)))
        })
    }

    fn machine(g: BoxedStrategy<G>) -> impl Strategy<Value = FormalMachine> {
        prop::collection::vec(prop::collection::vec(g, 0..4), 0..5)
            .prop_map(|b| normalize(&FormalMachine::from_branches(b).unwrap()))
    }

    proptest! {
        #[test]
        fn round_trip(
            m in prop_oneof![
                machine(generator().boxed()),
                machine(prefix_generator().boxed()),
                machine(interval_generator().boxed()),
            ]
        ) {
            prop_assert_eq!(parse_machine(&print_machine(&m)).unwrap(), m);
        }
    }
}
