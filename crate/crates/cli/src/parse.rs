//! Expression parser for operators in `a` and `b`.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor ('*'? factor)*
//! factor := primary ('^' nat)*
//! primary:= rational | 'a' | 'b' | '(' expr ')'
//! ```

use abcalc_core::abalg::AbOperator;
use abcalc_core::series::parse_rational;

use crate::CliError;

pub fn parse_element(text: &str, order: usize) -> Result<AbOperator, CliError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        order,
    };
    let x = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(x)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    order: usize,
}

impl Parser<'_> {
    fn error(&self, message: String) -> CliError {
        CliError::Syntax {
            offset: self.pos,
            message,
        }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<AbOperator, CliError> {
        let negate = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let mut acc = self.term()?;
        if negate {
            acc = -&acc;
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<AbOperator, CliError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(c) if c.is_ascii_digit() || c == b'a' || c == b'b' || c == b'(' => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<AbOperator, CliError> {
        let mut base = self.primary()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected an exponent".into()));
            }
            let e: usize = digits.parse().map_err(|_| CliError::Syntax {
                offset: start,
                message: "exponent too large".into(),
            })?;
            base = base.pow(e);
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn primary(&mut self) -> Result<AbOperator, CliError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input".into())),
            Some(b'a') => {
                self.pos += 1;
                Ok(AbOperator::a(self.order))
            }
            Some(b'b') => {
                self.pos += 1;
                Ok(AbOperator::b(self.order))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                let mut text = self.digits();
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let den = self.digits();
                    if den.is_empty() {
                        return Err(self.error("expected a denominator".into()));
                    }
                    text = format!("{text}/{den}");
                }
                let r = parse_rational(&text).map_err(|e| CliError::Syntax {
                    offset: start,
                    message: e.to_string(),
                })?;
                Ok(AbOperator::scalar(r, self.order))
            }
            Some(c) => Err(self.error(format!("unknown symbol '{}'", c as char))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_is_b_squared() {
        let x = parse_element("a*b - b*a", 8).unwrap();
        assert_eq!(x.to_string(), "b^2");
    }

    #[test]
    fn juxtaposition_and_fractions() {
        let x = parse_element("(a - 1/2 b)^2", 8).unwrap();
        let y = parse_element("a^2 - ab + 1/4b^2 + 1/2 b^2", 8).unwrap();
        assert_eq!(x, y);
        assert_eq!(parse_element("3/2ab^2", 8).unwrap().to_string(), "3/2ab^2");
    }

    #[test]
    fn syntax_error_offset() {
        match parse_element("a + (", 8) {
            Err(CliError::Syntax { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_element("a + x", 8),
            Err(CliError::Syntax { offset: 4, .. })
        ));
    }
}
