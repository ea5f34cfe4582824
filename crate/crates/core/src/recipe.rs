//! Tiny term language for naming Young functions, weights and input functions
//! on the command line: `name`, `name:arg`, or `name:(arg, arg, ...)` where each
//! argument is a number or another term. `file:` takes the rest of the string as a path.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Arg {
    Num(f64),
    Term(Term),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub name: String,
    pub args: Vec<Arg>,
}

impl Term {
    pub fn parse(input: &str) -> Result<Term> {
        let mut p = Parser {
            src: input,
            pos: 0,
        };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != input.len() {
            return Err(p.err("trailing input"));
        }
        Ok(t)
    }

    pub fn num(&self, i: usize) -> Result<f64> {
        match self.args.get(i) {
            Some(Arg::Num(x)) => Ok(*x),
            Some(Arg::Term(t)) => Err(self.bad(&format!("argument {} must be a number, got `{t}`", i + 1))),
            None => Err(self.bad(&format!("missing argument {}", i + 1))),
        }
    }

    pub fn num_or(&self, i: usize, default: f64) -> Result<f64> {
        if i >= self.args.len() {
            Ok(default)
        } else {
            self.num(i)
        }
    }

    pub fn term(&self, i: usize) -> Result<&Term> {
        match self.args.get(i) {
            Some(Arg::Term(t)) => Ok(t),
            Some(Arg::Num(x)) => Err(self.bad(&format!("argument {} must be a recipe, got {x}", i + 1))),
            None => Err(self.bad(&format!("missing argument {}", i + 1))),
        }
    }

    pub fn expect_arity(&self, lo: usize, hi: usize) -> Result<()> {
        if (lo..=hi).contains(&self.args.len()) {
            Ok(())
        } else {
            Err(self.bad(&format!("expected {lo}..={hi} arguments, got {}", self.args.len())))
        }
    }

    pub fn bad(&self, msg: &str) -> Error {
        Error::Parse {
            input: self.to_string(),
            msg: msg.to_string(),
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Num(x) => write!(f, "{x}"),
            Arg::Term(t) => write!(f, "{t}"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        match self.args.as_slice() {
            [] => Ok(()),
            [Arg::Num(x)] => write!(f, ":{x}"),
            args => {
                write!(f, ":(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            msg: format!("{msg} at byte {}", self.pos),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn term(&mut self) -> Result<Term> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if name.is_empty() || !name.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(self.err("expected a name"));
        }
        let name = name.to_ascii_lowercase();
        if !self.eat(':') {
            return Ok(Term { name, args: vec![] });
        }
        if name == "file" {
            let path = self.src[self.pos..].trim().to_string();
            self.pos = self.src.len();
            if path.is_empty() {
                return Err(self.err("empty path"));
            }
            // paths are carried as a nested term whose name is the raw path
            return Ok(Term {
                name,
                args: vec![Arg::Term(Term {
                    name: path,
                    args: vec![],
                })],
            });
        }
        let args = if self.eat('(') {
            let mut args = vec![self.arg()?];
            while self.eat(',') {
                args.push(self.arg()?);
            }
            if !self.eat(')') {
                return Err(self.err("expected `)`"));
            }
            args
        } else {
            vec![self.arg()?]
        };
        Ok(Term { name, args })
    }

    fn arg(&mut self) -> Result<Arg> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let starts_numeric = rest
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '-' | '+' | '.'));
        if starts_numeric {
            let len = rest
                .find(|c: char| matches!(c, ',' | ')') || c.is_whitespace())
                .unwrap_or(rest.len());
            let text = &rest[..len];
            let x: f64 = text
                .parse()
                .map_err(|_| self.err(&format!("`{text}` is not a number")))?;
            self.pos += len;
            return Ok(Arg::Num(x));
        }
        if rest.starts_with("inf") && !rest[3..].starts_with(|c: char| c.is_ascii_alphanumeric()) {
            self.pos += 3;
            return Ok(Arg::Num(f64::INFINITY));
        }
        Ok(Arg::Term(self.term()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_terms() {
        let t = Term::parse("psi:(llogl:1, 1, 2, 1.0)").unwrap();
        assert_eq!(t.name, "psi");
        assert_eq!(t.term(0).unwrap().num(0).unwrap(), 1.0);
        assert_eq!(t.num(3).unwrap(), 1.0);
        assert_eq!(Term::parse("power:2").unwrap().num(0).unwrap(), 2.0);
        let c = Term::parse("complementary:(power:2)").unwrap();
        assert_eq!(c.term(0).unwrap().name, "power");
    }

    #[test]
    fn display_roundtrip() {
        for s in ["power:2", "psi:(llogl:1,1,2,1)", "const", "power:(0.5,0.5)"] {
            assert_eq!(Term::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn file_paths_are_raw() {
        let t = Term::parse("file:/tmp/a-b,c.bin").unwrap();
        assert_eq!(t.term(0).unwrap().name, "/tmp/a-b,c.bin");
    }

    #[test]
    fn errors_are_reported() {
        assert!(Term::parse("").is_err());
        assert!(Term::parse("power:(2").is_err());
        assert!(Term::parse("power:x1y").is_ok());
        assert!(Term::parse("power:1e").is_err());
        assert!(Term::parse("power:2 junk").is_err());
    }
}
