//! Text grammar for forms, operators and `q`-series.
//!
//! ```text
//! expr    := ['+'|'-'] term (('+'|'-') term)*
//! term    := unary (('*'|'/') unary)*
//! unary   := '-' unary | postfix
//! postfix := primary ('^' power | '\'')*
//! primary := integer | name | '(' expr ')'
//! ```
//!
//! Form names are `E2 E4 E6 E8 E10 Delta`; almost holomorphic forms add `Y`
//! and operators add `D`, which must be the rightmost factor of a term. Division is only by nonzero constants.
//! Series expressions also accept `q`, `eta`, `theta2`, `theta3`, `theta4`,
//! `G0`, `G1` (Rogers-Ramanujan functions) and `H0`, `H1` (their bare sums).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mldo::Mldo;
use crate::qmring::{AlmostHolForm, QuasiModularForm as Form};
use crate::qseries::{self, FracPowerSeries};
use crate::rational::{format_q, q, Q};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token {
                tok: Tok::Int(s.parse().expect("digits")),
                line: l0,
                column: c0,
            });
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Token {
                tok: Tok::Name(s),
                line: l0,
                column: c0,
            });
            continue;
        }
        if "+-*/^()'".contains(c) {
            out.push(Token {
                tok: Tok::Sym(c),
                line: l0,
                column: c0,
            });
            column += 1;
            i += 1;
            continue;
        }
        return Err(Error::Parse {
            line: l0,
            column: c0,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

/// What a subexpression evaluates to.
trait Domain: Sized + Clone {
    fn constant(c: Q, order: usize) -> Self;
    fn name(name: &str, at: &Token, p: &Parser<Self>) -> Result<Self>;
    fn add(self, other: Self, at: &Token) -> Result<Self>;
    fn mul(self, other: Self, at: &Token) -> Result<Self>;
    fn as_constant(&self) -> Option<Q>;
    fn scale(self, c: &Q) -> Self;
    fn pow(self, e: &Q, at: &Token) -> Result<Self>;
    fn prime(self, at: &Token) -> Result<Self>;
}

struct Parser<T> {
    toks: Vec<Token>,
    pos: usize,
    order: usize,
    _t: std::marker::PhantomData<T>,
}

fn err_at(t: &Token, message: impl Into<String>) -> Error {
    Error::Parse {
        line: t.line,
        column: t.column,
        message: message.into(),
    }
}

impl<T: Domain> Parser<T> {
    fn new(text: &str, order: usize) -> Result<Self> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
            order,
            _t: std::marker::PhantomData,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse_all(&mut self) -> Result<T> {
        let v = self.expr()?;
        let t = self.peek().clone();
        if t.tok != Tok::End {
            return Err(err_at(&t, "unexpected trailing input"));
        }
        Ok(v)
    }

    fn expr(&mut self) -> Result<T> {
        let neg = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc = acc.scale(&-Q::one());
        }
        loop {
            let t = self.peek().clone();
            let sign = match t.tok {
                Tok::Sym('+') => Q::one(),
                Tok::Sym('-') => -Q::one(),
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?.scale(&sign);
            acc = acc.add(rhs, &t)?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<T> {
        let mut acc = self.unary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Sym('*') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    acc = acc.mul(rhs, &t)?;
                }
                Tok::Sym('/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    match rhs.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                        Some(_) => return Err(err_at(&t, "division by zero")),
                        None => return Err(err_at(&t, "can only divide by a constant")),
                    }
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<T> {
        if self.eat('-') {
            return Ok(self.unary()?.scale(&-Q::one()));
        }
        self.postfix()
    }

    fn power(&mut self) -> Result<Q> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(Q::from_integer(n)),
            Tok::Sym('(') => {
                let neg = self.eat('-');
                let num = match self.next().tok {
                    Tok::Int(n) => n,
                    _ => return Err(err_at(&t, "expected an exponent")),
                };
                let mut e = Q::from_integer(num);
                if self.eat('/') {
                    match self.next().tok {
                        Tok::Int(d) if !d.is_zero() => e /= Q::from_integer(d),
                        _ => return Err(err_at(&t, "expected a nonzero denominator")),
                    }
                }
                if !self.eat(')') {
                    return Err(err_at(self.peek(), "expected `)`"));
                }
                Ok(if neg { -e } else { e })
            }
            _ => Err(err_at(&t, "expected an exponent")),
        }
    }

    fn postfix(&mut self) -> Result<T> {
        let mut v = self.primary()?;
        loop {
            let t = self.peek().clone();
            match t.tok {
                Tok::Sym('^') => {
                    self.pos += 1;
                    let e = self.power()?;
                    v = v.pow(&e, &t)?;
                }
                Tok::Sym('\'') => {
                    self.pos += 1;
                    v = v.prime(&t)?;
                }
                _ => break,
            }
        }
        Ok(v)
    }

    fn primary(&mut self) -> Result<T> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => Ok(T::constant(Q::from_integer(n.clone()), self.order)),
            Tok::Name(s) => T::name(s, &t, self),
            Tok::Sym('(') => {
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(err_at(self.peek(), "expected `)`"));
                }
                Ok(v)
            }
            Tok::End => Err(err_at(&t, "unexpected end of input")),
            Tok::Sym(c) => Err(err_at(&t, format!("unexpected `{c}`"))),
        }
    }
}

fn form_name(name: &str) -> Option<Form> {
    Some(match name {
        "E2" => Form::e2(),
        "E4" => Form::e4(),
        "E6" => Form::e6(),
        "E8" => Form::e8(),
        "E10" => Form::e10(),
        "Delta" => Form::discriminant(),
        _ => return None,
    })
}

fn nat_exponent(e: &Q, at: &Token) -> Result<u32> {
    if !e.is_integer() || e.is_negative() {
        return Err(err_at(at, format!("exponent {} must be a natural number", format_q(e))));
    }
    e.to_integer()
        .to_u32()
        .ok_or_else(|| err_at(at, "exponent too large"))
}

/// A polynomial in `D` with form coefficients.
#[derive(Clone, Debug)]
enum OpVal {
    Form(Form),
    Op(BTreeMap<u32, Form>),
}

impl OpVal {
    fn into_op(self) -> BTreeMap<u32, Form> {
        match self {
            OpVal::Form(f) => BTreeMap::from([(0, f)]),
            OpVal::Op(m) => m,
        }
    }

    /// `Some(n)` when the value is exactly `D^n`.
    fn pure_d(&self) -> Option<u32> {
        match self {
            OpVal::Op(m) if m.len() == 1 => {
                let (n, c) = m.iter().next().unwrap();
                (c == &Form::one()).then_some(*n)
            }
            _ => None,
        }
    }
}

impl Domain for OpVal {
    fn constant(c: Q, _: usize) -> Self {
        OpVal::Form(Form::constant(c))
    }

    fn name(name: &str, at: &Token, _: &Parser<Self>) -> Result<Self> {
        if name == "D" {
            return Ok(OpVal::Op(BTreeMap::from([(1, Form::one())])));
        }
        form_name(name)
            .map(OpVal::Form)
            .ok_or_else(|| err_at(at, format!("unknown name `{name}`")))
    }

    fn add(self, other: Self, _: &Token) -> Result<Self> {
        match (self, other) {
            (OpVal::Form(a), OpVal::Form(b)) => Ok(OpVal::Form(a.try_add(&b)?)),
            (a, b) => {
                let mut m = a.into_op();
                for (r, c) in b.into_op() {
                    let slot = match m.remove(&r) {
                        Some(x) => x.try_add(&c)?,
                        None => c,
                    };
                    m.insert(r, slot);
                }
                Ok(OpVal::Op(m))
            }
        }
    }

    fn mul(self, other: Self, at: &Token) -> Result<Self> {
        match (self, other) {
            (OpVal::Form(a), OpVal::Form(b)) => Ok(OpVal::Form(&a * &b)),
            (OpVal::Form(a), OpVal::Op(m)) => Ok(OpVal::Op(
                m.into_iter().map(|(r, c)| (r, &a * &c)).collect(),
            )),
            (a, b) => match (a.pure_d(), b.pure_d()) {
                (Some(x), Some(y)) => Ok(OpVal::Op(BTreeMap::from([(x + y, Form::one())]))),
                _ => Err(err_at(at, "`D` must be the rightmost factor of a term")),
            },
        }
    }

    fn as_constant(&self) -> Option<Q> {
        match self {
            OpVal::Form(f) => f.as_constant(),
            OpVal::Op(_) => None,
        }
    }

    fn scale(self, c: &Q) -> Self {
        match self {
            OpVal::Form(f) => OpVal::Form(f.scale(c)),
            OpVal::Op(m) => OpVal::Op(m.into_iter().map(|(r, f)| (r, f.scale(c))).collect()),
        }
    }

    fn pow(self, e: &Q, at: &Token) -> Result<Self> {
        let n = nat_exponent(e, at)?;
        match self {
            OpVal::Form(f) => Ok(OpVal::Form(f.pow(n))),
            v => match v.pure_d() {
                Some(d) => Ok(OpVal::Op(BTreeMap::from([(d * n, Form::one())]))),
                None => Err(err_at(at, "only `D` itself can be raised to a power")),
            },
        }
    }

    fn prime(self, at: &Token) -> Result<Self> {
        match self {
            OpVal::Form(f) => Ok(OpVal::Form(f.derivative())),
            OpVal::Op(_) => Err(err_at(at, "`'` applies to forms only")),
        }
    }
}

/// Parses a quasimodular form; mixed weights are rejected.
pub fn parse_form(text: &str) -> Result<Form> {
    match Parser::<OpVal>::new(text, 0)?.parse_all()? {
        OpVal::Form(f) => Ok(f),
        OpVal::Op(_) => Err(Error::Parse {
            line: 1,
            column: 1,
            message: "expected a form, found an operator".into(),
        }),
    }
}

/// Parses `sum a_r D^r` as an operator on weight `k`. The coefficient
/// weights must fit a single `K` and satisfy `depth(a_r) <= n - r`.
pub fn parse_operator(text: &str, k: &Q) -> Result<Mldo> {
    let m = Parser::<OpVal>::new(text, 0)?.parse_all()?.into_op();
    let mut gain: Option<u32> = None;
    for (r, c) in &m {
        if c.is_zero() {
            continue;
        }
        let w = c.weight() + 2 * r;
        match gain {
            None => gain = Some(w),
            Some(g) if g != w => return Err(Error::MixedWeights(g.to_string(), w.to_string())),
            _ => {}
        }
    }
    let Some(gain) = gain else {
        return Ok(Mldo::zero(k.clone(), 0));
    };
    let n = *m.keys().max().unwrap_or(&0);
    let coeffs = (0..=n)
        .map(|r| {
            m.get(&r)
                .cloned()
                .unwrap_or_else(|| Form::zero((gain as i64 - 2 * r as i64).max(0) as u32))
        })
        .collect();
    let l = Mldo::new(k.clone(), gain, coeffs)?;
    l.check_depth()?;
    Ok(l)
}

#[derive(Clone, Debug)]
struct SeriesVal(FracPowerSeries);

impl Domain for SeriesVal {
    fn constant(c: Q, order: usize) -> Self {
        SeriesVal(FracPowerSeries::monomial(c, Q::zero(), q(order as i64 + 1)))
    }

    fn name(name: &str, at: &Token, p: &Parser<Self>) -> Result<Self> {
        let n = p.order;
        let s = if let Some(f) = form_name(name) {
            f.to_qseries(n)
        } else {
            match name {
                "q" => FracPowerSeries::monomial(Q::one(), Q::one(), q(n as i64 + 2)),
                "eta" => qseries::eta_pow(&Q::one(), n),
                "theta2" => qseries::theta(2, n)?,
                "theta3" => qseries::theta(3, n)?,
                "theta4" => qseries::theta(4, n)?,
                "G0" => qseries::rogers_ramanujan(0, n)?,
                "G1" => qseries::rogers_ramanujan(1, n)?,
                "H0" => qseries::rogers_ramanujan_sum(0, n)?,
                "H1" => qseries::rogers_ramanujan_sum(1, n)?,
                _ => return Err(err_at(at, format!("unknown series `{name}`"))),
            }
        };
        Ok(SeriesVal(s))
    }

    fn add(self, other: Self, _: &Token) -> Result<Self> {
        Ok(SeriesVal(self.0.add(&other.0)?))
    }

    fn mul(self, other: Self, _: &Token) -> Result<Self> {
        Ok(SeriesVal(self.0.mul(&other.0)?))
    }

    fn as_constant(&self) -> Option<Q> {
        let t: Vec<_> = self.0.terms().filter(|(_, c)| !c.is_zero()).collect();
        match t.as_slice() {
            [] => Some(Q::zero()),
            [(e, c)] if e.is_zero() => Some((*c).clone()),
            _ => None,
        }
    }

    fn scale(self, c: &Q) -> Self {
        SeriesVal(self.0.scale(c))
    }

    fn pow(self, e: &Q, at: &Token) -> Result<Self> {
        let s = &self.0;
        if e.is_integer() {
            let n = e.to_integer().to_i64().ok_or_else(|| err_at(at, "exponent too large"))?;
            return Ok(SeriesVal(s.powi(n)?));
        }
        // leading term c q^a: (c q^a)^e needs c = 1
        let Some((a, c)) = s.leading() else {
            return Err(err_at(at, "fractional power of zero"));
        };
        if !c.is_one() {
            return Err(err_at(at, "fractional powers need leading coefficient 1"));
        }
        let a = a.clone();
        let unit = s.shift(&-a.clone());
        Ok(SeriesVal(unit.pow_rational(e)?.shift(&(a * e))))
    }

    fn prime(self, _: &Token) -> Result<Self> {
        Ok(SeriesVal(self.0.derive()))
    }
}

#[derive(Clone, Debug)]
struct HatVal(AlmostHolForm);

impl Domain for HatVal {
    fn constant(c: Q, _: usize) -> Self {
        HatVal(AlmostHolForm::from_form(&Form::constant(c)))
    }

    fn name(name: &str, at: &Token, _: &Parser<Self>) -> Result<Self> {
        if name == "Y" {
            return Ok(HatVal(AlmostHolForm::y()));
        }
        form_name(name)
            .map(|f| HatVal(AlmostHolForm::from_form(&f)))
            .ok_or_else(|| err_at(at, format!("unknown name `{name}`")))
    }

    fn add(self, other: Self, _: &Token) -> Result<Self> {
        Ok(HatVal(self.0.try_add(&other.0)?))
    }

    fn mul(self, other: Self, _: &Token) -> Result<Self> {
        Ok(HatVal(&self.0 * &other.0))
    }

    fn as_constant(&self) -> Option<Q> {
        if self.0.is_zero() {
            return Some(Q::zero());
        }
        if self.0.weight() != 0 {
            return None;
        }
        self.0.terms().get(&[0, 0, 0, 0]).cloned()
    }

    fn scale(self, c: &Q) -> Self {
        HatVal(self.0.scale(c))
    }

    fn pow(self, e: &Q, at: &Token) -> Result<Self> {
        let n = nat_exponent(e, at)?;
        let mut acc = AlmostHolForm::from_form(&Form::one());
        for _ in 0..n {
            acc = &acc * &self.0;
        }
        Ok(HatVal(acc))
    }

    fn prime(self, _: &Token) -> Result<Self> {
        Ok(HatVal(self.0.derivative_hat()))
    }
}

/// Parses an almost holomorphic form, a polynomial in `E2, E4, E6, Y`; a
/// prime applies the hatted derivative.
pub fn parse_almost(text: &str) -> Result<AlmostHolForm> {
    Ok(Parser::<HatVal>::new(text, 0)?.parse_all()?.0)
}

/// Parses a series expression, generating every named series through
/// `q^order` past its leading exponent.
pub fn parse_series(text: &str, order: usize) -> Result<FracPowerSeries> {
    Ok(Parser::<SeriesVal>::new(text, order)?.parse_all()?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn forms() {
        let f = parse_form("E2^2 - E4").unwrap();
        assert_eq!(f.weight(), 4);
        assert_eq!(f.depth(), 2);
        assert_eq!(parse_form("E8").unwrap(), parse_form("E4^2").unwrap());
        assert_eq!(parse_form("E2'").unwrap(), Form::e2().derivative());
        assert_eq!(parse_form("(E2^2 - E4)/12").unwrap(), Form::e2().derivative());
        assert_eq!(parse_form("-1039/600*E4").unwrap(), Form::e4().scale(&qf(-1039, 600)));
    }

    #[test]
    fn mixed_weights() {
        let e = parse_form("E2 + E4").unwrap_err();
        assert_eq!(e.to_string(), "mixed weights 2 and 4");
    }

    #[test]
    fn positions() {
        match parse_form("E4 +\n  E4 $") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 6)),
            other => panic!("{other:?}"),
        }
        match parse_form("E4 / E4") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_form("E7").is_err());
        assert!(parse_form("D*E4").is_err());
    }

    #[test]
    fn operators() {
        let l = parse_operator("D^2 - 1/6*E2*D - 11/3600*E4", &q(0)).unwrap();
        assert_eq!(l.order(), 2);
        assert_eq!(l.gain(), 4);
        assert!(parse_operator("E2*D", &q(1)).is_err());
        assert!(matches!(
            parse_operator("D^2 + E4*D", &q(1)),
            Err(Error::MixedWeights(_, _))
        ));
    }

    #[test]
    fn print_parse_identity() {
        let samples = [
            Mldo::kk(qf(1, 5), 3),
            Mldo::vz(q(4), 2).mul_form(&Form::e6()),
            Mldo::multiplication(q(2), Form::discriminant()),
            Mldo::serre_iter(qf(-3, 2), 3),
        ];
        for l in samples {
            let text = l.to_string();
            assert_eq!(parse_operator(&text, l.k()).unwrap(), l, "{text}");
        }
        for f in [Form::discriminant(), Form::e2().derivative_n(3), Form::one(), Form::zero(0)] {
            assert_eq!(parse_form(&f.to_string()).unwrap(), f);
        }
    }

    #[test]
    fn series() {
        let s = parse_series("eta^24", 20).unwrap();
        let d = qseries::delta(19);
        assert_eq!(s.truncate(d.order()), d);
        let t = parse_series("eta^(2/5)*G0", 20).unwrap();
        assert_eq!(t.alpha(), &q(0));
        let c = parse_series("q^(1/5) * 3", 10).unwrap();
        assert_eq!(c.leading().map(|(a, _)| a.clone()), Some(qf(1, 5)));
    }

    #[test]
    fn almost_holomorphic() {
        let c = parse_almost("E2 + 12*Y").unwrap();
        assert_eq!(c, Form::e2().completion());
        let f = Form::e2().pow(2).completion();
        assert_eq!(parse_almost(&f.to_string()).unwrap(), f);
        assert!(parse_almost("Y + E4").is_err());
    }
}
