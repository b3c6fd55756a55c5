//! The graded ring `Q[E2, E4, E6]` of quasimodular forms for `SL2(Z)`.
//!
//! Elements are weight-homogeneous polynomials stored as sparse maps from
//! exponent triples `(a, b, c)` of `E2^a E4^b E6^c` to nonzero rationals.
//! The ring carries three derivations forming an `sl2` triple:
//! [`QuasiModularForm::derivative`] (`D = q d/dq`), [`QuasiModularForm::lowering`]
//! (`12 d/dE2`) and multiplication by the weight.

mod almost;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qseries::{self, FracPowerSeries};
use crate::rational::{factorial, format_q, parse_q, pochhammer, q, qf, Q};

pub use almost::{AlmostHolForm, HatProjection};

/// Exponents of `E2`, `E4`, `E6`.
pub type Exponents = [u32; 3];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuasiModularForm {
    weight: u32,
    terms: BTreeMap<Exponents, Q>,
}

pub(crate) fn monomial_weight(e: &Exponents) -> u32 {
    2 * e[0] + 4 * e[1] + 6 * e[2]
}

impl QuasiModularForm {
    pub fn zero(weight: u32) -> Self {
        QuasiModularForm {
            weight,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn one() -> Self {
        Self::constant(Q::one())
    }

    pub fn monomial(c: Q, e: Exponents) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        QuasiModularForm {
            weight: monomial_weight(&e),
            terms,
        }
    }

    pub fn e2() -> Self {
        Self::monomial(Q::one(), [1, 0, 0])
    }

    pub fn e4() -> Self {
        Self::monomial(Q::one(), [0, 1, 0])
    }

    pub fn e6() -> Self {
        Self::monomial(Q::one(), [0, 0, 1])
    }

    /// `E8 = E4^2`.
    pub fn e8() -> Self {
        Self::monomial(Q::one(), [0, 2, 0])
    }

    /// `E10 = E4 E6`.
    pub fn e10() -> Self {
        Self::monomial(Q::one(), [0, 1, 1])
    }

    /// `(E4^3 - E6^2) / 1728`.
    pub fn discriminant() -> Self {
        (&Self::monomial(Q::one(), [0, 3, 0]) - &Self::monomial(Q::one(), [0, 0, 2]))
            .scale(&qf(1, 1728))
    }

    /// Builds a form from terms, checking weight homogeneity.
    pub fn from_terms<I>(weight: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, Q)>,
    {
        let mut out = Self::zero(weight);
        for (e, c) in terms {
            let w = monomial_weight(&e);
            if w != weight {
                return Err(Error::MixedWeights(weight.to_string(), w.to_string()));
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    fn add_term(&mut self, e: Exponents, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Q> {
        &self.terms
    }

    pub fn coefficient(&self, e: &Exponents) -> Q {
        self.terms.get(e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree in `E2`; zero for the zero form.
    pub fn depth(&self) -> u32 {
        self.terms.keys().map(|e| e[0]).max().unwrap_or(0)
    }

    /// Depth zero, i.e. a modular form.
    pub fn is_modular(&self) -> bool {
        self.depth() == 0
    }

    /// The value of a weight-0 form.
    pub fn as_constant(&self) -> Option<Q> {
        if self.weight != 0 {
            return None;
        }
        Some(self.coefficient(&[0, 0, 0]))
    }

    /// Sum of all coefficients: the constant term of the `q`-expansion.
    pub fn constant_term(&self) -> Q {
        self.terms.values().fold(Q::zero(), |a, c| a + c)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.weight);
        }
        QuasiModularForm {
            weight: self.weight,
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.weight != other.weight && !self.is_zero() && !other.is_zero() {
            return Err(Error::MixedWeights(
                self.weight.to_string(),
                other.weight.to_string(),
            ));
        }
        let (mut out, rest) = if self.is_zero() {
            (other.clone(), None)
        } else {
            (self.clone(), Some(other))
        };
        if let Some(rest) = rest {
            for (e, c) in &rest.terms {
                out.add_term(*e, c.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// `D = q d/dq`, extended from `E2' = (E2^2 - E4)/12`,
    /// `E4' = (E2 E4 - E6)/3`, `E6' = (E2 E6 - E4^2)/2`.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zero(self.weight + 2);
        for (&[a, b, c], x) in &self.terms {
            let w = 2 * a + 4 * b + 6 * c;
            // all three contribute E2 * monomial with total (w - a)/12
            out.add_term([a + 1, b, c], x * qf((w - a) as i64, 12));
            if a > 0 {
                out.add_term([a - 1, b + 1, c], x * qf(-(a as i64), 12));
            }
            if b > 0 {
                out.add_term([a, b - 1, c + 1], x * qf(-(b as i64), 3));
            }
            if c > 0 {
                out.add_term([a, b + 2, c - 1], x * qf(-(c as i64), 2));
            }
        }
        out
    }

    pub fn derivative_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative())
    }

    /// `12 d/dE2`: weight drops by 2 and depth by 1.
    pub fn lowering(&self) -> Self {
        let mut out = Self::zero(self.weight.saturating_sub(2));
        for (&[a, b, c], x) in &self.terms {
            if a > 0 {
                out.add_term([a - 1, b, c], x * q(12 * a as i64));
            }
        }
        out
    }

    pub fn lowering_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |f, _| f.lowering())
    }

    /// `W`: multiplication by the weight.
    pub fn weight_action(&self) -> Self {
        self.scale(&q(self.weight as i64))
    }

    /// Primitive projection onto the modular forms of the same weight.
    ///
    /// Weight 2 uses `F - lowering(F) E2 / 12`, which always vanishes on
    /// `SL2(Z)`.
    pub fn primitive_projection(&self) -> Self {
        let k = self.weight;
        if k == 2 {
            return self - &(&self.lowering() * &Self::e2()).scale(&qf(1, 12));
        }
        let mut out = Self::zero(k);
        let mut lowered = self.clone();
        for m in 0..=self.depth() {
            if m > 0 {
                lowered = lowered.lowering();
            }
            if lowered.is_zero() {
                break;
            }
            let denom = factorial(m) * pochhammer(&q(k as i64 - m as i64 - 1), m);
            let sign = if m % 2 == 0 { Q::one() } else { -Q::one() };
            out = &out + &lowered.derivative_n(m).scale(&(sign / denom));
        }
        out
    }

    /// Coefficients `g_j` of `F = sum_j g_j E2^j`, each modular of weight
    /// `k - 2j`.
    pub fn e2_coefficients(&self) -> Vec<QuasiModularForm> {
        let p = self.depth();
        let mut out: Vec<_> = (0..=p)
            .map(|j| Self::zero(self.weight.saturating_sub(2 * j)))
            .collect();
        for (&[a, b, c], x) in &self.terms {
            out[a as usize].add_term([0, b, c], x.clone());
        }
        out
    }

    /// Modular forms `h_r` with `F = sum_r D^<r>(h_r)`, where the modified
    /// derivative of the constant 1 is used for the top slot in weight 0.
    pub fn derivative_coefficients(&self) -> Result<Vec<QuasiModularForm>> {
        if self.weight == 0 {
            return Ok(vec![self.clone()]);
        }
        let p = self.depth();
        let mut out: Vec<_> = (0..=p)
            .map(|r| Self::zero(self.weight - 2 * r))
            .collect();
        let mut rest = self.clone();
        for r in (0..=p).rev() {
            let h = rest.lowering_n(r).scale(&factorial(r).recip());
            if h.is_zero() {
                continue;
            }
            debug_assert!(h.is_modular());
            let kappa = q(h.weight() as i64);
            let piece = crate::hsd::dmod(&kappa, r, &h)?;
            rest = &rest - &piece;
            out[r as usize] = h;
        }
        debug_assert!(rest.is_zero());
        Ok(out)
    }

    /// Replaces `E2, E4, E6` by their `q`-expansions through `q^n`.
    pub fn to_qseries(&self, n: usize) -> FracPowerSeries {
        SeriesTable::new(n).expand(self)
    }
}

/// Powers of the Eisenstein series at a fixed truncation, reused across
/// expansions.
pub struct SeriesTable {
    n: usize,
    pows: [Vec<FracPowerSeries>; 3],
}

impl SeriesTable {
    pub fn new(n: usize) -> Self {
        let base = |k| vec![qseries::eisenstein(k, n).expect("valid weight")];
        SeriesTable {
            n,
            pows: [base(2), base(4), base(6)],
        }
    }

    pub fn truncation(&self) -> usize {
        self.n
    }

    fn power(&mut self, i: usize, e: u32) -> FracPowerSeries {
        if e == 0 {
            return FracPowerSeries::constant(Q::one(), self.n + 1);
        }
        while self.pows[i].len() < e as usize {
            let next = self.pows[i]
                .last()
                .unwrap()
                .mul(&self.pows[i][0])
                .expect("integral exponents");
            self.pows[i].push(next);
        }
        self.pows[i][e as usize - 1].clone()
    }

    pub fn expand(&mut self, f: &QuasiModularForm) -> FracPowerSeries {
        let mut acc = FracPowerSeries::zero(q(self.n as i64 + 1));
        for (&[a, b, c], x) in f.terms() {
            let mut m = self.power(0, a);
            if b > 0 {
                m = m.mul(&self.power(1, b)).expect("integral exponents");
            }
            if c > 0 {
                m = m.mul(&self.power(2, c)).expect("integral exponents");
            }
            acc = acc.add(&m.scale(x)).expect("integral exponents");
        }
        acc
    }
}

/// `dim M_k(SL2(Z))` for even `k >= 0`.
pub fn modular_dimension(k: u32) -> Result<usize> {
    Ok(modular_basis(k)?.len())
}

/// Monomials `E4^b E6^c` with `4b + 6c = k`, ordered by decreasing `b`.
pub fn modular_basis(k: u32) -> Result<Vec<QuasiModularForm>> {
    if k % 2 == 1 {
        return Err(Error::InvalidWeight(k as i64, "weights must be even"));
    }
    let mut out = Vec::new();
    for b in (0..=k / 4).rev() {
        let rest = k - 4 * b;
        if rest % 6 == 0 {
            out.push(QuasiModularForm::monomial(Q::one(), [0, b, rest / 6]));
        }
    }
    Ok(out)
}

/// Every monomial `E2^a E4^b E6^c` of weight `k`.
pub fn quasimodular_basis(k: u32) -> Vec<QuasiModularForm> {
    let mut out = Vec::new();
    if k % 2 == 1 {
        return out;
    }
    for a in (0..=k / 2).rev() {
        if let Ok(b) = modular_basis(k - 2 * a) {
            for m in b {
                out.push(&m * &QuasiModularForm::e2().pow(a));
            }
        }
    }
    out
}

impl<'a> Add<&'a QuasiModularForm> for &'a QuasiModularForm {
    type Output = QuasiModularForm;
    fn add(self, other: &QuasiModularForm) -> QuasiModularForm {
        self.try_add(other).expect("adding forms of different weights")
    }
}

impl<'a> Sub<&'a QuasiModularForm> for &'a QuasiModularForm {
    type Output = QuasiModularForm;
    fn sub(self, other: &QuasiModularForm) -> QuasiModularForm {
        self.try_add(&-other)
            .expect("subtracting forms of different weights")
    }
}

impl Neg for &QuasiModularForm {
    type Output = QuasiModularForm;
    fn neg(self) -> QuasiModularForm {
        self.scale(&-Q::one())
    }
}

impl<'a> Mul<&'a QuasiModularForm> for &'a QuasiModularForm {
    type Output = QuasiModularForm;
    fn mul(self, other: &QuasiModularForm) -> QuasiModularForm {
        let mut out = QuasiModularForm::zero(self.weight + other.weight);
        for (e, x) in &self.terms {
            for (f, y) in &other.terms {
                out.add_term([e[0] + f[0], e[1] + f[1], e[2] + f[2]], x * y);
            }
        }
        out
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, names: &[&str], exps: &[u32]) -> fmt::Result {
    let mut first = true;
    for (name, &e) in names.iter().zip(exps) {
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        if e == 1 {
            write!(f, "{name}")?;
        } else {
            write!(f, "{name}^{e}")?;
        }
    }
    Ok(())
}

/// Shared printer: terms in decreasing lexicographic exponent order.
pub(crate) fn write_polynomial<'a, I>(
    f: &mut fmt::Formatter<'_>,
    names: &[&str],
    terms: I,
) -> fmt::Result
where
    I: Iterator<Item = (&'a [u32], &'a Q)>,
{
    let mut first = true;
    for (e, c) in terms {
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        first = false;
        let constant = e.iter().all(|&x| x == 0);
        if constant {
            write!(f, "{}", format_q(&a))?;
        } else {
            if !a.is_one() {
                write!(f, "{}*", format_q(&a))?;
            }
            write_monomial(f, names, e)?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for QuasiModularForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_polynomial(
            f,
            &["E2", "E4", "E6"],
            self.terms.iter().rev().map(|(e, c)| (&e[..], c)),
        )
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct MonomialJson {
    pub e2: u32,
    pub e4: u32,
    pub e6: u32,
    #[serde(default)]
    pub y: u32,
    pub coeff: String,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct FormJson {
    pub weight: u32,
    pub monomials: Vec<MonomialJson>,
}

impl Serialize for QuasiModularForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            weight: self.weight,
            monomials: self
                .terms
                .iter()
                .rev()
                .map(|(e, c)| MonomialJson {
                    e2: e[0],
                    e4: e[1],
                    e6: e[2],
                    y: 0,
                    coeff: format_q(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuasiModularForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = FormJson::deserialize(d)?;
        let mut terms = Vec::new();
        for m in j.monomials {
            if m.y != 0 {
                return Err(D::Error::custom("quasimodular forms cannot contain Y"));
            }
            terms.push(([m.e2, m.e4, m.e6], parse_q(&m.coeff).map_err(D::Error::custom)?));
        }
        QuasiModularForm::from_terms(j.weight, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    fn e2() -> QuasiModularForm {
        QuasiModularForm::e2()
    }
    fn e4() -> QuasiModularForm {
        QuasiModularForm::e4()
    }
    fn e6() -> QuasiModularForm {
        QuasiModularForm::e6()
    }

    #[test]
    fn ramanujan_identities() {
        assert_eq!(e2().derivative(), (&(&e2() * &e2()) - &e4()).scale(&qf(1, 12)));
        assert_eq!(e4().derivative(), (&(&e2() * &e4()) - &e6()).scale(&qf(1, 3)));
        assert_eq!(e6().derivative(), (&(&e2() * &e6()) - &(&e4() * &e4())).scale(&qf(1, 2)));
        assert!(QuasiModularForm::one().derivative().is_zero());
    }

    #[test]
    fn lowering_examples() {
        assert_eq!(e2().lowering(), QuasiModularForm::constant(q(12)));
        assert!(e4().lowering().is_zero());
        assert_eq!((&e2() * &e2()).lowering(), e2().scale(&q(24)));
        assert_eq!(e4().weight_action(), e4().scale(&q(4)));
    }

    #[test]
    fn projection_examples() {
        let e2sq = &e2() * &e2();
        assert_eq!(e2sq.primitive_projection(), e4());
        assert_eq!(e6().primitive_projection(), e6());
        let g = &e2() * &e4();
        assert!(g.derivative().primitive_projection().is_zero());
        assert!(e2().primitive_projection().is_zero());
        assert_eq!(QuasiModularForm::constant(q(3)).primitive_projection(), QuasiModularForm::constant(q(3)));
    }

    #[test]
    fn e2_decomposition() {
        let e2sq = &e2() * &e2();
        let parts = e2sq.e2_coefficients();
        assert_eq!(parts.len(), 3);
        assert!(parts[0].is_zero() && parts[1].is_zero());
        assert_eq!(parts[2], QuasiModularForm::one());
        let parts = e4().derivative().e2_coefficients();
        assert_eq!(parts, vec![e6().scale(&qf(-1, 3)), e4().scale(&qf(1, 3))]);
        assert_eq!(e4().e2_coefficients(), vec![e4()]);
    }

    #[test]
    fn derivative_decomposition() {
        let h = e2().scale(&qf(1, 12)).derivative_coefficients().unwrap();
        assert_eq!(h, vec![QuasiModularForm::zero(2), QuasiModularForm::one()]);
        assert_eq!(e4().derivative_coefficients().unwrap(), vec![e4()]);
        let h = e4().derivative().derivative_coefficients().unwrap();
        assert!(h[0].is_zero());
        assert_eq!(h[1], e4().scale(&q(4)));
    }

    #[test]
    fn dimensions() {
        assert_eq!(modular_dimension(12).unwrap(), 2);
        assert_eq!(modular_dimension(2).unwrap(), 0);
        assert_eq!(modular_dimension(0).unwrap(), 1);
        assert!(modular_dimension(5).is_err());
        assert_eq!(quasimodular_basis(4).len(), 2);
    }

    #[test]
    fn discriminant_series() {
        let d = QuasiModularForm::discriminant().to_qseries(10);
        assert_eq!(d, qseries::delta(10).truncate(d.order()));
    }

    #[test]
    fn display_order() {
        let f = &(&e2() * &e2()) - &e4();
        assert_eq!(f.to_string(), "E2^2 - E4");
        assert_eq!(e4().scale(&qf(-1039, 600)).to_string(), "-1039/600*E4");
        assert_eq!(QuasiModularForm::zero(4).to_string(), "0");
    }

    #[test]
    fn json_shape() {
        let f = (&e2() * &e2()).scale(&qf(1, 2));
        let v = serde_json::to_value(&f).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"weight": 4, "monomials": [{"e2": 2, "e4": 0, "e6": 0, "y": 0, "coeff": "1/2"}]})
        );
        let back: QuasiModularForm = serde_json::from_value(v).unwrap();
        assert_eq!(back, f);
    }
}
