//! Almost holomorphic forms: polynomials in `E2, E4, E6` and `Y`, where `Y`
//! stands for `1/(2 pi i (tau - conj(tau)))` and has weight 2.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{write_polynomial, FormJson, MonomialJson, QuasiModularForm};
use crate::error::{Error, Result};
use crate::rational::{factorial, format_q, parse_q, pochhammer, q, Q};

/// Exponents of `E2`, `E4`, `E6`, `Y`.
pub type HatExponents = [u32; 4];

fn hat_weight(e: &HatExponents) -> u32 {
    2 * e[0] + 4 * e[1] + 6 * e[2] + 2 * e[3]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlmostHolForm {
    weight: u32,
    terms: BTreeMap<HatExponents, Q>,
}

/// Result of the hatted projection; `degenerate` marks weight 2 inputs with
/// positive `Y`-degree, which have no holomorphic target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HatProjection {
    pub form: AlmostHolForm,
    pub degenerate: bool,
}

impl AlmostHolForm {
    pub fn zero(weight: u32) -> Self {
        AlmostHolForm {
            weight,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(c: Q, e: HatExponents) -> Self {
        let mut out = Self::zero(hat_weight(&e));
        out.add_term(e, c);
        out
    }

    pub fn y() -> Self {
        Self::monomial(Q::one(), [0, 0, 0, 1])
    }

    pub fn from_terms<I>(weight: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (HatExponents, Q)>,
    {
        let mut out = Self::zero(weight);
        for (e, c) in terms {
            let w = hat_weight(&e);
            if w != weight {
                return Err(Error::MixedWeights(weight.to_string(), w.to_string()));
            }
            out.add_term(e, c);
        }
        Ok(out)
    }

    /// Embeds a quasimodular form without substituting anything.
    pub fn from_form(f: &QuasiModularForm) -> Self {
        let mut out = Self::zero(f.weight());
        for (e, c) in f.terms() {
            out.add_term([e[0], e[1], e[2], 0], c.clone());
        }
        out
    }

    fn add_term(&mut self, e: HatExponents, c: Q) {
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

    pub fn terms(&self) -> &BTreeMap<HatExponents, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn y_degree(&self) -> u32 {
        self.terms.keys().map(|e| e[3]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.weight);
        for (e, x) in &self.terms {
            out.add_term(*e, x * c);
        }
        out
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.weight != other.weight && !self.is_zero() && !other.is_zero() {
            return Err(Error::MixedWeights(
                self.weight.to_string(),
                other.weight.to_string(),
            ));
        }
        let mut out = if self.is_zero() {
            Self::zero(other.weight)
        } else {
            self.clone()
        };
        if self.is_zero() {
            out.terms = other.terms.clone();
        } else {
            for (e, c) in &other.terms {
                out.add_term(*e, c.clone());
            }
        }
        Ok(out)
    }

    /// `Y = 0`.
    pub fn constant_term(&self) -> QuasiModularForm {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[3] == 0)
            .map(|(e, c)| ([e[0], e[1], e[2]], c.clone()));
        QuasiModularForm::from_terms(self.weight, terms).expect("homogeneous")
    }

    /// Coefficient of `Y^d` as a quasimodular form.
    pub fn y_coefficient(&self, d: u32) -> QuasiModularForm {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[3] == d)
            .map(|(e, c)| ([e[0], e[1], e[2]], c.clone()));
        QuasiModularForm::from_terms(self.weight.saturating_sub(2 * d), terms)
            .expect("homogeneous")
    }

    /// Hatted derivative: `D(h Y^d) = D(h) Y^d + (w + d) h Y^(d+1)` with `w`
    /// the weight of `h`.
    pub fn derivative_hat(&self) -> Self {
        let mut out = Self::zero(self.weight + 2);
        for (e, c) in &self.terms {
            let d = e[3];
            let h = QuasiModularForm::monomial(c.clone(), [e[0], e[1], e[2]]);
            for (f, x) in h.derivative().terms() {
                out.add_term([f[0], f[1], f[2], d], x.clone());
            }
            let w = h.weight();
            out.add_term([e[0], e[1], e[2], d + 1], c * q((w + d) as i64));
        }
        out
    }

    pub fn derivative_hat_n(&self, n: u32) -> Self {
        (0..n).fold(self.clone(), |f, _| f.derivative_hat())
    }

    /// `d/dY`.
    pub fn lowering_hat(&self) -> Self {
        let mut out = Self::zero(self.weight.saturating_sub(2));
        for (e, c) in &self.terms {
            if e[3] > 0 {
                out.add_term([e[0], e[1], e[2], e[3] - 1], c * q(e[3] as i64));
            }
        }
        out
    }

    pub fn weight_hat(&self) -> Self {
        self.scale(&q(self.weight as i64))
    }

    /// The projection with hatted operators in place of `D` and the lowering
    /// operator.
    pub fn projection_hat(&self) -> HatProjection {
        let k = self.weight;
        if k == 2 {
            if self.y_degree() > 0 {
                return HatProjection {
                    form: Self::zero(2),
                    degenerate: true,
                };
            }
            let p = self.constant_term().primitive_projection();
            return HatProjection {
                form: Self::from_form(&p),
                degenerate: false,
            };
        }
        let mut out = Self::zero(k);
        let mut lowered = self.clone();
        for m in 0..=self.y_degree() {
            if m > 0 {
                lowered = lowered.lowering_hat();
            }
            if lowered.is_zero() {
                break;
            }
            let denom = factorial(m) * pochhammer(&q(k as i64 - m as i64 - 1), m);
            let sign = if m % 2 == 0 { Q::one() } else { -Q::one() };
            out = &out + &lowered.derivative_hat_n(m).scale(&(sign / denom));
        }
        HatProjection {
            form: out,
            degenerate: false,
        }
    }
}

impl QuasiModularForm {
    /// Substitutes `E2 -> E2 + 12 Y`.
    pub fn completion(&self) -> AlmostHolForm {
        let shifted = &AlmostHolForm::from_form(&QuasiModularForm::e2())
            + &AlmostHolForm::y().scale(&q(12));
        let e4 = AlmostHolForm::from_form(&QuasiModularForm::e4());
        let e6 = AlmostHolForm::from_form(&QuasiModularForm::e6());
        let mut out = AlmostHolForm::zero(self.weight());
        for (e, c) in self.terms() {
            let mut m = AlmostHolForm::monomial(c.clone(), [0, 0, 0, 0]);
            for _ in 0..e[0] {
                m = &m * &shifted;
            }
            for _ in 0..e[1] {
                m = &m * &e4;
            }
            for _ in 0..e[2] {
                m = &m * &e6;
            }
            out = &out + &m;
        }
        out
    }
}

impl<'a> Add<&'a AlmostHolForm> for &'a AlmostHolForm {
    type Output = AlmostHolForm;
    fn add(self, other: &AlmostHolForm) -> AlmostHolForm {
        self.try_add(other).expect("adding forms of different weights")
    }
}

impl<'a> Sub<&'a AlmostHolForm> for &'a AlmostHolForm {
    type Output = AlmostHolForm;
    fn sub(self, other: &AlmostHolForm) -> AlmostHolForm {
        self.try_add(&other.scale(&-Q::one()))
            .expect("subtracting forms of different weights")
    }
}

impl<'a> Mul<&'a AlmostHolForm> for &'a AlmostHolForm {
    type Output = AlmostHolForm;
    fn mul(self, other: &AlmostHolForm) -> AlmostHolForm {
        let mut out = AlmostHolForm::zero(self.weight + other.weight);
        for (e, x) in &self.terms {
            for (f, y) in &other.terms {
                out.add_term(
                    [e[0] + f[0], e[1] + f[1], e[2] + f[2], e[3] + f[3]],
                    x * y,
                );
            }
        }
        out
    }
}

impl fmt::Display for AlmostHolForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_polynomial(
            f,
            &["E2", "E4", "E6", "Y"],
            self.terms.iter().rev().map(|(e, c)| (&e[..], c)),
        )
    }
}

impl Serialize for AlmostHolForm {
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
                    y: e[3],
                    coeff: format_q(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlmostHolForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = FormJson::deserialize(d)?;
        let mut terms = Vec::new();
        for m in j.monomials {
            terms.push((
                [m.e2, m.e4, m.e6, m.y],
                parse_q(&m.coeff).map_err(D::Error::custom)?,
            ));
        }
        AlmostHolForm::from_terms(j.weight, terms).map_err(D::Error::custom)
    }
}
