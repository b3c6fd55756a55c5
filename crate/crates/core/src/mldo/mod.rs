//! Modular linear differential operators `L = sum_r a_r D^r` of type
//! `(k, k + K)` with quasimodular coefficients `a_r` of weight `K - 2r`.

mod basis;
mod det;
mod structure;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmring::{QuasiModularForm as Form, SeriesTable};
use crate::qseries::FracPowerSeries;
use crate::rational::{binomial, binomial_int, format_q, parse_q, pochhammer, q, qf, Q};

pub use basis::BasisTag;
pub use det::{det_operator, DetVariant};
pub use structure::{dim_mldo, lambda_from_qmf, pair_braces, RcData};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mldo {
    k: Q,
    gain: u32,
    coeffs: Vec<Form>,
}

fn sign(n: u32) -> Q {
    if n % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

impl Mldo {
    /// Checks `weight(a_r) = K - 2r` and trims trailing zeros. Depth is not
    /// checked here; see [`Mldo::check_depth`].
    pub fn new(k: Q, gain: u32, coeffs: Vec<Form>) -> Result<Self> {
        if gain % 2 == 1 {
            return Err(Error::InvalidWeight(gain as i64, "operator weight must be even"));
        }
        let mut out = Vec::with_capacity(coeffs.len());
        for (r, a) in coeffs.into_iter().enumerate() {
            let want = gain as i64 - 2 * r as i64;
            if a.is_zero() {
                out.push(Form::zero(want.max(0) as u32));
                continue;
            }
            if a.weight() as i64 != want {
                return Err(Error::WeightMismatch(format!(
                    "coefficient of D^{r} has weight {}, expected {want}",
                    a.weight()
                )));
            }
            out.push(a);
        }
        while out.last().is_some_and(Form::is_zero) {
            out.pop();
        }
        Ok(Mldo {
            k,
            gain,
            coeffs: out,
        })
    }

    pub(crate) fn from_parts(k: Q, gain: u32, coeffs: Vec<Form>) -> Self {
        Self::new(k, gain, coeffs).expect("coefficient weights match by construction")
    }

    pub fn k(&self) -> &Q {
        &self.k
    }

    /// The weight `K`.
    pub fn gain(&self) -> u32 {
        self.gain
    }

    pub fn coeffs(&self) -> &[Form] {
        &self.coeffs
    }

    /// `a_r`, zero past the order.
    pub fn coeff(&self, r: usize) -> Form {
        self.coeffs
            .get(r)
            .cloned()
            .unwrap_or_else(|| Form::zero((self.gain as i64 - 2 * r as i64).max(0) as u32))
    }

    /// Largest `r` with `a_r != 0`; zero for the zero operator.
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `depth(a_r) <= n - r` for every `r`.
    pub fn check_depth(&self) -> Result<()> {
        let n = self.order() as u32;
        for (r, a) in self.coeffs.iter().enumerate() {
            if a.depth() > n - r as u32 {
                return Err(Error::DepthBound {
                    actual: a.depth(),
                    bound: n - r as u32,
                });
            }
        }
        Ok(())
    }

    pub fn zero(k: Q, gain: u32) -> Self {
        Mldo {
            k,
            gain,
            coeffs: Vec::new(),
        }
    }

    /// Multiplication by `g`.
    pub fn multiplication(k: Q, g: Form) -> Self {
        let gain = g.weight();
        Self::from_parts(k, gain, vec![g])
    }

    pub fn identity(k: Q) -> Self {
        Self::multiplication(k, Form::one())
    }

    /// `D^n`, as an operator of type `(k, k + 2n)`. Only modular for `n = 0`.
    pub fn d_power(k: Q, n: u32) -> Self {
        let mut coeffs: Vec<Form> = (0..n).map(|r| Form::zero(2 * (n - r))).collect();
        coeffs.push(Form::one());
        Self::from_parts(k, 2 * n, coeffs)
    }

    /// `D - (k/12) E2`.
    pub fn serre(k: Q) -> Self {
        let a0 = Form::e2().scale(&(-&k / q(12)));
        Self::from_parts(k, 2, vec![a0, Form::one()])
    }

    /// Iterated Serre derivative `d^n_k`.
    pub fn serre_iter(k: Q, n: u32) -> Self {
        let mut out = Self::identity(k.clone());
        for i in 0..n {
            out = Self::serre(&k + q(2 * i as i64))
                .compose(&out)
                .expect("types chain");
        }
        out
    }

    /// Canonical higher Serre derivative `d^[n]_k` from its closed form.
    pub fn vz(k: Q, n: u32) -> Self {
        let minus = Form::e2().scale(&qf(-1, 12));
        let coeffs = (0..=n)
            .map(|r| {
                let c = binomial_int(n, r) * pochhammer(&(&k + q(r as i64)), n - r);
                minus.pow(n - r).scale(&c)
            })
            .collect();
        Self::from_parts(k, 2 * n, coeffs)
    }

    /// Kaneko-Koike operator `K^n_k`.
    pub fn kk(k: Q, n: u32) -> Self {
        if n == 0 {
            return Self::identity(k);
        }
        let lead = -(&k + q(n as i64 - 1)) / q(12);
        let top = &k + q(n as i64 - 2);
        let mut coeffs = Vec::new();
        for j in 0..n {
            let i = n - 1 - j;
            let c = &lead * sign(i) * binomial_int(n, j) * binomial(&top, i);
            coeffs.push(Form::e2().derivative_n(i).scale(&c));
        }
        coeffs.push(Form::one());
        Self::from_parts(k, 2 * n, coeffs)
    }

    /// `f -> [f, g]_m` with weight indices `(k, lambda)`.
    pub fn rc_bracket_right(k: Q, g: &Form, lambda: &Q, m: u32) -> Self {
        let a = &k + q(m as i64 - 1);
        let b = lambda + q(m as i64 - 1);
        let coeffs = (0..=m)
            .map(|i| {
                let c = sign(i) * binomial(&a, m - i) * binomial(&b, i);
                g.derivative_n(m - i).scale(&c)
            })
            .collect();
        Self::from_parts(k, g.weight() + 2 * m, coeffs)
    }

    /// `f -> [h, f]_m` with weight indices `(lambda, k)`.
    pub fn rc_bracket_left(k: Q, h: &Form, lambda: &Q, m: u32) -> Self {
        let a = lambda + q(m as i64 - 1);
        let b = &k + q(m as i64 - 1);
        let coeffs = (0..=m)
            .map(|j| {
                let i = m - j;
                let c = sign(i) * binomial(&a, j) * binomial(&b, i);
                h.derivative_n(i).scale(&c)
            })
            .collect();
        Self::from_parts(k, h.weight() + 2 * m, coeffs)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.k != other.k {
            return Err(Error::WeightMismatch(format!(
                "operators on weights {} and {}",
                format_q(&self.k),
                format_q(&other.k)
            )));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.gain != other.gain {
            return Err(Error::MixedWeights(
                self.gain.to_string(),
                other.gain.to_string(),
            ));
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|r| &self.coeff(r) + &other.coeff(r))
            .collect();
        Self::new(self.k.clone(), self.gain, coeffs)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("operators of the same type")
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self::from_parts(
            self.k.clone(),
            self.gain,
            self.coeffs.iter().map(|a| a.scale(c)).collect(),
        )
    }

    /// Left multiplication by a form of weight `w`.
    pub fn mul_form(&self, g: &Form) -> Self {
        let gain = self.gain + g.weight();
        let coeffs = (0..self.coeffs.len()).map(|r| g * &self.coeff(r)).collect();
        Self::from_parts(self.k.clone(), gain, coeffs)
    }

    /// `self o inner`; requires `self.k = inner.k + inner.K`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if self.k != &inner.k + q(inner.gain as i64) {
            return Err(Error::WeightMismatch(format!(
                "outer operator acts on weight {}, inner produces {}",
                format_q(&self.k),
                format_q(&(&inner.k + q(inner.gain as i64)))
            )));
        }
        let gain = self.gain + inner.gain;
        let n = self.coeffs.len() + inner.coeffs.len();
        let mut coeffs: Vec<Form> = (0..n.max(1))
            .map(|r| Form::zero((gain as i64 - 2 * r as i64).max(0) as u32))
            .collect();
        for (s, b) in self.coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            for (r, a) in inner.coeffs.iter().enumerate() {
                let mut da = a.clone();
                for t in 0..=s {
                    if t > 0 {
                        da = da.derivative();
                    }
                    if da.is_zero() {
                        break;
                    }
                    let c = binomial_int(s as u32, t as u32);
                    let idx = r + s - t;
                    coeffs[idx] = &coeffs[idx] + &(b * &da).scale(&c);
                }
            }
        }
        Self::new(inner.k.clone(), gain, coeffs)
    }

    /// `sum_r a_r D^r F`.
    pub fn apply(&self, f: &Form) -> Form {
        let mut out = Form::zero(f.weight() + self.gain);
        let mut d = f.clone();
        for (r, a) in self.coeffs.iter().enumerate() {
            if r > 0 {
                d = d.derivative();
            }
            if !a.is_zero() {
                out = &out + &(a * &d);
            }
        }
        out
    }

    /// Applies the operator to a `q`-series, expanding coefficients far
    /// enough to keep the series' own precision.
    pub fn apply_series(&self, s: &FracPowerSeries) -> Result<FracPowerSeries> {
        let span = s.order() - s.valuation_bound();
        let n = span.ceil().to_integer();
        let n = num_traits::ToPrimitive::to_usize(&n).unwrap_or(0) + 1;
        self.apply_series_with(s, &mut SeriesTable::new(n))
    }

    pub fn apply_series_with(
        &self,
        s: &FracPowerSeries,
        table: &mut SeriesTable,
    ) -> Result<FracPowerSeries> {
        let mut out = FracPowerSeries::zero(s.order().clone());
        let mut d = s.clone();
        for (r, a) in self.coeffs.iter().enumerate() {
            if r > 0 {
                d = d.derive();
            }
            if a.is_zero() {
                continue;
            }
            let term = table.expand(a).mul(&d)?;
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Returns the first `(r, j)` where
    /// `delta^j a_r = (-1)^j (r+1)_j (k+r)_j a_{r+j}` fails.
    pub fn modularity_defect(&self) -> Option<(usize, usize)> {
        let n = self.coeffs.len();
        for (r, a) in self.coeffs.iter().enumerate() {
            let jmax = (a.depth() as usize).max(n - r);
            let mut lowered = a.clone();
            for j in 1..=jmax {
                lowered = lowered.lowering();
                let c = sign(j as u32)
                    * pochhammer(&q(r as i64 + 1), j as u32)
                    * pochhammer(&(&self.k + q(r as i64)), j as u32);
                let rhs = self.coeff(r + j).scale(&c);
                if lowered != rhs && !(lowered.is_zero() && rhs.is_zero()) {
                    return Some((r, j));
                }
            }
        }
        None
    }

    pub fn is_modular(&self) -> bool {
        self.modularity_defect().is_none()
    }

    pub fn ensure_modular(&self) -> Result<()> {
        match self.modularity_defect() {
            None => Ok(()),
            Some((r, j)) => Err(Error::NotModular { r, j }),
        }
    }

    /// The top coefficient `a_n`, modular of weight `K - 2n`.
    pub fn symbol(&self) -> Result<Form> {
        self.ensure_modular()?;
        Ok(self.coeff(self.order()))
    }

    /// Recovers the operator `sum_r (-1)^r delta^r F / (r! (k)_r) D^r`.
    pub fn from_qmf(f: &Form, k: Q) -> Result<Self> {
        let mut coeffs = Vec::new();
        let mut lowered = f.clone();
        for r in 0..=f.depth() {
            if r > 0 {
                lowered = lowered.lowering();
            }
            let p = pochhammer(&k, r);
            if p.is_zero() {
                return Err(Error::PochhammerZero(format!(
                    "({})_{r} vanishes",
                    format_q(&k)
                )));
            }
            let c = sign(r) / (crate::rational::factorial(r) * p);
            coeffs.push(lowered.scale(&c));
        }
        Self::new(k, f.weight(), coeffs)
    }

    /// The renormalized correspondence for integer `k`, dividing through by
    /// `(k-1)!`; reciprocal factorials of negative integers are zero.
    pub fn from_qmf_renormalized(f: &Form, k: i64) -> Result<Self> {
        let mut coeffs = Vec::new();
        let mut lowered = f.clone();
        for r in 0..=f.depth() {
            if r > 0 {
                lowered = lowered.lowering();
            }
            let c = sign(r) / crate::rational::factorial(r)
                * crate::rational::inv_factorial_signed(k + r as i64 - 1);
            coeffs.push(lowered.scale(&c));
        }
        Self::new(q(k), f.weight(), coeffs)
    }

    /// The quasimodular form `a_0` attached to the operator.
    pub fn to_qmf(&self) -> Form {
        self.coeff(0)
    }

    /// Indicial data `a_r(0)`: constant terms of the coefficient expansions.
    pub fn constant_terms(&self) -> Vec<Q> {
        self.coeffs.iter().map(Form::constant_term).collect()
    }
}

/// `l_from_qmf`.
pub fn l_from_qmf(f: &Form, k: &Q) -> Result<Mldo> {
    Mldo::from_qmf(f, k.clone())
}

/// `qmf_from_l`.
pub fn qmf_from_l(l: &Mldo) -> Form {
    l.to_qmf()
}

fn write_coeff(f: &mut fmt::Formatter<'_>, first: bool, a: &Form, d: &str) -> fmt::Result {
    let terms: Vec<_> = a.terms().iter().collect();
    if terms.len() == 1 && !d.is_empty() {
        let (e, c) = terms[0];
        let neg = c.is_negative();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { "-" } else { "+" })?;
        }
        let mono = Form::monomial(c.abs(), *e).to_string();
        if mono == "1" {
            write!(f, "{d}")
        } else {
            write!(f, "{mono}*{d}")
        }
    } else if d.is_empty() {
        let s = a.to_string();
        if first {
            write!(f, "{s}")
        } else if let Some(rest) = s.strip_prefix('-') {
            write!(f, " - {rest}")
        } else {
            write!(f, " + {s}")
        }
    } else {
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "({a})*{d}")
    }
}

impl fmt::Display for Mldo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (r, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let d = match r {
                0 => String::new(),
                1 => "D".to_string(),
                _ => format!("D^{r}"),
            };
            write_coeff(f, first, a, &d)?;
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MldoJson {
    k: String,
    #[serde(rename = "K")]
    gain: u32,
    coeffs: Vec<Form>,
}

impl Serialize for Mldo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MldoJson {
            k: format_q(&self.k),
            gain: self.gain,
            coeffs: self.coeffs.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mldo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = MldoJson::deserialize(d)?;
        let k = parse_q(&j.k).map_err(D::Error::custom)?;
        Mldo::new(k, j.gain, j.coeffs).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hsd;
    use crate::qmring::modular_basis;

    #[test]
    fn apply_basics() {
        let k = q(4);
        let e4 = Form::e4();
        assert_eq!(Mldo::identity(k.clone()).apply(&e4), e4);
        assert_eq!(Mldo::serre(k.clone()).apply(&e4), Form::e6().scale(&qf(-1, 3)));
    }

    #[test]
    fn operator_families_match_hsd() {
        for k in [qf(1, 5), q(4), q(7)] {
            for n in 0..5 {
                for f in [Form::e4(), &Form::e2() * &Form::e6(), Form::discriminant()] {
                    assert_eq!(Mldo::kk(k.clone(), n).apply(&f), hsd::kk(&k, n, &f));
                    assert_eq!(Mldo::vz(k.clone(), n).apply(&f), hsd::vz(&k, n, &f));
                    assert_eq!(
                        Mldo::serre_iter(k.clone(), n).apply(&f),
                        hsd::serre_iter(&k, n, &f)
                    );
                }
            }
        }
        let g = Form::e6();
        let r = Mldo::rc_bracket_right(q(4), &g, &q(6), 2);
        assert_eq!(r.apply(&Form::e4()), hsd::rc_bracket(&q(4), &q(6), 2, &Form::e4(), &g));
        let l = Mldo::rc_bracket_left(q(4), &g, &q(6), 3);
        assert_eq!(l.apply(&Form::e4()), hsd::rc_bracket(&q(6), &q(4), 3, &g, &Form::e4()));
    }

    #[test]
    fn modularity_checks() {
        for n in 0..5 {
            assert!(Mldo::kk(qf(1, 5), n).is_modular());
            assert!(Mldo::vz(q(3), n).is_modular());
            assert!(Mldo::serre_iter(q(3), n).is_modular());
        }
        let bad = Mldo::new(qf(1, 3), 4, vec![Form::zero(4), Form::e2()]).unwrap();
        assert_eq!(bad.modularity_defect(), Some((0, 1)));
        assert!(!Mldo::d_power(q(2), 1).is_modular());
    }

    #[test]
    fn symbols() {
        assert_eq!(Mldo::kk(q(3), 4).symbol().unwrap(), Form::one());
        let b = Mldo::rc_bracket_right(q(6), &Form::e4(), &q(4), 1);
        assert_eq!(b.symbol().unwrap(), Form::e4().scale(&q(-4)));
    }

    #[test]
    fn composition_applies() {
        let a = Mldo::kk(q(4), 2);
        let b = Mldo::vz(q(8), 1).mul_form(&Form::e4());
        let c = b.compose(&a).unwrap();
        assert!(c.is_modular());
        for f in modular_basis(4).unwrap() {
            assert_eq!(c.apply(&f), b.apply(&a.apply(&f)));
        }
        assert!(a.compose(&a).is_err());
    }

    #[test]
    fn qmf_correspondence() {
        let k = q(5);
        let l = Mldo::from_qmf(&Form::e2(), k.clone()).unwrap();
        assert_eq!(l, Mldo::serre(k.clone()).scale(&qf(-12, 5)));
        let f = Form::e2().scale(&qf(-1, 12)).pow(3);
        let l = Mldo::from_qmf(&f, k.clone()).unwrap();
        assert_eq!(l, Mldo::vz(k.clone(), 3).scale(&pochhammer(&k, 3).recip()));
        assert_eq!(l.to_qmf(), f);
        assert!(Mldo::from_qmf(&Form::e2(), q(0)).is_err());
        let r = Mldo::from_qmf_renormalized(&Form::e2(), 0).unwrap();
        assert_eq!(r.coeffs(), &[Form::zero(2), Form::constant(q(-12))]);
    }

    #[test]
    fn display_and_json() {
        let l = Mldo::kk(qf(1, 5), 2);
        assert_eq!(l.to_string(), "D^2 - 1/5*E2*D + 1/600*E2^2 - 1/600*E4");
        let v = serde_json::to_value(&l).unwrap();
        assert_eq!(v["k"], "1/5");
        assert_eq!(v["K"], 4);
        let back: Mldo = serde_json::from_value(v).unwrap();
        assert_eq!(back, l);
    }
}
