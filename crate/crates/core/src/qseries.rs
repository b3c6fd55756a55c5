//! Truncated power series in `q` with rational exponents.
//!
//! A [`FracPowerSeries`] stores `sum_j c_j q^(alpha + j/M)` for `j` below a
//! known truncation. Everything at or past `order` is unknown. Binary
//! operations refine both operands onto a common exponent lattice and refuse
//! lattices whose denominator would exceed [`DEFAULT_DENOMINATOR_BOUND`] (or
//! the bound passed to the `*_bounded` variants).

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, q, qf, to_f64, Q};

pub const DEFAULT_DENOMINATOR_BOUND: u64 = 120;

/// Evaluation refuses points with `|q|` above this.
pub const DEFAULT_EVAL_QBOUND: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracPowerSeries {
    alpha: Q,
    den: u64,
    coeffs: Vec<Q>,
    order: Q,
}

fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Number of lattice points `base + i/den` strictly below `order`.
fn lattice_len(base: &Q, den: u64, order: &Q) -> usize {
    let n = ceil_q(&((order - base) * q(den as i64)));
    if n.is_negative() {
        0
    } else {
        n.to_usize().expect("series length overflow")
    }
}

fn step_index(offset: &Q, den: u64) -> Option<usize> {
    let scaled = offset * q(den as i64);
    if !scaled.is_integer() || scaled.is_negative() {
        return None;
    }
    scaled.to_integer().to_usize()
}

impl FracPowerSeries {
    /// Builds `sum_j coeffs[j] q^(alpha + j/den)` known up to `alpha + len/den`.
    pub fn from_coeffs(alpha: Q, den: u64, coeffs: Vec<Q>) -> Self {
        assert!(den >= 1, "step denominator must be positive");
        let order = &alpha + qf(coeffs.len() as i64, den as i64);
        FracPowerSeries {
            alpha,
            den,
            coeffs,
            order,
        }
        .normalized()
    }

    /// Like [`from_coeffs`](Self::from_coeffs) but with an explicit order; the
    /// coefficient list is padded with zeros or cut to fit.
    pub fn with_order(alpha: Q, den: u64, mut coeffs: Vec<Q>, order: Q) -> Self {
        assert!(den >= 1, "step denominator must be positive");
        let len = lattice_len(&alpha, den, &order);
        coeffs.resize(len, Q::zero());
        let order = if len == 0 {
            order
        } else {
            &alpha + qf(len as i64, den as i64)
        };
        FracPowerSeries {
            alpha,
            den,
            coeffs,
            order,
        }
        .normalized()
    }

    /// The zero series known to vanish below `order`.
    pub fn zero(order: Q) -> Self {
        FracPowerSeries {
            alpha: Q::zero(),
            den: 1,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn monomial(c: Q, exponent: Q, order: Q) -> Self {
        let den = exponent.denom().to_u64().unwrap_or(1).max(1);
        Self::with_order(exponent, den, vec![c], order)
    }

    /// Constant `c` known to integer order `n` (coefficients of `q^0..q^(n-1)`).
    pub fn constant(c: Q, n: usize) -> Self {
        let mut v = vec![Q::zero(); n.max(1)];
        v[0] = c;
        Self::with_order(Q::zero(), 1, v, q(n as i64))
    }

    fn normalized(mut self) -> Self {
        let lead = self.coeffs.iter().position(|c| !c.is_zero());
        match lead {
            None => Self::zero(self.order),
            Some(0) => self,
            Some(i) => {
                self.coeffs.drain(..i);
                self.alpha += qf(i as i64, self.den as i64);
                self
            }
        }
    }

    pub fn alpha(&self) -> &Q {
        &self.alpha
    }

    pub fn step(&self) -> Q {
        qf(1, self.den as i64)
    }

    pub fn step_denominator(&self) -> u64 {
        self.den
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn order(&self) -> &Q {
        &self.order
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lower bound on the exponent of the first nonzero term.
    pub fn valuation_bound(&self) -> Q {
        if self.is_zero() {
            self.order.clone()
        } else {
            self.alpha.clone()
        }
    }

    pub fn leading(&self) -> Option<(&Q, &Q)> {
        self.coeffs.first().map(|c| (&self.alpha, c))
    }

    /// Coefficient of `q^e`; `None` once `e` reaches the truncation order.
    pub fn coeff_at(&self, e: &Q) -> Option<Q> {
        if e >= &self.order {
            return None;
        }
        if self.is_zero() || e < &self.alpha {
            return Some(Q::zero());
        }
        Some(
            step_index(&(e - &self.alpha), self.den)
                .and_then(|i| self.coeffs.get(i).cloned())
                .unwrap_or_else(Q::zero),
        )
    }

    /// Nonzero terms as `(exponent, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (Q, &Q)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (&self.alpha + qf(i as i64, self.den as i64), c))
    }

    /// Dense coefficients on the lattice `base + i/den` below `order`.
    fn aligned(&self, base: &Q, den: u64, order: &Q) -> Vec<Q> {
        let len = lattice_len(base, den, order);
        let mut out = vec![Q::zero(); len];
        if self.is_zero() {
            return out;
        }
        let start = step_index(&(&self.alpha - base), den).expect("series not on target lattice");
        let spread = (den / self.den) as usize;
        for (j, c) in self.coeffs.iter().enumerate() {
            let idx = start + j * spread;
            if idx >= len {
                break;
            }
            out[idx] = c.clone();
        }
        out
    }

    fn common_den(&self, other: &Self, bound: u64) -> Result<u64> {
        let mut m = 1u64;
        if !self.is_zero() {
            m = m.lcm(&self.den);
        }
        if !other.is_zero() {
            m = m.lcm(&other.den);
        }
        if !self.is_zero() && !other.is_zero() {
            let d = (&self.alpha - &other.alpha)
                .denom()
                .to_u64()
                .unwrap_or(u64::MAX);
            m = m.lcm(&d);
        }
        if m > bound {
            return Err(Error::StepIncompatible(
                self.describe_lattice(),
                other.describe_lattice(),
                bound,
            ));
        }
        Ok(m)
    }

    fn describe_lattice(&self) -> String {
        format!("q^({})*Z[q^(1/{})]", format_q(&self.alpha), self.den)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.add_bounded(other, DEFAULT_DENOMINATOR_BOUND)
    }

    pub fn add_bounded(&self, other: &Self, bound: u64) -> Result<Self> {
        let order = (&self.order).min(&other.order).clone();
        if other.is_zero() {
            return Ok(self.truncate(&order));
        }
        if self.is_zero() {
            return Ok(other.truncate(&order));
        }
        let den = self.common_den(other, bound)?;
        let base = (&self.alpha).min(&other.alpha).clone();
        let mut a = self.aligned(&base, den, &order);
        let b = other.aligned(&base, den, &order);
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        Ok(Self::with_order(base, den, a, order))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.order.clone());
        }
        FracPowerSeries {
            alpha: self.alpha.clone(),
            den: self.den,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            order: self.order.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_bounded(other, DEFAULT_DENOMINATOR_BOUND)
    }

    pub fn mul_bounded(&self, other: &Self, bound: u64) -> Result<Self> {
        let va = self.valuation_bound();
        let vb = other.valuation_bound();
        let order = (&va + &other.order).min(&vb + &self.order);
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(order));
        }
        let den = self.den.lcm(&other.den);
        if den > bound {
            return Err(Error::StepIncompatible(
                self.describe_lattice(),
                other.describe_lattice(),
                bound,
            ));
        }
        let alpha = &self.alpha + &other.alpha;
        let len = lattice_len(&alpha, den, &order);
        let sa = (den / self.den) as usize;
        let sb = (den / other.den) as usize;
        let mut out = vec![Q::zero(); len];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let bi = i * sa;
            if bi >= len {
                break;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                let idx = bi + j * sb;
                if idx >= len {
                    break;
                }
                if !y.is_zero() {
                    out[idx] += x * y;
                }
            }
        }
        Ok(Self::with_order(alpha, den, out, order))
    }

    /// Multiplication by `q^beta`.
    pub fn shift(&self, beta: &Q) -> Self {
        if self.is_zero() {
            return Self::zero(&self.order + beta);
        }
        let mut out = self.clone();
        out.alpha += beta;
        out.order += beta;
        out
    }

    /// Forget everything at or beyond `order`.
    pub fn truncate(&self, order: &Q) -> Self {
        if order >= &self.order {
            return self.clone();
        }
        if self.is_zero() {
            return Self::zero(order.clone());
        }
        Self::with_order(self.alpha.clone(), self.den, self.coeffs.clone(), order.clone())
    }

    /// `D = q d/dq`.
    pub fn derive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c * (&self.alpha + qf(j as i64, self.den as i64)))
            .collect();
        FracPowerSeries {
            alpha: self.alpha.clone(),
            den: self.den,
            coeffs,
            order: self.order.clone(),
        }
        .normalized()
    }

    pub fn derive_n(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.derive())
    }

    /// Multiplicative inverse; the relative precision is preserved.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument(
                "cannot invert a series with no known nonzero term".into(),
            ));
        }
        let c0inv = self.coeffs[0].recip();
        let n = self.coeffs.len();
        let mut b = Vec::with_capacity(n);
        b.push(c0inv.clone());
        for m in 1..n {
            let mut acc = Q::zero();
            for i in 1..=m {
                if !self.coeffs[i].is_zero() {
                    acc += &self.coeffs[i] * &b[m - i];
                }
            }
            b.push(-acc * &c0inv);
        }
        Ok(Self::from_coeffs(-&self.alpha, self.den, b))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.inverse()?)
    }

    /// `exp(f)` for `f` with positive valuation on an integral-offset lattice.
    pub fn exp(&self) -> Result<Self> {
        if self.order <= Q::zero() {
            return Err(Error::InsufficientTruncation(
                "exp needs a series known beyond q^0".into(),
            ));
        }
        if !self.is_zero() && self.alpha <= Q::zero() {
            return Err(Error::InvalidArgument(
                "exp requires positive valuation".into(),
            ));
        }
        let den = self.den;
        let f = self.aligned(&Q::zero(), den, &self.order);
        let n = f.len();
        let mut g = Vec::with_capacity(n);
        g.push(Q::one());
        for m in 1..n {
            let mut acc = Q::zero();
            for j in 1..=m {
                if !f[j].is_zero() {
                    acc += &f[j] * &g[m - j] * q(j as i64);
                }
            }
            g.push(acc / q(m as i64));
        }
        Ok(Self::with_order(Q::zero(), den, g, self.order.clone()))
    }

    /// `log(g)` for `g = 1 + O(q^s)`.
    pub fn log(&self) -> Result<Self> {
        if self.alpha != Q::zero() || self.coeffs.first() != Some(&Q::one()) {
            return Err(Error::InvalidArgument(
                "log requires constant term 1 at exponent 0".into(),
            ));
        }
        let g = &self.coeffs;
        let n = g.len();
        let mut l: Vec<Q> = vec![Q::zero(); n];
        for m in 1..n {
            let mut acc = &g[m] * q(m as i64);
            for j in 1..m {
                if !l[j].is_zero() && !g[m - j].is_zero() {
                    acc -= &l[j] * &g[m - j] * q(j as i64);
                }
            }
            l[m] = acc / q(m as i64);
        }
        Ok(Self::with_order(Q::zero(), self.den, l, self.order.clone()))
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: i64) -> Result<Self> {
        if n < 0 {
            return self.inverse()?.powi(-n);
        }
        if n == 0 {
            let rel = &self.order - self.valuation_bound();
            return Ok(Self::with_order(Q::zero(), self.den, vec![Q::one()], rel));
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc.expect("n > 0"))
    }

    /// `x^r` for rational `r`, defined through `exp(r log)` when the leading
    /// coefficient is 1.
    pub fn pow_rational(&self, r: &Q) -> Result<Self> {
        if r.is_integer() {
            let n = r.to_integer().to_i64().ok_or_else(|| {
                Error::InvalidArgument("exponent too large".into())
            })?;
            return self.powi(n);
        }
        let Some((alpha, c)) = self.leading() else {
            return Err(Error::InvalidArgument(
                "fractional power of an unknown-zero series".into(),
            ));
        };
        if !c.is_one() {
            return Err(Error::InvalidArgument(
                "fractional powers need leading coefficient 1".into(),
            ));
        }
        let alpha = alpha.clone();
        let unit = self.shift(&-&alpha);
        let l = unit.log()?.scale(r);
        let body = if l.is_zero() {
            Self::with_order(Q::zero(), unit.den, vec![Q::one()], l.order().clone())
        } else {
            l.exp()?
        };
        Ok(body.shift(&(r * alpha)))
    }

    /// Whether every known coefficient vanishes.
    pub fn vanishes(&self) -> bool {
        self.is_zero()
    }

    /// Partial sum at `q = exp(2 pi i tau)`.
    pub fn eval_complex(&self, tau: Complex64) -> Result<Complex64> {
        self.eval_complex_bounded(tau, DEFAULT_EVAL_QBOUND)
    }

    pub fn eval_complex_bounded(&self, tau: Complex64, qbound: f64) -> Result<Complex64> {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let qabs = (-2.0 * std::f64::consts::PI * tau.im).exp();
        if qabs > qbound {
            return Err(Error::EvalThreshold(qabs, qbound));
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (e, c) in self.terms() {
            sum += (two_pi_i * tau * to_f64(&e)).exp() * to_f64(c);
        }
        Ok(sum)
    }
}

impl fmt::Display for FracPowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
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
            let qpart = if e.is_zero() {
                String::new()
            } else if e.is_one() {
                "q".to_string()
            } else if e.is_integer() && !e.is_negative() {
                format!("q^{}", format_q(&e))
            } else {
                format!("q^({})", format_q(&e))
            };
            if qpart.is_empty() {
                write!(f, "{}", format_q(&a))?;
            } else if a.is_one() {
                write!(f, "{qpart}")?;
            } else {
                write!(f, "{}*{qpart}", format_q(&a))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^({}))", format_q(&self.order))
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    alpha: String,
    step: String,
    coeffs: Vec<String>,
    order: String,
}

impl Serialize for FracPowerSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            alpha: format_q(&self.alpha),
            step: format_q(&self.step()),
            coeffs: self.coeffs.iter().map(format_q).collect(),
            order: format_q(&self.order),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FracPowerSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = SeriesJson::deserialize(d)?;
        let alpha = parse_q(&j.alpha).map_err(D::Error::custom)?;
        let step = parse_q(&j.step).map_err(D::Error::custom)?;
        if !step.numer().is_one() || !step.is_positive() {
            return Err(D::Error::custom("step must be 1/M with M positive"));
        }
        let den = step
            .denom()
            .to_u64()
            .ok_or_else(|| D::Error::custom("step denominator too large"))?;
        let coeffs = j
            .coeffs
            .iter()
            .map(|c| parse_q(c))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        let order = parse_q(&j.order).map_err(D::Error::custom)?;
        if coeffs.is_empty() {
            return Ok(FracPowerSeries::zero(order));
        }
        Ok(FracPowerSeries::with_order(alpha, den, coeffs, order))
    }
}

// ---------------------------------------------------------------------------
// generators

pub fn sigma(k: u32, n: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            s += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                s += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    s
}

/// Bernoulli numbers `B_0..B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Vec<Q> {
    let mut b = vec![Q::zero(); n + 1];
    b[0] = Q::one();
    for m in 1..=n {
        let mut acc = Q::zero();
        for (k, bk) in b.iter().enumerate().take(m) {
            acc += crate::rational::binomial_int(m as u32 + 1, k as u32) * bk;
        }
        b[m] = -acc / q(m as i64 + 1);
    }
    b
}

fn divisor_series(constant: Q, scale: Q, k: u32, n: usize) -> FracPowerSeries {
    let mut c = Vec::with_capacity(n + 1);
    c.push(constant);
    for m in 1..=n {
        c.push(&scale * Q::from_integer(sigma(k, m as u64)));
    }
    FracPowerSeries::from_coeffs(Q::zero(), 1, c)
}

/// `E_k` with coefficients through `q^n`. `E8` and `E10` are returned as the
/// products `E4^2` and `E4 E6`.
pub fn eisenstein(k: u32, n: usize) -> Result<FracPowerSeries> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::InvalidWeight(k as i64, "Eisenstein series need even k >= 2"));
    }
    Ok(match k {
        2 => divisor_series(Q::one(), q(-24), 1, n),
        4 => divisor_series(Q::one(), q(240), 3, n),
        6 => divisor_series(Q::one(), q(-504), 5, n),
        8 => eisenstein(4, n)?.mul(&eisenstein(4, n)?)?,
        10 => eisenstein(4, n)?.mul(&eisenstein(6, n)?)?,
        _ => eisenstein_bernoulli(k, n),
    })
}

/// `E_k = 1 - (2k/B_k) sum sigma_(k-1)(n) q^n` for any even `k >= 2`.
pub fn eisenstein_bernoulli(k: u32, n: usize) -> FracPowerSeries {
    let b = bernoulli(k as usize);
    let scale = -q(2 * k as i64) / &b[k as usize];
    divisor_series(Q::one(), scale, k - 1, n)
}

/// `prod_{m>=1} (1 - q^m)` through `q^n`, as integers.
fn euler_product(n: usize) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(); n + 1];
    p[0] = BigInt::one();
    for m in 1..=n {
        for j in (m..=n).rev() {
            let t = p[j - m].clone();
            p[j] -= t;
        }
    }
    p
}

fn int_series(alpha: Q, den: u64, v: Vec<BigInt>) -> FracPowerSeries {
    FracPowerSeries::from_coeffs(alpha, den, v.into_iter().map(Q::from_integer).collect())
}

/// `q prod (1-q^m)^24` through `q^n`.
pub fn delta(n: usize) -> FracPowerSeries {
    let len = n.max(1);
    let e = euler_product(len);
    let mut acc = vec![BigInt::zero(); len];
    acc[0] = BigInt::one();
    for _ in 0..24 {
        let mut next = vec![BigInt::zero(); len];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in e.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    next[i + j] += a * b;
                }
            }
        }
        acc = next;
    }
    // exponents 1..=n
    int_series(Q::one(), 1, acc)
}

/// `eta^r = q^(r/24) prod (1-q^m)^r` with the product known through `q^n`.
pub fn eta_pow(r: &Q, n: usize) -> FracPowerSeries {
    // log prod (1-q^m) = -sum sigma(N)/N q^N
    let mut l = vec![Q::zero(); n + 1];
    for (m, slot) in l.iter_mut().enumerate().skip(1) {
        *slot = -Q::new(sigma(1, m as u64), BigInt::from(m)) * r;
    }
    let body = FracPowerSeries::from_coeffs(Q::zero(), 1, l)
        .exp()
        .expect("exp of positive-valuation series");
    body.shift(&(r / q(24)))
}

/// Theta constants: `j = 2, 3, 4` for `sum q^((n+1/2)^2/2)`, `sum q^(n^2/2)`
/// and `sum (-1)^n q^(n^2/2)`. All exponents up to `n` past the base are known.
pub fn theta(j: u32, n: usize) -> Result<FracPowerSeries> {
    match j {
        2 => {
            // 2 q^(1/8) sum_{m>=0} q^(m(m+1)/2)
            let mut c = vec![Q::zero(); n + 1];
            let mut m = 0usize;
            while m * (m + 1) / 2 <= n {
                c[m * (m + 1) / 2] = q(2);
                m += 1;
            }
            Ok(FracPowerSeries::from_coeffs(qf(1, 8), 1, c))
        }
        3 | 4 => {
            let mut c = vec![Q::zero(); 2 * n + 1];
            c[0] = Q::one();
            let mut m = 1usize;
            while m * m <= 2 * n {
                let sign = if j == 4 && m % 2 == 1 { -2 } else { 2 };
                c[m * m] = q(sign);
                m += 1;
            }
            Ok(FracPowerSeries::from_coeffs(Q::zero(), 2, c))
        }
        _ => Err(Error::InvalidArgument(format!("no theta constant with index {j}"))),
    }
}

/// `sum_m q^(m^2 + i m) / ((1-q)...(1-q^m))` for `i = 0, 1`, through `q^n`.
pub fn rogers_ramanujan_sum(i: u32, n: usize) -> Result<FracPowerSeries> {
    if i > 1 {
        return Err(Error::InvalidArgument(format!("no Rogers-Ramanujan sum {i}")));
    }
    let mut total = vec![BigInt::zero(); n + 1];
    let mut m = 0usize;
    while m * m + i as usize * m <= n {
        let start = m * m + i as usize * m;
        let mut p = vec![BigInt::zero(); n + 1];
        p[start] = BigInt::one();
        for d in 1..=m {
            for j in d..=n {
                let t = p[j - d].clone();
                p[j] += t;
            }
        }
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
        m += 1;
    }
    Ok(int_series(Q::zero(), 1, total))
}

/// The Rogers-Ramanujan functions with their `q^(-1/60)` and `q^(11/60)`
/// prefactors.
pub fn rogers_ramanujan(i: u32, n: usize) -> Result<FracPowerSeries> {
    let shift = if i == 0 { qf(-1, 60) } else { qf(11, 60) };
    Ok(rogers_ramanujan_sum(i, n)?.shift(&shift))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn difference_of_squares() {
        let a = FracPowerSeries::from_coeffs(q(0), 1, ints(&[1, 1, 0, 0]));
        let b = FracPowerSeries::from_coeffs(q(0), 1, ints(&[1, -1, 0, 0]));
        let p = a.mul(&b).unwrap();
        assert_eq!(p.coeffs(), &ints(&[1, 0, -1, 0])[..]);
        assert_eq!(p.order(), &q(4));
    }

    #[test]
    fn exponent_alignment() {
        let a = FracPowerSeries::monomial(q(2), qf(1, 8), q(2));
        let b = FracPowerSeries::monomial(q(1), qf(1, 2), q(2));
        let s = a.add(&b).unwrap();
        assert_eq!(s.step(), qf(1, 8));
        assert_eq!(s.alpha(), &qf(1, 8));
        assert_eq!(s.coeff_at(&qf(1, 8)), Some(q(2)));
        assert_eq!(s.coeff_at(&qf(1, 2)), Some(q(1)));
        assert_eq!(s.terms().count(), 2);
    }

    #[test]
    fn step_bound_is_enforced() {
        let a = FracPowerSeries::monomial(q(1), qf(1, 7), q(1));
        let b = FracPowerSeries::monomial(q(1), qf(1, 11), q(1));
        assert!(a.add_bounded(&b, 60).is_err());
        assert!(a.add_bounded(&b, 77).is_ok());
        assert!(matches!(a.add(&b), Ok(_)));
        let c = FracPowerSeries::monomial(q(1), qf(1, 121), q(1));
        assert!(matches!(a.add(&c), Err(Error::StepIncompatible(..))));
    }

    #[test]
    fn empty_overlap_gives_flagged_zero() {
        let a = FracPowerSeries::monomial(q(1), q(5), q(6));
        let b = FracPowerSeries::constant(q(1), 3);
        let s = a.add(&b).unwrap();
        assert_eq!(s.order(), &q(3));
        assert_eq!(s.coeffs(), &ints(&[1, 0, 0])[..]);
        let z = a.truncate(&q(4));
        assert!(z.is_zero());
        assert_eq!(z.order(), &q(4));
    }

    #[test]
    fn derivative_rules() {
        let m = FracPowerSeries::monomial(q(1), qf(1, 5), q(2));
        assert_eq!(m.derive().coeff_at(&qf(1, 5)), Some(qf(1, 5)));
        assert!(FracPowerSeries::constant(q(1), 5).derive().is_zero());
        let e2 = eisenstein(2, 3).unwrap();
        let d = e2.derive();
        assert_eq!(d.coeff_at(&q(1)), Some(q(-24)));
        assert_eq!(d.coeff_at(&q(2)), Some(q(-144)));
        assert_eq!(d.coeff_at(&q(3)), Some(q(-288)));
    }

    #[test]
    fn eisenstein_examples() {
        assert_eq!(eisenstein(2, 3).unwrap().coeffs(), &ints(&[1, -24, -72, -96])[..]);
        assert_eq!(eisenstein(4, 2).unwrap().coeffs(), &ints(&[1, 240, 2160])[..]);
        assert_eq!(eisenstein(6, 1).unwrap().coeffs(), &ints(&[1, -504])[..]);
        assert!(eisenstein(3, 5).is_err());
        assert!(eisenstein(0, 5).is_err());
    }

    #[test]
    fn products_match_bernoulli_eisenstein() {
        for k in [4u32, 6, 8, 10] {
            assert_eq!(eisenstein(k, 30).unwrap(), eisenstein_bernoulli(k, 30), "k = {k}");
        }
        assert_eq!(eisenstein(2, 20).unwrap(), eisenstein_bernoulli(2, 20));
    }

    #[test]
    fn delta_expansion() {
        let d = delta(3);
        assert_eq!(d.coeffs(), &ints(&[1, -24, 252])[..]);
        assert_eq!(d.alpha(), &q(1));
        let scaled = d.scale(&q(1728));
        assert_eq!(scaled.coeffs(), &ints(&[1728, -41472, 435456])[..]);
    }

    #[test]
    fn delta_from_eisenstein() {
        let n = 50;
        let e4 = eisenstein(4, n).unwrap();
        let e6 = eisenstein(6, n).unwrap();
        let d = e4
            .powi(3)
            .unwrap()
            .sub(&e6.mul(&e6).unwrap())
            .unwrap()
            .scale(&qf(1, 1728));
        assert_eq!(d, delta(n).truncate(d.order()));
        assert_eq!(d.order(), &q(51));
    }

    #[test]
    fn eta_24_is_delta() {
        let e = eta_pow(&q(24), 30);
        let d = delta(30);
        assert_eq!(e.truncate(d.order()), d);
    }

    #[test]
    fn theta3_direct() {
        let t = theta(3, 5).unwrap();
        let first: Vec<_> = t.terms().take(4).map(|(e, c)| (e, c.clone())).collect();
        assert_eq!(
            first,
            vec![(q(0), q(1)), (qf(1, 2), q(2)), (q(2), q(2)), (qf(9, 2), q(2))]
        );
    }

    #[test]
    fn jacobi_identity() {
        let n = 20;
        let t2 = theta(2, n).unwrap().powi(4).unwrap();
        let t3 = theta(3, n).unwrap().powi(4).unwrap();
        let t4 = theta(4, n).unwrap().powi(4).unwrap();
        let lhs = t3.sub(&t2.add(&t4).unwrap()).unwrap();
        assert!(lhs.is_zero());
        assert!(lhs.order() >= &q(20));
    }

    #[test]
    fn inverse_roundtrip() {
        let e4 = eisenstein(4, 15).unwrap();
        let p = e4.mul(&e4.inverse().unwrap()).unwrap();
        assert_eq!(p, FracPowerSeries::constant(q(1), 16));
    }

    #[test]
    fn log_exp_roundtrip() {
        let e4 = eisenstein(4, 12).unwrap();
        let back = e4.log().unwrap().exp().unwrap();
        assert_eq!(back, e4);
    }

    #[test]
    fn fractional_power() {
        let e4 = eisenstein(4, 10).unwrap();
        let r = e4.pow_rational(&qf(1, 3)).unwrap();
        assert_eq!(r.powi(3).unwrap(), e4.truncate(r.order()));
        assert!(e4.scale(&q(2)).pow_rational(&qf(1, 2)).is_err());
    }

    #[test]
    fn rogers_ramanujan_sums() {
        // sum q^{n^2}/(q)_n = 1 + q + q^2 + q^3 + 2q^4 + 2q^5 + 3q^6
        let g = rogers_ramanujan_sum(0, 6).unwrap();
        assert_eq!(g.coeffs(), &ints(&[1, 1, 1, 1, 2, 2, 3])[..]);
        // sum q^{n^2+n}/(q)_n = 1 + q^2 + q^3 + q^4 + q^5 + 2q^6
        let h = rogers_ramanujan_sum(1, 6).unwrap();
        assert_eq!(h.coeffs(), &ints(&[1, 0, 1, 1, 1, 1, 2])[..]);
        assert_eq!(rogers_ramanujan(1, 6).unwrap().alpha(), &qf(11, 60));
    }

    #[test]
    fn eval_e2_at_i() {
        let e2 = eisenstein(2, 40).unwrap();
        let v = e2.eval_complex(Complex64::new(0.0, 1.0)).unwrap();
        assert!((v.re - 3.0 / std::f64::consts::PI).abs() < 1e-10);
        assert!(v.im.abs() < 1e-12);
        let one = FracPowerSeries::constant(q(1), 1);
        assert_eq!(one.eval_complex(Complex64::new(0.0, 1.0)).unwrap(), Complex64::new(1.0, 0.0));
        assert!(e2.eval_complex(Complex64::new(0.0, 0.5)).is_err());
    }

    #[test]
    fn eval_delta_leading_term() {
        let d = delta(20);
        let v = d.eval_complex(Complex64::new(0.0, 2.0)).unwrap();
        let x = (-4.0 * std::f64::consts::PI).exp();
        assert!((v.re / x - (1.0 - 24.0 * x)).abs() < 1e-8);
    }

    #[test]
    fn json_shape() {
        let s = FracPowerSeries::from_coeffs(qf(1, 8), 2, vec![q(2), qf(-1, 3)]);
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"alpha": "1/8", "step": "1/2", "coeffs": ["2", "-1/3"], "order": "9/8"})
        );
        let back: FracPowerSeries = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }
}
