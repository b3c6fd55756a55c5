//! Solving `L f = 0` at the level of `q`-series.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mldo::Mldo;
use crate::qmring::{modular_basis, QuasiModularForm as Form, SeriesTable};
use crate::qseries::FracPowerSeries;
use crate::rational::{format_q, q, rationalize, to_f64, Q};

/// Dense polynomial over `Q`, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<Q>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + to_f64(c))
    }

    /// Quotient by `x - r`, assuming `r` is a root.
    fn deflate(&self, r: &Q) -> Polynomial {
        let n = self.coeffs.len();
        let mut out = vec![Q::zero(); n - 1];
        let mut carry = Q::zero();
        for i in (1..n).rev() {
            carry = &self.coeffs[i] + carry * r;
            out[i - 1] = carry.clone();
        }
        Polynomial::new(out)
    }

    fn approximate_roots(&self) -> Vec<Complex64> {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return Vec::new();
        }
        let lead = to_f64(&self.coeffs[n]);
        let seed = Complex64::new(0.4, 0.9);
        let mut z: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32)).collect();
        for _ in 0..500 {
            let mut delta = 0.0f64;
            for i in 0..n {
                let mut den = Complex64::new(lead, 0.0);
                for j in 0..n {
                    if i != j {
                        den *= z[i] - z[j];
                    }
                }
                let step = self.eval_complex(z[i]) / den;
                z[i] -= step;
                delta = delta.max(step.norm());
            }
            if delta < 1e-14 {
                break;
            }
        }
        z
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Q::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let x = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            if x.is_empty() {
                write!(f, "{}", format_q(&a))?;
            } else if a.is_one() {
                write!(f, "{x}")?;
            } else {
                write!(f, "{}*{x}", format_q(&a))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `sum_r a_r(0) x^r`.
pub fn indicial_polynomial(l: &Mldo) -> Polynomial {
    Polynomial::new(l.constant_terms())
}

/// Denominator bound used when recognising numerical roots.
pub const ROOT_DENOMINATOR_BOUND: u64 = 120;

/// All roots, with multiplicity and in increasing order. Fails when a
/// factor without rational roots of small denominator remains.
pub fn rational_roots(p: &Polynomial) -> Result<Vec<Q>> {
    let mut rest = p.clone();
    let mut roots = Vec::new();
    if rest.degree().is_none() {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    }
    while rest.degree().unwrap_or(0) > 0 {
        if rest.coeffs[0].is_zero() {
            roots.push(Q::zero());
            rest = rest.deflate(&Q::zero());
            continue;
        }
        let mut found = None;
        for z in rest.approximate_roots() {
            if z.im.abs() > 1e-5 {
                continue;
            }
            if let Some(r) = rationalize(z.re, ROOT_DENOMINATOR_BOUND) {
                if rest.eval(&r).is_zero() {
                    found = Some(r);
                    break;
                }
            }
        }
        match found {
            Some(r) => {
                rest = rest.deflate(&r);
                roots.push(r);
            }
            None => return Err(Error::IrrationalRoots(rest.to_string())),
        }
    }
    roots.sort();
    Ok(roots)
}

/// Normalized series solution `q^alpha (1 + ...)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrobeniusSolution {
    pub alpha: Q,
    pub series: FracPowerSeries,
    /// `L(series)` vanishes below this exponent.
    pub residual_order: Q,
}

#[derive(Serialize)]
struct FrobeniusJson {
    alpha: String,
    coeffs: Vec<String>,
    residual_order: String,
}

impl Serialize for FrobeniusSolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FrobeniusJson {
            alpha: format_q(&self.alpha),
            coeffs: self.series.coeffs().iter().map(format_q).collect(),
            residual_order: format_q(&self.residual_order),
        }
        .serialize(s)
    }
}

/// `P_j(x) = sum_r a_{r,j} x^r` where `a_r = sum_j a_{r,j} q^j`.
fn shifted_polynomials(l: &Mldo, n: usize) -> Vec<Polynomial> {
    let mut table = SeriesTable::new(n);
    let series: Vec<FracPowerSeries> = l.coeffs().iter().map(|a| table.expand(a)).collect();
    (0..=n)
        .map(|j| {
            let e = q(j as i64);
            Polynomial::new(
                series
                    .iter()
                    .map(|s| s.coeff_at(&e).unwrap_or_else(Q::zero))
                    .collect(),
            )
        })
        .collect()
}

/// Solves the recursion `I(alpha+M) c_M = -sum_(j>=1) P_j(alpha+M-j) c_(M-j)`
/// for `M <= n`.
pub fn frobenius_solve(l: &Mldo, alpha: &Q, n: usize) -> Result<FrobeniusSolution> {
    let polys = shifted_polynomials(l, n);
    let ind = &polys[0];
    if ind.degree().is_none() || !ind.eval(alpha).is_zero() {
        return Err(Error::NotARoot(format_q(alpha)));
    }
    if let Ok(roots) = rational_roots(ind) {
        for r in roots {
            let d = &r - alpha;
            if d.is_integer() && d > Q::zero() {
                return Err(Error::Resonance(format_q(alpha), format_q(&r)));
            }
        }
    }
    let mut c = vec![Q::one()];
    for m in 1..=n {
        let x = alpha + q(m as i64);
        let i = ind.eval(&x);
        if i.is_zero() {
            return Err(Error::Resonance(format_q(alpha), format_q(&x)));
        }
        let mut acc = Q::zero();
        for j in 1..=m {
            if c[m - j].is_zero() {
                continue;
            }
            acc += polys[j].eval(&(alpha + q((m - j) as i64))) * &c[m - j];
        }
        c.push(-acc / i);
    }
    let order = alpha + q(n as i64 + 1);
    Ok(FrobeniusSolution {
        alpha: alpha.clone(),
        series: FracPowerSeries::with_order(alpha.clone(), 1, c, order.clone()),
        residual_order: order,
    })
}

/// Result of applying an operator to a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub vanishes: bool,
    /// First nonzero term `(exponent, coefficient)` of `L(s)`, if any.
    pub first_term: Option<(Q, Q)>,
    pub order: Q,
}

pub fn verify_annihilates(l: &Mldo, s: &FracPowerSeries) -> Result<Residual> {
    let out = l.apply_series(s)?;
    let first_term = out
        .terms()
        .find(|(_, c)| !c.is_zero())
        .map(|(e, c)| (e, c.clone()));
    Ok(Residual {
        vanishes: first_term.is_none(),
        first_term,
        order: out.order().clone(),
    })
}

/// Default truncation for [`kernel_in_mk`].
pub fn default_kernel_order(k: u32, gain: u32) -> usize {
    (2 * (k + gain) / 12 + 10) as usize
}

fn kernel_at(images: &[FracPowerSeries], cols: usize, n: usize) -> Vec<Vec<Q>> {
    let rows: Vec<Vec<Q>> = (0..=n)
        .map(|j| {
            let e = q(j as i64);
            images
                .iter()
                .map(|s| s.coeff_at(&e).unwrap_or_else(Q::zero))
                .collect()
        })
        .collect();
    linalg::nullspace(&rows, cols)
}

/// Basis of `{f in M_k : L f = 0}` from `q`-expansions through `q^n`.
pub fn kernel_in_mk(l: &Mldo, k: u32, n: usize) -> Result<Vec<Form>> {
    if n < 2 {
        return Err(Error::InsufficientTruncation(format!("order {n} is too small")));
    }
    let basis = modular_basis(k)?;
    let mut table = SeriesTable::new(n);
    let images: Vec<FracPowerSeries> = basis
        .iter()
        .map(|f| table.expand(&l.apply(f)))
        .collect();
    let small = kernel_at(&images, basis.len(), n - 2);
    let full = kernel_at(&images, basis.len(), n);
    if small.len() != full.len() {
        return Err(Error::InsufficientTruncation(format!(
            "kernel dimension changes from {} to {} between orders {} and {n}",
            small.len(),
            full.len(),
            n - 2
        )));
    }
    Ok(full
        .into_iter()
        .map(|v| {
            basis
                .iter()
                .zip(&v)
                .fold(Form::zero(k), |acc, (f, c)| &acc + &f.scale(c))
        })
        .collect())
}

/// `lambda_j = j (j + 2) / 144`.
pub fn kz_eigenvalue(j: i64) -> Q {
    q(j * (j + 2)) / q(144)
}

/// One eigenvalue of `d^2 - lambda E4` on `M_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub n: u32,
    pub eigenvalue: Q,
    pub eigenform: Form,
    /// Exponent of the first nonzero `q`-coefficient of the eigenform.
    pub leading_exponent: u32,
}

impl SpectrumEntry {
    pub fn certified(&self) -> bool {
        self.leading_exponent == self.n
    }
}

/// Certifies that `d_(k+2) d_k - lambda_(k-12n) E4` is singular on `M_k`
/// for `0 <= n <= k/12`.
pub fn kz_spectrum(k: u32, n_order: usize) -> Result<Vec<SpectrumEntry>> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::InvalidWeight(k as i64, "weight must be positive and even"));
    }
    if (k + 4) % 3 == 0 {
        return Err(Error::InvalidWeight(k as i64, "k + 4 must not be divisible by 3"));
    }
    let kq = q(k as i64);
    let mut out = Vec::new();
    for n in 0..=k / 12 {
        let lam = kz_eigenvalue(k as i64 - 12 * n as i64);
        let op = Mldo::serre_iter(kq.clone(), 2)
            .add(&Mldo::multiplication(kq.clone(), Form::e4()).scale(&-lam.clone()));
        let ker = kernel_in_mk(&op, k, n_order)?;
        let Some(f) = ker.into_iter().next() else {
            return Err(Error::InvalidArgument(format!(
                "operator with eigenvalue {} is injective on M_{k}",
                format_q(&lam)
            )));
        };
        let s = f.to_qseries(n_order);
        let lead = s
            .terms()
            .find(|(_, c)| !c.is_zero())
            .and_then(|(e, _)| e.to_integer().to_u32())
            .unwrap_or(u32::MAX);
        out.push(SpectrumEntry {
            n,
            eigenvalue: lam,
            eigenform: f,
            leading_exponent: lead,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn indicial_examples() {
        let l = Mldo::kk(qf(1, 5), 2);
        let p = indicial_polynomial(&l);
        assert_eq!(rational_roots(&p).unwrap(), vec![q(0), qf(1, 5)]);
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn roots_with_multiplicity_and_irrational() {
        // (x - 1/2)^2 (x + 3)
        let p = Polynomial::new(vec![qf(3, 4), qf(-11, 4), q(2), q(1)]);
        let r = rational_roots(&p).unwrap();
        assert_eq!(r, vec![q(-3), qf(1, 2), qf(1, 2)]);
        let irr = Polynomial::new(vec![q(-2), q(0), q(1)]);
        assert!(matches!(rational_roots(&irr), Err(Error::IrrationalRoots(_))));
    }

    #[test]
    fn frobenius_for_d() {
        let l = Mldo::d_power(q(3), 1);
        let s = frobenius_solve(&l, &q(0), 10).unwrap();
        assert_eq!(s.series.coeffs()[0], q(1));
        assert!(s.series.coeffs()[1..].iter().all(Zero::is_zero));
        assert_eq!(s.residual_order, q(11));
        assert!(matches!(frobenius_solve(&l, &q(1), 5), Err(Error::NotARoot(_))));
    }

    #[test]
    fn resonance_reported() {
        // D(D - 1) on weight 0 has roots 0 and 1
        let l = Mldo::new(q(0), 4, vec![Form::zero(4), Form::e2().scale(&q(-1)), Form::one()]).unwrap();
        assert!(matches!(frobenius_solve(&l, &q(0), 5), Err(Error::Resonance(_, _))));
    }

    #[test]
    fn solutions_verify() {
        let l = Mldo::kk(qf(1, 5), 2);
        for a in [q(0), qf(1, 5)] {
            let s = frobenius_solve(&l, &a, 20).unwrap();
            let r = verify_annihilates(&l, &s.series).unwrap();
            assert!(r.vanishes, "{:?}", r.first_term);
        }
        let zero = FracPowerSeries::zero(q(10));
        assert!(verify_annihilates(&l, &zero).unwrap().vanishes);
    }

    #[test]
    fn kernels() {
        let m = Mldo::multiplication(q(4), Form::e4());
        assert!(kernel_in_mk(&m, 4, 10).unwrap().is_empty());
        let d = Mldo::d_power(q(0), 1);
        assert_eq!(kernel_in_mk(&d, 0, 10).unwrap(), vec![Form::one()]);
        let l = Mldo::serre_iter(q(12), 2).add(
            &Mldo::multiplication(q(12), Form::e4()).scale(&-kz_eigenvalue(12)),
        );
        assert_eq!(kernel_in_mk(&l, 12, default_kernel_order(12, 4)).unwrap().len(), 1);
    }

    #[test]
    fn spectrum_small() {
        let s = kz_spectrum(4, 12).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].eigenvalue, qf(1, 6));
        let s = kz_spectrum(12, 14).unwrap();
        assert_eq!(s[0].eigenvalue, qf(7, 6));
        assert_eq!(s[1].eigenvalue, q(0));
        assert!(s.iter().all(SpectrumEntry::certified));
        assert!(kz_spectrum(8, 12).is_err());
    }
}
