//! Higher derivatives and brackets on quasimodular forms.
//!
//! Every operator takes its weight index explicitly, so it can be applied
//! to arbitrary ring elements with shifted indices. Rational indices are
//! allowed; binomial coefficients are falling-factorial quotients.

use std::sync::{Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qmring::QuasiModularForm as Form;
use crate::rational::{binomial, binomial_int, factorial, format_q, pochhammer, q, qf, Q};

fn e2_over_12() -> Form {
    Form::e2().scale(&qf(1, 12))
}

fn sign(n: u32) -> Q {
    if n % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// `D F - (kappa/12) E2 F`.
pub fn serre(kappa: &Q, f: &Form) -> Form {
    &f.derivative() - &(&Form::e2() * f).scale(&(kappa / q(12)))
}

/// `d_{kappa+2n-2} ... d_{kappa+2} d_kappa F`.
pub fn serre_iter(kappa: &Q, n: u32, f: &Form) -> Form {
    let mut out = f.clone();
    for i in 0..n {
        out = serre(&(kappa + q(2 * i as i64)), &out);
    }
    out
}

/// Canonical higher Serre derivative by its three-term recursion.
pub fn vz(kappa: &Q, n: u32, f: &Form) -> Form {
    if n == 0 {
        return f.clone();
    }
    let e4 = Form::e4();
    let mut prev = f.clone();
    let mut cur = serre(kappa, f);
    for m in 1..n {
        let m_q = q(m as i64);
        let c = &m_q * (&m_q + kappa - Q::one()) / q(144);
        let next = &serre(&(kappa + q(2 * m as i64)), &cur) - &(&e4 * &prev).scale(&c);
        prev = cur;
        cur = next;
    }
    cur
}

/// `sum_r C(n,r) (kappa+r)_{n-r} (-E2/12)^{n-r} D^r F`.
pub fn vz_explicit(kappa: &Q, n: u32, f: &Form) -> Form {
    let minus_e2 = e2_over_12().scale(&-Q::one());
    let mut out = Form::zero(f.weight() + 2 * n);
    let mut d = f.clone();
    for r in 0..=n {
        if r > 0 {
            d = d.derivative();
        }
        let c = binomial_int(n, r) * pochhammer(&(kappa + q(r as i64)), n - r);
        out = &out + &(&minus_e2.pow(n - r) * &d).scale(&c);
    }
    out
}

/// Rankin-Cohen bracket `[F, G]_n` with weight indices `kappa`, `lambda`.
pub fn rc_bracket(kappa: &Q, lambda: &Q, n: u32, f: &Form, g: &Form) -> Form {
    let mut df = vec![f.clone()];
    let mut dg = vec![g.clone()];
    for i in 1..=n as usize {
        df.push(df[i - 1].derivative());
        dg.push(dg[i - 1].derivative());
    }
    let a = kappa + q(n as i64 - 1);
    let b = lambda + q(n as i64 - 1);
    let mut out = Form::zero(f.weight() + g.weight() + 2 * n);
    for i in 0..=n {
        let c = sign(i) * binomial(&a, n - i) * binomial(&b, i);
        if c.is_zero() {
            continue;
        }
        out = &out + &(&df[i as usize] * &dg[(n - i) as usize]).scale(&c);
    }
    out
}

/// Kaneko-Koike operator `K^n_kappa F = D^n F - ((kappa+n-1)/12) [E2, F]_{n-1}`,
/// the bracket taken with weight indices `(2, kappa)`.
pub fn kk(kappa: &Q, n: u32, f: &Form) -> Form {
    if n == 0 {
        return f.clone();
    }
    let c = (kappa + q(n as i64 - 1)) / q(12);
    let br = rc_bracket(&q(2), kappa, n - 1, &Form::e2(), f);
    &f.derivative_n(n) - &br.scale(&c)
}

/// `D^<n>(1) = D^{n-1}(E2) / (12 (n-1)!)`, `D^<0>(1) = 1`.
pub fn dmod_one(n: u32) -> Form {
    if n == 0 {
        return Form::one();
    }
    Form::e2()
        .derivative_n(n - 1)
        .scale(&(q(12) * factorial(n - 1)).recip())
}

/// Modified derivative `D^<n> F = D^n F / (kappa)_n`; for a vanishing
/// Pochhammer symbol only constants are admitted.
pub fn dmod(kappa: &Q, n: u32, f: &Form) -> Result<Form> {
    let p = pochhammer(kappa, n);
    if !p.is_zero() {
        return Ok(f.derivative_n(n).scale(&p.recip()));
    }
    match f.as_constant() {
        Some(c) if kappa.is_zero() => Ok(dmod_one(n).scale(&c)),
        _ => Err(Error::PochhammerZero(format!(
            "({})_{n} vanishes and the argument is not a constant",
            format_q(kappa)
        ))),
    }
}

/// Extended Rankin-Cohen bracket `sum_i (-1)^i C(n,i) D^<i>F D^<n-i>G`.
pub fn ext_bracket(kappa: &Q, lambda: &Q, n: u32, f: &Form, g: &Form) -> Result<Form> {
    let mut out = Form::zero(f.weight() + g.weight() + 2 * n);
    for i in 0..=n {
        let a = dmod(kappa, i, f)?;
        let b = dmod(lambda, n - i, g)?;
        out = &out + &(&a * &b).scale(&(sign(i) * binomial_int(n, i)));
    }
    Ok(out)
}

fn omega_cache() -> &'static Mutex<Vec<Form>> {
    static CACHE: OnceLock<Mutex<Vec<Form>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

fn omega_uncached(m: u32) -> Form {
    // coefficient of X^m in exp(-X E2/12) * sum_n D^<n>(1) X^n/n!
    let minus = e2_over_12().scale(&-Q::one());
    let mut acc = Form::zero(2 * m);
    for i in 0..=m {
        let j = m - i;
        let c = (factorial(i) * factorial(j)).recip();
        acc = &acc + &(&minus.pow(i) * &dmod_one(j)).scale(&c);
    }
    let fm = factorial(m);
    acc.scale(&(sign(m) * &fm * &fm))
}

/// The modular forms `omega_m` of weight `2m`, memoized.
pub fn omega(m: u32) -> Form {
    let cache = omega_cache();
    if let Some(f) = cache.lock().unwrap().get(m as usize) {
        return f.clone();
    }
    let mut fresh = Vec::new();
    let start = cache.lock().unwrap().len() as u32;
    for i in start..=m {
        fresh.push(omega_uncached(i));
    }
    let mut guard = cache.lock().unwrap();
    if guard.len() as u32 == start {
        guard.extend(fresh);
    }
    guard[m as usize].clone()
}

/// Modified canonical derivative `d^<n>`: `vz / (kappa)_n`, and
/// `(-1)^n omega_n / n!` on constants in weight 0.
pub fn vzmod(kappa: &Q, n: u32, f: &Form) -> Result<Form> {
    let p = pochhammer(kappa, n);
    if !p.is_zero() {
        return Ok(vz(kappa, n, f).scale(&p.recip()));
    }
    match f.as_constant() {
        Some(c) if kappa.is_zero() => Ok(omega(n).scale(&(c * sign(n) / factorial(n)))),
        _ => Err(Error::PochhammerZero(format!(
            "({})_{n} vanishes and the argument is not a constant",
            format_q(kappa)
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CkVariant {
    D,
    Serre,
    KK,
}

/// The first `len` normalized coefficients of a Cohen-Kuznetsov series.
pub fn ck_truncated(variant: CkVariant, kappa: &Q, f: &Form, len: u32) -> Result<Vec<Form>> {
    (0..len)
        .map(|n| match variant {
            CkVariant::D => dmod(kappa, n, f),
            CkVariant::Serre => vzmod(kappa, n, f),
            CkVariant::KK => {
                let one = Form::one();
                let mut out = Form::zero(f.weight() + 2 * n);
                for i in 0..=n {
                    let a = dmod(kappa, i, f)?;
                    let b = dmod(&Q::zero(), n - i, &one)?;
                    out = &out + &(&a * &b).scale(&(sign(n - i) * binomial_int(n, i)));
                }
                Ok(out)
            }
        })
        .collect()
}

/// `vz(k - p, n, F)` for `F` of weight `k` and depth at most `p`; the
/// result again has depth at most `p`.
pub fn vz_depth(f: &Form, p: u32, n: u32) -> Result<Form> {
    if f.depth() > p {
        return Err(Error::DepthBound {
            actual: f.depth(),
            bound: p,
        });
    }
    let kappa = q(f.weight() as i64 - p as i64);
    let out = vz(&kappa, n, f);
    if out.depth() > p {
        return Err(Error::DepthBound {
            actual: out.depth(),
            bound: p,
        });
    }
    Ok(out)
}

/// `<F, G>_n` with shifted indices `(k - p, l - q)`; depth at most `p + q`.
pub fn mr_bracket(f: &Form, p: u32, g: &Form, q_: u32, n: u32) -> Result<Form> {
    for (x, b) in [(f, p), (g, q_)] {
        if x.depth() > b || 2 * b > x.weight() {
            return Err(Error::DepthBound {
                actual: x.depth(),
                bound: b,
            });
        }
    }
    let kappa = q(f.weight() as i64 - p as i64);
    let lambda = q(g.weight() as i64 - q_ as i64);
    let out = ext_bracket(&kappa, &lambda, n, f, g)?;
    if out.depth() > p + q_ {
        return Err(Error::DepthBound {
            actual: out.depth(),
            bound: p + q_,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmring::modular_basis;

    fn e4() -> Form {
        Form::e4()
    }
    fn e6() -> Form {
        Form::e6()
    }

    #[test]
    fn serre_examples() {
        let f = &Form::e2() * &e4();
        assert_eq!(serre(&q(0), &f), f.derivative());
        assert_eq!(serre(&q(4), &e4()), e6().scale(&qf(-1, 3)));
        assert_eq!(serre_iter(&qf(1, 5), 0, &f), f);
        assert_eq!(vz(&q(7), 1, &f), serre(&q(7), &f));
    }

    #[test]
    fn vz_unfolds_once() {
        let k = q(10);
        let f = &e4() * &e6();
        let want = &serre_iter(&k, 2, &f) - &(&e4() * &f).scale(&(&k / q(144)));
        assert_eq!(vz(&k, 2, &f), want);
        assert!(vz(&q(12), 3, &Form::discriminant()).is_modular());
        assert_eq!(vz_explicit(&q(4), 2, &e4()), vz(&q(4), 2, &e4()));
    }

    #[test]
    fn kk_low_orders() {
        let k = qf(1, 5);
        let f = &Form::e2() * &e6();
        assert_eq!(kk(&k, 1, &f), serre(&k, &f));
        assert_eq!(kk(&k, 0, &f), f);
        // L_{2,k}
        let k = q(4);
        let lam = &k * (&k + q(2)) / q(144);
        let want = &serre_iter(&k, 2, &e4()) - &(&e4() * &e4()).scale(&lam);
        assert_eq!(kk(&k, 2, &e4()), want);
    }

    #[test]
    fn bracket_examples() {
        let f = &e4() * &e6();
        assert_eq!(rc_bracket(&q(4), &q(6), 0, &e4(), &e6()), f);
        assert_eq!(
            rc_bracket(&q(4), &q(6), 1, &e4(), &e6()),
            Form::discriminant().scale(&q(-3456))
        );
        let a = rc_bracket(&q(4), &q(4), 1, &e4(), &e4().scale(&q(3)));
        let b = rc_bracket(&q(4), &q(4), 1, &e4().scale(&q(3)), &e4());
        assert_eq!(a, b.scale(&-Q::one()));
    }

    #[test]
    fn modified_derivatives() {
        let one = Form::one();
        assert_eq!(dmod(&q(0), 1, &one).unwrap(), Form::e2().scale(&qf(1, 12)));
        let want = (&Form::e2().pow(2) - &e4()).scale(&qf(1, 144));
        assert_eq!(dmod(&q(0), 2, &one).unwrap(), want);
        assert_eq!(dmod(&q(4), 2, &e4()).unwrap(), e4().derivative_n(2).scale(&qf(1, 20)));
        assert!(dmod(&q(0), 1, &Form::e2()).is_err());
    }

    #[test]
    fn extended_bracket_examples() {
        let one = Form::one();
        let z = Q::zero();
        assert_eq!(ext_bracket(&z, &z, 2, &one, &one).unwrap(), e4().scale(&qf(-1, 72)));
        assert_eq!(
            ext_bracket(&z, &z, 6, &one, &one).unwrap(),
            Form::discriminant().scale(&qf(36, 720))
        );
        let l = q(6);
        for n in 0..4 {
            let want = kk(&l, n, &e6()).scale(&pochhammer(&l, n).recip());
            assert_eq!(ext_bracket(&z, &l, n, &one, &e6()).unwrap(), want);
        }
    }

    #[test]
    fn omega_small() {
        assert_eq!(omega(0), Form::one());
        assert!(omega(1).is_zero());
        assert_eq!(omega(2), e4().scale(&qf(-1, 72)));
        assert_eq!(omega(3), e6().scale(&qf(-1, 144)));
        assert_eq!(vzmod(&q(0), 2, &Form::one()).unwrap(), omega(2).scale(&qf(1, 2)));
    }

    #[test]
    fn ck_variants() {
        let one = Form::one();
        let d = ck_truncated(CkVariant::D, &q(0), &one, 3).unwrap();
        assert_eq!(d[1], Form::e2().scale(&qf(1, 12)));
        let s = ck_truncated(CkVariant::Serre, &q(0), &one, 4).unwrap();
        assert_eq!(s[3], omega(3).scale(&qf(-1, 6)));
        let k = ck_truncated(CkVariant::KK, &q(4), &e4(), 4).unwrap();
        for (n, x) in k.iter().enumerate() {
            let n = n as u32;
            assert_eq!(*x, kk(&q(4), n, &e4()).scale(&pochhammer(&q(4), n).recip()));
        }
    }

    #[test]
    fn depth_preserving_variants() {
        let f = e4().derivative();
        assert!(vz_depth(&f, 1, 3).unwrap().depth() <= 1);
        assert!(vz_depth(&Form::e2(), 1, 2).unwrap().depth() <= 1);
        assert_eq!(vz_depth(&e6(), 0, 2).unwrap(), vz(&q(6), 2, &e6()));
        assert!(vz_depth(&Form::e2().pow(2), 1, 1).is_err());
        for n in 0..=6 {
            let b = mr_bracket(&Form::e2(), 1, &Form::e2(), 1, n).unwrap();
            assert!(b.depth() <= 2);
            if n % 2 == 1 {
                assert!(b.is_zero());
            }
        }
        for g in modular_basis(12).unwrap() {
            let a = mr_bracket(&e4(), 0, &g, 0, 2).unwrap();
            assert_eq!(a, ext_bracket(&q(4), &q(12), 2, &e4(), &g).unwrap());
        }
    }
}
