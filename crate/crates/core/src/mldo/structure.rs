use num_traits::Zero;

use super::{sign, Mldo};
use crate::error::{Error, Result};
use crate::hsd;
use crate::qmring::{modular_dimension, QuasiModularForm as Form};
use crate::rational::{binomial, binomial_int, factorial, format_q, pochhammer, q, Q};

/// Rankin-Cohen data of a modular operator: modular forms `h_m` of weight
/// `K - 2m` and, for monic operators with `K = 2n`, the multiple of the
/// Kaneko-Koike operator `K^n` that replaces the slots `m = n-1, n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RcData {
    pub h: Vec<Form>,
    pub kk_coeff: Option<Q>,
}

fn pochhammer_nonzero(x: &Q, n: u32) -> Result<Q> {
    let p = pochhammer(x, n);
    if p.is_zero() {
        Err(Error::PochhammerZero(format!("({})_{n} vanishes", format_q(x))))
    } else {
        Ok(p)
    }
}

impl Mldo {
    /// `h_m = sum_s C(m+s, s) (k+m)_s / (K-2m-s-1)_s D^s a_{m+s}`.
    pub fn h_vector(&self) -> Result<RcData> {
        self.ensure_modular()?;
        let n = self.order();
        let big_k = self.gain as i64;
        let monic = big_k == 2 * n as i64 && n > 0;
        if monic {
            let a_n = self.coeff(n).as_constant().expect("weight 0");
            let forced = Form::e2().scale(&(-q(n as i64) * (&self.k + q(n as i64 - 1)) / q(12) * &a_n));
            if self.coeff(n - 1) != forced {
                return Err(Error::InvalidArgument(format!(
                    "monic operator has a_(n-1) = {}, expected {}",
                    self.coeff(n - 1),
                    forced
                )));
            }
        }
        let mut h = Vec::with_capacity(n + 1);
        for m in 0..=n {
            let w = (big_k - 2 * m as i64) as u32;
            if monic && m + 1 >= n {
                h.push(Form::zero(w));
                continue;
            }
            let mut acc = Form::zero(w);
            for s in 0..=(n - m) {
                let a = self.coeff(m + s);
                if a.is_zero() {
                    continue;
                }
                let den = pochhammer_nonzero(&q(big_k - 2 * m as i64 - s as i64 - 1), s as u32)?;
                let c = binomial_int((m + s) as u32, s as u32)
                    * pochhammer(&(&self.k + q(m as i64)), s as u32)
                    / den;
                acc = &acc + &a.derivative_n(s as u32).scale(&c);
            }
            debug_assert!(acc.is_modular(), "h_{m} must be modular");
            h.push(acc);
        }
        let kk_coeff = monic.then(|| self.coeff(n).as_constant().expect("weight 0"));
        Ok(RcData { h, kk_coeff })
    }

    /// `L(f) = sum_m C(K-m-1, m)^(-1) [h_m, f]_m + kk K^(K/2)(f)`.
    pub fn from_rc_data(k: Q, gain: u32, data: &RcData) -> Result<Self> {
        let mut out = Mldo::zero(k.clone(), gain);
        for (m, h) in data.h.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            let w = gain as i64 - 2 * m as i64;
            if h.weight() as i64 != w || w <= 0 {
                return Err(Error::WeightMismatch(format!(
                    "h_{m} has weight {}, expected positive weight {w}",
                    h.weight()
                )));
            }
            let c = binomial(&q(gain as i64 - m as i64 - 1), m as u32);
            if c.is_zero() {
                return Err(Error::PochhammerZero(format!("C({}, {m}) vanishes", gain as i64 - m as i64 - 1)));
            }
            let br = Mldo::rc_bracket_left(k.clone(), h, &q(w), m as u32);
            out = out.try_add(&br.scale(&c.recip()))?;
        }
        if let Some(c) = &data.kk_coeff {
            if gain % 2 == 0 && !c.is_zero() {
                out = out.try_add(&Mldo::kk(k.clone(), gain / 2).scale(c))?;
            }
        }
        Ok(out)
    }

    /// Inverse of [`Mldo::h_vector`] for the bracket part:
    /// `a_r = sum_j (-1)^j C(r+j, j) (k+r)_j / (K-2r-2j)_j D^j h_{r+j}`.
    pub fn a_from_h(k: &Q, gain: u32, h: &[Form]) -> Result<Vec<Form>> {
        let n = h.len();
        let mut out = Vec::with_capacity(n);
        for r in 0..n {
            let mut acc = Form::zero((gain as i64 - 2 * r as i64).max(0) as u32);
            for j in 0..(n - r) {
                let hv = &h[r + j];
                if hv.is_zero() {
                    continue;
                }
                let den = pochhammer_nonzero(&q(gain as i64 - 2 * (r + j) as i64), j as u32)?;
                let c = sign(j as u32)
                    * binomial_int((r + j) as u32, j as u32)
                    * pochhammer(&(k + q(r as i64)), j as u32)
                    / den;
                acc = &acc + &hv.derivative_n(j as u32).scale(&c);
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// `g_m = (-1)^m h_m / C(K-m-1, m)`, so that
    /// `L(f) = kk K^n(f) + sum_m [f, g_m]_m`.
    pub fn rc_decomposition(&self) -> Result<(Vec<Form>, Option<Q>)> {
        let data = self.h_vector()?;
        let g = data
            .h
            .iter()
            .enumerate()
            .map(|(m, h)| {
                if h.is_zero() {
                    return h.clone();
                }
                let c = binomial(&q(self.gain as i64 - m as i64 - 1), m as u32);
                h.scale(&(sign(m as u32) / c))
            })
            .collect();
        Ok((g, data.kk_coeff))
    }

    /// Terms `(r, g_r)` with `L(f) = sum_r <g_r, f>_r`, via the
    /// quasimodular form `a_0` and its derivative decomposition.
    /// Needs `(k)_r != 0` for `r <= n`, so `k` may not be a non-positive
    /// integer unless the operator has order 0.
    pub fn decompose_ext_rc(&self) -> Result<Vec<(u32, Form)>> {
        self.ensure_modular()?;
        pochhammer_nonzero(&self.k, self.order() as u32)?;
        let h = self.to_qmf().derivative_coefficients()?;
        Ok(h.into_iter()
            .enumerate()
            .filter(|(_, g)| !g.is_zero())
            .map(|(r, g)| (r as u32, g.scale(&sign(r as u32))))
            .collect())
    }

    /// `f -> sum_r <g_r, f>_r` on weight `k`.
    pub fn from_ext_rc(k: Q, terms: &[(u32, Form)]) -> Result<Self> {
        let mut out: Option<Mldo> = None;
        for (n, g) in terms {
            let n = *n;
            let kappa = q(g.weight() as i64);
            let gain = g.weight() + 2 * n;
            let mut coeffs = Vec::with_capacity(n as usize + 1);
            for j in 0..=n {
                let i = n - j;
                let dg = hsd::dmod(&kappa, i, g)?;
                let den = pochhammer_nonzero(&k, j)?;
                coeffs.push(dg.scale(&(sign(i) * binomial_int(n, i) / den)));
            }
            let term = Mldo::new(k.clone(), gain, coeffs)?;
            out = Some(match out {
                None => term,
                Some(acc) => acc.try_add(&term)?,
            });
        }
        Ok(out.unwrap_or_else(|| Mldo::zero(k, 0)))
    }
}

/// `{f, F} = sum_r (-1)^r / r! delta^r(F) D^<r>(f)`.
pub fn pair_braces(f: &Form, big_f: &Form) -> Result<Form> {
    let kappa = q(f.weight() as i64);
    let mut out = Form::zero(f.weight() + big_f.weight());
    let mut lowered = big_f.clone();
    for r in 0..=big_f.depth() {
        if r > 0 {
            lowered = lowered.lowering();
        }
        if lowered.is_zero() {
            break;
        }
        let d = hsd::dmod(&kappa, r, f)?;
        out = &out + &(&lowered * &d).scale(&(sign(r) / factorial(r)));
    }
    Ok(out)
}

/// `Lambda_{F,k}`: coefficient of `D^t` is
/// `sum_(m>=t) (-1)^m / (m! (k+K-m-1)_m) C(m, t) D^(m-t)(delta^m F)`.
pub fn lambda_from_qmf(big_f: &Form, k: &Q) -> Result<Mldo> {
    let gain = big_f.weight();
    let p = big_f.depth();
    let mut lowered = vec![big_f.clone()];
    for m in 1..=p {
        lowered.push(lowered[m as usize - 1].lowering());
    }
    let mut coeffs: Vec<Form> = (0..=p).map(|t| Form::zero(gain - 2 * t)).collect();
    for m in 0..=p {
        let den = factorial(m) * pochhammer_nonzero(&(k + q(gain as i64 - m as i64 - 1)), m)?;
        let base = sign(m) / den;
        let mut d = lowered[m as usize].clone();
        for t in (0..=m).rev() {
            let c = &base * binomial_int(m, t);
            coeffs[t as usize] = &coeffs[t as usize] + &d.scale(&c);
            if t > 0 {
                d = d.derivative();
            }
        }
    }
    Mldo::new(k.clone(), gain, coeffs)
}

/// `sum_(r<=n) dim M_(K-2r)`, with `n` clamped to `K/2`.
pub fn dim_mldo(gain: u32, n: u32) -> Result<usize> {
    if gain % 2 == 1 {
        return Err(Error::InvalidWeight(gain as i64, "operator weight must be even"));
    }
    let n = n.min(gain / 2);
    (0..=n).map(|r| modular_dimension(gain - 2 * r)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmring::{modular_basis, quasimodular_basis};
    use crate::rational::qf;

    #[test]
    fn h_vector_examples() {
        let l = Mldo::kk(qf(1, 5), 2);
        let d = l.h_vector().unwrap();
        assert!(d.h[0].is_zero());
        assert_eq!(d.kk_coeff, Some(q(1)));
        let g = Form::e6();
        let m = Mldo::multiplication(q(3), g.clone());
        assert_eq!(m.h_vector().unwrap().h, vec![g]);
    }

    #[test]
    fn single_bracket_round_trip() {
        for k in [qf(1, 5), q(2), q(9)] {
            for (m, h) in [(1u32, Form::e4()), (2, Form::e6()), (1, Form::discriminant()), (3, Form::e8())] {
                let gain = h.weight() + 2 * m;
                let mut hs: Vec<Form> = (0..=m).map(|i| Form::zero(gain - 2 * i)).collect();
                hs[m as usize] = h.clone();
                let data = RcData { h: hs.clone(), kk_coeff: None };
                let l = Mldo::from_rc_data(k.clone(), gain, &data).unwrap();
                assert!(l.is_modular());
                assert_eq!(l.h_vector().unwrap().h, hs);
                assert_eq!(Mldo::a_from_h(&k, gain, &hs).unwrap(), l.coeffs().to_vec());
            }
        }
    }

    #[test]
    fn ext_rc_examples() {
        let k = q(5);
        let l = Mldo::kk(k.clone(), 3);
        let terms = l.decompose_ext_rc().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, 3);
        assert!(terms[0].1.as_constant().is_some());
        assert_eq!(Mldo::from_ext_rc(k.clone(), &terms).unwrap(), l);
        let g = Form::e4();
        let m = Mldo::multiplication(k.clone(), g.clone());
        assert_eq!(m.decompose_ext_rc().unwrap(), vec![(0, g)]);
    }

    #[test]
    fn qmf_round_trips() {
        for w in 0..=8 {
            for f in quasimodular_basis(2 * w) {
                let k = qf(1, 5);
                let l = Mldo::from_qmf(&f, k.clone()).unwrap();
                assert!(l.is_modular());
                assert_eq!(l.order() as u32, f.depth());
                assert_eq!(l.to_qmf(), f);
                let back = Mldo::from_ext_rc(k.clone(), &l.decompose_ext_rc().unwrap()).unwrap();
                assert_eq!(back, l, "{f}");
            }
        }
    }

    #[test]
    fn braces() {
        let f = Form::e4();
        let g = Form::e6();
        assert_eq!(pair_braces(&f, &g).unwrap(), &f * &g);
        let e = Form::e2().scale(&qf(1, 12));
        assert!(pair_braces(&Form::one(), &e).unwrap().is_zero());
        for n in 0..4 {
            let dg = hsd::dmod(&q(6), n, &g).unwrap();
            let want = hsd::ext_bracket(&q(4), &q(6), n, &f, &g).unwrap();
            assert_eq!(pair_braces(&f, &dg).unwrap(), want);
        }
    }

    #[test]
    fn lambda_projects() {
        let big_f = &Form::e2() * &Form::e4();
        for k in [4u32, 6, 10] {
            let lam = lambda_from_qmf(&big_f, &q(k as i64)).unwrap();
            assert!(lam.is_modular());
            for f in modular_basis(k).unwrap() {
                assert_eq!(lam.apply(&f), (&f * &big_f).primitive_projection());
            }
        }
        let m = lambda_from_qmf(&Form::e6(), &q(3)).unwrap();
        assert_eq!(m, Mldo::multiplication(q(3), Form::e6()));
    }

    #[test]
    fn dimensions() {
        assert_eq!(dim_mldo(4, 2).unwrap(), 2);
        assert_eq!(dim_mldo(10, 5).unwrap(), 5);
        assert_eq!(dim_mldo(0, 0).unwrap(), 1);
        assert_eq!(dim_mldo(4, 9).unwrap(), 2);
    }
}
