use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::Mldo;
use crate::error::{Error, Result};
use crate::qmring::QuasiModularForm as Form;
use crate::rational::{binomial_int, pochhammer, q, qf, Q};

/// Which family of monic operators an expansion `L = sum_r b_r P_r` uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisTag {
    /// Plain powers `D^r`.
    D,
    /// Iterated Serre derivatives.
    Serre,
    /// Kaneko-Koike operators.
    KK,
    /// Canonical higher Serre derivatives.
    VZ,
}

impl BasisTag {
    pub const ALL: [BasisTag; 4] = [BasisTag::D, BasisTag::Serre, BasisTag::KK, BasisTag::VZ];

    /// The monic order-`r` operator of type `(k, k + 2r)`.
    pub fn operator(self, k: &Q, r: u32) -> Mldo {
        match self {
            BasisTag::D => Mldo::d_power(k.clone(), r),
            BasisTag::Serre => Mldo::serre_iter(k.clone(), r),
            BasisTag::KK => Mldo::kk(k.clone(), r),
            BasisTag::VZ => Mldo::vz(k.clone(), r),
        }
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisTag::D => "d",
            BasisTag::Serre => "serre",
            BasisTag::KK => "kk",
            BasisTag::VZ => "vz",
        })
    }
}

impl FromStr for BasisTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d" => Ok(BasisTag::D),
            "serre" => Ok(BasisTag::Serre),
            "kk" => Ok(BasisTag::KK),
            "vz" => Ok(BasisTag::VZ),
            _ => Err(Error::InvalidArgument(format!("unknown basis `{s}`"))),
        }
    }
}

impl Mldo {
    /// Coefficients `b_0..b_n` of `L` in the chosen basis. For the three
    /// modular families these are modular forms.
    pub fn to_basis(&self, tag: BasisTag) -> Result<Vec<Form>> {
        if tag == BasisTag::D {
            return Ok(self.coeffs.clone());
        }
        self.ensure_modular()?;
        if tag == BasisTag::VZ {
            return Ok(self.vz_coefficients());
        }
        let n = self.order();
        let mut rest = self.clone();
        let mut out = vec![Form::zero(0); n + 1];
        for r in (0..=n).rev() {
            let b = rest.coeff(r);
            debug_assert!(b.is_modular());
            out[r] = b.clone();
            if !b.is_zero() {
                let step = tag.operator(&self.k, r as u32).mul_form(&b);
                rest = rest.try_add(&step.scale(&-Q::one()))?;
            } else {
                out[r] = Form::zero(self.gain - 2 * r as u32);
            }
        }
        debug_assert!(rest.is_zero());
        Ok(out)
    }

    /// `d_r = sum_j C(r+j, j) (k+r)_j (E2/12)^j a_{r+j}`, the inverse of the
    /// closed form of the canonical higher Serre derivatives.
    fn vz_coefficients(&self) -> Vec<Form> {
        let n = self.order();
        let e = Form::e2().scale(&qf(1, 12));
        (0..=n)
            .map(|r| {
                let mut d = Form::zero(self.gain - 2 * r as u32);
                for j in 0..=(n - r) {
                    let c = binomial_int((r + j) as u32, j as u32)
                        * pochhammer(&(&self.k + q(r as i64)), j as u32);
                    if c.is_zero() {
                        continue;
                    }
                    d = &d + &(&e.pow(j as u32) * &self.coeff(r + j)).scale(&c);
                }
                debug_assert!(d.is_modular(), "VZ coefficient of a modular operator");
                d
            })
            .collect()
    }

    /// `sum_r b_r P_r` for the monic family `P_r` of `tag`.
    pub fn from_basis(tag: BasisTag, k: Q, coeffs: &[Form]) -> Result<Self> {
        let mut gain = None;
        for (r, b) in coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            let w = b.weight() + 2 * r as u32;
            match gain {
                None => gain = Some(w),
                Some(g) if g != w => {
                    return Err(Error::WeightMismatch(format!(
                        "basis coefficient {r} has weight {}, expected {}",
                        b.weight(),
                        g as i64 - 2 * r as i64
                    )))
                }
                _ => {}
            }
        }
        let Some(gain) = gain else {
            return Ok(Mldo::zero(k, 0));
        };
        let mut out = Mldo::zero(k.clone(), gain);
        for (r, b) in coeffs.iter().enumerate() {
            if b.is_zero() {
                continue;
            }
            out = out.try_add(&tag.operator(&k, r as u32).mul_form(b))?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmring::modular_basis;

    fn l2(k: &Q) -> Mldo {
        Mldo::kk(k.clone(), 2)
    }

    #[test]
    fn kaneko_zagier_in_vz_basis() {
        for k in [qf(1, 5), q(0), q(6)] {
            let b = l2(&k).to_basis(BasisTag::VZ).unwrap();
            let c = -&k * (&k + q(1)) / q(144);
            assert_eq!(b, vec![Form::e4().scale(&c), Form::zero(2), Form::one()]);
        }
    }

    #[test]
    fn round_trips() {
        let k = qf(3, 7);
        for tag in BasisTag::ALL {
            let mut coeffs = Vec::new();
            for r in 0..=4u32 {
                let w = 12 - 2 * r;
                let mut b = Form::zero(w);
                for (i, m) in modular_basis(w).unwrap().into_iter().enumerate() {
                    b = &b + &m.scale(&q(i as i64 + r as i64 + 1));
                }
                coeffs.push(b);
            }
            let l = Mldo::from_basis(tag, k.clone(), &coeffs).unwrap();
            if tag != BasisTag::D {
                assert!(l.is_modular(), "{tag}");
            }
            assert_eq!(l.to_basis(tag).unwrap(), coeffs, "{tag}");
        }
    }

    #[test]
    fn non_modular_rejected() {
        let l = Mldo::d_power(q(1), 2);
        assert!(matches!(l.to_basis(BasisTag::VZ), Err(Error::NotModular { .. })));
        assert!("xx".parse::<BasisTag>().is_err());
        assert_eq!("VZ".parse::<BasisTag>().unwrap(), BasisTag::VZ);
    }
}
