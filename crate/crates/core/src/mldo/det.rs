use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::qseries::{self, FracPowerSeries};
use crate::rational::{q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetVariant {
    /// Rows of plain derivatives `D^r f_i`.
    D,
    /// Rows of iterated Serre derivatives starting at weight `k`.
    Serre(Q),
}

fn det_series(m: &[Vec<FracPowerSeries>], order: &Q) -> Result<FracPowerSeries> {
    let n = m.len();
    if n == 0 {
        return Ok(FracPowerSeries::monomial(Q::from_integer(1.into()), q(0), order.clone()));
    }
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = FracPowerSeries::zero(order.clone());
    for c in 0..n {
        if m[0][c].is_zero() {
            continue;
        }
        let minor: Vec<Vec<FracPowerSeries>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != c)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let term = m[0][c].mul(&det_series(&minor, order)?)?;
        acc = if c % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

/// The operator `Delta_V` of a basis `f_1..f_n`: the coefficient of the
/// `r`-th derivative is `(-1)^(n+r)` times the minor of the `n x (n+1)`
/// derivative matrix with column `r` removed. With `monic`, every
/// coefficient is divided by the leading one.
pub fn det_operator(
    basis: &[FracPowerSeries],
    variant: &DetVariant,
    monic: bool,
) -> Result<Vec<FracPowerSeries>> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty basis".into()));
    }
    let mut rows = Vec::with_capacity(n);
    for f in basis {
        let mut row = vec![f.clone()];
        let mut cur = f.clone();
        for r in 0..n {
            cur = match variant {
                DetVariant::D => cur.derive(),
                DetVariant::Serre(k) => {
                    let span = (cur.order() - cur.valuation_bound()).ceil().to_integer();
                    let len = span.to_usize().unwrap_or(0) + 1;
                    let e2 = qseries::eisenstein(2, len)?;
                    let kappa = k + q(2 * r as i64);
                    cur.derive().sub(&e2.mul(&cur)?.scale(&(kappa / q(12))))?
                }
            };
            row.push(cur.clone());
        }
        rows.push(row);
    }
    let order = rows
        .iter()
        .flatten()
        .map(|s| s.order().clone())
        .min()
        .expect("nonempty");
    let mut coeffs = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let minor: Vec<Vec<FracPowerSeries>> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != r)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let d = det_series(&minor, &order)?;
        coeffs.push(if (n + r) % 2 == 0 { d } else { d.neg() });
    }
    if coeffs.iter().all(FracPowerSeries::vanishes) {
        return Err(Error::InsufficientTruncation(
            "all minors vanish to the available order".into(),
        ));
    }
    if monic {
        let lead = coeffs[n].clone();
        if lead.vanishes() {
            return Err(Error::InsufficientTruncation(
                "leading minor vanishes to the available order".into(),
            ));
        }
        coeffs = coeffs
            .iter()
            .map(|c| c.div(&lead))
            .collect::<Result<_>>()?;
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_basis_gives_d() {
        let one = FracPowerSeries::constant(q(1), 10);
        let c = det_operator(&[one.clone()], &DetVariant::D, false).unwrap();
        assert!(c[0].vanishes());
        assert_eq!(c[1], one);
    }

    #[test]
    fn annihilates_basis() {
        let basis = [
            qseries::theta(3, 20).unwrap().powi(2).unwrap(),
            qseries::theta(4, 20).unwrap().powi(2).unwrap(),
        ];
        let c = det_operator(&basis, &DetVariant::D, false).unwrap();
        for f in &basis {
            let mut acc = FracPowerSeries::zero(f.order().clone());
            let mut d = f.clone();
            for (r, a) in c.iter().enumerate() {
                if r > 0 {
                    d = d.derive();
                }
                acc = acc.add(&a.mul(&d).unwrap()).unwrap();
            }
            assert!(acc.vanishes());
        }
    }

    #[test]
    fn dependent_basis_rejected() {
        let e4 = qseries::eisenstein(4, 10).unwrap();
        let r = det_operator(&[e4.clone(), e4.scale(&q(2))], &DetVariant::D, false);
        assert!(matches!(r, Err(Error::InsufficientTruncation(_))));
    }
}
