use proptest::prelude::*;

use mldokit::mlde;
use mldokit::mldo::{self, BasisTag, Mldo};
use mldokit::parse::{parse_form, parse_operator};
use mldokit::qmring::{modular_basis, quasimodular_basis, QuasiModularForm as Form};
use mldokit::qseries::FracPowerSeries;
use mldokit::rational::{q, qf, Q};

fn combo(basis: &[Form], weight: u32, coeffs: &[i64]) -> Form {
    basis
        .iter()
        .zip(coeffs)
        .fold(Form::zero(weight), |acc, (f, c)| &acc + &f.scale(&q(*c)))
}

fn qm_form() -> impl Strategy<Value = Form> {
    (0u32..=6).prop_flat_map(|h| {
        let w = 2 * h;
        let n = quasimodular_basis(w).len();
        prop::collection::vec(-20i64..=20, n).prop_map(move |c| combo(&quasimodular_basis(w), w, &c))
    })
}

fn rational_k() -> impl Strategy<Value = Q> {
    (1i64..=40, 1i64..=7).prop_map(|(a, b)| qf(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn leibniz_rules(f in qm_form(), g in qm_form()) {
        let fg = &f * &g;
        let d = &(&f.derivative() * &g) + &(&f * &g.derivative());
        let fd = fg.derivative();
        prop_assert_eq!(fd.terms(), d.terms());
        // lowering a weight 0 form gives a zero form whose weight is clamped
        let l = &(&f.lowering() * &g) + &(&f * &g.lowering());
        let fl = fg.lowering();
        prop_assert_eq!(fl.terms(), l.terms());
    }

    #[test]
    fn projection_is_idempotent(f in qm_form()) {
        let p = f.primitive_projection();
        prop_assert!(p.is_modular());
        prop_assert_eq!(p.primitive_projection(), p);
    }

    #[test]
    fn print_parse_forms(f in qm_form()) {
        // the zero form prints as `0` and loses its weight
        let back = parse_form(&f.to_string()).unwrap();
        prop_assert_eq!(back.terms(), f.terms());
    }

    #[test]
    fn qmf_operator_round_trip(f in qm_form(), k in rational_k()) {
        let l = mldo::l_from_qmf(&f, &k).unwrap();
        prop_assert!(l.is_modular());
        prop_assert_eq!(mldo::qmf_from_l(&l), f.clone());
        let back = parse_operator(&l.to_string(), &k).unwrap();
        prop_assert_eq!(back.coeffs(), l.coeffs());
    }

    #[test]
    fn basis_round_trips(k in rational_k(), c in prop::collection::vec(-9i64..=9, 8)) {
        // operators of weight 8, order <= 4
        let mut coeffs = Vec::new();
        let mut i = 0;
        for r in 0..=4u32 {
            let basis = modular_basis(8 - 2 * r).unwrap();
            let n = basis.len();
            coeffs.push(combo(&basis, 8 - 2 * r, &c[i..i + n]));
            i += n;
        }
        for tag in [BasisTag::Serre, BasisTag::KK, BasisTag::VZ] {
            let l = Mldo::from_basis(tag, k.clone(), &coeffs).unwrap();
            prop_assert!(l.is_modular());
            for other in BasisTag::ALL {
                let b = l.to_basis(other).unwrap();
                let again = Mldo::from_basis(other, k.clone(), &b).unwrap();
                prop_assert_eq!(again.coeffs(), l.coeffs());
            }
        }
    }

    #[test]
    fn series_inverse(c in prop::collection::vec(-30i64..=30, 1..12)) {
        let mut v: Vec<Q> = c.into_iter().map(q).collect();
        v[0] = q(1);
        let s = FracPowerSeries::from_coeffs(q(0), 1, v);
        let one = s.mul(&s.inverse().unwrap()).unwrap();
        let lead = FracPowerSeries::constant(q(1), 0);
        prop_assert!(one.sub(&lead).unwrap().vanishes());
        let back = s.log().unwrap().exp().unwrap();
        prop_assert!(back.sub(&s).unwrap().vanishes());
    }

    #[test]
    fn frobenius_solutions_verify(k in rational_k()) {
        let l = Mldo::kk(k.clone(), 2);
        let roots = mlde::rational_roots(&mlde::indicial_polynomial(&l));
        if let Ok(roots) = roots {
            for a in roots {
                if let Ok(sol) = mlde::frobenius_solve(&l, &a, 12) {
                    let r = mlde::verify_annihilates(&l, &sol.series).unwrap();
                    prop_assert!(r.vanishes);
                    prop_assert!(r.order >= sol.residual_order);
                }
            }
        }
    }
}
