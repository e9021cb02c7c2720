use proptest::prelude::*;
use std::cmp::Ordering;
use tentlab_core::arith::{Parameter, Real, SideClass};
use tentlab_core::ilim::{fiber, reconstruct, Cylinder};
use tentlab_core::measure::{alpha_cylinder, density_markov};
use tentlab_core::outside::{b_tilde, b_tilde_inverse, extreme_element, CirclePoint};
use tentlab_core::tent::{unimodal_cmp, TentMap, UnimodalOrd};

const EXACT: [&str; 3] = [
    "poly:\"-1,-1,1\":interval:\"1.6,1.7\"",
    "poly:\"-1,-1,-1,1\":interval:\"1.8,1.9\"",
    "poly:\"-1,0,-1,1\":interval:\"1.4,1.5\"",
];

fn exact_tent(i: usize) -> TentMap {
    TentMap::new(&Parameter::parse(EXACT[i]).unwrap())
}

fn decimal_tent(thousandths: u32) -> TentMap {
    TentMap::new(&Parameter::parse(&format!("dec:\"1.{thousandths:03}\"")).unwrap())
}

/// The point a + u(b − a) of the core.
fn core_point(f: &TentMap, u: f64) -> Real {
    let (a, b) = (f.a().to_f64(), f.b().to_f64());
    f.param().from_f64(a + u * (b - a))
}

fn eq(x: &Real, y: &Real) -> bool {
    x.cmp_real(y) == Some(Ordering::Equal)
}

fn in_core(f: &TentMap, y: &Real) -> bool {
    y.cmp_real(f.a()) != Some(Ordering::Less) && y.cmp_real(f.b()) != Some(Ordering::Greater)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn core_is_forward_invariant(k in 415u32..999, u in 0.0f64..=1.0) {
        let f = decimal_tent(k);
        let x = core_point(&f, u);
        prop_assert!(in_core(&f, &f.eval(&x).unwrap()));
    }

    #[test]
    fn fa_p_ahat_are_ordered(k in 415u32..999) {
        let f = decimal_tent(k);
        prop_assert_eq!(f.f_a().cmp_real(f.p_fix()), Some(Ordering::Less));
        prop_assert_eq!(f.p_fix().cmp_real(f.a_hat()), Some(Ordering::Less));
    }

    #[test]
    fn hat_is_an_involution_preserving_images(i in 0usize..3, u in 0.0f64..1.0) {
        let f = exact_tent(i);
        let (a, ah) = (f.a().to_f64(), f.a_hat().to_f64());
        let x = f.param().from_f64(a + u * (ah - a));
        prop_assume!(f.side(&x) != SideClass::AtC);
        let h = f.hat(&x).unwrap();
        prop_assert!(eq(&f.hat(&h).unwrap(), &x));
        prop_assert!(eq(&f.eval(&h).unwrap(), &f.eval(&x).unwrap()));
    }

    #[test]
    fn preimages_map_back_exactly(i in 0usize..3, u in 0.0f64..=1.0) {
        let f = exact_tent(i);
        let y = core_point(&f, u);
        let pre = f.preimages(&y).unwrap();
        prop_assert!(!pre.is_empty());
        for (x, _) in pre {
            prop_assert!(eq(&f.eval(&x).unwrap(), &y));
        }
    }

    #[test]
    fn itineraries_reflect_order(i in 0usize..3, u in 0.0f64..1.0, v in 0.0f64..1.0) {
        let f = exact_tent(i);
        let (x, y) = (core_point(&f, u.min(v)), core_point(&f, u.max(v)));
        prop_assume!(x.cmp_real(&y) == Some(Ordering::Less));
        let (wx, wy) = (f.itinerary(&x, 40).unwrap(), f.itinerary(&y, 40).unwrap());
        prop_assume!(!wx.is_ambiguous() && !wy.is_ambiguous());
        prop_assert_ne!(unimodal_cmp(wx.symbols(), wy.symbols()), UnimodalOrd::Greater);
    }

    #[test]
    fn unimodal_order_is_antisymmetric(s in prop::collection::vec(0u8..2, 1..40), t in prop::collection::vec(0u8..2, 1..40)) {
        let st = unimodal_cmp(&s, &t).to_ordering();
        prop_assert_eq!(unimodal_cmp(&t, &s).to_ordering(), st.reverse());
    }

    #[test]
    fn b_tilde_inverse_is_a_right_inverse(i in 0usize..3, u in 0.0f64..1.0, upper in any::<bool>()) {
        let f = exact_tent(i);
        let x = core_point(&f, u);
        let y = if upper { CirclePoint::upper(&f, x) } else { CirclePoint::lower(&f, x) };
        let back = b_tilde(&f, &b_tilde_inverse(&f, &y).unwrap()).unwrap();
        prop_assert_eq!(back.same_as(&y), Some(true));
    }

    #[test]
    fn extremes_differ_off_the_endpoints(i in 0usize..3, u in 0.001f64..0.999) {
        let f = exact_tent(i);
        let x = core_point(&f, u);
        let lo = extreme_element(&f, &CirclePoint::lower(&f, x.clone()), 30).unwrap();
        let hi = extreme_element(&f, &CirclePoint::upper(&f, x), 30).unwrap();
        prop_assert_eq!(lo.exact_eq(&hi), Some(false));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fibers_are_threads_and_reconstruct(i in 0usize..3, u in 0.0f64..=1.0, r in 1usize..9) {
        let f = exact_tent(i);
        let x = core_point(&f, u);
        let fib = fiber(&f, &x, r).unwrap();
        prop_assert!(!fib.threads.is_empty() && fib.threads.len() <= 1 << r);
        for (t, w) in fib.threads.iter().zip(&fib.branch_words) {
            let c = t.coords();
            prop_assert_eq!(c.len(), r + 1);
            for k in 0..r {
                prop_assert!(eq(&f.eval(&c[k + 1]).unwrap(), &c[k]));
            }
            prop_assert_eq!(reconstruct(&f, &x, w).unwrap().exact_eq(t), Some(true));
        }
    }

    #[test]
    fn fhat_contracts_alpha_by_lambda(i in 0usize..3, u in 0.0f64..=1.0, r in 0usize..9, pick in any::<prop::sample::Index>()) {
        let f = exact_tent(i);
        let d = density_markov(&f).unwrap();
        let fib = fiber(&f, &core_point(&f, u), r).unwrap();
        let t = pick.get(&fib.threads).clone();
        let c = Cylinder::new(t.clone());
        let img = Cylinder::new(t.fhat(&f).unwrap());
        let lhs = alpha_cylinder(&d, &img).value;
        let rhs = &alpha_cylinder(&d, &c).value * f.inv_lambda();
        prop_assert!(eq(&lhs, &rhs));
    }
}
