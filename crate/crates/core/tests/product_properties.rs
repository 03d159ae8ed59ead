use fedosov::fixtures;
use fedosov::operators::tau;
use fedosov::product::{graded_commutator, parity_split, weyl_product};
use fedosov::random::{random_element, random_poly, ElementShape};
use fedosov::{rat, SymplecticStructure, WeylFormElement};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small(validity: i32) -> ElementShape {
    ElementShape {
        terms: 4,
        coeff_degree: 2,
        coeff_terms: 2,
        ..ElementShape::new(validity)
    }
}

fn structures() -> Vec<SymplecticStructure> {
    vec![
        SymplecticStructure::standard(1),
        SymplecticStructure::standard(2),
        fixtures::sheared().0,
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn associative(seed in any::<u64>(), which in 0usize..3) {
        let s = &structures()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let [a, b, c] = [0, 1, 2].map(|_| random_element(&mut rng, s.dim(), small(8)));
        let w = s.omega();
        let left = weyl_product(w, &weyl_product(w, &a, &b).unwrap(), &c).unwrap();
        let right = weyl_product(w, &a, &weyl_product(w, &b, &c).unwrap()).unwrap();
        prop_assert!(left.agrees_with(&right), "{:?} vs {:?}", left, right);
    }

    #[test]
    fn degrees_add_on_bihomogeneous_inputs(seed in any::<u64>()) {
        let s = SymplecticStructure::standard(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&mut rng, 4, small(6));
        let b = random_element(&mut rng, 4, small(6));
        for ((p1, q1, m1), x) in a.components() {
            for ((p2, q2, m2), y) in b.components() {
                let prod = weyl_product(s.omega(), &x, &y).unwrap();
                for (k, _) in prod.terms() {
                    prop_assert_eq!(k.w_degree() as u32, p1 + 2 * m1 + p2 + 2 * m2);
                    prop_assert_eq!(k.form_degree(), q1 + q2);
                }
            }
        }
    }

    #[test]
    fn tau_of_linear_product_is_half_h_omega(seed in any::<u64>(), which in 0usize..3) {
        let s = &structures()[which];
        let dim = s.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lin = |rng: &mut ChaCha8Rng| {
            let mut e = WeylFormElement::zero(dim, 6);
            for i in 0..dim {
                e = &e + &WeylFormElement::y(i, dim, 6).scale(&random_poly(rng, dim, 2, 2));
            }
            e
        };
        let x = lin(&mut rng);
        let y = lin(&mut rng);
        let got = tau(&weyl_product(s.omega(), &x, &y).unwrap());
        let pairing = s.omega_pairing(&x, &y).unwrap();
        let want = WeylFormElement::h_power(1, dim, 6).scale(&pairing).scale_rational(&rat(1, 2));
        prop_assert!(got.agrees_with(&want));
    }

    #[test]
    fn commutator_lies_in_h_ideal(seed in any::<u64>(), which in 0usize..3) {
        let s = &structures()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&mut rng, s.dim(), small(7));
        let b = random_element(&mut rng, s.dim(), small(7));
        let c = graded_commutator(s.omega(), &a, &b).unwrap();
        prop_assert!(c.terms().all(|(k, _)| k.h >= 1));
        // graded antisymmetry: [a,b] = -(-1)^{|a||b|} [b,a]
        let (ae, ao) = parity_split(&a);
        let (be, bo) = parity_split(&b);
        let mut sum = graded_commutator(s.omega(), &b, &a).unwrap();
        for (x, y, sign) in [(&ae, &be, 1), (&ae, &bo, 1), (&ao, &be, 1), (&ao, &bo, -1)] {
            let t = graded_commutator(s.omega(), x, y).unwrap();
            sum = if sign == 1 { &sum + &t } else { &sum - &t };
        }
        prop_assert!(sum.is_zero());
    }
}
