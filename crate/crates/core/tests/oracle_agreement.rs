use fedosov::checks::oracle_agreement;
use fedosov::element::{FiberMonomial, FormMonomial, TermKey};
use fedosov::oracle::{pbw_product, project, symmetrize};
use fedosov::product::weyl_product;
use fedosov::{fixtures, PolyMatrix, RationalPoly, SymplecticStructure, WeylFormElement};
use proptest::prelude::*;

fn one() -> RationalPoly {
    RationalPoly::one(2)
}

fn fiber(y: [u32; 2], h: u32, c: &str) -> WeylFormElement {
    WeylFormElement::single(
        TermKey::new(h, FiberMonomial::new(y.to_vec()), FormMonomial::EMPTY),
        RationalPoly::parse(c, 2).unwrap(),
        8,
    )
}

#[test]
fn oracle_reproduces_hand_computed_products() {
    let omega = SymplecticStructure::standard(1).omega().clone();
    let sym = |y: [u32; 2]| symmetrize(&omega, &one(), 0, &FiberMonomial::new(y.to_vec())).unwrap();
    let cases = [
        ([1, 0], [0, 1], vec![fiber([1, 1], 0, "1"), fiber([0, 0], 1, "1/2")]),
        ([0, 1], [1, 0], vec![fiber([1, 1], 0, "1"), fiber([0, 0], 1, "-1/2")]),
        ([2, 0], [0, 2], vec![fiber([2, 2], 0, "1"), fiber([1, 1], 1, "2"), fiber([0, 0], 2, "1/2")]),
    ];
    for (a, b, want) in cases {
        let got = project(&omega, &pbw_product(&omega, &sym(a), &sym(b)).unwrap(), 8).unwrap();
        let want = want.iter().fold(WeylFormElement::zero(2, 8), |acc, t| &acc + t);
        assert!(got.agrees_with(&want), "{a:?} {b:?}: {got}");
    }
}

fn structures() -> Vec<PolyMatrix> {
    vec![
        SymplecticStructure::standard(1).omega().clone(),
        SymplecticStructure::standard(2).omega().clone(),
        fixtures::sheared().0.omega().clone(),
    ]
}

#[test]
fn product_matches_oracle_through_degree_four() {
    for omega in structures() {
        let dim = omega.size();
        let outcome = oracle_agreement(&omega, dim, 4, 1).unwrap();
        assert!(outcome.passed, "{outcome}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_matches_oracle_for_random_monomials(
        which in 0usize..3,
        a in proptest::collection::vec(0u32..3, 4),
        b in proptest::collection::vec(0u32..3, 4),
        ha in 0u32..2,
    ) {
        let omega = &structures()[which];
        let dim = omega.size();
        let (a, b) = (FiberMonomial::new(a[..dim].to_vec()), FiberMonomial::new(b[..dim].to_vec()));
        prop_assume!(a.degree() + b.degree() <= 5);
        let c = RationalPoly::var(0, dim);
        let ea = WeylFormElement::single(TermKey::new(ha, a.clone(), FormMonomial::EMPTY), c.clone(), 12);
        let eb = WeylFormElement::single(TermKey::new(0, b.clone(), FormMonomial::EMPTY), RationalPoly::one(dim), 12);
        let fast = weyl_product(omega, &ea, &eb).unwrap();
        let slow = project(
            omega,
            &pbw_product(omega, &symmetrize(omega, &c, ha, &a).unwrap(), &symmetrize(omega, &RationalPoly::one(dim), 0, &b).unwrap()).unwrap(),
            fast.validity(),
        ).unwrap();
        prop_assert!(fast.agrees_with(&slow));
    }
}
