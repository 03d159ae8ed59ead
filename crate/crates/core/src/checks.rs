//! Named pass/fail checks and the invariant suites behind `fedosov check`.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::element::{FiberMonomial, FormMonomial, TermKey, WeylFormElement};
use crate::error::Result;
use crate::fedosov::FedosovData;
use crate::matrix::PolyMatrix;
use crate::operators::{big_t, delta, delta_star, delta_tilde, nabla, tau};
use crate::oracle;
use crate::poly::{int, RationalPoly};
use crate::product::weyl_product;
use crate::random::{random_element, random_poly, ElementShape};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// Passes iff `residue` vanishes; otherwise the residue is the detail.
    pub fn from_residue(name: impl Into<String>, residue: &WeylFormElement) -> Self {
        if residue.is_zero() {
            Self::new(name, true, "")
        } else {
            Self::new(name, false, format!("residue {residue}"))
        }
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(f, "{}: pass", self.name)
        } else {
            write!(f, "{}: FAIL ({})", self.name, self.detail)
        }
    }
}

/// Invariant suites runnable against a problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Fundamental,
    Euler,
    DSquared,
    Connection,
    Flatness,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Fundamental,
        Suite::Euler,
        Suite::DSquared,
        Suite::Connection,
        Suite::Flatness,
        Suite::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Fundamental => "fundamental",
            Suite::Euler => "euler",
            Suite::DSquared => "d-squared",
            Suite::Connection => "connection",
            Suite::Flatness => "flatness",
            Suite::Oracle => "oracle",
        }
    }

    /// Parses a suite name or a comma-separated list; `all` yields every suite.
    pub fn parse_list(name: &str) -> Option<Vec<Suite>> {
        if name == "all" {
            return Some(Self::ALL.to_vec());
        }
        name.split(',')
            .map(|part| Self::ALL.iter().copied().find(|s| s.name() == part.trim()))
            .collect()
    }
}

/// Number of random elements per randomized property.
pub const SAMPLES: usize = 20;

fn tally(name: &str, results: impl IntoIterator<Item = std::result::Result<(), String>>) -> CheckOutcome {
    let mut total = 0;
    let mut first_failure = None;
    let mut passed = 0;
    for r in results {
        total += 1;
        match r {
            Ok(()) => passed += 1,
            Err(e) => {
                first_failure.get_or_insert(e);
            }
        }
    }
    match first_failure {
        None => CheckOutcome::new(name, true, format!("{passed}/{total}")),
        Some(e) => CheckOutcome::new(name, false, format!("{passed}/{total}; first residue {e}")),
    }
}

fn zero_or(residue: WeylFormElement) -> std::result::Result<(), String> {
    if residue.is_zero() {
        Ok(())
    } else {
        Err(residue.to_string())
    }
}

fn samples(data: &FedosovData, seed: u64, validity: i32) -> Vec<WeylFormElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shape = ElementShape {
        terms: 5,
        coeff_terms: 2,
        ..ElementShape::new(validity)
    };
    (0..SAMPLES)
        .map(|_| random_element(&mut rng, data.structure().dim(), shape))
        .collect()
}

/// Runs one suite on certified data. `seed` fixes the random sample.
pub fn run_suite(suite: Suite, data: &FedosovData, seed: u64) -> Result<Vec<CheckOutcome>> {
    let s = data.structure();
    let c = data.connection();
    let n = data.truncation() as i32;
    let dim = s.dim();
    let out = match suite {
        Suite::Fundamental => {
            let items = samples(data, seed, n).into_iter().map(|e| {
                let lhs = &(&delta_tilde(s, &delta(s, &e)) + &delta(s, &delta_tilde(s, &e))) + &tau(&e);
                zero_or(&lhs - &e)
            });
            vec![tally("delta~ delta + delta delta~ + tau = id", items)]
        }
        Suite::Euler => {
            let items = samples(data, seed, n).into_iter().flat_map(|e| {
                e.components()
                    .into_iter()
                    .map(|((p, q, _), x)| {
                        let lhs = &delta(s, &delta_star(s, &x)) + &delta_star(s, &delta(s, &x));
                        zero_or(&lhs - &x.scale_rational(&int((p + q) as i64)))
                    })
                    .collect::<Vec<_>>()
            });
            vec![tally("(delta delta* + delta* delta) = (p+q) id", items)]
        }
        Suite::DSquared => {
            let es = samples(data, seed, n);
            let mut out = vec![
                tally("delta^2 = 0", es.iter().map(|e| zero_or(delta(s, &delta(s, e))))),
                tally("delta*^2 = 0", es.iter().map(|e| zero_or(delta_star(s, &delta_star(s, e))))),
                tally("delta~^2 = 0", es.iter().map(|e| zero_or(delta_tilde(s, &delta_tilde(s, e))))),
            ];
            let mut gens = Vec::new();
            for i in 0..dim {
                gens.push(WeylFormElement::from_poly(RationalPoly::var(i, dim), n));
                gens.push(WeylFormElement::y(i, dim, n));
                gens.push(WeylFormElement::dx(i, dim, n));
            }
            let mut d2 = Vec::new();
            for e in gens.iter().chain(&es) {
                d2.push(zero_or(data.fedosov_d(&data.fedosov_d(e)?)?));
            }
            out.push(tally("D^2 = 0 below validity - 1", d2));
            out
        }
        Suite::Connection => {
            let es = samples(data, seed, n);
            vec![
                tally(
                    "delta nabla + nabla delta = 0",
                    es.iter().map(|e| zero_or(&delta(s, &nabla(c, e)) + &nabla(c, &delta(s, e)))),
                ),
                tally(
                    "T nabla = nabla T",
                    es.iter().map(|e| zero_or(&big_t(&nabla(c, e)) - &nabla(c, &big_t(e)))),
                ),
            ]
        }
        Suite::Flatness => data.certificate()?,
        Suite::Oracle => vec![oracle_agreement(s.omega(), dim, 4, seed)?],
    };
    Ok(out)
}

/// Compares the product with the straightening oracle on every pair of
/// fiber monomials of total degree at most `max_degree`, with random
/// coefficients of degree at most 2.
pub fn oracle_agreement(omega: &PolyMatrix, dim: usize, max_degree: u32, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let monos = fiber_monomials(dim, max_degree);
    let v = 2 * max_degree as i32;
    let mut results = Vec::new();
    for a in &monos {
        for b in &monos {
            if a.degree() + b.degree() > max_degree {
                continue;
            }
            let ca = random_poly(&mut rng, dim, 2, 2);
            let cb = random_poly(&mut rng, dim, 2, 2);
            let ea = WeylFormElement::single(TermKey::new(0, a.clone(), FormMonomial::EMPTY), ca.clone(), v);
            let eb = WeylFormElement::single(TermKey::new(0, b.clone(), FormMonomial::EMPTY), cb.clone(), v);
            let fast = weyl_product(omega, &ea, &eb)?;
            let slow = oracle::project(
                omega,
                &oracle::pbw_product(omega, &oracle::symmetrize(omega, &ca, 0, a)?, &oracle::symmetrize(omega, &cb, 0, b)?)?,
                fast.validity(),
            )?;
            results.push(zero_or(&fast - &slow));
        }
    }
    Ok(tally(&format!("product = straightening oracle (degree <= {max_degree})"), results))
}

/// All fiber monomials in `dim` variables of degree at most `max_degree`.
pub fn fiber_monomials(dim: usize, max_degree: u32) -> Vec<FiberMonomial> {
    fn go(dim: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<FiberMonomial>) {
        if cur.len() == dim {
            out.push(FiberMonomial::new(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur.push(e);
            go(dim, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(dim, max_degree, &mut Vec::new(), &mut out);
    out
}
