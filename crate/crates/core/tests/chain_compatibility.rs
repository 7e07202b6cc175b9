use loewner_core::chains::{
    chain_becker_pommerenke, chain_exponential, chain_schwarzian, chain_starlike_infinity, chain_translation,
    pde_residual, LoewnerChain,
};
use loewner_core::evolution::EvolutionFamily;
use loewner_core::expr::parse;
use loewner_core::numeric::{Domain, HoloMap};
use loewner_core::Complex64;
use proptest::prelude::*;

fn hmap(src: &str) -> HoloMap {
    HoloMap::from_expr(Domain::RightHalfPlane, &parse(src).unwrap()).unwrap()
}

fn chains() -> Vec<(&'static str, LoewnerChain)> {
    let omega = Complex64::new((1.0f64 - 0.04).sqrt(), 0.0);
    vec![
        ("becker-pommerenke", chain_becker_pommerenke(&hmap("(z + 1)^0.8")).unwrap()),
        ("schwarzian", chain_schwarzian(&hmap("(z + 1)^0.8")).unwrap()),
        ("translation", chain_translation(&hmap("z + 0.2*exp(-z)"), omega).unwrap()),
        ("exponential", chain_exponential(&hmap("(z + 1)^0.8")).unwrap()),
        ("starlike", chain_starlike_infinity(&hmap("z"), &hmap("z + 1")).unwrap()),
    ]
}

/// `|f_t(φ_{s,t}(z)) − f_s(z)|` relative to `1 + |f_s(z)|`.
fn compatibility(c: &LoewnerChain, family: &EvolutionFamily, s: f64, t: f64, z: Complex64) -> f64 {
    let fs = c.eval(s, z).unwrap();
    let w = family.evolve(s, t, z).unwrap();
    (c.eval(t, w).unwrap() - fs).norm() / (1.0 + fs.norm())
}

#[test]
fn chains_solve_their_pde() {
    for (name, c) in chains() {
        for (z, t) in [(Complex64::new(0.7, 0.4), 0.5), (Complex64::new(2.0, -1.5), 1.3)] {
            let r = pde_residual(&c, z, t, 1e-4).unwrap();
            assert!(r < 1e-6, "{name}: PDE residual {r} at z = {z}, t = {t}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chain_matches_its_evolution_family(
        s in 0.0f64..2.0,
        span in 0.0f64..2.0,
        re in 0.1f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let z = Complex64::new(re, im);
        for (name, c) in chains() {
            let family = EvolutionFamily::new(c.field().clone());
            let r = compatibility(&c, &family, s, s + span, z);
            prop_assert!(r <= 1e-6, "{}: residual {} at s = {}, t = {}, z = {}", name, r, s, s + span, z);
        }
    }
}
