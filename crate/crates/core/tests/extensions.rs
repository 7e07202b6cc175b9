use std::sync::Arc;

use loewner_core::chains::{chain_becker_pommerenke, chain_translation};
use loewner_core::evolution::EvolutionFamily;
use loewner_core::expr::parse;
use loewner_core::herglotz::HerglotzField;
use loewner_core::numeric::{Domain, EuclideanDisk, Grid, HoloMap};
use loewner_core::qcext::{
    beltrami, dilatation_report, extend_chain, extend_evolution, extend_halfplane_linear, extend_schwarzian,
    ExtensionOptions, PlanarMap,
};
use loewner_core::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hmap(src: &str) -> HoloMap {
    HoloMap::from_expr(Domain::RightHalfPlane, &parse(src).unwrap()).unwrap()
}

fn opts() -> ExtensionOptions {
    ExtensionOptions::default()
}

fn tight_linear(k: f64) -> PlanarMap {
    let cc = 2.0 * k / (1.0 + k * k);
    let b = EuclideanDisk::new(c(1.0, 0.0), cc).unwrap();
    extend_halfplane_linear(&hmap(&format!("z + {cc}*exp(-z)")), &b, &opts()).unwrap()
}

#[test]
fn evolution_extension_composes_with_chain_extension() {
    let ch = chain_becker_pommerenke(&hmap("(z + 1)^0.8")).unwrap();
    let family = Arc::new(EvolutionFamily::new(ch.field().clone()));
    let (s, t) = (0.2, 1.0);
    let phi = extend_evolution(&family, s, t, 0.0, &opts()).unwrap();
    let fs = extend_chain(&ch, s, 0.0, &opts()).unwrap();
    for x in [-0.05, -0.3, -0.55, -0.75] {
        for y in [-2.0, -0.4, 0.0, 1.1, 2.5] {
            let z = c(x, y);
            let lhs = ch.eval(t, phi.eval(z).unwrap()).unwrap();
            let rhs = fs.eval(z).unwrap();
            assert!((lhs - rhs).norm() <= 1e-5 * (1.0 + rhs.norm()), "z = {z}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn beltrami_is_second_order() {
    let f = tight_linear(0.5);
    for z in [c(-0.7, 0.3), c(-1.9, -1.2), c(-0.4, 2.2)] {
        let exact = f.analytic_mu(z).unwrap().unwrap();
        let e1 = (beltrami(&f, z, 2e-2).unwrap() - exact).norm();
        let e2 = (beltrami(&f, z, 1e-2).unwrap() - exact).norm();
        let order = (e1 / e2).log2();
        assert!((1.8..2.2).contains(&order), "z = {z}: errors {e1:e}, {e2:e}, order {order}");
    }
}

#[test]
fn schwarzian_extension_is_linear_for_affine_maps() {
    let h = hmap("(2 - i)*z + 3");
    let f = extend_schwarzian(&h, &opts()).unwrap();
    for z in [c(-0.5, 1.0), c(-2.0, -3.0), c(-3.5, 0.0)] {
        let want = h.eval(c(1e-9, z.im)).unwrap() + c(2.0, -1.0) * z.re;
        assert!((f.eval(z).unwrap() - want).norm() < 1e-8, "z = {z}");
    }
}

#[test]
fn dilatation_within_field_bound() {
    let grid = Grid::cartesian([-3.0, 3.0], [-3.0, 3.0], 30, 30).unwrap();
    let cv = c(1.5, 0.7);
    let k_const = ((cv - 1.0) / (cv + 1.0)).norm();
    let k: f64 = 0.5;
    let cc = 2.0 * k / (1.0 + k * k);
    let omega = c((1.0 - cc * cc).sqrt(), 0.0);
    let families: Vec<(&str, PlanarMap, f64)> = vec![
        (
            "constant field",
            extend_chain(&chain_translation(&hmap("z"), cv).unwrap(), 0.3, 0.0, &opts()).unwrap(),
            k_const,
        ),
        (
            "becker-pommerenke",
            extend_chain(&chain_becker_pommerenke(&hmap("(z + 1)^0.8")).unwrap(), 0.0, 0.0, &opts()).unwrap(),
            0.4,
        ),
        (
            "translation",
            extend_chain(&chain_translation(&hmap(&format!("z + {cc}*exp(-z)")), omega).unwrap(), 0.0, 0.0, &opts())
                .unwrap(),
            k,
        ),
    ];
    for (name, f, k) in families {
        let r = dilatation_report(&f, &grid, k, None);
        assert!(r.pass, "{name}: sup|mu| = {} against k = {k}, failures {:?}", r.sup_abs_mu, r.failures);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn constant_field_dilatation_is_exact(re in 0.1f64..4.0, im in -2.0f64..2.0, x in -3.0f64..-0.1, y in -3.0f64..3.0) {
        let cv = c(re, im);
        let f = extend_chain(&chain_translation(&hmap("z"), cv).unwrap(), 0.5, 0.0, &opts()).unwrap();
        let z = c(x, y);
        let mu = beltrami(&f, z, 1e-3).unwrap();
        prop_assert!((mu - (cv - 1.0) / (cv + 1.0)).norm() < 1e-9);
    }

    #[test]
    fn evolution_of_constant_field_is_translation(
        re in 0.1f64..3.0,
        s in 0.0f64..1.0,
        span in 0.0f64..2.0,
        x in 0.05f64..3.0,
        y in -3.0f64..3.0,
    ) {
        let cv = c(re, 0.5);
        let fam = Arc::new(EvolutionFamily::new(HerglotzField::constant(cv)));
        let f = extend_evolution(&fam, s, s + span, 0.0, &opts()).unwrap();
        let z = c(x, y);
        prop_assert!((f.eval(z).unwrap() - (z + cv * span)).norm() < 1e-9);
    }
}
