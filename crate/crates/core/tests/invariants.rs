mod common;

use std::sync::OnceLock;

use hodgekit::harmonic::{harmonic_ls, HarmonicOptions};
use hodgekit::io::{format_cochain, parse_cochains, BlockKind};
use hodgekit::meshgen::PlanarMesh;
use hodgekit::operators::adjoint_sign;
use hodgekit::{Calculus, Cochain, LinearOperator, SimplicialComplex, StarKind};
use nalgebra::DVector;
use proptest::prelude::*;

fn annulus() -> &'static PlanarMesh {
    static MESH: OnceLock<PlanarMesh> = OnceLock::new();
    MESH.get_or_init(common::coarse_annulus)
}

fn shell() -> &'static SimplicialComplex {
    static MESH: OnceLock<SimplicialComplex> = OnceLock::new();
    MESH.get_or_init(|| hodgekit::meshgen::solid_annulus(1.0, 0.45, 0.45).unwrap())
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, n)
}

fn star_kind() -> impl Strategy<Value = StarKind> {
    prop_oneof![Just(StarKind::Dec { allow_indefinite: false }), Just(StarKind::Whitney)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjointness_on_annulus(p in 0usize..2, kind in star_kind(), seed in any::<u64>()) {
        let c = &annulus().complex;
        let calc = Calculus::new(c, kind);
        let mut rng = common::rng(seed);
        let a = Cochain::from_vector(p, common::random_vec(&mut rng, c.num_simplices(p)));
        let b = Cochain::from_vector(p + 1, common::random_vec(&mut rng, c.num_simplices(p + 1)));
        let lhs = calc.inner(&calc.apply_d(&a).unwrap(), &b).unwrap();
        let rhs = adjoint_sign(p) * calc.inner(&a, &calc.codifferential(&b).unwrap()).unwrap();
        let scale = calc.norm(&calc.apply_d(&a).unwrap()).unwrap() * calc.norm(&b).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale.max(1.0), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn coboundary_squares_to_zero_on_shell(p in 0usize..2, v in values(1)) {
        let c = shell();
        let calc = Calculus::new(c, StarKind::Whitney);
        let x = DVector::from_element(c.num_simplices(p), v[0]) + DVector::from_fn(c.num_simplices(p), |i, _| i as f64);
        let dd = calc.d(p + 1).unwrap().apply(&calc.d(p).unwrap().apply(&x));
        prop_assert!(dd.amax() <= 1e-9 * x.amax());
    }

    #[test]
    fn exact_part_does_not_change_h(seed in any::<u64>(), kind in star_kind()) {
        let mesh = annulus();
        let c = &mesh.complex;
        let calc = Calculus::new(c, kind);
        let omega = common::annulus_cocycle(mesh);
        let beta = common::random_vec(&mut common::rng(seed), c.num_simplices(0));
        let shifted = Cochain::from_vector(1, &omega.values + calc.d(0).unwrap().apply(&beta));
        let opts = HarmonicOptions::default();
        let h = harmonic_ls(&calc, &omega, &opts).unwrap().h;
        let h2 = harmonic_ls(&calc, &shifted, &opts).unwrap().h;
        let diff = calc.norm(&Cochain::from_vector(1, &h.values - &h2.values)).unwrap();
        prop_assert!(diff <= 1e-9 * calc.norm(&h).unwrap());
    }

    #[test]
    fn harmonic_part_is_orthogonal_to_gradients(seed in any::<u64>(), kind in star_kind()) {
        let mesh = annulus();
        let c = &mesh.complex;
        let calc = Calculus::new(c, kind);
        let h = harmonic_ls(&calc, &common::annulus_cocycle(mesh), &HarmonicOptions::default()).unwrap().h;
        let tau = Cochain::from_vector(0, common::random_vec(&mut common::rng(seed), c.num_simplices(0)));
        let grad = calc.apply_d(&tau).unwrap();
        let ip = calc.inner(&h, &grad).unwrap();
        prop_assert!(ip.abs() <= 1e-9 * calc.norm(&h).unwrap() * calc.norm(&grad).unwrap());
    }

    #[test]
    fn cochain_text_round_trip(v in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..40), p in 0usize..4) {
        let c = Cochain::new(p, v);
        let text = format_cochain(BlockKind::Cochain, &c);
        let back = parse_cochains(&text, "mem").unwrap();
        prop_assert_eq!(back.len(), 1);
        prop_assert_eq!(&back[0].data, &c);
    }
}

#[test]
fn mesh_json_round_trip() {
    let c = &annulus().complex;
    let text = c.to_json();
    let back = hodgekit::io::parse_native_json(&text, "mem").unwrap();
    assert_eq!(back.counts(), c.counts());
    for p in 0..=c.dim() {
        assert!(back.simplices(p).iter().eq(c.simplices(p).iter()));
    }
}
