use proptest::prelude::*;
use radial_coulomb::norms::{log_norm_exact, NormQuery};
use radial_coulomb::oracles::{closed_form_log_z, log_z_from_norms, OracleModel};
use radial_coulomb::partition::log_z_exact;
use radial_coulomb::potential::{Ensemble, RadialPotential};

fn ensemble() -> impl Strategy<Value = Ensemble> {
    prop_oneof![Just(Ensemble::Normal), Just(Ensemble::Symplectic)]
}

#[test]
fn dilated_ginibre_matches_closed_form() {
    for scale in [0.5, 2.0, 3.0] {
        let p = RadialPotential::ginibre(scale).unwrap();
        for ens in [Ensemble::Normal, Ensemble::Symplectic] {
            let exact = log_z_exact(&p, 40, ens).unwrap();
            let closed = closed_form_log_z(&p, 40, ens).unwrap();
            assert!(
                (exact - closed).abs() < 1e-9,
                "scale {scale} {ens:?}: {exact} vs {closed}"
            );
        }
    }
}

#[test]
fn custom_potentials_have_no_closed_form() {
    use radial_coulomb::potential::CustomProfile;
    let p = RadialPotential::custom(CustomProfile::new(|r| r * r), None).unwrap();
    assert!(closed_form_log_z(&p, 10, Ensemble::Normal).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ml_closed_form_agrees_with_norm_sum(k in 1u32..=4, c in 0.0f64..3.0, n in 1usize..60, ens in ensemble()) {
        // 1/λ must be an integer on the normal grid; 2/λ on the odd grid
        let lambda = 1.0 / f64::from(k);
        let m = OracleModel::MittagLeffler { lambda, c };
        let a = m.log_z(n, ens).unwrap();
        let b = log_z_from_norms(&m, n, ens).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn tu_closed_form_agrees_with_norm_sum(alpha in 0.2f64..4.0, radius in 0.3f64..3.0, n in 1usize..60, ens in ensemble()) {
        let m = OracleModel::TruncatedUnitary { alpha, radius };
        let a = m.log_z(n, ens).unwrap();
        let b = log_z_from_norms(&m, n, ens).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn quadrature_norms_match_closed_form(alpha in 0.3f64..3.0, n in 5usize..80, frac in 0.0f64..1.0, ens in ensemble()) {
        let m = OracleModel::TruncatedUnitary { alpha, radius: 1.0 };
        let p = m.potential().unwrap();
        let top = match ens { Ensemble::Normal => n - 1, Ensemble::Symplectic => 2 * n - 1 };
        let j = (frac * top as f64) as usize;
        let nq = NormQuery::new(n, j, ens).unwrap();
        let q = log_norm_exact(&p, nq).unwrap();
        let c = m.log_norm(n, j, ens).unwrap();
        prop_assert!((q - c).abs() <= 1e-10 * c.abs().max(1.0), "j = {j}: {q} vs {c}");
    }
}
