//! The numerics are generic over the scalar type; exercise the `f32`
//! instantiation end to end at loose tolerances.

use ebc_core::data::{FieldData, ModeEntry, RadialProfile};
use ebc_core::effective::{solve_effective, EffectiveProblemSpec};
use ebc_core::geometry::{norm_l2_bulk, TorusSpec};
use ebc_core::operators::{cell_problem_oracle, dtn_symbol, Cap, CapVariant};
use ebc_core::scaling::{classify, CoatingScaling, EbcKind, OuterBc, ScalingLaw};
use ebc_core::stepping::{Parallelism, Scheme};

#[test]
fn symbols_and_oracle_in_f32() {
    let symbol: f32 = dtn_symbol(CapVariant::Dirichlet, 1.0f32, Cap::Finite(1.0)).unwrap();
    assert!((symbol + 1.0 / 1.0f32.tanh()).abs() < 1e-6);
    let oracle: f32 = cell_problem_oracle(1.0f32, 1.0, CapVariant::Dirichlet, 256).unwrap();
    assert!((oracle - symbol).abs() / symbol.abs() < 1e-3);
}

#[test]
fn classification_in_f32() {
    let scaling = CoatingScaling::type_i(
        ScalingLaw::new(1.0f32, 1.0).unwrap(),
        ScalingLaw::new(1.0f32, 0.0).unwrap(),
    );
    let report = classify(OuterBc::Dirichlet, &scaling).unwrap();
    assert_eq!(report.ebc, EbcKind::Robin { alpha: 1.0f32 });
}

#[test]
fn effective_solve_in_f32_dissipates() {
    let spec = EffectiveProblemSpec::<f32> {
        torus: TorusSpec::square_2pi(1, 1),
        bulk_depth: 1.0,
        n_bulk: 17,
        k: 1.0,
        ebc: EbcKind::Robin { alpha: 1.0 },
        u0: FieldData {
            entries: vec![ModeEntry {
                m: 1,
                n: 0,
                cos: 1.0,
                sin: 0.0,
                profile: RadialProfile::Gaussian {
                    center: -0.5,
                    width: 0.2,
                    amplitude: 1.0,
                },
            }],
        },
        source: None,
        t_end: 0.05,
        dt: 0.0025,
        scheme: Scheme::ImplicitEuler,
        snapshot_every: 1,
    };
    let traj = solve_effective(&spec, Parallelism::Serial).unwrap();
    let first = norm_l2_bulk(&traj.fields[0]);
    let last = norm_l2_bulk(traj.final_field());
    assert!(last < first && last > 0.0);
}
