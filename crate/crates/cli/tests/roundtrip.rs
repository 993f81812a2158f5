use std::collections::BTreeMap;

use ksnorm::verify::{builtin_fixture, random_instances, Fixture, BUILTIN_FIXTURES};
use ksnorm_cli::spec::{MeasureSpecFile, Overrides};
use proptest::prelude::*;

fn reload(fx: &Fixture) -> Fixture {
    let json = MeasureSpecFile::from_fixture(fx).to_json();
    MeasureSpecFile::from_json(&json)
        .and_then(|f| f.validate("unnamed", &Overrides::default()))
        .unwrap_or_else(|e| panic!("{e}\n{json}"))
}

#[test]
fn builtin_fixtures_survive_emission() {
    for name in BUILTIN_FIXTURES {
        let fx = builtin_fixture(name).unwrap().unwrap();
        assert_eq!(reload(&fx), fx, "{name}");
    }
}

#[test]
fn emitted_text_is_stable() {
    let fx = builtin_fixture("ellinf-square").unwrap().unwrap();
    let once = MeasureSpecFile::from_fixture(&fx).to_json();
    let twice = MeasureSpecFile::from_fixture(&reload(&fx)).to_json();
    assert_eq!(once, twice);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_models_survive_emission(seed in any::<u64>(), index in 0usize..6) {
        let inst = random_instances(seed, index + 1).unwrap().pop().unwrap();
        let fx = Fixture {
            name: "random".into(),
            measure: inst.mu,
            functions: BTreeMap::from([("f".to_string(), inst.f), ("g".to_string(), inst.g)]),
            family: inst.fam,
            candidates: inst.d,
        };
        prop_assert_eq!(reload(&fx), fx);
    }

    #[test]
    fn ratio_strings_match_decimals(p in -4096i64..4096, shift in 0u32..12) {
        let q = 1i64 << shift;
        let text = format!(
            r#"{{"schema_version": 1, "space": {{"dim": 1, "norm": "ell1"}},
                "atoms": [{{"id": "a", "value": ["{p}/{q}"]}}, {{"id": "b", "value": [{}]}}]}}"#,
            p as f64 / q as f64
        );
        let fx = MeasureSpecFile::from_json(&text).unwrap().validate("m", &Overrides::default()).unwrap();
        prop_assert_eq!(fx.measure.value(0), fx.measure.value(1));
    }
}
