use std::collections::BTreeMap;

use floorplan_core::model::{load, render_svg, save, validate, DirectionSet, Direction, JunctionShape};
use floorplan_core::synth::{gen_floorplan, SynthConfig};
use proptest::prelude::*;

fn plan(seed: u64) -> floorplan_core::model::Floorplan {
    gen_floorplan(&SynthConfig::default().with_seed(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn save_load_round_trip(seed in 0u64..100_000) {
        let p = plan(seed);
        let bytes = save(&p).unwrap();
        prop_assert_eq!(load(&bytes).unwrap(), p);
    }

    #[test]
    fn junctions_match_incident_walls(seed in 0u64..100_000) {
        let p = plan(seed);
        prop_assert!(validate(&p).is_empty());
        let mut incident: BTreeMap<u32, DirectionSet> = BTreeMap::new();
        let mut degree: BTreeMap<u32, usize> = BTreeMap::new();
        for w in &p.walls {
            let (a, b) = w.endpoints;
            let (pa, pb) = (p.corner(a).unwrap().position, p.corner(b).unwrap().position);
            let d = Direction::of_vector(pb.x - pa.x, pb.y - pa.y).unwrap();
            incident.entry(a).or_default().insert(d);
            incident.entry(b).or_default().insert(d.opposite());
            *degree.entry(a).or_default() += 1;
            *degree.entry(b).or_default() += 1;
        }
        for c in &p.corners {
            prop_assert_eq!(c.junction.directions(), incident[&c.id]);
            let want = match degree[&c.id] {
                1 => JunctionShape::I,
                2 => JunctionShape::L,
                3 => JunctionShape::T,
                4 => JunctionShape::X,
                n => return Err(TestCaseError::fail(format!("degree {n}"))),
            };
            prop_assert_eq!(c.junction.shape(), want);
        }
    }

    #[test]
    fn svg_is_pure(seed in 0u64..100_000) {
        let p = plan(seed);
        prop_assert_eq!(render_svg(&p), render_svg(&p.clone()));
    }
}
