mod common;

use std::collections::BTreeSet;

use common::{naive_obs, random_lasso, random_lts, rng};
use hyperprove::{EventLabel, Lasso};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn obs_successors_match_path_search(seed in any::<u64>()) {
        let l = random_lts(&mut rng(seed), "L", 8, 3);
        for s in l.states() {
            let got: BTreeSet<_> = l.obs_successors(s).unwrap().iter().cloned().collect();
            prop_assert_eq!(got, naive_obs(&l, s));
        }
    }

    #[test]
    fn det_step_preserves_traces(seed in any::<u64>()) {
        let l = random_lts(&mut rng(seed), "L", 6, 2);
        let bound = l.num_states() + 1;
        for s in l.states() {
            if let Some(t) = l.det_step(s).unwrap() {
                for w in l.enumerate_lassos(s, bound).unwrap() {
                    prop_assert!(l.realize_from(t, &w).is_some(), "{} from {}", w, l.state_name(t));
                }
                for w in l.enumerate_lassos(t, bound).unwrap() {
                    prop_assert!(l.realize_from(s, &w).is_some(), "{} from {}", w, l.state_name(s));
                }
            }
        }
    }

    #[test]
    fn has_trace_matches_lasso_enumeration(seed in any::<u64>()) {
        let l = random_lts(&mut rng(seed), "L", 6, 2);
        for s in l.states() {
            let some = !l.enumerate_lassos(s, l.num_states() + 1).unwrap().is_empty();
            prop_assert_eq!(l.has_trace(s).unwrap(), some);
        }
    }

    #[test]
    fn realized_runs_spell_the_lasso(seed in any::<u64>()) {
        let l = random_lts(&mut rng(seed), "L", 5, 2);
        for w in l.enumerate_lassos(l.init(), 5).unwrap() {
            let run = l.realize(&w).unwrap();
            prop_assert_eq!(run.word(), w);
        }
    }

    #[test]
    fn lasso_form_is_canonical(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ab = common::events(2);
        let w = random_lasso(&mut r, &ab, 3, 3);
        let (p, c) = (w.prefix().to_vec(), w.cycle().to_vec());
        let doubled = Lasso::new(p.clone(), [c.clone(), c.clone()].concat()).unwrap();
        let unrolled = Lasso::new([p.clone(), c.clone()].concat(), c.clone()).unwrap();
        let mut rotated = c.clone();
        rotated.rotate_left(1);
        let shifted = Lasso::new([p.clone(), vec![c[0].clone()]].concat(), rotated).unwrap();
        prop_assert_eq!(&doubled, &w);
        prop_assert_eq!(&unrolled, &w);
        prop_assert_eq!(&shifted, &w);
        for i in 0..12 {
            let want: &EventLabel = if i < p.len() { &p[i] } else { &c[(i - p.len()) % c.len()] };
            prop_assert_eq!(w.at(i), want);
        }
        let reparsed = Lasso::parse(&w.to_string()).unwrap();
        prop_assert_eq!(reparsed, w);
    }
}
