mod common;

use common::{all_lassos, atom_names, atoms, events, naive_models, random_formula, random_lasso, rng};
use hyperprove::relspec::{
    closure, derive, lasso_models_derivative, lasso_models_direct, AtomTable, Formula,
    FormulaId,
};
use hyperprove::{EventLabel, Lasso};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64, arity: usize) -> (Formula, AtomTable, Vec<EventLabel>, Vec<Lasso>) {
    let mut r = rng(seed);
    let names = atom_names(&mut r);
    let f = random_formula(&mut r, 3, &names);
    let ab = events(2);
    let es: Vec<EventLabel> = (0..arity).map(|_| ab.choose(&mut r).unwrap().clone()).collect();
    let ls: Vec<Lasso> = (0..arity).map(|_| random_lasso(&mut r, &ab, 2, 3)).collect();
    (f, atoms(arity), es, ls)
}

fn arity(r: &mut ChaCha8Rng) -> usize {
    use rand::Rng;
    r.gen_range(1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn printed_formulas_parse_back(seed in any::<u64>()) {
        let mut r = rng(seed);
        let names = atom_names(&mut r);
        let f = random_formula(&mut r, 4, &names);
        prop_assert_eq!(Formula::parse(&f.to_string()).unwrap(), f.clone());
        let c = f.canonicalize();
        prop_assert_eq!(Formula::parse(&c.to_string()).unwrap().canonicalize(), c);
    }

    #[test]
    fn direct_evaluator_matches_naive_unfolding(seed in any::<u64>()) {
        let n = arity(&mut rng(seed ^ 1));
        let (f, atoms, _, ls) = sample(seed, n);
        prop_assert_eq!(lasso_models_direct(&ls, &f, &atoms).unwrap(), naive_models(&ls, &f, &atoms), "{}", f);
    }

    #[test]
    fn derivative_law(seed in any::<u64>()) {
        let n = arity(&mut rng(seed ^ 1));
        let (f, atoms, es, ls) = sample(seed, n);
        let longer: Vec<Lasso> = ls.iter().zip(&es).map(|(l, e)| l.prepend(e.clone())).collect();
        let d = derive(&f, &es, &atoms);
        prop_assert_eq!(
            lasso_models_direct(&longer, &f, &atoms).unwrap(),
            lasso_models_direct(&ls, &d, &atoms).unwrap(),
            "{} by {:?} = {}", f, es, d
        );
    }

    #[test]
    fn evaluators_agree(seed in any::<u64>()) {
        let n = arity(&mut rng(seed ^ 1));
        let (f, atoms, _, ls) = sample(seed, n);
        prop_assert_eq!(
            lasso_models_direct(&ls, &f, &atoms).unwrap(),
            lasso_models_derivative(&ls, &f, &atoms).unwrap(),
            "{}", f
        );
    }

    #[test]
    fn canonicalize_is_idempotent_and_sound(seed in any::<u64>()) {
        let (f, atoms, _, ls) = sample(seed, 2);
        let c = f.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert_eq!(lasso_models_direct(&ls, &f, &atoms).unwrap(), lasso_models_direct(&ls, &c, &atoms).unwrap());
    }
}

/// Joint lassos over pairs of letters, split back into one lasso per component.
fn pair_lassos(max_len: usize) -> Vec<Vec<Lasso>> {
    let ab = events(2);
    let joint: Vec<EventLabel> = (0..4).map(|i| EventLabel::sym(&format!("j{i}"))).collect();
    let split = |e: &EventLabel, k: usize| {
        let i: usize = e.to_string()[1..].parse().unwrap();
        ab[if k == 0 { i / 2 } else { i % 2 }].clone()
    };
    all_lassos(&joint, max_len)
        .into_iter()
        .map(|l| {
            (0..2)
                .map(|k| {
                    let p = l.prefix().iter().map(|e| split(e, k)).collect();
                    let c = l.cycle().iter().map(|e| split(e, k)).collect();
                    Lasso::new(p, c).unwrap()
                })
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nonempty_matches_bounded_models(seed in any::<u64>()) {
        let (f, atoms, _, _) = sample(seed, 2);
        let ab = events(2);
        let (_, g) = closure(&f, &[ab.clone(), ab], &atoms, 1000).unwrap();
        prop_assume!(g.len() <= 4);
        let some = pair_lassos(g.len() + 1).iter().any(|ls| lasso_models_direct(ls, &f, &atoms).unwrap());
        prop_assert_eq!(g.nonempty(g.root()), some, "{}", f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn nonempty_set_is_closed_under_derivatives(seed in any::<u64>()) {
        let (f, atoms, _, _) = sample(seed, 2);
        let ab = events(2);
        let (_, g) = closure(&f, &[ab.clone(), ab.clone()], &atoms, 1000).unwrap();
        for &n in g.nodes() {
            let some_succ = ab.iter().flat_map(|x| ab.iter().map(move |y| vec![x.clone(), y.clone()]))
                .any(|es| g.nonempty(g.step(n, &es).unwrap()));
            match n {
                FormulaId::TRUE => prop_assert!(g.nonempty(n)),
                FormulaId::FALSE => prop_assert!(!g.nonempty(n)),
                _ => prop_assert_eq!(g.nonempty(n), some_succ),
            }
        }
    }
}
