//! Seeded generation of random complete MMTs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mmt::{Mmt, MmtBuilder};
use crate::zones::build_zone_mmt;

/// Shape of a generated machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomSpec {
    pub states: usize,
    pub timers: usize,
    pub inputs: usize,
    pub outputs: usize,
    pub max_constant: u32,
    pub seed: u64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        RandomSpec {
            states: 4,
            timers: 2,
            inputs: 2,
            outputs: 2,
            max_constant: 3,
            seed: 0,
        }
    }
}

/// A random complete MMT with the given shape, before the zone construction.
pub fn random_raw_mmt(spec: &RandomSpec) -> Mmt {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.states.max(1);
    let timers: Vec<String> = (1..=spec.timers).map(|k| format!("x{k}")).collect();
    let inputs: Vec<String> = (0..spec.inputs.max(1)).map(|k| format!("i{k}")).collect();
    let outputs: Vec<String> = (0..spec.outputs.max(1)).map(|k| format!("o{k}")).collect();
    let states: Vec<String> = (0..n).map(|k| format!("q{k}")).collect();
    let active: Vec<Vec<usize>> = (0..n)
        .map(|q| {
            if q == 0 {
                Vec::new()
            } else {
                (0..timers.len()).filter(|_| rng.gen_bool(0.5)).collect()
            }
        })
        .collect();

    let mut b = MmtBuilder::new();
    for x in &timers {
        b.add_timer(x);
    }
    for i in &inputs {
        b.add_input(i);
    }
    for o in &outputs {
        b.add_output(o);
    }
    for (q, name) in states.iter().enumerate() {
        let act: Vec<&str> = active[q].iter().map(|x| timers[*x].as_str()).collect();
        b.add_state(name, &act);
    }

    for q in 0..n {
        let mut actions: Vec<(String, Option<usize>)> =
            inputs.iter().map(|i| (i.clone(), None)).collect();
        for &x in &active[q] {
            actions.push((format!("to[{}]", timers[x]), Some(x)));
        }
        for (action, expired) in actions {
            let start = if timers.is_empty() || rng.gen_bool(0.4) {
                None
            } else {
                let y = match expired {
                    Some(x) => x,
                    None => rng.gen_range(0..timers.len()),
                };
                Some((y, rng.gen_range(1..=spec.max_constant.max(1))))
            };
            let kept: Vec<usize> = active[q]
                .iter()
                .copied()
                .filter(|x| Some(*x) != expired)
                .chain(start.map(|s| s.0))
                .collect();
            let targets: Vec<usize> = (0..n)
                .filter(|p| active[*p].iter().all(|x| kept.contains(x)))
                .collect();
            let keeping: Vec<usize> = match start {
                Some((y, _)) => targets
                    .iter()
                    .copied()
                    .filter(|p| active[*p].contains(&y))
                    .collect(),
                None => Vec::new(),
            };
            let pool = if keeping.is_empty() {
                &targets
            } else {
                &keeping
            };
            let to = *pool
                .choose(&mut rng)
                .expect("the initial state is a target");
            let start = start.filter(|(y, _)| active[to].contains(y));
            let o = &outputs[rng.gen_range(0..outputs.len())];
            b.add_edge(
                &states[q],
                &action,
                &states[to],
                o,
                start.map(|(y, c)| (timers[y].as_str(), c)),
            );
        }
    }
    b.build().expect("generated machine is well-formed")
}

/// A random complete MMT whose every run is feasible: the zone machine of
/// [`random_raw_mmt`].
pub fn random_mmt(spec: &RandomSpec) -> Mmt {
    build_zone_mmt(&random_raw_mmt(spec)).mmt
}
