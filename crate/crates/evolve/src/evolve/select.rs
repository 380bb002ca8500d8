use netrobust_core::SearchRng;
use rand::Rng;

use super::Individual;

/// Added to every roulette weight so all-zero pools still draw uniformly.
pub const ROULETTE_EPSILON: f64 = 1e-9;

fn fitness(ind: &Individual) -> f64 {
    ind.fitness.expect("selection needs evaluated individuals")
}

/// Best of `k` uniform draws with replacement; ties go to the lowest id.
pub fn tournament_select<'a>(pop: &'a [Individual], k: usize, rng: &mut SearchRng) -> &'a Individual {
    assert!(!pop.is_empty() && k >= 1);
    let mut best = &pop[rng.random_range(0..pop.len())];
    for _ in 1..k {
        let c = &pop[rng.random_range(0..pop.len())];
        if fitness(c) > fitness(best) || (fitness(c) == fitness(best) && c.id < best.id) {
            best = c;
        }
    }
    best
}

/// `count` distinct members of `pool`, drawn without replacement with
/// probability proportional to fitness + ε. Returned in id order.
pub fn roulette_survivors(mut pool: Vec<Individual>, count: usize, rng: &mut SearchRng) -> Vec<Individual> {
    let mut chosen = Vec::with_capacity(count.min(pool.len()));
    while chosen.len() < count && !pool.is_empty() {
        let total: f64 = pool.iter().map(|i| fitness(i) + ROULETTE_EPSILON).sum();
        let mut r = rng.random::<f64>() * total;
        let mut pick = pool.len() - 1;
        for (k, ind) in pool.iter().enumerate() {
            r -= fitness(ind) + ROULETTE_EPSILON;
            if r < 0.0 {
                pick = k;
                break;
            }
        }
        chosen.push(pool.swap_remove(pick));
    }
    chosen.sort_by_key(|i| i.id);
    chosen
}
