//! Seeded instances shared by the criterion benches.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qramsynth::cqsp::CqspSpec;
use qramsynth::linalg::{haar_unitary, random_state, CMat};
use qramsynth::C64;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn state(n: usize, seed: u64) -> Vec<C64> {
    random_state(1 << n, &mut rng(seed))
}

pub fn unitary(n: usize, seed: u64) -> CMat {
    haar_unitary(1 << n, &mut rng(seed))
}

pub fn cqsp_spec(k: usize, n: usize, seed: u64) -> CqspSpec {
    let mut r = rng(seed);
    let states = (0..1 << k).map(|_| random_state(1 << n, &mut r)).collect();
    CqspSpec::new(k, n, states).expect("random states are normalized")
}
