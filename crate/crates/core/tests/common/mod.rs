#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tricycle::protocol::{Bath, BranchProtocol, Phase, Reservoir, TricycleParams};

pub fn random_bath(rng: &mut ChaCha8Rng) -> Bath {
    Bath {
        temperature: rng.gen_range(0.05..2.0),
        gamma0: rng.gen_range(0.2..5.0),
        alpha: rng.gen_range(-0.5..1.5),
    }
}

pub fn random_branch(rng: &mut ChaCha8Rng) -> BranchProtocol {
    let reservoir = Reservoir::CYCLE[rng.gen_range(0..3)];
    let phase = if rng.gen_bool(0.5) { Phase::Decreasing } else { Phase::Increasing };
    BranchProtocol::new(
        reservoir,
        random_bath(rng),
        rng.gen_range(0.05..1.5),
        rng.gen_range(1.05..4.0),
        phase,
    )
    .unwrap()
}

pub fn random_params(rng: &mut ChaCha8Rng) -> TricycleParams {
    let t_c = rng.gen_range(0.05..0.5);
    let t_h = rng.gen_range(0.6..2.0);
    let t_p = rng.gen_range(t_c + 0.02 * (t_h - t_c)..t_h - 0.02 * (t_h - t_c));
    TricycleParams {
        t_c,
        t_h,
        t_p,
        zeta_c: rng.gen_range(1.05..4.0),
        zeta_h: rng.gen_range(1.05..4.0),
        delta_c: rng.gen_range(0.05..1.5),
        gamma0: rng.gen_range(0.2..5.0),
        alpha: rng.gen_range(-0.5..1.5),
    }
}
