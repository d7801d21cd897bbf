//! Synthetic abelian-variety models: the path integral over Selmer pairs
//! equals |A(F)/n| |B(F)/n| |Sha(A)[n]| for every choice of injection.

use arith_bf::abgroup::InvariantFactors;
use arith_bf::bf_av::{random_model, AvInstance, AvModel, DeltaChoice, ModelBounds};
use arith_bf::bf_gm::{EnumerationOptions, Mode};

fn main() {
    let opts = EnumerationOptions::default();
    let shape = AvModel {
        n: 3,
        mw_a: InvariantFactors::new(vec![3]).unwrap(),
        mw_b: InvariantFactors::trivial(),
        sha_a: InvariantFactors::new(vec![3, 3]).unwrap(),
        sha_b: InvariantFactors::new(vec![3, 3]).unwrap(),
        delta: DeltaChoice::canonical(),
    };
    for delta in [DeltaChoice::canonical(), DeltaChoice::Seed { seed: 1 }, DeltaChoice::Seed { seed: 2 }] {
        let inst = AvInstance::build(AvModel { delta: delta.clone(), ..shape.clone() }).unwrap();
        let r = inst.path_integral(Mode::Both, &opts).unwrap();
        println!("{}: brute {:?}, closed {}", serde_json::to_string(&delta).unwrap(), r.brute_force_value, r.closed_form_value);
    }

    for seed in 0..5 {
        let m = random_model(seed, 4, ModelBounds::default());
        let (mw_a, mw_b, sha_a) = (m.mw_a.to_string(), m.mw_b.to_string(), m.sha_a.to_string());
        let r = AvInstance::build(m).unwrap().path_integral(Mode::Both, &opts).unwrap();
        println!(
            "seed {seed}: mw_a {mw_a}  mw_b {mw_b}  sha_a {sha_a}  pairs {}  value {:?}",
            r.pair_count, r.brute_force_value
        );
    }
}
