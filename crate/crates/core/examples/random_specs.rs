//! Compare the type checker with the oracle on random specifications.
use murtlola::generate::{random_spec, GenConfig};
use murtlola::oracle::{check_consistency, OracleConfig, OracleVerdict};
use murtlola::typecheck::{type_spec, Extensions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let cfg = OracleConfig::new(3, [0, 1]).unwrap();
    let mut counts = [[0usize; 2]; 2];
    for _ in 0..100 {
        let spec = random_spec(&mut rng, &GenConfig::default());
        let accepted = type_spec(&spec, Extensions::ALL).is_ok();
        let consistent =
            matches!(check_consistency(&spec, &cfg), Ok(OracleVerdict::ConsistentOnTested { .. }));
        counts[accepted as usize][consistent as usize] += 1;
        if accepted && !consistent {
            println!("accepted but inconsistent:\n{spec}");
        }
    }
    println!("accepted & consistent:   {}", counts[1][1]);
    println!("accepted & inconsistent: {}", counts[1][0]);
    println!("rejected & consistent:   {}", counts[0][1]);
    println!("rejected & other:        {}", counts[0][0]);
}
