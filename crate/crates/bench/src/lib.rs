//! Shared inputs for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skec_core::bounds::PlanLengths;
use skec_core::{make_bsc_pair, Alphabet, BlockPlan, IccCodebook, JointPmf, Pmf, TwoDmbcSetup};

/// The same BSC pair in both directions.
pub fn bsc_setup(p_legit: f64, p_eve: f64) -> TwoDmbcSetup {
    let d = make_bsc_pair(p_legit, p_eve).expect("crossovers in [0, 0.5]");
    TwoDmbcSetup::new(d.clone(), d)
}

/// A random law over `sizes`, seeded.
pub fn random_joint(sizes: &[usize], seed: u64) -> JointPmf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells: usize = sizes.iter().product();
    let w: Vec<f64> = (0..cells).map(|_| rng.random::<f64>()).collect();
    let t: f64 = w.iter().sum();
    let alphabets = sizes.iter().map(|&n| Alphabet::new(n).expect("small alphabet")).collect();
    JointPmf::new(alphabets, w.iter().map(|x| x / t).collect()).expect("normalized")
}

/// Special-case codebook with a constraint-tight plan of `total` channel uses.
pub fn special_codebook(setup: &TwoDmbcSetup, total: usize, seed: u64) -> IccCodebook {
    let u = Pmf::uniform(2).expect("binary");
    let (plan, _) =
        BlockPlan::special(setup, &u, &u, PlanLengths::Tight { total }, 0.05, None).expect("feasible plan");
    IccCodebook::build_special(setup, &u, &u, &plan, &mut ChaCha8Rng::seed_from_u64(seed)).expect("codebook")
}
