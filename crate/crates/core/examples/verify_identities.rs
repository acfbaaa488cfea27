//! Randomized verification through the registry, as the `verify` command does.

use ellhyp::registry::{check_identity, list_identities, CheckOptions};
use ellhyp::report::SuiteReport;
use ellhyp::{Result, TruncationPolicy};

fn main() -> Result<()> {
    let ids = ["frenkel-turaev-10v9", "taylor-expansion", "gamma-structural"];
    let opts = CheckOptions {
        trials: 40,
        seed: 7,
        ..CheckOptions::default()
    };
    let results = ids.iter().map(|id| check_identity(id, &opts)).collect::<Result<Vec<_>>>()?;
    let report = SuiteReport {
        suite_seed: opts.seed,
        policy: TruncationPolicy::default(),
        results,
    };
    print!("{}", report.to_human());

    // a right-hand side off by one part in a million is caught at every point
    let broken = CheckOptions { rhs_scale: 1.0 + 1e-6, ..opts };
    let r = check_identity("frenkel-turaev-10v9", &broken)?;
    println!("perturbed: {}/{} points flagged", r.failures.len(), r.trials);
    println!("{} identities registered", list_identities().len());
    Ok(())
}
