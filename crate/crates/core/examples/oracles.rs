//! The closed-form self-checks behind the `validate` command.

use coexist::analytic::{zeta, Scenario};
use coexist::workflows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for gamma in [1.0, 10.0, 100.0] {
        println!("zeta({gamma}, 4) = {:.6}", zeta(gamma, 4.0)?);
    }
    for check in workflows::self_checks(&Scenario::baseline())? {
        println!(
            "{} {}: {:.9} vs {:.9}",
            if check.passed() { "ok  " } else { "FAIL" },
            check.name,
            check.value,
            check.expected
        );
    }
    Ok(())
}
