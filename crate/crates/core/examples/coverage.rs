//! Analytic coverage of the four tier/band links against a short Monte
//! Carlo run at the baseline utilization.

use coexist::analytic::{Scenario, Utilization};
use coexist::montecarlo::McConfig;
use coexist::workflows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::baseline();
    let util = Utilization::new(0.7, 0.2)?;
    let gamma_db = [-10.0, 0.0, 10.0, 20.0];
    let mc = McConfig::new(400, 1, Vec::new());
    let points = workflows::coverage_curves(&scenario, util, &gamma_db, Some(&mc))?;

    println!(
        "{:>6} {:>4} {:>4} {:>9} {:>9} {:>8}",
        "gamma", "tier", "band", "analytic", "simulated", "ci99"
    );
    for p in &points {
        let e = p.simulated.expect("simulation requested");
        println!(
            "{:>6} {:>4} {:>4} {:>9.4} {:>9.4} {:>8.4}",
            p.gamma_db,
            p.tier.label(),
            p.band.label(),
            p.analytic,
            e.p_hat,
            e.ci99
        );
    }
    Ok(())
}
