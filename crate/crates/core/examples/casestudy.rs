//! The game on the bundled city-centre sites, with rates measured on the
//! deployment itself.

use std::path::Path;

use coexist::scenario_io::load_scenario;
use coexist::workflows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/glasgow.toml");
    let cfg = load_scenario(&path, &[])?;
    let (_, deployment) = workflows::casestudy_network(&cfg)?;
    println!("{} sites inside the bounding box", deployment.len());

    let report = workflows::play(&cfg)?;
    println!(
        "{} activations, converged: {}",
        report.run.trace.len(),
        report.converged()
    );
    for ((e, r), m) in report.entities.iter().zip(&report.rates).zip(&report.mixed) {
        let (top, p) = m
            .support
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty support");
        println!(
            "  {}: cellular {:.1} Mbps, wifi {:.1} Mbps, most played ({:.1}, {:.1}) at {:.2}",
            e.name,
            r.cellular / 1e6,
            r.wifi / 1e6,
            top.cellular,
            top.wifi,
            p
        );
    }
    Ok(())
}
