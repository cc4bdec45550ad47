//! A cellular-only operator against a WiFi-only operator, played with
//! distributed best responses on the analytic payoffs.

use std::path::Path;

use coexist::game::Outcome;
use coexist::scenario_io::load_scenario;
use coexist::workflows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/cellular_vs_wifi.toml");
    let cfg = load_scenario(&path, &[])?;
    let report = workflows::play(&cfg)?;

    match &report.run.outcome {
        Outcome::Converged { profile, activations } => {
            println!("converged after {activations} activations");
            for (e, a) in report.entities.iter().zip(profile) {
                println!("  {}: delta_c = {:.1}, delta_w = {:.1}", e.name, a.cellular, a.wifi);
            }
        }
        Outcome::NonTerminated { activations } => {
            println!("still cycling after {activations} activations; post-burn-in play:");
            for (e, m) in report.entities.iter().zip(&report.mixed) {
                for (a, p) in &m.support {
                    println!(
                        "  {}: ({:.1}, {:.1}) with probability {p:.3}",
                        e.name, a.cellular, a.wifi
                    );
                }
            }
        }
    }
    for (e, r) in report.entities.iter().zip(&report.rates) {
        println!(
            "  {} rates: cellular {:.1} Mbps, wifi {:.1} Mbps",
            e.name,
            r.cellular / 1e6,
            r.wifi / 1e6
        );
    }
    Ok(())
}
