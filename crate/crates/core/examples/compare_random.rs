//! Best-response play against uniformly random utilization over a batch of
//! randomly drawn two-entity markets.

use std::path::Path;

use coexist::scenario_io::load_scenario;
use coexist::workflows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/two_entity.toml");
    let cfg = load_scenario(&path, &[])?;
    let comparison = workflows::compare_random(&cfg.scenario, &cfg.compare_random, &cfg.game)?;
    let (d, r, gain) = (
        comparison.dbra_mean(),
        comparison.random_mean(),
        comparison.improvement(),
    );
    println!("{} runs", comparison.runs.len());
    println!(
        "cellular: best response {:.1} Mbps, random {:.1} Mbps ({:+.1}%)",
        d.cellular / 1e6,
        r.cellular / 1e6,
        100.0 * gain.cellular
    );
    println!(
        "wifi:     best response {:.1} Mbps, random {:.1} Mbps ({:+.1}%)",
        d.wifi / 1e6,
        r.wifi / 1e6,
        100.0 * gain.wifi
    );
    Ok(())
}
