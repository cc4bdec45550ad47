//! Network-wide datarates over the utilization grid and where they peak.

use coexist::analytic::Scenario;
use coexist::workflows;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let surface = workflows::rate_surface(&Scenario::baseline(), 0.1)?;
    let (c, w) = surface.cellular_argmax();
    println!("cellular rate peaks at delta_c = {c:.1}, delta_w = {w:.1}");
    let (c, w) = surface.wifi_argmax();
    println!("wifi rate peaks at delta_c = {c:.1}, delta_w = {w:.1}");
    println!("best delta_w for wifi, by delta_c:");
    for (dc, dw) in surface.deltas.iter().zip(surface.wifi_best_delta_w()) {
        println!("  {dc:.1} -> {dw:.1}");
    }
    Ok(())
}
