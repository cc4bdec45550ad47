use super::*;
use std::f64::consts::PI;

fn load(text: &str) -> Result<ResolvedConfig, ConfigError> {
    load_scenario_str(text, &[], Path::new("."))
}

#[test]
fn empty_file_is_the_baseline() {
    let cfg = load("").unwrap();
    assert_eq!(cfg.scenario, Scenario::baseline());
    assert_eq!(cfg.mode, Mode::Analytic);
    assert!(cfg.defaults_applied.contains(&"physical.alpha".to_string()));
    assert!(cfg.defaults_applied.contains(&"entity".to_string()));
    assert!(cfg.warnings.is_empty());
    // Oracle: 25 per km² thinned by exp(-π · 1 per km² · (0.2 km)²).
    let thinned_per_km2 = cfg.scenario.eligible_density(crate::geometry::Tier::Cellular) * 1e6;
    let oracle = 25.0 * (-PI * 1.0 * 0.2 * 0.2).exp();
    assert!((thinned_per_km2 - oracle).abs() < 1e-9);
    assert!((thinned_per_km2 - 22.048).abs() < 5e-4);
}

#[test]
fn engineering_units_convert() {
    let cfg = load(
        r#"
        [physical]
        cellular_power = "33 dBm"
        wifi_power = "500 mW"
        incumbent_power = 0.25
        unlicensed_bandwidth_mhz = 160
        cellular_density_per_km2 = 50
        gamma_db = 3
        "#,
    )
    .unwrap();
    let s = &cfg.scenario;
    assert!((s.cellular_power - 10f64.powf(0.3)).abs() < 1e-12);
    assert!((s.cellular_power - 1.995).abs() < 1e-3);
    assert_eq!(s.wifi_power, 0.5);
    assert_eq!(s.incumbent_power, 0.25);
    assert_eq!(s.unlicensed_bandwidth, 160e6);
    assert!((s.cellular_density - 50e-6).abs() < 1e-18);
    assert!((s.sinr_threshold - 10f64.powf(0.3)).abs() < 1e-12);
    assert!(!cfg.defaults_applied.contains(&"physical.cellular_power".to_string()));
}

#[test]
fn share_sums_are_checked_per_field() {
    let err = load(
        r#"
        [[entity]]
        cellular_share = 0.6
        wifi_share = 0.5
        [[entity]]
        cellular_share = 0.6
        wifi_share = 0.5
        "#,
    )
    .unwrap_err();
    match err {
        ConfigError::Invalid { field, reason } => {
            assert_eq!(field, "entity");
            assert!(reason.contains("sum"), "{reason}");
        }
        other => panic!("{other}"),
    }
}

#[test]
fn entities_convert_thresholds_to_bps() {
    let cfg = load(
        r#"
        [[entity]]
        name = "cell"
        cellular_share = 1.0
        cellular_threshold_mbps = 30
        cellular_weight = 7
        [[entity]]
        name = "wifi"
        wifi_share = 1.0
        wifi_threshold_mbps = 120
        "#,
    )
    .unwrap();
    assert_eq!(cfg.entities.len(), 2);
    assert_eq!(cfg.entities[0].cellular_threshold, 30e6);
    assert_eq!(cfg.entities[1].wifi_threshold, 120e6);
    assert_eq!(cfg.entities[1].cellular_share, 0.0);
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(load("[physical]\nlambda_c = 25\n").is_err());
    assert!(load("[garbage]\nx = 1\n").is_err());
    assert!(load("[physical.noise]\nkind = \"thermal\"\nbogus = 1\n").is_err());
    assert!(load("[physical]\nalpha = 1.5\n").is_err());
}

#[test]
fn overrides_set_nested_keys() {
    let text = "[[entity]]\ncellular_share = 1.0\nwifi_share = 1.0\n";
    let cfg = load_scenario_str(
        text,
        &[
            "physical.gamma_db=0".into(),
            "entity.0.name=solo".into(),
            "game.seed=42".into(),
            "montecarlo.wifi_association=uniform_in_range".into(),
            "mode=montecarlo".into(),
        ],
        Path::new("."),
    )
    .unwrap();
    assert_eq!(cfg.scenario.sinr_threshold, 1.0);
    assert_eq!(cfg.entities[0].name, "solo");
    assert_eq!(cfg.game.seed, 42);
    assert_eq!(cfg.montecarlo.wifi_association, WifiAssociation::UniformInRange);
    assert_eq!(cfg.mode, Mode::Montecarlo);

    for bad in [
        "physical.lambda=3",
        "nokey",
        "=3",
        "entity.5.name=x",
        "physical.gamma_db.x=1",
    ] {
        assert!(load_scenario_str(text, &[bad.into()], Path::new(".")).is_err(), "{bad}");
    }
}

#[test]
fn noise_specifications() {
    let cfg = load("[physical.noise]\nkind = \"thermal\"\n").unwrap();
    // -174 dBm/Hz over 240 MHz plus a 7 dB noise figure.
    let oracle = 10f64.powf((-174.0 + 10.0 * 240e6f64.log10() + 7.0 - 30.0) / 10.0);
    assert!((cfg.scenario.noise.cellular - oracle).abs() < 1e-9 * oracle);
    assert!(cfg
        .defaults_applied
        .contains(&"physical.noise.noise_figure_db".to_string()));
    let cfg = load("[physical.noise]\nkind = \"explicit\"\ncellular_w = 1e-12\nwifi_w = 2e-12\n").unwrap();
    assert_eq!(cfg.scenario.noise.wifi, 2e-12);
    assert!(load("[physical.noise]\nkind = \"explicit\"\ncellular_w = -1.0\nwifi_w = 0.0\n").is_err());
}

#[test]
fn out_of_range_values_warn_only() {
    let cfg = load("[physical]\nunlicensed_bandwidth_mhz = 100\ncellular_power = \"40 dBm\"\n").unwrap();
    assert_eq!(cfg.warnings.len(), 2, "{:?}", cfg.warnings);
}

#[test]
fn gamma_ranges() {
    let r: GammaRange = "-10:20:1".parse().unwrap();
    let v = r.values();
    assert_eq!(v.len(), 31);
    assert_eq!(v[0], -10.0);
    assert_eq!(v[30], 20.0);
    assert_eq!("0:1:0.25".parse::<GammaRange>().unwrap().values().len(), 5);
    for bad in ["1:0:1", "0:1:0", "a:b:c", "0:1"] {
        assert!(bad.parse::<GammaRange>().is_err(), "{bad}");
    }
}

#[test]
fn casestudy_needs_its_section() {
    assert!(load("mode = \"casestudy\"\n").is_err());
    let cfg = load("[casestudy]\ngeodata = \"sites.csv\"\n").unwrap();
    let cs = cfg.casestudy.unwrap();
    assert_eq!(cs.geodata, Path::new("./sites.csv"));
    assert_eq!(cs.bbox.lat_min, 55.85);
}

#[test]
fn power_strings() {
    assert!((parse_power("30 dBm").unwrap() - 1.0).abs() < 1e-12);
    assert!((parse_power("2W").unwrap() - 2.0).abs() < 1e-12);
    assert!(parse_power("30").is_err());
    assert!(parse_power("loud W").is_err());
}
