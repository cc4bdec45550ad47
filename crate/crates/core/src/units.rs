//! Unit conversions used at the configuration boundary. Everything past the
//! boundary is SI and linear.

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w * 1e3)
}

pub fn per_km2_to_per_m2(x: f64) -> f64 {
    x * 1e-6
}

pub fn per_m2_to_per_km2(x: f64) -> f64 {
    x * 1e6
}

pub fn mhz_to_hz(x: f64) -> f64 {
    x * 1e6
}

pub fn mbps_to_bps(x: f64) -> f64 {
    x * 1e6
}

pub fn bps_to_mbps(x: f64) -> f64 {
    x * 1e-6
}

/// Receiver noise power in watts: `psd_dbm_hz + 10 log10(B) + NF`.
pub fn thermal_noise_watts(bandwidth_hz: f64, psd_dbm_per_hz: f64, noise_figure_db: f64) -> f64 {
    dbm_to_watts(psd_dbm_per_hz + linear_to_db(bandwidth_hz) + noise_figure_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dbm_examples() {
        assert!((dbm_to_watts(33.0) - 1.995_262_315).abs() < 1e-8);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-12);
        assert!((db_to_linear(10.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_noise_over_80_mhz() {
        // -174 + 79.03 + 10 = -84.97 dBm
        let n = thermal_noise_watts(80e6, -174.0, 10.0);
        assert!((watts_to_dbm(n) + 84.969_100_130).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn dbm_round_trip(dbm in -150.0f64..60.0) {
            let back = watts_to_dbm(dbm_to_watts(dbm));
            prop_assert!((back - dbm).abs() <= 1e-9 * dbm.abs().max(1.0));
        }

        #[test]
        fn db_round_trip(db in -60.0f64..60.0) {
            let x = db_to_linear(db);
            prop_assert!((linear_to_db(x) - db).abs() <= 1e-9 * db.abs().max(1.0));
            prop_assert!((db_to_linear(linear_to_db(x)) - x).abs() <= 1e-9 * x);
        }
    }
}
