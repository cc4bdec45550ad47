//! Node locations from a `lon,lat,kind[,owner]` CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ConfigError;
use crate::geometry::{draw_owner, Deployment, ExclusionZones, Node, Point, Tier};
use crate::rng::SeedTree;

/// Equatorial radius used by the projection (m).
pub const EARTH_RADIUS_M: f64 = 6_378_137.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
}

impl BoundingBox {
    pub fn validate(&self) -> Result<(), String> {
        let ok = self.lat_min < self.lat_max
            && self.lon_min < self.lon_max
            && (-90.0..=90.0).contains(&self.lat_min)
            && (-90.0..=90.0).contains(&self.lat_max)
            && (-180.0..=180.0).contains(&self.lon_min)
            && (-180.0..=180.0).contains(&self.lon_max);
        if ok {
            Ok(())
        } else {
            Err(format!("invalid bounding box {self:?}"))
        }
    }

    pub fn contains(&self, lon: f64, lat: f64) -> bool {
        (self.lat_min..=self.lat_max).contains(&lat) && (self.lon_min..=self.lon_max).contains(&lon)
    }

    /// `(lon, lat)` of the centre.
    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.lon_min + self.lon_max), 0.5 * (self.lat_min + self.lat_max))
    }
}

/// Equirectangular projection about `(lon0, lat0)` to local metres.
pub fn project(lon: f64, lat: f64, (lon0, lat0): (f64, f64)) -> Point {
    Point::new(
        EARTH_RADIUS_M * (lon - lon0).to_radians() * lat0.to_radians().cos(),
        EARTH_RADIUS_M * (lat - lat0).to_radians(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeoKind {
    Bs,
    Ap,
    Incumbent,
}

impl GeoKind {
    fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bs" => Some(GeoKind::Bs),
            "ap" => Some(GeoKind::Ap),
            "incumbent" => Some(GeoKind::Incumbent),
            _ => None,
        }
    }

    pub fn tier(&self) -> Tier {
        match self {
            GeoKind::Bs => Tier::Cellular,
            GeoKind::Ap => Tier::Wifi,
            GeoKind::Incumbent => Tier::Incumbent,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoRecord {
    pub lon: f64,
    pub lat: f64,
    pub kind: GeoKind,
    pub owner: Option<usize>,
}

#[derive(Debug, Deserialize)]
struct Row {
    lon: f64,
    lat: f64,
    kind: String,
    #[serde(default)]
    owner: Option<usize>,
}

/// A projected deployment with owners and exclusion zones.
#[derive(Debug, Clone)]
pub struct Geodata {
    pub records: Vec<GeoRecord>,
    pub deployment: Deployment,
    pub zones: ExclusionZones,
    /// Rows outside the bounding box.
    pub dropped: usize,
}

/// Load, clip to `bbox`, project about its centre and assign owners.
///
/// Rows with an `owner` keep it; the rest are drawn by the per-tier
/// `(cellular, wifi)` shares from a stream seeded by `owner_seed`.
/// Incumbents get exclusion zones of `exclusion_radius`.
pub fn load_geodata(
    path: &Path,
    bbox: &BoundingBox,
    shares: &[(f64, f64)],
    exclusion_radius: f64,
    owner_seed: u64,
) -> Result<Geodata, ConfigError> {
    let fail = |reason: String| ConfigError::Geodata {
        path: path.to_path_buf(),
        reason,
    };
    bbox.validate().map_err(fail)?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| fail(e.to_string()))?;
    let center = bbox.center();
    let cellular: Vec<f64> = shares.iter().map(|s| s.0).collect();
    let wifi: Vec<f64> = shares.iter().map(|s| s.1).collect();
    let mut rng = SeedTree::new(owner_seed).stream("geodata-owners");

    let mut records = Vec::new();
    let mut nodes = Vec::new();
    let mut dropped = 0;
    for (line, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| fail(format!("row {}: {e}", line + 2)))?;
        let kind =
            GeoKind::parse(&row.kind).ok_or_else(|| fail(format!("row {}: unknown kind `{}`", line + 2, row.kind)))?;
        if !bbox.contains(row.lon, row.lat) {
            dropped += 1;
            continue;
        }
        let tier = kind.tier();
        let owner = match (tier, row.owner) {
            (Tier::Incumbent, _) => None,
            (_, Some(o)) if o < shares.len() => Some(o),
            (_, Some(o)) => {
                return Err(fail(format!(
                    "row {}: owner {o} but only {} entities",
                    line + 2,
                    shares.len()
                )))
            }
            (Tier::Cellular, None) => Some(draw_owner(&cellular, &mut rng)),
            (_, None) => Some(draw_owner(&wifi, &mut rng)),
        };
        let mut node = Node::new(project(row.lon, row.lat, center), tier);
        node.owner = owner;
        nodes.push(node);
        records.push(GeoRecord {
            lon: row.lon,
            lat: row.lat,
            kind,
            owner,
        });
    }
    if nodes.iter().all(|n| n.tier == Tier::Incumbent) {
        return Err(fail("no base stations or access points inside the bounding box".into()));
    }
    let deployment = Deployment::new(nodes);
    let zones = ExclusionZones::around_incumbents(&deployment, exclusion_radius).map_err(|e| fail(e.to_string()))?;
    Ok(Geodata {
        records,
        deployment,
        zones,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    const BOX: BoundingBox = BoundingBox {
        lat_min: 55.85,
        lat_max: 55.867,
        lon_min: -4.29,
        lon_max: -4.265,
    };

    fn csv_file(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    #[test]
    fn projection_origin_and_scale() {
        let c = BOX.center();
        let origin = project(c.0, c.1, c);
        assert!(origin.norm() < 1e-9);
        let one_degree = project(1.0, 55.86, (0.0, 55.86)).x;
        // Oracle: 111,320 m per degree at the equator, shrunk by the cosine.
        let oracle = 111_320.0 * 55.86f64.to_radians().cos();
        assert!((one_degree - oracle).abs() < 10.0, "{one_degree} vs {oracle}");
        // The rounded figure often quoted for this latitude is 62,452 m.
        assert!((one_degree / 62_452.0 - 1.0).abs() < 1e-3);
        let north = project(c.0, c.1 + 0.001, c);
        assert!(north.x.abs() < 1e-9 && north.y > 0.0);
    }

    #[test]
    fn rows_outside_the_box_are_dropped() {
        let f = csv_file("lon,lat,kind\n-4.28,55.86,bs\n-4.27,55.855,ap\n-4.50,55.86,bs\n-4.275,55.86,incumbent\n");
        let g = load_geodata(f.path(), &BOX, &[(1.0, 1.0)], 200.0, 1).unwrap();
        assert_eq!(g.dropped, 1);
        assert_eq!(g.deployment.len(), 3);
        assert_eq!(g.zones.centers().len(), 1);
        assert!(g
            .deployment
            .iter()
            .all(|n| (n.tier == Tier::Incumbent) == n.owner.is_none()));
    }

    #[test]
    fn explicit_owners_are_kept_and_checked() {
        let f = csv_file("lon,lat,kind,owner\n-4.28,55.86,bs,1\n-4.27,55.855,ap,\n");
        let g = load_geodata(f.path(), &BOX, &[(0.5, 0.5), (0.5, 0.5)], 200.0, 1).unwrap();
        assert_eq!(g.records[0].owner, Some(1));
        assert!(g.records[1].owner.is_some());
        let bad = csv_file("lon,lat,kind,owner\n-4.28,55.86,bs,3\n");
        assert!(load_geodata(bad.path(), &BOX, &[(1.0, 1.0)], 200.0, 1).is_err());
    }

    #[test]
    fn unknown_kind_and_empty_sets_fail() {
        let f = csv_file("lon,lat,kind\n-4.28,55.86,tower\n");
        let err = load_geodata(f.path(), &BOX, &[(1.0, 1.0)], 200.0, 1).unwrap_err();
        assert!(err.to_string().contains("unknown kind"));
        let outside = csv_file("lon,lat,kind\n-5.0,55.86,bs\n");
        assert!(load_geodata(outside.path(), &BOX, &[(1.0, 1.0)], 200.0, 1).is_err());
    }

    #[test]
    fn owner_draws_follow_the_seed() {
        let body: String = std::iter::once("lon,lat,kind\n".to_string())
            .chain((0..50).map(|k| format!("{},{},ap\n", -4.29 + 0.0004 * k as f64, 55.86)))
            .collect();
        let f = csv_file(&body);
        let shares = [(0.5, 0.3), (0.5, 0.7)];
        let a = load_geodata(f.path(), &BOX, &shares, 200.0, 4).unwrap();
        let b = load_geodata(f.path(), &BOX, &shares, 200.0, 4).unwrap();
        let c = load_geodata(f.path(), &BOX, &shares, 200.0, 5).unwrap();
        assert_eq!(a.records, b.records);
        assert_ne!(a.records, c.records);
    }
}
