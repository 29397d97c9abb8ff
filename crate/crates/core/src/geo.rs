//! Great-circle distances on a spherical Earth and the city gazetteer.

use std::collections::BTreeMap;

/// Latitude and longitude in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    latitude: f64,
    longitude: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeoError {
    #[error("latitude {0} outside [-90, 90]")]
    Latitude(f64),
    #[error("longitude {0} outside [-180, 180]")]
    Longitude(f64),
    #[error("earth radius must be positive, got {0}")]
    Radius(f64),
    #[error("ungeocodable city `{key}`")]
    Ungeocodable { key: String },
}

impl GeoPoint {
    pub fn new(latitude: f64, longitude: f64) -> Result<Self, GeoError> {
        if !(-90.0..=90.0).contains(&latitude) {
            return Err(GeoError::Latitude(latitude));
        }
        if !(-180.0..=180.0).contains(&longitude) {
            return Err(GeoError::Longitude(longitude));
        }
        Ok(GeoPoint { latitude, longitude })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }
}

/// Spherical Earth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthModel {
    radius_km: f64,
}

impl EarthModel {
    pub const MEAN_RADIUS_KM: f64 = 6371.0;

    pub fn new(radius_km: f64) -> Result<Self, GeoError> {
        if radius_km > 0.0 && radius_km.is_finite() {
            Ok(EarthModel { radius_km })
        } else {
            Err(GeoError::Radius(radius_km))
        }
    }

    pub fn radius_km(&self) -> f64 {
        self.radius_km
    }
}

impl Default for EarthModel {
    fn default() -> Self {
        EarthModel { radius_km: Self::MEAN_RADIUS_KM }
    }
}

/// Haversine great-circle distance in kilometres.
///
/// Uses the `atan2` form of the central angle, which stays well conditioned
/// near antipodal points where the `asin` form loses precision.
pub fn haversine_distance(a: GeoPoint, b: GeoPoint, model: &EarthModel) -> f64 {
    let lat1 = a.latitude.to_radians();
    let lat2 = b.latitude.to_radians();
    let dlat = (b.latitude - a.latitude).to_radians();
    let dlon = (b.longitude - a.longitude).to_radians();

    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    let h = h.clamp(0.0, 1.0);
    let c = 2.0 * h.sqrt().atan2((1.0 - h).sqrt());
    model.radius_km * c
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityCoordinate {
    /// `City,CC` key.
    pub city: String,
    pub point: GeoPoint,
}

/// Exact-key city lookup table, keyed by `City,CC`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gazetteer {
    entries: BTreeMap<String, CityCoordinate>,
}

impl Gazetteer {
    pub fn from_map(entries: BTreeMap<String, CityCoordinate>) -> Self {
        Gazetteer { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&CityCoordinate> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CityCoordinate> {
        self.entries.values()
    }
}

/// Looks up `key` after trimming it. Matching is case-sensitive.
pub fn geocode_city(gazetteer: &Gazetteer, key: &str) -> Result<GeoPoint, GeoError> {
    let key = key.trim();
    gazetteer
        .get(key)
        .map(|c| c.point)
        .ok_or_else(|| GeoError::Ungeocodable { key: key.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn p(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn reference_distances() {
        let m = EarthModel::default();
        assert_eq!(haversine_distance(p(12.0, 34.0), p(12.0, 34.0), &m), 0.0);
        assert!((haversine_distance(p(0.0, 0.0), p(0.0, 180.0), &m) - 20015.087).abs() < 1e-3);
        assert!((haversine_distance(p(0.0, 0.0), p(0.0, 90.0), &m) - 10007.543).abs() < 1e-3);
    }

    #[test]
    fn longitude_wrap() {
        let m = EarthModel::default();
        let d = haversine_distance(p(0.0, 179.5), p(0.0, -179.5), &m);
        assert!((d - 6371.0 * PI / 180.0).abs() < 1e-3, "{d}");
        assert!((d - 111.195).abs() < 1e-3);
    }

    #[test]
    fn rejects_invalid_inputs() {
        assert_eq!(GeoPoint::new(91.0, 0.0), Err(GeoError::Latitude(91.0)));
        assert_eq!(GeoPoint::new(0.0, -181.0), Err(GeoError::Longitude(-181.0)));
        assert!(EarthModel::new(0.0).is_err());
    }

    #[test]
    fn geocode_lookup_rules() {
        let mut map = BTreeMap::new();
        map.insert(
            "Tokyo,JP".to_string(),
            CityCoordinate { city: "Tokyo,JP".into(), point: p(35.6762, 139.6503) },
        );
        let g = Gazetteer::from_map(map);
        assert_eq!(geocode_city(&g, " Tokyo,JP ").unwrap(), p(35.6762, 139.6503));
        assert!(matches!(geocode_city(&g, "Atlantis,XX"), Err(GeoError::Ungeocodable { .. })));
        assert!(geocode_city(&g, "tokyo,JP").is_err());
    }
}
