//! Offline duration estimate from great-circle distance.

use std::collections::HashMap;

use num_traits::{Float, FloatConst};

use super::{FlightDuration, FlightDurations, RoutePair, Unavailable};
use crate::model::AirportCode;

pub const EARTH_RADIUS_KM: f64 = 6371.0;
pub const CRUISE_SPEED_KMH: f64 = 800.0;
pub const FIXED_OVERHEAD_MINUTES: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatLon<T> {
    pub lat: T,
    pub lon: T,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeoError {
    #[error("coordinate out of range")]
    OutOfRange,
    #[error("estimated duration exceeds the plausible flight bound")]
    TooLong,
}

impl<T: Float> LatLon<T> {
    pub fn new(lat: T, lon: T) -> Result<Self, GeoError> {
        let lat_ok = lat.abs() <= constant(90.0);
        let lon_ok = lon.abs() <= constant(180.0);
        if lat_ok && lon_ok {
            Ok(LatLon { lat, lon })
        } else {
            Err(GeoError::OutOfRange)
        }
    }
}

fn constant<T: Float>(v: f64) -> T {
    T::from(v).expect("constant representable")
}

/// Haversine distance in kilometres.
pub fn haversine_km<T: Float + FloatConst>(a: LatLon<T>, b: LatLon<T>) -> T {
    // canonical order so the result is bit-identical in both directions
    let (a, b) = if (a.lat, a.lon) <= (b.lat, b.lon) { (a, b) } else { (b, a) };
    let two = constant::<T>(2.0);
    let rad = T::PI() / constant(180.0);
    let (lat1, lat2) = (a.lat * rad, b.lat * rad);
    let dlat = (b.lat - a.lat) * rad;
    let dlon = (b.lon - a.lon) * rad;
    let h = (dlat / two).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / two).sin().powi(2);
    let h = h.min(T::one());
    two * constant(EARTH_RADIUS_KM) * h.sqrt().asin()
}

/// Distance at 800 km/h plus 30 minutes, rounded up to the minute.
pub fn estimate_duration_great_circle<T: Float + FloatConst>(
    origin: LatLon<T>,
    destination: LatLon<T>,
) -> Result<FlightDuration, GeoError> {
    let km = haversine_km(origin, destination);
    let minutes = km / constant(CRUISE_SPEED_KMH) * constant(60.0) + constant(FIXED_OVERHEAD_MINUTES);
    let minutes = minutes.ceil().to_i64().ok_or(GeoError::OutOfRange)?;
    FlightDuration::from_minutes(minutes).map_err(|_| GeoError::TooLong)
}

/// Major airports, `(IATA, latitude, longitude)`.
pub const AIRPORTS: &[(&str, f64, f64)] = &[
    ("ADD", 8.9779, 38.7993),
    ("AKL", -37.0082, 174.7850),
    ("AMS", 52.3105, 4.7683),
    ("ARN", 59.6498, 17.9238),
    ("ATH", 37.9364, 23.9445),
    ("ATL", 33.6407, -84.4277),
    ("AUH", 24.4330, 54.6511),
    ("BCN", 41.2974, 2.0833),
    ("BKK", 13.6900, 100.7501),
    ("BLR", 13.1986, 77.7066),
    ("BOG", 4.7016, -74.1469),
    ("BOM", 19.0896, 72.8656),
    ("BOS", 42.3656, -71.0096),
    ("CAI", 30.1219, 31.4056),
    ("CDG", 49.0097, 2.5479),
    ("CGK", -6.1256, 106.6559),
    ("CMN", 33.3675, -7.5898),
    ("CPH", 55.6180, 12.6508),
    ("CPT", -33.9715, 18.6021),
    ("DEL", 28.5562, 77.1000),
    ("DFW", 32.8998, -97.0403),
    ("DOH", 25.2731, 51.6081),
    ("DUB", 53.4264, -6.2499),
    ("DXB", 25.2532, 55.3657),
    ("EWR", 40.6895, -74.1745),
    ("EZE", -34.8222, -58.5358),
    ("FCO", 41.8003, 12.2389),
    ("FRA", 50.0379, 8.5622),
    ("GRU", -23.4356, -46.4731),
    ("HEL", 60.3172, 24.9633),
    ("HKG", 22.3080, 113.9185),
    ("HND", 35.5494, 139.7798),
    ("HNL", 21.3187, -157.9225),
    ("ICN", 37.4602, 126.4407),
    ("IST", 41.2753, 28.7519),
    ("JFK", 40.6413, -73.7781),
    ("JNB", -26.1337, 28.2420),
    ("KUL", 2.7456, 101.7072),
    ("LAX", 33.9416, -118.4085),
    ("LHR", 51.4706, -0.4619),
    ("LIM", -12.0219, -77.1143),
    ("LIS", 38.7742, -9.1342),
    ("LOS", 6.5774, 3.3212),
    ("MAD", 40.4983, -3.5676),
    ("MEL", -37.6690, 144.8410),
    ("MEX", 19.4361, -99.0719),
    ("MIA", 25.7959, -80.2870),
    ("MNL", 14.5086, 121.0194),
    ("MUC", 48.3537, 11.7750),
    ("NBO", -1.3192, 36.9278),
    ("NRT", 35.7720, 140.3929),
    ("ORD", 41.9742, -87.9073),
    ("OSL", 60.1976, 11.1004),
    ("PEK", 40.0799, 116.6031),
    ("PRG", 50.1008, 14.2600),
    ("PVG", 31.1443, 121.8083),
    ("RUH", 24.9576, 46.6988),
    ("SEA", 47.4502, -122.3088),
    ("SFO", 37.6213, -122.3790),
    ("SIN", 1.3644, 103.9915),
    ("STV", 21.1141, 72.7418),
    ("SYD", -33.9399, 151.1753),
    ("TLV", 32.0055, 34.8854),
    ("TPE", 25.0797, 121.2342),
    ("VIE", 48.1103, 16.5697),
    ("WAW", 52.1657, 20.9671),
    ("YVR", 49.1967, -123.1815),
    ("YYZ", 43.6777, -79.6248),
    ("ZRH", 47.4582, 8.5555),
];

/// Estimates durations for airports with known coordinates.
#[derive(Debug, Clone)]
pub struct GreatCircleProvider {
    coords: HashMap<AirportCode, LatLon<f64>>,
}

impl Default for GreatCircleProvider {
    fn default() -> Self {
        let coords = AIRPORTS
            .iter()
            .map(|&(code, lat, lon)| {
                (AirportCode::new(code).expect("valid code"), LatLon::new(lat, lon).expect("valid coordinate"))
            })
            .collect();
        GreatCircleProvider { coords }
    }
}

impl GreatCircleProvider {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_airport(mut self, code: AirportCode, at: LatLon<f64>) -> Self {
        self.coords.insert(code, at);
        self
    }

    pub fn knows(&self, code: AirportCode) -> bool {
        self.coords.contains_key(&code)
    }
}

impl FlightDurations for GreatCircleProvider {
    fn flight_duration(&self, route: RoutePair) -> Result<FlightDuration, Unavailable> {
        let unavailable = |reason: String| Unavailable { route, attempts: 1, reason };
        let from = self.coords.get(&route.origin).ok_or_else(|| unavailable(format!("no coordinates for {}", route.origin)))?;
        let to = self
            .coords
            .get(&route.destination)
            .ok_or_else(|| unavailable(format!("no coordinates for {}", route.destination)))?;
        estimate_duration_great_circle(*from, *to).map_err(|e| unavailable(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn at(lat: f64, lon: f64) -> LatLon<f64> {
        LatLon::new(lat, lon).unwrap()
    }

    // Expected values computed with an independent Python haversine
    // (math.asin/sqrt, R = 6371 km) and then frozen here.
    #[test]
    fn reference_values() {
        let lhr = at(51.4706, -0.4619);
        let cdg = at(49.0097, 2.5479);
        assert!((haversine_km(lhr, cdg) - 347.349163077561).abs() < 1e-6);
        assert_eq!(estimate_duration_great_circle(lhr, cdg).unwrap().minutes(), 57);

        let anti = haversine_km(at(0.0, 0.0), at(0.0, 180.0));
        assert!((anti - 20015.086796020572).abs() < 1e-6);
        assert_eq!(estimate_duration_great_circle(at(0.0, 0.0), at(0.0, 180.0)).unwrap().minutes(), 1532);

        let syd = at(-33.9399, 151.1753);
        let fra = at(50.0379, 8.5622);
        assert_eq!(estimate_duration_great_circle(syd, fra).unwrap().minutes(), 1268);
    }

    #[test]
    fn identical_points_overhead_only() {
        let p = at(12.5, -40.25);
        assert_eq!(estimate_duration_great_circle(p, p).unwrap().minutes(), 30);
    }

    #[test]
    fn generic_over_f32() {
        let lhr = LatLon::new(51.4706f32, -0.4619).unwrap();
        let cdg = LatLon::new(49.0097f32, 2.5479).unwrap();
        assert!((haversine_km(lhr, cdg) - 347.349).abs() < 0.05);
        assert_eq!(estimate_duration_great_circle(lhr, cdg).unwrap().minutes(), 57);
    }

    #[test]
    fn coordinate_range() {
        assert_eq!(LatLon::new(90.5, 0.0), Err(GeoError::OutOfRange));
        assert_eq!(LatLon::new(0.0, -180.1), Err(GeoError::OutOfRange));
        assert!(LatLon::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn provider_unknown_airport() {
        let p = GreatCircleProvider::new();
        let route = RoutePair::new(AirportCode::new("SYD").unwrap(), AirportCode::new("QQQ").unwrap()).unwrap();
        assert!(p.flight_duration(route).is_err());
        let known = RoutePair::new(AirportCode::new("LHR").unwrap(), AirportCode::new("CDG").unwrap()).unwrap();
        assert_eq!(p.flight_duration(known).unwrap().minutes(), 57);
    }

    proptest! {
        #[test]
        fn symmetric(a in -90.0f64..=90.0, b in -180.0f64..=180.0, c in -90.0f64..=90.0, d in -180.0f64..=180.0) {
            let p = at(a, b);
            let q = at(c, d);
            prop_assert_eq!(haversine_km(p, q).to_bits(), haversine_km(q, p).to_bits());
            prop_assert_eq!(estimate_duration_great_circle(p, q), estimate_duration_great_circle(q, p));
        }
    }
}
