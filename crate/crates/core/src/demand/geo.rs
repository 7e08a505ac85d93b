//! Spherical-earth distances.

/// Mean earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

pub const KM_PER_NM: f64 = 1.852;

/// Great-circle distance in km. Uses the Vincenty form of the central angle,
/// which stays well conditioned for both tiny and antipodal separations.
pub fn great_circle_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dl = (lon2 - lon1).to_radians();
    let (s1, c1) = p1.sin_cos();
    let (s2, c2) = p2.sin_cos();
    let (sdl, cdl) = dl.sin_cos();
    let y = (c2 * sdl).hypot(c1 * s2 - s1 * c2 * cdl);
    let x = s1 * s2 + c1 * c2 * cdl;
    EARTH_RADIUS_KM * y.atan2(x)
}

/// Point reached from (lat, lon) after `distance_km` on initial bearing
/// `bearing_deg`. Longitude is wrapped to [-180, 180).
pub fn destination_point(lat: f64, lon: f64, bearing_deg: f64, distance_km: f64) -> (f64, f64) {
    let d = distance_km / EARTH_RADIUS_KM;
    let p1 = lat.to_radians();
    let t = bearing_deg.to_radians();
    let p2 = (p1.sin() * d.cos() + p1.cos() * d.sin() * t.cos()).asin();
    let l2 = lon.to_radians() + (t.sin() * d.sin() * p1.cos()).atan2(d.cos() - p1.sin() * p2.sin());
    let lon2 = (l2.to_degrees() + 180.0).rem_euclid(360.0) - 180.0;
    (p2.to_degrees(), lon2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn quarter_circumference() {
        let d = great_circle_km(0.0, 0.0, 0.0, 90.0);
        assert!((d - EARTH_RADIUS_KM * PI / 2.0).abs() < 1e-9);
        assert!((d - 10_007.5).abs() < 0.001 * 10_007.5);
    }

    #[test]
    fn degenerate_separations() {
        assert_eq!(great_circle_km(52.3, 4.76, 52.3, 4.76), 0.0);
        let tiny = great_circle_km(0.0, 0.0, 0.0, 1e-9);
        assert!((tiny - EARTH_RADIUS_KM * 1e-9_f64.to_radians()).abs() < 1e-15);
        let anti = great_circle_km(10.0, 20.0, -10.0, -160.0);
        assert!((anti - EARTH_RADIUS_KM * PI).abs() < 1e-6);
    }

    #[test]
    fn symmetric() {
        let a = great_circle_km(52.3086, 4.7639, 40.6413, -73.7781);
        let b = great_circle_km(40.6413, -73.7781, 52.3086, 4.7639);
        assert!((a - b).abs() < 1e-9);
        // Amsterdam to New York is about 5850 km.
        assert!((a - 5850.0).abs() < 30.0, "{a}");
    }

    #[test]
    fn destination_inverts_distance() {
        for bearing in [0.0, 45.0, 137.0, 270.0] {
            let (lat, lon) = destination_point(52.3, 4.76, bearing, 1234.0);
            assert!((great_circle_km(52.3, 4.76, lat, lon) - 1234.0).abs() < 1e-6);
        }
    }
}
