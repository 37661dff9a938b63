//! Embedded study datasets, compiled in so results are reproducible
//! without external files.

use crate::model::Sample;

/// Daily carbon monoxide measurements (ppm) from an oil refinery stack
/// northeast of San Francisco, April 16 to May 16, 1993; 31 values,
/// sorted ascending. Source: the Data and Story Library air quality
/// set.
pub const AIR_REFINERY: [f64; 31] = [
    21.0, 30.0, 30.0, 34.0, 36.0, 37.0, 38.0, 40.0, 42.0, 43.0, 43.0, 45.0, 52.0, 55.0, 58.0,
    58.0, 58.0, 59.0, 63.0, 63.0, 71.0, 75.0, 85.0, 86.0, 86.0, 99.0, 102.0, 102.0, 141.0,
    153.0, 161.0,
];

/// Independent carbon monoxide measurements (ppm) of the same stack by
/// the Bay Area Air Quality Management District, September 1990 to
/// March 1993; 9 values, sorted ascending. The final observation (170)
/// is the well-known outlier of this dataset.
pub const AIR_BAAQMD: [f64; 9] = [4.0, 12.5, 15.0, 15.0, 20.0, 20.0, 20.0, 25.0, 170.0];

/// Rainfall (acre-feet) from 26 unseeded clouds, sorted ascending.
/// Source: the Data and Story Library cloud seeding experiment.
pub const CLOUD_NATURAL: [f64; 26] = [
    1.0, 4.9, 4.9, 11.5, 17.3, 21.7, 24.4, 26.1, 26.3, 28.6, 29.0, 36.6, 41.1, 47.3, 68.5,
    81.2, 87.0, 95.0, 147.8, 163.0, 244.3, 321.2, 345.5, 372.4, 830.1, 1202.6,
];

/// Rainfall (acre-feet) from 26 clouds seeded with silver nitrate,
/// sorted ascending.
pub const CLOUD_SEEDED: [f64; 26] = [
    4.1, 7.7, 17.5, 31.4, 32.7, 40.6, 92.4, 115.3, 118.3, 119.0, 129.6, 198.6, 200.7, 242.5,
    255.0, 274.7, 274.7, 302.8, 334.1, 430.0, 489.1, 703.4, 978.0, 1656.0, 1697.8, 2745.6,
];

/// Names accepted wherever a dataset can stand in for a file.
pub const NAMES: [&str; 4] = ["air-refinery", "air-baaqmd", "cloud-natural", "cloud-seeded"];

/// Look up an embedded dataset by name.
pub fn by_name(name: &str) -> Option<&'static [f64]> {
    match name {
        "air-refinery" => Some(&AIR_REFINERY),
        "air-baaqmd" => Some(&AIR_BAAQMD),
        "cloud-natural" => Some(&CLOUD_NATURAL),
        "cloud-seeded" => Some(&CLOUD_SEEDED),
        _ => None,
    }
}

/// The dataset as a labeled [`Sample`].
pub fn sample(name: &str) -> Option<Sample> {
    by_name(name).map(|values| {
        Sample::with_label(values.to_vec(), name).expect("embedded data is valid")
    })
}
