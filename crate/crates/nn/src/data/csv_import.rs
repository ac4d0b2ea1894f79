use std::io::Read;
use std::path::Path;

use so3eq_core::signals::SphereField;

use super::{io_err, DataError, DataResult};

/// Reads `lon,lat,u,v` (vector) or `lon,lat,t` (scalar) rows in degrees.
///
/// The rows must cover an equiangular grid: latitudes from 90 to −90 including
/// both poles, longitudes `360 j / n_lon`. Row order is free.
pub fn read_csv<R: Read>(r: R) -> DataResult<SphereField> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| DataError::Format(e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let vector = match header.iter().map(String::as_str).collect::<Vec<_>>()[..] {
        ["lon", "lat", "u", "v"] => true,
        ["lon", "lat", "t"] => false,
        _ => {
            return Err(DataError::Format(format!(
                "header {header:?}, expected lon,lat,u,v or lon,lat,t"
            )))
        }
    };
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| DataError::Format(e.to_string()))?;
        let vals = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| DataError::Format(format!("row {}: {s:?} is not a number", i + 2))))
            .collect::<DataResult<Vec<f64>>>()?;
        rows.push(vals);
    }
    let n = rows.len();
    let distinct = |col: usize| {
        let mut v: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        v.len()
    };
    let (n_lon, n_lat) = (distinct(0), distinct(1));
    if n_lat < 2 || n_lat * n_lon != n {
        return Err(DataError::Size(format!(
            "{n} rows do not form a full grid ({n_lat} latitudes x {n_lon} longitudes)"
        )));
    }
    let mut a = vec![f64::NAN; n];
    let mut b = vec![0.0; n];
    for r in &rows {
        let j = r[0].rem_euclid(360.0) * n_lon as f64 / 360.0;
        let k = (90.0 - r[1]) * (n_lat - 1) as f64 / 180.0;
        let (jr, kr) = (j.round(), k.round());
        if (j - jr).abs() > 1e-6 || (k - kr).abs() > 1e-6 || kr < 0.0 || kr as usize >= n_lat {
            return Err(DataError::Format(format!("point ({}, {}) is off the equiangular grid", r[0], r[1])));
        }
        let idx = kr as usize * n_lon + (jr as usize % n_lon);
        a[idx] = r[2];
        if vector {
            b[idx] = r[3];
        }
    }
    if a.iter().any(|v| v.is_nan()) {
        return Err(DataError::Format("duplicate grid points".into()));
    }
    Ok(if vector {
        SphereField::vector(n_lat, n_lon, a, b)?
    } else {
        SphereField::scalar(n_lat, n_lon, a)?
    })
}

pub fn import_csv(path: &Path) -> DataResult<SphereField> {
    let f = std::fs::File::open(path).map_err(io_err(path))?;
    read_csv(std::io::BufReader::new(f))
}
