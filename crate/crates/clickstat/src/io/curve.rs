use std::path::Path;

use super::{check_finite, format_float, write_text, IoError, Result};

pub const CURVE_HEADER: [&str; 4] = ["energy_nJ", "eA", "eB", "eAB"];
pub const CURVE_HEADER_WITH_ERRORS: [&str; 10] = [
    "energy_nJ", "eA", "eB", "eAB", "dEA", "dEB", "dEAB", "sigmaA", "sigmaB", "sigmaAB",
];

/// One row of an eigenvalue-versus-energy table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub energy_nj: f64,
    /// `[e_A, e_B, e_AB]`.
    pub e: [f64; 3],
    pub delta: Option<[f64; 3]>,
    /// Undefined significances (zero spread) are written as empty cells.
    pub sigma: Option<[Option<f64>; 3]>,
}

/// CSV text of a curve. The uncertainty columns appear when any row has them,
/// in which case every row must. An empty curve is the header alone.
pub fn render_curve(rows: &[CurveRow]) -> Result<String> {
    let with_errors = rows.iter().any(|r| r.delta.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |source| IoError::Csv {
        path: "<curve>".into(),
        source,
    };
    if with_errors {
        w.write_record(CURVE_HEADER_WITH_ERRORS).map_err(csv_err)?;
    } else {
        w.write_record(CURVE_HEADER).map_err(csv_err)?;
    }
    for (i, r) in rows.iter().enumerate() {
        let mut record = Vec::with_capacity(10);
        check_finite(&format!("rows[{i}].energy_nJ"), r.energy_nj)?;
        record.push(format_float(r.energy_nj));
        for (name, x) in CURVE_HEADER[1..].iter().zip(r.e) {
            check_finite(&format!("rows[{i}].{name}"), x)?;
            record.push(format_float(x));
        }
        if with_errors {
            let delta = r
                .delta
                .ok_or_else(|| super::invalid(format!("rows[{i}].dEA"), "missing while other rows have uncertainties"))?;
            for (name, x) in CURVE_HEADER_WITH_ERRORS[4..7].iter().zip(delta) {
                check_finite(&format!("rows[{i}].{name}"), x)?;
                record.push(format_float(x));
            }
            for (name, s) in CURVE_HEADER_WITH_ERRORS[7..].iter().zip(r.sigma.unwrap_or([None; 3])) {
                match s {
                    Some(x) => {
                        check_finite(&format!("rows[{i}].{name}"), x)?;
                        record.push(format_float(x));
                    }
                    None => record.push(String::new()),
                }
            }
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| super::invalid("<curve>", e))?;
    Ok(String::from_utf8(bytes).expect("CSV of ASCII fields is UTF-8"))
}

pub fn write_curve(rows: &[CurveRow], path: &Path) -> Result<()> {
    write_text(path, &render_curve(rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_curve_is_header_only() {
        assert_eq!(render_curve(&[]).unwrap(), "energy_nJ,eA,eB,eAB\n");
    }

    #[test]
    fn rows_and_error_columns() {
        let rows = [CurveRow {
            energy_nj: 0.7,
            e: [1e-3, 2e-3, -4e-4],
            delta: Some([1e-5, 1e-5, 2e-5]),
            sigma: Some([Some(100.0), Some(200.0), None]),
        }];
        let text = render_curve(&rows).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), CURVE_HEADER_WITH_ERRORS.join(","));
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(cells.len(), 10);
        assert_eq!(cells[0], "6.9999999999999996e-1");
        assert_eq!(cells[9], "");
    }

    #[test]
    fn nan_is_refused() {
        let rows = [CurveRow {
            energy_nj: 1.0,
            e: [0.0, f64::NAN, 0.0],
            delta: None,
            sigma: None,
        }];
        assert!(render_curve(&rows).unwrap_err().to_string().contains("rows[0].eB"));
    }
}
