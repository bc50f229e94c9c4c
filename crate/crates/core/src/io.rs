//! CSV formats: comma separated, UTF-8, header row required, `.` decimals.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fitter::TimeSeries;
use crate::infocalc::CategoricalJoint;
use crate::soliton::FieldGrid;

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn headers<R: Read>(rdr: &mut csv::Reader<R>) -> Result<Vec<String>> {
    let h: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if h.is_empty() || h.iter().all(String::is_empty) {
        return Err(Error::Parse("missing header row".into()));
    }
    Ok(h)
}

fn number(field: &str, row: usize, column: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("row {row}, column {column:?}: {field:?} is not a number")))
}

/// Contingency table: one row per cell, one category label per dimension,
/// and a final numeric weight column. Dimension labels come from the header.
pub fn read_contingency<R: Read>(input: R, log_base: f64) -> Result<CategoricalJoint> {
    let mut rdr = reader(input);
    let head = headers(&mut rdr)?;
    if head.len() < 2 {
        return Err(Error::Parse(
            "contingency table needs at least one label column and a weight column".into(),
        ));
    }
    let weight_col = head.len() - 1;
    let mut records = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != head.len() {
            return Err(Error::Parse(format!("row {} has {} fields, expected {}", i + 1, rec.len(), head.len())));
        }
        let w = number(&rec[weight_col], i + 1, &head[weight_col])?;
        let labels: Vec<String> = rec.iter().take(weight_col).map(str::to_string).collect();
        records.push((labels, w));
    }
    if records.is_empty() {
        return Err(Error::Parse("contingency table has no rows".into()));
    }
    CategoricalJoint::from_records(head[..weight_col].to_vec(), records, log_base)
}

/// Reads the named numeric columns (all columns when `columns` is empty).
/// Returns header names and one vector per column.
pub fn read_columns<R: Read>(input: R, columns: &[&str]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = reader(input);
    let head = headers(&mut rdr)?;
    let picks: Vec<usize> = if columns.is_empty() {
        (0..head.len()).collect()
    } else {
        columns
            .iter()
            .map(|c| {
                head.iter()
                    .position(|h| h == c)
                    .ok_or_else(|| Error::Parse(format!("missing column {c:?}")))
            })
            .collect::<Result<_>>()?
    };
    let mut out = vec![Vec::new(); picks.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        for (col, &j) in out.iter_mut().zip(&picks) {
            let field = rec
                .get(j)
                .ok_or_else(|| Error::Parse(format!("row {} is missing column {:?}", i + 1, head[j])))?;
            col.push(number(field, i + 1, &head[j])?);
        }
    }
    Ok((picks.iter().map(|&j| head[j].clone()).collect(), out))
}

/// Two numeric columns `t,y` (header names are free-form).
pub fn read_time_series<R: Read>(input: R, label: &str) -> Result<TimeSeries> {
    let (head, cols) = read_columns(input, &[])?;
    if head.len() != 2 {
        return Err(Error::Parse(format!("expected 2 columns (t, y), found {}", head.len())));
    }
    let mut cols = cols.into_iter();
    let t = cols.next().unwrap_or_default();
    let y = cols.next().unwrap_or_default();
    TimeSeries::new(t, y, label)
}

/// `x,t,value` triplets, x varying fastest.
pub fn write_field_grid<W: Write>(out: W, grid: &FieldGrid) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "t", "value"])?;
    for it in 0..grid.nt() {
        let t = grid.t(it).to_string();
        for ix in 0..grid.nx() {
            w.write_record([grid.x(ix).to_string(), t.clone(), grid.get(ix, it).to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// `t,y_model` rows.
pub fn write_curve<W: Write>(out: W, t: &[f64], y_model: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "y_model"])?;
    for (a, b) in t.iter().zip(y_model) {
        w.write_record([a.to_string(), b.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infocalc::interaction_information;

    #[test]
    fn contingency_xor() {
        let csv = "a,b,c,weight\n0,0,0,1\n0,1,1,1\n1,0,1,1\n1,1,0,1\n";
        let j = read_contingency(csv.as_bytes(), 2.0).unwrap();
        assert_eq!(j.shape(), vec![2, 2, 2]);
        assert_eq!(j.dims()[2].label, "c");
        assert!((interaction_information(&j).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn contingency_errors() {
        assert!(matches!(read_contingency("w\n1\n".as_bytes(), 2.0), Err(Error::Parse(_))));
        assert!(matches!(read_contingency("a,w\nx,abc\n".as_bytes(), 2.0), Err(Error::Parse(_))));
        assert!(read_contingency("a,w\n".as_bytes(), 2.0).is_err());
        assert!(matches!(
            read_contingency("a,w\nx,0\ny,0\n".as_bytes(), 2.0),
            Err(Error::InvalidDistribution(_))
        ));
        let ragged = read_contingency("a,b,w\nx,y,1\nx,2\n".as_bytes(), 2.0).unwrap_err();
        assert!(ragged.is_input_error());
    }

    #[test]
    fn time_series_roundtrip() {
        let s = read_time_series("t,y\n0,1\n1,2\n2,4\n3,3\n".as_bytes(), "demo").unwrap();
        assert_eq!(s.y(), &[1.0, 2.0, 4.0, 3.0]);
        assert!(read_time_series("t,y,z\n0,1,2\n".as_bytes(), "").is_err());
        assert!(read_time_series("t,y\n0,1\n0,2\n1,1\n2,2\n".as_bytes(), "").is_err());
    }

    #[test]
    fn named_columns() {
        let (h, c) = read_columns("t,empirical,model\n0,1,2\n1,3,4\n".as_bytes(), &["model", "empirical"]).unwrap();
        assert_eq!(h, vec!["model", "empirical"]);
        assert_eq!(c[0], vec![2.0, 4.0]);
        assert!(read_columns("t,a\n0,1\n".as_bytes(), &["b"]).is_err());
    }

    #[test]
    fn grid_csv_layout() {
        let mut g = FieldGrid::new(0.0, 6.0, 7, 0.0, 2.0, 3).unwrap();
        g.fill(|x, t| x + 10.0 * t).unwrap();
        let mut buf = Vec::new();
        write_field_grid(&mut buf, &g).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,t,value");
        assert_eq!(lines.len(), 1 + 21);
        assert_eq!(lines[1], "0,0,0");
        assert_eq!(lines[8], "0,1,10");
    }
}
