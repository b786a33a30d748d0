//! CSV ingestion and export for calendar series.
//!
//! Long form: `period,value` with a header row. Wide form:
//! `period,member1,member2,...`. Empty cells mark missing values, which
//! are only accepted at the edges of each column.

use std::io::{Read, Write};
use std::path::Path;

use super::period::{Calendar, PeriodLabel};
use super::series::CalendarSeries;
use crate::error::{Error, Result};

fn line_of(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

fn parse_cell(cell: &str, line: usize, column: &str) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
        return Ok(None);
    }
    cell.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::Parse {
            line,
            message: format!("column '{column}': '{cell}' is not a number"),
        })
}

type Table = (PeriodLabel, Vec<String>, Vec<Vec<Option<f64>>>);

/// Parses rows into `(first period, names, columns)` checking that periods
/// are consecutive at a single frequency.
fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || !headers[0].eq_ignore_ascii_case("period") {
        return Err(Error::Parse {
            line: 1,
            message: "header must start with 'period' followed by at least one column".into(),
        });
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut columns = vec![Vec::new(); names.len()];
    let mut start: Option<PeriodLabel> = None;
    let mut prev: Option<PeriodLabel> = None;

    for record in rdr.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != headers.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        let label: PeriodLabel = record[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("bad period label '{}'", &record[0]),
        })?;
        if let Some(p) = prev {
            if p.frequency() != label.frequency() || p.offset(1) != label {
                return Err(Error::Parse {
                    line,
                    message: format!("period {label} does not follow {p}"),
                });
            }
        } else {
            start = Some(label);
        }
        prev = Some(label);
        for (j, name) in names.iter().enumerate() {
            columns[j].push(parse_cell(&record[j + 1], line, name)?);
        }
    }
    let start = start.ok_or_else(|| Error::Parse {
        line: 1,
        message: "no data rows".into(),
    })?;
    Ok((start, names, columns))
}

pub fn read_series<R: Read>(reader: R, calendar: Calendar) -> Result<CalendarSeries> {
    let (start, names, columns) = read_table(reader)?;
    if names.len() != 1 {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header 'period,value', found {} value columns", names.len()),
        });
    }
    CalendarSeries::from_optional(calendar, start, &columns[0])
}

pub fn read_series_file(path: impl AsRef<Path>, calendar: Calendar) -> Result<CalendarSeries> {
    read_series(std::fs::File::open(path)?, calendar)
}

/// Reads a wide panel; each column becomes its own (edge-trimmed) series.
pub fn read_wide<R: Read>(reader: R, calendar: Calendar) -> Result<Vec<(String, CalendarSeries)>> {
    let (start, names, columns) = read_table(reader)?;
    names
        .into_iter()
        .zip(columns)
        .map(|(n, c)| Ok((n, CalendarSeries::from_optional(calendar, start, &c)?)))
        .collect()
}

pub fn read_wide_file(
    path: impl AsRef<Path>,
    calendar: Calendar,
) -> Result<Vec<(String, CalendarSeries)>> {
    read_wide(std::fs::File::open(path)?, calendar)
}

pub fn write_series<W: Write>(writer: W, series: &CalendarSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["period", "value"])?;
    for (p, v) in series.iter() {
        w.write_record([p.to_string(), format_value(v)])?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip representation.
pub fn format_value(v: f64) -> String {
    format!("{v:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_long_form_with_edge_gaps() {
        let csv = "period,value\n2000Q1,\n2000Q2,1.5\n2000Q3,2.5\n2000Q4,\n";
        let s = read_series(csv.as_bytes(), Calendar::Gregorian).unwrap();
        assert_eq!(s.start().to_string(), "2000Q2");
        assert_eq!(s.values(), &[1.5, 2.5]);
    }

    #[test]
    fn reports_line_numbers() {
        let csv = "period,value\n2000Q1,1\n2000Q2,abc\n";
        match read_series(csv.as_bytes(), Calendar::Gregorian) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let csv = "period,value\n2000Q1,1\n2000Q3,2\n";
        match read_series(csv.as_bytes(), Calendar::Gregorian) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn header_required() {
        assert!(read_series("2000Q1,1\n".as_bytes(), Calendar::Gregorian).is_err());
    }

    #[test]
    fn write_then_read() {
        let s = CalendarSeries::gregorian("1999-11".parse().unwrap(), vec![0.1, -2.5, 1e-9]).unwrap();
        let mut buf = Vec::new();
        write_series(&mut buf, &s).unwrap();
        let back = read_series(buf.as_slice(), Calendar::Gregorian).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn wide_panel_columns_trim_independently() {
        let csv = "period,a,b\n2000,1,\n2001,2,5\n2002,3,6\n";
        let p = read_wide(csv.as_bytes(), Calendar::Gregorian).unwrap();
        assert_eq!(p[0].1.len(), 3);
        assert_eq!(p[1].1.start().to_string(), "2001");
    }
}
