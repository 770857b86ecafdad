//! Metadata CSV: one event per line,
//! `frame,class,source,azimuth,elevation,distance`, with the distance column
//! in centimeters. Internally distances are meters.
//!
//! Rows are kept sorted by `(frame, class, source)` and duplicate triples are
//! rejected, so a table is a canonical set of event frames.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::EventAnnotation;

/// Ordered, duplicate-free list of event annotations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetadataTable {
    rows: Vec<EventAnnotation>,
}

impl MetadataTable {
    /// Builds a table from rows: validates each, sorts by
    /// `(frame, class, source)`, rejects duplicate triples.
    pub fn from_rows(mut rows: Vec<EventAnnotation>) -> Result<Self> {
        for r in &rows {
            r.validate()?;
        }
        rows.sort_by_key(|r| (r.frame, r.class_id, r.source_id));
        let mut seen = BTreeSet::new();
        for r in &rows {
            if !seen.insert((r.frame, r.class_id, r.source_id)) {
                return Err(Error::Data(format!(
                    "duplicate (frame, class, source) = ({}, {}, {})",
                    r.frame, r.class_id, r.source_id
                )));
            }
        }
        Ok(MetadataTable { rows })
    }

    pub fn empty() -> Self {
        MetadataTable::default()
    }

    pub fn rows(&self) -> &[EventAnnotation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest label-frame index present, if any.
    pub fn max_frame(&self) -> Option<usize> {
        self.rows.iter().map(|r| r.frame).max()
    }
}

/// Parses CSV text. `path` is used only for diagnostics.
pub fn parse_metadata(text: &str, path: &Path) -> Result<MetadataTable> {
    let err = |line: usize, detail: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        detail,
    };
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(err(
                lineno,
                format!("expected 6 comma-separated fields, got {}", fields.len()),
            ));
        }
        let frame: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad frame index {:?}", fields[0])))?;
        let class_id: usize = fields[1]
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad class id {:?}", fields[1])))?;
        let source_id: u32 = fields[2]
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad source id {:?}", fields[2])))?;
        let azimuth: f64 = fields[3]
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad azimuth {:?}", fields[3])))?;
        let elevation: f64 = fields[4]
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad elevation {:?}", fields[4])))?;
        let distance_cm: f64 = fields[5]
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("bad distance {:?}", fields[5])))?;

        let ann = EventAnnotation {
            frame,
            class_id,
            source_id,
            azimuth,
            elevation,
            distance: distance_cm / 100.0,
        };
        ann.validate().map_err(|e| err(lineno, e.to_string()))?;
        rows.push(ann);
    }
    MetadataTable::from_rows(rows)
}

pub fn read_metadata_csv(path: &Path) -> Result<MetadataTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        detail: e.to_string(),
    })?;
    parse_metadata(&text, path)
}

/// Serializes a table; distance is re-emitted in whole centimeters
/// (rounded to nearest), angles in shortest round-trip decimal form.
pub fn metadata_to_string(table: &MetadataTable) -> Result<String> {
    let mut out = String::new();
    for r in table.rows() {
        let cm = (r.distance * 100.0).round() as i64;
        if cm <= 0 {
            return Err(Error::Data(format!(
                "distance {} m rounds to {} cm and cannot be represented",
                r.distance, cm
            )));
        }
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.frame, r.class_id, r.source_id, r.azimuth, r.elevation, cm
        ));
    }
    Ok(out)
}

pub fn write_metadata_csv(table: &MetadataTable, path: &Path) -> Result<()> {
    let text = metadata_to_string(table)?;
    super::write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> std::path::PathBuf {
        std::path::PathBuf::from("test.csv")
    }

    #[test]
    fn parses_dataset_row_with_cm_conversion() {
        let t = parse_metadata("10,2,0,30,0,150\n", &p()).unwrap();
        assert_eq!(t.len(), 1);
        let r = &t.rows()[0];
        assert_eq!(
            (r.frame, r.class_id, r.source_id, r.azimuth, r.elevation, r.distance),
            (10, 2, 0, 30.0, 0.0, 1.5)
        );
    }

    #[test]
    fn empty_file_is_empty_table() {
        assert!(parse_metadata("", &p()).unwrap().is_empty());
    }

    #[test]
    fn class_out_of_range_is_a_parse_error_with_line() {
        let e = parse_metadata("10,2,0,30,0,150\n5,13,0,0,0,100\n", &p()).unwrap_err();
        match e {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_and_bad_distance_rejected() {
        assert!(parse_metadata("a,2,0,30,0,150\n", &p()).is_err());
        assert!(parse_metadata("1,2,0,30,0,0\n", &p()).is_err());
        assert!(parse_metadata("1,2,0,30,0,-5\n", &p()).is_err());
        assert!(parse_metadata("1,2,0,181,0,100\n", &p()).is_err());
    }

    #[test]
    fn duplicate_triple_rejected() {
        assert!(parse_metadata("1,2,0,30,0,100\n1,2,0,40,0,100\n", &p()).is_err());
    }

    #[test]
    fn round_trip_hundred_rows() {
        let rows: Vec<EventAnnotation> = (0..100)
            .map(|i| EventAnnotation {
                frame: i / 3,
                class_id: i % 13,
                source_id: (i % 3) as u32,
                azimuth: (i as f64 * 7.0) % 180.0 - 90.0,
                elevation: (i as f64 * 3.0) % 90.0 - 45.0,
                distance: 0.5 + i as f64 * 0.03,
            })
            .collect();
        let t = MetadataTable::from_rows(rows).unwrap();
        let text = metadata_to_string(&t).unwrap();
        let back = parse_metadata(&text, &p()).unwrap();
        assert_eq!(t.len(), back.len());
        for (a, b) in t.rows().iter().zip(back.rows()) {
            assert_eq!((a.frame, a.class_id, a.source_id), (b.frame, b.class_id, b.source_id));
            assert_eq!(a.azimuth, b.azimuth);
            assert_eq!(a.elevation, b.elevation);
            assert!((a.distance - b.distance).abs() <= 0.005 + 1e-12);
        }
    }

    #[test]
    fn distance_rounding_rule() {
        let t = MetadataTable::from_rows(vec![EventAnnotation {
            frame: 0,
            class_id: 0,
            source_id: 0,
            azimuth: 0.0,
            elevation: 0.0,
            distance: 1.504,
        }])
        .unwrap();
        let text = metadata_to_string(&t).unwrap();
        assert_eq!(text.trim_end(), "0,0,0,0,0,150");
        let back = parse_metadata(&text, &p()).unwrap();
        assert!((back.rows()[0].distance - 1.50).abs() < 1e-12);
    }

    #[test]
    fn empty_table_writes_empty_file() {
        assert_eq!(metadata_to_string(&MetadataTable::empty()).unwrap(), "");
    }

    proptest! {
        /// Round-trip keeps angles/integers exact, distance within 0.5 cm.
        #[test]
        fn csv_round_trip_bounds(
            frame in 0usize..500,
            class in 0usize..13,
            source in 0u32..6,
            az in -179.0f64..180.0,
            el in -90.0f64..90.0,
            dist in 0.02f64..12.0,
        ) {
            let t = MetadataTable::from_rows(vec![EventAnnotation {
                frame, class_id: class, source_id: source,
                azimuth: az, elevation: el, distance: dist,
            }]).unwrap();
            let back = parse_metadata(&metadata_to_string(&t).unwrap(), &p()).unwrap();
            let r = &back.rows()[0];
            prop_assert_eq!(r.frame, frame);
            prop_assert_eq!(r.class_id, class);
            prop_assert_eq!(r.source_id, source);
            prop_assert_eq!(r.azimuth, az);
            prop_assert_eq!(r.elevation, el);
            prop_assert!((r.distance - dist).abs() <= 0.005 + 1e-12);
        }
    }
}
