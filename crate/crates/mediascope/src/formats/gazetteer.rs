use std::io::BufRead;

use mediascope_core::geo::{GazetteerEntry, GazetteerIndex};

use super::{FormatError, LineWarning};

#[derive(Debug, Clone)]
pub struct GazetteerLoad {
    pub index: GazetteerIndex,
    pub skipped: usize,
    pub warnings: Vec<LineWarning>,
}

fn parse_row(line: &str) -> Result<GazetteerEntry, String> {
    let f: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
    if f.len() != 10 {
        return Err(format!("expected 10 columns, got {}", f.len()));
    }
    let num = |i: usize, what: &str| f[i].trim().parse::<f64>().map_err(|_| format!("bad {what} {:?}", f[i]));
    let mut class = f[6].chars();
    let feature_class = match (class.next(), class.next()) {
        (Some(c), None) => c,
        _ => return Err(format!("bad feature class {:?}", f[6])),
    };
    let population = match f[9].trim() {
        "" => 0,
        p => p.parse().map_err(|_| format!("bad population {p:?}"))?,
    };
    let entry = GazetteerEntry {
        geoname_id: f[0].trim().parse().map_err(|_| format!("bad geonameid {:?}", f[0]))?,
        name: f[1].to_string(),
        ascii_name: f[2].to_string(),
        alternate_names: f[3].split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect(),
        latitude: num(4, "latitude")?,
        longitude: num(5, "longitude")?,
        feature_class,
        feature_code: f[7].to_string(),
        country_code: f[8].to_string(),
        population,
    };
    entry.validate().map_err(|e| e.to_string())?;
    Ok(entry)
}

/// Loads the GeoNames-style TSV (geonameid, name, asciiname, alternatenames,
/// latitude, longitude, feature class, feature code, country code,
/// population). Malformed rows are skipped and counted; a file with no
/// valid row is an error.
pub fn read_gazetteer(reader: impl BufRead) -> Result<GazetteerLoad, FormatError> {
    let mut index = GazetteerIndex::new();
    let mut warnings = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_row(&line) {
            Ok(entry) => index.insert(entry),
            Err(message) => warnings.push(LineWarning { line: i + 1, message }),
        }
    }
    if index.is_empty() {
        return Err(FormatError::Invalid("gazetteer has no valid rows".into()));
    }
    Ok(GazetteerLoad { index, skipped: warnings.len(), warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW: &str = "3868707\tValdivia\tValdivia\tValdivija,Вальдивия\t-39.81422\t-73.24589\tP\tPPLA\tCL\t154445";

    #[test]
    fn loads_and_skips_bad_rows() {
        let text = format!("{ROW}\n1\tX\tX\t\t95.0\t0\tP\tPPL\tCL\t0\nonly\tthree\tcols\n");
        let load = read_gazetteer(text.as_bytes()).unwrap();
        assert_eq!(load.index.len(), 1);
        assert_eq!(load.skipped, 2);
        assert_eq!(load.index.lookup("valdivija")[0].geoname_id, 3868707);
        assert_eq!(load.index.lookup("VALDIVIA").len(), 1);
    }

    #[test]
    fn no_valid_rows_is_fatal() {
        assert!(matches!(read_gazetteer("bad\n".as_bytes()), Err(FormatError::Invalid(_))));
        assert!(read_gazetteer("".as_bytes()).is_err());
    }

    #[test]
    fn empty_population_reads_as_zero() {
        let row = ROW.rsplit_once('\t').unwrap().0.to_string() + "\t";
        let load = read_gazetteer(row.as_bytes()).unwrap();
        assert_eq!(load.index.entries()[0].population, 0);
    }
}
