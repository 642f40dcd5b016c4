use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walsh::HypercubePoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// `-1` / `+1` (or `-` / `+`).
    #[default]
    Signs,
    /// `0` for `+1`, `1` for `-1`.
    Bits,
}

/// How observations are laid out in a delimited text file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataFormat {
    pub encoding: Encoding,
    pub delimiter: char,
    pub header: bool,
}

impl Default for DataFormat {
    fn default() -> Self {
        Self {
            encoding: Encoding::Signs,
            delimiter: ',',
            header: false,
        }
    }
}

fn parse_field(field: &str, encoding: Encoding) -> Option<i8> {
    match (encoding, field) {
        (Encoding::Signs, "1" | "+1" | "+") => Some(1),
        (Encoding::Signs, "-1" | "-") => Some(-1),
        (Encoding::Bits, "0") => Some(1),
        (Encoding::Bits, "1") => Some(-1),
        _ => None,
    }
}

/// One row: either one field per coordinate or a single packed field such
/// as `+-+-` (signs) or `0101` (bits).
fn parse_row(fields: &[&str], encoding: Encoding, line: usize) -> Result<HypercubePoint> {
    let parse_err = |message: String| Error::Parse { line, message };
    let packed = fields.len() == 1 && fields[0].len() > 1 && {
        let f = fields[0];
        match encoding {
            Encoding::Signs => f.chars().all(|c| c == '+' || c == '-'),
            Encoding::Bits => f.chars().all(|c| c == '0' || c == '1'),
        }
    };
    let entries = if packed {
        fields[0]
            .chars()
            .map(|c| parse_field(&c.to_string(), encoding).expect("checked above"))
            .collect()
    } else {
        fields
            .iter()
            .map(|f| {
                parse_field(f, encoding).ok_or_else(|| parse_err(format!("`{f}` is not a valid {encoding:?} value")))
            })
            .collect::<Result<Vec<i8>>>()?
    };
    HypercubePoint::new(entries).map_err(|e| parse_err(e.to_string()))
}

/// Parses observations from delimited text. Blank lines are skipped.
pub fn parse_observations(reader: impl Read, format: &DataFormat) -> Result<Vec<HypercubePoint>> {
    if !format.delimiter.is_ascii() {
        return Err(Error::Config(format!(
            "delimiter `{}` must be a single ASCII character",
            format.delimiter
        )));
    }
    let mut text = String::new();
    std::io::BufReader::new(reader).read_to_string(&mut text)?;
    let mut points = Vec::new();
    let mut dim = None;
    let mut rows = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    if format.header {
        rows.find(|(_, l)| !l.is_empty());
    }
    for (line, row) in rows {
        let fields: Vec<&str> = row.split(format.delimiter).map(str::trim).collect();
        if fields.iter().all(|f| f.is_empty()) {
            continue;
        }
        let point = parse_row(&fields, format.encoding, line)?;
        match dim {
            None => dim = Some(point.dim()),
            Some(n) if n != point.dim() => {
                return Err(Error::Parse {
                    line,
                    message: format!("row has n = {}, earlier rows have n = {n}", point.dim()),
                })
            }
            _ => {}
        }
        points.push(point);
    }
    if points.is_empty() {
        return Err(Error::EmptyData);
    }
    Ok(points)
}

pub fn read_observations(path: &Path, format: &DataFormat) -> Result<Vec<HypercubePoint>> {
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("cannot open data file {}: {e}", path.display())))?;
    parse_observations(std::io::BufReader::new(file), format)
}

/// Writes observations one per row, one field per coordinate.
pub fn format_observations(points: &[HypercubePoint], format: &DataFormat) -> String {
    let sep = format.delimiter.to_string();
    let mut out = String::new();
    if format.header {
        let n = points.first().map_or(0, HypercubePoint::dim);
        let names: Vec<String> = (1..=n).map(|d| format!("x{d}")).collect();
        out.push_str(&names.join(&sep));
        out.push('\n');
    }
    for p in points {
        let fields: Vec<&str> = p
            .entries()
            .iter()
            .map(|&s| match (format.encoding, s) {
                (Encoding::Signs, 1) => "1",
                (Encoding::Signs, _) => "-1",
                (Encoding::Bits, 1) => "0",
                (Encoding::Bits, _) => "1",
            })
            .collect();
        out.push_str(&fields.join(&sep));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodings() {
        let signs = parse_observations("1,-1,1\n-1,-1,1\n".as_bytes(), &DataFormat::default()).unwrap();
        let packed = parse_observations("+-+\n--+\n".as_bytes(), &DataFormat::default()).unwrap();
        let bits = parse_observations(
            "0 1 0\n1 1 0\n".as_bytes(),
            &DataFormat {
                encoding: Encoding::Bits,
                delimiter: ' ',
                header: false,
            },
        )
        .unwrap();
        assert_eq!(signs, packed);
        assert_eq!(signs, bits);
        assert_eq!(signs[0].to_sign_string(), "+-+");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_observations("1,1\n1,2\n".as_bytes(), &DataFormat::default()).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                message: "`2` is not a valid Signs value".into()
            }
        );
        let err = parse_observations("1,1\n\n1,1,1\n".as_bytes(), &DataFormat::default()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let header = DataFormat {
            header: true,
            ..DataFormat::default()
        };
        let err = parse_observations("a,b\n1,1\n0,1\n".as_bytes(), &header).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        assert_eq!(
            parse_observations("".as_bytes(), &DataFormat::default()),
            Err(Error::EmptyData)
        );
    }

    #[test]
    fn round_trip() {
        let pts = parse_observations("+-+\n--+\n".as_bytes(), &DataFormat::default()).unwrap();
        for format in [
            DataFormat::default(),
            DataFormat {
                encoding: Encoding::Bits,
                delimiter: '\t',
                header: true,
            },
        ] {
            let text = format_observations(&pts, &format);
            assert_eq!(parse_observations(text.as_bytes(), &format).unwrap(), pts);
        }
    }
}
