use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::Failure;

/// Reads numeric rows from a comma-separated file. A first row containing a
/// non-numeric field is treated as a header and skipped.
pub fn read_points_csv(path: &str) -> Result<Vec<Vec<f64>>, Failure> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| Failure::input(format!("{path}: {e}")))?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Failure::input(format!("{path}: {e}")))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if line == 0 => continue,
            Err(e) => {
                return Err(Failure::input(format!("{path}: row {}: {e}", line + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Failure::input(format!("{path}: no data rows")));
    }
    let d = rows[0].len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(Failure::input(format!(
            "{path}: data row {} has {} fields, expected {d}",
            i + 1,
            r.len()
        )));
    }
    Ok(rows)
}

pub fn read_json<T: DeserializeOwned>(path: &str) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{path}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{path}: {e}")))
}

pub fn parse_vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

pub fn points_to_csv(rows: impl Iterator<Item = impl AsRef<[f64]>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in rows {
        w.write_record(r.as_ref().iter().map(|v| format!("{v:?}")))
            .expect("writing to memory");
    }
    w.into_inner().expect("writing to memory")
}

/// Writes `bytes` to stdout for `-`, otherwise atomically via a sibling
/// temporary file.
pub fn write_output(target: &str, bytes: &[u8]) -> Result<(), Failure> {
    if target == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| Failure::io(format!("stdout: {e}")))?;
        return Ok(());
    }
    let path = Path::new(target);
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(format!("{target}: {e}")))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.flush())
        .map_err(|e| Failure::io(format!("{target}: {e}")))?;
    tmp.persist(path)
        .map_err(|e| Failure::io(format!("{target}: {e}")))?;
    Ok(())
}
