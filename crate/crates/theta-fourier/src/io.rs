//! On-disk formats: CSV fields and coefficient tables, raw binary fields.
//!
//! CSV is UTF-8 with a mandatory header row (RFC-4180; the numeric payload
//! never needs quoting). Fields: `i,re,im` (n = 1) or `i1,i2,re,im`
//! (n = 2), row-major. Coefficient tables: `xi_1[,xi_2],re,im` over the
//! whole cutoff box. CSV carries samples only; the (θ,T) context travels
//! separately (configs, reports).
//!
//! The binary field format is self-contained little-endian: an 8-field
//! header (magic `THETAFLD`, version, n, N, T, branch ints, θ values)
//! followed by interleaved re/im sample pairs.

use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

use crate::coeffs::CoeffTable;
use crate::grid::{GridSpec, SampledField};
use crate::theta::ThetaSpec;
use crate::{Error, Result};

pub const FIELD_MAGIC: &[u8; 8] = b"THETAFLD";
pub const FIELD_VERSION: u32 = 1;

pub fn write_field_csv(field: &SampledField, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let grid = field.grid();
    match grid.dim() {
        1 => w.write_record(["i", "re", "im"]).map_err(csv_err)?,
        _ => w.write_record(["i1", "i2", "re", "im"]).map_err(csv_err)?,
    }
    for (idx, v) in field.values().iter().enumerate() {
        let m = grid.coords(idx);
        let rec: Vec<String> = match grid.dim() {
            1 => vec![m[0].to_string(), v.re.to_string(), v.im.to_string()],
            _ => vec![
                m[0].to_string(),
                m[1].to_string(),
                v.re.to_string(),
                v.im.to_string(),
            ],
        };
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads samples written by [`write_field_csv`]; the θ structure is
/// supplied by the caller. N is inferred from the index columns.
pub fn read_field_csv(path: &Path, theta: ThetaSpec) -> Result<SampledField> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    let dim = match headers.len() {
        3 => 1,
        4 => 2,
        k => return Err(Error::Format(format!("expected 3 or 4 CSV columns, got {k}"))),
    };
    if dim != theta.dim() {
        return Err(Error::DimensionMismatch(format!(
            "CSV dimension {dim} vs theta dimension {}",
            theta.dim()
        )));
    }
    let mut rows: Vec<(usize, usize, Complex64)> = Vec::new();
    let mut max_idx = 0usize;
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Format("short CSV record".into()))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number in CSV: {e}")))
        };
        let (i0, i1, off) = if dim == 1 {
            (get(0)? as usize, 0usize, 1usize)
        } else {
            (get(0)? as usize, get(1)? as usize, 2usize)
        };
        max_idx = max_idx.max(i0).max(i1);
        rows.push((i0, i1, Complex64::new(get(off)?, get(off + 1)?)));
    }
    let n = max_idx + 1;
    let grid = GridSpec::new(dim, n)?;
    if rows.len() != grid.len() {
        return Err(Error::Format(format!(
            "expected {} rows for N = {n}, found {}",
            grid.len(),
            rows.len()
        )));
    }
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i0, i1, v) in rows {
        values[grid.flat([i0, i1])] = v;
    }
    SampledField::from_values(theta, grid, values)
}

pub fn write_coeffs_csv(table: &CoeffTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    match table.dim() {
        1 => w.write_record(["xi_1", "re", "im"]).map_err(csv_err)?,
        _ => w.write_record(["xi_1", "xi_2", "re", "im"]).map_err(csv_err)?,
    }
    for (xi, v) in table.iter() {
        let mut rec: Vec<String> = xi.iter().map(|k| k.to_string()).collect();
        rec.push(v.re.to_string());
        rec.push(v.im.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_coeffs_csv(path: &Path, theta: ThetaSpec) -> Result<CoeffTable> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let headers = r.headers().map_err(csv_err)?.clone();
    let dim = match headers.len() {
        3 => 1,
        4 => 2,
        k => return Err(Error::Format(format!("expected 3 or 4 CSV columns, got {k}"))),
    };
    if dim != theta.dim() {
        return Err(Error::DimensionMismatch(format!(
            "CSV dimension {dim} vs theta dimension {}",
            theta.dim()
        )));
    }
    let mut entries: Vec<(Vec<i64>, Complex64)> = Vec::new();
    let mut cutoff = 0i64;
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Format("short CSV record".into()))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number in CSV: {e}")))
        };
        let xi: Vec<i64> = (0..dim).map(|i| get(i).map(|v| v as i64)).collect::<Result<_>>()?;
        for &k in &xi {
            cutoff = cutoff.max(k.abs());
        }
        let v = Complex64::new(get(dim)?, get(dim + 1)?);
        entries.push((xi, v));
    }
    if cutoff == 0 {
        return Err(Error::Format("coefficient CSV has no nonzero modes".into()));
    }
    let side = (2 * cutoff + 1) as usize;
    if entries.len() != side.pow(dim as u32) {
        return Err(Error::Format(format!(
            "expected the full box of {} entries for cutoff {cutoff}, found {}",
            side.pow(dim as u32),
            entries.len()
        )));
    }
    let mut table = CoeffTable::zeros(theta, cutoff as usize)?;
    for (xi, v) in entries {
        table.set(&xi, v)?;
    }
    Ok(table)
}

pub fn write_field_binary(field: &SampledField, path: &Path) -> Result<()> {
    let mut buf: Vec<u8> = Vec::new();
    let spec = field.theta_spec();
    let grid = field.grid();
    buf.extend_from_slice(FIELD_MAGIC);
    buf.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.samples() as u64).to_le_bytes());
    buf.extend_from_slice(&spec.period().to_le_bytes());
    let branch = spec.log_branch();
    buf.extend_from_slice(&branch[0].to_le_bytes());
    buf.extend_from_slice(&branch.get(1).copied().unwrap_or(0).to_le_bytes());
    for t in spec.theta() {
        buf.extend_from_slice(&t.re.to_le_bytes());
        buf.extend_from_slice(&t.im.to_le_bytes());
    }
    for v in field.values() {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(&buf)?;
    Ok(())
}

pub fn read_field_binary(path: &Path) -> Result<SampledField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut pos = 0usize;
    let take = |pos: &mut usize, k: usize| -> Result<&[u8]> {
        if *pos + k > bytes.len() {
            return Err(Error::Format("binary field truncated".into()));
        }
        let s = &bytes[*pos..*pos + k];
        *pos += k;
        Ok(s)
    };
    if take(&mut pos, 8)? != FIELD_MAGIC {
        return Err(Error::Format("bad magic; not a binary field file".into()));
    }
    let version = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap());
    if version != FIELD_VERSION {
        return Err(Error::Format(format!("unsupported binary field version {version}")));
    }
    let dim = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
    let n = u64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()) as usize;
    let period = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
    let b1 = i64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
    let b2 = i64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
    if dim == 0 || dim > 2 {
        return Err(Error::Format(format!("bad dimension {dim}")));
    }
    let mut theta = Vec::with_capacity(dim);
    for _ in 0..dim {
        let re = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        let im = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        theta.push(Complex64::new(re, im));
    }
    let branch = if dim == 1 { vec![b1] } else { vec![b1, b2] };
    let spec = ThetaSpec::with_branch(theta, period, branch)?;
    let grid = GridSpec::new(dim, n)?;
    let mut values = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        let im = f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    if pos != bytes.len() {
        return Err(Error::Format("trailing bytes after binary field payload".into()));
    }
    SampledField::from_values(spec, grid, values)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Format(format!("csv: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample_field(dim: usize) -> SampledField {
        let theta = if dim == 1 {
            ThetaSpec::scalar(Complex64::new(2.0, 0.5), 1.5).unwrap()
        } else {
            ThetaSpec::with_branch(
                vec![Complex64::new(-1.0, 0.0), Complex64::new(0.3, 0.4)],
                2.0 * PI,
                vec![1, -2],
            )
            .unwrap()
        };
        SampledField::from_fn(theta, 8, |x| {
            Complex64::new(x[0].sin() + 1.0, x.get(1).copied().unwrap_or(0.0))
        })
        .unwrap()
    }

    #[test]
    fn field_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for dim in [1, 2] {
            let f = sample_field(dim);
            let path = dir.path().join(format!("field{dim}.csv"));
            write_field_csv(&f, &path).unwrap();
            let back = read_field_csv(&path, f.theta_spec().clone()).unwrap();
            assert_eq!(f, back);
            let text = std::fs::read_to_string(&path).unwrap();
            let header = text.lines().next().unwrap();
            assert!(header == "i,re,im" || header == "i1,i2,re,im");
        }
    }

    #[test]
    fn coeffs_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let theta = ThetaSpec::unit(2, 1.0).unwrap();
        let mut t = CoeffTable::zeros(theta.clone(), 2).unwrap();
        t.set(&[1, -2], Complex64::new(0.25, -1.5)).unwrap();
        t.set(&[0, 0], Complex64::new(3.0, 0.0)).unwrap();
        let path = dir.path().join("coeffs.csv");
        write_coeffs_csv(&t, &path).unwrap();
        let back = read_coeffs_csv(&path, theta).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn binary_round_trip_self_contained() {
        let dir = tempfile::tempdir().unwrap();
        for dim in [1, 2] {
            let f = sample_field(dim);
            let path = dir.path().join(format!("field{dim}.bin"));
            write_field_binary(&f, &path).unwrap();
            let back = read_field_binary(&path).unwrap();
            assert_eq!(f, back);
        }
    }

    #[test]
    fn binary_rejects_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let f = sample_field(1);
        let path = dir.path().join("field.bin");
        write_field_binary(&f, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(read_field_binary(&path).is_err());

        write_field_binary(&f, &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 4);
        std::fs::write(&path, &bytes).unwrap();
        assert!(read_field_binary(&path).is_err());
    }

    #[test]
    fn csv_shape_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "i,re,im\n0,1.0,0.0\n1,2.0,0.0\n2,1.0,0.0\n").unwrap();
        // 3 rows is not a power-of-two grid
        let theta = ThetaSpec::unit(1, 1.0).unwrap();
        assert!(read_field_csv(&path, theta).is_err());
    }
}
