use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Grid, GridFunction};
use crate::error::{Error, Result};

/// On-disk layout of a grid function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureFormat {
    /// Header line `n,N,L`, then one value per line in row-major order.
    Csv,
    /// Little-endian `u32 n`, `u32 N`, `f64 L`, then row-major `f64` values.
    Binary,
}

impl FixtureFormat {
    /// Picks the format from a file extension; anything but `.csv` is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => FixtureFormat::Csv,
            _ => FixtureFormat::Binary,
        }
    }
}

pub fn write_fixture(f: &GridFunction, path: &Path, format: FixtureFormat) -> Result<()> {
    let g = f.grid();
    match format {
        FixtureFormat::Csv => {
            let mut out = std::io::BufWriter::new(fs::File::create(path)?);
            writeln!(out, "{},{},{}", g.dim(), g.cells_per_side(), g.extent())?;
            for v in f.values() {
                writeln!(out, "{v:e}")?;
            }
            out.flush()?;
        }
        FixtureFormat::Binary => {
            let mut bytes = Vec::with_capacity(16 + 8 * g.len());
            bytes.extend_from_slice(&(g.dim() as u32).to_le_bytes());
            bytes.extend_from_slice(&(g.cells_per_side() as u32).to_le_bytes());
            bytes.extend_from_slice(&g.extent().to_le_bytes());
            for v in f.values() {
                bytes.extend_from_slice(&v.to_le_bytes());
            }
            fs::write(path, bytes)?;
        }
    }
    Ok(())
}

pub fn read_fixture(path: &Path, format: FixtureFormat) -> Result<GridFunction> {
    match format {
        FixtureFormat::Csv => read_csv(path),
        FixtureFormat::Binary => read_binary(path),
    }
}

fn read_csv(path: &Path) -> Result<GridFunction> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Fixture("empty file".into()))??;
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields.len() != 3 {
        return Err(Error::Fixture(format!("bad header `{header}`")));
    }
    let parse_err = |s: &str| Error::Fixture(format!("bad header field `{s}`"));
    let dim: usize = fields[0].parse().map_err(|_| parse_err(fields[0]))?;
    let cells: usize = fields[1].parse().map_err(|_| parse_err(fields[1]))?;
    let extent: f64 = fields[2].parse().map_err(|_| parse_err(fields[2]))?;
    let grid = Grid::new(dim, cells, extent)?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| Error::Fixture(format!("line {}: `{line}` is not a number", i + 2)))?;
        values.push(v);
    }
    GridFunction::from_values(grid, values)
}

fn read_binary(path: &Path) -> Result<GridFunction> {
    let bytes = fs::read(path)?;
    if bytes.len() < 16 {
        return Err(Error::Fixture("truncated header".into()));
    }
    let dim = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let cells = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let extent = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let grid = Grid::new(dim, cells, extent)?;
    let body = &bytes[16..];
    if body.len() != 8 * grid.len() {
        return Err(Error::Fixture(format!(
            "expected {} values, found {} bytes",
            grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridFunction::from_values(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_both_formats() {
        let dir = std::env::temp_dir().join(format!("multifrac-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let g = Grid::new(2, 4, 2.0).unwrap();
        let f = GridFunction::from_fn(g, |x| x[0] * 3.0 + x[1].sin()).unwrap();
        for (name, fmt) in [("f.csv", FixtureFormat::Csv), ("f.bin", FixtureFormat::Binary)] {
            let p = dir.join(name);
            write_fixture(&f, &p, fmt).unwrap();
            assert_eq!(FixtureFormat::from_path(&p), fmt);
            let back = read_fixture(&p, fmt).unwrap();
            assert_eq!(back, f);
        }
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn short_binary_is_rejected() {
        let p = std::env::temp_dir().join(format!("multifrac-short-{}.bin", std::process::id()));
        fs::write(&p, [1u8, 0, 0]).unwrap();
        assert!(read_fixture(&p, FixtureFormat::Binary).is_err());
        fs::remove_file(&p).ok();
    }
}
