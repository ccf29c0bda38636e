//! Plain-text grid serialization.
//!
//! Three header lines (`size`, `resolution`, `origin x y heading`) followed
//! by one row of floats per line. Unknown cells serialize as `NaN` and
//! impassable cells as `inf`; values round-trip losslessly.

use std::io::{BufRead, Write};

use thiserror::Error;

use crate::grid::{GridSpec, LocalGrid};
use crate::pose::Pose2D;

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("dump line {0}: {1}")]
    Malformed(usize, String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parsed grid dump.
#[derive(Debug, Clone)]
pub struct GridDump {
    pub spec: GridSpec,
    pub origin: Pose2D,
    pub values: Vec<f64>,
}

impl GridDump {
    /// Reattaches the values to a vehicle-centered grid at the dump origin.
    pub fn to_local_grid(&self) -> LocalGrid {
        let center = self.spec.floor_cell(self.origin.x, self.origin.y);
        let mut grid = LocalGrid::new(self.spec, center, f64::NAN);
        grid.values_mut().copy_from_slice(&self.values);
        grid
    }
}

pub fn write_grid_dump<W: Write>(
    out: &mut W,
    spec: GridSpec,
    origin: Pose2D,
    values: &[f64],
) -> std::io::Result<()> {
    debug_assert_eq!(values.len(), spec.size * spec.size);
    writeln!(out, "size {}", spec.size)?;
    writeln!(out, "resolution {}", spec.resolution)?;
    writeln!(out, "origin {} {} {}", origin.x, origin.y, origin.heading)?;
    for row in values.chunks(spec.size) {
        let mut line = String::with_capacity(row.len() * 8);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&format!("{v}"));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn write_local_grid<W: Write>(
    out: &mut W,
    grid: &LocalGrid,
    origin: Pose2D,
) -> std::io::Result<()> {
    write_grid_dump(out, grid.spec(), origin, grid.values())
}

pub fn parse_grid_dump<R: BufRead>(input: R) -> Result<GridDump, DumpError> {
    let mut lines = input.lines().enumerate();
    let mut header = |key: &str| -> Result<Vec<f64>, DumpError> {
        let (n, line) = lines
            .next()
            .ok_or_else(|| DumpError::Malformed(0, "missing header".into()))?;
        let line = line?;
        let mut fields = line.split_whitespace();
        if fields.next() != Some(key) {
            return Err(DumpError::Malformed(n + 1, format!("expected `{key}`")));
        }
        fields
            .map(|f| {
                f.parse()
                    .map_err(|e| DumpError::Malformed(n + 1, format!("{e}")))
            })
            .collect()
    };

    let size_fields = header("size")?;
    let res_fields = header("resolution")?;
    let origin_fields = header("origin")?;
    if size_fields.len() != 1 || res_fields.len() != 1 || origin_fields.len() != 3 {
        return Err(DumpError::Malformed(1, "bad header field count".into()));
    }
    let size = size_fields[0] as usize;
    let spec = GridSpec::new(size, res_fields[0])
        .map_err(|e| DumpError::Malformed(1, format!("{e}")))?;
    let origin = Pose2D::new(origin_fields[0], origin_fields[1], origin_fields[2]);

    let mut values = Vec::with_capacity(size * size);
    for (n, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        for field in line.split_whitespace() {
            let v: f64 = field
                .parse()
                .map_err(|e| DumpError::Malformed(n + 1, format!("{e}")))?;
            values.push(v);
        }
    }
    if values.len() != size * size {
        return Err(DumpError::Malformed(
            0,
            format!("expected {} values, found {}", size * size, values.len()),
        ));
    }
    Ok(GridDump {
        spec,
        origin,
        values,
    })
}
