//! JSONL point records: `{"id": 0, "model": "ball", "coords": [...]}`, with
//! half-space coordinates written height first.

use std::io::{BufRead, Write};

use hyperlsh::{HalfSpacePoint, Model, PoincarePoint, Point};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    #[serde(default)]
    pub id: u64,
    pub model: Model,
    pub coords: Vec<f64>,
}

impl PointRecord {
    pub fn from_point(id: u64, p: &Point) -> Self {
        let coords = match p {
            Point::Ball { coords } => coords.coords().to_vec(),
            Point::HalfSpace { coords } => {
                let mut v = Vec::with_capacity(coords.dim());
                v.push(coords.z());
                v.extend_from_slice(coords.x());
                v
            }
        };
        Self { id, model: p.model(), coords }
    }

    pub fn to_point(&self) -> hyperlsh::Result<Point> {
        Ok(match self.model {
            Model::Ball => PoincarePoint::new(self.coords.clone())?.into(),
            Model::HalfSpace => {
                let Some((&z, x)) = self.coords.split_first() else {
                    return Err(hyperlsh::Error::Domain("half-space record has no coordinates".into()));
                };
                HalfSpacePoint::new(z, x.to_vec())?.into()
            }
        })
    }
}

pub fn parse_record(line: &str) -> Result<PointRecord, CliError> {
    serde_json::from_str(line).map_err(|e| CliError::Data(format!("bad point record: {e}")))
}

/// Reads a JSONL point file, skipping blank lines. Returns records in file
/// order with their parsed points.
pub fn read_points(path: &str) -> Result<(Vec<u64>, Vec<Point>), CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("cannot open {path}: {e}")))?;
    let mut ids = Vec::new();
    let mut points = Vec::new();
    for (n, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::Data(format!("{path}: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: PointRecord = serde_json::from_str(&line)
            .map_err(|e| CliError::Data(format!("{path}:{}: bad point record: {e}", n + 1)))?;
        let p = rec
            .to_point()
            .map_err(|e| CliError::Data(format!("{path}:{}: {e}", n + 1)))?;
        ids.push(rec.id);
        points.push(p);
    }
    Ok((ids, points))
}

pub fn write_points<W: Write>(out: &mut W, points: &[Point]) -> std::io::Result<()> {
    for (id, p) in points.iter().enumerate() {
        serde_json::to_writer(&mut *out, &PointRecord::from_point(id as u64, p))?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
