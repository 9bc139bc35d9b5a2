//! Result rows and their CSV form.

use std::io::Write;
use std::path::Path;

use lorentz_metrics::Event;

/// Column order of every results file.
pub const COLUMNS: [&str; 12] = [
    "experiment",
    "domain",
    "metric",
    "kind",
    "x",
    "y",
    "z",
    "w",
    "value",
    "mesh",
    "seed",
    "wall_ms",
];

/// One line of output.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub domain: String,
    pub metric: String,
    /// `upper`, `lower`, `exact`, or a non-distance tag such as `verdict` or `error`.
    pub kind: String,
    /// Up to four events: a pair, a triangle's corners or a quadruple.
    pub points: Vec<Event>,
    pub value: Option<f64>,
    pub mesh: String,
    pub seed: u64,
    pub wall_ms: u128,
}

/// Semicolon-separated coordinates, shortest round-trip decimal form.
pub fn coords(e: &Event) -> String {
    e.coords().iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(";")
}

impl ResultRow {
    pub fn fields(&self) -> Vec<String> {
        let mut out = vec![
            self.experiment.clone(),
            self.domain.clone(),
            self.metric.clone(),
            self.kind.clone(),
        ];
        for i in 0..4 {
            out.push(self.points.get(i).map(coords).unwrap_or_default());
        }
        out.push(self.value.map(|v| format!("{v}")).unwrap_or_default());
        out.push(self.mesh.clone());
        out.push(self.seed.to_string());
        out.push(self.wall_ms.to_string());
        out
    }
}

/// Writes the header and rows to `path`.
pub fn write_csv(path: &Path, rows: &[ResultRow]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes text to `path`.
pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())
}
