//! Serialization. Floats use the shortest representation that round-trips,
//! so identical runs give identical bytes.
//!
//! CSV files start with `#` comment lines carrying the resolved
//! configuration; JSON documents carry it under `provenance`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use gauge_sim::dynamics::DensityGrid;
use serde::Serialize;

use crate::config::{Format, Layout, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize)]
pub struct Provenance<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
}

impl<'a> Provenance<'a> {
    pub fn new(command: &'a str, config: &'a RunConfig) -> Self {
        Provenance {
            tool: "gauge-sim",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
        }
    }

    fn write_comment(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "# {} {} {}", self.tool, self.version, self.command)?;
        let json = serde_json::to_string(self.config).expect("config serializes");
        writeln!(w, "# config: {json}")
    }
}

/// Shortest round-trip decimal, switching to exponent form outside [1e-4, 1e15).
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Rectangular numeric table with named columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct TableDoc<'a> {
    provenance: &'a Provenance<'a>,
    columns: &'a [String],
    rows: &'a [Vec<f64>],
}

#[derive(Serialize)]
struct GridDoc<'a> {
    provenance: &'a Provenance<'a>,
    y_axis: &'a [f64],
    z_axis: &'a [f64],
    /// values[i][j] = p(y_i, z_j)
    values: &'a [Vec<f64>],
}

/// Opens `path` or stdout.
pub fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn finish(w: &mut dyn Write, path: Option<&Path>, r: io::Result<()>) -> CliResult<()> {
    let label = || path.map_or_else(|| "<stdout>".into(), Path::to_path_buf);
    r.and_then(|_| w.flush()).map_err(|e| CliError::io(label(), e))
}

fn write_csv_row(w: &mut dyn Write, row: &[f64]) -> io::Result<()> {
    let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
    writeln!(w, "{}", line.join(","))
}

pub fn write_table(prov: &Provenance, table: &Table, format: Format, path: Option<&Path>) -> CliResult<()> {
    let mut w = sink(path)?;
    let r = (|| -> io::Result<()> {
        match format {
            Format::Csv => {
                prov.write_comment(&mut w)?;
                writeln!(w, "{}", table.columns.join(","))?;
                for row in &table.rows {
                    write_csv_row(&mut w, row)?;
                }
                Ok(())
            }
            Format::Json => {
                let doc = TableDoc {
                    provenance: prov,
                    columns: &table.columns,
                    rows: &table.rows,
                };
                serde_json::to_writer_pretty(&mut w, &doc)?;
                writeln!(w)
            }
        }
    })();
    finish(&mut w, path, r)
}

pub fn write_density(
    prov: &Provenance,
    d: &DensityGrid,
    format: Format,
    layout: Layout,
    path: Option<&Path>,
) -> CliResult<()> {
    if layout == Layout::Long {
        let mut rows = Vec::with_capacity(d.y_axis.len() * d.z_axis.len());
        for (row, y) in d.values.iter().zip(&d.y_axis) {
            for (p, z) in row.iter().zip(&d.z_axis) {
                rows.push(vec![*y, *z, *p]);
            }
        }
        let table = Table {
            columns: vec!["y".into(), "z".into(), "p".into()],
            rows,
        };
        return write_table(prov, &table, format, path);
    }
    let mut w = sink(path)?;
    let r = (|| -> io::Result<()> {
        match format {
            Format::Csv => {
                prov.write_comment(&mut w)?;
                // first row: z axis; first column: y axis
                let z: Vec<String> = d.z_axis.iter().map(|v| fmt_f64(*v)).collect();
                writeln!(w, "y\\z,{}", z.join(","))?;
                for (row, y) in d.values.iter().zip(&d.y_axis) {
                    write!(w, "{},", fmt_f64(*y))?;
                    write_csv_row(&mut w, row)?;
                }
                Ok(())
            }
            Format::Json => {
                let doc = GridDoc {
                    provenance: prov,
                    y_axis: &d.y_axis,
                    z_axis: &d.z_axis,
                    values: &d.values,
                };
                serde_json::to_writer_pretty(&mut w, &doc)?;
                writeln!(w)
            }
        }
    })();
    finish(&mut w, path, r)
}

/// Pretty JSON document to `path` or stdout.
pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let mut w = sink(path)?;
    let r = serde_json::to_writer_pretty(&mut w, value)
        .map_err(io::Error::from)
        .and_then(|_| writeln!(w));
    finish(&mut w, path, r)
}
