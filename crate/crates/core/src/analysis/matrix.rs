use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use image::{Rgb, RgbImage};

use super::series::{aligned, SeriesTable};
use super::stats::pearson;
use super::AnalysisError;

const MAGIC: &str = "# sosbias correlation matrix v1";
const CELL_PX: u32 = 32;

/// Pairwise Pearson correlations between two groups of series.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub row_group: String,
    pub col_group: String,
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    pub rho: Vec<Vec<f64>>,
    /// Number of aligned labels behind each cell.
    pub n: Vec<Vec<usize>>,
    pub provenance: BTreeMap<String, String>,
}

/// Correlates every series of `row_group` with every series of
/// `col_group` over the labels both have values for.
pub fn correlation_matrix(
    table: &SeriesTable,
    row_group: &str,
    col_group: &str,
) -> Result<CorrelationMatrix, AnalysisError> {
    let rows = table.group(row_group);
    let cols = table.group(col_group);
    for (g, s) in [(row_group, &rows), (col_group, &cols)] {
        if s.is_empty() {
            return Err(AnalysisError::EmptyGroup(g.to_string()));
        }
    }
    let mut rho = Vec::with_capacity(rows.len());
    let mut n = Vec::with_capacity(rows.len());
    for r in &rows {
        let mut rho_row = Vec::with_capacity(cols.len());
        let mut n_row = Vec::with_capacity(cols.len());
        for c in &cols {
            let (x, y) = aligned(r, c);
            let value = pearson(&x, &y).map_err(|e| AnalysisError::Cell {
                row: r.name.clone(),
                col: c.name.clone(),
                source: Box::new(e),
            })?;
            rho_row.push(value);
            n_row.push(x.len());
        }
        rho.push(rho_row);
        n.push(n_row);
    }
    Ok(CorrelationMatrix {
        row_group: row_group.to_string(),
        col_group: col_group.to_string(),
        rows: rows.iter().map(|s| s.name.clone()).collect(),
        cols: cols.iter().map(|s| s.name.clone()).collect(),
        rho,
        n,
        provenance: BTreeMap::new(),
    })
}

impl CorrelationMatrix {
    /// A `rho` block and an `n` block, each with a column header line and
    /// one line per row series.
    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\n# rows\t{}\n# cols\t{}\n", self.row_group, self.col_group);
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}\t{v}");
        }
        let block = |out: &mut String, title: &str, cell: &dyn Fn(usize, usize) -> String| {
            out.push_str(title);
            for c in &self.cols {
                out.push('\t');
                out.push_str(c);
            }
            out.push('\n');
            for (i, r) in self.rows.iter().enumerate() {
                out.push_str(r);
                for j in 0..self.cols.len() {
                    out.push('\t');
                    out.push_str(&cell(i, j));
                }
                out.push('\n');
            }
        };
        block(&mut out, "rho", &|i, j| format!("{:?}", self.rho[i][j]));
        out.push('\n');
        block(&mut out, "n", &|i, j| self.n[i][j].to_string());
        out
    }

    /// Diverging heatmap: blue for -1, white for 0, red for +1.
    pub fn heatmap(&self) -> RgbImage {
        let (w, h) = (self.cols.len() as u32 * CELL_PX, self.rows.len() as u32 * CELL_PX);
        RgbImage::from_fn(w, h, |x, y| {
            let v = self.rho[(y / CELL_PX) as usize][(x / CELL_PX) as usize];
            let fade = |t: f64| (255.0 * (1.0 - t.abs())).round() as u8;
            if v >= 0.0 {
                Rgb([255, fade(v), fade(v)])
            } else {
                Rgb([fade(v), fade(v), 255])
            }
        })
    }

    pub fn save_heatmap(&self, path: impl AsRef<Path>) -> Result<(), AnalysisError> {
        let path = path.as_ref();
        self.heatmap()
            .save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| AnalysisError::Image(format!("{}: {e}", path.display())))
    }
}
