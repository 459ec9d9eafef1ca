//! Plain-text artifacts: CSV tables, field matrices and gnuplot triples.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use halftorus::{Field2D, Grid2D};

use crate::error::{CliError, CliResult};

/// 17 significant digits, locale independent.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Column-oriented CSV builder.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    /// `# ...` line, ignored by CSV readers that honour comments.
    pub fn comment(&mut self, line: &str) {
        self.text.push_str("# ");
        self.text.push_str(line);
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Matrix file: three header lines, then `Nφ` rows of `Nθ` values.
pub fn field_matrix(grid: &Grid2D, field: &Field2D) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# dimensions {} {}", grid.nphi(), grid.ntheta());
    let _ = writeln!(s, "# phi {} {}", num(0.0), num(std::f64::consts::PI));
    let _ = writeln!(s, "# theta {} {}", num(0.0), num(grid.theta(grid.ntheta() - 1)));
    for i in 0..grid.nphi() {
        let row: Vec<String> = field.row(i).iter().map(|&v| num(v)).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// `φ θ u` triples with a blank line after each φ-row.
pub fn gnuplot_triples(grid: &Grid2D, field: &Field2D) -> String {
    let mut s = String::new();
    for i in 0..grid.nphi() {
        for j in 0..grid.ntheta() {
            let _ = writeln!(
                s,
                "{} {} {}",
                num(grid.phi(i)),
                num(grid.theta(j)),
                num(field.get(i, j))
            );
        }
        s.push('\n');
    }
    s
}

/// Output directory that records every file it writes.
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(CliError::io(root))?;
        let marker = root.join(FAILED_MARKER);
        if marker.exists() {
            std::fs::remove_file(&marker).map_err(CliError::io(&marker))?;
        }
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(CliError::io(parent))?;
        }
        std::fs::write(&path, contents).map_err(CliError::io(&path))?;
        self.written.push(name.to_string());
        Ok(path)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }

    /// Leaves a marker next to whatever artifacts were already written.
    pub fn mark_failed(&mut self, err: &CliError) -> CliResult<()> {
        self.write(FAILED_MARKER, &format!("{err}\nexit code {}\n", err.exit_code()))
            .map(|_| ())
    }
}

pub const FAILED_MARKER: &str = "FAILED";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn matrix_header_and_shape() {
        let g = Grid2D::new(16, 16).unwrap();
        let f = Field2D::from_fn(&g, |i, j| (i * 16 + j) as f64);
        let text = field_matrix(&g, &f);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3 + 16);
        assert_eq!(lines[0], "# dimensions 16 16");
        assert_eq!(lines[3].split(' ').count(), 16);
        let tri = gnuplot_triples(&g, &f);
        assert_eq!(tri.lines().filter(|l| !l.is_empty()).count(), 256);
    }
}
