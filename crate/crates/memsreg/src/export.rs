//! CSV and JSON artifacts plus matplotlib scripts that plot them.
//!
//! CSV files start with `# key = value` rows, then one header line, then
//! data. Numbers are printed with a fixed format so reruns are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

/// Column table with metadata comments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        CsvTable { columns: columns.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k} = {v}");
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|v| fmt_num(*v)).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, self.render())?;
        Ok(())
    }
}

/// Fixed-width scientific format; NaN marks missing values.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.12e}")
    }
}

/// Parse a CSV produced by [`CsvTable::render`].
pub fn parse_csv(text: &str) -> Option<CsvTable> {
    let mut t = CsvTable::default();
    let mut header = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# ") {
            let (k, v) = rest.split_once(" = ")?;
            t.meta.push((k.to_string(), v.to_string()));
        } else if !header {
            t.columns = line.split(',').map(str::to_string).collect();
            header = true;
        } else {
            t.rows.push(line.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect());
        }
    }
    header.then_some(t)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut s = serde_json::to_string_pretty(value).map_err(|e| crate::Error::InvalidParams(e.to_string()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

/// One panel of a generated figure.
#[derive(Debug, Clone)]
pub struct Panel {
    pub csv: String,
    pub x: String,
    pub y: Vec<String>,
    pub xlabel: String,
    pub ylabel: String,
    pub logx: bool,
    pub logy: bool,
    /// Column whose distinct values split the rows into separate curves.
    pub group_by: Option<String>,
}

impl Panel {
    pub fn new(csv: &str, x: &str, y: &[&str]) -> Self {
        Panel {
            csv: csv.into(),
            x: x.into(),
            y: y.iter().map(|s| s.to_string()).collect(),
            xlabel: x.into(),
            ylabel: y.join(", "),
            logx: false,
            logy: false,
            group_by: None,
        }
    }

    pub fn labels(mut self, x: &str, y: &str) -> Self {
        self.xlabel = x.into();
        self.ylabel = y.into();
        self
    }

    pub fn loglog(mut self) -> Self {
        self.logx = true;
        self.logy = true;
        self
    }

    pub fn group(mut self, col: &str) -> Self {
        self.group_by = Some(col.into());
        self
    }
}

/// Python script drawing `panels` side by side into `<name>.png`.
pub fn plot_script(name: &str, title: &str, panels: &[Panel]) -> String {
    let mut s = String::new();
    s.push_str("#!/usr/bin/env python3\n");
    s.push_str("import csv, os, sys\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n");
    s.push_str("HERE = os.path.dirname(os.path.abspath(__file__))\n\n");
    s.push_str(
        "def load(name):\n    with open(os.path.join(HERE, name)) as f:\n        rows = [r for r in f if not r.startswith('#')]\n    rd = csv.DictReader(rows)\n    return [{k: float(v) for k, v in r.items()} for r in rd]\n\n",
    );
    let _ = writeln!(s, "fig, axes = plt.subplots(1, {}, figsize=({}, 4), squeeze=False)", panels.len(), 5 * panels.len());
    let _ = writeln!(s, "fig.suptitle({title:?})");
    for (i, p) in panels.iter().enumerate() {
        let _ = writeln!(s, "ax = axes[0][{i}]");
        let _ = writeln!(s, "data = load({:?})", p.csv);
        match &p.group_by {
            Some(g) => {
                let _ = writeln!(s, "for key in sorted({{r[{g:?}] for r in data}}):");
                let _ = writeln!(s, "    sub = [r for r in data if r[{g:?}] == key]");
                for y in &p.y {
                    let _ = writeln!(
                        s,
                        "    ax.plot([r[{:?}] for r in sub], [r[{y:?}] for r in sub], label='{g}=%g' % key)",
                        p.x
                    );
                }
            }
            None => {
                for y in &p.y {
                    let _ = writeln!(s, "ax.plot([r[{:?}] for r in data], [r[{y:?}] for r in data], label={y:?})", p.x);
                }
            }
        }
        if p.logx {
            s.push_str("ax.set_xscale('log')\n");
        }
        if p.logy {
            s.push_str("ax.set_yscale('log')\n");
        }
        let _ = writeln!(s, "ax.set_xlabel({:?})\nax.set_ylabel({:?})\nax.legend(fontsize=7)", p.xlabel, p.ylabel);
    }
    let _ = writeln!(s, "fig.tight_layout()\nfig.savefig(os.path.join(HERE, {:?}), dpi=150)", format!("{name}.png"));
    s.push_str("if '--show' in sys.argv:\n    plt.show()\n");
    s
}

/// Write a plot script next to its CSVs and return its path.
pub fn write_plot_script(dir: &Path, name: &str, title: &str, panels: &[Panel]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("plot_{name}.py"));
    fs::write(&path, plot_script(name, title, panels))?;
    Ok(path)
}
