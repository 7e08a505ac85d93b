use std::fmt::Write as _;

/// Version tag written in the first line of every CSV.
pub const SCHEMA_VERSION: &str = "lh2sim-csv/1";

/// Column-oriented time series with named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TimeSeries {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        TimeSeries {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Copy of one column; panics on an unknown name.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let i = self
            .column_index(name)
            .unwrap_or_else(|| panic!("no column '{name}' in {:?}", self.columns));
        self.rows.iter().map(|r| r[i]).collect()
    }

    /// CSV text with a `# schema=..., table=...` comment line first.
    pub fn to_csv(&self, table: &str) -> String {
        let mut out = format!("# schema={SCHEMA_VERSION} table={table}\n");
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(',');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Ordered key/value summary of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Summary {
    pub entries: Vec<(String, String)>,
}

impl Summary {
    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.entries.push((key.to_string(), format!("{value}")));
        self
    }

    pub fn text(&mut self, key: &str, value: impl Into<String>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.text(key, if value { "true" } else { "false" })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// `key = value` lines.
    pub fn to_text(&self) -> String {
        let mut out = format!("# schema={SCHEMA_VERSION} table=summary\n");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut ts = TimeSeries::new(["t", "x"]);
        ts.push(vec![0.0, 1.5]);
        ts.push(vec![10.0, -2.0]);
        let csv = ts.to_csv("demo");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# schema=lh2sim-csv/1 table=demo");
        assert_eq!(lines[1], "t,x");
        assert_eq!(lines[2], "0,1.5");
        assert_eq!(lines[3], "10,-2");
        assert_eq!(ts.column("x"), vec![1.5, -2.0]);
    }

    #[test]
    fn summary_lookup() {
        let mut s = Summary::default();
        s.num("a", 1.25).flag("b", true);
        assert_eq!(s.get("a"), Some("1.25"));
        assert!(s.to_text().contains("b = true"));
    }
}
