//! Time series with named columns and a fixed CSV rendering.

use std::io::{self, Write};

use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("time grid must be strictly increasing")]
    NotIncreasing,
    #[error("column `{name}` has {got} rows, expected {expected}")]
    LengthMismatch { name: String, got: usize, expected: usize },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("column name `{0}` is not a plain CSV token")]
    BadName(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData<T> {
    Real(Vec<T>),
    Text(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column<T> {
    pub name: String,
    pub data: ColumnData<T>,
}

/// Values sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T = f64> {
    index: String,
    t: Vec<T>,
    columns: Vec<Column<T>>,
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace<T: Real>(start: T, end: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (end - start) / T::from_count(n - 1);
            (0..n)
                .map(|i| if i == n - 1 { end } else { start + step * T::from_count(i) })
                .collect()
        }
    }
}

impl<T: Real> TimeSeries<T> {
    pub fn new(t: Vec<T>) -> Result<Self, SeriesError> {
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SeriesError::NotIncreasing);
        }
        Ok(Self { index: "t".to_owned(), t, columns: Vec::new() })
    }

    /// Renames the leading column (default `t`).
    pub fn with_index_name(mut self, name: &str) -> Result<Self, SeriesError> {
        if !is_token(name) || self.columns.iter().any(|c| c.name == name) {
            return Err(SeriesError::BadName(name.to_owned()));
        }
        self.index = name.to_owned();
        Ok(self)
    }

    pub fn t(&self) -> &[T] {
        &self.t
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn columns(&self) -> &[Column<T>] {
        &self.columns
    }

    pub fn push(&mut self, name: &str, values: Vec<T>) -> Result<(), SeriesError> {
        self.check_new(name, values.len())?;
        self.columns.push(Column { name: name.to_owned(), data: ColumnData::Real(values) });
        Ok(())
    }

    pub fn push_text(&mut self, name: &str, values: Vec<String>) -> Result<(), SeriesError> {
        self.check_new(name, values.len())?;
        if let Some(bad) = values.iter().find(|v| !is_token(v)) {
            return Err(SeriesError::BadName(bad.clone()));
        }
        self.columns.push(Column { name: name.to_owned(), data: ColumnData::Text(values) });
        Ok(())
    }

    pub fn with(mut self, name: &str, values: Vec<T>) -> Result<Self, SeriesError> {
        self.push(name, values)?;
        Ok(self)
    }

    pub fn column(&self, name: &str) -> Option<&[T]> {
        self.columns.iter().find(|c| c.name == name).and_then(|c| match &c.data {
            ColumnData::Real(v) => Some(v.as_slice()),
            ColumnData::Text(_) => None,
        })
    }

    /// Header `<index>,<names...>`, then one row per time; reals use 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "{}", self.index)?;
        for c in &self.columns {
            write!(w, ",{}", c.name)?;
        }
        writeln!(w)?;
        for (i, t) in self.t.iter().enumerate() {
            write!(w, "{t:.16e}")?;
            for c in &self.columns {
                match &c.data {
                    ColumnData::Real(v) => write!(w, ",{:.16e}", v[i])?,
                    ColumnData::Text(v) => write!(w, ",{}", v[i])?,
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }

    fn check_new(&self, name: &str, len: usize) -> Result<(), SeriesError> {
        if !is_token(name) || name == self.index {
            return Err(SeriesError::BadName(name.to_owned()));
        }
        if self.columns.iter().any(|c| c.name == name) {
            return Err(SeriesError::DuplicateColumn(name.to_owned()));
        }
        if len != self.t.len() {
            return Err(SeriesError::LengthMismatch { name: name.to_owned(), got: len, expected: self.t.len() });
        }
        Ok(())
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '(' | ')' | '^' | '*' | '/'))
}
