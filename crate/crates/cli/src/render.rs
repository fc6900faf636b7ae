use jobmarket_core::competitive::Allocation;
use jobmarket_core::rational::{format_decimal, format_rational};
use jobmarket_core::Rational;

/// Number formatting: exact fractions unless a digit count is set.
#[derive(Debug, Clone, Copy)]
pub struct Renderer {
    digits: Option<usize>,
}

impl Renderer {
    pub fn new(digits: Option<usize>) -> Self {
        Self { digits }
    }

    pub fn number(&self, value: &Rational) -> String {
        match self.digits {
            Some(d) => format_decimal(value, d),
            None => format_rational(value),
        }
    }

    pub fn vector(&self, values: &[Rational]) -> String {
        let parts: Vec<String> = values.iter().map(|v| self.number(v)).collect();
        format!("({})", parts.join(", "))
    }

    /// `(u1, u2; w1, w2, w3)`
    pub fn allocation(&self, z: &Allocation) -> String {
        let side = |v: &[Rational]| {
            v.iter()
                .map(|x| self.number(x))
                .collect::<Vec<_>>()
                .join(", ")
        };
        format!("({}; {})", side(&z.firms), side(&z.workers))
    }
}

/// Right-aligned text table; `|` cells become column separators.
pub struct Table {
    head: Vec<String>,
    rows: Vec<Vec<String>>,
    left_last: bool,
}

impl Table {
    pub fn new(head: Vec<String>) -> Self {
        Self {
            head,
            rows: Vec::new(),
            left_last: false,
        }
    }

    /// Left-align the final column (free text).
    pub fn left_align_last(mut self) -> Self {
        self.left_last = true;
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.head.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.head.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells
                .iter()
                .zip(&widths)
                .enumerate()
                .map(|(k, (c, &w))| {
                    if self.left_last && k + 1 == cells.len() {
                        c.clone()
                    } else {
                        format!("{c:>w$}")
                    }
                })
                .collect();
            parts.join(" ").trim_end().to_string() + "\n"
        };
        let mut out = line(&self.head);
        for row in &self.rows {
            out += &line(row);
        }
        out
    }
}
