//! Regeneration of the dilute-limit and finite-N tables, and comparison
//! against the printed reference values.

use serde::{Deserialize, Serialize};

use crate::egoe::{
    egoe_moment, moment_correction, q_dilute, q_finite_n, rho_dilute, rho_finite_n, SystemSpec,
};
use crate::error::{domain, Result};

/// Printed values carry three decimals.
pub const FIXTURE_TOL: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableMode {
    Dilute,
    FiniteN,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRequest {
    pub mode: TableMode,
    /// Only used by the finite-N formulas; dilute rows ignore it.
    pub orbitals: usize,
    pub particles: usize,
    pub body_ranks: Vec<usize>,
    pub transition_ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: usize,
    pub t: usize,
    pub rho: f64,
    pub q: f64,
    pub mu22: Option<f64>,
    pub mu60: Option<f64>,
    pub mu42: Option<f64>,
    pub mu33: Option<f64>,
    pub corr22: Option<f64>,
    pub corr60: Option<f64>,
    pub corr42: Option<f64>,
    pub corr33: Option<f64>,
}

impl TableRow {
    fn column(&self, name: &str) -> Option<f64> {
        match name {
            "rho" => Some(self.rho),
            "q" => Some(self.q),
            "mu22" => self.mu22,
            "mu60" => self.mu60,
            "mu42" => self.mu42,
            "mu33" => self.mu33,
            "corr22" => self.corr22,
            "corr60" => self.corr60,
            "corr42" => self.corr42,
            "corr33" => self.corr33,
            _ => None,
        }
    }
}

pub const CSV_COLUMNS: [&str; 12] = [
    "k", "t", "rho", "q", "mu22", "mu60", "mu42", "mu33", "corr22", "corr60", "corr42", "corr33",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub request: TableRequest,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn row(&self, k: usize, t: usize) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.k == k && r.t == t)
    }

    /// Comma separated, LF terminated, header first; missing cells are empty.
    pub fn to_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = CSV_COLUMNS
                .iter()
                .map(|&c| match c {
                    "k" => row.k.to_string(),
                    "t" => row.t.to_string(),
                    _ => row.column(c).map(|v| format!("{v:.6}")).unwrap_or_default(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Builds one row per `(t, k)` pair, `t` outermost.
pub fn make_table(request: &TableRequest) -> Result<Table> {
    if request.body_ranks.is_empty() || request.transition_ranks.is_empty() {
        return Err(domain("table needs at least one k and one t"));
    }
    let mut rows = Vec::new();
    for &t in &request.transition_ranks {
        for &k in &request.body_ranks {
            let spec = SystemSpec::new(request.orbitals, request.particles, k, t)?;
            let row = match request.mode {
                TableMode::Dilute => TableRow {
                    k,
                    t,
                    rho: rho_dilute(&spec),
                    q: q_dilute(&spec),
                    mu22: Some(egoe_moment(2, 2, &spec)?),
                    mu60: Some(egoe_moment(6, 0, &spec)?),
                    mu42: Some(egoe_moment(4, 2, &spec)?),
                    mu33: Some(egoe_moment(3, 3, &spec)?),
                    corr22: Some(moment_correction(2, 2, &spec)?),
                    corr60: Some(moment_correction(6, 0, &spec)?),
                    corr42: Some(moment_correction(4, 2, &spec)?),
                    corr33: Some(moment_correction(3, 3, &spec)?),
                },
                TableMode::FiniteN => TableRow {
                    k,
                    t,
                    rho: rho_finite_n(&spec),
                    q: q_finite_n(&spec),
                    mu22: None,
                    mu60: None,
                    mu42: None,
                    mu33: None,
                    corr22: None,
                    corr60: None,
                    corr42: None,
                    corr33: None,
                },
            };
            rows.push(row);
        }
    }
    Ok(Table {
        request: request.clone(),
        rows,
    })
}

/// The three published tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrintedTable {
    /// m = 10, k = 2..6, t = 1, 2, dilute limit.
    Table1,
    /// m = 15, k = 2..8, t = 1, 2, dilute limit.
    Table2,
    /// N = 20, m = 10, k = 2..10, t = 1, 2, finite N.
    Table3,
}

impl PrintedTable {
    pub fn request(self) -> TableRequest {
        match self {
            Self::Table1 => TableRequest {
                mode: TableMode::Dilute,
                orbitals: 20,
                particles: 10,
                body_ranks: (2..=6).collect(),
                transition_ranks: vec![1, 2],
            },
            Self::Table2 => TableRequest {
                mode: TableMode::Dilute,
                orbitals: 30,
                particles: 15,
                body_ranks: (2..=8).collect(),
                transition_ranks: vec![1, 2],
            },
            Self::Table3 => TableRequest {
                mode: TableMode::FiniteN,
                orbitals: 20,
                particles: 10,
                body_ranks: (2..=10).collect(),
                transition_ranks: vec![1, 2],
            },
        }
    }

    fn fixture_text(self) -> &'static str {
        match self {
            Self::Table1 => include_str!("../fixtures/table1.csv"),
            Self::Table2 => include_str!("../fixtures/table2.csv"),
            Self::Table3 => include_str!("../fixtures/table3.csv"),
        }
    }

    /// Printed cells as `(k, t, column, value)`.
    pub fn fixture(self) -> Vec<FixtureCell> {
        let mut lines = self.fixture_text().lines();
        let header: Vec<&str> = lines.next().expect("fixture header").split(',').collect();
        let mut cells = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').collect();
            let get = |name: &str| {
                let i = header
                    .iter()
                    .position(|h| *h == name)
                    .expect("fixture column");
                fields[i]
            };
            let k: usize = get("k").parse().expect("fixture k");
            let t: usize = get("t").parse().expect("fixture t");
            for (i, name) in header.iter().enumerate() {
                if matches!(*name, "m" | "N" | "k" | "t") {
                    continue;
                }
                let value: f64 = fields[i].parse().expect("fixture value");
                cells.push(FixtureCell {
                    k,
                    t,
                    column: name.to_string(),
                    printed: value,
                });
            }
        }
        cells
    }

    pub fn generate(self) -> Result<Table> {
        make_table(&self.request())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureCell {
    pub k: usize,
    pub t: usize,
    pub column: String,
    pub printed: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub k: usize,
    pub t: usize,
    pub column: String,
    pub printed: f64,
    pub computed: f64,
}

impl Mismatch {
    pub fn deviation(&self) -> f64 {
        (self.computed - self.printed).abs()
    }
}

/// Every printed cell whose regenerated value differs by more than `tol`.
pub fn compare_with_fixture(table: &Table, which: PrintedTable, tol: f64) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for cell in which.fixture() {
        let computed = table
            .row(cell.k, cell.t)
            .and_then(|r| r.column(&cell.column))
            .unwrap_or(f64::NAN);
        if !((computed - cell.printed).abs() <= tol) {
            out.push(Mismatch {
                k: cell.k,
                t: cell.t,
                column: cell.column,
                printed: cell.printed,
                computed,
            });
        }
    }
    out
}
