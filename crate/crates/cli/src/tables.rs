//! Text tables with one row per prime and one column per Artin invariant.

use std::collections::BTreeMap;

use enriques_core::pipeline::EnriquesReport;

/// A cell per `(p, σ)`; `None` marks a value that was not computed.
#[derive(Clone, Debug, Default)]
pub struct Grid {
    pub primes: Vec<u64>,
    pub sigmas: Vec<u32>,
    pub cells: BTreeMap<(u64, u32), Option<(String, String)>>,
}

impl Grid {
    pub fn new(primes: Vec<u64>, sigmas: Vec<u32>) -> Self {
        Grid { primes, sigmas, cells: BTreeMap::new() }
    }

    pub fn insert(&mut self, report: &EnriquesReport) {
        let key = (report.params.p, report.params.sigma);
        self.cells.insert(key, Some((report.lower_bound.to_string(), report.upper_bound.to_string())));
    }

    pub fn mark_unknown(&mut self, p: u64, sigma: u32) {
        self.cells.insert((p, sigma), None);
    }

    fn render(&self, title: &str, pick: impl Fn(&(String, String)) -> &str) -> String {
        let mut out = format!("{title}\np");
        for s in &self.sigmas {
            out.push_str(&format!(" σ={s}"));
        }
        out.push('\n');
        for p in &self.primes {
            out.push_str(&p.to_string());
            for s in &self.sigmas {
                let cell = self.cells.get(&(*p, *s)).and_then(|c| c.as_ref()).map_or("?", &pick);
                out.push(' ');
                out.push_str(cell);
            }
            out.push('\n');
        }
        out
    }

    pub fn lower_table(&self) -> String {
        self.render("lower bounds Rep(p,σ)", |c| &c.0)
    }

    pub fn upper_table(&self) -> String {
        self.render("upper bounds", |c| &c.1)
    }
}
