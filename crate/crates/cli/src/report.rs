use std::collections::BTreeMap;
use std::fmt::Write as _;

use dispersat::cnf::dispersion_measures;
use dispersat::{Error, SolutionCollection};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "dispersat.report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Ok,
    Unsat,
    Infeasible,
    NotFound,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Unsat | Status::Infeasible | Status::NotFound => 1,
            Status::Error => 2,
        }
    }

    pub fn of(e: &Error) -> Status {
        match e {
            Error::Unsat => Status::Unsat,
            Error::Infeasible(_) | Error::Partial { .. } => Status::Infeasible,
            Error::NotFound => Status::NotFound,
            Error::Parse { .. } | Error::Usage(_) | Error::Capability(_) => Status::Error,
        }
    }
}

/// Every key is always present; fields a command does not produce are null.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Vec<String>,
    pub status: Status,
    pub assignments: Vec<String>,
    #[serde(rename = "minPD")]
    pub min_pd: Option<u64>,
    #[serde(rename = "sumPD")]
    pub sum_pd: Option<u64>,
    pub oracle_calls: Option<u64>,
    pub iterations: Option<u64>,
    pub seed: u64,
    pub wall_time_ms: u64,
    pub message: Option<String>,
    /// Command-specific values, keyed by name.
    pub details: BTreeMap<String, Value>,
    /// Text-format body replacing the key/value listing (DIMACS, CSV).
    #[serde(skip)]
    pub raw: Option<String>,
}

impl Report {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Report {
            schema: SCHEMA,
            command,
            status: Status::Ok,
            assignments: Vec::new(),
            min_pd: None,
            sum_pd: None,
            oracle_calls: None,
            iterations: None,
            seed,
            wall_time_ms: 0,
            message: None,
            details: BTreeMap::new(),
            raw: None,
        }
    }

    pub fn fail(&mut self, e: &Error) {
        self.status = Status::of(e);
        self.message = Some(e.to_string());
    }

    /// Records the collection and its measures; singletons get no pairwise values.
    pub fn set_solutions(&mut self, s: &SolutionCollection) {
        self.assignments = s.members().iter().map(|z| z.to_string()).collect();
        if s.len() >= 2 {
            let m = dispersion_measures(s, None).expect("collection members share a length");
            self.min_pd = Some(m.min_pd);
            self.sum_pd = Some(m.sum_pd);
        }
    }

    pub fn detail(&mut self, key: &str, v: impl Into<Value>) {
        self.details.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        if let (Status::Ok, Some(raw)) = (self.status, &self.raw) {
            return raw.clone();
        }
        let mut out = String::new();
        let status = serde_json::to_value(self.status).unwrap();
        writeln!(out, "status {}", status.as_str().unwrap()).unwrap();
        if let Some(m) = &self.message {
            writeln!(out, "message {m}").unwrap();
        }
        for a in &self.assignments {
            writeln!(out, "assignment {a}").unwrap();
        }
        let counters = [
            ("minPD", self.min_pd),
            ("sumPD", self.sum_pd),
            ("oracle_calls", self.oracle_calls),
            ("iterations", self.iterations),
        ];
        for (name, v) in counters {
            if let Some(v) = v {
                writeln!(out, "{name} {v}").unwrap();
            }
        }
        for (k, v) in &self.details {
            match v {
                Value::String(s) => writeln!(out, "{k} {s}").unwrap(),
                v => writeln!(out, "{k} {v}").unwrap(),
            }
        }
        writeln!(out, "seed {}", self.seed).unwrap();
        writeln!(out, "wall_time_ms {}", self.wall_time_ms).unwrap();
        out
    }
}
