use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::HomologyError;

/// One `(dim, birth, death)` feature; `death` is `+∞` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dim: usize,
    pub birth: f64,
    #[serde(with = "death_serde")]
    pub death: f64,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }
}

mod death_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Death {
            Num(f64),
            Text(String),
        }
        match Death::deserialize(d)? {
            Death::Num(v) => Ok(v),
            Death::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Death::Text(t) => Err(serde::de::Error::custom(format!("bad death value {t:?}"))),
        }
    }
}

/// Multiset of persistence pairs from a Rips filtration truncated at
/// `max_edge`, sorted by `(dim, birth, death)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
    pub max_dim: usize,
    pub max_edge: f64,
}

impl PersistenceDiagram {
    pub fn new(mut pairs: Vec<PersistencePair>, max_dim: usize, max_edge: f64) -> Self {
        pairs.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Self { pairs, max_dim, max_edge }
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// Finite persistences in `dim`, largest first.
    pub fn finite_persistences(&self, dim: usize) -> Vec<f64> {
        let mut v: Vec<f64> = self.in_dim(dim).filter(|p| !p.is_essential()).map(|p| p.persistence()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// CSV with header `dim,birth,death`; infinite deaths written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for p in &self.pairs {
            let death = if p.is_essential() {
                "inf".to_string()
            } else {
                format!("{:.16e}", p.death)
            };
            let _ = writeln!(out, "{},{:.16e},{}", p.dim, p.birth, death);
        }
        out
    }

    pub fn from_csv(text: &str, max_dim: usize, max_edge: f64) -> Result<Self, HomologyError> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "dim,birth,death" => {}
            other => return Err(HomologyError::Parse(format!("expected header dim,birth,death, got {other:?}"))),
        }
        let mut pairs = Vec::new();
        for (row, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || HomologyError::Parse(format!("row {}: cannot parse {line:?}", row + 1));
            if fields.len() != 3 {
                return Err(bad());
            }
            let dim = fields[0].parse().map_err(|_| bad())?;
            let birth: f64 = fields[1].parse().map_err(|_| bad())?;
            let death = if fields[2] == "inf" { f64::INFINITY } else { fields[2].parse().map_err(|_| bad())? };
            if !(birth <= death) {
                return Err(bad());
            }
            pairs.push(PersistencePair { dim, birth, death });
        }
        Ok(Self::new(pairs, max_dim, max_edge))
    }
}
