//! Matroid descriptors in JSON.
//!
//! Three shapes are accepted:
//!
//! ```json
//! {"n": 4, "bases": [[1, 2], [1, 3], [2, 3]]}
//! {"uniform": [2, 4]}
//! {"graph": {"vertices": 5, "edges": [[1, 2], [2, 3]]}}
//! ```

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tautring_core::fan::Bisubset;
use tautring_core::matroid::Matroid;
use tautring_core::Subset;

use crate::error::InputError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum MatroidSpec {
    Bases { n: usize, bases: Vec<Vec<usize>> },
    Uniform { uniform: (usize, usize) },
    Graph { graph: Graph },
}

impl MatroidSpec {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(InputError::Json)
    }

    /// Inline JSON when the argument starts with `{`, otherwise a file path.
    pub fn load(arg: &str) -> Result<Self, InputError> {
        if arg.trim_start().starts_with('{') {
            return Self::parse(arg);
        }
        let text = fs::read_to_string(Path::new(arg)).map_err(|e| InputError::Io { path: arg.into(), source: e })?;
        Self::parse(&text)
    }

    pub fn build(&self) -> Result<Matroid, InputError> {
        let m = match self {
            MatroidSpec::Bases { n, bases } => {
                Matroid::from_bases(*n, bases.iter().map(|b| Subset::from_elems(b.iter().copied())))
            }
            MatroidSpec::Uniform { uniform: (r, n) } => Matroid::uniform(*r, *n),
            MatroidSpec::Graph { graph } => Matroid::from_graph(graph.vertices, &graph.edges),
        };
        m.map_err(InputError::Matroid)
    }
}

impl fmt::Display for MatroidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatroidSpec::Bases { n, bases } => {
                write!(f, "M[{n}](")?;
                for (i, b) in bases.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", Subset::from_elems(b.iter().copied()))?;
                }
                write!(f, ")")
            }
            MatroidSpec::Uniform { uniform: (r, n) } => write!(f, "U{r},{n}"),
            MatroidSpec::Graph { graph } => {
                write!(f, "G[{}](", graph.vertices)?;
                for (i, (u, v)) in graph.edges.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{u}-{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn parse_subset(n: usize, text: &str) -> Result<Subset, InputError> {
    let bad = || InputError::Usage(format!("cannot read subset {text:?}"));
    let text = text.trim();
    if text == "E" {
        return Ok(Subset::full(n));
    }
    let elems: Vec<usize> = if text.contains(',') {
        text.split(',').map(|e| e.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    } else {
        text.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_, _>>()?
    };
    if elems.iter().any(|&e| e == 0 || e > n) {
        return Err(bad());
    }
    Ok(Subset::from_elems(elems))
}

/// A chain of bisubsets written `S|T;S|T;...`. Subsets are digit strings,
/// comma lists for elements above 9, or `E` for the whole ground set.
/// The empty string is the empty chain.
pub fn parse_chain(n: usize, text: &str) -> Result<Vec<Bisubset>, InputError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(';')
        .map(|part| {
            let (s, t) = part.split_once('|').ok_or_else(|| InputError::Usage(format!("expected S|T, got {part:?}")))?;
            Bisubset::new(n, parse_subset(n, s)?, parse_subset(n, t)?).map_err(InputError::Matroid)
        })
        .collect()
}
