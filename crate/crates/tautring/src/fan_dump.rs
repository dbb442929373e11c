//! Fan export and the structural sanity checks run alongside it.

use serde::{Deserialize, Serialize};
use tautring_core::chow::graded_dimension;
use tautring_core::fan::{Fan, FanKind};
use tautring_core::check::Check;
use num_traits::One;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayDump {
    pub label: String,
    pub vector: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanDump {
    pub kind: String,
    pub ambient_dim: usize,
    pub lineality: Vec<Vec<i64>>,
    pub rays: Vec<RayDump>,
    /// Ray indices of each maximal cone.
    pub maximal_cones: Vec<Vec<u32>>,
    /// Weights of the maximal cones, as reduced fractions.
    pub weights: Vec<String>,
    /// Number of cones of each dimension, starting at 0.
    pub cone_counts: Vec<usize>,
}

pub fn kind_name(kind: FanKind) -> String {
    match kind {
        FanKind::Permutohedral { n } => format!("permutohedral({n})"),
        FanKind::Bergman { n, rank } => format!("bergman(n={n},r={rank})"),
        FanKind::Bipermutohedral { n } => format!("bipermutohedral({n})"),
        FanKind::ProjectiveBundle { n, rank } => format!("projective-bundle(n={n},r={rank})"),
        FanKind::Custom => "custom".into(),
    }
}

pub fn dump(fan: &Fan) -> FanDump {
    FanDump {
        kind: kind_name(fan.kind()),
        ambient_dim: fan.ambient_dim(),
        lineality: fan.lineality().to_vec(),
        rays: (0..fan.num_rays() as u32)
            .map(|r| RayDump { label: fan.ray_label(r).to_string(), vector: fan.ray(r).to_vec() })
            .collect(),
        maximal_cones: fan.maximal_cones().map(|c| fan.cone(c).to_vec()).collect(),
        weights: fan.weights().iter().map(|w| w.to_string()).collect(),
        cone_counts: (0..=fan.top_dim()).map(|k| fan.count_of_size(k)).collect(),
    }
}

pub fn sanity(fan: &Fan) -> Vec<Check> {
    let unimodular = fan.maximal_cones().find(|&c| !fan.multiplicity(c).is_one());
    let mut out = vec![Check::from_witness("unimodular", unimodular.map(|c| format!("maximal cone {c}")))];
    out.push(match fan.check_balanced(&fan.fundamental_weight()) {
        Ok(bad) => Check::from_witness("balanced", bad.first().map(|c| format!("{} cones, first {c}", bad.len()))),
        Err(e) => Check::fail("balanced", e.to_string()),
    });
    let dims: Vec<usize> = (0..=fan.top_dim()).map(|k| graded_dimension(fan, k)).collect();
    let sym = (0..dims.len()).find(|&k| dims[k] != dims[dims.len() - 1 - k]);
    out.push(Check::from_witness("chow-dims-symmetric", sym.map(|_| format!("{dims:?}"))));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tautring_core::check::all_passed;
    use tautring_core::fan::permutohedral;

    #[test]
    fn permutohedral_three() {
        let f = permutohedral(3).unwrap();
        let d = dump(&f);
        assert_eq!(d.kind, "permutohedral(3)");
        assert_eq!(d.rays.len(), 6);
        assert_eq!(d.maximal_cones.len(), 6);
        assert_eq!(d.cone_counts, vec![1, 6, 6]);
        assert!(d.weights.iter().all(|w| w == "1"));
        assert!(all_passed(&sanity(&f)));
    }
}
