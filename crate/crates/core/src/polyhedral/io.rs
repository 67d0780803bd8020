//! JSON fan files: `{ "rank": r, "rays": [[..], ..], "cones": [[ray index, ..], ..] }`
//! listing maximal cones; the zero cone is implicit.

use serde::{Deserialize, Serialize};

use super::{Cone, Fan};
use crate::error::{Error, Result};
use crate::linalg::LatticeVector;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<LatticeVector>,
    pub cones: Vec<Vec<usize>>,
}

impl FanFile {
    pub fn parse(text: &str) -> Result<FanFile> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("line {}, column {}: {e}", e.line(), e.column())))
    }

    /// Build and validate the fan.
    pub fn to_fan(&self) -> Result<Fan> {
        for (i, ray) in self.rays.iter().enumerate() {
            if ray.len() != self.rank {
                return Err(Error::Format(format!("rays[{i}]: expected {} entries, found {}", self.rank, ray.len())));
            }
            if ray.is_zero() {
                return Err(Error::Format(format!("rays[{i}]: zero vector")));
            }
        }
        let rays = &self.rays;
        let mut cones = Vec::with_capacity(self.cones.len());
        for (i, ids) in self.cones.iter().enumerate() {
            let mut gens = Vec::with_capacity(ids.len());
            for (j, &k) in ids.iter().enumerate() {
                let ray = rays.get(k).ok_or_else(|| {
                    Error::Format(format!("cones[{i}][{j}]: ray index {k} out of range (have {} rays)", rays.len()))
                })?;
                gens.push(ray.clone());
            }
            let cone = Cone::new(self.rank, &gens).map_err(|e| Error::Format(format!("cones[{i}]: {e}")))?;
            cones.push(cone);
        }
        Fan::from_cones(self.rank, cones)
    }

    /// Normalized description: sorted primitive rays, sorted maximal cones.
    pub fn from_fan(fan: &Fan) -> FanFile {
        FanFile {
            rank: fan.rank(),
            rays: fan.rays().to_vec(),
            cones: fan.maximal_ray_ids(),
        }
    }

    pub fn to_json(&self) -> String {
        let rays = self.rays.iter().map(|r| format!("[{}]", r.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))).collect::<Vec<_>>();
        let cones = self.cones.iter().map(|c| format!("[{}]", c.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", "))).collect::<Vec<_>>();
        format!(
            "{{\n  \"rank\": {},\n  \"rays\": [{}],\n  \"cones\": [{}]\n}}\n",
            self.rank,
            rays.join(", "),
            cones.join(", ")
        )
    }
}

pub fn load_fan(text: &str) -> Result<Fan> {
    FanFile::parse(text)?.to_fan()
}

pub fn save_fan(fan: &Fan) -> String {
    FanFile::from_fan(fan).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedral::{hirzebruch_fan, projective_space_fan};

    #[test]
    fn round_trip() {
        for fan in [projective_space_fan(2), projective_space_fan(3), hirzebruch_fan(3), Fan::trivial(2)] {
            let text = save_fan(&fan);
            let back = load_fan(&text).unwrap();
            assert_eq!(back, fan);
            assert_eq!(save_fan(&back), text);
        }
    }

    #[test]
    fn hirzebruch_file() {
        let text = save_fan(&hirzebruch_fan(1));
        assert_eq!(text, "{\n  \"rank\": 2,\n  \"rays\": [[-1, 1], [0, -1], [0, 1], [1, 0]],\n  \"cones\": [[0, 1], [0, 2], [1, 3], [2, 3]]\n}\n");
    }

    #[test]
    fn field_errors() {
        let err = load_fan(r#"{"rank": 2, "rays": [[1, 0]], "cones": [[0, 3]]}"#).unwrap_err();
        assert!(err.to_string().contains("cones[0][1]"), "{err}");
        let err = load_fan(r#"{"rank": 2, "rays": [[1, 0, 0]], "cones": []}"#).unwrap_err();
        assert!(err.to_string().contains("rays[0]"), "{err}");
        let err = load_fan("{\"rank\": 2,\n \"rays\": [[1, 0]]\n").unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn empty_cone_list_is_zero_fan() {
        let f = load_fan(r#"{"rank": 3, "rays": [], "cones": []}"#).unwrap();
        assert_eq!(f, Fan::trivial(3));
    }
}
