use std::path::Path;

use serde::{Deserialize, Serialize};

use super::QNetwork;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    /// Row-major values.
    pub data: Vec<f64>,
}

/// Network parameters as an ordered list of named tensors.
///
/// JSON layout: `{"tensors": [{"name": ..., "shape": [...], "data": [...]}, ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub tensors: Vec<NamedTensor>,
}

impl Checkpoint {
    pub fn from_net<N: QNetwork>(net: &N) -> Self {
        let flat = net.params();
        let mut offset = 0;
        let tensors = net
            .layout()
            .into_iter()
            .map(|spec| {
                let len = spec.len();
                let data = flat[offset..offset + len].to_vec();
                offset += len;
                NamedTensor {
                    name: spec.name,
                    shape: spec.shape,
                    data,
                }
            })
            .collect();
        Self { tensors }
    }

    /// Loads the tensors into `net`, which must have an identical layout.
    pub fn apply_to<N: QNetwork>(&self, net: &mut N) -> Result<()> {
        let layout = net.layout();
        if layout.len() != self.tensors.len() {
            return Err(Error::dim(
                "checkpoint tensors",
                layout.len(),
                self.tensors.len(),
            ));
        }
        let mut flat = Vec::with_capacity(net.param_count());
        for (spec, tensor) in layout.iter().zip(&self.tensors) {
            if spec.name != tensor.name || spec.shape != tensor.shape {
                return Err(Error::validation(
                    tensor.name.clone(),
                    format!("expected tensor {} with shape {:?}", spec.name, spec.shape),
                ));
            }
            if tensor.data.len() != spec.len() {
                return Err(Error::validation(
                    tensor.name.clone(),
                    format!("{} values for shape {:?}", tensor.data.len(), spec.shape),
                ));
            }
            flat.extend_from_slice(&tensor.data);
        }
        net.set_params(&flat)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hybridnet::{HybridQNet, MlpQNet};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hybrid_round_trip_is_lossless() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let net = HybridQNet::new(2, 32, 5, 2, 21, &mut rng).unwrap();
        let json = Checkpoint::from_net(&net).to_json().unwrap();
        let mut restored = HybridQNet::new(2, 32, 5, 2, 21, &mut rng).unwrap();
        Checkpoint::from_json(&json)
            .unwrap()
            .apply_to(&mut restored)
            .unwrap();
        let bits = |n: &HybridQNet| n.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&restored), bits(&net));
    }

    #[test]
    fn layout_mismatch_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let small = MlpQNet::new(2, 4, 3, &mut rng);
        let mut big = MlpQNet::new(2, 8, 3, &mut rng);
        assert!(Checkpoint::from_net(&small).apply_to(&mut big).is_err());
    }
}
