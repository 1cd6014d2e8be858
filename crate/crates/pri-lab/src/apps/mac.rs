use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::haar::{sample_haar_isometry, IsometryInverseChannel};
use crate::pri::{pri_inverse_channel, pri_isometry, PriSpec};
use crate::qcore::{DensityMatrix, IsometryMatrix, PureState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignerMode {
    /// Haar isometry with a Haar-conditional dilation for verification.
    Haar,
    /// Uniformly random explicit PRI key.
    Pri,
}

/// Sign is an `n → n+m` isometry and Ver its inverse channel.
#[derive(Clone, Debug)]
pub struct MacScheme {
    pub n: usize,
    pub m: usize,
    mode: SignerMode,
    sign: IsometryMatrix,
    ver: IsometryInverseChannel,
}

impl MacScheme {
    pub fn from_spec(spec: &PriSpec) -> Result<Self> {
        Ok(MacScheme {
            n: spec.n,
            m: spec.m,
            mode: SignerMode::Pri,
            sign: pri_isometry(spec)?,
            ver: pri_inverse_channel(spec)?,
        })
    }

    pub fn haar<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        let sign = sample_haar_isometry(1usize << n, 1usize << (n + m), rng)?;
        let ver = IsometryInverseChannel::haar_conditional(sign.clone(), rng)?;
        Ok(MacScheme {
            n,
            m,
            mode: SignerMode::Haar,
            sign,
            ver,
        })
    }

    /// Fresh key of the given mode; `p` is only used by PRI keys.
    pub fn sample<R: Rng + ?Sized>(
        mode: SignerMode,
        n: usize,
        m: usize,
        p: u64,
        rng: &mut R,
    ) -> Result<Self> {
        match mode {
            SignerMode::Haar => Self::haar(n, m, rng),
            SignerMode::Pri => Self::from_spec(&PriSpec::sample(n, m, p, rng)?),
        }
    }

    pub fn mode(&self) -> SignerMode {
        self.mode
    }

    pub fn signer(&self) -> &IsometryMatrix {
        &self.sign
    }

    pub fn verifier(&self) -> &IsometryInverseChannel {
        &self.ver
    }
}

pub fn mac_sign(scheme: &MacScheme, msg: &PureState) -> Result<PureState> {
    if msg.qubits() != scheme.n {
        return Err(LabError::Dims(format!(
            "message has {} qubits, scheme signs {}",
            msg.qubits(),
            scheme.n
        )));
    }
    PureState::new(scheme.sign.matrix() * msg.amplitudes())
}

pub fn mac_verify(scheme: &MacScheme, tag: &DensityMatrix) -> Result<DensityMatrix> {
    if tag.qubits() != scheme.n + scheme.m {
        return Err(LabError::Dims(format!(
            "tag has {} qubits, scheme expects {}",
            tag.qubits(),
            scheme.n + scheme.m
        )));
    }
    DensityMatrix::from_channel_output(scheme.ver.apply(tag.matrix())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haar::sample_haar_state;
    use crate::qcore::ops::trace_distance;
    use crate::rng::from_seed;

    #[test]
    fn round_trip_both_modes() {
        let mut rng = from_seed(1);
        for mode in [SignerMode::Haar, SignerMode::Pri] {
            let scheme = MacScheme::sample(mode, 2, 2, 8, &mut rng).unwrap();
            let psi = sample_haar_state(4, &mut rng).unwrap();
            let tag = mac_sign(&scheme, &psi).unwrap();
            assert!((tag.amplitudes().norm() - 1.0).abs() < 1e-12);
            let back = mac_verify(&scheme, &tag.to_density()).unwrap();
            assert!(trace_distance(&back, &psi.to_density()).unwrap() < 1e-10);
        }
    }

    #[test]
    fn orthogonal_messages_orthogonal_tags() {
        let mut rng = from_seed(2);
        let scheme = MacScheme::haar(2, 1, &mut rng).unwrap();
        let a = mac_sign(&scheme, &PureState::basis(2, 0).unwrap()).unwrap();
        let b = mac_sign(&scheme, &PureState::basis(2, 3).unwrap()).unwrap();
        assert!(a.inner(&b).norm() < 1e-12);
    }

    #[test]
    fn off_range_tag_gives_valid_state() {
        let mut rng = from_seed(3);
        let scheme = MacScheme::haar(1, 2, &mut rng).unwrap();
        let junk = sample_haar_state(8, &mut rng).unwrap().to_density();
        let out = mac_verify(&scheme, &junk).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
        out.check_psd().unwrap();
        assert!(mac_verify(&scheme, &PureState::basis(2, 0).unwrap().to_density()).is_err());
    }
}
