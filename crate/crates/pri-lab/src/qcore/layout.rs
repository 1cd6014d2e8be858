use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

use super::dims::{check_dim_cap, StorageKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    /// Left untouched by every channel.
    Side,
    /// One of the q identical blocks a channel acts on.
    Twirled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub dim: usize,
}

/// Ordered tensor factors of a register, first factor most significant.
/// All twirled segments share one dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegisterLayout {
    segments: Vec<Segment>,
}

impl RegisterLayout {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let mut block = None;
        for s in &segments {
            if s.dim == 0 {
                return Err(LabError::Dims("zero-dimensional segment".into()));
            }
            if s.kind == SegmentKind::Twirled {
                match block {
                    None => block = Some(s.dim),
                    Some(d) if d != s.dim => {
                        return Err(LabError::Dims(format!(
                            "twirled blocks disagree: {d} vs {}",
                            s.dim
                        )));
                    }
                    _ => {}
                }
            }
        }
        let total = segments
            .iter()
            .try_fold(1usize, |acc, s| acc.checked_mul(s.dim));
        let total = total.ok_or_else(|| LabError::Dims("layout dimension overflow".into()))?;
        check_dim_cap(total, StorageKind::Density)?;
        Ok(RegisterLayout { segments })
    }

    /// A side register of dimension `side` (omitted when 1) then `q` blocks of dimension `d`.
    pub fn side_then_blocks(side: usize, q: usize, d: usize) -> Result<Self> {
        let mut segs = Vec::with_capacity(q + 1);
        if side > 1 {
            segs.push(Segment {
                kind: SegmentKind::Side,
                dim: side,
            });
        }
        segs.extend((0..q).map(|_| Segment {
            kind: SegmentKind::Twirled,
            dim: d,
        }));
        Self::new(segs)
    }

    pub fn blocks(q: usize, d: usize) -> Result<Self> {
        Self::side_then_blocks(1, q, d)
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn dims(&self) -> Vec<usize> {
        self.segments.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.segments.iter().map(|s| s.dim).product()
    }

    /// Positions of the twirled segments, in order.
    pub fn twirled(&self) -> Vec<usize> {
        self.positions(SegmentKind::Twirled)
    }

    pub fn side(&self) -> Vec<usize> {
        self.positions(SegmentKind::Side)
    }

    pub fn q(&self) -> usize {
        self.twirled().len()
    }

    pub fn block_dim(&self) -> Option<usize> {
        self.segments
            .iter()
            .find(|s| s.kind == SegmentKind::Twirled)
            .map(|s| s.dim)
    }

    /// The same layout with every twirled block resized to `d`.
    pub fn with_block_dim(&self, d: usize) -> Result<Self> {
        Self::new(
            self.segments
                .iter()
                .map(|s| match s.kind {
                    SegmentKind::Twirled => Segment {
                        kind: s.kind,
                        dim: d,
                    },
                    SegmentKind::Side => *s,
                })
                .collect(),
        )
    }

    fn positions(&self, kind: SegmentKind) -> Vec<usize> {
        self.segments
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn side_then_blocks_shape() {
        let l = RegisterLayout::side_then_blocks(4, 2, 8).unwrap();
        assert_eq!(l.dims(), vec![4, 8, 8]);
        assert_eq!(l.twirled(), vec![1, 2]);
        assert_eq!(l.side(), vec![0]);
        assert_eq!(l.total_dim(), 256);
        assert_eq!(
            RegisterLayout::blocks(3, 2).unwrap().side(),
            Vec::<usize>::new()
        );
        assert_eq!(l.with_block_dim(2).unwrap().dims(), vec![4, 2, 2]);
    }

    #[test]
    fn mismatched_blocks_and_cap() {
        let bad = vec![
            Segment {
                kind: SegmentKind::Twirled,
                dim: 2,
            },
            Segment {
                kind: SegmentKind::Twirled,
                dim: 4,
            },
        ];
        assert!(RegisterLayout::new(bad).is_err());
        assert!(matches!(
            RegisterLayout::blocks(8, 8),
            Err(LabError::Cap { .. })
        ));
    }
}
