//! Row-wise run-length encoding of label maps, used on the service wire.
//!
//! Each row is a list of `[label, run_length]` pairs whose lengths sum to the
//! map width:
//!
//! ```json
//! {"width": 4, "height": 2, "rows": [[[0, 3], [6, 1]], [[0, 4]]]}
//! ```

use serde::{Deserialize, Serialize};

use crate::labelmap::{LabelMap, MapError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleLabelMap {
    pub width: u32,
    pub height: u32,
    pub rows: Vec<Vec<[u32; 2]>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RleError {
    #[error("expected {expected} rows, found {found}")]
    RowCount { expected: u32, found: usize },
    #[error("row {row} runs sum to {sum}, expected {width}")]
    RowLength { row: usize, sum: u64, width: u32 },
    #[error("row {row} has a zero-length run")]
    EmptyRun { row: usize },
    #[error("label {0} does not fit in a label map")]
    BadLabel(u32),
    #[error("{0}")]
    Map(String),
}

impl RleLabelMap {
    pub fn encode(map: &LabelMap) -> RleLabelMap {
        let w = map.width() as usize;
        let rows = map
            .labels()
            .chunks_exact(w)
            .map(|row| {
                let mut runs: Vec<[u32; 2]> = Vec::new();
                for &v in row {
                    match runs.last_mut() {
                        Some(run) if run[0] == v as u32 => run[1] += 1,
                        _ => runs.push([v as u32, 1]),
                    }
                }
                runs
            })
            .collect();
        RleLabelMap { width: map.width(), height: map.height(), rows }
    }

    pub fn decode(&self) -> Result<LabelMap, RleError> {
        if self.rows.len() != self.height as usize {
            return Err(RleError::RowCount { expected: self.height, found: self.rows.len() });
        }
        let mut labels = Vec::with_capacity(self.width as usize * self.height as usize);
        for (row, runs) in self.rows.iter().enumerate() {
            let mut sum = 0u64;
            for &[v, len] in runs {
                if len == 0 {
                    return Err(RleError::EmptyRun { row });
                }
                let v = u8::try_from(v).map_err(|_| RleError::BadLabel(v))?;
                sum += len as u64;
                if sum > self.width as u64 {
                    break;
                }
                labels.extend(std::iter::repeat_n(v, len as usize));
            }
            if sum != self.width as u64 {
                return Err(RleError::RowLength { row, sum, width: self.width });
            }
        }
        LabelMap::from_raw(self.width, self.height, labels).map_err(|e: MapError| RleError::Map(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn encodes_runs() {
        let map = LabelMap::from_raw(4, 2, vec![0, 0, 0, 6, 0, 0, 0, 0]).unwrap();
        let rle = RleLabelMap::encode(&map);
        assert_eq!(rle.rows, vec![vec![[0, 3], [6, 1]], vec![[0, 4]]]);
        assert_eq!(serde_json::to_string(&rle).unwrap(), r#"{"width":4,"height":2,"rows":[[[0,3],[6,1]],[[0,4]]]}"#);
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = RleLabelMap { width: 3, height: 1, rows: vec![vec![[0, 2]]] };
        assert!(matches!(bad.decode(), Err(RleError::RowLength { .. })));
        let bad = RleLabelMap { width: 3, height: 2, rows: vec![vec![[0, 3]]] };
        assert!(matches!(bad.decode(), Err(RleError::RowCount { .. })));
        let bad = RleLabelMap { width: 1, height: 1, rows: vec![vec![[12, 1]]] };
        assert!(bad.decode().is_err());
    }

    proptest! {
        #[test]
        fn round_trip(w in 1u32..20, h in 1u32..20, seed in any::<u64>()) {
            let labels: Vec<u8> = (0..(w * h) as u64)
                .map(|i| ((seed.wrapping_mul(i + 1) >> 7) % 3 + (i % 5 == 0) as u64 * 4) as u8)
                .collect();
            let map = LabelMap::from_raw(w, h, labels).unwrap();
            prop_assert_eq!(RleLabelMap::encode(&map).decode().unwrap(), map);
        }
    }
}
