//! Editing state of one open sample.

use std::collections::VecDeque;

use faceparse_core::geometry::Point;
use faceparse_core::LandmarkSet;

use crate::error::ApiError;
use crate::wire::{to_pairs, PointMove, SessionView};

pub const DEFAULT_UNDO_DEPTH: usize = 100;

/// Previous values of every point touched by one PATCH.
#[derive(Debug, Clone, PartialEq)]
struct Edit {
    before: Vec<(usize, Point, bool)>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub sample_id: String,
    pub width: u32,
    pub height: u32,
    pub revision: u64,
    initial: LandmarkSet,
    saved: LandmarkSet,
    current: LandmarkSet,
    history: VecDeque<Edit>,
    max_depth: usize,
    truncated: bool,
}

impl Session {
    pub fn open(
        id: String,
        sample_id: String,
        landmarks: LandmarkSet,
        width: u32,
        height: u32,
        max_depth: usize,
    ) -> Session {
        Session {
            id,
            sample_id,
            width,
            height,
            revision: 0,
            initial: landmarks.clone(),
            saved: landmarks.clone(),
            current: landmarks,
            history: VecDeque::new(),
            max_depth,
            truncated: false,
        }
    }

    /// Replaces the sample in place, keeping the id and bumping the revision.
    pub fn reopen(&mut self, sample_id: String, landmarks: LandmarkSet, width: u32, height: u32) {
        let revision = self.revision + 1;
        *self = Session::open(self.id.clone(), sample_id, landmarks, width, height, self.max_depth);
        self.revision = revision;
    }

    pub fn landmarks(&self) -> &LandmarkSet {
        &self.current
    }

    pub fn dirty(&self) -> bool {
        self.current != self.saved
    }

    pub fn undo_depth(&self) -> usize {
        self.history.len()
    }

    pub fn check_revision(&self, revision: Option<u64>) -> Result<(), ApiError> {
        match revision {
            Some(r) if r != self.revision => Err(ApiError::new(
                axum::http::StatusCode::CONFLICT,
                "revision_conflict",
                format!("request revision {r}, session is at {}", self.revision),
            )),
            _ => Ok(()),
        }
    }

    /// Applies all moves as one undoable edit. Nothing changes on error.
    pub fn apply(&mut self, moves: &[PointMove]) -> Result<(), ApiError> {
        if moves.is_empty() {
            return Err(ApiError::unprocessable("empty_edit", "no moves given"));
        }
        let mut next = self.current.clone();
        let mut before = Vec::with_capacity(moves.len());
        for m in moves {
            if m.index >= next.points().len() {
                return Err(ApiError::unprocessable(
                    "index_out_of_range",
                    format!("point index {} out of range 0..{}", m.index, next.points().len()),
                ));
            }
            before.push((m.index, next.point(m.index), next.is_visible(m.index)));
            next.set_point(m.index, Point::new(m.x, m.y))?;
            if let Some(v) = m.visible {
                next.set_visible(m.index, v);
            }
        }
        self.current = next;
        self.history.push_back(Edit { before });
        if self.history.len() > self.max_depth {
            self.history.pop_front();
            self.truncated = true;
        }
        self.revision += 1;
        Ok(())
    }

    /// Reverts the latest edit. Returns false when the history is empty.
    pub fn undo(&mut self) -> bool {
        let Some(edit) = self.history.pop_back() else {
            return false;
        };
        // restore in reverse so repeated indices within one edit end at their first value
        for &(index, p, visible) in edit.before.iter().rev() {
            self.current.set_point(index, p).expect("previous value was valid");
            self.current.set_visible(index, visible);
        }
        self.revision += 1;
        true
    }

    pub fn mark_saved(&mut self) {
        self.saved = self.current.clone();
    }

    pub fn view(&self, history_exhausted: bool) -> SessionView {
        let edited = self
            .current
            .points()
            .iter()
            .zip(self.initial.points())
            .zip(self.current.visibility().iter().zip(self.initial.visibility()))
            .map(|((a, b), (va, vb))| a != b || va != vb)
            .collect();
        SessionView {
            id: self.id.clone(),
            sample_id: self.sample_id.clone(),
            revision: self.revision,
            width: self.width,
            height: self.height,
            landmarks: to_pairs(self.current.points()),
            visible: self.current.visibility().to_vec(),
            edited,
            dirty: self.dirty(),
            undo_depth: self.history.len(),
            history_exhausted,
            history_truncated: self.truncated,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use faceparse_core::synth::{synthetic_face, FacePose};

    fn session(depth: usize) -> Session {
        Session::open("s".into(), "a".into(), synthetic_face(&FacePose::centered(64, 64)), 64, 64, depth)
    }

    fn mv(index: usize, x: f64, y: f64) -> PointMove {
        PointMove { index, x, y, visible: None }
    }

    #[test]
    fn repeated_index_in_one_edit() {
        let mut s = session(10);
        let start = s.landmarks().clone();
        s.apply(&[mv(3, 1.0, 1.0), mv(3, 2.0, 2.0)]).unwrap();
        assert_eq!(s.landmarks().point(3), Point::new(2.0, 2.0));
        assert!(s.undo());
        assert_eq!(s.landmarks(), &start);
    }

    #[test]
    fn failed_edit_changes_nothing() {
        let mut s = session(10);
        let start = s.landmarks().clone();
        assert!(s.apply(&[mv(0, 1.0, 1.0), mv(500, 0.0, 0.0)]).is_err());
        assert!(s.apply(&[mv(0, f64::NAN, 1.0)]).is_err());
        assert_eq!(s.landmarks(), &start);
        assert_eq!(s.revision, 0);
        assert_eq!(s.undo_depth(), 0);
    }

    #[test]
    fn dirty_tracks_saved_state() {
        let mut s = session(10);
        assert!(!s.dirty());
        s.apply(&[mv(0, 1.0, 1.0)]).unwrap();
        assert!(s.dirty());
        s.undo();
        assert!(!s.dirty());
        s.apply(&[mv(0, 1.0, 1.0)]).unwrap();
        s.mark_saved();
        assert!(!s.dirty());
        assert!(s.view(false).edited[0]);
    }

    #[test]
    fn visibility_edit_undoes() {
        let mut s = session(10);
        let p = s.landmarks().point(7);
        s.apply(&[PointMove { index: 7, x: p.x, y: p.y, visible: Some(false) }]).unwrap();
        assert!(!s.landmarks().is_visible(7));
        s.undo();
        assert!(s.landmarks().is_visible(7));
    }
}
