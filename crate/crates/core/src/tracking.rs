//! Continuation of eigenmodes along a parameter sweep by eigenvector overlap.

use num_complex::Complex64;

/// Overlap below which a mode is considered new rather than a continuation.
pub const MIN_OVERLAP: f64 = 0.5;

/// Normalized overlap |⟨u, v⟩| / (‖u‖‖v‖).
pub fn overlap(u: &[Complex64], v: &[Complex64]) -> f64 {
    let dot: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot.norm() / (nu * nv)
    }
}

/// Streaming form of [`track_modes`]: keeps only the previous point.
#[derive(Debug, Clone, Default)]
pub struct Tracker {
    prev: Vec<Vec<Complex64>>,
    prev_ids: Vec<usize>,
    next_id: usize,
}

impl Tracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Track ids for the modes of the next sweep point.
    pub fn push(&mut self, modes: &[Vec<Complex64>]) -> Vec<usize> {
        let mut current = vec![usize::MAX; modes.len()];
        let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(self.prev.len() * modes.len());
        for (i, u) in self.prev.iter().enumerate() {
            for (j, v) in modes.iter().enumerate() {
                let o = overlap(u, v);
                if o >= MIN_OVERLAP {
                    pairs.push((o, i, j));
                }
            }
        }
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut prev_used = vec![false; self.prev.len()];
        for (_, i, j) in pairs {
            if !prev_used[i] && current[j] == usize::MAX {
                prev_used[i] = true;
                current[j] = self.prev_ids[i];
            }
        }
        for id in current.iter_mut().filter(|id| **id == usize::MAX) {
            *id = self.next_id;
            self.next_id += 1;
        }
        self.prev = modes.to_vec();
        self.prev_ids = current.clone();
        current
    }
}

/// Assigns a track id to every mode of every sweep point.
///
/// Pairs between consecutive points are matched greedily in order of
/// decreasing overlap; a mode left unmatched, or matched with overlap below
/// [`MIN_OVERLAP`], opens a new track. Ids are assigned in order of first
/// appearance.
pub fn track_modes(sweep: &[Vec<Vec<Complex64>>]) -> Vec<Vec<usize>> {
    let mut tracker = Tracker::new();
    sweep.iter().map(|modes| tracker.push(modes)).collect()
}
