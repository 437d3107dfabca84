//! Temporal meshing of `I = (0, T)` into slabs of at most `N_max` consecutive
//! intervals, the space-major DoF numbering, temporal and space-time sparsity
//! patterns, and the ordered slab collection.

use crate::linalg::SparsityPattern;
use crate::spatial::SpatialDiscretization;
use crate::temporal::TemporalBasis;
use crate::{Error, Result};
use std::sync::Arc;

/// Limit coefficients below this magnitude are treated as structural zeros
/// when building jump-coupling patterns.
pub const LIMIT_COEFF_THRESHOLD: f64 = 1e-13;

/// Subdivision of `I = (0, T)` into `M` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalMesh {
    breaks: Vec<f64>,
}

impl TemporalMesh {
    /// Uniform subdivision with `k_m = T / M`.
    pub fn uniform(t_final: f64, m: usize) -> Result<TemporalMesh> {
        if m == 0 {
            return Err(Error::InvalidConfig("temporal mesh needs M >= 1".into()));
        }
        if t_final <= 0.0 {
            return Err(Error::InvalidConfig("final time must be positive".into()));
        }
        let breaks = (0..=m).map(|i| t_final * i as f64 / m as f64).collect();
        Ok(TemporalMesh { breaks })
    }

    pub fn n_intervals(&self) -> usize {
        self.breaks.len() - 1
    }

    pub fn t_final(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    /// Endpoints `(t_{m-1}, t_m)` of interval `m` (0-based).
    pub fn interval(&self, m: usize) -> (f64, f64) {
        (self.breaks[m], self.breaks[m + 1])
    }

    pub fn interval_length(&self, m: usize) -> f64 {
        self.breaks[m + 1] - self.breaks[m]
    }

    /// Bisect every interval.
    pub fn refine(&self) -> TemporalMesh {
        let mut breaks = Vec::with_capacity(2 * self.n_intervals() + 1);
        for w in self.breaks.windows(2) {
            breaks.push(w[0]);
            breaks.push(0.5 * (w[0] + w[1]));
        }
        breaks.push(self.t_final());
        TemporalMesh { breaks }
    }
}

/// Consecutive temporal intervals paired with the shared spatial
/// discretization; the unit of assembly and solve.
#[derive(Debug, Clone)]
pub struct Slab {
    /// Index of the first temporal interval of this slab in the full mesh.
    pub first_interval: usize,
    /// Number of consecutive intervals.
    pub n_intervals: usize,
    /// Temporal DoFs of the slab system, `n_intervals * (r + 1)`.
    pub n_t: usize,
    /// Spatial DoFs (shared by all slabs).
    pub n_x: usize,
}

impl Slab {
    pub fn n_system_dofs(&self) -> usize {
        self.n_t * self.n_x
    }
}

/// Ordered sequence of slabs spanning `I = (0, T)`, traversable forward and
/// backward. All slabs share one spatial discretization and temporal basis.
#[derive(Debug, Clone)]
pub struct SpaceTimeTriangulation {
    temporal: TemporalMesh,
    spatial: Arc<SpatialDiscretization>,
    basis: TemporalBasis,
    n_max: usize,
    slabs: Vec<Slab>,
}

impl SpaceTimeTriangulation {
    /// Greedy front-to-back partition into chunks of at most `n_max`
    /// intervals; `n_max = 0` keeps all intervals in a single slab.
    pub fn new(
        temporal: TemporalMesh,
        spatial: Arc<SpatialDiscretization>,
        basis: TemporalBasis,
        n_max: usize,
    ) -> SpaceTimeTriangulation {
        let m = temporal.n_intervals();
        let n_x = spatial.n_dofs();
        let per_interval = basis.n_dofs();
        let chunk = if n_max == 0 { m } else { n_max };
        let mut slabs = Vec::new();
        let mut first = 0;
        while first < m {
            let n_intervals = chunk.min(m - first);
            slabs.push(Slab {
                first_interval: first,
                n_intervals,
                n_t: n_intervals * per_interval,
                n_x,
            });
            first += n_intervals;
        }
        SpaceTimeTriangulation {
            temporal,
            spatial,
            basis,
            n_max,
            slabs,
        }
    }

    pub fn temporal_mesh(&self) -> &TemporalMesh {
        &self.temporal
    }

    pub fn spatial(&self) -> &Arc<SpatialDiscretization> {
        &self.spatial
    }

    pub fn basis(&self) -> &TemporalBasis {
        &self.basis
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn n_slabs(&self) -> usize {
        self.slabs.len()
    }

    pub fn slab(&self, i: usize) -> &Slab {
        &self.slabs[i]
    }

    pub fn slabs(&self) -> impl DoubleEndedIterator<Item = &Slab> {
        self.slabs.iter()
    }

    /// Total space-time DoF count, `M (r + 1) N_x`.
    pub fn n_total_dofs(&self) -> usize {
        self.temporal.n_intervals() * self.basis.n_dofs() * self.spatial.n_dofs()
    }

    /// Bisect every temporal interval and re-partition with the same `N_max`.
    pub fn refine_temporal(&self) -> SpaceTimeTriangulation {
        SpaceTimeTriangulation::new(
            self.temporal.refine(),
            Arc::clone(&self.spatial),
            self.basis.clone(),
            self.n_max,
        )
    }
}

/// Space-major space-time DoF index `i = i_x + N_x * i_t`.
pub fn st_dof_index(i_x: usize, i_t: usize, n_x: usize) -> usize {
    debug_assert!(i_x < n_x);
    i_x + n_x * i_t
}

/// Inverse of [`st_dof_index`]: `(i_x, i_t)`.
pub fn st_dof_split(i: usize, n_x: usize) -> (usize, usize) {
    (i % n_x, i / n_x)
}

/// Temporal coupling pattern for `n_intervals` dG elements: dense diagonal
/// blocks per interval plus jump coupling from each interval to its
/// predecessor. Rows with a numerically nonzero left-limit coefficient couple
/// to predecessor columns with a nonzero right-limit coefficient.
pub fn temporal_pattern(n_intervals: usize, basis: &TemporalBasis) -> SparsityPattern {
    assert!(n_intervals >= 1);
    let p = basis.n_dofs();
    let n = n_intervals * p;
    let ll = basis.limit_left();
    let lr = basis.limit_right();
    let mut entries = Vec::new();
    for m in 0..n_intervals {
        let base = m * p;
        for i in 0..p {
            for j in 0..p {
                entries.push((base + i, base + j));
            }
        }
        if m > 0 {
            let prev = (m - 1) * p;
            for i in 0..p {
                if ll[i].abs() <= LIMIT_COEFF_THRESHOLD {
                    continue;
                }
                for j in 0..p {
                    if lr[j].abs() <= LIMIT_COEFF_THRESHOLD {
                        continue;
                    }
                    entries.push((base + i, prev + j));
                }
            }
        }
    }
    SparsityPattern::from_entries(n, n, entries)
}

/// Kronecker combination of a temporal and a spatial pattern under the
/// space-major numbering: `(i, j)` present iff `(i_t, j_t)` in `S_t` and
/// `(i_x, j_x)` in `S_x`.
pub fn build_spacetime_sparsity(
    s_x: &SparsityPattern,
    s_t: &SparsityPattern,
    n_x: usize,
) -> Result<SparsityPattern> {
    if s_x.n_rows() != n_x {
        return Err(Error::DimensionMismatch {
            expected: n_x,
            got: s_x.n_rows(),
        });
    }
    let n = n_x * s_t.n_rows();
    let mut entries = Vec::with_capacity(s_t.nnz() * s_x.nnz());
    for (i_t, j_t) in s_t.entries() {
        for (i_x, j_x) in s_x.entries() {
            entries.push((st_dof_index(i_x, i_t, n_x), st_dof_index(j_x, j_t, n_x)));
        }
    }
    Ok(SparsityPattern::from_entries(n, n, entries))
}

/// Lock-step cursor over parallel slab-indexed sequences.
///
/// All registered sequences must have equal length; a single position is
/// shared, so increments and decrements move every registered cursor together.
#[derive(Debug)]
pub struct TimeIteratorCollection {
    len: Option<usize>,
    n_registered: usize,
    pos: isize,
}

impl TimeIteratorCollection {
    pub fn new() -> TimeIteratorCollection {
        TimeIteratorCollection {
            len: None,
            n_registered: 0,
            pos: 0,
        }
    }

    /// Register a sequence of the given length; errors on length mismatch
    /// with previously registered sequences.
    pub fn add_iterator(&mut self, len: usize) -> Result<()> {
        match self.len {
            None => {
                self.len = Some(len);
            }
            Some(existing) if existing != len => {
                return Err(Error::DimensionMismatch {
                    expected: existing,
                    got: len,
                });
            }
            Some(_) => {}
        }
        self.n_registered += 1;
        Ok(())
    }

    pub fn n_registered(&self) -> usize {
        self.n_registered
    }

    /// Shared slab index, `None` when out of range on either side.
    pub fn current(&self) -> Option<usize> {
        let len = self.len? as isize;
        (self.pos >= 0 && self.pos < len).then_some(self.pos as usize)
    }

    pub fn increment(&mut self) {
        self.pos += 1;
    }

    pub fn decrement(&mut self) {
        self.pos -= 1;
    }

    pub fn at_end(&self) -> bool {
        match self.len {
            Some(len) => self.pos >= len as isize,
            None => true,
        }
    }

    pub fn before_begin(&self) -> bool {
        self.pos < 0
    }

    /// Move to the last slab (for backward traversal).
    pub fn seek_last(&mut self) {
        self.pos = self.len.map_or(-1, |l| l as isize - 1);
    }
}

impl Default for TimeIteratorCollection {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::temporal::SupportType;

    fn basis(r: usize, st: SupportType) -> TemporalBasis {
        TemporalBasis::new(r, st).unwrap()
    }

    fn tiny_spatial() -> Arc<SpatialDiscretization> {
        Arc::new(SpatialDiscretization::new(2, 0, 1).unwrap())
    }

    #[test]
    fn uniform_temporal_mesh() {
        let m = TemporalMesh::uniform(1.0, 4).unwrap();
        assert_eq!(m.breaks(), &[0.0, 0.25, 0.5, 0.75, 1.0]);

        let m = TemporalMesh::uniform(8.0, 256).unwrap();
        assert!((m.interval_length(0) - 1.0 / 32.0).abs() < 1e-14);

        let m = TemporalMesh::uniform(1.0, 1).unwrap();
        assert_eq!(m.breaks(), &[0.0, 1.0]);

        assert!(TemporalMesh::uniform(1.0, 0).is_err());
    }

    #[test]
    fn interval_lengths_sum_to_t() {
        let m = TemporalMesh::uniform(3.0, 7).unwrap();
        let total: f64 = (0..m.n_intervals()).map(|i| m.interval_length(i)).sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn slab_partitioning() {
        let sp = tiny_spatial();
        let b = basis(1, SupportType::Lobatto);

        let tri = SpaceTimeTriangulation::new(
            TemporalMesh::uniform(1.0, 6).unwrap(),
            Arc::clone(&sp),
            b.clone(),
            0,
        );
        assert_eq!(tri.n_slabs(), 1);
        assert_eq!(tri.slab(0).n_intervals, 6);

        let tri = SpaceTimeTriangulation::new(
            TemporalMesh::uniform(1.0, 6).unwrap(),
            Arc::clone(&sp),
            b.clone(),
            1,
        );
        assert_eq!(tri.n_slabs(), 6);

        let tri = SpaceTimeTriangulation::new(
            TemporalMesh::uniform(1.0, 5).unwrap(),
            Arc::clone(&sp),
            b,
            2,
        );
        let sizes: Vec<usize> = tri.slabs().map(|s| s.n_intervals).collect();
        assert_eq!(sizes, vec![2, 2, 1]);
    }

    #[test]
    fn partition_round_trip() {
        let sp = tiny_spatial();
        for n_max in [0usize, 1, 2, 3, 4] {
            let mesh = TemporalMesh::uniform(2.0, 7).unwrap();
            let tri = SpaceTimeTriangulation::new(
                mesh.clone(),
                Arc::clone(&sp),
                basis(1, SupportType::Lobatto),
                n_max,
            );
            let mut intervals = Vec::new();
            for slab in tri.slabs() {
                if n_max >= 1 {
                    assert!(slab.n_intervals <= n_max);
                }
                for m in 0..slab.n_intervals {
                    intervals.push(slab.first_interval + m);
                }
            }
            assert_eq!(intervals, (0..7).collect::<Vec<_>>());
        }
    }

    #[test]
    fn refine_temporal_counts() {
        let sp = tiny_spatial();
        let tri = SpaceTimeTriangulation::new(
            TemporalMesh::uniform(1.0, 4).unwrap(),
            Arc::clone(&sp),
            basis(1, SupportType::Lobatto),
            1,
        );
        let fine = tri.refine_temporal();
        assert_eq!(fine.temporal_mesh().n_intervals(), 8);
        assert_eq!(fine.n_slabs(), 8);

        let tri = SpaceTimeTriangulation::new(
            TemporalMesh::uniform(1.0, 4).unwrap(),
            sp,
            basis(1, SupportType::Lobatto),
            0,
        );
        assert_eq!(tri.refine_temporal().n_slabs(), 1);
    }

    #[test]
    fn space_major_index() {
        assert_eq!(st_dof_index(0, 0, 17), 0);
        assert_eq!(st_dof_index(3, 2, 10), 23);
        assert_eq!(st_dof_split(23, 10), (3, 2));
        for i in 0..100 {
            let (ix, it) = st_dof_split(i, 7);
            assert_eq!(st_dof_index(ix, it, 7), i);
        }
    }

    fn pattern_pairs(p: &SparsityPattern) -> Vec<(usize, usize)> {
        p.entries().collect()
    }

    #[test]
    fn golden_pattern_lobatto() {
        let p = temporal_pattern(3, &basis(1, SupportType::Lobatto));
        let mut expect = Vec::new();
        for m in 0..3usize {
            let b = 2 * m;
            expect.extend([(b, b), (b, b + 1), (b + 1, b), (b + 1, b + 1)]);
        }
        expect.extend([(2, 1), (4, 3)]);
        expect.sort_unstable();
        assert_eq!(pattern_pairs(&p), expect);
    }

    #[test]
    fn golden_pattern_legendre() {
        let p = temporal_pattern(3, &basis(1, SupportType::Legendre));
        let mut expect = Vec::new();
        for m in 0..3usize {
            let b = 2 * m;
            expect.extend([(b, b), (b, b + 1), (b + 1, b), (b + 1, b + 1)]);
        }
        // full 2x2 off-diagonal jump blocks
        expect.extend([
            (2, 0),
            (2, 1),
            (3, 0),
            (3, 1),
            (4, 2),
            (4, 3),
            (5, 2),
            (5, 3),
        ]);
        expect.sort_unstable();
        assert_eq!(pattern_pairs(&p), expect);
    }

    #[test]
    fn golden_pattern_radau_left() {
        let p = temporal_pattern(3, &basis(1, SupportType::RadauLeft));
        let mut expect = Vec::new();
        for m in 0..3usize {
            let b = 2 * m;
            expect.extend([(b, b), (b, b + 1), (b + 1, b), (b + 1, b + 1)]);
        }
        // rows 2 and 4 (left-endpoint DoFs) couple to both predecessor columns
        expect.extend([(2, 0), (2, 1), (4, 2), (4, 3)]);
        expect.sort_unstable();
        assert_eq!(pattern_pairs(&p), expect);
    }

    #[test]
    fn golden_pattern_radau_right() {
        let p = temporal_pattern(3, &basis(1, SupportType::RadauRight));
        let mut expect = Vec::new();
        for m in 0..3usize {
            let b = 2 * m;
            expect.extend([(b, b), (b, b + 1), (b + 1, b), (b + 1, b + 1)]);
        }
        // both rows couple, but only to the predecessor's right-endpoint DoF
        expect.extend([(2, 1), (3, 1), (4, 3), (5, 3)]);
        expect.sort_unstable();
        assert_eq!(pattern_pairs(&p), expect);
    }

    #[test]
    fn pattern_monotonicity_r1() {
        let lo = temporal_pattern(3, &basis(1, SupportType::Lobatto));
        let rl = temporal_pattern(3, &basis(1, SupportType::RadauLeft));
        let rr = temporal_pattern(3, &basis(1, SupportType::RadauRight));
        let le = temporal_pattern(3, &basis(1, SupportType::Legendre));
        assert!(lo.is_subset_of(&rl));
        assert!(lo.is_subset_of(&rr));
        assert!(rl.is_subset_of(&le));
        assert!(rr.is_subset_of(&le));
    }

    #[test]
    fn pattern_covers_assembled_temporal_blocks() {
        // the pattern must be a superset of the nonzero structure of the
        // per-interval blocks D + coupling built from limit coefficients
        for st in SupportType::ALL {
            for r in 0..=2 {
                let b = basis(r, st);
                let p = temporal_pattern(3, &b);
                let d = b.derivative_matrix();
                let m = b.mass_matrix();
                let ll = b.limit_left();
                let lr = b.limit_right();
                let np = r + 1;
                for blk in 0..3usize {
                    let base = blk * np;
                    for i in 0..np {
                        for j in 0..np {
                            let v = d[i][j] + m[i][j] + ll[i] * ll[j];
                            if v.abs() > 1e-13 {
                                assert!(p.contains(base + i, base + j));
                            }
                            if blk > 0 {
                                let jump = ll[i] * lr[j];
                                if jump.abs() > 1e-13 {
                                    assert!(p.contains(base + i, base - np + j));
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn spacetime_kron_pattern() {
        let sp = tiny_spatial(); // dense 4x4 spatial pattern
        let s_x = sp.build_sparsity();

        // one interval r=1 Lobatto: dense 2x2 temporal block -> dense 4x4 with n_x=2
        let two = SparsityPattern::from_entries(2, 2, (0..2).flat_map(|i| (0..2).map(move |j| (i, j))));
        let s_t = temporal_pattern(1, &basis(1, SupportType::Lobatto));
        let st = build_spacetime_sparsity(&two, &s_t, 2).unwrap();
        assert_eq!(st.nnz(), 16);

        // Cartesian-product count
        let s_t3 = temporal_pattern(3, &basis(1, SupportType::Lobatto));
        let st = build_spacetime_sparsity(&s_x, &s_t3, 4).unwrap();
        assert_eq!(s_t3.nnz(), 14);
        assert_eq!(st.nnz(), s_t3.nnz() * s_x.nnz());

        assert!(build_spacetime_sparsity(&s_x, &s_t3, 5).is_err());
    }

    #[test]
    fn spec_nnz_example_uses_jump_block_count() {
        // 3 intervals, r=1 Lobatto: 12 dense-block entries plus 2 jump
        // entries; with a dense 4x4 spatial pattern nnz = 14 * 16 = 224
        let s_t = temporal_pattern(3, &basis(1, SupportType::Lobatto));
        let sp = tiny_spatial();
        let st = build_spacetime_sparsity(&sp.build_sparsity(), &s_t, 4).unwrap();
        assert_eq!(st.nnz(), 224);
    }

    #[test]
    fn iterator_collection_forward_backward() {
        let mut it = TimeIteratorCollection::new();
        it.add_iterator(3).unwrap();
        it.add_iterator(3).unwrap();
        assert!(it.add_iterator(4).is_err());

        let mut visited = Vec::new();
        while !it.at_end() {
            visited.push(it.current().unwrap());
            it.increment();
        }
        assert_eq!(visited, vec![0, 1, 2]);
        assert!(it.at_end());

        it.seek_last();
        let mut back = Vec::new();
        while !it.before_begin() {
            back.push(it.current().unwrap());
            it.decrement();
        }
        assert_eq!(back, vec![2, 1, 0]);
        assert!(it.before_begin());
    }

    #[test]
    fn iterator_collection_stays_aligned() {
        let mut it = TimeIteratorCollection::new();
        it.add_iterator(5).unwrap();
        it.add_iterator(5).unwrap();
        it.increment();
        it.increment();
        it.decrement();
        it.increment();
        it.increment();
        assert_eq!(it.current(), Some(3));
        assert_eq!(it.n_registered(), 2);
    }
}
