/// The 13 unique Chebyshev distance-1 directions in 3D.
///
/// Each offset is `[dx, dy, dz]`. Representatives have their first nonzero
/// component of `(dz, dy, dx)` positive, and are ordered lexicographically by
/// `(dz, dy, dx)`. Index 0 is the x axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionSet13 {
    offsets: [[i64; 3]; 13],
}

impl DirectionSet13 {
    pub fn canonical() -> Self {
        let mut offsets = [[0i64; 3]; 13];
        let mut n = 0;
        for dz in -1..=1 {
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let first = [dz, dy, dx].into_iter().find(|&c| c != 0);
                    if first == Some(1) {
                        offsets[n] = [dx, dy, dz];
                        n += 1;
                    }
                }
            }
        }
        debug_assert_eq!(n, 13);
        DirectionSet13 { offsets }
    }

    /// A reordered set; `order` must be a permutation of `0..13`.
    pub fn permuted(&self, order: &[usize; 13]) -> Self {
        let mut offsets = [[0i64; 3]; 13];
        for (dst, &src) in offsets.iter_mut().zip(order) {
            *dst = self.offsets[src];
        }
        DirectionSet13 { offsets }
    }

    pub fn offsets(&self) -> &[[i64; 3]; 13] {
        &self.offsets
    }

    pub fn iter(&self) -> impl Iterator<Item = [i64; 3]> + '_ {
        self.offsets.iter().copied()
    }
}

impl Default for DirectionSet13 {
    fn default() -> Self {
        Self::canonical()
    }
}

/// All 26 Chebyshev distance-1 neighbor offsets.
pub fn neighbors26() -> impl Iterator<Item = [i64; 3]> {
    (-1..=1i64).flat_map(|dz| {
        (-1..=1i64).flat_map(move |dy| {
            (-1..=1i64).filter_map(move |dx| (dx != 0 || dy != 0 || dz != 0).then_some([dx, dy, dz]))
        })
    })
}
