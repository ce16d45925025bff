//! Small helpers over `faer` matrices.

use faer::Mat;

/// Contiguous column `j` of an owned (column-major) matrix.
pub(crate) fn column(m: &Mat<f64>, j: usize) -> &[f64] {
    m.col(j).try_as_col_major().expect("owned matrices are column-major").as_slice()
}

/// Every entry in column-major order.
pub(crate) fn entries(m: &Mat<f64>) -> impl Iterator<Item = f64> + '_ {
    (0..m.ncols()).flat_map(move |j| column(m, j).iter().copied())
}

pub(crate) fn all_finite(m: &Mat<f64>) -> bool {
    entries(m).all(f64::is_finite)
}
