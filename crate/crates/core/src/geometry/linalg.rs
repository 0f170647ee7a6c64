/// Relative pivot threshold below which a system counts as singular.
pub(crate) const SINGULAR_EPS: f64 = 1e-12;

/// Solves the `k x k` row-major system `a x = b` in place by Gaussian
/// elimination with partial pivoting. On success `b` holds `x`.
///
/// Returns `false` when a pivot falls below `SINGULAR_EPS` times the norm of
/// its original row.
pub(crate) fn solve_in_place(a: &mut [f64], b: &mut [f64], k: usize) -> bool {
    debug_assert_eq!(a.len(), k * k);
    debug_assert_eq!(b.len(), k);
    let row_norms: Vec<f64> = (0..k)
        .map(|r| a[r * k..(r + 1) * k].iter().fold(0.0_f64, |m, v| m.max(v.abs())))
        .collect();
    let mut norm_of = row_norms;

    for col in 0..k {
        let (pivot_row, pivot_abs) = (col..k)
            .map(|r| (r, a[r * k + col].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_abs <= SINGULAR_EPS * norm_of[pivot_row] || pivot_abs == 0.0 {
            return false;
        }
        if pivot_row != col {
            for c in 0..k {
                a.swap(pivot_row * k + c, col * k + c);
            }
            b.swap(pivot_row, col);
            norm_of.swap(pivot_row, col);
        }
        let p = a[col * k + col];
        for r in col + 1..k {
            let f = a[r * k + col] / p;
            if f == 0.0 {
                continue;
            }
            a[r * k + col] = 0.0;
            for c in col + 1..k {
                a[r * k + c] -= f * a[col * k + c];
            }
            b[r] -= f * b[col];
        }
    }
    for col in (0..k).rev() {
        let mut s = b[col];
        for c in col + 1..k {
            s -= a[col * k + c] * b[c];
        }
        b[col] = s / a[col * k + col];
    }
    true
}
