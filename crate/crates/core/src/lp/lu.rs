//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! Left-looking factorization with partial pivoting; the nonzero pattern of
//! each column solve is discovered by depth-first reachability over the
//! already-computed L columns, so work is proportional to fill-in rather
//! than to the basis dimension.

/// Threshold below which a pivot candidate is treated as numerically zero.
pub const ZERO_PIVOT: f64 = 1e-10;

#[derive(Debug)]
pub enum LuError {
    /// The supplied columns do not form a nonsingular basis.
    Singular { step: usize },
}

/// LU factors of a basis, PB = LU, in elimination-position space.
///
/// `pivot_row[k]` is the original row chosen as pivot at step `k`;
/// `slot_of_pos[k]` is the basis slot whose column was eliminated at step `k`.
pub struct LuFactors {
    m: usize,
    /// L columns: entries (original_row, multiplier), strictly below the pivot.
    l_cols: Vec<Vec<(usize, f64)>>,
    /// U columns: entries (position t < k, value).
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
    pivot_row: Vec<usize>,
    /// position of a row in the elimination order (inverse of pivot_row)
    pos_of_row: Vec<usize>,
    slot_of_pos: Vec<usize>,
    pos_of_slot: Vec<usize>,
    nnz: usize,
}

/// One product-form update: basis slot `slot` replaced, spike column `alpha`
/// (B^-1 times the entering column, in slot space).
pub struct Eta {
    pub slot: usize,
    pub diag: f64,
    /// off-diagonal entries (other_slot, alpha_value)
    pub off: Vec<(usize, f64)>,
}

impl LuFactors {
    /// Factorize the basis given by `cols(slot)` for slot in 0..m, where each
    /// column is a sparse list of (row, value) pairs over 0..m rows.
    pub fn factorize<'a, F>(m: usize, cols: F) -> Result<LuFactors, LuError>
    where
        F: Fn(usize) -> &'a [(usize, f64)],
    {
        // Process sparser columns first; cheap stand-in for a Markowitz order.
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&s| (cols(s).len(), s));

        let mut lu = LuFactors {
            m,
            l_cols: Vec::with_capacity(m),
            u_cols: Vec::with_capacity(m),
            u_diag: Vec::with_capacity(m),
            pivot_row: Vec::with_capacity(m),
            pos_of_row: vec![usize::MAX; m],
            slot_of_pos: Vec::with_capacity(m),
            pos_of_slot: vec![usize::MAX; m],
            nnz: 0,
        };

        let mut work = vec![0.0f64; m];
        let mut touched: Vec<usize> = Vec::with_capacity(64);
        let mut visited = vec![false; m];
        let mut reach: Vec<usize> = Vec::with_capacity(64);
        let mut dfs_stack: Vec<(usize, usize)> = Vec::new();

        for (k, &slot) in order.iter().enumerate() {
            let col = cols(slot);
            // Scatter the column and find reachable elimination steps.
            reach.clear();
            for &(row, val) in col {
                work[row] = val;
                touched.push(row);
                let t = lu.pos_of_row[row];
                if t != usize::MAX && !visited[t] {
                    // Iterative DFS, post-order collection.
                    dfs_stack.push((t, 0));
                    visited[t] = true;
                    while let Some(&mut (node, ref mut child)) = dfs_stack.last_mut() {
                        let lc = &lu.l_cols[node];
                        let mut advanced = false;
                        while *child < lc.len() {
                            let r2 = lc[*child].0;
                            *child += 1;
                            let t2 = lu.pos_of_row[r2];
                            if t2 != usize::MAX && !visited[t2] {
                                visited[t2] = true;
                                dfs_stack.push((t2, 0));
                                advanced = true;
                                break;
                            }
                        }
                        if !advanced {
                            reach.push(node);
                            dfs_stack.pop();
                        }
                    }
                }
            }
            // Reverse post-order = topological order of the update DAG.
            reach.reverse();
            let mut u_col: Vec<(usize, f64)> = Vec::with_capacity(reach.len());
            for &t in &reach {
                visited[t] = false;
                let piv = lu.pivot_row[t];
                let coef = work[piv];
                if coef == 0.0 {
                    continue;
                }
                u_col.push((t, coef));
                for &(row, mult) in &lu.l_cols[t] {
                    if work[row] == 0.0 && lu.pos_of_row[row] == usize::MAX {
                        touched.push(row);
                    } else if work[row] == 0.0 {
                        touched.push(row);
                    }
                    work[row] -= coef * mult;
                }
                work[piv] = 0.0;
            }
            // Pivot: largest magnitude among not-yet-pivoted rows.
            let mut best_row = usize::MAX;
            let mut best_val = 0.0f64;
            for &row in &touched {
                if lu.pos_of_row[row] == usize::MAX {
                    let v = work[row].abs();
                    if v > best_val || (v == best_val && best_row != usize::MAX && row < best_row)
                    {
                        best_val = v;
                        best_row = row;
                    }
                }
            }
            if best_row == usize::MAX || best_val <= ZERO_PIVOT {
                for &row in &touched {
                    work[row] = 0.0;
                }
                touched.clear();
                return Err(LuError::Singular { step: k });
            }
            let diag = work[best_row];
            let mut l_col: Vec<(usize, f64)> = Vec::new();
            for &row in &touched {
                if lu.pos_of_row[row] == usize::MAX && row != best_row {
                    let v = work[row];
                    if v != 0.0 {
                        l_col.push((row, v / diag));
                    }
                }
                work[row] = 0.0;
            }
            touched.clear();
            l_col.sort_unstable_by_key(|e| e.0);
            u_col.sort_unstable_by_key(|e| e.0);

            lu.nnz += 1 + l_col.len() + u_col.len();
            lu.pos_of_row[best_row] = k;
            lu.pivot_row.push(best_row);
            lu.u_diag.push(diag);
            lu.l_cols.push(l_col);
            lu.u_cols.push(u_col);
            lu.slot_of_pos.push(slot);
            lu.pos_of_slot[slot] = k;
        }
        Ok(lu)
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    /// Solve B x = v. Input `v` is dense over original rows (consumed as
    /// workspace); output is dense over basis slots.
    pub fn ftran(&self, v: &mut [f64], out: &mut [f64]) {
        let m = self.m;
        // Forward: L y = P v, y in position space.
        let mut y = vec![0.0f64; m];
        for t in 0..m {
            let val = v[self.pivot_row[t]];
            y[t] = val;
            if val != 0.0 {
                for &(row, mult) in &self.l_cols[t] {
                    v[row] -= val * mult;
                }
            }
        }
        // Backward: U z = y (column-oriented saxpy).
        for k in (0..m).rev() {
            let z = y[k] / self.u_diag[k];
            y[k] = z;
            if z != 0.0 {
                for &(t, val) in &self.u_cols[k] {
                    y[t] -= z * val;
                }
            }
        }
        for k in 0..m {
            out[self.slot_of_pos[k]] = y[k];
        }
        for r in v.iter_mut() {
            *r = 0.0;
        }
    }

    /// Solve B^T x = c. Input `c` is dense over basis slots; output dense
    /// over original rows.
    pub fn btran(&self, c: &[f64], out: &mut [f64]) {
        let m = self.m;
        // Forward: U^T w = Pc (dot-product form using U columns).
        let mut w = vec![0.0f64; m];
        for k in 0..m {
            let mut acc = c[self.slot_of_pos[k]];
            for &(t, val) in &self.u_cols[k] {
                acc -= val * w[t];
            }
            w[k] = acc / self.u_diag[k];
        }
        // Backward: L^T g = w (dot form over L columns, positions above).
        for t in (0..m).rev() {
            let mut acc = w[t];
            for &(row, mult) in &self.l_cols[t] {
                acc -= mult * w[self.pos_of_row[row]];
            }
            w[t] = acc;
        }
        for r in out.iter_mut() {
            *r = 0.0;
        }
        for t in 0..m {
            out[self.pivot_row[t]] = w[t];
        }
    }
}

impl Eta {
    /// Apply E to a slot-space vector (ftran direction).
    pub fn apply(&self, v: &mut [f64]) {
        let vr = v[self.slot];
        if vr == 0.0 {
            return;
        }
        let scaled = vr / self.diag;
        v[self.slot] = scaled;
        for &(i, a) in &self.off {
            v[i] -= a * scaled;
        }
    }

    /// Apply E^T to a slot-space vector (btran direction).
    pub fn apply_transposed(&self, v: &mut [f64]) {
        let mut dot = 0.0;
        for &(i, a) in &self.off {
            dot += a * v[i];
        }
        v[self.slot] = (v[self.slot] - dot) / self.diag;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols(mat: &[Vec<f64>]) -> Vec<Vec<(usize, f64)>> {
        let m = mat.len();
        (0..m)
            .map(|j| {
                (0..m)
                    .filter(|&i| mat[i][j] != 0.0)
                    .map(|i| (i, mat[i][j]))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn factorize_and_solve_small() {
        let mat = vec![
            vec![2.0, 1.0, 0.0],
            vec![0.0, 3.0, 1.0],
            vec![1.0, 0.0, 4.0],
        ];
        let cols = dense_cols(&mat);
        let lu = LuFactors::factorize(3, |s| &cols[s]).unwrap();

        let mut rhs = vec![3.0, 4.0, 5.0];
        let mut x = vec![0.0; 3];
        lu.ftran(&mut rhs, &mut x);
        // Check B x = b.
        for i in 0..3 {
            let mut acc = 0.0;
            for j in 0..3 {
                acc += mat[i][j] * x[j];
            }
            let b = [3.0, 4.0, 5.0][i];
            assert!((acc - b).abs() < 1e-12, "row {i}: {acc} vs {b}");
        }

        let c = vec![1.0, -2.0, 0.5];
        let mut pi = vec![0.0; 3];
        lu.btran(&c, &mut pi);
        for j in 0..3 {
            let mut acc = 0.0;
            for i in 0..3 {
                acc += mat[i][j] * pi[i];
            }
            assert!((acc - c[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_detected() {
        let mat = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        let cols = dense_cols(&mat);
        assert!(LuFactors::factorize(2, |s| &cols[s]).is_err());
    }
}
