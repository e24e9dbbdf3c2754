//! Sparse parity-check matrices and their Tanner-graph adjacency.
//!
//! A [`ParityCheckCode`] keeps both views of the matrix: `rows[m]` is the set
//! `N(m)` of variables touched by check `m`, and `cols[n]` is the set `M(n)` of
//! checks touching variable `n`. Both lists are sorted ascending, which makes
//! the alist writer canonical and lets equality be plain structural equality.
//!
//! On top of those lists the code carries a flat, check-major edge numbering
//! used by the decoders' message buffers: edge `e` in
//! `check_edges(m)` joins check `m` to variable `edge_var(e)`, and
//! `var_edges(n)` lists the same edge ids from the variable side in the order
//! of `cols[n]`.

use std::fmt::Write as _;

use thiserror::Error;

/// Errors raised while building or parsing a code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: index {index} out of range 1..={bound}")]
    IndexOutOfRange { line: usize, index: usize, bound: usize },
    #[error("line {line}: duplicate index {index}")]
    DuplicateIndex { line: usize, index: usize },
    #[error("inconsistent edge: check {check} / variable {var} present in one list only")]
    InconsistentEdge { check: usize, var: usize },
    #[error("zero-weight column {0}")]
    ZeroWeightColumn(usize),
    #[error("zero-weight row {0}")]
    ZeroWeightRow(usize),
    #[error("index {index} out of range for {what} of size {bound}")]
    OutOfBounds {
        what: &'static str,
        index: usize,
        bound: usize,
    },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// Hard decisions, one bit (0 or 1) per variable node.
///
/// Bit 0 is carried by symbol `+1`, bit 1 by symbol `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HardBits(pub Vec<u8>);

impl HardBits {
    pub fn zeros(n: usize) -> Self {
        HardBits(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    /// Number of positions where `self` and `other` differ.
    pub fn hamming_distance(&self, other: &HardBits) -> usize {
        self.0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b != 0).count()
    }
}

impl From<Vec<u8>> for HardBits {
    fn from(v: Vec<u8>) -> Self {
        HardBits(v)
    }
}

/// Parity of the current hard decisions per check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Syndrome {
    pub s: Vec<u8>,
}

impl Syndrome {
    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|&b| b == 0)
    }

    /// Number of unsatisfied checks.
    pub fn weight(&self) -> usize {
        self.s.iter().filter(|&&b| b != 0).count()
    }
}

/// Common row/column weights of a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Weights {
    /// Row weight, or 0 when rows differ.
    pub w_r: usize,
    /// Column weight, or 0 when columns differ.
    pub w_c: usize,
    /// True when both row and column weights are uniform.
    pub regular: bool,
}

/// Binary LDPC parity-check matrix with Tanner-graph adjacency.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckCode {
    n_vars: usize,
    n_checks: usize,
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
    w_r: usize,
    w_c: usize,
    // check-major edge numbering
    check_start: Vec<usize>,
    edge_var: Vec<usize>,
    var_start: Vec<usize>,
    var_edge: Vec<usize>,
}

impl ParityCheckCode {
    /// Builds a code from its check-side adjacency lists.
    ///
    /// Indices inside each row are sorted; zero-weight rows and columns are
    /// rejected.
    pub fn from_rows(n_vars: usize, rows: Vec<Vec<usize>>) -> Result<Self, CodeError> {
        let mut rows = rows;
        for row in rows.iter_mut() {
            row.sort_unstable();
        }
        let mut cols = vec![Vec::new(); n_vars];
        for (m, row) in rows.iter().enumerate() {
            if row.is_empty() {
                return Err(CodeError::ZeroWeightRow(m));
            }
            for (i, &n) in row.iter().enumerate() {
                if n >= n_vars {
                    return Err(CodeError::OutOfBounds {
                        what: "variable",
                        index: n,
                        bound: n_vars,
                    });
                }
                if i > 0 && row[i - 1] == n {
                    return Err(CodeError::DuplicateIndex { line: 0, index: n });
                }
                cols[n].push(m);
            }
        }
        if let Some(n) = cols.iter().position(Vec::is_empty) {
            return Err(CodeError::ZeroWeightColumn(n));
        }
        Ok(Self::assemble(n_vars, rows, cols))
    }

    /// Builds a code from a dense row-major 0/1 matrix.
    pub fn from_dense(n_checks: usize, n_vars: usize, h: &[u8]) -> Result<Self, CodeError> {
        if h.len() != n_checks * n_vars {
            return Err(CodeError::LengthMismatch {
                expected: n_checks * n_vars,
                got: h.len(),
            });
        }
        let rows = h
            .chunks(n_vars)
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b != 0)
                    .map(|(n, _)| n)
                    .collect()
            })
            .collect();
        Self::from_rows(n_vars, rows)
    }

    fn assemble(n_vars: usize, rows: Vec<Vec<usize>>, cols: Vec<Vec<usize>>) -> Self {
        let n_checks = rows.len();
        let uniform = |lists: &[Vec<usize>]| {
            let w = lists.first().map_or(0, Vec::len);
            if lists.iter().all(|l| l.len() == w) {
                w
            } else {
                0
            }
        };
        let w_r = uniform(&rows);
        let w_c = uniform(&cols);

        let mut check_start = Vec::with_capacity(n_checks + 1);
        let mut edge_var = Vec::new();
        check_start.push(0);
        for row in &rows {
            edge_var.extend_from_slice(row);
            check_start.push(edge_var.len());
        }

        // For each variable, the edge ids in the order of cols[n] (ascending
        // check index). Walking checks in order fills each list in that order.
        let mut var_start = Vec::with_capacity(n_vars + 1);
        var_start.push(0);
        for col in &cols {
            var_start.push(var_start.last().unwrap() + col.len());
        }
        let mut fill = var_start.clone();
        let mut var_edge = vec![0; edge_var.len()];
        for (e, &n) in edge_var.iter().enumerate() {
            var_edge[fill[n]] = e;
            fill[n] += 1;
        }

        ParityCheckCode {
            n_vars,
            n_checks,
            rows,
            cols,
            w_r,
            w_c,
            check_start,
            edge_var,
            var_start,
            var_edge,
        }
    }

    /// Codeword length N.
    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Number of parity checks M.
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// `N(m)`, sorted.
    pub fn row(&self, m: usize) -> &[usize] {
        &self.rows[m]
    }

    /// `M(n)`, sorted.
    pub fn col(&self, n: usize) -> &[usize] {
        &self.cols[n]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<usize>] {
        &self.cols
    }

    /// Edge ids of check `m`; edge `check_edges(m).start + i` joins `m` to `row(m)[i]`.
    pub fn check_edges(&self, m: usize) -> std::ops::Range<usize> {
        self.check_start[m]..self.check_start[m + 1]
    }

    /// Edge ids of variable `n`, aligned with `col(n)`.
    pub fn var_edges(&self, n: usize) -> &[usize] {
        &self.var_edge[self.var_start[n]..self.var_start[n + 1]]
    }

    /// Variable endpoint of edge `e`.
    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    pub fn weights(&self) -> Weights {
        Weights {
            w_r: self.w_r,
            w_c: self.w_c,
            regular: self.w_r > 0 && self.w_c > 0,
        }
    }

    /// GF(2) rank of H.
    pub fn rank(&self) -> usize {
        let words = self.n_vars.div_ceil(64);
        let mut mat: Vec<Vec<u64>> = self
            .rows
            .iter()
            .map(|row| {
                let mut w = vec![0u64; words];
                for &n in row {
                    w[n / 64] |= 1 << (n % 64);
                }
                w
            })
            .collect();
        let mut rank = 0;
        for col in 0..self.n_vars {
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..mat.len()).find(|&r| mat[r][word] & bit != 0) else {
                continue;
            };
            mat.swap(rank, pivot);
            let pivot_row = mat[rank].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r != rank && row[word] & bit != 0 {
                    row.iter_mut().zip(&pivot_row).for_each(|(a, b)| *a ^= b);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Code dimension K = N - rank(H).
    pub fn dimension(&self) -> usize {
        self.n_vars - self.rank()
    }

    /// Code rate K / N.
    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.n_vars as f64
    }

    /// Parity of `z` over every check.
    pub fn syndrome(&self, z: &HardBits) -> Result<Syndrome, CodeError> {
        if z.len() != self.n_vars {
            return Err(CodeError::LengthMismatch {
                expected: self.n_vars,
                got: z.len(),
            });
        }
        let s = self
            .rows
            .iter()
            .map(|row| row.iter().fold(0u8, |acc, &n| acc ^ (z.0[n] & 1)))
            .collect();
        Ok(Syndrome { s })
    }

    /// Same code with variables relabeled: old variable `n` becomes `perm[n]`.
    pub fn permute_vars(&self, perm: &[usize]) -> Result<Self, CodeError> {
        if perm.len() != self.n_vars {
            return Err(CodeError::LengthMismatch {
                expected: self.n_vars,
                got: perm.len(),
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| row.iter().map(|&n| perm[n]).collect())
            .collect();
        Self::from_rows(self.n_vars, rows)
    }

    /// Parses the alist sparse-matrix format.
    ///
    /// Line 1 `N M`, line 2 max column/row weight, line 3 column weights,
    /// line 4 row weights, then N column lists and M row lists, 1-based.
    /// Zero entries pad short lists and are ignored. Blank lines are skipped.
    pub fn from_alist(text: &str) -> Result<Self, CodeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>), CodeError> {
            let Some((line, l)) = lines.next() else {
                return Err(CodeError::Malformed {
                    line: 0,
                    reason: format!("unexpected end of file reading {what}"),
                });
            };
            let nums = l
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>().map_err(|_| CodeError::Malformed {
                        line,
                        reason: format!("bad integer {t:?} in {what}"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok((line, nums))
        };

        let (line, header) = next_numbers("header")?;
        let [n_vars, n_checks] = header[..] else {
            return Err(CodeError::MalformedHeader {
                line,
                reason: format!("expected \"N M\", found {} values", header.len()),
            });
        };
        if n_vars == 0 || n_checks == 0 {
            return Err(CodeError::MalformedHeader {
                line,
                reason: "N and M must be positive".into(),
            });
        }
        let (line, maxw) = next_numbers("max weights")?;
        let [max_col_w, max_row_w] = maxw[..] else {
            return Err(CodeError::MalformedHeader {
                line,
                reason: "expected max column and row weight".into(),
            });
        };
        let (line, col_w) = next_numbers("column weights")?;
        if col_w.len() != n_vars {
            return Err(CodeError::MalformedHeader {
                line,
                reason: format!("expected {n_vars} column weights, found {}", col_w.len()),
            });
        }
        let (line, row_w) = next_numbers("row weights")?;
        if row_w.len() != n_checks {
            return Err(CodeError::MalformedHeader {
                line,
                reason: format!("expected {n_checks} row weights, found {}", row_w.len()),
            });
        }
        if let Some(n) = col_w.iter().position(|&w| w == 0) {
            return Err(CodeError::ZeroWeightColumn(n));
        }
        if let Some(m) = row_w.iter().position(|&w| w == 0) {
            return Err(CodeError::ZeroWeightRow(m));
        }

        let mut read_lists = |count: usize,
                              weights: &[usize],
                              max_w: usize,
                              bound: usize,
                              what: &str|
         -> Result<Vec<Vec<usize>>, CodeError> {
            (0..count)
                .map(|i| {
                    let (line, raw) = next_numbers(what)?;
                    let mut list: Vec<usize> = Vec::with_capacity(raw.len());
                    for v in raw.into_iter().filter(|&v| v != 0) {
                        if v > bound {
                            return Err(CodeError::IndexOutOfRange {
                                line,
                                index: v,
                                bound,
                            });
                        }
                        if list.contains(&(v - 1)) {
                            return Err(CodeError::DuplicateIndex { line, index: v });
                        }
                        list.push(v - 1);
                    }
                    if list.len() != weights[i] {
                        return Err(CodeError::Malformed {
                            line,
                            reason: format!(
                                "{what} {} has {} entries, weight line says {}",
                                i + 1,
                                list.len(),
                                weights[i]
                            ),
                        });
                    }
                    if list.len() > max_w {
                        return Err(CodeError::Malformed {
                            line,
                            reason: format!("{what} {} exceeds max weight {max_w}", i + 1),
                        });
                    }
                    list.sort_unstable();
                    Ok(list)
                })
                .collect()
        };

        let cols = read_lists(n_vars, &col_w, max_col_w, n_checks, "column")?;
        let rows = read_lists(n_checks, &row_w, max_row_w, n_vars, "row")?;

        // The two lists must describe one edge set.
        for (n, col) in cols.iter().enumerate() {
            for &m in col {
                if rows[m].binary_search(&n).is_err() {
                    return Err(CodeError::InconsistentEdge { check: m, var: n });
                }
            }
        }
        for (m, row) in rows.iter().enumerate() {
            for &n in row {
                if cols[n].binary_search(&m).is_err() {
                    return Err(CodeError::InconsistentEdge { check: m, var: n });
                }
            }
        }

        Ok(Self::assemble(n_vars, rows, cols))
    }

    /// Canonical alist text: sorted lists, no padding, one trailing newline.
    pub fn to_alist(&self) -> String {
        let join = |it: &mut dyn Iterator<Item = usize>| {
            it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
        };
        let max_col = self.cols.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n_vars, self.n_checks);
        let _ = writeln!(out, "{max_col} {max_row}");
        let _ = writeln!(out, "{}", join(&mut self.cols.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for col in &self.cols {
            let _ = writeln!(out, "{}", join(&mut col.iter().map(|m| m + 1)));
        }
        for row in &self.rows {
            let _ = writeln!(out, "{}", join(&mut row.iter().map(|n| n + 1)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n2 3\n";

    fn small() -> ParityCheckCode {
        ParityCheckCode::from_alist(SMALL).unwrap()
    }

    #[test]
    fn parses_small_alist() {
        let c = small();
        assert_eq!(c.n_vars(), 3);
        assert_eq!(c.n_checks(), 2);
        assert_eq!(c.row(0), &[0, 1]);
        assert_eq!(c.row(1), &[1, 2]);
        assert_eq!(c.col(1), &[0, 1]);
        assert_eq!(c.n_edges(), 4);
        assert_eq!(c, ParityCheckCode::from_dense(2, 3, &[1, 1, 0, 0, 1, 1]).unwrap());
    }

    #[test]
    fn missing_row_edge_is_inconsistent() {
        // column 3 claims check 2, but row 2 lists variables 1 and 2
        let text = "3 2\n2 2\n1 2 1\n2 2\n1\n1 2\n2\n1 2\n1 2\n";
        assert!(matches!(
            ParityCheckCode::from_alist(text),
            Err(CodeError::InconsistentEdge { .. })
        ));
    }

    #[test]
    fn zero_padding_is_ignored() {
        let text = "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n";
        assert_eq!(ParityCheckCode::from_alist(text).unwrap(), small());
    }

    #[test]
    fn reports_line_numbers() {
        let text = "3 2\n2 2\n1 2 1\n2 2\n1\n1 7\n2\n1 2\n2 3\n";
        assert_eq!(
            ParityCheckCode::from_alist(text),
            Err(CodeError::IndexOutOfRange {
                line: 6,
                index: 7,
                bound: 2
            })
        );
        assert!(matches!(
            ParityCheckCode::from_alist("3\n"),
            Err(CodeError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            ParityCheckCode::from_alist("3 2\n2 2\n1 2 1\n2 2\n1\n1 x\n"),
            Err(CodeError::Malformed { line: 6, .. })
        ));
    }

    #[test]
    fn zero_weight_column_rejected() {
        assert_eq!(
            ParityCheckCode::from_rows(3, vec![vec![0, 1], vec![1]]),
            Err(CodeError::ZeroWeightColumn(2))
        );
        let text = "3 2\n2 2\n1 2 0\n2 1\n1\n1 2\n\n1 2\n2\n";
        assert_eq!(
            ParityCheckCode::from_alist(text),
            Err(CodeError::ZeroWeightColumn(2))
        );
    }

    #[test]
    fn small_round_trip() {
        let c = small();
        let text = c.to_alist();
        assert_eq!(text, SMALL);
        assert_eq!(ParityCheckCode::from_alist(&text).unwrap(), c);
    }

    #[test]
    fn syndrome_examples() {
        let c = small();
        let s = c.syndrome(&HardBits(vec![1, 0, 1])).unwrap();
        assert_eq!(s.s, vec![1, 1]);
        assert!(!s.is_zero());
        assert!(c.syndrome(&HardBits::zeros(3)).unwrap().is_zero());
        assert!(c.syndrome(&HardBits(vec![1, 1, 1])).unwrap().is_zero());
        assert_eq!(
            c.syndrome(&HardBits::zeros(2)),
            Err(CodeError::LengthMismatch {
                expected: 3,
                got: 2
            })
        );
    }

    #[test]
    fn weight_examples() {
        let w = small().weights();
        assert_eq!((w.w_r, w.w_c, w.regular), (2, 0, false));
        let eye = ParityCheckCode::from_dense(3, 3, &[1, 0, 0, 0, 1, 0, 0, 0, 1]).unwrap();
        let w = eye.weights();
        assert_eq!((w.w_r, w.w_c, w.regular), (1, 1, true));
    }

    #[test]
    fn edge_numbering_is_consistent() {
        let c = small();
        for n in 0..c.n_vars() {
            let edges = c.var_edges(n);
            assert_eq!(edges.len(), c.col(n).len());
            for (&e, &m) in edges.iter().zip(c.col(n)) {
                assert!(c.check_edges(m).contains(&e));
                assert_eq!(c.edge_var(e), n);
            }
        }
    }

    #[test]
    fn rank_and_rate() {
        let c = small();
        assert_eq!(c.rank(), 2);
        assert_eq!(c.dimension(), 1);
        // repeated parity row does not add rank
        let d = ParityCheckCode::from_rows(3, vec![vec![0, 1], vec![0, 1], vec![2, 1]]).unwrap();
        assert_eq!(d.rank(), 2);
    }
}
