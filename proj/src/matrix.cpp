#include "dainf/matrix.hpp"

#include <algorithm>

namespace dainf {

Matrix::Matrix(Ring ring, size_t rows, size_t cols)
    : ring_(ring), rows_(rows), cols_(cols), data_(rows) {}

Matrix Matrix::identity(Ring ring, size_t n) {
  Matrix m(ring, n, n);
  for (size_t i = 0; i < n; ++i) m.set(i, i, Scalar(1));
  return m;
}

Matrix Matrix::from_rows(Ring ring, const std::vector<std::vector<Scalar>>& rows, size_t cols) {
  Matrix m(ring, rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < cols && c < rows[r].size(); ++c) m.set(r, c, rows[r][c]);
  return m;
}

Scalar Matrix::get(size_t r, size_t c) const {
  auto it = data_.at(r).find(c);
  return it == data_[r].end() ? Scalar(0) : it->second;
}

void Matrix::set(size_t r, size_t c, const Scalar& v) {
  if (r >= rows_ || c >= cols_) throw std::out_of_range("matrix index out of range");
  Scalar n = ring_.normalize(v);
  if (n == 0)
    data_[r].erase(c);
  else
    data_[r][c] = n;
}

void Matrix::add_to(size_t r, size_t c, const Scalar& v) { set(r, c, get(r, c) + v); }

bool Matrix::is_zero() const {
  for (const auto& row : data_)
    if (!row.empty()) return false;
  return true;
}

size_t Matrix::nonzeros() const {
  size_t n = 0;
  for (const auto& row : data_) n += row.size();
  return n;
}

Matrix Matrix::operator*(const Matrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("matrix product: dimension mismatch");
  if (!(ring_ == other.ring_)) throw std::invalid_argument("matrix product: ring mismatch");
  Matrix out(ring_, rows_, other.cols_);
  for (size_t i = 0; i < rows_; ++i) {
    std::map<size_t, Scalar> acc;
    for (const auto& [k, a] : data_[i])
      for (const auto& [j, b] : other.data_[k]) acc[j] += a * b;
    for (const auto& [j, v] : acc) out.set(i, j, v);
  }
  return out;
}

DenseVec Matrix::apply(const DenseVec& x) const {
  if (x.size() != cols_) throw std::invalid_argument("matrix apply: dimension mismatch");
  DenseVec y(rows_);
  for (size_t i = 0; i < rows_; ++i) {
    Scalar s = 0;
    for (const auto& [k, a] : data_[i]) s += a * x[k];
    y[i] = ring_.normalize(s);
  }
  return y;
}

Matrix Matrix::transpose() const {
  Matrix t(ring_, cols_, rows_);
  for (size_t i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[i]) t.data_[j][i] = v;
  return t;
}

std::vector<std::vector<Scalar>> Matrix::dense() const {
  std::vector<std::vector<Scalar>> d(rows_, std::vector<Scalar>(cols_));
  for (size_t i = 0; i < rows_; ++i)
    for (const auto& [j, v] : data_[i]) d[i][j] = v;
  return d;
}

bool operator==(const Matrix& a, const Matrix& b) {
  return a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
}

namespace {

using Dense = std::vector<std::vector<Scalar>>;

Dense dense_identity(size_t n) {
  Dense d(n, std::vector<Scalar>(n));
  for (size_t i = 0; i < n; ++i) d[i][i] = 1;
  return d;
}

// Elimination state: A is transformed in place; U, Ui, V, Vi track the
// accumulated row and column operations so that U*A0*V = A, U*Ui = 1, V*Vi = 1.
struct Reducer {
  const Ring& R;
  Dense A, U, Ui, V, Vi;
  size_t m, n;

  Reducer(const Ring& ring, Dense a, size_t rows, size_t cols)
      : R(ring), A(std::move(a)), U(dense_identity(rows)), Ui(dense_identity(rows)),
        V(dense_identity(cols)), Vi(dense_identity(cols)), m(rows), n(cols) {}

  // row_i += c * row_j
  void row_add(size_t i, size_t j, const Scalar& c) {
    if (c == 0) return;
    for (size_t k = 0; k < n; ++k)
      if (A[j][k] != 0) A[i][k] = R.normalize(A[i][k] + c * A[j][k]);
    for (size_t k = 0; k < m; ++k)
      if (U[j][k] != 0) U[i][k] = R.normalize(U[i][k] + c * U[j][k]);
    for (size_t k = 0; k < m; ++k)
      if (Ui[k][i] != 0) Ui[k][j] = R.normalize(Ui[k][j] - c * Ui[k][i]);
  }
  void row_swap(size_t i, size_t j) {
    if (i == j) return;
    std::swap(A[i], A[j]);
    std::swap(U[i], U[j]);
    for (size_t k = 0; k < m; ++k) std::swap(Ui[k][i], Ui[k][j]);
  }
  void row_scale(size_t i, const Scalar& u) {
    if (u == 1) return;
    Scalar inv = R.inverse(u);
    for (size_t k = 0; k < n; ++k) A[i][k] = R.normalize(A[i][k] * u);
    for (size_t k = 0; k < m; ++k) U[i][k] = R.normalize(U[i][k] * u);
    for (size_t k = 0; k < m; ++k) Ui[k][i] = R.normalize(Ui[k][i] * inv);
  }
  // col_j += c * col_i
  void col_add(size_t j, size_t i, const Scalar& c) {
    if (c == 0) return;
    for (size_t k = 0; k < m; ++k)
      if (A[k][i] != 0) A[k][j] = R.normalize(A[k][j] + c * A[k][i]);
    for (size_t k = 0; k < n; ++k)
      if (V[k][i] != 0) V[k][j] = R.normalize(V[k][j] + c * V[k][i]);
    for (size_t k = 0; k < n; ++k)
      if (Vi[j][k] != 0) Vi[i][k] = R.normalize(Vi[i][k] - c * Vi[j][k]);
  }
  void col_swap(size_t i, size_t j) {
    if (i == j) return;
    for (size_t k = 0; k < m; ++k) std::swap(A[k][i], A[k][j]);
    for (size_t k = 0; k < n; ++k) std::swap(V[k][i], V[k][j]);
    std::swap(Vi[i], Vi[j]);
  }

  // Smallest pivot measure in the lower-right block, ties broken by (row, col).
  bool find_pivot(size_t t, size_t& pr, size_t& pc) const {
    bool found = false;
    mpz_class best;
    for (size_t i = t; i < m; ++i)
      for (size_t j = t; j < n; ++j) {
        if (A[i][j] == 0) continue;
        mpz_class meas = R.pivot_measure(A[i][j]);
        if (!found || meas < best) {
          found = true;
          best = meas;
          pr = i;
          pc = j;
        }
      }
    return found;
  }

  // Clears row t and column t outside the pivot.
  void clear_cross(size_t t) {
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (size_t i = t + 1; i < m; ++i) {
        if (A[i][t] == 0) continue;
        auto [q, r] = R.div_rem(A[i][t], A[t][t]);
        row_add(i, t, -q);
        if (A[i][t] != 0) {
          row_swap(i, t);
          dirty = true;
        }
      }
      for (size_t j = t + 1; j < n; ++j) {
        if (A[t][j] == 0) continue;
        auto [q, r] = R.div_rem(A[t][j], A[t][t]);
        col_add(j, t, -q);
        if (A[t][j] != 0) {
          col_swap(j, t);
          dirty = true;
        }
      }
    }
  }

  size_t run() {
    size_t t = 0;
    for (; t < std::min(m, n); ++t) {
      size_t pr = 0, pc = 0;
      if (!find_pivot(t, pr, pc)) break;
      row_swap(t, pr);
      col_swap(t, pc);
      for (;;) {
        clear_cross(t);
        // Divisibility chain: fold in any column with an entry the pivot
        // does not divide, then clear again.
        bool folded = false;
        if (!R.is_field()) {
          for (size_t i = t + 1; i < m && !folded; ++i)
            for (size_t j = t + 1; j < n; ++j) {
              if (A[i][j] == 0) continue;
              if (!R.divide(A[i][j], A[t][t])) {
                col_add(t, j, Scalar(1));
                folded = true;
                break;
              }
            }
        }
        if (!folded) break;
      }
      row_scale(t, R.normalizing_unit(A[t][t]));
    }
    return t;
  }
};

Matrix to_matrix(const Ring& R, const Dense& d, size_t rows, size_t cols) {
  Matrix out(R, rows, cols);
  for (size_t i = 0; i < rows; ++i)
    for (size_t j = 0; j < cols; ++j)
      if (d[i][j] != 0) out.set(i, j, d[i][j]);
  return out;
}

}  // namespace

SmithForm diagonalize(const Matrix& mat) {
  const Ring& R = mat.ring();
  Reducer red(R, mat.dense(), mat.rows(), mat.cols());
  size_t rank = red.run();
  SmithForm f{to_matrix(R, red.A, red.m, red.n), to_matrix(R, red.U, red.m, red.m),
              to_matrix(R, red.V, red.n, red.n), to_matrix(R, red.Ui, red.m, red.m),
              to_matrix(R, red.Vi, red.n, red.n), rank, {}};
  for (size_t i = 0; i < rank; ++i) f.diagonal.push_back(red.A[i][i]);
  return f;
}

SmithForm smith_normal_form(const Matrix& m) {
  if (m.ring().is_field())
    throw RingError("smith_normal_form requires Z or Z_(p), got " + m.ring().descriptor());
  return diagonalize(m);
}

LinearSolver::LinearSolver(const Matrix& m) : form_(diagonalize(m)) {}

std::optional<DenseVec> LinearSolver::solve(const DenseVec& b) const {
  const Ring& R = form_.S.ring();
  if (b.size() != form_.S.rows()) throw std::invalid_argument("solve: dimension mismatch");
  DenseVec y = form_.U.apply(b);
  DenseVec z(form_.S.cols());
  for (size_t i = 0; i < y.size(); ++i) {
    if (i < form_.rank) {
      auto q = R.divide(y[i], form_.diagonal[i]);
      if (!q) return std::nullopt;
      z[i] = *q;
    } else if (y[i] != 0) {
      return std::nullopt;
    }
  }
  return form_.V.apply(z);
}

std::vector<DenseVec> LinearSolver::kernel_basis() const {
  std::vector<DenseVec> out;
  size_t n = form_.V.rows();
  for (size_t j = form_.rank; j < form_.V.cols(); ++j) {
    DenseVec col(n);
    for (size_t i = 0; i < n; ++i) col[i] = form_.V.get(i, j);
    out.push_back(std::move(col));
  }
  return out;
}

std::optional<DenseVec> solve_linear(const Matrix& m, const DenseVec& b) {
  return LinearSolver(m).solve(b);
}

size_t matrix_rank(const Matrix& m) { return diagonalize(m).rank; }

Matrix kernel_matrix(const Matrix& m) {
  SmithForm f = diagonalize(m);
  Matrix K(m.ring(), m.cols(), m.cols() - f.rank);
  for (size_t i = 0; i < m.cols(); ++i)
    for (const auto& [j, v] : f.V.row(i))
      if (j >= f.rank) K.set(i, j - f.rank, v);
  return K;
}

Matrix image_basis(const Matrix& m) {
  // U m V = S, so im m is spanned by s_i times the i-th column of U^{-1}.
  SmithForm f = diagonalize(m);
  Matrix B(m.ring(), m.rows(), f.rank);
  for (size_t i = 0; i < m.rows(); ++i)
    for (const auto& [j, v] : f.U_inv.row(i))
      if (j < f.rank) B.set(i, j, v * f.diagonal[j]);
  return B;
}

HomologyPresentation subquotient(const Matrix& numerator, const Matrix& denominator) {
  const Ring& R = numerator.ring();
  if (numerator.rows() != denominator.rows()) throw HomologyError("subquotient: ambient dimensions differ");
  Matrix Nb = image_basis(numerator);
  auto solver = std::make_shared<const LinearSolver>(Nb);
  size_t r = Nb.cols();

  // Relations: the denominator generators in the basis of N.
  Matrix X(R, r, denominator.cols());
  auto dcols = denominator.transpose();
  for (size_t c = 0; c < denominator.cols(); ++c) {
    DenseVec g(denominator.rows());
    for (const auto& [i, v] : dcols.row(c)) g[i] = v;
    auto y = solver->solve(g);
    if (!y) throw HomologyError("subquotient: denominator is not contained in numerator");
    for (size_t i = 0; i < r; ++i)
      if ((*y)[i] != 0) X.set(i, c, (*y)[i]);
  }
  SmithForm f2 = diagonalize(X);

  HomologyPresentation h;
  h.ring = R;
  h.ambient_dim = numerator.rows();
  h.numerator = solver;
  h.to_classes = f2.U;
  size_t killed = 0;
  while (killed < f2.rank && R.is_unit(f2.diagonal[killed])) ++killed;
  h.killed = killed;

  Matrix G = Nb * f2.U_inv;
  auto generator = [&](size_t col) {
    DenseVec g(G.rows());
    for (size_t i = 0; i < G.rows(); ++i) g[i] = G.get(i, col);
    return g;
  };
  for (size_t i = killed; i < f2.rank; ++i) {
    h.torsion.push_back(f2.diagonal[i]);
    h.generators.push_back(generator(i));
  }
  for (size_t i = f2.rank; i < r; ++i) h.generators.push_back(generator(i));
  h.free_rank = r - f2.rank;
  return h;
}

HomologyPresentation homology_at(const Matrix& d_in, const Matrix& d_out) {
  if (d_in.rows() != d_out.cols()) throw HomologyError("homology_at: maps are not composable");
  if (!(d_out * d_in).is_zero()) throw HomologyError("homology_at: composite is not zero");
  return subquotient(kernel_matrix(d_out), d_in);
}

DenseVec HomologyPresentation::class_coordinates(const DenseVec& x) const {
  if (!ring) throw HomologyError("empty presentation");
  if (x.size() != ambient_dim) throw HomologyError("class_coordinates: dimension mismatch");
  auto y = numerator->solve(x);
  if (!y) throw HomologyError("class_coordinates: vector is not a cycle");
  DenseVec w = to_classes->apply(*y);
  DenseVec out;
  for (size_t i = 0; i < torsion.size(); ++i) out.push_back(ring->residue(w[killed + i], torsion[i]));
  for (size_t i = killed + torsion.size(); i < w.size(); ++i) out.push_back(w[i]);
  return out;
}

bool HomologyPresentation::is_boundary(const DenseVec& x) const {
  for (const auto& v : class_coordinates(x))
    if (v != 0) return false;
  return true;
}

}  // namespace dainf
