#pragma once

// Sparse matrices over a coefficient ring, Smith normal form, linear solving
// and homology of a pair of composable maps.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "dainf/coefficients.hpp"

namespace dainf {

using DenseVec = std::vector<Scalar>;

class Matrix {
 public:
  Matrix(Ring ring, size_t rows, size_t cols);
  static Matrix identity(Ring ring, size_t n);
  static Matrix from_rows(Ring ring, const std::vector<std::vector<Scalar>>& rows, size_t cols);

  const Ring& ring() const { return ring_; }
  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  Scalar get(size_t r, size_t c) const;
  void set(size_t r, size_t c, const Scalar& v);
  void add_to(size_t r, size_t c, const Scalar& v);

  // Nonzero entries of row r, ordered by column.
  const std::map<size_t, Scalar>& row(size_t r) const { return data_[r]; }
  bool is_zero() const;
  size_t nonzeros() const;

  Matrix operator*(const Matrix& other) const;
  DenseVec apply(const DenseVec& x) const;
  Matrix transpose() const;
  std::vector<std::vector<Scalar>> dense() const;

  friend bool operator==(const Matrix& a, const Matrix& b);

 private:
  Ring ring_;
  size_t rows_, cols_;
  std::vector<std::map<size_t, Scalar>> data_;
};

// U * M * V = S, with S diagonal and d_1 | d_2 | ... on the diagonal.
struct SmithForm {
  Matrix S, U, V;
  Matrix U_inv, V_inv;
  size_t rank = 0;
  std::vector<Scalar> diagonal;  // the first `rank` diagonal entries
};

// Works over every supported ring; fields reduce to Gaussian elimination with
// a normalized (0/1) diagonal.
SmithForm diagonalize(const Matrix& m);

// Public SNF entry point; only the integral rings Z and Z_(p) are accepted.
SmithForm smith_normal_form(const Matrix& m);

// Reusable solver for M x = b over the ring of M.
class LinearSolver {
 public:
  explicit LinearSolver(const Matrix& m);
  // The SNF particular solution with free parameters zero, or nullopt.
  std::optional<DenseVec> solve(const DenseVec& b) const;
  size_t rank() const { return form_.rank; }
  const SmithForm& form() const { return form_; }
  // A basis of ker M (columns of V past the rank).
  std::vector<DenseVec> kernel_basis() const;

 private:
  SmithForm form_;
};

std::optional<DenseVec> solve_linear(const Matrix& m, const DenseVec& b);
size_t matrix_rank(const Matrix& m);

class HomologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A subquotient N / M of a free module, e.g. ker(d_out) / im(d_in).
// Generators list torsion classes first (paired with `torsion`) and then
// free classes.
struct HomologyPresentation {
  size_t free_rank = 0;
  std::vector<Scalar> torsion;
  std::vector<DenseVec> generators;

  bool is_zero() const { return free_rank == 0 && torsion.empty(); }
  size_t size() const { return generators.size(); }

  // Coordinates of an element of N in the generator basis; torsion
  // coordinates are canonical residues.  Throws HomologyError if x is not
  // in N.
  DenseVec class_coordinates(const DenseVec& x) const;
  bool is_boundary(const DenseVec& x) const;

  // Internal data for class_coordinates.
  std::optional<Ring> ring;
  size_t ambient_dim = 0;
  std::shared_ptr<const LinearSolver> numerator;  // basis of N, solved against
  std::optional<Matrix> to_classes;               // U from the relation diagonalization
  size_t killed = 0;                              // unit-diagonal positions preceding torsion
};

// Columns of `numerator` generate N; columns of `denominator` generate
// M, which must lie inside N.
HomologyPresentation subquotient(const Matrix& numerator, const Matrix& denominator);

// A basis of ker M as the columns of a matrix, and one of im M.
Matrix kernel_matrix(const Matrix& m);
Matrix image_basis(const Matrix& m);

HomologyPresentation homology_at(const Matrix& d_in, const Matrix& d_out);

}  // namespace dainf
