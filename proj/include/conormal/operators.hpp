// Pointwise matrix coefficients and compositional operator algebra.

#pragma once

#include <Eigen/Dense>

#include "conormal/core.hpp"

namespace conormal {

using FieldOp = std::function<HalfSpaceField(const HalfSpaceField&)>;
using BoundaryOp = std::function<BoundaryField(const BoundaryField&)>;

inline FieldOp compose(FieldOp a, FieldOp b) {
  return [a = std::move(a), b = std::move(b)](const HalfSpaceField& u) {
    return a(b(u));
  };
}
inline FieldOp commutator_op(FieldOp a, FieldOp b) {
  return [a = std::move(a), b = std::move(b)](const HalfSpaceField& u) {
    return a(b(u)) - b(a(u));
  };
}
inline BoundaryOp compose(BoundaryOp a, BoundaryOp b) {
  return [a = std::move(a), b = std::move(b)](const BoundaryField& u) {
    return a(b(u));
  };
}
inline BoundaryOp commutator_op(BoundaryOp a, BoundaryOp b) {
  return [a = std::move(a), b = std::move(b)](const BoundaryField& u) {
    return a(b(u)) - b(a(u));
  };
}

// ---------------------------------------------------------------------------
// MatrixField: rows x cols coefficient sampled on the interior lattice in
// natural (log) coordinates; optional boundary samples at x1 = 0.  Fields
// multiplied by a coefficient without boundary samples lose their trace.
// ---------------------------------------------------------------------------
class MatrixField {
 public:
  MatrixField() = default;
  MatrixField(HalfSpaceGrid grid, int rows, int cols)
      : grid_(std::move(grid)), rows_(rows), cols_(cols),
        entries_(rows * cols, GridArray(grid_.interior())) {}

  static MatrixField from_generator(const HalfSpaceGrid& grid, int rows,
                                    int cols, const SmoothField& entries);

  const HalfSpaceGrid& grid() const { return grid_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  GridArray& entry(int r, int c) { return entries_[r * cols_ + c]; }
  const GridArray& entry(int r, int c) const { return entries_[r * cols_ + c]; }

  bool has_boundary() const { return !boundary_.empty(); }
  GridArray& boundary_entry(int r, int c) { return boundary_[r * cols_ + c]; }
  const GridArray& boundary_entry(int r, int c) const {
    return boundary_[r * cols_ + c];
  }
  void allocate_boundary() {
    boundary_.assign(rows_ * cols_, GridArray(grid_.boundary()));
  }

  // Pointwise matrix-vector product; input components = cols.
  HalfSpaceField apply(const HalfSpaceField& u) const;

  // Pointwise inverse (rows == cols); throws below the conditioning margin.
  MatrixField pointwise_inverse(double margin) const;

  // Smallest singular value over all grid nodes.
  double min_singular_value() const;

  // Largest |entry| at the boundary nodes, sampling the interior row closest
  // to x1 = 0 (diagnostic for vanishing-block checks, not a trace).
  double max_abs_near_boundary() const;

  MatrixField block(int r0, int c0, int nr, int nc) const;

 private:
  HalfSpaceGrid grid_;
  int rows_ = 0, cols_ = 0;
  std::vector<GridArray> entries_;
  std::vector<GridArray> boundary_;
};

// Boundary coefficient: rows x cols sampled over the boundary lattice.
class BoundaryMatrix {
 public:
  BoundaryMatrix() = default;
  BoundaryMatrix(Lattice blat, int rows, int cols)
      : lat_(std::move(blat)), rows_(rows), cols_(cols),
        entries_(rows * cols, GridArray(lat_)) {}

  const Lattice& lattice() const { return lat_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  GridArray& entry(int r, int c) { return entries_[r * cols_ + c]; }
  const GridArray& entry(int r, int c) const { return entries_[r * cols_ + c]; }

  BoundaryField apply(const BoundaryField& v) const;

 private:
  Lattice lat_;
  int rows_ = 0, cols_ = 0;
  std::vector<GridArray> entries_;
};

// ---------------------------------------------------------------------------
// Operator-norm probe: per sweep gamma, the measured supremum over samples of
//   ||op_gamma v||_{s, gamma} / ||v||_{s + order, gamma}.
// "Stable" means the per-gamma constants drift by at most drift_tol, or
// decrease monotonically (compatible with a uniform bound).
// ---------------------------------------------------------------------------
struct ConstantReport {
  std::vector<double> gammas;
  std::vector<double> constants;
  double drift = 0.0;
  bool pass = false;
};

ConstantReport boundedness_probe(
    const std::vector<double>& sweep,
    const std::function<HalfSpaceField(const HalfSpaceField&, double)>& op,
    double order, double s, const std::vector<HalfSpaceField>& samples,
    double drift_tol);

ConstantReport boundedness_probe_boundary(
    const std::vector<double>& sweep,
    const std::function<BoundaryField(const BoundaryField&, double)>& op,
    double order, double s, const std::vector<BoundaryField>& samples,
    double drift_tol);

double report_drift(const std::vector<double>& constants);
bool drift_pass(const std::vector<double>& constants, double tol);

}  // namespace conormal
