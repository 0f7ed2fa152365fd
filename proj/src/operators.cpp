#include "conormal/operators.hpp"

namespace conormal {

MatrixField MatrixField::from_generator(const HalfSpaceGrid& grid, int rows,
                                        int cols, const SmoothField& entries) {
  if (entries.components() != rows * cols)
    throw std::invalid_argument("MatrixField: generator component count");
  MatrixField out(grid, rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      out.entry(r, c) = natural_samples(grid, entries, r * cols + c);
  out.allocate_boundary();
  const Lattice blat = grid.boundary();
  std::vector<int> idx(blat.dim());
  std::vector<double> x(grid.n, 0.0);
  for (std::ptrdiff_t i = 0; i < blat.count(); ++i) {
    blat.unravel(i, idx.data());
    for (int a = 0; a < blat.dim(); ++a) x[a + 1] = blat.coord(a, idx[a]);
    x[0] = 0.0;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c)
        out.boundary_entry(r, c)[i] = entries.value(r * cols + c, x.data());
  }
  return out;
}

HalfSpaceField MatrixField::apply(const HalfSpaceField& u) const {
  if (u.components() != cols_)
    throw std::invalid_argument("MatrixField::apply: component mismatch");
  HalfSpaceField out(grid_, rows_);
  const std::ptrdiff_t npts = grid_.interior().count();
  for (int r = 0; r < rows_; ++r) {
    GridArray& dst = out.comp(r);
    for (int c = 0; c < cols_; ++c) {
      const GridArray& a = entry(r, c);
      const GridArray& src = u.comp(c);
      for (std::ptrdiff_t i = 0; i < npts; ++i) dst[i] += a[i] * src[i];
    }
  }
  if (u.has_trace() && has_boundary()) {
    BoundaryField tr(grid_.boundary(), rows_);
    const std::ptrdiff_t nb = grid_.boundary().count();
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) {
        const GridArray& a = boundary_entry(r, c);
        const GridArray& src = u.trace().comp(c);
        for (std::ptrdiff_t i = 0; i < nb; ++i) tr.comp(r)[i] += a[i] * src[i];
      }
    out.set_trace(std::move(tr));
  }
  return out;
}

MatrixField MatrixField::pointwise_inverse(double margin) const {
  if (rows_ != cols_)
    throw std::invalid_argument("pointwise_inverse: square blocks only");
  MatrixField out(grid_, rows_, cols_);
  const std::ptrdiff_t npts = grid_.interior().count();
  Eigen::MatrixXcd a(rows_, cols_);
  for (std::ptrdiff_t i = 0; i < npts; ++i) {
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) a(r, c) = entry(r, c)[i];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU |
                                                  Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < margin)
      throw std::runtime_error(
          "pointwise_inverse: invertibility margin violated");
    const Eigen::MatrixXcd inv = a.inverse();
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out.entry(r, c)[i] = inv(r, c);
  }
  return out;
}

double MatrixField::min_singular_value() const {
  const std::ptrdiff_t npts = grid_.interior().count();
  Eigen::MatrixXcd a(rows_, cols_);
  double smin = 1e300;
  for (std::ptrdiff_t i = 0; i < npts; ++i) {
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) a(r, c) = entry(r, c)[i];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    smin = std::min(smin, svd.singularValues().minCoeff());
  }
  return smin;
}

double MatrixField::max_abs_near_boundary() const {
  // row of nodes with the smallest x1 (deepest log coordinate)
  const Lattice lat = grid_.interior();
  std::vector<int> idx(lat.dim());
  double m = 0.0;
  for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
    lat.unravel(i, idx.data());
    if (idx[0] != 0) continue;
    for (const auto& g : entries_) m = std::max(m, std::abs(g[i]));
  }
  return m;
}

MatrixField MatrixField::block(int r0, int c0, int nr, int nc) const {
  MatrixField out(grid_, nr, nc);
  for (int r = 0; r < nr; ++r)
    for (int c = 0; c < nc; ++c) out.entry(r, c) = entry(r0 + r, c0 + c);
  if (has_boundary()) {
    out.allocate_boundary();
    for (int r = 0; r < nr; ++r)
      for (int c = 0; c < nc; ++c)
        out.boundary_entry(r, c) = boundary_entry(r0 + r, c0 + c);
  }
  return out;
}

BoundaryField BoundaryMatrix::apply(const BoundaryField& v) const {
  if (v.components() != cols_)
    throw std::invalid_argument("BoundaryMatrix::apply: component mismatch");
  BoundaryField out(lat_, rows_);
  const std::ptrdiff_t npts = lat_.count();
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) {
      const GridArray& a = entry(r, c);
      const GridArray& src = v.comp(c);
      for (std::ptrdiff_t i = 0; i < npts; ++i) out.comp(r)[i] += a[i] * src[i];
    }
  return out;
}

// Relative spread of the per-gamma constants with respect to the larger one.
double report_drift(const std::vector<double>& constants) {
  double lo = 1e300, hi = 0.0;
  for (double c : constants) {
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  return (lo > 0.0 && hi > 0.0) ? (hi - lo) / hi : 0.0;
}

// "Gamma-stable" means uniformly bounded across the sweep: either the
// spread stays within tol, or the top of the sweep does not set a new
// maximum (the profile may wander or saturate, but must not trend upward).
bool drift_pass(const std::vector<double>& constants, double tol) {
  if (report_drift(constants) <= tol) return true;
  if (constants.size() < 2) return false;
  double earlier = 0.0;
  for (size_t i = 0; i + 1 < constants.size(); ++i)
    earlier = std::max(earlier, constants[i]);
  return constants.back() <= (1.0 + 0.5 * tol) * earlier;
}

ConstantReport boundedness_probe(
    const std::vector<double>& sweep,
    const std::function<HalfSpaceField(const HalfSpaceField&, double)>& op,
    double order, double s, const std::vector<HalfSpaceField>& samples,
    double drift_tol) {
  if (samples.empty())
    throw std::invalid_argument("boundedness_probe: empty sample set");
  ConstantReport rep;
  for (double g : sweep) {
    double sup = 0.0;
    for (const auto& v : samples) {
      const double den = htan_norm(v, s + order, g);
      if (den == 0.0) continue;
      sup = std::max(sup, htan_norm(op(v, g), s, g) / den);
    }
    rep.gammas.push_back(g);
    rep.constants.push_back(sup);
  }
  rep.drift = report_drift(rep.constants);
  rep.pass = drift_pass(rep.constants, drift_tol);
  return rep;
}

ConstantReport boundedness_probe_boundary(
    const std::vector<double>& sweep,
    const std::function<BoundaryField(const BoundaryField&, double)>& op,
    double order, double s, const std::vector<BoundaryField>& samples,
    double drift_tol) {
  if (samples.empty())
    throw std::invalid_argument("boundedness_probe: empty sample set");
  ConstantReport rep;
  for (double g : sweep) {
    double sup = 0.0;
    for (const auto& v : samples) {
      const double den = hb_norm(v, s + order, g);
      if (den == 0.0) continue;
      sup = std::max(sup, hb_norm(op(v, g), s, g) / den);
    }
    rep.gammas.push_back(g);
    rep.constants.push_back(sup);
  }
  rep.drift = report_drift(rep.constants);
  rep.pass = drift_pass(rep.constants, drift_tol);
  return rep;
}

}  // namespace conormal
