// Core grids, fields and transforms for the half-space conormal calculus.
//
// Half-space functions are sampled in logarithmic normal coordinates:
// a point (x1, x') of R^n_+ is represented by (t, x') with x1 = e^t, on a
// periodic box [-L1, l1) x [-L', L')^{n-1}.  The lift
//     u^sharp(t, x') = u(e^t, x') e^{t/2}
// maps L^2(R^n_+) isometrically onto L^2 of the box, and every tangential
// operator in the calculus becomes a Fourier multiplier there.

#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace conormal {

using cplx = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Lattice: uniform periodic sampling lattice in d dimensions.
// Index k along an axis carries the wrapped wavenumber freq(axis, k).
// ---------------------------------------------------------------------------
class Lattice {
 public:
  Lattice() = default;
  Lattice(std::vector<int> size, std::vector<double> origin,
          std::vector<double> step)
      : size_(std::move(size)), origin_(std::move(origin)),
        step_(std::move(step)) {
    assert(size_.size() == origin_.size() && size_.size() == step_.size());
  }

  int dim() const { return static_cast<int>(size_.size()); }
  int extent(int a) const { return size_[a]; }
  const std::vector<int>& extents() const { return size_; }
  double step(int a) const { return step_[a]; }
  double origin(int a) const { return origin_[a]; }
  double length(int a) const { return step_[a] * size_[a]; }

  std::ptrdiff_t count() const {
    std::ptrdiff_t c = 1;
    for (int s : size_) c *= s;
    return c;
  }

  double coord(int a, int i) const { return origin_[a] + step_[a] * i; }

  // Dual lattice spacing and wrapped wavenumber of index k along axis a.
  double freq_step(int a) const { return 2.0 * kPi / length(a); }
  double freq(int a, int k) const {
    const int half = size_[a] / 2;
    const int w = (k < half) ? k : k - size_[a];
    return freq_step(a) * w;
  }
  double nyquist(int a) const { return freq_step(a) * (size_[a] / 2); }

  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= step_[a];
    return v;
  }
  double freq_cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= freq_step(a);
    return v;
  }

  void unravel(std::ptrdiff_t flat, int* idx) const {
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(flat % size_[a]);
      flat /= size_[a];
    }
  }
  std::ptrdiff_t ravel(const int* idx) const {
    std::ptrdiff_t flat = 0;
    for (int a = 0; a < dim(); ++a) flat = flat * size_[a] + idx[a];
    return flat;
  }

  bool operator==(const Lattice& o) const {
    return size_ == o.size_ && origin_ == o.origin_ && step_ == o.step_;
  }

 private:
  std::vector<int> size_;
  std::vector<double> origin_;
  std::vector<double> step_;
};

// ---------------------------------------------------------------------------
// GridArray: complex samples over a lattice.
// ---------------------------------------------------------------------------
class GridArray {
 public:
  GridArray() = default;
  explicit GridArray(Lattice lat)
      : lat_(std::move(lat)), v_(lat_.count(), cplx(0.0, 0.0)) {}
  GridArray(Lattice lat, std::vector<cplx> values)
      : lat_(std::move(lat)), v_(std::move(values)) {
    assert(static_cast<std::ptrdiff_t>(v_.size()) == lat_.count());
  }

  const Lattice& lattice() const { return lat_; }
  std::ptrdiff_t size() const { return static_cast<std::ptrdiff_t>(v_.size()); }
  cplx& operator[](std::ptrdiff_t i) { return v_[i]; }
  const cplx& operator[](std::ptrdiff_t i) const { return v_[i]; }
  cplx* data() { return v_.data(); }
  const cplx* data() const { return v_.data(); }

  GridArray& operator+=(const GridArray& o) {
    assert(size() == o.size());
    for (std::ptrdiff_t i = 0; i < size(); ++i) v_[i] += o.v_[i];
    return *this;
  }
  GridArray& operator-=(const GridArray& o) {
    assert(size() == o.size());
    for (std::ptrdiff_t i = 0; i < size(); ++i) v_[i] -= o.v_[i];
    return *this;
  }
  GridArray& operator*=(cplx c) {
    for (auto& x : v_) x *= c;
    return *this;
  }

  friend GridArray operator+(GridArray a, const GridArray& b) { return a += b; }
  friend GridArray operator-(GridArray a, const GridArray& b) { return a -= b; }
  friend GridArray operator*(cplx c, GridArray a) { return a *= c; }

  double max_abs() const {
    double m = 0.0;
    for (const auto& x : v_) m = std::max(m, std::abs(x));
    return m;
  }
  // L2 norm with the lattice cell volume as quadrature weight.
  double l2() const {
    double s = 0.0;
    for (const auto& x : v_) s += std::norm(x);
    return std::sqrt(s * lat_.cell_volume());
  }

 private:
  Lattice lat_;
  std::vector<cplx> v_;
};

// ---------------------------------------------------------------------------
// Fft: cached FFTW plans, with the scalings of the continuous transform pair
//   forward:  v(xi_k) = h^n sum_j u(x_j) e^{-i xi_k . x_j}
//   backward: u(x_j)  = (2pi)^{-n} dxi^n sum_k v(xi_k) e^{+i xi_k . x_j}
// Phases account for the lattice origin, so tables built from closed forms in
// xi pair exactly with the sampled transforms.  Plans use FFTW_ESTIMATE so
// plan selection (and hence round-off) is reproducible run to run.
// ---------------------------------------------------------------------------
class Fft {
 public:
  static GridArray forward(const GridArray& u);
  static GridArray backward(const GridArray& v);

 private:
  static void raw(const Lattice& lat, const cplx* in, cplx* out, int sign);
};

// ---------------------------------------------------------------------------
// HalfSpaceGrid
// ---------------------------------------------------------------------------
struct HalfSpaceGrid {
  int n = 2;                     // space dimension (2 or 3)
  double left_log = 44.0;        // L1: log box is [-L1, l1)
  double right_log = 4.0;        // l1
  double half_width = 2.0;       // L': tangential box [-L', L')^{n-1}
  std::vector<int> sizes;        // points per axis, powers of two
  double delta0 = 0.45;          // support radius of admissible inputs
  double trunc_tol = 2e-7;       // admissible truncation error e^{-L1/2}

  static HalfSpaceGrid default2d();
  static HalfSpaceGrid smoke3d();

  void validate() const;

  // Interior lattice in log coordinates (t, x').
  Lattice interior() const {
    std::vector<double> org(n), stp(n);
    org[0] = -left_log;
    stp[0] = (left_log + right_log) / sizes[0];
    for (int a = 1; a < n; ++a) {
      org[a] = -half_width;
      stp[a] = 2.0 * half_width / sizes[a];
    }
    return Lattice(sizes, org, stp);
  }
  // Boundary lattice in x'.
  Lattice boundary() const {
    std::vector<int> sz(sizes.begin() + 1, sizes.end());
    std::vector<double> org(n - 1, -half_width);
    std::vector<double> stp(n - 1);
    for (int a = 0; a < n - 1; ++a) stp[a] = 2.0 * half_width / sizes[a + 1];
    return Lattice(sz, org, stp);
  }

  bool operator==(const HalfSpaceGrid& o) const {
    return n == o.n && left_log == o.left_log && right_log == o.right_log &&
           half_width == o.half_width && sizes == o.sizes &&
           delta0 == o.delta0;
  }
};

// ---------------------------------------------------------------------------
// SmoothField: closed-form generator of an N-component smooth function on the
// half-space, with exact first derivatives and boundary restriction.
// ---------------------------------------------------------------------------
class SmoothField {
 public:
  virtual ~SmoothField() = default;
  virtual int components() const = 0;
  // x = (x1, x') in physical coordinates, x1 >= 0.
  virtual cplx value(int comp, const double* x) const = 0;
  virtual cplx deriv(int comp, int axis, const double* x) const = 0;
};

using SmoothFieldPtr = std::shared_ptr<const SmoothField>;

// ---------------------------------------------------------------------------
// BoundaryField: d-component periodic samples over the boundary lattice.
// ---------------------------------------------------------------------------
class BoundaryField {
 public:
  BoundaryField() = default;
  BoundaryField(Lattice lat, int comps)
      : lat_(std::move(lat)), comp_(comps, GridArray(lat_)) {}
  BoundaryField(Lattice lat, std::vector<GridArray> comps)
      : lat_(std::move(lat)), comp_(std::move(comps)) {}

  const Lattice& lattice() const { return lat_; }
  int components() const { return static_cast<int>(comp_.size()); }
  GridArray& comp(int c) { hat_.clear(); return comp_[c]; }
  const GridArray& comp(int c) const { return comp_[c]; }

  // Frequency-domain view, cached.
  const GridArray& hat(int c) const;

  double l2() const {
    double s = 0.0;
    for (const auto& g : comp_) { double v = g.l2(); s += v * v; }
    return std::sqrt(s);
  }

  BoundaryField& operator+=(const BoundaryField& o);
  BoundaryField& operator-=(const BoundaryField& o);
  BoundaryField& operator*=(cplx c);
  friend BoundaryField operator+(BoundaryField a, const BoundaryField& b) { return a += b; }
  friend BoundaryField operator-(BoundaryField a, const BoundaryField& b) { return a -= b; }
  friend BoundaryField operator*(cplx c, BoundaryField a) { return a *= c; }

  // Components [lo, hi) as a new field.
  BoundaryField slice(int lo, int hi) const;

 private:
  Lattice lat_;
  std::vector<GridArray> comp_;
  mutable std::vector<GridArray> hat_;
};

// ---------------------------------------------------------------------------
// FullSpaceField: periodic samples over the interior lattice (the sharp side).
// ---------------------------------------------------------------------------
class FullSpaceField {
 public:
  FullSpaceField() = default;
  FullSpaceField(Lattice lat, int comps)
      : lat_(std::move(lat)), comp_(comps, GridArray(lat_)) {}
  FullSpaceField(Lattice lat, std::vector<GridArray> comps)
      : lat_(std::move(lat)), comp_(std::move(comps)) {}

  const Lattice& lattice() const { return lat_; }
  int components() const { return static_cast<int>(comp_.size()); }
  GridArray& comp(int c) { hat_.clear(); return comp_[c]; }
  const GridArray& comp(int c) const { return comp_[c]; }

  const GridArray& hat(int c) const;

  double l2() const {
    double s = 0.0;
    for (const auto& g : comp_) { double v = g.l2(); s += v * v; }
    return std::sqrt(s);
  }

  FullSpaceField& operator+=(const FullSpaceField& o);
  FullSpaceField& operator-=(const FullSpaceField& o);
  FullSpaceField& operator*=(cplx c);
  friend FullSpaceField operator+(FullSpaceField a, const FullSpaceField& b) { return a += b; }
  friend FullSpaceField operator-(FullSpaceField a, const FullSpaceField& b) { return a -= b; }
  friend FullSpaceField operator*(cplx c, FullSpaceField a) { return a *= c; }

 private:
  Lattice lat_;
  std::vector<GridArray> comp_;
  mutable std::vector<GridArray> hat_;
};

// ---------------------------------------------------------------------------
// HalfSpaceField: N-component samples of u over the half-space grid, stored in
// log coordinates (value at node (t, x') is u(e^t, x')).  Optionally carries
// the closed-form generator and the exact boundary restriction; traces are
// never obtained by grid extrapolation.
// ---------------------------------------------------------------------------
class HalfSpaceField {
 public:
  HalfSpaceField() = default;
  HalfSpaceField(HalfSpaceGrid grid, int comps)
      : grid_(std::move(grid)),
        comp_(comps, GridArray(grid_.interior())) {}
  HalfSpaceField(HalfSpaceGrid grid, std::vector<GridArray> comps)
      : grid_(std::move(grid)), comp_(std::move(comps)) {}

  static HalfSpaceField from_generator(const HalfSpaceGrid& grid,
                                       SmoothFieldPtr gen);

  const HalfSpaceGrid& grid() const { return grid_; }
  int components() const { return static_cast<int>(comp_.size()); }
  GridArray& comp(int c) { return comp_[c]; }
  const GridArray& comp(int c) const { return comp_[c]; }

  const SmoothFieldPtr& generator() const { return gen_; }
  void set_generator(SmoothFieldPtr g) { gen_ = std::move(g); }

  bool has_trace() const { return trace_.components() > 0; }
  const BoundaryField& trace() const { return trace_; }
  void set_trace(BoundaryField tr) { trace_ = std::move(tr); }

  // L2(R^n_+) norm: the e^t Jacobian of the log substitution is the
  // quadrature weight, so this equals the L2 norm of the sharp lift.
  double l2() const;

  // Relative L2 mass outside B+_{delta} = {x1 < delta, |x'| < delta}.
  double mass_outside(double delta) const;
  // Relative L2 mass outside the unit half-cylinder B+ (delta = 1).
  double mass_outside_unit() const { return mass_outside(1.0); }

  HalfSpaceField& operator+=(const HalfSpaceField& o);
  HalfSpaceField& operator-=(const HalfSpaceField& o);
  HalfSpaceField& operator*=(cplx c);
  friend HalfSpaceField operator+(HalfSpaceField a, const HalfSpaceField& b) { return a += b; }
  friend HalfSpaceField operator-(HalfSpaceField a, const HalfSpaceField& b) { return a -= b; }
  friend HalfSpaceField operator*(cplx c, HalfSpaceField a) { return a *= c; }

  // Components [lo, hi) as a new field (trace sliced alongside).
  HalfSpaceField slice(int lo, int hi) const;
  // Pad back to `total` components, placing this block at offset `at`.
  HalfSpaceField embed(int total, int at) const;

 private:
  HalfSpaceGrid grid_;
  std::vector<GridArray> comp_;
  SmoothFieldPtr gen_;
  BoundaryField trace_;
};

// ---------------------------------------------------------------------------
// Transforms
// ---------------------------------------------------------------------------

// u^sharp(t,x') = u(e^t,x') e^{t/2}; rejects fields with relative mass
// outside B+_{delta0} above `support_tol` (the truncation guarantee fails
// for such inputs).  Pass support_tol <= 0 to skip the admissibility check.
FullSpaceField sharp_transform(const HalfSpaceField& u,
                               double support_tol = 1e-9);

// Spectral d/dx along one axis of a periodic array.
GridArray spectral_derivative(const GridArray& g, int axis);

// a^natural(t,x') = a(e^t,x') for a closed-form coefficient.
GridArray natural_samples(const HalfSpaceGrid& grid, const SmoothField& a,
                          int comp);

// Inverse of sharp: u(e^t,x') = v(t,x') e^{-t/2}.  Flags (via the returned
// flag) a loss of accuracy when v does not decay at the left edge.
HalfSpaceField sharp_inverse(const HalfSpaceGrid& grid,
                             const FullSpaceField& v,
                             bool* decay_ok = nullptr);

// Conormal derivative Z_j via sharp conjugation; spectral differentiation on
// the periodic box.  Z_1 u = x1 d1 u, Z_j = d_j for j >= 2.
//
// With normal_flag and j == 1 this returns the true normal derivative
// d1 u = x1^{-1} Z1 u.  Division by x1 = e^t amplifies round-off and the
// periodic seam at the left edge, so the boundary layer is handled by
// subtracting trace(x') * tau(x1) (tau a fixed plateau profile) before
// differentiating and adding its closed-form derivative back.  Requires the
// field to carry a generator or an exact trace.
HalfSpaceField conormal_derivative(const HalfSpaceField& u, int j,
                                   bool normal_flag = false);

// Step profile used for the boundary-layer split, and its derivative:
// tau(0+) = 1, tau < 1e-14 for x1 >= 0.9 delta0, analytic in log x1.
double tail_profile(double x1, double delta0);
double tail_profile_deriv(double x1, double delta0);

// Depth below which computed normal derivatives are not representable (the
// x1^{-1} factor amplifies the spectral round-off floor past the signal).
inline double normal_derivative_floor(const HalfSpaceGrid& g) {
  return -g.left_log + 20.0;
}

// Relative L2(R^n_+) difference of two fields, restricted to x1 >= e^{t_floor}.
// Residuals of identities that involve normal derivatives of computed fields
// are measured on this truncated domain; the continuum residual vanishes
// identically, so only representable error is excluded.
double relative_residual_above(const HalfSpaceField& a, const HalfSpaceField& b,
                               double t_floor);

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------
enum class NormKind {
  full_sobolev,        // ||.||_{s,gamma} on R^n (FullSpaceField)
  boundary_sobolev,    // same on R^{n-1} (BoundaryField)
  conormal_spectral,   // ||lambda^{s,gamma}(xi) F(u^sharp)|| (HalfSpaceField)
  conormal_derivative, // sum_{|a|<=m} gamma^{2(m-|a|)} ||Z^a u||^2
  anisotropic,         // sum_{|a|+2k<=m} gamma^{2(m-|a|-2k)} ||Z^a d1^k u||^2
};

struct NormSpec {
  NormKind kind = NormKind::conormal_spectral;
  double order = 0.0;
  double gamma = 1.0;

  NormSpec() = default;
  NormSpec(NormKind k, double s, double g) : kind(k), order(s), gamma(g) {
    if (g < 1.0) throw std::invalid_argument("NormSpec: gamma must be >= 1");
    if ((k == NormKind::conormal_derivative || k == NormKind::anisotropic) &&
        (s < 0.0 || s != std::floor(s)))
      throw std::invalid_argument(
          "NormSpec: derivative/anisotropic kinds need integer order >= 0");
  }
};

// The parameter weight lambda^{s,gamma}(xi) = (gamma^2 + |xi|^2)^{s/2}.
inline double sobolev_weight(double s, double gamma, double xi_sq) {
  return std::pow(gamma * gamma + xi_sq, 0.5 * s);
}

double norm(const FullSpaceField& v, const NormSpec& spec);
double norm(const BoundaryField& v, const NormSpec& spec);
double norm(const HalfSpaceField& u, const NormSpec& spec);

// Shorthands used throughout the estimate chain.
double htan_norm(const HalfSpaceField& u, double s, double gamma);   // spectral
double hb_norm(const BoundaryField& v, double s, double gamma);      // boundary

}  // namespace conormal
