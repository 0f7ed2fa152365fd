// Parameter-dependent symbols and their quantization.
//
// x-independent symbols are tables over the discrete frequency lattice and
// quantize as exact Fourier multipliers.  x-dependent symbols are kept in
// separated (band-limited in x) form
//     a(x, xi, gamma) = sum_theta c_theta e^{i theta.x} Q_theta(xi, gamma),
// so quantization is an exact finite sum of multiplier applications; no
// oscillatory quadrature enters the verification chain.

#pragma once

#include <Eigen/Dense>

#include "conormal/core.hpp"

namespace conormal {

// ---------------------------------------------------------------------------
// Closed forms for the weight lambda^{s,gamma} and its xi-derivatives.
// ---------------------------------------------------------------------------
inline double weight_value(double s, double gamma, const double* xi, int n) {
  double q = gamma * gamma;
  for (int a = 0; a < n; ++a) q += xi[a] * xi[a];
  return std::pow(q, 0.5 * s);
}
inline double weight_deriv1(double s, double gamma, const double* xi, int n,
                            int j) {
  double q = gamma * gamma;
  for (int a = 0; a < n; ++a) q += xi[a] * xi[a];
  return s * xi[j] * std::pow(q, 0.5 * s - 1.0);
}
inline double weight_deriv2(double s, double gamma, const double* xi, int n,
                            int i, int j) {
  double q = gamma * gamma;
  for (int a = 0; a < n; ++a) q += xi[a] * xi[a];
  const double lead = (i == j) ? s * std::pow(q, 0.5 * s - 1.0) : 0.0;
  return lead + s * (s - 2.0) * xi[i] * xi[j] * std::pow(q, 0.5 * s - 2.0);
}

// ---------------------------------------------------------------------------
// MultiplierSymbol: x-independent symbol table over a frequency lattice,
// with an optional off-grid evaluator (used by the semi-norm probes).
// ---------------------------------------------------------------------------
class MultiplierSymbol {
 public:
  MultiplierSymbol() = default;
  MultiplierSymbol(double order, double gamma, Lattice lat,
                   std::vector<cplx> table)
      : order_(order), gamma_(gamma), lat_(std::move(lat)),
        table_(std::move(table)) {}

  double order() const { return order_; }
  double gamma() const { return gamma_; }
  const Lattice& lattice() const { return lat_; }
  const std::vector<cplx>& table() const { return table_; }
  std::vector<cplx>& table() { return table_; }
  cplx at(std::ptrdiff_t i) const { return table_[i]; }

  bool has_evaluator() const { return static_cast<bool>(eval_); }
  void set_evaluator(std::function<cplx(const double* xi)> f) {
    eval_ = std::move(f);
  }
  cplx evaluate(const double* xi) const { return eval_(xi); }

  // Pointwise algebra of tables (orders add / combine as stated).
  MultiplierSymbol pointwise_product(const MultiplierSymbol& o) const;
  MultiplierSymbol pointwise_difference(const MultiplierSymbol& o) const;

 private:
  double order_ = 0.0;
  double gamma_ = 1.0;
  Lattice lat_;
  std::vector<cplx> table_;
  std::function<cplx(const double* xi)> eval_;
};

// lambda^{s,gamma} sampled on the lattice frequencies (exact closed form).
MultiplierSymbol weight_symbol(const Lattice& lat, double s, double gamma);

// Constant symbol c (order 0).
MultiplierSymbol constant_symbol(const Lattice& lat, cplx c, double gamma);

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

// F^{-1}(a . F v), exact for the discrete transform pair.
FullSpaceField apply_multiplier(const FullSpaceField& v,
                                const MultiplierSymbol& a);
BoundaryField apply_multiplier(const BoundaryField& v,
                               const MultiplierSymbol& a);

// Conormal quantization: sharp-conjugated multiplier.  The support
// admissibility check is skipped (composed operators act on already-spread
// fields); left-edge decay of the result is still verified.
HalfSpaceField op_conormal(const HalfSpaceField& u, const MultiplierSymbol& a);

// ---------------------------------------------------------------------------
// SeparatedSymbol
// ---------------------------------------------------------------------------
struct SymbolMode {
  std::vector<double> theta;   // a lattice frequency vector
  Eigen::MatrixXcd coeff;      // rows x cols
  MultiplierSymbol mult;       // Q_theta
};

class SeparatedSymbol {
 public:
  SeparatedSymbol() = default;
  SeparatedSymbol(double order, double gamma, int rows, int cols,
                  std::vector<SymbolMode> modes)
      : order_(order), gamma_(gamma), rows_(rows), cols_(cols),
        modes_(std::move(modes)) {}

  double order() const { return order_; }
  double gamma() const { return gamma_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<SymbolMode>& modes() const { return modes_; }

  // Entry (r,c) of a(x, xi, gamma); needs every mode to carry an evaluator.
  cplx evaluate(const double* x, const double* xi, int r, int c) const;

  bool conjugate_paired(double tol = 1e-12) const;

 private:
  double order_ = 0.0;
  double gamma_ = 1.0;
  int rows_ = 1, cols_ = 1;
  std::vector<SymbolMode> modes_;
};

// Quantization of a separated symbol: the field components are the symbol
// columns; the result has `rows` components.  Interior x = (t, x').
HalfSpaceField apply_separated(const HalfSpaceField& u,
                               const SeparatedSymbol& a);
BoundaryField apply_separated(const BoundaryField& u,
                              const SeparatedSymbol& a);

// ---------------------------------------------------------------------------
// Semi-norm estimation (Frechet semi-norms of a symbol, measured).
// ---------------------------------------------------------------------------
struct SymbolProbe {
  int dim = 2;          // xi dimension
  bool x_dependent = false;
  int x_dim = 0;
  // (x, xi, gamma) -> value; x may be null when !x_dependent.
  std::function<cplx(const double* x, const double* xi, double gamma)> f;
};

struct SemiNormEntry {
  std::vector<int> alpha;          // xi multi-index
  std::vector<int> beta;           // x multi-index
  double sup = 0.0;                // over all samples and gamma
  std::vector<double> per_gamma;   // sup per sweep value
};

struct SemiNormReport {
  double order = 0.0;
  int max_k = 0;
  std::vector<double> sweep;
  std::vector<SemiNormEntry> entries;

  // |a|_{m,k}: max entry with |alpha|+|beta| <= k.
  double value(int k) const;
  // Worst relative spread of per-gamma sups over entries with
  // |alpha|+|beta| <= k (0 = perfectly gamma-stable).
  double gamma_drift(int k) const;
  // Every entry up to k is uniformly bounded across the sweep (see
  // drift_pass for the acceptance rule).
  bool gamma_stable(int k, double tol) const;
};

struct SeminormSampling {
  std::vector<double> sweep = {1, 2, 4, 8, 16, 32, 64};
  double xi_max = 24.0;            // outermost shell radius
  int directions = 4;              // xi directions per shell
  std::vector<std::vector<double>> x_points;  // for x-dependent symbols
  double fd_step = 0.04;           // base step; spec: grid spacing / 4
};

// Central finite differences of 4th order; k <= 4 (step/rounding budget).
SemiNormReport estimate_seminorm(const SymbolProbe& a, double m, int k,
                                 const SeminormSampling& sampling);

// Probe adapters.
SymbolProbe probe_weight(int dim, double s);
SymbolProbe probe_from_evaluator(
    int dim, std::function<cplx(const double* xi, double gamma)> f);

}  // namespace conormal
