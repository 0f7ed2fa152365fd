// Frequency mollification of the weight family.
//
// chi(D) lambda^{m,gamma} is realized discretely: lambda is sampled on an
// extended frequency box (same frequency spacing as the field grid, several
// times the extent), transformed to the dual kernel domain where the cutoff
// chi truncates it to |y| <= eps0, and transformed back.  The field-grid
// table is the restriction of the extended one, so the operator it defines
// has a kernel supported in the chi ball up to the extension's leakage.
// r_m := lambda - lambda_chi pointwise on the same tables.

#pragma once

#include <map>

#include "conormal/symbols.hpp"

namespace conormal {

// ---------------------------------------------------------------------------
// CutoffSpec
// ---------------------------------------------------------------------------
struct CutoffSpec {
  int n = 2;
  double delta0 = 0.45;
  double eps0 = 0.0;

  double plateau() const { return 0.5 * eps0; }          // chi = 1 inside
  double support1d() const { return eps0 / std::sqrt(n); }  // per-axis support

  // One-dimensional even profile shared by the normal and tangential factors.
  double profile(double s) const;
  double profile_deriv(double s) const;
  double profile_deriv2(double s) const;

  // Tensor product chi(y) = prod_a profile(y_a) and its axis derivatives.
  double chi(const double* y) const;
  double chi_axis_deriv(const double* y, int axis) const;
};

// eps0 = safety * min(log(1/delta0), 1 - delta0); rejects n >= 4 (the tensor
// construction meets the Euclidean-ball conditions only for n = 2, 3).
CutoffSpec build_cutoff(double delta0, int n, double safety = 0.9);

// Unvalidated variant for negative controls (oversized eps0).
CutoffSpec make_cutoff_unchecked(double delta0, int n, double eps0);

// ---------------------------------------------------------------------------
// Extended quadrature lattice: same frequency spacing as the field grid,
// `factor[a]` times the extent per axis; spatial side centered at the origin
// (the kernel domain).
// ---------------------------------------------------------------------------
Lattice extended_symbol_lattice(const HalfSpaceGrid& grid,
                                const std::vector<int>& factors);
std::vector<int> default_extension_factors(const HalfSpaceGrid& grid);

// Kernel pack: the truncated dual-domain samples defining a symbol table,
// kept for off-grid evaluation and the direct trace quadrature.
struct KernelPack {
  std::vector<std::vector<double>> y;  // y[a][p], per axis coordinates
  std::vector<cplx> w;                 // weight incl. cell volume
  int dim() const { return static_cast<int>(y.size()); }
  std::ptrdiff_t size() const { return static_cast<std::ptrdiff_t>(w.size()); }
  // sum_p w_p e^{-i xi . y_p}; entire in xi.
  cplx evaluate(const double* xi) const;
};

// ---------------------------------------------------------------------------
// MollifiedWeight
// ---------------------------------------------------------------------------
struct MollifiedWeight {
  double order = 0.0;
  double gamma = 1.0;
  MultiplierSymbol chi_table;  // lambda^{m,gamma}_chi on the field lattice
  MultiplierSymbol rem_table;  // r_m on the field lattice
  std::shared_ptr<const KernelPack> kernel;  // chi-truncated weight kernel
  double tail_leak = 0.0;  // relative kernel mass at the chi support edge
};

MollifiedWeight mollified_weight(const HalfSpaceGrid& grid, double m,
                                 double gamma, const CutoffSpec& cut,
                                 std::vector<int> factors = {});

// ---------------------------------------------------------------------------
// BoundarySymbol: the trace symbol of lambda_chi(Z) and its splitting
// b'_m = lambda^{m,gamma}(xi') + beta_m.
// ---------------------------------------------------------------------------
struct BoundarySymbol {
  double order = 0.0;
  double gamma = 1.0;
  MultiplierSymbol bprime;  // on the boundary lattice
  MultiplierSymbol beta;    // b' - lambda^{m,gamma}(xi')
  double tail_estimate = 0.0;
};

BoundarySymbol boundary_symbol(const HalfSpaceGrid& grid, double m,
                               double gamma, const CutoffSpec& cut);

BoundaryField boundary_trace_apply(const BoundaryField& psi,
                                   const BoundarySymbol& b);

// Independent evaluation of beta_m by the order-two Taylor-remainder
// quadrature, at selected boundary frequencies.
std::vector<double> boundary_remainder_taylor(const HalfSpaceGrid& grid,
                                              double m, double gamma,
                                              const CutoffSpec& cut,
                                              const std::vector<double>& xi1d);

// ---------------------------------------------------------------------------
// MollifierBank: cached tables keyed by (m, gamma).
// ---------------------------------------------------------------------------
class MollifierBank {
 public:
  MollifierBank(HalfSpaceGrid grid, CutoffSpec cut,
                std::vector<int> factors = {});

  const HalfSpaceGrid& grid() const { return grid_; }
  const CutoffSpec& cutoff() const { return cut_; }
  const std::vector<int>& factors() const { return factors_; }

  const MollifiedWeight& weight(double m, double gamma);
  const BoundarySymbol& boundary(double m, double gamma);
  const MultiplierSymbol& lambda_interior(double s, double gamma);
  const MultiplierSymbol& lambda_boundary(double s, double gamma);

 private:
  HalfSpaceGrid grid_;
  CutoffSpec cut_;
  std::vector<int> factors_;
  std::map<std::pair<double, double>, MollifiedWeight> weights_;
  std::map<std::pair<double, double>, BoundarySymbol> boundaries_;
  std::map<std::pair<double, double>, MultiplierSymbol> lam_int_;
  std::map<std::pair<double, double>, MultiplierSymbol> lam_bdy_;
};

// lambda_chi(Z) with the trace carried through the boundary symbol; the
// remainder route r_m(Z, gamma) u.
HalfSpaceField apply_mollified(const HalfSpaceField& u, const MollifiedWeight& w,
                               const BoundarySymbol* btrace = nullptr);
HalfSpaceField remainder_apply(const HalfSpaceField& u, MollifierBank& bank,
                               double m, double gamma);

// ---------------------------------------------------------------------------
// Verification helpers
// ---------------------------------------------------------------------------
struct DecayReport {
  std::vector<double> gammas;
  std::vector<double> ratios;   // ||r_m(Z,gamma)u||_{H^p_tan,gamma} / ||u||_L2
  double slope = 0.0;           // log-log least squares over gamma in [4, 64]
  bool degenerate = false;      // u == 0
  bool pass = false;            // slope <= -3
};

DecayReport verify_smoothing_decay(const HalfSpaceField& u, MollifierBank& bank,
                                   double m, int p,
                                   const std::vector<double>& sweep);

struct SupportReport {
  double mass_outside = 0.0;  // relative L2 mass outside B+
  bool pass = false;          // <= 1e-6
};

SupportReport verify_support_preservation(const HalfSpaceField& u,
                                          MollifierBank& bank, double m,
                                          double gamma);

// Two independent routes to the boundary value of lambda_chi(Z)u: the direct
// kernel quadrature at x1 = 0 (closed-form trace required) against the
// boundary multiplier b'_m(D'). Returns the relative L2 difference.
double verify_trace_identity(const HalfSpaceField& u, MollifierBank& bank,
                             double m, double gamma);

// Least-squares slope of log(ratio) vs log(gamma) restricted to [glo, ghi].
double loglog_slope(const std::vector<double>& gammas,
                    const std::vector<double>& ratios, double glo, double ghi);

}  // namespace conormal
