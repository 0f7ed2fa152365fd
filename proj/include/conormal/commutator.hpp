// The normal commutator [lambda_chi(Z), A d1] and its symbol.
//
// For a coefficient A, band-limited in log coordinates, the commutator kernel
//   K(x, y) = (A(x - y) - A(x) e^{-y1}) chi(y)
// separates over the coefficient modes, K(x,y) = sum_theta c_theta e^{i theta.x}
// g_theta(y) with g_theta(y) = (e^{-i theta.y} - e^{-y1}) chi(y).  Since
// K(x, 0) = 0, a Taylor split K = sum_k b_k(x,y) y_k with
//   b_k(x, y) = phi_T(y) Int_0^1 (d_k K)(x, t y) dt
// produces, mode by mode, the convolution symbols
//   Q_{theta,k}(xi) = (2pi)^{-n} Int hat{h}_{theta,k}(eta) d_k lambda^{m,gamma}(xi - eta) deta
// assembled into the order-(m-1) symbol q_m = i sum_k q_{k,m}.

#pragma once

#include "conormal/mollifier.hpp"
#include "conormal/operators.hpp"

namespace conormal {

// ---------------------------------------------------------------------------
// BandLimitedCoefficient: A(x) = c0 + sum_theta c_theta e^{i theta.(t, x')},
// bounded on the half-space, real when modes come in conjugate pairs.
// ---------------------------------------------------------------------------
struct BandLimitedCoefficient {
  enum class Role { invertible_block, vanishing_block };
  Role role = Role::invertible_block;
  int rows = 1, cols = 1;
  Eigen::MatrixXd c0;

  struct Mode {
    std::vector<double> theta;
    Eigen::MatrixXcd coeff;
  };
  std::vector<Mode> modes;

  // Appends amp * cos(theta.x + phase) * M as a conjugate mode pair.
  void add_cosine_mode(const std::vector<double>& theta, double phase,
                       const Eigen::MatrixXd& M);

  bool conjugate_paired(double tol = 1e-12) const;
  Eigen::MatrixXcd eval_log(const double* x) const;  // x = (t, x')
  MatrixField sample(const HalfSpaceGrid& grid) const;
};

// ---------------------------------------------------------------------------
// Kernel and Taylor factors (per coefficient mode).
// ---------------------------------------------------------------------------
struct CommutatorKernel {
  CutoffSpec cut;
  // Mode list mirrors the coefficient (theta = 0 carries c0).
  struct ModeKernel {
    std::vector<double> theta;
    Eigen::MatrixXcd coeff;
  };
  std::vector<ModeKernel> modes;

  // g_theta(y) for mode index q.
  cplx g(int q, const double* y) const;
  // Full kernel K(x, y).
  Eigen::MatrixXcd eval(const double* x, const double* y) const;
  // Taylor factor h_{theta,k}(y) (16-point Gauss-Legendre in t).
  cplx taylor_factor(int q, int k, const double* y) const;
  // phi_T: 1 on |y| <= 2 eps0, 0 beyond 3 eps0.
  double taylor_cutoff(const double* y) const;
};

CommutatorKernel kernel_K(const BandLimitedCoefficient& coef,
                          const CutoffSpec& cut);

// Residual of sum_k h_{theta,k}(y) y_k = g_theta(y) at a point, maximized
// over modes (quadrature oracle for the Taylor split).
double taylor_reconstruction_residual(const CommutatorKernel& ker,
                                      const double* y);

// ---------------------------------------------------------------------------
// NormalCommutatorSymbol
// ---------------------------------------------------------------------------
struct NormalCommutatorSymbol {
  double m = -1.0;       // weight order; symbol order is m - 1
  double gamma = 1.0;
  SeparatedSymbol sep;   // q_m in separated form (per-theta combined over k)
  // Off-grid per-mode evaluators are attached when built with evaluators.
};

// Construction route for the mode multipliers: `direct` transforms the
// kernel product g_theta Lam (the Taylor split recombined in closed form);
// `taylor` evaluates the split factor by factor and exists as an oracle for
// the factor machinery.
enum class QSymbolRoute { direct, taylor };

// Builds q_m for the given coefficient; factors default as in the mollifier.
// with_evaluators additionally attaches off-grid evaluators (costlier).
NormalCommutatorSymbol normal_commutator_symbol(
    const HalfSpaceGrid& grid, double m, double gamma,
    const BandLimitedCoefficient& coef, const CutoffSpec& cut,
    std::vector<int> factors = {}, bool with_evaluators = false,
    QSymbolRoute route = QSymbolRoute::direct);

// ---------------------------------------------------------------------------
// Residual of the commutator identity
//   [lambda_chi(Z), A d1] w = q_m(x, Z, gamma)(d1 w),
// with the left side formed compositionally and the right side quantized.
// w must carry a generator (exact d1 w).
// ---------------------------------------------------------------------------
struct CommutatorReport {
  double residual = 0.0;    // relative L2
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  bool pass = false;        // residual <= tol
};

CommutatorReport verify_normal_commutator(const HalfSpaceField& w,
                                          MollifierBank& bank, double m,
                                          double gamma,
                                          const BandLimitedCoefficient& coef,
                                          double tol = 1e-5);

}  // namespace conormal
