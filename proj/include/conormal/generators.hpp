// Closed-form test input families.
//
// Each family produces an N-component interior function u supported in
// B+_{delta0} together with a boundary function psi supported in B(0;delta0).
// Values, first derivatives and boundary restrictions all come from the
// closed form, never from grid extrapolation.

#pragma once

#include <cstdint>

#include "conormal/core.hpp"

namespace conormal {

// Deterministic 64-bit generator (splitmix64).  Uniform doubles are derived
// from the top 53 bits so streams are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int pick(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t state_;
};

// One-dimensional smooth factor with a closed-form derivative.
struct Factor {
  enum Kind {
    kGaussian,      // exp(-((s-c)/w)^2)
    kBump,          // exp(1 - 1/(1-y^2)), y = (s-c)/w, zero for |y| >= 1
    kRightPlateau,  // 1 on [0,c], smooth descent to 0 at w  (s >= 0 side)
    kLinear,        // c + w s
  };
  Kind kind = kGaussian;
  double c = 0.0;
  double w = 1.0;

  double value(double s) const;
  double deriv(double s) const;
};

// amp * e^{i omega.x} * prod_axis prod_factors f(x_axis)
struct Atom {
  cplx amp{1.0, 0.0};
  std::vector<double> omega;                  // length n
  std::vector<std::vector<Factor>> chain;     // per axis

  cplx value(const double* x) const;
  cplx deriv(int axis, const double* x) const;
};

// Sum-of-atoms implementation of SmoothField.
class GeneratedField final : public SmoothField {
 public:
  GeneratedField(int dim, std::vector<std::vector<Atom>> atoms)
      : dim_(dim), atoms_(std::move(atoms)) {}
  int components() const override { return static_cast<int>(atoms_.size()); }
  cplx value(int comp, const double* x) const override;
  cplx deriv(int comp, int axis, const double* x) const override;
  int dim() const { return dim_; }

 private:
  int dim_;
  std::vector<std::vector<Atom>> atoms_;
};

// Boundary analogue on x' (dimension n-1).
class GeneratedBoundary {
 public:
  GeneratedBoundary() = default;
  GeneratedBoundary(int dim, std::vector<Atom> atoms)
      : dim_(dim), atoms_(std::move(atoms)) {}
  cplx value(const double* xp) const;
  BoundaryField sample(const Lattice& blat, int comps = 1) const;

 private:
  int dim_ = 1;
  std::vector<Atom> atoms_;
};

struct TestInput {
  HalfSpaceField u;       // carries generator and exact trace
  BoundaryField psi;
  GeneratedBoundary psi_form;
};

// Families: "bump" (exactly supported), "gauss" (spectrally clean,
// supported to ~1e-14), "osc" (higher oscillation), "zero".
// Unknown ids throw.
TestInput sample_test_function(const std::string& family, std::uint64_t seed,
                               const HalfSpaceGrid& grid, int ncomp = 1);

// The names above, in the order suites iterate over them.
const std::vector<std::string>& generator_families();

}  // namespace conormal
