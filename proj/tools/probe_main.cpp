// Scratch driver used while calibrating the numerics.
#include <chrono>
#include <cstdio>

#include "conormal/commutator.hpp"
#include "conormal/generators.hpp"
#include "conormal/quadrature.hpp"

using namespace conormal;

static double now_s() {
  using clk = std::chrono::steady_clock;
  static auto t0 = clk::now();
  return std::chrono::duration<double>(clk::now() - t0).count();
}

// Physical-space L2 by tensor Gauss-Legendre over [0,d0] x [-d0,d0].
static double gl_l2(const SmoothField& f, double d0, int nq) {
  auto q = gauss_legendre_01(nq);
  double acc = 0.0;
  for (auto& [t1, w1] : q) {
    const double x1 = d0 * t1;
    for (auto& [t2, w2] : q) {
      const double x2 = -d0 + 2.0 * d0 * t2;
      const double x[2] = {x1, x2};
      double s = 0.0;
      for (int c = 0; c < f.components(); ++c) s += std::norm(f.value(c, x));
      acc += w1 * w2 * s;
    }
  }
  return std::sqrt(acc * d0 * 2.0 * d0);
}

int main() {
  HalfSpaceGrid g = HalfSpaceGrid::default2d();
  const Lattice lat = g.interior();
  std::printf("grid: [%g, %g) x [-%g, %g), h = (%g, %g), Xi = (%g, %g)\n",
              -g.left_log, g.right_log, g.half_width, g.half_width,
              lat.step(0), lat.step(1), lat.nyquist(0), lat.nyquist(1));

  // --- 1. sharp isometry vs physical quadrature --------------------------
  for (const char* fam : {"gauss", "bump", "osc"}) {
    double worst = 0.0;
    for (int seed = 0; seed < 5; ++seed) {
      auto in = sample_test_function(fam, seed + 1, g, 1);
      const double a = sharp_transform(in.u).l2();
      const double b = gl_l2(*in.u.generator(), g.delta0, 220);
      worst = std::max(worst, std::abs(a / b - 1.0));
    }
    std::printf("[1] %-6s iso err = %.3e\n", fam, worst);
  }

  // --- 2. derivative identity (Z1 route) ---------------------------------
  for (const char* fam : {"gauss", "bump"}) {
    double worst = 0.0;
    for (int seed = 0; seed < 4; ++seed) {
      auto in = sample_test_function(fam, seed + 11, g, 1);
      // exact Z1 u via generator against the tail-corrected spectral route
      HalfSpaceField z1_exact = conormal_derivative(in.u, 1);       // generator
      HalfSpaceField nogen = in.u;
      nogen.set_generator(nullptr);                                  // keep trace
      HalfSpaceField z1_spec = conormal_derivative(nogen, 1);
      const double rel = (z1_exact - z1_spec).l2() /
                         std::max(z1_exact.l2(), 1e-300);
      worst = std::max(worst, rel);
    }
    std::printf("[2] %-6s Z1 spectral-vs-exact = %.3e\n", fam, worst);
  }

  // --- 3. mollified weight sanity -----------------------------------------
  CutoffSpec cut = build_cutoff(g.delta0, g.n, 0.9);
  std::printf("cut: eps0 = %.4f plateau = %.4f supp1d = %.4f\n", cut.eps0,
              cut.plateau(), cut.support1d());
  double t0 = now_s();
  MollifierBank bank(g, cut);
  {
    const MollifiedWeight& w0 = bank.weight(0.0, 8.0);
    double dev = 0.0, rmax = 0.0;
    for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
      dev = std::max(dev, std::abs(w0.chi_table.at(i) - 1.0));
      rmax = std::max(rmax, std::abs(w0.rem_table.at(i)));
    }
    std::printf("[3] m=0: |chi-1| = %.3e, |r0| = %.3e (%.2fs build)\n", dev,
                rmax, now_s() - t0);
  }
  {
    t0 = now_s();
    const MollifiedWeight& w = bank.weight(-1.0, 8.0);
    std::printf("[3] m=-1 build %.2fs, tail_leak = %.3e\n", now_s() - t0,
                w.tail_leak);
    // stability under a larger extension
    t0 = now_s();
    MollifiedWeight wbig = mollified_weight(g, -1.0, 8.0, cut, {16, 4});
    double dev = 0.0;
    for (std::ptrdiff_t i = 0; i < lat.count(); ++i)
      dev = std::max(dev, std::abs(w.chi_table.at(i) - wbig.chi_table.at(i)));
    std::printf("[3] ext-stability dev = %.3e (%.2fs big build)\n", dev,
                now_s() - t0);
  }

  // --- 4. remainder decay slopes ------------------------------------------
  const std::vector<double> sweep = {1, 2, 4, 8, 16, 32, 64};
  for (const char* fam : {"gauss", "bump", "osc"}) {
    auto in = sample_test_function(fam, 3, g, 1);
    t0 = now_s();
    DecayReport rep = verify_smoothing_decay(in.u, bank, -1.0, 2, sweep);
    std::printf("[4] %-6s slope = %.3f  ratios:", fam, rep.slope);
    for (double r : rep.ratios) std::printf(" %.2e", r);
    std::printf("  (%.2fs)\n", now_s() - t0);
  }

  // --- 5. support preservation + negative control -------------------------
  {
    HalfSpaceGrid g5 = g;
    g5.delta0 = 0.5;
    CutoffSpec cut5 = build_cutoff(0.5, 2, 0.9);
    MollifierBank bank5(g5, cut5);
    auto in = sample_test_function("bump", 5, g5, 1);
    SupportReport s = verify_support_preservation(in.u, bank5, -1.0, 8.0);
    CutoffSpec bad = make_cutoff_unchecked(0.5, 2, 3.0 * std::min(std::log(2.0), 0.5));
    MollifierBank bank_bad(g5, bad);
    SupportReport sb = verify_support_preservation(in.u, bank_bad, -1.0, 1.0);
    std::printf("[5] mass_out = %.3e (ok), neg control = %.3e\n",
                s.mass_outside, sb.mass_outside);
  }

  // --- 6. trace identity ----------------------------------------------------
  for (const char* fam : {"gauss", "bump"}) {
    auto in = sample_test_function(fam, 9, g, 1);
    t0 = now_s();
    double res = verify_trace_identity(in.u, bank, -1.0, 8.0);
    std::printf("[6] %-6s trace residual = %.3e (%.2fs)\n", fam, res,
                now_s() - t0);
  }

  // --- 7. boundary remainder bound + Taylor cross-check ---------------------
  {
    t0 = now_s();
    const BoundarySymbol& bs = bank.boundary(-1.0, 8.0);
    const Lattice blat = g.boundary();
    double supratio = 0.0, im = 0.0;
    for (int k = 0; k < blat.extent(0); ++k) {
      const double xi = blat.freq(0, k);
      const double lam3 = weight_value(-3.0, 8.0, &xi, 1);
      supratio = std::max(supratio, std::abs(bs.beta.at(k)) / lam3);
      im = std::max(im, std::abs(bs.beta.at(k).imag()));
    }
    std::printf("[7] sup|beta|/lam^-3 = %.4f, imag = %.2e, tail = %.2e (%.2fs)\n",
                supratio, im, bs.tail_estimate, now_s() - t0);
    t0 = now_s();
    std::vector<double> xis = {0.0, 1.5707963267948966, 7.853981633974483,
                               31.41592653589793, 100.53096491487338};
    auto taylor = boundary_remainder_taylor(g, -1.0, 8.0, cut, xis);
    std::printf("[7] A-route vs table:");
    const Lattice bl = g.boundary();
    for (size_t i = 0; i < xis.size(); ++i) {
      int kk = 0;
      for (int k = 0; k < bl.extent(0); ++k)
        if (std::abs(bl.freq(0, k) - xis[i]) < 1e-6) kk = k;
      std::printf(" (%.3e|%.3e)", taylor[i], bs.beta.at(kk).real());
    }
    std::printf(" (%.2fs)\n", now_s() - t0);
  }

  // --- 8. normal commutator identity ----------------------------------------
  {
    BandLimitedCoefficient coef;
    coef.role = BandLimitedCoefficient::Role::invertible_block;
    coef.rows = coef.cols = 2;
    coef.c0 = Eigen::MatrixXd{{2.0, 0.3}, {-0.2, 1.7}};
    const Lattice il = g.interior();
    coef.add_cosine_mode({il.freq_step(0), 0.0}, 0.4,
                         Eigen::MatrixXd{{0.12, 0.0}, {0.05, -0.1}});
    coef.add_cosine_mode({0.0, il.freq_step(1)}, 1.1,
                         Eigen::MatrixXd{{0.0, 0.08}, {0.1, 0.06}});
    coef.add_cosine_mode({2.0 * il.freq_step(0), il.freq_step(1)}, -0.7,
                         Eigen::MatrixXd{{0.07, -0.04}, {0.0, 0.09}});

    auto in = sample_test_function("gauss", 21, g, 2);
    for (double m : {-1.0, -2.0}) {
      for (double gamma : {1.0, 8.0, 64.0}) {
        t0 = now_s();
        CommutatorReport rep =
            verify_normal_commutator(in.u, bank, m, gamma, coef);
        std::printf("[8] m=%.0f g=%-3g residual = %.3e (|L|=%.2e) (%.2fs)\n", m,
                    gamma, rep.residual, rep.lhs_norm, now_s() - t0);
      }
    }
  }
  return 0;
}
