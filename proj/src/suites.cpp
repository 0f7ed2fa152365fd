#include "conormal/suites.hpp"

#include <chrono>

#include "conormal/quadrature.hpp"

namespace conormal {

namespace {

double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

CheckResult make_result(const std::string& id, bool pass, double measured,
                        double tol, const std::string& detail) {
  CheckResult r;
  r.id = id;
  r.status = pass ? "PASS" : "FAIL";
  r.measured = measured;
  r.tolerance = tol;
  r.detail = detail;
  return r;
}

// Tensor Gauss-Legendre L2 over the physical support box (independent of the
// spectral route).
double physical_l2(const SmoothField& f, double d0, int nq) {
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

double boundary_mass_outside(const BoundaryField& v, double radius) {
  const Lattice& lat = v.lattice();
  std::vector<int> idx(lat.dim());
  double in = 0.0, out = 0.0;
  for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
    lat.unravel(i, idx.data());
    double rr = 0.0;
    for (int a = 0; a < lat.dim(); ++a) {
      const double x = lat.coord(a, idx[a]);
      rr += x * x;
    }
    double m = 0.0;
    for (int c = 0; c < v.components(); ++c) m += std::norm(v.comp(c)[i]);
    (rr < radius * radius ? in : out) += m;
  }
  const double tot = in + out;
  return tot > 0.0 ? out / tot : 0.0;
}

// ---------------------------------------------------------------------------
// transforms suite
// ---------------------------------------------------------------------------
CheckResult check_sharp_isometry(SuiteEnvironment& env) {
  const HalfSpaceGrid& g = env.grid();
  double worst = 0.0;
  int count = 0;
  for (const char* fam : {"gauss", "osc"}) {
    for (int k = 0; k < 50; ++k) {
      TestInput in = env.draw(fam, 1000 + k, 1);
      const double spectral = sharp_transform(in.u).l2();
      const double physical = physical_l2(*in.u.generator(), g.delta0, 160);
      worst = std::max(worst, std::abs(spectral / physical - 1.0));
      ++count;
    }
  }
  return make_result("sharp-isometry", worst <= 1e-10, worst, 1e-10,
                     "L2 ratio deviation over " + std::to_string(count) +
                         " fields, spectral vs physical quadrature");
}

CheckResult check_sharp_identities(SuiteEnvironment& env) {
  const HalfSpaceGrid& g = env.grid();
  const Lattice lat = g.interior();
  double worst = 0.0;
  double bump_worst = 0.0;
  for (const char* fam : {"gauss", "osc", "bump"}) {
    const bool resolved = std::string(fam) != "bump";
    for (int k = 0; k < 4; ++k) {
      TestInput in = env.draw(fam, 2000 + k, 1);
      const auto& gen = *in.u.generator();

      // Pointwise product relation (psi u)^sharp = psi^nat u^sharp.
      TestInput co = env.draw("gauss", 2100 + k, 1);
      {
        FullSpaceField us = sharp_transform(in.u, -1.0);
        GridArray psin = natural_samples(g, *co.u.generator(), 0);
        GridArray lhs(lat);
        std::vector<int> idx(2);
        std::vector<double> x(2);
        double dev = 0.0, scale = 0.0;
        for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
          lat.unravel(i, idx.data());
          x[0] = std::exp(lat.coord(0, idx[0]));
          x[1] = lat.coord(1, idx[1]);
          const cplx prod =
              co.u.generator()->value(0, x.data()) * gen.value(0, x.data());
          const cplx viaNat = psin[i] * us.comp(0)[i] *
                              std::exp(-0.5 * lat.coord(0, idx[0]));
          dev = std::max(dev, std::abs(prod - viaNat * 1.0));
          scale = std::max(scale, std::abs(prod));
        }
        const double rel = scale > 0 ? dev / scale : 0.0;
        (resolved ? worst : bump_worst) =
            std::max(resolved ? worst : bump_worst, rel);
      }

      // Z1 and Z2 via the sharp conjugation against the closed forms.
      HalfSpaceField z1_exact = conormal_derivative(in.u, 1);
      HalfSpaceField nogen = in.u;
      nogen.set_generator(nullptr);
      HalfSpaceField z1_spec = conormal_derivative(nogen, 1);
      const double r1 =
          (z1_exact - z1_spec).l2() / std::max(z1_exact.l2(), 1e-300);
      HalfSpaceField z2_exact = conormal_derivative(in.u, 2);
      // spectral route for Z2 uses raw samples; compare against closed form
      HalfSpaceField z2_spec = conormal_derivative(nogen, 2);
      const double r2 =
          (z2_exact - z2_spec).l2() / std::max(z2_exact.l2(), 1e-300);
      const double r = std::max(r1, r2);
      (resolved ? worst : bump_worst) =
          std::max(resolved ? worst : bump_worst, r);
    }
  }
  CheckResult res = make_result(
      "sharp-identities", worst <= 1e-9, worst, 1e-9,
      "product and derivative conjugation relations on resolved families; "
      "exact-support family measured at " +
          std::to_string(bump_worst));
  return res;
}

CheckResult check_sharp_roundtrip(SuiteEnvironment& env) {
  const HalfSpaceGrid& g = env.grid();
  double worst = 0.0;
  for (const char* fam : {"gauss", "bump", "osc"}) {
    TestInput in = env.draw(fam, 2500, 1);
    FullSpaceField v = sharp_transform(in.u);
    HalfSpaceField back = sharp_inverse(g, v);
    worst = std::max(worst, (back - in.u).l2() / in.u.l2());
    // and the opposite direction starting from a full-space field
    FullSpaceField v2 = sharp_transform(back, -1.0);
    double dev = 0.0;
    for (int c = 0; c < v.components(); ++c) {
      GridArray d = v2.comp(c) - v.comp(c);
      dev = std::max(dev, d.l2());
    }
    worst = std::max(worst, dev / v.l2());
  }
  return make_result("sharp-inverse-roundtrip", worst <= 1e-10, worst, 1e-10,
                     "both compositions of the lift and its inverse");
}

CheckResult check_weight_inverse(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  double worst = 0.0;
  for (double gamma : {1.0, 8.0, 64.0}) {
    const MultiplierSymbol& p = bank.lambda_interior(1.0, gamma);
    const MultiplierSymbol& m = bank.lambda_interior(-1.0, gamma);
    for (const char* fam : {"gauss", "osc"}) {
      TestInput in = env.draw(fam, 2600, 1);
      HalfSpaceField a = op_conormal(op_conormal(in.u, p), m);
      HalfSpaceField b = op_conormal(op_conormal(in.u, m), p);
      worst = std::max(worst, (a - in.u).l2() / in.u.l2());
      worst = std::max(worst, (b - in.u).l2() / in.u.l2());
    }
  }
  return make_result("weight-inverse", worst <= 1e-10, worst, 1e-10,
                     "two-sided inverse of the weight quantization, m = +-1");
}

CheckResult check_norm_equivalence(SuiteEnvironment& env) {
  CheckResult res;
  res.id = "norm-equivalence";
  double worst_drift = 0.0;
  double aniso_dev = 0.0;
  bool band_ok = true;
  for (int m : {1, 2}) {
    std::vector<double> band(env.sweep().size(), 1.0);
    for (size_t ig = 0; ig < env.sweep().size(); ++ig) {
      const double gamma = env.sweep()[ig];
      double c = 1.0;
      for (const TestInput* inp : env.resolved_samples(1)) {
        const double spec =
            norm(inp->u, NormSpec(NormKind::conormal_spectral, m, gamma));
        const double der =
            norm(inp->u, NormSpec(NormKind::conormal_derivative, m, gamma));
        const double ratio = spec / der;
        c = std::max({c, ratio, 1.0 / ratio});
        if (m == 1) {
          const double ani =
              norm(inp->u, NormSpec(NormKind::anisotropic, 1, gamma));
          aniso_dev = std::max(aniso_dev, std::abs(ani / der - 1.0));
        }
        res.rows.push_back({"norm-equivalence-m" + std::to_string(m),
                            (int)res.rows.size(), gamma, spec, der});
      }
      band[ig] = c;
    }
    worst_drift = std::max(worst_drift, report_drift(band));
    // A band decreasing toward 1 is uniformly dominated by its gamma = 1
    // value, which is the gamma-independent-band statement being verified.
    if (!drift_pass(band, 0.10)) band_ok = false;
  }
  const bool pass = band_ok && aniso_dev <= 1e-12;
  res = make_result("norm-equivalence", pass, worst_drift, 0.10,
                    "spectral vs derivative band over the sweep, m = 1, 2 "
                    "(stable or uniformly dominated); H^1 anisotropic/"
                    "tangential deviation " + std::to_string(aniso_dev));
  return res;
}

CheckResult check_imbedding(SuiteEnvironment& env) {
  const std::vector<double> orders = {-1.0, 0.0, 1.0, 2.0};
  double worst = 0.0;
  for (const TestInput* inp : env.resolved_samples(1)) {
    for (double gamma : env.sweep())
      for (double s : orders)
        for (double r : orders) {
          if (s > r) continue;
          const double ls = htan_norm(inp->u, s, gamma);
          const double lr = htan_norm(inp->u, r, gamma);
          const double excess = ls - std::pow(gamma, s - r) * lr;
          worst = std::max(worst, excess / std::max(ls, 1e-300));
        }
  }
  return make_result("imbedding", worst <= 1e-14, worst, 1e-14,
                     "gamma-weighted Sobolev imbedding for all order pairs");
}

// ---------------------------------------------------------------------------
// symbols suite
// ---------------------------------------------------------------------------
CheckResult check_weight_peetre(SuiteEnvironment& env) {
  Rng rng(env.config().seed ^ 0x9e37ULL);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double s = rng.uniform(-3.0, 3.0);
    const double gamma = rng.uniform(1.0, 64.0);
    double xi[2] = {rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0)};
    double eta[2] = {rng.uniform(-40.0, 40.0), rng.uniform(-40.0, 40.0)};
    double diff[2] = {xi[0] - eta[0], xi[1] - eta[1]};
    const double lhs = weight_value(s, gamma, xi, 2);
    const double rhs = std::pow(2.0, std::abs(s)) *
                       weight_value(s, gamma, diff, 2) *
                       weight_value(std::abs(s), 1.0, eta, 2);
    worst = std::max(worst, lhs / rhs);
  }
  return make_result("weight-peetre", worst <= 1.0 + 1e-12, worst, 1.0,
                     "sup of lhs/rhs over 1000 random (xi, eta, s, gamma)");
}

CheckResult check_quantization_linearity(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  PipelineContext& ctx = env.pipeline();
  TestInput a = env.draw("gauss", 2700, 3);
  TestInput b = env.draw("osc", 2701, 3);
  const double gamma = 8.0;
  const cplx al(1.3, -0.4), be(-0.7, 0.9);
  const SeparatedSymbol& rho = ctx.rho_sharp(gamma);
  HalfSpaceField lhs = apply_separated(al * a.u + be * b.u, rho);
  HalfSpaceField rhs = al * apply_separated(a.u, rho) + be * apply_separated(b.u, rho);
  double worst = (lhs - rhs).l2() / std::max(lhs.l2(), 1e-300);
  const MultiplierSymbol& lam = bank.lambda_interior(-1.0, gamma);
  HalfSpaceField l2f = op_conormal(al * a.u + be * b.u, lam);
  HalfSpaceField r2f = al * op_conormal(a.u, lam) + be * op_conormal(b.u, lam);
  worst = std::max(worst, (l2f - r2f).l2() / std::max(l2f.l2(), 1e-300));
  return make_result("quantization-linearity", worst <= 1e-12, worst, 1e-12,
                     "separated and multiplier quantizations");
}

CheckResult check_multiplier_commute(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  TestInput in = env.draw("gauss", 2800, 1);
  double worst = 0.0;
  for (double gamma : {1.0, 8.0}) {
    const MultiplierSymbol& a = bank.lambda_interior(1.0, gamma);
    const MultiplierSymbol& b = bank.weight(-1.0, gamma).chi_table;
    HalfSpaceField ab = op_conormal(op_conormal(in.u, b), a);
    HalfSpaceField ba = op_conormal(op_conormal(in.u, a), b);
    worst = std::max(worst, (ab - ba).l2() / std::max(ab.l2(), 1e-300));
  }
  return make_result("multiplier-commute", worst <= 1e-13, worst, 1e-13,
                     "x-independent quantizations commute");
}

CheckResult check_separated_product(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  MollifierBank& bank = env.bank();
  const double gamma = 8.0;
  TestInput in = env.draw("gauss", 2900, 3);
  const SeparatedSymbol& a = ctx.rho_sharp(gamma);
  const MultiplierSymbol& b = bank.lambda_interior(-1.0, gamma);
  // Composition against the symbol with the pointwise product tables.
  std::vector<SymbolMode> modes;
  for (const auto& m : a.modes()) {
    SymbolMode sm;
    sm.theta = m.theta;
    sm.coeff = m.coeff;
    sm.mult = m.mult.pointwise_product(b);
    modes.push_back(std::move(sm));
  }
  SeparatedSymbol ab(a.order() + b.order(), gamma, a.rows(), a.cols(),
                     std::move(modes));
  HalfSpaceField lhs = apply_separated(op_conormal(in.u, b), a);
  HalfSpaceField rhs = apply_separated(in.u, ab);
  const double worst = (lhs - rhs).l2() / std::max(lhs.l2(), 1e-300);
  return make_result("separated-product", worst <= 1e-12, worst, 1e-12,
                     "composition symbol equals the pointwise product for "
                     "x-independent right factors");
}

CheckResult check_sobolev_continuity(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  PipelineContext& ctx = env.pipeline();
  std::vector<HalfSpaceField> samples;
  for (const TestInput* inp : env.resolved_samples(1)) samples.push_back(inp->u);
  std::vector<HalfSpaceField> samples3;
  for (const TestInput* inp : env.resolved_samples(3)) samples3.push_back(inp->u);
  double drift = 0.0;
  bool pass = true;
  std::string detail;
  auto probe_op = [&](const std::string& name, double order, auto&& op,
                      const std::vector<HalfSpaceField>& ss) {
    ConstantReport rep = boundedness_probe(env.sweep(), op, order, 0.0, ss, 0.10);
    drift = std::max(drift, rep.drift);
    if (!rep.pass) {
      pass = false;
      detail += name + " unstable; ";
    }
  };
  probe_op("lambda-chi(-1)", -1.0,
           [&](const HalfSpaceField& u, double g) {
             return op_conormal(u, bank.weight(-1.0, g).chi_table);
           },
           samples);
  probe_op("rho-sharp", 0.0,
           [&](const HalfSpaceField& u, double g) {
             return apply_separated(u, ctx.rho_sharp(g));
           },
           samples3);
  // exact-inverse weights: the constant is 1 by construction
  {
    double dev = 0.0;
    for (double g : env.sweep()) {
      const MultiplierSymbol& lam = bank.lambda_interior(1.0, g);
      for (const auto& u : samples) {
        const double K = htan_norm(op_conormal(u, lam), 0.0, g) /
                         htan_norm(u, 1.0, g);
        dev = std::max(dev, std::abs(K - 1.0));
      }
    }
    if (dev > 1e-10) {
      pass = false;
      detail += "weight operator norm deviates from 1; ";
    }
  }
  return make_result("sobolev-continuity", pass, drift, 0.10,
                     detail.empty()
                         ? "operator norms gamma-stable for built-in symbols"
                         : detail);
}

CheckResult check_seminorm_weights(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  SeminormSampling samp;
  samp.sweep = env.sweep();
  samp.xi_max = 0.75 * std::min(env.grid().interior().nyquist(0),
                                env.grid().interior().nyquist(1));
  samp.fd_step = env.grid().interior().freq_step(0) / 4.0;
  bool pass = true;
  double worst_drift = 0.0;
  std::string detail;
  for (double m : {-1.0, 0.0, 1.0}) {
    // normalization entry of the unmollified weight is exactly 1
    SemiNormReport base = estimate_seminorm(probe_weight(2, m), m, 0, samp);
    if (std::abs(base.value(0) - 1.0) > 1e-10) pass = false;
    // mollified weight: finite and gamma-stable entries up to k = 2
    SymbolProbe p;
    p.dim = 2;
    p.x_dependent = false;
    p.f = [&bank, m](const double*, const double* xi, double gamma) {
      return bank.weight(m, gamma).chi_table.evaluate(xi);
    };
    SemiNormReport rep = estimate_seminorm(p, m, 2, samp);
    const double v = rep.value(2);
    worst_drift = std::max(worst_drift, rep.gamma_drift(2));
    if (!(v > 0.0 && v < 1e4)) {
      pass = false;
      detail += "m=" + std::to_string(m) + " unbounded; ";
    }
    if (!rep.gamma_stable(2, 0.10)) {
      pass = false;
      detail += "m=" + std::to_string(m) + " entries not gamma-uniform; ";
    }
  }
  return make_result("lemma-4.1-seminorms", pass, worst_drift, 0.10,
                     detail.empty() ? "mollified weight semi-norms finite and "
                                      "gamma-stable up to k = 2"
                                    : detail);
}

// ---------------------------------------------------------------------------
// mollified suite
// ---------------------------------------------------------------------------
CheckResult check_m0_degeneracies(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  double worst = 0.0;
  for (double gamma : {1.0, 8.0, 64.0}) {
    const MollifiedWeight& w = bank.weight(0.0, gamma);
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)w.chi_table.table().size(); ++i) {
      worst = std::max(worst, std::abs(w.chi_table.at(i) - 1.0));
      worst = std::max(worst, std::abs(w.rem_table.at(i)));
    }
    const BoundarySymbol& b = bank.boundary(0.0, gamma);
    for (std::ptrdiff_t i = 0; i < (std::ptrdiff_t)b.bprime.table().size(); ++i)
      worst = std::max(worst, std::abs(b.bprime.at(i) - 1.0));
  }
  return make_result("m0-degeneracies", worst <= 1e-10, worst, 1e-10,
                     "order-zero mollification and trace symbol collapse");
}

CheckResult check_decay(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  CheckResult res;
  double worst_slope = -1e9;
  bool pass = true;
  std::string detail;
  std::vector<LedgerRow> rows;
  for (const std::string& fam : env.config().families) {
    if (fam == "zero") continue;
    TestInput in = env.draw(fam, 3000, 1);
    for (double m : {-1.0, -2.0}) {
      DecayReport rep = verify_smoothing_decay(in.u, bank, m, 2, env.sweep());
      for (size_t i = 0; i < rep.gammas.size(); ++i)
        rows.push_back({"lemma-4.3-decay-m" + std::to_string((int)-m), 0,
                        rep.gammas[i], rep.ratios[i], 1.0});
      worst_slope = std::max(worst_slope, rep.slope);
      if (!rep.pass) {
        pass = false;
        detail += fam + " m=" + std::to_string(m) + " slope " +
                  std::to_string(rep.slope) + "; ";
      }
    }
    // gamma^h-weighted ratios are non-increasing for h = 1, 2 (p = h probe)
    for (int h : {1, 2}) {
      DecayReport rep = verify_smoothing_decay(in.u, bank, -1.0, h, env.sweep());
      for (size_t i = 1; i < rep.ratios.size(); ++i) {
        const double prev = rep.ratios[i - 1] * std::pow(rep.gammas[i - 1], h);
        const double cur = rep.ratios[i] * std::pow(rep.gammas[i], h);
        if (rep.gammas[i] < 4.0) continue;
        if (cur > prev * (1.0 + 1e-9)) {
          pass = false;
          detail += fam + " gamma^h ratio not monotone at h=" +
                    std::to_string(h) + "; ";
        }
      }
    }
  }
  res = make_result("lemma-4.3-decay", pass, worst_slope, -3.0,
                    detail.empty() ? "log-log decay slopes over gamma in [4,64]"
                                   : detail);
  res.rows = std::move(rows);
  return res;
}

CheckResult check_support(SuiteEnvironment& env) {
  // The canonical support check runs at delta0 = 0.5 with the limit cutoff.
  HalfSpaceGrid g5 = env.grid();
  g5.delta0 = 0.5;
  CutoffSpec cut = build_cutoff(0.5, g5.n, 0.9);
  MollifierBank bank(g5, cut);
  TestInput in = sample_test_function("bump", env.config().seed ^ 0x51ULL, g5, 1);
  SupportReport pos = verify_support_preservation(in.u, bank, -1.0, 8.0);

  const double limit = std::min(std::log(1.0 / 0.5), 1.0 - 0.5);
  CutoffSpec bad = make_cutoff_unchecked(0.5, g5.n, 3.0 * limit);
  MollifierBank bank_bad(g5, bad);
  SupportReport neg = verify_support_preservation(in.u, bank_bad, -1.0, 1.0);

  const bool pass = pos.mass_outside <= 1e-6 && neg.mass_outside > 1e-3;
  return make_result("lemma-4.2-support", pass, pos.mass_outside, 1e-6,
                     "mass outside the unit half-cylinder; oversized-cutoff "
                     "control leaks " +
                         std::to_string(neg.mass_outside));
}

CheckResult check_boundary_support(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  double worst = 0.0;
  for (const std::string& fam : env.config().families) {
    if (fam == "zero") continue;
    TestInput in = env.draw(fam, 3100, 1);
    const BoundarySymbol& bs = bank.boundary(-1.0, 8.0);
    BoundaryField out = boundary_trace_apply(in.psi, bs);
    worst = std::max(worst, boundary_mass_outside(out, 1.0));
  }
  return make_result("cor-4.7-boundary-support", worst <= 1e-6, worst, 1e-6,
                     "trace-symbol output mass outside the unit ball");
}

CheckResult check_trace_identity(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  CheckResult res;
  std::vector<LedgerRow> rows;
  bool pass = true;
  double worst = 0.0;
  std::string detail;
  // Sweep stability on the spectrally resolved family.
  {
    TestInput in = env.draw("gauss", 3200, 1);
    std::vector<double> rs;
    for (double gamma : env.sweep()) {
      const double r = verify_trace_identity(in.u, bank, -1.0, gamma);
      rs.push_back(r);
      rows.push_back({"prop-4.5-trace", 0, gamma, r, 1e-6});
      worst = std::max(worst, r);
    }
    std::vector<double> sorted = rs;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    if (worst > 2.0 * median) {
      pass = false;
      detail += "sweep instability (max > 2 median); ";
    }
  }
  // Named families at gamma = 8.
  for (const char* fam : {"osc", "bump"}) {
    TestInput in = env.draw(fam, 3201, 1);
    const double r = verify_trace_identity(in.u, bank, -1.0, 8.0);
    rows.push_back({"prop-4.5-trace", fam == std::string("osc") ? 1 : 2, 8.0, r, 1e-6});
    worst = std::max(worst, r);
  }
  if (worst > 1e-6) pass = false;
  res = make_result("prop-4.5-trace", pass, worst, 1e-6,
                    detail.empty()
                        ? "direct kernel quadrature vs boundary multiplier"
                        : detail);
  res.rows = std::move(rows);
  return res;
}

CheckResult check_beta(SuiteEnvironment& env) {
  MollifierBank& bank = env.bank();
  const Lattice blat = env.grid().boundary();
  CheckResult res;
  bool pass = true;
  std::string detail;
  double headline = 0.0;
  std::vector<LedgerRow> rows;
  for (double m : {-1.0, 0.0}) {
    std::vector<double> sups;
    for (double gamma : env.sweep()) {
      const BoundarySymbol& bs = bank.boundary(m, gamma);
      double sup = 0.0;
      for (int k = 0; k < blat.extent(0); ++k) {
        const double xi = blat.freq(0, k);
        sup = std::max(sup, std::abs(bs.beta.at(k)) /
                                weight_value(m - 2.0, gamma, &xi, 1));
      }
      sups.push_back(sup);
      rows.push_back({"lemma-4.6-beta-m" + std::to_string((int)-m), 0, gamma,
                      sup, 1e4});
    }
    headline = std::max(headline, *std::max_element(sups.begin(), sups.end()));
    if (!(headline < 1e4)) {
      pass = false;
      detail += "ratio unbounded; ";
    }
    if (!drift_pass(sups, 0.10)) {
      pass = false;
      detail += "m=" + std::to_string(m) + " ratio neither stable nor "
                "uniformly dominated; ";
    }
  }
  // Independent Taylor-remainder quadrature at low and moderate frequencies.
  {
    const double gamma = 8.0, m = -1.0;
    const BoundarySymbol& bs = bank.boundary(m, gamma);
    std::vector<int> ks = {0, 1, 2, 5, 20};
    std::vector<double> xis;
    for (int k : ks) xis.push_back(blat.freq(0, k));
    std::vector<double> taylor =
        boundary_remainder_taylor(env.grid(), m, gamma, bank.cutoff(), xis);
    double scale = std::abs(bs.beta.at(0).real());
    for (size_t i = 0; i < ks.size(); ++i) {
      const double table = bs.beta.at(ks[i]).real();
      const double diff = std::abs(taylor[i] - table);
      rows.push_back({"lemma-4.6-taylor", (int)i, xis[i], taylor[i], table});
      if (diff > std::max(1e-3 * scale, 2e-2 * std::abs(table))) {
        pass = false;
        detail += "Taylor route disagrees at xi'=" + std::to_string(xis[i]) +
                  "; ";
      }
    }
  }
  res = make_result("lemma-4.6-beta", pass, headline, 1e4,
                    detail.empty() ? "splitting remainder bounded, "
                                     "gamma-uniform, cross-checked"
                                   : detail);
  res.rows = std::move(rows);
  return res;
}

// ---------------------------------------------------------------------------
// commutators suite
// ---------------------------------------------------------------------------
BandLimitedCoefficient constant_coefficient(int r, double scale) {
  BandLimitedCoefficient c;
  c.role = BandLimitedCoefficient::Role::invertible_block;
  c.rows = c.cols = r;
  c.c0 = Eigen::MatrixXd::Identity(r, r) * scale;
  return c;
}

CheckResult check_kernel_structure(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  const CutoffSpec& cut = env.bank().cutoff();
  CommutatorKernel ker = kernel_K(ctx.toy().a1_block, cut);
  Rng rng(env.config().seed ^ 0xabcULL);
  double worst = 0.0;
  // K(x, 0) = 0 and support inside the cutoff ball.
  for (int k = 0; k < 64; ++k) {
    double x[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    double zero[2] = {0.0, 0.0};
    worst = std::max(worst, ker.eval(x, zero).cwiseAbs().maxCoeff());
    double yout[2] = {rng.uniform(cut.support1d() * 1.01, 2.0),
                      rng.uniform(-2.0, 2.0)};
    worst = std::max(worst, ker.eval(x, yout).cwiseAbs().maxCoeff());
  }
  // Constant coefficient: K(x,y) = c0 (1 - e^{-y1}) chi(y), x-independent.
  BandLimitedCoefficient cc = constant_coefficient(1, 1.7);
  CommutatorKernel cker = kernel_K(cc, cut);
  for (int k = 0; k < 64; ++k) {
    double x[2] = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    double y[2] = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const cplx expect = 1.7 * (1.0 - std::exp(-y[0])) * cut.chi(y);
    worst = std::max(worst, std::abs(cker.eval(x, y)(0, 0) - expect));
  }
  return make_result("kernel-structure", worst <= 1e-14, worst, 1e-14,
                     "kernel vanishing, support and constant-coefficient form");
}

CheckResult check_taylor_reconstruction(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  const CutoffSpec& cut = env.bank().cutoff();
  CommutatorKernel ker = kernel_K(ctx.toy().a1_block, cut);
  Rng rng(env.config().seed ^ 0xdefULL);
  double worst = 0.0;
  for (int k = 0; k < 256; ++k) {
    double y[2] = {rng.uniform(-2.0, 2.0) * cut.eps0,
                   rng.uniform(-2.0, 2.0) * cut.eps0};
    worst = std::max(worst, taylor_reconstruction_residual(ker, y));
  }
  return make_result("taylor-reconstruction", worst <= 1e-9, worst, 1e-9,
                     "sum_k h_k y_k reproduces the kernel at random points");
}

CheckResult check_taylor_route(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  const double gamma = 8.0;
  NormalCommutatorSymbol direct = normal_commutator_symbol(
      env.grid(), -1.0, gamma, ctx.toy().a1_block, env.bank().cutoff(),
      env.bank().factors(), false, QSymbolRoute::direct);
  NormalCommutatorSymbol taylor = normal_commutator_symbol(
      env.grid(), -1.0, gamma, ctx.toy().a1_block, env.bank().cutoff(),
      env.bank().factors(), false, QSymbolRoute::taylor);
  double worst = 0.0, scale = 0.0;
  for (size_t q = 0; q < direct.sep.modes().size(); ++q) {
    const auto& dt = direct.sep.modes()[q].mult.table();
    const auto& tt = taylor.sep.modes()[q].mult.table();
    for (size_t i = 0; i < dt.size(); ++i) {
      worst = std::max(worst, std::abs(dt[i] - tt[i]));
      scale = std::max(scale, std::abs(dt[i]));
    }
  }
  const double rel = worst / std::max(scale, 1e-300);
  return make_result("taylor-route-consistency", rel <= 1e-9, rel, 1e-9,
                     "factor-split construction matches the direct kernel "
                     "transform");
}

CheckResult check_normal_commutator(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  MollifierBank& bank = env.bank();
  CheckResult res;
  std::vector<LedgerRow> rows;
  double worst = 0.0;
  BandLimitedCoefficient cc = constant_coefficient(2, 1.5);
  TestInput in = env.draw("gauss", 3300, 2);
  for (double m : {-1.0, -2.0}) {
    for (double gamma : env.sweep()) {
      CommutatorReport r3 =
          verify_normal_commutator(in.u, bank, m, gamma, ctx.toy().a1_block);
      rows.push_back({"prop-4.8-identity-3mode-m" + std::to_string((int)-m), 0,
                      gamma, r3.residual, 1e-5});
      worst = std::max(worst, r3.residual);
      CommutatorReport rc = verify_normal_commutator(in.u, bank, m, gamma, cc);
      rows.push_back({"prop-4.8-identity-const-m" + std::to_string((int)-m), 0,
                      gamma, rc.residual, 1e-5});
      worst = std::max(worst, rc.residual);
    }
  }
  res = make_result("prop-4.8-identity", worst <= 1e-5, worst, 1e-5,
                    "commutator identity residual, constant and 3-mode "
                    "coefficients, m = -1, -2");
  res.rows = std::move(rows);
  return res;
}

CheckResult check_q_order(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  const double m = -1.0;
  // Per-gamma symbols with off-grid evaluators.
  std::map<double, NormalCommutatorSymbol> qs;
  for (double gamma : env.sweep())
    qs.emplace(gamma, normal_commutator_symbol(
                          env.grid(), m, gamma, ctx.toy().a1_block,
                          env.bank().cutoff(), env.bank().factors(), true));
  const int r = ctx.toy().r;
  SeminormSampling samp;
  samp.sweep = env.sweep();
  samp.xi_max = 0.75 * std::min(env.grid().interior().nyquist(0),
                                env.grid().interior().nyquist(1));
  samp.fd_step = env.grid().interior().freq_step(0) / 4.0;
  samp.directions = 2;
  samp.x_points = {{0.0, 0.0}, {-1.0, 0.7}};
  double worst_drift = 0.0, headline = 0.0;
  bool pass = true;
  std::string detail;
  for (int rr = 0; rr < r; ++rr)
    for (int cc = 0; cc < r; ++cc) {
      SymbolProbe p;
      p.dim = 2;
      p.x_dependent = true;
      p.x_dim = 2;
      p.f = [&qs, rr, cc](const double* x, const double* xi, double gamma) {
        return qs.at(gamma).sep.evaluate(x, xi, rr, cc);
      };
      SemiNormReport rep = estimate_seminorm(p, m - 1.0, 2, samp);
      headline = std::max(headline, rep.value(2));
      worst_drift = std::max(worst_drift, rep.gamma_drift(2));
      if (!(rep.value(2) < 1e4)) pass = false;
      if (!rep.gamma_stable(2, 0.10)) {
        pass = false;
        detail += "entry (" + std::to_string(rr) + "," + std::to_string(cc) +
                  ") not gamma-uniform; ";
      }
    }
  return make_result("lemma-4.9-order", pass, worst_drift, 0.10,
                     detail.empty() ? "normalized sups of the commutator "
                                      "symbol bounded and gamma-stable, "
                                      "|alpha|+|beta| <= 2"
                                    : detail);
}

CheckResult check_boundary_commutators(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  std::vector<BoundaryField> psis;
  for (const TestInput* inp : env.resolved_samples(1)) psis.push_back(inp->psi);
  bool pass = true;
  std::string detail;
  // d0 is an order-zero boundary operator with a gamma-stable constant.
  ConstantReport d0rep = boundedness_probe_boundary(
      env.sweep(),
      [&](const BoundaryField& v, double g) { return ctx.d0(v, g); }, 0.0, 0.0,
      psis, 0.25);
  if (!d0rep.pass) {
    pass = false;
    detail += "d0 constant unstable; ";
  }
  // d-3: ||d-3 psi||_{3/2} <= C gamma^{-3/2} ||psi||; the rescaled ratio is
  // non-increasing.  e-3 carries gamma^{-1} against the H^{-1/2} norm.
  std::vector<double> dm3r, em3r;
  for (double g : env.sweep()) {
    double a = 0.0, b = 0.0;
    for (const auto& psi : psis) {
      a = std::max(a, hb_norm(ctx.dm3(psi, g), 1.5, g) *
                          std::pow(g, 1.5) / psi.l2());
      b = std::max(b, hb_norm(ctx.em3(psi, g), 1.5, g) * g /
                          hb_norm(psi, -0.5, g));
    }
    dm3r.push_back(a);
    em3r.push_back(b);
  }
  if (!drift_pass(dm3r, 0.25)) {
    pass = false;
    detail += "d-3 rescaled ratio grows; ";
  }
  if (!drift_pass(em3r, 0.25)) {
    pass = false;
    detail += "e-3 rescaled ratio grows; ";
  }
  // commutators-with-zero-order-symbols are order -2: probe [b', b#].
  {
    MollifierBank& bank = env.bank();
    ConstantReport rep = boundedness_probe_boundary(
        env.sweep(),
        [&](const BoundaryField& v, double g) {
          const BoundarySymbol& bs = bank.boundary(-1.0, g);
          const SeparatedSymbol& bsh = ctx.b_sharp(g);
          return apply_multiplier(apply_separated(v, bsh), bs.bprime) -
                 apply_separated(apply_multiplier(v, bs.bprime), bsh);
        },
        -2.0, 1.5, psis, 0.25);
    if (!rep.pass) {
      pass = false;
      detail += "[b', b#] order -2 constant unstable; ";
    }
  }
  return make_result("boundary-commutators", pass, 0.0, 0.25,
                     detail.empty() ? "boundary commutator orders and decay "
                                      "factors behave"
                                    : detail);
}

CheckResult check_rho0tan_bound(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  std::vector<HalfSpaceField> vs;
  for (const TestInput* inp : env.resolved_samples(3)) vs.push_back(inp->u);
  ConstantReport rep = boundedness_probe(
      env.sweep(),
      [&](const HalfSpaceField& v, double g) { return ctx.rho0_tan(v, g, true); },
      0.0, 0.0, vs, 0.25);
  return make_result("tangential-zero-order-bound", rep.pass, rep.drift, 0.25,
                     "L2 operator constant of the tangential commutator "
                     "remainder across the sweep");
}

// ---------------------------------------------------------------------------
// pipeline suites
// ---------------------------------------------------------------------------
CheckResult check_toy_structure(SuiteEnvironment& env) {
  StructureReport ok = validate_structure(env.pipeline().toy());
  bool pass = ok.pass;
  std::string detail = "default toy margin " + std::to_string(ok.a1_min_singular);
  // d = r + 2 must fail.
  {
    RunConfig bad = env.config();
    bad.toy_d = bad.toy_r + 2;
    ToyBVP toy = bad.build_toy();
    StructureReport rep = validate_structure(toy);
    if (rep.pass) {
      pass = false;
      detail += "; oversized boundary-condition count not rejected";
    }
  }
  // A vanishing block violated at the boundary must fail.
  {
    ToyBVP toy = env.config().build_toy();
    for (std::ptrdiff_t i = 0; i < toy.grid.boundary().count(); ++i)
      toy.A1_full.boundary_entry(toy.N - 1, toy.N - 1)[i] = 0.3;
    StructureReport rep = validate_structure(toy);
    if (rep.pass) {
      pass = false;
      detail += "; nonvanishing characteristic block not rejected";
    }
  }
  return make_result("toy-structure", pass, ok.a1_min_singular, 0.5, detail);
}

CheckResult check_interior_routes(SuiteEnvironment& env) {
  const ToyBVP& toy = env.pipeline().toy();
  TestInput in = env.draw("gauss", 3400, toy.N);
  double worst = 0.0;
  for (double gamma : {1.0, 2.0, 8.0}) {
    HalfSpaceField F0 = apply_interior(toy, in.u, gamma, true, 0);
    HalfSpaceField F1 = apply_interior(toy, in.u, gamma, true, 1);
    worst = std::max(worst, (F0 - F1).l2() / F0.l2());
  }
  return make_result("interior-two-route", worst <= 1e-12, worst, 1e-12,
                     "split against assembled normal coefficient");
}

CheckResult check_normal_solve(SuiteEnvironment& env) {
  const ToyBVP& toy = env.pipeline().toy();
  double worst = 0.0;
  for (const std::string& fam : {std::string("gauss"), std::string("bump")}) {
    TestInput in = env.draw(fam, 3500, toy.N);
    HalfSpaceField F = apply_interior(toy, in.u, 8.0, true, 0);
    NormalSolveReport rep = normal_solve(toy, in.u, F, 8.0, true);
    worst = std::max(worst, rep.residual);
  }
  return make_result("normal-solve", worst <= 1e-8, worst, 1e-8,
                     "tangential representation of the normal derivative");
}

CheckResult fsystem_check(SuiteEnvironment& env, int statement) {
  PipelineContext& ctx = env.pipeline();
  CheckResult res;
  std::vector<LedgerRow> rows;
  double worst = 0.0, bump_worst = 0.0;
  int sample_id = 0;
  for (const std::string& fam : env.config().families) {
    if (fam == "zero") continue;
    const bool resolved = fam != "bump";
    TestInput in = env.draw(fam, 3600, ctx.toy().N);
    for (double gamma : {1.0, 8.0, 64.0}) {
      RegularizedSystem sys =
          assemble_regularized(ctx, in.u, in.psi, gamma, statement);
      rows.push_back({"fsystem-interior-s" + std::to_string(statement),
                      sample_id, gamma, sys.interior_residual, 1e-6});
      rows.push_back({"fsystem-boundary-s" + std::to_string(statement),
                      sample_id, gamma, sys.boundary_residual, 1e-6});
      const double w = std::max(sys.interior_residual, sys.boundary_residual);
      (resolved ? worst : bump_worst) =
          std::max(resolved ? worst : bump_worst, w);
    }
    ++sample_id;
  }
  const std::string id = "fsystem-residual-s" + std::to_string(statement);
  res = make_result(
      id, worst <= 1e-6, worst, 1e-6,
      "regularized-system identity on resolved families; exact-support "
      "family at " + std::to_string(bump_worst) +
          " (first-derivative content at its resolution limit)");
  res.internal_inconsistency = true;  // a failure here signals assembly bugs
  res.rows = std::move(rows);
  return res;
}

CheckResult chain_check(SuiteEnvironment& env, int statement) {
  PipelineContext& ctx = env.pipeline();
  EstimateLedger led = verify_chain_bounds(ctx, env.family_samples(ctx.toy().N),
                                           env.sweep(), statement);
  bool pass = led.gamma1_found && led.gamma1 <= 16.0;
  std::string detail = "gamma1 = " +
                       (led.gamma1_found ? std::to_string(led.gamma1)
                                         : std::string("not found"));
  if (led.CF_drift > 0.25 || led.CG_drift > 0.25) {
    pass = false;
    detail += "; data-bound constants drift beyond 25%";
  }
  detail += "; CF = " + std::to_string(led.CF) +
            " (drift " + std::to_string(led.CF_drift) + "), CG = " +
            std::to_string(led.CG) + " (drift " + std::to_string(led.CG_drift) +
            ")";
  CheckResult res =
      make_result("chain-bounds-s" + std::to_string(statement), pass,
                  led.gamma1_found ? led.gamma1 : -1.0, 16.0, detail);
  for (auto& r : led.rows)
    if (r.inequality != "fsystem-interior" && r.inequality != "fsystem-boundary")
      res.rows.push_back(r);
  return res;
}

CheckResult demo_check(SuiteEnvironment& env, int statement) {
  PipelineContext& ctx = env.pipeline();
  EstimateLedger led = estimate_transform_demo(
      ctx, env.family_samples(ctx.toy().N), env.sweep(), statement);
  CheckResult res;
  res.id = "theorem-final-s" + std::to_string(statement);
  res.status = led.verdict;
  res.measured = led.C_check;
  res.tolerance = 0.0;
  res.detail = "C0 = " + std::to_string(led.C0) +
               ", composed constant = " + std::to_string(led.C_check) +
               ", gamma1 = " + std::to_string(led.gamma1) +
               ", absorption threshold = " + std::to_string(led.gamma_absorb);
  for (const auto& n : led.notes) res.detail += "; " + n;
  for (auto& r : led.rows)
    if (r.inequality == "final-estimate" || r.inequality == "hypothesis")
      res.rows.push_back(r);
  // Homogeneity: final-inequality ratios are scale invariant.
  {
    TestInput in = env.draw("gauss", 3700, ctx.toy().N);
    RegularizedSystem a = assemble_regularized(ctx, in.u, in.psi, 8.0, statement);
    TestInput scaled = in;
    scaled.u = cplx(3.7, 0.0) * in.u;
    scaled.psi = cplx(3.7, 0.0) * in.psi;
    RegularizedSystem b =
        assemble_regularized(ctx, scaled.u, scaled.psi, 8.0, statement);
    const double ra = htan_norm(a.Fcal, 1.0, 8.0) / std::max(a.F.l2(), 1e-300);
    const double rb = htan_norm(b.Fcal, 1.0, 8.0) / std::max(b.F.l2(), 1e-300);
    if (std::abs(ra / rb - 1.0) > 1e-10) {
      res.status = "FAIL";
      res.detail += "; homogeneity violated";
    }
  }
  return res;
}

CheckResult check_zero_data(SuiteEnvironment& env) {
  PipelineContext& ctx = env.pipeline();
  TestInput z = env.draw("zero", 1, ctx.toy().N);
  RegularizedSystem sys = assemble_regularized(ctx, z.u, z.psi, 8.0, 1);
  const double worst =
      std::max({sys.F.l2(), sys.g.l2(), sys.Fcal.l2(), sys.Gcal.l2()});
  return make_result("zero-data", worst <= 1e-14, worst, 1e-14,
                     "all data vanish for vanishing inputs");
}

}  // namespace

// ---------------------------------------------------------------------------
// SuiteEnvironment
// ---------------------------------------------------------------------------
SuiteEnvironment::SuiteEnvironment(const RunConfig& config) : cfg_(config) {
  bank_ = std::make_shared<MollifierBank>(cfg_.grid, cfg_.build_cutoff());
  pipe_ = std::make_shared<PipelineContext>(cfg_.build_toy(), bank_.get());
}

TestInput SuiteEnvironment::draw(const std::string& family, std::uint64_t salt,
                                 int ncomp) {
  return sample_test_function(family, cfg_.seed ^ (salt * 0x9e3779b9ULL),
                              cfg_.grid, ncomp);
}

const std::vector<TestInput>& SuiteEnvironment::family_samples(int ncomp) {
  auto it = samples_.find(ncomp);
  if (it != samples_.end()) return it->second;
  std::vector<TestInput> out;
  std::vector<std::string> fams;
  for (const std::string& fam : cfg_.families) {
    if (fam == "zero") continue;
    for (int k = 0; k < cfg_.samples_per_family; ++k) {
      out.push_back(draw(fam, 7000 + 13 * k, ncomp));
      fams.push_back(fam);
    }
  }
  sample_family_[ncomp] = std::move(fams);
  return samples_.emplace(ncomp, std::move(out)).first->second;
}

std::vector<const TestInput*> SuiteEnvironment::resolved_samples(int ncomp) {
  const std::vector<TestInput>& all = family_samples(ncomp);
  const std::vector<std::string>& fams = sample_family_[ncomp];
  std::vector<const TestInput*> out;
  for (size_t i = 0; i < all.size(); ++i)
    if (fams[i] != "bump") out.push_back(&all[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------
const std::vector<CheckSpec>& check_registry() {
  static const std::vector<CheckSpec> registry = {
      {"sharp-isometry", {"transforms"}, check_sharp_isometry},
      {"sharp-identities", {"transforms"}, check_sharp_identities},
      {"sharp-inverse-roundtrip", {"transforms"}, check_sharp_roundtrip},
      {"weight-inverse", {"transforms", "symbols"}, check_weight_inverse},
      {"norm-equivalence", {"transforms"}, check_norm_equivalence},
      {"imbedding", {"transforms"}, check_imbedding},
      {"weight-peetre", {"symbols"}, check_weight_peetre},
      {"quantization-linearity", {"symbols"}, check_quantization_linearity},
      {"multiplier-commute", {"symbols"}, check_multiplier_commute},
      {"separated-product", {"symbols"}, check_separated_product},
      {"sobolev-continuity", {"symbols"}, check_sobolev_continuity},
      {"lemma-4.1-seminorms", {"symbols", "mollified"}, check_seminorm_weights},
      {"m0-degeneracies", {"mollified"}, check_m0_degeneracies},
      {"lemma-4.3-decay", {"mollified"}, check_decay},
      {"lemma-4.2-support", {"mollified"}, check_support},
      {"cor-4.7-boundary-support", {"mollified"}, check_boundary_support},
      {"prop-4.5-trace", {"mollified"}, check_trace_identity},
      {"lemma-4.6-beta", {"mollified"}, check_beta},
      {"kernel-structure", {"commutators"}, check_kernel_structure},
      {"taylor-reconstruction", {"commutators"}, check_taylor_reconstruction},
      {"taylor-route-consistency", {"commutators"}, check_taylor_route},
      {"prop-4.8-identity", {"commutators"}, check_normal_commutator},
      {"lemma-4.9-order", {"commutators"}, check_q_order},
      {"boundary-commutators", {"commutators"}, check_boundary_commutators},
      {"tangential-zero-order-bound", {"commutators"}, check_rho0tan_bound},
      {"toy-structure", {"pipeline-1", "pipeline-2"}, check_toy_structure},
      {"interior-two-route", {"pipeline-1", "pipeline-2"}, check_interior_routes},
      {"normal-solve", {"pipeline-1", "pipeline-2"}, check_normal_solve},
      {"zero-data", {"pipeline-1", "pipeline-2"}, check_zero_data},
      {"fsystem-residual-s1", {"pipeline-1"},
       [](SuiteEnvironment& e) { return fsystem_check(e, 1); }},
      {"fsystem-residual-s2", {"pipeline-2"},
       [](SuiteEnvironment& e) { return fsystem_check(e, 2); }},
      {"chain-bounds-s1", {"pipeline-1"},
       [](SuiteEnvironment& e) { return chain_check(e, 1); }},
      {"chain-bounds-s2", {"pipeline-2"},
       [](SuiteEnvironment& e) { return chain_check(e, 2); }},
      {"theorem-final-s1", {"pipeline-1"},
       [](SuiteEnvironment& e) { return demo_check(e, 1); }},
      {"theorem-final-s2", {"pipeline-2"},
       [](SuiteEnvironment& e) { return demo_check(e, 2); }},
  };
  return registry;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "transforms", "symbols",    "mollified", "commutators",
      "pipeline-1", "pipeline-2", "all"};
  return names;
}

std::vector<CheckResult> run_suite(SuiteEnvironment& env,
                                   const std::string& suite) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) ==
      suite_names().end())
    throw std::invalid_argument("unknown suite '" + suite + "'");
  std::vector<CheckResult> out;
  for (const auto& spec : check_registry()) {
    const bool enabled =
        suite == "all" || std::find(spec.suites.begin(), spec.suites.end(),
                                    suite) != spec.suites.end();
    if (!enabled) continue;
    const double t0 = now_s();
    CheckResult r = spec.fn(env);
    r.runtime_s = now_s() - t0;
    r.id = spec.id;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace conormal
