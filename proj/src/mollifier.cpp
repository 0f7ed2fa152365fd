#include "conormal/mollifier.hpp"

#include "conormal/quadrature.hpp"

namespace conormal {

// ---------------------------------------------------------------------------
// CutoffSpec
// ---------------------------------------------------------------------------
namespace {

double smoothstep(double s) {
  // 0 at s <= 0, 1 at s >= 1, C-infinity in between.
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  const double e1 = std::exp(-1.0 / s), e2 = std::exp(-1.0 / (1.0 - s));
  return e1 / (e1 + e2);
}

double smoothstep_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double e1 = std::exp(-1.0 / s), e2 = std::exp(-1.0 / (1.0 - s));
  const double d1 = e1 / (s * s), d2 = -e2 / ((1.0 - s) * (1.0 - s));
  return (d1 * (e1 + e2) - e1 * (d1 + d2)) / ((e1 + e2) * (e1 + e2));
}

double smoothstep_deriv2(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  const double u = 1.0 - s;
  const double e1 = std::exp(-1.0 / s), e2 = std::exp(-1.0 / u);
  const double d1 = e1 / (s * s);
  const double d2 = -e2 / (u * u);
  const double dd1 = e1 * (1.0 / (s * s * s * s) - 2.0 / (s * s * s));
  const double dd2 = e2 * (1.0 / (u * u * u * u) - 2.0 / (u * u * u));
  const double D = e1 + e2, Dp = d1 + d2, Dpp = dd1 + dd2;
  return (dd1 * D - e1 * Dpp) / (D * D) -
         2.0 * Dp * (d1 * D - e1 * Dp) / (D * D * D);
}

}  // namespace

double CutoffSpec::profile(double s) const {
  const double p = plateau(), q = support1d();
  const double a = std::abs(s);
  if (a <= p) return 1.0;
  if (a >= q) return 0.0;
  return smoothstep((q - a) / (q - p));
}

double CutoffSpec::profile_deriv(double s) const {
  const double p = plateau(), q = support1d();
  const double a = std::abs(s);
  if (a <= p || a >= q) return 0.0;
  const double d = smoothstep_deriv((q - a) / (q - p)) * (-1.0 / (q - p));
  return s >= 0.0 ? d : -d;
}

double CutoffSpec::profile_deriv2(double s) const {
  const double p = plateau(), q = support1d();
  const double a = std::abs(s);
  if (a <= p || a >= q) return 0.0;
  return smoothstep_deriv2((q - a) / (q - p)) / ((q - p) * (q - p));
}

double CutoffSpec::chi(const double* y) const {
  double v = 1.0;
  for (int a = 0; a < n; ++a) v *= profile(y[a]);
  return v;
}

double CutoffSpec::chi_axis_deriv(const double* y, int axis) const {
  double v = profile_deriv(y[axis]);
  for (int a = 0; a < n; ++a)
    if (a != axis) v *= profile(y[a]);
  return v;
}

CutoffSpec build_cutoff(double delta0, int n, double safety) {
  if (!(delta0 > 0.0 && delta0 < 1.0))
    throw std::invalid_argument("build_cutoff: delta0 must lie in (0,1)");
  if (n >= 4 || n < 2)
    throw std::invalid_argument(
        "build_cutoff: tensor cutoff requires n = 2 or 3");
  if (!(safety > 0.0 && safety <= 1.0))
    throw std::invalid_argument("build_cutoff: safety must lie in (0,1]");
  CutoffSpec cut;
  cut.n = n;
  cut.delta0 = delta0;
  cut.eps0 = safety * std::min(std::log(1.0 / delta0), 1.0 - delta0);
  return cut;
}

CutoffSpec make_cutoff_unchecked(double delta0, int n, double eps0) {
  CutoffSpec cut;
  cut.n = n;
  cut.delta0 = delta0;
  cut.eps0 = eps0;
  return cut;
}

// ---------------------------------------------------------------------------
// Extended lattice
// ---------------------------------------------------------------------------
Lattice extended_symbol_lattice(const HalfSpaceGrid& grid,
                                const std::vector<int>& factors) {
  const Lattice base = grid.interior();
  const int d = base.dim();
  std::vector<int> size(d);
  std::vector<double> org(d), stp(d);
  for (int a = 0; a < d; ++a) {
    size[a] = base.extent(a) * factors[a];
    const double period = base.length(a);  // frequency spacing is preserved
    stp[a] = period / size[a];
    org[a] = -0.5 * period;
  }
  return Lattice(size, org, stp);
}

std::vector<int> default_extension_factors(const HalfSpaceGrid& grid) {
  if (grid.n == 2) return {8, 2};
  return {2, 1, 1};  // smoke-grade for n = 3
}

cplx KernelPack::evaluate(const double* xi) const {
  cplx acc = 0.0;
  const int d = dim();
  for (std::ptrdiff_t p = 0; p < size(); ++p) {
    double arg = 0.0;
    for (int a = 0; a < d; ++a) arg -= xi[a] * y[a][p];
    acc += w[p] * std::polar(1.0, arg);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// mollified_weight
// ---------------------------------------------------------------------------
namespace {

// Restrict a table over the extended lattice to the field lattice: both share
// the frequency spacing, so a wrapped field index maps to a wrapped extended
// index with the same wavenumber.
std::vector<cplx> restrict_table(const Lattice& ext, const Lattice& field,
                                 const GridArray& tab) {
  const int d = field.dim();
  std::vector<cplx> out(field.count());
  std::vector<int> idx(d), eidx(d);
  for (std::ptrdiff_t i = 0; i < field.count(); ++i) {
    field.unravel(i, idx.data());
    for (int a = 0; a < d; ++a) {
      int wnum = idx[a] < field.extent(a) / 2 ? idx[a] : idx[a] - field.extent(a);
      eidx[a] = wnum >= 0 ? wnum : wnum + ext.extent(a);
    }
    out[i] = tab[ext.ravel(eidx.data())];
  }
  return out;
}

}  // namespace

MollifiedWeight mollified_weight(const HalfSpaceGrid& grid, double m,
                                 double gamma, const CutoffSpec& cut,
                                 std::vector<int> factors) {
  if (factors.empty()) factors = default_extension_factors(grid);
  const Lattice ext = extended_symbol_lattice(grid, factors);
  const Lattice field = grid.interior();
  const int d = ext.dim();

  // Kernel resolution guard: the per-axis cutoff support must be resolved.
  for (int a = 0; a < d; ++a)
    if (cut.support1d() < 8.0 * ext.step(a))
      throw std::invalid_argument(
          "mollified_weight: extended grid too coarse to resolve the cutoff; "
          "increase the extension factor on axis " + std::to_string(a));

  // lambda on the extended frequencies (index k <-> ext.freq(k)).
  GridArray lam(ext);
  {
    WeightPow wp(m);
    const double g2 = gamma * gamma;
    std::vector<int> idx(d);
    for (std::ptrdiff_t i = 0; i < ext.count(); ++i) {
      ext.unravel(i, idx.data());
      double q = g2;
      for (int a = 0; a < d; ++a) {
        const double f = ext.freq(a, idx[a]);
        q += f * f;
      }
      lam[i] = wp(q);
    }
  }

  // Dual-domain kernel, truncated by chi.
  GridArray kernel = Fft::backward(lam);
  GridArray trunc(ext);
  auto pack = std::make_shared<KernelPack>();
  pack->y.resize(d);
  double peak = 0.0, edge = 0.0;
  {
    std::vector<int> idx(d);
    std::vector<double> y(d);
    const double cellv = ext.cell_volume();
    for (std::ptrdiff_t i = 0; i < ext.count(); ++i) {
      ext.unravel(i, idx.data());
      for (int a = 0; a < d; ++a) y[a] = ext.coord(a, idx[a]);
      const double c = cut.chi(y.data());
      if (c == 0.0) continue;
      trunc[i] = c * kernel[i];
      const double mag = std::abs(trunc[i]);
      peak = std::max(peak, mag);
      // leakage diagnostic: kernel magnitude in the outer band of the support
      double rr = 0.0;
      for (int a = 0; a < d; ++a) rr = std::max(rr, std::abs(y[a]) / cut.support1d());
      if (rr > 0.9) edge = std::max(edge, mag);
      for (int a = 0; a < d; ++a) pack->y[a].push_back(y[a]);
      pack->w.push_back(trunc[i] * cellv);
    }
  }

  GridArray chi_ext = Fft::forward(trunc);

  MollifiedWeight out;
  out.order = m;
  out.gamma = gamma;
  out.tail_leak = peak > 0.0 ? edge / peak : 0.0;
  out.kernel = pack;

  std::vector<cplx> chi_tab = restrict_table(ext, field, chi_ext);
  std::vector<cplx> rem_tab(field.count());
  {
    WeightPow wp(m);
    const double g2 = gamma * gamma;
    std::vector<int> idx(d);
    for (std::ptrdiff_t i = 0; i < field.count(); ++i) {
      field.unravel(i, idx.data());
      double q = g2;
      for (int a = 0; a < d; ++a) {
        const double f = field.freq(a, idx[a]);
        q += f * f;
      }
      rem_tab[i] = cplx(wp(q), 0.0) - chi_tab[i];
    }
  }

  out.chi_table = MultiplierSymbol(m, gamma, field, std::move(chi_tab));
  {
    auto kp = out.kernel;
    out.chi_table.set_evaluator(
        [kp](const double* xi) { return kp->evaluate(xi); });
  }
  out.rem_table = MultiplierSymbol(m, gamma, field, std::move(rem_tab));
  {
    auto kp = out.kernel;
    const int nd = d;
    out.rem_table.set_evaluator([kp, m, gamma, nd](const double* xi) {
      return cplx(weight_value(m, gamma, xi, nd), 0.0) - kp->evaluate(xi);
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Boundary symbol
// ---------------------------------------------------------------------------
namespace {

// Sampled 1-D window transform: values of f on a fine symmetric grid and the
// evaluation hat(f)(eta) = sum f(x) e^{-i eta x} dx.
struct WindowTransform {
  std::vector<double> x, fx;
  double dx = 0.0;
  cplx operator()(double eta) const {
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
      re += fx[i] * std::cos(eta * x[i]);
      im -= fx[i] * std::sin(eta * x[i]);
    }
    return cplx(re * dx, im * dx);
  }
};

WindowTransform make_window_fn(const std::function<double(double)>& f,
                               double halfwidth, double fine_step) {
  WindowTransform wt;
  const int half = static_cast<int>(std::ceil(halfwidth / fine_step)) + 2;
  wt.dx = fine_step;
  for (int i = -half; i <= half; ++i) {
    const double s = i * fine_step;
    wt.x.push_back(s);
    wt.fx.push_back(f(s));
  }
  return wt;
}

WindowTransform make_window(const CutoffSpec& cut, bool with_exp_half,
                            double fine_step) {
  return make_window_fn(
      [&cut, with_exp_half](double s) {
        double v = cut.profile(s);
        if (with_exp_half) v *= std::exp(0.5 * s);
        return v;
      },
      cut.support1d(), fine_step);
}

// Adaptive symmetric truncation radius: first eta = j*step (j >= jmin) past
// which |hat| stays below rel_tol * max for 64 consecutive samples.
double scan_decay_radius(const WindowTransform& wt, double step,
                         double rel_tol, double hard_cap) {
  double peak = 0.0;
  int quiet = 0;
  for (double eta = 0.0; eta <= hard_cap; eta += step) {
    const double v = std::abs(wt(eta));
    peak = std::max(peak, v);
    if (v < rel_tol * peak)
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 64 && eta > 8.0) return eta;
  }
  throw std::runtime_error(
      "boundary_symbol: window transform does not reach the tail tolerance "
      "within the hard cap; refine the eta grid");
}

}  // namespace

BoundarySymbol boundary_symbol(const HalfSpaceGrid& grid, double m,
                               double gamma, const CutoffSpec& cut) {
  const Lattice blat = grid.boundary();
  const int nb = blat.dim();
  const int n = grid.n;

  const double fine = blat.step(0) / 16.0;
  WindowTransform phi1 = make_window(cut, /*with_exp_half=*/true, fine);
  WindowTransform chit = make_window(cut, /*with_exp_half=*/false, fine);

  const double d1 = 0.25;
  const double H1 = scan_decay_radius(phi1, d1, 1e-10, 12000.0);
  const double d2 = blat.freq_step(0) / 8.0;
  const double H2 = scan_decay_radius(chit, d2, 1e-10, 12000.0);

  // Tabulate the window transforms on their eta grids.
  const int M1 = static_cast<int>(H1 / d1);
  const int M2 = static_cast<int>(H2 / d2);
  std::vector<cplx> f1(2 * M1 + 1), f2(2 * M2 + 1);
  for (int j = -M1; j <= M1; ++j) f1[j + M1] = phi1(j * d1);
  for (int j = -M2; j <= M2; ++j) f2[j + M2] = chit(j * d2);

  // Tail estimate: relative weight of the outermost octave.
  auto octave_tail = [](const std::vector<cplx>& f) {
    double total = 0.0, outer = 0.0;
    const int M = static_cast<int>(f.size());
    for (int i = 0; i < M; ++i) {
      const double v = std::abs(f[i]);
      total += v;
      if (std::abs(i - M / 2) > (3 * (M / 2)) / 4) outer += v;
    }
    return total > 0.0 ? outer / total : 0.0;
  };

  BoundarySymbol out;
  out.order = m;
  out.gamma = gamma;
  out.tail_estimate = std::max(octave_tail(f1), octave_tail(f2));

  std::vector<cplx> btab(blat.count());

  if (n == 2) {
    // Inner reduction over eta1 on an s-lattice commensurate with xi' + eta2,
    // so no interpolation is needed in the outer sum.  Rows where the window
    // transform is negligible are skipped.
    double peak1 = 0.0;
    for (const auto& v : f1) peak1 = std::max(peak1, std::abs(v));
    std::vector<int> rows;
    std::vector<double> rowr, rowi, rowe;
    for (int j1 = -M1; j1 <= M1; ++j1) {
      if (std::abs(f1[j1 + M1]) < 1e-12 * peak1) continue;
      rows.push_back(j1);
      rowr.push_back(f1[j1 + M1].real());
      rowi.push_back(f1[j1 + M1].imag());
      rowe.push_back(static_cast<double>(j1) * d1);
    }
    const double smax = blat.nyquist(0) + H2 + 2.0 * d2;
    const int Ms = static_cast<int>(std::ceil(smax / d2)) + 2;
    std::vector<cplx> G(2 * Ms + 1, cplx(0.0, 0.0));
    WeightPow wp(m);
    const double g2 = gamma * gamma;
    for (int js = -Ms; js <= Ms; ++js) {
      const double s = js * d2;
      double accr = 0.0, acci = 0.0;
      for (size_t q = 0; q < rows.size(); ++q) {
        const double e1 = rowe[q];
        const double lam = wp(g2 + e1 * e1 + s * s);
        accr += lam * rowr[q];
        acci += lam * rowi[q];
      }
      G[js + Ms] = cplx(accr * d1, acci * d1);
    }
    const double scale = 1.0 / ((2.0 * kPi) * (2.0 * kPi));
    for (int k = 0; k < blat.extent(0); ++k) {
      const double xi = blat.freq(0, k);
      const int jxi = static_cast<int>(std::lround(xi / d2));
      cplx acc = 0.0;
      for (int j2 = -M2; j2 <= M2; ++j2) {
        const int js = jxi + j2;
        if (js < -Ms || js > Ms) continue;
        acc += f2[j2 + M2] * G[js + Ms];
      }
      btab[k] = acc * (d2 * scale);
    }
  } else {
    // n == 3, smoke-grade: radial inner reduction plus a pruned tensor sum.
    const double rmax = std::hypot(blat.nyquist(0) + H2, blat.nyquist(1) + H2) + 4.0;
    const double dr = 0.5;
    const int Mr = static_cast<int>(std::ceil(rmax / dr)) + 2;
    std::vector<cplx> G(Mr + 1, cplx(0.0, 0.0));
    WeightPow wp(m);
    const double g2 = gamma * gamma;
    for (int jr = 0; jr <= Mr; ++jr) {
      const double r = jr * dr;
      cplx acc = 0.0;
      for (int j1 = -M1; j1 <= M1; ++j1) {
        const double e1 = j1 * d1;
        acc += wp(g2 + e1 * e1 + r * r) * f1[j1 + M1];
      }
      G[jr] = acc * d1;
    }
    auto G_at = [&](double r) {
      const double u = r / dr;
      const int i = std::min(static_cast<int>(u), Mr - 1);
      const double fr = u - i;
      return G[i] * (1.0 - fr) + G[i + 1] * fr;
    };
    double peak2 = 0.0;
    for (const auto& v : f2) peak2 = std::max(peak2, std::abs(v));
    const double prune = 1e-9 * peak2 * peak2;
    const double scale = std::pow(2.0 * kPi, -3);
    std::vector<int> idx(nb);
    for (std::ptrdiff_t i = 0; i < blat.count(); ++i) {
      blat.unravel(i, idx.data());
      const double x2 = blat.freq(0, idx[0]);
      const double x3 = blat.freq(1, idx[1]);
      cplx acc = 0.0;
      for (int j2 = -M2; j2 <= M2; ++j2) {
        const cplx w2 = f2[j2 + M2];
        if (std::abs(w2) * peak2 < prune) continue;
        for (int j3 = -M2; j3 <= M2; ++j3) {
          const cplx w23 = w2 * f2[j3 + M2];
          if (std::abs(w23) < prune) continue;
          acc += w23 * G_at(std::hypot(x2 + j2 * d2, x3 + j3 * d2));
        }
      }
      btab[i] = acc * (d2 * d2 * scale);
    }
  }

  // Split off the boundary weight.
  std::vector<cplx> beta_tab(blat.count());
  {
    std::vector<int> idx(nb);
    std::vector<double> xi(nb);
    for (std::ptrdiff_t i = 0; i < blat.count(); ++i) {
      blat.unravel(i, idx.data());
      for (int a = 0; a < nb; ++a) xi[a] = blat.freq(a, idx[a]);
      beta_tab[i] = btab[i] - weight_value(m, gamma, xi.data(), nb);
    }
  }
  out.bprime = MultiplierSymbol(m, gamma, blat, std::move(btab));
  out.beta = MultiplierSymbol(m - 2.0, gamma, blat, std::move(beta_tab));
  return out;
}

BoundaryField boundary_trace_apply(const BoundaryField& psi,
                                   const BoundarySymbol& b) {
  return apply_multiplier(psi, b.bprime);
}

std::vector<double> boundary_remainder_taylor(const HalfSpaceGrid& grid,
                                              double m, double gamma,
                                              const CutoffSpec& cut,
                                              const std::vector<double>& xi1d) {
  if (grid.n != 2)
    throw std::invalid_argument(
        "boundary_remainder_taylor: implemented for n = 2");
  const Lattice blat = grid.boundary();
  const double fine = blat.step(0) / 16.0;
  WindowTransform phi1 = make_window(cut, true, fine);
  WindowTransform chit = make_window(cut, false, fine);

  // Order-two Taylor remainder about eta = 0, evaluated directly:
  //   beta(xi') = (2pi)^{-2} II [lambda(e1, xi'+e2) - lambda(0, xi')]
  //                             hat{phi1}(e1) hat{chi~}(e2) de
  // The first-order head drops out exactly: the e1 term since
  // d1 lambda(0, .) = 0, the e2 term by symmetry of the eta2 grid, and the
  // zeroth term integrates to lambda(0, xi') by phi(0) = 1.
  const double d1 = 0.25, d2 = 0.25;
  const double H1 = scan_decay_radius(phi1, d1, 1e-9, 6000.0);
  const double H2 = scan_decay_radius(chit, d2, 1e-9, 6000.0);
  const int M1 = static_cast<int>(H1 / d1);
  const int M2 = static_cast<int>(H2 / d2);
  std::vector<double> f1(2 * M1 + 1), f2(2 * M2 + 1);
  double norm1 = 0.0, norm2 = 0.0;
  for (int j = -M1; j <= M1; ++j) {
    f1[j + M1] = phi1(j * d1).real();  // odd imaginary part integrates out
    norm1 += f1[j + M1] * d1;
  }
  for (int j = -M2; j <= M2; ++j) {
    f2[j + M2] = chit(j * d2).real();
    norm2 += f2[j + M2] * d2;
  }
  // Enforce unit mass of the discrete inverse transforms so the subtracted
  // zeroth-order head cancels exactly rather than to tail accuracy.
  for (auto& v : f1) v *= 2.0 * kPi / norm1;
  for (auto& v : f2) v *= 2.0 * kPi / norm2;

  const WeightPow wp(m);
  const double g2 = gamma * gamma;
  const double scale = d1 * d2 / ((2.0 * kPi) * (2.0 * kPi));

  std::vector<double> out;
  out.reserve(xi1d.size());
  for (double xip : xi1d) {
    const double head = weight_value(m, gamma, &xip, 1);
    double acc = 0.0;
    for (int j1 = -M1; j1 <= M1; ++j1) {
      if (std::abs(f1[j1 + M1]) < 1e-11) continue;
      const double e1 = j1 * d1;
      double inner = 0.0;
      for (int j2 = -M2; j2 <= M2; ++j2) {
        const double s = xip + j2 * d2;
        inner += (wp(g2 + e1 * e1 + s * s) - head) * f2[j2 + M2];
      }
      acc += inner * f1[j1 + M1];
    }
    out.push_back(acc * scale);
  }
  return out;
}

// ---------------------------------------------------------------------------
// MollifierBank
// ---------------------------------------------------------------------------
MollifierBank::MollifierBank(HalfSpaceGrid grid, CutoffSpec cut,
                             std::vector<int> factors)
    : grid_(std::move(grid)), cut_(cut),
      factors_(factors.empty() ? default_extension_factors(grid_)
                               : std::move(factors)) {}

const MollifiedWeight& MollifierBank::weight(double m, double gamma) {
  auto key = std::make_pair(m, gamma);
  auto it = weights_.find(key);
  if (it == weights_.end())
    it = weights_.emplace(key, mollified_weight(grid_, m, gamma, cut_, factors_))
             .first;
  return it->second;
}

const BoundarySymbol& MollifierBank::boundary(double m, double gamma) {
  auto key = std::make_pair(m, gamma);
  auto it = boundaries_.find(key);
  if (it == boundaries_.end())
    it = boundaries_.emplace(key, boundary_symbol(grid_, m, gamma, cut_)).first;
  return it->second;
}

const MultiplierSymbol& MollifierBank::lambda_interior(double s, double gamma) {
  auto key = std::make_pair(s, gamma);
  auto it = lam_int_.find(key);
  if (it == lam_int_.end())
    it = lam_int_.emplace(key, weight_symbol(grid_.interior(), s, gamma)).first;
  return it->second;
}

const MultiplierSymbol& MollifierBank::lambda_boundary(double s, double gamma) {
  auto key = std::make_pair(s, gamma);
  auto it = lam_bdy_.find(key);
  if (it == lam_bdy_.end())
    it = lam_bdy_.emplace(key, weight_symbol(grid_.boundary(), s, gamma)).first;
  return it->second;
}

HalfSpaceField apply_mollified(const HalfSpaceField& u, const MollifiedWeight& w,
                               const BoundarySymbol* btrace) {
  HalfSpaceField out = op_conormal(u, w.chi_table);
  if (btrace && u.has_trace())
    out.set_trace(boundary_trace_apply(u.trace(), *btrace));
  return out;
}

HalfSpaceField remainder_apply(const HalfSpaceField& u, MollifierBank& bank,
                               double m, double gamma) {
  return op_conormal(u, bank.weight(m, gamma).rem_table);
}

// ---------------------------------------------------------------------------
// Verification helpers
// ---------------------------------------------------------------------------
double loglog_slope(const std::vector<double>& gammas,
                    const std::vector<double>& ratios, double glo, double ghi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] < glo || gammas[i] > ghi) continue;
    if (!(ratios[i] > 0.0)) continue;
    const double x = std::log(gammas[i]), y = std::log(ratios[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

DecayReport verify_smoothing_decay(const HalfSpaceField& u, MollifierBank& bank,
                                   double m, int p,
                                   const std::vector<double>& sweep) {
  if (p < 1 || p > 3)
    throw std::invalid_argument("verify_smoothing_decay: p must be 1, 2 or 3");
  DecayReport rep;
  const double base = u.l2();
  if (base == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  for (double g : sweep) {
    HalfSpaceField ru = remainder_apply(u, bank, m, g);
    rep.gammas.push_back(g);
    rep.ratios.push_back(htan_norm(ru, p, g) / base);
  }
  rep.slope = loglog_slope(rep.gammas, rep.ratios, 4.0, 64.0);
  rep.pass = rep.slope <= -3.0;
  return rep;
}

SupportReport verify_support_preservation(const HalfSpaceField& u,
                                          MollifierBank& bank, double m,
                                          double gamma) {
  HalfSpaceField v = apply_mollified(u, bank.weight(m, gamma));
  SupportReport rep;
  rep.mass_outside = v.mass_outside_unit();
  rep.pass = rep.mass_outside <= 1e-6;
  return rep;
}

double verify_trace_identity(const HalfSpaceField& u, MollifierBank& bank,
                             double m, double gamma) {
  if (!u.generator())
    throw std::invalid_argument("verify_trace_identity: generator required");
  const MollifiedWeight& mw = bank.weight(m, gamma);
  const BoundarySymbol& bs = bank.boundary(m, gamma);
  const Lattice blat = bank.grid().boundary();
  const int N = u.components();
  const auto& gen = *u.generator();
  const KernelPack& kp = *mw.kernel;
  const int d = kp.dim();

  // Route 1: direct quadrature of the boundary kernel formula,
  //   sum_p w_p e^{-y1_p/2} u(0, x' - y'_p).
  BoundaryField lhs(blat, N);
  std::vector<int> idx(blat.dim());
  std::vector<double> xe(d);
  xe[0] = 0.0;
  for (std::ptrdiff_t i = 0; i < blat.count(); ++i) {
    blat.unravel(i, idx.data());
    for (int c = 0; c < N; ++c) {
      cplx acc = 0.0;
      for (std::ptrdiff_t p = 0; p < kp.size(); ++p) {
        for (int a = 1; a < d; ++a)
          xe[a] = blat.coord(a - 1, idx[a - 1]) - kp.y[a][p];
        acc += kp.w[p] * std::exp(-0.5 * kp.y[0][p]) * gen.value(c, xe.data());
      }
      lhs.comp(c)[i] = acc;
    }
  }

  // Route 2: boundary multiplier acting on the exact trace.
  BoundaryField rhs = boundary_trace_apply(u.trace(), bs);

  const double scale = std::max(lhs.l2(), rhs.l2());
  if (scale == 0.0) return 0.0;
  return (lhs - rhs).l2() / scale;
}

}  // namespace conormal
