#include "conormal/symbols.hpp"

#include "conormal/operators.hpp"

namespace conormal {

// ---------------------------------------------------------------------------
// MultiplierSymbol
// ---------------------------------------------------------------------------
MultiplierSymbol MultiplierSymbol::pointwise_product(
    const MultiplierSymbol& o) const {
  MultiplierSymbol out(order_ + o.order_, gamma_, lat_, table_);
  for (size_t i = 0; i < out.table().size(); ++i) out.table()[i] *= o.table_[i];
  return out;
}

MultiplierSymbol MultiplierSymbol::pointwise_difference(
    const MultiplierSymbol& o) const {
  MultiplierSymbol out(std::max(order_, o.order_), gamma_, lat_, table_);
  for (size_t i = 0; i < out.table().size(); ++i) out.table()[i] -= o.table_[i];
  return out;
}

MultiplierSymbol weight_symbol(const Lattice& lat, double s, double gamma) {
  if (gamma < 1.0) throw std::invalid_argument("weight_symbol: gamma must be >= 1");
  const int d = lat.dim();
  std::vector<cplx> tab(lat.count());
  std::vector<int> idx(d);
  std::vector<double> xi(d);
  for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
    lat.unravel(i, idx.data());
    for (int a = 0; a < d; ++a) xi[a] = lat.freq(a, idx[a]);
    tab[i] = weight_value(s, gamma, xi.data(), d);
  }
  MultiplierSymbol sym(s, gamma, lat, std::move(tab));
  sym.set_evaluator([s, gamma, d](const double* q) {
    return cplx(weight_value(s, gamma, q, d), 0.0);
  });
  return sym;
}

MultiplierSymbol constant_symbol(const Lattice& lat, cplx c, double gamma) {
  MultiplierSymbol sym(0.0, gamma, lat,
                       std::vector<cplx>(lat.count(), c));
  sym.set_evaluator([c](const double*) { return c; });
  return sym;
}

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------
namespace {

GridArray apply_table(const GridArray& hat, const MultiplierSymbol& a) {
  if (!(hat.lattice() == a.lattice()))
    throw std::invalid_argument("apply_multiplier: lattice mismatch");
  GridArray w = hat;
  for (std::ptrdiff_t i = 0; i < w.size(); ++i) w[i] *= a.at(i);
  return Fft::backward(w);
}

}  // namespace

FullSpaceField apply_multiplier(const FullSpaceField& v,
                                const MultiplierSymbol& a) {
  FullSpaceField out(v.lattice(), v.components());
  for (int c = 0; c < v.components(); ++c) out.comp(c) = apply_table(v.hat(c), a);
  return out;
}

BoundaryField apply_multiplier(const BoundaryField& v,
                               const MultiplierSymbol& a) {
  BoundaryField out(v.lattice(), v.components());
  for (int c = 0; c < v.components(); ++c) out.comp(c) = apply_table(v.hat(c), a);
  return out;
}

HalfSpaceField op_conormal(const HalfSpaceField& u, const MultiplierSymbol& a) {
  FullSpaceField v = sharp_transform(u, /*support_tol=*/-1.0);
  FullSpaceField w = apply_multiplier(v, a);
  // Composed operators may produce near-zero fields whose flat left edge is
  // harmless; the decay flag stays informational here.
  bool ok = true;
  return sharp_inverse(u.grid(), w, &ok);
}

// ---------------------------------------------------------------------------
// SeparatedSymbol
// ---------------------------------------------------------------------------
cplx SeparatedSymbol::evaluate(const double* x, const double* xi, int r,
                               int c) const {
  cplx acc = 0.0;
  for (const auto& mode : modes_) {
    double phase = 0.0;
    for (size_t a = 0; a < mode.theta.size(); ++a) phase += mode.theta[a] * x[a];
    acc += mode.coeff(r, c) * std::polar(1.0, phase) * mode.mult.evaluate(xi);
  }
  return acc;
}

bool SeparatedSymbol::conjugate_paired(double tol) const {
  for (const auto& m : modes_) {
    bool found = false;
    for (const auto& o : modes_) {
      bool neg = true;
      for (size_t a = 0; a < m.theta.size(); ++a)
        if (std::abs(m.theta[a] + o.theta[a]) > 1e-12) { neg = false; break; }
      if (!neg) continue;
      if ((m.coeff - o.coeff.conjugate()).cwiseAbs().maxCoeff() <= tol) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

namespace {

// Pointwise e^{i theta . x} over a lattice; for the interior lattice the
// coordinates are (t, x') with the same phase convention as the symbols.
std::vector<cplx> mode_phase(const Lattice& lat,
                             const std::vector<double>& theta) {
  const int d = lat.dim();
  std::vector<cplx> ph(lat.count());
  std::vector<int> idx(d);
  for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
    lat.unravel(i, idx.data());
    double arg = 0.0;
    for (int a = 0; a < d; ++a) arg += theta[a] * lat.coord(a, idx[a]);
    ph[i] = std::polar(1.0, arg);
  }
  return ph;
}

template <class FieldT>
FieldT apply_separated_impl(const FieldT& u, const SeparatedSymbol& a,
                            const Lattice& lat) {
  if (u.components() != a.cols())
    throw std::invalid_argument("apply_separated: component count mismatch");
  FieldT out(lat, a.rows());
  for (const auto& mode : a.modes()) {
    // Multiplier part applied per input component once for this mode.
    std::vector<GridArray> w;
    w.reserve(a.cols());
    for (int c = 0; c < a.cols(); ++c) w.push_back(apply_table(u.hat(c), mode.mult));
    const std::vector<cplx> ph = mode_phase(lat, mode.theta);
    for (int r = 0; r < a.rows(); ++r) {
      GridArray& dst = out.comp(r);
      for (int c = 0; c < a.cols(); ++c) {
        const cplx m = mode.coeff(r, c);
        if (m == cplx(0.0, 0.0)) continue;
        const GridArray& src = w[c];
        for (std::ptrdiff_t i = 0; i < dst.size(); ++i)
          dst[i] += m * ph[i] * src[i];
      }
    }
  }
  return out;
}

}  // namespace

HalfSpaceField apply_separated(const HalfSpaceField& u,
                               const SeparatedSymbol& a) {
  FullSpaceField v = sharp_transform(u, -1.0);
  FullSpaceField w = apply_separated_impl(v, a, v.lattice());
  bool ok = true;
  return sharp_inverse(u.grid(), w, &ok);
}

BoundaryField apply_separated(const BoundaryField& u,
                              const SeparatedSymbol& a) {
  return apply_separated_impl(u, a, u.lattice());
}

// ---------------------------------------------------------------------------
// Semi-norms
// ---------------------------------------------------------------------------
double SemiNormReport::value(int k) const {
  double m = 0.0;
  for (const auto& e : entries) {
    int tot = 0;
    for (int v : e.alpha) tot += v;
    for (int v : e.beta) tot += v;
    if (tot <= k) m = std::max(m, e.sup);
  }
  return m;
}

double SemiNormReport::gamma_drift(int k) const {
  double worst = 0.0;
  for (const auto& e : entries) {
    int tot = 0;
    for (int v : e.alpha) tot += v;
    for (int v : e.beta) tot += v;
    if (tot > k) continue;
    double lo = 1e300, hi = 0.0;
    for (double v : e.per_gamma) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (lo <= 0.0 || hi <= 0.0) continue;
    worst = std::max(worst, (hi - lo) / hi);
  }
  return worst;
}

bool SemiNormReport::gamma_stable(int k, double tol) const {
  const double scale = std::max(value(0), 1.0);
  for (const auto& e : entries) {
    int tot = 0;
    for (int v : e.alpha) tot += v;
    for (int v : e.beta) tot += v;
    if (tot > k) continue;
    // entries at the finite-difference noise floor carry no information
    if (e.sup <= 1e-8 * scale) continue;
    if (!drift_pass(e.per_gamma, tol)) return false;
  }
  return true;
}

namespace {

// 4th-order central first-derivative stencil applied recursively over the
// requested multi-indices.
cplx fd_eval(const SymbolProbe& a, std::vector<double>& x,
             std::vector<double>& xi, double gamma, std::vector<int>& alpha,
             std::vector<int>& beta, double h) {
  for (int ax = 0; ax < a.dim; ++ax) {
    if (alpha[ax] > 0) {
      --alpha[ax];
      const double x0 = xi[ax];
      auto at = [&](double off) {
        xi[ax] = x0 + off;
        const cplx v = fd_eval(a, x, xi, gamma, alpha, beta, h);
        xi[ax] = x0;
        return v;
      };
      const cplx d = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) /
                     (12.0 * h);
      ++alpha[ax];
      return d;
    }
  }
  for (int ax = 0; ax < a.x_dim; ++ax) {
    if (beta[ax] > 0) {
      --beta[ax];
      const double x0 = x[ax];
      auto at = [&](double off) {
        x[ax] = x0 + off;
        const cplx v = fd_eval(a, x, xi, gamma, alpha, beta, h);
        x[ax] = x0;
        return v;
      };
      const cplx d = (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) /
                     (12.0 * h);
      ++beta[ax];
      return d;
    }
  }
  return a.f(a.x_dependent ? x.data() : nullptr, xi.data(), gamma);
}

void enumerate_multi(int dim, int total, std::vector<int>& cur, int axis,
                     std::vector<std::vector<int>>& out) {
  if (axis == dim) {
    if (total == 0) out.push_back(cur);
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur[axis] = v;
    enumerate_multi(dim, total - v, cur, axis + 1, out);
  }
  cur[axis] = 0;
}

}  // namespace

SemiNormReport estimate_seminorm(const SymbolProbe& a, double m, int k,
                                 const SeminormSampling& sampling) {
  if (k > 4)
    throw std::invalid_argument(
        "estimate_seminorm: k > 4 exceeds the step/rounding budget");

  SemiNormReport rep;
  rep.order = m;
  rep.max_k = k;
  rep.sweep = sampling.sweep;

  // All (alpha, beta) with |alpha| + |beta| <= k.
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs;
  const int xd = a.x_dependent ? a.x_dim : 0;
  for (int ka = 0; ka <= k; ++ka) {
    std::vector<std::vector<int>> alphas;
    std::vector<int> cur(a.dim, 0);
    enumerate_multi(a.dim, ka, cur, 0, alphas);
    for (int kb = 0; ka + kb <= k; ++kb) {
      std::vector<std::vector<int>> betas;
      if (xd > 0) {
        std::vector<int> curb(xd, 0);
        enumerate_multi(xd, kb, curb, 0, betas);
      } else if (kb == 0) {
        betas.push_back({});
      }
      for (const auto& al : alphas)
        for (const auto& be : betas) pairs.emplace_back(al, be);
    }
  }

  std::vector<std::vector<double>> xpts = sampling.x_points;
  if (xpts.empty()) xpts.push_back(std::vector<double>(std::max(xd, 1), 0.0));

  for (auto& [alpha, beta] : pairs) {
    SemiNormEntry entry;
    entry.alpha = alpha;
    entry.beta = beta;
    entry.per_gamma.assign(sampling.sweep.size(), 0.0);
    int ka = 0;
    for (int v : alpha) ka += v;

    for (size_t gi = 0; gi < sampling.sweep.size(); ++gi) {
      const double gamma = sampling.sweep[gi];
      const double shells[4] = {0.0, gamma, 4.0 * gamma, sampling.xi_max};
      double sup = 0.0;
      for (double r : shells) {
        if (r > sampling.xi_max) continue;
        for (int dir = 0; dir < sampling.directions; ++dir) {
          std::vector<double> xi(a.dim, 0.0);
          const double ang = 2.0 * kPi * dir / sampling.directions + 0.3;
          if (a.dim == 1) {
            xi[0] = (dir % 2 == 0 ? 1.0 : -1.0) * r;
          } else {
            xi[0] = r * std::cos(ang);
            xi[1] = r * std::sin(ang);
            for (int ax = 2; ax < a.dim; ++ax) xi[ax] = 0.0;
          }
          for (const auto& xp : xpts) {
            std::vector<double> x = xp;
            auto al = alpha;
            auto be = beta;
            const cplx d =
                fd_eval(a, x, xi, gamma, al, be, sampling.fd_step);
            const double wnorm =
                weight_value(-(m - ka), gamma, xi.data(), a.dim);
            sup = std::max(sup, std::abs(d) * wnorm);
          }
          if (r == 0.0) break;  // one sample suffices at the origin shell
        }
      }
      entry.per_gamma[gi] = sup;
      entry.sup = std::max(entry.sup, sup);
    }
    rep.entries.push_back(std::move(entry));
  }
  return rep;
}

SymbolProbe probe_weight(int dim, double s) {
  SymbolProbe p;
  p.dim = dim;
  p.x_dependent = false;
  p.f = [dim, s](const double*, const double* xi, double gamma) {
    return cplx(weight_value(s, gamma, xi, dim), 0.0);
  };
  return p;
}

SymbolProbe probe_from_evaluator(
    int dim, std::function<cplx(const double* xi, double gamma)> f) {
  SymbolProbe p;
  p.dim = dim;
  p.x_dependent = false;
  p.f = [f = std::move(f)](const double*, const double* xi, double gamma) {
    return f(xi, gamma);
  };
  return p;
}

}  // namespace conormal
