#include "conormal/generators.hpp"

namespace conormal {

double Factor::value(double s) const {
  switch (kind) {
    case kGaussian: {
      const double y = (s - c) / w;
      return std::exp(-y * y);
    }
    case kBump: {
      const double y = (s - c) / w;
      if (std::abs(y) >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - y * y));
    }
    case kRightPlateau: {
      if (s <= c) return 1.0;
      if (s >= w) return 0.0;
      const double r = (w - s) / (w - c);
      const double e1 = std::exp(-1.0 / r), e2 = std::exp(-1.0 / (1.0 - r));
      return e1 / (e1 + e2);
    }
    case kLinear:
      return c + w * s;
  }
  return 0.0;
}

double Factor::deriv(double s) const {
  switch (kind) {
    case kGaussian: {
      const double y = (s - c) / w;
      return -2.0 * y / w * std::exp(-y * y);
    }
    case kBump: {
      const double y = (s - c) / w;
      if (std::abs(y) >= 1.0) return 0.0;
      const double q = 1.0 - y * y;
      return std::exp(1.0 - 1.0 / q) * (-2.0 * y / (q * q)) / w;
    }
    case kRightPlateau: {
      if (s <= c || s >= w) return 0.0;
      const double r = (w - s) / (w - c);
      const double e1 = std::exp(-1.0 / r), e2 = std::exp(-1.0 / (1.0 - r));
      const double d1 = e1 / (r * r), d2 = -e2 / ((1.0 - r) * (1.0 - r));
      const double dSdr =
          (d1 * (e1 + e2) - e1 * (d1 + d2)) / ((e1 + e2) * (e1 + e2));
      return dSdr * (-1.0 / (w - c));
    }
    case kLinear:
      return w;
  }
  return 0.0;
}

namespace {

double chain_value(const std::vector<Factor>& fs, double s) {
  double v = 1.0;
  for (const auto& f : fs) v *= f.value(s);
  return v;
}

double chain_deriv(const std::vector<Factor>& fs, double s) {
  // product rule over the per-axis chain
  double d = 0.0;
  for (size_t k = 0; k < fs.size(); ++k) {
    double term = fs[k].deriv(s);
    for (size_t m = 0; m < fs.size(); ++m)
      if (m != k) term *= fs[m].value(s);
    d += term;
  }
  return d;
}

}  // namespace

cplx Atom::value(const double* x) const {
  const int n = static_cast<int>(chain.size());
  double phase = 0.0, mag = 1.0;
  for (int a = 0; a < n; ++a) {
    phase += omega[a] * x[a];
    mag *= chain_value(chain[a], x[a]);
  }
  return amp * mag * std::polar(1.0, phase);
}

cplx Atom::deriv(int axis, const double* x) const {
  const int n = static_cast<int>(chain.size());
  double phase = 0.0;
  double others = 1.0, va = 1.0, da = 0.0;
  for (int a = 0; a < n; ++a) {
    phase += omega[a] * x[a];
    if (a == axis) {
      va = chain_value(chain[a], x[a]);
      da = chain_deriv(chain[a], x[a]);
    } else {
      others *= chain_value(chain[a], x[a]);
    }
  }
  const cplx osc = std::polar(1.0, phase);
  return amp * others * osc * (da + cplx(0.0, omega[axis]) * va);
}

cplx GeneratedField::value(int comp, const double* x) const {
  cplx v = 0.0;
  for (const auto& a : atoms_[comp]) v += a.value(x);
  return v;
}

cplx GeneratedField::deriv(int comp, int axis, const double* x) const {
  cplx v = 0.0;
  for (const auto& a : atoms_[comp]) v += a.deriv(axis, x);
  return v;
}

cplx GeneratedBoundary::value(const double* xp) const {
  cplx v = 0.0;
  for (const auto& a : atoms_) v += a.value(xp);
  return v;
}

BoundaryField GeneratedBoundary::sample(const Lattice& blat, int comps) const {
  BoundaryField out(blat, comps);
  std::vector<int> idx(blat.dim());
  std::vector<double> xp(blat.dim());
  for (std::ptrdiff_t i = 0; i < blat.count(); ++i) {
    blat.unravel(i, idx.data());
    for (int a = 0; a < blat.dim(); ++a) xp[a] = blat.coord(a, idx[a]);
    const cplx v = value(xp.data());
    for (int c = 0; c < comps; ++c) out.comp(c)[i] = v;
  }
  return out;
}

namespace {

// Interior atom for one component.  `style` selects the normal profile:
// 0 = gaussian envelope, 1 = exact one-sided plateau bump.
Atom make_interior_atom(Rng& rng, int n, double d0, int style, double osc_max) {
  Atom at;
  at.amp = std::polar(rng.uniform(0.4, 1.0), rng.uniform(0.0, 2.0 * kPi));
  at.omega.assign(n, 0.0);
  at.chain.resize(n);

  // Normal-direction factor: nonzero at x1 = 0, gone by x1 = delta0.
  if (style == 0) {
    Factor g{Factor::kGaussian, 0.0, rng.uniform(d0 / 7.0, d0 / 5.5)};
    at.chain[0].push_back(g);
    // occasional linear modulation keeps the family from being pure tensor
    if (rng.pick(2) == 0)
      at.chain[0].push_back(Factor{Factor::kLinear, 1.0, rng.uniform(-0.8, 0.8)});
  } else {
    at.chain[0].push_back(
        Factor{Factor::kRightPlateau, 0.08 * d0, rng.uniform(0.9, 0.97) * d0});
    if (rng.pick(2) == 0)
      at.chain[0].push_back(Factor{Factor::kLinear, 1.0, rng.uniform(-0.8, 0.8)});
  }

  for (int a = 1; a < n; ++a) {
    if (style == 0) {
      const double w = rng.uniform(d0 / 7.0, d0 / 6.0);
      const double c = rng.uniform(-0.05, 0.05) * d0;
      at.chain[a].push_back(Factor{Factor::kGaussian, c, w});
    } else {
      const double w = rng.uniform(0.86, 0.92) * d0;
      const double cmax = 0.97 * d0 - w;
      const double c = cmax > 0.0 ? rng.uniform(-cmax, cmax) : 0.0;
      at.chain[a].push_back(Factor{Factor::kBump, c, w});
    }
    at.omega[a] = rng.uniform(-osc_max, osc_max);
  }
  // Mild oscillation in the normal coordinate as well.
  at.omega[0] = rng.uniform(-0.5, 0.5) * osc_max;
  return at;
}

Atom make_boundary_atom(Rng& rng, int nb, double d0, int style, double osc_max) {
  Atom at;
  at.amp = std::polar(rng.uniform(0.4, 1.0), rng.uniform(0.0, 2.0 * kPi));
  at.omega.assign(nb, 0.0);
  at.chain.resize(nb);
  for (int a = 0; a < nb; ++a) {
    if (style == 0) {
      at.chain[a].push_back(Factor{Factor::kGaussian,
                                   rng.uniform(-0.05, 0.05) * d0,
                                   rng.uniform(d0 / 7.0, d0 / 6.0)});
    } else {
      const double w = rng.uniform(0.5, 0.75) * d0;
      const double cmax = 0.97 * d0 - w;
      at.chain[a].push_back(Factor{
          Factor::kBump, cmax > 0.0 ? rng.uniform(-cmax, cmax) : 0.0, w});
    }
    at.omega[a] = rng.uniform(-osc_max, osc_max);
  }
  return at;
}

}  // namespace

TestInput sample_test_function(const std::string& family, std::uint64_t seed,
                               const HalfSpaceGrid& grid, int ncomp) {
  const int n = grid.n;
  const double d0 = grid.delta0;
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 0x675f7f3c03bbc1d1ULL);

  int style = 0;
  double osc = 4.0;
  if (family == "bump") {
    style = 1;
    osc = 2.0;
  } else if (family == "gauss") {
    style = 0;
    osc = 6.0;
  } else if (family == "osc") {
    style = 0;
    osc = 14.0;
  } else if (family == "zero") {
    auto gen = std::make_shared<GeneratedField>(
        n, std::vector<std::vector<Atom>>(ncomp));
    TestInput out{HalfSpaceField::from_generator(grid, gen),
                  BoundaryField(grid.boundary(), 1), GeneratedBoundary{}};
    return out;
  } else {
    throw std::invalid_argument("sample_test_function: unknown family '" +
                                family + "'");
  }

  std::vector<std::vector<Atom>> atoms(ncomp);
  for (int c = 0; c < ncomp; ++c) {
    const int k = 1 + rng.pick(2);
    for (int q = 0; q < k; ++q)
      atoms[c].push_back(make_interior_atom(rng, n, d0, style, osc));
  }
  auto gen = std::make_shared<GeneratedField>(n, std::move(atoms));

  std::vector<Atom> batoms;
  const int kb = 1 + rng.pick(2);
  for (int q = 0; q < kb; ++q)
    batoms.push_back(make_boundary_atom(rng, n - 1, d0, style, osc));
  GeneratedBoundary psi_form(n - 1, std::move(batoms));

  TestInput out{HalfSpaceField::from_generator(grid, gen),
                psi_form.sample(grid.boundary()), psi_form};
  return out;
}

const std::vector<std::string>& generator_families() {
  static const std::vector<std::string> fams = {"bump", "gauss", "osc"};
  return fams;
}

}  // namespace conormal
