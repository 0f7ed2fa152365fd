#include "conormal/pipeline.hpp"

#include <numeric>

namespace conormal {

// ---------------------------------------------------------------------------
// Order-zero multipliers and symbol families
// ---------------------------------------------------------------------------
MultiplierSymbol make_order_zero_multiplier(const Lattice& lat, MultKind kind,
                                            double gamma) {
  const int dim = lat.dim();
  std::vector<cplx> tab(lat.count());
  std::vector<int> idx(dim);
  std::vector<double> xi(dim);
  auto value = [kind, gamma, dim](const double* q) -> cplx {
    const double lam = weight_value(-1.0, gamma, q, dim);
    switch (kind) {
      case MultKind::one: return 1.0;
      case MultKind::gamma_weight: return gamma * lam;
      case MultKind::xi_last_weight: return q[dim - 1] * lam;
      case MultKind::xi1_weight: return q[0] * lam;
    }
    return 0.0;
  };
  for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
    lat.unravel(i, idx.data());
    for (int a = 0; a < dim; ++a) xi[a] = lat.freq(a, idx[a]);
    tab[i] = value(xi.data());
  }
  MultiplierSymbol sym(0.0, gamma, lat, std::move(tab));
  sym.set_evaluator([value](const double* q) { return value(q); });
  return sym;
}

void SymbolFamily::add_cosine(const std::vector<double>& theta, double phase,
                              const Eigen::MatrixXd& M, MultKind kind) {
  ModeSpec m1, m2;
  m1.theta = theta;
  m2.theta.resize(theta.size());
  for (size_t a = 0; a < theta.size(); ++a) m2.theta[a] = -theta[a];
  const cplx half = 0.5 * std::polar(1.0, phase);
  m1.coeff = M.cast<cplx>() * half;
  m2.coeff = M.cast<cplx>() * std::conj(half);
  m1.kind = m2.kind = kind;
  modes.push_back(std::move(m1));
  modes.push_back(std::move(m2));
}

SeparatedSymbol SymbolFamily::build(const Lattice& lat, double gamma) const {
  std::vector<SymbolMode> out;
  out.reserve(modes.size());
  for (const auto& m : modes) {
    SymbolMode sm;
    sm.theta = m.theta;
    sm.coeff = m.coeff;
    sm.mult = make_order_zero_multiplier(lat, m.kind, gamma);
    out.push_back(std::move(sm));
  }
  return SeparatedSymbol(0.0, gamma, rows, cols, std::move(out));
}

// ---------------------------------------------------------------------------
// ToyBVP construction
// ---------------------------------------------------------------------------
void ToyBVP::finalize() {
  a1_samples = a1_block.sample(grid);
  a1_inverse = a1_samples.pointwise_inverse(invertibility_margin);

  // Assembled A1: the invertible block plus x1 * H1 for the vanishing part.
  A1_full = MatrixField(grid, N, N);
  const Lattice lat = grid.interior();
  std::vector<int> idx(lat.dim());
  std::vector<double> x1(lat.count());
  for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
    lat.unravel(i, idx.data());
    x1[i] = std::exp(lat.coord(0, idx[0]));
  }
  for (int row = 0; row < N; ++row)
    for (int col = 0; col < N; ++col) {
      GridArray& dst = A1_full.entry(row, col);
      const GridArray& h = H1.entry(row, col);
      for (std::ptrdiff_t i = 0; i < lat.count(); ++i) dst[i] = x1[i] * h[i];
      if (row < r && col < r) {
        const GridArray& a = a1_samples.entry(row, col);
        for (std::ptrdiff_t i = 0; i < lat.count(); ++i) dst[i] += a[i];
      }
    }
}

namespace {

// Real smooth compactly supported scalar entry: a couple of windowed atoms.
std::vector<Atom> coeff_atoms(Rng& rng, int n, double d0, double amp) {
  std::vector<Atom> atoms;
  const int k = 1 + rng.pick(2);
  for (int q = 0; q < k; ++q) {
    Atom at;
    at.amp = rng.uniform(-amp, amp);
    at.omega.assign(n, 0.0);
    at.chain.resize(n);
    at.chain[0].push_back(
        Factor{Factor::kGaussian, 0.0, rng.uniform(0.35, 0.6) * d0});
    if (rng.pick(2) == 0)
      at.chain[0].push_back(Factor{Factor::kLinear, 1.0, rng.uniform(-0.5, 0.5)});
    for (int a = 1; a < n; ++a)
      at.chain[a].push_back(Factor{Factor::kGaussian,
                                   rng.uniform(-0.1, 0.1) * d0,
                                   rng.uniform(0.3, 0.5) * d0});
    atoms.push_back(std::move(at));
  }
  return atoms;
}

MatrixField make_coeff_matrix(const HalfSpaceGrid& grid, Rng& rng, int rows,
                              int cols, double amp,
                              const std::vector<std::pair<int, int>>* only = nullptr) {
  std::vector<std::vector<Atom>> comps(rows * cols);
  for (int rr = 0; rr < rows; ++rr)
    for (int cc = 0; cc < cols; ++cc) {
      bool fill = only == nullptr;
      if (only)
        for (auto& [ar, ac] : *only)
          if (ar == rr && ac == cc) fill = true;
      if (fill) comps[rr * cols + cc] = coeff_atoms(rng, grid.n, grid.delta0, amp);
    }
  auto gen = std::make_shared<GeneratedField>(grid.n, std::move(comps));
  return MatrixField::from_generator(grid, rows, cols, *gen);
}

BoundaryMatrix make_boundary_matrix(
    const Lattice& blat, int rows, int cols,
    const std::function<double(int, int, const double*)>& fn) {
  BoundaryMatrix out(blat, rows, cols);
  std::vector<int> idx(blat.dim());
  std::vector<double> xp(blat.dim());
  for (std::ptrdiff_t i = 0; i < blat.count(); ++i) {
    blat.unravel(i, idx.data());
    for (int a = 0; a < blat.dim(); ++a) xp[a] = blat.coord(a, idx[a]);
    for (int rr = 0; rr < rows; ++rr)
      for (int cc = 0; cc < cols; ++cc)
        out.entry(rr, cc)[i] = fn(rr, cc, xp.data());
  }
  return out;
}

}  // namespace

ToyParams ToyParams::defaults() {
  ToyParams tp;
  tp.a1_c0 = Eigen::MatrixXd{{2.0, 0.3}, {-0.2, 1.7}};
  tp.a1_modes.push_back({{1, 0}, 0.4, Eigen::MatrixXd{{0.12, 0.0}, {0.05, -0.1}}});
  tp.a1_modes.push_back({{0, 1}, 1.1, Eigen::MatrixXd{{0.0, 0.08}, {0.1, 0.06}}});
  tp.a1_modes.push_back({{2, 1}, -0.7, Eigen::MatrixXd{{0.07, -0.04}, {0.0, 0.09}}});
  return tp;
}

ToyBVP make_toy(const HalfSpaceGrid& grid, const ToyParams& params) {
  if (grid.n != 2)
    throw std::invalid_argument("make_toy: the toy problem is 2-d");
  ToyBVP p;
  p.grid = grid;
  p.N = params.N;
  p.r = params.r;
  p.s = params.s;
  p.d = params.d;
  p.invertibility_margin = params.margin;

  const Lattice lat = grid.interior();

  p.a1_block.role = BandLimitedCoefficient::Role::invertible_block;
  p.a1_block.rows = p.a1_block.cols = p.r;
  p.a1_block.c0 = params.a1_c0;
  for (const auto& m : params.a1_modes) {
    std::vector<double> theta(grid.n, 0.0);
    for (int a = 0; a < grid.n; ++a) theta[a] = m.k[a] * lat.freq_step(a);
    p.a1_block.add_cosine_mode(theta, m.phase, m.m);
  }

  Rng rng(params.coefficient_seed);
  // H1: only the vanishing-role blocks (the I,I block of A_1^2 is zero).
  std::vector<std::pair<int, int>> h1mask;
  for (int rr = 0; rr < p.N; ++rr)
    for (int cc = 0; cc < p.N; ++cc)
      if (rr >= p.r || cc >= p.r) h1mask.emplace_back(rr, cc);
  p.H1 = make_coeff_matrix(grid, rng, p.N, p.N, 0.35, &h1mask);
  p.A2 = make_coeff_matrix(grid, rng, p.N, p.N, 0.5);
  p.B = make_coeff_matrix(grid, rng, p.N, p.N, 0.25);

  const Lattice blat = grid.boundary();
  const double w = blat.freq_step(0);
  auto trig = [w](double base, double amp, int k, double phase) {
    return [=](const double* x) { return base + amp * std::cos(k * w * x[0] + phase); };
  };
  auto fill = [&](int rows, int cols, double base_scale, double amp) {
    return make_boundary_matrix(
        blat, rows, cols, [=](int rr, int cc, const double* x) {
          const double base = base_scale / (1.0 + rr + cc);
          return trig(base, amp, 1 + (rr + cc) % 2, 0.3 * rr - 0.4 * cc)(x);
        });
  };
  p.b0 = fill(p.d, 1, 1.0, 0.2);
  p.b2 = fill(p.d, 1, 0.0, 0.15);
  p.beta_b = fill(p.d, 1, 0.0, 0.08);
  p.Ms0 = fill(p.d, p.s, 1.0, 0.15);
  p.Ms2 = fill(p.d, p.s, 0.0, 0.2);
  p.MI = fill(p.d, p.r, 0.3, 0.1);

  p.rho_sharp.rows = p.rho_sharp.cols = p.N;
  {
    SymbolFamily::ModeSpec zero;
    zero.theta.assign(grid.n, 0.0);
    Eigen::MatrixXd R0 = Eigen::MatrixXd::Zero(p.N, p.N);
    for (int rr = 0; rr < p.N; ++rr)
      for (int cc = 0; cc < p.N; ++cc)
        R0(rr, cc) = (rr == cc ? 0.18 : 0.05 * ((rr + 2 * cc) % 3 - 1));
    zero.coeff = R0.cast<cplx>();
    zero.kind = MultKind::gamma_weight;
    p.rho_sharp.modes.push_back(std::move(zero));
    Eigen::MatrixXd R1 = Eigen::MatrixXd::Zero(p.N, p.N);
    for (int rr = 0; rr < p.N; ++rr) R1(rr, (rr + 1) % p.N) = 0.07;
    p.rho_sharp.add_cosine({lat.freq_step(0), 0.0}, 0.2, R1, MultKind::one);
    Eigen::MatrixXd R2 = Eigen::MatrixXd::Zero(p.N, p.N);
    for (int rr = 0; rr < p.N; ++rr) R2(rr, rr) = 0.05 + 0.01 * rr;
    p.rho_sharp.add_cosine({0.0, lat.freq_step(1)}, -0.5, R2,
                           MultKind::xi_last_weight);
  }
  p.b_sharp.rows = p.d;
  p.b_sharp.cols = 1;
  {
    SymbolFamily::ModeSpec zero;
    zero.theta = {0.0};
    Eigen::MatrixXd z(p.d, 1);
    for (int rr = 0; rr < p.d; ++rr) z(rr, 0) = 0.2 / (1.0 + rr);
    zero.coeff = z.cast<cplx>();
    zero.kind = MultKind::gamma_weight;
    p.b_sharp.modes.push_back(std::move(zero));
    Eigen::MatrixXd z1(p.d, 1);
    for (int rr = 0; rr < p.d; ++rr) z1(rr, 0) = 0.1 - 0.15 * rr;
    p.b_sharp.add_cosine({w}, 0.9, z1, MultKind::one);
  }
  p.ell_sharp.rows = p.d;
  p.ell_sharp.cols = p.s;
  {
    SymbolFamily::ModeSpec zero;
    zero.theta = {0.0};
    Eigen::MatrixXd z(p.d, p.s);
    for (int rr = 0; rr < p.d; ++rr)
      for (int cc = 0; cc < p.s; ++cc) z(rr, cc) = 0.15 - 0.23 * rr + 0.05 * cc;
    zero.coeff = z.cast<cplx>();
    zero.kind = MultKind::xi_last_weight;
    p.ell_sharp.modes.push_back(std::move(zero));
    Eigen::MatrixXd z1 = Eigen::MatrixXd::Constant(p.d, p.s, 0.06);
    p.ell_sharp.add_cosine({2.0 * w}, -1.3, z1, MultKind::one);
  }
  p.finalize();
  return p;
}

ToyBVP make_default_toy(const HalfSpaceGrid& grid) {
  return make_toy(grid, ToyParams::defaults());
}

StructureReport validate_structure(const ToyBVP& p) {
  StructureReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.pass = false;
    rep.violations.push_back(msg);
  };
  if (!(p.r >= 1 && p.r < p.N)) fail("characteristic multiplicity: need 1 <= r < N");
  if (!(p.s >= 1 && p.s <= p.r)) fail("leading boundary block: need 1 <= s <= r");
  if (!(p.d <= p.r + 1)) fail("boundary condition count: need d <= r + 1");
  if (!p.a1_block.conjugate_paired())
    fail("A1 invertible block: modes are not conjugate paired (not real)");

  rep.a1_min_singular = p.a1_samples.min_singular_value();
  if (rep.a1_min_singular < p.invertibility_margin)
    fail("A1 invertible block: singular value below margin");

  // The vanishing blocks of the assembled A1 must vanish on the boundary:
  // x1 * H1 at the deepest sample row is an upper proxy, and the stored
  // boundary samples must be zero exactly.
  double worst = 0.0;
  if (p.A1_full.has_boundary()) {
    const Lattice blat = p.grid.boundary();
    for (int rr = 0; rr < p.N; ++rr)
      for (int cc = 0; cc < p.N; ++cc) {
        if (rr < p.r && cc < p.r) continue;
        for (std::ptrdiff_t i = 0; i < blat.count(); ++i)
          worst = std::max(worst,
                           std::abs(p.A1_full.boundary_entry(rr, cc)[i]));
      }
  } else {
    // No explicit boundary samples: use the deepest interior row of x1 H1.
    MatrixField probe = p.A1_full;
    worst = 0.0;
    const Lattice lat = p.grid.interior();
    std::vector<int> idx(lat.dim());
    for (std::ptrdiff_t i = 0; i < lat.count(); ++i) {
      lat.unravel(i, idx.data());
      if (idx[0] != 0) continue;
      for (int rr = 0; rr < p.N; ++rr)
        for (int cc = 0; cc < p.N; ++cc) {
          if (rr < p.r && cc < p.r) continue;
          worst = std::max(worst, std::abs(p.A1_full.entry(rr, cc)[i]));
        }
    }
  }
  rep.vanishing_block_boundary_max = worst;
  if (worst > 1e-12) fail("A1 vanishing blocks do not vanish at x1 = 0");
  return rep;
}

// ---------------------------------------------------------------------------
// Interior / boundary application
// ---------------------------------------------------------------------------
HalfSpaceField apply_interior(const ToyBVP& p, const HalfSpaceField& u,
                              double gamma, bool with_rho, int route) {
  if (u.components() != p.N)
    throw std::invalid_argument("apply_interior: component mismatch");
  HalfSpaceField d1u = conormal_derivative(u, 1, true);
  HalfSpaceField z1u = conormal_derivative(u, 1, false);
  HalfSpaceField z2u = conormal_derivative(u, 2);

  HalfSpaceField F = gamma * u;
  if (route == 0) {
    F += p.a1_samples.apply(d1u.slice(0, p.r)).embed(p.N, 0);
    F += p.H1.apply(z1u);
  } else {
    F += p.A1_full.apply(d1u);
  }
  F += p.A2.apply(z2u);
  F += p.B.apply(u);
  if (with_rho)
    F += apply_separated(u, p.rho_sharp.build(p.grid.interior(), gamma));
  return F;
}

BoundaryField apply_b_gamma(const ToyBVP& p, const BoundaryField& psi,
                            double gamma) {
  BoundaryField d2psi(psi.lattice(), psi.components());
  for (int c = 0; c < psi.components(); ++c)
    d2psi.comp(c) = spectral_derivative(psi.comp(c), 0);
  return gamma * p.b0.apply(psi) + p.b2.apply(d2psi) + p.beta_b.apply(psi);
}

BoundaryField apply_Ms_gamma(const ToyBVP& p, const BoundaryField& v,
                             double gamma) {
  BoundaryField d2v(v.lattice(), v.components());
  for (int c = 0; c < v.components(); ++c)
    d2v.comp(c) = spectral_derivative(v.comp(c), 0);
  return gamma * p.Ms0.apply(v) + p.Ms2.apply(d2v);
}

BoundaryField apply_boundary(const ToyBVP& p, const BoundaryField& u_trace,
                             const BoundaryField& psi, double gamma) {
  if (u_trace.components() != p.N)
    throw std::invalid_argument("apply_boundary: missing exact trace");
  BoundaryField uIs = u_trace.slice(0, p.s);
  BoundaryField uI = u_trace.slice(0, p.r);
  BoundaryField g = apply_b_gamma(p, psi, gamma);
  g += apply_Ms_gamma(p, uIs, gamma);
  g += p.MI.apply(uI);
  g += apply_separated(psi, p.b_sharp.build(psi.lattice(), gamma));
  g += apply_separated(uIs, p.ell_sharp.build(psi.lattice(), gamma));
  return g;
}

HalfSpaceField apply_T_gamma(const ToyBVP& p, const HalfSpaceField& u,
                             double gamma, bool with_rho) {
  HalfSpaceField z1u = conormal_derivative(u, 1, false);
  HalfSpaceField z2u = conormal_derivative(u, 2);
  // gamma u^I + H1^{I,II} Z1 u^{II} + (A2 Z2 u + B u + rho# u)^I
  HalfSpaceField acc = (gamma * u).slice(0, p.r);
  acc += p.H1.block(0, p.r, p.r, p.N - p.r).apply(z1u.slice(p.r, p.N));
  HalfSpaceField tang = p.A2.apply(z2u) + p.B.apply(u);
  if (with_rho)
    tang += apply_separated(u, p.rho_sharp.build(p.grid.interior(), gamma));
  acc += tang.slice(0, p.r);
  return cplx(-1.0, 0.0) * p.a1_inverse.apply(acc);
}

NormalSolveReport normal_solve(const ToyBVP& p, const HalfSpaceField& u,
                               const HalfSpaceField& F, double gamma,
                               bool with_rho) {
  NormalSolveReport rep;
  rep.d1uI = p.a1_inverse.apply(F.slice(0, p.r)) +
             apply_T_gamma(p, u, gamma, with_rho);
  HalfSpaceField direct = conormal_derivative(u, 1, true).slice(0, p.r);
  rep.residual = relative_residual_above(rep.d1uI, direct,
                                         normal_derivative_floor(p.grid));
  return rep;
}

// ---------------------------------------------------------------------------
// PipelineContext
// ---------------------------------------------------------------------------
const NormalCommutatorSymbol& PipelineContext::q_minus1(double gamma) {
  auto it = q_.find(gamma);
  if (it == q_.end())
    it = q_.emplace(gamma, normal_commutator_symbol(
                               toy_.grid, -1.0, gamma, toy_.a1_block,
                               bank_->cutoff(), bank_->factors()))
             .first;
  return it->second;
}

const SeparatedSymbol& PipelineContext::rho_sharp(double gamma) {
  auto it = rho_.find(gamma);
  if (it == rho_.end())
    it = rho_.emplace(gamma, toy_.rho_sharp.build(toy_.grid.interior(), gamma))
             .first;
  return it->second;
}

const SeparatedSymbol& PipelineContext::b_sharp(double gamma) {
  auto it = bsh_.find(gamma);
  if (it == bsh_.end())
    it = bsh_.emplace(gamma, toy_.b_sharp.build(toy_.grid.boundary(), gamma))
             .first;
  return it->second;
}

const SeparatedSymbol& PipelineContext::ell_sharp(double gamma) {
  auto it = ell_.find(gamma);
  if (it == ell_.end())
    it = ell_.emplace(gamma, toy_.ell_sharp.build(toy_.grid.boundary(), gamma))
             .first;
  return it->second;
}

HalfSpaceField PipelineContext::L_tan(const HalfSpaceField& u, double gamma,
                                      bool with_rho) {
  HalfSpaceField z1u = conormal_derivative(u, 1, false);
  HalfSpaceField z2u = conormal_derivative(u, 2);
  HalfSpaceField out = gamma * u;
  out += toy_.H1.apply(z1u);
  out += toy_.A2.apply(z2u);
  out += toy_.B.apply(u);
  if (with_rho) out += apply_separated(u, rho_sharp(gamma));
  return out;
}

HalfSpaceField PipelineContext::L_full(const HalfSpaceField& u, double gamma,
                                       bool with_rho) {
  HalfSpaceField out = L_tan(u, gamma, with_rho);
  HalfSpaceField d1u = conormal_derivative(u, 1, true);
  out += toy_.a1_samples.apply(d1u.slice(0, toy_.r)).embed(toy_.N, 0);
  return out;
}

HalfSpaceField PipelineContext::rho0_tan(const HalfSpaceField& v, double gamma,
                                         bool with_rho) {
  const MultiplierSymbol& lam1 = bank_->lambda_interior(1.0, gamma);
  const MollifiedWeight& mw = bank_->weight(-1.0, gamma);
  HalfSpaceField w = op_conormal(v, lam1);
  HalfSpaceField a = op_conormal(L_tan(w, gamma, with_rho), mw.chi_table);
  HalfSpaceField b = L_tan(op_conormal(w, mw.chi_table), gamma, with_rho);
  return a - b;
}

HalfSpaceField PipelineContext::rho0_nor(const HalfSpaceField& v, double gamma,
                                         bool with_rho) {
  const MultiplierSymbol& lam1 = bank_->lambda_interior(1.0, gamma);
  HalfSpaceField w = op_conormal(v, lam1);
  HalfSpaceField t = apply_T_gamma(toy_, w, gamma, with_rho);
  return apply_separated(t, q_minus1(gamma).sep).embed(toy_.N, 0);
}

HalfSpaceField PipelineContext::R_minus1(const HalfSpaceField& u, double gamma,
                                         bool with_rho) {
  return rho0_tan(remainder_apply(u, *bank_, -1.0, gamma), gamma, with_rho);
}

HalfSpaceField PipelineContext::S_minus1(const HalfSpaceField& u, double gamma,
                                         bool with_rho) {
  return rho0_nor(remainder_apply(u, *bank_, -1.0, gamma), gamma, with_rho);
}

BoundaryField PipelineContext::d0(const BoundaryField& psi, double gamma) {
  const MultiplierSymbol& lam1 = bank_->lambda_boundary(1.0, gamma);
  const BoundarySymbol& bs = bank_->boundary(-1.0, gamma);
  BoundaryField w = apply_multiplier(psi, lam1);
  return apply_multiplier(apply_b_gamma(toy_, w, gamma), bs.bprime) -
         apply_b_gamma(toy_, apply_multiplier(w, bs.bprime), gamma);
}

BoundaryField PipelineContext::dm3(const BoundaryField& psi, double gamma) {
  const BoundarySymbol& bs = bank_->boundary(-1.0, gamma);
  return cplx(-1.0, 0.0) * d0(apply_multiplier(psi, bs.beta), gamma);
}

BoundaryField PipelineContext::e0(const BoundaryField& v, double gamma) {
  const MultiplierSymbol& lam1 = bank_->lambda_boundary(1.0, gamma);
  const BoundarySymbol& bs = bank_->boundary(-1.0, gamma);
  BoundaryField w = apply_multiplier(v, lam1);
  return apply_multiplier(apply_Ms_gamma(toy_, w, gamma), bs.bprime) -
         apply_Ms_gamma(toy_, apply_multiplier(w, bs.bprime), gamma);
}

BoundaryField PipelineContext::em3(const BoundaryField& v, double gamma) {
  const BoundarySymbol& bs = bank_->boundary(-1.0, gamma);
  return cplx(-1.0, 0.0) * e0(apply_multiplier(v, bs.beta), gamma);
}

// ---------------------------------------------------------------------------
// assemble_regularized
// ---------------------------------------------------------------------------
RegularizedSystem assemble_regularized(PipelineContext& ctx,
                                       const HalfSpaceField& u,
                                       const BoundaryField& psi, double gamma,
                                       int statement) {
  const ToyBVP& toy = ctx.toy();
  MollifierBank& bank = ctx.bank();
  const MollifiedWeight& mw = bank.weight(-1.0, gamma);
  const BoundarySymbol& bs = bank.boundary(-1.0, gamma);

  RegularizedSystem sys;
  sys.statement = statement;
  sys.gamma = gamma;
  sys.F = apply_interior(toy, u, gamma, /*with_rho=*/statement == 1);
  sys.g = apply_boundary(toy, u.trace(), psi, gamma);
  sys.u_reg = apply_mollified(u, mw, &bs);
  sys.psi_reg = boundary_trace_apply(psi, bs);

  // Interior data of the regularized problem.
  if (statement == 1) {
    HalfSpaceField qF = apply_separated(
        toy.a1_inverse.apply(sys.F.slice(0, toy.r)), ctx.q_minus1(gamma).sep);
    sys.Fcal = op_conormal(sys.F, mw.chi_table) - qF.embed(toy.N, 0) -
               ctx.R_minus1(u, gamma, true) - ctx.S_minus1(u, gamma, true);
  } else {
    HalfSpaceField d1uI = conormal_derivative(u, 1, true).slice(0, toy.r);
    HalfSpaceField qd = apply_separated(d1uI, ctx.q_minus1(gamma).sep);
    HalfSpaceField comm_tan =
        op_conormal(ctx.L_tan(u, gamma, false), mw.chi_table) -
        ctx.L_tan(sys.u_reg, gamma, false);
    sys.Fcal = op_conormal(sys.F, mw.chi_table) - qd.embed(toy.N, 0) - comm_tan;
  }

  // Boundary data of the regularized problem.
  BoundaryField uI = u.trace().slice(0, toy.r);
  BoundaryField uIs = u.trace().slice(0, toy.s);
  const SeparatedSymbol& bshp = ctx.b_sharp(gamma);
  const SeparatedSymbol& elshp = ctx.ell_sharp(gamma);
  auto bcomm = [&](const BoundaryField& v, const SeparatedSymbol& sym) {
    return apply_multiplier(apply_separated(v, sym), bs.bprime) -
           apply_separated(apply_multiplier(v, bs.bprime), sym);
  };
  BoundaryField MIcomm = apply_multiplier(toy.MI.apply(uI), bs.bprime) -
                         toy.MI.apply(apply_multiplier(uI, bs.bprime));
  sys.Gcal = apply_multiplier(sys.g, bs.bprime);
  sys.Gcal -= bcomm(psi, bshp);
  sys.Gcal -= ctx.dm3(psi, gamma);
  sys.Gcal -= MIcomm;
  sys.Gcal -= bcomm(uIs, elshp);
  sys.Gcal -= ctx.em3(uIs, gamma);

  // Residuals of the assembled identities.
  {
    HalfSpaceField lhs = ctx.L_full(sys.u_reg, gamma, false);
    if (statement == 1) {
      lhs += apply_separated(sys.u_reg, ctx.rho_sharp(gamma));
      lhs += ctx.rho0_tan(sys.u_reg, gamma, true);
      lhs += ctx.rho0_nor(sys.u_reg, gamma, true);
    }
    sys.interior_residual = relative_residual_above(
        lhs, sys.Fcal, std::log(toy.grid.delta0) - 8.0);
  }
  {
    BoundaryField regIs = sys.u_reg.trace().slice(0, toy.s);
    BoundaryField regI = sys.u_reg.trace().slice(0, toy.r);
    BoundaryField lhs = apply_b_gamma(toy, sys.psi_reg, gamma);
    lhs += apply_Ms_gamma(toy, regIs, gamma);
    lhs += toy.MI.apply(regI);
    lhs += apply_separated(sys.psi_reg, bshp) + ctx.d0(sys.psi_reg, gamma);
    lhs += apply_separated(regIs, elshp) + ctx.e0(regIs, gamma);
    const double scale = std::max(lhs.l2(), sys.Gcal.l2());
    sys.boundary_residual =
        scale > 0.0 ? (lhs - sys.Gcal).l2() / scale : 0.0;
  }
  return sys;
}

// ---------------------------------------------------------------------------
// Estimate chain
// ---------------------------------------------------------------------------
namespace {

struct ChainScratch {
  double u_l2, trace_m12, psi_l2;
  double lower1_lhs, lower2_lhs, lower3_lhs;
  double F_norm, G_norm;       // of the regularized data
  double F_rhs, G_rhs;         // data bound right-hand sides
  double hyp_lhs, hyp_rhs;     // hypothesis estimate pieces
  double fin_lhs, fin_core;    // final inequality (core lacks C-check)
  double interior_residual, boundary_residual;
};

ChainScratch evaluate_sample(PipelineContext& ctx, const TestInput& in,
                             double gamma, int statement) {
  const ToyBVP& toy = ctx.toy();
  RegularizedSystem sys =
      assemble_regularized(ctx, in.u, in.psi, gamma, statement);

  ChainScratch s{};
  s.interior_residual = sys.interior_residual;
  s.boundary_residual = sys.boundary_residual;

  BoundaryField uI = in.u.trace().slice(0, toy.r);
  s.u_l2 = in.u.l2();
  s.trace_m12 = hb_norm(uI, -0.5, gamma);
  s.psi_l2 = in.psi.l2();

  s.lower1_lhs = htan_norm(sys.u_reg, 1.0, gamma);
  s.lower2_lhs = hb_norm(sys.u_reg.trace().slice(0, toy.r), 0.5, gamma);
  s.lower3_lhs = hb_norm(sys.psi_reg, 1.0, gamma);

  const double F_in = statement == 1 ? htan_norm(sys.F, 1.0, gamma)
                                     : sys.F.l2();
  s.F_norm = statement == 1 ? htan_norm(sys.Fcal, 2.0, gamma)
                            : htan_norm(sys.Fcal, 1.0, gamma);
  s.F_rhs = F_in + s.u_l2;
  s.G_norm = hb_norm(sys.Gcal, 1.5, gamma);
  s.G_rhs = hb_norm(sys.g, 0.5, gamma) + s.psi_l2 / std::sqrt(gamma) +
            s.trace_m12;

  const double l1 = s.lower1_lhs, l2 = s.lower2_lhs, l3 = s.lower3_lhs;
  s.hyp_lhs = gamma * (l1 * l1 + l2 * l2) + gamma * gamma * l3 * l3;
  if (statement == 1)
    s.hyp_rhs = std::pow(gamma, -3.0) * s.F_norm * s.F_norm +
                s.G_norm * s.G_norm / gamma;
  else
    s.hyp_rhs = (s.F_norm * s.F_norm + s.G_norm * s.G_norm) / gamma;

  const double g12 = hb_norm(sys.g, 0.5, gamma);
  s.fin_lhs = gamma * (s.u_l2 * s.u_l2 + s.trace_m12 * s.trace_m12) +
              gamma * gamma * s.psi_l2 * s.psi_l2;
  if (statement == 1)
    s.fin_core = std::pow(gamma, -3.0) * F_in * F_in + g12 * g12 / gamma;
  else
    s.fin_core = (F_in * F_in + g12 * g12) / gamma;
  return s;
}

EstimateLedger run_chain(PipelineContext& ctx,
                         const std::vector<TestInput>& samples,
                         const std::vector<double>& sweep, int statement,
                         bool with_demo) {
  EstimateLedger led;
  led.statement = statement;
  if (samples.empty())
    throw std::invalid_argument("estimate chain: empty sample family");

  const size_t ng = sweep.size();
  std::vector<std::vector<ChainScratch>> scr(samples.size(),
                                             std::vector<ChainScratch>(ng));
  for (size_t is = 0; is < samples.size(); ++is)
    for (size_t ig = 0; ig < ng; ++ig)
      scr[is][ig] = evaluate_sample(ctx, samples[is], sweep[ig], statement);

  // Rows: lower bounds, data bounds, assembly residuals.
  std::vector<double> CF_per(ng, 0.0), CG_per(ng, 0.0), hyp_per(ng, 0.0);
  for (size_t ig = 0; ig < ng; ++ig) {
    const double g = sweep[ig];
    for (size_t is = 0; is < samples.size(); ++is) {
      const ChainScratch& s = scr[is][ig];
      led.rows.push_back({"l2lambda", (int)is, g, s.lower1_lhs, 0.5 * s.u_l2});
      led.rows.push_back({"l2traccia", (int)is, g, s.lower2_lhs, 0.5 * s.trace_m12});
      led.rows.push_back({"l2psi", (int)is, g, s.lower3_lhs, 0.5 * s.psi_l2});
      led.rows.push_back({"Fcal-bound", (int)is, g, s.F_norm, s.F_rhs});
      led.rows.push_back({"Gcal-bound", (int)is, g, s.G_norm, s.G_rhs});
      led.rows.push_back({"fsystem-interior", (int)is, g, s.interior_residual, 1e-6});
      led.rows.push_back({"fsystem-boundary", (int)is, g, s.boundary_residual, 1e-6});
      if (s.F_rhs > 0.0) CF_per[ig] = std::max(CF_per[ig], s.F_norm / s.F_rhs);
      if (s.G_rhs > 0.0) CG_per[ig] = std::max(CG_per[ig], s.G_norm / s.G_rhs);
      if (s.hyp_rhs > 0.0)
        hyp_per[ig] = std::max(hyp_per[ig], s.hyp_lhs / s.hyp_rhs);
    }
  }
  led.CF = *std::max_element(CF_per.begin(), CF_per.end());
  led.CG = *std::max_element(CG_per.begin(), CG_per.end());
  led.CF_drift = report_drift(CF_per);
  led.CG_drift = report_drift(CG_per);

  // gamma1: smallest sweep value from which on all three 1/2-bounds hold.
  for (size_t ig = 0; ig < ng; ++ig) {
    bool from_here = true;
    for (size_t jg = ig; jg < ng && from_here; ++jg)
      for (size_t is = 0; is < samples.size(); ++is) {
        const ChainScratch& s = scr[is][jg];
        if (s.u_l2 == 0.0 && s.psi_l2 == 0.0) continue;
        if (s.lower1_lhs < 0.5 * s.u_l2 || s.lower2_lhs < 0.5 * s.trace_m12 ||
            s.lower3_lhs < 0.5 * s.psi_l2) {
          from_here = false;
          break;
        }
      }
    if (from_here) {
      led.gamma1 = sweep[ig];
      led.gamma1_found = true;
      break;
    }
  }

  if (!with_demo) {
    led.verdict = led.gamma1_found ? "PASS" : "FAIL";
    if (!led.gamma1_found)
      led.notes.push_back("factor-1/2 lower bounds fail at the top of the sweep");
    return led;
  }

  // Hypothesis constant and its stability across the sweep.
  led.C0 = *std::max_element(hyp_per.begin(), hyp_per.end());
  for (size_t ig = 0; ig < ng; ++ig)
    led.rows.push_back({"hypothesis", -1, sweep[ig], hyp_per[ig], 1.0});
  bool inconclusive = false;
  if (ng >= 3) {
    std::vector<double> sorted = hyp_per;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[ng / 2];
    const bool rising = hyp_per[ng - 1] > hyp_per[ng - 2] &&
                        hyp_per[ng - 2] > hyp_per[ng - 3];
    if (rising && hyp_per[ng - 1] > 2.0 * median) inconclusive = true;
  }

  // Absorption thresholds and the composed constant.
  const double C0 = led.C0, CF = led.CF, CG = led.CG;
  if (statement == 1)
    led.gamma_absorb =
        std::max({std::pow(16.0 * C0 * CF * CF, 0.25),
                  std::pow(24.0 * C0 * CG * CG, 0.25),
                  std::sqrt(24.0 * C0 * CG * CG)});
  else
    led.gamma_absorb =
        std::max({std::sqrt(16.0 * C0 * CF * CF),
                  std::pow(24.0 * C0 * CG * CG, 0.25),
                  std::sqrt(24.0 * C0 * CG * CG)});
  led.C_check = 8.0 * C0 * std::max(2.0 * CF * CF, 3.0 * CG * CG);

  // Final inequality, evaluated directly for gamma >= gamma1.
  bool final_ok = led.gamma1_found;
  for (size_t ig = 0; ig < ng; ++ig) {
    const double g = sweep[ig];
    if (!led.gamma1_found || g < led.gamma1) continue;
    for (size_t is = 0; is < samples.size(); ++is) {
      const ChainScratch& s = scr[is][ig];
      const double rhs = led.C_check * s.fin_core;
      led.rows.push_back({"final-estimate", (int)is, g, s.fin_lhs, rhs});
      if (s.fin_lhs > rhs && (s.u_l2 > 0.0 || s.psi_l2 > 0.0)) final_ok = false;
    }
  }

  if (inconclusive)
    led.verdict = "INCONCLUSIVE";
  else
    led.verdict = final_ok ? "PASS" : "FAIL";
  if (inconclusive)
    led.notes.push_back(
        "hypothesis ratio grows across the sweep; the sample family cannot "
        "certify the a priori estimate");
  return led;
}

}  // namespace

EstimateLedger verify_chain_bounds(PipelineContext& ctx,
                                   const std::vector<TestInput>& samples,
                                   const std::vector<double>& sweep,
                                   int statement) {
  return run_chain(ctx, samples, sweep, statement, false);
}

EstimateLedger estimate_transform_demo(PipelineContext& ctx,
                                       const std::vector<TestInput>& samples,
                                       const std::vector<double>& sweep,
                                       int statement) {
  return run_chain(ctx, samples, sweep, statement, true);
}

}  // namespace conormal
