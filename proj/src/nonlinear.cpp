#include "maryland/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

#include "maryland/errors.hpp"

namespace maryland {

namespace {

double dot(const Eigen::VectorXd& omega, const IntVec& n) {
  double acc = 0.0;
  for (Index k = 0; k < n.size(); ++k) acc += n(k) * omega(k);
  return acc;
}

std::vector<IntVec> decoded(const BoxIndexer& idx) {
  std::vector<IntVec> out(static_cast<std::size_t>(idx.size()));
  for (Index t = 0; t < idx.size(); ++t) out[static_cast<std::size_t>(t)] = idx.decode(t);
  return out;
}

}  // namespace

void require_compatible(const Coeffs& c, const EigenSystem& es) {
  if (!es.box.is_symmetric_box()) throw std::invalid_argument("eigensystem box must be centered at the origin");
  if (c.d() != es.d() || c.space_radius() != es.radius())
    throw std::invalid_argument("coefficient space block differs from the eigensystem box");
}

ModeField to_field(const Coeffs& c, const EigenSystem& es) {
  require_compatible(c, es);
  ModeField f{c.time_index(), CoeffMatrix()};
  f.values = c.values() * es.phi.transpose().cast<Complex>();
  return f;
}

ModeField unit_field(int b, Index sites) {
  ModeField f{BoxIndexer(b, 0), CoeffMatrix::Ones(1, sites)};
  return f;
}

ModeField multiply(const ModeField& a, const ModeField& b) {
  if (a.values.cols() != b.values.cols()) throw std::invalid_argument("fields live on different site sets");
  ModeField out{BoxIndexer(a.time.dim(), a.radius() + b.radius()), CoeffMatrix()};
  out.values = CoeffMatrix::Zero(out.time.size(), a.values.cols());
  const auto na = decoded(a.time);
  const auto nb = decoded(b.time);
  for (Index s = 0; s < a.time.size(); ++s) {
    if (a.values.row(s).isZero(0.0)) continue;
    for (Index t = 0; t < b.time.size(); ++t) {
      if (b.values.row(t).isZero(0.0)) continue;
      const Index o = out.time.encode(na[static_cast<std::size_t>(s)] + nb[static_cast<std::size_t>(t)]);
      out.values.row(o).array() += a.values.row(s).array() * b.values.row(t).array();
    }
  }
  return out;
}

ModeField power_product(const ModeField& U, const ModeField& V, int pu, int pv) {
  ModeField acc = unit_field(U.time.dim(), U.values.cols());
  for (int i = 0; i < pu; ++i) acc = multiply(acc, U);
  for (int i = 0; i < pv; ++i) acc = multiply(acc, V);
  return acc;
}

Coeffs project(const ModeField& f, const EigenSystem& es) {
  const int L = es.radius();
  Coeffs out(f.time.dim(), es.d(), f.radius(), L);
  out.values() = f.values * es.phi.cast<Complex>();
  return out;
}

Coeffs nonlinear_term_uv(const Coeffs& u, const Coeffs& v, const EigenSystem& es, int p) {
  if (p < 1) throw std::invalid_argument("nonlinearity power p must be at least 1");
  const ModeField U = to_field(u, es);
  const ModeField V = to_field(v, es);
  return project(power_product(U, V, p + 1, p), es);
}

Coeffs nonlinear_term(const Coeffs& u, const EigenSystem& es, int p) {
  return nonlinear_term_uv(u, u.conjugate_sector(), es, p);
}

Coeffs conjugate_nonlinear_term(const Coeffs& u, const EigenSystem& es, int p) {
  return nonlinear_term_uv(u.conjugate_sector(), u, es, p);
}

NonlinearResult nonlinear_term(const Coeffs& u, const EigenSystem& es, int p, int target, Truncation policy) {
  const int needed = (2 * p + 1) * u.time_radius();
  if (target < needed && policy == Truncation::fail) throw BlockTooSmall(needed, target);
  const Coeffs full = nonlinear_term(u, es, p);
  NonlinearResult r;
  r.tail_norm = full.tail_norm(target);
  r.W = full.resized(target, es.radius());
  return r;
}

const ModeField& LinearizationFields::block(Sector r, Sector rp) const {
  if (r == Sector::plus) return rp == Sector::plus ? pp : pm;
  return rp == Sector::plus ? mp : mm;
}

LinearizationFields linearization_fields(const Coeffs& u, const Coeffs& v, const EigenSystem& es, int p) {
  if (p < 1) throw std::invalid_argument("nonlinearity power p must be at least 1");
  const ModeField U = to_field(u, es);
  const ModeField V = to_field(v, es);
  LinearizationFields f;
  f.p = p;
  f.pp = power_product(U, V, p, p);
  f.pp.values *= static_cast<double>(p + 1);
  f.pm = power_product(U, V, p + 1, p - 1);
  f.pm.values *= static_cast<double>(p);
  f.mp = power_product(V, U, p + 1, p - 1);
  f.mp.values *= static_cast<double>(p);
  f.mm = power_product(V, U, p, p);
  f.mm.values *= static_cast<double>(p + 1);
  return f;
}

double conjugation_defect(const LinearizationFields& f) {
  auto one = [](const ModeField& a, const ModeField& b) {
    // a_k against conj(b_{−k}); both fields have symmetric time boxes of equal radius.
    const Index last = a.values.rows() - 1;
    double worst = 0.0, scale = 0.0;
    for (Index t = 0; t <= last; ++t) {
      worst = std::max(worst, (a.values.row(t) - b.values.row(last - t).conjugate()).cwiseAbs().maxCoeff());
      scale = std::max(scale, a.values.row(t).cwiseAbs().maxCoeff());
    }
    return scale > 0.0 ? worst / scale : worst;
  };
  return std::max(one(f.mm, f.pp), one(f.mp, f.pm));
}

Eigen::MatrixXcd coupling_matrix(const LinearizationFields& f, const EigenSystem& es, const ModeList& modes) {
  const Index m = modes.size();
  // Distinct sites touched by the modes.
  std::vector<Index> site_slot(static_cast<std::size_t>(m));
  std::vector<Index> local_of(static_cast<std::size_t>(es.size()), -1);
  std::vector<Index> used;
  for (Index a = 0; a < m; ++a) {
    const Index s = es.slot(modes[a].j);
    if (s < 0) throw std::invalid_argument("mode site outside the eigensystem box");
    site_slot[static_cast<std::size_t>(a)] = s;
    if (local_of[static_cast<std::size_t>(s)] < 0) {
      local_of[static_cast<std::size_t>(s)] = static_cast<Index>(used.size());
      used.push_back(s);
    }
  }
  Eigen::MatrixXd PhiJ(es.size(), static_cast<Index>(used.size()));
  for (std::size_t c = 0; c < used.size(); ++c) PhiJ.col(static_cast<Index>(c)) = es.phi.col(used[c]);

  // Modes grouped by (sector, n).
  std::map<std::pair<int, std::vector<int>>, std::vector<Index>> groups;
  for (Index a = 0; a < m; ++a) {
    const auto& md = modes[a];
    groups[{static_cast<int>(md.sign), std::vector<int>(md.n.data(), md.n.data() + md.n.size())}].push_back(a);
  }

  std::map<std::tuple<int, int, Index>, Eigen::MatrixXcd> cache;
  auto shift_matrix = [&](Sector r, Sector rp, const ModeField& G, Index row) -> const Eigen::MatrixXcd& {
    const auto key = std::make_tuple(static_cast<int>(r), static_cast<int>(rp), row);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const Eigen::VectorXcd g = G.values.row(row).transpose();
    Eigen::MatrixXcd M = PhiJ.transpose().cast<Complex>() * (g.asDiagonal() * PhiJ.cast<Complex>());
    return cache.emplace(key, std::move(M)).first->second;
  };

  Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(m, m);
  for (const auto& [ka, ia] : groups) {
    const Sector r = static_cast<Sector>(ka.first);
    const IntVec na = Eigen::Map<const IntVec>(ka.second.data(), static_cast<Index>(ka.second.size()));
    for (const auto& [kb, ib] : groups) {
      const Sector rp = static_cast<Sector>(kb.first);
      const IntVec nb = Eigen::Map<const IntVec>(kb.second.data(), static_cast<Index>(kb.second.size()));
      const ModeField& G = f.block(r, rp);
      const Index row = G.row(na - nb);
      if (row < 0 || G.values.row(row).isZero(0.0)) continue;
      const Eigen::MatrixXcd& M = shift_matrix(r, rp, G, row);
      for (Index a : ia)
        for (Index b : ib)
          W(a, b) = M(local_of[static_cast<std::size_t>(site_slot[static_cast<std::size_t>(a)])],
                      local_of[static_cast<std::size_t>(site_slot[static_cast<std::size_t>(b)])]);
    }
  }
  return W;
}

Eigen::VectorXcd shifted_diagonal(const ModeList& modes, const EigenSystem& es, const Eigen::VectorXd& omega,
                                  double sigma) {
  Eigen::VectorXcd D(modes.size());
  for (Index a = 0; a < modes.size(); ++a) {
    const auto& md = modes[a];
    const Index s = es.slot(md.j);
    if (s < 0) throw std::invalid_argument("mode site outside the eigensystem box");
    D(a) = sector_sign(md.sign) * (dot(omega, md.n) + sigma) + es.mu(s);
  }
  return D;
}

Eigen::MatrixXcd linearized_operator_uv(const Coeffs& u, const Coeffs& v, const EigenSystem& es,
                                        const Eigen::VectorXd& omega, double sigma, double delta, int p,
                                        const ModeList& modes) {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(modes.size(), modes.size());
  if (delta != 0.0) T = delta * coupling_matrix(linearization_fields(u, v, es, p), es, modes);
  T.diagonal() += shifted_diagonal(modes, es, omega, sigma);
  return T;
}

Eigen::MatrixXcd linearized_operator(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega,
                                     double sigma, double delta, int p, const ModeList& modes) {
  Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(modes.size(), modes.size());
  if (delta != 0.0) {
    const LinearizationFields f = linearization_fields(u, u.conjugate_sector(), es, p);
    if (conjugation_defect(f) > 1e-10) throw std::logic_error("linearization blocks violate the conjugation relation");
    T = delta * coupling_matrix(f, es, modes);
  }
  T.diagonal() += shifted_diagonal(modes, es, omega, sigma);
  return T;
}

Residual residual(const Coeffs& u, const EigenSystem& es, const Eigen::VectorXd& omega, double delta, int p,
                  const ResonantSet& S) {
  require_compatible(u, es);
  const int R = (2 * p + 1) * u.time_radius();
  Residual r;
  const Coeffs uu = u.resized(R, es.radius());
  const Coeffs vv = uu.conjugate_sector();
  r.plus = uu;
  r.minus = vv;
  auto& P = r.plus.values();
  auto& M = r.minus.values();
  const BoxIndexer& ti = r.plus.time_index();
  for (Index t = 0; t < ti.size(); ++t) {
    const double nw = dot(omega, ti.decode(t));
    for (Index s = 0; s < es.size(); ++s) {
      P(t, s) *= nw + es.mu(s);
      M(t, s) *= -nw + es.mu(s);
    }
  }
  if (delta != 0.0) {
    P += delta * nonlinear_term(u, es, p).values();
    M += delta * conjugate_nonlinear_term(u, es, p).values();
  }
  for (int k = 0; k < S.b(); ++k) {
    const IntVec e = unit_vector(S.b(), k);
    r.plus.set(-e, S.beta[static_cast<std::size_t>(k)], 0.0);
    r.minus.set(e, S.beta[static_cast<std::size_t>(k)], 0.0);
  }
  double inside = 0.0, outside = 0.0;
  for (Index t = 0; t < ti.size(); ++t) {
    const double m2 = P.row(t).squaredNorm() + M.row(t).squaredNorm();
    (linf_norm(ti.decode(t)) > u.time_radius() ? outside : inside) += m2;
  }
  r.norm = std::sqrt(inside + outside);
  r.tail = std::sqrt(outside);
  return r;
}

}  // namespace maryland
