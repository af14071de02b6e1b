#include "lops/tensor_lab.hpp"

#include "lops/errors.hpp"
#include "lops/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace lops {

namespace {

Mat4 minkowski() { return Vec4(1, -1, -1, -1).asDiagonal(); }

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

/// N(μ,ν) = ∂_μ w_ν − Γ^λ_{μν} w_λ.
Mat4 covariant(const Mat4& d, const Christoffel& gamma, const Vec4& w) {
  Mat4 n = d;
  for (int l = 0; l < 4; ++l) n -= gamma[l] * w[l];
  return n;
}

/// Σ_{μν} A(μ,ν) B(μ,ν).
double contract(const Mat4& a, const Mat4& b) { return a.cwiseProduct(b).sum(); }

}  // namespace

AnalyticFields standard_family(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> wave(-1.5, 1.5), phase(0, 2 * std::numbers::pi);
  struct Wave {
    Vec4 k;
    double phi;
  };
  auto draw = [&] {
    Wave w;
    for (int i = 0; i < 4; ++i) w.k[i] = wave(rng);
    w.phi = phase(rng);
    return w;
  };
  std::array<std::array<Wave, 4>, 4> gw;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b) gw[a][b] = gw[b][a] = draw();
  std::array<Wave, 4> cw, vw;
  for (auto& w : cw) w = draw();
  for (auto& w : vw) w = draw();

  AnalyticFields f;
  f.name = "standard(seed=" + std::to_string(seed) + ")";
  f.metric = [gw](const Vec4& x) {
    Mat4 g = minkowski();
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) g(a, b) += 0.1 * std::sin(gw[a][b].k.dot(x) + gw[a][b].phi);
    return g;
  };
  f.current = [cw](const Vec4& x) {
    Vec4 c(2, 0, 0, 0);
    for (int a = 0; a < 4; ++a) c[a] += 0.3 * std::sin(cw[a].k.dot(x) + cw[a].phi);
    return c;
  };
  f.probe = [vw](const Vec4& x) {
    Vec4 v(0.2, 0.1, -0.1, 0.3);
    for (int a = 0; a < 4; ++a) v[a] += 0.5 * std::cos(vw[a].k.dot(x) + vw[a].phi);
    return v;
  };
  return f;
}

AnalyticFields flat_family(double c) {
  AnalyticFields f;
  f.name = "flat";
  f.metric = [](const Vec4&) { return minkowski(); };
  f.current = [c](const Vec4&) { return Vec4(c, 0, 0, 0); };
  f.probe = [](const Vec4&) { return Vec4(0.5, 0.25, 0, -0.25); };
  return f;
}

FieldPatch::FieldPatch(AnalyticFields fields, int nodes, double h, const Vec4& origin)
    : fields_(std::move(fields)), n_(nodes), h_(h), origin_(origin) {
  if (nodes < 5) throw PatchTooSmall("central differences need at least 5 nodes per axis, got " + std::to_string(nodes));
  if (!(h > 0)) throw std::invalid_argument("grid spacing must be positive");
  const std::size_t total = static_cast<std::size_t>(n_) * n_ * n_ * n_;
  g_.resize(total), gbar_.resize(total), C_.resize(total), u_.resize(total), v_.resize(total), F_.resize(total);
  std::vector<std::string> problems(total);
  parallel_for(total, [&](std::size_t i) {
    const auto c = coords(i);
    Vec4 x = origin_;
    for (int a = 0; a < 4; ++a) x[a] += h_ * c[a];
    g_[i] = fields_.metric(x);
    C_[i] = fields_.current(x);
    v_[i] = fields_.probe ? fields_.probe(x) : Vec4::Zero();
    Eigen::SelfAdjointEigenSolver<Mat4> es(g_[i], Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    const int pos = static_cast<int>((ev.array() > 0).count()), neg = static_cast<int>((ev.array() < 0).count());
    if (pos != 1 || neg != 3) problems[i] = "metric is not Lorentzian";
    const double cc = C_[i].dot(g_[i].inverse() * C_[i]);
    if (!(cc > 0)) problems[i] = "current is not timelike";
    F_[i] = std::sqrt(std::max(cc, 0.0));
    u_[i] = C_[i] / F_[i];
    gbar_[i] = F_[i] * F_[i] * g_[i];
  });
  for (std::size_t i = 0; i < total; ++i)
    if (!problems[i].empty()) throw std::domain_error(problems[i] + " at node " + std::to_string(i));
}

std::array<int, 4> FieldPatch::coords(std::size_t index) const {
  std::array<int, 4> c;
  for (int a = 3; a >= 0; --a) {
    c[a] = static_cast<int>(index % n_);
    index /= n_;
  }
  return c;
}

std::size_t FieldPatch::index(const std::array<int, 4>& c) const {
  std::size_t i = 0;
  for (int a = 0; a < 4; ++a) i = i * n_ + c[a];
  return i;
}

bool FieldPatch::interior(std::size_t i) const {
  for (int c : coords(i))
    if (c < 1 || c > n_ - 2) return false;
  return true;
}

std::vector<std::size_t> FieldPatch::interior_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (interior(i)) out.push_back(i);
  return out;
}

namespace {

std::size_t axis_stride(int n, int axis) {
  std::size_t s = 1;
  for (int a = 3; a > axis; --a) s *= n;
  return s;
}

}  // namespace

Mat4 FieldPatch::gradient(const std::vector<Vec4>& f, std::size_t i) const {
  Mat4 d;
  for (int m = 0; m < 4; ++m) {
    const std::size_t s = axis_stride(n_, m);
    d.row(m) = ((f[i + s] - f[i - s]) / (2 * h_)).transpose();
  }
  return d;
}

Vec4 FieldPatch::gradient(const std::vector<double>& f, std::size_t i) const {
  Vec4 d;
  for (int m = 0; m < 4; ++m) {
    const std::size_t s = axis_stride(n_, m);
    d[m] = (f[i + s] - f[i - s]) / (2 * h_);
  }
  return d;
}

std::array<Mat4, 4> FieldPatch::gradient(const std::vector<Mat4>& f, std::size_t i) const {
  std::array<Mat4, 4> d;
  for (int m = 0; m < 4; ++m) {
    const std::size_t s = axis_stride(n_, m);
    d[m] = (f[i + s] - f[i - s]) / (2 * h_);
  }
  return d;
}

Christoffel christoffel_from(const Mat4& gi, const std::array<Mat4, 4>& dg) {
  // Γ^λ_{μν} = ½ g^{λκ}(∂_μ g_{κν} + ∂_ν g_{κμ} − ∂_κ g_{μν})
  std::array<Mat4, 4> lowered;  // Γ_{κμν}
  for (int k = 0; k < 4; ++k)
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) lowered[k](m, n) = 0.5 * (dg[m](k, n) + dg[n](k, m) - dg[k](m, n));
  Christoffel gamma;
  for (int l = 0; l < 4; ++l) {
    gamma[l].setZero();
    for (int k = 0; k < 4; ++k) gamma[l] += gi(l, k) * lowered[k];
  }
  return gamma;
}

NodeQuantities FieldPatch::at(std::size_t i) const {
  if (!interior(i)) throw std::out_of_range("derived quantities exist only at interior nodes");
  NodeQuantities q;
  const auto c = coords(i);
  q.x = origin_;
  for (int a = 0; a < 4; ++a) q.x[a] += h_ * c[a];
  q.g = g_[i];
  q.gi = g_[i].inverse();
  const auto dg = gradient(g_, i);
  q.gamma = christoffel_from(q.gi, dg);
  q.F = F_[i];
  q.gamma_bar = christoffel_from(q.gi / (q.F * q.F), gradient(gbar_, i));
  q.C = C_[i];
  q.u = u_[i];
  q.u_up = q.gi * q.u;
  q.v = v_[i];
  q.dF = gradient(F_, i);
  q.K = q.dF / q.F;
  q.dC = gradient(C_, i);
  q.nabla_u = covariant(gradient(u_, i), q.gamma, q.u);
  q.nabla_C = covariant(q.dC, q.gamma, q.C);
  q.nablabar_C = covariant(q.dC, q.gamma_bar, q.C);
  const Mat4 dv = gradient(v_, i);
  q.nabla_v = covariant(dv, q.gamma, q.v);
  q.nablabar_v = covariant(dv, q.gamma_bar, q.v);
  q.omega = q.dC - q.dC.transpose();
  q.pi = q.g - q.u * q.u.transpose();
  q.pi_mixed = Mat4::Identity() - q.u_up * q.u.transpose();
  for (int a = 0; a < 4; ++a) {
    q.nabla_g[a] = dg[a];
    for (int l = 0; l < 4; ++l) {
      q.nabla_g[a] -= q.gamma[l].row(a).transpose() * q.g.row(l);
      q.nabla_g[a] -= q.g.row(l).transpose() * q.gamma[l].row(a);
    }
  }
  // π_α^μ as a matrix (α, μ).
  const Mat4 proj = Mat4::Identity() - q.u * q.u_up.transpose();
  q.sigma = proj * (q.nabla_C + q.nabla_C.transpose()) * proj.transpose();
  const Vec4 cbar = q.u_up / q.F;
  const Vec4 w = q.nablabar_C.transpose() * cbar;  // C̄^λ ∇̄_λ C_α
  q.sigma_bar = q.nablabar_C + q.nablabar_C.transpose() - (w * q.C.transpose() + q.C * w.transpose());
  const Vec4 z = q.omega.transpose() * q.u_up;  // u^λ Ω_{λα}
  q.theta = q.omega - (z * q.u.transpose() + q.u * z.transpose());
  return q;
}

std::vector<Christoffel> christoffel(const FieldPatch& patch) {
  const auto nodes = patch.interior_nodes();
  std::vector<Christoffel> out(nodes.size());
  std::vector<Mat4> g(patch.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = patch.metric_at(i);
  parallel_for(nodes.size(), [&](std::size_t k) {
    out[k] = christoffel_from(patch.metric_at(nodes[k]).inverse(), patch.gradient(g, nodes[k]));
  });
  return out;
}

std::vector<Mat4> cov_deriv(const FieldPatch& patch, const std::vector<Vec4>& w) {
  if (w.size() != patch.size()) throw std::invalid_argument("field must be sampled at every node");
  const auto nodes = patch.interior_nodes();
  const auto gammas = christoffel(patch);
  std::vector<Mat4> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { out[k] = covariant(patch.gradient(w, nodes[k]), gammas[k], w[nodes[k]]); });
  return out;
}

namespace {

struct IdentityDef {
  const char* name;
  double (*residual)(const NodeQuantities&);
};

Vec4 acceleration(const NodeQuantities& q) { return q.nabla_u.transpose() * q.u_up; }

double shear_square(const NodeQuantities& q) { return contract(q.gi * q.sigma * q.gi, q.sigma); }

double shear_rhs(const NodeQuantities& q, bool with_acceleration) {
  const Mat4 up = q.gi * q.nabla_u * q.gi;
  const Vec4 a = acceleration(q);
  double s = contract(up, q.nabla_u) + contract(up, q.nabla_u.transpose());
  if (with_acceleration) s -= a.dot(q.gi * a);
  return 2 * q.F * q.F * s;
}

Vec4 claim4_rhs(const NodeQuantities& q, bool with_omega) {
  Vec4 r = q.pi_mixed.transpose() * q.dF / q.F;
  if (with_omega) r += q.omega.transpose() * q.u_up / q.F;
  return r;
}

Mat4 conformal_rhs(const NodeQuantities& q, bool with_trace) {
  Mat4 r = q.nabla_v - q.K * q.v.transpose() - q.v * q.K.transpose();
  if (with_trace) r += q.K.dot(q.gi * q.v) * q.g;
  return r;
}

const std::vector<IdentityDef>& identities() {
  static const std::vector<IdentityDef> defs{
      {"claim1_shear", [](const NodeQuantities& q) { return max_abs(q.sigma_bar - q.sigma - 2 * q.pi * q.u_up.dot(q.dF)); }},
      {"claim1_conformal", [](const NodeQuantities& q) { return max_abs(q.sigma_bar - 2 * q.nablabar_C.transpose() - q.theta); }},
      {"claim4", [](const NodeQuantities& q) { return max_abs(Vec4(acceleration(q) - claim4_rhs(q, true))); }},
      {"relation_cov_der", [](const NodeQuantities& q) { return max_abs(Mat4(q.nablabar_v - conformal_rhs(q, true))); }},
      {"shear_contraction", [](const NodeQuantities& q) { return std::abs(shear_square(q) - shear_rhs(q, true)); }},
      {"velocity_orthogonality", [](const NodeQuantities& q) { return max_abs(Vec4(q.nabla_u * q.u_up)); }},
      {"metric_compatibility",
       [](const NodeQuantities& q) {
         double m = 0;
         for (const auto& n : q.nabla_g) m = std::max(m, max_abs(n));
         return m;
       }},
      {"projector",
       [](const NodeQuantities& q) {
         return std::max(max_abs(Mat4(q.pi_mixed * q.pi_mixed - q.pi_mixed)), max_abs(Vec4(q.pi * q.u_up)));
       }},
      {"unit_cbar", [](const NodeQuantities& q) { return std::abs((q.u_up / q.F).dot(q.C) - 1); }},
      // Mutations: each drops one term from the identity above it.
      {"claim1_shear_without_dF", [](const NodeQuantities& q) { return max_abs(Mat4(q.sigma_bar - q.sigma)); }},
      {"claim1_conformal_without_theta",
       [](const NodeQuantities& q) { return max_abs(Mat4(q.sigma_bar - 2 * q.nablabar_C.transpose())); }},
      {"claim4_without_omega", [](const NodeQuantities& q) { return max_abs(Vec4(acceleration(q) - claim4_rhs(q, false))); }},
      {"relation_cov_der_without_trace", [](const NodeQuantities& q) { return max_abs(Mat4(q.nablabar_v - conformal_rhs(q, false))); }},
      {"shear_contraction_without_acceleration",
       [](const NodeQuantities& q) { return std::abs(shear_square(q) - shear_rhs(q, false)); }},
  };
  return defs;
}

std::vector<std::size_t> scoped_nodes(const FieldPatch& patch, NodeScope scope) {
  const int s = std::max(scope.stride, 1), n = patch.nodes();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < patch.size(); ++i) {
    bool keep = true;
    for (int c : patch.coords(i))
      if (c % s != 0 || c < s || c > n - 1 - s) keep = false;
    if (keep) out.push_back(i);
  }
  return out;
}

template <class Fn>
std::vector<double> per_node(const FieldPatch& patch, const std::vector<std::size_t>& nodes, Fn fn) {
  std::vector<double> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { out[k] = fn(patch.at(nodes[k])); });
  return out;
}

}  // namespace

std::map<std::string, double> residual_table(const FieldPatch& patch, NodeScope scope) {
  const auto nodes = scoped_nodes(patch, scope);
  const auto& defs = identities();
  std::vector<std::vector<double>> values(nodes.size(), std::vector<double>(defs.size()));
  parallel_for(nodes.size(), [&](std::size_t k) {
    const NodeQuantities q = patch.at(nodes[k]);
    for (std::size_t d = 0; d < defs.size(); ++d) values[k][d] = defs[d].residual(q);
  });
  std::map<std::string, double> out;
  for (std::size_t d = 0; d < defs.size(); ++d) {
    double m = 0;
    for (const auto& row : values) m = std::max(m, row[d]);
    out[defs[d].name] = m;
  }
  return out;
}

std::pair<IdentityResidual, IdentityResidual> check_claim1(const FieldPatch& patch, NodeScope scope) {
  const auto t = residual_table(patch, scope);
  return {{"claim1_shear", t.at("claim1_shear"), patch.h(), {}}, {"claim1_conformal", t.at("claim1_conformal"), patch.h(), {}}};
}

IdentityResidual check_claim4(const FieldPatch& patch, NodeScope scope) {
  return {"claim4", residual_table(patch, scope).at("claim4"), patch.h(), {}};
}

IdentityResidual check_relation_cov_der(const FieldPatch& patch, NodeScope scope) {
  return {"relation_cov_der", residual_table(patch, scope).at("relation_cov_der"), patch.h(), {}};
}

IdentityResidual check_shear_contraction(const FieldPatch& patch, NodeScope scope) {
  return {"shear_contraction", residual_table(patch, scope).at("shear_contraction"), patch.h(), {}};
}

SignSample shear_square_range(const FieldPatch& patch, NodeScope scope) {
  const auto nodes = scoped_nodes(patch, scope);
  const auto v = per_node(patch, nodes, shear_square);
  SignSample s;
  s.nodes = v.size();
  if (!v.empty()) {
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
  }
  return s;
}

Report check_entropy_sign(const FieldPatch& patch, const std::function<double(const Vec4&)>& theta_r, double vartheta, double tol,
                          NodeScope scope) {
  const auto nodes = scoped_nodes(patch, scope);
  std::vector<double> value(nodes.size()), transport(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) {
    const NodeQuantities q = patch.at(nodes[k]);
    value[k] = vartheta / (2 * q.F) * shear_square(q);
    transport[k] = value[k] / theta_r(q.x);
  });
  Report r;
  r.title = "entropy sign";
  const double mn = value.empty() ? 0 : *std::min_element(value.begin(), value.end());
  const double mx = value.empty() ? 0 : *std::max_element(value.begin(), value.end());
  const double tmin = transport.empty() ? 0 : *std::min_element(transport.begin(), transport.end());
  r.add("entropy production >= 0", "", mn >= -tol,
        {{"vartheta", vartheta}, {"h", patch.h()}, {"tolerance", tol}, {"min", mn}, {"max", mx}, {"min u.ds", tmin}, {"nodes", value.size()}});
  return r;
}

Report run_lab(const LabConfig& cfg) {
  if (cfg.refine < 1) throw std::invalid_argument("refine must be at least 1");
  const AnalyticFields fields = standard_family(cfg.seed);
  Report r;
  r.title = "tensor lab";
  std::vector<double> hs;
  std::vector<std::map<std::string, double>> tables;
  std::vector<SignSample> shear_ranges;
  std::vector<Report> entropy, entropy_flipped;
  auto theta_r = [](const Vec4&) { return 1.0; };
  for (int k = 0; k < cfg.refine; ++k) {
    const int scale = 1 << k;
    const FieldPatch patch(fields, (cfg.nodes - 1) * scale + 1, cfg.h / scale);
    const NodeScope scope{scale};
    hs.push_back(patch.h());
    tables.push_back(residual_table(patch, scope));
    shear_ranges.push_back(shear_square_range(patch, scope));
    const double tol = 10 * patch.h() * patch.h();
    entropy.push_back(check_entropy_sign(patch, theta_r, cfg.vartheta, tol, scope));
    entropy_flipped.push_back(check_entropy_sign(patch, theta_r, -cfg.vartheta, tol, scope));
  }

  auto series = [&](const std::string& name) {
    Json rows = Json::array();
    std::vector<double> ratios;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      Json row{{"h", hs[k]}, {"residual", tables[k].at(name)}};
      if (k > 0) {
        const double ratio = tables[k - 1].at(name) / tables[k].at(name);
        row["ratio"] = ratio;
        ratios.push_back(ratio);
      }
      rows.push_back(row);
    }
    return std::pair{rows, ratios};
  };

  const std::vector<std::pair<const char*, const char*>> convergent{{"claim1_shear", "claim_1"},
                                                                     {"claim1_conformal", "claim_1"},
                                                                     {"claim4", "claim_4"},
                                                                     {"relation_cov_der", "relation_cov_der"},
                                                                     {"shear_contraction", "shear_C"},
                                                                     {"velocity_orthogonality", "useful"}};
  for (const auto& [name, anchor] : convergent) {
    auto [rows, ratios] = series(name);
    bool ok = !ratios.empty();
    for (double x : ratios) ok = ok && x >= cfg.ratio_low && x <= cfg.ratio_high;
    r.add(std::string("converges: ") + name, anchor, ok, {{"levels", rows}, {"band", {cfg.ratio_low, cfg.ratio_high}}});
  }

  const std::vector<std::pair<const char*, const char*>> controls{{"claim1_shear_without_dF", "claim_1"},
                                                                   {"claim1_conformal_without_theta", "claim_1"},
                                                                   {"claim4_without_omega", "claim_4"},
                                                                   {"relation_cov_der_without_trace", "relation_cov_der"},
                                                                   {"shear_contraction_without_acceleration", "shear_C"}};
  for (const auto& [name, anchor] : controls) {
    auto [rows, ratios] = series(name);
    // A dropped term leaves an O(1) discrepancy: the residual must stall.
    bool stalls = !ratios.empty();
    for (double x : ratios) stalls = stalls && x < 2.0;
    stalls = stalls && tables.back().at(name) > 1e-3;
    r.add(std::string("control stalls: ") + name, anchor, stalls, {{"levels", rows}});
  }

  for (const auto& [name, anchor] : std::vector<std::pair<const char*, const char*>>{
           {"metric_compatibility", ""}, {"projector", ""}, {"unit_cbar", "unit_C_bar"}}) {
    double worst = 0;
    for (const auto& t : tables) worst = std::max(worst, t.at(name));
    r.add(std::string("exact: ") + name, anchor, worst < 1e-10, {{"max residual", worst}});
  }

  {
    Json levels = Json::array();
    bool ok = true;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const double tol = 10 * hs[k] * hs[k];
      levels.push_back({{"h", hs[k]}, {"min", shear_ranges[k].min}, {"max", shear_ranges[k].max}, {"tolerance", tol}});
      ok = ok && shear_ranges[k].max <= tol;
    }
    r.add("shear square <= 0", "shear_C", ok, {{"levels", levels}});
  }
  {
    Json levels = Json::array();
    bool ok = true, flips = true;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      const auto& e = entropy[k].checks.front();
      const auto& f = entropy_flipped[k].checks.front();
      levels.push_back(e.detail);
      ok = ok && e.pass;
      const double a = e.detail["min"].get<double>(), b = f.detail["max"].get<double>();
      flips = flips && std::abs(a + b) <= 1e-12 * (1 + std::abs(a));
    }
    r.add("entropy sign with vartheta = " + num_str(cfg.vartheta, 1), "", ok,
          {{"levels", levels}, {"convention", cfg.vartheta <= 0 ? "vartheta <= 0" : "vartheta > 0"}});
    r.add("entropy term flips with vartheta", "", flips);
  }
  r.summary["family"] = fields.name;
  r.summary["nodes"] = cfg.nodes;
  r.summary["h"] = cfg.h;
  r.summary["refine"] = cfg.refine;
  return r;
}

std::string lab_csv(const Report& lab) {
  std::ostringstream out;
  out << "identity,h,residual\n";
  for (const auto& c : lab.checks) {
    if (!c.detail.contains("levels")) continue;
    const auto colon = c.name.find(": ");
    const std::string id = colon == std::string::npos ? c.name : c.name.substr(colon + 2);
    for (const auto& row : c.detail["levels"]) {
      if (!row.contains("residual")) continue;
      out << id << ',' << num_str(row["h"].get<double>(), 6) << ',' << num_str(row["residual"].get<double>(), 9) << '\n';
    }
  }
  return out.str();
}

}  // namespace lops
