#pragma once

#include "lops/report.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lops {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
/// Γ[λ](μ, ν) = Γ^λ_{μν}.
using Christoffel = std::array<Mat4, 4>;

/// Closed-form fields on coordinates x: metric g_{μν}, current C_μ and a
/// probe one-form v_μ used by the conformal-connection check.
struct AnalyticFields {
  std::string name;
  std::function<Mat4(const Vec4&)> metric;
  std::function<Vec4(const Vec4&)> current;
  std::function<Vec4(const Vec4&)> probe;
};

/// Curved metric η + 0.1·sin(k·x + φ) per component, C = (2,0,0,0) plus
/// 0.3·sin waves (nonzero vorticity and varying F), probe of cos waves.
/// Wave vectors and phases come from mt19937_64(seed).
AnalyticFields standard_family(std::uint64_t seed = 7);
/// Minkowski metric, constant C = (c, 0, 0, 0), constant probe.
AnalyticFields flat_family(double c = 2);

/// Every derived quantity at one interior node.
struct NodeQuantities {
  Vec4 x;
  Mat4 g, gi;
  Christoffel gamma, gamma_bar;
  Vec4 C, u, u_up, K, v;
  double F = 0;
  Vec4 dF;
  Mat4 dC;          // ∂_μ C_ν
  Mat4 nabla_u;     // ∇_μ u_ν
  Mat4 nabla_C;     // ∇_μ C_ν
  Mat4 nablabar_C;  // ∇̄_μ C_ν for ḡ = F² g
  Mat4 nabla_v, nablabar_v;
  Mat4 omega;       // ∂_μ C_ν − ∂_ν C_μ
  Mat4 pi;          // π_{μν}
  Mat4 pi_mixed;    // π^μ_ν
  Mat4 sigma, sigma_bar, theta;
  Mat4 nabla_g[4];  // ∇_α g_{βγ}
};

/// Uniform 4-D lattice with `nodes` points per axis and spacing h.
/// Derivatives are second-order central differences, so quantities exist
/// only at interior nodes.
class FieldPatch {
 public:
  /// Throws PatchTooSmall for fewer than 5 nodes per axis, std::domain_error
  /// when g is not Lorentzian or C is not timelike at some node.
  FieldPatch(AnalyticFields fields, int nodes, double h, const Vec4& origin = Vec4::Zero());

  int nodes() const { return n_; }
  double h() const { return h_; }
  const AnalyticFields& fields() const { return fields_; }
  std::size_t size() const { return g_.size(); }
  std::array<int, 4> coords(std::size_t index) const;
  std::size_t index(const std::array<int, 4>& c) const;
  bool interior(std::size_t index) const;
  std::vector<std::size_t> interior_nodes() const;

  const Mat4& metric_at(std::size_t i) const { return g_[i]; }
  const Vec4& current_at(std::size_t i) const { return C_[i]; }

  /// Central difference of a per-node field along every axis; row μ of the
  /// result is ∂_μ.
  Mat4 gradient(const std::vector<Vec4>& f, std::size_t i) const;
  Vec4 gradient(const std::vector<double>& f, std::size_t i) const;
  std::array<Mat4, 4> gradient(const std::vector<Mat4>& f, std::size_t i) const;

  NodeQuantities at(std::size_t i) const;

 private:
  AnalyticFields fields_;
  int n_;
  double h_;
  Vec4 origin_;
  std::vector<Mat4> g_, gbar_;
  std::vector<Vec4> C_, u_, v_;
  std::vector<double> F_;
};

Christoffel christoffel_from(const Mat4& gi, const std::array<Mat4, 4>& dg);

/// Γ at every interior node, in interior_nodes() order.
std::vector<Christoffel> christoffel(const FieldPatch& patch);
/// ∇_μ w_ν at every interior node for a one-form sampled at all nodes.
std::vector<Mat4> cov_deriv(const FieldPatch& patch, const std::vector<Vec4>& w);

/// Max componentwise discrepancy of one identity over selected nodes.
struct IdentityResidual {
  std::string name;
  double residual = 0;
  double h = 0;
  std::optional<double> ratio;
};

/// Nodes used for a residual: indices divisible by `stride`, at least one
/// stride away from the boundary. Stride 2^k on a k-times refined patch
/// selects exactly the interior nodes of the coarsest patch.
struct NodeScope {
  int stride = 1;
};

/// Identities evaluated in one sweep. Keys are stable identity names.
std::map<std::string, double> residual_table(const FieldPatch& patch, NodeScope scope = {});

std::pair<IdentityResidual, IdentityResidual> check_claim1(const FieldPatch& patch, NodeScope scope = {});
IdentityResidual check_claim4(const FieldPatch& patch, NodeScope scope = {});
IdentityResidual check_relation_cov_der(const FieldPatch& patch, NodeScope scope = {});
IdentityResidual check_shear_contraction(const FieldPatch& patch, NodeScope scope = {});

struct SignSample {
  double min = 0, max = 0;
  std::size_t nodes = 0;
};

/// Range of Σ^{αβ}Σ_{αβ} over the scope.
SignSample shear_square_range(const FieldPatch& patch, NodeScope scope = {});

/// (ϑ / 2F)·Σ^{αβ}Σ_{αβ} at every node; passes iff min ≥ −tol.
/// `theta_r` gives θ·r so that the implied u^α∂_α s can be reported.
Report check_entropy_sign(const FieldPatch& patch, const std::function<double(const Vec4&)>& theta_r, double vartheta,
                          double tol, NodeScope scope = {});

struct LabConfig {
  double h = 0.1;
  int nodes = 9;
  int refine = 2;  // number of grids, each halving h over the same extent
  std::uint64_t seed = 7;
  double vartheta = -1;
  double ratio_low = 3.5, ratio_high = 4.5;
};

/// Convergence tables on the standard family, negative controls, exact
/// invariants and the entropy sign.
Report run_lab(const LabConfig& cfg);

/// identity,h,residual rows for plotting.
std::string lab_csv(const Report& lab);

}  // namespace lops
