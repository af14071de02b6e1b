#include "lops/errors.hpp"
#include "lops/tensor_lab.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lops;

namespace {

/// Spatially flat expanding metric diag(1, -a², -a², -a²) with a(t) = 1 + t/2
/// and comoving current. Connection written out by hand:
/// Γ^0_{ii} = a a', Γ^i_{0i} = Γ^i_{i0} = a'/a, everything else zero.
AnalyticFields expanding() {
  AnalyticFields f;
  f.name = "expanding";
  f.metric = [](const Vec4& x) {
    const double a = 1 + 0.5 * x[0];
    return Mat4(Vec4(1, -a * a, -a * a, -a * a).asDiagonal());
  };
  f.current = [](const Vec4&) { return Vec4(3, 0, 0, 0); };
  f.probe = [](const Vec4& x) { return Vec4(x[1], 0, 1, 0); };
  return f;
}

Christoffel expanding_gamma(double t) {
  const double a = 1 + 0.5 * t, da = 0.5;
  Christoffel g;
  for (auto& m : g) m.setZero();
  for (int i = 1; i < 4; ++i) {
    g[0](i, i) = a * da;
    g[i](0, i) = g[i](i, 0) = da / a;
  }
  return g;
}

double gamma_gap(const Christoffel& a, const Christoffel& b) {
  double m = 0;
  for (int l = 0; l < 4; ++l) m = std::max(m, (a[l] - b[l]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST(TensorLab, MinkowskiHasNoConnection) {
  const FieldPatch patch(flat_family(), 5, 0.1);
  for (const auto& g : christoffel(patch))
    for (const auto& m : g) EXPECT_EQ(m.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TensorLab, TooSmallPatch) {
  EXPECT_THROW(FieldPatch(flat_family(), 4, 0.1), PatchTooSmall);
}

TEST(TensorLab, RejectsSpacelikeCurrent) {
  auto f = flat_family();
  f.current = [](const Vec4&) { return Vec4(0, 1, 0, 0); };
  EXPECT_THROW(FieldPatch(f, 5, 0.1), std::domain_error);
}

TEST(TensorLab, ConnectionMatchesHandComputed) {
  // a(t) is linear, so g is quadratic in t and central differences are exact.
  const FieldPatch patch(expanding(), 5, 0.1);
  const auto nodes = patch.interior_nodes();
  const auto gammas = christoffel(patch);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double t = 0.1 * patch.coords(nodes[k])[0];
    EXPECT_LT(gamma_gap(gammas[k], expanding_gamma(t)), 1e-12);
  }
}

TEST(TensorLab, CovariantDerivativeOfComovingVelocity) {
  // ∇_i u_j = −Γ^0_{ij} u_0 = −a a' δ_ij for u = (1,0,0,0); F is constant.
  const FieldPatch patch(expanding(), 5, 0.1);
  for (auto i : patch.interior_nodes()) {
    const auto q = patch.at(i);
    const double a = 1 + 0.5 * q.x[0];
    EXPECT_NEAR(q.F, 3.0, 1e-14);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) EXPECT_NEAR(q.nabla_u(r, c), (r == c && r > 0) ? -0.5 * a : 0.0, 1e-12);
  }
}

TEST(TensorLab, ConstantFieldsGiveZeroResiduals) {
  const FieldPatch patch(flat_family(), 5, 0.1);
  for (const auto& [name, value] : residual_table(patch)) EXPECT_LT(value, 1e-13) << name;
}

TEST(TensorLab, IdentitiesSmallOnCurvedPatch) {
  const FieldPatch patch(standard_family(), 7, 0.05);
  const auto [a, b] = check_claim1(patch);
  EXPECT_LT(a.residual, 1e-2);
  EXPECT_LT(b.residual, 1e-2);
  EXPECT_LT(check_claim4(patch).residual, 1e-2);
  EXPECT_LT(check_relation_cov_der(patch).residual, 1e-2);
  EXPECT_LT(check_shear_contraction(patch).residual, 1e-2);
  const auto t = residual_table(patch);
  EXPECT_GT(t.at("claim4_without_omega"), 0.05);
  EXPECT_GT(t.at("relation_cov_der_without_trace"), 0.05);
}

TEST(TensorLab, ExactInvariants) {
  const FieldPatch patch(standard_family(3), 5, 0.1);
  const auto t = residual_table(patch);
  EXPECT_LT(t.at("metric_compatibility"), 1e-12);
  EXPECT_LT(t.at("projector"), 1e-12);
  EXPECT_LT(t.at("unit_cbar"), 1e-12);
  for (auto i : patch.interior_nodes()) {
    const auto q = patch.at(i);
    EXPECT_NEAR(q.u.dot(q.u_up), 1.0, 1e-12);
    EXPECT_LT((q.omega + q.omega.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((q.sigma - q.sigma.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((q.sigma * q.u_up).cwiseAbs().maxCoeff(), 1e-12);  // spatial
  }
}

TEST(TensorLab, ShearSquareIsNonNegative) {
  // Σ is spatial, and the metric is negative definite on the spatial slice.
  const FieldPatch patch(standard_family(), 5, 0.1);
  const auto s = shear_square_range(patch);
  EXPECT_GE(s.min, -1e-12);
  EXPECT_GT(s.max, 0.0);
}

TEST(TensorLab, EntropySignFollowsVartheta) {
  const FieldPatch patch(standard_family(), 5, 0.1);
  auto one = [](const Vec4&) { return 1.0; };
  EXPECT_TRUE(check_entropy_sign(patch, one, 1, 0).pass());
  EXPECT_FALSE(check_entropy_sign(patch, one, -1, 0.1).pass());
  const FieldPatch flat(flat_family(), 5, 0.1);
  EXPECT_TRUE(check_entropy_sign(flat, one, -1, 0).pass());
}

TEST(TensorLab, ConvergenceAndControls) {
  const Report r = run_lab({});
  for (const auto& c : r.checks) {
    if (c.name.rfind("converges", 0) == 0 || c.name.rfind("control", 0) == 0 || c.name.rfind("exact", 0) == 0 ||
        c.name == "entropy term flips with vartheta")
      EXPECT_TRUE(c.pass) << c.name << " " << c.detail.dump();
  }
  EXPECT_FALSE(r.find("shear square <= 0")->pass);
  EXPECT_FALSE(r.pass());
  const std::string csv = lab_csv(r);
  EXPECT_EQ(csv.rfind("identity,h,residual\n", 0), 0u);
  EXPECT_NE(csv.find("claim4,"), std::string::npos);
}
