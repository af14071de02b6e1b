#include "lops/analyze.hpp"

#include "lops/determinant.hpp"
#include "lops/errors.hpp"

namespace lops {

namespace {

Json verdict_json(const HyperbolicityVerdict& v) {
  Json j{{"method", to_string(v.method)}, {"verdict", to_string(v.verdict)}, {"detail", v.detail}};
  if (v.method == Method::sampled) {
    j["samples"] = v.samples;
    j["tolerance"] = v.tolerance;
  }
  if (v.method == Method::quadratic_signature) j["signature"] = {v.positive, v.negative, v.zero};
  if (v.witness) j["witness"] = *v.witness;
  return j;
}

}  // namespace

HyperbolicityVerdict factor_verdict(const Poly& factor, const Covector& tau, const AnalyzeOptions& opt) {
  const auto h = xi_homogeneity(factor);
  if (h.homogeneous && h.degree == 1) return hyperbolicity_linear(factor, tau);
  if (h.homogeneous && h.degree == 2) {
    try {
      return hyperbolicity_quadratic(factor, tau);
    } catch (const DegeneracyDetected&) {
      // Singular forms with one positive direction need the root test.
    }
  }
  return hyperbolicity_sampled(factor, tau, {}, opt.samples, opt.tol, opt.seed);
}

Report analyze_system(const LeraySystem& s, const AnalyzeOptions& opt) {
  Report r;
  r.title = "analyze " + s.name;

  const auto sv = validate_structure(s);
  r.add("structure", "indices", sv.pass, {{"square", sv.square}, {"failures", sv.failures}});
  const int ell = total_order(s);
  r.summary["total order"] = ell;
  if (!sv.pass) return r;

  const PolyMatrix m = build_symbol_matrix(s);
  const Poly det = determinant(m);
  const auto hom = xi_homogeneity(det);
  r.summary["degree"] = hom.homogeneous ? Json(hom.degree) : Json("inhomogeneous");
  r.add("determinant degree equals total order", "indices", hom.homogeneous && hom.degree == ell,
        {{"degree", hom.homogeneous ? Json(hom.degree) : Json(nullptr)}, {"total order", ell}, {"terms", det.size()}});

  Factorization f;
  if (s.factors) {
    f = factorization_of(*s.factors);
    const auto vr = verify_factorization(det, f);
    Json d{{"difference terms", vr.difference_terms}};
    if (!vr.pass) d["witness"] = vr.witness;
    r.add("factorization", "product_hyp_pol", vr.pass, d);
  } else {
    f.factors = {{"det", det, 1}};
  }

  Assignment point = to_assignment(s.assumptions);
  for (const auto& [k, v] : to_assignment(s.point)) point[k] = v;

  std::vector<FactorVerdict> verdicts;
  std::vector<int> degrees;
  Json table = Json::array();
  bool all_hyperbolic = true;
  for (const auto& nf : f.factors) {
    Json row{{"factor", nf.name}, {"multiplicity", nf.multiplicity}};
    Verdict v = Verdict::inconclusive;
    try {
      const Poly at = partial_eval(nf.factor, point);
      const auto hv = factor_verdict(at, opt.tau, opt);
      v = hv.verdict;
      row.update(verdict_json(hv));
      const auto h = xi_homogeneity(at);
      degrees.push_back(h.homogeneous ? h.degree : degree(at));
    } catch (const Error& e) {
      row["error"] = e.what();
      degrees.push_back(0);
    }
    all_hyperbolic = all_hyperbolic && v == Verdict::hyperbolic;
    verdicts.push_back({nf.multiplicity, v});
    table.push_back(row);
  }
  r.add("every factor hyperbolic", "product_hyp_pol", all_hyperbolic, {{"factors", table}});

  int count = 0;
  for (const auto& v : verdicts) count += v.multiplicity;
  r.summary["factor count"] = count;
  if (all_hyperbolic) {
    const auto sigma = gevrey_sigma(verdicts);
    r.summary["sigma0"] = sigma ? q_str(*sigma) : "sobolev";
  } else {
    r.summary["sigma0"] = "undetermined";
  }

  const auto lc = leray_condition(s, degrees);
  r.add("leray condition", "leray_condition", lc.pass,
        {{"statement", lc.statement}, {"max factor degree", lc.max_factor_degree}, {"max m", lc.max_m}, {"min n", lc.min_n}});
  r.summary["leray condition"] = lc.statement;
  return r;
}

}  // namespace lops
