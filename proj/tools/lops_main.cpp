// lops: characteristic analysis of Leray systems, the fluid instance and the
// finite-difference tensor lab, from the command line.
//
// Exit codes: 0 every check passed, 1 some check failed, 2 bad input.

#include "lops/analyze.hpp"
#include "lops/ens.hpp"
#include "lops/errors.hpp"
#include "lops/tensor_lab.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace lops;

namespace {

struct RunConfig {
  std::string input;
  std::string tau = "1,0,0,0";
  std::size_t samples = 0;  // 0: subcommand default
  double tol = 1e-9;
  std::uint64_t seed = 7;
  bool json = false, csv = false;
  std::string out;
  std::string q, F;
  double h = 0.1;
  int refine = 2;
  int nodes = 9;
  double vartheta = -1;
  std::string factor = "light";
  std::size_t n = 100;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Rational parse_rational(const std::string& flag, const std::string& text) {
  try {
    return Rational(text);
  } catch (const std::exception&) {
    throw InputError(flag + ": not a rational number: " + text);
  }
}

Covector parse_tau(const std::string& text) {
  Covector tau;
  std::stringstream in(text);
  std::string part;
  int i = 0;
  while (std::getline(in, part, ',')) {
    if (i == 4) throw InputError("--tau needs exactly four components");
    tau[i++] = parse_rational("--tau", part);
  }
  if (i != 4) throw InputError("--tau needs exactly four components");
  return tau;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw InputError("cannot write " + cfg.out);
  f << text;
}

int finish(const RunConfig& cfg, const Report& r) {
  emit(cfg, cfg.json ? r.to_json().dump(2) + "\n" : r.to_text());
  return r.pass() ? 0 : 1;
}

int cmd_analyze(const RunConfig& cfg) {
  AnalyzeOptions opt;
  opt.tau = parse_tau(cfg.tau);
  if (cfg.samples) opt.samples = cfg.samples;
  opt.tol = cfg.tol;
  opt.seed = cfg.seed;
  if (!std::ifstream(cfg.input)) throw InputError("cannot open " + cfg.input);
  const LeraySystem s = load_system(cfg.input);
  const Report r = analyze_system(s, opt);
  if (!cfg.json) {
    std::string text = r.to_text();
    for (auto key : {"degree", "factor count", "sigma0", "leray condition"})
      if (r.summary.contains(key)) {
        const auto& v = r.summary[key];
        text += std::string(key) + ": " + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
      }
    emit(cfg, text);
    return r.pass() ? 0 : 1;
  }
  return finish(cfg, r);
}

int cmd_ens_verify(const RunConfig& cfg) {
  EnsOptions opt;
  if (cfg.samples) opt.samples = opt.block_samples = cfg.samples;
  opt.seed = cfg.seed;
  if (!cfg.q.empty()) opt.q_override = parse_rational("--q", cfg.q);
  if (opt.q_override && *opt.q_override < 0) throw InputError("--q must be nonnegative");
  return finish(cfg, verify_ens_determinant(opt));
}

int cmd_ens_spec(const RunConfig& cfg) {
  emit(cfg, print_system(ens_system()));
  return 0;
}

int cmd_cones(const RunConfig& cfg) {
  FluidState st = reference_state();
  if (!cfg.F.empty()) st.F = parse_rational("--F", cfg.F);
  if (!cfg.q.empty()) st.q = parse_rational("--q", cfg.q);
  if (st.F <= 0 || st.q < 0) throw InputError("need F > 0 and q >= 0");
  const Factorization f = reference_factors(st);
  const NamedFactor* chosen = nullptr;
  for (const auto& nf : f.factors)
    if (nf.name == cfg.factor) chosen = &nf;
  if (!chosen) throw InputError("--factor must be one of light, flow, cubic, P1, P2");
  const Poly light = light_cone_at(st);
  const auto cones = cone_sample(chosen->factor, parse_tau(cfg.tau), {}, cfg.n, cfg.seed, &light, cfg.tol);
  const bool ok = cones.within_light_cone;
  if (cfg.json) {
    Json rows = Json::array();
    for (const auto& row : cones.rows) {
      Json roots = Json::array();
      for (double x : row.roots) roots.push_back(num_str(x, 12));
      rows.push_back({{"direction", {num_str(row.direction[1], 12), num_str(row.direction[2], 12), num_str(row.direction[3], 12)}},
                      {"roots", roots}});
    }
    Json j{{"factor", cones.factor.empty() ? cfg.factor : cones.factor},
           {"pass", ok},
           {"rows", cones.rows.size()},
           {"within light cone", cones.within_light_cone},
           {"max speed", num_str(cones.max_speed, 12)},
           {"samples", rows}};
    emit(cfg, j.dump(2) + "\n");
  } else {
    emit(cfg, cone_csv(cones));
  }
  if (!ok) std::cerr << "cones: " << cfg.factor << " leaves the light cone\n";
  return ok ? 0 : 1;
}

int cmd_lab(const RunConfig& cfg) {
  LabConfig lab;
  lab.h = cfg.h;
  lab.refine = cfg.refine;
  lab.nodes = cfg.nodes;
  lab.seed = cfg.seed;
  lab.vartheta = cfg.vartheta;
  if (!(lab.h > 0) || lab.refine < 1) throw InputError("need --h > 0 and --refine >= 1");
  const Report r = run_lab(lab);
  if (cfg.csv) {
    emit(cfg, lab_csv(r));
    return r.pass() ? 0 : 1;
  }
  return finish(cfg, r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Characteristic determinants, hyperbolicity and Gevrey exponents of Leray systems"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* c) {
    c->add_option("--seed", cfg.seed, "random seed");
    c->add_flag("--json", cfg.json, "JSON output");
    c->add_option("--out", cfg.out, "write output to a file");
  };

  auto* analyze = app.add_subcommand("analyze", "analyze a .lops system");
  analyze->add_option("file", cfg.input, "system file")->required();
  analyze->add_option("--tau", cfg.tau, "time direction x0,x1,x2,x3");
  analyze->add_option("--samples", cfg.samples, "directions for the sampled root test")->check(CLI::PositiveNumber);
  analyze->add_option("--tol", cfg.tol, "root tolerance")->check(CLI::PositiveNumber);
  common(analyze);

  auto* ens = app.add_subcommand("ens", "the fluid instance");
  ens->require_subcommand(1);
  auto* verify = ens->add_subcommand("verify", "determinant, discriminant, inequalities, q degeneration");
  verify->add_option("--samples", cfg.samples, "numeric states")->check(CLI::PositiveNumber);
  verify->add_option("--q", cfg.q, "q for the degeneration report (default 0)");
  common(verify);
  auto* spec = ens->add_subcommand("spec", "print the system in .lops form");
  spec->add_option("--out", cfg.out, "write output to a file");

  auto* cones = app.add_subcommand("cones", "sample characteristic cones");
  cones->add_option("--factor", cfg.factor, "light, flow, cubic, P1 or P2");
  cones->add_option("--n", cfg.n, "directions")->check(CLI::PositiveNumber);
  cones->add_option("--tau", cfg.tau, "time direction x0,x1,x2,x3");
  cones->add_option("--tol", cfg.tol, "root tolerance")->check(CLI::PositiveNumber);
  cones->add_option("--q", cfg.q, "coupling q");
  cones->add_option("--F", cfg.F, "index F");
  common(cones);

  auto* lab = app.add_subcommand("lab", "finite-difference identity checks");
  lab->require_subcommand(1);
  auto* run = lab->add_subcommand("run", "convergence tables and sign checks");
  run->set_help_flag("--help", "print help");  // -h is the grid spacing
  run->add_option("--h", cfg.h, "coarse grid spacing");
  run->add_option("--refine", cfg.refine, "number of grids");
  run->add_option("--nodes", cfg.nodes, "coarse nodes per axis");
  run->add_option("--vartheta", cfg.vartheta, "sign convention for the entropy term");
  run->add_flag("--csv", cfg.csv, "CSV residual table");
  common(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*analyze) return cmd_analyze(cfg);
    if (*verify) return cmd_ens_verify(cfg);
    if (*spec) return cmd_ens_spec(cfg);
    if (*cones) return cmd_cones(cfg);
    if (*run) return cmd_lab(cfg);
  } catch (const ParseError& e) {
    std::cerr << cfg.input << ": " << e.what() << "\n";
    return 2;
  } catch (const PatchTooSmall& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
