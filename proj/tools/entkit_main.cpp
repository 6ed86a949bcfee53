#include <CLI11.hpp>

#include <exception>
#include <fstream>
#include <iostream>

#include "entkit/fuzz.hpp"
#include "entkit/io.hpp"

namespace {

using entkit::io::json;

int run(int argc, char** argv) {
  CLI::App app{"entkit: entropic sumset calculus, couplings and small-doubling decompositions"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  std::string json_out;
  app.add_option("--seed", seed, "seed for randomized commands");
  app.add_option("--tolerance", tolerance, "numeric tolerance for bound checks");
  app.add_option("--json-out", json_out, "write the JSON report here instead of stdout");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "doubling/energy/distance report for a set or distribution");
  std::string metrics_file, metrics_other;
  bool metrics_dstar = false;
  metrics->add_option("file", metrics_file, "set (.jsonl) or distribution (.json) file")->required();
  metrics->add_option("--other", metrics_other, "second input for distances");
  metrics->add_flag("--d-star", metrics_dstar, "also maximize the distance over couplings");

  // couple
  auto* couple = app.add_subcommand("couple", "three-marginal coupling solve");
  std::string c_p1, c_p2, c_p3;
  couple->add_option("--p1", c_p1)->required();
  couple->add_option("--p2", c_p2)->required();
  couple->add_option("--p3", c_p3)->required();

  // extract
  auto* extract = app.add_subcommand("extract", "KL-threshold structured-set extraction");
  std::string e_x, e_y;
  double e_c = 4.0;
  extract->add_option("--x", e_x)->required();
  extract->add_option("--y", e_y)->required();
  extract->add_option("--C", e_c, "threshold parameter (>= 4)");

  // localize
  auto* localize = app.add_subcommand("localize", "subgroup localization at small distance");
  std::string l_x, l_y;
  double l_eps0 = 0.01;
  localize->add_option("--x", l_x)->required();
  localize->add_option("--y", l_y)->required();
  localize->add_option("--eps0", l_eps0, "applicability threshold");

  // audit-projection
  auto* audit = app.add_subcommand("audit-projection", "fiber inequality audit under a homomorphism");
  std::string a_x1, a_x2, a_hom = "mod2";
  audit->add_option("--x1", a_x1)->required();
  audit->add_option("--x2", a_x2)->required();
  audit->add_option("--hom", a_hom, "mod2 | proj:<index> | double");

  // pfr-oracle
  auto* oracle = app.add_subcommand("pfr-oracle", "exhaustive closest-subspace search over F2^D");
  std::string o_x;
  int o_cap = 5;
  oracle->add_option("--x", o_x)->required();
  oracle->add_option("--cap", o_cap, "dimension cap for enumeration");

  // decompose
  auto* dec = app.add_subcommand("decompose", "small-doubling decomposition");
  std::string d_algo = "skew", d_a, d_b, d_config;
  bool d_verify = false;
  dec->add_option("--algo", d_algo, "skew | dim | pfr")->check(CLI::IsMember({"skew", "dim", "pfr"}));
  dec->add_option("--a", d_a)->required();
  dec->add_option("--b", d_b)->required();
  dec->add_option("--config", d_config, "JSON file with algorithm constants");
  dec->add_flag("--verify", d_verify, "re-check the certified bounds with the exact oracles");

  // fuzz
  auto* fuzz = app.add_subcommand("fuzz", "seeded inequality fuzzing across the toolkit");
  int f_trials = 100;
  int f_threads = 0;
  std::vector<std::string> f_select;
  bool f_list = false;
  fuzz->add_option("--trials", f_trials, "trials per inequality");
  fuzz->add_option("--threads", f_threads, "worker threads (0 = default)");
  fuzz->add_option("--select", f_select, "run only these inequalities")->delimiter(',');
  fuzz->add_flag("--list", f_list, "list inequality names and exit");

  CLI11_PARSE(app, argc, argv);

  json out;
  int exit_code = 0;

  if (metrics->parsed()) {
    entkit::FinDist p = entkit::io::parse_any_as_dist(metrics_file);
    entkit::MetricReport rep;
    bool have_set = true;
    entkit::GroupContext ctx = p.ctx;
    std::vector<entkit::CoordVec> as_set = p.support();
    for (const auto& [v, w] : p.mass) {
      if (std::abs(w - p.mass.front().second) > 1e-12) { have_set = false; break; }
    }
    if (have_set) {
      rep = entkit::sandwich_check(ctx, as_set);
    } else {
      rep.sigma_ent = entkit::sigma_ent(p);
      rep.d_ent = std::log(rep.sigma_ent);
    }
    if (!metrics_other.empty()) {
      entkit::FinDist q = entkit::io::parse_any_as_dist(metrics_other);
      rep.d_ent = entkit::d_ent(p, q);
      if (metrics_dstar) {
        entkit::DStarResult ds = entkit::d_star(p, q);
        rep.d_star = ds.value;
        rep.d_star_gap = ds.gap;
      }
    } else if (metrics_dstar) {
      entkit::DStarResult ds = entkit::d_star(p, p);
      rep.d_star = ds.value;
      rep.d_star_gap = ds.gap;
    }
    for (const entkit::BoundCheck& b : rep.bounds_checked) {
      if (!b.holds) exit_code = 2;
    }
    out = entkit::io::metric_report_to_json(rep);
  } else if (couple->parsed()) {
    entkit::CouplingProblem prob{entkit::io::parse_any_as_dist(c_p1),
                                 entkit::io::parse_any_as_dist(c_p2),
                                 entkit::io::parse_any_as_dist(c_p3)};
    out = entkit::io::coupling_result_to_json(entkit::solve_three_marginal(prob));
  } else if (extract->parsed()) {
    entkit::ExtractionResult r = entkit::extract_structured_set(
        entkit::io::parse_any_as_dist(e_x), entkit::io::parse_any_as_dist(e_y), e_c);
    if (!(r.doubling_bound_holds && (r.dist_bound_holds || r.dist_bound_inconclusive))) {
      exit_code = 2;
    }
    out = entkit::io::extraction_to_json(r);
  } else if (localize->parsed()) {
    entkit::LocalizeResult r = entkit::localize_subgroup(entkit::io::parse_any_as_dist(l_x),
                                                         entkit::io::parse_any_as_dist(l_y), l_eps0);
    if (r.status == entkit::LocalizeStatus::Ok && !r.bound_holds) exit_code = 2;
    out = entkit::io::localize_to_json(r);
  } else if (audit->parsed()) {
    entkit::FinDist x1 = entkit::io::parse_any_as_dist(a_x1);
    entkit::FinDist x2 = entkit::io::parse_any_as_dist(a_x2);
    entkit::Homomorphism h = [&] {
      if (a_hom == "mod2") return entkit::Homomorphism::mod2(x1.ctx);
      if (a_hom == "double") return entkit::Homomorphism::doubling(x1.ctx);
      if (a_hom.rfind("proj:", 0) == 0) {
        return entkit::Homomorphism::coord_project(x1.ctx, std::stoi(a_hom.substr(5)));
      }
      throw CLI::ValidationError("--hom", "expected mod2 | proj:<index> | double");
    }();
    entkit::ProjectionAudit r = entkit::projection_inequality_audit(x1, x2, h, tolerance);
    if (!(r.inequality_holds && r.identity_holds)) exit_code = 2;
    out = entkit::io::audit_to_json(r);
  } else if (oracle->parsed()) {
    entkit::PfrOracleResult r = entkit::brute_pfr_oracle(entkit::io::parse_any_as_dist(o_x), o_cap);
    out = json{{"subgroup", entkit::io::subgroup_to_json(r.subgroup)},
               {"dist", entkit::io::round12(r.dist)}};
  } else if (dec->parsed()) {
    auto [ctx_a, set_a] = entkit::io::parse_set_file(d_a);
    auto [ctx_b, set_b] = entkit::io::parse_set_file(d_b);
    entkit::require_same_context(ctx_a, ctx_b);
    entkit::AlgoConfig cfg;
    cfg.tol = tolerance;
    if (!d_config.empty()) {
      std::ifstream in(d_config);
      if (!in) throw std::invalid_argument("cannot open " + d_config);
      json c = json::parse(in);
      if (c.contains("eps0")) cfg.eps0 = c["eps0"].get<double>();
      if (c.contains("eps")) cfg.eps_override = c["eps"].get<double>();
      if (c.contains("delta")) cfg.delta_override = c["delta"].get<double>();
      if (c.contains("c1")) cfg.c1_override = c["c1"].get<double>();
      if (c.contains("c_pfr")) cfg.c_pfr = c["c_pfr"].get<double>();
      if (c.contains("subgroup_dim_cap")) cfg.subgroup_dim_cap = c["subgroup_dim_cap"].get<int>();
    }
    entkit::DecompositionResult r;
    if (d_algo == "skew") r = entkit::skew_decompose(ctx_a, set_a, set_b, cfg);
    if (d_algo == "dim") r = entkit::dim_decompose(ctx_a, set_a, set_b, cfg);
    if (d_algo == "pfr") r = entkit::pfr_boosted_decompose(ctx_a, set_a, set_b, cfg);
    out = entkit::io::decomposition_to_json(r);
    if (d_verify) {
      // re-measure with the exact oracles, independent of the trace bookkeeping
      const int da = d_algo == "skew" ? entkit::skew_dimension_exact(ctx_a, r.A_prime)
                                      : entkit::affine_dimension(ctx_a, r.A_prime);
      const int db = d_algo == "skew" ? entkit::skew_dimension_exact(ctx_a, r.B_prime)
                                      : entkit::affine_dimension(ctx_a, r.B_prime);
      const bool ok = r.size_loss <= r.size_bound + tolerance && da <= r.dim_bound + tolerance &&
                      db <= r.dim_bound + tolerance;
      out["verify"] = json{{"dim_a", da}, {"dim_b", db}, {"bounds_hold", ok}};
      if (!ok) exit_code = 2;
    }
    if (!r.bounds_hold) exit_code = 2;
  } else if (fuzz->parsed()) {
    if (f_list) {
      out = json{{"inequalities", entkit::fuzz_check_names()}};
    } else {
      entkit::FuzzConfig cfg;
      cfg.seed = seed;
      cfg.trials = f_trials;
      cfg.threads = f_threads;
      cfg.tolerance = tolerance;
      cfg.selected = f_select;
      entkit::FuzzReport rep = entkit::run_fuzz(cfg);
      if (rep.total_failures > 0) exit_code = 2;
      if (json_out.empty()) {
        std::cout << rep.to_json_bytes() << "\n";
      } else {
        std::ofstream f(json_out);
        f << rep.to_json_bytes() << "\n";
      }
      return exit_code;
    }
  }

  entkit::io::emit(out, json_out);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
