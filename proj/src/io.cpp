#include "entkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace entkit::io {

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

namespace {

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& what) {
  throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + what);
}

GroupContext ctx_from_header(const json& h, const std::string& name, std::size_t line) {
  if (!h.is_object() || !h.contains("group")) fail(name, line, "expected a header object with \"group\"");
  const std::string g = h["group"].get<std::string>();
  if (g == "Z") return GroupContext::z_lattice(h.at("D").get<int>());
  if (g == "F2") return GroupContext::f2(h.at("D").get<int>());
  if (g == "Zmod") return GroupContext::zmod(h.at("moduli").get<std::vector<Coord>>());
  fail(name, line, "unknown group kind \"" + g + "\"");
}

CoordVec coords_from_json(const json& arr, const GroupContext& ctx, const std::string& name,
                          std::size_t line) {
  if (!arr.is_array()) fail(name, line, "expected an integer array");
  CoordVec v;
  for (const json& c : arr) {
    if (!c.is_number_integer()) fail(name, line, "coordinates must be integers");
    v.push_back(c.get<Coord>());
  }
  if (static_cast<int>(v.size()) != ctx.dim) {
    fail(name, line, "expected " + std::to_string(ctx.dim) + " coordinates, found " +
                         std::to_string(v.size()));
  }
  return v;
}

}  // namespace

std::pair<GroupContext, std::vector<CoordVec>> parse_set_stream(std::istream& in,
                                                                const std::string& name) {
  std::string linebuf;
  std::size_t lineno = 0;
  GroupContext ctx;
  std::vector<CoordVec> elems;
  bool have_header = false;
  while (std::getline(in, linebuf)) {
    ++lineno;
    if (linebuf.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(linebuf);
    } catch (const json::parse_error& e) {
      fail(name, lineno, std::string("malformed JSON: ") + e.what());
    }
    if (!have_header) {
      ctx = ctx_from_header(j, name, lineno);
      have_header = true;
      continue;
    }
    CoordVec v = canon(ctx, coords_from_json(j, ctx, name, lineno));
    for (const CoordVec& seen : elems) {
      if (seen == v) fail(name, lineno, "duplicate set element");
    }
    elems.push_back(std::move(v));
  }
  if (!have_header) fail(name, 0, "missing header line");
  if (elems.empty()) fail(name, lineno, "empty set");
  return {ctx, normalize_set(ctx, elems)};
}

std::pair<GroupContext, std::vector<CoordVec>> parse_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return parse_set_stream(in, path);
}

FinDist parse_dist_stream(std::istream& in, const std::string& name) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(name + ": malformed JSON: " + e.what());
  }
  const GroupContext ctx = ctx_from_header(j, name, 1);
  if (!j.contains("mass") || !j["mass"].is_array()) {
    throw std::invalid_argument(name + ": missing \"mass\" array");
  }
  std::vector<std::pair<CoordVec, double>> w;
  std::size_t row = 0;
  for (const json& entry : j["mass"]) {
    ++row;
    if (!entry.is_array() || entry.size() != static_cast<std::size_t>(ctx.dim) + 1) {
      fail(name, row, "mass rows are [coords..., p]");
    }
    CoordVec v(ctx.dim);
    for (int i = 0; i < ctx.dim; ++i) {
      if (!entry[i].is_number_integer()) fail(name, row, "coordinates must be integers");
      v[i] = entry[i].get<Coord>();
    }
    w.emplace_back(std::move(v), entry[ctx.dim].get<double>());
  }
  try {
    return FinDist::from_weights(ctx, std::move(w));
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(name + ": " + e.what());
  }
}

FinDist parse_dist_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return parse_dist_stream(in, path);
}

FinDist parse_any_as_dist(const std::string& path) {
  std::ifstream probe(path);
  if (!probe) throw std::invalid_argument("cannot open " + path);
  std::string first;
  std::getline(probe, first);
  json j;
  try {
    j = json::parse(first);
  } catch (const json::parse_error&) {
    // a distribution file may span several lines
    std::ifstream in(path);
    return parse_dist_stream(in, path);
  }
  if (j.is_object() && j.contains("mass")) return parse_dist_file(path);
  auto [ctx, s] = parse_set_file(path);
  return FinDist::uniform_on(ctx, s);
}

json ctx_to_json(const GroupContext& ctx) {
  json j;
  switch (ctx.kind) {
    case GroupKind::ZLattice:
      j["group"] = "Z";
      j["D"] = ctx.dim;
      break;
    case GroupKind::F2Vec:
      j["group"] = "F2";
      j["D"] = ctx.dim;
      break;
    case GroupKind::ZModProduct:
      j["group"] = "Zmod";
      j["moduli"] = ctx.moduli;
      break;
    case GroupKind::QuotientF2:
      j["group"] = "F2quot";
      j["D"] = ctx.dim;
      j["subgroup"] = subgroup_to_json(*ctx.quot);
      break;
  }
  return j;
}

json set_to_json(const GroupContext& ctx, const std::vector<CoordVec>& s) {
  json j = ctx_to_json(ctx);
  j["elements"] = s;
  return j;
}

json dist_to_json(const FinDist& d) {
  json j = ctx_to_json(d.ctx);
  json rows = json::array();
  for (const auto& [v, p] : d.mass) {
    json row = json::array();
    for (Coord c : v) row.push_back(c);
    row.push_back(round12(p));
    rows.push_back(std::move(row));
  }
  j["mass"] = std::move(rows);
  return j;
}

json joint_to_json(const JointDist& jd) {
  json j;
  j["ctx"] = ctx_to_json(jd.ctx1);
  json rows = json::array();
  for (const auto& [xy, p] : jd.mass) {
    rows.push_back(json{{"x", xy.first}, {"y", xy.second}, {"p", round12(p)}});
  }
  j["mass"] = std::move(rows);
  return j;
}

json subgroup_to_json(const SubgroupF2& h) {
  return json{{"D", h.dim()}, {"rank", h.rank()}, {"basis", h.basis()}};
}

json metric_report_to_json(const MetricReport& r) {
  json j;
  j["sigma_ent"] = round12(r.sigma_ent);
  j["sigma_comb"] = round12(r.sigma_comb);
  j["energy"] = r.energy;
  j["energy_lower"] = round12(r.energy_lower);
  j["d_ent"] = round12(r.d_ent);
  if (r.d_star) j["d_star"] = round12(*r.d_star);
  if (r.d_star_gap) j["d_star_gap"] = round12(*r.d_star_gap);
  json bounds = json::array();
  for (const BoundCheck& b : r.bounds_checked) {
    bounds.push_back(json{{"name", b.name},
                          {"lhs", round12(b.lhs)},
                          {"rhs", round12(b.rhs)},
                          {"holds", b.holds}});
  }
  j["bounds_checked"] = std::move(bounds);
  return j;
}

json dstar_to_json(const DStarResult& r) {
  return json{{"value", round12(r.value)},
              {"gap", round12(r.gap)},
              {"iterations", r.iterations},
              {"converged", r.converged}};
}

json extraction_to_json(const ExtractionResult& r) {
  json j;
  j["S"] = r.S;
  j["C"] = round12(r.C_param);
  j["k"] = round12(r.k);
  j["p_mass"] = round12(r.p_mass);
  j["log_size_lower"] = round12(r.log_size_lower);
  j["bound_approx"] = round12(r.bound_approx);
  j["bound_doubling"] = round12(r.bound_doubling);
  j["measured_dist"] = round12(r.measured_dist);
  j["measured_dist_gap"] = round12(r.measured_dist_gap);
  j["measured_doubling"] = round12(r.measured_doubling);
  j["dist_bound_holds"] = r.dist_bound_holds;
  j["dist_bound_inconclusive"] = r.dist_bound_inconclusive;
  j["doubling_bound_holds"] = r.doubling_bound_holds;
  return j;
}

json localize_to_json(const LocalizeResult& r) {
  json j;
  switch (r.status) {
    case LocalizeStatus::Ok: j["status"] = "ok"; break;
    case LocalizeStatus::NotApplicable: j["status"] = "not-applicable"; break;
    case LocalizeStatus::ClosureFailed: j["status"] = "closure-failed"; break;
  }
  j["eps"] = round12(r.eps);
  if (r.status == LocalizeStatus::Ok) {
    j["subgroup"] = r.subgroup;
    if (r.subgroup_f2) j["subgroup_basis"] = subgroup_to_json(*r.subgroup_f2);
    j["dist_x"] = round12(r.dist_x);
    j["dist_y"] = round12(r.dist_y);
    j["bound_holds"] = r.bound_holds;
    j["shift"] = r.shift;
  }
  if (r.status == LocalizeStatus::ClosureFailed) j["closure_ratio"] = round12(r.closure_ratio);
  return j;
}

json audit_to_json(const ProjectionAudit& a) {
  return json{{"lhs", round12(a.lhs)},
              {"rhs_projected", round12(a.rhs_projected)},
              {"rhs_fiber_sum", round12(a.rhs_fiber_sum)},
              {"slack", round12(a.slack)},
              {"slack_identity", round12(a.slack_identity)},
              {"inequality_holds", a.inequality_holds},
              {"identity_holds", a.identity_holds}};
}

json coupling_result_to_json(const ThreeMarginalResult& r) {
  json j;
  j["feasible"] = r.feasible;
  if (r.feasible) {
    j["joint"] = joint_to_json(r.joint);
    j["max_marginal_error"] = round12(r.max_marginal_error);
  } else {
    auto table = [](const std::vector<std::pair<CoordVec, double>>& f) {
      json rows = json::array();
      for (const auto& [v, x] : f) rows.push_back(json{{"at", v}, {"value", round12(x)}});
      return rows;
    };
    j["certificate"] = json{{"f1", table(r.certificate.f1)},
                            {"f2", table(r.certificate.f2)},
                            {"f3", table(r.certificate.f3)},
                            {"pairing", round12(r.certificate.pairing)},
                            {"min_slack", round12(r.certificate.min_slack)}};
  }
  return j;
}

json decomposition_to_json(const DecompositionResult& r) {
  json j;
  j["algo"] = r.algo;
  j["A_prime"] = r.A_prime;
  j["B_prime"] = r.B_prime;
  j["k"] = round12(r.k);
  j["size_loss"] = round12(r.size_loss);
  j["size_bound"] = round12(r.size_bound);
  j["dim_bound"] = round12(r.dim_bound);
  if (r.dim_star_a >= 0) j["dim_star_a"] = r.dim_star_a;
  if (r.dim_star_b >= 0) j["dim_star_b"] = r.dim_star_b;
  if (r.dim_a >= 0) j["dim_a"] = r.dim_a;
  if (r.dim_b >= 0) j["dim_b"] = r.dim_b;
  j["bounds_hold"] = r.bounds_hold;
  j["hypothesis_clean"] = r.hypothesis_clean;
  if (r.algo == "pfr") j["measured_pfr_c"] = round12(r.measured_pfr_c);
  json trace = json::array();
  for (const TraceNode& n : r.trace) {
    trace.push_back(json{{"index", n.index},
                         {"parent", n.parent},
                         {"depth", n.depth},
                         {"label", n.label},
                         {"size_a", n.size_a},
                         {"size_b", n.size_b},
                         {"dim", n.dim},
                         {"measure", n.measure},
                         {"k", round12(n.k)},
                         {"split_stat", round12(n.split_stat)},
                         {"m_stat", round12(n.m_stat)},
                         {"k_child", round12(n.k_child)},
                         {"node_loss", round12(n.node_loss)},
                         {"node_loss_bound", round12(n.node_loss_bound)},
                         {"f_step_ok", n.f_step_ok},
                         {"hypothesis_ok", n.hypothesis_ok},
                         {"note", n.note}});
  }
  j["trace"] = std::move(trace);
  return j;
}

void write_set_file(const std::string& path, const GroupContext& ctx,
                    const std::vector<CoordVec>& s) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << ctx_to_json(ctx).dump() << "\n";
  for (const CoordVec& v : s) out << json(v).dump() << "\n";
}

void emit(const json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

}  // namespace entkit::io
