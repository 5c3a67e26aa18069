// idcalc: JSON front end for the identity, coloring, forcing and ground
// libraries. Exit codes: 0 success or true verdict, 1 false or absent
// verdict, 2 input error, 3 resource guard.

#include <CLI11.hpp>

#include <functional>
#include <iostream>

#include "idcalc/errors.hpp"
#include "idcalc/json_io.hpp"

using namespace idcalc;
using io::json;

namespace {

enum Exit { kOk = 0, kFalse = 1, kInput = 2, kResource = 3 };

int emit(const json& payload, bool verdict = true) {
  std::cout << io::dump(payload);
  return verdict ? kOk : kFalse;
}

std::unique_ptr<GroundModel> load_ground(const std::string& path) { return io::ground_from_json(io::read_file(path)); }
Gamma load_gamma(const std::string& path) { return path.empty() ? Gamma{} : io::gamma_from_json(io::read_file(path)); }

IdentityFilter parse_filter(const std::string& f) {
  if (f == "id1") return IdentityFilter::ID1;
  if (f == "id2") return IdentityFilter::ID2;
  if (f == "idstar") return IdentityFilter::IDstar;
  if (f == "nice") return IdentityFilter::KNice;
  throw InputError("filter must be id1, id2, idstar or nice");
}

json identity_list(const std::vector<Identity>& ids) {
  json list = json::array();
  for (const auto& s : ids) list.push_back(io::to_json(s));
  return {{"count", ids.size()}, {"identities", std::move(list)}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite workbench for identities, partition arrows, historical forcing conditions and ground models"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("idcalc schema ") + io::kSchemaVersion);
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker cap for parallel searches")->check(CLI::PositiveNumber);

  std::function<int()> run;
  auto bind = [&run](CLI::App* cmd, std::function<int()> fn) { cmd->callback([&run, fn] { run = fn; }); };

  // identities ---------------------------------------------------------------
  auto* ids = app.add_subcommand("identities", "Tree-domain identities");
  ids->require_subcommand(1);

  int ell = 0, m = 1, k = 0, pair_cap = kDefaultPairCap;
  std::string filter = "id2";
  auto* ids_enum = ids->add_subcommand("enum", "Enumerate identities on dom_{ell,m}");
  ids_enum->add_option("--ell", ell)->required();
  ids_enum->add_option("--m", m)->required();
  ids_enum->add_option("--filter", filter, "id1, id2, idstar or nice")->capture_default_str();
  ids_enum->add_option("--k", k, "Niceness parameter for --filter nice");
  ids_enum->add_option("--pair-cap", pair_cap)->capture_default_str();
  bind(ids_enum, [&] {
    return emit(identity_list(enumerate_identities(ell, m, {parse_filter(filter), k}, pair_cap)));
  });

  std::string in_path;
  auto* ids_nice = ids->add_subcommand("nice", "Decide k-niceness");
  ids_nice->add_option("--in", in_path)->required();
  ids_nice->add_option("--k", k)->required();
  bind(ids_nice, [&] {
    const auto r = niceness(io::identity_from_json(io::read_file(in_path)), k);
    return emit(io::to_json(r), r.nice());
  });

  int star_n = 0;
  auto* ids_star = ids->add_subcommand("star", "The star identity on the full binary level n");
  ids_star->add_option("--n", star_n)->required();
  bind(ids_star, [&] {
    return emit(io::to_json(star_identity(star_n)));
  });

  std::string from_path, to_path;
  auto* ids_embed = ids->add_subcommand("embed", "Find an identity embedding");
  ids_embed->add_option("--from", from_path)->required();
  ids_embed->add_option("--to", to_path)->required();
  bind(ids_embed, [&] {
    const auto h = embed_identity(io::identity_from_json(io::read_file(from_path)), io::identity_from_json(io::read_file(to_path)));
    return emit({{"embeds", h.has_value()}, {"mapping", h ? json(*h) : json(nullptr)}}, h.has_value());
  });

  // coloring -----------------------------------------------------------------
  auto* col = app.add_subcommand("coloring", "Pair colorings and partition arrows");
  col->require_subcommand(1);

  int ell_max = 0, m_max = 1;
  auto* col_id2 = col->add_subcommand("id2", "Identities realized by a coloring");
  col_id2->add_option("--in", in_path)->required();
  col_id2->add_option("--ell-max", ell_max)->required();
  col_id2->add_option("--m-max", m_max)->required();
  col_id2->add_option("--pair-cap", pair_cap)->capture_default_str();
  bind(col_id2, [&] {
    return emit(identity_list(id2_of(io::coloring_from_json(io::read_file(in_path)), ell_max, m_max, pair_cap)));
  });

  int arrow_n = 0, mu = 2;
  std::string identity_path;
  auto* col_arrow = col->add_subcommand("arrow", "Decide n -> (s)_mu");
  col_arrow->add_option("--n", arrow_n)->required();
  col_arrow->add_option("--mu", mu)->required();
  col_arrow->add_option("--identity", identity_path)->required();
  bind(col_arrow, [&] {
    ArrowOptions opt;
    opt.jobs = jobs;
    const auto r = arrow_check(arrow_n, mu, io::identity_from_json(io::read_file(identity_path)), opt);
    return emit(io::to_json(r), r.verdict);
  });

  std::vector<std::string> codes;
  auto* col_meet = col->add_subcommand("meet", "Color pairs of codes by the rank of their meet");
  col_meet->add_option("--codes", codes)->required()->delimiter(',');
  bind(col_meet, [&] { return emit(io::to_json(meet_coloring(codes))); });

  // forcing ------------------------------------------------------------------
  auto* frc = app.add_subcommand("forcing", "Historical forcing conditions");
  frc->require_subcommand(1);

  std::string cond_path, deriv_path, gamma_path, ground_path, bounds_path, left_path, right_path;
  bool strict = false;
  auto* f_verify = frc->add_subcommand("verify", "Check a derivation clause by clause");
  f_verify->add_option("--cond", cond_path)->required();
  f_verify->add_option("--deriv", deriv_path)->required();
  f_verify->add_option("--gamma", gamma_path);
  f_verify->add_option("--ground", ground_path)->required();
  f_verify->add_flag("--strict", strict, "Case 2 overlap closure must stay inside u1 ∩ u2");
  bind(f_verify, [&] {
    const Condition p = io::coloring_from_json(io::read_file(cond_path));
    const Derivation d = io::derivation_from_json(io::read_file(deriv_path));
    const Gamma gamma = load_gamma(gamma_path);
    const auto g = load_ground(ground_path);
    const bool valid = verify_derivation(p, d, gamma, *g, strict);
    return emit({{"valid", valid}, {"top", io::to_json(verify_case(p, d.witness, gamma, *g, {}, strict))}}, valid);
  });

  int alpha = 0;
  auto* f_extend = frc->add_subcommand("extend", "Add one point with fresh colors");
  f_extend->add_option("--cond", cond_path)->required();
  f_extend->add_option("--alpha", alpha)->required();
  bind(f_extend, [&] {
    const Condition p = io::coloring_from_json(io::read_file(cond_path));
    const Condition q = extend_point(p, alpha);
    return emit({{"condition", io::to_json(q)}, {"case", 1}, {"witness", io::to_json(CaseWitness{Case1Witness{p, alpha}})}});
  });

  auto* f_amal = frc->add_subcommand("amalgamate", "Free amalgamation of two conditions");
  f_amal->add_option("--left", left_path)->required();
  f_amal->add_option("--right", right_path)->required();
  f_amal->add_option("--ground", ground_path)->required();
  f_amal->add_flag("--strict", strict);
  bind(f_amal, [&] {
    const Condition p1 = io::coloring_from_json(io::read_file(left_path));
    const Condition p2 = io::coloring_from_json(io::read_file(right_path));
    const auto g = load_ground(ground_path);
    try {
      const Condition q = free_amalgamate(p1, p2, *g, strict);
      return emit({{"ok", true}, {"condition", io::to_json(q)}, {"case", 2}, {"witness", io::to_json(CaseWitness{Case2Witness{p1, p2}})}});
    } catch (const ClauseViolation& e) {
      return emit({{"ok", false}, {"clause", e.clause()}, {"detail", e.what()}}, false);
    } catch (const IncompatibleError& e) {
      return emit({{"ok", false}, {"clause", "compatible"}, {"detail", e.what()}}, false);
    }
  });

  auto* f_gen = frc->add_subcommand("generate", "Bounded generation of conditions");
  f_gen->add_option("--gamma", gamma_path);
  f_gen->add_option("--ground", ground_path)->required();
  f_gen->add_option("--bounds", bounds_path)->required();
  f_gen->add_flag("--strict", strict);
  bind(f_gen, [&] {
    const auto g = load_ground(ground_path);
    const auto b = io::bounds_from_json(io::read_file(bounds_path));
    const auto u = generate(load_gamma(gamma_path), *g, b, {strict});
    json stages = json::array();
    for (const auto& st : u.by_stage()) {
      json list = json::array();
      for (const auto& p : st) list.push_back(io::to_json(p));
      stages.push_back(std::move(list));
    }
    return emit({{"bounds", io::to_json(b)},
                 {"size", u.size()},
                 {"stages_run", u.stages_run()},
                 {"saturated", u.saturated()},
                 {"stages", std::move(stages)}});
  });

  auto* f_member = frc->add_subcommand("member", "Bounded membership search");
  f_member->add_option("--cond", cond_path)->required();
  f_member->add_option("--gamma", gamma_path);
  f_member->add_option("--ground", ground_path)->required();
  f_member->add_option("--bounds", bounds_path)->required();
  f_member->add_flag("--strict", strict);
  bind(f_member, [&] {
    const Condition p = io::coloring_from_json(io::read_file(cond_path));
    const auto g = load_ground(ground_path);
    const auto b = io::bounds_from_json(io::read_file(bounds_path));
    const auto d = member_bounded(p, load_gamma(gamma_path), *g, b, {strict});
    return emit({{"present", d.has_value()},
                 {"within_bounds", true},
                 {"bounds", io::to_json(b)},
                 {"derivation", d ? io::to_json(*d) : json(nullptr)}},
                d.has_value());
  });

  // ground -------------------------------------------------------------------
  auto* grd = app.add_subcommand("ground", "Graded ground models");
  grd->require_subcommand(1);

  int ground_n = 0;
  std::vector<int> thresholds;
  std::uint64_t seed = 1;
  auto* g_build = grd->add_subcommand("build", "Seeded graded ground");
  g_build->add_option("--n", ground_n)->required();
  g_build->add_option("--thresholds", thresholds, "N0,N1,N2")->required()->delimiter(',')->expected(3);
  g_build->add_option("--seed", seed)->capture_default_str();
  bind(g_build, [&] {
    return emit(io::to_json(GradedGround::build(ground_n, {thresholds[0], thresholds[1], thresholds[2]}, seed)));
  });

  GroundCheckOptions check_opt;
  auto* g_check = grd->add_subcommand("check", "Re-check the section law, small sections and filtrations");
  g_check->add_option("--in", in_path)->required();
  g_check->add_option("--exhaustive-limit", check_opt.exhaustive_limit)->capture_default_str();
  g_check->add_option("--samples", check_opt.samples)->capture_default_str();
  g_check->add_option("--sample-seed", check_opt.seed)->capture_default_str();
  bind(g_check, [&] {
    const auto g = load_ground(in_path);
    const auto* graded = dynamic_cast<const GradedGround*>(g.get());
    if (!graded) throw InputError("ground check needs a graded ground");
    const auto r = check_suitable_clauses(*graded, check_opt);
    return emit(io::to_json(r), r.ok());
  });

  std::vector<int> assignment;
  std::string witness_path;
  SuitabilityOptions suit;
  auto* g_witness = grd->add_subcommand("witness", "Find or check a suitability witness");
  g_witness->add_option("--ground", ground_path)->required();
  g_witness->add_option("--identity", identity_path)->required();
  g_witness->add_option("--assignment", assignment, "Universe point per leaf")->required()->delimiter(',');
  g_witness->add_option("--n-star", suit.n_star);
  g_witness->add_option("--level", suit.level)->capture_default_str();
  g_witness->add_option("--check", witness_path, "Verify this witness instead of searching");
  bind(g_witness, [&] {
    const auto g = load_ground(ground_path);
    const Identity s = io::identity_from_json(io::read_file(identity_path));
    if (!witness_path.empty()) {
      const auto w = io::suitability_witness_from_json(io::read_file(witness_path));
      json vs = json::array();
      const auto violations = suitability_violations(*g, assignment, s, w);
      for (const auto& v : violations) vs.push_back({{"clause", v.clause}, {"detail", v.detail}});
      return emit({{"verified", violations.empty()}, {"violations", std::move(vs)}}, violations.empty());
    }
    const auto w = find_suitability_witness(*g, assignment, s, suit);
    const bool verified = w && verify_suitability_witness(*g, assignment, s, *w);
    return emit({{"found", w.has_value()}, {"verified", verified}, {"witness", w ? io::to_json(*w) : json(nullptr)}}, verified);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    return run();
  } catch (const ResourceError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return kResource;
  } catch (const ClauseViolation& e) {
    std::cerr << "clause (" << e.clause() << "): " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInput;
  }
}
