// Command-line surface for the centralising-monoid computations: condition
// classification, commuting-operation enumeration, resumable stage runs, the
// context pipeline, lattice queries and the verification report.

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "centmon/centmon.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void handle_signal(int) { g_interrupted.store(true); }

int default_workers() {
  if (const char* env = std::getenv("CENTMON_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

using centmon::AttributeUniverse;
using centmon::ConditionId;
using centmon::MajorityOp;
using centmon::UnaryOp;
using nlohmann::json;

int cmd_classify(int code, bool json_out) {
  const UnaryOp s = UnaryOp::from_code(4, code);
  const ConditionId id = centmon::classify_unary(s);
  if (!json_out) {
    std::cout << "u" << code << " = " << s.values_string() << " -> " << id.name()
              << "\n";
    return 0;
  }
  json out{{"code", code},
           {"values", {s.tab[0], s.tab[1], s.tab[2], s.tab[3]}},
           {"image_size", s.image_size()},
           {"class", id.name()}};
  if (s.image_size() == 3) {
    const auto a = centmon::analyze_image3(s);
    json orbits = json::array();
    for (const auto& orb : a.orbits) {
      json jorb = json::array();
      for (const auto& t : orb)
        jorb.push_back({static_cast<int>(t[0]), static_cast<int>(t[1]),
                        static_cast<int>(t[2])});
      orbits.push_back(std::move(jorb));
    }
    out["analysis"] = json{{"alpha", a.alpha}, {"beta", a.beta},
                           {"gamma", a.gamma}, {"t", a.t},
                           {"u", a.u},         {"v", a.v},
                           {"x", a.x},         {"y", a.y},
                           {"restriction_is_permutation", a.zeta_is_permutation},
                           {"orbits", orbits}};
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_enumerate(const std::string& tag, bool count_only, std::uint64_t limit,
                  bool json_out) {
  const AttributeUniverse& u = AttributeUniverse::instance();
  const int ci = u.index_of(tag);
  if (ci < 0) throw std::invalid_argument("unknown attribute " + tag);
  const centmon::StagePlan plan = centmon::build_plan(u, ci);
  if (count_only) {
    const std::uint64_t n = centmon::count_plan(plan);
    if (json_out)
      std::cout << json{{"attribute", u.cls(ci).id.name()}, {"count", n}}.dump()
                << "\n";
    else
      std::cout << n << "\n";
    return 0;
  }
  std::uint64_t emitted = 0;
  centmon::enumerate_plan(plan, [&](const MajorityOp& f) {
    std::cout << f.str() << "\n";
    return ++emitted != limit;
  });
  return 0;
}

int cmd_stage(const std::string& tag, bool all, const std::string& out_dir,
              std::uint64_t budget, std::uint64_t interval, int workers,
              bool json_out) {
  const AttributeUniverse& u = AttributeUniverse::instance();
  centmon::pipeline::Paths paths{out_dir};
  centmon::pipeline::StageOptions opt;
  opt.node_budget = budget;
  opt.checkpoint_interval = interval;
  opt.interrupt = &g_interrupted;
  opt.log = [](const std::string& line) { std::cerr << line << "\n"; };

  bool complete = true;
  json stages = json::array();
  if (all) {
    complete = centmon::pipeline::run_all_stages(u, paths, workers, opt);
    if (complete)
      for (const auto& res : centmon::pipeline::load_all_stages(u, paths))
        stages.push_back(
            json{{"condition", res.tag}, {"monoids", res.monoids.size()}});
  } else {
    const int ci = u.index_of(tag);
    if (ci < 0) throw std::invalid_argument("unknown attribute " + tag);
    const auto outcome = centmon::pipeline::run_stage(u, ci, paths, opt);
    complete = outcome.completed;
    if (complete)
      stages.push_back(json{{"condition", outcome.result.tag},
                            {"monoids", outcome.result.monoids.size()}});
  }
  if (!complete) {
    std::cerr << (g_interrupted.load() ? "interrupted" : "budget exhausted")
              << "; checkpoints flushed, rerun to resume\n";
    return 1;
  }
  if (json_out)
    std::cout << json{{"stages", stages}}.dump() << "\n";
  else
    for (const auto& s : stages)
      std::cout << s["condition"].get<std::string>() << " "
                << s["monoids"].get<std::size_t>() << "\n";
  return 0;
}

int cmd_assemble(const std::string& out_dir, bool json_out) {
  const AttributeUniverse& u = AttributeUniverse::instance();
  centmon::pipeline::Paths paths{out_dir};
  const auto stages = centmon::pipeline::load_all_stages(u, paths);
  const auto assembled = centmon::pipeline::assemble(u, stages);
  paths.ensure_dirs();
  centmon::fca::write_cxt(assembled.k1, paths.k1().string());
  if (json_out)
    std::cout << json{{"objects", assembled.disjoint_objects},
                      {"distinct_functions", assembled.distinct_functions},
                      {"file", paths.k1().string()}}
                     .dump()
              << "\n";
  else
    std::cout << "K1: " << assembled.disjoint_objects << " objects ("
              << assembled.distinct_functions << " distinct operations) -> "
              << paths.k1().string() << "\n";
  return 0;
}

int cmd_canonicalize(const std::string& out_dir, bool json_out) {
  const AttributeUniverse& u = AttributeUniverse::instance();
  centmon::pipeline::Paths paths{out_dir};
  const auto stages = centmon::pipeline::load_all_stages(u, paths);
  const auto assembled = centmon::pipeline::assemble(u, stages);
  const auto canon = centmon::pipeline::canonicalize(u, assembled);
  paths.ensure_dirs();
  centmon::fca::write_cxt(canon.k2, paths.k2().string());
  centmon::fca::write_cxt(canon.k3, paths.k3().string());
  if (json_out)
    std::cout << json{{"k2_objects", canon.k2.object_count()},
                      {"k3_attributes", canon.k3.attribute_count()}}
                     .dump()
              << "\n";
  else
    std::cout << "K2: " << canon.k2.object_count() << " objects -> "
              << paths.k2().string() << "\nK3: " << canon.k3.attribute_count()
              << " attributes -> " << paths.k3().string() << "\n";
  return 0;
}

int cmd_intents(const std::string& path, bool count_only, bool json_out) {
  const auto ctx = centmon::fca::read_cxt(path);
  if (count_only) {
    const auto n = centmon::fca::count_intents(ctx);
    if (json_out)
      std::cout << json{{"intents", n}}.dump() << "\n";
    else
      std::cout << n << "\n";
    return 0;
  }
  json list = json::array();
  centmon::fca::next_closure_intents(ctx, [&](const centmon::fca::Bitset& b) {
    if (json_out) {
      json names = json::array();
      for (int m : b.bits()) names.push_back(ctx.attributes[m]);
      list.push_back(std::move(names));
    } else {
      std::string line;
      for (int m : b.bits()) {
        if (!line.empty()) line += ' ';
        line += ctx.attributes[m];
      }
      std::cout << "{" << line << "}\n";
    }
    return true;
  });
  if (json_out) std::cout << list.dump() << "\n";
  return 0;
}

int cmd_maximal(const std::string& path, bool count_only, bool json_out) {
  const auto ctx = centmon::fca::read_cxt(path);
  const auto maximal = centmon::fca::maximal_proper_intents(ctx);
  if (count_only) {
    if (json_out)
      std::cout << json{{"maximal", maximal.size()}}.dump() << "\n";
    else
      std::cout << maximal.size() << "\n";
    return 0;
  }
  json list = json::array();
  for (const auto& b : maximal) {
    json names = json::array();
    std::string line;
    for (int m : b.bits()) {
      names.push_back(ctx.attributes[m]);
      if (!line.empty()) line += ' ';
      line += ctx.attributes[m];
    }
    if (json_out)
      list.push_back(std::move(names));
    else
      std::cout << "{" << line << "}\n";
  }
  if (json_out) std::cout << list.dump() << "\n";
  return 0;
}

int cmd_conjugacy(const std::string& out_dir, bool maximal_only, bool json_out) {
  centmon::pipeline::Paths paths{out_dir};
  const auto k2 = centmon::fca::read_cxt(paths.k2().string());
  std::vector<MajorityOp> ops;
  for (const auto& label : k2.objects) ops.push_back(MajorityOp::parse(4, label));
  if (maximal_only) {
    const auto maximal = centmon::fca::maximal_proper_intents(k2);
    std::vector<MajorityOp> witnesses;
    for (const auto& m : maximal)
      for (int g = 0; g < k2.object_count(); ++g)
        if (k2.rows[g] == m) {
          witnesses.push_back(ops[g]);
          break;
        }
    ops = std::move(witnesses);
  }
  const auto part = centmon::pipeline::conjugacy_partition(ops);
  if (json_out) {
    json classes = json::array();
    for (std::size_t i = 0; i < part.classes.size(); ++i) {
      json members = json::array();
      for (int idx : part.classes[i]) members.push_back(ops[idx].str());
      classes.push_back(json{{"representative", part.representatives[i]},
                             {"members", members}});
    }
    std::cout << json{{"objects", ops.size()},
                      {"classes", part.classes.size()},
                      {"partition", classes}}
                     .dump()
              << "\n";
  } else {
    std::cout << ops.size() << " objects in " << part.classes.size()
              << " conjugacy classes\n";
  }
  return 0;
}

int cmd_oracle(int k, bool json_out) {
  if (k != 3) throw std::invalid_argument("the oracle runs at carrier size 3");
  const auto res = centmon::pipeline::oracle_k3();
  if (json_out) {
    std::cout << json{{"pairs_checked", res.pairs_checked},
                      {"mismatches", res.mismatches},
                      {"plans_complete", res.plans_complete},
                      {"distinct_rows", res.distinct_rows},
                      {"k2_objects", res.k2_objects},
                      {"k3_attributes", res.k3_attributes},
                      {"intents", res.intents},
                      {"maximal", res.maximal}}
                     .dump()
              << "\n";
  } else {
    std::cout << "pairs checked: " << res.pairs_checked
              << "\nmismatches: " << res.mismatches << "\nplan enumeration "
              << (res.plans_complete ? "matches" : "DIFFERS FROM")
              << " brute force\ndistinct rows: " << res.distinct_rows
              << "\nreduced objects: " << res.k2_objects
              << "\nreduced attributes: " << res.k3_attributes
              << "\nintents: " << res.intents << "\nmaximal: " << res.maximal
              << "\n";
  }
  return (res.mismatches == 0 && res.plans_complete) ? 0 : 1;
}

int cmd_verify(const std::string& out_dir, const std::string& expect_path,
               bool json_out) {
  const AttributeUniverse& u = AttributeUniverse::instance();
  centmon::pipeline::Paths paths{out_dir};
  centmon::pipeline::ExpectedFigures expected;
  if (!expect_path.empty()) {
    std::ifstream in(expect_path);
    if (!in) throw centmon::error("cannot open " + expect_path);
    json j;
    in >> j;
    expected = j.get<centmon::pipeline::ExpectedFigures>();
  }
  const auto report = centmon::pipeline::verify_report(u, paths, expected);
  centmon::pipeline::write_manifest(paths);
  if (json_out) {
    json figures = json::array();
    for (const auto& f : report.figures)
      figures.push_back(json{{"figure", f.name},
                             {"expected", f.expected},
                             {"actual", f.actual},
                             {"pass", f.pass}});
    std::cout << json{{"figures", figures},
                      {"all_pass", report.all_pass},
                      {"disjoint_objects", report.disjoint_objects},
                      {"distinct_functions", report.distinct_functions}}
                     .dump()
              << "\n";
  } else {
    for (const auto& f : report.figures)
      std::cout << (f.pass ? "[PASS] " : "[FAIL] ") << f.name << ": expected "
                << f.expected << ", actual " << f.actual << "\n";
  }
  return report.all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);

  CLI::App app{"centralising monoids with majority witnesses on {0,1,2,3}"};
  app.require_subcommand(1);
  bool json_out = false;
  app.add_flag("--json", json_out, "machine-readable output on stdout");

  auto* classify = app.add_subcommand("classify", "attribute class of a unary operation");
  int code = 0;
  classify->add_option("code", code, "unary operation code in [0,256)")->required();

  auto* enumerate = app.add_subcommand("enumerate", "majority operations commuting with a class");
  std::string attribute;
  bool count_only = false;
  std::uint64_t limit = 0;
  enumerate->add_option("--attribute", attribute, "condition tag, e.g. C1 or U26")->required();
  enumerate->add_flag("--count-only", count_only, "print the count instead of the operations");
  enumerate->add_option("--limit", limit, "stop after this many operations");

  auto* stage = app.add_subcommand("stage", "run enumeration stages with persistence");
  std::string stage_attribute, out_dir = "out";
  bool stage_all = false;
  std::uint64_t budget = UINT64_MAX, interval = 100000000;
  int workers = default_workers();
  stage->add_option("--attribute", stage_attribute, "condition tag");
  stage->add_flag("--all", stage_all, "run every stage");
  stage->add_option("--out", out_dir, "workspace directory")->required();
  stage->add_option("--budget", budget, "node budget for this invocation");
  stage->add_option("--checkpoint-interval", interval, "nodes between checkpoints");
  stage->add_option("--workers", workers, "worker threads for --all");

  auto* assemble = app.add_subcommand("assemble", "join stage outputs into contexts/K1.cxt");
  assemble->add_option("--out", out_dir, "workspace directory")->required();

  auto* canonicalize = app.add_subcommand("canonicalize", "clarify and reduce into K2.cxt / K3.cxt");
  canonicalize->add_option("--out", out_dir, "workspace directory")->required();

  auto* intents = app.add_subcommand("intents", "enumerate or count intents of a context");
  std::string cxt_path;
  intents->add_option("context", cxt_path, "path to a Burmeister .cxt file")->required();
  intents->add_flag("--count", count_only, "print the count only");

  auto* maximal = app.add_subcommand("maximal", "maximal proper intents of a context");
  maximal->add_option("context", cxt_path, "path to a Burmeister .cxt file")->required();
  maximal->add_flag("--count", count_only, "print the count only");

  auto* conjugacy = app.add_subcommand("conjugacy", "conjugacy classes of the K2 objects");
  bool maximal_only = false;
  conjugacy->add_option("--out", out_dir, "workspace directory")->required();
  conjugacy->add_flag("--maximal-only", maximal_only, "restrict to maximal-monoid witnesses");

  auto* oracle = app.add_subcommand("oracle", "carrier-size-3 brute-force cross-check");
  int oracle_k = 3;
  oracle->add_option("--k", oracle_k, "carrier size (3)");

  auto* verify = app.add_subcommand("verify", "recompute figures and compare with the expected table");
  std::string expect_path;
  verify->add_option("--out", out_dir, "workspace directory")->required();
  verify->add_option("--expect", expect_path, "JSON file with expected figures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;  // --help and friends
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*classify) return cmd_classify(code, json_out);
    if (*enumerate) return cmd_enumerate(attribute, count_only, limit, json_out);
    if (*stage) {
      if (!stage_all && stage_attribute.empty()) {
        std::cerr << "stage requires --attribute or --all\n";
        return 2;
      }
      return cmd_stage(stage_attribute, stage_all, out_dir, budget, interval,
                       workers, json_out);
    }
    if (*assemble) return cmd_assemble(out_dir, json_out);
    if (*canonicalize) return cmd_canonicalize(out_dir, json_out);
    if (*intents) return cmd_intents(cxt_path, count_only, json_out);
    if (*maximal) return cmd_maximal(cxt_path, count_only, json_out);
    if (*conjugacy) return cmd_conjugacy(out_dir, maximal_only, json_out);
    if (*oracle) return cmd_oracle(oracle_k, json_out);
    if (*verify) return cmd_verify(out_dir, expect_path, json_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
