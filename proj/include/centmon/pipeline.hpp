#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "centmon/base.hpp"
#include "centmon/commutation.hpp"
#include "centmon/conditions.hpp"
#include "centmon/enumerate.hpp"
#include "centmon/fca.hpp"
#include "centmon/monoid.hpp"
#include "centmon/sha256.hpp"

namespace centmon::pipeline {

using nlohmann::json;

/// Directory layout of a pipeline workspace.
struct Paths {
  std::filesystem::path root;

  std::filesystem::path stages() const { return root / "stages"; }
  std::filesystem::path contexts() const { return root / "contexts"; }
  std::filesystem::path reports() const { return root / "reports"; }
  std::filesystem::path stage_file(const std::string& tag) const {
    return stages() / ("stage-" + tag + ".json");
  }
  std::filesystem::path stage_partial(const std::string& tag) const {
    return stages() / ("stage-" + tag + ".partial.json");
  }
  std::filesystem::path k1() const { return contexts() / "K1.cxt"; }
  std::filesystem::path k2() const { return contexts() / "K2.cxt"; }
  std::filesystem::path k3() const { return contexts() / "K3.cxt"; }
  std::filesystem::path report() const { return reports() / "report.json"; }
  std::filesystem::path manifest() const { return root / "manifest.sha256"; }

  void ensure_dirs() const {
    std::filesystem::create_directories(stages());
    std::filesystem::create_directories(contexts());
    std::filesystem::create_directories(reports());
  }
};

/// Headline figures the complete run is checked against.  Configuration
/// data rather than hard-coded assertions: the same pipeline runs at other
/// carrier sizes where the targets differ.
struct ExpectedFigures {
  std::uint64_t k1_objects = 8119;
  std::uint64_t k2_objects = 392;
  std::uint64_t k3_attributes = 155;
  std::uint64_t intents = 1715;
  std::uint64_t maximal = 147;
  std::uint64_t conjugacy_classes = 90;
  std::uint64_t maximal_witness_classes = 19;
};

inline void to_json(json& j, const ExpectedFigures& e) {
  j = json{{"k1_objects", e.k1_objects},
           {"k2_objects", e.k2_objects},
           {"k3_attributes", e.k3_attributes},
           {"intents", e.intents},
           {"maximal", e.maximal},
           {"conjugacy_classes", e.conjugacy_classes},
           {"maximal_witness_classes", e.maximal_witness_classes}};
}

inline void from_json(const json& j, ExpectedFigures& e) {
  j.at("k1_objects").get_to(e.k1_objects);
  j.at("k2_objects").get_to(e.k2_objects);
  j.at("k3_attributes").get_to(e.k3_attributes);
  j.at("intents").get_to(e.intents);
  j.at("maximal").get_to(e.maximal);
  j.at("conjugacy_classes").get_to(e.conjugacy_classes);
  j.at("maximal_witness_classes").get_to(e.maximal_witness_classes);
}

namespace detail {

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spill(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot write " + p.string());
  out << data;
}

/// Serialise with an embedded checksum over the rest of the document.
inline std::string dump_with_checksum(json doc) {
  doc.erase("sha256");
  const std::string payload = doc.dump();
  doc["sha256"] = centmon::detail::sha256_hex(payload);
  return doc.dump(1);
}

inline json load_with_checksum(const std::filesystem::path& p) {
  json doc;
  try {
    doc = json::parse(slurp(p));
  } catch (const json::exception& e) {
    throw integrity_error("unparsable JSON in " + p.string() + ": " + e.what());
  }
  if (!doc.contains("sha256") || !doc["sha256"].is_string())
    throw integrity_error("missing checksum in " + p.string());
  const std::string stored = doc["sha256"];
  json body = doc;
  body.erase("sha256");
  if (centmon::detail::sha256_hex(body.dump()) != stored)
    throw integrity_error("checksum mismatch in " + p.string());
  return doc;
}

}  // namespace detail

struct StageOptions {
  std::uint64_t node_budget = UINT64_MAX;    // per invocation
  std::uint64_t checkpoint_interval = 100000000;  // heartbeat, in DFS nodes
  const std::atomic<bool>* interrupt = nullptr;
  std::function<void(const std::string&)> log;  // progress, already line-formatted
};

struct StageOutcome {
  bool completed = false;
  StageResult result;  // valid when completed
};

namespace detail {

inline json stage_result_to_json(const AttributeUniverse& u, const StageResult& res) {
  json monoids = json::array();
  for (const auto& [row, rep] : res.monoids) {
    json entry;
    entry["monoid"] = expand_row(u, row).codes();
    entry["representative"] = rep;
    monoids.push_back(std::move(entry));
  }
  json stats{{"nodes", res.stats.nodes},
             {"candidates", res.stats.candidates},
             {"pruned", res.stats.pruned},
             {"suspensions", res.stats.suspensions},
             {"wall_ms", res.stats.wall_ms}};
  return json{{"condition", res.tag}, {"monoids", monoids}, {"statistics", stats}};
}

inline ConditionSet row_from_codes(const AttributeUniverse& u,
                                   const std::vector<int>& codes) {
  std::set<int> have(codes.begin(), codes.end());
  for (int t : u.trivial_codes())
    if (!have.count(t))
      throw integrity_error("stored monoid misses a trivial map");
  ConditionSet row;
  for (int c = 0; c < u.size(); ++c) {
    std::size_t present = 0;
    for (int code : u.cls(c).members) present += have.count(code);
    if (present == u.cls(c).members.size())
      row.set(c);
    else if (present != 0)
      throw integrity_error("stored monoid splits class " + u.cls(c).id.name());
  }
  return row;
}

inline StageResult stage_result_from_json(const AttributeUniverse& u, const json& doc) {
  StageResult res;
  res.tag = doc.at("condition").get<std::string>();
  res.class_index = u.index_of(res.tag);
  if (res.class_index < 0) throw integrity_error("unknown stage tag " + res.tag);
  for (const json& entry : doc.at("monoids")) {
    const auto codes = entry.at("monoid").get<std::vector<int>>();
    const auto rep = entry.at("representative").get<std::string>();
    res.monoids.emplace_back(row_from_codes(u, codes), rep);
  }
  const json& st = doc.at("statistics");
  res.stats.nodes = st.at("nodes").get<std::uint64_t>();
  res.stats.candidates = st.at("candidates").get<std::uint64_t>();
  res.stats.pruned = st.at("pruned").get<std::uint64_t>();
  res.stats.suspensions = st.at("suspensions").get<std::uint64_t>();
  res.stats.wall_ms = st.at("wall_ms").get<double>();
  return res;
}

inline json search_state_to_json(const std::string& tag, const StageSearchState& st) {
  json recorded = json::array();
  for (const auto& [row, rep] : st.recorded)
    recorded.push_back(json{{"row", row.w}, {"representative", rep}});
  json path = json::array();
  for (Element v : st.resume_path) path.push_back(static_cast<int>(v));
  json stats{{"nodes", st.stats.nodes},
             {"candidates", st.stats.candidates},
             {"pruned", st.stats.pruned},
             {"suspensions", st.stats.suspensions},
             {"wall_ms", st.stats.wall_ms}};
  return json{{"condition", tag},
              {"resume_path", path},
              {"recorded", recorded},
              {"statistics", stats}};
}

inline StageSearchState search_state_from_json(const json& doc) {
  StageSearchState st;
  for (const json& entry : doc.at("recorded")) {
    ConditionSet row;
    const auto words = entry.at("row").get<std::vector<std::uint64_t>>();
    if (words.size() != row.w.size())
      throw integrity_error("bad row width in checkpoint");
    std::copy(words.begin(), words.end(), row.w.begin());
    st.recorded.emplace(row, entry.at("representative").get<std::string>());
  }
  for (const json& v : doc.at("resume_path"))
    st.resume_path.push_back(static_cast<Element>(v.get<int>()));
  const json& stats = doc.at("statistics");
  st.stats.nodes = stats.at("nodes").get<std::uint64_t>();
  st.stats.candidates = stats.at("candidates").get<std::uint64_t>();
  st.stats.pruned = stats.at("pruned").get<std::uint64_t>();
  st.stats.suspensions = stats.at("suspensions").get<std::uint64_t>();
  st.stats.wall_ms = stats.at("wall_ms").get<double>();
  return st;
}

}  // namespace detail

/// Run one stage with persistence: a completed stage file short-circuits,
/// a partial checkpoint resumes, heartbeat checkpoints are written every
/// `checkpoint_interval` nodes, and budget exhaustion or an interrupt
/// suspends with the state on disk rather than truncating.
inline StageOutcome run_stage(const AttributeUniverse& u, int class_index,
                              const Paths& paths, const StageOptions& opt = {}) {
  paths.ensure_dirs();
  const std::string tag = u.cls(class_index).id.name();

  if (std::filesystem::exists(paths.stage_file(tag))) {
    const json doc = detail::load_with_checksum(paths.stage_file(tag));
    StageOutcome out;
    out.completed = true;
    out.result = detail::stage_result_from_json(u, doc);
    return out;
  }

  StageSearchState st;
  if (std::filesystem::exists(paths.stage_partial(tag)))
    st = detail::search_state_from_json(
        detail::load_with_checksum(paths.stage_partial(tag)));

  const StagePlan plan = build_plan(u, class_index);
  const StageTracker tracker = build_tracker(u, plan);

  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t spent = 0;
  bool done = st.completed;
  while (!done) {
    const std::uint64_t slice =
        std::min<std::uint64_t>(opt.checkpoint_interval,
                                opt.node_budget > spent ? opt.node_budget - spent : 0);
    if (slice == 0) break;
    done = run_stage_search(plan, tracker, st, slice);
    spent += slice;
    const bool interrupted = opt.interrupt && opt.interrupt->load();
    if (!done && (spent < opt.node_budget) && !interrupted) {
      // Heartbeat checkpoint mid-run.
      st.stats.wall_ms += std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      detail::spill(paths.stage_partial(tag),
                    detail::dump_with_checksum(detail::search_state_to_json(tag, st)));
      if (opt.log) opt.log("stage " + tag + " checkpointed");
      continue;
    }
    if (!done) break;
  }
  st.stats.wall_ms += std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();

  if (!done) {
    detail::spill(paths.stage_partial(tag),
                  detail::dump_with_checksum(detail::search_state_to_json(tag, st)));
    if (opt.log) opt.log("stage " + tag + " suspended");
    return {};
  }

  StageResult res;
  res.class_index = class_index;
  res.tag = tag;
  res.stats = st.stats;
  res.monoids.assign(st.recorded.begin(), st.recorded.end());
  std::sort(res.monoids.begin(), res.monoids.end());
  // Certify every representative against its directly computed centraliser.
  for (const auto& [row, rep] : res.monoids) {
    const Monoid direct = unary_centraliser(MajorityOp::parse(4, rep));
    if (!(expand_row(u, row) == direct))
      throw error("stage " + tag + ": centraliser mismatch for " + rep);
  }
  detail::spill(paths.stage_file(tag),
                detail::dump_with_checksum(detail::stage_result_to_json(u, res)));
  std::filesystem::remove(paths.stage_partial(tag));
  if (opt.log)
    opt.log("stage " + tag + " complete: " + std::to_string(res.monoids.size()) +
            " monoids");
  StageOutcome out;
  out.completed = true;
  out.result = std::move(res);
  return out;
}

/// Parallel map over all attribute classes.  Returns true when every stage
/// completed (false after an interrupt or exhausted budget).
inline bool run_all_stages(const AttributeUniverse& u, const Paths& paths,
                           int workers, const StageOptions& opt = {}) {
  std::atomic<int> next{0};
  std::atomic<bool> all_done{true};
  std::mutex log_mutex;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(std::max(workers, 1));
  for (int w = 0; w < std::max(workers, 1); ++w) {
    pool.emplace_back([&, w] {
      try {
        while (true) {
          const int ci = next.fetch_add(1);
          if (ci >= u.size()) return;
          if (opt.interrupt && opt.interrupt->load()) {
            all_done = false;
            return;
          }
          StageOptions local = opt;
          if (opt.log)
            local.log = [&](const std::string& line) {
              std::lock_guard<std::mutex> lock(log_mutex);
              opt.log(line);
            };
          if (!run_stage(u, ci, paths, local).completed) all_done = false;
        }
      } catch (...) {
        errors[w] = std::current_exception();
        all_done = false;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return all_done.load();
}

inline std::vector<StageResult> load_all_stages(const AttributeUniverse& u,
                                                const Paths& paths) {
  std::vector<StageResult> out;
  std::vector<std::string> missing;
  for (int ci = 0; ci < u.size(); ++ci) {
    const std::string tag = u.cls(ci).id.name();
    if (!std::filesystem::exists(paths.stage_file(tag))) {
      missing.push_back(tag);
      continue;
    }
    out.push_back(detail::stage_result_from_json(
        u, detail::load_with_checksum(paths.stage_file(tag))));
  }
  if (!missing.empty()) {
    std::string what = "missing stage files:";
    for (const auto& tag : missing) what += " " + tag;
    throw dependency_error(what);
  }
  return out;
}

/// The lexicographically least majority operation whose centraliser is
/// trivial; it represents the one intent no stage can contribute.
inline MajorityOp find_trivial_witness(const AttributeUniverse& u) {
  const StagePlan plan = build_plan(4, UnaryOp::identity(4));  // whole space
  const StageTracker tracker = build_tracker(u, plan);
  const int n = plan.sigma_size();
  std::array<Element, kMaxSigma> f{};
  std::array<std::uint8_t, kMaxSigma> rem{};
  std::array<ConditionSet, kMaxSigma + 1> violated{};
  violated[0] = tracker.previolated;
  int d = 0;
  rem[0] = plan.stat[0];
  while (d >= 0) {
    if (!rem[d]) {
      --d;
      continue;
    }
    const int v = std::countr_zero(rem[d]);
    rem[d] &= static_cast<std::uint8_t>(rem[d] - 1);
    f[d] = static_cast<Element>(v);
    ConditionSet vio = violated[d] | tracker.kill[d][v];
    for (const StageTracker::Bin& b : tracker.buckets[d])
      if (!vio.test(b.cls) && f[b.to] != b.s[f[b.from]]) vio.set(b.cls);
    if (tracker.mask.minus(vio).empty()) {
      // Deepest-first lexicographic completion: everything below keeps the
      // row empty, so all-zero values finish the witness.
      MajorityOp out;
      out.k = 4;
      for (int i = 0; i <= d; ++i) out.v[i] = f[i];
      for (int i = d + 1; i < n; ++i) out.v[i] = 0;
      return out;
    }
    if (d == n - 1) continue;
    ++d;
    violated[d] = vio;
    rem[d] = plan.stat[d];
  }
  throw error("no trivial-centraliser operation found");
}

struct AssembledContext {
  fca::FormalContext k1;
  // Object index -> originating stage tag ("f0" for the manual object).
  std::vector<std::string> provenance;
  std::uint64_t disjoint_objects = 0;   // stage entries plus f0
  std::uint64_t distinct_functions = 0; // distinct value strings plus f0
};

/// Join all stage lists into the master context: one object per stage entry
/// (cross-stage duplicates retained) plus the manual trivial-centraliser
/// object, over the 167 attribute classes.
inline AssembledContext assemble(const AttributeUniverse& u,
                                 const std::vector<StageResult>& stages) {
  if (static_cast<int>(stages.size()) != u.size())
    throw dependency_error("assemble requires all " + std::to_string(u.size()) +
                           " stages, got " + std::to_string(stages.size()));
  AssembledContext out;
  for (int c = 0; c < u.size(); ++c)
    out.k1.attributes.push_back(u.cls(c).id.name());

  const MajorityOp f0 = find_trivial_witness(u);
  out.k1.objects.push_back("f0/" + f0.str());
  out.k1.rows.push_back(fca::Bitset::zeros(u.size()));
  out.provenance.push_back("f0");

  std::set<std::string> reps{f0.str()};
  for (const StageResult& res : stages) {
    for (const auto& [row, rep] : res.monoids) {
      fca::Bitset r = fca::Bitset::zeros(u.size());
      for (int b : row.bits()) r.set(b);
      out.k1.objects.push_back(res.tag + "/" + rep);
      out.k1.rows.push_back(std::move(r));
      out.provenance.push_back(res.tag);
      reps.insert(rep);
    }
  }
  out.disjoint_objects = out.k1.objects.size();
  out.distinct_functions = reps.size();
  return out;
}

struct CanonicalContexts {
  fca::FormalContext k2;  // object clarified + reduced, conjugation-coherent labels
  fca::FormalContext k3;  // additionally attribute clarified + reduced
};

namespace detail {

inline std::string object_rep(const std::string& label) {
  const auto slash = label.find('/');
  return slash == std::string::npos ? label : label.substr(slash + 1);
}

/// Apply the attribute relabeling induced by conjugation to a row.
inline fca::Bitset conjugate_row(const AttributeUniverse& u,
                                 const std::vector<int>& action,
                                 const fca::Bitset& row) {
  fca::Bitset out = fca::Bitset::zeros(row.n);
  for (int b : row.bits()) out.set(action[b]);
  return out;
}

}  // namespace detail

/// Object clarification and reduction of the master context.  The kept
/// objects are relabelled coherently under conjugation: one witness per
/// row orbit, its conjugates for the other rows of the orbit.  Every chosen
/// witness is certified against its directly computed centraliser row.
inline CanonicalContexts canonicalize(const AttributeUniverse& u,
                                      const AssembledContext& assembled) {
  const auto clar = fca::clarify(assembled.k1, fca::Side::Objects);
  auto red = fca::reduce(clar.ctx, fca::Side::Objects);
  fca::FormalContext& k2 = red.ctx;

  // Lexicographically least witness per kept row.
  std::vector<std::string> witness(k2.object_count());
  {
    std::map<std::vector<std::uint64_t>, std::string> least;
    for (std::size_t g = 0; g < clar.groups.size(); ++g) {
      std::string best;
      for (const std::string& label : clar.groups[g]) {
        const std::string rep = detail::object_rep(label);
        if (best.empty() || rep < best) best = rep;
      }
      least[clar.ctx.rows[g].w] = best;
    }
    for (int g = 0; g < k2.object_count(); ++g) witness[g] = least.at(k2.rows[g].w);
  }

  // Conjugation orbits of the kept rows.
  const auto perms = all_permutations(4);
  std::vector<std::vector<int>> actions;
  for (const auto& p : perms) actions.push_back(u.attribute_action(p));

  std::map<std::vector<std::uint64_t>, int> row_index;
  for (int g = 0; g < k2.object_count(); ++g) row_index[k2.rows[g].w] = g;

  std::vector<bool> seen(k2.object_count(), false);
  for (int g = 0; g < k2.object_count(); ++g) {
    if (seen[g]) continue;
    // Base object: the orbit member with the least witness string.
    int base = g;
    std::vector<int> orbit;
    for (std::size_t pi = 0; pi < perms.size(); ++pi) {
      const fca::Bitset img = detail::conjugate_row(u, actions[pi], k2.rows[g]);
      const auto it = row_index.find(img.w);
      if (it == row_index.end())
        throw error("conjugated row escapes the reduced context");
      if (!seen[it->second]) {
        seen[it->second] = true;
        orbit.push_back(it->second);
      }
      if (witness[it->second] < witness[base]) base = it->second;
    }
    const MajorityOp base_op = MajorityOp::parse(4, witness[base]);
    for (int member : orbit) {
      std::string best;
      for (std::size_t pi = 0; pi < perms.size(); ++pi) {
        const fca::Bitset img = detail::conjugate_row(u, actions[pi], k2.rows[base]);
        if (!(img == k2.rows[member])) continue;
        const std::string cand = conjugate(base_op, perms[pi]).str();
        if (best.empty() || cand < best) best = cand;
      }
      if (best.empty()) throw error("orbit member without a conjugating map");
      witness[member] = best;
    }
  }

  // Certify and relabel.
  for (int g = 0; g < k2.object_count(); ++g) {
    const MajorityOp f = MajorityOp::parse(4, witness[g]);
    const Monoid direct = unary_centraliser(f);
    fca::Bitset row = fca::Bitset::zeros(u.size());
    for (int c = 0; c < u.size(); ++c) {
      bool all = true;
      for (int code : u.cls(c).members) all &= direct.test(code);
      if (all) row.set(c);
    }
    if (!(row == k2.rows[g]))
      throw error("witness row mismatch for " + witness[g]);
    k2.objects[g] = witness[g];
  }

  CanonicalContexts out;
  out.k2 = k2;
  const auto aclar = fca::clarify(k2, fca::Side::Attributes);
  out.k3 = fca::reduce(aclar.ctx, fca::Side::Attributes).ctx;
  return out;
}

/// Intents of the canonical context expanded back to explicit monoids.
inline std::vector<Monoid> list_monoids(const AttributeUniverse& u,
                                        const fca::FormalContext& k2) {
  std::vector<Monoid> out;
  fca::next_closure_intents(k2, [&](const fca::Bitset& intent) {
    ConditionSet row;
    for (int b : intent.bits()) row.set(b);
    out.push_back(expand_row(u, row));
    return true;
  });
  return out;
}

struct ConjugacyPartition {
  std::vector<std::vector<int>> classes;      // object indices per class
  std::vector<std::string> representatives;   // least value string per class
};

/// Orbit partition of majority operations under conjugation.
inline ConjugacyPartition conjugacy_partition(const std::vector<MajorityOp>& ops) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ops.size(); ++i) index[ops[i].str()] = static_cast<int>(i);
  const auto perms = all_permutations(4);
  std::vector<bool> seen(ops.size(), false);
  ConjugacyPartition out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (seen[i]) continue;
    std::vector<int> cls;
    std::string least;
    for (const auto& p : perms) {
      const std::string img = conjugate(ops[i], p).str();
      if (least.empty() || img < least) least = img;
      const auto it = index.find(img);
      if (it != index.end() && !seen[it->second]) {
        seen[it->second] = true;
        cls.push_back(it->second);
      }
    }
    std::sort(cls.begin(), cls.end());
    out.classes.push_back(std::move(cls));
    out.representatives.push_back(least);
  }
  return out;
}

/// Cross-check at carrier size 3: the whole machinery against full-table
/// brute force, plus the lattice of the resulting context.
struct OracleK3Result {
  std::uint64_t pairs_checked = 0;
  std::uint64_t mismatches = 0;  // sigma-restricted vs full-table commutation
  bool plans_complete = true;    // plan enumeration equals brute-force filter
  std::uint64_t distinct_rows = 0;
  std::uint64_t k2_objects = 0;
  std::uint64_t k3_attributes = 0;
  std::uint64_t intents = 0;
  std::uint64_t maximal = 0;
};

inline OracleK3Result oracle_k3() {
  OracleK3Result out;
  const int nf = static_cast<int>(ipow(3, 6));
  const int ns = num_unary(3);

  std::vector<MajorityOp> ops(nf);
  for (int fc = 0; fc < nf; ++fc) {
    MajorityOp f;
    f.k = 3;
    int rest = fc;
    for (int i = 0; i < 6; ++i) {
      f.v[i] = static_cast<Element>(rest % 3);
      rest /= 3;
    }
    ops[fc] = f;
  }

  fca::FormalContext ctx;
  for (int n = 0; n < ns; ++n) ctx.attributes.push_back("u" + std::to_string(n));
  std::vector<std::set<std::string>> commuting_with(ns);
  for (const MajorityOp& f : ops) {
    const FinitaryOp full = expand(f);
    fca::Bitset row = fca::Bitset::zeros(ns);
    for (int n = 0; n < ns; ++n) {
      const UnaryOp s = UnaryOp::from_code(3, n);
      const bool slow = commutes(full, s);
      const bool fast = commutes_on_sigma(f, s);
      ++out.pairs_checked;
      if (slow != fast) ++out.mismatches;
      if (slow) {
        row.set(n);
        commuting_with[n].insert(f.str());
      }
    }
    ctx.objects.push_back(f.str());
    ctx.rows.push_back(std::move(row));
  }

  // Characterisation-driven enumeration per unary map versus the filter.
  for (int n = 0; n < ns; ++n) {
    std::set<std::string> via_plan;
    enumerate_plan(build_plan(3, UnaryOp::from_code(3, n)), [&](const MajorityOp& f) {
      via_plan.insert(f.str());
      return true;
    });
    if (via_plan != commuting_with[n]) out.plans_complete = false;
  }

  const auto clar = fca::clarify(ctx, fca::Side::Objects);
  out.distinct_rows = clar.ctx.object_count();
  const auto red = fca::reduce(clar.ctx, fca::Side::Objects);
  out.k2_objects = red.ctx.object_count();
  const auto aclar = fca::clarify(red.ctx, fca::Side::Attributes);
  const auto ared = fca::reduce(aclar.ctx, fca::Side::Attributes);
  out.k3_attributes = ared.ctx.attribute_count();
  out.intents = fca::count_intents(red.ctx);
  out.maximal = fca::maximal_proper_intents(red.ctx).size();
  return out;
}

/// Write the SHA-256 manifest over every artifact below the workspace root.
inline void write_manifest(const Paths& paths) {
  std::vector<std::filesystem::path> files;
  for (const auto& dir : {paths.stages(), paths.contexts(), paths.reports()}) {
    if (!std::filesystem::exists(dir)) continue;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::string body;
  for (const auto& f : files) {
    body += centmon::detail::sha256_hex(detail::slurp(f)) + "  " +
            std::filesystem::relative(f, paths.root).generic_string() + "\n";
  }
  detail::spill(paths.manifest(), body);
}

/// Check every manifest entry; returns the list of mismatching paths.
inline std::vector<std::string> check_manifest(const Paths& paths) {
  std::vector<std::string> bad;
  if (!std::filesystem::exists(paths.manifest()))
    throw dependency_error("manifest missing: " + paths.manifest().string());
  std::istringstream in(detail::slurp(paths.manifest()));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sep = line.find("  ");
    if (sep == std::string::npos) throw integrity_error("malformed manifest line");
    const std::string want = line.substr(0, sep);
    const std::string rel = line.substr(sep + 2);
    const auto path = paths.root / rel;
    if (!std::filesystem::exists(path) ||
        centmon::detail::sha256_hex(detail::slurp(path)) != want)
      bad.push_back(rel);
  }
  return bad;
}

struct FigureCheck {
  std::string name;
  std::uint64_t expected = 0;
  std::uint64_t actual = 0;
  bool pass = false;
};

struct PipelineReport {
  std::vector<FigureCheck> figures;
  std::uint64_t disjoint_objects = 0;
  std::uint64_t distinct_functions = 0;
  std::uint64_t k1_intents = 0;
  std::uint64_t k3_intents = 0;
  bool all_pass = false;
};

/// Recompute every headline figure from the artifacts on disk, compare with
/// the expected table and write reports/report.json.
inline PipelineReport verify_report(const AttributeUniverse& u, const Paths& paths,
                                    const ExpectedFigures& expected = {}) {
  const auto stages = load_all_stages(u, paths);
  const AssembledContext assembled = assemble(u, stages);
  for (const auto& p : {paths.k1(), paths.k2(), paths.k3()})
    if (!std::filesystem::exists(p))
      throw dependency_error("missing context file " + p.string());
  const fca::FormalContext k1 = fca::read_cxt(paths.k1().string());
  const fca::FormalContext k2 = fca::read_cxt(paths.k2().string());
  const fca::FormalContext k3 = fca::read_cxt(paths.k3().string());

  PipelineReport rep;
  rep.disjoint_objects = assembled.disjoint_objects;
  rep.distinct_functions = assembled.distinct_functions;

  std::vector<MajorityOp> k2ops;
  for (const auto& label : k2.objects) k2ops.push_back(MajorityOp::parse(4, label));
  const ConjugacyPartition all_classes = conjugacy_partition(k2ops);

  const auto maximal = fca::maximal_proper_intents(k2);
  std::vector<MajorityOp> witnesses;
  for (const auto& m : maximal)
    for (int g = 0; g < k2.object_count(); ++g)
      if (k2.rows[g] == m) {
        witnesses.push_back(k2ops[g]);
        break;
      }
  const ConjugacyPartition witness_classes = conjugacy_partition(witnesses);

  rep.k1_intents = fca::count_intents(k1);
  rep.k3_intents = fca::count_intents(k3);

  auto add = [&](const std::string& name, std::uint64_t want, std::uint64_t got) {
    rep.figures.push_back({name, want, got, want == got});
  };
  add("k1_objects", expected.k1_objects, static_cast<std::uint64_t>(k1.object_count()));
  add("k2_objects", expected.k2_objects, static_cast<std::uint64_t>(k2.object_count()));
  add("k3_attributes", expected.k3_attributes,
      static_cast<std::uint64_t>(k3.attribute_count()));
  add("intents", expected.intents, fca::count_intents(k2));
  add("maximal", expected.maximal, static_cast<std::uint64_t>(maximal.size()));
  add("conjugacy_classes", expected.conjugacy_classes,
      static_cast<std::uint64_t>(all_classes.classes.size()));
  add("maximal_witness_classes", expected.maximal_witness_classes,
      static_cast<std::uint64_t>(witness_classes.classes.size()));
  rep.all_pass = true;
  for (const auto& f : rep.figures) rep.all_pass &= f.pass;

  json jfig = json::array();
  for (const auto& f : rep.figures)
    jfig.push_back(json{{"figure", f.name},
                        {"expected", f.expected},
                        {"actual", f.actual},
                        {"pass", f.pass}});
  json jstats = json::array();
  for (const auto& s : stages)
    jstats.push_back(json{{"condition", s.tag},
                          {"monoids", s.monoids.size()},
                          {"nodes", s.stats.nodes},
                          {"candidates", s.stats.candidates}});
  const json doc{{"figures", jfig},
                 {"all_pass", rep.all_pass},
                 {"disjoint_objects", rep.disjoint_objects},
                 {"distinct_functions", rep.distinct_functions},
                 {"k1_intents", rep.k1_intents},
                 {"k2_intents", fca::count_intents(k2)},
                 {"k3_intents", rep.k3_intents},
                 {"stages", jstats}};
  detail::spill(paths.report(), detail::dump_with_checksum(doc));
  return rep;
}

}  // namespace centmon::pipeline
