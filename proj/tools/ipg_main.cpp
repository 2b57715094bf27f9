// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: instance generation, solving, enumeration,
// approximate equilibria, the exhaustive reference oracle, batch tables
// and the bilevel-knapsack reduction.
#include "ipg/brute_force.hpp"
#include "ipg/cfld.hpp"
#include "ipg/errors.hpp"
#include "ipg/kpg.hpp"
#include "ipg/master.hpp"
#include "ipg/nfg.hpp"
#include "ipg/qipg.hpp"
#include "ipg/rng.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ipg;

namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  out << text;
}

Rational parse_rational(const std::string &text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos)
      return Rational(std::stoll(text));
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  } catch (const std::exception &) {
    throw InputError("cannot parse rational '" + text + "' (use p or p/q)");
  }
}

/// A loaded instance: the game, its lift extension, and the strategic
/// pool when the model family provides one.
struct Loaded {
  GameInstance game;
  std::shared_ptr<const CustomLift> custom;
  std::optional<KpgInstance> kpg;
  std::string type;
  std::string label;
};

Loaded load_instance(const std::string &path) {
  std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON parse error in ") + path + ": " + e.what());
  }
  Loaded out;
  out.label = fs::path(path).stem().string();
  out.type = j.value("type", j.contains("players") && j.contains("n") ? "game" : "");
  if (out.type == "kpg") {
    out.kpg = kpg_from_json(text);
    out.game = build_kpg(*out.kpg);
  } else if (out.type == "nfg") {
    NfgGame nfg = build_nfg(nfg_from_json(text));
    out.game = std::move(nfg.game);
    out.custom = nfg.lift;
  } else if (out.type == "cfld") {
    CfldGame c = build_cfld(cfld_from_json(text));
    out.game = std::move(c.game);
    out.custom = c.lift;
  } else if (out.type == "qipg") {
    out.game = build_qipg(qipg_from_json(text));
  } else if (out.type == "game") {
    out.game = game_from_json(text);
  } else if (out.type == "bkp") {
    throw InputError("bilevel instances must go through 'reduce bkp' first");
  } else {
    throw InputError("unknown instance type in " + path +
                     " (expected kpg, nfg, cfld, qipg, or game)");
  }
  return out;
}

struct SolveFlags {
  std::string mode = "select";
  int limit = 0;
  double time_limit = 1800.0;
  std::string epsilon, epsilon_rel;
  std::string strategic = "on";
  std::string cut_batch = "all";
  int jobs = 1;
  std::string out_path, csv_path, dump_lp;
};

void add_solve_flags(CLI::App *cmd, SolveFlags &f) {
  cmd->add_option("--mode", f.mode, "select | enumerate | epsilon")
      ->check(CLI::IsMember({"select", "enumerate", "epsilon"}));
  cmd->add_option("--time-limit", f.time_limit, "wall-clock budget in seconds");
  cmd->add_option("--epsilon", f.epsilon, "absolute tolerance (p or p/q)");
  cmd->add_option("--epsilon-rel", f.epsilon_rel, "relative tolerance (p or p/q)");
  cmd->add_option("--strategic-cuts", f.strategic, "problem-specific inequalities")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--cut-batch", f.cut_batch, "cuts added per round")
      ->check(CLI::IsMember({"all", "one"}));
  cmd->add_option("--out", f.out_path, "write the report JSON here");
  cmd->add_option("--csv", f.csv_path, "append a CSV row here");
  cmd->add_option("--dump-lp", f.dump_lp, "write the lifted model in LP text format");
}

SolveConfig make_config(const SolveFlags &f, const Loaded &inst, const LiftedModel &lift) {
  SolveConfig cfg;
  cfg.time_limit = f.time_limit;
  cfg.cut_batch =
      f.cut_batch == "one" ? SolveConfig::CutBatch::one : SolveConfig::CutBatch::all;
  if (f.mode == "enumerate") {
    cfg.mode = SolveConfig::Mode::enumerate_all;
    if (f.limit > 0)
      cfg.enumerate_limit = f.limit;
  }
  else if (f.mode == "epsilon" || !f.epsilon.empty() || !f.epsilon_rel.empty()) {
    if (!f.epsilon_rel.empty()) {
      cfg.mode = SolveConfig::Mode::epsilon_rel;
      cfg.epsilon = parse_rational(f.epsilon_rel);
    } else {
      cfg.mode = SolveConfig::Mode::epsilon_abs;
      if (!f.epsilon.empty())
        cfg.epsilon = parse_rational(f.epsilon);
    }
  }
  cfg.use_strategic_cuts = f.strategic != "off";
  if (cfg.use_strategic_cuts && inst.kpg)
    cfg.strategic_pool = strategic_cuts(*inst.kpg, lift);
  return cfg;
}

int exit_code_of(const SolveReport &rep) {
  return rep.status == SolveStatus::TIME_LIMIT ? 2 : 0;
}

SolveReport run_solve(const Loaded &inst, const SolveFlags &flags) {
  LiftedModel lift = build_lifted_model(inst.game, inst.custom);
  if (!flags.dump_lp.empty()) {
    std::ofstream os(flags.dump_lp);
    lift.write_lp(os);
  }
  SolveConfig cfg = make_config(flags, inst, lift);
  switch (cfg.mode) {
  case SolveConfig::Mode::enumerate_all:
    return enumerate_pnes(lift, cfg);
  case SolveConfig::Mode::epsilon_abs:
  case SolveConfig::Mode::epsilon_rel:
    return epsilon_pne(lift, cfg);
  default:
    return select_best_pne(lift, cfg);
  }
}

void append_csv(const std::string &path, const std::string &row) {
  bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out)
    throw InputError("cannot write '" + path + "'");
  if (fresh)
    out << report_csv_header() << "\n";
  out << row << "\n";
}

int cmd_solve(const std::string &file, const SolveFlags &flags) {
  Loaded inst = load_instance(file);
  SolveReport rep = run_solve(inst, flags);
  std::string js = report_to_json(rep, inst.label);
  if (flags.out_path.empty())
    std::cout << js << "\n";
  else
    write_file(flags.out_path, js);
  if (!flags.csv_path.empty())
    append_csv(flags.csv_path, report_csv_row(rep, inst.label));
  return exit_code_of(rep);
}

int cmd_oracle(const std::string &file) {
  Loaded inst = load_instance(file);
  PayoffFn fn;
  if (!inst.game.polynomial_payoffs) {
    auto lift = std::make_shared<LiftedModel>(build_lifted_model(inst.game, inst.custom));
    fn = [lift](int i, const StrategyProfile &p) { return lift->exact_payoff(i, p); };
  }
  BruteForceResult res = all_pnes(inst.game, fn);
  json j;
  j["instance"] = inst.label;
  j["pnes"] = json::array();
  for (const auto &[profile, w] : res.pnes)
    j["pnes"].push_back({{"x", profile.x}, {"welfare", w.to_double()}});
  j["osw"] = res.osw.to_double();
  j["pos"] = res.pos ? json(res.pos->to_double()) : json();
  j["poa"] = res.poa ? json(res.poa->to_double()) : json();
  std::cout << j.dump(2) << "\n";
  return 0;
}

struct GroupStats {
  long count = 0, tl = 0, pne = 0;
  double ei = 0, ei_p = 0, ei_d = 0, iters = 0, time = 0, time_first = 0, pos = 0;
  long time_first_n = 0, pos_n = 0;
};

std::string group_key(const Loaded &inst, const json &raw) {
  if (inst.type == "kpg")
    return "(" + std::to_string(raw.value("n", 0)) + "," + std::to_string(raw.value("m", 0)) +
           "," + raw.value("dist", "?") + ")";
  if (inst.type == "nfg")
    return "(" + std::to_string(raw.value("V", 0)) + "," +
           std::to_string(raw.contains("E") ? raw["E"].size() : 0) + ")";
  if (inst.type == "qipg")
    return "(" + std::to_string(raw.value("n", 0)) + "," + std::to_string(raw.value("m", 0)) +
           ")";
  return inst.type.empty() ? "game" : inst.type;
}

int cmd_batch(const std::string &dir, const SolveFlags &flags) {
  std::vector<fs::path> files;
  if (fs::exists(dir))
    for (const auto &entry : fs::directory_iterator(dir))
      if (entry.path().extension() == ".json")
        files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  struct RowResult {
    std::string row, key;
    SolveReport rep;
    bool failed = false;
  };
  std::vector<RowResult> rows(files.size());
  std::mutex next_mutex;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      std::size_t k;
      {
        std::lock_guard<std::mutex> lock(next_mutex);
        if (next >= files.size())
          return;
        k = next++;
      }
      const std::string path = files[k].string();
      try {
        Loaded inst = load_instance(path);
        json raw = json::parse(read_file(path));
        rows[k].key = group_key(inst, raw);
        rows[k].rep = run_solve(inst, flags);
        rows[k].row = report_csv_row(rows[k].rep, inst.label);
      } catch (const Error &e) {
        rows[k].failed = true;
        rows[k].row = files[k].stem().string() + ",ERROR,-,-,-,-,-,-,-,-,-,-";
        std::cerr << path << ": " << e.what() << "\n";
      }
    }
  };
  int jobs = std::max(1, flags.jobs);
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back(worker);
  for (auto &t : pool)
    t.join();

  // aggregate per group; timing averages include time-limit hits
  std::map<std::string, GroupStats> groups;
  for (const auto &r : rows) {
    if (r.failed)
      continue;
    GroupStats &g = groups[r.key];
    ++g.count;
    g.ei += static_cast<double>(r.rep.ei_general);
    g.ei_p += static_cast<double>(r.rep.ei_payoff);
    g.ei_d += static_cast<double>(r.rep.ei_dominance);
    g.iters += static_cast<double>(r.rep.iterations);
    g.time += r.rep.time_total;
    if (r.rep.status == SolveStatus::TIME_LIMIT)
      ++g.tl;
    if (!r.rep.pnes.empty())
      ++g.pne;
    if (r.rep.time_first >= 0) {
      g.time_first += r.rep.time_first;
      ++g.time_first_n;
    }
    if (r.rep.pos) {
      g.pos += r.rep.pos->to_double();
      ++g.pos_n;
    }
  }

  std::ostringstream os;
  os << report_csv_header() << "\n";
  for (const auto &r : rows)
    os << r.row << "\n";
  for (const auto &[key, g] : groups) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "group:%s,Tl=%ld/%ld,%s,%.2f,%.2f,%.2f,%.2f,%.3f,%s,-,-,-",
                  key.c_str(), g.tl, g.count,
                  g.pos_n ? std::to_string(g.pos / g.pos_n).substr(0, 6).c_str() : "-",
                  g.ei / g.count, g.ei_p / g.count, g.ei_d / g.count, g.iters / g.count,
                  g.time / g.count,
                  g.time_first_n ? std::to_string(g.time_first / g.time_first_n).c_str() : "-");
    os << buf << "\n";
  }
  if (flags.out_path.empty())
    std::cout << os.str();
  else
    write_file(flags.out_path, os.str());
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"equilibrium selection for integer programming games"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto *gen = app.add_subcommand("gen", "generate benchmark instances");
  gen->require_subcommand(1);
  std::string gen_out;
  std::uint64_t seed = 1;

  auto *gk = gen->add_subcommand("kpg", "knapsack game");
  int kn = 2, km = 25;
  std::string kdist = "A";
  double kcap = 0.5;
  gk->add_option("--n", kn);
  gk->add_option("--m", km);
  gk->add_option("--dist", kdist)->check(CLI::IsMember({"A", "B", "C"}));
  gk->add_option("--cap", kcap, "capacity ratio of the weight sum");
  gk->add_option("--seed", seed);
  gk->add_option("--out", gen_out);

  auto *gn = gen->add_subcommand("nfg", "network formation game on a layered grid");
  int vertices = 50;
  std::string weights = "1,1,1";
  gn->add_option("--vertices", vertices);
  gn->add_option("--weights", weights, "comma-separated player weights (p or p/q)");
  gn->add_option("--seed", seed);
  gn->add_option("--out", gen_out);

  auto *gq = gen->add_subcommand("qipg", "quadratic game over integer boxes");
  int qn = 2, qm = 2;
  std::int64_t qlb = 0, qub = 5;
  bool qlb_set = false, qub_set = false, qconvex = false;
  gq->add_option("--n", qn);
  gq->add_option("--m", qm);
  gq->add_option("--lb", qlb)->each([&](const std::string &) { qlb_set = true; });
  gq->add_option("--ub", qub)->each([&](const std::string &) { qub_set = true; });
  gq->add_flag("--convex", qconvex, "positive-definite quadratics");
  gq->add_option("--seed", seed);
  gq->add_option("--out", gen_out);

  // ---- solve / enumerate / epsilon ----------------------------------------
  SolveFlags flags;
  std::string file;
  auto *solve = app.add_subcommand("solve", "select the welfare-best equilibrium");
  solve->add_option("file", file)->required();
  add_solve_flags(solve, flags);

  auto *enumerate = app.add_subcommand("enumerate", "enumerate every equilibrium");
  enumerate->add_option("file", file)->required();
  add_solve_flags(enumerate, flags);
  enumerate->add_option("--limit", flags.limit, "stop after this many equilibria");

  auto *epsilon = app.add_subcommand("epsilon", "approximate equilibria");
  epsilon->add_option("file", file)->required();
  add_solve_flags(epsilon, flags);

  auto *oracle = app.add_subcommand("oracle", "exhaustive reference: the full PNE set");
  oracle->add_option("file", file)->required();

  auto *batch = app.add_subcommand("batch", "run a directory of instances into a table");
  std::string dir;
  batch->add_option("dir", dir)->required();
  add_solve_flags(batch, flags);
  batch->add_option("--jobs", flags.jobs, "concurrent instances");

  auto *reduce = app.add_subcommand("reduce", "problem reductions");
  auto *rb = reduce->add_subcommand("bkp", "bilevel knapsack to a two-player game");
  std::string rb_file, rb_out;
  rb->add_option("file", rb_file)->required();
  rb->add_option("--out", rb_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gk->parsed()) {
      std::string text = kpg_to_json(generate_kpg(kn, km, kdist[0], kcap, seed));
      gen_out.empty() ? (void)(std::cout << text << "\n") : write_file(gen_out, text);
      return 0;
    }
    if (gn->parsed()) {
      std::vector<Rational> ws;
      std::stringstream ss(weights);
      std::string tok;
      while (std::getline(ss, tok, ','))
        ws.push_back(parse_rational(tok));
      std::string text = nfg_to_json(generate_grid(vertices, seed, ws));
      gen_out.empty() ? (void)(std::cout << text << "\n") : write_file(gen_out, text);
      return 0;
    }
    if (gq->parsed()) {
      Rng bounds_rng(seed ^ 0x9E3779B97F4A7C15ULL);
      std::int64_t lb = qlb_set ? qlb : bounds_rng.uniform(-1000, 0);
      std::int64_t ub = qub_set ? qub : bounds_rng.uniform(5, 1000);
      std::string text = qipg_to_json(generate_qipg(qn, qm, lb, ub, qconvex, seed));
      gen_out.empty() ? (void)(std::cout << text << "\n") : write_file(gen_out, text);
      return 0;
    }
    if (solve->parsed())
      return cmd_solve(file, flags);
    if (enumerate->parsed()) {
      flags.mode = "enumerate";
      return cmd_solve(file, flags);
    }
    if (epsilon->parsed()) {
      flags.mode = "epsilon";
      return cmd_solve(file, flags);
    }
    if (oracle->parsed())
      return cmd_oracle(file);
    if (batch->parsed())
      return cmd_batch(dir, flags);
    if (rb->parsed()) {
      std::string text = game_to_json(reduce_bkp(bkp_from_json(read_file(rb_file))));
      rb_out.empty() ? (void)(std::cout << text << "\n") : write_file(rb_out, text);
      return 0;
    }
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
