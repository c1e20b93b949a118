#include "halfspace/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "halfspace/diagnostics.hpp"
#include "halfspace/errors.hpp"
#include "halfspace/learner.hpp"
#include "halfspace/metrics.hpp"
#include "halfspace/oracle.hpp"

namespace halfspace {

using nlohmann::json;

namespace {

constexpr std::uint64_t kTruthStream = 100;
constexpr std::uint64_t kOracleStream = 200;
constexpr std::uint64_t kDisagreementStream = 300;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

json describe(const std::vector<double>& v) {
  if (v.empty()) return nullptr;
  return {{"median", quantile(v, 0.5)}, {"q10", quantile(v, 0.1)}, {"q25", quantile(v, 0.25)},
          {"q75", quantile(v, 0.75)},   {"q90", quantile(v, 0.9)}};
}

ResultRow measure(const Vector& v, const Oracle& oracle, std::size_t metric_n, int phase) {
  ResultRow row;
  row.phase = phase;
  const Vector& u = oracle.truth().u;
  row.angle = angle(v, u);
  Rng rng = oracle.shadow_rng(kDisagreementStream + static_cast<std::uint64_t>(phase + 1));
  row.disagreement = disagreement(v, u, oracle.marginal(), metric_n, rng).value;
  ErrorEstimate e = err_d(v, oracle, metric_n);
  row.err = e.value;
  row.err_stderr = e.stderr_;
  row.nnz = nnz(v);
  row.labels = oracle.counters().label_queries;
  row.ex_calls = oracle.counters().ex_calls;
  return row;
}

}  // namespace

std::vector<Cell> expand_cells(const RunConfig& cfg, bool sweep) {
  auto axis = [&](const auto& values, auto base) {
    using T = decltype(base);
    return (sweep && !values.empty()) ? std::vector<T>(values.begin(), values.end()) : std::vector<T>{base};
  };
  const auto eps = axis(cfg.sweep.epsilon, cfg.epsilon);
  const auto ds = axis(cfg.sweep.d, cfg.d);
  const auto ss = axis(cfg.sweep.s, cfg.s);
  const auto nus = axis(cfg.sweep.nu, cfg.noise.nu);

  std::vector<Cell> cells;
  std::size_t point = 0;
  for (double e : eps) {
    for (std::size_t d : ds) {
      for (std::size_t s : ss) {
        for (double nu : nus) {
          for (std::uint64_t seed : cfg.seeds) {
            for (RunMode mode : cfg.modes) {
              Cell c;
              c.index = cells.size();
              c.sweep_point = point;
              c.trial_seed = seed;
              c.cell_seed = derive_seed(cfg.master_seed, seed);
              c.mode = mode;
              c.epsilon = e;
              c.d = d;
              c.s = s;
              c.nu = nu;
              cells.push_back(c);
            }
          }
          ++point;
        }
      }
    }
  }
  return cells;
}

CellResult run_cell(const RunConfig& cfg, const Cell& cell) {
  CellResult out;
  out.cell = cell;
  const auto started = std::chrono::steady_clock::now();
  std::optional<Oracle> oracle;
  try {
    Rng truth_rng(derive_seed(cell.cell_seed, kTruthStream));
    TrueHalfspace truth = make_sparse_halfspace(cell.d, cell.s, truth_rng);
    out.u = truth.u.data();
    NoiseSpec noise = cfg.noise;
    noise.nu = cell.nu;
    oracle.emplace(MarginalSpec{cfg.marginal, cell.d}, std::move(truth), noise,
                   derive_seed(cell.cell_seed, kOracleStream));

    Vector final_v;
    if (cell.mode == RunMode::baseline) {
      final_v = averaging_baseline(*oracle, cfg.baseline_m, cell.s);
    } else {
      const QueryMode query = cell.mode == RunMode::active ? QueryMode::active : QueryMode::passive;
      MainOutcome run = run_main(cell.epsilon, cfg.delta, cell.s, *oracle, cfg.constants, query);
      out.phases = run.plan.phases;
      for (const PhaseRecord& rec : run.phases) {
        ResultRow row = measure(rec.v, *oracle, cfg.metric_n, rec.k);
        row.labels = rec.labels;
        row.ex_calls = rec.ex_calls;
        row.wall_ms = rec.wall_ms;
        row.updates = rec.updates;
        row.hinge_violations = rec.ledger.hinge_violations;
        if (rec.constraint) {
          RegretLedger::Check check = rec.ledger.evaluate(oracle->truth().u, *rec.constraint);
          row.ledger_slack = check.slack;
          row.ledger_applicable = check.applicable;
        }
        out.rows.push_back(row);
      }
      final_v = run.u_tilde;
    }
    ResultRow fin = measure(final_v, *oracle, cfg.metric_n, -1);
    if (!out.rows.empty()) {
      const ResultRow& last = out.rows.back();
      fin.updates = last.updates;
      fin.ledger_slack = last.ledger_slack;
      fin.ledger_applicable = last.ledger_applicable;
      fin.hinge_violations = last.hinge_violations;
    }
    fin.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    out.rows.push_back(fin);
    out.u_tilde = final_v.data();
  } catch (const std::exception& e) {
    out.error = e.what();
    ResultRow fin;
    fin.phase = -1;
    fin.angle = std::nan("");
    fin.disagreement = std::nan("");
    fin.err = std::nan("");
    fin.err_stderr = std::nan("");
    if (oracle) {
      fin.labels = oracle->counters().label_queries;
      fin.ex_calls = oracle->counters().ex_calls;
    }
    fin.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    out.rows.push_back(fin);
  }
  if (oracle) {
    out.oracle_labels = oracle->counters().label_queries;
    out.oracle_ex_calls = oracle->counters().ex_calls;
  }
  return out;
}

std::vector<CellResult> run_cells(const RunConfig& cfg, const std::vector<Cell>& cells,
                                  std::size_t workers) {
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) results[i] = run_cell(cfg, cells[i]);
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, cells.size()));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  return results;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "cell",     "sweep_point", "seed",        "mode",       "epsilon",      "delta",
      "d",        "s",           "marginal",    "noise",      "nu",           "phase",
      "angle",    "disagreement", "labels",     "ex_calls",   "err",          "err_stderr",
      "nnz",      "updates",     "ledger_slack", "ledger_applicable", "hinge_violations", "wall_ms",
      "error",    "config_fp"};
  return cols;
}

void write_csv(std::ostream& out, const RunConfig& cfg, const std::vector<CellResult>& results,
               bool include_wall_clock) {
  const std::string fp = fingerprint(cfg);
  const auto& cols = csv_columns();
  bool first = true;
  for (const std::string& c : cols) {
    if (!include_wall_clock && c == "wall_ms") continue;
    out << (first ? "" : ",") << c;
    first = false;
  }
  out << '\n';
  for (const CellResult& r : results) {
    for (const ResultRow& row : r.rows) {
      const std::string fields[] = {
          std::to_string(r.cell.index),
          std::to_string(r.cell.sweep_point),
          std::to_string(r.cell.trial_seed),
          to_string(r.cell.mode),
          num(r.cell.epsilon),
          num(cfg.delta),
          std::to_string(r.cell.d),
          std::to_string(r.cell.s),
          to_string(cfg.marginal),
          to_string(cfg.noise.kind),
          num(r.cell.nu),
          row.phase < 0 ? "final" : std::to_string(row.phase),
          num(row.angle),
          num(row.disagreement),
          std::to_string(row.labels),
          std::to_string(row.ex_calls),
          num(row.err),
          num(row.err_stderr),
          std::to_string(row.nnz),
          std::to_string(row.updates),
          num(row.ledger_slack),
          row.ledger_applicable ? "1" : "0",
          std::to_string(row.hinge_violations),
          num(row.wall_ms),
          csv_escape(row.phase < 0 ? r.error : ""),
          fp};
      first = true;
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (!include_wall_clock && cols[i] == "wall_ms") continue;
        out << (first ? "" : ",") << fields[i];
        first = false;
      }
      out << '\n';
    }
  }
}

json summary_json(const RunConfig& cfg, const std::vector<CellResult>& results) {
  json cells = json::array();
  std::map<std::pair<std::size_t, std::string>, std::vector<const CellResult*>> groups;
  for (const CellResult& r : results) {
    const ResultRow& fin = r.final_row();
    json c = {{"cell", r.cell.index},
              {"sweep_point", r.cell.sweep_point},
              {"seed", r.cell.trial_seed},
              {"mode", to_string(r.cell.mode)},
              {"epsilon", r.cell.epsilon},
              {"d", r.cell.d},
              {"s", r.cell.s},
              {"nu", r.cell.nu},
              {"phases", r.phases},
              {"labels", fin.labels},
              {"ex_calls", fin.ex_calls}};
    if (r.ok()) {
      c["angle"] = fin.angle;
      c["disagreement"] = fin.disagreement;
      c["err"] = fin.err;
      c["error"] = nullptr;
    } else {
      c["error"] = r.error;
    }
    cells.push_back(c);
    groups[{r.cell.sweep_point, to_string(r.cell.mode)}].push_back(&r);
  }

  json aggregates = json::array();
  for (const auto& [key, members] : groups) {
    std::vector<double> angle, dis, labels, ex;
    std::size_t failed = 0;
    for (const CellResult* r : members) {
      if (!r->ok()) {
        ++failed;
        continue;
      }
      angle.push_back(r->final_row().angle);
      dis.push_back(r->final_row().disagreement);
      labels.push_back(static_cast<double>(r->final_row().labels));
      ex.push_back(static_cast<double>(r->final_row().ex_calls));
    }
    const Cell& c0 = members.front()->cell;
    aggregates.push_back({{"sweep_point", key.first},
                          {"mode", key.second},
                          {"epsilon", c0.epsilon},
                          {"d", c0.d},
                          {"s", c0.s},
                          {"nu", c0.nu},
                          {"cells", members.size()},
                          {"failed", failed},
                          {"angle", describe(angle)},
                          {"disagreement", describe(dis)},
                          {"labels", describe(labels)},
                          {"ex_calls", describe(ex)}});
  }
  return {{"config_fingerprint", fingerprint(cfg)},
          {"config", canonical_json(cfg)},
          {"cells", cells},
          {"aggregates", aggregates}};
}

namespace {

std::optional<RunConfig> load_with_overrides(const CliOptions& opts, std::ostream& log) {
  try {
    RunConfig cfg = load_config(opts.config);
    if (opts.workers) cfg.workers = *opts.workers;
    if (opts.master_seed) cfg.master_seed = *opts.master_seed;
    validate(cfg);
    return cfg;
  } catch (const config_error& e) {
    log << "config error: " << e.what() << '\n';
    return std::nullopt;
  }
}

}  // namespace

int cli_execute(Command cmd, const CliOptions& opts, std::ostream& log) {
  std::optional<RunConfig> cfg = load_with_overrides(opts, log);
  if (!cfg) return 2;
  if (cmd == Command::baseline) cfg->modes = {RunMode::baseline};

  const std::vector<Cell> cells = expand_cells(*cfg, cmd == Command::sweep);
  log << "running " << cells.size() << " cells on " << std::min(cfg->workers, cells.size())
      << " worker(s)\n";
  const std::vector<CellResult> results = run_cells(*cfg, cells, cfg->workers);

  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  std::ofstream csv(opts.out_dir / "results.csv");
  std::ofstream summary(opts.out_dir / "summary.json");
  if (!csv || !summary) {
    log << "cannot write to " << opts.out_dir.string() << '\n';
    return 1;
  }
  write_csv(csv, *cfg, results);
  summary << summary_json(*cfg, results).dump(2) << '\n';

  std::size_t failed = 0;
  for (const CellResult& r : results) {
    if (!r.ok()) {
      ++failed;
      log << "cell " << r.cell.index << " (seed " << r.cell.trial_seed << ", " << to_string(r.cell.mode)
          << ") failed: " << r.error << '\n';
    }
  }
  log << (cells.size() - failed) << "/" << cells.size() << " cells succeeded\n";
  return failed == 0 ? 0 : 1;
}

int cli_diag(const CliOptions& opts, std::ostream& log) {
  std::optional<RunConfig> cfg = load_with_overrides(opts, log);
  if (!cfg) return 2;
  bool all = true;
  for (const std::string& name : cfg->diag.suites) {
    SuiteResult r = run_suite(name, *cfg);
    log << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    all = all && r.passed;
  }
  return all ? 0 : 1;
}

}  // namespace halfspace
