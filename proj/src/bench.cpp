#include "ancvi/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ancvi/io.hpp"
#include "ancvi/worst_case.hpp"

namespace ancvi::bench {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> grid{0.01};
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  grid.push_back(0.99);
  return grid;
}

namespace {

// ---------------------------------------------------------------------------
// Instances and starts

struct Instance {
  std::optional<Mdp> mdp;
  std::optional<HardInstance> hard;

  [[nodiscard]] const Mdp& get() const { return hard ? hard->mdp : *mdp; }
};

Instance make_instance(const Source& source, ValueKind kind) {
  Instance inst;
  if (const auto* path = std::get_if<fs::path>(&source)) {
    inst.mdp = load_mdp(*path);
  } else if (const auto* g = std::get_if<GarnetParams>(&source)) {
    inst.mdp = make_garnet(g->n_states, g->n_actions, g->branching, g->reward_scale, g->seed, g->gamma);
    require_valid(*inst.mdp);
  } else {
    const auto& h = std::get<HardParams>(source);
    if (h.shift_file) {
      inst.hard = build_hard_shifted(h.n, h.gamma, load_value_fn(*h.shift_file, kind));
    } else {
      inst.hard = build_hard(h.n, h.gamma);
      inst.hard->u0.kind = kind;
      inst.hard->analytic_fixed_point.kind = kind;
    }
  }
  return inst;
}

ValueFn random_start(const Mdp& mdp, ValueKind kind, std::uint64_t seed) {
  const auto& r = mdp.rewards();
  double scale = 1.0;
  for (double x : r) scale = std::max(scale, std::abs(x));
  scale /= mdp.undiscounted() ? 1.0 / static_cast<double>(mdp.n_states()) : 1.0 - mdp.gamma();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  ValueFn u = ValueFn::zeros(kind, mdp.dim(kind));
  for (double& x : u.values) x = dist(rng);
  return u;
}

ValueFn make_start(const std::optional<WarmSpec>& warm, const Instance& inst, ValueKind kind, std::uint64_t seed) {
  const Mdp& mdp = inst.get();
  if (!warm) {
    if (inst.hard) return inst.hard->u0;
    return ValueFn::zeros(kind, mdp.dim(kind));
  }
  switch (warm->mode) {
    case WarmSpec::Mode::Zero: return ValueFn::zeros(kind, mdp.dim(kind));
    case WarmSpec::Mode::Lower: return warm_start(mdp, kind, Side::Lower);
    case WarmSpec::Mode::Upper: return warm_start(mdp, kind, Side::Upper);
    case WarmSpec::Mode::Random: return random_start(mdp, kind, seed);
    case WarmSpec::Mode::File: {
      ValueFn u = load_value_fn(warm->file, kind);
      require_valid(u, mdp);
      return u;
    }
  }
  return ValueFn::zeros(kind, mdp.dim(kind));
}

// Reference fixed points: U* and U-hat* for gamma < 1; at gamma = 1 the limit
// of anchored iteration from u0 when u0 is a monotone start.
References compute_references(const Mdp& mdp, ValueKind kind, const ValueFn& u0) {
  References refs;
  if (mdp.gamma() < 1.0) {
    refs.opt = fixed_point(Operator::optimality(mdp, kind));
    refs.anti = fixed_point(Operator::anti_optimality(mdp, kind));
  } else {
    try {
      refs.opt = undiscounted_limit(Operator::optimality(mdp, kind), u0);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotMonotoneStart) throw;
    }
  }
  return refs;
}

// ---------------------------------------------------------------------------
// Runs

std::string base_label(const SolverSpec& s) {
  if (s.variant == SolverVariant::ApxAncVi) return "apx-" + format_double(s.eps);
  return std::string(to_string(s.variant));
}

struct RunResult {
  std::string label;
  std::string start;
  IterationTrace trace;
  BoundReport report;
  Policy policy;
  BoundKind general;
  std::optional<BoundKind> monotone;
  bool has_bounds = false;
};

Operator operator_for(const Mdp& mdp, SolverVariant variant, ValueKind kind) {
  return variant == SolverVariant::GsAncVi ? Operator::gs_optimality(mdp, kind) : Operator::optimality(mdp, kind);
}

RunResult run_solver(const Instance& inst, const SolverSpec& solver, const ValueFn& u0, const References& refs,
                     std::size_t iterations, std::uint64_t seed, double tighten) {
  const Mdp& mdp = inst.get();
  const Operator op = operator_for(mdp, solver.variant, u0.kind);

  SolverConfig cfg;
  cfg.variant = solver.variant;
  cfg.iterations = iterations;
  cfg.initial = u0;
  if (solver.variant == SolverVariant::ApxAncVi) {
    if (mdp.undiscounted()) throw Error(ErrorCode::BadGamma, "the approximate variant needs gamma < 1");
    cfg.noise = NoiseSpec{solver.eps, seed};
  }
  // Iterates are only kept when the lower-bound confrontation needs them.
  cfg.record_iterates = inst.hard && solver.variant != SolverVariant::GsAncVi &&
                        solver.variant != SolverVariant::ApxAncVi && inst.hard->u0 == u0;

  RunResult out{base_label(solver), "", run(op, cfg, refs), {}, greedy_policy(mdp, u0), BoundKind::AncGeneral,
                std::nullopt, false};
  out.policy = extract_policy(mdp, out.trace);
  switch (solver.variant) {
    case SolverVariant::Vi: out.general = BoundKind::ViUpper; break;
    case SolverVariant::AncVi:
    case SolverVariant::GsAncVi:
      out.general = BoundKind::AncGeneral;
      out.monotone = BoundKind::AncMonotone;
      break;
    case SolverVariant::ApxAncVi:
      out.general = BoundKind::ApxAncGeneral;
      out.monotone = BoundKind::ApxAncMonotone;
      break;
  }
  if (!refs.opt) {
    out.report.notes.push_back("no reference fixed point: bounds not evaluated");
    return out;
  }
  out.has_bounds = true;

  BoundInputs inputs;
  inputs.gamma = mdp.gamma();
  inputs.dist_opt = sup_norm_diff(u0, *refs.opt);
  if (refs.anti) inputs.dist_anti = sup_norm_diff(u0, *refs.anti);
  inputs.tighten = tighten;

  std::set<BoundKind> selected{out.general};
  if (out.monotone) selected.insert(*out.monotone);
  out.report = verify_trace(out.trace, inputs, selected);

  if (!cfg.record_iterates) return out;
  // Lower bound on the worst-case chain, valid for k <= n - 2.
  const std::size_t horizon = std::min(out.trace.iterations(), inst.hard->n - 2);
  IterationTrace head = out.trace;
  head.rows.resize(horizon + 1);
  head.iterates.resize(horizon + 1);
  const auto span = span_residuals(op.jacobi(), head);
  if (!satisfies_span_condition(head, span)) {
    out.report.notes.push_back("trace leaves the span class: lower bound not evaluated");
    return out;
  }
  BoundInputs lower_inputs = inputs;
  lower_inputs.tighten = 1.0;
  const auto lower = verify_trace(head, lower_inputs, {BoundKind::Lower});
  out.report.checks.insert(out.report.checks.end(), lower.checks.begin(), lower.checks.end());
  return out;
}

void dedupe_labels(std::vector<RunResult>& runs) {
  std::map<std::string, int> seen;
  for (auto& r : runs) {
    const int count = ++seen[r.label];
    if (count > 1) r.label += "_" + std::to_string(count);
  }
}

std::optional<double> check_value(const BoundReport& report, std::optional<BoundKind> bound, std::size_t k) {
  if (!bound) return std::nullopt;
  const auto* c = report.find(*bound, k);
  if (!c) return std::nullopt;
  return c->value;
}

std::string cell(const std::optional<double>& x) { return x ? format_double(*x) : std::string(); }

std::string trace_csv(const RunResult& run, bool timing) {
  std::ostringstream os;
  os << kTraceCsvHeader << '\n';
  for (const auto& row : run.trace.rows) {
    os << row.k << ',' << cell(row.beta) << ',' << format_double(row.bellman_err) << ',' << cell(row.dist_to_opt)
       << ',' << cell(row.dist_to_anti) << ',' << cell(check_value(run.report, run.general, row.k)) << ','
       << cell(check_value(run.report, run.monotone, row.k)) << ','
       << cell(check_value(run.report, BoundKind::Lower, row.k)) << ',';
    if (timing) os << row.wall_ns;
    os << '\n';
  }
  return os.str();
}

json policy_json(const Policy& p) { return json(p.actions()); }

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json run_report_json(const RunResult& run) {
  json bounds = json::object();
  std::map<BoundKind, std::vector<const BoundCheck*>> by_kind;
  for (const auto& c : run.report.checks) by_kind[c.bound].push_back(&c);
  for (const auto& [kind, checks] : by_kind) {
    json entry;
    std::vector<std::size_t> ks;
    std::vector<double> values;
    std::vector<double> margins;
    std::vector<std::size_t> violated;
    std::vector<double> alternate;
    for (const auto* c : checks) {
      ks.push_back(c->k);
      values.push_back(c->value);
      margins.push_back(c->margin);
      if (c->violated) violated.push_back(c->k);
      if (c->alternate) alternate.push_back(*c->alternate);
    }
    entry["k"] = ks;
    entry["value"] = values;
    entry["margin"] = margins;
    entry["violated_at"] = violated;
    if (!alternate.empty()) entry["other_side_value"] = alternate;
    bounds[std::string(to_string(kind))] = std::move(entry);
  }
  json j;
  j["solver"] = run.label;
  if (!run.start.empty()) j["start"] = run.start;
  j["start_side"] = run.trace.start_side ? json(std::string(to_string(*run.trace.start_side))) : json(nullptr);
  j["iterations"] = run.trace.iterations();
  j["final_bellman_err"] = run.trace.rows.back().bellman_err;
  j["violations"] = run.report.violations();
  j["notes"] = run.report.notes;
  j["bounds"] = std::move(bounds);
  return j;
}

std::vector<SolverSpec> solvers_or_default(const RunSpec& spec) {
  if (!spec.solvers.empty()) return spec.solvers;
  return {SolverSpec{SolverVariant::AncVi, 0.0}};
}

struct InstanceResult {
  double gamma = 0.0;
  std::size_t n_states = 0;
  std::optional<double> dist_opt;
  std::optional<double> dist_anti;
  std::vector<RunResult> runs;

  [[nodiscard]] std::size_t violations() const {
    std::size_t v = 0;
    for (const auto& r : runs) v += r.report.violations();
    return v;
  }
};

InstanceResult solve_instance(const Instance& inst, const std::vector<SolverSpec>& solvers, const ValueFn& u0,
                              const RunSpec& spec) {
  const Mdp& mdp = inst.get();
  require_valid(u0, mdp);
  InstanceResult res;
  res.gamma = mdp.gamma();
  res.n_states = mdp.n_states();
  const References refs = compute_references(mdp, u0.kind, u0);
  if (refs.opt) res.dist_opt = sup_norm_diff(u0, *refs.opt);
  if (refs.anti) res.dist_anti = sup_norm_diff(u0, *refs.anti);
  for (const auto& s : solvers) {
    res.runs.push_back(run_solver(inst, s, u0, refs, spec.iterations, spec.seed, spec.tighten));
  }
  dedupe_labels(res.runs);
  return res;
}

json instance_json(const InstanceResult& res) {
  json j;
  j["gamma"] = res.gamma;
  j["n_states"] = res.n_states;
  j["dist_opt"] = optional_json(res.dist_opt);
  j["dist_anti"] = optional_json(res.dist_anti);
  j["violations"] = res.violations();
  json policy = json::object();
  for (const auto& r : res.runs) policy[r.label] = policy_json(r.policy);
  j["policy"] = std::move(policy);
  return j;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

// Default verification sweep: 50 Garnets for each gamma in {0.5, 0.9, 0.99},
// each started from a random point and from both warm starts.
int verify_default_sweep(const RunSpec& spec, std::ostream& log) {
  constexpr std::size_t kInstances = 50;
  const std::vector<double> gammas{0.5, 0.9, 0.99};
  std::vector<SolverSpec> solvers = spec.solvers;
  if (solvers.empty()) solvers = {{SolverVariant::AncVi, 0.0}, {SolverVariant::GsAncVi, 0.0}};

  json instances = json::array();
  json top_gamma = json::array();
  json top_n = json::array();
  json top_dopt = json::array();
  json top_danti = json::array();
  json top_policy = json::array();
  std::size_t total = 0;
  for (double gamma : gammas) {
    for (std::size_t i = 0; i < kInstances; ++i) {
      std::mt19937_64 shape(spec.seed * 7919 + i);
      GarnetParams g;
      g.n_states = std::uniform_int_distribution<std::size_t>(2, 30)(shape);
      g.n_actions = std::uniform_int_distribution<std::size_t>(1, 4)(shape);
      g.branching = std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(g.n_states, 5))(shape);
      g.seed = spec.seed * 1'000'003 + i;
      g.gamma = gamma;
      const Instance inst = make_instance(Source{g}, spec.kind);
      const Mdp& mdp = inst.get();

      json runs = json::array();
      json entry;
      std::size_t violations = 0;
      std::optional<InstanceResult> first;
      const std::pair<const char*, ValueFn> starts[] = {
          {"random", random_start(mdp, spec.kind, g.seed ^ 0x9e3779b97f4a7c15ULL)},
          {"lower", warm_start(mdp, spec.kind, Side::Lower)},
          {"upper", warm_start(mdp, spec.kind, Side::Upper)},
      };
      for (const auto& [name, u0] : starts) {
        auto res = solve_instance(inst, solvers, u0, spec);
        for (auto& r : res.runs) {
          r.start = name;
          runs.push_back(run_report_json(r));
        }
        violations += res.violations();
        if (!first) first = std::move(res);
      }
      entry = instance_json(*first);
      entry["seed"] = g.seed;
      entry["n_actions"] = g.n_actions;
      entry["branching"] = g.branching;
      entry["violations"] = violations;
      entry["runs"] = std::move(runs);
      total += violations;
      top_gamma.push_back(gamma);
      top_n.push_back(g.n_states);
      top_dopt.push_back(entry["dist_opt"]);
      top_danti.push_back(entry["dist_anti"]);
      top_policy.push_back(entry["policy"]);
      instances.push_back(std::move(entry));
    }
  }
  json report;
  report["gamma"] = std::move(top_gamma);
  report["n_states"] = std::move(top_n);
  report["dist_opt"] = std::move(top_dopt);
  report["dist_anti"] = std::move(top_danti);
  report["violations"] = total;
  report["policy"] = std::move(top_policy);
  report["instances"] = std::move(instances);
  ensure_dir(spec.out_dir);
  write_file(spec.out_dir / "report.json", report.dump(2) + "\n");
  log << "verified " << gammas.size() * kInstances << " instances, " << total << " violations\n";
  return total == 0 ? kExitOk : kExitViolation;
}

}  // namespace

int cmd_solve(const RunSpec& spec, std::ostream& log) {
  return guarded(log, [&] {
    if (!spec.source) throw Error(ErrorCode::ConfigMismatch, "solve needs --mdp, --garnet, or --hard");
    const Instance inst = make_instance(*spec.source, spec.kind);
    const ValueFn u0 = make_start(spec.warm, inst, spec.kind, spec.seed);
    const auto res = solve_instance(inst, solvers_or_default(spec), u0, spec);

    ensure_dir(spec.out_dir);
    json runs = json::array();
    for (const auto& r : res.runs) {
      const std::string file = "trace_" + r.label + ".csv";
      write_file(spec.out_dir / file, trace_csv(r, spec.timing));
      json j;
      j["solver"] = r.label;
      j["csv"] = file;
      j["iterations"] = r.trace.iterations();
      j["final_bellman_err"] = r.trace.rows.back().bellman_err;
      j["violations"] = r.report.violations();
      runs.push_back(std::move(j));
    }
    json summary = instance_json(res);
    summary["runs"] = std::move(runs);
    write_file(spec.out_dir / "summary.json", summary.dump(2) + "\n");
    log << "wrote " << res.runs.size() << " trace(s) to " << spec.out_dir.string() << '\n';
    return kExitOk;
  });
}

int cmd_verify(const RunSpec& spec, std::ostream& log) {
  return guarded(log, [&] {
    if (!spec.source) return verify_default_sweep(spec, log);
    const Instance inst = make_instance(*spec.source, spec.kind);
    const ValueFn u0 = make_start(spec.warm, inst, spec.kind, spec.seed);
    const auto res = solve_instance(inst, solvers_or_default(spec), u0, spec);
    json report = instance_json(res);
    json runs = json::array();
    for (const auto& r : res.runs) runs.push_back(run_report_json(r));
    report["runs"] = std::move(runs);
    ensure_dir(spec.out_dir);
    write_file(spec.out_dir / "report.json", report.dump(2) + "\n");
    log << res.violations() << " violations\n";
    return res.violations() == 0 ? kExitOk : kExitViolation;
  });
}

int cmd_sweep_bounds(const SweepSpec& spec, std::ostream& log) {
  return guarded(log, [&] {
    if (spec.gammas.empty() || spec.ks.empty()) throw Error(ErrorCode::ConfigMismatch, "gamma and k grids must be nonempty");
    std::ostringstream os;
    os << kBoundsCsvHeader << '\n';
    double worst = 0.0;
    for (double gamma : spec.gammas) {
      for (std::size_t k : spec.ks) {
        const double factor = optimality_factor(gamma, k);
        worst = std::max(worst, factor);
        os << format_double(gamma) << ',' << k << ',' << format_double(vi_upper(gamma, k, 1.0)) << ','
           << format_double(anc_upper(gamma, k, 1.0, Regime::General)) << ','
           << format_double(anc_upper(gamma, k, 1.0, Regime::MonotoneStart)) << ','
           << format_double(lower_bound(gamma, k, 1.0)) << ',' << format_double(factor) << '\n';
      }
    }
    ensure_dir(spec.out_dir);
    write_file(spec.out_dir / "bounds.csv", os.str());
    log << "max optimality factor " << format_double(worst) << '\n';
    return worst <= 4.0 ? kExitOk : kExitViolation;
  });
}

int cmd_hard(const HardParams& params, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    const Instance inst = make_instance(Source{params}, ValueKind::StateValue);
    ensure_dir(out_dir);
    save_mdp(inst.hard->mdp, out_dir / "mdp.json");
    write_file(out_dir / "u0.json", value_fn_to_json(inst.hard->u0) + "\n");
    write_file(out_dir / "fixed_point.json", value_fn_to_json(inst.hard->analytic_fixed_point) + "\n");
    log << "wrote hard instance n=" << params.n << " gamma=" << format_double(params.gamma) << '\n';
    return kExitOk;
  });
}

int cmd_validate(const fs::path& file, std::ostream& log) {
  return guarded(log, [&] {
    const Mdp mdp = load_mdp(file);
    log << "valid: " << mdp.n_states() << " states, " << mdp.n_actions() << " actions, gamma "
        << format_double(mdp.gamma()) << '\n';
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// Argument parsing

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream is(s);
  while (std::getline(is, part, sep)) parts.push_back(part);
  return parts;
}

std::size_t parse_size(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, std::string("bad ") + what + ": '" + s + "'");
  }
}

double parse_real(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::ParseError, std::string("bad ") + what + ": '" + s + "'");
  }
}

GarnetParams parse_garnet(const std::string& s, double gamma) {
  const auto p = split(s, ',');
  if (p.size() != 4) throw Error(ErrorCode::ParseError, "--garnet expects n,a,b,seed");
  GarnetParams g;
  g.n_states = parse_size(p[0], "garnet n");
  g.n_actions = parse_size(p[1], "garnet a");
  g.branching = parse_size(p[2], "garnet branching");
  g.seed = parse_size(p[3], "garnet seed");
  g.gamma = gamma;
  return g;
}

HardParams parse_hard(const std::string& s) {
  const auto p = split(s, ',');
  if (p.size() != 2 && p.size() != 3) throw Error(ErrorCode::ParseError, "--hard expects n,gamma[,shift-file]");
  HardParams h;
  h.n = parse_size(p[0], "hard n");
  h.gamma = parse_real(p[1], "hard gamma");
  if (p.size() == 3) h.shift_file = p[2];
  return h;
}

SolverSpec parse_solver(const std::string& s) {
  if (s == "vi") return {SolverVariant::Vi, 0.0};
  if (s == "anc") return {SolverVariant::AncVi, 0.0};
  if (s == "gs-anc") return {SolverVariant::GsAncVi, 0.0};
  if (s.rfind("apx:", 0) == 0) {
    const double eps = parse_real(s.substr(4), "apx noise bound");
    if (!(eps >= 0.0)) throw Error(ErrorCode::ParseError, "apx noise bound must be nonnegative");
    return {SolverVariant::ApxAncVi, eps};
  }
  throw Error(ErrorCode::ParseError, "unknown solver '" + s + "' (vi|anc|apx:EPS|gs-anc)");
}

WarmSpec parse_warm(const std::string& s) {
  if (s == "zero") return {WarmSpec::Mode::Zero, {}};
  if (s == "lower") return {WarmSpec::Mode::Lower, {}};
  if (s == "upper") return {WarmSpec::Mode::Upper, {}};
  if (s == "random") return {WarmSpec::Mode::Random, {}};
  return {WarmSpec::Mode::File, s};
}

std::vector<std::size_t> parse_k_grid(const std::string& s) {
  std::vector<std::size_t> ks;
  for (const auto& part : split(s, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      ks.push_back(parse_size(part, "k"));
    } else {
      const auto lo = parse_size(part.substr(0, colon), "k range start");
      const auto hi = parse_size(part.substr(colon + 1), "k range end");
      for (auto k = lo; k <= hi; ++k) ks.push_back(k);
    }
  }
  return ks;
}

struct RunFlags {
  std::string mdp;
  std::string garnet;
  std::string hard;
  std::vector<std::string> solvers;
  std::string warm;
  std::string kind = "v";
  double gamma = 0.9;
  std::size_t k = 100;
  std::string out = ".";
  std::uint64_t seed = 0;
  bool timing = false;
  double tighten = 1.0;
};

void add_run_flags(CLI::App* cmd, RunFlags& f, bool with_hidden) {
  cmd->add_option("--mdp", f.mdp, "MDP JSON file");
  cmd->add_option("--garnet", f.garnet, "Garnet instance n,a,b,seed");
  cmd->add_option("--hard", f.hard, "worst-case chain n,gamma[,shift-file]");
  cmd->add_option("--solver", f.solvers, "vi|anc|apx:EPS|gs-anc (repeatable)");
  cmd->add_option("--k", f.k, "iterations K");
  cmd->add_option("--warm", f.warm, "start: lower|upper|zero|random|FILE");
  cmd->add_option("--kind", f.kind, "value kind v|q")->check(CLI::IsMember({"v", "q"}));
  cmd->add_option("--gamma", f.gamma, "discount for --garnet");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "seed for noise and random starts");
  cmd->add_flag("--timing", f.timing, "record per-iteration wall time in wall_ns");
  if (with_hidden) cmd->add_option("--tighten", f.tighten)->group("");
}

RunSpec to_run_spec(const RunFlags& f) {
  RunSpec spec;
  const int sources = int(!f.mdp.empty()) + int(!f.garnet.empty()) + int(!f.hard.empty());
  if (sources > 1) throw Error(ErrorCode::ParseError, "give at most one of --mdp, --garnet, --hard");
  if (!f.mdp.empty()) spec.source = fs::path(f.mdp);
  if (!f.garnet.empty()) spec.source = parse_garnet(f.garnet, f.gamma);
  if (!f.hard.empty()) spec.source = parse_hard(f.hard);
  for (const auto& s : f.solvers) spec.solvers.push_back(parse_solver(s));
  if (!f.warm.empty()) spec.warm = parse_warm(f.warm);
  spec.kind = f.kind == "q" ? ValueKind::StateActionValue : ValueKind::StateValue;
  spec.iterations = f.k;
  spec.out_dir = f.out;
  spec.seed = f.seed;
  spec.timing = f.timing;
  spec.tighten = f.tighten;
  return spec;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Anchored value iteration toolkit"};
  app.require_subcommand(1);

  RunFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "run solvers and write trace CSVs and summary.json");
  add_run_flags(solve, solve_flags, false);

  RunFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "run solvers and check every applicable bound");
  add_run_flags(verify, verify_flags, true);

  std::string gammas;
  std::string ks = "0:100";
  std::string sweep_out = ".";
  auto* sweep = app.add_subcommand("sweep-bounds", "tabulate bound curves over a gamma and k grid");
  sweep->add_option("--gammas", gammas, "comma-separated gamma grid");
  sweep->add_option("--ks", ks, "comma-separated k values or lo:hi ranges");
  sweep->add_option("--out", sweep_out, "output directory");

  std::string hard_arg;
  std::string hard_out = ".";
  auto* hard = app.add_subcommand("hard", "write the worst-case chain MDP");
  hard->add_option("--hard", hard_arg, "n,gamma[,shift-file]")->required();
  hard->add_option("--out", hard_out, "output directory");

  std::string validate_file;
  auto* validate_cmd = app.add_subcommand("validate", "validate an MDP JSON file");
  validate_cmd->add_option("--mdp", validate_file, "MDP JSON file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  return guarded(err, [&] {
    if (solve->parsed()) return cmd_solve(to_run_spec(solve_flags), err);
    if (verify->parsed()) return cmd_verify(to_run_spec(verify_flags), err);
    if (sweep->parsed()) {
      SweepSpec spec;
      if (gammas.empty()) {
        spec.gammas = default_gamma_grid();
      } else {
        for (const auto& g : split(gammas, ',')) spec.gammas.push_back(parse_real(g, "gamma"));
      }
      spec.ks = parse_k_grid(ks);
      spec.out_dir = sweep_out;
      return cmd_sweep_bounds(spec, err);
    }
    if (hard->parsed()) return cmd_hard(parse_hard(hard_arg), hard_out, err);
    return cmd_validate(validate_file, err);
  });
}

}  // namespace ancvi::bench
