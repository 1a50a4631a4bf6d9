#include "gsc/app/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "gsc/oracle.hpp"

namespace gsc::app {
namespace {

using nlohmann::json;

std::string describe(const std::vector<ConfigIssue>& issues) {
  std::ostringstream out;
  out << issues.size() << " problem(s)";
  for (const auto& issue : issues) out << "\n  " << issue.pointer << ": " << issue.message;
  return out.str();
}

// Collects problems while walking the document.
class Reader {
 public:
  void fail(const std::string& pointer, const std::string& message) {
    issues_.push_back({pointer.empty() ? "/" : pointer, message});
  }
  bool ok() const { return issues_.empty(); }
  std::vector<ConfigIssue>& issues() { return issues_; }

  const json* child(const json& obj, const std::string& ptr, const char* key, bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(ptr + "/" + key, "required field is missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& ptr, const char* key,
                               bool required) {
    const json* v = child(obj, ptr, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      fail(ptr + "/" + key, "expected a number");
      return std::nullopt;
    }
    const double d = v->get<double>();
    if (!std::isfinite(d)) {
      fail(ptr + "/" + key, "must be finite");
      return std::nullopt;
    }
    return d;
  }

  std::optional<std::uint64_t> count(const json& obj, const std::string& ptr, const char* key,
                                     bool required) {
    const json* v = child(obj, ptr, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) {
      fail(ptr + "/" + key, "expected a non-negative integer");
      return std::nullopt;
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::string> string(const json& obj, const std::string& ptr, const char* key,
                                    bool required) {
    const json* v = child(obj, ptr, key, required);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      fail(ptr + "/" + key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<std::string>> names(const json& obj, const char* key) {
    const std::string ptr = std::string("/") + key;
    const json* v = child(obj, "", key, true);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->empty()) {
      fail(ptr, "expected a non-empty array of strings");
      return std::nullopt;
    }
    std::vector<std::string> out;
    std::set<std::string> seen;
    bool good = true;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& item = (*v)[i];
      const std::string ip = ptr + "/" + std::to_string(i);
      if (!item.is_string()) {
        fail(ip, "expected a string");
        good = false;
        continue;
      }
      if (!seen.insert(item.get<std::string>()).second) {
        fail(ip, "duplicate name '" + item.get<std::string>() + "'");
        good = false;
      }
      out.push_back(item.get<std::string>());
    }
    if (!good) return std::nullopt;
    return out;
  }

  std::optional<Eigen::VectorXd> vector(const json& v, const std::string& ptr) {
    if (!v.is_array()) {
      fail(ptr, "expected an array of numbers");
      return std::nullopt;
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    bool good = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(ptr + "/" + std::to_string(i), "expected a finite number");
        good = false;
        continue;
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    if (!good) return std::nullopt;
    return out;
  }

  std::optional<Eigen::MatrixXd> matrix(const json& v, const std::string& ptr, Eigen::Index size) {
    if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != size) {
      fail(ptr, "expected a " + std::to_string(size) + "x" + std::to_string(size) + " array of rows");
      return std::nullopt;
    }
    Eigen::MatrixXd out(size, size);
    bool good = true;
    for (Eigen::Index r = 0; r < size; ++r) {
      const std::string rp = ptr + "/" + std::to_string(r);
      auto row = vector(v[static_cast<std::size_t>(r)], rp);
      if (!row) {
        good = false;
        continue;
      }
      if (row->size() != size) {
        fail(rp, "row has " + std::to_string(row->size()) + " entries, expected " + std::to_string(size));
        good = false;
        continue;
      }
      out.row(r) = row->transpose();
    }
    if (!good) return std::nullopt;
    return out;
  }

 private:
  std::vector<ConfigIssue> issues_;
};

void parse_schedule(Reader& rd, const json& doc, ScheduleSpec& s) {
  const json* node = rd.child(doc, "", "schedule", true);
  if (!node) return;
  if (!node->is_object()) {
    rd.fail("/schedule", "expected an object");
    return;
  }
  const auto kind = rd.string(*node, "/schedule", "kind", true);
  static const json empty = json::object();
  const json* params = rd.child(*node, "/schedule", "params", false);
  if (params && !params->is_object()) {
    rd.fail("/schedule/params", "expected an object");
    params = nullptr;
  }
  const json& p = params ? *params : empty;
  const std::string pp = "/schedule/params";
  if (!kind) return;

  auto positive = [&](const std::optional<double>& v, const char* key) {
    if (v && !(*v > 0.0)) rd.fail(pp + "/" + key, "must be > 0");
  };
  auto nonneg = [&](const std::optional<double>& v, const char* key) {
    if (v && !(*v >= 0.0)) rd.fail(pp + "/" + key, "must be >= 0");
  };

  if (*kind == "constant") {
    s.kind = ScheduleKind::Constant;
    const auto q = rd.number(p, pp, "q", true);
    const auto t = rd.number(p, pp, "T", true);
    nonneg(q, "q");
    nonneg(t, "T");
    s.q = q.value_or(0.0);
    s.temperature = t.value_or(0.0);
  } else if (*kind == "log_cooling") {
    s.kind = ScheduleKind::LogCooling;
    const auto q = rd.number(p, pp, "q", true);
    const auto c = rd.number(p, pp, "c", true);
    const auto t0 = rd.number(p, pp, "t0", false);
    nonneg(q, "q");
    positive(c, "c");
    if (t0 && *t0 < std::numbers::e) rd.fail(pp + "/t0", "must be >= e");
    s.q = q.value_or(0.0);
    s.c = c.value_or(1.0);
    s.t0 = t0.value_or(std::numbers::e);
  } else if (*kind == "finite_time") {
    s.kind = ScheduleKind::FiniteTime;
    auto& ft = s.finite_time;
    s.gap = rd.number(p, pp, "g", false);
    const auto eta = rd.number(p, pp, "eta", true);
    const auto eps = rd.number(p, pp, "eps", true);
    const auto kq = rd.number(p, pp, "k_q", false);
    const auto kt = rd.number(p, pp, "k_T", false);
    const auto ktime = rd.number(p, pp, "k_t", false);
    const auto t0 = rd.number(p, pp, "t0", false);
    const auto max_steps = rd.number(p, pp, "max_steps", false);
    positive(s.gap, "g");
    positive(eta, "eta");
    positive(kq, "k_q");
    positive(kt, "k_T");
    positive(ktime, "k_t");
    positive(max_steps, "max_steps");
    if (eps && !(*eps > 0.0 && *eps < 1.0)) rd.fail(pp + "/eps", "must lie in (0, 1)");
    if (t0 && *t0 < std::numbers::e) rd.fail(pp + "/t0", "must be >= e");
    ft.eta = eta.value_or(kDefaultEta);
    ft.epsilon = eps.value_or(0.1);
    ft.k_q = kq.value_or(1.0);
    ft.k_temperature = kt.value_or(1.0);
    ft.k_time = ktime.value_or(1.0);
    ft.t0 = t0.value_or(std::numbers::e);
    s.max_steps = max_steps.value_or(kDefaultMaxSteps);
  } else if (*kind == "table") {
    s.kind = ScheduleKind::Table;
    const json* bps = rd.child(p, pp, "breakpoints", true);
    if (!bps) return;
    if (!bps->is_array() || bps->empty()) {
      rd.fail(pp + "/breakpoints", "expected a non-empty array of [t, q, T] triples");
      return;
    }
    for (std::size_t i = 0; i < bps->size(); ++i) {
      const std::string ip = pp + "/breakpoints/" + std::to_string(i);
      auto triple = rd.vector((*bps)[i], ip);
      if (!triple) continue;
      if (triple->size() != 3) {
        rd.fail(ip, "expected [t, q, T]");
        continue;
      }
      Breakpoint b{(*triple)[0], (*triple)[1], (*triple)[2]};
      if (b.q < 0.0) rd.fail(ip + "/1", "q must be >= 0");
      if (b.temperature < 0.0) rd.fail(ip + "/2", "T must be >= 0");
      if (!s.breakpoints.empty() && !(b.t > s.breakpoints.back().t)) {
        rd.fail(ip + "/0", "breakpoint times must be strictly increasing");
      }
      s.breakpoints.push_back(b);
    }
  } else {
    rd.fail("/schedule/kind", "unknown schedule kind '" + *kind +
                                  "' (expected constant, log_cooling, finite_time or table)");
  }
}

void parse_init(Reader& rd, const json& sde, SdeConfig& out, int fillers, int roles, bool dims_ok) {
  const json* init = rd.child(sde, "/sde", "init", false);
  if (!init) return;
  const std::string ip = "/sde/init";
  std::string kind;
  if (init->is_string()) {
    kind = init->get<std::string>();
  } else if (init->is_object()) {
    kind = rd.string(*init, ip, "kind", true).value_or("");
  } else {
    rd.fail(ip, "expected a string or an object");
    return;
  }
  if (kind == "barycenter") {
    out.init = BarycenterInit{};
  } else if (kind == "gaussian") {
    GaussianInit g;
    if (init->is_object()) {
      const auto sigma = rd.number(*init, ip, "sigma", false);
      if (sigma && !(*sigma >= 0.0)) rd.fail(ip + "/sigma", "must be >= 0");
      g.sigma = sigma.value_or(g.sigma);
    }
    out.init = g;
  } else if (kind == "given") {
    const json* state = init->is_object() ? rd.child(*init, ip, "state", true) : nullptr;
    if (!init->is_object()) rd.fail(ip + "/state", "required field is missing");
    if (!state) return;
    auto v = rd.vector(*state, ip + "/state");
    if (!v || !dims_ok) return;
    if (v->size() != static_cast<Eigen::Index>(fillers) * roles) {
      rd.fail(ip + "/state", "expected F*R = " + std::to_string(fillers * roles) +
                                 " coefficients in order role*F + filler");
      return;
    }
    out.init = GivenInit{CoefficientState(fillers, roles, *v)};
  } else if (!kind.empty()) {
    rd.fail(ip + "/kind", "unknown initializer '" + kind + "' (expected barycenter, gaussian or given)");
  }
}

void parse_command(Reader& rd, const json& doc, CommandParams& c) {
  const json* node = rd.child(doc, "", "command", false);
  if (!node) return;
  if (!node->is_object()) {
    rd.fail("/command", "expected an object");
    return;
  }
  const std::string cp = "/command";
  if (auto v = rd.count(*node, cp, "n_runs", false)) {
    if (*v == 0) rd.fail(cp + "/n_runs", "must be >= 1");
    c.n_runs = *v;
  }
  if (auto v = rd.count(*node, cp, "record_stride", false)) c.record_stride = *v;
  if (auto v = rd.count(*node, cp, "dump_trajectories", false)) c.dump_trajectories = *v;
  if (auto v = rd.number(*node, cp, "eta", false)) {
    if (!(*v > 0.0)) rd.fail(cp + "/eta", "must be > 0");
    else if (*v >= std::numbers::sqrt2 / 2.0) rd.fail(cp + "/eta", "must be below sqrt(2)/2 so basins stay disjoint");
    c.eta = *v;
  }
  if (auto v = rd.string(*node, cp, "out_dir", false)) c.out_dir = *v;

  if (const json* sample = rd.child(*node, cp, "sample", false)) {
    const std::string sp = cp + "/sample";
    if (auto v = rd.number(*sample, sp, "temperature", false)) {
      if (!(*v > 0.0)) rd.fail(sp + "/temperature", "must be > 0");
      c.sample_temperature = *v;
    }
    if (auto v = rd.number(*sample, sp, "burn_in", false)) {
      if (*v < 0.0) rd.fail(sp + "/burn_in", "must be >= 0");
      c.burn_in = *v;
    }
    if (auto v = rd.count(*sample, sp, "thin_steps", false)) {
      if (*v == 0) rd.fail(sp + "/thin_steps", "must be >= 1");
      c.thin_steps = *v;
    }
  }
  if (const json* sweep = rd.child(*node, cp, "sweep", false)) {
    const std::string sp = cp + "/sweep";
    if (auto axis = rd.string(*sweep, sp, "axis", false)) {
      if (*axis == "q") c.sweep_axis = SweepAxis::Q;
      else if (*axis == "T") c.sweep_axis = SweepAxis::Temperature;
      else if (*axis == "c") c.sweep_axis = SweepAxis::C;
      else if (*axis == "dt") c.sweep_axis = SweepAxis::Dt;
      else rd.fail(sp + "/axis", "expected one of q, T, c, dt");
    }
    if (const json* values = rd.child(*sweep, sp, "values", false)) {
      if (auto v = rd.vector(*values, sp + "/values")) {
        c.sweep_values.assign(v->data(), v->data() + v->size());
      }
    }
    if (auto mode = rd.string(*sweep, sp, "mode", false)) {
      if (*mode == "optimize") c.sweep_mode = SweepMode::Optimize;
      else if (*mode == "sample") c.sweep_mode = SweepMode::Sample;
      else rd.fail(sp + "/mode", "expected optimize or sample");
    }
  }
  if (const json* verify = rd.child(*node, cp, "verify", false)) {
    if (auto v = rd.count(*verify, cp + "/verify", "samples", false)) {
      if (*v == 0) rd.fail(cp + "/verify/samples", "must be >= 1");
      c.verify_samples = *v;
    }
  }
}

}  // namespace

ConfigError::ConfigError(ErrorKind kind, std::string source, std::vector<ConfigIssue> issues)
    : Error(kind, source + ": " + describe(issues)), source_(std::move(source)), issues_(std::move(issues)) {}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Q: return "q";
    case SweepAxis::Temperature: return "T";
    case SweepAxis::C: return "c";
    case SweepAxis::Dt: return "dt";
  }
  return "?";
}

std::uint64_t grid_cap_from_env() {
  const char* raw = std::getenv("GSC_MAX_GRID");
  if (!raw || !*raw) return kDefaultGridCap;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0' || v == 0) {
    throw ConfigError(ErrorKind::ValidationError, "GSC_MAX_GRID",
                      {{"$GSC_MAX_GRID", "expected a positive integer, got '" + std::string(raw) + "'"}});
  }
  return v;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(ErrorKind::ParseError, path.string(), {{"/", "cannot open file"}});
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(ErrorKind::ParseError, path.string(), {{"/", e.what()}});
  }
  return parse_config(doc, path.string());
}

RunConfig parse_config(const json& doc, const std::string& source) {
  Reader rd;
  if (!doc.is_object()) {
    throw ConfigError(ErrorKind::ValidationError, source, {{"/", "expected a JSON object"}});
  }
  std::vector<std::string> warnings;
  static const std::set<std::string> known = {"fillers", "roles", "filler_basis", "role_basis", "W",
                                              "b",       "schedule", "sde",       "command",   "notes"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) warnings.push_back("/" + key + ": unknown field ignored");
  }

  const auto fillers = rd.names(doc, "fillers");
  const auto roles = rd.names(doc, "roles");
  const bool dims_ok = fillers && roles;
  const int F = fillers ? static_cast<int>(fillers->size()) : 0;
  const int R = roles ? static_cast<int>(roles->size()) : 0;
  const Eigen::Index N = static_cast<Eigen::Index>(F) * R;

  std::optional<Eigen::MatrixXd> filler_basis, role_basis;
  if (const json* fb = rd.child(doc, "", "filler_basis", false); fb && dims_ok) {
    filler_basis = rd.matrix(*fb, "/filler_basis", F);
  }
  if (const json* rb = rd.child(doc, "", "role_basis", false); rb && dims_ok) {
    role_basis = rd.matrix(*rb, "/role_basis", R);
  }

  std::optional<Eigen::MatrixXd> W;
  std::optional<Eigen::VectorXd> b;
  if (const json* bj = rd.child(doc, "", "b", true)) {
    b = rd.vector(*bj, "/b");
    if (b && dims_ok && b->size() != N) {
      rd.fail("/b", "length " + std::to_string(b->size()) + " does not match F*R = " + std::to_string(N));
      b.reset();
    }
  }
  if (const json* wj = rd.child(doc, "", "W", false)) {
    if (dims_ok) W = rd.matrix(*wj, "/W", N);
  } else if (dims_ok) {
    W = Eigen::MatrixXd::Zero(N, N);
  }

  ScheduleSpec schedule;
  parse_schedule(rd, doc, schedule);

  SdeConfig sde;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
  if (const json* sj = rd.child(doc, "", "sde", true)) {
    if (!sj->is_object()) {
      rd.fail("/sde", "expected an object");
    } else {
      dt = rd.number(*sj, "/sde", "dt", false);
      t_end = rd.number(*sj, "/sde", "t_end", schedule.kind != ScheduleKind::FiniteTime);
      seed = rd.count(*sj, "/sde", "seed", true);
      if (dt && !(*dt > 0.0)) rd.fail("/sde/dt", "must be > 0");
      if (t_end && !(*t_end > 0.0)) rd.fail("/sde/t_end", "must be > 0");
      if (dt && t_end && *t_end < *dt) rd.fail("/sde/t_end", "must be >= dt");
      parse_init(rd, *sj, sde, F, R, dims_ok);
    }
  }

  CommandParams command;
  parse_command(rd, doc, command);

  std::uint64_t cap = kDefaultGridCap;
  try {
    cap = grid_cap_from_env();
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues()) rd.fail(issue.pointer, issue.message);
  }

  // Construct the domain objects; their own checks become issues too.
  std::optional<FillerRoleSpec> spec;
  if (dims_ok) {
    try {
      spec.emplace(*fillers, *roles, filler_basis, role_basis);
    } catch (const Error& e) {
      rd.fail(e.kind() == ErrorKind::SingularBasis ? (filler_basis ? "/filler_basis" : "/role_basis") : "/",
              e.what());
    }
  }
  std::optional<HarmonyParams> params;
  if (W && b) {
    params.emplace(*W, *b);
    if (params->input_asymmetry() > 1e-12) {
      std::ostringstream msg;
      msg << "/W: asymmetric by up to " << params->input_asymmetry() << "; symmetrized as (W + W^T)/2";
      warnings.push_back(msg.str());
    }
  }

  if (schedule.kind == ScheduleKind::FiniteTime && spec && params) {
    if (!schedule.gap) {
      try {
        const auto opt = brute_force_optimum(*params, *spec, cap);
        if (opt.tie || !std::isfinite(opt.gap)) {
          rd.fail("/schedule/params/g", "H has no unique grid optimum; give the gap g explicitly");
        } else {
          schedule.gap = opt.gap;
        }
      } catch (const Error& e) {
        rd.fail("/schedule/params/g", std::string("cannot derive gap from the grid: ") + e.what());
      }
    }
    if (schedule.gap) {
      schedule.finite_time.gap = *schedule.gap;
      schedule.q = schedule.finite_time.k_q *
                   std::max(1.0 / schedule.finite_time.gap, 1.0 / schedule.finite_time.eta);
    }
  }

  if (!rd.ok()) throw ConfigError(ErrorKind::ValidationError, source, std::move(rd.issues()));

  double max_q = schedule.q;
  if (schedule.kind == ScheduleKind::Table) {
    for (const auto& bp : schedule.breakpoints) max_q = std::max(max_q, bp.q);
  }
  sde.dt = dt.value_or(default_step_size(max_q));
  sde.seed = *seed;
  sde.record_stride = command.record_stride;

  RunConfig cfg{std::move(*spec), std::move(*params), schedule, sde, !t_end.has_value(), command, cap,
                std::move(warnings), source};
  if (t_end) cfg.sde.t_end = *t_end;
  if (cfg.sde.t_end < cfg.sde.dt && t_end) {
    throw ConfigError(ErrorKind::ValidationError, source, {{"/sde/t_end", "must be >= dt"}});
  }
  return cfg;
}

Schedule build_schedule(const RunConfig& cfg) {
  const auto& s = cfg.schedule;
  switch (s.kind) {
    case ScheduleKind::Constant: return Schedule::constant(s.q, s.temperature);
    case ScheduleKind::LogCooling: return Schedule::log_cooling(s.q, s.c, s.t0);
    case ScheduleKind::FiniteTime: {
      FiniteTimeParams ft = s.finite_time;
      if (s.gap) ft.gap = *s.gap;
      return finite_time_schedule(ft, cfg.sde.dt, s.max_steps);
    }
    case ScheduleKind::Table: return Schedule::table(s.breakpoints);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown schedule kind");
}

SdeConfig effective_sde(const RunConfig& cfg, const Schedule& schedule) {
  SdeConfig sde = cfg.sde;
  if (cfg.t_end_from_schedule) {
    if (const auto h = schedule.horizon()) sde.t_end = std::max(*h, sde.dt);
  }
  return sde;
}

}  // namespace gsc::app
