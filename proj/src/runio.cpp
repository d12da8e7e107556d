#include "nls/runio.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>

#include "nls/fft.hpp"
#include "nls/profiles.hpp"

namespace nls {

namespace {

bool type_matches(const json& v, const std::string& type) {
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "array") return v.is_array();
  if (type == "object") return v.is_object();
  return false;
}

CoefficientSpectrum spectrum_from_json(const json& j, int d) {
  validate_schema(j, {{"d", "integer", false},
                      {"n_max", "integer", false},
                      {"coeffs", "array", true}},
                  "nonlinearity.spectrum");
  int n_max = 0;
  for (const json& row : j.at("coeffs")) {
    if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() ||
        !row[1].is_number() || !row[2].is_number())
      throw config_error("coeffs rows must be [n, re, im]");
    n_max = std::max(n_max, std::abs(row[0].get<int>()));
  }
  if (j.contains("n_max")) n_max = std::max(n_max, j.at("n_max").get<int>());
  CoefficientSpectrum s;
  s.d = j.value("d", d);
  s.n_max = n_max;
  s.g.assign(2 * n_max + 1, cplx(0.0));
  for (const json& row : j.at("coeffs"))
    s.g[std::size_t(row[0].get<int>() + n_max)] =
        cplx(row[1].get<double>(), row[2].get<double>());
  return s;
}

NonlinearitySpec nonlinearity_from_json(const json& j, int d) {
  validate_schema(j, {{"profile", "string", true}, {"spectrum", "object", false}},
                  "nonlinearity");
  const std::string id = j.at("profile").get<std::string>();
  if (id == "custom") {
    if (!j.contains("spectrum"))
      throw config_error("custom profile needs a spectrum block");
    return make_custom_spec(spectrum_from_json(j.at("spectrum"), d));
  }
  if (j.contains("spectrum"))
    throw config_error("spectrum block is only valid with the custom profile");
  return make_spec(id, d);
}

Field initial_from_json(const json& j, const Grid& g) {
  validate_schema(j, {{"family", "string", true},
                      {"amplitude", "number", false},
                      {"sigma", "number", false},
                      {"k", "number", false},
                      {"R0", "number", false},
                      {"eps", "number", false}},
                  "initial");
  const std::string family = j.at("family").get<std::string>();
  if (family == "zero") return Field(g);
  if (family == "gauss" || family == "bump") {
    const double amp = j.value("amplitude", 1.0);
    const double sig = j.value("sigma", 1.0);
    if (!(sig > 0.0)) throw config_error("sigma must be positive");
    auto shape = [&](double r2) -> cplx {
      if (family == "gauss") return amp * std::exp(-r2 / (2.0 * sig * sig));
      const double q = r2 / (sig * sig);
      return q < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - q)) : 0.0;
    };
    if (g.dim == 1)
      return make_field(g, [&](double x) { return shape(x * x); });
    return make_field2(g, [&](double x, double y) { return shape(x * x + y * y); });
  }
  if (family == "blowup") {
    const double k = j.value("k", 0.5);
    const double r0 = j.value("R0", 1.0);
    const double eps = j.value("eps", 1.0);
    if (!(eps > 0.0)) throw config_error("eps must be positive");
    BlowupDatum bd = make_blowup_datum(g, k, r0);
    for (cplx& z : bd.f.v) z *= eps;
    return std::move(bd.f);
  }
  throw config_error("unknown initial family: " + family);
}

std::vector<double> snapshots_from_json(const json& j) {
  if (j.is_array()) {
    std::vector<double> out;
    for (const json& v : j) {
      if (!v.is_number()) throw config_error("snapshot times must be numbers");
      out.push_back(v.get<double>());
    }
    return out;
  }
  validate_schema(j, {{"kind", "string", true},
                      {"from", "number", true},
                      {"to", "number", true},
                      {"count", "integer", true}},
                  "snapshots");
  const std::string kind = j.at("kind").get<std::string>();
  const double a = j.at("from").get<double>();
  const double b = j.at("to").get<double>();
  const int n = j.at("count").get<int>();
  if (n < 2 || !(b > a)) throw config_error("snapshot range needs count >= 2 and to > from");
  std::vector<double> out(std::size_t(n), 0.0);
  if (kind == "linear") {
    for (int i = 0; i < n; ++i) out[std::size_t(i)] = a + (b - a) * i / (n - 1);
  } else if (kind == "log") {
    if (!(a > 0.0)) throw config_error("log spacing needs from > 0");
    for (int i = 0; i < n; ++i)
      out[std::size_t(i)] = a * std::pow(b / a, double(i) / (n - 1));
  } else {
    throw config_error("snapshot kind must be linear or log");
  }
  return out;
}

}  // namespace

void validate_schema(const json& j, const std::vector<SchemaField>& fields,
                     const std::string& where) {
  if (!j.is_object())
    throw config_error(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const SchemaField& f : fields)
      if (f.key == key) {
        if (!type_matches(value, f.type))
          throw config_error(where + "." + key + " must be a " + f.type);
        known = true;
        break;
      }
    if (!known) throw config_error("unknown key '" + key + "' in " + where);
  }
  for (const SchemaField& f : fields)
    if (f.required && !j.contains(f.key))
      throw config_error(where + " is missing required key '" + f.key + "'");
}

std::string content_hash(const json& j) {
  const std::string s = j.dump();  // objects are key-sorted, so canonical
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static const char* hex = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = hex[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("cannot open for writing: " + path);
  out << text;
  if (!out) throw error("write failed: " + path);
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void write_scalars_csv(const Trajectory& traj, const std::string& path) {
  std::string out = "t,mass,linf,boundary_fraction\n";
  for (const ScalarSample& s : traj.scalars) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.mass);
    out += ',';
    out += format_double(s.linf);
    out += ',';
    out += format_double(s.boundary_fraction);
    out += '\n';
  }
  write_text(path, out);
}

void write_diagnostics_csv(const std::vector<double>& t,
                           const std::vector<double>& l2,
                           const std::vector<double>& tail,
                           const std::vector<cplx>& key1,
                           const std::vector<double>& key2,
                           const std::vector<double>& key3,
                           const std::vector<double>& barab,
                           const std::string& path) {
  const std::size_t n = t.size();
  if (l2.size() != n || tail.size() != n || key1.size() != n ||
      key2.size() != n || key3.size() != n || barab.size() != n)
    throw config_error("diagnostics columns differ in length");
  std::string out =
      "t,l2_distance,tail_strichartz,key1_re,key1_im,key2,key3,barab\n";
  for (std::size_t i = 0; i < n; ++i) {
    out += format_double(t[i]);
    out += ',';
    out += format_double(l2[i]);
    out += ',';
    out += format_double(tail[i]);
    out += ',';
    out += format_double(key1[i].real());
    out += ',';
    out += format_double(key1[i].imag());
    out += ',';
    out += format_double(key2[i]);
    out += ',';
    out += format_double(key3[i]);
    out += ',';
    out += format_double(barab[i]);
    out += '\n';
  }
  write_text(path, out);
}

void write_sweep_csv(const SweepResult& r, const std::string& path) {
  std::string out = "eps,t_detected,trigger,resolution,excluded\n";
  for (const SweepPoint& p : r.points) {
    out += format_double(p.eps);
    out += ',';
    out += format_double(p.t_detected);
    out += ',';
    out += p.trigger;
    out += ',';
    out += std::to_string(p.resolution);
    out += ',';
    out += p.excluded ? '1' : '0';
    out += '\n';
  }
  write_text(path, out);
}

ParsedSim parse_simulation_config(const json& j) {
  validate_schema(j, {{"schema", "integer", false},
                      {"grid", "object", true},
                      {"nonlinearity", "object", true},
                      {"time", "object", true},
                      {"initial", "object", true},
                      {"caps", "object", false},
                      {"snapshots", "array", false},
                      {"snapshot_rule", "object", false},
                      {"dealias", "boolean", false}},
                  "config");
  if (j.value("schema", 1) != 1) throw config_error("unsupported schema version");

  const json& jg = j.at("grid");
  validate_schema(jg, {{"dim", "integer", true},
                       {"half_width", "number", true},
                       {"points", "integer", true}},
                  "grid");
  Grid g;
  try {
    g = Grid(jg.at("dim").get<int>(), jg.at("half_width").get<double>(),
             jg.at("points").get<int>());
  } catch (const error& e) {
    throw config_error(e.what());
  }

  ParsedSim ps;
  ps.cfg.grid = g;
  ps.cfg.nl = nonlinearity_from_json(j.at("nonlinearity"), g.dim);

  const json& jt = j.at("time");
  validate_schema(jt, {{"t_start", "number", true},
                       {"t_end", "number", true},
                       {"dt_cap_c", "number", false},
                       {"fixed_dt", "boolean", false},
                       {"dt", "number", false}},
                  "time");
  ps.cfg.t_start = jt.at("t_start").get<double>();
  ps.cfg.t_end = jt.at("t_end").get<double>();
  ps.cfg.dt_cap_c = jt.value("dt_cap_c", ps.cfg.dt_cap_c);
  ps.cfg.fixed_dt = jt.value("fixed_dt", false);
  ps.cfg.dt = jt.value("dt", 0.0);
  if (ps.cfg.fixed_dt && !(ps.cfg.dt > 0.0))
    throw config_error("fixed_dt requires a positive dt");

  if (j.contains("caps")) {
    const json& jc = j.at("caps");
    validate_schema(jc, {{"blowup_mass_factor", "number", false},
                         {"blowup_linf", "number", false},
                         {"boundary_cap", "number", false}},
                    "caps");
    ps.cfg.blowup_mass_factor =
        jc.value("blowup_mass_factor", ps.cfg.blowup_mass_factor);
    ps.cfg.blowup_linf = jc.value("blowup_linf", ps.cfg.blowup_linf);
    ps.cfg.boundary_cap = jc.value("boundary_cap", ps.cfg.boundary_cap);
  }
  if (j.contains("snapshots") && j.contains("snapshot_rule"))
    throw config_error("give snapshots or snapshot_rule, not both");
  if (j.contains("snapshots"))
    ps.cfg.snapshot_times = snapshots_from_json(j.at("snapshots"));
  if (j.contains("snapshot_rule"))
    ps.cfg.snapshot_times = snapshots_from_json(j.at("snapshot_rule"));
  if (j.contains("dealias")) {
    ps.cfg.dealias = j.at("dealias").get<bool>();
    ps.cfg.dealias_set = true;
  }
  ps.u0 = initial_from_json(j.at("initial"), g);
  return ps;
}

json manifest_for(const json& config, const Trajectory& traj) {
  json m;
  m["config"] = config;
  m["config_hash"] = content_hash(config);
  m["tool_version"] = "0.1.0";
  switch (traj.termination) {
    case Termination::reached_end:
      m["termination"] = "reached_end";
      break;
    case Termination::blowup:
      m["termination"] = "blowup";
      break;
    case Termination::domain_overflow:
      m["termination"] = "domain_overflow";
      break;
  }
  m["reason"] = traj.reason;
  m["end_time"] = traj.end_time;
  m["steps"] = traj.steps;
  m["max_mass_identity_residual"] = traj.max_mass_identity_residual;
  if (config.contains("dealias")) {
    m["dealias_effective"] = config.at("dealias").get<bool>();
  } else if (config.contains("nonlinearity") &&
             config.at("nonlinearity").is_object()) {
    try {
      const int d = config.at("grid").at("dim").get<int>();
      m["dealias_effective"] =
          polynomial_equivalent(nonlinearity_from_json(config.at("nonlinearity"), d));
    } catch (const std::exception&) {
      m["dealias_effective"] = nullptr;
    }
  }
  return m;
}

}  // namespace nls
