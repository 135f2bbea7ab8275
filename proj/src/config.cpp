#include "pdmp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "pdmp/errors.hpp"
#include "pdmp/diagnostics.hpp"
#include "pdmp/io.hpp"

namespace pdmp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_real(const std::string& text, const std::string& path) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v))
    throw InvalidArgument("expected a finite number, got '" + text + "'", path);
  return v;
}

std::uint64_t parse_uint(const std::string& text, const std::string& path) {
  std::uint64_t v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw InvalidArgument("expected a nonnegative integer, got '" + text + "'", path);
  return v;
}

bool parse_bool(const std::string& text, const std::string& path) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgument("expected true or false, got '" + text + "'", path);
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> read;
  std::function<std::string(const ExperimentConfig&)> write;
};

template <class S, class T>
using Member = T S::*;

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

template <class S>
struct Binder {
  S& (*get)(ExperimentConfig&);
  const S& (*cget)(const ExperimentConfig&);

  Field real(Member<S, double> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string& p) { g(c).*m = parse_real(v, p); },
            [cg, m](const ExperimentConfig& c) { return format_double(cg(c).*m); }};
  }
  Field size(Member<S, std::size_t> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string& p) {
              g(c).*m = static_cast<std::size_t>(parse_uint(v, p));
            },
            [cg, m](const ExperimentConfig& c) { return std::to_string(cg(c).*m); }};
  }
  Field u64(Member<S, std::uint64_t> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string& p) { g(c).*m = parse_uint(v, p); },
            [cg, m](const ExperimentConfig& c) { return std::to_string(cg(c).*m); }};
  }
  Field flag(Member<S, bool> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string& p) { g(c).*m = parse_bool(v, p); },
            [cg, m](const ExperimentConfig& c) { return std::string(cg(c).*m ? "true" : "false"); }};
  }
  Field text(Member<S, std::string> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string& p) {
              if (v.empty()) throw InvalidArgument("value must not be empty", p);
              g(c).*m = v;
            },
            [cg, m](const ExperimentConfig& c) { return cg(c).*m; }};
  }
  Field reals(Member<S, std::vector<double>> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string& p) {
              std::vector<double> out;
              for (const auto& item : split_list(v)) out.push_back(parse_real(item, p));
              g(c).*m = std::move(out);
            },
            [cg, m](const ExperimentConfig& c) {
              std::vector<std::string> items;
              for (double x : cg(c).*m) items.push_back(format_double(x));
              return join(items);
            }};
  }
  Field sizes(Member<S, std::vector<std::size_t>> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string& p) {
              std::vector<std::size_t> out;
              for (const auto& item : split_list(v)) out.push_back(static_cast<std::size_t>(parse_uint(item, p)));
              g(c).*m = std::move(out);
            },
            [cg, m](const ExperimentConfig& c) {
              std::vector<std::string> items;
              for (std::size_t x : cg(c).*m) items.push_back(std::to_string(x));
              return join(items);
            }};
  }
  Field texts(Member<S, std::vector<std::string>> m) const {
    auto g = get;
    auto cg = cget;
    return {[g, m](ExperimentConfig& c, const std::string& v, const std::string&) { g(c).*m = split_list(v); },
            [cg, m](const ExperimentConfig& c) { return join(cg(c).*m); }};
  }
};

using Section = std::vector<std::pair<std::string, Field>>;

Field drift_param(const std::string& key) {
  return {[key](ExperimentConfig& c, const std::string& v, const std::string& p) {
            c.target.drift_params[key] = parse_real(v, p);
          },
          {}};
}

const std::vector<std::pair<std::string, Section>>& schema() {
  static const std::vector<std::pair<std::string, Section>> s = [] {
    const Binder<BasisConfig> b{[](ExperimentConfig& c) -> BasisConfig& { return c.basis; },
                                [](const ExperimentConfig& c) -> const BasisConfig& { return c.basis; }};
    const Binder<TargetConfig> t{[](ExperimentConfig& c) -> TargetConfig& { return c.target; },
                                 [](const ExperimentConfig& c) -> const TargetConfig& { return c.target; }};
    const Binder<SamplerConfig> sp{[](ExperimentConfig& c) -> SamplerConfig& { return c.sampler; },
                                   [](const ExperimentConfig& c) -> const SamplerConfig& { return c.sampler; }};
    const Binder<RunConfig> r{[](ExperimentConfig& c) -> RunConfig& { return c.run; },
                              [](const ExperimentConfig& c) -> const RunConfig& { return c.run; }};
    const Binder<StudyConfig> st{[](ExperimentConfig& c) -> StudyConfig& { return c.study; },
                                 [](const ExperimentConfig& c) -> const StudyConfig& { return c.study; }};
    return std::vector<std::pair<std::string, Section>>{
        {"basis",
         {{"kind", b.text(&BasisConfig::kind)},
          {"n_modes", b.size(&BasisConfig::n_modes)},
          {"s", b.real(&BasisConfig::s)},
          {"T", b.real(&BasisConfig::T)},
          {"eigenvalues", b.reals(&BasisConfig::eigenvalues)}}},
        {"target",
         {{"name", t.text(&TargetConfig::name)},
          {"drift", t.text(&TargetConfig::drift)},
          {"theta", drift_param("theta")},
          {"alpha", drift_param("alpha")},
          {"scale", drift_param("scale")},
          {"quad_points", t.size(&TargetConfig::quad_points)}}},
        {"sampler",
         {{"algorithm", sp.text(&SamplerConfig::algorithm)},
          {"rate_mode", sp.text(&SamplerConfig::rate_mode)},
          {"refresh_rate", sp.real(&SamplerConfig::refresh_rate)},
          {"zz_velocities", sp.reals(&SamplerConfig::zz_velocities)},
          {"zz_tuning_r", sp.real(&SamplerConfig::zz_tuning_r)},
          {"bps_zeta", sp.real(&SamplerConfig::bps_zeta)},
          {"approx_level", sp.size(&SamplerConfig::approx_level)},
          {"extra_rate", sp.text(&SamplerConfig::extra_rate)},
          {"extra_value", sp.real(&SamplerConfig::extra_value)},
          {"gradient_reflection", sp.flag(&SamplerConfig::gradient_reflection)},
          {"horizon", sp.real(&SamplerConfig::horizon)}}},
        {"run",
         {{"t_end", r.real(&RunConfig::t_end)},
          {"seed", r.u64(&RunConfig::seed)},
          {"chains", r.size(&RunConfig::chains)},
          {"max_events", r.size(&RunConfig::max_events)},
          {"init", r.text(&RunConfig::init)}}},
        {"study",
         {{"type", st.text(&StudyConfig::type)},
          {"functions", st.texts(&StudyConfig::functions)},
          {"function", st.text(&StudyConfig::function)},
          {"samples", st.size(&StudyConfig::samples)},
          {"nested", st.size(&StudyConfig::nested)},
          {"batches", st.size(&StudyConfig::batches)},
          {"ensemble", st.size(&StudyConfig::ensemble)},
          {"t_grid", st.reals(&StudyConfig::t_grid)},
          {"fit_from", st.real(&StudyConfig::fit_from)},
          {"levels", st.sizes(&StudyConfig::levels)},
          {"t_horizon", st.real(&StudyConfig::t_horizon)},
          {"band_height", st.real(&StudyConfig::band_height)},
          {"tuning_r", st.real(&StudyConfig::tuning_r)}}},
    };
  }();
  return s;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& [name, fields] : schema()) {
    if (name != section) continue;
    for (const auto& [k, f] : fields)
      if (k == key) return &f;
  }
  return nullptr;
}

bool known_section(const std::string& section) {
  return std::any_of(schema().begin(), schema().end(), [&](const auto& s) { return s.first == section; });
}

void require_one_of(const std::string& value, std::initializer_list<const char*> options, const std::string& path) {
  for (const char* o : options)
    if (value == o) return;
  std::string list;
  for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
  throw InvalidArgument("'" + value + "' is not one of " + list, path);
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string section;
  std::string raw;
  std::size_t lineno = 0;
  std::vector<std::string> seen;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidArgument("malformed section header on line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) throw InvalidArgument("unknown section", section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("expected key = value on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw InvalidArgument("key outside any section", key);
    const std::string path = section + "." + key;
    const Field* f = find_field(section, key);
    if (!f) throw InvalidArgument("unknown key", path);
    if (std::find(seen.begin(), seen.end(), path) != seen.end()) throw InvalidArgument("duplicate key", path);
    seen.push_back(path);
    f->read(c, value, path);
  }
  return c;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'", "config");
  return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [name, fields] : schema()) {
    out += "[" + name + "]\n";
    for (const auto& [key, f] : fields) {
      if (!f.write) continue;
      out += key + " = " + f.write(c) + "\n";
    }
    if (name == "target")
      for (const auto& [k, v] : c.target.drift_params) out += k + " = " + format_double(v) + "\n";
  }
  return out;
}

void validate_config(const ExperimentConfig& c) {
  require_one_of(c.basis.kind, {"power_law", "brownian_bridge", "wiener", "custom"}, "basis.kind");
  require_one_of(c.target.name, {"zero", "quadratic", "bridge"}, "target.name");
  parse_algorithm(c.sampler.algorithm);
  parse_rate_mode(c.sampler.rate_mode);
  require_one_of(c.sampler.extra_rate, {"none", "constant", "speed"}, "sampler.extra_rate");
  require_one_of(c.run.init, {"reference", "stationary", "zero"}, "run.init");
  require_one_of(c.study.type, {"run", "invariance", "variance", "decay", "approx", "tuning"}, "study.type");
  if (!(c.run.t_end > 0.0)) throw InvalidArgument("t_end must be positive", "run.t_end");
  if (c.run.chains < 1) throw InvalidArgument("need at least one chain", "run.chains");
  if (c.run.max_events < 1) throw InvalidArgument("max_events must be positive", "run.max_events");
  if (c.sampler.extra_rate != "none" && !(c.sampler.extra_value >= 0.0))
    throw InvalidArgument("extra rate must be nonnegative", "sampler.extra_value");
  if (c.target.name != "bridge" && !c.target.drift_params.empty())
    throw InvalidArgument("drift parameters need target.name = bridge", "target." + c.target.drift_params.begin()->first);
  const StudyConfig& s = c.study;
  if (s.type == "approx") {
    if (s.levels.empty()) throw InvalidArgument("approx study requires a levels list", "study.levels");
    if (!(s.t_horizon > 0.0)) throw InvalidArgument("t_horizon must be positive", "study.t_horizon");
    if (!(s.band_height > 0.0)) throw InvalidArgument("band_height must be positive", "study.band_height");
  }
  if (s.type == "invariance" && s.samples < 1) throw InvalidArgument("samples must be positive", "study.samples");
  if (s.type == "variance" && s.batches < kMinBatches)
    throw InvalidArgument("need at least " + std::to_string(kMinBatches) + " batches", "study.batches");
  if (s.type == "decay") {
    if (s.t_grid.size() < 2) throw InvalidArgument("decay study needs a t_grid with two or more points", "study.t_grid");
    for (std::size_t i = 1; i < s.t_grid.size(); ++i)
      if (!(s.t_grid[i] > s.t_grid[i - 1])) throw InvalidArgument("t_grid must be increasing", "study.t_grid");
    if (!(s.t_grid.front() >= 0.0)) throw InvalidArgument("t_grid must be nonnegative", "study.t_grid");
  }
}

SpectralBasis build_basis(const ExperimentConfig& c) {
  const BasisConfig& b = c.basis;
  if (b.kind == "custom") {
    if (b.eigenvalues.empty()) throw InvalidArgument("custom basis needs an eigenvalue list", "basis.eigenvalues");
    if (b.n_modes != b.eigenvalues.size())
      throw InvalidArgument("n_modes must equal the eigenvalue count", "basis.n_modes");
    try {
      return SpectralBasis::custom(b.eigenvalues);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(e.what(), "basis.eigenvalues");
    }
  }
  if (!b.eigenvalues.empty()) throw InvalidArgument("eigenvalues are only used with kind = custom", "basis.eigenvalues");
  if (b.kind == "power_law") return SpectralBasis::power_law(b.s, b.n_modes);
  if (b.n_modes < 1) throw InvalidArgument("need at least one mode", "basis.n_modes");
  if (b.kind == "brownian_bridge") {
    if (!(b.T > 0.0)) throw InvalidArgument("bridge length must be positive", "basis.T");
    return SpectralBasis::brownian_bridge(b.T, b.n_modes);
  }
  if (b.kind == "wiener") return SpectralBasis::wiener(b.n_modes);
  throw InvalidArgument("unknown basis kind '" + b.kind + "'", "basis.kind");
}

TargetPotential build_target(const ExperimentConfig& c, const SpectralBasis& basis) {
  const TargetConfig& t = c.target;
  if (t.name == "zero") return zero_target(basis);
  if (t.name == "quadratic") return quadratic_target(basis);
  if (t.name == "bridge") {
    if (t.quad_points < 16) throw InvalidArgument("use at least 16 quadrature points", "target.quad_points");
    return bridge_target(basis, make_drift(t.drift, t.drift_params), t.quad_points);
  }
  throw InvalidArgument("unknown target '" + t.name + "'", "target.name");
}

SamplerSpec build_sampler_spec(const ExperimentConfig& c) {
  const SamplerConfig& s = c.sampler;
  SamplerSpec spec;
  spec.algorithm = parse_algorithm(s.algorithm);
  spec.rate_mode = parse_rate_mode(s.rate_mode);
  spec.refresh_rate = s.refresh_rate;
  if (!s.zz_velocities.empty()) spec.zz_velocities = s.zz_velocities;
  spec.zz_tuning_r = s.zz_tuning_r;
  spec.bps_zeta = s.bps_zeta;
  if (s.approx_level > 0) spec.approx_level = s.approx_level;
  if (s.extra_rate == "constant") {
    spec.extra.kind = ExtraRate::Kind::Constant;
    spec.extra.value = s.extra_value;
  } else if (s.extra_rate == "speed") {
    spec.extra.kind = ExtraRate::Kind::Speed;
    spec.extra.value = s.extra_value;
  } else if (s.extra_rate != "none") {
    throw InvalidArgument("unknown extra rate '" + s.extra_rate + "'", "sampler.extra_rate");
  }
  spec.boomerang_gradient_reflection = s.gradient_reflection;
  spec.horizon = s.horizon;
  return spec;
}

}  // namespace pdmp
