#include "ragq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "ragq/errors.hpp"

namespace ragq {

DataSource DataSource::parse(std::string_view text) {
  DataSource d;
  if (text.empty()) throw ArgumentError("data source: empty value");
  if (text == "embedded") return d;
  if (text == "synthetic" || text.starts_with("synthetic:")) {
    d.kind = DataSourceKind::synthetic;
    if (text.size() > 10) {
      const auto rows = text.substr(10);
      std::size_t n = 0;
      const auto [p, ec] = std::from_chars(rows.data(), rows.data() + rows.size(), n);
      if (ec != std::errc() || p != rows.data() + rows.size())
        throw ArgumentError("data source: bad row count in '" + std::string(text) + "'");
      d.rows = n;
    }
    return d;
  }
  d.kind = DataSourceKind::path;
  d.path = std::string(text);
  return d;
}

std::string DataSource::describe() const {
  switch (kind) {
    case DataSourceKind::embedded: return "embedded";
    case DataSourceKind::synthetic: return "synthetic:" + std::to_string(rows);
    case DataSourceKind::path: return path.string();
  }
  return "";
}

std::string to_string(ModelChoice m) { return m == ModelChoice::bilstm ? "bilstm" : "gbt"; }

std::string proposed_model_name(ModelChoice m) {
  return m == ModelChoice::bilstm ? "VMD-PSO-BiLSTM" : "VMD-PSO-GBT";
}

std::vector<BaselineConfig> default_baselines() {
  std::vector<BaselineConfig> out;
  for (auto k : {BaselineKind::decision_tree, BaselineKind::adaboost_r2, BaselineKind::gbdt,
                 BaselineKind::extra_trees, BaselineKind::knn})
    out.push_back(BaselineConfig::defaults(k));
  return out;
}

void PipelineConfig::validate() const {
  vmd.validate();
  pso.validate();
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw ArgumentError("split.fraction must be in (0, 1)");
  if (tuning_epochs < 1) throw ArgumentError("train.tuning_epochs must be >= 1");
  if (tuning_epochs > final_epochs) throw ArgumentError("train.tuning_epochs must not exceed train.final_epochs");
  if (data.kind == DataSourceKind::synthetic && data.rows < 10) throw ArgumentError("data.rows must be >= 10");
  bilstm_for_epochs(final_epochs).validate();
  gbt.validate();
}

void PipelineConfig::apply_fast() {
  pso.population = 4;
  pso.iterations = 3;
  tuning_epochs = 30;
  final_epochs = 60;
}

BilstmConfig PipelineConfig::bilstm_for_epochs(int epochs) const {
  BilstmConfig c = bilstm;
  const double ratio = static_cast<double>(bilstm.lr_drop_epoch) / static_cast<double>(bilstm.max_epochs);
  c.max_epochs = epochs;
  c.lr_drop_epoch = std::clamp(static_cast<int>(std::lround(ratio * epochs)), 0, epochs);
  return c;
}

// ---------------------------------------------------------------------------
// Key-value settings

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out))
    throw ArgumentError(std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

long long parse_int(std::string_view key, std::string_view v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ArgumentError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ArgumentError(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

int parse_i32(std::string_view key, std::string_view v) {
  const long long x = parse_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ArgumentError(std::string(key) + ": out of range");
  return static_cast<int>(x);
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ArgumentError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

std::string omega_name(OmegaInit o) {
  switch (o) {
    case OmegaInit::uniform_spread: return "uniform_spread";
    case OmegaInit::zero: return "zero";
    case OmegaInit::random: return "random";
  }
  return "";
}

struct Setting {
  std::string key;
  std::function<void(PipelineConfig&, std::string_view)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

BaselineConfig& baseline(PipelineConfig& c, BaselineKind k) {
  for (auto& b : c.baselines)
    if (b.kind == k) return b;
  throw ArgumentError("no baseline '" + to_string(k) + "' configured");
}

const BaselineConfig& baseline(const PipelineConfig& c, BaselineKind k) {
  return baseline(const_cast<PipelineConfig&>(c), k);
}

#define RAGQ_REAL(KEY, FIELD)                                                             \
  Setting {                                                                               \
    KEY, [](PipelineConfig& c, std::string_view v) { c.FIELD = parse_real(KEY, v); },     \
        [](const PipelineConfig& c) { return fmt(c.FIELD); }                              \
  }
#define RAGQ_INT(KEY, FIELD)                                                              \
  Setting {                                                                               \
    KEY, [](PipelineConfig& c, std::string_view v) { c.FIELD = parse_i32(KEY, v); },      \
        [](const PipelineConfig& c) { return std::to_string(c.FIELD); }                   \
  }

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = [] {
    std::vector<Setting> t = {
        {"data.source",
         [](PipelineConfig& c, std::string_view v) {
           const std::size_t rows = c.data.rows;
           c.data = DataSource::parse(v);
           if (v == "synthetic") c.data.rows = rows;
         },
         [](const PipelineConfig& c) {
           return c.data.kind == DataSourceKind::path ? c.data.path.string()
                  : c.data.kind == DataSourceKind::synthetic ? std::string("synthetic")
                                                              : std::string("embedded");
         }},
        {"data.rows", [](PipelineConfig& c, std::string_view v) { c.data.rows = parse_u64("data.rows", v); },
         [](const PipelineConfig& c) { return std::to_string(c.data.rows); }},
        RAGQ_REAL("vmd.alpha", vmd.alpha),
        RAGQ_REAL("vmd.tau", vmd.tau),
        RAGQ_INT("vmd.n_modes", vmd.n_modes),
        {"vmd.dc_component",
         [](PipelineConfig& c, std::string_view v) { c.vmd.dc_component = parse_bool("vmd.dc_component", v); },
         [](const PipelineConfig& c) { return fmt(c.vmd.dc_component); }},
        {"vmd.omega_init",
         [](PipelineConfig& c, std::string_view v) {
           if (v == "uniform_spread") c.vmd.omega_init = OmegaInit::uniform_spread;
           else if (v == "zero") c.vmd.omega_init = OmegaInit::zero;
           else if (v == "random") c.vmd.omega_init = OmegaInit::random;
           else throw ArgumentError("vmd.omega_init: expected uniform_spread, zero or random");
         },
         [](const PipelineConfig& c) { return omega_name(c.vmd.omega_init); }},
        RAGQ_REAL("vmd.tolerance", vmd.tolerance),
        RAGQ_INT("vmd.max_iterations", vmd.max_iterations),
        RAGQ_INT("pso.population", pso.population),
        RAGQ_INT("pso.iterations", pso.iterations),
        RAGQ_REAL("pso.inertia", pso.inertia),
        RAGQ_REAL("pso.cognitive", pso.cognitive),
        RAGQ_REAL("pso.social", pso.social),
        RAGQ_REAL("pso.vmax_fraction", pso.vmax_fraction),
        {"pso.model",
         [](PipelineConfig& c, std::string_view v) {
           if (v == "bilstm") c.model = ModelChoice::bilstm;
           else if (v == "gbt") c.model = ModelChoice::gbt;
           else throw ArgumentError("pso.model: expected bilstm or gbt");
         },
         [](const PipelineConfig& c) { return to_string(c.model); }},
        RAGQ_REAL("split.fraction", split_fraction),
        RAGQ_INT("train.tuning_epochs", tuning_epochs),
        RAGQ_INT("train.final_epochs", final_epochs),
        RAGQ_REAL("bilstm.grad_clip_norm", bilstm.grad_clip_norm),
        RAGQ_INT("bilstm.max_epochs", bilstm.max_epochs),
        RAGQ_INT("bilstm.lr_drop_epoch", bilstm.lr_drop_epoch),
        RAGQ_REAL("bilstm.lr_drop_factor", bilstm.lr_drop_factor),
        {"bilstm.seq_layout",
         [](PipelineConfig& c, std::string_view v) {
           if (v == "per_feature_steps") c.bilstm.seq_layout = SeqLayout::per_feature_steps;
           else if (v == "flat_steps") c.bilstm.seq_layout = SeqLayout::flat_steps;
           else throw ArgumentError("bilstm.seq_layout: expected per_feature_steps or flat_steps");
         },
         [](const PipelineConfig& c) {
           return std::string(c.bilstm.seq_layout == SeqLayout::per_feature_steps ? "per_feature_steps"
                                                                                  : "flat_steps");
         }},
        RAGQ_INT("gbt.n_rounds", gbt.n_rounds),
        RAGQ_REAL("gbt.split_gain_floor", gbt.split_gain_floor),
        RAGQ_INT("gbt.min_leaf_samples", gbt.min_leaf_samples),
        {"benchmark.baselines_on_expanded",
         [](PipelineConfig& c, std::string_view v) {
           c.baselines_on_expanded = parse_bool("benchmark.baselines_on_expanded", v);
         },
         [](const PipelineConfig& c) { return fmt(c.baselines_on_expanded); }},
        {"run.seed", [](PipelineConfig& c, std::string_view v) { c.seed = parse_u64("run.seed", v); },
         [](const PipelineConfig& c) { return std::to_string(c.seed); }},
        {"run.out", [](PipelineConfig& c, std::string_view v) { c.out_dir = std::string(v); },
         [](const PipelineConfig& c) { return c.out_dir.string(); }},
    };
    for (auto kind : {BaselineKind::decision_tree, BaselineKind::adaboost_r2, BaselineKind::gbdt,
                      BaselineKind::extra_trees, BaselineKind::knn}) {
      const std::string prefix = "baseline." + to_string(kind) + ".";
      const auto add_int = [&](const std::string& name, int BaselineConfig::*field) {
        const std::string key = prefix + name;
        t.push_back({key,
                     [=](PipelineConfig& c, std::string_view v) { baseline(c, kind).*field = parse_i32(key, v); },
                     [=](const PipelineConfig& c) { return std::to_string(baseline(c, kind).*field); }});
      };
      add_int("max_depth", &BaselineConfig::max_depth);
      add_int("min_samples_leaf", &BaselineConfig::min_samples_leaf);
      add_int("n_estimators", &BaselineConfig::n_estimators);
      add_int("k", &BaselineConfig::k);
      const std::string lr_key = prefix + "learning_rate";
      t.push_back({lr_key,
                   [=](PipelineConfig& c, std::string_view v) {
                     baseline(c, kind).learning_rate = parse_real(lr_key, v);
                   },
                   [=](const PipelineConfig& c) { return fmt(baseline(c, kind).learning_rate); }});
    }
    return t;
  }();
  return table;
}

#undef RAGQ_REAL
#undef RAGQ_INT

}  // namespace

void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& s : settings())
    if (s.key == key) {
      s.set(cfg, trim(value));
      return;
    }
  throw ArgumentError("unknown config key '" + std::string(key) + "'");
}

void apply_config_text(PipelineConfig& cfg, std::string_view text, const std::string& source) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ArgumentError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    try {
      apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ArgumentError& e) {
      throw ArgumentError(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  apply_config_text(cfg, ss.str(), path.string());
}

std::string dump_config(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& s : settings()) out += s.key + " = " + s.get(cfg) + "\n";
  return out;
}

std::string config_digest(const PipelineConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& s : settings()) {
    if (s.key == "run.out") continue;
    for (unsigned char c : s.key + "=" + s.get(cfg) + "\n") {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ragq
