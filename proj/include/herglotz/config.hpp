#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "herglotz/measure.hpp"
#include "herglotz/rankone.hpp"
#include "herglotz/triple.hpp"

namespace herglotz {

/// Invalid model file. The message names the offending field, or the line
/// and column for malformed JSON.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ModelKind { h_triple, nu_atomic };

/// A model file:
///
///   {"kind": "h-triple", "alpha": 1, "beta": 0,
///    "atoms": [{"pos": 0, "mass": 1}], "slabs": [{"a": 2, "b": 3, "height": 1}]}
///   {"kind": "nu-atomic", "atoms": [{"pos": -1, "mass": 0.5}, {"pos": 1, "mass": 0.5}]}
///
/// For h-triple the atoms and slabs form mu; for nu-atomic the atoms form nu,
/// the spectral measure of the rank-one operator model.
struct ModelConfig {
  ModelKind kind = ModelKind::h_triple;
  double alpha = 0.0;
  double beta = 0.0;
  RealMeasure measure;

  /// The Herglotz function of the model (h = -1/F for nu-atomic).
  HerglotzTriple function() const {
    if (kind == ModelKind::h_triple) return HerglotzTriple(alpha, beta, measure);
    return nu_to_h(measure);
  }

  RankOneModel rank_one() const {
    if (kind != ModelKind::nu_atomic) throw ConfigError("model: expected kind \"nu-atomic\"");
    return build_model(measure);
  }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

namespace detail {

using nlohmann::json;

inline double number_field(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + "." + key + ": missing");
  if (!it->is_number()) throw ConfigError(where + "." + key + ": expected a number");
  return it->get<double>();
}

inline void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

inline const json& array_field(const json& obj, const char* key, const json& fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_array()) throw ConfigError(std::string(key) + ": expected an array");
  return *it;
}

}  // namespace detail

inline ModelConfig parse_config(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("model: top level must be an object");

  const auto kind_it = doc.find("kind");
  if (kind_it == doc.end()) throw ConfigError("kind: missing");
  if (!kind_it->is_string()) throw ConfigError("kind: expected a string");
  const std::string kind = kind_it->get<std::string>();

  ModelConfig cfg;
  if (kind == "h-triple") {
    cfg.kind = ModelKind::h_triple;
    detail::check_keys(doc, {"kind", "alpha", "beta", "atoms", "slabs"}, "model");
    cfg.alpha = detail::number_field(doc, "alpha", "model");
    cfg.beta = detail::number_field(doc, "beta", "model");
    if (!(cfg.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  } else if (kind == "nu-atomic") {
    cfg.kind = ModelKind::nu_atomic;
    detail::check_keys(doc, {"kind", "atoms"}, "model");
  } else {
    throw ConfigError("kind: expected \"h-triple\" or \"nu-atomic\", got \"" + kind + "\"");
  }

  const json empty = json::array();
  std::vector<Atom> atoms;
  const json& atoms_json = detail::array_field(doc, "atoms", empty);
  for (std::size_t i = 0; i < atoms_json.size(); ++i) {
    const std::string where = "atoms[" + std::to_string(i) + "]";
    const json& a = atoms_json[i];
    if (!a.is_object()) throw ConfigError(where + ": expected an object");
    detail::check_keys(a, {"pos", "mass"}, where);
    atoms.push_back({detail::number_field(a, "pos", where), detail::number_field(a, "mass", where)});
    if (atoms.back().mass < 0.0) throw ConfigError(where + ".mass: must be >= 0");
  }

  std::vector<Slab> slabs;
  const json& slabs_json = detail::array_field(doc, "slabs", empty);
  for (std::size_t i = 0; i < slabs_json.size(); ++i) {
    const std::string where = "slabs[" + std::to_string(i) + "]";
    const json& s = slabs_json[i];
    if (!s.is_object()) throw ConfigError(where + ": expected an object");
    detail::check_keys(s, {"a", "b", "height"}, where);
    slabs.push_back({detail::number_field(s, "a", where), detail::number_field(s, "b", where),
                     detail::number_field(s, "height", where)});
    if (slabs.back().height < 0.0) throw ConfigError(where + ".height: must be >= 0");
    if (!(slabs.back().a <= slabs.back().b)) throw ConfigError(where + ": requires a <= b");
  }

  try {
    cfg.measure = make_measure(std::move(atoms), std::move(slabs));
    if (cfg.kind == ModelKind::h_triple) {
      (void)cfg.function();
    } else if (cfg.measure.atoms().empty()) {
      throw ConfigError("atoms: nu-atomic model needs at least one atom with positive mass");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline std::string emit_config(const ModelConfig& cfg) {
  using detail::json;
  json doc;
  doc["kind"] = cfg.kind == ModelKind::h_triple ? "h-triple" : "nu-atomic";
  if (cfg.kind == ModelKind::h_triple) {
    doc["alpha"] = cfg.alpha;
    doc["beta"] = cfg.beta;
  }
  doc["atoms"] = json::array();
  for (const Atom& a : cfg.measure.atoms()) doc["atoms"].push_back({{"pos", a.position}, {"mass", a.mass}});
  if (cfg.kind == ModelKind::h_triple) {
    doc["slabs"] = json::array();
    for (const Slab& s : cfg.measure.slabs())
      doc["slabs"].push_back({{"a", s.a}, {"b", s.b}, {"height", s.height}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace herglotz
