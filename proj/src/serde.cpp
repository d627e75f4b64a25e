#include "netgeom/serde.hpp"

#include "netgeom/errors.hpp"

namespace netgeom {

namespace {

using nlohmann::json;

const json& req(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw ConfigError("config: missing key " + path + "." + key);
  }
  return *it;
}

double req_num(const json& j, const char* key, const std::string& path) {
  const json& v = req(j, key, path);
  if (!v.is_number()) {
    throw ConfigError("config: " + path + "." + key + " must be a number");
  }
  return v.get<double>();
}

int req_int(const json& j, const char* key, const std::string& path) {
  const json& v = req(j, key, path);
  if (!v.is_number_integer()) {
    throw ConfigError("config: " + path + "." + key + " must be an integer");
  }
  return v.get<int>();
}

std::string req_str(const json& j, const char* key, const std::string& path) {
  const json& v = req(j, key, path);
  if (!v.is_string()) {
    throw ConfigError("config: " + path + "." + key + " must be a string");
  }
  return v.get<std::string>();
}

int opt_int(const json& j, const char* key, int fallback,
            const std::string& path) {
  if (!j.contains(key)) return fallback;
  return req_int(j, key, path);
}

bool opt_bool(const json& j, const char* key, bool fallback,
              const std::string& path) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) {
    throw ConfigError("config: " + path + "." + key + " must be a boolean");
  }
  return v.get<bool>();
}

ActivationKind act_field(const json& j, const std::string& path) {
  std::string name = req_str(j, "act", path);
  try {
    return act_from_name(name);
  } catch (const ConfigError&) {
    throw ConfigError("config: " + path + ".act has unknown activation '" +
                      name + "'");
  }
}

}  // namespace

nlohmann::json schedule_to_json(const Schedule& s) {
  switch (s.kind) {
    case Schedule::Kind::Constant:
      return {{"kind", "constant"}, {"v", s.v0}};
    case Schedule::Kind::StepDecay:
      return {{"kind", "step"},
              {"v0", s.v0},
              {"factor", s.factor},
              {"every", s.every}};
    case Schedule::Kind::LinearDecay:
    default:
      return {{"kind", "linear"},
              {"v0", s.v0},
              {"v1", s.v1},
              {"end_epoch", s.end_epoch}};
  }
}

Schedule schedule_from_json(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) {
    // Bare numbers read as constant schedules.
    return Schedule::constant(j.get<double>());
  }
  if (!j.is_object()) {
    throw ConfigError("config: " + key + " must be a number or an object");
  }
  std::string kind = req_str(j, "kind", key);
  if (kind == "constant") return Schedule::constant(req_num(j, "v", key));
  if (kind == "step") {
    return Schedule::step(req_num(j, "v0", key), req_num(j, "factor", key),
                          req_int(j, "every", key));
  }
  if (kind == "linear") {
    return Schedule::linear(req_num(j, "v0", key), req_num(j, "v1", key),
                            req_int(j, "end_epoch", key));
  }
  throw ConfigError("config: " + key + ".kind has unknown schedule kind '" +
                    kind + "'");
}

nlohmann::json layer_spec_to_json(const LayerSpec& spec) {
  if (const auto* d = std::get_if<DenseSpec>(&spec)) {
    return {{"type", "dense"},
            {"in", d->in},
            {"out", d->out},
            {"act", act_name(d->act)},
            {"bias", d->bias}};
  }
  if (const auto* g = std::get_if<GenSkipSpec>(&spec)) {
    return {{"type", "gen_skip"},
            {"in", g->in},
            {"width", g->width},
            {"out", g->out},
            {"act", act_name(g->act)},
            {"nu", schedule_to_json(g->nu)},
            {"proj", g->proj == ProjKind::Identity ? "identity" : "learned"},
            {"bias", g->bias},
            {"inner_layers", g->inner_layers},
            {"gl", g->gl}};
  }
  const auto& gd = std::get<GenDropoutSpec>(spec);
  return {{"type", "gen_dropout"},
          {"in", gd.in},
          {"width", gd.width},
          {"out", gd.out},
          {"act", act_name(gd.act)},
          {"drop_prob", gd.drop_prob},
          {"bias", gd.bias}};
}

LayerSpec layer_spec_from_json(const nlohmann::json& j,
                               const std::string& key) {
  if (!j.is_object()) {
    throw ConfigError("config: " + key + " must be an object");
  }
  std::string type = req_str(j, "type", key);
  if (type == "dense") {
    DenseSpec d;
    d.in = opt_int(j, "in", -1, key);
    d.out = req_int(j, "out", key);
    d.act = act_field(j, key);
    d.bias = opt_bool(j, "bias", true, key);
    return d;
  }
  if (type == "gen_skip") {
    GenSkipSpec g;
    g.in = opt_int(j, "in", -1, key);
    g.width = req_int(j, "width", key);
    g.out = req_int(j, "out", key);
    g.act = act_field(j, key);
    if (j.contains("nu")) g.nu = schedule_from_json(j.at("nu"), key + ".nu");
    if (j.contains("proj")) {
      std::string p = req_str(j, "proj", key);
      if (p == "identity") {
        g.proj = ProjKind::Identity;
      } else if (p == "learned") {
        g.proj = ProjKind::Learned;
      } else {
        throw ConfigError("config: " + key + ".proj must be identity|learned");
      }
    }
    g.bias = opt_bool(j, "bias", false, key);
    g.inner_layers = opt_int(j, "inner_layers", 1, key);
    g.gl = opt_bool(j, "gl", true, key);
    return g;
  }
  if (type == "gen_dropout") {
    GenDropoutSpec gd;
    gd.in = opt_int(j, "in", -1, key);
    gd.width = req_int(j, "width", key);
    gd.out = req_int(j, "out", key);
    gd.act = act_field(j, key);
    gd.drop_prob = j.contains("drop_prob") ? req_num(j, "drop_prob", key) : 0.0;
    gd.bias = opt_bool(j, "bias", false, key);
    return gd;
  }
  throw ConfigError("config: " + key + ".type has unknown layer type '" +
                    type + "'");
}

std::string init_scheme_name(InitScheme s) {
  return s == InitScheme::He ? "he" : "xavier";
}

InitScheme init_scheme_from_name(const std::string& name) {
  if (name == "he") return InitScheme::He;
  if (name == "xavier") return InitScheme::Xavier;
  throw ConfigError("config: unknown init scheme '" + name +
                    "' (expected he|xavier)");
}

}  // namespace netgeom
