#include "netgeom/checkpoint.hpp"

#include <cstring>

#include "netgeom/errors.hpp"
#include "netgeom/io.hpp"
#include "netgeom/serde.hpp"

namespace netgeom {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string group_name(ParamGroup g) {
  return g == ParamGroup::GL ? "gl" : "main";
}

std::string b64_doubles(const std::vector<double>& v) {
  return base64_encode(v.data(), v.size() * sizeof(double));
}

void fill_doubles(std::vector<double>& dst, const std::string& b64,
                  const std::string& what) {
  std::vector<unsigned char> bytes = base64_decode(b64);
  if (bytes.size() != dst.size() * sizeof(double)) {
    throw ConfigError("checkpoint: " + what + " payload holds " +
                      std::to_string(bytes.size()) + " bytes, expected " +
                      std::to_string(dst.size() * sizeof(double)));
  }
  std::memcpy(dst.data(), bytes.data(), bytes.size());
}

}  // namespace

void save_checkpoint(const std::string& path, const Network& net,
                     std::uint64_t seed, InitScheme scheme, int epoch) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["seed"] = seed;
  j["scheme"] = init_scheme_name(scheme);
  j["epoch"] = epoch;
  j["input_dim"] = net.input_dim;
  j["output_dim"] = net.output_dim;

  json specs = json::array();
  for (const auto& spec : net.specs) specs.push_back(layer_spec_to_json(spec));
  j["specs"] = specs;
  j["nu"] = net.nu;

  json blocks = json::array();
  for (const auto& blk : net.blocks) {
    blocks.push_back({{"name", blk.name},
                      {"group", group_name(blk.group)},
                      {"rows", blk.w.rows},
                      {"cols", blk.w.cols},
                      {"w", b64_doubles(blk.w.a)},
                      {"b", b64_doubles(blk.b)}});
  }
  j["blocks"] = blocks;

  write_text_file(path, j.dump(2) + "\n");
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::string text = read_text_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError("checkpoint: invalid JSON in " + path + ": " + e.what());
  }

  try {
    if (!j.contains("schema_version") ||
        j.at("schema_version").get<int>() != kSchemaVersion) {
      throw ConfigError("checkpoint: unsupported schema_version in " + path);
    }

    LoadedCheckpoint out;
    out.seed = j.at("seed").get<std::uint64_t>();
    out.scheme = init_scheme_from_name(j.at("scheme").get<std::string>());
    out.epoch = j.at("epoch").get<int>();

    std::vector<LayerSpec> specs;
    const json& jspecs = j.at("specs");
    for (size_t i = 0; i < jspecs.size(); ++i) {
      specs.push_back(layer_spec_from_json(
          jspecs[i], "specs[" + std::to_string(i) + "]"));
    }

    // Rebuilding from the specs guarantees the block layout is internally
    // consistent; the stored payloads then overwrite the fresh draws.
    out.net = init_network(specs, out.seed, out.scheme);

    const json& jblocks = j.at("blocks");
    if (jblocks.size() != out.net.blocks.size()) {
      throw ConfigError("checkpoint: file has " +
                        std::to_string(jblocks.size()) + " blocks, specs "
                        "produce " + std::to_string(out.net.blocks.size()));
    }
    for (size_t i = 0; i < jblocks.size(); ++i) {
      const json& jb = jblocks[i];
      ParamBlock& blk = out.net.blocks[i];
      const std::string name = jb.at("name").get<std::string>();
      if (name != blk.name || jb.at("group").get<std::string>() !=
                                  group_name(blk.group)) {
        throw ConfigError("checkpoint: block " + std::to_string(i) +
                          " ('" + name + "') does not match the specs");
      }
      if (jb.at("rows").get<int>() != blk.w.rows ||
          jb.at("cols").get<int>() != blk.w.cols) {
        throw ConfigError("checkpoint: block '" + name + "' shape mismatch");
      }
      fill_doubles(blk.w.a, jb.at("w").get<std::string>(), name + ".w");
      fill_doubles(blk.b, jb.at("b").get<std::string>(), name + ".b");
    }

    const json& jnu = j.at("nu");
    if (jnu.size() != out.net.nu.size()) {
      throw ConfigError("checkpoint: nu entry count mismatch in " + path);
    }
    for (size_t i = 0; i < jnu.size(); ++i) {
      out.net.nu[i] = jnu[i].get<double>();
    }
    return out;
  } catch (const json::exception& e) {
    throw DataError("checkpoint: malformed " + path + ": " + e.what());
  }
}

}  // namespace netgeom
