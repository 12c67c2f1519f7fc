#include "lapiths/manifest.hpp"

#include <fstream>
#include <sstream>

#include "lapiths/errors.hpp"
#include <json.hpp>

namespace lapiths {

using ordered_json = nlohmann::ordered_json;

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

std::string manifest_to_json(const RunManifest& manifest) {
  ordered_json obj;
  obj["command"] = manifest.command;
  obj["version"] = manifest.version;
  obj["seed"] = manifest.seed;
  obj["config_hash"] = manifest.config_hash;
  obj["inputs"] = manifest.inputs;
  obj["outputs"] = manifest.outputs;
  return obj.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  RunManifest manifest;
  try {
    const auto obj = ordered_json::parse(text);
    manifest.command = obj.at("command").get<std::string>();
    manifest.version = obj.at("version").get<std::string>();
    manifest.seed = obj.at("seed").get<std::uint64_t>();
    manifest.config_hash = obj.at("config_hash").get<std::string>();
    manifest.inputs = obj.at("inputs").get<std::vector<std::string>>();
    manifest.outputs = obj.at("outputs").get<std::vector<std::string>>();
  } catch (const ordered_json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  return manifest;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  out << manifest_to_json(manifest);
}

RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return manifest_from_json(buffer.str());
}

std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  std::filesystem::path path = output;
  path += ".manifest.json";
  return path;
}

}  // namespace lapiths
