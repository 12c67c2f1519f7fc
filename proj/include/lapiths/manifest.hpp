#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lapiths {

// Every emitted artifact is accompanied by the manifest that produced it;
// identical manifests mean byte-identical outputs on one platform.
struct RunManifest {
  std::string command;
  std::string version;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  bool operator==(const RunManifest&) const = default;
};

// 64-bit FNV-1a of the canonical config text, hex encoded.
std::string fnv1a_hex(std::string_view data);

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest load_manifest(const std::filesystem::path& path);

// Conventional sidecar location: "<output>.manifest.json".
std::filesystem::path manifest_path_for(const std::filesystem::path& output);

}  // namespace lapiths
