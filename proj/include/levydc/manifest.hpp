#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

namespace levydc {

inline constexpr const char* library_version = "1.0.0";

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

/// Written once before any result (status "running") and again at the end with digests.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, std::string command, std::string config_snapshot, std::uint64_t seed)
      : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["config"] = std::move(config_snapshot);
    doc_["seed"] = seed;
    doc_["status"] = "running";
    doc_["artifacts"] = nlohmann::json::array();
    for (const char* m : {"levy_measure", "dc_cutting", "ar_cutting", "sde_model", "euler_engine",
                          "error_harness", "experiment_cli"})
      doc_["versions"][m] = library_version;
  }

  void plan(const std::string& relative_path) {
    planned_.push_back(relative_path);
    doc_["artifacts"].push_back({{"path", relative_path}});
  }

  const std::vector<std::string>& planned() const { return planned_; }

  void set(const std::string& key, nlohmann::json value) { doc_[key] = std::move(value); }

  void write() const {
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << doc_.dump(2) << "\n";
  }

  void finish(const std::string& status) {
    doc_["status"] = status;
    doc_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    auto& arts = doc_["artifacts"];
    for (auto& a : arts) {
      const auto p = dir_ / a["path"].get<std::string>();
      if (std::filesystem::exists(p)) a["sha256"] = sha256_hex(read_file(p));
    }
    write();
  }

  const nlohmann::json& json() const { return doc_; }

 private:
  std::filesystem::path dir_;
  std::chrono::steady_clock::time_point start_;
  nlohmann::json doc_;
  std::vector<std::string> planned_;
};

}  // namespace levydc
