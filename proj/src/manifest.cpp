#include "microct/manifest.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "microct/common.hpp"

namespace microct {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::string hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) return "missing";
    const auto size = in.tellg();
    in.seekg(0);
    std::vector<char> buf(static_cast<std::size_t>(size));
    in.read(buf.data(), size);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.data(), buf.size())));
    return hex;
}

RunManifest::RunManifest(std::string command, std::map<std::string, std::string> flags)
    : command_(std::move(command)), flags_(std::move(flags)), start_seconds_(now_seconds()) {}

void RunManifest::add_input(const std::string& path) {
    input_hashes_.emplace_back(path, hash_file(path));
}

void RunManifest::declare_output(const std::string& path) { outputs_.push_back(path); }

void RunManifest::write_pending(const std::string& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json j;
    j["command"] = command_;
    j["flags"] = flags_;
    j["version"] = kToolkitVersion;
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [path, hash] : input_hashes_) inputs[path] = hash;
    j["inputs"] = inputs;
    nlohmann::json outputs = nlohmann::json::object();
    for (const auto& path : outputs_) outputs[path] = "pending";
    j["outputs"] = outputs;
    j["status"] = "pending";
    std::ofstream out(dir + "/manifest.json");
    out << j.dump(2) << "\n";
}

void RunManifest::finalize(const std::string& dir) {
    nlohmann::json j;
    {
        std::ifstream in(dir + "/manifest.json");
        if (in) in >> j;
    }
    j["command"] = command_;
    j["flags"] = flags_;
    j["version"] = kToolkitVersion;
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [path, hash] : input_hashes_) inputs[path] = hash;
    j["inputs"] = inputs;
    nlohmann::json outputs = nlohmann::json::object();
    for (const auto& path : outputs_) outputs[path] = hash_file(path);
    j["outputs"] = outputs;
    j["wall_seconds"] = now_seconds() - start_seconds_;
    j["status"] = "complete";
    std::ofstream out(dir + "/manifest.json");
    out << j.dump(2) << "\n";
}

}  // namespace microct
