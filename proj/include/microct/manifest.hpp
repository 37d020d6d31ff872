#pragma once

#include <map>
#include <string>
#include <vector>

namespace microct {

inline constexpr const char* kToolkitVersion = "1.0.0";

/// Run manifest: written before outputs are produced, then finalized with a
/// content hash per output once they exist.
class RunManifest {
  public:
    RunManifest(std::string command, std::map<std::string, std::string> flags);

    void add_input(const std::string& path);
    void declare_output(const std::string& path);

    /// Writes the manifest (without output hashes) to <dir>/manifest.json.
    void write_pending(const std::string& dir);
    /// Hashes every declared output and rewrites the manifest with wall time.
    void finalize(const std::string& dir);

    const std::vector<std::string>& outputs() const { return outputs_; }

  private:
    std::string command_;
    std::map<std::string, std::string> flags_;
    std::vector<std::pair<std::string, std::string>> input_hashes_;
    std::vector<std::string> outputs_;
    double start_seconds_ = 0.0;
};

/// FNV-1a hash of the file contents, hex-encoded. Missing files hash to "missing".
std::string hash_file(const std::string& path);

}  // namespace microct
