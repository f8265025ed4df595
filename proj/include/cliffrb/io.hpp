#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cliffrb {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kLibraryVersion = "1.0.0";

std::string read_text_file(const std::string& path);
// Creates parent directories as needed.
void write_text_file(const std::string& path, const std::string& text);

// Record of one command run: everything needed to regenerate its artifacts.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::map<std::string, std::string> parameters;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    std::string to_json() const;
    static RunManifest from_json(const std::string& text);
};

// Fresh seed from the system entropy source.
std::uint64_t generate_seed();

}  // namespace cliffrb
