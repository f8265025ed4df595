#include "cliffrb/io.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cliffrb {

using nlohmann::json;

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

std::string RunManifest::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["version"] = kLibraryVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["threads"] = threads;
    j["parameters"] = parameters;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("schema_version", 0) != kSchemaVersion) throw std::invalid_argument("unsupported manifest schema_version");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.threads = j.value("threads", std::size_t{1});
    m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    m.inputs = j.value("inputs", std::vector<std::string>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    return m;
}

std::uint64_t generate_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

}  // namespace cliffrb
