#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

namespace lbmbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1; // validation / domain errors
inline constexpr int kExitIo = 2;     // unreadable/unwritable files

/// Thrown by commands that already reported their errors and only need a
/// specific exit code (e.g. partial analyze results).
struct ExitWith {
    int code;
};

void register_simulate(CLI::App& app);
void register_validate(CLI::App& app);
void register_analyze(CLI::App& app);
void register_sweep(CLI::App& app);
void register_perf(CLI::App& app);

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::ios_base::failure("cannot read " + path.string());
    }
    return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::ios_base::failure("cannot write " + path.string());
    }
    return out;
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
    auto out = open_output(path);
    out << text;
    if (!out) {
        throw std::ios_base::failure("short write to " + path.string());
    }
}

/// Node name from a log path: "<node>.nvidiasmi.txt" -> "<node>".
inline std::string node_name(const std::filesystem::path& path) {
    std::string name = path.filename().string();
    const std::string suffix = ".nvidiasmi.txt";
    if (name.size() > suffix.size() &&
        name.ends_with(suffix)) {
        return name.substr(0, name.size() - suffix.size());
    }
    return path.stem().string();
}

} // namespace lbmbench
